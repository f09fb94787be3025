#ifndef TWINBEAM_H
#define TWINBEAM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status code of every fallible call.
typedef enum TbStatus {
  TB_STATUS_OK = 0,
  TB_STATUS_NULL_POINTER = 1,
  TB_STATUS_INVALID_UTF8 = 2,
  // Bad parameter, grid, detector, optics or configuration.
  TB_STATUS_CONFIG = 3,
  // Quadrature or propagation failure.
  TB_STATUS_NUMERICAL = 4,
  TB_STATUS_IO = 5,
  // Output buffer too small; the required size has been written.
  TB_STATUS_BUFFER_TOO_SMALL = 6,
  TB_STATUS_PANIC = 7,
} TbStatus;

// Task selector for [`tb_experiment_run`].
typedef enum TbTask {
  TB_TASK_PWPA = 0,
  TB_TASK_SIMULATE = 1,
  TB_TASK_SCAN = 2,
} TbTask;

// Opaque crystal handle.
typedef struct TbCrystal TbCrystal;

// Opaque experiment-configuration handle.
typedef struct TbExperiment TbExperiment;

// Plane-wave-pump gains of one (q, Ω) mode pair, as real/imaginary parts.
typedef struct TbGain {
  double u1_re;
  double u1_im;
  double v1_re;
  double v1_im;
  double u2_re;
  double u2_im;
  double v2_re;
  double v2_im;
  // Phase mismatch Δ(q, Ω) in 1/m.
  double delta;
} TbGain;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *tb_version(void);

// Message of the last failure on this thread. Valid until the next failing call.
const char *tb_last_error(void);

// Loads a shipped crystal preset ("lbo" or "bbo").
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum TbStatus tb_crystal_preset(const char *name, struct TbCrystal **out);

// # Safety
// `crystal` must come from `tb_crystal_preset` (or be null) and not be used afterwards.
void tb_crystal_free(struct TbCrystal *crystal);

// Crystal length l_c in metres.
//
// # Safety
// `crystal` must be a live handle and `out` a valid pointer.
enum TbStatus tb_crystal_length(const struct TbCrystal *crystal, double *out);

// Gains after the full crystal at transverse wave vector (qx, qy) (1/m) and frequency
// offset Ω (rad/s), for peak gain σ_p l_c.
//
// # Safety
// `crystal` must be a live handle and `out` a valid pointer.
enum TbStatus tb_gain(const struct TbCrystal *crystal,
                      double qx,
                      double qy,
                      double omega,
                      double sigma_p_lc,
                      struct TbGain *out);

// Near-field imaging shifts (Δz, Δy) in metres that compensate diffraction and walk-off.
//
// # Safety
// `crystal` must be a live handle; `dz` and `dy` valid pointers.
enum TbStatus tb_optimal_shifts(const struct TbCrystal *crystal,
                                double sigma_p_lc,
                                double *dz,
                                double *dy);

// Parses an experiment configuration from TOML text.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum TbStatus tb_experiment_from_toml(const char *text, struct TbExperiment **out);

// Loads a named experiment preset (see `twinbeam presets`).
//
// # Safety
// `name` must be a NUL-terminated string and `out` a valid pointer.
enum TbStatus tb_experiment_preset(const char *name, struct TbExperiment **out);

// # Safety
// `exp` must come from a `tb_experiment_*` constructor (or be null) and not be used afterwards.
void tb_experiment_free(struct TbExperiment *exp);

// Overrides the trajectory count and master seed.
//
// # Safety
// `exp` must be a live handle.
enum TbStatus tb_experiment_set_run(struct TbExperiment *exp,
                                    uint64_t n_traj,
                                    uint64_t master_seed);

// Checks every constraint; on failure the message lists all violations.
//
// # Safety
// `exp` must be a live handle.
enum TbStatus tb_experiment_validate(const struct TbExperiment *exp);

// Writes the configuration as TOML into `buf` (capacity `len`, NUL included). When the
// buffer is too small, `needed` receives the required capacity and nothing is written.
//
// # Safety
// `exp` must be a live handle, `buf` writable for `len` bytes (or null with `len` = 0) and
// `needed` a valid pointer.
enum TbStatus tb_experiment_to_toml(const struct TbExperiment *exp,
                                    char *buf,
                                    uintptr_t len,
                                    uintptr_t *needed);

// Runs a task and writes its tables under `out_dir`.
//
// # Safety
// `exp` must be a live handle and `out_dir` a NUL-terminated string.
enum TbStatus tb_experiment_run(const struct TbExperiment *exp,
                                enum TbTask task,
                                const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TWINBEAM_H */
