//! Closed-form plane-wave-pump results: gains, intensities, pixel correlations,
//! optimal near-field shifts and quasi-stationary finite-pump kernels.

pub mod gain;
pub mod quadrature;
pub mod quasi;
pub mod shifts;
pub mod table;

pub use gain::{gain_uv, twin_amplitude, v1_sq, GainSample};
pub use quadrature::{
    far_spectrum, mean_intensity_far, mean_intensity_near, pixel_correlations_pwpa, HKernel, PixelCorrelationResult,
    PixelGeometry, QuadResult, QuadSettings, TransverseDims,
};
pub use quasi::{local_amplitude, pump_averaged_spectrum, quasi_stationary_kernels};
pub use shifts::{optimal_shifts, phase_of_gain_product, tanh_factor, PhaseComparison};
