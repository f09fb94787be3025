//! Wigner Monte Carlo: vacuum sampling and split-step propagation through the crystal.

pub mod dump;
pub mod ensemble;
pub mod fft;
pub mod pump;
pub mod state;
pub mod stepper;
pub mod vacuum;

pub use dump::{read_field, write_field};
pub use ensemble::run_ensemble;
pub use fft::Spectral;
pub use pump::{pump_entrance, pump_envelope};
pub use state::{Domain, FieldState};
pub use stepper::{Propagator, StepScheme};
pub use vacuum::{complex_normal, sample_vacuum, TrajectorySeed};
