//! Photon counting at the detection planes and ensemble statistics.

pub mod detector;
pub mod gaussian;
pub mod map;
pub mod stats;

pub use detector::{
    axis_span, count_photons, detector_regions, pixel_region, profile_count, region_count, time_span,
    transverse_profile, DetectorSpec, Plane, Region, Span,
};
pub use gaussian::{GaussianCheck, GaussianReport};
pub use map::{var_minus_from_map, CorrelationMap, MapAccumulator, MapMode};
pub use stats::{apply_efficiency, jackknife_se, ordering_correct, Measurement, PairMoments, StatsAccumulator};
