//! Physical parameters, lattices and derived scales.

pub mod crystal;
pub mod grid;
pub mod pump;
pub mod scales;

pub use crystal::{Checked, CrystalConfig, CrystalParams, PhaseMatching};
pub use grid::{Axis, GridDims, GridSpec, Shape};
pub use pump::{PumpParams, PumpProfile};
pub use scales::{derive_scales, pump_area, DerivedScales};

use serde::Deserialize;

use crate::error::{Error, Result};

const LBO: &str = include_str!("../../presets/lbo.toml");
const BBO: &str = include_str!("../../presets/bbo.toml");

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CrystalFile {
    schema_version: u32,
    crystal: CrystalConfig,
}

/// Names of the shipped crystal presets.
pub fn crystal_preset_names() -> &'static [&'static str] {
    &["lbo", "bbo"]
}

pub fn crystal_preset_config(name: &str) -> Result<CrystalConfig> {
    let text = match name {
        "lbo" => LBO,
        "bbo" => BBO,
        other => return Err(Error::Config(format!("unknown crystal preset '{other}'"))),
    };
    let file: CrystalFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    if file.schema_version != 1 {
        return Err(Error::Config(format!("unsupported crystal schema version {}", file.schema_version)));
    }
    Ok(file.crystal)
}

pub fn crystal_preset(name: &str) -> Result<CrystalParams> {
    crystal_preset_config(name)?.build()
}
