use serde::{Deserialize, Serialize};

use crate::detection::DetectorSpec;
use crate::error::{Error, Result};
use crate::model::{crystal_preset_config, CrystalConfig, GridSpec, PumpProfile};
use crate::optics::OpticalPath;
use crate::propagator::StepScheme;

pub const SCHEMA_VERSION: u32 = 1;

/// Crystal given by preset name or inline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CrystalSpec {
    Preset(String),
    Inline(CrystalConfig),
}

impl CrystalSpec {
    pub fn resolve(&self) -> Result<CrystalConfig> {
        match self {
            CrystalSpec::Preset(name) => crystal_preset_config(name),
            CrystalSpec::Inline(c) => Ok(c.clone()),
        }
    }
}

/// Pump given by absolute sizes or by the bandwidth ratios δq₀/q₀ and δω₀/Ω₀.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpConfig {
    pub sigma_p_lc: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dq0_over_q0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domega0_over_omega0: Option<f64>,
    #[serde(default)]
    pub profile: PumpProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    Pwpa,
    Mc,
    #[default]
    Both,
}

impl std::str::FromStr for RunMode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "pwpa" | "pwpa-analytic" => Ok(RunMode::Pwpa),
            "mc" | "monte-carlo" => Ok(RunMode::Mc),
            "both" => Ok(RunMode::Both),
            _ => Err(format!("unknown mode '{s}' (pwpa, mc, both)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n_traj: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub mode: RunMode,
    /// Worker threads; 0 uses every available core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub scheme: StepScheme,
    /// Interference filter full width (m) around the degenerate wavelength.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter_fwhm: Option<f64>,
    /// Trajectories handed to the worker pool at once.
    #[serde(default = "default_chunk")]
    pub chunk: usize,
    /// Keep going when single trajectories fail and report them instead of aborting.
    #[serde(default)]
    pub salvage_partial: bool,
}

fn default_chunk() -> usize {
    256
}

/// Where pixel 1 sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PixelCenter {
    /// `detector.center_1` as given.
    #[default]
    Given,
    /// On the phase-matching ring along the walk-off axis.
    Ring,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    /// Pixel sizes (m).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub d_list: Vec<f64>,
    /// Pixel sizes in units of the natural resolution (x_diff far, x_coh near).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub d_rel: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dz_list: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dy_list: Vec<f64>,
    /// Correlation-map row through pixel 1.
    #[serde(default)]
    pub map: bool,
    #[serde(default)]
    pub pixel_center: PixelCenter,
    /// Pool all pixel positions of a plane-wave lattice (near field).
    #[serde(default)]
    pub pooled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    /// Raw field dumps of the first trajectories.
    #[serde(default)]
    pub dump_fields: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: "out".into(), dump_fields: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub crystal: CrystalSpec,
    pub pump: PumpConfig,
    pub grid: GridSpec,
    pub detector: DetectorSpec,
    pub optics: OpticalPath,
    pub run: RunConfig,
    #[serde(default)]
    pub scan: ScanConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

const REQUIRED: &[(&str, &[&str])] = &[
    ("", &["schema_version", "crystal", "pump", "grid", "detector", "optics", "run"]),
    ("pump", &["sigma_p_lc"]),
    ("grid", &["dims", "n_x", "l_x", "n_z"]),
    ("detector", &["plane", "d"]),
    ("optics", &["kind"]),
    ("run", &["n_traj", "master_seed"]),
];

/// Every required key absent from a parsed document, as dotted paths.
pub fn missing_fields(doc: &toml::Table) -> Vec<String> {
    let mut out = Vec::new();
    for (table, keys) in REQUIRED {
        let t = if table.is_empty() {
            Some(doc)
        } else {
            match doc.get(*table) {
                Some(toml::Value::Table(t)) => Some(t),
                _ => None,
            }
        };
        let Some(t) = t else { continue };
        for k in keys.iter() {
            if !t.contains_key(*k) {
                out.push(if table.is_empty() { k.to_string() } else { format!("{table}.{k}") });
            }
        }
    }
    if let Some(toml::Value::Table(p)) = doc.get("pump") {
        if !p.contains_key("w0") && !p.contains_key("dq0_over_q0") {
            out.push("pump.w0 (or pump.dq0_over_q0)".into());
        }
        if !p.contains_key("tau0") && !p.contains_key("domega0_over_omega0") {
            out.push("pump.tau0 (or pump.domega0_over_omega0)".into());
        }
    }
    out
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let doc: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let missing = missing_fields(&doc);
        if !missing.is_empty() {
            return Err(Error::Config(format!("missing required fields: {}", missing.join(", "))));
        }
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} not supported (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let text = self.to_toml().unwrap_or_default();
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}
