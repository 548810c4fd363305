//! Run configuration: one TOML document with a section per subcommand.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use superatom::coupling::{BeamAndLasers, CloudGeometry};
use superatom::fitting::DetectionScale;
use superatom::oracle::OracleInput;
use superatom::{PulseSpec, SuperatomParams};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<SuperatomParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pulse: Option<PulseSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlate: Option<CorrelateConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phase_diagram: Option<PhaseDiagramConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synthesize: Option<SynthesizeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleSection>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_start: f64,
    pub t_end: f64,
    pub n_points: usize,
}

impl GridConfig {
    pub fn points(&self, n: usize) -> Vec<f64> {
        if n == 1 {
            return vec![self.t_start];
        }
        let h = (self.t_end - self.t_start) / (n - 1) as f64;
        (0..n).map(|i| self.t_start + h * i as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelateConfig {
    pub n_grid: usize,
    #[serde(default = "default_floor")]
    pub floor: f64,
}

fn default_floor() -> f64 {
    superatom::correlation::DEFAULT_FLOOR
}

/// Log-spaced axes as `[low, high, count]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseDiagramConfig {
    pub lambda: (f64, f64, usize),
    pub nph: (f64, f64, usize),
    #[serde(default = "one")]
    pub tau: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    pub cloud: CloudGeometry,
    pub beam: BeamAndLasers,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    /// Trace CSV files, relative to the config file.
    pub traces: Vec<PathBuf>,
    /// `name = [low, high]` for each fitted rate.
    #[serde(default)]
    pub free: ParamTable<(f64, f64)>,
    #[serde(default)]
    pub fixed: ParamTable<f64>,
    #[serde(default = "five")]
    pub starts: usize,
    #[serde(default = "max_evals")]
    pub max_evaluations: usize,
    #[serde(default)]
    pub detection_scale: DetectionScale,
}

fn five() -> usize {
    5
}

fn max_evals() -> usize {
    3000
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamTable<T> {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_d: Option<T>,
}

impl<T: Copy> ParamTable<T> {
    pub fn get(&self, i: usize) -> Option<T> {
        [self.kappa, self.gamma, self.gamma_d][i]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesizeConfig {
    /// Gaussian noise as a fraction of each trace's peak.
    pub noise: f64,
    pub kinds: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub kappa: f64,
    pub modes: usize,
    pub box_length: f64,
    pub t_end: f64,
    /// Emission times of the comparison grid.
    pub times: Vec<f64>,
    pub input: OracleInput,
    /// Also run at half the cutoff and remove the leading cutoff error.
    #[serde(default)]
    pub extrapolate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub directory: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: default_dir(), formats: default_formats() }
    }
}

/// Parses TOML, or the `config` field of a manifest when the file is JSON.
pub fn parse_config(text: &str, is_json: bool) -> CliResult<RunConfig> {
    if is_json {
        let mut v: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::config("", e))?;
        let inner = v.get_mut("config").map(serde_json::Value::take).ok_or_else(|| CliError::config("config", "manifest has no `config` field"))?;
        serde_path_to_error::deserialize(inner).map_err(|e| CliError::config(e.path().to_string(), e.inner()))
    } else {
        let de = toml::Deserializer::parse(text).map_err(|e| CliError::config("", e))?;
        serde_path_to_error::deserialize(de).map_err(|e| CliError::config(e.path().to_string(), e.inner().message()))
    }
}

/// Reads a config; fit trace paths are resolved against the file's directory.
pub fn load_config(path: &Path) -> CliResult<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let is_json = path.extension().is_some_and(|e| e == "json");
    let mut cfg = parse_config(&text, is_json)?;
    let base = path.parent().unwrap_or(Path::new(""));
    if let Some(fit) = &mut cfg.fit {
        for t in &mut fit.traces {
            if t.is_relative() {
                *t = base.join(&*t);
            }
        }
    }
    Ok(cfg)
}

pub fn require<'a, T>(section: &'a Option<T>, name: &str) -> CliResult<&'a T> {
    section.as_ref().ok_or_else(|| CliError::config(name, format!("section `{name}` is required by this subcommand")))
}

/// Maps a validation failure of a section onto a config error.
pub fn check(name: &str, r: superatom::Result<()>) -> CliResult<()> {
    r.map_err(|e| CliError::config(name, e))
}
