//! Run configuration: the knobs of a Monte Carlo batch, a line-oriented
//! key-value parser, and a content hash embedded in every output file.

use std::fmt::Write as _;
use std::path::PathBuf;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::airframe::AirframeModel;
use crate::earth::{DrydenConfig, GeoPerturbationSpec};
use crate::flight::IntegratorKind;
use crate::scenarios::TerrainZone;
use crate::sensors::SensorSpec;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{0}`: {1}")]
    BadValue(String, String),
    #[error("line {0} is not `key value`")]
    Malformed(usize),
    #[error("unknown terrain zone `{0}`")]
    UnknownZone(String),
    #[error("cannot read `{0}`: {1}")]
    Unreadable(PathBuf, String),
    #[error("bad model file `{0}`: {1}")]
    BadModelFile(PathBuf, String),
}

/// Configuration of a batch; a single run is the special case n_runs = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub master_seed: u64,
    /// Number of Monte Carlo runs.
    pub n_runs: u32,
    /// Scenario selector: 1 (long range) or 2 (eight turns).
    pub scenario: u8,
    /// Terrain zone code (DS, FM, FR, MX, PR, UR).
    pub zone: String,
    pub integrator: IntegratorKind,
    /// Navigation implementation name from the registry.
    pub nav_impl: String,
    /// Turbulence wind speed at 20 ft [m/s]; 0 disables turbulence.
    pub turbulence_w20: f64,
    /// Worker threads for the batch; 0 means one per core.
    pub parallelism: usize,
    /// Trace output directory; no files are written when absent (digests are
    /// still computed).
    pub output_dir: Option<PathBuf>,
    /// Format and hash the trace streams; disabling skips trace formatting
    /// for throughput-bound batches (digests come back empty).
    pub trace: bool,
    /// Keep full per-run error series in memory (time aggregation).
    pub keep_series: bool,
    /// Decimation factor for kept series (1 = every estimation epoch).
    pub series_stride: usize,
    pub geo_spec: GeoPerturbationSpec,
    /// Optional key-value file overriding the built-in sensor error budget.
    pub sensor_spec_file: Option<PathBuf>,
    /// Optional key-value file overriding the built-in airframe model.
    pub airframe_file: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            master_seed: 1,
            n_runs: 100,
            scenario: 1,
            zone: "DS".to_string(),
            integrator: IntegratorKind::So3,
            nav_impl: "ideal".to_string(),
            turbulence_w20: DrydenConfig::light().w20,
            parallelism: 0,
            output_dir: None,
            trace: true,
            keep_series: false,
            series_stride: 100,
            geo_spec: GeoPerturbationSpec::default(),
            sensor_spec_file: None,
            airframe_file: None,
        }
    }
}

impl RunConfig {
    pub fn dryden(&self) -> DrydenConfig {
        DrydenConfig {
            w20: self.turbulence_w20,
        }
    }

    pub fn terrain_zone(&self) -> Result<&'static TerrainZone, ConfigError> {
        TerrainZone::by_code(&self.zone).ok_or_else(|| ConfigError::UnknownZone(self.zone.clone()))
    }

    /// Scenario duration [s].
    pub fn t_end(&self) -> f64 {
        match self.scenario {
            2 => crate::scenarios::SCENARIO2_T_END,
            _ => crate::scenarios::SCENARIO1_T_END,
        }
    }

    /// Parse `key value` lines; `#` starts a comment, blank lines skipped.
    pub fn from_kv(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(char::is_whitespace)
                .ok_or(ConfigError::Malformed(lineno + 1))?;
            let value = value.trim();
            let bad = |v: &str| ConfigError::BadValue(key.to_string(), v.to_string());
            match key {
                "master_seed" => cfg.master_seed = value.parse().map_err(|_| bad(value))?,
                "n_runs" => cfg.n_runs = value.parse().map_err(|_| bad(value))?,
                "scenario" => {
                    cfg.scenario = value.parse().map_err(|_| bad(value))?;
                    if cfg.scenario != 1 && cfg.scenario != 2 {
                        return Err(bad(value));
                    }
                }
                "zone" => {
                    if TerrainZone::by_code(value).is_none() {
                        return Err(ConfigError::UnknownZone(value.to_string()));
                    }
                    cfg.zone = value.to_uppercase();
                }
                "integrator" => {
                    cfg.integrator = IntegratorKind::parse(value).ok_or_else(|| bad(value))?
                }
                "nav" => cfg.nav_impl = value.to_string(),
                "turbulence_w20" => cfg.turbulence_w20 = value.parse().map_err(|_| bad(value))?,
                "parallelism" => cfg.parallelism = value.parse().map_err(|_| bad(value))?,
                "output_dir" => cfg.output_dir = Some(PathBuf::from(value)),
                "trace" => cfg.trace = value.parse().map_err(|_| bad(value))?,
                "sensor_spec_file" => cfg.sensor_spec_file = Some(PathBuf::from(value)),
                "airframe_file" => cfg.airframe_file = Some(PathBuf::from(value)),
                "keep_series" => cfg.keep_series = value.parse().map_err(|_| bad(value))?,
                "series_stride" => {
                    cfg.series_stride = value.parse().map_err(|_| bad(value))?;
                    if cfg.series_stride == 0 {
                        return Err(bad(value));
                    }
                }
                "gravity_horizontal_std" => {
                    cfg.geo_spec.gravity_horizontal_std = value.parse().map_err(|_| bad(value))?
                }
                "gravity_vertical_std" => {
                    cfg.geo_spec.gravity_vertical_std = value.parse().map_err(|_| bad(value))?
                }
                "magnetic_std" => {
                    cfg.geo_spec.magnetic_std = value.parse().map_err(|_| bad(value))?
                }
                _ => return Err(ConfigError::UnknownKey(key.to_string())),
            }
        }
        Ok(cfg)
    }

    /// Resolve the sensor error budget and airframe model, validating any
    /// referenced files before a batch starts.
    pub fn load_models(&self) -> Result<(SensorSpec, AirframeModel), ConfigError> {
        let spec = match &self.sensor_spec_file {
            None => SensorSpec::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| ConfigError::Unreadable(path.clone(), e.to_string()))?;
                SensorSpec::from_kv(&text)
                    .map_err(|e| ConfigError::BadModelFile(path.clone(), e.to_string()))?
            }
        };
        let airframe = match &self.airframe_file {
            None => AirframeModel::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| ConfigError::Unreadable(path.clone(), e.to_string()))?;
                AirframeModel::from_kv(&text)
                    .map_err(|e| ConfigError::BadModelFile(path.clone(), e.to_string()))?
            }
        };
        Ok((spec, airframe))
    }

    /// Digest of a referenced model file's content for provenance.
    fn file_tag(path: &Option<PathBuf>) -> String {
        match path {
            None => "builtin".to_string(),
            Some(p) => match std::fs::read(p) {
                Ok(bytes) => {
                    let mut h = Sha256::new();
                    h.update(&bytes);
                    hex::encode(&h.finalize()[..8])
                }
                Err(_) => "unreadable".to_string(),
            },
        }
    }

    /// Canonical text form: every physics-relevant knob, fixed key order.
    pub fn canonical_kv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "master_seed {}", self.master_seed);
        let _ = writeln!(s, "n_runs {}", self.n_runs);
        let _ = writeln!(s, "scenario {}", self.scenario);
        let _ = writeln!(s, "zone {}", self.zone);
        let _ = writeln!(s, "integrator {}", self.integrator.name());
        let _ = writeln!(s, "nav {}", self.nav_impl);
        let _ = writeln!(s, "turbulence_w20 {:e}", self.turbulence_w20);
        let _ = writeln!(
            s,
            "gravity_horizontal_std {:e}",
            self.geo_spec.gravity_horizontal_std
        );
        let _ = writeln!(
            s,
            "gravity_vertical_std {:e}",
            self.geo_spec.gravity_vertical_std
        );
        let _ = writeln!(s, "magnetic_std {:e}", self.geo_spec.magnetic_std);
        let _ = writeln!(s, "sensor_spec {}", Self::file_tag(&self.sensor_spec_file));
        let _ = writeln!(s, "airframe {}", Self::file_tag(&self.airframe_file));
        s
    }

    /// Hex digest of the canonical form; parallelism and output paths do not
    /// participate, so they cannot change results.
    pub fn config_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.canonical_kv().as_bytes());
        hex::encode(&h.finalize()[..16])
    }
}
