//! Experiment configuration files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{EnvironmentMode, Kernel, KernelRule, KernelTable, ModelConfig};
use crate::renorm::{RenormParams, TheoremParameters};
use crate::walker::Engine;

pub const CONFIG_SCHEMA: &str = "rwdre.config.v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    SingleRun,
    SpeedCurve,
    RhoCurve,
    StaticSolomon,
    BlockTails,
    CoverageProbe,
    FEstimate,
    ConstantsReport,
}

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::SingleRun => "single_run",
            Preset::SpeedCurve => "speed_curve",
            Preset::RhoCurve => "rho_curve",
            Preset::StaticSolomon => "static_solomon",
            Preset::BlockTails => "block_tails",
            Preset::CoverageProbe => "coverage_probe",
            Preset::FEstimate => "f_estimate",
            Preset::ConstantsReport => "constants_report",
        }
    }
}

/// The model section: either `p` for the nearest-neighbour drift pair, or two
/// explicit kernel tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default = "one_usize")]
    pub dim: usize,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub kernel_occupied: Option<KernelTable>,
    #[serde(default)]
    pub kernel_vacant: Option<KernelTable>,
    #[serde(default)]
    pub mu: f64,
    #[serde(default)]
    pub mode: EnvironmentMode,
    #[serde(default)]
    pub kernel_rule: KernelRule,
}

impl Default for ModelSpec {
    fn default() -> Self {
        ModelSpec {
            dim: 1,
            p: Some(0.7),
            kernel_occupied: None,
            kernel_vacant: None,
            mu: 1.0,
            mode: EnvironmentMode::Dynamic,
            kernel_rule: KernelRule::Departure,
        }
    }
}

impl ModelSpec {
    pub fn to_config(&self) -> Result<ModelConfig> {
        let cfg = match (&self.p, &self.kernel_occupied, &self.kernel_vacant) {
            (Some(p), None, None) => {
                if self.dim != 1 {
                    return Err(Error::Config("`p` describes a one-dimensional model".into()));
                }
                ModelConfig::solomon(*p, self.mu)?
            }
            (None, Some(a), Some(b)) => ModelConfig::new(
                Kernel::from_table(self.dim, a)?,
                Kernel::from_table(self.dim, b)?,
                self.mu,
            )?,
            _ => {
                return Err(Error::Config(
                    "model needs either `p` or both `kernel_occupied` and `kernel_vacant`".into(),
                ))
            }
        };
        Ok(cfg.with_mode(self.mode).with_kernel_rule(self.kernel_rule))
    }

    /// `p` of the model, when it is the nearest-neighbour drift pair.
    pub fn solomon_p(&self) -> Option<f64> {
        self.p
    }
}

/// Parameter grids scanned by the curve presets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    /// Densities; empty means `[model.mu]`.
    pub mu: Vec<f64>,
    /// Drift parameters for the frozen phase table; empty means `[model.p]`.
    pub p: Vec<f64>,
    /// Horizon multipliers for the frozen phase table; empty means `[1]`.
    pub t_factors: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSpec {
    pub engine: Engine,
    /// Torus radius; the default grows with the horizon.
    pub radius: Option<i64>,
    pub max_events: Option<u64>,
    /// Breach fraction above which a result is flagged unreliable.
    pub breach_limit: f64,
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            engine: Engine::Local,
            radius: None,
            max_events: None,
            breach_limit: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenormSpec {
    pub c0: u64,
    pub gamma0: f64,
    pub r: u32,
    /// Largest `r` in the constants report.
    pub r_max: u32,
    /// Range of `C_0` searched for the smallest admissible base.
    pub c0_range: (u64, u64),
    /// Extra block columns classified on each side of the path.
    pub margin_columns: i64,
}

impl Default for RenormSpec {
    fn default() -> Self {
        RenormSpec {
            c0: 2,
            gamma0: 0.1,
            r: 1,
            r_max: 4,
            c0_range: (2, 4096),
            margin_columns: 1,
        }
    }
}

impl RenormSpec {
    pub fn params(&self, mu: f64) -> Result<RenormParams> {
        RenormParams::new(self.c0, self.gamma0, self.r, mu)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoverageSpec {
    /// Target failure probability for the density threshold.
    pub eps1: f64,
    /// Trials for the coverage probability estimate; 0 means `replicas`.
    pub f_replicas: usize,
}

impl Default for CoverageSpec {
    fn default() -> Self {
        CoverageSpec {
            eps1: 0.1,
            f_replicas: 0,
        }
    }
}

/// One experiment, as read from a TOML file.
///
/// `out` and `workers` only steer execution; they are left out of the hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub schema: String,
    pub preset: Preset,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one_usize")]
    pub replicas: usize,
    #[serde(default = "default_t")]
    pub t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default)]
    pub model: ModelSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub run: RunSpec,
    #[serde(default)]
    pub renorm: RenormSpec,
    #[serde(default)]
    pub theorem: TheoremParameters,
    #[serde(default)]
    pub coverage: CoverageSpec,
}

fn one_usize() -> usize {
    1
}

fn default_t() -> f64 {
    1000.0
}

impl ExperimentSpec {
    pub fn new(preset: Preset) -> Self {
        ExperimentSpec {
            schema: CONFIG_SCHEMA.to_string(),
            preset,
            seed: 0,
            replicas: 1,
            t: default_t(),
            out: None,
            workers: None,
            model: ModelSpec::default(),
            grid: GridSpec::default(),
            run: RunSpec::default(),
            renorm: RenormSpec::default(),
            theorem: TheoremParameters::default(),
            coverage: CoverageSpec::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let spec: ExperimentSpec = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != CONFIG_SCHEMA {
            return Err(Error::Config(format!(
                "schema `{}` is not supported (expected `{CONFIG_SCHEMA}`)",
                self.schema
            )));
        }
        if !(self.t.is_finite() && self.t > 0.0) {
            return Err(Error::Config(format!("horizon t = {} must be positive", self.t)));
        }
        if self.replicas == 0 && self.preset != Preset::ConstantsReport {
            return Err(Error::Config("replicas must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.run.breach_limit) {
            return Err(Error::Config("run.breach_limit must lie in [0, 1]".into()));
        }
        for &mu in &self.grid.mu {
            if !(mu.is_finite() && mu >= 0.0) {
                return Err(Error::Config(format!("grid density {mu} must be nonnegative")));
            }
        }
        for &f in &self.grid.t_factors {
            if !(f.is_finite() && f > 0.0) {
                return Err(Error::Config(format!("horizon factor {f} must be positive")));
            }
        }
        self.model.to_config().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    /// The density grid, defaulting to the model density.
    pub fn mus(&self) -> Vec<f64> {
        if self.grid.mu.is_empty() {
            vec![self.model.mu]
        } else {
            self.grid.mu.clone()
        }
    }

    /// SHA-256 of the canonical JSON form, without `out` and `workers`.
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.out = None;
        canon.workers = None;
        let bytes = serde_json::to_vec(&canon).expect("specs always serialize");
        hex::encode(Sha256::digest(bytes))
    }
}
