//! Declarative run configuration (TOML).

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{NdsgError, Result};
use crate::evolution::{make_initial_state, stability_bound, FieldState, Grid, InitialProfile, Launch, RunSettings, Sponge};
use crate::exec::Execution;
use crate::model::ModelParams;
use crate::traveling_wave::{assemble_kink, find_velocity_spectrum, KinkOptions, KinkProfile, ScanOptions, ShootControls};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Evolve,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub zeta_min: f64,
    pub zeta_max: f64,
    pub h: f64,
    #[serde(default = "default_fraction")]
    pub sponge_fraction: f64,
    #[serde(default = "default_peak")]
    pub sponge_peak: f64,
}

fn default_fraction() -> f64 {
    Sponge::default().fraction
}

fn default_peak() -> f64 {
    Sponge::default().peak
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { zeta_min: -100.0, zeta_max: 250.0, h: 0.05, sponge_fraction: default_fraction(), sponge_peak: default_peak() }
    }
}

fn default_front() -> f64 {
    Launch::default().front
}

fn default_tail_tol() -> f64 {
    Launch::default().tail_tol
}

fn default_branch() -> usize {
    1
}

/// What is launched, and how fast.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitialConfig {
    /// Traveling kink of branch `branch` (or at the kink velocity `kink_v`),
    /// launched at `v` (default: its own velocity).
    TravelingKink {
        #[serde(default = "default_branch")]
        branch: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kink_v: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        v: Option<f64>,
        #[serde(default = "default_front")]
        front: f64,
        #[serde(default = "default_tail_tol")]
        tail_tol: f64,
    },
    SgLike {
        gamma: f64,
        v: f64,
        #[serde(default = "default_front")]
        front: f64,
        #[serde(default = "default_tail_tol")]
        tail_tol: f64,
    },
    LocalDsg {
        v: f64,
        #[serde(default = "default_front")]
        front: f64,
        #[serde(default = "default_tail_tol")]
        tail_tol: f64,
    },
}

impl InitialConfig {
    pub fn front(&self) -> f64 {
        match *self {
            InitialConfig::TravelingKink { front, .. } | InitialConfig::SgLike { front, .. } | InitialConfig::LocalDsg { front, .. } => front,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for artifacts, relative to the working directory.
    pub dir: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    /// Reserved; nothing in a run is random.
    #[serde(default)]
    pub seed: u64,
    pub model: ModelParams,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub time: RunSettings,
    pub initial: InitialConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Inputs of [`crate::evolution::run`] built from a config.
#[derive(Debug, Clone)]
pub struct PreparedRun {
    pub params: ModelParams,
    pub state: FieldState,
    pub settings: RunSettings,
    pub front_start: f64,
    /// The traveling kink used as initial profile, if any.
    pub kink: Option<KinkProfile>,
}

impl RunConfig {
    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| NdsgError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| NdsgError::Config(e.to_string()))
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> Result<String> {
        Ok(hex::encode(Sha256::digest(self.to_toml()?.as_bytes())))
    }

    pub fn sponge(&self) -> Sponge {
        Sponge { fraction: self.grid.sponge_fraction, peak: self.grid.sponge_peak }
    }

    /// Check every precondition that does not need a solver run.
    pub fn validate(&self) -> Result<()> {
        let params = ModelParams::new(self.model.lambda, self.model.a)?;
        params.require_real_frequency()?;
        Grid::open(self.grid.zeta_min, self.grid.zeta_max, self.grid.h)?;
        self.sponge().validate()?;
        self.time.validate()?;
        let bound = stability_bound(&params, self.grid.h);
        if self.time.dt >= bound {
            return Err(NdsgError::StabilityViolation { dt: self.time.dt, bound });
        }
        let speed = |name: &str, v: f64| {
            if v.abs() < 1.0 {
                Ok(())
            } else {
                Err(NdsgError::Domain(format!("{name} must satisfy |v| < 1, got {v}")))
            }
        };
        match self.initial {
            InitialConfig::TravelingKink { branch, kink_v, v, tail_tol, .. } => {
                if branch == 0 {
                    return Err(NdsgError::Domain("branch indices start at 1".into()));
                }
                if let Some(k) = kink_v {
                    if !(k > 0.0 && k < 1.0) {
                        return Err(NdsgError::Domain(format!("kink velocity must lie in (0, 1), got {k}")));
                    }
                }
                if let Some(v) = v {
                    speed("launch velocity", v)?;
                }
                positive("tail_tol", tail_tol)?;
            }
            InitialConfig::SgLike { gamma, v, tail_tol, .. } => {
                positive("gamma", gamma)?;
                speed("launch velocity", v)?;
                positive("tail_tol", tail_tol)?;
            }
            InitialConfig::LocalDsg { v, tail_tol, .. } => {
                speed("launch velocity", v)?;
                positive("tail_tol", tail_tol)?;
            }
        }
        let front = self.initial.front();
        let margin = self.sponge().fraction * (self.grid.zeta_max - self.grid.zeta_min);
        if !(front > self.grid.zeta_min + margin && front < self.grid.zeta_max - margin) {
            return Err(NdsgError::DomainTooSmall(format!("front {front} is not inside the interior window")));
        }
        Ok(())
    }

    /// Validate, find the initial profile (solving for the kink if needed) and
    /// build the initial state.
    pub fn prepare(&self, exec: Execution) -> Result<PreparedRun> {
        self.validate()?;
        let params = ModelParams::new(self.model.lambda, self.model.a)?;
        let grid = Grid::open(self.grid.zeta_min, self.grid.zeta_max, self.grid.h)?;
        let (profile, launch, kink) = match self.initial {
            InitialConfig::TravelingKink { branch, kink_v, v, front, tail_tol } => {
                let kv = match kink_v {
                    Some(k) => k,
                    None => {
                        let opts = ScanOptions { exec, ..Default::default() };
                        let s = find_velocity_spectrum(&params, KINK_SEARCH_RANGE, branch, &ShootControls::default(), &opts)?;
                        s.branch(branch)?.value
                    }
                };
                let k = assemble_kink(&params, kv, &KinkOptions { branch: Some(branch), ..Default::default() })?;
                let launch = Launch { v: v.unwrap_or(kv), front, tail_tol };
                (InitialProfile::TravelingKink(k.clone()), launch, Some(k))
            }
            InitialConfig::SgLike { gamma, v, front, tail_tol } => (InitialProfile::SgLike { gamma }, Launch { v, front, tail_tol }, None),
            InitialConfig::LocalDsg { v, front, tail_tol } => (InitialProfile::LocalDsg, Launch { v, front, tail_tol }, None),
        };
        let state = make_initial_state(grid, Some(self.sponge()), &params, &profile, &launch)?;
        let settings = RunSettings { exec, ..self.time.clone() };
        Ok(PreparedRun { params, state, settings, front_start: launch.front, kink })
    }
}

/// Velocity interval searched when a config names a kink by branch.
pub const KINK_SEARCH_RANGE: (f64, f64) = (0.05, 0.99);

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(NdsgError::Domain(format!("{name} must be positive, got {x}")))
    }
}
