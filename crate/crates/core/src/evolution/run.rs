use serde::{Deserialize, Serialize};

use super::energy::{energy_of_samples, EnergyReport};
use super::front::{FrontTrace, FrontTracker, DEFAULT_SMOOTHING};
use super::state::FieldState;
use super::stepper::Stepper;
use crate::error::{NdsgError, Result};
use crate::exec::Execution;
use crate::model::ModelParams;
use crate::operator::NonlocalMethod;
use crate::traveling_wave::KinkProfile;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunSettings {
    pub dt: f64,
    pub tau_end: f64,
    /// Interval between front records.
    pub front_every: f64,
    /// Interval between energy records.
    pub energy_every: f64,
    pub snapshot_times: Vec<f64>,
    pub smoothing_window: usize,
    /// Largest front displacement between consecutive records.
    pub front_neighborhood: f64,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for RunSettings {
    fn default() -> Self {
        Self {
            dt: 0.01,
            tau_end: 150.0,
            front_every: 0.2,
            energy_every: 1.0,
            snapshot_times: Vec::new(),
            smoothing_window: DEFAULT_SMOOTHING,
            front_neighborhood: 5.0,
            exec: Execution::default(),
        }
    }
}

impl RunSettings {
    pub fn validate(&self) -> Result<()> {
        let positive = [("dt", self.dt), ("tau_end", self.tau_end), ("front_every", self.front_every), ("energy_every", self.energy_every)];
        for (name, x) in positive {
            if !(x > 0.0 && x.is_finite()) {
                return Err(NdsgError::Config(format!("{name} must be positive, got {x}")));
            }
        }
        if self.front_every < self.dt || self.energy_every < self.dt {
            return Err(NdsgError::Config("record intervals must be at least one time step".into()));
        }
        if let Some(t) = self.snapshot_times.iter().find(|&&t| !(0.0..=self.tau_end).contains(&t)) {
            return Err(NdsgError::Config(format!("snapshot time {t} outside [0, {}]", self.tau_end)));
        }
        if self.smoothing_window < 2 || !(self.front_neighborhood > 0.0) {
            return Err(NdsgError::Config("smoothing window must be >= 2 and the front neighborhood positive".into()));
        }
        Ok(())
    }

    fn every(&self, interval: f64) -> usize {
        ((interval / self.dt).round() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub tau: f64,
    pub report: EnergyReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub tau: f64,
    pub phi: Vec<f64>,
    pub phi_dot: Vec<f64>,
}

/// Everything a run produced, including partial results when it aborted.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub front: FrontTrace,
    pub energy: Vec<EnergySample>,
    pub snapshots: Vec<Snapshot>,
    pub final_state: FieldState,
    /// The error that stopped the run early, if any.
    pub error: Option<NdsgError>,
}

impl RunOutput {
    pub fn is_complete(&self) -> bool {
        self.error.is_none()
    }
}

/// Energy over the part of the domain not covered by sponge layers.
pub fn interior_energy(state: &FieldState, params: &ModelParams) -> Result<EnergyReport> {
    let window = if state.grid.periodic { None } else { Some(state.interior()) };
    energy_of_samples(&state.phi, &state.phi_dot, state.grid.h, state.grid.zeta_min, params, state.grid.periodic, window)
}

/// Max |phi - kink| over the nodes within `half_width` of `front`, with the
/// kink centred on the front.
pub fn core_deviation(state: &FieldState, front: f64, kink: &KinkProfile, half_width: f64) -> f64 {
    (0..state.grid.n)
        .map(|i| state.grid.zeta(i) - front)
        .zip(&state.phi)
        .filter(|(x, _)| x.abs() < half_width)
        .map(|(x, p)| (p - kink.sample(x).0).abs())
        .fold(0.0, f64::max)
}

/// Integrate from `initial` to `settings.tau_end`, recording front, energy and
/// snapshots. Invalid settings fail up front; a failure during the run is
/// returned inside [`RunOutput::error`] together with everything recorded so far.
pub fn run(initial: FieldState, params: &ModelParams, settings: &RunSettings, front_start: f64) -> Result<RunOutput> {
    settings.validate()?;
    let mut stepper = Stepper::new(&initial, params, settings.dt, NonlocalMethod::Auto, settings.exec)?;
    let steps = (settings.tau_end / settings.dt).round() as usize;
    let (front_every, energy_every) = (settings.every(settings.front_every), settings.every(settings.energy_every));
    let mut snap_steps: Vec<usize> = settings.snapshot_times.iter().map(|t| (t / settings.dt).round() as usize).collect();
    snap_steps.sort_unstable();
    snap_steps.dedup();

    let mut state = initial;
    let mut tracker = FrontTracker::new(front_start, settings.front_neighborhood);
    let (mut tau, mut pos) = (Vec::new(), Vec::new());
    let mut energy = Vec::new();
    let mut snapshots = Vec::new();
    let mut error = None;

    let t0 = state.tau;
    for k in 0..=steps {
        // Exact multiples of dt avoid accumulated rounding in the time axis.
        state.tau = t0 + k as f64 * settings.dt;
        if k % front_every == 0 {
            match tracker.locate(&state) {
                Ok(z) => {
                    tau.push(state.tau);
                    pos.push(z);
                }
                Err(e) => {
                    error = Some(e);
                    break;
                }
            }
        }
        if k % energy_every == 0 {
            energy.push(EnergySample { tau: state.tau, report: interior_energy(&state, params)? });
        }
        if snap_steps.binary_search(&k).is_ok() {
            snapshots.push(Snapshot { tau: state.tau, phi: state.phi.clone(), phi_dot: state.phi_dot.clone() });
        }
        if k == steps {
            break;
        }
        if let Err(e) = stepper.step(&mut state) {
            error = Some(e);
            break;
        }
    }

    Ok(RunOutput {
        front: FrontTrace::from_positions(tau, pos, settings.smoothing_window),
        energy,
        snapshots,
        final_state: state,
        error,
    })
}
