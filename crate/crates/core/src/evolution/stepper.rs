use super::state::FieldState;
use crate::error::{NdsgError, Result};
use crate::exec::{self, Execution};
use crate::model::ModelParams;
use crate::operator::{NonlocalMethod, NonlocalOperator};

/// Nodes per parallel task in the pointwise part of the right-hand side.
const CHUNK: usize = 2048;

/// Largest stable `dt` for the classical Runge–Kutta step.
///
/// The discrete nonlocal symbol is bounded by `1/lambda^2` (and by the
/// stencil bound `16/(3h^2)` in the local limit), so the fastest linear
/// frequency is `sqrt(that + 1 + 4|A|)`.
pub fn stability_bound(params: &ModelParams, h: f64) -> f64 {
    let stencil = 16.0 / (3.0 * h * h);
    let symbol = if params.lambda > 0.0 { (1.0 / (params.lambda * params.lambda)).min(stencil) } else { stencil };
    1.0 / (symbol + 1.0 + 4.0 * params.a.abs()).sqrt()
}

/// Fourth-order Runge–Kutta integrator for
/// `phi_tt = L phi - sin phi - 2A sin 2phi - sigma phi_t` on a fixed grid.
pub struct Stepper {
    params: ModelParams,
    dt: f64,
    exec: Execution,
    op: NonlocalOperator,
    lphi: Vec<f64>,
    accel: Vec<f64>,
    stage_phi: Vec<f64>,
    stage_rate: Vec<f64>,
    acc_phi: Vec<f64>,
    acc_rate: Vec<f64>,
}

impl std::fmt::Debug for Stepper {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Stepper").field("params", &self.params).field("dt", &self.dt).field("op", &self.op).finish()
    }
}

impl Stepper {
    pub fn new(state: &FieldState, params: &ModelParams, dt: f64, method: NonlocalMethod, exec: Execution) -> Result<Self> {
        let bound = stability_bound(params, state.grid.h);
        if !(dt > 0.0) || dt >= bound {
            return Err(NdsgError::StabilityViolation { dt, bound });
        }
        let n = state.grid.n;
        Ok(Self {
            params: *params,
            dt,
            exec,
            op: NonlocalOperator::new(n, state.grid.h, params.lambda, state.grid.periodic, method)?,
            lphi: vec![0.0; n],
            accel: vec![0.0; n],
            stage_phi: vec![0.0; n],
            stage_rate: vec![0.0; n],
            acc_phi: vec![0.0; n],
            acc_rate: vec![0.0; n],
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `accel = L phi - F(phi) - sigma rate`.
    fn acceleration(&mut self, phi: &[f64], rate: &[f64], sponge: &[f64]) {
        self.op.apply_into(phi, &mut self.lphi);
        let a = self.params.a;
        let lphi = &self.lphi;
        exec::for_each_chunk(&mut self.accel, CHUNK, self.exec, |offset, out| {
            for (j, o) in out.iter_mut().enumerate() {
                let i = offset + j;
                let (s, c) = phi[i].sin_cos();
                *o = lphi[i] - s * (1.0 + 4.0 * a * c) - sponge[i] * rate[i];
            }
        });
    }

    /// Advance `state` by one step in place.
    pub fn step(&mut self, state: &mut FieldState) -> Result<()> {
        let dt = self.dt;
        let n = state.grid.n;

        self.acceleration(&state.phi, &state.phi_dot, &state.sponge);
        for i in 0..n {
            let (p, r, a) = (state.phi[i], state.phi_dot[i], self.accel[i]);
            self.acc_phi[i] = p + dt / 6.0 * r;
            self.acc_rate[i] = r + dt / 6.0 * a;
            self.stage_phi[i] = p + 0.5 * dt * r;
            self.stage_rate[i] = r + 0.5 * dt * a;
        }

        for (weight, next) in [(1.0 / 3.0, 0.5), (1.0 / 3.0, 1.0)] {
            let (sp, sr) = (std::mem::take(&mut self.stage_phi), std::mem::take(&mut self.stage_rate));
            self.acceleration(&sp, &sr, &state.sponge);
            self.stage_phi = sp;
            self.stage_rate = sr;
            for i in 0..n {
                let (r, a) = (self.stage_rate[i], self.accel[i]);
                self.acc_phi[i] += weight * dt * r;
                self.acc_rate[i] += weight * dt * a;
                self.stage_phi[i] = state.phi[i] + next * dt * r;
                self.stage_rate[i] = state.phi_dot[i] + next * dt * a;
            }
        }

        let (sp, sr) = (std::mem::take(&mut self.stage_phi), std::mem::take(&mut self.stage_rate));
        self.acceleration(&sp, &sr, &state.sponge);
        self.stage_phi = sp;
        self.stage_rate = sr;
        for i in 0..n {
            state.phi[i] = self.acc_phi[i] + dt / 6.0 * self.stage_rate[i];
            state.phi_dot[i] = self.acc_rate[i] + dt / 6.0 * self.accel[i];
        }
        state.tau += dt;

        if !state.phi.iter().chain(&state.phi_dot).all(|x| x.is_finite()) {
            return Err(NdsgError::NonFinite { tau: state.tau });
        }
        Ok(())
    }
}

/// One step from `state` with the default discretization (allocates a stepper).
pub fn step(state: &FieldState, params: &ModelParams, dt: f64) -> Result<FieldState> {
    let mut next = state.clone();
    Stepper::new(state, params, dt, NonlocalMethod::Auto, Execution::default())?.step(&mut next)?;
    Ok(next)
}
