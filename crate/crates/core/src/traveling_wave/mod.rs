//! Traveling 2π-kinks `phi(xi)`, `xi = x - v t`, and their discrete velocity
//! spectrum.
//!
//! Writing `q = K phi'` (the exponential-kernel convolution of the slope),
//! the traveling-wave equation becomes the reversible four-dimensional system
//!
//! ```text
//! v^2 phi'' = q' - sin(phi) - 2A sin(2 phi),      -lambda^2 q'' + q = phi'
//! ```
//!
//! with reversor `(phi, phi', q, q')(xi) -> (2π - phi, phi', q, -q')(-xi)`.
//! A kink leaves the origin along its one-dimensional unstable manifold; it is
//! a genuine (reversible, radiationless) kink when that trajectory hits the
//! reversor's fixed set `{phi = π, q' = 0}`. The defect `q'` at the first
//! `phi = π` crossing is the shooting mismatch whose zeros form the spectrum.
//!
//! The same machinery runs on the two-term approximation
//! `phi'' + delta^2 phi'''' = sin(phi) + 2A sin(2 phi)`.

mod profile;
mod scan;
mod spectrum;

pub use profile::{assemble_kink, KinkOptions, KinkProfile};
pub use scan::{scan_zeros, Dip, Root, ScanOptions, ScanOutcome, Spacing, UnresolvedBracket};
pub use spectrum::{
    find_lambda_spectrum, find_velocity_spectrum, fourth_order_spectrum, sweep_velocity_branches, BranchSweep,
    SpectrumEntry, SpectrumKind, VelocitySpectrum,
};

use crate::error::{NdsgError, Result};
use crate::model::{check_velocity, nonlinearity, positive_quadratic_root, ModelParams};
use crate::ode::{self, Stop, Tolerances};

/// Shooting settings shared by all solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootControls {
    /// Offset along the unstable eigenvector.
    pub eps: f64,
    pub tol: Tolerances,
    /// Integration cap; `None` means `100 max(1, lambda)`.
    pub xi_cap: Option<f64>,
    /// State-norm guard for blow-up detection.
    pub guard: f64,
}

impl Default for ShootControls {
    fn default() -> Self {
        Self { eps: 1e-7, tol: Tolerances::default(), xi_cap: None, guard: 1e6 }
    }
}

impl ShootControls {
    fn cap(&self, length_scale: f64) -> f64 {
        self.xi_cap.unwrap_or(100.0 * length_scale.max(1.0))
    }

    /// Mismatches below this are indistinguishable from integration error.
    pub fn noise_floor(&self) -> f64 {
        10.0 * self.tol.rtol
    }
}

/// Characteristic exponents of a linearized four-dimensional reversible
/// system at the origin: `±mu0` and `±i k0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linearization {
    pub mu0: f64,
    pub k0: f64,
    /// Unstable eigenvector, normalized to unit first component.
    pub unstable: [f64; 4],
    /// Residual of the characteristic polynomial at `mu0`.
    pub residual: f64,
}

impl Linearization {
    /// The four exponents as (real, imaginary) pairs.
    pub fn exponents(&self) -> [(f64, f64); 4] {
        [(self.mu0, 0.0), (-self.mu0, 0.0), (0.0, self.k0), (0.0, -self.k0)]
    }

    fn check(self) -> Result<Self> {
        if !(self.mu0 >= 1e-8) || !(self.k0 >= 1e-8) {
            return Err(NdsgError::DegenerateSpectrum(format!(
                "mu0 = {:e}, k0 = {:e}",
                self.mu0, self.k0
            )));
        }
        Ok(self)
    }
}

/// The full traveling-wave system at fixed `(lambda, A, v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TravelingWaveSystem {
    pub params: ModelParams,
    pub v: f64,
}

impl TravelingWaveSystem {
    pub fn new(params: ModelParams, v: f64) -> Result<Self> {
        check_velocity(v)?;
        if v == 0.0 {
            return Err(NdsgError::Domain("traveling waves need v != 0".into()));
        }
        if !(params.lambda > 0.0) {
            return Err(NdsgError::Domain("the four-dimensional system needs lambda > 0".into()));
        }
        params.require_real_frequency()?;
        Ok(Self { params, v })
    }

    #[inline]
    pub fn rhs(&self, y: &[f64; 4]) -> [f64; 4] {
        let l2 = self.params.lambda * self.params.lambda;
        let v2 = self.v * self.v;
        [
            y[1],
            (y[3] - nonlinearity(y[0], self.params.a)) / v2,
            y[3],
            (y[2] - y[1]) / l2,
        ]
    }

    /// The reversor, acting on a state (the accompanying `xi -> -xi` is implicit).
    pub fn reverse(y: &[f64; 4]) -> [f64; 4] {
        [2.0 * std::f64::consts::PI - y[0], y[1], y[2], -y[3]]
    }

    /// Exponents from `v^2 lambda^2 u^2 + (1 - v^2 + s lambda^2) u - s = 0`,
    /// `u = mu^2`, `s = 1 + 4A`; the negative root is `-k0^2`.
    pub fn linearize(&self) -> Result<Linearization> {
        let (l2, v2, s) = (self.params.lambda.powi(2), self.v * self.v, self.params.linear_stiffness());
        let (a, b) = (v2 * l2, 1.0 - v2 + s * l2);
        let u_pos = positive_quadratic_root(a, b, s)
            .ok_or_else(|| NdsgError::DegenerateSpectrum("no positive exponent".into()))?;
        // Product of the roots is -s / a.
        let u_neg = -s / (a * u_pos);
        let mu0 = u_pos.sqrt();
        let k0 = (-u_neg).sqrt();
        let d = 1.0 - l2 * u_pos;
        let residual = v2 * u_pos + s - u_pos / d;
        Linearization { mu0, k0, unstable: [1.0, mu0, mu0 / d, u_pos / d], residual }.check()
    }

    /// Shoot along the unstable manifold to the first `phi = π` crossing.
    pub fn shoot(&self, controls: &ShootControls) -> Result<Shot> {
        let lin = self.linearize()?;
        let y0 = lin.unstable.map(|c| controls.eps * c);
        let cap = controls.cap(self.params.lambda);
        let f = |_x: f64, y: &[f64; 4]| self.rhs(y);
        shoot_with(f, y0, cap, controls, 3)
    }
}

/// The two-term (fourth-order) approximation at fixed `(A, delta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourthOrderSystem {
    pub a: f64,
    pub delta: f64,
}

impl FourthOrderSystem {
    pub fn new(a: f64, delta: f64) -> Result<Self> {
        if !(1.0 + 4.0 * a > 0.0) {
            return Err(NdsgError::Domain(format!("need A > -1/4, got {a}")));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(NdsgError::Domain(format!("need delta > 0, got {delta}")));
        }
        Ok(Self { a, delta })
    }

    #[inline]
    pub fn rhs(&self, y: &[f64; 4]) -> [f64; 4] {
        [y[1], y[2], y[3], (nonlinearity(y[0], self.a) - y[2]) / (self.delta * self.delta)]
    }

    pub fn reverse(y: &[f64; 4]) -> [f64; 4] {
        [2.0 * std::f64::consts::PI - y[0], y[1], -y[2], y[3]]
    }

    /// Exponents from `delta^2 u^2 + u - s = 0`, `u = mu^2`.
    pub fn linearize(&self) -> Result<Linearization> {
        let s = 1.0 + 4.0 * self.a;
        let d2 = self.delta * self.delta;
        let u_pos = positive_quadratic_root(d2, 1.0, s)
            .ok_or_else(|| NdsgError::DegenerateSpectrum("no positive exponent".into()))?;
        let u_neg = -s / (d2 * u_pos);
        let mu0 = u_pos.sqrt();
        let residual = d2 * u_pos * u_pos + u_pos - s;
        Linearization { mu0, k0: (-u_neg).sqrt(), unstable: [1.0, mu0, u_pos, u_pos * mu0], residual }.check()
    }

    pub fn shoot(&self, controls: &ShootControls) -> Result<Shot> {
        let lin = self.linearize()?;
        let y0 = lin.unstable.map(|c| controls.eps * c);
        let cap = controls.cap(self.delta);
        let f = |_x: f64, y: &[f64; 4]| self.rhs(y);
        shoot_with(f, y0, cap, controls, 2)
    }
}

/// Result of one shot: the mismatch and the crossing state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shot {
    pub mismatch: f64,
    pub xi_cross: f64,
    pub state: [f64; 4],
}

fn shoot_with<F>(f: F, y0: [f64; 4], cap: f64, controls: &ShootControls, component: usize) -> Result<Shot>
where
    F: Fn(f64, &[f64; 4]) -> [f64; 4],
{
    let event = |y: &[f64; 4]| y[0] - std::f64::consts::PI;
    match ode::integrate(f, 0.0, y0, cap, &controls.tol, event, controls.guard, |_, _| {})? {
        Stop::Event { x, y } => Ok(Shot { mismatch: y[component], xi_cross: x, state: y }),
        Stop::Cap { .. } => Err(NdsgError::NoCrossing { cap }),
    }
}

/// Exponents and unstable eigenvector of the full system at the origin.
pub fn linearize_at_origin(params: &ModelParams, v: f64) -> Result<Linearization> {
    TravelingWaveSystem::new(*params, v)?.linearize()
}

/// The mismatch `R = q'` at the first `phi = π` crossing.
pub fn shoot_mismatch(params: &ModelParams, v: f64, controls: &ShootControls) -> Result<f64> {
    Ok(TravelingWaveSystem::new(*params, v)?.shoot(controls)?.mismatch)
}

/// The mismatch `R = phi''` of the fourth-order system.
pub fn fourth_order_mismatch(a: f64, delta: f64, controls: &ShootControls) -> Result<f64> {
    Ok(FourthOrderSystem::new(a, delta)?.shoot(controls)?.mismatch)
}

/// Small-lambda link between the two spectra: rescaling
/// `(1 - v^2) phi'' + lambda^2 phi''''` by `eta = xi / sqrt(1 - v^2)` gives
/// `delta = lambda / (1 - v^2)`, hence `v_n ≈ sqrt(1 - lambda / delta_n)`.
pub fn velocity_from_delta(lambda: f64, delta: f64) -> Option<f64> {
    let w = 1.0 - lambda / delta;
    (w > 0.0).then(|| w.sqrt())
}
