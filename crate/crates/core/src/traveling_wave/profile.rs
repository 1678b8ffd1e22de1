//! Full kink profiles from the half-trajectory and the reversor.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::{ShootControls, TravelingWaveSystem};
use crate::error::{NdsgError, Result};
use crate::evolution::energy::{energy_of_samples, EnergyReport};
use crate::model::{nonlinearity, ModelParams};
use crate::ode;
use crate::operator::{apply_nonlocal_term, stencil, Boundary, SampledField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KinkOptions {
    /// Sample spacing.
    pub h: f64,
    /// Half-width of the symmetric window; by default wide enough for the
    /// tails to settle below `tail_tol`.
    pub half_width: Option<f64>,
    pub tail_tol: f64,
    /// Reject velocities whose mismatch exceeds this.
    pub max_mismatch: f64,
    pub controls: ShootControls,
    pub branch: Option<usize>,
}

impl Default for KinkOptions {
    fn default() -> Self {
        Self {
            h: 0.01,
            half_width: None,
            tail_tol: 1e-10,
            max_mismatch: 1e-6,
            controls: ShootControls::default(),
            branch: None,
        }
    }
}

/// A sampled traveling kink centred at `phi(0) = π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KinkProfile {
    pub v: f64,
    pub lambda: f64,
    pub a: f64,
    pub branch: Option<usize>,
    pub h: f64,
    pub xi: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub q: Vec<f64>,
    pub dq: Vec<f64>,
    /// Shooting mismatch at `v`.
    pub mismatch: f64,
    pub energy: EnergyReport,
    /// Max defect of `v^2 phi'' + sin phi + 2A sin 2phi - L phi` on the samples.
    pub residual: f64,
}

impl KinkProfile {
    pub fn params(&self) -> ModelParams {
        ModelParams { lambda: self.lambda, a: self.a }
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn half_width(&self) -> f64 {
        -self.xi[0]
    }

    /// `(phi, phi')` at `x` by four-point Lagrange interpolation; outside the
    /// window the kink is continued by its asymptotic values.
    pub fn sample(&self, x: f64) -> (f64, f64) {
        let n = self.xi.len();
        let t = (x - self.xi[0]) / self.h;
        if t <= 0.0 {
            return (0.0, 0.0);
        }
        if t >= (n - 1) as f64 {
            return (2.0 * PI, 0.0);
        }
        let j = (t.floor() as usize).clamp(1, n - 3);
        let s = t - j as f64;
        // Nodes j-1, j, j+1, j+2 at offsets -1, 0, 1, 2.
        let w = [
            -s * (s - 1.0) * (s - 2.0) / 6.0,
            (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0,
            -(s + 1.0) * s * (s - 2.0) / 2.0,
            (s + 1.0) * s * (s - 1.0) / 6.0,
        ];
        let mut p = 0.0;
        let mut d = 0.0;
        for k in 0..4 {
            p += w[k] * self.phi[j - 1 + k];
            d += w[k] * self.dphi[j - 1 + k];
        }
        (p, d)
    }

    /// Energy recomputed from the stored samples with `phi_t = -v phi'`.
    pub fn recompute_energy(&self) -> Result<EnergyReport> {
        let phi_t: Vec<f64> = self.dphi.iter().map(|d| -self.v * d).collect();
        energy_of_samples(&self.phi, &phi_t, self.h, self.xi[0], &self.params(), false, None)
    }

    /// Max defect of the traveling-wave equation with the nonlocal term
    /// evaluated by the operator module on the sampled `phi`.
    pub fn recompute_residual(&self) -> Result<f64> {
        let field = SampledField::new(self.phi.clone(), self.h, self.xi[0], Boundary::Decaying { tail_tol: 1e-6 })?;
        let lphi = apply_nonlocal_term(&field, self.lambda)?;
        let d2 = stencil::second_derivative(&self.phi, self.h, false);
        let v2 = self.v * self.v;
        Ok((0..self.len())
            .map(|i| (v2 * d2[i] + nonlinearity(self.phi[i], self.a) - lphi.values()[i]).abs())
            .fold(0.0, f64::max))
    }
}

/// Build the kink at a spectrum velocity `v`.
pub fn assemble_kink(params: &ModelParams, v: f64, opts: &KinkOptions) -> Result<KinkProfile> {
    if !(opts.h > 0.0) {
        return Err(NdsgError::Grid(format!("sample spacing must be positive, got {}", opts.h)));
    }
    let sys = TravelingWaveSystem::new(*params, v)?;
    let controls = &opts.controls;
    let lin = sys.linearize()?;
    let shot = sys.shoot(controls)?;
    if shot.mismatch.abs() > opts.max_mismatch {
        return Err(NdsgError::InsufficientAccuracy {
            branch: opts.branch.unwrap_or(0),
            reason: format!("mismatch {:.3e} at v = {v} exceeds {:.1e}; not a kink velocity", shot.mismatch, opts.max_mismatch),
        });
    }
    let xi_star = shot.xi_cross;
    let h = opts.h;

    // Seeded tail: phi = eps exp(mu0 s) drops below tail_tol at s_min.
    let s_min = (opts.tail_tol / controls.eps).ln() / lin.mu0;
    let half_width = opts.half_width.unwrap_or(xi_star - s_min.min(0.0));
    let m = (half_width / h).ceil() as usize;

    // Shooting abscissae s_j = xi* - j h, j = 0..=m; those with s >= 0 are integrated.
    let integrated: Vec<f64> = (0..=m).map(|j| xi_star - j as f64 * h).filter(|&s| s >= 0.0).rev().collect();
    let y0 = lin.unstable.map(|c| controls.eps * c);
    let f = |_x: f64, y: &[f64; 4]| sys.rhs(y);
    let mut states = ode::sample_at(f, 0.0, y0, &integrated, &controls.tol)?;
    // The last sample sits on the crossing; use the located event state there.
    if let Some(last) = states.last_mut() {
        *last = shot.state;
    }

    let mut left: Vec<[f64; 4]> = Vec::with_capacity(m + 1);
    for j in (0..=m).rev() {
        let s = xi_star - j as f64 * h;
        if s < 0.0 {
            let amp = controls.eps * (lin.mu0 * s).exp();
            left.push(lin.unstable.map(|c| amp * c));
        }
    }
    left.extend(states);
    debug_assert_eq!(left.len(), m + 1);

    let n = 2 * m + 1;
    let mut xi = Vec::with_capacity(n);
    let (mut phi, mut dphi, mut q, mut dq) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for (j, y) in left.iter().enumerate() {
        xi.push((j as f64 - m as f64) * h);
        phi.push(y[0]);
        dphi.push(y[1]);
        q.push(y[2]);
        dq.push(y[3]);
    }
    for j in 1..=m {
        let y = TravelingWaveSystem::reverse(&left[m - j]);
        xi.push(j as f64 * h);
        phi.push(y[0]);
        dphi.push(y[1]);
        q.push(y[2]);
        dq.push(y[3]);
    }

    let mut profile = KinkProfile {
        v,
        lambda: params.lambda,
        a: params.a,
        branch: opts.branch,
        h,
        xi,
        phi,
        dphi,
        q,
        dq,
        mismatch: shot.mismatch,
        energy: EnergyReport { total: 0.0, potential: 0.0, kinetic: 0.0, nonlocal: 0.0, window: (0.0, 0.0) },
        residual: 0.0,
    };
    profile.energy = profile.recompute_energy()?;
    profile.residual = profile.recompute_residual()?;
    Ok(profile)
}
