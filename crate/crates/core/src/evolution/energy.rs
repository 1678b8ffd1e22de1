//! The conserved energy
//!
//! ```text
//! W = ∫ [1 - cos phi + A (1 - cos 2 phi) + phi_t^2 / 2] dx + (1/2) ∫ phi_x q dx,
//! q = (1/2 lambda) ∫ exp(-|x - s| / lambda) phi_s ds.
//! ```
//!
//! The double integral of the nonlocal coupling collapses to a single one
//! through `q`, since the kernel is symmetric.

use serde::{Deserialize, Serialize};

use crate::error::{NdsgError, Result};
use crate::model::{potential, ModelParams};
use crate::operator::{NonlocalMethod, NonlocalOperator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub total: f64,
    pub potential: f64,
    pub kinetic: f64,
    pub nonlocal: f64,
    /// Abscissae bounding the integration window.
    pub window: (f64, f64),
}

/// Trapezoidal weight of node `i` within `[lo, hi]`.
#[inline]
fn trap_weight(i: usize, lo: usize, hi: usize, periodic: bool) -> f64 {
    if !periodic && (i == lo || i == hi) {
        0.5
    } else {
        1.0
    }
}

/// Energy of sampled `(phi, phi_t)` on a uniform grid.
///
/// For periodic data the whole period is integrated and the coupling is
/// evaluated as `-(1/2) <phi, L phi>` with the spectral operator, which is
/// the form conserved exactly by the semi-discrete dynamics. For open data
/// `window` restricts all three parts to nodes `lo..=hi`.
pub fn energy_of_samples(
    phi: &[f64],
    phi_t: &[f64],
    h: f64,
    left: f64,
    params: &ModelParams,
    periodic: bool,
    window: Option<(usize, usize)>,
) -> Result<EnergyReport> {
    let n = phi.len();
    if n < 4 || phi_t.len() != n || !(h > 0.0) {
        return Err(NdsgError::Grid(format!("energy needs matching samples (n={n}) and h > 0")));
    }
    let (lo, hi) = if periodic { (0, n - 1) } else { window.unwrap_or((0, n - 1)) };
    if lo >= hi || hi >= n {
        return Err(NdsgError::Grid(format!("bad energy window {lo}..={hi} for n={n}")));
    }
    let mut op = NonlocalOperator::new(n, h, params.lambda, periodic, NonlocalMethod::Auto)?;

    let mut pot = 0.0;
    let mut kin = 0.0;
    for i in lo..=hi {
        let w = trap_weight(i, lo, hi, periodic);
        pot += w * potential(phi[i], params.a);
        kin += w * 0.5 * phi_t[i] * phi_t[i];
    }

    let mut coupling = 0.0;
    if periodic {
        let mut lphi = vec![0.0; n];
        op.apply_into(phi, &mut lphi);
        coupling = -0.5 * phi.iter().zip(&lphi).map(|(a, b)| a * b).sum::<f64>();
    } else {
        let (slope, q) = op.slope_and_q(phi);
        for i in lo..=hi {
            coupling += trap_weight(i, lo, hi, false) * 0.5 * slope[i] * q[i];
        }
    }

    let (pot, kin, coupling) = (pot * h, kin * h, coupling * h);
    Ok(EnergyReport {
        total: pot + kin + coupling,
        potential: pot,
        kinetic: kin,
        nonlocal: coupling,
        window: (left + lo as f64 * h, left + hi as f64 * h),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_has_zero_energy() {
        let p = ModelParams::new(0.3, 0.125).unwrap();
        let z = vec![0.0; 64];
        for periodic in [true, false] {
            let e = energy_of_samples(&z, &z, 0.1, 0.0, &p, periodic, None).unwrap();
            assert_eq!(e.total, 0.0);
        }
    }

    #[test]
    fn local_sine_gordon_kink_energy_is_eight() {
        // lambda = 0, A = 0: static kink energy is 8 (classical result, 8/sqrt(1-v^2) when moving).
        let p = ModelParams::new(0.0, 0.0).unwrap();
        let h = 0.01;
        let n = 4001;
        for v in [0.0, 0.6] {
            let g = 1.0 / (1.0f64 - v * v).sqrt();
            let phi: Vec<f64> = (0..n).map(|i| 4.0 * (g * (-20.0 + h * i as f64)).exp().atan()).collect();
            let dphi: Vec<f64> = (0..n).map(|i| 2.0 * g / (g * (-20.0 + h * i as f64)).cosh()).collect();
            let phi_t: Vec<f64> = dphi.iter().map(|d| -v * d).collect();
            let e = energy_of_samples(&phi, &phi_t, h, -20.0, &p, false, None).unwrap();
            assert!((e.total - 8.0 * g).abs() < 1e-6, "v={v}: {}", e.total);
            assert!((e.total - (e.potential + e.kinetic + e.nonlocal)).abs() < 1e-12);
        }
    }
}
