use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{NdsgError, Result};
use crate::model::{local_dsg_kink, local_dsg_kink_slope, sg_like_excitation, sg_like_excitation_slope, ModelParams};
use crate::traveling_wave::KinkProfile;

/// Uniform grid. Open grids include both end points; periodic grids have `n`
/// nodes over one period `n h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub zeta_min: f64,
    pub h: f64,
    pub n: usize,
    pub periodic: bool,
}

impl Grid {
    /// Open grid on `[zeta_min, zeta_max]`; the extent must be a whole number of steps.
    pub fn open(zeta_min: f64, zeta_max: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) || !(zeta_max > zeta_min) || !zeta_min.is_finite() || !zeta_max.is_finite() {
            return Err(NdsgError::Grid(format!("need h > 0 and zeta_max > zeta_min (got h={h}, [{zeta_min}, {zeta_max}])")));
        }
        let steps = (zeta_max - zeta_min) / h;
        let rounded = steps.round();
        if (steps - rounded).abs() > 1e-6 * steps.max(1.0) || rounded < 4.0 {
            return Err(NdsgError::Grid(format!("extent {} is not a whole number (>= 4) of steps h={h}", zeta_max - zeta_min)));
        }
        Ok(Self { zeta_min, h, n: rounded as usize + 1, periodic: false })
    }

    /// Periodic grid of `n` nodes over `[zeta_min, zeta_min + period)`.
    pub fn periodic(zeta_min: f64, period: f64, n: usize) -> Result<Self> {
        if n < 4 || !(period > 0.0) {
            return Err(NdsgError::Grid(format!("need n >= 4 and a positive period (n={n}, period={period})")));
        }
        Ok(Self { zeta_min, h: period / n as f64, n, periodic: true })
    }

    pub fn zeta(&self, i: usize) -> f64 {
        self.zeta_min + i as f64 * self.h
    }

    pub fn zeta_max(&self) -> f64 {
        self.zeta(self.n - 1)
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.zeta(i)).collect()
    }
}

/// Absorbing edge layers: `sigma = peak sin^2(pi s / 2)`, with `s` rising
/// from 0 at the inner edge of the layer to 1 at the domain boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sponge {
    /// Fraction of the domain covered on each side.
    pub fraction: f64,
    pub peak: f64,
}

impl Default for Sponge {
    fn default() -> Self {
        Self { fraction: 0.1, peak: 1.0 }
    }
}

impl Sponge {
    pub const MIN_FRACTION: f64 = 0.05;
    pub const MAX_FRACTION: f64 = 0.2;

    pub fn validate(&self) -> Result<()> {
        if !(Self::MIN_FRACTION..=Self::MAX_FRACTION).contains(&self.fraction) || !(self.peak > 0.0) {
            return Err(NdsgError::Config(format!(
                "sponge must cover {}..{} of the domain per side with a positive peak (got {} / {})",
                Self::MIN_FRACTION,
                Self::MAX_FRACTION,
                self.fraction,
                self.peak
            )));
        }
        Ok(())
    }

    pub fn profile(&self, grid: &Grid) -> Vec<f64> {
        let len = grid.zeta_max() - grid.zeta_min;
        let width = self.fraction * len;
        (0..grid.n)
            .map(|i| {
                let x = grid.zeta(i);
                let depth = (grid.zeta_min + width - x).max(x - (grid.zeta_max() - width));
                if depth <= 0.0 {
                    0.0
                } else {
                    let s = (depth / width).min(1.0);
                    self.peak * (0.5 * PI * s).sin().powi(2)
                }
            })
            .collect()
    }
}

/// Field and rate samples at time `tau`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub grid: Grid,
    pub phi: Vec<f64>,
    pub phi_dot: Vec<f64>,
    pub tau: f64,
    /// Damping profile; all zeros without sponge.
    pub sponge: Vec<f64>,
}

impl FieldState {
    pub fn new(grid: Grid, phi: Vec<f64>, phi_dot: Vec<f64>, sponge: Option<Sponge>) -> Result<Self> {
        if phi.len() != grid.n || phi_dot.len() != grid.n {
            return Err(NdsgError::Grid(format!("expected {} samples, got {} and {}", grid.n, phi.len(), phi_dot.len())));
        }
        let sponge = match sponge {
            Some(s) if grid.periodic => {
                return Err(NdsgError::Boundary(format!("sponge {s:?} requested on a periodic grid")));
            }
            Some(s) => {
                s.validate()?;
                s.profile(&grid)
            }
            None => vec![0.0; grid.n],
        };
        Ok(Self { grid, phi, phi_dot, tau: 0.0, sponge })
    }

    /// Node range `lo..=hi` outside the sponge layers.
    pub fn interior(&self) -> (usize, usize) {
        let lo = self.sponge.iter().position(|&s| s == 0.0).unwrap_or(0);
        let hi = self.sponge.iter().rposition(|&s| s == 0.0).unwrap_or(self.grid.n - 1);
        (lo, hi)
    }
}

/// Shape used for the initial kink.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialProfile {
    /// A traveling-wave profile, resampled onto the grid.
    TravelingKink(KinkProfile),
    /// `4 atan(exp(gamma x / sqrt(1 - v^2)))` at the launch velocity.
    SgLike { gamma: f64 },
    /// Exact kink of the local double sine-Gordon equation at the launch velocity.
    LocalDsg,
}

impl InitialProfile {
    fn eval(&self, x: f64, v: f64, a: f64) -> Result<(f64, f64)> {
        match self {
            InitialProfile::TravelingKink(k) => Ok(k.sample(x)),
            InitialProfile::SgLike { gamma } => Ok((sg_like_excitation(x, v, *gamma)?, sg_like_excitation_slope(x, v, *gamma)?)),
            InitialProfile::LocalDsg => Ok((local_dsg_kink(x, v, a)?, local_dsg_kink_slope(x, v, a)?)),
        }
    }
}

/// Where and how fast the kink starts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Launch {
    pub v: f64,
    /// Initial position of the point `phi = pi`.
    pub front: f64,
    /// Largest admissible departure from 0 / 2 pi at the inner edges of the sponge.
    pub tail_tol: f64,
}

impl Default for Launch {
    fn default() -> Self {
        Self { v: 0.0, front: -50.0, tail_tol: 1e-4 }
    }
}

/// `phi(zeta) = profile(zeta - front)` with the rigid-boost rate `-v phi_zeta`.
pub fn make_initial_state(
    grid: Grid,
    sponge: Option<Sponge>,
    params: &ModelParams,
    profile: &InitialProfile,
    launch: &Launch,
) -> Result<FieldState> {
    if grid.periodic {
        return Err(NdsgError::Boundary("a 2pi-kink cannot live on a periodic grid".into()));
    }
    if !(launch.v.abs() < 1.0) {
        return Err(NdsgError::Domain(format!("launch velocity must satisfy |v| < 1, got {}", launch.v)));
    }
    let mut phi = Vec::with_capacity(grid.n);
    let mut phi_dot = Vec::with_capacity(grid.n);
    for i in 0..grid.n {
        let (p, d) = profile.eval(grid.zeta(i) - launch.front, launch.v, params.a)?;
        phi.push(p);
        phi_dot.push(-launch.v * d);
    }
    let state = FieldState::new(grid, phi, phi_dot, sponge)?;
    let (lo, hi) = state.interior();
    let left = state.phi[lo].abs();
    let right = (state.phi[hi] - 2.0 * PI).abs();
    if left > launch.tail_tol || right > launch.tail_tol {
        return Err(NdsgError::DomainTooSmall(format!(
            "kink tails reach {left:.2e} / {right:.2e} at the absorbing layers (tolerance {:.1e}); widen the domain or move the front",
            launch.tail_tol
        )));
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn open_grid_counts_nodes() {
        let g = Grid::open(-100.0, 250.0, 0.05).unwrap();
        assert_eq!(g.n, 7001);
        assert!((g.zeta_max() - 250.0).abs() < 1e-9);
        assert!(Grid::open(0.0, 1.0, 0.3).is_err());
    }

    #[test]
    fn sponge_profile_shape() {
        let g = Grid::open(0.0, 100.0, 0.5).unwrap();
        let s = Sponge::default().profile(&g);
        assert_eq!(s[0], 1.0);
        assert_eq!(s[g.n - 1], 1.0);
        assert_eq!(s[g.n / 2], 0.0);
        assert!(s.iter().all(|&x| (0.0..=1.0).contains(&x)));
        let state = FieldState::new(g, vec![0.0; g.n], vec![0.0; g.n], Some(Sponge::default())).unwrap();
        let (lo, hi) = state.interior();
        assert!((g.zeta(lo) - 10.0).abs() <= 0.5 && (g.zeta(hi) - 90.0).abs() <= 0.5);
    }

    #[test]
    fn sponge_bounds_are_enforced() {
        assert!(Sponge { fraction: 0.3, peak: 1.0 }.validate().is_err());
        assert!(Sponge { fraction: 0.04, peak: 1.0 }.validate().is_err());
    }

    #[test]
    fn tails_must_fit() {
        let p = ModelParams::new(0.3, 0.125).unwrap();
        let g = Grid::open(-6.0, 6.0, 0.05).unwrap();
        let launch = Launch { v: 0.5, front: 0.0, tail_tol: 1e-6 };
        let r = make_initial_state(g, Some(Sponge::default()), &p, &InitialProfile::LocalDsg, &launch);
        assert!(matches!(r, Err(NdsgError::DomainTooSmall(_))));
    }
}
