//! Discrete spectra: `v_n` at fixed `lambda`, `lambda_n` at fixed `v`, and
//! `delta_n` of the fourth-order approximation.

use serde::{Deserialize, Serialize};

use super::scan::{scan_zeros, Dip, ScanOptions, ScanOutcome, UnresolvedBracket};
use super::{FourthOrderSystem, ShootControls, TravelingWaveSystem};
use crate::error::{NdsgError, Result};
use crate::model::ModelParams;

/// Which parameter a spectrum enumerates, and the fixed context.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpectrumKind {
    /// `v_n` at fixed `(lambda, A)`.
    Velocity { lambda: f64, a: f64 },
    /// `lambda_n` at fixed `(v, A)`.
    Lambda { v: f64, a: f64 },
    /// `delta_n` of the fourth-order approximation at fixed `A`.
    Delta { a: f64 },
}

impl SpectrumKind {
    pub fn a(&self) -> f64 {
        match *self {
            SpectrumKind::Velocity { a, .. } | SpectrumKind::Lambda { a, .. } | SpectrumKind::Delta { a } => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    /// Branch index, 1 for the largest value.
    pub n: usize,
    pub value: f64,
    /// Mismatch at the reported value.
    pub mismatch: f64,
    pub bracket: (f64, f64),
    pub mismatch_bracket: (f64, f64),
    /// `|R(eps) - R(eps/2)|` at the reported value (manifold-seeding check).
    pub seeding_defect: Option<f64>,
}

/// Ordered spectrum (`value` strictly decreasing with `n`) plus diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocitySpectrum {
    pub kind: SpectrumKind,
    pub range: (f64, f64),
    pub entries: Vec<SpectrumEntry>,
    /// Sign changes that could not be confirmed (e.g. below the noise floor).
    pub unresolved: Vec<UnresolvedBracket>,
    /// Near-zero minima of `|R|` without a sign change; not claimed as kinks.
    pub suspected: Vec<Dip>,
    /// Tangential near-zeros; excluded from the ordered spectrum.
    pub tangents: Vec<Dip>,
    pub scan_points: usize,
    pub xtol: f64,
    pub noise_floor: f64,
    pub evaluations: usize,
    pub failed_points: usize,
}

impl VelocitySpectrum {
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entry `n` (1-based), or an "insufficient accuracy" error when the
    /// branch lies beyond what the scan could resolve.
    pub fn branch(&self, n: usize) -> Result<&SpectrumEntry> {
        if n == 0 {
            return Err(NdsgError::Domain("branch indices start at 1".into()));
        }
        self.entries.get(n - 1).ok_or_else(|| {
            let reason = if self.unresolved.is_empty() && self.suspected.is_empty() {
                format!("only {} branch(es) found in {:?}", self.entries.len(), self.range)
            } else {
                format!(
                    "{} branch(es) resolved; {} further sign change(s) and {} near-zero dip(s) lie below the mismatch noise floor {:.1e}",
                    self.entries.len(),
                    self.unresolved.len(),
                    self.suspected.len(),
                    self.noise_floor
                )
            };
            NdsgError::InsufficientAccuracy { branch: n, reason }
        })
    }
}

fn build<F>(kind: SpectrumKind, range: (f64, f64), n_max: usize, opts: &ScanOptions, f: &F, recheck: impl Fn(f64) -> Option<f64> + Sync) -> VelocitySpectrum
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let ScanOutcome { roots, suspected, tangents, unresolved, failed_points, evaluations } = scan_zeros(f, range.0, range.1, opts);
    let kept: Vec<_> = roots.into_iter().take(n_max).collect();
    let defects = crate::exec::map(&kept, opts.exec, |r| recheck(r.x).map(|half| (half - r.r).abs()));
    let entries = kept
        .iter()
        .zip(defects)
        .enumerate()
        .map(|(i, (r, seeding_defect))| SpectrumEntry {
            n: i + 1,
            value: r.x,
            mismatch: r.r,
            bracket: r.bracket,
            mismatch_bracket: r.r_bracket,
            seeding_defect,
        })
        .collect();
    VelocitySpectrum {
        kind,
        range,
        entries,
        unresolved,
        suspected,
        tangents,
        scan_points: opts.points,
        xtol: opts.xtol,
        noise_floor: opts.noise_floor,
        evaluations,
        failed_points,
    }
}

fn check_range(range: (f64, f64), lo: f64, hi: f64, what: &str) -> Result<()> {
    if !(range.0 > lo && range.1 < hi && range.0 < range.1) {
        return Err(NdsgError::Domain(format!("{what} range {range:?} must lie inside ({lo}, {hi})")));
    }
    Ok(())
}

fn half_eps(controls: &ShootControls) -> ShootControls {
    ShootControls { eps: 0.5 * controls.eps, ..*controls }
}

/// Radiationless kink velocities in `v_range` at fixed `(lambda, A)`, largest first.
pub fn find_velocity_spectrum(
    params: &ModelParams,
    v_range: (f64, f64),
    n_max: usize,
    controls: &ShootControls,
    opts: &ScanOptions,
) -> Result<VelocitySpectrum> {
    check_range(v_range, 0.0, 1.0, "velocity")?;
    TravelingWaveSystem::new(*params, v_range.0)?;
    let f = |v: f64| Ok(TravelingWaveSystem::new(*params, v)?.shoot(controls)?.mismatch);
    let half = half_eps(controls);
    let recheck = |v: f64| TravelingWaveSystem::new(*params, v).ok()?.shoot(&half).ok().map(|s| s.mismatch);
    Ok(build(SpectrumKind::Velocity { lambda: params.lambda, a: params.a }, v_range, n_max, opts, &f, recheck))
}

/// Kink-admitting `lambda_n` in `lambda_range` at fixed `(v, A)`, largest first.
pub fn find_lambda_spectrum(
    a: f64,
    v: f64,
    lambda_range: (f64, f64),
    n_max: usize,
    controls: &ShootControls,
    opts: &ScanOptions,
) -> Result<VelocitySpectrum> {
    check_range((v, v + f64::EPSILON), 0.0, 1.0, "velocity")?;
    if !(a > 0.0) {
        return Err(NdsgError::Domain(format!("the lambda spectrum is defined for A > 0, got {a}")));
    }
    check_range(lambda_range, 0.0, f64::INFINITY, "lambda")?;
    let shoot = move |lambda: f64, c: &ShootControls| -> Result<f64> {
        let p = ModelParams::new(lambda, a)?;
        Ok(TravelingWaveSystem::new(p, v)?.shoot(c)?.mismatch)
    };
    let f = |lambda: f64| shoot(lambda, controls);
    let half = half_eps(controls);
    let recheck = |lambda: f64| shoot(lambda, &half).ok();
    Ok(build(SpectrumKind::Lambda { v, a }, lambda_range, n_max, opts, &f, recheck))
}

/// `delta_n` of `phi'' + delta^2 phi'''' = sin phi + 2A sin 2phi`, largest first.
pub fn fourth_order_spectrum(
    a: f64,
    delta_range: (f64, f64),
    n_max: usize,
    controls: &ShootControls,
    opts: &ScanOptions,
) -> Result<VelocitySpectrum> {
    FourthOrderSystem::new(a, 1.0)?;
    check_range(delta_range, 0.0, f64::INFINITY, "delta")?;
    let f = |d: f64| Ok(FourthOrderSystem::new(a, d)?.shoot(controls)?.mismatch);
    let half = half_eps(controls);
    let recheck = |d: f64| FourthOrderSystem::new(a, d).ok()?.shoot(&half).ok().map(|s| s.mismatch);
    Ok(build(SpectrumKind::Delta { a }, delta_range, n_max, opts, &f, recheck))
}

/// The first `n_branches` velocity branches `v_n(lambda)` over a list of
/// `lambda` values; `None` where a branch was not resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSweep {
    pub a: f64,
    pub lambdas: Vec<f64>,
    /// `branches[n - 1][i]` is `v_n(lambdas[i])`.
    pub branches: Vec<Vec<Option<f64>>>,
}

impl BranchSweep {
    /// True when every resolved branch is strictly below the one above it at each `lambda`.
    pub fn strictly_ordered(&self) -> bool {
        (0..self.lambdas.len()).all(|i| {
            self.branches.windows(2).all(|w| match (w[0][i], w[1][i]) {
                (Some(hi), Some(lo)) => hi > lo,
                _ => true,
            })
        })
    }
}

pub fn sweep_velocity_branches(
    a: f64,
    lambdas: &[f64],
    n_branches: usize,
    v_range: (f64, f64),
    controls: &ShootControls,
    opts: &ScanOptions,
) -> Result<BranchSweep> {
    let mut branches = vec![Vec::with_capacity(lambdas.len()); n_branches];
    for &lambda in lambdas {
        let s = find_velocity_spectrum(&ModelParams::new(lambda, a)?, v_range, n_branches, controls, opts)?;
        for (n, b) in branches.iter_mut().enumerate() {
            b.push(s.entries.get(n).map(|e| e.value));
        }
    }
    Ok(BranchSweep { a, lambdas: lambdas.to_vec(), branches })
}
