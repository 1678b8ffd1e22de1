//! Sign-change scan, bracketing and bisection for a scalar mismatch function.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec::{self, Execution};

/// Placement of the scan points in `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    #[default]
    Linear,
    /// Uniform in `log x`; suits spectra accumulating at 0.
    Geometric,
    /// Uniform in `log(1 - x)`; suits spectra accumulating at 1.
    GeometricFromOne,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub points: usize,
    pub spacing: Spacing,
    /// Extra points placed around each interior dip of `|R|`.
    pub refine_points: usize,
    /// Bisection stops once the bracket is narrower than this and one end
    /// verifies; otherwise it continues down to adjacent floats.
    pub xtol: f64,
    /// A refined zero must satisfy `|R| < verify_tol`.
    pub verify_tol: f64,
    /// Mismatches below this are treated as numerically indistinguishable from zero.
    pub noise_floor: f64,
    pub exec: Execution,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            points: 2000,
            spacing: Spacing::Linear,
            refine_points: 24,
            xtol: 1e-10,
            verify_tol: 1e-6,
            noise_floor: 1e-11,
            exec: Execution::default(),
        }
    }
}

/// A verified simple zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub x: f64,
    pub r: f64,
    /// Final bracket and the mismatch at its ends.
    pub bracket: (f64, f64),
    pub r_bracket: (f64, f64),
}

/// A local minimum of `|R|` without a sign change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Dip {
    pub x: f64,
    pub r: f64,
}

/// A sign change that could not be confirmed as a zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnresolvedBracket {
    pub bracket: (f64, f64),
    pub r_bracket: (f64, f64),
    pub reason: UnresolvedReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnresolvedReason {
    /// `|R|` stays below the noise floor across the whole bracket.
    BelowNoiseFloor,
    /// `|R|` does not shrink at the sign change: a jump, not a zero.
    Discontinuity,
    /// The mismatch could not be evaluated inside the bracket.
    EvaluationFailed,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanOutcome {
    /// Verified zeros, sorted by decreasing `x`.
    pub roots: Vec<Root>,
    /// Dips below the noise floor without a sign change.
    pub suspected: Vec<Dip>,
    /// Sharp dips well above the noise floor without a sign change.
    pub tangents: Vec<Dip>,
    pub unresolved: Vec<UnresolvedBracket>,
    /// Scan points where the mismatch could not be evaluated.
    pub failed_points: usize,
    pub evaluations: usize,
}

fn grid(lo: f64, hi: f64, n: usize, spacing: Spacing) -> Vec<f64> {
    let n = n.max(2);
    let t = |i: usize| i as f64 / (n - 1) as f64;
    match spacing {
        Spacing::Linear => (0..n).map(|i| lo + (hi - lo) * t(i)).collect(),
        Spacing::Geometric => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n).map(|i| (a + (b - a) * t(i)).exp()).collect()
        }
        Spacing::GeometricFromOne => {
            let (a, b) = ((1.0 - hi).ln(), (1.0 - lo).ln());
            let mut xs: Vec<f64> = (0..n).map(|i| 1.0 - (a + (b - a) * t(i)).exp()).collect();
            xs.reverse();
            xs
        }
    }
}

#[derive(Clone, Copy)]
enum Sample {
    Ok(f64),
    Failed,
}

impl Sample {
    fn value(self) -> Option<f64> {
        match self {
            Sample::Ok(r) => Some(r),
            Sample::Failed => None,
        }
    }
}

fn evaluate<F>(f: &F, xs: &[f64], exec: Execution) -> Vec<Sample>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    exec::map(xs, exec, |&x| match f(x) {
        Ok(r) if r.is_finite() => Sample::Ok(r),
        _ => Sample::Failed,
    })
}

/// Zero counts as positive, so a zero landing on a grid point is bracketed once.
fn sign_change(a: f64, b: f64) -> bool {
    (a < 0.0) != (b < 0.0)
}

/// Find zeros of `f` on `[lo, hi]` (requires `lo < hi`).
pub fn scan_zeros<F>(f: &F, lo: f64, hi: f64, opts: &ScanOptions) -> ScanOutcome
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let mut out = ScanOutcome::default();
    let mut xs = grid(lo, hi, opts.points, opts.spacing);
    let mut samples = evaluate(f, &xs, opts.exec);
    out.evaluations += xs.len();

    // Refine around interior dips of |R| so that close pairs of zeros are not missed.
    let mut extra_x = Vec::new();
    let mut dip_windows = Vec::new();
    for i in 1..xs.len().saturating_sub(1) {
        let (Some(a), Some(b), Some(c)) = (samples[i - 1].value(), samples[i].value(), samples[i + 1].value()) else {
            continue;
        };
        if sign_change(a, b) || sign_change(b, c) {
            continue;
        }
        if b.abs() < a.abs() && b.abs() < c.abs() {
            let m = opts.refine_points;
            for j in 1..=m {
                let t = j as f64 / (m + 1) as f64;
                extra_x.push(xs[i - 1] + t * (xs[i] - xs[i - 1]));
                extra_x.push(xs[i] + t * (xs[i + 1] - xs[i]));
            }
            dip_windows.push((xs[i - 1], xs[i + 1], a.abs().max(c.abs())));
        }
    }
    if !extra_x.is_empty() {
        let extra = evaluate(f, &extra_x, opts.exec);
        out.evaluations += extra_x.len();
        let mut merged: Vec<(f64, Sample)> = xs.iter().copied().zip(samples).chain(extra_x.into_iter().zip(extra)).collect();
        merged.sort_by(|p, q| p.0.total_cmp(&q.0));
        xs = merged.iter().map(|p| p.0).collect();
        samples = merged.into_iter().map(|p| p.1).collect();
    }
    out.failed_points = samples.iter().filter(|s| matches!(s, Sample::Failed)).count();

    let mut brackets = Vec::new();
    for i in 0..xs.len() - 1 {
        if let (Some(a), Some(b)) = (samples[i].value(), samples[i + 1].value()) {
            if sign_change(a, b) {
                brackets.push((xs[i], xs[i + 1], a, b));
            }
        }
    }

    // Classify dips that produced no sign change.
    for &(a, b, scale) in &dip_windows {
        if brackets.iter().any(|br| br.0 >= a && br.1 <= b) {
            continue;
        }
        let best = xs
            .iter()
            .zip(&samples)
            .filter(|(x, _)| **x >= a && **x <= b)
            .filter_map(|(x, s)| s.value().map(|r| (*x, r)))
            .min_by(|p, q| p.1.abs().total_cmp(&q.1.abs()));
        if let Some((x, r)) = best {
            if r.abs() < opts.noise_floor {
                out.suspected.push(Dip { x, r });
            } else if r.abs() < 1e-3 * scale {
                out.tangents.push(Dip { x, r });
            }
        }
    }

    let refined = exec::map(&brackets, opts.exec, |&(a, b, fa, fb)| bisect(f, a, b, fa, fb, opts));
    for (res, evals) in refined {
        out.evaluations += evals;
        match res {
            Ok(root) => out.roots.push(root),
            Err(u) => out.unresolved.push(u),
        }
    }
    out.roots.sort_by(|p, q| q.x.total_cmp(&p.x));
    out.unresolved.sort_by(|p, q| q.bracket.1.total_cmp(&p.bracket.1));
    out
}

fn bisect<F>(f: &F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, opts: &ScanOptions) -> (std::result::Result<Root, UnresolvedBracket>, usize)
where
    F: Fn(f64) -> Result<f64>,
{
    let initial = ((a, b), (fa, fb));
    let scale = fa.abs().max(fb.abs());
    let unresolved = |reason| UnresolvedBracket { bracket: initial.0, r_bracket: initial.1, reason };
    if scale < opts.noise_floor {
        return (Err(unresolved(UnresolvedReason::BelowNoiseFloor)), 0);
    }
    let mut evals = 0;
    if fa == 0.0 {
        b = a;
        fb = fa;
    } else if fb == 0.0 {
        a = b;
        fa = fb;
    }
    // Keep halving past `xtol` while neither end verifies: steep branches
    // (large |dR/dx|) need a bracket far below `xtol` to show |R| < verify_tol.
    while (b - a).abs() > opts.xtol || fa.abs().min(fb.abs()) >= opts.verify_tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        evals += 1;
        let fm = match f(m) {
            Ok(r) if r.is_finite() => r,
            _ => return (Err(unresolved(UnresolvedReason::EvaluationFailed)), evals),
        };
        if fm == 0.0 {
            a = m;
            b = m;
            fa = 0.0;
            fb = 0.0;
            break;
        }
        if sign_change(fa, fm) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    // Linear interpolation inside the final bracket.
    let x = if fa == fb { 0.5 * (a + b) } else { a - fa * (b - a) / (fb - fa) };
    let r = if fa.abs() <= fb.abs() { fa } else { fb };
    let verified = r.abs() < opts.verify_tol && (r.abs() <= 1e-3 * scale || r.abs() < opts.noise_floor);
    if !verified {
        return (Err(unresolved(UnresolvedReason::Discontinuity)), evals);
    }
    (Ok(Root { x, r, bracket: (a, b), r_bracket: (fa, fb) }), evals)
}
