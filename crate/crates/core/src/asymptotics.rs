//! Closed-form asymptotics for the kink-admitting parameter sequences.
//!
//! The local double sine-Gordon kink continued into the complex plane has, for
//! `A > 0`, a pair of nearest singularities `±alpha + i beta`. The wavenumber of
//! the resonant radiation at the n-th kink-admitting parameter is then
//! expected to behave like `(n pi + theta0) / alpha`, which yields explicit
//! sequences for `lambda_n` (fixed `v`) and `delta_n` (fourth-order model).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{NdsgError, Result};
use crate::traveling_wave::{SpectrumKind, VelocitySpectrum};

/// Which kink the singularities belong to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AsymptoticContext {
    /// Full nonlocal equation at fixed velocity; sequence in `lambda`.
    Full { a: f64, v: f64 },
    /// Fourth-order approximation; sequence in `delta`.
    FourthOrder { a: f64 },
}

impl AsymptoticContext {
    pub fn a(&self) -> f64 {
        match *self {
            AsymptoticContext::Full { a, .. } | AsymptoticContext::FourthOrder { a } => a,
        }
    }

    fn matches(&self, kind: &SpectrumKind) -> bool {
        match (*self, *kind) {
            (AsymptoticContext::Full { a, v }, SpectrumKind::Lambda { v: sv, a: sa }) => a == sa && v == sv,
            (AsymptoticContext::FourthOrder { a }, SpectrumKind::Delta { a: sa }) => a == sa,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingularityPair {
    /// Modulus of the real part.
    pub alpha: f64,
    /// Imaginary part.
    pub beta: f64,
    pub context: AsymptoticContext,
}

fn require_positive_a(a: f64) -> Result<()> {
    if a.is_finite() && a > 0.0 {
        Ok(())
    } else {
        Err(NdsgError::NotApplicable(format!(
            "for A = {a} the nearest singularities of the local kink lie on the imaginary axis (alpha = 0); \
             the asymptotic sequences are not defined"
        )))
    }
}

fn require_velocity(v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(NdsgError::Domain(format!("velocity must lie in (0, 1), got {v}")))
    }
}

fn require_index(n: usize) -> Result<()> {
    if n >= 1 {
        Ok(())
    } else {
        Err(NdsgError::Domain("branch indices start at 1".into()))
    }
}

/// `arccosh(1 + 8A) / sqrt(1 + 4A)`, shared by every formula below.
fn shape_factor(a: f64) -> f64 {
    (1.0 + 8.0 * a).acosh() / (1.0 + 4.0 * a).sqrt()
}

/// Nearest singularities of the local kink `(1 - v^2) phi'' = F(phi)`.
///
/// `v = 0` is accepted here (it gives the fourth-order pair).
pub fn singularities_full(a: f64, v: f64) -> Result<SingularityPair> {
    require_positive_a(a)?;
    if !(v.abs() < 1.0) {
        return Err(NdsgError::Domain(format!("|v| must be below 1, got {v}")));
    }
    let contraction = (1.0 - v * v).sqrt();
    let s = (1.0 + 4.0 * a).sqrt();
    Ok(SingularityPair {
        alpha: contraction * (1.0 + 8.0 * a).acosh() / (2.0 * s),
        beta: PI * contraction / (2.0 * s),
        context: AsymptoticContext::Full { a, v },
    })
}

/// Nearest singularities of the kink of `phi'' = F(phi)` in the rescaled variable.
pub fn singularities_fourth_order(a: f64) -> Result<SingularityPair> {
    let full = singularities_full(a, 0.0)?;
    Ok(SingularityPair { context: AsymptoticContext::FourthOrder { a }, ..full })
}

/// Predicted `lambda_n` at fixed `v`.
pub fn lambda_n_asymptotic(a: f64, v: f64, n: usize, theta0_tilde: f64) -> Result<f64> {
    require_positive_a(a)?;
    require_velocity(v)?;
    require_index(n)?;
    Ok((1.0 - v * v) * shape_factor(a) / (v * ((2 * n - 1) as f64 * PI + theta0_tilde)))
}

/// Predicted `delta_n` of the fourth-order approximation.
pub fn delta_n_asymptotic(a: f64, n: usize, theta0_tilde: f64) -> Result<f64> {
    require_positive_a(a)?;
    require_index(n)?;
    Ok(shape_factor(a) / ((2 * n - 1) as f64 * PI + theta0_tilde))
}

/// Predicted resonant wavenumber `(n pi + theta0) / alpha`.
///
/// Note the index convention: with `theta0_tilde = 2 theta0 - pi`, branch `n`
/// of [`lambda_n_asymptotic`] corresponds to `n - 1` here.
pub fn conjecture_wavenumber_relation(alpha: f64, n: usize, theta0: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(NdsgError::NotApplicable(format!("alpha must be positive, got {alpha}")));
    }
    Ok((n as f64 * PI + theta0) / alpha)
}

/// The first `n_max` predicted values for `context`.
pub fn asymptotic_sequence(context: AsymptoticContext, n_max: usize, theta0_tilde: f64) -> Result<Vec<f64>> {
    (1..=n_max)
        .map(|n| match context {
            AsymptoticContext::Full { a, v } => lambda_n_asymptotic(a, v, n, theta0_tilde),
            AsymptoticContext::FourthOrder { a } => delta_n_asymptotic(a, n, theta0_tilde),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRow {
    pub n: usize,
    pub asymptotic: f64,
    pub computed: Option<f64>,
    pub abs_deviation: Option<f64>,
    /// `|computed - asymptotic| / |asymptotic|`.
    pub rel_deviation: Option<f64>,
}

impl AsymptoticRow {
    fn new(n: usize, asymptotic: f64, computed: Option<f64>) -> Self {
        let abs_deviation = computed.map(|c| (c - asymptotic).abs());
        Self { n, asymptotic, computed, abs_deviation, rel_deviation: abs_deviation.map(|d| d / asymptotic.abs()) }
    }

    /// True when the stored deviations are exactly what the two value columns give.
    pub fn is_consistent(&self) -> bool {
        *self == Self::new(self.n, self.asymptotic, self.computed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticTable {
    pub context: AsymptoticContext,
    pub theta0_tilde: f64,
    pub rows: Vec<AsymptoticRow>,
    /// Relative deviation at the largest common `n` below that at `n = 1`;
    /// `None` when fewer than two rows carry a computed value.
    pub improves_with_n: Option<bool>,
}

/// Align the solver's spectrum with the predicted sequence by branch index.
///
/// Rows extend over the longer of the two; missing computed values stay empty.
pub fn build_comparison_table(
    spectrum: &VelocitySpectrum,
    context: AsymptoticContext,
    theta0_tilde: f64,
    n_max: usize,
) -> Result<AsymptoticTable> {
    if !context.matches(&spectrum.kind) {
        return Err(NdsgError::ContextMismatch(format!(
            "spectrum {:?} cannot be compared with asymptotics for {:?}",
            spectrum.kind, context
        )));
    }
    let predicted = asymptotic_sequence(context, n_max, theta0_tilde)?;
    let rows: Vec<AsymptoticRow> = predicted
        .iter()
        .enumerate()
        .map(|(i, &p)| AsymptoticRow::new(i + 1, p, spectrum.entries.get(i).map(|e| e.value)))
        .collect();
    Ok(AsymptoticTable { context, theta0_tilde, improves_with_n: verdict(&rows), rows })
}

/// Table of predicted values only (e.g. when no solver run is wanted).
pub fn asymptotic_only_table(context: AsymptoticContext, theta0_tilde: f64, n_max: usize) -> Result<AsymptoticTable> {
    let rows = asymptotic_sequence(context, n_max, theta0_tilde)?
        .into_iter()
        .enumerate()
        .map(|(i, p)| AsymptoticRow::new(i + 1, p, None))
        .collect();
    Ok(AsymptoticTable { context, theta0_tilde, rows, improves_with_n: None })
}

fn verdict(rows: &[AsymptoticRow]) -> Option<bool> {
    let with: Vec<f64> = rows.iter().filter_map(|r| r.rel_deviation).collect();
    let first = rows.first()?.rel_deviation?;
    if with.len() < 2 {
        return None;
    }
    let last = rows.iter().rev().find_map(|r| r.rel_deviation)?;
    Some(last < first)
}
