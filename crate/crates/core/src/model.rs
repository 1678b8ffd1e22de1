//! Dimensionless model: nonlinearity, exact local kinks, initial excitations,
//! linear-mode resonance and the physical-to-dimensionless conversion.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{NdsgError, Result};

/// Governing pair of the dimensionless equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Nonlocality parameter (kernel width), `>= 0`.
    pub lambda: f64,
    /// Second-harmonic amplitude.
    #[serde(rename = "a")]
    pub a: f64,
}

impl ModelParams {
    pub fn new(lambda: f64, a: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(NdsgError::Domain(format!("lambda must be >= 0, got {lambda}")));
        }
        if !a.is_finite() {
            return Err(NdsgError::Domain(format!("A must be finite, got {a}")));
        }
        Ok(Self { lambda, a })
    }

    /// `1 + 4A`, the squared linear frequency at the vacuum.
    pub fn linear_stiffness(&self) -> f64 {
        1.0 + 4.0 * self.a
    }

    pub fn require_real_frequency(&self) -> Result<()> {
        if self.linear_stiffness() <= 0.0 {
            return Err(NdsgError::Domain(format!(
                "1 + 4A must be positive, got A = {}",
                self.a
            )));
        }
        Ok(())
    }

    pub fn nonlinearity(&self, phi: f64) -> f64 {
        nonlinearity(phi, self.a)
    }

    pub fn potential(&self, phi: f64) -> f64 {
        potential(phi, self.a)
    }
}

/// `sin(phi) + 2A sin(2 phi)`.
#[inline]
pub fn nonlinearity(phi: f64, a: f64) -> f64 {
    let (s, c) = phi.sin_cos();
    s * (1.0 + 4.0 * a * c)
}

/// `1 - cos(phi) + A (1 - cos(2 phi))`, whose derivative is [`nonlinearity`].
#[inline]
pub fn potential(phi: f64, a: f64) -> f64 {
    // 1 - cos(phi) = 2 sin^2(phi/2) and 1 - cos(2 phi) = 2 sin^2(phi) avoid cancellation near 0.
    let h = (0.5 * phi).sin();
    let s = phi.sin();
    2.0 * h * h + 2.0 * a * s * s
}

pub(crate) fn check_velocity(v: f64) -> Result<f64> {
    if !v.is_finite() || v * v >= 1.0 {
        return Err(NdsgError::Domain(format!("velocity must satisfy v^2 < 1, got {v}")));
    }
    Ok((1.0 - v * v).sqrt())
}

fn check_local_a(a: f64) -> Result<f64> {
    if !a.is_finite() || a <= -0.25 {
        return Err(NdsgError::Domain(format!("A must exceed -1/4, got {a}")));
    }
    Ok((1.0 + 4.0 * a).sqrt())
}

/// Exact 2π-kink of the local double sine-Gordon traveling-wave equation
/// `(1 - v^2) phi'' = sin phi + 2A sin 2phi`, centred so that `phi(0) = π`.
pub fn local_dsg_kink(xi: f64, v: f64, a: f64) -> Result<f64> {
    let gamma = check_velocity(v)?;
    let s = check_local_a(a)?;
    Ok(PI + 2.0 * ((s * xi / gamma).sinh() / s).atan())
}

/// `d/dxi` of [`local_dsg_kink`].
pub fn local_dsg_kink_slope(xi: f64, v: f64, a: f64) -> Result<f64> {
    let gamma = check_velocity(v)?;
    let s = check_local_a(a)?;
    let x = s * xi / gamma;
    let sech = 1.0 / x.cosh();
    let tanh = x.tanh();
    Ok(2.0 * s * s * sech / (gamma * (s * s * sech * sech + tanh * tanh)))
}

/// Sine-Gordon-shaped kink-like excitation `4 atan(exp(gamma xi / sqrt(1 - v^2)))`.
pub fn sg_like_excitation(xi: f64, v: f64, gamma: f64) -> Result<f64> {
    let contraction = check_velocity(v)?;
    if !(gamma > 0.0) {
        return Err(NdsgError::Domain(format!("slope factor must be positive, got {gamma}")));
    }
    Ok(4.0 * (gamma * xi / contraction).exp().atan())
}

/// `d/dxi` of [`sg_like_excitation`].
pub fn sg_like_excitation_slope(xi: f64, v: f64, gamma: f64) -> Result<f64> {
    let contraction = check_velocity(v)?;
    if !(gamma > 0.0) {
        return Err(NdsgError::Domain(format!("slope factor must be positive, got {gamma}")));
    }
    let k = gamma / contraction;
    Ok(2.0 * k / (k * xi).cosh())
}

/// Real resonant wavenumbers of the linearized traveling-wave equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionRoots {
    pub roots: Vec<f64>,
    /// Relative residual of each root in the dispersion relation.
    pub residuals: Vec<f64>,
    /// 2 for a tangential (double) root, 1 otherwise.
    pub multiplicity: Vec<u8>,
}

impl DispersionRoots {
    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn first(&self) -> Option<f64> {
        self.roots.first().copied()
    }
}

/// Dispersion function `v^2 k^2 - k^2 / (1 + lambda^2 k^2) - (1 + 4A)`; zero at resonance.
pub fn dispersion_function(params: &ModelParams, v: f64, k: f64) -> f64 {
    let k2 = k * k;
    v * v * k2 - k2 / (1.0 + params.lambda * params.lambda * k2) - params.linear_stiffness()
}

fn dispersion_scale(params: &ModelParams, v: f64, k: f64) -> f64 {
    let k2 = k * k;
    v * v * k2 + k2 / (1.0 + params.lambda * params.lambda * k2) + params.linear_stiffness()
}

/// Positive root of `a u^2 + b u - c = 0` with `a >= 0`, `c > 0`, computed
/// without cancellation.
pub(crate) fn positive_quadratic_root(a: f64, b: f64, c: f64) -> Option<f64> {
    if a == 0.0 {
        return if b > 0.0 { Some(c / b) } else { None };
    }
    let disc = (b * b + 4.0 * a * c).sqrt();
    let u = if b <= 0.0 {
        (disc - b) / (2.0 * a)
    } else {
        2.0 * c / (disc + b)
    };
    (u > 0.0).then_some(u)
}

/// All nonnegative real `k` at which a linear mode travels with the kink.
///
/// The relation is quadratic in `u = k^2`:
/// `v^2 lambda^2 u^2 + (v^2 - 1 - (1+4A) lambda^2) u - (1+4A) = 0`, whose
/// constant term forces exactly one positive root whenever `lambda > 0` and
/// `0 < v^2 < 1`. At `lambda = 0` the relation degenerates and has no root.
pub fn dispersion_roots(params: &ModelParams, v: f64) -> Result<DispersionRoots> {
    params.require_real_frequency()?;
    check_velocity(v)?;
    let l2 = params.lambda * params.lambda;
    let stiff = params.linear_stiffness();
    let mut out = DispersionRoots {
        roots: Vec::new(),
        residuals: Vec::new(),
        multiplicity: Vec::new(),
    };
    let a = v * v * l2;
    let b = v * v - 1.0 - stiff * l2;
    if let Some(u) = positive_quadratic_root(a, b, stiff) {
        let k = u.sqrt();
        let res = dispersion_function(params, v, k).abs() / dispersion_scale(params, v, k);
        out.roots.push(k);
        out.residuals.push(res);
        out.multiplicity.push(1);
    }
    Ok(out)
}

/// Positive resonant wavenumber of the fourth-order model
/// `phi'' + delta^2 phi'''' = F(phi)`: root of `delta^2 k^4 - k^2 = 1 + 4A`.
pub fn fourth_order_wavenumber(a: f64, delta: f64) -> Result<f64> {
    check_local_a(a)?;
    if !(delta > 0.0) {
        return Err(NdsgError::Domain(format!("delta must be positive, got {delta}")));
    }
    let u = positive_quadratic_root(delta * delta, -1.0, 1.0 + 4.0 * a)
        .ok_or_else(|| NdsgError::DegenerateSpectrum("no real fourth-order root".into()))?;
    Ok(u.sqrt())
}

/// Physical description of the layered structure (any consistent length unit).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// London penetration depth.
    pub lambda_l: f64,
    /// Half-thickness of a superconducting layer.
    pub l: f64,
    /// Half-thickness of a tunnel layer.
    pub d: f64,
    /// Josephson length.
    pub lambda_j: f64,
    /// Critical current density, if known.
    pub j_c: Option<f64>,
    /// Second-harmonic current density, if known.
    pub j2: Option<f64>,
}

/// A dimensional quantity carried as value plus a unit description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaled {
    pub value: f64,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleReport {
    pub lambda: f64,
    /// `J2 / (2 jc)` when both currents are given.
    pub a: Option<f64>,
    pub lambda_eff: Scaled,
    /// Multiplier taking `x` to `zeta`.
    pub space_scale: Scaled,
    pub time_scale: Scaled,
    /// Prefactor of the nonlocal term in dimensional form.
    pub nonlocal_prefactor: Scaled,
    pub energy_prefactor: Scaled,
    /// Value of `2 L sqrt(lambda_L^-2 + k^2)` for a supplied `k`.
    pub thin_layer_parameter: Option<f64>,
    pub warnings: Vec<String>,
}

/// Threshold above which the thin-layer assumption is flagged.
pub const THIN_LAYER_LIMIT: f64 = 0.1;

pub fn physical_to_dimensionless(phys: &PhysicalParams, k_scale: Option<f64>) -> Result<ScaleReport> {
    let PhysicalParams { lambda_l, l, d, lambda_j, j_c, j2 } = *phys;
    for (name, x) in [("lambda_L", lambda_l), ("L", l), ("d", d), ("lambda_J", lambda_j)] {
        if !(x > 0.0) || !x.is_finite() {
            return Err(NdsgError::Domain(format!("{name} must be a positive length, got {x}")));
        }
    }
    let lambda = l.sqrt() * lambda_l / (lambda_j * (lambda_l + d).sqrt());
    let lambda_eff = lambda_l * (l / (l + d)).sqrt();
    let space = ((l + d) / (lambda_l + d)).sqrt() / lambda_j;
    let big_lambda = (lambda_l + d) * lambda_j * lambda_j / (2.0 * lambda_l * ((l + d) * l).sqrt());
    let energy = lambda_j * ((lambda_l + d) / (l + d)).sqrt();
    let a = match (j_c, j2) {
        (Some(jc), Some(j2)) if jc != 0.0 => Some(j2 / (2.0 * jc)),
        _ => None,
    };
    let mut warnings = Vec::new();
    let thin = k_scale.map(|k| 2.0 * l * (1.0 / (lambda_l * lambda_l) + k * k).sqrt());
    if let Some(t) = thin {
        if t > THIN_LAYER_LIMIT {
            warnings.push(format!(
                "thin-layer condition 2L*sqrt(lambda_L^-2 + k^2) << 1 is violated: {t}"
            ));
        }
    }
    Ok(ScaleReport {
        lambda,
        a,
        lambda_eff: Scaled { value: lambda_eff, unit: "length".into() },
        space_scale: Scaled { value: space, unit: "1/length (zeta = factor * x)".into() },
        time_scale: Scaled { value: 1.0, unit: "omega_J (tau = omega_J * t)".into() },
        nonlocal_prefactor: Scaled { value: big_lambda, unit: "length".into() },
        energy_prefactor: Scaled { value: energy, unit: "phi0*j_c/(2*pi*c) * length".into() },
        thin_layer_parameter: thin,
        warnings,
    })
}
