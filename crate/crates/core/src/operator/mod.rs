//! The nonlocal operator `L phi = (1/2 lambda) d/dx ∫ exp(-|x - s| / lambda) phi_s ds`
//! and its three interchangeable discretizations: Fourier multiplier,
//! recursive two-sweep convolution, and compact Helmholtz solve.

pub mod helmholtz;
pub mod spectral;
pub mod stencil;
pub mod sweep;

use crate::error::{NdsgError, Result};
use spectral::SpectralPlan;
use sweep::ExpKernelWeights;

/// Fourier symbol `k -> -k^2 / (1 + lambda^2 k^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorSymbol {
    pub lambda: f64,
}

impl OperatorSymbol {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(NdsgError::Domain(format!("lambda must be finite and >= 0, got {lambda}")));
        }
        Ok(Self { lambda })
    }

    pub fn eval(&self, k: f64) -> f64 {
        let k2 = k * k;
        -k2 / (1.0 + self.lambda * self.lambda * k2)
    }

    /// Supremum of `|symbol|` over all real k; infinite in the local limit.
    pub fn max_amplification(&self) -> f64 {
        if self.lambda > 0.0 {
            1.0 / (self.lambda * self.lambda)
        } else {
            f64::INFINITY
        }
    }
}

/// How a sampled field continues outside its window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    /// The samples are one period; node `n` coincides with node `0`.
    Periodic,
    /// The field settles to constants at both ends. Successive differences in
    /// the first and last 5% of the window must stay below `tail_tol`.
    Decaying { tail_tol: f64 },
}

impl Boundary {
    pub fn is_periodic(&self) -> bool {
        matches!(self, Boundary::Periodic)
    }
}

/// Real samples on a uniform grid `x_i = left + i h`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    h: f64,
    left: f64,
    values: Vec<f64>,
    boundary: Boundary,
}

/// Largest successive difference in the edge zones (5% per side, at least one pair).
pub fn tail_variation(values: &[f64]) -> f64 {
    let n = values.len();
    let m = ((n as f64 * 0.05).ceil() as usize).max(2).min(n);
    let head = values[..m].windows(2).map(|w| (w[1] - w[0]).abs());
    let tail = values[n - m..].windows(2).map(|w| (w[1] - w[0]).abs());
    head.chain(tail).fold(0.0, f64::max)
}

impl SampledField {
    pub fn new(values: Vec<f64>, h: f64, left: f64, boundary: Boundary) -> Result<Self> {
        if values.len() < 4 {
            return Err(NdsgError::Grid(format!("need at least 4 nodes, got {}", values.len())));
        }
        if !(h > 0.0) || !h.is_finite() || !left.is_finite() {
            return Err(NdsgError::Grid(format!("bad spacing h={h} or left endpoint {left}")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(NdsgError::Grid("non-finite sample".into()));
        }
        if let Boundary::Decaying { tail_tol } = boundary {
            let var = tail_variation(&values);
            if var > tail_tol {
                return Err(NdsgError::Boundary(format!(
                    "tail variation {var:.3e} exceeds tolerance {tail_tol:.3e}"
                )));
            }
        }
        Ok(Self { h, left, values, boundary })
    }

    /// Sample `f` on `n` nodes starting at `left`.
    pub fn from_fn(n: usize, h: f64, left: f64, boundary: Boundary, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..n).map(|i| f(left + i as f64 * h)).collect();
        Self::new(values, h, left, boundary)
    }

    /// Same grid and boundary model, new samples. Outputs of the operators
    /// use this; the tail check applies to inputs only.
    fn with_values(&self, values: Vec<f64>) -> Self {
        Self { values, ..self.clone() }
    }

    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn left(&self) -> f64 {
        self.left
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
    pub fn boundary(&self) -> Boundary {
        self.boundary
    }
    pub fn x(&self, i: usize) -> f64 {
        self.left + i as f64 * self.h
    }
}

fn positive_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(NdsgError::Domain(format!(
            "lambda must be > 0 here (got {lambda}); use the local second-derivative path for lambda = 0"
        )))
    }
}

/// Multiply the discrete Fourier coefficients of a periodic field by the symbol.
pub fn apply_symbol_spectral(field: &SampledField, symbol: &OperatorSymbol) -> Result<SampledField> {
    if !field.boundary.is_periodic() {
        return Err(NdsgError::Boundary("spectral path requires a periodic field".into()));
    }
    let plan = SpectralPlan::new(field.len(), field.h);
    Ok(field.with_values(plan.apply(&field.values, |k| symbol.eval(k))))
}

/// `q = (1/2 lambda) ∫ exp(-|x - s| / lambda) f(s) ds` by recursive sweeps.
pub fn convolve_exponential(field: &SampledField, lambda: f64) -> Result<SampledField> {
    positive_lambda(lambda)?;
    let n = field.len();
    let w = ExpKernelWeights::new(field.h, lambda);
    let mut scratch = vec![0.0; n];
    let mut out = vec![0.0; n];
    if field.boundary.is_periodic() {
        sweep::convolve_periodic_into(&field.values, &w, &mut scratch, &mut out);
    } else {
        sweep::convolve_open_into(&field.values, &w, &mut scratch, &mut out);
    }
    Ok(field.with_values(out))
}

/// Solve `-lambda^2 q'' + q = f` under the field's boundary model.
pub fn helmholtz_solve(field: &SampledField, lambda: f64) -> Result<SampledField> {
    positive_lambda(lambda)?;
    let q = if field.boundary.is_periodic() {
        helmholtz::solve_periodic(&field.values, field.h, lambda)?
    } else {
        helmholtz::solve_dirichlet(&field.values, field.h, lambda)?
    };
    Ok(field.with_values(q))
}

/// Discretization used for the nonlocal term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NonlocalMethod {
    /// Spectral for periodic fields, sweep convolution otherwise.
    #[default]
    Auto,
    Spectral,
    Sweep,
    Helmholtz,
}

/// `L phi` with the default discretization for the field's boundary model.
pub fn apply_nonlocal_term(phi: &SampledField, lambda: f64) -> Result<SampledField> {
    apply_nonlocal_term_with(phi, lambda, NonlocalMethod::Auto)
}

pub fn apply_nonlocal_term_with(phi: &SampledField, lambda: f64, method: NonlocalMethod) -> Result<SampledField> {
    let mut op = NonlocalOperator::new(phi.len(), phi.h, lambda, phi.boundary.is_periodic(), method)?;
    let mut out = vec![0.0; phi.len()];
    op.apply_into(&phi.values, &mut out);
    Ok(phi.with_values(out))
}

enum Kernel {
    /// Local limit, `lambda = 0`.
    SecondDerivative,
    Spectral(SpectralPlan, f64),
    Sweep(ExpKernelWeights),
    Helmholtz(f64),
}

/// Preallocated nonlocal operator for repeated application on one grid.
pub struct NonlocalOperator {
    h: f64,
    periodic: bool,
    kernel: Kernel,
    slope: Vec<f64>,
    q: Vec<f64>,
    scratch: Vec<f64>,
}

impl std::fmt::Debug for NonlocalOperator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("NonlocalOperator")
            .field("n", &self.q.len())
            .field("h", &self.h)
            .field("periodic", &self.periodic)
            .finish()
    }
}

impl NonlocalOperator {
    pub fn new(n: usize, h: f64, lambda: f64, periodic: bool, method: NonlocalMethod) -> Result<Self> {
        if n < 4 || !(h > 0.0) {
            return Err(NdsgError::Grid(format!("need n >= 4 and h > 0 (n={n}, h={h})")));
        }
        OperatorSymbol::new(lambda)?;
        let kernel = match method {
            NonlocalMethod::Spectral | NonlocalMethod::Auto if periodic => {
                Kernel::Spectral(SpectralPlan::new(n, h), lambda)
            }
            NonlocalMethod::Spectral => {
                return Err(NdsgError::Boundary("spectral path requires a periodic field".into()))
            }
            _ if lambda == 0.0 => Kernel::SecondDerivative,
            NonlocalMethod::Auto | NonlocalMethod::Sweep => Kernel::Sweep(ExpKernelWeights::new(h, lambda)),
            NonlocalMethod::Helmholtz => Kernel::Helmholtz(lambda),
        };
        Ok(Self {
            h,
            periodic,
            kernel,
            slope: vec![0.0; n],
            q: vec![0.0; n],
            scratch: vec![0.0; n],
        })
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// Write `L phi` into `out`.
    pub fn apply_into(&mut self, phi: &[f64], out: &mut [f64]) {
        let (h, periodic) = (self.h, self.periodic);
        match &self.kernel {
            Kernel::SecondDerivative => stencil::second_derivative_into(phi, h, periodic, out),
            Kernel::Spectral(plan, lambda) => {
                let symbol = OperatorSymbol { lambda: *lambda };
                plan.apply_into(phi, |k| symbol.eval(k), out)
            }
            Kernel::Sweep(_) | Kernel::Helmholtz(_) => {
                self.convolved_slope(phi);
                stencil::first_derivative_into(&self.q, h, periodic, out);
            }
        }
    }

    /// `q = K phi_x` for the convolution-based kernels, and `phi_x` itself in
    /// the local limit. Returns `(phi_x, q)`.
    pub fn slope_and_q(&mut self, phi: &[f64]) -> (&[f64], &[f64]) {
        match &self.kernel {
            Kernel::SecondDerivative => {
                stencil::first_derivative_into(phi, self.h, self.periodic, &mut self.slope);
                self.q.copy_from_slice(&self.slope);
            }
            Kernel::Spectral(plan, lambda) => {
                let l2 = lambda * lambda;
                stencil::first_derivative_into(phi, self.h, true, &mut self.slope);
                plan.apply_into(&self.slope, |k| 1.0 / (1.0 + l2 * k * k), &mut self.q);
            }
            Kernel::Sweep(_) | Kernel::Helmholtz(_) => self.convolved_slope(phi),
        }
        (&self.slope, &self.q)
    }

    fn convolved_slope(&mut self, phi: &[f64]) {
        let (h, periodic) = (self.h, self.periodic);
        stencil::first_derivative_into(phi, h, periodic, &mut self.slope);
        match &self.kernel {
            Kernel::Sweep(w) => {
                if periodic {
                    sweep::convolve_periodic_into(&self.slope, w, &mut self.scratch, &mut self.q)
                } else {
                    sweep::convolve_open_into(&self.slope, w, &mut self.scratch, &mut self.q)
                }
            }
            Kernel::Helmholtz(lambda) => {
                let q = if periodic {
                    helmholtz::solve_periodic(&self.slope, h, *lambda)
                } else {
                    helmholtz::solve_dirichlet(&self.slope, h, *lambda)
                };
                self.q.copy_from_slice(&q.expect("grid validated at construction"));
            }
            _ => unreachable!(),
        }
    }
}
