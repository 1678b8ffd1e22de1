//! Compact fourth-order discretization of `-lambda^2 q'' + q = f`.
//!
//! With `D` the three-point second difference, the scheme is
//! `-lambda^2 D q / h^2 + (1 + D/12) q = (1 + D/12) f`, a symmetric
//! diagonally dominant tridiagonal system.

use crate::error::{NdsgError, Result};

fn coefficients(h: f64, lambda: f64) -> (f64, f64) {
    let r = lambda * lambda / (h * h);
    let off = -r + 1.0 / 12.0;
    let diag = 2.0 * r + 10.0 / 12.0;
    (off, diag)
}

/// Constant-coefficient tridiagonal solve (Thomas algorithm).
fn thomas(off: f64, diag: &[f64], rhs: &mut [f64]) {
    let n = rhs.len();
    let mut c = vec![0.0; n];
    c[0] = off / diag[0];
    rhs[0] /= diag[0];
    for i in 1..n {
        let m = diag[i] - off * c[i - 1];
        c[i] = off / m;
        rhs[i] = (rhs[i] - off * rhs[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
}

/// Dirichlet problem with `q = f` at both end nodes.
pub fn solve_dirichlet(f: &[f64], h: f64, lambda: f64) -> Result<Vec<f64>> {
    let n = f.len();
    if n < 4 || !(h > 0.0) || !(lambda > 0.0) {
        return Err(NdsgError::Grid(format!("helmholtz solve needs n >= 4, h > 0, lambda > 0 (n={n})")));
    }
    let (off, diag) = coefficients(h, lambda);
    let m = n - 2;
    let mut rhs: Vec<f64> = (1..n - 1)
        .map(|i| (f[i - 1] + 10.0 * f[i] + f[i + 1]) / 12.0)
        .collect();
    rhs[0] -= off * f[0];
    rhs[m - 1] -= off * f[n - 1];
    thomas(off, &vec![diag; m], &mut rhs);
    let mut q = Vec::with_capacity(n);
    q.push(f[0]);
    q.extend_from_slice(&rhs);
    q.push(f[n - 1]);
    Ok(q)
}

/// Periodic problem, cyclic tridiagonal system via Sherman-Morrison.
pub fn solve_periodic(f: &[f64], h: f64, lambda: f64) -> Result<Vec<f64>> {
    let n = f.len();
    if n < 4 || !(h > 0.0) || !(lambda > 0.0) {
        return Err(NdsgError::Grid(format!("helmholtz solve needs n >= 4, h > 0, lambda > 0 (n={n})")));
    }
    let (off, diag) = coefficients(h, lambda);
    let mut rhs: Vec<f64> = (0..n)
        .map(|i| (f[(i + n - 1) % n] + 10.0 * f[i] + f[(i + 1) % n]) / 12.0)
        .collect();
    // A = T + u u^T with u = (gamma, 0, ..., 0, off) scaled as usual.
    let gamma = -diag;
    let mut d = vec![diag; n];
    d[0] -= gamma;
    d[n - 1] -= off * off / gamma;
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = off;
    thomas(off, &d, &mut rhs);
    thomas(off, &d, &mut u);
    let vy = rhs[0] + off / gamma * rhs[n - 1];
    let vz = u[0] + off / gamma * u[n - 1];
    let fac = vy / (1.0 + vz);
    Ok(rhs.iter().zip(&u).map(|(y, z)| y - fac * z).collect())
}
