//! Fourth-order finite-difference derivatives on a uniform grid.

/// First derivative. `periodic` wraps the stencil, otherwise one-sided
/// fourth-order stencils are used at the two outermost nodes on each side.
pub fn first_derivative_into(f: &[f64], h: f64, periodic: bool, out: &mut [f64]) {
    let n = f.len();
    debug_assert!(n >= 5 && out.len() == n);
    let inv = 1.0 / (12.0 * h);
    if periodic {
        for i in 0..n {
            let im2 = (i + n - 2) % n;
            let im1 = (i + n - 1) % n;
            let ip1 = (i + 1) % n;
            let ip2 = (i + 2) % n;
            out[i] = (f[im2] - 8.0 * f[im1] + 8.0 * f[ip1] - f[ip2]) * inv;
        }
        return;
    }
    for i in 2..n - 2 {
        out[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * inv;
    }
    out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * inv;
    out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * inv;
    let m = n - 1;
    out[m] = (25.0 * f[m] - 48.0 * f[m - 1] + 36.0 * f[m - 2] - 16.0 * f[m - 3] + 3.0 * f[m - 4]) * inv;
    out[m - 1] = (3.0 * f[m] + 10.0 * f[m - 1] - 18.0 * f[m - 2] + 6.0 * f[m - 3] - f[m - 4]) * inv;
}

/// Second derivative, same boundary conventions as [`first_derivative_into`].
pub fn second_derivative_into(f: &[f64], h: f64, periodic: bool, out: &mut [f64]) {
    let n = f.len();
    debug_assert!(n >= 6 && out.len() == n);
    let inv = 1.0 / (12.0 * h * h);
    if periodic {
        for i in 0..n {
            let im2 = (i + n - 2) % n;
            let im1 = (i + n - 1) % n;
            let ip1 = (i + 1) % n;
            let ip2 = (i + 2) % n;
            out[i] = (-f[im2] + 16.0 * f[im1] - 30.0 * f[i] + 16.0 * f[ip1] - f[ip2]) * inv;
        }
        return;
    }
    for i in 2..n - 2 {
        out[i] = (-f[i - 2] + 16.0 * f[i - 1] - 30.0 * f[i] + 16.0 * f[i + 1] - f[i + 2]) * inv;
    }
    out[0] = (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]) * inv;
    out[1] = (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]) * inv;
    let m = n - 1;
    out[m] = (45.0 * f[m] - 154.0 * f[m - 1] + 214.0 * f[m - 2] - 156.0 * f[m - 3] + 61.0 * f[m - 4]
        - 10.0 * f[m - 5])
        * inv;
    out[m - 1] = (10.0 * f[m] - 15.0 * f[m - 1] - 4.0 * f[m - 2] + 14.0 * f[m - 3] - 6.0 * f[m - 4]
        + f[m - 5])
        * inv;
}

pub fn first_derivative(f: &[f64], h: f64, periodic: bool) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    first_derivative_into(f, h, periodic, &mut out);
    out
}

pub fn second_derivative(f: &[f64], h: f64, periodic: bool) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    second_derivative_into(f, h, periodic, &mut out);
    out
}
