//! O(N) evaluation of `q(x) = (1/2 lambda) ∫ exp(-|x - s| / lambda) f(s) ds`
//! by two exponentially decaying recursive sweeps.
//!
//! Each update integrates the kernel exactly against the local cubic
//! interpolant of `f`, so the sweep is fourth-order accurate in `h` and
//! unconditionally stable for any `h / lambda`.

/// Per-interval weights for the three cubic stencil placements.
#[derive(Debug, Clone)]
pub struct ExpKernelWeights {
    /// `exp(-h / lambda)`.
    pub decay: f64,
    /// Nodes at offsets -1, 0, 1, 2 relative to the interval start.
    pub centered: [f64; 4],
    /// Nodes at offsets 0, 1, 2, 3 (first interval of the grid).
    pub left_edge: [f64; 4],
    /// Nodes at offsets -2, -1, 0, 1 (last interval of the grid).
    pub right_edge: [f64; 4],
}

/// `I_k = ∫_0^1 exp(-a (1 - t)) t^k dt` for `k = 0..=3`.
fn exp_moments(a: f64) -> [f64; 4] {
    let mut m = [0.0; 4];
    if a < 2.0 {
        // exp(-a) * sum_j a^j / j! / (k + j + 1)
        let ea = (-a).exp();
        for (k, mk) in m.iter_mut().enumerate() {
            let mut term = 1.0;
            let mut sum = 0.0;
            for j in 0..60 {
                let add = term / (k + j + 1) as f64;
                sum += add;
                if add.abs() < 1e-18 * sum.abs() {
                    break;
                }
                term *= a / (j + 1) as f64;
            }
            *mk = ea * sum;
        }
    } else {
        m[0] = -(-a).exp_m1() / a;
        for k in 1..4 {
            m[k] = (1.0 - k as f64 * m[k - 1]) / a;
        }
    }
    m
}

/// Monomial coefficients of the Lagrange basis through four integer nodes.
fn lagrange_monomials(nodes: [f64; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for m in 0..4 {
        // Multiply out prod_{j != m} (t - t_j) / (t_m - t_j).
        let mut poly = [1.0, 0.0, 0.0, 0.0];
        let mut deg = 0;
        let mut denom = 1.0;
        for j in 0..4 {
            if j == m {
                continue;
            }
            let mut next = [0.0; 4];
            for d in 0..=deg {
                next[d + 1] += poly[d];
                next[d] -= nodes[j] * poly[d];
            }
            poly = next;
            deg += 1;
            denom *= nodes[m] - nodes[j];
        }
        for d in 0..4 {
            out[m][d] = poly[d] / denom;
        }
    }
    out
}

fn weights_for(nodes: [f64; 4], a: f64, moments: &[f64; 4]) -> [f64; 4] {
    let basis = lagrange_monomials(nodes);
    let mut w = [0.0; 4];
    for m in 0..4 {
        w[m] = 0.5 * a * (0..4).map(|k| basis[m][k] * moments[k]).sum::<f64>();
    }
    w
}

impl ExpKernelWeights {
    pub fn new(h: f64, lambda: f64) -> Self {
        let a = h / lambda;
        let moments = exp_moments(a);
        Self {
            decay: (-a).exp(),
            centered: weights_for([-1.0, 0.0, 1.0, 2.0], a, &moments),
            left_edge: weights_for([0.0, 1.0, 2.0, 3.0], a, &moments),
            right_edge: weights_for([-2.0, -1.0, 0.0, 1.0], a, &moments),
        }
    }
}

/// Open-domain convolution: `f` is continued by its end values outside the grid.
pub fn convolve_open_into(f: &[f64], w: &ExpKernelWeights, left: &mut [f64], out: &mut [f64]) {
    let n = f.len();
    debug_assert!(n >= 4 && out.len() == n && left.len() == n);
    let e = w.decay;
    let c = &w.centered;

    // Left-to-right: contribution of s < x_i; interval [x_{i-1}, x_i].
    left[0] = 0.5 * f[0];
    for i in 1..n {
        let inc = if i >= 2 && i + 1 < n {
            c[0] * f[i - 2] + c[1] * f[i - 1] + c[2] * f[i] + c[3] * f[i + 1]
        } else if i < 2 {
            let l = &w.left_edge;
            l[0] * f[i - 1] + l[1] * f[i] + l[2] * f[i + 1] + l[3] * f[i + 2]
        } else {
            let r = &w.right_edge;
            r[0] * f[i - 3] + r[1] * f[i - 2] + r[2] * f[i - 1] + r[3] * f[i]
        };
        left[i] = e * left[i - 1] + inc;
    }

    // Right-to-left, mirrored stencils; interval [x_i, x_{i+1}].
    let mut acc = 0.5 * f[n - 1];
    out[n - 1] = left[n - 1] + acc;
    for i in (0..n - 1).rev() {
        let inc = if i >= 1 && i + 2 < n {
            c[0] * f[i + 2] + c[1] * f[i + 1] + c[2] * f[i] + c[3] * f[i - 1]
        } else if i + 2 >= n {
            let l = &w.left_edge;
            l[0] * f[i + 1] + l[1] * f[i] + l[2] * f[i - 1] + l[3] * f[i - 2]
        } else {
            let r = &w.right_edge;
            r[0] * f[i + 3] + r[1] * f[i + 2] + r[2] * f[i + 1] + r[3] * f[i]
        };
        acc = e * acc + inc;
        out[i] = left[i] + acc;
    }
}

/// Periodic convolution with period `n * h`.
pub fn convolve_periodic_into(f: &[f64], w: &ExpKernelWeights, left: &mut [f64], out: &mut [f64]) {
    let n = f.len();
    debug_assert!(n >= 4 && out.len() == n && left.len() == n);
    let e = w.decay;
    let c = &w.centered;
    let at = |i: isize| f[i.rem_euclid(n as isize) as usize];
    let inc_left = |i: isize| c[0] * at(i - 2) + c[1] * at(i - 1) + c[2] * at(i) + c[3] * at(i + 1);
    let inc_right = |i: isize| c[0] * at(i + 2) + c[1] * at(i + 1) + c[2] * at(i) + c[3] * at(i - 1);
    let wrap = 1.0 / (1.0 - e.powi(n as i32));

    // One full period from zero state gives the fixed point at node 0.
    let mut s = 0.0;
    for i in 1..=n as isize {
        s = e * s + inc_left(i);
    }
    left[0] = s * wrap;
    for i in 1..n {
        left[i] = e * left[i - 1] + inc_left(i as isize);
    }

    let mut s = 0.0;
    for i in (0..n as isize).rev() {
        s = e * s + inc_right(i - 1);
    }
    // s is the right-sweep value at node n-1 after one period.
    let mut acc = s * wrap;
    out[n - 1] = left[n - 1] + acc;
    for i in (0..n - 1).rev() {
        acc = e * acc + inc_right(i as isize);
        out[i] = left[i] + acc;
    }
}
