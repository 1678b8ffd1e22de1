//! FFT application of real even Fourier multipliers on periodic grids.

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Reusable forward/inverse plans plus the grid wavenumbers.
pub struct SpectralPlan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
}

impl std::fmt::Debug for SpectralPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralPlan").field("n", &self.wavenumbers.len()).finish()
    }
}

/// Angular wavenumbers `2 pi j / (n h)` in FFT order.
pub fn grid_wavenumbers(n: usize, h: f64) -> Vec<f64> {
    let len = n as f64 * h;
    (0..n)
        .map(|j| {
            let js = if j <= n / 2 { j as isize } else { j as isize - n as isize };
            2.0 * PI * js as f64 / len
        })
        .collect()
}

impl SpectralPlan {
    pub fn new(n: usize, h: f64) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            wavenumbers: grid_wavenumbers(n, h),
        }
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    pub fn forward(&self, f: &[f64]) -> Vec<Complex<f64>> {
        let mut buf: Vec<Complex<f64>> = f.iter().map(|&x| Complex::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// `out = IFFT(symbol(k) * FFT(f))`.
    pub fn apply_into(&self, f: &[f64], symbol: impl Fn(f64) -> f64, out: &mut [f64]) {
        let n = f.len();
        let mut buf = self.forward(f);
        for (c, &k) in buf.iter_mut().zip(&self.wavenumbers) {
            *c *= symbol(k);
        }
        // The Nyquist mode of an even-length grid is its own mirror; keep it real.
        if n % 2 == 0 {
            buf[n / 2].im = 0.0;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / n as f64;
        for (o, c) in out.iter_mut().zip(&buf) {
            *o = c.re * scale;
        }
    }

    pub fn apply(&self, f: &[f64], symbol: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut out = vec![0.0; f.len()];
        self.apply_into(f, symbol, &mut out);
        out
    }
}
