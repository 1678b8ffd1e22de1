use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::state::FieldState;
use crate::error::{NdsgError, Result};

/// Default number of records spanned by the smoothed velocity.
pub const DEFAULT_SMOOTHING: usize = 5;

/// Every interpolated crossing `phi = pi` in `phi`, as grid coordinates.
pub fn crossings(phi: &[f64], zeta_min: f64, h: f64) -> Vec<f64> {
    phi.windows(2)
        .enumerate()
        .filter_map(|(i, w)| {
            let (a, b) = (w[0] - PI, w[1] - PI);
            if a == 0.0 {
                Some(zeta_min + i as f64 * h)
            } else if a * b < 0.0 {
                Some(zeta_min + (i as f64 + a / (a - b)) * h)
            } else {
                None
            }
        })
        .collect()
}

/// Follows the kink centre from record to record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontTracker {
    last: f64,
    /// Largest admissible jump between consecutive records.
    pub neighborhood: f64,
}

impl FrontTracker {
    pub fn new(start: f64, neighborhood: f64) -> Self {
        Self { last: start, neighborhood }
    }

    /// Crossing nearest the previous position.
    pub fn locate(&mut self, state: &FieldState) -> Result<f64> {
        let found = crossings(&state.phi, state.grid.zeta_min, state.grid.h)
            .into_iter()
            .min_by(|a, b| (a - self.last).abs().total_cmp(&(b - self.last).abs()));
        match found {
            Some(z) if (z - self.last).abs() <= self.neighborhood => {
                self.last = z;
                Ok(z)
            }
            _ => Err(NdsgError::LostFront { tau: state.tau }),
        }
    }
}

/// Front positions with raw and smoothed velocity estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontTrace {
    pub tau: Vec<f64>,
    pub position: Vec<f64>,
    /// Centred difference of neighbouring records.
    pub v_raw: Vec<f64>,
    /// Centred difference across `window` records.
    pub v_smooth: Vec<f64>,
    pub window: usize,
}

fn centred(tau: &[f64], z: &[f64], half: usize) -> Vec<f64> {
    let n = tau.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            if hi == lo {
                f64::NAN
            } else {
                (z[hi] - z[lo]) / (tau[hi] - tau[lo])
            }
        })
        .collect()
}

impl FrontTrace {
    pub fn from_positions(tau: Vec<f64>, position: Vec<f64>, window: usize) -> Self {
        let v_raw = centred(&tau, &position, 1);
        let v_smooth = centred(&tau, &position, (window.max(2)) / 2);
        Self { tau, position, v_raw, v_smooth, window }
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    /// Indices with `tau >= from`.
    fn after(&self, from: f64) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.tau[i] >= from)
    }

    /// Mean and standard deviation of the smoothed velocity over the last
    /// `fraction` of the run.
    pub fn terminal_velocity(&self, fraction: f64) -> Option<(f64, f64)> {
        let (&t0, &t1) = (self.tau.first()?, self.tau.last()?);
        let vs: Vec<f64> = self.after(t1 - fraction * (t1 - t0)).map(|i| self.v_smooth[i]).filter(|v| v.is_finite()).collect();
        if vs.is_empty() {
            return None;
        }
        let m = vs.iter().sum::<f64>() / vs.len() as f64;
        let var = vs.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / vs.len() as f64;
        Some((m, var.sqrt()))
    }

    /// `max |v - vbar| / vbar` for `tau >= from`, where `vbar` is the running
    /// mean of the smoothed velocity over `span` time units.
    pub fn oscillation(&self, from: f64, span: f64) -> f64 {
        let idx: Vec<usize> = self.after(from).collect();
        let mut worst: f64 = 0.0;
        for &i in &idx {
            let around: Vec<f64> = idx
                .iter()
                .filter(|&&j| (self.tau[j] - self.tau[i]).abs() <= 0.5 * span)
                .map(|&j| self.v_smooth[j])
                .collect();
            let mean = around.iter().sum::<f64>() / around.len() as f64;
            if mean != 0.0 {
                worst = worst.max((self.v_smooth[i] - mean).abs() / mean.abs());
            }
        }
        worst
    }

    /// Largest rise of the smoothed velocity above its running minimum for
    /// `tau >= from`; zero for a monotonically decreasing trace.
    pub fn max_rise(&self, from: f64) -> f64 {
        let mut low = f64::INFINITY;
        let mut rise: f64 = 0.0;
        for i in self.after(from) {
            let v = self.v_smooth[i];
            low = low.min(v);
            rise = rise.max(v - low);
        }
        rise
    }
}

/// Track the front through a sequence of states, starting near `start`.
pub fn track_front(states: &[FieldState], start: f64, neighborhood: f64, window: usize) -> Result<FrontTrace> {
    let mut tracker = FrontTracker::new(start, neighborhood);
    let mut tau = Vec::with_capacity(states.len());
    let mut pos = Vec::with_capacity(states.len());
    for s in states {
        pos.push(tracker.locate(s)?);
        tau.push(s.tau);
    }
    Ok(FrontTrace::from_positions(tau, pos, window))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_crossing() {
        let phi = [0.0, 2.0, 4.0, 6.0];
        let c = crossings(&phi, 10.0, 0.5);
        assert_eq!(c.len(), 1);
        assert!((c[0] - (10.5 + 0.5 * (PI - 2.0) / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn terminal_statistics() {
        let tau: Vec<f64> = (0..101).map(|i| i as f64).collect();
        let z: Vec<f64> = tau.iter().map(|t| 0.3 * t).collect();
        let tr = FrontTrace::from_positions(tau, z, 5);
        let (m, s) = tr.terminal_velocity(0.1).unwrap();
        assert!((m - 0.3).abs() < 1e-12 && s < 1e-12);
        assert!(tr.max_rise(0.0) < 1e-12);
    }
}
