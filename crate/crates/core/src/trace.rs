//! Frequency-domain gain traces shared by both small-signal engines.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GainTrace {
    pub frequencies_hz: Vec<f64>,
    /// Complex signal amplitude gain √Gs.
    pub signal: Vec<Complex64>,
    /// Complex idler transgain √Gi, when the engine provides one.
    pub idler: Option<Vec<Complex64>>,
}

impl GainTrace {
    pub fn len(&self) -> usize {
        self.frequencies_hz.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies_hz.is_empty()
    }

    pub fn gain_db(&self) -> Vec<f64> {
        self.signal.iter().map(|s| crate::units::db20(s.norm())).collect()
    }

    pub fn phase_deg(&self) -> Vec<f64> {
        self.signal.iter().map(|s| s.arg().to_degrees()).collect()
    }

    pub fn idler_gain_db(&self) -> Option<Vec<f64>> {
        self.idler.as_ref().map(|v| v.iter().map(|s| crate::units::db20(s.norm())).collect())
    }
}

/// Uniform grid of `n` points from `f_start` to `f_stop` inclusive.
pub fn linear_grid(f_start: f64, f_stop: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidParameter { name: "n_points", reason: "need at least 2 points" });
    }
    if !(f_start < f_stop) || !f_start.is_finite() || !f_stop.is_finite() {
        return Err(Error::InvalidParameter { name: "frequency range", reason: "start must be below stop" });
    }
    let step = (f_stop - f_start) / (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { f_stop } else { f_start + step * i as f64 }).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BandMetrics {
    pub center_hz: f64,
    /// Width of the contiguous region around the peak within 3 dB of the design gain.
    pub bandwidth_hz: f64,
    /// Peak-to-peak gain variation where gain is within 1 dB of the design gain.
    pub ripple_db: f64,
    pub peak_db: f64,
}

pub fn band_metrics(trace: &GainTrace, design_gain_db: f64) -> Result<BandMetrics> {
    if trace.is_empty() {
        return Err(Error::InvalidParameter { name: "trace", reason: "empty" });
    }
    let g = trace.gain_db();
    let f = &trace.frequencies_hz;
    let (peak, peak_db) =
        g.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |a, (i, v)| if v > a.1 { (i, v) } else { a });
    let floor = design_gain_db - 3.0;
    if !(peak_db >= floor) {
        return Err(Error::NoBand { level_db: floor });
    }
    let (lo, hi) = contiguous(&g, peak, floor);
    let f_lo = crossing(f, &g, lo, floor, false);
    let f_hi = crossing(f, &g, hi, floor, true);

    let ripple_floor = design_gain_db - 1.0;
    let in_ripple: Vec<f64> = g[lo..=hi].iter().copied().filter(|&v| v >= ripple_floor).collect();
    let ripple_db = if in_ripple.is_empty() {
        0.0
    } else {
        in_ripple.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - in_ripple.iter().copied().fold(f64::INFINITY, f64::min)
    };
    Ok(BandMetrics { center_hz: 0.5 * (f_lo + f_hi), bandwidth_hz: f_hi - f_lo, ripple_db, peak_db })
}

pub(crate) fn contiguous(g: &[f64], seed: usize, floor: f64) -> (usize, usize) {
    let mut lo = seed;
    while lo > 0 && g[lo - 1] >= floor {
        lo -= 1;
    }
    let mut hi = seed;
    while hi + 1 < g.len() && g[hi + 1] >= floor {
        hi += 1;
    }
    (lo, hi)
}

// Edge frequency, linearly interpolated to the level crossing when the
// neighbouring sample lies below it.
fn crossing(f: &[f64], g: &[f64], edge: usize, level: f64, upper: bool) -> f64 {
    let out = if upper { edge + 1 } else { edge.wrapping_sub(1) };
    if out >= g.len() {
        return f[edge];
    }
    let t = (g[edge] - level) / (g[edge] - g[out]);
    f[edge] + t * (f[out] - f[edge])
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn trace_from_db(f: Vec<f64>, db: &[f64]) -> GainTrace {
        GainTrace {
            frequencies_hz: f,
            signal: db.iter().map(|d| Complex64::new(libm::pow(10.0, d / 20.0), 0.0)).collect(),
            idler: None,
        }
    }

    #[test]
    fn flat_trace_has_no_band() {
        let t = trace_from_db(vec![1.0, 2.0, 3.0], &[0.0, 0.0, 0.0]);
        assert_eq!(band_metrics(&t, 20.0), Err(Error::NoBand { level_db: 17.0 }));
    }

    #[test]
    fn triangle_band() {
        let f: Vec<f64> = (0..=10).map(|i| i as f64).collect();
        let db = [10.0, 12.0, 14.0, 16.0, 18.0, 20.0, 18.0, 16.0, 14.0, 12.0, 10.0];
        let m = band_metrics(&trace_from_db(f, &db), 20.0).unwrap();
        // 17 dB is crossed at 3.5 and 6.5
        assert!((m.bandwidth_hz - 3.0).abs() < 1e-9);
        assert!((m.center_hz - 5.0).abs() < 1e-9);
        assert!(m.ripple_db.abs() < 1e-9);
    }

    #[test]
    fn grid_endpoints() {
        let g = linear_grid(1.0, 2.0, 2).unwrap();
        assert_eq!(g, vec![1.0, 2.0]);
        assert!(linear_grid(1.0, 2.0, 1).is_err());
        assert!(linear_grid(2.0, 1.0, 5).is_err());
    }
}
