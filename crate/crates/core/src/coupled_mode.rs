//! Coupled-mode equations of motion for a chain of resonators with a
//! degenerate parametric pump on the innermost mode.
//!
//! Basis ordering is (N, N−1, …, 1, 1*, …, N*): mode N couples to the
//! environment, mode 1 carries the pump. The conjugate block is the equation
//! of motion of each mode's idler at 2ω0 − ω, written so that both blocks use
//! the same detuning Δ_k(ω); this is what makes |√Gs|² − |√Gi|² = 1 hold.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::consts::PI;
use crate::linalg::ComplexMatrix;
use crate::prototype::ReducedCouplings;
use crate::trace::{linear_grid, GainTrace};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModeGraph {
    pub omega0: f64,
    pub couplings: ReducedCouplings,
}

impl ModeGraph {
    pub fn new(omega0: f64, couplings: ReducedCouplings) -> Result<Self> {
        let finite =
            couplings.chain.iter().all(|b| b.is_finite()) && couplings.beta_p.is_finite() && couplings.gamma0 > 0.0;
        if !(omega0 > 0.0) || !finite {
            return Err(Error::InvalidParameter {
                name: "mode graph",
                reason: "omega0 and gamma0 must be positive with finite couplings",
            });
        }
        Ok(Self { omega0, couplings })
    }

    pub fn order(&self) -> usize {
        self.couplings.order()
    }

    pub fn with_beta_p(&self, beta_p: f64) -> Self {
        let mut g = self.clone();
        g.couplings.beta_p = beta_p;
        g
    }

    /// Normalised detuning of mode `k` (1-based).
    pub fn detuning(&self, k: usize, omega: f64) -> Complex64 {
        let d = (omega - self.omega0) / self.couplings.gamma0;
        if k == self.order() {
            Complex64::new(d, 0.5)
        } else {
            Complex64::new(d, 0.0)
        }
    }

    /// Matrix index of signal mode `k`.
    pub fn signal_index(&self, k: usize) -> usize {
        self.order() - k
    }

    /// Matrix index of conjugate mode `k`.
    pub fn conjugate_index(&self, k: usize) -> usize {
        self.order() + k - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoupledModeMatrix {
    pub m: ComplexMatrix,
}

impl CoupledModeMatrix {
    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.m[(i, j)]
    }
}

pub fn build_matrix(graph: &ModeGraph, omega: f64) -> CoupledModeMatrix {
    let n = graph.order();
    let mut m = ComplexMatrix::zeros(2 * n);
    let c = &graph.couplings;
    for k in 1..=n {
        let d = graph.detuning(k, omega);
        m[(graph.signal_index(k), graph.signal_index(k))] = d;
        m[(graph.conjugate_index(k), graph.conjugate_index(k))] = d;
    }
    for k in 1..n {
        let b = c.beta(k);
        let (s0, s1) = (graph.signal_index(k), graph.signal_index(k + 1));
        m[(s0, s1)] = Complex64::new(b, 0.0);
        m[(s1, s0)] = Complex64::new(b, 0.0);
        let (c0, c1) = (graph.conjugate_index(k), graph.conjugate_index(k + 1));
        m[(c0, c1)] = Complex64::new(-b, 0.0);
        m[(c1, c0)] = Complex64::new(-b, 0.0);
    }
    let bp = Complex64::new(c.beta_p, 0.0);
    m[(graph.signal_index(1), graph.conjugate_index(1))] = bp;
    m[(graph.conjugate_index(1), graph.signal_index(1))] = -bp.conj();
    CoupledModeMatrix { m }
}

/// Signal gain and idler transgain from the port-row corner of M⁻¹.
pub fn solve_gains(m: &CoupledModeMatrix) -> Result<(Complex64, Complex64)> {
    let col = m.m.lu()?.inverse_column(0);
    let i = Complex64::new(0.0, 1.0);
    Ok((i * col[0] - 1.0, i * col[m.dim() - 1]))
}

pub fn gains_at(graph: &ModeGraph, omega: f64) -> Result<(Complex64, Complex64)> {
    solve_gains(&build_matrix(graph, omega)).map_err(|e| match e {
        Error::Singular => Error::ThresholdAt { freq_hz: omega / (2.0 * PI) },
        other => other,
    })
}

pub fn sweep(graph: &ModeGraph, f_start: f64, f_stop: f64, n_points: usize) -> Result<GainTrace> {
    let f = linear_grid(f_start, f_stop, n_points)?;
    let mut signal = Vec::with_capacity(f.len());
    let mut idler = Vec::with_capacity(f.len());
    for &fi in &f {
        let (s, i) = gains_at(graph, 2.0 * PI * fi)?;
        signal.push(s);
        idler.push(i);
    }
    Ok(GainTrace { frequencies_hz: f, signal, idler: Some(idler) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::prototype::reduced_couplings;
    use crate::trace::band_metrics;
    use alloc::vec;

    fn paper_graph() -> ModeGraph {
        let band = fixtures::band();
        ModeGraph::new(band.omega0(), reduced_couplings(&fixtures::prototype(), &band).unwrap()).unwrap()
    }

    fn single_pole(beta_p: f64) -> ModeGraph {
        ModeGraph::new(2.0 * PI * 5e9, ReducedCouplings { gamma0: 2.0 * PI * 0.5e9, chain: vec![], beta_p }).unwrap()
    }

    #[test]
    fn matrix_layout_at_center() {
        let g = paper_graph();
        let m = build_matrix(&g, g.omega0);
        assert_eq!(m.get(0, 0), Complex64::new(0.0, 0.5));
        assert_eq!(m.get(1, 1), Complex64::new(0.0, 0.0));
        assert_eq!(m.get(2, 2), Complex64::new(0.0, 0.0));
        assert!((m.get(0, 1).re - 0.339).abs() < 5e-4);
        assert!((m.get(2, 3).re - 0.288).abs() < 5e-4);
        assert_eq!(m.get(3, 2), -m.get(2, 3));
        // index reflection at ω0
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(m.get(i, j), -m.get(5 - i, 5 - j).conj());
            }
        }
    }

    #[test]
    fn mirrored_symmetry_off_center() {
        let g = paper_graph();
        let d = 0.07 * g.omega0;
        let a = build_matrix(&g, g.omega0 + d);
        let b = build_matrix(&g, g.omega0 - d);
        for i in 0..6 {
            for j in 0..6 {
                assert!((a.get(i, j) + b.get(5 - i, 5 - j).conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn unpumped_blocks_decouple() {
        let g = paper_graph().with_beta_p(0.0);
        let m = build_matrix(&g, 1.1 * g.omega0);
        for i in 0..3 {
            for j in 3..6 {
                assert_eq!(m.get(i, j), Complex64::new(0.0, 0.0));
                assert_eq!(m.get(j, i), Complex64::new(0.0, 0.0));
            }
        }
        let t = sweep(&g, 4.4e9, 5.4e9, 51).unwrap();
        assert!(t.gain_db().iter().all(|d| d.abs() < 1e-12));
    }

    #[test]
    fn single_pole_center_gain() {
        let g = single_pole(0.3);
        let (s, _) = gains_at(&g, g.omega0).unwrap();
        assert!((s.re - 2.125).abs() < 1e-12 && s.im.abs() < 1e-12);
        assert!((crate::units::db20(s.norm()) - 6.55).abs() < 5e-3);
    }

    #[test]
    fn single_pole_threshold() {
        let g = single_pole(0.5);
        assert!(matches!(gains_at(&g, g.omega0), Err(Error::ThresholdAt { .. })));
    }

    #[test]
    fn design_center_gain() {
        let g = paper_graph();
        let (s, _) = gains_at(&g, g.omega0).unwrap();
        assert!((crate::units::db20(s.norm()) - 20.0).abs() < 0.5);
    }

    #[test]
    fn design_sweep_ripple() {
        let t = sweep(&paper_graph(), 4.4e9, 5.4e9, 1001).unwrap();
        let m = band_metrics(&t, 20.0).unwrap();
        assert!(m.ripple_db <= 1.0);
        assert!((m.center_hz - 4.9e9).abs() < 5e6);
        assert!((m.bandwidth_hz - 660e6).abs() < 0.2 * 660e6);
        assert_eq!(sweep(&paper_graph(), 4.4e9, 5.4e9, 2).unwrap().len(), 2);
    }
}
