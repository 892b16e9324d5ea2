//! Filter prototypes, band definitions and the reduced coupling rates derived
//! from them.

use alloc::vec::Vec;

use crate::consts::PI;
use crate::{Error, Result};

/// Ladder coefficients g0..g_{N+1} plus the response they were designed for.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChebyshevPrototype {
    order: usize,
    g: Vec<f64>,
    design_gain_db: f64,
    ripple_db: f64,
}

impl ChebyshevPrototype {
    pub fn new(order: usize, g: Vec<f64>, design_gain_db: f64, ripple_db: f64) -> Result<Self> {
        validate_prototype(Self { order, g, design_gain_db, ripple_db })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// All coefficients, g0 first.
    pub fn coefficients(&self) -> &[f64] {
        &self.g
    }

    pub fn g(&self, k: usize) -> f64 {
        self.g[k]
    }

    pub fn design_gain_db(&self) -> f64 {
        self.design_gain_db
    }

    pub fn ripple_db(&self) -> f64 {
        self.ripple_db
    }

    /// Linear power gain corresponding to `design_gain_db`.
    pub fn design_gain(&self) -> f64 {
        crate::units::from_db10(self.design_gain_db)
    }
}

/// Checks a prototype for a matching length and strictly positive ladder.
pub fn validate_prototype(p: ChebyshevPrototype) -> Result<ChebyshevPrototype> {
    if p.order == 0 {
        return Err(Error::InvalidParameter { name: "order", reason: "must be at least 1" });
    }
    if p.g.len() != p.order + 2 {
        return Err(Error::PrototypeLength { order: p.order, len: p.g.len(), expected: p.order + 2 });
    }
    if let Some((index, &value)) = p.g.iter().enumerate().find(|(_, &g)| !(g > 0.0) || !g.is_finite()) {
        return Err(Error::NonPositiveCoefficient { index, value });
    }
    Ok(p)
}

/// Centre frequency and fractional bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BandSpec {
    f0_hz: f64,
    fractional_bandwidth: f64,
}

impl BandSpec {
    /// `w = 0` is accepted so that degenerate zero-bandwidth designs can be
    /// evaluated; downstream operations that need a finite band reject it.
    pub fn new(f0_hz: f64, fractional_bandwidth: f64) -> Result<Self> {
        if !(f0_hz > 0.0) || !f0_hz.is_finite() {
            return Err(Error::InvalidParameter { name: "f0", reason: "must be positive" });
        }
        if !(0.0..1.0).contains(&fractional_bandwidth) {
            return Err(Error::InvalidParameter { name: "fractional_bandwidth", reason: "must lie in [0, 1)" });
        }
        Ok(Self { f0_hz, fractional_bandwidth })
    }

    pub fn f0_hz(&self) -> f64 {
        self.f0_hz
    }

    pub fn w(&self) -> f64 {
        self.fractional_bandwidth
    }

    pub fn omega0(&self) -> f64 {
        2.0 * PI * self.f0_hz
    }

    pub fn delta_omega(&self) -> f64 {
        self.fractional_bandwidth * self.omega0()
    }
}

/// Output decay rate and dimensionless couplings normalised to it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReducedCouplings {
    /// Decay rate γ0 of the mode coupled to the environment, rad/s.
    pub gamma0: f64,
    /// Passive couplings β_{k,k+1} for k = 1..N−1.
    pub chain: Vec<f64>,
    pub beta_p: f64,
}

impl ReducedCouplings {
    pub fn order(&self) -> usize {
        self.chain.len() + 1
    }

    /// β_{k,k+1}, with `k` counted from the nonlinear mode (k = 1).
    pub fn beta(&self, k: usize) -> f64 {
        self.chain[k - 1]
    }

    pub fn beta12(&self) -> f64 {
        self.beta(1)
    }

    pub fn beta23(&self) -> f64 {
        self.beta(2)
    }
}

pub fn reduced_couplings(p: &ChebyshevPrototype, band: &BandSpec) -> Result<ReducedCouplings> {
    let n = p.order();
    let dw = band.delta_omega();
    if !(dw > 0.0) {
        return Err(Error::InvalidParameter {
            name: "fractional_bandwidth",
            reason: "must be positive for a finite decay rate",
        });
    }
    let gamma0 = dw / (p.g(n) * p.g(n + 1));
    let chain = (1..n).map(|k| dw / (2.0 * gamma0 * libm::sqrt(p.g(k) * p.g(k + 1)))).collect();
    let beta_p = 0.5 * p.g(n) * p.g(n + 1) / (p.g(0) * p.g(1));
    Ok(ReducedCouplings { gamma0, chain, beta_p })
}

/// Parametric inverter from the prototype ladder.
pub fn jpa_prototype(p: &ChebyshevPrototype, w: f64, z1: f64) -> Result<f64> {
    check_z1(z1)?;
    let n = p.order();
    let gl = p.g(n + 1);
    let tail = if n.is_multiple_of(2) { gl } else { 1.0 / gl };
    Ok(w / (z1 * p.g(1) * libm::sqrt(p.g(0))) * libm::sqrt(tail))
}

/// Parametric inverter from a target linear power gain `gain > 1`.
pub fn jpa_from_gain(gain: f64, w: f64, g1: f64, z1: f64) -> Result<f64> {
    check_z1(z1)?;
    if !(gain > 1.0) {
        return Err(Error::InvalidParameter { name: "gain", reason: "must exceed 1" });
    }
    let s = libm::sqrt(gain) + libm::sqrt(gain - 1.0);
    Ok(w / (z1 * g1) * libm::sqrt((s + 1.0) / (s - 1.0)))
}

/// The inverter that reproduces the reduced pump coupling βp of the
/// coupled-mode model: J = 2βpγ0/(ω0 Z1).
pub fn jpa_from_couplings(c: &ReducedCouplings, omega0: f64, z1: f64) -> Result<f64> {
    check_z1(z1)?;
    Ok(2.0 * c.beta_p * c.gamma0 / (omega0 * z1))
}

fn check_z1(z1: f64) -> Result<()> {
    if z1 > 0.0 && z1.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "Z1", reason: "must be positive" })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use alloc::vec;

    #[test]
    fn validation() {
        assert!(ChebyshevPrototype::new(3, vec![1.0; 5], 20.0, 0.5).is_ok());
        assert_eq!(
            ChebyshevPrototype::new(3, vec![1.0, 0.5, -0.1, 0.4, 0.9], 20.0, 0.5),
            Err(Error::NonPositiveCoefficient { index: 2, value: -0.1 })
        );
        assert!(matches!(
            ChebyshevPrototype::new(3, vec![1.0; 4], 20.0, 0.5),
            Err(Error::PrototypeLength { expected: 5, .. })
        ));
    }

    #[test]
    fn paper_couplings() {
        let c = reduced_couplings(&fixtures::prototype(), &fixtures::band()).unwrap();
        assert!((c.gamma0 / (2.0 * PI) / 1e9 - 1.9487).abs() < 1e-3);
        assert!((c.beta23() - 0.338_959).abs() < 1e-5);
        assert!((c.beta12() - 0.270_363).abs() < 1e-5);
        assert!((c.beta_p - 0.287_726).abs() < 1e-5);
    }

    #[test]
    fn unit_ladder() {
        let p = ChebyshevPrototype::new(3, vec![1.0; 5], 20.0, 0.5).unwrap();
        let band = BandSpec::new(5e9, 0.1).unwrap();
        let c = reduced_couplings(&p, &band).unwrap();
        assert!((c.gamma0 - band.delta_omega()).abs() < 1e-3);
        for b in [c.beta12(), c.beta23(), c.beta_p] {
            assert!((b - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn half_bandwidth_halves() {
        let p = fixtures::prototype();
        let full = reduced_couplings(&p, &BandSpec::new(4.9e9, 0.135).unwrap()).unwrap();
        let half = reduced_couplings(&p, &BandSpec::new(4.9e9, 0.0675).unwrap()).unwrap();
        assert!((half.gamma0 / full.gamma0 - 0.5).abs() < 1e-14);
        // the β are ratios of Δω to γ0 and are bandwidth independent
        assert!((half.beta12() - full.beta12()).abs() < 1e-14);
        assert!((half.beta_p - full.beta_p).abs() < 1e-14);
    }

    #[test]
    fn jpa_forms() {
        let p = fixtures::prototype();
        let a = jpa_prototype(&p, 0.135, 4.42).unwrap();
        let b = jpa_from_gain(100.0, 0.135, p.g(1), 4.42).unwrap();
        assert!((a - 0.05444).abs() < 5e-6);
        assert!((b - 0.05444).abs() < 5e-6);
        assert!(((a - b) / a).abs() < 1e-4);
        assert_eq!(jpa_prototype(&p, 0.0, 4.42).unwrap(), 0.0);
        assert!(jpa_from_gain(1.0, 0.135, p.g(1), 4.42).is_err());
        assert!(jpa_prototype(&p, 0.135, 0.0).is_err());
    }

    #[test]
    fn band_rejects_bad_values() {
        assert!(BandSpec::new(0.0, 0.1).is_err());
        assert!(BandSpec::new(1e9, 1.0).is_err());
        assert!(BandSpec::new(1e9, -0.1).is_err());
        assert!(BandSpec::new(1e9, 0.0).is_ok());
    }
}
