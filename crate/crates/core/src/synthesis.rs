//! Physical component synthesis: immittance inverters, their lumped and
//! transmission-line realization, and the rf-SQUID snake inductance.

use crate::consts::{E_CHARGE, HBAR, PI};
use crate::prototype::{BandSpec, ChebyshevPrototype};
use crate::{Error, Result};

/// Characteristic impedances of the three resonators and the environment, Ω.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ImpedancePlan {
    pub z1: f64,
    pub z2: f64,
    pub z3: f64,
    pub z0: f64,
}

impl ImpedancePlan {
    pub fn validate(&self) -> Result<()> {
        for (name, z) in [("Z1", self.z1), ("Z2", self.z2), ("Z3", self.z3), ("Z0", self.z0)] {
            if !(z > 0.0) || !z.is_finite() {
                return Err(Error::InvalidParameter { name, reason: "impedance must be positive" });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Inverters {
    pub j12: f64,
    pub j23: f64,
    pub k34: f64,
}

pub fn immittance_inverters(p: &ChebyshevPrototype, band: &BandSpec, plan: &ImpedancePlan) -> Result<Inverters> {
    plan.validate()?;
    if p.order() != 3 {
        return Err(Error::InvalidParameter {
            name: "order",
            reason: "network synthesis is defined for third-order prototypes",
        });
    }
    let w = band.w();
    let g = |k| p.g(k);
    let ImpedancePlan { z1, z2, z3, z0 } = *plan;
    Ok(Inverters {
        j12: w * libm::sqrt(1.0 / (g(1) * g(2) * z1 * z2)),
        j23: w * libm::sqrt(PI / (4.0 * g(2) * g(3) * z2 * z3)),
        k34: libm::sqrt(PI / 4.0 * w * z3 * z0 / (g(3) * g(4))),
    })
}

/// Shunt–series–shunt plus negative-length line realization of an admittance
/// inverter between lines of admittance `yc`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InverterRealization {
    pub j: f64,
    /// Series susceptance, S.
    pub b0: f64,
    /// Shunt susceptance, S.
    pub b1: f64,
    /// Compensating electrical length, degrees (negative).
    pub theta_comp_deg: f64,
}

pub fn lumped_tl_inverter(j: f64, yc: f64) -> Result<InverterRealization> {
    if !(yc > 0.0) {
        return Err(Error::InvalidParameter { name: "Yc", reason: "must be positive" });
    }
    if !(j >= 0.0) {
        return Err(Error::InvalidParameter { name: "J", reason: "must be non-negative" });
    }
    if j >= yc {
        return Err(Error::UnrealizableInverter { j, yc });
    }
    let r = libm::sqrt(1.0 - (j / yc) * (j / yc));
    let b0 = j / r;
    Ok(InverterRealization { j, b0, b1: -j * r, theta_comp_deg: -libm::atan(b0 / yc).to_degrees() })
}

/// Every physical element of the amplifier, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ComponentSet {
    pub c1: f64,
    pub c2: f64,
    pub c12: f64,
    pub c23: f64,
    pub l2: f64,
    pub l34: f64,
    pub z3: f64,
    /// Line length at ω0 before trimming, degrees.
    pub theta_deg: f64,
    pub theta_trim_deg: f64,
    pub l_snake: f64,
}

impl ComponentSet {
    pub fn effective_theta_deg(&self) -> f64 {
        self.theta_deg + self.theta_trim_deg
    }

    pub fn with_trim(self, theta_trim_deg: f64) -> Result<Self> {
        check_line(self.theta_deg + theta_trim_deg)?;
        Ok(Self { theta_trim_deg, ..self })
    }
}

fn check_line(theta: f64) -> Result<()> {
    if theta > 0.0 && theta < 90.0 {
        Ok(())
    } else {
        Err(Error::LineLength { theta_deg: theta })
    }
}

pub fn realize_network(
    p: &ChebyshevPrototype,
    band: &BandSpec,
    plan: &ImpedancePlan,
    theta_trim_deg: f64,
) -> Result<ComponentSet> {
    let inv = immittance_inverters(p, band, plan)?;
    let w0 = band.omega0();
    let ImpedancePlan { z1, z2, z3, .. } = *plan;

    let c12 = inv.j12 / w0;
    let kz = inv.k34 / z3;
    let x34 = inv.k34 / (1.0 - kz * kz);
    let l34 = x34 / w0;
    let jz = inv.j23 * z3;
    let r = libm::sqrt(1.0 - jz * jz);
    let b23 = inv.j23 / r;
    let c23 = b23 / w0;
    let c1 = 1.0 / (z1 * w0) - c12;
    let l2 = z2 / w0;
    let b23e = inv.j23 * r;
    let c2 = 1.0 / (z2 * w0) - c12 - b23e / w0;
    let theta_deg = 90.0 - libm::atan(b23 * z3).to_degrees() - 0.5 * libm::atan(2.0 * x34 / z3).to_degrees();

    let l_snake = z1 / w0;
    for (element, value) in [("C1", c1), ("C2", c2), ("C12", c12), ("C23", c23), ("L2", l2), ("L34", l34)] {
        if !(value > 0.0) {
            return Err(Error::NonPositiveComponent { element, value });
        }
    }
    check_line(theta_deg + theta_trim_deg)?;
    Ok(ComponentSet { c1, c2, c12, c23, l2, l34, z3, theta_deg, theta_trim_deg, l_snake })
}

/// Two parallel rf-SQUID arrays in series with a stray inductance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SnakeParams {
    /// Total SQUID count over both arrays (even).
    pub n_total: u32,
    /// Junction critical current, A.
    pub ic: f64,
    pub l1s: f64,
    pub l2s: f64,
    /// Stray series inductance, H.
    pub lb: f64,
}

/// Stray inductance assumed when none is given, H.
pub const DEFAULT_LB: f64 = 50e-12;

const SINGULAR_DENOMINATOR: f64 = 1e-9;

impl SnakeParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_total == 0 || !self.n_total.is_multiple_of(2) {
            return Err(Error::InvalidParameter { name: "n_total", reason: "must be even and positive" });
        }
        if !(self.ic > 0.0) {
            return Err(Error::InvalidParameter { name: "Ic", reason: "must be positive" });
        }
        for (name, l) in [("L1s", self.l1s), ("L2s", self.l2s), ("Lb", self.lb)] {
            if !(l >= 0.0) || !l.is_finite() {
                return Err(Error::InvalidParameter { name, reason: "inductance must be non-negative" });
            }
        }
        Ok(())
    }

    /// Josephson inductance ħ/(2e·Ic).
    pub fn lj(&self) -> f64 {
        HBAR / (2.0 * E_CHARGE * self.ic)
    }

    /// SQUIDs per array.
    pub fn per_array(&self) -> f64 {
        f64::from(self.n_total / 2)
    }

    /// Inductance of one rf-SQUID stage at phase `delta`.
    pub fn stage_inductance(&self, delta: f64) -> Result<f64> {
        let lj = self.lj();
        let c = libm::cos(delta);
        let den = lj + (4.0 * self.l1s + self.l2s) * c;
        if libm::fabs(den) <= SINGULAR_DENOMINATOR * (lj + 4.0 * self.l1s + self.l2s) {
            return Err(Error::BiasSingularity { delta0: delta });
        }
        Ok((lj * (self.l1s + self.l2s) + self.l1s * self.l2s * c) / den)
    }
}

/// Small-signal inductance of the snake at equilibrium phase `delta0`.
pub fn snake_inductance(s: &SnakeParams, delta0: f64) -> Result<f64> {
    s.validate()?;
    Ok(s.lb + 0.5 * s.per_array() * s.stage_inductance(delta0)?)
}

/// Branch upper end for bias inversion.
pub const BIAS_BRANCH_MAX: f64 = PI / 2.0;

/// Inverts `snake_inductance` on δ0 ∈ [0, π/2].
pub fn solve_bias(s: &SnakeParams, l_target: f64) -> Result<f64> {
    let lo = snake_inductance(s, 0.0)?;
    let hi = snake_inductance(s, BIAS_BRANCH_MAX)?;
    let (min, max) = (lo.min(hi), lo.max(hi));
    if !(l_target >= min && l_target <= max) {
        return Err(Error::UnreachableBias { target: l_target, min, max });
    }
    if l_target == lo {
        return Ok(0.0);
    }
    if l_target == hi {
        return Ok(BIAS_BRANCH_MAX);
    }
    crate::roots::bisect(
        |d| snake_inductance(s, d).map(|l| l - l_target).unwrap_or(f64::NAN),
        0.0,
        BIAS_BRANCH_MAX,
        1e-12,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn reference_inverters() {
        let inv = immittance_inverters(&fixtures::prototype(), &fixtures::band(), &fixtures::plan()).unwrap();
        assert!(rel(inv.j12, 0.0228) < 5e-3);
        assert!(rel(inv.j23, 0.0076) < 6e-3);
        assert!(rel(inv.k34, 27.95) < 5e-3);
    }

    #[test]
    fn zero_bandwidth_inverters() {
        let band = BandSpec::new(4.9e9, 0.0).unwrap();
        let inv = immittance_inverters(&fixtures::prototype(), &band, &fixtures::plan()).unwrap();
        assert_eq!((inv.j12, inv.j23, inv.k34), (0.0, 0.0, 0.0));
    }

    #[test]
    fn impedance_doubling() {
        let p = fixtures::prototype();
        let band = fixtures::band();
        let a = fixtures::plan();
        let b = ImpedancePlan { z1: 2.0 * a.z1, z2: 2.0 * a.z2, z3: 2.0 * a.z3, z0: 2.0 * a.z0 };
        let ia = immittance_inverters(&p, &band, &a).unwrap();
        let ib = immittance_inverters(&p, &band, &b).unwrap();
        assert!(rel(ib.j12, 0.5 * ia.j12) < 1e-14);
        assert!(rel(ib.j23, 0.5 * ia.j23) < 1e-14);
        // K34 ∝ √(Z3 Z0), so doubling both doubles it
        assert!(rel(ib.k34, 2.0 * ia.k34) < 1e-14);
    }

    #[test]
    fn inverter_realization() {
        let inv = immittance_inverters(&fixtures::prototype(), &fixtures::band(), &fixtures::plan()).unwrap();
        let r = lumped_tl_inverter(inv.j23, 0.02).unwrap();
        assert!(rel(r.b0, 0.00816) < 1e-3);
        assert!((r.theta_comp_deg + 22.19).abs() < 0.01);
        assert!(rel(r.b0 * r.b1, -inv.j23 * inv.j23) < 1e-12);
        let z = lumped_tl_inverter(0.0, 0.02).unwrap();
        assert_eq!((z.b0, z.b1, z.theta_comp_deg), (0.0, 0.0, 0.0));
        assert!(matches!(lumped_tl_inverter(0.02, 0.02), Err(Error::UnrealizableInverter { .. })));
    }

    #[test]
    fn reference_components() {
        let c = realize_network(&fixtures::prototype(), &fixtures::band(), &fixtures::plan(), 0.0).unwrap();
        assert!(rel(c.c12, 0.743e-12) < 5e-3);
        assert!(rel(c.l34, 1.32e-9) < 5e-3);
        assert!(rel(c.c23, 0.265e-12) < 5e-3);
        assert!(rel(c.c1, 6.61e-12) < 5e-3);
        assert!(rel(c.l2, 0.65e-9) < 5e-3);
        assert!(rel(c.c2, 0.654e-12) < 5e-3);
        assert!((c.theta_deg - 38.6).abs() < 0.05);
        let t = c.with_trim(fixtures::THETA_TRIM_DEG).unwrap();
        assert!((t.effective_theta_deg() - 32.6).abs() < 0.05);
    }

    #[test]
    fn narrow_band_limit() {
        let band = BandSpec::new(4.9e9, 1e-6).unwrap();
        let plan = fixtures::plan();
        let c = realize_network(&fixtures::prototype(), &band, &plan, 0.0).unwrap();
        let w0 = band.omega0();
        assert!(rel(c.c1, 1.0 / (plan.z1 * w0)) < 1e-5);
        assert!(rel(c.c2, 1.0 / (plan.z2 * w0)) < 1e-5);
        // both inverter reactances vanish, leaving a quarter-wave line
        assert!((c.theta_deg - 90.0).abs() < 0.2);
    }

    #[test]
    fn failure_names_element() {
        // a high-impedance middle resonator leaves no room for C12 in C2
        let band = BandSpec::new(4.9e9, 0.3).unwrap();
        let plan = ImpedancePlan { z2: 200.0, ..fixtures::plan() };
        match realize_network(&fixtures::prototype(), &band, &plan, 0.0) {
            Err(Error::NonPositiveComponent { element, .. }) => assert_eq!(element, "C2"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn snake_values() {
        let s = fixtures::snake();
        assert!((s.lj() - 20.57e-12).abs() < 0.01e-12);
        assert!((snake_inductance(&s, PI / 2.0).unwrap() - 156.0e-12).abs() < 1e-15);
        assert!((snake_inductance(&s, 0.0).unwrap() - 111.3e-12).abs() < 0.05e-12);
        let d = solve_bias(&s, 144e-12).unwrap();
        assert!((d - 1.4078).abs() < 1e-4);
        assert!(rel(snake_inductance(&s, d).unwrap(), 144e-12) < 1e-10);
        assert_eq!(solve_bias(&s, snake_inductance(&s, 0.0).unwrap()).unwrap(), 0.0);
        assert!(matches!(solve_bias(&s, 200e-12), Err(Error::UnreachableBias { .. })));
    }

    #[test]
    fn snake_singularity() {
        // LJ = 4L1 + L2 puts a pole at δ0 = π
        let base = fixtures::snake();
        let l1s = (base.lj() - base.l2s) / 4.0;
        let s = SnakeParams { l1s, ..base };
        assert!(matches!(snake_inductance(&s, PI), Err(Error::BiasSingularity { .. })));
    }
}
