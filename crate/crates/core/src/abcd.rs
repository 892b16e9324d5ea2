//! Two-port ABCD simulation of the amplifier as a signal-port to idler-port
//! network. Idler-side elements are evaluated at ω − ωP; the pumped nonlinear
//! inductor appears as an admittance inverter between the two halves.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::consts::PI;
use crate::synthesis::ComponentSet;
use crate::trace::{linear_grid, GainTrace};
use crate::{Error, Result};

const J: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// ABCD (transmission) matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPort {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl TwoPort {
    pub const IDENTITY: TwoPort = TwoPort { a: ONE, b: ZERO, c: ZERO, d: ONE };

    pub fn series(z: Complex64) -> Self {
        Self { b: z, ..Self::IDENTITY }
    }

    pub fn shunt(y: Complex64) -> Self {
        Self { c: y, ..Self::IDENTITY }
    }

    /// Lossless line of impedance `z` and electrical length `beta_l` radians.
    pub fn line(z: f64, beta_l: f64) -> Self {
        let (s, c) = (libm::sin(beta_l), libm::cos(beta_l));
        Self { a: Complex64::new(c, 0.0), b: J * (z * s), c: J * (s / z), d: Complex64::new(c, 0.0) }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// Impedance seen at port 1 with port 2 terminated by `zl`.
    pub fn input_impedance(&self, zl: Complex64) -> Complex64 {
        (self.a * zl + self.b) / (self.c * zl + self.d)
    }

    /// Impedance seen at port 1 with port 2 open.
    pub fn open_input_impedance(&self) -> Complex64 {
        self.a / self.c
    }
}

impl core::ops::Mul for TwoPort {
    type Output = TwoPort;
    fn mul(self, r: TwoPort) -> TwoPort {
        TwoPort {
            a: self.a * r.a + self.b * r.c,
            b: self.a * r.b + self.b * r.d,
            c: self.c * r.a + self.d * r.c,
            d: self.c * r.b + self.d * r.d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Placement {
    Series,
    Shunt,
}

/// Circuit element. Values are SI; `omega0`/`omega_p` are rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Element {
    Capacitor {
        c: f64,
        placement: Placement,
    },
    Inductor {
        l: f64,
        placement: Placement,
    },
    /// Parallel L ∥ C, placed as a single admittance or impedance.
    ParallelLc {
        l: f64,
        c: f64,
        placement: Placement,
    },
    TLine {
        z: f64,
        theta_deg: f64,
        omega0: f64,
    },
    IdlerCapacitor {
        c: f64,
        placement: Placement,
        omega_p: f64,
    },
    IdlerInductor {
        l: f64,
        placement: Placement,
        omega_p: f64,
    },
    IdlerParallelLc {
        l: f64,
        c: f64,
        placement: Placement,
        omega_p: f64,
    },
    IdlerTLine {
        z: f64,
        theta_deg: f64,
        omega0: f64,
        omega_p: f64,
    },
    ParametricInverter {
        j: f64,
    },
}

fn place(p: Placement, imm: Complex64, as_admittance: bool) -> TwoPort {
    match (p, as_admittance) {
        (Placement::Shunt, true) => TwoPort::shunt(imm),
        (Placement::Shunt, false) => TwoPort::shunt(ONE / imm),
        (Placement::Series, true) => TwoPort::series(ONE / imm),
        (Placement::Series, false) => TwoPort::series(imm),
    }
}

fn lc_admittance(w: f64, l: f64, c: f64) -> Complex64 {
    J * (w * c) + ONE / (J * (w * l))
}

impl Element {
    pub fn is_inverter(&self) -> bool {
        matches!(self, Element::ParametricInverter { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, reason: "element value must be positive" })
            }
        };
        match *self {
            Element::Capacitor { c, .. } | Element::IdlerCapacitor { c, .. } => positive("C", c),
            Element::Inductor { l, .. } | Element::IdlerInductor { l, .. } => positive("L", l),
            Element::ParallelLc { l, c, .. } | Element::IdlerParallelLc { l, c, .. } => {
                positive("L", l)?;
                positive("C", c)
            }
            Element::TLine { z, theta_deg, omega0 } | Element::IdlerTLine { z, theta_deg, omega0, .. } => {
                positive("Z", z)?;
                positive("omega0", omega0)?;
                if theta_deg > 0.0 && theta_deg < 180.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter { name: "theta", reason: "line length must lie in (0, 180) degrees" })
                }
            }
            Element::ParametricInverter { j } => {
                if j == 0.0 || !j.is_finite() {
                    Err(Error::ZeroInverter)
                } else {
                    Ok(())
                }
            }
        }
    }

    /// The same element with its value replaced, for inductors only.
    pub fn with_inductance(self, l_new: f64) -> Self {
        match self {
            Element::Inductor { placement, .. } => Element::Inductor { l: l_new, placement },
            Element::IdlerInductor { placement, omega_p, .. } => {
                Element::IdlerInductor { l: l_new, placement, omega_p }
            }
            other => other,
        }
    }
}

pub fn element_abcd(e: &Element, omega: f64) -> Result<TwoPort> {
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter { name: "omega", reason: "must be positive" });
    }
    Ok(match *e {
        Element::Capacitor { c, placement } => place(placement, J * (omega * c), true),
        Element::Inductor { l, placement } => place(placement, J * (omega * l), false),
        Element::ParallelLc { l, c, placement } => place(placement, lc_admittance(omega, l, c), true),
        Element::TLine { z, theta_deg, omega0 } => TwoPort::line(z, theta_deg.to_radians() * omega / omega0),
        Element::IdlerCapacitor { c, placement, omega_p } => place(placement, J * ((omega - omega_p) * c), true),
        Element::IdlerInductor { l, placement, omega_p } => place(placement, J * ((omega - omega_p) * l), false),
        Element::IdlerParallelLc { l, c, placement, omega_p } => {
            place(placement, lc_admittance(omega - omega_p, l, c), true)
        }
        Element::IdlerTLine { z, theta_deg, omega0, omega_p } => {
            TwoPort::line(z, theta_deg.to_radians() * (omega - omega_p) / omega0)
        }
        Element::ParametricInverter { j } => {
            if j == 0.0 {
                return Err(Error::ZeroInverter);
            }
            TwoPort { a: ZERO, b: J / j, c: -J * j, d: ZERO }
        }
    })
}

pub fn cascade(elements: &[Element], omega: f64) -> Result<TwoPort> {
    elements.iter().try_fold(TwoPort::IDENTITY, |acc, e| Ok(acc * element_abcd(e, omega)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SParams {
    pub s11: Complex64,
    pub s21: Complex64,
    pub s12: Complex64,
    pub s22: Complex64,
}

/// ABCD to S conversion with real reference impedances at each port.
pub fn to_s(t: &TwoPort, zs: f64, zl: f64) -> Result<SParams> {
    if !(zs > 0.0 && zl > 0.0) {
        return Err(Error::InvalidParameter { name: "reference impedance", reason: "must be positive" });
    }
    let den = t.a * zl + t.b + t.c * (zs * zl) + t.d * zs;
    if !(den.norm() > 0.0) || !den.is_finite() {
        return Err(Error::DegenerateConversion);
    }
    let k = 2.0 * libm::sqrt(zs * zl);
    Ok(SParams {
        s11: (t.a * zl + t.b - t.c * (zs * zl) - t.d * zs) / den,
        s21: Complex64::new(k, 0.0) / den,
        s12: t.det() * k / den,
        s22: (-t.a * zl + t.b - t.c * (zs * zl) + t.d * zs) / den,
    })
}

/// Termination after the last element.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Load {
    /// Second port with a real reference impedance.
    Port(f64),
    Open,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Netlist {
    pub elements: Vec<Element>,
    pub z_source: f64,
    pub load: Load,
}

impl Netlist {
    pub fn validate(&self) -> Result<()> {
        if self.elements.is_empty() {
            return Err(Error::InvalidParameter { name: "netlist", reason: "no elements" });
        }
        for e in &self.elements {
            e.validate()?;
        }
        Ok(())
    }

    pub fn inverter_index(&self) -> Option<usize> {
        self.elements.iter().position(Element::is_inverter)
    }

    pub fn inverter_value(&self) -> Option<f64> {
        self.inverter_index().map(|i| match self.elements[i] {
            Element::ParametricInverter { j } => j,
            _ => unreachable!(),
        })
    }

    /// Index of the element nearest to `from` walking towards the signal
    /// port that satisfies `pred`.
    fn find_before(&self, from: usize, pred: impl Fn(&Element) -> bool) -> Option<usize> {
        (0..from).rev().find(|&i| pred(&self.elements[i]))
    }

    fn find_after(&self, from: usize, pred: impl Fn(&Element) -> bool) -> Option<usize> {
        (from + 1..self.elements.len()).find(|&i| pred(&self.elements[i]))
    }

    /// Signal- and idler-side shunt inductors adjacent to the inverter,
    /// i.e. the pumped nonlinear element.
    pub fn pumped_inductors(&self) -> Result<(usize, usize)> {
        let k = self.inverter_index().ok_or(Error::NoInverter)?;
        let sig = self
            .find_before(k, |e| matches!(e, Element::Inductor { placement: Placement::Shunt, .. }))
            .filter(|&i| i + 1 == k);
        let idl = self
            .find_after(k, |e| matches!(e, Element::IdlerInductor { placement: Placement::Shunt, .. }))
            .filter(|&i| i == k + 1);
        match (sig, idl) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::InvalidParameter { name: "netlist", reason: "inverter must sit between shunt inductors" }),
        }
    }

    /// Replaces the inverter value.
    pub fn set_inverter(&mut self, j: f64) -> Result<()> {
        let k = self.inverter_index().ok_or(Error::NoInverter)?;
        self.elements[k] = Element::ParametricInverter { j };
        Ok(())
    }

    /// Reflection coefficient at the signal port.
    pub fn s11(&self, omega: f64) -> Result<Complex64> {
        let t = cascade(&self.elements, omega)?;
        match self.load {
            Load::Port(zl) => Ok(to_s(&t, self.z_source, zl)?.s11),
            Load::Open => {
                if t.c.norm() == 0.0 {
                    return Ok(ONE);
                }
                let zin = t.open_input_impedance();
                let den = zin + self.z_source;
                if !(den.norm() > 0.0) || !den.is_finite() {
                    return Err(Error::DegenerateConversion);
                }
                Ok((zin - self.z_source) / den)
            }
        }
    }

    pub fn s_params(&self, omega: f64) -> Result<Option<SParams>> {
        match self.load {
            Load::Port(zl) => Ok(Some(to_s(&cascade(&self.elements, omega)?, self.z_source, zl)?)),
            Load::Open => Ok(None),
        }
    }

    /// Voltage at the junction before element `at` for a Thevenin source of
    /// amplitude `v_source` behind `z_source`.
    pub fn node_voltage(&self, omega: f64, at: usize, v_source: Complex64) -> Result<Complex64> {
        let ta = cascade(&self.elements[..at], omega)?;
        let tb = cascade(&self.elements[at..], omega)?;
        let zs = Complex64::new(self.z_source, 0.0);
        // I2/V2 of the downstream section
        let y_b = match self.load {
            Load::Port(zl) => {
                let zl = Complex64::new(zl, 0.0);
                (tb.c * zl + tb.d) / (tb.a * zl + tb.b)
            }
            Load::Open => tb.c / tb.a,
        };
        let den = ta.a + ta.b * y_b + zs * (ta.c + ta.d * y_b);
        if !(den.norm() > 0.0) || !den.is_finite() {
            return Err(Error::DegenerateConversion);
        }
        Ok(v_source / den)
    }
}

/// Full amplifier netlist: signal port through the matching network to the
/// snake, the parametric inverter, then the mirrored idler network.
/// `jpa = None` returns the signal half alone with an open far end.
pub fn lesa_netlist(c: &ComponentSet, z0: f64, omega0: f64, omega_p: f64, jpa: Option<f64>) -> Result<Netlist> {
    use Placement::{Series, Shunt};
    let signal = [
        Element::Inductor { l: c.l34, placement: Shunt },
        Element::TLine { z: c.z3, theta_deg: c.effective_theta_deg(), omega0 },
        Element::Capacitor { c: c.c23, placement: Series },
        Element::ParallelLc { l: c.l2, c: c.c2, placement: Shunt },
        Element::Capacitor { c: c.c12, placement: Series },
        Element::Capacitor { c: c.c1, placement: Shunt },
        Element::Inductor { l: c.l_snake, placement: Shunt },
    ];
    let mut elements: Vec<Element> = signal.to_vec();
    let load = match jpa {
        None => Load::Open,
        Some(j) => {
            elements.push(Element::ParametricInverter { j });
            elements.extend(signal.iter().rev().map(|e| idler_of(e, omega_p)));
            Load::Port(z0)
        }
    };
    let n = Netlist { elements, z_source: z0, load };
    n.validate()?;
    Ok(n)
}

/// Idler-frequency counterpart of a signal element.
pub fn idler_of(e: &Element, omega_p: f64) -> Element {
    match *e {
        Element::Capacitor { c, placement } => Element::IdlerCapacitor { c, placement, omega_p },
        Element::Inductor { l, placement } => Element::IdlerInductor { l, placement, omega_p },
        Element::ParallelLc { l, c, placement } => Element::IdlerParallelLc { l, c, placement, omega_p },
        Element::TLine { z, theta_deg, omega0 } => Element::IdlerTLine { z, theta_deg, omega0, omega_p },
        other => other,
    }
}

/// Reflection gain over a uniform frequency grid. The idler field holds S21
/// (signal port to idler port) when the far end is a port.
pub fn gain_sweep(n: &Netlist, f_start: f64, f_stop: f64, n_points: usize) -> Result<GainTrace> {
    n.validate()?;
    let f = linear_grid(f_start, f_stop, n_points)?;
    let mut signal = Vec::with_capacity(f.len());
    let mut idler = Vec::with_capacity(f.len());
    for &fi in &f {
        let w = 2.0 * PI * fi;
        match n.s_params(w)? {
            Some(s) => {
                signal.push(s.s11);
                idler.push(s.s21);
            }
            None => signal.push(n.s11(w)?),
        }
    }
    let idler = matches!(n.load, Load::Port(_)).then_some(idler);
    Ok(GainTrace { frequencies_hz: f, signal, idler })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::synthesis::realize_network;
    use alloc::vec;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn paper_components() -> ComponentSet {
        realize_network(&fixtures::prototype(), &fixtures::band(), &fixtures::plan(), 0.0).unwrap()
    }

    #[test]
    fn idler_capacitor_transparent_at_pump() {
        let wp = 2.0 * PI * 9.8e9;
        let e = Element::IdlerCapacitor { c: 1e-12, placement: Placement::Shunt, omega_p: wp };
        assert_eq!(element_abcd(&e, wp).unwrap(), TwoPort::IDENTITY);
    }

    #[test]
    fn idler_capacitor_mirrors_signal() {
        let wp = 2.0 * PI * 9.8e9;
        let d = 2.0 * PI * 0.3e9;
        let idl =
            element_abcd(&Element::IdlerCapacitor { c: 1e-12, placement: Placement::Shunt, omega_p: wp }, wp / 2.0 + d)
                .unwrap();
        let sig = element_abcd(&Element::Capacitor { c: 1e-12, placement: Placement::Shunt }, wp / 2.0 - d).unwrap();
        // purely reactive: the mirrored admittance is the conjugate
        assert!(close(idl.c, sig.c.conj(), 1e-18));
    }

    #[test]
    fn quarter_wave_line() {
        let w0 = 2.0 * PI * 5e9;
        let t = element_abcd(&Element::TLine { z: 50.0, theta_deg: 90.0, omega0: w0 }, w0).unwrap();
        assert!(close(t.a, ZERO, 1e-15) && close(t.d, ZERO, 1e-15));
        assert!(close(t.b, J * 50.0, 1e-12) && close(t.c, J / 50.0, 1e-15));
    }

    #[test]
    fn inverter_rejects_zero() {
        assert_eq!(element_abcd(&Element::ParametricInverter { j: 0.0 }, 1.0), Err(Error::ZeroInverter));
    }

    #[test]
    fn hand_cascade() {
        let (z, y) = (Complex64::new(3.0, 2.0), Complex64::new(0.1, -0.4));
        let t = TwoPort::series(z) * TwoPort::shunt(y);
        assert_eq!(t, TwoPort { a: ONE + z * y, b: z, c: y, d: ONE });
        assert_eq!(TwoPort::IDENTITY * TwoPort::IDENTITY, TwoPort::IDENTITY);
    }

    #[test]
    fn conversions() {
        let s = to_s(&TwoPort::IDENTITY, 50.0, 50.0).unwrap();
        assert!(close(s.s11, ZERO, 1e-15) && close(s.s21, ONE, 1e-15));
        let s = to_s(&TwoPort::shunt(Complex64::new(0.02, 0.0)), 50.0, 50.0).unwrap();
        assert!(close(s.s11, Complex64::new(-1.0 / 3.0, 0.0), 1e-15));
        let s = to_s(&TwoPort::series(Complex64::new(1e12, 0.0)), 50.0, 50.0).unwrap();
        assert!((s.s11.norm() - 1.0).abs() < 1e-9);
        assert!(to_s(&TwoPort::IDENTITY, 0.0, 50.0).is_err());
    }

    #[test]
    fn netlist_structure() {
        let c = paper_components();
        let w0 = fixtures::band().omega0();
        let n = lesa_netlist(&c, 50.0, w0, 2.0 * w0, Some(0.05)).unwrap();
        assert_eq!(n.elements.len(), 15);
        assert_eq!(n.inverter_index(), Some(7));
        assert_eq!(n.pumped_inductors().unwrap(), (6, 8));
        let t = lesa_netlist(&c.with_trim(-6.0).unwrap(), 50.0, w0, 2.0 * w0, Some(0.05)).unwrap();
        match t.elements[1] {
            Element::TLine { theta_deg, .. } => assert!((theta_deg - (c.theta_deg - 6.0)).abs() < 1e-12),
            _ => panic!("line expected"),
        }
        assert!(lesa_netlist(&c, 50.0, w0, 2.0 * w0, Some(0.0)).is_err());
    }

    #[test]
    fn pump_off_is_lossless_reflection() {
        let c = paper_components();
        let w0 = fixtures::band().omega0();
        let n = lesa_netlist(&c, 50.0, w0, 2.0 * w0, None).unwrap();
        assert_eq!(n.elements.len(), 7);
        let t = gain_sweep(&n, 4.0e9, 6.0e9, 41).unwrap();
        assert!(t.gain_db().iter().all(|g| g.abs() < 1e-9));
    }

    #[test]
    fn passive_matching_check() {
        let c = paper_components();
        let w0 = fixtures::band().omega0();
        let mut n = lesa_netlist(&c, 50.0, w0, 2.0 * w0, None).unwrap();
        n.load = Load::Port(4.42);
        for f in [4.5e9, 4.9e9, 5.3e9] {
            let s = n.s_params(2.0 * PI * f).unwrap().unwrap();
            assert!((s.s11.norm_sqr() + s.s21.norm_sqr() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn node_voltage_matches_divider() {
        // series R then shunt R into an open: divider at the shunt node
        let n = Netlist {
            elements: vec![Element::ParallelLc { l: 1.0, c: 1e-30, placement: Placement::Series }],
            z_source: 50.0,
            load: Load::Port(50.0),
        };
        let w = 1e3;
        let v = n.node_voltage(w, 1, ONE).unwrap();
        let zs = ONE / lc_admittance(w, 1.0, 1e-30);
        let expected = 50.0 / (50.0 + 50.0 + zs);
        assert!(close(v, expected, 1e-12));
        let v0 = n.node_voltage(w, 0, ONE).unwrap();
        assert!(close(v0, (50.0 + zs) / (100.0 + zs), 1e-12));
    }
}
