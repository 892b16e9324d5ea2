//! Intermodulation from a saturable two-level-system bath on the amplifier's
//! nonlinear resonator, with the competing Kerr term.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::consts::{HBAR, PI};
use crate::quad::{integrate, QuadOptions};
use crate::units::{dbm_to_peak_volts, peak_volts_to_dbm};
use crate::{Error, Result};

/// Single-pole parametric resonator driven at ωp.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SinglePoleParams {
    pub omega0: f64,
    pub omega_p: f64,
    /// Total decay rate, rad/s.
    pub kappa: f64,
    /// Scaled pump amplitude.
    pub f_p: f64,
    /// Pump detuning (ωp − 2ω0)/2κ.
    pub mu_p: f64,
}

impl SinglePoleParams {
    /// Resonantly pumped resonator with power gain `gain` at ω0.
    pub fn for_gain(omega0: f64, kappa: f64, gain: f64) -> Self {
        Self { omega0, omega_p: 2.0 * omega0, kappa, f_p: libm::sqrt(1.0 - 1.0 / libm::sqrt(gain)), mu_p: 0.0 }
    }

    /// Power gain (1 − f_p²)⁻² at zero pump detuning.
    pub fn gain(&self) -> f64 {
        let r = 1.0 - self.f_p * self.f_p;
        1.0 / (r * r)
    }
}

pub fn susceptibility(omega: f64, sp: &SinglePoleParams) -> Result<Complex64> {
    let i = Complex64::new(0.0, 1.0);
    let k = sp.kappa;
    let num = (i / sp.omega_p) * (k - i * (omega + sp.omega0 - sp.omega_p));
    let a = k - i * (omega - sp.omega_p / 2.0);
    let den = a * a - k * k * (sp.f_p * sp.f_p - sp.mu_p * sp.mu_p);
    if den.norm() <= 1e-14 * k * k {
        return Err(Error::SusceptibilityPole { omega });
    }
    Ok(num / den)
}

const SERIES_BELOW: f64 = 0.5;
const SERIES_TERMS: usize = 80;

fn check_xi(xi: f64) -> Result<()> {
    if xi >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "xi", reason: "must be non-negative" })
    }
}

// Taylor coefficients of √(1+ξ) and asinh(√ξ)/√ξ.
fn series_coefficients() -> ([f64; SERIES_TERMS + 1], [f64; SERIES_TERMS + 1]) {
    let mut c = [0.0; SERIES_TERMS + 1];
    let mut s = [0.0; SERIES_TERMS + 1];
    c[0] = 1.0;
    s[0] = 1.0;
    for k in 0..SERIES_TERMS {
        let kf = k as f64;
        c[k + 1] = c[k] * (0.5 - kf) / (kf + 1.0);
        s[k + 1] = -s[k] * (2.0 * kf + 1.0) * (2.0 * kf + 1.0) / (2.0 * (kf + 1.0) * (2.0 * kf + 3.0));
    }
    (c, s)
}

fn horner(coef: impl DoubleEndedIterator<Item = f64>, x: f64) -> f64 {
    coef.rev().fold(0.0, |acc, a| acc * x + a)
}

/// Response function for the 2ω1 − ω2 product.
pub fn psi3(xi: f64) -> Result<f64> {
    check_xi(xi)?;
    if xi < SERIES_BELOW {
        let (c, s) = series_coefficients();
        // ξ² Σ_{k≥2} (c_k + 3 s_k)/4 ξ^{k−2}
        let tail = horner((2..=SERIES_TERMS).map(|k| 0.25 * c[k] + 0.75 * s[k]), xi);
        return Ok(xi * xi * tail);
    }
    let r = libm::sqrt(xi);
    Ok(0.25 * libm::sqrt(xi + 1.0) + 0.75 * libm::asinh(r) / r - 1.0)
}

/// Response function for the 3ω1 − 2ω2 product.
pub fn psi5(xi: f64) -> Result<f64> {
    check_xi(xi)?;
    if xi < SERIES_BELOW {
        let (c, s) = series_coefficients();
        // numerator coefficients n_k vanish for k ≤ 3
        let n = (4..=SERIES_TERMS).map(|k| 0.25 * (c[k - 1] - 16.0 * c[k] + 15.0 * s[k - 1]));
        return Ok(xi * xi * xi * horner(n, xi));
    }
    let r = libm::sqrt(xi);
    let q = libm::sqrt(1.0 + xi);
    Ok((16.0 - 8.0 * xi + (xi - 16.0) * q + 15.0 * r * libm::asinh(r)) / (4.0 * xi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ImOrder {
    Third,
    Fifth,
}

impl ImOrder {
    pub fn psi(self, xi: f64) -> Result<f64> {
        match self {
            ImOrder::Third => psi3(xi),
            ImOrder::Fifth => psi5(xi),
        }
    }
}

/// Detuning-averaged response ∫dδω Ψ(2ζ̄/(1 + (T2 δω)²)), rad/s.
pub fn averaged_psi(order: ImOrder, zeta_bar: f64, t2: f64) -> Result<f64> {
    if !(zeta_bar >= 0.0) {
        return Err(Error::InvalidParameter { name: "zeta_bar", reason: "must be non-negative" });
    }
    if !(t2 > 0.0) {
        return Err(Error::InvalidParameter { name: "T2", reason: "must be positive" });
    }
    if zeta_bar == 0.0 {
        return Ok(0.0);
    }
    // u = tan t maps the detuning line onto (−π/2, π/2); the integrand is even.
    let f = |t: f64| {
        let c = libm::cos(t);
        let c2 = c * c;
        if c2 == 0.0 {
            return 0.0;
        }
        order.psi(2.0 * zeta_bar * c2).unwrap_or(f64::NAN) / c2
    };
    let opts = QuadOptions { rel_tol: 1e-8, abs_tol: 0.0, max_intervals: 4000 };
    let r = integrate(f, 0.0, PI / 2.0, opts)?;
    Ok(2.0 * r.value / t2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TlsBathParams {
    pub t1: f64,
    pub t2: f64,
    /// Internal quality factor of the nonlinear resonator.
    pub qi: f64,
    /// TLS dipole moment, C m.
    pub dipole: f64,
    /// Dielectric thickness, m.
    pub t_diel: f64,
}

/// Dielectric thickness assumed when none is configured, m.
pub const DEFAULT_T_DIEL: f64 = 100e-9;

impl TlsBathParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("T1", self.t1), ("T2", self.t2), ("Qi", self.qi), ("t_diel", self.t_diel)] {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter { name, reason: "must be positive" });
            }
        }
        if !(self.dipole >= 0.0) {
            return Err(Error::InvalidParameter { name: "dipole", reason: "must be non-negative" });
        }
        Ok(())
    }

    /// ρV² = (3/π)ħω0²/Qi.
    pub fn rho_v2(&self, omega0: f64) -> f64 {
        3.0 / PI * HBAR * omega0 * omega0 / self.qi
    }
}

/// Mapping from amplifier input voltage to the drive on the TLS capacitor.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ImdDriveMap {
    /// Linear power gain.
    pub gain: f64,
    pub omega0: f64,
    pub w: f64,
    pub g1: f64,
    pub g4: f64,
    pub z1: f64,
    pub z0: f64,
    /// Kerr coefficient, V⁻².
    pub k3: f64,
}

impl ImdDriveMap {
    pub fn validate(&self) -> Result<()> {
        if !(self.gain > 1.0) {
            return Err(Error::InvalidParameter { name: "gain", reason: "must exceed 1" });
        }
        for (name, v) in
            [("omega0", self.omega0), ("w", self.w), ("g1", self.g1), ("g4", self.g4), ("Z1", self.z1), ("Z0", self.z0)]
        {
            if !(v > 0.0) {
                return Err(Error::InvalidParameter { name, reason: "must be positive" });
            }
        }
        if !(self.k3 >= 0.0) {
            return Err(Error::InvalidParameter { name: "K3", reason: "must be non-negative" });
        }
        Ok(())
    }

    /// External decay rate wω0/g1.
    pub fn kappa(&self) -> f64 {
        self.w * self.omega0 / self.g1
    }

    /// V_d / V_in.
    pub fn drive_ratio(&self) -> f64 {
        libm::sqrt(self.z1 * self.g1 / (self.w * self.z0))
    }

    /// Output-port voltage per unit TLS voltage.
    pub fn output_ratio(&self) -> f64 {
        libm::sqrt(self.w * self.z0 / (self.g1 * self.g4 * self.z1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RabiEnvelope {
    pub v_d: f64,
    pub v_env: f64,
    pub omega_r: f64,
    pub zeta_bar: f64,
}

pub fn rabi_envelope(v_in: f64, map: &ImdDriveMap, bath: &TlsBathParams) -> RabiEnvelope {
    let v_d = v_in * map.drive_ratio();
    let v_env = libm::sqrt(2.0 * map.gain) * v_d;
    let omega_r = bath.dipole / HBAR * v_env / bath.t_diel;
    RabiEnvelope { v_d, v_env, omega_r, zeta_bar: bath.t1 * bath.t2 * omega_r * omega_r }
}

/// TLS intermodulation voltage magnitude on the nonlinear resonator.
pub fn v_tls(order: ImOrder, v_in: f64, map: &ImdDriveMap, bath: &TlsBathParams) -> Result<f64> {
    map.validate()?;
    bath.validate()?;
    let r = rabi_envelope(v_in, map, bath);
    if r.omega_r == 0.0 {
        return Ok(0.0);
    }
    let avg = averaged_psi(order, r.zeta_bar, bath.t2)?;
    Ok(3.0 * map.gain / (4.0 * PI * bath.qi) * map.omega0 * r.v_d / (map.kappa() * bath.t1 * r.omega_r * r.omega_r)
        * avg)
}

/// Largest tone spacing (as Δω·T2) treated as adiabatic.
pub const ADIABATIC_LIMIT: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ImdPoint {
    pub pin_dbm: f64,
    pub v_tls3: f64,
    pub v_kerr3: f64,
    pub v_out3: f64,
    pub v_tls5: f64,
    pub v_out5: f64,
    pub im3_dbm: f64,
    pub tls3_dbm: f64,
    pub kerr3_dbm: f64,
    pub im5_dbm: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ImdCurve {
    pub delta_f_hz: f64,
    pub points: Vec<ImdPoint>,
}

/// Output IM3 and IM5 for one input power. The TLS and Kerr third-order terms
/// enter with opposite sign; all voltages are magnitudes at the output port.
pub fn im_output(pin_dbm: f64, delta_f_hz: f64, map: &ImdDriveMap, bath: &TlsBathParams) -> Result<ImdPoint> {
    let v_in = dbm_to_peak_volts(pin_dbm, map.z0);
    let out = map.output_ratio();
    let v_tls3 = v_tls(ImOrder::Third, v_in, map, bath)?;
    let v_tls5 = v_tls(ImOrder::Fifth, v_in, map, bath)?;
    let v_kerr3 = 0.75 * map.gain * map.k3 * v_in * v_in * v_in;
    let v_out3 = libm::fabs(v_tls3 * out - v_kerr3);
    let v_out5 = v_tls5 * out;
    let dbm = |v: f64| peak_volts_to_dbm(v, map.z0);
    Ok(ImdPoint {
        pin_dbm,
        v_tls3,
        v_kerr3,
        v_out3,
        v_tls5,
        v_out5,
        im3_dbm: dbm(v_out3),
        tls3_dbm: dbm(v_tls3 * out),
        kerr3_dbm: dbm(v_kerr3),
        im5_dbm: dbm(v_out5),
        valid: 2.0 * PI * delta_f_hz * bath.t2 <= ADIABATIC_LIMIT,
    })
}

pub fn imd_sweep(powers_dbm: &[f64], delta_f_hz: f64, map: &ImdDriveMap, bath: &TlsBathParams) -> Result<ImdCurve> {
    if powers_dbm.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter { name: "power grid", reason: "must be strictly increasing" });
    }
    Ok(ImdCurve {
        delta_f_hz,
        points: powers_dbm.iter().map(|&p| im_output(p, delta_f_hz, map, bath)).collect::<Result<_>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn closed3(x: f64) -> f64 {
        let r = libm::sqrt(x);
        0.25 * libm::sqrt(x + 1.0) + 0.75 * libm::log(r + libm::sqrt(x + 1.0)) / r - 1.0
    }

    fn closed5(x: f64) -> f64 {
        let r = libm::sqrt(x);
        let q = libm::sqrt(1.0 + x);
        (16.0 - 8.0 * x + (x - 16.0) * q + 15.0 * r * libm::log(r + q)) / (4.0 * x)
    }

    #[test]
    fn unpumped_susceptibility() {
        let w0 = 2.0 * PI * 4.6e9;
        let k = 2.0 * PI * 0.6e9;
        let sp = SinglePoleParams { f_p: 0.0, ..SinglePoleParams::for_gain(w0, k, 100.0) };
        let chi = susceptibility(w0, &sp).unwrap();
        let expect = Complex64::new(0.0, 1.0 / (2.0 * w0 * k));
        assert!((chi - expect).norm() < 1e-12 * expect.norm());
    }

    #[test]
    fn pumped_susceptibility() {
        let w0 = 2.0 * PI * 4.6e9;
        let k = 2.0 * PI * 0.6e9;
        let sp = SinglePoleParams::for_gain(w0, k, 100.0);
        let chi = susceptibility(w0, &sp).unwrap();
        assert!((chi * (2.0 * w0 * k) - Complex64::new(0.0, 10.0)).norm() < 1e-9);
        let half = SinglePoleParams { f_p: 0.5, ..sp };
        let n = susceptibility(w0, &half).unwrap().norm() * 2.0 * w0 * k;
        assert!((n - 4.0 / 3.0).abs() < 1e-12);
        assert!((half.gain() - 16.0 / 9.0).abs() < 1e-12);
        let pole = SinglePoleParams { f_p: 1.0, ..sp };
        assert!(susceptibility(w0, &pole).is_err());
    }

    #[test]
    fn psi_values() {
        assert_eq!(psi3(0.0).unwrap(), 0.0);
        assert_eq!(psi5(0.0).unwrap(), 0.0);
        assert!((psi3(1.0).unwrap() - 0.014_583_6).abs() < 1e-7);
        assert!((psi5(1.0).unwrap() - 0.001_850_1).abs() < 1e-7);
        assert!((psi3(0.01).unwrap() / 2.5e-6 - 1.0).abs() < 1e-2);
        assert!((psi3(0.01).unwrap() - 2.482_272_078_98e-6).abs() < 1e-16);
        assert!(psi3(-1.0).is_err() && psi5(-1e-3).is_err());
    }

    #[test]
    fn series_joins_closed_form() {
        for x in [0.3, 0.45, 0.499_999, 0.5, 0.6] {
            assert!((psi3(x).unwrap() / closed3(x) - 1.0).abs() < 1e-10, "psi3 at {x}");
            assert!((psi5(x).unwrap() / closed5(x) - 1.0).abs() < 1e-8, "psi5 at {x}");
        }
    }

    #[test]
    fn small_argument_limits() {
        assert!((psi3(1e-4).unwrap() / 1e-8 * 40.0 - 1.0).abs() < 5e-3);
        assert!((psi5(1e-6).unwrap() / 1e-18 * 224.0 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn averaged_fixture() {
        assert_eq!(averaged_psi(ImOrder::Third, 0.0, 1.0).unwrap(), 0.0);
        let a = averaged_psi(ImOrder::Third, 1.0, 1.0).unwrap();
        assert!((a - 0.078_555_111_139_6).abs() < 1e-9);
        let b = averaged_psi(ImOrder::Third, 1.0, 2.0).unwrap();
        assert!((b / a - 0.5).abs() < 1e-12);
    }

    #[test]
    fn envelope_constants() {
        let map = fixtures::tls_drive();
        let bath = fixtures::tls_bath();
        assert!((map.drive_ratio() - 0.781).abs() < 1e-3);
        let z = rabi_envelope(0.0, &map, &bath);
        assert_eq!((z.v_d, z.omega_r, z.zeta_bar), (0.0, 0.0, 0.0));
        // V_env = 1 μV
        let v_in = 1e-6 / (libm::sqrt(2.0 * map.gain) * map.drive_ratio());
        let r = rabi_envelope(v_in, &map, &bath);
        assert!((r.omega_r / 3.163e5 - 1.0).abs() < 1e-3);
        assert_eq!(v_tls(ImOrder::Third, 0.0, &map, &bath).unwrap(), 0.0);
    }

    #[test]
    fn kerr_only_limit() {
        let map = fixtures::tls_drive();
        let bath = TlsBathParams { qi: 1e300, ..fixtures::tls_bath() };
        let a = im_output(-120.0, 1e3, &map, &bath).unwrap();
        let b = im_output(-110.0, 1e3, &map, &bath).unwrap();
        assert!((b.im3_dbm - a.im3_dbm - 30.0).abs() < 1e-9);
        assert!((a.im3_dbm - a.kerr3_dbm).abs() < 1e-9);
    }

    #[test]
    fn tls_only_is_monotone() {
        let map = ImdDriveMap { k3: 0.0, ..fixtures::tls_drive() };
        let powers: Vec<f64> = (0..41).map(|i| -160.0 + 2.0 * i as f64).collect();
        let c = imd_sweep(&powers, 1e3, &map, &fixtures::tls_bath()).unwrap();
        assert!(c.points.windows(2).all(|w| w[1].im3_dbm >= w[0].im3_dbm));
    }

    #[test]
    fn validity_flag() {
        let map = fixtures::tls_drive();
        let bath = fixtures::tls_bath();
        assert!(im_output(-120.0, 1e3, &map, &bath).unwrap().valid);
        assert!(!im_output(-120.0, 1e5, &map, &bath).unwrap().valid);
    }
}
