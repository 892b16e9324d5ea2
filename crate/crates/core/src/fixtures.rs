//! Built-in reference design: a 20 dB, 0.5 dB ripple third-order amplifier
//! centred at 4.9 GHz, and the TLS bath used for the distortion study.

use alloc::vec;

use crate::consts::DEBYE;
use crate::prototype::{BandSpec, ChebyshevPrototype};
use crate::synthesis::{ImpedancePlan, SnakeParams};
use crate::tls::{ImdDriveMap, TlsBathParams};

pub const F0_HZ: f64 = 4.9e9;
pub const FRACTIONAL_BANDWIDTH: f64 = 0.135;
/// Empirical line-length trim applied to the built-in design, degrees.
pub const THETA_TRIM_DEG: f64 = -6.0;
/// Target snake inductance at the operating bias, H.
pub const L_SNAKE_TARGET: f64 = 144e-12;

pub fn prototype() -> ChebyshevPrototype {
    ChebyshevPrototype::new(3, vec![1.0, 0.5899, 0.6681, 0.3753, 0.9045], 20.0, 0.5)
        .expect("built-in prototype is valid")
}

pub fn band() -> BandSpec {
    BandSpec::new(F0_HZ, FRACTIONAL_BANDWIDTH).expect("built-in band is valid")
}

pub fn plan() -> ImpedancePlan {
    ImpedancePlan { z1: 4.42, z2: 20.0, z3: 50.0, z0: 50.0 }
}

pub fn snake() -> SnakeParams {
    SnakeParams { n_total: 40, ic: 16e-6, l1s: 2.6e-12, l2s: 8.0e-12, lb: 50e-12 }
}

/// Bath used for the distortion comparison: T1 = 2 μs, T2 = 4 μs, Qi = 250,
/// a 1 D dipole across a 100 nm dielectric.
pub fn tls_bath() -> TlsBathParams {
    TlsBathParams { t1: 2e-6, t2: 4e-6, qi: 250.0, dipole: DEBYE, t_diel: 100e-9 }
}

/// Drive map for the distortion study: G = 100 at 4.6 GHz with w = 0.085,
/// Z1 = 4.4 Ω, 50 Ω environment and K3 = 2.1e-3 μV⁻².
pub fn tls_drive() -> ImdDriveMap {
    ImdDriveMap {
        gain: 100.0,
        omega0: 2.0 * crate::consts::PI * 4.6e9,
        w: 0.085,
        g1: 0.5899,
        g4: 0.9045,
        z1: 4.4,
        z0: 50.0,
        k3: 2.1e-3 * 1e12,
    }
}
