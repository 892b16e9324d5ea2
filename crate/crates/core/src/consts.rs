//! Physical constants (SI, CODATA 2018 exact where defined).

pub use core::f64::consts::PI;

/// Planck constant, J s.
pub const H: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = H / (2.0 * PI);
/// Elementary charge, C.
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Superconducting flux quantum h/2e, Wb.
pub const PHI0: f64 = H / (2.0 * E_CHARGE);
/// One debye, C m.
pub const DEBYE: f64 = 3.335_640_951_981_52e-30;
/// 1 mW in W, the dBm reference.
pub const MILLIWATT: f64 = 1e-3;
