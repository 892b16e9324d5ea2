//! Power and voltage conversions at a resistive reference.

use crate::consts::MILLIWATT;

pub fn db10(x: f64) -> f64 {
    10.0 * libm::log10(x)
}

pub fn db20(x: f64) -> f64 {
    20.0 * libm::log10(x)
}

pub fn from_db10(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    MILLIWATT * from_db10(dbm)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    db10(w / MILLIWATT)
}

/// Peak amplitude of a sinusoid delivering `dbm` into `z0`.
pub fn dbm_to_peak_volts(dbm: f64, z0: f64) -> f64 {
    libm::sqrt(2.0 * z0 * dbm_to_watts(dbm))
}

/// Power in dBm of a sinusoid with peak amplitude `v` in `z0`.
pub fn peak_volts_to_dbm(v: f64, z0: f64) -> f64 {
    watts_to_dbm(v * v / (2.0 * z0))
}
