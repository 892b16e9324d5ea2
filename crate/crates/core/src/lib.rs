//! Numerics for impedance-matched Josephson parametric amplifiers: Chebyshev
//! prototype synthesis, coupled-mode and ABCD small-signal gain engines, pump
//! saturation, and TLS intermodulation distortion.
//!
//! Angular frequencies (rad/s) are used internally throughout; Hz only appears
//! in trace/report fields that are explicitly named `_hz`.

#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod abcd;
pub mod consts;
pub mod coupled_mode;
mod error;
pub mod fixtures;
pub mod linalg;
pub mod nonlinear;
pub mod prototype;
pub mod quad;
pub mod roots;
pub mod synthesis;
pub mod tls;
pub mod trace;
pub mod units;

pub use error::{Error, Result};
pub use num_complex::Complex64;
