use thiserror::Error;

/// Every failure mode of the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("prototype has {len} coefficients, order {order} needs {expected}")]
    PrototypeLength { order: usize, len: usize, expected: usize },
    #[error("prototype coefficient g{index} = {value} is not positive")]
    NonPositiveCoefficient { index: usize, value: f64 },
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },
    #[error("inverter unrealizable: J = {j} S is not below Yc = {yc} S")]
    UnrealizableInverter { j: f64, yc: f64 },
    #[error("synthesis failure: {element} = {value} is not positive")]
    NonPositiveComponent { element: &'static str, value: f64 },
    #[error("synthesis failure: trimmed line length {theta_deg} deg outside (0, 90)")]
    LineLength { theta_deg: f64 },
    #[error("snake bias singularity at delta0 = {delta0} rad")]
    BiasSingularity { delta0: f64 },
    #[error("target inductance {target} H outside reachable range [{min}, {max}] H")]
    UnreachableBias { target: f64, min: f64, max: f64 },
    #[error("singular system matrix (parametric oscillation threshold)")]
    Singular,
    #[error("singular system matrix at {freq_hz} Hz (parametric oscillation threshold)")]
    ThresholdAt { freq_hz: f64 },
    #[error("gain never reaches {level_db} dB")]
    NoBand { level_db: f64 },
    #[error("degenerate two-port: S-parameter denominator vanishes")]
    DegenerateConversion,
    #[error("parametric inverter must be non-zero")]
    ZeroInverter,
    #[error("netlist has no parametric inverter")]
    NoInverter,
    #[error("pump excursion reaches the inductance singularity")]
    PumpSingularity,
    #[error("no 1 dB compression point in the curve")]
    NoCompressionPoint,
    #[error("susceptibility pole at omega = {omega} rad/s")]
    SusceptibilityPole { omega: f64 },
    #[error("quadrature did not converge (estimate {estimate}, error {error})")]
    Quadrature { estimate: f64, error: f64 },
    #[error("root not bracketed on [{lo}, {hi}]")]
    NotBracketed { lo: f64, hi: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;
