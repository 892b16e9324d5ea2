//! Pump linearization of the snake, gain compression from the signal-induced
//! shift of the array phases, P1dB/K3 extraction and the compression-only
//! system noise model.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::abcd::Netlist;
use crate::consts::{H, K_B, PHI0, PI};
use crate::synthesis::{snake_inductance, SnakeParams};
use crate::units::{db20, dbm_to_peak_volts, dbm_to_watts, from_db10};
use crate::{Error, Result};

/// dc phase, pump phase amplitude and pump frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PumpOperatingPoint {
    pub delta0: f64,
    pub delta_p: f64,
    pub omega_p: f64,
}

impl PumpOperatingPoint {
    pub fn omega0(&self) -> f64 {
        self.omega_p / 2.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PumpLinearization {
    /// Inverse of the pump-averaged inverse inductance, H.
    pub l_eff: f64,
    /// Fractional first-harmonic modulation of 1/L.
    pub modulation_depth: f64,
    /// Parametric inverter, S.
    pub jpa: f64,
}

/// Samples per pump period in the Fourier projection.
pub const PUMP_SAMPLES: usize = 2048;

// Smallest cos δ reached by δ0 ± δp.
fn min_cos(lo: f64, hi: f64) -> f64 {
    let k = libm::ceil((lo - PI) / (2.0 * PI));
    if PI + 2.0 * PI * k <= hi {
        -1.0
    } else {
        libm::cos(lo).min(libm::cos(hi))
    }
}

/// Inductance of the two arrays with their phases split by ±`shift`, in
/// parallel, plus the stray inductance.
pub fn split_snake_inductance(s: &SnakeParams, delta: f64, shift: f64) -> Result<f64> {
    let n = s.per_array();
    let a = n * s.stage_inductance(delta + shift)?;
    let b = n * s.stage_inductance(delta - shift)?;
    Ok(s.lb + a * b / (a + b))
}

fn check_excursion(s: &SnakeParams, lo: f64, hi: f64) -> Result<()> {
    let den = s.lj() + (4.0 * s.l1s + s.l2s) * min_cos(lo, hi);
    if den <= 1e-9 * s.lj() {
        Err(Error::PumpSingularity)
    } else {
        Ok(())
    }
}

/// Pump linearization with the two arrays' dc phases split by ±`shift`.
pub fn pump_to_jpa_split(s: &SnakeParams, op: &PumpOperatingPoint, shift: f64) -> Result<PumpLinearization> {
    s.validate()?;
    if op.delta_p.is_nan() {
        return Err(Error::InvalidParameter { name: "delta_p", reason: "must be finite" });
    }
    if !(op.omega_p > 0.0) {
        return Err(Error::InvalidParameter { name: "omega_p", reason: "must be positive" });
    }
    let amp = libm::fabs(op.delta_p);
    let shift = libm::fabs(shift);
    check_excursion(s, op.delta0 - amp - shift, op.delta0 + amp + shift)?;
    if amp == 0.0 {
        let l_eff = split_snake_inductance(s, op.delta0, shift)?;
        return Ok(PumpLinearization { l_eff, modulation_depth: 0.0, jpa: 0.0 });
    }
    let mut dc = 0.0;
    let mut h1 = Complex64::new(0.0, 0.0);
    for k in 0..PUMP_SAMPLES {
        let t = 2.0 * PI * k as f64 / PUMP_SAMPLES as f64;
        let l = split_snake_inductance(s, op.delta0 + amp * libm::cos(t), shift).map_err(|_| Error::PumpSingularity)?;
        if !(l > 0.0) {
            return Err(Error::PumpSingularity);
        }
        let inv = 1.0 / l;
        dc += inv;
        h1 += Complex64::new(libm::cos(t), -libm::sin(t)) * inv;
    }
    dc /= PUMP_SAMPLES as f64;
    h1 *= 2.0 / PUMP_SAMPLES as f64;
    let l_eff = 1.0 / dc;
    let modulation_depth = h1.norm() * l_eff;
    Ok(PumpLinearization { l_eff, modulation_depth, jpa: modulation_depth / (2.0 * op.omega0() * l_eff) })
}

pub fn pump_to_jpa(s: &SnakeParams, op: &PumpOperatingPoint) -> Result<PumpLinearization> {
    pump_to_jpa_split(s, op, 0.0)
}

/// Pump amplitude that yields parametric inverter `j_target`, searched on
/// the rising branch of J(δp) from δp = 0.
pub fn solve_pump_amplitude(s: &SnakeParams, delta0: f64, omega_p: f64, j_target: f64) -> Result<f64> {
    let op = |dp| PumpOperatingPoint { delta0, delta_p: dp, omega_p };
    let j_of = |dp| pump_to_jpa(s, &op(dp)).map(|p| p.jpa);
    let steps = 400;
    let mut prev = 0.0;
    for i in 1..=steps {
        let dp = PI * i as f64 / steps as f64;
        match j_of(dp) {
            Ok(j) if j >= j_target => {
                return crate::roots::bisect(|d| j_of(d).map(|j| j - j_target).unwrap_or(f64::NAN), prev, dp, 1e-12);
            }
            Ok(_) => prev = dp,
            Err(_) => break,
        }
    }
    Err(Error::NotBracketed { lo: 0.0, hi: prev })
}

/// Signal gain at `omega` as a function of the inverter, for operating-point
/// searches.
pub fn center_gain_db(netlist: &Netlist, omega: f64) -> Result<f64> {
    Ok(db20(netlist.s11(omega)?.norm()))
}

/// Inverter value giving `target_db` at `omega`: the first crossing when
/// increasing J from zero, below the oscillation threshold.
pub fn solve_jpa_for_gain(netlist: &Netlist, omega: f64, target_db: f64, j_max: f64) -> Result<f64> {
    let gain_at = |j: f64| {
        let mut n = netlist.clone();
        n.set_inverter(j)?;
        center_gain_db(&n, omega)
    };
    let steps = 800;
    let mut prev = j_max / steps as f64;
    if gain_at(prev)? >= target_db {
        return Err(Error::NotBracketed { lo: 0.0, hi: prev });
    }
    for i in 2..=steps {
        let j = j_max * i as f64 / steps as f64;
        if gain_at(j)? >= target_db {
            return crate::roots::bisect(|x| gain_at(x).map(|g| g - target_db).unwrap_or(f64::NAN), prev, j, 1e-15);
        }
        prev = j;
    }
    Err(Error::NotBracketed { lo: 0.0, hi: j_max })
}

/// Operating point of a synthesized netlist: the inverter is set for
/// `target_db` at ω0 = ωP/2, the snake is biased to `l_target`, and the pump
/// amplitude is chosen to produce that inverter.
pub fn operating_point_for_gain(
    netlist: &Netlist,
    snake: &SnakeParams,
    l_target: f64,
    l_design: f64,
    omega_p: f64,
    target_db: f64,
    j_max: f64,
) -> Result<(Netlist, PumpedSnake)> {
    let j = solve_jpa_for_gain(netlist, omega_p / 2.0, target_db, j_max)?;
    let delta0 = crate::synthesis::solve_bias(snake, l_target)?;
    let delta_p = solve_pump_amplitude(snake, delta0, omega_p, j)?;
    let op = PumpOperatingPoint { delta0, delta_p, omega_p };
    operating_point_for_pump(netlist, snake, op, l_design)
}

/// Operating point for an explicit pump: the inverter follows from the pump
/// linearization.
pub fn operating_point_for_pump(
    netlist: &Netlist,
    snake: &SnakeParams,
    op: PumpOperatingPoint,
    l_design: f64,
) -> Result<(Netlist, PumpedSnake)> {
    let ps = PumpedSnake::new(*snake, op, l_design)?;
    let mut n = netlist.clone();
    n.set_inverter(ps.small_signal().jpa)?;
    Ok((n, ps))
}

/// A nonlinear element whose small-signal inductance and parametric
/// inverter depend on the signal current through it.
pub trait SaturableInductor {
    /// Inductance and inverter value at peak signal current `i_s` (A).
    fn linearize(&self, i_s: f64) -> Result<(f64, f64)>;
}

/// The pumped snake: signal current splits the two array phases by
/// ±(2π/Φ0)·L·I_s/2N around δ0, and the split arrays are re-linearized
/// under the pump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpedSnake {
    pub snake: SnakeParams,
    pub op: PumpOperatingPoint,
    /// Inductance used in the synthesized netlist at zero drive.
    pub l_design: f64,
    base: PumpLinearization,
    l_static: f64,
}

impl PumpedSnake {
    pub fn new(snake: SnakeParams, op: PumpOperatingPoint, l_design: f64) -> Result<Self> {
        Ok(Self {
            snake,
            op,
            l_design,
            base: pump_to_jpa(&snake, &op)?,
            l_static: snake_inductance(&snake, op.delta0)?,
        })
    }

    pub fn small_signal(&self) -> PumpLinearization {
        self.base
    }

    /// Per-array phase shift at peak current `i_s`.
    pub fn phase_shift(&self, i_s: f64) -> f64 {
        2.0 * PI / PHI0 * self.l_static * i_s / (2.0 * self.snake.per_array())
    }
}

impl SaturableInductor for PumpedSnake {
    fn linearize(&self, i_s: f64) -> Result<(f64, f64)> {
        let p = pump_to_jpa_split(&self.snake, &self.op, self.phase_shift(i_s))?;
        Ok((self.l_design + p.l_eff - self.base.l_eff, p.jpa))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressionOptions {
    /// Evaluation frequency, rad/s.
    pub omega: f64,
    pub damping: f64,
    pub tol_db: f64,
    pub max_iter: usize,
}

impl CompressionOptions {
    pub fn at(omega: f64) -> Self {
        Self { omega, damping: 0.5, tol_db: 1e-3, max_iter: 100 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CompressionPoint {
    pub pin_dbm: f64,
    pub gain_db: f64,
    pub phase_deg: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Peak signal current through the nonlinear element, A.
    pub current: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CompressionCurve {
    pub points: Vec<CompressionPoint>,
}

impl CompressionCurve {
    pub fn gains_db(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.gain_db).collect()
    }

    pub fn powers_dbm(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.pin_dbm).collect()
    }
}

fn apply(netlist: &mut Netlist, sites: (usize, usize), l: f64, j: f64) -> Result<()> {
    netlist.elements[sites.0] = netlist.elements[sites.0].with_inductance(l);
    netlist.elements[sites.1] = netlist.elements[sites.1].with_inductance(l);
    netlist.set_inverter(j)
}

fn solve_point(
    netlist: &Netlist,
    sites: (usize, usize),
    inverter: usize,
    element: &dyn SaturableInductor,
    pin_dbm: f64,
    opts: &CompressionOptions,
) -> Result<CompressionPoint> {
    let mut n = netlist.clone();
    // incident wave V+ = √(2 Z0 P) from a Thevenin source of twice that
    let v_source = Complex64::new(2.0 * dbm_to_peak_volts(pin_dbm, netlist.z_source), 0.0);
    let mut current = 0.0;
    let mut last_gain = f64::NAN;
    for it in 1..=opts.max_iter {
        let (l, j) = element.linearize(current)?;
        apply(&mut n, sites, l, j)?;
        let s11 = n.s11(opts.omega)?;
        let gain_db = db20(s11.norm());
        let v = n.node_voltage(opts.omega, inverter, v_source)?;
        let target = v.norm() / (opts.omega * l);
        if libm::fabs(gain_db - last_gain) < opts.tol_db {
            return Ok(CompressionPoint {
                pin_dbm,
                gain_db,
                phase_deg: s11.arg().to_degrees(),
                converged: true,
                iterations: it,
                current,
            });
        }
        last_gain = gain_db;
        current += opts.damping * (target - current);
    }
    let (l, j) = element.linearize(current)?;
    apply(&mut n, sites, l, j)?;
    let s11 = n.s11(opts.omega)?;
    Ok(CompressionPoint {
        pin_dbm,
        gain_db: db20(s11.norm()),
        phase_deg: s11.arg().to_degrees(),
        converged: false,
        iterations: opts.max_iter,
        current,
    })
}

/// Damped fixed-point gain under drive for each incident power. Points that
/// exhaust the iteration budget are returned with `converged = false`.
pub fn compression_sweep(
    netlist: &Netlist,
    element: &dyn SaturableInductor,
    powers_dbm: &[f64],
    opts: &CompressionOptions,
) -> Result<CompressionCurve> {
    if powers_dbm.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter { name: "power grid", reason: "must be strictly increasing" });
    }
    let sites = netlist.pumped_inductors()?;
    let inverter = netlist.inverter_index().ok_or(Error::NoInverter)?;
    let points =
        powers_dbm.iter().map(|&p| solve_point(netlist, sites, inverter, element, p, opts)).collect::<Result<_>>()?;
    Ok(CompressionCurve { points })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct P1db {
    pub input_dbm: f64,
    pub output_dbm: f64,
    /// Gain at the crossing (small-signal gain − 1 dB).
    pub gain_db: f64,
    /// Signal phase at the crossing relative to the lowest-power point.
    pub phase_change_deg: f64,
}

/// 1 dB compression point, referenced to the gain at the lowest power.
pub fn p1db(curve: &CompressionCurve) -> Result<P1db> {
    let pts = &curve.points;
    let first = pts.first().ok_or(Error::NoCompressionPoint)?;
    let target = first.gain_db - 1.0;
    for w in pts.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if b.gain_db <= target {
            let t = (a.gain_db - target) / (a.gain_db - b.gain_db);
            let input_dbm = a.pin_dbm + t * (b.pin_dbm - a.pin_dbm);
            let phase = a.phase_deg + t * wrap_deg(b.phase_deg - a.phase_deg);
            return Ok(P1db {
                input_dbm,
                output_dbm: input_dbm + target,
                gain_db: target,
                phase_change_deg: wrap_deg(phase - first.phase_deg),
            });
        }
    }
    Err(Error::NoCompressionPoint)
}

fn wrap_deg(d: f64) -> f64 {
    let r = libm::fmod(d + 180.0, 360.0);
    if r < 0.0 {
        r + 180.0
    } else {
        r - 180.0
    }
}

/// Kerr coefficient (V⁻²) for which a cubic response u(1 − ¾K3u²) compresses
/// by 1 dB at the peak input amplitude corresponding to `input_p1db_dbm`.
pub fn k3_from_p1db(input_p1db_dbm: f64, z0: f64) -> f64 {
    let v2 = 2.0 * z0 * dbm_to_watts(input_p1db_dbm);
    4.0 / 3.0 * (1.0 - libm::pow(10.0, -1.0 / 20.0)) / v2
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoiseModelParams {
    pub t_hemt: f64,
    pub f0_hz: f64,
}

impl NoiseModelParams {
    /// Quantum-limited input noise, one photon: h f0 / k_B.
    pub fn t_q(&self) -> f64 {
        H * self.f0_hz / K_B
    }
}

/// Output noise change 10·log10(N(P)/N(P_min)) with N = G·T_q + T_hemt.
pub fn system_noise_model(gains_db: &[f64], nm: &NoiseModelParams) -> Vec<f64> {
    let tq = nm.t_q();
    let noise = |g_db: f64| from_db10(g_db) * tq + nm.t_hemt;
    let Some(&g0) = gains_db.first() else {
        return Vec::new();
    };
    let n0 = noise(g0);
    gains_db.iter().map(|&g| 10.0 * libm::log10(noise(g) / n0)).collect()
}
