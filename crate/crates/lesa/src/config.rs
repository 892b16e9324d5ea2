//! INI run configuration: `[section]` headers, `key = value` lines, `#`
//! comments. Every key carries its unit as a suffix.

use std::fmt::{self, Write as _};
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn new(line: Option<usize>, message: impl Into<String>) -> Self {
        Self { line, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(n) => write!(f, "line {n}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

type Result<T> = std::result::Result<T, ConfigError>;

/// Accepted keys per section.
pub const SCHEMA: &[(&str, &[&str])] = &[
    (
        "design",
        &["f0_hz", "fractional_bandwidth", "g", "z1", "z2", "z3", "z0", "theta_trim_deg", "gain_db", "ripple_db"],
    ),
    ("snake", &["n_total", "ic_a", "l1s_h", "l2s_h", "lb_h", "l_target_h"]),
    ("pump", &["delta_p_rad", "target_gain_db"]),
    (
        "tls",
        &[
            "t1_s",
            "t2_s",
            "qi",
            "dipole_debye",
            "t_diel_m",
            "k3_per_v2",
            "from_p1db",
            "gain_db",
            "f0_hz",
            "fractional_bandwidth",
            "z1",
        ],
    ),
    ("sweep", &["f_start_hz", "f_stop_hz", "n_points", "p_start_dbm", "p_stop_dbm", "p_points", "delta_f_hz"]),
    ("noise", &["t_hemt_k"]),
];

fn section_keys(name: &str) -> Option<&'static [&'static str]> {
    SCHEMA.iter().find(|(s, _)| *s == name).map(|(_, k)| *k)
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    key: String,
    value: String,
    line: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
struct Section {
    name: String,
    line: Option<usize>,
    entries: Vec<Entry>,
}

/// Untyped, schema-checked key/value layer. Overrides are applied here before
/// the typed config is built.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Ini {
    sections: Vec<Section>,
}

impl Ini {
    pub fn parse(text: &str) -> Result<Self> {
        let mut ini = Ini::default();
        for (i, raw) in text.lines().enumerate() {
            let n = Some(i + 1);
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name =
                    rest.strip_suffix(']').ok_or_else(|| ConfigError::new(n, "unterminated section header"))?.trim();
                if section_keys(name).is_none() {
                    return Err(ConfigError::new(n, format!("unknown section [{name}]")));
                }
                if ini.section(name).is_some() {
                    return Err(ConfigError::new(n, format!("duplicate section [{name}]")));
                }
                ini.sections.push(Section { name: name.to_string(), line: n, entries: Vec::new() });
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::new(n, format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let sec =
                ini.sections.last_mut().ok_or_else(|| ConfigError::new(n, format!("key {key} outside any section")))?;
            if !section_keys(&sec.name).unwrap_or(&[]).contains(&key) {
                return Err(ConfigError::new(n, format!("unknown key {key} in [{}]", sec.name)));
            }
            if sec.entries.iter().any(|e| e.key == key) {
                return Err(ConfigError::new(n, format!("duplicate key {}.{key}", sec.name)));
            }
            if value.is_empty() {
                return Err(ConfigError::new(n, format!("{}.{key} has no value", sec.name)));
            }
            sec.entries.push(Entry { key: key.to_string(), value: value.to_string(), line: n });
        }
        Ok(ini)
    }

    fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    /// Sets `section.key` or a bare key that names exactly one schema entry.
    pub fn set(&mut self, path: &str, value: &str) -> Result<()> {
        let (section, key) = match path.split_once('.') {
            Some((s, k)) => {
                let keys = section_keys(s).ok_or_else(|| ConfigError::new(None, format!("unknown section [{s}]")))?;
                if !keys.contains(&k) {
                    return Err(ConfigError::new(None, format!("unknown key {k} in [{s}]")));
                }
                (s, k)
            }
            None => {
                let owners: Vec<&str> =
                    SCHEMA.iter().filter(|(_, keys)| keys.contains(&path)).map(|(s, _)| *s).collect();
                match owners.as_slice() {
                    [s] => (*s, path),
                    [] => return Err(ConfigError::new(None, format!("unknown key {path}"))),
                    _ => {
                        return Err(ConfigError::new(
                            None,
                            format!("key {path} is ambiguous, use one of {}", owners.join(", ")),
                        ))
                    }
                }
            }
        };
        let value = value.trim();
        if value.is_empty() {
            return Err(ConfigError::new(None, format!("{section}.{key} has no value")));
        }
        if self.section(section).is_none() {
            self.sections.push(Section { name: section.to_string(), line: None, entries: Vec::new() });
        }
        let sec = self.sections.iter_mut().find(|s| s.name == section).unwrap();
        match sec.entries.iter_mut().find(|e| e.key == key) {
            Some(e) => {
                e.value = value.to_string();
                e.line = None;
            }
            None => sec.entries.push(Entry { key: key.to_string(), value: value.to_string(), line: None }),
        }
        Ok(())
    }
}

struct Reader<'a> {
    sec: &'a Section,
}

impl Reader<'_> {
    fn entry(&self, key: &str) -> Option<&Entry> {
        self.sec.entries.iter().find(|e| e.key == key)
    }

    fn bad(&self, key: &str, reason: &str) -> ConfigError {
        let line = self.entry(key).and_then(|e| e.line).or(self.sec.line);
        ConfigError::new(line, format!("{}.{key}: {reason}", self.sec.name))
    }

    fn opt<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entry(key) {
            None => Ok(None),
            Some(e) => e.value.parse().map(Some).map_err(|_| self.bad(key, &format!("cannot parse {:?}", e.value))),
        }
    }

    fn num(&self, key: &str) -> Result<Option<f64>> {
        match self.opt::<f64>(key)? {
            Some(v) if !v.is_finite() => Err(self.bad(key, "must be finite")),
            v => Ok(v),
        }
    }

    fn req(&self, key: &str) -> Result<f64> {
        self.num(key)?.ok_or_else(|| self.bad(key, "missing"))
    }

    fn positive(&self, key: &str) -> Result<f64> {
        let v = self.req(key)?;
        self.check(v > 0.0, key, "must be positive")?;
        Ok(v)
    }

    fn opt_positive(&self, key: &str) -> Result<Option<f64>> {
        let v = self.num(key)?;
        if let Some(x) = v {
            self.check(x > 0.0, key, "must be positive")?;
        }
        Ok(v)
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        let Some(e) = self.entry(key) else { return Ok(None) };
        e.value
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| self.bad(key, &format!("cannot parse list item {:?}", s.trim())))
            })
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn check(&self, ok: bool, key: &str, reason: &str) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(self.bad(key, reason))
        }
    }

    fn exclusive(&self, a: &str, b: &str) -> Result<()> {
        match (self.entry(a).is_some(), self.entry(b).is_some()) {
            (true, true) => Err(self.bad(b, &format!("conflicts with {a}"))),
            (false, false) => {
                Err(ConfigError::new(self.sec.line, format!("[{}] needs one of {a} or {b}", self.sec.name)))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignConfig {
    pub f0_hz: f64,
    pub fractional_bandwidth: f64,
    pub g: Vec<f64>,
    pub z1: f64,
    pub z2: f64,
    pub z3: f64,
    pub z0: f64,
    pub theta_trim_deg: f64,
    pub gain_db: f64,
    pub ripple_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnakeConfig {
    pub n_total: u32,
    pub ic_a: f64,
    pub l1s_h: f64,
    pub l2s_h: f64,
    pub lb_h: f64,
    /// Bias target; the synthesized Z1/ω0 when absent.
    pub l_target_h: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PumpConfig {
    DeltaP(f64),
    TargetGainDb(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KerrConfig {
    PerV2(f64),
    /// Input-referred 1 dB compression power, dBm.
    FromP1db(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TlsConfig {
    pub t1_s: f64,
    pub t2_s: f64,
    pub qi: f64,
    pub dipole_debye: f64,
    pub t_diel_m: f64,
    pub kerr: KerrConfig,
    pub gain_db: f64,
    /// Device parameters for the drive map; the design values when absent.
    pub f0_hz: Option<f64>,
    pub fractional_bandwidth: Option<f64>,
    pub z1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub f_start_hz: f64,
    pub f_stop_hz: f64,
    pub n_points: usize,
    pub p_start_dbm: f64,
    pub p_stop_dbm: f64,
    pub p_points: usize,
    pub delta_f_hz: Vec<f64>,
}

impl SweepConfig {
    pub fn powers_dbm(&self) -> Vec<f64> {
        let step = (self.p_stop_dbm - self.p_start_dbm) / (self.p_points - 1) as f64;
        (0..self.p_points).map(|i| self.p_start_dbm + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    pub t_hemt_k: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub design: Option<DesignConfig>,
    pub snake: Option<SnakeConfig>,
    pub pump: Option<PumpConfig>,
    pub tls: Option<TlsConfig>,
    pub sweep: Option<SweepConfig>,
    pub noise: Option<NoiseConfig>,
}

fn missing(name: &str) -> ConfigError {
    ConfigError::new(None, format!("missing section [{name}]"))
}

impl RunConfig {
    pub fn from_ini(ini: &Ini) -> Result<Self> {
        let reader = |name: &str| ini.section(name).map(|sec| Reader { sec });
        let design = reader("design").map(|r| read_design(&r)).transpose()?;
        let snake = reader("snake").map(|r| read_snake(&r)).transpose()?;
        let pump = reader("pump").map(|r| read_pump(&r)).transpose()?;
        let tls = reader("tls").map(|r| read_tls(&r)).transpose()?;
        let sweep = reader("sweep").map(|r| read_sweep(&r)).transpose()?;
        let noise = reader("noise")
            .map(|r| -> Result<NoiseConfig> {
                let t = r.num("t_hemt_k")?.unwrap_or(DEFAULT_T_HEMT);
                r.check(t >= 0.0, "t_hemt_k", "must be non-negative")?;
                Ok(NoiseConfig { t_hemt_k: t })
            })
            .transpose()?;
        Ok(Self { design, snake, pump, tls, sweep, noise })
    }

    pub fn design(&self) -> Result<&DesignConfig> {
        self.design.as_ref().ok_or_else(|| missing("design"))
    }

    pub fn snake(&self) -> Result<&SnakeConfig> {
        self.snake.as_ref().ok_or_else(|| missing("snake"))
    }

    pub fn pump(&self) -> Result<&PumpConfig> {
        self.pump.as_ref().ok_or_else(|| missing("pump"))
    }

    pub fn tls(&self) -> Result<&TlsConfig> {
        self.tls.as_ref().ok_or_else(|| missing("tls"))
    }

    pub fn sweep(&self) -> Result<&SweepConfig> {
        self.sweep.as_ref().ok_or_else(|| missing("sweep"))
    }

    pub fn noise(&self) -> NoiseConfig {
        self.noise.clone().unwrap_or(NoiseConfig { t_hemt_k: DEFAULT_T_HEMT })
    }

    /// Canonical text form; `parse_config` of the result reproduces `self`.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        let mut section = |name: &str, rows: Vec<(&str, String)>| {
            if !out.is_empty() {
                out.push('\n');
            }
            let _ = writeln!(out, "[{name}]");
            for (k, v) in rows {
                let _ = writeln!(out, "{k} = {v}");
            }
        };
        if let Some(d) = &self.design {
            section(
                "design",
                vec![
                    ("f0_hz", num(d.f0_hz)),
                    ("fractional_bandwidth", num(d.fractional_bandwidth)),
                    ("g", list(&d.g)),
                    ("z1", num(d.z1)),
                    ("z2", num(d.z2)),
                    ("z3", num(d.z3)),
                    ("z0", num(d.z0)),
                    ("theta_trim_deg", num(d.theta_trim_deg)),
                    ("gain_db", num(d.gain_db)),
                    ("ripple_db", num(d.ripple_db)),
                ],
            );
        }
        if let Some(s) = &self.snake {
            let mut rows = vec![
                ("n_total", s.n_total.to_string()),
                ("ic_a", num(s.ic_a)),
                ("l1s_h", num(s.l1s_h)),
                ("l2s_h", num(s.l2s_h)),
                ("lb_h", num(s.lb_h)),
            ];
            if let Some(l) = s.l_target_h {
                rows.push(("l_target_h", num(l)));
            }
            section("snake", rows);
        }
        if let Some(p) = &self.pump {
            section(
                "pump",
                vec![match *p {
                    PumpConfig::DeltaP(v) => ("delta_p_rad", num(v)),
                    PumpConfig::TargetGainDb(v) => ("target_gain_db", num(v)),
                }],
            );
        }
        if let Some(t) = &self.tls {
            let mut rows = vec![
                ("t1_s", num(t.t1_s)),
                ("t2_s", num(t.t2_s)),
                ("qi", num(t.qi)),
                ("dipole_debye", num(t.dipole_debye)),
                ("t_diel_m", num(t.t_diel_m)),
                match t.kerr {
                    KerrConfig::PerV2(v) => ("k3_per_v2", num(v)),
                    KerrConfig::FromP1db(v) => ("from_p1db", num(v)),
                },
                ("gain_db", num(t.gain_db)),
            ];
            for (k, v) in [("f0_hz", t.f0_hz), ("fractional_bandwidth", t.fractional_bandwidth), ("z1", t.z1)] {
                if let Some(v) = v {
                    rows.push((k, num(v)));
                }
            }
            section("tls", rows);
        }
        if let Some(s) = &self.sweep {
            section(
                "sweep",
                vec![
                    ("f_start_hz", num(s.f_start_hz)),
                    ("f_stop_hz", num(s.f_stop_hz)),
                    ("n_points", s.n_points.to_string()),
                    ("p_start_dbm", num(s.p_start_dbm)),
                    ("p_stop_dbm", num(s.p_stop_dbm)),
                    ("p_points", s.p_points.to_string()),
                    ("delta_f_hz", list(&s.delta_f_hz)),
                ],
            );
        }
        if let Some(n) = &self.noise {
            section("noise", vec![("t_hemt_k", num(n.t_hemt_k))]);
        }
        out
    }
}

const DEFAULT_T_HEMT: f64 = 2.5;

/// Shortest round-trip form, in exponent notation outside [1e-3, 1e6).
fn num(v: f64) -> String {
    if v == 0.0 || (1e-3..1e6).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn list(v: &[f64]) -> String {
    v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", ")
}

fn read_design(r: &Reader) -> Result<DesignConfig> {
    let w = r.req("fractional_bandwidth")?;
    r.check((0.0..1.0).contains(&w), "fractional_bandwidth", "must lie in [0, 1)")?;
    let g = r.list("g")?.ok_or_else(|| r.bad("g", "missing"))?;
    r.check(g.len() >= 3, "g", "needs at least g0, g1 and g_{N+1}")?;
    r.check(g.iter().all(|&x| x > 0.0), "g", "coefficients must be positive")?;
    let ripple_db = r.num("ripple_db")?.unwrap_or(0.5);
    r.check(ripple_db >= 0.0, "ripple_db", "must be non-negative")?;
    Ok(DesignConfig {
        f0_hz: r.positive("f0_hz")?,
        fractional_bandwidth: w,
        g,
        z1: r.positive("z1")?,
        z2: r.positive("z2")?,
        z3: r.positive("z3")?,
        z0: r.positive("z0")?,
        theta_trim_deg: r.num("theta_trim_deg")?.unwrap_or(0.0),
        gain_db: r.opt_positive("gain_db")?.unwrap_or(20.0),
        ripple_db,
    })
}

fn read_snake(r: &Reader) -> Result<SnakeConfig> {
    let n_total: u32 = r.opt("n_total")?.ok_or_else(|| r.bad("n_total", "missing"))?;
    r.check(n_total > 0 && n_total.is_multiple_of(2), "n_total", "must be a positive even count")?;
    let lb_h = r.num("lb_h")?.unwrap_or(lesa_core::synthesis::DEFAULT_LB);
    r.check(lb_h >= 0.0, "lb_h", "must be non-negative")?;
    Ok(SnakeConfig {
        n_total,
        ic_a: r.positive("ic_a")?,
        l1s_h: r.positive("l1s_h")?,
        l2s_h: r.positive("l2s_h")?,
        lb_h,
        l_target_h: r.opt_positive("l_target_h")?,
    })
}

fn read_pump(r: &Reader) -> Result<PumpConfig> {
    r.exclusive("delta_p_rad", "target_gain_db")?;
    if let Some(v) = r.num("delta_p_rad")? {
        r.check(v >= 0.0, "delta_p_rad", "must be non-negative")?;
        return Ok(PumpConfig::DeltaP(v));
    }
    Ok(PumpConfig::TargetGainDb(r.positive("target_gain_db")?))
}

fn read_tls(r: &Reader) -> Result<TlsConfig> {
    r.exclusive("k3_per_v2", "from_p1db")?;
    let kerr = match r.num("k3_per_v2")? {
        Some(v) => {
            r.check(v >= 0.0, "k3_per_v2", "must be non-negative")?;
            KerrConfig::PerV2(v)
        }
        None => KerrConfig::FromP1db(r.req("from_p1db")?),
    };
    let t1_s = r.positive("t1_s")?;
    let t2_s = r.positive("t2_s")?;
    r.check(t2_s <= 2.0 * t1_s * (1.0 + 1e-12), "t2_s", "must not exceed 2·t1_s")?;
    let w = r.num("fractional_bandwidth")?;
    if let Some(w) = w {
        r.check(w > 0.0 && w < 1.0, "fractional_bandwidth", "must lie in (0, 1)")?;
    }
    Ok(TlsConfig {
        t1_s,
        t2_s,
        qi: r.positive("qi")?,
        dipole_debye: r.positive("dipole_debye")?,
        t_diel_m: r.opt_positive("t_diel_m")?.unwrap_or(lesa_core::tls::DEFAULT_T_DIEL),
        kerr,
        gain_db: r.opt_positive("gain_db")?.unwrap_or(20.0),
        f0_hz: r.opt_positive("f0_hz")?,
        fractional_bandwidth: w,
        z1: r.opt_positive("z1")?,
    })
}

fn read_sweep(r: &Reader) -> Result<SweepConfig> {
    let f_start_hz = r.num("f_start_hz")?.unwrap_or(4.4e9);
    let f_stop_hz = r.num("f_stop_hz")?.unwrap_or(5.4e9);
    r.check(f_start_hz > 0.0, "f_start_hz", "must be positive")?;
    r.check(f_stop_hz > f_start_hz, "f_stop_hz", "must exceed f_start_hz")?;
    let n_points: usize = r.opt("n_points")?.unwrap_or(2001);
    r.check(n_points >= 2, "n_points", "must be at least 2")?;
    let p_start_dbm = r.num("p_start_dbm")?.unwrap_or(-140.0);
    let p_stop_dbm = r.num("p_stop_dbm")?.unwrap_or(-60.0);
    r.check(p_stop_dbm > p_start_dbm, "p_stop_dbm", "must exceed p_start_dbm")?;
    let p_points: usize = r.opt("p_points")?.unwrap_or(81);
    r.check(p_points >= 2, "p_points", "must be at least 2")?;
    let delta_f_hz = r.list("delta_f_hz")?.unwrap_or_else(|| vec![10e3]);
    r.check(!delta_f_hz.is_empty() && delta_f_hz.iter().all(|&d| d > 0.0), "delta_f_hz", "values must be positive")?;
    Ok(SweepConfig { f_start_hz, f_stop_hz, n_points, p_start_dbm, p_stop_dbm, p_points, delta_f_hz })
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    RunConfig::from_ini(&Ini::parse(text)?)
}

/// Parses `text`, applies `section.key` (or bare key) overrides, validates.
pub fn parse_with_overrides(text: &str, overrides: &[(String, String)]) -> Result<RunConfig> {
    let mut ini = Ini::parse(text)?;
    for (k, v) in overrides {
        ini.set(k, v)?;
    }
    RunConfig::from_ini(&ini)
}

/// The as-designed amplifier: 4.9 GHz, 13.5 % bandwidth, 20 dB Chebyshev
/// match, with the measured-device TLS drive parameters.
pub const DESIGN_FIXTURE: &str = "\
# impedance-matched parametric amplifier, as designed
[design]
f0_hz = 4.9e9
fractional_bandwidth = 0.135
g = 1.0, 0.5899, 0.6681, 0.3753, 0.9045
z1 = 4.42
z2 = 20
z3 = 50
z0 = 50
theta_trim_deg = -6
gain_db = 20
ripple_db = 0.5

[snake]
n_total = 40
ic_a = 16e-6
l1s_h = 2.6e-12
l2s_h = 8e-12
lb_h = 50e-12
l_target_h = 144e-12

[pump]
target_gain_db = 20

[tls]
t1_s = 2e-6
t2_s = 4e-6
qi = 250
dipole_debye = 1
t_diel_m = 100e-9
k3_per_v2 = 2.1e9
gain_db = 20
f0_hz = 4.6e9
fractional_bandwidth = 0.085
z1 = 4.4

[sweep]
f_start_hz = 4.4e9
f_stop_hz = 5.4e9
n_points = 2001
p_start_dbm = -140
p_stop_dbm = -60
p_points = 81
delta_f_hz = 10e3

[noise]
t_hemt_k = 2.5
";

pub fn fixture(name: &str) -> Option<&'static str> {
    match name {
        "paper_design" => Some(DESIGN_FIXTURE),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_parses_to_design_values() {
        let c = parse_config(DESIGN_FIXTURE).unwrap();
        let d = c.design().unwrap();
        assert_eq!(d.f0_hz, 4.9e9);
        assert_eq!(d.g, vec![1.0, 0.5899, 0.6681, 0.3753, 0.9045]);
        assert_eq!(c.snake().unwrap().n_total, 40);
        assert_eq!(*c.pump().unwrap(), PumpConfig::TargetGainDb(20.0));
        assert_eq!(c.tls().unwrap().kerr, KerrConfig::PerV2(2.1e9));
        assert_eq!(c.sweep().unwrap().powers_dbm().len(), 81);
    }

    #[test]
    fn round_trip_is_identity() {
        let c = parse_config(DESIGN_FIXTURE).unwrap();
        assert_eq!(parse_config(&c.serialize()).unwrap(), c);
        let c2 = parse_config(
            "[design]\nf0_hz=1.2345678901234567e9\nfractional_bandwidth=0.1\ng=1,0.3,0.7\nz1=1\nz2=2\nz3=3\nz0=50\n\
             [tls]\nt1_s=1e-6\nt2_s=1.5e-6\nqi=1e12\ndipole_debye=2\nfrom_p1db=-93.5\n",
        )
        .unwrap();
        assert_eq!(parse_config(&c2.serialize()).unwrap(), c2);
    }

    #[test]
    fn alternatives_are_exclusive() {
        let both = parse_with_overrides(DESIGN_FIXTURE, &[("from_p1db".into(), "-93".into())]);
        assert!(both.unwrap_err().message.contains("conflicts"));
        let both = parse_with_overrides(DESIGN_FIXTURE, &[("pump.delta_p_rad".into(), "1.1".into())]);
        assert!(both.is_err());
        let e = parse_config("[pump]\n").unwrap_err();
        assert!(e.message.contains("delta_p_rad"));
    }

    #[test]
    fn empty_file_reports_missing_design() {
        let c = parse_config("").unwrap();
        let e = c.design().unwrap_err();
        assert!(e.message.contains("design"), "{e}");
    }

    #[test]
    fn negative_f0_names_key_and_line() {
        let text = DESIGN_FIXTURE.replace("f0_hz = 4.9e9", "f0_hz = -1");
        let e = parse_config(&text).unwrap_err();
        assert!(e.message.contains("f0_hz"), "{e}");
        assert_eq!(e.line, Some(3));
    }

    #[test]
    fn unknown_keys_and_sections_rejected() {
        let e = parse_config("[design]\nfoo = 1\n").unwrap_err();
        assert_eq!(e.line, Some(2));
        assert!(e.message.contains("foo"));
        assert!(parse_config("[nope]\n").is_err());
        assert!(parse_config("x = 1\n").is_err());
        assert!(parse_config("[pump]\ntarget_gain_db = 20\ntarget_gain_db = 21\n").is_err());
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let c = parse_config("# top\n\n[noise]  # trailing\nt_hemt_k = 3 # K\n").unwrap();
        assert_eq!(c.noise().t_hemt_k, 3.0);
    }

    #[test]
    fn bare_override_resolves_unique_key() {
        let c = parse_with_overrides(DESIGN_FIXTURE, &[("theta_trim_deg".into(), "0".into())]).unwrap();
        assert_eq!(c.design().unwrap().theta_trim_deg, 0.0);
        let e = parse_with_overrides(DESIGN_FIXTURE, &[("z1".into(), "4".into())]).unwrap_err();
        assert!(e.message.contains("ambiguous"));
        let e = parse_with_overrides(DESIGN_FIXTURE, &[("design.bogus".into(), "4".into())]).unwrap_err();
        assert!(e.message.contains("bogus"));
    }

    #[test]
    fn defaults_applied() {
        let c = parse_config("[sweep]\n[snake]\nn_total=2\nic_a=1e-6\nl1s_h=1e-12\nl2s_h=1e-12\n").unwrap();
        let s = c.sweep().unwrap();
        assert_eq!((s.n_points, s.p_points), (2001, 81));
        assert_eq!(c.snake().unwrap().lb_h, 50e-12);
        assert_eq!(c.noise().t_hemt_k, DEFAULT_T_HEMT);
    }
}
