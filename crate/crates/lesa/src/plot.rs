//! Polyline SVG charts of the command CSV outputs.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    Gain,
    Compress,
    Imd,
}

impl Schema {
    fn from_header(h: &[String]) -> Option<Self> {
        let h: Vec<&str> = h.iter().map(String::as_str).collect();
        match h.as_slice() {
            ["frequency_hz", "gain_db", "phase_deg"] | ["frequency_hz", "gain_db", "phase_deg", "idler_gain_db"] => {
                Some(Schema::Gain)
            }
            ["pin_dbm", "gain_db", "converged"] => Some(Schema::Compress),
            ["pin_dbm", "im3_dbm", "tls3_dbm", "kerr3_dbm", "im5_dbm", "valid"] => Some(Schema::Imd),
            _ => None,
        }
    }

    fn x_column(self) -> &'static str {
        match self {
            Schema::Gain => "frequency_hz",
            Schema::Compress | Schema::Imd => "pin_dbm",
        }
    }

    fn y_columns(self) -> &'static [&'static str] {
        match self {
            Schema::Gain | Schema::Compress => &["gain_db"],
            Schema::Imd => &["im3_dbm", "tls3_dbm", "kerr3_dbm"],
        }
    }

    fn y_label(self) -> &'static str {
        match self {
            Schema::Gain | Schema::Compress => "gain_db",
            Schema::Imd => "output_dbm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Linear,
    Log,
}

/// Columns already in logarithmic units (dB, dBm) or in Hz, degrees are drawn
/// on linear axes; any other all-positive column on a log axis.
pub fn axis_scale(column: &str, values: &[f64]) -> Scale {
    let linear = ["_db", "_dbm", "_hz", "_deg"].iter().any(|s| column.ends_with(s));
    if linear || values.iter().any(|&v| v <= 0.0) {
        Scale::Linear
    } else {
        Scale::Log
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

pub struct Table {
    pub schema: Schema,
    pub series: Vec<Series>,
}

pub fn read_table(path: &Path) -> Result<Table> {
    let schema_err = |message: String| CliError::Schema { path: path.display().to_string(), message };
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    let schema = Schema::from_header(&header).ok_or_else(|| schema_err(format!("unrecognized header {header:?}")))?;
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let xi = col(schema.x_column());
    let stem = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
    let mut series: Vec<Series> = schema
        .y_columns()
        .iter()
        .map(|c| Series {
            label: if schema.y_columns().len() > 1 { format!("{stem}: {c}") } else { stem.clone() },
            points: Vec::new(),
        })
        .collect();
    for (n, rec) in r.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| schema_err(format!("row {}: column {} is not a number", n + 2, header[i])))
        };
        let x = num(xi)?;
        for (s, c) in series.iter_mut().zip(schema.y_columns()) {
            s.points.push((x, num(col(c))?));
        }
    }
    Ok(Table { schema, series })
}

const W: f64 = 800.0;
const H: f64 = 500.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 220.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 60.0;
const COLORS: &[&str] = &["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"];

struct Axis {
    scale: Scale,
    lo: f64,
    hi: f64,
}

impl Axis {
    fn new(scale: Scale, values: impl Iterator<Item = f64>) -> Self {
        let t = |v: f64| if scale == Scale::Log { v.log10() } else { v };
        let (mut lo, mut hi) = values.map(t).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        if !lo.is_finite() || !hi.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if hi - lo < 1e-12 * hi.abs().max(1.0) {
            lo -= 0.5;
            hi += 0.5;
        }
        Axis { scale, lo, hi }
    }

    fn frac(&self, v: f64) -> f64 {
        let v = if self.scale == Scale::Log { v.log10() } else { v };
        (v - self.lo) / (self.hi - self.lo)
    }

    /// Tick positions (in data units) on a 1-2-5 grid.
    fn ticks(&self) -> Vec<f64> {
        let span = self.hi - self.lo;
        let raw = span / 5.0;
        let mag = 10f64.powf(raw.log10().floor());
        let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
        let first = (self.lo / step).ceil() as i64;
        let last = (self.hi / step).floor() as i64;
        (first..=last)
            .map(|k| k as f64 * step)
            .map(|v| if self.scale == Scale::Log { 10f64.powf(v) } else { v })
            .collect()
    }
}

fn label(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e5 || v.abs() < 1e-3) {
        format!("{v:.3e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// Deterministic overlay chart of every series in `tables`.
pub fn render_svg(tables: &[Table]) -> Result<String> {
    let schema = tables.first().map(|t| t.schema).ok_or_else(|| CliError::Usage("no CSV files given".into()))?;
    if tables.iter().any(|t| t.schema != schema) {
        return Err(CliError::Schema { path: "plot".into(), message: "CSV files use different schemas".into() });
    }
    let series: Vec<&Series> = tables.iter().flat_map(|t| &t.series).collect();
    let finite = |p: &&(f64, f64)| p.0.is_finite() && p.1.is_finite();
    let xs: Vec<f64> = series.iter().flat_map(|s| s.points.iter().filter(finite).map(|p| p.0)).collect();
    let ys: Vec<f64> = series.iter().flat_map(|s| s.points.iter().filter(finite).map(|p| p.1)).collect();
    let x_name = schema.x_column();
    let y_name = schema.y_label();
    let xa = Axis::new(axis_scale(x_name, &xs), xs.iter().copied());
    let ya = Axis::new(axis_scale(y_name, &ys), ys.iter().copied());
    let pw = W - LEFT - RIGHT;
    let ph = H - TOP - BOTTOM;
    let px = |x: f64| LEFT + xa.frac(x) * pw;
    let py = |y: f64| TOP + (1.0 - ya.frac(y)) * ph;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for t in xa.ticks() {
        let x = px(t);
        let _ = writeln!(
            s,
            r##"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="#ddd"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
            TOP + ph,
            TOP + ph + 16.0,
            label(t)
        );
    }
    for t in ya.ticks() {
        let y = py(t);
        let _ = writeln!(
            s,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#ddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
            LEFT + pw,
            LEFT - 6.0,
            y + 4.0,
            label(t)
        );
    }
    let _ = writeln!(s, r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{x_name}</text>"#, LEFT + pw / 2.0, H - 15.0);
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{y_name}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0
    );
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        // Non-finite samples split the line.
        for run in ser.points.split(|p| !(p.0.is_finite() && p.1.is_finite())) {
            if run.is_empty() {
                continue;
            }
            let pts: Vec<String> = run.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                pts.join(" ")
            );
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = LEFT + pw + 12.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            escape(&ser.label)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn escape(t: &str) -> String {
    t.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
