//! The five commands, each returning the files it produces.

use lesa_core::abcd::{gain_sweep, lesa_netlist, Netlist};
use lesa_core::consts::{DEBYE, PI};
use lesa_core::coupled_mode::{sweep, ModeGraph};
use lesa_core::nonlinear::{
    compression_sweep, k3_from_p1db, operating_point_for_gain, operating_point_for_pump, p1db, solve_jpa_for_gain,
    system_noise_model, CompressionOptions, NoiseModelParams, PumpOperatingPoint, PumpedSnake,
};
use lesa_core::prototype::{jpa_from_couplings, jpa_prototype, reduced_couplings, BandSpec, ChebyshevPrototype};
use lesa_core::synthesis::{
    immittance_inverters, realize_network, solve_bias, ComponentSet, ImpedancePlan, SnakeParams,
};
use lesa_core::tls::{imd_sweep, ImdDriveMap, TlsBathParams};
use lesa_core::trace::{band_metrics, GainTrace};
use lesa_core::units::from_db10;
use serde_json::{json, Value};

use crate::config::{DesignConfig, KerrConfig, PumpConfig, RunConfig, SnakeConfig};
use crate::error::{CliError, Result};
use crate::output::{csv_table, finite, metadata, ReportBundle};

/// Upper end of the inverter search when solving for a target gain, S.
const J_SEARCH_MAX: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    CoupledMode,
    Abcd,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::CoupledMode => "cm",
            Engine::Abcd => "abcd",
        }
    }
}

pub fn prototype(d: &DesignConfig) -> Result<ChebyshevPrototype> {
    let order = d.g.len().saturating_sub(2);
    Ok(ChebyshevPrototype::new(order, d.g.clone(), d.gain_db, d.ripple_db)?)
}

pub fn band(d: &DesignConfig) -> Result<BandSpec> {
    Ok(BandSpec::new(d.f0_hz, d.fractional_bandwidth)?)
}

pub fn plan(d: &DesignConfig) -> ImpedancePlan {
    ImpedancePlan { z1: d.z1, z2: d.z2, z3: d.z3, z0: d.z0 }
}

pub fn snake_params(s: &SnakeConfig) -> Result<SnakeParams> {
    let p = SnakeParams { n_total: s.n_total, ic: s.ic_a, l1s: s.l1s_h, l2s: s.l2s_h, lb: s.lb_h };
    p.validate()?;
    Ok(p)
}

fn components(d: &DesignConfig) -> Result<ComponentSet> {
    Ok(realize_network(&prototype(d)?, &band(d)?, &plan(d), d.theta_trim_deg)?)
}

/// Three significant figures, as printed in design tables.
fn sig3(x: f64) -> f64 {
    format!("{x:.2e}").parse().unwrap_or(x)
}

pub fn cmd_synth(cfg: &RunConfig) -> Result<ReportBundle> {
    let d = cfg.design()?;
    let s = cfg.snake()?;
    let p = prototype(d)?;
    let b = band(d)?;
    let inv = immittance_inverters(&p, &b, &plan(d))?;
    let c = components(d)?;
    let couplings = reduced_couplings(&p, &b)?;
    let snake = snake_params(s)?;
    let l_target = s.l_target_h.unwrap_or(c.l_snake);
    let delta0 = solve_bias(&snake, l_target)?;
    let report = json!({
        "metadata": metadata("synth", cfg),
        "inverters": { "j12_s": inv.j12, "j23_s": inv.j23, "k34_ohm": inv.k34 },
        "components": c,
        "c1_pf": sig3(c.c1 * 1e12),
        "c2_pf": sig3(c.c2 * 1e12),
        "c12_pf": sig3(c.c12 * 1e12),
        "c23_pf": sig3(c.c23 * 1e12),
        "l2_nh": sig3(c.l2 * 1e9),
        "l34_nh": sig3(c.l34 * 1e9),
        "l_snake_ph": sig3(c.l_snake * 1e12),
        "theta_deg": sig3(c.theta_deg),
        "theta_trimmed_deg": sig3(c.effective_theta_deg()),
        "couplings": {
            "gamma0_rad_s": couplings.gamma0,
            "gamma0_over_2pi_hz": couplings.gamma0 / (2.0 * PI),
            "chain": couplings.chain,
            "beta_p": couplings.beta_p,
        },
        "jpa_s": {
            "from_couplings": jpa_from_couplings(&couplings, b.omega0(), d.z1)?,
            "from_prototype": jpa_prototype(&p, d.fractional_bandwidth, d.z1)?,
        },
        "bias": { "l_target_h": l_target, "delta0_rad": delta0 },
    });
    let mut out = ReportBundle::default();
    out.add_json("synth.json", &report)?;
    Ok(out)
}

/// The pumped amplifier netlist and, when a snake is configured, the pump
/// operating point that produces its inverter.
fn pumped_netlist(cfg: &RunConfig, pump: PumpConfig) -> Result<(Netlist, ComponentSet, Option<PumpedSnake>)> {
    let d = cfg.design()?;
    let c = components(d)?;
    let w0 = 2.0 * PI * d.f0_hz;
    let wp = 2.0 * w0;
    let probe = jpa_from_couplings(&reduced_couplings(&prototype(d)?, &band(d)?)?, w0, d.z1)?;
    let net = lesa_netlist(&c, d.z0, w0, wp, Some(probe))?;
    let snake = cfg.snake.as_ref().map(|s| snake_params(s).map(|p| (p, s.l_target_h.unwrap_or(c.l_snake))));
    match pump {
        PumpConfig::TargetGainDb(g) => match snake {
            Some(sp) => {
                let (sp, l_target) = sp?;
                let (n, ps) = operating_point_for_gain(&net, &sp, l_target, c.l_snake, wp, g, J_SEARCH_MAX)?;
                Ok((n, c, Some(ps)))
            }
            None => {
                let mut n = net;
                n.set_inverter(solve_jpa_for_gain(&n, w0, g, J_SEARCH_MAX)?)?;
                Ok((n, c, None))
            }
        },
        PumpConfig::DeltaP(delta_p) => {
            let (sp, l_target) = snake.ok_or_else(|| {
                CliError::Config(crate::config::ConfigError {
                    line: None,
                    message: "pump.delta_p_rad needs a [snake] section".into(),
                })
            })??;
            let op = PumpOperatingPoint { delta0: solve_bias(&sp, l_target)?, delta_p, omega_p: wp };
            let (n, ps) = operating_point_for_pump(&net, &sp, op, c.l_snake)?;
            Ok((n, c, Some(ps)))
        }
    }
}

fn pump_report(net: &Netlist, ps: &Option<PumpedSnake>) -> Value {
    json!({
        "jpa_s": net.inverter_value(),
        "delta0_rad": ps.map(|p| p.op.delta0),
        "delta_p_rad": ps.map(|p| p.op.delta_p),
    })
}

fn gain_csv(trace: &GainTrace, with_idler: bool) -> Result<Vec<u8>> {
    let g = trace.gain_db();
    let ph = trace.phase_deg();
    let idler = trace.idler_gain_db();
    let mut header = vec!["frequency_hz", "gain_db", "phase_deg"];
    if with_idler {
        header.push("idler_gain_db");
    }
    let rows = (0..trace.len()).map(|i| {
        let mut r = vec![trace.frequencies_hz[i].to_string(), g[i].to_string(), ph[i].to_string()];
        if with_idler {
            r.push(idler.as_ref().map_or(f64::NAN, |v| v[i]).to_string());
        }
        r
    });
    csv_table(&header, rows)
}

pub fn cmd_gain(cfg: &RunConfig, engine: Engine) -> Result<ReportBundle> {
    let d = cfg.design()?;
    let sw = cfg.sweep()?;
    let p = prototype(d)?;
    let (trace, pump) = match engine {
        Engine::CoupledMode => {
            let graph = ModeGraph::new(2.0 * PI * d.f0_hz, reduced_couplings(&p, &band(d)?)?)?;
            (sweep(&graph, sw.f_start_hz, sw.f_stop_hz, sw.n_points)?, Value::Null)
        }
        Engine::Abcd => match cfg.pump {
            Some(pump) => {
                let (net, _, ps) = pumped_netlist(cfg, pump)?;
                (gain_sweep(&net, sw.f_start_hz, sw.f_stop_hz, sw.n_points)?, pump_report(&net, &ps))
            }
            None => {
                let c = components(d)?;
                let w0 = 2.0 * PI * d.f0_hz;
                let net = lesa_netlist(&c, d.z0, w0, 2.0 * w0, None)?;
                (gain_sweep(&net, sw.f_start_hz, sw.f_stop_hz, sw.n_points)?, json!("off"))
            }
        },
    };
    let metrics = match band_metrics(&trace, p.design_gain_db()) {
        Ok(m) => json!(m),
        Err(e) => json!({ "note": e.to_string() }),
    };
    let name = engine.name();
    let mut out = ReportBundle::default();
    out.add(format!("gain_{name}.csv"), gain_csv(&trace, engine == Engine::CoupledMode)?);
    out.add_json(
        format!("gain_{name}.json"),
        &json!({
            "metadata": metadata("gain", cfg),
            "engine": name,
            "design_gain_db": p.design_gain_db(),
            "band_metrics": metrics,
            "pump": pump,
        }),
    )?;
    Ok(out)
}

pub fn cmd_compress(cfg: &RunConfig) -> Result<ReportBundle> {
    let d = cfg.design()?;
    let sw = cfg.sweep()?;
    let pump = *cfg.pump()?;
    cfg.snake()?;
    let (net, _, ps) = pumped_netlist(cfg, pump)?;
    let ps = ps.expect("snake configured");
    let w0 = 2.0 * PI * d.f0_hz;
    let powers = sw.powers_dbm();
    let curve = compression_sweep(&net, &ps, &powers, &CompressionOptions::at(w0))?;
    if curve.points.iter().all(|p| !p.converged) {
        return Err(CliError::NoConvergence);
    }
    let gains = curve.gains_db();
    let noise = system_noise_model(&gains, &NoiseModelParams { t_hemt: cfg.noise().t_hemt_k, f0_hz: d.f0_hz });
    let (p1, k3) = match p1db(&curve) {
        Ok(q) => {
            let k3 = k3_from_p1db(q.input_dbm, d.z0);
            (
                json!({
                    "input_dbm": q.input_dbm,
                    "output_dbm": q.output_dbm,
                    "gain_db": q.gain_db,
                    "phase_change_deg": q.phase_change_deg,
                }),
                json!({ "per_v2": k3, "per_uv2": k3 * 1e-12 }),
            )
        }
        Err(e) => (json!({ "note": format!("not found: {e}") }), Value::Null),
    };
    let rows = curve.points.iter().map(|p| vec![p.pin_dbm.to_string(), p.gain_db.to_string(), p.converged.to_string()]);
    let mut out = ReportBundle::default();
    out.add("compress.csv", csv_table(&["pin_dbm", "gain_db", "converged"], rows)?);
    out.add_json(
        "compress.json",
        &json!({
            "metadata": metadata("compress", cfg),
            "pump": pump_report(&net, &Some(ps)),
            "small_signal_gain_db": finite(gains[0]),
            "p1db": p1,
            "k3": k3,
            "unconverged_points": curve.points.iter().filter(|p| !p.converged).count(),
            "noise_change_db": noise.iter().map(|&v| finite(v)).collect::<Vec<_>>(),
        }),
    )?;
    Ok(out)
}

/// Drive map for the IMD model: device overrides from [tls], ladder ends
/// and port impedance from [design].
pub fn drive_map(cfg: &RunConfig) -> Result<(ImdDriveMap, TlsBathParams)> {
    let d = cfg.design()?;
    let t = cfg.tls()?;
    let g = &d.g;
    let z0 = d.z0;
    let map = ImdDriveMap {
        gain: from_db10(t.gain_db),
        omega0: 2.0 * PI * t.f0_hz.unwrap_or(d.f0_hz),
        w: t.fractional_bandwidth.unwrap_or(d.fractional_bandwidth),
        g1: g[1],
        g4: g[g.len() - 1],
        z1: t.z1.unwrap_or(d.z1),
        z0,
        k3: match t.kerr {
            KerrConfig::PerV2(k) => k,
            KerrConfig::FromP1db(p) => k3_from_p1db(p, z0),
        },
    };
    let bath = TlsBathParams { t1: t.t1_s, t2: t.t2_s, qi: t.qi, dipole: t.dipole_debye * DEBYE, t_diel: t.t_diel_m };
    map.validate()?;
    bath.validate()?;
    Ok((map, bath))
}

pub fn imd_file_name(delta_f_hz: f64) -> String {
    format!("imd_{delta_f_hz}hz.csv")
}

pub fn cmd_imd(cfg: &RunConfig) -> Result<ReportBundle> {
    let sw = cfg.sweep()?;
    let (map, bath) = drive_map(cfg)?;
    let powers = sw.powers_dbm();
    let mut out = ReportBundle::default();
    let mut files = Vec::new();
    for &df in &sw.delta_f_hz {
        let curve = imd_sweep(&powers, df, &map, &bath)?;
        let rows = curve.points.iter().map(|p| {
            vec![
                p.pin_dbm.to_string(),
                p.im3_dbm.to_string(),
                p.tls3_dbm.to_string(),
                p.kerr3_dbm.to_string(),
                p.im5_dbm.to_string(),
                p.valid.to_string(),
            ]
        });
        let name = imd_file_name(df);
        out.add(name.clone(), csv_table(&["pin_dbm", "im3_dbm", "tls3_dbm", "kerr3_dbm", "im5_dbm", "valid"], rows)?);
        files.push(json!({ "delta_f_hz": df, "file": name, "valid": curve.points.iter().all(|p| p.valid) }));
    }
    out.add_json(
        "imd.json",
        &json!({
            "metadata": metadata("imd", cfg),
            "drive": map,
            "bath": bath,
            "files": files,
        }),
    )?;
    Ok(out)
}
