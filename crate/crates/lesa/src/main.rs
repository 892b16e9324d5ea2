use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lesa::commands::{cmd_compress, cmd_gain, cmd_imd, cmd_synth, Engine};
use lesa::config::{fixture, parse_with_overrides, RunConfig};
use lesa::output::write_atomic;
use lesa::{cmd_plot, CliError, Result};

#[derive(Parser)]
#[command(name = "lesa", version, about = "Synthesize and simulate impedance-matched parametric amplifiers")]
#[command(after_help = "Any config key can be overridden with --section.key VALUE or --key VALUE.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Component values, couplings, inverters and bias point as JSON.
    Synth(RunArgs),
    /// Small-signal gain sweep.
    Gain {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value = "cm")]
        engine: EngineArg,
    },
    /// Gain compression versus input power.
    Compress(RunArgs),
    /// Two-tone intermodulation from TLS saturation and Kerr nonlinearity.
    Imd(RunArgs),
    /// Overlay chart of CSV outputs.
    Plot {
        #[arg(required = true)]
        csv: Vec<PathBuf>,
        /// SVG file, or a directory to hold plot.svg.
        #[arg(long, default_value = "plot.svg")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in configuration: paper_design.
    #[arg(long)]
    fixture: Option<String>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Cm,
    Abcd,
}

const FLAGS: &[&str] = &["config", "fixture", "out", "engine", "help", "version"];

/// Separates `--key value` / `--key=value` config overrides from the flags
/// clap knows about.
type Overrides = Vec<(String, String)>;

fn split_overrides(args: Vec<String>) -> std::result::Result<(Vec<String>, Overrides), String> {
    let mut kept = Vec::new();
    let mut overrides = Vec::new();
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(name) = a.strip_prefix("--") else {
            kept.push(a);
            continue;
        };
        let (key, inline) = match name.split_once('=') {
            Some((k, v)) => (k.to_string(), Some(v.to_string())),
            None => (name.to_string(), None),
        };
        if key.is_empty() || FLAGS.contains(&key.as_str()) {
            kept.push(a);
            continue;
        }
        let value = match inline {
            Some(v) => v,
            None => it.next().ok_or_else(|| format!("--{key} needs a value"))?,
        };
        overrides.push((key, value));
    }
    Ok((kept, overrides))
}

fn load(run: &RunArgs, overrides: &[(String, String)]) -> Result<RunConfig> {
    let text = match (&run.config, &run.fixture) {
        (Some(_), Some(_)) => return Err(CliError::Usage("--config and --fixture are exclusive".into())),
        (Some(p), None) => std::fs::read_to_string(p)?,
        (None, Some(f)) => fixture(f).ok_or_else(|| CliError::Usage(format!("unknown fixture {f}")))?.to_string(),
        (None, None) => String::new(),
    };
    Ok(parse_with_overrides(&text, overrides)?)
}

fn plot_target(out: &Path) -> PathBuf {
    if out.is_dir() || out.extension().is_none() {
        out.join("plot.svg")
    } else {
        out.to_path_buf()
    }
}

fn run(cli: Cli, overrides: &[(String, String)]) -> Result<()> {
    let (bundle, out) = match &cli.command {
        Command::Synth(r) => (cmd_synth(&load(r, overrides)?)?, &r.out),
        Command::Gain { run, engine } => {
            let e = match engine {
                EngineArg::Cm => Engine::CoupledMode,
                EngineArg::Abcd => Engine::Abcd,
            };
            (cmd_gain(&load(run, overrides)?, e)?, &run.out)
        }
        Command::Compress(r) => (cmd_compress(&load(r, overrides)?)?, &r.out),
        Command::Imd(r) => (cmd_imd(&load(r, overrides)?)?, &r.out),
        Command::Plot { csv, out } => {
            if !overrides.is_empty() {
                return Err(CliError::Usage("plot takes no config overrides".into()));
            }
            let svg = cmd_plot(csv)?;
            let target = plot_target(out);
            if let Some(dir) = target.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            write_atomic(&target, svg.as_bytes())?;
            println!("{}", target.display());
            return Ok(());
        }
    };
    bundle.write_to(out)?;
    for (name, _) in &bundle.files {
        println!("{}", out.join(name).display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let (args, overrides) = match split_overrides(std::env::args().collect()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli, &overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(a: &[&str]) -> Vec<String> {
        a.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn overrides_are_split_from_flags() {
        let (kept, o) =
            split_overrides(v(&["lesa", "gain", "--engine", "abcd", "--design.z1", "4.4", "--qi=300", "--out", "x"]))
                .unwrap();
        assert_eq!(kept, v(&["lesa", "gain", "--engine", "abcd", "--out", "x"]));
        assert_eq!(o, vec![("design.z1".into(), "4.4".into()), ("qi".into(), "300".into())]);
        assert!(split_overrides(v(&["lesa", "synth", "--qi"])).is_err());
    }
}
