//! Configuration-driven front end for `lesa-core`: INI run files, CSV/JSON
//! reports and SVG charts.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;

pub use error::{CliError, Result};

/// Renders the CSV outputs at `paths` into one SVG chart.
pub fn cmd_plot(paths: &[std::path::PathBuf]) -> Result<String> {
    let tables = paths.iter().map(|p| plot::read_table(p)).collect::<Result<Vec<_>>>()?;
    plot::render_svg(&tables)
}
