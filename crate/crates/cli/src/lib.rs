//! Command-line front end: DEA scoring, counterfactual evaluation and
//! placebo checks, with CSV, JSON, text-table and SVG output.

pub mod chart;
pub mod commands;
pub mod error;
pub mod table;

pub use chart::{emit_svg_chart, render_svg, ChartSpec, Series};
pub use commands::{run, Cli, Command};
pub use error::CliError;
