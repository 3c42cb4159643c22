use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use serde::{Deserialize, Serialize};

use placeval::panel::format_value;
use placeval::robustness::placebo_against;
use placeval::{
    efficiency_table, evaluate, load_dea_dataset, load_outcome_panel, AicVariant, ControlSelection,
    EvaluationConfig, TreatmentEffectSeries,
};

use crate::chart::{emit_svg_chart, ChartSpec, Series};
use crate::error::CliError;
use crate::table;

#[derive(Debug, Parser)]
#[command(
    name = "placeval",
    version,
    about = "DEA efficiency scoring and counterfactual policy evaluation"
)]
pub struct Cli {
    /// JSON file with evaluation settings; flags take precedence.
    #[arg(long, global = true, value_name = "JSON")]
    pub config: Option<PathBuf>,

    /// Only print warnings and errors.
    #[arg(long, short, global = true)]
    pub quiet: bool,

    /// Worker threads for the solvers (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Super-efficiency scores for every (year, unit) of a long-format CSV.
    Dea(DeaArgs),
    /// Select a control group, predict the counterfactual and report effects.
    Evaluate(EvaluateArgs),
    /// Rerun the evaluation with the intervention moved earlier.
    Placebo(PlaceboArgs),
}

#[derive(Debug, Args)]
pub struct DeaArgs {
    #[arg(long, value_name = "CSV")]
    pub input: PathBuf,
    /// Output panel CSV (years × units).
    #[arg(long, value_name = "CSV")]
    pub out: PathBuf,
    /// Also write per-cell weights, slacks and returns-to-scale as JSON.
    #[arg(long, value_name = "JSON")]
    pub details: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long, value_name = "CSV")]
    pub panel: PathBuf,
    #[arg(long)]
    pub treated: Option<String>,
    /// Last year before the intervention takes effect.
    #[arg(long, value_name = "YEAR", allow_negative_numbers = true)]
    pub intervention_year: Option<i32>,
    /// Units never used as controls.
    #[arg(long, value_delimiter = ',', value_name = "UNITS")]
    pub exclude: Option<Vec<String>>,
    /// Largest control group considered.
    #[arg(long, value_name = "K")]
    pub max_size: Option<usize>,
    /// Criterion used to pick among the per-size best subsets.
    #[arg(long, value_name = "aic|aicc")]
    pub aic: Option<AicVariant>,
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlaceboArgs {
    #[command(flatten)]
    pub eval: EvaluateArgs,
    /// Years to move the intervention back.
    #[arg(long, default_value_t = 2)]
    pub offset: u32,
}

/// Optional settings file; keys mirror [`EvaluationConfig`].
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub treated_unit: Option<String>,
    pub intervention_year: Option<i32>,
    pub outcome_label: Option<String>,
    pub excluded_units: Option<Vec<String>>,
    pub max_subset_size: Option<usize>,
    pub aic_variant: Option<AicVariant>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| CliError::Config {
            path: path.to_path_buf(),
            source,
        })
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    match &cli.command {
        Command::Dea(a) => cmd_dea(a, cli.quiet),
        Command::Evaluate(a) => cmd_evaluate(a, file, cli.quiet),
        Command::Placebo(a) => cmd_placebo(a, file, cli.quiet),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))?;
    info!("wrote {}", path.display());
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialise");
    s.push('\n');
    s
}

pub fn cmd_dea(args: &DeaArgs, quiet: bool) -> Result<(), CliError> {
    let data = load_dea_dataset(&args.input)?;
    info!(
        "loaded {} units x {} years, {} inputs, {} outputs",
        data.n_units(),
        data.years().len(),
        data.n_inputs(),
        data.n_outputs()
    );
    let table = efficiency_table(&data)?;
    info!(
        "solved {} envelopment programs",
        data.n_units() * data.years().len()
    );
    for (year, unit) in table.infeasible_cells() {
        warn!("super-efficiency infeasible for {unit} in {year}; reported as INF");
    }
    write_file(&args.out, &table.panel.to_csv_string())?;
    if let Some(path) = &args.details {
        write_file(path, &to_json(&table.results))?;
    }
    if !quiet {
        print!("{}", table::efficiency_table(&table.panel));
    }
    Ok(())
}

fn build_config(args: &EvaluateArgs, file: ConfigFile) -> Result<EvaluationConfig, CliError> {
    let treated = args
        .treated
        .clone()
        .or(file.treated_unit)
        .ok_or_else(|| CliError::Usage("--treated is required (flag or config)".into()))?;
    let year = args
        .intervention_year
        .or(file.intervention_year)
        .ok_or_else(|| {
            CliError::Usage("--intervention-year is required (flag or config)".into())
        })?;
    let mut cfg = EvaluationConfig::new(treated, year);
    cfg.outcome_label = file.outcome_label.unwrap_or_else(|| "outcome".into());
    cfg.excluded_units = args
        .exclude
        .clone()
        .or(file.excluded_units)
        .unwrap_or_default();
    cfg.max_subset_size = args.max_size.or(file.max_subset_size);
    cfg.aic_variant = args.aic.or(file.aic_variant).unwrap_or_default();
    Ok(cfg)
}

/// `year,actual,counterfactual,effect` with full precision.
pub fn effects_csv(s: &TreatmentEffectSeries) -> String {
    let mut out = String::from("year,actual,counterfactual,effect\n");
    for i in 0..s.years.len() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            s.years[i],
            format_value(s.actual[i]),
            format_value(s.counterfactual[i]),
            format_value(s.effect[i])
        );
    }
    out
}

fn paths_csv(header: &str, years: &[i32], columns: &[&[f64]]) -> String {
    let mut out = format!("{header}\n");
    for (i, y) in years.iter().enumerate() {
        out.push_str(&y.to_string());
        for c in columns {
            out.push(',');
            out.push_str(&format_value(c[i]));
        }
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct SelectionReport<'a> {
    config: &'a EvaluationConfig,
    pre_fit_rmse: f64,
    selection: &'a ControlSelection,
    effects: &'a TreatmentEffectSeries,
}

fn prepare(
    args: &EvaluateArgs,
    file: ConfigFile,
) -> Result<(placeval::OutcomePanel, EvaluationConfig), CliError> {
    let cfg = build_config(args, file)?;
    let panel = load_outcome_panel(&args.panel, &cfg.outcome_label)?;
    info!(
        "loaded panel: {} units x {} years",
        panel.n_units(),
        panel.n_years()
    );
    cfg.validate(&panel)?;
    fs::create_dir_all(&args.out_dir).map_err(|e| CliError::io(&args.out_dir, e))?;
    Ok((panel, cfg))
}

pub fn cmd_evaluate(args: &EvaluateArgs, file: ConfigFile, quiet: bool) -> Result<(), CliError> {
    let (panel, cfg) = prepare(args, file)?;
    let ev = evaluate(&panel, &cfg)?;
    info!(
        "searched {} subsets, chose {} controls (R² {:.4})",
        ev.selection.search_space_size,
        ev.selection.chosen.control_units.len(),
        ev.selection.chosen.r_squared
    );
    let dir = &args.out_dir;
    let report = SelectionReport {
        config: &ev.config,
        pre_fit_rmse: ev.pre_fit_rmse(),
        selection: &ev.selection,
        effects: &ev.effects,
    };
    write_file(&dir.join("selection.json"), &to_json(&report))?;
    write_file(&dir.join("effects.csv"), &effects_csv(&ev.effects))?;
    write_file(
        &dir.join("paths.csv"),
        &paths_csv(
            "year,actual,counterfactual",
            &ev.years,
            &[&ev.actual, &ev.counterfactual_path],
        ),
    )?;
    let chart = ChartSpec {
        title: format!("{}: actual and counterfactual", cfg.treated_unit),
        series: vec![
            Series::new("actual", &ev.years, &ev.actual),
            Series::new("counterfactual", &ev.years, &ev.counterfactual_path),
        ],
        vertical_marker_year: Some(cfg.intervention_year),
        x_label: "year".into(),
        y_label: cfg.outcome_label.clone(),
    };
    let svg = dir.join("chart.svg");
    emit_svg_chart(&chart, &svg)?;
    info!("wrote {}", svg.display());
    if !quiet {
        println!(
            "Control group: {}",
            ev.selection.chosen.control_units.join(", ")
        );
        print!("{}", table::effects_table(&ev.effects));
    }
    Ok(())
}

pub fn cmd_placebo(args: &PlaceboArgs, file: ConfigFile, quiet: bool) -> Result<(), CliError> {
    let (panel, cfg) = prepare(&args.eval, file)?;
    let placebo_year = cfg.intervention_year - args.offset as i32;
    let original = evaluate(&panel, &cfg)?;
    info!(
        "original run: {} controls",
        original.selection.chosen.control_units.len()
    );
    let report = placebo_against(&original, &panel, placebo_year)?;
    info!(
        "placebo at {placebo_year}: {} controls, effect sign agreement {:.2}",
        report.selection.chosen.control_units.len(),
        report.effect_comparison.sign_agreement
    );
    let dir = &args.eval.out_dir;
    write_file(&dir.join("placebo.json"), &to_json(&report))?;
    write_file(
        &dir.join("placebo_effects.csv"),
        &effects_csv(&report.effects),
    )?;
    write_file(
        &dir.join("placebo_paths.csv"),
        &paths_csv(
            "year,actual,original_cf,placebo_cf",
            &report.years,
            &[
                &report.actual,
                &original.counterfactual_path,
                &report.counterfactual_path,
            ],
        ),
    )?;
    let chart = ChartSpec {
        title: format!(
            "{}: placebo intervention in {placebo_year}",
            cfg.treated_unit
        ),
        series: vec![
            Series::new("actual", &report.years, &report.actual),
            Series::new(
                "original counterfactual",
                &original.years,
                &original.counterfactual_path,
            ),
            Series::new(
                "placebo counterfactual",
                &report.years,
                &report.counterfactual_path,
            ),
        ],
        vertical_marker_year: Some(placebo_year),
        x_label: "year".into(),
        y_label: cfg.outcome_label.clone(),
    };
    let svg = dir.join("placebo.svg");
    emit_svg_chart(&chart, &svg)?;
    info!("wrote {}", svg.display());
    if !quiet {
        println!(
            "Placebo year {placebo_year}; control group: {}",
            report.selection.chosen.control_units.join(", ")
        );
        print!("{}", table::effects_table(&report.effects));
    }
    Ok(())
}
