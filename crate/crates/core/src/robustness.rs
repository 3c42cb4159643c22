//! Placebo-in-time checks: pretend the intervention happened earlier, rerun
//! the whole pipeline, and compare the resulting counterfactual with the
//! original one on the years both cover.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hcw::{evaluate, ControlSelection, Evaluation, TreatmentEffectSeries, MIN_PRE_YEARS};
use crate::panel::{EvaluationConfig, OutcomePanel};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathComparison {
    pub rmse: f64,
    pub max_abs_gap: f64,
    /// Fraction of positions where both paths have the same sign
    /// (zero counts as its own sign).
    pub sign_agreement: f64,
}

pub fn compare_paths(a: &[f64], b: &[f64]) -> Result<PathComparison> {
    if a.len() != b.len() {
        return Err(Error::Argument(format!(
            "paths have lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::Argument("empty paths".into()));
    }
    let n = a.len() as f64;
    let mut ss = 0.0;
    let mut max_abs_gap: f64 = 0.0;
    let mut agree = 0usize;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        ss += d * d;
        max_abs_gap = max_abs_gap.max(d.abs());
        if sign(*x) == sign(*y) {
            agree += 1;
        }
    }
    Ok(PathComparison {
        rmse: (ss / n).sqrt(),
        max_abs_gap,
        sign_agreement: agree as f64 / n,
    })
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// One shared post-intervention year of the two runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OverlapRow {
    pub year: i32,
    pub actual: f64,
    pub original_counterfactual: f64,
    pub placebo_counterfactual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlaceboReport {
    pub placebo_year: i32,
    pub original_intervention_year: i32,
    pub selection: ControlSelection,
    /// In-sample RMSE over years up to `placebo_year`.
    pub pre_fit_rmse: f64,
    pub effects: TreatmentEffectSeries,
    pub years: Vec<i32>,
    pub actual: Vec<f64>,
    pub counterfactual_path: Vec<f64>,
    pub overlap_comparison: Vec<OverlapRow>,
    /// Original vs placebo counterfactual on the overlap years.
    pub counterfactual_comparison: PathComparison,
    /// Original vs placebo effects (actual − counterfactual) on the overlap.
    pub effect_comparison: PathComparison,
}

/// Reruns the pipeline with the intervention moved to `placebo_year`.
pub fn placebo_in_time(
    panel: &OutcomePanel,
    config: &EvaluationConfig,
    placebo_year: i32,
) -> Result<PlaceboReport> {
    let original = evaluate(panel, config)?;
    placebo_against(&original, panel, placebo_year)
}

/// As [`placebo_in_time`], reusing an already computed original evaluation.
pub fn placebo_against(
    original: &Evaluation,
    panel: &OutcomePanel,
    placebo_year: i32,
) -> Result<PlaceboReport> {
    let config = &original.config;
    if placebo_year > config.intervention_year {
        return Err(Error::Argument(format!(
            "placebo year {placebo_year} is after the intervention year {}",
            config.intervention_year
        )));
    }
    let pre = panel.years().iter().filter(|&&y| y <= placebo_year).count();
    if pre < MIN_PRE_YEARS {
        return Err(Error::InsufficientPrePeriod {
            have: pre,
            need: MIN_PRE_YEARS,
        });
    }
    let placebo_config = EvaluationConfig {
        intervention_year: placebo_year,
        ..config.clone()
    };
    let placebo = evaluate(panel, &placebo_config)?;

    let overlap_comparison: Vec<OverlapRow> = original
        .years
        .iter()
        .enumerate()
        .filter(|(_, &y)| y > config.intervention_year)
        .map(|(t, &year)| OverlapRow {
            year,
            actual: original.actual[t],
            original_counterfactual: original.counterfactual_path[t],
            placebo_counterfactual: placebo.counterfactual_path[t],
        })
        .collect();
    let orig_cf: Vec<f64> = overlap_comparison
        .iter()
        .map(|r| r.original_counterfactual)
        .collect();
    let plac_cf: Vec<f64> = overlap_comparison
        .iter()
        .map(|r| r.placebo_counterfactual)
        .collect();
    let orig_gap: Vec<f64> = overlap_comparison
        .iter()
        .map(|r| r.actual - r.original_counterfactual)
        .collect();
    let plac_gap: Vec<f64> = overlap_comparison
        .iter()
        .map(|r| r.actual - r.placebo_counterfactual)
        .collect();

    Ok(PlaceboReport {
        placebo_year,
        original_intervention_year: config.intervention_year,
        pre_fit_rmse: placebo.pre_fit_rmse(),
        counterfactual_comparison: compare_paths(&orig_cf, &plac_cf)?,
        effect_comparison: compare_paths(&orig_gap, &plac_gap)?,
        selection: placebo.selection,
        effects: placebo.effects,
        years: placebo.years,
        actual: placebo.actual,
        counterfactual_path: placebo.counterfactual_path,
        overlap_comparison,
    })
}
