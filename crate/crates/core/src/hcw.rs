//! Panel-data counterfactuals for a single treated unit.
//!
//! The treated unit's pre-period outcome is regressed on subsets of the
//! untreated units. For every subset size `j` the subset with the highest R²
//! is kept; among those per-size winners the one with the lowest information
//! criterion becomes the control group. Its fit is then extrapolated over
//! the post period to give the no-intervention path, and the treatment
//! effect is the actual outcome minus that path.
//!
//! Outcomes are assumed to be driven by a small number of unobserved common
//! factors plus unit-specific effects, which is what lets untreated units
//! stand in for the factors. None of that structure is estimated here; only
//! the reduced-form regression is.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ols::{finish_fit, AicVariant, OlsFit, QrSolve};
use crate::panel::{EvaluationConfig, OutcomePanel};

/// Scores closer than this are treated as tied.
pub const TIE_TOL: f64 = 1e-12;
/// Minimum number of pre-period observations for the search.
pub const MIN_PRE_YEARS: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ControlSelection {
    pub candidates: Vec<String>,
    pub pre_years: Vec<i32>,
    pub aic_variant: AicVariant,
    /// Best-R² fit for each subset size, ascending by size. Sizes where every
    /// subset was rank deficient are absent.
    pub per_size_winners: Vec<OlsFit>,
    pub chosen: OlsFit,
    /// Number of subsets examined, `Σ_j C(candidates, j)`.
    pub search_space_size: u64,
    pub rank_deficient_skipped: u64,
}

impl ControlSelection {
    pub fn winner_of_size(&self, j: usize) -> Option<&OlsFit> {
        self.per_size_winners
            .iter()
            .find(|f| f.control_units.len() == j)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreatmentEffectSeries {
    pub years: Vec<i32>,
    pub actual: Vec<f64>,
    pub counterfactual: Vec<f64>,
    /// `actual - counterfactual`, elementwise.
    pub effect: Vec<f64>,
    pub mean_effect: f64,
}

/// Pre-period data prepared once for a search.
struct SearchSpace {
    y: Vec<f64>,
    /// Pre-period series of each candidate, in panel order.
    series: Vec<Vec<f64>>,
    names: Vec<String>,
    tss: f64,
    j_max: usize,
}

impl SearchSpace {
    fn new(panel: &OutcomePanel, config: &EvaluationConfig) -> Result<Self> {
        config.validate(panel)?;
        let pre = config.pre_years(panel);
        if pre.len() < MIN_PRE_YEARS {
            return Err(Error::InsufficientPrePeriod {
                have: pre.len(),
                need: MIN_PRE_YEARS,
            });
        }
        let names = config.candidates(panel);
        if names.is_empty() {
            return Err(Error::Selection("no candidate control units".into()));
        }
        let y = panel.series(&config.treated_unit, &pre)?;
        let series = names
            .iter()
            .map(|u| panel.series(u, &pre))
            .collect::<Result<Vec<_>>>()?;
        if y.iter()
            .chain(series.iter().flatten())
            .any(|v| !v.is_finite())
        {
            return Err(Error::Validation(
                "pre-period contains non-finite values".into(),
            ));
        }
        let n = y.len();
        let mean = y.iter().sum::<f64>() / n as f64;
        let tss = y.iter().map(|v| (v - mean) * (v - mean)).sum();
        let mut j_max = names.len().min(n - 3);
        if let Some(cap) = config.max_subset_size {
            j_max = j_max.min(cap);
        }
        Ok(Self {
            y,
            series,
            names,
            tss,
            j_max,
        })
    }

    fn r_squared(&self, rss: f64) -> f64 {
        if self.tss > 0.0 {
            (1.0 - rss / self.tss).clamp(0.0, 1.0)
        } else {
            1.0
        }
    }

    fn columns(&self, subset: &[usize]) -> Vec<&[f64]> {
        subset.iter().map(|&i| self.series[i].as_slice()).collect()
    }

    /// Exhaustive search over all size-`j` subsets. Returns the winner (if
    /// any subset was full rank) and the number of rank-deficient subsets.
    fn best_of_size(&self, j: usize) -> (Option<OlsFit>, u64) {
        let combos = combinations(self.names.len(), j);
        let scores: Vec<Option<f64>> = combos
            .par_iter()
            .map(|s| QrSolve::new(&self.y, &self.columns(s)).map(|qr| self.r_squared(qr.rss)))
            .collect();
        let mut skipped = 0;
        let mut best: Option<(usize, f64)> = None;
        for (i, score) in scores.iter().enumerate() {
            match (*score, best) {
                (None, _) => skipped += 1,
                (Some(r2), None) => best = Some((i, r2)),
                (Some(r2), Some((_, b))) if r2 > b + TIE_TOL => best = Some((i, r2)),
                _ => {}
            }
        }
        let fit = best.map(|(i, _)| self.fit(&combos[i]));
        (fit, skipped)
    }

    fn fit(&self, subset: &[usize]) -> OlsFit {
        let cols = self.columns(subset);
        let qr = QrSolve::new(&self.y, &cols).expect("winner was full rank");
        let labels: Vec<String> = subset.iter().map(|&i| self.names[i].clone()).collect();
        finish_fit(&self.y, &qr, &labels)
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return out;
        };
        idx[i] += 1;
        for p in i + 1..k {
            idx[p] = idx[p - 1] + 1;
        }
    }
}

/// `C(n, k)` without overflow for the sizes used here.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Largest subset size the search will consider for this panel/config.
pub fn max_subset_size(panel: &OutcomePanel, config: &EvaluationConfig) -> Result<usize> {
    Ok(SearchSpace::new(panel, config)?.j_max)
}

/// The maximal-R² fit among all size-`j` subsets of the candidate units,
/// fitted on the pre-period. Ties keep the lexicographically first subset.
pub fn best_subset_of_size(
    panel: &OutcomePanel,
    config: &EvaluationConfig,
    j: usize,
) -> Result<OlsFit> {
    let space = SearchSpace::new(panel, config)?;
    if j == 0 || j > space.j_max {
        return Err(Error::Argument(format!(
            "subset size {j} outside 1..={}",
            space.j_max
        )));
    }
    space
        .best_of_size(j)
        .0
        .ok_or_else(|| Error::Selection(format!("every subset of size {j} is rank deficient")))
}

/// Runs the per-size search for `j = 1..=J_max` and keeps the winner with
/// the lowest information criterion (ties favour the smaller subset).
pub fn select_control_group(
    panel: &OutcomePanel,
    config: &EvaluationConfig,
) -> Result<ControlSelection> {
    let space = SearchSpace::new(panel, config)?;
    let mut winners = Vec::new();
    let mut skipped = 0;
    let mut searched = 0;
    for j in 1..=space.j_max {
        let (fit, s) = space.best_of_size(j);
        skipped += s;
        searched += binomial(space.names.len(), j);
        winners.extend(fit);
    }
    let variant = config.aic_variant;
    let mut chosen: Option<&OlsFit> = None;
    for w in &winners {
        let better = match chosen {
            None => true,
            Some(c) => {
                let (a, b) = (w.criterion(variant), c.criterion(variant));
                a < b && !(a == b || (a - b).abs() <= TIE_TOL)
            }
        };
        if better {
            chosen = Some(w);
        }
    }
    let chosen = chosen
        .cloned()
        .ok_or_else(|| Error::Selection("no full-rank control subset".into()))?;
    Ok(ControlSelection {
        candidates: space.names.clone(),
        pre_years: config.pre_years(panel),
        aic_variant: variant,
        per_size_winners: winners,
        chosen,
        search_space_size: searched,
        rank_deficient_skipped: skipped,
    })
}

/// Applies a fitted control-group regression to the given years.
pub fn predict_counterfactual(
    fit: &OlsFit,
    panel: &OutcomePanel,
    years: &[i32],
) -> Result<Vec<f64>> {
    let series = fit
        .control_units
        .iter()
        .map(|u| panel.series(u, years))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..years.len())
        .map(|t| {
            let row: Vec<f64> = series.iter().map(|s| s[t]).collect();
            fit.predict_row(&row)
        })
        .collect())
}

pub fn treatment_effects(
    actual: &[f64],
    counterfactual: &[f64],
    years: &[i32],
) -> Result<TreatmentEffectSeries> {
    if actual.len() != counterfactual.len() || actual.len() != years.len() {
        return Err(Error::Argument(format!(
            "lengths differ: {} actual, {} counterfactual, {} years",
            actual.len(),
            counterfactual.len(),
            years.len()
        )));
    }
    if actual.is_empty() {
        return Err(Error::Argument("no post-period years".into()));
    }
    let effect: Vec<f64> = actual
        .iter()
        .zip(counterfactual)
        .map(|(a, c)| a - c)
        .collect();
    let mean_effect = effect.iter().sum::<f64>() / effect.len() as f64;
    Ok(TreatmentEffectSeries {
        years: years.to_vec(),
        actual: actual.to_vec(),
        counterfactual: counterfactual.to_vec(),
        effect,
        mean_effect,
    })
}

/// Output of the full select / predict / difference pipeline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub config: EvaluationConfig,
    pub selection: ControlSelection,
    /// Every panel year.
    pub years: Vec<i32>,
    pub actual: Vec<f64>,
    /// In-sample fit over the pre-period, extrapolation afterwards.
    pub counterfactual_path: Vec<f64>,
    pub effects: TreatmentEffectSeries,
}

impl Evaluation {
    /// Root mean squared in-sample error of the chosen fit.
    pub fn pre_fit_rmse(&self) -> f64 {
        let fit = &self.selection.chosen;
        (fit.rss / fit.n_obs as f64).sqrt()
    }
}

pub fn evaluate(panel: &OutcomePanel, config: &EvaluationConfig) -> Result<Evaluation> {
    let selection = select_control_group(panel, config)?;
    let years = panel.years().to_vec();
    let actual = panel.series(&config.treated_unit, &years)?;
    let counterfactual_path = predict_counterfactual(&selection.chosen, panel, &years)?;
    let post = config.post_years(panel);
    let offset = years.len() - post.len();
    let effects = treatment_effects(&actual[offset..], &counterfactual_path[offset..], &post)?;
    Ok(Evaluation {
        config: config.clone(),
        selection,
        years,
        actual,
        counterfactual_path,
        effects,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn panel(units: &[&str], cols: &[Vec<f64>]) -> OutcomePanel {
        let t = cols[0].len();
        let values = (0..t)
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect();
        OutcomePanel::new(
            units.iter().map(|s| s.to_string()).collect(),
            (2000..2000 + t as i32).collect(),
            values,
            "y",
        )
        .unwrap()
    }

    fn wiggle(seed: u64, n: usize) -> Vec<f64> {
        let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
        (0..n)
            .map(|_| {
                s ^= s << 13;
                s ^= s >> 7;
                s ^= s << 17;
                (s >> 11) as f64 / (1u64 << 53) as f64
            })
            .collect()
    }

    #[test]
    fn combinatorics() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(4, 2)[0], vec![0, 1]);
        assert_eq!(combinations(4, 2)[5], vec![2, 3]);
        assert_eq!(combinations(19, 4).len(), 3876);
        assert_eq!(binomial(19, 4), 3876);
        assert_eq!(binomial(19, 0), 1);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn exact_multiple_wins_size_one() {
        let u1 = wiggle(1, 12);
        let u2 = wiggle(2, 12);
        let u3 = wiggle(3, 12);
        let y: Vec<f64> = u3.iter().map(|v| 2.0 * v).collect();
        let p = panel(&["T", "u1", "u2", "u3"], &[y, u1, u2, u3]);
        let cfg = EvaluationConfig::new("T", 2009);
        let fit = best_subset_of_size(&p, &cfg, 1).unwrap();
        assert_eq!(fit.control_units, vec!["u3".to_string()]);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn exact_copy_is_chosen_alone() {
        let cols: Vec<Vec<f64>> = (1..=5).map(|s| wiggle(s, 14)).collect();
        let mut all = vec![cols[1].clone()];
        all.extend(cols.iter().cloned());
        let p = panel(&["T", "u1", "u2", "u3", "u4", "u5"], &all);
        for variant in [AicVariant::Aic, AicVariant::Aicc] {
            let mut cfg = EvaluationConfig::new("T", 2010);
            cfg.aic_variant = variant;
            let sel = select_control_group(&p, &cfg).unwrap();
            assert_eq!(sel.chosen.control_units, vec!["u2".to_string()]);
        }
    }

    #[test]
    fn search_space_counts() {
        let cols: Vec<Vec<f64>> = (0..20).map(|s| wiggle(s + 10, 21)).collect();
        let names: Vec<String> = (0..20).map(|i| format!("c{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let p = panel(&refs, &cols);
        let mut cfg = EvaluationConfig::new("c0", 2015);
        assert_eq!(max_subset_size(&p, &cfg).unwrap(), 13);
        cfg.max_subset_size = Some(2);
        let sel = select_control_group(&p, &cfg).unwrap();
        assert_eq!(sel.search_space_size, 19 + 171);
        assert_eq!(sel.per_size_winners.len(), 2);
        assert!(matches!(
            best_subset_of_size(&p, &cfg, 3),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn duplicate_candidates_are_skipped_not_fatal() {
        let a = wiggle(5, 10);
        let b = wiggle(6, 10);
        let y: Vec<f64> = a.iter().zip(&b).map(|(x, z)| x + 0.3 * z).collect();
        let p = panel(&["T", "a", "a2", "b"], &[y, a.clone(), a, b]);
        let cfg = EvaluationConfig::new("T", 2007);
        let sel = select_control_group(&p, &cfg).unwrap();
        assert!(sel.rank_deficient_skipped >= 1);
        let w2 = sel.winner_of_size(2).unwrap();
        assert_eq!(w2.control_units, vec!["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn short_pre_period() {
        let cols: Vec<Vec<f64>> = (0..3).map(|s| wiggle(s, 6)).collect();
        let p = panel(&["T", "a", "b"], &cols);
        let cfg = EvaluationConfig::new("T", 2002);
        assert!(matches!(
            select_control_group(&p, &cfg),
            Err(Error::InsufficientPrePeriod { have: 3, need: 4 })
        ));
    }

    #[test]
    fn prediction_examples() {
        let p = panel(
            &["T", "u1", "u2"],
            &[
                vec![0.0; 4],
                vec![1.0, 2.0, 3.0, 4.0],
                vec![5.0, 6.0, 7.0, 8.0],
            ],
        );
        let mut fit = OlsFit {
            control_units: vec!["u1".into(), "u2".into()],
            intercept: 0.25,
            coefficients: vec![0.0, 0.0],
            rss: 0.0,
            r_squared: 1.0,
            aic: 0.0,
            aicc: 0.0,
            intercept_std_error: 0.0,
            std_errors: vec![],
            t_values: vec![],
            p_values: vec![],
            n_obs: 4,
            df_resid: 1,
        };
        assert_eq!(
            predict_counterfactual(&fit, &p, &[2002, 2003]).unwrap(),
            vec![0.25, 0.25]
        );
        fit.intercept = 0.0;
        fit.coefficients = vec![0.0, 1.0];
        assert_eq!(
            predict_counterfactual(&fit, &p, &[2002, 2003]).unwrap(),
            vec![7.0, 8.0]
        );
        assert!(matches!(
            predict_counterfactual(&fit, &p, &[2004]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn effect_arithmetic() {
        let e = treatment_effects(&[0.6415], &[0.4003], &[2011]).unwrap();
        assert!((e.effect[0] - 0.2412).abs() < 1e-12);
        let e = treatment_effects(&[11.3], &[13.53], &[2011]).unwrap();
        assert!((e.effect[0] + 2.22923).abs() < 5e-3);
        assert!(treatment_effects(&[1.0, 2.0], &[1.0], &[1, 2]).is_err());
        assert!(treatment_effects(&[], &[], &[]).is_err());
    }
}
