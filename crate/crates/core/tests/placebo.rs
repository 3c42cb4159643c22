use placeval::robustness::placebo_against;
use placeval::synthetic::factor_panel;
use placeval::{bundled_table1, evaluate, placebo_in_time, Error, EvaluationConfig, OutcomePanel};

#[test]
fn placebo_at_intervention_year_reproduces_original() {
    let panel = bundled_table1();
    let cfg = EvaluationConfig::new("Zhoushan", 2010);
    let original = evaluate(&panel, &cfg).unwrap();
    let report = placebo_against(&original, &panel, 2010).unwrap();
    assert_eq!(report.selection, original.selection);
    assert_eq!(report.effects, original.effects);
    assert_eq!(report.counterfactual_path, original.counterfactual_path);
    assert_eq!(report.effect_comparison.rmse, 0.0);
}

#[test]
fn table1_two_year_placebo() {
    let panel = bundled_table1();
    let cfg = EvaluationConfig::new("Zhoushan", 2010);
    let report = placebo_in_time(&panel, &cfg, 2008).unwrap();
    assert_eq!(report.placebo_year, 2008);
    assert_eq!(report.effects.years, (2009..=2015).collect::<Vec<_>>());
    assert_eq!(
        report
            .overlap_comparison
            .iter()
            .map(|r| r.year)
            .collect::<Vec<_>>(),
        (2011..=2015).collect::<Vec<_>>()
    );
    let fit = &report.selection.chosen;
    for ((b, s), t) in fit
        .coefficients
        .iter()
        .zip(&fit.std_errors)
        .zip(&fit.t_values)
    {
        assert_eq!(*t, b / s);
    }
    assert!(report.pre_fit_rmse >= 0.0);
    for (i, e) in report.effects.effect.iter().enumerate() {
        assert_eq!(
            *e,
            report.effects.actual[i] - report.effects.counterfactual[i]
        );
    }
    let again = placebo_in_time(&panel, &cfg, 2008).unwrap();
    assert_eq!(report, again);
}

#[test]
fn exact_match_panel_has_zero_placebo_effects() {
    let base = factor_panel(4, 1990, 14, 2, 0.2, 3);
    // make the treated unit a copy of c02
    let c = base.unit_index("c02").unwrap();
    let values = base
        .rows()
        .iter()
        .map(|row| {
            let mut r = row.clone();
            r[0] = row[c];
            r
        })
        .collect();
    let panel =
        OutcomePanel::new(base.units().to_vec(), base.years().to_vec(), values, "y").unwrap();
    let cfg = EvaluationConfig::new("treated", 2000);
    let report = placebo_in_time(&panel, &cfg, 1998).unwrap();
    assert_eq!(
        report.selection.chosen.control_units,
        vec!["c02".to_string()]
    );
    assert_eq!(report.pre_fit_rmse, 0.0);
    assert!(report.effects.effect.iter().all(|e| e.abs() < 1e-12));
}

#[test]
fn placebo_tracks_actual_before_a_real_break() {
    let base = factor_panel(5, 1990, 20, 2, 0.02, 17);
    let shift = 1.5;
    // true intervention after 2004: treated jumps by `shift` from 2005 on
    let values = base
        .rows()
        .iter()
        .zip(base.years())
        .map(|(row, &y)| {
            let mut r = row.clone();
            if y > 2004 {
                r[0] += shift;
            }
            r
        })
        .collect();
    let panel =
        OutcomePanel::new(base.units().to_vec(), base.years().to_vec(), values, "y").unwrap();
    let cfg = EvaluationConfig::new("treated", 2004);
    let report = placebo_in_time(&panel, &cfg, 2001).unwrap();
    // placebo "post" years before the true break: 2002..=2004
    let gaps: Vec<f64> = report
        .years
        .iter()
        .zip(report.actual.iter().zip(&report.counterfactual_path))
        .filter(|(y, _)| (2002..=2004).contains(*y))
        .map(|(_, (a, c))| a - c)
        .collect();
    let rmse = (gaps.iter().map(|g| g * g).sum::<f64>() / gaps.len() as f64).sqrt();
    assert!(rmse < shift, "rmse {rmse}");
    // after the break both runs see the shift
    assert!(report.effect_comparison.sign_agreement == 1.0);
    assert!(report.effects.effect.last().unwrap() > &(shift / 2.0));
}

#[test]
fn too_short_placebo_pre_period() {
    let panel = bundled_table1();
    let cfg = EvaluationConfig::new("Zhoushan", 2010);
    let err = placebo_in_time(&panel, &cfg, 1997).unwrap_err();
    assert!(matches!(
        err,
        Error::InsufficientPrePeriod { have: 3, need: 4 }
    ));
    assert!(err.is_method_error());
    let err = placebo_in_time(&panel, &cfg, 2012).unwrap_err();
    assert!(matches!(err, Error::Argument(_)));
}
