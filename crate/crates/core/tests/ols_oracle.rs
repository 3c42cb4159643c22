mod common;

use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::Rng;
use statrs::distribution::{ContinuousCDF, StudentsT};

use placeval::ols::ols_fit;
use placeval::special::{regularized_incomplete_beta, student_t_cdf, student_t_two_sided_p};

fn labels(k: usize) -> Vec<String> {
    (0..k).map(|i| format!("c{i}")).collect()
}

#[test]
fn coefficients_match_normal_equations() {
    let mut r = common::rng(31);
    for _ in 0..40 {
        let cols: Vec<Vec<f64>> = (0..3)
            .map(|_| (0..16).map(|_| r.gen_range(-2.0..2.0)).collect())
            .collect();
        let y: Vec<f64> = (0..16)
            .map(|t| 0.5 + 1.5 * cols[0][t] - 0.7 * cols[2][t] + r.gen_range(-0.3..0.3))
            .collect();
        let fit = ols_fit(&y, &cols, &labels(3)).unwrap();
        let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
        let (beta, rss) = common::ols_normal_equations(&y, &refs).unwrap();
        assert_relative_eq!(fit.intercept, beta[0], epsilon = 1e-8);
        for (a, b) in fit.coefficients.iter().zip(&beta[1..]) {
            assert_relative_eq!(*a, *b, epsilon = 1e-8);
        }
        assert_relative_eq!(fit.rss, rss, epsilon = 1e-10, max_relative = 1e-8);
        assert_eq!(fit.df_resid, 12);
    }
}

#[test]
fn residuals_are_orthogonal_to_design() {
    let mut r = common::rng(32);
    let cols: Vec<Vec<f64>> = (0..4)
        .map(|_| (0..14).map(|_| r.gen_range(0.0..3.0)).collect())
        .collect();
    let y: Vec<f64> = (0..14).map(|_| r.gen_range(0.0..5.0)).collect();
    let fit = ols_fit(&y, &cols, &labels(4)).unwrap();
    let resid: Vec<f64> = (0..14)
        .map(|t| {
            let row: Vec<f64> = cols.iter().map(|c| c[t]).collect();
            y[t] - fit.predict_row(&row)
        })
        .collect();
    let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!(resid.iter().sum::<f64>().abs() <= 1e-8 * ynorm);
    for c in &cols {
        let dot: f64 = c.iter().zip(&resid).map(|(a, b)| a * b).sum();
        assert!(dot.abs() <= 1e-8 * ynorm);
    }
}

#[test]
fn standard_errors_match_classical_formula() {
    let mut r = common::rng(33);
    let cols: Vec<Vec<f64>> = (0..2)
        .map(|_| (0..12).map(|_| r.gen_range(-1.0..1.0)).collect())
        .collect();
    let y: Vec<f64> = (0..12)
        .map(|t| 1.0 + cols[0][t] + r.gen_range(-0.5..0.5))
        .collect();
    let fit = ols_fit(&y, &cols, &labels(2)).unwrap();
    let x = nalgebra::DMatrix::from_fn(12, 3, |t, j| if j == 0 { 1.0 } else { cols[j - 1][t] });
    let inv = (x.transpose() * &x).try_inverse().unwrap();
    let sigma2 = fit.rss / 9.0;
    assert_relative_eq!(
        fit.intercept_std_error,
        (sigma2 * inv[(0, 0)]).sqrt(),
        max_relative = 1e-9
    );
    for j in 0..2 {
        assert_relative_eq!(
            fit.std_errors[j],
            (sigma2 * inv[(j + 1, j + 1)]).sqrt(),
            max_relative = 1e-9
        );
        assert_eq!(fit.t_values[j], fit.coefficients[j] / fit.std_errors[j]);
        let p = 2.0
            * (1.0
                - StudentsT::new(0.0, 1.0, 9.0)
                    .unwrap()
                    .cdf(fit.t_values[j].abs()));
        assert_relative_eq!(fit.p_values[j], p, epsilon = 1e-10, max_relative = 1e-8);
    }
}

#[test]
fn t_cdf_against_statrs() {
    for &df in &[1.0, 2.5, 5.0, 9.0, 14.0, 30.0, 120.0] {
        let dist = StudentsT::new(0.0, 1.0, df).unwrap();
        for i in -40..=40 {
            let t = i as f64 * 0.25;
            let ours = student_t_cdf(t, df);
            let theirs = dist.cdf(t);
            assert!(
                (ours - theirs).abs() <= 1e-10 * theirs.max(1e-300) + 1e-14,
                "df {df} t {t}: {ours} vs {theirs}"
            );
        }
    }
}

#[test]
fn incomplete_beta_against_quadrature() {
    // Composite Simpson on the beta density; these shapes keep the integrand smooth.
    let simpson = |a: f64, b: f64, x: f64| {
        let n = 20_000;
        let h = x / n as f64;
        let f = |t: f64| t.powf(a - 1.0) * (1.0 - t).powf(b - 1.0);
        let mut s = f(0.0) + f(x);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    };
    for &(a, b) in &[(1.0, 1.0), (2.0, 3.0), (4.5, 3.0), (7.0, 2.5)] {
        let total = simpson(a, b, 1.0);
        for &x in &[0.1, 0.35, 0.5, 0.8, 0.95] {
            let want = simpson(a, b, x) / total;
            assert!((regularized_incomplete_beta(a, b, x) - want).abs() < 1e-9);
        }
    }
}

#[test]
fn printed_t_values_are_ratios() {
    // Reference coefficient and standard error pairs with their t-values.
    assert!((1.9535_f64 / 0.1147 - 17.0288).abs() < 5e-3);
    assert!((0.4433_f64 / 0.0475 - 9.335).abs() < 5e-3);
    assert!(student_t_two_sided_p(17.0288, 10.0) < 1e-6);
}

proptest! {
    #[test]
    fn r_squared_in_unit_interval(
        y in prop::collection::vec(-5.0f64..5.0, 10),
        x in prop::collection::vec(-5.0f64..5.0, 10),
    ) {
        if let Ok(fit) = ols_fit(&y, &[x], &labels(1)) {
            prop_assert!((0.0..=1.0).contains(&fit.r_squared));
            prop_assert!(fit.rss >= 0.0);
        }
    }
}
