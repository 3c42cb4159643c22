//! Independent reference implementations used as test oracles. None of these
//! call into the solver paths they check.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use placeval::{DeaDataset, OutcomePanel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Minimum of `c'x` over the basic feasible solutions of `Ax = b, x >= 0`,
/// found by trying every column basis. `None` when no basis is feasible.
pub fn lp_by_vertex_enumeration(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<f64> {
    let m = a.len();
    let n = c.len();
    let mut best: Option<f64> = None;
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        let bm = DMatrix::from_fn(m, m, |i, j| a[i][idx[j]]);
        if let Some(xb) = bm.clone().lu().solve(&DVector::from_column_slice(b)) {
            let resid = (&bm * &xb - DVector::from_column_slice(b)).amax();
            if resid < 1e-9 && xb.iter().all(|&v| v >= -1e-10) {
                let obj: f64 = idx.iter().zip(xb.iter()).map(|(&j, v)| c[j] * v).sum();
                best = Some(best.map_or(obj, |b: f64| b.min(obj)));
            }
        }
        // next combination
        let Some(i) = (0..m).rev().find(|&i| idx[i] != i + n - m) else {
            return best;
        };
        idx[i] += 1;
        for p in i + 1..m {
            idx[p] = idx[p - 1] + 1;
        }
    }
}

/// CCR efficiency of unit `q` in ratio form for two inputs and one output:
/// max over input weight directions of (own ratio) / (best ratio), on a
/// dense grid. A lower bound that converges to the LP value.
pub fn ccr_ratio_grid_2in_1out(x: &[[f64; 2]], y: &[f64], q: usize, steps: usize) -> f64 {
    let mut best: f64 = 0.0;
    for s in 0..=steps {
        let phi = std::f64::consts::FRAC_PI_2 * s as f64 / steps as f64;
        let (v1, v2) = (phi.cos(), phi.sin());
        let ratio = |j: usize| y[j] / (v1 * x[j][0] + v2 * x[j][1]);
        let top = (0..y.len()).map(ratio).fold(0.0, f64::max);
        best = best.max(ratio(q) / top);
    }
    best
}

/// Coefficients (intercept first) and RSS from the normal equations.
pub fn ols_normal_equations(y: &[f64], cols: &[&[f64]]) -> Option<(Vec<f64>, f64)> {
    let n = y.len();
    let p = cols.len() + 1;
    let x = DMatrix::from_fn(n, p, |t, j| if j == 0 { 1.0 } else { cols[j - 1][t] });
    let xtx = x.transpose() * &x;
    let xty = x.transpose() * DVector::from_column_slice(y);
    let chol = xtx.cholesky()?;
    let beta = chol.solve(&xty);
    let resid = DVector::from_column_slice(y) - &x * &beta;
    Some((beta.iter().copied().collect(), resid.norm_squared()))
}

pub struct BruteForceChoice {
    pub subset: Vec<String>,
    pub rss: f64,
    pub criterion: f64,
    pub per_size: Vec<(usize, Vec<String>)>,
}

/// Scores every non-empty subset of `candidates` of size `<= j_max` in one
/// pass over bitmasks: best R² per size, then lowest criterion.
pub fn brute_force_selection(
    panel: &OutcomePanel,
    treated: &str,
    candidates: &[String],
    last_pre_year: i32,
    j_max: usize,
    criterion: impl Fn(f64, usize, usize) -> f64,
) -> BruteForceChoice {
    let pre: Vec<i32> = panel
        .years()
        .iter()
        .copied()
        .filter(|&y| y <= last_pre_year)
        .collect();
    let y = panel.series(treated, &pre).unwrap();
    let series: Vec<Vec<f64>> = candidates
        .iter()
        .map(|u| panel.series(u, &pre).unwrap())
        .collect();
    let n = y.len();
    let k = candidates.len();
    let mut per_size: Vec<Option<(f64, u32)>> = vec![None; j_max + 1];
    for mask in 1u32..(1 << k) {
        let size = mask.count_ones() as usize;
        if size > j_max {
            continue;
        }
        let cols: Vec<&[f64]> = (0..k)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| series[i].as_slice())
            .collect();
        let Some((_, rss)) = ols_normal_equations(&y, &cols) else {
            continue;
        };
        match per_size[size] {
            Some((best, _)) if best <= rss => {}
            _ => per_size[size] = Some((rss, mask)),
        }
    }
    let names = |mask: u32| -> Vec<String> {
        (0..k)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| candidates[i].clone())
            .collect()
    };
    let mut chosen: Option<(f64, f64, u32)> = None;
    let mut winners = Vec::new();
    for (size, w) in per_size.iter().enumerate() {
        if let Some((rss, mask)) = *w {
            winners.push((size, names(mask)));
            let score = criterion(rss, n, size + 1);
            if chosen.is_none_or(|(_, s, _)| score < s) {
                chosen = Some((rss, score, mask));
            }
        }
    }
    let (rss, score, mask) = chosen.expect("some subset is full rank");
    BruteForceChoice {
        subset: names(mask),
        rss,
        criterion: score,
        per_size: winners,
    }
}

/// Random strictly positive DEA cross sections in a single year.
pub fn random_dea(r: &mut ChaCha8Rng, n: usize, m: usize, s: usize) -> DeaDataset {
    let units = (0..n).map(|j| format!("D{j}")).collect();
    let ins = (0..m).map(|i| format!("x{i}")).collect();
    let outs = (0..s).map(|k| format!("y{k}")).collect();
    let inputs = vec![(0..n)
        .map(|_| (0..m).map(|_| r.gen_range(0.5..10.0)).collect())
        .collect()];
    let outputs = vec![(0..n)
        .map(|_| (0..s).map(|_| r.gen_range(0.5..10.0)).collect())
        .collect()];
    DeaDataset::new(units, vec![2000], ins, outs, inputs, outputs).unwrap()
}

/// A panel of `1 + controls` noisy factor-driven series with `years` rows;
/// unit 0 is `treated`.
pub fn random_factor_panel(r: &mut ChaCha8Rng, controls: usize, years: usize) -> OutcomePanel {
    let seed = r.gen();
    let noise = r.gen_range(0.05..0.3);
    placeval::synthetic::factor_panel(controls, 1990, years, 3, noise, seed)
}
