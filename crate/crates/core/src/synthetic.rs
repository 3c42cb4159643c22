//! Seeded generators for test fixtures and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::panel::{DeaDataset, OutcomePanel};

/// A positive DEA dataset with a Cobb-Douglas-like output and
/// multiplicative noise, `units` per year over `first_year..first_year+years`.
pub fn dea_dataset(
    units: usize,
    first_year: i32,
    years: usize,
    n_inputs: usize,
    n_outputs: usize,
    seed: u64,
) -> Result<DeaDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit_names: Vec<String> = (0..units).map(|j| format!("U{:02}", j + 1)).collect();
    let input_labels: Vec<String> = (0..n_inputs).map(|i| format!("x{}", i + 1)).collect();
    let output_labels: Vec<String> = (0..n_outputs).map(|k| format!("y{}", k + 1)).collect();
    let size: Vec<f64> = (0..units).map(|_| rng.gen_range(0.5..5.0)).collect();
    let mut inputs = Vec::with_capacity(years);
    let mut outputs = Vec::with_capacity(years);
    for t in 0..years {
        let growth = 1.0 + 0.05 * t as f64;
        let mut yi = Vec::with_capacity(units);
        let mut yo = Vec::with_capacity(units);
        for s in &size {
            let x: Vec<f64> = (0..n_inputs)
                .map(|_| s * growth * rng.gen_range(0.5..1.5))
                .collect();
            let core: f64 = x.iter().map(|v| v.powf(1.0 / n_inputs as f64)).product();
            let y: Vec<f64> = (0..n_outputs)
                .map(|_| core * rng.gen_range(0.6..1.4))
                .collect();
            yi.push(x);
            yo.push(y);
        }
        inputs.push(yi);
        outputs.push(yo);
    }
    DeaDataset::new(
        unit_names,
        (first_year..first_year + years as i32).collect(),
        input_labels,
        output_labels,
        inputs,
        outputs,
    )
}

/// A panel driven by `factors` common factors with unit loadings and noise.
/// Column 0 is named `treated`, the rest `c01`, `c02`, ...
pub fn factor_panel(
    controls: usize,
    first_year: i32,
    years: usize,
    factors: usize,
    noise: f64,
    seed: u64,
) -> OutcomePanel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f: Vec<Vec<f64>> = (0..years)
        .map(|_| (0..factors).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let n = controls + 1;
    let loadings: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..factors).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let alpha: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
    let values = f
        .iter()
        .map(|ft| {
            (0..n)
                .map(|i| {
                    let common: f64 = loadings[i].iter().zip(ft).map(|(b, x)| b * x).sum();
                    alpha[i] + common + noise * rng.gen_range(-1.0..1.0)
                })
                .collect()
        })
        .collect();
    let mut names = vec!["treated".to_string()];
    names.extend((1..=controls).map(|i| format!("c{i:02}")));
    OutcomePanel::new(
        names,
        (first_year..first_year + years as i32).collect(),
        values,
        "synthetic",
    )
    .expect("generated panel is valid")
}
