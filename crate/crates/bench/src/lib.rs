//! Shared inputs for the solver benchmarks.

use placeval::{DeaDataset, LinearProgram};

/// Dense feasible program: `n` variables, `m` equality rows, positive data.
pub fn dense_lp(m: usize, n: usize) -> LinearProgram {
    let constraints: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            (0..n)
                .map(|j| 1.0 + ((i * 7 + j * 13) % 11) as f64)
                .collect()
        })
        .collect();
    let rhs = constraints
        .iter()
        .map(|r| r.iter().sum::<f64>() / 2.0)
        .collect();
    let objective = (0..n).map(|j| 1.0 + (j % 5) as f64).collect();
    LinearProgram::new(objective, constraints, rhs)
}

/// 20 units, 21 years, 4 inputs and 1 output.
pub fn dea_fixture() -> DeaDataset {
    placeval::synthetic::dea_dataset(20, 1995, 21, 4, 1, 7).expect("synthetic data is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_solvable() {
        let lp = dense_lp(20, 60);
        let sol = placeval::solve_lp(&lp).unwrap();
        assert_eq!(sol.status, placeval::LpStatus::Optimal);
        assert_eq!(dea_fixture().n_units(), 20);
    }
}
