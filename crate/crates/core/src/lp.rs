//! Dense two-phase simplex for standard-form programs
//! `min c'x  s.t.  Ax = b, x >= 0`.
//!
//! Pivoting follows Bland's rule (lowest-index entering column, lowest-index
//! leaving basic variable on ratio ties), so degenerate programs cannot cycle.
//! Rows are equilibrated by their largest coefficient before solving.

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;
const MAX_ITERS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    /// Equality rows of `A`.
    pub constraints: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub labels: Vec<String>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>, constraints: Vec<Vec<f64>>, rhs: Vec<f64>) -> Self {
        let labels = (0..objective.len())
            .map(|j| format!("x{}", j + 1))
            .collect();
        Self {
            objective,
            constraints,
            rhs,
            labels,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.labels = labels;
        self
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_rows(&self) -> usize {
        self.constraints.len()
    }

    fn check(&self) -> Result<()> {
        let n = self.n_vars();
        if n == 0 {
            return Err(Error::Argument("program has no variables".into()));
        }
        if self.rhs.len() != self.constraints.len() {
            return Err(Error::Argument(format!(
                "{} constraint rows but {} right-hand sides",
                self.constraints.len(),
                self.rhs.len()
            )));
        }
        if let Some((i, row)) = self
            .constraints
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != n)
        {
            return Err(Error::Argument(format!(
                "constraint row {i} has {} coefficients, expected {n}",
                row.len()
            )));
        }
        if self.labels.len() != n {
            return Err(Error::Argument(format!(
                "{} labels for {n} variables",
                self.labels.len()
            )));
        }
        let finite = self
            .objective
            .iter()
            .chain(&self.rhs)
            .all(|v| v.is_finite())
            && self.constraints.iter().flatten().all(|v| v.is_finite());
        if !finite {
            return Err(Error::Argument("non-finite coefficient".into()));
        }
        Ok(())
    }

    /// Max-norm of `Ax - b`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.constraints
            .iter()
            .zip(&self.rhs)
            .map(|(row, b)| (row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - b).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal solution; empty unless `status` is `Optimal`.
    pub x: Vec<f64>,
    /// `+inf` when infeasible, `-inf` when unbounded.
    pub objective_value: f64,
}

struct Tableau {
    /// `rows[i]` holds the constraint coefficients followed by the rhs.
    rows: Vec<Vec<f64>>,
    /// Reduced costs followed by the negated objective value.
    cost: Vec<f64>,
    basis: Vec<usize>,
    n_cols: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.n_cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let width = self.n_cols + 1;
        let p = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        self.rows[r][c] = 1.0;
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for k in 0..width {
                    row[k] -= f * pivot_row[k];
                }
                row[c] = 0.0;
            }
        }
        let f = self.cost[c];
        if f != 0.0 {
            for (ck, pk) in self.cost.iter_mut().zip(&pivot_row[..width]) {
                *ck -= f * pk;
            }
            self.cost[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Runs Bland-rule simplex iterations over columns `< active`.
    fn iterate(&mut self, active: usize) -> Result<Outcome> {
        for _ in 0..MAX_ITERS {
            let Some(enter) = (0..active).find(|&j| self.cost[j] < -COST_TOL) else {
                return Ok(Outcome::Optimal);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][enter];
                if a > PIVOT_TOL {
                    let ratio = self.rhs(i).max(0.0) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            let tie = (ratio - lr).abs() <= 1e-12 * (1.0 + lr.abs());
                            if ratio < lr && !tie || tie && self.basis[i] < self.basis[li] {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            match leave {
                None => return Ok(Outcome::Unbounded),
                Some((r, _)) => self.pivot(r, enter),
            }
        }
        Err(Error::Argument(format!(
            "simplex did not terminate within {MAX_ITERS} pivots"
        )))
    }
}

/// Solves `problem` with the two-phase method.
///
/// Infeasible and unbounded programs are reported through
/// [`LpSolution::status`]; only malformed input is an error.
pub fn solve_lp(problem: &LinearProgram) -> Result<LpSolution> {
    problem.check()?;
    let n = problem.n_vars();
    let m = problem.n_rows();

    if m == 0 {
        // Only x >= 0 binds.
        if problem.objective.iter().any(|&c| c < 0.0) {
            return Ok(unbounded());
        }
        return Ok(LpSolution {
            status: LpStatus::Optimal,
            x: vec![0.0; n],
            objective_value: 0.0,
        });
    }

    // Equilibrate rows and make the rhs nonnegative.
    let mut rows = Vec::with_capacity(m);
    let mut b_norm: f64 = 0.0;
    for (row, &b) in problem.constraints.iter().zip(&problem.rhs) {
        let scale = row.iter().fold(b.abs(), |s, v| s.max(v.abs()));
        let scale = if scale > 0.0 { scale } else { 1.0 };
        let sign = if b < 0.0 { -1.0 } else { 1.0 };
        let f = sign / scale;
        let mut r: Vec<f64> = row.iter().map(|v| v * f).collect();
        // artificial columns
        r.extend(std::iter::repeat_n(0.0, m));
        r.push(b * f);
        b_norm = b_norm.max((b * f).abs());
        rows.push(r);
    }
    for (i, r) in rows.iter_mut().enumerate() {
        r[n + i] = 1.0;
    }

    // Phase 1: minimise the sum of artificials.
    let width = n + m + 1;
    let mut cost = vec![0.0; width];
    for r in &rows {
        for j in 0..n {
            cost[j] -= r[j];
        }
        cost[width - 1] -= r[width - 1];
    }
    let mut t = Tableau {
        rows,
        cost,
        basis: (n..n + m).collect(),
        n_cols: n + m,
    };
    match t.iterate(n + m)? {
        Outcome::Optimal => {}
        Outcome::Unbounded => unreachable!("phase 1 objective is bounded below by 0"),
    }
    let infeasibility = -t.cost[width - 1];
    if infeasibility > FEAS_TOL * (1.0 + b_norm) {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            x: Vec::new(),
            objective_value: f64::INFINITY,
        });
    }

    // Drive remaining artificials out of the basis; drop redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| t.rows[i][j].abs() > PIVOT_TOL) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }

    // Phase 2 over the original columns (artificials are never re-entered).
    let mut cost = vec![0.0; width];
    cost[..n].copy_from_slice(&problem.objective);
    for (r, &bj) in t.rows.iter().zip(&t.basis) {
        let cb = problem.objective[bj];
        if cb != 0.0 {
            for k in 0..width {
                cost[k] -= cb * r[k];
            }
        }
    }
    t.cost = cost;
    if let Outcome::Unbounded = t.iterate(n)? {
        return Ok(unbounded());
    }

    let mut x = vec![0.0; n];
    for (i, &bj) in t.basis.iter().enumerate() {
        x[bj] = t.rhs(i).max(0.0);
    }
    let objective_value = problem.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        objective_value,
    })
}

fn unbounded() -> LpSolution {
    LpSolution {
        status: LpStatus::Unbounded,
        x: Vec::new(),
        objective_value: f64::NEG_INFINITY,
    }
}
