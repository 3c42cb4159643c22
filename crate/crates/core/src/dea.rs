//! Input-oriented constant-returns DEA: the standard radial (CCR) model and
//! the super-efficiency variant that drops the evaluated unit from its own
//! reference set.
//!
//! For unit `q` the envelopment program is
//!
//! ```text
//! min θ
//! s.t. Σ_j x_ij λ_j + s⁻_i = θ x_iq      i = 1..m
//!      Σ_j y_kj λ_j − s⁺_k = y_kq        k = 1..r
//!      λ, s⁻, s⁺ ≥ 0
//! ```
//!
//! with `j` running over all units (CCR) or all units but `q`
//! (super-efficiency). A second program with θ held at its optimum maximises
//! total slack, so the reported slacks are the maximal ones.
//!
//! Returns to scale are labelled from Σλ with the convention Σλ > 1 ⇒
//! increasing, Σλ < 1 ⇒ decreasing. Much of the DEA literature uses the
//! opposite mapping; the label is informational only.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus};
use crate::panel::{DeaDataset, OutcomePanel};

/// Tolerance on Σλ around 1 for the returns-to-scale label.
pub const RTS_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RtsClass {
    Increasing,
    Constant,
    Decreasing,
}

impl RtsClass {
    pub fn from_lambda_sum(sum: f64) -> Self {
        if sum > 1.0 + RTS_EPS {
            RtsClass::Increasing
        } else if sum < 1.0 - RTS_EPS {
            RtsClass::Decreasing
        } else {
            RtsClass::Constant
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeaModel {
    Ccr,
    SuperEfficiency,
}

/// Raw solution of one envelopment program, indexed by unit position.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelopment {
    pub feasible: bool,
    pub theta: Option<f64>,
    /// One weight per unit; the evaluated unit's entry is 0 in
    /// super-efficiency mode.
    pub lambdas: Vec<f64>,
    pub input_slacks: Vec<f64>,
    pub output_slacks: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyResult {
    pub year: i32,
    pub unit: String,
    pub theta: Option<f64>,
    /// Reference units and their weights; never contains `unit` itself in
    /// super-efficiency mode.
    pub lambdas: Vec<(String, f64)>,
    pub input_slacks: Vec<f64>,
    pub output_slacks: Vec<f64>,
    pub lambda_sum: f64,
    pub rts_class: Option<RtsClass>,
    pub feasible: bool,
}

fn column_means(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.len() as f64;
    let width = rows.first().map_or(0, Vec::len);
    (0..width)
        .map(|c| rows.iter().map(|r| r[c]).sum::<f64>() / n)
        .map(|m| if m > 0.0 && m.is_finite() { m } else { 1.0 })
        .collect()
}

fn normalised(rows: &[Vec<f64>], scale: &[f64]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| r.iter().zip(scale).map(|(v, s)| v / s).collect())
        .collect()
}

/// Solves the envelopment program for unit `target` of one cross section.
///
/// `inputs[j]` and `outputs[j]` are unit `j`'s vectors. No positivity check
/// is made here; [`DeaDataset`] guarantees it for the public entry points.
pub fn solve_envelopment(
    inputs: &[Vec<f64>],
    outputs: &[Vec<f64>],
    target: usize,
    model: DeaModel,
) -> Result<Envelopment> {
    let n = inputs.len();
    if outputs.len() != n || target >= n {
        return Err(Error::Argument("inconsistent cross section".into()));
    }
    let m = inputs[0].len();
    let r = outputs[0].len();
    if inputs.iter().any(|v| v.len() != m) || outputs.iter().any(|v| v.len() != r) {
        return Err(Error::Argument("ragged input/output vectors".into()));
    }
    let refs: Vec<usize> = match model {
        DeaModel::Ccr => (0..n).collect(),
        DeaModel::SuperEfficiency => (0..n).filter(|&j| j != target).collect(),
    };
    if refs.is_empty() {
        return Err(Error::Argument(
            "super-efficiency needs at least 2 units (empty reference set)".into(),
        ));
    }

    // Each dimension is divided by its cross-sectional mean; θ and λ are
    // invariant to this, slacks are scaled back afterwards.
    let in_scale = column_means(inputs);
    let out_scale = column_means(outputs);
    let x = normalised(inputs, &in_scale);
    let y = normalised(outputs, &out_scale);
    let nl = refs.len();

    // Stage 1: variables [θ, λ_refs, s⁻, s⁺].
    let n_vars = 1 + nl + m + r;
    let mut rows = Vec::with_capacity(m + r);
    let mut rhs = Vec::with_capacity(m + r);
    for i in 0..m {
        let mut row = vec![0.0; n_vars];
        row[0] = -x[target][i];
        for (l, &j) in refs.iter().enumerate() {
            row[1 + l] = x[j][i];
        }
        row[1 + nl + i] = 1.0;
        rows.push(row);
        rhs.push(0.0);
    }
    for k in 0..r {
        let mut row = vec![0.0; n_vars];
        for (l, &j) in refs.iter().enumerate() {
            row[1 + l] = y[j][k];
        }
        row[1 + nl + m + k] = -1.0;
        rows.push(row);
        rhs.push(y[target][k]);
    }
    let mut objective = vec![0.0; n_vars];
    objective[0] = 1.0;
    let stage1 = solve_lp(&LinearProgram::new(objective, rows, rhs))?;
    if stage1.status != LpStatus::Optimal {
        return Ok(Envelopment {
            feasible: false,
            theta: None,
            lambdas: vec![0.0; n],
            input_slacks: vec![0.0; m],
            output_slacks: vec![0.0; r],
        });
    }
    let theta = stage1.x[0];

    // Stage 2: θ fixed, variables [λ_refs, s⁻, s⁺], maximise Σ slacks.
    let n2 = nl + m + r;
    let mut rows = Vec::with_capacity(m + r);
    let mut rhs = Vec::with_capacity(m + r);
    for i in 0..m {
        let mut row = vec![0.0; n2];
        for (l, &j) in refs.iter().enumerate() {
            row[l] = x[j][i];
        }
        row[nl + i] = 1.0;
        rows.push(row);
        rhs.push(theta * x[target][i]);
    }
    for k in 0..r {
        let mut row = vec![0.0; n2];
        for (l, &j) in refs.iter().enumerate() {
            row[l] = y[j][k];
        }
        row[nl + m + k] = -1.0;
        rows.push(row);
        rhs.push(y[target][k]);
    }
    let mut objective = vec![0.0; n2];
    objective[nl..].iter_mut().for_each(|c| *c = -1.0);
    let stage2 = solve_lp(&LinearProgram::new(objective, rows, rhs))?;
    let sol: Vec<f64> = if stage2.status == LpStatus::Optimal {
        stage2.x
    } else {
        stage1.x[1..].to_vec()
    };

    let mut lambdas = vec![0.0; n];
    for (l, &j) in refs.iter().enumerate() {
        lambdas[j] = sol[l];
    }
    let input_slacks = (0..m).map(|i| sol[nl + i] * in_scale[i]).collect();
    let output_slacks = (0..r).map(|k| sol[nl + m + k] * out_scale[k]).collect();
    Ok(Envelopment {
        feasible: true,
        theta: Some(theta),
        lambdas,
        input_slacks,
        output_slacks,
    })
}

fn evaluate(data: &DeaDataset, year: i32, unit: &str, model: DeaModel) -> Result<EfficiencyResult> {
    let t = data
        .year_index(year)
        .ok_or_else(|| Error::Argument(format!("year {year} not in dataset")))?;
    let q = data
        .unit_index(unit)
        .ok_or_else(|| Error::Argument(format!("unit {unit:?} not in dataset")))?;
    evaluate_cell(data, t, q, model)
}

fn evaluate_cell(
    data: &DeaDataset,
    t: usize,
    q: usize,
    model: DeaModel,
) -> Result<EfficiencyResult> {
    let inputs: Vec<Vec<f64>> = (0..data.n_units())
        .map(|j| data.inputs(t, j).to_vec())
        .collect();
    let outputs: Vec<Vec<f64>> = (0..data.n_units())
        .map(|j| data.outputs(t, j).to_vec())
        .collect();
    let env = solve_envelopment(&inputs, &outputs, q, model)?;
    let lambdas: Vec<(String, f64)> = data
        .units()
        .iter()
        .zip(&env.lambdas)
        .enumerate()
        .filter(|(j, _)| model == DeaModel::Ccr || *j != q)
        .map(|(_, (u, &l))| (u.clone(), l))
        .collect();
    let lambda_sum = lambdas.iter().map(|(_, l)| l).sum();
    Ok(EfficiencyResult {
        year: data.years()[t],
        unit: data.units()[q].clone(),
        theta: env.theta,
        rts_class: env.feasible.then(|| RtsClass::from_lambda_sum(lambda_sum)),
        lambdas,
        input_slacks: env.input_slacks,
        output_slacks: env.output_slacks,
        lambda_sum,
        feasible: env.feasible,
    })
}

/// Standard input-oriented CCR score; θ ∈ (0, 1].
pub fn ccr_efficiency(data: &DeaDataset, year: i32, unit: &str) -> Result<EfficiencyResult> {
    evaluate(data, year, unit, DeaModel::Ccr)
}

/// Super-efficiency score. Equals the CCR score for inefficient units and is
/// at least 1 for efficient ones.
pub fn super_efficiency(data: &DeaDataset, year: i32, unit: &str) -> Result<EfficiencyResult> {
    evaluate(data, year, unit, DeaModel::SuperEfficiency)
}

/// Super-efficiency scores for every (year, unit) cell.
#[derive(Debug, Clone)]
pub struct EfficiencyTable {
    /// Scores; infeasible cells hold `+inf`.
    pub panel: OutcomePanel,
    /// `results[year_idx][unit_idx]`
    pub results: Vec<Vec<EfficiencyResult>>,
}

impl EfficiencyTable {
    pub fn infeasible_cells(&self) -> Vec<(i32, String)> {
        self.results
            .iter()
            .flatten()
            .filter(|r| !r.feasible)
            .map(|r| (r.year, r.unit.clone()))
            .collect()
    }
}

/// Scores each year as an independent cross section. Cells are solved in
/// parallel and assembled in (year, unit) order.
pub fn efficiency_table(data: &DeaDataset) -> Result<EfficiencyTable> {
    let n = data.n_units();
    let cells: Vec<(usize, usize)> = (0..data.years().len())
        .flat_map(|t| (0..n).map(move |q| (t, q)))
        .collect();
    let solved: Vec<EfficiencyResult> = cells
        .par_iter()
        .map(|&(t, q)| evaluate_cell(data, t, q, DeaModel::SuperEfficiency))
        .collect::<Result<_>>()?;
    let results: Vec<Vec<EfficiencyResult>> = solved.chunks(n).map(<[_]>::to_vec).collect();
    let values = results
        .iter()
        .map(|row| {
            row.iter()
                .map(|r| r.theta.unwrap_or(f64::INFINITY))
                .collect()
        })
        .collect();
    let panel = OutcomePanel::new(
        data.units().to_vec(),
        data.years().to_vec(),
        values,
        "super_efficiency",
    )?;
    Ok(EfficiencyTable { panel, results })
}

/// Per-year spread (max − min over units).
pub fn yearly_range(panel: &OutcomePanel) -> BTreeMap<i32, f64> {
    panel
        .years()
        .iter()
        .zip(panel.rows())
        .map(|(&y, row)| {
            let (lo, hi) = row
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                    (lo.min(v), hi.max(v))
                });
            (y, hi - lo)
        })
        .collect()
}
