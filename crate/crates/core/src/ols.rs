//! Least squares with an intercept via Householder QR, plus the information
//! criteria used to compare fits of different sizes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::student_t_two_sided_p;

/// A column whose component orthogonal to the preceding columns is below
/// this fraction of its own norm is treated as collinear.
const RANK_TOL: f64 = 1e-10;
/// RSS at or below `EXACT_FIT_TOL * Σy²` is snapped to exactly zero.
const EXACT_FIT_TOL: f64 = 1e-20;

/// Which information criterion ranks the per-size best subsets.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AicVariant {
    /// `n ln(RSS/n) + 2k`
    Aic,
    /// AIC plus the small-sample term `2k(k+1)/(n-k-1)`.
    #[default]
    Aicc,
}

impl AicVariant {
    pub fn score(self, rss: f64, n_obs: usize, n_params: usize) -> f64 {
        match self {
            AicVariant::Aic => aic_score(rss, n_obs, n_params),
            AicVariant::Aicc => aicc_score(rss, n_obs, n_params),
        }
    }
}

impl std::str::FromStr for AicVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "aic" => Ok(AicVariant::Aic),
            "aicc" => Ok(AicVariant::Aicc),
            other => Err(Error::Argument(format!("unknown AIC variant {other:?}"))),
        }
    }
}

/// Gaussian-likelihood AIC, `n ln(RSS/n) + 2k`, where `k` counts the
/// intercept and every slope. An exact fit (`rss == 0`) scores `-inf`.
pub fn aic_score(rss: f64, n_obs: usize, n_params: usize) -> f64 {
    if rss <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let n = n_obs as f64;
    n * (rss / n).ln() + 2.0 * n_params as f64
}

/// Small-sample corrected AIC. Requires `n_obs > n_params + 1`.
pub fn aicc_score(rss: f64, n_obs: usize, n_params: usize) -> f64 {
    let k = n_params as f64;
    let denom = n_obs as f64 - k - 1.0;
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    aic_score(rss, n_obs, n_params) + 2.0 * k * (k + 1.0) / denom
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OlsFit {
    pub control_units: Vec<String>,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub rss: f64,
    pub r_squared: f64,
    pub aic: f64,
    pub aicc: f64,
    pub intercept_std_error: f64,
    pub std_errors: Vec<f64>,
    pub t_values: Vec<f64>,
    pub p_values: Vec<f64>,
    pub n_obs: usize,
    pub df_resid: usize,
}

impl OlsFit {
    pub fn n_params(&self) -> usize {
        self.coefficients.len() + 1
    }

    pub fn criterion(&self, variant: AicVariant) -> f64 {
        match variant {
            AicVariant::Aic => self.aic,
            AicVariant::Aicc => self.aicc,
        }
    }

    /// `intercept + Σ coef_i x_i` for one observation of the controls.
    pub fn predict_row(&self, controls: &[f64]) -> f64 {
        self.coefficients
            .iter()
            .zip(controls)
            .fold(self.intercept, |acc, (b, x)| acc + b * x)
    }
}

/// Intercept-augmented QR factorisation of one design.
pub(crate) struct QrSolve {
    /// Intercept first, then one coefficient per column.
    pub beta: Vec<f64>,
    pub rss: f64,
    /// Upper-triangular factor, row-major `p x p`.
    r: Vec<f64>,
    p: usize,
}

impl QrSolve {
    /// Returns `None` when the design (with intercept) is rank deficient.
    pub fn new(y: &[f64], columns: &[&[f64]]) -> Option<Self> {
        let n = y.len();
        let p = columns.len() + 1;
        // column-major working copy
        let mut a = vec![0.0; n * p];
        a[..n].fill(1.0);
        for (c, col) in columns.iter().enumerate() {
            a[(c + 1) * n..(c + 2) * n].copy_from_slice(col);
        }
        let norms: Vec<f64> = (0..p)
            .map(|c| {
                a[c * n..(c + 1) * n]
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt()
            })
            .collect();
        let mut qty = y.to_vec();

        for k in 0..p {
            let col = &a[k * n..(k + 1) * n];
            let alpha = col[k..].iter().map(|v| v * v).sum::<f64>().sqrt();
            if alpha.is_nan() || alpha <= RANK_TOL * norms[k] || norms[k] == 0.0 {
                return None;
            }
            let alpha = if col[k] > 0.0 { -alpha } else { alpha };
            // v = x - alpha e_k, stored in place of the column below the diagonal
            let mut v: Vec<f64> = col[k..].to_vec();
            v[0] -= alpha;
            let vnorm2: f64 = v.iter().map(|x| x * x).sum();
            for c in k..p {
                let cc = &mut a[c * n..(c + 1) * n];
                let dot: f64 = v.iter().zip(&cc[k..]).map(|(x, z)| x * z).sum();
                let f = 2.0 * dot / vnorm2;
                for (z, x) in cc[k..].iter_mut().zip(&v) {
                    *z -= f * x;
                }
            }
            a[k * n + k] = alpha;
            let dot: f64 = v.iter().zip(&qty[k..]).map(|(x, z)| x * z).sum();
            let f = 2.0 * dot / vnorm2;
            for (z, x) in qty[k..].iter_mut().zip(&v) {
                *z -= f * x;
            }
        }

        let mut r = vec![0.0; p * p];
        for i in 0..p {
            for j in i..p {
                r[i * p + j] = a[j * n + i];
            }
        }
        let mut beta = vec![0.0; p];
        for i in (0..p).rev() {
            let s: f64 = (i + 1..p).map(|j| r[i * p + j] * beta[j]).sum();
            beta[i] = (qty[i] - s) / r[i * p + i];
        }

        let mut rss = 0.0;
        for t in 0..n {
            let fitted = columns
                .iter()
                .enumerate()
                .fold(beta[0], |acc, (c, col)| acc + beta[c + 1] * col[t]);
            let e = y[t] - fitted;
            rss += e * e;
        }
        let y2: f64 = y.iter().map(|v| v * v).sum();
        if rss <= EXACT_FIT_TOL * y2 {
            rss = 0.0;
        }
        Some(Self { beta, rss, r, p })
    }

    /// Diagonal of `(R'R)^{-1}`.
    fn inverse_gram_diag(&self) -> Vec<f64> {
        let p = self.p;
        let mut inv = vec![0.0; p * p];
        for col in 0..p {
            for i in (0..=col).rev() {
                let rhs = if i == col { 1.0 } else { 0.0 };
                let s: f64 = (i + 1..=col)
                    .map(|j| self.r[i * p + j] * inv[j * p + col])
                    .sum();
                inv[i * p + col] = (rhs - s) / self.r[i * p + i];
            }
        }
        (0..p)
            .map(|i| (i..p).map(|j| inv[i * p + j] * inv[i * p + j]).sum())
            .collect()
    }
}

/// Fits `y = a + Σ b_i x_i` by least squares.
///
/// `columns[i]` is the series of control `labels[i]`. Requires
/// `columns.len() + 2 <= y.len()` so at least one residual degree of freedom
/// remains.
pub fn ols_fit(y: &[f64], columns: &[Vec<f64>], labels: &[String]) -> Result<OlsFit> {
    let refs: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
    ols_fit_slices(y, &refs, labels)
}

pub(crate) fn ols_fit_slices(y: &[f64], columns: &[&[f64]], labels: &[String]) -> Result<OlsFit> {
    let n = y.len();
    if labels.len() != columns.len() {
        return Err(Error::Argument(format!(
            "{} labels for {} columns",
            labels.len(),
            columns.len()
        )));
    }
    if let Some(c) = columns.iter().find(|c| c.len() != n) {
        return Err(Error::Argument(format!(
            "column of length {} for {n} observations",
            c.len()
        )));
    }
    let p = columns.len() + 1;
    if p + 1 > n {
        return Err(Error::Argument(format!(
            "{p} parameters need at least {} observations, got {n}",
            p + 1
        )));
    }
    let qr = QrSolve::new(y, columns).ok_or_else(|| Error::Rank {
        controls: labels.to_vec(),
    })?;
    Ok(finish_fit(y, &qr, labels))
}

pub(crate) fn finish_fit(y: &[f64], qr: &QrSolve, labels: &[String]) -> OlsFit {
    let n = y.len();
    let p = qr.p;
    let df = n - p;
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let r_squared = if tss > 0.0 {
        (1.0 - qr.rss / tss).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let sigma2 = qr.rss / df as f64;
    let se: Vec<f64> = qr
        .inverse_gram_diag()
        .into_iter()
        .map(|d| (sigma2 * d).sqrt())
        .collect();
    let coefficients = qr.beta[1..].to_vec();
    let std_errors = se[1..].to_vec();
    let t_values: Vec<f64> = coefficients
        .iter()
        .zip(&std_errors)
        .map(|(b, s)| b / s)
        .collect();
    let p_values = t_values
        .iter()
        .map(|&t| student_t_two_sided_p(t, df as f64))
        .collect();
    OlsFit {
        control_units: labels.to_vec(),
        intercept: qr.beta[0],
        coefficients,
        rss: qr.rss,
        r_squared,
        aic: aic_score(qr.rss, n, p),
        aicc: aicc_score(qr.rss, n, p),
        intercept_std_error: se[0],
        std_errors,
        t_values,
        p_values,
        n_obs: n,
        df_resid: df,
    }
}
