//! Least-squares plumbing shared by the evaluation functions.
//!
//! Subset regressions are solved from a single pass over the data: the
//! centered second-moment matrix of (features, response) is computed once,
//! and each coalition's fit reduces to a small symmetric solve. For ordinary
//! least squares with an intercept this is algebraically identical to
//! fitting the submodel directly.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Ridge added to a singular normal matrix before giving up.
pub const RIDGE: f64 = 1e-12;

/// Centered second moments of a set of columns plus a response, normalized
/// by `n`.
#[derive(Debug, Clone)]
pub struct Moments {
    pub n: usize,
    pub means: Vec<f64>,
    pub y_mean: f64,
    /// Covariance of the columns (biased, ÷n).
    pub cov: DMatrix<f64>,
    /// Covariance of each column with the response.
    pub cov_y: DVector<f64>,
    /// Variance of the response (biased, ÷n).
    pub var_y: f64,
}

impl Moments {
    pub fn from_columns(columns: &[&[f64]], y: &[f64]) -> Result<Moments> {
        let n = y.len();
        let d = columns.len();
        if n == 0 {
            return Err(Error::invalid("empty dataset"));
        }
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::invalid("column length mismatch"));
        }
        let means: Vec<f64> = columns
            .iter()
            .map(|c| c.iter().sum::<f64>() / n as f64)
            .collect();
        let y_mean = y.iter().sum::<f64>() / n as f64;
        let mut cov = DMatrix::zeros(d, d);
        let mut cov_y = DVector::zeros(d);
        for i in 0..d {
            for j in i..d {
                let mut acc = 0.0;
                for r in 0..n {
                    acc += (columns[i][r] - means[i]) * (columns[j][r] - means[j]);
                }
                let c = acc / n as f64;
                cov[(i, j)] = c;
                cov[(j, i)] = c;
            }
            let mut acc = 0.0;
            for r in 0..n {
                acc += (columns[i][r] - means[i]) * (y[r] - y_mean);
            }
            cov_y[i] = acc / n as f64;
        }
        let var_y = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum::<f64>() / n as f64;
        Ok(Moments {
            n,
            means,
            y_mean,
            cov,
            cov_y,
            var_y,
        })
    }

    /// Exact population moments (zero means) from a covariance matrix with
    /// the response in the last row/column.
    pub fn from_covariance(cov_with_y: &[Vec<f64>]) -> Result<Moments> {
        let k = cov_with_y.len();
        if k < 2 || cov_with_y.iter().any(|row| row.len() != k) {
            return Err(Error::invalid("covariance matrix must be square"));
        }
        let d = k - 1;
        let cov = DMatrix::from_fn(d, d, |i, j| cov_with_y[i][j]);
        let cov_y = DVector::from_fn(d, |i, _| cov_with_y[i][d]);
        Ok(Moments {
            n: 0,
            means: vec![0.0; d],
            y_mean: 0.0,
            cov,
            cov_y,
            var_y: cov_with_y[d][d],
        })
    }

    fn submatrix(&self, subset: &[usize]) -> (DMatrix<f64>, DVector<f64>) {
        let k = subset.len();
        let a = DMatrix::from_fn(k, k, |i, j| self.cov[(subset[i], subset[j])]);
        let b = DVector::from_fn(k, |i, _| self.cov_y[subset[i]]);
        (a, b)
    }

    /// Coefficients of the least-squares fit of the response on the given
    /// columns (with intercept), solved from the moment matrix.
    pub fn solve_subset(&self, subset: &[usize]) -> Result<DVector<f64>> {
        if subset.is_empty() {
            return Ok(DVector::zeros(0));
        }
        let (a, b) = self.submatrix(subset);
        solve_spd(&a, &b).ok_or_else(|| {
            Error::numeric(format!(
                "normal equations singular for columns {subset:?} even after {RIDGE:e} ridge"
            ))
        })
    }

    /// Variance explained by the least-squares fit on `subset`:
    /// `σ_yS Σ_SS⁻¹ σ_Sy` (biased normalization, matching `var_y`).
    pub fn explained_variance(&self, subset: &[usize]) -> Result<f64> {
        if subset.is_empty() {
            return Ok(0.0);
        }
        let (_, b) = self.submatrix(subset);
        let beta = self.solve_subset(subset)?;
        Ok(beta.dot(&b))
    }

    /// In-sample R² of the fit on `subset`; zero for a constant response.
    pub fn r_squared(&self, subset: &[usize]) -> Result<f64> {
        if self.var_y <= 0.0 {
            return Ok(0.0);
        }
        let explained = self.explained_variance(subset)?;
        // Rounding can push the ratio a hair outside [0, 1].
        Ok((explained / self.var_y).clamp(0.0, 1.0))
    }
}

/// Solve a symmetric positive-definite system by Cholesky, retrying once
/// with a small ridge if the factorization fails.
pub fn solve_spd(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    if let Some(chol) = a.clone().cholesky() {
        return Some(chol.solve(b));
    }
    let k = a.nrows();
    let ridged = a + DMatrix::identity(k, k) * RIDGE;
    ridged.cholesky().map(|chol| chol.solve(b))
}

/// Rank of a symmetric matrix at a relative tolerance, via column-pivoted QR.
pub fn spd_rank(a: &DMatrix<f64>, rel_tol: f64) -> usize {
    let qr = a.clone().col_piv_qr();
    let r = qr.r();
    let scale = (0..r.nrows().min(r.ncols()))
        .map(|i| r[(i, i)].abs())
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return 0;
    }
    (0..r.nrows().min(r.ncols()))
        .filter(|&i| r[(i, i)].abs() > rel_tol * scale)
        .count()
}
