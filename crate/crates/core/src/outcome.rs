//! Per-arm linear outcome regressions supplying the fitted means and
//! residuals used by the regression and doubly robust estimators.

use nalgebra::{DMatrix, DVector};

use crate::data::{select_columns, ObservedSample};
use crate::error::{Error, Result};

/// Separate OLS fits on the treated and control arms, with counterfactual
/// predictions evaluated for every unit.
#[derive(Debug, Clone)]
pub struct FittedOutcome {
    /// Intercept + slopes, treated arm.
    pub beta1: DVector<f64>,
    /// Intercept + slopes, control arm.
    pub beta0: DVector<f64>,
    /// Predicted outcome under treatment for every unit.
    pub mu1_hat: Vec<f64>,
    /// Predicted outcome under control for every unit.
    pub mu0_hat: Vec<f64>,
    /// `y_i - mu_{z_i}(x_i)`, the own-arm residual.
    pub residuals: Vec<f64>,
    /// Columns of the caller's covariate matrix that entered the design.
    pub covariate_subset: Vec<usize>,
}

/// OLS of `y` on an intercept plus the rows of `x`, restricted to the units
/// flagged in `mask`. Solved by QR; errors if the restricted design is rank
/// deficient or has no more rows than columns.
fn ols_arm(
    y: &[f64],
    x: &DMatrix<f64>,
    mask: impl Fn(usize) -> bool,
    arm_name: &str,
) -> Result<DVector<f64>> {
    let rows: Vec<usize> = (0..y.len()).filter(|&i| mask(i)).collect();
    let p = x.ncols() + 1;
    if rows.len() <= p {
        return Err(Error::SingularDesign(format!(
            "{arm_name} arm has {} units for {p} parameters",
            rows.len()
        )));
    }
    let mut design = DMatrix::zeros(rows.len(), p);
    let mut rhs = DVector::zeros(rows.len());
    for (r, &i) in rows.iter().enumerate() {
        design[(r, 0)] = 1.0;
        for j in 0..x.ncols() {
            design[(r, j + 1)] = x[(i, j)];
        }
        rhs[r] = y[i];
    }
    let qr = design.qr();
    let r_mat = qr.r();
    let max_diag = (0..p).map(|j| r_mat[(j, j)].abs()).fold(0.0f64, f64::max);
    if (0..p).any(|j| r_mat[(j, j)].abs() < 1e-10 * max_diag.max(1e-300)) {
        return Err(Error::SingularDesign(format!("{arm_name} arm design")));
    }
    let qtb = qr.q().transpose() * rhs;
    r_mat
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::SingularDesign(format!("{arm_name} arm design")))
}

fn predict_row(beta: &DVector<f64>, x: &DMatrix<f64>, i: usize) -> f64 {
    let mut v = beta[0];
    for j in 0..x.ncols() {
        v += beta[j + 1] * x[(i, j)];
    }
    v
}

/// Fits the two arm regressions on the given covariate matrix and evaluates
/// both counterfactual predictions for all units.
pub fn fit_outcome_models_on(
    z: &[u8],
    y: &[f64],
    x: &DMatrix<f64>,
    covariate_subset: Vec<usize>,
) -> Result<FittedOutcome> {
    let n = z.len();
    if y.len() != n || x.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} treatments vs {} outcomes vs {} covariate rows",
            y.len(),
            x.nrows()
        )));
    }
    let beta1 = ols_arm(y, x, |i| z[i] == 1, "treated")?;
    let beta0 = ols_arm(y, x, |i| z[i] == 0, "control")?;
    let mu1_hat: Vec<f64> = (0..n).map(|i| predict_row(&beta1, x, i)).collect();
    let mu0_hat: Vec<f64> = (0..n).map(|i| predict_row(&beta0, x, i)).collect();
    let residuals = (0..n)
        .map(|i| y[i] - if z[i] == 1 { mu1_hat[i] } else { mu0_hat[i] })
        .collect();
    Ok(FittedOutcome {
        beta1,
        beta0,
        mu1_hat,
        mu0_hat,
        residuals,
        covariate_subset,
    })
}

/// Fits on a column subset of the sample's covariate matrix.
pub fn fit_outcome_models(
    sample: &ObservedSample,
    covariate_subset: &[usize],
) -> Result<FittedOutcome> {
    let x = select_columns(&sample.x, covariate_subset)?;
    fit_outcome_models_on(&sample.z, &sample.y, &x, covariate_subset.to_vec())
}

/// Evaluates both arms' linear predictors on new covariate rows. The column
/// count must match the fitted subset.
pub fn predict_means(fit: &FittedOutcome, x: &DMatrix<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.ncols() + 1 != fit.beta1.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} columns vs {} fitted slopes",
            x.ncols(),
            fit.beta1.len() - 1
        )));
    }
    let mu1 = (0..x.nrows()).map(|i| predict_row(&fit.beta1, x, i)).collect();
    let mu0 = (0..x.nrows()).map(|i| predict_row(&fit.beta0, x, i)).collect();
    Ok((mu1, mu0))
}
