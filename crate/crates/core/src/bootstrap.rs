//! Nonparametric (pairs) bootstrap standard errors: units are resampled with
//! replacement and both nuisance models are re-fit inside every resample.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::data::{Columns, DataSource};
use crate::error::{Error, Result};
use crate::estimators::{tau_dr, tau_ipw_hajek, tau_reg, EstimatorKind};
use crate::exec::{derive_seed, indexed_map};
use crate::logistic::fit_logistic_on;
use crate::outcome::fit_outcome_models_on;

/// Bootstrap distribution summary for one estimator.
#[derive(Debug, Clone)]
pub struct BootstrapResult {
    /// Sample standard deviation of the replicate estimates.
    pub se: f64,
    /// Requested resample count.
    pub b: usize,
    /// Estimates from the resamples that fit successfully.
    pub replicate_estimates: Vec<f64>,
    /// Resamples discarded because of an empty arm, separation, or a
    /// singular fit. Discarded, not redrawn.
    pub n_failed: usize,
}

/// Re-fits the requested nuisance models on the given data and returns the
/// point estimate. Shared by the bootstrap and the p-value engine.
pub(crate) fn refit_tau(
    z: &[u8],
    y: &[f64],
    x_ps: &DMatrix<f64>,
    x_out: &DMatrix<f64>,
    method: EstimatorKind,
) -> Result<f64> {
    match method {
        EstimatorKind::Ipw => {
            let ps = fit_logistic_on(z, x_ps)?;
            tau_ipw_hajek(z, y, &ps.e_hat)
        }
        EstimatorKind::Reg => {
            let fit = fit_outcome_models_on(z, y, x_out, vec![])?;
            Ok(tau_reg(&fit))
        }
        EstimatorKind::Dr => {
            let ps = fit_logistic_on(z, x_ps)?;
            let fit = fit_outcome_models_on(z, y, x_out, vec![])?;
            Ok(tau_dr(z, &ps.e_hat, &fit))
        }
    }
}

/// Bootstrap standard error on pre-resolved covariate matrices.
///
/// Per-resample seeds derive from a counter, so results are identical under
/// sequential and concurrent execution. The paper-scale default is `b = 2000`.
pub fn bootstrap_se_on(
    z: &[u8],
    y: &[f64],
    x_ps: &DMatrix<f64>,
    x_out: &DMatrix<f64>,
    method: EstimatorKind,
    b: usize,
    seed: u64,
) -> Result<BootstrapResult> {
    assert!(b >= 2, "need at least two resamples");
    let n = z.len();
    let replicates: Vec<Option<f64>> = indexed_map(b, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, r as u64));
        let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
        let zb: Vec<u8> = idx.iter().map(|&i| z[i]).collect();
        if !zb.iter().any(|&v| v == 1) || !zb.iter().any(|&v| v == 0) {
            return None;
        }
        let yb: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
        let xpb = DMatrix::from_fn(n, x_ps.ncols(), |i, j| x_ps[(idx[i], j)]);
        let xob = DMatrix::from_fn(n, x_out.ncols(), |i, j| x_out[(idx[i], j)]);
        refit_tau(&zb, &yb, &xpb, &xob, method).ok()
    });

    let replicate_estimates: Vec<f64> = replicates.iter().flatten().copied().collect();
    let n_failed = b - replicate_estimates.len();
    if n_failed > b / 2 {
        return Err(Error::UnstableBootstrap { n_failed, total: b });
    }
    let m = replicate_estimates.len() as f64;
    let mean = replicate_estimates.iter().sum::<f64>() / m;
    let var = replicate_estimates
        .iter()
        .map(|v| (v - mean).powi(2))
        .sum::<f64>()
        / (m - 1.0);
    Ok(BootstrapResult {
        se: var.sqrt(),
        b,
        replicate_estimates,
        n_failed,
    })
}

/// Bootstrap standard error with the analysis-model columns resolved from a
/// data source.
pub fn bootstrap_se(
    source: &dyn DataSource,
    method: EstimatorKind,
    ps_columns: &Columns,
    outcome_columns: &Columns,
    b: usize,
    seed: u64,
) -> Result<BootstrapResult> {
    let x_ps = source.columns(ps_columns)?;
    let x_out = source.columns(outcome_columns)?;
    bootstrap_se_on(
        source.treatments(),
        source.outcomes(),
        &x_ps,
        &x_out,
        method,
        b,
        seed,
    )
}
