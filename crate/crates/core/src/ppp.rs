//! Posterior predictive p-values for the strong null of no causal effects,
//! the Fisher randomization test special case, and the normal-approximation
//! comparator.
//!
//! Algorithm A draws `(theta, Z)` jointly from the posterior predictive
//! distribution and compares the replicated statistic with the observed one.
//! Algorithm B computes a fixed-theta FRT p-value for each posterior draw
//! and averages; both estimate the same quantity.
//!
//! All Monte Carlo p-values use add-one smoothing, `(1 + #extreme) /
//! (1 + #defined)`, with ties counting as extreme. Synthetic assignments on
//! which the statistic is undefined (empty arm, separation, singular fit)
//! are excluded from both numerator and denominator and counted.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::bootstrap::bootstrap_se_on;
use crate::data::{Columns, DataSource};
use crate::error::{Error, Result};
use crate::estimators::{sandwich_se, studentize, tau_dr, tau_ipw_hajek, tau_reg, EstimatorKind};
use crate::exec::{derive_seed, indexed_map};
use crate::logistic::{fit_logistic_on, predict_propensity, sample_posterior_on, PosteriorDraws};
use crate::outcome::{fit_outcome_models_on, FittedOutcome};

const ASSIGN_SALT: u64 = 0xa5a5_1357_9bdf_2468;

/// How the standard error inside a studentized statistic is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatSe {
    Sandwich,
    /// Pairs bootstrap with `b` resamples; quadratic cost inside the PPP loop.
    Bootstrap { b: usize, seed: u64 },
}

/// Full description of the test statistic `T(Z, X, Y)`.
#[derive(Debug, Clone)]
pub struct StatisticSpec {
    pub estimator: EstimatorKind,
    pub studentized: bool,
    /// Meaningful only when `studentized`.
    pub se_method: StatSe,
    /// Columns entering the propensity model.
    pub ps_columns: Columns,
    /// Columns entering the outcome regressions.
    pub outcome_columns: Columns,
    /// Fast mode: reuse the observed-assignment outcome fit inside synthetic
    /// draws instead of refitting. Off by default; the default refits every
    /// nuisance model on every synthetic assignment.
    pub freeze_outcome_fit: bool,
}

impl StatisticSpec {
    pub fn new(estimator: EstimatorKind, studentized: bool) -> Self {
        StatisticSpec {
            estimator,
            studentized,
            se_method: StatSe::Sandwich,
            ps_columns: Columns::AllX,
            outcome_columns: Columns::AllX,
            freeze_outcome_fit: false,
        }
    }

    pub fn with_columns(mut self, ps: Columns, outcome: Columns) -> Self {
        self.ps_columns = ps;
        self.outcome_columns = outcome;
        self
    }
}

/// Which procedure produced a p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PValueMethod {
    PppA,
    PppB,
    Frt,
    Normal,
}

impl PValueMethod {
    pub fn label(self) -> &'static str {
        match self {
            PValueMethod::PppA => "ppp_a",
            PValueMethod::PppB => "ppp_b",
            PValueMethod::Frt => "frt",
            PValueMethod::Normal => "normal",
        }
    }
}

/// A computed p-value with its Monte Carlo bookkeeping.
#[derive(Debug, Clone)]
pub struct PValueReport {
    pub p_value: f64,
    pub t_observed: f64,
    pub method: PValueMethod,
    pub estimator: EstimatorKind,
    pub studentized: bool,
    /// Outer draw count (posterior draws for PPP; 0 for the normal method).
    pub r: usize,
    /// Inner assignment draw count (Algorithm B and the FRT).
    pub s: Option<usize>,
    /// Synthetic draws on which the statistic was undefined.
    pub n_degenerate: usize,
    pub seed: u64,
    /// Set when more than 20% of synthetic draws were degenerate.
    pub warning: Option<String>,
}

impl PValueReport {
    pub fn csv_header() -> &'static str {
        "method,estimator,studentized,p_value,t_observed,R,S,n_degenerate,seed"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.method.label(),
            self.estimator.label(),
            self.studentized,
            self.p_value,
            self.t_observed,
            self.r,
            self.s.map(|v| v.to_string()).unwrap_or_default(),
            self.n_degenerate,
            self.seed
        )
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", Self::csv_header())?;
        writeln!(out, "{}", self.csv_row())?;
        Ok(())
    }
}

/// A fully specified randomization design for the FRT special case.
#[derive(Debug, Clone)]
pub enum RandomizationDesign {
    /// Exactly `m` treated units, uniformly at random.
    CompleteRandomization { m: usize },
    /// Independent Bernoulli(p) assignment.
    Bernoulli { p: f64 },
    /// Independent Bernoulli with a known per-unit probability vector.
    KnownPropensities(Vec<f64>),
}

/// Computes `T(z, X, Y)` by re-fitting the analysis models under `z`.
/// Errors signal that the statistic is undefined for this assignment.
pub(crate) fn compute_statistic_on(
    z: &[u8],
    y: &[f64],
    x_ps: &DMatrix<f64>,
    x_out: &DMatrix<f64>,
    spec: &StatisticSpec,
    frozen_outcome: Option<&FittedOutcome>,
) -> Result<f64> {
    if !z.iter().any(|&v| v == 1) || !z.iter().any(|&v| v == 0) {
        return Err(Error::EmptyArm);
    }
    let need_ps = spec.estimator != EstimatorKind::Reg || spec.studentized;
    let need_outcome = spec.estimator != EstimatorKind::Ipw;

    let e_hat = if need_ps {
        Some(fit_logistic_on(z, x_ps)?.e_hat)
    } else {
        None
    };
    let outcome_fit_owned;
    let outcome_fit: Option<&FittedOutcome> = if need_outcome {
        match frozen_outcome {
            Some(f) => Some(f),
            None => {
                outcome_fit_owned = fit_outcome_models_on(z, y, x_out, vec![])?;
                Some(&outcome_fit_owned)
            }
        }
    } else {
        None
    };

    let tau = match spec.estimator {
        EstimatorKind::Ipw => tau_ipw_hajek(z, y, e_hat.as_ref().unwrap())?,
        EstimatorKind::Reg => tau_reg(outcome_fit.unwrap()),
        EstimatorKind::Dr => tau_dr(z, e_hat.as_ref().unwrap(), outcome_fit.unwrap()),
    };
    if !spec.studentized {
        return Ok(tau.abs());
    }
    let se = match spec.se_method {
        StatSe::Sandwich => sandwich_se(
            z,
            y,
            e_hat.as_ref().unwrap(),
            outcome_fit,
            spec.estimator,
        )?,
        StatSe::Bootstrap { b, seed } => {
            bootstrap_se_on(z, y, x_ps, x_out, spec.estimator, b, seed)?.se
        }
    };
    studentize(tau, se)
}

/// The test statistic evaluated under an arbitrary assignment vector.
pub fn compute_statistic(z: &[u8], source: &dyn DataSource, spec: &StatisticSpec) -> Result<f64> {
    let x_ps = source.columns(&spec.ps_columns)?;
    let x_out = source.columns(&spec.outcome_columns)?;
    compute_statistic_on(z, source.outcomes(), &x_ps, &x_out, spec, None)
}

struct Prepared {
    y: Vec<f64>,
    x_ps: DMatrix<f64>,
    x_out: DMatrix<f64>,
    t_obs: f64,
    frozen: Option<FittedOutcome>,
}

fn prepare(source: &dyn DataSource, spec: &StatisticSpec) -> Result<Prepared> {
    let x_ps = source.columns(&spec.ps_columns)?;
    let x_out = source.columns(&spec.outcome_columns)?;
    let y = source.outcomes().to_vec();
    let z = source.treatments();
    let t_obs = compute_statistic_on(z, &y, &x_ps, &x_out, spec, None)
        .map_err(|e| Error::ObservedStatistic(e.to_string()))?;
    let frozen = if spec.freeze_outcome_fit && spec.estimator != EstimatorKind::Ipw {
        Some(fit_outcome_models_on(z, &y, &x_out, vec![])?)
    } else {
        None
    };
    Ok(Prepared {
        y,
        x_ps,
        x_out,
        t_obs,
        frozen,
    })
}

fn smoothed(count: usize, defined: usize) -> f64 {
    (1 + count) as f64 / (1 + defined) as f64
}

fn degenerate_warning(n_degenerate: usize, total: usize) -> Option<String> {
    if 5 * n_degenerate > total {
        Some(format!(
            "{n_degenerate} of {total} synthetic draws were degenerate; p-value may be unreliable"
        ))
    } else {
        None
    }
}

/// Algorithm A: pair each retained posterior draw with one synthetic
/// assignment, compute the replicated statistic, and report the smoothed
/// exceedance proportion. Paper-scale defaults: `r = 2000`, `burn_in = 1000`.
pub fn ppp_algorithm_a(
    source: &dyn DataSource,
    spec: &StatisticSpec,
    r: usize,
    burn_in: usize,
    seed: u64,
) -> Result<PValueReport> {
    let prep = prepare(source, spec)?;
    let z_obs = source.treatments();
    let draws = sample_posterior_on(z_obs, &prep.x_ps, burn_in, r, seed)?;

    let replicated: Vec<Option<f64>> = indexed_map(r, |idx| {
        let theta = DVector::from_iterator(
            draws.draws.ncols(),
            draws.draws.row(idx).iter().copied(),
        );
        let probs = predict_propensity(&theta, &prep.x_ps).ok()?;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed ^ ASSIGN_SALT, idx as u64));
        let z_syn = crate::logistic::draw_assignments(&probs, &mut rng);
        compute_statistic_on(
            &z_syn,
            &prep.y,
            &prep.x_ps,
            &prep.x_out,
            spec,
            prep.frozen.as_ref(),
        )
        .ok()
    });

    let defined: Vec<f64> = replicated.iter().flatten().copied().collect();
    let count = defined.iter().filter(|&&t| t >= prep.t_obs).count();
    let n_degenerate = r - defined.len();
    Ok(PValueReport {
        p_value: smoothed(count, defined.len()),
        t_observed: prep.t_obs,
        method: PValueMethod::PppA,
        estimator: spec.estimator,
        studentized: spec.studentized,
        r,
        s: None,
        n_degenerate,
        seed,
        warning: degenerate_warning(n_degenerate, r),
    })
}

/// Algorithm B: estimate the fixed-theta FRT p-value with `s` inner
/// assignment draws for every retained posterior draw, then average.
pub fn ppp_algorithm_b(
    source: &dyn DataSource,
    spec: &StatisticSpec,
    theta_draws: &PosteriorDraws,
    s: usize,
    seed: u64,
) -> Result<PValueReport> {
    assert!(theta_draws.n_draws() >= 1, "need at least one posterior draw");
    let prep = prepare(source, spec)?;
    let n_theta = theta_draws.n_draws();

    let per_theta: Vec<(f64, usize)> = indexed_map(n_theta, |idx| {
        let theta = DVector::from_iterator(
            theta_draws.draws.ncols(),
            theta_draws.draws.row(idx).iter().copied(),
        );
        let probs = match predict_propensity(&theta, &prep.x_ps) {
            Ok(p) => p,
            Err(_) => return (1.0, s),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed ^ ASSIGN_SALT, idx as u64));
        let mut count = 0usize;
        let mut defined = 0usize;
        for _ in 0..s {
            let z_syn = crate::logistic::draw_assignments(&probs, &mut rng);
            if let Ok(t) = compute_statistic_on(
                &z_syn,
                &prep.y,
                &prep.x_ps,
                &prep.x_out,
                spec,
                prep.frozen.as_ref(),
            ) {
                defined += 1;
                if t >= prep.t_obs {
                    count += 1;
                }
            }
        }
        (smoothed(count, defined), s - defined)
    });

    let p_value = per_theta.iter().map(|(p, _)| p).sum::<f64>() / n_theta as f64;
    let n_degenerate = per_theta.iter().map(|(_, d)| d).sum();
    Ok(PValueReport {
        p_value,
        t_observed: prep.t_obs,
        method: PValueMethod::PppB,
        estimator: spec.estimator,
        studentized: spec.studentized,
        r: n_theta,
        s: Some(s),
        n_degenerate,
        seed,
        warning: degenerate_warning(n_degenerate, n_theta * s),
    })
}

/// Fisher randomization test under a fully known design: `s` Monte Carlo
/// assignment draws, add-one smoothed, ties counting as extreme.
pub fn frt_pvalue(
    source: &dyn DataSource,
    spec: &StatisticSpec,
    design: &RandomizationDesign,
    s: usize,
    seed: u64,
) -> Result<PValueReport> {
    let n = source.n_units();
    match design {
        RandomizationDesign::CompleteRandomization { m } => {
            if *m == 0 || *m >= n {
                return Err(Error::InvalidDesign(format!(
                    "complete randomization needs 0 < m < n, got m={m}, n={n}"
                )));
            }
        }
        RandomizationDesign::Bernoulli { p } => {
            if !(*p > 0.0 && *p < 1.0) {
                return Err(Error::InvalidDesign(format!(
                    "bernoulli probability must lie in (0,1), got {p}"
                )));
            }
        }
        RandomizationDesign::KnownPropensities(v) => {
            if v.len() != n {
                return Err(Error::InvalidDesign(format!(
                    "{} propensities for {n} units",
                    v.len()
                )));
            }
            if v.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
                return Err(Error::InvalidDesign(
                    "known propensities must lie strictly in (0,1)".into(),
                ));
            }
        }
    }
    let prep = prepare(source, spec)?;

    let replicated: Vec<Option<f64>> = indexed_map(s, |idx| {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed ^ ASSIGN_SALT, idx as u64));
        let z_syn = draw_from_design(design, n, &mut rng);
        compute_statistic_on(
            &z_syn,
            &prep.y,
            &prep.x_ps,
            &prep.x_out,
            spec,
            prep.frozen.as_ref(),
        )
        .ok()
    });

    let defined: Vec<f64> = replicated.iter().flatten().copied().collect();
    let count = defined.iter().filter(|&&t| t >= prep.t_obs).count();
    let n_degenerate = s - defined.len();
    Ok(PValueReport {
        p_value: smoothed(count, defined.len()),
        t_observed: prep.t_obs,
        method: PValueMethod::Frt,
        estimator: spec.estimator,
        studentized: spec.studentized,
        r: 0,
        s: Some(s),
        n_degenerate,
        seed,
        warning: degenerate_warning(n_degenerate, s),
    })
}

pub(crate) fn draw_from_design<R: Rng>(
    design: &RandomizationDesign,
    n: usize,
    rng: &mut R,
) -> Vec<u8> {
    match design {
        RandomizationDesign::CompleteRandomization { m } => {
            let chosen = rand::seq::index::sample(rng, n, *m);
            let mut z = vec![0u8; n];
            for i in chosen {
                z[i] = 1;
            }
            z
        }
        RandomizationDesign::Bernoulli { p } => {
            (0..n).map(|_| u8::from(rng.random::<f64>() < *p)).collect()
        }
        RandomizationDesign::KnownPropensities(v) => crate::logistic::draw_assignments(v, rng),
    }
}

/// Two-sided p-value from the standard normal tail at an absolute statistic.
pub fn normal_p_from_t(t_abs: f64) -> f64 {
    let normal = Normal::standard();
    2.0 * (1.0 - normal.cdf(t_abs))
}

/// Normal-approximation comparator based on the studentized statistic.
pub fn normal_pvalue(source: &dyn DataSource, spec: &StatisticSpec) -> Result<PValueReport> {
    if !spec.studentized {
        return Err(Error::InvalidDesign(
            "the normal approximation requires a studentized statistic".into(),
        ));
    }
    let prep = prepare(source, spec)?;
    Ok(PValueReport {
        p_value: normal_p_from_t(prep.t_obs),
        t_observed: prep.t_obs,
        method: PValueMethod::Normal,
        estimator: spec.estimator,
        studentized: true,
        r: 0,
        s: None,
        n_degenerate: 0,
        seed: 0,
        warning: None,
    })
}
