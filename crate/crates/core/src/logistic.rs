//! Logistic propensity-score model: maximum-likelihood fit via iteratively
//! reweighted least squares, flat-prior log-posterior, random-walk Metropolis
//! posterior sampling, and posterior-predictive treatment draws.
//!
//! The analysis model always includes an intercept; `theta[0]` is the
//! intercept and `theta[1..]` are the covariate coefficients.

use std::io::Write;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::ObservedSample;
use crate::error::{Error, Result};

/// Fitted probabilities are clipped to this distance from {0,1} so inverse
/// weights stay finite under extreme propensities.
pub const PROB_CLIP: f64 = 1e-12;

const MAX_IRLS_ITER: usize = 100;
const SEPARATION_ETA: f64 = 30.0;

/// Maximum-likelihood logistic fit.
#[derive(Debug, Clone)]
pub struct FittedPropensity {
    /// Coefficients, intercept first.
    pub theta: DVector<f64>,
    /// Fitted probability for every unit, clipped strictly inside (0,1).
    pub e_hat: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Retained draws from the posterior sampler.
#[derive(Debug, Clone)]
pub struct PosteriorDraws {
    /// One row per retained draw, one column per coefficient (intercept first).
    pub draws: DMatrix<f64>,
    pub burn_in: usize,
    /// Acceptance fraction over the retained (post burn-in) portion.
    pub acceptance_rate: f64,
    pub seed: u64,
}

impl PosteriorDraws {
    pub fn n_draws(&self) -> usize {
        self.draws.nrows()
    }

    /// One row per draw, header = coefficient names (for diagnostics).
    pub fn write_csv<W: Write>(&self, covariate_labels: &[String], mut out: W) -> Result<()> {
        write!(out, "intercept")?;
        for label in covariate_labels {
            write!(out, ",{label}")?;
        }
        writeln!(out)?;
        for r in 0..self.draws.nrows() {
            for j in 0..self.draws.ncols() {
                if j > 0 {
                    write!(out, ",")?;
                }
                write!(out, "{}", self.draws[(r, j)])?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn logistic(u: f64) -> f64 {
    1.0 / (1.0 + (-u).exp())
}

#[inline]
fn softplus(u: f64) -> f64 {
    // log(1 + e^u), stable for large |u|
    u.max(0.0) + (-u.abs()).exp().ln_1p()
}

#[inline]
pub(crate) fn clip_prob(p: f64) -> f64 {
    p.clamp(PROB_CLIP, 1.0 - PROB_CLIP)
}

/// Linear predictor `theta[0] + x_i . theta[1..]` for every row.
fn linear_predictor(theta: &DVector<f64>, x: &DMatrix<f64>) -> Result<Vec<f64>> {
    if theta.len() != x.ncols() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "theta has {} entries but the design needs {}",
            theta.len(),
            x.ncols() + 1
        )));
    }
    let mut eta = vec![theta[0]; x.nrows()];
    for (i, e) in eta.iter_mut().enumerate() {
        for j in 0..x.ncols() {
            *e += x[(i, j)] * theta[j + 1];
        }
    }
    Ok(eta)
}

/// Element-wise `logistic(intercept + x_i . theta)`, clipped to
/// `[PROB_CLIP, 1 - PROB_CLIP]`.
pub fn predict_propensity(theta: &DVector<f64>, x: &DMatrix<f64>) -> Result<Vec<f64>> {
    Ok(linear_predictor(theta, x)?
        .into_iter()
        .map(|eta| clip_prob(logistic(eta)))
        .collect())
}

/// Bernoulli log-likelihood of the logistic model; with the improper uniform
/// prior this is the log-posterior up to a constant.
pub fn log_posterior_on(theta: &DVector<f64>, z: &[u8], x: &DMatrix<f64>) -> Result<f64> {
    let eta = linear_predictor(theta, x)?;
    let mut ll = 0.0;
    for (i, &e) in eta.iter().enumerate() {
        ll += f64::from(z[i]) * e - softplus(e);
    }
    Ok(ll)
}

/// Log-posterior against an [`ObservedSample`]'s full covariate matrix.
pub fn log_posterior(theta: &DVector<f64>, sample: &ObservedSample) -> Result<f64> {
    log_posterior_on(theta, &sample.z, &sample.x)
}

/// Negative log-posterior Hessian `D' diag(e(1-e)) D` at `theta`, with `D`
/// the intercept-augmented design.
fn curvature(theta: &DVector<f64>, z_len: usize, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    debug_assert_eq!(z_len, x.nrows());
    let p = x.ncols() + 1;
    let eta = linear_predictor(theta, x)?;
    let mut h = DMatrix::zeros(p, p);
    let mut row = vec![0.0; p];
    for (i, &e) in eta.iter().enumerate() {
        let pr = logistic(e);
        let w = (pr * (1.0 - pr)).max(1e-10);
        row[0] = 1.0;
        for j in 0..x.ncols() {
            row[j + 1] = x[(i, j)];
        }
        for a in 0..p {
            let wa = w * row[a];
            for b in a..p {
                h[(a, b)] += wa * row[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            h[(a, b)] = h[(b, a)];
        }
    }
    Ok(h)
}

/// IRLS fit of the logistic model on the given covariate matrix (intercept
/// added internally). Converges when the score norm drops below `1e-8 * n`.
pub fn fit_logistic_on(z: &[u8], x: &DMatrix<f64>) -> Result<FittedPropensity> {
    let n = z.len();
    if x.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} treatment entries vs {} covariate rows",
            n,
            x.nrows()
        )));
    }
    if !z.iter().any(|&v| v == 1) || !z.iter().any(|&v| v == 0) {
        return Err(Error::EmptyArm);
    }
    let p = x.ncols() + 1;
    let tol = 1e-8 * n as f64;
    let mut theta = DVector::zeros(p);
    let mut ll = log_posterior_on(&theta, z, x)?;
    let mut prev_grad_norm = f64::INFINITY;

    for iter in 1..=MAX_IRLS_ITER {
        let eta = linear_predictor(&theta, x)?;
        let mut grad = DVector::zeros(p);
        for (i, &e) in eta.iter().enumerate() {
            let resid = f64::from(z[i]) - logistic(e);
            grad[0] += resid;
            for j in 0..x.ncols() {
                grad[j + 1] += resid * x[(i, j)];
            }
        }
        let grad_norm = grad.norm();
        let max_abs_eta = eta.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
        let classified = || {
            eta.iter()
                .zip(z)
                .all(|(&e, &zi)| if zi == 1 { e >= 0.0 } else { e <= 0.0 })
        };
        if grad_norm <= tol {
            // A vanishing gradient with a diverged linear predictor and perfect
            // classification is a separated fit, not an interior optimum.
            if max_abs_eta > SEPARATION_ETA && classified() {
                let dir = (&theta / theta.norm().max(1e-300)).iter().copied().collect();
                return Err(Error::Separation { direction: dir });
            }
            return Ok(finish(theta, &eta, true, iter));
        }

        if max_abs_eta > SEPARATION_ETA && iter > 3 && classified() && grad_norm >= 0.5 * prev_grad_norm
        {
            let dir = (&theta / theta.norm().max(1e-300)).iter().copied().collect();
            return Err(Error::Separation { direction: dir });
        }
        prev_grad_norm = grad_norm;

        let h = curvature(&theta, n, x)?;
        let chol = Cholesky::new(h).ok_or_else(|| {
            Error::SingularDesign("propensity design (intercept + covariates)".into())
        })?;
        let step = chol.solve(&grad);

        // Step halving keeps IRLS monotone in the log-likelihood.
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cand = &theta + &step * scale;
            let cand_ll = log_posterior_on(&cand, z, x)?;
            if cand_ll >= ll - 1e-12 {
                theta = cand;
                ll = cand_ll;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            let eta = linear_predictor(&theta, x)?;
            return Ok(finish(theta, &eta, false, iter));
        }
    }

    let eta = linear_predictor(&theta, x)?;
    let max_abs_eta = eta.iter().fold(0.0f64, |m, &e| m.max(e.abs()));
    if max_abs_eta > SEPARATION_ETA {
        let dir = (&theta / theta.norm().max(1e-300)).iter().copied().collect();
        return Err(Error::Separation { direction: dir });
    }
    Ok(finish(theta, &eta, false, MAX_IRLS_ITER))
}

fn finish(theta: DVector<f64>, eta: &[f64], converged: bool, iterations: usize) -> FittedPropensity {
    let e_hat = eta.iter().map(|&e| clip_prob(logistic(e))).collect();
    FittedPropensity {
        theta,
        e_hat,
        converged,
        iterations,
    }
}

/// Fit against an [`ObservedSample`]'s full covariate matrix.
pub fn fit_logistic(sample: &ObservedSample) -> Result<FittedPropensity> {
    fit_logistic_on(&sample.z, &sample.x)
}

/// Independent Bernoulli treatment draws at the given probabilities.
pub fn draw_assignments<R: Rng + ?Sized>(probabilities: &[f64], rng: &mut R) -> Vec<u8> {
    probabilities
        .iter()
        .map(|&p| u8::from(rng.random::<f64>() < p))
        .collect()
}

/// Random-walk Metropolis chain targeting the flat-prior posterior of the
/// logistic coefficients.
///
/// The proposal is multivariate normal with covariance `c * H^{-1}`, where
/// `H` is the negative log-posterior Hessian at the MLE and `c` starts at
/// `2.38^2 / (d+1)`. The scale adapts during burn-in toward an acceptance
/// rate in [0.15, 0.5] and is frozen afterwards. Deterministic per seed.
pub fn sample_posterior_on(
    z: &[u8],
    x: &DMatrix<f64>,
    burn_in: usize,
    n_draws: usize,
    seed: u64,
) -> Result<PosteriorDraws> {
    assert!(n_draws >= 1, "need at least one retained draw");
    let fit = fit_logistic_on(z, x)?;
    let p = fit.theta.len();
    let h = curvature(&fit.theta, z.len(), x)?;
    let h_inv = Cholesky::new(h)
        .ok_or_else(|| Error::SingularDesign("curvature at the MLE".into()))?
        .inverse();
    let prop_chol = Cholesky::new(h_inv)
        .ok_or_else(|| Error::SingularDesign("proposal covariance".into()))?
        .l();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut theta = fit.theta.clone();
    let mut lp = log_posterior_on(&theta, z, x)?;
    if !lp.is_finite() {
        return Err(Error::SamplerInit);
    }

    let mut scale = (2.38f64.powi(2) / p as f64).sqrt();
    let mut draws = DMatrix::zeros(n_draws, p);
    let mut window_accepts = 0usize;
    let mut retained_accepts = 0usize;
    const WINDOW: usize = 50;

    for iter in 0..burn_in + n_draws {
        let mut step = DVector::zeros(p);
        for j in 0..p {
            step[j] = StandardNormal.sample(&mut rng);
        }
        let proposal = &theta + &prop_chol * step * scale;
        let lp_prop = log_posterior_on(&proposal, z, x)?;
        let accept = lp_prop - lp > rng.random::<f64>().max(f64::MIN_POSITIVE).ln();
        if accept {
            theta = proposal;
            lp = lp_prop;
            window_accepts += 1;
            if iter >= burn_in {
                retained_accepts += 1;
            }
        }

        if iter < burn_in && (iter + 1) % WINDOW == 0 {
            let rate = window_accepts as f64 / WINDOW as f64;
            if rate < 0.15 {
                scale *= 0.5;
            } else if rate > 0.5 {
                scale *= 1.5;
            }
            scale = scale.clamp(1e-4, 1e4);
            window_accepts = 0;
        } else if (iter + 1) % WINDOW == 0 {
            window_accepts = 0;
        }

        if iter >= burn_in {
            draws.row_mut(iter - burn_in).copy_from(&theta.transpose());
        }
    }

    Ok(PosteriorDraws {
        draws,
        burn_in,
        acceptance_rate: retained_accepts as f64 / n_draws as f64,
        seed,
    })
}

/// Posterior sampling against an [`ObservedSample`]'s full covariate matrix.
/// The paper-scale defaults are `burn_in = 1000`, `n_draws = 2000`.
pub fn sample_posterior(
    sample: &ObservedSample,
    burn_in: usize,
    n_draws: usize,
    seed: u64,
) -> Result<PosteriorDraws> {
    sample_posterior_on(&sample.z, &sample.x, burn_in, n_draws, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn balanced_sample(n: usize) -> (Vec<u8>, DMatrix<f64>) {
        let z: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
        (z, DMatrix::zeros(n, 0))
    }

    #[test]
    fn intercept_only_balanced_gives_half() {
        let (z, x) = balanced_sample(10);
        let fit = fit_logistic_on(&z, &x).unwrap();
        assert!(fit.converged);
        assert!(fit.theta[0].abs() < 1e-9);
        for &e in &fit.e_hat {
            assert!((e - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn mle_matches_grid_search_oracle() {
        // n=50, d=1: dense grid over (intercept, slope), then local refinement.
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 50;
        let x = DMatrix::from_fn(n, 1, |_, _| rng.random::<f64>() * 4.0 - 2.0);
        let z: Vec<u8> = (0..n)
            .map(|i| u8::from(rng.random::<f64>() < logistic(0.4 + 0.8 * x[(i, 0)])))
            .collect();

        let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
        let mut lo = (-3.0, -3.0);
        let mut hi = (3.0, 3.0);
        for _ in 0..6 {
            for a in 0..61 {
                for b in 0..61 {
                    let t0 = lo.0 + (hi.0 - lo.0) * a as f64 / 60.0;
                    let t1 = lo.1 + (hi.1 - lo.1) * b as f64 / 60.0;
                    let ll = log_posterior_on(&DVector::from_vec(vec![t0, t1]), &z, &x).unwrap();
                    if ll > best.0 {
                        best = (ll, t0, t1);
                    }
                }
            }
            let span0 = (hi.0 - lo.0) / 10.0;
            let span1 = (hi.1 - lo.1) / 10.0;
            lo = (best.1 - span0, best.2 - span1);
            hi = (best.1 + span0, best.2 + span1);
        }

        let fit = fit_logistic_on(&z, &x).unwrap();
        assert!(fit.converged);
        assert!((fit.theta[0] - best.1).abs() < 1e-4);
        assert!((fit.theta[1] - best.2).abs() < 1e-4);
    }

    #[test]
    fn score_equations_hold_at_mle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 400;
        let x = DMatrix::from_fn(n, 2, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let z: Vec<u8> = (0..n)
            .map(|i| {
                u8::from(rng.random::<f64>() < logistic(0.2 + x[(i, 0)] - 0.5 * x[(i, 1)]))
            })
            .collect();
        let fit = fit_logistic_on(&z, &x).unwrap();
        let tol = 1e-6 * n as f64;
        let mut score = vec![0.0; 3];
        for i in 0..n {
            let r = f64::from(z[i]) - fit.e_hat[i];
            score[0] += r;
            score[1] += r * x[(i, 0)];
            score[2] += r * x[(i, 1)];
        }
        for s in score {
            assert!(s.abs() <= tol, "score component {s} exceeds {tol}");
        }
    }

    #[test]
    fn log_posterior_at_zero_is_n_log_half() {
        let (z, x) = balanced_sample(20);
        let v = log_posterior_on(&DVector::zeros(1), &z, &x).unwrap();
        assert!((v - 20.0 * 0.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn log_posterior_matches_term_by_term_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 37;
        let x = DMatrix::from_fn(n, 2, |_, _| rng.random::<f64>() * 6.0 - 3.0);
        let z: Vec<u8> = (0..n).map(|_| u8::from(rng.random::<f64>() < 0.5)).collect();
        let theta = DVector::from_vec(vec![0.3, -1.1, 0.7]);
        let fast = log_posterior_on(&theta, &z, &x).unwrap();
        let mut naive = 0.0;
        for i in 0..n {
            let eta = theta[0] + theta[1] * x[(i, 0)] + theta[2] * x[(i, 1)];
            let p = 1.0 / (1.0 + (-eta).exp());
            naive += if z[i] == 1 { p.ln() } else { (1.0 - p).ln() };
        }
        assert!((fast - naive).abs() <= 1e-12 * naive.abs());
    }

    #[test]
    fn mle_beats_random_thetas() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 80;
        let x = DMatrix::from_fn(n, 1, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let z: Vec<u8> = (0..n)
            .map(|i| u8::from(rng.random::<f64>() < logistic(0.5 * x[(i, 0)])))
            .collect();
        let fit = fit_logistic_on(&z, &x).unwrap();
        let ll_mle = log_posterior_on(&fit.theta, &z, &x).unwrap();
        for _ in 0..1000 {
            let t = DVector::from_fn(2, |_, _| rng.random::<f64>() * 8.0 - 4.0);
            assert!(log_posterior_on(&t, &z, &x).unwrap() <= ll_mle + 1e-10);
        }
    }

    #[test]
    fn duplication_doubles_log_posterior() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let n = 30;
        let x = DMatrix::from_fn(n, 1, |_, _| rng.random::<f64>());
        let z: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
        let theta = DVector::from_vec(vec![0.2, -0.4]);
        let single = log_posterior_on(&theta, &z, &x).unwrap();
        let z2: Vec<u8> = z.iter().chain(&z).copied().collect();
        let mut xs: Vec<f64> = x.iter().copied().collect();
        xs.extend(x.iter().copied());
        let x2 = DMatrix::from_column_slice(2 * n, 1, &xs);
        let double = log_posterior_on(&theta, &z2, &x2).unwrap();
        assert!((double - 2.0 * single).abs() < 1e-10);
    }

    #[test]
    fn predict_zero_theta_gives_half() {
        let x = DMatrix::from_row_slice(3, 2, &[1., 2., 3., 4., 5., 6.]);
        let p = predict_propensity(&DVector::zeros(3), &x).unwrap();
        assert!(p.iter().all(|&v| (v - 0.5).abs() < 1e-15));
    }

    #[test]
    fn predict_clips_extreme_linear_predictor() {
        let x = DMatrix::from_row_slice(1, 1, &[1.0]);
        let p = predict_propensity(&DVector::from_vec(vec![0.0, 50.0]), &x).unwrap();
        assert_eq!(p[0], 1.0 - PROB_CLIP);
    }

    #[test]
    fn predict_matches_scalar_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let x = DMatrix::from_fn(1000, 3, |_, _| rng.random::<f64>() * 4.0 - 2.0);
        let theta = DVector::from_vec(vec![0.1, -0.6, 0.4, 1.2]);
        let p = predict_propensity(&theta, &x).unwrap();
        for i in 0..1000 {
            let eta =
                theta[0] + theta[1] * x[(i, 0)] + theta[2] * x[(i, 1)] + theta[3] * x[(i, 2)];
            let expect = (1.0 / (1.0 + (-eta).exp())).clamp(PROB_CLIP, 1.0 - PROB_CLIP);
            assert!((p[i] - expect).abs() <= 1e-14);
        }
    }

    #[test]
    fn predict_monotone_in_each_coordinate() {
        let theta = DVector::from_vec(vec![0.0, 1.5, -0.7]);
        let base = DMatrix::from_row_slice(1, 2, &[0.3, 0.3]);
        let p0 = predict_propensity(&theta, &base).unwrap()[0];
        let up0 = predict_propensity(&theta, &DMatrix::from_row_slice(1, 2, &[0.8, 0.3])).unwrap()[0];
        let up1 = predict_propensity(&theta, &DMatrix::from_row_slice(1, 2, &[0.3, 0.8])).unwrap()[0];
        assert!(up0 > p0); // positive coefficient
        assert!(up1 < p0); // negative coefficient
    }

    #[test]
    fn draws_respect_extreme_probability() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let probs = vec![1.0 - 1e-12; 100];
        let z = draw_assignments(&probs, &mut rng);
        let ones: usize = z.iter().map(|&v| v as usize).sum();
        assert!(ones >= 99);
    }

    #[test]
    fn draws_deterministic_per_seed() {
        let probs: Vec<f64> = (0..64).map(|i| (i as f64 + 0.5) / 64.0).collect();
        let a = draw_assignments(&probs, &mut ChaCha8Rng::seed_from_u64(99));
        let b = draw_assignments(&probs, &mut ChaCha8Rng::seed_from_u64(99));
        assert_eq!(a, b);
    }

    #[test]
    fn draw_frequency_matches_probability() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let probs = vec![0.3; 100_000];
        let z = draw_assignments(&probs, &mut rng);
        let mean = z.iter().map(|&v| f64::from(v)).sum::<f64>() / 1e5;
        assert!((mean - 0.3).abs() < 0.005);
    }

    #[test]
    fn separation_is_detected() {
        // x < 0 => control, x > 0 => treated: perfectly separated.
        let x = DMatrix::from_column_slice(8, 1, &[-4., -3., -2., -1., 1., 2., 3., 4.]);
        let z = vec![0, 0, 0, 0, 1, 1, 1, 1];
        match fit_logistic_on(&z, &x) {
            Err(Error::Separation { direction }) => {
                assert!(direction[1] > 0.0, "slope direction should be positive");
            }
            other => panic!("expected separation, got {other:?}"),
        }
    }

    #[test]
    fn rank_deficient_design_errors() {
        // duplicated column
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let col: Vec<f64> = (0..40).map(|_| rng.random::<f64>()).collect();
        let x = DMatrix::from_fn(40, 2, |i, _| col[i]);
        let z: Vec<u8> = (0..40).map(|i| (i % 2) as u8).collect();
        assert!(matches!(
            fit_logistic_on(&z, &x),
            Err(Error::SingularDesign(_))
        ));
    }

    #[test]
    fn sampler_is_deterministic_per_seed() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 60;
        let x = DMatrix::from_fn(n, 1, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let z: Vec<u8> = (0..n).map(|i| (i % 2) as u8).collect();
        let a = sample_posterior_on(&z, &x, 200, 300, 12).unwrap();
        let b = sample_posterior_on(&z, &x, 200, 300, 12).unwrap();
        assert_eq!(a.draws, b.draws);
        assert_eq!(a.acceptance_rate, b.acceptance_rate);
        let c = sample_posterior_on(&z, &x, 200, 300, 13).unwrap();
        assert_ne!(a.draws, c.draws);
    }

    #[test]
    fn sampler_best_draw_near_mle() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let n = 200;
        let x = DMatrix::from_fn(n, 2, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let z: Vec<u8> = (0..n)
            .map(|i| u8::from(rng.random::<f64>() < logistic(0.3 + x[(i, 0)])))
            .collect();
        let fit = fit_logistic_on(&z, &x).unwrap();
        let draws = sample_posterior_on(&z, &x, 500, 2000, 21).unwrap();
        let mut best = (f64::NEG_INFINITY, 0usize);
        for r in 0..draws.n_draws() {
            let theta = DVector::from_iterator(3, draws.draws.row(r).iter().copied());
            let lp = log_posterior_on(&theta, &z, &x).unwrap();
            if lp > best.0 {
                best = (lp, r);
            }
        }
        for j in 0..3 {
            assert!((draws.draws[(best.1, j)] - fit.theta[j]).abs() < 0.1);
        }
        assert!(draws.acceptance_rate > 0.05 && draws.acceptance_rate < 0.95);
    }

    #[test]
    fn posterior_csv_export_shape() {
        let (z, x) = balanced_sample(30);
        let draws = sample_posterior_on(&z, &x, 100, 50, 1).unwrap();
        let mut buf = Vec::new();
        draws.write_csv(&[], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 51);
        assert_eq!(text.lines().next().unwrap(), "intercept");
    }
}
