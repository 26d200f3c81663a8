//! Simulation harness: the two data-generating processes, the four
//! model-specification scenarios, replication studies, and p-value
//! distribution summaries.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, Exp, Normal};

use crate::data::{select_columns, Columns, DataSource, ObservedSample};
use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::exec::{derive_seed, indexed_map};
use crate::logistic::logistic;
use crate::ppp::{normal_pvalue, ppp_algorithm_a, StatisticSpec};

/// Propensity coefficients of the regular DGP (no intercept).
pub const REGULAR_THETA: [f64; 4] = [-1.0, 0.5, -0.25, -0.1];
/// Outcome slopes attached to the control arm, as printed in the source DGP.
pub const REGULAR_BETA1: [f64; 4] = [0.1, -0.2, -0.2, -0.2];
/// Outcome slopes attached to the treated arm, as printed in the source DGP.
pub const REGULAR_BETA0: [f64; 4] = [-0.1, 0.3, 0.1, -0.2];
/// E(X) for the regular DGP, fixed once by the Monte Carlo oracle in
/// `examples/mean_x_oracle.rs` (the first three coordinates also follow
/// analytically: 0.5, 1 + 0.15, 1 + 0.2(0.65 - 1.15)).
pub const REGULAR_MEAN_X: [f64; 4] = [0.5, 1.15, 0.9, 4.241666666666666];

/// Propensity slope coefficients of the extreme DGP (the generating model
/// also has intercept -1).
pub const EXTREME_THETA: [f64; 2] = [1.0, -1.0];
pub const EXTREME_BETA1: [f64; 2] = [-0.2, 0.1];
pub const EXTREME_BETA0: [f64; 2] = [0.2, -0.1];

/// Which data-generating process.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgpKind {
    Regular,
    Extreme,
}

impl std::str::FromStr for DgpKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "regular" => Ok(DgpKind::Regular),
            "extreme" => Ok(DgpKind::Extreme),
            other => Err(format!("unknown DGP `{other}` (expected regular|extreme)")),
        }
    }
}

/// Configuration of one simulated dataset.
#[derive(Debug, Clone)]
pub struct DgpConfig {
    pub kind: DgpKind,
    pub n: usize,
    /// Mean shift of the treated potential outcome (0 under the null,
    /// 0.1 for the power study).
    pub tau_shift: f64,
    /// Replace each Z by 1-Z after generation, keeping the potential
    /// outcomes attached to their arms.
    pub flip_treatment: bool,
    /// Sensitivity toggle: exchange the per-arm slope vectors, which the
    /// source DGP assigns crosswise (beta_1 to the control arm).
    pub swap_betas: bool,
    pub seed: u64,
}

impl DgpConfig {
    pub fn new(kind: DgpKind, n: usize, seed: u64) -> Self {
        DgpConfig {
            kind,
            n,
            tau_shift: 0.0,
            flip_treatment: false,
            swap_betas: false,
            seed,
        }
    }
}

/// A simulated dataset: the observable part plus the latent generator
/// variables and both potential outcomes.
#[derive(Debug, Clone)]
pub struct SimSample {
    pub observed: ObservedSample,
    /// Latent generator variables, retained because the misspecified model
    /// scenarios regress on them.
    pub w: DMatrix<f64>,
    pub y1: Vec<f64>,
    pub y0: Vec<f64>,
    pub true_tau: f64,
    pub kind: DgpKind,
}

impl DataSource for SimSample {
    fn treatments(&self) -> &[u8] {
        &self.observed.z
    }

    fn outcomes(&self) -> &[f64] {
        &self.observed.y
    }

    fn columns(&self, selection: &Columns) -> Result<DMatrix<f64>> {
        match selection {
            Columns::W(idx) => select_columns(&self.w, idx),
            other => self.observed.columns(other),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Flips the assignment in place: each Z becomes 1-Z and the observed
/// outcome is re-read from the unchanged potential outcomes. The arm with
/// the small noise variance switches from the minority to the majority
/// side, which is what turns the conservative unstudentized PPP
/// anti-conservative; a pure relabeling would leave the test invariant.
fn flip(sample: &mut SimSample) {
    for i in 0..sample.observed.z.len() {
        let z = 1 - sample.observed.z[i];
        sample.observed.z[i] = z;
        sample.observed.y[i] = if z == 1 { sample.y1[i] } else { sample.y0[i] };
    }
}

/// Regular-propensity DGP: four dependent covariates built from Bernoulli,
/// uniform, exponential, and chi-square generators; overlap holds with room
/// to spare.
pub fn gen_regular(config: &DgpConfig) -> SimSample {
    assert_eq!(config.kind, DgpKind::Regular);
    assert!(config.n >= 50, "simulated samples need n >= 50");
    let n = config.n;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let exp1 = Exp::new(1.0).unwrap();
    let chi4 = ChiSquared::new(4.0).unwrap();
    let noise0 = Normal::new(0.0, 5.0).unwrap();
    let noise1 = Normal::new(0.0, 1.0).unwrap();
    let (beta_y0, beta_y1) = if config.swap_betas {
        (&REGULAR_BETA0, &REGULAR_BETA1)
    } else {
        (&REGULAR_BETA1, &REGULAR_BETA0)
    };

    let mut w = DMatrix::zeros(n, 4);
    let mut x = DMatrix::zeros(n, 4);
    let mut z = Vec::with_capacity(n);
    let mut y1 = Vec::with_capacity(n);
    let mut y0 = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let w1 = f64::from(rng.random::<f64>() < 0.5);
        let w2 = rng.random::<f64>() * 2.0;
        let w3 = exp1.sample(&mut rng);
        let w4 = chi4.sample(&mut rng);
        let x1 = w1;
        let x2 = w2 + 0.3 * x1;
        let x3 = w3 + 0.2 * (x1 * x2 - x2);
        let x4 = w4 + 0.1 * (x1 + x3 + x2 * x3);
        for (j, v) in [w1, w2, w3, w4].into_iter().enumerate() {
            w[(i, j)] = v;
        }
        let xi = [x1, x2, x3, x4];
        for (j, v) in xi.into_iter().enumerate() {
            x[(i, j)] = v;
        }
        let e = logistic(dot(&xi, &REGULAR_THETA));
        let zi = u8::from(rng.random::<f64>() < e);
        let centered: Vec<f64> = xi
            .iter()
            .zip(&REGULAR_MEAN_X)
            .map(|(v, m)| v - m)
            .collect();
        let y0i = 1.0 + dot(&centered, beta_y0) + noise0.sample(&mut rng);
        let y1i = 1.0 + config.tau_shift + dot(&centered, beta_y1) + noise1.sample(&mut rng);
        z.push(zi);
        y0.push(y0i);
        y1.push(y1i);
        y.push(if zi == 1 { y1i } else { y0i });
    }

    let mut sample = SimSample {
        observed: ObservedSample {
            z,
            y,
            x,
            labels: (1..=4).map(|j| format!("x{j}")).collect(),
        },
        w,
        y1,
        y0,
        true_tau: config.tau_shift,
        kind: DgpKind::Regular,
    };
    if config.flip_treatment {
        flip(&mut sample);
    }
    sample
}

/// Extreme-propensity DGP: log-normal covariates pushed through a logistic
/// model with intercept -1, producing assignment probabilities near 0 and 1.
pub fn gen_extreme(config: &DgpConfig) -> SimSample {
    assert_eq!(config.kind, DgpKind::Extreme);
    assert!(config.n >= 50, "simulated samples need n >= 50");
    let n = config.n;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let std_normal = Normal::new(0.0, 1.0).unwrap();
    let noise0 = Normal::new(0.0, 5.0).unwrap();
    let noise1 = Normal::new(0.0, 1.0).unwrap();
    let mean_x = std::f64::consts::E.sqrt(); // E[exp(N(0,1))]
    let mu_base = -1.0 + 0.1 * std::f64::consts::E.sqrt();
    let (beta_y0, beta_y1) = if config.swap_betas {
        (&EXTREME_BETA0, &EXTREME_BETA1)
    } else {
        (&EXTREME_BETA1, &EXTREME_BETA0)
    };

    let mut w = DMatrix::zeros(n, 2);
    let mut x = DMatrix::zeros(n, 2);
    let mut z = Vec::with_capacity(n);
    let mut y1 = Vec::with_capacity(n);
    let mut y0 = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for i in 0..n {
        let w1: f64 = std_normal.sample(&mut rng);
        let w2: f64 = std_normal.sample(&mut rng);
        let x1 = w1.exp();
        let x2 = w2.exp();
        w[(i, 0)] = w1;
        w[(i, 1)] = w2;
        x[(i, 0)] = x1;
        x[(i, 1)] = x2;
        let e = logistic(-1.0 + x1 * EXTREME_THETA[0] + x2 * EXTREME_THETA[1]);
        let zi = u8::from(rng.random::<f64>() < e);
        let centered = [x1 - mean_x, x2 - mean_x];
        let y0i = mu_base + dot(&centered, beta_y0) + noise0.sample(&mut rng);
        let y1i =
            mu_base + config.tau_shift + dot(&centered, beta_y1) + noise1.sample(&mut rng);
        z.push(zi);
        y0.push(y0i);
        y1.push(y1i);
        y.push(if zi == 1 { y1i } else { y0i });
    }

    let mut sample = SimSample {
        observed: ObservedSample {
            z,
            y,
            x,
            labels: vec!["x1".into(), "x2".into()],
        },
        w,
        y1,
        y0,
        true_tau: config.tau_shift,
        kind: DgpKind::Extreme,
    };
    if config.flip_treatment {
        flip(&mut sample);
    }
    sample
}

/// Generates a sample for either DGP kind.
pub fn generate(config: &DgpConfig) -> SimSample {
    match config.kind {
        DgpKind::Regular => gen_regular(config),
        DgpKind::Extreme => gen_extreme(config),
    }
}

/// Model-specification scenario: which of the two analysis models is
/// deliberately misspecified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioId {
    /// Both models correct.
    I,
    /// Propensity model correct, outcome model misspecified.
    Ii,
    /// Outcome model correct, propensity model misspecified.
    Iii,
    /// Both misspecified.
    Iv,
}

impl std::str::FromStr for ScenarioId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "i" | "1" => Ok(ScenarioId::I),
            "ii" | "2" => Ok(ScenarioId::Ii),
            "iii" | "3" => Ok(ScenarioId::Iii),
            "iv" | "4" => Ok(ScenarioId::Iv),
            other => Err(format!("unknown scenario `{other}` (expected i|ii|iii|iv)")),
        }
    }
}

impl ScenarioId {
    pub fn label(self) -> &'static str {
        match self {
            ScenarioId::I => "i",
            ScenarioId::Ii => "ii",
            ScenarioId::Iii => "iii",
            ScenarioId::Iv => "iv",
        }
    }
}

/// Column selections `(propensity model, outcome model)` for a scenario.
/// The misspecified model regresses on raw generator variables: W2 and W3
/// for the regular DGP, W1 and W2 for the extreme DGP.
pub fn apply_scenario(kind: DgpKind, scenario: ScenarioId) -> (Columns, Columns) {
    let wrong = match kind {
        DgpKind::Regular => Columns::W(vec![1, 2]),
        DgpKind::Extreme => Columns::W(vec![0, 1]),
    };
    match scenario {
        ScenarioId::I => (Columns::AllX, Columns::AllX),
        ScenarioId::Ii => (Columns::AllX, wrong),
        ScenarioId::Iii => (wrong, Columns::AllX),
        ScenarioId::Iv => (wrong.clone(), wrong),
    }
}

/// One p-value method evaluated inside a study.
#[derive(Debug, Clone)]
pub struct StudyMethod {
    pub label: String,
    pub kind: StudyMethodKind,
    pub estimator: EstimatorKind,
    pub studentized: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StudyMethodKind {
    /// Posterior predictive p-value via Algorithm A.
    PppA,
    /// Normal approximation on the studentized statistic.
    Normal,
}

impl StudyMethod {
    pub fn ppp(label: &str, estimator: EstimatorKind, studentized: bool) -> Self {
        StudyMethod {
            label: label.to_string(),
            kind: StudyMethodKind::PppA,
            estimator,
            studentized,
        }
    }

    pub fn normal(label: &str, estimator: EstimatorKind) -> Self {
        StudyMethod {
            label: label.to_string(),
            kind: StudyMethodKind::Normal,
            estimator,
            studentized: true,
        }
    }
}

/// Monte Carlo settings of a replication study. Paper-scale values are
/// `replications = 3000`, `r = 2000`, `burn_in = 1000`; the desk-scale
/// default is `replications = 300`, `r = 300`, `burn_in = 300`.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub replications: usize,
    /// Posterior draw count per replication.
    pub r: usize,
    pub burn_in: usize,
    pub seed: u64,
}

/// Raw study output: one p-value row per successful replication.
#[derive(Debug, Clone)]
pub struct StudyResult {
    pub method_labels: Vec<String>,
    /// `p_values[rep][method]`, replications that failed excluded.
    pub p_values: Vec<Vec<f64>>,
    pub n_failed: usize,
    pub replications: usize,
}

/// Runs a replication study: fresh sample per replication (seed derived from
/// a counter, so the study is reproducible and parallelizable), every
/// requested p-value computed on it.
pub fn run_study(
    dgp: &DgpConfig,
    scenario: ScenarioId,
    methods: &[StudyMethod],
    config: &StudyConfig,
) -> Result<StudyResult> {
    let (ps_cols, out_cols) = apply_scenario(dgp.kind, scenario);
    let rows: Vec<Option<Vec<f64>>> = indexed_map(config.replications, |rep| {
        let mut rep_dgp = dgp.clone();
        rep_dgp.seed = derive_seed(config.seed, rep as u64);
        let sim = generate(&rep_dgp);
        let mut row = Vec::with_capacity(methods.len());
        for (m_idx, method) in methods.iter().enumerate() {
            let spec = StatisticSpec::new(method.estimator, method.studentized)
                .with_columns(ps_cols.clone(), out_cols.clone());
            let p = match method.kind {
                StudyMethodKind::PppA => {
                    let seed =
                        derive_seed(config.seed ^ 0x00d1_ce00, (rep * methods.len() + m_idx) as u64);
                    ppp_algorithm_a(&sim, &spec, config.r, config.burn_in, seed)
                        .map(|rep| rep.p_value)
                }
                StudyMethodKind::Normal => normal_pvalue(&sim, &spec).map(|rep| rep.p_value),
            };
            match p {
                Ok(v) => row.push(v),
                Err(_) => return None,
            }
        }
        Some(row)
    });

    let p_values: Vec<Vec<f64>> = rows.into_iter().flatten().collect();
    let n_failed = config.replications - p_values.len();
    if 10 * n_failed > config.replications {
        return Err(Error::UnreliableStudy {
            failed: n_failed,
            total: config.replications,
        });
    }
    Ok(StudyResult {
        method_labels: methods.iter().map(|m| m.label.clone()).collect(),
        p_values,
        n_failed,
        replications: config.replications,
    })
}

/// Rejection thresholds reported by every study summary.
pub const ALPHAS: [f64; 3] = [0.01, 0.05, 0.10];
/// Histogram bin count for p-value densities.
pub const HIST_BINS: usize = 20;

/// Summary of one method's p-value distribution.
#[derive(Debug, Clone)]
pub struct MethodSummary {
    pub label: String,
    /// Rejection rate at each entry of [`ALPHAS`].
    pub rejection_rates: [f64; 3],
    /// Binomial standard error of each rejection rate.
    pub rejection_ses: [f64; 3],
    /// Kolmogorov-Smirnov distance to Uniform(0,1).
    pub ks: f64,
    /// Density histogram over 20 equal bins of [0,1]; untruncated (the SVG
    /// rendering truncates the display at density 2).
    pub histogram: [f64; HIST_BINS],
}

/// Summary across all methods of a study.
#[derive(Debug, Clone)]
pub struct StudySummary {
    pub n_used: usize,
    pub n_failed: usize,
    pub methods: Vec<MethodSummary>,
}

/// One-sample Kolmogorov-Smirnov distance to the Uniform(0,1) CDF.
pub fn ks_to_uniform(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &p) in sorted.iter().enumerate() {
        d = d.max(((i + 1) as f64 / n - p).abs());
        d = d.max((p - i as f64 / n).abs());
    }
    d
}

/// Computes rejection rates, KS distances, and histogram densities from a
/// study's raw p-value matrix.
pub fn summarize(result: &StudyResult) -> StudySummary {
    let n = result.p_values.len();
    let methods = result
        .method_labels
        .iter()
        .enumerate()
        .map(|(j, label)| {
            let col: Vec<f64> = result.p_values.iter().map(|row| row[j]).collect();
            let mut rejection_rates = [0.0; 3];
            let mut rejection_ses = [0.0; 3];
            for (k, &alpha) in ALPHAS.iter().enumerate() {
                let rate = col.iter().filter(|&&p| p <= alpha).count() as f64 / n as f64;
                rejection_rates[k] = rate;
                rejection_ses[k] = (rate * (1.0 - rate) / n as f64).sqrt();
            }
            let mut histogram = [0.0; HIST_BINS];
            let width = 1.0 / HIST_BINS as f64;
            for &p in &col {
                let bin = ((p / width) as usize).min(HIST_BINS - 1);
                histogram[bin] += 1.0;
            }
            for h in &mut histogram {
                *h /= n as f64 * width;
            }
            MethodSummary {
                label: label.clone(),
                rejection_rates,
                rejection_ses,
                ks: ks_to_uniform(&col),
                histogram,
            }
        })
        .collect();
    StudySummary {
        n_used: n,
        n_failed: result.n_failed,
        methods,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logistic::fit_logistic_on;

    #[test]
    fn regular_mean_x_matches_monte_carlo_oracle() {
        // 10^6 generated units; Monte Carlo SE of the worst coordinate (X4,
        // generator variance ~8) is about 0.003.
        let sim = gen_regular(&DgpConfig::new(DgpKind::Regular, 1_000_000, 77));
        for j in 0..4 {
            let mean = sim.observed.x.column(j).sum() / 1e6;
            assert!(
                (mean - REGULAR_MEAN_X[j]).abs() < 0.02,
                "coordinate {j}: {mean} vs {}",
                REGULAR_MEAN_X[j]
            );
        }
    }

    #[test]
    fn regular_null_and_shifted_effects() {
        let sim = gen_regular(&DgpConfig::new(DgpKind::Regular, 1_000_000, 5));
        let mean_diff: f64 = sim
            .y1
            .iter()
            .zip(&sim.y0)
            .map(|(a, b)| a - b)
            .sum::<f64>()
            / 1e6;
        assert!(mean_diff.abs() < 0.02);

        let mut cfg = DgpConfig::new(DgpKind::Regular, 1_000_000, 6);
        cfg.tau_shift = 0.1;
        let sim = gen_regular(&cfg);
        let mean_diff: f64 = sim
            .y1
            .iter()
            .zip(&sim.y0)
            .map(|(a, b)| a - b)
            .sum::<f64>()
            / 1e6;
        assert!((mean_diff - 0.1).abs() < 0.02);
    }

    #[test]
    fn regular_propensities_stay_in_band() {
        let sim = gen_regular(&DgpConfig::new(DgpKind::Regular, 100_000, 7));
        let mut inside = 0usize;
        for i in 0..100_000 {
            let xi: Vec<f64> = (0..4).map(|j| sim.observed.x[(i, j)]).collect();
            let e = logistic(dot(&xi, &REGULAR_THETA));
            assert!(e > 0.0 && e < 1.0);
            if (0.02..=0.98).contains(&e) {
                inside += 1;
            }
        }
        assert!(inside as f64 / 1e5 >= 0.95, "only {inside} of 1e5 in band");
    }

    #[test]
    fn extreme_propensities_reach_the_tails() {
        let sim = gen_extreme(&DgpConfig::new(DgpKind::Extreme, 100_000, 8));
        let mut outside = 0usize;
        for i in 0..100_000 {
            let e = logistic(
                -1.0 + sim.observed.x[(i, 0)] * EXTREME_THETA[0]
                    + sim.observed.x[(i, 1)] * EXTREME_THETA[1],
            );
            if !(0.01..=0.99).contains(&e) {
                outside += 1;
            }
        }
        assert!(outside as f64 / 1e5 >= 0.01, "only {outside} of 1e5 outside");
    }

    #[test]
    fn extreme_mean_x_is_sqrt_e() {
        let sim = gen_extreme(&DgpConfig::new(DgpKind::Extreme, 1_000_000, 9));
        let target = std::f64::consts::E.sqrt();
        for j in 0..2 {
            let mean = sim.observed.x.column(j).sum() / 1e6;
            assert!((mean - target).abs() < 0.02, "coordinate {j}: {mean}");
        }
        let mean_diff: f64 = sim
            .y1
            .iter()
            .zip(&sim.y0)
            .map(|(a, b)| a - b)
            .sum::<f64>()
            / 1e6;
        assert!(mean_diff.abs() < 0.02);
    }

    #[test]
    fn observed_outcome_consistent_with_potentials() {
        for kind in [DgpKind::Regular, DgpKind::Extreme] {
            let mut cfg = DgpConfig::new(kind, 500, 10);
            for flip in [false, true] {
                cfg.flip_treatment = flip;
                let sim = generate(&cfg);
                for i in 0..500 {
                    let expect = if sim.observed.z[i] == 1 {
                        sim.y1[i]
                    } else {
                        sim.y0[i]
                    };
                    assert_eq!(sim.observed.y[i], expect);
                }
            }
        }
    }

    #[test]
    fn double_flip_is_identity() {
        let cfg = DgpConfig::new(DgpKind::Regular, 200, 11);
        let plain = gen_regular(&cfg);
        let mut flipped_cfg = cfg.clone();
        flipped_cfg.flip_treatment = true;
        let mut once = gen_regular(&flipped_cfg);
        assert_ne!(plain.observed.z, once.observed.z);
        flip(&mut once);
        assert_eq!(plain.observed.z, once.observed.z);
        assert_eq!(plain.observed.y, once.observed.y);
        assert_eq!(plain.y1, once.y1);
        assert_eq!(plain.true_tau, once.true_tau);
    }

    #[test]
    fn fitting_correct_ps_recovers_generating_coefficients() {
        // ties the propensity model to the simulator: the analysis model has
        // an intercept the generator lacks, so its estimate should sit at 0.
        let sim = gen_regular(&DgpConfig::new(DgpKind::Regular, 100_000, 12));
        let fit = fit_logistic_on(&sim.observed.z, &sim.observed.x).unwrap();
        assert!(fit.converged);
        assert!(fit.theta[0].abs() < 0.05, "intercept {}", fit.theta[0]);
        for j in 0..4 {
            assert!(
                (fit.theta[j + 1] - REGULAR_THETA[j]).abs() < 0.05,
                "coefficient {j}: {} vs {}",
                fit.theta[j + 1],
                REGULAR_THETA[j]
            );
        }
    }

    #[test]
    fn scenario_selections() {
        assert_eq!(
            apply_scenario(DgpKind::Regular, ScenarioId::I),
            (Columns::AllX, Columns::AllX)
        );
        assert_eq!(
            apply_scenario(DgpKind::Regular, ScenarioId::Ii),
            (Columns::AllX, Columns::W(vec![1, 2]))
        );
        assert_eq!(
            apply_scenario(DgpKind::Extreme, ScenarioId::Iii),
            (Columns::W(vec![0, 1]), Columns::AllX)
        );
        assert_eq!(
            apply_scenario(DgpKind::Extreme, ScenarioId::Iv),
            (Columns::W(vec![0, 1]), Columns::W(vec![0, 1]))
        );
    }

    #[test]
    fn study_is_deterministic_per_seed() {
        let dgp = DgpConfig::new(DgpKind::Regular, 100, 0);
        let methods = vec![
            StudyMethod::ppp("ppp_dr", EstimatorKind::Dr, true),
            StudyMethod::normal("normal_dr", EstimatorKind::Dr),
        ];
        let config = StudyConfig {
            replications: 6,
            r: 40,
            burn_in: 50,
            seed: 99,
        };
        let a = run_study(&dgp, ScenarioId::I, &methods, &config).unwrap();
        let b = run_study(&dgp, ScenarioId::I, &methods, &config).unwrap();
        assert_eq!(a.p_values, b.p_values);
        assert_eq!(a.method_labels, vec!["ppp_dr", "normal_dr"]);
    }

    #[test]
    fn summarize_all_ones() {
        let result = StudyResult {
            method_labels: vec!["m".into()],
            p_values: vec![vec![1.0]; 100],
            n_failed: 0,
            replications: 100,
        };
        let summary = summarize(&result);
        let m = &summary.methods[0];
        assert_eq!(m.rejection_rates, [0.0; 3]);
        assert!(m.ks > 0.9);
        // all mass in the last bin
        assert!(m.histogram[HIST_BINS - 1] > 19.0);
    }

    #[test]
    fn summarize_uniform_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let result = StudyResult {
            method_labels: vec!["u".into()],
            p_values: (0..3000).map(|_| vec![rng.random::<f64>()]).collect(),
            n_failed: 0,
            replications: 3000,
        };
        let summary = summarize(&result);
        let m = &summary.methods[0];
        let tol = 3.0 * (0.05f64 * 0.95 / 3000.0).sqrt();
        assert!((m.rejection_rates[1] - 0.05).abs() < tol);
        assert!(m.ks < 0.05);
        // densities integrate to one
        let integral: f64 = m.histogram.iter().sum::<f64>() / HIST_BINS as f64;
        assert!((integral - 1.0).abs() < 1e-12);
    }
}
