//! Point estimators of the average treatment effect, influence-function
//! standard errors, and studentized statistics.

use crate::error::{Error, Result};
use crate::outcome::FittedOutcome;

/// Which estimator of the average treatment effect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    /// Inverse propensity weighting, Hajek (ratio) form.
    Ipw,
    /// Outcome regression.
    Reg,
    /// Doubly robust combination.
    Dr,
}

impl EstimatorKind {
    pub fn label(self) -> &'static str {
        match self {
            EstimatorKind::Ipw => "ipw",
            EstimatorKind::Reg => "reg",
            EstimatorKind::Dr => "dr",
        }
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ipw" => Ok(EstimatorKind::Ipw),
            "reg" => Ok(EstimatorKind::Reg),
            "dr" => Ok(EstimatorKind::Dr),
            other => Err(format!("unknown estimator `{other}` (expected ipw|reg|dr)")),
        }
    }
}

/// How a standard error was (or was not) obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeMethod {
    Sandwich,
    Bootstrap,
    None,
}

/// A point estimate with optional standard error and studentized statistic.
#[derive(Debug, Clone)]
pub struct EffectEstimate {
    pub method: EstimatorKind,
    pub tau_hat: f64,
    pub se: Option<f64>,
    pub se_method: SeMethod,
    /// `|tau_hat| / se` when a standard error is present.
    pub t_abs: Option<f64>,
}

impl EffectEstimate {
    pub fn new(method: EstimatorKind, tau_hat: f64, se: Option<f64>, se_method: SeMethod) -> Self {
        let t_abs = se.map(|s| tau_hat.abs() / s);
        EffectEstimate {
            method,
            tau_hat,
            se,
            se_method,
            t_abs,
        }
    }
}

/// Hajek (self-normalized) inverse propensity weighting estimator:
/// weighted treated mean minus weighted control mean, with weights
/// `1/e_hat` and `1/(1-e_hat)` normalized within each arm.
pub fn tau_ipw_hajek(z: &[u8], y: &[f64], e_hat: &[f64]) -> Result<f64> {
    check_lengths(z, y, e_hat)?;
    let mut num1 = 0.0;
    let mut den1 = 0.0;
    let mut num0 = 0.0;
    let mut den0 = 0.0;
    for i in 0..z.len() {
        let e = e_hat[i];
        if e <= 0.0 || e >= 1.0 {
            return Err(Error::InvalidSample(format!(
                "propensity {e} for unit {i} is not strictly inside (0,1)"
            )));
        }
        if z[i] == 1 {
            num1 += y[i] / e;
            den1 += 1.0 / e;
        } else {
            num0 += y[i] / (1.0 - e);
            den0 += 1.0 / (1.0 - e);
        }
    }
    if den1 == 0.0 || den0 == 0.0 {
        return Err(Error::EmptyArm);
    }
    Ok(num1 / den1 - num0 / den0)
}

/// Outcome regression estimator: mean of the fitted treatment contrast.
pub fn tau_reg(fit: &FittedOutcome) -> f64 {
    let n = fit.mu1_hat.len();
    fit.mu1_hat
        .iter()
        .zip(&fit.mu0_hat)
        .map(|(m1, m0)| m1 - m0)
        .sum::<f64>()
        / n as f64
}

/// Doubly robust estimator: regression estimate plus the inverse-weighted
/// residual correction (Horvitz-Thompson form on the residuals).
pub fn tau_dr(z: &[u8], e_hat: &[f64], fit: &FittedOutcome) -> f64 {
    let n = z.len();
    let mut correction = 0.0;
    for i in 0..n {
        let r = fit.residuals[i];
        correction += if z[i] == 1 {
            r / e_hat[i]
        } else {
            -r / (1.0 - e_hat[i])
        };
    }
    tau_reg(fit) + correction / n as f64
}

/// Standard error from the empirical variance of the plug-in influence
/// function: `se = sqrt(sum phi_i^2) / n`.
///
/// For `dr` (and `reg`, which reuses the same influence function with the
/// fitted propensities), `phi_i = mu1_i - mu0_i + z_i r_i / e_i
/// - (1-z_i) r_i / (1-e_i) - tau_dr`. For the Hajek `ipw` estimator,
/// `phi_i = z_i (y_i - m1) / (e_i wbar1) - (1-z_i)(y_i - m0) / ((1-e_i) wbar0)`
/// with `m1`, `m0` the Hajek arm means and `wbar` the mean inverse weights.
pub fn sandwich_se(
    z: &[u8],
    y: &[f64],
    e_hat: &[f64],
    fit: Option<&FittedOutcome>,
    method: EstimatorKind,
) -> Result<f64> {
    check_lengths(z, y, e_hat)?;
    let n = z.len();
    let phi: Vec<f64> = match method {
        EstimatorKind::Ipw => {
            let mut num1 = 0.0;
            let mut den1 = 0.0;
            let mut num0 = 0.0;
            let mut den0 = 0.0;
            for i in 0..n {
                if z[i] == 1 {
                    num1 += y[i] / e_hat[i];
                    den1 += 1.0 / e_hat[i];
                } else {
                    num0 += y[i] / (1.0 - e_hat[i]);
                    den0 += 1.0 / (1.0 - e_hat[i]);
                }
            }
            if den1 == 0.0 || den0 == 0.0 {
                return Err(Error::EmptyArm);
            }
            let m1 = num1 / den1;
            let m0 = num0 / den0;
            let wbar1 = den1 / n as f64;
            let wbar0 = den0 / n as f64;
            (0..n)
                .map(|i| {
                    if z[i] == 1 {
                        (y[i] - m1) / (e_hat[i] * wbar1)
                    } else {
                        -(y[i] - m0) / ((1.0 - e_hat[i]) * wbar0)
                    }
                })
                .collect()
        }
        EstimatorKind::Reg | EstimatorKind::Dr => {
            let fit = fit.ok_or_else(|| {
                Error::DimensionMismatch("outcome fit required for reg/dr standard error".into())
            })?;
            let tau = tau_dr(z, e_hat, fit);
            (0..n)
                .map(|i| {
                    let r = fit.residuals[i];
                    let w = if z[i] == 1 {
                        r / e_hat[i]
                    } else {
                        -r / (1.0 - e_hat[i])
                    };
                    fit.mu1_hat[i] - fit.mu0_hat[i] + w - tau
                })
                .collect()
        }
    };
    let ss: f64 = phi.iter().map(|v| v * v).sum();
    if ss == 0.0 {
        return Err(Error::DegenerateVariance);
    }
    Ok(ss.sqrt() / n as f64)
}

/// Absolute studentized statistic `|tau_hat| / se`.
pub fn studentize(tau_hat: f64, se: f64) -> Result<f64> {
    if se <= 0.0 {
        return Err(Error::NonPositiveSe(se));
    }
    Ok(tau_hat.abs() / se)
}

fn check_lengths(z: &[u8], y: &[f64], e_hat: &[f64]) -> Result<()> {
    if y.len() != z.len() || e_hat.len() != z.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} treatments vs {} outcomes vs {} propensities",
            z.len(),
            y.len(),
            e_hat.len()
        )));
    }
    Ok(())
}
