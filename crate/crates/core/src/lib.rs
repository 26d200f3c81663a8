//! Posterior predictive p-values (PPP) for the strong null hypothesis of no
//! causal effects in observational studies.
//!
//! The PPP averages Fisher randomization tests over the posterior of a
//! logistic propensity-score model. The test statistic can be the absolute
//! (optionally studentized) IPW, outcome-regression, or doubly robust
//! estimator of the average treatment effect.
//!
//! Crate layout:
//! - [`data`]: observational dataset representation and CSV ingestion.
//! - [`logistic`]: propensity model — IRLS fit, flat-prior log-posterior,
//!   random-walk Metropolis sampler, predictive treatment draws.
//! - [`outcome`]: per-arm linear outcome regressions.
//! - [`estimators`]: IPW (Hajek), regression, and doubly robust estimators
//!   with influence-function standard errors.
//! - [`bootstrap`]: nonparametric (pairs) bootstrap standard errors.
//! - [`ppp`]: the p-value engine — Algorithms A and B, the FRT special case,
//!   and the normal-approximation comparator.
//! - [`sim`]: the simulation harness (data-generating processes, model
//!   specification scenarios, replication studies).
//! - [`report`]: CSV / SVG emission for study summaries.
//!
//! All Monte Carlo loops are data-parallel when the `parallel` feature
//! (default) is enabled, and produce bit-identical results regardless of
//! thread count because every task derives its RNG from a counter.

pub mod bootstrap;
pub mod data;
pub mod error;
pub mod estimators;
pub mod exec;
pub mod logistic;
pub mod outcome;
pub mod ppp;
pub mod report;
pub mod sim;

pub use data::{Columns, DataSource, ObservedSample};
pub use error::{Error, Result};
pub use estimators::{EffectEstimate, EstimatorKind, SeMethod};
pub use logistic::{FittedPropensity, PosteriorDraws};
pub use outcome::FittedOutcome;
pub use ppp::{PValueReport, RandomizationDesign, StatisticSpec};
pub use sim::{DgpConfig, DgpKind, ScenarioId, SimSample, StudyResult};
