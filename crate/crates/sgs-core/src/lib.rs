//! Surrogate-guided sampling for rare-outcome label collection.
//!
//! When true outcome labels require costly expert abstraction, a cheap
//! binary surrogate correlated with the outcome can guide which units
//! get abstracted. Stratifying selection on the surrogate enriches the
//! labeled sample with cases, which buys classifier discrimination per
//! label; inverse-probability weighting then removes the selection bias
//! from validation metrics. This crate packages:
//!
//! - [`design`]: closed-form design calculators (likelihood ratios,
//!   case/control odds-ratio benefit, stratum selection probabilities,
//!   expected case yield, bi-normal AUC index),
//! - [`cohort`]: a synthetic cohort generator with long-tail binary
//!   features, calibrated prevalence, and surrogates with target
//!   operating characteristics,
//! - [`sampler`]: SRS, SGS, random oversampling, and inverse-SGS draws,
//! - [`pglm`]: penalized logistic regression (lasso/ridge) with
//!   per-coefficient penalty factors and AUC-driven cross-validation,
//! - [`metrics`]: Wilcoxon and IPW-corrected AUC, weighted rates, and
//!   bootstrap intervals,
//! - [`textfeat`]: report-text TF-IDF featurization and diagnosis-code
//!   surrogate construction,
//! - [`harness`]: a config-driven engine for learning-curve and
//!   design-comparison experiments.
//!
//! The `sgs` binary exposes all of it on the command line.

pub mod cohort;
pub mod design;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod metrics;
pub mod pglm;
pub mod rng;
pub mod sampler;
pub mod stats;
pub mod textfeat;

pub use error::{Error, Result};
