//! Synthetic cohort generation: long-tail binary features, a logistic
//! outcome model with calibrated prevalence, and binary surrogates with
//! target operating characteristics.
//!
//! Two generative directions for the surrogates are supported:
//!
//! - `ZGivenY` (default): outcomes first, then Z drawn conditionally on
//!   Y with exactly the target sensitivity and specificity. This pins
//!   the operating characteristics the design calculators reason about.
//! - `YGivenZ`: surrogates first as independent Bernoulli draws, then
//!   outcomes from a logistic model that includes the surrogates as
//!   predictors, with surrogate coefficients and the intercept
//!   calibrated until the realized sensitivity and specificity land
//!   within tolerance of the targets.
//!
//! Feature columns are generated on independent RNG substreams keyed by
//! column index, so parallel generation is schedule-independent.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use ndarray::{Array2, ShapeBuilder};
use rand::Rng;
use rand_distr::{Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, substream, Domain};
use crate::stats::{expit, logit};

/// Target operating characteristics for one surrogate column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateTarget {
    pub label: String,
    pub sensitivity: f64,
    pub specificity: f64,
}

/// Which way the surrogate/outcome dependence is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurrogateMode {
    /// Draw Y first, then Z | Y with exact target sens/spec.
    #[default]
    ZGivenY,
    /// Draw Z first, then Y | Z, X; calibrate to hit the targets.
    YGivenZ,
}

/// How nonzero coefficients are laid over the feature columns: a cycled
/// value pattern on the most frequent columns, a constant on the columns
/// whose frequency sits closest to the outcome prevalence, zero
/// elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefPattern {
    pub frequent_values: Vec<f64>,
    pub n_frequent: usize,
    pub near_prevalence_value: f64,
    pub n_near_prevalence: usize,
}

impl Default for CoefPattern {
    fn default() -> Self {
        Self {
            frequent_values: vec![-0.75, -0.5, 0.25],
            n_frequent: 20,
            near_prevalence_value: 1.0,
            n_near_prevalence: 10,
        }
    }
}

fn default_feature_freq_mean() -> f64 {
    1.0 / 6.0
}

fn default_surrogate_targets() -> Vec<SurrogateTarget> {
    vec![
        SurrogateTarget { label: "z1".into(), sensitivity: 0.40, specificity: 0.95 },
        SurrogateTarget { label: "z2".into(), sensitivity: 0.67, specificity: 0.66 },
    ]
}

/// Full generator configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortConfig {
    pub n_units: usize,
    pub n_features: usize,
    pub prevalence_target: f64,
    #[serde(default = "default_feature_freq_mean")]
    pub feature_freq_mean: f64,
    #[serde(default)]
    pub coef_pattern: CoefPattern,
    #[serde(default = "default_surrogate_targets")]
    pub surrogate_targets: Vec<SurrogateTarget>,
    #[serde(default)]
    pub surrogate_mode: SurrogateMode,
    pub seed: u64,
}

impl CohortConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.prevalence_target > 0.0 && self.prevalence_target < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "prevalence target must lie in (0, 1), got {}",
                self.prevalence_target
            )));
        }
        let nonzero = self.coef_pattern.n_frequent + self.coef_pattern.n_near_prevalence;
        if self.n_features < nonzero {
            return Err(Error::InvalidArgument(format!(
                "{} features cannot host {nonzero} nonzero coefficients",
                self.n_features
            )));
        }
        if self.n_units < 2 {
            return Err(Error::InvalidArgument("cohort needs at least 2 units".into()));
        }
        for t in &self.surrogate_targets {
            for (name, v) in [("sensitivity", t.sensitivity), ("specificity", t.specificity)] {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::InvalidArgument(format!(
                        "surrogate {} {name} must lie in [0, 1], got {v}",
                        t.label
                    )));
                }
            }
        }
        if self.feature_freq_mean <= 0.0 {
            return Err(Error::InvalidArgument("feature frequency mean must be positive".into()));
        }
        Ok(())
    }
}

/// One realized surrogate column with its empirical characteristics.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateColumn {
    pub label: String,
    pub values: Vec<u8>,
    pub target_sensitivity: f64,
    pub target_specificity: f64,
    pub realized_sensitivity: f64,
    pub realized_specificity: f64,
}

impl SurrogateColumn {
    /// Empirical surrogate-positive rate.
    pub fn positive_rate(&self) -> f64 {
        self.values.iter().filter(|&&v| v == 1).count() as f64 / self.values.len() as f64
    }
}

/// A generated cohort: unit ids, binary features (stored as f64 for
/// direct use as a design matrix), outcomes, and surrogate columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Cohort {
    pub ids: Vec<u64>,
    pub features: Array2<f64>,
    pub feature_freqs: Vec<f64>,
    pub outcomes: Vec<u8>,
    pub surrogates: Vec<SurrogateColumn>,
}

impl Cohort {
    pub fn n_units(&self) -> usize {
        self.outcomes.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn prevalence(&self) -> f64 {
        self.outcomes.iter().filter(|&&v| v == 1).count() as f64 / self.n_units() as f64
    }

    pub fn surrogate(&self, label: &str) -> Option<&SurrogateColumn> {
        self.surrogates.iter().find(|s| s.label == label)
    }
}

/// The generating model, returned alongside the cohort for diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CohortModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    /// Per-surrogate logistic coefficients (YGivenZ mode; zero otherwise).
    pub surrogate_coefficients: Vec<f64>,
}

/// Generator output.
#[derive(Debug, Clone)]
pub struct GeneratedCohort {
    pub cohort: Cohort,
    pub model: CohortModel,
}

/// Draw the feature matrix: one marginal frequency per column from an
/// exponential distribution (clamped to [0.001, 0.999]), then i.i.d.
/// Bernoulli fills, one RNG substream per column.
pub fn generate_features(config: &CohortConfig) -> Result<(Array2<f64>, Vec<f64>)> {
    config.validate()?;
    let n = config.n_units;
    let p = config.n_features;
    let columns: Vec<(f64, Vec<f64>)> = (0..p)
        .into_par_iter()
        .map(|j| {
            let mut rng = substream(config.seed, Domain::FeatureColumn, j as u64);
            let exp = Exp::new(1.0 / config.feature_freq_mean).expect("positive rate");
            let freq: f64 = exp.sample(&mut rng).clamp(0.001, 0.999);
            let col: Vec<f64> = (0..n).map(|_| f64::from(u8::from(rng.random::<f64>() < freq))).collect();
            (freq, col)
        })
        .collect();
    let freqs: Vec<f64> = columns.iter().map(|(f, _)| *f).collect();
    let mut flat = Vec::with_capacity(n * p);
    for (_, col) in &columns {
        flat.extend_from_slice(col);
    }
    let features = Array2::from_shape_vec((n, p).f(), flat)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok((features, freqs))
}

/// Assign coefficients from the pattern: the `n_frequent` most frequent
/// columns receive the cycled `frequent_values`; among the remaining
/// columns, the `n_near_prevalence` whose frequency is closest to the
/// prevalence target receive `near_prevalence_value`; everything else is
/// zero. Frequency ties break on column index.
pub fn assign_coefficients(freqs: &[f64], config: &CohortConfig) -> Result<Vec<f64>> {
    let p = freqs.len();
    let pattern = &config.coef_pattern;
    if p < pattern.n_frequent + pattern.n_near_prevalence {
        return Err(Error::InvalidArgument(format!(
            "{p} features cannot host {} + {} nonzero coefficients",
            pattern.n_frequent, pattern.n_near_prevalence
        )));
    }
    let mut beta = vec![0.0; p];

    let mut by_freq: Vec<usize> = (0..p).collect();
    by_freq.sort_by(|&a, &b| freqs[b].partial_cmp(&freqs[a]).unwrap().then(a.cmp(&b)));
    let frequent = &by_freq[..pattern.n_frequent];
    for (rank, &j) in frequent.iter().enumerate() {
        beta[j] = pattern.frequent_values[rank % pattern.frequent_values.len()];
    }

    let mut rest: Vec<usize> = by_freq[pattern.n_frequent..].to_vec();
    rest.sort_by(|&a, &b| {
        let da = (freqs[a] - config.prevalence_target).abs();
        let db = (freqs[b] - config.prevalence_target).abs();
        da.partial_cmp(&db).unwrap().then(a.cmp(&b))
    });
    for &j in rest.iter().take(pattern.n_near_prevalence) {
        beta[j] = pattern.near_prevalence_value;
    }
    Ok(beta)
}

/// Bisection for the intercept: find b0 with
/// `mean_i expit(b0 + linear_i)` within 1e-6 of the target (the
/// realized Bernoulli prevalence then sits within sampling noise of the
/// target). Errors if the target cannot be bracketed.
pub fn calibrate_intercept(linear: &[f64], target: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "prevalence target must lie in (0, 1), got {target}"
        )));
    }
    let mean_prev = |b0: f64| linear.iter().map(|&e| expit(b0 + e)).sum::<f64>() / linear.len() as f64;
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    if mean_prev(lo) > target || mean_prev(hi) < target {
        return Err(Error::CalibrationFailed(format!(
            "prevalence {target} cannot be bracketed by intercepts in [-40, 40]"
        )));
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mean_prev(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let b0 = 0.5 * (lo + hi);
    if (mean_prev(b0) - target).abs() > 1e-3 {
        return Err(Error::CalibrationFailed(format!(
            "bisection stalled: mean prevalence {} vs target {target}",
            mean_prev(b0)
        )));
    }
    Ok(b0)
}

/// Independent Bernoulli outcomes from logistic probabilities.
pub fn generate_outcomes(linear_with_intercept: &[f64], seed: u64) -> Vec<u8> {
    let mut rng = substream(seed, Domain::Outcomes, 0);
    linear_with_intercept
        .iter()
        .map(|&e| u8::from(rng.random::<f64>() < expit(e)))
        .collect()
}

fn realized_characteristics(z: &[u8], y: &[u8]) -> (f64, f64) {
    let (mut tp, mut cases, mut tn, mut controls) = (0usize, 0usize, 0usize, 0usize);
    for (&zi, &yi) in z.iter().zip(y) {
        if yi == 1 {
            cases += 1;
            tp += usize::from(zi == 1);
        } else {
            controls += 1;
            tn += usize::from(zi == 0);
        }
    }
    (tp as f64 / cases.max(1) as f64, tn as f64 / controls.max(1) as f64)
}

/// Draw surrogate columns conditionally on existing outcomes, with the
/// target sensitivity and specificity as exact conditional rates.
pub fn attach_surrogates_z_given_y(
    outcomes: &[u8],
    targets: &[SurrogateTarget],
    seed: u64,
) -> Vec<SurrogateColumn> {
    targets
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let mut rng = substream(seed, Domain::Surrogate, k as u64);
            let values: Vec<u8> = outcomes
                .iter()
                .map(|&y| {
                    if y == 1 {
                        u8::from(rng.random::<f64>() < t.sensitivity)
                    } else {
                        u8::from(rng.random::<f64>() >= t.specificity)
                    }
                })
                .collect();
            let (sens, spec) = realized_characteristics(&values, outcomes);
            SurrogateColumn {
                label: t.label.clone(),
                values,
                target_sensitivity: t.sensitivity,
                target_specificity: t.specificity,
                realized_sensitivity: sens,
                realized_specificity: spec,
            }
        })
        .collect()
}

/// Calibration tolerance on realized sensitivity/specificity in
/// `YGivenZ` mode.
const SURROGATE_TOL: f64 = 0.01;
const MAX_CALIBRATION_PASSES: usize = 100;

/// Generate a cohort in `YGivenZ` mode: surrogates drawn first at the
/// marginal implied by their targets, then outcomes from
/// `logit(P(Y=1)) = b0 + sum_k b_k Z_k + X beta` with `(b_k, b0)`
/// tuned by nested bisection until expected sensitivity and specificity
/// sit within tolerance of the targets.
fn generate_y_given_z(
    config: &CohortConfig,
    features: &Array2<f64>,
    beta: &[f64],
) -> Result<(Vec<u8>, Vec<SurrogateColumn>, CohortModel)> {
    let n = config.n_units;
    let pi = config.prevalence_target;
    // Marginals implied by (sens, spec, prevalence): the generative
    // direction must reproduce P(Z=1) = sens*pi + (1-spec)(1-pi).
    let z_cols: Vec<Vec<u8>> = config
        .surrogate_targets
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let marginal = t.sensitivity * pi + (1.0 - t.specificity) * (1.0 - pi);
            let mut rng = substream(config.seed, Domain::Surrogate, k as u64);
            (0..n).map(|_| u8::from(rng.random::<f64>() < marginal)).collect()
        })
        .collect();

    let x_linear: Vec<f64> = {
        let mut acc = vec![0.0f64; n];
        for (j, &b) in beta.iter().enumerate() {
            if b != 0.0 {
                let col = features.column(j);
                for (a, &v) in acc.iter_mut().zip(col.iter()) {
                    *a += b * v;
                }
            }
        }
        acc
    };

    let k_surr = z_cols.len();
    let mut b_z = vec![2.0f64; k_surr];
    let linear_with = |b_z: &[f64]| -> Vec<f64> {
        let mut e = x_linear.clone();
        for (k, col) in z_cols.iter().enumerate() {
            if b_z[k] != 0.0 {
                for (ei, &zv) in e.iter_mut().zip(col) {
                    *ei += b_z[k] * f64::from(zv);
                }
            }
        }
        e
    };
    // Expected (sens, spec) from the model probabilities, no sampling
    // noise: sens_k = E[p Z_k] / E[p].
    let expected_chars = |probs: &[f64], col: &[u8]| -> (f64, f64) {
        let (mut pz, mut ptot, mut qz0, mut qtot) = (0.0, 0.0, 0.0, 0.0);
        for (&p, &zv) in probs.iter().zip(col) {
            ptot += p;
            qtot += 1.0 - p;
            if zv == 1 {
                pz += p;
            } else {
                qz0 += 1.0 - p;
            }
        }
        (pz / ptot, qz0 / qtot)
    };

    let mut calibrated = false;
    'outer: for _pass in 0..MAX_CALIBRATION_PASSES {
        // One coordinate bisection per surrogate, prevalence recalibrated
        // inside every evaluation.
        for k in 0..k_surr {
            let target = config.surrogate_targets[k].sensitivity;
            let eval = |bk: f64, b_z: &mut Vec<f64>| -> Result<f64> {
                b_z[k] = bk;
                let linear = linear_with(b_z);
                let b0 = calibrate_intercept(&linear, pi)?;
                let probs: Vec<f64> = linear.iter().map(|&e| expit(b0 + e)).collect();
                Ok(expected_chars(&probs, &z_cols[k]).0)
            };
            let (mut lo, mut hi) = (0.0f64, 30.0f64);
            // Expected sensitivity is increasing in the coefficient.
            if eval(lo, &mut b_z)? > target {
                b_z[k] = 0.0;
            } else if eval(hi, &mut b_z)? < target {
                b_z[k] = hi;
            } else {
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if eval(mid, &mut b_z)? < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                b_z[k] = 0.5 * (lo + hi);
            }
        }
        let linear = linear_with(&b_z);
        let b0_pass = calibrate_intercept(&linear, pi)?;
        let probs: Vec<f64> = linear.iter().map(|&e| expit(b0_pass + e)).collect();
        let ok = config.surrogate_targets.iter().enumerate().all(|(k, t)| {
            let (sens, spec) = expected_chars(&probs, &z_cols[k]);
            (sens - t.sensitivity).abs() <= SURROGATE_TOL
                && (spec - t.specificity).abs() <= SURROGATE_TOL
        });
        if ok {
            calibrated = true;
            break 'outer;
        }
    }
    let linear = linear_with(&b_z);
    let b0 = calibrate_intercept(&linear, pi)?;
    let eta: Vec<f64> = linear.iter().map(|&e| b0 + e).collect();
    let outcomes = generate_outcomes(&eta, derive_seed(config.seed, Domain::Outcomes, 1));

    if !calibrated {
        let probs: Vec<f64> = eta.iter().map(|&e| expit(e)).collect();
        let found: Vec<String> = config
            .surrogate_targets
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let (sens, spec) = expected_chars(&probs, &z_cols[k]);
                format!("{}: sens {sens:.4} (target {}), spec {spec:.4} (target {})", t.label, t.sensitivity, t.specificity)
            })
            .collect();
        return Err(Error::CalibrationFailed(format!(
            "surrogate calibration did not converge in {MAX_CALIBRATION_PASSES} passes; best found: {}",
            found.join("; ")
        )));
    }

    let surrogates: Vec<SurrogateColumn> = config
        .surrogate_targets
        .iter()
        .zip(z_cols)
        .map(|(t, values)| {
            let (sens, spec) = realized_characteristics(&values, &outcomes);
            SurrogateColumn {
                label: t.label.clone(),
                values,
                target_sensitivity: t.sensitivity,
                target_specificity: t.specificity,
                realized_sensitivity: sens,
                realized_specificity: spec,
            }
        })
        .collect();
    let model = CohortModel {
        intercept: b0,
        coefficients: beta.to_vec(),
        surrogate_coefficients: b_z,
    };
    Ok((outcomes, surrogates, model))
}

/// Generate a full cohort per the configuration.
pub fn generate(config: &CohortConfig) -> Result<GeneratedCohort> {
    config.validate()?;
    let (features, freqs) = generate_features(config)?;
    let beta = assign_coefficients(&freqs, config)?;

    let (outcomes, surrogates, model) = match config.surrogate_mode {
        SurrogateMode::ZGivenY => {
            let mut linear = vec![0.0f64; config.n_units];
            for (j, &b) in beta.iter().enumerate() {
                if b != 0.0 {
                    for (a, &v) in linear.iter_mut().zip(features.column(j).iter()) {
                        *a += b * v;
                    }
                }
            }
            let b0 = calibrate_intercept(&linear, config.prevalence_target)?;
            let eta: Vec<f64> = linear.iter().map(|&e| b0 + e).collect();
            let outcomes = generate_outcomes(&eta, derive_seed(config.seed, Domain::Outcomes, 1));
            let surrogates = attach_surrogates_z_given_y(&outcomes, &config.surrogate_targets, config.seed);
            let model = CohortModel {
                intercept: b0,
                coefficients: beta.clone(),
                surrogate_coefficients: vec![0.0; config.surrogate_targets.len()],
            };
            (outcomes, surrogates, model)
        }
        SurrogateMode::YGivenZ => generate_y_given_z(config, &features, &beta)?,
    };

    Ok(GeneratedCohort {
        cohort: Cohort {
            ids: (0..config.n_units as u64).collect(),
            features,
            feature_freqs: freqs,
            outcomes,
            surrogates,
        },
        model,
    })
}

/// Metadata written next to the cohort matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CohortMetadata {
    pub config: CohortConfig,
    pub realized_prevalence: f64,
    /// label -> (realized sensitivity, realized specificity, positive rate)
    pub realized_surrogates: BTreeMap<String, (f64, f64, f64)>,
    pub model: CohortModel,
}

impl CohortMetadata {
    pub fn new(config: &CohortConfig, generated: &GeneratedCohort) -> Self {
        Self {
            config: config.clone(),
            realized_prevalence: generated.cohort.prevalence(),
            realized_surrogates: generated
                .cohort
                .surrogates
                .iter()
                .map(|s| {
                    (
                        s.label.clone(),
                        (s.realized_sensitivity, s.realized_specificity, s.positive_rate()),
                    )
                })
                .collect(),
            model: generated.model.clone(),
        }
    }
}

/// Write the cohort as CSV: `id,y,<surrogate labels...>,x1..xp`.
pub fn write_cohort_csv<W: Write>(mut w: W, cohort: &Cohort) -> Result<()> {
    let labels: Vec<&str> = cohort.surrogates.iter().map(|s| s.label.as_str()).collect();
    write!(w, "id,y")?;
    for l in &labels {
        write!(w, ",{l}")?;
    }
    for j in 1..=cohort.n_features() {
        write!(w, ",x{j}")?;
    }
    writeln!(w)?;
    for i in 0..cohort.n_units() {
        write!(w, "{},{}", cohort.ids[i], cohort.outcomes[i])?;
        for s in &cohort.surrogates {
            write!(w, ",{}", s.values[i])?;
        }
        for j in 0..cohort.n_features() {
            let v = cohort.features[(i, j)];
            if v == v.trunc() {
                write!(w, ",{}", v as i64)?;
            } else {
                write!(w, ",{v}")?;
            }
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Read a cohort CSV written by [`write_cohort_csv`] (surrogate columns
/// are the ones between `y` and the first `x*` column).
pub fn read_cohort_csv<R: Read>(r: R) -> Result<Cohort> {
    let mut reader = BufReader::new(r);
    let mut header = String::new();
    reader.read_line(&mut header)?;
    let names: Vec<String> = header.trim_end().split(',').map(str::to_string).collect();
    if names.len() < 3 || names[0] != "id" || names[1] != "y" {
        return Err(Error::Parse(format!(
            "expected cohort header starting with id,y got {header:?}"
        )));
    }
    let first_x = names
        .iter()
        .position(|n| n.starts_with('x') && n[1..].chars().all(|c| c.is_ascii_digit()) && n.len() > 1)
        .ok_or_else(|| Error::Parse("no feature columns (x1..) in cohort header".into()))?;
    let surrogate_labels: Vec<String> = names[2..first_x].to_vec();
    let p = names.len() - first_x;

    let mut ids = Vec::new();
    let mut outcomes = Vec::new();
    let mut z_cols: Vec<Vec<u8>> = vec![Vec::new(); surrogate_labels.len()];
    let mut flat: Vec<f64> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != names.len() {
            return Err(Error::Parse(format!(
                "row {} has {} fields, expected {}",
                lineno + 2,
                fields.len(),
                names.len()
            )));
        }
        let parse_err = |what: &str, v: &str| {
            Error::Parse(format!("row {}: bad {what} value {v:?}", lineno + 2))
        };
        ids.push(fields[0].parse::<u64>().map_err(|_| parse_err("id", fields[0]))?);
        outcomes.push(fields[1].parse::<u8>().map_err(|_| parse_err("y", fields[1]))?);
        for (k, col) in z_cols.iter_mut().enumerate() {
            let v = fields[2 + k];
            col.push(v.parse::<u8>().map_err(|_| parse_err("z", v))?);
        }
        for f in &fields[first_x..] {
            flat.push(f.parse::<f64>().map_err(|_| parse_err("x", f))?);
        }
    }
    let n = ids.len();
    let features =
        Array2::from_shape_vec((n, p), flat).map_err(|e| Error::Parse(e.to_string()))?;
    let surrogates = surrogate_labels
        .into_iter()
        .zip(z_cols)
        .map(|(label, values)| {
            let (sens, spec) = realized_characteristics(&values, &outcomes);
            SurrogateColumn {
                label,
                values,
                target_sensitivity: f64::NAN,
                target_specificity: f64::NAN,
                realized_sensitivity: sens,
                realized_specificity: spec,
            }
        })
        .collect();
    Ok(Cohort { ids, features, feature_freqs: Vec::new(), outcomes, surrogates })
}

/// Save matrix + metadata under `prefix` (`<prefix>.csv`,
/// `<prefix>.meta.json`).
pub fn save_cohort(prefix: &Path, generated: &GeneratedCohort, config: &CohortConfig) -> Result<()> {
    let csv_path = prefix.with_extension("csv");
    let meta_path = prefix.with_extension("meta.json");
    let file = std::fs::File::create(&csv_path)?;
    write_cohort_csv(std::io::BufWriter::new(file), &generated.cohort)?;
    let meta = CohortMetadata::new(config, generated);
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta).map_err(|e| Error::Parse(e.to_string()))?)?;
    Ok(())
}

/// Design-matrix view for model fitting: features plus (optionally) the
/// surrogate columns appended, with matching penalty factors (features
/// 1.0, surrogates 0.0).
pub fn design_matrix(cohort: &Cohort, rows: &[usize], include_surrogates: bool) -> (Array2<f64>, Vec<f64>) {
    let p = cohort.n_features();
    let extra = if include_surrogates { cohort.surrogates.len() } else { 0 };
    let mut x = Array2::<f64>::zeros((rows.len(), p + extra));
    for (r, &i) in rows.iter().enumerate() {
        for j in 0..p {
            x[(r, j)] = cohort.features[(i, j)];
        }
        for (k, s) in cohort.surrogates.iter().enumerate().take(extra) {
            x[(r, p + k)] = f64::from(s.values[i]);
        }
    }
    let mut factors = vec![1.0; p];
    factors.extend(std::iter::repeat_n(0.0, extra));
    (x, factors)
}

/// Convenience accessor used across the harness.
pub fn outcomes_for(cohort: &Cohort, rows: &[usize]) -> Vec<u8> {
    rows.iter().map(|&i| cohort.outcomes[i]).collect()
}
