//! Evaluation metrics: empirical Wilcoxon-Mann-Whitney AUC, inverse-
//! probability-weighted AUC and classification rates for design-biased
//! validation samples, the trapezoidal AUC of a binary predictor, and
//! percentile bootstrap confidence intervals.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{substream, Domain};
use crate::stats::percentile_sorted;

/// One scored unit: true outcome, model score, and an inverse sampling
/// probability weight (1 for self-weighting designs such as SRS).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalRecord {
    pub truth: bool,
    pub score: f64,
    pub weight: f64,
}

impl EvalRecord {
    pub fn new(truth: bool, score: f64) -> Self {
        Self { truth, score, weight: 1.0 }
    }

    pub fn with_weight(truth: bool, score: f64, weight: f64) -> Self {
        Self { truth, score, weight }
    }
}

/// How tied scores contribute to concordance counts.
///
/// `Midrank` credits ties one half, the standard estimator of
/// P(score_case > score_ctrl) + P(tie)/2, and makes the uniform-weight
/// IPW estimator coincide exactly with the rank-sum estimator. `Strict`
/// counts only strict inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieMode {
    #[default]
    Midrank,
    Strict,
}

fn validate_records(records: &[EvalRecord]) -> Result<()> {
    for r in records {
        if !r.score.is_finite() {
            return Err(Error::InvalidArgument(format!("non-finite score {}", r.score)));
        }
        if !(r.weight > 0.0) || !r.weight.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "weights must be positive and finite, got {}",
                r.weight
            )));
        }
    }
    Ok(())
}

/// Empirical AUC via the rank-sum formula with midranks, O(n log n).
pub fn auc_wilcoxon(records: &[EvalRecord]) -> Result<f64> {
    auc_wilcoxon_with(records, TieMode::Midrank)
}

pub fn auc_wilcoxon_with(records: &[EvalRecord], ties: TieMode) -> Result<f64> {
    validate_records(records)?;
    let n_cases = records.iter().filter(|r| r.truth).count();
    let n_controls = records.len() - n_cases;
    if n_cases == 0 || n_controls == 0 {
        return Err(Error::UndefinedMetric(format!(
            "AUC needs at least one case and one control, got {n_cases} cases / {n_controls} controls"
        )));
    }
    match ties {
        TieMode::Midrank => {
            let mut order: Vec<usize> = (0..records.len()).collect();
            order.sort_by(|&a, &b| records[a].score.total_cmp(&records[b].score));
            // Case rank sum with average ranks over tied runs.
            let mut case_rank_sum = 0.0f64;
            let mut i = 0usize;
            while i < order.len() {
                let mut j = i;
                while j + 1 < order.len()
                    && records[order[j + 1]].score == records[order[i]].score
                {
                    j += 1;
                }
                // 1-based midrank of the tied run [i, j]
                let midrank = (i + j) as f64 / 2.0 + 1.0;
                for &k in &order[i..=j] {
                    if records[k].truth {
                        case_rank_sum += midrank;
                    }
                }
                i = j + 1;
            }
            let n1 = n_cases as f64;
            let n0 = n_controls as f64;
            Ok((case_rank_sum - n1 * (n1 + 1.0) / 2.0) / (n1 * n0))
        }
        // Strict concordance has no rank-sum identity under ties; reuse the
        // weighted pair counter with unit weights.
        TieMode::Strict => auc_ipw_with(records_unit_weights(records).as_slice(), TieMode::Strict),
    }
}

fn records_unit_weights(records: &[EvalRecord]) -> Vec<EvalRecord> {
    records
        .iter()
        .map(|r| EvalRecord::with_weight(r.truth, r.score, 1.0))
        .collect()
}

/// Inverse-probability-weighted empirical AUC:
///
/// ```text
/// sum_{i case, j control} w_i w_j [I(s_i > s_j) + I(s_i = s_j)/2]
///   / sum_{i case, j control} w_i w_j
/// ```
///
/// With uniform weights this equals [`auc_wilcoxon`] exactly. Weights
/// are inverse selection probabilities, so a stratified validation
/// sample estimates the cohort AUC of the scored model without bias.
pub fn auc_ipw(records: &[EvalRecord]) -> Result<f64> {
    auc_ipw_with(records, TieMode::Midrank)
}

pub fn auc_ipw_with(records: &[EvalRecord], ties: TieMode) -> Result<f64> {
    validate_records(records)?;
    let mut controls: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| !r.truth)
        .map(|r| (r.score, r.weight))
        .collect();
    let cases: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.truth)
        .map(|r| (r.score, r.weight))
        .collect();
    if cases.is_empty() || controls.is_empty() {
        return Err(Error::UndefinedMetric(format!(
            "AUC needs at least one case and one control, got {} cases / {} controls",
            cases.len(),
            controls.len()
        )));
    }
    controls.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Prefix sums of control weight by score order; per tied run, the
    // weight strictly below and the weight at the tied score.
    let scores: Vec<f64> = controls.iter().map(|c| c.0).collect();
    let mut below = Vec::with_capacity(controls.len() + 1);
    below.push(0.0f64);
    for c in &controls {
        below.push(below.last().unwrap() + c.1);
    }
    let total_control_weight = *below.last().unwrap();

    let mut numer = 0.0f64;
    let mut case_weight = 0.0f64;
    for &(score, weight) in &cases {
        // Index of the first control with score >= case score, and the
        // first strictly greater: weights below and tied follow.
        let lo = scores.partition_point(|s| *s < score);
        let hi = scores.partition_point(|s| *s <= score);
        let w_below = below[lo];
        let w_tied = below[hi] - below[lo];
        let credit = match ties {
            TieMode::Midrank => w_below + 0.5 * w_tied,
            TieMode::Strict => w_below,
        };
        numer += weight * credit;
        case_weight += weight;
    }
    let denom = case_weight * total_control_weight;
    if !(denom > 0.0) {
        return Err(Error::UndefinedMetric(format!("zero pair-weight denominator {denom}")));
    }
    Ok(numer / denom)
}

/// Which weighted proportion [`ipw_rate`] estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateKind {
    /// Among cases: weighted share of scores above the threshold.
    Sensitivity,
    /// Among controls: weighted share of scores at or below the threshold.
    Specificity,
    /// Weighted share of cases overall.
    Prevalence,
}

/// Horvitz-Thompson-style weighted rate at a score threshold.
pub fn ipw_rate(records: &[EvalRecord], kind: RateKind, threshold: f64) -> Result<f64> {
    validate_records(records)?;
    let mut numer = 0.0f64;
    let mut denom = 0.0f64;
    for r in records {
        match kind {
            RateKind::Sensitivity => {
                if r.truth {
                    denom += r.weight;
                    if r.score > threshold {
                        numer += r.weight;
                    }
                }
            }
            RateKind::Specificity => {
                if !r.truth {
                    denom += r.weight;
                    if r.score <= threshold {
                        numer += r.weight;
                    }
                }
            }
            RateKind::Prevalence => {
                denom += r.weight;
                if r.truth {
                    numer += r.weight;
                }
            }
        }
    }
    if denom == 0.0 {
        return Err(Error::UndefinedMetric(format!(
            "no units contribute weight to {kind:?}"
        )));
    }
    Ok(numer / denom)
}

/// Trapezoidal AUC of a binary predictor: `(sens + spec) / 2`.
pub fn auc_binary_predictor(sensitivity: f64, specificity: f64) -> Result<f64> {
    for (name, v) in [("sensitivity", sensitivity), ("specificity", specificity)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidArgument(format!("{name} must lie in [0, 1], got {v}")));
        }
    }
    Ok((sensitivity + specificity) / 2.0)
}

/// A percentile bootstrap interval around a point estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapCi {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub replicates: usize,
}

/// Percentile bootstrap over with-replacement resamples. Resamples that
/// lose one of the outcome classes are redrawn (at most 10 retries each)
/// so class-conditional statistics stay well defined. Replicates run in
/// parallel on per-replicate substreams; output is independent of the
/// worker count.
pub fn bootstrap_ci<F>(
    statistic: F,
    records: &[EvalRecord],
    replicates: usize,
    level: f64,
    seed: u64,
) -> Result<BootstrapCi>
where
    F: Fn(&[EvalRecord]) -> Result<f64> + Sync,
{
    if records.is_empty() {
        return Err(Error::InvalidArgument("bootstrap needs a nonempty sample".into()));
    }
    if !(0.0 < level && level < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    if replicates == 0 {
        return Err(Error::InvalidArgument("bootstrap needs at least one replicate".into()));
    }
    let estimate = statistic(records)?;
    let needs_both_classes =
        records.iter().any(|r| r.truth) && records.iter().any(|r| !r.truth);

    let mut stats = (0..replicates)
        .into_par_iter()
        .map(|rep| {
            let mut rng = substream(seed, Domain::Bootstrap, rep as u64);
            let mut resample = Vec::with_capacity(records.len());
            for attempt in 0.. {
                resample.clear();
                for _ in 0..records.len() {
                    resample.push(records[rng.random_range(0..records.len())]);
                }
                let ok = !needs_both_classes
                    || (resample.iter().any(|r| r.truth) && resample.iter().any(|r| !r.truth));
                if ok {
                    break;
                }
                if attempt >= 10 {
                    return Err(Error::UndefinedMetric(
                        "bootstrap resamples kept losing an outcome class after 10 retries".into(),
                    ));
                }
            }
            statistic(&resample)
        })
        .collect::<Result<Vec<f64>>>()?;
    stats.sort_by(|a, b| a.total_cmp(b));
    let alpha = (1.0 - level) / 2.0;
    Ok(BootstrapCi {
        estimate,
        lower: percentile_sorted(&stats, alpha),
        upper: percentile_sorted(&stats, 1.0 - alpha),
        level,
        replicates,
    })
}

/// Evaluation report emitted by the CLI `evaluate` subcommand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub auc: f64,
    pub auc_ci: Option<(f64, f64)>,
    pub auc_ipw: f64,
    pub auc_ipw_ci: Option<(f64, f64)>,
    pub sensitivity: f64,
    pub specificity: f64,
    pub prevalence_ipw: f64,
    pub threshold: f64,
    pub n_records: usize,
    pub bootstrap_replicates: usize,
    pub seed: u64,
}

/// Full report: both AUC estimators, IPW rates at `threshold`, and
/// bootstrap intervals for the two AUCs.
pub fn evaluate(
    records: &[EvalRecord],
    threshold: f64,
    bootstrap_replicates: usize,
    level: f64,
    seed: u64,
) -> Result<EvalReport> {
    let uniform: Vec<EvalRecord> = records_unit_weights(records);
    let auc = auc_wilcoxon(&uniform)?;
    let auc_ipw_value = auc_ipw(records)?;
    let (auc_ci, auc_ipw_ci) = if bootstrap_replicates > 0 {
        let plain = bootstrap_ci(
            |r| auc_wilcoxon(&records_unit_weights(r)),
            records,
            bootstrap_replicates,
            level,
            seed,
        )?;
        let weighted = bootstrap_ci(auc_ipw, records, bootstrap_replicates, level, seed ^ 1)?;
        (Some((plain.lower, plain.upper)), Some((weighted.lower, weighted.upper)))
    } else {
        (None, None)
    };
    Ok(EvalReport {
        auc,
        auc_ci,
        auc_ipw: auc_ipw_value,
        auc_ipw_ci,
        sensitivity: ipw_rate(records, RateKind::Sensitivity, threshold)?,
        specificity: ipw_rate(records, RateKind::Specificity, threshold)?,
        prevalence_ipw: ipw_rate(records, RateKind::Prevalence, threshold)?,
        threshold,
        n_records: records.len(),
        bootstrap_replicates,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    /// O(n^2) pair-loop oracle.
    fn auc_brute_force(records: &[EvalRecord], ties: TieMode) -> f64 {
        let mut numer = 0.0;
        let mut denom = 0.0;
        for i in records.iter().filter(|r| r.truth) {
            for j in records.iter().filter(|r| !r.truth) {
                let w = i.weight * j.weight;
                denom += w;
                if i.score > j.score {
                    numer += w;
                } else if i.score == j.score && ties == TieMode::Midrank {
                    numer += 0.5 * w;
                }
            }
        }
        numer / denom
    }

    fn records(y: &[u8], s: &[f64]) -> Vec<EvalRecord> {
        y.iter().zip(s).map(|(&y, &s)| EvalRecord::new(y == 1, s)).collect()
    }

    #[test]
    fn wilcoxon_four_point_fixture() {
        let r = records(&[1, 1, 0, 0], &[0.9, 0.4, 0.5, 0.1]);
        assert_abs_diff_eq!(auc_wilcoxon(&r).unwrap(), 0.75, epsilon = 1e-15);
    }

    #[test]
    fn wilcoxon_separated_and_constant() {
        let sep = records(&[0, 0, 1, 1], &[0.1, 0.2, 0.8, 0.9]);
        assert_abs_diff_eq!(auc_wilcoxon(&sep).unwrap(), 1.0, epsilon = 1e-15);
        let tied = records(&[0, 1, 0, 1], &[0.5, 0.5, 0.5, 0.5]);
        assert_abs_diff_eq!(auc_wilcoxon(&tied).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(auc_wilcoxon_with(&tied, TieMode::Strict).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn wilcoxon_rejects_single_class() {
        let r = records(&[1, 1], &[0.1, 0.2]);
        assert!(matches!(auc_wilcoxon(&r), Err(Error::UndefinedMetric(_))));
    }

    #[test]
    fn ipw_weighted_fixture_is_seven_ninths() {
        let r = vec![
            EvalRecord::with_weight(true, 0.9, 1.0),
            EvalRecord::with_weight(true, 0.4, 2.0),
            EvalRecord::with_weight(false, 0.5, 1.0),
            EvalRecord::with_weight(false, 0.1, 2.0),
        ];
        assert_abs_diff_eq!(auc_ipw(&r).unwrap(), 7.0 / 9.0, epsilon = 1e-15);
    }

    #[test]
    fn rank_sum_equals_brute_force_on_random_instances() {
        let mut rng = crate::rng::substream(5, Domain::Bootstrap, 99);
        for trial in 0..500 {
            let n = rng.random_range(5..=200);
            let r: Vec<EvalRecord> = (0..n)
                .map(|_| {
                    // Coarse score grid to force ties often.
                    let score = (rng.random_range(0..20) as f64) / 10.0;
                    EvalRecord::new(rng.random::<f64>() < 0.4, score)
                })
                .collect();
            if !(r.iter().any(|x| x.truth) && r.iter().any(|x| !x.truth)) {
                continue;
            }
            for ties in [TieMode::Midrank, TieMode::Strict] {
                let fast = auc_wilcoxon_with(&r, ties).unwrap();
                let slow = auc_brute_force(&r, ties);
                assert_abs_diff_eq!(fast, slow, epsilon = 1e-12);
            }
            let _ = trial;
        }
    }

    #[test]
    fn ipw_with_uniform_weights_equals_wilcoxon_exactly() {
        let mut rng = crate::rng::substream(6, Domain::Bootstrap, 100);
        for _ in 0..200 {
            let n = rng.random_range(5..=150);
            let r: Vec<EvalRecord> = (0..n)
                .map(|_| {
                    let score = (rng.random_range(0..12) as f64) / 4.0;
                    EvalRecord::new(rng.random::<f64>() < 0.5, score)
                })
                .collect();
            if !(r.iter().any(|x| x.truth) && r.iter().any(|x| !x.truth)) {
                continue;
            }
            // Bit-for-bit equality, not approximate.
            assert_eq!(auc_ipw(&r).unwrap(), auc_wilcoxon(&r).unwrap());
        }
    }

    #[test]
    fn weighted_ipw_matches_weighted_brute_force() {
        let mut rng = crate::rng::substream(7, Domain::Bootstrap, 101);
        for _ in 0..200 {
            let n = rng.random_range(5..=120);
            let r: Vec<EvalRecord> = (0..n)
                .map(|_| {
                    EvalRecord::with_weight(
                        rng.random::<f64>() < 0.4,
                        (rng.random_range(0..15) as f64) / 5.0,
                        rng.random_range(1..=50) as f64 / 10.0,
                    )
                })
                .collect();
            if !(r.iter().any(|x| x.truth) && r.iter().any(|x| !x.truth)) {
                continue;
            }
            assert_abs_diff_eq!(auc_ipw(&r).unwrap(), auc_brute_force(&r, TieMode::Midrank), epsilon = 1e-12);
        }
    }

    #[test]
    fn auc_invariant_under_monotone_score_transform() {
        let r = records(&[1, 0, 1, 0, 1, 0, 0], &[2.0, 1.0, 0.5, 0.5, 3.0, -1.0, 2.5]);
        let transformed: Vec<EvalRecord> = r
            .iter()
            .map(|x| EvalRecord::with_weight(x.truth, (x.score * 1.7).exp(), x.weight))
            .collect();
        assert_abs_diff_eq!(
            auc_wilcoxon(&r).unwrap(),
            auc_wilcoxon(&transformed).unwrap(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            auc_ipw(&r).unwrap(),
            auc_ipw(&transformed).unwrap(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn auc_label_flip_symmetry() {
        let r = records(&[1, 0, 1, 0, 0], &[0.9, 0.2, 0.6, 0.4, 0.15]);
        let flipped: Vec<EvalRecord> = r
            .iter()
            .map(|x| EvalRecord::new(!x.truth, x.score))
            .collect();
        assert_abs_diff_eq!(
            auc_wilcoxon(&flipped).unwrap(),
            1.0 - auc_wilcoxon(&r).unwrap(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn ipw_rates_reduce_to_plain_rates_with_uniform_weights() {
        let r = records(&[1, 1, 0, 0, 0], &[0.9, 0.3, 0.6, 0.2, 0.1]);
        assert_abs_diff_eq!(ipw_rate(&r, RateKind::Sensitivity, 0.5).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(
            ipw_rate(&r, RateKind::Specificity, 0.5).unwrap(),
            2.0 / 3.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(ipw_rate(&r, RateKind::Prevalence, 0.5).unwrap(), 0.4, epsilon = 1e-15);
    }

    #[test]
    fn perfect_classifier_rates() {
        let r = records(&[1, 1, 0, 0], &[1.0, 1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(ipw_rate(&r, RateKind::Sensitivity, 0.5).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ipw_rate(&r, RateKind::Specificity, 0.5).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn binary_predictor_trapezoid() {
        assert_abs_diff_eq!(auc_binary_predictor(0.40, 0.95).unwrap(), 0.675, epsilon = 1e-15);
        assert_abs_diff_eq!(auc_binary_predictor(0.27, 0.99).unwrap(), 0.63, epsilon = 1e-15);
        assert_abs_diff_eq!(auc_binary_predictor(0.5, 0.5).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn binary_predictor_equals_wilcoxon_on_realizing_cohort() {
        // A cohort realizing sens 0.6 (3/5 cases flagged) and spec 0.8
        // (8/10 controls unflagged), scored by the predictor itself.
        let mut r = Vec::new();
        for i in 0..5 {
            r.push(EvalRecord::new(true, f64::from(u8::from(i < 3))));
        }
        for i in 0..10 {
            r.push(EvalRecord::new(false, f64::from(u8::from(i < 2))));
        }
        assert_abs_diff_eq!(
            auc_wilcoxon(&r).unwrap(),
            auc_binary_predictor(0.6, 0.8).unwrap(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn bootstrap_constant_statistic_zero_width() {
        let r = records(&[1, 0, 1, 0], &[0.8, 0.2, 0.7, 0.3]);
        let ci = bootstrap_ci(|_| Ok(0.42), &r, 200, 0.95, 9).unwrap();
        assert_abs_diff_eq!(ci.lower, 0.42, epsilon = 1e-15);
        assert_abs_diff_eq!(ci.upper, 0.42, epsilon = 1e-15);
    }

    #[test]
    fn bootstrap_deterministic_under_fixed_seed() {
        let mut rng = crate::rng::substream(8, Domain::Bootstrap, 55);
        let r: Vec<EvalRecord> = (0..60)
            .map(|_| EvalRecord::new(rng.random::<f64>() < 0.3, rng.random()))
            .collect();
        let a = bootstrap_ci(auc_ipw, &r, 300, 0.95, 123).unwrap();
        let b = bootstrap_ci(auc_ipw, &r, 300, 0.95, 123).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn bootstrap_covers_binormal_truth() {
        // Scores from a bi-normal model; the interval should cover the
        // closed-form AUC in most meta-replicates.
        use rand_distr::{Distribution, Normal};
        let truth = crate::design::auc_binormal(1.0, 0.0, 1.0, 1.0).unwrap();
        let case_dist = Normal::new(1.0, 1.0).unwrap();
        let ctrl_dist = Normal::new(0.0, 1.0).unwrap();
        let mut covered = 0;
        let meta = 200;
        for m in 0..meta {
            let mut rng = crate::rng::substream(44, Domain::Bootstrap, 1000 + m);
            let r: Vec<EvalRecord> = (0..500)
                .map(|_| {
                    if rng.random::<f64>() < 0.3 {
                        EvalRecord::new(true, case_dist.sample(&mut rng))
                    } else {
                        EvalRecord::new(false, ctrl_dist.sample(&mut rng))
                    }
                })
                .collect();
            if !(r.iter().any(|x| x.truth) && r.iter().any(|x| !x.truth)) {
                continue;
            }
            let ci = bootstrap_ci(
                |rs| auc_wilcoxon(rs),
                &r,
                300,
                0.95,
                m,
            )
            .unwrap();
            if ci.lower <= truth && truth <= ci.upper {
                covered += 1;
            }
        }
        assert!(covered >= (meta * 9 / 10) as i32, "coverage {covered}/{meta}");
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]

        #[test]
        fn auc_estimators_agree_with_pair_loop(
            scores in proptest::collection::vec(0..8i32, 4..60),
            labels in proptest::collection::vec(proptest::bool::ANY, 60),
            weights in proptest::collection::vec(1..5u32, 60),
        ) {
            let r: Vec<EvalRecord> = scores
                .iter()
                .enumerate()
                .map(|(i, &s)| EvalRecord::with_weight(labels[i], s as f64 / 2.0, weights[i] as f64))
                .collect();
            proptest::prop_assume!(r.iter().any(|x| x.truth) && r.iter().any(|x| !x.truth));
            let fast = auc_ipw(&r).unwrap();
            let slow = auc_brute_force(&r, TieMode::Midrank);
            proptest::prop_assert!((fast - slow).abs() < 1e-12);
        }
    }
}
