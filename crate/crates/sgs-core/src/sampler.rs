//! Sampling designs over a cohort: simple random sampling, surrogate-
//! stratified sampling (SGS), analysis-stage random oversampling, and
//! inverse-SGS resampling of an already-collected stratified frame.
//!
//! Every draw is a pure function of `(inputs, seed)`; concurrent draws
//! with distinct seeds are independent.

use std::io::Write;

use rand::seq::index;
use rand::Rng;

use crate::design::{sampling_probabilities, DesignKind, DesignSpec};
use crate::error::{Error, Result};
use crate::rng::{substream, Domain};

/// An abstraction sample: cohort row indices (oversampling may repeat
/// them), per-unit inverse-probability weights, and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub unit_indices: Vec<usize>,
    pub weights: Vec<f64>,
    pub design: DesignSpec,
    pub seed: u64,
}

impl Sample {
    pub fn len(&self) -> usize {
        self.unit_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.unit_indices.is_empty()
    }

    /// Number of distinct cohort units, the abstraction cost of the
    /// sample (oversampled replicates are free).
    pub fn distinct_units(&self) -> usize {
        let mut ids = self.unit_indices.clone();
        ids.sort_unstable();
        ids.dedup();
        ids.len()
    }
}

/// Simple random sample of `n` distinct units from a cohort of
/// `cohort_size`, all weights `N/n`.
pub fn draw_srs(cohort_size: usize, n: usize, seed: u64) -> Result<Sample> {
    if n == 0 {
        return Err(Error::InvalidArgument("sample size must be at least 1".into()));
    }
    if n > cohort_size {
        return Err(Error::InfeasibleDesign(format!(
            "cannot draw {n} distinct units from a cohort of {cohort_size}"
        )));
    }
    let mut rng = substream(seed, Domain::Sampler, 0);
    let mut unit_indices = index::sample(&mut rng, cohort_size, n).into_vec();
    unit_indices.sort_unstable();
    let weight = cohort_size as f64 / n as f64;
    Ok(Sample {
        weights: vec![weight; unit_indices.len()],
        unit_indices,
        design: DesignSpec::srs(n)?,
        seed,
    })
}

/// Surrogate-guided sample: `round(n*R)` units without replacement from
/// the Z=1 stratum, the remainder from Z=0. Weights are the reciprocal
/// stratum selection probabilities computed from the cohort's empirical
/// surrogate rate, so the two distinct weight values match
/// [`sampling_probabilities`] exactly.
pub fn draw_sgs(z: &[u8], n: usize, ratio: f64, seed: u64) -> Result<Sample> {
    let design = DesignSpec::sgs(ratio, n)?;
    let positives: Vec<usize> = (0..z.len()).filter(|&i| z[i] != 0).collect();
    let negatives: Vec<usize> = (0..z.len()).filter(|&i| z[i] == 0).collect();
    let n_pos = (n as f64 * ratio).round() as usize;
    let n_neg = n - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::InfeasibleDesign(format!(
            "allocation ({n_pos} positives, {n_neg} negatives) leaves a stratum empty; \
             both strata must be represented"
        )));
    }
    if n_pos > positives.len() {
        return Err(Error::InfeasibleDesign(format!(
            "stratum Z=1 holds {} units but the design needs {n_pos}",
            positives.len()
        )));
    }
    if n_neg > negatives.len() {
        return Err(Error::InfeasibleDesign(format!(
            "stratum Z=0 holds {} units but the design needs {n_neg}",
            negatives.len()
        )));
    }
    let p_z = positives.len() as f64 / z.len() as f64;
    let (pi_pos, pi_neg) = sampling_probabilities(&design, p_z, z.len())?;

    let mut rng = substream(seed, Domain::Sampler, 1);
    let mut unit_indices: Vec<usize> = index::sample(&mut rng, positives.len(), n_pos)
        .into_iter()
        .map(|k| positives[k])
        .collect();
    let mut weights = vec![1.0 / pi_pos; n_pos];
    unit_indices.extend(index::sample(&mut rng, negatives.len(), n_neg).into_iter().map(|k| negatives[k]));
    weights.extend(std::iter::repeat_n(1.0 / pi_neg, n_neg));
    Ok(Sample { unit_indices, weights, design, seed })
}

/// Random oversampling: replicate cases uniformly with replacement until
/// the case count matches the control count. Weights are copied, not
/// rescaled; oversampling is an analysis-stage manipulation, so the
/// distinct-unit abstraction cost is unchanged.
pub fn random_oversample(sample: &Sample, outcomes: &[u8], seed: u64) -> Result<Sample> {
    let case_slots: Vec<usize> = (0..sample.len())
        .filter(|&k| outcomes[sample.unit_indices[k]] != 0)
        .collect();
    let n_cases = case_slots.len();
    let n_controls = sample.len() - n_cases;
    if n_cases == 0 {
        return Err(Error::InfeasibleDesign(
            "cannot balance a sample with zero cases by oversampling".into(),
        ));
    }
    if n_controls == 0 {
        return Err(Error::InfeasibleDesign(
            "cannot balance a sample with zero controls by oversampling".into(),
        ));
    }
    let mut out = Sample {
        unit_indices: sample.unit_indices.clone(),
        weights: sample.weights.clone(),
        design: DesignSpec::new(DesignKind::Ros, sample.design.ratio, sample.design.budget)?,
        seed,
    };
    if n_cases >= n_controls {
        return Ok(out);
    }
    let mut rng = substream(seed, Domain::Sampler, 2);
    for _ in 0..(n_controls - n_cases) {
        let k = case_slots[rng.random_range(0..case_slots.len())];
        out.unit_indices.push(sample.unit_indices[k]);
        out.weights.push(sample.weights[k]);
    }
    Ok(out)
}

/// How an inverse-SGS resample treats repetition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResampleMode {
    /// Bootstrap-style: n independent draws, units may repeat.
    WithReplacement,
    /// Stratified without replacement at the reciprocal composition.
    WithoutReplacement,
}

/// Resample an SGS-collected frame with per-stratum probabilities
/// proportional to the reciprocal of the frame's selection
/// probabilities, so the resample emulates SRS composition from the
/// original cohort. `frame_ratio` is the R the frame was collected
/// with, `p_z` the cohort-level surrogate-positive rate. Output weights
/// are uniform (the resample is self-weighting by construction).
pub fn draw_inverse_sgs(
    frame: &Sample,
    z: &[u8],
    n: usize,
    frame_ratio: f64,
    p_z: f64,
    seed: u64,
    mode: ResampleMode,
) -> Result<Sample> {
    if n == 0 {
        return Err(Error::InvalidArgument("resample size must be at least 1".into()));
    }
    if !(p_z > 0.0 && p_z < 1.0) {
        return Err(Error::InvalidArgument(format!("p_z must lie in (0, 1), got {p_z}")));
    }
    if !(frame_ratio > 0.0 && frame_ratio < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "frame ratio must lie in (0, 1), got {frame_ratio}"
        )));
    }
    // Selection probability of each frame unit was proportional to
    // R/p_z (Z=1) or (1-R)/(1-p_z) (Z=0); resampling weight is the
    // reciprocal.
    let w_pos = p_z / frame_ratio;
    let w_neg = (1.0 - p_z) / (1.0 - frame_ratio);
    let frame_weights: Vec<f64> = frame
        .unit_indices
        .iter()
        .map(|&i| if z[i] != 0 { w_pos } else { w_neg })
        .collect();
    let design = DesignSpec::inverse_sgs(frame_ratio, n)?;
    let mut rng = substream(seed, Domain::Sampler, 3);

    let unit_indices = match mode {
        ResampleMode::WithReplacement => {
            let mut cumulative = Vec::with_capacity(frame_weights.len());
            let mut acc = 0.0;
            for w in &frame_weights {
                acc += w;
                cumulative.push(acc);
            }
            let total = acc;
            (0..n)
                .map(|_| {
                    let u = rng.random::<f64>() * total;
                    let k = cumulative.partition_point(|&c| c <= u).min(frame.len() - 1);
                    frame.unit_indices[k]
                })
                .collect()
        }
        ResampleMode::WithoutReplacement => {
            if n > frame.len() {
                return Err(Error::InfeasibleDesign(format!(
                    "cannot draw {n} distinct units from a frame of {}",
                    frame.len()
                )));
            }
            let pos_slots: Vec<usize> =
                (0..frame.len()).filter(|&k| z[frame.unit_indices[k]] != 0).collect();
            let neg_slots: Vec<usize> =
                (0..frame.len()).filter(|&k| z[frame.unit_indices[k]] == 0).collect();
            let pos_mass = pos_slots.len() as f64 * w_pos;
            let neg_mass = neg_slots.len() as f64 * w_neg;
            let n_pos = (n as f64 * pos_mass / (pos_mass + neg_mass)).round() as usize;
            let n_neg = n - n_pos;
            if n_pos > pos_slots.len() {
                return Err(Error::InfeasibleDesign(format!(
                    "frame stratum Z=1 holds {} units but the resample needs {n_pos}",
                    pos_slots.len()
                )));
            }
            if n_neg > neg_slots.len() {
                return Err(Error::InfeasibleDesign(format!(
                    "frame stratum Z=0 holds {} units but the resample needs {n_neg}",
                    neg_slots.len()
                )));
            }
            let mut picked: Vec<usize> = index::sample(&mut rng, pos_slots.len(), n_pos)
                .into_iter()
                .map(|k| frame.unit_indices[pos_slots[k]])
                .collect();
            picked.extend(
                index::sample(&mut rng, neg_slots.len(), n_neg)
                    .into_iter()
                    .map(|k| frame.unit_indices[neg_slots[k]]),
            );
            picked
        }
    };
    Ok(Sample {
        weights: vec![1.0; unit_indices.len()],
        unit_indices,
        design,
        seed,
    })
}

/// CSV serialization: `unit_id,z,y,weight,design,seed`, one row per
/// sampled slot (repeats appear once per replicate).
pub fn write_sample_csv<W: Write>(
    mut w: W,
    sample: &Sample,
    z: &[u8],
    outcomes: &[u8],
) -> Result<()> {
    writeln!(w, "unit_id,z,y,weight,design,seed")?;
    for (k, &i) in sample.unit_indices.iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{:.6},{},{}",
            i,
            z[i],
            outcomes[i],
            sample.weights[k],
            sample.design.kind.label(),
            sample.seed
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream as test_stream, Domain};
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn synthetic_cohort(n: usize, prev: f64, sens: f64, spec: f64, seed: u64) -> (Vec<u8>, Vec<u8>) {
        let mut rng = test_stream(seed, Domain::Outcomes, 0);
        let mut y = Vec::with_capacity(n);
        let mut z = Vec::with_capacity(n);
        for _ in 0..n {
            let yi = rng.random::<f64>() < prev;
            let zi = if yi {
                rng.random::<f64>() < sens
            } else {
                rng.random::<f64>() >= spec
            };
            y.push(u8::from(yi));
            z.push(u8::from(zi));
        }
        (y, z)
    }

    #[test]
    fn srs_full_cohort_is_identity() {
        let s = draw_srs(10, 10, 1).unwrap();
        assert_eq!(s.unit_indices, (0..10).collect::<Vec<_>>());
        assert!(s.weights.iter().all(|&w| (w - 1.0).abs() < 1e-15));
    }

    #[test]
    fn srs_deterministic_and_distinct() {
        let a = draw_srs(1000, 100, 7).unwrap();
        let b = draw_srs(1000, 100, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.distinct_units(), 100);
        assert!(draw_srs(10, 11, 0).is_err());
    }

    #[test]
    fn srs_case_yield_matches_expectation() {
        let (y, _) = synthetic_cohort(100_000, 0.10, 0.4, 0.95, 3);
        let mut total = 0usize;
        let reps = 1000;
        for rep in 0..reps {
            let s = draw_srs(y.len(), 1850, rep).unwrap();
            total += s.unit_indices.iter().filter(|&&i| y[i] == 1).count();
        }
        let mean = total as f64 / reps as f64;
        // Per-draw SD ~ sqrt(1850 * 0.1 * 0.9) ~ 12.9, so the mean of
        // 1000 draws sits within ~1.3 of the cohort expectation.
        let cohort_cases = y.iter().filter(|&&v| v == 1).count() as f64;
        let expected = 1850.0 * cohort_cases / y.len() as f64;
        assert!((mean - expected).abs() < 3.0 * 12.9 / (reps as f64).sqrt() + 1e-9);
        assert!((mean - 185.0).abs() < 5.0, "mean={mean}");
    }

    #[test]
    fn sgs_allocation_is_exact_and_weights_match_design_math() {
        let (_, z) = synthetic_cohort(50_000, 0.10, 0.4, 0.95, 5);
        let s = draw_sgs(&z, 500, 0.75, 11).unwrap();
        let n_pos_drawn = s.unit_indices.iter().filter(|&&i| z[i] == 1).count();
        assert_eq!(n_pos_drawn, 375);
        assert_eq!(s.len(), 500);
        assert_eq!(s.distinct_units(), 500);

        let p_z = z.iter().filter(|&&v| v == 1).count() as f64 / z.len() as f64;
        let (pi_pos, pi_neg) =
            sampling_probabilities(&DesignSpec::sgs(0.75, 500).unwrap(), p_z, z.len()).unwrap();
        for (k, &i) in s.unit_indices.iter().enumerate() {
            let expected = if z[i] == 1 { 1.0 / pi_pos } else { 1.0 / pi_neg };
            assert_abs_diff_eq!(s.weights[k], expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn sgs_mean_case_count_matches_worked_example() {
        let (y, z) = synthetic_cohort(1_000_000, 0.10, 0.4, 0.95, 13);
        let mut total = 0usize;
        let reps = 1000;
        for rep in 0..reps {
            let s = draw_sgs(&z, 500, 0.75, rep).unwrap();
            total += s.unit_indices.iter().filter(|&&i| y[i] == 1).count();
        }
        let mean = total as f64 / reps as f64;
        assert!((mean - 185.0).abs() < 3.0, "mean case count {mean}");
    }

    #[test]
    fn sgs_stratum_exhaustion_names_stratum() {
        let z = vec![1u8, 1, 0, 0, 0, 0, 0, 0, 0, 0];
        let err = draw_sgs(&z, 8, 0.5, 0).unwrap_err();
        assert!(err.to_string().contains("Z=1"), "{err}");
    }

    #[test]
    fn sgs_at_cohort_rate_matches_srs_distribution() {
        // Degenerate SGS (R = empirical p_z) should yield case counts
        // indistinguishable from SRS: compare means within 3 SE.
        let (y, z) = synthetic_cohort(100_000, 0.10, 0.4, 0.95, 17);
        let p_z = z.iter().filter(|&&v| v == 1).count() as f64 / z.len() as f64;
        let n = 400usize;
        let n_pos = (n as f64 * p_z).round() as usize;
        // Nudge R so round(n*R) is exact, keeping the comparison clean.
        let r = n_pos as f64 / n as f64;
        let reps = 1000;
        let (mut sgs_total, mut srs_total) = (0usize, 0usize);
        for rep in 0..reps {
            let s = draw_sgs(&z, n, r, 10_000 + rep).unwrap();
            sgs_total += s.unit_indices.iter().filter(|&&i| y[i] == 1).count();
            let s = draw_srs(y.len(), n, 20_000 + rep).unwrap();
            srs_total += s.unit_indices.iter().filter(|&&i| y[i] == 1).count();
        }
        let sgs_mean = sgs_total as f64 / reps as f64;
        let srs_mean = srs_total as f64 / reps as f64;
        let se = (n as f64 * 0.1 * 0.9).sqrt() / (reps as f64).sqrt() * 2.0f64.sqrt();
        assert!(
            (sgs_mean - srs_mean).abs() < 3.0 * se,
            "sgs={sgs_mean} srs={srs_mean} se={se}"
        );
    }

    #[test]
    fn sgs_sample_prevalence_matches_stratum_mixture() {
        let (y, z) = synthetic_cohort(1_000_000, 0.10, 0.4, 0.95, 19);
        let mut total = 0usize;
        let reps = 500;
        for rep in 0..reps {
            let s = draw_sgs(&z, 500, 0.5, 40_000 + rep).unwrap();
            total += s.unit_indices.iter().filter(|&&i| y[i] == 1).count();
        }
        let mean_prev = total as f64 / (reps as f64 * 500.0);
        // 0.5 * 0.4706 + 0.5 * 0.0656
        assert!((mean_prev - 0.268).abs() < 0.01, "prevalence {mean_prev}");
    }

    #[test]
    fn horvitz_thompson_population_estimate() {
        let (_, z) = synthetic_cohort(80_000, 0.10, 0.4, 0.95, 23);
        let mut rel_err_sum = 0.0f64;
        let reps = 1000;
        for rep in 0..reps {
            let s = draw_sgs(&z, 600, 0.5, 60_000 + rep).unwrap();
            let ht: f64 = s.weights.iter().sum();
            rel_err_sum += ht / z.len() as f64;
        }
        let mean_ratio = rel_err_sum / reps as f64;
        assert!((mean_ratio - 1.0).abs() < 0.05, "HT ratio {mean_ratio}");
    }

    #[test]
    fn sampling_is_independent_of_outcome_within_strata() {
        // S depends on Z only: within each stratum the sampled case
        // rate must match the stratum case rate in expectation.
        let (y, z) = synthetic_cohort(50_000, 0.10, 0.4, 0.95, 29);
        let stratum_rate = |zval: u8| {
            let (c, t) = y
                .iter()
                .zip(&z)
                .filter(|(_, &zv)| zv == zval)
                .fold((0usize, 0usize), |(c, t), (&yv, _)| (c + yv as usize, t + 1));
            c as f64 / t as f64
        };
        let rate_pos = stratum_rate(1);
        let rate_neg = stratum_rate(0);
        let reps = 2000;
        let (mut pos_cases, mut pos_n, mut neg_cases, mut neg_n) = (0usize, 0usize, 0usize, 0usize);
        for rep in 0..reps {
            let s = draw_sgs(&z, 400, 0.5, 80_000 + rep).unwrap();
            for &i in &s.unit_indices {
                if z[i] == 1 {
                    pos_n += 1;
                    pos_cases += y[i] as usize;
                } else {
                    neg_n += 1;
                    neg_cases += y[i] as usize;
                }
            }
        }
        let obs_pos = pos_cases as f64 / pos_n as f64;
        let obs_neg = neg_cases as f64 / neg_n as f64;
        let se_pos = (rate_pos * (1.0 - rate_pos) / pos_n as f64).sqrt();
        let se_neg = (rate_neg * (1.0 - rate_neg) / neg_n as f64).sqrt();
        // Wide bands: draws share the finite cohort, so they are not
        // independent across replicates.
        assert!((obs_pos - rate_pos).abs() < 6.0 * se_pos + 1e-3);
        assert!((obs_neg - rate_neg).abs() < 6.0 * se_neg + 1e-3);
    }

    #[test]
    fn oversample_balances_and_preserves_cost() {
        // 10 cases, 90 controls -> 90/90.
        let y: Vec<u8> = (0..100).map(|i| u8::from(i < 10)).collect();
        let base = draw_srs(100, 100, 1).unwrap();
        let ros = random_oversample(&base, &y, 2).unwrap();
        let cases = ros.unit_indices.iter().filter(|&&i| y[i] == 1).count();
        let controls = ros.len() - cases;
        assert_eq!(cases, 90);
        assert_eq!(controls, 90);
        assert_eq!(ros.len(), 180);
        assert_eq!(ros.distinct_units(), 100);
        assert_eq!(ros.design.kind, DesignKind::Ros);
    }

    #[test]
    fn oversample_balanced_input_unchanged() {
        let y: Vec<u8> = (0..10).map(|i| u8::from(i < 5)).collect();
        let base = draw_srs(10, 10, 1).unwrap();
        let ros = random_oversample(&base, &y, 3).unwrap();
        assert_eq!(ros.unit_indices, base.unit_indices);
    }

    #[test]
    fn oversample_zero_cases_errors() {
        let y = vec![0u8; 50];
        let base = draw_srs(50, 20, 1).unwrap();
        assert!(random_oversample(&base, &y, 0).is_err());
    }

    #[test]
    fn inverse_sgs_recovers_cohort_prevalence() {
        let (y, z) = synthetic_cohort(200_000, 0.10, 0.4, 0.95, 31);
        let frame = draw_sgs(&z, 4000, 0.5, 99).unwrap();
        let p_z = z.iter().filter(|&&v| v == 1).count() as f64 / z.len() as f64;
        let reps = 1000;
        let mut total_prev = 0.0;
        for rep in 0..reps {
            let s = draw_inverse_sgs(&frame, &z, 500, 0.5, p_z, rep, ResampleMode::WithReplacement)
                .unwrap();
            total_prev +=
                s.unit_indices.iter().filter(|&&i| y[i] == 1).count() as f64 / s.len() as f64;
        }
        let mean_prev = total_prev / reps as f64;
        assert!((mean_prev - 0.10).abs() < 0.01, "prevalence {mean_prev}");
    }

    #[test]
    fn inverse_sgs_without_replacement_composition() {
        let (_, z) = synthetic_cohort(100_000, 0.10, 0.4, 0.95, 37);
        let frame = draw_sgs(&z, 4000, 0.5, 7).unwrap();
        let p_z = z.iter().filter(|&&v| v == 1).count() as f64 / z.len() as f64;
        let s = draw_inverse_sgs(&frame, &z, 500, 0.5, p_z, 3, ResampleMode::WithoutReplacement)
            .unwrap();
        assert_eq!(s.distinct_units(), 500);
        let share_pos = s.unit_indices.iter().filter(|&&i| z[i] == 1).count() as f64 / 500.0;
        assert!((share_pos - p_z).abs() < 0.005, "share {share_pos} vs p_z {p_z}");
    }

    #[test]
    fn inverse_sgs_uniform_when_frame_matches_cohort_rate() {
        // R = p_z collapses reciprocal weights to a constant.
        let (_, z) = synthetic_cohort(10_000, 0.10, 0.4, 0.95, 41);
        let p_z = z.iter().filter(|&&v| v == 1).count() as f64 / z.len() as f64;
        let frame = draw_srs(z.len(), 2000, 5).unwrap();
        let mut counts = std::collections::HashMap::<usize, u32>::new();
        let reps = 3000;
        for rep in 0..reps {
            let s =
                draw_inverse_sgs(&frame, &z, 50, p_z, p_z, rep, ResampleMode::WithReplacement).unwrap();
            for &i in &s.unit_indices {
                *counts.entry(i).or_default() += 1;
            }
        }
        // Every frame unit should be hit at roughly the uniform rate.
        let expected = reps as f64 * 50.0 / frame.len() as f64;
        let (pos_mean, neg_mean) = {
            let (mut ps, mut pn, mut ns, mut nn) = (0.0, 0usize, 0.0, 0usize);
            for &i in &frame.unit_indices {
                let c = f64::from(counts.get(&i).copied().unwrap_or(0));
                if z[i] == 1 {
                    ps += c;
                    pn += 1;
                } else {
                    ns += c;
                    nn += 1;
                }
            }
            (ps / pn as f64, ns / nn as f64)
        };
        assert!((pos_mean - expected).abs() / expected < 0.1);
        assert!((neg_mean - expected).abs() / expected < 0.1);
    }

    #[test]
    fn bootstrap_shaped_resample_covers_frame_size() {
        let (_, z) = synthetic_cohort(50_000, 0.10, 0.4, 0.95, 43);
        let frame = draw_sgs(&z, 500, 0.5, 1).unwrap();
        let p_z = z.iter().filter(|&&v| v == 1).count() as f64 / z.len() as f64;
        let s = draw_inverse_sgs(&frame, &z, 500, 0.5, p_z, 9, ResampleMode::WithReplacement).unwrap();
        assert_eq!(s.len(), 500);
        // With-replacement draws repeat units.
        assert!(s.distinct_units() < 500);
    }

    #[test]
    fn draws_are_deterministic_per_seed() {
        let (y, z) = synthetic_cohort(5_000, 0.2, 0.5, 0.9, 47);
        let a = draw_sgs(&z, 100, 0.5, 12).unwrap();
        let b = draw_sgs(&z, 100, 0.5, 12).unwrap();
        assert_eq!(a, b);
        let c = draw_sgs(&z, 100, 0.5, 13).unwrap();
        assert_ne!(a.unit_indices, c.unit_indices);
        let r1 = random_oversample(&a, &y, 5).unwrap();
        let r2 = random_oversample(&a, &y, 5).unwrap();
        assert_eq!(r1, r2);
    }

    #[test]
    fn sample_csv_round_shape() {
        let z = vec![0u8, 1, 0, 1];
        let y = vec![0u8, 1, 1, 0];
        let s = draw_srs(4, 2, 3).unwrap();
        let mut buf = Vec::new();
        write_sample_csv(&mut buf, &s, &z, &y).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("unit_id,z,y,weight,design,seed\n"));
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().nth(1).unwrap().ends_with(",srs,3"));
    }
}
