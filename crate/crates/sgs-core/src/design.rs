//! Closed-form design calculators for surrogate-guided sampling:
//! surrogate likelihood ratios, stratum case rates, the case/control
//! odds-ratio benefit of sampling on a surrogate, per-stratum selection
//! probabilities, expected case yield, and the bi-normal AUC index that
//! ties validation discrimination to coefficient-estimation variance.
//!
//! Everything here is a pure function of its inputs and safe to call
//! from any number of threads.

use std::io::Write;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{quadratic_form, trace_product};
use crate::stats::normal_cdf;

/// Operating characteristics of a binary enrichment surrogate:
/// sensitivity P(Z=1|Y=1) and specificity P(Z=0|Y=0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurrogateSpec {
    pub sensitivity: f64,
    pub specificity: f64,
}

impl SurrogateSpec {
    pub fn new(sensitivity: f64, specificity: f64) -> Result<Self> {
        for (name, v) in [("sensitivity", sensitivity), ("specificity", specificity)] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "surrogate {name} must lie in [0, 1], got {v}"
                )));
            }
        }
        Ok(Self { sensitivity, specificity })
    }

    /// Design evaluators reject specificity below 0.5: the negated
    /// surrogate is strictly more specific and should be used instead.
    pub fn require_design_grade(&self) -> Result<()> {
        if self.specificity < 0.5 {
            return Err(Error::SpecificityBelowHalf {
                sensitivity: self.sensitivity,
                specificity: self.specificity,
            });
        }
        Ok(())
    }
}

/// Outcome prevalence and cohort size of the population being sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationSpec {
    pub prevalence: f64,
    pub cohort_size: usize,
}

impl PopulationSpec {
    pub fn new(prevalence: f64, cohort_size: usize) -> Result<Self> {
        if !(prevalence > 0.0 && prevalence < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "prevalence must lie strictly inside (0, 1), got {prevalence}"
            )));
        }
        if cohort_size == 0 {
            return Err(Error::InvalidArgument("cohort size must be at least 1".into()));
        }
        Ok(Self { prevalence, cohort_size })
    }
}

/// Sampling design family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignKind {
    /// Simple random sampling.
    Srs,
    /// Stratified sampling on the surrogate with ratio R = P(Z=1|S=1).
    Sgs,
    /// Analysis-stage random oversampling of cases from an SRS draw.
    Ros,
    /// Resampling an SGS-collected frame with reciprocal stratum
    /// probabilities to emulate SRS composition.
    InverseSgs,
}

impl DesignKind {
    pub fn label(&self) -> &'static str {
        match self {
            DesignKind::Srs => "srs",
            DesignKind::Sgs => "sgs",
            DesignKind::Ros => "ros",
            DesignKind::InverseSgs => "inverse_sgs",
        }
    }
}

/// A sampling design: family, surrogate-positive ratio R (ignored for
/// SRS and ROS), and abstraction budget n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub kind: DesignKind,
    /// R = P(Z=1|S=1); must lie strictly inside (0, 1) for stratified
    /// kinds so both strata stay represented.
    pub ratio: f64,
    pub budget: usize,
}

impl DesignSpec {
    pub fn new(kind: DesignKind, ratio: f64, budget: usize) -> Result<Self> {
        if budget == 0 {
            return Err(Error::InvalidArgument("budget must be at least 1".into()));
        }
        match kind {
            DesignKind::Sgs | DesignKind::InverseSgs => {
                if !(ratio > 0.0 && ratio < 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "{} requires 0 < R < 1 so both strata are represented, got R={ratio}",
                        kind.label()
                    )));
                }
            }
            DesignKind::Srs | DesignKind::Ros => {
                if !(0.0..=1.0).contains(&ratio) {
                    return Err(Error::InvalidArgument(format!(
                        "ratio must lie in [0, 1], got {ratio}"
                    )));
                }
            }
        }
        Ok(Self { kind, ratio, budget })
    }

    pub fn srs(budget: usize) -> Result<Self> {
        Self::new(DesignKind::Srs, 0.0, budget)
    }

    pub fn sgs(ratio: f64, budget: usize) -> Result<Self> {
        Self::new(DesignKind::Sgs, ratio, budget)
    }

    pub fn inverse_sgs(ratio: f64, budget: usize) -> Result<Self> {
        Self::new(DesignKind::InverseSgs, ratio, budget)
    }
}

/// Marginal surrogate-positive rate P(Z=1) implied by prevalence and the
/// surrogate's operating characteristics.
pub fn p_z(pop: &PopulationSpec, z: &SurrogateSpec) -> f64 {
    z.sensitivity * pop.prevalence + (1.0 - z.specificity) * (1.0 - pop.prevalence)
}

/// Positive and negative likelihood ratios (LR+, LR-) of the surrogate.
///
/// A perfectly specific surrogate has an infinite LR+; that limiting
/// design is legitimate, so LR+ is reported as `f64::INFINITY` rather
/// than an error.
pub fn likelihood_ratios(z: &SurrogateSpec) -> (f64, f64) {
    let lr_plus = if z.specificity >= 1.0 {
        f64::INFINITY
    } else {
        z.sensitivity / (1.0 - z.specificity)
    };
    let lr_minus = (1.0 - z.sensitivity) / z.specificity;
    (lr_plus, lr_minus)
}

/// Stratum-conditional case rates (P(Y=1|Z=1), P(Y=1|Z=0)) by Bayes
/// rule. Requires 0 < P(Z=1) < 1.
pub fn stratum_case_rates(pop: &PopulationSpec, z: &SurrogateSpec) -> Result<(f64, f64)> {
    let pz = p_z(pop, z);
    if !(pz > 0.0 && pz < 1.0) {
        return Err(Error::DegenerateDesign(format!(
            "stratum case rates need 0 < P(Z=1) < 1, got P(Z=1) = {pz}"
        )));
    }
    let case_rate_pos = z.sensitivity * pop.prevalence / pz;
    let case_rate_neg = (1.0 - z.sensitivity) * pop.prevalence / (1.0 - pz);
    Ok((case_rate_pos, case_rate_neg))
}

/// Exact case/control odds ratio of an SGS sample with ratio R relative
/// to an SRS sample from the same cohort:
///
/// ```text
/// O_ratio = (R*sens + p_Z*(1 - R - sens)) / (R*(1 - spec) + p_Z*(spec - R))
/// ```
///
/// The budget does not appear: the odds ratio compares expected sample
/// compositions, which are free of n under stratified allocation.
pub fn o_ratio_exact(pop: &PopulationSpec, z: &SurrogateSpec, ratio: f64) -> Result<f64> {
    z.require_design_grade()?;
    check_ratio(ratio)?;
    let pz = p_z(pop, z);
    let numer = ratio * z.sensitivity + pz * (1.0 - ratio - z.sensitivity);
    let denom = ratio * (1.0 - z.specificity) + pz * (z.specificity - ratio);
    if denom <= 0.0 {
        return Err(Error::DegenerateDesign(format!(
            "odds-ratio denominator is {denom:.3e}: the surrogate-negative stratum \
             holds no controls in expectation"
        )));
    }
    Ok(numer / denom)
}

/// Rare-outcome approximation `R*LR+ + (1-R)*LR-`, the prevalence-free
/// limit of [`o_ratio_exact`].
pub fn o_ratio_rare_approx(z: &SurrogateSpec, ratio: f64) -> Result<f64> {
    z.require_design_grade()?;
    check_ratio(ratio)?;
    let (lr_plus, lr_minus) = likelihood_ratios(z);
    Ok(ratio * lr_plus + (1.0 - ratio) * lr_minus)
}

fn check_ratio(ratio: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&ratio) || !ratio.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "sampling ratio must lie in [0, 1], got {ratio}"
        )));
    }
    Ok(())
}

/// One cell of an odds-ratio surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ORatioCell {
    pub sensitivity: f64,
    pub specificity: f64,
    pub ratio: f64,
    pub prevalence: f64,
    pub o_ratio: f64,
}

/// Tabulates [`o_ratio_exact`] over a grid of surrogate operating
/// characteristics at fixed R and prevalence.
pub fn o_ratio_surface(
    grid: &[SurrogateSpec],
    ratio: f64,
    pop: &PopulationSpec,
) -> Result<Vec<ORatioCell>> {
    grid.iter()
        .map(|z| {
            Ok(ORatioCell {
                sensitivity: z.sensitivity,
                specificity: z.specificity,
                ratio,
                prevalence: pop.prevalence,
                o_ratio: o_ratio_exact(pop, z, ratio)?,
            })
        })
        .collect()
}

/// CSV export of a surface, one row per grid cell, 6-decimal fixed
/// notation, header `sensitivity,specificity,R,prevalence,o_ratio`.
pub fn write_o_ratio_surface_csv<W: Write>(mut w: W, cells: &[ORatioCell]) -> Result<()> {
    writeln!(w, "sensitivity,specificity,R,prevalence,o_ratio")?;
    for c in cells {
        writeln!(
            w,
            "{:.6},{:.6},{:.6},{:.6},{:.6}",
            c.sensitivity, c.specificity, c.ratio, c.prevalence, c.o_ratio
        )?;
    }
    Ok(())
}

/// Per-stratum selection probabilities (pi(Z=1), pi(Z=0)) for a
/// stratified design with budget n over a cohort of size N:
///
/// ```text
/// pi(Z=1) = (R / p_Z) * (n / N)      pi(Z=0) = ((1-R) / (1-p_Z)) * (n / N)
/// ```
///
/// An inverse design swaps the stratum roles (the surrogate-positive
/// stratum receives the 1-R share). Errors if either probability
/// exceeds one, i.e. the budget exceeds a stratum in expectation.
pub fn sampling_probabilities(
    design: &DesignSpec,
    p_z: f64,
    cohort_size: usize,
) -> Result<(f64, f64)> {
    if !(p_z > 0.0 && p_z < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "sampling probabilities need 0 < p_z < 1, got {p_z}"
        )));
    }
    let sampled_share_pos = match design.kind {
        DesignKind::Sgs => design.ratio,
        DesignKind::InverseSgs => 1.0 - design.ratio,
        other => {
            return Err(Error::InvalidArgument(format!(
                "sampling probabilities are defined for stratified designs, got {}",
                other.label()
            )));
        }
    };
    let frac = design.budget as f64 / cohort_size as f64;
    let pi_pos = sampled_share_pos / p_z * frac;
    let pi_neg = (1.0 - sampled_share_pos) / (1.0 - p_z) * frac;
    for (stratum, pi, share, mass) in [
        ("Z=1", pi_pos, sampled_share_pos, p_z),
        ("Z=0", pi_neg, 1.0 - sampled_share_pos, 1.0 - p_z),
    ] {
        if pi > 1.0 {
            let max_n = (cohort_size as f64 * mass / share).floor() as usize;
            return Err(Error::InfeasibleDesign(format!(
                "stratum {stratum} would need selection probability {pi:.4} > 1; \
                 budget {} exceeds the expected stratum size (max feasible n = {max_n})",
                design.budget
            )));
        }
    }
    Ok((pi_pos, pi_neg))
}

/// Expected number of true cases in a sample drawn with `design`.
///
/// Stratified designs mix the stratum case rates by their sampled
/// shares; SRS and ROS yield `n * prevalence` (ROS replication happens
/// after abstraction and creates no new cases).
pub fn expected_cases(design: &DesignSpec, pop: &PopulationSpec, z: &SurrogateSpec) -> Result<f64> {
    let n = design.budget as f64;
    match design.kind {
        DesignKind::Srs | DesignKind::Ros => Ok(n * pop.prevalence),
        DesignKind::Sgs => {
            let (pos, neg) = stratum_case_rates(pop, z)?;
            Ok(n * (design.ratio * pos + (1.0 - design.ratio) * neg))
        }
        DesignKind::InverseSgs => {
            let (pos, neg) = stratum_case_rates(pop, z)?;
            Ok(n * ((1.0 - design.ratio) * pos + design.ratio * neg))
        }
    }
}

/// Bi-normal AUC for a scalar score: `Phi(|mu1 - mu0| / sqrt(var1 + var0))`.
pub fn auc_binormal(mu1: f64, mu0: f64, var1: f64, var0: f64) -> Result<f64> {
    let total_var = var1 + var0;
    if !(total_var > 0.0) {
        return Err(Error::DegenerateDesign(format!(
            "bi-normal AUC needs var1 + var0 > 0, got {total_var}"
        )));
    }
    Ok(normal_cdf((mu1 - mu0).abs() / total_var.sqrt()))
}

/// Inputs to the bi-normal AUC index: case-class feature mean (control
/// mean fixed at zero), shared within-class covariance, true
/// coefficients, and the bias and covariance of their estimate.
#[derive(Debug, Clone)]
pub struct BinormalParams {
    pub mu1: Array1<f64>,
    pub sigma: Array2<f64>,
    pub beta: Array1<f64>,
    pub bias: Array1<f64>,
    pub cov: Array2<f64>,
}

impl BinormalParams {
    /// Zero estimation bias and covariance: the infinite-sample limit.
    pub fn exact(mu1: Array1<f64>, sigma: Array2<f64>, beta: Array1<f64>) -> Self {
        let p = mu1.len();
        Self {
            mu1,
            sigma,
            beta,
            bias: Array1::zeros(p),
            cov: Array2::zeros((p, p)),
        }
    }

    fn validate(&self) -> Result<()> {
        let p = self.mu1.len();
        if self.beta.len() != p || self.bias.len() != p {
            return Err(Error::InvalidArgument(format!(
                "dimension mismatch: mu1 has {p}, beta has {}, bias has {}",
                self.beta.len(),
                self.bias.len()
            )));
        }
        for (name, m) in [("sigma", &self.sigma), ("cov", &self.cov)] {
            if m.nrows() != p || m.ncols() != p {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be {p}x{p}, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
        }
        Ok(())
    }
}

/// Validation AUC of an estimated linear score under the bi-normal
/// model, as `(R_AUC, AUC)` with
///
/// ```text
/// R_AUC = (mu1'(beta + bias))^2
///         / ( 2[(beta+bias)' Sigma (beta+bias) + trace(cov Sigma)] + mu1' cov mu1 )
/// AUC   = Phi(sqrt(R_AUC))
/// ```
///
/// With zero bias and fixed signal parameters this is decreasing in any
/// PSD increase of the estimation covariance; with zero covariance as
/// well it reduces to the bi-normal AUC of the true score.
pub fn auc_index(params: &BinormalParams) -> Result<(f64, f64)> {
    params.validate()?;
    let effective = &params.beta + &params.bias;
    let numer = {
        let m = params.mu1.dot(&effective);
        m * m
    };
    let denom = 2.0
        * (quadratic_form(&effective, &params.sigma, &effective)
            + trace_product(&params.cov, &params.sigma))
        + quadratic_form(&params.mu1, &params.cov, &params.mu1);
    if !(denom > 0.0) {
        return Err(Error::DegenerateDesign(format!(
            "AUC index denominator is {denom:.3e}; the score has no variance"
        )));
    }
    let r_auc = numer / denom;
    Ok((r_auc, normal_cdf(r_auc.sqrt())))
}
