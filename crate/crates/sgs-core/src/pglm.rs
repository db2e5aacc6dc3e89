//! Penalized logistic regression from scratch: lasso (L1) via cyclic
//! coordinate descent on the working quadratic, ridge (L2) via
//! iteratively reweighted least squares with penalty-augmented normal
//! equations, per-coefficient penalty factors (zero exempts a column;
//! the intercept is never penalized), AUC-driven k-fold cross-validation
//! over a log-spaced lambda path with warm starts, and the
//! `(X' W X)^-1` coefficient-covariance approximation.
//!
//! The objective is the total (not mean) negative log-likelihood
//!
//! ```text
//! sum_i [ log(1 + exp(eta_i)) - y_i * eta_i ] + lambda * sum_j f_j * pen(beta_j)
//! ```
//!
//! with `pen` = |.| for L1 and (.)^2 for L2, so the L1 stationarity
//! conditions read `|x_j' (y - p)| <= lambda * f_j` for zeroed
//! coefficients.
//!
//! Columns are standardized to mean zero and unit variance internally
//! (penalty factors are only comparable across columns on that scale);
//! reported coefficients are mapped back to the original scale.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve, invert_spd};
use crate::metrics::{auc_wilcoxon, EvalRecord};
use crate::rng::{substream, Domain};
use crate::stats::{expit, logit};

/// Which norm the penalty applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PenaltyNorm {
    L1,
    L2,
}

/// Penalty configuration: norm, strength, and per-coefficient
/// multipliers (0 = unpenalized). The intercept is always unpenalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltySpec {
    pub norm: PenaltyNorm,
    pub lambda: f64,
    pub factors: Vec<f64>,
}

impl PenaltySpec {
    pub fn new(norm: PenaltyNorm, lambda: f64, factors: Vec<f64>) -> Result<Self> {
        if lambda < 0.0 || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "lambda must be nonnegative, got {lambda}"
            )));
        }
        if factors.iter().any(|&f| f < 0.0 || !f.is_finite()) {
            return Err(Error::InvalidArgument("penalty factors must be nonnegative".into()));
        }
        Ok(Self { norm, lambda, factors })
    }

    /// Uniform unit factors.
    pub fn uniform(norm: PenaltyNorm, lambda: f64, p: usize) -> Self {
        Self { norm, lambda, factors: vec![1.0; p] }
    }

    fn check_dim(&self, p: usize) -> Result<()> {
        if self.factors.len() != p {
            return Err(Error::InvalidArgument(format!(
                "penalty has {} factors but the design has {p} columns",
                self.factors.len()
            )));
        }
        Ok(())
    }
}

/// Solver controls.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FitOptions {
    /// Stop when no coefficient (standardized scale) moves more than this.
    pub tol: f64,
    /// Iteration budget (coordinate-descent sweeps / IRLS steps).
    pub max_iter: usize,
    pub standardize: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { tol: 1e-7, max_iter: 10_000, standardize: true }
    }
}

/// A fitted model on the original feature scale.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub penalty: PenaltySpec,
    pub converged: bool,
    pub iterations: usize,
    /// Final penalized negative log-likelihood (standardized scale).
    pub objective: f64,
}

impl FitResult {
    pub fn n_features(&self) -> usize {
        self.coefficients.len()
    }

    /// Indices of nonzero or unpenalized coefficients.
    pub fn active_set(&self) -> Vec<usize> {
        (0..self.coefficients.len())
            .filter(|&j| self.coefficients[j] != 0.0 || self.penalty.factors[j] == 0.0)
            .collect()
    }
}

/// `(X_A' W X_A)^-1` on the intercept-plus-active-set parameterization.
#[derive(Debug, Clone)]
pub struct CovarianceApprox {
    /// (k+1) x (k+1), row/column 0 is the intercept.
    pub matrix: Array2<f64>,
    /// Original feature indices of rows/columns 1..=k.
    pub columns: Vec<usize>,
}

impl CovarianceApprox {
    /// Covariance of the feature coefficients only (intercept dropped),
    /// embedded into a p x p matrix with zeros off the active set.
    pub fn coefficient_matrix(&self, p: usize) -> Array2<f64> {
        let mut out = Array2::zeros((p, p));
        for (a, &ja) in self.columns.iter().enumerate() {
            for (b, &jb) in self.columns.iter().enumerate() {
                out[(ja, jb)] = self.matrix[(a + 1, b + 1)];
            }
        }
        out
    }
}

// Standardized columnar view of the design matrix.
struct Standardized {
    cols: Vec<Vec<f64>>,
    means: Vec<f64>,
    scales: Vec<f64>,
    n: usize,
}

impl Standardized {
    fn build(x: ArrayView2<'_, f64>, standardize: bool) -> Result<Self> {
        let n = x.nrows();
        let p = x.ncols();
        let mut cols = Vec::with_capacity(p);
        let mut means = Vec::with_capacity(p);
        let mut scales = Vec::with_capacity(p);
        for j in 0..p {
            let col = x.column(j);
            if col.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("column {j} has non-finite values")));
            }
            let (mean, scale) = if standardize {
                let mean = col.sum() / n as f64;
                let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
                // Constant columns carry no signal; unit scale keeps the
                // transform invertible and the coefficient pinned at 0.
                let scale = if var > 1e-12 { var.sqrt() } else { 1.0 };
                (mean, scale)
            } else {
                (0.0, 1.0)
            };
            cols.push(col.iter().map(|v| (v - mean) / scale).collect());
            means.push(mean);
            scales.push(scale);
        }
        Ok(Self { cols, means, scales, n })
    }

    fn p(&self) -> usize {
        self.cols.len()
    }
}

fn check_outcomes(y: &[u8], n: usize) -> Result<()> {
    if y.len() != n {
        return Err(Error::InvalidArgument(format!(
            "outcome length {} does not match {} rows",
            y.len(),
            n
        )));
    }
    if y.iter().any(|&v| v > 1) {
        return Err(Error::InvalidArgument("outcomes must be 0/1".into()));
    }
    let cases = y.iter().filter(|&&v| v == 1).count();
    if n < 2 || cases == 0 || cases == n {
        return Err(Error::FitError(format!(
            "need both outcome classes, got {cases} cases in {n} rows"
        )));
    }
    Ok(())
}

/// Penalized negative log-likelihood on the standardized scale.
fn objective(design: &Standardized, y: &[u8], intercept: f64, beta: &[f64], penalty: &PenaltySpec) -> f64 {
    let mut eta = vec![intercept; design.n];
    for (j, b) in beta.iter().enumerate() {
        if *b != 0.0 {
            for (e, v) in eta.iter_mut().zip(&design.cols[j]) {
                *e += b * v;
            }
        }
    }
    let mut nll = 0.0;
    for (i, &e) in eta.iter().enumerate() {
        // log(1 + exp(eta)) - y*eta, stably
        let log1p_exp = if e > 0.0 { e + (-e).exp().ln_1p() } else { e.exp().ln_1p() };
        nll += log1p_exp - f64::from(y[i]) * e;
    }
    let pen: f64 = beta
        .iter()
        .zip(&penalty.factors)
        .map(|(b, f)| match penalty.norm {
            PenaltyNorm::L1 => f * b.abs(),
            PenaltyNorm::L2 => f * b * b,
        })
        .sum();
    nll + penalty.lambda * pen
}

fn soft_threshold(u: f64, t: f64) -> f64 {
    if u > t {
        u - t
    } else if u < -t {
        u + t
    } else {
        0.0
    }
}

const MIN_WEIGHT: f64 = 1e-10;

/// Minimize the penalized logistic objective.
///
/// L1 runs coordinate descent on the working weighted least squares
/// inside an outer reweighting loop with active-set sweeps; L2 runs
/// damped Newton steps on the penalty-augmented normal equations. A
/// non-converged fit is returned flagged, not turned into an error;
/// single-class outcomes are.
pub fn fit(
    x: ArrayView2<'_, f64>,
    y: &[u8],
    penalty: &PenaltySpec,
    options: &FitOptions,
) -> Result<FitResult> {
    let design = Standardized::build(x, options.standardize)?;
    check_outcomes(y, design.n)?;
    penalty.check_dim(design.p())?;
    let state = match penalty.norm {
        PenaltyNorm::L1 => fit_l1(&design, y, penalty, options, None),
        PenaltyNorm::L2 => fit_l2(&design, y, penalty, options, None),
    }?;
    Ok(state.into_result(&design, penalty))
}

// Internal solution on the standardized scale, reusable for warm starts.
#[derive(Debug, Clone)]
struct SolverState {
    intercept: f64,
    beta: Vec<f64>,
    converged: bool,
    iterations: usize,
    objective: f64,
}

impl SolverState {
    fn into_result(self, design: &Standardized, penalty: &PenaltySpec) -> FitResult {
        // eta = b0 + sum_j beta_j (x_j - m_j)/s_j maps back to
        // coefficients beta_j/s_j and intercept b0 - sum_j beta_j m_j/s_j.
        let mut intercept = self.intercept;
        let mut coefficients = Vec::with_capacity(design.p());
        for j in 0..design.p() {
            let b = self.beta[j] / design.scales[j];
            coefficients.push(b);
            intercept -= b * design.means[j];
        }
        FitResult {
            intercept,
            coefficients,
            penalty: penalty.clone(),
            converged: self.converged,
            iterations: self.iterations,
            objective: self.objective,
        }
    }
}

fn fit_l1(
    design: &Standardized,
    y: &[u8],
    penalty: &PenaltySpec,
    options: &FitOptions,
    warm: Option<&SolverState>,
) -> Result<SolverState> {
    let n = design.n;
    let p = design.p();
    let yf: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
    let ybar = yf.iter().sum::<f64>() / n as f64;

    let (mut intercept, mut beta) = match warm {
        Some(w) => (w.intercept, w.beta.clone()),
        None => (logit(ybar), vec![0.0; p]),
    };
    let mut eta = vec![0.0f64; n];
    let recompute_eta = |eta: &mut Vec<f64>, intercept: f64, beta: &[f64]| {
        for e in eta.iter_mut() {
            *e = intercept;
        }
        for (j, b) in beta.iter().enumerate() {
            if *b != 0.0 {
                for (e, v) in eta.iter_mut().zip(&design.cols[j]) {
                    *e += b * v;
                }
            }
        }
    };
    recompute_eta(&mut eta, intercept, &beta);

    let mut obj = objective(design, y, intercept, &beta, penalty);
    let mut sweeps = 0usize;
    let mut converged = false;

    let mut w = vec![0.0f64; n];
    let mut resid = vec![0.0f64; n]; // working residual on the linearized problem

    'outer: while sweeps < options.max_iter {
        // Reweight: w_i = p(1-p), working residual r_i = (y - p)/w.
        let mut sum_w = 0.0;
        for i in 0..n {
            let pi = expit(eta[i]);
            let wi = (pi * (1.0 - pi)).max(MIN_WEIGHT);
            w[i] = wi;
            resid[i] = (yf[i] - pi) / wi;
            sum_w += wi;
        }
        let denoms: Vec<f64> = (0..p)
            .map(|j| design.cols[j].iter().zip(&w).map(|(x, w)| w * x * x).sum::<f64>())
            .collect();

        // Inner coordinate descent on the quadratic approximation:
        // active-set sweeps until stable, then one full sweep to admit
        // newcomers; repeat until the full sweep changes nothing.
        let mut active: Vec<usize> = (0..p)
            .filter(|&j| beta[j] != 0.0 || penalty.factors[j] == 0.0)
            .collect();
        let mut max_delta_outer = 0.0f64;
        loop {
            // Sweeps over the current active set.
            loop {
                sweeps += 1;
                let mut max_delta = update_intercept(&mut intercept, &mut resid, &w, sum_w);
                for &j in &active {
                    max_delta = max_delta.max(update_coordinate(
                        j, &mut beta, &mut resid, &w, design, penalty, &denoms,
                    ));
                }
                max_delta_outer = max_delta_outer.max(max_delta);
                if max_delta < options.tol || sweeps >= options.max_iter {
                    break;
                }
            }
            // Full sweep; grow the active set where the threshold is
            // crossed.
            sweeps += 1;
            let mut max_delta = update_intercept(&mut intercept, &mut resid, &w, sum_w);
            let mut grew = false;
            for j in 0..p {
                let before = beta[j];
                let delta =
                    update_coordinate(j, &mut beta, &mut resid, &w, design, penalty, &denoms);
                max_delta = max_delta.max(delta);
                if before == 0.0 && beta[j] != 0.0 && penalty.factors[j] != 0.0 {
                    grew = true;
                }
            }
            max_delta_outer = max_delta_outer.max(max_delta);
            if (!grew && max_delta < options.tol) || sweeps >= options.max_iter {
                break;
            }
            active = (0..p)
                .filter(|&j| beta[j] != 0.0 || penalty.factors[j] == 0.0)
                .collect();
        }

        // Refresh eta from scratch (the working residual drifts as w is
        // held fixed within the quadratic).
        recompute_eta(&mut eta, intercept, &beta);
        let new_obj = objective(design, y, intercept, &beta, penalty);
        debug_assert!(
            new_obj <= obj + 1e-6 * (1.0 + obj.abs()),
            "penalized objective rose from {obj} to {new_obj} within an IRLS step"
        );
        let obj_drop = obj - new_obj;
        obj = new_obj;

        if max_delta_outer < options.tol || obj_drop.abs() < options.tol * (1.0 + obj.abs()) {
            converged = true;
            break 'outer;
        }
    }

    Ok(SolverState { intercept, beta, converged, iterations: sweeps, objective: obj })
}

fn update_intercept(intercept: &mut f64, resid: &mut [f64], w: &[f64], sum_w: f64) -> f64 {
    let num: f64 = resid.iter().zip(w).map(|(r, w)| w * r).sum();
    let delta = num / sum_w;
    *intercept += delta;
    for r in resid.iter_mut() {
        *r -= delta;
    }
    delta.abs()
}

fn update_coordinate(
    j: usize,
    beta: &mut [f64],
    resid: &mut [f64],
    w: &[f64],
    design: &Standardized,
    penalty: &PenaltySpec,
    denoms: &[f64],
) -> f64 {
    let denom = denoms[j];
    if denom <= 0.0 {
        return 0.0;
    }
    let col = &design.cols[j];
    let grad: f64 = col.iter().zip(resid.iter()).zip(w).map(|((x, r), w)| w * x * r).sum();
    let u = grad + denom * beta[j];
    let new = soft_threshold(u, penalty.lambda * penalty.factors[j]) / denom;
    let delta = new - beta[j];
    if delta != 0.0 {
        beta[j] = new;
        for (r, x) in resid.iter_mut().zip(col) {
            *r -= delta * x;
        }
    }
    delta.abs()
}

fn fit_l2(
    design: &Standardized,
    y: &[u8],
    penalty: &PenaltySpec,
    options: &FitOptions,
    warm: Option<&SolverState>,
) -> Result<SolverState> {
    let n = design.n;
    let p = design.p();
    let yf: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();
    let ybar = yf.iter().sum::<f64>() / n as f64;
    let (mut intercept, mut beta) = match warm {
        Some(w) => (w.intercept, w.beta.clone()),
        None => (logit(ybar), vec![0.0; p]),
    };

    let mut obj = objective(design, y, intercept, &beta, penalty);
    let mut iterations = 0usize;
    let mut converged = false;

    while iterations < options.max_iter {
        iterations += 1;
        let mut eta = vec![intercept; n];
        for (j, b) in beta.iter().enumerate() {
            if *b != 0.0 {
                for (e, v) in eta.iter_mut().zip(&design.cols[j]) {
                    *e += b * v;
                }
            }
        }
        // Newton system on [intercept, beta]: H = X'WX + 2*lambda*F,
        // g = X'(y - p) - 2*lambda*F*beta.
        let dim = p + 1;
        let mut h = Array2::<f64>::zeros((dim, dim));
        let mut g = Array1::<f64>::zeros(dim);
        let mut w = vec![0.0f64; n];
        for i in 0..n {
            let pi = expit(eta[i]);
            w[i] = (pi * (1.0 - pi)).max(MIN_WEIGHT);
            g[0] += yf[i] - pi;
        }
        h[(0, 0)] = w.iter().sum();
        for j in 0..p {
            let col = &design.cols[j];
            let mut hw = 0.0;
            let mut gj = 0.0;
            for i in 0..n {
                hw += w[i] * col[i];
                let pi = expit(eta[i]);
                gj += col[i] * (yf[i] - pi);
            }
            h[(0, j + 1)] = hw;
            h[(j + 1, 0)] = hw;
            g[j + 1] = gj - 2.0 * penalty.lambda * penalty.factors[j] * beta[j];
            for k in j..p {
                let colk = &design.cols[k];
                let mut s = 0.0;
                for i in 0..n {
                    s += w[i] * col[i] * colk[i];
                }
                if k == j {
                    s += 2.0 * penalty.lambda * penalty.factors[j];
                }
                h[(j + 1, k + 1)] = s;
                h[(k + 1, j + 1)] = s;
            }
        }
        let l = match cholesky(&h) {
            Ok(l) => l,
            Err(_) => {
                // Ridge the Hessian slightly rather than fail mid-path.
                for d in 0..dim {
                    h[(d, d)] += 1e-8 * (1.0 + h[(d, d)].abs());
                }
                cholesky(&h)?
            }
        };
        let step = cholesky_solve(&l, &g);

        // Damped update: halve until the objective does not increase.
        let mut scale = 1.0f64;
        let mut accepted = false;
        let mut max_delta = 0.0;
        for _ in 0..30 {
            let cand_intercept = intercept + scale * step[0];
            let cand_beta: Vec<f64> =
                beta.iter().enumerate().map(|(j, b)| b + scale * step[j + 1]).collect();
            let cand_obj = objective(design, y, cand_intercept, &cand_beta, penalty);
            if cand_obj <= obj + 1e-12 * (1.0 + obj.abs()) {
                max_delta = step
                    .iter()
                    .map(|s| (scale * s).abs())
                    .fold(0.0f64, f64::max);
                intercept = cand_intercept;
                beta = cand_beta;
                debug_assert!(cand_obj <= obj + 1e-9 * (1.0 + obj.abs()));
                obj = cand_obj;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            break; // numerically stuck at the optimum
        }
        if max_delta < options.tol {
            converged = true;
            break;
        }
    }

    Ok(SolverState { intercept, beta, converged, iterations, objective: obj })
}

/// `expit(intercept + X beta)` on the original feature scale.
pub fn predict_probabilities(fit: &FitResult, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    if x.ncols() != fit.coefficients.len() {
        return Err(Error::InvalidArgument(format!(
            "fit has {} features but the matrix has {} columns",
            fit.coefficients.len(),
            x.ncols()
        )));
    }
    Ok(x.rows()
        .into_iter()
        .map(|row| expit(fit.intercept + row.dot(&ArrayView1::from(&fit.coefficients[..]))))
        .collect())
}

/// Linear scores `intercept + X beta` (monotone in the probabilities;
/// cheaper and rank-identical for AUC purposes).
pub fn predict_scores(fit: &FitResult, x: ArrayView2<'_, f64>) -> Result<Vec<f64>> {
    if x.ncols() != fit.coefficients.len() {
        return Err(Error::InvalidArgument(format!(
            "fit has {} features but the matrix has {} columns",
            fit.coefficients.len(),
            x.ncols()
        )));
    }
    Ok(x.rows()
        .into_iter()
        .map(|row| fit.intercept + row.dot(&ArrayView1::from(&fit.coefficients[..])))
        .collect())
}

/// One point on a cross-validation curve.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CvPoint {
    pub lambda: f64,
    pub mean_auc: f64,
    pub se: f64,
}

/// Cross-validation output: the AUC-maximizing lambda, the full curve,
/// and the final refit on all data at that lambda.
#[derive(Debug, Clone)]
pub struct CvResult {
    pub best_lambda: f64,
    pub curve: Vec<CvPoint>,
    pub fit: FitResult,
}

/// Controls for [`cv_select_lambda`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CvOptions {
    pub folds: usize,
    pub grid_size: usize,
    /// Smallest lambda as a fraction of lambda_max.
    pub lambda_min_ratio: f64,
    pub fit: FitOptions,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self { folds: 10, grid_size: 50, lambda_min_ratio: 1e-4, fit: FitOptions::default() }
    }
}

/// Smallest lambda that zeroes every fully penalized coefficient:
/// fit the unpenalized columns alone, then take
/// `max_j |x_j'(y - p_null)| / f_j` over penalized columns.
fn lambda_max(design: &Standardized, y: &[u8], penalty: &PenaltySpec, options: &FitOptions) -> Result<f64> {
    let p = design.p();
    let free: Vec<usize> = (0..p).filter(|&j| penalty.factors[j] == 0.0).collect();
    let n = design.n;
    let yf: Vec<f64> = y.iter().map(|&v| f64::from(v)).collect();

    // Null probabilities: intercept-plus-free-columns model.
    let probs: Vec<f64> = if free.is_empty() {
        let ybar = yf.iter().sum::<f64>() / n as f64;
        vec![ybar; n]
    } else {
        // Tiny ridge for stability; the factor-0 columns stay effectively
        // unpenalized at this magnitude.
        let null_penalty = PenaltySpec::uniform(PenaltyNorm::L2, 1e-10, free.len());
        let null_design = Standardized {
            cols: free.iter().map(|&j| design.cols[j].clone()).collect(),
            means: vec![0.0; free.len()],
            scales: vec![1.0; free.len()],
            n,
        };
        let state = fit_l2(&null_design, y, &null_penalty, options, None)?;
        let mut eta = vec![state.intercept; n];
        for (c, &j) in free.iter().enumerate() {
            for i in 0..n {
                eta[i] += state.beta[c] * design.cols[j][i];
            }
        }
        eta.iter().map(|&e| expit(e)).collect()
    };

    let mut max = 0.0f64;
    for j in 0..p {
        let f = penalty.factors[j];
        if f > 0.0 {
            let grad: f64 = design.cols[j]
                .iter()
                .zip(yf.iter().zip(&probs))
                .map(|(x, (y, p))| x * (y - p))
                .sum();
            max = max.max(grad.abs() / f);
        }
    }
    if max <= 0.0 {
        return Err(Error::FitError("no penalized columns to build a lambda path over".into()));
    }
    Ok(max)
}

/// Stratified fold assignment: cases and controls are shuffled
/// separately and dealt round-robin, so every fold keeps both classes
/// whenever each class has at least `folds` members.
fn stratified_folds(y: &[u8], folds: usize, seed: u64) -> Result<Vec<usize>> {
    use rand::seq::SliceRandom;
    let mut rng = substream(seed, Domain::CvFolds, 0);
    let mut cases: Vec<usize> = (0..y.len()).filter(|&i| y[i] == 1).collect();
    let mut controls: Vec<usize> = (0..y.len()).filter(|&i| y[i] == 0).collect();
    cases.shuffle(&mut rng);
    controls.shuffle(&mut rng);
    let mut assignment = vec![0usize; y.len()];
    for (k, &i) in cases.iter().chain(controls.iter()).enumerate() {
        assignment[i] = k % folds;
    }
    for fold in 0..folds {
        let fold_cases = cases.iter().filter(|&&i| assignment[i] == fold).count();
        let fold_controls = controls.iter().filter(|&&i| assignment[i] == fold).count();
        if fold_cases == 0 || fold_controls == 0 {
            return Err(Error::FitError(format!(
                "fold {fold} lacks a class after stratification \
                 ({fold_cases} cases, {fold_controls} controls); reduce the fold count"
            )));
        }
    }
    Ok(assignment)
}

/// Select lambda by k-fold cross-validated AUC over a descending
/// log-spaced path with warm starts, then refit on all rows at the
/// winner. Ties on mean AUC go to the larger (sparser) lambda.
pub fn cv_select_lambda(
    x: ArrayView2<'_, f64>,
    y: &[u8],
    penalty_template: &PenaltySpec,
    options: &CvOptions,
    seed: u64,
) -> Result<CvResult> {
    let design = Standardized::build(x, options.fit.standardize)?;
    check_outcomes(y, design.n)?;
    penalty_template.check_dim(design.p())?;
    if options.folds < 2 {
        return Err(Error::InvalidArgument("cross-validation needs at least 2 folds".into()));
    }
    if design.n < options.folds {
        return Err(Error::InvalidArgument(format!(
            "{} rows cannot fill {} folds",
            design.n, options.folds
        )));
    }

    let lmax = lambda_max(&design, y, penalty_template, &options.fit)?;
    let grid: Vec<f64> = if options.grid_size < 2 {
        vec![lmax]
    } else {
        let lmin = lmax * options.lambda_min_ratio;
        let step = (lmax.ln() - lmin.ln()) / (options.grid_size - 1) as f64;
        (0..options.grid_size).map(|k| (lmax.ln() - step * k as f64).exp()).collect()
    };

    let assignment = stratified_folds(y, options.folds, seed)?;
    // fold -> lambda -> held-out AUC
    let mut fold_aucs = vec![vec![f64::NAN; grid.len()]; options.folds];

    for (fold, aucs) in fold_aucs.iter_mut().enumerate() {
        let train_rows: Vec<usize> = (0..design.n).filter(|&i| assignment[i] != fold).collect();
        let test_rows: Vec<usize> = (0..design.n).filter(|&i| assignment[i] == fold).collect();
        let train_design = Standardized {
            cols: design
                .cols
                .iter()
                .map(|c| train_rows.iter().map(|&i| c[i]).collect())
                .collect(),
            means: vec![0.0; design.p()],
            scales: vec![1.0; design.p()],
            n: train_rows.len(),
        };
        let train_y: Vec<u8> = train_rows.iter().map(|&i| y[i]).collect();
        let test_y: Vec<u8> = test_rows.iter().map(|&i| y[i]).collect();

        let mut warm: Option<SolverState> = None;
        for (k, &lambda) in grid.iter().enumerate() {
            let pen = PenaltySpec {
                norm: penalty_template.norm,
                lambda,
                factors: penalty_template.factors.clone(),
            };
            let state = match penalty_template.norm {
                PenaltyNorm::L1 => fit_l1(&train_design, &train_y, &pen, &options.fit, warm.as_ref())?,
                PenaltyNorm::L2 => fit_l2(&train_design, &train_y, &pen, &options.fit, warm.as_ref())?,
            };
            let records: Vec<EvalRecord> = test_rows
                .iter()
                .zip(&test_y)
                .map(|(&i, &yi)| {
                    let mut score = state.intercept;
                    for (j, b) in state.beta.iter().enumerate() {
                        if *b != 0.0 {
                            score += b * design.cols[j][i];
                        }
                    }
                    EvalRecord::new(yi == 1, score)
                })
                .collect();
            aucs[k] = auc_wilcoxon(&records)?;
            warm = Some(state);
        }
    }

    let mut curve = Vec::with_capacity(grid.len());
    let mut best_idx = 0usize;
    for (k, &lambda) in grid.iter().enumerate() {
        let aucs: Vec<f64> = (0..options.folds).map(|f| fold_aucs[f][k]).collect();
        let mean = crate::stats::mean(&aucs);
        let se = crate::stats::standard_error(&aucs);
        curve.push(CvPoint { lambda, mean_auc: mean, se });
        if mean > curve[best_idx].mean_auc {
            best_idx = k;
        }
    }
    let best_lambda = grid[best_idx];
    let final_penalty = PenaltySpec {
        norm: penalty_template.norm,
        lambda: best_lambda,
        factors: penalty_template.factors.clone(),
    };
    // Refit on all rows, warm-starting down the path for L1.
    let final_state = match penalty_template.norm {
        PenaltyNorm::L1 => {
            let mut warm: Option<SolverState> = None;
            for &lambda in grid.iter().take(best_idx + 1) {
                let pen = PenaltySpec { lambda, ..final_penalty.clone() };
                warm = Some(fit_l1(&design, y, &pen, &options.fit, warm.as_ref())?);
            }
            warm.unwrap()
        }
        PenaltyNorm::L2 => fit_l2(&design, y, &final_penalty, &options.fit, None)?,
    };
    Ok(CvResult {
        best_lambda,
        curve,
        fit: final_state.into_result(&design, &final_penalty),
    })
}

/// `(X_A' W X_A)^-1` with `W = diag(p_hat (1 - p_hat))` from the fitted
/// probabilities, on the intercept + active-set parameterization (for
/// L1 the zeroed penalized coordinates carry no curvature information).
pub fn coefficient_covariance(fit: &FitResult, x: ArrayView2<'_, f64>) -> Result<CovarianceApprox> {
    let probs = predict_probabilities(fit, x)?;
    let active = fit.active_set();
    let k = active.len();
    let mut info = Array2::<f64>::zeros((k + 1, k + 1));
    for (i, &pi) in probs.iter().enumerate() {
        let w = pi * (1.0 - pi);
        info[(0, 0)] += w;
        for (a, &ja) in active.iter().enumerate() {
            let xa = x[(i, ja)];
            info[(0, a + 1)] += w * xa;
            for (b, &jb) in active.iter().enumerate().skip(a) {
                info[(a + 1, b + 1)] += w * xa * x[(i, jb)];
            }
        }
    }
    for a in 0..=k {
        for b in (a + 1)..=k {
            info[(b, a)] = info[(a, b)];
        }
    }
    let matrix = invert_spd(&info).map_err(|e| {
        Error::SingularMatrix(format!(
            "information matrix on the active set is singular ({e}); \
             consider a ridge penalty to stabilize the fit"
        ))
    })?;
    Ok(CovarianceApprox { matrix, columns: active })
}

/// Model serialization: sparse coefficient map plus metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub intercept: f64,
    /// index -> value, zeros omitted.
    pub coefficients: std::collections::BTreeMap<usize, f64>,
    pub n_features: usize,
    pub penalty: PenaltySpec,
    pub feature_names: Option<Vec<String>>,
}

impl ModelFile {
    pub fn from_fit(fit: &FitResult, feature_names: Option<Vec<String>>) -> Self {
        Self {
            intercept: fit.intercept,
            coefficients: fit
                .coefficients
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(j, &v)| (j, v))
                .collect(),
            n_features: fit.coefficients.len(),
            penalty: fit.penalty.clone(),
            feature_names,
        }
    }

    pub fn to_fit(&self) -> FitResult {
        let mut coefficients = vec![0.0; self.n_features];
        for (&j, &v) in &self.coefficients {
            coefficients[j] = v;
        }
        FitResult {
            intercept: self.intercept,
            coefficients,
            penalty: self.penalty.clone(),
            converged: true,
            iterations: 0,
            objective: f64::NAN,
        }
    }
}
