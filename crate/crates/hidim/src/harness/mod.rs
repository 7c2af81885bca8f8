//! Experiment configuration, Monte Carlo orchestration, log-log rate
//! fitting, and CSV/JSON reporting. This module owns all IO; the library
//! modules perform none.
//!
//! Determinism contract: identical `(config, master_seed)` produce
//! byte-identical output files regardless of thread count. Trial `i` of
//! sweep value `v` always runs on the stream derived from `(v, i)`, and
//! result collection restores submission order.

pub mod acceptance;
pub mod oracles;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::concentration::{empirical_exceedance, hoeffding_bound, TailComparison};
use crate::datagen::{
    rademacher_design, regular_trig_design, sample_noise, sobolev_truth, sparse_truth,
    spiked_covariance_sample, NoiseKind, RandomSource, RegressionInstance,
};
use crate::graphical::{graphical_lasso, ising_exact_sample, ising_fit, IsingModel};
use crate::linalg::{cholesky, norm1, sign_aligned_distance, symmetric_eigen, DenseMatrix};
use crate::matrix_estimation::{
    empirical_covariance, rank_penalized, sparse_pca, svt, svt_threshold, to_sequence_model,
    MatrixRegressionInstance,
};
use crate::minimax::{multi_hypothesis_error, sparse_packing_hypotheses, two_point_experiment};
use crate::nonparametric::{
    adaptive_estimator, function_l2_error, projection_estimator, AdaptiveMethod, FourierFunction,
};
use crate::regression::{
    lasso_cd, least_squares, ls_l1_ball, sequence_model_observation, slope_pgd, slope_weights,
    threshold_estimate, ThresholdMode, TuningParameters,
};
use crate::{Error, Result};

/// Experiment family. Selects which estimator registry an estimator name is
/// resolved against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Rates,
    Tails,
    Minimax,
    Pca,
    Ising,
    Glasso,
    Nonparam,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Rates => "rates",
            ExperimentKind::Tails => "tails",
            ExperimentKind::Minimax => "minimax",
            ExperimentKind::Pca => "pca",
            ExperimentKind::Ising => "ising",
            ExperimentKind::Glasso => "glasso",
            ExperimentKind::Nonparam => "nonparam",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: String,
    pub values: Vec<f64>,
}

/// One experiment: an estimator, a swept parameter, fixed parameters, and
/// the Monte Carlo budget.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub estimator: String,
    pub sweep: SweepSpec,
    #[serde(default)]
    pub fixed: BTreeMap<String, f64>,
    pub seeds: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub output_path: String,
    /// Off by default so output files stay byte-identical across runs; when
    /// enabled the per-trial wall time is recorded in the CSV.
    #[serde(default)]
    pub record_timings: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sweep.values.is_empty() {
            return Err(Error::invalid("sweep needs at least one value"));
        }
        if self.sweep.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sweep values must be strictly increasing"));
        }
        if self.seeds < 50 {
            return Err(Error::invalid("need at least 50 seeds"));
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::invalid(format!("bad TOML config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let config: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| Error::invalid(format!("bad JSON config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// Loads TOML (preferred) or JSON depending on the file extension.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(&text),
            _ => Self::from_toml_str(&text),
        }
    }
}

/// Ordinary least squares fit of `log(median error)` against `log(sweep
/// value)`.
#[derive(Debug, Clone, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

/// Fits a line in log-log coordinates. Needs at least three points with
/// positive coordinates.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::invalid("need at least 3 points for a rate fit"));
    }
    if points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return Err(Error::invalid("rate fit needs positive coordinates"));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let n = logs.len() as f64;
    let mean_x = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("sweep values are identical in log scale"));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - mean_y) * (p.1 - mean_y)).sum();
    let ss_res: f64 = logs
        .iter()
        .map(|p| {
            let fitted = intercept + slope * p.0;
            (p.1 - fitted) * (p.1 - fitted)
        })
        .sum();
    // A constant metric fits its own line perfectly.
    let r_squared = if ss_tot <= 1e-300 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        points: points.to_vec(),
    })
}

/// One CSV row of the raw trial table.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRow {
    pub experiment: String,
    pub estimator: String,
    pub sweep_param: String,
    pub sweep_value: f64,
    pub seed: u64,
    pub error: f64,
    pub runtime_ms: u64,
}

/// Result of one experiment run: the raw trial table, per-sweep-value
/// medians, and the log-log fit when it is defined.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub rows: Vec<TrialRow>,
    pub medians: Vec<(f64, f64)>,
    pub rate_fit: Option<RateFit>,
}

fn label_hash(text: &str) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in text.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub(crate) fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Parameter lookup that resolves the swept parameter by name and everything
/// else from the fixed map.
struct Params<'a> {
    sweep_param: &'a str,
    sweep_value: f64,
    fixed: &'a BTreeMap<String, f64>,
}

impl Params<'_> {
    fn get(&self, name: &str) -> Result<f64> {
        if name == self.sweep_param {
            return Ok(self.sweep_value);
        }
        self.fixed
            .get(name)
            .copied()
            .ok_or_else(|| Error::invalid(format!("missing parameter '{name}'")))
    }

    fn get_or(&self, name: &str, default: f64) -> f64 {
        if name == self.sweep_param {
            return self.sweep_value;
        }
        self.fixed.get(name).copied().unwrap_or(default)
    }

    fn count(&self, name: &str) -> Result<usize> {
        let v = self.get(name)?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(Error::invalid(format!(
                "parameter '{name}' must be a count"
            )));
        }
        Ok(v as usize)
    }

    fn count_or(&self, name: &str, default: usize) -> usize {
        self.get_or(name, default as f64) as usize
    }
}

pub(crate) fn gaussian_matrix(n: usize, d: usize, source: RandomSource) -> DenseMatrix {
    let flat = sample_noise(NoiseKind::Gaussian { sigma: 1.0 }, n * d, source)
        .expect("non-negative sigma");
    DenseMatrix::from_vec(n, d, flat).expect("length matches")
}

/// Gaussian rows with covariance `L L^T`.
fn gaussian_rows_with_chol(n: usize, chol_l: &DenseMatrix, source: RandomSource) -> DenseMatrix {
    let d = chol_l.rows();
    let z = gaussian_matrix(n, d, source);
    let mut out = DenseMatrix::zeros(n, d);
    for i in 0..n {
        let zi = z.row(i);
        for a in 0..d {
            let mut acc = 0.0;
            for b in 0..=a {
                acc += chol_l.get(a, b) * zi[b];
            }
            out.set(i, a, acc);
        }
    }
    out
}

/// Chain-coupled interaction matrix used by the Ising experiments.
pub(crate) fn chain_ising_model(d: usize, coupling: f64) -> IsingModel {
    let mut w = DenseMatrix::zeros(d, d);
    for i in 0..d.saturating_sub(1) {
        w.set(i, i + 1, coupling);
        w.set(i + 1, i, coupling);
    }
    IsingModel::new(w, 2.0 * coupling.abs() + 1e-12, coupling.abs()).expect("valid chain")
}

/// Sparse precision matrix with three coupled pairs, used by the glasso
/// experiments; k = 6 nonzero off-diagonal entries.
pub(crate) fn paired_precision_matrix(d: usize, coupling: f64) -> DenseMatrix {
    let mut theta = DenseMatrix::identity(d);
    for pair in 0..3 {
        let (i, j) = (2 * pair, 2 * pair + 1);
        if j < d {
            theta.set(i, j, coupling);
            theta.set(j, i, coupling);
        }
    }
    theta
}

type TrialFn = Arc<dyn Fn(RandomSource) -> Result<f64> + Send + Sync>;

/// Builds the per-trial closure for one sweep value. Shared deterministic
/// context (designs on a fixed grid, ground-truth models) is constructed
/// here, once per sweep value.
fn build_trial(kind: ExperimentKind, estimator: &str, params: &Params) -> Result<TrialFn> {
    match (kind, estimator) {
        (ExperimentKind::Rates, "least_squares") => {
            let n = params.count("n")?;
            let d = params.count("d")?;
            let sigma = params.get_or("sigma", 1.0);
            Ok(Arc::new(move |src| {
                let design = gaussian_matrix(n, d, src.stream(0));
                let truth = sparse_truth(d, d, 1.0, src.stream(1))?;
                let inst = RegressionInstance::synthesize(
                    design,
                    truth,
                    NoiseKind::Gaussian { sigma },
                    src.stream(2),
                )?;
                let report = least_squares(&inst)?;
                Ok(report.predicted_mse.expect("truth is known"))
            }))
        }
        (ExperimentKind::Rates, "lasso") => {
            let n = params.count("n")?;
            let d = params.count("d")?;
            let k = params.count("k")?;
            let sigma = params.get_or("sigma", 1.0);
            let delta = params.get_or("delta", 0.05);
            Ok(Arc::new(move |src| {
                let design = rademacher_design(n, d, src.stream(0));
                let truth = sparse_truth(d, k, 1.0, src.stream(1))?;
                let inst = RegressionInstance::synthesize(
                    design,
                    truth,
                    NoiseKind::Gaussian { sigma },
                    src.stream(2),
                )?;
                let tuning = TuningParameters::lasso_fast(sigma, n, d, delta);
                let report = lasso_cd(&inst, &tuning, 10_000, 1e-8)?;
                Ok(report.predicted_mse.expect("truth is known"))
            }))
        }
        (ExperimentKind::Rates, "l1_ls") => {
            let n = params.count("n")?;
            let d = params.count("d")?;
            let sigma = params.get_or("sigma", 1.0);
            let radius = params.get_or("radius", 1.0);
            let tol = params.get_or("tol", 1e-4);
            Ok(Arc::new(move |src| {
                let design = rademacher_design(n, d, src.stream(0));
                // Dense truth spread over the l1 sphere of the given radius.
                let g = sample_noise(NoiseKind::Gaussian { sigma: 1.0 }, d, src.stream(1))?;
                let scale = radius / norm1(&g);
                let truth: Vec<f64> = g.iter().map(|v| v * scale).collect();
                let inst = RegressionInstance::synthesize(
                    design,
                    truth,
                    NoiseKind::Gaussian { sigma },
                    src.stream(2),
                )?;
                let report = ls_l1_ball(&inst, radius, 50_000, tol)?;
                Ok(report.predicted_mse.expect("truth is known"))
            }))
        }
        (ExperimentKind::Rates, "hard_threshold_support") => {
            let n = params.count("n")?;
            let d = params.count("d")?;
            let k = params.count("k")?;
            let sigma = params.get_or("sigma", 1.0);
            let delta = params.get_or("delta", 0.05);
            Ok(Arc::new(move |src| {
                let tuning = TuningParameters::sequence_threshold(sigma, n, d, delta);
                let truth = sparse_truth(d, k, 3.0 * tuning.tau * 1.01, src.stream(0))?;
                let y = sequence_model_observation(&truth, sigma, n, src.stream(1));
                let est = threshold_estimate(&y, tuning.tau, ThresholdMode::Hard)?;
                let exact = est
                    .iter()
                    .zip(&truth)
                    .all(|(a, b)| (*a != 0.0) == (*b != 0.0));
                Ok(if exact { 0.0 } else { 1.0 })
            }))
        }
        (ExperimentKind::Rates, "slope_oracle_gap") => {
            let n = params.count("n")?;
            let d = params.count("d")?;
            let k = params.count_or("k", 2);
            let sigma = params.get_or("sigma", 0.5);
            let tau = params.get_or("tau", 0.2);
            Ok(Arc::new(move |src| {
                let design = gaussian_matrix(n, d, src.stream(0));
                let truth = sparse_truth(d, k, 1.0, src.stream(1))?;
                let inst = RegressionInstance::synthesize(
                    design,
                    truth,
                    NoiseKind::Gaussian { sigma },
                    src.stream(2),
                )?;
                let weights = slope_weights(d);
                let report = slope_pgd(&inst, tau, &weights, 200_000, 1e-12)?;
                let oracle = oracles::slope_exhaustive_objective(&inst, tau, &weights)?;
                Ok((report.objective_value - oracle).abs())
            }))
        }
        (ExperimentKind::Rates, "svt") | (ExperimentKind::Rates, "rank_penalized") => {
            let n = params.count("n")?;
            let d = params.count("d")?;
            let t_cols = params.count("t")?;
            let rank = params.count("rank")?;
            let sigma = params.get_or("sigma", 1.0);
            let delta = params.get_or("delta", 0.1);
            let design = Arc::new(regular_trig_design(n, d)?);
            let use_svt = estimator == "svt";
            Ok(Arc::new(move |src| {
                let left = gaussian_matrix(d, rank, src.stream(0));
                let right = gaussian_matrix(rank, t_cols, src.stream(1));
                let truth = left.matmul(&right);
                let noise = gaussian_matrix(n, t_cols, src.stream(2)).scaled(sigma);
                let response = design.matmul(&truth).add(&noise);
                let inst = MatrixRegressionInstance::new(
                    design.as_ref().clone(),
                    response,
                    Some(truth.clone()),
                    sigma,
                )?;
                let two_tau = svt_threshold(sigma, n, d, t_cols, delta)?;
                if use_svt {
                    let y = to_sequence_model(&inst)?;
                    let estimate = svt(&y, two_tau)?;
                    Ok(estimate.sub(&truth).frobenius_norm().powi(2))
                } else {
                    let tau = two_tau / 2.0;
                    let fit = rank_penalized(&inst, tau * tau)?;
                    let target = inst.design.matmul(&truth);
                    Ok(fit.fitted.sub(&target).frobenius_norm().powi(2) / n as f64)
                }
            }))
        }
        (ExperimentKind::Rates, "constant_error") => {
            let value = params.get_or("value", 1.0);
            Ok(Arc::new(move |_| Ok(value)))
        }
        (ExperimentKind::Nonparam, "projection")
        | (ExperimentKind::Nonparam, "adaptive_bic")
        | (ExperimentKind::Nonparam, "adaptive_lasso") => {
            let n = params.count("n")?;
            let beta = params.get("beta")?;
            let sigma = params.get_or("sigma", 1.0);
            let q_budget = params.get_or("q", 1.0);
            let n_coeffs = params.count_or("n_coeffs", 512).min(n - 1);
            let delta = params.get_or("delta", 0.1);
            let design = Arc::new(regular_trig_design(n, n_coeffs)?);
            let which = estimator.to_string();
            Ok(Arc::new(move |src| {
                let truth = sobolev_truth(beta, q_budget, n_coeffs, src.stream(0))?;
                let noise = sample_noise(NoiseKind::Gaussian { sigma }, n, src.stream(1))?;
                let mut y = design.matvec(&truth);
                for (yi, e) in y.iter_mut().zip(&noise) {
                    *yi += e;
                }
                let est = match which.as_str() {
                    "projection" => projection_estimator(&y, beta)?,
                    "adaptive_bic" => adaptive_estimator(
                        &y,
                        AdaptiveMethod::Bic,
                        &TuningParameters::bic(sigma, n, n - 1),
                    )?,
                    _ => adaptive_estimator(
                        &y,
                        AdaptiveMethod::Lasso,
                        &TuningParameters::lasso_slow(sigma, n, n - 1, delta),
                    )?,
                };
                Ok(function_l2_error(&est, &FourierFunction::new(truth)))
            }))
        }
        (ExperimentKind::Minimax, "two_point") => {
            let alpha = params.get("alpha")?;
            let sigma = params.get_or("sigma", 1.0);
            let n = params.count_or("n", 25);
            let trials = params.count_or("trials", 2000);
            Ok(Arc::new(move |src| {
                let sep = (8.0 * alpha * alpha * sigma * sigma / n as f64).sqrt();
                let theta0 = vec![0.0, 0.0];
                let theta1 = vec![sep, 0.0];
                let report = two_point_experiment(&theta0, &theta1, sigma, n, trials, src)?;
                Ok(report.empirical_error_max)
            }))
        }
        (ExperimentKind::Minimax, "fano") => {
            let alpha = params.get("alpha")?;
            let sigma = params.get_or("sigma", 1.0);
            let n = params.count_or("n", 50);
            let d = params.count_or("d", 64);
            let k = params.count_or("k", 8);
            let trials = params.count_or("trials", 1000);
            Ok(Arc::new(move |src| {
                let beta = (alpha / 8.0).sqrt();
                let packing = sparse_packing_hypotheses(d, k, sigma, n, beta, src.stream(0))?;
                multi_hypothesis_error(&packing.hypotheses, sigma, n, trials, src.stream(1))
            }))
        }
        (ExperimentKind::Pca, "sparse_pca") => {
            let n = params.count("n")?;
            let d = params.count("d")?;
            let k = params.count("k")?;
            let theta = params.get_or("theta", 1.0);
            Ok(Arc::new(move |src| {
                let raw = sparse_truth(d, k, 1.0, src.stream(0))?;
                let norm = crate::linalg::norm2(&raw);
                let v: Vec<f64> = raw.iter().map(|x| x / norm).collect();
                let samples = spiked_covariance_sample(n, d, theta, &v, src.stream(1))?;
                let cov = empirical_covariance(&samples)?;
                let estimate = sparse_pca(&cov, k, 20)?;
                Ok(sign_aligned_distance(&estimate, &v))
            }))
        }
        (ExperimentKind::Glasso, "graphical_lasso") => {
            let n = params.count("n")?;
            let d = params.count_or("d", 10);
            let coupling = params.get_or("coupling", 0.3);
            let c = params.get_or("c", 2.0);
            let theta_star = Arc::new(paired_precision_matrix(d, coupling));
            let sigma_star = crate::linalg::spd_inverse(&theta_star)
                .ok_or_else(|| Error::invalid("precision matrix is not PD"))?;
            let chol_l =
                Arc::new(cholesky(&sigma_star).ok_or_else(|| Error::invalid("covariance not PD"))?);
            Ok(Arc::new(move |src| {
                let samples = gaussian_rows_with_chol(n, &chol_l, src.stream(0));
                let cov = empirical_covariance(&samples)?;
                let lambda = c * ((d as f64).ln() / n as f64).sqrt();
                let fit = graphical_lasso(&cov, lambda, 3000, 1e-10)?;
                Ok(fit.theta.sub(&theta_star).frobenius_norm().powi(2))
            }))
        }
        (ExperimentKind::Ising, "pseudo_likelihood") => {
            let n = params.count("n")?;
            let d = params.count_or("d", 8);
            let coupling = params.get_or("coupling", 0.2);
            let model = Arc::new(chain_ising_model(d, coupling));
            Ok(Arc::new(move |src| {
                let samples = ising_exact_sample(&model, n, src.stream(0))?;
                let lambda = model.lambda_budget;
                let fitted = ising_fit(&samples, lambda, 3000, 1e-9)?;
                let err = fitted.w.sub(&model.w).max_abs();
                Ok(err * err)
            }))
        }
        _ => Err(Error::invalid(format!(
            "unknown estimator '{}' for experiment '{}'",
            estimator,
            kind.name()
        ))),
    }
}

/// Names of the (experiment, estimator) pairs the runner understands.
pub fn known_estimators() -> Vec<(&'static str, &'static str)> {
    vec![
        ("rates", "least_squares"),
        ("rates", "lasso"),
        ("rates", "l1_ls"),
        ("rates", "hard_threshold_support"),
        ("rates", "slope_oracle_gap"),
        ("rates", "svt"),
        ("rates", "rank_penalized"),
        ("rates", "constant_error"),
        ("tails", "gaussian"),
        ("tails", "rademacher"),
        ("tails", "uniform"),
        ("tails", "all"),
        ("tails", "matrix_bernstein"),
        ("nonparam", "projection"),
        ("nonparam", "adaptive_bic"),
        ("nonparam", "adaptive_lasso"),
        ("minimax", "two_point"),
        ("minimax", "fano"),
        ("pca", "sparse_pca"),
        ("glasso", "graphical_lasso"),
        ("ising", "pseudo_likelihood"),
    ]
}

/// Tail-domination statistic for the `tails` experiment family.
pub fn tail_statistic_comparison(
    estimator: &str,
    n: usize,
    sigma: f64,
    t_grid: &[f64],
    trials: usize,
    source: RandomSource,
) -> Result<TailComparison> {
    match estimator {
        "gaussian" | "rademacher" | "uniform" => {
            let kind = NoiseKind::from_name(estimator, sigma)?;
            let ranges = vec![(-sigma, sigma); n];
            empirical_exceedance(
                move |src| {
                    let draws = sample_noise(kind, n, src).expect("valid noise kind");
                    draws.iter().sum::<f64>() / n as f64
                },
                t_grid,
                trials,
                source,
                |t| hoeffding_bound(n, &ranges, t).expect("valid ranges"),
            )
        }
        "matrix_bernstein" => {
            let d = 8usize;
            let summands = n;
            let variance = summands as f64;
            empirical_exceedance(
                move |src| {
                    let mut rng = src.rng();
                    let mut diag = vec![0.0f64; d];
                    for _ in 0..summands {
                        for slot in diag.iter_mut() {
                            *slot += if rand::Rng::random::<bool>(&mut rng) {
                                1.0
                            } else {
                                -1.0
                            };
                        }
                    }
                    let (eigs, _) = symmetric_eigen(&DenseMatrix::diagonal(&diag))
                        .expect("diagonal is symmetric");
                    eigs[0]
                },
                t_grid,
                trials,
                source,
                move |t| {
                    crate::concentration::matrix_bernstein_bound(
                        d,
                        variance,
                        1.0,
                        t,
                        crate::concentration::MatrixBernsteinForm::Bernstein,
                    )
                    .expect("valid parameters")
                    .min(1.0)
                },
            )
        }
        other => Err(Error::invalid(format!("unknown tail statistic '{other}'"))),
    }
}

fn run_tails(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let n = config.fixed.get("n").copied().unwrap_or(50.0) as usize;
    let sigma = config.fixed.get("sigma").copied().unwrap_or(1.0);
    let estimators: Vec<String> = if config.estimator == "all" {
        vec!["gaussian".into(), "rademacher".into(), "uniform".into()]
    } else {
        vec![config.estimator.clone()]
    };
    let base = RandomSource::new(config.master_seed);
    let mut rows = Vec::new();
    for est in &estimators {
        let source = base.stream(label_hash(&format!("tails/{est}")));
        let comparison =
            tail_statistic_comparison(est, n, sigma, &config.sweep.values, config.seeds, source)?;
        for (idx, &t) in comparison.t_grid.iter().enumerate() {
            rows.push(TrialRow {
                experiment: "tails".into(),
                estimator: est.clone(),
                sweep_param: config.sweep.parameter.clone(),
                sweep_value: t,
                seed: 0,
                error: comparison.empirical_freq[idx],
                runtime_ms: 0,
            });
        }
    }
    Ok(ExperimentOutcome {
        rows,
        medians: Vec::new(),
        rate_fit: None,
    })
}

/// Runs the configured sweep: `seeds` trials per sweep value on streams
/// `(value index, trial index)`, collecting the error metric per trial,
/// per-value medians, and a log-log fit when three or more positive medians
/// exist. A failing trial records a NaN error and the run continues.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    if config.experiment == ExperimentKind::Tails {
        return run_tails(config);
    }
    let base = RandomSource::new(config.master_seed).stream(label_hash(&format!(
        "{}/{}",
        config.experiment.name(),
        config.estimator
    )));
    let mut rows = Vec::with_capacity(config.seeds * config.sweep.values.len());
    let mut medians = Vec::with_capacity(config.sweep.values.len());
    for (value_index, &value) in config.sweep.values.iter().enumerate() {
        let params = Params {
            sweep_param: &config.sweep.parameter,
            sweep_value: value,
            fixed: &config.fixed,
        };
        let trial = build_trial(config.experiment, &config.estimator, &params)?;
        let value_source = base.stream(value_index as u64);
        let record_timings = config.record_timings;
        let results: Vec<(f64, u64)> = (0..config.seeds)
            .into_par_iter()
            .map(|seed| {
                let started = Instant::now();
                let error = trial(value_source.stream(seed as u64)).unwrap_or(f64::NAN);
                let elapsed = if record_timings {
                    started.elapsed().as_millis() as u64
                } else {
                    0
                };
                (error, elapsed)
            })
            .collect();
        let mut ok: Vec<f64> = results
            .iter()
            .map(|r| r.0)
            .filter(|e| e.is_finite())
            .collect();
        medians.push((value, median(&mut ok)));
        for (seed, (error, runtime_ms)) in results.into_iter().enumerate() {
            rows.push(TrialRow {
                experiment: config.experiment.name().into(),
                estimator: config.estimator.clone(),
                sweep_param: config.sweep.parameter.clone(),
                sweep_value: value,
                seed: seed as u64,
                error,
                runtime_ms,
            });
        }
    }
    let rate_fit = if medians.len() >= 3 && medians.iter().all(|&(x, y)| x > 0.0 && y > 0.0) {
        fit_loglog_slope(&medians).ok()
    } else {
        None
    };
    Ok(ExperimentOutcome {
        rows,
        medians,
        rate_fit,
    })
}

/// Writes the raw trial table with the fixed header
/// `experiment,estimator,sweep_param,sweep_value,seed,error,runtime_ms`.
pub fn emit_csv(rows: &[TrialRow], path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(
        file,
        "experiment,estimator,sweep_param,sweep_value,seed,error,runtime_ms"
    )?;
    for row in rows {
        writeln!(
            file,
            "{},{},{},{},{},{},{}",
            row.experiment,
            row.estimator,
            row.sweep_param,
            row.sweep_value,
            row.seed,
            row.error,
            row.runtime_ms
        )?;
    }
    file.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonSummary<'a> {
    config: &'a ExperimentConfig,
    rate_fit: &'a Option<RateFit>,
    medians: &'a [(f64, f64)],
    library_version: &'static str,
}

/// Writes the JSON summary embedding the config, the rate fit, and the
/// library version.
pub fn emit_json(
    config: &ExperimentConfig,
    outcome: &ExperimentOutcome,
    path: &Path,
) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let summary = JsonSummary {
        config,
        rate_fit: &outcome.rate_fit,
        medians: &outcome.medians,
        library_version: env!("CARGO_PKG_VERSION"),
    };
    let text = serde_json::to_string_pretty(&summary)
        .map_err(|e| Error::Internal(format!("json serialization failed: {e}")))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

/// Runs a config and writes `<output_path>.csv` and `<output_path>.json`.
pub fn run_and_emit(
    config: &ExperimentConfig,
    out_override: Option<&str>,
) -> Result<ExperimentOutcome> {
    let outcome = run_experiment(config)?;
    let base = out_override.unwrap_or(&config.output_path);
    if !base.is_empty() {
        emit_csv(&outcome.rows, Path::new(&format!("{base}.csv")))?;
        emit_json(config, &outcome, Path::new(&format!("{base}.json")))?;
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loglog_fit_examples() {
        let quad: Vec<(f64, f64)> = (1..=5).map(|i| (i as f64, (i * i) as f64)).collect();
        let fit = fit_loglog_slope(&quad).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);

        let constant: Vec<(f64, f64)> = (1..=4).map(|i| (i as f64, 7.0)).collect();
        let flat = fit_loglog_slope(&constant).unwrap();
        assert!(flat.slope.abs() < 1e-12);
        assert!((flat.r_squared - 1.0).abs() < 1e-12);

        let inverse: Vec<(f64, f64)> = (1..=6).map(|i| (i as f64, 3.0 / i as f64)).collect();
        let inv = fit_loglog_slope(&inverse).unwrap();
        assert!((inv.slope + 1.0).abs() < 1e-12);
        assert!((inv.intercept - 3f64.ln()).abs() < 1e-12);

        assert!(fit_loglog_slope(&quad[..2]).is_err());
        assert!(fit_loglog_slope(&[(1.0, 1.0), (2.0, -1.0), (3.0, 1.0)]).is_err());
    }

    #[test]
    fn config_validation() {
        let text = r#"
experiment = "rates"
estimator = "constant_error"
seeds = 50
master_seed = 1
output_path = ""

[sweep]
parameter = "n"
values = [10.0, 20.0, 30.0]

[fixed]
value = 2.0
"#;
        let config = ExperimentConfig::from_toml_str(text).unwrap();
        assert_eq!(config.experiment, ExperimentKind::Rates);

        let bad_sweep = text.replace("[10.0, 20.0, 30.0]", "[10.0, 10.0]");
        assert!(ExperimentConfig::from_toml_str(&bad_sweep).is_err());
        let bad_seeds = text.replace("seeds = 50", "seeds = 10");
        assert!(ExperimentConfig::from_toml_str(&bad_seeds).is_err());

        let json = serde_json::json!({
            "experiment": "rates",
            "estimator": "constant_error",
            "seeds": 60,
            "master_seed": 3,
            "sweep": {"parameter": "n", "values": [1.0, 2.0, 4.0]},
            "fixed": {"value": 1.5},
        });
        let from_json = ExperimentConfig::from_json_str(&json.to_string()).unwrap();
        assert_eq!(from_json.seeds, 60);
    }

    #[test]
    fn constant_experiment_is_flat_and_deterministic() {
        let config = ExperimentConfig {
            experiment: ExperimentKind::Rates,
            estimator: "constant_error".into(),
            sweep: SweepSpec {
                parameter: "n".into(),
                values: vec![1.0, 2.0, 4.0],
            },
            fixed: BTreeMap::from([("value".to_string(), 2.5)]),
            seeds: 50,
            master_seed: 9,
            output_path: String::new(),
            record_timings: false,
        };
        let outcome = run_experiment(&config).unwrap();
        assert_eq!(outcome.rows.len(), 150);
        let fit = outcome.rate_fit.unwrap();
        assert!(fit.slope.abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);

        let again = run_experiment(&config).unwrap();
        for (a, b) in outcome.rows.iter().zip(&again.rows) {
            assert_eq!(a.error.to_bits(), b.error.to_bits());
        }
    }

    #[test]
    fn unknown_estimator_is_invalid_input() {
        let config = ExperimentConfig {
            experiment: ExperimentKind::Rates,
            estimator: "nope".into(),
            sweep: SweepSpec {
                parameter: "n".into(),
                values: vec![1.0, 2.0, 3.0],
            },
            fixed: BTreeMap::new(),
            seeds: 50,
            master_seed: 1,
            output_path: String::new(),
            record_timings: false,
        };
        assert!(matches!(
            run_experiment(&config),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn failing_trials_record_nan_and_the_run_continues() {
        // Sweeping k past d makes the k = 128 trials fail while the rest of
        // the sweep still produces medians.
        let config = ExperimentConfig {
            experiment: ExperimentKind::Rates,
            estimator: "lasso".into(),
            sweep: SweepSpec {
                parameter: "k".into(),
                values: vec![2.0, 4.0, 128.0],
            },
            fixed: BTreeMap::from([
                ("n".to_string(), 64.0),
                ("d".to_string(), 16.0),
                ("sigma".to_string(), 1.0),
                ("delta".to_string(), 0.05),
            ]),
            seeds: 50,
            master_seed: 21,
            output_path: String::new(),
            record_timings: false,
        };
        let outcome = run_experiment(&config).unwrap();
        assert_eq!(outcome.rows.len(), 150);
        let bad_rows: Vec<_> = outcome
            .rows
            .iter()
            .filter(|r| r.sweep_value == 128.0)
            .collect();
        assert!(bad_rows.iter().all(|r| r.error.is_nan()));
        assert!(outcome.medians[0].1.is_finite());
        assert!(outcome.medians[1].1.is_finite());
        assert!(outcome.rate_fit.is_none());
    }

    #[test]
    fn csv_and_json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let config = ExperimentConfig {
            experiment: ExperimentKind::Rates,
            estimator: "constant_error".into(),
            sweep: SweepSpec {
                parameter: "n".into(),
                values: vec![1.0, 2.0, 4.0],
            },
            fixed: BTreeMap::from([("value".to_string(), 1.0)]),
            seeds: 50,
            master_seed: 4,
            output_path: dir.path().join("out").to_string_lossy().into_owned(),
            record_timings: false,
        };
        let outcome = run_and_emit(&config, None).unwrap();
        let csv_path = dir.path().join("out.csv");
        let text = std::fs::read_to_string(&csv_path).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "experiment,estimator,sweep_param,sweep_value,seed,error,runtime_ms"
        );
        assert_eq!(text.lines().count(), 1 + outcome.rows.len());
        // Parse back and compare a row.
        let first = text.lines().nth(1).unwrap();
        let cells: Vec<&str> = first.split(',').collect();
        assert_eq!(cells[0], "rates");
        assert_eq!(cells[1], "constant_error");
        assert_eq!(cells[4], "0");
        assert_eq!(cells[5].parse::<f64>().unwrap(), 1.0);

        // Byte-identical on re-run.
        run_and_emit(&config, None).unwrap();
        let text2 = std::fs::read_to_string(&csv_path).unwrap();
        assert_eq!(text, text2);

        let json_text = std::fs::read_to_string(dir.path().join("out.json")).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&json_text).unwrap();
        assert_eq!(parsed["config"]["estimator"], "constant_error");
        assert!(parsed["library_version"].is_string());

        // Empty table still writes the header.
        let empty: Vec<TrialRow> = Vec::new();
        let empty_path = dir.path().join("empty.csv");
        emit_csv(&empty, &empty_path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&empty_path).unwrap(),
            "experiment,estimator,sweep_param,sweep_value,seed,error,runtime_ms\n"
        );
    }

    #[test]
    fn determinism_across_thread_counts() {
        let config = ExperimentConfig {
            experiment: ExperimentKind::Rates,
            estimator: "least_squares".into(),
            sweep: SweepSpec {
                parameter: "n".into(),
                values: vec![16.0, 32.0, 64.0],
            },
            fixed: BTreeMap::from([("d".to_string(), 4.0), ("sigma".to_string(), 1.0)]),
            seeds: 50,
            master_seed: 11,
            output_path: String::new(),
            record_timings: false,
        };
        let pool1 = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let a = pool1.install(|| run_experiment(&config)).unwrap();
        let b = pool4.install(|| run_experiment(&config)).unwrap();
        assert_eq!(a.rows.len(), b.rows.len());
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.error.to_bits(), y.error.to_bits());
            assert_eq!(x.seed, y.seed);
        }
    }
}
