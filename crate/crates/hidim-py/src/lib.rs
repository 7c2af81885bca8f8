//! Thin Python bindings over the hidim estimators, bounds, and
//! constructions. Matrices cross the boundary as nested lists of floats.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use hidim::concentration;
use hidim::datagen::{RandomSource, RegressionInstance};
use hidim::graphical;
use hidim::harness;
use hidim::linalg::{self, DenseMatrix};
use hidim::matrix_estimation;
use hidim::minimax;
use hidim::regression::{self, ThresholdMode, TuningParameters};

fn to_py_err(e: hidim::Error) -> PyErr {
    match e {
        hidim::Error::InvalidInput(msg) => PyValueError::new_err(msg),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn matrix_from(rows: Vec<Vec<f64>>) -> PyResult<DenseMatrix> {
    DenseMatrix::from_rows(&rows).map_err(to_py_err)
}

fn matrix_to(m: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

/// Singular value decomposition; returns (u, singular_values, v).
#[pyfunction]
fn svd(matrix: Vec<Vec<f64>>) -> PyResult<(Vec<Vec<f64>>, Vec<f64>, Vec<Vec<f64>>)> {
    let f = linalg::svd(&matrix_from(matrix)?).map_err(to_py_err)?;
    Ok((matrix_to(&f.u), f.singular_values.clone(), matrix_to(&f.v)))
}

#[pyfunction]
fn operator_norm(matrix: Vec<Vec<f64>>) -> PyResult<f64> {
    linalg::operator_norm(&matrix_from(matrix)?).map_err(to_py_err)
}

#[pyfunction]
fn schatten_norm(matrix: Vec<Vec<f64>>, q: f64) -> PyResult<f64> {
    linalg::schatten_norm(&matrix_from(matrix)?, q).map_err(to_py_err)
}

#[pyfunction]
fn truncate_svd(matrix: Vec<Vec<f64>>, k: usize) -> PyResult<Vec<Vec<f64>>> {
    Ok(matrix_to(
        &linalg::truncate_svd(&matrix_from(matrix)?, k).map_err(to_py_err)?,
    ))
}

/// Singular value thresholding at level two_tau.
#[pyfunction]
fn svt(matrix: Vec<Vec<f64>>, two_tau: f64) -> PyResult<Vec<Vec<f64>>> {
    Ok(matrix_to(
        &matrix_estimation::svt(&matrix_from(matrix)?, two_tau).map_err(to_py_err)?,
    ))
}

#[pyfunction]
fn svt_threshold(sigma: f64, n: usize, d: usize, t: usize, delta: f64) -> PyResult<f64> {
    matrix_estimation::svt_threshold(sigma, n, d, t, delta).map_err(to_py_err)
}

#[pyfunction]
fn least_squares(design: Vec<Vec<f64>>, response: Vec<f64>) -> PyResult<Vec<f64>> {
    let inst =
        RegressionInstance::new(matrix_from(design)?, response, None, 0.0).map_err(to_py_err)?;
    Ok(regression::least_squares(&inst)
        .map_err(to_py_err)?
        .estimate)
}

/// Lasso estimate for the objective |Y - X theta|^2/n + 2 tau |theta|_1.
#[pyfunction]
fn lasso(design: Vec<Vec<f64>>, response: Vec<f64>, tau: f64) -> PyResult<Vec<f64>> {
    let inst =
        RegressionInstance::new(matrix_from(design)?, response, None, 0.0).map_err(to_py_err)?;
    let tuning = TuningParameters::manual(tau, 0.0, 0.0);
    Ok(regression::lasso_cd(&inst, &tuning, 100_000, 1e-10)
        .map_err(to_py_err)?
        .estimate)
}

/// SLOPE estimate with the default sqrt(log(2d/j)) weight sequence.
#[pyfunction]
fn slope(design: Vec<Vec<f64>>, response: Vec<f64>, tau: f64) -> PyResult<Vec<f64>> {
    let design = matrix_from(design)?;
    let weights = regression::slope_weights(design.cols());
    let inst = RegressionInstance::new(design, response, None, 0.0).map_err(to_py_err)?;
    Ok(regression::slope_pgd(&inst, tau, &weights, 200_000, 1e-12)
        .map_err(to_py_err)?
        .estimate)
}

#[pyfunction]
fn ridge(design: Vec<Vec<f64>>, response: Vec<f64>, tau: f64) -> PyResult<Vec<f64>> {
    let inst =
        RegressionInstance::new(matrix_from(design)?, response, None, 0.0).map_err(to_py_err)?;
    Ok(regression::ridge(&inst, tau).map_err(to_py_err)?.estimate)
}

/// Coordinatewise thresholding at level 2*tau; mode is "hard" or "soft".
#[pyfunction]
fn threshold_estimate(y: Vec<f64>, tau: f64, mode: &str) -> PyResult<Vec<f64>> {
    let mode = match mode {
        "hard" => ThresholdMode::Hard,
        "soft" => ThresholdMode::Soft,
        other => return Err(PyValueError::new_err(format!("unknown mode '{other}'"))),
    };
    regression::threshold_estimate(&y, tau, mode).map_err(to_py_err)
}

#[pyfunction]
fn prox_sorted_l1(v: Vec<f64>, weights: Vec<f64>) -> PyResult<Vec<f64>> {
    regression::prox_sorted_l1(&v, &weights).map_err(to_py_err)
}

#[pyfunction]
fn slope_weights(d: usize) -> Vec<f64> {
    regression::slope_weights(d)
}

#[pyfunction]
fn incoherence(design: Vec<Vec<f64>>) -> PyResult<f64> {
    Ok(regression::incoherence(&matrix_from(design)?))
}

#[pyfunction]
fn hoeffding_bound(n: usize, ranges: Vec<(f64, f64)>, t: f64) -> PyResult<f64> {
    concentration::hoeffding_bound(n, &ranges, t).map_err(to_py_err)
}

#[pyfunction]
fn bernstein_bound(n: usize, lambda: f64, t: f64) -> PyResult<f64> {
    concentration::bernstein_bound(n, lambda, t).map_err(to_py_err)
}

#[pyfunction]
fn chi2_upper_quantile(n: usize, delta: f64) -> PyResult<f64> {
    concentration::chi2_upper_quantile(n, delta).map_err(to_py_err)
}

#[pyfunction]
fn max_subgaussian_bound(n_vars: usize, sigma: f64, absolute: bool) -> f64 {
    concentration::max_subgaussian_bound(n_vars, sigma, absolute)
}

/// Matrix Bernstein tail bound; form is "bennett", "bernstein", or "split".
#[pyfunction]
fn matrix_bernstein_bound(
    d: usize,
    variance: f64,
    r_bound: f64,
    t: f64,
    form: &str,
) -> PyResult<f64> {
    let form = concentration::MatrixBernsteinForm::from_name(form).map_err(to_py_err)?;
    concentration::matrix_bernstein_bound(d, variance, r_bound, t, form).map_err(to_py_err)
}

#[pyfunction]
fn median_of_means(samples: Vec<f64>, groups: usize) -> PyResult<f64> {
    concentration::median_of_means(&samples, groups).map_err(to_py_err)
}

#[pyfunction]
fn epsilon_net_ball(
    dim: usize,
    eps: f64,
    sample_budget: usize,
    seed: u64,
) -> PyResult<Vec<Vec<f64>>> {
    concentration::epsilon_net_ball(dim, eps, sample_budget, RandomSource::new(seed))
        .map_err(to_py_err)
}

#[pyfunction]
fn kl_gaussians(theta0: Vec<f64>, theta1: Vec<f64>, sigma_sq: f64) -> PyResult<f64> {
    minimax::kl_gaussians(&theta0, &theta1, sigma_sq).map_err(to_py_err)
}

/// f-divergence between discrete distributions; kind is "kl", "tv", "chi2".
#[pyfunction]
fn f_divergence(p: Vec<f64>, q: Vec<f64>, kind: &str) -> PyResult<f64> {
    let kind = match kind {
        "kl" => minimax::DivergenceKind::Kl,
        "tv" => minimax::DivergenceKind::Tv,
        "chi2" => minimax::DivergenceKind::Chi2,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown divergence '{other}'"
            )))
        }
    };
    let p = minimax::DiscreteDistribution::new(p).map_err(to_py_err)?;
    let q = minimax::DiscreteDistribution::new(q).map_err(to_py_err)?;
    minimax::f_divergence(&p, &q, kind).map_err(to_py_err)
}

#[pyfunction]
fn fano_lower_bound(m: usize, avg_kl: f64) -> PyResult<f64> {
    minimax::fano_lower_bound(m, avg_kl).map_err(to_py_err)
}

/// Varshamov-Gilbert code; returns (codewords, certified_min_distance).
#[pyfunction]
fn varshamov_gilbert(d: usize, gamma: f64, seed: u64) -> PyResult<(Vec<Vec<u8>>, usize)> {
    let code =
        minimax::varshamov_gilbert(d, gamma, RandomSource::new(seed), 1000).map_err(to_py_err)?;
    Ok((code.codewords, code.min_distance))
}

#[pyfunction]
fn sparse_varshamov_gilbert(d: usize, k: usize, seed: u64) -> PyResult<(Vec<Vec<u8>>, usize)> {
    let code = minimax::sparse_varshamov_gilbert(d, k, RandomSource::new(seed), 1000)
        .map_err(to_py_err)?;
    Ok((code.codewords, code.min_distance))
}

#[pyfunction]
fn empirical_covariance(samples: Vec<Vec<f64>>) -> PyResult<Vec<Vec<f64>>> {
    Ok(matrix_to(
        &matrix_estimation::empirical_covariance(&matrix_from(samples)?).map_err(to_py_err)?,
    ))
}

/// Leading eigenpair of a symmetric matrix: (vector, value, spectral_gap).
#[pyfunction]
fn pca_leading(sigma_hat: Vec<Vec<f64>>) -> PyResult<(Vec<f64>, f64, f64)> {
    let lead = matrix_estimation::pca_leading(&matrix_from(sigma_hat)?).map_err(to_py_err)?;
    Ok((lead.vector, lead.value, lead.gap))
}

#[pyfunction]
fn sparse_pca(sigma_hat: Vec<Vec<f64>>, k: usize) -> PyResult<Vec<f64>> {
    matrix_estimation::sparse_pca(&matrix_from(sigma_hat)?, k, 20).map_err(to_py_err)
}

/// Graphical lasso estimate of the precision matrix.
#[pyfunction]
fn graphical_lasso(sigma_hat: Vec<Vec<f64>>, lambda: f64) -> PyResult<Vec<Vec<f64>>> {
    let fit = graphical::graphical_lasso(&matrix_from(sigma_hat)?, lambda, 3000, 1e-10)
        .map_err(to_py_err)?;
    Ok(matrix_to(&fit.theta))
}

/// Exact iid samples (+1/-1 entries) from the pairwise binary model with
/// interaction matrix w (d <= 16).
#[pyfunction]
fn ising_sample(w: Vec<Vec<f64>>, n_samples: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
    let w = matrix_from(w)?;
    let budget = (0..w.rows())
        .map(|i| w.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let model = graphical::IsingModel::new(w, budget + 1e-9, budget).map_err(to_py_err)?;
    let samples = graphical::ising_exact_sample(&model, n_samples, RandomSource::new(seed))
        .map_err(to_py_err)?;
    Ok(matrix_to(&samples))
}

/// Row-by-row pseudo-likelihood fit of the interaction matrix.
#[pyfunction]
fn ising_fit(samples: Vec<Vec<f64>>, lambda: f64) -> PyResult<Vec<Vec<f64>>> {
    let model =
        graphical::ising_fit(&matrix_from(samples)?, lambda, 3000, 1e-8).map_err(to_py_err)?;
    Ok(matrix_to(&model.w))
}

/// OLS in log-log coordinates; returns (slope, intercept, r_squared).
#[pyfunction]
fn fit_loglog_slope(points: Vec<(f64, f64)>) -> PyResult<(f64, f64, f64)> {
    let fit = harness::fit_loglog_slope(&points).map_err(to_py_err)?;
    Ok((fit.slope, fit.intercept, fit.r_squared))
}

/// Runs an experiment config given as a TOML string; returns the list of
/// (sweep_value, median_error) pairs and the fitted log-log slope if any.
#[pyfunction]
fn run_experiment_toml(text: &str) -> PyResult<(Vec<(f64, f64)>, Option<f64>)> {
    let config = harness::ExperimentConfig::from_toml_str(text).map_err(to_py_err)?;
    let outcome = harness::run_experiment(&config).map_err(to_py_err)?;
    Ok((outcome.medians, outcome.rate_fit.as_ref().map(|f| f.slope)))
}

#[pymodule]
fn hidim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(svd, m)?)?;
    m.add_function(wrap_pyfunction!(operator_norm, m)?)?;
    m.add_function(wrap_pyfunction!(schatten_norm, m)?)?;
    m.add_function(wrap_pyfunction!(truncate_svd, m)?)?;
    m.add_function(wrap_pyfunction!(svt, m)?)?;
    m.add_function(wrap_pyfunction!(svt_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(least_squares, m)?)?;
    m.add_function(wrap_pyfunction!(lasso, m)?)?;
    m.add_function(wrap_pyfunction!(slope, m)?)?;
    m.add_function(wrap_pyfunction!(ridge, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(prox_sorted_l1, m)?)?;
    m.add_function(wrap_pyfunction!(slope_weights, m)?)?;
    m.add_function(wrap_pyfunction!(incoherence, m)?)?;
    m.add_function(wrap_pyfunction!(hoeffding_bound, m)?)?;
    m.add_function(wrap_pyfunction!(bernstein_bound, m)?)?;
    m.add_function(wrap_pyfunction!(chi2_upper_quantile, m)?)?;
    m.add_function(wrap_pyfunction!(max_subgaussian_bound, m)?)?;
    m.add_function(wrap_pyfunction!(matrix_bernstein_bound, m)?)?;
    m.add_function(wrap_pyfunction!(median_of_means, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_net_ball, m)?)?;
    m.add_function(wrap_pyfunction!(kl_gaussians, m)?)?;
    m.add_function(wrap_pyfunction!(f_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(fano_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(varshamov_gilbert, m)?)?;
    m.add_function(wrap_pyfunction!(sparse_varshamov_gilbert, m)?)?;
    m.add_function(wrap_pyfunction!(empirical_covariance, m)?)?;
    m.add_function(wrap_pyfunction!(pca_leading, m)?)?;
    m.add_function(wrap_pyfunction!(sparse_pca, m)?)?;
    m.add_function(wrap_pyfunction!(graphical_lasso, m)?)?;
    m.add_function(wrap_pyfunction!(ising_sample, m)?)?;
    m.add_function(wrap_pyfunction!(ising_fit, m)?)?;
    m.add_function(wrap_pyfunction!(fit_loglog_slope, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment_toml, m)?)?;
    Ok(())
}
