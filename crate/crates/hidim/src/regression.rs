//! Sparse linear regression estimators with the tuning formulas used by the
//! experiments: least squares and its l1/l0 constrained variants, hard/soft
//! thresholding, BIC, Lasso by coordinate descent, SLOPE by proximal
//! gradient, ridge, incoherence diagnostics, and Maurey sparsification.

use rand::Rng;

use crate::datagen::{RandomSource, RegressionInstance};
use crate::linalg::{
    dot, norm1, norm_inf, operator_norm, pseudo_inverse_solve, spd_solve, DenseMatrix,
};
use crate::util::for_each_combination;
use crate::{Error, Result};

/// Result of running an estimator on one instance.
#[derive(Debug, Clone)]
pub struct EstimateReport {
    pub estimate: Vec<f64>,
    /// `|X(estimate - truth)|_2^2 / n` when the instance carries its truth.
    pub predicted_mse: Option<f64>,
    /// Indices of the nonzero coefficients.
    pub support: Vec<usize>,
    pub objective_value: f64,
    pub iterations: usize,
    /// False when an iterative solver hit its iteration budget before
    /// meeting its exit criterion.
    pub converged: bool,
}

impl EstimateReport {
    fn new(
        inst: &RegressionInstance,
        estimate: Vec<f64>,
        objective_value: f64,
        iterations: usize,
        converged: bool,
    ) -> Self {
        let support = estimate
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(j, _)| j)
            .collect();
        let predicted_mse = inst.prediction_mse(&estimate);
        EstimateReport {
            estimate,
            predicted_mse,
            support,
            objective_value,
            iterations,
            converged,
        }
    }
}

/// Which published formula produced a tuning value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TuningRule {
    Bic,
    LassoSlow,
    LassoFast,
    SequenceThreshold,
    Slope,
    Manual,
}

/// Regularization strength plus the provenance of the formula that set it.
#[derive(Debug, Clone, Copy)]
pub struct TuningParameters {
    pub tau: f64,
    pub delta: f64,
    pub sigma: f64,
    pub rule: TuningRule,
}

impl TuningParameters {
    /// l0 penalty level: `tau^2 = 16 log(6) sigma^2/n + 32 sigma^2 log(ed)/n`.
    pub fn bic(sigma: f64, n: usize, d: usize) -> Self {
        let nf = n as f64;
        let tau_sq = 16.0 * 6f64.ln() * sigma * sigma / nf
            + 32.0 * sigma * sigma * (std::f64::consts::E * d as f64).ln() / nf;
        TuningParameters {
            tau: tau_sq.sqrt(),
            delta: 0.0,
            sigma,
            rule: TuningRule::Bic,
        }
    }

    /// Slow-rate Lasso level: `2 tau = 2 sigma sqrt(2 log(2d)/n) + 2 sigma
    /// sqrt(2 log(1/delta)/n)`.
    pub fn lasso_slow(sigma: f64, n: usize, d: usize, delta: f64) -> Self {
        let nf = n as f64;
        let tau = sigma * (2.0 * (2.0 * d as f64).ln() / nf).sqrt()
            + sigma * (2.0 * (1.0 / delta).ln() / nf).sqrt();
        TuningParameters {
            tau,
            delta,
            sigma,
            rule: TuningRule::LassoSlow,
        }
    }

    /// Fast-rate Lasso level: `2 tau = 8 sigma sqrt(log(2d)/n) + 8 sigma
    /// sqrt(log(1/delta)/n)`.
    pub fn lasso_fast(sigma: f64, n: usize, d: usize, delta: f64) -> Self {
        let nf = n as f64;
        let tau = 4.0 * sigma * ((2.0 * d as f64).ln() / nf).sqrt()
            + 4.0 * sigma * ((1.0 / delta).ln() / nf).sqrt();
        TuningParameters {
            tau,
            delta,
            sigma,
            rule: TuningRule::LassoFast,
        }
    }

    /// Sequence-model threshold level: `tau = sigma sqrt(2 log(2d/delta)/n)`.
    pub fn sequence_threshold(sigma: f64, n: usize, d: usize, delta: f64) -> Self {
        let tau = sigma * (2.0 * (2.0 * d as f64 / delta).ln() / n as f64).sqrt();
        TuningParameters {
            tau,
            delta,
            sigma,
            rule: TuningRule::SequenceThreshold,
        }
    }

    /// SLOPE level: `tau = 8 sqrt(2) sigma sqrt(log(1/delta)/n)`.
    pub fn slope(sigma: f64, n: usize, delta: f64) -> Self {
        let tau = 8.0 * 2f64.sqrt() * sigma * ((1.0 / delta).ln() / n as f64).sqrt();
        TuningParameters {
            tau,
            delta,
            sigma,
            rule: TuningRule::Slope,
        }
    }

    pub fn manual(tau: f64, delta: f64, sigma: f64) -> Self {
        TuningParameters {
            tau,
            delta,
            sigma,
            rule: TuningRule::Manual,
        }
    }
}

/// SLOPE weight sequence `lambda_j = sqrt(log(2d/j))`, non-increasing.
pub fn slope_weights(d: usize) -> Vec<f64> {
    (1..=d)
        .map(|j| (2.0 * d as f64 / j as f64).ln().sqrt())
        .collect()
}

fn residual_sq(inst: &RegressionInstance, estimate: &[f64]) -> f64 {
    let fitted = inst.design.matvec(estimate);
    inst.response
        .iter()
        .zip(&fitted)
        .map(|(y, f)| (y - f) * (y - f))
        .sum()
}

/// Unconstrained least squares `(X^T X)^+ X^T Y`.
pub fn least_squares(inst: &RegressionInstance) -> Result<EstimateReport> {
    let estimate = pseudo_inverse_solve(&inst.design, &inst.response)?;
    let objective = residual_sq(inst, &estimate) / inst.n() as f64;
    Ok(EstimateReport::new(inst, estimate, objective, 1, true))
}

/// Least squares constrained to the l1 ball of the given radius, solved by
/// Frank-Wolfe with exact line search. Converged means the duality gap fell
/// below `tol`.
pub fn ls_l1_ball(
    inst: &RegressionInstance,
    radius: f64,
    max_iter: usize,
    tol: f64,
) -> Result<EstimateReport> {
    if radius < 0.0 {
        return Err(Error::invalid("radius must be non-negative"));
    }
    let n = inst.n();
    let d = inst.dim();
    let nf = n as f64;
    if radius == 0.0 {
        let estimate = vec![0.0; d];
        let objective = residual_sq(inst, &estimate) / nf;
        return Ok(EstimateReport::new(inst, estimate, objective, 0, true));
    }

    let mut theta = vec![0.0; d];
    let mut fitted = vec![0.0; n];
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..max_iter {
        iterations = it + 1;
        let r: Vec<f64> = inst
            .response
            .iter()
            .zip(&fitted)
            .map(|(y, f)| y - f)
            .collect();
        let grad: Vec<f64> = inst
            .design
            .transpose_matvec(&r)
            .iter()
            .map(|v| -2.0 * v / nf)
            .collect();
        let (jstar, gmax) = grad
            .iter()
            .enumerate()
            .map(|(j, g)| (j, g.abs()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        let vertex_coef = -radius * grad[jstar].signum();
        let gap = dot(&grad, &theta) + radius * gmax;
        if gap <= tol {
            converged = true;
            break;
        }
        // Direction s - theta has image vertex_coef * X_j - fitted.
        let xj = inst.design.column(jstar);
        let xdir: Vec<f64> = xj
            .iter()
            .zip(&fitted)
            .map(|(x, f)| vertex_coef * x - f)
            .collect();
        let denom = dot(&xdir, &xdir);
        if denom <= 0.0 {
            converged = true;
            break;
        }
        let gamma = (dot(&r, &xdir) / denom).clamp(0.0, 1.0);
        for t in theta.iter_mut() {
            *t *= 1.0 - gamma;
        }
        theta[jstar] += gamma * vertex_coef;
        for (f, x) in fitted.iter_mut().zip(&xdir) {
            *f += gamma * x;
        }
    }
    let objective = residual_sq(inst, &theta) / nf;
    Ok(EstimateReport::new(
        inst, theta, objective, iterations, converged,
    ))
}

/// Least squares on a fixed support via the Gram matrix, falling back to the
/// pseudo-inverse when the submatrix is rank deficient. Returns the full-size
/// coefficient vector and the residual sum of squares.
fn support_least_squares(
    inst: &RegressionInstance,
    gram: &DenseMatrix,
    xty: &[f64],
    yty: f64,
    support: &[usize],
) -> (Vec<f64>, f64) {
    let d = inst.dim();
    let mut theta = vec![0.0; d];
    if support.is_empty() {
        return (theta, yty);
    }
    let s = support.len();
    let sub = DenseMatrix::from_fn(s, s, |a, b| gram.get(support[a], support[b]));
    let rhs: Vec<f64> = support.iter().map(|&j| xty[j]).collect();
    let coef = match spd_solve(&sub, &rhs) {
        Some(c) => c,
        None => {
            let cols = DenseMatrix::from_fn(inst.n(), s, |i, a| inst.design.get(i, support[a]));
            pseudo_inverse_solve(&cols, &inst.response).expect("finite input")
        }
    };
    for (a, &j) in support.iter().enumerate() {
        theta[j] = coef[a];
    }
    // Direct residual; the expanded quadratic identity loses digits when
    // the fit is exact.
    let n = inst.n();
    let mut rss = 0.0;
    for i in 0..n {
        let row = inst.design.row(i);
        let mut fitted = 0.0;
        for (a, &j) in support.iter().enumerate() {
            fitted += coef[a] * row[j];
        }
        let r = inst.response[i] - fitted;
        rss += r * r;
    }
    (theta, rss)
}

fn lex_smaller(a: &[usize], b: &[usize]) -> bool {
    a.iter().lt(b.iter())
}

const L0_GUARD: usize = 25;

/// Exact minimizer of the residual over all supports of size at most `k`,
/// found by enumeration. Guarded to small `d`; ties go to the
/// lexicographically smallest support.
pub fn ls_l0(inst: &RegressionInstance, k: usize) -> Result<EstimateReport> {
    let d = inst.dim();
    if d > L0_GUARD {
        return Err(Error::invalid(format!(
            "l0 search is exponential; d={d} exceeds guard {L0_GUARD}"
        )));
    }
    let k = k.min(d);
    let gram = inst.design.transpose().matmul(&inst.design);
    let xty = inst.design.transpose_matvec(&inst.response);
    let yty = dot(&inst.response, &inst.response);
    let nf = inst.n() as f64;

    let mut best: Option<(f64, Vec<usize>, Vec<f64>)> = None;
    for size in 0..=k {
        for_each_combination(d, size, |support| {
            let (theta, rss) = support_least_squares(inst, &gram, &xty, yty, support);
            let better = match &best {
                None => true,
                Some((best_rss, best_support, _)) => {
                    rss < *best_rss || (rss == *best_rss && lex_smaller(support, best_support))
                }
            };
            if better {
                best = Some((rss, support.to_vec(), theta));
            }
        });
    }
    let (rss, _, theta) = best.expect("at least the empty support");
    Ok(EstimateReport::new(inst, theta, rss / nf, 1, true))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdMode {
    Hard,
    Soft,
}

/// Coordinatewise thresholding at level `2 tau`: hard keeps entries with
/// `|y_j| > 2 tau`, soft applies `(1 - 2 tau / |y_j|)_+ y_j`.
pub fn threshold_estimate(y: &[f64], tau: f64, mode: ThresholdMode) -> Result<Vec<f64>> {
    if tau < 0.0 {
        return Err(Error::invalid("threshold must be non-negative"));
    }
    let cut = 2.0 * tau;
    Ok(y.iter()
        .map(|&v| match mode {
            ThresholdMode::Hard => {
                if v.abs() > cut {
                    v
                } else {
                    0.0
                }
            }
            ThresholdMode::Soft => v.signum() * (v.abs() - cut).max(0.0),
        })
        .collect())
}

/// Global minimizer of `|Y - X theta|^2 / n + tau^2 |theta|_0` by support
/// enumeration, guarded to small `d`.
pub fn bic_estimate(
    inst: &RegressionInstance,
    tuning: &TuningParameters,
    d_guard: usize,
) -> Result<EstimateReport> {
    let d = inst.dim();
    if d > d_guard {
        return Err(Error::invalid(format!(
            "BIC enumeration is exponential; d={d} exceeds guard {d_guard}"
        )));
    }
    let tau_sq = tuning.tau * tuning.tau;
    let gram = inst.design.transpose().matmul(&inst.design);
    let xty = inst.design.transpose_matvec(&inst.response);
    let yty = dot(&inst.response, &inst.response);
    let nf = inst.n() as f64;

    let mut best: Option<(f64, Vec<usize>, Vec<f64>)> = None;
    for size in 0..=d {
        for_each_combination(d, size, |support| {
            let (theta, rss) = support_least_squares(inst, &gram, &xty, yty, support);
            let objective = rss / nf + tau_sq * support.len() as f64;
            let better = match &best {
                None => true,
                Some((best_obj, best_support, _)) => {
                    objective < *best_obj
                        || (objective == *best_obj && lex_smaller(support, best_support))
                }
            };
            if better {
                best = Some((objective, support.to_vec(), theta));
            }
        });
    }
    let (objective, _, theta) = best.expect("at least the empty support");
    Ok(EstimateReport::new(inst, theta, objective, 1, true))
}

/// Lasso objective `|Y - X theta|^2 / n + 2 tau |theta|_1` minimized by
/// cyclic coordinate descent with covariance (Gram) updates. Exits when the
/// largest coordinate move is below `tol * (1 + |theta|_inf)` and the KKT
/// residual is below `tol`.
pub fn lasso_cd(
    inst: &RegressionInstance,
    tuning: &TuningParameters,
    max_iter: usize,
    tol: f64,
) -> Result<EstimateReport> {
    let n = inst.n();
    let d = inst.dim();
    let nf = n as f64;
    let tau = tuning.tau;
    let gram = inst.design.transpose().matmul(&inst.design);
    for j in 0..d {
        if gram.get(j, j) <= 0.0 {
            return Err(Error::invalid(format!("design column {j} is zero")));
        }
    }
    let xty = inst.design.transpose_matvec(&inst.response);
    let yty = dot(&inst.response, &inst.response);

    let mut theta = vec![0.0; d];
    let mut gtheta = vec![0.0; d]; // G * theta
    let mut converged = false;
    let mut iterations = 0;
    for sweep in 0..max_iter {
        iterations = sweep + 1;
        let mut max_move = 0.0f64;
        for j in 0..d {
            let cj = gram.get(j, j) / nf;
            let rho = (xty[j] - gtheta[j]) / nf + cj * theta[j];
            let new = rho.signum() * (rho.abs() - tau).max(0.0) / cj;
            let delta = new - theta[j];
            if delta != 0.0 {
                for l in 0..d {
                    gtheta[l] += gram.get(l, j) * delta;
                }
                theta[j] = new;
            }
            max_move = max_move.max(delta.abs());
        }
        if max_move <= tol * (1.0 + norm_inf(&theta)) {
            // KKT residual check before declaring convergence.
            let mut ok = true;
            for j in 0..d {
                let gj = (xty[j] - gtheta[j]) / nf;
                let viol = if theta[j] == 0.0 {
                    gj.abs() - tau
                } else {
                    (gj - tau * theta[j].signum()).abs()
                };
                if viol > tol {
                    ok = false;
                    break;
                }
            }
            if ok {
                converged = true;
                break;
            }
        }
    }
    let quad = dot(&theta, &gtheta);
    let lin = dot(&theta, &xty);
    let objective = (yty - 2.0 * lin + quad).max(0.0) / nf + 2.0 * tau * norm1(&theta);
    Ok(EstimateReport::new(
        inst, theta, objective, iterations, converged,
    ))
}

/// Sorted-l1 norm `sum_j lambda_j |theta|_(j)` for non-increasing weights.
pub fn sorted_l1_norm(theta: &[f64], weights: &[f64]) -> f64 {
    let mut mags: Vec<f64> = theta.iter().map(|v| v.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    mags.iter().zip(weights).map(|(m, w)| m * w).sum()
}

/// Exact proximal operator of `theta -> sum_j w_j theta*_j` (sorted-l1) at
/// unit step: sort magnitudes, subtract the weights, project onto the
/// non-increasing cone by pool-adjacent-violators, clip at zero, undo the
/// sort, restore signs.
pub fn prox_sorted_l1(v: &[f64], weights: &[f64]) -> Result<Vec<f64>> {
    let d = v.len();
    if weights.len() != d {
        return Err(Error::invalid("weights length must match vector length"));
    }
    if weights.iter().any(|&w| w < 0.0) || weights.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::invalid("weights must be non-increasing and >= 0"));
    }
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| v[b].abs().partial_cmp(&v[a].abs()).unwrap());

    // PAV on z = |v| sorted desc minus weights, onto the non-increasing cone.
    struct Block {
        sum: f64,
        count: usize,
    }
    let mut blocks: Vec<Block> = Vec::with_capacity(d);
    for (rank, &idx) in order.iter().enumerate() {
        let z = v[idx].abs() - weights[rank];
        blocks.push(Block { sum: z, count: 1 });
        while blocks.len() >= 2 {
            let m = blocks.len();
            let prev_avg = blocks[m - 2].sum / blocks[m - 2].count as f64;
            let last_avg = blocks[m - 1].sum / blocks[m - 1].count as f64;
            if prev_avg <= last_avg {
                let last = blocks.pop().unwrap();
                blocks[m - 2].sum += last.sum;
                blocks[m - 2].count += last.count;
            } else {
                break;
            }
        }
    }
    let mut sorted_solution = Vec::with_capacity(d);
    for b in &blocks {
        let avg = (b.sum / b.count as f64).max(0.0);
        sorted_solution.extend(std::iter::repeat_n(avg, b.count));
    }
    let mut out = vec![0.0; d];
    for (rank, &idx) in order.iter().enumerate() {
        out[idx] = v[idx].signum() * sorted_solution[rank];
    }
    Ok(out)
}

/// SLOPE objective `|Y - X theta|^2 / n + 2 tau sum_j lambda_j theta*_j`
/// minimized by proximal gradient with step `1/L`,
/// `L = 2 ||X||_op^2 / n`. The objective is checked to be non-increasing.
pub fn slope_pgd(
    inst: &RegressionInstance,
    tau: f64,
    lambda_seq: &[f64],
    max_iter: usize,
    tol: f64,
) -> Result<EstimateReport> {
    let d = inst.dim();
    let nf = inst.n() as f64;
    if lambda_seq.len() != d {
        return Err(Error::invalid("lambda sequence length must equal d"));
    }
    if lambda_seq.iter().any(|&l| l <= 0.0) || lambda_seq.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::invalid(
            "lambda sequence must be positive non-increasing",
        ));
    }
    if tau < 0.0 {
        return Err(Error::invalid("tau must be non-negative"));
    }
    let opnorm = operator_norm(&inst.design)?;
    if opnorm == 0.0 {
        let theta = vec![0.0; d];
        let objective = residual_sq(inst, &theta) / nf;
        return Ok(EstimateReport::new(inst, theta, objective, 0, true));
    }
    let lipschitz = 2.0 * opnorm * opnorm / nf;
    let step = 1.0 / lipschitz;
    let gram = inst.design.transpose().matmul(&inst.design);
    let xty = inst.design.transpose_matvec(&inst.response);
    let yty = dot(&inst.response, &inst.response);
    let prox_weights: Vec<f64> = lambda_seq.iter().map(|l| 2.0 * tau * step * l).collect();

    let objective_of = |theta: &[f64], gtheta: &[f64]| -> f64 {
        let quad = dot(theta, gtheta);
        let lin = dot(theta, xty.as_slice());
        (yty - 2.0 * lin + quad).max(0.0) / nf + 2.0 * tau * sorted_l1_norm(theta, lambda_seq)
    };

    let mut theta = vec![0.0; d];
    let mut gtheta = vec![0.0; d];
    let mut objective = objective_of(&theta, &gtheta);
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..max_iter {
        iterations = it + 1;
        let grad: Vec<f64> = (0..d).map(|j| 2.0 * (gtheta[j] - xty[j]) / nf).collect();
        let moved: Vec<f64> = theta.iter().zip(&grad).map(|(t, g)| t - step * g).collect();
        let next = prox_sorted_l1(&moved, &prox_weights)?;
        let next_g = gram.matvec(&next);
        let next_obj = objective_of(&next, &next_g);
        if next_obj > objective + 1e-10 {
            return Err(Error::Internal(format!(
                "slope objective increased from {objective} to {next_obj}"
            )));
        }
        let max_move = theta
            .iter()
            .zip(&next)
            .fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()));
        theta = next;
        gtheta = next_g;
        objective = next_obj;
        if max_move <= tol * (1.0 + norm_inf(&theta)) {
            converged = true;
            break;
        }
    }
    Ok(EstimateReport::new(
        inst, theta, objective, iterations, converged,
    ))
}

/// `|| X^T X / n - I ||_inf`, the incoherence statistic.
pub fn incoherence(x: &DenseMatrix) -> f64 {
    let n = x.rows() as f64;
    let d = x.cols();
    let gram = x.transpose().matmul(x);
    let mut worst = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram.get(i, j) / n - target).abs());
        }
    }
    worst
}

/// Whether the design satisfies the incoherence condition at sparsity `k`,
/// i.e. `incoherence(x) <= 1/(32 k)`.
pub fn check_inc(x: &DenseMatrix, k: usize) -> bool {
    k > 0 && incoherence(x) <= 1.0 / (32.0 * k as f64)
}

/// Whether `|theta_{S^c}|_1 <= factor * |theta_S|_1`.
pub fn cone_condition_holds(theta: &[f64], support: &[usize], factor: f64) -> bool {
    let on: f64 = support.iter().map(|&j| theta[j].abs()).sum();
    let total = norm1(theta);
    total - on <= factor * on + 1e-15 * total
}

/// Ridge estimator `(X^T X / n + tau I)^{-1} X^T Y / n` in closed form.
pub fn ridge(inst: &RegressionInstance, tau: f64) -> Result<EstimateReport> {
    if tau <= 0.0 {
        return Err(Error::invalid("ridge penalty must be positive"));
    }
    let d = inst.dim();
    let nf = inst.n() as f64;
    let mut system = inst
        .design
        .transpose()
        .matmul(&inst.design)
        .scaled(1.0 / nf);
    for j in 0..d {
        let v = system.get(j, j) + tau;
        system.set(j, j, v);
    }
    let rhs: Vec<f64> = inst
        .design
        .transpose_matvec(&inst.response)
        .iter()
        .map(|v| v / nf)
        .collect();
    let theta = spd_solve(&system, &rhs)
        .ok_or_else(|| Error::Internal("ridge system not positive definite".into()))?;
    let objective = residual_sq(inst, &theta) / nf + tau * theta.iter().map(|v| v * v).sum::<f64>();
    Ok(EstimateReport::new(inst, theta, objective, 1, true))
}

/// Random `k`-sparse approximation of `theta` in the sense of Maurey: average
/// of `k` iid atoms `R sign(theta_j) e_j` drawn with probability
/// `|theta_j| / R`, `R = |theta|_1`. Returns the sparsified vector together
/// with the excess-risk bound `D^2 R^2 / k` it satisfies in expectation for
/// dictionaries with column norms at most `D sqrt(n)`.
pub fn maurey_sparsify(
    theta: &[f64],
    k: usize,
    dictionary_norm_bound: f64,
    source: RandomSource,
) -> Result<(Vec<f64>, f64)> {
    if k == 0 {
        return Err(Error::invalid("need at least one atom"));
    }
    let radius = norm1(theta);
    let mut out = vec![0.0; theta.len()];
    if radius == 0.0 {
        return Ok((out, 0.0));
    }
    let mut rng = source.rng();
    let cumulative: Vec<f64> = theta
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v.abs() / radius;
            Some(*acc)
        })
        .collect();
    for _ in 0..k {
        let u: f64 = rng.random();
        let j = cumulative
            .iter()
            .position(|&c| u <= c)
            .unwrap_or(theta.len() - 1);
        out[j] += theta[j].signum() * radius / k as f64;
    }
    let bound = dictionary_norm_bound * dictionary_norm_bound * radius * radius / k as f64;
    Ok((out, bound))
}

/// Gaussian sub-Gaussian sequence-model observation `y = theta + xi` with
/// `xi ~ N(0, sigma^2/n I)`, the direct-observation reduction used by the
/// thresholding experiments.
pub fn sequence_model_observation(
    truth: &[f64],
    sigma: f64,
    n: usize,
    source: RandomSource,
) -> Vec<f64> {
    let scale = sigma / (n as f64).sqrt();
    let mut rng = source.rng();
    truth
        .iter()
        .map(|&t| t + scale * crate::datagen::standard_normal(&mut rng))
        .collect()
}
