//! Gaussian graphical models via the graphical lasso and binary pairwise
//! (Ising) models: exact enumeration, Gibbs sampling, and row-by-row
//! l1-constrained pseudo-likelihood estimation.

use rand::Rng;

use crate::datagen::RandomSource;
use crate::linalg::{cholesky, log_det_spd, norm1, operator_norm, spd_inverse, DenseMatrix};
use crate::{Error, Result};

/// Estimated precision (inverse covariance) matrix.
#[derive(Debug, Clone)]
pub struct PrecisionEstimate {
    pub theta: DenseMatrix,
    pub lambda: f64,
    pub objective: f64,
    pub iterations: usize,
    /// Objective value after every accepted step, non-increasing.
    pub objective_trace: Vec<f64>,
}

/// Pairwise binary model `P(z) proportional to exp(z^T W z)` on
/// `{-1, 1}^d`, with symmetric zero-diagonal interactions.
#[derive(Debug, Clone)]
pub struct IsingModel {
    pub w: DenseMatrix,
    /// Bound on every row's l1 norm.
    pub lambda_budget: f64,
    /// Bound on individual entries; stored but never used as a constraint.
    pub beta_bound: f64,
}

impl IsingModel {
    pub fn new(w: DenseMatrix, lambda_budget: f64, beta_bound: f64) -> Result<Self> {
        let d = w.rows();
        if w.cols() != d {
            return Err(Error::invalid("interaction matrix must be square"));
        }
        for i in 0..d {
            if w.get(i, i) != 0.0 {
                return Err(Error::invalid("interaction diagonal must be exactly zero"));
            }
            for j in 0..d {
                if (w.get(i, j) - w.get(j, i)).abs() > 1e-12 {
                    return Err(Error::invalid("interaction matrix must be symmetric"));
                }
            }
            if norm1(w.row(i)) > lambda_budget + 1e-9 {
                return Err(Error::invalid(format!(
                    "row {i} exceeds the l1 budget {lambda_budget}"
                )));
            }
        }
        Ok(IsingModel {
            w,
            lambda_budget,
            beta_bound,
        })
    }

    pub fn dim(&self) -> usize {
        self.w.rows()
    }
}

/// `Tr(Sigma_hat Theta) - log det Theta + lambda * sum of off-diagonal
/// |Theta_ij|`. Fails on inputs that are not positive definite.
pub fn glasso_objective(theta: &DenseMatrix, sigma_hat: &DenseMatrix, lambda: f64) -> Result<f64> {
    let d = theta.rows();
    if theta.cols() != d || sigma_hat.rows() != d || sigma_hat.cols() != d {
        return Err(Error::invalid("dimension mismatch"));
    }
    if !theta.is_symmetric(1e-8) {
        return Err(Error::invalid("theta must be symmetric"));
    }
    let log_det =
        log_det_spd(theta).ok_or_else(|| Error::invalid("theta must be positive definite"))?;
    let mut trace = 0.0;
    let mut off_l1 = 0.0;
    for i in 0..d {
        for j in 0..d {
            trace += sigma_hat.get(i, j) * theta.get(j, i);
            if i != j {
                off_l1 += theta.get(i, j).abs();
            }
        }
    }
    Ok(trace - log_det + lambda * off_l1)
}

fn soft(x: f64, t: f64) -> f64 {
    x.signum() * (x.abs() - t).max(0.0)
}

/// Proximal-gradient graphical lasso with backtracking that keeps every
/// iterate positive definite and the objective non-increasing. Stops when an
/// accepted step decreases the objective by less than `tol`.
pub fn graphical_lasso(
    sigma_hat: &DenseMatrix,
    lambda: f64,
    max_iter: usize,
    tol: f64,
) -> Result<PrecisionEstimate> {
    let d = sigma_hat.rows();
    if sigma_hat.cols() != d || !sigma_hat.is_symmetric(1e-8) {
        return Err(Error::invalid("covariance input must be square symmetric"));
    }
    if lambda < 0.0 {
        return Err(Error::invalid("lambda must be non-negative"));
    }

    // diag(Sigma_ii + lambda)^{-1} is positive definite whenever the
    // diagonal is positive.
    let mut theta = DenseMatrix::zeros(d, d);
    for i in 0..d {
        let pivot = sigma_hat.get(i, i) + lambda;
        if pivot <= 0.0 {
            return Err(Error::invalid(
                "cannot build a positive definite starting point",
            ));
        }
        theta.set(i, i, 1.0 / pivot);
    }

    let mut objective = glasso_objective(&theta, sigma_hat, lambda)?;
    let mut trace = vec![objective];
    let mut step = 1.0f64;
    let mut iterations = 0;
    for it in 0..max_iter {
        iterations = it + 1;
        let inverse = spd_inverse(&theta)
            .ok_or_else(|| Error::Internal("iterate lost positive definiteness".into()))?;
        let gradient = sigma_hat.sub(&inverse);

        let mut accepted = None;
        let mut t = (step * 2.0).min(1e6);
        while t > 1e-18 {
            let mut candidate = DenseMatrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    let moved = theta.get(i, j) - t * gradient.get(i, j);
                    let value = if i == j {
                        moved
                    } else {
                        soft(moved, t * lambda)
                    };
                    candidate.set(i, j, value);
                }
            }
            if cholesky(&candidate).is_some() {
                let cand_obj = glasso_objective(&candidate, sigma_hat, lambda)?;
                if cand_obj <= objective {
                    accepted = Some((candidate, cand_obj, t));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((next, next_obj, used)) = accepted else {
            break; // No descent step exists at machine precision.
        };
        let gain = objective - next_obj;
        theta = next;
        objective = next_obj;
        step = used;
        trace.push(objective);
        if gain < tol {
            break;
        }
    }
    Ok(PrecisionEstimate {
        theta,
        lambda,
        objective,
        iterations,
        objective_trace: trace,
    })
}

const ISING_ENUM_LIMIT: usize = 16;

fn state_vector(state: usize, d: usize) -> Vec<f64> {
    (0..d)
        .map(|j| if (state >> j) & 1 == 1 { 1.0 } else { -1.0 })
        .collect()
}

fn energy(w: &DenseMatrix, z: &[f64]) -> f64 {
    let d = z.len();
    let mut e = 0.0;
    for i in 0..d {
        let zi = z[i];
        let row = w.row(i);
        for j in 0..d {
            e += zi * row[j] * z[j];
        }
    }
    e
}

/// Exact probability table over `{-1, 1}^d`; entry `s` is the probability of
/// the state whose j-th coordinate is `+1` iff bit `j` of `s` is set.
pub fn ising_enumerate(model: &IsingModel) -> Result<Vec<f64>> {
    let d = model.dim();
    if d > ISING_ENUM_LIMIT {
        return Err(Error::invalid(format!(
            "enumeration over 2^{d} states exceeds the d <= {ISING_ENUM_LIMIT} limit"
        )));
    }
    let energies: Vec<f64> = (0..1usize << d)
        .map(|s| energy(&model.w, &state_vector(s, d)))
        .collect();
    let max = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = energies.iter().map(|e| (e - max).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.iter().map(|w| w / total).collect())
}

/// Conditional probability `P(Z_j = +1 | Z_{-j} = z_{-j})` under the model.
/// With `h = (W z)_j` (the diagonal is zero, so `z_j` does not enter) this is
/// `exp(4h) / (1 + exp(4h))`: flipping `z_j` moves the energy `z^T W z` by
/// `4h` because `W` is symmetric.
pub fn ising_conditional(model: &IsingModel, j: usize, z: &[f64]) -> Result<f64> {
    let d = model.dim();
    if j >= d || z.len() != d {
        return Err(Error::invalid("index or state dimension out of range"));
    }
    if z.iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(Error::invalid("state entries must be +1 or -1"));
    }
    let h: f64 = model.w.row(j).iter().zip(z).map(|(w, zi)| w * zi).sum();
    Ok(1.0 / (1.0 + (-4.0 * h).exp()))
}

/// Systematic-scan Gibbs sampler: `burn_in` full sweeps, then `n_samples`
/// states kept every `thin` sweeps.
pub fn ising_gibbs(
    model: &IsingModel,
    burn_in: usize,
    n_samples: usize,
    thin: usize,
    source: RandomSource,
) -> DenseMatrix {
    let d = model.dim();
    let mut rng = source.rng();
    let mut z: Vec<f64> = (0..d)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect();
    let sweep = |z: &mut Vec<f64>, rng: &mut rand_chacha::ChaCha12Rng| {
        for j in 0..d {
            let h: f64 = model
                .w
                .row(j)
                .iter()
                .zip(z.iter())
                .map(|(w, zi)| w * zi)
                .sum();
            let p_plus = 1.0 / (1.0 + (-4.0 * h).exp());
            z[j] = if rng.random::<f64>() < p_plus {
                1.0
            } else {
                -1.0
            };
        }
    };
    for _ in 0..burn_in {
        sweep(&mut z, &mut rng);
    }
    let mut samples = DenseMatrix::zeros(n_samples, d);
    for i in 0..n_samples {
        for _ in 0..thin.max(1) {
            sweep(&mut z, &mut rng);
        }
        for j in 0..d {
            samples.set(i, j, z[j]);
        }
    }
    samples
}

/// Exact iid sampler by inverse-CDF over the enumerated table (d <= 16).
pub fn ising_exact_sample(
    model: &IsingModel,
    n_samples: usize,
    source: RandomSource,
) -> Result<DenseMatrix> {
    let d = model.dim();
    let probs = ising_enumerate(model)?;
    let mut cdf = probs.clone();
    for i in 1..cdf.len() {
        cdf[i] += cdf[i - 1];
    }
    let mut rng = source.rng();
    let mut samples = DenseMatrix::zeros(n_samples, d);
    for i in 0..n_samples {
        let u: f64 = rng.random();
        let state = cdf.partition_point(|&c| c < u).min(probs.len() - 1);
        let z = state_vector(state, d);
        for j in 0..d {
            samples.set(i, j, z[j]);
        }
    }
    Ok(samples)
}

/// Euclidean projection onto the l1 ball of the given radius, exact via
/// sort-and-threshold.
pub fn project_l1_ball(v: &[f64], radius: f64) -> Vec<f64> {
    if radius <= 0.0 {
        return vec![0.0; v.len()];
    }
    if norm1(v) <= radius {
        return v.to_vec();
    }
    let mut mags: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut running = 0.0;
    let mut threshold = 0.0;
    for (i, &m) in mags.iter().enumerate() {
        running += m;
        let candidate = (running - radius) / (i + 1) as f64;
        if m - candidate > 0.0 {
            threshold = candidate;
        } else {
            break;
        }
    }
    v.iter().map(|&x| soft(x, threshold)).collect()
}

/// Average conditional log-likelihood of row `j` given the others, for a
/// candidate interaction row `w` (length d-1, coordinate `j` removed).
pub fn ising_row_log_likelihood(samples: &DenseMatrix, j: usize, w: &[f64]) -> f64 {
    let n = samples.rows();
    let mut total = 0.0;
    for i in 0..n {
        let row = samples.row(i);
        let y = row[j];
        let mut h = 0.0;
        let mut idx = 0;
        for (col, &z) in row.iter().enumerate() {
            if col == j {
                continue;
            }
            h += w[idx] * z;
            idx += 1;
        }
        // log of exp(2 y h) / (exp(2h) + exp(-2h)), stable form.
        total += 2.0 * y * h - ((2.0 * h).exp() + (-2.0 * h).exp()).ln();
    }
    total / n as f64
}

/// Maximizes the row pseudo-likelihood over the l1 ball of radius `lambda`
/// by projected gradient ascent with step `1/L`,
/// `L = 4 ||X||_op^2 / n` for the predictor matrix `X`. Exits when the
/// projected-gradient norm falls below `tol`.
pub fn ising_row_mle(
    samples: &DenseMatrix,
    j: usize,
    lambda: f64,
    max_iter: usize,
    tol: f64,
) -> Result<Vec<f64>> {
    let n = samples.rows();
    let d = samples.cols();
    if j >= d {
        return Err(Error::invalid("row index out of range"));
    }
    if samples.data().iter().any(|&v| v != 1.0 && v != -1.0) {
        return Err(Error::invalid("samples must have +1/-1 entries"));
    }
    if lambda < 0.0 {
        return Err(Error::invalid("lambda must be non-negative"));
    }
    let p = d - 1;
    if lambda == 0.0 || p == 0 {
        return Ok(vec![0.0; p]);
    }

    // Predictors: sample matrix with column j removed.
    let predictors = DenseMatrix::from_fn(n, p, |i, a| {
        let col = if a < j { a } else { a + 1 };
        samples.get(i, col)
    });
    let targets: Vec<f64> = (0..n).map(|i| samples.get(i, j)).collect();
    let opnorm = operator_norm(&predictors)?;
    let lipschitz = 4.0 * opnorm * opnorm / n as f64;
    let step = 1.0 / lipschitz;

    let mut w = vec![0.0; p];
    let mut fields: Vec<f64> = vec![0.0; n]; // predictors * w
    for _ in 0..max_iter {
        // Gradient of the average log-likelihood: (2/n) X^T (y - tanh(2h)).
        let mut residual = vec![0.0; n];
        for i in 0..n {
            residual[i] = targets[i] - (2.0 * fields[i]).tanh();
        }
        let mut grad = predictors.transpose_matvec(&residual);
        for g in grad.iter_mut() {
            *g *= 2.0 / n as f64;
        }
        let moved: Vec<f64> = w.iter().zip(&grad).map(|(a, g)| a + step * g).collect();
        let next = project_l1_ball(&moved, lambda);
        let pg_norm = w
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
            * lipschitz;
        let delta: Vec<f64> = next.iter().zip(&w).map(|(a, b)| a - b).collect();
        let field_delta = predictors.matvec(&delta);
        for (f, fd) in fields.iter_mut().zip(&field_delta) {
            *f += fd;
        }
        w = next;
        if pg_norm <= tol {
            break;
        }
    }
    Ok(w)
}

/// Fits the full interaction matrix row by row and symmetrizes the result
/// by averaging.
pub fn ising_fit(
    samples: &DenseMatrix,
    lambda: f64,
    max_iter: usize,
    tol: f64,
) -> Result<IsingModel> {
    let d = samples.cols();
    let mut w = DenseMatrix::zeros(d, d);
    for j in 0..d {
        let row = ising_row_mle(samples, j, lambda, max_iter, tol)?;
        let mut idx = 0;
        for col in 0..d {
            if col == j {
                continue;
            }
            w.set(j, col, row[idx]);
            idx += 1;
        }
    }
    let symmetrized = w.add(&w.transpose()).scaled(0.5);
    let beta_bound = symmetrized.max_abs();
    // Averaging rows that were fit independently can push a row's l1 norm
    // past lambda; the returned budget is the realized one.
    let budget = (0..d)
        .map(|i| norm1(symmetrized.row(i)))
        .fold(lambda, f64::max);
    IsingModel::new(symmetrized, budget + 1e-9, beta_bound)
}
