//! Low-rank matrix estimation: reduction of the orthogonal-design
//! multivariate model to a direct observation, singular value thresholding,
//! rank penalization, empirical covariance, and (sparse) PCA.

use crate::linalg::{hard_threshold_spectrum, norm_inf, svd, symmetric_eigen, DenseMatrix};
use crate::util::for_each_combination;
use crate::{Error, Result};

/// Multivariate regression problem `Y = X Theta + E` with an n x T response.
#[derive(Debug, Clone)]
pub struct MatrixRegressionInstance {
    pub design: DenseMatrix,
    pub response: DenseMatrix,
    pub truth: Option<DenseMatrix>,
    pub sigma: f64,
}

impl MatrixRegressionInstance {
    pub fn new(
        design: DenseMatrix,
        response: DenseMatrix,
        truth: Option<DenseMatrix>,
        sigma: f64,
    ) -> Result<Self> {
        if design.rows() != response.rows() {
            return Err(Error::invalid("design and response row counts differ"));
        }
        if let Some(t) = &truth {
            if t.rows() != design.cols() || t.cols() != response.cols() {
                return Err(Error::invalid("truth must be d x T"));
            }
        }
        Ok(MatrixRegressionInstance {
            design,
            response,
            truth,
            sigma,
        })
    }
}

/// Reduces the model to the direct observation `X^T Y / n` under the
/// orthogonal-design condition `X^T X / n = I` (checked within 1e-6).
pub fn to_sequence_model(inst: &MatrixRegressionInstance) -> Result<DenseMatrix> {
    let n = inst.design.rows() as f64;
    let d = inst.design.cols();
    let gram = inst.design.transpose().matmul(&inst.design).scaled(1.0 / n);
    let deviation = gram.sub(&DenseMatrix::identity(d)).max_abs();
    if deviation > 1e-6 {
        return Err(Error::invalid(format!(
            "design is not orthogonal: ||X^T X / n - I||_inf = {deviation:.2e}"
        )));
    }
    Ok(inst
        .design
        .transpose()
        .matmul(&inst.response)
        .scaled(1.0 / n))
}

/// Singular value threshold `2 tau = 8 sigma sqrt(log(12)(d v T)/n)
/// + 4 sigma sqrt(2 log(1/delta)/n)`.
pub fn svt_threshold(sigma: f64, n: usize, d: usize, t: usize, delta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&delta) || delta == 0.0 {
        return Err(Error::invalid("delta must be in (0,1)"));
    }
    let nf = n as f64;
    let dim = d.max(t) as f64;
    Ok(8.0 * sigma * (12f64.ln() * dim / nf).sqrt()
        + 4.0 * sigma * (2.0 * (1.0 / delta).ln() / nf).sqrt())
}

/// Singular value thresholding: keeps the singular triples of `y` whose
/// value strictly exceeds `two_tau`.
pub fn svt(y: &DenseMatrix, two_tau: f64) -> Result<DenseMatrix> {
    hard_threshold_spectrum(y, two_tau)
}

/// Output of the rank-penalized estimator: the fitted values `X Theta_hat`
/// and the rank that minimized the penalized objective.
#[derive(Debug, Clone)]
pub struct RankPenalizedFit {
    pub fitted: DenseMatrix,
    pub selected_rank: usize,
    pub objective: f64,
}

/// Minimizes `|Y - X Theta|_F^2 / n + 2 tau^2 rank(Theta)` by projecting `Y`
/// onto the column span of `X` and scanning truncation ranks of the
/// projection; ties prefer the smaller rank. Returns fitted values, not a
/// coefficient matrix.
pub fn rank_penalized(inst: &MatrixRegressionInstance, tau_sq: f64) -> Result<RankPenalizedFit> {
    if tau_sq < 0.0 {
        return Err(Error::invalid("tau^2 must be non-negative"));
    }
    let n = inst.design.rows() as f64;
    let x_svd = svd(&inst.design)?;
    // Projection of Y onto the span of X: U U^T Y.
    let uty = x_svd.u.transpose().matmul(&inst.response);
    let ybar = x_svd.u.matmul(&uty);
    let residual = inst.response.sub(&ybar);
    let base = residual.frobenius_norm().powi(2);

    let ybar_svd = svd(&ybar)?;
    let spectrum = &ybar_svd.singular_values;
    let max_rank = spectrum.len();
    // Tail sums of squared singular values: tail[k] = sum_{j > k} s_j^2.
    let mut tail = vec![0.0; max_rank + 1];
    for k in (0..max_rank).rev() {
        tail[k] = tail[k + 1] + spectrum[k] * spectrum[k];
    }
    let mut best_rank = 0;
    let mut best_obj = f64::INFINITY;
    for k in 0..=max_rank {
        let obj = (base + tail[k]) / n + 2.0 * tau_sq * k as f64;
        if obj < best_obj {
            best_obj = obj;
            best_rank = k;
        }
    }
    Ok(RankPenalizedFit {
        fitted: ybar_svd.reconstruct_truncated(best_rank),
        selected_rank: best_rank,
        objective: best_obj,
    })
}

/// Uncentered empirical covariance `(1/n) sum_i x_i x_i^T`, symmetric PSD.
pub fn empirical_covariance(samples: &DenseMatrix) -> Result<DenseMatrix> {
    let n = samples.rows();
    if n == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let d = samples.cols();
    let mut cov = DenseMatrix::zeros(d, d);
    for i in 0..n {
        let row = samples.row(i);
        for a in 0..d {
            let ra = row[a];
            for b in a..d {
                let v = cov.get(a, b) + ra * row[b];
                cov.set(a, b, v);
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            let v = cov.get(a, b) / n as f64;
            cov.set(a, b, v);
            cov.set(b, a, v);
        }
    }
    Ok(cov)
}

/// Leading eigenpair of a symmetric matrix, plus the spectral gap used to
/// flag degenerate inputs instead of failing on them.
#[derive(Debug, Clone)]
pub struct LeadingEigen {
    pub vector: Vec<f64>,
    pub value: f64,
    pub gap: f64,
}

impl LeadingEigen {
    pub fn is_degenerate(&self, tol: f64) -> bool {
        self.gap <= tol
    }
}

/// Unit-norm leading eigenvector of a symmetric matrix, deterministic sign
/// (first nonzero coordinate positive).
pub fn pca_leading(sigma_hat: &DenseMatrix) -> Result<LeadingEigen> {
    if !sigma_hat.is_symmetric(1e-8) {
        return Err(Error::invalid("covariance input must be symmetric"));
    }
    let (values, vectors) = symmetric_eigen(sigma_hat)?;
    let gap = if values.len() > 1 {
        values[0] - values[1]
    } else {
        f64::INFINITY
    };
    Ok(LeadingEigen {
        vector: vectors.column(0),
        value: values[0],
        gap,
    })
}

const SPARSE_PCA_DEFAULT_GUARD: usize = 20;

/// Exact k-sparse leading eigenvector by enumerating all k-subsets and
/// taking the leading eigenvector of each principal submatrix. Ties go to
/// the lexicographically smallest support. `d_guard` caps the exponential
/// enumeration (defaults to 20 when 0 is passed).
pub fn sparse_pca(sigma_hat: &DenseMatrix, k: usize, d_guard: usize) -> Result<Vec<f64>> {
    let guard = if d_guard == 0 {
        SPARSE_PCA_DEFAULT_GUARD
    } else {
        d_guard
    };
    let d = sigma_hat.rows();
    if d > guard {
        return Err(Error::invalid(format!(
            "sparse PCA enumeration is exponential; d={d} exceeds guard {guard}"
        )));
    }
    if k == 0 || k > d {
        return Err(Error::invalid("need 1 <= k <= d"));
    }
    if !sigma_hat.is_symmetric(1e-8) {
        return Err(Error::invalid("covariance input must be symmetric"));
    }

    let mut best_value = f64::NEG_INFINITY;
    let mut best: Option<(Vec<usize>, Vec<f64>)> = None;
    for_each_combination(d, k, |support| {
        let sub = DenseMatrix::from_fn(k, k, |a, b| sigma_hat.get(support[a], support[b]));
        let (values, vectors) = symmetric_eigen(&sub).expect("principal submatrix is symmetric");
        if values[0] > best_value {
            best_value = values[0];
            best = Some((support.to_vec(), vectors.column(0)));
        }
    });
    let (support, sub_vec) = best.expect("at least one support");
    let mut out = vec![0.0; d];
    for (a, &j) in support.iter().enumerate() {
        out[j] = sub_vec[a];
    }
    // Deterministic sign: first nonzero coordinate positive.
    let scale = norm_inf(&out);
    if out
        .iter()
        .find(|v| v.abs() > 1e-12 * scale)
        .is_some_and(|v| *v < 0.0)
    {
        for v in out.iter_mut() {
            *v = -*v;
        }
    }
    Ok(out)
}
