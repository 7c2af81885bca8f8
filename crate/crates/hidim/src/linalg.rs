//! Dense linear algebra primitives shared by the estimator modules: SVD,
//! spectral norms, truncation, principal angles, and pseudo-inverse solves.
//!
//! Everything operates on row-major [`DenseMatrix`] values and plain
//! `Vec<f64>` vectors. All functions are pure.

use crate::{Error, Result};

/// Relative tolerance used to decide numerical rank: singular values below
/// `RANK_TOL * max(m, n) * lambda_1` are treated as zero.
pub const RANK_TOL: f64 = 1e-10;

/// Row-major dense real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds a matrix from row-major data. Length must equal `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::invalid(format!(
                "matrix data length {} does not match {}x{}",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::invalid("ragged rows"));
        }
        Ok(DenseMatrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = DenseMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let mut m = DenseMatrix::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m.set(i, i, e);
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if (self.get(i, j) - self.get(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// `self * other`.
    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                let orow = other.row(k);
                let out_row = out.row_mut(i);
                for (o, &b) in out_row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self * v`.
    pub fn matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `self^T * v`.
    pub fn transpose_matvec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, v.len(), "matvec dimension mismatch");
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            let vi = v[i];
            for (o, &r) in out.iter_mut().zip(row) {
                *o += vi * r;
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Largest entry in absolute value.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

/// Singular value decomposition `A = U D V^T` with orthonormal `U`, `V` and
/// non-increasing positive singular values. Only the numerically nonzero part
/// (rank `r`) is kept: `U` is `m x r` and `V` is `n x r`.
#[derive(Debug, Clone)]
pub struct SvdFactorization {
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub v: DenseMatrix,
}

impl SvdFactorization {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// `U D V^T`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let m = self.u.rows();
        let n = self.v.rows();
        let mut out = DenseMatrix::zeros(m, n);
        for (k, &s) in self.singular_values.iter().enumerate() {
            for i in 0..m {
                let us = self.u.get(i, k) * s;
                if us == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let val = out.get(i, j) + us * self.v.get(j, k);
                    out.set(i, j, val);
                }
            }
        }
        out
    }

    /// Reconstruction from the top `k` singular triples.
    pub fn reconstruct_truncated(&self, k: usize) -> DenseMatrix {
        let kept = k.min(self.rank());
        let truncated = SvdFactorization {
            u: self.u.clone(),
            singular_values: self.singular_values[..kept].to_vec(),
            v: self.v.clone(),
        };
        truncated.reconstruct()
    }
}

/// Computes the SVD by one-sided Jacobi rotations.
///
/// The sign convention makes the factorization deterministic: the first entry
/// of each left singular vector that is nonzero (relative to the vector's
/// largest entry) is non-negative.
pub fn svd(a: &DenseMatrix) -> Result<SvdFactorization> {
    if !a.is_finite() {
        return Err(Error::invalid("svd: non-finite input"));
    }
    let transposed = a.rows() < a.cols();
    let work = if transposed { a.transpose() } else { a.clone() };
    let (m, n) = (work.rows(), work.cols());

    // Work on columns: cols[j] is the j-th column of the working matrix.
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| work.column(j)).collect();
    let mut v = DenseMatrix::identity(n);

    const MAX_SWEEPS: usize = 100;
    const JACOBI_EPS: f64 = 1e-15;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n.saturating_sub(1) {
            for j in (i + 1)..n {
                let (alpha, beta, gamma) = {
                    let (ci, cj) = (&cols[i], &cols[j]);
                    (dot(ci, ci), dot(cj, cj), dot(ci, cj))
                };
                if gamma.abs() <= JACOBI_EPS * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(j);
                let ci = &mut left[i];
                let cj = &mut right[0];
                for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
                    let xi = *x;
                    let yj = *y;
                    *x = c * xi - s * yj;
                    *y = s * xi + c * yj;
                }
                for r in 0..n {
                    let xi = v.get(r, i);
                    let yj = v.get(r, j);
                    v.set(r, i, c * xi - s * yj);
                    v.set(r, j, s * xi + c * yj);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = cols.iter().map(|c| norm2(c)).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let lambda1 = norms[order[0]];
    let tol = RANK_TOL * (m.max(n) as f64) * lambda1;
    let rank = order.iter().take_while(|&&j| norms[j] > tol).count();

    let mut u = DenseMatrix::zeros(m, rank);
    let mut vr = DenseMatrix::zeros(n, rank);
    let mut singular_values = Vec::with_capacity(rank);
    for (k, &j) in order.iter().take(rank).enumerate() {
        let s = norms[j];
        singular_values.push(s);
        let mut ucol: Vec<f64> = cols[j].iter().map(|x| x / s).collect();
        let mut vcol = v.column(j);
        // Sign convention on the left factor of the *original* matrix.
        let signed = if transposed { &vcol } else { &ucol };
        let colmax = norm_inf(signed);
        let flip = signed
            .iter()
            .find(|&&x| x.abs() > 1e-12 * colmax)
            .is_some_and(|&x| x < 0.0);
        if flip {
            for x in ucol.iter_mut() {
                *x = -*x;
            }
            for x in vcol.iter_mut() {
                *x = -*x;
            }
        }
        for i in 0..m {
            u.set(i, k, ucol[i]);
        }
        for i in 0..n {
            vr.set(i, k, vcol[i]);
        }
    }

    if transposed {
        Ok(SvdFactorization {
            u: vr,
            singular_values,
            v: u,
        })
    } else {
        Ok(SvdFactorization {
            u,
            singular_values,
            v: vr,
        })
    }
}

/// Largest singular value.
pub fn operator_norm(a: &DenseMatrix) -> Result<f64> {
    let f = svd(a)?;
    Ok(f.singular_values.first().copied().unwrap_or(0.0))
}

/// Schatten q-norm of the singular value spectrum for `q` in {1, 2, inf}:
/// nuclear, Frobenius, and operator norm respectively.
pub fn schatten_norm(a: &DenseMatrix, q: f64) -> Result<f64> {
    if q == 2.0 {
        // Frobenius: identical to the entrywise l2 norm, no SVD needed.
        return Ok(a.frobenius_norm());
    }
    let f = svd(a)?;
    if q == 1.0 {
        Ok(f.singular_values.iter().sum())
    } else if q == f64::INFINITY {
        Ok(f.singular_values.first().copied().unwrap_or(0.0))
    } else {
        Err(Error::invalid(format!("unsupported Schatten index q={q}")))
    }
}

/// Best rank-`k` approximation: sum of the top `k` singular triples.
pub fn truncate_svd(a: &DenseMatrix, k: usize) -> Result<DenseMatrix> {
    let f = svd(a)?;
    Ok(f.reconstruct_truncated(k))
}

/// Keeps the singular triples with value strictly above `threshold`.
pub fn hard_threshold_spectrum(a: &DenseMatrix, threshold: f64) -> Result<DenseMatrix> {
    if threshold < 0.0 {
        return Err(Error::invalid("negative spectral threshold"));
    }
    let f = svd(a)?;
    let kept = f
        .singular_values
        .iter()
        .take_while(|&&s| s > threshold)
        .count();
    Ok(f.reconstruct_truncated(kept))
}

fn check_unit(u: &[f64], name: &str) -> Result<()> {
    if (norm2(u) - 1.0).abs() > 1e-8 {
        return Err(Error::invalid(format!("{name} is not unit norm")));
    }
    Ok(())
}

/// Sine of the principal angle between the spans of two unit vectors.
/// Sign-invariant: `u` and `-u` give the same value.
pub fn principal_angle_sin(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::invalid("principal angle: length mismatch"));
    }
    check_unit(u, "u")?;
    check_unit(v, "v")?;
    let c = dot(u, v).abs().min(1.0);
    Ok((1.0 - c * c).max(0.0).sqrt())
}

/// `min over signs of |eps*u - v|_2`, the sign-aligned distance. Satisfies
/// `sign_aligned_distance(u, v)^2 <= 2 * sin^2(angle(u, v))` for unit inputs.
pub fn sign_aligned_distance(u: &[f64], v: &[f64]) -> f64 {
    let c = dot(u, v);
    let plus: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
    let minus = plus + 4.0 * c;
    plus.min(minus).max(0.0).sqrt()
}

/// Minimum-norm least squares solution `(X^T X)^+ X^T y` via the SVD.
pub fn pseudo_inverse_solve(x: &DenseMatrix, y: &[f64]) -> Result<Vec<f64>> {
    if x.rows() != y.len() {
        return Err(Error::invalid(format!(
            "pseudo-inverse solve: {} rows vs response length {}",
            x.rows(),
            y.len()
        )));
    }
    let f = svd(x)?;
    let uty = f.u.transpose_matvec(y);
    let scaled: Vec<f64> = uty
        .iter()
        .zip(&f.singular_values)
        .map(|(c, s)| c / s)
        .collect();
    Ok(f.v.matvec(&scaled))
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues sorted non-increasing and the matching eigenvector
/// columns. This is a distinct code path from [`svd`], which makes it usable
/// as an independent cross-check in tests.
pub fn symmetric_eigen(a: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    if !a.is_finite() {
        return Err(Error::invalid("eigen: non-finite input"));
    }
    if !a.is_symmetric(1e-8) {
        return Err(Error::invalid("eigen: matrix is not symmetric"));
    }
    let n = a.rows();
    let mut m = a.clone();
    // Symmetrize exactly so rotations preserve symmetry bit-for-bit.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m.get(i, j) + m.get(j, i));
            m.set(i, j, avg);
            m.set(j, i, avg);
        }
    }
    let mut q = DenseMatrix::identity(n);

    const MAX_SWEEPS: usize = 100;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(m.get(i, j).abs());
            }
        }
        let scale = m.max_abs();
        if off <= 1e-14 * scale.max(1e-300) {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for r in (p + 1)..n {
                let apq = m.get(p, r);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(r, r);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, r);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, r, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(r, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(r, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let qkp = q.get(k, p);
                    let qkq = q.get(k, r);
                    q.set(k, p, c * qkp - s * qkq);
                    q.set(k, r, s * qkp + c * qkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m.get(i, i)).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());

    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (k, &j) in order.iter().enumerate() {
        let mut col = q.column(j);
        let colmax = norm_inf(&col);
        let flip = col
            .iter()
            .find(|&&x| x.abs() > 1e-12 * colmax)
            .is_some_and(|&x| x < 0.0);
        if flip {
            for x in col.iter_mut() {
                *x = -*x;
            }
        }
        for i in 0..n {
            vectors.set(i, k, col[i]);
        }
    }
    Ok((values, vectors))
}

/// Cholesky factor `L` with `A = L L^T`, or `None` when the matrix is not
/// positive definite.
pub fn cholesky(a: &DenseMatrix) -> Option<DenseMatrix> {
    if a.rows() != a.cols() {
        return None;
    }
    let n = a.rows();
    let mut l = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a.get(i, j);
            for k in 0..j {
                sum -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l.set(i, j, sum.sqrt());
            } else {
                l.set(i, j, sum / l.get(j, j));
            }
        }
    }
    Some(l)
}

/// `log det A` for symmetric positive definite `A`.
pub fn log_det_spd(a: &DenseMatrix) -> Option<f64> {
    let l = cholesky(a)?;
    Some(2.0 * (0..a.rows()).map(|i| l.get(i, i).ln()).sum::<f64>())
}

/// Solves `A x = b` for symmetric positive definite `A`.
pub fn spd_solve(a: &DenseMatrix, b: &[f64]) -> Option<Vec<f64>> {
    let l = cholesky(a)?;
    let n = a.rows();
    // Forward substitution L y = b.
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l.get(i, k) * y[k];
        }
        y[i] = sum / l.get(i, i);
    }
    // Back substitution L^T x = y.
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in (i + 1)..n {
            sum -= l.get(k, i) * x[k];
        }
        x[i] = sum / l.get(i, i);
    }
    Some(x)
}

/// Inverse of a symmetric positive definite matrix.
pub fn spd_inverse(a: &DenseMatrix) -> Option<DenseMatrix> {
    let n = a.rows();
    let mut inv = DenseMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        let col = spd_solve(a, &e)?;
        for i in 0..n {
            inv.set(i, j, col[i]);
        }
    }
    // Clean up asymmetry from rounding.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (inv.get(i, j) + inv.get(j, i));
            inv.set(i, j, avg);
            inv.set(j, i, avg);
        }
    }
    Some(inv)
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn matrix(max_dim: usize) -> impl Strategy<Value = DenseMatrix> {
        (1..=max_dim, 1..=max_dim).prop_flat_map(|(m, n)| {
            proptest::collection::vec(-10.0f64..10.0, m * n)
                .prop_map(move |data| DenseMatrix::from_vec(m, n, data).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn svd_reconstructs_any_matrix(a in matrix(8)) {
            let f = svd(&a).unwrap();
            let err = f.reconstruct().sub(&a).frobenius_norm();
            prop_assert!(err <= 1e-8 * a.frobenius_norm().max(1e-12));
        }

        #[test]
        fn truncation_error_is_the_spectral_tail(a in matrix(6), k in 0usize..6) {
            let f = svd(&a).unwrap();
            let trunc = f.reconstruct_truncated(k);
            let err_sq = trunc.sub(&a).frobenius_norm().powi(2);
            let tail: f64 = f.singular_values.iter().skip(k).map(|s| s * s).sum();
            prop_assert!((err_sq - tail).abs() <= 1e-8 * (1.0 + tail));
        }

        #[test]
        fn spectral_norm_ordering(a in matrix(6)) {
            let nuclear = schatten_norm(&a, 1.0).unwrap();
            let frob = schatten_norm(&a, 2.0).unwrap();
            let op = schatten_norm(&a, f64::INFINITY).unwrap();
            prop_assert!(nuclear + 1e-10 >= frob);
            prop_assert!(frob + 1e-10 >= op);
        }
    }
}
