//! Seeded generation of every synthetic object the experiments use: noise
//! families, designs, structured truths, and model samplers.
//!
//! Reproducibility contract: every sampler is a deterministic function of its
//! parameters and a [`RandomSource`] token. Trial `i` of experiment `e`
//! derives its own stream, so results do not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{norm2, DenseMatrix};
use crate::nonparametric::{sobolev_weight, trig_basis_eval};
use crate::{Error, Result};

/// One standard normal draw; a typed wrapper that keeps call sites terse.
pub(crate) fn standard_normal(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Immutable token identifying one pseudorandom stream.
///
/// Identical `(master_seed, stream_id)` pairs produce identical output
/// sequences; distinct stream ids produce independent streams. Tokens are
/// `Copy` and freely shareable across threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSource {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RandomSource {
    pub fn new(master_seed: u64) -> Self {
        RandomSource {
            master_seed,
            stream_id: 0,
        }
    }

    /// Derives a child stream. Labels are hashed into the stream id, so
    /// nested derivations like `base.stream(e).stream(i)` stay distinct.
    pub fn stream(self, label: u64) -> Self {
        RandomSource {
            master_seed: self.master_seed,
            stream_id: splitmix64(self.stream_id ^ splitmix64(label ^ 0xa076_1d64_78bd_642f)),
        }
    }

    /// Instantiates the generator for this stream.
    pub fn rng(&self) -> ChaCha12Rng {
        let mut seed = [0u8; 32];
        let mut s = self.master_seed;
        for chunk in seed.chunks_mut(8) {
            s = splitmix64(s);
            chunk.copy_from_slice(&s.to_le_bytes());
        }
        let mut rng = ChaCha12Rng::from_seed(seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Mean-zero noise family, sub-Gaussian with variance proxy `sigma^2`.
///
/// Gaussian is sub-Gaussian with its own variance; scaled Rademacher gets the
/// proxy from the bounded-support lemma; the uniform kind draws from
/// `[-sigma, sigma]` so that the same lemma certifies proxy
/// `(b - a)^2 / 4 = sigma^2` (an upper bound on its true variance).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    Gaussian { sigma: f64 },
    Rademacher { sigma: f64 },
    Uniform { sigma: f64 },
}

impl NoiseKind {
    pub fn from_name(name: &str, sigma: f64) -> Result<Self> {
        match name {
            "gaussian" => Ok(NoiseKind::Gaussian { sigma }),
            "rademacher" => Ok(NoiseKind::Rademacher { sigma }),
            "uniform" => Ok(NoiseKind::Uniform { sigma }),
            other => Err(Error::invalid(format!("unknown noise kind '{other}'"))),
        }
    }

    pub fn sigma(&self) -> f64 {
        match *self {
            NoiseKind::Gaussian { sigma }
            | NoiseKind::Rademacher { sigma }
            | NoiseKind::Uniform { sigma } => sigma,
        }
    }
}

/// Draws `n` independent mean-zero variates of the given kind.
pub fn sample_noise(kind: NoiseKind, n: usize, source: RandomSource) -> Result<Vec<f64>> {
    let sigma = kind.sigma();
    if sigma < 0.0 {
        return Err(Error::invalid("noise scale must be non-negative"));
    }
    let mut rng = source.rng();
    let out = match kind {
        NoiseKind::Gaussian { .. } => (0..n)
            .map(|_| sigma * crate::datagen::standard_normal(&mut rng))
            .collect(),
        NoiseKind::Rademacher { .. } => (0..n)
            .map(|_| if rng.random::<bool>() { sigma } else { -sigma })
            .collect(),
        NoiseKind::Uniform { .. } => {
            if sigma == 0.0 {
                vec![0.0; n]
            } else {
                (0..n).map(|_| rng.random_range(-sigma..=sigma)).collect()
            }
        }
    };
    Ok(out)
}

/// n x d design with iid Rademacher entries; every column has norm exactly
/// `sqrt(n)`.
pub fn rademacher_design(n: usize, d: usize, source: RandomSource) -> DenseMatrix {
    let mut rng = source.rng();
    DenseMatrix::from_fn(n, d, |_, _| if rng.random::<bool>() { 1.0 } else { -1.0 })
}

/// Design of the first `m` trigonometric basis functions evaluated on the
/// regular grid `x_i = (i-1)/n`. Satisfies `Phi^T Phi = n I_m` for
/// `m <= n - 1`.
pub fn regular_trig_design(n: usize, m: usize) -> Result<DenseMatrix> {
    if m >= n {
        return Err(Error::invalid(format!(
            "trig design needs m <= n-1, got m={m}, n={n}"
        )));
    }
    Ok(DenseMatrix::from_fn(n, m, |i, j| {
        trig_basis_eval(j + 1, i as f64 / n as f64).expect("basis index >= 1")
    }))
}

/// Vector with exactly `k` nonzeros at random positions, each of magnitude
/// `amplitude * (1 + |standard normal|)` with a random sign. The magnitude
/// floor keeps thresholding tests away from ties.
pub fn sparse_truth(d: usize, k: usize, amplitude: f64, source: RandomSource) -> Result<Vec<f64>> {
    if k > d {
        return Err(Error::invalid(format!("sparsity k={k} exceeds d={d}")));
    }
    let mut rng = source.rng();
    let mut indices: Vec<usize> = (0..d).collect();
    for i in 0..k {
        let j = rng.random_range(i..d);
        indices.swap(i, j);
    }
    let mut theta = vec![0.0; d];
    for &idx in indices.iter().take(k) {
        let mag: f64 = crate::datagen::standard_normal(&mut rng);
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        theta[idx] = sign * amplitude * (1.0 + mag.abs());
    }
    Ok(theta)
}

/// n Gaussian rows with covariance `theta * v v^T + I_d` (spiked model).
pub fn spiked_covariance_sample(
    n: usize,
    d: usize,
    theta: f64,
    v: &[f64],
    source: RandomSource,
) -> Result<DenseMatrix> {
    if theta < 0.0 {
        return Err(Error::invalid("spike strength must be non-negative"));
    }
    if v.len() != d || (norm2(v) - 1.0).abs() > 1e-8 {
        return Err(Error::invalid("spike direction must be unit norm length d"));
    }
    let mut rng = source.rng();
    let sqrt_theta = theta.sqrt();
    let mut out = DenseMatrix::zeros(n, d);
    for i in 0..n {
        let g: f64 = crate::datagen::standard_normal(&mut rng);
        let row = out.row_mut(i);
        for (j, slot) in row.iter_mut().enumerate() {
            let z: f64 = crate::datagen::standard_normal(&mut rng);
            *slot = z + sqrt_theta * g * v[j];
        }
    }
    Ok(out)
}

/// Random coefficient vector on the boundary of the Sobolev ellipsoid: a
/// standard normal direction rescaled so the weighted norm equals `q_budget`
/// exactly. The first coefficient carries weight 1.
pub fn sobolev_truth(
    beta: f64,
    q_budget: f64,
    n_coeffs: usize,
    source: RandomSource,
) -> Result<Vec<f64>> {
    if beta <= 0.5 {
        return Err(Error::invalid("smoothness beta must exceed 1/2"));
    }
    if q_budget <= 0.0 || n_coeffs == 0 {
        return Err(Error::invalid("need positive budget and >= 1 coefficient"));
    }
    let mut rng = source.rng();
    let g: Vec<f64> = (0..n_coeffs)
        .map(|_| crate::datagen::standard_normal(&mut rng))
        .collect();
    let weighted: f64 = g
        .iter()
        .enumerate()
        .map(|(idx, gj)| {
            let w = if idx == 0 {
                1.0
            } else {
                sobolev_weight(idx + 1, beta)
            };
            w * w * gj * gj
        })
        .sum();
    let scale = (q_budget / weighted).sqrt();
    Ok(g.iter().map(|gj| gj * scale).collect())
}

/// One regression problem: design, response, optional ground truth, and the
/// noise scale used to generate it.
#[derive(Debug, Clone)]
pub struct RegressionInstance {
    pub design: DenseMatrix,
    pub response: Vec<f64>,
    pub truth: Option<Vec<f64>>,
    pub sigma: f64,
}

impl RegressionInstance {
    pub fn new(
        design: DenseMatrix,
        response: Vec<f64>,
        truth: Option<Vec<f64>>,
        sigma: f64,
    ) -> Result<Self> {
        if design.rows() != response.len() {
            return Err(Error::invalid("design rows != response length"));
        }
        if let Some(t) = &truth {
            if t.len() != design.cols() {
                return Err(Error::invalid("truth length != design columns"));
            }
        }
        if sigma < 0.0 {
            return Err(Error::invalid("sigma must be non-negative"));
        }
        Ok(RegressionInstance {
            design,
            response,
            truth,
            sigma,
        })
    }

    /// Builds `Y = X theta + noise` with the given noise kind.
    pub fn synthesize(
        design: DenseMatrix,
        truth: Vec<f64>,
        kind: NoiseKind,
        source: RandomSource,
    ) -> Result<Self> {
        let n = design.rows();
        if design.cols() != truth.len() {
            return Err(Error::invalid("truth length != design columns"));
        }
        let noise = sample_noise(kind, n, source)?;
        let mut response = design.matvec(&truth);
        for (r, e) in response.iter_mut().zip(&noise) {
            *r += e;
        }
        Ok(RegressionInstance {
            design,
            response,
            truth: Some(truth),
            sigma: kind.sigma(),
        })
    }

    pub fn n(&self) -> usize {
        self.design.rows()
    }

    pub fn dim(&self) -> usize {
        self.design.cols()
    }

    /// `|X(estimate - truth)|_2^2 / n` when the truth is known.
    pub fn prediction_mse(&self, estimate: &[f64]) -> Option<f64> {
        let truth = self.truth.as_ref()?;
        let diff: Vec<f64> = estimate.iter().zip(truth).map(|(a, b)| a - b).collect();
        let xd = self.design.matvec(&diff);
        Some(xd.iter().map(|v| v * v).sum::<f64>() / self.n() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::matrix_estimation::empirical_covariance;
    use crate::regression::incoherence;

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a = RandomSource::new(7).stream(3);
        let b = RandomSource::new(7).stream(3);
        let c = RandomSource::new(7).stream(4);
        let xs: Vec<u64> = {
            let mut r = a.rng();
            (0..8).map(|_| r.random()).collect()
        };
        let ys: Vec<u64> = {
            let mut r = b.rng();
            (0..8).map(|_| r.random()).collect()
        };
        let zs: Vec<u64> = {
            let mut r = c.rng();
            (0..8).map(|_| r.random()).collect()
        };
        assert_eq!(xs, ys);
        assert_ne!(xs, zs);
    }

    #[test]
    fn noise_zero_scale_and_support() {
        let z = sample_noise(NoiseKind::Gaussian { sigma: 0.0 }, 10, RandomSource::new(1)).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));

        let r = sample_noise(
            NoiseKind::Rademacher { sigma: 1.0 },
            100,
            RandomSource::new(2),
        )
        .unwrap();
        assert!(r.iter().all(|&v| v == 1.0 || v == -1.0));

        let u = sample_noise(NoiseKind::Uniform { sigma: 0.5 }, 100, RandomSource::new(3)).unwrap();
        assert!(u.iter().all(|&v| (-0.5..=0.5).contains(&v)));

        assert!(
            sample_noise(NoiseKind::Gaussian { sigma: -1.0 }, 1, RandomSource::new(4)).is_err()
        );
    }

    #[test]
    fn gaussian_noise_law_of_large_numbers() {
        let n = 100_000;
        let sigma = 2.0;
        let x = sample_noise(NoiseKind::Gaussian { sigma }, n, RandomSource::new(5)).unwrap();
        let mean = x.iter().sum::<f64>() / n as f64;
        let var = x.iter().map(|v| v * v).sum::<f64>() / n as f64 - mean * mean;
        assert!(mean.abs() <= 4.0 * sigma / (n as f64).sqrt());
        assert!((var - sigma * sigma).abs() <= 0.05 * sigma * sigma);
    }

    #[test]
    fn noise_tail_dominated_by_subgaussian_bound() {
        // P(X > 3 sigma) <= exp(-9/2) for proxy sigma^2; checked per kind.
        let n = 1_000_000usize;
        let sigma = 1.0;
        let budget = (-4.5f64).exp() + 3.0 * ((-4.5f64).exp() / n as f64).sqrt();
        for (i, kind) in [
            NoiseKind::Gaussian { sigma },
            NoiseKind::Rademacher { sigma },
            NoiseKind::Uniform { sigma },
        ]
        .into_iter()
        .enumerate()
        {
            let x = sample_noise(kind, n, RandomSource::new(100 + i as u64)).unwrap();
            let exceed = x.iter().filter(|&&v| v > 3.0 * sigma).count() as f64 / n as f64;
            assert!(exceed <= budget, "{kind:?}: {exceed} > {budget}");
        }
    }

    #[test]
    fn rademacher_design_column_norms_and_determinism() {
        let x = rademacher_design(32, 5, RandomSource::new(9));
        for j in 0..5 {
            let norm = norm2(&x.column(j));
            assert!((norm - (32f64).sqrt()).abs() < 1e-12);
        }
        let y = rademacher_design(32, 5, RandomSource::new(9));
        assert_eq!(x, y);
    }

    #[test]
    fn rademacher_design_incoherence_at_theory_sample_size() {
        // n = 2^13 k^2 log d with k = 2, d = 8.
        let (k, d) = (2usize, 8usize);
        let n = ((1 << 13) as f64 * (k * k) as f64 * (d as f64).ln()).ceil() as usize;
        let mut hits = 0;
        for seed in 0..10u64 {
            let x = rademacher_design(n, d, RandomSource::new(40).stream(seed));
            if incoherence(&x) <= 1.0 / (32.0 * k as f64) {
                hits += 1;
            }
        }
        assert!(hits >= 9, "INC held in only {hits}/10 seeds");
    }

    #[test]
    fn trig_design_is_orthogonal() {
        let phi = regular_trig_design(8, 7).unwrap();
        for i in 0..8 {
            assert!(
                (phi.get(i, 0) - 1.0).abs() < 1e-12,
                "first column is phi_1 = 1"
            );
        }
        let gram = phi.transpose().matmul(&phi).scaled(1.0 / 8.0);
        let err = gram.sub(&DenseMatrix::identity(7)).max_abs();
        assert!(err <= 1e-10);
        assert!(phi.max_abs() <= 2f64.sqrt() + 1e-12);
        assert!(regular_trig_design(8, 8).is_err());
    }

    #[test]
    fn sparse_truth_support() {
        let z = sparse_truth(6, 0, 1.0, RandomSource::new(11)).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));

        let full = sparse_truth(6, 6, 1.0, RandomSource::new(12)).unwrap();
        assert_eq!(full.iter().filter(|&&v| v != 0.0).count(), 6);

        for seed in 0..20 {
            let t = sparse_truth(20, 7, 0.5, RandomSource::new(seed)).unwrap();
            assert_eq!(t.iter().filter(|&&v| v != 0.0).count(), 7);
            for &v in t.iter().filter(|&&v| v != 0.0) {
                assert!(v.abs() >= 0.5);
            }
        }
        assert!(sparse_truth(3, 4, 1.0, RandomSource::new(1)).is_err());
    }

    #[test]
    fn spiked_sample_leading_eigenvalue() {
        let d = 5;
        let v = {
            let mut v = vec![0.0; d];
            v[1] = 1.0;
            v
        };
        let x = spiked_covariance_sample(100_000, d, 4.0, &v, RandomSource::new(13)).unwrap();
        let cov = empirical_covariance(&x).unwrap();
        let (eigs, _) = crate::linalg::symmetric_eigen(&cov).unwrap();
        assert!((eigs[0] - 5.0).abs() <= 0.5, "leading eig {}", eigs[0]);

        // theta = 0 gives an isotropic sample.
        let iso =
            spiked_covariance_sample(100_000, 3, 0.0, &[1.0, 0.0, 0.0], RandomSource::new(14))
                .unwrap();
        let cov_iso = empirical_covariance(&iso).unwrap();
        assert!(cov_iso.sub(&DenseMatrix::identity(3)).max_abs() < 0.05);

        let again = spiked_covariance_sample(10, d, 4.0, &v, RandomSource::new(13)).unwrap();
        let again2 = spiked_covariance_sample(10, d, 4.0, &v, RandomSource::new(13)).unwrap();
        assert_eq!(again, again2);

        assert!(spiked_covariance_sample(5, d, 1.0, &vec![0.5; d], RandomSource::new(1)).is_err());
    }

    #[test]
    fn sobolev_truth_on_ellipsoid_boundary() {
        let beta = 1.5;
        let q = 2.0;
        let theta = sobolev_truth(beta, q, 40, RandomSource::new(15)).unwrap();
        let norm = crate::nonparametric::ellipsoid_norm(&theta, beta);
        assert!((norm - q).abs() < 1e-10);

        for (j, &t) in theta.iter().enumerate().skip(1) {
            let w = sobolev_weight(j + 1, beta);
            assert!(t.abs() <= q.sqrt() / w + 1e-12);
        }

        let single = sobolev_truth(2.0, 4.0, 1, RandomSource::new(16)).unwrap();
        assert!((single[0].abs() - 2.0).abs() < 1e-12);

        assert!(sobolev_truth(0.5, 1.0, 5, RandomSource::new(17)).is_err());
    }

    #[test]
    fn regression_instance_checks() {
        let x = rademacher_design(16, 3, RandomSource::new(18));
        let inst = RegressionInstance::synthesize(
            x,
            vec![1.0, -1.0, 0.0],
            NoiseKind::Gaussian { sigma: 0.0 },
            RandomSource::new(19),
        )
        .unwrap();
        let truth = inst.truth.clone().unwrap();
        assert_eq!(inst.prediction_mse(&truth), Some(0.0));
        let zero_mse = inst.prediction_mse(&[0.0, 0.0, 0.0]).unwrap();
        assert!(zero_mse > 0.0);
    }
}
