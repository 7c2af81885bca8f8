//! Minimax lower-bound machinery: divergences, Pinsker and Fano bounds,
//! Varshamov-Gilbert codes and their sparse variant, packing constructions,
//! and simulated hypothesis-testing experiments against the theoretical
//! error floors.

use rand::Rng;

use crate::datagen::RandomSource;
use crate::{Error, Result};

/// Set of binary codewords with an exhaustively certified minimum pairwise
/// Hamming distance.
#[derive(Debug, Clone)]
pub struct BinaryCode {
    pub codewords: Vec<Vec<u8>>,
    pub min_distance: usize,
    pub sparsity: Option<usize>,
}

pub fn hamming_distance(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

impl BinaryCode {
    /// Recomputes the minimum pairwise distance (O(M^2 d)).
    pub fn verify_min_distance(&self) -> usize {
        let mut best = usize::MAX;
        for i in 0..self.codewords.len() {
            for j in (i + 1)..self.codewords.len() {
                best = best.min(hamming_distance(&self.codewords[i], &self.codewords[j]));
            }
        }
        best
    }
}

/// KL divergence between two isotropic Gaussians with common variance:
/// `|theta0 - theta1|_2^2 / (2 sigma^2)`.
pub fn kl_gaussians(theta0: &[f64], theta1: &[f64], sigma_sq: f64) -> Result<f64> {
    if sigma_sq <= 0.0 {
        return Err(Error::invalid("variance must be positive"));
    }
    if theta0.len() != theta1.len() {
        return Err(Error::invalid("mean vectors must share a length"));
    }
    let sq: f64 = theta0
        .iter()
        .zip(theta1)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sq / (2.0 * sigma_sq))
}

/// Finitely supported probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    probabilities: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::invalid("probabilities must be finite and >= 0"));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(DiscreteDistribution { probabilities })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn bernoulli(theta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&theta) {
            return Err(Error::invalid("Bernoulli parameter must be in [0,1]"));
        }
        DiscreteDistribution::new(vec![1.0 - theta, theta])
    }

    /// Product of two distributions on the product support.
    pub fn product(&self, other: &DiscreteDistribution) -> DiscreteDistribution {
        let mut probs = Vec::with_capacity(self.probabilities.len() * other.probabilities.len());
        for &p in &self.probabilities {
            for &q in &other.probabilities {
                probs.push(p * q);
            }
        }
        DiscreteDistribution {
            probabilities: probs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceKind {
    Kl,
    Tv,
    Chi2,
}

/// KL, total variation, or chi-squared divergence between two distributions
/// on the same support. KL and chi-squared return infinity when `p` puts
/// mass where `q` does not.
pub fn f_divergence(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    kind: DivergenceKind,
) -> Result<f64> {
    let (ps, qs) = (p.probabilities(), q.probabilities());
    if ps.len() != qs.len() {
        return Err(Error::invalid("distributions must share a support size"));
    }
    let value = match kind {
        DivergenceKind::Tv => 0.5 * ps.iter().zip(qs).map(|(a, b)| (a - b).abs()).sum::<f64>(),
        DivergenceKind::Kl => {
            let mut total = 0.0;
            for (&a, &b) in ps.iter().zip(qs) {
                if a == 0.0 {
                    continue;
                }
                if b == 0.0 {
                    return Ok(f64::INFINITY);
                }
                total += a * (a / b).ln();
            }
            total
        }
        DivergenceKind::Chi2 => {
            let mut total = 0.0;
            for (&a, &b) in ps.iter().zip(qs) {
                if b == 0.0 {
                    if a == 0.0 {
                        continue;
                    }
                    return Ok(f64::INFINITY);
                }
                let ratio = a / b - 1.0;
                total += ratio * ratio * b;
            }
            total
        }
    };
    Ok(value)
}

/// `sqrt(KL(p, q)) - TV(p, q)`, non-negative by Pinsker's inequality.
pub fn pinsker_gap(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    let kl = f_divergence(p, q, DivergenceKind::Kl)?;
    let tv = f_divergence(p, q, DivergenceKind::Tv)?;
    Ok(kl.sqrt() - tv)
}

/// Fano floor `max(0, 1 - (avg_kl + log 2) / log m)` on the error of any
/// m-ary test.
pub fn fano_lower_bound(m: usize, avg_kl: f64) -> Result<f64> {
    if m < 2 {
        return Err(Error::invalid("need at least two hypotheses"));
    }
    if avg_kl < 0.0 {
        return Err(Error::invalid("average KL must be non-negative"));
    }
    Ok((1.0 - (avg_kl + 2f64.ln()) / (m as f64).ln()).max(0.0))
}

fn random_codeword(d: usize, rng: &mut impl Rng) -> Vec<u8> {
    (0..d).map(|_| rng.random::<bool>() as u8).collect()
}

// Certification is O(M^2 d); refuse code sizes that cannot finish.
const CODE_SIZE_LIMIT: f64 = 1e6;

fn code_size(log_m: f64, round_up: bool) -> Result<usize> {
    if log_m > CODE_SIZE_LIMIT.ln() {
        return Err(Error::invalid(format!(
            "requested code has about e^{log_m:.0} words; the certified construction is \
             limited to {CODE_SIZE_LIMIT:.0}"
        )));
    }
    let m = log_m.exp();
    Ok(if round_up { m.ceil() } else { m.floor() } as usize)
}

fn certified(codewords: &[Vec<u8>], required: usize) -> Option<usize> {
    let mut best = usize::MAX;
    for i in 0..codewords.len() {
        for j in (i + 1)..codewords.len() {
            let dist = hamming_distance(&codewords[i], &codewords[j]);
            if dist < required {
                return None;
            }
            best = best.min(dist);
        }
    }
    Some(if codewords.len() < 2 { required } else { best })
}

/// Draws `M = floor(exp(gamma^2 d))` random codewords and rejection-resamples
/// the whole set until the pairwise distance certificate
/// `>= (1/2 - gamma) d` passes.
pub fn varshamov_gilbert(
    d: usize,
    gamma: f64,
    source: RandomSource,
    max_attempts: usize,
) -> Result<BinaryCode> {
    if !(0.0..0.5).contains(&gamma) || gamma == 0.0 {
        return Err(Error::invalid("gamma must be in (0, 1/2)"));
    }
    let m = code_size(gamma * gamma * d as f64, false)?;
    let required = ((0.5 - gamma) * d as f64).ceil() as usize;
    let mut rng = source.rng();
    for _ in 0..max_attempts {
        let codewords: Vec<Vec<u8>> = (0..m).map(|_| random_codeword(d, &mut rng)).collect();
        if let Some(min_distance) = certified(&codewords, required) {
            return Ok(BinaryCode {
                codewords,
                min_distance,
                sparsity: None,
            });
        }
    }
    Err(Error::ConstructionFailed(format!(
        "no ({m}, {required})-code found in {max_attempts} attempts; retry with a new seed"
    )))
}

fn random_sparse_codeword(d: usize, k: usize, rng: &mut impl Rng) -> Vec<u8> {
    let mut indices: Vec<usize> = (0..d).collect();
    for i in 0..k {
        let j = rng.random_range(i..d);
        indices.swap(i, j);
    }
    let mut word = vec![0u8; d];
    for &idx in indices.iter().take(k) {
        word[idx] = 1;
    }
    word
}

/// Sparse variant: `M = ceil(exp((k/8) log(1 + d/(2k))))` codewords of exact
/// weight `k` with pairwise distance at least `k/2`.
pub fn sparse_varshamov_gilbert(
    d: usize,
    k: usize,
    source: RandomSource,
    max_attempts: usize,
) -> Result<BinaryCode> {
    if k == 0 || 8 * k > d {
        return Err(Error::invalid("need 1 <= k <= d/8"));
    }
    let m = code_size((k as f64 / 8.0) * (1.0 + d as f64 / (2.0 * k as f64)).ln(), true)?;
    let required = k.div_ceil(2);
    let mut rng = source.rng();
    for _ in 0..max_attempts {
        let codewords: Vec<Vec<u8>> = (0..m)
            .map(|_| random_sparse_codeword(d, k, &mut rng))
            .collect();
        if let Some(min_distance) = certified(&codewords, required) {
            return Ok(BinaryCode {
                codewords,
                min_distance,
                sparsity: Some(k),
            });
        }
    }
    Err(Error::ConstructionFailed(format!(
        "no sparse ({m}, {required})-code found in {max_attempts} attempts"
    )))
}

/// Packing of k-sparse hypotheses for the sequence model at noise level
/// `sigma^2 / n`.
#[derive(Debug, Clone)]
pub struct SparsePacking {
    pub hypotheses: Vec<Vec<f64>>,
    /// The Fano bookkeeping constant `alpha = 8 beta^2` matching the scaling
    /// of the hypotheses.
    pub alpha: f64,
    /// Certified lower bound on pairwise squared separations.
    pub min_squared_separation: f64,
}

/// Rescales a sparse Varshamov-Gilbert code into sequence-model hypotheses
/// `theta_j = omega_j * (beta sigma / sqrt(n)) sqrt(log(1 + d/(2k)))`.
pub fn sparse_packing_hypotheses(
    d: usize,
    k: usize,
    sigma: f64,
    n: usize,
    beta: f64,
    source: RandomSource,
) -> Result<SparsePacking> {
    if beta < 0.0 {
        return Err(Error::invalid("beta must be non-negative"));
    }
    let code = sparse_varshamov_gilbert(d, k, source, 1000)?;
    let log_term = (1.0 + d as f64 / (2.0 * k as f64)).ln();
    let scale = beta * sigma / (n as f64).sqrt() * log_term.sqrt();
    let hypotheses: Vec<Vec<f64>> = code
        .codewords
        .iter()
        .map(|w| w.iter().map(|&b| b as f64 * scale).collect())
        .collect();
    let min_squared_separation = scale * scale * code.min_distance as f64;
    Ok(SparsePacking {
        hypotheses,
        alpha: 8.0 * beta * beta,
        min_squared_separation,
    })
}

/// Index of the hypothesis closest to `y` in Euclidean distance; ties go to
/// the smallest index.
pub fn min_distance_test(hypotheses: &[Vec<f64>], y: &[f64]) -> Result<usize> {
    if hypotheses.is_empty() {
        return Err(Error::invalid("need at least one hypothesis"));
    }
    let mut best = (0usize, f64::INFINITY);
    for (idx, h) in hypotheses.iter().enumerate() {
        let dist: f64 = h.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
        if dist < best.1 {
            best = (idx, dist);
        }
    }
    Ok(best.0)
}

/// Outcome of the two-hypothesis simulation.
#[derive(Debug, Clone, Copy)]
pub struct TwoPointReport {
    /// Error rates conditional on each hypothesis being true.
    pub per_hypothesis: [f64; 2],
    pub empirical_error_avg: f64,
    pub empirical_error_max: f64,
    /// Neyman-Pearson floor `(1 - TV)/2` evaluated through Pinsker as
    /// `(1 - sqrt(KL))/2`, clipped at zero.
    pub np_lower: f64,
    /// Second floor `exp(-KL)/4`.
    pub kl_floor: f64,
}

/// Simulates `Y ~ N(theta_j, sigma^2/n I)` with `j` uniform on {0, 1} and
/// applies the minimum-distance test with randomized tie-breaking, so the
/// indistinguishable case `theta0 = theta1` reports error 1/2.
pub fn two_point_experiment(
    theta0: &[f64],
    theta1: &[f64],
    sigma: f64,
    n_eff: usize,
    trials: usize,
    source: RandomSource,
) -> Result<TwoPointReport> {
    if theta0.len() != theta1.len() {
        return Err(Error::invalid("hypotheses must share a dimension"));
    }
    if sigma <= 0.0 || n_eff == 0 || trials == 0 {
        return Err(Error::invalid("need positive sigma, n, and trials"));
    }
    let kl = kl_gaussians(theta0, theta1, sigma * sigma)? * n_eff as f64;
    // KL of the full n-sample experiment via the product rule; equivalently
    // noise scale sigma/sqrt(n) on one observation.
    let noise = sigma / (n_eff as f64).sqrt();
    let hypotheses = [theta0, theta1];
    let mut errors = [0usize; 2];
    let mut counts = [0usize; 2];
    let mut rng = source.rng();
    let dim = theta0.len();
    for _ in 0..trials {
        let j = rng.random_range(0..2usize);
        counts[j] += 1;
        let truth = hypotheses[j];
        let y: Vec<f64> = (0..dim)
            .map(|i| truth[i] + noise * crate::datagen::standard_normal(&mut rng))
            .collect();
        let d0: f64 = theta0.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
        let d1: f64 = theta1.iter().zip(&y).map(|(a, b)| (a - b) * (a - b)).sum();
        let decision = if d0 < d1 {
            0
        } else if d1 < d0 {
            1
        } else {
            usize::from(rng.random::<bool>())
        };
        if decision != j {
            errors[j] += 1;
        }
    }
    let rate = |e: usize, c: usize| if c == 0 { 0.0 } else { e as f64 / c as f64 };
    let per_hypothesis = [rate(errors[0], counts[0]), rate(errors[1], counts[1])];
    Ok(TwoPointReport {
        per_hypothesis,
        empirical_error_avg: (errors[0] + errors[1]) as f64 / trials as f64,
        empirical_error_max: per_hypothesis[0].max(per_hypothesis[1]),
        np_lower: (0.5 * (1.0 - kl.sqrt())).max(0.0),
        kl_floor: 0.25 * (-kl).exp(),
    })
}

/// Average error of the minimum-distance test over uniformly drawn
/// hypotheses in the Gaussian sequence model with noise `sigma^2 / n`.
pub fn multi_hypothesis_error(
    hypotheses: &[Vec<f64>],
    sigma: f64,
    n_eff: usize,
    trials: usize,
    source: RandomSource,
) -> Result<f64> {
    if hypotheses.len() < 2 {
        return Err(Error::invalid("need at least two hypotheses"));
    }
    let noise = sigma / (n_eff as f64).sqrt();
    let dim = hypotheses[0].len();
    let mut rng = source.rng();
    let mut errors = 0usize;
    for _ in 0..trials {
        let j = rng.random_range(0..hypotheses.len());
        let y: Vec<f64> = (0..dim)
            .map(|i| hypotheses[j][i] + noise * crate::datagen::standard_normal(&mut rng))
            .collect();
        if min_distance_test(hypotheses, &y)? != j {
            errors += 1;
        }
    }
    Ok(errors as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_distribution(len: usize, seed: u64) -> DiscreteDistribution {
        let mut rng = RandomSource::new(seed).rng();
        let raw: Vec<f64> = (0..len).map(|_| rng.random_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        DiscreteDistribution::new(raw.iter().map(|v| v / total).collect()).unwrap()
    }

    #[test]
    fn kl_gaussian_values() {
        let a = vec![1.0, 2.0];
        assert_eq!(kl_gaussians(&a, &a, 1.0).unwrap(), 0.0);
        let b = vec![2.0, 3.0];
        assert!((kl_gaussians(&a, &b, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let quarter = kl_gaussians(&a, &b, 4.0).unwrap();
        assert!((quarter - 0.25).abs() < 1e-15);
        assert!(kl_gaussians(&a, &b, 0.0).is_err());
    }

    #[test]
    fn divergence_hand_values() {
        let p = DiscreteDistribution::new(vec![1.0, 0.0]).unwrap();
        let q = DiscreteDistribution::new(vec![0.5, 0.5]).unwrap();
        for kind in [DivergenceKind::Kl, DivergenceKind::Tv, DivergenceKind::Chi2] {
            assert_eq!(f_divergence(&p, &p, kind).unwrap(), 0.0);
        }
        assert!((f_divergence(&p, &q, DivergenceKind::Tv).unwrap() - 0.5).abs() < 1e-15);
        assert!((f_divergence(&p, &q, DivergenceKind::Kl).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((f_divergence(&p, &q, DivergenceKind::Chi2).unwrap() - 1.0).abs() < 1e-15);

        // p puts mass where q has none.
        assert_eq!(
            f_divergence(&q, &p, DivergenceKind::Kl).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn kl_below_chi2_and_tv_identity() {
        for seed in 0..1000u64 {
            let p = random_distribution(6, 2 * seed);
            let q = random_distribution(6, 2 * seed + 1);
            let kl = f_divergence(&p, &q, DivergenceKind::Kl).unwrap();
            let chi2 = f_divergence(&p, &q, DivergenceKind::Chi2).unwrap();
            assert!(kl <= chi2 + 1e-12);

            let tv = f_divergence(&p, &q, DivergenceKind::Tv).unwrap();
            let min_mass: f64 = p
                .probabilities()
                .iter()
                .zip(q.probabilities())
                .map(|(a, b)| a.min(*b))
                .sum();
            assert!((tv - (1.0 - min_mass)).abs() < 1e-12);
        }
    }

    #[test]
    fn kl_factorizes_over_products() {
        let p1 = random_distribution(3, 50);
        let p2 = random_distribution(4, 51);
        let q1 = random_distribution(3, 52);
        let q2 = random_distribution(4, 53);
        let lhs = f_divergence(&p1.product(&p2), &q1.product(&q2), DivergenceKind::Kl).unwrap();
        let rhs = f_divergence(&p1, &q1, DivergenceKind::Kl).unwrap()
            + f_divergence(&p2, &q2, DivergenceKind::Kl).unwrap();
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn pinsker_holds() {
        let p = DiscreteDistribution::new(vec![1.0, 0.0]).unwrap();
        let q = DiscreteDistribution::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(pinsker_gap(&p, &p).unwrap(), 0.0);
        let gap = pinsker_gap(&p, &q).unwrap();
        assert!((gap - (2f64.ln().sqrt() - 0.5)).abs() < 1e-12);
        assert!(gap > 0.0);
        for seed in 0..1000u64 {
            let a = random_distribution(5, 100 + 2 * seed);
            let b = random_distribution(5, 101 + 2 * seed);
            assert!(pinsker_gap(&a, &b).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn bernoulli_kl_quadratic_lower_bound() {
        // KL(Ber(a), Ber(b)) >= 2 (a - b)^2 on a grid.
        for i in 1..20 {
            for j in 1..20 {
                let a = i as f64 / 20.0;
                let b = j as f64 / 20.0;
                let kl = f_divergence(
                    &DiscreteDistribution::bernoulli(a).unwrap(),
                    &DiscreteDistribution::bernoulli(b).unwrap(),
                    DivergenceKind::Kl,
                )
                .unwrap();
                assert!(kl >= 2.0 * (a - b) * (a - b) - 1e-12);
            }
        }
    }

    #[test]
    fn fano_values() {
        let half = fano_lower_bound(4, 0.0).unwrap();
        assert!((half - 0.5).abs() < 1e-15);
        assert_eq!(fano_lower_bound(4, 1e9).unwrap(), 0.0);
        assert!(fano_lower_bound(8, 0.5).unwrap() > fano_lower_bound(4, 0.5).unwrap());
        assert!(fano_lower_bound(1, 0.0).is_err());
    }

    #[test]
    fn vg_code_construction() {
        let code = varshamov_gilbert(32, 0.25, RandomSource::new(60), 500).unwrap();
        assert_eq!(code.codewords.len(), 7); // floor(e^2)
        assert!(code.min_distance >= 8);
        assert_eq!(code.verify_min_distance(), code.min_distance);

        let again = varshamov_gilbert(32, 0.25, RandomSource::new(60), 500).unwrap();
        assert_eq!(code.codewords, again.codewords);

        assert!(varshamov_gilbert(32, 0.5, RandomSource::new(1), 10).is_err());

        // Oversized requests are refused instead of attempting e^180 words.
        assert!(matches!(
            varshamov_gilbert(2000, 0.3, RandomSource::new(1), 10),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn sparse_vg_code_construction() {
        let code = sparse_varshamov_gilbert(64, 8, RandomSource::new(61), 500).unwrap();
        assert_eq!(code.codewords.len(), 5); // ceil(e^{log 5})
        assert!(code.min_distance >= 4);
        for w in &code.codewords {
            assert_eq!(w.iter().filter(|&&b| b == 1).count(), 8);
        }
        assert_eq!(code.verify_min_distance(), code.min_distance);

        assert!(sparse_varshamov_gilbert(64, 9, RandomSource::new(1), 10).is_err());
    }

    #[test]
    fn sparse_packing_scaling() {
        let (d, k, sigma, n, beta) = (64usize, 8usize, 1.0, 100usize, 0.5);
        let packing =
            sparse_packing_hypotheses(d, k, sigma, n, beta, RandomSource::new(62)).unwrap();
        assert!((packing.alpha - 8.0 * beta * beta).abs() < 1e-15);
        let log_term = (1.0 + d as f64 / (2.0 * k as f64)).ln();
        let floor = beta * beta * sigma * sigma / n as f64 * (k as f64 / 2.0) * log_term;
        for (i, a) in packing.hypotheses.iter().enumerate() {
            assert!(a.iter().filter(|&&v| v != 0.0).count() <= k);
            for b in packing.hypotheses.iter().skip(i + 1) {
                let sep: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                assert!(sep >= floor - 1e-12);
                assert!(sep >= packing.min_squared_separation - 1e-12);
            }
        }

        let zero = sparse_packing_hypotheses(d, k, sigma, n, 0.0, RandomSource::new(63)).unwrap();
        assert!(zero.hypotheses.iter().all(|h| h.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn min_distance_test_cases() {
        let hs = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0]];
        assert_eq!(min_distance_test(&hs, &[0.05, 1.9]).unwrap(), 2);
        // Equidistant pair resolves to the smaller index.
        assert_eq!(min_distance_test(&hs, &[0.5, 0.0]).unwrap(), 0);

        // Permuting the list permutes the answer.
        let perm = vec![hs[2].clone(), hs[0].clone(), hs[1].clone()];
        assert_eq!(min_distance_test(&perm, &[0.05, 1.9]).unwrap(), 0);

        assert!(min_distance_test(&[], &[0.0]).is_err());
    }

    #[test]
    fn two_point_degenerate_cases() {
        let a = vec![0.5, -0.5];
        let report = two_point_experiment(&a, &a, 1.0, 10, 20_000, RandomSource::new(64)).unwrap();
        assert!((report.empirical_error_avg - 0.5).abs() < 0.02);

        let far = vec![100.0, 100.0];
        let sep = two_point_experiment(&a, &far, 1.0, 10, 5_000, RandomSource::new(65)).unwrap();
        assert!(sep.empirical_error_max < 1e-3);
        assert_eq!(sep.np_lower, 0.0);
    }

    #[test]
    fn two_point_floor_at_alpha() {
        // |theta1 - theta0|^2 = 8 alpha^2 sigma^2 / n with alpha = 0.2.
        let alpha = 0.2f64;
        let sigma = 1.0;
        let n = 25usize;
        let sep = (8.0 * alpha * alpha * sigma * sigma / n as f64).sqrt();
        let theta0 = vec![0.0, 0.0];
        let theta1 = vec![sep, 0.0];
        let trials = 20_000;
        let report =
            two_point_experiment(&theta0, &theta1, sigma, n, trials, RandomSource::new(66))
                .unwrap();
        let stderr = (0.25 / (trials as f64 / 2.0)).sqrt();
        assert!(
            report.empirical_error_max >= 0.5 - alpha - 3.0 * stderr,
            "max error {} below floor",
            report.empirical_error_max
        );
        assert!((report.np_lower - (0.5 - alpha)).abs() < 1e-12);
        assert!(report.kl_floor > 0.0);
    }

    #[test]
    fn fano_experiment_floor() {
        let alpha = 0.125f64;
        let beta = (alpha / 8.0).sqrt();
        let packing =
            sparse_packing_hypotheses(64, 8, 1.0, 50, beta, RandomSource::new(67)).unwrap();
        assert!((packing.alpha - alpha).abs() < 1e-12);
        let trials = 1000;
        let err =
            multi_hypothesis_error(&packing.hypotheses, 1.0, 50, trials, RandomSource::new(68))
                .unwrap();
        let stderr = (0.25 / trials as f64).sqrt();
        assert!(err >= 0.5 - 2.0 * alpha - 3.0 * stderr, "avg error {err}");
    }
}
