//! Closed-form tail-bound evaluators plus the Monte Carlo machinery that
//! measures empirical exceedance against them: epsilon-net construction,
//! median-of-means, and random-projection isometry checks.

use rand::Rng;
use rayon::prelude::*;

use crate::datagen::RandomSource;
use crate::linalg::{dot, norm2};
use crate::{Error, Result};

/// Empirical exceedance frequencies next to a theoretical bound on a grid.
#[derive(Debug, Clone)]
pub struct TailComparison {
    pub t_grid: Vec<f64>,
    pub empirical_freq: Vec<f64>,
    pub theoretical_bound: Vec<f64>,
    pub trials: usize,
}

impl TailComparison {
    /// Whether every grid point satisfies
    /// `empirical <= bound + slack_sd * stderr`.
    pub fn dominated(&self, slack_sd: f64) -> bool {
        self.empirical_freq
            .iter()
            .zip(&self.theoretical_bound)
            .all(|(&freq, &bound)| {
                let stderr = (freq * (1.0 - freq) / self.trials as f64).max(0.0).sqrt();
                freq <= bound + slack_sd * stderr
            })
    }
}

/// One-sided Hoeffding bound `exp(-2 n^2 t^2 / sum (b_i - a_i)^2)` for the
/// mean of independent variables with `X_i` in `[a_i, b_i]`, clipped to
/// [0, 1].
pub fn hoeffding_bound(n: usize, ranges: &[(f64, f64)], t: f64) -> Result<f64> {
    if ranges.is_empty() {
        return Err(Error::invalid("hoeffding: empty ranges"));
    }
    if t < 0.0 {
        return Err(Error::invalid("hoeffding: t must be non-negative"));
    }
    let mut sum_sq = 0.0;
    for &(a, b) in ranges {
        if b < a {
            return Err(Error::invalid("hoeffding: range with b < a"));
        }
        sum_sq += (b - a) * (b - a);
    }
    if sum_sq == 0.0 {
        return Ok(if t > 0.0 { 0.0 } else { 1.0 });
    }
    let nf = n as f64;
    Ok((-2.0 * nf * nf * t * t / sum_sq).exp().clamp(0.0, 1.0))
}

/// Bernstein bound `exp(-(n/2) min(t^2/lambda^2, t/lambda))` for means of
/// sub-exponential variables with parameter `lambda`.
pub fn bernstein_bound(n: usize, lambda: f64, t: f64) -> Result<f64> {
    if lambda <= 0.0 {
        return Err(Error::invalid("bernstein: lambda must be positive"));
    }
    if t < 0.0 {
        return Err(Error::invalid("bernstein: t must be non-negative"));
    }
    let ratio = t / lambda;
    Ok((-(n as f64) / 2.0 * (ratio * ratio).min(ratio)).exp())
}

/// Expected-maximum bound for `n_vars` sub-Gaussian variables with proxy
/// `sigma^2`: `sigma sqrt(2 log N)`, or `sigma sqrt(2 log 2N)` for the
/// maximum of absolute values.
pub fn max_subgaussian_bound(n_vars: usize, sigma: f64, absolute: bool) -> f64 {
    let count = if absolute { 2 * n_vars } else { n_vars };
    sigma * (2.0 * (count as f64).ln()).sqrt()
}

/// Upper `1 - delta` quantile bound for the chi-squared distribution with
/// `n` degrees of freedom: `n + 2 sqrt(n log(1/delta)) + 2 log(1/delta)`.
pub fn chi2_upper_quantile(n: usize, delta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&delta) || delta == 0.0 {
        return Err(Error::invalid("chi2 quantile: delta must be in (0,1)"));
    }
    let log_inv = (1.0 / delta).ln();
    let nf = n as f64;
    Ok(nf + 2.0 * (nf * log_inv).sqrt() + 2.0 * log_inv)
}

/// Which of the three displayed matrix tail bounds to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixBernsteinForm {
    /// `d exp(-(sigma^2/R^2) h(R t / sigma^2))`, `h(u) = (1+u)log(1+u) - u`.
    Bennett,
    /// `d exp(-t^2/2 / (sigma^2 + R t / 3))`.
    Bernstein,
    /// Sub-Gaussian branch for `t <= sigma^2/R`, sub-exponential after.
    Split,
}

impl MatrixBernsteinForm {
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "bennett" => Ok(Self::Bennett),
            "bernstein" => Ok(Self::Bernstein),
            "split" => Ok(Self::Split),
            other => Err(Error::invalid(format!(
                "unknown matrix Bernstein form '{other}'"
            ))),
        }
    }
}

/// `h(u) = (1+u) log(1+u) - u` from the Bennett-form matrix bound.
pub fn bennett_h(u: f64) -> f64 {
    (1.0 + u) * (1.0 + u).ln() - u
}

/// Tail bound for `lambda_max` of a sum of independent centered symmetric
/// `d x d` matrices with `lambda_max(X_i) <= r_bound` and total variance
/// `variance = || sum E X_i^2 ||_op`.
pub fn matrix_bernstein_bound(
    d: usize,
    variance: f64,
    r_bound: f64,
    t: f64,
    form: MatrixBernsteinForm,
) -> Result<f64> {
    if variance <= 0.0 || r_bound <= 0.0 {
        return Err(Error::invalid(
            "matrix bernstein: variance and r_bound must be positive",
        ));
    }
    if t < 0.0 {
        return Err(Error::invalid("matrix bernstein: t must be non-negative"));
    }
    let df = d as f64;
    let value = match form {
        MatrixBernsteinForm::Bennett => {
            df * (-(variance / (r_bound * r_bound)) * bennett_h(r_bound * t / variance)).exp()
        }
        MatrixBernsteinForm::Bernstein => {
            df * (-(t * t / 2.0) / (variance + r_bound * t / 3.0)).exp()
        }
        MatrixBernsteinForm::Split => {
            if t <= variance / r_bound {
                df * (-3.0 * t * t / (8.0 * variance)).exp()
            } else {
                df * (-3.0 * t / (8.0 * r_bound)).exp()
            }
        }
    };
    Ok(value)
}

fn uniform_in_ball(dim: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut x: Vec<f64> = (0..dim)
        .map(|_| crate::datagen::standard_normal(rng))
        .collect();
    let norm = norm2(&x);
    if norm == 0.0 {
        return x;
    }
    let radius: f64 = rng.random::<f64>().powf(1.0 / dim as f64);
    for v in x.iter_mut() {
        *v *= radius / norm;
    }
    x
}

/// Greedy packing of the unit ball at separation `eps`, started at the
/// origin and extended with uniform candidates until `sample_budget`
/// consecutive candidates fail to be addable. The result is a maximal
/// packing with high probability, hence a covering at radius `2 eps`.
pub fn epsilon_net_ball(
    dim: usize,
    eps: f64,
    sample_budget: usize,
    source: RandomSource,
) -> Result<Vec<Vec<f64>>> {
    if !(0.0..1.0).contains(&eps) || eps == 0.0 {
        return Err(Error::invalid("epsilon must be in (0,1)"));
    }
    if dim == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    let mut rng = source.rng();
    let mut net: Vec<Vec<f64>> = vec![vec![0.0; dim]];
    let mut consecutive_failures = 0;
    while consecutive_failures < sample_budget {
        let candidate = uniform_in_ball(dim, &mut rng);
        let addable = net.iter().all(|p| {
            let dist_sq: f64 = p
                .iter()
                .zip(&candidate)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            dist_sq > eps * eps
        });
        if addable {
            net.push(candidate);
            consecutive_failures = 0;
        } else {
            consecutive_failures += 1;
        }
    }
    Ok(net)
}

/// Median of per-group means. For an even number of groups the median is the
/// average of the two middle values.
pub fn median_of_means(samples: &[f64], groups: usize) -> Result<f64> {
    if groups == 0 || !samples.len().is_multiple_of(groups) {
        return Err(Error::invalid(
            "sample count must be divisible by the number of groups",
        ));
    }
    let per = samples.len() / groups;
    let mut means: Vec<f64> = samples
        .chunks(per)
        .map(|chunk| chunk.iter().sum::<f64>() / per as f64)
        .collect();
    means.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = groups / 2;
    Ok(if groups % 2 == 1 {
        means[mid]
    } else {
        0.5 * (means[mid - 1] + means[mid])
    })
}

/// Outcome of a random-projection distance-preservation check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JlReport {
    pub violations: usize,
    pub total_pairs: usize,
}

/// Applies `P = sqrt(d/k) * (projection onto the first k coordinates after a
/// random rotation)` and counts the point pairs whose squared distances leave
/// the `(1 +/- eps)` band.
pub fn jl_isometry_check(
    points: &[Vec<f64>],
    k: usize,
    eps: f64,
    source: RandomSource,
) -> Result<JlReport> {
    let d = points.first().map_or(0, |p| p.len());
    if d == 0 || points.iter().any(|p| p.len() != d) {
        return Err(Error::invalid("points must share a positive dimension"));
    }
    if k == 0 || k > d {
        return Err(Error::invalid(format!(
            "need 1 <= k <= d, got k={k}, d={d}"
        )));
    }
    let mut rng = source.rng();

    // Random rotation: orthonormalize a Gaussian matrix by modified
    // Gram-Schmidt; its first k rows give the projection.
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(k);
    while basis.len() < k {
        let mut v: Vec<f64> = (0..d)
            .map(|_| crate::datagen::standard_normal(&mut rng))
            .collect();
        for b in &basis {
            let proj = dot(&v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= proj * bi;
            }
        }
        let norm = norm2(&v);
        if norm < 1e-8 {
            continue;
        }
        for vi in v.iter_mut() {
            *vi /= norm;
        }
        basis.push(v);
    }

    let scale = (d as f64 / k as f64).sqrt();
    let projected: Vec<Vec<f64>> = points
        .iter()
        .map(|p| basis.iter().map(|b| scale * dot(b, p)).collect())
        .collect();

    let mut violations = 0;
    let mut total_pairs = 0;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            total_pairs += 1;
            let orig: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let mapped: f64 = projected[i]
                .iter()
                .zip(&projected[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if mapped < (1.0 - eps) * orig || mapped > (1.0 + eps) * orig {
                violations += 1;
            }
        }
    }
    Ok(JlReport {
        violations,
        total_pairs,
    })
}

/// Runs `trials` seeded evaluations of a scalar statistic and records, for
/// each grid point `t`, the fraction of trials with `statistic > t`,
/// alongside `bound(t)`. Trial `i` owns the derived stream `i`, so the result
/// does not depend on scheduling.
pub fn empirical_exceedance<F, B>(
    statistic: F,
    t_grid: &[f64],
    trials: usize,
    source: RandomSource,
    bound: B,
) -> Result<TailComparison>
where
    F: Fn(RandomSource) -> f64 + Sync,
    B: Fn(f64) -> f64,
{
    if t_grid.is_empty() {
        return Err(Error::invalid("empty t grid"));
    }
    if trials < 100 {
        return Err(Error::invalid("need at least 100 trials"));
    }
    let values: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|i| statistic(source.stream(i as u64)))
        .collect();
    let empirical_freq: Vec<f64> = t_grid
        .iter()
        .map(|&t| values.iter().filter(|&&v| v > t).count() as f64 / trials as f64)
        .collect();
    let theoretical_bound: Vec<f64> = t_grid.iter().map(|&t| bound(t)).collect();
    Ok(TailComparison {
        t_grid: t_grid.to_vec(),
        empirical_freq,
        theoretical_bound,
        trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{sample_noise, NoiseKind};
    use crate::linalg::{symmetric_eigen, DenseMatrix};

    #[test]
    fn hoeffding_values() {
        let ranges = vec![(-1.0, 1.0)];
        assert_eq!(hoeffding_bound(1, &ranges, 0.0).unwrap(), 1.0);
        let b = hoeffding_bound(1, &ranges, 1.0).unwrap();
        assert!((b - (-0.5f64).exp()).abs() < 1e-12);

        let mut last = 1.0;
        for i in 0..20 {
            let t = i as f64 * 0.1;
            let v = hoeffding_bound(5, &vec![(-1.0, 1.0); 5], t).unwrap();
            assert!(v <= last + 1e-15);
            last = v;
        }
        assert!(hoeffding_bound(1, &[], 0.5).is_err());
        assert!(hoeffding_bound(1, &[(1.0, -1.0)], 0.5).is_err());
    }

    #[test]
    fn bernstein_values() {
        assert_eq!(bernstein_bound(3, 1.0, 0.0).unwrap(), 1.0);
        let kink = bernstein_bound(4, 1.0, 1.0).unwrap();
        assert!((kink - (-2.0f64).exp()).abs() < 1e-12);
        let linear = bernstein_bound(2, 1.0, 4.0).unwrap();
        assert!((linear - (-4.0f64).exp()).abs() < 1e-12);
        assert!(bernstein_bound(2, 0.0, 1.0).is_err());
    }

    #[test]
    fn max_bound_values() {
        assert_eq!(max_subgaussian_bound(1, 2.0, false), 0.0);
        let abs1 = max_subgaussian_bound(1, 2.0, true);
        assert!((abs1 - 2.0 * (2.0 * 2f64.ln()).sqrt()).abs() < 1e-12);
        assert!(max_subgaussian_bound(8, 1.0, false) > max_subgaussian_bound(4, 1.0, false));
    }

    #[test]
    fn chi2_quantile_values() {
        let near_one = chi2_upper_quantile(7, 1.0 - 1e-12).unwrap();
        assert!((near_one - 7.0).abs() < 1e-4);
        let e_inv = chi2_upper_quantile(1, (-1.0f64).exp()).unwrap();
        assert!((e_inv - 5.0).abs() < 1e-12);
        assert!(chi2_upper_quantile(1, 0.0).is_err());
        assert!(chi2_upper_quantile(1, 1.0).is_err());
    }

    #[test]
    fn chi2_quantile_dominates_simulation() {
        let (n, delta, trials) = (10usize, 0.05, 100_000usize);
        let bound = chi2_upper_quantile(n, delta).unwrap();
        let draws = sample_noise(
            NoiseKind::Gaussian { sigma: 1.0 },
            trials * n,
            RandomSource::new(2024),
        )
        .unwrap();
        let exceed = draws
            .chunks(n)
            .filter(|chunk| chunk.iter().map(|z| z * z).sum::<f64>() > bound)
            .count() as f64
            / trials as f64;
        let stderr = (delta * (1.0 - delta) / trials as f64).sqrt();
        assert!(exceed <= delta + 3.0 * stderr, "exceedance {exceed}");
    }

    #[test]
    fn matrix_bernstein_forms_ordering_and_h() {
        assert_eq!(bennett_h(0.0), 0.0);
        // Strict convexity of h on a grid: midpoint below average.
        for i in 1..20 {
            let u = i as f64 * 0.3;
            let mid = bennett_h(u);
            let avg = 0.5 * (bennett_h(u - 0.1) + bennett_h(u + 0.1));
            assert!(mid < avg);
        }

        for &t in &[0.0, 0.5, 1.0, 2.0, 5.0, 20.0] {
            for &(var, r) in &[(1.0, 1.0), (4.0, 0.5), (0.25, 2.0)] {
                let bennett =
                    matrix_bernstein_bound(8, var, r, t, MatrixBernsteinForm::Bennett).unwrap();
                let bern =
                    matrix_bernstein_bound(8, var, r, t, MatrixBernsteinForm::Bernstein).unwrap();
                let split =
                    matrix_bernstein_bound(8, var, r, t, MatrixBernsteinForm::Split).unwrap();
                if t == 0.0 {
                    assert_eq!(bennett, 8.0);
                    assert_eq!(bern, 8.0);
                    assert_eq!(split, 8.0);
                }
                assert!(bennett <= bern + 1e-12, "bennett {bennett} vs {bern}");
                assert!(bern <= split + 1e-12, "bernstein {bern} vs split {split}");
            }
        }
        assert!(MatrixBernsteinForm::from_name("nope").is_err());
    }

    #[test]
    fn epsilon_net_construction() {
        let net = epsilon_net_ball(1, 0.99, 2000, RandomSource::new(5)).unwrap();
        assert!(net[0].iter().all(|&v| v == 0.0));
        for i in 0..net.len() {
            for j in (i + 1)..net.len() {
                let dist: f64 = net[i]
                    .iter()
                    .zip(&net[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                assert!(dist > 0.99);
            }
        }

        let net2 = epsilon_net_ball(2, 0.5, 5000, RandomSource::new(6)).unwrap();
        assert!(
            net2.len() <= 36,
            "packing size {} above (3/eps)^d",
            net2.len()
        );
        for p in &net2 {
            assert!(norm2(p) <= 1.0 + 1e-12);
        }

        // Maximal packing covers at radius 2 eps.
        let mut rng = RandomSource::new(7).rng();
        for _ in 0..10_000 {
            let q = uniform_in_ball(2, &mut rng);
            let nearest = net2
                .iter()
                .map(|p| {
                    p.iter()
                        .zip(&q)
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(f64::INFINITY, f64::min);
            assert!(nearest <= 1.0, "uncovered point at distance {nearest}");
        }

        assert!(epsilon_net_ball(2, 1.5, 10, RandomSource::new(1)).is_err());
    }

    #[test]
    fn median_of_means_cases() {
        assert_eq!(median_of_means(&[2.0; 12], 4).unwrap(), 2.0);
        let xs = vec![1.0, 2.0, 3.0, 10.0];
        assert_eq!(median_of_means(&xs, 1).unwrap(), 4.0);
        assert!(median_of_means(&xs, 3).is_err());
        // Even group count averages the middle two group means.
        let ys = vec![1.0, 3.0, 5.0, 7.0];
        assert_eq!(median_of_means(&ys, 4).unwrap(), 4.0);
    }

    #[test]
    fn median_of_means_concentration() {
        let delta: f64 = 0.05;
        let groups = (8.0 * (1.0 / delta).ln()).round() as usize; // 24
        let n = groups * 416; // 9984 samples
        let bound = 4.0 * (2.0 * (1.0 / delta).ln() / n as f64).sqrt();
        let runs = 200;
        let mut hits = 0;
        for seed in 0..runs {
            let xs = sample_noise(
                NoiseKind::Gaussian { sigma: 1.0 },
                n,
                RandomSource::new(90_000).stream(seed),
            )
            .unwrap();
            if median_of_means(&xs, groups).unwrap().abs() <= bound {
                hits += 1;
            }
        }
        assert!(
            hits as f64 >= 0.95 * runs as f64,
            "{hits}/{runs} runs inside"
        );
    }

    #[test]
    fn jl_exact_when_k_equals_d() {
        let points: Vec<Vec<f64>> = (0..10)
            .map(|i| (0..6).map(|j| ((i * 6 + j) as f64).sin()).collect())
            .collect();
        let report = jl_isometry_check(&points, 6, 0.5, RandomSource::new(11)).unwrap();
        assert_eq!(report.violations, 0);
        assert_eq!(report.total_pairs, 45);
    }

    #[test]
    fn jl_zero_eps_breaks_everywhere() {
        let points: Vec<Vec<f64>> = (0..8)
            .map(|i| (0..12).map(|j| ((i + 2 * j) as f64).cos()).collect())
            .collect();
        let report = jl_isometry_check(&points, 4, 0.0, RandomSource::new(12)).unwrap();
        assert!(report.violations as f64 >= 0.99 * report.total_pairs as f64);
        assert!(jl_isometry_check(&points, 13, 0.5, RandomSource::new(1)).is_err());
    }

    #[test]
    fn jl_theorem_scale_projection_preserves_distances() {
        // k = ceil(C log n / eps^2) with C = 24, eps = 0.5 needs d >= 376.
        let (n_points, d, eps) = (50usize, 400usize, 0.5);
        let k = (24.0 * (n_points as f64).ln() / (eps * eps)).ceil() as usize;
        assert!(k <= d);
        let mut rng = RandomSource::new(13).rng();
        let points: Vec<Vec<f64>> = (0..n_points)
            .map(|_| {
                (0..d)
                    .map(|_| crate::datagen::standard_normal(&mut rng))
                    .collect()
            })
            .collect();
        let mut perfect = 0;
        for seed in 0..10u64 {
            let report =
                jl_isometry_check(&points, k, eps, RandomSource::new(500).stream(seed)).unwrap();
            if report.violations == 0 {
                perfect += 1;
            }
        }
        assert!(perfect >= 9, "zero violations in {perfect}/10 seeds");
    }

    #[test]
    fn exceedance_constant_and_normal() {
        let grid = vec![0.5, 2.0];
        let cmp =
            empirical_exceedance(|_| 1.0, &grid, 200, RandomSource::new(14), |_| 1.0).unwrap();
        assert_eq!(cmp.empirical_freq, vec![1.0, 0.0]);

        let trials = 20_000;
        let cmp = empirical_exceedance(
            |src| {
                let mut rng = src.rng();
                crate::datagen::standard_normal(&mut rng)
            },
            &[0.0],
            trials,
            RandomSource::new(15),
            |_| 1.0,
        )
        .unwrap();
        let stderr = (0.25 / trials as f64).sqrt();
        assert!((cmp.empirical_freq[0] - 0.5).abs() <= 3.0 * stderr);

        assert!(empirical_exceedance(|_| 0.0, &[], 200, RandomSource::new(1), |_| 1.0).is_err());
        assert!(empirical_exceedance(|_| 0.0, &[0.0], 99, RandomSource::new(1), |_| 1.0).is_err());
    }

    #[test]
    fn hoeffding_dominates_bounded_means() {
        // Means of n = 50 draws for each noise kind, 1e5 trials. The range
        // (-sigma, sigma) certifies variance proxy sigma^2 for all three.
        let n = 50usize;
        let trials = 100_000usize;
        let grid: Vec<f64> = (1..=20).map(|i| i as f64 * 0.05).collect();
        let ranges = vec![(-1.0, 1.0); n];
        for (idx, kind) in [
            NoiseKind::Gaussian { sigma: 1.0 },
            NoiseKind::Rademacher { sigma: 1.0 },
            NoiseKind::Uniform { sigma: 1.0 },
        ]
        .into_iter()
        .enumerate()
        {
            let cmp = empirical_exceedance(
                |src| {
                    let x = sample_noise(kind, n, src).unwrap();
                    x.iter().sum::<f64>() / n as f64
                },
                &grid,
                trials,
                RandomSource::new(16).stream(idx as u64),
                |t| hoeffding_bound(n, &ranges, t).unwrap(),
            )
            .unwrap();
            assert!(cmp.dominated(3.0), "{kind:?} exceeded the Hoeffding bound");
        }
    }

    #[test]
    fn bernstein_dominates_laplace_means() {
        // Laplace(1) is subE(2); compare mean tails with lambda = 2.
        let n = 20usize;
        let lambda = 2.0;
        let trials = 100_000usize;
        let grid: Vec<f64> = (1..=15).map(|i| i as f64 * 0.1).collect();
        let cmp = empirical_exceedance(
            |src| {
                let mut rng = src.rng();
                let mut total = 0.0;
                for _ in 0..n {
                    let u: f64 = rng.random::<f64>() - 0.5;
                    total += -u.signum() * (1.0 - 2.0 * u.abs()).ln();
                }
                total / n as f64
            },
            &grid,
            trials,
            RandomSource::new(17),
            |t| bernstein_bound(n, lambda, t).unwrap(),
        )
        .unwrap();
        assert!(cmp.dominated(3.0));
    }

    #[test]
    fn matrix_bernstein_dominates_diagonal_ensemble() {
        // Sum of 200 diagonal Rademacher matrices (R = 1, already centered,
        // sum of E X_i^2 = 200 I). Reduced trial count; the acceptance suite
        // runs the full experiment.
        let (d, n_sum, trials) = (8usize, 200usize, 5000usize);
        let variance = n_sum as f64;
        let grid: Vec<f64> = (1..=10).map(|i| i as f64 * 6.0).collect();
        let cmp = empirical_exceedance(
            |src| {
                let mut rng = src.rng();
                let mut diag = vec![0.0f64; d];
                for _ in 0..n_sum {
                    for slot in diag.iter_mut() {
                        *slot += if rng.random::<bool>() { 1.0 } else { -1.0 };
                    }
                }
                let mat = DenseMatrix::diagonal(&diag);
                let (eigs, _) = symmetric_eigen(&mat).unwrap();
                eigs[0]
            },
            &grid,
            trials,
            RandomSource::new(18),
            |t| {
                matrix_bernstein_bound(d, variance, 1.0, t, MatrixBernsteinForm::Bernstein)
                    .unwrap()
                    .min(1.0)
            },
        )
        .unwrap();
        assert!(cmp.dominated(3.0));
    }

    #[test]
    fn max_of_gaussians_expectation_bound() {
        let n_vars = 1 << 10;
        let trials = 2000;
        let bound = max_subgaussian_bound(n_vars, 1.0, false);
        let mut total = 0.0;
        for seed in 0..trials {
            let x = sample_noise(
                NoiseKind::Gaussian { sigma: 1.0 },
                n_vars,
                RandomSource::new(19).stream(seed),
            )
            .unwrap();
            total += x.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        }
        let mean = total / trials as f64;
        assert!(mean <= bound, "empirical max mean {mean} above {bound}");
    }
}
