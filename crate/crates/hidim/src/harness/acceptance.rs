//! The verification suite: one check per acceptance criterion, each pinned
//! to its tolerance and runnable through `hidim verify` or the `acceptance`
//! integration test. Sweep-based criteria load their experiment from the
//! repository `configs/` directory.

use std::path::Path;

use crate::datagen::{NoiseKind, RandomSource, RegressionInstance};
use crate::graphical::{graphical_lasso, ising_conditional, ising_enumerate};
use crate::harness::oracles::prox_grid_search;
use crate::harness::{
    chain_ising_model, gaussian_matrix, run_experiment, tail_statistic_comparison,
    ExperimentConfig, ExperimentOutcome,
};
use crate::linalg::{spd_inverse, truncate_svd, DenseMatrix};
use crate::minimax::{
    multi_hypothesis_error, sparse_packing_hypotheses, sparse_varshamov_gilbert,
    two_point_experiment, varshamov_gilbert,
};
use crate::regression::{
    bic_estimate, lasso_cd, ls_l0, prox_sorted_l1, threshold_estimate, ThresholdMode,
    TuningParameters,
};
use crate::{Error, Result};

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {:<28} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

fn load(configs_dir: &Path, name: &str) -> Result<ExperimentConfig> {
    ExperimentConfig::from_path(&configs_dir.join(name))
}

fn slope_within(outcome: &ExperimentOutcome, target: f64, tol: f64) -> Result<(bool, f64)> {
    let fit = outcome
        .rate_fit
        .as_ref()
        .ok_or_else(|| Error::Internal("experiment produced no rate fit".into()))?;
    Ok(((fit.slope - target).abs() <= tol, fit.slope))
}

fn criterion_tails(configs_dir: &Path) -> Result<(bool, String)> {
    let config = load(configs_dir, "tails.toml")?;
    let n = config.fixed.get("n").copied().unwrap_or(50.0) as usize;
    let sigma = config.fixed.get("sigma").copied().unwrap_or(1.0);
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut ok = true;
    for kind in ["gaussian", "rademacher", "uniform"] {
        let cmp = tail_statistic_comparison(
            kind,
            n,
            sigma,
            &config.sweep.values,
            config.seeds,
            RandomSource::new(config.master_seed),
        )?;
        ok &= cmp.dominated(3.0);
        for (f, b) in cmp.empirical_freq.iter().zip(&cmp.theoretical_bound) {
            worst = worst.max(f - b);
        }
    }
    Ok((ok, format!("worst freq-bound margin {worst:+.2e}")))
}

fn criterion_matrix_bernstein(configs_dir: &Path) -> Result<(bool, String)> {
    let config = load(configs_dir, "matrix_bernstein.toml")?;
    let summands = config.fixed.get("n").copied().unwrap_or(200.0) as usize;
    let cmp = tail_statistic_comparison(
        "matrix_bernstein",
        summands,
        1.0,
        &config.sweep.values,
        config.seeds,
        RandomSource::new(config.master_seed),
    )?;
    let mut worst: f64 = f64::NEG_INFINITY;
    for (f, b) in cmp.empirical_freq.iter().zip(&cmp.theoretical_bound) {
        worst = worst.max(f - b);
    }
    Ok((
        cmp.dominated(3.0),
        format!(
            "worst freq-bound margin {worst:+.2e} over {} grid points",
            cmp.t_grid.len()
        ),
    ))
}

fn criterion_support_recovery(configs_dir: &Path) -> Result<(bool, String)> {
    let config = load(configs_dir, "hard_threshold.toml")?;
    let delta = config.fixed.get("delta").copied().unwrap_or(0.05);
    let outcome = run_experiment(&config)?;
    let failures: f64 = outcome.rows.iter().map(|r| r.error).sum();
    let frequency = 1.0 - failures / outcome.rows.len() as f64;
    let stderr = (delta * (1.0 - delta) / outcome.rows.len() as f64).sqrt();
    let floor = 1.0 - delta - 3.0 * stderr;
    Ok((
        frequency >= floor,
        format!("exact recovery in {frequency:.4} of seeds (floor {floor:.4})"),
    ))
}

fn criterion_rate_slopes(configs_dir: &Path) -> Result<(bool, String)> {
    let cases = [
        ("rates_ls_n.toml", -1.0, 0.2),
        ("rates_ls_d.toml", 1.0, 0.2),
        ("rates_lasso_n.toml", -1.0, 0.2),
        ("rates_lasso_k.toml", 1.0, 0.3),
        ("rates_l1_n.toml", -0.5, 0.15),
    ];
    let mut ok = true;
    let mut details = Vec::new();
    for (file, target, tol) in cases {
        let config = load(configs_dir, file)?;
        let outcome = run_experiment(&config)?;
        let (good, slope) = slope_within(&outcome, target, tol)?;
        ok &= good;
        details.push(format!(
            "{}: {slope:.3} (target {target:+.1}±{tol})",
            file.trim_end_matches(".toml")
        ));
    }
    Ok((ok, details.join("; ")))
}

fn criterion_slope_oracle(configs_dir: &Path) -> Result<(bool, String)> {
    let config = load(configs_dir, "slope_oracle.toml")?;
    let outcome = run_experiment(&config)?;
    let worst_gap = outcome
        .rows
        .iter()
        .map(|r| r.error)
        .fold(f64::NEG_INFINITY, f64::max);
    let pgd_ok = worst_gap <= 1e-6;

    // Proximal operator versus the d = 3 grid oracle.
    let weights = vec![0.6, 0.4, 0.1];
    let mut prox_ok = true;
    let mut worst_coord: f64 = 0.0;
    for seed in 0..3u64 {
        let mut rng = RandomSource::new(404).stream(seed).rng();
        let v: Vec<f64> = (0..3)
            .map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0))
            .collect();
        let exact = prox_sorted_l1(&v, &weights)?;
        let grid = prox_grid_search(&v, &weights, 1e-3)?;
        for (a, b) in exact.iter().zip(&grid) {
            worst_coord = worst_coord.max((a - b).abs());
            prox_ok &= (a - b).abs() <= 2e-3;
        }
    }
    Ok((
        pgd_ok && prox_ok,
        format!(
            "max objective gap {worst_gap:.2e} over {} instances; prox-grid gap {worst_coord:.2e}",
            outcome.rows.len()
        ),
    ))
}

fn frequency_below_bound(outcome: &ExperimentOutcome, bound: f64) -> f64 {
    let hits = outcome.rows.iter().filter(|r| r.error <= bound).count();
    hits as f64 / outcome.rows.len() as f64
}

fn criterion_svt(configs_dir: &Path) -> Result<(bool, String)> {
    let mut details = Vec::new();
    let mut ok = true;
    for (file, constant) in [("svt.toml", 144.0), ("rank_penalized.toml", 8.0)] {
        let config = load(configs_dir, file)?;
        let n = config.sweep.values[0] as usize;
        let d = config.fixed["d"] as usize;
        let t = config.fixed["t"] as usize;
        let rank = config.fixed["rank"] as usize;
        let sigma = config.fixed.get("sigma").copied().unwrap_or(1.0);
        let delta = config.fixed.get("delta").copied().unwrap_or(0.1);
        let two_tau = crate::matrix_estimation::svt_threshold(sigma, n, d, t, delta)?;
        let tau = two_tau / 2.0;
        let bound = constant * rank as f64 * tau * tau;
        let outcome = run_experiment(&config)?;
        let freq = frequency_below_bound(&outcome, bound);
        let stderr = (delta * (1.0 - delta) / outcome.rows.len() as f64).sqrt();
        let floor = 1.0 - delta - 3.0 * stderr;
        ok &= freq >= floor;
        details.push(format!(
            "{}: {freq:.3} of seeds under {constant} rank tau^2 (floor {floor:.3})",
            file.trim_end_matches(".toml")
        ));
    }
    Ok((ok, details.join("; ")))
}

fn criterion_nonparametric(configs_dir: &Path) -> Result<(bool, String)> {
    let mut ok = true;
    let mut details = Vec::new();
    for beta_tag in ["beta1", "beta2"] {
        let proj = load(configs_dir, &format!("nonparam_proj_{beta_tag}.toml"))?;
        let beta = proj.fixed["beta"];
        let target = -2.0 * beta / (2.0 * beta + 1.0);
        let proj_outcome = run_experiment(&proj)?;
        let (slope_ok, slope) = slope_within(&proj_outcome, target, 0.15)?;
        ok &= slope_ok;
        details.push(format!(
            "{beta_tag} slope {slope:.3} (target {target:.3}±0.15)"
        ));

        let adaptive = load(configs_dir, &format!("nonparam_adaptive_{beta_tag}.toml"))?;
        let adaptive_outcome = run_experiment(&adaptive)?;
        for ((n, proj_med), (n2, ad_med)) in
            proj_outcome.medians.iter().zip(&adaptive_outcome.medians)
        {
            debug_assert_eq!(n, n2);
            let cap = 4.0 * n.ln() * proj_med;
            if *ad_med > cap {
                ok = false;
                details.push(format!(
                    "{beta_tag}: adaptive median {ad_med:.2e} above 4 log(n) cap {cap:.2e} at n={n}"
                ));
            }
        }
    }
    Ok((ok, details.join("; ")))
}

fn criterion_minimax_floor(_configs_dir: &Path) -> Result<(bool, String)> {
    // Two-point floor at separation 8 alpha^2 sigma^2 / n, alpha = 0.2.
    let alpha = 0.2f64;
    let (sigma, n, trials) = (1.0, 25usize, 20_000usize);
    let gap = (8.0 * alpha * alpha * sigma * sigma / n as f64).sqrt();
    let report = two_point_experiment(
        &[0.0, 0.0],
        &[gap, 0.0],
        sigma,
        n,
        trials,
        RandomSource::new(808),
    )?;
    let stderr = (0.25 / (trials as f64 / 2.0)).sqrt();
    let two_point_floor = 0.5 - alpha - 3.0 * stderr;
    let two_point_ok = report.empirical_error_max >= two_point_floor;

    // Fano floor with the sparse packing at alpha = 1/8.
    let fano_alpha = 0.125f64;
    let beta = (fano_alpha / 8.0).sqrt();
    let packing = sparse_packing_hypotheses(64, 8, sigma, 50, beta, RandomSource::new(809))?;
    let fano_trials = 1000usize;
    let avg_error = multi_hypothesis_error(
        &packing.hypotheses,
        sigma,
        50,
        fano_trials,
        RandomSource::new(810),
    )?;
    let fano_stderr = (0.25 / fano_trials as f64).sqrt();
    let fano_floor = 0.5 - 2.0 * fano_alpha - 3.0 * fano_stderr;
    let fano_ok = avg_error >= fano_floor;
    Ok((
        two_point_ok && fano_ok,
        format!(
            "two-point max error {:.3} >= {two_point_floor:.3}; Fano avg error {avg_error:.3} >= {fano_floor:.3}",
            report.empirical_error_max
        ),
    ))
}

fn criterion_sparse_pca(configs_dir: &Path) -> Result<(bool, String)> {
    let config = load(configs_dir, "sparse_pca.toml")?;
    let d = config.fixed["d"];
    let k = config.fixed["k"];
    let outcome = run_experiment(&config)?;
    let mut ok = true;
    let mut details = Vec::new();
    let mut last = f64::INFINITY;
    for &(n, med) in &outcome.medians {
        if med >= last {
            ok = false;
            details.push(format!("median not decreasing at n={n}"));
        }
        last = med;
        let cap = 20.0 * (k * (std::f64::consts::E * d / k).ln() / n).sqrt();
        if med > cap {
            ok = false;
            details.push(format!("median {med:.3} above cap {cap:.3} at n={n}"));
        }
    }
    if details.is_empty() {
        details.push(format!(
            "medians {:?} decreasing and dominated",
            outcome
                .medians
                .iter()
                .map(|&(_, m)| (m * 1000.0).round() / 1000.0)
                .collect::<Vec<_>>()
        ));
    }
    Ok((ok, details.join("; ")))
}

fn criterion_graphical(configs_dir: &Path) -> Result<(bool, String)> {
    let mut ok = true;
    let mut details = Vec::new();

    // (a) Objective monotone on every accepted iteration.
    for seed in 0..5u64 {
        let a = gaussian_matrix(6, 6, RandomSource::new(900).stream(seed));
        let cov = a
            .matmul(&a.transpose())
            .scaled(1.0 / 6.0)
            .add(&DenseMatrix::identity(6));
        let fit = graphical_lasso(&cov, 0.2, 500, 1e-10)?;
        if fit.objective_trace.windows(2).any(|w| w[1] > w[0]) {
            ok = false;
            details.push(format!("objective increased (seed {seed})"));
        }
    }

    // (b) lambda = 0 recovers the inverse on a well-conditioned d = 4 input.
    let a = gaussian_matrix(4, 4, RandomSource::new(901));
    let cov = a
        .matmul(&a.transpose())
        .scaled(0.25)
        .add(&DenseMatrix::identity(4));
    let fit = graphical_lasso(&cov, 0.0, 20_000, 1e-14)?;
    let inverse = spd_inverse(&cov).ok_or_else(|| Error::Internal("inverse failed".into()))?;
    let inv_err = fit.theta.sub(&inverse).max_abs();
    if inv_err > 1e-4 {
        ok = false;
    }
    details.push(format!("lambda=0 inverse error {inv_err:.2e}"));

    // (c) Ising conditionals match enumeration within 1e-12 for d <= 4.
    let mut worst_cond: f64 = 0.0;
    for d in 2..=4usize {
        let model = chain_ising_model(d, 0.4);
        let table = ising_enumerate(&model)?;
        for state in 0..1usize << d {
            let z: Vec<f64> = (0..d)
                .map(|j| if (state >> j) & 1 == 1 { 1.0 } else { -1.0 })
                .collect();
            for j in 0..d {
                let plus = state | (1 << j);
                let minus = state & !(1 << j);
                let exact = table[plus] / (table[plus] + table[minus]);
                let cond = ising_conditional(&model, j, &z)?;
                worst_cond = worst_cond.max((cond - exact).abs());
            }
        }
    }
    if worst_cond > 1e-12 {
        ok = false;
    }
    details.push(format!("conditional vs enumeration gap {worst_cond:.1e}"));

    // (d) Pseudo-likelihood error decays at the bound's n^(-1/2) shape.
    let config = load(configs_dir, "ising_rate.toml")?;
    let outcome = run_experiment(&config)?;
    let (slope_ok, slope) = slope_within(&outcome, -0.5, 0.15)?;
    if !slope_ok {
        ok = false;
    }
    details.push(format!("ising l_inf^2 slope {slope:.3} (target -0.5±0.15)"));

    // Glasso statistical rate.
    let glasso_config = load(configs_dir, "glasso_rate.toml")?;
    let glasso_outcome = run_experiment(&glasso_config)?;
    let (g_ok, g_slope) = slope_within(&glasso_outcome, -1.0, 0.25)?;
    if !g_ok {
        ok = false;
    }
    details.push(format!(
        "glasso Frobenius^2 slope {g_slope:.3} (target -1±0.25)"
    ));

    Ok((ok, details.join("; ")))
}

fn criterion_oracle_equivalences(_configs_dir: &Path) -> Result<(bool, String)> {
    let mut ok = true;
    let mut details = Vec::new();

    // l0 search agrees with the BIC inner minimizer (d = 10).
    let mut agreements = 0;
    let mut comparisons = 0;
    for seed in 0..15u64 {
        let src = RandomSource::new(1000).stream(seed);
        let design = gaussian_matrix(30, 10, src.stream(0));
        let truth = crate::datagen::sparse_truth(10, 3, 2.0, src.stream(1))?;
        let inst = RegressionInstance::synthesize(
            design,
            truth,
            NoiseKind::Gaussian { sigma: 0.3 },
            src.stream(2),
        )?;
        let tuning = TuningParameters::bic(0.3, 30, 10);
        let bic = bic_estimate(&inst, &tuning, 20)?;
        let k = bic.support.len();
        let l0 = ls_l0(&inst, k)?;
        comparisons += 1;
        if l0.support == bic.support {
            agreements += 1;
        }
    }
    if agreements != comparisons {
        ok = false;
    }
    details.push(format!(
        "l0/BIC support agreement {agreements}/{comparisons}"
    ));

    // Lasso under the orthogonal design equals soft thresholding.
    let mut worst_lasso: f64 = 0.0;
    for seed in 0..10u64 {
        let src = RandomSource::new(1001).stream(seed);
        let n = 64;
        let design = crate::datagen::regular_trig_design(n, 8)?;
        let truth = crate::datagen::sparse_truth(8, 3, 0.8, src.stream(0))?;
        let inst = RegressionInstance::synthesize(
            design,
            truth,
            NoiseKind::Gaussian { sigma: 0.3 },
            src.stream(1),
        )?;
        let tau = 0.2;
        let report = lasso_cd(
            &inst,
            &TuningParameters::manual(tau, 0.0, 0.3),
            10_000,
            1e-12,
        )?;
        let y: Vec<f64> = inst
            .design
            .transpose_matvec(&inst.response)
            .iter()
            .map(|v| v / n as f64)
            .collect();
        let oracle = threshold_estimate(&y, tau / 2.0, ThresholdMode::Soft)?;
        for (a, b) in report.estimate.iter().zip(&oracle) {
            worst_lasso = worst_lasso.max((a - b).abs());
        }
    }
    if worst_lasso > 1e-8 {
        ok = false;
    }
    details.push(format!("lasso-vs-soft-threshold gap {worst_lasso:.1e}"));

    // Randomized Eckart-Young certification.
    let a = gaussian_matrix(4, 4, RandomSource::new(1002));
    let best = truncate_svd(&a, 1)?;
    let best_err = best.sub(&a).frobenius_norm();
    let mut rng = RandomSource::new(1003).rng();
    let mut certified = true;
    for _ in 0..1000 {
        let u: Vec<f64> = (0..4)
            .map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0))
            .collect();
        let v: Vec<f64> = (0..4)
            .map(|_| rand::Rng::random_range(&mut rng, -1.0..1.0))
            .collect();
        let competitor = DenseMatrix::from_fn(4, 4, |i, j| u[i] * v[j]);
        if best_err > competitor.sub(&a).frobenius_norm() + 1e-10 {
            certified = false;
        }
    }
    if !certified {
        ok = false;
    }
    details.push(format!("Eckart-Young certified at error {best_err:.3}"));

    // Varshamov-Gilbert certification, plain and sparse.
    let code = varshamov_gilbert(32, 0.25, RandomSource::new(1004), 500)?;
    let vg_ok = code.codewords.len() == 7 && code.verify_min_distance() >= 8;
    let sparse = sparse_varshamov_gilbert(64, 8, RandomSource::new(1005), 500)?;
    let sparse_ok = sparse.verify_min_distance() >= 4
        && sparse
            .codewords
            .iter()
            .all(|w| w.iter().filter(|&&b| b == 1).count() == 8);
    if !(vg_ok && sparse_ok) {
        ok = false;
    }
    details.push(format!(
        "VG codes certified: plain d={} M={}, sparse d={} M={}",
        32,
        code.codewords.len(),
        64,
        sparse.codewords.len()
    ));

    Ok((ok, details.join("; ")))
}

type Check = fn(&Path) -> Result<(bool, String)>;

/// Runs every acceptance criterion against the config directory and returns
/// one result per criterion, in order.
pub fn run_all(configs_dir: &Path) -> Vec<CriterionResult> {
    let checks: [(usize, &'static str, Check); 11] = [
        (1, "tail domination", criterion_tails),
        (2, "matrix Bernstein domination", criterion_matrix_bernstein),
        (
            3,
            "hard-threshold support recovery",
            criterion_support_recovery,
        ),
        (4, "rate slopes", criterion_rate_slopes),
        (5, "SLOPE correctness", criterion_slope_oracle),
        (6, "SVT and rank-penalized bounds", criterion_svt),
        (7, "nonparametric rates", criterion_nonparametric),
        (8, "minimax floors", criterion_minimax_floor),
        (9, "sparse PCA", criterion_sparse_pca),
        (10, "graphical models", criterion_graphical),
        (11, "oracle equivalences", criterion_oracle_equivalences),
    ];
    checks
        .into_iter()
        .map(|(id, name, f)| match f(configs_dir) {
            Ok((passed, detail)) => CriterionResult {
                id,
                name,
                passed,
                detail,
            },
            Err(e) => CriterionResult {
                id,
                name,
                passed: false,
                detail: format!("errored: {e}"),
            },
        })
        .collect()
}
