use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hidim::harness::{self, acceptance, ExperimentConfig};
use hidim::Error;

/// Monte Carlo harness for high-dimensional estimators: run experiment
/// configs, list what is available, and verify the acceptance criteria.
#[derive(Parser)]
#[command(name = "hidim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunOverrides {
    /// Override the number of Monte Carlo seeds from the config.
    #[arg(long)]
    seeds: Option<usize>,
    /// Override the master seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output base path (writes <out>.csv and <out>.json).
    #[arg(long)]
    out: Option<String>,
    /// Size of the worker pool; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Record per-trial wall time in the CSV (breaks byte-determinism).
    #[arg(long)]
    timings: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment config (TOML, or JSON by extension).
    Run {
        config: PathBuf,
        #[command(flatten)]
        overrides: RunOverrides,
    },
    /// List known experiment/estimator pairs and shipped configs.
    List {
        /// Directory holding the experiment configs.
        #[arg(long, default_value = "configs")]
        configs: PathBuf,
    },
    /// Run the acceptance suite; exits 3 if any criterion fails.
    Verify {
        /// Directory holding the experiment configs.
        #[arg(long, default_value = "configs")]
        configs: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Shortcut: run the tail-domination experiment and print verdicts.
    Tails {
        #[command(flatten)]
        overrides: RunOverrides,
    },
}

fn install_pool(threads: Option<usize>) {
    if let Some(t) = threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global();
    }
}

fn apply_overrides(config: &mut ExperimentConfig, overrides: &RunOverrides) {
    if let Some(seeds) = overrides.seeds {
        config.seeds = seeds;
    }
    if let Some(seed) = overrides.seed {
        config.master_seed = seed;
    }
    if overrides.timings {
        config.record_timings = true;
    }
}

fn run_config(path: &Path, overrides: &RunOverrides) -> Result<(), Error> {
    install_pool(overrides.threads);
    let mut config = ExperimentConfig::from_path(path)?;
    apply_overrides(&mut config, overrides);
    config.validate()?;
    let outcome = harness::run_and_emit(&config, overrides.out.as_deref())?;
    println!(
        "{} / {}: {} rows over {} sweep values",
        config.experiment.name(),
        config.estimator,
        outcome.rows.len(),
        config.sweep.values.len()
    );
    for (value, med) in &outcome.medians {
        println!(
            "  {} = {value}: median error {med:.6e}",
            config.sweep.parameter
        );
    }
    if let Some(fit) = &outcome.rate_fit {
        println!(
            "  log-log fit: slope {:.4}, intercept {:.4}, r^2 {:.4}",
            fit.slope, fit.intercept, fit.r_squared
        );
    }
    let base = overrides.out.as_deref().unwrap_or(&config.output_path);
    if !base.is_empty() {
        println!("  wrote {base}.csv and {base}.json");
    }
    Ok(())
}

fn default_tails_config() -> ExperimentConfig {
    ExperimentConfig {
        experiment: harness::ExperimentKind::Tails,
        estimator: "all".into(),
        sweep: harness::SweepSpec {
            parameter: "t".into(),
            values: (1..=20).map(|i| i as f64 * 0.05).collect(),
        },
        fixed: [("n".to_string(), 50.0), ("sigma".to_string(), 1.0)]
            .into_iter()
            .collect(),
        seeds: 100_000,
        master_seed: 271_828,
        output_path: "out/tails".into(),
        record_timings: false,
    }
}

fn run_tails(overrides: &RunOverrides) -> Result<bool, Error> {
    install_pool(overrides.threads);
    let mut config = default_tails_config();
    apply_overrides(&mut config, overrides);
    harness::run_and_emit(&config, overrides.out.as_deref())?;
    let n = config.fixed["n"] as usize;
    let sigma = config.fixed["sigma"];
    let mut all_ok = true;
    for kind in ["gaussian", "rademacher", "uniform"] {
        let cmp = harness::tail_statistic_comparison(
            kind,
            n,
            sigma,
            &config.sweep.values,
            config.seeds,
            hidim::datagen::RandomSource::new(config.master_seed),
        )?;
        let ok = cmp.dominated(3.0);
        all_ok &= ok;
        println!(
            "{kind:>10}: exceedance {} the Hoeffding bound on all {} grid points",
            if ok { "dominated by" } else { "ABOVE" },
            cmp.t_grid.len()
        );
    }
    Ok(all_ok)
}

fn list(configs: &Path) {
    println!("experiment/estimator pairs:");
    for (experiment, estimator) in harness::known_estimators() {
        println!("  {experiment:<10} {estimator}");
    }
    println!("\nconfigs in {}:", configs.display());
    let mut entries: Vec<String> = std::fs::read_dir(configs)
        .map(|dir| {
            dir.filter_map(|e| e.ok())
                .map(|e| e.file_name().to_string_lossy().into_owned())
                .filter(|name| name.ends_with(".toml") || name.ends_with(".json"))
                .collect()
        })
        .unwrap_or_default();
    entries.sort();
    if entries.is_empty() {
        println!("  (none found)");
    }
    for name in entries {
        println!("  {name}");
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, overrides } => match run_config(&config, &overrides) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e @ (Error::InvalidInput(_) | Error::Io(_))) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        },
        Command::List { configs } => {
            list(&configs);
            ExitCode::SUCCESS
        }
        Command::Verify { configs, threads } => {
            install_pool(threads);
            let results = acceptance::run_all(&configs);
            for r in &results {
                println!("{}", r.line());
            }
            let failed = results.iter().filter(|r| !r.passed).count();
            if failed == 0 {
                println!("all {} criteria passed", results.len());
                ExitCode::SUCCESS
            } else {
                eprintln!("{failed} criteria failed");
                ExitCode::from(3)
            }
        }
        Command::Tails { overrides } => match run_tails(&overrides) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(3),
            Err(e @ Error::InvalidInput(_)) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        },
    }
}
