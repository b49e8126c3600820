use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use wbgp_bo::acquisition::AcquisitionConfig;
use wbgp_bo::bench::{emit_results, find_problem, problem_suite, run_campaign, AlgorithmSpec, CampaignConfig, PValue};
use wbgp_bo::selfcheck::{check_lcb_identity, check_problems};
use wbgp_bo::Result;

#[derive(Parser)]
#[command(name = "wbgp-bo", version, about = "WBGP-BO vs GP-BO benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark campaign and write CSV results.
    Run(RunArgs),
    /// Verify the test-problem minima and the averaged-LCB identity.
    Selfcheck {
        /// Random (ensemble, x, xi) triples for the identity check.
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// Comma-separated problem ids (e.g. `02,14`) or `all`.
    #[arg(long, default_value = "all")]
    problems: String,
    /// Comma-separated algorithms (`gpbo,wbgp16,wbgp32`) or `all`.
    #[arg(long, default_value = "all")]
    algorithms: String,
    #[arg(long, default_value_t = 30)]
    runs: usize,
    #[arg(long, default_value_t = 30)]
    iters: usize,
    #[arg(long, default_value_t = 5)]
    init: usize,
    /// LCB exploration weight.
    #[arg(long, default_value_t = 2.0)]
    xi: f64,
    /// Transform applied to observations before fitting: `none`, `standardize` or `minmax`.
    #[arg(long, default_value = "none")]
    output_scaling: String,
    /// Master seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

fn parse_list<T>(s: &str, all: impl FnOnce() -> Vec<T>, one: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(all());
    }
    s.split(',').filter(|t| !t.trim().is_empty()).map(one).collect()
}

fn run(args: RunArgs) -> Result<bool> {
    let problems = parse_list(&args.problems, problem_suite, find_problem)?;
    let algorithms = parse_list(&args.algorithms, || AlgorithmSpec::DEFAULT_SET.to_vec(), |s| s.parse())?;
    let config = CampaignConfig {
        problems,
        algorithms,
        n_runs: args.runs,
        n_iters: args.iters,
        n_init: args.init,
        acquisition: AcquisitionConfig { xi: args.xi, ..AcquisitionConfig::default() },
        master_seed: args.seed,
        output_scaling: args.output_scaling.parse()?,
        jobs: args.jobs,
    };

    let start = Instant::now();
    let campaign = run_campaign(&config)?;
    emit_results(&campaign.result, &campaign.runs, &args.out)?;

    println!("{:<10} {:<12} {:>10} {:>9} {:>8}", "problem", "algorithm", "mean", "std", "p");
    for cell in &campaign.result.cells {
        let p = match cell.p_value {
            PValue::NotApplicable => "NA".to_string(),
            PValue::Degenerate => "-".to_string(),
            PValue::Value(p) => format!("{p:.3}"),
        };
        println!("{:<10} {:<12} {:>10.4} {:>9.4} {:>8}", cell.problem, cell.algorithm.label(), cell.mean, cell.std, p);
    }
    let failed: usize = campaign.result.cells.iter().map(|c| c.n_failed()).sum();
    eprintln!(
        "{} runs in {:.1}s, {failed} failed; results in {}",
        campaign.runs.len(),
        start.elapsed().as_secs_f64(),
        args.out.display()
    );
    Ok(failed == 0)
}

fn selfcheck(trials: usize, seed: u64) -> Result<bool> {
    let mut ok = true;
    for c in check_problems() {
        println!(
            "[{}] {} f(x*) = {:.6} (expected {:.4})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.expected
        );
        ok &= c.passed;
    }
    let report = check_lcb_identity(trials, seed)?;
    println!(
        "[{}] averaged-LCB identity over {} triples: max |gap| LCB {:.2e}, UCB {:.2e}",
        if report.passed() { "PASS" } else { "FAIL" },
        report.trials,
        report.max_lcb_gap,
        report.max_ucb_gap
    );
    Ok(ok && report.passed())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => run(args),
        Command::Selfcheck { trials, seed } => selfcheck(trials, seed),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
