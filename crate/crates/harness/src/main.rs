//! `rals`: command-line driver for the risk-averse online learner.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rals::budget::compute_budget;
use rals::experiment::{run_ablation, run_experiment};
use rals::output::{ablation_csv, with_suffix, write_experiment, write_file};
use rals::verify::{verify, Suite};
use rals::{ExperimentConfig, HarnessError, HarnessResult};
use riskaverse::schedule::{theorem1_params, theorem2_params};

#[derive(Parser, Debug)]
#[command(name = "rals", version, about = "Risk-averse online learning under drifting noise", args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run all trials and write per-trial and aggregate CSVs.
    Run,
    /// Compare constant sample counts on otherwise identical runs.
    Ablate {
        /// Comma-separated sample counts; defaults to the `counts` key.
        #[arg(long, value_delimiter = ',')]
        counts: Option<Vec<usize>>,
    },
    /// Print the distribution-variation budget and write per-step W1 values.
    Budget,
    /// Run a property suite.
    Verify {
        #[arg(default_value = "all", value_parser = ["risk", "smoothing", "environment", "all"])]
        suite: String,
    },
    /// Parameter suggestions for a horizon and variation budget.
    Params {
        #[arg(long)]
        budget: f64,
        /// Sampling exponent.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Strong-convexity modulus; omit for the convex case only.
        #[arg(long)]
        m: Option<f64>,
    },
}

#[derive(Args, Debug, Default)]
struct Overrides {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// parking, brownian or custom.
    #[arg(long, global = true)]
    scenario: Option<String>,
    #[arg(long = "T", global = true)]
    horizon: Option<String>,
    #[arg(long, global = true)]
    batch: Option<String>,
    #[arg(long, global = true)]
    delta: Option<String>,
    #[arg(long, global = true)]
    alpha: Option<String>,
    #[arg(long, global = true)]
    samples: Option<String>,
    #[arg(long, global = true)]
    eta: Option<String>,
    #[arg(long, global = true)]
    trials: Option<String>,
    /// Base seed; trial i uses seed + i.
    #[arg(long, global = true, env = "RA_SEED")]
    seed: Option<String>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<String>,
    /// Output path prefix.
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long = "oracle-grid", global = true)]
    oracle_grid: Option<String>,
    #[arg(long = "oracle-k", global = true)]
    oracle_k: Option<String>,
    /// Extra `key=value` settings, applied last.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Overrides {
    fn config(&self) -> HarnessResult<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let pairs = [
            ("scenario", &self.scenario),
            ("T", &self.horizon),
            ("batch", &self.batch),
            ("delta", &self.delta),
            ("alpha", &self.alpha),
            ("samples", &self.samples),
            ("eta", &self.eta),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("jobs", &self.jobs),
            ("out", &self.out),
            ("oracle_grid", &self.oracle_grid),
            ("oracle_k", &self.oracle_k),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("--set expects KEY=VALUE, got '{kv}'")))?;
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn log(msg: &str) {
    eprintln!("rals: {msg}");
}

fn execute(cli: Cli) -> HarnessResult<()> {
    match cli.command {
        Command::Run => {
            let cfg = cli.overrides.config()?;
            let outcome = run_experiment(&cfg)?;
            outcome.notes.iter().for_each(|n| log(n));
            let files = write_experiment(&outcome, &cfg.out)?;
            let dr = outcome.aggregate.column("dr").expect("tracked column");
            log(&format!(
                "{} trials of {} steps; mean DR(T) = {:.6}; wrote {} files",
                cfg.trials,
                cfg.horizon,
                dr.mean[dr.mean.len() - 1],
                files.len()
            ));
        }
        Command::Ablate { counts } => {
            let cfg = cli.overrides.config()?;
            let counts = counts.unwrap_or_else(|| cfg.counts.clone());
            let rows = run_ablation(&cfg, &counts)?;
            for row in &rows {
                row.outcome.notes.iter().filter(|n| n.starts_with("warning")).for_each(|n| log(n));
                write_experiment(&row.outcome, &with_suffix(&cfg.out, &format!("_n{}", row.samples)))?;
                log(&format!(
                    "n_t = {}: accumulated loss {:.6} +/- {:.6}",
                    row.samples, row.mean_acc_loss, row.std_acc_loss
                ));
            }
            write_file(&with_suffix(&cfg.out, "_ablation.csv"), &ablation_csv(&rows))?;
        }
        Command::Budget => {
            let cfg = cli.overrides.config()?;
            let report = compute_budget(&cfg)?;
            report.warnings.iter().for_each(|w| log(w));
            print!("{}", report.summary(&cfg));
            write_file(&with_suffix(&cfg.out, "_w1.csv"), &report.steps_csv())?;
        }
        Command::Verify { suite } => {
            let suite: Suite = suite.parse()?;
            let report = verify(suite);
            for check in &report.checks {
                println!("{check}");
            }
            println!("{}", report.summary());
            if !report.passed() {
                let names: Vec<_> = report.failed().map(|c| c.name).collect();
                return Err(HarnessError::Verification(names.join(", ")));
            }
        }
        Command::Params { budget, a, m } => {
            let cfg = cli.overrides.config()?;
            let cfg_err = |e: riskaverse::Error| HarnessError::Config(e.to_string());
            let p = theorem1_params(cfg.horizon, budget, a).map_err(cfg_err)?;
            println!(
                "convex: delta = {}, eta = {}, batch = {} (raw {})",
                p.delta, p.eta, p.batch_len, p.batch_len_raw
            );
            if let Some(m) = m {
                let q = theorem2_params(cfg.horizon, budget, a, m).map_err(cfg_err)?;
                println!(
                    "strongly convex: delta = {}, batch = {} (raw {}), rate = {:?}",
                    q.delta, q.batch_len, q.batch_len_raw, q.rate
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log(&e.to_string());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
