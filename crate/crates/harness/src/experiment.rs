//! Seeded multi-trial execution and aggregation.

use rayon::prelude::*;

use riskaverse::learner::run;
use riskaverse::oracle::{optimal_path, played_cvars, GridOptimum};
use riskaverse::schedule::{check_sampling_requirement, RequirementCheck};
use riskaverse::{RegretReport, Trajectory};

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, HarnessResult};
use crate::scenario::Scenario;

/// One learner run and its evaluation.
#[derive(Debug, Clone)]
pub struct TrialRun {
    pub index: usize,
    pub seed: u64,
    pub trajectory: Trajectory,
    pub report: RegretReport,
}

/// Per-step mean and sample standard deviation of one tracked quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateColumn {
    pub name: &'static str,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialAggregate {
    pub trials: usize,
    pub columns: Vec<AggregateColumn>,
}

impl TrialAggregate {
    /// Tracked quantities, in column order.
    pub const COLUMNS: [&'static str; 7] = ["x", "x_hat", "x_star", "c_hat", "c_star", "dr", "acc_loss"];

    pub fn horizon(&self) -> usize {
        self.columns.first().map_or(0, |c| c.mean.len())
    }

    pub fn column(&self, name: &str) -> Option<&AggregateColumn> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn from_trials(trials: &[TrialRun]) -> Self {
        let columns = Self::COLUMNS
            .iter()
            .map(|&name| {
                let series: Vec<Vec<f64>> = trials.iter().map(|tr| tracked(tr, name)).collect();
                let (mean, std) = mean_std(&series);
                AggregateColumn { name, mean, std }
            })
            .collect();
        Self { trials: trials.len(), columns }
    }
}

fn tracked(trial: &TrialRun, name: &str) -> Vec<f64> {
    let recs = &trial.trajectory.records;
    let rep = &trial.report;
    match name {
        "x" => recs.iter().map(|r| r.x[0]).collect(),
        "x_hat" => recs.iter().map(|r| r.x_hat[0]).collect(),
        "x_star" => rep.optimal_actions.clone(),
        "c_hat" => rep.played.clone(),
        "c_star" => rep.optimal.clone(),
        "dr" => rep.cumulative_regret.clone(),
        "acc_loss" => rep.accumulated_loss.clone(),
        _ => unreachable!("untracked column {name}"),
    }
}

/// Pointwise mean and sample standard deviation (zero for a single series).
pub fn mean_std(series: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let k = series.len();
    let len = series.first().map_or(0, Vec::len);
    let mut mean = vec![0.0; len];
    let mut std = vec![0.0; len];
    for t in 0..len {
        let m = series.iter().map(|s| s[t]).sum::<f64>() / k as f64;
        mean[t] = m;
        if k > 1 {
            let ss: f64 = series.iter().map(|s| (s[t] - m).powi(2)).sum();
            std[t] = (ss / (k - 1) as f64).sqrt();
        }
    }
    (mean, std)
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub trials: Vec<TrialRun>,
    pub aggregate: TrialAggregate,
    pub optimum: Vec<GridOptimum>,
    pub requirement: RequirementCheck,
    pub notes: Vec<String>,
}

/// Runs `f` on a pool with `jobs` threads, or on the global pool when
/// `jobs == 0`.
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> HarnessResult<T> {
    if jobs == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| HarnessError::Runtime(format!("cannot start {jobs} worker threads: {e}")))?;
    Ok(pool.install(f))
}

/// Runs every trial of `cfg` and evaluates it against the grid oracle.
///
/// Trial `i` uses seed `base_seed + i`. Trials run in parallel but results
/// are ordered by index, so the outcome does not depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> HarnessResult<ExperimentOutcome> {
    cfg.validate()?;
    let scenario = Scenario::build(cfg)?;
    let mut notes = scenario.notes.clone();
    let learner0 = cfg.learner(0)?;
    let inner = scenario.set.shrunk(cfg.delta)?;
    if !inner.contains(&learner0.x0) {
        let p = inner.project(&learner0.x0)?;
        notes.push(format!("x0 = {} lies outside the shrunk set; projected to {}", cfg.x0, p[0]));
    }
    let requirement = check_sampling_requirement(&cfg.sampling(), cfg.batch_len, cfg.req_a, cfg.req_c)
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    if !requirement.satisfied {
        notes.push(format!(
            "warning: sampling requirement fails for a = {}, c = {}: {:.6} > {:.6}",
            cfg.req_a, cfg.req_c, requirement.lhs, requirement.rhs
        ));
    }

    let settings = cfg.oracle();
    let (optimum, results) = with_jobs(cfg.jobs, || {
        let optimum = optimal_path(&scenario.cost, &*scenario.noise, cfg.horizon, &scenario.set, &settings);
        let results: Vec<_> = (0..cfg.trials)
            .into_par_iter()
            .map(|index| {
                let learner = cfg.learner(index)?;
                let trajectory = run(&learner, &scenario.cost, &*scenario.noise, &scenario.set)?;
                let played = played_cvars(&trajectory.records, &scenario.cost, &*scenario.noise, cfg.alpha, cfg.oracle_grid)?;
                Ok((trajectory, played))
            })
            .collect::<Vec<HarnessResult<_>>>();
        (optimum, results)
    })?;
    let optimum = optimum?;

    let mut trials = Vec::with_capacity(cfg.trials);
    for (index, res) in results.into_iter().enumerate() {
        let seed = cfg.trial_seed(index);
        let (trajectory, played) =
            res.map_err(|e| HarnessError::Runtime(format!("trial {index} (seed {seed}) failed: {e}")))?;
        let report = RegretReport::from_parts(played, &optimum)?;
        trials.push(TrialRun { index, seed, trajectory, report });
    }
    let aggregate = TrialAggregate::from_trials(&trials);
    Ok(ExperimentOutcome { trials, aggregate, optimum, requirement, notes })
}

/// Summary of one sample count in an ablation.
#[derive(Debug, Clone)]
pub struct AblationRow {
    pub samples: usize,
    pub mean_acc_loss: f64,
    pub std_acc_loss: f64,
    pub requirement: RequirementCheck,
    pub outcome: ExperimentOutcome,
}

/// One experiment per constant sample count, all with the same seeds.
pub fn run_ablation(cfg: &ExperimentConfig, counts: &[usize]) -> HarnessResult<Vec<AblationRow>> {
    if counts.len() < 2 {
        return Err(HarnessError::Config(format!("ablation needs at least two sample counts, got {counts:?}")));
    }
    counts
        .iter()
        .map(|&samples| {
            let sub = ExperimentConfig { samples, sampling_a: None, ..cfg.clone() };
            let outcome = run_experiment(&sub)?;
            let acc = outcome.aggregate.column("acc_loss").expect("tracked column");
            let last = acc.mean.len() - 1;
            Ok(AblationRow {
                samples,
                mean_acc_loss: acc.mean[last],
                std_acc_loss: acc.std[last],
                requirement: outcome.requirement,
                outcome,
            })
        })
        .collect()
}
