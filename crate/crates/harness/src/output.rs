//! CSV emission. Floats carry 17 significant digits, lines end in LF.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, HarnessResult};
use crate::experiment::{AblationRow, ExperimentOutcome, TrialAggregate, TrialRun};

pub const TRAJECTORY_HEADER: &str = "t,j,tau,x,x_hat,n_t,cvar_est,grad,eta,c_hat,c_star,dr,acc_loss";

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn push_floats(line: &mut String, values: &[f64]) {
    for v in values {
        line.push(',');
        line.push_str(&fmt_f64(*v));
    }
}

pub fn trajectory_csv(trial: &TrialRun) -> String {
    let mut out = String::with_capacity(256 * trial.trajectory.len());
    out.push_str(TRAJECTORY_HEADER);
    out.push('\n');
    let rep = &trial.report;
    for (i, r) in trial.trajectory.records.iter().enumerate() {
        let _ = write!(out, "{},{},{}", r.t, r.batch, r.epoch);
        push_floats(&mut out, &[r.x[0], r.x_hat[0]]);
        let _ = write!(out, ",{}", r.n_samples);
        push_floats(
            &mut out,
            &[
                r.cvar_estimate,
                r.gradient[0],
                r.eta,
                rep.played[i],
                rep.optimal[i],
                rep.cumulative_regret[i],
                rep.accumulated_loss[i],
            ],
        );
        out.push('\n');
    }
    out
}

pub fn aggregate_csv(agg: &TrialAggregate) -> String {
    let mut out = String::from("t");
    for col in &agg.columns {
        let _ = write!(out, ",mean_{0},std_{0}", col.name);
    }
    out.push('\n');
    for t in 0..agg.horizon() {
        let _ = write!(out, "{}", t + 1);
        for col in &agg.columns {
            push_floats(&mut out, &[col.mean[t], col.std[t]]);
        }
        out.push('\n');
    }
    out
}

pub fn ablation_csv(rows: &[AblationRow]) -> String {
    let mut out = String::from("n_t,mean_acc_loss,std_acc_loss,req_lhs,req_rhs,req_ok\n");
    for r in rows {
        let _ = write!(out, "{}", r.samples);
        push_floats(&mut out, &[r.mean_acc_loss, r.std_acc_loss, r.requirement.lhs, r.requirement.rhs]);
        let _ = writeln!(out, ",{}", r.requirement.satisfied);
    }
    out
}

/// `<prefix><suffix>`, keeping the prefix's directory.
pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn write_file(path: &Path, contents: &str) -> HarnessResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| HarnessError::io(path, e))
}

/// Writes `<prefix>_trial<i>.csv` for every trial, then `<prefix>_aggregate.csv`.
pub fn write_experiment(outcome: &ExperimentOutcome, prefix: &Path) -> HarnessResult<Vec<PathBuf>> {
    let mut written = Vec::with_capacity(outcome.trials.len() + 1);
    for trial in &outcome.trials {
        let path = with_suffix(prefix, &format!("_trial{}.csv", trial.index));
        write_file(&path, &trajectory_csv(trial))?;
        written.push(path);
    }
    let path = with_suffix(prefix, "_aggregate.csv");
    write_file(&path, &aggregate_csv(&outcome.aggregate))?;
    written.push(path);
    Ok(written)
}
