//! Distribution-variation budgets and the parameter suggestions built on them.

use std::fmt::Write as _;

use riskaverse::environment::step_variations;
use riskaverse::schedule::{theorem1_params, theorem2_params, ConvexParams, StronglyConvexParams};
use riskaverse::CostModel;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, HarnessResult};
use crate::output::fmt_f64;
use crate::scenario::Scenario;

#[derive(Debug, Clone)]
pub struct BudgetReport {
    /// `W1(D_{t-1}, D_t)` for `t = 2..=T`.
    pub steps: Vec<f64>,
    pub total: f64,
    pub convex: Option<ConvexParams>,
    pub strongly_convex: Option<StronglyConvexParams>,
    pub warnings: Vec<String>,
}

impl BudgetReport {
    pub fn steps_csv(&self) -> String {
        let mut out = String::from("t,w1\n");
        for (i, w) in self.steps.iter().enumerate() {
            let _ = writeln!(out, "{},{}", i + 2, fmt_f64(*w));
        }
        out
    }

    pub fn summary(&self, cfg: &ExperimentConfig) -> String {
        let mut s = format!("V_D = {}\n", fmt_f64(self.total));
        if let Some(p) = &self.convex {
            let _ = writeln!(
                s,
                "convex (a = {}): delta = {}, eta = {}, batch = {} (raw {})",
                cfg.req_a,
                fmt_f64(p.delta),
                fmt_f64(p.eta),
                p.batch_len,
                fmt_f64(p.batch_len_raw)
            );
        }
        if let Some(p) = &self.strongly_convex {
            let _ = writeln!(
                s,
                "strongly convex (a = {}): delta = {}, batch = {} (raw {}), rate = {:?}",
                cfg.req_a,
                fmt_f64(p.delta),
                p.batch_len,
                fmt_f64(p.batch_len_raw),
                p.rate
            );
        }
        s
    }
}

/// Computes `V_D` for the configured scenario and the parameter choices it
/// implies. The strongly convex suggestion uses the cost's modulus and is
/// skipped when the cost is not strongly convex.
pub fn compute_budget(cfg: &ExperimentConfig) -> HarnessResult<BudgetReport> {
    cfg.validate()?;
    if cfg.horizon < 2 {
        return Err(HarnessError::Config("a variation budget needs T >= 2".into()));
    }
    let scenario = Scenario::build(cfg)?;
    let steps = step_variations(&*scenario.noise, cfg.horizon)?;
    let total: f64 = steps.iter().sum();
    let mut warnings = Vec::new();
    let (convex, strongly_convex) = if total > 0.0 {
        let convex = theorem1_params(cfg.horizon, total, cfg.req_a)
            .map_err(|e| warnings.push(format!("warning: convex parameters unavailable: {e}")))
            .ok();
        let m = scenario.cost.strong_convexity();
        let strongly_convex = if m > 0.0 {
            theorem2_params(cfg.horizon, total, cfg.req_a, m)
                .map_err(|e| warnings.push(format!("warning: strongly convex parameters unavailable: {e}")))
                .ok()
        } else {
            None
        };
        (convex, strongly_convex)
    } else {
        warnings.push("warning: V_D = 0 (static scenario); the batch-length formulas degenerate".into());
        (None, None)
    };
    Ok(BudgetReport { steps, total, convex, strongly_convex, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ScenarioKind;

    #[test]
    fn static_scenario_has_zero_budget() {
        let cfg = ExperimentConfig { scenario: ScenarioKind::Custom, horizon: 50, ..Default::default() };
        let rep = compute_budget(&cfg).unwrap();
        assert_eq!(rep.total, 0.0);
        assert!(rep.convex.is_none());
        assert!(rep.warnings[0].contains("degenerate"));
    }

    #[test]
    fn two_step_translation_equals_shift() {
        let cfg = ExperimentConfig {
            scenario: ScenarioKind::Custom,
            horizon: 2,
            batch_len: 2,
            custom_lo: 0.85,
            custom_hi: 1.15,
            custom_drift: 0.125,
            ..Default::default()
        };
        let rep = compute_budget(&cfg).unwrap();
        assert_eq!(rep.steps.len(), 1);
        assert!((rep.total - 0.125).abs() < 1e-12);
        assert_eq!(rep.steps_csv().lines().count(), 2);
    }

    #[test]
    fn parking_budget_feeds_both_parameter_sets() {
        let rep = compute_budget(&ExperimentConfig::default()).unwrap();
        assert!(rep.total > 0.0 && rep.total < 1.0);
        assert!(rep.convex.is_some() && rep.strongly_convex.is_some());
        assert_eq!(rep.steps.len(), 5999);
    }
}
