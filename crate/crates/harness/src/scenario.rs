//! Turns a configuration into a cost, a noise sequence and an admissible set.

use std::sync::Arc;

use riskaverse::{
    AdmissibleSet, BrownianSeq, CostModel, ExplicitSeq, NoiseDist, NoiseSequence, OccupancyCost, ParkingSeq,
};

use crate::config::{ExperimentConfig, ScenarioKind};
use crate::error::{HarnessError, HarnessResult};

/// Gaussian noise is truncated at this many standard deviations when
/// computing cost bounds.
pub const GAUSSIAN_BOUND_SIGMAS: f64 = 6.0;

pub struct Scenario {
    pub kind: ScenarioKind,
    pub cost: OccupancyCost,
    pub noise: Arc<dyn NoiseSequence>,
    pub set: AdmissibleSet,
    /// Interval used to bound the cost.
    pub noise_hull: (f64, f64),
    /// Human-readable notes for the run log.
    pub notes: Vec<String>,
}

impl Scenario {
    pub fn build(cfg: &ExperimentConfig) -> HarnessResult<Self> {
        let config_err = |e: riskaverse::Error| HarnessError::Config(e.to_string());
        let set = AdmissibleSet::interval(cfg.x_lo, cfg.x_hi).map_err(config_err)?;
        let mut notes = Vec::new();
        let (noise, hull): (Arc<dyn NoiseSequence>, _) = match cfg.scenario {
            ScenarioKind::Parking => {
                let seq = ParkingSeq::new(cfg.horizon).map_err(config_err)?;
                let degenerate = seq.degenerate_steps();
                if !degenerate.is_empty() {
                    notes.push(format!(
                        "warning: occupancy range is empty at steps {}; using a point mass at the lower end",
                        compress_steps(&degenerate)
                    ));
                }
                (Arc::new(seq), seq.support_hull())
            }
            ScenarioKind::Brownian => {
                let seq = BrownianSeq::new(cfg.diffusivity, cfg.brownian_center, cfg.horizon).map_err(config_err)?;
                let reach = GAUSSIAN_BOUND_SIGMAS * seq.sd_at(cfg.horizon);
                notes.push(format!("cost bounds use the noise truncated at +/-{GAUSSIAN_BOUND_SIGMAS} sd"));
                (Arc::new(seq), (cfg.brownian_center - reach, cfg.brownian_center + reach))
            }
            ScenarioKind::Custom => {
                let laws = (0..cfg.horizon)
                    .map(|i| {
                        let shift = cfg.custom_drift * i as f64;
                        NoiseDist::uniform(cfg.custom_lo + shift, cfg.custom_hi + shift)
                    })
                    .collect::<riskaverse::Result<Vec<_>>>()
                    .map_err(config_err)?;
                let end = cfg.custom_drift * (cfg.horizon - 1) as f64;
                let hull = (cfg.custom_lo + end.min(0.0), cfg.custom_hi + end.max(0.0));
                (Arc::new(ExplicitSeq::new(laws).map_err(config_err)?), hull)
            }
        };
        let cost = OccupancyCost::new(cfg.elasticity, cfg.target, cfg.reg, &set, hull.0, hull.1);
        notes.push(format!(
            "cost bounds over X = [{}, {}] and noise in [{:.6}, {:.6}]: U = {:.6}, L0 = {:.6}",
            cfg.x_lo,
            cfg.x_hi,
            hull.0,
            hull.1,
            cost.bound(),
            cost.lipschitz()
        ));
        Ok(Self { kind: cfg.scenario, cost, noise, set, noise_hull: hull, notes })
    }
}

/// `[1, 2, 3, 7]` as `1-3, 7`.
pub fn compress_steps(steps: &[usize]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < steps.len() {
        let mut j = i;
        while j + 1 < steps.len() && steps[j + 1] == steps[j] + 1 {
            j += 1;
        }
        parts.push(if i == j { steps[i].to_string() } else { format!("{}-{}", steps[i], steps[j]) });
        i = j + 1;
    }
    parts.join(", ")
}
