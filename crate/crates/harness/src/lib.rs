//! Experiment harness for the risk-averse online learner: configuration,
//! seeded multi-trial runs with oracle evaluation, CSV output, variation
//! budgets and the property suites behind `rals verify`.

pub mod budget;
pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod scenario;
pub mod verify;

pub use config::{ExperimentConfig, ScenarioKind};
pub use error::{HarnessError, HarnessResult};
pub use experiment::{run_ablation, run_experiment, AblationRow, ExperimentOutcome, TrialAggregate, TrialRun};
pub use scenario::Scenario;
