//! Risk-averse zeroth-order online learning under drifting noise.
//!
//! The learner minimizes a sequence of CVaR objectives `C_t(x) = CVaR_alpha[J(x, xi_t)]`
//! whose noise law `xi_t ~ D_t` drifts over time. It sees only cost values,
//! estimates the CVaR of a perturbed decision from repeated queries, turns that
//! into a one-point gradient estimate and restarts its step-size and sampling
//! schedules every `batch_len` iterations.
//!
//! Modules:
//! - [`geometry`], [`cost`], [`noise`]: problem definition.
//! - [`risk`]: empirical CDFs, discrete CVaR and DKW helpers.
//! - [`smoothing`]: sphere sampling and the gradient estimate.
//! - [`schedule`]: batch indexing, sample counts, step sizes, theorem parameters.
//! - [`learner`]: the iteration loop.
//! - [`environment`]: drifting sequences and Wasserstein variation budgets.
//! - [`oracle`]: true CVaR, per-step optima and dynamic regret.

pub mod cost;
pub mod environment;
pub mod error;
pub mod geometry;
pub mod learner;
pub mod noise;
pub mod oracle;
pub mod risk;
pub mod schedule;
pub mod smoothing;

pub use cost::{CostModel, FnCost, OccupancyCost};
pub use environment::{BrownianSeq, ExplicitSeq, ParkingSeq};
pub use error::{Error, Result};
pub use geometry::{AdmissibleSet, DecisionVector};
pub use learner::{IterationRecord, LearnerConfig, Trajectory};
pub use noise::{NoiseDist, NoiseSequence};
pub use oracle::{GridPlacement, OracleSettings, RegretReport};
pub use risk::EmpiricalCdf;
pub use schedule::{LearningRateSchedule, SamplingStrategy};
