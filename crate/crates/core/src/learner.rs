//! The restarting zeroth-order CVaR learner.
//!
//! Each iteration `t` locates its batch and epoch, looks up the sample count
//! and step size for that epoch, plays a sphere-perturbed decision `n_t`
//! times, forms the empirical CDF of the observed costs, and takes a projected
//! step along `(d / delta) * CVaR * u`. Iterates are projected onto the shrunk
//! set so every played point stays admissible. At a batch boundary only the
//! epoch counter restarts; the decision carries over.
//!
//! Randomness: one generator per run, seeded from the config. Each iteration
//! draws its direction and then one `u64` that seeds a private generator for
//! that iteration's noise draws. The outer stream therefore advances the same
//! way whatever the sample count, which keeps runs with different `n_t`
//! coupled through their directions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::geometry::{AdmissibleSet, DecisionVector};
use crate::noise::NoiseSequence;
use crate::risk::{check_alpha, EmpiricalCdf};
use crate::schedule::{batch_epoch, LearningRateSchedule, SamplingStrategy};
use crate::smoothing::{gradient_estimate, perturb, sample_unit_sphere};

#[derive(Debug, Clone, PartialEq)]
pub struct LearnerConfig {
    pub horizon: usize,
    pub batch_len: usize,
    pub delta: f64,
    pub alpha: f64,
    pub sampling: SamplingStrategy,
    pub rate: LearningRateSchedule,
    pub x0: DecisionVector,
    pub seed: u64,
}

impl LearnerConfig {
    pub fn validate(&self, set: &AdmissibleSet) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be >= 1".into()));
        }
        if self.batch_len < 2 {
            return Err(Error::InvalidBatchSize(self.batch_len));
        }
        let r = set.inradius();
        if !(self.delta > 0.0 && self.delta < r) {
            return Err(Error::InvalidSmoothingRadius { delta: self.delta, inradius: r });
        }
        check_alpha(self.alpha)?;
        self.sampling.validate()?;
        self.rate.validate()?;
        if self.x0.dim() != set.dim() {
            return Err(Error::DimensionMismatch { expected: set.dim(), got: self.x0.dim() });
        }
        Ok(())
    }
}

/// Everything computed at one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub t: usize,
    pub batch: usize,
    pub epoch: usize,
    pub x: DecisionVector,
    pub u: Vec<f64>,
    pub x_hat: DecisionVector,
    pub n_samples: usize,
    pub costs: Vec<f64>,
    pub cvar_estimate: f64,
    pub gradient: Vec<f64>,
    pub eta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<IterationRecord>,
    /// Set when the initial decision was outside the shrunk set and got projected.
    pub x0_projected: bool,
    /// The last update, `x_{T+1}`.
    pub final_x: DecisionVector,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Runs the learner for `config.horizon` iterations with a generator seeded
/// from `config.seed`.
pub fn run<C, S>(config: &LearnerConfig, cost: &C, noise: &S, set: &AdmissibleSet) -> Result<Trajectory>
where
    C: CostModel + ?Sized,
    S: NoiseSequence + ?Sized,
{
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    run_with_rng(config, cost, noise, set, &mut rng)
}

pub fn run_with_rng<C, S, R>(
    config: &LearnerConfig,
    cost: &C,
    noise: &S,
    set: &AdmissibleSet,
    rng: &mut R,
) -> Result<Trajectory>
where
    C: CostModel + ?Sized,
    S: NoiseSequence + ?Sized,
    R: Rng + ?Sized,
{
    config.validate(set)?;
    if noise.horizon() < config.horizon {
        return Err(Error::Config(format!(
            "noise sequence covers {} steps but the horizon is {}",
            noise.horizon(),
            config.horizon
        )));
    }
    let inner = set.shrunk(config.delta)?;
    let dim = set.dim();
    let x0_projected = !inner.contains(&config.x0);
    let mut x = inner.project(&config.x0)?;
    let mut records = Vec::with_capacity(config.horizon);

    for t in 1..=config.horizon {
        let idx = batch_epoch(t, config.batch_len)?;
        let n_samples = config.sampling.count(idx.epoch, config.batch_len)?;
        let eta = config.rate.rate(idx.epoch);

        let u = sample_unit_sphere(dim, rng);
        let x_hat = perturb(&x, config.delta, &u)?;

        let dist = noise.dist_at(t)?;
        let mut noise_rng = ChaCha8Rng::seed_from_u64(rng.gen());
        let costs: Vec<f64> = (0..n_samples)
            .map(|_| cost.eval(&x_hat, dist.sample(&mut noise_rng)))
            .collect();
        let cvar_estimate = EmpiricalCdf::new(&costs)?.cvar(config.alpha)?;
        let gradient = gradient_estimate(cvar_estimate, &u, dim, config.delta)?;

        let stepped = DecisionVector::new(x.iter().zip(&gradient).map(|(xi, gi)| xi - eta * gi).collect())?;
        let next = inner.project(&stepped)?;

        records.push(IterationRecord {
            t,
            batch: idx.batch,
            epoch: idx.epoch,
            x: std::mem::replace(&mut x, next),
            u,
            x_hat,
            n_samples,
            costs,
            cvar_estimate,
            gradient,
            eta,
        });
    }
    Ok(Trajectory { records, x0_projected, final_x: x })
}
