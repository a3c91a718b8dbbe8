//! Ground-truth evaluation of the learner.
//!
//! True CVaR values come from deterministic mid-quantile grids: the noise law
//! at step `t` is represented by `xi_i = F_t^{-1}((i - 0.5) / n)`, the cost is
//! evaluated at every node and the discrete CVaR of those values is taken.
//! Optimal actions are searched over a fixed 1-D grid of candidate decisions.

use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::geometry::AdmissibleSet;
use crate::learner::IterationRecord;
use crate::noise::{NoiseDist, NoiseSequence};
use crate::risk::cvar_of_values;

pub const MIN_QUANTILE_GRID: usize = 1000;

/// Noise values at the mid-quantile levels `(i - 0.5) / n`.
pub fn quantile_nodes(dist: &NoiseDist, grid_n: usize) -> Result<Vec<f64>> {
    if grid_n < MIN_QUANTILE_GRID {
        return Err(Error::Config(format!(
            "quantile grid of {grid_n} points is below the minimum {MIN_QUANTILE_GRID}"
        )));
    }
    let n = grid_n as f64;
    let nodes: Vec<f64> = (0..grid_n).map(|i| dist.quantile((i as f64 + 0.5) / n)).collect();
    if nodes.iter().any(|v| !v.is_finite()) {
        return Err(Error::Environment(format!("non-finite quantile for {dist:?}")));
    }
    Ok(nodes)
}

/// CVaR of `J(x, xi)` over precomputed quantile nodes. `scratch` is reused
/// between calls to avoid reallocating.
pub fn cvar_on_nodes<C: CostModel + ?Sized>(
    cost: &C,
    nodes: &[f64],
    x: &[f64],
    alpha: f64,
    scratch: &mut Vec<f64>,
) -> Result<f64> {
    scratch.clear();
    scratch.extend(nodes.iter().map(|&xi| cost.eval(x, xi)));
    cvar_of_values(scratch, alpha)
}

/// `C_t(x) = CVaR_alpha[J(x, xi_t)]` on a `grid_n`-point quantile grid.
pub fn true_cvar<C, S>(cost: &C, noise: &S, t: usize, x: &[f64], alpha: f64, grid_n: usize) -> Result<f64>
where
    C: CostModel + ?Sized,
    S: NoiseSequence + ?Sized,
{
    let nodes = quantile_nodes(&noise.dist_at(t)?, grid_n)?;
    cvar_on_nodes(cost, &nodes, x, alpha, &mut Vec::with_capacity(grid_n))
}

/// Placement of the candidate decisions inside an interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridPlacement {
    /// Midpoints of `K` equal subintervals.
    #[default]
    Centers,
    /// `K` equally spaced points including both endpoints.
    Endpoints,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSettings {
    pub alpha: f64,
    /// Number of candidate decisions `K`.
    pub candidates: usize,
    pub placement: GridPlacement,
    /// Quantile nodes per true-CVaR evaluation.
    pub grid_n: usize,
}

impl OracleSettings {
    pub fn new(alpha: f64, candidates: usize, grid_n: usize) -> Self {
        Self { alpha, candidates, placement: GridPlacement::Centers, grid_n }
    }

    pub fn with_placement(mut self, placement: GridPlacement) -> Self {
        self.placement = placement;
        self
    }
}

/// Candidate decisions for a one-dimensional set.
pub fn candidate_grid(set: &AdmissibleSet, candidates: usize, placement: GridPlacement) -> Result<Vec<f64>> {
    if candidates < 2 {
        return Err(Error::Config(format!("need at least 2 candidate points, got {candidates}")));
    }
    let (lo, hi) = match set {
        AdmissibleSet::Box { lower, upper } if lower.len() == 1 => (lower[0], upper[0]),
        AdmissibleSet::Ball { center, radius } if center.len() == 1 => (center[0] - radius, center[0] + radius),
        _ => {
            return Err(Error::Config(format!(
                "optimal-action search is one-dimensional only (set has dimension {})",
                set.dim()
            )))
        }
    };
    let k = candidates as f64;
    Ok(match placement {
        GridPlacement::Centers => (0..candidates).map(|i| lo + (i as f64 + 0.5) * (hi - lo) / k).collect(),
        GridPlacement::Endpoints => (0..candidates)
            .map(|i| if i + 1 == candidates { hi } else { lo + i as f64 * (hi - lo) / (k - 1.0) })
            .collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridOptimum {
    pub x: f64,
    pub value: f64,
}

/// Index of the smallest value; ties go to the earlier (smaller) candidate.
fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v < values[best] {
            best = i;
        }
    }
    best
}

/// Row of `C_t(x_k)` over the candidate grid.
fn cvar_row<C, S>(cost: &C, noise: &S, t: usize, grid: &[f64], settings: &OracleSettings) -> Result<Vec<f64>>
where
    C: CostModel + ?Sized,
    S: NoiseSequence + ?Sized,
{
    let nodes = quantile_nodes(&noise.dist_at(t)?, settings.grid_n)?;
    let mut scratch = Vec::with_capacity(nodes.len());
    grid.iter()
        .map(|&x| cvar_on_nodes(cost, &nodes, &[x], settings.alpha, &mut scratch))
        .collect()
}

/// Grid minimizer of `C_t` and its value.
pub fn optimal_action_grid<C, S>(
    cost: &C,
    noise: &S,
    t: usize,
    set: &AdmissibleSet,
    settings: &OracleSettings,
) -> Result<GridOptimum>
where
    C: CostModel + ?Sized,
    S: NoiseSequence + ?Sized,
{
    let grid = candidate_grid(set, settings.candidates, settings.placement)?;
    let row = cvar_row(cost, noise, t, &grid, settings)?;
    let best = argmin(&row);
    Ok(GridOptimum { x: grid[best], value: row[best] })
}

/// Per-step grid optima for `t = 1..=horizon`, evaluated in parallel.
pub fn optimal_path<C, S>(
    cost: &C,
    noise: &S,
    horizon: usize,
    set: &AdmissibleSet,
    settings: &OracleSettings,
) -> Result<Vec<GridOptimum>>
where
    C: CostModel + ?Sized,
    S: NoiseSequence + ?Sized,
{
    let grid = candidate_grid(set, settings.candidates, settings.placement)?;
    (1..=horizon)
        .into_par_iter()
        .map(|t| {
            let row = cvar_row(cost, noise, t, &grid, settings)?;
            let best = argmin(&row);
            Ok(GridOptimum { x: grid[best], value: row[best] })
        })
        .collect()
}

/// `C_t(x_hat_t)` for every record, evaluated in parallel.
pub fn played_cvars<C, S>(trajectory: &[IterationRecord], cost: &C, noise: &S, alpha: f64, grid_n: usize) -> Result<Vec<f64>>
where
    C: CostModel + ?Sized,
    S: NoiseSequence + ?Sized,
{
    trajectory
        .par_iter()
        .map(|rec| true_cvar(cost, noise, rec.t, rec.x_hat.as_slice(), alpha, grid_n))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretReport {
    /// `C_t(x_hat_t)`
    pub played: Vec<f64>,
    /// `C_t(x_t*)`
    pub optimal: Vec<f64>,
    pub optimal_actions: Vec<f64>,
    /// `DR(t)`
    pub cumulative_regret: Vec<f64>,
    /// Running sum of `C_t(x_hat_t)`.
    pub accumulated_loss: Vec<f64>,
}

impl RegretReport {
    pub fn from_parts(played: Vec<f64>, optimum: &[GridOptimum]) -> Result<Self> {
        if played.len() != optimum.len() {
            return Err(Error::Config(format!(
                "played ({}) and optimal ({}) sequences differ in length",
                played.len(),
                optimum.len()
            )));
        }
        let optimal: Vec<f64> = optimum.iter().map(|o| o.value).collect();
        let optimal_actions = optimum.iter().map(|o| o.x).collect();
        let mut cumulative_regret = Vec::with_capacity(played.len());
        let mut dr = 0.0;
        for (p, o) in played.iter().zip(&optimal) {
            dr += p - o;
            cumulative_regret.push(dr);
        }
        let accumulated_loss = running_sum(&played);
        Ok(Self { played, optimal, optimal_actions, cumulative_regret, accumulated_loss })
    }

    pub fn horizon(&self) -> usize {
        self.played.len()
    }

    /// `DR(t)` for 1-based `t`.
    pub fn regret_at(&self, t: usize) -> f64 {
        self.cumulative_regret[t - 1]
    }

    pub fn total_regret(&self) -> f64 {
        self.cumulative_regret.last().copied().unwrap_or(0.0)
    }
}

fn running_sum(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .scan(0.0, |acc, v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

/// Dynamic regret of a trajectory against per-step grid optima.
pub fn dynamic_regret<C, S>(
    trajectory: &[IterationRecord],
    cost: &C,
    noise: &S,
    set: &AdmissibleSet,
    settings: &OracleSettings,
) -> Result<RegretReport>
where
    C: CostModel + ?Sized,
    S: NoiseSequence + ?Sized,
{
    check_coverage(trajectory)?;
    let optimum = optimal_path(cost, noise, trajectory.len(), set, settings)?;
    let played = played_cvars(trajectory, cost, noise, settings.alpha, settings.grid_n)?;
    RegretReport::from_parts(played, &optimum)
}

fn check_coverage(trajectory: &[IterationRecord]) -> Result<()> {
    if let Some((i, rec)) = trajectory.iter().enumerate().find(|(i, rec)| rec.t != i + 1) {
        return Err(Error::Config(format!("trajectory entry {i} has t = {}, expected {}", rec.t, i + 1)));
    }
    Ok(())
}

/// Running sum of `C_t(x_hat_t)`.
pub fn accumulated_loss<C, S>(trajectory: &[IterationRecord], cost: &C, noise: &S, alpha: f64, grid_n: usize) -> Result<Vec<f64>>
where
    C: CostModel + ?Sized,
    S: NoiseSequence + ?Sized,
{
    Ok(running_sum(&played_cvars(trajectory, cost, noise, alpha, grid_n)?))
}

/// Table of `C_t(x_k)` for `t` in `steps` (rows) and candidates `x_k` (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct CvarTable {
    pub steps: RangeInclusive<usize>,
    pub grid: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

impl CvarTable {
    pub fn build<C, S>(cost: &C, noise: &S, steps: RangeInclusive<usize>, set: &AdmissibleSet, settings: &OracleSettings) -> Result<Self>
    where
        C: CostModel + ?Sized,
        S: NoiseSequence + ?Sized,
    {
        if steps.is_empty() || *steps.start() == 0 {
            return Err(Error::Config(format!("invalid step range {steps:?}")));
        }
        let grid = candidate_grid(set, settings.candidates, settings.placement)?;
        let rows = steps
            .clone()
            .into_par_iter()
            .map(|t| cvar_row(cost, noise, t, &grid, settings))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { steps, grid, rows })
    }

    pub fn row(&self, t: usize) -> &[f64] {
        &self.rows[t - self.steps.start()]
    }

    /// Per-step grid optimum.
    pub fn step_optimum(&self, t: usize) -> GridOptimum {
        let row = self.row(t);
        let k = argmin(row);
        GridOptimum { x: self.grid[k], value: row[k] }
    }

    /// Single best grid decision for the sum of `C_t` over `batch`.
    pub fn batch_optimum(&self, batch: RangeInclusive<usize>) -> GridOptimum {
        let totals: Vec<f64> = (0..self.grid.len())
            .map(|k| batch.clone().map(|t| self.row(t)[k]).sum())
            .collect();
        let k = argmin(&totals);
        GridOptimum { x: self.grid[k], value: totals[k] }
    }

    /// `sum_{t in batch, t-1 in table} max_k |C_t(x_k) - C_{t-1}(x_k)|`.
    pub fn function_variation(&self, batch: RangeInclusive<usize>) -> f64 {
        batch
            .filter(|&t| t > *self.steps.start())
            .map(|t| {
                self.row(t)
                    .iter()
                    .zip(self.row(t - 1))
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .sum()
    }

    /// `sum_{t in batch} (C_t(x_batch*) - C_t(x_t*))`.
    pub fn batch_comparator_gap(&self, batch: RangeInclusive<usize>) -> f64 {
        let best = self.batch_optimum(batch.clone());
        let per_step: f64 = batch.map(|t| self.step_optimum(t).value).sum();
        best.value - per_step
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchOptimum {
    pub x: f64,
    /// `sum_{t in batch} C_t(x)` at the minimizer.
    pub total: f64,
}

/// Grid minimizer of `sum_{t in batch} C_t(x)`.
pub fn batch_optimal_actions<C, S>(
    cost: &C,
    noise: &S,
    batch: RangeInclusive<usize>,
    set: &AdmissibleSet,
    settings: &OracleSettings,
) -> Result<BatchOptimum>
where
    C: CostModel + ?Sized,
    S: NoiseSequence + ?Sized,
{
    let table = CvarTable::build(cost, noise, batch.clone(), set, settings)?;
    let best = table.batch_optimum(batch);
    Ok(BatchOptimum { x: best.x, total: best.value })
}
