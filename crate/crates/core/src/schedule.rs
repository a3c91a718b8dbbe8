//! Batch/epoch indexing, sampling-count strategies, learning-rate schedules
//! and the theorem-driven parameter selectors.

use crate::error::{Error, Result};

/// Position of an iteration: batch `j >= 1` and epoch `tau` in `[1, batch_len]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchIndex {
    pub batch: usize,
    pub epoch: usize,
}

impl BatchIndex {
    pub fn iteration(&self, batch_len: usize) -> usize {
        (self.batch - 1) * batch_len + self.epoch
    }
}

/// `j = ceil(t / batch_len)`, `tau = t - (j - 1) batch_len`.
pub fn batch_epoch(t: usize, batch_len: usize) -> Result<BatchIndex> {
    if batch_len < 2 {
        return Err(Error::InvalidBatchSize(batch_len));
    }
    if t == 0 {
        return Err(Error::InvalidParameter("iterations are numbered from 1".into()));
    }
    let batch = t.div_ceil(batch_len);
    Ok(BatchIndex { batch, epoch: t - (batch - 1) * batch_len })
}

/// `ceil(b * (batch_len - tau + 1)^a)`.
pub fn sampling_count_poly(tau: usize, batch_len: usize, a: f64, b: f64) -> Result<usize> {
    if tau == 0 || tau > batch_len {
        return Err(Error::InvalidParameter(format!("epoch {tau} outside [1, {batch_len}]")));
    }
    if !(a > 0.0 && a.is_finite()) || !(b > 0.0 && b.is_finite()) {
        return Err(Error::InvalidParameter(format!("polynomial sampling needs a, b > 0 (got {a}, {b})")));
    }
    let raw = (b * ((batch_len - tau + 1) as f64).powf(a)).ceil();
    Ok((raw as usize).max(1))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SamplingStrategy {
    Constant(usize),
    Polynomial { a: f64, b: f64 },
}

impl SamplingStrategy {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Constant(0) => Err(Error::InvalidParameter("constant sample count must be >= 1".into())),
            Self::Constant(_) => Ok(()),
            Self::Polynomial { a, b } => {
                if a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "polynomial sampling needs a, b > 0 (got {a}, {b})"
                    )))
                }
            }
        }
    }

    /// Number of cost queries at epoch `tau`.
    pub fn count(&self, tau: usize, batch_len: usize) -> Result<usize> {
        match *self {
            Self::Constant(n) => {
                self.validate()?;
                Ok(n)
            }
            Self::Polynomial { a, b } => sampling_count_poly(tau, batch_len, a, b),
        }
    }
}

/// Both sides of `sum_{tau=1}^{batch_len} 1 / sqrt(phi(tau)) <= c * batch_len^(1 - a/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RequirementCheck {
    pub satisfied: bool,
    pub lhs: f64,
    pub rhs: f64,
}

pub fn check_sampling_requirement(
    strategy: &SamplingStrategy,
    batch_len: usize,
    a: f64,
    c: f64,
) -> Result<RequirementCheck> {
    strategy.validate()?;
    let mut lhs = 0.0;
    for tau in 1..=batch_len {
        lhs += 1.0 / (strategy.count(tau, batch_len)? as f64).sqrt();
    }
    let rhs = c * (batch_len as f64).powf(1.0 - a / 2.0);
    Ok(RequirementCheck { satisfied: lhs <= rhs, lhs, rhs })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LearningRateSchedule {
    Constant(f64),
    /// `1 / (m tau)`
    InverseStrong { m: f64 },
}

impl LearningRateSchedule {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Constant(eta) => eta > 0.0 && eta.is_finite(),
            Self::InverseStrong { m } => m > 0.0 && m.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("learning-rate schedule {self:?} must be positive")))
        }
    }

    pub fn rate(&self, tau: usize) -> f64 {
        match *self {
            Self::Constant(eta) => eta,
            Self::InverseStrong { m } => 1.0 / (m * tau.max(1) as f64),
        }
    }
}

/// Multipliers applied to the unit-constant theorem formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamScale {
    pub delta: f64,
    pub eta: f64,
    pub batch: f64,
}

impl Default for ParamScale {
    fn default() -> Self {
        Self { delta: 1.0, eta: 1.0, batch: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexParams {
    pub delta: f64,
    pub eta: f64,
    pub batch_len: usize,
    /// The unrounded batch length.
    pub batch_len_raw: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StronglyConvexParams {
    pub delta: f64,
    pub batch_len: usize,
    pub batch_len_raw: f64,
    pub rate: LearningRateSchedule,
}

fn check_budget(horizon: usize, budget: f64, a: f64) -> Result<()> {
    if horizon < 2 {
        return Err(Error::InvalidParameter(format!("horizon {horizon} must be >= 2")));
    }
    if !(budget > 0.0 && budget < horizon as f64) {
        return Err(Error::BudgetExceedsHorizon { budget, horizon });
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("sampling exponent a = {a} must be positive")));
    }
    Ok(())
}

/// Round half-up and clamp to at least 2.
fn round_batch(raw: f64) -> usize {
    ((raw + 0.5).floor() as usize).max(2)
}

/// Convex case. For `a <= 1`: `delta = (V/T)^(a/(4+a))`, `eta = (V/T)^(3a/(4+a))`,
/// `batch = (T/V)^(4/(4+a))`; for `a > 1` the exponents are `1/5, 3/5, 4/5`.
pub fn theorem1_params(horizon: usize, budget: f64, a: f64) -> Result<ConvexParams> {
    theorem1_params_scaled(horizon, budget, a, &ParamScale::default())
}

pub fn theorem1_params_scaled(horizon: usize, budget: f64, a: f64, scale: &ParamScale) -> Result<ConvexParams> {
    check_budget(horizon, budget, a)?;
    let ratio = budget / horizon as f64;
    let (e_delta, e_eta, e_batch) = if a <= 1.0 {
        (a / (4.0 + a), 3.0 * a / (4.0 + a), 4.0 / (4.0 + a))
    } else {
        (0.2, 0.6, 0.8)
    };
    let raw = scale.batch * ratio.recip().powf(e_batch);
    Ok(ConvexParams {
        delta: scale.delta * ratio.powf(e_delta),
        eta: scale.eta * ratio.powf(e_eta),
        batch_len: round_batch(raw),
        batch_len_raw: raw,
    })
}

/// Strongly convex case with `eta_t = 1 / (m tau)`. For `a <= 4/3`:
/// `delta = (V/T)^(a/(4+a))`, `batch = (T/V)^(4/(4+a))`; otherwise
/// `delta = (V/T)^(1/4)`, `batch = (T/V)^(3/4)`.
pub fn theorem2_params(horizon: usize, budget: f64, a: f64, m: f64) -> Result<StronglyConvexParams> {
    theorem2_params_scaled(horizon, budget, a, m, &ParamScale::default())
}

pub fn theorem2_params_scaled(
    horizon: usize,
    budget: f64,
    a: f64,
    m: f64,
    scale: &ParamScale,
) -> Result<StronglyConvexParams> {
    check_budget(horizon, budget, a)?;
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParameter(format!("strong-convexity modulus {m} must be positive")));
    }
    let ratio = budget / horizon as f64;
    let (e_delta, e_batch) = if a <= 4.0 / 3.0 { (a / (4.0 + a), 4.0 / (4.0 + a)) } else { (0.25, 0.75) };
    let raw = scale.batch * ratio.recip().powf(e_batch);
    Ok(StronglyConvexParams {
        delta: scale.delta * ratio.powf(e_delta),
        batch_len: round_batch(raw),
        batch_len_raw: raw,
        rate: LearningRateSchedule::InverseStrong { m: m / scale.eta },
    })
}
