//! Cost models `J(x, xi)` with their bound and Lipschitz metadata.

use std::fmt;
use std::sync::Arc;

use crate::geometry::AdmissibleSet;

/// A bounded cost `J(x, xi)` with scalar noise `xi`.
///
/// `bound` is `U` with `|J| <= U` over the admissible set and noise support,
/// `lipschitz` is `L0` in `x`, and `strong_convexity` is the modulus `m`
/// (zero for merely convex costs).
pub trait CostModel: Send + Sync {
    fn eval(&self, x: &[f64], xi: f64) -> f64;
    fn bound(&self) -> f64;
    fn lipschitz(&self) -> f64;
    fn strong_convexity(&self) -> f64 {
        0.0
    }
}

impl<C: CostModel + ?Sized> CostModel for &C {
    fn eval(&self, x: &[f64], xi: f64) -> f64 {
        (**self).eval(x, xi)
    }
    fn bound(&self) -> f64 {
        (**self).bound()
    }
    fn lipschitz(&self) -> f64 {
        (**self).lipschitz()
    }
    fn strong_convexity(&self) -> f64 {
        (**self).strong_convexity()
    }
}

impl<C: CostModel + ?Sized> CostModel for Arc<C> {
    fn eval(&self, x: &[f64], xi: f64) -> f64 {
        (**self).eval(x, xi)
    }
    fn bound(&self) -> f64 {
        (**self).bound()
    }
    fn lipschitz(&self) -> f64 {
        (**self).lipschitz()
    }
    fn strong_convexity(&self) -> f64 {
        (**self).strong_convexity()
    }
}

/// Occupancy-tracking price cost:
/// `J(x, xi) = (xi + elasticity * x - target)^2 + (reg / 2) * |x|^2`.
///
/// For scalar prices the elasticity multiplies the single coordinate; for
/// `d > 1` it multiplies the coordinate sum.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyCost {
    pub elasticity: f64,
    pub target: f64,
    pub reg: f64,
    bound: f64,
    lipschitz: f64,
}

impl OccupancyCost {
    /// Builds the cost with `U` and `L0` computed over the box hull of `set`
    /// and noise values in `[xi_lo, xi_hi]`.
    pub fn new(elasticity: f64, target: f64, reg: f64, set: &AdmissibleSet, xi_lo: f64, xi_hi: f64) -> Self {
        let (lo, hi) = hull(set);
        let mut sum_lo = 0.0;
        let mut sum_hi = 0.0;
        let mut sq_max = 0.0;
        for (l, h) in lo.iter().zip(&hi) {
            sum_lo += l;
            sum_hi += h;
            sq_max += l.abs().max(h.abs()).powi(2);
        }
        let price_terms = [elasticity * sum_lo, elasticity * sum_hi];
        let r_min = xi_lo + price_terms[0].min(price_terms[1]) - target;
        let r_max = xi_hi + price_terms[0].max(price_terms[1]) - target;
        let r_abs = r_min.abs().max(r_max.abs());
        let d = lo.len() as f64;
        let bound = r_abs * r_abs + 0.5 * reg * sq_max;
        // |grad| <= 2|A| |r| sqrt(d) + reg |x|
        let lipschitz = 2.0 * elasticity.abs() * r_abs * d.sqrt() + reg * sq_max.sqrt();
        Self { elasticity, target, reg, bound, lipschitz }
    }

    /// The parking cost with elasticity `-0.15`, target occupancy `0.7` and
    /// regularization `0.001`.
    pub fn parking(set: &AdmissibleSet, xi_lo: f64, xi_hi: f64) -> Self {
        Self::new(-0.15, 0.7, 0.001, set, xi_lo, xi_hi)
    }
}

fn hull(set: &AdmissibleSet) -> (Vec<f64>, Vec<f64>) {
    match set {
        AdmissibleSet::Box { lower, upper } => (lower.clone(), upper.clone()),
        AdmissibleSet::Ball { center, radius } => (
            center.iter().map(|c| c - radius).collect(),
            center.iter().map(|c| c + radius).collect(),
        ),
    }
}

impl CostModel for OccupancyCost {
    fn eval(&self, x: &[f64], xi: f64) -> f64 {
        let price: f64 = x.iter().sum();
        let sq: f64 = x.iter().map(|v| v * v).sum();
        let r = xi + self.elasticity * price - self.target;
        r * r + 0.5 * self.reg * sq
    }
    fn bound(&self) -> f64 {
        self.bound
    }
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
    fn strong_convexity(&self) -> f64 {
        self.reg
    }
}

/// A cost given by a closure plus declared metadata. Mostly for tests and
/// synthetic scenarios.
#[derive(Clone)]
pub struct FnCost<F> {
    f: F,
    bound: f64,
    lipschitz: f64,
    strong_convexity: f64,
}

impl<F> FnCost<F>
where
    F: Fn(&[f64], f64) -> f64 + Send + Sync,
{
    pub fn new(f: F, bound: f64, lipschitz: f64) -> Self {
        Self { f, bound, lipschitz, strong_convexity: 0.0 }
    }

    pub fn with_strong_convexity(mut self, m: f64) -> Self {
        self.strong_convexity = m.max(0.0);
        self
    }
}

impl<F> fmt::Debug for FnCost<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnCost")
            .field("bound", &self.bound)
            .field("lipschitz", &self.lipschitz)
            .field("strong_convexity", &self.strong_convexity)
            .finish_non_exhaustive()
    }
}

impl<F> CostModel for FnCost<F>
where
    F: Fn(&[f64], f64) -> f64 + Send + Sync,
{
    fn eval(&self, x: &[f64], xi: f64) -> f64 {
        (self.f)(x, xi)
    }
    fn bound(&self) -> f64 {
        self.bound
    }
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
    fn strong_convexity(&self) -> f64 {
        self.strong_convexity
    }
}
