//! Decision vectors and convex admissible sets.
//!
//! Sets are boxes or Euclidean balls. Both carry a natural center (the
//! Chebyshev center), which is also the fixed point of [`AdmissibleSet::shrunk`]:
//! the shrunk set is the original scaled by `1 - delta / r` about that center,
//! so every point of it stays inside the original set after a perturbation of
//! length `delta` in any direction.

use std::ops::Deref;

use crate::error::{Error, Result};

/// Absolute tolerance used for set membership checks.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DecisionVector(Vec<f64>);

impl DecisionVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Config("decision vector must have dimension >= 1".into()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(coords))
    }

    pub fn scalar(x: f64) -> Result<Self> {
        Self::new(vec![x])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn distance(&self, other: &DecisionVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl Deref for DecisionVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub enum AdmissibleSet {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl AdmissibleSet {
    pub fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Config(format!(
                "box bounds must be nonempty and equal length (got {} and {})",
                lower.len(),
                upper.len()
            )));
        }
        if lower.iter().chain(&upper).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(i) = (0..lower.len()).find(|&i| lower[i] >= upper[i]) {
            return Err(Error::Config(format!(
                "box coordinate {i}: lower {} must be below upper {}",
                lower[i], upper[i]
            )));
        }
        Ok(Self::Box { lower, upper })
    }

    /// One-dimensional interval `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::boxed(vec![lo], vec![hi])
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::Config("ball center must be nonempty".into()));
        }
        if center.iter().any(|v| !v.is_finite()) || !radius.is_finite() {
            return Err(Error::NonFinite);
        }
        if radius <= 0.0 {
            return Err(Error::Config(format!("ball radius {radius} must be positive")));
        }
        Ok(Self::Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Box { lower, .. } => lower.len(),
            Self::Ball { center, .. } => center.len(),
        }
    }

    pub fn center(&self) -> Vec<f64> {
        match self {
            Self::Box { lower, upper } => lower.iter().zip(upper).map(|(l, u)| 0.5 * (l + u)).collect(),
            Self::Ball { center, .. } => center.clone(),
        }
    }

    /// Radius of the largest ball inscribed about [`Self::center`].
    pub fn inradius(&self) -> f64 {
        match self {
            Self::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| 0.5 * (u - l))
                .fold(f64::INFINITY, f64::min),
            Self::Ball { radius, .. } => *radius,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Self::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(l, u)| (u - l) * (u - l))
                .sum::<f64>()
                .sqrt(),
            Self::Ball { radius, .. } => 2.0 * radius,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.contains_within(x, MEMBERSHIP_TOL)
    }

    pub fn contains_within(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        match self {
            Self::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .all(|(v, (l, u))| *v >= l - tol && *v <= u + tol),
            Self::Ball { center, radius } => {
                let dist = x
                    .iter()
                    .zip(center)
                    .map(|(a, c)| (a - c) * (a - c))
                    .sum::<f64>()
                    .sqrt();
                dist <= radius + tol
            }
        }
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got });
        }
        Ok(())
    }

    /// Euclidean projection onto the set. Points already inside are returned unchanged.
    pub fn project(&self, x: &DecisionVector) -> Result<DecisionVector> {
        self.check_dim(x.dim())?;
        let out = match self {
            Self::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .map(|(v, (l, u))| v.clamp(*l, *u))
                .collect(),
            Self::Ball { center, radius } => {
                let offset: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
                let dist = norm(&offset);
                if dist <= *radius {
                    x.as_slice().to_vec()
                } else {
                    let scale = radius / dist;
                    let mut p: Vec<f64> =
                        center.iter().zip(&offset).map(|(c, o)| c + scale * o).collect();
                    // Rounding in `c + scale * o` can leave the result a hair outside.
                    // The margin doubles each pass so a stuck rounding cannot loop forever.
                    let mut margin = f64::EPSILON;
                    loop {
                        let offset: Vec<f64> = p.iter().zip(center).map(|(a, c)| a - c).collect();
                        let dist = norm(&offset);
                        if dist <= *radius {
                            break;
                        }
                        let s = (radius / dist).min(1.0 - margin);
                        margin *= 2.0;
                        for ((pi, c), o) in p.iter_mut().zip(center).zip(&offset) {
                            *pi = c + o * s;
                        }
                    }
                    p
                }
            }
        };
        DecisionVector::new(out)
    }

    /// The set scaled by `1 - delta / r` about its center.
    ///
    /// For every `x` in the result and every unit vector `u`, `x + delta * u`
    /// lies in `self`.
    pub fn shrunk(&self, delta: f64) -> Result<Self> {
        let r = self.inradius();
        if !(delta >= 0.0 && delta < r) {
            return Err(Error::InvalidSmoothingRadius { delta, inradius: r });
        }
        if delta == 0.0 {
            return Ok(self.clone());
        }
        let factor = 1.0 - delta / r;
        Ok(match self {
            Self::Box { lower, upper } => {
                let (lo, hi) = lower
                    .iter()
                    .zip(upper)
                    .map(|(l, u)| {
                        let c = 0.5 * (l + u);
                        let half = 0.5 * (u - l) * factor;
                        (c - half, c + half)
                    })
                    .unzip();
                Self::Box { lower: lo, upper: hi }
            }
            Self::Ball { center, radius } => Self::Ball { center: center.clone(), radius: radius - delta },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dv(v: &[f64]) -> DecisionVector {
        DecisionVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn box_projection_examples() {
        let set = AdmissibleSet::interval(1.0, 5.0).unwrap();
        assert_eq!(set.project(&dv(&[0.0])).unwrap().as_slice(), &[1.0]);
        assert_eq!(set.project(&dv(&[3.0])).unwrap().as_slice(), &[3.0]);
        assert_eq!(set.project(&dv(&[9.0])).unwrap().as_slice(), &[5.0]);
    }

    #[test]
    fn ball_projection_scales_radially() {
        let set = AdmissibleSet::ball(vec![0.0, 0.0], 1.0).unwrap();
        let p = set.project(&dv(&[3.0, 4.0])).unwrap();
        assert!((p[0] - 0.6).abs() < 1e-15);
        assert!((p[1] - 0.8).abs() < 1e-15);
        let inside = dv(&[0.1, -0.2]);
        assert_eq!(set.project(&inside).unwrap(), inside);
    }

    #[test]
    fn ball_projection_terminates_when_rounding_stalls() {
        // a fixed 1 - eps rescale leaves this point unchanged forever
        let set = AdmissibleSet::ball(vec![1.0, -2.0, 0.5, 3.0], 0.6742393668903466).unwrap();
        let x = dv(&[1.0383563624019914, 14.231325125887452, -2.7439220933574404, 9.371647501233873]);
        let p = set.project(&x).unwrap();
        assert!(set.contains(&p));
        assert!(p.distance(&x) - (x.distance(&dv(&[1.0, -2.0, 0.5, 3.0])) - 0.6742393668903466) < 1e-12);
    }

    #[test]
    fn projection_rejects_dimension_mismatch() {
        let set = AdmissibleSet::interval(1.0, 5.0).unwrap();
        assert_eq!(
            set.project(&dv(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        );
    }

    #[test]
    fn derived_quantities() {
        let interval = AdmissibleSet::interval(1.0, 5.0).unwrap();
        assert_eq!(interval.diameter(), 4.0);
        assert_eq!(interval.inradius(), 2.0);
        assert_eq!(interval.center(), vec![3.0]);

        let ball = AdmissibleSet::ball(vec![1.0, 1.0, 1.0], 2.0).unwrap();
        assert_eq!(ball.diameter(), 4.0);
        assert_eq!(ball.inradius(), 2.0);

        let rect = AdmissibleSet::boxed(vec![0.0, 0.0], vec![3.0, 4.0]).unwrap();
        assert_eq!(rect.diameter(), 5.0);
        assert_eq!(rect.inradius(), 1.5);
    }

    #[test]
    fn invalid_sets_are_rejected() {
        assert!(AdmissibleSet::interval(2.0, 2.0).is_err());
        assert!(AdmissibleSet::boxed(vec![0.0], vec![1.0, 2.0]).is_err());
        assert!(AdmissibleSet::ball(vec![0.0], 0.0).is_err());
        assert!(AdmissibleSet::ball(vec![], 1.0).is_err());
        assert!(DecisionVector::new(vec![]).is_err());
        assert_eq!(DecisionVector::new(vec![f64::NAN]), Err(Error::NonFinite));
    }

    #[test]
    fn shrunk_set_examples() {
        let set = AdmissibleSet::interval(1.0, 5.0).unwrap();
        assert_eq!(set.shrunk(0.5).unwrap(), AdmissibleSet::interval(1.5, 4.5).unwrap());
        assert_eq!(set.shrunk(0.0).unwrap(), set);
        assert!(matches!(set.shrunk(2.0), Err(Error::InvalidSmoothingRadius { .. })));
        assert!(set.shrunk(-0.1).is_err());

        let ball = AdmissibleSet::ball(vec![0.0, 0.0], 1.5).unwrap();
        assert_eq!(ball.shrunk(0.25).unwrap(), AdmissibleSet::ball(vec![0.0, 0.0], 1.25).unwrap());
    }

    fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let n = norm(&v);
            if n > 1e-3 {
                return v.iter().map(|c| c / n).collect();
            }
        }
    }

    fn random_point_in(rng: &mut ChaCha8Rng, set: &AdmissibleSet) -> Vec<f64> {
        match set {
            AdmissibleSet::Box { lower, upper } => {
                lower.iter().zip(upper).map(|(l, u)| rng.gen_range(*l..=*u)).collect()
            }
            AdmissibleSet::Ball { center, radius } => {
                let u = random_unit(rng, center.len());
                let s = radius * rng.gen::<f64>();
                center.iter().zip(&u).map(|(c, ui)| c + s * ui).collect()
            }
        }
    }

    fn sample_sets() -> Vec<AdmissibleSet> {
        vec![
            AdmissibleSet::interval(1.0, 5.0).unwrap(),
            AdmissibleSet::boxed(vec![-1.0, 0.0, 2.0], vec![1.0, 3.0, 2.5]).unwrap(),
            AdmissibleSet::ball(vec![0.5, -0.5], 2.0).unwrap(),
            AdmissibleSet::ball(vec![3.0, 0.0, 1.0, -2.0], 0.75).unwrap(),
        ]
    }

    #[test]
    fn projection_is_idempotent_and_nonexpansive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for set in sample_sets() {
            let d = set.dim();
            for _ in 0..1000 {
                let x = dv(&(0..d).map(|_| rng.gen_range(-8.0..8.0)).collect::<Vec<_>>());
                let y = dv(&(0..d).map(|_| rng.gen_range(-8.0..8.0)).collect::<Vec<_>>());
                let px = set.project(&x).unwrap();
                let py = set.project(&y).unwrap();
                assert!(set.contains(&px));
                assert_eq!(set.project(&px).unwrap(), px);
                assert!(px.distance(&py) <= x.distance(&y) + 1e-12);
            }
        }
    }

    #[test]
    fn shrunk_set_keeps_perturbations_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for set in sample_sets() {
            let r = set.inradius();
            for frac in [0.01, 0.3, 0.9] {
                let delta = frac * r;
                let inner = set.shrunk(delta).unwrap();
                for _ in 0..1000 {
                    let x = random_point_in(&mut rng, &inner);
                    let u = random_unit(&mut rng, set.dim());
                    let moved: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a + delta * b).collect();
                    assert!(set.contains(&moved), "{set:?} delta={delta} x={x:?}");
                }
            }
        }
    }

    #[test]
    fn shrunk_sets_are_nested() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for set in sample_sets() {
            let r = set.inradius();
            let small = set.shrunk(0.2 * r).unwrap();
            let large = set.shrunk(0.6 * r).unwrap();
            for _ in 0..1000 {
                let x = random_point_in(&mut rng, &large);
                assert!(small.contains(&x));
                assert!(set.contains(&x));
            }
        }
    }
}
