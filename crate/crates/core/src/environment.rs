//! Concrete drifting noise sequences and Wasserstein-1 variation accounting.
//!
//! In one dimension `W1(P, Q) = ∫ |F_P - F_Q| dy = ∫_0^1 |Q_P(q) - Q_Q(q)| dq`.
//! Uniform and Gaussian pairs have closed forms; anything else falls back to
//! trapezoidal quadrature of the CDF gap.

use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::noise::{NoiseDist, NoiseSequence};

/// Quadrature resolution used by [`w1_between`] for mixed pairs.
pub const MIXED_PAIR_GRID: usize = 100_000;

/// Parking occupancy range at iteration `t` of a horizon `T`:
/// `[0.85, 1.15 - 0.5 t^-0.5]` while `t < T/2`, then `[0.85 + 0.5 t^-0.1, 1.1]`.
pub fn parking_range(t: usize, horizon: usize) -> (f64, f64) {
    let tf = t as f64;
    if 2 * t < horizon {
        (0.85, 1.15 - 0.5 * tf.powf(-0.5))
    } else {
        (0.85 + 0.5 * tf.powf(-0.1), 1.1)
    }
}

/// Uniform noise on [`parking_range`].
///
/// The first branch is empty for `t <= 2` (`R < L`), and the second is empty
/// for `t <= 1024`, which matters only for horizons up to 2048. Such steps
/// become a point mass at `L`; [`ParkingSeq::degenerate_steps`] lists them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParkingSeq {
    horizon: usize,
}

impl ParkingSeq {
    pub fn new(horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Config("horizon must be >= 1".into()));
        }
        Ok(Self { horizon })
    }

    pub fn range(&self, t: usize) -> (f64, f64) {
        parking_range(t, self.horizon)
    }

    pub fn degenerate_steps(&self) -> Vec<usize> {
        (1..=self.horizon)
            .filter(|&t| {
                let (l, r) = self.range(t);
                r <= l
            })
            .collect()
    }

    /// Smallest lower and largest upper endpoint over the horizon.
    pub fn support_hull(&self) -> (f64, f64) {
        (1..=self.horizon).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
            let (l, r) = self.range(t);
            (lo.min(l), hi.max(r.max(l)))
        })
    }
}

impl NoiseSequence for ParkingSeq {
    fn horizon(&self) -> usize {
        self.horizon
    }

    fn dist_at(&self, t: usize) -> Result<NoiseDist> {
        self.check_step(t)?;
        let (l, r) = self.range(t);
        if r <= l {
            Ok(NoiseDist::PointMass(l))
        } else {
            NoiseDist::uniform(l, r)
        }
    }
}

/// Spreading Gaussian `N(center, 2 D t)`, the law of a Brownian particle
/// with diffusivity `D` started at `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrownianSeq {
    pub diffusivity: f64,
    pub center: f64,
    horizon: usize,
}

impl BrownianSeq {
    pub fn new(diffusivity: f64, center: f64, horizon: usize) -> Result<Self> {
        if !(diffusivity > 0.0 && diffusivity.is_finite()) || !center.is_finite() {
            return Err(Error::Config(format!("invalid diffusivity {diffusivity} or center {center}")));
        }
        if horizon == 0 {
            return Err(Error::Config("horizon must be >= 1".into()));
        }
        Ok(Self { diffusivity, center, horizon })
    }

    pub fn sd_at(&self, t: usize) -> f64 {
        (2.0 * self.diffusivity * t as f64).sqrt()
    }
}

impl NoiseSequence for BrownianSeq {
    fn horizon(&self) -> usize {
        self.horizon
    }

    fn dist_at(&self, t: usize) -> Result<NoiseDist> {
        self.check_step(t)?;
        NoiseDist::gaussian(self.center, self.sd_at(t))
    }
}

/// An explicitly listed sequence; entry `i` is the law at `t = i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitSeq {
    laws: Vec<NoiseDist>,
}

impl ExplicitSeq {
    pub fn new(laws: Vec<NoiseDist>) -> Result<Self> {
        if laws.is_empty() {
            return Err(Error::Config("sequence must contain at least one law".into()));
        }
        Ok(Self { laws })
    }

    /// The same law at every step.
    pub fn stationary(law: NoiseDist, horizon: usize) -> Result<Self> {
        Self::new(vec![law; horizon])
    }
}

impl NoiseSequence for ExplicitSeq {
    fn horizon(&self) -> usize {
        self.laws.len()
    }

    fn dist_at(&self, t: usize) -> Result<NoiseDist> {
        self.check_step(t)?;
        Ok(self.laws[t - 1])
    }
}

/// `∫_0^1 |p + s q| dq`, split at the sign change when it lies inside.
fn abs_linear_integral(p: f64, s: f64) -> f64 {
    let end = p + s;
    if p * end >= 0.0 {
        return 0.5 * (p.abs() + end.abs());
    }
    let root = -p / s;
    0.5 * (p.abs() * root + end.abs() * (1.0 - root))
}

/// Closed-form W1 between `U[a1, b1]` and `U[a2, b2]` (point masses when an
/// interval is a single point).
pub fn w1_uniform(a1: f64, b1: f64, a2: f64, b2: f64) -> f64 {
    abs_linear_integral(a1 - a2, (b1 - a1) - (b2 - a2))
}

/// Closed-form W1 between `N(m1, s1^2)` and `N(m2, s2^2)`: `E|dm + ds Z|`.
pub fn w1_gaussian(m1: f64, s1: f64, m2: f64, s2: f64) -> f64 {
    let dm = m1 - m2;
    let ds = (s1 - s2).abs();
    if ds == 0.0 {
        return dm.abs();
    }
    let z = dm / ds;
    let std = Normal::new(0.0, 1.0).expect("standard normal");
    ds * (2.0 * std.pdf(z) + z * (2.0 * std.cdf(z) - 1.0))
}

/// Trapezoidal `∫_lo^hi |F1 - F2| dy` on `grid` equal intervals.
pub fn w1_numeric<F, G>(cdf1: F, cdf2: G, support: (f64, f64), grid: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let (lo, hi) = support;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Config("numeric W1 needs an explicitly truncated, finite support".into()));
    }
    if hi < lo {
        return Err(Error::Config(format!("support [{lo}, {hi}] is reversed")));
    }
    if grid < 1000 {
        return Err(Error::Config(format!("numeric W1 grid {grid} is below 1000")));
    }
    if hi == lo {
        return Ok(0.0);
    }
    let h = (hi - lo) / grid as f64;
    let gap = |i: usize| {
        let y = if i == grid { hi } else { lo + i as f64 * h };
        (cdf1(y) - cdf2(y)).abs()
    };
    let interior: f64 = (1..grid).map(gap).sum();
    Ok(h * (0.5 * (gap(0) + gap(grid)) + interior))
}

/// Support used to truncate a law for quadrature: bounded supports as is,
/// Gaussians at `mean ± 10 sd`.
pub fn truncated_support(dist: &NoiseDist) -> (f64, f64) {
    match *dist {
        NoiseDist::Gaussian { mean, sd } => (mean - 10.0 * sd, mean + 10.0 * sd),
        other => other.support().expect("bounded law"),
    }
}

/// W1 between two laws: closed form for uniform/point-mass pairs and for
/// Gaussian/point-mass pairs, quadrature otherwise.
pub fn w1_between(p: &NoiseDist, q: &NoiseDist) -> Result<f64> {
    use NoiseDist::*;
    let as_uniform = |d: &NoiseDist| match *d {
        PointMass(v) => Some((v, v)),
        Uniform { lo, hi } => Some((lo, hi)),
        Gaussian { .. } => None,
    };
    let as_gaussian = |d: &NoiseDist| match *d {
        PointMass(v) => Some((v, 0.0)),
        Gaussian { mean, sd } => Some((mean, sd)),
        Uniform { .. } => None,
    };
    if let (Some((a1, b1)), Some((a2, b2))) = (as_uniform(p), as_uniform(q)) {
        return Ok(w1_uniform(a1, b1, a2, b2));
    }
    if let (Some((m1, s1)), Some((m2, s2))) = (as_gaussian(p), as_gaussian(q)) {
        return Ok(w1_gaussian(m1, s1, m2, s2));
    }
    let (l1, h1) = truncated_support(p);
    let (l2, h2) = truncated_support(q);
    w1_numeric(|y| p.cdf(y), |y| q.cdf(y), (l1.min(l2), h1.max(h2)), MIXED_PAIR_GRID)
}

/// `W1(D_{t-1}, D_t)` for `t = 2..=horizon`; entry `i` belongs to `t = i + 2`.
pub fn step_variations<S: NoiseSequence + ?Sized>(noise: &S, horizon: usize) -> Result<Vec<f64>> {
    if horizon < 2 {
        return Err(Error::Config(format!("variation needs a horizon >= 2, got {horizon}")));
    }
    if horizon > noise.horizon() {
        return Err(Error::Config(format!(
            "horizon {horizon} exceeds the sequence length {}",
            noise.horizon()
        )));
    }
    let mut prev = noise.dist_at(1)?;
    let mut out = Vec::with_capacity(horizon - 1);
    for t in 2..=horizon {
        let cur = noise.dist_at(t)?;
        out.push(w1_between(&prev, &cur)?);
        prev = cur;
    }
    Ok(out)
}

/// Distribution variation `sum_{t=2}^T W1(D_{t-1}, D_t)`.
pub fn variation_budget<S: NoiseSequence + ?Sized>(noise: &S, horizon: usize) -> Result<f64> {
    Ok(step_variations(noise, horizon)?.iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parking_range_examples() {
        let (l, r) = parking_range(4, 6000);
        assert_eq!(l, 0.85);
        assert!((r - 0.90).abs() < 1e-15);
        let (l, r) = parking_range(3000, 6000);
        assert!((l - 1.074_521_470_966_271_5).abs() < 1e-12);
        assert_eq!(r, 1.1);
        let (l, r) = parking_range(2704, 6000);
        assert_eq!(l, 0.85);
        assert!((r - (1.15 - 0.5 / 52.0)).abs() < 1e-15);
    }

    #[test]
    fn parking_degenerate_steps_are_point_masses() {
        let seq = ParkingSeq::new(6000).unwrap();
        assert_eq!(seq.degenerate_steps(), vec![1, 2]);
        assert_eq!(seq.dist_at(1).unwrap(), NoiseDist::PointMass(0.85));
        assert!(matches!(seq.dist_at(3).unwrap(), NoiseDist::Uniform { .. }));
        assert!(seq.dist_at(0).is_err());
        assert!(seq.dist_at(6001).is_err());
        let (lo, hi) = seq.support_hull();
        assert_eq!(lo, 0.85);
        assert!(hi < 1.15 && hi > 1.14);

        // short horizons reach the second branch while it is still empty
        let short = ParkingSeq::new(10).unwrap();
        assert_eq!(short.degenerate_steps(), vec![1, 2, 5, 6, 7, 8, 9, 10]);
        let (l, _) = short.range(5);
        assert_eq!(short.dist_at(5).unwrap(), NoiseDist::PointMass(l));
        assert_eq!(short.support_hull().1, l);
    }

    #[test]
    fn brownian_variance_grows() {
        let seq = BrownianSeq::new(0.5, 0.0, 100).unwrap();
        let mut prev = 0.0;
        for t in 1..=100 {
            let NoiseDist::Gaussian { sd, .. } = seq.dist_at(t).unwrap() else { panic!() };
            assert!((sd * sd - t as f64).abs() < 1e-9);
            assert!(sd > prev);
            prev = sd;
        }
    }

    #[test]
    fn w1_uniform_examples() {
        assert_eq!(w1_uniform(0.3, 0.9, 0.3, 0.9), 0.0);
        assert_eq!(w1_uniform(0.0, 1.0, 1.0, 2.0), 1.0);
        assert_eq!(w1_uniform(0.0, 1.0, 0.0, 2.0), 0.5);
        // point mass at 0 vs U[-1, 1]: E|X| = 1/2
        assert_eq!(w1_uniform(0.0, 0.0, -1.0, 1.0), 0.5);
    }

    #[test]
    fn w1_numeric_examples() {
        let f = |y: f64| y.clamp(0.0, 1.0);
        assert_eq!(w1_numeric(f, f, (0.0, 1.0), 1000).unwrap(), 0.0);
        let g = |y: f64| (y / 2.0).clamp(0.0, 1.0);
        assert!((w1_numeric(f, g, (0.0, 2.0), 100_000).unwrap() - 0.5).abs() < 1e-6);

        let n0 = NoiseDist::gaussian(0.0, 1.0).unwrap();
        let n1 = NoiseDist::gaussian(1.0, 1.0).unwrap();
        let v = w1_numeric(|y| n0.cdf(y), |y| n1.cdf(y), (-10.0, 11.0), 1_000_000).unwrap();
        assert!((v - 1.0).abs() < 1e-4);

        assert!(w1_numeric(f, g, (f64::NEG_INFINITY, 1.0), 1000).is_err());
        assert!(w1_numeric(f, g, (0.0, 1.0), 999).is_err());
    }

    #[test]
    fn gaussian_closed_form_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let (m1, m2) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            let (s1, s2) = (rng.gen_range(0.1..2.0), rng.gen_range(0.1..2.0));
            let p = NoiseDist::gaussian(m1, s1).unwrap();
            let q = NoiseDist::gaussian(m2, s2).unwrap();
            let lo = (m1 - 10.0 * s1).min(m2 - 10.0 * s2);
            let hi = (m1 + 10.0 * s1).max(m2 + 10.0 * s2);
            let numeric = w1_numeric(|y| p.cdf(y), |y| q.cdf(y), (lo, hi), 200_000).unwrap();
            assert!((w1_gaussian(m1, s1, m2, s2) - numeric).abs() < 1e-6);
        }
    }

    #[test]
    fn budget_examples() {
        let stat = ExplicitSeq::stationary(NoiseDist::uniform(0.0, 1.0).unwrap(), 50).unwrap();
        assert_eq!(variation_budget(&stat, 50).unwrap(), 0.0);

        let two = ExplicitSeq::new(vec![NoiseDist::uniform(0.0, 1.0).unwrap(), NoiseDist::uniform(1.0, 2.0).unwrap()])
            .unwrap();
        assert_eq!(variation_budget(&two, 2).unwrap(), 1.0);
        assert!(variation_budget(&two, 1).is_err());
        assert!(variation_budget(&two, 3).is_err());
    }

    #[test]
    fn brownian_budget_telescopes() {
        let seq = BrownianSeq::new(1e-3, 0.0, 500).unwrap();
        let expect = (2.0 / std::f64::consts::PI).sqrt() * (seq.sd_at(500) - seq.sd_at(1));
        assert!((variation_budget(&seq, 500).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn mixed_pairs_use_quadrature() {
        let u = NoiseDist::uniform(-1.0, 1.0).unwrap();
        let g = NoiseDist::gaussian(0.0, 0.5).unwrap();
        let v = w1_between(&u, &g).unwrap();
        let lo = -5.0;
        let direct = w1_numeric(|y| u.cdf(y), |y| g.cdf(y), (lo, -lo), 400_000).unwrap();
        assert!((v - direct).abs() < 1e-6);
        assert!(v > 0.0);
    }

    #[test]
    fn parking_budget_matches_endpoint_telescoping() {
        let horizon = 6000;
        let seq = ParkingSeq::new(horizon).unwrap();
        let mut expect = 0.0;
        for t in 2..=horizon {
            let (l0, r0) = seq.range(t - 1);
            let (l1, r1) = seq.range(t);
            let (r0, r1) = (r0.max(l0), r1.max(l1));
            let first_branch = 2 * t < horizon && r0 > l0 && r1 > l1;
            let second_branch = 2 * (t - 1) >= horizon;
            expect += if first_branch {
                (r1 - r0).abs() / 2.0
            } else if second_branch {
                (l1 - l0).abs() / 2.0
            } else {
                w1_uniform(l0, r0, l1, r1)
            };
        }
        let budget = variation_budget(&seq, horizon).unwrap();
        assert!((budget - expect).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let t = rng.gen_range(3..=horizon);
            let (p, q) = (seq.dist_at(t - 1).unwrap(), seq.dist_at(t).unwrap());
            let (lo, hi) = (truncated_support(&p).0.min(truncated_support(&q).0), truncated_support(&p).1.max(truncated_support(&q).1));
            let numeric = w1_numeric(|y| p.cdf(y), |y| q.cdf(y), (lo, hi), 100_000).unwrap();
            assert!((w1_between(&p, &q).unwrap() - numeric).abs() < 1e-6);
        }
    }

    #[test]
    fn parking_budget_is_sublinear() {
        let ratios: Vec<f64> = [1500, 3000, 6000]
            .iter()
            .map(|&h| variation_budget(&ParkingSeq::new(h).unwrap(), h).unwrap() / h as f64)
            .collect();
        assert!(ratios[0] > ratios[1] && ratios[1] > ratios[2], "{ratios:?}");
    }
}
