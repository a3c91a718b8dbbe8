//! Sphere smoothing: direction sampling, perturbation and the one-point
//! CVaR gradient estimate `g = (d / delta) * CVaR * u`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cost::CostModel;
use crate::error::{Error, Result};
use crate::geometry::{norm, AdmissibleSet, DecisionVector};
use crate::noise::NoiseSequence;
use crate::oracle::{cvar_on_nodes, quantile_nodes};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingConfig {
    pub delta: f64,
    pub dim: usize,
}

impl SmoothingConfig {
    pub fn new(delta: f64, dim: usize) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::InvalidSmoothingRadius { delta, inradius: f64::NAN });
        }
        if dim == 0 {
            return Err(Error::Config("dimension must be >= 1".into()));
        }
        Ok(Self { delta, dim })
    }
}

/// Uniform direction on the unit sphere in `R^d`. For `d = 1` this is a
/// Rademacher sign.
pub fn sample_unit_sphere<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    if dim == 1 {
        return vec![if rng.gen::<bool>() { 1.0 } else { -1.0 }];
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = norm(&v);
        if n > 1e-100 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

/// `x + delta * u`.
pub fn perturb(x: &DecisionVector, delta: f64, u: &[f64]) -> Result<DecisionVector> {
    if u.len() != x.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: u.len() });
    }
    DecisionVector::new(x.iter().zip(u).map(|(a, b)| a + delta * b).collect())
}

/// `(d / delta) * cvar * u`.
pub fn gradient_estimate(cvar: f64, u: &[f64], dim: usize, delta: f64) -> Result<Vec<f64>> {
    if !(delta > 0.0) {
        return Err(Error::InvalidSmoothingRadius { delta, inradius: f64::NAN });
    }
    if u.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: u.len() });
    }
    let scale = dim as f64 / delta * cvar;
    Ok(u.iter().map(|c| scale * c).collect())
}

/// Monte-Carlo estimate of `E_u[C_t(x + delta u)]` with each `C_t` on an
/// `n_noise`-point quantile grid.
///
/// In one dimension the sphere is `{-1, +1}` and the expectation is computed
/// exactly, so `n_dirs` and `rng` are unused. Test oracle only.
#[allow(clippy::too_many_arguments)]
pub fn smoothed_cvar_mc<C, S, R>(
    cost: &C,
    noise: &S,
    t: usize,
    x: &DecisionVector,
    set: &AdmissibleSet,
    delta: f64,
    alpha: f64,
    n_dirs: usize,
    n_noise: usize,
    rng: &mut R,
) -> Result<f64>
where
    C: CostModel + ?Sized,
    S: NoiseSequence + ?Sized,
    R: Rng + ?Sized,
{
    let inner = set.shrunk(delta)?;
    if !inner.contains(x) {
        return Err(Error::Domain(format!("{:?} lies outside the shrunk set", x.as_slice())));
    }
    let nodes = quantile_nodes(&noise.dist_at(t)?, n_noise)?;
    let mut scratch = Vec::with_capacity(n_noise);
    let mut at = |u: &[f64]| -> Result<f64> {
        let p = perturb(x, delta, u)?;
        cvar_on_nodes(cost, &nodes, &p, alpha, &mut scratch)
    };
    if delta == 0.0 {
        return at(&vec![0.0; x.dim()]);
    }
    if x.dim() == 1 {
        return Ok(0.5 * (at(&[1.0])? + at(&[-1.0])?));
    }
    if n_dirs == 0 {
        return Err(Error::Config("need at least one direction".into()));
    }
    let mut total = 0.0;
    for _ in 0..n_dirs {
        let u = sample_unit_sphere(x.dim(), rng);
        total += at(&u)?;
    }
    Ok(total / n_dirs as f64)
}
