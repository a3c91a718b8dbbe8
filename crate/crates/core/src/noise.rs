//! Scalar noise distributions and time-indexed sequences of them.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// A one-dimensional noise law with sampling, CDF and quantile access.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseDist {
    PointMass(f64),
    Uniform { lo: f64, hi: f64 },
    Gaussian { mean: f64, sd: f64 },
}

impl NoiseDist {
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(Error::NonFinite);
        }
        if lo > hi {
            return Err(Error::Environment(format!("uniform bounds reversed: [{lo}, {hi}]")));
        }
        if lo == hi {
            return Ok(Self::PointMass(lo));
        }
        Ok(Self::Uniform { lo, hi })
    }

    pub fn gaussian(mean: f64, sd: f64) -> Result<Self> {
        if !(mean.is_finite() && sd.is_finite()) {
            return Err(Error::NonFinite);
        }
        if sd < 0.0 {
            return Err(Error::Environment(format!("negative standard deviation {sd}")));
        }
        if sd == 0.0 {
            return Ok(Self::PointMass(mean));
        }
        Ok(Self::Gaussian { mean, sd })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::PointMass(v) => v,
            Self::Uniform { lo, hi } => lo + (hi - lo) * rng.gen::<f64>(),
            Self::Gaussian { mean, sd } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + sd * z
            }
        }
    }

    pub fn cdf(&self, y: f64) -> f64 {
        match *self {
            Self::PointMass(v) => {
                if y >= v {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Uniform { lo, hi } => ((y - lo) / (hi - lo)).clamp(0.0, 1.0),
            Self::Gaussian { mean, sd } => std_normal().cdf((y - mean) / sd),
        }
    }

    /// Generalized inverse `inf { y : F(y) >= q }` for `q` in `[0, 1]`.
    pub fn quantile(&self, q: f64) -> f64 {
        let q = q.clamp(0.0, 1.0);
        match *self {
            Self::PointMass(v) => v,
            Self::Uniform { lo, hi } => lo + (hi - lo) * q,
            Self::Gaussian { mean, sd } => mean + sd * std_normal_quantile(q),
        }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::PointMass(v) => v,
            Self::Uniform { lo, hi } => 0.5 * (lo + hi),
            Self::Gaussian { mean, .. } => mean,
        }
    }

    /// Closed support, if bounded.
    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            Self::PointMass(v) => Some((v, v)),
            Self::Uniform { lo, hi } => Some((lo, hi)),
            Self::Gaussian { .. } => None,
        }
    }
}

/// Standard normal quantile, polished with Newton steps on the CDF.
fn std_normal_quantile(q: f64) -> f64 {
    let n = std_normal();
    let mut z = n.inverse_cdf(q);
    if !z.is_finite() {
        return z;
    }
    for _ in 0..2 {
        let density = n.pdf(z);
        if density <= 0.0 {
            break;
        }
        z -= (n.cdf(z) - q) / density;
    }
    z
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("standard normal parameters are valid")
}

/// A family `D_1, ..., D_T` of noise laws indexed by iteration (1-based).
pub trait NoiseSequence: Send + Sync {
    fn horizon(&self) -> usize;

    /// The law at iteration `t`, `1 <= t <= horizon`.
    fn dist_at(&self, t: usize) -> Result<NoiseDist>;

    fn check_step(&self, t: usize) -> Result<()> {
        if t == 0 || t > self.horizon() {
            return Err(Error::Environment(format!(
                "iteration {t} outside [1, {}]",
                self.horizon()
            )));
        }
        Ok(())
    }
}

impl<S: NoiseSequence + ?Sized> NoiseSequence for &S {
    fn horizon(&self) -> usize {
        (**self).horizon()
    }
    fn dist_at(&self, t: usize) -> Result<NoiseDist> {
        (**self).dist_at(t)
    }
}

impl<S: NoiseSequence + ?Sized> NoiseSequence for std::sync::Arc<S> {
    fn horizon(&self) -> usize {
        (**self).horizon()
    }
    fn dist_at(&self, t: usize) -> Result<NoiseDist> {
        (**self).dist_at(t)
    }
}
