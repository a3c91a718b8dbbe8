//! Empirical distribution functions, discrete CVaR and DKW utilities.
//!
//! CVaR at level `alpha` is the mean of the worst (largest) `alpha`-fraction
//! of outcomes, i.e. the minimum over `v` of the Rockafellar–Uryasev functional
//! `v + E[(J - v)+] / alpha`. For an empirical law with samples sorted
//! descending `J(1) >= ... >= J(n)` and `k = ceil(alpha n)` this is
//!
//! ```text
//! (1 / (alpha n)) * ( sum_{i<k} J(i) + (alpha n - k + 1) J(k) )
//! ```
//!
//! which gives the `k`-th sample a fractional weight rather than averaging the
//! top `k` samples.

use crate::error::{Error, Result};

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidRiskLevel(alpha))
    }
}

/// Sorted sample multiset representing `F(y) = #{J_i <= y} / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    samples: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        Self::from_vec(values.to_vec())
    }

    pub fn from_vec(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Ascending samples.
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn min(&self) -> f64 {
        self.samples[0]
    }

    pub fn max(&self) -> f64 {
        self.samples[self.samples.len() - 1]
    }

    /// Fraction of samples `<= y`.
    pub fn eval(&self, y: f64) -> f64 {
        let count = self.samples.partition_point(|&s| s <= y);
        count as f64 / self.samples.len() as f64
    }

    /// Tail mean of the worst `alpha`-fraction.
    pub fn cvar(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        let n = self.samples.len();
        let (k, weight) = tail_split(alpha, n);
        let top: f64 = self.samples[n - k + 1..].iter().sum();
        Ok((top + weight * self.samples[n - k]) / (alpha * n as f64))
    }

    /// Upper-tail threshold `J(k)`, the `k = ceil(alpha n)`-th largest sample.
    /// It minimizes [`Self::ru_functional`].
    pub fn value_at_risk(&self, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        let n = self.samples.len();
        let (k, _) = tail_split(alpha, n);
        Ok(self.samples[n - k])
    }

    /// Generalized inverse `inf { y : F(y) >= q }`.
    pub fn quantile(&self, q: f64) -> f64 {
        let n = self.samples.len();
        let idx = (q * n as f64).ceil() as usize;
        self.samples[idx.clamp(1, n) - 1]
    }

    /// `v + (1 / (alpha n)) * sum (J_i - v)+`.
    pub fn ru_functional(&self, alpha: f64, v: f64) -> Result<f64> {
        check_alpha(alpha)?;
        let excess: f64 = self.samples.iter().map(|&j| (j - v).max(0.0)).sum();
        Ok(v + excess / (alpha * self.samples.len() as f64))
    }
}

/// `k = ceil(alpha n)` clamped to `[1, n]` and the fractional weight
/// `alpha n - k + 1` of the `k`-th largest sample.
fn tail_split(alpha: f64, n: usize) -> (usize, f64) {
    let an = alpha * n as f64;
    let k = (an.ceil() as usize).clamp(1, n);
    (k, an - k as f64 + 1.0)
}

/// Discrete CVaR of unsorted values, in linear time. Reorders `values`.
pub fn cvar_of_values(values: &mut [f64], alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = values.len();
    let (k, weight) = tail_split(alpha, n);
    let (_, pivot, upper) = values.select_nth_unstable_by(n - k, f64::total_cmp);
    let pivot = *pivot;
    let top: f64 = upper.iter().sum();
    Ok((top + weight * pivot) / (alpha * n as f64))
}

/// Exact Kolmogorov distance `sup_y |F(y) - G(y)|` between two step CDFs.
///
/// Both functions are constant between consecutive points of the merged jump
/// set, so evaluating right-limits at each jump covers every value taken.
pub fn sup_cdf_distance(f: &EmpiricalCdf, g: &EmpiricalCdf) -> f64 {
    let (a, b) = (f.samples(), g.samples());
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut best: f64 = 0.0;
    while i < a.len() || j < b.len() {
        let y = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&z)) => x.min(z),
            (Some(&x), None) => x,
            (None, Some(&z)) => z,
            (None, None) => unreachable!(),
        };
        while i < a.len() && a[i] <= y {
            i += 1;
        }
        while j < b.len() && b[j] <= y {
            j += 1;
        }
        best = best.max((i as f64 / na - j as f64 / nb).abs());
    }
    best
}

/// DKW radius `sqrt(ln(2 / gamma) / (2 n))`: with probability at least
/// `1 - gamma` the empirical CDF of `n` i.i.d. draws stays within it of the
/// true CDF.
pub fn dkw_epsilon(n: usize, gamma: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if !(gamma > 0.0 && gamma <= 2.0) {
        return Err(Error::InvalidConfidence(gamma));
    }
    Ok(((2.0 / gamma).ln() / (2.0 * n as f64)).sqrt())
}

/// `(U / alpha) * kolmogorov`, the CVaR gap allowed by a CDF gap for costs
/// bounded by `U`.
pub fn cvar_error_bound(bound: f64, alpha: f64, kolmogorov: f64) -> f64 {
    bound / alpha * kolmogorov
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ecdf(v: &[f64]) -> EmpiricalCdf {
        EmpiricalCdf::new(v).unwrap()
    }

    #[test]
    fn build_sorts_and_keeps_duplicates() {
        assert_eq!(ecdf(&[3.0, 1.0, 2.0]).samples(), &[1.0, 2.0, 3.0]);
        assert_eq!(ecdf(&[5.0]).len(), 1);
        assert_eq!(ecdf(&[2.0, 2.0, 2.0]).samples(), &[2.0, 2.0, 2.0]);
        assert_eq!(EmpiricalCdf::new(&[]), Err(Error::EmptySample));
        assert_eq!(EmpiricalCdf::new(&[1.0, f64::INFINITY]), Err(Error::NonFinite));
    }

    #[test]
    fn eval_is_right_continuous_step() {
        let f = ecdf(&[1.0, 2.0, 3.0]);
        assert_eq!(f.eval(2.0), 2.0 / 3.0);
        assert_eq!(f.eval(0.5), 0.0);
        assert_eq!(f.eval(3.0), 1.0);
        assert_eq!(f.eval(1.999), 1.0 / 3.0);
    }

    #[test]
    fn cvar_examples() {
        let f = ecdf(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(f.cvar(0.5).unwrap(), 3.5);
        assert_eq!(f.cvar(1.0).unwrap(), 2.5);
        assert!((f.cvar(0.3).unwrap() - (4.0 + 0.2 * 3.0) / 1.2).abs() < 1e-12);
        for alpha in [0.01, 0.5, 1.0] {
            assert!((ecdf(&[7.0]).cvar(alpha).unwrap() - 7.0).abs() < 1e-12);
        }
        assert_eq!(f.cvar(0.0), Err(Error::InvalidRiskLevel(0.0)));
        assert_eq!(f.cvar(1.5), Err(Error::InvalidRiskLevel(1.5)));
    }

    #[test]
    fn ru_functional_examples() {
        let f = ecdf(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(f.ru_functional(1.0, 0.0).unwrap(), 2.5);
        for alpha in [0.1, 0.5, 1.0] {
            assert_eq!(f.ru_functional(alpha, 4.0).unwrap(), 4.0);
        }
        assert_eq!(f.ru_functional(0.5, 3.0).unwrap(), 3.5);
    }

    #[test]
    fn sup_distance_examples() {
        let a = ecdf(&[0.0, 1.0]);
        assert_eq!(sup_cdf_distance(&a, &a), 0.0);
        assert_eq!(sup_cdf_distance(&ecdf(&[0.0]), &ecdf(&[1.0])), 1.0);
        assert_eq!(sup_cdf_distance(&a, &ecdf(&[0.0, 2.0])), 0.5);
    }

    #[test]
    fn dkw_examples() {
        assert_eq!(dkw_epsilon(17, 2.0).unwrap(), 0.0);
        assert!((dkw_epsilon(50, 0.05).unwrap() - 0.192_064_558_263_984).abs() < 1e-12);
        let ratio = dkw_epsilon(200, 0.1).unwrap() / dkw_epsilon(100, 0.1).unwrap();
        assert!((ratio - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(dkw_epsilon(10, 0.0), Err(Error::InvalidConfidence(0.0)));
        assert_eq!(dkw_epsilon(10, 2.5), Err(Error::InvalidConfidence(2.5)));
    }

    #[test]
    fn cvar_error_bound_examples() {
        assert_eq!(cvar_error_bound(3.0, 0.2, 0.0), 0.0);
        assert!((cvar_error_bound(2.0, 0.5, 0.1) - 0.4).abs() < 1e-15);
        assert!((cvar_error_bound(1.0, 1.0, 0.3) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn value_at_risk_minimizes_ru() {
        let f = ecdf(&[1.0, 2.0, 3.0, 4.0, 10.0]);
        for alpha in [0.1, 0.2, 0.33, 0.5, 0.9, 1.0] {
            let v = f.value_at_risk(alpha).unwrap();
            assert!((f.ru_functional(alpha, v).unwrap() - f.cvar(alpha).unwrap()).abs() < 1e-12);
            let q = f.quantile(1.0 - alpha);
            assert!((f.ru_functional(alpha, q).unwrap() - f.cvar(alpha).unwrap()).abs() < 1e-12);
        }
    }

    fn samples() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-100.0..100.0f64, 1..40)
    }

    proptest! {
        #[test]
        fn cvar_decreases_in_alpha(v in samples(), a in 0.01..1.0f64, b in 0.01..1.0f64) {
            let f = ecdf(&v);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(f.cvar(lo).unwrap() >= f.cvar(hi).unwrap() - 1e-12);
        }

        #[test]
        fn cvar_translation_and_homogeneity(v in samples(), alpha in 0.01..=1.0f64,
                                            c in -50.0..50.0f64, lambda in 0.1..10.0f64) {
            let base = ecdf(&v).cvar(alpha).unwrap();
            let shifted: Vec<f64> = v.iter().map(|x| x + c).collect();
            let scaled: Vec<f64> = v.iter().map(|x| x * lambda).collect();
            let tol = 1e-12 * (1.0 + base.abs() + c.abs()) * 100.0;
            prop_assert!((ecdf(&shifted).cvar(alpha).unwrap() - (base + c)).abs() <= tol);
            prop_assert!((ecdf(&scaled).cvar(alpha).unwrap() - lambda * base).abs() <= tol * lambda);
        }

        #[test]
        fn selection_cvar_matches_sorted(v in samples(), alpha in 0.01..=1.0f64) {
            let sorted = ecdf(&v).cvar(alpha).unwrap();
            let mut work = v.clone();
            let selected = cvar_of_values(&mut work, alpha).unwrap();
            prop_assert!((sorted - selected).abs() <= 1e-12 * (1.0 + sorted.abs()) * 10.0);
        }

        #[test]
        fn sup_distance_is_symmetric_and_bounded(a in samples(), b in samples()) {
            let (f, g) = (ecdf(&a), ecdf(&b));
            let d = sup_cdf_distance(&f, &g);
            prop_assert!((0.0..=1.0).contains(&d));
            prop_assert_eq!(d, sup_cdf_distance(&g, &f));
        }
    }
}
