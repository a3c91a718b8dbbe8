//! Property suites run by `rals verify`.
//!
//! Each check draws its cases from a fixed seed, so a suite either always
//! passes or always fails on a given build. The risk checks take the CVaR
//! routine as a parameter, which lets tests confirm that a corrupted formula
//! is caught.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use riskaverse::environment::{w1_numeric, w1_uniform};
use riskaverse::learner::run;
use riskaverse::oracle::true_cvar;
use riskaverse::risk::{dkw_epsilon, sup_cdf_distance};
use riskaverse::smoothing::{gradient_estimate, perturb, sample_unit_sphere, smoothed_cvar_mc};
use riskaverse::{
    AdmissibleSet, CostModel, DecisionVector, EmpiricalCdf, ExplicitSeq, FnCost, LearnerConfig,
    LearningRateSchedule, NoiseDist, NoiseSequence, OccupancyCost, ParkingSeq, SamplingStrategy,
};

use crate::error::{HarnessError, HarnessResult};

/// Discrete CVaR of a sample set at level `alpha`.
pub type CvarFn = fn(&[f64], f64) -> riskaverse::Result<f64>;

/// The library's CVaR.
pub fn reference_cvar(values: &[f64], alpha: f64) -> riskaverse::Result<f64> {
    EmpiricalCdf::new(values)?.cvar(alpha)
}

/// `(1/alpha) * integral over [1 - alpha, 1] of the empirical quantile`,
/// integrating each sample over the probability cell it owns.
pub fn cvar_by_quantile_integral(values: &[f64], alpha: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let start = 1.0 - alpha;
    v.iter()
        .enumerate()
        .map(|(i, x)| {
            let (lo, hi) = (i as f64 / n, (i + 1) as f64 / n);
            x * (hi - lo.max(start)).max(0.0)
        })
        .sum::<f64>()
        / alpha
}

/// Minimum of the Rockafellar-Uryasev functional over `points` equally spaced
/// levels spanning the sample range. One sweep over sorted samples.
pub fn ru_grid_minimum(values: &[f64], alpha: f64, points: usize) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let (lo, hi) = (v[0], v[n - 1]);
    let mut suffix = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + v[i];
    }
    let mut above = 0;
    let mut best = f64::INFINITY;
    for g in 0..points {
        let level = if points == 1 || g == points - 1 {
            hi
        } else {
            lo + (hi - lo) * g as f64 / (points - 1) as f64
        };
        while above < n && v[above] <= level {
            above += 1;
        }
        let excess = suffix[above] - (n - above) as f64 * level;
        best = best.min(level + excess / (alpha * n as f64));
    }
    best
}

/// Sup distance between the empirical CDF of `sorted` and the U[0, 1] CDF.
pub fn uniform_ks_distance(sorted: &[f64]) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &u)| ((i + 1) as f64 / n - u).max(u - i as f64 / n))
        .fold(0.0, f64::max)
}

pub const ALPHA_LEVELS: [f64; 20] = [
    0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95, 1.0,
];

/// Outcome of one property over many cases.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
    /// First failing case, or a summary statistic when everything passed.
    pub detail: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "ok" } else { "FAIL" };
        write!(f, "[{status}] {}::{} ({} cases", self.suite, self.name, self.cases)?;
        if self.failures > 0 {
            write!(f, ", {} failed", self.failures)?;
        }
        write!(f, ") {}", self.detail)
    }
}

/// Accumulates case results for one check.
struct Tally {
    check: Check,
}

impl Tally {
    fn new(suite: &'static str, name: &'static str) -> Self {
        Self { check: Check { suite, name, cases: 0, failures: 0, detail: String::new() } }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.check.cases += 1;
        if !ok {
            if self.check.failures == 0 {
                self.check.detail = describe();
            }
            self.check.failures += 1;
        }
    }

    fn error(&mut self, e: impl fmt::Display) {
        self.record(false, || format!("error: {e}"));
    }

    fn finish(mut self, summary: impl FnOnce() -> String) -> Check {
        if self.check.failures == 0 {
            self.check.detail = summary();
        }
        self.check
    }
}

fn random_samples(rng: &mut ChaCha8Rng, max_n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let n = rng.gen_range(1..=max_n);
    // Occasional ties exercise the duplicate handling.
    let pool: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
    (0..n)
        .map(|i| if rng.gen_bool(0.2) { pool[rng.gen_range(0..=i)] } else { pool[i] })
        .collect()
}

// ---------------------------------------------------------------- risk

/// `cvar` against the quantile-integral closed form (`1e-12`) and against the
/// RU minimum on a `grid`-point level grid (within grid resolution).
pub fn check_cvar_closed_form(cvar: CvarFn, sets: usize, grid: usize, seed: u64) -> Check {
    let mut tally = Tally::new("risk", "cvar_closed_form_and_ru_grid");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..sets {
        let values = random_samples(&mut rng, 50, -5.0, 5.0);
        let alpha = ALPHA_LEVELS[rng.gen_range(0..ALPHA_LEVELS.len())];
        let got = match cvar(&values, alpha) {
            Ok(v) => v,
            Err(e) => {
                tally.error(e);
                continue;
            }
        };
        let exact = cvar_by_quantile_integral(&values, alpha);
        let ru = ru_grid_minimum(&values, alpha, grid);
        let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let resolution = (hi - lo) / (grid - 1) as f64 / alpha;
        worst = worst.max((got - exact).abs());
        tally.record((got - exact).abs() <= 1e-12 && got <= ru + 1e-12 && ru - got <= resolution + 1e-12, || {
            format!("alpha={alpha} values={values:?}: got {got}, closed form {exact}, ru grid {ru}")
        });
    }
    tally.finish(|| format!("max |cvar - closed form| = {worst:.3e}"))
}

/// Random pairs plus pairs at which the bound is attained: all zeros against
/// `alpha n` values moved to `U`.
pub fn check_lemma4(cvar: CvarFn, pairs: usize, seed: u64) -> Check {
    let mut tally = Tally::new("risk", "cvar_kolmogorov_bound");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tightest = 0.0f64;
    for i in 0..pairs {
        let bound_u = rng.gen_range(0.5..10.0);
        let alpha = ALPHA_LEVELS[rng.gen_range(0..ALPHA_LEVELS.len())];
        let (f, g) = if i % 10 == 0 {
            let n = 20;
            let moved = (alpha * n as f64).round() as usize;
            let g: Vec<f64> = (0..n).map(|j| if j < moved { bound_u } else { 0.0 }).collect();
            (vec![0.0; n], g)
        } else {
            (random_samples(&mut rng, 50, 0.0, bound_u), random_samples(&mut rng, 50, 0.0, bound_u))
        };
        let (cf, cg) = match (cvar(&f, alpha), cvar(&g, alpha)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                tally.error(e);
                continue;
            }
        };
        let ks = sup_cdf_distance(&EmpiricalCdf::new(&f).unwrap(), &EmpiricalCdf::new(&g).unwrap());
        let rhs = bound_u / alpha * ks;
        if rhs > 0.0 {
            tightest = tightest.max((cf - cg).abs() / rhs);
        }
        tally.record((cf - cg).abs() <= rhs + 1e-12, || {
            format!("alpha={alpha} U={bound_u}: |{cf} - {cg}| > {rhs} (F={f:?}, G={g:?})")
        });
    }
    tally.finish(|| format!("largest ratio to bound {tightest:.6}"))
}

/// Nonincreasing in `alpha`, translation equivariant, positively homogeneous.
pub fn check_cvar_structure(cvar: CvarFn, sets: usize, seed: u64) -> Check {
    let mut tally = Tally::new("risk", "cvar_monotone_translation_scaling");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..sets {
        let values = random_samples(&mut rng, 50, -3.0, 3.0);
        let shift = rng.gen_range(-10.0..10.0);
        let scale = rng.gen_range(0.1..10.0);
        let shifted: Vec<f64> = values.iter().map(|v| v + shift).collect();
        let scaled: Vec<f64> = values.iter().map(|v| v * scale).collect();
        let mut prev = f64::INFINITY;
        let mut ok = true;
        for &alpha in &ALPHA_LEVELS {
            let (Ok(c), Ok(cs), Ok(cl)) = (cvar(&values, alpha), cvar(&shifted, alpha), cvar(&scaled, alpha)) else {
                ok = false;
                break;
            };
            let tol = 1e-12 * (1.0 + c.abs() + shift.abs() + scale);
            ok &= c <= prev + 1e-12 && (cs - c - shift).abs() <= tol && (cl - scale * c).abs() <= tol * 10.0;
            prev = c;
        }
        tally.record(ok, || format!("values={values:?} shift={shift} scale={scale}"));
    }
    tally.finish(|| "all sets consistent".into())
}

/// Frequency of `sup |F_n - F| > dkw_epsilon(n, gamma)` for `n` uniform draws,
/// which must not exceed `gamma`.
pub fn check_dkw(repetitions: usize, n: usize, gamma: f64, seed: u64) -> Check {
    let mut tally = Tally::new("risk", "dkw_coverage");
    let eps = match dkw_epsilon(n, gamma) {
        Ok(e) => e,
        Err(e) => {
            tally.error(e);
            return tally.finish(String::new);
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0usize;
    for _ in 0..repetitions {
        let mut draws: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
        draws.sort_by(f64::total_cmp);
        if uniform_ks_distance(&draws) >= eps {
            violations += 1;
        }
    }
    let freq = violations as f64 / repetitions as f64;
    tally.record(freq <= gamma, || format!("violation frequency {freq} exceeds {gamma} (radius {eps:.6})"));
    tally.finish(|| format!("violation frequency {freq:.4} <= {gamma} (radius {eps:.6})"))
}

// ----------------------------------------------------------- smoothing

/// Two-direction average of the estimator for `J(x) = x^2` equals `2x`
/// exactly at dyadic points.
pub fn check_two_direction_exactness() -> Check {
    let mut tally = Tally::new("smoothing", "two_direction_average_is_exact");
    for i in -16..=16 {
        let x = i as f64 * 0.375;
        for delta in [0.5, 0.25, 0.125, 0.0625] {
            let xv = DecisionVector::scalar(x).unwrap();
            let mut sum = 0.0;
            for u in [1.0, -1.0] {
                let p = perturb(&xv, delta, &[u]).unwrap();
                sum += gradient_estimate(p[0] * p[0], &[u], 1, delta).unwrap()[0];
            }
            let avg = sum / 2.0;
            tally.record(avg == 2.0 * x, || format!("x={x} delta={delta}: average {avg}"));
        }
    }
    tally.finish(|| "bit-exact".into())
}

fn parking_problem(horizon: usize) -> (OccupancyCost, ParkingSeq, AdmissibleSet) {
    let set = AdmissibleSet::interval(1.0, 5.0).expect("valid interval");
    let seq = ParkingSeq::new(horizon).expect("positive horizon");
    let (lo, hi) = seq.support_hull();
    (OccupancyCost::parking(&set, lo, hi), seq, set)
}

/// Mean of `draws` estimator values at `x`, each from a fresh direction and a
/// fresh batch of `batch` noise draws, against a central finite difference of
/// the smoothed CVaR. Passes within `3` standard errors.
pub fn check_gradient_consistency(t: usize, x: f64, draws: usize, batch: usize, seed: u64) -> Check {
    let mut tally = Tally::new("smoothing", "estimator_matches_smoothed_gradient");
    let (cost, seq, set) = parking_problem(6000);
    let (delta, alpha) = (0.05, 0.5);
    let xv = DecisionVector::scalar(x).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = match seq.dist_at(t) {
        Ok(d) => d,
        Err(e) => {
            tally.error(e);
            return tally.finish(String::new);
        }
    };
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut costs = vec![0.0; batch];
    for _ in 0..draws {
        let u = sample_unit_sphere(1, &mut rng);
        let p = perturb(&xv, delta, &u).unwrap();
        for c in costs.iter_mut() {
            *c = cost.eval(&p, dist.sample(&mut rng));
        }
        let g = gradient_estimate(reference_cvar(&costs, alpha).unwrap(), &u, 1, delta).unwrap()[0];
        sum += g;
        sum_sq += g * g;
    }
    let n = draws as f64;
    let mean = sum / n;
    let se = ((sum_sq / n - mean * mean) * n / (n - 1.0)).sqrt() / n.sqrt();
    let h = 1e-3;
    let mut smoothed = |y: f64| {
        smoothed_cvar_mc(&cost, &seq, t, &DecisionVector::scalar(y).unwrap(), &set, delta, alpha, 0, 100_000, &mut rng)
    };
    match (smoothed(x + h), smoothed(x - h)) {
        (Ok(up), Ok(down)) => {
            let fd = (up - down) / (2.0 * h);
            let z = (mean - fd) / se;
            tally.record(z.abs() <= 3.0, || format!("mean {mean:.6e} vs finite difference {fd:.6e}: {z:.2} SE"));
            tally.finish(|| format!("mean {mean:.6e}, finite difference {fd:.6e}, {z:+.2} SE"))
        }
        (Err(e), _) | (_, Err(e)) => {
            tally.error(e);
            tally.finish(String::new)
        }
    }
}

/// Per-record identities and bounds on a parking run: `x_hat - x = delta u`,
/// `g = (d / delta) cvar u`, `|g| <= d U / delta`, `x_hat` admissible.
pub fn check_learner_records(horizon: usize, seed: u64) -> Check {
    let mut tally = Tally::new("smoothing", "record_identities_and_feasibility");
    let (cost, seq, set) = parking_problem(horizon);
    let config = LearnerConfig {
        horizon,
        batch_len: 200.min(horizon.max(2)),
        delta: 0.05,
        alpha: 0.5,
        sampling: SamplingStrategy::Constant(8),
        rate: LearningRateSchedule::Constant(crate::config::DEFAULT_ETA),
        x0: DecisionVector::scalar(1.0).unwrap(),
        seed,
    };
    let traj = match run(&config, &cost, &seq, &set) {
        Ok(t) => t,
        Err(e) => {
            tally.error(e);
            return tally.finish(String::new);
        }
    };
    let bound = cost.bound() / config.delta;
    for r in &traj.records {
        let ok = r.x[0] + config.delta * r.u[0] == r.x_hat[0];
        let g_ok = r.gradient[0] == gradient_estimate(r.cvar_estimate, &r.u, 1, config.delta).unwrap()[0];
        tally.record(ok && g_ok && r.gradient[0].abs() <= bound && set.contains(&r.x_hat), || {
            format!("t={} x={} x_hat={} g={}", r.t, r.x[0], r.x_hat[0], r.gradient[0])
        });
    }
    tally.finish(|| format!("{} steps", traj.len()))
}

// --------------------------------------------------------- environment

/// Random interval; about one in ten is a single point.
fn random_interval(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let a = rng.gen_range(-3.0..3.0);
    let width = if rng.gen_bool(0.1) { 0.0 } else { rng.gen_range(0.0..3.0) };
    (a, a + width)
}

/// Random interval of positive width. Trapezoidal quadrature of a CDF with a
/// jump is only first-order accurate, so atoms are kept out of the
/// cross-validation.
fn random_proper_interval(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let a = rng.gen_range(-3.0..3.0);
    (a, a + rng.gen_range(0.01..3.0))
}

/// Closed-form uniform W1 against trapezoidal quadrature of `|F - G|`.
pub fn check_w1_cross_validation(pairs: usize, seed: u64) -> Check {
    let mut tally = Tally::new("environment", "w1_closed_form_vs_quadrature");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..pairs {
        let (a1, b1) = random_proper_interval(&mut rng);
        let (a2, b2) = random_proper_interval(&mut rng);
        let (p, q) = (NoiseDist::uniform(a1, b1).unwrap(), NoiseDist::uniform(a2, b2).unwrap());
        let closed = w1_uniform(a1, b1, a2, b2);
        let support = (a1.min(a2), b1.max(b2));
        match w1_numeric(|y| p.cdf(y), |y| q.cdf(y), support, 100_000) {
            Ok(numeric) => {
                let err = (closed - numeric).abs();
                worst = worst.max(err);
                tally.record(err <= 1e-6, || format!("[{a1},{b1}] vs [{a2},{b2}]: {closed} vs {numeric}"));
            }
            Err(e) => tally.error(e),
        }
    }
    tally.finish(|| format!("max discrepancy {worst:.3e}"))
}

/// Nonnegativity, symmetry, identity and the triangle inequality.
pub fn check_w1_metric_axioms(triples: usize, seed: u64) -> Check {
    let mut tally = Tally::new("environment", "w1_metric_axioms");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..triples {
        let [p, q, r] = [random_interval(&mut rng), random_interval(&mut rng), random_interval(&mut rng)];
        let w = |x: (f64, f64), y: (f64, f64)| w1_uniform(x.0, x.1, y.0, y.1);
        let (pq, qp, qr, pr) = (w(p, q), w(q, p), w(q, r), w(p, r));
        let ok = pq >= 0.0 && pq == qp && w(p, p) <= 1e-12 && pr <= pq + qr + 1e-10;
        tally.record(ok, || format!("{p:?} {q:?} {r:?}: pq={pq} qp={qp} qr={qr} pr={pr}"));
    }
    tally.finish(|| "all triples consistent".into())
}

/// `|CVaR[L0 X] - CVaR[L0 Y]| <= (L0 / alpha) W1(X, Y)` on uniform pairs, with
/// CVaR on `grid_n`-point quantile grids.
pub fn check_lemma5(pairs: usize, grid_n: usize, seed: u64) -> Check {
    let mut tally = Tally::new("environment", "cvar_wasserstein_bound");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tightest = 0.0f64;
    for _ in 0..pairs {
        let l0 = rng.gen_range(0.1..5.0);
        let alpha = ALPHA_LEVELS[rng.gen_range(0..ALPHA_LEVELS.len())];
        let (a1, b1) = random_interval(&mut rng);
        let (a2, b2) = random_interval(&mut rng);
        let laws = vec![NoiseDist::uniform(a1, b1).unwrap(), NoiseDist::uniform(a2, b2).unwrap()];
        let seq = ExplicitSeq::new(laws).unwrap();
        let cost = FnCost::new(move |_: &[f64], xi: f64| l0 * xi, l0 * 6.0, l0);
        let c = |t| true_cvar(&cost, &seq, t, &[0.0], alpha, grid_n);
        match (c(1), c(2)) {
            (Ok(c1), Ok(c2)) => {
                let rhs = l0 / alpha * w1_uniform(a1, b1, a2, b2);
                if rhs > 0.0 {
                    tightest = tightest.max((c1 - c2).abs() / rhs);
                }
                tally.record((c1 - c2).abs() <= rhs + 1e-6, || {
                    format!("L0={l0} alpha={alpha} [{a1},{b1}] vs [{a2},{b2}]: |{c1} - {c2}| > {rhs}")
                });
            }
            (Err(e), _) | (_, Err(e)) => tally.error(e),
        }
    }
    tally.finish(|| format!("largest ratio to bound {tightest:.6}"))
}

// --------------------------------------------------------------- suites

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Risk,
    Smoothing,
    Environment,
    All,
}

impl FromStr for Suite {
    type Err = HarnessError;

    fn from_str(s: &str) -> HarnessResult<Self> {
        match s {
            "risk" => Ok(Self::Risk),
            "smoothing" => Ok(Self::Smoothing),
            "environment" => Ok(Self::Environment),
            "all" => Ok(Self::All),
            other => Err(HarnessError::Config(format!("unknown suite '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn summary(&self) -> String {
        let cases: usize = self.checks.iter().map(|c| c.cases).sum();
        let failed = self.failed().count();
        format!("{} properties checked over {cases} cases, {failed} failed", self.checks.len())
    }
}

const SEED: u64 = 0x5eed;

pub fn risk_suite(cvar: CvarFn) -> Vec<Check> {
    vec![
        check_cvar_closed_form(cvar, 500, 100_000, SEED),
        check_lemma4(cvar, 1000, SEED + 1),
        check_cvar_structure(cvar, 500, SEED + 2),
        check_dkw(2000, 100, 0.05, SEED + 3),
    ]
}

pub fn smoothing_suite() -> Vec<Check> {
    vec![
        check_two_direction_exactness(),
        check_gradient_consistency(3000, 2.0, 20_000, 64, SEED + 4),
        check_learner_records(6000, SEED + 5),
    ]
}

pub fn environment_suite() -> Vec<Check> {
    vec![
        check_w1_cross_validation(500, SEED + 6),
        check_w1_metric_axioms(500, SEED + 7),
        check_lemma5(200, 100_000, SEED + 8),
    ]
}

/// Runs `suite` with `cvar` standing in for the library CVaR in the risk checks.
pub fn verify_with(suite: Suite, cvar: CvarFn) -> VerifyReport {
    let checks = match suite {
        Suite::Risk => risk_suite(cvar),
        Suite::Smoothing => smoothing_suite(),
        Suite::Environment => environment_suite(),
        Suite::All => {
            let mut all = risk_suite(cvar);
            all.extend(smoothing_suite());
            all.extend(environment_suite());
            all
        }
    };
    VerifyReport { checks }
}

pub fn verify(suite: Suite) -> VerifyReport {
    verify_with(suite, reference_cvar)
}
