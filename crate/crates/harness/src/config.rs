//! Experiment configuration: a flat `key = value` file plus overrides.
//!
//! Every key has a default reproducing the parking-lot pricing study, so an
//! empty file (or no file) is a valid configuration. Lines starting with `#`
//! are comments. Unknown keys are rejected.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use riskaverse::oracle::{GridPlacement, OracleSettings, MIN_QUANTILE_GRID};
use riskaverse::{DecisionVector, LearnerConfig, LearningRateSchedule, SamplingStrategy};

use crate::error::{HarnessError, HarnessResult};

/// Default constant step size. The pricing study does not report one; this
/// value was picked by sweeping the parking scenario.
pub const DEFAULT_ETA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Drifting uniform parking occupancy.
    Parking,
    /// Gaussian noise with linearly growing variance.
    Brownian,
    /// Uniform noise translated by a constant step each iteration; a zero
    /// drift gives a static scenario.
    Custom,
}

impl FromStr for ScenarioKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> HarnessResult<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "parking" => Ok(Self::Parking),
            "brownian" => Ok(Self::Brownian),
            "custom" | "static" => Ok(Self::Custom),
            other => Err(HarnessError::Config(format!("unknown scenario '{other}'"))),
        }
    }
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Parking => "parking",
            Self::Brownian => "brownian",
            Self::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: ScenarioKind,
    pub horizon: usize,
    pub batch_len: usize,
    pub delta: f64,
    pub alpha: f64,
    /// Constant sample count, used unless `sampling_a` is set.
    pub samples: usize,
    /// Exponent of the polynomial strategy `ceil(b (batch - tau + 1)^a)`.
    pub sampling_a: Option<f64>,
    pub sampling_b: f64,
    pub eta: f64,
    /// When set, the step size is `1 / (m tau)` instead of `eta`.
    pub strong_m: Option<f64>,
    pub x0: f64,
    pub x_lo: f64,
    pub x_hi: f64,
    pub elasticity: f64,
    pub target: f64,
    pub reg: f64,
    pub diffusivity: f64,
    pub brownian_center: f64,
    pub custom_lo: f64,
    pub custom_hi: f64,
    pub custom_drift: f64,
    /// `a` and `c` of the sampling requirement check.
    pub req_a: f64,
    pub req_c: f64,
    pub trials: usize,
    pub base_seed: u64,
    pub oracle_k: usize,
    pub oracle_grid: usize,
    pub placement: GridPlacement,
    pub out: PathBuf,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
    pub counts: Vec<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioKind::Parking,
            horizon: 6000,
            batch_len: 200,
            delta: 0.05,
            alpha: 0.5,
            samples: 8,
            sampling_a: None,
            sampling_b: 1.0,
            eta: DEFAULT_ETA,
            strong_m: None,
            x0: 1.0,
            x_lo: 1.0,
            x_hi: 5.0,
            elasticity: -0.15,
            target: 0.7,
            reg: 0.001,
            diffusivity: 1e-6,
            brownian_center: 1.0,
            custom_lo: 0.85,
            custom_hi: 1.15,
            custom_drift: 0.0,
            req_a: 1.0,
            req_c: 1.0,
            trials: 10,
            base_seed: 0,
            oracle_k: 100,
            oracle_grid: 1000,
            placement: GridPlacement::Centers,
            out: PathBuf::from("rals_out"),
            jobs: 0,
            counts: vec![8, 16, 24],
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> HarnessResult<T> {
    value
        .trim()
        .parse()
        .map_err(|_| HarnessError::Config(format!("invalid value '{value}' for key '{key}'")))
}

fn parse_counts(key: &str, value: &str) -> HarnessResult<Vec<usize>> {
    value.split(',').map(|v| parse(key, v)).collect()
}

impl ExperimentConfig {
    /// Keys accepted by [`Self::set`].
    pub const KEYS: &'static [&'static str] = &[
        "scenario", "T", "batch", "delta", "alpha", "samples", "sampling_a", "sampling_b", "eta",
        "strong_m", "x0", "x_lo", "x_hi", "elasticity", "target", "reg", "diffusivity",
        "brownian_center", "custom_lo", "custom_hi", "custom_drift", "req_a", "req_c", "trials",
        "seed", "oracle_k", "oracle_grid", "oracle_placement", "out", "jobs", "counts",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> HarnessResult<()> {
        let v = value.trim();
        match key.trim() {
            "scenario" => self.scenario = v.parse()?,
            "T" | "horizon" => self.horizon = parse(key, v)?,
            "batch" => self.batch_len = parse(key, v)?,
            "delta" => self.delta = parse(key, v)?,
            "alpha" => self.alpha = parse(key, v)?,
            "samples" => self.samples = parse(key, v)?,
            "sampling_a" => self.sampling_a = Some(parse(key, v)?),
            "sampling_b" => self.sampling_b = parse(key, v)?,
            "eta" => self.eta = parse(key, v)?,
            "strong_m" => self.strong_m = Some(parse(key, v)?),
            "x0" => self.x0 = parse(key, v)?,
            "x_lo" => self.x_lo = parse(key, v)?,
            "x_hi" => self.x_hi = parse(key, v)?,
            "elasticity" => self.elasticity = parse(key, v)?,
            "target" => self.target = parse(key, v)?,
            "reg" => self.reg = parse(key, v)?,
            "diffusivity" => self.diffusivity = parse(key, v)?,
            "brownian_center" => self.brownian_center = parse(key, v)?,
            "custom_lo" => self.custom_lo = parse(key, v)?,
            "custom_hi" => self.custom_hi = parse(key, v)?,
            "custom_drift" => self.custom_drift = parse(key, v)?,
            "req_a" => self.req_a = parse(key, v)?,
            "req_c" => self.req_c = parse(key, v)?,
            "trials" => self.trials = parse(key, v)?,
            "seed" | "base_seed" => self.base_seed = parse(key, v)?,
            "oracle_k" => self.oracle_k = parse(key, v)?,
            "oracle_grid" => self.oracle_grid = parse(key, v)?,
            "oracle_placement" => {
                self.placement = match v {
                    "centers" => GridPlacement::Centers,
                    "endpoints" => GridPlacement::Endpoints,
                    _ => return Err(HarnessError::Config(format!("unknown grid placement '{v}'"))),
                }
            }
            "out" => self.out = PathBuf::from(v),
            "jobs" => self.jobs = parse(key, v)?,
            "counts" => self.counts = parse_counts(key, v)?,
            other => return Err(HarnessError::Config(format!("unknown configuration key '{other}'"))),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str) -> HarnessResult<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!("line {}: expected 'key = value', got '{raw}'", lineno + 1))
            })?;
            self.set(key, value)
                .map_err(|e| HarnessError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> HarnessResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text)?;
        Ok(cfg)
    }

    pub fn sampling(&self) -> SamplingStrategy {
        match self.sampling_a {
            Some(a) => SamplingStrategy::Polynomial { a, b: self.sampling_b },
            None => SamplingStrategy::Constant(self.samples),
        }
    }

    pub fn rate(&self) -> LearningRateSchedule {
        match self.strong_m {
            Some(m) => LearningRateSchedule::InverseStrong { m },
            None => LearningRateSchedule::Constant(self.eta),
        }
    }

    pub fn oracle(&self) -> OracleSettings {
        OracleSettings::new(self.alpha, self.oracle_k, self.oracle_grid).with_placement(self.placement)
    }

    /// Learner configuration for trial `index`, seeded with `base_seed + index`.
    pub fn learner(&self, index: usize) -> HarnessResult<LearnerConfig> {
        Ok(LearnerConfig {
            horizon: self.horizon,
            batch_len: self.batch_len,
            delta: self.delta,
            alpha: self.alpha,
            sampling: self.sampling(),
            rate: self.rate(),
            x0: DecisionVector::scalar(self.x0).map_err(|e| HarnessError::Config(e.to_string()))?,
            seed: self.trial_seed(index),
        })
    }

    pub fn trial_seed(&self, index: usize) -> u64 {
        self.base_seed.wrapping_add(index as u64)
    }

    /// Checks everything that can be checked without running anything.
    pub fn validate(&self) -> HarnessResult<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.horizon == 0 {
            return bad("T must be >= 1".into());
        }
        if !(self.x_lo < self.x_hi) {
            return bad(format!("admissible interval [{}, {}] is empty", self.x_lo, self.x_hi));
        }
        if self.oracle_k < 2 {
            return bad(format!("oracle_k = {} must be >= 2", self.oracle_k));
        }
        if self.oracle_grid < MIN_QUANTILE_GRID {
            return bad(format!("oracle_grid = {} must be >= {MIN_QUANTILE_GRID}", self.oracle_grid));
        }
        match self.scenario {
            ScenarioKind::Brownian if !(self.diffusivity > 0.0) => {
                return bad(format!("diffusivity {} must be positive", self.diffusivity))
            }
            ScenarioKind::Custom if !(self.custom_lo <= self.custom_hi) => {
                return bad(format!("custom noise range [{}, {}] is reversed", self.custom_lo, self.custom_hi))
            }
            _ => {}
        }
        let set = riskaverse::AdmissibleSet::interval(self.x_lo, self.x_hi)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        self.learner(0)?.validate(&set).map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_the_pricing_study() {
        let cfg = ExperimentConfig::default();
        assert_eq!((cfg.horizon, cfg.batch_len, cfg.samples, cfg.trials), (6000, 200, 8, 10));
        assert_eq!((cfg.delta, cfg.alpha, cfg.x0), (0.05, 0.5, 1.0));
        assert_eq!((cfg.x_lo, cfg.x_hi), (1.0, 5.0));
        assert_eq!((cfg.elasticity, cfg.target, cfg.reg), (-0.15, 0.7, 0.001));
        cfg.validate().unwrap();
    }

    #[test]
    fn text_overrides_and_comments() {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text("# comment\nT = 50\n\nscenario=brownian # trailing\ncounts = 4, 8\n").unwrap();
        assert_eq!(cfg.horizon, 50);
        assert_eq!(cfg.scenario, ScenarioKind::Brownian);
        assert_eq!(cfg.counts, vec![4, 8]);
    }

    #[test]
    fn bad_input_is_a_config_error() {
        let mut cfg = ExperimentConfig::default();
        for text in ["nonsense", "T = ten", "colour = red", "oracle_placement = left"] {
            let err = cfg.apply_text(text).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{text}");
        }
        let mut cfg = ExperimentConfig::default();
        cfg.delta = 3.0;
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 1);
        cfg = ExperimentConfig { trials: 0, ..Default::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn every_listed_key_is_settable() {
        let samples = [
            ("scenario", "custom"), ("oracle_placement", "endpoints"), ("out", "x"), ("counts", "1,2"),
        ];
        for key in ExperimentConfig::KEYS {
            let value = samples.iter().find(|(k, _)| k == key).map_or("1", |(_, v)| v);
            ExperimentConfig::default().set(key, value).unwrap();
        }
    }
}
