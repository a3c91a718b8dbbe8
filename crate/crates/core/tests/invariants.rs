//! Property tests across modules: projections, indexing, transport distances
//! and feasibility of every point the learner plays.

use proptest::prelude::*;
use riskaverse::environment::{w1_between, w1_uniform};
use riskaverse::learner::run;
use riskaverse::schedule::batch_epoch;
use riskaverse::{
    AdmissibleSet, DecisionVector, EmpiricalCdf, FnCost, LearnerConfig, LearningRateSchedule, NoiseDist, OccupancyCost,
    ParkingSeq, SamplingStrategy,
};

fn point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-20.0..20.0f64, dim)
}

proptest! {
    #[test]
    fn box_projection_is_feasible_and_idempotent(x in point(3)) {
        let set = AdmissibleSet::boxed(vec![-1.0, 0.0, 2.0], vec![1.0, 0.5, 7.0]).unwrap();
        let p = set.project(&DecisionVector::new(x).unwrap()).unwrap();
        prop_assert!(set.contains(&p));
        prop_assert_eq!(set.project(&p).unwrap(), p);
    }

    #[test]
    fn ball_projection_is_feasible_and_idempotent(x in point(4), r in 0.1..5.0f64) {
        let set = AdmissibleSet::ball(vec![1.0, -2.0, 0.5, 3.0], r).unwrap();
        let p = set.project(&DecisionVector::new(x).unwrap()).unwrap();
        prop_assert!(set.contains(&p));
        prop_assert_eq!(set.project(&p).unwrap(), p);
    }

    #[test]
    fn shrunk_set_absorbs_any_unit_step(x in point(2), angle in 0.0..std::f64::consts::TAU, delta in 0.01..0.9f64) {
        let set = AdmissibleSet::boxed(vec![0.0, 0.0], vec![2.0, 3.0]).unwrap();
        let inner = set.shrunk(delta).unwrap();
        let p = inner.project(&DecisionVector::new(x).unwrap()).unwrap();
        let moved = [p[0] + delta * angle.cos(), p[1] + delta * angle.sin()];
        prop_assert!(set.contains_within(&moved, 1e-12));
    }

    #[test]
    fn batch_epoch_roundtrips(t in 1usize..100_000, len in 2usize..500) {
        let idx = batch_epoch(t, len).unwrap();
        prop_assert!((1..=len).contains(&idx.epoch));
        prop_assert_eq!(idx.iteration(len), t);
    }

    #[test]
    fn cvar_lies_between_mean_and_max(v in prop::collection::vec(-100.0..100.0f64, 1..200), alpha in 0.01..=1.0f64) {
        let f = EmpiricalCdf::new(&v).unwrap();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let c = f.cvar(alpha).unwrap();
        prop_assert!(c >= mean - 1e-9 && c <= f.max() + 1e-9);
    }

    #[test]
    fn uniform_w1_is_a_metric(a in -5.0..5.0f64, wa in 0.0..3.0f64, b in -5.0..5.0f64, wb in 0.0..3.0f64,
                              c in -5.0..5.0f64, wc in 0.0..3.0f64) {
        let (p, q, r) = ((a, a + wa), (b, b + wb), (c, c + wc));
        let d = |x: (f64, f64), y: (f64, f64)| w1_uniform(x.0, x.1, y.0, y.1);
        prop_assert!(d(p, p).abs() < 1e-15);
        prop_assert!((d(p, q) - d(q, p)).abs() < 1e-12);
        prop_assert!(d(p, r) <= d(p, q) + d(q, r) + 1e-12);
    }

    #[test]
    fn w1_between_shifts_is_the_shift(m in -3.0..3.0f64, s in 0.0..2.0f64) {
        let p = NoiseDist::uniform(0.0, 1.0).unwrap();
        let q = NoiseDist::uniform(s, 1.0 + s).unwrap();
        prop_assert!((w1_between(&p, &q).unwrap() - s).abs() < 1e-9);
        let g1 = NoiseDist::gaussian(m, 0.5).unwrap();
        let g2 = NoiseDist::gaussian(m + s, 0.5).unwrap();
        prop_assert!((w1_between(&g1, &g2).unwrap() - s).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn played_prices_stay_admissible(seed in any::<u64>(), x0 in -10.0..10.0f64, eta in 0.001..1.0f64,
                                     delta in 0.01..1.5f64, n in 1usize..12) {
        let set = AdmissibleSet::interval(1.0, 5.0).unwrap();
        let noise = ParkingSeq::new(600).unwrap();
        let (lo, hi) = noise.support_hull();
        let cost = OccupancyCost::new(-0.15, 0.7, 0.001, &set, lo, hi);
        let cfg = LearnerConfig {
            horizon: 600,
            batch_len: 40,
            delta,
            alpha: 0.5,
            sampling: SamplingStrategy::Constant(n),
            rate: LearningRateSchedule::Constant(eta),
            x0: DecisionVector::scalar(x0).unwrap(),
            seed,
        };
        let traj = run(&cfg, &cost, &noise, &set).unwrap();
        for r in &traj.records {
            prop_assert!(set.contains_within(&r.x_hat, 1e-12));
        }
    }

    #[test]
    fn planar_learner_stays_in_ball(seed in any::<u64>(), eta in 0.001..0.5f64) {
        let set = AdmissibleSet::ball(vec![0.0, 0.0], 1.0).unwrap();
        let noise = riskaverse::ExplicitSeq::stationary(NoiseDist::gaussian(0.0, 1.0).unwrap(), 200).unwrap();
        let cost = FnCost::new(|x: &[f64], xi: f64| (x[0] - 0.9).powi(2) + (x[1] + 0.9 * xi).powi(2), 10.0, 8.0);
        let cfg = LearnerConfig {
            horizon: 200,
            batch_len: 25,
            delta: 0.2,
            alpha: 0.3,
            sampling: SamplingStrategy::Constant(4),
            rate: LearningRateSchedule::Constant(eta),
            x0: DecisionVector::new(vec![3.0, 3.0]).unwrap(),
            seed,
        };
        let traj = run(&cfg, &cost, &noise, &set).unwrap();
        prop_assert!(traj.x0_projected);
        for r in &traj.records {
            prop_assert!(set.contains_within(&r.x_hat, 1e-12));
        }
    }
}
