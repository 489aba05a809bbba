//! Property tests against closed-form oracles written independently of the
//! library code.

use std::sync::Arc;

use linbandit::environment::{BanditInstance, NoiseModel, NoiseStream, StepKind};
use linbandit::estimation::{GaussianPosterior, OlsState};
use linbandit::geometry::normalized_difference;
use linbandit::policies::{pege_periods, Pege};
use linbandit::{ArmSet, Matrix, Policy, Vector};
use proptest::prelude::*;

fn vec_strategy(dim: usize) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-5.0f64..5.0, dim).prop_map(Vector::from_vec)
}

fn nonzero(dim: usize) -> impl Strategy<Value = Vector> {
    vec_strategy(dim).prop_filter("away from zero", |v| v.norm() > 1e-3)
}

/// `Qz / √(z'Qz)` for a diagonal shape.
fn ellipsoid_oracle(diag: &[f64], z: &Vector) -> Vector {
    let qz = Vector::from_iterator(z.len(), z.iter().zip(diag).map(|(a, d)| a * d));
    let scale = qz.dot(z).sqrt();
    qz / scale
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn sphere_best_arm_matches_normalization(z in nonzero(3), c in 0.01f64..100.0) {
        let set = ArmSet::unit_sphere(3).unwrap();
        let oracle = &z / z.norm();
        prop_assert!((set.best_arm(&z).unwrap() - &oracle).amax() < 1e-12);
        prop_assert!((set.best_arm(&(&z * c)).unwrap() - &oracle).amax() < 1e-12);
    }

    #[test]
    fn ellipsoid_best_arm_matches_closed_form(
        z in nonzero(2),
        d1 in 0.1f64..10.0,
        d2 in 0.1f64..10.0,
        c in 0.01f64..100.0,
    ) {
        let set = ArmSet::ellipsoid(Matrix::from_diagonal(&Vector::from_vec(vec![d1, d2]))).unwrap();
        let oracle = ellipsoid_oracle(&[d1, d2], &z);
        let tol = 1e-9 * oracle.norm().max(1.0);
        prop_assert!((set.best_arm(&z).unwrap() - &oracle).amax() < tol);
        prop_assert!((set.best_arm(&(&z * c)).unwrap() - &oracle).amax() < tol);
    }

    #[test]
    fn finite_best_arm_is_brute_force_argmax(
        arms in prop::collection::vec(vec_strategy(3), 2..12),
        z in nonzero(3),
        c in 0.01f64..100.0,
    ) {
        let set = ArmSet::finite(arms.clone()).unwrap();
        let best = arms.iter().map(|a| a.dot(&z)).fold(f64::NEG_INFINITY, f64::max);
        let chosen = set.best_arm(&z).unwrap();
        prop_assert!((chosen.dot(&z) - best).abs() <= 1e-12 * best.abs().max(1.0));
        prop_assert_eq!(set.best_arm(&(&z * c)).unwrap(), chosen);
    }

    #[test]
    fn gaps_are_nonnegative(
        arms in prop::collection::vec(vec_strategy(2), 2..8),
        z in vec_strategy(2),
        dir in nonzero(2),
        radius in 0.0f64..1.0,
    ) {
        let finite = ArmSet::finite(arms.clone()).unwrap();
        for a in &arms {
            prop_assert!(finite.gap(&z, a).unwrap() >= -1e-12);
        }
        let sphere = ArmSet::unit_sphere(2).unwrap();
        let inside = &dir / dir.norm() * radius;
        prop_assert!(sphere.gap(&z, &inside).unwrap() >= -1e-12);
    }

    #[test]
    fn normalized_difference_is_bounded(w in nonzero(4), z in nonzero(4)) {
        let lhs = normalized_difference(&w, &z);
        let oracle = (&w / w.norm() - &z / z.norm()).norm();
        prop_assert!((lhs - oracle).abs() < 1e-12);
        prop_assert!(lhs <= 2.0 * (&w - &z).norm() / z.norm() + 1e-12);
    }

    #[test]
    fn sherman_morrison_tracks_direct_inverse(
        updates in prop::collection::vec((vec_strategy(3), -3.0f64..3.0), 1..60),
    ) {
        let init: Vec<Vector> = (0..3).map(|k| Vector::from_fn(3, |i, _| if i == k { 1.0 } else { 0.0 })).collect();
        let mut ols = OlsState::init(&init, &[0.0, 0.0, 0.0]).unwrap();
        let mut gram = Matrix::identity(3, 3);
        let mut acc = Vector::zeros(3);
        for (u, x) in &updates {
            ols.update(u, *x).unwrap();
            gram += u * u.transpose();
            acc += u * *x;
        }
        let inv = gram.clone().try_inverse().unwrap();
        let rel = (ols.gram_inverse() - &inv).norm() / inv.norm();
        prop_assert!(rel < 1e-9, "relative error {rel}");
        let direct = gram.lu().solve(&acc).unwrap();
        prop_assert!((ols.estimate() - direct).amax() < 1e-8 * (1.0 + ols.estimate().amax()));
    }

    #[test]
    fn posterior_covariance_is_regularized_gram_inverse(
        updates in prop::collection::vec((vec_strategy(2), -3.0f64..3.0), 0..40),
    ) {
        let mut post = GaussianPosterior::isotropic_prior(2);
        let mut precision = Matrix::identity(2, 2) * 2.0;
        for (u, x) in &updates {
            post.update(u, *x, 1.0).unwrap();
            precision += u * u.transpose();
        }
        let direct = precision.try_inverse().unwrap();
        prop_assert!((post.covariance - direct).amax() < 1e-10);
    }

    #[test]
    fn pege_schedule_counts(dim in 2usize..6, cycles in 1usize..=100) {
        prop_assert_eq!(pege_periods(dim, cycles), dim * cycles + cycles * (cycles + 1) / 2);
    }
}

/// Replays the schedule for every `K ≤ 100` at `r = 2` and counts step kinds.
#[test]
fn pege_replayed_schedule() {
    let dim = 2;
    let arms = Arc::new(ArmSet::unit_sphere(dim).unwrap());
    let inst = BanditInstance::new(arms.clone(), Vector::from_vec(vec![0.4, -0.2]), NoiseModel::gaussian(1.0).unwrap())
        .unwrap();
    let mut p = Pege::new();
    p.reset(arms, 0).unwrap();
    let mut noise = NoiseStream::new(1, 0);
    let (mut explore, mut exploit) = (0, 0);
    let mut t = 0;
    for k in 1..=100usize {
        while t < pege_periods(dim, k) {
            t += 1;
            let s = p.select(t).unwrap();
            match s.kind {
                StepKind::Explore => explore += 1,
                _ => exploit += 1,
            }
            let x = inst.pull(&s.arm, noise.at_step(t)).unwrap();
            p.observe(&s.arm, x).unwrap();
        }
        assert_eq!(explore, dim * k);
        assert_eq!(exploit, k * (k + 1) / 2);
    }
}
