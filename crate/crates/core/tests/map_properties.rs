use ldos_core::maps::{evolve, PerturbationSpec, ShearKind, TorusPoint, WindowMode};
use proptest::prelude::*;

fn specs(k: f64) -> Vec<PerturbationSpec> {
    vec![
        PerturbationSpec::global(ShearKind::MomentumShear, k).unwrap(),
        PerturbationSpec::global(ShearKind::MomentumPlusPositionShear, k).unwrap(),
        PerturbationSpec::local(k, 0.1, 0.4, WindowMode::Rescaled).unwrap(),
        PerturbationSpec::local(k, 0.1, 0.4, WindowMode::Truncated).unwrap(),
    ]
}

// central-difference Jacobian, with the image unwrapped around the base image
fn jacobian_det(spec: &PerturbationSpec, q: f64, p: f64, h: f64) -> f64 {
    let base = evolve(TorusPoint::new(q, p), Some(spec));
    let lift = |pt: TorusPoint| {
        let dq = pt.q() - base.q();
        let dp = pt.p() - base.p();
        (dq - dq.round(), dp - dp.round())
    };
    let (a1, b1) = lift(evolve(TorusPoint::new(q + h, p), Some(spec)));
    let (a0, b0) = lift(evolve(TorusPoint::new(q - h, p), Some(spec)));
    let (c1, d1) = lift(evolve(TorusPoint::new(q, p + h), Some(spec)));
    let (c0, d0) = lift(evolve(TorusPoint::new(q, p - h), Some(spec)));
    let dqdq = (a1 - a0) / (2.0 * h);
    let dpdq = (b1 - b0) / (2.0 * h);
    let dqdp = (c1 - c0) / (2.0 * h);
    let dpdp = (d1 - d0) / (2.0 * h);
    dqdq * dpdp - dqdp * dpdq
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn perturbed_maps_preserve_area(q in 0.0f64..1.0, p in 0.0f64..1.0, k in -0.3f64..0.3) {
        for spec in specs(k) {
            // stay off the edges of the truncated window, where the shear jumps
            if spec.mode() == WindowMode::Truncated {
                let qn = evolve(TorusPoint::new(q, p), None).q();
                prop_assume!((qn - 0.1).abs() > 1e-3 && (qn - 0.5).abs() > 1e-3);
            }
            let det = jacobian_det(&spec, q, p, 1e-6);
            prop_assert!((det - 1.0).abs() < 1e-8, "det={det}");
        }
    }

    #[test]
    fn action_difference_is_antisymmetric(q in 0.0f64..1.0, p in 0.0f64..1.0, k in -1.0f64..1.0, dk in -0.5f64..0.5) {
        for spec in specs(k) {
            let pt = TorusPoint::new(q, p);
            let forward = spec.action_diff_one_step(pt, dk);
            let back = spec.with_strength(k + dk).action_diff_one_step(pt, -dk);
            prop_assert!((forward + back).abs() < 1e-15);
        }
    }

    #[test]
    fn full_window_is_global(q in 0.0f64..1.0, k in -2.0f64..2.0, dk in -0.5f64..0.5) {
        let g = PerturbationSpec::global(ShearKind::MomentumShear, k).unwrap();
        let l = PerturbationSpec::local(k, 0.0, 1.0, WindowMode::Rescaled).unwrap();
        prop_assert!((g.shear_momentum(q) - l.shear_momentum(q)).abs() < 1e-15);
        prop_assert!((g.kick_potential(q) - l.kick_potential(q)).abs() < 1e-15);
        let pt = TorusPoint::new(q, 0.3);
        prop_assert!((g.action_diff_one_step(pt, dk) - l.action_diff_one_step(pt, dk)).abs() < 1e-15);
        prop_assert_eq!(evolve(pt, Some(&g)), evolve(pt, Some(&l)));
    }

    #[test]
    fn coordinates_stay_reduced(q in -5.0f64..5.0, p in -5.0f64..5.0, k in -1.0f64..1.0) {
        for spec in specs(k) {
            let x = evolve(TorusPoint::new(q, p), Some(&spec));
            prop_assert!((0.0..1.0).contains(&x.q()) && (0.0..1.0).contains(&x.p()));
        }
    }
}
