use ldos_core::distributions::width_70;
use ldos_core::linalg::CMatrix;
use ldos_core::maps::{EffectivePlanck, PerturbationSpec, ShearKind, WindowMode};
use ldos_core::quantum::{
    build_propagator, eigendecompose, ldos, survival_amplitude, EigenSystem, QuantizationKnobs,
};
use ldos_core::semiclassics::{catmap_gamma, dephasing_fidelity};
use ldos_core::Complex64;

fn eigensystem(n: usize, spec: &PerturbationSpec) -> EigenSystem {
    eigendecompose(&build_propagator(n, spec, QuantizationKnobs::default()).unwrap()).unwrap()
}

#[test]
fn overlap_matrix_is_doubly_stochastic() {
    let n = 120;
    let base = PerturbationSpec::local(0.0, 0.01, 0.4, WindowMode::Rescaled).unwrap();
    let e0 = eigensystem(n, &base);
    let e1 = eigensystem(n, &base.with_strength(15.0 / n as f64));
    let d = ldos(&e0, &e1).unwrap();
    for s in d.per_state_sums().into_iter().chain(d.per_perturbed_sums()) {
        assert!((s - 1.0).abs() < 1e-10);
    }
    assert!((d.total_weight() - n as f64).abs() < 1e-8);
    assert!(d
        .omegas()
        .iter()
        .all(|w| (-std::f64::consts::PI..std::f64::consts::PI).contains(w)));
}

#[test]
fn sign_of_perturbation_does_not_change_width() {
    let n = 200;
    let base = PerturbationSpec::global(ShearKind::MomentumShear, 0.0).unwrap();
    let dk = 8.0 / n as f64;
    let e0 = eigensystem(n, &base);
    let up = width_70(
        &ldos(&e0, &eigensystem(n, &base.with_strength(dk)))
            .unwrap()
            .to_sample(),
    );
    let down = width_70(
        &ldos(&e0, &eigensystem(n, &base.with_strength(-dk)))
            .unwrap()
            .to_sample(),
    );
    assert!((up / down - 1.0).abs() < 0.05, "{up} vs {down}");
}

#[test]
fn survival_amplitude_matches_direct_powers() {
    // independent route: traces of explicit propagator powers
    let n = 60;
    let spec = PerturbationSpec::global(ShearKind::MomentumPlusPositionShear, 0.0).unwrap();
    let u0 = build_propagator(n, &spec, QuantizationKnobs::default()).unwrap();
    let u1 = build_propagator(
        n,
        &spec.with_strength(4.0 / n as f64),
        QuantizationKnobs::default(),
    )
    .unwrap();
    let d = ldos(&eigendecompose(&u0).unwrap(), &eigendecompose(&u1).unwrap()).unwrap();
    let amp = survival_amplitude(&d, 6);
    assert!((amp[0] - Complex64::new(1.0, 0.0)).norm() < 1e-10);
    let mut p0 = CMatrix::identity(n);
    let mut p1 = CMatrix::identity(n);
    for a in amp {
        let direct = p1.adjoint_matmul(&p0).unwrap().trace() / n as f64;
        assert!((direct - a).norm() < 1e-9);
        p0 = u0.matrix.matmul(&p0).unwrap();
        p1 = u1.matrix.matmul(&p1).unwrap();
    }
}

#[test]
fn first_step_amplitude_equals_phase_average() {
    // Ā(1) is the discretized average of e^{−iΔS/ħ} over the grid q_j = j/N
    let n = 150;
    let base = PerturbationSpec::local(0.0, 0.01, 0.7, WindowMode::Rescaled).unwrap();
    let dk = 12.0 / n as f64;
    let d = ldos(
        &eigensystem(n, &base),
        &eigensystem(n, &base.with_strength(dk)),
    )
    .unwrap();
    let a1 = survival_amplitude(&d, 1)[1];
    let planck = EffectivePlanck::new(n).unwrap();
    let delta = base.with_strength(dk);
    let grid: Complex64 = (0..n)
        .map(|j| {
            Complex64::from_polar(1.0, planck.phase(delta.kick_potential(j as f64 / n as f64)))
        })
        .sum::<Complex64>()
        / n as f64;
    assert!((a1 - grid).norm() < 1e-10, "{a1} vs {grid}");
}

#[test]
fn quantum_amplitude_tracks_dephasing_estimate() {
    let n = 200;
    let spec = PerturbationSpec::global(ShearKind::MomentumShear, 0.0).unwrap();
    let dk = 3.0 / n as f64;
    let d = ldos(
        &eigensystem(n, &spec),
        &eigensystem(n, &spec.with_strength(dk)),
    )
    .unwrap();
    let amp = survival_amplitude(&d, 5);
    let planck = EffectivePlanck::new(n).unwrap();
    let dr = dephasing_fidelity(5, &spec, dk, &planck, 40_000, 17).unwrap();
    let g = catmap_gamma(&spec, dk, &planck).unwrap().gamma;
    for (m, a) in amp.iter().enumerate().skip(1) {
        let q = a.norm();
        let c = dr.mean[m].norm();
        assert!(
            (q - c).abs() < 3.0 * dr.std_error[m] + 0.02,
            "m={m} {q} vs {c}"
        );
        assert!((q / (-g * m as f64).exp() - 1.0).abs() < 0.15, "m={m}");
    }
}
