//! Acceptance suite: one test per criterion. Each prints its report line.

use ldos_lab::acceptance::{self, CriterionResult};
use ldos_lab::tolerances::DEFAULT_SEED;

fn report(r: CriterionResult) {
    println!("{r}");
    assert!(r.passed, "{r}");
}

#[test]
fn a01_width_estimator_calibration() {
    report(acceptance::a1_width_calibration(DEFAULT_SEED));
}

#[test]
fn a02_lorentzian_additivity() {
    report(acceptance::a2_lorentzian_additivity());
}

#[test]
fn a03_periodized_width_oracle() {
    report(acceptance::a3_periodized_oracle());
}

#[test]
fn a04_global_quantum_semiclassical_agreement() {
    report(acceptance::a4_global_agreement(None));
}

#[test]
fn a05_local_quantum_semiclassical_agreement() {
    report(acceptance::a5_local_agreement(None));
}

#[test]
fn a06_golden_rule_regime() {
    report(acceptance::a6_golden_rule(None));
}

#[test]
fn a07_dimension_collapse() {
    report(acceptance::a7_n_collapse(None));
}

#[test]
fn a08_lorentzian_shape_strong_perturbation() {
    report(acceptance::a8_lorentzian_shape(None));
}

#[test]
fn a09_survival_amplitude_and_dephasing() {
    report(acceptance::a9_survival(DEFAULT_SEED, None));
}

#[test]
fn a10_overlap_bistochasticity() {
    report(acceptance::a10_bistochastic(DEFAULT_SEED, None));
}

#[test]
fn a11_stadium_classical_mechanics() {
    report(acceptance::a11_stadium(DEFAULT_SEED));
}

#[test]
fn a12_periodic_orbit_diagnostic() {
    report(acceptance::a12_periodic_orbits());
}

/// A tampered linear periodization coefficient must break the global agreement check.
#[test]
fn tampered_periodization_coefficient_is_detected() {
    let rows = acceptance::global_agreement_rows(None).unwrap();
    let honest = acceptance::a4_from_rows(&rows, ldos_core::semiclassics::PERIODIZATION_LINEAR);
    let tampered = acceptance::a4_from_rows(&rows, 0.3);
    println!("{honest}");
    println!("{tampered}");
    assert!(!tampered.passed, "{tampered}");
}
