//! Semiclassical decay rate and width predictions.
//!
//! The decay rate is `γ = η (1 − Re⟨e^{−iΔS/ħ}⟩)`, with the phase average over
//! the perturbed region and `η` the rate at which orbits visit it.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::Rng;
use thiserror::Error;

use crate::maps::{
    evolve, periodic_orbits, EffectivePlanck, MapError, PerturbationSpec, ShearKind, TorusPoint,
};
use crate::quadrature::{midpoint, nested_midpoint, QuadratureError, QuadratureOptions};
use crate::rng::sample_stream;
use crate::WIDTH_FRACTION;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemiclassicsError {
    #[error("{error}; last estimate {last}")]
    Quadrature {
        error: QuadratureError,
        last: Complex64,
    },
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Rates tying a semiclassical prediction together.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayParams {
    pub gamma: f64,
    pub eta: f64,
    /// Area of the perturbed region.
    pub alpha: f64,
    /// Mean time between returns to the section.
    pub tau: f64,
    /// Area of the section.
    pub area: f64,
}

/// `⟨e^{−iΔS/ħ}⟩` over the perturbed region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseAverage {
    pub value: Complex64,
    /// `1 − Re(value)`, integrated directly as `⟨2 sin²(φ/2)⟩` to avoid cancellation.
    pub one_minus_re: f64,
    pub quadrature_error: f64,
}

/// Quadrature settings used for phase averages.
pub fn phase_quadrature() -> QuadratureOptions {
    QuadratureOptions {
        abs_tol: 1e-8,
        ..QuadratureOptions::default()
    }
}

// 1 − e^{−iφ}
fn deficit(phi: f64) -> Complex64 {
    let s = (0.5 * phi).sin();
    Complex64::new(2.0 * s * s, phi.sin())
}

fn finish(integral: Complex64, length: f64, error: f64) -> PhaseAverage {
    let mean = integral / length;
    PhaseAverage {
        value: Complex64::new(1.0, 0.0) - mean,
        one_minus_re: mean.re,
        quadrature_error: error / length,
    }
}

/// Phase average of an action difference depending on position only, over `[qa, qb]`.
pub fn phase_average_1d<F>(
    action: F,
    (qa, qb): (f64, f64),
    planck: &EffectivePlanck,
    opts: &QuadratureOptions,
) -> Result<PhaseAverage, SemiclassicsError>
where
    F: Fn(f64) -> f64,
{
    let length = qb - qa;
    if !(length > 0.0) {
        return Err(SemiclassicsError::InvalidInput(
            "empty integration interval",
        ));
    }
    let scaled = QuadratureOptions {
        abs_tol: opts.abs_tol * length,
        ..*opts
    };
    match midpoint(|q| deficit(planck.phase(action(q))), qa, qb, &scaled) {
        Ok(est) => Ok(finish(est.value, length, est.error)),
        Err((error, last)) => Err(SemiclassicsError::Quadrature {
            error,
            last: Complex64::new(1.0, 0.0) - last / length,
        }),
    }
}

/// `(1/α) ∬ e^{−iΔS(q,p,δk)/ħ} dq dp` over the perturbed region of `spec`.
pub fn phase_average(
    spec: &PerturbationSpec,
    delta_k: f64,
    planck: &EffectivePlanck,
) -> Result<PhaseAverage, SemiclassicsError> {
    let opts = phase_quadrature();
    match spec.kind() {
        ShearKind::MomentumShear => phase_average_1d(
            |q| spec.action_diff_one_step(TorusPoint::new(q, 0.0), delta_k),
            spec.q_range(),
            planck,
            &opts,
        ),
        ShearKind::MomentumPlusPositionShear => {
            let (qa, qb) = spec.q_range();
            let area = spec.area();
            let scaled = QuadratureOptions {
                abs_tol: opts.abs_tol * area,
                ..opts
            };
            match nested_midpoint(
                |q, p| {
                    deficit(planck.phase(spec.action_diff_one_step(TorusPoint::new(q, p), delta_k)))
                },
                (qa, qb),
                (0.0, 1.0),
                &scaled,
            ) {
                Ok(est) => Ok(finish(est.value, area, est.error)),
                Err((error, last)) => Err(SemiclassicsError::Quadrature {
                    error,
                    last: Complex64::new(1.0, 0.0) - last / area,
                }),
            }
        }
    }
}

/// `γ = η (1 − Re⟨e^{−iΔS/ħ}⟩)` with `η = α/(τA)`.
pub fn gamma(
    spec: &PerturbationSpec,
    delta_k: f64,
    planck: &EffectivePlanck,
    tau: f64,
    area: f64,
) -> Result<DecayParams, SemiclassicsError> {
    if !(tau > 0.0) || !(area > 0.0) {
        return Err(SemiclassicsError::InvalidInput(
            "tau and area must be positive",
        ));
    }
    let avg = phase_average(spec, delta_k, planck)?;
    Ok(decay_params(avg.one_minus_re, spec.area(), tau, area))
}

/// Decay parameters for the cat map (`τ = 1`, unit torus).
pub fn catmap_gamma(
    spec: &PerturbationSpec,
    delta_k: f64,
    planck: &EffectivePlanck,
) -> Result<DecayParams, SemiclassicsError> {
    gamma(spec, delta_k, planck, 1.0, 1.0)
}

/// Assembles decay parameters from `1 − Re⟨e^{−iΔS/ħ}⟩`.
pub fn decay_params(one_minus_re: f64, alpha: f64, tau: f64, area: f64) -> DecayParams {
    let eta = alpha / (tau * area);
    DecayParams {
        gamma: eta * one_minus_re.clamp(0.0, 2.0),
        eta,
        alpha,
        tau,
        area,
    }
}

/// `tan(0.35π)`: ratio of the 70% half-width to `γ` for a Lorentzian.
pub fn lorentzian_width_factor() -> f64 {
    (0.5 * WIDTH_FRACTION * PI).tan()
}

/// Width predicted from the decay rate, `tan(0.35π)·γ`.
pub fn sigma_sc(params: &DecayParams) -> f64 {
    lorentzian_width_factor() * params.gamma
}

/// Linear coefficient of the periodization correction.
pub const PERIODIZATION_LINEAR: f64 = 0.24;

/// Width of the uniform distribution on the circle, `0.7π`.
pub fn saturation_width() -> f64 {
    WIDTH_FRACTION * PI
}

/// Periodization-corrected width `σ[1 + 0.24σ − (σ/π)²]`, held monotone and
/// capped at the uniform-distribution width.
pub fn sigma_sc_periodized(sigma: f64) -> f64 {
    sigma_sc_periodized_with(sigma, PERIODIZATION_LINEAR)
}

/// [`sigma_sc_periodized`] with an arbitrary linear coefficient.
pub fn sigma_sc_periodized_with(sigma: f64, linear: f64) -> f64 {
    if !(sigma > 0.0) {
        return 0.0;
    }
    // the cubic turns over at its first positive critical point
    let peak = PI * PI * (2.0 * linear + (4.0 * linear * linear + 12.0 / (PI * PI)).sqrt()) / 6.0;
    let s = sigma.min(peak);
    let raw = s * (1.0 + linear * s - (s / PI) * (s / PI));
    raw.min(saturation_width())
}

/// Monte Carlo estimate of the averaged amplitude fidelity along unperturbed orbits.
#[derive(Debug, Clone, PartialEq)]
pub struct DephasingEstimate {
    /// Sample mean of `e^{−iΔS_t/ħ}` for `t = 0..=m`.
    pub mean: Vec<Complex64>,
    /// Standard error of each mean.
    pub std_error: Vec<f64>,
    pub samples: u64,
}

/// Running sums for the dephasing estimator; partial sums over disjoint
/// index ranges merge exactly when combined in index order.
#[derive(Debug, Clone, PartialEq)]
pub struct DephasingSums {
    sum: Vec<Complex64>,
    sum_sq: Vec<f64>,
    count: u64,
}

impl DephasingSums {
    pub fn new(m: usize) -> Self {
        Self {
            sum: vec![Complex64::new(0.0, 0.0); m + 1],
            sum_sq: vec![0.0; m + 1],
            count: 0,
        }
    }

    pub fn merge(&mut self, other: &DephasingSums) {
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            *a += b;
        }
        self.count += other.count;
    }

    pub fn finish(&self) -> DephasingEstimate {
        let n = self.count as f64;
        let mean: Vec<Complex64> = self.sum.iter().map(|s| s / n).collect();
        let std_error = mean
            .iter()
            .zip(&self.sum_sq)
            .map(|(mu, &sq)| {
                if self.count < 2 {
                    return f64::INFINITY;
                }
                let var = ((sq - n * mu.norm_sqr()) / (n - 1.0)).max(0.0);
                (var / n).sqrt()
            })
            .collect();
        DephasingEstimate {
            mean,
            std_error,
            samples: self.count,
        }
    }
}

/// Accumulates samples `indices` of the dephasing estimator.
pub fn dephasing_partial(
    m: usize,
    spec: &PerturbationSpec,
    delta_k: f64,
    planck: &EffectivePlanck,
    seed: u64,
    indices: core::ops::Range<u64>,
) -> DephasingSums {
    let mut acc = DephasingSums::new(m);
    for index in indices {
        let mut rng = sample_stream(seed, index);
        let mut x = TorusPoint::new(rng.random(), rng.random());
        let mut action = 0.0;
        for t in 0..=m {
            let z = Complex64::from_polar(1.0, -planck.phase(action));
            acc.sum[t] += z;
            acc.sum_sq[t] += z.norm_sqr();
            if t < m {
                x = evolve(x, None);
                action += spec.action_diff_one_step(x, delta_k);
            }
        }
        acc.count += 1;
    }
    acc
}

/// `⟨e^{−iΔS_t/ħ}⟩` for `t = 0..=m` from `samples` uniform initial points.
pub fn dephasing_fidelity(
    m: usize,
    spec: &PerturbationSpec,
    delta_k: f64,
    planck: &EffectivePlanck,
    samples: u64,
    seed: u64,
) -> Result<DephasingEstimate, SemiclassicsError> {
    if samples == 0 {
        return Err(SemiclassicsError::InvalidInput(
            "at least one sample is required",
        ));
    }
    Ok(dephasing_partial(m, spec, delta_k, planck, seed, 0..samples).finish())
}

/// Distribution of orbit actions `N·ΔS_μ mod 1` over periodic orbits.
#[derive(Debug, Clone, PartialEq)]
pub struct PoUniformity {
    /// `(period, fraction)` for every orbit, in period order.
    pub orbits: Vec<(u32, f64)>,
    /// Kolmogorov–Smirnov distance of the fractions to the uniform law on `[0, 1)`.
    pub ks_distance: f64,
    pub truncated: bool,
}

/// Kolmogorov–Smirnov distance between a sample and the uniform law on `[0, 1)`.
pub fn ks_uniform(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| ((i as f64 + 1.0) / n - x).max(x - i as f64 / n))
        .fold(0.0, f64::max)
}

/// Orbit-action uniformity diagnostic for periods `1..=n_max`.
pub fn po_action_uniformity(
    n_max: u32,
    delta_k: f64,
    spec: &PerturbationSpec,
    planck: &EffectivePlanck,
    cap: usize,
) -> Result<PoUniformity, SemiclassicsError> {
    let (orbits, truncated) = periodic_orbits(n_max, cap)?;
    let n = planck.dimension() as f64;
    let entries: Vec<(u32, f64)> = orbits
        .iter()
        .map(|orbit| {
            // the kick points of an orbit are its own points
            let action: f64 = orbit
                .points
                .iter()
                .map(|pt| spec.action_diff_one_step(pt.to_point(), delta_k))
                .sum();
            (orbit.period, crate::rem_euclid(n * action, 1.0))
        })
        .collect();
    let fractions: Vec<f64> = entries.iter().map(|e| e.1).collect();
    Ok(PoUniformity {
        ks_distance: ks_uniform(&fractions),
        orbits: entries,
        truncated,
    })
}

/// Second-order expansion of `1 − Re⟨e^{−iφ}⟩`, that is `⟨φ²⟩/2`.
pub fn golden_rule_estimate(
    spec: &PerturbationSpec,
    delta_k: f64,
    planck: &EffectivePlanck,
) -> Result<f64, SemiclassicsError> {
    let (qa, qb) = spec.q_range();
    let opts = phase_quadrature();
    let f = |q: f64| {
        let phi = planck.phase(spec.action_diff_one_step(TorusPoint::new(q, 0.0), delta_k));
        0.5 * phi * phi
    };
    match midpoint(f, qa, qb, &opts) {
        Ok(est) => Ok(est.value / (qb - qa)),
        Err((error, last)) => Err(SemiclassicsError::Quadrature {
            error,
            last: Complex64::new(last, 0.0),
        }),
    }
}
