//! Numerical laboratory for the local density of states (LDOS) of perturbed
//! chaotic systems.
//!
//! The crate is `no_std` and only needs `alloc`. It covers:
//!
//! * [`maps`]: classical perturbed cat map on the unit torus, its shears,
//!   one-step action differences and exact periodic points.
//! * [`semiclassics`]: the phase-space averaged decay rate, the predicted
//!   LDOS widths, the dephasing-representation fidelity and the
//!   periodic-orbit action diagnostic.
//! * [`quantum`]: torus quantization, eigendecomposition of the propagator,
//!   overlap distributions and survival amplitudes.
//! * [`distributions`]: width estimation on the circle and the (periodized)
//!   Lorentzian family, including least-squares fitting.
//! * [`stadium`]: desymmetrized Bunimovich stadium geometry, boundary
//!   deformation and the semiclassical width for shape perturbations.
//!
//! IO, configuration and orchestration live in the companion `ldos-lab` crate.
#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod distributions;
pub mod linalg;
pub mod maps;
pub mod quadrature;
pub mod quantum;
pub mod rng;
pub mod semiclassics;
pub mod stadium;

pub use num_complex::Complex64;

/// Fraction of probability enclosed by the LDOS width.
pub const WIDTH_FRACTION: f64 = 0.7;

/// Wraps an angle into `[-π, π)`.
#[inline]
pub fn wrap_angle(theta: f64) -> f64 {
    use core::f64::consts::{PI, TAU};
    #[allow(unused_imports)] // shadowed by inherent methods when std is linked
    use num_traits::Float;

    let w = theta - TAU * ((theta + PI) / TAU).floor();
    if w >= PI {
        w - TAU
    } else if w < -PI {
        w + TAU
    } else {
        w
    }
}

/// `x mod m` in `[0, m)` for `m > 0`.
#[inline]
pub fn rem_euclid(x: f64, m: f64) -> f64 {
    #[allow(unused_imports)] // shadowed by inherent methods when std is linked
    use num_traits::Float;

    let r = x - m * (x / m).floor();
    if r >= m || r < 0.0 {
        0.0
    } else {
        r
    }
}
