//! Adaptive composite midpoint quadrature.
//!
//! Panels are refined by tripling, which reuses every previous midpoint. The
//! error estimate is the difference between successive levels; for smooth
//! periodic integrands (the cat-map phase averages) the rule converges
//! geometrically, for piecewise smooth ones (the stadium) quadratically.

use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use thiserror::Error;

/// Values that can be integrated.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        num_complex::ComplexFloat::abs(*self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub initial_panels: usize,
    /// Hard cap on the number of panels.
    pub max_panels: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-8,
            rel_tol: 0.0,
            initial_panels: 16,
            max_panels: 3usize.pow(12) * 16,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("quadrature did not reach tolerance: error estimate {error:e} after {panels} panels")]
pub struct QuadratureError {
    pub panels: usize,
    pub error: f64,
    /// Last estimate of the integral's magnitude.
    pub last_magnitude: f64,
}

/// `∫_a^b f` by adaptive composite midpoint refinement.
pub fn midpoint<T, F>(
    mut f: F,
    a: f64,
    b: f64,
    opts: &QuadratureOptions,
) -> Result<Estimate<T>, (QuadratureError, T)>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let len = b - a;
    let mut panels = opts.initial_panels.max(1);
    let mut h = len / panels as f64;
    let mut sum = T::zero();
    for i in 0..panels {
        sum = sum + f(a + (i as f64 + 0.5) * h);
    }
    let mut evaluations = panels;
    let mut estimate = sum * h;
    loop {
        let next_panels = panels * 3;
        if next_panels > opts.max_panels {
            let err = QuadratureError {
                panels,
                error: f64::INFINITY,
                last_magnitude: estimate.magnitude(),
            };
            return Err((err, estimate));
        }
        let h_next = h / 3.0;
        let mut extra = T::zero();
        for i in 0..panels {
            let left = a + i as f64 * h;
            extra = extra + f(left + 0.5 * h_next) + f(left + 2.5 * h_next);
        }
        evaluations += 2 * panels;
        sum = sum + extra;
        panels = next_panels;
        h = h_next;
        let refined = sum * h;
        let error = (refined - estimate).magnitude();
        estimate = refined;
        let tol = opts.abs_tol.max(opts.rel_tol * estimate.magnitude());
        if error <= tol {
            return Ok(Estimate {
                value: estimate,
                error,
                evaluations,
            });
        }
    }
}

/// `∫_{pa}^{pb} ∫_{qa}^{qb} f(q, p) dq dp`, inner integral over `q`.
pub fn nested_midpoint<T, F>(
    mut f: F,
    (qa, qb): (f64, f64),
    (pa, pb): (f64, f64),
    opts: &QuadratureOptions,
) -> Result<Estimate<T>, (QuadratureError, T)>
where
    T: QuadValue,
    F: FnMut(f64, f64) -> T,
{
    let inner_opts = QuadratureOptions {
        abs_tol: opts.abs_tol / (2.0 * (pb - pa).abs().max(f64::MIN_POSITIVE)),
        rel_tol: opts.rel_tol / 2.0,
        ..*opts
    };
    let outer_opts = QuadratureOptions {
        abs_tol: opts.abs_tol / 2.0,
        rel_tol: opts.rel_tol / 2.0,
        ..*opts
    };
    let mut inner_error = 0.0f64;
    let mut evaluations = 0usize;
    let mut failure: Option<QuadratureError> = None;
    let outer = midpoint(
        |p| match midpoint(|q| f(q, p), qa, qb, &inner_opts) {
            Ok(est) => {
                inner_error = inner_error.max(est.error);
                evaluations += est.evaluations;
                est.value
            }
            Err((err, last)) => {
                failure.get_or_insert(err);
                last
            }
        },
        pa,
        pb,
        &outer_opts,
    );
    match (outer, failure) {
        (Ok(est), None) => Ok(Estimate {
            value: est.value,
            error: est.error + inner_error * (pb - pa).abs(),
            evaluations,
        }),
        (Ok(est), Some(err)) => Err((err, est.value)),
        (Err(e), _) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;
    #[allow(unused_imports)] // shadowed by inherent methods when std is linked
    use num_traits::Float;

    #[test]
    fn periodic_integrand_converges_fast() {
        let opts = QuadratureOptions {
            abs_tol: 1e-13,
            ..Default::default()
        };
        // ∫_0^1 exp(cos 2πx) dx = I_0(1)
        let est = midpoint(|x: f64| (2.0 * PI * x).cos().exp(), 0.0, 1.0, &opts).unwrap();
        assert!((est.value - 1.266_065_877_752_008_4).abs() < 1e-13);
        assert!(est.evaluations < 500);
    }

    #[test]
    fn polynomial_and_complex() {
        let opts = QuadratureOptions::default();
        let est = midpoint(|x: f64| x * x, 0.0, 2.0, &opts).unwrap();
        assert!((est.value - 8.0 / 3.0).abs() < 1e-8);
        let est = midpoint(|x: f64| Complex64::from_polar(1.0, x), 0.0, PI, &opts).unwrap();
        assert!((est.value - Complex64::new(0.0, 2.0)).norm() < 1e-8);
    }

    #[test]
    fn hard_cap_reports_error() {
        let opts = QuadratureOptions {
            abs_tol: 1e-15,
            max_panels: 200,
            ..Default::default()
        };
        let res = midpoint(|x: f64| x.sqrt(), 0.0, 1.0, &opts);
        let (err, last) = res.unwrap_err();
        assert!(err.panels <= 200);
        assert!((last - 2.0 / 3.0).abs() < 1e-2);
    }

    #[test]
    fn nested_product() {
        let opts = QuadratureOptions::default();
        let est = nested_midpoint(
            |q: f64, p: f64| q * p.cos(),
            (0.0, 1.0),
            (0.0, PI / 2.0),
            &opts,
        )
        .unwrap();
        assert!((est.value - 0.5).abs() < 1e-8);
    }
}
