//! Circular width estimation, Lorentzian line shapes and their fits.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use rand::Rng;
use thiserror::Error;

use crate::rng::sample_stream;
use crate::{wrap_angle, WIDTH_FRACTION};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistributionError {
    #[error("sample is empty")]
    Empty,
    #[error("values and weights differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("weights must be finite and nonnegative")]
    BadWeight,
    #[error("total weight is zero")]
    ZeroWeight,
    #[error("non-finite angle")]
    NonFinite,
    #[error("gamma must be positive, got {0}")]
    BadGamma(f64),
    #[error("need at least {needed} bins with positive mass, found {found}")]
    TooFewBins { needed: usize, found: usize },
    #[error("fit did not converge after {iterations} iterations (best gamma {}, rms {})", best.gamma, best.rms_residual)]
    FitNotConverged { iterations: usize, best: LorentzFit },
}

/// Angles on the circle carrying nonnegative weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedCircularSample {
    values: Vec<f64>,
    weights: Vec<f64>,
    total: f64,
}

impl WeightedCircularSample {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self, DistributionError> {
        if values.len() != weights.len() {
            return Err(DistributionError::LengthMismatch(
                values.len(),
                weights.len(),
            ));
        }
        if values.is_empty() {
            return Err(DistributionError::Empty);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(DistributionError::NonFinite);
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(DistributionError::BadWeight);
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(DistributionError::ZeroWeight);
        }
        Ok(Self {
            values: values.into_iter().map(wrap_angle).collect(),
            weights,
            total,
        })
    }

    /// Equal weights.
    pub fn unweighted(values: Vec<f64>) -> Result<Self, DistributionError> {
        let w = vec![1.0; values.len()];
        Self::new(values, w)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `arg Σ w e^{iω}`.
    pub fn circular_mean(&self) -> f64 {
        let z: Complex64 = self
            .values
            .iter()
            .zip(&self.weights)
            .map(|(&v, &w)| Complex64::from_polar(w, v))
            .sum();
        wrap_angle(z.arg())
    }
}

/// Smallest `s` such that the weight within `s` of the circular mean reaches
/// `fraction` of the total (exact weighted quantile, boundary included).
pub fn width_fraction(sample: &WeightedCircularSample, fraction: f64) -> f64 {
    let mu = sample.circular_mean();
    let mut dev: Vec<(f64, f64)> = sample
        .values
        .iter()
        .zip(&sample.weights)
        .map(|(&v, &w)| (wrap_angle(v - mu).abs(), w))
        .collect();
    dev.sort_by(|a, b| a.0.total_cmp(&b.0));
    let target = fraction * sample.total;
    let mut acc = 0.0;
    for &(d, w) in &dev {
        acc += w;
        if acc >= target * (1.0 - 1e-12) {
            return d;
        }
    }
    dev.last().map_or(0.0, |x| x.0)
}

/// Half-width of the interval around the circular mean holding 70% of the weight.
pub fn width_70(sample: &WeightedCircularSample) -> f64 {
    width_fraction(sample, WIDTH_FRACTION)
}

/// Lorentzian (Breit–Wigner) parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzianParams {
    gamma: f64,
    center: f64,
}

impl LorentzianParams {
    pub fn new(gamma: f64, center: f64) -> Result<Self, DistributionError> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(DistributionError::BadGamma(gamma));
        }
        Ok(Self { gamma, center })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn center(&self) -> f64 {
        self.center
    }
}

/// `γ / [π ((ω − c)² + γ²)]`.
pub fn lorentzian_pdf(params: &LorentzianParams, omega: f64) -> f64 {
    let d = omega - params.center;
    params.gamma / (PI * (d * d + params.gamma * params.gamma))
}

/// Lorentzian summed over all `2π` images, `(1/2π) sinh γ / (cosh γ − cos ω)`.
pub fn periodized_lorentzian_pdf(gamma: f64, omega: f64) -> f64 {
    let e = (-gamma).exp();
    let a = (-gamma).exp_m1();
    let s = (0.5 * omega).sin();
    -(-2.0 * gamma).exp_m1() / (TAU * (a * a + 4.0 * e * s * s))
}

/// `P(−π ≤ ω ≤ x)` for the periodized Lorentzian centered at zero, `x ∈ [−π, π]`.
pub fn periodized_lorentzian_cdf(gamma: f64, x: f64) -> f64 {
    if x <= -PI {
        return 0.0;
    }
    if x >= PI {
        return 1.0;
    }
    0.5 + (((0.5 * x).tan()) / (0.5 * gamma).tanh()).atan() / PI
}

/// Cumulative mass on the real line, continued across images so that
/// `G(x + 2π) = G(x) + 1`.
fn unwrapped_cdf(gamma: f64, x: f64) -> f64 {
    let k = ((x + PI) / TAU).floor();
    let r = x - k * TAU;
    k + periodized_lorentzian_cdf(gamma, r)
}

/// Mass of the arc `[a, b]` (`b ≥ a`) under the periodized Lorentzian centered at `center`.
pub fn periodized_lorentzian_mass(gamma: f64, center: f64, a: f64, b: f64) -> f64 {
    unwrapped_cdf(gamma, b - center) - unwrapped_cdf(gamma, a - center)
}

/// `P(|ω| ≤ s)` for the periodized Lorentzian centered at zero.
pub fn periodized_lorentzian_central_mass(gamma: f64, s: f64) -> f64 {
    if s >= PI {
        return 1.0;
    }
    (2.0 / PI) * ((0.5 * s).tan() / (0.5 * gamma).tanh()).atan()
}

/// 70% half-width of the periodized Lorentzian, by bisection on its CDF.
pub fn periodized_width_exact(gamma: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, PI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if periodized_lorentzian_central_mass(gamma, mid) < WIDTH_FRACTION {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Closed form of [`periodized_width_exact`], `2 arctan(tanh(γ/2) tan(0.35π))`.
pub fn periodized_width_closed(gamma: f64) -> f64 {
    2.0 * ((0.5 * gamma).tanh() * (WIDTH_FRACTION * FRAC_PI_2).tan()).atan()
}

/// Inverse of [`periodized_width_closed`]; `None` at or beyond saturation.
pub fn gamma_from_periodized_width(width: f64) -> Option<f64> {
    if !(width >= 0.0) {
        return None;
    }
    let t = (0.5 * width).tan() / (WIDTH_FRACTION * FRAC_PI_2).tan();
    if t >= 1.0 {
        return None;
    }
    Some(2.0 * t.atanh())
}

/// `count` Lorentzian draws (inverse CDF) wrapped onto `[−π, π)`.
pub fn sample_wrapped_lorentzian(gamma: f64, count: usize, seed: u64) -> Vec<f64> {
    let mut rng = sample_stream(seed, 0);
    (0..count)
        .map(|_| {
            let u: f64 = rng.random();
            wrap_angle(gamma * (PI * (u - 0.5)).tan())
        })
        .collect()
}

/// Default bin count for histograms.
pub const DEFAULT_BINS: usize = 256;

/// Normalized histogram on `[−π, π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedHistogram {
    /// Bin centers.
    pub centers: Vec<f64>,
    /// Probability density per bin (mass over total weight over bin width).
    pub density: Vec<f64>,
}

impl WeightedHistogram {
    pub fn from_sample(sample: &WeightedCircularSample, bins: usize) -> Self {
        let bins = bins.max(1);
        let width = TAU / bins as f64;
        let mut mass = vec![0.0; bins];
        for (&v, &w) in sample.values.iter().zip(&sample.weights) {
            let idx = (((v + PI) / width) as usize).min(bins - 1);
            mass[idx] += w;
        }
        let norm = sample.total * width;
        Self {
            centers: (0..bins).map(|i| -PI + (i as f64 + 0.5) * width).collect(),
            density: mass.into_iter().map(|m| m / norm).collect(),
        }
    }

    /// Exact bin-averaged density of a periodized Lorentzian.
    pub fn from_periodized_lorentzian(gamma: f64, center: f64, bins: usize) -> Self {
        let width = TAU / bins as f64;
        let centers: Vec<f64> = (0..bins).map(|i| -PI + (i as f64 + 0.5) * width).collect();
        let density = centers
            .iter()
            .map(|&c| {
                periodized_lorentzian_mass(gamma, center, c - 0.5 * width, c + 0.5 * width) / width
            })
            .collect();
        Self { centers, density }
    }

    pub fn bin_width(&self) -> f64 {
        TAU / self.centers.len() as f64
    }

    pub fn peak(&self) -> f64 {
        self.density.iter().copied().fold(0.0, f64::max)
    }
}

/// Result of a periodized-Lorentzian fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzFit {
    pub gamma: f64,
    pub center: f64,
    /// Root-mean-square density residual over bins.
    pub rms_residual: f64,
    pub iterations: usize,
}

/// Largest `γ` the fit will report; beyond it the shape is flat to double precision.
pub const FIT_GAMMA_MAX: f64 = 50.0;

const FIT_MAX_ITER: usize = 200;

struct FitModel<'a> {
    hist: &'a WeightedHistogram,
    half: f64,
}

impl FitModel<'_> {
    // residuals and Jacobian columns w.r.t. (ln γ, center)
    fn eval(
        &self,
        log_gamma: f64,
        center: f64,
        jac: Option<(&mut [f64], &mut [f64])>,
    ) -> (Vec<f64>, f64) {
        let gamma = log_gamma.exp();
        let h = self.half;
        let bw = 2.0 * h;
        let mut res = Vec::with_capacity(self.hist.centers.len());
        let mut cost = 0.0;
        for (&c, &d) in self.hist.centers.iter().zip(&self.hist.density) {
            let model = periodized_lorentzian_mass(gamma, center, c - h, c + h) / bw;
            let r = model - d;
            cost += r * r;
            res.push(r);
        }
        if let Some((jg, jc)) = jac {
            let coth_rate = -0.5 / (0.5 * gamma).sinh().powi(2);
            let dcdf = |x: f64| -> f64 {
                // ∂/∂γ of the CDF at offset x
                let r = wrap_angle(x);
                let t = (0.5 * r).tan();
                if !t.is_finite() {
                    return 0.0;
                }
                let k = 1.0 / (0.5 * gamma).tanh();
                t * coth_rate / (PI * (1.0 + k * k * t * t))
            };
            for (i, &c) in self.hist.centers.iter().enumerate() {
                let (a, b) = (c - h - center, c + h - center);
                jg[i] = gamma * (dcdf(b) - dcdf(a)) / bw;
                jc[i] = -(periodized_lorentzian_pdf(gamma, b)
                    - periodized_lorentzian_pdf(gamma, a))
                    / bw;
            }
        }
        (res, cost)
    }
}

/// Least-squares fit of the bin-averaged periodized Lorentzian to a normalized histogram.
///
/// Levenberg–Marquardt in `(ln γ, center)`, all bins weighted equally.
pub fn fit_periodized_lorentzian(
    hist: &WeightedHistogram,
    init_gamma: f64,
) -> Result<LorentzFit, DistributionError> {
    let positive = hist.density.iter().filter(|&&d| d > 0.0).count();
    if positive < 8 {
        return Err(DistributionError::TooFewBins {
            needed: 8,
            found: positive,
        });
    }
    if !(init_gamma > 0.0) {
        return Err(DistributionError::BadGamma(init_gamma));
    }
    let model = FitModel {
        hist,
        half: 0.5 * hist.bin_width(),
    };
    let n = hist.centers.len();
    let z: Complex64 = hist
        .centers
        .iter()
        .zip(&hist.density)
        .map(|(&c, &d)| Complex64::from_polar(d, c))
        .sum();
    let mut theta = [init_gamma.min(FIT_GAMMA_MAX).ln(), wrap_angle(z.arg())];
    let max_log = FIT_GAMMA_MAX.ln();
    let mut jg = vec![0.0; n];
    let mut jc = vec![0.0; n];
    let (mut res, mut cost) = model.eval(theta[0], theta[1], Some((&mut jg, &mut jc)));
    let mut lambda = 1e-3;
    let rms = |cost: f64| (cost / n as f64).sqrt();
    for iter in 1..=FIT_MAX_ITER {
        let (mut a11, mut a12, mut a22, mut g1, mut g2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..n {
            a11 += jg[i] * jg[i];
            a12 += jg[i] * jc[i];
            a22 += jc[i] * jc[i];
            g1 += jg[i] * res[i];
            g2 += jc[i] * res[i];
        }
        let mut accepted = false;
        for _ in 0..40 {
            let b11 = a11 * (1.0 + lambda) + 1e-300;
            let b22 = a22 * (1.0 + lambda) + 1e-300;
            let det = b11 * b22 - a12 * a12;
            let d1 = -(b22 * g1 - a12 * g2) / det;
            let d2 = -(b11 * g2 - a12 * g1) / det;
            let cand = [(theta[0] + d1).min(max_log), wrap_angle(theta[1] + d2)];
            let (r_new, c_new) = model.eval(cand[0], cand[1], None);
            if c_new.is_finite() && c_new <= cost {
                let improvement = cost - c_new;
                let step = d1.abs().max(d2.abs());
                theta = cand;
                res = r_new;
                cost = c_new;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                if improvement <= 1e-14 * cost.max(1e-300) || step < 1e-12 {
                    return Ok(LorentzFit {
                        gamma: theta[0].exp(),
                        center: theta[1],
                        rms_residual: rms(cost),
                        iterations: iter,
                    });
                }
                model.eval(theta[0], theta[1], Some((&mut jg, &mut jc)));
                break;
            }
            lambda *= 3.0;
        }
        if !accepted {
            // no descent direction left: converged to numerical precision
            return Ok(LorentzFit {
                gamma: theta[0].exp(),
                center: theta[1],
                rms_residual: rms(cost),
                iterations: iter,
            });
        }
    }
    Err(DistributionError::FitNotConverged {
        iterations: FIT_MAX_ITER,
        best: LorentzFit {
            gamma: theta[0].exp(),
            center: theta[1],
            rms_residual: rms(cost),
            iterations: FIT_MAX_ITER,
        },
    })
}

/// A density sampled on the circle at `ω_k = wrap(kΔ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircularGrid {
    pub omegas: Vec<f64>,
    pub density: Vec<f64>,
}

/// Bin masses of a zero-centered periodized Lorentzian on bins centered at `kΔ`.
fn centered_masses(gamma: f64, size: usize) -> Vec<f64> {
    let step = TAU / size as f64;
    (0..size)
        .map(|k| {
            let c = wrap_angle(k as f64 * step);
            periodized_lorentzian_mass(gamma, 0.0, c - 0.5 * step, c + 0.5 * step)
        })
        .collect()
}

/// Minimum grid size for [`convolve_circular`].
pub const MIN_CONVOLUTION_GRID: usize = 1 << 12;

/// Circular convolution of two zero-centered periodized Lorentzians on a
/// uniform grid of at least [`MIN_CONVOLUTION_GRID`] points.
pub fn convolve_circular(f: &LorentzianParams, g: &LorentzianParams, grid: usize) -> CircularGrid {
    let size = grid.max(MIN_CONVOLUTION_GRID);
    let step = TAU / size as f64;
    let mf = centered_masses(f.gamma(), size);
    let mg = centered_masses(g.gamma(), size);
    let mut out = vec![0.0; size];
    for (j, &a) in mf.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        for (l, &b) in mg.iter().enumerate() {
            out[(j + l) % size] += a * b;
        }
    }
    CircularGrid {
        omegas: (0..size).map(|k| wrap_angle(k as f64 * step)).collect(),
        density: out.into_iter().map(|m| m / step).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{midpoint, QuadratureOptions};
    use proptest::prelude::*;

    #[test]
    fn single_atom_has_zero_width() {
        let s = WeightedCircularSample::new(vec![1.3], vec![2.0]).unwrap();
        assert_eq!(width_70(&s), 0.0);
    }

    #[test]
    fn uniform_grid_width() {
        let m = 100_000;
        let vals: Vec<f64> = (0..m).map(|i| -PI + TAU * i as f64 / m as f64).collect();
        let s = WeightedCircularSample::unweighted(vals).unwrap();
        assert!((width_70(&s) / (0.7 * PI) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn lorentzian_sample_width() {
        let gamma = 0.1;
        let s = WeightedCircularSample::unweighted(sample_wrapped_lorentzian(gamma, 1_000_000, 3))
            .unwrap();
        let w = width_70(&s);
        assert!((w / (1.962_61 * gamma) - 1.0).abs() < 0.01, "{w}");
    }

    #[test]
    fn invalid_samples() {
        assert!(WeightedCircularSample::new(vec![], vec![]).is_err());
        assert!(WeightedCircularSample::new(vec![0.0], vec![0.0]).is_err());
        assert!(WeightedCircularSample::new(vec![0.0], vec![-1.0]).is_err());
        assert!(WeightedCircularSample::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(WeightedCircularSample::new(vec![f64::NAN], vec![1.0]).is_err());
    }

    #[test]
    fn lorentzian_basics() {
        let p = LorentzianParams::new(0.4, 0.2).unwrap();
        assert!((lorentzian_pdf(&p, 0.2) - 1.0 / (PI * 0.4)).abs() < 1e-15);
        assert!((lorentzian_pdf(&p, 0.6) - 0.5 / (PI * 0.4)).abs() < 1e-15);
        let opts = QuadratureOptions {
            abs_tol: 1e-9,
            ..Default::default()
        };
        let total = midpoint(|x: f64| lorentzian_pdf(&p, x), -2000.0, 2000.0, &opts)
            .unwrap()
            .value;
        assert!(total >= 0.999);
        assert!(LorentzianParams::new(0.0, 0.0).is_err());
    }

    #[test]
    fn periodized_matches_image_sum() {
        let direct = (1.0f64).sinh() / ((1.0f64).cosh() - 1.0) / TAU;
        assert!((periodized_lorentzian_pdf(1.0, 0.0) - direct).abs() < 1e-14);
        assert!((direct - 0.3444).abs() < 1e-4);
        for &(g, w) in &[(1.0, 0.0), (0.3, 1.0), (0.05, -2.5), (2.0, 3.0)] {
            let p = LorentzianParams::new(g, 0.0).unwrap();
            let images: f64 = (-10_000i64..=10_000)
                .map(|j| lorentzian_pdf(&p, w - TAU * j as f64))
                .sum();
            // tail beyond J images is about γ/(π² J)
            let bound = g / (PI * PI * 10_000.0);
            assert!(
                (images - periodized_lorentzian_pdf(g, w)).abs() <= bound,
                "{g} {w}"
            );
        }
    }

    #[test]
    fn periodized_normalization_and_limit() {
        let opts = QuadratureOptions {
            abs_tol: 1e-12,
            ..Default::default()
        };
        for &g in &[0.05, 0.3, 2.0] {
            let total = midpoint(|x: f64| periodized_lorentzian_pdf(g, x), -PI, PI, &opts)
                .unwrap()
                .value;
            assert!((total - 1.0).abs() < 1e-8);
        }
        let vals: Vec<f64> = (0..1000)
            .map(|i| periodized_lorentzian_pdf(40.0, -PI + TAU * i as f64 / 1000.0))
            .collect();
        let spread = vals.iter().copied().fold(f64::MIN, f64::max)
            - vals.iter().copied().fold(f64::MAX, f64::min);
        assert!(spread < 1e-6);
        assert!((vals[0] - 1.0 / TAU).abs() < 1e-6);
    }

    #[test]
    fn cdf_consistency() {
        let opts = QuadratureOptions {
            abs_tol: 1e-12,
            ..Default::default()
        };
        for &g in &[0.1, 0.7] {
            for &x in &[-2.0, -0.1, 0.4, 3.0] {
                let num = midpoint(|t: f64| periodized_lorentzian_pdf(g, t), -PI, x, &opts)
                    .unwrap()
                    .value;
                assert!((num - periodized_lorentzian_cdf(g, x)).abs() < 1e-10);
            }
            let m = periodized_lorentzian_mass(g, 3.0, 2.5, 3.5);
            let direct = periodized_lorentzian_central_mass(g, 0.5);
            assert!((m - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn exact_width_matches_closed_form() {
        for &g in &[1e-4, 0.01, 0.1, 0.3, 1.0, 3.0, 10.0, 40.0] {
            assert!(
                (periodized_width_exact(g) - periodized_width_closed(g)).abs() < 1e-9,
                "{g}"
            );
            let back = gamma_from_periodized_width(periodized_width_closed(g));
            if g < 10.0 {
                assert!((back.unwrap() / g - 1.0).abs() < 1e-8);
            }
        }
        assert!((periodized_width_exact(1e-6) / 1e-6 - 1.962_61).abs() < 1e-4);
        assert!((periodized_width_exact(40.0) - 0.7 * PI).abs() < 1e-3);
        assert!(gamma_from_periodized_width(0.7 * PI).is_none());
    }

    #[test]
    fn fit_recovers_synthetic_gamma() {
        let h = WeightedHistogram::from_periodized_lorentzian(0.3, 0.1, DEFAULT_BINS);
        let fit = fit_periodized_lorentzian(&h, 1.0).unwrap();
        assert!((fit.gamma / 0.3 - 1.0).abs() < 0.02);
        assert!((fit.center - 0.1).abs() < 1e-6);
        assert!(fit.rms_residual < 1e-8);
    }

    #[test]
    fn fit_on_sampled_histogram() {
        let s =
            WeightedCircularSample::unweighted(sample_wrapped_lorentzian(0.3, 200_000, 8)).unwrap();
        let h = WeightedHistogram::from_sample(&s, DEFAULT_BINS);
        let fit = fit_periodized_lorentzian(&h, 0.1).unwrap();
        assert!((fit.gamma / 0.3 - 1.0).abs() < 0.02, "{}", fit.gamma);
    }

    #[test]
    fn fit_of_uniform_histogram_saturates() {
        let h = WeightedHistogram {
            centers: (0..DEFAULT_BINS)
                .map(|i| -PI + (i as f64 + 0.5) * TAU / DEFAULT_BINS as f64)
                .collect(),
            density: vec![1.0 / TAU; DEFAULT_BINS],
        };
        let fit = fit_periodized_lorentzian(&h, 1.0).unwrap();
        assert!(fit.rms_residual < 1e-3);
        assert!(fit.gamma > 5.0);
        let narrow = WeightedHistogram::from_periodized_lorentzian(0.2, 0.0, DEFAULT_BINS);
        let mut bad = narrow.clone();
        bad.density
            .iter_mut()
            .enumerate()
            .for_each(|(i, d)| *d = if i < 4 { 1.0 } else { 0.0 });
        assert!(matches!(
            fit_periodized_lorentzian(&bad, 0.2),
            Err(DistributionError::TooFewBins { .. })
        ));
    }

    #[test]
    fn convolution_adds_gammas() {
        let a = LorentzianParams::new(0.1, 0.0).unwrap();
        let b = LorentzianParams::new(0.2, 0.0).unwrap();
        let conv = convolve_circular(&a, &b, MIN_CONVOLUTION_GRID);
        let sup = conv
            .omegas
            .iter()
            .zip(&conv.density)
            .map(|(&w, &d)| (d - periodized_lorentzian_pdf(0.3, w)).abs())
            .fold(0.0, f64::max);
        assert!(sup < 1e-3, "{sup}");
        let rev = convolve_circular(&b, &a, MIN_CONVOLUTION_GRID);
        for (x, y) in conv.density.iter().zip(&rev.density) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
        let s = WeightedCircularSample::new(conv.omegas.clone(), conv.density.clone()).unwrap();
        let w = width_70(&s);
        assert!((w - periodized_width_closed(0.3)).abs() < 2.0 * TAU / MIN_CONVOLUTION_GRID as f64);
    }

    #[test]
    fn near_delta_convolution_is_identity() {
        let a = LorentzianParams::new(0.25, 0.0).unwrap();
        let d = LorentzianParams::new(1e-6, 0.0).unwrap();
        let conv = convolve_circular(&a, &d, MIN_CONVOLUTION_GRID);
        let sup = conv
            .omegas
            .iter()
            .zip(&conv.density)
            .map(|(&w, &x)| (x - periodized_lorentzian_pdf(0.25, w)).abs())
            .fold(0.0, f64::max);
        assert!(sup < 1e-3, "{sup}");
    }

    proptest! {
        #[test]
        fn width_is_rotation_invariant(
            vals in proptest::collection::vec(-3.0f64..3.0, 3..60),
            shift in -3.0f64..3.0,
        ) {
            let w: Vec<f64> = (0..vals.len()).map(|i| 1.0 + (i % 3) as f64).collect();
            let a = WeightedCircularSample::new(vals.clone(), w.clone()).unwrap();
            let b = WeightedCircularSample::new(vals.iter().map(|v| v + shift).collect(), w).unwrap();
            prop_assert!((width_70(&a) - width_70(&b)).abs() < 1e-9);
        }

        #[test]
        fn width_is_scale_invariant(
            vals in proptest::collection::vec(-3.0f64..3.0, 3..60),
            scale in 1e-3f64..1e3,
        ) {
            let w: Vec<f64> = (0..vals.len()).map(|i| 0.5 + (i % 5) as f64).collect();
            let a = WeightedCircularSample::new(vals.clone(), w.clone()).unwrap();
            let b = WeightedCircularSample::new(vals, w.iter().map(|x| x * scale).collect()).unwrap();
            prop_assert!((width_70(&a) - width_70(&b)).abs() < 1e-12);
        }
    }
}
