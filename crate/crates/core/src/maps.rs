//! Classical perturbed cat map on the unit torus.
//!
//! The unperturbed map is the hyperbolic automorphism
//! `(q, p) -> (2q + p, 3q + 2p) mod 1`. Perturbations are nonlinear kicks
//! applied after the linear step, at the updated coordinates:
//!
//! * a momentum kick `p -> p + ε(q)` with `ε = -dV/dq`,
//! * optionally a position kick `q -> q + ε̄(p)` with `ε̄ = dT/dp`.
//!
//! Both kicks are generated by potentials (`V` and `T`), so the composition is
//! area preserving and the one-step action difference between two strengths is
//! `-(δV(q) + δT(p))` at the kick point.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use thiserror::Error;

/// Errors raised by the classical map.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MapError {
    #[error("invalid perturbation: {0}")]
    InvalidSpec(&'static str),
    #[error("period {0} is too large: |det(M^n - I)| overflows")]
    PeriodOverflow(u32),
    #[error("period must be at least 1")]
    ZeroPeriod,
    #[error("Hilbert-space dimension must be positive")]
    ZeroDimension,
}

/// Reduces `x` into `[0, 1)`.
#[inline]
pub fn wrap_unit(x: f64) -> f64 {
    let y = x - x.floor();
    // x = -1e-18 gives y = 1.0 after rounding.
    if y >= 1.0 {
        0.0
    } else {
        y
    }
}

/// Signed shortest displacement between two torus coordinates, in `[-1/2, 1/2)`.
#[inline]
pub fn torus_delta(a: f64, b: f64) -> f64 {
    let d = a - b;
    d - (d + 0.5).floor()
}

/// A point on the unit torus. Coordinates are always reduced into `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusPoint {
    q: f64,
    p: f64,
}

impl TorusPoint {
    pub fn new(q: f64, p: f64) -> Self {
        Self {
            q: wrap_unit(q),
            p: wrap_unit(p),
        }
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Euclidean distance with the flat torus metric.
    pub fn distance(&self, other: &TorusPoint) -> f64 {
        let dq = torus_delta(self.q, other.q);
        let dp = torus_delta(self.p, other.p);
        dq.hypot(dp)
    }
}

/// Which shears make up the perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ShearKind {
    /// `p -> p + ε(q, k)` only.
    MomentumShear,
    /// Momentum shear followed by `q -> q + ε̄(p, k)`.
    MomentumPlusPositionShear,
}

/// How a local window reshapes the momentum shear.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum WindowMode {
    /// Shear profile stretched onto the window, `u = (q - q0)/β`; vanishes at both edges.
    #[default]
    Rescaled,
    /// Global profile cut off outside the window.
    Truncated,
}

/// Region of position space where the momentum shear acts.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Window {
    Global,
    Local { q0: f64, beta: f64 },
}

/// Shear type, strength and window of a cat-map perturbation.
///
/// This is the single source of truth for the kick `ε`, its potential `V`
/// and the action difference used by every other module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    kind: ShearKind,
    k: f64,
    window: Window,
    mode: WindowMode,
}

const WINDOW_SLACK: f64 = 1e-12;

impl PerturbationSpec {
    pub fn new(
        kind: ShearKind,
        k: f64,
        window: Window,
        mode: WindowMode,
    ) -> Result<Self, MapError> {
        if !k.is_finite() {
            return Err(MapError::InvalidSpec("strength must be finite"));
        }
        if let Window::Local { q0, beta } = window {
            if !(0.0..1.0).contains(&q0) {
                return Err(MapError::InvalidSpec("window start q0 must lie in [0, 1)"));
            }
            if !(beta > 0.0 && beta <= 1.0) {
                return Err(MapError::InvalidSpec(
                    "window width beta must lie in (0, 1]",
                ));
            }
            if q0 + beta > 1.0 + WINDOW_SLACK {
                return Err(MapError::InvalidSpec("window must satisfy q0 + beta <= 1"));
            }
            if kind == ShearKind::MomentumPlusPositionShear {
                return Err(MapError::InvalidSpec(
                    "the two-shear perturbation is only defined globally",
                ));
            }
        }
        Ok(Self {
            kind,
            k,
            window,
            mode,
        })
    }

    /// Global momentum shear of strength `k`.
    pub fn global(kind: ShearKind, k: f64) -> Result<Self, MapError> {
        Self::new(kind, k, Window::Global, WindowMode::Rescaled)
    }

    /// Momentum shear restricted to `[q0, q0 + beta)`.
    pub fn local(k: f64, q0: f64, beta: f64, mode: WindowMode) -> Result<Self, MapError> {
        Self::new(
            ShearKind::MomentumShear,
            k,
            Window::Local { q0, beta },
            mode,
        )
    }

    /// Same shape with a different strength.
    pub fn with_strength(&self, k: f64) -> Self {
        Self { k, ..*self }
    }

    pub fn kind(&self) -> ShearKind {
        self.kind
    }

    pub fn strength(&self) -> f64 {
        self.k
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn mode(&self) -> WindowMode {
        self.mode
    }

    /// Phase-space area of the perturbed region (`β` for a local window, 1 otherwise).
    pub fn area(&self) -> f64 {
        match self.window {
            Window::Global => 1.0,
            Window::Local { beta, .. } => beta,
        }
    }

    /// Position interval `[start, end]` of the perturbed region.
    pub fn q_range(&self) -> (f64, f64) {
        match self.window {
            Window::Global => (0.0, 1.0),
            Window::Local { q0, beta } => (q0, (q0 + beta).min(1.0)),
        }
    }

    fn window_coordinate(&self, q: f64) -> Option<(f64, f64)> {
        match self.window {
            Window::Global => Some((q, 1.0)),
            Window::Local { q0, beta } => {
                if q >= q0 && q < q0 + beta {
                    Some(((q - q0) / beta, beta))
                } else {
                    None
                }
            }
        }
    }

    /// Momentum shear `ε(q)`.
    pub fn shear_momentum(&self, q: f64) -> f64 {
        let q = wrap_unit(q);
        let Some((u, _)) = self.window_coordinate(q) else {
            return 0.0;
        };
        let arg = match self.mode {
            WindowMode::Rescaled => u,
            WindowMode::Truncated => q,
        };
        (self.k / (2.0 * PI)) * ((2.0 * PI * arg).cos() - (4.0 * PI * arg).cos())
    }

    /// Kick potential `V(q)` with `-dV/dq = ε`.
    ///
    /// Continuous and periodic for the global and rescaled forms. In truncated
    /// mode `V` is zero left of the window and constant right of it, so it can
    /// jump across `q = 0` when the shear has a net integral over the window.
    pub fn kick_potential(&self, q: f64) -> f64 {
        let q = wrap_unit(q);
        let global = |x: f64, k: f64| -> f64 {
            -(k / (4.0 * PI * PI)) * ((2.0 * PI * x).sin() - 0.5 * (4.0 * PI * x).sin())
        };
        match (self.window, self.mode) {
            (Window::Global, _) => global(q, self.k),
            (Window::Local { q0, beta }, WindowMode::Rescaled) => {
                if q >= q0 && q < q0 + beta {
                    beta * global((q - q0) / beta, self.k)
                } else {
                    0.0
                }
            }
            (Window::Local { q0, beta }, WindowMode::Truncated) => {
                if q < q0 {
                    0.0
                } else {
                    global(q.min(q0 + beta), self.k) - global(q0, self.k)
                }
            }
        }
    }

    /// Position shear `ε̄(p)`; zero for the momentum-only perturbation.
    pub fn shear_position(&self, p: f64) -> f64 {
        match self.kind {
            ShearKind::MomentumShear => 0.0,
            ShearKind::MomentumPlusPositionShear => {
                let p = wrap_unit(p);
                -(self.k / (2.0 * PI)) * ((6.0 * PI * p).sin() / 3.0 + 0.5 * (4.0 * PI * p).cos())
            }
        }
    }

    /// Drift potential `T(p)` with `dT/dp = ε̄`; zero for the momentum-only perturbation.
    pub fn drift_potential(&self, p: f64) -> f64 {
        match self.kind {
            ShearKind::MomentumShear => 0.0,
            ShearKind::MomentumPlusPositionShear => {
                let p = wrap_unit(p);
                (self.k / (4.0 * PI * PI))
                    * ((6.0 * PI * p).cos() / 9.0 - 0.25 * (4.0 * PI * p).sin())
            }
        }
    }

    /// Action difference between strengths `k + δk` and `k` for one map step,
    /// evaluated at the kick point: `q` where the momentum kick acts and `p`
    /// where the position kick acts.
    ///
    /// The potentials are linear in the strength, so this is independent of `k`.
    pub fn action_diff_one_step(&self, kick_point: TorusPoint, delta_k: f64) -> f64 {
        let delta = self.with_strength(delta_k);
        -(delta.kick_potential(kick_point.q) + delta.drift_potential(kick_point.p))
    }

    fn kick(&self, q: f64, p: f64) -> (f64, f64) {
        let p = wrap_unit(p + self.shear_momentum(q));
        let q = match self.kind {
            ShearKind::MomentumShear => q,
            ShearKind::MomentumPlusPositionShear => wrap_unit(q + self.shear_position(p)),
        };
        (q, p)
    }
}

/// Hilbert-space dimension and the matching effective Planck constant, `2πħ = 1/N`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectivePlanck {
    n: usize,
    hbar: f64,
}

impl EffectivePlanck {
    pub fn new(n: usize) -> Result<Self, MapError> {
        if n == 0 {
            return Err(MapError::ZeroDimension);
        }
        Ok(Self {
            n,
            hbar: 1.0 / (2.0 * PI * n as f64),
        })
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Converts an action to a phase, `S/ħ`.
    pub fn phase(&self, action: f64) -> f64 {
        2.0 * PI * self.n as f64 * action
    }
}

#[inline]
fn cat_step(q: f64, p: f64) -> (f64, f64) {
    (wrap_unit(2.0 * q + p), wrap_unit(3.0 * q + 2.0 * p))
}

/// One iteration of the (possibly perturbed) cat map.
pub fn evolve(point: TorusPoint, spec: Option<&PerturbationSpec>) -> TorusPoint {
    let (q, p) = cat_step(point.q, point.p);
    match spec {
        None => TorusPoint { q, p },
        Some(spec) => {
            let (q, p) = spec.kick(q, p);
            TorusPoint { q, p }
        }
    }
}

/// One iteration returning `(next point, kick point)`.
///
/// The kick point holds the position at which the momentum kick was
/// evaluated and the momentum at which the position kick was evaluated; it is
/// the argument expected by [`PerturbationSpec::action_diff_one_step`].
pub fn step_with_kick(point: TorusPoint, spec: &PerturbationSpec) -> (TorusPoint, TorusPoint) {
    let (q, p) = cat_step(point.q, point.p);
    let p_kicked = wrap_unit(p + spec.shear_momentum(q));
    let kick_point = TorusPoint { q, p: p_kicked };
    let q_final = match spec.kind {
        ShearKind::MomentumShear => q,
        ShearKind::MomentumPlusPositionShear => wrap_unit(q + spec.shear_position(p_kicked)),
    };
    (
        TorusPoint {
            q: q_final,
            p: p_kicked,
        },
        kick_point,
    )
}

/// The cat-map matrix `[[2, 1], [3, 2]]`.
pub const CAT_MATRIX: [[i64; 2]; 2] = [[2, 1], [3, 2]];

type IMat = [[i128; 2]; 2];

fn checked_mul(a: &IMat, b: &IMat) -> Option<IMat> {
    let mut out = [[0i128; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let x = a[i][0].checked_mul(b[0][j])?;
            let y = a[i][1].checked_mul(b[1][j])?;
            out[i][j] = x.checked_add(y)?;
        }
    }
    Some(out)
}

/// `Mⁿ` in exact integer arithmetic.
pub fn cat_matrix_power(n: u32) -> Result<[[i128; 2]; 2], MapError> {
    let m: IMat = [[2, 1], [3, 2]];
    let mut acc: IMat = [[1, 0], [0, 1]];
    for _ in 0..n {
        acc = checked_mul(&acc, &m).ok_or(MapError::PeriodOverflow(n))?;
    }
    Ok(acc)
}

/// `|det(Mⁿ - I)|`, the number of fixed points of the n-fold map.
pub fn fixed_point_count(n: u32) -> Result<u64, MapError> {
    if n == 0 {
        return Err(MapError::ZeroPeriod);
    }
    let m = cat_matrix_power(n)?;
    let a = m[0][0] - 1;
    let d = m[1][1] - 1;
    let det = a
        .checked_mul(d)
        .and_then(|x| x.checked_sub(m[0][1].checked_mul(m[1][0])?))
        .ok_or(MapError::PeriodOverflow(n))?;
    u64::try_from(det.unsigned_abs()).map_err(|_| MapError::PeriodOverflow(n))
}

/// A torus point with rational coordinates `(q_num/den, p_num/den)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalPoint {
    pub q_num: u64,
    pub p_num: u64,
    pub den: u64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl RationalPoint {
    /// Lowest-terms representative (common denominator of both coordinates).
    pub fn reduced(self) -> Self {
        let g = gcd(gcd(self.q_num, self.p_num), self.den);
        Self {
            q_num: self.q_num / g,
            p_num: self.p_num / g,
            den: self.den / g,
        }
    }

    pub fn to_point(&self) -> TorusPoint {
        TorusPoint::new(
            self.q_num as f64 / self.den as f64,
            self.p_num as f64 / self.den as f64,
        )
    }

    /// Exact image under the unperturbed cat map.
    pub fn cat_image(&self) -> Self {
        let d = self.den as u128;
        let q = self.q_num as u128;
        let p = self.p_num as u128;
        Self {
            q_num: ((2 * q + p) % d) as u64,
            p_num: ((3 * q + 2 * p) % d) as u64,
            den: self.den,
        }
    }
}

/// Fixed points of `Mⁿ`, possibly truncated at a cap.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicPoints {
    pub period: u32,
    pub points: Vec<RationalPoint>,
    /// `|det(Mⁿ - I)|`.
    pub total: u64,
    /// `true` when `points` holds fewer than `total` entries because of the cap.
    pub truncated: bool,
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    // returns (g, s, t) with s*a + t*b = g >= 0
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let qt = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
        (old_t, t) = (t, old_t - qt * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// Lower-triangular basis `[(h11, h21), (0, h22)]` of the lattice spanned by `gens`.
fn lattice_basis(gens: &[(i128, i128)]) -> (i128, i128, i128) {
    let mut pivot = (0i128, 0i128);
    let mut h22 = 0i128;
    for &(c, d) in gens {
        let (a, b) = pivot;
        if c == 0 {
            h22 = ext_gcd(h22, d).0;
            continue;
        }
        let (g, s, t) = ext_gcd(a, c);
        let new_pivot = (g, s * b + t * d);
        // (c/g)*(a,b) - (a/g)*(c,d) has zero first coordinate.
        let rem = (c / g) * b - (a / g) * d;
        pivot = new_pivot;
        h22 = ext_gcd(h22, rem).0;
    }
    let h22 = h22.abs();
    let h21 = if h22 == 0 {
        pivot.1
    } else {
        pivot.1.rem_euclid(h22)
    };
    (pivot.0, h21, h22)
}

/// All solutions of `(Mⁿ - I) x ≡ 0 (mod 1)` on the torus, by exact lattice arithmetic.
///
/// The solution set is `A⁻¹ℤ² / ℤ²` with `A = Mⁿ - I`. Writing `A⁻¹ = adj(A)/D`,
/// the numerators form the lattice spanned by the columns of `adj(A)` and
/// `D·ℤ²`; enumerating a triangular basis of that lattice inside `[0, D)²`
/// yields every fixed point exactly once.
pub fn periodic_points(n: u32, cap: usize) -> Result<PeriodicPoints, MapError> {
    let total = fixed_point_count(n)?;
    let m = cat_matrix_power(n)?;
    let a = [[m[0][0] - 1, m[0][1]], [m[1][0], m[1][1] - 1]];
    let det = i128::from(total);
    // adj(A) = [[a11, -a01], [-a10, a00]]; its columns as generators.
    let gens = [(a[1][1], -a[1][0]), (-a[0][1], a[0][0]), (det, 0), (0, det)];
    let (h11, h21, h22) = lattice_basis(&gens);
    let limit = total.min(cap as u64) as usize;
    let mut points = Vec::with_capacity(limit);
    let den = total;
    'outer: for i in 0..(det / h11) {
        let base_q = i * h11;
        let base_p = i * h21;
        for j in 0..(det / h22) {
            if points.len() == limit {
                break 'outer;
            }
            let p = (base_p + j * h22).rem_euclid(det);
            points.push(RationalPoint {
                q_num: base_q as u64,
                p_num: p as u64,
                den,
            });
        }
    }
    Ok(PeriodicPoints {
        period: n,
        truncated: points.len() < total as usize,
        points,
        total,
    })
}

/// A periodic orbit of the unperturbed map with its minimal period.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicOrbit {
    pub period: u32,
    /// Orbit points in dynamical order, starting at the smallest reduced point.
    pub points: Vec<RationalPoint>,
}

/// Periodic orbits of minimal period `1..=n_max`.
///
/// Returns the orbits and a flag telling whether any period was truncated by `cap`.
pub fn periodic_orbits(n_max: u32, cap: usize) -> Result<(Vec<PeriodicOrbit>, bool), MapError> {
    if n_max == 0 {
        return Err(MapError::ZeroPeriod);
    }
    let mut seen: BTreeSet<RationalPoint> = BTreeSet::new();
    let mut orbits = Vec::new();
    let mut truncated = false;
    for n in 1..=n_max {
        let pts = periodic_points(n, cap)?;
        truncated |= pts.truncated;
        for start in pts.points {
            let start = start.reduced();
            if seen.contains(&start) {
                continue;
            }
            let mut orbit = Vec::new();
            let mut x = start;
            loop {
                orbit.push(x);
                x = x.cat_image().reduced();
                if x == start {
                    break;
                }
            }
            for pt in &orbit {
                seen.insert(*pt);
            }
            // canonical start: smallest point, keeping dynamical order
            let (idx, _) = orbit
                .iter()
                .enumerate()
                .min_by_key(|(_, p)| **p)
                .expect("orbit is nonempty");
            orbit.rotate_left(idx);
            orbits.push(PeriodicOrbit {
                period: orbit.len() as u32,
                points: orbit,
            });
        }
    }
    orbits.sort_by(|a, b| a.period.cmp(&b.period).then(a.points[0].cmp(&b.points[0])));
    Ok((orbits, truncated))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn momentum(k: f64) -> PerturbationSpec {
        PerturbationSpec::global(ShearKind::MomentumShear, k).unwrap()
    }

    #[test]
    fn shear_values() {
        assert_eq!(momentum(3.0).shear_momentum(0.0), 0.0);
        let e = momentum(1.0).shear_momentum(0.25);
        assert!((e - 1.0 / (2.0 * PI)).abs() < 1e-15);
        let local = PerturbationSpec::local(1.0, 0.2, 0.3, WindowMode::Rescaled).unwrap();
        assert_eq!(local.shear_momentum(0.1), 0.0);
        assert_eq!(local.shear_momentum(0.6), 0.0);
        let trunc = PerturbationSpec::local(1.0, 0.2, 0.3, WindowMode::Truncated).unwrap();
        assert_eq!(trunc.shear_momentum(0.9), 0.0);
        assert_eq!(trunc.shear_momentum(0.3), momentum(1.0).shear_momentum(0.3));
    }

    #[test]
    fn spec_validation() {
        assert!(PerturbationSpec::local(1.0, 0.5, 0.6, WindowMode::Rescaled).is_err());
        assert!(PerturbationSpec::local(1.0, 0.0, 0.0, WindowMode::Rescaled).is_err());
        assert!(PerturbationSpec::local(1.0, 1.0, 0.1, WindowMode::Rescaled).is_err());
        assert!(PerturbationSpec::new(
            ShearKind::MomentumPlusPositionShear,
            1.0,
            Window::Local { q0: 0.1, beta: 0.2 },
            WindowMode::Rescaled
        )
        .is_err());
        assert!(PerturbationSpec::global(ShearKind::MomentumShear, f64::NAN).is_err());
        assert!(PerturbationSpec::local(1.0, 0.3, 0.7, WindowMode::Rescaled).is_ok());
    }

    #[test]
    fn potential_is_antiderivative() {
        let specs = [
            momentum(0.7),
            PerturbationSpec::local(1.3, 0.1, 0.6, WindowMode::Rescaled).unwrap(),
            PerturbationSpec::local(1.3, 0.1, 0.6, WindowMode::Truncated).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let h = 1e-5;
        for spec in &specs {
            let (lo, hi) = spec.q_range();
            for _ in 0..10_000 {
                let q: f64 = rng.random();
                // stay clear of the window edges and of the torus seam
                if q < h || q > 1.0 - h || (q - lo).abs() < 2.0 * h || (q - hi).abs() < 2.0 * h {
                    continue;
                }
                let fd = (spec.kick_potential(q + h) - spec.kick_potential(q - h)) / (2.0 * h);
                assert!(
                    (fd + spec.shear_momentum(q)).abs() < 1e-8,
                    "{spec:?} q={q} fd={fd} eps={}",
                    spec.shear_momentum(q)
                );
            }
        }
        let two = PerturbationSpec::global(ShearKind::MomentumPlusPositionShear, 0.9).unwrap();
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            if p + h >= 1.0 {
                continue;
            }
            let fd = (two.drift_potential(p + h) - two.drift_potential(p - h)) / (2.0 * h);
            assert!((fd - two.shear_position(p)).abs() < 1e-8);
        }
    }

    #[test]
    fn potential_continuity() {
        assert_eq!(momentum(2.0).kick_potential(0.0), 0.0);
        let spec = PerturbationSpec::local(2.0, 0.25, 0.5, WindowMode::Rescaled).unwrap();
        assert!(spec.kick_potential(0.25).abs() < 1e-15);
        assert!(spec.kick_potential(0.75 - 1e-13).abs() < 1e-10);
        assert!(
            (momentum(2.0).kick_potential(1.0 - 1e-14) - momentum(2.0).kick_potential(0.0)).abs()
                < 1e-12
        );
    }

    #[test]
    fn fixed_points_of_unperturbed_map() {
        let origin = TorusPoint::new(0.0, 0.0);
        assert_eq!(evolve(origin, None), origin);
        let half = TorusPoint::new(0.5, 0.5);
        assert!(evolve(half, None).distance(&half) < 1e-15);
    }

    #[test]
    fn zero_strength_equals_unperturbed() {
        let specs = [
            momentum(0.0),
            PerturbationSpec::global(ShearKind::MomentumPlusPositionShear, 0.0).unwrap(),
            PerturbationSpec::local(0.0, 0.1, 0.4, WindowMode::Truncated).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for spec in &specs {
            for _ in 0..1_000_000 / specs.len() {
                let x = TorusPoint::new(rng.random(), rng.random());
                assert_eq!(evolve(x, Some(spec)), evolve(x, None));
            }
        }
    }

    #[test]
    fn action_difference_values() {
        let spec = momentum(0.4);
        let ds = spec.action_diff_one_step(TorusPoint::new(0.25, 0.3), 0.1);
        assert!((ds - 0.1 / (4.0 * PI * PI)).abs() < 1e-16);
        assert!((ds - 2.5330e-3).abs() < 1e-7);
        assert_eq!(
            spec.action_diff_one_step(TorusPoint::new(0.0, 0.7), 0.3),
            0.0
        );
        assert_eq!(
            spec.action_diff_one_step(TorusPoint::new(0.37, 0.7), 0.0),
            0.0
        );
        // Local rescaled: (δk β / 4π²)[sin 2πu - sin 4πu / 2]
        let local = PerturbationSpec::local(0.0, 0.2, 0.4, WindowMode::Rescaled).unwrap();
        let q = 0.2 + 0.4 * 0.3;
        let u: f64 = 0.3;
        let expected =
            0.05 * 0.4 / (4.0 * PI * PI) * ((2.0 * PI * u).sin() - 0.5 * (4.0 * PI * u).sin());
        let got = local.action_diff_one_step(TorusPoint::new(q, 0.0), 0.05);
        assert!((got - expected).abs() < 1e-16);
        assert_eq!(
            local.action_diff_one_step(TorusPoint::new(0.9, 0.0), 0.05),
            0.0
        );
    }

    #[test]
    fn two_shear_action_difference() {
        let spec = PerturbationSpec::global(ShearKind::MomentumPlusPositionShear, 0.0).unwrap();
        let (q, p) = (0.13, 0.71);
        let dk = 0.2;
        let expected = (dk / (4.0 * PI * PI))
            * ((2.0 * PI * q).sin() - 0.5 * (4.0 * PI * q).sin() - (6.0 * PI * p).cos() / 9.0
                + 0.25 * (4.0 * PI * p).sin());
        let got = spec.action_diff_one_step(TorusPoint::new(q, p), dk);
        assert!((got - expected).abs() < 1e-16);
    }

    #[test]
    fn global_equals_full_local_window() {
        let g = momentum(1.7);
        let l = PerturbationSpec::local(1.7, 0.0, 1.0, WindowMode::Rescaled).unwrap();
        for i in 0..997 {
            let q = i as f64 / 997.0;
            let x = TorusPoint::new(q, 0.4);
            assert!((g.shear_momentum(q) - l.shear_momentum(q)).abs() < 1e-15);
            assert!((g.kick_potential(q) - l.kick_potential(q)).abs() < 1e-15);
            assert!(
                (g.action_diff_one_step(x, 0.3) - l.action_diff_one_step(x, 0.3)).abs() < 1e-15
            );
        }
    }

    #[test]
    fn step_with_kick_matches_evolve() {
        let spec = PerturbationSpec::global(ShearKind::MomentumPlusPositionShear, 0.8).unwrap();
        let x = TorusPoint::new(0.31, 0.77);
        let (next, kick) = step_with_kick(x, &spec);
        assert_eq!(next, evolve(x, Some(&spec)));
        let (q, _) = cat_step(0.31, 0.77);
        assert_eq!(kick.q(), q);
        assert_eq!(kick.p(), next.p());
    }

    #[test]
    fn fixed_point_counts() {
        assert_eq!(fixed_point_count(1).unwrap(), 2);
        // M² = [[7,4],[12,7]]; det(M² - I) = 36 - 48 = -12
        assert_eq!(cat_matrix_power(2).unwrap(), [[7, 4], [12, 7]]);
        assert_eq!(fixed_point_count(2).unwrap(), 12);
        assert!(matches!(
            fixed_point_count(200),
            Err(MapError::PeriodOverflow(_))
        ));
        assert!(matches!(fixed_point_count(0), Err(MapError::ZeroPeriod)));
    }

    fn brute_force_fixed_points(n: u32) -> Vec<(u64, u64)> {
        let d = fixed_point_count(n).unwrap();
        let m = cat_matrix_power(n).unwrap();
        let mut out = vec![];
        for a in 0..d as i128 {
            for b in 0..d as i128 {
                let qa = (m[0][0] * a + m[0][1] * b - a).rem_euclid(d as i128);
                let pb = (m[1][0] * a + m[1][1] * b - b).rem_euclid(d as i128);
                if qa == 0 && pb == 0 {
                    out.push((a as u64, b as u64));
                }
            }
        }
        out
    }

    #[test]
    fn periodic_points_match_brute_force() {
        for n in 1..=4 {
            let pts = periodic_points(n, usize::MAX).unwrap();
            assert!(!pts.truncated);
            let mut got: Vec<(u64, u64)> = pts.points.iter().map(|p| (p.q_num, p.p_num)).collect();
            got.sort_unstable();
            let mut expected = brute_force_fixed_points(n);
            expected.sort_unstable();
            assert_eq!(got, expected, "period {n}");
        }
        let one = periodic_points(1, 10).unwrap();
        let set: Vec<TorusPoint> = one.points.iter().map(|p| p.to_point()).collect();
        assert_eq!(set.len(), 2);
        assert!(set.contains(&TorusPoint::new(0.0, 0.0)));
        assert!(set.contains(&TorusPoint::new(0.5, 0.5)));
    }

    #[test]
    fn periodic_points_close_under_iteration() {
        for n in 1..=6 {
            let pts = periodic_points(n, usize::MAX).unwrap();
            assert_eq!(pts.points.len() as u64, pts.total);
            for rp in &pts.points {
                let x = rp.to_point();
                let mut y = x;
                for _ in 0..n {
                    y = evolve(y, None);
                }
                assert!(y.distance(&x) < 1e-9, "n={n} {rp:?}");
                let mut r = *rp;
                for _ in 0..n {
                    r = r.cat_image();
                }
                assert_eq!(r, *rp);
            }
        }
    }

    #[test]
    fn periodic_points_cap() {
        let pts = periodic_points(5, 10).unwrap();
        assert!(pts.truncated);
        assert_eq!(pts.points.len(), 10);
        assert_eq!(pts.total, fixed_point_count(5).unwrap());
    }

    #[test]
    fn orbit_counts_follow_divisor_structure() {
        let (orbits, truncated) = periodic_orbits(6, usize::MAX).unwrap();
        assert!(!truncated);
        for n in 1..=6u32 {
            let sum: u64 = orbits
                .iter()
                .filter(|o| n % o.period == 0)
                .map(|o| o.period as u64)
                .sum();
            assert_eq!(sum, fixed_point_count(n).unwrap(), "n={n}");
        }
        for o in &orbits {
            let mut x = o.points[0];
            for _ in 0..o.period {
                x = x.cat_image().reduced();
            }
            assert_eq!(x, o.points[0]);
        }
    }

    #[test]
    fn effective_planck() {
        let h = EffectivePlanck::new(123).unwrap();
        assert!((h.hbar() * 2.0 * PI * 123.0 - 1.0).abs() < 1e-15);
        assert!(EffectivePlanck::new(0).is_err());
    }
}
