//! Desymmetrized stadium billiard under area-preserving deformation.
//!
//! The quarter stadium occupies `0 ≤ y ≤ r`, bounded by a straight top wall of
//! length `a`, a quarter circle of radius `r` centered at `(a, 0)`, and the two
//! symmetry axes. Arclength `q` runs clockwise from `(0, r)`: top wall, arc,
//! bottom axis, left axis.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use thiserror::Error;

use crate::quadrature::{midpoint, QuadratureOptions};
use crate::semiclassics::{lorentzian_width_factor, DecayParams, PhaseAverage};

/// Fixed billiard area `1 + π/4`.
pub const STADIUM_AREA: f64 = 1.0 + FRAC_PI_4;

/// Geometric tolerance for intersections.
pub const GEOMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StadiumError {
    #[error("shape parameter must be positive and finite, got {0}")]
    BadShape(f64),
    #[error("deformation {0} exceeds the supported range")]
    DeformationTooLarge(f64),
    #[error("normal ray from q = {0} does not meet the deformed boundary")]
    NoIntersection(f64),
    #[error("tangential momentum must lie in (-1, 1), got {0}")]
    Grazing(f64),
    #[error("trajectory from q = {0} found no wall")]
    LostTrajectory(f64),
    #[error("momentum and mass must be positive")]
    BadMomentum,
    #[error("quadrature failed: {0}")]
    Quadrature(crate::quadrature::QuadratureError),
}

/// Boundary pieces in arclength order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wall {
    Top,
    Arc,
    Bottom,
    Left,
}

impl Wall {
    pub fn is_physical(self) -> bool {
        matches!(self, Wall::Top | Wall::Arc)
    }
}

/// A point on the boundary with its outward normal and unit tangent (direction of growing `q`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub wall: Wall,
    pub position: [f64; 2],
    pub normal: [f64; 2],
    pub tangent: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StadiumShape {
    pub x: f64,
    pub r: f64,
    pub a: f64,
    pub area: f64,
    pub perimeter: f64,
}

/// Shape with `a/r = x` and area `1 + π/4`.
pub fn shape_from_x(x: f64) -> Result<StadiumShape, StadiumError> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(StadiumError::BadShape(x));
    }
    let r = (STADIUM_AREA / (x + FRAC_PI_4)).sqrt();
    Ok(StadiumShape {
        x,
        r,
        a: x * r,
        area: STADIUM_AREA,
        perimeter: r * (2.0 * x + 2.0 + FRAC_PI_2),
    })
}

fn dot(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[0] + u[1] * v[1]
}

fn along(p: [f64; 2], d: [f64; 2], t: f64) -> [f64; 2] {
    [p[0] + t * d[0], p[1] + t * d[1]]
}

fn dist(u: [f64; 2], v: [f64; 2]) -> f64 {
    (u[0] - v[0]).hypot(u[1] - v[1])
}

impl StadiumShape {
    /// Length of the top wall plus the arc.
    pub fn physical_length(&self) -> f64 {
        self.a + FRAC_PI_2 * self.r
    }

    fn arc_end(&self) -> f64 {
        self.physical_length()
    }

    fn bottom_end(&self) -> f64 {
        self.arc_end() + self.a + self.r
    }

    /// Recomputed area `a r + π r²/4`.
    pub fn enclosed_area(&self) -> f64 {
        self.a * self.r + FRAC_PI_4 * self.r * self.r
    }

    pub fn boundary_point(&self, q: f64) -> BoundaryPoint {
        let q = crate::rem_euclid(q, self.perimeter);
        let (a, r) = (self.a, self.r);
        if q < a {
            BoundaryPoint {
                wall: Wall::Top,
                position: [q, r],
                normal: [0.0, 1.0],
                tangent: [1.0, 0.0],
            }
        } else if q < self.arc_end() {
            let phi = FRAC_PI_2 - (q - a) / r;
            let (s, c) = phi.sin_cos();
            BoundaryPoint {
                wall: Wall::Arc,
                position: [a + r * c, r * s],
                normal: [c, s],
                tangent: [s, -c],
            }
        } else if q < self.bottom_end() {
            BoundaryPoint {
                wall: Wall::Bottom,
                position: [a + r - (q - self.arc_end()), 0.0],
                normal: [0.0, -1.0],
                tangent: [-1.0, 0.0],
            }
        } else {
            BoundaryPoint {
                wall: Wall::Left,
                position: [0.0, q - self.bottom_end()],
                normal: [-1.0, 0.0],
                tangent: [0.0, 1.0],
            }
        }
    }

    /// Arclength of a point known to lie on `wall`.
    pub fn arclength_on(&self, wall: Wall, p: [f64; 2]) -> f64 {
        let q = match wall {
            Wall::Top => p[0].clamp(0.0, self.a),
            Wall::Arc => {
                let phi = p[1].atan2(p[0] - self.a).clamp(0.0, FRAC_PI_2);
                self.a + self.r * (FRAC_PI_2 - phi)
            }
            Wall::Bottom => self.arc_end() + (self.a + self.r - p[0]).clamp(0.0, self.a + self.r),
            Wall::Left => self.bottom_end() + p[1].clamp(0.0, self.r),
        };
        if q >= self.perimeter {
            0.0
        } else {
            q
        }
    }

    /// Distance from `p` to the physical boundary (top wall and arc).
    pub fn physical_distance(&self, p: [f64; 2]) -> f64 {
        let top = if p[0] <= self.a {
            (p[1] - self.r).abs()
        } else {
            dist(p, [self.a, self.r])
        };
        let arc = if p[0] >= self.a && p[1] >= 0.0 {
            (dist(p, [self.a, 0.0]) - self.r).abs()
        } else {
            dist(p, [self.a, self.r]).min(dist(p, [self.a + self.r, 0.0]))
        };
        top.min(arc)
    }

    // hits of the ray p + t d with the physical boundary, as (t, wall)
    fn physical_hits(&self, p: [f64; 2], d: [f64; 2]) -> Vec<(f64, Wall)> {
        let mut hits = Vec::with_capacity(3);
        if d[1] != 0.0 {
            let t = (self.r - p[1]) / d[1];
            let x = p[0] + t * d[0];
            if x >= -GEOMETRY_TOL && x <= self.a + GEOMETRY_TOL {
                hits.push((t, Wall::Top));
            }
        }
        for (t, w) in self.circle_hits(p, d) {
            hits.push((t, w));
        }
        hits
    }

    fn circle_hits(&self, p: [f64; 2], d: [f64; 2]) -> Vec<(f64, Wall)> {
        let rel = [p[0] - self.a, p[1]];
        let dd = dot(d, d);
        let b = dot(d, rel) / dd;
        let c = (dot(rel, rel) - self.r * self.r) / dd;
        let disc = b * b - c;
        let mut out = Vec::with_capacity(2);
        if disc < 0.0 {
            return out;
        }
        let s = disc.sqrt();
        for t in [-b - s, -b + s] {
            let hit = along(p, d, t);
            if hit[0] >= self.a - GEOMETRY_TOL && hit[1] >= -GEOMETRY_TOL {
                out.push((t, Wall::Arc));
            }
        }
        out
    }

    // first wall hit strictly ahead of p along d
    fn next_wall(&self, p: [f64; 2], d: [f64; 2], from: Wall) -> Option<(f64, Wall)> {
        let eps = 1e-12;
        let mut best: Option<(f64, Wall)> = None;
        let mut consider = |t: f64, w: Wall| {
            // a straight wall cannot be hit again right after leaving it
            if t > eps && !(w == from && w != Wall::Arc && t < 1e-9) && best.is_none_or(|b| t < b.0)
            {
                best = Some((t, w));
            }
        };
        for (t, w) in self.physical_hits(p, d) {
            if w == Wall::Arc && from == Wall::Arc && t <= 1e-9 {
                continue;
            }
            consider(t, w);
        }
        if d[1] != 0.0 {
            let t = -p[1] / d[1];
            let x = p[0] + t * d[0];
            if x >= -GEOMETRY_TOL && x <= self.a + self.r + GEOMETRY_TOL {
                consider(t, Wall::Bottom);
            }
        }
        if d[0] != 0.0 {
            let t = -p[0] / d[0];
            let y = p[1] + t * d[1];
            if y >= -GEOMETRY_TOL && y <= self.r + GEOMETRY_TOL {
                consider(t, Wall::Left);
            }
        }
        best
    }
}

/// Point of the deformed boundary met along the outward normal at `q`, with the signed distance `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Displacement {
    pub z: f64,
    pub position: [f64; 2],
    pub wall: Wall,
}

/// Largest supported `|x1 − x0|`.
pub const MAX_DEFORMATION: f64 = 0.5;

/// Signed normal displacement from the boundary of `shape_from_x(x0)` at `q`
/// to the physical boundary of `shape_from_x(x1)`; zero on the symmetry axes.
pub fn displacement(q: f64, x0: f64, x1: f64) -> Result<Displacement, StadiumError> {
    let s0 = shape_from_x(x0)?;
    let s1 = shape_from_x(x1)?;
    if !((x1 - x0).abs() <= MAX_DEFORMATION) {
        return Err(StadiumError::DeformationTooLarge(x1 - x0));
    }
    let b = s0.boundary_point(q);
    if !b.wall.is_physical() {
        return Ok(Displacement {
            z: 0.0,
            position: b.position,
            wall: b.wall,
        });
    }
    if x1 == x0 {
        return Ok(Displacement {
            z: 0.0,
            position: b.position,
            wall: b.wall,
        });
    }
    let best = s1
        .physical_hits(b.position, b.normal)
        .into_iter()
        .filter(|&(t, _)| s1.physical_distance(along(b.position, b.normal, t)) <= GEOMETRY_TOL)
        .min_by(|u, v| u.0.abs().total_cmp(&v.0.abs()));
    match best {
        Some((z, wall)) => Ok(Displacement {
            z,
            position: along(b.position, b.normal, z),
            wall,
        }),
        None => Err(StadiumError::NoIntersection(q)),
    }
}

/// `z(q)` for the deformation `x0 → x1`.
pub fn normal_displacement(q: f64, x0: f64, x1: f64) -> Result<f64, StadiumError> {
    displacement(q, x0, x1).map(|d| d.z)
}

/// Birkhoff coordinates of a bounce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionState {
    q: f64,
    p_t: f64,
}

impl CollisionState {
    pub fn new(q: f64, p_t: f64, shape: &StadiumShape) -> Result<Self, StadiumError> {
        if !(p_t.abs() < 1.0) {
            return Err(StadiumError::Grazing(p_t));
        }
        Ok(Self {
            q: crate::rem_euclid(q, shape.perimeter),
            p_t,
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn p_t(&self) -> f64 {
        self.p_t
    }
}

/// `|p| ΔL = 2|p| z cos θ`.
pub fn action_diff_billiard(
    state: &CollisionState,
    x0: f64,
    delta_x: f64,
    p_mag: f64,
) -> Result<f64, StadiumError> {
    if !(p_mag > 0.0) {
        return Err(StadiumError::BadMomentum);
    }
    let z = normal_displacement(state.q, x0, x0 + delta_x)?;
    Ok(2.0 * p_mag * z * (1.0 - state.p_t * state.p_t).max(0.0).sqrt())
}

/// Mean time between bounces `mπA/(|p|P)`.
pub fn mean_bounce_time(shape: &StadiumShape, p_mag: f64, mass: f64) -> f64 {
    mass * PI * shape.area / (p_mag * shape.perimeter)
}

/// Defaults: `m = 1/2`, `ħ = 1`, `|p| = 200`.
pub const DEFAULT_MASS: f64 = 0.5;
pub const DEFAULT_MOMENTUM: f64 = 200.0;

/// `⟨1 − e^{−iφ}⟩` over `p_t ∈ (−1, 1)` for `φ = c·cos θ`, `p_t = sin θ`.
fn momentum_average(c: f64, opts: &QuadratureOptions) -> Result<Complex64, StadiumError> {
    if c == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    // (1/2)∫ dp_t = (1/2)∫ cos θ dθ over (−π/2, π/2); the real part is even in θ
    let f = |theta: f64| {
        let ct = theta.cos();
        let phi = c * ct;
        let s = (0.5 * phi).sin();
        Complex64::new(2.0 * s * s, phi.sin()) * ct
    };
    midpoint(f, 0.0, FRAC_PI_2, opts)
        .map(|e| e.value)
        .map_err(|(e, _)| StadiumError::Quadrature(e))
}

/// Average of `e^{−iΔS/ħ}` over the full Birkhoff rectangle, `ħ = 1`.
pub fn stadium_phase_average(
    x0: f64,
    delta_x: f64,
    p_mag: f64,
) -> Result<PhaseAverage, StadiumError> {
    if !(p_mag > 0.0) {
        return Err(StadiumError::BadMomentum);
    }
    let s0 = shape_from_x(x0)?;
    let s1 = shape_from_x(x0 + delta_x)?;
    if delta_x == 0.0 {
        return Ok(PhaseAverage {
            value: Complex64::new(1.0, 0.0),
            one_minus_re: 0.0,
            quadrature_error: 0.0,
        });
    }
    let inner = QuadratureOptions {
        abs_tol: 1e-300,
        rel_tol: 1e-9,
        initial_panels: 16,
        max_panels: 3usize.pow(12) * 16,
    };
    let outer = QuadratureOptions {
        abs_tol: 1e-300,
        rel_tol: 1e-7,
        initial_panels: 8,
        max_panels: 3usize.pow(11) * 8,
    };
    let mut failure: Option<StadiumError> = None;
    let mut eval = |q: f64| -> Complex64 {
        match normal_displacement(q, x0, x0 + delta_x)
            .and_then(|z| momentum_average(2.0 * p_mag * z, &inner))
        {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    };
    // smooth pieces of z(q): top wall split where it leaves the deformed top wall, then the arc
    let mut breaks = alloc::vec![0.0];
    if s1.a < s0.a {
        breaks.push(s1.a);
    }
    breaks.push(s0.a);
    breaks.push(s0.physical_length());
    let mut total = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        let est =
            midpoint(&mut eval, lo, hi, &outer).map_err(|(e, _)| StadiumError::Quadrature(e))?;
        total += est.value;
        error += est.error;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    let mean = total / s0.perimeter;
    Ok(PhaseAverage {
        value: Complex64::new(1.0, 0.0) - mean,
        one_minus_re: mean.re,
        quadrature_error: error / s0.perimeter,
    })
}

/// Decay parameters for the deformation `x0 → x0 + δx` at momentum `|p|` and mass `m`.
///
/// The whole boundary counts as the perturbed region, so `η = 1/τ`.
pub fn gamma_stadium(
    x0: f64,
    delta_x: f64,
    p_mag: f64,
    mass: f64,
) -> Result<DecayParams, StadiumError> {
    if !(p_mag > 0.0 && mass > 0.0) {
        return Err(StadiumError::BadMomentum);
    }
    let shape = shape_from_x(x0)?;
    let tau = mean_bounce_time(&shape, p_mag, mass);
    let avg = stadium_phase_average(x0, delta_x, p_mag)?;
    let section = 2.0 * shape.perimeter;
    let eta = 1.0 / tau;
    Ok(DecayParams {
        gamma: eta * avg.one_minus_re.clamp(0.0, 2.0),
        eta,
        alpha: section,
        tau,
        area: section,
    })
}

/// `tan(0.35π)·γ`, without periodization.
pub fn sigma_sc_stadium(params: &DecayParams) -> f64 {
    lorentzian_width_factor() * params.gamma
}

/// Next bounce and the chord length flown to reach it.
pub fn collision_map(
    state: &CollisionState,
    shape: &StadiumShape,
) -> Result<(CollisionState, f64), StadiumError> {
    if !(state.p_t.abs() < 1.0) {
        return Err(StadiumError::Grazing(state.p_t));
    }
    let b = shape.boundary_point(state.q);
    let cos_t = (1.0 - state.p_t * state.p_t).sqrt();
    let v = [
        state.p_t * b.tangent[0] - cos_t * b.normal[0],
        state.p_t * b.tangent[1] - cos_t * b.normal[1],
    ];
    let (t, wall) = shape
        .next_wall(b.position, v, b.wall)
        .ok_or(StadiumError::LostTrajectory(state.q))?;
    let hit = along(b.position, v, t);
    let q_next = shape.arclength_on(wall, hit);
    let nb = shape.boundary_point(q_next);
    let n = if wall == Wall::Arc {
        let rel = [hit[0] - shape.a, hit[1]];
        let len = rel[0].hypot(rel[1]);
        [rel[0] / len, rel[1] / len]
    } else {
        nb.normal
    };
    let vn = dot(v, n);
    let reflected = [v[0] - 2.0 * vn * n[0], v[1] - 2.0 * vn * n[1]];
    let p_t = dot(reflected, nb.tangent).clamp(-1.0 + 1e-15, 1.0 - 1e-15);
    Ok((CollisionState { q: q_next, p_t }, t))
}
