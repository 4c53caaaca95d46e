//! Quantized perturbed cat map on an `N`-dimensional Hilbert space.
//!
//! Position eigenstates sit at `q_j = j/N` with periodic boundary phases. The
//! propagator is `U = K · U_cat` (linear map, then the kick), where
//!
//! * `(U_cat)_{jl} = (iN)^{-1/2} exp[2πi (l² − jl + j²)/N]` quantizes `[[2, 1], [3, 2]]`,
//! * `K = diag(exp(−2πiN·V(q_j)))` realizes the momentum kick,
//! * the two-shear variant further applies `F† diag(exp(−2πiN·T(p_l))) F`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use thiserror::Error;

use crate::distributions::WeightedCircularSample;
use crate::linalg::{schur, CMatrix, LinalgError};
use crate::maps::{PerturbationSpec, ShearKind};
use crate::wrap_angle;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantumError {
    #[error("Hilbert-space dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("propagator is not unitary: residual {residual:e} exceeds {tolerance:e}")]
    NotUnitary { residual: f64, tolerance: f64 },
    #[error("eigensolver residual {residual:e} exceeds {tolerance:e}")]
    EigenResidual { residual: f64, tolerance: f64 },
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("state index {0} out of range")]
    StateOutOfRange(usize),
}

/// Quantization choices that do not follow from the classical map.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct QuantizationKnobs {
    /// Grid offset for the kick, `q_j = (j + offset)/N`.
    pub kick_offset: f64,
}

impl Default for QuantizationKnobs {
    fn default() -> Self {
        Self { kick_offset: 0.0 }
    }
}

/// Unitary one-step propagator in the position basis.
#[derive(Debug, Clone)]
pub struct UnitaryPropagator {
    pub matrix: CMatrix,
    pub spec: PerturbationSpec,
    pub knobs: QuantizationKnobs,
}

impl UnitaryPropagator {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Unitarity tolerance `10⁻¹⁰·√N`.
pub fn unitarity_tolerance(n: usize) -> f64 {
    1e-10 * (n as f64).sqrt()
}

/// The linear cat-map propagator.
pub fn cat_propagator(n: usize) -> CMatrix {
    let nn = n as i64;
    let norm = Complex64::from_polar(1.0 / (n as f64).sqrt(), -PI / 4.0);
    CMatrix::from_fn(n, |j, l| {
        let (j, l) = (j as i64, l as i64);
        // exact integer phase index modulo N
        let e = (l * l - j * l + j * j).rem_euclid(nn);
        norm * Complex64::from_polar(1.0, TAU * e as f64 / n as f64)
    })
}

/// Builds `U` for the strength carried by `spec`.
pub fn build_propagator(
    n: usize,
    spec: &PerturbationSpec,
    knobs: QuantizationKnobs,
) -> Result<UnitaryPropagator, QuantumError> {
    if n < 2 {
        return Err(QuantumError::DimensionTooSmall(n));
    }
    let nf = n as f64;
    let mut u = cat_propagator(n);
    let kick: Vec<Complex64> = (0..n)
        .map(|j| {
            let q = (j as f64 + knobs.kick_offset) / nf;
            Complex64::from_polar(1.0, -TAU * nf * spec.kick_potential(q))
        })
        .collect();
    u.scale_rows(&kick);

    if spec.kind() == ShearKind::MomentumPlusPositionShear {
        // F† diag(d) F is circulant: P_{jj'} = c_{(j − j') mod N},
        // c_m = (1/N) Σ_l d_l e^{2πi l m / N}.
        let d: Vec<Complex64> = (0..n)
            .map(|l| Complex64::from_polar(1.0, -TAU * nf * spec.drift_potential(l as f64 / nf)))
            .collect();
        let c: Vec<Complex64> = (0..n)
            .map(|m| {
                d.iter()
                    .enumerate()
                    .map(|(l, &dl)| {
                        dl * Complex64::from_polar(1.0, TAU * ((l * m) % n) as f64 / nf)
                    })
                    .sum::<Complex64>()
                    / nf
            })
            .collect();
        let p = CMatrix::from_fn(n, |j, jp| c[(j + n - jp) % n]);
        u = p.matmul(&u)?;
    }

    let residual = u.unitarity_residual();
    let tolerance = unitarity_tolerance(n);
    if !(residual <= tolerance) {
        return Err(QuantumError::NotUnitary {
            residual,
            tolerance,
        });
    }
    Ok(UnitaryPropagator {
        matrix: u,
        spec: *spec,
        knobs,
    })
}

/// Eigenphases in `[−π, π)` sorted ascending, with orthonormal eigenvectors as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    phases: Vec<f64>,
    vectors: CMatrix,
}

/// Eigenpair residual tolerance.
pub const EIGEN_TOLERANCE: f64 = 1e-9;

impl EigenSystem {
    /// Assembles an eigensystem from stored parts (e.g. a cache file).
    pub fn from_parts(phases: Vec<f64>, vectors: CMatrix) -> Result<Self, QuantumError> {
        if phases.len() != vectors.dim() {
            return Err(QuantumError::DimensionMismatch(phases.len(), vectors.dim()));
        }
        Ok(Self { phases, vectors })
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    /// `max_j ‖U v_j − e^{iθ_j} v_j‖`, computed directly.
    pub fn residual(&self, u: &CMatrix) -> Result<f64, QuantumError> {
        let uv = u.matmul(&self.vectors)?;
        let mut worst = 0.0f64;
        for (j, &theta) in self.phases.iter().enumerate() {
            let lambda = Complex64::from_polar(1.0, theta);
            let r: f64 = uv
                .col(j)
                .iter()
                .zip(self.vectors.col(j))
                .map(|(a, b)| (a - lambda * b).norm_sqr())
                .sum();
            worst = worst.max(r.sqrt());
        }
        Ok(worst)
    }
}

/// Diagonalizes a unitary propagator through its complex Schur form.
pub fn eigendecompose(u: &UnitaryPropagator) -> Result<EigenSystem, QuantumError> {
    eigendecompose_matrix(&u.matrix)
}

/// Same as [`eigendecompose`] for a bare unitary matrix.
pub fn eigendecompose_matrix(u: &CMatrix) -> Result<EigenSystem, QuantumError> {
    let s = schur(u)?;
    let values = s.eigenvalues();
    let off_diagonal = s.column_residuals();
    let mut residual = 0.0f64;
    for (z, r) in values.iter().zip(&off_diagonal) {
        // U q_j − e^{iθ} q_j = (t_jj − e^{iθ}) q_j + Σ_{i<j} t_ij q_i
        residual = residual.max(r + (z.norm() - 1.0).abs());
    }
    if !(residual <= EIGEN_TOLERANCE) {
        return Err(QuantumError::EigenResidual {
            residual,
            tolerance: EIGEN_TOLERANCE,
        });
    }
    let phases: Vec<f64> = values.iter().map(|z| wrap_angle(z.arg())).collect();
    let mut order: Vec<usize> = (0..phases.len()).collect();
    order.sort_by(|&a, &b| phases[a].total_cmp(&phases[b]).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&i| phases[i]).collect();
    Ok(EigenSystem {
        phases: sorted,
        vectors: s.q.permute_columns(&order),
    })
}

/// Squared overlaps between unperturbed states `i` and perturbed states `j`,
/// resolved by the eigenphase difference `ω_ij = θ_j(1) − θ_i(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapDistribution {
    dim: usize,
    states: Vec<usize>,
    /// Row-major over (state, perturbed index).
    omegas: Vec<f64>,
    weights: Vec<f64>,
}

impl OverlapDistribution {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of unperturbed states averaged over.
    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `Σ_j w_ij` for each averaged state `i`.
    pub fn per_state_sums(&self) -> Vec<f64> {
        self.weights
            .chunks(self.dim)
            .map(|c| c.iter().sum())
            .collect()
    }

    /// `Σ_i w_ij` for each perturbed state `j`.
    pub fn per_perturbed_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for row in self.weights.chunks(self.dim) {
            for (o, w) in out.iter_mut().zip(row) {
                *o += w;
            }
        }
        out
    }

    /// The LDOS as a weighted sample on the circle.
    pub fn to_sample(&self) -> WeightedCircularSample {
        WeightedCircularSample::new(self.omegas.clone(), self.weights.clone())
            .expect("overlap weights are nonnegative with positive total")
    }
}

/// LDOS averaged over every unperturbed state.
pub fn ldos(
    unperturbed: &EigenSystem,
    perturbed: &EigenSystem,
) -> Result<OverlapDistribution, QuantumError> {
    let states: Vec<usize> = (0..unperturbed.dim()).collect();
    ldos_subset(unperturbed, perturbed, &states)
}

/// LDOS averaged over a chosen set of unperturbed states.
pub fn ldos_subset(
    unperturbed: &EigenSystem,
    perturbed: &EigenSystem,
    states: &[usize],
) -> Result<OverlapDistribution, QuantumError> {
    let n = unperturbed.dim();
    if perturbed.dim() != n {
        return Err(QuantumError::DimensionMismatch(n, perturbed.dim()));
    }
    if let Some(&bad) = states.iter().find(|&&i| i >= n) {
        return Err(QuantumError::StateOutOfRange(bad));
    }
    let mut omegas = Vec::with_capacity(states.len() * n);
    let mut weights = Vec::with_capacity(states.len() * n);
    for &i in states {
        let v0 = unperturbed.vectors.col(i);
        let theta0 = unperturbed.phases[i];
        for j in 0..n {
            let overlap = crate::linalg::dot_conj(perturbed.vectors.col(j), v0);
            omegas.push(wrap_angle(perturbed.phases[j] - theta0));
            weights.push(overlap.norm_sqr());
        }
    }
    Ok(OverlapDistribution {
        dim: n,
        states: states.to_vec(),
        omegas,
        weights,
    })
}

/// Averaged survival amplitude `Ā(m) = (1/n) Σ w_ij e^{−iω_ij m}` for `m = 0..=m_max`.
pub fn survival_amplitude(dist: &OverlapDistribution, m_max: usize) -> Vec<Complex64> {
    let n = dist.n_states() as f64;
    (0..=m_max)
        .map(|m| {
            let mf = m as f64;
            let mut re = 0.0;
            let mut im = 0.0;
            for (&w, &om) in dist.weights.iter().zip(&dist.omegas) {
                let (s, c) = (om * mf).sin_cos();
                re += w * c;
                im -= w * s;
            }
            Complex64::new(re / n, im / n)
        })
        .collect()
}
