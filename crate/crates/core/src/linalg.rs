//! Dense complex matrices and the complex Schur decomposition.
//!
//! Only what the propagator pipeline needs: column-major storage, products,
//! and `A = Q T Q†` via Householder reduction to Hessenberg form followed by
//! implicitly shifted QR sweeps. For normal matrices `T` is diagonal up to
//! rounding, so the Schur vectors are an orthonormal eigenbasis even inside
//! degenerate eigenspaces.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;
use thiserror::Error;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("QR iteration failed to converge after {0} sweeps")]
    NoConvergence(usize),
}

/// Square complex matrix in column-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// Builds a matrix from `f(row, col)`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for c in 0..n {
            for r in 0..n {
                data.push(f(r, c));
            }
        }
        Self { n, data }
    }

    /// Wraps column-major data; `data.len()` must be `n²`.
    pub fn from_column_major(n: usize, data: Vec<Complex64>) -> Result<Self, LinalgError> {
        if data.len() != n * n {
            return Err(LinalgError::DimensionMismatch(data.len(), n * n));
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[col * self.n + row]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[col * self.n + row] = value;
    }

    pub fn col(&self, col: usize) -> &[Complex64] {
        &self.data[col * self.n..(col + 1) * self.n]
    }

    pub fn col_mut(&mut self, col: usize) -> &mut [Complex64] {
        &mut self.data[col * self.n..(col + 1) * self.n]
    }

    /// Multiplies row `r` by `s[r]`, i.e. `diag(s) · self`.
    pub fn scale_rows(&mut self, s: &[Complex64]) {
        for c in 0..self.n {
            for (x, f) in self.col_mut(c).iter_mut().zip(s) {
                *x *= f;
            }
        }
    }

    /// Permutes columns: column `j` of the result is column `perm[j]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for &j in perm {
            data.extend_from_slice(self.col(j));
        }
        Self { n: self.n, data }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |r, c| self.get(c, r).conj())
    }

    /// `self · rhs`.
    pub fn matmul(&self, rhs: &CMatrix) -> Result<CMatrix, LinalgError> {
        if self.n != rhs.n {
            return Err(LinalgError::DimensionMismatch(self.n, rhs.n));
        }
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for j in 0..n {
            let dst = &mut out.data[j * n..(j + 1) * n];
            for (r, &b) in rhs.col(j).iter().enumerate() {
                if b == ZERO {
                    continue;
                }
                for (d, &a) in dst.iter_mut().zip(self.col(r)) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self† · rhs`.
    pub fn adjoint_matmul(&self, rhs: &CMatrix) -> Result<CMatrix, LinalgError> {
        if self.n != rhs.n {
            return Err(LinalgError::DimensionMismatch(self.n, rhs.n));
        }
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for j in 0..n {
            let b = rhs.col(j);
            for i in 0..n {
                out.data[j * n + i] = dot_conj(self.col(i), b);
            }
        }
        Ok(out)
    }

    /// `max |(self† self - I)_{ij}|`.
    pub fn unitarity_residual(&self) -> f64 {
        let g = self.adjoint_matmul(self).expect("square");
        let mut worst = 0.0f64;
        for c in 0..self.n {
            for r in 0..self.n {
                let target = if r == c { ONE } else { ZERO };
                worst = worst.max((g.get(r, c) - target).norm());
            }
        }
        worst
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// `Σ conj(a_i) b_i`.
#[inline]
pub fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    Complex64::new(re, im)
}

/// Complex Schur factorization `A = Q T Q†`.
#[derive(Debug, Clone)]
pub struct Schur {
    pub q: CMatrix,
    pub t: CMatrix,
}

impl Schur {
    /// Diagonal of `T`.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.t.dim()).map(|i| self.t.get(i, i)).collect()
    }

    /// `‖A q_j − t_jj q_j‖` for each column, read off the strictly upper part of `T`.
    pub fn column_residuals(&self) -> Vec<f64> {
        let n = self.t.dim();
        (0..n)
            .map(|j| {
                self.t.col(j)[..j]
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }
}

fn reduce_to_hessenberg(h: &mut CMatrix, q: &mut CMatrix) {
    let n = h.n;
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    let mut w = vec![ZERO; n];
    for j in 0..n - 2 {
        let m = n - j - 1;
        let x = &h.data[j * n + j + 1..j * n + n];
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let x0 = x[0];
        let xnorm = (tail + x0.norm_sqr()).sqrt();
        let phase = if x0 == ZERO { ONE } else { x0 / x0.norm() };
        let alpha = -phase * xnorm;
        let v = &mut v[..m];
        v.copy_from_slice(x);
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let tau = 2.0 / vnorm2;

        // H <- (I - τ v v†) H on rows j+1.., columns j+1..
        for c in j + 1..n {
            let col = &mut h.data[c * n + j + 1..c * n + n];
            let s = dot_conj(v, col) * tau;
            for (y, &vi) in col.iter_mut().zip(v.iter()) {
                *y -= vi * s;
            }
        }
        h.data[j * n + j + 1] = alpha;
        for y in &mut h.data[j * n + j + 2..j * n + n] {
            *y = ZERO;
        }

        // H <- H (I - τ v v†) and Q <- Q (I - τ v v†), columns j+1..
        for mat in [&mut *h, &mut *q] {
            let w = &mut w[..n];
            w.fill(ZERO);
            for (i, &vi) in v.iter().enumerate() {
                let col = &mat.data[(j + 1 + i) * n..(j + 2 + i) * n];
                for (acc, &a) in w.iter_mut().zip(col) {
                    *acc += a * vi;
                }
            }
            for (i, &vi) in v.iter().enumerate() {
                let f = vi.conj() * tau;
                let col = &mut mat.data[(j + 1 + i) * n..(j + 2 + i) * n];
                for (y, &acc) in col.iter_mut().zip(w.iter()) {
                    *y -= acc * f;
                }
            }
        }
    }
}

/// Rotation `G = [[c, s], [-s̄, c]]` with `G [x, y]ᵀ = [r, 0]ᵀ`.
#[inline]
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ax = x.norm();
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, ZERO);
    }
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let nrm = ax.hypot(ay);
    (ax / nrm, (x / ax) * y.conj() / nrm)
}

/// Wilkinson shift: eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let p = (a - d) * 0.5;
    let bc = b * c;
    let disc = (p * p + bc).sqrt();
    let den_plus = p + disc;
    let den_minus = p - disc;
    let den = if den_plus.norm() >= den_minus.norm() {
        den_plus
    } else {
        den_minus
    };
    if den == ZERO {
        d
    } else {
        d - bc / den
    }
}

/// Complex Schur decomposition of a general square matrix.
pub fn schur(a: &CMatrix) -> Result<Schur, LinalgError> {
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let n = a.n;
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    reduce_to_hessenberg(&mut h, &mut q);
    if n < 2 {
        return Ok(Schur { q, t: h });
    }

    let scale = h
        .data
        .iter()
        .map(|z| z.norm())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let small = f64::MIN_POSITIVE * (n as f64) / f64::EPSILON;
    let max_sweeps = 30 * n.max(10);
    let mut total_sweeps = 0usize;
    let mut ihi = n - 1;
    let mut its = 0usize;

    while ihi > 0 {
        // locate the start of the active unreduced block
        let mut l = 0;
        for k in (1..=ihi).rev() {
            let sub = h.get(k, k - 1).norm();
            let mut diag = h.get(k - 1, k - 1).norm() + h.get(k, k).norm();
            if diag == 0.0 {
                diag = scale;
            }
            if sub <= f64::EPSILON * diag || sub <= small {
                h.set(k, k - 1, ZERO);
                l = k;
                break;
            }
        }
        if l == ihi {
            ihi -= 1;
            its = 0;
            continue;
        }
        if total_sweeps >= max_sweeps {
            return Err(LinalgError::NoConvergence(total_sweeps));
        }
        total_sweeps += 1;
        its += 1;

        let mu = if its.is_multiple_of(11) {
            // exceptional shift to break cycles
            h.get(ihi, ihi) + Complex64::new(0.75 * h.get(ihi, ihi - 1).norm(), 0.0)
        } else {
            wilkinson(
                h.get(ihi - 1, ihi - 1),
                h.get(ihi - 1, ihi),
                h.get(ihi, ihi - 1),
                h.get(ihi, ihi),
            )
        };

        let mut x = h.get(l, l) - mu;
        let mut y = h.get(l + 1, l);
        for k in l..ihi {
            if k > l {
                x = h.get(k, k - 1);
                y = h.get(k + 1, k - 1);
            }
            let (c, s) = givens(x, y);
            let sc = s.conj();
            // rows k, k+1 over all columns to the right (full Schur form)
            let start = if k > l { k - 1 } else { l };
            for col in start..n {
                let base = col * n + k;
                let a0 = h.data[base];
                let a1 = h.data[base + 1];
                h.data[base] = a0 * c + s * a1;
                h.data[base + 1] = a1 * c - sc * a0;
            }
            if k > l {
                h.data[(k - 1) * n + k + 1] = ZERO;
            }
            // columns k, k+1 of H (rows above the bulge) and of Q
            let last = (k + 2).min(ihi);
            {
                let (left, right) = h.data.split_at_mut((k + 1) * n);
                let ck = &mut left[k * n..k * n + last + 1];
                let ck1 = &mut right[..last + 1];
                rotate_columns(ck, ck1, c, s);
            }
            {
                let (left, right) = q.data.split_at_mut((k + 1) * n);
                let ck = &mut left[k * n..(k + 1) * n];
                let ck1 = &mut right[..n];
                rotate_columns(ck, ck1, c, s);
            }
        }
    }

    // clear the strictly lower part
    for c in 0..n {
        for r in c + 1..n {
            h.data[c * n + r] = ZERO;
        }
    }
    Ok(Schur { q, t: h })
}

/// `[a, b] <- [a, b] G†` with `G = [[c, s], [-s̄, c]]`.
#[inline]
fn rotate_columns(a: &mut [Complex64], b: &mut [Complex64], c: f64, s: Complex64) {
    let sc = s.conj();
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let x0 = *x;
        let y0 = *y;
        *x = x0 * c + y0 * sc;
        *y = y0 * c - x0 * s;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        CMatrix::from_fn(n, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    fn check_schur(a: &CMatrix, tol: f64) {
        let s = schur(a).unwrap();
        let n = a.dim();
        assert!(s.q.unitarity_residual() < tol, "Q not unitary");
        let qt = s.q.matmul(&s.t).unwrap();
        let back = qt.matmul(&s.q.adjoint()).unwrap();
        for r in 0..n {
            for c in 0..n {
                assert!(
                    (back.get(r, c) - a.get(r, c)).norm() < tol,
                    "reconstruction ({r},{c})"
                );
                if r > c {
                    assert_eq!(s.t.get(r, c), ZERO);
                }
            }
        }
    }

    #[test]
    fn schur_of_general_matrices() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (7, 4), (40, 5), (65, 6)] {
            check_schur(&random_matrix(n, seed), 1e-11);
        }
    }

    #[test]
    fn schur_of_diagonal_and_triangular() {
        let d = CMatrix::from_fn(5, |r, c| {
            if r == c {
                Complex64::from_polar(1.0, r as f64)
            } else {
                ZERO
            }
        });
        let s = schur(&d).unwrap();
        for i in 0..5 {
            assert!((s.t.get(i, i) - d.get(i, i)).norm() < 1e-15);
        }
        let u = CMatrix::from_fn(6, |r, c| {
            if r <= c {
                Complex64::new((r + c) as f64, 1.0)
            } else {
                ZERO
            }
        });
        check_schur(&u, 1e-11);
    }

    #[test]
    fn products() {
        let a = random_matrix(9, 10);
        let b = random_matrix(9, 11);
        let ab = a.matmul(&b).unwrap();
        let ahb = a.adjoint_matmul(&b).unwrap();
        let ahb2 = a.adjoint().matmul(&b).unwrap();
        for r in 0..9 {
            for c in 0..9 {
                let direct: Complex64 = (0..9).map(|k| a.get(r, k) * b.get(k, c)).sum();
                assert!((ab.get(r, c) - direct).norm() < 1e-13);
                assert!((ahb.get(r, c) - ahb2.get(r, c)).norm() < 1e-13);
            }
        }
        assert!(a.matmul(&CMatrix::identity(3)).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        let mut a = CMatrix::identity(3);
        a.set(1, 2, Complex64::new(f64::NAN, 0.0));
        assert_eq!(schur(&a).unwrap_err(), LinalgError::NonFinite);
    }
}
