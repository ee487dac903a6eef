//! Dense complex linear algebra helpers shared by the channel and certifier code.
//!
//! Everything here works on `DMatrix<Complex64>`. Dimensions stay small
//! (at most a few dozen), so dense storage and O(n^3) eigensolves are fine.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub fn czero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

pub fn cre(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn zeros(r: usize, c: usize) -> CMat {
    CMat::zeros(r, c)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().iter().sum()
}

/// (m + m†)/2. Used before eigensolves to kill asymmetric round-off.
pub fn hermitize(m: &CMat) -> CMat {
    (m + dagger(m)).scale(0.5)
}

/// Eigendecomposition of a Hermitian matrix. Returns (eigenvalues, column eigenvectors),
/// unordered. The input is hermitized first.
pub fn herm_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let se = hermitize(m).symmetric_eigen();
    (se.eigenvalues.iter().copied().collect(), se.eigenvectors)
}

pub fn herm_eigenvalues(m: &CMat) -> Vec<f64> {
    let mut ev: Vec<f64> = hermitize(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Trace norm of a Hermitian matrix (sum of absolute eigenvalues).
pub fn trace_norm_hermitian(m: &CMat) -> f64 {
    herm_eigenvalues(m).iter().map(|l| l.abs()).sum()
}

/// Largest absolute entry. Cheap residual metric for completeness checks.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Partial trace over the first factor of C^{d1} ⊗ C^{d2}.
pub fn partial_trace_first(m: &CMat, d1: usize, d2: usize) -> CMat {
    debug_assert_eq!(m.nrows(), d1 * d2);
    let mut out = zeros(d2, d2);
    for k in 0..d2 {
        for l in 0..d2 {
            let mut acc = czero();
            for a in 0..d1 {
                acc += m[(a * d2 + k, a * d2 + l)];
            }
            out[(k, l)] = acc;
        }
    }
    out
}

/// Partial trace over the second factor of C^{d1} ⊗ C^{d2}.
pub fn partial_trace_second(m: &CMat, d1: usize, d2: usize) -> CMat {
    debug_assert_eq!(m.nrows(), d1 * d2);
    let mut out = zeros(d1, d1);
    for a in 0..d1 {
        for b in 0..d1 {
            let mut acc = czero();
            for k in 0..d2 {
                acc += m[(a * d2 + k, b * d2 + k)];
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// Inverse square root of a positive definite Hermitian matrix.
/// Eigenvalues are floored at `floor` before inversion.
pub fn inv_sqrt_psd(m: &CMat, floor: f64) -> CMat {
    let (ev, vecs) = herm_eigen(m);
    let d = m.nrows();
    let mut out = zeros(d, d);
    for (k, lam) in ev.iter().enumerate() {
        let l = lam.max(floor);
        let col = vecs.column(k);
        let w = cre(1.0 / l.sqrt());
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] += w * col[i] * col[j].conj();
            }
        }
    }
    out
}

// Real parameterization of Hermitian matrices over an orthonormal basis:
// diagonal entries, then (√2 Re, √2 Im) of each strict upper-triangle entry.
// Orthonormality makes Frobenius distance equal Euclidean distance in params.

pub fn herm_param_len(d: usize) -> usize {
    d * d
}

pub fn herm_to_vec(m: &CMat) -> DVector<f64> {
    let d = m.nrows();
    let mut v = DVector::zeros(d * d);
    let mut idx = 0;
    for i in 0..d {
        v[idx] = m[(i, i)].re;
        idx += 1;
    }
    let s = std::f64::consts::SQRT_2;
    for i in 0..d {
        for j in (i + 1)..d {
            v[idx] = s * m[(i, j)].re;
            v[idx + 1] = s * m[(i, j)].im;
            idx += 2;
        }
    }
    v
}

pub fn vec_to_herm(v: &DVector<f64>, d: usize) -> CMat {
    debug_assert_eq!(v.len(), d * d);
    let mut m = zeros(d, d);
    let mut idx = 0;
    for i in 0..d {
        m[(i, i)] = cre(v[idx]);
        idx += 1;
    }
    let inv_s = 1.0 / std::f64::consts::SQRT_2;
    for i in 0..d {
        for j in (i + 1)..d {
            let re = v[idx] * inv_s;
            let im = v[idx + 1] * inv_s;
            idx += 2;
            m[(i, j)] = Complex64::new(re, im);
            m[(j, i)] = Complex64::new(re, -im);
        }
    }
    m
}
