//! Small dense complex matrix helpers shared by every module.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

/// `u · rho · u†`
pub fn conjugate(u: &CMatrix, rho: &CMatrix) -> CMatrix {
    u * rho * u.adjoint()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// `‖U†U − 1‖_max`
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    max_abs_diff(&(u.adjoint() * u), &identity(u.nrows()))
}

pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn diag_real(m: &CMatrix) -> Vec<f64> {
    (0..m.nrows()).map(|i| m[(i, i)].re).collect()
}

pub fn from_real_diagonal(values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(values[i], 0.0) } else { ZERO })
}

pub fn from_rows(rows: &[&[C64]]) -> CMatrix {
    let n = rows.len();
    CMatrix::from_fn(n, rows[0].len(), |i, j| rows[i][j])
}

/// Builds a 0/1 permutation matrix with `m[perm[j], j] = 1`, i.e. `|j⟩ → |perm[j]⟩`.
pub fn permutation_matrix(perm: &[usize]) -> CMatrix {
    let n = perm.len();
    let mut m = CMatrix::zeros(n, n);
    for (j, &i) in perm.iter().enumerate() {
        m[(i, j)] = ONE;
    }
    m
}

/// Reads the column permutation of a monomial matrix, if it is one.
pub fn monomial_permutation(m: &CMatrix, tol: f64) -> Option<Vec<usize>> {
    let n = m.nrows();
    let mut perm = vec![usize::MAX; n];
    let mut row_used = vec![false; n];
    for j in 0..n {
        let mut hit = None;
        for i in 0..n {
            if m[(i, j)].norm() > tol {
                if hit.is_some() {
                    return None;
                }
                hit = Some(i);
            }
        }
        let i = hit?;
        if row_used[i] {
            return None;
        }
        row_used[i] = true;
        perm[j] = i;
    }
    Some(perm)
}
