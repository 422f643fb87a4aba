//! Small dense complex matrix helpers shared by the twin-space modules.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Builds a matrix from row-major nested rows, rejecting ragged input.
pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<CMatrix> {
    let nrows = rows.len();
    if nrows == 0 {
        return Err(Error::Malformed("matrix has no rows".into()));
    }
    let ncols = rows[0].len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
        return Err(Error::Malformed(format!(
            "row {i} has {} entries, expected {ncols}",
            r.len()
        )));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

pub fn to_rows(m: &CMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Hilbert-Schmidt (Frobenius) norm.
pub fn hs_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `Tr(P M)` without forming the product.
pub fn trace_of_product(p: &CMatrix, m: &CMatrix) -> Complex64 {
    let d = p.nrows();
    let mut acc = ZERO;
    for k in 0..d {
        for l in 0..d {
            acc += p[(l, k)] * m[(k, l)];
        }
    }
    acc
}

/// `|ket><bra|` for column vectors, i.e. `ket * bra^dagger`.
pub fn ket_bra(ket: &[Complex64], bra: &[Complex64]) -> CMatrix {
    CMatrix::from_fn(ket.len(), bra.len(), |i, j| ket[i] * bra[j].conj())
}

pub fn is_zero(m: &CMatrix) -> bool {
    m.iter().all(|z| *z == ZERO)
}

/// Largest entry of `|A^dagger - A|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    max_abs(&(m.adjoint() - m))
}

/// Numerical rank of a Hermitian positive semidefinite matrix by counting
/// eigenvalues above `tol`.
pub fn psd_rank(m: &CMatrix, tol: f64) -> usize {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    eig.eigenvalues.iter().filter(|&&e| e > tol).count()
}

pub fn dagger_dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}
