//! Twin-space objects: ordinary state vectors and two-state vectors.
//!
//! A two-state vector `Σ_k a_k |ψ_k⟩⊗⟨φ_k|` is stored in its normal form, the
//! `d×d` coefficient matrix `M[k][l]` in the product basis `|k⟩⊗⟨l|`. Under the
//! Hilbert-Schmidt identification this is just the operator `Σ_k a_k ψ_k φ_k†`,
//! so the inner product, trace and time reversal are the usual operator ones.
//!
//! Nothing here normalizes a two-state vector: every predicate is invariant
//! under a global complex rescaling, and [`TwoStateVector::normalized`] exists
//! only for presentation.

use std::ops::{Add, Mul, Sub};

use nalgebra::SVD;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, ZERO};
use crate::MAX_DIM;

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        Err(Error::UnsupportedDimension(dim))
    } else {
        Ok(())
    }
}

/// An ordinary ket (or, read as a bra, its dual).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateVectorRepr", into = "StateVectorRepr")]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct StateVectorRepr {
    dim: usize,
    amplitudes: Vec<Complex64>,
}

impl TryFrom<StateVectorRepr> for StateVector {
    type Error = Error;

    fn try_from(r: StateVectorRepr) -> Result<Self> {
        if r.amplitudes.len() != r.dim {
            return Err(Error::DimensionMismatch {
                expected: r.dim,
                found: r.amplitudes.len(),
            });
        }
        StateVector::new(r.amplitudes)
    }
}

impl From<StateVector> for StateVectorRepr {
    fn from(s: StateVector) -> Self {
        StateVectorRepr {
            dim: s.amplitudes.len(),
            amplitudes: s.amplitudes,
        }
    }
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        check_dim(amplitudes.len())?;
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Malformed("non-finite amplitude".into()));
        }
        if amplitudes.iter().all(|z| *z == ZERO) {
            return Err(Error::ZeroVector);
        }
        Ok(StateVector { amplitudes })
    }

    /// Like [`StateVector::new`] but requires `Σ|c_k|² = 1` within `tol`.
    pub fn normalized(amplitudes: Vec<Complex64>, tol: f64) -> Result<Self> {
        let v = Self::new(amplitudes)?;
        let n = v.norm_sqr();
        if (n - 1.0).abs() > tol {
            return Err(Error::NotNormalized(n));
        }
        Ok(v)
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn unit(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = Self::new(amplitudes)?;
        let n = v.norm_sqr().sqrt();
        Ok(StateVector {
            amplitudes: v.amplitudes.into_iter().map(|z| z / n).collect(),
        })
    }

    /// Computational basis vector `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        check_dim(dim)?;
        if k >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {k} out of range for dimension {dim}"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[k] = linalg::ONE;
        Ok(StateVector { amplitudes })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| linalg::real(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        linalg::dagger_dot(&self.amplitudes, &other.amplitudes)
    }

    /// `|self⟩⟨self|` for a unit vector.
    pub fn projector(&self) -> CMatrix {
        linalg::ket_bra(&self.amplitudes, &self.amplitudes)
    }
}

/// An element of the twin space, stored as its coefficient matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TwoStateVectorRepr", into = "TwoStateVectorRepr")]
pub struct TwoStateVector {
    matrix: CMatrix,
}

#[derive(Serialize, Deserialize)]
pub(crate) struct TwoStateVectorRepr {
    dim: usize,
    matrix: Vec<Vec<Complex64>>,
}

impl TryFrom<TwoStateVectorRepr> for TwoStateVector {
    type Error = Error;

    fn try_from(r: TwoStateVectorRepr) -> Result<Self> {
        let m = linalg::from_rows(&r.matrix)?;
        if m.nrows() != r.dim {
            return Err(Error::DimensionMismatch {
                expected: r.dim,
                found: m.nrows(),
            });
        }
        TwoStateVector::from_matrix(m)
    }
}

impl From<TwoStateVector> for TwoStateVectorRepr {
    fn from(v: TwoStateVector) -> Self {
        TwoStateVectorRepr {
            dim: v.dim(),
            matrix: linalg::to_rows(&v.matrix),
        }
    }
}

impl TwoStateVector {
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        check_dim(matrix.nrows())?;
        if matrix
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Malformed("non-finite matrix entry".into()));
        }
        if linalg::is_zero(&matrix) {
            return Err(Error::ZeroVector);
        }
        Ok(TwoStateVector { matrix })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        Self::from_matrix(linalg::from_rows(rows)?)
    }

    /// Builds `Σ_k w_k |ψ_k⟩⊗⟨φ_k|` from (weight, ket, bra-state) terms.
    pub fn from_pairs(terms: &[(Complex64, StateVector, StateVector)]) -> Result<Self> {
        let (_, first, _) = terms.first().ok_or(Error::Empty)?;
        let dim = first.dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (w, ket, bra) in terms {
            for found in [ket.dim(), bra.dim()] {
                if found != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found,
                    });
                }
            }
            m += linalg::ket_bra(ket.amplitudes(), bra.amplitudes()) * *w;
        }
        Self::from_matrix(m)
    }

    /// The separable vector `|ket⟩⊗⟨bra|`.
    pub fn separable(ket: &StateVector, bra: &StateVector) -> Result<Self> {
        Self::from_pairs(&[(linalg::ONE, ket.clone(), bra.clone())])
    }

    /// `Σ_k d_k |k⟩⊗⟨k|`.
    pub fn diagonal(entries: &[Complex64]) -> Result<Self> {
        let d = entries.len();
        Self::from_matrix(CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                entries[i]
            } else {
                ZERO
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn entry(&self, k: usize, l: usize) -> Complex64 {
        self.matrix[(k, l)]
    }

    /// Hilbert-Schmidt norm `sqrt(⟨⟨v|v⟩⟩)`.
    pub fn norm(&self) -> f64 {
        linalg::hs_norm(&self.matrix)
    }

    pub fn max_entry(&self) -> f64 {
        linalg::max_abs(&self.matrix)
    }

    /// Copy rescaled to unit Hilbert-Schmidt norm.
    pub fn normalized(&self) -> TwoStateVector {
        let n = self.norm();
        TwoStateVector {
            matrix: self.matrix.map(|z| z / n),
        }
    }

    pub fn scale(&self, c: Complex64) -> Result<TwoStateVector> {
        Self::from_matrix(self.matrix.map(|z| z * c))
    }

    pub fn inner(&self, other: &TwoStateVector) -> Result<Complex64> {
        hs_inner(self, other)
    }

    pub fn trace(&self) -> Complex64 {
        trace_functional(self)
    }

    pub fn time_reversed(&self) -> TwoStateVector {
        time_reverse(self)
    }
}

/// Linear combinations that may cancel to zero return `Err(ZeroVector)` via
/// [`TwoStateVector::from_matrix`]; the operators below build the raw matrix.
impl Add for &TwoStateVector {
    type Output = CMatrix;

    fn add(self, rhs: &TwoStateVector) -> CMatrix {
        &self.matrix + &rhs.matrix
    }
}

impl Sub for &TwoStateVector {
    type Output = CMatrix;

    fn sub(self, rhs: &TwoStateVector) -> CMatrix {
        &self.matrix - &rhs.matrix
    }
}

impl Mul<Complex64> for &TwoStateVector {
    type Output = CMatrix;

    fn mul(self, rhs: Complex64) -> CMatrix {
        self.matrix.map(|z| z * rhs)
    }
}

fn same_dim(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        })
    }
}

/// Canonical inner product `Σ_{k,l} conj(A_kl) B_kl`.
pub fn hs_inner(a: &TwoStateVector, b: &TwoStateVector) -> Result<Complex64> {
    same_dim(a.dim(), b.dim())?;
    Ok(a.matrix
        .iter()
        .zip(b.matrix.iter())
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// `Tr v = Σ_k M_kk`.
pub fn trace_functional(v: &TwoStateVector) -> Complex64 {
    v.matrix.diagonal().iter().sum()
}

/// Time reversal swaps kets and bras and conjugates the weights, which on the
/// coefficient matrix is the conjugate transpose.
pub fn time_reverse(v: &TwoStateVector) -> TwoStateVector {
    TwoStateVector {
        matrix: v.matrix.adjoint(),
    }
}

/// Singular value decomposition `M = Σ_r s_r |u_r⟩⊗⟨v_r|`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub singular_values: Vec<f64>,
    pub left_vectors: Vec<StateVector>,
    pub right_vectors: Vec<StateVector>,
    pub rank: usize,
}

impl SchmidtDecomposition {
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.left_vectors[0].dim();
        let mut m = CMatrix::zeros(d, d);
        for ((s, u), v) in self
            .singular_values
            .iter()
            .zip(&self.left_vectors)
            .zip(&self.right_vectors)
        {
            m += linalg::ket_bra(u.amplitudes(), v.amplitudes()) * linalg::real(*s);
        }
        m
    }
}

/// Schmidt decomposition; `rank` counts singular values above `tol` times the
/// largest one.
pub fn schmidt(v: &TwoStateVector, tol: f64) -> SchmidtDecomposition {
    let d = v.dim();
    let svd = SVD::new(v.matrix.clone(), true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let singular_values: Vec<f64> = order.iter().map(|&r| svd.singular_values[r]).collect();
    let column = |r: usize| u.column(r).iter().copied().collect::<Vec<_>>();
    // M = U S V^H, so the bra states are the rows of V^H conjugated.
    let row = |r: usize| v_t.row(r).iter().map(|z| z.conj()).collect::<Vec<_>>();
    let left_vectors = order
        .iter()
        .map(|&r| StateVector {
            amplitudes: column(r),
        })
        .collect();
    let right_vectors = order
        .iter()
        .map(|&r| StateVector { amplitudes: row(r) })
        .collect();

    let largest = singular_values[0];
    let rank = singular_values
        .iter()
        .filter(|&&s| s > tol * largest)
        .count();

    SchmidtDecomposition {
        singular_values,
        left_vectors,
        right_vectors,
        rank,
    }
}

/// Separable iff the Schmidt rank is one.
pub fn is_separable(v: &TwoStateVector, tol: f64) -> bool {
    schmidt(v, tol).rank == 1
}
