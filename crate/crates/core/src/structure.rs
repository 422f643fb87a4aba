//! Structure of the twin space with respect to stories.
//!
//! Every nonzero two-state vector forms a story with some two-outcome
//! measurement ([`find_story_measurement`]); only traceless vectors can fail
//! to form one ([`is_traceless`]); and for a fixed measurement the vectors
//! that fail form a linear subspace of dimension `d² - #outcomes`
//! ([`null_subspace`]).

use nalgebra::SVD;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, I, ONE, ZERO};
use crate::measurement::{self, Measurement};
use crate::twin::{self, StateVector, TwoStateVector};

/// Singular values below this fraction of the largest count as zero when
/// extracting the null subspace.
pub const KERNEL_TOL: f64 = 1e-9;

/// Which witness family produced a story certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CaseTag {
    /// Projection onto `|n⟩` with `M_nn ≠ 0`.
    Diagonal,
    /// Projection onto `(|m⟩ + i|n⟩)/√2` for an antisymmetric matrix.
    Antisymmetric,
    /// Projection onto `(|m⟩ + |n⟩)/√2` with `M_mn + M_nm ≠ 0`.
    SymmetricOffdiag,
}

#[derive(Debug, Clone, Serialize)]
pub struct StoryCertificate {
    pub case_tag: CaseTag,
    pub witness_state: StateVector,
    pub measurement: Measurement,
    pub amplitude_magnitude: f64,
}

impl StoryCertificate {
    /// Re-evaluates `|⟨w|M|w⟩|` and checks it against `tol·‖v‖`.
    pub fn verify(&self, v: &TwoStateVector, tol: f64) -> bool {
        let p = self.witness_state.projector();
        let amp = linalg::trace_of_product(&p, v.matrix()).norm();
        (amp - self.amplitude_magnitude).abs() <= 1e-12 * v.norm().max(amp) && amp > tol * v.norm()
    }
}

fn witness_amplitude(w: &StateVector, m: &CMatrix) -> f64 {
    linalg::trace_of_product(&w.projector(), m).norm()
}

fn pair_state(dim: usize, m: usize, n: usize, phase: num_complex::Complex64) -> StateVector {
    let mut amps = vec![ZERO; dim];
    amps[m] = ONE;
    amps[n] = phase;
    StateVector::unit(amps).expect("two nonzero entries")
}

/// Candidate witness from the first applicable family (diagonal, then
/// antisymmetric, then symmetric off-diagonal), chosen by the largest relevant
/// coefficient.
fn cascade(v: &TwoStateVector, tol: f64) -> (CaseTag, StateVector) {
    let m = v.matrix();
    let d = v.dim();
    let norm = v.norm();

    let (n, diag) = (0..d)
        .map(|n| (n, m[(n, n)].norm()))
        .fold((0, -1.0), |best, x| if x.1 > best.1 { x } else { best });
    if diag > tol * norm || d == 1 {
        return (
            CaseTag::Diagonal,
            StateVector::basis(d, n).expect("in range"),
        );
    }

    let symmetric_part = linalg::hs_norm(&(m + m.transpose()));
    if symmetric_part <= tol * norm {
        let (a, b) = argmax_pair(d, |a, b| m[(a, b)].norm());
        return (CaseTag::Antisymmetric, pair_state(d, a, b, I));
    }

    let (a, b) = argmax_pair(d, |a, b| (m[(a, b)] + m[(b, a)]).norm());
    (CaseTag::SymmetricOffdiag, pair_state(d, a, b, ONE))
}

fn argmax_pair(d: usize, score: impl Fn(usize, usize) -> f64) -> (usize, usize) {
    let mut best = ((0, 1), -1.0);
    for a in 0..d {
        for b in a + 1..d {
            let s = score(a, b);
            if s > best.1 {
                best = ((a, b), s);
            }
        }
    }
    best.0
}

/// Best witness over every member of the three families. Used only when the
/// cascade lands on a numerically degenerate boundary.
fn exhaustive(v: &TwoStateVector) -> (CaseTag, StateVector) {
    let d = v.dim();
    let mut candidates: Vec<(CaseTag, StateVector)> = (0..d)
        .map(|n| {
            (
                CaseTag::Diagonal,
                StateVector::basis(d, n).expect("in range"),
            )
        })
        .collect();
    for a in 0..d {
        for b in a + 1..d {
            candidates.push((CaseTag::Antisymmetric, pair_state(d, a, b, I)));
            candidates.push((CaseTag::SymmetricOffdiag, pair_state(d, a, b, ONE)));
        }
    }
    candidates
        .into_iter()
        .map(|(tag, w)| {
            let amp = witness_amplitude(&w, v.matrix());
            (tag, w, amp)
        })
        .fold(
            None,
            |best: Option<(CaseTag, StateVector, f64)>, c| match best {
                Some(b) if b.2 >= c.2 => Some(b),
                _ => Some(c),
            },
        )
        .map(|(tag, w, _)| (tag, w))
        .expect("at least one candidate")
}

/// Two-outcome measurement `{|w⟩⟨w|, 1 - |w⟩⟨w|}`, or `{1}` in dimension one.
pub fn witness_measurement(w: &StateVector) -> Result<Measurement> {
    let d = w.dim();
    if d == 1 {
        return Measurement::identity(1);
    }
    let p = w.projector();
    let q = CMatrix::identity(d, d) - &p;
    measurement::validate_measurement(vec![p, q], 1e-9)
}

/// Constructs a measurement that forms a story with `v`, following the
/// diagonal / antisymmetric / symmetric case split.
pub fn find_story_measurement(v: &TwoStateVector, tol: f64) -> Result<StoryCertificate> {
    let threshold = tol * v.norm();
    let (mut tag, mut w) = cascade(v, tol);
    let mut amp = witness_amplitude(&w, v.matrix());
    if amp <= threshold {
        (tag, w) = exhaustive(v);
        amp = witness_amplitude(&w, v.matrix());
        if amp <= threshold {
            return Err(Error::NoWitness);
        }
    }
    Ok(StoryCertificate {
        case_tag: tag,
        measurement: witness_measurement(&w)?,
        witness_state: w,
        amplitude_magnitude: amp,
    })
}

/// `|Tr v| ≤ tol·‖v‖`.
pub fn is_traceless(v: &TwoStateVector, tol: f64) -> bool {
    twin::trace_functional(v).norm() <= tol * v.norm()
}

/// Orthonormal basis of the vectors that form no story with a measurement.
#[derive(Debug, Clone, Serialize)]
pub struct NullSubspace {
    pub measurement: Measurement,
    pub basis: Vec<TwoStateVector>,
    pub dimension: usize,
}

/// Kernel of `v ↦ (Tr P_1 v, …, Tr P_k v)` over the `d²` matrix coordinates,
/// extracted from a full SVD of the (zero-padded) constraint matrix.
pub fn null_subspace(m: &Measurement, tol: f64) -> Result<NullSubspace> {
    let d = m.dim();
    let n = d * d;
    let k = m.len();
    let mut constraints = CMatrix::zeros(n.max(k), n);
    for (i, p) in m.projectors().iter().enumerate() {
        for a in 0..d {
            for b in 0..d {
                constraints[(i, a * d + b)] = p.matrix()[(b, a)];
            }
        }
    }
    let svd = SVD::new(constraints, false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let largest = svd.singular_values.iter().cloned().fold(0.0, f64::max);

    let basis: Vec<TwoStateVector> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol * largest)
        .map(|(r, _)| {
            let coords = CMatrix::from_fn(d, d, |a, b| v_t[(r, a * d + b)].conj());
            TwoStateVector::from_matrix(coords).expect("rows of a unitary are nonzero")
        })
        .collect();

    let expected = n - k;
    if basis.len() != expected {
        return Err(Error::KernelDimension {
            expected,
            found: basis.len(),
        });
    }
    Ok(NullSubspace {
        measurement: m.clone(),
        dimension: basis.len(),
        basis,
    })
}

/// Residual of `v` after orthogonal projection onto the null subspace.
pub fn null_residual(v: &TwoStateVector, ns: &NullSubspace) -> Result<f64> {
    if v.dim() != ns.measurement.dim() {
        return Err(Error::DimensionMismatch {
            expected: ns.measurement.dim(),
            found: v.dim(),
        });
    }
    let mut r = v.matrix().clone();
    for e in &ns.basis {
        let c = twin::hs_inner(e, v)?;
        r -= e.matrix() * c;
    }
    Ok(linalg::hs_norm(&r))
}

/// `v ∈ N` iff its residual against the kernel basis is at most `tol·‖v‖`.
pub fn membership_in_null(v: &TwoStateVector, ns: &NullSubspace, tol: f64) -> Result<bool> {
    Ok(null_residual(v, ns)? <= tol * v.norm())
}

/// Two story-forming vectors whose sum forms no story with the measurement,
/// showing the complement of `N` is not closed under addition. `None` when
/// `N` is trivial.
pub fn complement_counterexample(ns: &NullSubspace) -> Option<(TwoStateVector, TwoStateVector)> {
    let e = ns.basis.first()?;
    let d = e.dim();
    // The identity has trace d and so forms a story with every measurement.
    let x = CMatrix::identity(d, d) * linalg::real(e.norm());
    let u = TwoStateVector::from_matrix(e.matrix() + &x).ok()?;
    let w = TwoStateVector::from_matrix(e.matrix() - &x).ok()?;
    Some((u, w))
}
