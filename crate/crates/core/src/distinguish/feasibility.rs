//! Can a separable two-state vector satisfy a target's zero constraints?
//!
//! A separable member `Φ = (Σ α_k|k⟩)⊗(Σ β_l⟨l|)` of a replicating mixture
//! must have `Tr(P Φ) = 0` on every zero outcome of the target while still
//! forming a story on the anchor outcome. Both conditions are homogeneous in
//! `α` and `β`, so the search minimizes the scale-free ratio
//!
//! ```text
//! R(α, β) = Σ_c |Tr(P_c Φ)|² / |Tr(P_anchor Φ)|²
//! ```
//!
//! For fixed `β` every amplitude is linear in `α` and `R` is minimized in
//! closed form (and symmetrically for `α`), so each start runs alternating
//! exact minimization from a random pair of unit vectors.

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::{bilinear_amplitude, ZeroConstraintSystem};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::random;
use crate::twin::{StateVector, TwoStateVector};

const MAX_SWEEPS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Feasible,
    InfeasibleEvidence,
    Inconclusive,
}

/// Separable solution: ket coefficients `α` and bra coefficients `β`, both of
/// unit norm. The two-state vector is `Σ_{k,l} α_k β_l |k⟩⊗⟨l|`.
#[derive(Debug, Clone, Serialize)]
pub struct SeparableWitness {
    pub alpha: StateVector,
    pub beta: StateVector,
}

impl SeparableWitness {
    pub fn vector(&self) -> TwoStateVector {
        let (a, b) = (self.alpha.amplitudes(), self.beta.amplitudes());
        TwoStateVector::from_matrix(CMatrix::from_fn(a.len(), b.len(), |k, l| a[k] * b[l]))
            .expect("product of unit vectors is nonzero")
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub verdict: Verdict,
    pub witness: Option<SeparableWitness>,
    /// Smallest ratio `R` over all starts.
    pub best_residual: f64,
    /// `Σ_c |Tr(P_c Φ)|²` at the best point with unit `α`, `β`.
    pub constraint_residual: f64,
    /// `|Tr(P_anchor Φ)|` at the best point.
    pub anchor_amplitude: f64,
    pub starts: usize,
    pub seed: u64,
    pub feasibility_tolerance: f64,
}

struct Evaluation {
    ratio: f64,
    constraint: f64,
    anchor: f64,
}

fn evaluate(sys: &ZeroConstraintSystem, alpha: &[Complex64], beta: &[Complex64]) -> Evaluation {
    let constraint: f64 = sys
        .zero_outcomes
        .iter()
        .map(|&c| bilinear_amplitude(sys.projector(c), alpha, beta).norm_sqr())
        .sum();
    let anchor = bilinear_amplitude(sys.projector(sys.anchor), alpha, beta).norm();
    let ratio = if anchor > 0.0 {
        constraint / (anchor * anchor)
    } else {
        f64::INFINITY
    };
    Evaluation {
        ratio,
        constraint,
        anchor,
    }
}

/// `argmin_x Σ_c |r_c·x|²` subject to `r_anchor·x = 1`, returned unnormalized.
fn constrained_minimizer(rows: &[Vec<Complex64>], anchor: &[Complex64]) -> Option<Vec<Complex64>> {
    let d = anchor.len();
    let mut gram = CMatrix::zeros(d, d);
    for r in rows {
        for i in 0..d {
            for j in 0..d {
                gram[(i, j)] += r[i].conj() * r[j];
            }
        }
    }
    let scale: f64 = gram.diagonal().iter().map(|z| z.re).sum::<f64>()
        + anchor.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let lambda = 1e-13 * scale;
    for i in 0..d {
        gram[(i, i)] += Complex64::new(lambda, 0.0);
    }
    let rhs = DVector::from_iterator(d, anchor.iter().map(|z| z.conj()));
    let x = gram.lu().solve(&rhs)?;
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !norm.is_finite() || norm == 0.0 {
        return None;
    }
    Some(x.iter().map(|z| z / norm).collect())
}

/// Rows `r` with `Tr(P Φ) = r·α` for fixed `β`: `r_k = Σ_l β_l P_lk`.
fn rows_for_alpha(p: &CMatrix, beta: &[Complex64]) -> Vec<Complex64> {
    let d = beta.len();
    (0..d)
        .map(|k| (0..d).map(|l| beta[l] * p[(l, k)]).sum())
        .collect()
}

/// Rows `s` with `Tr(P Φ) = s·β` for fixed `α`: `s_l = Σ_k P_lk α_k`.
fn rows_for_beta(p: &CMatrix, alpha: &[Complex64]) -> Vec<Complex64> {
    let d = alpha.len();
    (0..d)
        .map(|l| (0..d).map(|k| p[(l, k)] * alpha[k]).sum())
        .collect()
}

struct LocalResult {
    ratio: f64,
    alpha: Vec<Complex64>,
    beta: Vec<Complex64>,
}

fn descend(
    sys: &ZeroConstraintSystem,
    mut alpha: Vec<Complex64>,
    mut beta: Vec<Complex64>,
) -> LocalResult {
    let mut best = LocalResult {
        ratio: evaluate(sys, &alpha, &beta).ratio,
        alpha: alpha.clone(),
        beta: beta.clone(),
    };
    let anchor_p = sys.projector(sys.anchor);
    for _ in 0..MAX_SWEEPS {
        let rows: Vec<_> = sys
            .zero_outcomes
            .iter()
            .map(|&c| rows_for_alpha(sys.projector(c), &beta))
            .collect();
        if let Some(a) = constrained_minimizer(&rows, &rows_for_alpha(anchor_p, &beta)) {
            alpha = a;
        }
        let rows: Vec<_> = sys
            .zero_outcomes
            .iter()
            .map(|&c| rows_for_beta(sys.projector(c), &alpha))
            .collect();
        if let Some(b) = constrained_minimizer(&rows, &rows_for_beta(anchor_p, &alpha)) {
            beta = b;
        }
        let ratio = evaluate(sys, &alpha, &beta).ratio;
        let previous = best.ratio;
        if ratio <= best.ratio {
            best = LocalResult {
                ratio,
                alpha: alpha.clone(),
                beta: beta.clone(),
            };
        }
        // A NaN ratio also stops the sweep.
        if best.ratio < 1e-30 || ratio.is_nan() || previous - ratio <= 1e-12 * previous {
            break;
        }
    }
    best
}

/// Multi-start search for a separable member satisfying the zero constraints.
/// Start `i` draws its initial point from stream `i` of `seed`, so the report
/// does not depend on how starts are scheduled.
pub fn separable_feasibility(
    sys: &ZeroConstraintSystem,
    starts: usize,
    seed: u64,
    feas_tol: f64,
) -> Result<FeasibilityReport> {
    if starts == 0 {
        return Err(Error::InvalidArgument("starts must be at least 1".into()));
    }
    if feas_tol.is_nan() || feas_tol <= 0.0 {
        return Err(Error::InvalidArgument(
            "feasibility tolerance must be positive".into(),
        ));
    }
    let d = sys.dim();
    let (_, best) = (0..starts)
        .into_par_iter()
        .map(|i| {
            let mut rng = random::derived_rng(seed, i as u64);
            let a = random::random_state(&mut rng, d).amplitudes().to_vec();
            let b = random::random_state(&mut rng, d).amplitudes().to_vec();
            (i, descend(sys, a, b))
        })
        .min_by(|(i, x), (j, y)| x.ratio.total_cmp(&y.ratio).then(i.cmp(j)))
        .expect("at least one start");

    let eval = evaluate(sys, &best.alpha, &best.beta);
    let floor = feas_tol * feas_tol;
    let verdict = if eval.ratio <= floor {
        Verdict::Feasible
    } else if eval.ratio >= 1e3 * floor {
        Verdict::InfeasibleEvidence
    } else {
        Verdict::Inconclusive
    };
    let witness = (verdict == Verdict::Feasible).then(|| SeparableWitness {
        alpha: StateVector::new(best.alpha.clone()).expect("unit vector"),
        beta: StateVector::new(best.beta.clone()).expect("unit vector"),
    });
    Ok(FeasibilityReport {
        verdict,
        witness,
        best_residual: eval.ratio,
        constraint_residual: eval.constraint,
        anchor_amplitude: eval.anchor,
        starts,
        seed,
        feasibility_tolerance: feas_tol,
    })
}
