//! Independent recomputations of the three-level counterexample.
//!
//! Projectors are built here from explicit kets rather than taken from the
//! library, and the separable residual is evaluated with plain loops.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use twinspace::distinguish::{reduce_example3, separable_feasibility, zero_constraints, Verdict};
use twinspace::random::derived_rng;
use twinspace::workspace::Workspace;

type Mat = [[Complex64; 3]; 3];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `1 - |b⟩⟨b|` for a unit `b` in span{|0⟩, |1⟩}.
fn complement(b: [Complex64; 2]) -> Mat {
    let mut p = [[c(0.0, 0.0); 3]; 3];
    for (r, row) in p.iter_mut().enumerate() {
        for (s, x) in row.iter_mut().enumerate() {
            let proj = if r < 2 && s < 2 {
                b[r] * b[s].conj()
            } else {
                c(0.0, 0.0)
            };
            *x = if r == s { c(1.0, 0.0) } else { c(0.0, 0.0) } - proj;
        }
    }
    p
}

fn zero_outcome_projectors() -> [Mat; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [
        complement([c(1.0, 0.0), c(0.0, 0.0)]),
        complement([c(0.0, 0.0), c(1.0, 0.0)]),
        complement([c(h, 0.0), c(h, 0.0)]),
        complement([c(h, 0.0), c(0.0, h)]),
    ]
}

/// `Tr(P (α⊗β))` with `(α⊗β)[k][l] = α_k β_l`.
fn amplitude(p: &Mat, a: &[Complex64; 3], b: &[Complex64; 3]) -> Complex64 {
    let mut s = c(0.0, 0.0);
    for k in 0..3 {
        for l in 0..3 {
            s += p[l][k] * a[k] * b[l];
        }
    }
    s
}

fn unit<R: Rng>(rng: &mut R) -> [Complex64; 3] {
    let mut v = [c(0.0, 0.0); 3];
    for x in &mut v {
        *x = c(rng.sample(StandardNormal), rng.sample(StandardNormal));
    }
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.map(|z| z / n)
}

/// Scale-free residual `Σ_c |Tr P_c Φ|² / |α_0 β_0|²`.
fn residual(ps: &[Mat; 4], a: &[Complex64; 3], b: &[Complex64; 3]) -> f64 {
    let num: f64 = ps.iter().map(|p| amplitude(p, a, b).norm_sqr()).sum();
    num / (a[0] * b[0]).norm_sqr()
}

#[test]
fn random_separable_pairs_never_satisfy_the_constraints() {
    let ps = zero_outcome_projectors();
    let mut rng = derived_rng(2024, 0);
    let mut best = f64::INFINITY;
    for _ in 0..20_000 {
        let a = unit(&mut rng);
        let b = unit(&mut rng);
        best = best.min(residual(&ps, &a, &b));
    }
    // The infimum over all separable vectors is 3/8.
    assert!(best >= 0.375 - 1e-9, "best residual {best}");
}

#[test]
fn solver_reaches_the_infimum() {
    let ws = Workspace::bundled();
    let family: Vec<_> = (1..=4)
        .map(|i| ws.measurement(&format!("ex3_m{i}")).unwrap().clone())
        .collect();
    let sys = zero_constraints(ws.vector("ex3").unwrap(), &family, 1e-10).unwrap();
    let report = separable_feasibility(&sys, 64, 5, 1e-3).unwrap();
    assert_eq!(report.verdict, Verdict::InfeasibleEvidence);
    assert!(
        (report.best_residual - 0.375).abs() < 1e-6,
        "{}",
        report.best_residual
    );
    assert!(report.witness.is_none());
}

#[test]
fn reduction_coefficients_match_hand_built_projectors() {
    let ws = Workspace::bundled();
    let family: Vec<_> = (1..=4)
        .map(|i| ws.measurement(&format!("ex3_m{i}")).unwrap().clone())
        .collect();
    let sys = zero_constraints(ws.vector("ex3").unwrap(), &family, 1e-10).unwrap();
    let red = reduce_example3(&sys).unwrap();
    let ps = zero_outcome_projectors();
    assert_eq!(red.equations.len(), 4);
    for (eq, p) in red.equations.iter().zip(&ps) {
        for (k, row) in eq.coefficients.iter().enumerate() {
            for (l, x) in row.iter().enumerate() {
                assert!((x - p[l][k]).norm() < 1e-12, "({k},{l})");
            }
        }
    }
    let expected = [
        (0, 1, c(0.0, 0.0)),
        (1, 0, c(0.0, 0.0)),
        (1, 1, c(1.0, 0.0)),
        (2, 2, c(-1.0, 0.0)),
    ];
    assert_eq!(red.anchor, (0, 0));
    for (k, l, v) in expected {
        let got = red
            .reduced
            .iter()
            .find(|r| (r.0, r.1) == (k, l))
            .expect("pivot present");
        assert!((got.2 - v).norm() < 1e-12, "({k},{l}) = {}", got.2);
    }
    assert!(red.contradiction);
    assert!(red.violated_minor.is_some());
    assert_eq!(red.text, reduce_example3(&sys).unwrap().text);
}
