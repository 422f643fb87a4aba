use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

use twinspace::distinguish::{mixture_statistics, zero_constraints, Mixture};
use twinspace::linalg::CMatrix;
use twinspace::measurement::random_measurement_with;
use twinspace::random::{derived_rng, random_separable, random_state, random_tsv};
use twinspace::structure::{find_story_measurement, membership_in_null, null_subspace};
use twinspace::{
    abl_probabilities, forms_story, hs_inner, outcome_amplitudes, schmidt, time_reverse,
    trace_functional, Measurement, StateVector, TwoStateVector,
};

const TOL: f64 = 1e-10;

/// Σ_{k,l} P[l][k] M[k][l], written out by hand.
fn trace_pm(p: &CMatrix, m: &CMatrix) -> Complex64 {
    let d = p.nrows();
    let mut s = Complex64::new(0.0, 0.0);
    for k in 0..d {
        for l in 0..d {
            s += p[(l, k)] * m[(k, l)];
        }
    }
    s
}

fn setup(seed: u64, dim: usize, outcomes: usize) -> (TwoStateVector, Measurement) {
    let mut rng = derived_rng(seed, 0);
    let v = random_tsv(&mut rng, dim);
    let m = random_measurement_with(&mut rng, dim, outcomes.clamp(1, dim)).unwrap();
    (v, m)
}

fn scale_factor(seed: u64) -> Complex64 {
    let mut rng = derived_rng(seed, 99);
    let r: f64 = rng.random_range(0.01..100.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(r, phi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn abl_is_scale_invariant(seed: u64, dim in 2usize..=6, k in 1usize..=6) {
        let (v, m) = setup(seed, dim, k);
        let sv = v.scale(scale_factor(seed)).unwrap();
        let p = abl_probabilities(&v, &m, TOL).unwrap();
        let q = abl_probabilities(&sv, &m, TOL).unwrap();
        prop_assert!(p.max_gap(&q) <= 1e-10);
    }

    #[test]
    fn abl_sums_to_one(seed: u64, dim in 1usize..=6, k in 1usize..=6) {
        let (v, m) = setup(seed, dim, k);
        if let Ok(p) = abl_probabilities(&v, &m, TOL) {
            prop_assert!((p.total() - 1.0).abs() <= 1e-12);
            prop_assert!(p.probabilities.iter().all(|&x| (0.0..=1.0 + 1e-12).contains(&x)));
        }
    }

    #[test]
    fn amplitudes_sum_to_trace(seed: u64, dim in 1usize..=6, k in 1usize..=6) {
        let (v, m) = setup(seed, dim, k);
        let a = outcome_amplitudes(&v, &m).unwrap();
        let sum: Complex64 = a.iter().sum();
        prop_assert!((sum - trace_functional(&v)).norm() <= 1e-12 * (1.0 + v.norm()));
        for (i, ai) in a.iter().enumerate() {
            prop_assert!((ai - trace_pm(m.projector(i).matrix(), v.matrix())).norm() <= 1e-12);
        }
    }

    #[test]
    fn ranks_sum_to_dimension(seed: u64, dim in 1usize..=8, k in 1usize..=8) {
        let (_, m) = setup(seed, dim, k);
        prop_assert_eq!(m.len(), k.clamp(1, dim));
        prop_assert_eq!(m.ranks().iter().sum::<usize>(), dim);
    }

    #[test]
    fn inner_product_is_conjugate_symmetric(seed: u64, dim in 1usize..=6) {
        let mut rng = derived_rng(seed, 1);
        let a = random_tsv(&mut rng, dim);
        let b = random_tsv(&mut rng, dim);
        let ab = hs_inner(&a, &b).unwrap();
        let ba = hs_inner(&b, &a).unwrap();
        prop_assert!((ab - ba.conj()).norm() <= 1e-12);
        prop_assert!((hs_inner(&a, &a).unwrap().re - a.norm().powi(2)).abs() <= 1e-10);
    }

    #[test]
    fn schmidt_reconstructs(seed: u64, dim in 1usize..=8) {
        let mut rng = derived_rng(seed, 2);
        let v = random_tsv(&mut rng, dim);
        let s = schmidt(&v, TOL);
        prop_assert!(twinspace::linalg::max_abs(&(s.reconstruct() - v.matrix())) <= 1e-10 * v.norm());
        prop_assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        let norm2: f64 = s.singular_values.iter().map(|x| x * x).sum();
        prop_assert!((norm2 - v.norm().powi(2)).abs() <= 1e-10);
    }

    #[test]
    fn separable_vectors_have_rank_one(seed: u64, dim in 1usize..=8) {
        let mut rng = derived_rng(seed, 3);
        prop_assert_eq!(schmidt(&random_separable(&mut rng, dim), TOL).rank, 1);
    }

    /// ABL for |ψ⟩⊗⟨φ| against |⟨φ|P_i|ψ⟩|² computed from state vectors.
    #[test]
    fn separable_abl_matches_transition_amplitudes(seed: u64, dim in 1usize..=6, k in 1usize..=6) {
        let mut rng = derived_rng(seed, 4);
        let psi = random_state(&mut rng, dim);
        let phi = random_state(&mut rng, dim);
        let m = random_measurement_with(&mut rng, dim, k.clamp(1, dim)).unwrap();
        let v = TwoStateVector::separable(&psi, &phi).unwrap();
        let weights: Vec<f64> = m
            .projectors()
            .iter()
            .map(|p| {
                let mut amp = Complex64::new(0.0, 0.0);
                for a in 0..dim {
                    for b in 0..dim {
                        amp += phi.amplitudes()[a].conj() * p.matrix()[(a, b)] * psi.amplitudes()[b];
                    }
                }
                amp.norm_sqr()
            })
            .collect();
        let total: f64 = weights.iter().sum();
        if let Ok(p) = abl_probabilities(&v, &m, TOL) {
            for (x, w) in p.probabilities.iter().zip(&weights) {
                prop_assert!((x - w / total).abs() <= 1e-9);
            }
        } else {
            prop_assert!(total.sqrt() <= 1e-9);
        }
    }

    #[test]
    fn time_reversal_preserves_verdicts_and_distributions(seed: u64, dim in 1usize..=6, k in 1usize..=6) {
        let (v, m) = setup(seed, dim, k);
        let r = time_reverse(&v);
        prop_assert_eq!(forms_story(&v, &m, TOL).unwrap(), forms_story(&r, &m, TOL).unwrap());
        if let (Ok(p), Ok(q)) = (abl_probabilities(&v, &m, TOL), abl_probabilities(&r, &m, TOL)) {
            prop_assert!(p.max_gap(&q) <= 1e-10);
        }
        prop_assert_eq!(time_reverse(&r), v);
    }

    #[test]
    fn every_nonzero_vector_has_a_story(seed: u64, dim in 1usize..=6) {
        let mut rng = derived_rng(seed, 5);
        let v = random_tsv(&mut rng, dim);
        let cert = find_story_measurement(&v, TOL).unwrap();
        prop_assert!(cert.verify(&v, TOL));
        prop_assert!(forms_story(&v, &cert.measurement, TOL).unwrap());
    }

    #[test]
    fn null_subspace_is_linear_and_storyless(seed: u64, dim in 1usize..=5, k in 1usize..=5) {
        let mut rng = derived_rng(seed, 6);
        let m = random_measurement_with(&mut rng, dim, k.clamp(1, dim)).unwrap();
        let ns = null_subspace(&m, TOL).unwrap();
        prop_assert_eq!(ns.dimension, dim * dim - m.len());
        let mut combo = CMatrix::zeros(dim, dim);
        for b in &ns.basis {
            combo += b.matrix() * twinspace::random::complex_gaussian(&mut rng);
        }
        if let Ok(v) = TwoStateVector::from_matrix(combo) {
            prop_assert!(membership_in_null(&v, &ns, 1e-9).unwrap());
            let a = outcome_amplitudes(&v, &m).unwrap();
            prop_assert!(a.iter().all(|z| z.norm() <= 1e-9 * v.norm().max(1.0)));
        }
    }

    #[test]
    fn mixture_statistics_ignore_component_order(seed: u64, dim in 1usize..=4, k in 1usize..=4, n in 1usize..=5) {
        let mut rng = derived_rng(seed, 7);
        let m = random_measurement_with(&mut rng, dim, k.clamp(1, dim)).unwrap();
        let comps: Vec<(f64, TwoStateVector)> =
            (0..n).map(|_| (rng.random_range(0.1..1.0), random_tsv(&mut rng, dim))).collect();
        let total: f64 = comps.iter().map(|c| c.0).sum();
        let comps: Vec<_> = comps.into_iter().map(|(w, v)| (w / total, v)).collect();
        let mut reversed = comps.clone();
        reversed.reverse();
        let a = mixture_statistics(&Mixture::new(comps.clone()).unwrap(), &m, TOL).unwrap();
        let b = mixture_statistics(&Mixture::new(reversed).unwrap(), &m, TOL).unwrap();
        prop_assert!(a.max_gap(&b) <= 1e-12);

        // Splitting a component into two halves with the same vector is a no-op.
        let mut split = comps.clone();
        let (w, v) = split.remove(0);
        split.push((w / 2.0, v.clone()));
        split.push((w / 2.0, v));
        let c = mixture_statistics(&Mixture::new(split).unwrap(), &m, TOL).unwrap();
        prop_assert!(a.max_gap(&c) <= 1e-12);

        // Convex combination, recomputed from scratch.
        let mut expected = vec![0.0; m.len()];
        let mut mass = 0.0;
        for (w, v) in &comps {
            if let Ok(p) = abl_probabilities(v, &m, TOL) {
                mass += w;
                for (e, x) in expected.iter_mut().zip(&p.probabilities) {
                    *e += w * x;
                }
            }
        }
        for (e, x) in expected.iter().zip(&a.probabilities) {
            prop_assert!((e / mass - x).abs() <= 1e-12);
        }
    }

    /// Zero outcomes of a target are exactly the outcomes with vanishing
    /// amplitude, and the anchor has nonzero amplitude.
    #[test]
    fn zero_constraints_are_sound(seed: u64, dim in 2usize..=4) {
        let mut rng = derived_rng(seed, 8);
        // Diagonal targets with one negative entry produce zero outcomes often.
        let diag: Vec<Complex64> = (0..dim)
            .map(|i| Complex64::new(if i + 1 == dim { -1.0 } else { 1.0 }, 0.0))
            .collect();
        let target = TwoStateVector::diagonal(&diag).unwrap();
        let family: Vec<Measurement> = (0..3)
            .map(|_| random_measurement_with(&mut rng, dim, 2).unwrap())
            .filter(|m| forms_story(&target, m, TOL).unwrap())
            .collect();
        prop_assume!(!family.is_empty());
        let sys = zero_constraints(&target, &family, TOL).unwrap();
        for (mi, m) in family.iter().enumerate() {
            let a = outcome_amplitudes(&target, m).unwrap();
            let max = a.iter().fold(0.0f64, |x, z| x.max(z.norm()));
            for (oi, z) in a.iter().enumerate() {
                let listed = sys.zero_outcomes.contains(&(mi, oi));
                prop_assert_eq!(listed, (z.norm() / max).powi(2) <= TOL);
            }
        }
        let (ai, ao) = sys.anchor;
        prop_assert!(outcome_amplitudes(&target, &family[ai]).unwrap()[ao].norm() > 0.0);
    }

    #[test]
    fn state_and_vector_json_round_trip_exactly(seed: u64, dim in 1usize..=6) {
        let mut rng = derived_rng(seed, 9);
        let s = random_state(&mut rng, dim);
        let v = random_tsv(&mut rng, dim);
        let st = serde_json::to_string(&s).unwrap();
        let vt = serde_json::to_string(&v).unwrap();
        prop_assert_eq!(serde_json::from_str::<StateVector>(&st).unwrap(), s);
        prop_assert_eq!(serde_json::from_str::<TwoStateVector>(&vt).unwrap(), v);
    }
}
