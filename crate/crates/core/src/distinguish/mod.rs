//! Mixtures of two-state vectors and whether measurements can tell them apart.
//!
//! Mixture statistics follow the convex-combination rule: components that
//! form no story with the measurement contribute no post-selected events and
//! are dropped, and the remaining weights are renormalized.

mod feasibility;
mod reduction;

pub use feasibility::{separable_feasibility, FeasibilityReport, SeparableWitness, Verdict};
pub use reduction::{example3_family, reduce_example3, BilinearEquation, Example3Reduction};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measurement::{self, random_measurement_with, Measurement, OutcomeDistribution};
use crate::random;
use crate::twin::{self, TwoStateVector};

/// Finite weighted ensemble of two-state vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MixtureRepr", into = "MixtureRepr")]
pub struct Mixture {
    components: Vec<(f64, TwoStateVector)>,
}

#[derive(Serialize, Deserialize)]
struct ComponentRepr {
    weight: f64,
    vector: TwoStateVector,
}

#[derive(Serialize, Deserialize)]
struct MixtureRepr {
    components: Vec<ComponentRepr>,
}

impl TryFrom<MixtureRepr> for Mixture {
    type Error = Error;

    fn try_from(r: MixtureRepr) -> Result<Self> {
        Mixture::new(
            r.components
                .into_iter()
                .map(|c| (c.weight, c.vector))
                .collect(),
        )
    }
}

impl From<Mixture> for MixtureRepr {
    fn from(m: Mixture) -> Self {
        MixtureRepr {
            components: m
                .components
                .into_iter()
                .map(|(weight, vector)| ComponentRepr { weight, vector })
                .collect(),
        }
    }
}

const WEIGHT_TOL: f64 = 1e-9;

impl Mixture {
    pub fn new(components: Vec<(f64, TwoStateVector)>) -> Result<Self> {
        let (_, first) = components
            .first()
            .ok_or_else(|| Error::InvalidMixture("no components".into()))?;
        let dim = first.dim();
        for (w, v) in &components {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::InvalidMixture(format!(
                    "weight {w} is not a probability"
                )));
            }
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.dim(),
                });
            }
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidMixture(format!("weights sum to {total}")));
        }
        Ok(Mixture { components })
    }

    /// Single-component mixture.
    pub fn point(v: TwoStateVector) -> Self {
        Mixture {
            components: vec![(1.0, v)],
        }
    }

    /// Equal weights over the given vectors.
    pub fn uniform(vectors: Vec<TwoStateVector>) -> Result<Self> {
        let w = 1.0 / vectors.len().max(1) as f64;
        Self::new(vectors.into_iter().map(|v| (w, v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.components[0].1.dim()
    }

    pub fn components(&self) -> &[(f64, TwoStateVector)] {
        &self.components
    }
}

/// Convex combination of component ABL distributions over the components
/// that form a story with `m`, weights renormalized over those.
pub fn mixture_statistics(mix: &Mixture, m: &Measurement, tol: f64) -> Result<OutcomeDistribution> {
    let mut acc = vec![0.0; m.len()];
    let mut total = 0.0;
    for (w, v) in &mix.components {
        match measurement::abl_probabilities(v, m, tol) {
            Ok(p) => {
                total += w;
                for (a, q) in acc.iter_mut().zip(&p.probabilities) {
                    *a += w * q;
                }
            }
            Err(Error::NotAStory) => {}
            Err(e) => return Err(e),
        }
    }
    if total <= 0.0 {
        return Err(Error::NoStoryInMixture);
    }
    Ok(OutcomeDistribution {
        probabilities: acc.into_iter().map(|a| a / total).collect(),
    })
}

/// Gap between two mixtures on one measurement: `None` when neither forms a
/// story, `1` when exactly one does, otherwise the max-norm distance.
pub fn distribution_gap(
    a: &Mixture,
    b: &Mixture,
    m: &Measurement,
    tol: f64,
) -> Result<Option<f64>> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let sa = story_or_none(mixture_statistics(a, m, tol))?;
    let sb = story_or_none(mixture_statistics(b, m, tol))?;
    Ok(match (sa, sb) {
        (None, None) => None,
        (Some(_), None) | (None, Some(_)) => Some(1.0),
        (Some(pa), Some(pb)) => Some(pa.max_gap(&pb)),
    })
}

fn story_or_none(r: Result<OutcomeDistribution>) -> Result<Option<OutcomeDistribution>> {
    match r {
        Ok(d) => Ok(Some(d)),
        Err(Error::NoStoryInMixture) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Do `a` and `b` produce the same statistics on `m`?
pub fn replicates_on(a: &Mixture, b: &Mixture, m: &Measurement, tol: f64) -> Result<bool> {
    Ok(distribution_gap(a, b, m, tol)?.is_none_or(|g| g <= tol))
}

/// Checks that `v` and its time reverse agree on story formation and ABL
/// statistics for every measurement given.
pub fn time_reversal_equivalence_check(
    v: &TwoStateVector,
    measurements: &[Measurement],
    tol: f64,
) -> bool {
    let r = twin::time_reverse(v);
    let (nv, nr) = (v.norm(), r.norm());
    measurements.iter().all(|m| {
        let (Ok(av), Ok(ar)) = (
            measurement::outcome_amplitudes(v, m),
            measurement::outcome_amplitudes(&r, m),
        ) else {
            return false;
        };
        let sv = measurement::story_from_amplitudes(&av, nv, tol);
        let sr = measurement::story_from_amplitudes(&ar, nr, tol);
        if sv != sr {
            return false;
        }
        if !sv {
            return true;
        }
        let pv = measurement::abl_from_amplitudes(&av, nv, tol).expect("story checked");
        let pr = measurement::abl_from_amplitudes(&ar, nr, tol).expect("story checked");
        pv.max_gap(&pr) <= tol
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct DistinguishingMeasurement {
    pub trial: usize,
    pub measurement: Measurement,
    pub max_gap: f64,
}

/// Samples random measurements (trial `t` uses stream `t` of `seed`) and
/// returns the first whose distribution gap exceeds `tol`.
pub fn search_distinguishing_measurement(
    a: &Mixture,
    b: &Mixture,
    trials: usize,
    outcomes_per_trial: usize,
    seed: u64,
    tol: f64,
) -> Result<Option<DistinguishingMeasurement>> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let dim = a.dim();
    let outcomes = outcomes_per_trial.clamp(1, dim);
    for trial in 0..trials {
        let mut rng = random::derived_rng(seed, trial as u64);
        let m = random_measurement_with(&mut rng, dim, outcomes)?;
        if let Some(gap) = distribution_gap(a, b, &m, tol)? {
            if gap > tol {
                return Ok(Some(DistinguishingMeasurement {
                    trial,
                    measurement: m,
                    max_gap: gap,
                }));
            }
        }
    }
    Ok(None)
}

/// Outcomes with vanishing ABL probability for a target vector. Any mixture
/// replicating the target must give each of its story-forming members zero
/// amplitude on these outcomes.
#[derive(Debug, Clone, Serialize)]
pub struct ZeroConstraintSystem {
    pub target: TwoStateVector,
    pub measurements: Vec<Measurement>,
    /// (measurement index, outcome index) pairs.
    pub zero_outcomes: Vec<(usize, usize)>,
    /// First outcome of the first measurement with nonzero probability; a
    /// replicating member must also reach it.
    pub anchor: (usize, usize),
}

impl ZeroConstraintSystem {
    pub fn dim(&self) -> usize {
        self.target.dim()
    }

    pub(crate) fn projector(&self, (mi, oi): (usize, usize)) -> &crate::linalg::CMatrix {
        self.measurements[mi].projector(oi).matrix()
    }
}

pub fn zero_constraints(
    target: &TwoStateVector,
    measurements: &[Measurement],
    tol: f64,
) -> Result<ZeroConstraintSystem> {
    if measurements.is_empty() {
        return Err(Error::Empty);
    }
    let mut zero_outcomes = Vec::new();
    let mut anchor = None;
    for (mi, m) in measurements.iter().enumerate() {
        let p = match measurement::abl_probabilities(target, m, tol) {
            Ok(p) => p,
            Err(Error::NotAStory) => return Err(Error::NotAStoryWith(mi)),
            Err(e) => return Err(e),
        };
        for (oi, &q) in p.probabilities.iter().enumerate() {
            if q <= tol {
                zero_outcomes.push((mi, oi));
            } else if anchor.is_none() {
                anchor = Some((mi, oi));
            }
        }
    }
    Ok(ZeroConstraintSystem {
        target: target.clone(),
        measurements: measurements.to_vec(),
        zero_outcomes,
        anchor: anchor.expect("a story has an outcome with nonzero probability"),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Certification {
    /// No separable mixture replicates the target on this family.
    StrictlyNonSeparable,
    /// A separable member satisfying every zero constraint exists.
    NotCertified,
    Inconclusive,
}

impl Certification {
    pub fn describe(self) -> &'static str {
        match self {
            Certification::StrictlyNonSeparable => {
                "strictly non-separable (evidence via this measurement family)"
            }
            Certification::NotCertified => {
                "not certified; replicating separable family exists for this family"
            }
            Certification::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificationReport {
    pub certification: Certification,
    pub zero_outcomes: Vec<(usize, usize)>,
    pub feasibility: FeasibilityReport,
}

/// `zero_constraints` followed by `separable_feasibility`.
pub fn certify_strict_nonseparability(
    target: &TwoStateVector,
    measurements: &[Measurement],
    starts: usize,
    seed: u64,
    tol: f64,
    feas_tol: f64,
) -> Result<CertificationReport> {
    if twin::is_separable(target, tol) {
        return Err(Error::SeparableInput);
    }
    let sys = zero_constraints(target, measurements, tol)?;
    let feasibility = separable_feasibility(&sys, starts, seed, feas_tol)?;
    let certification = match feasibility.verdict {
        Verdict::InfeasibleEvidence => Certification::StrictlyNonSeparable,
        Verdict::Feasible => Certification::NotCertified,
        Verdict::Inconclusive => Certification::Inconclusive,
    };
    Ok(CertificationReport {
        certification,
        zero_outcomes: sys.zero_outcomes,
        feasibility,
    })
}

/// `Tr(P Φ)` for `Φ = (Σ α_k|k⟩)⊗(Σ β_l⟨l|)`, i.e. `β^T P α`.
pub(crate) fn bilinear_amplitude(
    p: &crate::linalg::CMatrix,
    alpha: &[Complex64],
    beta: &[Complex64],
) -> Complex64 {
    let d = alpha.len();
    let mut acc = Complex64::new(0.0, 0.0);
    for l in 0..d {
        for k in 0..d {
            acc += beta[l] * p[(l, k)] * alpha[k];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real;
    use crate::measurement::measurement_from_basis_grouping;
    use crate::twin::StateVector;
    use crate::DEFAULT_TOL;
    use approx::assert_abs_diff_eq;

    fn ket(d: usize, k: usize) -> StateVector {
        StateVector::basis(d, k).unwrap()
    }

    fn sep(d: usize, a: usize, b: usize) -> TwoStateVector {
        TwoStateVector::separable(&ket(d, a), &ket(d, b)).unwrap()
    }

    fn ex1_mixture() -> Mixture {
        Mixture::uniform(vec![sep(2, 0, 0), sep(2, 1, 1)]).unwrap()
    }

    fn pm() -> Measurement {
        let basis = vec![
            StateVector::unit(vec![real(1.0), real(1.0)]).unwrap(),
            StateVector::unit(vec![real(1.0), real(-1.0)]).unwrap(),
        ];
        measurement_from_basis_grouping(&basis, &[vec![0], vec![1]], DEFAULT_TOL).unwrap()
    }

    #[test]
    fn mixture_validation() {
        assert!(Mixture::new(vec![]).is_err());
        assert!(Mixture::new(vec![(0.4, sep(2, 0, 0))]).is_err());
        assert!(Mixture::new(vec![(-0.5, sep(2, 0, 0)), (1.5, sep(2, 1, 1))]).is_err());
        assert!(matches!(
            Mixture::new(vec![(0.5, sep(2, 0, 0)), (0.5, sep(3, 1, 1))]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn example1_mixture_is_balanced() {
        for m in [pm(), Measurement::computational(2).unwrap()] {
            let p = mixture_statistics(&ex1_mixture(), &m, DEFAULT_TOL).unwrap();
            assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(p[1], 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn point_mixture_matches_abl() {
        let v = sep(2, 0, 1);
        let p = mixture_statistics(&Mixture::point(v.clone()), &pm(), DEFAULT_TOL).unwrap();
        assert_eq!(
            p,
            measurement::abl_probabilities(&v, &pm(), DEFAULT_TOL).unwrap()
        );
    }

    #[test]
    fn storyless_components_are_dropped() {
        let mix = Mixture::uniform(vec![sep(2, 0, 0), sep(2, 0, 1)]).unwrap();
        let p =
            mixture_statistics(&mix, &Measurement::computational(2).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(p.probabilities, vec![1.0, 0.0]);
        let none = Mixture::point(sep(2, 0, 1));
        assert_eq!(
            mixture_statistics(&none, &Measurement::computational(2).unwrap(), DEFAULT_TOL),
            Err(Error::NoStoryInMixture)
        );
    }

    #[test]
    fn replication_examples() {
        let target = Mixture::point(sep(2, 0, 1));
        assert!(replicates_on(&target, &ex1_mixture(), &pm(), DEFAULT_TOL).unwrap());
        let comp = Measurement::computational(2).unwrap();
        assert!(!replicates_on(
            &Mixture::point(sep(2, 0, 0)),
            &Mixture::point(sep(2, 1, 1)),
            &comp,
            DEFAULT_TOL
        )
        .unwrap());
        // Example-1 target forms no story with the computational basis while
        // the mixture does; that difference is observable.
        assert!(!replicates_on(&target, &ex1_mixture(), &comp, DEFAULT_TOL).unwrap());
        assert!(replicates_on(&target, &target, &comp, DEFAULT_TOL).unwrap());
    }

    #[test]
    fn time_reversal_examples() {
        let ms: Vec<_> = (0..200)
            .map(|s| measurement::random_measurement(2, 1 + (s as usize % 2), s).unwrap())
            .collect();
        assert!(time_reversal_equivalence_check(
            &sep(2, 0, 1),
            &ms,
            DEFAULT_TOL
        ));
        assert!(time_reversal_equivalence_check(
            &sep(2, 1, 1),
            &ms,
            DEFAULT_TOL
        ));
        let plus_i = StateVector::unit(vec![real(1.0), crate::linalg::I]).unwrap();
        let v = TwoStateVector::separable(&plus_i, &ket(2, 0)).unwrap();
        assert!(time_reversal_equivalence_check(&v, &ms, DEFAULT_TOL));
    }

    #[test]
    fn search_examples() {
        let target = Mixture::point(sep(2, 0, 1));
        assert!(
            search_distinguishing_measurement(&target, &ex1_mixture(), 300, 2, 1, 1e-10)
                .unwrap()
                .is_none()
        );
        let found = search_distinguishing_measurement(
            &Mixture::point(sep(2, 0, 0)),
            &Mixture::point(sep(2, 1, 1)),
            10,
            2,
            1,
            1e-10,
        )
        .unwrap()
        .expect("orthogonal point mixtures are distinguishable");
        assert!(found.trial < 3);
        assert!(found.max_gap > 1e-10);
        let again = search_distinguishing_measurement(
            &Mixture::point(sep(2, 0, 0)),
            &Mixture::point(sep(2, 1, 1)),
            10,
            2,
            1,
            1e-10,
        )
        .unwrap()
        .unwrap();
        assert_eq!(again.trial, found.trial);
        assert_eq!(again.max_gap, found.max_gap);
        assert!(
            search_distinguishing_measurement(&ex1_mixture(), &ex1_mixture(), 50, 2, 3, 1e-10)
                .unwrap()
                .is_none()
        );
        assert!(
            search_distinguishing_measurement(&ex1_mixture(), &ex1_mixture(), 0, 2, 3, 1e-10)
                .is_err()
        );
    }

    #[test]
    fn zero_constraint_examples() {
        let sys = zero_constraints(
            &sep(2, 0, 0),
            &[Measurement::computational(2).unwrap()],
            DEFAULT_TOL,
        )
        .unwrap();
        assert_eq!(sys.zero_outcomes, vec![(0, 1)]);
        assert_eq!(sys.anchor, (0, 0));

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let ex2 = TwoStateVector::diagonal(&[real(s), real(s)]).unwrap();
        let sys = zero_constraints(&ex2, &[pm()], DEFAULT_TOL).unwrap();
        assert!(sys.zero_outcomes.is_empty());

        let ex3 = reduction::example3_target();
        let sys = zero_constraints(&ex3, &example3_family(), DEFAULT_TOL).unwrap();
        assert_eq!(sys.zero_outcomes, vec![(0, 1), (1, 1), (2, 1), (3, 1)]);
        assert_eq!(sys.anchor, (0, 0));

        assert!(matches!(
            zero_constraints(
                &sep(2, 0, 1),
                &[pm(), Measurement::computational(2).unwrap()],
                DEFAULT_TOL
            ),
            Err(Error::NotAStoryWith(1))
        ));
    }

    #[test]
    fn bilinear_amplitude_matches_trace() {
        let mut rng = random::rng_from_seed(5);
        let m = measurement::random_measurement_with(&mut rng, 3, 2).unwrap();
        let a = random::random_state(&mut rng, 3);
        let b = random::random_state(&mut rng, 3);
        let phi =
            crate::linalg::CMatrix::from_fn(3, 3, |k, l| a.amplitudes()[k] * b.amplitudes()[l]);
        let direct = crate::linalg::trace_of_product(m.projector(0).matrix(), &phi);
        let bil = bilinear_amplitude(m.projector(0).matrix(), a.amplitudes(), b.amplitudes());
        assert!((direct - bil).norm() < 1e-14);
    }
}
