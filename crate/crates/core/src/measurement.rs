//! Ideal projective measurements, the ABL rule and the story predicate.

use nalgebra::SymmetricEigen;
use num_complex::Complex64;
use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::random;
use crate::twin::{StateVector, TwoStateVector};
use crate::DEFAULT_TOL;

/// A Hermitian idempotent matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    matrix: CMatrix,
}

impl Projector {
    pub fn new(matrix: CMatrix, tol: f64) -> Result<Self> {
        Self::checked(matrix, 0, tol)
    }

    fn checked(matrix: CMatrix, index: usize, tol: f64) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let deviation = linalg::hermitian_deviation(&matrix);
        if deviation > tol {
            return Err(Error::NotHermitian { index, deviation });
        }
        let deviation = linalg::max_abs(&(&matrix * &matrix - &matrix));
        if deviation > tol {
            return Err(Error::NotIdempotent { index, deviation });
        }
        Ok(Projector { matrix })
    }

    /// `|ψ⟩⟨ψ|` for a unit vector.
    pub fn onto(state: &StateVector, tol: f64) -> Result<Self> {
        Self::new(state.projector(), tol)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Number of unit eigenvalues.
    pub fn rank(&self) -> usize {
        linalg::psd_rank(&self.matrix, 0.5)
    }
}

/// An ordered projective partition of unity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasurementRepr", into = "MeasurementRepr")]
pub struct Measurement {
    projectors: Vec<Projector>,
    labels: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct MeasurementRepr {
    dim: usize,
    projectors: Vec<Vec<Vec<Complex64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TryFrom<MeasurementRepr> for Measurement {
    type Error = Error;

    fn try_from(r: MeasurementRepr) -> Result<Self> {
        let mats = r
            .projectors
            .iter()
            .map(|rows| linalg::from_rows(rows))
            .collect::<Result<Vec<_>>>()?;
        if let Some(m) = mats.iter().find(|m| m.nrows() != r.dim) {
            return Err(Error::DimensionMismatch {
                expected: r.dim,
                found: m.nrows(),
            });
        }
        let m = validate_measurement(mats, DEFAULT_TOL)?;
        match r.labels {
            Some(labels) => m.with_labels(labels),
            None => Ok(m),
        }
    }
}

impl From<Measurement> for MeasurementRepr {
    fn from(m: Measurement) -> Self {
        MeasurementRepr {
            dim: m.dim(),
            projectors: m
                .projectors
                .iter()
                .map(|p| linalg::to_rows(&p.matrix))
                .collect(),
            labels: m.labels,
        }
    }
}

impl Measurement {
    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn projector(&self, i: usize) -> &Projector {
        &self.projectors[i]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.projectors.len() {
            return Err(Error::InvalidArgument(format!(
                "{} labels for {} outcomes",
                labels.len(),
                self.projectors.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.projectors.iter().map(Projector::rank).collect()
    }

    /// The trivial single-outcome measurement `{1}`.
    pub fn identity(dim: usize) -> Result<Self> {
        validate_measurement(vec![CMatrix::identity(dim, dim)], DEFAULT_TOL)
    }

    /// `{|0⟩⟨0|, …, |d-1⟩⟨d-1|}`.
    pub fn computational(dim: usize) -> Result<Self> {
        let basis = (0..dim)
            .map(|k| StateVector::basis(dim, k))
            .collect::<Result<Vec<_>>>()?;
        let groups = (0..dim).map(|k| vec![k]).collect::<Vec<_>>();
        measurement_from_basis_grouping(&basis, &groups, DEFAULT_TOL)
    }
}

/// Validates a candidate partition of unity. Checks run in the order
/// Hermitian, idempotent, orthogonal, complete and the first failure is
/// reported; nothing is repaired.
pub fn validate_measurement(projs: Vec<CMatrix>, tol: f64) -> Result<Measurement> {
    let first = projs.first().ok_or(Error::Empty)?;
    let dim = first.nrows();
    for m in &projs {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.nrows(),
            });
        }
    }
    if dim == 0 || dim > crate::MAX_DIM {
        return Err(Error::UnsupportedDimension(dim));
    }
    for (index, m) in projs.iter().enumerate() {
        let deviation = linalg::hermitian_deviation(m);
        if deviation > tol {
            return Err(Error::NotHermitian { index, deviation });
        }
    }
    for (index, m) in projs.iter().enumerate() {
        let deviation = linalg::max_abs(&(m * m - m));
        if deviation > tol {
            return Err(Error::NotIdempotent { index, deviation });
        }
    }
    for i in 0..projs.len() {
        for j in i + 1..projs.len() {
            let deviation = linalg::max_abs(&(&projs[i] * &projs[j]));
            if deviation > tol {
                return Err(Error::NotOrthogonal {
                    first: i,
                    second: j,
                    deviation,
                });
            }
        }
    }
    let sum = projs
        .iter()
        .fold(CMatrix::zeros(dim, dim), |acc, m| acc + m);
    let deviation = linalg::max_abs(&(sum - CMatrix::identity(dim, dim)));
    if deviation > tol {
        return Err(Error::NotComplete { deviation });
    }
    Ok(Measurement {
        projectors: projs
            .into_iter()
            .map(|matrix| Projector { matrix })
            .collect(),
        labels: None,
    })
}

/// `P_i = Σ_{j∈J_i} |ξ_j⟩⟨ξ_j|` for an orthonormal basis `{ξ_j}` and a
/// partition `{J_i}` of its indices.
pub fn measurement_from_basis_grouping(
    basis: &[StateVector],
    groups: &[Vec<usize>],
    tol: f64,
) -> Result<Measurement> {
    let dim = basis.first().ok_or(Error::Empty)?.dim();
    if basis.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "{} basis vectors for dimension {dim}",
            basis.len()
        )));
    }
    for (i, a) in basis.iter().enumerate() {
        if a.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: a.dim(),
            });
        }
        for (j, b) in basis.iter().enumerate().skip(i) {
            let expected = if i == j { 1.0 } else { 0.0 };
            let deviation = (a.inner(b) - linalg::real(expected)).norm();
            if deviation > tol {
                return Err(Error::NotOrthonormal {
                    first: i,
                    second: j,
                    deviation,
                });
            }
        }
    }
    check_partition(groups, dim)?;

    let projs = groups
        .iter()
        .map(|g| {
            g.iter().fold(CMatrix::zeros(dim, dim), |acc, &j| {
                acc + basis[j].projector()
            })
        })
        .collect();
    // Rounding in a numerically orthonormal basis is far below `tol`, but the
    // projector checks compound it, so allow a little headroom.
    validate_measurement(projs, tol.max(DEFAULT_TOL) * 10.0)
}

fn check_partition(groups: &[Vec<usize>], dim: usize) -> Result<()> {
    if groups.is_empty() {
        return Err(Error::InvalidPartition("no groups".into()));
    }
    let mut seen = vec![false; dim];
    for (gi, g) in groups.iter().enumerate() {
        if g.is_empty() {
            return Err(Error::InvalidPartition(format!("group {gi} is empty")));
        }
        for &j in g {
            if j >= dim {
                return Err(Error::InvalidPartition(format!(
                    "index {j} out of range for dimension {dim}"
                )));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidPartition(format!("index {j} appears twice")));
            }
        }
    }
    if let Some(j) = seen.iter().position(|s| !s) {
        return Err(Error::InvalidPartition(format!("index {j} is not covered")));
    }
    Ok(())
}

/// Spectral measurement of a Hermitian observable. Eigenvalues are sorted in
/// decreasing order and neighbours closer than `degeneracy_tol` times the
/// spectral range share an outcome; labels are the cluster means.
pub fn measurement_from_observable(obs: &CMatrix, degeneracy_tol: f64) -> Result<Measurement> {
    if obs.nrows() != obs.ncols() {
        return Err(Error::NotSquare {
            rows: obs.nrows(),
            cols: obs.ncols(),
        });
    }
    let dim = obs.nrows();
    if dim == 0 || dim > crate::MAX_DIM {
        return Err(Error::UnsupportedDimension(dim));
    }
    let scale = linalg::max_abs(obs).max(1.0);
    let deviation = linalg::hermitian_deviation(obs);
    if deviation > DEFAULT_TOL * scale {
        return Err(Error::NotHermitian {
            index: 0,
            deviation,
        });
    }
    let hermitian = (obs + obs.adjoint()) * linalg::real(0.5);
    let eig = SymmetricEigen::new(hermitian);

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let range = values[0] - values[dim - 1];

    let mut clusters: Vec<Vec<usize>> = vec![vec![0]];
    for w in 1..dim {
        if values[w - 1] - values[w] <= degeneracy_tol * range {
            clusters.last_mut().expect("nonempty").push(w);
        } else {
            clusters.push(vec![w]);
        }
    }

    let basis = order
        .iter()
        .map(|&i| StateVector::new(eig.eigenvectors.column(i).iter().copied().collect()))
        .collect::<Result<Vec<_>>>()?;
    let labels = clusters
        .iter()
        .map(|g| {
            let mean = g.iter().map(|&w| values[w]).sum::<f64>() / g.len() as f64;
            format!("{mean}")
        })
        .collect();
    measurement_from_basis_grouping(&basis, &clusters, 1e-9)?.with_labels(labels)
}

fn check_dims(v: &TwoStateVector, m: &Measurement) -> Result<()> {
    if v.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: v.dim(),
        });
    }
    Ok(())
}

/// `Tr(P_i v)` for each outcome, in projector order.
pub fn outcome_amplitudes(v: &TwoStateVector, m: &Measurement) -> Result<Vec<Complex64>> {
    check_dims(v, m)?;
    Ok(m.projectors
        .iter()
        .map(|p| linalg::trace_of_product(&p.matrix, v.matrix()))
        .collect())
}

/// Story predicate with the scale-free threshold `max_i |Tr(P_i v)| > tol·‖v‖`.
pub fn forms_story(v: &TwoStateVector, m: &Measurement, tol: f64) -> Result<bool> {
    let amps = outcome_amplitudes(v, m)?;
    Ok(story_from_amplitudes(&amps, v.norm(), tol))
}

pub(crate) fn story_from_amplitudes(amps: &[Complex64], norm: f64, tol: f64) -> bool {
    amps.iter().any(|a| a.norm() > tol * norm)
}

/// Probabilities over a measurement's outcomes, aligned with projector order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    /// Largest absolute difference over aligned outcomes.
    pub fn max_gap(&self, other: &OutcomeDistribution) -> f64 {
        assert_eq!(
            self.len(),
            other.len(),
            "distributions over different measurements"
        );
        self.probabilities
            .iter()
            .zip(&other.probabilities)
            .fold(0.0, |acc, (a, b)| acc.max((a - b).abs()))
    }
}

impl std::ops::Index<usize> for OutcomeDistribution {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.probabilities[i]
    }
}

/// `Prob(c_n) = |Tr P_n v|² / Σ_i |Tr P_i v|²`.
pub fn abl_probabilities(
    v: &TwoStateVector,
    m: &Measurement,
    tol: f64,
) -> Result<OutcomeDistribution> {
    let amps = outcome_amplitudes(v, m)?;
    abl_from_amplitudes(&amps, v.norm(), tol)
}

pub(crate) fn abl_from_amplitudes(
    amps: &[Complex64],
    norm: f64,
    tol: f64,
) -> Result<OutcomeDistribution> {
    if !story_from_amplitudes(amps, norm, tol) {
        return Err(Error::NotAStory);
    }
    let weights: Vec<f64> = amps.iter().map(|a| a.norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    Ok(OutcomeDistribution {
        probabilities: weights.into_iter().map(|w| w / total).collect(),
    })
}

/// Haar-random basis grouped into `num_outcomes` contiguous blocks of a
/// shuffled index order. Deterministic in `seed`.
pub fn random_measurement(dim: usize, num_outcomes: usize, seed: u64) -> Result<Measurement> {
    random_measurement_with(&mut random::rng_from_seed(seed), dim, num_outcomes)
}

pub fn random_measurement_with<R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    num_outcomes: usize,
) -> Result<Measurement> {
    if dim == 0 || dim > crate::MAX_DIM {
        return Err(Error::UnsupportedDimension(dim));
    }
    if num_outcomes == 0 || num_outcomes > dim {
        return Err(Error::InvalidOutcomeCount {
            dim,
            outcomes: num_outcomes,
        });
    }
    let u = random::haar_unitary(rng, dim);
    let basis = (0..dim)
        .map(|j| StateVector::new(u.column(j).iter().copied().collect()))
        .collect::<Result<Vec<_>>>()?;

    let mut order: Vec<usize> = (0..dim).collect();
    order.shuffle(rng);
    let mut cuts: Vec<usize> = index::sample(rng, dim - 1, num_outcomes - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();

    let mut groups = Vec::with_capacity(num_outcomes);
    let mut start = 0;
    for end in cuts.into_iter().chain(std::iter::once(dim)) {
        groups.push(order[start..end].to_vec());
        start = end;
    }
    measurement_from_basis_grouping(&basis, &groups, 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, real, ZERO};
    use approx::assert_abs_diff_eq;

    fn ket(d: usize, k: usize) -> StateVector {
        StateVector::basis(d, k).unwrap()
    }

    fn pm_basis() -> Vec<StateVector> {
        vec![
            StateVector::unit(vec![real(1.0), real(1.0)]).unwrap(),
            StateVector::unit(vec![real(1.0), real(-1.0)]).unwrap(),
        ]
    }

    fn pm() -> Measurement {
        measurement_from_basis_grouping(&pm_basis(), &[vec![0], vec![1]], DEFAULT_TOL).unwrap()
    }

    fn e1() -> TwoStateVector {
        TwoStateVector::separable(&ket(2, 0), &ket(2, 1)).unwrap()
    }

    fn e00() -> TwoStateVector {
        TwoStateVector::separable(&ket(2, 0), &ket(2, 0)).unwrap()
    }

    #[test]
    fn validation_accepts_and_rejects() {
        let p0 = ket(2, 0).projector();
        let p1 = ket(2, 1).projector();
        assert_eq!(
            validate_measurement(vec![p0.clone(), p1], DEFAULT_TOL)
                .unwrap()
                .len(),
            2
        );
        assert_eq!(
            validate_measurement(vec![CMatrix::identity(2, 2)], DEFAULT_TOL)
                .unwrap()
                .len(),
            1
        );
        assert!(matches!(
            validate_measurement(vec![p0.clone(), p0.clone()], DEFAULT_TOL),
            Err(Error::NotOrthogonal {
                first: 0,
                second: 1,
                ..
            })
        ));
        assert!(matches!(
            validate_measurement(vec![p0.clone()], DEFAULT_TOL),
            Err(Error::NotComplete { .. })
        ));
        let mut skew = p0.clone();
        skew[(0, 1)] = c(0.0, 1.0);
        assert!(matches!(
            validate_measurement(vec![skew], DEFAULT_TOL),
            Err(Error::NotHermitian { index: 0, .. })
        ));
        let half = p0 * real(0.5);
        assert!(matches!(
            validate_measurement(vec![ket(2, 1).projector(), half], DEFAULT_TOL),
            Err(Error::NotIdempotent { index: 1, .. })
        ));
        assert!(matches!(
            validate_measurement(vec![], DEFAULT_TOL),
            Err(Error::Empty)
        ));
    }

    #[test]
    fn basis_grouping_examples() {
        let basis: Vec<_> = (0..3).map(|k| ket(3, k)).collect();
        let m =
            measurement_from_basis_grouping(&basis, &[vec![0], vec![1, 2]], DEFAULT_TOL).unwrap();
        assert_eq!(m.projector(0).matrix(), &ket(3, 0).projector());
        assert_eq!(
            m.projector(1).matrix(),
            &(ket(3, 1).projector() + ket(3, 2).projector())
        );
        assert_eq!(m.ranks(), vec![1, 2]);

        let m = pm();
        assert_abs_diff_eq!(m.projector(0).matrix()[(0, 1)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m.projector(1).matrix()[(0, 1)].re, -0.5, epsilon = 1e-15);

        let m = measurement_from_basis_grouping(&basis, &[vec![0, 1, 2]], DEFAULT_TOL).unwrap();
        assert_eq!(m.projector(0).matrix(), &CMatrix::identity(3, 3));
    }

    #[test]
    fn basis_grouping_errors() {
        let basis: Vec<_> = (0..3).map(|k| ket(3, k)).collect();
        for groups in [
            vec![vec![0], vec![1]],
            vec![vec![0, 1], vec![1, 2]],
            vec![vec![0, 1, 2], vec![]],
            vec![vec![0, 1, 3]],
        ] {
            assert!(
                matches!(
                    measurement_from_basis_grouping(&basis, &groups, DEFAULT_TOL),
                    Err(Error::InvalidPartition(_))
                ),
                "{groups:?}"
            );
        }
        let skewed = vec![
            ket(2, 0),
            StateVector::unit(vec![real(1.0), real(1.0)]).unwrap(),
        ];
        assert!(matches!(
            measurement_from_basis_grouping(&skewed, &[vec![0], vec![1]], DEFAULT_TOL),
            Err(Error::NotOrthonormal {
                first: 0,
                second: 1,
                ..
            })
        ));
    }

    #[test]
    fn observable_examples() {
        let z = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![real(1.0), real(-1.0)]));
        let m = measurement_from_observable(&z, 1e-6).unwrap();
        assert_eq!(m.len(), 2);
        assert!(linalg::max_abs(&(m.projector(0).matrix() - ket(2, 0).projector())) < 1e-12);
        assert!(linalg::max_abs(&(m.projector(1).matrix() - ket(2, 1).projector())) < 1e-12);
        assert_eq!(m.labels().unwrap(), &["1".to_string(), "-1".to_string()]);

        let m = measurement_from_observable(&CMatrix::identity(3, 3), 1e-6).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m.ranks(), vec![3]);

        let eps = 1e-9;
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            real(1.0),
            real(1.0 + eps),
            real(-1.0),
        ]));
        let m = measurement_from_observable(&d, 1e-6).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.ranks(), vec![2, 1]);
        let m = measurement_from_observable(&d, 1e-12).unwrap();
        assert_eq!(m.len(), 3);

        let mut bad = CMatrix::identity(2, 2);
        bad[(0, 1)] = real(1.0);
        assert!(matches!(
            measurement_from_observable(&bad, 1e-6),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn amplitude_examples() {
        let amps = outcome_amplitudes(&e1(), &Measurement::computational(2).unwrap()).unwrap();
        assert_eq!(amps, vec![ZERO, ZERO]);
        let amps = outcome_amplitudes(&e1(), &pm()).unwrap();
        assert_abs_diff_eq!(amps[0].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(amps[1].re, -0.5, epsilon = 1e-15);
        let amps = outcome_amplitudes(&e00(), &Measurement::identity(2).unwrap()).unwrap();
        assert_eq!(amps, vec![real(1.0)]);
        assert!(outcome_amplitudes(&e1(), &Measurement::identity(3).unwrap()).is_err());
    }

    #[test]
    fn story_examples() {
        let comp = Measurement::computational(2).unwrap();
        assert!(!forms_story(&e1(), &comp, DEFAULT_TOL).unwrap());
        assert!(forms_story(&e1(), &pm(), DEFAULT_TOL).unwrap());
        for m in [comp, pm(), Measurement::identity(2).unwrap()] {
            assert!(forms_story(&e00(), &m, DEFAULT_TOL).unwrap());
        }
    }

    #[test]
    fn abl_examples() {
        let p = abl_probabilities(&e1(), &pm(), DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 0.5, epsilon = 1e-12);
        let p = abl_probabilities(&e00(), &Measurement::identity(2).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(p.probabilities, vec![1.0]);

        let s = real(1.0 / 3f64.sqrt());
        let ex3 = TwoStateVector::diagonal(&[s, s, -s]).unwrap();
        let basis: Vec<_> = (0..3).map(|k| ket(3, k)).collect();
        let m =
            measurement_from_basis_grouping(&basis, &[vec![0], vec![1, 2]], DEFAULT_TOL).unwrap();
        let p = abl_probabilities(&ex3, &m, DEFAULT_TOL).unwrap();
        assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 0.0, epsilon = 1e-12);

        assert_eq!(
            abl_probabilities(&e1(), &Measurement::computational(2).unwrap(), DEFAULT_TOL),
            Err(Error::NotAStory)
        );
    }

    #[test]
    fn random_measurement_contract() {
        let m = random_measurement(2, 1, 5).unwrap();
        assert!(linalg::max_abs(&(m.projector(0).matrix() - CMatrix::identity(2, 2))) < 1e-12);
        let m = random_measurement(2, 2, 5).unwrap();
        assert_eq!(m.ranks(), vec![1, 1]);
        assert_eq!(
            random_measurement(4, 3, 77).unwrap(),
            random_measurement(4, 3, 77).unwrap()
        );
        assert_ne!(
            random_measurement(4, 3, 77).unwrap(),
            random_measurement(4, 3, 78).unwrap()
        );
        assert!(matches!(
            random_measurement(3, 4, 0),
            Err(Error::InvalidOutcomeCount { .. })
        ));
        assert!(random_measurement(3, 0, 0).is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let m = random_measurement(3, 2, 1)
            .unwrap()
            .with_labels(vec!["a".into(), "b".into()])
            .unwrap();
        let text = serde_json::to_string(&m).unwrap();
        assert!(text.starts_with("{\"dim\":3,\"projectors\":[[[["));
        let back: Measurement = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);

        let dup = "{\"dim\":1,\"projectors\":[[[[1,0]]],[[[1,0]]]]}";
        let err = serde_json::from_str::<Measurement>(dup)
            .unwrap_err()
            .to_string();
        assert!(err.contains("not orthogonal"), "{err}");
    }
}
