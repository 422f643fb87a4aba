//! Monte Carlo pre-selection → ideal measurement → post-selection.
//!
//! Each trial prepares `|pre⟩`, samples an outcome with the Born rule,
//! collapses onto `P_i|pre⟩`, and then keeps the event only if a later
//! measurement finds `|post⟩`. Conditioned on that success, outcome
//! frequencies should follow the ABL rule for `|pre⟩⊗⟨post|`.
//!
//! Trials are split into fixed-size shards; shard `s` draws from stream `s`
//! of the base seed and shard logs are summed, so a log depends only on the
//! seed and trial count.

use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distinguish::Mixture;
use crate::error::{Error, Result};
use crate::linalg;
use crate::measurement::{self, Measurement, OutcomeDistribution};
use crate::random;
use crate::twin::{StateVector, TwoStateVector};

const SHARD_SIZE: u64 = 8192;
const NORMALIZATION_TOL: f64 = 1e-9;

/// Minimum expected post-selected count for every outcome with nonzero
/// predicted probability before a validation is meaningful.
pub const MIN_EXPECTED_SUCCESSES: f64 = 100.0;

/// Per-outcome Born probabilities and post-selection success probabilities
/// for one pre/post pair.
#[derive(Debug, Clone)]
struct Branches {
    outcome: Vec<f64>,
    success: Vec<f64>,
}

impl Branches {
    fn new(pre: &StateVector, post: &StateVector, m: &Measurement) -> Self {
        let mut outcome = Vec::with_capacity(m.len());
        let mut success = Vec::with_capacity(m.len());
        for p in m.projectors() {
            let collapsed = p.matrix() * nalgebra::DVector::from_column_slice(pre.amplitudes());
            let weight: f64 = collapsed.iter().map(|z| z.norm_sqr()).sum();
            outcome.push(weight);
            let overlap = linalg::dagger_dot(post.amplitudes(), collapsed.as_slice()).norm_sqr();
            success.push(if weight > 0.0 {
                (overlap / weight).min(1.0)
            } else {
                0.0
            });
        }
        Branches { outcome, success }
    }

    fn joint(&self) -> Vec<f64> {
        self.outcome
            .iter()
            .zip(&self.success)
            .map(|(p, q)| p * q)
            .collect()
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, bool) {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut i = self.outcome.len() - 1;
        for (k, p) in self.outcome.iter().enumerate() {
            acc += p;
            if u < acc {
                i = k;
                break;
            }
        }
        let v: f64 = rng.random();
        (i, v < self.success[i])
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialLog {
    /// Trials with outcome `i` that also passed post-selection.
    pub joint_counts: Vec<u64>,
    pub trials: u64,
    pub successes: u64,
}

impl TrialLog {
    fn empty(outcomes: usize) -> Self {
        TrialLog {
            joint_counts: vec![0; outcomes],
            trials: 0,
            successes: 0,
        }
    }

    fn merge(mut self, other: TrialLog) -> TrialLog {
        for (a, b) in self.joint_counts.iter_mut().zip(other.joint_counts) {
            *a += b;
        }
        self.trials += other.trials;
        self.successes += other.successes;
        self
    }

    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials.max(1) as f64
    }
}

fn run_sharded<F>(trials: u64, seed: u64, outcomes: usize, trial: F) -> TrialLog
where
    F: Fn(&mut random::SeededRng) -> (usize, bool) + Sync,
{
    let shards = trials.div_ceil(SHARD_SIZE);
    (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = random::derived_rng(seed, s);
            let n = SHARD_SIZE.min(trials - s * SHARD_SIZE);
            let mut log = TrialLog::empty(outcomes);
            log.trials = n;
            for _ in 0..n {
                let (i, ok) = trial(&mut rng);
                if ok {
                    log.joint_counts[i] += 1;
                    log.successes += 1;
                }
            }
            log
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(TrialLog::empty(outcomes), TrialLog::merge)
}

fn check_state(s: &StateVector, dim: usize) -> Result<()> {
    if s.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: s.dim(),
        });
    }
    let n = s.norm_sqr();
    if (n - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized(n));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct PrePostExperiment {
    pre: StateVector,
    post: StateVector,
    measurement: Measurement,
    trials: u64,
    seed: u64,
}

impl PrePostExperiment {
    /// Requires unit `pre`/`post` of the measurement's dimension, and that
    /// `|pre⟩⊗⟨post|` forms a story with the measurement.
    pub fn new(
        pre: StateVector,
        post: StateVector,
        measurement: Measurement,
        trials: u64,
        seed: u64,
    ) -> Result<Self> {
        check_state(&pre, measurement.dim())?;
        check_state(&post, measurement.dim())?;
        if trials == 0 {
            return Err(Error::InvalidArgument("trials must be positive".into()));
        }
        let exp = PrePostExperiment {
            pre,
            post,
            measurement,
            trials,
            seed,
        };
        if !measurement::forms_story(
            &exp.two_state_vector(),
            &exp.measurement,
            crate::DEFAULT_TOL,
        )? {
            return Err(Error::NotAStory);
        }
        Ok(exp)
    }

    pub fn measurement(&self) -> &Measurement {
        &self.measurement
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    /// `|pre⟩⊗⟨post|`.
    pub fn two_state_vector(&self) -> TwoStateVector {
        TwoStateVector::separable(&self.pre, &self.post).expect("unit factors")
    }

    /// Exact `P(outcome i and post-selection succeeds)`.
    pub fn joint_probabilities(&self) -> Vec<f64> {
        Branches::new(&self.pre, &self.post, &self.measurement).joint()
    }

    /// `Σ_i |⟨post|P_i|pre⟩|²`.
    pub fn predicted_success_rate(&self) -> f64 {
        self.joint_probabilities().iter().sum()
    }
}

pub fn simulate(exp: &PrePostExperiment) -> TrialLog {
    let branches = Branches::new(&exp.pre, &exp.post, &exp.measurement);
    run_sharded(exp.trials, exp.seed, exp.measurement.len(), |rng| {
        branches.sample(rng)
    })
}

/// Weighted ensemble of pre/post pairs sharing one measurement; each trial
/// first draws a pair by weight.
#[derive(Debug, Clone, Serialize)]
pub struct MixtureExperiment {
    members: Vec<(f64, StateVector, StateVector)>,
    measurement: Measurement,
    trials: u64,
    seed: u64,
}

impl MixtureExperiment {
    pub fn new(
        members: Vec<(f64, StateVector, StateVector)>,
        measurement: Measurement,
        trials: u64,
        seed: u64,
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidMixture("no members".into()));
        }
        for (_, pre, post) in &members {
            check_state(pre, measurement.dim())?;
            check_state(post, measurement.dim())?;
        }
        if trials == 0 {
            return Err(Error::InvalidArgument("trials must be positive".into()));
        }
        let exp = MixtureExperiment {
            members,
            measurement,
            trials,
            seed,
        };
        // Validates the weights.
        let mix = exp.two_state_mixture()?;
        if crate::distinguish::mixture_statistics(&mix, &exp.measurement, crate::DEFAULT_TOL)
            .is_err()
        {
            return Err(Error::NoStoryInMixture);
        }
        Ok(exp)
    }

    /// The same ensemble as a mixture of separable two-state vectors.
    pub fn two_state_mixture(&self) -> Result<Mixture> {
        Mixture::new(
            self.members
                .iter()
                .map(|(w, pre, post)| Ok((*w, TwoStateVector::separable(pre, post)?)))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// Exact post-selection success rate of each member.
    pub fn member_success_rates(&self) -> Vec<f64> {
        self.members
            .iter()
            .map(|(_, pre, post)| {
                Branches::new(pre, post, &self.measurement)
                    .joint()
                    .iter()
                    .sum()
            })
            .collect()
    }

    /// True when every member succeeds at the same rate, the case in which
    /// per-trial conditioning coincides with the plain convex combination.
    pub fn is_rate_symmetric(&self, tol: f64) -> bool {
        let rates = self.member_success_rates();
        rates.iter().all(|r| (r - rates[0]).abs() <= tol)
    }

    pub fn simulate(&self) -> TrialLog {
        let branches: Vec<Branches> = self
            .members
            .iter()
            .map(|(_, pre, post)| Branches::new(pre, post, &self.measurement))
            .collect();
        let weights: Vec<f64> = self.members.iter().map(|(w, _, _)| *w).collect();
        run_sharded(self.trials, self.seed, self.measurement.len(), |rng| {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut k = weights.len() - 1;
            for (j, w) in weights.iter().enumerate() {
                acc += w;
                if u < acc {
                    k = j;
                    break;
                }
            }
            branches[k].sample(rng)
        })
    }
}

/// Joint counts divided by the number of post-selection successes.
pub fn empirical_distribution(log: &TrialLog) -> Result<OutcomeDistribution> {
    if log.successes == 0 {
        return Err(Error::NoSuccesses);
    }
    let n = log.successes as f64;
    Ok(OutcomeDistribution {
        probabilities: log.joint_counts.iter().map(|&c| c as f64 / n).collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationRow {
    pub outcome: usize,
    pub predicted: f64,
    pub empirical: f64,
    /// `|empirical - predicted|` in binomial standard errors.
    pub sigma: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AblValidation {
    pub rows: Vec<ValidationRow>,
    pub log: TrialLog,
    pub predicted_success_rate: Option<f64>,
    pub sigma_bound: f64,
    pub pass: bool,
}

impl AblValidation {
    pub fn max_sigma(&self) -> f64 {
        self.rows.iter().fold(0.0, |a, r| a.max(r.sigma))
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>7}  {:>10}  {:>10}  {:>8}  result",
            "outcome", "predicted", "empirical", "sigma"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:>7}  {:>10.6}  {:>10.6}  {:>8.3}  {}",
                r.outcome,
                r.predicted,
                r.empirical,
                r.sigma,
                if r.pass { "pass" } else { "FAIL" }
            );
        }
        let _ = write!(
            out,
            "trials {}  successes {}  success rate {:.6}",
            self.log.trials,
            self.log.successes,
            self.log.success_rate()
        );
        if let Some(p) = self.predicted_success_rate {
            let _ = write!(out, " (predicted {p:.6})");
        }
        out.push('\n');
        let _ = writeln!(
            out,
            "{} (bound {} sigma)",
            if self.pass { "PASS" } else { "FAIL" },
            self.sigma_bound
        );
        out
    }
}

/// Deviation of an observed frequency from `p` over `n` Bernoulli draws in
/// binomial standard errors.
pub fn binomial_sigma(observed: f64, p: f64, n: u64) -> f64 {
    let se = (p * (1.0 - p) / n as f64).sqrt();
    let diff = (observed - p).abs();
    if se > 0.0 {
        diff / se
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

fn compare(
    predicted: &OutcomeDistribution,
    log: TrialLog,
    sigma_bound: f64,
) -> Result<AblValidation> {
    let empirical = empirical_distribution(&log)?;
    let rows: Vec<ValidationRow> = predicted
        .probabilities
        .iter()
        .zip(&empirical.probabilities)
        .enumerate()
        .map(|(outcome, (&p, &e))| {
            let sigma = binomial_sigma(e, p, log.successes);
            ValidationRow {
                outcome,
                predicted: p,
                empirical: e,
                sigma,
                pass: sigma < sigma_bound,
            }
        })
        .collect();
    let pass = rows.iter().all(|r| r.pass);
    Ok(AblValidation {
        rows,
        log,
        predicted_success_rate: None,
        sigma_bound,
        pass,
    })
}

/// Checks that every outcome with nonzero joint probability expects at least
/// [`MIN_EXPECTED_SUCCESSES`] post-selected events.
pub fn check_trial_budget(joint: &[f64], trials: u64) -> Result<()> {
    for (outcome, &q) in joint.iter().enumerate() {
        let expected = q * trials as f64;
        if q > 1e-12 && expected < MIN_EXPECTED_SUCCESSES {
            return Err(Error::InsufficientTrials {
                outcome,
                expected,
                required: MIN_EXPECTED_SUCCESSES,
            });
        }
    }
    Ok(())
}

/// Simulates `exp` and compares conditional frequencies with the ABL rule for
/// `|pre⟩⊗⟨post|`.
pub fn validate_abl(exp: &PrePostExperiment, sigma_bound: f64) -> Result<AblValidation> {
    check_trial_budget(&exp.joint_probabilities(), exp.trials)?;
    let predicted = measurement::abl_probabilities(
        &exp.two_state_vector(),
        &exp.measurement,
        crate::DEFAULT_TOL,
    )?;
    let mut v = compare(&predicted, simulate(exp), sigma_bound)?;
    v.predicted_success_rate = Some(exp.predicted_success_rate());
    Ok(v)
}

/// Simulates a mixture experiment and compares against the convex mixture
/// rule of [`crate::distinguish::mixture_statistics`].
pub fn validate_mixture(exp: &MixtureExperiment, sigma_bound: f64) -> Result<AblValidation> {
    let predicted = crate::distinguish::mixture_statistics(
        &exp.two_state_mixture()?,
        &exp.measurement,
        crate::DEFAULT_TOL,
    )?;
    let weights: Vec<f64> = exp.members.iter().map(|(w, _, _)| *w).collect();
    let rates = exp.member_success_rates();
    let expected_success: f64 = weights.iter().zip(&rates).map(|(w, r)| w * r).sum();
    let joint: Vec<f64> = predicted
        .probabilities
        .iter()
        .map(|p| p * expected_success)
        .collect();
    check_trial_budget(&joint, exp.trials)?;
    let mut v = compare(&predicted, exp.simulate(), sigma_bound)?;
    v.predicted_success_rate = Some(expected_success);
    Ok(v)
}
