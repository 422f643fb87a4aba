//! Numerics for the two-state vector formalism.
//!
//! Two-state vectors live in the twin space `H ⊗ H*` and are represented by
//! their `d×d` coefficient matrices. On top of that representation the crate
//! provides the ABL outcome rule, the story predicate (does a pre/post-selected
//! description survive a given ideal measurement at all), constructive
//! story-finding, the null subspace of a measurement, mixture statistics with
//! distinguishability searches, a separable-replication feasibility oracle and
//! a Monte Carlo pre/post-selection simulator.

pub mod distinguish;
pub mod error;
pub mod linalg;
pub mod measurement;
pub mod montecarlo;
pub mod random;
pub mod reproduce;
pub mod structure;
pub mod twin;
pub mod workspace;

pub use error::{Error, Result};
pub use measurement::{
    abl_probabilities, forms_story, measurement_from_basis_grouping, measurement_from_observable,
    outcome_amplitudes, random_measurement, validate_measurement, Measurement, OutcomeDistribution,
    Projector,
};
pub use num_complex::Complex64;
pub use twin::{
    hs_inner, is_separable, schmidt, time_reverse, trace_functional, SchmidtDecomposition,
    StateVector, TwoStateVector,
};

/// Largest supported Hilbert space dimension.
pub const MAX_DIM: usize = 64;

/// Relative tolerance used wherever a quantity is compared against zero.
pub const DEFAULT_TOL: f64 = 1e-10;
