//! Simulator for single and pairs of unstable neutral mesons (kaon-like
//! two-level systems with an explicit vacuum sector) evolving under a
//! completely positive Kraus channel that covers decay, flavor oscillation,
//! CP violation and decoherence.
//!
//! The crate provides
//!
//! - the parameter set with its complete-positivity bound check
//!   ([`params`]),
//! - the basis layout and dense operator algebra, including the
//!   permutation machinery for identical particles ([`hilbert`]),
//! - the lab-frame Kraus families for one particle and non-interacting
//!   pairs ([`kraus`]),
//! - the strangeness and detector observables and singlet states for both
//!   particle statistics ([`observables`]),
//! - channel application, projective measurement and the EPR joint
//!   probabilities and correlation functions, each computed along two
//!   independent routes ([`evolution`]),
//! - closed-form oracles for those correlations ([`analytic`]), and
//! - the `correlate` / `probabilities` / `validate` command-line surface
//!   ([`cli`]).
//!
//! Everything works on dense complex matrices of dimension at most 25 and
//! values are immutable after construction, so all of it is safe to use
//! from concurrent sweeps.

pub mod analytic;
pub mod cli;
pub mod error;
pub mod evolution;
pub mod hilbert;
pub mod kraus;
mod linalg;
pub mod observables;
pub mod params;

pub use error::{Error, Result};
pub use evolution::{
    correlation, correlation_from_probabilities, evolve, heisenberg_observable, joint_probability,
    joint_probability_factorized, measure, CorrelationResult, MeasurementOutcome,
};
pub use hilbert::{
    expectation, is_symmetric, permutation_operator, tensor, DensityOperator, Flavor, Momentum,
    Operator, PairLayout, SpaceLayout,
};
pub use kraus::{build_kraus, proper_time, two_particle_kraus, verify_normalization, KrausSet};
pub use observables::{singlet_state, DetectorSign, StatisticsMode};
pub use params::{PhysicalParams, Preset};
