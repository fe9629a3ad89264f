//! Finite-information quantities and single-case propensities.
//!
//! - [`propensity`]: exact propensities and binary-entropy accounting.
//! - [`fiq`]: digit-propensity expansions with an implicit `1/2` tail.
//! - [`dynamics`]: chaotic digit-shift maps and trajectory records.
//! - [`measurement`]: actualization by measurement or spontaneous localization.
//! - [`calculus`]: the Humphreys checker and the law-of-large-numbers harness.
//! - [`quantum`]: Born-rule behaviors over incompatible contexts.
//! - [`feasibility`]: exact test for a single global probability space.
//!
//! Randomness always flows through a seeded [`sampling::Sampler`], so every
//! stochastic result is replayable from its seed.

pub mod calculus;
pub mod dynamics;
pub mod feasibility;
pub mod fiq;
pub mod measurement;
pub mod propensity;
pub mod quantum;
pub mod sampling;

pub use calculus::{
    humphreys_check, lln_experiment, marginal_effect, CausalModel, HumphreysVerdict,
};
pub use dynamics::{
    ensemble_spread, run_trajectory, step_map, MapKind, Trajectory, TrajectoryConfig,
    TrajectoryRecord,
};
pub use feasibility::{check_global_space, FeasibilityVerdict};
pub use fiq::{DeterminedInterval, Fiq, FiqError, DEFAULT_MAX_DIGITS};
pub use measurement::{
    measure, spontaneous_hook, ActualizationEvent, ActualizationMechanism, MeasurementOutcome,
};
pub use propensity::{binary_entropy, info_content, Propensity};
pub use sampling::{split_seed, Sampler};
