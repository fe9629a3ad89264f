//! Single-case causal propensities: the Humphreys no-go checker and the
//! Bernoulli law-of-large-numbers harness.
//!
//! All verdict arithmetic is exact. The checker reads the model with ordinary
//! probability arithmetic and reports where the causal reading breaks down.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::propensity::Propensity;
use crate::sampling::{split_seed, Sampler};

/// Cause `C` with propensity `cause`, effect `E` with conditional propensities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CausalModel {
    pub cause: Propensity,
    pub effect_given_cause: Propensity,
    pub effect_given_not_cause: Propensity,
}

impl CausalModel {
    pub fn new(
        cause: Propensity,
        effect_given_cause: Propensity,
        effect_given_not_cause: Propensity,
    ) -> Self {
        CausalModel {
            cause,
            effect_given_cause,
            effect_given_not_cause,
        }
    }
}

/// Total propensity of the effect, `pC·pE|C + (1 - pC)·pE|¬C`.
pub fn marginal_effect(model: &CausalModel) -> Propensity {
    let c = model.cause.value();
    let v = c * model.effect_given_cause.value()
        + model.cause.complement().value() * model.effect_given_not_cause.value();
    Propensity::new(v).expect("convex combination of propensities stays in [0, 1]")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HumphreysError {
    #[error("degenerate model: cause propensity is 0, Bayes reversal divides by P(C)")]
    ZeroCause,
    #[error("degenerate model: effect propensity is 0, P(C|E) is undefined")]
    ZeroEffect,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HumphreysVerdict {
    /// `P(E)`.
    pub effect: Propensity,
    /// `P(E|C) != P(E)`.
    pub causally_nontrivial: bool,
    /// `P(C|E)` by Bayes on the joint.
    pub bayes_reversal: Propensity,
    /// `P(C|¬E)`, or `None` when `P(E) = 1`.
    pub cause_given_not_effect: Option<Propensity>,
    /// Whether the joint already satisfies `P(C|E) = P(C|¬E) = P(C)`.
    pub constraint_holds: bool,
    /// `P(C|E)·P(E)/P(C)` evaluated after imposing `P(C|E) = P(C)`.
    pub forced_effect_given_cause: Propensity,
    /// The model is causally nontrivial, yet the constraint forces `P(E|C) = P(E)`.
    pub contradiction: bool,
}

/// Runs the no-go derivation on `model`.
///
/// Bayes gives `P(E|C) = P(C|E)·P(E)/P(C)`. Imposing the causal constraint
/// `P(C|E) = P(C)` collapses the right side to `P(E)`, which contradicts any
/// nontrivial `P(E|C)`.
pub fn humphreys_check(model: &CausalModel) -> Result<HumphreysVerdict, HumphreysError> {
    if model.cause.value().is_zero() {
        return Err(HumphreysError::ZeroCause);
    }
    let effect = marginal_effect(model);
    if effect.value().is_zero() {
        return Err(HumphreysError::ZeroEffect);
    }
    let pc = model.cause.value();
    let pe = effect.value();
    let joint_ce = pc * model.effect_given_cause.value();
    let bayes_reversal =
        Propensity::new(&joint_ce / pe).expect("P(C and E) <= P(E) keeps the reversal in [0, 1]");

    let not_effect = effect.complement();
    let cause_given_not_effect = (!not_effect.value().is_zero()).then(|| {
        let joint = pc * model.effect_given_cause.complement().value();
        Propensity::new(joint / not_effect.value()).expect("conditional stays in [0, 1]")
    });
    let constraint_holds = bayes_reversal == model.cause
        && cause_given_not_effect
            .as_ref()
            .is_none_or(|q| q == &model.cause);

    // P(C|E) := P(C) substituted into Bayes' rule
    let forced = Propensity::new(pc * pe / pc).expect("equals P(E)");
    let causally_nontrivial = model.effect_given_cause != effect;
    let contradiction = causally_nontrivial && forced != model.effect_given_cause;

    Ok(HumphreysVerdict {
        effect,
        causally_nontrivial,
        bayes_reversal,
        cause_given_not_effect,
        constraint_holds,
        forced_effect_given_cause: forced,
        contradiction,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LlnError {
    #[error("trials per run must be at least 1")]
    NoTrials,
    #[error("runs must be at least 1")]
    NoRuns,
    #[error("epsilon must lie strictly between 0 and 1, got {0}")]
    Epsilon(String),
}

/// One row of a law-of-large-numbers experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct LlnReport {
    pub propensity: Propensity,
    pub trials: u64,
    pub runs: u64,
    pub epsilon: BigRational,
    /// Number of runs with `|f_n - p| >= epsilon`.
    pub deviating_runs: u64,
    pub deviation_fraction: f64,
    /// Hoeffding bound `2·exp(-2nε²)` on the deviation probability.
    pub hoeffding_bound: f64,
}

/// `2·exp(-2nε²)`.
pub fn hoeffding_bound(trials: u64, epsilon: f64) -> f64 {
    2.0 * (-2.0 * trials as f64 * epsilon * epsilon).exp()
}

/// Fraction of `runs` independent runs of `trials` Bernoulli(`p`) draws whose
/// relative frequency misses `p` by at least `epsilon`.
///
/// Run `r` uses `split_seed(seed, r)`. The deviation test is exact:
/// `|k - n·p| >= n·ε` in rationals.
pub fn lln_experiment(
    p: &Propensity,
    trials: u64,
    runs: u64,
    epsilon: &BigRational,
    seed: u64,
) -> Result<LlnReport, LlnError> {
    if trials == 0 {
        return Err(LlnError::NoTrials);
    }
    if runs == 0 {
        return Err(LlnError::NoRuns);
    }
    if !epsilon.is_positive() || epsilon >= &BigRational::from_integer(1.into()) {
        return Err(LlnError::Epsilon(epsilon.to_string()));
    }
    let n = BigRational::from_integer(BigInt::from(trials));
    let center = &n * p.value();
    let margin = &n * epsilon;
    let deviating_runs = (0..runs)
        .into_par_iter()
        .filter(|&r| {
            let mut sampler = Sampler::new(split_seed(seed, r));
            let k = BigRational::from_integer(BigInt::from(sampler.binomial(p, trials)));
            (k - &center).abs() >= margin
        })
        .count() as u64;
    let eps = epsilon.to_f64().unwrap_or(f64::NAN);
    Ok(LlnReport {
        propensity: p.clone(),
        trials,
        runs,
        epsilon: epsilon.clone(),
        deviating_runs,
        deviation_fraction: deviating_runs as f64 / runs as f64,
        hoeffding_bound: hoeffding_bound(trials, eps),
    })
}
