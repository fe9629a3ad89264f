//! Does a family of per-context distributions fit in one probability space?
//!
//! The points of such a space are deterministic global assignments, one
//! outcome per measurement. A behavior has a global space exactly when it is a
//! convex mixture of those assignments; this is decided by exact linear
//! programming. The answer comes with a certificate either way: the mixing
//! weights, or a linear functional whose value on the behavior exceeds its
//! maximum over every assignment.
//!
//! Only existence is decided. Whether such hidden variables would be
//! accessible is a question the linear program cannot see.

pub mod behavior;
pub mod rationalize;
pub mod simplex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

pub use behavior::{
    parse_behavior, Behavior, BehaviorError, Context, Entry, ExactBehavior, FloatBehavior,
    Measurement,
};
pub use rationalize::{
    rationalize, rationalize_distribution, rationalize_entries, RationalizeError,
    RationalizeOptions,
};

use crate::fiq::Fiq;
use simplex::{phase_one, ColumnSource, PhaseOne};

/// Default cap on the number of deterministic assignments.
pub const DEFAULT_ASSIGNMENT_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeasibilityError {
    #[error("{count} deterministic assignments exceed the cap of {cap}")]
    CapExceeded { count: u128, cap: u128 },
    #[error(transparent)]
    Behavior(#[from] BehaviorError),
}

/// A global assignment: outcome index per measurement.
pub type Assignment = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatingFunctional {
    /// Coefficient per context and joint outcome, primitive integers.
    pub coefficients: Vec<Vec<BigRational>>,
    /// Maximum of the functional over all deterministic assignments.
    pub bound: BigRational,
    /// Value of the functional on the behavior.
    pub value: BigRational,
}

impl SeparatingFunctional {
    pub fn violation(&self) -> BigRational {
        &self.value - &self.bound
    }

    pub fn evaluate(&self, behavior: &ExactBehavior) -> BigRational {
        behavior
            .contexts()
            .iter()
            .zip(&self.coefficients)
            .flat_map(|(c, coeffs)| c.probs.iter().zip(coeffs).map(|(p, k)| p * k))
            .sum()
    }

    fn at_assignment(&self, behavior: &ExactBehavior, a: &[usize]) -> BigRational {
        (0..behavior.contexts().len())
            .map(|ci| self.coefficients[ci][behavior.joint_index(ci, a)].clone())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeasibilityVerdict {
    /// Mixing weights over deterministic assignments; they sum to 1.
    Feasible {
        weights: Vec<(Assignment, BigRational)>,
    },
    Infeasible {
        functional: SeparatingFunctional,
    },
}

impl FeasibilityVerdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityVerdict::Feasible { .. })
    }
}

struct AssignmentColumns<'a> {
    behavior: &'a ExactBehavior,
    offsets: Vec<usize>,
    norm_row: usize,
}

impl<'a> AssignmentColumns<'a> {
    fn new(behavior: &'a ExactBehavior) -> Self {
        let mut offsets = Vec::with_capacity(behavior.contexts().len());
        let mut acc = 0;
        for ci in 0..behavior.contexts().len() {
            offsets.push(acc);
            acc += behavior.joint_outcome_count(ci);
        }
        AssignmentColumns {
            behavior,
            offsets,
            norm_row: acc,
        }
    }

    fn rows(&self, index: u128) -> impl Iterator<Item = usize> + '_ {
        let a = self.behavior.assignment(index);
        (0..self.offsets.len())
            .map(move |ci| self.offsets[ci] + self.behavior.joint_index(ci, &a))
            .chain(std::iter::once(self.norm_row))
    }
}

impl ColumnSource for AssignmentColumns<'_> {
    fn column_count(&self) -> u128 {
        self.behavior.assignment_count()
    }

    fn column(&self, index: u128) -> Vec<(usize, BigRational)> {
        self.rows(index).map(|r| (r, BigRational::one())).collect()
    }

    fn dot(&self, y: &[BigRational], index: u128) -> BigRational {
        self.rows(index).map(|r| &y[r]).sum()
    }
}

/// Decides whether `behavior` is a mixture of deterministic global assignments.
pub fn check_global_space(
    behavior: &ExactBehavior,
    assignment_cap: u128,
) -> Result<FeasibilityVerdict, FeasibilityError> {
    behavior.check_normalized()?;
    let count = behavior.assignment_count();
    if count > assignment_cap {
        return Err(FeasibilityError::CapExceeded {
            count,
            cap: assignment_cap,
        });
    }
    let columns = AssignmentColumns::new(behavior);
    let mut rhs: Vec<BigRational> = behavior
        .contexts()
        .iter()
        .flat_map(|c| c.probs.iter().cloned())
        .collect();
    rhs.push(BigRational::one());

    match phase_one(&rhs, &columns) {
        PhaseOne::Feasible(solution) => {
            let mut weights: Vec<(Assignment, BigRational)> = solution
                .into_iter()
                .map(|(j, w)| (behavior.assignment(j), w))
                .collect();
            weights.sort();
            Ok(FeasibilityVerdict::Feasible { weights })
        }
        PhaseOne::Infeasible(y) => {
            let scaled = primitive_integer_vector(&y);
            let coefficients = behavior
                .contexts()
                .iter()
                .enumerate()
                .map(|(ci, c)| {
                    (0..c.probs.len())
                        .map(|k| scaled[columns.offsets[ci] + k].clone())
                        .collect()
                })
                .collect();
            let mut functional = SeparatingFunctional {
                coefficients,
                bound: BigRational::zero(),
                value: BigRational::zero(),
            };
            functional.value = functional.evaluate(behavior);
            functional.bound = max_over_assignments(behavior, &functional);
            debug_assert!(functional.value > functional.bound);
            Ok(FeasibilityVerdict::Infeasible { functional })
        }
    }
}

/// Positive rescaling of `v` to coprime integers.
fn primitive_integer_vector(v: &[BigRational]) -> Vec<BigRational> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &lcm).to_integer()).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let gcd = if gcd.is_zero() { BigInt::one() } else { gcd };
    ints.into_iter()
        .map(|x| BigRational::from_integer(x / &gcd))
        .collect()
}

fn max_over_assignments(behavior: &ExactBehavior, f: &SeparatingFunctional) -> BigRational {
    let n = behavior.assignment_count() as u64;
    (0..n)
        .into_par_iter()
        .map(|j| f.at_assignment(behavior, &behavior.assignment(j as u128)))
        .reduce_with(|a, b| if a >= b { a } else { b })
        .unwrap_or_else(BigRational::zero)
}

/// Checks that `weights` are a probability vector whose mixture reproduces
/// every context of `behavior` exactly.
pub fn verify_mixture(behavior: &ExactBehavior, weights: &[(Assignment, BigRational)]) -> bool {
    if weights.iter().any(|(_, w)| w.is_negative()) {
        return false;
    }
    if !weights.iter().map(|(_, w)| w).sum::<BigRational>().is_one() {
        return false;
    }
    behavior.contexts().iter().enumerate().all(|(ci, c)| {
        let mut mixed = vec![BigRational::zero(); c.probs.len()];
        for (a, w) in weights {
            mixed[behavior.joint_index(ci, a)] += w;
        }
        mixed == c.probs
    })
}

/// Re-derives the bound of `f` by enumeration and checks strict separation.
pub fn verify_separation(behavior: &ExactBehavior, f: &SeparatingFunctional) -> bool {
    let bound = max_over_assignments(behavior, f);
    let value = f.evaluate(behavior);
    bound <= f.bound && value == f.value && value > f.bound
}

/// Largest CHSH expression `|E00 + E01 + E10 + E11 - 2·Exy|` of a two-party,
/// two-setting, two-outcome behavior, where `Exy = p(same) - p(different)`.
///
/// `None` when the behavior does not have that shape.
pub fn chsh_value(behavior: &ExactBehavior) -> Option<BigRational> {
    let ms = behavior.measurements();
    if behavior.contexts().len() != 4 || ms.iter().any(|m| m.outcomes.len() != 2) {
        return None;
    }
    let mut firsts: Vec<usize> = Vec::new();
    let mut seconds: Vec<usize> = Vec::new();
    for c in behavior.contexts() {
        if c.settings.len() != 2 {
            return None;
        }
        if !firsts.contains(&c.settings[0]) {
            firsts.push(c.settings[0]);
        }
        if !seconds.contains(&c.settings[1]) {
            seconds.push(c.settings[1]);
        }
    }
    if firsts.len() != 2 || seconds.len() != 2 {
        return None;
    }
    let mut corr = [
        [BigRational::zero(), BigRational::zero()],
        [BigRational::zero(), BigRational::zero()],
    ];
    let mut seen = [[false; 2]; 2];
    for c in behavior.contexts() {
        let x = firsts.iter().position(|&s| s == c.settings[0])?;
        let y = seconds.iter().position(|&s| s == c.settings[1])?;
        if std::mem::replace(&mut seen[x][y], true) {
            return None;
        }
        corr[x][y] = &c.probs[0] + &c.probs[3] - &c.probs[1] - &c.probs[2];
    }
    let total: BigRational = corr.iter().flatten().sum();
    let two = BigRational::from_integer(2.into());
    corr.iter()
        .flatten()
        .map(|e| (&total - &two * e).abs())
        .max()
}

/// Two-party behavior whose every context is the exact product of local
/// distributions, `p(a, b | x, y) = p_A(a | x) · p_B(b | y)`.
///
/// Each entry of `party_a`/`party_b` is a measurement and its outcome
/// distribution. Such a behavior is always a mixture of product assignments.
pub fn product_behavior(
    party_a: &[(Measurement, Vec<BigRational>)],
    party_b: &[(Measurement, Vec<BigRational>)],
) -> Result<ExactBehavior, BehaviorError> {
    let measurements = party_a
        .iter()
        .chain(party_b)
        .map(|(m, _)| m.clone())
        .collect();
    let mut contexts = Vec::with_capacity(party_a.len() * party_b.len());
    for (x, (_, pa)) in party_a.iter().enumerate() {
        for (y, (_, pb)) in party_b.iter().enumerate() {
            contexts.push(Context {
                settings: vec![x, party_a.len() + y],
                probs: pa
                    .iter()
                    .flat_map(|a| pb.iter().map(move |b| a * b))
                    .collect(),
            });
        }
    }
    let b = Behavior::new(measurements, contexts)?;
    b.check_normalized()?;
    Ok(b)
}

/// One-context behavior of a single FIQ measured at `precision` digits.
///
/// Outcomes are the `2^precision` bit strings; digits are independent, so each
/// outcome's propensity is the product of its digits' propensities.
pub fn single_fiq_behavior(x: &Fiq, precision: usize) -> ExactBehavior {
    let outcomes: Vec<String> = (0..1usize << precision)
        .map(|k| format!("{k:0precision$b}"))
        .collect();
    let probs = (0..1usize << precision)
        .map(|k| {
            (1..=precision)
                .map(|j| {
                    let q = x.digit(j);
                    if (k >> (precision - j)) & 1 == 1 {
                        q.into_value()
                    } else {
                        q.complement().into_value()
                    }
                })
                .product()
        })
        .collect();
    let refs: Vec<&str> = outcomes.iter().map(String::as_str).collect();
    Behavior::new(
        vec![Measurement::new("X", &refs)],
        vec![Context {
            settings: vec![0],
            probs,
        }],
    )
    .expect("well-formed single context")
}
