//! Turning binary64 behaviors into exact ones.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use super::behavior::{Behavior, BehaviorError, Context, Entry, ExactBehavior, FloatBehavior};
use crate::propensity::format_rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RationalizeError {
    #[error("context {context}: no rational with denominator <= {max_denominator} lies within {tolerance} of {value}")]
    NoApproximation {
        context: String,
        value: String,
        tolerance: String,
        max_denominator: u64,
    },
    #[error("context {context}: entry {value} is not a finite probability")]
    OutOfRange { context: String, value: String },
    #[error("context {context}: sum misses 1 by {residue}, beyond the tolerance")]
    Residue { context: String, residue: String },
    #[error(transparent)]
    Behavior(#[from] BehaviorError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RationalizeOptions {
    /// Maximum absolute distance between an entry and its rational.
    pub tolerance: f64,
    pub max_denominator: u64,
}

impl Default for RationalizeOptions {
    fn default() -> Self {
        RationalizeOptions {
            tolerance: 1e-9,
            max_denominator: 1_000_000,
        }
    }
}

/// Exact value of a finite `f64`.
fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// The rational with the smallest denominator in `[lo, hi]`, `0 <= lo <= hi`.
///
/// Continued-fraction descent: if an integer lies in the interval take the
/// smallest one, otherwise recurse on the reciprocals of the fractional parts.
pub fn simplest_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    debug_assert!(!lo.is_negative() && lo <= hi);
    let fl = lo.floor();
    if &fl == lo {
        return fl;
    }
    let next = &fl + BigRational::one();
    if &next <= hi {
        return next;
    }
    let inner = simplest_between(&(hi - &fl).recip(), &(lo - &fl).recip());
    fl + inner.recip()
}

/// Simplest rational within `tolerance` of `x` (clipped to `[0, 1]`), if its
/// denominator is at most `max_denominator`.
pub fn approximate(x: f64, tolerance: f64, max_denominator: u64) -> Option<BigRational> {
    if !x.is_finite() || !tolerance.is_finite() || tolerance < 0.0 {
        return None;
    }
    let centre = exact(x);
    let tol = exact(tolerance);
    let lo = (&centre - &tol).max(BigRational::zero());
    let hi = (&centre + &tol).min(BigRational::one());
    if lo > hi {
        return None;
    }
    let r = simplest_between(&lo, &hi);
    (r.denom() <= &BigInt::from(max_denominator)).then_some(r)
}

/// Rationalizes every entry, then makes each context sum exactly 1 by
/// adding the residue to the context's largest entry (first one on ties).
pub fn rationalize(
    behavior: &FloatBehavior,
    options: &RationalizeOptions,
) -> Result<ExactBehavior, RationalizeError> {
    rationalize_entries(&behavior.map(|&x| Entry::Decimal(x)), options)
}

/// Like [`rationalize`] for parsed files; exact entries are kept as given and
/// a context with only exact entries is never renormalized.
pub fn rationalize_entries(
    behavior: &Behavior<Entry>,
    options: &RationalizeOptions,
) -> Result<ExactBehavior, RationalizeError> {
    let mut contexts = Vec::with_capacity(behavior.contexts().len());
    for (ci, c) in behavior.contexts().iter().enumerate() {
        let mut probs = Vec::with_capacity(c.probs.len());
        for e in &c.probs {
            probs.push(match e {
                Entry::Exact(r) => r.clone(),
                Entry::Decimal(x) if !(0.0..=1.0).contains(x) => {
                    return Err(RationalizeError::OutOfRange {
                        context: behavior.context_name(ci),
                        value: x.to_string(),
                    })
                }
                Entry::Decimal(x) => approximate(*x, options.tolerance, options.max_denominator)
                    .ok_or_else(|| RationalizeError::NoApproximation {
                        context: behavior.context_name(ci),
                        value: x.to_string(),
                        tolerance: options.tolerance.to_string(),
                        max_denominator: options.max_denominator,
                    })?,
            });
        }
        let has_decimal = c.probs.iter().any(|e| matches!(e, Entry::Decimal(_)));
        let residue = BigRational::one() - probs.iter().sum::<BigRational>();
        if has_decimal && !residue.is_zero() {
            let slack = exact(options.tolerance) * BigRational::from_integer(probs.len().into());
            if residue.abs() > slack {
                return Err(RationalizeError::Residue {
                    context: behavior.context_name(ci),
                    residue: format_rational(&residue),
                });
            }
            let largest =
                (0..probs.len()).fold(0, |best, i| if probs[i] > probs[best] { i } else { best });
            probs[largest] += residue;
        }
        contexts.push(Context {
            settings: c.settings.clone(),
            probs,
        });
    }
    let out = Behavior::new(behavior.measurements().to_vec(), contexts)?;
    out.check_normalized()?;
    Ok(out)
}

/// Rationalizes one distribution, making it sum to exactly 1.
pub fn rationalize_distribution(
    probs: &[f64],
    options: &RationalizeOptions,
) -> Result<Vec<BigRational>, RationalizeError> {
    let outcomes: Vec<String> = (0..probs.len()).map(|i| i.to_string()).collect();
    let refs: Vec<&str> = outcomes.iter().map(String::as_str).collect();
    let single = Behavior::new(
        vec![super::behavior::Measurement::new("X", &refs)],
        vec![Context {
            settings: vec![0],
            probs: probs.to_vec(),
        }],
    )?;
    let exact = rationalize(&single, options)?;
    Ok(exact.contexts()[0].probs.clone())
}

/// Convergents of the continued-fraction expansion of a rational.
pub fn convergents(x: &BigRational) -> Vec<BigRational> {
    let (mut num, mut den) = (x.numer().clone(), x.denom().clone());
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut out = Vec::new();
    while !den.is_zero() {
        let (a, r) = num.div_mod_floor(&den);
        let h2 = &a * &h1 + &h0;
        let k2 = &a * &k1 + &k0;
        out.push(BigRational::new(h2.clone(), k2.clone()));
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        (num, den) = (den, r);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::behavior::Measurement;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    fn one_context(probs: Vec<f64>) -> FloatBehavior {
        let outcomes: Vec<String> = (0..probs.len()).map(|i| i.to_string()).collect();
        let refs: Vec<&str> = outcomes.iter().map(String::as_str).collect();
        Behavior::new(
            vec![Measurement::new("X", &refs)],
            vec![Context {
                settings: vec![0],
                probs,
            }],
        )
        .unwrap()
    }

    #[test]
    fn simplest_rational() {
        assert_eq!(simplest_between(&r(3, 10), &r(4, 10)), r(1, 3));
        assert_eq!(simplest_between(&r(1, 2), &r(1, 2)), r(1, 2));
        assert_eq!(simplest_between(&r(0, 1), &r(1, 10)), r(0, 1));
        assert_eq!(simplest_between(&r(2, 3), &r(3, 4)), r(2, 3));
        assert_eq!(simplest_between(&r(7, 10), &r(3, 4)), r(3, 4));
    }

    #[test]
    fn dyadics_unchanged() {
        let b = one_context(vec![0.375, 0.125, 0.5]);
        let e = rationalize(&b, &RationalizeOptions::default()).unwrap();
        assert_eq!(e.contexts()[0].probs, vec![r(3, 8), r(1, 8), r(1, 2)]);
    }

    #[test]
    fn near_halves() {
        let b = one_context(vec![0.499999999, 0.500000001]);
        let opts = RationalizeOptions {
            tolerance: 1e-6,
            ..Default::default()
        };
        let e = rationalize(&b, &opts).unwrap();
        assert_eq!(e.contexts()[0].probs, vec![r(1, 2), r(1, 2)]);
    }

    #[test]
    fn residue_goes_to_largest_entry() {
        // 1/5 + 1/3 + 1/2 = 31/30, so the 1/2 absorbs -1/30
        let b = one_context(vec![0.2, 0.3, 0.5]);
        let opts = RationalizeOptions {
            tolerance: 0.04,
            max_denominator: 100,
        };
        let e = rationalize(&b, &opts).unwrap();
        assert_eq!(e.contexts()[0].probs, vec![r(1, 5), r(1, 3), r(7, 15)]);
    }

    #[test]
    fn irrational_beyond_denominator_cap() {
        let b = one_context(vec![
            std::f64::consts::FRAC_1_SQRT_2,
            1.0 - std::f64::consts::FRAC_1_SQRT_2,
        ]);
        let opts = RationalizeOptions {
            tolerance: 1e-12,
            max_denominator: 1000,
        };
        assert!(matches!(
            rationalize(&b, &opts),
            Err(RationalizeError::NoApproximation { .. })
        ));
        let e = rationalize(&b, &RationalizeOptions::default()).unwrap();
        e.check_normalized().unwrap();
    }

    #[test]
    fn sum_far_from_one_is_rejected() {
        let b = one_context(vec![0.25, 0.25]);
        assert!(matches!(
            rationalize(&b, &RationalizeOptions::default()),
            Err(RationalizeError::Residue { .. })
        ));
    }

    #[test]
    fn convergents_of_known_fraction() {
        // 355/113 = [3; 7, 16]
        assert_eq!(
            convergents(&r(355, 113)),
            vec![r(3, 1), r(22, 7), r(355, 113)]
        );
    }
}
