//! Exact single-case propensities and their binary-entropy accounting.
//!
//! A [`Propensity`] is an exact rational in `[0, 1]`. Everything probabilistic
//! (sampling thresholds, equality, the causal checker) works on the exact
//! value; only information accounting drops to `f64`, because `H(q)` is
//! irrational for almost every rational `q`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PropensityError {
    #[error("propensity {0} lies outside [0, 1]")]
    OutOfRange(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("cannot parse `{0}` as a rational a/b")]
    Syntax(String),
}

/// An exact rational tendency in `[0, 1]`, always stored in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Propensity(BigRational);

impl Propensity {
    pub fn new(value: BigRational) -> Result<Self, PropensityError> {
        if value.is_negative() || value > BigRational::one() {
            return Err(PropensityError::OutOfRange(value.to_string()));
        }
        Ok(Propensity(value))
    }

    /// Builds `numer/denom`; the fraction is reduced.
    pub fn from_ratio(numer: i64, denom: i64) -> Result<Self, PropensityError> {
        if denom == 0 {
            return Err(PropensityError::ZeroDenominator(format!("{numer}/{denom}")));
        }
        Self::new(BigRational::new(numer.into(), denom.into()))
    }

    pub fn zero() -> Self {
        Propensity(BigRational::zero())
    }

    pub fn one() -> Self {
        Propensity(BigRational::one())
    }

    pub fn half() -> Self {
        Propensity(BigRational::new(1.into(), 2.into()))
    }

    /// Propensity of a determined bit.
    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            Self::zero()
        } else {
            Self::one()
        }
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn into_value(self) -> BigRational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_determined(&self) -> bool {
        self.0.is_zero() || self.0.is_one()
    }

    pub fn is_half(&self) -> bool {
        *self.0.numer() == BigInt::one() && *self.0.denom() == BigInt::from(2)
    }

    /// The bit this propensity fixes, if it is 0 or 1.
    pub fn determined_bit(&self) -> Option<u8> {
        if self.0.is_zero() {
            Some(0)
        } else if self.0.is_one() {
            Some(1)
        } else {
            None
        }
    }

    /// `1 - q`, the propensity of the complementary outcome.
    pub fn complement(&self) -> Self {
        Propensity(BigRational::one() - &self.0)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(0.0)
    }
}

impl fmt::Display for Propensity {
    /// Always `a/b`, including `0/1` and `1/1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Propensity {
    type Err = PropensityError;

    /// Accepts `a/b` or a bare integer (`0`, `1`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Propensity::new(parse_rational(s)?)
    }
}

/// Parses `a/b` or an integer into an exact rational (sign allowed).
pub fn parse_rational(s: &str) -> Result<BigRational, PropensityError> {
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| PropensityError::Syntax(s.to_string()))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| PropensityError::Syntax(s.to_string()))?;
    if den.is_zero() {
        return Err(PropensityError::ZeroDenominator(s.to_string()));
    }
    Ok(BigRational::new(num, den))
}

/// Renders a rational as `a/b` with an explicit denominator.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn neg_x_lg_x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Binary entropy `H(q)` in bits, with `0 lg 0 = 0`.
///
/// Both `q` and `1 - q` are formed exactly before conversion, so
/// `H(q) == H(1 - q)` holds bit-for-bit.
pub fn binary_entropy(q: &Propensity) -> f64 {
    if q.is_determined() {
        return 0.0;
    }
    let p = q.to_f64();
    let r = q.complement().to_f64();
    let (a, b) = (neg_x_lg_x(p), neg_x_lg_x(r));
    (a + b).clamp(0.0, 1.0)
}

/// Information content `I(q) = 1 - H(q)` of a single digit propensity.
pub fn info_content(q: &Propensity) -> f64 {
    1.0 - binary_entropy(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(a: i64, b: i64) -> Propensity {
        Propensity::from_ratio(a, b).unwrap()
    }

    #[test]
    fn construction_rejects_out_of_range() {
        assert!(Propensity::from_ratio(3, 2).is_err());
        assert!(Propensity::from_ratio(-1, 5).is_err());
        assert!(matches!(
            Propensity::from_ratio(1, 0),
            Err(PropensityError::ZeroDenominator(_))
        ));
        assert_eq!(p(2, 4), Propensity::half());
        assert_eq!(p(2, 4).denom(), &BigInt::from(2));
    }

    #[test]
    fn determined_values() {
        assert!(p(0, 7).is_determined());
        assert!(p(5, 5).is_determined());
        assert!(!p(1, 3).is_determined());
        assert_eq!(p(1, 1).determined_bit(), Some(1));
        assert_eq!(p(0, 1).determined_bit(), Some(0));
        assert_eq!(p(1, 3).determined_bit(), None);
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("3/4".parse::<Propensity>().unwrap(), p(3, 4));
        assert_eq!("1".parse::<Propensity>().unwrap(), Propensity::one());
        assert_eq!(Propensity::one().to_string(), "1/1");
        assert_eq!(Propensity::zero().to_string(), "0/1");
        assert!("x/2".parse::<Propensity>().is_err());
        assert!("5/4".parse::<Propensity>().is_err());
    }

    #[test]
    fn entropy_edges() {
        assert_eq!(binary_entropy(&Propensity::half()), 1.0);
        assert_eq!(binary_entropy(&Propensity::zero()), 0.0);
        assert_eq!(binary_entropy(&Propensity::one()), 0.0);
        assert_eq!(info_content(&Propensity::half()), 0.0);
        assert_eq!(info_content(&Propensity::one()), 1.0);
    }

    #[test]
    fn entropy_quarter() {
        // -(1/4)lg(1/4) - (3/4)lg(3/4) = 2 - (3/4) lg 3
        let expected = 2.0 - 0.75 * 3f64.log2();
        assert!((binary_entropy(&p(1, 4)) - expected).abs() < 1e-15);
        assert!((info_content(&p(1, 4)) - (1.0 - expected)).abs() < 1e-15);
    }
}
