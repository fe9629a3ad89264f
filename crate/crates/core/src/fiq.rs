//! Finite-information quantities: binary expansions whose digits are
//! propensities.
//!
//! A [`Fiq`] stores digits `1..=L` after the radix point explicitly. Every
//! digit past `L` has propensity exactly `1/2`, which carries zero
//! information, so the total information of any representable value is finite.
//!
//! Text form: `0.` followed by `0`/`1` for determined digits and `(a/b)` for
//! indeterminate ones. The printer always closes with `(1/2)` to mark the
//! implicit tail, e.g. `0.10(3/4)(1/2)`; the parser accepts the marker or its
//! absence.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::propensity::{info_content, Propensity, PropensityError};
use crate::sampling::Sampler;

/// Default resource guard on explicit digit storage.
pub const DEFAULT_MAX_DIGITS: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiqError {
    #[error("digit index must start at 1, got {0}")]
    ZeroIndex(usize),
    #[error("digit index {index} exceeds the explicit digit limit {max}")]
    DigitLimit { index: usize, max: usize },
    #[error("malformed FIQ `{text}` at byte {pos}: {reason}")]
    Parse {
        text: String,
        pos: usize,
        reason: String,
    },
    #[error(transparent)]
    Propensity(#[from] PropensityError),
}

/// An ordered list of digit propensities with an implicit `1/2` tail.
///
/// Always canonical: trailing explicit `1/2` digits are trimmed, so equality
/// is equality of the digit stream.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Fiq {
    digits: Vec<Propensity>,
}

/// The closed dyadic interval fixed by the determined prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeterminedInterval {
    pub lower: BigRational,
    pub upper: BigRational,
}

impl DeterminedInterval {
    pub fn width(&self) -> BigRational {
        &self.upper - &self.lower
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lower <= x && x <= &self.upper
    }
}

impl Fiq {
    pub fn new(digits: Vec<Propensity>) -> Self {
        let mut f = Fiq { digits };
        f.canonicalize();
        f
    }

    /// Every digit at `1/2`: no information at all.
    pub fn pure_potentiality() -> Self {
        Fiq::default()
    }

    /// Fully determined digits from a `0`/`1` string, followed by the `1/2` tail.
    pub fn from_bits(bits: &str) -> Result<Self, FiqError> {
        let digits = bits
            .char_indices()
            .map(|(i, c)| match c {
                '0' => Ok(Propensity::zero()),
                '1' => Ok(Propensity::one()),
                _ => Err(FiqError::Parse {
                    text: bits.to_string(),
                    pos: i,
                    reason: format!("expected 0 or 1, found `{c}`"),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Fiq::new(digits))
    }

    fn canonicalize(&mut self) {
        while self.digits.last().is_some_and(Propensity::is_half) {
            self.digits.pop();
        }
    }

    /// Explicit digits, most significant first.
    pub fn digits(&self) -> &[Propensity] {
        &self.digits
    }

    pub fn into_digits(self) -> Vec<Propensity> {
        self.digits
    }

    /// Number of explicit digits `L`.
    pub fn explicit_len(&self) -> usize {
        self.digits.len()
    }

    /// Propensity of digit `j` (1-based); `1/2` beyond the explicit digits.
    pub fn digit(&self, j: usize) -> Propensity {
        assert!(j >= 1, "digit indices start at 1");
        self.digits
            .get(j - 1)
            .cloned()
            .unwrap_or_else(Propensity::half)
    }

    /// Replaces digit `j`, padding with `1/2` if it lies in the tail.
    pub fn with_digit(&self, j: usize, q: Propensity) -> Result<Fiq, FiqError> {
        if j == 0 {
            return Err(FiqError::ZeroIndex(j));
        }
        let mut digits = self.digits.clone();
        if j > digits.len() {
            digits.resize(j, Propensity::half());
        }
        digits[j - 1] = q;
        Ok(Fiq::new(digits))
    }

    /// Sum of per-digit information content over the explicit digits.
    pub fn total_information(&self) -> f64 {
        self.digits.iter().map(info_content).sum()
    }

    /// Length `n` of the maximal leading run of determined digits.
    pub fn determined_len(&self) -> usize {
        self.digits.iter().take_while(|q| q.is_determined()).count()
    }

    /// The leading determined bits and their count.
    pub fn determined_prefix(&self) -> (String, usize) {
        let bits: String = self
            .digits
            .iter()
            .map_while(|q| q.determined_bit())
            .map(|b| if b == 1 { '1' } else { '0' })
            .collect();
        let n = bits.len();
        (bits, n)
    }

    /// `[v, v + 2^-n]` where `v` is the dyadic value of the determined prefix.
    pub fn interval(&self) -> DeterminedInterval {
        let (bits, n) = self.determined_prefix();
        let mut numer = BigInt::zero();
        for b in bits.bytes() {
            numer <<= 1;
            if b == b'1' {
                numer += 1;
            }
        }
        let denom = BigInt::one() << n;
        let lower = BigRational::new(numer, denom.clone());
        let upper = &lower + BigRational::new(BigInt::one(), denom);
        DeterminedInterval { lower, upper }
    }

    /// Resolves digit `j` into a bit.
    ///
    /// A determined digit echoes its value and consumes no randomness.
    /// Otherwise one exact-threshold draw decides the bit, and the digit's
    /// propensity becomes 0 or 1. `j` may lie in the implicit tail but not
    /// past `max_digits`.
    pub fn actualize_digit(
        &self,
        j: usize,
        sampler: &mut Sampler,
        max_digits: usize,
    ) -> Result<(Fiq, u8), FiqError> {
        if j == 0 {
            return Err(FiqError::ZeroIndex(j));
        }
        if j > max_digits {
            return Err(FiqError::DigitLimit {
                index: j,
                max: max_digits,
            });
        }
        let q = self.digit(j);
        if let Some(bit) = q.determined_bit() {
            return Ok((self.clone(), bit));
        }
        let bit = u8::from(sampler.bernoulli(&q));
        Ok((self.with_digit(j, Propensity::from_bit(bit))?, bit))
    }
}

/// Total information of a Fiq, in bits.
pub fn fiq_total_information(x: &Fiq) -> f64 {
    x.total_information()
}

impl fmt::Display for Fiq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("0.")?;
        for q in &self.digits {
            match q.determined_bit() {
                Some(0) => f.write_str("0")?,
                Some(_) => f.write_str("1")?,
                None => write!(f, "({q})")?,
            }
        }
        f.write_str("(1/2)")
    }
}

impl FromStr for Fiq {
    type Err = FiqError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |pos: usize, reason: &str| FiqError::Parse {
            text: s.to_string(),
            pos,
            reason: reason.to_string(),
        };
        let body = s
            .strip_prefix("0.")
            .ok_or_else(|| err(0, "expected leading `0.`"))?;
        let mut digits = Vec::new();
        let mut rest = body;
        while let Some(c) = rest.chars().next() {
            let pos = s.len() - rest.len();
            match c {
                '0' | '1' => {
                    digits.push(Propensity::from_bit(u8::from(c == '1')));
                    rest = &rest[1..];
                }
                '(' => {
                    let close = rest.find(')').ok_or_else(|| err(pos, "unclosed `(`"))?;
                    let q: Propensity = rest[1..close]
                        .parse()
                        .map_err(|e: PropensityError| err(pos + 1, &e.to_string()))?;
                    digits.push(q);
                    rest = &rest[close + 1..];
                }
                other => return Err(err(pos, &format!("unexpected `{other}`"))),
            }
        }
        Ok(Fiq::new(digits))
    }
}
