//! Seeded, exact-threshold randomness.
//!
//! A Bernoulli trial with rational propensity `a/b` draws an integer uniformly
//! from `[0, b)` and succeeds iff it is `< a`. No floating point is involved, so
//! a trial is replayable bit-for-bit from its seed.

use num_bigint::{BigInt, RandBigInt, Sign};
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::propensity::Propensity;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sub-stream `index` of `seed`.
///
/// This is the `(index + 1)`-th output of a SplitMix64 generator started at
/// `seed`; the rule is fixed and part of the reproducibility contract.
pub fn split_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(index.wrapping_add(1))))
}

/// Single-owner randomness source that counts the draws it makes.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
    draws: u64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            draws: 0,
        }
    }

    /// Number of uniform draws consumed so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    /// Uniform integer in `[0, bound)`. `bound` must be positive.
    pub fn uniform_below(&mut self, bound: &BigInt) -> BigInt {
        assert!(bound.is_positive(), "uniform_below needs a positive bound");
        self.draws += 1;
        match bound.to_u64() {
            Some(b) => BigInt::from(self.rng.gen_range(0..b)),
            None => {
                let (_, mag) = bound.clone().into_parts();
                BigInt::from_biguint(Sign::Plus, self.rng.gen_biguint_below(&mag))
            }
        }
    }

    /// Draws once and reports whether the draw fell below `numer` out of `denom`.
    pub fn below_threshold(&mut self, numer: &BigInt, denom: &BigInt) -> bool {
        match (numer.to_u64(), denom.to_u64()) {
            (Some(a), Some(b)) if b > 0 => {
                self.draws += 1;
                self.rng.gen_range(0..b) < a
            }
            _ => {
                let u = self.uniform_below(denom);
                &u < numer
            }
        }
    }

    /// Bernoulli trial with success propensity `p`.
    ///
    /// Determined propensities return their value without consuming randomness.
    pub fn bernoulli(&mut self, p: &Propensity) -> bool {
        match p.determined_bit() {
            Some(bit) => bit == 1,
            None => self.below_threshold(p.numer(), p.denom()),
        }
    }

    /// Counts successes in `n` independent trials at propensity `p`.
    pub fn binomial(&mut self, p: &Propensity, n: u64) -> u64 {
        if let Some(bit) = p.determined_bit() {
            return u64::from(bit) * n;
        }
        if let (Some(a), Some(b)) = (p.numer().to_u64(), p.denom().to_u64()) {
            self.draws += n;
            return (0..n).filter(|_| self.rng.gen_range(0..b) < a).count() as u64;
        }
        (0..n).filter(|_| self.bernoulli(p)).count() as u64
    }
}
