//! Independent oracles shared by the integration tests. Nothing here calls
//! into the code path it checks.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const SCALE_DIGITS: u32 = 60;

fn scale() -> BigInt {
    BigInt::from(10).pow(SCALE_DIGITS)
}

/// `ln(n)` for an integer `n >= 1` as a fixed-point integer scaled by 10^60,
/// via `ln x = 2·atanh((x-1)/(x+1))` summed until terms vanish.
fn ln_fixed(n: u64) -> BigInt {
    if n == 1 {
        return BigInt::zero();
    }
    let s = scale();
    let num = BigInt::from(n - 1);
    let den = BigInt::from(n + 1);
    let mut power = &s * &num / &den; // z^(2k+1) scaled
    let z2_num = &num * &num;
    let z2_den = &den * &den;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !power.is_zero() {
        sum += &power / BigInt::from(2 * k + 1);
        power = power * &z2_num / &z2_den;
        k += 1;
    }
    sum * 2
}

/// Binary entropy of `a/b` to ~50 significant digits, returned as f64.
pub fn entropy_oracle(a: u64, b: u64) -> f64 {
    if a == 0 || a == b {
        return 0.0;
    }
    // H = lg b - (a lg a + (b-a) lg(b-a)) / b
    let ln2 = ln_fixed(2);
    let weighted = BigInt::from(b) * ln_fixed(b)
        - BigInt::from(a) * ln_fixed(a)
        - BigInt::from(b - a) * ln_fixed(b - a);
    let h = BigRational::new(weighted, BigInt::from(b) * ln2);
    h.to_f64().unwrap()
}

fn binomial(n: u64, k: u64) -> BigInt {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    c
}

/// Exact `P(|K/n - a/b| >= eps)` for `K ~ Bin(n, a/b)`.
pub fn binomial_deviation_tail(n: u64, a: u64, b: u64, eps: &BigRational) -> BigRational {
    let p = BigRational::new(a.into(), b.into());
    let q = BigRational::one() - &p;
    let nn = BigRational::from_integer(n.into());
    let mut tail = BigRational::zero();
    for k in 0..=n {
        let f = BigRational::from_integer(k.into()) / &nn;
        if (f - &p).abs() >= *eps {
            let mut term = BigRational::from_integer(binomial(n, k));
            for _ in 0..k {
                term *= &p;
            }
            for _ in 0..(n - k) {
                term *= &q;
            }
            tail += term;
        }
    }
    tail
}

/// Local-polytope membership of a two-party, two-setting, two-outcome
/// behavior `p[x][y][2a+b]` by Fine's criterion: non-negative, normalized,
/// no-signaling, and all eight CHSH inequalities at most 2.
pub fn fine_local(p: &[[[BigRational; 4]; 2]; 2]) -> bool {
    let zero = BigRational::zero();
    for x in 0..2 {
        for y in 0..2 {
            if p[x][y].iter().any(|v| v < &zero) {
                return false;
            }
            if p[x][y].iter().sum::<BigRational>() != BigRational::one() {
                return false;
            }
        }
    }
    // A marginals independent of y, B marginals independent of x
    for x in 0..2 {
        let a0 = |y: usize| &p[x][y][0] + &p[x][y][1];
        if a0(0) != a0(1) {
            return false;
        }
    }
    for y in 0..2 {
        let b0 = |x: usize| &p[x][y][0] + &p[x][y][2];
        if b0(0) != b0(1) {
            return false;
        }
    }
    let e = |x: usize, y: usize| &p[x][y][0] + &p[x][y][3] - &p[x][y][1] - &p[x][y][2];
    let total = e(0, 0) + e(0, 1) + e(1, 0) + e(1, 1);
    let two = BigRational::from_integer(2.into());
    for x in 0..2 {
        for y in 0..2 {
            if (&total - &two * e(x, y)).abs() > two {
                return false;
            }
        }
    }
    true
}

/// All 16 deterministic local strategies `(a(x), b(y))` and the largest
/// CHSH expression they reach.
pub fn chsh_local_bound() -> i64 {
    let mut best = i64::MIN;
    for s in 0..16u32 {
        let a = [(s & 1) as i64, ((s >> 1) & 1) as i64];
        let b = [((s >> 2) & 1) as i64, ((s >> 3) & 1) as i64];
        let e = |x: usize, y: usize| if a[x] == b[y] { 1 } else { -1 };
        let total = e(0, 0) + e(0, 1) + e(1, 0) + e(1, 1);
        for x in 0..2 {
            for y in 0..2 {
                best = best.max((total - 2 * e(x, y)).abs());
            }
        }
    }
    best
}

fn rat(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

pub fn deterministic_2222(s: u32) -> [[[BigRational; 4]; 2]; 2] {
    let a = [(s & 1) as usize, ((s >> 1) & 1) as usize];
    let b = [((s >> 2) & 1) as usize, ((s >> 3) & 1) as usize];
    std::array::from_fn(|x| {
        std::array::from_fn(|y| {
            std::array::from_fn(|k| {
                if k == 2 * a[x] + b[y] {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            })
        })
    })
}

pub fn pr_box_2222() -> [[[BigRational; 4]; 2]; 2] {
    std::array::from_fn(|x| {
        std::array::from_fn(|y| {
            let anti = x == 1 && y == 1;
            std::array::from_fn(|k| {
                let same = k == 0 || k == 3;
                if same != anti {
                    rat(1, 2)
                } else {
                    BigRational::zero()
                }
            })
        })
    })
}

pub fn mix(parts: &[(BigRational, [[[BigRational; 4]; 2]; 2])]) -> [[[BigRational; 4]; 2]; 2] {
    std::array::from_fn(|x| {
        std::array::from_fn(|y| {
            std::array::from_fn(|k| parts.iter().map(|(w, p)| w * &p[x][y][k]).sum())
        })
    })
}

/// Random exact 2×2×2 behaviors: local mixtures, PR-box mixtures on both
/// sides of the boundary, and signaling tables.
pub fn random_2222(rng: &mut ChaCha8Rng) -> [[[BigRational; 4]; 2]; 2] {
    match rng.gen_range(0..4) {
        0 => {
            let k = rng.gen_range(1..5);
            let ws: Vec<i64> = (0..k).map(|_| rng.gen_range(1..10)).collect();
            let total: i64 = ws.iter().sum();
            let parts: Vec<_> = ws
                .iter()
                .map(|&w| (rat(w, total), deterministic_2222(rng.gen_range(0..16))))
                .collect();
            mix(&parts)
        }
        1 | 2 => {
            // v·PR + (1-v)·local, boundary near v = 1/2 for noise
            let v = rat(rng.gen_range(0..=12), 12);
            let local = if rng.gen_bool(0.5) {
                std::array::from_fn(|_| std::array::from_fn(|_| std::array::from_fn(|_| rat(1, 4))))
            } else {
                deterministic_2222(rng.gen_range(0..16))
            };
            mix(&[(v.clone(), pr_box_2222()), (BigRational::one() - v, local)])
        }
        _ => std::array::from_fn(|_| {
            std::array::from_fn(|_| {
                let w: [i64; 4] = std::array::from_fn(|_| rng.gen_range(0..5));
                let t: i64 = w.iter().sum::<i64>().max(1);
                let mut p: [BigRational; 4] = std::array::from_fn(|i| rat(w[i], t));
                if w.iter().all(|&v| v == 0) {
                    p[0] = BigRational::one();
                }
                p
            })
        }),
    }
}
