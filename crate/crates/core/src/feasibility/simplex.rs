//! Exact phase-one revised simplex over rationals.
//!
//! Decides whether `A w = b, w >= 0` has a solution, where the columns of `A`
//! are produced on demand by a [`ColumnSource`] (there may be far more columns
//! than fit in a dense tableau). The basis inverse is kept dense and exact.
//! Bland's rule on both entering and leaving variables rules out cycling.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

/// Supplies the columns of the constraint matrix lazily.
pub trait ColumnSource: Sync {
    fn column_count(&self) -> u128;
    /// Non-zero entries `(row, value)` of column `index`.
    fn column(&self, index: u128) -> Vec<(usize, BigRational)>;
    /// `y · column(index)`; override when a faster route exists.
    fn dot(&self, y: &[BigRational], index: u128) -> BigRational {
        self.column(index).into_iter().map(|(r, v)| &y[r] * v).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PhaseOne {
    /// Basic solution: `(column, value)` pairs with positive value.
    Feasible(Vec<(u128, BigRational)>),
    /// Farkas vector `y` with `y · a_j <= 0` for every column and `y · b > 0`.
    Infeasible(Vec<BigRational>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Var {
    Column(u128),
    Artificial(usize),
}

/// Solves the phase-one problem `min Σ artificials` for `A w = b`.
///
/// `rhs` must be non-negative, so the all-artificial basis is feasible.
pub fn phase_one(rhs: &[BigRational], source: &dyn ColumnSource) -> PhaseOne {
    assert!(
        rhs.iter().all(|b| !b.is_negative()),
        "phase one expects a non-negative right-hand side"
    );
    let m = rhs.len();
    let mut basis: Vec<Var> = (0..m).map(Var::Artificial).collect();
    let mut inverse: Vec<Vec<BigRational>> = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut values: Vec<BigRational> = rhs.to_vec();

    loop {
        // duals y = c_B^T B^{-1}; artificials cost 1, columns cost 0
        let mut y = vec![BigRational::zero(); m];
        for (i, var) in basis.iter().enumerate() {
            if let Var::Artificial(_) = var {
                for (yj, bij) in y.iter_mut().zip(&inverse[i]) {
                    *yj += bij;
                }
            }
        }
        let objective: BigRational = basis
            .iter()
            .zip(&values)
            .filter(|(v, _)| matches!(v, Var::Artificial(_)))
            .map(|(_, x)| x.clone())
            .sum();
        if objective.is_zero() {
            let solution = basis
                .iter()
                .zip(&values)
                .filter_map(|(v, x)| match v {
                    Var::Column(j) if x.is_positive() => Some((*j, x.clone())),
                    _ => None,
                })
                .collect();
            return PhaseOne::Feasible(solution);
        }

        // reduced cost of column j is -y·a_j; enter the first with y·a_j > 0
        let in_basis: std::collections::BTreeSet<u128> = basis
            .iter()
            .filter_map(|v| match v {
                Var::Column(j) => Some(*j),
                _ => None,
            })
            .collect();
        let entering = first_improving(source, &y, &in_basis);
        let Some(entering) = entering else {
            return PhaseOne::Infeasible(y);
        };

        let column = source.column(entering);
        let direction: Vec<BigRational> = (0..m)
            .map(|i| column.iter().map(|(r, v)| &inverse[i][*r] * v).sum())
            .collect();

        let mut leave: Option<(usize, BigRational)> = None;
        for i in 0..m {
            if !direction[i].is_positive() {
                continue;
            }
            let ratio = &values[i] / &direction[i];
            leave = match leave {
                None => Some((i, ratio)),
                Some((l, best)) => {
                    if ratio < best || (ratio == best && basis[i] < basis[l]) {
                        Some((i, ratio))
                    } else {
                        Some((l, best))
                    }
                }
            };
        }
        let (row, _) = leave.expect("phase one objective is bounded below by zero");

        let pivot = direction[row].clone();
        let pivot_row: Vec<BigRational> = inverse[row].iter().map(|v| v / &pivot).collect();
        let pivot_value = &values[row] / &pivot;
        for i in 0..m {
            if i == row || direction[i].is_zero() {
                continue;
            }
            let f = direction[i].clone();
            for (a, p) in inverse[i].iter_mut().zip(&pivot_row) {
                *a -= &f * p;
            }
            values[i] -= &f * &pivot_value;
        }
        inverse[row] = pivot_row;
        values[row] = pivot_value;
        basis[row] = Var::Column(entering);
    }
}

fn first_improving(
    source: &dyn ColumnSource,
    y: &[BigRational],
    in_basis: &std::collections::BTreeSet<u128>,
) -> Option<u128> {
    let n = source.column_count();
    const CHUNK: u128 = 1 << 14;
    let mut start = 0u128;
    while start < n {
        let end = (start + CHUNK).min(n);
        let found = (start as u64..end as u64).into_par_iter().find_first(|&j| {
            let j = j as u128;
            !in_basis.contains(&j) && source.dot(y, j).is_positive()
        });
        if let Some(j) = found {
            return Some(j as u128);
        }
        start = end;
    }
    None
}
