//! Independent ground truth for the law of the maximal ascending run.
//!
//! Nothing here uses the run-process kernels. Two routes are offered:
//! weighted exhaustive enumeration of every admissible sequence (tiny
//! instances, exact rationals) and a forward dynamic program over
//! `(last value, current run length)` (moderate instances, rational or float).

mod dp;
mod enumerate;
mod sequence;

pub use dp::{dp_survival, dp_table, exact_distribution_dp};
pub use enumerate::{
    enumeration_size, exact_distribution_enum, first_transition_frequencies, EnumCounts,
    TransitionFrequencies,
};
pub use sequence::{decompose_runs, ColorSequence, Run, RunDecomposition};

use crate::scalar::Scalar;

/// `P(M_h >= r | X_1 = i)` for `h = 1..=n`, `r = 1..=min(m, n)`, laid out like
/// the hitting table so the two can be compared cell by cell.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTable<T> {
    m: usize,
    n: usize,
    // ge[h-1][r-1][i-1]
    ge: Vec<Vec<Vec<T>>>,
}

impl<T: Scalar> OracleTable<T> {
    pub(crate) fn from_cells(m: usize, n: usize, ge: Vec<Vec<Vec<T>>>) -> Self {
        Self { m, n, ge }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn max_r(&self) -> usize {
        self.m.min(self.n)
    }

    pub fn get(&self, h: usize, r: usize, i: usize) -> &T {
        &self.ge[h - 1][r - 1][i - 1]
    }

    pub fn vector(&self, h: usize, r: usize) -> &[T] {
        &self.ge[h - 1][r - 1]
    }

    /// `P(M_h >= r)` with `X_1` uniform.
    pub fn at_least(&self, h: usize, r: usize) -> T {
        if r > self.max_r() {
            return T::zero();
        }
        let total = self.ge[h - 1][r - 1]
            .iter()
            .fold(T::zero(), |a, x| a + x.clone());
        total / T::from_u64(self.m as u64)
    }

    /// `P(M_h = r)`.
    pub fn exactly(&self, h: usize, r: usize) -> T {
        self.at_least(h, r) - self.at_least(h, r + 1)
    }

    /// `E(M_h)`.
    pub fn expected(&self, h: usize) -> T {
        (1..=self.max_r()).fold(T::zero(), |a, r| a + self.at_least(h, r))
    }
}
