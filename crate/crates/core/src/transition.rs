//! Transition matrix of the run process `Y = (V_k, L_k)`.
//!
//! `P[(i,l) -> (j,lambda)] = phi(l, i, j) * varphi(lambda, j) / varphi(l, i)`
//! for sources in `E ∪ {(m,1)}` and destinations in `E`. The matrix is not
//! needed by the hitting-time recursion; it is exposed for inspection and
//! validated against enumeration in the tests.

use crate::error::{Error, Result};
use crate::kernel::RunKernel;
use crate::params::{AlphabetParams, RunState};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix<T> {
    m: usize,
    states: Vec<RunState>,
    // row-major over `states`
    p: Vec<T>,
}

pub fn build_transition_matrix<T: Scalar>(kernel: &RunKernel<T>) -> Result<TransitionMatrix<T>> {
    let params = AlphabetParams::new(kernel.m())?;
    let states = params.run_states();
    let mut p = Vec::with_capacity(states.len() * states.len());
    for &src in &states {
        p.extend(transition_row(kernel, &states, src)?);
    }
    Ok(TransitionMatrix {
        m: kernel.m(),
        states,
        p,
    })
}

/// One row of the matrix over `states` (as produced by
/// [`AlphabetParams::run_states`]) without building the whole matrix, which
/// has `O(m^4)` entries.
pub fn transition_row<T: Scalar>(
    kernel: &RunKernel<T>,
    states: &[RunState],
    src: RunState,
) -> Result<Vec<T>> {
    let params = AlphabetParams::new(kernel.m())?;
    let denom = kernel.varphi(src.len, src.start);
    if denom.is_zero() {
        return Err(Error::Inconsistent(format!(
            "varphi({}, {}) = 0 for enumerated state {src}",
            src.len, src.start
        )));
    }
    Ok(states
        .iter()
        .map(|dst| {
            if dst.is_initial_only(&params) {
                return T::zero();
            }
            let num = kernel.phi(src.len, src.start, dst.start).clone()
                * kernel.varphi(dst.len, dst.start).clone();
            num / denom.clone()
        })
        .collect())
}

impl<T: Scalar> TransitionMatrix<T> {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn states(&self) -> &[RunState] {
        &self.states
    }

    pub fn index_of(&self, state: RunState) -> Option<usize> {
        self.states.iter().position(|s| *s == state)
    }

    pub fn get(&self, from: RunState, to: RunState) -> Option<&T> {
        let a = self.index_of(from)?;
        let b = self.index_of(to)?;
        Some(&self.p[a * self.states.len() + b])
    }

    pub fn row(&self, idx: usize) -> &[T] {
        let n = self.states.len();
        &self.p[idx * n..(idx + 1) * n]
    }

    /// Largest deviation of a row sum from one.
    pub fn max_row_defect(&self) -> f64 {
        (0..self.states.len())
            .map(|k| {
                let s = self.row(k).iter().fold(T::zero(), |acc, x| acc + x.clone());
                (s.to_f64() - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}
