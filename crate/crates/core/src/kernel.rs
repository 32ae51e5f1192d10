//! Combinatorial run kernels.
//!
//! For a run starting at value `i`:
//!
//! * `psi(l, i)`    = P(run length >= l)
//! * `varphi(l, i)` = P(run length == l) = `psi(l, i) - psi(l + 1, i)`
//! * `phi(l, i, j)` = P(run length == l and the next run starts at `j`)
//!
//! Closed forms:
//!
//! ```text
//! psi(l, i)    = C(m-i, l-1) / (m-1)^(l-1)                       if m-i >= l-1
//! phi(l, i, j) = [C(m-i, l-1) 1{m-i >= l-1} - C(j-i, l-1) 1{j-i >= l-1}] / (m-1)^l
//! ```
//!
//! Binomial-over-power ratios are built by incremental multiplication of
//! factors `(a - t) / ((t + 1)(m - 1))`, so neither the binomial nor the power
//! is ever materialized.

use crate::error::{Error, Result};
use crate::params::AlphabetParams;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct RunKernel<T> {
    m: usize,
    // phi[l-1][(i-1)*m + (j-1)], l = 1..=m
    phi: Vec<Vec<T>>,
    // psi[l-1][i-1], l = 1..=m+1
    psi: Vec<Vec<T>>,
    // varphi[l-1][i-1], l = 1..=m
    varphi: Vec<Vec<T>>,
}

/// `C(a, k) / (m-1)^k` for `a` in `0..m`, `k` in `0..=m`.
struct BinomialRatios<T> {
    table: Vec<Vec<T>>,
}

impl<T: Scalar> BinomialRatios<T> {
    fn new(m: usize) -> Self {
        let base = (m - 1) as u64;
        let table = (0..m)
            .map(|a| {
                let mut row = Vec::with_capacity(m + 1);
                let mut acc = T::one();
                row.push(acc.clone());
                for k in 1..=m {
                    if k > a {
                        acc = T::zero();
                    } else {
                        acc = acc * T::ratio((a - k + 1) as u64, k as u64 * base);
                    }
                    row.push(acc.clone());
                }
                row
            })
            .collect();
        Self { table }
    }

    /// Zero for negative `a` or `a < k`.
    fn get(&self, a: isize, k: usize) -> T {
        if a < 0 {
            return T::zero();
        }
        self.table[a as usize][k].clone()
    }
}

pub fn build_kernel<T: Scalar>(params: &AlphabetParams) -> RunKernel<T> {
    let m = params.m();
    let ratios = BinomialRatios::<T>::new(m);
    let inv_base = T::ratio(1, (m - 1) as u64);

    let psi: Vec<Vec<T>> = (1..=m + 1)
        .map(|l| {
            (1..=m)
                .map(|i| ratios.get((m - i) as isize, l - 1))
                .collect()
        })
        .collect();

    let varphi: Vec<Vec<T>> = (0..m)
        .map(|l| {
            psi[l]
                .iter()
                .zip(&psi[l + 1])
                .map(|(a, b)| a.clone() - b.clone())
                .collect()
        })
        .collect();

    let phi: Vec<Vec<T>> = (1..=m)
        .map(|l| {
            let mut mat = Vec::with_capacity(m * m);
            for i in 1..=m {
                let head = ratios.get((m - i) as isize, l - 1);
                for j in 1..=m {
                    let tail = ratios.get(j as isize - i as isize, l - 1);
                    mat.push((head.clone() - tail) * inv_base.clone());
                }
            }
            mat
        })
        .collect();

    RunKernel {
        m,
        phi,
        psi,
        varphi,
    }
}

impl<T: Scalar> RunKernel<T> {
    pub fn m(&self) -> usize {
        self.m
    }

    /// `phi(l, i, j)`, 1-based, `l` in `1..=m`.
    pub fn phi(&self, l: usize, i: usize, j: usize) -> &T {
        &self.phi[l - 1][(i - 1) * self.m + (j - 1)]
    }

    /// Row-major `m x m` matrix of `phi(l, ., .)`.
    pub fn phi_matrix(&self, l: usize) -> &[T] {
        &self.phi[l - 1]
    }

    /// `psi(l, i)`, `l` in `1..=m+1`.
    pub fn psi(&self, l: usize, i: usize) -> &T {
        &self.psi[l - 1][i - 1]
    }

    pub fn psi_vector(&self, l: usize) -> &[T] {
        &self.psi[l - 1]
    }

    /// `varphi(l, i)`, `l` in `1..=m`.
    pub fn varphi(&self, l: usize, i: usize) -> &T {
        &self.varphi[l - 1][i - 1]
    }

    /// Adds `delta` to one `phi` entry. Used to prove that cross-checks detect
    /// a corrupted kernel.
    #[doc(hidden)]
    pub fn perturb_phi(&mut self, l: usize, i: usize, j: usize, delta: T) -> Result<()> {
        let m = self.m;
        if !(1..=m).contains(&l) || !(1..=m).contains(&i) || !(1..=m).contains(&j) {
            return Err(Error::invalid(format!(
                "phi index ({l}, {i}, {j}) out of range for m = {m}"
            )));
        }
        let cell = &mut self.phi[l - 1][(i - 1) * m + (j - 1)];
        *cell = cell.clone() + delta;
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn clear_varphi(&mut self, l: usize, i: usize) {
        self.varphi[l - 1][i - 1] = T::zero();
    }

    /// Checks the kernel invariants within `tol`: entries in `[0, 1]`,
    /// `psi(1, .) = 1`, row sums `sum_j phi(l, i, j) = varphi(l, i)`,
    /// stochasticity `sum_l varphi(l, i) = 1` and the support conditions.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let m = self.m;
        let in_unit = |x: f64| (-tol..=1.0 + tol).contains(&x);
        for i in 1..=m {
            if (self.psi(1, i).to_f64() - 1.0).abs() > tol {
                return Err(Error::Inconsistent(format!("psi(1, {i}) != 1")));
            }
            if !self.psi(m + 1, i).is_zero() {
                return Err(Error::Inconsistent(format!("psi({}, {i}) != 0", m + 1)));
            }
            let mut total = 0.0;
            for l in 1..=m {
                let vp = self.varphi(l, i).to_f64();
                if !in_unit(vp) || !in_unit(self.psi(l, i).to_f64()) {
                    return Err(Error::Inconsistent(format!(
                        "psi/varphi at (l={l}, i={i}) outside [0,1]"
                    )));
                }
                if l > m - i + 1 && !self.varphi(l, i).is_zero() {
                    return Err(Error::Inconsistent(format!(
                        "varphi({l}, {i}) outside support"
                    )));
                }
                let mut row = 0.0;
                for j in 1..=m {
                    let p = self.phi(l, i, j).to_f64();
                    if !in_unit(p) {
                        return Err(Error::Inconsistent(format!(
                            "phi({l}, {i}, {j}) = {p} outside [0,1]"
                        )));
                    }
                    if m - i + 1 < l && p != 0.0 {
                        return Err(Error::Inconsistent(format!(
                            "phi({l}, {i}, {j}) outside support"
                        )));
                    }
                    row += p;
                }
                if (row - vp).abs() > tol {
                    return Err(Error::Inconsistent(format!(
                        "sum_j phi({l}, {i}, j) = {row} but varphi = {vp}"
                    )));
                }
                total += vp;
            }
            if (total - 1.0).abs() > tol {
                return Err(Error::Inconsistent(format!(
                    "sum_l varphi(l, {i}) = {total}"
                )));
            }
        }
        Ok(())
    }
}
