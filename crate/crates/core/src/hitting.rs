//! Hitting times of long ascending runs and the law of the maximal run.
//!
//! `W[h][r](i) = P(T_r <= h | V_1 = i) = P(M_h >= r | V_1 = i)` satisfies
//!
//! ```text
//! W[h][1] = 1
//! W[h][r] = 0                                            for h < r
//! W[h][r] = psi_r + sum_{l=1}^{r-1} Phi_l W[h-l][r]      for h >= r
//! ```
//!
//! For a fixed `r` the recursion only looks back `r - 1` steps, so the
//! streaming evaluator ([`run_length_profile`]) keeps a ring buffer per `r` and
//! never stores the full `(h, r)` table. Columns are independent and are
//! evaluated in parallel; each column has a fixed summation order, so results
//! do not depend on the thread count.
//!
//! Dense evaluation costs `O(n m^4)` in the worst case. Both entry points
//! refuse inputs outside the supplied [`Budget`].

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernel::RunKernel;
use crate::params::Budget;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct HittingTable<T> {
    m: usize,
    n: usize,
    // w[h-1][r-1][i-1]
    w: Vec<Vec<Vec<T>>>,
}

/// Law of `M_n`, unconditional and conditional on the first value.
#[derive(Debug, Clone, PartialEq)]
pub struct RunLengthDistribution<T> {
    m: usize,
    n: usize,
    // cond[r-1][i-1] = P(M_n >= r | X_1 = i)
    cond: Vec<Vec<T>>,
    // tail[r-1] = P(M_n >= r)
    tail: Vec<T>,
}

/// Output of the streaming evaluator: `E(M_h)` for every `h` and the law of `M_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunLengthProfile<T> {
    pub expected: Vec<T>,
    pub distribution: RunLengthDistribution<T>,
}

fn check_inputs<T: Scalar>(kernel: &RunKernel<T>, n: usize, budget: &Budget) -> Result<()> {
    if n < 1 {
        return Err(Error::invalid("sequence length n must be >= 1"));
    }
    budget.check_recursion(kernel.m(), n, T::IS_EXACT)
}

/// Runs the recursion for one `r >= 2`, handing each `W[h][r]` to `visit`.
fn evaluate_column<T: Scalar>(
    kernel: &RunKernel<T>,
    r: usize,
    n: usize,
    mut visit: impl FnMut(usize, &[T]),
) {
    let m = kernel.m();
    let zeros = vec![T::zero(); m];
    let mut ring: Vec<Vec<T>> = vec![zeros.clone(); r - 1];
    let psi = kernel.psi_vector(r);

    for h in 1..=n {
        if h < r {
            visit(h, &zeros);
            continue;
        }
        let mut next = Vec::with_capacity(m);
        for i in 1..=m {
            let mut acc = psi[i - 1].clone();
            // rows of Phi_l vanish once the run cannot reach length l
            let max_l = (r - 1).min(m - i + 1);
            for l in 1..=max_l {
                if h - l < r {
                    break;
                }
                let prev = &ring[(h - l - 1) % (r - 1)];
                let row = &kernel.phi_matrix(l)[(i - 1) * m..i * m];
                for (p, w) in row.iter().zip(prev) {
                    acc = acc + p.clone() * w.clone();
                }
            }
            next.push(acc);
        }
        visit(h, &next);
        ring[(h - 1) % (r - 1)] = next;
    }
}

fn sum<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, x| acc + x.clone())
}

// E(M_h) = (1/m) sum_{r=1}^{min(m,h)} 1^t W[h][r], from per-column sums.
fn expectations<T: Scalar>(m: usize, n: usize, column_sums: &[Vec<T>]) -> Vec<T> {
    let inv_m = T::ratio(1, m as u64);
    (1..=n)
        .map(|h| {
            let top = m.min(h);
            let total = column_sums[..top]
                .iter()
                .fold(T::zero(), |acc, col| acc + col[h - 1].clone());
            total * inv_m.clone()
        })
        .collect()
}

/// Computes the full table `W[h][r]` for `h = 1..=n`, `r = 1..=min(m, n)`.
pub fn hitting_table<T: Scalar>(
    kernel: &RunKernel<T>,
    n: usize,
    budget: &Budget,
) -> Result<HittingTable<T>> {
    check_inputs(kernel, n, budget)?;
    let m = kernel.m();
    let rmax = m.min(n);
    let ones = vec![T::one(); m];

    let columns: Vec<Vec<Vec<T>>> = (1..=rmax)
        .into_par_iter()
        .map(|r| {
            if r == 1 {
                return vec![ones.clone(); n];
            }
            let mut col = Vec::with_capacity(n);
            evaluate_column(kernel, r, n, |_, w| col.push(w.to_vec()));
            col
        })
        .collect();

    let mut w: Vec<Vec<Vec<T>>> = (0..n).map(|_| Vec::with_capacity(rmax)).collect();
    for col in columns {
        for (h, v) in col.into_iter().enumerate() {
            w[h].push(v);
        }
    }
    Ok(HittingTable { m, n, w })
}

/// Streams the recursion with `O(m^2)` working memory per column.
pub fn run_length_profile<T: Scalar>(
    kernel: &RunKernel<T>,
    n: usize,
    budget: &Budget,
) -> Result<RunLengthProfile<T>> {
    check_inputs(kernel, n, budget)?;
    let m = kernel.m();
    let rmax = m.min(n);

    let columns: Vec<(Vec<T>, Vec<T>)> = (1..=rmax)
        .into_par_iter()
        .map(|r| {
            if r == 1 {
                return (vec![T::from_u64(m as u64); n], vec![T::one(); m]);
            }
            let mut sums = Vec::with_capacity(n);
            let mut last = Vec::new();
            evaluate_column(kernel, r, n, |h, w| {
                sums.push(sum(w));
                if h == n {
                    last = w.to_vec();
                }
            });
            (sums, last)
        })
        .collect();

    let (column_sums, final_rows): (Vec<_>, Vec<_>) = columns.into_iter().unzip();
    Ok(RunLengthProfile {
        expected: expectations(m, n, &column_sums),
        distribution: RunLengthDistribution::from_rows(m, n, final_rows),
    })
}

/// Law of `M_n` read off the last row of the table.
pub fn run_length_distribution<T: Scalar>(table: &HittingTable<T>) -> RunLengthDistribution<T> {
    RunLengthDistribution::from_rows(table.m, table.n, table.w[table.n - 1].clone())
}

/// `E(M_h)` for `h = 1..=n`.
pub fn expected_max_run<T: Scalar>(table: &HittingTable<T>) -> Vec<T> {
    let column_sums: Vec<Vec<T>> = (0..table.max_r())
        .map(|r| table.w.iter().map(|row| sum(&row[r])).collect())
        .collect();
    expectations(table.m, table.n, &column_sums)
}

impl<T: Scalar> HittingTable<T> {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `min(m, n)`.
    pub fn max_r(&self) -> usize {
        self.m.min(self.n)
    }

    /// `W[h][r]` as a length-`m` vector indexed by `i - 1`.
    pub fn vector(&self, h: usize, r: usize) -> &[T] {
        &self.w[h - 1][r - 1]
    }

    /// `P(M_h >= r | X_1 = i)`.
    pub fn get(&self, h: usize, r: usize, i: usize) -> &T {
        &self.w[h - 1][r - 1][i - 1]
    }

    /// Checks boundary rows, monotonicity in `h` and `r`, and range.
    pub fn validate(&self, tol: f64) -> Result<()> {
        let (m, n) = (self.m, self.n);
        for h in 1..=n {
            for r in 1..=self.max_r() {
                for i in 1..=m {
                    let w = self.get(h, r, i).to_f64();
                    if !(-tol..=1.0 + tol).contains(&w) {
                        return Err(Error::Inconsistent(format!(
                            "W[{h}][{r}]({i}) = {w} outside [0,1]"
                        )));
                    }
                    if r == 1 && !self.get(h, r, i).is_one() {
                        return Err(Error::Inconsistent(format!("W[{h}][1]({i}) != 1")));
                    }
                    if h < r && !self.get(h, r, i).is_zero() {
                        return Err(Error::Inconsistent(format!(
                            "W[{h}][{r}]({i}) != 0 for h < r"
                        )));
                    }
                    if h > 1 && w + tol < self.get(h - 1, r, i).to_f64() {
                        return Err(Error::Inconsistent(format!(
                            "W[.][{r}]({i}) decreases at h = {h}"
                        )));
                    }
                    if r > 1 && w > self.get(h, r - 1, i).to_f64() + tol {
                        return Err(Error::Inconsistent(format!(
                            "W[{h}][.]({i}) increases at r = {r}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

impl<T: Scalar> RunLengthDistribution<T> {
    // rows[r-1][i-1] = P(M_n >= r | X_1 = i)
    fn from_rows(m: usize, n: usize, rows: Vec<Vec<T>>) -> Self {
        let inv_m = T::ratio(1, m as u64);
        let tail = rows.iter().map(|row| sum(row) * inv_m.clone()).collect();
        Self {
            m,
            n,
            cond: rows,
            tail,
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest attainable value, `min(m, n)`.
    pub fn max_r(&self) -> usize {
        self.tail.len()
    }

    /// `P(M_n >= r)`; zero above `min(m, n)`.
    pub fn at_least(&self, r: usize) -> T {
        match r {
            0 => T::one(),
            r if r <= self.max_r() => self.tail[r - 1].clone(),
            _ => T::zero(),
        }
    }

    /// `P(M_n = r)`.
    pub fn exactly(&self, r: usize) -> T {
        if r == 0 {
            return T::zero();
        }
        self.at_least(r) - self.at_least(r + 1)
    }

    /// `P(M_n >= r | X_1 = i)`.
    pub fn conditional_at_least(&self, i: usize, r: usize) -> T {
        match r {
            0 => T::one(),
            r if r <= self.max_r() => self.cond[r - 1][i - 1].clone(),
            _ => T::zero(),
        }
    }

    /// `P(M_n = r | X_1 = i)`.
    pub fn conditional_exactly(&self, i: usize, r: usize) -> T {
        if r == 0 {
            return T::zero();
        }
        self.conditional_at_least(i, r) - self.conditional_at_least(i, r + 1)
    }

    /// `E(M_n) = sum_r P(M_n >= r)`.
    pub fn mean(&self) -> T {
        sum(&self.tail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::build_kernel;
    use crate::params::AlphabetParams;
    use crate::scalar::Exact;

    fn table(m: usize, n: usize) -> HittingTable<f64> {
        let k = build_kernel(&AlphabetParams::new(m).unwrap());
        hitting_table(&k, n, &Budget::default()).unwrap()
    }

    #[test]
    fn first_column_is_one() {
        let t = table(4, 7);
        for h in 1..=7 {
            assert!(t.vector(h, 1).iter().all(|&x| x == 1.0));
        }
    }

    #[test]
    fn m2_hand_unrolled() {
        let t = table(2, 5);
        assert_eq!(*t.get(2, 2, 1), 1.0);
        assert_eq!(*t.get(2, 2, 2), 0.0);
        assert_eq!(*t.get(3, 2, 2), 1.0);
        assert_eq!(*t.get(1, 2, 1), 0.0);
    }

    #[test]
    fn m2_expectation_closed_form() {
        let e = expected_max_run(&table(2, 100));
        assert_eq!(e[0], 1.0);
        assert_eq!(e[1], 1.5);
        assert!(e[2..].iter().all(|&x| (x - 2.0).abs() < 1e-12));
        let d = run_length_distribution(&table(2, 2));
        assert_eq!(d.at_least(2), 0.5);
        assert_eq!(d.at_least(1), 1.0);
    }

    #[test]
    fn n_zero_rejected_and_budget_enforced() {
        let k = build_kernel::<f64>(&AlphabetParams::new(3).unwrap());
        assert!(matches!(
            hitting_table(&k, 0, &Budget::default()),
            Err(Error::InvalidParameter(_))
        ));
        let tight = Budget {
            max_n: 10,
            ..Budget::default()
        };
        assert!(hitting_table(&k, 11, &tight).unwrap_err().is_budget());
        assert!(run_length_profile(&k, 11, &tight).unwrap_err().is_budget());
        let k = build_kernel::<Exact>(&AlphabetParams::new(13).unwrap());
        assert!(hitting_table(&k, 3, &Budget::default())
            .unwrap_err()
            .is_budget());
    }

    #[test]
    fn streaming_matches_full_table_bitwise() {
        for (m, n) in [(2, 9), (3, 1), (5, 40), (9, 30), (12, 7)] {
            let k = build_kernel::<f64>(&AlphabetParams::new(m).unwrap());
            let t = hitting_table(&k, n, &Budget::default()).unwrap();
            let p = run_length_profile(&k, n, &Budget::default()).unwrap();
            assert_eq!(p.expected, expected_max_run(&t));
            assert_eq!(p.distribution, run_length_distribution(&t));
        }
    }

    #[test]
    fn table_invariants_hold() {
        for (m, n) in [(2, 10), (4, 25), (7, 30)] {
            table(m, n).validate(1e-12).unwrap();
        }
    }

    #[test]
    fn exact_and_float_agree() {
        let params = AlphabetParams::new(6).unwrap();
        let kf = build_kernel::<f64>(&params);
        let ke = build_kernel::<Exact>(&params);
        let ef = expected_max_run(&hitting_table(&kf, 15, &Budget::default()).unwrap());
        let ee = expected_max_run(&hitting_table(&ke, 15, &Budget::default()).unwrap());
        for (a, b) in ef.iter().zip(&ee) {
            assert!((a - b.to_f64()).abs() < 1e-14);
        }
    }

    #[test]
    fn distribution_masses_sum_to_one_exactly() {
        let k = build_kernel::<Exact>(&AlphabetParams::new(5).unwrap());
        let d = run_length_distribution(&hitting_table(&k, 9, &Budget::default()).unwrap());
        let total = (1..=5).fold(Exact::from_u64(0), |acc, r| acc + d.exactly(r));
        assert_eq!(total, Exact::from_u64(1));
        assert_eq!(d.exactly(6), Exact::from_u64(0));
        for i in 1..=5 {
            let c = (1..=5).fold(Exact::from_u64(0), |acc, r| {
                acc + d.conditional_exactly(i, r)
            });
            assert_eq!(c, Exact::from_u64(1));
        }
    }
}
