use super::OracleTable;
use crate::error::{Error, Result};
use crate::params::Budget;
use crate::scalar::Scalar;

fn check(m: usize, n: usize, r: usize, budget: &Budget, exact: bool) -> Result<()> {
    if m < 2 {
        return Err(Error::invalid(format!(
            "alphabet size m must be >= 2, got {m}"
        )));
    }
    if n < 1 {
        return Err(Error::invalid("sequence length n must be >= 1"));
    }
    if r < 1 {
        return Err(Error::invalid("run threshold r must be >= 1"));
    }
    budget.check_recursion(m, n, exact)
}

/// `s[h-1][i-1] = P(M_h < r | X_1 = i)` for `h = 1..=n`.
///
/// Forward propagation of prefix mass over states `(last value, current run
/// length)` with the run length capped at `r - 1`; mass whose run reaches `r`
/// is dropped, so the surviving mass is exactly `P(M_h < r)`.
pub fn dp_survival<T: Scalar>(
    m: usize,
    n: usize,
    r: usize,
    budget: &Budget,
) -> Result<Vec<Vec<T>>> {
    check(m, n, r, budget, T::IS_EXACT)?;
    if r == 1 {
        return Ok(vec![vec![T::zero(); m]; n]);
    }
    let step = T::ratio(1, (m - 1) as u64);
    let cap = r - 1;
    let mut out: Vec<Vec<T>> = vec![Vec::with_capacity(m); n];

    for first in 1..=m {
        // mass[(v-1)*cap + (c-1)]: last value v, current run length c < r
        let mut mass = vec![T::zero(); m * cap];
        mass[(first - 1) * cap] = T::one();
        out[0].push(T::one());
        for h in 2..=n {
            let mut next = vec![T::zero(); m * cap];
            for v in 1..=m {
                for c in 1..=cap {
                    let w = &mass[(v - 1) * cap + (c - 1)];
                    if w.is_zero() {
                        continue;
                    }
                    let share = w.clone() * step.clone();
                    for u in 1..=m {
                        let c_next = if u > v {
                            c + 1
                        } else if u < v {
                            1
                        } else {
                            continue;
                        };
                        if c_next <= cap {
                            let cell = &mut next[(u - 1) * cap + (c_next - 1)];
                            *cell = cell.clone() + share.clone();
                        }
                    }
                }
            }
            mass = next;
            out[h - 1].push(mass.iter().fold(T::zero(), |a, x| a + x.clone()));
        }
    }
    Ok(out)
}

/// `P(M_n < r | X_1 = i)` for `i = 1..=m`.
pub fn exact_distribution_dp<T: Scalar>(
    m: usize,
    n: usize,
    r: usize,
    budget: &Budget,
) -> Result<Vec<T>> {
    let mut rows = dp_survival(m, n, r, budget)?;
    Ok(rows.pop().expect("n >= 1"))
}

/// Tail probabilities for every `(h, r)` in the shared table layout.
pub fn dp_table<T: Scalar>(m: usize, n: usize, budget: &Budget) -> Result<OracleTable<T>> {
    check(m, n, 1, budget, T::IS_EXACT)?;
    let rmax = m.min(n);
    let mut ge: Vec<Vec<Vec<T>>> = vec![Vec::with_capacity(rmax); n];
    for r in 1..=rmax {
        let below = dp_survival::<T>(m, n, r, budget)?;
        for (h, row) in below.into_iter().enumerate() {
            ge[h].push(row.into_iter().map(|s| T::one() - s).collect());
        }
    }
    Ok(OracleTable::from_cells(m, n, ge))
}
