use std::collections::BTreeMap;

use rayon::prelude::*;

use super::sequence::{decompose_runs, ColorSequence};
use super::OracleTable;
use crate::error::{Error, Result};
use crate::params::Budget;
use crate::scalar::{Exact, Scalar};

/// Prefix counts from exhaustive enumeration.
///
/// `count(h, i, r)` is the number of admissible prefixes of length `h` with
/// `x_1 = i` and maximal run exactly `r`. Each such prefix has conditional
/// probability `1 / (m-1)^(h-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumCounts {
    m: usize,
    n: usize,
    // counts[h-1][i-1][r-1], r = 1..=m
    counts: Vec<Vec<Vec<u64>>>,
}

/// `m (m-1)^(n-1)`, saturating.
pub fn enumeration_size(m: usize, n: usize) -> u64 {
    let mut total = m as u64;
    for _ in 1..n {
        total = total.saturating_mul((m - 1) as u64);
    }
    total
}

fn check(m: usize, n: usize, budget: &Budget) -> Result<()> {
    if m < 2 {
        return Err(Error::invalid(format!(
            "alphabet size m must be >= 2, got {m}"
        )));
    }
    if n < 1 {
        return Err(Error::invalid("sequence length n must be >= 1"));
    }
    let size = enumeration_size(m, n);
    if size > budget.max_enumeration {
        return Err(Error::BudgetExceeded {
            what: "enumerated sequences m(m-1)^(n-1); use the dynamic-programming oracle",
            limit: budget.max_enumeration,
            requested: size,
        });
    }
    Ok(())
}

struct Walker {
    m: usize,
    n: usize,
    // counts[h-1][r-1] for a fixed first value
    counts: Vec<Vec<u64>>,
}

impl Walker {
    fn visit(&mut self, depth: usize, last: usize, run: usize, best: usize) {
        self.counts[depth - 1][best - 1] += 1;
        if depth == self.n {
            return;
        }
        for next in 1..=self.m {
            if next == last {
                continue;
            }
            let run = if next > last { run + 1 } else { 1 };
            self.visit(depth + 1, next, run, best.max(run));
        }
    }
}

/// Enumerates every admissible sequence of length `n` (sharded by first value).
pub fn exact_distribution_enum(m: usize, n: usize, budget: &Budget) -> Result<EnumCounts> {
    check(m, n, budget)?;
    let per_first: Vec<Vec<Vec<u64>>> = (1..=m)
        .into_par_iter()
        .map(|first| {
            let mut walker = Walker {
                m,
                n,
                counts: vec![vec![0; m]; n],
            };
            walker.visit(1, first, 1, 1);
            walker.counts
        })
        .collect();

    let counts = (0..n)
        .map(|h| per_first.iter().map(|c| c[h].clone()).collect())
        .collect();
    Ok(EnumCounts { m, n, counts })
}

impl EnumCounts {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self, h: usize, i: usize, r: usize) -> u64 {
        self.counts[h - 1][i - 1].get(r - 1).copied().unwrap_or(0)
    }

    /// `P(M_h = r | X_1 = i)`.
    pub fn conditional_exactly(&self, h: usize, i: usize, r: usize) -> Exact {
        Exact::ratio(
            self.count(h, i, r),
            enumeration_size(self.m, h) / self.m as u64,
        )
    }

    /// `P(M_h = r)`.
    pub fn exactly(&self, h: usize, r: usize) -> Exact {
        let hits: u64 = (1..=self.m).map(|i| self.count(h, i, r)).sum();
        Exact::ratio(hits, enumeration_size(self.m, h))
    }

    /// `E(M_h)`.
    pub fn expected(&self, h: usize) -> Exact {
        let weighted: u64 = (1..=self.m)
            .flat_map(|i| (1..=self.m).map(move |r| (i, r)))
            .map(|(i, r)| r as u64 * self.count(h, i, r))
            .sum();
        Exact::ratio(weighted, enumeration_size(self.m, h))
    }

    /// Converts to tail probabilities in the shared table layout.
    pub fn to_table(&self) -> OracleTable<Exact> {
        let (m, n) = (self.m, self.n);
        let rmax = m.min(n);
        let ge = (1..=n)
            .map(|h| {
                let paths = enumeration_size(m, h) / m as u64;
                (1..=rmax)
                    .map(|r| {
                        (1..=m)
                            .map(|i| {
                                let hits: u64 = (r..=m).map(|s| self.count(h, i, s)).sum();
                                Exact::ratio(hits, paths)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        OracleTable::from_cells(m, n, ge)
    }
}

/// Run-to-run frequencies keyed by source `(start, len)` then target `(start, len)`.
pub type TransitionFrequencies = BTreeMap<(usize, usize), BTreeMap<(usize, usize), Exact>>;

/// Empirical `P(Y_2 = (j, lambda) | Y_1 = (i, l))` over all admissible
/// sequences of length `n`, keyed by `(i, l)` then `(j, lambda)`.
///
/// The event `{Y_1 = (i,l), Y_2 = (j,lambda)}` is fixed by the first
/// `l + lambda + 1 <= 2m + 1` values, so with `n >= 2m + 1` and every sequence
/// equally weighted the ratios are exact conditional probabilities.
pub fn first_transition_frequencies(
    m: usize,
    n: usize,
    budget: &Budget,
) -> Result<TransitionFrequencies> {
    check(m, n, budget)?;
    if n < 2 * m + 1 {
        return Err(Error::invalid(format!(
            "need n >= 2m + 1 = {} for exact frequencies",
            2 * m + 1
        )));
    }
    let mut pairs: BTreeMap<(usize, usize), BTreeMap<(usize, usize), u64>> = BTreeMap::new();
    let mut values = vec![0usize; n];
    let mut stack: Vec<(usize, usize)> = (1..=m).rev().map(|v| (0, v)).collect();
    while let Some((pos, v)) = stack.pop() {
        values[pos] = v;
        if pos + 1 == n {
            let seq = ColorSequence::new(values.clone(), Some(m))?;
            let d = decompose_runs(&seq);
            let (a, b) = (d.runs[0], d.runs[1]);
            *pairs
                .entry((a.start_value, a.length))
                .or_default()
                .entry((b.start_value, b.length))
                .or_default() += 1;
            continue;
        }
        for next in (1..=m).rev() {
            if next != v {
                stack.push((pos + 1, next));
            }
        }
    }
    Ok(pairs
        .into_iter()
        .map(|(src, row)| {
            let total: u64 = row.values().sum();
            let row = row
                .into_iter()
                .map(|(dst, c)| (dst, Exact::ratio(c, total)))
                .collect();
            (src, row)
        })
        .collect())
}
