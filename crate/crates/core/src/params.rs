//! Alphabet parameters, run states and resource budgets.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Alphabet size `m` of the color set `{1, ..., m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlphabetParams {
    m: usize,
}

impl AlphabetParams {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid(format!(
                "alphabet size m must be >= 2, got {m}"
            )));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Ordered run-process states: `E` followed by the initial-only `(m, 1)`.
    ///
    /// `E = {(i, l) : 1 <= i <= m-1, 1 <= l <= m-i+1} \ {(1, 1)}`.
    pub fn run_states(&self) -> Vec<RunState> {
        let m = self.m;
        let mut states = Vec::new();
        for start in 1..m {
            for len in 1..=(m - start + 1) {
                if start == 1 && len == 1 {
                    continue;
                }
                states.push(RunState { start, len });
            }
        }
        states.push(RunState { start: m, len: 1 });
        states
    }
}

/// A state `(v, l)` of the run process: first value of a run and its length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RunState {
    pub start: usize,
    pub len: usize,
}

impl RunState {
    pub fn new(params: &AlphabetParams, start: usize, len: usize) -> Result<Self> {
        let state = Self { start, len };
        if state.is_recurrent(params) || state.is_initial_only(params) {
            Ok(state)
        } else {
            Err(Error::invalid(format!(
                "({start}, {len}) is not a run state for m = {}",
                params.m()
            )))
        }
    }

    /// Membership in `E`.
    pub fn is_recurrent(&self, params: &AlphabetParams) -> bool {
        let m = params.m();
        (1..m).contains(&self.start)
            && self.len >= 1
            && self.len <= m - self.start + 1
            && !(self.start == 1 && self.len == 1)
    }

    /// `(m, 1)` can only be the first run.
    pub fn is_initial_only(&self, params: &AlphabetParams) -> bool {
        self.start == params.m() && self.len == 1
    }
}

impl fmt::Display for RunState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.start, self.len)
    }
}

/// Resource limits guarding the dense hitting-time recursion, the exact
/// rational backend and the exhaustive enumeration oracle.
///
/// The dense recursion costs `O(n * m^4)` operations in the worst case, so
/// both `m` and `n` are capped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_m: usize,
    pub max_n: usize,
    pub exact_max_m: usize,
    pub exact_max_n: usize,
    /// Maximum number of sequences `m (m-1)^(n-1)` the enumerator may visit.
    pub max_enumeration: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_m: 64,
            max_n: 5000,
            exact_max_m: 12,
            exact_max_n: 24,
            max_enumeration: 10_000_000,
        }
    }
}

impl Budget {
    /// No limits at all. Intended for tests and callers who manage cost themselves.
    pub fn unlimited() -> Self {
        Self {
            max_m: usize::MAX,
            max_n: usize::MAX,
            exact_max_m: usize::MAX,
            exact_max_n: usize::MAX,
            max_enumeration: u64::MAX,
        }
    }

    pub(crate) fn check_recursion(&self, m: usize, n: usize, exact: bool) -> Result<()> {
        let (max_m, max_n) = if exact {
            (self.exact_max_m, self.exact_max_n)
        } else {
            (self.max_m, self.max_n)
        };
        if m > max_m {
            return Err(Error::BudgetExceeded {
                what: if exact {
                    "exact-mode alphabet size m"
                } else {
                    "alphabet size m"
                },
                limit: max_m as u64,
                requested: m as u64,
            });
        }
        if n > max_n {
            return Err(Error::BudgetExceeded {
                what: if exact {
                    "exact-mode sequence length n"
                } else {
                    "sequence length n"
                },
                limit: max_n as u64,
                requested: n as u64,
            });
        }
        Ok(())
    }
}

impl FromStr for Budget {
    type Err = Error;

    /// Parses overrides of the form `m=128,n=10000,exact_m=10,exact_n=20,enum=1e8`.
    /// Unmentioned keys keep their defaults.
    fn from_str(s: &str) -> Result<Self> {
        let mut budget = Budget::default();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("budget entry `{item}` is not key=value")))?;
            let value = parse_count(value.trim())
                .ok_or_else(|| Error::Parse(format!("budget value `{value}` is not a count")))?;
            match key.trim() {
                "m" => budget.max_m = value as usize,
                "n" => budget.max_n = value as usize,
                "exact_m" => budget.exact_max_m = value as usize,
                "exact_n" => budget.exact_max_n = value as usize,
                "enum" => budget.max_enumeration = value,
                other => return Err(Error::Parse(format!("unknown budget key `{other}`"))),
            }
        }
        Ok(budget)
    }
}

// Accepts plain integers and `1e7` style powers of ten.
fn parse_count(s: &str) -> Option<u64> {
    if let Ok(v) = s.parse::<u64>() {
        return Some(v);
    }
    let (mantissa, exp) = s.split_once(['e', 'E'])?;
    let mantissa: u64 = mantissa.parse().ok()?;
    let exp: u32 = exp.parse().ok()?;
    mantissa.checked_mul(10u64.checked_pow(exp)?)
}
