//! Cross-validation grid: recursion versus enumeration, versus the
//! dynamic-programming oracle, and versus simulation.

use std::fmt;

use num_traits::{FromPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hitting::{expected_max_run, hitting_table, run_length_distribution, HittingTable};
use crate::kernel::{build_kernel, RunKernel};
use crate::montecarlo::{estimate, SimConfig};
use crate::oracle::{dp_table, enumeration_size, exact_distribution_enum, OracleTable};
use crate::params::{AlphabetParams, Budget};
use crate::scalar::{Exact, Scalar};

/// Absolute tolerance for floating-point agreement with the oracles.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// Simulated mean must fall within this many standard errors of `E(M_n)`.
pub const MC_SIGMAS: f64 = 4.0;

/// A deliberate change to one `phi(l, i, j)` entry, applied to every kernel
/// with alphabet size `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub m: usize,
    pub l: usize,
    pub i: usize,
    pub j: usize,
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheckOptions {
    pub max_m: usize,
    pub max_n: usize,
    pub budget: Budget,
    pub mc_samples: u64,
    pub mc_seed: u64,
    pub perturbation: Option<Perturbation>,
}

impl Default for CrossCheckOptions {
    fn default() -> Self {
        Self {
            max_m: 5,
            max_n: 10,
            budget: Budget::default(),
            mc_samples: 20_000,
            mc_seed: 1,
            perturbation: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub outcome: Outcome,
    pub detail: String,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.outcome {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
            Outcome::Skip => "SKIP",
        };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CrossCheckReport {
    pub lines: Vec<CheckLine>,
}

impl CrossCheckReport {
    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.outcome != Outcome::Fail)
    }

    fn record(&mut self, name: String, ok: bool, detail: String) {
        let outcome = if ok { Outcome::Pass } else { Outcome::Fail };
        self.lines.push(CheckLine {
            name,
            outcome,
            detail,
        });
    }

    fn skip(&mut self, name: String, detail: String) {
        self.lines.push(CheckLine {
            name,
            outcome: Outcome::Skip,
            detail,
        });
    }
}

fn kernel_for<T: Scalar>(
    m: usize,
    perturbation: Option<Perturbation>,
    delta: impl Fn(f64) -> T,
) -> Result<RunKernel<T>> {
    let mut kernel = build_kernel::<T>(&AlphabetParams::new(m)?);
    if let Some(p) = perturbation.filter(|p| p.m == m) {
        kernel.perturb_phi(p.l, p.i, p.j, delta(p.delta))?;
    }
    Ok(kernel)
}

/// Largest absolute gap over every `W[h][r](i)`, `P(M_h = r)` and `E(M_h)`.
fn max_gap<T: Scalar, U: Scalar>(core: &HittingTable<T>, oracle: &OracleTable<U>) -> f64 {
    let n = core.n();
    let mut gap = 0.0f64;
    for h in 1..=n {
        for r in 1..=core.max_r() {
            for i in 1..=core.m() {
                gap = gap.max((core.get(h, r, i).to_f64() - oracle.get(h, r, i).to_f64()).abs());
            }
        }
    }
    let dist = run_length_distribution(core);
    for r in 1..=core.max_r() {
        gap = gap.max((dist.exactly(r).to_f64() - oracle.exactly(n, r).to_f64()).abs());
    }
    for (h, e) in expected_max_run(core).iter().enumerate() {
        gap = gap.max((e.to_f64() - oracle.expected(h + 1).to_f64()).abs());
    }
    gap
}

/// `true` when every cell, every mass and every expectation agree exactly.
fn exact_match(core: &HittingTable<Exact>, oracle: &OracleTable<Exact>) -> bool {
    let n = core.n();
    let cells =
        (1..=n).all(|h| (1..=core.max_r()).all(|r| core.vector(h, r) == oracle.vector(h, r)));
    let dist = run_length_distribution(core);
    let masses = (1..=core.max_r()).all(|r| dist.exactly(r) == oracle.exactly(n, r));
    let means = expected_max_run(core)
        .iter()
        .enumerate()
        .all(|(h, e)| *e == oracle.expected(h + 1));
    cells && masses && means
}

pub fn run_crosscheck(opts: &CrossCheckOptions) -> Result<CrossCheckReport> {
    if opts.max_m < 2 {
        return Err(Error::InvalidParameter(format!(
            "max m must be >= 2, got {}",
            opts.max_m
        )));
    }
    if opts.max_n < 1 {
        return Err(Error::InvalidParameter("max n must be >= 1".into()));
    }
    let budget = &opts.budget;
    let mut report = CrossCheckReport::default();

    for m in 2..=opts.max_m {
        let float_kernel = kernel_for::<f64>(m, opts.perturbation, |d| d)?;
        let exact_kernel = kernel_for::<Exact>(m, opts.perturbation, |d| {
            <Exact as FromPrimitive>::from_f64(d).unwrap_or_else(Exact::zero)
        })?;
        let exact_ok = m <= budget.exact_max_m;

        for n in 1..=opts.max_n {
            let core = hitting_table(&float_kernel, n, budget)?;
            let exact_cell = exact_ok && n <= budget.exact_max_n;
            // rational dp inside the exact-mode budget, floating dp beyond it
            let dp = if exact_cell {
                Some(dp_table::<Exact>(m, n, budget)?)
            } else {
                None
            };
            let gap = match &dp {
                Some(table) => max_gap(&core, table),
                None => max_gap(&core, &dp_table::<f64>(m, n, budget)?),
            };
            report.record(
                format!("m={m} n={n} recursion vs dp"),
                gap <= FLOAT_TOLERANCE,
                format!("max |diff| = {gap:e}"),
            );

            let enumerated = if enumeration_size(m, n) <= budget.max_enumeration {
                let table = exact_distribution_enum(m, n, budget)?.to_table();
                let gap = max_gap(&core, &table);
                report.record(
                    format!("m={m} n={n} recursion vs enumeration"),
                    gap <= FLOAT_TOLERANCE,
                    format!("max |diff| = {gap:e}"),
                );
                if let Some(dp) = &dp {
                    report.record(
                        format!("m={m} n={n} enumeration vs dp (exact)"),
                        table == *dp,
                        "rational equality".into(),
                    );
                }
                Some(table)
            } else {
                report.skip(
                    format!("m={m} n={n} recursion vs enumeration"),
                    format!(
                        "{} sequences exceed the enumeration budget",
                        enumeration_size(m, n)
                    ),
                );
                None
            };

            if let Some(dp) = &dp {
                let core = hitting_table(&exact_kernel, n, budget)?;
                let vs_dp = exact_match(&core, dp);
                let vs_enum = enumerated.as_ref().is_none_or(|t| exact_match(&core, t));
                report.record(
                    format!("m={m} n={n} exact recursion vs oracles"),
                    vs_dp && vs_enum,
                    format!("dp equal: {vs_dp}, enumeration equal: {vs_enum}"),
                );
            }
        }
    }

    // simulation smoke test at the largest grid corner
    let (m, n) = (opts.max_m.min(5), opts.max_n);
    let kernel = kernel_for::<f64>(m, opts.perturbation, |d| d)?;
    let exact = *expected_max_run(&hitting_table(&kernel, n, budget)?)
        .last()
        .expect("n >= 1");
    let stats = estimate(&SimConfig::new(m, n, opts.mc_samples, opts.mc_seed)?)?;
    let z = if stats.stderr > 0.0 {
        (stats.mean - exact).abs() / stats.stderr
    } else if stats.mean == exact {
        0.0
    } else {
        f64::INFINITY
    };
    report.record(
        format!("m={m} n={n} simulation vs recursion"),
        z <= MC_SIGMAS,
        format!(
            "mean {} vs exact {exact} ({z:.2} standard errors)",
            stats.mean
        ),
    );

    Ok(report)
}
