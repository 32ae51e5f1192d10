//! `ascruns`: exact and simulated statistics of the maximal ascending run.
//!
//! Exit codes: 0 success, 1 failed check, 2 invalid input, 3 resource budget
//! exceeded.

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use ascruns_core::crosscheck::{run_crosscheck, CrossCheckOptions, Perturbation};
use ascruns_core::csvio::{
    distribution_csv, expected_csv, histogram_csv, hitting_table_csv, kernel_csv, sweep_csv,
    CsvDocument,
};
use ascruns_core::montecarlo::{estimate, sample_sequence, substream, SimConfig};
use ascruns_core::netchain::{
    dag_height, dag_height_by_graph, stabilization_bound_sweep, undirected_dag_height,
    ColoredChain, MonteCarloOptions, SweepMode, SweepSpec,
};
use ascruns_core::oracle::{decompose_runs, ColorSequence};
use ascruns_core::{
    build_kernel, hitting_table, run_length_profile, AlphabetParams, Budget, Error, Exact,
    RunKernel, Scalar,
};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ascruns",
    version,
    about = "Maximal ascending runs of no-repeat uniform color sequences"
)]
struct Cli {
    /// Resource budget overrides, e.g. `m=128,n=10000,exact_m=10,exact_n=20,enum=1e8`.
    #[arg(long, global = true, env = "ASCRUNS_BUDGET")]
    budget: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// E(M_h) for h = 1..n.
    Exact {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        m: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Print the full table P(M_h >= r | X_1 = i) instead.
        #[arg(long)]
        full_table: bool,
        /// Use arbitrary-precision rationals (small m and n only).
        #[arg(long)]
        rational: bool,
    },
    /// Law of M_n: r, P(M_n >= r), P(M_n = r).
    Dist {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        m: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Condition on the first color X_1.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        given: Option<u64>,
    },
    /// Run kernels psi, varphi and phi as CSV.
    Kernel {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        m: u64,
    },
    /// Monte Carlo histogram of M_n.
    Simulate {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        m: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Cross-validate the recursion against both oracles and simulation.
    OracleCheck {
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(2..))]
        max_m: u64,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
        max_n: u64,
        #[arg(long, default_value_t = 20_000, value_parser = clap::value_parser!(u64).range(1..))]
        mc_samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Test hook: add DELTA to phi(l, i, j) for alphabet size m (`m,l,i,j,delta`).
        #[arg(long, hide = true)]
        perturb: Option<String>,
    },
    /// Height of the color DAG of a chain read from a file or sampled.
    Chain {
        /// One color per line; blank lines and `#` comments are ignored.
        #[arg(long, conflicts_with_all = ["n", "seed"])]
        file: Option<PathBuf>,
        /// Number of colors (defaults to the largest color in the file).
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        m: Option<u64>,
        /// Nodes to sample when no file is given.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// E(M_n) as a function of n (fixed m) or of m (fixed n).
    Sweep {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        m: Option<u64>,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: Option<u64>,
        /// `start:end` or `start:end:step`, inclusive.
        #[arg(long)]
        range: String,
        /// Add simulated columns with this many samples per point.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        mc_samples: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    #[value(name = "vary_n", alias = "vary-n")]
    VaryN,
    #[value(name = "vary_m", alias = "vary-m")]
    VaryM,
}

#[derive(Debug)]
enum Failure {
    Check,
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Check => 1,
            Failure::Lib(e) if e.is_budget() => 3,
            Failure::Lib(Error::Inconsistent(_)) => 1,
            Failure::Usage(_) | Failure::Lib(_) => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Check => eprintln!("error: cross-check failed"),
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Lib(e) => eprintln!("error: {e}"),
            }
            ExitCode::from(failure.exit_code())
        }
    }
}

fn emit(out: &mut impl Write, doc: &CsvDocument) -> Result<(), Failure> {
    doc.write_to(out).map_err(Failure::Lib)
}

fn run(cli: Cli, out: &mut impl Write) -> Result<(), Failure> {
    let budget = match &cli.budget {
        Some(spec) => spec.parse::<Budget>()?,
        None => Budget::default(),
    };

    match cli.command {
        Command::Exact {
            m,
            n,
            full_table,
            rational,
        } => {
            let (m, n) = (m as usize, n as usize);
            let params = AlphabetParams::new(m)?;
            if rational {
                exact_output(&build_kernel::<Exact>(&params), n, full_table, &budget, out)
            } else {
                exact_output(&build_kernel::<f64>(&params), n, full_table, &budget, out)
            }
        }
        Command::Dist { m, n, given } => {
            let (m, n) = (m as usize, n as usize);
            let given = given.map(|i| i as usize);
            if let Some(i) = given.filter(|&i| i > m) {
                return Err(Failure::Usage(format!("--given {i} outside 1..={m}")));
            }
            let kernel = build_kernel::<f64>(&AlphabetParams::new(m)?);
            let profile = run_length_profile(&kernel, n, &budget)?;
            emit(out, &distribution_csv(&profile.distribution, given))
        }
        Command::Kernel { m } => {
            let kernel = build_kernel::<f64>(&AlphabetParams::new(m as usize)?);
            emit(out, &kernel_csv(&kernel).meta("m", m))
        }
        Command::Simulate {
            m,
            n,
            samples,
            seed,
        } => {
            let stats = estimate(&SimConfig::new(m as usize, n as usize, samples, seed)?)?;
            emit(out, &histogram_csv(&stats))
        }
        Command::OracleCheck {
            max_m,
            max_n,
            mc_samples,
            seed,
            perturb,
        } => {
            let perturbation = perturb.as_deref().map(parse_perturbation).transpose()?;
            let opts = CrossCheckOptions {
                max_m: max_m as usize,
                max_n: max_n as usize,
                budget,
                mc_samples,
                mc_seed: seed,
                perturbation,
            };
            let report = run_crosscheck(&opts)?;
            for line in &report.lines {
                writeln!(out, "{line}").map_err(|e| Failure::Usage(e.to_string()))?;
            }
            let verdict = if report.passed() { "PASS" } else { "FAIL" };
            writeln!(out, "{verdict} overall").map_err(|e| Failure::Usage(e.to_string()))?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
        Command::Chain { file, m, n, seed } => {
            let chain = match (file, n) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(&path).map_err(|e| {
                        Failure::Usage(format!("cannot read {}: {e}", path.display()))
                    })?;
                    let colors = ColorSequence::parse_lines(&text, m.map(|m| m as usize))?;
                    let m = m.map_or(colors.max_color().max(2), |m| m as usize);
                    ColoredChain::new(colors, m)?
                }
                (None, Some(n)) => {
                    let m = m.ok_or_else(|| {
                        Failure::Usage("--m is required when sampling a chain".into())
                    })? as usize;
                    let colors = sample_sequence(m, n as usize, &mut substream(seed, 0));
                    ColoredChain::new(colors, m)?
                }
                (None, None) => {
                    return Err(Failure::Usage(
                        "give --file or --n to sample a chain".into(),
                    ))
                }
            };
            let height = dag_height(&chain);
            let by_graph = dag_height_by_graph(&chain);
            if height != by_graph {
                return Err(Failure::Lib(Error::Inconsistent(format!(
                    "run decomposition gives {height} but longest path gives {by_graph}"
                ))));
            }
            let mut doc =
                CsvDocument::new(&["nodes", "runs", "dag_height", "undirected_dag_height"])
                    .meta("m", chain.m());
            doc.push(vec![
                chain.len().to_string(),
                decompose_runs(chain.colors()).runs.len().to_string(),
                height.to_string(),
                undirected_dag_height(&chain).to_string(),
            ]);
            emit(out, &doc)
        }
        Command::Sweep {
            mode,
            m,
            n,
            range,
            mc_samples,
            seed,
        } => {
            let values = parse_range(&range)?;
            let mode = match mode {
                Mode::VaryN => SweepMode::VaryN {
                    m: m.ok_or_else(|| Failure::Usage("--m is required for vary_n".into()))?
                        as usize,
                },
                Mode::VaryM => SweepMode::VaryM {
                    n: n.ok_or_else(|| Failure::Usage("--n is required for vary_m".into()))?
                        as usize,
                },
            };
            let mc = mc_samples.map(|samples| MonteCarloOptions { samples, seed });
            let spec = SweepSpec::new(mode, values, mc)?;
            let rows = stabilization_bound_sweep(&spec, &budget)?;
            emit(out, &sweep_csv(&spec, &rows))
        }
    }
}

fn exact_output<T: Scalar>(
    kernel: &RunKernel<T>,
    n: usize,
    full_table: bool,
    budget: &Budget,
    out: &mut impl Write,
) -> Result<(), Failure> {
    let m = kernel.m();
    if full_table {
        let table = hitting_table(kernel, n, budget)?;
        let doc = hitting_table_csv(&table).meta("m", m).meta("n", n);
        emit(out, &doc)
    } else {
        let profile = run_length_profile(kernel, n, budget)?;
        emit(out, &expected_csv(m, &profile.expected))
    }
}

fn parse_range(s: &str) -> Result<Vec<usize>, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| Failure::Usage(format!("range bound `{t}` is not a non-negative integer")))
    };
    let (start, end, step) = match parts.as_slice() {
        [a] => (num(a)?, num(a)?, 1),
        [a, b] => (num(a)?, num(b)?, 1),
        [a, b, c] => (num(a)?, num(b)?, num(c)?),
        _ => {
            return Err(Failure::Usage(format!(
                "range `{s}` is not start:end[:step]"
            )))
        }
    };
    if step == 0 || start > end {
        return Err(Failure::Usage(format!("range `{s}` is empty")));
    }
    Ok((start..=end).step_by(step).collect())
}

fn parse_perturbation(s: &str) -> Result<Perturbation, Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Failure::Usage(format!("perturbation `{s}` is not m,l,i,j,delta"));
    if parts.len() != 5 {
        return Err(bad());
    }
    let idx = |k: usize| parts[k].parse::<usize>().map_err(|_| bad());
    Ok(Perturbation {
        m: idx(0)?,
        l: idx(1)?,
        i: idx(2)?,
        j: idx(3)?,
        delta: parts[4].parse().map_err(|_| bad())?,
    })
}
