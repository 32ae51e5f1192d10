//! CSV layouts shared by the library and the command-line tool.
//!
//! Every document starts with optional `# key=value` metadata lines followed
//! by a header row and data rows. Probabilities are written as the shortest
//! decimal that parses back to the same `f64`.

use std::io::Write;

use crate::error::{Error, Result};
use crate::hitting::{HittingTable, RunLengthDistribution};
use crate::kernel::RunKernel;
use crate::montecarlo::EmpiricalRunStats;
use crate::netchain::{SweepMode, SweepRow, SweepSpec};
use crate::oracle::OracleTable;
use crate::scalar::Scalar;

/// Shortest round-trip decimal.
pub fn format_prob(x: f64) -> String {
    format!("{x}")
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CsvDocument {
    pub meta: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvDocument {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Index of a header column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Parses every cell of `name` as `f64`, accepting `num/den` fractions;
    /// empty cells become `None`.
    pub fn float_column(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let idx = self
            .column(name)
            .ok_or_else(|| Error::Parse(format!("no column `{name}`")))?;
        self.rows
            .iter()
            .map(|row| {
                let cell = row.get(idx).map(String::as_str).unwrap_or("");
                if cell.is_empty() {
                    Ok(None)
                } else {
                    parse_number(cell)
                        .map(Some)
                        .ok_or_else(|| Error::Parse(format!("`{cell}` is not a number")))
                }
            })
            .collect()
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<()> {
        let mut out = out;
        for (k, v) in &self.meta {
            writeln!(out, "# {k}={v}").map_err(io_err)?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush().map_err(io_err)
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut meta = Vec::new();
        for line in text.lines() {
            let Some(rest) = line.strip_prefix('#') else {
                continue;
            };
            if let Some((k, v)) = rest.trim().split_once('=') {
                meta.push((k.trim().to_string(), v.trim().to_string()));
            }
        }
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .flexible(false)
            .from_reader(text.as_bytes());
        let header = reader
            .headers()
            .map_err(csv_err)?
            .iter()
            .map(str::to_string)
            .collect();
        let rows = reader
            .records()
            .map(|r| {
                r.map(|rec| rec.iter().map(str::to_string).collect())
                    .map_err(csv_err)
            })
            .collect::<Result<_>>()?;
        Ok(Self { meta, header, rows })
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Parse(format!("i/o: {e}"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

fn cell<T: Scalar>(x: &T) -> String {
    x.to_text()
}

fn parse_number(cell: &str) -> Option<f64> {
    match cell.split_once('/') {
        Some((num, den)) => Some(num.trim().parse::<f64>().ok()? / den.trim().parse::<f64>().ok()?),
        None => cell.parse().ok(),
    }
}

/// Columns `m,l,i,psi,varphi,phi_1..phi_m`, one row per `(l, i)`.
pub fn kernel_csv<T: Scalar>(kernel: &RunKernel<T>) -> CsvDocument {
    let m = kernel.m();
    let mut header = vec![
        "m".to_string(),
        "l".into(),
        "i".into(),
        "psi".into(),
        "varphi".into(),
    ];
    header.extend((1..=m).map(|j| format!("phi_{j}")));
    let mut doc = CsvDocument {
        header,
        ..CsvDocument::default()
    };
    for l in 1..=m {
        for i in 1..=m {
            let mut row = vec![m.to_string(), l.to_string(), i.to_string()];
            row.push(cell(kernel.psi(l, i)));
            row.push(cell(kernel.varphi(l, i)));
            row.extend((1..=m).map(|j| cell(kernel.phi(l, i, j))));
            doc.push(row);
        }
    }
    doc
}

fn w_table_csv<T: Scalar>(
    m: usize,
    n: usize,
    max_r: usize,
    vector: impl Fn(usize, usize) -> Vec<T>,
) -> CsvDocument {
    let mut header = vec!["m".to_string(), "h".into(), "r".into()];
    header.extend((1..=m).map(|i| format!("w_{i}")));
    let mut doc = CsvDocument {
        header,
        ..CsvDocument::default()
    };
    for h in 1..=n {
        for r in 1..=max_r {
            let mut row = vec![m.to_string(), h.to_string(), r.to_string()];
            row.extend(vector(h, r).iter().map(cell));
            doc.push(row);
        }
    }
    doc
}

/// Columns `m,h,r,w_1..w_m` with `w_i = P(M_h >= r | X_1 = i)`.
pub fn hitting_table_csv<T: Scalar>(table: &HittingTable<T>) -> CsvDocument {
    w_table_csv(table.m(), table.n(), table.max_r(), |h, r| {
        table.vector(h, r).to_vec()
    })
}

/// Same layout as [`hitting_table_csv`], so outputs can be diffed directly.
pub fn oracle_table_csv<T: Scalar>(table: &OracleTable<T>) -> CsvDocument {
    w_table_csv(table.m(), table.n(), table.max_r(), |h, r| {
        table.vector(h, r).to_vec()
    })
}

/// Columns `h,expected`.
pub fn expected_csv<T: Scalar>(m: usize, expected: &[T]) -> CsvDocument {
    let mut doc = CsvDocument::new(&["h", "expected"])
        .meta("m", m)
        .meta("n", expected.len());
    for (h, e) in expected.iter().enumerate() {
        doc.push(vec![(h + 1).to_string(), cell(e)]);
    }
    doc
}

/// Columns `r,p_at_least,p_exactly`; conditional on `X_1 = i` when `given` is set.
pub fn distribution_csv<T: Scalar>(
    dist: &RunLengthDistribution<T>,
    given: Option<usize>,
) -> CsvDocument {
    let mut doc = CsvDocument::new(&["r", "p_at_least", "p_exactly"])
        .meta("m", dist.m())
        .meta("n", dist.n());
    if let Some(i) = given {
        doc = doc.meta("given_x1", i);
    }
    for r in 1..=dist.max_r() {
        let (ge, eq) = match given {
            Some(i) => (
                dist.conditional_at_least(i, r),
                dist.conditional_exactly(i, r),
            ),
            None => (dist.at_least(r), dist.exactly(r)),
        };
        doc.push(vec![r.to_string(), cell(&ge), cell(&eq)]);
    }
    doc
}

/// Columns `r,count,empirical_probability`.
pub fn histogram_csv(stats: &EmpiricalRunStats) -> CsvDocument {
    let mut doc = CsvDocument::new(&["r", "count", "empirical_probability"])
        .meta("m", stats.m)
        .meta("n", stats.n)
        .meta("samples", stats.samples)
        .meta("seed", stats.seed)
        .meta("mean", format_prob(stats.mean))
        .meta("stderr", format_prob(stats.stderr));
    for (k, &c) in stats.counts.iter().enumerate() {
        doc.push(vec![
            (k + 1).to_string(),
            c.to_string(),
            format_prob(stats.probability(k + 1)),
        ]);
    }
    doc
}

/// Columns `param,exact_E,mc_mean,mc_stderr`; empty cells where a value was
/// not computed.
pub fn sweep_csv(spec: &SweepSpec, rows: &[SweepRow]) -> CsvDocument {
    let mut doc = CsvDocument::new(&["param", "exact_E", "mc_mean", "mc_stderr"]);
    doc = match spec.mode {
        SweepMode::VaryN { m } => doc.meta("mode", "vary_n").meta("m", m),
        SweepMode::VaryM { n } => doc.meta("mode", "vary_m").meta("n", n),
    };
    if let Some(mc) = spec.monte_carlo {
        doc = doc.meta("mc_samples", mc.samples).meta("seed", mc.seed);
    }
    let opt = |x: Option<f64>| x.map(format_prob).unwrap_or_default();
    for row in rows {
        doc.push(vec![
            row.param.to_string(),
            opt(row.exact),
            opt(row.mc_mean),
            opt(row.mc_stderr),
        ]);
    }
    doc
}
