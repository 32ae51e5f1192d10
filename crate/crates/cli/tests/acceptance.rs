//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use ascruns_core::crosscheck::{run_crosscheck, CrossCheckOptions, Outcome, FLOAT_TOLERANCE};
use ascruns_core::montecarlo::{
    estimate, marginal_uniformity, sample_sequence, substream, SimConfig,
};
use ascruns_core::netchain::{dag_height, dag_height_by_graph, ColoredChain};
use ascruns_core::oracle::{decompose_runs, dp_table, exact_distribution_enum, ColorSequence};
use ascruns_core::{
    build_kernel, hitting_table, run_length_distribution, run_length_profile, transition_row,
    AlphabetParams, Budget, Exact, Scalar,
};

type Verdict = Result<String, String>;

type Criterion = (&'static str, Duration, fn() -> Verdict);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn expected_series(m: usize, n: usize) -> Vec<f64> {
    let kernel = build_kernel::<f64>(&AlphabetParams::new(m).unwrap());
    run_length_profile(&kernel, n, &Budget::default())
        .unwrap()
        .expected
}

/// m in 2..=5, n in 1..=10: every W cell, P(M_n = r) and E(M_n) against
/// enumeration and the dynamic program within 1e-12, and exactly in
/// rational mode.
fn oracle_equivalence_grid() -> Verdict {
    let report = run_crosscheck(&CrossCheckOptions {
        max_m: 5,
        max_n: 10,
        ..Default::default()
    })
    .map_err(|e| e.to_string())?;
    for line in &report.lines {
        ensure(line.outcome == Outcome::Pass, || line.to_string())?;
    }
    // direct re-check of the exact route, independent of the report plumbing
    let mut cells = 0usize;
    for m in 2..=5 {
        let float_kernel = build_kernel::<f64>(&AlphabetParams::new(m).unwrap());
        let exact_kernel = build_kernel::<Exact>(&AlphabetParams::new(m).unwrap());
        for n in 1..=10 {
            let core = hitting_table(&float_kernel, n, &Budget::default()).unwrap();
            let exact = hitting_table(&exact_kernel, n, &Budget::default()).unwrap();
            let enumerated = exact_distribution_enum(m, n, &Budget::default())
                .unwrap()
                .to_table();
            let dp = dp_table::<Exact>(m, n, &Budget::default()).unwrap();
            ensure(enumerated == dp, || {
                format!("m={m} n={n}: enumeration != dp")
            })?;
            for h in 1..=n {
                for r in 1..=m.min(n) {
                    ensure(exact.vector(h, r) == dp.vector(h, r), || {
                        format!("m={m} n={n} h={h} r={r} exact")
                    })?;
                    for i in 1..=m {
                        let d = (core.get(h, r, i) - dp.get(h, r, i).to_f64()).abs();
                        ensure(d <= FLOAT_TOLERANCE, || {
                            format!("m={m} h={h} r={r} i={i} diff {d:e}")
                        })?;
                        cells += 1;
                    }
                }
            }
            let dist = run_length_distribution(&core);
            for r in 1..=m.min(n) {
                let d = (dist.exactly(r) - dp.exactly(n, r).to_f64()).abs();
                ensure(d <= FLOAT_TOLERANCE, || {
                    format!("m={m} n={n} P(M=r={r}) diff {d:e}")
                })?;
            }
        }
    }
    Ok(format!(
        "{} report checks, {cells} W cells within 1e-12",
        report.lines.len()
    ))
}

fn intro_example() -> Verdict {
    let seq: ColorSequence = "2,3,1,2,4,3,4,2,3,1,3,4,5,1,2,3,4,3,4,1"
        .parse()
        .map_err(|e| format!("{e}"))?;
    let d = decompose_runs(&seq);
    ensure(d.runs.len() == 8 && d.max_len == 4, || {
        format!("{} runs, max {}", d.runs.len(), d.max_len)
    })?;
    Ok("8 runs, max length 4".into())
}

fn closed_form_m2() -> Verdict {
    let e = expected_series(2, 100);
    for (k, &x) in e.iter().enumerate() {
        let n = k + 1;
        let want = match n {
            1 => 1.0,
            2 => 1.5,
            _ => 2.0,
        };
        ensure((x - want).abs() <= 1e-12, || {
            format!("E(M_{n}) = {x}, want {want}")
        })?;
    }
    Ok("E(M_1)=1, E(M_2)=1.5, E(M_n)=2 for n=3..100".into())
}

fn kernel_invariants() -> Verdict {
    let mut worst_row = 0.0f64;
    for m in 2..=100 {
        let params = AlphabetParams::new(m).unwrap();
        let kernel = build_kernel::<f64>(&params);
        kernel.validate(1e-12).map_err(|e| format!("m={m}: {e}"))?;
        for i in 1..=m {
            for l in 1..=m {
                ensure(
                    *kernel.varphi(l, i) == kernel.psi(l, i) - kernel.psi(l + 1, i),
                    || format!("m={m}: telescoping fails at l={l} i={i}"),
                )?;
                if l > m - i + 1 {
                    ensure(*kernel.varphi(l, i) == 0.0, || {
                        format!("m={m}: varphi support at l={l} i={i}")
                    })?;
                    for j in 1..=m {
                        ensure(*kernel.phi(l, i, j) == 0.0, || {
                            format!("m={m}: phi support at l={l} i={i}")
                        })?;
                    }
                }
            }
        }
        let states = params.run_states();
        for &src in &states {
            let row = transition_row(&kernel, &states, src).map_err(|e| e.to_string())?;
            let defect = (row.iter().sum::<f64>() - 1.0).abs();
            worst_row = worst_row.max(defect);
            ensure(defect <= 1e-12, || {
                format!("m={m}: row {src} sums to 1 + {defect:e}")
            })?;
        }
    }
    Ok(format!(
        "m=2..100, worst transition row defect {worst_row:e}"
    ))
}

fn monte_carlo_consistency() -> Verdict {
    let mut parts = Vec::new();
    for (m, n, seed) in [(3usize, 10usize, 11u64), (10, 100, 12), (25, 500, 13)] {
        let exact = *expected_series(m, n).last().unwrap();
        let stats =
            estimate(&SimConfig::new(m, n, 100_000, seed).unwrap()).map_err(|e| e.to_string())?;
        let z = (stats.mean - exact).abs() / stats.stderr;
        ensure(z <= 4.0, || {
            format!("(m={m}, n={n}): mean {} vs {exact}, z = {z:.2}", stats.mean)
        })?;
        parts.push(format!("({m},{n}) z={z:.2}"));
    }
    let cfg = SimConfig::new(5, 100, 100_000, 14).unwrap();
    for chi in marginal_uniformity(&cfg, &[1, 50, 100]).map_err(|e| e.to_string())? {
        ensure(chi.p_value > 0.001, || {
            format!("chi-square at k={} p={}", chi.position, chi.p_value)
        })?;
        parts.push(format!("chi2[k={}] p={:.3}", chi.position, chi.p_value));
    }
    Ok(parts.join(", "))
}

fn figure_shape() -> Verdict {
    let mut parts = Vec::new();
    for m in [5usize, 10, 20] {
        let e = expected_series(m, 1000);
        if let Some(k) = e.windows(2).position(|w| w[1] < w[0]) {
            return Err(format!("m={m}: E(M_n) decreases at n={}", k + 2));
        }
        let (e500, e1000) = (e[499], e[999]);
        ensure(e1000 - e500 < 0.2 * e500, || {
            format!("m={m}: E(M_1000)={e1000}, E(M_500)={e500}")
        })?;
        parts.push(format!("m={m}: E500={e500:.4} E1000={e1000:.4}"));
    }
    for n in [50usize, 200] {
        let means: Vec<f64> = (2..=40)
            .map(|m| *expected_series(m, n).last().unwrap())
            .collect();
        if let Some(k) = means.windows(2).position(|w| w[1] < w[0]) {
            return Err(format!("n={n}: E(M_n) decreases at m={}", k + 3));
        }
        let step = means[38] - means[37];
        ensure(step < 1e-2, || {
            format!("n={n}: increment at m=40 is {step}")
        })?;
        parts.push(format!("n={n}: increment at m=40 {step:.2e}"));
    }
    Ok(parts.join("; "))
}

fn dag_height_equivalence() -> Verdict {
    let mut rng = substream(2008, 0);
    for k in 0..1000 {
        let chain =
            ColoredChain::new(sample_sequence(8, 200, &mut rng), 8).map_err(|e| e.to_string())?;
        let (a, b) = (dag_height(&chain), dag_height_by_graph(&chain));
        ensure(a == b, || {
            format!("chain {k}: runs {a} vs longest path {b}")
        })?;
    }
    Ok("1000 chains (m=8, n=200) agree".into())
}

fn cli_determinism() -> Verdict {
    let exe = env!("CARGO_BIN_EXE_ascruns");
    let chain_file = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/intro_chain.txt");
    let chain_file = chain_file.to_str().unwrap();
    let invocations: Vec<Vec<&str>> = vec![
        vec!["exact", "--m", "7", "--n", "50"],
        vec!["exact", "--m", "4", "--n", "9", "--full-table"],
        vec!["exact", "--m", "5", "--n", "12", "--rational"],
        vec!["dist", "--m", "5", "--n", "20"],
        vec!["kernel", "--m", "6"],
        vec![
            "simulate",
            "--m",
            "6",
            "--n",
            "80",
            "--samples",
            "20000",
            "--seed",
            "9",
        ],
        vec!["chain", "--file", chain_file],
        vec!["chain", "--m", "8", "--n", "200", "--seed", "3"],
        vec![
            "sweep",
            "--mode",
            "vary_n",
            "--m",
            "4",
            "--range",
            "1:30",
            "--mc-samples",
            "2000",
            "--seed",
            "5",
        ],
        vec!["sweep", "--mode", "vary_m", "--n", "20", "--range", "2:12"],
        vec![
            "oracle-check",
            "--max-m",
            "3",
            "--max-n",
            "6",
            "--mc-samples",
            "2000",
        ],
    ];
    for args in &invocations {
        let run = || {
            Command::new(exe)
                .args(args)
                .output()
                .map_err(|e| e.to_string())
        };
        let (a, b) = (run()?, run()?);
        ensure(a.status.success(), || {
            format!("{args:?} exited with {:?}", a.status.code())
        })?;
        ensure(a.stdout == b.stdout && !a.stdout.is_empty(), || {
            format!("{args:?} output differs")
        })?;
    }
    Ok(format!("{} invocations byte-identical", invocations.len()))
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        (
            "oracle equivalence grid",
            Duration::from_secs(60),
            oracle_equivalence_grid,
        ),
        ("intro example decomposition", Duration::MAX, intro_example),
        ("closed form m=2", Duration::MAX, closed_form_m2),
        (
            "kernel invariants m<=100",
            Duration::from_secs(30),
            kernel_invariants,
        ),
        (
            "monte carlo consistency",
            Duration::from_secs(120),
            monte_carlo_consistency,
        ),
        (
            "figure-shape properties",
            Duration::from_secs(300),
            figure_shape,
        ),
        (
            "dag-height equivalence",
            Duration::MAX,
            dag_height_equivalence,
        ),
        ("cli determinism", Duration::MAX, cli_determinism),
    ];

    let mut failures = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > limit => {
                Err(format!("{detail}; took {elapsed:.1?}, limit {limit:?}"))
            }
            other => other,
        };
        match result {
            Ok(detail) => println!("PASS  {name} [{elapsed:.2?}]: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL  {name} [{elapsed:.2?}]: {detail}");
            }
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
