//! Color chains of a wireless line network and the height of their color DAG.
//!
//! Node `k` of an `n`-node chain holds color `x_k`; neighbors always differ.
//! Orienting every link from the higher to the lower color gives a DAG. Client
//! protocols layered on the coloring stabilize in time proportional to the
//! longest strictly ascending color chain, which along the chain direction is
//! the maximal ascending run of `x_1..x_n`.
//!
//! Sweeps report `E(M_n)` as `n` or `m` varies. They describe the shape of
//! the curves only (monotone in both parameters, slow growth in `n`,
//! saturation in `m`); no reference curve values exist to compare against.

use petgraph::algo::toposort;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::Direction;

use crate::error::{Error, Result};
use crate::hitting::run_length_profile;
use crate::kernel::build_kernel;
use crate::montecarlo::{estimate, SimConfig};
use crate::oracle::{decompose_runs, ColorSequence};
use crate::params::{AlphabetParams, Budget};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredChain {
    colors: ColorSequence,
    m: usize,
}

impl ColoredChain {
    pub fn new(colors: ColorSequence, m: usize) -> Result<Self> {
        AlphabetParams::new(m)?;
        if colors.max_color() > m {
            return Err(Error::InvalidSequence(format!(
                "color {} exceeds the {m} available colors",
                colors.max_color()
            )));
        }
        Ok(Self { colors, m })
    }

    pub fn colors(&self) -> &ColorSequence {
        &self.colors
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// DAG on the chain with one edge per link, oriented from the higher to
    /// the lower color.
    pub fn color_dag(&self) -> DiGraph<usize, ()> {
        self.oriented_graph(|_, _| true)
    }

    /// The sub-DAG of links whose lower-colored end comes first along the
    /// chain. Its directed paths, read backwards, are the ascending color
    /// chains that follow the node order.
    pub fn forward_ascending_dag(&self) -> DiGraph<usize, ()> {
        self.oriented_graph(|a, b| a < b)
    }

    // keep(left, right) decides whether the link between consecutive nodes is kept.
    fn oriented_graph(&self, keep: impl Fn(usize, usize) -> bool) -> DiGraph<usize, ()> {
        let values = self.colors.values();
        let mut g = DiGraph::with_capacity(values.len(), values.len().saturating_sub(1));
        let nodes: Vec<NodeIndex> = values.iter().map(|&c| g.add_node(c)).collect();
        for k in 1..values.len() {
            let (a, b) = (values[k - 1], values[k]);
            if !keep(a, b) {
                continue;
            }
            if a > b {
                g.add_edge(nodes[k - 1], nodes[k], ());
            } else {
                g.add_edge(nodes[k], nodes[k - 1], ());
            }
        }
        g
    }
}

/// Number of nodes on the longest directed path of a DAG.
pub fn longest_path_nodes<N, E>(graph: &DiGraph<N, E>) -> usize {
    let order = toposort(graph, None).expect("color orientation is acyclic");
    let mut depth = vec![1usize; graph.node_count()];
    for &v in &order {
        let here = depth[v.index()];
        for w in graph.neighbors_directed(v, Direction::Outgoing) {
            depth[w.index()] = depth[w.index()].max(here + 1);
        }
    }
    depth.into_iter().max().unwrap_or(0)
}

/// Longest strictly ascending color chain along the node order: the maximal
/// ascending run of the color sequence.
pub fn dag_height(chain: &ColoredChain) -> usize {
    decompose_runs(chain.colors()).max_len
}

/// Same statistic as [`dag_height`], computed as a longest path in
/// [`ColoredChain::forward_ascending_dag`].
pub fn dag_height_by_graph(chain: &ColoredChain) -> usize {
    longest_path_nodes(&chain.forward_ascending_dag())
}

/// Height of the full color DAG, counting ascending chains in both directions
/// along the line. Equals the larger of the longest ascending and longest
/// descending runs, so it dominates [`dag_height`].
pub fn undirected_dag_height(chain: &ColoredChain) -> usize {
    longest_path_nodes(&chain.color_dag())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    /// Fixed `m`, swept `n`.
    VaryN { m: usize },
    /// Fixed `n`, swept `m`.
    VaryM { n: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloOptions {
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub mode: SweepMode,
    pub values: Vec<usize>,
    /// Adds simulated columns and lets points outside the exact budget fall
    /// back to simulation alone.
    pub monte_carlo: Option<MonteCarloOptions>,
}

impl SweepSpec {
    pub fn new(
        mode: SweepMode,
        values: Vec<usize>,
        monte_carlo: Option<MonteCarloOptions>,
    ) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("sweep range is empty"));
        }
        let (ms, ns): (Vec<usize>, Vec<usize>) = match mode {
            SweepMode::VaryN { m } => (vec![m], values.clone()),
            SweepMode::VaryM { n } => (values.clone(), vec![n]),
        };
        if let Some(&m) = ms.iter().find(|&&m| m < 2) {
            return Err(Error::invalid(format!(
                "alphabet size m must be >= 2, got {m}"
            )));
        }
        if ns.contains(&0) {
            return Err(Error::invalid("sequence length n must be >= 1"));
        }
        if monte_carlo.is_some_and(|mc| mc.samples == 0) {
            return Err(Error::invalid("samples must be >= 1"));
        }
        Ok(Self {
            mode,
            values,
            monte_carlo,
        })
    }

    fn point(&self, param: usize) -> (usize, usize) {
        match self.mode {
            SweepMode::VaryN { m } => (m, param),
            SweepMode::VaryM { n } => (param, n),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: usize,
    pub exact: Option<f64>,
    pub mc_mean: Option<f64>,
    pub mc_stderr: Option<f64>,
}

/// One row per swept value, in the order given.
pub fn stabilization_bound_sweep(spec: &SweepSpec, budget: &Budget) -> Result<Vec<SweepRow>> {
    let within = |param: usize| {
        let (m, n) = spec.point(param);
        budget.check_recursion(m, n, false)
    };
    if spec.monte_carlo.is_none() {
        if let Some((param, err)) = spec
            .values
            .iter()
            .find_map(|&p| within(p).err().map(|e| (p, e)))
        {
            return Err(Error::AtSweepPoint {
                param,
                reason: Box::new(err),
            });
        }
    }

    let exact: Vec<Option<f64>> = match spec.mode {
        SweepMode::VaryN { m } => {
            // one pass to the largest admissible n covers every point
            let top = spec
                .values
                .iter()
                .copied()
                .filter(|&p| within(p).is_ok())
                .max();
            let expected = match top {
                Some(n) => {
                    run_length_profile(&build_kernel::<f64>(&AlphabetParams::new(m)?), n, budget)?
                        .expected
                }
                None => Vec::new(),
            };
            spec.values
                .iter()
                .map(|&n| within(n).ok().map(|_| expected[n - 1]))
                .collect()
        }
        SweepMode::VaryM { n } => spec
            .values
            .iter()
            .map(|&m| {
                if within(m).is_err() {
                    return Ok(None);
                }
                let kernel = build_kernel::<f64>(&AlphabetParams::new(m)?);
                Ok(Some(
                    run_length_profile(&kernel, n, budget)?.expected[n - 1],
                ))
            })
            .collect::<Result<_>>()?,
    };

    spec.values
        .iter()
        .zip(exact)
        .map(|(&param, exact)| {
            let (mc_mean, mc_stderr) = match spec.monte_carlo {
                Some(mc) => {
                    let (m, n) = spec.point(param);
                    let stats = estimate(&SimConfig::new(m, n, mc.samples, mc.seed)?)?;
                    (Some(stats.mean), Some(stats.stderr))
                }
                None => (None, None),
            };
            Ok(SweepRow {
                param,
                exact,
                mc_mean,
                mc_stderr,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::{sample_sequence, substream};

    fn chain(s: &str, m: usize) -> ColoredChain {
        ColoredChain::new(s.parse().unwrap(), m).unwrap()
    }

    #[test]
    fn intro_chain_height() {
        let c = chain("2,3,1,2,4,3,4,2,3,1,3,4,5,1,2,3,4,3,4,1", 5);
        assert_eq!(dag_height(&c), 4);
        assert_eq!(dag_height_by_graph(&c), 4);
    }

    #[test]
    fn gradient_and_alternation() {
        let c = ColoredChain::new(ColorSequence::new((1..=9).collect(), None).unwrap(), 9).unwrap();
        assert_eq!(dag_height(&c), 9);
        assert_eq!(dag_height_by_graph(&c), 9);
        let c = chain("2,1,2,1,2", 2);
        assert_eq!(dag_height(&c), 2);
        assert_eq!(undirected_dag_height(&c), 2);
    }

    #[test]
    fn full_dag_sees_descending_chains() {
        let c = chain("5,4,3,2,1", 5);
        assert_eq!(dag_height(&c), 1);
        assert_eq!(undirected_dag_height(&c), 5);
    }

    #[test]
    fn rejects_colors_above_m() {
        assert!(ColoredChain::new("1,4".parse().unwrap(), 3).is_err());
        assert!(ColoredChain::new("1".parse().unwrap(), 1).is_err());
    }

    #[test]
    fn graph_heights_on_random_chains() {
        let mut rng = substream(17, 0);
        for _ in 0..300 {
            let seq = sample_sequence(6, 60, &mut rng);
            let rev =
                ColorSequence::new(seq.values().iter().rev().copied().collect(), None).unwrap();
            let c = ColoredChain::new(seq.clone(), 6).unwrap();
            assert_eq!(dag_height_by_graph(&c), dag_height(&c));
            let back = decompose_runs(&rev).max_len;
            assert_eq!(undirected_dag_height(&c), dag_height(&c).max(back));
        }
    }

    #[test]
    fn vary_n_m2_closed_form() {
        let spec = SweepSpec::new(SweepMode::VaryN { m: 2 }, vec![1, 2, 3, 4], None).unwrap();
        let rows = stabilization_bound_sweep(&spec, &Budget::default()).unwrap();
        let exact: Vec<f64> = rows.iter().map(|r| r.exact.unwrap()).collect();
        assert_eq!(exact, vec![1.0, 1.5, 2.0, 2.0]);
        assert!(rows.iter().all(|r| r.mc_mean.is_none()));
    }

    #[test]
    fn refusal_names_first_offending_point() {
        let spec = SweepSpec::new(SweepMode::VaryM { n: 10 }, vec![3, 70, 80], None).unwrap();
        let err = stabilization_bound_sweep(&spec, &Budget::default()).unwrap_err();
        assert!(err.is_budget());
        assert!(matches!(err, Error::AtSweepPoint { param: 70, .. }));
    }

    #[test]
    fn monte_carlo_fallback_fills_refused_points() {
        let mc = MonteCarloOptions {
            samples: 500,
            seed: 3,
        };
        let spec = SweepSpec::new(SweepMode::VaryN { m: 3 }, vec![5, 12], Some(mc)).unwrap();
        let budget = Budget {
            max_n: 10,
            ..Budget::default()
        };
        let rows = stabilization_bound_sweep(&spec, &budget).unwrap();
        assert!(rows[0].exact.is_some());
        assert!(rows[1].exact.is_none());
        assert!(rows
            .iter()
            .all(|r| r.mc_mean.is_some() && r.mc_stderr.is_some()));
    }

    #[test]
    fn spec_validation() {
        assert!(SweepSpec::new(SweepMode::VaryN { m: 3 }, vec![], None).is_err());
        assert!(SweepSpec::new(SweepMode::VaryN { m: 1 }, vec![2], None).is_err());
        assert!(SweepSpec::new(SweepMode::VaryM { n: 5 }, vec![1], None).is_err());
        assert!(SweepSpec::new(SweepMode::VaryM { n: 0 }, vec![3], None).is_err());
    }
}
