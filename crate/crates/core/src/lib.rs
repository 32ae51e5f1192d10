//! Exact law of the longest ascending run in a uniform color sequence where
//! consecutive colors must differ.
//!
//! * [`kernel`], [`transition`], [`hitting`]: the run-process kernels and the
//!   hitting-time recursion giving `P(M_n >= r)` and `E(M_n)`.
//! * [`oracle`]: enumeration and an independent dynamic program used as
//!   ground truth.
//! * [`montecarlo`]: seeded simulation.
//! * [`netchain`]: color chains of line networks and parameter sweeps.
//! * [`crosscheck`]: the grid comparing all of the above.

pub mod crosscheck;
pub mod csvio;
pub mod error;
pub mod hitting;
pub mod kernel;
pub mod montecarlo;
pub mod netchain;
pub mod oracle;
pub mod params;
pub mod scalar;
pub mod transition;

pub use error::{Error, Result};
pub use hitting::{
    expected_max_run, hitting_table, run_length_distribution, run_length_profile, HittingTable,
    RunLengthDistribution, RunLengthProfile,
};
pub use kernel::{build_kernel, RunKernel};
pub use params::{AlphabetParams, Budget, RunState};
pub use scalar::{Exact, Scalar};
pub use transition::{build_transition_matrix, transition_row, TransitionMatrix};
