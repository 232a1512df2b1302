//! Experiment harness for the news-race laboratory: textual model grammars,
//! config files, reproducible Monte Carlo sweeps and fixed-schema CSV output.
//!
//! The algorithmic core lives in [`newsrace_core`]; this crate owns
//! everything that touches the outside world (parsing, files, threads, the
//! CLI) and guarantees that a sweep's CSV bytes depend only on the config
//! and master seed, never on the worker count.

pub mod config;
pub mod csv;
pub mod dump;
pub mod grammar;
pub mod harness;

pub use config::{ExperimentConfig, ExperimentKind};
pub use csv::{emit_csv, CsvValue, RecordRow};
pub use harness::{
    estimate_intermediate_exponent, run_graph_sweep, run_tau_tail, run_theory_table,
    run_tree_sweep, survival_fraction_count, survival_fraction_eta, GraphRow,
};

/// Errors surfaced by the harness; each maps to a process exit code.
#[derive(Debug)]
pub enum HarnessError {
    /// Unparseable or inconsistent configuration (exit code 2).
    Config(String),
    /// Filesystem failure (exit code 3).
    Io(std::io::Error),
    /// A regression was requested on insufficient data (exit code 2).
    InsufficientData(String),
}

impl std::fmt::Display for HarnessError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HarnessError::Config(msg) => write!(f, "config error: {msg}"),
            HarnessError::Io(e) => write!(f, "io error: {e}"),
            HarnessError::InsufficientData(msg) => write!(f, "insufficient data: {msg}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e)
    }
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::InsufficientData(_) => 2,
            HarnessError::Io(_) => 3,
        }
    }
}
