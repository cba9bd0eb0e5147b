//! Experiment drivers behind the command-line tool: configuration,
//! the six runs, and their CSV/JSON reports.

pub mod config;
pub mod output;
mod runs;

use std::fmt;

use thiserror::Error;

pub use config::{ConfigError, ConfigLayer, Experiment, ExperimentConfig, OutputFormat, Reals};
pub use runs::{
    run_coupling, run_predict, run_sweep, run_validate_lattice, run_verify_cardy, run_violation,
    verify_tolerance, RESULT_COLUMNS,
};

use crate::domain::DomainError;
use crate::engine::EngineError;
use crate::lattice::LatticeError;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("domain: {0}")]
    Domain(#[from] DomainError),
    #[error("lattice: {0}")]
    Lattice(#[from] LatticeError),
    #[error("{0}")]
    Precondition(EngineError),
    #[error("{0}")]
    Engine(EngineError),
}

impl From<EngineError> for RunError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::CouplingMismatch { .. } => RunError::Precondition(e),
            other => RunError::Engine(other),
        }
    }
}

impl RunError {
    /// 2 for anything a corrected configuration would fix, 3 for a failed
    /// coupling precondition.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Precondition(_) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    ConfirmsViolation,
    NoViolation,
    Exploratory,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::ConfirmsViolation => "CONFIRMS-VIOLATION",
            Verdict::NoViolation => "NO-VIOLATION",
            Verdict::Exploratory => "EXPLORATORY",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Str(String),
    Int(u64),
    Float(f64),
    Bool(bool),
    Empty,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub experiment: Experiment,
    pub provenance: Vec<(String, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub verdict: Verdict,
    /// Whether the verdict is the expected outcome (exit status 0).
    pub success: bool,
    pub notes: Vec<String>,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.success {
            0
        } else {
            4
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => output::to_csv(self),
            OutputFormat::Json => output::to_json(self),
        }
    }

    /// Index of a named column.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    match cfg.experiment {
        Experiment::VerifyCardy => run_verify_cardy(cfg),
        Experiment::Coupling => run_coupling(cfg),
        Experiment::Violation => run_violation(cfg),
        Experiment::Sweep => run_sweep(cfg),
        Experiment::Predict => run_predict(cfg),
        Experiment::ValidateLattice => run_validate_lattice(cfg),
    }
}
