//! Experiment harness: bundled fixtures, the sweep runner, and CSV
//! summaries backing the `ots` command-line tool.

pub mod experiment;
pub mod fixtures;
pub mod summary;
pub mod verify;

use thiserror::Error;

pub use experiment::{run, ExperimentSpec, RunRecord, CSV_HEADER};
pub use fixtures::{make_fixture, write_fixture, FIXTURE_NAMES};
pub use summary::{format_summary, summarize, SummaryRow};
pub use verify::{verify_connectedness_oracles, VerifyReport, MAX_EXHAUSTIVE_EDGES};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("unknown fixture `{0}` (expected one of fig1, cycle3, bridge2, nis-demo)")]
    UnknownFixture(String),
    #[error("invalid experiment spec: {0}")]
    BadSpec(String),
    #[error("{0}")]
    TooLarge(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error(transparent)]
    Case(#[from] ots_core::CaseError),
    #[error(transparent)]
    Model(#[from] ots_core::ModelError),
    #[error(transparent)]
    Solver(#[from] ots_core::SolverError),
    #[error(transparent)]
    Graph(#[from] ots_core::GraphError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}
