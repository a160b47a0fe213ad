//! Harness around [`dynamic_resistance::ErEngine`]: replays update streams,
//! compares answers against the dense oracle, writes JSON-lines reports,
//! and generates synthetic workloads.

pub mod generate;
pub mod report;
pub mod runner;

use dynamic_resistance::engine::EngineError;
use dynamic_resistance::io::ParseError;
use dynamic_resistance::SchurError;
use thiserror::Error;

pub use generate::{generate, GenKind, GenSpec};
pub use report::{Record, RunReport, Summary};
pub use runner::{cmd_sketch, run_stream, validate_stream, Oracle, RunConfig};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{file}: {source}")]
    Parse {
        file: String,
        #[source]
        source: ParseError,
    },
    #[error("stream line {line}: {message}")]
    StreamInvalid { line: usize, message: String },
    #[error("infeasible generator parameters: {0}")]
    InfeasibleParams(String),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Schur(#[from] SchurError),
}
