//! CSV-in, report-out front end for the leverage diagnostics in
//! `leverage-core`. The `levdiag` binary is a thin wrapper around
//! [`run_diagnostics`] and [`emit`].

pub mod config;
pub mod emit;
pub mod error;
pub mod ingest;
pub mod report;

pub use config::{Decompositions, OutputFormat, RunConfig};
pub use emit::{emit, emit_json, emit_text};
pub use error::CliError;
pub use ingest::{ingest_csv, ingest_reader, Ingested, Response};
pub use report::{analyze, run_diagnostics, DiagnosticsReport, CONDITION_WARNING};
