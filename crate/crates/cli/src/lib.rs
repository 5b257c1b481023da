//! Command-line front end: batches of protocol configurations, checks,
//! TSV reports and sequence-chart traces.

pub mod render;
pub mod run;
pub mod spec;

pub use render::{render_lasso, render_report, render_trace, trace_diagram, Row, SequenceDiagram};
pub use run::{run, Outcome, RunError, EXIT_CAPPED, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION};
pub use spec::{CheckKind, Cli, Command, RunSpec, SpecError, TraceFormat};
