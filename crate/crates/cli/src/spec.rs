//! Command-line arguments and the validated run specification.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use dhccp_core::checker::{parse_property_file, Formula};
use dhccp_core::dhccp::{Config, Variant};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("bad value list `{0}`: expected comma-separated integers or A..B ranges")]
    BadList(String),
    #[error("no configuration to run")]
    NoConfiguration,
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("configuration ({0},{1},{2}): {3}")]
    Config(usize, usize, usize, dhccp_core::dhccp::ConfigError),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {error}")]
    Property { path: PathBuf, line: usize, error: dhccp_core::checker::ParseError },
}

/// Comma-separated integers and inclusive `A..B` ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValueList(pub Vec<usize>);

impl FromStr for ValueList {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        let bad = || SpecError::BadList(s.to_string());
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim) {
            match part.split_once("..") {
                Some((a, b)) => {
                    let (a, b): (usize, usize) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
                    if a > b {
                        return Err(bad());
                    }
                    out.extend(a..=b);
                }
                None => out.push(part.parse().map_err(|_| bad())?),
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(ValueList(out))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum CheckKind {
    /// Reachable states without successors.
    Deadlock,
    /// The quiescent census invariant plus structural and directory consistency.
    Invariants,
    /// Every coherence request to a sharer is eventually delivered.
    Coherence,
    /// Every processor read gets its response, under weak fairness.
    Liveness,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Deadlock => "deadlock",
            CheckKind::Invariants => "invariants",
            CheckKind::Coherence => "coherence",
            CheckKind::Liveness => "liveness",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum TraceFormat {
    #[default]
    Text,
    Mermaid,
}

#[derive(Debug, Parser)]
#[command(name = "dhccp", version, about = "Explicit-state verification of the TSAR DHCCP cache coherence protocol")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    /// Processor counts, e.g. `1,2` or `1..3`.
    #[arg(long = "proc", default_value = "1")]
    pub nb_proc: ValueList,
    /// L2 bank (and line) counts.
    #[arg(long = "l2", default_value = "1")]
    pub nb_l2: ValueList,
    /// Sharer-list thresholds.
    #[arg(long = "th", default_value = "1")]
    pub cache_th: ValueList,
    #[arg(long, default_value = "fixed")]
    pub variant: Variant,
    /// Let L2 lines be evicted and refetched.
    #[arg(long)]
    pub l2_eviction: bool,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "deadlock")]
    pub check: Vec<CheckKind>,
    /// File with one CTL formula per line.
    #[arg(long, value_name = "FILE")]
    pub props: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000_000)]
    pub max_states: usize,
    #[arg(long)]
    pub max_seconds: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    pub trace_format: TraceFormat,
    /// Output directory for reports and traces.
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Also write the state graph as `src<TAB>event<TAB>dst`.
    #[arg(long)]
    pub export_graph: bool,
    /// Threads for breadth-first expansion.
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Depth-first instead of breadth-first search.
    #[arg(long)]
    pub dfs: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the message code table as TSV.
    MessageTable,
}

/// A validated batch of runs.
#[derive(Debug, Clone)]
pub struct RunSpec {
    /// Sorted by (nb_proc, nb_l2, cache_th).
    pub configs: Vec<Config>,
    pub checks: Vec<CheckKind>,
    pub properties: Vec<(String, Formula)>,
    pub max_states: usize,
    pub max_seconds: Option<f64>,
    pub trace_format: TraceFormat,
    pub out: PathBuf,
    pub export_graph: bool,
    pub workers: usize,
    pub dfs: bool,
}

impl RunSpec {
    pub fn from_cli(cli: &Cli) -> Result<Self, SpecError> {
        let mut configs = Vec::new();
        for &p in &cli.nb_proc.0 {
            for &a in &cli.nb_l2.0 {
                for &t in &cli.cache_th.0 {
                    let mut cfg = Config::new(p, a, t).with_eviction(cli.l2_eviction);
                    cfg.variant = cli.variant;
                    cfg.validate().map_err(|e| SpecError::Config(p, a, t, e))?;
                    configs.push(cfg);
                }
            }
        }
        if configs.is_empty() {
            return Err(SpecError::NoConfiguration);
        }
        if cli.max_states == 0 {
            return Err(SpecError::NotPositive("--max-states"));
        }
        if cli.max_seconds.is_some_and(|s| s.is_nan() || s <= 0.0) {
            return Err(SpecError::NotPositive("--max-seconds"));
        }
        let properties = match &cli.props {
            None => Vec::new(),
            Some(path) => {
                let text =
                    std::fs::read_to_string(path).map_err(|source| SpecError::Io { path: path.clone(), source })?;
                parse_property_file(&text).map_err(|(line, error)| SpecError::Property {
                    path: path.clone(),
                    line,
                    error,
                })?
            }
        };
        let mut checks = cli.check.clone();
        checks.sort_unstable();
        checks.dedup();
        Ok(RunSpec {
            configs,
            checks,
            properties,
            max_states: cli.max_states,
            max_seconds: cli.max_seconds,
            trace_format: cli.trace_format,
            out: cli.out.clone(),
            export_graph: cli.export_graph,
            workers: cli.workers.max(1),
            dfs: cli.dfs,
        })
    }
}
