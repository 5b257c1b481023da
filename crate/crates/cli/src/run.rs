//! Batch execution. Each configuration is explored and checked in turn, and
//! every failed check leaves a trace file behind.

use std::fs;
use std::path::{Path, PathBuf};

use dhccp_core::checker::{parse_formula, CheckError, Checker, Counterexample, FairnessSpec, Formula};
use dhccp_core::dhccp::{build_system, Config, ConfigError, Protocol};
use dhccp_core::explorer::{explore, ExploreError, ExploreOptions, SearchOrder, ShortestPaths, StateGraph};
use log::info;
use thiserror::Error;

use crate::render::{render_lasso, render_report, render_trace, RenderError, Row};
use crate::spec::{CheckKind, RunSpec};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_CAPPED: u8 = 2;
pub const EXIT_VIOLATION: u8 = 3;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Explore(#[from] ExploreError),
    #[error("{config}: {source}")]
    Check { config: String, source: CheckError },
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

/// One line of `verdicts.tsv`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictLine {
    pub config: String,
    pub check: String,
    pub passed: bool,
    pub detail: String,
    pub trace: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub rows: Vec<Row>,
    pub verdicts: Vec<VerdictLine>,
    pub exit: u8,
}

impl Outcome {
    pub fn report(&self) -> String {
        render_report(&self.rows)
    }
}

fn write(path: &Path, text: &str) -> Result<(), RunError> {
    fs::write(path, text).map_err(|source| RunError::Io { path: path.to_path_buf(), source })
}

struct Session<'a> {
    spec: &'a RunSpec,
    protocol: &'a Protocol,
    graph: &'a StateGraph,
    tag: String,
    lines: Vec<VerdictLine>,
}

impl Session<'_> {
    fn checker(&self) -> Checker<'_> {
        Checker::new(self.graph, self.protocol.model(), self.protocol)
    }

    fn err(&self, source: CheckError) -> RunError {
        RunError::Check { config: self.tag.clone(), source }
    }

    fn save(&self, kind: &str, n: usize, text: &str) -> Result<String, RunError> {
        let name = format!("trace-{}-{kind}-{n}.txt", self.tag);
        write(&self.spec.out.join(&name), text)?;
        Ok(name)
    }

    fn record(&mut self, check: &str, passed: bool, detail: String, trace: Option<String>) -> bool {
        self.lines.push(VerdictLine { config: self.tag.clone(), check: check.into(), passed, detail, trace });
        passed
    }

    fn deadlock(&mut self) -> Result<bool, RunError> {
        let dl = self.graph.deadlocks();
        if dl.is_empty() {
            return Ok(self.record("deadlock", true, "no deadlock".into(), None));
        }
        let sp = ShortestPaths::new(self.graph);
        let first = *dl.iter().min_by_key(|&&s| (sp.depth(s), s)).expect("nonempty");
        let trace = sp.trace(self.graph, first)?;
        let name = self.save("deadlock", 0, &render_trace(self.protocol, &trace, self.spec.trace_format)?)?;
        let detail = format!("{} deadlocks, shortest at depth {}", dl.len(), trace.len());
        Ok(self.record("deadlock", false, detail, Some(name)))
    }

    /// Runs `f`; on failure writes its counterexample as `kind`-`n`.
    fn property(&mut self, check: &str, f: &Formula, kind: &str, n: usize) -> Result<bool, RunError> {
        let v = self.checker().check(f).map_err(|e| self.err(e))?;
        let trace = match &v.counterexample {
            Some(Counterexample::Trace(t)) => {
                Some(self.save(kind, n, &render_trace(self.protocol, t, self.spec.trace_format)?)?)
            }
            Some(Counterexample::Lasso(l)) => {
                Some(self.save(kind, n, &render_lasso(self.protocol, l, self.spec.trace_format)?)?)
            }
            None => None,
        };
        let detail = match &v.counterexample {
            _ if v.holds => format!("{f}: holds"),
            Some(Counterexample::Trace(t)) => format!("{f}: violated, {}-step counterexample", t.len()),
            Some(Counterexample::Lasso(l)) => {
                format!("{f}: violated, lasso with {}-step stem and {}-step cycle", l.stem.len(), l.cycle.len())
            }
            None => format!("{f}: violated at the initial state"),
        };
        Ok(self.record(check, v.holds, detail, trace))
    }

    fn fair_response(&mut self, k: usize, fairness: &FairnessSpec) -> Result<bool, RunError> {
        let req = parse_formula(&format!("req_rd({k})")).expect("well-formed");
        let resp = parse_formula(&format!("rsp_rd({k})")).expect("well-formed");
        let v = self.checker().check_response_liveness(&req, &resp, fairness).map_err(|e| self.err(e))?;
        let trace = match &v.lasso {
            Some(l) => Some(self.save("liveness", k, &render_lasso(self.protocol, l, self.spec.trace_format)?)?),
            None => None,
        };
        let detail = if v.holds {
            format!("read of processor {k} always answered under weak fairness")
        } else {
            format!("read of processor {k} starves on a fair cycle ({} pending states)", v.pending_states)
        };
        Ok(self.record(&format!("liveness({k})"), v.holds, detail, trace))
    }

    fn run(&mut self, kind: CheckKind) -> Result<bool, RunError> {
        let p = self.protocol.config().nb_proc;
        match kind {
            CheckKind::Deadlock => self.deadlock(),
            CheckKind::Invariants => {
                let mut ok = true;
                for (kind, text) in [
                    ("census", "quiescent -> census_ok"),
                    ("structural", "structural_ok"),
                    ("directory", "quiescent -> directory_ok"),
                ] {
                    ok &= self.property(kind, &parse_formula(text).expect("well-formed"), kind, 0)?;
                }
                Ok(ok)
            }
            CheckKind::Coherence => {
                let mut ok = true;
                let mut n = 0;
                for i in 0..p {
                    for j in (0..p).filter(|&j| j != i) {
                        let text = format!("AG(shared_and_write({i},{j}) -> AF coherence_delivery({j}))");
                        ok &= self.property(
                            &format!("coherence({i},{j})"),
                            &parse_formula(&text).unwrap(),
                            "coherence",
                            n,
                        )?;
                        n += 1;
                    }
                }
                Ok(ok)
            }
            CheckKind::Liveness => {
                let fairness = self.protocol.fairness();
                let mut ok = true;
                for k in 0..p {
                    ok &= self.fair_response(k, &fairness)?;
                }
                Ok(ok)
            }
        }
    }
}

fn run_one(spec: &RunSpec, cfg: &Config) -> Result<(Row, Vec<VerdictLine>), RunError> {
    let protocol = build_system(cfg)?;
    let tag = cfg.tag();
    info!("exploring {tag}");
    let options = ExploreOptions {
        max_states: spec.max_states,
        max_seconds: spec.max_seconds,
        order: if spec.dfs { SearchOrder::Dfs } else { SearchOrder::Bfs },
        workers: spec.workers,
    };
    let graph = explore(protocol.model(), &options)?;
    let stats = graph.stats().clone();
    info!("{tag}: {} states, {} edges in {:.2} s", stats.states, stats.edges, stats.seconds);
    if spec.export_graph {
        write(&spec.out.join(format!("graph-{tag}.tsv")), &graph.export_adjacency(protocol.model()))?;
    }
    let mut row = Row {
        nb_proc: cfg.nb_proc,
        nb_l2: cfg.nb_l2,
        cache_th: cfg.cache_th,
        states: stats.states,
        edges: stats.edges,
        deadlocks: stats.deadlocks,
        seconds: stats.seconds,
        mem_mb: stats.mem_mb,
        capped: !graph.is_complete(),
        verdicts: Vec::new(),
    };
    if row.capped {
        let line = VerdictLine { config: tag, check: "*".into(), passed: false, detail: "CAPPED".into(), trace: None };
        return Ok((row, vec![line]));
    }
    let mut s = Session { spec, protocol: &protocol, graph: &graph, tag, lines: Vec::new() };
    for &kind in &spec.checks {
        let ok = s.run(kind)?;
        row.verdicts.push((kind.name().to_string(), ok));
    }
    for (i, (_, f)) in spec.properties.iter().enumerate() {
        let name = format!("p{}", i + 1);
        let ok = s.property(&name, f, &name, 0)?;
        row.verdicts.push((name, ok));
    }
    Ok((row, s.lines))
}

/// Runs every configuration and writes `report.tsv`, `verdicts.tsv` and
/// trace files under `spec.out`.
pub fn run(spec: &RunSpec) -> Result<Outcome, RunError> {
    fs::create_dir_all(&spec.out).map_err(|source| RunError::Io { path: spec.out.clone(), source })?;
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for cfg in &spec.configs {
        let (row, lines) = run_one(spec, cfg)?;
        rows.push(row);
        verdicts.extend(lines);
    }
    let violated = rows.iter().any(|r| r.verdicts.iter().any(|(_, ok)| !ok));
    let capped = rows.iter().any(|r| r.capped);
    let exit = match (violated, capped) {
        (true, _) => EXIT_VIOLATION,
        (false, true) => EXIT_CAPPED,
        _ => EXIT_OK,
    };
    let outcome = Outcome { rows, verdicts, exit };
    write(&spec.out.join("report.tsv"), &outcome.report())?;
    let mut tsv = String::from("config\tcheck\tverdict\tdetail\ttrace\n");
    for v in &outcome.verdicts {
        let verdict = if v.detail == "CAPPED" {
            "capped"
        } else if v.passed {
            "pass"
        } else {
            "fail"
        };
        tsv.push_str(&format!(
            "{}\t{}\t{verdict}\t{}\t{}\n",
            v.config,
            v.check,
            v.detail,
            v.trace.as_deref().unwrap_or("-")
        ));
    }
    write(&spec.out.join("verdicts.tsv"), &tsv)?;
    Ok(outcome)
}
