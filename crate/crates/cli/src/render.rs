//! Sequence-chart rendering of traces and the TSV report.

use std::fmt::Write as _;

use dhccp_core::checker::Lasso;
use dhccp_core::dhccp::{Endpoint, Pending, Protocol};
use dhccp_core::explorer::{Trace, TraceStep};
use dhccp_core::kernel::StateVector;
use thiserror::Error;

use crate::spec::TraceFormat;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RenderError {
    #[error("trace does not replay against the model at step {0}")]
    Mismatch(usize),
}

/// One message, drawn when it is written into its channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrow {
    pub step: usize,
    pub src: String,
    pub dst: String,
    pub message: String,
    pub addr: i32,
    pub id: Option<i32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Item {
    Arrow(Arrow),
    Note { step: usize, lane: String, text: String },
    LoopStart,
    LoopEnd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceDiagram {
    pub lanes: Vec<String>,
    pub items: Vec<Item>,
}

impl SequenceDiagram {
    pub fn arrows(&self) -> impl Iterator<Item = &Arrow> {
        self.items.iter().filter_map(|i| match i {
            Item::Arrow(a) => Some(a),
            _ => None,
        })
    }
}

fn lanes(pr: &Protocol) -> Vec<String> {
    let cfg = pr.config();
    let mut out: Vec<String> = (0..cfg.nb_proc).map(|j| format!("P{j}")).collect();
    out.extend((0..cfg.nb_proc).map(|j| format!("L1_{j}")));
    out.extend((0..cfg.nb_l2).map(|a| format!("L2_{a}")));
    out.push("MEM".into());
    out
}

fn lane(end: Endpoint, m: &Pending) -> String {
    match end {
        Endpoint::Processor => format!("P{}", m.cpu.unwrap_or(0)),
        Endpoint::L1 => format!("L1_{}", m.cpu.unwrap_or_else(|| m.id.unwrap_or(0) as usize)),
        Endpoint::L2 => format!("L2_{}", m.addr),
        Endpoint::Memory => "MEM".into(),
    }
}

/// Lane of a component instance path, `None` for channels.
fn lane_of_instance(path: &str) -> Option<String> {
    let index = |p: &str| p.split(['[', ']']).nth(1).map(str::to_string);
    if path == "mem" {
        Some("MEM".into())
    } else if let Some(rest) = path.strip_prefix("l2[") {
        (!path.contains('.')).then(|| format!("L2_{}", rest.trim_end_matches(']')))
    } else if path.starts_with("cpu[") && path.ends_with(".p") {
        index(path).map(|j| format!("P{j}"))
    } else if path.starts_with("cpu[") && path.ends_with(".c") {
        index(path).map(|j| format!("L1_{j}"))
    } else {
        None
    }
}

fn step_items(pr: &Protocol, n: usize, prev: &StateVector, step: &TraceStep, out: &mut Vec<Item>) {
    let layout = pr.layout();
    let before = layout.pending(prev.as_slice());
    let written: Vec<Pending> =
        layout.pending(step.state.as_slice()).into_iter().filter(|m| !before.contains(m)).collect();
    for m in &written {
        let (src, dst) = m.chan.endpoints();
        out.push(Item::Arrow(Arrow {
            step: n,
            src: lane(src, m),
            dst: lane(dst, m),
            message: m.kind.map_or_else(|| format!("#{}", m.code), |k| k.name().to_string()),
            addr: m.addr,
            id: m.id,
        }));
    }
    if written.is_empty() {
        let m = pr.model();
        let changed = (0..prev.len()).filter(|&v| prev.get(v) != step.state.get(v));
        let mut owner = changed.filter_map(|v| lane_of_instance(&m.instance_path(m.vars()[v].instance)));
        let lane = owner.next().unwrap_or_else(|| lanes(pr)[0].clone());
        out.push(Item::Note { step: n, lane, text: m.event_name(&step.event) });
    }
}

fn final_notes(pr: &Protocol, last: &StateVector, step: usize, out: &mut Vec<Item>) {
    let layout = pr.layout();
    let stuck = pr.model().successors(last).map(|s| s.is_empty()).unwrap_or(false);
    for a in 0..pr.config().nb_l2 {
        let (copies, census) = (layout.n_copies(last.as_slice(), a), layout.sharer_census(last.as_slice(), a));
        let mut text = format!("n_copies={copies} census={census}");
        if copies != census as i32 {
            text.push_str(" mismatch");
        }
        if stuck {
            text.push_str(" deadlock");
        }
        out.push(Item::Note { step, lane: format!("L2_{a}"), text });
    }
}

fn check_replay(pr: &Protocol, initial: &StateVector, steps: &[TraceStep], offset: usize) -> Result<(), RenderError> {
    let mut cur = initial.clone();
    for (i, s) in steps.iter().enumerate() {
        match pr.model().fire(&cur, &s.event) {
            Ok(next) if next == s.state => cur = next,
            _ => return Err(RenderError::Mismatch(offset + i + 1)),
        }
    }
    Ok(())
}

fn push_steps(pr: &Protocol, start: &StateVector, steps: &[TraceStep], offset: usize, items: &mut Vec<Item>) {
    let mut prev = start;
    for (i, s) in steps.iter().enumerate() {
        step_items(pr, offset + i + 1, prev, s, items);
        prev = &s.state;
    }
}

fn stem_diagram(pr: &Protocol, trace: &Trace, with_final: bool) -> Result<SequenceDiagram, RenderError> {
    check_replay(pr, &trace.initial, &trace.steps, 0)?;
    let mut items = Vec::new();
    push_steps(pr, &trace.initial, &trace.steps, 0, &mut items);
    if with_final && !trace.is_empty() {
        final_notes(pr, trace.last_state(), trace.len(), &mut items);
    }
    Ok(SequenceDiagram { lanes: lanes(pr), items })
}

/// Arrows for every message written along the trace, internal events as notes,
/// and a closing note per L2 comparing its copy counter with the actual sharers.
pub fn trace_diagram(pr: &Protocol, trace: &Trace) -> Result<SequenceDiagram, RenderError> {
    stem_diagram(pr, trace, true)
}

/// The stem as in [`trace_diagram`], then the cycle inside a loop block.
pub fn lasso_diagram(pr: &Protocol, lasso: &Lasso) -> Result<SequenceDiagram, RenderError> {
    let mut d = stem_diagram(pr, &lasso.stem, false)?;
    let last = lasso.stem.steps.last().map_or(&lasso.stem.initial, |s| &s.state);
    check_replay(pr, last, &lasso.cycle, lasso.stem.len())?;
    d.items.push(Item::Note {
        step: lasso.stem.len(),
        lane: d.lanes[0].clone(),
        text: format!("request pending from step {}, never answered", lasso.pending_from),
    });
    d.items.push(Item::LoopStart);
    push_steps(pr, last, &lasso.cycle, lasso.stem.len(), &mut d.items);
    d.items.push(Item::LoopEnd);
    Ok(d)
}

fn label(a: &Arrow) -> String {
    match a.id {
        Some(id) => format!("{}({},{id})", a.message, a.addr),
        None => format!("{}({})", a.message, a.addr),
    }
}

pub fn render(d: &SequenceDiagram, format: TraceFormat) -> String {
    let mut out = String::new();
    match format {
        TraceFormat::Text => {
            for item in &d.items {
                let _ = match item {
                    Item::Arrow(a) => writeln!(out, "step {}: {} -> {} : {}", a.step, a.src, a.dst, label(a)),
                    Item::Note { step, lane, text } => writeln!(out, "note {step}: {lane} : {text}"),
                    Item::LoopStart => writeln!(out, "loop:"),
                    Item::LoopEnd => writeln!(out, "end loop"),
                };
            }
        }
        TraceFormat::Mermaid => {
            out.push_str("sequenceDiagram\n");
            for l in &d.lanes {
                let _ = writeln!(out, "    participant {l}");
            }
            for item in &d.items {
                let _ = match item {
                    Item::Arrow(a) => writeln!(out, "    {}->>{}: {} {}", a.src, a.dst, a.step, label(a)),
                    Item::Note { step, lane, text } => writeln!(out, "    Note over {lane}: {step} {text}"),
                    Item::LoopStart => writeln!(out, "    loop forever"),
                    Item::LoopEnd => writeln!(out, "    end"),
                };
            }
        }
    }
    out
}

pub fn render_trace(pr: &Protocol, trace: &Trace, format: TraceFormat) -> Result<String, RenderError> {
    Ok(render(&trace_diagram(pr, trace)?, format))
}

pub fn render_lasso(pr: &Protocol, lasso: &Lasso, format: TraceFormat) -> Result<String, RenderError> {
    Ok(render(&lasso_diagram(pr, lasso)?, format))
}

/// One report row.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub nb_proc: usize,
    pub nb_l2: usize,
    pub cache_th: usize,
    pub states: usize,
    pub edges: usize,
    pub deadlocks: usize,
    pub seconds: f64,
    pub mem_mb: f64,
    pub capped: bool,
    /// `(check, passed)` pairs in run order.
    pub verdicts: Vec<(String, bool)>,
}

pub const REPORT_HEADER: &str = "PROC\tL2\tTH\tStates\tEdges\tDeadlocks\tTime_s\tMem_MB\tVerdicts";

pub fn render_report(rows: &[Row]) -> String {
    let mut rows: Vec<&Row> = rows.iter().collect();
    rows.sort_by_key(|r| (r.nb_proc, r.nb_l2, r.cache_th));
    let mut out = format!("{REPORT_HEADER}\n");
    for r in rows {
        let plus = if r.capped { "+" } else { "" };
        let verdicts = if r.capped {
            "CAPPED".to_string()
        } else if r.verdicts.is_empty() {
            "-".to_string()
        } else {
            r.verdicts
                .iter()
                .map(|(c, ok)| format!("{c}={}", if *ok { "ok" } else { "FAIL" }))
                .collect::<Vec<_>>()
                .join(",")
        };
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}{plus}\t{}\t{}\t{:.3}\t{:.1}\t{verdicts}",
            r.nb_proc, r.nb_l2, r.cache_th, r.states, r.edges, r.deadlocks, r.seconds, r.mem_mb
        );
    }
    out
}
