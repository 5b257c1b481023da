//! Exhaustive explicit-state exploration.
//!
//! States are stored in full (losslessly packed) so every count is exact.
//! Events are enumerated in grounded-table order, which makes graphs
//! reproducible run to run; the parallel breadth-first mode expands each
//! layer concurrently but inserts results sequentially, so it yields the
//! same graph as the single-threaded mode.

use std::collections::VecDeque;
use std::time::Instant;

use indexmap::IndexSet;
use log::warn;
use rayon::prelude::*;
use thiserror::Error;

use crate::kernel::{Event, KernelError, StateVector, SystemModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchOrder {
    #[default]
    Bfs,
    Dfs,
}

#[derive(Debug, Clone)]
pub struct ExploreOptions {
    pub max_states: usize,
    pub max_seconds: Option<f64>,
    pub order: SearchOrder,
    /// Worker threads for breadth-first expansion; 0 or 1 is single-threaded.
    pub workers: usize,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions { max_states: 100_000_000, max_seconds: None, order: SearchOrder::Bfs, workers: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CapReason {
    States(usize),
    Seconds(f64),
}

#[derive(Debug, Clone, Default)]
pub struct ExploreStats {
    pub states: usize,
    pub edges: usize,
    pub deadlocks: usize,
    pub seconds: f64,
    pub mem_mb: f64,
}

#[derive(Debug, Error)]
pub enum ExploreError {
    #[error("while expanding state #{state}: {source}")]
    Kernel {
        state: u32,
        #[source]
        source: KernelError,
    },
    #[error("state #{0} is not in the graph")]
    NoSuchState(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub event: u32,
    pub dst: u32,
}

/// Lossless fixed-width packing of state vectors.
#[derive(Debug, Clone)]
struct Codec {
    lo: Vec<i32>,
    bytes: usize,
}

impl Codec {
    fn new(model: &SystemModel) -> Self {
        let span = model.vars().iter().map(|v| (v.hi as i64 - v.lo as i64) as u64).max().unwrap_or(0);
        let bytes = if span < 1 << 8 {
            1
        } else if span < 1 << 16 {
            2
        } else {
            4
        };
        Codec { lo: model.vars().iter().map(|v| v.lo).collect(), bytes }
    }

    fn encode(&self, s: &[i32]) -> Box<[u8]> {
        let mut out = Vec::with_capacity(s.len() * self.bytes);
        for (x, lo) in s.iter().zip(&self.lo) {
            let d = (*x as i64 - *lo as i64) as u32;
            out.extend_from_slice(&d.to_le_bytes()[..self.bytes]);
        }
        out.into_boxed_slice()
    }

    fn decode(&self, b: &[u8]) -> Vec<i32> {
        b.chunks(self.bytes)
            .zip(&self.lo)
            .map(|(c, lo)| {
                let mut w = [0u8; 4];
                w[..self.bytes].copy_from_slice(c);
                (u32::from_le_bytes(w) as i64 + *lo as i64) as i32
            })
            .collect()
    }
}

/// The explored reachability graph. State 0 is the initial state.
#[derive(Debug, Clone)]
pub struct StateGraph {
    codec: Codec,
    store: IndexSet<Box<[u8]>>,
    offsets: Vec<usize>,
    edges: Vec<Edge>,
    events: IndexSet<Event>,
    expanded: Vec<bool>,
    deadlocks: Vec<u32>,
    capped: Option<CapReason>,
    stats: ExploreStats,
}

impl StateGraph {
    pub fn num_states(&self) -> usize {
        self.store.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn initial(&self) -> u32 {
        0
    }

    pub fn state(&self, index: u32) -> StateVector {
        StateVector::new(self.codec.decode(&self.store[index as usize]))
    }

    pub fn index_of(&self, state: &StateVector) -> Option<u32> {
        self.store.get_index_of(&self.codec.encode(state)).map(|i| i as u32)
    }

    pub fn edges(&self, index: u32) -> &[Edge] {
        &self.edges[self.offsets[index as usize]..self.offsets[index as usize + 1]]
    }

    pub fn event(&self, id: u32) -> &Event {
        &self.events[id as usize]
    }

    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    /// Whether the successors of this state were computed.
    pub fn is_expanded(&self, index: u32) -> bool {
        self.expanded[index as usize]
    }

    pub fn deadlocks(&self) -> &[u32] {
        &self.deadlocks
    }

    pub fn capped(&self) -> Option<CapReason> {
        self.capped
    }

    pub fn is_complete(&self) -> bool {
        self.capped.is_none()
    }

    pub fn stats(&self) -> &ExploreStats {
        &self.stats
    }

    /// Decoded states in index order.
    pub fn states(&self) -> impl Iterator<Item = StateVector> + '_ {
        self.store.iter().map(|b| StateVector::new(self.codec.decode(b)))
    }

    /// Predecessor lists (deduplicated per source), built on demand.
    pub fn predecessors(&self) -> Vec<Vec<u32>> {
        let mut preds = vec![Vec::new(); self.num_states()];
        for s in 0..self.num_states() as u32 {
            for e in self.edges(s) {
                let p: &mut Vec<u32> = &mut preds[e.dst as usize];
                if p.last() != Some(&s) {
                    p.push(s);
                }
            }
        }
        preds
    }

    /// Adjacency export, one `src<TAB>event<TAB>dst` line per edge.
    pub fn export_adjacency(&self, model: &SystemModel) -> String {
        let mut out = String::new();
        for s in 0..self.num_states() as u32 {
            for e in self.edges(s) {
                out.push_str(&format!("{s}\t{}\t{}\n", model.event_name(self.event(e.event)), e.dst));
            }
        }
        out
    }
}

struct Builder<'m> {
    model: &'m SystemModel,
    codec: Codec,
    store: IndexSet<Box<[u8]>>,
    adjacency: Vec<Vec<Edge>>,
    events: IndexSet<Event>,
    expanded: Vec<bool>,
    capped: Option<CapReason>,
    max_states: usize,
}

impl Builder<'_> {
    /// Records the successors of `src`; returns newly discovered indices,
    /// or `None` when the state cap cut the expansion short.
    fn record(&mut self, src: u32, succ: Vec<(Event, StateVector)>, fresh: &mut Vec<u32>) -> bool {
        let mut edges = Vec::with_capacity(succ.len());
        for (ev, s) in succ {
            let key = self.codec.encode(&s);
            let dst = match self.store.get_index_of(&key) {
                Some(i) => i as u32,
                None => {
                    if self.store.len() >= self.max_states {
                        self.capped = Some(CapReason::States(self.max_states));
                        self.adjacency[src as usize] = edges;
                        return false;
                    }
                    let (i, _) = self.store.insert_full(key);
                    self.adjacency.push(Vec::new());
                    self.expanded.push(false);
                    fresh.push(i as u32);
                    i as u32
                }
            };
            let (event, _) = self.events.insert_full(ev);
            edges.push(Edge { event: event as u32, dst });
        }
        self.adjacency[src as usize] = edges;
        self.expanded[src as usize] = true;
        true
    }

    fn expand(&self, index: u32) -> Result<Vec<(Event, StateVector)>, ExploreError> {
        let s = self.codec.decode(&self.store[index as usize]);
        self.model.successors_of(&s).map_err(|source| ExploreError::Kernel { state: index, source })
    }
}

/// Breadth-first (default) or depth-first fixed point over `successors`.
/// Hitting a limit yields a partial graph flagged by [`StateGraph::capped`].
pub fn explore(model: &SystemModel, options: &ExploreOptions) -> Result<StateGraph, ExploreError> {
    let start = Instant::now();
    let codec = Codec::new(model);
    let mut b = Builder {
        model,
        store: IndexSet::new(),
        codec,
        adjacency: vec![Vec::new()],
        events: IndexSet::new(),
        expanded: vec![false],
        capped: None,
        max_states: options.max_states.max(1),
    };
    b.store.insert(b.codec.encode(&model.initial_state()));
    let out_of_time = |capped: &mut Option<CapReason>| {
        if let Some(limit) = options.max_seconds {
            if start.elapsed().as_secs_f64() > limit {
                *capped = Some(CapReason::Seconds(limit));
                return true;
            }
        }
        false
    };

    let mut fresh = Vec::new();
    match options.order {
        SearchOrder::Bfs if options.workers > 1 => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(options.workers).build().expect("thread pool");
            let mut layer: Vec<u32> = vec![0];
            'layers: while !layer.is_empty() {
                let mut next = Vec::new();
                for chunk in layer.chunks(4096) {
                    if out_of_time(&mut b.capped) {
                        break 'layers;
                    }
                    let results: Vec<_> = pool.install(|| chunk.par_iter().map(|&i| b.expand(i)).collect());
                    for (&i, r) in chunk.iter().zip(results) {
                        fresh.clear();
                        let ok = b.record(i, r?, &mut fresh);
                        next.extend_from_slice(&fresh);
                        if !ok {
                            break 'layers;
                        }
                    }
                }
                layer = next;
            }
        }
        SearchOrder::Bfs => {
            let mut queue = VecDeque::from([0u32]);
            while let Some(i) = queue.pop_front() {
                if out_of_time(&mut b.capped) {
                    break;
                }
                let succ = b.expand(i)?;
                fresh.clear();
                let ok = b.record(i, succ, &mut fresh);
                queue.extend(fresh.iter().copied());
                if !ok {
                    break;
                }
            }
        }
        SearchOrder::Dfs => {
            let mut stack = vec![0u32];
            while let Some(i) = stack.pop() {
                if out_of_time(&mut b.capped) {
                    break;
                }
                let succ = b.expand(i)?;
                fresh.clear();
                let ok = b.record(i, succ, &mut fresh);
                stack.extend(fresh.iter().rev().copied());
                if !ok {
                    break;
                }
            }
        }
    }

    let mut offsets = Vec::with_capacity(b.adjacency.len() + 1);
    let mut edges = Vec::with_capacity(b.adjacency.iter().map(Vec::len).sum());
    offsets.push(0);
    for adj in &b.adjacency {
        edges.extend_from_slice(adj);
        offsets.push(edges.len());
    }
    let deadlocks: Vec<u32> =
        (0..b.store.len()).filter(|&i| b.expanded[i] && offsets[i] == offsets[i + 1]).map(|i| i as u32).collect();
    let width = model.num_vars() * b.codec.bytes;
    let mem_bytes = b.store.len() * (width + 40)
        + edges.len() * std::mem::size_of::<Edge>()
        + offsets.len() * 8
        + b.events.len() * 48;
    let stats = ExploreStats {
        states: b.store.len(),
        edges: edges.len(),
        deadlocks: deadlocks.len(),
        seconds: start.elapsed().as_secs_f64(),
        mem_mb: mem_bytes as f64 / (1024.0 * 1024.0),
    };
    Ok(StateGraph {
        codec: b.codec,
        store: b.store,
        offsets,
        edges,
        events: b.events,
        expanded: b.expanded,
        deadlocks,
        capped: b.capped,
        stats,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeadlockReport {
    pub states: Vec<u32>,
    /// False when the graph was capped: absence of deadlock is then not established.
    pub complete: bool,
}

/// States with no outgoing edge.
pub fn find_deadlocks(graph: &StateGraph) -> DeadlockReport {
    if !graph.is_complete() {
        warn!("graph is partial ({:?}); deadlock freedom cannot be concluded", graph.capped());
    }
    DeadlockReport { states: graph.deadlocks().to_vec(), complete: graph.is_complete() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub event: Event,
    pub state: StateVector,
    pub index: u32,
}

/// A path from the initial state: each step is the event fired and the state reached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub initial: StateVector,
    pub steps: Vec<TraceStep>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last_state(&self) -> &StateVector {
        self.steps.last().map(|s| &s.state).unwrap_or(&self.initial)
    }

    /// All states along the trace, initial first.
    pub fn states(&self) -> impl Iterator<Item = &StateVector> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|s| &s.state))
    }

    /// Re-executes every step through the kernel and compares states.
    pub fn replays(&self, model: &SystemModel) -> bool {
        if self.initial != model.initial_state() {
            return false;
        }
        let mut cur = self.initial.clone();
        for step in &self.steps {
            match model.fire(&cur, &step.event) {
                Ok(next) if next == step.state => cur = next,
                _ => return false,
            }
        }
        true
    }
}

/// Breadth-first shortest-path tree from the initial state, following
/// edges in stored (canonical) order.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    parent: Vec<Option<(u32, u32)>>,
    depth: Vec<u32>,
}

pub const UNREACHED: u32 = u32::MAX;

impl ShortestPaths {
    pub fn new(graph: &StateGraph) -> Self {
        let n = graph.num_states();
        let mut parent = vec![None; n];
        let mut depth = vec![UNREACHED; n];
        if n == 0 {
            return ShortestPaths { parent, depth };
        }
        depth[0] = 0;
        let mut queue = VecDeque::from([0u32]);
        while let Some(s) = queue.pop_front() {
            for e in graph.edges(s) {
                if depth[e.dst as usize] == UNREACHED {
                    depth[e.dst as usize] = depth[s as usize] + 1;
                    parent[e.dst as usize] = Some((s, e.event));
                    queue.push_back(e.dst);
                }
            }
        }
        ShortestPaths { parent, depth }
    }

    pub fn depth(&self, index: u32) -> u32 {
        self.depth[index as usize]
    }

    pub fn trace(&self, graph: &StateGraph, target: u32) -> Result<Trace, ExploreError> {
        if target as usize >= graph.num_states() || self.depth[target as usize] == UNREACHED {
            return Err(ExploreError::NoSuchState(target));
        }
        let mut rev = Vec::new();
        let mut cur = target;
        while let Some((p, ev)) = self.parent[cur as usize] {
            rev.push((ev, cur));
            cur = p;
        }
        let steps = rev
            .into_iter()
            .rev()
            .map(|(ev, idx)| TraceStep { event: graph.event(ev).clone(), state: graph.state(idx), index: idx })
            .collect();
        Ok(Trace { initial: graph.state(0), steps })
    }
}

/// Shortest trace from the initial state to `target`.
pub fn trace_to(graph: &StateGraph, target: u32) -> Result<Trace, ExploreError> {
    ShortestPaths::new(graph).trace(graph, target)
}

/// Extends a trace ending at `from` along a path of graph edges.
pub fn extend_trace(graph: &StateGraph, trace: &mut Trace, path: &[Edge]) {
    for e in path {
        trace.steps.push(TraceStep { event: graph.event(e.event).clone(), state: graph.state(e.dst), index: e.dst });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::*;

    fn chain(len: i32) -> SystemModel {
        let leaf = LeafType {
            name: "Chain".into(),
            vars: vec![VarDecl::new("x", 0, len, 0)],
            transitions: vec![TransitionDecl::new("inc")
                .guard(Expr::var("x").lt(Expr::int(len)))
                .action(Stmt::set("x", Expr::var("x").add(Expr::int(1))))],
        };
        ground_model(&TypeTable::new().leaf(leaf), "Chain").unwrap()
    }

    #[test]
    fn chain_has_four_states_three_edges() {
        let m = chain(3);
        let g = explore(&m, &ExploreOptions::default()).unwrap();
        assert_eq!(g.num_states(), 4);
        assert_eq!(g.num_edges(), 3);
        assert_eq!(find_deadlocks(&g).states, vec![3]);
        let t = trace_to(&g, g.index_of(&StateVector::new(vec![3])).unwrap()).unwrap();
        assert_eq!(t.len(), 3);
        assert!(t.replays(&m));
        assert!(trace_to(&g, 0).unwrap().is_empty());
        assert!(trace_to(&g, 99).is_err());
    }

    #[test]
    fn self_loop_is_not_a_deadlock() {
        let leaf = LeafType {
            name: "Loop".into(),
            vars: vec![VarDecl::new("x", 0, 0, 0)],
            transitions: vec![TransitionDecl::new("stay").action(Stmt::set("x", Expr::int(0)))],
        };
        let m = ground_model(&TypeTable::new().leaf(leaf), "Loop").unwrap();
        let g = explore(&m, &ExploreOptions::default()).unwrap();
        assert_eq!(g.num_states(), 1);
        assert_eq!(g.num_edges(), 1);
        assert!(find_deadlocks(&g).states.is_empty());
    }

    #[test]
    fn cap_is_reported() {
        let m = chain(50);
        let g = explore(&m, &ExploreOptions { max_states: 10, ..Default::default() }).unwrap();
        assert_eq!(g.num_states(), 10);
        assert_eq!(g.capped(), Some(CapReason::States(10)));
        let r = find_deadlocks(&g);
        assert!(!r.complete);
        // the frontier state is unexpanded, not a deadlock
        assert!(r.states.is_empty());
    }

    #[test]
    fn codec_round_trips_wide_domains() {
        let leaf = LeafType {
            name: "W".into(),
            vars: vec![VarDecl::new("a", -300, 70000, -300), VarDecl::new("b", 0, 1, 1)],
            transitions: vec![TransitionDecl::new("t")
                .guard(Expr::var("a").lt(Expr::int(-290)))
                .action(Stmt::set("a", Expr::var("a").add(Expr::int(5))))],
        };
        let m = ground_model(&TypeTable::new().leaf(leaf), "W").unwrap();
        let g = explore(&m, &ExploreOptions::default()).unwrap();
        let vals: Vec<i32> = g.states().map(|s| s.get(0)).collect();
        assert_eq!(vals, vec![-300, -295, -290]);
    }
}
