//! Response liveness under weak fairness.
//!
//! A violation of "every `req` is eventually followed by `resp`" is a lasso:
//! a stem reaching a `req` state, then a path and a cycle on which `resp`
//! never holds. Under weak fairness the cycle must also let every
//! component either move or be disabled somewhere along it. Violations
//! are found on the strongly connected components of the subgraph of
//! `!resp` states reachable from a pending request.

use std::collections::{HashMap, VecDeque};
use std::sync::Arc;

use crate::explorer::{extend_trace, Edge, ShortestPaths, StateGraph, Trace, TraceStep};
use crate::kernel::{Event, SystemModel};

/// Maps an event to the component that owns it.
pub type EventOwner = Arc<dyn Fn(&Event) -> Option<usize> + Send + Sync>;

/// One weak-fairness set per component: the events owned by it.
#[derive(Clone)]
pub struct FairnessSpec {
    names: Vec<String>,
    owner: Option<EventOwner>,
}

impl std::fmt::Debug for FairnessSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FairnessSpec").field("names", &self.names).finish()
    }
}

impl FairnessSpec {
    /// No fairness: every cycle counts.
    pub fn none() -> Self {
        FairnessSpec { names: Vec::new(), owner: None }
    }

    /// `owner` returns an index into `names`.
    pub fn new(names: Vec<String>, owner: EventOwner) -> Self {
        FairnessSpec { names, owner: Some(owner) }
    }

    /// One set per instance in `components`. An event belongs to the
    /// earliest listed instance its call tree reaches; events reaching none
    /// of them belong to the instance that declares the entry.
    pub fn per_instance(model: &SystemModel, components: &[usize]) -> Self {
        let n_inst = model.instances().len();
        let mut rank = vec![usize::MAX; n_inst];
        for (r, &c) in components.iter().enumerate() {
            rank[c] = rank[c].min(r);
        }
        let owners: Vec<usize> = (0..model.entries().len() as u32)
            .map(|e| {
                let mut best = usize::MAX;
                let mut stack = vec![e];
                while let Some(x) = stack.pop() {
                    best = best.min(rank[model.entries()[x as usize].instance]);
                    stack.extend(model.first_callees(x));
                }
                if best == usize::MAX {
                    model.entries()[e as usize].instance
                } else {
                    components[best]
                }
            })
            .collect();
        let names = (0..n_inst).map(|i| model.instance_path(i)).collect();
        FairnessSpec::new(names, Arc::new(move |ev: &Event| owners.get(ev.entry as usize).copied()))
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_none()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn owner(&self, ev: &Event) -> Option<usize> {
        self.owner.as_ref().and_then(|o| o(ev))
    }
}

/// Stem plus cycle. The cycle starts and ends at the last stem state; an
/// empty cycle means the stem ends in a deadlock, which stutters forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub stem: Trace,
    /// Position in the stem (0 = initial state) where the unanswered request is pending.
    pub pending_from: usize,
    pub cycle: Vec<TraceStep>,
}

#[derive(Debug, Clone)]
pub struct LivenessVerdict {
    pub holds: bool,
    pub lasso: Option<Lasso>,
    /// Number of states where a request is pending without response.
    pub pending_states: usize,
}

fn tarjan(n: usize, inside: &[bool], succ: impl Fn(usize) -> Vec<usize>) -> Vec<Vec<usize>> {
    const NONE: u32 = u32::MAX;
    let mut index = vec![NONE; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut sccs = Vec::new();
    let mut next = 0u32;
    for root in (0..n).filter(|&s| inside[s]) {
        if index[root] != NONE {
            continue;
        }
        let mut call: Vec<(usize, Vec<usize>, usize)> = vec![(root, succ(root), 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some((v, ws, i)) = call.last_mut() {
            let v = *v;
            if *i < ws.len() {
                let w = ws[*i];
                *i += 1;
                if index[w] == NONE {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    let sw = succ(w);
                    call.push((w, sw, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some((u, _, _)) = call.last() {
                    low[*u] = low[*u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    sccs.push(comp);
                }
            }
        }
    }
    sccs
}

/// Shortest path inside `allowed` from `from` to the first state satisfying `goal`.
fn bfs_path(
    graph: &StateGraph,
    allowed: impl Fn(u32) -> bool,
    from: u32,
    goal: impl Fn(u32) -> bool,
) -> Option<Vec<Edge>> {
    bfs_from(graph, allowed, &[from], goal).map(|(_, p)| p)
}

/// Multi-source variant; also returns the source the path starts from.
fn bfs_from(
    graph: &StateGraph,
    allowed: impl Fn(u32) -> bool,
    sources: &[u32],
    goal: impl Fn(u32) -> bool,
) -> Option<(u32, Vec<Edge>)> {
    let mut parent: HashMap<u32, Option<(u32, Edge)>> = sources.iter().map(|&s| (s, None)).collect();
    let mut queue: VecDeque<u32> = sources.iter().copied().collect();
    while let Some(s) = queue.pop_front() {
        if goal(s) {
            let mut path = Vec::new();
            let mut cur = s;
            while let Some(Some((p, e))) = parent.get(&cur) {
                path.push(*e);
                cur = *p;
            }
            path.reverse();
            return Some((cur, path));
        }
        for e in graph.edges(s) {
            if allowed(e.dst) && !parent.contains_key(&e.dst) {
                parent.insert(e.dst, Some((s, *e)));
                queue.push_back(e.dst);
            }
        }
    }
    None
}

pub(crate) fn response_liveness(
    graph: &StateGraph,
    req: &[bool],
    resp: &[bool],
    fairness: &FairnessSpec,
) -> LivenessVerdict {
    let n = graph.num_states();
    let pending: Vec<bool> = (0..n).map(|s| req[s] && !resp[s]).collect();
    let pending_states = pending.iter().filter(|b| **b).count();

    // states reachable from a pending request without meeting a response
    let mut zone = pending.clone();
    let mut stack: Vec<u32> = (0..n as u32).filter(|&s| pending[s as usize]).collect();
    while let Some(s) = stack.pop() {
        for e in graph.edges(s) {
            let d = e.dst as usize;
            if !zone[d] && !resp[d] {
                zone[d] = true;
                stack.push(e.dst);
            }
        }
    }

    let owner: Vec<Option<usize>> = (0..graph.num_events() as u32).map(|id| fairness.owner(graph.event(id))).collect();
    let succ_in_zone = |s: usize| -> Vec<usize> {
        let mut v: Vec<usize> = graph.edges(s as u32).iter().map(|e| e.dst as usize).filter(|&d| zone[d]).collect();
        v.dedup();
        v
    };

    let sccs = tarjan(n, &zone, succ_in_zone);
    let mut comp_of = vec![u32::MAX; n];
    for (c, comp) in sccs.iter().enumerate() {
        for &s in comp {
            comp_of[s] = c as u32;
        }
    }
    for (cid, comp) in sccs.iter().enumerate() {
        let is_deadlock = |s: usize| graph.edges(s as u32).is_empty();
        let nontrivial = comp.len() > 1
            || graph.edges(comp[0] as u32).iter().any(|e| e.dst as usize == comp[0])
            || is_deadlock(comp[0]);
        if !nontrivial {
            continue;
        }
        let member = |s: u32| comp_of[s as usize] == cid as u32;
        // per group: states of the component where it is enabled, and one edge firing it inside
        let mut enabled: HashMap<usize, usize> = HashMap::new();
        let mut fired: HashMap<usize, (u32, Edge)> = HashMap::new();
        let mut groups = Vec::new();
        for &s in comp {
            groups.clear();
            for e in graph.edges(s as u32) {
                if let Some(g) = owner[e.event as usize] {
                    groups.push(g);
                    if member(e.dst) {
                        fired.entry(g).or_insert((s as u32, *e));
                    }
                }
            }
            groups.sort_unstable();
            groups.dedup();
            for g in &groups {
                *enabled.entry(*g).or_default() += 1;
            }
        }
        let fair = enabled.iter().all(|(g, c)| *c < comp.len() || fired.contains_key(g));
        if !fair {
            continue;
        }

        // stem: shortest trace to a pending state, then on to the component
        let mut sources: Vec<u32> = (0..n as u32).filter(|&s| pending[s as usize]).collect();
        let sp = ShortestPaths::new(graph);
        sources.sort_by_key(|&s| sp.depth(s));
        let (src, path) =
            bfs_from(graph, |s| zone[s as usize], &sources, member).expect("component reachable from a pending state");
        let mut stem = sp.trace(graph, src).expect("reachable");
        let pending_from = stem.len();
        extend_trace(graph, &mut stem, &path);
        let entry = stem.steps.last().map(|s| s.index).unwrap_or(src);

        let mut cycle_edges: Vec<Edge> = Vec::new();
        let mut cur = entry;
        let mut groups: Vec<&usize> = enabled.keys().collect();
        groups.sort_unstable();
        for g in groups {
            if let Some((u, e)) = fired.get(g) {
                cycle_edges.extend(bfs_path(graph, member, cur, |s| s == *u).expect("strongly connected"));
                cycle_edges.push(*e);
                cur = e.dst;
            } else {
                let disabled = |s: u32| graph.edges(s).iter().all(|e| owner[e.event as usize] != Some(*g));
                cycle_edges.extend(bfs_path(graph, member, cur, disabled).expect("fair component"));
                cur = cycle_edges.last().map(|e| e.dst).unwrap_or(cur);
            }
        }
        if cycle_edges.is_empty() && !is_deadlock(entry as usize) {
            let e = *graph.edges(entry).iter().find(|e| member(e.dst)).expect("nontrivial component");
            cycle_edges.push(e);
            cur = e.dst;
        }
        cycle_edges.extend(bfs_path(graph, member, cur, |s| s == entry).expect("strongly connected"));
        let mut tail = Trace { initial: graph.state(entry), steps: Vec::new() };
        extend_trace(graph, &mut tail, &cycle_edges);
        return LivenessVerdict {
            holds: false,
            lasso: Some(Lasso { stem, pending_from, cycle: tail.steps }),
            pending_states,
        };
    }
    LivenessVerdict { holds: true, lasso: None, pending_states }
}

/// Independent replay check of a lasso against the model. The stem and cycle
/// must execute with the request left unanswered, and the cycle must be
/// weakly fair for `fairness`.
pub fn verify_lasso(
    model: &SystemModel,
    lasso: &Lasso,
    req: &dyn Fn(&[i32]) -> bool,
    resp: &dyn Fn(&[i32]) -> bool,
    fairness: &FairnessSpec,
) -> Result<(), String> {
    if !lasso.stem.replays(model) {
        return Err("stem does not replay".into());
    }
    let stem: Vec<_> = lasso.stem.states().collect();
    let Some(start) = stem.get(lasso.pending_from) else {
        return Err("pending index beyond the stem".into());
    };
    if !req(start) {
        return Err("request not pending where claimed".into());
    }
    let head = *stem.last().expect("nonempty");
    let mut cur = head.clone();
    let mut visited = vec![head.clone()];
    let mut fired = Vec::new();
    for step in &lasso.cycle {
        let next = model.fire(&cur, &step.event).map_err(|e| format!("cycle step fails: {e}"))?;
        if next != step.state {
            return Err("cycle step reaches a different state".into());
        }
        fired.extend(fairness.owner(&step.event));
        cur = next;
        visited.push(cur.clone());
    }
    if cur != *head {
        return Err("cycle does not close".into());
    }
    if lasso.cycle.is_empty() {
        let succ = model.successors(head).map_err(|e| e.to_string())?;
        if !succ.is_empty() {
            return Err("empty cycle on a state that is not a deadlock".into());
        }
    }
    if stem[lasso.pending_from..].iter().any(|s| resp(s)) || visited.iter().any(|s| resp(s)) {
        return Err("response reached".into());
    }
    visited.pop();
    let mut always_enabled: Option<Vec<usize>> = None;
    for s in &visited {
        let mut groups: Vec<usize> =
            model.successors(s).map_err(|e| e.to_string())?.iter().filter_map(|(ev, _)| fairness.owner(ev)).collect();
        groups.sort_unstable();
        groups.dedup();
        always_enabled = Some(match always_enabled {
            None => groups,
            Some(prev) => prev.into_iter().filter(|g| groups.contains(g)).collect(),
        });
    }
    for g in always_enabled.unwrap_or_default() {
        if !fired.contains(&g) {
            let name = fairness.names().get(g).cloned().unwrap_or_else(|| g.to_string());
            return Err(format!("`{name}` is enabled along the whole cycle but never fires"));
        }
    }
    Ok(())
}
