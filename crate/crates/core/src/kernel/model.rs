//! Grounding and execution semantics.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::ops::Range;

use smallvec::SmallVec;

use super::ast::*;
use super::KernelError;

/// Total assignment of every flattened variable, in canonical order
/// (depth-first over the instance tree, declaration order within a type).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateVector(Vec<i32>);

impl StateVector {
    pub fn new(values: Vec<i32>) -> Self {
        StateVector(values)
    }

    pub fn as_slice(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, var: usize) -> i32 {
        self.0[var]
    }

    pub fn into_inner(self) -> Vec<i32> {
        self.0
    }
}

impl From<Vec<i32>> for StateVector {
    fn from(v: Vec<i32>) -> Self {
        StateVector(v)
    }
}

impl std::ops::Deref for StateVector {
    type Target = [i32];
    fn deref(&self) -> &[i32] {
        &self.0
    }
}

/// Indices into the candidate lists of each call executed, in execution order.
pub type Resolution = SmallVec<[u16; 6]>;

/// One firing of a spontaneous grounded entry, together with the resolution
/// chosen for every call it executed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Event {
    pub entry: u32,
    pub resolution: Resolution,
}

#[derive(Debug, Clone)]
pub struct VarInfo {
    /// Full path, e.g. `l2[0].n_copies`.
    pub name: String,
    pub lo: i32,
    pub hi: i32,
    pub initial: i32,
    pub instance: usize,
}

#[derive(Debug, Clone)]
pub struct InstanceInfo {
    /// Dotted path from the root; the root itself has an empty path.
    pub path: String,
    pub type_name: String,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    pub is_leaf: bool,
    /// Flattened variables owned by this instance (leaves only).
    pub vars: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundLabel {
    pub name: String,
    pub args: Vec<i32>,
}

impl fmt::Display for GroundLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"(", self.name)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone)]
pub(crate) enum CExpr {
    Const(i32),
    Var(u32),
    Not(Box<CExpr>),
    Neg(Box<CExpr>),
    Bin(BinOp, Box<CExpr>, Box<CExpr>),
}

impl CExpr {
    #[inline]
    fn eval(&self, s: &[i32]) -> i32 {
        match self {
            CExpr::Const(v) => *v,
            CExpr::Var(i) => s[*i as usize],
            CExpr::Not(e) => (e.eval(s) == 0) as i32,
            CExpr::Neg(e) => -e.eval(s),
            CExpr::Bin(BinOp::And, a, b) => (a.eval(s) != 0 && b.eval(s) != 0) as i32,
            CExpr::Bin(BinOp::Or, a, b) => (a.eval(s) != 0 || b.eval(s) != 0) as i32,
            CExpr::Bin(op, a, b) => op.apply(a.eval(s), b.eval(s)),
        }
    }

    fn is_true_const(&self) -> bool {
        matches!(self, CExpr::Const(v) if *v != 0)
    }

    fn render(&self, vars: &[VarInfo], out: &mut String) {
        match self {
            CExpr::Const(v) => {
                let _ = write!(out, "{v}");
            }
            CExpr::Var(i) => out.push_str(&vars[*i as usize].name),
            CExpr::Not(e) => {
                out.push_str("!(");
                e.render(vars, out);
                out.push(')');
            }
            CExpr::Neg(e) => {
                out.push_str("-(");
                e.render(vars, out);
                out.push(')');
            }
            CExpr::Bin(op, a, b) => {
                out.push('(');
                a.render(vars, out);
                let _ = write!(out, " {} ", op.symbol());
                b.render(vars, out);
                out.push(')');
            }
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Op {
    Assign(u32, CExpr),
    Call(u32),
}

#[derive(Debug, Clone)]
pub(crate) struct CallSite {
    target: usize,
    label: GroundLabel,
    candidates: Vec<u32>,
}

/// A transition or synchronization with every parameter fixed.
#[derive(Debug, Clone)]
pub struct GroundEntry {
    pub instance: usize,
    /// Declared name of the transition or synchronization.
    pub decl: String,
    pub params: Vec<(String, i32)>,
    pub label: Option<GroundLabel>,
    pub is_sync: bool,
    guard: CExpr,
    ops: Vec<Op>,
}

impl GroundEntry {
    pub fn calls(&self) -> impl Iterator<Item = u32> + '_ {
        self.ops.iter().filter_map(|op| match op {
            Op::Call(c) => Some(*c),
            Op::Assign(..) => None,
        })
    }
}

/// A grounded hierarchical transition system.
#[derive(Debug, Clone)]
pub struct SystemModel {
    root_type: String,
    instances: Vec<InstanceInfo>,
    vars: Vec<VarInfo>,
    entries: Vec<GroundEntry>,
    calls: Vec<CallSite>,
    spontaneous: Vec<u32>,
    var_lookup: HashMap<String, usize>,
    symbols: BTreeMap<String, i32>,
}

type Choices = Resolution;

struct Grounder<'a> {
    types: &'a TypeTable,
    instances: Vec<InstanceInfo>,
    vars: Vec<VarInfo>,
    child_lookup: HashMap<(usize, String), usize>,
    /// Local variable name -> global index, per leaf instance.
    local_vars: Vec<HashMap<String, usize>>,
}

impl<'a> Grounder<'a> {
    fn instantiate(
        &mut self,
        type_name: &str,
        path: String,
        parent: Option<usize>,
        stack: &mut Vec<String>,
    ) -> Result<usize, KernelError> {
        if stack.iter().any(|t| t == type_name) {
            let mut cycle = stack.clone();
            cycle.push(type_name.to_string());
            return Err(KernelError::CyclicInstantiation(cycle.join(" -> ")));
        }
        let decl = self.types.get(type_name).ok_or_else(|| KernelError::UnknownType(type_name.to_string()))?;
        let id = self.instances.len();
        self.instances.push(InstanceInfo {
            path: path.clone(),
            type_name: type_name.to_string(),
            parent,
            children: Vec::new(),
            is_leaf: matches!(decl, TypeDecl::Leaf(_)),
            vars: 0..0,
        });
        self.local_vars.push(HashMap::new());
        match decl {
            TypeDecl::Leaf(leaf) => {
                let start = self.vars.len();
                for v in &leaf.vars {
                    if v.lo > v.hi || v.initial < v.lo || v.initial > v.hi {
                        return Err(KernelError::BadDomain {
                            var: join_path(&path, &v.name),
                            lo: v.lo,
                            hi: v.hi,
                            initial: v.initial,
                        });
                    }
                    if self.local_vars[id].contains_key(&v.name) {
                        return Err(KernelError::Duplicate(format!("variable {} in type {}", v.name, leaf.name)));
                    }
                    self.local_vars[id].insert(v.name.clone(), self.vars.len());
                    self.vars.push(VarInfo {
                        name: join_path(&path, &v.name),
                        lo: v.lo,
                        hi: v.hi,
                        initial: v.initial,
                        instance: id,
                    });
                }
                self.instances[id].vars = start..self.vars.len();
            }
            TypeDecl::Composite(comp) => {
                stack.push(type_name.to_string());
                for inst in &comp.instances {
                    let names: Vec<String> = match inst.count {
                        None => vec![inst.name.clone()],
                        Some(n) => (0..n).map(|i| format!("{}[{i}]", inst.name)).collect(),
                    };
                    for local in names {
                        if self.child_lookup.contains_key(&(id, local.clone())) {
                            return Err(KernelError::Duplicate(format!("instance {local} in type {}", comp.name)));
                        }
                        let child = self.instantiate(&inst.type_name, join_path(&path, &local), Some(id), stack)?;
                        self.child_lookup.insert((id, local), child);
                        self.instances[id].children.push(child);
                    }
                }
                stack.pop();
                let start = self.instances[id]
                    .children
                    .first()
                    .map(|&c| self.instances[c].vars.start)
                    .unwrap_or(self.vars.len());
                self.instances[id].vars = start..self.vars.len();
            }
        }
        Ok(id)
    }

    fn compile(&self, e: &Expr, inst: usize, env: &[(String, i32)]) -> Result<CExpr, KernelError> {
        Ok(match e {
            Expr::Const(v) => CExpr::Const(*v),
            Expr::Param(p) => CExpr::Const(lookup_param(env, p)?),
            Expr::Var(v) => {
                let name = self.resolve_var_name(v, env)?;
                let idx = self.local_vars[inst].get(&name).ok_or_else(|| {
                    KernelError::UnknownVariable(format!("{name} in {}", self.instances[inst].type_name))
                })?;
                CExpr::Var(*idx as u32)
            }
            Expr::Unary(op, a) => {
                let a = self.compile(a, inst, env)?;
                match (op, a) {
                    (UnOp::Not, CExpr::Const(v)) => CExpr::Const((v == 0) as i32),
                    (UnOp::Neg, CExpr::Const(v)) => CExpr::Const(-v),
                    (UnOp::Not, a) => CExpr::Not(Box::new(a)),
                    (UnOp::Neg, a) => CExpr::Neg(Box::new(a)),
                }
            }
            Expr::Binary(op, a, b) => {
                let a = self.compile(a, inst, env)?;
                let b = self.compile(b, inst, env)?;
                match (op, a, b) {
                    (op, CExpr::Const(x), CExpr::Const(y)) => CExpr::Const(op.apply(x, y)),
                    (BinOp::And, CExpr::Const(x), b) => {
                        if x == 0 {
                            CExpr::Const(0)
                        } else {
                            b
                        }
                    }
                    (BinOp::And, a, CExpr::Const(y)) => {
                        if y == 0 {
                            CExpr::Const(0)
                        } else {
                            a
                        }
                    }
                    (BinOp::Or, CExpr::Const(x), b) => {
                        if x != 0 {
                            CExpr::Const(1)
                        } else {
                            b
                        }
                    }
                    (BinOp::Or, a, CExpr::Const(y)) => {
                        if y != 0 {
                            CExpr::Const(1)
                        } else {
                            a
                        }
                    }
                    (op, a, b) => CExpr::Bin(*op, Box::new(a), Box::new(b)),
                }
            }
        })
    }

    fn resolve_var_name(&self, v: &VarRef, env: &[(String, i32)]) -> Result<String, KernelError> {
        Ok(match &v.index {
            None => v.name.clone(),
            Some(i) => format!("{}[{}]", v.name, eval_closed(i, env)?),
        })
    }

    fn ground_all(&self) -> Result<(Vec<GroundEntry>, Vec<PendingCall>), KernelError> {
        let mut entries = Vec::new();
        let mut pending = Vec::new();
        for (id, info) in self.instances.iter().enumerate() {
            match self.types.get(&info.type_name).expect("instantiated type exists") {
                TypeDecl::Leaf(leaf) => {
                    for t in &leaf.transitions {
                        for env in valuations(&t.params, &t.name)? {
                            let guard = self.compile(&t.guard, id, &env)?;
                            let label = ground_label(t.label.as_ref(), &env)?;
                            let mut ops = Vec::with_capacity(t.actions.len());
                            for stmt in &t.actions {
                                match stmt {
                                    Stmt::Assign(v, e) => {
                                        let name = self.resolve_var_name(v, &env)?;
                                        let idx = self.local_vars[id].get(&name).ok_or_else(|| {
                                            KernelError::UnknownVariable(format!("{name} in {}", leaf.name))
                                        })?;
                                        ops.push(Op::Assign(*idx as u32, self.compile(e, id, &env)?));
                                    }
                                    Stmt::Call(c) => {
                                        ops.push(Op::Call(pending.len() as u32));
                                        pending.push(self.pending_call(id, c, &env)?);
                                    }
                                }
                            }
                            entries.push(GroundEntry {
                                instance: id,
                                decl: t.name.clone(),
                                params: env,
                                label,
                                is_sync: false,
                                guard,
                                ops,
                            });
                        }
                    }
                }
                TypeDecl::Composite(comp) => {
                    for s in &comp.syncs {
                        for env in valuations(&s.params, &s.name)? {
                            let label = ground_label(s.label.as_ref(), &env)?;
                            let mut ops = Vec::with_capacity(s.calls.len());
                            for c in &s.calls {
                                ops.push(Op::Call(pending.len() as u32));
                                pending.push(self.pending_call(id, c, &env)?);
                            }
                            entries.push(GroundEntry {
                                instance: id,
                                decl: s.name.clone(),
                                params: env,
                                label,
                                is_sync: true,
                                guard: CExpr::Const(1),
                                ops,
                            });
                        }
                    }
                }
            }
        }
        Ok((entries, pending))
    }

    fn pending_call(&self, inst: usize, c: &Call, env: &[(String, i32)]) -> Result<PendingCall, KernelError> {
        let target = match &c.target {
            Target::SelfRef => inst,
            Target::Instance { name, index } => {
                if self.instances[inst].is_leaf {
                    return Err(KernelError::UnknownInstance(format!(
                        "{name}: leaf type {} can only call its own labels",
                        self.instances[inst].type_name
                    )));
                }
                let local = match index {
                    None => name.clone(),
                    Some(i) => format!("{name}[{}]", eval_closed(i, env)?),
                };
                *self.child_lookup.get(&(inst, local.clone())).ok_or_else(|| {
                    KernelError::UnknownInstance(format!("{local} in {}", self.instances[inst].type_name))
                })?
            }
        };
        let args = c.args.iter().map(|a| eval_closed(a, env)).collect::<Result<Vec<_>, _>>()?;
        Ok(PendingCall { target, label: GroundLabel { name: c.label.clone(), args } })
    }
}

struct PendingCall {
    target: usize,
    label: GroundLabel,
}

fn join_path(path: &str, name: &str) -> String {
    if path.is_empty() {
        name.to_string()
    } else {
        format!("{path}.{name}")
    }
}

fn lookup_param(env: &[(String, i32)], name: &str) -> Result<i32, KernelError> {
    env.iter().find(|(n, _)| n == name).map(|(_, v)| *v).ok_or_else(|| KernelError::UnknownParam(name.to_string()))
}

/// Evaluates an expression that may only mention parameters.
fn eval_closed(e: &Expr, env: &[(String, i32)]) -> Result<i32, KernelError> {
    Ok(match e {
        Expr::Const(v) => *v,
        Expr::Param(p) => lookup_param(env, p)?,
        Expr::Var(v) => return Err(KernelError::NotClosed(v.to_string())),
        Expr::Unary(UnOp::Not, a) => (eval_closed(a, env)? == 0) as i32,
        Expr::Unary(UnOp::Neg, a) => -eval_closed(a, env)?,
        Expr::Binary(op, a, b) => op.apply(eval_closed(a, env)?, eval_closed(b, env)?),
    })
}

fn ground_label(label: Option<&Label>, env: &[(String, i32)]) -> Result<Option<GroundLabel>, KernelError> {
    label
        .map(|l| {
            Ok(GroundLabel {
                name: l.name.clone(),
                args: l.args.iter().map(|a| eval_closed(a, env)).collect::<Result<_, _>>()?,
            })
        })
        .transpose()
}

/// Cartesian product of parameter ranges, first parameter outermost.
fn valuations(params: &[Param], owner: &str) -> Result<Vec<Vec<(String, i32)>>, KernelError> {
    for p in params {
        if p.size() == 0 {
            return Err(KernelError::EmptyRange { owner: owner.to_string(), param: p.name.clone() });
        }
    }
    let mut out = vec![Vec::with_capacity(params.len())];
    for p in params {
        let mut next = Vec::with_capacity(out.len() * p.size());
        for prefix in &out {
            for v in p.lo..=p.hi {
                let mut env: Vec<(String, i32)> = prefix.clone();
                env.push((p.name.clone(), v));
                next.push(env);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Instantiates `root_type` as the main instance and grounds every
/// transition and synchronization of every instance.
pub fn ground_model(types: &TypeTable, root_type: &str) -> Result<SystemModel, KernelError> {
    let mut g = Grounder {
        types,
        instances: Vec::new(),
        vars: Vec::new(),
        child_lookup: HashMap::new(),
        local_vars: Vec::new(),
    };
    g.instantiate(root_type, String::new(), None, &mut Vec::new())?;
    let (entries, pending) = g.ground_all()?;

    let mut by_label: HashMap<(usize, &GroundLabel), Vec<u32>> = HashMap::new();
    let mut label_arity: HashMap<(usize, &str), Vec<usize>> = HashMap::new();
    for (i, e) in entries.iter().enumerate() {
        if let Some(l) = &e.label {
            by_label.entry((e.instance, l)).or_default().push(i as u32);
            label_arity.entry((e.instance, l.name.as_str())).or_default().push(l.args.len());
        }
    }
    let mut calls = Vec::with_capacity(pending.len());
    for p in &pending {
        let arities = label_arity.get(&(p.target, p.label.name.as_str())).ok_or_else(|| KernelError::UnknownLabel {
            label: p.label.name.clone(),
            instance: display_path(&g.instances[p.target].path),
        })?;
        if !arities.contains(&p.label.args.len()) {
            return Err(KernelError::LabelArity {
                label: p.label.name.clone(),
                instance: display_path(&g.instances[p.target].path),
                got: p.label.args.len(),
            });
        }
        let candidates = by_label.get(&(p.target, &p.label)).cloned().unwrap_or_default();
        calls.push(CallSite { target: p.target, label: p.label.clone(), candidates });
    }

    let spontaneous = entries.iter().enumerate().filter(|(_, e)| e.label.is_none()).map(|(i, _)| i as u32).collect();
    let var_lookup = g.vars.iter().enumerate().map(|(i, v)| (v.name.clone(), i)).collect();
    let model = SystemModel {
        root_type: root_type.to_string(),
        instances: g.instances,
        vars: g.vars,
        entries,
        calls,
        spontaneous,
        var_lookup,
        symbols: BTreeMap::new(),
    };
    model.check_call_cycles()?;
    Ok(model)
}

fn display_path(p: &str) -> String {
    if p.is_empty() {
        "main".to_string()
    } else {
        p.to_string()
    }
}

impl SystemModel {
    fn check_call_cycles(&self) -> Result<(), KernelError> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut mark = vec![0u8; self.entries.len()];
        for start in 0..self.entries.len() {
            if mark[start] != 0 {
                continue;
            }
            let mut stack: Vec<(usize, Vec<u32>, usize)> = vec![(start, self.callees(start), 0)];
            mark[start] = 1;
            while let Some((node, succ, pos)) = stack.last_mut() {
                if *pos < succ.len() {
                    let next = succ[*pos] as usize;
                    *pos += 1;
                    match mark[next] {
                        0 => {
                            mark[next] = 1;
                            let s = self.callees(next);
                            stack.push((next, s, 0));
                        }
                        1 => return Err(KernelError::CyclicCall(self.entry_name(next as u32))),
                        _ => {}
                    }
                } else {
                    mark[*node] = 2;
                    stack.pop();
                }
            }
        }
        Ok(())
    }

    fn callees(&self, entry: usize) -> Vec<u32> {
        self.entries[entry].calls().flat_map(|c| self.calls[c as usize].candidates.iter().copied()).collect()
    }

    pub fn root_type(&self) -> &str {
        &self.root_type
    }

    pub fn instances(&self) -> &[InstanceInfo] {
        &self.instances
    }

    pub fn vars(&self) -> &[VarInfo] {
        &self.vars
    }

    pub fn entries(&self) -> &[GroundEntry] {
        &self.entries
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Entries that fire on their own (unlabeled), in table order.
    pub fn spontaneous(&self) -> &[u32] {
        &self.spontaneous
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.var_lookup.get(name).copied()
    }

    pub fn instance_index(&self, path: &str) -> Option<usize> {
        self.instances.iter().position(|i| i.path == path)
    }

    pub fn instance_path(&self, instance: usize) -> String {
        display_path(&self.instances[instance].path)
    }

    /// Named integer constants (locations, message codes) usable in properties.
    pub fn symbols(&self) -> &BTreeMap<String, i32> {
        &self.symbols
    }

    pub fn add_symbol(&mut self, name: impl Into<String>, value: i32) {
        self.symbols.insert(name.into(), value);
    }

    /// Number of grounded entries produced from a given declaration of a given type.
    pub fn grounded_count(&self, type_name: &str, decl: &str) -> usize {
        self.entries.iter().filter(|e| e.decl == decl && self.instances[e.instance].type_name == type_name).count()
    }

    /// Entries whose call tree touches `instance` or one of its descendants.
    pub fn call_targets(&self, entry: u32) -> Vec<usize> {
        self.entries[entry as usize].calls().map(|c| self.calls[c as usize].target).collect()
    }

    /// First candidate of each call, in order; used to attribute ownership of an entry.
    pub fn first_callees(&self, entry: u32) -> Vec<u32> {
        self.entries[entry as usize]
            .calls()
            .filter_map(|c| self.calls[c as usize].candidates.first().copied())
            .collect()
    }

    pub fn initial_state(&self) -> StateVector {
        StateVector(self.vars.iter().map(|v| v.initial).collect())
    }

    pub fn entry_name(&self, entry: u32) -> String {
        let e = &self.entries[entry as usize];
        let mut s = join_path(&self.instances[e.instance].path, &e.decl);
        s.push('(');
        for (i, (n, v)) in e.params.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{n}={v}");
        }
        s.push(')');
        s
    }

    /// Stable human-readable event name; non-default resolutions are appended.
    pub fn event_name(&self, event: &Event) -> String {
        let mut s = self.entry_name(event.entry);
        if event.resolution.iter().any(|&c| c != 0) {
            s.push('#');
            for (i, c) in event.resolution.iter().enumerate() {
                if i > 0 {
                    s.push('.');
                }
                let _ = write!(s, "{c}");
            }
        }
        s
    }

    #[inline]
    pub fn guard_holds(&self, entry: u32, state: &[i32]) -> bool {
        self.entries[entry as usize].guard.eval(state) != 0
    }

    fn assign(&self, state: &mut [i32], var: u32, e: &CExpr) -> Result<(), KernelError> {
        let value = e.eval(state);
        let info = &self.vars[var as usize];
        if value < info.lo || value > info.hi {
            return Err(KernelError::DomainViolation { var: info.name.clone(), value, lo: info.lo, hi: info.hi });
        }
        state[var as usize] = value;
        Ok(())
    }

    /// Runs `ops` on `state`, enumerating every resolution of every call.
    fn run_all(
        &self,
        ops: &[Op],
        mut state: Vec<i32>,
        choices: Choices,
        out: &mut Vec<(Vec<i32>, Choices)>,
    ) -> Result<(), KernelError> {
        for (i, op) in ops.iter().enumerate() {
            match op {
                Op::Assign(v, e) => self.assign(&mut state, *v, e)?,
                Op::Call(c) => {
                    let site = &self.calls[*c as usize];
                    let rest = &ops[i + 1..];
                    for (k, &cand) in site.candidates.iter().enumerate() {
                        let callee = &self.entries[cand as usize];
                        if callee.guard.eval(&state) == 0 {
                            continue;
                        }
                        let mut ch = choices.clone();
                        ch.push(k as u16);
                        if rest.is_empty() {
                            self.run_all(&callee.ops, state.clone(), ch, out)?;
                        } else {
                            let mut partial = Vec::new();
                            self.run_all(&callee.ops, state.clone(), ch, &mut partial)?;
                            for (s, ch) in partial {
                                self.run_all(rest, s, ch, out)?;
                            }
                        }
                    }
                    return Ok(());
                }
            }
        }
        out.push((state, choices));
        Ok(())
    }

    /// Runs `ops` following a recorded resolution.
    fn run_recorded(
        &self,
        ops: &[Op],
        state: &mut Vec<i32>,
        choices: &mut std::slice::Iter<'_, u16>,
    ) -> Result<(), KernelError> {
        for op in ops {
            match op {
                Op::Assign(v, e) => self.assign(state, *v, e)?,
                Op::Call(c) => {
                    let site = &self.calls[*c as usize];
                    let k = *choices.next().ok_or_else(|| {
                        KernelError::Unresolvable(format!("missing resolution for call {}", site.label))
                    })? as usize;
                    let cand = *site.candidates.get(k).ok_or_else(|| {
                        KernelError::Unresolvable(format!(
                            "resolution {k} out of range for call {} on {}",
                            site.label,
                            self.instance_path(site.target)
                        ))
                    })?;
                    let callee = &self.entries[cand as usize];
                    if callee.guard.eval(state) == 0 {
                        return Err(KernelError::Unresolvable(format!(
                            "callee {} of {} is disabled",
                            self.entry_name(cand),
                            site.label
                        )));
                    }
                    self.run_recorded(&callee.ops, state, choices)?;
                }
            }
        }
        Ok(())
    }

    /// Fires one event. The input state is left untouched.
    pub fn fire(&self, state: &StateVector, event: &Event) -> Result<StateVector, KernelError> {
        let entry = self
            .entries
            .get(event.entry as usize)
            .ok_or_else(|| KernelError::BadEvent(format!("no entry #{}", event.entry)))?;
        if entry.guard.eval(state) == 0 {
            return Err(KernelError::GuardFalse(self.entry_name(event.entry)));
        }
        let mut next = state.0.clone();
        let mut it = event.resolution.iter();
        self.run_recorded(&entry.ops, &mut next, &mut it)?;
        if it.next().is_some() {
            return Err(KernelError::BadEvent(format!(
                "trailing resolution data for {}",
                self.entry_name(event.entry)
            )));
        }
        Ok(StateVector(next))
    }

    /// All (event, successor) pairs of `state`. Empty means deadlock.
    pub fn successors(&self, state: &StateVector) -> Result<Vec<(Event, StateVector)>, KernelError> {
        self.successors_of(state)
    }

    /// Guard of `entry` and, recursively, of some candidate of its leading
    /// call. Both are evaluated on the untouched state, so a false result
    /// means the entry cannot fire.
    fn may_fire(&self, entry: u32, state: &[i32]) -> bool {
        let e = &self.entries[entry as usize];
        if e.guard.eval(state) == 0 {
            return false;
        }
        match e.ops.first() {
            Some(Op::Call(c)) => self.calls[*c as usize].candidates.iter().any(|&k| self.may_fire(k, state)),
            _ => true,
        }
    }

    pub(crate) fn successors_of(&self, state: &[i32]) -> Result<Vec<(Event, StateVector)>, KernelError> {
        let mut result = Vec::new();
        let mut buf = Vec::new();
        for &id in &self.spontaneous {
            let entry = &self.entries[id as usize];
            if !self.may_fire(id, state) {
                continue;
            }
            buf.clear();
            self.run_all(&entry.ops, state.to_vec(), Choices::new(), &mut buf)?;
            for (s, resolution) in buf.drain(..) {
                result.push((Event { entry: id, resolution }, StateVector(s)));
            }
        }
        Ok(result)
    }

    /// One line per grounded entry, in table order.
    pub fn dump_grounded(&self) -> String {
        let mut out = String::new();
        for (i, e) in self.entries.iter().enumerate() {
            let _ = write!(out, "{i}\t{}", self.entry_name(i as u32));
            match &e.label {
                Some(l) => {
                    let _ = write!(out, "\tlabel {l}");
                }
                None => out.push_str("\tspontaneous"),
            }
            if !e.guard.is_true_const() {
                out.push_str("\t[");
                e.guard.render(&self.vars, &mut out);
                out.push(']');
            }
            for c in e.calls() {
                let site = &self.calls[c as usize];
                let _ = write!(
                    out,
                    "\tcall {}.{} ({} candidates)",
                    self.instance_path(site.target),
                    site.label,
                    site.candidates.len()
                );
            }
            out.push('\n');
        }
        out
    }

    /// `instance.variable=value` lines in canonical order.
    pub fn format_state(&self, state: &StateVector) -> String {
        let mut out = String::new();
        for (v, x) in self.vars.iter().zip(state.iter()) {
            let _ = writeln!(out, "{}={x}", v.name);
        }
        out
    }
}
