//! Reference implementations used as test oracles.
//!
//! `Naive` executes a type table straight from the declarations, with a
//! name-keyed state and no grounding. `bounded_ctl` evaluates CTL by
//! unrolling path quantifiers to the number of states.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use dhccp_core::checker::{Atom, Formula, Kripke};
use dhccp_core::kernel::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub type NamedState = BTreeMap<String, i32>;

struct Inst {
    path: String,
    type_name: String,
    children: BTreeMap<String, usize>,
}

pub struct Naive<'a> {
    types: &'a TypeTable,
    insts: Vec<Inst>,
}

fn join(path: &str, name: &str) -> String {
    if path.is_empty() {
        name.to_string()
    } else {
        format!("{path}.{name}")
    }
}

fn valuations(params: &[Param]) -> Vec<BTreeMap<String, i32>> {
    let mut out = vec![BTreeMap::new()];
    for p in params {
        out = out
            .into_iter()
            .flat_map(|env| {
                (p.lo..=p.hi).map(move |v| {
                    let mut e = env.clone();
                    e.insert(p.name.clone(), v);
                    e
                })
            })
            .collect();
    }
    out
}

impl<'a> Naive<'a> {
    pub fn new(types: &'a TypeTable, root: &str) -> Self {
        let mut n = Naive { types, insts: Vec::new() };
        n.instantiate(root, String::new());
        n
    }

    fn instantiate(&mut self, type_name: &str, path: String) -> usize {
        let id = self.insts.len();
        self.insts.push(Inst { path: path.clone(), type_name: type_name.into(), children: BTreeMap::new() });
        if let Some(TypeDecl::Composite(c)) = self.types.get(type_name) {
            for d in &c.instances {
                let locals: Vec<String> = match d.count {
                    None => vec![d.name.clone()],
                    Some(k) => (0..k).map(|i| format!("{}[{i}]", d.name)).collect(),
                };
                for local in locals {
                    let child = self.instantiate(&d.type_name, join(&path, &local));
                    self.insts[id].children.insert(local, child);
                }
            }
        }
        id
    }

    pub fn initial(&self) -> NamedState {
        let mut s = NamedState::new();
        for inst in &self.insts {
            if let Some(TypeDecl::Leaf(l)) = self.types.get(&inst.type_name) {
                for v in &l.vars {
                    s.insert(join(&inst.path, &v.name), v.initial);
                }
            }
        }
        s
    }

    fn eval(&self, inst: usize, e: &Expr, env: &BTreeMap<String, i32>, s: &NamedState) -> i32 {
        match e {
            Expr::Const(v) => *v,
            Expr::Param(p) => env[p],
            Expr::Var(v) => s[&self.var_name(inst, v, env, s)],
            Expr::Unary(UnOp::Not, a) => (self.eval(inst, a, env, s) == 0) as i32,
            Expr::Unary(UnOp::Neg, a) => -self.eval(inst, a, env, s),
            Expr::Binary(op, a, b) => op.apply(self.eval(inst, a, env, s), self.eval(inst, b, env, s)),
        }
    }

    fn var_name(&self, inst: usize, v: &VarRef, env: &BTreeMap<String, i32>, s: &NamedState) -> String {
        let local = match &v.index {
            None => v.name.clone(),
            Some(i) => format!("{}[{}]", v.name, self.eval(inst, i, env, s)),
        };
        join(&self.insts[inst].path, &local)
    }

    fn exec(&self, inst: usize, stmts: &[Stmt], env: &BTreeMap<String, i32>, s: NamedState) -> Vec<NamedState> {
        let mut frontier = vec![s];
        for st in stmts {
            frontier = frontier
                .into_iter()
                .flat_map(|s| match st {
                    Stmt::Assign(v, e) => {
                        let mut s = s;
                        let value = self.eval(inst, e, env, &s);
                        s.insert(self.var_name(inst, v, env, &s), value);
                        vec![s]
                    }
                    Stmt::Call(c) => self.call(inst, c, env, s),
                })
                .collect();
        }
        frontier
    }

    fn call(&self, inst: usize, c: &Call, env: &BTreeMap<String, i32>, s: NamedState) -> Vec<NamedState> {
        let target = match &c.target {
            Target::SelfRef => inst,
            Target::Instance { name, index: None } => self.insts[inst].children[name],
            Target::Instance { name, index: Some(i) } => {
                self.insts[inst].children[&format!("{name}[{}]", self.eval(inst, i, env, &s))]
            }
        };
        let args: Vec<i32> = c.args.iter().map(|a| self.eval(inst, a, env, &s)).collect();
        let mut out = Vec::new();
        self.each_entry(target, |params, label, guard, body| {
            let Some(l) = label else { return };
            for cenv in valuations(params) {
                let largs: Vec<i32> = l.args.iter().map(|a| self.eval(target, a, &cenv, &s)).collect();
                if l.name == c.label && largs == args && self.eval(target, guard, &cenv, &s) != 0 {
                    out.extend(self.exec(target, body, &cenv, s.clone()));
                }
            }
        });
        out
    }

    fn each_entry(&self, inst: usize, mut f: impl FnMut(&[Param], Option<&Label>, &Expr, &[Stmt])) {
        match self.types.get(&self.insts[inst].type_name) {
            Some(TypeDecl::Leaf(l)) => {
                for t in &l.transitions {
                    f(&t.params, t.label.as_ref(), &t.guard, &t.actions);
                }
            }
            Some(TypeDecl::Composite(c)) => {
                for y in &c.syncs {
                    let body: Vec<Stmt> = y.calls.iter().cloned().map(Stmt::Call).collect();
                    f(&y.params, y.label.as_ref(), &Expr::tt(), &body);
                }
            }
            None => unreachable!(),
        }
    }

    pub fn successors(&self, s: &NamedState) -> BTreeSet<NamedState> {
        let mut out = BTreeSet::new();
        for inst in 0..self.insts.len() {
            self.each_entry(inst, |params, label, guard, body| {
                if label.is_some() {
                    return;
                }
                for env in valuations(params) {
                    if self.eval(inst, guard, &env, s) != 0 {
                        out.extend(self.exec(inst, body, &env, s.clone()));
                    }
                }
            });
        }
        out
    }

    /// Reachable states with their successor sets.
    pub fn reachable(&self) -> BTreeMap<NamedState, BTreeSet<NamedState>> {
        let mut seen = BTreeMap::new();
        let mut queue = VecDeque::from([self.initial()]);
        while let Some(s) = queue.pop_front() {
            if seen.contains_key(&s) {
                continue;
            }
            let succ = self.successors(&s);
            queue.extend(succ.iter().filter(|t| !seen.contains_key(*t)).cloned());
            seen.insert(s, succ);
        }
        seen
    }
}

pub fn named(model: &SystemModel, s: &StateVector) -> NamedState {
    model.vars().iter().zip(s.as_slice()).map(|(v, &x)| (v.name.clone(), x)).collect()
}

/// A random hierarchy: a root composite holding a leaf, an array of leaves
/// and a nested composite, all with random guards and actions.
/// Every value stays inside `0..=2`.
pub fn random_toy(seed: u64) -> TypeTable {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut table = TypeTable::new();
    for t in 0..2 {
        table = table.leaf(random_leaf(&mut rng, &format!("T{t}")));
    }
    let arg = |rng: &mut StdRng, param: &str| {
        if rng.gen_bool(0.5) {
            Expr::param(param)
        } else {
            Expr::int(rng.gen_range(0..2))
        }
    };
    let mut pair = CompositeType::new("Pair").instance("x", "T0").instance("y", "T1");
    pair = pair.sync(SyncDecl::new("pgo").param("r", 0, 1).label("pgo", vec![Expr::param("r")]).call(Call::on(
        if rng.gen_bool(0.5) { "x" } else { "y" },
        "go",
        vec![Expr::param("r")],
    )));
    let mut main = CompositeType::new("Main").instance("a", "T0").instance_array("b", "T1", 2).instance("sub", "Pair");
    for k in 0..rng.gen_range(1..4) {
        let mut sync = SyncDecl::new(format!("y{k}"));
        let parametric = rng.gen_bool(0.5);
        if parametric {
            sync = sync.param("q", 0, 1);
        }
        for _ in 0..rng.gen_range(1..3) {
            let a = if parametric { arg(&mut rng, "q") } else { Expr::int(rng.gen_range(0..2)) };
            let call = match rng.gen_range(0..3) {
                0 => Call::on("a", "go", vec![a]),
                1 if parametric && rng.gen_bool(0.5) => Call::on_elem("b", Expr::param("q"), "go", vec![a]),
                1 => Call::on_elem("b", Expr::int(rng.gen_range(0..2)), "go", vec![a]),
                _ => Call::on("sub", "pgo", vec![a]),
            };
            sync = sync.call(call);
        }
        main = main.sync(sync);
    }
    table.composite(pair).composite(main)
}

fn random_leaf(rng: &mut StdRng, name: &str) -> LeafType {
    let nvars = rng.gen_range(1..3);
    let vars: Vec<String> = (0..nvars).map(|i| format!("v{i}")).collect();
    let mut leaf = LeafType::new(name);
    for v in &vars {
        leaf.vars.push(VarDecl::new(v.clone(), 0, 2, 0));
    }
    let ntrans = rng.gen_range(2..5);
    for k in 0..ntrans {
        // transition 0 is always the "go" entry point
        let labeled = k == 0 || rng.gen_bool(0.3);
        let mut t = TransitionDecl::new(format!("t{k}")).param("p", 0, 1);
        let mut guard = Expr::tt();
        for _ in 0..rng.gen_range(0..3) {
            let v = Expr::var(vars[rng.gen_range(0..nvars)].clone());
            let rhs = if rng.gen_bool(0.3) { Expr::param("p") } else { Expr::int(rng.gen_range(0..3)) };
            let atom = match rng.gen_range(0..3) {
                0 => v.eq(rhs),
                1 => v.ne(rhs),
                _ => v.lt(rhs),
            };
            guard = if rng.gen_bool(0.7) { guard.and(atom) } else { guard.or(atom) };
        }
        t = t.guard(guard);
        if labeled {
            t = t.label("go", vec![Expr::param("p")]);
        }
        for _ in 0..rng.gen_range(1..3) {
            let v = vars[rng.gen_range(0..nvars)].clone();
            let value = match rng.gen_range(0..3) {
                0 => Expr::int(rng.gen_range(0..3)),
                1 => Expr::param("p"),
                _ => Expr::var(vars[rng.gen_range(0..nvars)].clone()),
            };
            t = t.action(Stmt::set(v, value));
        }
        if !labeled && rng.gen_bool(0.3) {
            t = t.action(Stmt::Call(Call::on_self("go", vec![Expr::param("p")])));
        }
        leaf.transitions.push(t);
    }
    leaf
}

/// Random Kripke structure with atoms `p`, `q`, `r`; about one state in ten is a deadlock.
pub fn random_kripke(rng: &mut impl Rng, max_states: usize) -> Kripke {
    let n = rng.gen_range(1..=max_states);
    let successors = (0..n)
        .map(|_| {
            if rng.gen_bool(0.1) {
                Vec::new()
            } else {
                (0..rng.gen_range(1..4)).map(|_| rng.gen_range(0..n)).collect()
            }
        })
        .collect();
    let valuation =
        ["p", "q", "r"].iter().map(|a| (a.to_string(), (0..n).map(|_| rng.gen_bool(0.4)).collect())).collect();
    Kripke { successors, valuation }
}

pub fn random_formula(rng: &mut impl Rng, depth: u32) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return match rng.gen_range(0..6) {
            0 => Formula::True,
            1 => Formula::Atom(Atom::Deadlock),
            2 => Formula::atom("q"),
            3 => Formula::atom("r"),
            _ => Formula::atom("p"),
        };
    }
    let mut sub = || random_formula(rng, depth - 1);
    let (a, b) = (sub(), sub());
    match rng.gen_range(0..13) {
        0 => Formula::not(a),
        1 => Formula::and(a, b),
        2 => Formula::or(a, b),
        3 => Formula::implies(a, b),
        4 => Formula::ex(a),
        5 => Formula::ax(a),
        6 => Formula::ef(a),
        7 => Formula::af(a),
        8 => Formula::eg(a),
        9 => Formula::ag(a),
        10 => Formula::eu(a, b),
        11 => Formula::au(a, b),
        _ => Formula::False,
    }
}

/// CTL semantics unrolled over paths of `n` steps. Deadlocks repeat forever.
pub fn bounded_ctl(k: &Kripke, f: &Formula) -> Vec<bool> {
    let n = k.successors.len();
    let succ = |s: usize| -> Vec<usize> {
        if k.successors[s].is_empty() {
            vec![s]
        } else {
            k.successors[s].clone()
        }
    };
    let ex = |v: &[bool]| (0..n).map(|s| succ(s).iter().any(|&t| v[t])).collect::<Vec<_>>();
    let ax = |v: &[bool]| (0..n).map(|s| succ(s).iter().all(|&t| v[t])).collect::<Vec<_>>();
    // path-bounded until: g_0 = q, g_{i+1} = q || (p && Q succ g_i)
    let until = |p: &[bool], q: &[bool], all: bool| {
        let mut g = q.to_vec();
        for _ in 0..n {
            let step = if all { ax(&g) } else { ex(&g) };
            g = (0..n).map(|s| q[s] || (p[s] && step[s])).collect();
        }
        g
    };
    // g_0 = p, g_{i+1} = p && Q succ g_i
    let globally = |p: &[bool], all: bool| {
        let mut g = p.to_vec();
        for _ in 0..n {
            let step = if all { ax(&g) } else { ex(&g) };
            g = (0..n).map(|s| p[s] && step[s]).collect();
        }
        g
    };
    let yes = vec![true; n];
    match f {
        Formula::True => yes,
        Formula::False => vec![false; n],
        Formula::Atom(Atom::Deadlock) => k.successors.iter().map(|s| s.is_empty()).collect(),
        Formula::Atom(Atom::Named { name, .. }) => k.valuation[name].clone(),
        Formula::Atom(a) => panic!("unsupported atom {a}"),
        Formula::Not(a) => bounded_ctl(k, a).iter().map(|b| !b).collect(),
        Formula::And(a, b) => zip(&bounded_ctl(k, a), &bounded_ctl(k, b), |x, y| x && y),
        Formula::Or(a, b) => zip(&bounded_ctl(k, a), &bounded_ctl(k, b), |x, y| x || y),
        Formula::Implies(a, b) => zip(&bounded_ctl(k, a), &bounded_ctl(k, b), |x, y| !x || y),
        Formula::EX(a) => ex(&bounded_ctl(k, a)),
        Formula::AX(a) => ax(&bounded_ctl(k, a)),
        Formula::EF(a) => until(&yes, &bounded_ctl(k, a), false),
        Formula::AF(a) => until(&yes, &bounded_ctl(k, a), true),
        Formula::EG(a) => globally(&bounded_ctl(k, a), false),
        Formula::AG(a) => globally(&bounded_ctl(k, a), true),
        Formula::EU(a, b) => until(&bounded_ctl(k, a), &bounded_ctl(k, b), false),
        Formula::AU(a, b) => until(&bounded_ctl(k, a), &bounded_ctl(k, b), true),
    }
}

fn zip(a: &[bool], b: &[bool], f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect()
}
