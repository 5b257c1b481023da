//! A small rule language for channel-driven automata.
//!
//! Each rule reads at most a few messages, may test the coherence request
//! network, updates local variables and writes messages, all atomically. A
//! rule becomes one leaf transition labeled with its name and parameters;
//! the channel operations are wired in by the enclosing synchronizations.
//! The owning instance index (cache id or bank address) is the reserved
//! parameter `$self`, bound only at the level where the instance is chosen.

use crate::kernel::{Call, Expr, LeafType, Param, Stmt, SyncDecl, TransitionDecl};

use super::messages::{Channel, MessageType};

pub const SELF: &str = "self";

#[derive(Debug, Clone)]
pub struct Msg {
    pub chan: Channel,
    pub addr: Expr,
    pub kind: MessageType,
    pub id: Option<Expr>,
}

impl Msg {
    pub fn new(kind: MessageType, addr: Expr) -> Self {
        Msg { chan: kind.channel(), addr, kind, id: None }
    }

    pub fn to(kind: MessageType, addr: Expr, id: Expr) -> Self {
        Msg { chan: kind.channel(), addr, kind, id: Some(id) }
    }

    fn args(&self) -> Vec<Expr> {
        let mut args = vec![self.addr.clone(), Expr::int(self.kind.code())];
        if let Some(id) = &self.id {
            args.push(id.clone());
        }
        args
    }

    fn call(&self, op: &str) -> Call {
        debug_assert_eq!(self.chan.has_id(), self.id.is_some(), "{} on {}", self.kind, self.chan);
        Call::on(self.chan.instance(), op, self.args())
    }
}

#[derive(Debug, Clone)]
pub struct Rule {
    pub name: String,
    pub params: Vec<Param>,
    pub guard: Expr,
    pub recv: Vec<Msg>,
    /// Ids that must have no coherence request pending for them.
    pub quiet_for: Vec<Expr>,
    pub send: Vec<Msg>,
    pub actions: Vec<Stmt>,
}

impl Rule {
    pub fn new(name: impl Into<String>) -> Self {
        Rule {
            name: name.into(),
            params: Vec::new(),
            guard: Expr::tt(),
            recv: Vec::new(),
            quiet_for: Vec::new(),
            send: Vec::new(),
            actions: Vec::new(),
        }
    }

    pub fn param(mut self, name: &str, lo: i32, hi: i32) -> Self {
        self.params.push(Param::new(name, lo, hi));
        self
    }

    pub fn when(mut self, cond: Expr) -> Self {
        self.guard = if matches!(self.guard, Expr::Const(1)) { cond } else { self.guard.and(cond) };
        self
    }

    pub fn recv(mut self, m: Msg) -> Self {
        self.recv.push(m);
        self
    }

    pub fn quiet_for(mut self, id: Expr) -> Self {
        self.quiet_for.push(id);
        self
    }

    pub fn send(mut self, m: Msg) -> Self {
        self.send.push(m);
        self
    }

    pub fn set(mut self, var: &str, value: Expr) -> Self {
        self.actions.push(Stmt::set(var, value));
        self
    }

    pub fn set_cell(mut self, var: &str, index: usize, value: Expr) -> Self {
        self.actions.push(Stmt::set_cell(var, Expr::int(index as i32), value));
        self
    }

    fn messages(&self) -> impl Iterator<Item = &Msg> {
        self.recv.iter().chain(&self.send)
    }

    pub fn is_internal(&self) -> bool {
        self.recv.is_empty() && self.send.is_empty() && self.quiet_for.is_empty()
    }

    /// True when every channel touched lives inside the processor composite.
    pub fn is_local(&self) -> bool {
        self.quiet_for.is_empty() && self.messages().all(|m| m.chan.is_local())
    }

    fn label_args(&self) -> Vec<Expr> {
        self.params.iter().map(|p| Expr::param(&p.name)).collect()
    }

    /// The leaf transition; internal rules stay unlabeled and fire on their own.
    pub fn transition(&self) -> TransitionDecl {
        let mut t = TransitionDecl::new(&self.name).guard(self.guard.clone()).actions(self.actions.clone());
        t.params = self.params.clone();
        if !self.is_internal() {
            t = t.label(&self.name, self.label_args());
        }
        t
    }

    /// Synchronization calling `instance.name(params)` surrounded by the
    /// channel operations accepted by `keep`. With `selector`, the instance
    /// is an array element indexed by `$self` over `0..selector`.
    pub fn sync(&self, instance: &str, selector: Option<i32>, keep: impl Fn(Channel) -> bool, label: bool) -> SyncDecl {
        let mut s = SyncDecl::new(format!("s_{}", self.name));
        if let Some(n) = selector {
            s = s.param(SELF, 0, n - 1);
        }
        s.params.extend(self.params.iter().cloned());
        for m in self.recv.iter().filter(|m| keep(m.chan)) {
            s = s.call(m.call("read"));
        }
        if keep(Channel::L2L1CPREQ) {
            for id in &self.quiet_for {
                s = s.call(Call::on(Channel::L2L1CPREQ.instance(), "not_for", vec![id.clone()]));
            }
        }
        s = s.call(match selector {
            Some(_) => Call::on_elem(instance, Expr::param(SELF), &self.name, self.label_args()),
            None => Call::on(instance, &self.name, self.label_args()),
        });
        for m in self.send.iter().filter(|m| keep(m.chan)) {
            s = s.call(m.call("write"));
        }
        if label {
            s = s.label(&self.name, self.label_args());
        }
        s
    }
}

/// Builds a leaf from variables and rules, plus any extra transitions.
pub fn leaf(name: &str, vars: Vec<crate::kernel::VarDecl>, rules: &[Rule], extra: Vec<TransitionDecl>) -> LeafType {
    let mut l = LeafType::new(name);
    l.vars = vars;
    l.transitions = extra;
    l.transitions.extend(rules.iter().map(Rule::transition));
    l
}
