//! Property checking over explored state graphs, from plain invariants up to
//! CTL and response liveness under weak fairness.
//!
//! Atoms are bound against a model when a formula is checked. Comparison
//! atoms (`l2[0].n_copies <= 2`, `cpu[0].c.state == L1_VALID`) name a
//! flattened variable and an integer or symbol; named atoms
//! (`quiescent`, `share(0,1)`) are supplied by an [`AtomResolver`].

mod ctl;
mod fair;
mod formula;

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::explorer::{ShortestPaths, StateGraph, Trace};
use crate::kernel::SystemModel;

pub use ctl::{eval_ctl, CtlModel, CtlResult, Kripke};
pub use fair::{verify_lasso, EventOwner, FairnessSpec, Lasso, LivenessVerdict};
pub use formula::{parse_formula, parse_property_file, Atom, CmpOp, Formula, Literal, ParseError};

pub type StatePredicate = Arc<dyn Fn(&[i32]) -> bool + Send + Sync>;

/// Supplies derived atoms. `None` means the name is unknown to this resolver.
pub trait AtomResolver {
    fn resolve(&self, name: &str, args: &[i32]) -> Option<Result<StatePredicate, String>>;
}

/// Resolver with no derived atoms.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoAtoms;

impl AtomResolver for NoAtoms {
    fn resolve(&self, _: &str, _: &[i32]) -> Option<Result<StatePredicate, String>> {
        None
    }
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("bad atom: {0}")]
    BadAtom(String),
    #[error("unsound on partial graph: exploration was capped")]
    PartialGraph,
    #[error("`{0}` must be a state formula without temporal operators")]
    NotPropositional(String),
}

/// Outcome of [`Checker::check_invariant_everywhere`].
#[derive(Debug, Clone)]
pub struct InvariantVerdict {
    pub holds: bool,
    pub violations: usize,
    /// Shortest trace to a violating state.
    pub counterexample: Option<Trace>,
}

#[derive(Debug, Clone)]
pub enum Counterexample {
    Trace(Trace),
    Lasso(Lasso),
}

/// Outcome of [`Checker::check`].
#[derive(Debug, Clone)]
pub struct Verdict {
    pub holds: bool,
    pub states_satisfying: usize,
    pub counterexample: Option<Counterexample>,
}

/// A state graph together with the model it was explored from and a resolver for derived atoms.
pub struct Checker<'a> {
    graph: &'a StateGraph,
    model: &'a SystemModel,
    resolver: &'a (dyn AtomResolver + Sync),
}

impl<'a> Checker<'a> {
    pub fn new(graph: &'a StateGraph, model: &'a SystemModel, resolver: &'a (dyn AtomResolver + Sync)) -> Self {
        Checker { graph, model, resolver }
    }

    pub fn graph(&self) -> &StateGraph {
        self.graph
    }

    /// Binds an atom to a predicate over state vectors. `deadlock` is rejected
    /// here since it depends on the graph, not the state.
    pub fn bind_atom(&self, atom: &Atom) -> Result<StatePredicate, CheckError> {
        match atom {
            Atom::Deadlock => Err(CheckError::BadAtom("`deadlock` has no state-only binding".into())),
            Atom::Compare { path, op, value } => {
                let var = self.model.var_index(path).ok_or_else(|| CheckError::UnknownVariable(path.clone()))?;
                let rhs = match value {
                    Literal::Int(v) => *v,
                    Literal::Symbol(s) => {
                        *self.model.symbols().get(s).ok_or_else(|| CheckError::UnknownSymbol(s.clone()))?
                    }
                };
                let op = *op;
                Ok(Arc::new(move |s: &[i32]| op.apply(s[var], rhs)))
            }
            Atom::Named { name, args } => match self.resolver.resolve(name, args) {
                Some(r) => r.map_err(CheckError::BadAtom),
                None if args.is_empty() => match self.model.var_index(name) {
                    Some(var) => Ok(Arc::new(move |s: &[i32]| s[var] != 0)),
                    None => Err(CheckError::UnknownAtom(name.clone())),
                },
                None => Err(CheckError::UnknownAtom(atom.to_string())),
            },
        }
    }

    /// Binds a propositional formula without `deadlock`.
    pub fn bind(&self, f: &Formula) -> Result<StatePredicate, CheckError> {
        use Formula::*;
        Ok(match f {
            True => Arc::new(|_: &[i32]| true),
            False => Arc::new(|_: &[i32]| false),
            Atom(a) => self.bind_atom(a)?,
            Not(a) => {
                let a = self.bind(a)?;
                Arc::new(move |s: &[i32]| !a(s))
            }
            And(a, b) => {
                let (a, b) = (self.bind(a)?, self.bind(b)?);
                Arc::new(move |s: &[i32]| a(s) && b(s))
            }
            Or(a, b) => {
                let (a, b) = (self.bind(a)?, self.bind(b)?);
                Arc::new(move |s: &[i32]| a(s) || b(s))
            }
            Implies(a, b) => {
                let (a, b) = (self.bind(a)?, self.bind(b)?);
                Arc::new(move |s: &[i32]| !a(s) || b(s))
            }
            other => return Err(CheckError::NotPropositional(other.to_string())),
        })
    }

    fn label_propositional(&self, f: &Formula) -> Result<Vec<bool>, CheckError> {
        if !f.is_propositional() {
            return Err(CheckError::NotPropositional(f.to_string()));
        }
        let t = ctl::Totalized::new(self);
        ctl::eval_in(self, &t, f)
    }

    pub fn eval(&self, f: &Formula) -> Result<CtlResult, CheckError> {
        eval_ctl(self, f)
    }

    /// AG over a state formula; on failure, a shortest trace to a violating state.
    pub fn check_invariant_everywhere(&self, f: &Formula) -> Result<InvariantVerdict, CheckError> {
        if !self.graph.is_complete() {
            return Err(CheckError::PartialGraph);
        }
        let sat = self.label_propositional(f)?;
        let bad: Vec<u32> = (0..sat.len() as u32).filter(|&s| !sat[s as usize]).collect();
        if bad.is_empty() {
            return Ok(InvariantVerdict { holds: true, violations: 0, counterexample: None });
        }
        let sp = ShortestPaths::new(self.graph);
        let first = *bad.iter().min_by_key(|&&s| (sp.depth(s), s)).expect("nonempty");
        let trace = sp.trace(self.graph, first).expect("explored states are reachable");
        Ok(InvariantVerdict { holds: false, violations: bad.len(), counterexample: Some(trace) })
    }

    /// "Every `req` state is followed by a `resp` state on every fair path."
    pub fn check_response_liveness(
        &self,
        req: &Formula,
        resp: &Formula,
        fairness: &FairnessSpec,
    ) -> Result<LivenessVerdict, CheckError> {
        if !self.graph.is_complete() {
            return Err(CheckError::PartialGraph);
        }
        let req = self.label_propositional(req)?;
        let resp = self.label_propositional(resp)?;
        Ok(fair::response_liveness(self.graph, &req, &resp, fairness))
    }

    /// Checks a property. State formulas are read as invariants. `AG p` and
    /// `AG(p -> AF q)` with state formulas `p`, `q` come with a trace or a
    /// lasso on failure; other formulas are evaluated at the initial state.
    pub fn check(&self, f: &Formula) -> Result<Verdict, CheckError> {
        let as_invariant = match f {
            _ if f.is_propositional() => Some(f),
            Formula::AG(p) if p.is_propositional() => Some(&**p),
            _ => None,
        };
        if let Some(p) = as_invariant {
            let r = self.check_invariant_everywhere(p)?;
            let sat = eval_ctl(self, &Formula::ag(p.clone()))?;
            return Ok(Verdict {
                holds: r.holds,
                states_satisfying: sat.count(),
                counterexample: r.counterexample.map(Counterexample::Trace),
            });
        }
        let sat = self.eval(f)?;
        if let Formula::AG(body) = f {
            if let Formula::Implies(p, q) = &**body {
                if let Formula::AF(q) = &**q {
                    if p.is_propositional() && q.is_propositional() {
                        let r = self.check_response_liveness(p, q, &FairnessSpec::none())?;
                        debug_assert_eq!(r.holds, sat.holds());
                        return Ok(Verdict {
                            holds: sat.holds(),
                            states_satisfying: sat.count(),
                            counterexample: r.lasso.map(Counterexample::Lasso),
                        });
                    }
                }
            }
        }
        Ok(Verdict { holds: sat.holds(), states_satisfying: sat.count(), counterexample: None })
    }
}

impl CtlModel for Checker<'_> {
    fn num_states(&self) -> usize {
        self.graph.num_states()
    }

    fn successors(&self, s: usize, out: &mut Vec<usize>) {
        out.extend(self.graph.edges(s as u32).iter().map(|e| e.dst as usize));
    }

    fn label(&self, atom: &Atom) -> Result<Vec<bool>, CheckError> {
        let g = self.graph;
        if *atom == Atom::Deadlock {
            return Ok((0..g.num_states() as u32).map(|s| g.is_expanded(s) && g.edges(s).is_empty()).collect());
        }
        let p = self.bind_atom(atom)?;
        Ok((0..g.num_states() as u32).into_par_iter().map(|s| p(&g.state(s))).collect())
    }

    fn is_complete(&self) -> bool {
        self.graph.is_complete()
    }
}
