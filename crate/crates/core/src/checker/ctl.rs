//! CTL evaluation by fixpoint iteration over explicit graphs.

use std::collections::BTreeMap;

use super::formula::{Atom, Formula};
use super::CheckError;

/// A finite transition structure with a way to label atoms.
pub trait CtlModel {
    fn num_states(&self) -> usize;
    /// Appends the successors of `s` (duplicates allowed).
    fn successors(&self, s: usize, out: &mut Vec<usize>);
    /// Characteristic vector of an atom.
    fn label(&self, atom: &Atom) -> Result<Vec<bool>, CheckError>;
    fn is_complete(&self) -> bool {
        true
    }
}

/// Kripke structure given by adjacency lists and named atom valuations.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Kripke {
    pub successors: Vec<Vec<usize>>,
    pub valuation: BTreeMap<String, Vec<bool>>,
}

impl CtlModel for Kripke {
    fn num_states(&self) -> usize {
        self.successors.len()
    }

    fn successors(&self, s: usize, out: &mut Vec<usize>) {
        out.extend_from_slice(&self.successors[s]);
    }

    fn label(&self, atom: &Atom) -> Result<Vec<bool>, CheckError> {
        match atom {
            Atom::Deadlock => Ok(self.successors.iter().map(|s| s.is_empty()).collect()),
            Atom::Named { name, args } if args.is_empty() => {
                self.valuation.get(name).cloned().ok_or_else(|| CheckError::UnknownAtom(name.clone()))
            }
            other => Err(CheckError::UnknownAtom(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CtlResult {
    pub sat: Vec<bool>,
}

impl CtlResult {
    /// Verdict at the initial state (index 0); vacuously true on an empty graph.
    pub fn holds(&self) -> bool {
        self.sat.first().copied().unwrap_or(true)
    }

    pub fn count(&self) -> usize {
        self.sat.iter().filter(|b| **b).count()
    }

    pub fn states(&self) -> impl Iterator<Item = usize> + '_ {
        self.sat.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i)
    }
}

/// Deduplicated forward and backward adjacency with deadlocks closed by self-loops.
pub(crate) struct Totalized {
    succ_off: Vec<usize>,
    succ: Vec<u32>,
    pred_off: Vec<usize>,
    pred: Vec<u32>,
}

impl Totalized {
    pub(crate) fn new<M: CtlModel + ?Sized>(m: &M) -> Self {
        let n = m.num_states();
        let mut succ_off = Vec::with_capacity(n + 1);
        let mut succ = Vec::new();
        let mut buf = Vec::new();
        succ_off.push(0);
        for s in 0..n {
            buf.clear();
            m.successors(s, &mut buf);
            buf.sort_unstable();
            buf.dedup();
            if buf.is_empty() {
                buf.push(s);
            }
            succ.extend(buf.iter().map(|&d| d as u32));
            succ_off.push(succ.len());
        }
        let mut indeg = vec![0usize; n + 1];
        for &d in &succ {
            indeg[d as usize + 1] += 1;
        }
        for i in 0..n {
            indeg[i + 1] += indeg[i];
        }
        let pred_off = indeg.clone();
        let mut fill = indeg;
        let mut pred = vec![0u32; succ.len()];
        for s in 0..n {
            for &d in &succ[succ_off[s]..succ_off[s + 1]] {
                pred[fill[d as usize]] = s as u32;
                fill[d as usize] += 1;
            }
        }
        Totalized { succ_off, succ, pred_off, pred }
    }

    pub(crate) fn len(&self) -> usize {
        self.succ_off.len() - 1
    }

    pub(crate) fn succ(&self, s: usize) -> &[u32] {
        &self.succ[self.succ_off[s]..self.succ_off[s + 1]]
    }

    pub(crate) fn pred(&self, s: usize) -> &[u32] {
        &self.pred[self.pred_off[s]..self.pred_off[s + 1]]
    }

    fn ex(&self, p: &[bool]) -> Vec<bool> {
        (0..self.len()).map(|s| self.succ(s).iter().any(|&d| p[d as usize])).collect()
    }

    fn ax(&self, p: &[bool]) -> Vec<bool> {
        (0..self.len()).map(|s| self.succ(s).iter().all(|&d| p[d as usize])).collect()
    }

    /// Least fixpoint of `Z = q ∪ (p ∩ EX Z)` by backward search.
    fn eu(&self, p: &[bool], q: &[bool]) -> Vec<bool> {
        let mut z = q.to_vec();
        let mut stack: Vec<usize> = (0..self.len()).filter(|&s| q[s]).collect();
        while let Some(s) = stack.pop() {
            for &u in self.pred(s) {
                let u = u as usize;
                if !z[u] && p[u] {
                    z[u] = true;
                    stack.push(u);
                }
            }
        }
        z
    }

    /// Least fixpoint of `Z = q ∪ (p ∩ AX Z)`, counting successors not yet in `Z`.
    fn au(&self, p: &[bool], q: &[bool]) -> Vec<bool> {
        let mut z = q.to_vec();
        let mut missing: Vec<usize> = (0..self.len()).map(|s| self.succ(s).len()).collect();
        let mut stack: Vec<usize> = (0..self.len()).filter(|&s| q[s]).collect();
        while let Some(s) = stack.pop() {
            for &u in self.pred(s) {
                let u = u as usize;
                missing[u] -= 1;
                if missing[u] == 0 && !z[u] && p[u] {
                    z[u] = true;
                    stack.push(u);
                }
            }
        }
        z
    }

    /// Greatest fixpoint of `Z = p ∩ EX Z`, peeling states left without a successor in `Z`.
    fn eg(&self, p: &[bool]) -> Vec<bool> {
        let mut z = p.to_vec();
        let mut inside: Vec<usize> =
            (0..self.len()).map(|s| self.succ(s).iter().filter(|&&d| p[d as usize]).count()).collect();
        let mut stack: Vec<usize> = (0..self.len()).filter(|&s| z[s] && inside[s] == 0).collect();
        for &s in &stack {
            z[s] = false;
        }
        while let Some(s) = stack.pop() {
            for &u in self.pred(s) {
                let u = u as usize;
                if z[u] {
                    inside[u] -= 1;
                    if inside[u] == 0 {
                        z[u] = false;
                        stack.push(u);
                    }
                }
            }
        }
        z
    }

    /// Greatest fixpoint of `Z = p ∩ AX Z`, removing every state that can leave `Z`.
    fn ag(&self, p: &[bool]) -> Vec<bool> {
        let mut z = p.to_vec();
        let mut stack: Vec<usize> = (0..self.len()).filter(|&s| !p[s]).collect();
        while let Some(s) = stack.pop() {
            for &u in self.pred(s) {
                let u = u as usize;
                if z[u] {
                    z[u] = false;
                    stack.push(u);
                }
            }
        }
        z
    }
}

fn zip(a: &[bool], b: &[bool], f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.iter().zip(b).map(|(x, y)| f(*x, *y)).collect()
}

pub(crate) fn eval_in<M: CtlModel + ?Sized>(m: &M, t: &Totalized, f: &Formula) -> Result<Vec<bool>, CheckError> {
    use Formula::*;
    let n = t.len();
    Ok(match f {
        True => vec![true; n],
        False => vec![false; n],
        Atom(a) => m.label(a)?,
        Not(a) => eval_in(m, t, a)?.into_iter().map(|b| !b).collect(),
        And(a, b) => zip(&eval_in(m, t, a)?, &eval_in(m, t, b)?, |x, y| x && y),
        Or(a, b) => zip(&eval_in(m, t, a)?, &eval_in(m, t, b)?, |x, y| x || y),
        Implies(a, b) => zip(&eval_in(m, t, a)?, &eval_in(m, t, b)?, |x, y| !x || y),
        EX(a) => t.ex(&eval_in(m, t, a)?),
        AX(a) => t.ax(&eval_in(m, t, a)?),
        EF(a) => t.eu(&vec![true; n], &eval_in(m, t, a)?),
        AF(a) => t.au(&vec![true; n], &eval_in(m, t, a)?),
        EG(a) => t.eg(&eval_in(m, t, a)?),
        AG(a) => t.ag(&eval_in(m, t, a)?),
        EU(a, b) => t.eu(&eval_in(m, t, a)?, &eval_in(m, t, b)?),
        AU(a, b) => t.au(&eval_in(m, t, a)?, &eval_in(m, t, b)?),
    })
}

/// Satisfying set of `f`. Deadlock states behave as if they had a self-loop.
pub fn eval_ctl<M: CtlModel + ?Sized>(m: &M, f: &Formula) -> Result<CtlResult, CheckError> {
    if !m.is_complete() {
        return Err(CheckError::PartialGraph);
    }
    let t = Totalized::new(m);
    Ok(CtlResult { sat: eval_in(m, &t, f)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::parse_formula;

    fn chain() -> Kripke {
        Kripke {
            successors: vec![vec![1], vec![2], vec![]],
            valuation: BTreeMap::from([("p".to_string(), vec![false, false, true])]),
        }
    }

    fn sat(k: &Kripke, f: &str) -> Vec<usize> {
        eval_ctl(k, &parse_formula(f).unwrap()).unwrap().states().collect()
    }

    #[test]
    fn chain_ef_and_ag() {
        let k = chain();
        assert_eq!(sat(&k, "EF p"), vec![0, 1, 2]);
        assert_eq!(sat(&k, "AG p"), vec![2]);
        assert_eq!(sat(&k, "AG(true)"), vec![0, 1, 2]);
        assert_eq!(sat(&k, "deadlock"), vec![2]);
        assert_eq!(sat(&k, "EX EX p"), vec![0, 1, 2]);
        assert_eq!(sat(&k, "EG !p"), Vec::<usize>::new());
    }

    #[test]
    fn until_needs_left_side() {
        let mut k = chain();
        k.valuation.insert("q".into(), vec![true, false, false]);
        assert_eq!(sat(&k, "E[q U p]"), vec![2]);
        assert_eq!(sat(&k, "A[true U p]"), vec![0, 1, 2]);
    }

    #[test]
    fn branching_distinguishes_a_from_e() {
        // 0 -> {1, 2}, 1 -> 1, 2 -> 2; p at 1 only
        let k = Kripke {
            successors: vec![vec![1, 2], vec![1], vec![2]],
            valuation: BTreeMap::from([("p".to_string(), vec![false, true, false])]),
        };
        assert_eq!(sat(&k, "EF p"), vec![0, 1]);
        assert_eq!(sat(&k, "AF p"), vec![1]);
        assert_eq!(sat(&k, "EG !p"), vec![0, 2]);
        assert_eq!(sat(&k, "AX p"), vec![1]);
    }

    #[test]
    fn unknown_atom_is_an_error() {
        assert!(matches!(eval_ctl(&chain(), &parse_formula("zz").unwrap()), Err(CheckError::UnknownAtom(_))));
    }

    #[test]
    fn empty_structure_is_vacuous() {
        let r = eval_ctl(&Kripke::default(), &Formula::False).unwrap();
        assert!(r.holds());
        assert_eq!(r.count(), 0);
    }
}
