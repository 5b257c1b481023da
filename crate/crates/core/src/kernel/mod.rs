//! Execution semantics for hierarchical guarded-transition systems.
//!
//! A model is a table of leaf and composite types plus a designated root
//! type. [`ground_model`] instantiates the root, flattens every variable into
//! a single [`StateVector`] layout and expands parametric transitions into
//! concrete entries. Only unlabeled entries fire on their own; labeled ones
//! run when a call names their label, and a call with no enabled candidate
//! disables the whole enclosing entry.

mod ast;
mod model;

pub use ast::*;
pub use model::{
    ground_model, Event, GroundEntry, GroundLabel, InstanceInfo, Resolution, StateVector, SystemModel, VarInfo,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown parameter `${0}`")]
    UnknownParam(String),
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
    #[error("no transition labeled \"{label}\" in `{instance}`")]
    UnknownLabel { label: String, instance: String },
    #[error("label \"{label}\" in `{instance}` called with {got} arguments")]
    LabelArity { label: String, instance: String, got: usize },
    #[error("parameter `${param}` of `{owner}` has an empty range")]
    EmptyRange { owner: String, param: String },
    #[error("cyclic instantiation: {0}")]
    CyclicInstantiation(String),
    #[error("cyclic label call through `{0}`")]
    CyclicCall(String),
    #[error("expression `{0}` must only mention parameters")]
    NotClosed(String),
    #[error("duplicate {0}")]
    Duplicate(String),
    #[error("variable `{var}`: initial value {initial} outside [{lo}, {hi}]")]
    BadDomain { var: String, lo: i32, hi: i32, initial: i32 },
    #[error("guard of `{0}` is false")]
    GuardFalse(String),
    #[error("call cannot be resolved: {0}")]
    Unresolvable(String),
    #[error("`{var}` := {value} is outside [{lo}, {hi}]")]
    DomainViolation { var: String, value: i32, lo: i32, hi: i32 },
    #[error("malformed event: {0}")]
    BadEvent(String),
}
