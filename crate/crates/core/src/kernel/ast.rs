//! Declarations for hierarchical guarded-transition systems.
//!
//! Leaf types own bounded integer variables and transitions
//! `⟨guard, label, actions⟩`; composite types own instances and
//! synchronizations `⟨label, calls⟩`. Transitions and synchronizations may be
//! parametric over finite integer ranges and are grounded into one concrete
//! entry per parameter valuation by [`ground_model`](super::ground_model).

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }

    pub fn apply(self, a: i32, b: i32) -> i32 {
        match self {
            BinOp::Add => a + b,
            BinOp::Sub => a - b,
            BinOp::Eq => (a == b) as i32,
            BinOp::Ne => (a != b) as i32,
            BinOp::Lt => (a < b) as i32,
            BinOp::Le => (a <= b) as i32,
            BinOp::Gt => (a > b) as i32,
            BinOp::Ge => (a >= b) as i32,
            BinOp::And => (a != 0 && b != 0) as i32,
            BinOp::Or => (a != 0 || b != 0) as i32,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnOp {
    Not,
    Neg,
}

/// Integer expression. Booleans are integers: zero is false.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(i32),
    Param(String),
    Var(VarRef),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

/// A variable, or one cell of a flattened array (`name[index]`).
///
/// The index must be closed once parameters are substituted.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarRef {
    pub name: String,
    pub index: Option<Box<Expr>>,
}

impl VarRef {
    pub fn scalar(name: impl Into<String>) -> Self {
        VarRef { name: name.into(), index: None }
    }

    pub fn cell(name: impl Into<String>, index: Expr) -> Self {
        VarRef { name: name.into(), index: Some(Box::new(index)) }
    }
}

#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn int(v: i32) -> Expr {
        Expr::Const(v)
    }

    pub fn tt() -> Expr {
        Expr::Const(1)
    }

    pub fn ff() -> Expr {
        Expr::Const(0)
    }

    pub fn param(name: impl Into<String>) -> Expr {
        Expr::Param(name.into())
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(VarRef::scalar(name))
    }

    pub fn cell(name: impl Into<String>, index: Expr) -> Expr {
        Expr::Var(VarRef::cell(name, index))
    }

    fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn add(self, rhs: Expr) -> Expr {
        Expr::bin(BinOp::Add, self, rhs)
    }

    pub fn sub(self, rhs: Expr) -> Expr {
        Expr::bin(BinOp::Sub, self, rhs)
    }

    pub fn eq(self, rhs: Expr) -> Expr {
        Expr::bin(BinOp::Eq, self, rhs)
    }

    pub fn ne(self, rhs: Expr) -> Expr {
        Expr::bin(BinOp::Ne, self, rhs)
    }

    pub fn lt(self, rhs: Expr) -> Expr {
        Expr::bin(BinOp::Lt, self, rhs)
    }

    pub fn le(self, rhs: Expr) -> Expr {
        Expr::bin(BinOp::Le, self, rhs)
    }

    pub fn gt(self, rhs: Expr) -> Expr {
        Expr::bin(BinOp::Gt, self, rhs)
    }

    pub fn ge(self, rhs: Expr) -> Expr {
        Expr::bin(BinOp::Ge, self, rhs)
    }

    pub fn and(self, rhs: Expr) -> Expr {
        Expr::bin(BinOp::And, self, rhs)
    }

    pub fn or(self, rhs: Expr) -> Expr {
        Expr::bin(BinOp::Or, self, rhs)
    }

    pub fn not(self) -> Expr {
        Expr::Unary(UnOp::Not, Box::new(self))
    }

    /// Conjunction of all items; `true` when empty.
    pub fn all(items: impl IntoIterator<Item = Expr>) -> Expr {
        items.into_iter().reduce(Expr::and).unwrap_or_else(Expr::tt)
    }

    /// Disjunction of all items; `false` when empty.
    pub fn any(items: impl IntoIterator<Item = Expr>) -> Expr {
        items.into_iter().reduce(Expr::or).unwrap_or_else(Expr::ff)
    }

    /// Sum of all items; `0` when empty.
    pub fn sum(items: impl IntoIterator<Item = Expr>) -> Expr {
        items.into_iter().reduce(Expr::add).unwrap_or(Expr::Const(0))
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.index {
            None => write!(f, "{}", self.name),
            Some(i) => write!(f, "{}[{}]", self.name, i),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => write!(f, "{v}"),
            Expr::Param(p) => write!(f, "${p}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Unary(UnOp::Not, e) => write!(f, "!({e})"),
            Expr::Unary(UnOp::Neg, e) => write!(f, "-({e})"),
            Expr::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
        }
    }
}

/// A bounded integer variable. Arrays are declared as one `VarDecl` per cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub lo: i32,
    pub hi: i32,
    pub initial: i32,
}

impl VarDecl {
    pub fn new(name: impl Into<String>, lo: i32, hi: i32, initial: i32) -> Self {
        VarDecl { name: name.into(), lo, hi, initial }
    }

    /// Cells `name[0] .. name[len-1]`, all with the same domain.
    pub fn array(name: &str, len: usize, lo: i32, hi: i32, initial: i32) -> Vec<VarDecl> {
        (0..len).map(|i| VarDecl::new(format!("{name}[{i}]"), lo, hi, initial)).collect()
    }
}

/// Parameter over the inclusive range `lo..=hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub lo: i32,
    pub hi: i32,
}

impl Param {
    pub fn new(name: impl Into<String>, lo: i32, hi: i32) -> Self {
        Param { name: name.into(), lo, hi }
    }

    pub fn size(&self) -> usize {
        if self.hi < self.lo {
            0
        } else {
            (self.hi - self.lo) as usize + 1
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Label {
    pub name: String,
    pub args: Vec<Expr>,
}

impl Label {
    pub fn new(name: impl Into<String>, args: Vec<Expr>) -> Self {
        Label { name: name.into(), args }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    /// The enclosing instance.
    SelfRef,
    /// A nested instance, optionally an element of an instance array.
    Instance { name: String, index: Option<Expr> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Call {
    pub target: Target,
    pub label: String,
    pub args: Vec<Expr>,
}

impl Call {
    pub fn on_self(label: impl Into<String>, args: Vec<Expr>) -> Self {
        Call { target: Target::SelfRef, label: label.into(), args }
    }

    pub fn on(instance: impl Into<String>, label: impl Into<String>, args: Vec<Expr>) -> Self {
        Call { target: Target::Instance { name: instance.into(), index: None }, label: label.into(), args }
    }

    pub fn on_elem(instance: impl Into<String>, index: Expr, label: impl Into<String>, args: Vec<Expr>) -> Self {
        Call { target: Target::Instance { name: instance.into(), index: Some(index) }, label: label.into(), args }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Assign(VarRef, Expr),
    Call(Call),
}

impl Stmt {
    pub fn set(var: impl Into<String>, value: Expr) -> Stmt {
        Stmt::Assign(VarRef::scalar(var), value)
    }

    pub fn set_cell(var: impl Into<String>, index: Expr, value: Expr) -> Stmt {
        Stmt::Assign(VarRef::cell(var, index), value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub guard: Expr,
    pub label: Option<Label>,
    pub actions: Vec<Stmt>,
}

impl TransitionDecl {
    pub fn new(name: impl Into<String>) -> Self {
        TransitionDecl { name: name.into(), params: Vec::new(), guard: Expr::tt(), label: None, actions: Vec::new() }
    }

    pub fn param(mut self, name: impl Into<String>, lo: i32, hi: i32) -> Self {
        self.params.push(Param::new(name, lo, hi));
        self
    }

    pub fn guard(mut self, guard: Expr) -> Self {
        self.guard = guard;
        self
    }

    pub fn label(mut self, name: impl Into<String>, args: Vec<Expr>) -> Self {
        self.label = Some(Label::new(name, args));
        self
    }

    pub fn action(mut self, stmt: Stmt) -> Self {
        self.actions.push(stmt);
        self
    }

    pub fn actions(mut self, stmts: impl IntoIterator<Item = Stmt>) -> Self {
        self.actions.extend(stmts);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafType {
    pub name: String,
    pub vars: Vec<VarDecl>,
    pub transitions: Vec<TransitionDecl>,
}

impl LeafType {
    pub fn new(name: impl Into<String>) -> Self {
        LeafType { name: name.into(), vars: Vec::new(), transitions: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceDecl {
    pub name: String,
    pub type_name: String,
    /// `Some(n)` declares an instance array `name[0..n]`.
    pub count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub label: Option<Label>,
    pub calls: Vec<Call>,
}

impl SyncDecl {
    pub fn new(name: impl Into<String>) -> Self {
        SyncDecl { name: name.into(), params: Vec::new(), label: None, calls: Vec::new() }
    }

    pub fn param(mut self, name: impl Into<String>, lo: i32, hi: i32) -> Self {
        self.params.push(Param::new(name, lo, hi));
        self
    }

    pub fn label(mut self, name: impl Into<String>, args: Vec<Expr>) -> Self {
        self.label = Some(Label::new(name, args));
        self
    }

    pub fn call(mut self, call: Call) -> Self {
        self.calls.push(call);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeType {
    pub name: String,
    pub instances: Vec<InstanceDecl>,
    pub syncs: Vec<SyncDecl>,
}

impl CompositeType {
    pub fn new(name: impl Into<String>) -> Self {
        CompositeType { name: name.into(), instances: Vec::new(), syncs: Vec::new() }
    }

    pub fn instance(mut self, name: impl Into<String>, type_name: impl Into<String>) -> Self {
        self.instances.push(InstanceDecl { name: name.into(), type_name: type_name.into(), count: None });
        self
    }

    pub fn instance_array(mut self, name: impl Into<String>, type_name: impl Into<String>, count: usize) -> Self {
        self.instances.push(InstanceDecl { name: name.into(), type_name: type_name.into(), count: Some(count) });
        self
    }

    pub fn sync(mut self, sync: SyncDecl) -> Self {
        self.syncs.push(sync);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeDecl {
    Leaf(LeafType),
    Composite(CompositeType),
}

impl TypeDecl {
    pub fn name(&self) -> &str {
        match self {
            TypeDecl::Leaf(l) => &l.name,
            TypeDecl::Composite(c) => &c.name,
        }
    }
}

/// Named type declarations, in insertion order.
#[derive(Debug, Clone, Default)]
pub struct TypeTable {
    types: Vec<TypeDecl>,
}

impl TypeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, decl: TypeDecl) -> &mut Self {
        self.types.retain(|t| t.name() != decl.name());
        self.types.push(decl);
        self
    }

    pub fn leaf(mut self, leaf: LeafType) -> Self {
        self.add(TypeDecl::Leaf(leaf));
        self
    }

    pub fn composite(mut self, comp: CompositeType) -> Self {
        self.add(TypeDecl::Composite(comp));
        self
    }

    pub fn get(&self, name: &str) -> Option<&TypeDecl> {
        self.types.iter().find(|t| t.name() == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &TypeDecl> {
        self.types.iter()
    }
}
