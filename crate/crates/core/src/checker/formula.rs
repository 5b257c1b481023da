//! Property formulas and their parser.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn apply(self, a: i32, b: i32) -> bool {
        match self {
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Literal {
    Int(i32),
    /// A location or message name, looked up in the model's symbol table.
    Symbol(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    /// `name` or `name(args)`: a derived predicate supplied by a resolver.
    Named {
        name: String,
        args: Vec<i32>,
    },
    /// `path op literal` over a flattened variable.
    Compare {
        path: String,
        op: CmpOp,
        value: Literal,
    },
    Deadlock,
}

impl Atom {
    pub fn named(name: impl Into<String>) -> Self {
        Atom::Named { name: name.into(), args: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    EX(Box<Formula>),
    EF(Box<Formula>),
    EG(Box<Formula>),
    AX(Box<Formula>),
    AF(Box<Formula>),
    AG(Box<Formula>),
    EU(Box<Formula>, Box<Formula>),
    AU(Box<Formula>, Box<Formula>),
}

macro_rules! unary_ctor {
    ($($fn:ident => $v:ident),*) => {
        $(pub fn $fn(f: Formula) -> Formula { Formula::$v(Box::new(f)) })*
    };
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(Atom::named(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    unary_ctor!(ex => EX, ef => EF, eg => EG, ax => AX, af => AF, ag => AG);

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn eu(a: Formula, b: Formula) -> Formula {
        Formula::EU(Box::new(a), Box::new(b))
    }

    pub fn au(a: Formula, b: Formula) -> Formula {
        Formula::AU(Box::new(a), Box::new(b))
    }

    /// No temporal operator anywhere.
    pub fn is_propositional(&self) -> bool {
        use Formula::*;
        match self {
            True | False | Atom(_) => true,
            Not(a) => a.is_propositional(),
            And(a, b) | Or(a, b) | Implies(a, b) => a.is_propositional() && b.is_propositional(),
            _ => false,
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a Atom>) {
        use Formula::*;
        match self {
            True | False => {}
            Atom(a) => out.push(a),
            Not(a) | EX(a) | EF(a) | EG(a) | AX(a) | AF(a) | AG(a) => a.collect_atoms(out),
            And(a, b) | Or(a, b) | Implies(a, b) | EU(a, b) | AU(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Named { name, args } if args.is_empty() => f.write_str(name),
            Atom::Named { name, args } => {
                let args: Vec<String> = args.iter().map(|a| a.to_string()).collect();
                write!(f, "{name}({})", args.join(","))
            }
            Atom::Compare { path, op, value } => match value {
                Literal::Int(v) => write!(f, "{path} {} {v}", op.symbol()),
                Literal::Symbol(s) => write!(f, "{path} {} {s}", op.symbol()),
            },
            Atom::Deadlock => f.write_str("deadlock"),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        match self {
            True => f.write_str("true"),
            False => f.write_str("false"),
            Atom(a) => write!(f, "{a}"),
            Not(a) => write!(f, "!({a})"),
            And(a, b) => write!(f, "({a} && {b})"),
            Or(a, b) => write!(f, "({a} || {b})"),
            Implies(a, b) => write!(f, "({a} -> {b})"),
            EX(a) => write!(f, "EX({a})"),
            EF(a) => write!(f, "EF({a})"),
            EG(a) => write!(f, "EG({a})"),
            AX(a) => write!(f, "AX({a})"),
            AF(a) => write!(f, "AF({a})"),
            AG(a) => write!(f, "AG({a})"),
            EU(a, b) => write!(f, "E[{a} U {b}]"),
            AU(a, b) => write!(f, "A[{a} U {b}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at column {}: {message}", .position + 1)]
pub struct ParseError {
    /// Character offset into the input.
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i32),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Not,
    And,
    Or,
    Implies,
    Cmp(CmpOp),
    End,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let err = |position: usize, message: String| ParseError { position, message };
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBrack,
            ']' => Tok::RBrack,
            ',' => Tok::Comma,
            '¬' => Tok::Not,
            '∧' => Tok::And,
            '∨' => Tok::Or,
            '→' => Tok::Implies,
            _ if two == "->" || two == "=>" => {
                i += 1;
                Tok::Implies
            }
            _ if two == "&&" || two == "||" || two == "==" || two == "!=" || two == "<=" || two == ">=" => {
                i += 1;
                match two.as_str() {
                    "&&" => Tok::And,
                    "||" => Tok::Or,
                    "==" => Tok::Cmp(CmpOp::Eq),
                    "!=" => Tok::Cmp(CmpOp::Ne),
                    "<=" => Tok::Cmp(CmpOp::Le),
                    _ => Tok::Cmp(CmpOp::Ge),
                }
            }
            '!' | '~' => Tok::Not,
            '&' => Tok::And,
            '|' => Tok::Or,
            '=' => Tok::Cmp(CmpOp::Eq),
            '<' => Tok::Cmp(CmpOp::Lt),
            '>' => Tok::Cmp(CmpOp::Gt),
            c if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let s: String = chars[i..j].iter().collect();
                let v = s.parse().map_err(|_| err(start, format!("integer `{s}` out of range")))?;
                out.push((start, Tok::Int(v)));
                i = j;
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                // identifiers absorb `.field` and `[digits]` so that variable paths lex as one token
                let mut j = i;
                loop {
                    while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j] == '[' {
                        let mut k = j + 1;
                        while k < chars.len() && chars[k].is_ascii_digit() {
                            k += 1;
                        }
                        if k > j + 1 && k < chars.len() && chars[k] == ']' {
                            j = k + 1;
                            continue;
                        }
                    }
                    if j + 1 < chars.len() && chars[j] == '.' && (chars[j + 1].is_alphabetic() || chars[j + 1] == '_') {
                        j += 1;
                        continue;
                    }
                    break;
                }
                out.push((start, Tok::Ident(chars[i..j].iter().collect())));
                i = j;
                continue;
            }
            other => return Err(err(start, format!("unexpected character `{other}`"))),
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((chars.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn at(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { position: self.at(), message: message.into() })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            self.fail(format!("expected {what}"))
        }
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.conjunction()?;
        while *self.peek() == Tok::Or {
            self.bump();
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn until(&mut self) -> Result<(Formula, Formula), ParseError> {
        self.expect(Tok::LBrack, "`[`")?;
        let a = self.implication()?;
        match self.peek() {
            Tok::Ident(u) if u == "U" => {
                self.bump();
            }
            _ => return self.fail("expected `U`"),
        }
        let b = self.implication()?;
        self.expect(Tok::RBrack, "`]`")?;
        Ok((a, b))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let f = self.implication()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(id) => {
                let temporal: Option<fn(Formula) -> Formula> = match id.as_str() {
                    "EX" => Some(Formula::ex),
                    "EF" => Some(Formula::ef),
                    "EG" => Some(Formula::eg),
                    "AX" => Some(Formula::ax),
                    "AF" => Some(Formula::af),
                    "AG" => Some(Formula::ag),
                    _ => None,
                };
                if let Some(op) = temporal {
                    self.bump();
                    return Ok(op(self.unary()?));
                }
                if (id == "E" || id == "A") && self.toks[self.pos + 1].1 == Tok::LBrack {
                    self.bump();
                    let (a, b) = self.until()?;
                    return Ok(if id == "E" { Formula::eu(a, b) } else { Formula::au(a, b) });
                }
                self.atom()
            }
            Tok::End => self.fail("unexpected end of formula"),
            _ => self.fail("expected a formula"),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let start = self.at();
        let Tok::Ident(id) = self.bump() else { unreachable!() };
        match id.as_str() {
            "true" => return Ok(Formula::True),
            "false" => return Ok(Formula::False),
            "deadlock" => return Ok(Formula::Atom(Atom::Deadlock)),
            _ => {}
        }
        if let Tok::Cmp(op) = *self.peek() {
            self.bump();
            let value = match self.bump() {
                Tok::Int(v) => Literal::Int(v),
                Tok::Ident(s) => Literal::Symbol(s),
                _ => {
                    self.pos -= 1;
                    return self.fail("expected an integer or a symbol");
                }
            };
            return Ok(Formula::Atom(Atom::Compare { path: id, op, value }));
        }
        if id.contains(['.', '[']) {
            return Err(ParseError { position: start, message: format!("variable `{id}` needs a comparison") });
        }
        let mut args = Vec::new();
        if *self.peek() == Tok::LParen {
            self.bump();
            if *self.peek() != Tok::RParen {
                loop {
                    match self.bump() {
                        Tok::Int(v) => args.push(v),
                        _ => {
                            self.pos -= 1;
                            return self.fail("expected an integer argument");
                        }
                    }
                    if *self.peek() == Tok::Comma {
                        self.bump();
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen, "`)`")?;
        }
        Ok(Formula::Atom(Atom::Named { name: id, args }))
    }
}

/// Parses a formula. Precedence from tightest: `!`, `&&`, `||`, `->`
/// (right associative); temporal operators bind like `!`.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let f = p.implication()?;
    if *p.peek() != Tok::End {
        return p.fail("trailing input");
    }
    Ok(f)
}

/// Reads a property file: one formula per line, `#` starts a comment.
pub fn parse_property_file(text: &str) -> Result<Vec<(String, Formula)>, (usize, ParseError)> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let src = line.split('#').next().unwrap_or("").trim();
        if src.is_empty() {
            continue;
        }
        let f = parse_formula(src).map_err(|e| (n + 1, e))?;
        out.push((src.to_string(), f));
    }
    Ok(out)
}
