//! Abstract syntax for refinement types, datatypes, measures and function
//! specifications.
//!
//! Everything here is immutable once a [`SpecModule`] has been resolved, so
//! modules can be shared freely between threads.

use std::fmt;

use indexmap::IndexMap;
use num_bigint::BigInt;

/// Name of the built-in list datatype (`[a]` in the surface syntax).
pub const LIST: &str = "List";
/// Name of the built-in pair datatype (`(a, b)` in the surface syntax).
pub const PAIR: &str = "Pair";
/// Constructor names of the built-in list.
pub const NIL: &str = "[]";
pub const CONS: &str = ":";

/// The shape of a refined value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Sort {
    Int,
    Bool,
    /// A (monomorphic) datatype instantiation. Arguments are refined, so
    /// `[Score]` carries the score range down to every element.
    Data { name: String, args: Vec<RefType> },
    Fun {
        params: Vec<(String, RefType)>,
        result: Box<RefType>,
    },
    /// Type parameter; only occurs inside datatype and alias declarations.
    Param(String),
}

/// `{binder : sort | pred}`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RefType {
    pub binder: String,
    pub sort: Sort,
    pub pred: Expr,
}

/// Refinement predicates and logical terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(BigInt),
    Bool(bool),
    Var(String),
    Neg(Box<Expr>),
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Ite(Box<Expr>, Box<Expr>, Box<Expr>),
    /// Measure application `m e`.
    Measure(String, Box<Expr>),
    /// Constructor application; `data` names the owning datatype.
    Ctor {
        data: String,
        ctor: String,
        args: Vec<Expr>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Lt,
    Le,
    Eq,
    Ne,
    Gt,
    Ge,
    And,
    Or,
    Implies,
    Iff,
    Xor,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Eq => "==",
            BinOp::Ne => "/=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
            BinOp::Implies => "=>",
            BinOp::Iff => "<=>",
            BinOp::Xor => "xor",
        }
    }

    pub fn is_arith(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul)
    }

    pub fn is_compare(self) -> bool {
        matches!(
            self,
            BinOp::Lt | BinOp::Le | BinOp::Eq | BinOp::Ne | BinOp::Gt | BinOp::Ge
        )
    }

    pub fn is_logic(self) -> bool {
        matches!(
            self,
            BinOp::And | BinOp::Or | BinOp::Implies | BinOp::Iff | BinOp::Xor
        )
    }
}

impl Expr {
    pub fn int(n: impl Into<BigInt>) -> Expr {
        Expr::Int(n.into())
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn tt() -> Expr {
        Expr::Bool(true)
    }

    pub fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Bin(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn measure(name: impl Into<String>, arg: Expr) -> Expr {
        Expr::Measure(name.into(), Box::new(arg))
    }

    pub fn is_true(&self) -> bool {
        matches!(self, Expr::Bool(true))
    }

    /// Conjunction that drops literal `true` operands.
    pub fn and(lhs: Expr, rhs: Expr) -> Expr {
        match (lhs.is_true(), rhs.is_true()) {
            (true, _) => rhs,
            (_, true) => lhs,
            _ => Expr::bin(BinOp::And, lhs, rhs),
        }
    }

    pub fn conj(parts: impl IntoIterator<Item = Expr>) -> Expr {
        parts.into_iter().fold(Expr::tt(), Expr::and)
    }
}

/// Refinement-erased sort, used for solver sorts and value shapes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ty {
    Int,
    Bool,
    Data(String, Vec<Ty>),
}

impl Sort {
    /// Drops refinements; `None` for function sorts and unresolved params.
    pub fn erase(&self) -> Option<Ty> {
        match self {
            Sort::Int => Some(Ty::Int),
            Sort::Bool => Some(Ty::Bool),
            Sort::Data { name, args } => {
                let args = args
                    .iter()
                    .map(|a| a.sort.erase())
                    .collect::<Option<Vec<_>>>()?;
                Some(Ty::Data(name.clone(), args))
            }
            Sort::Fun { .. } | Sort::Param(_) => None,
        }
    }

    pub fn is_fun(&self) -> bool {
        matches!(self, Sort::Fun { .. })
    }

    pub fn data_name(&self) -> Option<&str> {
        match self {
            Sort::Data { name, .. } => Some(name),
            _ => None,
        }
    }
}

impl RefType {
    pub fn new(binder: impl Into<String>, sort: Sort, pred: Expr) -> RefType {
        RefType {
            binder: binder.into(),
            sort,
            pred,
        }
    }

    /// `{v : sort | true}`
    pub fn trivial(sort: Sort) -> RefType {
        RefType::new("v", sort, Expr::tt())
    }

    pub fn int() -> RefType {
        RefType::trivial(Sort::Int)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ctor {
    pub name: String,
    /// Later field types may mention earlier field names.
    pub fields: Vec<(String, RefType)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataDecl {
    pub name: String,
    pub params: Vec<String>,
    pub ctors: Vec<Ctor>,
}

impl DataDecl {
    pub fn ctor(&self, name: &str) -> Option<&Ctor> {
        self.ctors.iter().find(|c| c.name == name)
    }

    pub fn ctor_index(&self, name: &str) -> Option<usize> {
        self.ctors.iter().position(|c| c.name == name)
    }

    pub fn is_builtin(&self) -> bool {
        self.name == LIST || self.name == PAIR
    }
}

/// Base result sort of a measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureSort {
    Int,
    Bool,
}

impl MeasureSort {
    pub fn ty(self) -> Ty {
        match self {
            MeasureSort::Int => Ty::Int,
            MeasureSort::Bool => Ty::Bool,
        }
    }
}

/// `m (C x1 .. xn) = body`
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub ctor: String,
    pub vars: Vec<String>,
    pub body: Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureDef {
    pub name: String,
    pub subject: String,
    pub result: MeasureSort,
    /// One equation per constructor, in constructor declaration order.
    pub equations: Vec<Equation>,
}

impl MeasureDef {
    pub fn equation(&self, ctor: &str) -> Option<&Equation> {
        self.equations.iter().find(|e| e.ctor == ctor)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunSpec {
    pub name: String,
    pub params: Vec<(String, RefType)>,
    pub result: RefType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AliasParamKind {
    Type,
    Expr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alias {
    pub name: String,
    pub params: Vec<(String, AliasParamKind)>,
    pub body: RefType,
}

/// A resolved specification module. Built-in `List` and `Pair` are always
/// present.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpecModule {
    pub(crate) datatypes: IndexMap<String, DataDecl>,
    pub(crate) measures: IndexMap<String, MeasureDef>,
    pub(crate) aliases: IndexMap<String, Alias>,
    pub(crate) funs: IndexMap<String, FunSpec>,
    /// Datatypes reachable from each datatype through its fields.
    pub(crate) reach: IndexMap<String, std::collections::BTreeSet<String>>,
}

impl SpecModule {
    pub fn datatype(&self, name: &str) -> Option<&DataDecl> {
        self.datatypes.get(name)
    }

    pub fn datatypes(&self) -> impl Iterator<Item = &DataDecl> {
        self.datatypes.values()
    }

    pub fn measure(&self, name: &str) -> Option<&MeasureDef> {
        self.measures.get(name)
    }

    pub fn measures(&self) -> impl Iterator<Item = &MeasureDef> {
        self.measures.values()
    }

    /// Measures whose subject is `data`.
    pub fn measures_on<'a>(&'a self, data: &'a str) -> impl Iterator<Item = &'a MeasureDef> + 'a {
        self.measures.values().filter(move |m| m.subject == data)
    }

    pub fn alias(&self, name: &str) -> Option<&Alias> {
        self.aliases.get(name)
    }

    pub fn aliases(&self) -> impl Iterator<Item = &Alias> {
        self.aliases.values()
    }

    pub fn fun(&self, name: &str) -> Option<&FunSpec> {
        self.funs.get(name)
    }

    pub fn funs(&self) -> impl Iterator<Item = &FunSpec> {
        self.funs.values()
    }

    /// Looks up the constructor `ctor` of datatype `data`.
    pub fn ctor(&self, data: &str, ctor: &str) -> Option<&Ctor> {
        self.datatype(data)?.ctor(ctor)
    }

    /// Whether a field of sort `field` inside datatype `owner` lies in the
    /// same recursive group as `owner`.
    pub fn is_recursive_field(&self, owner: &str, field: &Sort) -> bool {
        super::resolve::sort_is_recursive(&self.reach, owner, field)
    }
}

// ---------------------------------------------------------------------------
// Pretty printing. The output is valid surface syntax and re-parses to an
// equal module.

fn fmt_ctor_name(name: &str) -> String {
    if name == CONS {
        "(:)".to_string()
    } else {
        name.to_string()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) if n.sign() == num_bigint::Sign::Minus => write!(f, "({n})"),
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Not(e) => write!(f, "(not {e})"),
            Expr::Bin(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Ite(c, t, e) => write!(f, "(if {c} then {t} else {e})"),
            Expr::Measure(m, e) => write!(f, "({m} {e})"),
            Expr::Ctor { ctor, args, .. } if args.is_empty() => {
                write!(f, "{}", fmt_ctor_name(ctor))
            }
            Expr::Ctor { ctor, args, .. } => {
                write!(f, "({}", fmt_ctor_name(ctor))?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sort::Int => write!(f, "Int"),
            Sort::Bool => write!(f, "Bool"),
            Sort::Param(p) => write!(f, "{p}"),
            Sort::Data { name, args } => {
                write!(f, "{name}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                Ok(())
            }
            Sort::Fun { params, result } => {
                write!(f, "(")?;
                for (b, t) in params {
                    write!(f, "{b}:{t} -> ")?;
                }
                write!(f, "{result})")
            }
        }
    }
}

impl fmt::Display for RefType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{} : {} | {}}}", self.binder, self.sort, self.pred)
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Int => write!(f, "Int"),
            Ty::Bool => write!(f, "Bool"),
            Ty::Data(n, args) if args.is_empty() => write!(f, "{n}"),
            Ty::Data(n, args) => {
                write!(f, "{n}<")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ">")
            }
        }
    }
}

impl fmt::Display for SpecModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.datatypes.values().filter(|d| !d.is_builtin()) {
            write!(f, "data {}", d.name)?;
            for p in &d.params {
                write!(f, " {p}")?;
            }
            for (i, c) in d.ctors.iter().enumerate() {
                write!(f, "{}{}", if i == 0 { " = " } else { " | " }, fmt_ctor_name(&c.name))?;
                if !c.fields.is_empty() {
                    write!(f, " {{")?;
                    for (j, (fname, t)) in c.fields.iter().enumerate() {
                        if j > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{fname} :: {t}")?;
                    }
                    write!(f, "}}")?;
                }
            }
            writeln!(f)?;
        }
        for a in self.aliases.values() {
            write!(f, "type {}", a.name)?;
            for (p, _) in &a.params {
                write!(f, " {p}")?;
            }
            writeln!(f, " = {}", a.body)?;
        }
        for m in self.measures.values() {
            let subject = self.datatypes.get(&m.subject);
            write!(f, "measure {} :: {}", m.name, m.subject)?;
            for p in subject.map(|d| d.params.as_slice()).unwrap_or(&[]) {
                write!(f, " {p}")?;
            }
            let res = match m.result {
                MeasureSort::Int => "Int",
                MeasureSort::Bool => "Bool",
            };
            writeln!(f, " -> {res}")?;
            for eq in &m.equations {
                write!(f, "{} ({}", m.name, fmt_ctor_name(&eq.ctor))?;
                for v in &eq.vars {
                    write!(f, " {v}")?;
                }
                writeln!(f, ") = {}", eq.body)?;
            }
        }
        for s in self.funs.values() {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Display for FunSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ::", self.name)?;
        for (b, t) in &self.params {
            write!(f, " {b}:{t} ->")?;
        }
        write!(f, " {}", self.result)
    }
}
