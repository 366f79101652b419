//! Surface-syntax parser. Produces unresolved items; name resolution and
//! checking happen in [`super::resolve`].
//!
//! A top-level item starts with a token in column 1; indented lines continue
//! the previous item.

use num_bigint::BigInt;

use super::ast::{BinOp, CONS, NIL};
use super::error::{Pos, SpecError};
use super::lexer::{tokenize, Tok, Token};

#[derive(Debug, Clone)]
pub struct RawExpr {
    pub kind: RawExprKind,
    pub pos: Pos,
}

#[derive(Debug, Clone)]
pub enum RawExprKind {
    Int(BigInt),
    Bool(bool),
    /// A name applied to zero or more juxtaposed arguments.
    App(String, Vec<RawExpr>),
    Neg(Box<RawExpr>),
    Not(Box<RawExpr>),
    Bin(BinOp, Box<RawExpr>, Box<RawExpr>),
    Ite(Box<RawExpr>, Box<RawExpr>, Box<RawExpr>),
}

#[derive(Debug, Clone)]
pub struct RawType {
    pub kind: RawTypeKind,
    pub pos: Pos,
}

#[derive(Debug, Clone)]
pub enum RawTypeKind {
    App(String, Vec<RawArg>),
    List(Box<RawType>),
    Tuple(Box<RawType>, Box<RawType>),
    Refined {
        binder: String,
        sort: Box<RawType>,
        pred: RawExpr,
    },
    Fun(Vec<(Option<String>, RawType)>, Box<RawType>),
}

/// Argument of a type application: a type, or an integer literal for
/// expression-parameterised aliases such as `Rng 100`.
#[derive(Debug, Clone)]
pub enum RawArg {
    Type(RawType),
    Int(BigInt, Pos),
}

#[derive(Debug, Clone)]
pub enum RawFields {
    Record(Vec<(String, RawType, Pos)>),
    Positional(Vec<RawType>),
}

#[derive(Debug, Clone)]
pub struct RawCtor {
    pub name: String,
    pub fields: RawFields,
    pub pos: Pos,
}

#[derive(Debug, Clone)]
pub enum RawItem {
    Alias {
        name: String,
        params: Vec<String>,
        body: RawType,
        pos: Pos,
    },
    Data {
        name: String,
        params: Vec<String>,
        ctors: Vec<RawCtor>,
        pos: Pos,
    },
    Measure {
        name: String,
        arg: RawType,
        result: RawType,
        pos: Pos,
    },
    Equation {
        measure: String,
        ctor: String,
        vars: Vec<String>,
        body: RawExpr,
        pos: Pos,
    },
    Fun {
        name: String,
        params: Vec<(Option<String>, RawType)>,
        result: RawType,
        pos: Pos,
    },
}

const KEYWORDS: &[&str] = &[
    "type", "data", "measure", "if", "then", "else", "not", "xor", "true", "false",
];

pub fn parse_items(src: &str) -> Result<Vec<RawItem>, SpecError> {
    let tokens = tokenize(src)?;
    let mut groups: Vec<Vec<Token>> = Vec::new();
    for t in tokens {
        if t.pos.col == 1 || groups.is_empty() {
            if t.pos.col != 1 {
                return Err(SpecError::Syntax {
                    pos: t.pos,
                    msg: "declarations must start in the first column".into(),
                });
            }
            groups.push(Vec::new());
        }
        groups.last_mut().unwrap().push(t);
    }
    groups
        .into_iter()
        .map(|g| Parser::new(g).item())
        .collect()
}

/// Parses a single refinement predicate (useful for tests and tools).
pub fn parse_raw_expr(src: &str) -> Result<RawExpr, SpecError> {
    let mut p = Parser::new(tokenize(src)?);
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

impl Parser {
    fn new(toks: Vec<Token>) -> Self {
        Parser { toks, i: 0 }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.i + k).map(|t| &t.tok)
    }

    fn pos(&self) -> Pos {
        self.toks
            .get(self.i)
            .or_else(|| self.toks.last())
            .map(|t| t.pos)
            .unwrap_or_default()
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|t| t.tok.clone());
        self.i += 1;
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, SpecError> {
        let found = match self.peek() {
            Some(t) => format!(" (found {})", t.describe()),
            None => " (found end of declaration)".to_string(),
        };
        Err(SpecError::Syntax {
            pos: self.pos(),
            msg: format!("{}{}", msg.into(), found),
        })
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), SpecError> {
        if self.eat(t) {
            Ok(())
        } else {
            self.err(format!("expected {}", t.describe()))
        }
    }

    fn finish(&self) -> Result<(), SpecError> {
        if self.i < self.toks.len() {
            self.err("unexpected trailing input")
        } else {
            Ok(())
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn ident(&mut self) -> Result<String, SpecError> {
        match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                self.i += 1;
                Ok(s)
            }
            _ => self.err("expected an identifier"),
        }
    }

    fn ctor_name(&mut self) -> Result<String, SpecError> {
        match self.peek() {
            Some(Tok::NilName) => {
                self.i += 1;
                Ok(NIL.to_string())
            }
            Some(Tok::ConsName) => {
                self.i += 1;
                Ok(CONS.to_string())
            }
            Some(Tok::Ident(s)) if s.starts_with(|c: char| c.is_ascii_uppercase()) => {
                let s = s.clone();
                self.i += 1;
                Ok(s)
            }
            _ => self.err("expected a constructor name"),
        }
    }

    // ---- items ----------------------------------------------------------

    fn item(mut self) -> Result<RawItem, SpecError> {
        let pos = self.pos();
        let item = if self.is_kw("type") {
            self.i += 1;
            let name = self.ident()?;
            let params = self.params()?;
            self.expect(&Tok::Assign)?;
            let body = self.reftype()?;
            RawItem::Alias {
                name,
                params,
                body,
                pos,
            }
        } else if self.is_kw("data") {
            self.i += 1;
            let name = self.ident()?;
            let params = self.params()?;
            self.expect(&Tok::Assign)?;
            let mut ctors = vec![self.ctor_decl()?];
            while self.eat(&Tok::Bar) {
                ctors.push(self.ctor_decl()?);
            }
            RawItem::Data {
                name,
                params,
                ctors,
                pos,
            }
        } else if self.is_kw("measure") {
            self.i += 1;
            let name = self.ident()?;
            self.expect(&Tok::DoubleColon)?;
            let arg = self.btype()?;
            self.expect(&Tok::Arrow)?;
            let result = self.btype()?;
            RawItem::Measure {
                name,
                arg,
                result,
                pos,
            }
        } else if self.peek_at(1) == Some(&Tok::DoubleColon) {
            let name = self.ident()?;
            self.i += 1;
            let (params, result) = self.arrow_chain()?;
            RawItem::Fun {
                name,
                params,
                result,
                pos,
            }
        } else {
            let measure = self.ident()?;
            let (ctor, vars) = self.pattern()?;
            self.expect(&Tok::Assign)?;
            let body = self.expr()?;
            RawItem::Equation {
                measure,
                ctor,
                vars,
                body,
                pos,
            }
        };
        self.finish()?;
        Ok(item)
    }

    fn params(&mut self) -> Result<Vec<String>, SpecError> {
        let mut ps = Vec::new();
        while let Some(Tok::Ident(_)) = self.peek() {
            ps.push(self.ident()?);
        }
        Ok(ps)
    }

    fn ctor_decl(&mut self) -> Result<RawCtor, SpecError> {
        let pos = self.pos();
        let name = self.ctor_name()?;
        let fields = if self.eat(&Tok::LBrace) {
            let mut fs = Vec::new();
            loop {
                let fpos = self.pos();
                let f = self.ident()?;
                self.expect(&Tok::DoubleColon)?;
                let t = self.reftype()?;
                fs.push((f, t, fpos));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RBrace)?;
            RawFields::Record(fs)
        } else {
            let mut fs = Vec::new();
            while self.starts_atype() {
                fs.push(self.atype()?);
            }
            RawFields::Positional(fs)
        };
        Ok(RawCtor { name, fields, pos })
    }

    /// `C`, `[]`, `(C x y)`, `(x:xs)`, `((:) x xs)`
    fn pattern(&mut self) -> Result<(String, Vec<String>), SpecError> {
        if !self.eat(&Tok::LParen) {
            return Ok((self.ctor_name()?, Vec::new()));
        }
        let res = if matches!(self.peek(), Some(Tok::Ident(s)) if s.starts_with(|c: char| c.is_ascii_lowercase()))
        {
            let x = self.ident()?;
            self.expect(&Tok::Colon)?;
            let xs = self.ident()?;
            (CONS.to_string(), vec![x, xs])
        } else {
            let c = self.ctor_name()?;
            let mut vars = Vec::new();
            while let Some(Tok::Ident(_)) = self.peek() {
                vars.push(self.ident()?);
            }
            (c, vars)
        };
        self.expect(&Tok::RParen)?;
        Ok(res)
    }

    // ---- types ------------------------------------------------------------

    /// `(b:)? T (-> (b:)? T)*`; returns the parameters and the final type.
    #[allow(clippy::type_complexity)]
    fn arrow_chain(&mut self) -> Result<(Vec<(Option<String>, RawType)>, RawType), SpecError> {
        let mut parts = Vec::new();
        loop {
            let binder = match (self.peek(), self.peek_at(1)) {
                (Some(Tok::Ident(s)), Some(Tok::Colon)) if !KEYWORDS.contains(&s.as_str()) => {
                    let b = self.ident()?;
                    self.i += 1;
                    Some(b)
                }
                _ => None,
            };
            let t = self.reftype()?;
            parts.push((binder, t));
            if !self.eat(&Tok::Arrow) {
                break;
            }
        }
        let (b, result) = parts.pop().expect("at least one part");
        if b.is_some() {
            return self.err("the result type cannot be named");
        }
        Ok((parts, result))
    }

    /// A refinement type or plain sort.
    fn reftype(&mut self) -> Result<RawType, SpecError> {
        self.btype()
    }

    /// Type application `Name arg*` or an atomic type.
    fn btype(&mut self) -> Result<RawType, SpecError> {
        let pos = self.pos();
        if let Some(Tok::Ident(s)) = self.peek() {
            if !KEYWORDS.contains(&s.as_str()) {
                let name = self.ident()?;
                let mut args = Vec::new();
                while self.starts_atype() || matches!(self.peek(), Some(Tok::Int(_))) {
                    args.push(self.type_arg()?);
                }
                return Ok(RawType {
                    kind: RawTypeKind::App(name, args),
                    pos,
                });
            }
        }
        self.atype()
    }

    fn starts_atype(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                !KEYWORDS.contains(&s.as_str()) && self.peek_at(1) != Some(&Tok::Colon)
            }
            Some(Tok::LBrace) | Some(Tok::LBracket) | Some(Tok::LParen) => true,
            _ => false,
        }
    }

    fn type_arg(&mut self) -> Result<RawArg, SpecError> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = n.clone();
                self.i += 1;
                Ok(RawArg::Int(n, pos))
            }
            Some(Tok::LParen) if self.peek_at(1) == Some(&Tok::Minus) => {
                self.i += 2;
                let n = match self.bump() {
                    Some(Tok::Int(n)) => n,
                    _ => return self.err("expected an integer literal"),
                };
                self.expect(&Tok::RParen)?;
                Ok(RawArg::Int(-n, pos))
            }
            _ => Ok(RawArg::Type(self.atype()?)),
        }
    }

    fn atype(&mut self) -> Result<RawType, SpecError> {
        let pos = self.pos();
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let name = self.ident()?;
                Ok(RawType {
                    kind: RawTypeKind::App(name, Vec::new()),
                    pos,
                })
            }
            Some(Tok::LBracket) => {
                self.i += 1;
                let t = self.reftype()?;
                self.expect(&Tok::RBracket)?;
                Ok(RawType {
                    kind: RawTypeKind::List(Box::new(t)),
                    pos,
                })
            }
            Some(Tok::LBrace) => {
                self.i += 1;
                let binder = self.ident()?;
                self.expect(&Tok::Colon)?;
                let sort = self.btype()?;
                self.expect(&Tok::Bar)?;
                let pred = self.expr()?;
                self.expect(&Tok::RBrace)?;
                Ok(RawType {
                    kind: RawTypeKind::Refined {
                        binder,
                        sort: Box::new(sort),
                        pred,
                    },
                    pos,
                })
            }
            Some(Tok::LParen) => {
                self.i += 1;
                let (params, last) = self.arrow_chain()?;
                let t = if !params.is_empty() {
                    RawType {
                        kind: RawTypeKind::Fun(params, Box::new(last)),
                        pos,
                    }
                } else if self.eat(&Tok::Comma) {
                    let snd = self.reftype()?;
                    RawType {
                        kind: RawTypeKind::Tuple(Box::new(last), Box::new(snd)),
                        pos,
                    }
                } else {
                    last
                };
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            _ => self.err("expected a type"),
        }
    }

    // ---- expressions --------------------------------------------------------

    fn expr(&mut self) -> Result<RawExpr, SpecError> {
        let mut lhs = self.implies()?;
        while self.peek() == Some(&Tok::Iff) {
            let pos = self.pos();
            self.i += 1;
            let rhs = self.implies()?;
            lhs = bin(BinOp::Iff, lhs, rhs, pos);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<RawExpr, SpecError> {
        let lhs = self.or()?;
        if self.peek() == Some(&Tok::FatArrow) {
            let pos = self.pos();
            self.i += 1;
            let rhs = self.implies()?;
            return Ok(bin(BinOp::Implies, lhs, rhs, pos));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<RawExpr, SpecError> {
        let mut lhs = self.xor()?;
        while self.peek() == Some(&Tok::OrOr) {
            let pos = self.pos();
            self.i += 1;
            let rhs = self.xor()?;
            lhs = bin(BinOp::Or, lhs, rhs, pos);
        }
        Ok(lhs)
    }

    fn xor(&mut self) -> Result<RawExpr, SpecError> {
        let mut lhs = self.and()?;
        while self.is_kw("xor") {
            let pos = self.pos();
            self.i += 1;
            let rhs = self.and()?;
            lhs = bin(BinOp::Xor, lhs, rhs, pos);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<RawExpr, SpecError> {
        let mut lhs = self.not()?;
        while self.peek() == Some(&Tok::AndAnd) {
            let pos = self.pos();
            self.i += 1;
            let rhs = self.not()?;
            lhs = bin(BinOp::And, lhs, rhs, pos);
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<RawExpr, SpecError> {
        let pos = self.pos();
        if self.is_kw("not") || self.peek() == Some(&Tok::Bang) {
            self.i += 1;
            let e = self.not()?;
            return Ok(RawExpr {
                kind: RawExprKind::Not(Box::new(e)),
                pos,
            });
        }
        self.cmp()
    }

    fn cmp(&mut self) -> Result<RawExpr, SpecError> {
        let lhs = self.add()?;
        let Some(op) = self.peek().and_then(cmp_op) else {
            return Ok(lhs);
        };
        let pos = self.pos();
        self.i += 1;
        let rhs = self.add()?;
        if self.peek().and_then(cmp_op).is_some() {
            return self.err("comparison operators do not chain; use `&&`");
        }
        Ok(bin(op, lhs, rhs, pos))
    }

    fn add(&mut self) -> Result<RawExpr, SpecError> {
        let mut lhs = self.mul()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            let pos = self.pos();
            self.i += 1;
            let rhs = self.mul()?;
            lhs = bin(op, lhs, rhs, pos);
        }
    }

    fn mul(&mut self) -> Result<RawExpr, SpecError> {
        let mut lhs = self.unary()?;
        while self.peek() == Some(&Tok::Star) {
            let pos = self.pos();
            self.i += 1;
            let rhs = self.unary()?;
            lhs = bin(BinOp::Mul, lhs, rhs, pos);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<RawExpr, SpecError> {
        let pos = self.pos();
        if self.eat(&Tok::Minus) {
            let e = self.unary()?;
            return Ok(RawExpr {
                kind: RawExprKind::Neg(Box::new(e)),
                pos,
            });
        }
        self.app()
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                !KEYWORDS.contains(&s.as_str()) || s == "true" || s == "false" || s == "if"
            }
            Some(Tok::Int(_)) | Some(Tok::NilName) | Some(Tok::ConsName) | Some(Tok::LParen) => {
                true
            }
            _ => false,
        }
    }

    fn app(&mut self) -> Result<RawExpr, SpecError> {
        let pos = self.pos();
        let name = match self.peek() {
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => Some(s.clone()),
            Some(Tok::NilName) => Some(NIL.to_string()),
            Some(Tok::ConsName) => Some(CONS.to_string()),
            _ => None,
        };
        let Some(name) = name else {
            return self.atom();
        };
        self.i += 1;
        let mut args = Vec::new();
        while self.starts_atom() {
            args.push(self.atom()?);
        }
        Ok(RawExpr {
            kind: RawExprKind::App(name, args),
            pos,
        })
    }

    fn atom(&mut self) -> Result<RawExpr, SpecError> {
        let pos = self.pos();
        let kind = match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.i += 1;
                RawExprKind::Int(n)
            }
            Some(Tok::NilName) => {
                self.i += 1;
                RawExprKind::App(NIL.to_string(), Vec::new())
            }
            Some(Tok::ConsName) => {
                self.i += 1;
                RawExprKind::App(CONS.to_string(), Vec::new())
            }
            Some(Tok::Ident(s)) if s == "true" || s == "false" => {
                self.i += 1;
                RawExprKind::Bool(s == "true")
            }
            Some(Tok::Ident(s)) if s == "if" => {
                self.i += 1;
                let c = self.expr()?;
                if !self.is_kw("then") {
                    return self.err("expected `then`");
                }
                self.i += 1;
                let t = self.expr()?;
                if !self.is_kw("else") {
                    return self.err("expected `else`");
                }
                self.i += 1;
                let e = self.expr()?;
                RawExprKind::Ite(Box::new(c), Box::new(t), Box::new(e))
            }
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                self.i += 1;
                RawExprKind::App(s, Vec::new())
            }
            Some(Tok::LParen) => {
                self.i += 1;
                let e = self.expr()?;
                self.expect(&Tok::RParen)?;
                return Ok(e);
            }
            _ => return self.err("expected an expression"),
        };
        Ok(RawExpr { kind, pos })
    }
}

fn cmp_op(t: &Tok) -> Option<BinOp> {
    Some(match t {
        Tok::Lt => BinOp::Lt,
        Tok::Le => BinOp::Le,
        Tok::EqEq | Tok::Assign => BinOp::Eq,
        Tok::Ne => BinOp::Ne,
        Tok::Gt => BinOp::Gt,
        Tok::Ge => BinOp::Ge,
        _ => return None,
    })
}

fn bin(op: BinOp, l: RawExpr, r: RawExpr, pos: Pos) -> RawExpr {
    RawExpr {
        kind: RawExprKind::Bin(op, Box::new(l), Box::new(r)),
        pos,
    }
}
