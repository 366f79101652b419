//! Translation of refinement types into constraints over fresh solver
//! variables, covering every inhabitant up to a depth bound.

use std::collections::HashMap;

use num_bigint::BigInt;

use crate::error::EngineError;
use crate::smt::{LogicVar, Session, SmtSort};
use crate::spec::ops::{subst_reftype, unfold};
use crate::spec::{BinOp, Ctor, DataDecl, Expr, RefType, Sort, SpecModule};

/// Constructors available at `depth`: only non-recursive ones at depth 0,
/// otherwise all of them with recursive ones first.
pub fn ctors<'a>(module: &SpecModule, decl: &'a DataDecl, depth: u32) -> Vec<&'a Ctor> {
    let recursive = |c: &Ctor| {
        c.fields
            .iter()
            .any(|(_, t)| module.is_recursive_field(&decl.name, &t.sort))
    };
    let (rec, base): (Vec<&Ctor>, Vec<&Ctor>) = decl.ctors.iter().partition(|c| recursive(c));
    if depth == 0 {
        base
    } else {
        rec.into_iter().chain(base).collect()
    }
}

/// The integer bound `-n <= x && x <= n`.
pub fn int_bound(x: Expr, n: &BigInt) -> Expr {
    Expr::and(
        Expr::bin(BinOp::Le, Expr::Int(-n.clone()), x.clone()),
        Expr::bin(BinOp::Le, x, Expr::Int(n.clone())),
    )
}

/// Returns a variable whose models are exactly the inhabitants of `t` of
/// depth at most `depth` with integers in `[-bound, bound]` (unbounded
/// integers when `bound` is `None`).
pub fn query(
    session: &mut Session,
    t: &RefType,
    depth: u32,
    bound: Option<&BigInt>,
) -> Result<LogicVar, EngineError> {
    match &t.sort {
        Sort::Int => {
            let x = session.fresh(SmtSort::Int)?;
            session.constrain(x, t)?;
            if let Some(n) = bound {
                session.assert_expr(&int_bound(x.expr(), n))?;
            }
            Ok(x)
        }
        Sort::Bool => {
            let x = session.fresh(SmtSort::Bool)?;
            session.constrain(x, t)?;
            Ok(x)
        }
        Sort::Data { name, .. } => {
            let ty = t
                .sort
                .erase()
                .ok_or_else(|| EngineError::Unsupported(format!("cannot generate values of sort {}", t.sort)))?;
            let module = session.module().clone();
            let decl = module
                .datatype(name)
                .ok_or_else(|| EngineError::Sort(format!("unknown datatype `{name}`")))?;
            let mut alts = Vec::new();
            for c in ctors(&module, decl, depth) {
                let b = session.fresh_choice()?;
                let v = session.guard(b, |s| query_ctor(s, depth, t, c, bound))?;
                alts.push((b, v));
            }
            let x = session.fresh(SmtSort::Data(ty))?;
            session.one_of(x, &alts)?;
            session.constrain(x, t)?;
            Ok(x)
        }
        Sort::Param(p) => Err(EngineError::Unsupported(format!("unresolved type parameter `{p}`"))),
        Sort::Fun { .. } => Err(EngineError::Unsupported(
            "function values are synthesized, not queried".into(),
        )),
    }
}

/// Encodes constructor `c` of `t`, querying its fields left to right.
pub fn query_ctor(
    session: &mut Session,
    depth: u32,
    t: &RefType,
    c: &Ctor,
    bound: Option<&BigInt>,
) -> Result<LogicVar, EngineError> {
    let module = session.module().clone();
    let owner = t.sort.data_name().expect("data sort").to_string();
    let fields = unfold(&module, c, t)?;
    let mut su: Vec<(String, Expr)> = Vec::new();
    let mut xs = Vec::new();
    for f in &fields {
        xs.push(query_field(session, depth, &mut su, f, &owner, bound)?);
    }
    let ty = t.sort.erase().expect("checked by caller");
    Ok(session.apply(&ty, &c.name, &xs)?)
}

/// Queries one field after substituting the variables of earlier fields,
/// then records this field's variable in `su`.
pub fn query_field(
    session: &mut Session,
    depth: u32,
    su: &mut Vec<(String, Expr)>,
    (name, ft): &(String, RefType),
    owner: &str,
    bound: Option<&BigInt>,
) -> Result<LogicVar, EngineError> {
    let map: HashMap<&str, &Expr> = su.iter().map(|(k, v)| (k.as_str(), v)).collect();
    let ft = subst_reftype(ft, &map);
    let d = if session.module().is_recursive_field(owner, &ft.sort) {
        depth - 1
    } else {
        depth
    };
    let x = query(session, &ft, d, bound)?;
    su.push((name.clone(), x.expr()));
    Ok(x)
}
