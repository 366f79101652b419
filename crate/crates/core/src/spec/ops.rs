//! The refinement-type API: `refinement`, `subst`, `unfold`, `binder`, plus
//! the capture-avoiding substitution and type-parameter instantiation they
//! are built on.

use std::collections::{BTreeSet, HashMap};

use super::ast::{Ctor, Expr, RefType, Sort, SpecModule};
use super::error::TypeOpError;

/// The top-level predicate of `t`, with `t`'s binder free.
pub fn refinement(t: &RefType) -> &Expr {
    &t.pred
}

/// The variable naming the refined value.
pub fn binder(t: &RefType) -> &str {
    &t.binder
}

/// Simultaneous, capture-free substitution of `pairs` in `t`'s predicate and
/// in all nested refinements.
pub fn subst(t: &RefType, pairs: &[(String, Expr)]) -> Result<RefType, TypeOpError> {
    if let Some((v, _)) = pairs.iter().find(|(v, _)| *v == t.binder) {
        return Err(TypeOpError::SubstBinder(v.clone()));
    }
    let map: HashMap<&str, &Expr> = pairs.iter().map(|(v, e)| (v.as_str(), e)).collect();
    Ok(subst_reftype(t, &map))
}

/// Like [`subst`] but a pair naming the binder is shadowed instead of
/// rejected.
pub fn subst_reftype(t: &RefType, map: &HashMap<&str, &Expr>) -> RefType {
    if map.is_empty() {
        return t.clone();
    }
    let sort = subst_sort(&t.sort, map);
    let mut inner: HashMap<&str, &Expr> = map.clone();
    inner.remove(t.binder.as_str());
    if inner.is_empty() {
        return RefType::new(t.binder.clone(), sort, t.pred.clone());
    }
    let captures = inner
        .iter()
        .any(|(k, e)| mentions(e, &t.binder) && mentions(&t.pred, k));
    let (binder, pred) = if captures {
        let mut avoid = free_vars(&t.pred);
        for e in inner.values() {
            avoid.extend(free_vars(e));
        }
        let fresh = fresh_name(&t.binder, &avoid);
        let renamed = rename(&t.pred, &t.binder, &fresh);
        (fresh, subst_expr(&renamed, &inner))
    } else {
        (t.binder.clone(), subst_expr(&t.pred, &inner))
    };
    RefType::new(binder, sort, pred)
}

fn subst_sort(s: &Sort, map: &HashMap<&str, &Expr>) -> Sort {
    match s {
        Sort::Int | Sort::Bool | Sort::Param(_) => s.clone(),
        Sort::Data { name, args } => Sort::Data {
            name: name.clone(),
            args: args.iter().map(|a| subst_reftype(a, map)).collect(),
        },
        Sort::Fun { params, result } => {
            let mut m = map.clone();
            let mut out = Vec::with_capacity(params.len());
            for (b, t) in params {
                out.push((b.clone(), subst_reftype(t, &m)));
                m.remove(b.as_str());
            }
            Sort::Fun {
                params: out,
                result: Box::new(subst_reftype(result, &m)),
            }
        }
    }
}

/// Simultaneous substitution on a predicate. Expressions bind no variables,
/// so this is trivially capture-free.
pub fn subst_expr(e: &Expr, map: &HashMap<&str, &Expr>) -> Expr {
    match e {
        Expr::Var(v) => match map.get(v.as_str()) {
            Some(r) => (*r).clone(),
            None => e.clone(),
        },
        Expr::Int(_) | Expr::Bool(_) => e.clone(),
        Expr::Neg(a) => Expr::Neg(Box::new(subst_expr(a, map))),
        Expr::Not(a) => Expr::Not(Box::new(subst_expr(a, map))),
        Expr::Bin(op, l, r) => Expr::bin(*op, subst_expr(l, map), subst_expr(r, map)),
        Expr::Ite(c, t, f) => Expr::Ite(
            Box::new(subst_expr(c, map)),
            Box::new(subst_expr(t, map)),
            Box::new(subst_expr(f, map)),
        ),
        Expr::Measure(m, a) => Expr::measure(m.clone(), subst_expr(a, map)),
        Expr::Ctor { data, ctor, args } => Expr::Ctor {
            data: data.clone(),
            ctor: ctor.clone(),
            args: args.iter().map(|a| subst_expr(a, map)).collect(),
        },
    }
}

pub fn subst_var(e: &Expr, var: &str, by: &Expr) -> Expr {
    let map: HashMap<&str, &Expr> = [(var, by)].into_iter().collect();
    subst_expr(e, &map)
}

fn rename(e: &Expr, from: &str, to: &str) -> Expr {
    subst_var(e, from, &Expr::var(to))
}

/// Whether `name` occurs in `e`.
pub fn mentions(e: &Expr, name: &str) -> bool {
    match e {
        Expr::Var(v) => v == name,
        Expr::Int(_) | Expr::Bool(_) => false,
        Expr::Neg(a) | Expr::Not(a) | Expr::Measure(_, a) => mentions(a, name),
        Expr::Bin(_, l, r) => mentions(l, name) || mentions(r, name),
        Expr::Ite(c, t, f) => mentions(c, name) || mentions(t, name) || mentions(f, name),
        Expr::Ctor { args, .. } => args.iter().any(|a| mentions(a, name)),
    }
}

pub fn free_vars(e: &Expr) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    collect_vars(e, &mut out);
    out
}

fn collect_vars(e: &Expr, out: &mut BTreeSet<String>) {
    match e {
        Expr::Var(v) => {
            out.insert(v.clone());
        }
        Expr::Int(_) | Expr::Bool(_) => {}
        Expr::Neg(a) | Expr::Not(a) | Expr::Measure(_, a) => collect_vars(a, out),
        Expr::Bin(_, l, r) => {
            collect_vars(l, out);
            collect_vars(r, out);
        }
        Expr::Ite(c, t, f) => {
            collect_vars(c, out);
            collect_vars(t, out);
            collect_vars(f, out);
        }
        Expr::Ctor { args, .. } => args.iter().for_each(|a| collect_vars(a, out)),
    }
}

/// Free variables of a refinement type (its binder excluded).
pub fn reftype_free_vars(t: &RefType) -> BTreeSet<String> {
    let mut out = sort_free_vars(&t.sort);
    let mut p = free_vars(&t.pred);
    p.remove(&t.binder);
    out.extend(p);
    out
}

fn sort_free_vars(s: &Sort) -> BTreeSet<String> {
    match s {
        Sort::Int | Sort::Bool | Sort::Param(_) => BTreeSet::new(),
        Sort::Data { args, .. } => args.iter().flat_map(reftype_free_vars).collect(),
        Sort::Fun { params, result } => {
            let mut out = BTreeSet::new();
            let mut bound = BTreeSet::new();
            for (b, t) in params {
                out.extend(reftype_free_vars(t).into_iter().filter(|v| !bound.contains(v)));
                bound.insert(b.clone());
            }
            out.extend(reftype_free_vars(result).into_iter().filter(|v| !bound.contains(v)));
            out
        }
    }
}

pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    (0..)
        .map(|i| format!("{base}{i}"))
        .find(|n| !avoid.contains(n))
        .expect("unbounded supply")
}

/// Replaces type parameters by refined types. A refined parameter
/// `{b : a | p}` instantiated with `{w : S | q}` becomes `{b : S | q[w:=b] && p}`.
pub fn instantiate(t: &RefType, params: &HashMap<String, RefType>) -> RefType {
    if params.is_empty() {
        return t.clone();
    }
    match &t.sort {
        Sort::Param(p) => match params.get(p) {
            Some(arg) => merge_refinement(arg, &t.binder, &t.pred),
            None => t.clone(),
        },
        Sort::Int | Sort::Bool => t.clone(),
        Sort::Data { name, args } => RefType::new(
            t.binder.clone(),
            Sort::Data {
                name: name.clone(),
                args: args.iter().map(|a| instantiate(a, params)).collect(),
            },
            t.pred.clone(),
        ),
        Sort::Fun { params: ps, result } => RefType::new(
            t.binder.clone(),
            Sort::Fun {
                params: ps
                    .iter()
                    .map(|(b, pt)| (b.clone(), instantiate(pt, params)))
                    .collect(),
                result: Box::new(instantiate(result, params)),
            },
            t.pred.clone(),
        ),
    }
}

/// Strengthens `base` with `extra` (whose binder is `binder`), keeping
/// `binder` as the result's binder.
pub fn merge_refinement(base: &RefType, binder: &str, extra: &Expr) -> RefType {
    let base_fv = {
        let mut s = free_vars(&base.pred);
        s.remove(&base.binder);
        s
    };
    let (binder, extra) = if base_fv.contains(binder) {
        let mut avoid = base_fv.clone();
        avoid.extend(free_vars(extra));
        let fresh = fresh_name(binder, &avoid);
        let e = rename(extra, binder, &fresh);
        (fresh, e)
    } else {
        (binder.to_string(), extra.clone())
    };
    let base_pred = if base.binder == binder {
        base.pred.clone()
    } else {
        rename(&base.pred, &base.binder, &binder)
    };
    RefType::new(binder, base.sort.clone(), Expr::and(base_pred, extra))
}

/// Breaks `t` into the fields of constructor `c`, with `t`'s type arguments
/// substituted for the datatype's parameters. Field refinements still refer
/// to earlier field names.
pub fn unfold(
    module: &SpecModule,
    c: &Ctor,
    t: &RefType,
) -> Result<Vec<(String, RefType)>, TypeOpError> {
    let Sort::Data { name, args } = &t.sort else {
        return Err(TypeOpError::NotData(t.sort.to_string()));
    };
    let decl = module
        .datatype(name)
        .ok_or_else(|| TypeOpError::UnknownData(name.clone()))?;
    if decl.ctor(&c.name) != Some(c) {
        return Err(TypeOpError::ForeignCtor {
            ctor: c.name.clone(),
            data: name.clone(),
        });
    }
    let params: HashMap<String, RefType> = decl
        .params
        .iter()
        .cloned()
        .zip(args.iter().cloned())
        .collect();
    Ok(c.fields
        .iter()
        .map(|(f, ft)| (f.clone(), instantiate(ft, &params)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::ast::BinOp;

    fn le(a: Expr, b: Expr) -> Expr {
        Expr::bin(BinOp::Le, a, b)
    }

    fn score_list(pred: Expr) -> RefType {
        let score = RefType::new(
            "v",
            Sort::Int,
            Expr::and(
                le(Expr::int(0), Expr::var("v")),
                Expr::bin(BinOp::Lt, Expr::var("v"), Expr::int(100)),
            ),
        );
        RefType::new(
            "v",
            Sort::Data {
                name: "List".into(),
                args: vec![score],
            },
            pred,
        )
    }

    #[test]
    fn refinement_and_binder_of_best_output() {
        let t = score_list(le(Expr::var("k"), Expr::measure("len", Expr::var("v"))));
        assert_eq!(
            refinement(&t),
            &le(Expr::var("k"), Expr::measure("len", Expr::var("v")))
        );
        assert_eq!(binder(&t), "v");
        let w = RefType::new("w", Sort::Int, Expr::tt());
        assert_eq!(binder(&w), "w");
        assert!(refinement(&RefType::int()).is_true());
    }

    #[test]
    fn subst_replaces_free_occurrences() {
        let t = score_list(le(Expr::var("k"), Expr::measure("len", Expr::var("v"))));
        let s = subst(&t, &[("k".into(), Expr::var("x0"))]).unwrap();
        assert_eq!(
            s,
            score_list(le(Expr::var("x0"), Expr::measure("len", Expr::var("v"))))
        );
        assert_eq!(subst(&t, &[]).unwrap(), t);
    }

    #[test]
    fn subst_is_simultaneous() {
        let t = RefType::new(
            "v",
            Sort::Int,
            Expr::and(
                Expr::bin(BinOp::Lt, Expr::var("a"), Expr::var("v")),
                Expr::bin(BinOp::Lt, Expr::var("b"), Expr::var("v")),
            ),
        );
        let s = subst(&t, &[("a".into(), Expr::int(1)), ("b".into(), Expr::int(2))]).unwrap();
        assert_eq!(
            s.pred,
            Expr::and(
                Expr::bin(BinOp::Lt, Expr::int(1), Expr::var("v")),
                Expr::bin(BinOp::Lt, Expr::int(2), Expr::var("v")),
            )
        );
        // a := b, b := a swaps rather than chaining
        let sw = subst(&t, &[("a".into(), Expr::var("b")), ("b".into(), Expr::var("a"))]).unwrap();
        assert_eq!(
            sw.pred,
            Expr::and(
                Expr::bin(BinOp::Lt, Expr::var("b"), Expr::var("v")),
                Expr::bin(BinOp::Lt, Expr::var("a"), Expr::var("v")),
            )
        );
    }

    #[test]
    fn subst_of_binder_is_rejected() {
        let t = RefType::int();
        assert_eq!(
            subst(&t, &[("v".into(), Expr::int(1))]),
            Err(TypeOpError::SubstBinder("v".into()))
        );
    }

    #[test]
    fn subst_avoids_capture() {
        // {v:Int | k < v} with k := v must not capture the binder.
        let t = RefType::new("v", Sort::Int, Expr::bin(BinOp::Lt, Expr::var("k"), Expr::var("v")));
        let s = subst(&t, &[("k".into(), Expr::var("v"))]).unwrap();
        assert_ne!(s.binder, "v");
        assert_eq!(
            s.pred,
            Expr::bin(BinOp::Lt, Expr::var("v"), Expr::var(s.binder.clone()))
        );
    }

    #[test]
    fn merge_keeps_outer_binder() {
        let nat = RefType::new("w", Sort::Int, le(Expr::int(0), Expr::var("w")));
        let m = merge_refinement(&nat, "v", &le(Expr::var("h"), Expr::var("v")));
        assert_eq!(m.binder, "v");
        assert_eq!(
            m.pred,
            Expr::and(le(Expr::int(0), Expr::var("v")), le(Expr::var("h"), Expr::var("v")))
        );
    }
}
