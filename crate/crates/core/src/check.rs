//! Checking that a concrete value inhabits a refinement type.

use std::collections::HashMap;

use crate::error::EngineError;
use crate::logic::{eval_in, to_reft, Value};
use crate::spec::ops::{subst_reftype, unfold};
use crate::spec::{Expr, RefType, Sort, SpecModule};

/// Constructor name and fields of a data value.
pub fn split_ctor(v: &Value) -> Result<(&str, &[Value]), EngineError> {
    match v {
        Value::Data { ctor, fields, .. } => Ok((ctor, fields)),
        other => Err(EngineError::Sort(format!("{other} is not a data value"))),
    }
}

/// Whether `v` inhabits `t`, together with the term encoding `v`.
pub fn check(module: &SpecModule, v: &Value, t: &RefType) -> Result<(bool, Expr), EngineError> {
    match (&t.sort, v) {
        (Sort::Int, Value::Int(_)) | (Sort::Bool, Value::Bool(_)) => {
            let ok = top(module, v, t)?;
            Ok((ok, to_reft(v)?))
        }
        (Sort::Data { name, .. }, Value::Data { data, .. }) if **data == **name => {
            let (ctor, vals) = split_ctor(v)?;
            let c = module
                .ctor(name, ctor)
                .ok_or_else(|| EngineError::Sort(format!("`{ctor}` is not a constructor of `{name}`")))?;
            let fields = unfold(module, c, t)?;
            if fields.len() != vals.len() {
                return Err(EngineError::Sort(format!("`{ctor}` value has the wrong arity")));
            }
            let mut su = Vec::new();
            let mut ok = true;
            let mut encs = Vec::new();
            for (fv, f) in vals.iter().zip(&fields) {
                if ok {
                    let (fok, enc) = check_field(module, &mut su, fv, f)?;
                    ok = fok;
                    encs.push(enc);
                } else {
                    encs.push(to_reft(fv)?);
                }
            }
            let ok = ok && top(module, v, t)?;
            Ok((
                ok,
                Expr::Ctor {
                    data: name.clone(),
                    ctor: ctor.to_string(),
                    args: encs,
                },
            ))
        }
        (s, v) => Err(EngineError::Sort(format!("{v} does not have sort {s}"))),
    }
}

/// Checks one field against its type with earlier fields substituted, then
/// records the field's encoding in `su`.
pub fn check_field(
    module: &SpecModule,
    su: &mut Vec<(String, Expr)>,
    v: &Value,
    (name, ft): &(String, RefType),
) -> Result<(bool, Expr), EngineError> {
    let map: HashMap<&str, &Expr> = su.iter().map(|(k, e)| (k.as_str(), e)).collect();
    let ft = subst_reftype(ft, &map);
    let (ok, enc) = check(module, v, &ft)?;
    su.push((name.clone(), enc.clone()));
    Ok((ok, enc))
}

fn top(module: &SpecModule, v: &Value, t: &RefType) -> Result<bool, EngineError> {
    if t.pred.is_true() {
        return Ok(true);
    }
    match eval_in(module, &[(t.binder.as_str(), v)], &t.pred)? {
        Value::Bool(b) => Ok(b),
        other => Err(EngineError::Sort(format!("refinement evaluated to {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_spec;

    const SRC: &str = "\
type Rng N = {v:Int | 0 <= v && v < N}
data OrdList a = [] | (:) {h :: a, t :: OrdList {v:a | h <= v}}
measure len :: [a] -> Int
len [] = 0
len (x:xs) = 1 + len xs
data Col = Red | Black
data RBT a = Leaf | Node {c :: Col, key :: a, l :: RBT a, r :: RBT a}
f :: x:Rng 0 -> y:Rng 100 -> z:OrdList Int -> k:Int -> {v:[Int] | k = len v}
";

    fn ord(xs: &[i64]) -> Value {
        xs.iter().rev().fold(Value::data("OrdList", "[]", vec![]), |acc, x| {
            Value::data("OrdList", ":", vec![Value::int(*x), acc])
        })
    }

    #[test]
    fn ranges() {
        let m = parse_spec(SRC).unwrap();
        let f = m.fun("f").unwrap();
        assert_eq!(check(&m, &Value::int(0), &f.params[0].1).unwrap(), (false, Expr::int(0)));
        assert_eq!(check(&m, &Value::int(40), &f.params[1].1).unwrap(), (true, Expr::int(40)));
    }

    #[test]
    fn ordering_is_checked_through_fields() {
        let m = parse_spec(SRC).unwrap();
        let t = &m.fun("f").unwrap().params[2].1;
        assert!(!check(&m, &ord(&[2, 1]), t).unwrap().0);
        assert!(check(&m, &ord(&[1, 1, 2]), t).unwrap().0);
        let (_, enc) = check(&m, &ord(&[2, 1]), t).unwrap();
        assert_eq!(enc, to_reft(&ord(&[2, 1])).unwrap());
    }

    #[test]
    fn measure_in_result() {
        let m = parse_spec(SRC).unwrap();
        let f = m.fun("f").unwrap();
        let su = [("k".to_string(), Expr::int(2))];
        let out = crate::spec::ops::subst(&f.result, &su).unwrap();
        let two = Value::list([Value::int(5), Value::int(5)]);
        assert!(check(&m, &two, &out).unwrap().0);
        assert!(!check(&m, &Value::list([Value::int(5)]), &out).unwrap().0);
    }

    #[test]
    fn split_and_sort_errors() {
        let m = parse_spec(SRC).unwrap();
        let leaf = Value::data("RBT", "Leaf", vec![]);
        let red = Value::data("Col", "Red", vec![]);
        let node = Value::data("RBT", "Node", vec![red, Value::int(5), leaf.clone(), leaf.clone()]);
        assert_eq!(split_ctor(&leaf).unwrap().1.len(), 0);
        assert_eq!(split_ctor(&node).unwrap().1.len(), 4);
        assert!(split_ctor(&Value::int(1)).is_err());
        let t = &m.fun("f").unwrap().params[0].1;
        assert!(check(&m, &leaf, t).is_err());
    }
}
