//! Text-level encodings shared by the session and its tests.

use num_bigint::{BigInt, Sign};

use crate::spec::Ty;

pub fn int_lit(n: &BigInt) -> String {
    if n.sign() == Sign::Minus {
        format!("(- {})", n.magnitude())
    } else {
        n.to_string()
    }
}

/// `(=> g1 (=> g2 (... p)))`, or `p` itself with no guards.
pub fn guarded(guards: &[String], p: String) -> String {
    guards
        .iter()
        .rev()
        .fold(p, |acc, g| format!("(=> {g} {acc})"))
}

/// At-least-one plus pairwise exclusion over `choices`.
pub fn exactly_one(choices: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    out.push(match choices {
        [] => "false".to_string(),
        [c] => c.clone(),
        cs => format!("(or {})", cs.join(" ")),
    });
    for i in 0..choices.len() {
        for j in i + 1..choices.len() {
            out.push(format!("(not (and {} {}))", choices[i], choices[j]));
        }
    }
    out
}

/// `(or (not (= x1 v1)) ...)`.
pub fn refutation(assignments: &[(String, String)]) -> String {
    let parts: Vec<String> = assignments
        .iter()
        .map(|(x, v)| match v.as_str() {
            "true" => format!("(not {x})"),
            "false" => x.clone(),
            _ => format!("(not (= {x} {v}))"),
        })
        .collect();
    match parts.as_slice() {
        [] => "false".to_string(),
        [p] => p.clone(),
        ps => format!("(or {})", ps.join(" ")),
    }
}

pub fn sort_name(t: &Ty) -> String {
    match t {
        Ty::Int => "Int".into(),
        Ty::Bool => "Bool".into(),
        Ty::Data(..) => format!("|{t}|"),
    }
}

pub fn ctor_fun(t: &Ty, ctor: &str) -> String {
    format!("|{t}.{ctor}|")
}

pub fn tag_fun(t: &Ty) -> String {
    format!("|tag@{t}|")
}

pub fn measure_fun(measure: &str, t: &Ty) -> String {
    format!("|{measure}@{t}|")
}
