//! JSON encoding of values for the external function protocol.
//!
//! Integers and booleans are JSON scalars; data values are
//! `{"ctor": "Name", "fields": [..]}`.

use std::collections::HashMap;
use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::{json, Map, Number};
use thiserror::Error;

use super::value::Value;
use crate::spec::{Sort, SpecModule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct JsonError(pub String);

pub fn to_json(v: &Value) -> Result<serde_json::Value, JsonError> {
    Ok(match v {
        Value::Int(n) => serde_json::Value::Number(
            Number::from_str(&n.to_string()).map_err(|e| JsonError(e.to_string()))?,
        ),
        Value::Bool(b) => serde_json::Value::Bool(*b),
        Value::Data { ctor, fields, .. } => json!({
            "ctor": &**ctor,
            "fields": fields.iter().map(to_json).collect::<Result<Vec<_>, _>>()?,
        }),
        Value::Fun(_) => return Err(JsonError("function values cannot be sent to an external process".into())),
    })
}

/// Decodes `j` as a value of `sort`, validating constructors and arities.
pub fn from_json(module: &SpecModule, sort: &Sort, j: &serde_json::Value) -> Result<Value, JsonError> {
    decode(module, sort, &HashMap::new(), j)
}

fn decode(
    module: &SpecModule,
    sort: &Sort,
    params: &HashMap<String, Sort>,
    j: &serde_json::Value,
) -> Result<Value, JsonError> {
    let bad = |what: &str| JsonError(format!("expected {what}, got `{j}`"));
    match sort {
        Sort::Int => match j {
            serde_json::Value::Number(n) => BigInt::from_str(&n.to_string())
                .map(Value::Int)
                .map_err(|_| bad("an integer")),
            _ => Err(bad("an integer")),
        },
        Sort::Bool => j.as_bool().map(Value::Bool).ok_or_else(|| bad("a boolean")),
        Sort::Param(p) => match params.get(p) {
            Some(s) => decode(module, s, &HashMap::new(), j),
            None => Err(JsonError(format!("unbound type parameter `{p}`"))),
        },
        Sort::Fun { .. } => Err(JsonError("function values cannot be received".into())),
        Sort::Data { name, args } => {
            let decl = module
                .datatype(name)
                .ok_or_else(|| JsonError(format!("unknown datatype `{name}`")))?;
            let obj: &Map<String, serde_json::Value> =
                j.as_object().ok_or_else(|| bad(&format!("a `{name}` object")))?;
            let cname = obj
                .get("ctor")
                .and_then(|c| c.as_str())
                .ok_or_else(|| bad("a `ctor` string"))?;
            let ctor = decl
                .ctor(cname)
                .ok_or_else(|| JsonError(format!("`{cname}` is not a constructor of `{name}`")))?;
            let empty = Vec::new();
            let fields = match obj.get("fields") {
                None => &empty,
                Some(f) => f.as_array().ok_or_else(|| bad("a `fields` array"))?,
            };
            if fields.len() != ctor.fields.len() {
                return Err(JsonError(format!(
                    "constructor `{cname}` expects {} field(s), got {}",
                    ctor.fields.len(),
                    fields.len()
                )));
            }
            let inner: HashMap<String, Sort> = decl
                .params
                .iter()
                .cloned()
                .zip(args.iter().map(|a| resolve_param(&a.sort, params)))
                .collect();
            let vals = ctor
                .fields
                .iter()
                .zip(fields)
                .map(|((_, t), f)| decode(module, &t.sort, &inner, f))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Value::data(name, cname, vals))
        }
    }
}

fn resolve_param(s: &Sort, params: &HashMap<String, Sort>) -> Sort {
    match s {
        Sort::Param(p) => params.get(p).cloned().unwrap_or_else(|| s.clone()),
        Sort::Data { name, args } => Sort::Data {
            name: name.clone(),
            args: args
                .iter()
                .map(|a| crate::spec::RefType {
                    sort: resolve_param(&a.sort, params),
                    ..a.clone()
                })
                .collect(),
        },
        _ => s.clone(),
    }
}
