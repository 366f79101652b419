//! Synthesis of function-typed arguments: each call checks its inputs
//! against the domain and asks the solver for an output in the codomain.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use indexmap::IndexMap;

use super::DriverError;
use crate::check::check_field;
use crate::decode::decode;
use crate::error::EngineError;
use crate::logic::{to_reft, CallError, FunHandle, Value};
use crate::query::query;
use crate::smt::{SatResult, Session, SmtError};
use crate::spec::ops::subst_reftype;
use crate::spec::{Expr, RefType, Sort};

/// A run-wide synthesizer for one function-typed parameter. It owns an
/// auxiliary solver session shared by all the functions it hands out.
pub(crate) struct Synthesizer {
    pub name: String,
    session: Arc<Mutex<Session>>,
    depth: u32,
    /// First problem raised by any handed-out function during the current
    /// test.
    pub problem: Arc<Mutex<Option<Problem>>>,
}

#[derive(Debug, Clone)]
pub(crate) enum Problem {
    Domain { args: Vec<Value> },
    Fatal(DriverError),
}

/// The observable graph of one synthesized function.
pub type Graph = Arc<Mutex<IndexMap<Vec<Value>, Value>>>;

impl Synthesizer {
    pub fn new(name: &str, session: Session, depth: u32) -> Synthesizer {
        Synthesizer {
            name: name.to_string(),
            session: Arc::new(Mutex::new(session)),
            depth,
            problem: Arc::new(Mutex::new(None)),
        }
    }

    /// A fresh memoized function of sort `t`, which must already have all
    /// outer binders substituted.
    pub fn function(&self, t: &RefType) -> Result<(FunHandle, Graph), DriverError> {
        let Sort::Fun { params, result } = &t.sort else {
            return Err(DriverError::Unsupported(format!("`{}` is not a function", self.name)));
        };
        let params = params.clone();
        let result = (**result).clone();
        let session = self.session.clone();
        let problem = self.problem.clone();
        let depth = self.depth;
        let graph: Graph = Arc::new(Mutex::new(IndexMap::new()));
        let memo = graph.clone();
        let f = move |args: &[Value]| -> Result<Value, CallError> {
            if let Some(v) = memo.lock().unwrap().get(args) {
                return Ok(v.clone());
            }
            let report = |p: Problem, msg: String| {
                problem.lock().unwrap().get_or_insert(p);
                Err(CallError(msg))
            };
            if args.len() != params.len() {
                return report(
                    Problem::Domain { args: args.to_vec() },
                    format!("expected {} argument(s), got {}", params.len(), args.len()),
                );
            }
            let mut session = session.lock().unwrap();
            let module = session.module().clone();
            let mut su = Vec::new();
            for (a, p) in args.iter().zip(&params) {
                match check_field(&module, &mut su, a, p) {
                    Ok((true, _)) => {}
                    Ok((false, _)) | Err(_) => {
                        return report(
                            Problem::Domain { args: args.to_vec() },
                            format!("argument {a} is outside the declared domain"),
                        )
                    }
                }
            }
            let map: HashMap<&str, &Expr> = su.iter().map(|(k, e)| (k.as_str(), e)).collect();
            let codomain = subst_reftype(&result, &map);
            match codomain_value(&mut session, &codomain, depth) {
                Ok(Some(v)) => {
                    memo.lock().unwrap().insert(args.to_vec(), v.clone());
                    Ok(v)
                }
                Ok(None) => report(
                    Problem::Fatal(DriverError::Uninhabited {
                        function: codomain.to_string(),
                        args: args.iter().map(Value::to_string).collect::<Vec<_>>().join(", "),
                    }),
                    "codomain is uninhabited".into(),
                ),
                Err(e) => report(Problem::Fatal(e), "solver failure".into()),
            }
        };
        Ok((FunHandle::new(f), graph))
    }
}

fn codomain_value(session: &mut Session, t: &RefType, depth: u32) -> Result<Option<Value>, DriverError> {
    session.push();
    let r = (|| {
        let x = query(session, t, depth, None)?;
        match session.check_sat()? {
            SatResult::Sat(mut m) => Ok(Some(decode(session, x, &mut m)?)),
            SatResult::Unsat => Ok(None),
            SatResult::Timeout => Err(DriverError::Engine(EngineError::Smt(SmtError::Timeout))),
            SatResult::Unknown => Err(DriverError::SolverUnknown),
        }
    })();
    session.pop();
    r
}

/// Encodings of first-order inputs, keyed by binder.
pub(crate) fn encodings(inputs: &[(String, Value)]) -> Vec<(String, Expr)> {
    inputs
        .iter()
        .filter_map(|(b, v)| to_reft(v).ok().map(|e| (b.clone(), e)))
        .collect()
}
