//! The query-decode-check loop.

mod config;
mod fut;
mod synth;

use std::collections::HashMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use thiserror::Error;

pub use config::{Config, MaxTests};
pub use fut::{ExternalFut, FunctionUnderTest, NativeFn, Outcome};
pub use synth::Graph;

use crate::check::check;
use crate::decode::decode;
use crate::error::EngineError;
use crate::logic::Value;
use crate::query::query;
use crate::smt::{LogicVar, SatResult, Session, SmtError};
use crate::spec::ops::subst_reftype;
use crate::spec::{Expr, FunSpec, SpecModule};
use synth::{encodings, Problem, Synthesizer};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DriverError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("solver could not decide satisfiability")]
    SolverUnknown,
    #[error("function under test: {0}")]
    Fut(String),
    #[error("function under test did not answer within {0:?}")]
    FutTimeout(Duration),
    #[error("no value of {function} exists for arguments ({args})")]
    Uninhabited { function: String, args: String },
    #[error("{0}")]
    Unsupported(String),
}

impl From<SmtError> for DriverError {
    fn from(e: SmtError) -> Self {
        DriverError::Engine(EngineError::Smt(e))
    }
}

/// Why a counterexample fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    /// The output does not inhabit the result type.
    Output(Value),
    /// The function raised an error.
    Crash(String),
    /// A synthesized argument was called outside its domain.
    Domain { function: String, args: Vec<Value> },
}

/// Argument tuples and results of one synthesized function.
pub type FunctionGraph = Vec<(Vec<Value>, Value)>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TestResult {
    Passed {
        tests: u64,
        exhausted: bool,
    },
    Counterexample {
        inputs: Vec<(String, Value)>,
        failure: Failure,
        /// Graphs of synthesized function arguments as observed by the test.
        functions: Vec<(String, FunctionGraph)>,
        tests: u64,
    },
    SolverTimeout {
        at: u64,
    },
    /// The run's time budget ran out after `tests` tests.
    OutOfTime {
        tests: u64,
    },
}

impl TestResult {
    pub fn tests(&self) -> u64 {
        match self {
            TestResult::Passed { tests, .. } | TestResult::Counterexample { tests, .. } => *tests,
            TestResult::SolverTimeout { at } => *at,
            TestResult::OutOfTime { tests } => *tests,
        }
    }

    pub fn is_counterexample(&self) -> bool {
        matches!(self, TestResult::Counterexample { .. })
    }
}

/// One executed test, as seen by an observer.
pub struct TestEvent<'a> {
    pub index: u64,
    pub inputs: &'a [(String, Value)],
    pub outcome: &'a Outcome,
    pub passed: bool,
}

enum Param {
    Query(LogicVar),
    Fun(Synthesizer),
}

/// Tests `f` against `spec`.
pub fn target(
    f: &mut FunctionUnderTest,
    module: &Arc<SpecModule>,
    spec: &FunSpec,
    cfg: &Config,
) -> Result<TestResult, DriverError> {
    target_observed(f, module, spec, cfg, &mut |_| {})
}

/// Like [`target`], calling `observer` after every executed test.
pub fn target_observed(
    f: &mut FunctionUnderTest,
    module: &Arc<SpecModule>,
    spec: &FunSpec,
    cfg: &Config,
    observer: &mut dyn FnMut(&TestEvent),
) -> Result<TestResult, DriverError> {
    if f.is_external() {
        if let Some((b, _)) = spec.params.iter().find(|(_, t)| t.sort.is_fun()) {
            return Err(DriverError::Unsupported(format!(
                "parameter `{b}` is a function; external functions only take first-order arguments"
            )));
        }
    }
    let started = Instant::now();
    let bound = cfg.bound();
    let mut session = Session::new(module.clone(), &cfg.solver)?;
    session.set_timeout(cfg.smt_timeout);

    let mut su: Vec<(String, Expr)> = Vec::new();
    let mut params = Vec::new();
    for (b, t) in &spec.params {
        if t.sort.is_fun() {
            let mut aux = Session::new(module.clone(), &cfg.solver)?;
            aux.set_timeout(cfg.smt_timeout);
            params.push(Param::Fun(Synthesizer::new(b, aux, cfg.depth)));
            continue;
        }
        let map: HashMap<&str, &Expr> = su.iter().map(|(k, e)| (k.as_str(), e)).collect();
        let t = subst_reftype(t, &map);
        let x = query(&mut session, &t, cfg.depth, Some(&bound))?;
        su.push((b.clone(), x.expr()));
        params.push(Param::Query(x));
    }

    let mut tests = 0u64;
    loop {
        if let MaxTests::Count(n) = cfg.max_tests {
            if tests >= n {
                return Ok(TestResult::Passed {
                    tests,
                    exhausted: false,
                });
            }
        }
        if let Some(budget) = cfg.time_budget {
            let Some(left) = budget.checked_sub(started.elapsed()) else {
                return Ok(TestResult::OutOfTime { tests });
            };
            session.set_timeout(Some(cfg.smt_timeout.map_or(left, |t| t.min(left))));
        }
        let mut model = match session.check_sat()? {
            SatResult::Sat(m) => m,
            SatResult::Unsat => {
                return Ok(TestResult::Passed {
                    tests,
                    exhausted: true,
                })
            }
            SatResult::Timeout if cfg.time_budget.is_some_and(|b| started.elapsed() >= b) => {
                return Ok(TestResult::OutOfTime { tests })
            }
            SatResult::Timeout => return Ok(TestResult::SolverTimeout { at: tests }),
            SatResult::Unknown => return Err(DriverError::SolverUnknown),
        };

        let mut inputs: Vec<(String, Value)> = Vec::new();
        let mut graphs = Vec::new();
        for ((b, t), p) in spec.params.iter().zip(&params) {
            let v = match p {
                Param::Query(x) => decode(&mut session, *x, &mut model)?,
                Param::Fun(s) => {
                    *s.problem.lock().unwrap() = None;
                    let enc = encodings(&inputs);
                    let map: HashMap<&str, &Expr> = enc.iter().map(|(k, e)| (k.as_str(), e)).collect();
                    let (h, g) = s.function(&subst_reftype(t, &map))?;
                    graphs.push((s.name.clone(), g));
                    Value::Fun(h)
                }
            };
            inputs.push((b.clone(), v));
        }
        let only_input = session.relevant().is_empty();

        let args: Vec<Value> = inputs.iter().map(|(_, v)| v.clone()).collect();
        let outcome = f.execute(module, &spec.result.sort, &args, cfg.fut_timeout)?;

        let mut failure = None;
        for p in &params {
            if let Param::Fun(s) = p {
                match s.problem.lock().unwrap().take() {
                    Some(Problem::Fatal(e)) => return Err(e),
                    Some(Problem::Domain { args }) if failure.is_none() => {
                        failure = Some(Failure::Domain {
                            function: s.name.clone(),
                            args,
                        })
                    }
                    _ => {}
                }
            }
        }
        if failure.is_none() {
            failure = match &outcome {
                Outcome::Crashed(msg) => Some(Failure::Crash(msg.clone())),
                Outcome::Returned(v) => {
                    let enc = encodings(&inputs);
                    let map: HashMap<&str, &Expr> = enc.iter().map(|(k, e)| (k.as_str(), e)).collect();
                    let out_t = subst_reftype(&spec.result, &map);
                    let (ok, _) = check(module, v, &out_t)?;
                    (!ok).then(|| Failure::Output(v.clone()))
                }
            };
        }
        tests += 1;
        observer(&TestEvent {
            index: tests - 1,
            inputs: &inputs,
            outcome: &outcome,
            passed: failure.is_none(),
        });
        if let Some(failure) = failure {
            let functions = graphs
                .into_iter()
                .map(|(n, g)| {
                    let g = g.lock().unwrap();
                    (n, g.iter().map(|(a, r)| (a.clone(), r.clone())).collect())
                })
                .collect();
            return Ok(TestResult::Counterexample {
                inputs,
                failure,
                functions,
                tests,
            });
        }
        if only_input {
            return Ok(TestResult::Passed {
                tests,
                exhausted: true,
            });
        }
        session.refute(&mut model)?;
    }
}
