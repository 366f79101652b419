//! Shared fixtures and the headless property suites.
#![allow(dead_code)]

use std::collections::HashSet;
use std::ops::ControlFlow;
use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use target_core::bench::{candidate_count, enumerate_pruned, enumerate_symbolic, satisfies_args, Generator};
use target_core::check::check_field;
use target_core::corpus;
use target_core::decode::decode;
use target_core::logic::{eval_measure, Value};
use target_core::query::query;
use target_core::smt::{ModelValue, SatResult, Session, SolverCommand};
use target_core::spec::{parse_spec, Expr, RefType, SpecModule};

/// A parameter list to enumerate: corpus, signature of `f`, largest depth
/// worth trying.
pub struct Case {
    pub corpus: &'static str,
    pub sig: &'static str,
    pub max_depth: u32,
}

pub const CASES: &[Case] = &[
    Case { corpus: "ordlist", sig: "f :: OrdList (Rng 3) -> Bool", max_depth: 4 },
    Case { corpus: "ordlist", sig: "f :: x:Int -> xs:OrdList {v:Int | x <= v} -> Bool", max_depth: 3 },
    Case { corpus: "rbt", sig: "f :: OkRBT Int -> Bool", max_depth: 2 },
    Case { corpus: "rbt", sig: "f :: RBT Int -> Bool", max_depth: 2 },
    Case { corpus: "map", sig: "f :: OkMap Int Bool -> Bool", max_depth: 2 },
    Case { corpus: "map", sig: "f :: Map Int Bool -> Bool", max_depth: 2 },
    Case { corpus: "scores", sig: "f :: r1:Nat -> r2:Nat -> s:Rng r1 -> Bool", max_depth: 3 },
    Case { corpus: "scores", sig: "f :: k:Nat -> {v:[Score] | k <= len v} -> Bool", max_depth: 3 },
    Case { corpus: "scores", sig: "f :: [({v:Int | v /= 0}, Score)] -> Bool", max_depth: 2 },
    Case { corpus: "scores", sig: "f :: {v:[Score] | 1 <= len v} -> Bool", max_depth: 3 },
];

/// Indices of cases whose first parameter is a datatype with measures.
pub const MEASURED: &[usize] = &[2, 3, 4, 5, 9];

pub fn load(corpus_name: &str, sig: &str) -> (Arc<SpecModule>, Vec<(String, RefType)>) {
    let src = format!("{}\n{}", corpus::module_src(corpus_name), sig);
    let m = parse_spec(&src).unwrap_or_else(|e| panic!("{sig}: {e}"));
    let params = m.fun("f").expect("fixture declares f").params.clone();
    (Arc::new(m), params)
}

pub fn case(i: usize) -> (Arc<SpecModule>, Vec<(String, RefType)>) {
    load(CASES[i].corpus, CASES[i].sig)
}

pub fn solver() -> SolverCommand {
    SolverCommand::from_env()
}

/// Membership through the checker, threading earlier arguments.
pub fn checker_args(module: &SpecModule, params: &[(String, RefType)], args: &[Value]) -> bool {
    let mut su = Vec::new();
    args.iter()
        .zip(params)
        .all(|(v, p)| check_field(module, &mut su, v, p).expect("well-sorted").0)
}

pub fn symbolic(module: &Arc<SpecModule>, params: &[(String, RefType)], d: u32, n: i64) -> Vec<Vec<Value>> {
    let mut out = Vec::new();
    enumerate_symbolic(module, params, d, &BigInt::from(n), &solver(), None, &mut |a| out.push(a.to_vec()))
        .expect("symbolic enumeration");
    out
}

pub fn pruned(module: &SpecModule, params: &[(String, RefType)], d: u32, n: i64) -> Vec<Vec<Value>> {
    let mut out = Vec::new();
    enumerate_pruned(module, params, d, &BigInt::from(n), None, &mut |a| out.push(a.to_vec())).expect("oracle");
    out
}

pub fn sorted(mut v: Vec<Vec<Value>>) -> Vec<String> {
    let mut s: Vec<String> = v.drain(..).map(|a| format!("{a:?}")).collect();
    s.sort();
    s
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn finish(r: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

/// Nested guards behave as implications: a guarded `false` is satisfiable
/// exactly when some enclosing guard is off.
pub fn guard_nesting(cases: u32) -> Result<(), String> {
    let module = Arc::new(parse_spec("").unwrap());
    let strat = proptest::collection::vec(any::<bool>(), 1..6);
    finish(runner(cases).run(&strat, |assignment| {
        let mut s = Session::new(module.clone(), &solver()).expect("solver starts");
        let gs: Vec<_> = assignment.iter().map(|_| s.fresh_choice().unwrap()).collect();
        fn nest(s: &mut Session, gs: &[target_core::smt::LogicVar], depth: usize) {
            match gs.split_first() {
                Some((g, rest)) => s.guard(*g, |s| nest(s, rest, depth + 1)),
                None => {
                    assert_eq!(s.guard_depth(), depth);
                    s.assert_expr(&Expr::Bool(false)).unwrap();
                }
            }
        }
        nest(&mut s, &gs, 0);
        for (g, on) in gs.iter().zip(&assignment) {
            let e = if *on { g.expr() } else { Expr::Not(Box::new(g.expr())) };
            s.assert_expr(&e).unwrap();
        }
        let sat = matches!(s.check_sat().unwrap(), SatResult::Sat(_));
        prop_assert_eq!(sat, !assignment.iter().all(|b| *b), "assignment {:?}", assignment);
        Ok(())
    }))
}

fn depth_and_bound(case: usize) -> impl Strategy<Value = (usize, u32, i64)> {
    let max = CASES[case].max_depth;
    (Just(case), 0..=max, 0i64..=3)
}

fn any_case(indices: &'static [usize]) -> impl Strategy<Value = (usize, u32, i64)> {
    proptest::sample::select(indices).prop_flat_map(depth_and_bound)
}

const ALL_CASES: &[usize] = &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9];

/// Every decoded input inhabits its type by both membership routes, lies
/// within the depth and integer bounds, and is produced only once.
pub fn decode_soundness(cases: u32) -> Result<(), String> {
    finish(runner(cases).run(&any_case(ALL_CASES), |(i, d, n)| {
        let (m, params) = case(i);
        let got = symbolic(&m, &params, d, n);
        let oracle: HashSet<String> = sorted(pruned(&m, &params, d, n)).into_iter().collect();
        let mut seen = HashSet::new();
        for args in &got {
            let key = format!("{args:?}");
            prop_assert!(seen.insert(key.clone()), "duplicate {}", key);
            prop_assert!(satisfies_args(&m, &params, args).unwrap(), "flattened check rejects {}", key);
            prop_assert!(checker_args(&m, &params, args), "checker rejects {}", key);
            prop_assert!(oracle.contains(&key), "{} is outside depth {} / bound {}", key, d, n);
        }
        Ok(())
    }))
}

fn to_value(v: ModelValue) -> Value {
    match v {
        ModelValue::Int(n) => Value::Int(n),
        ModelValue::Bool(b) => Value::Bool(b),
    }
}

/// The solver's measure values agree with evaluating the measure on the
/// decoded value.
pub fn measure_consistency(cases: u32) -> Result<(), String> {
    let strat = (any_case(MEASURED), 1usize..8);
    finish(runner(cases).run(&strat, |((i, d, n), models)| {
        let (m, params) = case(i);
        let t = &params[0].1;
        let data = t.sort.data_name().expect("measured case").to_string();
        let mut s = Session::new(m.clone(), &solver()).unwrap();
        let x = query(&mut s, t, d, Some(&BigInt::from(n))).unwrap();
        for _ in 0..models {
            let mut model = match s.check_sat().unwrap() {
                SatResult::Sat(md) => md,
                _ => break,
            };
            let v = decode(&mut s, x, &mut model).unwrap();
            for md in m.measures_on(&data) {
                let smt = to_value(s.measure_value(&mut model, &md.name, x).unwrap());
                let ev = eval_measure(&m, md, &v).unwrap();
                prop_assert_eq!(&smt, &ev, "measure {} of {}", md.name, v);
            }
            s.refute(&mut model).unwrap();
        }
        Ok(())
    }))
}

/// The checker and the flatten-and-evaluate route agree on arbitrary
/// candidates, valid or not.
pub fn checker_oracle(cases: u32) -> Result<(), String> {
    let strat = (any_case(ALL_CASES), any::<u64>(), any::<bool>());
    finish(runner(cases).run(&strat, |((i, d, n), pick, from_valid)| {
        let (m, params) = case(i);
        let nb = BigInt::from(n);
        let args = if from_valid {
            let valid = pruned(&m, &params, d, n);
            if valid.is_empty() {
                return Ok(());
            }
            valid[(pick % valid.len() as u64) as usize].clone()
        } else {
            let total = candidate_count(&m, &params, d, &nb).unwrap();
            let total: u64 = total.try_into().unwrap_or(u64::MAX).min(200_000);
            let target = pick % total;
            let tys: Vec<_> = params.iter().map(|(_, t)| t.sort.erase().unwrap()).collect();
            let g = Generator::new(&m, &tys, &nb).unwrap();
            let mut k = 0u64;
            let mut found = None;
            let _ = g.each_tuple(&tys, d, &mut |a| {
                if k == target {
                    found = Some(a.to_vec());
                    return ControlFlow::Break(());
                }
                k += 1;
                ControlFlow::Continue(())
            });
            found.expect("index below candidate count")
        };
        let a = checker_args(&m, &params, &args);
        let b = satisfies_args(&m, &params, &args).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(a, b, "{:?}", args);
        Ok(())
    }))
}
