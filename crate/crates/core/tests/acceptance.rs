//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::collections::HashSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};

use common::{load, pruned, sorted, symbolic};
use target_core::bench::{candidate_count, enumerate_filter, enumerate_symbolic, ratio};
use target_core::builtins;
use target_core::corpus;
use target_core::driver::{target_observed, Config, TestResult};
use target_core::logic::Value;
use target_core::smt::SolverCommand;
use target_core::spec::SpecModule;

type Outcome = Result<String, String>;

/// Runs a built-in, recording every input tuple it was tested on.
struct Run {
    result: TestResult,
    elapsed: Duration,
    inputs: Vec<String>,
}

fn run(corpus_name: &str, fun: &str, cfg: &Config) -> Result<Run, String> {
    let m = Arc::new(corpus::module(corpus_name).unwrap().map_err(|e| e.to_string())?);
    let spec = m.fun(fun).ok_or(format!("no {fun}"))?.clone();
    let mut f = builtins::fut(fun).ok_or(format!("no built-in {fun}"))?;
    let mut inputs = Vec::new();
    let start = Instant::now();
    let result = target_observed(&mut f, &m, &spec, cfg, &mut |e| {
        inputs.push(format!("{:?}", e.inputs));
    })
    .map_err(|e| format!("{fun}: {e}"))?;
    Ok(Run {
        result,
        elapsed: start.elapsed(),
        inputs,
    })
}

fn input<'a>(r: &'a TestResult, name: &str) -> Option<&'a Value> {
    match r {
        TestResult::Counterexample { inputs, .. } => inputs.iter().find(|(b, _)| b == name).map(|(_, v)| v),
        _ => None,
    }
}

fn weight_sum(v: &Value) -> Option<BigInt> {
    v.as_list()?
        .into_iter()
        .map(|p| p.as_pair().and_then(|(w, _)| w.as_int().cloned()))
        .sum()
}

fn passed_exhaustively(r: &TestResult) -> bool {
    matches!(r, TestResult::Passed { exhausted: true, .. })
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

/// Every run's input tuples, for the distinctness criterion.
#[derive(Default)]
struct Seen {
    runs: Vec<(String, Vec<String>)>,
}

impl Seen {
    fn add(&mut self, label: impl Into<String>, inputs: Vec<String>) {
        self.runs.push((label.into(), inputs));
    }
}

fn rescale(seen: &mut Seen) -> Outcome {
    let mut found = None;
    for d in 0..=1 {
        let r = run("scores", "rescale", &Config::new(d))?;
        seen.add(format!("rescale d{d}"), r.inputs.clone());
        if r.result.is_counterexample() {
            found = Some((d, r));
            break;
        }
    }
    let (d, r) = found.ok_or("no counterexample for Nat/Nat up to depth 1")?;
    ensure(input(&r.result, "r2") == Some(&Value::int(0)), format!("counterexample {:?}", r.result))?;
    ensure(r.elapsed < Duration::from_secs(5), format!("took {:?}", r.elapsed))?;
    let p = run("scores", "rescalePos", &Config::new(3))?;
    seen.add("rescalePos d3", p.inputs.clone());
    ensure(
        p.result == TestResult::Passed { tests: 18, exhausted: true },
        format!("Pos/Pos: {:?}", p.result),
    )?;
    ensure(p.elapsed < Duration::from_secs(30), format!("Pos/Pos took {:?}", p.elapsed))?;
    Ok(format!(
        "Nat/Nat: r2 = 0 at depth {d} in {:.2?}; Pos/Pos: 18 tests, exhausted, in {:.2?}",
        r.elapsed, p.elapsed
    ))
}

fn average(seen: &mut Seen) -> Outcome {
    let limit = Duration::from_secs(60);
    let mut found = None;
    for d in 1..=3 {
        let r = run("scores", "average", &Config::new(d))?;
        seen.add(format!("average d{d}"), r.inputs.clone());
        if r.result.is_counterexample() {
            found = Some((d, r));
            break;
        }
    }
    let (d, a) = found.ok_or("unconstrained weights: no counterexample up to depth 3")?;
    let wa = input(&a.result, "_0").and_then(weight_sum);
    ensure(wa == Some(BigInt::from(0)), format!("unconstrained: {:?}", a.result))?;
    let nz = run("scores", "averageNZ", &Config::new(2).with_bound(1))?;
    seen.add("averageNZ d2 N1", nz.inputs.clone());
    let wnz = input(&nz.result, "_0").and_then(weight_sum);
    ensure(wnz == Some(BigInt::from(0)), format!("nonzero weights: {:?}", nz.result))?;
    let pos = run("scores", "averagePos", &Config::new(3))?;
    seen.add("averagePos d3", pos.inputs.clone());
    ensure(passed_exhaustively(&pos.result), format!("Pos weights: {:?}", pos.result))?;
    for (what, t) in [("unconstrained", a.elapsed), ("nonzero", nz.elapsed), ("Pos", pos.elapsed)] {
        ensure(t < limit, format!("{what} took {t:?}"))?;
    }
    Ok(format!(
        "unconstrained: zero total weight at depth {d}; nonzero: {} (depth 2, ints in [-1,1]); Pos: {} tests exhausted in {:.2?}",
        input(&nz.result, "_0").unwrap(),
        pos.result.tests(),
        pos.elapsed
    ))
}

fn best(seen: &mut Seen) -> Outcome {
    let mut found = None;
    for d in 0..=2 {
        let r = run("scores", "best", &Config::new(d))?;
        seen.add(format!("best d{d}"), r.inputs.clone());
        if r.result.is_counterexample() {
            found = Some((d, r));
            break;
        }
    }
    let (d, r) = found.ok_or("no counterexample up to depth 2")?;
    let k = input(&r.result, "k").and_then(|v| v.as_int().cloned());
    let len = input(&r.result, "_1").and_then(|v| v.as_list()).map(|l| BigInt::from(l.len()));
    ensure(matches!((&k, &len), (Some(k), Some(l)) if k > l), format!("{:?}", r.result))?;
    let fixed = run("scores", "bestFixed", &Config::new(3))?;
    seen.add("bestFixed d3", fixed.inputs.clone());
    ensure(passed_exhaustively(&fixed.result), format!("fixed: {:?}", fixed.result))?;
    Ok(format!(
        "k = {} > len = {} at depth {d}; fixed spec: {} tests exhausted",
        k.unwrap(),
        len.unwrap(),
        fixed.result.tests()
    ))
}

fn naive(m: &SpecModule, p: &[(String, target_core::spec::RefType)], d: u32) -> Vec<Vec<Value>> {
    let mut out = Vec::new();
    enumerate_filter(m, p, d, &BigInt::from(d), None, &mut |a| out.push(a.to_vec())).expect("brute force");
    out
}

fn exhaustiveness(seen: &mut Seen) -> Outcome {
    let start = Instant::now();
    let mut report = Vec::new();
    // (corpus, type, depths, largest depth the unpruned brute force can finish)
    let cases = [
        ("ordlist", "OrdList (Rng 3)", 4, 4),
        ("rbt", "OkRBT Int", 3, 2),
        ("map", "OkMap Int Bool", 3, 2),
    ];
    for (c, ty, max, naive_max) in cases {
        let (m, p) = load(c, &format!("f :: {ty} -> Bool"));
        let mut counts = Vec::new();
        for d in 0..=max {
            let sym = symbolic(&m, &p, d, d as i64);
            seen.add(format!("{ty} d{d}"), sym.iter().map(|a| format!("{a:?}")).collect());
            let n = sym.len();
            let oracle = if d <= naive_max { naive(&m, &p, d) } else { pruned(&m, &p, d, d as i64) };
            ensure(sorted(sym) == sorted(oracle), format!("{ty} differs from the oracle at depth {d}"))?;
            counts.push(n.to_string());
        }
        let via = if naive_max < max { format!(", depth > {naive_max} against the pruned brute force") } else { String::new() };
        report.push(format!("{ty} [{}]{via}", counts.join(",")));
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(300), format!("took {t:?}"))?;
    Ok(format!("{} in {:.2?}", report.join("; "), t))
}

fn distinct(seen: &Seen) -> Outcome {
    let mut total = 0;
    for (label, inputs) in &seen.runs {
        let mut set = HashSet::new();
        for i in inputs {
            ensure(set.insert(i), format!("{label}: {i} decoded twice"))?;
        }
        total += inputs.len();
    }
    Ok(format!("{total} tuples over {} runs, none repeated within a run", seen.runs.len()))
}

fn broken_variants() -> Outcome {
    let mut parts = Vec::new();
    for (c, fun) in [("rbt", "addNoBalance"), ("map", "deleteUnbalanced")] {
        let start = Instant::now();
        let mut found = None;
        for d in 1..=4 {
            let r = run(c, fun, &Config::new(d))?;
            if r.result.is_counterexample() {
                found = Some(d);
                break;
            }
        }
        let t = start.elapsed();
        let d = found.ok_or(format!("{fun}: no counterexample up to depth 4"))?;
        ensure(t < Duration::from_secs(120), format!("{fun} took {t:?}"))?;
        parts.push(format!("{fun} at depth {d} in {t:.2?}"));
    }
    Ok(parts.join("; "))
}

fn sparsity() -> Outcome {
    let (m, p) = load("ordlist", "f :: OrdList (Rng 8) -> Bool");
    let budget = Duration::from_secs(60);
    let mut log = Vec::new();
    for d in 1..=10u32 {
        let n = BigInt::from(d);
        let sym = enumerate_symbolic(&m, &p, d, &n, &SolverCommand::from_env(), Some(Instant::now() + budget), &mut |_| {})
            .map_err(|e| e.to_string())?;
        if sym.timed_out {
            return Err(format!("symbolic enumeration timed out at depth {d}; {}", log.join(", ")));
        }
        let base = enumerate_filter(&m, &p, d, &n, Some(Instant::now() + budget), &mut |_| {}).map_err(|e| e.to_string())?;
        if !base.timed_out {
            ensure(base.valid == sym.valid, format!("depth {d}: {} valid vs {} symbolic", base.valid, sym.valid))?;
        }
        let candidates = candidate_count(&m, &p, d, &n).map_err(|e| e.to_string())?;
        let cand_ratio = ratio(&candidates, &BigUint::from(sym.valid));
        // a timed-out baseline only gives a lower bound on its time
        let speedup = base.elapsed.as_secs_f64() / sym.elapsed.as_secs_f64().max(1e-9);
        let bound = if base.timed_out { ">=" } else { "" };
        log.push(format!("d{d} {bound}{speedup:.1}x"));
        if speedup >= 10.0 && cand_ratio >= 100.0 {
            return Ok(format!(
                "depth {d}: symbolic {:.2?} vs baseline {bound}{:.2?} ({bound}{speedup:.1}x), {candidates} candidates for {} valid ({cand_ratio:.0}x)",
                sym.elapsed, base.elapsed, sym.valid
            ));
        }
    }
    Err(format!("no depth up to 10 qualifies: {}", log.join(", ")))
}

fn pad_average() -> Outcome {
    let plain = run("scores", "padAverage", &Config::new(2))?;
    ensure(passed_exhaustively(&plain.result), format!("padAverage: {:?}", plain.result))?;
    let memo = run("scores", "padAverageMemo", &Config::new(2))?;
    ensure(passed_exhaustively(&memo.result), format!("memo variant: {:?}", memo.result))?;
    Ok(format!(
        "padAverage: {} tests; memo variant (3 calls per score, answers equal and in {{v:Score | s <= v}}): {} tests",
        plain.result.tests(),
        memo.result.tests()
    ))
}

fn properties() -> Outcome {
    let cases = 64;
    type Suite = fn(u32) -> Result<(), String>;
    let suites: [(&str, Suite); 4] = [
        ("guard nesting", common::guard_nesting),
        ("measure consistency", common::measure_consistency),
        ("decode soundness", common::decode_soundness),
        ("checker/evaluator equivalence", common::checker_oracle),
    ];
    for (name, suite) in suites {
        suite(cases).map_err(|e| format!("{name}: {e}"))?;
    }
    Ok(format!("4 suites x {cases} cases"))
}

fn main() {
    let mut seen = Seen::default();
    let mut failed = 0;
    let mut report = |n: u32, name: &str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let r = f();
        let t = start.elapsed();
        match r {
            Ok(msg) => println!("PASS {n} {name}: {msg} [{t:.2?}]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {n} {name}: {msg} [{t:.2?}]");
            }
        }
    };
    report(1, "rescale", &mut || rescale(&mut seen));
    report(2, "average", &mut || average(&mut seen));
    report(3, "best-k", &mut || best(&mut seen));
    report(4, "exhaustiveness", &mut || exhaustiveness(&mut seen));
    report(5, "distinct inputs", &mut || distinct(&seen));
    report(6, "broken rbt/map", &mut broken_variants);
    report(7, "sparsity", &mut sparsity);
    report(8, "padAverage", &mut pad_average);
    report(9, "property suites", &mut properties);
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
