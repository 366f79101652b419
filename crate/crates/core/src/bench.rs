//! Baseline generate-and-filter enumeration and the benchmark harness that
//! compares it with solver-driven enumeration.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::ControlFlow;
use std::path::Path;
use std::rc::Rc;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::builtins;
use crate::corpus;
use crate::decode::decode;
use crate::driver::{self, Config, DriverError, TestResult};
use crate::error::EngineError;
use crate::logic::{eval_pred, to_reft, Value};
use crate::query::{ctors, query};
use crate::smt::{ty_of_sort, SatResult, Session, SolverCommand};
use crate::spec::ops::{subst_reftype, subst_var, unfold};
use crate::spec::{Expr, RefType, Sort, SpecModule, Ty};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EnumStats {
    /// Values generated before filtering (baseline only).
    pub candidates: u64,
    pub valid: u64,
    pub timed_out: bool,
    pub elapsed: Duration,
}

struct CtorPlan {
    data: Arc<str>,
    ctor: Arc<str>,
    /// Field type and whether it recurses into the owner.
    fields: Vec<(Ty, bool)>,
    recursive: bool,
}

/// Enumerates every value of an erased type under the depth rule, ignoring
/// refinements. Integers range over `[-n, n]`.
pub struct Generator {
    plans: HashMap<Ty, Vec<CtorPlan>>,
    ints: Vec<Value>,
}

impl Generator {
    pub fn new(module: &SpecModule, tys: &[Ty], n: &BigInt) -> Result<Generator, EngineError> {
        let mut g = Generator {
            plans: HashMap::new(),
            ints: num_iter(n).map(Value::Int).collect(),
        };
        for ty in tys {
            g.prepare(module, ty)?;
        }
        Ok(g)
    }

    fn prepare(&mut self, module: &SpecModule, ty: &Ty) -> Result<(), EngineError> {
        let Ty::Data(name, args) = ty else { return Ok(()) };
        if self.plans.contains_key(ty) {
            return Ok(());
        }
        let decl = module
            .datatype(name)
            .ok_or_else(|| EngineError::Sort(format!("unknown datatype `{name}`")))?;
        let params: HashMap<&str, &Ty> = decl.params.iter().map(String::as_str).zip(args).collect();
        let mut plans = Vec::new();
        for c in &decl.ctors {
            let mut fields = Vec::new();
            for (_, ft) in &c.fields {
                let fty = ty_of_sort(&ft.sort, &params)?;
                fields.push((fty, module.is_recursive_field(name, &ft.sort)));
            }
            plans.push(CtorPlan {
                data: name.as_str().into(),
                ctor: c.name.as_str().into(),
                recursive: fields.iter().any(|(_, r)| *r),
                fields,
            });
        }
        // recursive constructors first, as in the solver encoding
        plans.sort_by_key(|p| !p.recursive);
        self.plans.insert(ty.clone(), plans);
        let children: Vec<Ty> = self.plans[ty]
            .iter()
            .flat_map(|p| p.fields.iter().map(|(t, _)| t.clone()))
            .collect();
        for c in children {
            self.prepare(module, &c)?;
        }
        Ok(())
    }

    fn ctors(&self, ty: &Ty, depth: u32) -> impl Iterator<Item = &CtorPlan> {
        self.plans[ty].iter().filter(move |p| depth > 0 || !p.recursive)
    }

    /// Number of values [`Generator::each`] produces.
    pub fn count(&self, ty: &Ty, depth: u32) -> BigUint {
        match ty {
            Ty::Int => BigUint::from(self.ints.len()),
            Ty::Bool => BigUint::from(2u32),
            Ty::Data(..) => self
                .ctors(ty, depth)
                .map(|p| {
                    p.fields
                        .iter()
                        .map(|(t, rec)| self.count(t, if *rec { depth - 1 } else { depth }))
                        .product::<BigUint>()
                })
                .sum(),
        }
    }

    pub fn each(&self, ty: &Ty, depth: u32, f: &mut dyn FnMut(Value) -> ControlFlow<()>) -> ControlFlow<()> {
        match ty {
            Ty::Int => {
                for v in &self.ints {
                    f(v.clone())?;
                }
                ControlFlow::Continue(())
            }
            Ty::Bool => {
                f(Value::Bool(false))?;
                f(Value::Bool(true))
            }
            Ty::Data(..) => {
                for p in self.ctors(ty, depth) {
                    let mut acc = Vec::with_capacity(p.fields.len());
                    self.each_field(p, 0, depth, &mut acc, f)?;
                }
                ControlFlow::Continue(())
            }
        }
    }

    fn each_field(
        &self,
        p: &CtorPlan,
        i: usize,
        depth: u32,
        acc: &mut Vec<Value>,
        f: &mut dyn FnMut(Value) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let Some((t, rec)) = p.fields.get(i) else {
            return f(Value::Data {
                data: p.data.clone(),
                ctor: p.ctor.clone(),
                fields: acc.clone(),
            });
        };
        self.each(t, if *rec { depth - 1 } else { depth }, &mut |v| {
            acc.push(v);
            let r = self.each_field(p, i + 1, depth, acc, f);
            acc.pop();
            r
        })
    }

    /// Every tuple of `tys`, innermost last.
    pub fn each_tuple(&self, tys: &[Ty], depth: u32, f: &mut dyn FnMut(&[Value]) -> ControlFlow<()>) -> ControlFlow<()> {
        let mut acc = Vec::with_capacity(tys.len());
        self.each_tuple_from(tys, depth, &mut acc, f)
    }

    fn each_tuple_from(
        &self,
        tys: &[Ty],
        depth: u32,
        acc: &mut Vec<Value>,
        f: &mut dyn FnMut(&[Value]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let Some((t, rest)) = tys.split_first() else {
            return f(acc);
        };
        self.each(t, depth, &mut |v| {
            acc.push(v);
            let r = self.each_tuple_from(rest, depth, acc, f);
            acc.pop();
            r
        })
    }
}

fn num_iter(n: &BigInt) -> impl Iterator<Item = BigInt> {
    let mut i = -n.clone();
    let hi = n.clone();
    std::iter::from_fn(move || {
        (i <= hi).then(|| {
            let v = i.clone();
            i += 1;
            v
        })
    })
}

fn param_tys(params: &[(String, RefType)]) -> Result<Vec<Ty>, EngineError> {
    params
        .iter()
        .map(|(b, t)| {
            t.sort
                .erase()
                .ok_or_else(|| EngineError::Unsupported(format!("cannot enumerate `{b}` of sort {}", t.sort)))
        })
        .collect()
}

/// Number of candidate tuples the baseline generates for `params`.
pub fn candidate_count(
    module: &SpecModule,
    params: &[(String, RefType)],
    depth: u32,
    n: &BigInt,
) -> Result<BigUint, EngineError> {
    let tys = param_tys(params)?;
    let g = Generator::new(module, &tys, n)?;
    Ok(tys.iter().map(|t| g.count(t, depth)).product::<BigUint>())
}

/// The ground predicates `v` must satisfy to inhabit `t`: the refinement of
/// every subterm with its binder and the earlier fields replaced by terms.
pub fn flatten(module: &SpecModule, v: &Value, t: &RefType) -> Result<Vec<Expr>, EngineError> {
    let mut out = Vec::new();
    flatten_into(module, v, t, &mut out)?;
    Ok(out)
}

fn flatten_into(module: &SpecModule, v: &Value, t: &RefType, out: &mut Vec<Expr>) -> Result<(), EngineError> {
    if let (Sort::Data { name, .. }, Value::Data { ctor, fields, .. }) = (&t.sort, v) {
        let c = module
            .ctor(name, ctor)
            .ok_or_else(|| EngineError::Sort(format!("`{ctor}` is not a constructor of `{name}`")))?;
        let mut su: Vec<(String, Expr)> = Vec::new();
        for (fv, (fname, ft)) in fields.iter().zip(unfold(module, c, t)?) {
            let map: HashMap<&str, &Expr> = su.iter().map(|(k, e)| (k.as_str(), e)).collect();
            flatten_into(module, fv, &subst_reftype(&ft, &map), out)?;
            su.push((fname, to_reft(fv)?));
        }
    }
    out.push(subst_var(&t.pred, &t.binder, &to_reft(v)?));
    Ok(())
}

/// Whether `v` inhabits `t`, by evaluating every flattened predicate.
pub fn satisfies(module: &SpecModule, v: &Value, t: &RefType) -> Result<bool, EngineError> {
    for p in flatten(module, v, t)? {
        if !eval_pred(module, &p)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether `args` inhabit the dependent parameter list.
pub fn satisfies_args(module: &SpecModule, params: &[(String, RefType)], args: &[Value]) -> Result<bool, EngineError> {
    let mut su: Vec<(String, Expr)> = Vec::new();
    for (v, (b, t)) in args.iter().zip(params) {
        let map: HashMap<&str, &Expr> = su.iter().map(|(k, e)| (k.as_str(), e)).collect();
        if !satisfies(module, v, &subst_reftype(t, &map))? {
            return Ok(false);
        }
        su.push((b.clone(), to_reft(v)?));
    }
    Ok(true)
}

/// Generates every candidate tuple of the erased parameter sorts and keeps
/// those that inhabit the refined parameter types.
pub fn enumerate_filter(
    module: &SpecModule,
    params: &[(String, RefType)],
    depth: u32,
    n: &BigInt,
    deadline: Option<Instant>,
    visit: &mut dyn FnMut(&[Value]),
) -> Result<EnumStats, EngineError> {
    let start = Instant::now();
    let tys = param_tys(params)?;
    let g = Generator::new(module, &tys, n)?;
    let mut stats = EnumStats::default();
    let mut err = None;
    let flow = g.each_tuple(&tys, depth, &mut |args| {
        stats.candidates += 1;
        if stats.candidates.is_multiple_of(1024) && deadline.is_some_and(|d| Instant::now() >= d) {
            stats.timed_out = true;
            return ControlFlow::Break(());
        }
        match satisfies_args(module, params, args) {
            Ok(true) => {
                stats.valid += 1;
                visit(args);
                ControlFlow::Continue(())
            }
            Ok(false) => ControlFlow::Continue(()),
            Err(e) => {
                err = Some(e);
                ControlFlow::Break(())
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    debug_assert!(flow.is_continue() || stats.timed_out);
    stats.elapsed = start.elapsed();
    Ok(stats)
}

/// Same output as [`enumerate_filter`], but each field is filtered as soon
/// as it is generated, so invalid prefixes are never completed.
pub fn enumerate_pruned(
    module: &SpecModule,
    params: &[(String, RefType)],
    depth: u32,
    n: &BigInt,
    deadline: Option<Instant>,
    visit: &mut dyn FnMut(&[Value]),
) -> Result<EnumStats, EngineError> {
    let start = Instant::now();
    let p = Pruned {
        module,
        ints: num_iter(n).map(Value::Int).collect(),
        deadline,
        steps: Cell::new(0),
        memo: RefCell::new(HashMap::new()),
    };
    let mut stats = EnumStats::default();
    let mut acc = Vec::new();
    let mut su = Vec::new();
    let r = p.tuples(params, depth, &mut su, &mut acc, &mut |args| {
        stats.valid += 1;
        visit(args);
    });
    stats.candidates = p.steps.get();
    match r {
        Err(Stop::Deadline) => stats.timed_out = true,
        Err(Stop::Error(e)) => return Err(e),
        Ok(()) => {}
    }
    stats.elapsed = start.elapsed();
    Ok(stats)
}

type Shared = Rc<Vec<Value>>;

enum Stop {
    Deadline,
    Error(EngineError),
}

impl<E: Into<EngineError>> From<E> for Stop {
    fn from(e: E) -> Self {
        Stop::Error(e.into())
    }
}

struct Pruned<'m> {
    module: &'m SpecModule,
    ints: Vec<Value>,
    deadline: Option<Instant>,
    /// Values examined, valid or not.
    steps: Cell<u64>,
    /// Valid values per field type and depth.
    memo: RefCell<HashMap<(RefType, u32), Shared>>,
}

impl Pruned<'_> {
    fn tuples(
        &self,
        params: &[(String, RefType)],
        depth: u32,
        su: &mut Vec<(String, Expr)>,
        acc: &mut Vec<Value>,
        f: &mut dyn FnMut(&[Value]),
    ) -> Result<(), Stop> {
        let Some(((b, t), rest)) = params.split_first() else {
            f(acc);
            return Ok(());
        };
        let map: HashMap<&str, &Expr> = su.iter().map(|(k, e)| (k.as_str(), e)).collect();
        let t = subst_reftype(t, &map);
        self.values(&t, depth, &mut |v| {
            su.push((b.clone(), to_reft(&v)?));
            acc.push(v);
            let r = self.tuples(rest, depth, su, acc, f);
            acc.pop();
            su.pop();
            r
        })
    }

    fn keep(&self, t: &RefType, v: Value, f: &mut dyn FnMut(Value) -> Result<(), Stop>) -> Result<(), Stop> {
        let steps = self.steps.get() + 1;
        self.steps.set(steps);
        if steps.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(Stop::Deadline);
        }
        if eval_pred(self.module, &subst_var(&t.pred, &t.binder, &to_reft(&v)?))? {
            f(v)?;
        }
        Ok(())
    }

    fn valid(&self, t: &RefType, depth: u32) -> Result<Shared, Stop> {
        let key = (t.clone(), depth);
        if let Some(vs) = self.memo.borrow().get(&key) {
            return Ok(vs.clone());
        }
        let mut vs = Vec::new();
        self.values(t, depth, &mut |v| {
            vs.push(v);
            Ok(())
        })?;
        let vs = Rc::new(vs);
        self.memo.borrow_mut().insert(key, vs.clone());
        Ok(vs)
    }

    fn values(&self, t: &RefType, depth: u32, f: &mut dyn FnMut(Value) -> Result<(), Stop>) -> Result<(), Stop> {
        match &t.sort {
            Sort::Int => self.ints.iter().try_for_each(|v| self.keep(t, v.clone(), f)),
            Sort::Bool => [false, true].into_iter().try_for_each(|b| self.keep(t, Value::Bool(b), f)),
            Sort::Data { name, .. } => {
                let decl = self
                    .module
                    .datatype(name)
                    .ok_or_else(|| EngineError::Sort(format!("unknown datatype `{name}`")))?;
                for c in ctors(self.module, decl, depth) {
                    let fields = unfold(self.module, c, t)?;
                    let mut acc = Vec::with_capacity(fields.len());
                    self.fields(t, name, &c.name, &fields, depth, &mut Vec::new(), &mut acc, f)?;
                }
                Ok(())
            }
            other => Err(EngineError::Unsupported(format!("cannot enumerate values of sort {other}")).into()),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn fields(
        &self,
        t: &RefType,
        data: &str,
        ctor: &str,
        fields: &[(String, RefType)],
        depth: u32,
        su: &mut Vec<(String, Expr)>,
        acc: &mut Vec<Value>,
        f: &mut dyn FnMut(Value) -> Result<(), Stop>,
    ) -> Result<(), Stop> {
        let Some((name, ft)) = fields.get(acc.len()) else {
            return self.keep(t, Value::data(data, ctor, acc.clone()), f);
        };
        let map: HashMap<&str, &Expr> = su.iter().map(|(k, e)| (k.as_str(), e)).collect();
        let ft = subst_reftype(ft, &map);
        let d = if self.module.is_recursive_field(data, &ft.sort) {
            depth - 1
        } else {
            depth
        };
        for v in self.valid(&ft, d)?.iter() {
            su.push((name.clone(), to_reft(v)?));
            acc.push(v.clone());
            let r = self.fields(t, data, ctor, fields, depth, su, acc, f);
            acc.pop();
            su.pop();
            r?;
        }
        Ok(())
    }
}

/// Enumerates the inhabitants of the parameter list with the solver, one
/// model per value, refuting each before asking for the next.
pub fn enumerate_symbolic(
    module: &Arc<SpecModule>,
    params: &[(String, RefType)],
    depth: u32,
    n: &BigInt,
    solver: &SolverCommand,
    deadline: Option<Instant>,
    visit: &mut dyn FnMut(&[Value]),
) -> Result<EnumStats, DriverError> {
    let start = Instant::now();
    let mut session = Session::new(module.clone(), solver)?;
    let mut su: Vec<(String, Expr)> = Vec::new();
    let mut xs = Vec::new();
    for (b, t) in params {
        let map: HashMap<&str, &Expr> = su.iter().map(|(k, e)| (k.as_str(), e)).collect();
        let x = query(&mut session, &subst_reftype(t, &map), depth, Some(n))?;
        su.push((b.clone(), x.expr()));
        xs.push(x);
    }
    let mut stats = EnumStats::default();
    loop {
        if let Some(d) = deadline {
            let Some(left) = d.checked_duration_since(Instant::now()) else {
                stats.timed_out = true;
                break;
            };
            session.set_timeout(Some(left));
        }
        let mut model = match session.check_sat()? {
            SatResult::Sat(m) => m,
            SatResult::Unsat => break,
            SatResult::Timeout => {
                stats.timed_out = true;
                break;
            }
            SatResult::Unknown => return Err(DriverError::SolverUnknown),
        };
        let args = xs
            .iter()
            .map(|x| decode(&mut session, *x, &mut model))
            .collect::<Result<Vec<_>, _>>()?;
        stats.valid += 1;
        visit(&args);
        if session.relevant().is_empty() {
            break;
        }
        session.refute(&mut model)?;
    }
    stats.elapsed = start.elapsed();
    Ok(stats)
}

// ---- benchmark harness --------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Symbolic,
    Baseline,
}

impl Strategy {
    pub fn name(self) -> &'static str {
        match self {
            Strategy::Symbolic => "symbolic",
            Strategy::Baseline => "baseline",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Benchmark {
    pub name: &'static str,
    pub corpus: &'static str,
    /// Spec function, also the name of the built-in implementation.
    pub fun: &'static str,
}

pub const SUITE: &[Benchmark] = &[
    Benchmark {
        name: "List.insert",
        corpus: "ordlist",
        fun: "insert",
    },
    Benchmark {
        name: "OrdList.enum",
        corpus: "ordlist",
        fun: "enumerate",
    },
    Benchmark {
        name: "RBTree.add",
        corpus: "rbt",
        fun: "add",
    },
    Benchmark {
        name: "Map.delete",
        corpus: "map",
        fun: "delete",
    },
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub benchmark: String,
    pub depth: u32,
    pub strategy: &'static str,
    pub seconds: f64,
    /// Tests executed, i.e. valid inputs reached.
    pub count: u64,
    pub timeout: bool,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub min_depth: u32,
    pub max_depth: u32,
    /// Limit for a single (benchmark, depth, strategy) run.
    pub timeout: Duration,
    pub solver: SolverCommand,
    pub strategies: Vec<Strategy>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            min_depth: 0,
            max_depth: 4,
            timeout: Duration::from_secs(60),
            solver: SolverCommand::from_env(),
            strategies: vec![Strategy::Symbolic, Strategy::Baseline],
        }
    }
}

/// Runs one benchmark at every depth; a strategy that times out is not
/// retried at larger depths.
pub fn run_benchmark(b: &Benchmark, cfg: &BenchConfig) -> Result<Vec<Row>, DriverError> {
    let module = Arc::new(
        corpus::module(b.corpus)
            .ok_or_else(|| DriverError::Unsupported(format!("unknown corpus `{}`", b.corpus)))?
            .map_err(|e| DriverError::Unsupported(e.to_string()))?,
    );
    let spec = module
        .fun(b.fun)
        .ok_or_else(|| DriverError::Unsupported(format!("no function `{}`", b.fun)))?
        .clone();
    let mut rows = Vec::new();
    for &strategy in &cfg.strategies {
        for depth in cfg.min_depth..=cfg.max_depth {
            let row = match strategy {
                Strategy::Symbolic => symbolic_row(b, &module, &spec, depth, cfg)?,
                Strategy::Baseline => baseline_row(b, &module, &spec, depth, cfg)?,
            };
            let stop = row.timeout;
            rows.push(row);
            if stop {
                break;
            }
        }
    }
    Ok(rows)
}

fn symbolic_row(
    b: &Benchmark,
    module: &Arc<SpecModule>,
    spec: &crate::spec::FunSpec,
    depth: u32,
    cfg: &BenchConfig,
) -> Result<Row, DriverError> {
    let mut f = builtins::fut(b.fun).ok_or_else(|| DriverError::Unsupported(format!("no built-in `{}`", b.fun)))?;
    let mut c = Config::new(depth);
    c.solver = cfg.solver.clone();
    c.time_budget = Some(cfg.timeout);
    let start = Instant::now();
    let r = driver::target(&mut f, module, spec, &c)?;
    let timeout = matches!(r, TestResult::OutOfTime { .. } | TestResult::SolverTimeout { .. });
    Ok(Row {
        benchmark: b.name.into(),
        depth,
        strategy: Strategy::Symbolic.name(),
        seconds: start.elapsed().as_secs_f64(),
        count: r.tests(),
        timeout,
    })
}

fn baseline_row(
    b: &Benchmark,
    module: &Arc<SpecModule>,
    spec: &crate::spec::FunSpec,
    depth: u32,
    cfg: &BenchConfig,
) -> Result<Row, DriverError> {
    let f = builtins::lookup(b.fun).ok_or_else(|| DriverError::Unsupported(format!("no built-in `{}`", b.fun)))?;
    let start = Instant::now();
    let mut err = None;
    let stats = enumerate_filter(
        module,
        &spec.params,
        depth,
        &BigInt::from(depth),
        Some(start + cfg.timeout),
        &mut |args| {
            if err.is_some() {
                return;
            }
            // run and check the output exactly like the driver does
            if let Ok(out) = f(args) {
                let su: Vec<(String, Expr)> = spec
                    .params
                    .iter()
                    .zip(args)
                    .filter_map(|((b, _), v)| to_reft(v).ok().map(|e| (b.clone(), e)))
                    .collect();
                let map: HashMap<&str, &Expr> = su.iter().map(|(k, e)| (k.as_str(), e)).collect();
                if let Err(e) = crate::check::check(module, &out, &subst_reftype(&spec.result, &map)) {
                    err = Some(e);
                }
            }
        },
    )?;
    if let Some(e) = err {
        return Err(e.into());
    }
    Ok(Row {
        benchmark: b.name.into(),
        depth,
        strategy: Strategy::Baseline.name(),
        seconds: start.elapsed().as_secs_f64(),
        count: stats.valid,
        timeout: stats.timed_out,
    })
}

/// Runs `benchmarks`, one thread per benchmark when `parallel` is set.
pub fn run_suite(benchmarks: &[Benchmark], cfg: &BenchConfig, parallel: bool) -> Result<Vec<Row>, DriverError> {
    let results: Vec<Result<Vec<Row>, DriverError>> = if parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = benchmarks.iter().map(|b| s.spawn(move || run_benchmark(b, cfg))).collect();
            handles.into_iter().map(|h| h.join().expect("benchmark thread panicked")).collect()
        })
    } else {
        benchmarks.iter().map(|b| run_benchmark(b, cfg)).collect()
    };
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn write_csv(rows: &[Row], out: impl std::io::Write) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Human-readable table with one line per depth.
pub fn table(rows: &[Row]) -> String {
    let mut out = format!("{:<14} {:>5} {:>10} {:>10} {:>8}\n", "benchmark", "depth", "strategy", "seconds", "count");
    for r in rows {
        let secs = if r.timeout {
            format!(">{:.3}", r.seconds)
        } else {
            format!("{:.3}", r.seconds)
        };
        let _ = writeln!(out, "{:<14} {:>5} {:>10} {:>10} {:>8}", r.benchmark, r.depth, r.strategy, secs, r.count);
    }
    out
}

fn file_stem(name: &str) -> String {
    name.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect()
}

/// Writes one `<benchmark>.dat` per benchmark (columns: depth, then seconds
/// per strategy, `?` when missing) and a `plot.gp` script plotting them on
/// a log scale.
pub fn write_plot_data(rows: &[Row], dir: &Path) -> std::io::Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut names: Vec<&str> = Vec::new();
    for r in rows {
        if !names.contains(&r.benchmark.as_str()) {
            names.push(&r.benchmark);
        }
    }
    let strategies = [Strategy::Symbolic.name(), Strategy::Baseline.name()];
    let mut written = Vec::new();
    let mut script = String::from("set logscale y\nset xlabel \"depth\"\nset ylabel \"seconds\"\nset key top left\n");
    for name in &names {
        let mine: Vec<&Row> = rows.iter().filter(|r| r.benchmark == *name).collect();
        let mut depths: Vec<u32> = mine.iter().map(|r| r.depth).collect();
        depths.sort_unstable();
        depths.dedup();
        let mut dat = format!("# depth {}\n", strategies.join(" "));
        for d in depths {
            let _ = write!(dat, "{d}");
            for s in strategies {
                match mine.iter().find(|r| r.depth == d && r.strategy == s && !r.timeout) {
                    Some(r) => {
                        let _ = write!(dat, " {:.6}", r.seconds);
                    }
                    None => dat.push_str(" ?"),
                }
            }
            dat.push('\n');
        }
        let file = dir.join(format!("{}.dat", file_stem(name)));
        std::fs::write(&file, dat)?;
        written.push(file.clone());
        let _ = writeln!(
            script,
            "set title \"{name}\"\nset terminal push\nset terminal pngcairo\nset output \"{stem}.png\"\n\
             plot \"{stem}.dat\" using 1:2 with linespoints title \"symbolic\", \"{stem}.dat\" using 1:3 with linespoints title \"baseline\"\n\
             set output\nset terminal pop",
            stem = file_stem(name)
        );
    }
    let gp = dir.join("plot.gp");
    std::fs::write(&gp, script)?;
    written.push(gp);
    Ok(written)
}

/// `a / b`, for reporting ratios of big counts.
pub fn ratio(a: &BigUint, b: &BigUint) -> f64 {
    if b.is_zero() {
        return f64::INFINITY;
    }
    let scale = BigUint::one() << 32u32;
    ((a * &scale) / b).to_f64().unwrap_or(f64::INFINITY) / scale.to_f64().unwrap_or(1.0)
}
