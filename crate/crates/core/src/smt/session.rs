//! The solver-facing constraint API: fresh variables, guarded constraints,
//! constructor application with measure unfolding, alternatives, models and
//! refutation.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Duration;

use num_bigint::BigInt;

use super::encode::{self, ctor_fun, guarded, int_lit, measure_fun, sort_name, tag_fun};
use super::sexp::{parse_all, Sexp};
use super::solver::{Solver, SolverCommand};
use super::SmtError;
use crate::spec::{BinOp, Expr, MeasureSort, RefType, Sort, SpecModule, Ty};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogicVar(u32);

impl LogicVar {
    const PREFIX: &'static str = "x!";

    pub fn id(self) -> u32 {
        self.0
    }

    /// The solver symbol, also usable as a variable inside [`Expr`]s.
    pub fn name(self) -> String {
        format!("{}{}", Self::PREFIX, self.0)
    }

    pub fn expr(self) -> Expr {
        Expr::Var(self.name())
    }

    fn parse(name: &str) -> Option<LogicVar> {
        name.strip_prefix(Self::PREFIX)?.parse().ok().map(LogicVar)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SmtSort {
    Int,
    Bool,
    Data(Ty),
}

impl SmtSort {
    pub fn of_ty(t: &Ty) -> SmtSort {
        match t {
            Ty::Int => SmtSort::Int,
            Ty::Bool => SmtSort::Bool,
            Ty::Data(..) => SmtSort::Data(t.clone()),
        }
    }

    pub fn ty(&self) -> Ty {
        match self {
            SmtSort::Int => Ty::Int,
            SmtSort::Bool => Ty::Bool,
            SmtSort::Data(t) => t.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    pub ty: Ty,
    pub ctor: String,
    pub fields: Vec<LogicVar>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelValue {
    Int(BigInt),
    Bool(bool),
}

impl ModelValue {
    fn smt(&self) -> String {
        match self {
            ModelValue::Int(n) => int_lit(n),
            ModelValue::Bool(b) => b.to_string(),
        }
    }
}

/// A satisfying assignment. Values are fetched from the solver on demand
/// and cached; a model is only valid until the next satisfiability check.
#[derive(Debug)]
pub struct Model {
    generation: u64,
    cache: HashMap<LogicVar, ModelValue>,
}

#[derive(Debug)]
pub enum SatResult {
    Sat(Model),
    Unsat,
    Unknown,
    Timeout,
}

type Env = [(String, String, Ty)];

pub struct Session {
    module: Arc<SpecModule>,
    solver: Solver,
    pending: String,
    vars: Vec<SmtSort>,
    guards: Vec<LogicVar>,
    registry: HashMap<LogicVar, Construction>,
    groups: HashMap<LogicVar, Vec<(LogicVar, LogicVar)>>,
    relevant: Vec<LogicVar>,
    declared: HashSet<Ty>,
    generation: u64,
    timeout: Option<Duration>,
    assertions: usize,
    checks: usize,
}

impl Session {
    pub fn new(module: Arc<SpecModule>, cmd: &SolverCommand) -> Result<Session, SmtError> {
        let mut solver = Solver::spawn(cmd)?;
        solver.send(
            "(set-option :print-success false)\n\
             (set-option :produce-models true)\n\
             (set-option :global-declarations true)\n\
             (set-logic QF_UFLIA)\n",
        )?;
        Ok(Session {
            module,
            solver,
            pending: String::new(),
            vars: Vec::new(),
            guards: Vec::new(),
            registry: HashMap::new(),
            groups: HashMap::new(),
            relevant: Vec::new(),
            declared: HashSet::new(),
            generation: 0,
            timeout: None,
            assertions: 0,
            checks: 0,
        })
    }

    pub fn module(&self) -> &Arc<SpecModule> {
        &self.module
    }

    /// Per-check timeout; `None` waits indefinitely.
    pub fn set_timeout(&mut self, t: Option<Duration>) {
        self.timeout = t;
    }

    pub fn sort_of(&self, x: LogicVar) -> &SmtSort {
        &self.vars[x.0 as usize]
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn assertion_count(&self) -> usize {
        self.assertions
    }

    pub fn check_count(&self) -> usize {
        self.checks
    }

    pub fn fresh(&mut self, sort: SmtSort) -> Result<LogicVar, SmtError> {
        if let SmtSort::Data(t) = &sort {
            self.declare_ty(t)?;
        }
        let x = LogicVar(self.vars.len() as u32);
        let sname = sort_name(&sort.ty());
        let _ = writeln!(self.pending, "(declare-const {} {sname})", x.name());
        self.vars.push(sort);
        Ok(x)
    }

    pub fn fresh_choice(&mut self) -> Result<LogicVar, SmtError> {
        self.fresh(SmtSort::Bool)
    }

    /// Runs `block` with every constraint it emits guarded by `b`.
    pub fn guard<R>(&mut self, b: LogicVar, block: impl FnOnce(&mut Self) -> R) -> R {
        self.guards.push(b);
        let r = block(self);
        self.guards.pop();
        r
    }

    pub fn guard_depth(&self) -> usize {
        self.guards.len()
    }

    fn assert_raw(&mut self, p: &str) {
        self.assertions += 1;
        let _ = writeln!(self.pending, "(assert {p})");
    }

    fn assert_guarded(&mut self, p: String) {
        let gs: Vec<String> = self.guards.iter().map(|g| g.name()).collect();
        let text = guarded(&gs, p);
        self.assert_raw(&text);
    }

    fn assert_side(&mut self, side: Vec<String>) {
        for s in side {
            self.assert_raw(&s);
        }
    }

    /// Asserts a closed predicate (over session variables) under the
    /// current guards.
    pub fn assert_expr(&mut self, p: &Expr) -> Result<(), SmtError> {
        if p.is_true() {
            return Ok(());
        }
        let mut side = Vec::new();
        let (s, _) = self.tr(p, &[], Some(&Ty::Bool), &mut side)?;
        self.assert_side(side);
        self.assert_guarded(s);
        Ok(())
    }

    /// Asserts the refinement of `t` with its binder standing for `x`.
    pub fn constrain(&mut self, x: LogicVar, t: &RefType) -> Result<(), SmtError> {
        if t.pred.is_true() {
            return Ok(());
        }
        let env = [(t.binder.clone(), x.name(), self.sort_of(x).ty())];
        let mut side = Vec::new();
        let (s, _) = self.tr(&t.pred, &env, Some(&Ty::Bool), &mut side)?;
        self.assert_side(side);
        self.assert_guarded(s);
        Ok(())
    }

    /// Builds `ctor(fields)` at data sort `ty`, instantiating every measure
    /// equation on the datatype for this constructor.
    pub fn apply(&mut self, ty: &Ty, ctor: &str, fields: &[LogicVar]) -> Result<LogicVar, SmtError> {
        let field_tys = self.field_tys(ty, ctor)?;
        if field_tys.len() != fields.len() {
            return Err(SmtError::Encoding(format!(
                "constructor `{ctor}` expects {} fields, got {}",
                field_tys.len(),
                fields.len()
            )));
        }
        for (f, t) in fields.iter().zip(&field_tys) {
            if self.sort_of(*f).ty() != *t {
                return Err(SmtError::Encoding(format!(
                    "field of `{ctor}` expects sort {t}, got {}",
                    self.sort_of(*f).ty()
                )));
            }
        }
        let v = self.fresh(SmtSort::Data(ty.clone()))?;
        let args: Vec<String> = fields.iter().map(|f| f.name()).collect();
        let term = apply_text(&ctor_fun(ty, ctor), &args);
        self.assert_guarded(format!("(= {} {term})", v.name()));
        let env: Vec<(String, Ty)> = args.into_iter().zip(field_tys).collect();
        for p in self.ctor_facts(ty, ctor, &v.name(), &env)? {
            self.assert_guarded(p);
        }
        self.registry.insert(
            v,
            Construction {
                ty: ty.clone(),
                ctor: ctor.to_string(),
                fields: fields.to_vec(),
            },
        );
        Ok(v)
    }

    pub fn has_alternatives(&self, x: LogicVar) -> bool {
        self.groups.contains_key(&x)
    }

    pub fn unapply(&self, x: LogicVar) -> Result<&Construction, SmtError> {
        self.registry
            .get(&x)
            .ok_or_else(|| SmtError::Encoding(format!("{} was not built by a constructor", x.name())))
    }

    /// `x` equals exactly one alternative, selected by its choice variable.
    pub fn one_of(&mut self, x: LogicVar, alts: &[(LogicVar, LogicVar)]) -> Result<(), SmtError> {
        if alts.is_empty() {
            return Err(SmtError::Encoding("one_of needs at least one alternative".into()));
        }
        for (c, a) in alts {
            self.assert_guarded(format!("(=> {} (= {} {}))", c.name(), x.name(), a.name()));
        }
        let cs: Vec<String> = alts.iter().map(|(c, _)| c.name()).collect();
        for p in encode::exactly_one(&cs) {
            self.assert_guarded(p);
        }
        self.groups.insert(x, alts.to_vec());
        Ok(())
    }

    pub fn push(&mut self) {
        self.pending.push_str("(push 1)\n");
    }

    pub fn pop(&mut self) {
        self.pending.push_str("(pop 1)\n");
    }

    pub fn check_sat(&mut self) -> Result<SatResult, SmtError> {
        let pending = std::mem::take(&mut self.pending);
        self.solver.send(&pending)?;
        self.relevant.clear();
        self.generation += 1;
        self.checks += 1;
        match self.solver.query("(check-sat)", self.timeout) {
            Err(SmtError::Timeout) => Ok(SatResult::Timeout),
            Err(e) => Err(e),
            Ok(r) => match r.as_str() {
                "sat" => Ok(SatResult::Sat(Model {
                    generation: self.generation,
                    cache: HashMap::new(),
                })),
                "unsat" => Ok(SatResult::Unsat),
                "unknown" => Ok(SatResult::Unknown),
                other => Err(SmtError::Protocol(format!("unexpected check-sat reply `{other}`"))),
            },
        }
    }

    fn fetch(&mut self, m: &mut Model, xs: &[LogicVar]) -> Result<(), SmtError> {
        if m.generation != self.generation {
            return Err(SmtError::Protocol("model is stale".into()));
        }
        let missing: Vec<LogicVar> = xs
            .iter()
            .copied()
            .filter(|x| !m.cache.contains_key(x))
            .collect();
        if missing.is_empty() {
            return Ok(());
        }
        let names: Vec<String> = missing.iter().map(|x| x.name()).collect();
        let reply = self
            .solver
            .query(&format!("(get-value ({}))", names.join(" ")), self.timeout)?;
        for (name, v) in parse_values(&reply)? {
            let x = LogicVar::parse(&name)
                .ok_or_else(|| SmtError::Protocol(format!("unexpected symbol `{name}` in model")))?;
            m.cache.insert(x, v);
        }
        for x in &missing {
            if !m.cache.contains_key(x) {
                return Err(SmtError::Protocol(format!("model lacks {}", x.name())));
            }
        }
        Ok(())
    }

    /// Reads `x` from the model without logging it.
    pub fn peek(&mut self, m: &mut Model, x: LogicVar) -> Result<ModelValue, SmtError> {
        self.fetch(m, &[x])?;
        Ok(m.cache[&x].clone())
    }

    /// Reads an integer leaf and logs it as relevant.
    pub fn int_value(&mut self, m: &mut Model, x: LogicVar) -> Result<BigInt, SmtError> {
        match self.peek(m, x)? {
            ModelValue::Int(n) => {
                self.relevant.push(x);
                Ok(n)
            }
            ModelValue::Bool(_) => Err(SmtError::Protocol(format!("{} is not an integer", x.name()))),
        }
    }

    /// Reads a boolean leaf and logs it as relevant.
    pub fn bool_value(&mut self, m: &mut Model, x: LogicVar) -> Result<bool, SmtError> {
        match self.peek(m, x)? {
            ModelValue::Bool(b) => {
                self.relevant.push(x);
                Ok(b)
            }
            ModelValue::Int(_) => Err(SmtError::Protocol(format!("{} is not a boolean", x.name()))),
        }
    }

    /// The alternative of `x` whose choice variable holds in `m`.
    pub fn which_of(&mut self, x: LogicVar, m: &mut Model) -> Result<LogicVar, SmtError> {
        let alts = self
            .groups
            .get(&x)
            .cloned()
            .ok_or_else(|| SmtError::Encoding(format!("{} has no alternatives", x.name())))?;
        let cs: Vec<LogicVar> = alts.iter().map(|(c, _)| *c).collect();
        self.fetch(m, &cs)?;
        let chosen: Vec<&(LogicVar, LogicVar)> = alts
            .iter()
            .filter(|(c, _)| m.cache[c] == ModelValue::Bool(true))
            .collect();
        match chosen.as_slice() {
            [(c, a)] => {
                self.relevant.push(*c);
                Ok(*a)
            }
            [] => Err(SmtError::Encoding(format!("no alternative of {} is selected", x.name()))),
            _ => Err(SmtError::Encoding(format!("several alternatives of {} are selected", x.name()))),
        }
    }

    /// Variables read during decoding since the last check.
    pub fn relevant(&self) -> &[LogicVar] {
        &self.relevant
    }

    /// Blocks every model that agrees with `m` on all relevant variables.
    pub fn refute(&mut self, m: &mut Model) -> Result<(), SmtError> {
        let mut seen = HashSet::new();
        let xs: Vec<LogicVar> = self
            .relevant
            .iter()
            .copied()
            .filter(|x| seen.insert(*x))
            .collect();
        if xs.is_empty() {
            return Err(SmtError::Encoding("nothing was decoded, cannot refute".into()));
        }
        self.fetch(m, &xs)?;
        let pairs: Vec<(String, String)> = xs.iter().map(|x| (x.name(), m.cache[x].smt())).collect();
        let clause = encode::refutation(&pairs);
        self.assert_raw(&clause);
        Ok(())
    }

    /// Asks the model for the value of measure `measure` on data variable `x`.
    pub fn measure_value(&mut self, m: &mut Model, measure: &str, x: LogicVar) -> Result<ModelValue, SmtError> {
        if m.generation != self.generation {
            return Err(SmtError::Protocol("model is stale".into()));
        }
        let ty = self.sort_of(x).ty();
        let term = format!("({} {})", measure_fun(measure, &ty), x.name());
        let reply = self.solver.query(&format!("(get-value ({term}))"), self.timeout)?;
        parse_values(&reply)?
            .pop()
            .map(|(_, v)| v)
            .ok_or_else(|| SmtError::Protocol("empty get-value reply".into()))
    }

    // ---- declarations -------------------------------------------------------

    /// Field sorts of `ctor` at the instantiated datatype `ty`.
    pub fn field_tys(&self, ty: &Ty, ctor: &str) -> Result<Vec<Ty>, SmtError> {
        let Ty::Data(name, args) = ty else {
            return Err(SmtError::Encoding(format!("{ty} is not a datatype")));
        };
        let decl = self
            .module
            .datatype(name)
            .ok_or_else(|| SmtError::Encoding(format!("unknown datatype `{name}`")))?;
        let c = decl
            .ctor(ctor)
            .ok_or_else(|| SmtError::Encoding(format!("`{ctor}` is not a constructor of `{name}`")))?;
        let params: HashMap<&str, &Ty> = decl.params.iter().map(String::as_str).zip(args).collect();
        c.fields
            .iter()
            .map(|(_, t)| ty_of_sort(&t.sort, &params))
            .collect()
    }

    fn declare_ty(&mut self, ty: &Ty) -> Result<(), SmtError> {
        let Ty::Data(name, _) = ty else { return Ok(()) };
        if self.declared.contains(ty) {
            return Ok(());
        }
        self.declared.insert(ty.clone());
        let sname = sort_name(ty);
        let _ = writeln!(self.pending, "(declare-sort {sname} 0)");
        let module = self.module.clone();
        let decl = module
            .datatype(name)
            .ok_or_else(|| SmtError::Encoding(format!("unknown datatype `{name}`")))?;
        let _ = writeln!(self.pending, "(declare-fun {} ({sname}) Int)", tag_fun(ty));
        for c in &decl.ctors {
            let ftys = self.field_tys(ty, &c.name)?;
            for f in &ftys {
                self.declare_ty(f)?;
            }
            let fsorts: Vec<String> = ftys.iter().map(sort_name).collect();
            let _ = writeln!(
                self.pending,
                "(declare-fun {} ({}) {sname})",
                ctor_fun(ty, &c.name),
                fsorts.join(" ")
            );
        }
        for m in module.measures_on(name) {
            let res = match m.result {
                MeasureSort::Int => "Int",
                MeasureSort::Bool => "Bool",
            };
            let _ = writeln!(self.pending, "(declare-fun {} ({sname}) {res})", measure_fun(&m.name, ty));
        }
        Ok(())
    }

    /// Tag and measure equations for the constructor term `term`, whose
    /// fields are the given SMT terms.
    fn ctor_facts(
        &mut self,
        ty: &Ty,
        ctor: &str,
        term: &str,
        fields: &[(String, Ty)],
    ) -> Result<Vec<String>, SmtError> {
        let Ty::Data(name, _) = ty else { unreachable!() };
        let module = self.module.clone();
        let decl = module.datatype(name).expect("declared");
        let idx = decl.ctor_index(ctor).expect("checked");
        let mut out = vec![format!("(= ({} {term}) {idx})", tag_fun(ty))];
        for m in module.measures_on(name) {
            let eq = m
                .equation(ctor)
                .ok_or_else(|| SmtError::Encoding(format!("measure `{}` lacks `{ctor}`", m.name)))?;
            let env: Vec<(String, String, Ty)> = eq
                .vars
                .iter()
                .zip(fields)
                .map(|(v, (s, t))| (v.clone(), s.clone(), t.clone()))
                .collect();
            let mut side = Vec::new();
            let (body, _) = self.tr(&eq.body, &env, Some(&m.result.ty()), &mut side)?;
            out.extend(side);
            out.push(format!("(= ({} {term}) {body})", measure_fun(&m.name, ty)));
        }
        Ok(out)
    }

    // ---- translation --------------------------------------------------------

    fn lookup(&self, env: &Env, x: &str) -> Result<(String, Ty), SmtError> {
        if let Some((_, s, t)) = env.iter().rev().find(|(n, _, _)| n == x) {
            return Ok((s.clone(), t.clone()));
        }
        match LogicVar::parse(x) {
            Some(v) if (v.0 as usize) < self.vars.len() => Ok((x.to_string(), self.sort_of(v).ty())),
            _ => Err(SmtError::Encoding(format!("free variable `{x}`"))),
        }
    }

    fn peek_ty(&self, e: &Expr, env: &Env) -> Option<Ty> {
        match e {
            Expr::Int(_) | Expr::Neg(_) => Some(Ty::Int),
            Expr::Bool(_) | Expr::Not(_) => Some(Ty::Bool),
            Expr::Var(x) => self.lookup(env, x).ok().map(|(_, t)| t),
            Expr::Bin(op, _, _) if op.is_arith() => Some(Ty::Int),
            Expr::Bin(..) => Some(Ty::Bool),
            Expr::Ite(_, t, f) => self.peek_ty(t, env).or_else(|| self.peek_ty(f, env)),
            Expr::Measure(m, _) => self.module.measure(m).map(|m| m.result.ty()),
            Expr::Ctor { data, .. } => {
                let decl = self.module.datatype(data)?;
                decl.params.is_empty().then(|| Ty::Data(data.clone(), vec![]))
            }
        }
    }

    fn tr(
        &mut self,
        e: &Expr,
        env: &Env,
        expected: Option<&Ty>,
        side: &mut Vec<String>,
    ) -> Result<(String, Ty), SmtError> {
        Ok(match e {
            Expr::Int(n) => (int_lit(n), Ty::Int),
            Expr::Bool(b) => (b.to_string(), Ty::Bool),
            Expr::Var(x) => self.lookup(env, x)?,
            Expr::Neg(a) => {
                let (a, _) = self.tr(a, env, Some(&Ty::Int), side)?;
                (format!("(- {a})"), Ty::Int)
            }
            Expr::Not(a) => {
                let (a, _) = self.tr(a, env, Some(&Ty::Bool), side)?;
                (format!("(not {a})"), Ty::Bool)
            }
            Expr::Ite(c, t, f) => {
                let (c, _) = self.tr(c, env, Some(&Ty::Bool), side)?;
                let want = expected
                    .cloned()
                    .or_else(|| self.peek_ty(t, env))
                    .or_else(|| self.peek_ty(f, env));
                let (t, ty) = self.tr(t, env, want.as_ref(), side)?;
                let (f, _) = self.tr(f, env, Some(&ty), side)?;
                (format!("(ite {c} {t} {f})"), ty)
            }
            Expr::Bin(op, l, r) => {
                let operand = if op.is_arith() || op.is_compare() && !matches!(op, BinOp::Eq | BinOp::Ne) {
                    Some(Ty::Int)
                } else if op.is_logic() {
                    Some(Ty::Bool)
                } else {
                    self.peek_ty(l, env).or_else(|| self.peek_ty(r, env))
                };
                let (ls, lt) = self.tr(l, env, operand.as_ref(), side)?;
                let (rs, _) = self.tr(r, env, Some(operand.as_ref().unwrap_or(&lt)), side)?;
                let text = match op {
                    BinOp::Ne => format!("(not (= {ls} {rs}))"),
                    BinOp::Iff => format!("(= {ls} {rs})"),
                    _ => format!("({} {ls} {rs})", smt_op(*op)),
                };
                (text, if op.is_arith() { Ty::Int } else { Ty::Bool })
            }
            Expr::Measure(m, a) => {
                let def = self
                    .module
                    .measure(m)
                    .ok_or_else(|| SmtError::Encoding(format!("unknown measure `{m}`")))?;
                let result = def.result.ty();
                let subject = def.subject.clone();
                let (a, ty) = self.tr(a, env, None, side)?;
                match &ty {
                    Ty::Data(n, _) if *n == subject => {}
                    _ => {
                        return Err(SmtError::Encoding(format!(
                            "measure `{m}` on `{subject}` applied to sort {ty}"
                        )))
                    }
                }
                self.declare_ty(&ty)?;
                (format!("({} {a})", measure_fun(m, &ty)), result)
            }
            Expr::Ctor { data, ctor, args } => self.tr_ctor(data, ctor, args, env, expected, side)?,
        })
    }

    fn tr_ctor(
        &mut self,
        data: &str,
        ctor: &str,
        args: &[Expr],
        env: &Env,
        expected: Option<&Ty>,
        side: &mut Vec<String>,
    ) -> Result<(String, Ty), SmtError> {
        let module = self.module.clone();
        let decl = module
            .datatype(data)
            .ok_or_else(|| SmtError::Encoding(format!("unknown datatype `{data}`")))?;
        let c = decl
            .ctor(ctor)
            .ok_or_else(|| SmtError::Encoding(format!("`{ctor}` is not a constructor of `{data}`")))?;
        let known = match expected {
            Some(t @ Ty::Data(n, _)) if n == data => Some(t.clone()),
            _ if decl.params.is_empty() => Some(Ty::Data(data.to_string(), vec![])),
            _ => None,
        };
        let (ty, parts) = match known {
            Some(ty) => {
                let ftys = self.field_tys(&ty, ctor)?;
                let mut parts = Vec::new();
                for (a, ft) in args.iter().zip(&ftys) {
                    parts.push(self.tr(a, env, Some(ft), side)?);
                }
                (ty, parts)
            }
            None => {
                let mut parts = Vec::new();
                for a in args {
                    parts.push(self.tr(a, env, None, side)?);
                }
                let mut bound: HashMap<String, Ty> = HashMap::new();
                for ((_, ft), (_, at)) in c.fields.iter().zip(&parts) {
                    bind_params(&ft.sort, at, &mut bound);
                }
                let targs = decl
                    .params
                    .iter()
                    .map(|p| bound.get(p).cloned())
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| {
                        SmtError::Encoding(format!("cannot infer the type arguments of `{ctor}`"))
                    })?;
                (Ty::Data(data.to_string(), targs), parts)
            }
        };
        if parts.len() != c.fields.len() {
            return Err(SmtError::Encoding(format!("arity mismatch for `{ctor}`")));
        }
        self.declare_ty(&ty)?;
        let strs: Vec<String> = parts.iter().map(|(s, _)| s.clone()).collect();
        let term = apply_text(&ctor_fun(&ty, ctor), &strs);
        let facts = self.ctor_facts(&ty, ctor, &term, &parts)?;
        side.extend(facts);
        Ok((term, ty))
    }
}

fn apply_text(f: &str, args: &[String]) -> String {
    if args.is_empty() {
        f.to_string()
    } else {
        format!("({f} {})", args.join(" "))
    }
}

fn smt_op(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => "+",
        BinOp::Sub => "-",
        BinOp::Mul => "*",
        BinOp::Lt => "<",
        BinOp::Le => "<=",
        BinOp::Gt => ">",
        BinOp::Ge => ">=",
        BinOp::Eq | BinOp::Iff => "=",
        BinOp::Ne => "distinct",
        BinOp::And => "and",
        BinOp::Or => "or",
        BinOp::Implies => "=>",
        BinOp::Xor => "xor",
    }
}

/// Erases `s` to a concrete sort given bindings for its parameters.
pub fn ty_of_sort(s: &Sort, params: &HashMap<&str, &Ty>) -> Result<Ty, SmtError> {
    match s {
        Sort::Int => Ok(Ty::Int),
        Sort::Bool => Ok(Ty::Bool),
        Sort::Param(p) => params
            .get(p.as_str())
            .map(|t| (*t).clone())
            .ok_or_else(|| SmtError::Encoding(format!("unbound type parameter `{p}`"))),
        Sort::Data { name, args } => Ok(Ty::Data(
            name.clone(),
            args.iter()
                .map(|a| ty_of_sort(&a.sort, params))
                .collect::<Result<_, _>>()?,
        )),
        Sort::Fun { .. } => Err(SmtError::Encoding("function sort in a first-order position".into())),
    }
}

fn bind_params(s: &Sort, t: &Ty, out: &mut HashMap<String, Ty>) {
    match (s, t) {
        (Sort::Param(p), _) => {
            out.entry(p.clone()).or_insert_with(|| t.clone());
        }
        (Sort::Data { name, args }, Ty::Data(n, targs)) if name == n => {
            for (a, ta) in args.iter().zip(targs) {
                bind_params(&a.sort, ta, out);
            }
        }
        _ => {}
    }
}

fn parse_values(reply: &str) -> Result<Vec<(String, ModelValue)>, SmtError> {
    let bad = || SmtError::Protocol(format!("malformed get-value reply `{reply}`"));
    let sexps = parse_all(reply).map_err(|_| bad())?;
    let top = sexps.first().and_then(Sexp::list).ok_or_else(bad)?;
    top.iter()
        .map(|pair| {
            let items = pair.list().filter(|l| l.len() == 2).ok_or_else(bad)?;
            let name = items[0].to_string();
            let v = match &items[1] {
                Sexp::Atom(a) if a == "true" => ModelValue::Bool(true),
                Sexp::Atom(a) if a == "false" => ModelValue::Bool(false),
                Sexp::Atom(a) => ModelValue::Int(a.parse().map_err(|_| bad())?),
                Sexp::List(l) => match l.as_slice() {
                    [Sexp::Atom(m), Sexp::Atom(n)] if m == "-" => {
                        ModelValue::Int(-n.parse::<BigInt>().map_err(|_| bad())?)
                    }
                    _ => return Err(bad()),
                },
            };
            Ok((name, v))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_replies() {
        let vs = parse_values("((x!1 5) (x!2 (- 7)) (x!3 false))").unwrap();
        assert_eq!(vs[0], ("x!1".into(), ModelValue::Int(5.into())));
        assert_eq!(vs[1], ("x!2".into(), ModelValue::Int((-7).into())));
        assert_eq!(vs[2], ("x!3".into(), ModelValue::Bool(false)));
        assert!(parse_values("(x!1 5)").is_err());
    }

    #[test]
    fn logic_var_names_round_trip() {
        let x = LogicVar(42);
        assert_eq!(LogicVar::parse(&x.name()), Some(x));
        assert_eq!(LogicVar::parse("h"), None);
    }
}
