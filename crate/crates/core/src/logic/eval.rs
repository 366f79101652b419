//! Ground evaluation of refinements and measures.

use num_bigint::BigInt;
use thiserror::Error;

use super::value::Value;
use crate::spec::{BinOp, Expr, MeasureDef, SpecModule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("ill-sorted expression: {0}")]
    IllSorted(String),
    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),
    #[error("measure `{measure}` has no equation for `{ctor}`")]
    NoEquation { measure: String, ctor: String },
    #[error("function value cannot be encoded as a term")]
    FunValue,
}

type Env<'a> = [(&'a str, &'a Value)];

/// Evaluates a closed predicate.
pub fn eval_pred(module: &SpecModule, p: &Expr) -> Result<bool, EvalError> {
    match eval_expr(module, p)? {
        Value::Bool(b) => Ok(b),
        v => Err(EvalError::IllSorted(format!("predicate evaluated to {v}"))),
    }
}

/// Evaluates a closed expression.
pub fn eval_expr(module: &SpecModule, e: &Expr) -> Result<Value, EvalError> {
    Evaluator { module }.eval(&[], e)
}

/// Evaluates `e` with free variables bound by `env`.
pub fn eval_in(module: &SpecModule, env: &[(&str, &Value)], e: &Expr) -> Result<Value, EvalError> {
    Evaluator { module }.eval(env, e)
}

pub fn eval_measure(module: &SpecModule, m: &MeasureDef, v: &Value) -> Result<Value, EvalError> {
    Evaluator { module }.measure(m, v)
}

/// Encodes a first-order value as a logical term.
pub fn to_reft(v: &Value) -> Result<Expr, EvalError> {
    match v {
        Value::Int(n) => Ok(Expr::Int(n.clone())),
        Value::Bool(b) => Ok(Expr::Bool(*b)),
        Value::Data { data, ctor, fields } => Ok(Expr::Ctor {
            data: data.to_string(),
            ctor: ctor.to_string(),
            args: fields.iter().map(to_reft).collect::<Result<_, _>>()?,
        }),
        Value::Fun(_) => Err(EvalError::FunValue),
    }
}

struct Evaluator<'m> {
    module: &'m SpecModule,
}

impl Evaluator<'_> {
    fn int(&self, env: &Env, e: &Expr) -> Result<BigInt, EvalError> {
        match self.eval(env, e)? {
            Value::Int(n) => Ok(n),
            v => Err(EvalError::IllSorted(format!("expected an integer in `{e}`, got {v}"))),
        }
    }

    fn boolean(&self, env: &Env, e: &Expr) -> Result<bool, EvalError> {
        match self.eval(env, e)? {
            Value::Bool(b) => Ok(b),
            v => Err(EvalError::IllSorted(format!("expected a boolean in `{e}`, got {v}"))),
        }
    }

    fn eval(&self, env: &Env, e: &Expr) -> Result<Value, EvalError> {
        Ok(match e {
            Expr::Int(n) => Value::Int(n.clone()),
            Expr::Bool(b) => Value::Bool(*b),
            Expr::Var(x) => env
                .iter()
                .rev()
                .find(|(n, _)| n == x)
                .map(|(_, v)| (*v).clone())
                .ok_or_else(|| EvalError::Unbound(x.clone()))?,
            Expr::Neg(a) => Value::Int(-self.int(env, a)?),
            Expr::Not(a) => Value::Bool(!self.boolean(env, a)?),
            Expr::Ite(c, t, f) => {
                if self.boolean(env, c)? {
                    self.eval(env, t)?
                } else {
                    self.eval(env, f)?
                }
            }
            Expr::Bin(op, l, r) => self.bin(env, *op, l, r)?,
            Expr::Measure(m, a) => {
                let def = self
                    .module
                    .measure(m)
                    .ok_or_else(|| EvalError::UnknownMeasure(m.clone()))?;
                let v = self.eval(env, a)?;
                self.measure(def, &v)?
            }
            Expr::Ctor { data, ctor, args } => Value::Data {
                data: data.as_str().into(),
                ctor: ctor.as_str().into(),
                fields: args
                    .iter()
                    .map(|a| self.eval(env, a))
                    .collect::<Result<_, _>>()?,
            },
        })
    }

    fn bin(&self, env: &Env, op: BinOp, l: &Expr, r: &Expr) -> Result<Value, EvalError> {
        use BinOp::*;
        Ok(Value::Bool(match op {
            Add => return Ok(Value::Int(self.int(env, l)? + self.int(env, r)?)),
            Sub => return Ok(Value::Int(self.int(env, l)? - self.int(env, r)?)),
            Mul => return Ok(Value::Int(self.int(env, l)? * self.int(env, r)?)),
            Lt => self.int(env, l)? < self.int(env, r)?,
            Le => self.int(env, l)? <= self.int(env, r)?,
            Gt => self.int(env, l)? > self.int(env, r)?,
            Ge => self.int(env, l)? >= self.int(env, r)?,
            Eq => self.eval(env, l)? == self.eval(env, r)?,
            Ne => self.eval(env, l)? != self.eval(env, r)?,
            And => self.boolean(env, l)? && self.boolean(env, r)?,
            Or => self.boolean(env, l)? || self.boolean(env, r)?,
            Implies => !self.boolean(env, l)? || self.boolean(env, r)?,
            Iff => self.boolean(env, l)? == self.boolean(env, r)?,
            Xor => self.boolean(env, l)? != self.boolean(env, r)?,
        }))
    }

    fn measure(&self, m: &MeasureDef, v: &Value) -> Result<Value, EvalError> {
        let Value::Data { data, ctor, fields } = v else {
            return Err(EvalError::IllSorted(format!("measure `{}` applied to {v}", m.name)));
        };
        if **data != *m.subject {
            return Err(EvalError::IllSorted(format!(
                "measure `{}` on `{}` applied to a `{data}` value",
                m.name, m.subject
            )));
        }
        let eq = m.equation(ctor).ok_or_else(|| EvalError::NoEquation {
            measure: m.name.clone(),
            ctor: ctor.to_string(),
        })?;
        if eq.vars.len() != fields.len() {
            return Err(EvalError::IllSorted(format!("constructor `{ctor}` arity mismatch")));
        }
        let env: Vec<(&str, &Value)> = eq.vars.iter().map(String::as_str).zip(fields).collect();
        self.eval(&env, &eq.body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_spec;

    const SRC: &str = "\
type Nat = {v:Int | 0 <= v}
measure len :: [a] -> Nat
len [] = 0
len (x:xs) = 1 + len xs
data Col = Red | Black
data RBT a = Leaf | Node {c :: Col, key :: a, l :: RBT {v:a | v < key}, r :: RBT {v:a | key < v}}
measure bh :: RBT a -> Int
bh Leaf = 0
bh (Node c k l r) = bh l + (if c == Red then 0 else 1)
";

    fn module() -> SpecModule {
        parse_spec(SRC).unwrap()
    }

    fn cons_term(h: i64, t: Expr) -> Expr {
        Expr::Ctor {
            data: "List".into(),
            ctor: ":".into(),
            args: vec![Expr::int(h), t],
        }
    }

    fn nil_term() -> Expr {
        Expr::Ctor {
            data: "List".into(),
            ctor: "[]".into(),
            args: vec![],
        }
    }

    #[test]
    fn len_of_singleton_is_positive() {
        let m = module();
        let p = Expr::bin(BinOp::Gt, Expr::measure("len", cons_term(1, nil_term())), Expr::int(0));
        assert!(eval_pred(&m, &p).unwrap());
        assert!(eval_pred(&m, &Expr::tt()).unwrap());
    }

    #[test]
    fn rescale_postcondition_instance() {
        let m = module();
        let p = Expr::and(
            Expr::bin(BinOp::Le, Expr::int(0), Expr::int(40)),
            Expr::bin(BinOp::Lt, Expr::int(40), Expr::int(100)),
        );
        assert!(eval_pred(&m, &p).unwrap());
    }

    #[test]
    fn measures_on_values() {
        let m = module();
        let len = m.measure("len").unwrap();
        assert_eq!(eval_measure(&m, len, &Value::nil()).unwrap(), Value::int(0));
        let l = Value::list([Value::int(7), Value::int(9)]);
        assert_eq!(eval_measure(&m, len, &l).unwrap(), Value::int(2));
        let bh = m.measure("bh").unwrap();
        let leaf = Value::data("RBT", "Leaf", vec![]);
        assert_eq!(eval_measure(&m, bh, &leaf).unwrap(), Value::int(0));
        let black = Value::data("Col", "Black", vec![]);
        let t = Value::data("RBT", "Node", vec![black, Value::int(1), leaf.clone(), leaf]);
        assert_eq!(eval_measure(&m, bh, &t).unwrap(), Value::int(1));
    }

    #[test]
    fn to_reft_encodings() {
        assert_eq!(to_reft(&Value::int(3)).unwrap(), Expr::int(3));
        assert_eq!(
            to_reft(&Value::list([Value::int(1)])).unwrap(),
            cons_term(1, nil_term())
        );
        let p = to_reft(&Value::pair(Value::int(2), Value::int(95))).unwrap();
        assert!(matches!(p, Expr::Ctor { ref ctor, ref args, .. } if ctor == "Pair" && args.len() == 2));
        let f = crate::logic::FunHandle::new(|a: &[Value]| Ok(a[0].clone()));
        assert_eq!(to_reft(&Value::Fun(f)), Err(EvalError::FunValue));
    }

    #[test]
    fn errors_are_reported() {
        let m = module();
        assert!(matches!(eval_pred(&m, &Expr::var("x")), Err(EvalError::Unbound(_))));
        assert!(matches!(eval_pred(&m, &Expr::int(1)), Err(EvalError::IllSorted(_))));
    }

    #[test]
    fn connectives_and_equality_on_data() {
        let m = module();
        let e = Expr::bin(BinOp::Eq, cons_term(1, nil_term()), cons_term(1, nil_term()));
        assert!(eval_pred(&m, &e).unwrap());
        let imp = Expr::bin(BinOp::Implies, Expr::Bool(false), Expr::Bool(false));
        assert!(eval_pred(&m, &imp).unwrap());
        let x = Expr::bin(BinOp::Xor, Expr::Bool(true), Expr::Bool(true));
        assert!(!eval_pred(&m, &x).unwrap());
    }
}
