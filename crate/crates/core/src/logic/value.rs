use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;

use crate::spec::{CONS, LIST, NIL, PAIR};

/// A concrete, total value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Int(BigInt),
    Bool(bool),
    Data {
        data: Arc<str>,
        ctor: Arc<str>,
        fields: Vec<Value>,
    },
    Fun(FunHandle),
}

impl Value {
    pub fn int(n: impl Into<BigInt>) -> Value {
        Value::Int(n.into())
    }

    pub fn data(data: &str, ctor: &str, fields: Vec<Value>) -> Value {
        Value::Data {
            data: data.into(),
            ctor: ctor.into(),
            fields,
        }
    }

    pub fn nil() -> Value {
        Value::data(LIST, NIL, vec![])
    }

    pub fn cons(head: Value, tail: Value) -> Value {
        Value::data(LIST, CONS, vec![head, tail])
    }

    pub fn list(items: impl IntoIterator<Item = Value, IntoIter: DoubleEndedIterator>) -> Value {
        items
            .into_iter()
            .rev()
            .fold(Value::nil(), |acc, x| Value::cons(x, acc))
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::data(PAIR, PAIR, vec![a, b])
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Elements of a list-shaped value (built from `[]` and `(:)`).
    pub fn as_list(&self) -> Option<Vec<&Value>> {
        let mut out = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Value::Data { ctor, fields, .. } if &**ctor == NIL && fields.is_empty() => {
                    return Some(out);
                }
                Value::Data { ctor, fields, .. } if &**ctor == CONS && fields.len() == 2 => {
                    out.push(&fields[0]);
                    cur = &fields[1];
                }
                _ => return None,
            }
        }
    }

    pub fn as_pair(&self) -> Option<(&Value, &Value)> {
        match self {
            Value::Data { data, fields, .. } if &**data == PAIR => Some((&fields[0], &fields[1])),
            _ => None,
        }
    }

    /// No function value occurs anywhere inside.
    pub fn is_first_order(&self) -> bool {
        match self {
            Value::Fun(_) => false,
            Value::Data { fields, .. } => fields.iter().all(Value::is_first_order),
            _ => true,
        }
    }

    fn atomic(&self) -> bool {
        match self {
            Value::Int(n) => n.sign() != num_bigint::Sign::Minus,
            Value::Data { data, .. } if &**data == PAIR => true,
            v @ Value::Data { fields, .. } => fields.is_empty() || v.as_list().is_some(),
            _ => true,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{}", if *b { "True" } else { "False" }),
            Value::Fun(h) => write!(f, "<function #{}>", h.id()),
            v @ Value::Data { data, ctor, fields } => {
                if let Some(items) = v.as_list() {
                    write!(f, "[")?;
                    for (i, x) in items.iter().enumerate() {
                        if i > 0 {
                            write!(f, ", ")?;
                        }
                        write!(f, "{x}")?;
                    }
                    return write!(f, "]");
                }
                if &**data == PAIR {
                    return write!(f, "({}, {})", fields[0], fields[1]);
                }
                if &**ctor == CONS {
                    write!(f, "(:)")?;
                } else {
                    write!(f, "{ctor}")?;
                }
                for x in fields {
                    if x.atomic() {
                        write!(f, " {x}")?;
                    } else {
                        write!(f, " ({x})")?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Failure raised by a callable value. The message is shown to the user.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct CallError(pub String);

pub trait Callable: Send + Sync {
    fn call(&self, args: &[Value]) -> Result<Value, CallError>;
}

impl<F> Callable for F
where
    F: Fn(&[Value]) -> Result<Value, CallError> + Send + Sync,
{
    fn call(&self, args: &[Value]) -> Result<Value, CallError> {
        self(args)
    }
}

/// An opaque function value. Equality is identity.
#[derive(Clone)]
pub struct FunHandle {
    id: u64,
    f: Arc<dyn Callable>,
}

static NEXT_FUN: AtomicU64 = AtomicU64::new(0);

impl FunHandle {
    pub fn new(f: impl Callable + 'static) -> FunHandle {
        FunHandle {
            id: NEXT_FUN.fetch_add(1, Ordering::Relaxed),
            f: Arc::new(f),
        }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn call(&self, args: &[Value]) -> Result<Value, CallError> {
        self.f.call(args)
    }
}

impl fmt::Debug for FunHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FunHandle(#{})", self.id)
    }
}

impl PartialEq for FunHandle {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl Eq for FunHandle {}

impl Hash for FunHandle {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id.hash(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_lists_pairs_and_trees() {
        let l = Value::list([Value::pair(Value::int(-3), Value::int(3)), Value::pair(Value::int(3), Value::int(0))]);
        assert_eq!(l.to_string(), "[(-3, 3), (3, 0)]");
        let leaf = Value::data("RBT", "Leaf", vec![]);
        let red = Value::data("Col", "Red", vec![]);
        let t = Value::data(
            "RBT",
            "Node",
            vec![red.clone(), Value::int(-1), leaf.clone(), Value::data("RBT", "Node", vec![red, Value::int(2), leaf.clone(), leaf])],
        );
        assert_eq!(t.to_string(), "Node Red (-1) Leaf (Node Red 2 Leaf Leaf)");
    }

    #[test]
    fn list_views() {
        let l = Value::list([Value::int(1), Value::int(2)]);
        assert_eq!(l.as_list().unwrap().len(), 2);
        assert!(Value::int(1).as_list().is_none());
    }

    #[test]
    fn fun_identity() {
        let f = FunHandle::new(|a: &[Value]| Ok(a[0].clone()));
        let g = f.clone();
        let h = FunHandle::new(|a: &[Value]| Ok(a[0].clone()));
        assert_eq!(f, g);
        assert_ne!(f, h);
        assert_eq!(f.call(&[Value::int(4)]).unwrap(), Value::int(4));
    }
}
