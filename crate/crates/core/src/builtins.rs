//! Reference implementations of the example functions, including the
//! deliberately broken variants used by the benchmarks.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::driver::FunctionUnderTest;
use crate::logic::{CallError, Value};
use crate::spec::{CONS, NIL};

pub type BuiltinFn = fn(&[Value]) -> Result<Value, CallError>;

/// `(name, implementation)` for every built-in.
pub const BUILTINS: &[(&str, BuiltinFn)] = &[
    ("rescale", rescale),
    ("rescalePos", rescale),
    ("average", average),
    ("averageNZ", average),
    ("averagePos", average),
    ("best", best),
    ("bestFixed", best),
    ("padAverage", pad_average),
    ("padAverageMemo", pad_average_memo),
    ("insert", insert),
    ("insertBroken", insert_broken),
    ("enumerate", enumerate),
    ("add", rbt_add),
    ("addNoBalance", rbt_add_no_balance),
    ("delete", map_delete),
    ("deleteUnbalanced", map_delete_unbalanced),
];

pub fn lookup(name: &str) -> Option<BuiltinFn> {
    BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, f)| *f)
}

/// The built-in `name` as a function under test.
pub fn fut(name: &str) -> Option<FunctionUnderTest> {
    lookup(name).map(|f| FunctionUnderTest::native(move |a: &[Value]| f(a)))
}

fn fail<T>(msg: impl Into<String>) -> Result<T, CallError> {
    Err(CallError(msg.into()))
}

fn int(v: &Value) -> Result<&BigInt, CallError> {
    v.as_int().ok_or_else(|| CallError(format!("expected an integer, got {v}")))
}

fn list(v: &Value) -> Result<Vec<&Value>, CallError> {
    v.as_list().ok_or_else(|| CallError(format!("expected a list, got {v}")))
}

fn pair(v: &Value) -> Result<(&Value, &Value), CallError> {
    v.as_pair().ok_or_else(|| CallError(format!("expected a pair, got {v}")))
}

fn args<const N: usize>(a: &[Value]) -> Result<&[Value; N], CallError> {
    a.try_into()
        .map_err(|_| CallError(format!("expected {N} argument(s), got {}", a.len())))
}

/// Integer division rounding toward negative infinity.
fn div(a: &BigInt, b: &BigInt) -> Result<BigInt, CallError> {
    if b.is_zero() {
        return fail("divide by zero");
    }
    Ok(a.div_floor(b))
}

/// `rescale r1 r2 s = s * (r2 `div` r1)`
pub fn rescale(a: &[Value]) -> Result<Value, CallError> {
    let [r1, r2, s] = args::<3>(a)?;
    Ok(Value::Int(int(s)? * div(int(r2)?, int(r1)?)?))
}

fn weighted(wxs: &[&Value], mut f: impl FnMut(&Value) -> Result<BigInt, CallError>) -> Result<BigInt, CallError> {
    let mut total = BigInt::zero();
    let mut n = BigInt::zero();
    for wx in wxs {
        let (w, x) = pair(wx)?;
        total += int(w)? * f(x)?;
        n += int(w)?;
    }
    div(&total, &n)
}

/// Weighted average of scores; `[]` averages to 0.
pub fn average(a: &[Value]) -> Result<Value, CallError> {
    let [wxs] = args::<1>(a)?;
    let wxs = list(wxs)?;
    if wxs.is_empty() {
        return Ok(Value::int(0));
    }
    Ok(Value::Int(weighted(&wxs, |x| int(x).cloned())?))
}

/// `best k xs = take k (reverse (sort xs))`
pub fn best(a: &[Value]) -> Result<Value, CallError> {
    let [k, xs] = args::<2>(a)?;
    let mut xs: Vec<BigInt> = list(xs)?.into_iter().map(|x| int(x).cloned()).collect::<Result<_, _>>()?;
    xs.sort();
    xs.reverse();
    let k: usize = int(k)?.try_into().unwrap_or(0);
    Ok(Value::list(xs.into_iter().take(k).map(Value::Int).collect::<Vec<_>>()))
}

fn call(f: &Value, x: &Value) -> Result<Value, CallError> {
    match f {
        Value::Fun(h) => h.call(std::slice::from_ref(x)),
        other => fail(format!("expected a function, got {other}")),
    }
}

/// Weighted average after padding every score with `f`.
pub fn pad_average(a: &[Value]) -> Result<Value, CallError> {
    let [f, wxs] = args::<2>(a)?;
    let wxs = list(wxs)?;
    if wxs.is_empty() {
        return call(f, &Value::int(0));
    }
    Ok(Value::Int(weighted(&wxs, |x| int(&call(f, x)?).cloned())?))
}

/// [`pad_average`] that calls the padding function three times per score
/// and fails unless every answer is identical and inside `{v:Score | s <= v}`.
pub fn pad_average_memo(a: &[Value]) -> Result<Value, CallError> {
    let [f, wxs] = args::<2>(a)?;
    let padded = |x: &Value| -> Result<BigInt, CallError> {
        let first = call(f, x)?;
        for _ in 0..2 {
            if call(f, x)? != first {
                return fail(format!("padding function gave different answers for {x}"));
            }
        }
        let (s, v) = (int(x)?, int(&first)?);
        if !(s <= v && *v < BigInt::from(100)) {
            return fail(format!("padding {s} gave {v}, outside {{v:Score | s <= v}}"));
        }
        Ok(v.clone())
    };
    let wxs = list(wxs)?;
    if wxs.is_empty() {
        return padded(&Value::int(0)).map(Value::Int);
    }
    Ok(Value::Int(weighted(&wxs, padded)?))
}

fn ord_cons(data: &str, h: Value, t: Value) -> Value {
    Value::data(data, CONS, vec![h, t])
}

fn data_name(v: &Value) -> &str {
    match v {
        Value::Data { data, .. } => data,
        _ => "",
    }
}

/// Inserts into a sorted list.
pub fn insert(a: &[Value]) -> Result<Value, CallError> {
    let [x, xs] = args::<2>(a)?;
    let data = data_name(xs).to_string();
    let items = list(xs)?;
    let x_int = int(x)?;
    let pos = items.iter().position(|y| int(y).is_ok_and(|y| x_int <= y));
    let mut out: Vec<Value> = items.iter().map(|v| (*v).clone()).collect();
    out.insert(pos.unwrap_or(out.len()), x.clone());
    Ok(out
        .into_iter()
        .rev()
        .fold(Value::data(&data, NIL, vec![]), |acc, v| ord_cons(&data, v, acc)))
}

/// Compares only against the head, so larger elements can land out of order.
pub fn insert_broken(a: &[Value]) -> Result<Value, CallError> {
    let [x, xs] = args::<2>(a)?;
    let data = data_name(xs).to_string();
    match xs {
        Value::Data { ctor, fields, .. } if &**ctor == CONS => {
            if int(x)? <= int(&fields[0])? {
                Ok(ord_cons(&data, x.clone(), xs.clone()))
            } else {
                Ok(ord_cons(&data, fields[0].clone(), ord_cons(&data, x.clone(), fields[1].clone())))
            }
        }
        _ => Ok(ord_cons(&data, x.clone(), xs.clone())),
    }
}

/// Accepts anything and returns `True`; used to time pure enumeration.
pub fn enumerate(_: &[Value]) -> Result<Value, CallError> {
    Ok(Value::Bool(true))
}

// ---- red-black trees ----------------------------------------------------------

const RBT: &str = "RBT";

fn leaf() -> Value {
    Value::data(RBT, "Leaf", vec![])
}

fn color(red: bool) -> Value {
    Value::data("Col", if red { "Red" } else { "Black" }, vec![])
}

fn node(red: bool, k: Value, l: Value, r: Value) -> Value {
    Value::data(RBT, "Node", vec![color(red), k, l, r])
}

/// `(is_red, key, left, right)` of a node.
fn view(t: &Value) -> Option<(bool, &Value, &Value, &Value)> {
    match t {
        Value::Data { ctor, fields, .. } if &**ctor == "Node" => {
            let red = matches!(&fields[0], Value::Data { ctor, .. } if &**ctor == "Red");
            Some((red, &fields[1], &fields[2], &fields[3]))
        }
        _ => None,
    }
}

fn red_node(t: &Value) -> Option<(&Value, &Value, &Value)> {
    view(t).and_then(|(red, k, l, r)| red.then_some((k, l, r)))
}

fn balance(red: bool, z: Value, l: Value, r: Value) -> Value {
    if !red {
        if let Some((y, ll, c)) = red_node(&l) {
            if let Some((x, a, b)) = red_node(ll) {
                return node(true, y.clone(), node(false, x.clone(), a.clone(), b.clone()), node(false, z, c.clone(), r));
            }
            if let Some((yy, b, c2)) = red_node(c) {
                return node(true, yy.clone(), node(false, y.clone(), ll.clone(), b.clone()), node(false, z, c2.clone(), r));
            }
        }
        if let Some((zz, rl, d)) = red_node(&r) {
            if let Some((y, b, c)) = red_node(rl) {
                return node(true, y.clone(), node(false, z, l, b.clone()), node(false, zz.clone(), c.clone(), d.clone()));
            }
            if let Some((zz2, c, d2)) = red_node(d) {
                return node(true, zz.clone(), node(false, z, l, rl.clone()), node(false, zz2.clone(), c.clone(), d2.clone()));
            }
        }
    }
    node(red, z, l, r)
}

fn ins(x: &BigInt, t: &Value, rebalance: bool) -> Result<Value, CallError> {
    let Some((red, y, l, r)) = view(t) else {
        return Ok(node(true, Value::Int(x.clone()), leaf(), leaf()));
    };
    let yk = int(y)?;
    let mk = |red, y: Value, l, r| if rebalance { balance(red, y, l, r) } else { node(red, y, l, r) };
    Ok(if x < yk {
        mk(red, y.clone(), ins(x, l, rebalance)?, r.clone())
    } else if x > yk {
        mk(red, y.clone(), l.clone(), ins(x, r, rebalance)?)
    } else {
        t.clone()
    })
}

fn blacken(t: Value) -> Value {
    match view(&t) {
        Some((_, k, l, r)) => node(false, k.clone(), l.clone(), r.clone()),
        None => t,
    }
}

/// Okasaki's insertion.
pub fn rbt_add(a: &[Value]) -> Result<Value, CallError> {
    let [x, t] = args::<2>(a)?;
    Ok(blacken(ins(int(x)?, t, true)?))
}

/// Insertion that never rebalances.
pub fn rbt_add_no_balance(a: &[Value]) -> Result<Value, CallError> {
    let [x, t] = args::<2>(a)?;
    Ok(blacken(ins(int(x)?, t, false)?))
}

// ---- size-balanced maps -------------------------------------------------------

const MAP: &str = "Map";
const DELTA: u32 = 3;
const RATIO: u32 = 2;

fn tip() -> Value {
    Value::data(MAP, "Tip", vec![])
}

/// `(key, value, left, right)` of a `Bin`.
fn bin_view(m: &Value) -> Option<(&Value, &Value, &Value, &Value)> {
    match m {
        Value::Data { ctor, fields, .. } if &**ctor == "Bin" => Some((&fields[1], &fields[2], &fields[3], &fields[4])),
        _ => None,
    }
}

fn size(m: &Value) -> BigInt {
    match m {
        Value::Data { ctor, fields, .. } if &**ctor == "Bin" => fields[0].as_int().cloned().unwrap_or_default(),
        _ => BigInt::zero(),
    }
}

fn bin(k: Value, x: Value, l: Value, r: Value) -> Value {
    let s = size(&l) + size(&r) + BigInt::one();
    Value::data(MAP, "Bin", vec![Value::Int(s), k, x, l, r])
}

fn single_l(k1: Value, x1: Value, t1: Value, r: &Value) -> Value {
    let (k2, x2, t2, t3) = bin_view(r).expect("rotation of a Bin");
    bin(k2.clone(), x2.clone(), bin(k1, x1, t1, t2.clone()), t3.clone())
}

fn single_r(k1: Value, x1: Value, l: &Value, t3: Value) -> Value {
    let (k2, x2, t1, t2) = bin_view(l).expect("rotation of a Bin");
    bin(k2.clone(), x2.clone(), t1.clone(), bin(k1, x1, t2.clone(), t3))
}

fn double_l(k1: Value, x1: Value, t1: Value, r: &Value) -> Value {
    let (k2, x2, rl, t4) = bin_view(r).expect("rotation of a Bin");
    let (k3, x3, t2, t3) = bin_view(rl).expect("rotation of a Bin");
    bin(
        k3.clone(),
        x3.clone(),
        bin(k1, x1, t1, t2.clone()),
        bin(k2.clone(), x2.clone(), t3.clone(), t4.clone()),
    )
}

fn double_r(k1: Value, x1: Value, l: &Value, t4: Value) -> Value {
    let (k2, x2, t1, lr) = bin_view(l).expect("rotation of a Bin");
    let (k3, x3, t2, t3) = bin_view(lr).expect("rotation of a Bin");
    bin(
        k3.clone(),
        x3.clone(),
        bin(k2.clone(), x2.clone(), t1.clone(), t2.clone()),
        bin(k1, x1, t3.clone(), t4),
    )
}

fn map_balance(k: Value, x: Value, l: Value, r: Value) -> Value {
    let (sl, sr) = (size(&l), size(&r));
    if &sl + &sr <= BigInt::one() {
        bin(k, x, l, r)
    } else if sr > &sl * DELTA {
        let (_, _, ly, ry) = bin_view(&r).expect("heavy side is a Bin");
        if size(ly) < size(ry) * RATIO {
            single_l(k, x, l, &r)
        } else {
            double_l(k, x, l, &r)
        }
    } else if sl > &sr * DELTA {
        let (_, _, ly, ry) = bin_view(&l).expect("heavy side is a Bin");
        if size(ry) < size(ly) * RATIO {
            single_r(k, x, &l, r)
        } else {
            double_r(k, x, &l, r)
        }
    } else {
        bin(k, x, l, r)
    }
}

type Rebuild = fn(Value, Value, Value, Value) -> Value;

fn delete_find_min(m: &Value, rebuild: Rebuild) -> (Value, Value, Value) {
    let (k, x, l, r) = bin_view(m).expect("non-empty map");
    if bin_view(l).is_none() {
        return (k.clone(), x.clone(), r.clone());
    }
    let (km, xm, l2) = delete_find_min(l, rebuild);
    (km, xm, rebuild(k.clone(), x.clone(), l2, r.clone()))
}

fn delete_find_max(m: &Value, rebuild: Rebuild) -> (Value, Value, Value) {
    let (k, x, l, r) = bin_view(m).expect("non-empty map");
    if bin_view(r).is_none() {
        return (k.clone(), x.clone(), l.clone());
    }
    let (km, xm, r2) = delete_find_max(r, rebuild);
    (km, xm, rebuild(k.clone(), x.clone(), l.clone(), r2))
}

fn glue(l: &Value, r: &Value, rebuild: Rebuild) -> Value {
    if bin_view(l).is_none() {
        return r.clone();
    }
    if bin_view(r).is_none() {
        return l.clone();
    }
    if size(l) > size(r) {
        let (km, xm, l2) = delete_find_max(l, rebuild);
        rebuild(km, xm, l2, r.clone())
    } else {
        let (km, xm, r2) = delete_find_min(r, rebuild);
        rebuild(km, xm, l.clone(), r2)
    }
}

fn delete_with(k: &BigInt, m: &Value, rebuild: Rebuild) -> Result<Value, CallError> {
    let Some((kx, x, l, r)) = bin_view(m) else {
        return Ok(tip());
    };
    let kk = int(kx)?;
    Ok(if k < kk {
        rebuild(kx.clone(), x.clone(), delete_with(k, l, rebuild)?, r.clone())
    } else if k > kk {
        rebuild(kx.clone(), x.clone(), l.clone(), delete_with(k, r, rebuild)?)
    } else {
        glue(l, r, rebuild)
    })
}

/// Deletion with weight-balancing rotations.
pub fn map_delete(a: &[Value]) -> Result<Value, CallError> {
    let [k, m] = args::<2>(a)?;
    delete_with(int(k)?, m, map_balance)
}

/// Deletion that keeps sizes right but never rotates.
pub fn map_delete_unbalanced(a: &[Value]) -> Result<Value, CallError> {
    let [k, m] = args::<2>(a)?;
    delete_with(int(k)?, m, bin)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Value {
        Value::list(xs.iter().map(|x| Value::int(*x)).collect::<Vec<_>>())
    }

    fn pairs(xs: &[(i64, i64)]) -> Value {
        Value::list(xs.iter().map(|(a, b)| Value::pair(Value::int(*a), Value::int(*b))).collect::<Vec<_>>())
    }

    #[test]
    fn rescale_example() {
        assert_eq!(rescale(&[Value::int(5), Value::int(100), Value::int(2)]).unwrap(), Value::int(40));
        assert_eq!(rescale(&[Value::int(1), Value::int(0), Value::int(0)]).unwrap(), Value::int(0));
        assert!(rescale(&[Value::int(0), Value::int(1), Value::int(0)]).is_err());
    }

    #[test]
    fn average_examples() {
        assert!(average(&[pairs(&[(0, 0)])]).is_err());
        assert!(average(&[pairs(&[(-3, 3), (3, 0)])]).is_err());
        assert_eq!(average(&[pairs(&[(1, 10), (3, 20)])]).unwrap(), Value::int(17));
        assert_eq!(average(&[pairs(&[])]).unwrap(), Value::int(0));
        // floor division, as in Haskell
        assert_eq!(average(&[pairs(&[(-1, 5), (2, 0)])]).unwrap(), Value::int(-5));
    }

    #[test]
    fn best_takes_largest() {
        assert_eq!(best(&[Value::int(2), ints(&[3, 9, 1])]).unwrap(), ints(&[9, 3]));
        assert_eq!(best(&[Value::int(2), ints(&[])]).unwrap(), ints(&[]));
    }

    #[test]
    fn insert_variants() {
        let xs = ints(&[0, 1]);
        assert_eq!(insert(&[Value::int(2), xs.clone()]).unwrap(), ints(&[0, 1, 2]));
        assert_eq!(insert(&[Value::int(0), xs.clone()]).unwrap(), ints(&[0, 0, 1]));
        assert_eq!(insert_broken(&[Value::int(2), xs]).unwrap(), ints(&[0, 2, 1]));
    }

    #[test]
    fn rbt_insert_balances() {
        let mut t = leaf();
        for x in [1, 2, 3, 4, 5] {
            t = rbt_add(&[Value::int(x), t]).unwrap();
        }
        assert_eq!(t.to_string(), "Node Black 2 (Node Black 1 Leaf Leaf) (Node Red 4 (Node Black 3 Leaf Leaf) (Node Black 5 Leaf Leaf))");
        let mut u = leaf();
        for x in [1, 2, 3] {
            u = rbt_add_no_balance(&[Value::int(x), u]).unwrap();
        }
        assert_eq!(u.to_string(), "Node Black 1 Leaf (Node Red 2 Leaf (Node Red 3 Leaf Leaf))");
    }

    fn map_of(keys: &[i64]) -> Value {
        // a balanced tree over sorted keys
        fn build(keys: &[i64]) -> Value {
            if keys.is_empty() {
                return tip();
            }
            let mid = keys.len() / 2;
            bin(Value::int(keys[mid]), Value::Bool(true), build(&keys[..mid]), build(&keys[mid + 1..]))
        }
        build(keys)
    }

    #[test]
    fn map_delete_rotates() {
        // root 1 with left {0} and right {2, 3}
        let m = bin(
            Value::int(1),
            Value::Bool(true),
            map_of(&[0]),
            bin(Value::int(2), Value::Bool(true), tip(), map_of(&[3])),
        );
        let good = map_delete(&[Value::int(0), m.clone()]).unwrap();
        assert_eq!(size(&good), BigInt::from(3));
        let (k, _, l, r) = bin_view(&good).unwrap();
        assert_eq!(k, &Value::int(2));
        assert_eq!((size(l), size(r)), (BigInt::one(), BigInt::one()));
        let bad = map_delete_unbalanced(&[Value::int(0), m]).unwrap();
        let (_, _, l, r) = bin_view(&bad).unwrap();
        assert_eq!((size(l), size(r)), (BigInt::zero(), BigInt::from(2)));
        assert_eq!(map_delete(&[Value::int(9), map_of(&[1, 2])]).unwrap(), map_of(&[1, 2]));
    }

    #[test]
    fn registry() {
        assert!(lookup("rescalePos").is_some());
        assert!(lookup("nope").is_none());
    }
}
