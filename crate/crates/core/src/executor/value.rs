//! Runtime values of the traced language and the operators over them.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::rc::Rc;
use std::sync::Arc;

use crate::frontend::ast::{BinOp, FunctionDef};

/// Longest list or string an operation may build.
pub const MAX_SEQUENCE_LEN: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Builtin {
    Abs,
    Bool,
    Enumerate,
    Float,
    Int,
    Len,
    List,
    Max,
    Min,
    Print,
    Range,
    Reversed,
    Sorted,
    Str,
    Sum,
    Tuple,
    Zip,
}

impl Builtin {
    pub const ALL: [Builtin; 17] = [
        Builtin::Abs,
        Builtin::Bool,
        Builtin::Enumerate,
        Builtin::Float,
        Builtin::Int,
        Builtin::Len,
        Builtin::List,
        Builtin::Max,
        Builtin::Min,
        Builtin::Print,
        Builtin::Range,
        Builtin::Reversed,
        Builtin::Sorted,
        Builtin::Str,
        Builtin::Sum,
        Builtin::Tuple,
        Builtin::Zip,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Abs => "abs",
            Builtin::Bool => "bool",
            Builtin::Enumerate => "enumerate",
            Builtin::Float => "float",
            Builtin::Int => "int",
            Builtin::Len => "len",
            Builtin::List => "list",
            Builtin::Max => "max",
            Builtin::Min => "min",
            Builtin::Print => "print",
            Builtin::Range => "range",
            Builtin::Reversed => "reversed",
            Builtin::Sorted => "sorted",
            Builtin::Str => "str",
            Builtin::Sum => "sum",
            Builtin::Tuple => "tuple",
            Builtin::Zip => "zip",
        }
    }

    pub fn from_name(name: &str) -> Option<Builtin> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }
}

/// Method names understood by [`super::interp`] on lists, dicts and strings.
pub const METHOD_NAMES: &[&str] = &[
    "append", "copy", "count", "extend", "get", "index", "insert", "items", "join", "keys",
    "lower", "pop", "remove", "reverse", "sort", "split", "strip", "upper", "values",
];

/// Insertion-ordered mapping with linear lookup; traced programs keep
/// dictionaries small.
#[derive(Debug, Clone, Default)]
pub struct Dict {
    pub entries: Vec<(Value, Value)>,
}

impl Dict {
    fn position(&self, key: &Value) -> Option<usize> {
        self.entries.iter().position(|(k, _)| py_eq(k, key))
    }

    pub fn get(&self, key: &Value) -> Option<&Value> {
        self.position(key).map(|i| &self.entries[i].1)
    }

    pub fn insert(&mut self, key: Value, value: Value) {
        match self.position(&key) {
            Some(i) => self.entries[i].1 = value,
            None => self.entries.push((key, value)),
        }
    }

    pub fn remove(&mut self, key: &Value) -> Option<Value> {
        self.position(key).map(|i| self.entries.remove(i).1)
    }
}

#[derive(Debug, Clone)]
pub enum Value {
    None,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(Rc<str>),
    List(Rc<RefCell<Vec<Value>>>),
    Tuple(Rc<[Value]>),
    Dict(Rc<RefCell<Dict>>),
    Range { start: i64, stop: i64, step: i64 },
    Function(Arc<FunctionDef>),
    Builtin(Builtin),
}

/// A raised exception: type name plus message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exc {
    pub type_name: &'static str,
    pub message: String,
}

impl Exc {
    pub fn new(type_name: &'static str, message: impl Into<String>) -> Self {
        Exc {
            type_name,
            message: message.into(),
        }
    }
}

pub fn type_error(msg: impl Into<String>) -> Exc {
    Exc::new("TypeError", msg)
}

pub fn value_error(msg: impl Into<String>) -> Exc {
    Exc::new("ValueError", msg)
}

fn overflow() -> Exc {
    Exc::new("OverflowError", "integer result does not fit in 64 bits")
}

fn memory_error() -> Exc {
    Exc::new("MemoryError", "sequence would exceed the size limit")
}

impl Value {
    pub fn str(s: &str) -> Value {
        Value::Str(Rc::from(s))
    }

    pub fn list(items: Vec<Value>) -> Value {
        Value::List(Rc::new(RefCell::new(items)))
    }

    pub fn tuple(items: Vec<Value>) -> Value {
        Value::Tuple(Rc::from(items))
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::None => "NoneType",
            Value::Bool(_) => "bool",
            Value::Int(_) => "int",
            Value::Float(_) => "float",
            Value::Str(_) => "str",
            Value::List(_) => "list",
            Value::Tuple(_) => "tuple",
            Value::Dict(_) => "dict",
            Value::Range { .. } => "range",
            Value::Function(_) => "function",
            Value::Builtin(_) => "builtin_function_or_method",
        }
    }

    pub fn is_callable(&self) -> bool {
        matches!(self, Value::Function(_) | Value::Builtin(_))
    }

    pub fn truthy(&self) -> bool {
        match self {
            Value::None => false,
            Value::Bool(b) => *b,
            Value::Int(i) => *i != 0,
            Value::Float(f) => *f != 0.0,
            Value::Str(s) => !s.is_empty(),
            Value::List(l) => !l.borrow().is_empty(),
            Value::Tuple(t) => !t.is_empty(),
            Value::Dict(d) => !d.borrow().entries.is_empty(),
            Value::Range { .. } => range_len(self) > 0,
            Value::Function(_) | Value::Builtin(_) => true,
        }
    }

    fn as_number(&self) -> Option<Num> {
        match self {
            Value::Bool(b) => Some(Num::Int(*b as i64)),
            Value::Int(i) => Some(Num::Int(*i)),
            Value::Float(f) => Some(Num::Float(*f)),
            _ => None,
        }
    }

    pub fn as_index(&self) -> Option<i64> {
        match self {
            Value::Bool(b) => Some(*b as i64),
            Value::Int(i) => Some(*i),
            _ => None,
        }
    }

    pub fn is_hashable(&self) -> bool {
        match self {
            Value::List(_) | Value::Dict(_) => false,
            Value::Tuple(items) => items.iter().all(Value::is_hashable),
            _ => true,
        }
    }
}

pub fn range_len(v: &Value) -> i64 {
    let Value::Range { start, stop, step } = *v else {
        return 0;
    };
    let (start, stop, step) = (start as i128, stop as i128, step as i128);
    let n = if step > 0 && start < stop {
        (stop - start + step - 1) / step
    } else if step < 0 && start > stop {
        (start - stop - step - 1) / (-step)
    } else {
        0
    };
    n as i64
}

#[derive(Clone, Copy)]
enum Num {
    Int(i64),
    Float(f64),
}

impl Num {
    fn to_f64(self) -> f64 {
        match self {
            Num::Int(i) => i as f64,
            Num::Float(f) => f,
        }
    }
}

/// Equality with numeric cross-type comparison (`1 == 1.0 == True`).
pub fn py_eq(a: &Value, b: &Value) -> bool {
    if let (Some(x), Some(y)) = (a.as_number(), b.as_number()) {
        return match (x, y) {
            (Num::Int(x), Num::Int(y)) => x == y,
            _ => x.to_f64() == y.to_f64(),
        };
    }
    match (a, b) {
        (Value::None, Value::None) => true,
        (Value::Str(x), Value::Str(y)) => x == y,
        (Value::List(x), Value::List(y)) => {
            Rc::ptr_eq(x, y) || seq_eq(&x.borrow(), &y.borrow())
        }
        (Value::Tuple(x), Value::Tuple(y)) => seq_eq(x, y),
        (Value::Dict(x), Value::Dict(y)) => {
            if Rc::ptr_eq(x, y) {
                return true;
            }
            let (x, y) = (x.borrow(), y.borrow());
            x.entries.len() == y.entries.len()
                && x
                    .entries
                    .iter()
                    .all(|(k, v)| y.get(k).is_some_and(|w| py_eq(v, w)))
        }
        (r1 @ Value::Range { .. }, r2 @ Value::Range { .. }) => {
            let (n1, n2) = (range_len(r1), range_len(r2));
            n1 == n2 && (n1 == 0 || range_item(r1, 0) == range_item(r2, 0))
                && (n1 <= 1 || range_item(r1, 1) == range_item(r2, 1))
        }
        (Value::Function(x), Value::Function(y)) => Arc::ptr_eq(x, y),
        (Value::Builtin(x), Value::Builtin(y)) => x == y,
        _ => false,
    }
}

fn seq_eq(a: &[Value], b: &[Value]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| py_eq(x, y))
}

pub fn range_item(v: &Value, i: i64) -> i64 {
    match *v {
        Value::Range { start, step, .. } => start + step * i,
        _ => 0,
    }
}

/// Identity for containers, equality for immutable scalars.
pub fn py_is(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::List(x), Value::List(y)) => Rc::ptr_eq(x, y),
        (Value::Dict(x), Value::Dict(y)) => Rc::ptr_eq(x, y),
        (Value::Tuple(x), Value::Tuple(y)) => Rc::ptr_eq(x, y),
        (Value::None, Value::None) => true,
        (Value::Bool(x), Value::Bool(y)) => x == y,
        (Value::Int(x), Value::Int(y)) => x == y,
        (Value::Float(x), Value::Float(y)) => x.to_bits() == y.to_bits(),
        (Value::Str(x), Value::Str(y)) => x == y,
        (Value::Function(x), Value::Function(y)) => Arc::ptr_eq(x, y),
        (Value::Builtin(x), Value::Builtin(y)) => x == y,
        _ => false,
    }
}

/// Ordering for `<`, `<=`, `>`, `>=`, `sorted`, `min` and `max`.
pub fn py_cmp(a: &Value, b: &Value) -> Result<Ordering, Exc> {
    if let (Some(x), Some(y)) = (a.as_number(), b.as_number()) {
        return match (x, y) {
            (Num::Int(x), Num::Int(y)) => Ok(x.cmp(&y)),
            _ => x
                .to_f64()
                .partial_cmp(&y.to_f64())
                .ok_or_else(|| value_error("cannot order NaN")),
        };
    }
    match (a, b) {
        (Value::Str(x), Value::Str(y)) => Ok(x.cmp(y)),
        (Value::List(x), Value::List(y)) => seq_cmp(&x.borrow(), &y.borrow()),
        (Value::Tuple(x), Value::Tuple(y)) => seq_cmp(x, y),
        _ => Err(type_error(format!(
            "'<' not supported between instances of '{}' and '{}'",
            a.type_name(),
            b.type_name()
        ))),
    }
}

fn seq_cmp(a: &[Value], b: &[Value]) -> Result<Ordering, Exc> {
    for (x, y) in a.iter().zip(b) {
        if !py_eq(x, y) {
            return py_cmp(x, y);
        }
    }
    Ok(a.len().cmp(&b.len()))
}

pub fn contains(container: &Value, item: &Value) -> Result<bool, Exc> {
    match container {
        Value::List(l) => Ok(l.borrow().iter().any(|x| py_eq(x, item))),
        Value::Tuple(t) => Ok(t.iter().any(|x| py_eq(x, item))),
        Value::Dict(d) => Ok(d.borrow().get(item).is_some()),
        Value::Str(s) => match item {
            Value::Str(sub) => Ok(s.contains(&**sub)),
            other => Err(type_error(format!(
                "'in <string>' requires string as left operand, not {}",
                other.type_name()
            ))),
        },
        r @ Value::Range { .. } => {
            let Some(x) = item.as_index() else {
                return Ok(false);
            };
            let Value::Range { start, step, .. } = *r else {
                unreachable!()
            };
            let offset = x as i128 - start as i128;
            let idx = offset / step as i128;
            Ok(offset % step as i128 == 0 && idx >= 0 && idx < range_len(r) as i128)
        }
        other => Err(type_error(format!(
            "argument of type '{}' is not iterable",
            other.type_name()
        ))),
    }
}

fn floor_div(a: i64, b: i64) -> Option<i64> {
    let q = a.checked_div(b)?;
    if a % b != 0 && ((a < 0) != (b < 0)) {
        q.checked_sub(1)
    } else {
        Some(q)
    }
}

fn floor_mod(a: i64, b: i64) -> Option<i64> {
    let r = a.checked_rem(b)?;
    if r != 0 && ((r < 0) != (b < 0)) {
        r.checked_add(b)
    } else {
        Some(r)
    }
}

fn repeat<T: Clone>(items: &[T], times: i64) -> Result<Vec<T>, Exc> {
    let times = times.max(0) as usize;
    if items.len().saturating_mul(times) > MAX_SEQUENCE_LEN {
        return Err(memory_error());
    }
    let mut out = Vec::with_capacity(items.len() * times);
    for _ in 0..times {
        out.extend_from_slice(items);
    }
    Ok(out)
}

pub fn binary_op(op: BinOp, a: &Value, b: &Value) -> Result<Value, Exc> {
    if let (Some(x), Some(y)) = (a.as_number(), b.as_number()) {
        return numeric_op(op, x, y);
    }
    match (op, a, b) {
        (BinOp::Add, Value::Str(x), Value::Str(y)) => {
            if x.len() + y.len() > MAX_SEQUENCE_LEN {
                return Err(memory_error());
            }
            Ok(Value::str(&format!("{x}{y}")))
        }
        (BinOp::Add, Value::List(x), Value::List(y)) => {
            let mut out = x.borrow().clone();
            out.extend(y.borrow().iter().cloned());
            if out.len() > MAX_SEQUENCE_LEN {
                return Err(memory_error());
            }
            Ok(Value::list(out))
        }
        (BinOp::Add, Value::Tuple(x), Value::Tuple(y)) => {
            Ok(Value::tuple(x.iter().chain(y.iter()).cloned().collect()))
        }
        (BinOp::Mul, Value::Str(s), n) | (BinOp::Mul, n, Value::Str(s)) if n.as_index().is_some() => {
            let chars: Vec<char> = s.chars().collect();
            Ok(Value::str(&repeat(&chars, n.as_index().unwrap())?.into_iter().collect::<String>()))
        }
        (BinOp::Mul, Value::List(l), n) | (BinOp::Mul, n, Value::List(l)) if n.as_index().is_some() => {
            let items = l.borrow();
            Ok(Value::list(repeat(&items, n.as_index().unwrap())?))
        }
        (BinOp::Mul, Value::Tuple(t), n) | (BinOp::Mul, n, Value::Tuple(t)) if n.as_index().is_some() => {
            Ok(Value::tuple(repeat(t, n.as_index().unwrap())?))
        }
        (BinOp::Mod, Value::Str(_), _) => Err(type_error("string formatting with % is not supported")),
        _ => Err(type_error(format!(
            "unsupported operand type(s) for {}: '{}' and '{}'",
            op.symbol(),
            a.type_name(),
            b.type_name()
        ))),
    }
}

fn numeric_op(op: BinOp, x: Num, y: Num) -> Result<Value, Exc> {
    if let (Num::Int(a), Num::Int(b)) = (x, y) {
        let zero = || Exc::new("ZeroDivisionError", "integer division or modulo by zero");
        let r = match op {
            BinOp::Add => a.checked_add(b),
            BinOp::Sub => a.checked_sub(b),
            BinOp::Mul => a.checked_mul(b),
            BinOp::Div => {
                if b == 0 {
                    return Err(Exc::new("ZeroDivisionError", "division by zero"));
                }
                return Ok(Value::Float(a as f64 / b as f64));
            }
            BinOp::FloorDiv => {
                if b == 0 {
                    return Err(zero());
                }
                floor_div(a, b)
            }
            BinOp::Mod => {
                if b == 0 {
                    return Err(zero());
                }
                floor_mod(a, b)
            }
            BinOp::Pow => {
                if b < 0 {
                    if a == 0 {
                        return Err(Exc::new(
                            "ZeroDivisionError",
                            "0 cannot be raised to a negative power",
                        ));
                    }
                    return Ok(Value::Float((a as f64).powf(b as f64)));
                }
                u32::try_from(b).ok().and_then(|e| a.checked_pow(e))
            }
        };
        return r.map(Value::Int).ok_or_else(overflow);
    }
    let (a, b) = (x.to_f64(), y.to_f64());
    let zero = || Exc::new("ZeroDivisionError", "float division by zero");
    let r = match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => {
            if b == 0.0 {
                return Err(zero());
            }
            a / b
        }
        BinOp::FloorDiv => {
            if b == 0.0 {
                return Err(zero());
            }
            (a / b).floor()
        }
        BinOp::Mod => {
            if b == 0.0 {
                return Err(Exc::new("ZeroDivisionError", "float modulo"));
            }
            let r = a % b;
            if r != 0.0 && ((r < 0.0) != (b < 0.0)) {
                r + b
            } else {
                r
            }
        }
        BinOp::Pow => {
            if a == 0.0 && b < 0.0 {
                return Err(Exc::new(
                    "ZeroDivisionError",
                    "0.0 cannot be raised to a negative power",
                ));
            }
            a.powf(b)
        }
    };
    Ok(Value::Float(r))
}

pub fn negate(v: &Value) -> Result<Value, Exc> {
    match v.as_number() {
        Some(Num::Int(i)) => i.checked_neg().map(Value::Int).ok_or_else(overflow),
        Some(Num::Float(f)) => Ok(Value::Float(-f)),
        None => Err(type_error(format!(
            "bad operand type for unary -: '{}'",
            v.type_name()
        ))),
    }
}

pub fn positive(v: &Value) -> Result<Value, Exc> {
    match v.as_number() {
        Some(Num::Int(i)) => Ok(Value::Int(i)),
        Some(Num::Float(f)) => Ok(Value::Float(f)),
        None => Err(type_error(format!(
            "bad operand type for unary +: '{}'",
            v.type_name()
        ))),
    }
}

pub fn abs(v: &Value) -> Result<Value, Exc> {
    match v.as_number() {
        Some(Num::Int(i)) => i.checked_abs().map(Value::Int).ok_or_else(overflow),
        Some(Num::Float(f)) => Ok(Value::Float(f.abs())),
        None => Err(type_error(format!(
            "bad operand type for abs(): '{}'",
            v.type_name()
        ))),
    }
}

fn normalize_index(i: i64, len: usize, what: &str) -> Result<usize, Exc> {
    let len = len as i64;
    let j = if i < 0 { i + len } else { i };
    if j < 0 || j >= len {
        return Err(Exc::new("IndexError", format!("{what} index out of range")));
    }
    Ok(j as usize)
}

pub fn get_index(obj: &Value, index: &Value) -> Result<Value, Exc> {
    match obj {
        Value::Dict(d) => d
            .borrow()
            .get(index)
            .cloned()
            .ok_or_else(|| Exc::new("KeyError", crate::executor::snapshot::repr_string(index))),
        _ => {
            let Some(i) = index.as_index() else {
                return Err(type_error(format!(
                    "{} indices must be integers, not {}",
                    obj.type_name(),
                    index.type_name()
                )));
            };
            match obj {
                Value::List(l) => {
                    let l = l.borrow();
                    Ok(l[normalize_index(i, l.len(), "list")?].clone())
                }
                Value::Tuple(t) => Ok(t[normalize_index(i, t.len(), "tuple")?].clone()),
                Value::Str(s) => {
                    let chars: Vec<char> = s.chars().collect();
                    let c = chars[normalize_index(i, chars.len(), "string")?];
                    Ok(Value::str(&c.to_string()))
                }
                r @ Value::Range { .. } => {
                    let n = range_len(r) as usize;
                    Ok(Value::Int(range_item(r, normalize_index(i, n, "range object")? as i64)))
                }
                other => Err(type_error(format!(
                    "'{}' object is not subscriptable",
                    other.type_name()
                ))),
            }
        }
    }
}

pub fn set_index(obj: &Value, index: &Value, value: Value) -> Result<(), Exc> {
    match obj {
        Value::List(l) => {
            let Some(i) = index.as_index() else {
                return Err(type_error(format!(
                    "list indices must be integers, not {}",
                    index.type_name()
                )));
            };
            let mut l = l.borrow_mut();
            let j = normalize_index(i, l.len(), "list assignment")?;
            l[j] = value;
            Ok(())
        }
        Value::Dict(d) => {
            if !index.is_hashable() {
                return Err(type_error(format!(
                    "unhashable type: '{}'",
                    index.type_name()
                )));
            }
            d.borrow_mut().insert(index.clone(), value);
            Ok(())
        }
        other => Err(type_error(format!(
            "'{}' object does not support item assignment",
            other.type_name()
        ))),
    }
}

pub fn del_index(obj: &Value, index: &Value) -> Result<(), Exc> {
    match obj {
        Value::List(l) => {
            let Some(i) = index.as_index() else {
                return Err(type_error("list indices must be integers"));
            };
            let mut l = l.borrow_mut();
            let j = normalize_index(i, l.len(), "list assignment")?;
            l.remove(j);
            Ok(())
        }
        Value::Dict(d) => d
            .borrow_mut()
            .remove(index)
            .map(|_| ())
            .ok_or_else(|| Exc::new("KeyError", crate::executor::snapshot::repr_string(index))),
        other => Err(type_error(format!(
            "'{}' object does not support item deletion",
            other.type_name()
        ))),
    }
}

fn slice_indices(len: usize, lower: Option<i64>, upper: Option<i64>, step: i64) -> Vec<usize> {
    let len = len as i64;
    let clamp = |v: i64, lo: i64, hi: i64| v.max(lo).min(hi);
    let adjust = |v: i64| if v < 0 { v + len } else { v };
    let mut out = Vec::new();
    if step > 0 {
        let start = lower.map(|v| clamp(adjust(v), 0, len)).unwrap_or(0);
        let stop = upper.map(|v| clamp(adjust(v), 0, len)).unwrap_or(len);
        let mut i = start;
        while i < stop {
            out.push(i as usize);
            i += step;
        }
    } else {
        let start = lower.map(|v| clamp(adjust(v), -1, len - 1)).unwrap_or(len - 1);
        let stop = upper.map(|v| clamp(adjust(v), -1, len - 1)).unwrap_or(-1);
        let mut i = start;
        while i > stop {
            out.push(i as usize);
            i += step;
        }
    }
    out
}

pub fn get_slice(
    obj: &Value,
    lower: Option<&Value>,
    upper: Option<&Value>,
    step: Option<&Value>,
) -> Result<Value, Exc> {
    let as_bound = |v: Option<&Value>| -> Result<Option<i64>, Exc> {
        match v {
            None | Some(Value::None) => Ok(None),
            Some(v) => v
                .as_index()
                .map(Some)
                .ok_or_else(|| type_error("slice indices must be integers or None")),
        }
    };
    let (lo, hi) = (as_bound(lower)?, as_bound(upper)?);
    let step = as_bound(step)?.unwrap_or(1);
    if step == 0 {
        return Err(value_error("slice step cannot be zero"));
    }
    match obj {
        Value::List(l) => {
            let l = l.borrow();
            let idx = slice_indices(l.len(), lo, hi, step);
            Ok(Value::list(idx.into_iter().map(|i| l[i].clone()).collect()))
        }
        Value::Tuple(t) => {
            let idx = slice_indices(t.len(), lo, hi, step);
            Ok(Value::tuple(idx.into_iter().map(|i| t[i].clone()).collect()))
        }
        Value::Str(s) => {
            let chars: Vec<char> = s.chars().collect();
            let idx = slice_indices(chars.len(), lo, hi, step);
            Ok(Value::str(&idx.into_iter().map(|i| chars[i]).collect::<String>()))
        }
        other => Err(type_error(format!(
            "'{}' object is not subscriptable",
            other.type_name()
        ))),
    }
}
