//! Builtin functions and container methods of the traced language.

use std::cmp::Ordering;

use super::interp::{display_all, Eval, Interp};
use super::snapshot::{display_string, float_repr, repr_string};
use super::value::*;

fn arity(name: &str, args: &[Value], min: usize, max: usize) -> Result<(), Exc> {
    if args.len() < min || args.len() > max {
        let expected = if min == max {
            format!("exactly {min}")
        } else if max == usize::MAX {
            format!("at least {min}")
        } else {
            format!("from {min} to {max}")
        };
        return Err(type_error(format!(
            "{name}() takes {expected} argument{} ({} given)",
            if max == 1 && min == 1 { "" } else { "s" },
            args.len()
        )));
    }
    Ok(())
}

fn int_arg(name: &str, v: &Value) -> Result<i64, Exc> {
    v.as_index().ok_or_else(|| {
        type_error(format!(
            "{name}() argument must be an integer, not '{}'",
            v.type_name()
        ))
    })
}

fn check_len(n: usize) -> Result<(), Exc> {
    if n > MAX_SEQUENCE_LEN {
        return Err(Exc::new("MemoryError", "sequence would exceed the size limit"));
    }
    Ok(())
}

/// Stable sort with a fallible comparator; the first comparison error wins.
fn sort_values(items: &mut [Value]) -> Result<(), Exc> {
    let mut err = None;
    items.sort_by(|a, b| match py_cmp(a, b) {
        Ok(o) => o,
        Err(e) => {
            err.get_or_insert(e);
            Ordering::Equal
        }
    });
    err.map_or(Ok(()), Err)
}

fn parse_int(s: &str) -> Result<Value, Exc> {
    let t = s.trim().replace('_', "");
    t.parse::<i64>().map(Value::Int).map_err(|_| {
        value_error(format!(
            "invalid literal for int() with base 10: {}",
            super::snapshot::str_repr(s)
        ))
    })
}

fn parse_float(s: &str) -> Result<Value, Exc> {
    let t = s.trim().to_ascii_lowercase();
    let parsed = match t.as_str() {
        "inf" | "+inf" | "infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        "nan" | "+nan" | "-nan" => Some(f64::NAN),
        _ => t.parse::<f64>().ok(),
    };
    parsed.map(Value::Float).ok_or_else(|| {
        value_error(format!(
            "could not convert string to float: {}",
            super::snapshot::str_repr(s)
        ))
    })
}

impl Interp<'_> {
    pub(super) fn call_builtin(&mut self, b: Builtin, args: Vec<Value>) -> Eval<Value> {
        let name = b.name();
        Ok(match b {
            Builtin::Abs => {
                arity(name, &args, 1, 1)?;
                abs(&args[0])?
            }
            Builtin::Bool => {
                arity(name, &args, 0, 1)?;
                Value::Bool(args.first().is_some_and(Value::truthy))
            }
            Builtin::Enumerate => {
                arity(name, &args, 1, 2)?;
                let start = match args.get(1) {
                    Some(v) => int_arg(name, v)?,
                    None => 0,
                };
                let items = self.iterate(&args[0])?;
                let mut out = Vec::with_capacity(items.len());
                for (i, item) in items.into_iter().enumerate() {
                    let idx = start
                        .checked_add(i as i64)
                        .ok_or_else(|| Exc::new("OverflowError", "enumerate index overflow"))?;
                    out.push(Value::tuple(vec![Value::Int(idx), item]));
                }
                Value::list(out)
            }
            Builtin::Float => {
                arity(name, &args, 0, 1)?;
                match args.first() {
                    None => Value::Float(0.0),
                    Some(Value::Int(i)) => Value::Float(*i as f64),
                    Some(Value::Bool(b)) => Value::Float(*b as i64 as f64),
                    Some(Value::Float(f)) => Value::Float(*f),
                    Some(Value::Str(s)) => parse_float(s)?,
                    Some(other) => {
                        return Err(type_error(format!(
                            "float() argument must be a string or a real number, not '{}'",
                            other.type_name()
                        ))
                        .into())
                    }
                }
            }
            Builtin::Int => {
                arity(name, &args, 0, 1)?;
                match args.first() {
                    None => Value::Int(0),
                    Some(Value::Int(i)) => Value::Int(*i),
                    Some(Value::Bool(b)) => Value::Int(*b as i64),
                    Some(Value::Float(f)) => {
                        if !f.is_finite() {
                            return Err(Exc::new(
                                "OverflowError",
                                format!("cannot convert float {} to integer", float_repr(*f)),
                            )
                            .into());
                        }
                        let t = f.trunc();
                        if t < i64::MIN as f64 || t >= i64::MAX as f64 {
                            return Err(Exc::new(
                                "OverflowError",
                                "integer result does not fit in 64 bits",
                            )
                            .into());
                        }
                        Value::Int(t as i64)
                    }
                    Some(Value::Str(s)) => parse_int(s)?,
                    Some(other) => {
                        return Err(type_error(format!(
                            "int() argument must be a string or a real number, not '{}'",
                            other.type_name()
                        ))
                        .into())
                    }
                }
            }
            Builtin::Len => {
                arity(name, &args, 1, 1)?;
                let n = match &args[0] {
                    Value::List(l) => l.borrow().len() as i64,
                    Value::Tuple(t) => t.len() as i64,
                    Value::Str(s) => s.chars().count() as i64,
                    Value::Dict(d) => d.borrow().entries.len() as i64,
                    r @ Value::Range { .. } => range_len(r),
                    other => {
                        return Err(type_error(format!(
                            "object of type '{}' has no len()",
                            other.type_name()
                        ))
                        .into())
                    }
                };
                Value::Int(n)
            }
            Builtin::List => {
                arity(name, &args, 0, 1)?;
                match args.first() {
                    None => Value::list(Vec::new()),
                    Some(v) => Value::list(self.iterate(v)?),
                }
            }
            Builtin::Max | Builtin::Min => {
                arity(name, &args, 1, usize::MAX)?;
                let items = if args.len() == 1 {
                    self.iterate(&args[0])?
                } else {
                    args
                };
                let want = if b == Builtin::Max {
                    Ordering::Greater
                } else {
                    Ordering::Less
                };
                let mut iter = items.into_iter();
                let Some(mut best) = iter.next() else {
                    return Err(value_error(format!("{name}() arg is an empty sequence")).into());
                };
                for item in iter {
                    self.tick()?;
                    if py_cmp(&item, &best)? == want {
                        best = item;
                    }
                }
                best
            }
            Builtin::Print => {
                let mut text = display_all(&args);
                text.push('\n');
                self.write_stdout(&text);
                Value::None
            }
            Builtin::Range => {
                arity(name, &args, 1, 3)?;
                let ints = args
                    .iter()
                    .map(|a| int_arg(name, a))
                    .collect::<Result<Vec<_>, _>>()?;
                let (start, stop, step) = match ints[..] {
                    [stop] => (0, stop, 1),
                    [start, stop] => (start, stop, 1),
                    [start, stop, step] => (start, stop, step),
                    _ => unreachable!("arity checked"),
                };
                if step == 0 {
                    return Err(value_error("range() arg 3 must not be zero").into());
                }
                Value::Range { start, stop, step }
            }
            Builtin::Reversed => {
                arity(name, &args, 1, 1)?;
                if matches!(args[0], Value::Dict(_)) {
                    return Err(type_error("'dict' object is not reversible").into());
                }
                let mut items = self.iterate(&args[0])?;
                items.reverse();
                Value::list(items)
            }
            Builtin::Sorted => {
                arity(name, &args, 1, 1)?;
                let mut items = self.iterate(&args[0])?;
                sort_values(&mut items)?;
                Value::list(items)
            }
            Builtin::Str => {
                arity(name, &args, 0, 1)?;
                match args.first() {
                    None => Value::str(""),
                    Some(v) => Value::str(&display_string(v)),
                }
            }
            Builtin::Sum => {
                arity(name, &args, 1, 2)?;
                let mut total = args.get(1).cloned().unwrap_or(Value::Int(0));
                if matches!(total, Value::Str(_)) {
                    return Err(type_error("sum() can't sum strings").into());
                }
                for item in self.iterate(&args[0])? {
                    self.tick()?;
                    total = binary_op(crate::frontend::ast::BinOp::Add, &total, &item)?;
                }
                total
            }
            Builtin::Tuple => {
                arity(name, &args, 0, 1)?;
                match args.first() {
                    None => Value::tuple(Vec::new()),
                    Some(v) => Value::tuple(self.iterate(v)?),
                }
            }
            Builtin::Zip => {
                let mut columns = Vec::with_capacity(args.len());
                for a in &args {
                    columns.push(self.iterate(a)?);
                }
                let n = columns.iter().map(Vec::len).min().unwrap_or(0);
                let rows = (0..n)
                    .map(|i| Value::tuple(columns.iter().map(|c| c[i].clone()).collect()))
                    .collect();
                Value::list(rows)
            }
        })
    }

    pub(super) fn call_method(&mut self, obj: &Value, name: &str, args: Vec<Value>) -> Eval<Value> {
        let unknown = || {
            Exc::new(
                "AttributeError",
                format!("'{}' object has no attribute '{name}'", obj.type_name()),
            )
        };
        match obj {
            Value::List(l) => {
                Ok(match name {
                    "append" => {
                        arity(name, &args, 1, 1)?;
                        check_len(l.borrow().len() + 1)?;
                        l.borrow_mut().push(args[0].clone());
                        Value::None
                    }
                    "extend" => {
                        arity(name, &args, 1, 1)?;
                        let extra = self.iterate(&args[0])?;
                        check_len(l.borrow().len() + extra.len())?;
                        l.borrow_mut().extend(extra);
                        Value::None
                    }
                    "pop" => {
                        arity(name, &args, 0, 1)?;
                        let mut items = l.borrow_mut();
                        if items.is_empty() {
                            return Err(Exc::new("IndexError", "pop from empty list").into());
                        }
                        let len = items.len() as i64;
                        let i = match args.first() {
                            Some(v) => int_arg(name, v)?,
                            None => -1,
                        };
                        let j = if i < 0 { i + len } else { i };
                        if j < 0 || j >= len {
                            return Err(Exc::new("IndexError", "pop index out of range").into());
                        }
                        items.remove(j as usize)
                    }
                    "insert" => {
                        arity(name, &args, 2, 2)?;
                        let i = int_arg(name, &args[0])?;
                        let mut items = l.borrow_mut();
                        check_len(items.len() + 1)?;
                        let len = items.len() as i64;
                        let j = if i < 0 { (i + len).max(0) } else { i.min(len) };
                        items.insert(j as usize, args[1].clone());
                        Value::None
                    }
                    "remove" => {
                        arity(name, &args, 1, 1)?;
                        let mut items = l.borrow_mut();
                        let Some(i) = items.iter().position(|x| py_eq(x, &args[0])) else {
                            return Err(value_error("list.remove(x): x not in list").into());
                        };
                        items.remove(i);
                        Value::None
                    }
                    "index" => {
                        arity(name, &args, 1, 1)?;
                        let items = l.borrow();
                        match items.iter().position(|x| py_eq(x, &args[0])) {
                            Some(i) => Value::Int(i as i64),
                            None => {
                                return Err(value_error(format!(
                                    "{} is not in list",
                                    repr_string(&args[0])
                                ))
                                .into())
                            }
                        }
                    }
                    "count" => {
                        arity(name, &args, 1, 1)?;
                        let n = l.borrow().iter().filter(|x| py_eq(x, &args[0])).count();
                        Value::Int(n as i64)
                    }
                    "reverse" => {
                        arity(name, &args, 0, 0)?;
                        l.borrow_mut().reverse();
                        Value::None
                    }
                    "sort" => {
                        arity(name, &args, 0, 0)?;
                        let mut items = l.borrow().clone();
                        sort_values(&mut items)?;
                        *l.borrow_mut() = items;
                        Value::None
                    }
                    "copy" => {
                        arity(name, &args, 0, 0)?;
                        Value::list(l.borrow().clone())
                    }
                    _ => return Err(unknown().into()),
                })
            }
            Value::Dict(d) => Ok(match name {
                "get" => {
                    arity(name, &args, 1, 2)?;
                    d.borrow()
                        .get(&args[0])
                        .cloned()
                        .unwrap_or_else(|| args.get(1).cloned().unwrap_or(Value::None))
                }
                "keys" | "values" | "items" => {
                    arity(name, &args, 0, 0)?;
                    let d = d.borrow();
                    let items = d.entries.iter().map(|(k, v)| match name {
                        "keys" => k.clone(),
                        "values" => v.clone(),
                        _ => Value::tuple(vec![k.clone(), v.clone()]),
                    });
                    Value::list(items.collect())
                }
                "pop" => {
                    arity(name, &args, 1, 2)?;
                    let removed = d.borrow_mut().remove(&args[0]);
                    match (removed, args.get(1)) {
                        (Some(v), _) => v,
                        (None, Some(default)) => default.clone(),
                        (None, None) => {
                            return Err(Exc::new("KeyError", repr_string(&args[0])).into())
                        }
                    }
                }
                "copy" => {
                    arity(name, &args, 0, 0)?;
                    Value::Dict(std::rc::Rc::new(std::cell::RefCell::new(d.borrow().clone())))
                }
                _ => return Err(unknown().into()),
            }),
            Value::Str(s) => Ok(match name {
                "join" => {
                    arity(name, &args, 1, 1)?;
                    let mut parts = Vec::new();
                    for item in self.iterate(&args[0])? {
                        match item {
                            Value::Str(p) => parts.push(p.to_string()),
                            other => {
                                return Err(type_error(format!(
                                    "sequence item {}: expected str instance, {} found",
                                    parts.len(),
                                    other.type_name()
                                ))
                                .into())
                            }
                        }
                    }
                    let joined = parts.join(s);
                    check_len(joined.len())?;
                    Value::str(&joined)
                }
                "split" => {
                    arity(name, &args, 0, 1)?;
                    let parts: Vec<Value> = match args.first() {
                        None | Some(Value::None) => s.split_whitespace().map(Value::str).collect(),
                        Some(Value::Str(sep)) if sep.is_empty() => {
                            return Err(value_error("empty separator").into())
                        }
                        Some(Value::Str(sep)) => s.split(&**sep).map(Value::str).collect(),
                        Some(other) => {
                            return Err(type_error(format!(
                                "must be str or None, not {}",
                                other.type_name()
                            ))
                            .into())
                        }
                    };
                    Value::list(parts)
                }
                "strip" => {
                    arity(name, &args, 0, 0)?;
                    Value::str(s.trim())
                }
                "lower" => {
                    arity(name, &args, 0, 0)?;
                    Value::str(&s.to_lowercase())
                }
                "upper" => {
                    arity(name, &args, 0, 0)?;
                    Value::str(&s.to_uppercase())
                }
                "count" | "index" => {
                    arity(name, &args, 1, 1)?;
                    let Value::Str(sub) = &args[0] else {
                        return Err(type_error(format!(
                            "must be str, not {}",
                            args[0].type_name()
                        ))
                        .into());
                    };
                    if name == "count" {
                        let n = if sub.is_empty() {
                            s.chars().count() + 1
                        } else {
                            s.matches(&**sub).count()
                        };
                        Value::Int(n as i64)
                    } else {
                        match s.find(&**sub) {
                            Some(byte) => Value::Int(s[..byte].chars().count() as i64),
                            None => return Err(value_error("substring not found").into()),
                        }
                    }
                }
                _ => return Err(unknown().into()),
            }),
            Value::Tuple(t) => Ok(match name {
                "count" => {
                    arity(name, &args, 1, 1)?;
                    Value::Int(t.iter().filter(|x| py_eq(x, &args[0])).count() as i64)
                }
                "index" => {
                    arity(name, &args, 1, 1)?;
                    match t.iter().position(|x| py_eq(x, &args[0])) {
                        Some(i) => Value::Int(i as i64),
                        None => {
                            return Err(value_error("tuple.index(x): x not in tuple").into())
                        }
                    }
                }
                _ => return Err(unknown().into()),
            }),
            _ => Err(unknown().into()),
        }
    }
}
