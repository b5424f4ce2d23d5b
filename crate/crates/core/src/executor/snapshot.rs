//! Deterministic, bounded rendering of runtime values.

use std::fmt::Write as _;

use super::value::Value;
use super::ExecLimits;
use crate::document::ValueSnapshot;

/// Placeholder for containers nested deeper than the depth cap.
pub const DEPTH_MARKER: &str = "…";

/// Depth guard for unbounded renderings (`str()`, `print`, error text) so
/// that self-referential lists terminate.
const UNBOUNDED_DEPTH: usize = 64;

struct Writer {
    out: String,
    chars: usize,
    max_chars: usize,
    max_depth: usize,
    truncated: bool,
}

impl Writer {
    fn full(&self) -> bool {
        self.chars > self.max_chars
    }

    fn push(&mut self, s: &str) {
        if self.full() {
            return;
        }
        for ch in s.chars() {
            self.out.push(ch);
            self.chars += 1;
            if self.full() {
                return;
            }
        }
    }

    fn value(&mut self, v: &Value, depth: usize) {
        if self.full() {
            return;
        }
        let container = matches!(v, Value::List(_) | Value::Tuple(_) | Value::Dict(_));
        if container && depth > self.max_depth {
            self.truncated = true;
            self.push(DEPTH_MARKER);
            return;
        }
        match v {
            Value::None => self.push("None"),
            Value::Bool(true) => self.push("True"),
            Value::Bool(false) => self.push("False"),
            Value::Int(i) => self.push(&i.to_string()),
            Value::Float(f) => self.push(&float_repr(*f)),
            Value::Str(s) => self.push(&str_repr(s)),
            Value::List(l) => {
                let items = l.borrow();
                self.push("[");
                self.items(&items, depth);
                self.push("]");
            }
            Value::Tuple(t) => {
                self.push("(");
                self.items(t, depth);
                if t.len() == 1 {
                    self.push(",");
                }
                self.push(")");
            }
            Value::Dict(d) => {
                let d = d.borrow();
                self.push("{");
                for (i, (k, val)) in d.entries.iter().enumerate() {
                    if self.full() {
                        return;
                    }
                    if i > 0 {
                        self.push(", ");
                    }
                    self.value(k, depth + 1);
                    self.push(": ");
                    self.value(val, depth + 1);
                }
                self.push("}");
            }
            Value::Range { start, stop, step } => {
                if *step == 1 {
                    self.push(&format!("range({start}, {stop})"));
                } else {
                    self.push(&format!("range({start}, {stop}, {step})"));
                }
            }
            Value::Function(f) => self.push(&format!("<function {}>", f.name)),
            Value::Builtin(b) => self.push(&format!("<built-in function {}>", b.name())),
        }
    }

    fn items(&mut self, items: &[Value], depth: usize) {
        for (i, item) in items.iter().enumerate() {
            if self.full() {
                return;
            }
            if i > 0 {
                self.push(", ");
            }
            self.value(item, depth + 1);
        }
    }
}

/// Renders `value` under the snapshot caps in `limits`.
pub fn snapshot_value(value: &Value, limits: &ExecLimits) -> ValueSnapshot {
    let max_len = limits.snapshot_max_len as usize;
    let mut w = Writer {
        out: String::new(),
        chars: 0,
        max_chars: max_len,
        max_depth: limits.snapshot_max_depth as usize,
        truncated: false,
    };
    w.value(value, 1);
    let mut repr = w.out;
    let mut truncated = w.truncated;
    if w.chars > max_len {
        repr = repr.chars().take(max_len).collect();
        truncated = true;
    }
    ValueSnapshot {
        repr,
        type_tag: value.type_name().to_string(),
        truncated,
    }
}

fn unbounded(v: &Value) -> String {
    let mut w = Writer {
        out: String::new(),
        chars: 0,
        max_chars: usize::MAX - 1,
        max_depth: UNBOUNDED_DEPTH,
        truncated: false,
    };
    w.value(v, 1);
    w.out
}

/// Full `repr()` text.
pub fn repr_string(v: &Value) -> String {
    unbounded(v)
}

/// `str()` text: strings print raw, everything else as its repr.
pub fn display_string(v: &Value) -> String {
    match v {
        Value::Str(s) => s.to_string(),
        other => unbounded(other),
    }
}

/// Shortest round-tripping float text in the host language's style:
/// `1.0`, `0.1`, `1e+20`, `inf`, `nan`.
pub fn float_repr(f: f64) -> String {
    if f.is_nan() {
        return "nan".into();
    }
    if f.is_infinite() {
        return if f > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let abs = f.abs();
    if abs != 0.0 && !(1e-4..1e16).contains(&abs) {
        // {:e} gives "1e20" / "1.5e-7"; add the explicit sign and two-digit exponent
        let s = format!("{f:e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent form");
        let exp: i32 = exp.parse().expect("integer exponent");
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let mut s = format!("{f}");
    if !s.contains('.') {
        s.push_str(".0");
    }
    s
}

pub fn str_repr(s: &str) -> String {
    let quote = if s.contains('\'') && !s.contains('"') {
        '"'
    } else {
        '\''
    };
    let mut out = String::with_capacity(s.len() + 2);
    out.push(quote);
    for ch in s.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c == quote => {
                out.push('\\');
                out.push(c);
            }
            c if (c as u32) < 0x20 || c as u32 == 0x7f => {
                let _ = write!(out, "\\x{:02x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push(quote);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn limits(max_len: u64, max_depth: u64) -> ExecLimits {
        ExecLimits {
            snapshot_max_len: max_len,
            snapshot_max_depth: max_depth,
            ..ExecLimits::default()
        }
    }

    fn nested() -> Value {
        // [1, [2, [3, [4]]]]
        let inner = Value::list(vec![Value::Int(4)]);
        let l3 = Value::list(vec![Value::Int(3), inner]);
        let l2 = Value::list(vec![Value::Int(2), l3]);
        Value::list(vec![Value::Int(1), l2])
    }

    #[test]
    fn int_literal() {
        let s = snapshot_value(&Value::Int(5), &ExecLimits::default());
        assert_eq!(s.repr, "5");
        assert_eq!(s.type_tag, "int");
        assert!(!s.truncated);
    }

    #[test]
    fn depth_cap_uses_marker() {
        let s = snapshot_value(&nested(), &limits(120, 3));
        assert_eq!(s.repr, "[1, [2, [3, …]]]");
        assert!(s.truncated);
        let full = snapshot_value(&nested(), &limits(120, 4));
        assert_eq!(full.repr, "[1, [2, [3, [4]]]]");
        assert!(!full.truncated);
    }

    #[test]
    fn empty_string() {
        let s = snapshot_value(&Value::str(""), &ExecLimits::default());
        assert_eq!(s.repr, "''");
        assert_eq!(s.type_tag, "str");
        assert!(!s.truncated);
    }

    #[test]
    fn length_cap() {
        let big = Value::list((0..100).map(Value::Int).collect());
        let s = snapshot_value(&big, &limits(10, 3));
        assert_eq!(s.repr, "[0, 1, 2, ");
        assert_eq!(s.repr.chars().count(), 10);
        assert!(s.truncated);
        // exactly at the cap is not truncated
        let exact = snapshot_value(&Value::list(vec![Value::Int(1)]), &limits(3, 3));
        assert_eq!(exact.repr, "[1]");
        assert!(!exact.truncated);
    }

    #[test]
    fn self_referential_list_terminates() {
        let l = Value::list(vec![Value::Int(1)]);
        if let Value::List(inner) = &l {
            inner.borrow_mut().push(l.clone());
        }
        let s = snapshot_value(&l, &limits(1000, 3));
        assert_eq!(s.repr, "[1, [1, [1, …]]]");
        assert!(repr_string(&l).len() < 1000);
        if let Value::List(inner) = &l {
            inner.borrow_mut().clear();
        }
    }

    #[test]
    fn reprs() {
        assert_eq!(float_repr(1.0), "1.0");
        assert_eq!(float_repr(0.1), "0.1");
        assert_eq!(float_repr(2.5), "2.5");
        assert_eq!(float_repr(1e20), "1e+20");
        assert_eq!(float_repr(1.5e-7), "1.5e-07");
        assert_eq!(float_repr(-0.0), "-0.0");
        assert_eq!(str_repr("it's"), "\"it's\"");
        assert_eq!(str_repr("a\nb"), "'a\\nb'");
        assert_eq!(
            repr_string(&Value::tuple(vec![Value::Int(1)])),
            "(1,)"
        );
        assert_eq!(display_string(&Value::str("hi")), "hi");
    }
}
