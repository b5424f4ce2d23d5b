//! Structural validation of trace JSON.
//!
//! Works on the untyped JSON tree so that every problem is reported with a
//! path (`$.root.body[2].step`) instead of stopping at the first one.

use std::collections::HashSet;
use std::fmt;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::document::SCHEMA_TAG;
use crate::frontend::MODULE_NAME;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemaReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl SchemaReport {
    pub fn from_violations(violations: Vec<Violation>) -> Self {
        SchemaReport {
            valid: violations.is_empty(),
            violations,
        }
    }
}

/// Checks `root` against the trace schema and its cross-field invariants:
/// strictly increasing steps in document order, line numbers inside the
/// source, unique call ids, loop iterations that open with their header,
/// record code matching the source, and never both a return value and an
/// exception on one call.
pub fn validate_value(root: &Value) -> SchemaReport {
    let mut v = Validator::default();
    v.document(root);
    SchemaReport::from_violations(v.out)
}

#[derive(Default)]
struct Validator {
    out: Vec<Violation>,
    lines: Option<Vec<String>>,
    last_step: Option<u64>,
    ids: HashSet<u64>,
}

impl Validator {
    fn fail(&mut self, path: &str, message: impl Into<String>) {
        self.out.push(Violation {
            path: path.to_string(),
            message: message.into(),
        });
    }

    /// Checks required/optional keys and returns the object, if it is one.
    fn object<'a>(
        &mut self,
        v: &'a Value,
        path: &str,
        required: &[&str],
        optional: &[&str],
    ) -> Option<&'a Map<String, Value>> {
        let Some(obj) = v.as_object() else {
            self.fail(path, format!("expected an object, found {}", type_of(v)));
            return None;
        };
        for key in required {
            if !obj.contains_key(*key) {
                self.fail(path, format!("missing required key '{key}'"));
            }
        }
        for key in obj.keys() {
            if !required.contains(&key.as_str()) && !optional.contains(&key.as_str()) {
                self.fail(path, format!("unknown key '{key}'"));
            }
        }
        Some(obj)
    }

    fn string<'a>(&mut self, obj: &'a Map<String, Value>, key: &str, path: &str) -> Option<&'a str> {
        let v = obj.get(key)?;
        let s = v.as_str();
        if s.is_none() {
            self.fail(&format!("{path}.{key}"), format!("expected a string, found {}", type_of(v)));
        }
        s
    }

    fn uint(&mut self, obj: &Map<String, Value>, key: &str, path: &str) -> Option<u64> {
        let v = obj.get(key)?;
        let n = v.as_u64();
        if n.is_none() {
            self.fail(
                &format!("{path}.{key}"),
                format!("expected a non-negative integer, found {}", type_of(v)),
            );
        }
        n
    }

    fn boolean(&mut self, obj: &Map<String, Value>, key: &str, path: &str) {
        if let Some(v) = obj.get(key) {
            if !v.is_boolean() {
                self.fail(&format!("{path}.{key}"), format!("expected a boolean, found {}", type_of(v)));
            }
        }
    }

    fn array<'a>(&mut self, obj: &'a Map<String, Value>, key: &str, path: &str) -> Option<&'a Vec<Value>> {
        let v = obj.get(key)?;
        let a = v.as_array();
        if a.is_none() {
            self.fail(&format!("{path}.{key}"), format!("expected an array, found {}", type_of(v)));
        }
        a
    }

    fn line_in_source(&mut self, line: u64, path: &str) {
        if let Some(lines) = &self.lines {
            if line < 1 || line > lines.len() as u64 {
                let n = lines.len();
                self.fail(path, format!("line {line} is outside the source (1..={n})"));
            }
        }
    }

    fn document(&mut self, v: &Value) {
        let Some(obj) = self.object(v, "$", &["schema", "source", "limits", "outcome", "root"], &[])
        else {
            return;
        };
        if let Some(tag) = self.string(obj, "schema", "$") {
            if tag != SCHEMA_TAG {
                self.fail("$.schema", format!("expected '{SCHEMA_TAG}', found '{tag}'"));
            }
        }
        if let Some(src) = obj.get("source") {
            self.source(src);
        }
        if let Some(limits) = obj.get("limits") {
            self.limits(limits);
        }
        if let Some(outcome) = obj.get("outcome") {
            self.outcome(outcome);
        }
        if let Some(root) = obj.get("root") {
            self.call(root, "$.root", true);
        }
    }

    fn source(&mut self, v: &Value) {
        let path = "$.source";
        let Some(obj) = self.object(v, path, &["path", "lines"], &[]) else {
            return;
        };
        self.string(obj, "path", path);
        if let Some(lines) = self.array(obj, "lines", path) {
            let mut text = Vec::with_capacity(lines.len());
            let mut ok = true;
            for (i, l) in lines.iter().enumerate() {
                match l.as_str() {
                    Some(s) => text.push(s.to_string()),
                    None => {
                        ok = false;
                        self.fail(&format!("{path}.lines[{i}]"), "expected a string");
                    }
                }
            }
            if ok {
                self.lines = Some(text);
            }
        }
    }

    fn limits(&mut self, v: &Value) {
        let path = "$.limits";
        let counts = ["max_events", "max_depth", "snapshot_max_len", "snapshot_max_depth"];
        let mut required = counts.to_vec();
        required.push("timeout");
        let Some(obj) = self.object(v, path, &required, &[]) else {
            return;
        };
        for key in counts {
            if let Some(0) = self.uint(obj, key, path) {
                self.fail(&format!("{path}.{key}"), "must be positive");
            }
        }
        if let Some(t) = obj.get("timeout") {
            match t.as_f64() {
                Some(x) if x > 0.0 => {}
                _ => self.fail(&format!("{path}.timeout"), "expected a positive number"),
            }
        }
    }

    fn outcome(&mut self, v: &Value) {
        let path = "$.outcome";
        let Some(obj) = self.object(v, path, &["status"], &["detail"]) else {
            return;
        };
        if let Some(s) = self.string(obj, "status", path) {
            if !["ok", "error", "limit"].contains(&s) {
                self.fail(
                    &format!("{path}.status"),
                    format!("expected one of ok, error, limit; found '{s}'"),
                );
            }
        }
        self.string(obj, "detail", path);
    }

    fn snapshot(&mut self, v: &Value, path: &str) {
        let Some(obj) = self.object(v, path, &["repr", "type", "truncated"], &[]) else {
            return;
        };
        self.string(obj, "repr", path);
        self.string(obj, "type", path);
        self.boolean(obj, "truncated", path);
    }

    fn bindings(&mut self, obj: &Map<String, Value>, key: &str, path: &str) {
        let Some(items) = self.array(obj, key, path) else {
            return;
        };
        for (i, b) in items.iter().enumerate() {
            let bpath = format!("{path}.{key}[{i}]");
            if let Some(bo) = self.object(b, &bpath, &["name", "value"], &[]) {
                self.string(bo, "name", &bpath);
                if let Some(val) = bo.get("value") {
                    self.snapshot(val, &format!("{bpath}.value"));
                }
            }
        }
    }

    fn kind_is(&mut self, obj: &Map<String, Value>, path: &str, expected: &str) {
        if let Some(k) = self.string(obj, "kind", path) {
            if k != expected {
                self.fail(&format!("{path}.kind"), format!("expected '{expected}', found '{k}'"));
            }
        }
    }

    fn call(&mut self, v: &Value, path: &str, is_root: bool) {
        let Some(obj) = self.object(
            v,
            path,
            &["kind", "id", "name", "call_site_line", "args", "body"],
            &["caller", "return", "exception"],
        ) else {
            return;
        };
        self.kind_is(obj, path, "call");
        if let Some(id) = self.uint(obj, "id", path) {
            if !self.ids.insert(id) {
                self.fail(&format!("{path}.id"), format!("duplicate call id {id}"));
            }
        }
        let name = self.string(obj, "name", path);
        if name == Some("") {
            self.fail(&format!("{path}.name"), "must not be empty");
        }
        self.string(obj, "caller", path);
        let site = self.uint(obj, "call_site_line", path);
        if is_root {
            if name.is_some_and(|n| n != MODULE_NAME) {
                self.fail(&format!("{path}.name"), format!("root must be '{MODULE_NAME}'"));
            }
            if site.is_some_and(|s| s != 0) {
                self.fail(&format!("{path}.call_site_line"), "root call_site_line must be 0");
            }
            if obj.contains_key("caller") {
                self.fail(&format!("{path}.caller"), "root has no caller");
            }
        } else if let Some(s) = site {
            self.line_in_source(s, &format!("{path}.call_site_line"));
        }
        self.bindings(obj, "args", path);
        if let Some(r) = obj.get("return") {
            self.snapshot(r, &format!("{path}.return"));
        }
        if let Some(e) = obj.get("exception") {
            let epath = format!("{path}.exception");
            if let Some(eo) = self.object(e, &epath, &["type", "message", "line"], &[]) {
                self.string(eo, "type", &epath);
                self.string(eo, "message", &epath);
                if let Some(l) = self.uint(eo, "line", &epath) {
                    self.line_in_source(l, &format!("{epath}.line"));
                }
            }
        }
        if obj.contains_key("return") && obj.contains_key("exception") {
            self.fail(path, "a call cannot have both 'return' and 'exception'");
        }
        if let Some(body) = self.array(obj, "body", path) {
            self.items(body, &format!("{path}.body"));
        }
    }

    fn items(&mut self, items: &[Value], path: &str) {
        for (i, item) in items.iter().enumerate() {
            self.item(item, &format!("{path}[{i}]"));
        }
    }

    fn item(&mut self, v: &Value, path: &str) {
        let kind = v.get("kind").and_then(Value::as_str);
        match kind {
            Some("call") => self.call(v, path, false),
            Some("line") => self.line(v, path),
            Some("loop") => self.loop_group(v, path),
            Some(other) => self.fail(
                &format!("{path}.kind"),
                format!("unknown item kind '{other}' (expected call, line or loop)"),
            ),
            None => self.fail(path, "item has no string 'kind'"),
        }
    }

    fn line(&mut self, v: &Value, path: &str) {
        let Some(obj) = self.object(
            v,
            path,
            &["kind", "step", "line", "code", "deltas", "explanation"],
            &["comment"],
        ) else {
            return;
        };
        self.kind_is(obj, path, "line");
        if let Some(step) = self.uint(obj, "step", path) {
            if let Some(prev) = self.last_step.filter(|p| step <= *p) {
                self.fail(
                    &format!("{path}.step"),
                    format!("step {step} does not follow step {prev}"),
                );
            }
            self.last_step = Some(step);
        }
        let line = self.uint(obj, "line", path);
        if let Some(l) = line {
            self.line_in_source(l, &format!("{path}.line"));
        }
        let code = self.string(obj, "code", path);
        if let (Some(code), Some(l)) = (code, line) {
            let expected = self.lines.as_ref().and_then(|lines| {
                let i = usize::try_from(l).ok()?.checked_sub(1)?;
                let s = lines.get(i)?;
                Some(s.strip_suffix('\r').unwrap_or(s).to_string())
            });
            if expected.is_some_and(|e| e != code) {
                self.fail(&format!("{path}.code"), format!("does not match source line {l}"));
            }
        }
        self.string(obj, "comment", path);
        self.bindings(obj, "deltas", path);
        match self.string(obj, "explanation", path) {
            Some(e) if e.trim().is_empty() => {
                self.fail(&format!("{path}.explanation"), "must not be empty")
            }
            _ => {}
        }
    }

    fn loop_group(&mut self, v: &Value, path: &str) {
        let Some(obj) = self.object(
            v,
            path,
            &["kind", "header_line", "loop_kind", "iterations"],
            &[],
        ) else {
            return;
        };
        self.kind_is(obj, path, "loop");
        let header = self.uint(obj, "header_line", path);
        if let Some(h) = header {
            self.line_in_source(h, &format!("{path}.header_line"));
        }
        if let Some(k) = self.string(obj, "loop_kind", path) {
            if k != "for" && k != "while" {
                self.fail(
                    &format!("{path}.loop_kind"),
                    format!("expected 'for' or 'while', found '{k}'"),
                );
            }
        }
        let Some(iterations) = self.array(obj, "iterations", path) else {
            return;
        };
        if iterations.is_empty() {
            self.fail(&format!("{path}.iterations"), "a loop group needs at least one iteration");
        }
        for (i, it) in iterations.iter().enumerate() {
            let ipath = format!("{path}.iterations[{i}]");
            let Some(items) = it.as_array() else {
                self.fail(&ipath, format!("expected an array, found {}", type_of(it)));
                continue;
            };
            let opens_with_header = items.first().is_some_and(|first| {
                first.get("kind").and_then(Value::as_str) == Some("line")
                    && first.get("line").and_then(Value::as_u64) == header
            });
            if header.is_some() && !opens_with_header {
                self.fail(&ipath, "iteration must start with the loop header's line record");
            }
            self.items(items, &ipath);
        }
    }
}

fn type_of(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}
