//! Deterministic, template-based explanations for line records.
//!
//! Every line gets a non-empty sentence: statement kinds with a dedicated
//! template fill it from the static statement summary and the runtime state
//! after the line; anything else falls back to `Executes: {code}.`

mod docs;

pub use docs::{builtin_doc, BuiltinDocEntry, BuiltinDocs};

use crate::document::{Binding, LineRecord, ValueSnapshot};
use crate::frontend::{SourceModel, StatementKind};

/// Runtime facts about a line that the static model cannot supply.
#[derive(Debug, Clone, Copy, Default)]
pub struct LineContext<'a> {
    /// Function whose frame executed the line.
    pub frame: &'a str,
    /// Name of that frame's caller, if any.
    pub caller: Option<&'a str>,
    /// The frame's return value, for the line that returned.
    pub return_value: Option<&'a ValueSnapshot>,
    /// Visible locals once the line finished.
    pub state_after: Option<&'a [Binding]>,
    /// Next line executed in the same frame, if any.
    pub next_line: Option<u32>,
    /// Arguments bound by a user-function call made from this line.
    pub callee_args: Option<&'a [Binding]>,
}

fn lookup<'a>(state: Option<&'a [Binding]>, name: &str) -> Option<&'a ValueSnapshot> {
    state?
        .iter()
        .find(|b| b.name == name)
        .map(|b| &b.value)
        .filter(|v| !v.is_removed())
}

/// `a is now 1, b is now 2` for the names whose value is known.
fn now_clause(names: &[String], state: Option<&[Binding]>) -> Option<String> {
    let parts: Vec<String> = names
        .iter()
        .filter_map(|n| lookup(state, n).map(|v| format!("{n} is now {}", v.repr)))
        .collect();
    (!parts.is_empty()).then(|| parts.join(", "))
}

fn in_body(model: &SourceModel, header: u32, line: Option<u32>) -> Option<bool> {
    let line = line?;
    let extent = model.loops.iter().find(|l| l.header_line == header)?;
    Some(extent.body_start <= line && line <= extent.body_end)
}

fn builtin_hint(callee: &str) -> Option<String> {
    let name = callee.rsplit('.').next().unwrap_or(callee);
    builtin_doc(name).map(|d| d.summary)
}

/// Renders the explanation for `record`.
pub fn explain_line(record: &LineRecord, model: &SourceModel, ctx: &LineContext<'_>) -> String {
    let code = record.code.trim();
    let Some(stmt) = model.statement(record.line_no) else {
        return fallback(code);
    };
    match stmt {
        StatementKind::Assign { target, names, expr } => {
            match now_clause(names, ctx.state_after) {
                Some(now) => format!("Assigns the value of {expr} to {target}; {now}."),
                None => format!("Assigns the value of {expr} to {target}."),
            }
        }
        StatementKind::AugAssign {
            target,
            name,
            op,
            expr,
        } => {
            let names: Vec<String> = name.iter().cloned().collect();
            match now_clause(&names, ctx.state_after) {
                Some(now) => format!("Updates {target} with {target} {op} {expr}; {now}."),
                None => format!("Updates {target} with {target} {op} {expr}."),
            }
        }
        StatementKind::IfHeader { cond } => format!("Evaluates the condition {cond}."),
        StatementKind::ForHeader {
            target: _,
            vars,
            iterable,
        } => match in_body(model, record.line_no, ctx.next_line) {
            Some(true) => {
                let binds: Vec<String> = vars
                    .iter()
                    .filter_map(|v| lookup(ctx.state_after, v).map(|s| format!("{v} = {}", s.repr)))
                    .collect();
                if binds.is_empty() {
                    format!("Iterates over {iterable}.")
                } else {
                    format!(
                        "Iterates over {iterable}; this iteration binds {}.",
                        binds.join(", ")
                    )
                }
            }
            Some(false) => format!("Iterates over {iterable}; no items remain, so the loop ends."),
            None => format!("Iterates over {iterable}."),
        },
        StatementKind::WhileHeader { cond } => {
            match in_body(model, record.line_no, ctx.next_line) {
                Some(true) => format!("Evaluates the loop condition {cond}; it holds, so the body runs."),
                Some(false) => format!("Evaluates the loop condition {cond}; it is false, so the loop ends."),
                None => format!("Evaluates the loop condition {cond}."),
            }
        }
        StatementKind::Return { expr } => {
            let to = ctx.caller.unwrap_or("the caller");
            match (expr, ctx.return_value) {
                (Some(e), Some(v)) => format!("Returns {e} with value {} to {to}.", v.repr),
                (Some(e), None) => format!("Returns {e} to {to}."),
                (None, _) => format!("Returns None to {to}."),
            }
        }
        StatementKind::Call { callee, args } => {
            let mut text = match ctx.callee_args {
                Some(bound) if !bound.is_empty() => format!(
                    "Calls {callee} with arguments {}.",
                    bound
                        .iter()
                        .map(|b| format!("{}={}", b.name, b.value.repr))
                        .collect::<Vec<_>>()
                        .join(", ")
                ),
                Some(_) => format!("Calls {callee} with no arguments."),
                None if args.is_empty() => format!("Calls {callee} with no arguments."),
                None => format!("Calls {callee} with arguments {}.", args.join(", ")),
            };
            if ctx.callee_args.is_none() {
                if let Some(hint) = builtin_hint(callee) {
                    text.push(' ');
                    text.push_str(&hint);
                }
            }
            text
        }
        StatementKind::Def { name, params } => {
            format!("Defines function {name}({}).", params.join(", "))
        }
        StatementKind::Other => match code.split_whitespace().next() {
            Some("pass") => "Does nothing (placeholder statement).".into(),
            Some("break") => "Leaves the innermost loop.".into(),
            Some("continue") => "Skips to the next iteration of the innermost loop.".into(),
            Some("del") => format!("Deletes {}.", code["del".len()..].trim()),
            _ => fallback(code),
        },
    }
}

fn fallback(code: &str) -> String {
    if code.is_empty() {
        "Executes this line.".into()
    } else {
        format!("Executes: {code}.")
    }
}
