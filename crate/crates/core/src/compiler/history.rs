//! Value history of one variable inside one call.

use serde::{Deserialize, Serialize};

use crate::document::{CallNode, Item, TraceDocument, ValueSnapshot};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub step: u64,
    pub value: ValueSnapshot,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableHistory {
    pub scope: u64,
    pub name: String,
    pub entries: Vec<HistoryEntry>,
}

/// Step of the last line record of `parent` that precedes child `id`.
fn triggering_step(parent: &CallNode, id: u64) -> Option<u64> {
    fn walk(items: &[Item], id: u64, last: &mut Option<u64>) -> bool {
        for item in items {
            match item {
                Item::Line(l) => *last = Some(l.step),
                Item::Call(c) if c.id == id => return true,
                Item::Call(_) => {}
                Item::Loop(g) => {
                    if g.iterations.iter().any(|it| walk(it, id, last)) {
                        return true;
                    }
                }
            }
        }
        false
    }
    let mut last = None;
    walk(&parent.body, id, &mut last).then_some(last).flatten()
}

fn parent_of(root: &CallNode, id: u64) -> Option<&CallNode> {
    root.descendants()
        .into_iter()
        .find(|n| n.children().iter().any(|c| c.id == id))
}

/// Every value `name` took in call `scope` up to and including
/// `upto_step`: the parameter binding (if `name` is a parameter) followed
/// by each delta of the call's own line records, in step order.
///
/// A parameter binding is stamped one step before the callee's first line,
/// which is the step of the call event itself. Fails with
/// [`Error::UnknownVariable`] when `name` has no entry by `upto_step`.
pub fn variable_history(
    doc: &TraceDocument,
    scope: u64,
    name: &str,
    upto_step: u64,
) -> Result<VariableHistory> {
    let node = doc.root.find(scope).ok_or(Error::UnknownScope(scope))?;
    let records = node.line_records();
    let mut entries = Vec::new();
    if let Some(arg) = node.args.iter().find(|a| a.name == name) {
        let step = match records.first() {
            Some(first) => Some(first.step - 1),
            None => parent_of(&doc.root, scope).and_then(|p| triggering_step(p, scope)),
        };
        if let Some(step) = step.filter(|s| *s <= upto_step) {
            entries.push(HistoryEntry {
                step,
                value: arg.value.clone(),
            });
        }
    }
    for rec in records {
        for d in rec.deltas.iter().filter(|d| d.name == name) {
            if rec.step <= upto_step {
                entries.push(HistoryEntry {
                    step: rec.step,
                    value: d.value.clone(),
                });
            }
        }
    }
    if entries.is_empty() {
        return Err(Error::UnknownVariable {
            scope,
            name: name.to_string(),
        });
    }
    Ok(VariableHistory {
        scope,
        name: name.to_string(),
        entries,
    })
}
