//! Turns the raw event stream into a [`TraceDocument`].
//!
//! Events are folded into a call tree with one node per frame. Each `line`
//! event opens a [`LineRecord`]; the state change observed at the frame's
//! next event (the following line, its return, or its exception) is
//! attributed to that record as its deltas. A child call is placed directly
//! after the line record that triggered it. Finally each frame's body is
//! regrouped into loop iterations and every record gets its explanation.

mod history;
mod loops;

pub use history::{variable_history, HistoryEntry, VariableHistory};
pub use loops::group_iterations;

use crate::document::*;
use crate::error::{Error, Result};
use crate::executor::{EventPayload, ExecLimits, RawEvent};
use crate::explainer::{explain_line, LineContext};
use crate::frontend::{loop_extents, SourceModel, MODULE_NAME};

/// Bindings that differ between two snapshots of one frame, in the order of
/// `after`, followed by removed names marked with
/// [`ValueSnapshot::removed`].
pub fn attribute_deltas(before: &[Binding], after: &[Binding]) -> Vec<Binding> {
    let mut out: Vec<Binding> = after
        .iter()
        .filter(|b| {
            !before
                .iter()
                .any(|old| old.name == b.name && old.value == b.value)
        })
        .cloned()
        .collect();
    out.extend(
        before
            .iter()
            .filter(|old| !after.iter().any(|b| b.name == old.name))
            .map(|old| Binding::new(old.name.clone(), ValueSnapshot::removed())),
    );
    out
}

/// Per-record runtime facts gathered while folding, used for explanations.
#[derive(Default)]
struct RecordMeta {
    state_after: Option<Vec<Binding>>,
    next_line: Option<u32>,
    callee_args: Option<Vec<Binding>>,
}

struct OpenFrame {
    frame_id: u64,
    node: CallNode,
    /// Flat body in execution order; loop grouping happens on close.
    items: Vec<Item>,
    meta: Vec<RecordMeta>,
    /// Record awaiting its deltas: index into `items` and into `meta`.
    pending: Option<(usize, usize)>,
    /// State at the last event of this frame.
    state: Vec<Binding>,
    returned: bool,
}

impl OpenFrame {
    fn pending_record(&mut self) -> Option<&mut LineRecord> {
        let (item, _) = self.pending?;
        match self.items.get_mut(item) {
            Some(Item::Line(l)) => Some(l),
            _ => None,
        }
    }

    fn settle(&mut self, after: &[Binding], seq: u64) -> Result<()> {
        let deltas = attribute_deltas(&self.state, after);
        match self.pending_record() {
            Some(rec) => rec.deltas.extend(deltas),
            None if deltas.is_empty() => {}
            None => {
                return Err(Error::MalformedStream(format!(
                    "event {seq}: state of '{}' changed before its first line",
                    self.node.name
                )))
            }
        }
        if let Some((_, idx)) = self.pending {
            self.meta[idx].state_after = Some(after.to_vec());
        }
        self.state = after.to_vec();
        Ok(())
    }
}

/// Folds `events` into the call tree, with deltas, loop groups and
/// explanations. Frames left open by a limit stop are closed as they are.
pub fn build_call_tree(events: &[RawEvent], model: &SourceModel) -> Result<CallNode> {
    let mut stack: Vec<OpenFrame> = Vec::new();
    let mut root: Option<CallNode> = None;
    for (expected_seq, ev) in (1..).zip(events) {
        if ev.seq != expected_seq {
            return Err(Error::MalformedStream(format!(
                "expected event {expected_seq}, found {}",
                ev.seq
            )));
        }
        if root.is_some() {
            return Err(Error::MalformedStream(format!(
                "event {} after the module frame returned",
                ev.seq
            )));
        }
        if let EventPayload::Call { args } = &ev.payload {
            let (caller, call_site_line) = match stack.last_mut() {
                None => {
                    if ev.parent_frame_id.is_some() || ev.function_name != MODULE_NAME {
                        return Err(Error::MalformedStream(format!(
                            "event {}: first frame must be {MODULE_NAME}",
                            ev.seq
                        )));
                    }
                    (None, 0)
                }
                Some(parent) => {
                    if ev.parent_frame_id != Some(parent.frame_id) {
                        return Err(Error::MalformedStream(format!(
                            "event {}: call from frame {:?} while frame {} is active",
                            ev.seq, ev.parent_frame_id, parent.frame_id
                        )));
                    }
                    let Some((_, idx)) = parent.pending else {
                        return Err(Error::MalformedStream(format!(
                            "event {}: call before any line of '{}'",
                            ev.seq, parent.node.name
                        )));
                    };
                    let line = parent
                        .pending_record()
                        .map(|r| r.line_no)
                        .expect("pending record exists");
                    parent.meta[idx].callee_args.get_or_insert_with(|| args.clone());
                    (Some(parent.node.name.clone()), line)
                }
            };
            stack.push(OpenFrame {
                frame_id: ev.frame_id,
                node: CallNode {
                    id: ev.frame_id,
                    name: ev.function_name.clone(),
                    caller,
                    call_site_line,
                    args: args.clone(),
                    body: Vec::new(),
                    return_value: None,
                    exception: None,
                },
                items: Vec::new(),
                meta: Vec::new(),
                pending: None,
                state: args.clone(),
                returned: false,
            });
            continue;
        }
        let Some(top) = stack.last_mut() else {
            return Err(Error::MalformedStream(format!(
                "event {}: no open frame",
                ev.seq
            )));
        };
        if top.frame_id != ev.frame_id {
            return Err(Error::MalformedStream(format!(
                "event {} belongs to frame {} but frame {} is active",
                ev.seq, ev.frame_id, top.frame_id
            )));
        }
        match &ev.payload {
            EventPayload::Call { .. } => unreachable!("handled above"),
            EventPayload::Line { locals } => {
                top.settle(locals, ev.seq)?;
                if let Some((_, idx)) = top.pending {
                    top.meta[idx].next_line = Some(ev.line_no);
                }
                let code = model.code(ev.line_no).ok_or_else(|| {
                    Error::MalformedStream(format!(
                        "event {}: line {} is outside the source",
                        ev.seq, ev.line_no
                    ))
                })?;
                top.pending = Some((top.items.len(), top.meta.len()));
                top.items.push(Item::Line(LineRecord {
                    step: ev.seq,
                    line_no: ev.line_no,
                    code: code.to_string(),
                    comment: model.comments.get(&ev.line_no).cloned(),
                    deltas: Vec::new(),
                    explanation: String::new(),
                }));
                top.meta.push(RecordMeta::default());
            }
            EventPayload::Exception {
                type_name,
                message,
                line,
                locals,
            } => {
                top.settle(locals, ev.seq)?;
                top.node.exception = Some(ExceptionInfo {
                    type_name: type_name.clone(),
                    message: message.clone(),
                    line: *line,
                });
            }
            EventPayload::Return {
                value,
                locals,
                aborted,
            } => {
                top.settle(locals, ev.seq)?;
                if !aborted {
                    top.node.return_value = value.clone();
                    top.returned = true;
                }
                let frame = stack.pop().expect("top exists");
                let node = close_frame(frame, model)?;
                match stack.last_mut() {
                    Some(parent) => parent.items.push(Item::Call(node)),
                    None => root = Some(node),
                }
            }
        }
    }
    // a limit stop leaves frames open: close them innermost first
    while let Some(frame) = stack.pop() {
        let node = close_frame(frame, model)?;
        match stack.last_mut() {
            Some(parent) => parent.items.push(Item::Call(node)),
            None => root = Some(node),
        }
    }
    Ok(root.unwrap_or_else(|| CallNode {
        id: 0,
        name: MODULE_NAME.to_string(),
        caller: None,
        call_site_line: 0,
        args: Vec::new(),
        body: Vec::new(),
        return_value: None,
        exception: None,
    }))
}

fn close_frame(mut frame: OpenFrame, model: &SourceModel) -> Result<CallNode> {
    if frame.returned {
        // the frame ran to completion: its last record led out of any loop
        if let Some(last) = frame.meta.last_mut() {
            last.next_line.get_or_insert(0);
        }
    }
    let n = frame.meta.len();
    let node = &frame.node;
    let mut idx = 0;
    for item in frame.items.iter_mut() {
        let Item::Line(rec) = item else { continue };
        let meta = &frame.meta[idx];
        let ctx = LineContext {
            frame: &node.name,
            caller: node.caller.as_deref(),
            return_value: if idx + 1 == n {
                node.return_value.as_ref()
            } else {
                None
            },
            state_after: meta.state_after.as_deref(),
            next_line: meta.next_line,
            callee_args: meta.callee_args.as_deref(),
        };
        rec.explanation = explain_line(rec, model, &ctx);
        idx += 1;
    }
    let extents = loop_extents(model, &frame.node.name)?;
    frame.node.body = group_iterations(frame.items, &extents);
    Ok(frame.node)
}

/// Builds the complete document for one run.
pub fn compile_trace(
    events: &[RawEvent],
    model: &SourceModel,
    outcome: &Outcome,
    limits: &ExecLimits,
) -> Result<TraceDocument> {
    Ok(TraceDocument {
        schema: SCHEMA_TAG.to_string(),
        source: SourceText {
            path: model.path.clone(),
            lines: model.lines.clone(),
        },
        limits: limits.clone(),
        outcome: outcome.clone(),
        root: build_call_tree(events, model)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(name: &str, repr: &str) -> Binding {
        Binding::new(
            name,
            ValueSnapshot {
                repr: repr.into(),
                type_tag: "int".into(),
                truncated: false,
            },
        )
    }

    #[test]
    fn deltas_report_changes_and_removals() {
        let before = [b("a", "1"), b("b", "2")];
        let after = [b("a", "1"), b("c", "3")];
        let d = attribute_deltas(&before, &after);
        assert_eq!(d.len(), 2);
        assert_eq!(d[0], b("c", "3"));
        assert_eq!(d[1].name, "b");
        assert!(d[1].value.is_removed());
        assert!(attribute_deltas(&after, &after).is_empty());
    }
}
