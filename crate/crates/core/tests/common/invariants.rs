//! Structural checks every compiled trace must pass. Each returns a
//! description of the first breach it finds.
#![allow(dead_code)]

use std::collections::BTreeMap;

use stepwise::document::flatten_records;
use stepwise::emitter::{from_json, to_json};
use stepwise::executor::EventPayload;
use stepwise::{
    variable_history, Binding, CallNode, EventKind, ExecLimits, Item, RawEvent, Status,
    TraceDocument, ValueSnapshot,
};

type Check = Result<(), String>;

/// Calls and returns nest properly; an ok run starts with the module call
/// and ends with its return.
pub fn balance(events: &[RawEvent], status: Status) -> Check {
    let mut stack: Vec<u64> = Vec::new();
    for (i, ev) in events.iter().enumerate() {
        if ev.seq != i as u64 + 1 {
            return Err(format!("event {i} has seq {}", ev.seq));
        }
        match ev.kind() {
            EventKind::Call => {
                if ev.parent_frame_id != stack.last().copied() {
                    return Err(format!("seq {}: call parent {:?} vs open {:?}", ev.seq, ev.parent_frame_id, stack.last()));
                }
                stack.push(ev.frame_id);
            }
            EventKind::Return => {
                if stack.pop() != Some(ev.frame_id) {
                    return Err(format!("seq {}: return of frame {} is not innermost", ev.seq, ev.frame_id));
                }
            }
            EventKind::Line | EventKind::Exception => {
                if stack.last() != Some(&ev.frame_id) {
                    return Err(format!("seq {}: event outside its frame", ev.seq));
                }
            }
        }
    }
    if status == Status::Ok {
        let first = events.first().ok_or("ok run without events")?;
        let last = events.last().unwrap();
        if first.kind() != EventKind::Call || first.function_name != "<module>" {
            return Err("first event is not call(<module>)".into());
        }
        if last.kind() != EventKind::Return || last.function_name != "<module>" {
            return Err("last event is not return(<module>)".into());
        }
        if !stack.is_empty() {
            return Err(format!("{} frames left open", stack.len()));
        }
    }
    Ok(())
}

fn as_map(bindings: &[Binding]) -> BTreeMap<String, ValueSnapshot> {
    bindings
        .iter()
        .map(|b| (b.name.clone(), b.value.clone()))
        .collect()
}

/// Arguments plus deltas in step order rebuild each frame's last observed
/// visible locals.
pub fn replay(doc: &TraceDocument, events: &[RawEvent]) -> Check {
    for node in doc.root.descendants() {
        let mut state = as_map(&node.args);
        for rec in node.line_records() {
            for d in &rec.deltas {
                if d.value.is_removed() {
                    if state.remove(&d.name).is_none() {
                        return Err(format!("{}: step {} removes unbound {}", node.name, rec.step, d.name));
                    }
                } else {
                    state.insert(d.name.clone(), d.value.clone());
                }
            }
        }
        let last = events
            .iter()
            .rev()
            .filter(|e| e.frame_id == node.id)
            .find_map(RawEvent::locals);
        let expected = last.map(as_map).unwrap_or_else(|| as_map(&node.args));
        if state != expected {
            return Err(format!(
                "frame {} ({}): replayed {:?} but final locals are {:?}",
                node.id, node.name, state, expected
            ));
        }
    }
    Ok(())
}

/// Flattening keeps every line event exactly once, in order, under its own
/// frame.
pub fn flatten(doc: &TraceDocument, events: &[RawEvent]) -> Check {
    let root = Item::Call(doc.root.clone());
    let all = flatten_records(std::slice::from_ref(&root));
    let steps: Vec<u64> = all.iter().map(|r| r.step).collect();
    let lines: Vec<u64> = events
        .iter()
        .filter(|e| e.kind() == EventKind::Line)
        .map(|e| e.seq)
        .collect();
    if steps != lines {
        return Err(format!("flattened steps {steps:?} vs line events {lines:?}"));
    }
    for node in doc.root.descendants() {
        let own: Vec<u64> = node.line_records().iter().map(|r| r.step).collect();
        let expected: Vec<u64> = events
            .iter()
            .filter(|e| e.kind() == EventKind::Line && e.frame_id == node.id)
            .map(|e| e.seq)
            .collect();
        if own != expected {
            return Err(format!("frame {}: records {own:?} vs events {expected:?}", node.id));
        }
    }
    Ok(())
}

/// Every call follows the record of its call-site line, possibly after
/// sibling calls made from that same line.
pub fn call_placement(node: &CallNode) -> Check {
    fn walk(items: &[Item]) -> Check {
        for (i, item) in items.iter().enumerate() {
            match item {
                Item::Call(c) => {
                    let anchor = items[..i]
                        .iter()
                        .rev()
                        .find(|it| !matches!(it, Item::Call(s) if s.call_site_line == c.call_site_line));
                    match anchor {
                        Some(Item::Line(l)) if l.line_no == c.call_site_line => {}
                        other => {
                            return Err(format!(
                                "call {} from line {} follows {:?}",
                                c.id,
                                c.call_site_line,
                                other.map(Item::line_no)
                            ))
                        }
                    }
                    walk(&c.body)?;
                }
                Item::Loop(g) => {
                    for it in &g.iterations {
                        match it.first() {
                            Some(Item::Line(l)) if l.line_no == g.header_line => {}
                            _ => return Err(format!("iteration of loop {} lacks its header", g.header_line)),
                        }
                        walk(it)?;
                    }
                }
                Item::Line(_) => {}
            }
        }
        Ok(())
    }
    walk(&node.body)
}

/// The history up to any step is a prefix of the full history.
pub fn history_consistency(doc: &TraceDocument) -> Check {
    for node in doc.root.descendants() {
        let mut names: Vec<String> = node.args.iter().map(|b| b.name.clone()).collect();
        for rec in node.line_records() {
            names.extend(rec.deltas.iter().map(|d| d.name.clone()));
        }
        names.sort();
        names.dedup();
        let steps: Vec<u64> = node.line_records().iter().map(|r| r.step).collect();
        for name in &names {
            let full = variable_history(doc, node.id, name, u64::MAX)
                .map_err(|e| format!("frame {} {name}: {e}", node.id))?;
            if full.entries.windows(2).any(|w| w[0].step > w[1].step) {
                return Err(format!("frame {} {name}: history out of order", node.id));
            }
            for &s in &steps {
                let prefix: Vec<_> = full.entries.iter().filter(|e| e.step <= s).cloned().collect();
                match variable_history(doc, node.id, name, s) {
                    Ok(h) if h.entries == prefix => {}
                    Err(_) if prefix.is_empty() => {}
                    other => {
                        return Err(format!(
                            "frame {} {name} at step {s}: {other:?} vs prefix {prefix:?}",
                            node.id
                        ))
                    }
                }
            }
        }
    }
    Ok(())
}

fn snapshots(node: &CallNode, out: &mut Vec<ValueSnapshot>) {
    out.extend(node.args.iter().map(|b| b.value.clone()));
    out.extend(node.return_value.iter().cloned());
    for rec in node.line_records() {
        out.extend(rec.deltas.iter().map(|d| d.value.clone()));
    }
    for c in node.children() {
        snapshots(c, out);
    }
}

/// No rendered value exceeds the length cap.
pub fn snapshot_caps(doc: &TraceDocument, events: &[RawEvent], limits: &ExecLimits) -> Check {
    let mut all = Vec::new();
    snapshots(&doc.root, &mut all);
    for ev in events {
        match &ev.payload {
            EventPayload::Call { args } => all.extend(args.iter().map(|b| b.value.clone())),
            EventPayload::Return { value, locals, .. } => {
                all.extend(value.iter().cloned());
                all.extend(locals.iter().map(|b| b.value.clone()));
            }
            EventPayload::Line { locals } | EventPayload::Exception { locals, .. } => {
                all.extend(locals.iter().map(|b| b.value.clone()))
            }
        }
    }
    for v in all {
        if v.is_removed() {
            continue;
        }
        if v.repr.chars().count() as u64 > limits.snapshot_max_len {
            return Err(format!("repr {:?} exceeds {}", v.repr, limits.snapshot_max_len));
        }
    }
    Ok(())
}

/// Valid against the schema and round-trips byte for byte.
pub fn schema_round_trip(doc: &TraceDocument) -> Check {
    let json = to_json(doc);
    let (back, report) = from_json(&json).map_err(|e| e.to_string())?;
    if !report.valid {
        return Err(format!("violations: {:?}", report.violations));
    }
    let back = back.ok_or("valid report without a document")?;
    if &back != doc {
        return Err("parsed document differs".into());
    }
    if to_json(&back) != json {
        return Err("re-serialization differs".into());
    }
    Ok(())
}

/// Every line record carries an explanation.
pub fn explanations(doc: &TraceDocument) -> Check {
    let root = Item::Call(doc.root.clone());
    for rec in flatten_records(std::slice::from_ref(&root)) {
        if rec.explanation.trim().is_empty() {
            return Err(format!("step {} has no explanation", rec.step));
        }
    }
    Ok(())
}

/// Runs every check above.
pub fn all(doc: &TraceDocument, events: &[RawEvent], limits: &ExecLimits) -> Check {
    balance(events, doc.outcome.status).map_err(|e| format!("balance: {e}"))?;
    replay(doc, events).map_err(|e| format!("replay: {e}"))?;
    flatten(doc, events).map_err(|e| format!("flatten: {e}"))?;
    call_placement(&doc.root).map_err(|e| format!("placement: {e}"))?;
    history_consistency(doc).map_err(|e| format!("history: {e}"))?;
    snapshot_caps(doc, events, limits).map_err(|e| format!("snapshot: {e}"))?;
    schema_round_trip(doc).map_err(|e| format!("schema: {e}"))?;
    explanations(doc).map_err(|e| format!("explanations: {e}"))?;
    Ok(())
}
