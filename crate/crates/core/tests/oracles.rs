//! Hand-derived expectations for the reference fixtures P1 (`add`), P2
//! (`total`) and P3 (`fib`), one block per pipeline stage.

mod common;

use common::*;
use stepwise::compiler::{attribute_deltas, group_iterations};
use stepwise::emitter::{from_json, to_html, to_json};
use stepwise::executor::{snapshot_value, value::Value, EventPayload};
use stepwise::explainer::builtin_doc;
use stepwise::frontend::{builtin_references, loop_extents, LoopKind};
use stepwise::{
    compile_trace, execute_traced, instrument, parse_source, variable_history, Binding, CallNode,
    Error, EventKind, ExecLimits, Item, LineRecord, RawEvent, Status, ValueSnapshot,
};

fn int(repr: &str) -> ValueSnapshot {
    ValueSnapshot {
        repr: repr.into(),
        type_tag: "int".into(),
        truncated: false,
    }
}

fn bind(name: &str, repr: &str) -> Binding {
    Binding::new(name, int(repr))
}

fn events_of(text: &str) -> stepwise::Execution {
    execute_traced(&instrument(text, ExecLimits::default()).unwrap())
}

fn frame_records<'a>(root: &'a CallNode, name: &str) -> Vec<&'a LineRecord> {
    let node = root
        .descendants()
        .into_iter()
        .find(|n| n.name == name)
        .unwrap_or_else(|| panic!("no frame {name}"));
    node.line_records()
}

fn deltas(r: &LineRecord) -> Vec<(String, String)> {
    r.deltas
        .iter()
        .map(|d| (d.name.clone(), d.value.repr.clone()))
        .collect()
}

fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
    v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

// ---------------------------------------------------------------- frontend

#[test]
fn empty_text_has_empty_model() {
    let m = parse_source("", "empty.py").unwrap();
    assert!(m.lines.is_empty());
    assert!(m.functions.is_empty());
    assert!(m.loops.is_empty());
}

#[test]
fn p2_functions_and_loops() {
    let m = parse_source(P2, "p2.py").unwrap();
    assert_eq!(m.functions.len(), 1);
    let f = &m.functions[0];
    assert_eq!(f.name, "total");
    assert_eq!(f.params, vec!["xs"]);
    assert_eq!((f.def_line, f.body_start, f.body_end), (1, 2, 5));
    assert_eq!(m.loops.len(), 1);
    let l = &m.loops[0];
    assert_eq!(l.kind, LoopKind::For);
    assert_eq!((l.header_line, l.body_start, l.body_end), (3, 4, 4));
    assert_eq!(l.loop_var.as_deref(), Some("x"));
}

#[test]
fn p1_comments() {
    let m = parse_source(P1, "p1.py").unwrap();
    assert_eq!(m.comments.len(), 1);
    assert_eq!(m.comments.get(&2).map(String::as_str), Some("sum"));
}

#[test]
fn comment_marker_inside_string_is_not_a_comment() {
    let m = parse_source("s = 'a # b'  # real\nt = \"#\"\n", "c.py").unwrap();
    assert_eq!(m.comments.len(), 1);
    assert_eq!(m.comments.get(&1).map(String::as_str), Some("real"));
}

#[test]
fn loop_extents_per_frame() {
    let p2 = parse_source(P2, "p2.py").unwrap();
    let loops = loop_extents(&p2, "total").unwrap();
    assert_eq!(loops.len(), 1);
    assert_eq!((loops[0].header_line, loops[0].body_start, loops[0].body_end), (3, 4, 4));
    assert!(loop_extents(&p2, "<module>").unwrap().is_empty());
    let p1 = parse_source(P1, "p1.py").unwrap();
    assert!(loop_extents(&p1, "add").unwrap().is_empty());
    let p3 = parse_source(P3, "p3.py").unwrap();
    assert!(loop_extents(&p3, "fib").unwrap().is_empty());
    assert!(matches!(
        loop_extents(&p3, "nope"),
        Err(Error::UnknownFunction(name)) if name == "nope"
    ));
}

#[test]
fn builtin_reference_examples() {
    let p2 = parse_source(P2, "p2.py").unwrap();
    assert!(builtin_references(&p2).is_empty());
    let pop = "xs = [1, 2]\n\n\n\n\n\nxs.pop()\n";
    let m = parse_source(pop, "pop.py").unwrap();
    assert_eq!(builtin_references(&m), vec![(7, "pop".to_string())]);
    let m = parse_source("print(len(xs))\n", "pl.py").unwrap();
    assert_eq!(
        builtin_references(&m),
        vec![(1, "print".to_string()), (1, "len".to_string())]
    );
}

#[test]
fn syntax_error_reports_position() {
    match parse_source("def f(:\n    pass\n", "bad.py") {
        Err(Error::Parse(p)) => {
            assert_eq!(p.line, 1);
            assert!(p.column >= 1);
            assert!(!p.message.is_empty());
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
}

// ---------------------------------------------------------------- executor

#[test]
fn p1_event_stream_matches_the_hook_contract() {
    let run = events_of(P1);
    assert_eq!(run.outcome.status, Status::Ok);
    let none = ValueSnapshot {
        repr: "None".into(),
        type_tag: "NoneType".into(),
        truncated: false,
    };
    let ab = vec![bind("a", "2"), bind("b", "3")];
    let abc = vec![bind("a", "2"), bind("b", "3"), bind("c", "5")];
    let ev = |seq, frame_id, parent, name: &str, line_no, payload| RawEvent {
        seq,
        frame_id,
        parent_frame_id: parent,
        function_name: name.into(),
        line_no,
        payload,
    };
    let expected = vec![
        ev(1, 0, None, "<module>", 1, EventPayload::Call { args: vec![] }),
        ev(2, 0, None, "<module>", 1, EventPayload::Line { locals: vec![] }),
        ev(3, 0, None, "<module>", 4, EventPayload::Line { locals: vec![] }),
        ev(4, 1, Some(0), "add", 1, EventPayload::Call { args: ab.clone() }),
        ev(5, 1, Some(0), "add", 2, EventPayload::Line { locals: ab }),
        ev(6, 1, Some(0), "add", 3, EventPayload::Line { locals: abc.clone() }),
        ev(
            7,
            1,
            Some(0),
            "add",
            3,
            EventPayload::Return {
                value: Some(int("5")),
                locals: abc,
                aborted: false,
            },
        ),
        ev(
            8,
            0,
            None,
            "<module>",
            4,
            EventPayload::Return {
                value: Some(none),
                locals: vec![],
                aborted: false,
            },
        ),
    ];
    assert_eq!(run.events, expected);
}

#[test]
fn p1_frames_are_module_and_add_only() {
    let run = events_of(P1);
    let mut names: Vec<_> = run.events.iter().map(|e| e.function_name.as_str()).collect();
    names.dedup();
    names.sort();
    names.dedup();
    assert_eq!(names, vec!["<module>", "add"]);
}

#[test]
fn empty_snippet_yields_call_and_return() {
    let run = events_of("");
    let kinds: Vec<_> = run.events.iter().map(RawEvent::kind).collect();
    assert_eq!(kinds, vec![EventKind::Call, EventKind::Return]);
    assert_eq!(run.outcome.status, Status::Ok);
}

#[test]
fn uncalled_function_body_is_silent() {
    let run = events_of("def f(x):\n    y = x\n    return y\nz = 1\n");
    assert!(run.events.iter().all(|e| e.function_name == "<module>"));
    assert!(run.events.iter().all(|e| e.line_no != 2 && e.line_no != 3));
}

#[test]
fn while_true_stops_at_exactly_the_event_cap() {
    let limits = ExecLimits {
        max_events: 1000,
        ..ExecLimits::default()
    };
    let run = execute_traced(&instrument("while True:\n    pass\n", limits).unwrap());
    assert_eq!(run.outcome.status, Status::Limit);
    assert_eq!(run.events.len(), 1000);
}

#[test]
fn division_by_zero_is_an_error_outcome() {
    let run = events_of("1/0\n");
    assert_eq!(run.outcome.status, Status::Error);
    let exc = run
        .events
        .iter()
        .find_map(|e| match &e.payload {
            EventPayload::Exception { type_name, line, .. } => Some((type_name.clone(), *line)),
            _ => None,
        })
        .expect("exception event");
    assert_eq!(exc, ("ZeroDivisionError".to_string(), 1));
    let last = run.events.last().unwrap();
    assert!(matches!(last.payload, EventPayload::Return { aborted: true, .. }));
}

#[test]
fn snapshot_examples() {
    let limits = ExecLimits::default();
    assert_eq!(snapshot_value(&Value::Int(5), &limits), int("5"));
    let nested = Value::list(vec![
        Value::Int(1),
        Value::list(vec![
            Value::Int(2),
            Value::list(vec![Value::Int(3), Value::list(vec![Value::Int(4)])]),
        ]),
    ]);
    let s = snapshot_value(&nested, &limits);
    assert_eq!(s.repr, "[1, [2, [3, …]]]");
    assert!(s.truncated);
    let e = snapshot_value(&Value::str(""), &limits);
    assert_eq!((e.repr.as_str(), e.type_tag.as_str(), e.truncated), ("''", "str", false));
}

// ---------------------------------------------------------------- compiler

#[test]
fn p1_call_tree() {
    let doc = trace_text(P1, "p1.py");
    assert_eq!(doc.root.name, "<module>");
    let kids = doc.root.children();
    assert_eq!(kids.len(), 1);
    let add = kids[0];
    assert_eq!(add.name, "add");
    assert_eq!(add.caller.as_deref(), Some("<module>"));
    assert_eq!(add.args, vec![bind("a", "2"), bind("b", "3")]);
    assert_eq!(add.return_value, Some(int("5")));
}

fn shape(n: &CallNode) -> String {
    let args: Vec<_> = n.args.iter().map(|b| b.value.repr.clone()).collect();
    let kids: Vec<_> = n.children().into_iter().map(shape).collect();
    if kids.is_empty() {
        format!("{}({})", n.name, args.join(","))
    } else {
        format!("{}({}){{{}}}", n.name, args.join(","), kids.join(", "))
    }
}

#[test]
fn p3_call_tree_shape() {
    let doc = trace_text(P3, "p3.py");
    let kids = doc.root.children();
    assert_eq!(kids.len(), 1);
    assert_eq!(shape(kids[0]), "fib(3){fib(2){fib(1), fib(0)}, fib(1)}");
    assert_eq!(kids[0].return_value, Some(int("2")));
    assert_eq!(doc.call_count(), 6);
    let fibs = doc.root.descendants().into_iter().filter(|n| n.name == "fib").count();
    assert_eq!(fibs, 5);
}

#[test]
fn empty_snippet_tree_is_a_lone_module() {
    let doc = trace_text("", "empty.py");
    assert_eq!(doc.root.name, "<module>");
    assert!(doc.root.body.is_empty());
}

#[test]
fn p1_deltas() {
    let doc = trace_text(P1, "p1.py");
    let recs = frame_records(&doc.root, "add");
    assert_eq!(recs.len(), 2);
    assert_eq!(recs[0].line_no, 2);
    assert_eq!(deltas(recs[0]), pairs(&[("c", "5")]));
    assert_eq!(recs[1].line_no, 3);
    assert!(recs[1].deltas.is_empty());
}

#[test]
fn p2_deltas() {
    let doc = trace_text(P2, "p2.py");
    let recs = frame_records(&doc.root, "total");
    let got: Vec<_> = recs.iter().map(|r| (r.line_no, deltas(r))).collect();
    let expected = vec![
        (2, pairs(&[("s", "0")])),
        (3, pairs(&[("x", "1")])),
        (4, pairs(&[("s", "1")])),
        (3, pairs(&[("x", "2")])),
        (4, pairs(&[("s", "3")])),
        (3, vec![]),
        (5, vec![]),
    ];
    assert_eq!(got, expected);
}

#[test]
fn return_only_frame_has_one_empty_record() {
    let doc = trace_text("def seven():\n    return 7\nseven()\n", "r.py");
    let recs = frame_records(&doc.root, "seven");
    assert_eq!(recs.len(), 1);
    assert!(recs[0].deltas.is_empty());
}

#[test]
fn attribute_deltas_marks_removed_names() {
    let d = attribute_deltas(&[bind("a", "1")], &[]);
    assert_eq!(d.len(), 1);
    assert!(d[0].value.is_removed());
}

fn loop_shape(items: &[Item]) -> Vec<String> {
    items
        .iter()
        .map(|i| match i {
            Item::Line(l) => l.line_no.to_string(),
            Item::Call(c) => format!("call {}", c.name),
            Item::Loop(g) => format!(
                "loop@{}[{}]",
                g.header_line,
                g.iterations
                    .iter()
                    .map(|it| loop_shape(it).join(","))
                    .collect::<Vec<_>>()
                    .join(" | ")
            ),
        })
        .collect()
}

#[test]
fn p2_grouping_folds_the_exhaustion_pass_into_the_last_iteration() {
    let doc = trace_text(P2, "p2.py");
    let total = doc.root.children()[0];
    assert_eq!(loop_shape(&total.body), vec!["2", "loop@3[3,4 | 3,4,3]", "5"]);
}

#[test]
fn total_of_three_items_has_three_iterations() {
    let doc = trace_corpus("total3.py");
    let total = doc.root.children()[0];
    let groups: Vec<_> = total
        .body
        .iter()
        .filter_map(|i| match i {
            Item::Loop(g) => Some(g),
            _ => None,
        })
        .collect();
    assert_eq!(groups.len(), 1);
    assert_eq!(groups[0].iterations.len(), 3);
}

#[test]
fn body_without_loops_is_unchanged() {
    let doc = trace_text(P1, "p1.py");
    let add = doc.root.children()[0];
    let flat = add.body.clone();
    assert_eq!(group_iterations(flat.clone(), &[]), flat);
}

#[test]
fn nested_range_loops_group_two_by_two() {
    let doc = trace_corpus("nested_range.py");
    let outer = doc
        .root
        .descendants()
        .into_iter()
        .flat_map(|n| n.body.iter())
        .find_map(|i| match i {
            Item::Loop(g) => Some(g),
            _ => None,
        })
        .expect("outer loop");
    assert_eq!(outer.iterations.len(), 2);
    for it in &outer.iterations {
        let inner: Vec<_> = it
            .iter()
            .filter_map(|i| match i {
                Item::Loop(g) => Some(g),
                _ => None,
            })
            .collect();
        assert_eq!(inner.len(), 1);
        assert_eq!(inner[0].iterations.len(), 2);
    }
}

#[test]
fn limit_truncated_run_is_a_well_formed_partial_tree() {
    let limits = ExecLimits {
        max_events: 50,
        ..ExecLimits::default()
    };
    let doc = trace_source_limits(P3.replace("fib(3)", "fib(12)").as_str(), limits);
    assert_eq!(doc.outcome.status, Status::Limit);
    let (d, report) = from_json(&to_json(&doc)).unwrap();
    assert!(report.valid, "{:?}", report.violations);
    assert_eq!(d.unwrap(), doc);
}

fn trace_source_limits(text: &str, limits: ExecLimits) -> stepwise::TraceDocument {
    stepwise::trace_source(text, "t.py", limits).unwrap()
}

#[test]
fn history_of_loop_accumulator() {
    let doc = trace_text(P2, "p2.py");
    let total = doc.root.children()[0];
    let last = total.line_records().last().unwrap().step;
    let h = variable_history(&doc, total.id, "s", last).unwrap();
    let values: Vec<_> = h.entries.iter().map(|e| e.value.repr.as_str()).collect();
    assert_eq!(values, vec!["0", "1", "3"]);
}

#[test]
fn history_of_unchanged_parameter() {
    let doc = trace_text(P1, "p1.py");
    let add = doc.root.children()[0];
    for step in [add.line_records()[0].step - 1, 5, 6, u64::MAX] {
        let h = variable_history(&doc, add.id, "a", step).unwrap();
        let values: Vec<_> = h.entries.iter().map(|e| e.value.repr.as_str()).collect();
        assert_eq!(values, vec!["2"], "upto_step {step}");
    }
}

#[test]
fn history_errors() {
    let doc = trace_text(P1, "p1.py");
    let add = doc.root.children()[0];
    assert!(matches!(
        variable_history(&doc, add.id, "zzz", u64::MAX),
        Err(Error::UnknownVariable { .. })
    ));
    // a is bound at the call (step 4); c first by the record at step 5
    assert!(variable_history(&doc, add.id, "a", 3).is_err());
    assert!(variable_history(&doc, add.id, "c", 4).is_err());
    assert!(variable_history(&doc, add.id, "c", 5).is_ok());
    assert!(matches!(
        variable_history(&doc, 999, "a", u64::MAX),
        Err(Error::UnknownScope(999))
    ));
}

#[test]
fn quicksort_history_tracks_in_place_changes() {
    let doc = trace_corpus("quicksort.py");
    let top = doc.root.children()[0];
    let h = variable_history(&doc, top.id, "collection", u64::MAX).unwrap();
    assert!(h.entries.len() > 1, "{h:?}");
    let steps: Vec<_> = h.entries.iter().map(|e| e.step).collect();
    assert!(steps.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn malformed_streams_are_rejected() {
    let model = parse_source(P1, "p1.py").unwrap();
    let run = events_of(P1);
    let limits = ExecLimits::default();

    let mut gap = run.events.clone();
    gap.remove(3);
    assert!(matches!(
        compile_trace(&gap, &model, &run.outcome, &limits),
        Err(Error::MalformedStream(_))
    ));

    let mut orphan = run.events.clone();
    orphan.truncate(4);
    orphan[3].parent_frame_id = Some(42);
    assert!(matches!(
        compile_trace(&orphan, &model, &run.outcome, &limits),
        Err(Error::MalformedStream(_))
    ));

    let mut early_state = run.events.clone();
    early_state.truncate(2);
    if let EventPayload::Line { locals } = &mut early_state[1].payload {
        locals.push(bind("q", "1"));
    }
    assert!(matches!(
        compile_trace(&early_state, &model, &run.outcome, &limits),
        Err(Error::MalformedStream(_))
    ));
}

// ---------------------------------------------------------------- explainer

#[test]
fn explanation_examples() {
    let p1 = trace_text(P1, "p1.py");
    let add = frame_records(&p1.root, "add");
    assert_eq!(add[0].explanation, "Assigns the value of a + b to c; c is now 5.");
    assert_eq!(add[1].explanation, "Returns c with value 5 to <module>.");
    let p2 = trace_text(P2, "p2.py");
    let first_header = frame_records(&p2.root, "total")
        .into_iter()
        .find(|r| r.line_no == 3)
        .unwrap();
    assert_eq!(
        first_header.explanation,
        "Iterates over xs; this iteration binds x = 1."
    );
}

#[test]
fn builtin_doc_examples() {
    assert_eq!(builtin_doc("pop").unwrap().name, "pop");
    assert!(builtin_doc("definitely_not_a_builtin").is_none());
    assert!(!builtin_doc("len").unwrap().summary.is_empty());
    for name in [
        "len", "range", "print", "sum", "max", "min", "abs", "sorted", "enumerate", "zip",
        "append", "pop", "insert", "remove", "sort",
    ] {
        assert!(builtin_doc(name).is_some(), "{name}");
    }
}

// ---------------------------------------------------------------- emitter

#[test]
fn p1_json_equals_golden() {
    let golden = std::fs::read_to_string(golden_dir().join("p1.trace.json")).unwrap();
    assert_eq!(to_json(&trace_corpus("p1.py")), golden);
}

#[test]
fn p2_compiles_deterministically() {
    assert_eq!(to_json(&trace_text(P2, "p2.py")), to_json(&trace_text(P2, "p2.py")));
    let doc = trace_text(P2, "p2.py");
    assert_eq!(to_html(&doc), to_html(&doc));
}

#[test]
fn decreasing_step_is_one_named_violation() {
    let json = to_json(&trace_text(P1, "p1.py"));
    let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
    v["root"]["body"][2]["body"][1]["step"] = serde_json::json!(1);
    let (doc, report) = from_json(&serde_json::to_string(&v).unwrap()).unwrap();
    assert!(doc.is_none());
    assert!(!report.valid);
    assert_eq!(report.violations.len(), 1, "{:?}", report.violations);
    assert!(report.violations[0].path.contains("step"), "{}", report.violations[0]);
}

#[test]
fn truncated_bytes_are_malformed_input() {
    let json = to_json(&trace_text(P1, "p1.py"));
    assert!(matches!(
        from_json(&json[..json.len() / 2]),
        Err(Error::MalformedInput(_))
    ));
}

#[test]
fn html_examples() {
    let p1 = to_html(&trace_text(P1, "p1.py"));
    assert!(p1.contains("add(a=2, b=3) → 5"));
    let empty = to_html(&trace_text("", "empty.py"));
    assert!(empty.contains("&lt;module&gt;"));
    assert!(!empty.contains("class=\"row\""));
    let p2 = to_html(&trace_text(P2, "p2.py"));
    assert!(p2.contains("iteration 1 of 2"));
    assert!(p2.contains("iteration 2 of 2"));
    let t3 = to_html(&trace_corpus("total3.py"));
    assert!(t3.contains("iteration 1 of 3"));
    assert!(t3.contains("iteration 3 of 3"));
}

#[test]
fn html_has_no_external_resources_and_escapes_markup() {
    let src = "def f(s):\n    return s  # <b>bold</b>\nf('<script>alert(1)</script>')\n";
    let html = to_html(&trace_text(src, "x<y>.py"));
    assert!(!html.contains("<script"));
    assert!(!html.contains("<b>"));
    assert!(!html.contains("http://") && !html.contains("https://"));
    assert!(!html.contains(" src="));
}
