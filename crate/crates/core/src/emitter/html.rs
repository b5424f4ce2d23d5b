//! Static, self-contained HTML rendering of a trace.
//!
//! Every call is a collapsible `<details>` block titled with its signature
//! and result; rows show the line number, code, comment, value changes and
//! explanation; loop iterations are labelled `iteration k of n`. Styles are
//! inline and nothing is fetched from elsewhere.

use std::fmt::Write as _;

use crate::document::{Binding, CallNode, Item, LineRecord, LoopGroup, Status, TraceDocument};
use crate::explainer::BuiltinDocs;
use crate::frontend::{builtin_references, parse_source, MODULE_NAME};

/// Calls nested deeper than this start collapsed.
const OPEN_DEPTH: usize = 3;

const STYLE: &str = r#"
body { font-family: system-ui, sans-serif; margin: 2rem auto; max-width: 70rem; color: #1d232a; line-height: 1.4; }
h1 { font-size: 1.4rem; } h2 { font-size: 1.1rem; margin-top: 2rem; }
code, pre { font-family: ui-monospace, Menlo, Consolas, monospace; font-size: 0.9rem; }
pre.source { background: #f5f7f9; padding: 0.75rem; overflow-x: auto; }
pre.source .ln { color: #8a939c; display: inline-block; width: 3ch; text-align: right; margin-right: 1ch; user-select: none; }
.outcome { font-weight: 600; } .status-ok { color: #1a7f37; } .status-error { color: #b42318; } .status-limit { color: #9a6700; }
details.call { border-left: 3px solid #4c7bd9; margin: 0.4rem 0 0.4rem 0.6rem; padding-left: 0.6rem; }
details.call > summary { cursor: pointer; font-family: ui-monospace, Menlo, Consolas, monospace; font-weight: 600; }
.row { display: grid; grid-template-columns: 3ch minmax(12rem, 1fr) minmax(10rem, 1fr); column-gap: 1rem; padding: 0.2rem 0; border-bottom: 1px solid #eef0f2; }
.row .ln { color: #8a939c; text-align: right; }
.row .comment { color: #6a737d; font-style: italic; margin-left: 1ch; }
.row .deltas { font-family: ui-monospace, Menlo, Consolas, monospace; color: #5b3cc4; }
.row .explain { grid-column: 2 / 4; color: #38424c; font-size: 0.9rem; }
.loop { border: 1px dashed #c3cad1; margin: 0.4rem 0; padding: 0.3rem 0.6rem; }
.loop > .loop-head { font-size: 0.85rem; color: #6a737d; }
details.iteration > summary { cursor: pointer; font-size: 0.85rem; color: #4a545e; }
.exception { color: #b42318; font-weight: 600; }
dl.legend dt { font-family: ui-monospace, Menlo, Consolas, monospace; font-weight: 600; }
dl.legend dd { margin: 0 0 0.5rem 1.5rem; }
"#;

/// Escapes text for element content and attribute values.
pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

/// Renders `doc` with a legend drawn from the bundled builtin table.
pub fn to_html(doc: &TraceDocument) -> String {
    to_html_with(doc, BuiltinDocs::bundled())
}

/// Renders `doc`, describing builtins with `docs`.
pub fn to_html_with(doc: &TraceDocument, docs: &BuiltinDocs) -> String {
    let mut out = String::new();
    let path = escape(&doc.source.path);
    let _ = write!(
        out,
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n\
         <title>Worked example: {path}</title>\n<style>{STYLE}</style>\n</head>\n<body>\n\
         <header>\n<h1>Worked example: {path}</h1>\n"
    );
    let status = doc.outcome.status;
    let _ = write!(
        out,
        "<p class=\"outcome status-{s}\">Outcome: {s}",
        s = status.as_str()
    );
    if let Some(detail) = &doc.outcome.detail {
        let _ = write!(out, " — {}", escape(detail));
    }
    out.push_str("</p>\n");
    if status == Status::Limit {
        out.push_str("<p>The run was stopped by a resource limit; the trace below is partial.</p>\n");
    }
    out.push_str("</header>\n");

    out.push_str("<section>\n<h2>Source</h2>\n<pre class=\"source\">");
    for (i, line) in doc.source.lines.iter().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        let _ = writeln!(out, "<span class=\"ln\">{}</span>{}", i + 1, escape(line));
    }
    out.push_str("</pre>\n</section>\n");

    out.push_str("<section>\n<h2>Execution</h2>\n");
    render_call(&mut out, &doc.root, 0);
    out.push_str("</section>\n");

    let legend = legend_entries(doc, docs);
    if !legend.is_empty() {
        out.push_str("<section>\n<h2>Builtins used</h2>\n<dl class=\"legend\">\n");
        for (name, summary) in legend {
            let _ = writeln!(
                out,
                "<dt>{}</dt><dd>{}</dd>",
                escape(&name),
                escape(&summary)
            );
        }
        out.push_str("</dl>\n</section>\n");
    }
    out.push_str("</body>\n</html>\n");
    out
}

/// Documented builtins referenced by the source, first use first.
fn legend_entries(doc: &TraceDocument, docs: &BuiltinDocs) -> Vec<(String, String)> {
    let Ok(model) = parse_source(&doc.source.lines.join("\n"), &doc.source.path) else {
        return Vec::new();
    };
    let mut seen = Vec::new();
    for (_, name) in builtin_references(&model) {
        if seen.iter().any(|(n, _)| *n == name) {
            continue;
        }
        if let Some(entry) = docs.get(&name) {
            seen.push((name, entry.summary));
        }
    }
    seen
}

fn call_title(node: &CallNode) -> String {
    if node.name == MODULE_NAME && node.caller.is_none() {
        return MODULE_NAME.to_string();
    }
    let sig = node.signature();
    match (&node.return_value, &node.exception) {
        (Some(v), _) => format!("{sig} → {}", v.repr),
        (None, Some(e)) => format!("{sig} raised {}", e.type_name),
        (None, None) => sig,
    }
}

fn render_call(out: &mut String, node: &CallNode, depth: usize) {
    let open = if depth < OPEN_DEPTH { " open" } else { "" };
    let _ = writeln!(
        out,
        "<details class=\"call\" id=\"call-{}\"{open}>\n<summary>{}</summary>",
        node.id,
        escape(&call_title(node))
    );
    render_items(out, &node.body, depth);
    if let Some(e) = &node.exception {
        let _ = writeln!(
            out,
            "<p class=\"exception\">{}: {} (line {})</p>",
            escape(&e.type_name),
            escape(&e.message),
            e.line
        );
    }
    out.push_str("</details>\n");
}

fn render_items(out: &mut String, items: &[Item], depth: usize) {
    for item in items {
        match item {
            Item::Line(r) => render_line(out, r),
            Item::Call(c) => render_call(out, c, depth + 1),
            Item::Loop(g) => render_loop(out, g, depth),
        }
    }
}

fn render_loop(out: &mut String, group: &LoopGroup, depth: usize) {
    let kind = match group.loop_kind {
        crate::frontend::LoopKind::For => "for",
        crate::frontend::LoopKind::While => "while",
    };
    let n = group.iterations.len();
    let _ = writeln!(
        out,
        "<div class=\"loop\">\n<div class=\"loop-head\">{kind} loop at line {}, {n} iteration{}</div>",
        group.header_line,
        if n == 1 { "" } else { "s" }
    );
    for (k, it) in group.iterations.iter().enumerate() {
        let _ = writeln!(
            out,
            "<details class=\"iteration\" open>\n<summary>iteration {} of {n}</summary>",
            k + 1
        );
        render_items(out, it, depth);
        out.push_str("</details>\n");
    }
    out.push_str("</div>\n");
}

fn deltas_text(deltas: &[Binding]) -> String {
    deltas
        .iter()
        .map(|d| {
            if d.value.is_removed() {
                format!("{} removed", d.name)
            } else {
                format!("{} = {}", d.name, d.value.repr)
            }
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn render_line(out: &mut String, r: &LineRecord) {
    let _ = write!(
        out,
        "<div class=\"row\" id=\"step-{}\"><span class=\"ln\">{}</span><span><code>{}</code>",
        r.step,
        r.line_no,
        escape(r.code.trim_end())
    );
    if let Some(c) = &r.comment {
        let _ = write!(out, "<span class=\"comment\"># {}</span>", escape(c));
    }
    let _ = writeln!(
        out,
        "</span><span class=\"deltas\">{}</span><span class=\"explain\">{}</span></div>",
        escape(&deltas_text(&r.deltas)),
        escape(&r.explanation)
    );
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_markup_characters() {
        assert_eq!(escape("<a href=\"x\">&'"), "&lt;a href=&quot;x&quot;&gt;&amp;&#39;");
    }
}
