//! Regrouping a frame's flat body into loop iterations.

use crate::document::{Item, LoopGroup};
use crate::frontend::{nested_in, outermost, LoopExtent};

/// Groups `items` (one frame's body, in execution order) by the loops in
/// `loops`, which must all belong to that frame's scope.
///
/// A new iteration starts at every line record of the loop header. The
/// final header evaluation that ends the loop (the exhausted `for` fetch or
/// the false `while` test) carries no body, so it is folded into the last
/// iteration: a loop over `n` items yields `n` iterations. A loop whose body
/// never ran keeps a single header-only iteration. Nested calls stay with
/// the line record that triggered them.
pub fn group_iterations(items: Vec<Item>, loops: &[LoopExtent]) -> Vec<Item> {
    if loops.is_empty() {
        return items;
    }
    let tops = outermost(loops);
    let mut out = Vec::with_capacity(items.len());
    let mut iter = items.into_iter().peekable();
    while let Some(item) = iter.next() {
        let header = match &item {
            Item::Line(l) => tops.iter().find(|t| t.header_line == l.line_no).copied(),
            _ => None,
        };
        let Some(extent) = header else {
            out.push(item);
            continue;
        };
        let mut run = vec![item];
        while let Some(next) = iter.peek() {
            let belongs = match next {
                Item::Line(l) => extent.contains(l.line_no),
                Item::Call(_) => true,
                Item::Loop(g) => extent.contains(g.header_line),
            };
            if !belongs {
                break;
            }
            run.push(iter.next().expect("peeked"));
        }
        out.push(Item::Loop(build_group(run, extent, loops)));
    }
    out
}

fn is_header(item: &Item, header: u32) -> bool {
    matches!(item, Item::Line(l) if l.line_no == header)
}

fn build_group(run: Vec<Item>, extent: &LoopExtent, loops: &[LoopExtent]) -> LoopGroup {
    let mut iterations: Vec<Vec<Item>> = Vec::new();
    for item in run {
        if is_header(&item, extent.header_line) || iterations.is_empty() {
            iterations.push(Vec::new());
        }
        iterations.last_mut().expect("just pushed").push(item);
    }
    let trailing_header_only = iterations.len() > 1
        && iterations
            .last()
            .is_some_and(|it| it.iter().filter(|i| matches!(i, Item::Line(_))).count() == 1);
    if trailing_header_only {
        let last = iterations.pop().expect("len > 1");
        iterations
            .last_mut()
            .expect("len > 1")
            .extend(last);
    }
    let inner = nested_in(loops, extent);
    let iterations = iterations
        .into_iter()
        .map(|it| group_iterations(it, &inner))
        .collect();
    LoopGroup {
        header_line: extent.header_line,
        loop_kind: extent.kind,
        iterations,
    }
}
