#![allow(dead_code)]

pub mod invariants;

use std::path::PathBuf;

use stepwise::{trace_source, ExecLimits, TraceDocument};

pub const CORPUS: [&str; 6] = [
    "quicksort.py",
    "fibonacci.py",
    "max_profit.py",
    "rod_cutting.py",
    "lcs.py",
    "subsets.py",
];

pub const GOLDEN: [&str; 4] = ["p1", "p2", "p3", "quicksort"];

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn corpus_text(name: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(name))
        .unwrap_or_else(|e| panic!("cannot read corpus file {name}: {e}"))
}

/// Traces a corpus file under default limits, recording its bare file name
/// as the source path so documents do not depend on the checkout location.
pub fn trace_corpus(name: &str) -> TraceDocument {
    trace_text(&corpus_text(name), name)
}

pub fn trace_text(text: &str, path: &str) -> TraceDocument {
    trace_source(text, path, ExecLimits::default())
        .unwrap_or_else(|e| panic!("tracing {path} failed: {e}"))
}

pub const P1: &str = "def add(a, b):\n    c = a + b  # sum\n    return c\nadd(2, 3)\n";
pub const P2: &str =
    "def total(xs):\n    s = 0\n    for x in xs:\n        s = s + x\n    return s\ntotal([1, 2])\n";
pub const P3: &str =
    "def fib(n):\n    if n < 2:\n        return n\n    return fib(n - 1) + fib(n - 2)\nfib(3)\n";
