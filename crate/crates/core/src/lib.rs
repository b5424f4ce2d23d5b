//! Trace single-file snippets of a small Python-like language and compile
//! the recorded call/line/return events into a nested worked example.
//!
//! The pipeline is `frontend` (static facts) → `executor` (traced run) →
//! `compiler` (call tree, deltas, loop grouping, histories) → `explainer`
//! (per-line text) → `emitter` (trace JSON and static HTML).

pub mod compiler;
pub mod document;
pub mod emitter;
pub mod error;
pub mod executor;
pub mod explainer;
pub mod frontend;

pub use compiler::{compile_trace, variable_history, VariableHistory};
pub use document::{
    Binding, CallNode, ExceptionInfo, Item, LineRecord, LoopGroup, Outcome, SourceText, Status,
    TraceDocument, ValueSnapshot, SCHEMA_TAG,
};
pub use error::{Error, Result};
pub use executor::{execute_traced, instrument, EventKind, ExecLimits, Execution, RawEvent};
pub use frontend::{parse_source, SourceModel};

/// Parses, runs and compiles `text` in one step.
pub fn trace_source(text: &str, path: &str, limits: ExecLimits) -> Result<TraceDocument> {
    let model = frontend::parse_source(text, path)?;
    let plan = instrument(text, limits)?;
    let run = execute_traced(&plan);
    compile_trace(&run.events, &model, &run.outcome, &plan.limits)
}
