//! Runs a parsed snippet under a trace hook.
//!
//! The hook fires one `call` event when a frame opens, one `line` event
//! immediately before each statement executes, and one `return` event when
//! the frame exits. An uncaught error produces a single `exception` event
//! followed by aborted `return` events for every open frame, innermost
//! first. Values are rendered into [`ValueSnapshot`]s at event time, so later
//! mutation cannot change what an earlier event recorded.

mod builtins;
mod interp;
pub mod snapshot;
pub mod value;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::document::{Binding, Outcome, ValueSnapshot};
use crate::error::{Error, Result};
use crate::frontend::{self, ast::Program};

pub use snapshot::snapshot_value;

/// Deepest call stack a run may request; bounds host stack usage.
pub const MAX_DEPTH_CEILING: u64 = 5_000;

/// Largest event budget a run may request; bounds memory, since every
/// event is kept and serialized.
pub const MAX_EVENTS_CEILING: u64 = 1_000_000;

/// Stack reserved for the interpreter thread.
const INTERPRETER_STACK_BYTES: usize = 1 << 30;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExecLimits {
    pub max_events: u64,
    pub max_depth: u64,
    /// Wall-clock budget for the whole run, in seconds.
    pub timeout: f64,
    pub snapshot_max_len: u64,
    pub snapshot_max_depth: u64,
}

impl Default for ExecLimits {
    fn default() -> Self {
        ExecLimits {
            max_events: 100_000,
            max_depth: 50,
            timeout: 10.0,
            snapshot_max_len: 120,
            snapshot_max_depth: 3,
        }
    }
}

impl ExecLimits {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("max_events", self.max_events),
            ("max_depth", self.max_depth),
            ("snapshot_max_len", self.snapshot_max_len),
            ("snapshot_max_depth", self.snapshot_max_depth),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::InvalidLimits(format!("{name} must be positive")));
            }
        }
        if !(self.timeout.is_finite() && self.timeout > 0.0) {
            return Err(Error::InvalidLimits(
                "timeout must be a positive number of seconds".into(),
            ));
        }
        if self.max_events > MAX_EVENTS_CEILING {
            return Err(Error::InvalidLimits(format!(
                "max_events may not exceed {MAX_EVENTS_CEILING}"
            )));
        }
        if self.max_depth > MAX_DEPTH_CEILING {
            return Err(Error::InvalidLimits(format!(
                "max_depth may not exceed {MAX_DEPTH_CEILING}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Call,
    Line,
    Return,
    Exception,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EventPayload {
    Call {
        args: Vec<Binding>,
    },
    Line {
        locals: Vec<Binding>,
    },
    Return {
        /// Absent when the frame was aborted by an uncaught error.
        value: Option<ValueSnapshot>,
        locals: Vec<Binding>,
        aborted: bool,
    },
    Exception {
        type_name: String,
        message: String,
        line: u32,
        locals: Vec<Binding>,
    },
}

/// One hook firing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawEvent {
    /// Starts at 1, strictly increasing, gapless.
    pub seq: u64,
    pub frame_id: u64,
    pub parent_frame_id: Option<u64>,
    pub function_name: String,
    pub line_no: u32,
    pub payload: EventPayload,
}

impl RawEvent {
    pub fn kind(&self) -> EventKind {
        match self.payload {
            EventPayload::Call { .. } => EventKind::Call,
            EventPayload::Line { .. } => EventKind::Line,
            EventPayload::Return { .. } => EventKind::Return,
            EventPayload::Exception { .. } => EventKind::Exception,
        }
    }

    /// Visible locals carried by line, return and exception events.
    pub fn locals(&self) -> Option<&[Binding]> {
        match &self.payload {
            EventPayload::Call { .. } => None,
            EventPayload::Line { locals }
            | EventPayload::Return { locals, .. }
            | EventPayload::Exception { locals, .. } => Some(locals),
        }
    }
}

/// A parsed snippet bound to the limits it will run under.
#[derive(Debug, Clone)]
pub struct ExecutablePlan {
    pub(crate) program: Arc<Program>,
    pub limits: ExecLimits,
    pub(crate) line_count: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub events: Vec<RawEvent>,
    pub outcome: Outcome,
    /// Text the snippet printed.
    pub stdout: String,
}

pub fn instrument(text: &str, limits: ExecLimits) -> Result<ExecutablePlan> {
    limits.validate()?;
    let (program, _) = frontend::parse_program(text, "<snippet>")?;
    Ok(ExecutablePlan {
        program: Arc::new(program),
        limits,
        line_count: frontend::split_lines(text).len() as u32,
    })
}

/// Runs the plan to completion, error, or limit. Never fails: every kind of
/// termination is reported through [`Execution::outcome`].
pub fn execute_traced(plan: &ExecutablePlan) -> Execution {
    let plan = plan.clone();
    let handle = std::thread::Builder::new()
        .name("traced-snippet".into())
        .stack_size(INTERPRETER_STACK_BYTES)
        .spawn(move || interp::run(&plan));
    match handle.map(|h| h.join()) {
        Ok(Ok(execution)) => execution,
        Ok(Err(panic)) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            internal_failure(format!("interpreter failure: {msg}"))
        }
        Err(e) => internal_failure(format!("could not start interpreter thread: {e}")),
    }
}

fn internal_failure(detail: String) -> Execution {
    Execution {
        events: Vec::new(),
        outcome: Outcome {
            status: crate::document::Status::Error,
            detail: Some(detail),
        },
        stdout: String::new(),
    }
}
