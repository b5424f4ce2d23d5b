//! Tree-walking evaluator that fires the trace hook.

use std::cell::RefCell;
use std::rc::Rc;
use std::sync::Arc;
use std::time::{Duration, Instant};

use super::snapshot::{display_string, snapshot_value};
use super::value::*;
use super::{EventPayload, ExecLimits, ExecutablePlan, Execution, RawEvent};
use crate::document::{Binding, Outcome, Status};
use crate::frontend::ast::*;
use crate::frontend::MODULE_NAME;

/// Cap on captured program output.
const MAX_STDOUT_BYTES: usize = 1 << 20;

pub(super) fn run(plan: &ExecutablePlan) -> Execution {
    let mut interp = Interp::new(&plan.limits);
    let outcome = interp.run_module(&plan.program, plan.line_count);
    Execution {
        events: interp.events,
        outcome,
        stdout: interp.stdout,
    }
}

pub(super) enum Halt {
    Error(Exc),
    Limit(String),
}

impl From<Exc> for Halt {
    fn from(e: Exc) -> Self {
        Halt::Error(e)
    }
}

pub(super) type Eval<T> = Result<T, Halt>;

enum Flow {
    Normal,
    Return(Value),
    Break,
    Continue,
}

struct Frame {
    id: u64,
    name: String,
    locals: Vec<(String, Value)>,
    line: u32,
}

pub(super) struct Interp<'a> {
    limits: &'a ExecLimits,
    events: Vec<RawEvent>,
    frames: Vec<Frame>,
    next_frame: u64,
    deadline: Option<Instant>,
    pub(super) stdout: String,
    ticks: u32,
}

/// Iteration state for `for` loops; lists are read live so that appends
/// made by the body are visited.
enum Iter {
    List(Rc<RefCell<Vec<Value>>>, usize),
    Items(std::vec::IntoIter<Value>),
    Range { next: i64, step: i64, remaining: i64 },
}

impl Iterator for Iter {
    type Item = Value;

    fn next(&mut self) -> Option<Value> {
        match self {
            Iter::List(l, i) => {
                let v = l.borrow().get(*i).cloned();
                *i += 1;
                v
            }
            Iter::Items(it) => it.next(),
            Iter::Range {
                next,
                step,
                remaining,
            } => {
                if *remaining <= 0 {
                    return None;
                }
                let v = *next;
                *remaining -= 1;
                *next = next.wrapping_add(*step);
                Some(Value::Int(v))
            }
        }
    }
}

impl<'a> Interp<'a> {
    fn new(limits: &'a ExecLimits) -> Self {
        let deadline = Duration::try_from_secs_f64(limits.timeout)
            .ok()
            .and_then(|d| Instant::now().checked_add(d));
        Interp {
            limits,
            events: Vec::new(),
            frames: Vec::new(),
            next_frame: 0,
            deadline,
            stdout: String::new(),
            ticks: 0,
        }
    }

    fn run_module(&mut self, program: &Program, line_count: u32) -> Outcome {
        let first_line = u32::from(line_count > 0);
        self.frames.push(Frame {
            id: self.next_frame,
            name: MODULE_NAME.to_string(),
            locals: Vec::new(),
            line: first_line,
        });
        self.next_frame += 1;
        match self.module_body(program, first_line) {
            Ok(()) => Outcome::ok(),
            Err(Halt::Limit(reason)) => Outcome {
                status: Status::Limit,
                detail: Some(reason),
            },
            Err(Halt::Error(exc)) => {
                let line = self.frames.last().map(|f| f.line).unwrap_or(0);
                let locals = self.visible_locals();
                self.push_event(
                    EventPayload::Exception {
                        type_name: exc.type_name.to_string(),
                        message: exc.message.clone(),
                        line,
                        locals,
                    },
                    line,
                );
                while let Some(frame) = self.frames.last() {
                    let line = frame.line;
                    let locals = self.visible_locals();
                    self.push_event(
                        EventPayload::Return {
                            value: None,
                            locals,
                            aborted: true,
                        },
                        line,
                    );
                    self.frames.pop();
                }
                Outcome {
                    status: Status::Error,
                    detail: Some(format!("{}: {} (line {line})", exc.type_name, exc.message)),
                }
            }
        }
    }

    fn module_body(&mut self, program: &Program, first_line: u32) -> Eval<()> {
        self.emit(EventPayload::Call { args: Vec::new() }, first_line)?;
        self.exec_block(&program.body)?;
        let line = self.frame().line;
        let value = Some(snapshot_value(&Value::None, self.limits));
        let locals = self.visible_locals();
        self.emit(
            EventPayload::Return {
                value,
                locals,
                aborted: false,
            },
            line,
        )?;
        self.frames.pop();
        Ok(())
    }

    // ---- hook ----

    fn frame(&self) -> &Frame {
        self.frames.last().expect("a frame is always open while running")
    }

    fn frame_mut(&mut self) -> &mut Frame {
        self.frames
            .last_mut()
            .expect("a frame is always open while running")
    }

    /// Snapshot of the current frame's locals. The module frame hides
    /// function bindings, which are static program structure.
    fn visible_locals(&self) -> Vec<Binding> {
        let Some(frame) = self.frames.last() else {
            return Vec::new();
        };
        let module = self.frames.len() == 1;
        frame
            .locals
            .iter()
            .filter(|(_, v)| !(module && v.is_callable()))
            .map(|(n, v)| Binding::new(n.clone(), snapshot_value(v, self.limits)))
            .collect()
    }

    fn check_time(&self) -> Eval<()> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(Halt::Limit(format!(
                "timeout of {}s exceeded",
                self.limits.timeout
            ))),
            _ => Ok(()),
        }
    }

    /// Periodic deadline check for work that does not fire events.
    pub(super) fn tick(&mut self) -> Eval<()> {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks.is_multiple_of(1024) {
            self.check_time()?;
        }
        Ok(())
    }

    fn emit(&mut self, payload: EventPayload, line_no: u32) -> Eval<()> {
        if self.events.len() as u64 >= self.limits.max_events {
            return Err(Halt::Limit(format!(
                "event limit of {} reached",
                self.limits.max_events
            )));
        }
        self.check_time()?;
        self.push_event(payload, line_no);
        Ok(())
    }

    /// Appends an event without checking limits; used for the terminal
    /// exception bookkeeping.
    fn push_event(&mut self, payload: EventPayload, line_no: u32) {
        let n = self.frames.len();
        let frame = &self.frames[n - 1];
        let parent_frame_id = n.checked_sub(2).map(|i| self.frames[i].id);
        self.events.push(RawEvent {
            seq: self.events.len() as u64 + 1,
            frame_id: frame.id,
            parent_frame_id,
            function_name: frame.name.clone(),
            line_no,
            payload,
        });
    }

    fn line(&mut self, line: u32) -> Eval<()> {
        self.frame_mut().line = line;
        let locals = self.visible_locals();
        self.emit(EventPayload::Line { locals }, line)
    }

    // ---- variables ----

    fn lookup(&self, name: &str) -> Result<Value, Exc> {
        let find = |f: &Frame| {
            f.locals
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, v)| v.clone())
        };
        if let Some(v) = find(self.frame()) {
            return Ok(v);
        }
        if self.frames.len() > 1 {
            if let Some(v) = find(&self.frames[0]) {
                return Ok(v);
            }
        }
        if let Some(b) = Builtin::from_name(name) {
            return Ok(Value::Builtin(b));
        }
        Err(Exc::new(
            "NameError",
            format!("name '{name}' is not defined"),
        ))
    }

    fn set_local(&mut self, name: &str, value: Value) {
        let frame = self.frame_mut();
        match frame.locals.iter_mut().find(|(n, _)| n == name) {
            Some(slot) => slot.1 = value,
            None => frame.locals.push((name.to_string(), value)),
        }
    }

    fn del_local(&mut self, name: &str) -> Result<(), Exc> {
        let frame = self.frame_mut();
        match frame.locals.iter().position(|(n, _)| n == name) {
            Some(i) => {
                frame.locals.remove(i);
                Ok(())
            }
            None => Err(Exc::new(
                "NameError",
                format!("name '{name}' is not defined"),
            )),
        }
    }

    // ---- statements ----

    fn exec_block(&mut self, body: &[Stmt]) -> Eval<Flow> {
        for stmt in body {
            match self.exec_stmt(stmt)? {
                Flow::Normal => {}
                other => return Ok(other),
            }
        }
        Ok(Flow::Normal)
    }

    fn exec_stmt(&mut self, stmt: &Stmt) -> Eval<Flow> {
        match &stmt.kind {
            // constant expression statements (docstrings) compile to nothing
            StmtKind::Expr(e) if e.is_constant() => Ok(Flow::Normal),
            StmtKind::Expr(e) => {
                self.line(stmt.line)?;
                self.eval(e)?;
                Ok(Flow::Normal)
            }
            StmtKind::Def(f) => {
                self.line(stmt.line)?;
                self.set_local(&f.name, Value::Function(Arc::clone(f)));
                Ok(Flow::Normal)
            }
            StmtKind::Assign { targets, value } => {
                self.line(stmt.line)?;
                let v = self.eval(value)?;
                for t in targets {
                    self.assign(t, v.clone())?;
                }
                Ok(Flow::Normal)
            }
            StmtKind::AugAssign { target, op, value } => {
                self.line(stmt.line)?;
                self.aug_assign(target, *op, value)?;
                Ok(Flow::Normal)
            }
            StmtKind::If { branches, orelse } => {
                for b in branches {
                    self.line(b.line)?;
                    if self.eval(&b.cond)?.truthy() {
                        return self.exec_block(&b.body);
                    }
                }
                match orelse {
                    Some(body) => self.exec_block(body),
                    None => Ok(Flow::Normal),
                }
            }
            StmtKind::For { target, iter, body } => {
                self.line(stmt.line)?;
                let iterable = self.eval(iter)?;
                for item in make_iter(&iterable)? {
                    self.assign(target, item)?;
                    match self.exec_block(body)? {
                        Flow::Break => return Ok(Flow::Normal),
                        r @ Flow::Return(_) => return Ok(r),
                        Flow::Normal | Flow::Continue => {}
                    }
                    self.line(stmt.line)?;
                }
                Ok(Flow::Normal)
            }
            StmtKind::While { cond, body } => loop {
                self.line(stmt.line)?;
                if !self.eval(cond)?.truthy() {
                    return Ok(Flow::Normal);
                }
                match self.exec_block(body)? {
                    Flow::Break => return Ok(Flow::Normal),
                    r @ Flow::Return(_) => return Ok(r),
                    Flow::Normal | Flow::Continue => {}
                }
            },
            StmtKind::Return(value) => {
                self.line(stmt.line)?;
                let v = match value {
                    Some(e) => self.eval(e)?,
                    None => Value::None,
                };
                Ok(Flow::Return(v))
            }
            StmtKind::Del(targets) => {
                self.line(stmt.line)?;
                for t in targets {
                    self.delete(t)?;
                }
                Ok(Flow::Normal)
            }
            StmtKind::Pass => {
                self.line(stmt.line)?;
                Ok(Flow::Normal)
            }
            StmtKind::Break => {
                self.line(stmt.line)?;
                Ok(Flow::Break)
            }
            StmtKind::Continue => {
                self.line(stmt.line)?;
                Ok(Flow::Continue)
            }
        }
    }

    fn assign(&mut self, target: &Target, value: Value) -> Eval<()> {
        match &target.kind {
            TargetKind::Name(n) => {
                self.set_local(n, value);
                Ok(())
            }
            TargetKind::Index { obj, index } => {
                let o = self.eval(obj)?;
                let i = self.eval(index)?;
                set_index(&o, &i, value)?;
                Ok(())
            }
            TargetKind::Tuple(targets) => {
                let items = self.iterate(&value)?;
                if items.len() < targets.len() {
                    return Err(value_error(format!(
                        "not enough values to unpack (expected {}, got {})",
                        targets.len(),
                        items.len()
                    ))
                    .into());
                }
                if items.len() > targets.len() {
                    return Err(value_error(format!(
                        "too many values to unpack (expected {})",
                        targets.len()
                    ))
                    .into());
                }
                for (t, v) in targets.iter().zip(items) {
                    self.assign(t, v)?;
                }
                Ok(())
            }
        }
    }

    fn aug_assign(&mut self, target: &Target, op: BinOp, value: &Expr) -> Eval<()> {
        match &target.kind {
            TargetKind::Name(n) => {
                let current = self.lookup(n)?;
                let rhs = self.eval(value)?;
                let updated = self.in_place_op(op, &current, &rhs)?;
                self.set_local(n, updated);
            }
            TargetKind::Index { obj, index } => {
                let o = self.eval(obj)?;
                let i = self.eval(index)?;
                let current = get_index(&o, &i)?;
                let rhs = self.eval(value)?;
                let updated = self.in_place_op(op, &current, &rhs)?;
                set_index(&o, &i, updated)?;
            }
            TargetKind::Tuple(_) => {
                return Err(type_error("augmented assignment to a tuple").into());
            }
        }
        Ok(())
    }

    /// `xs += ys` extends a list in place, so aliases observe the change.
    fn in_place_op(&mut self, op: BinOp, current: &Value, rhs: &Value) -> Eval<Value> {
        if let (BinOp::Add, Value::List(l)) = (op, current) {
            let extra = self.iterate(rhs)?;
            if l.borrow().len() + extra.len() > MAX_SEQUENCE_LEN {
                return Err(Exc::new("MemoryError", "sequence would exceed the size limit").into());
            }
            l.borrow_mut().extend(extra);
            return Ok(current.clone());
        }
        Ok(binary_op(op, current, rhs)?)
    }

    fn delete(&mut self, target: &Target) -> Eval<()> {
        match &target.kind {
            TargetKind::Name(n) => Ok(self.del_local(n)?),
            TargetKind::Index { obj, index } => {
                let o = self.eval(obj)?;
                let i = self.eval(index)?;
                Ok(del_index(&o, &i)?)
            }
            TargetKind::Tuple(items) => {
                for t in items {
                    self.delete(t)?;
                }
                Ok(())
            }
        }
    }

    // ---- calls ----

    pub(super) fn call_function(&mut self, f: &Arc<FunctionDef>, args: Vec<Value>) -> Eval<Value> {
        if args.len() != f.params.len() {
            return Err(type_error(format!(
                "{}() takes {} positional argument{} but {} {} given",
                f.name,
                f.params.len(),
                if f.params.len() == 1 { "" } else { "s" },
                args.len(),
                if args.len() == 1 { "was" } else { "were" }
            ))
            .into());
        }
        if self.frames.len() as u64 >= self.limits.max_depth {
            return Err(Halt::Limit(format!(
                "call depth limit of {} reached",
                self.limits.max_depth
            )));
        }
        let locals: Vec<(String, Value)> = f.params.iter().cloned().zip(args).collect();
        let arg_snapshot = locals
            .iter()
            .map(|(n, v)| Binding::new(n.clone(), snapshot_value(v, self.limits)))
            .collect();
        self.frames.push(Frame {
            id: self.next_frame,
            name: f.name.clone(),
            locals,
            line: f.line,
        });
        self.next_frame += 1;
        self.emit(EventPayload::Call { args: arg_snapshot }, f.line)?;
        let result = match self.exec_block(&f.body)? {
            Flow::Return(v) => v,
            _ => Value::None,
        };
        let line = self.frame().line;
        let value = Some(snapshot_value(&result, self.limits));
        let locals = self.visible_locals();
        self.emit(
            EventPayload::Return {
                value,
                locals,
                aborted: false,
            },
            line,
        )?;
        self.frames.pop();
        Ok(result)
    }

    fn call_value(&mut self, callee: &Value, args: Vec<Value>) -> Eval<Value> {
        match callee {
            Value::Function(f) => self.call_function(f, args),
            Value::Builtin(b) => self.call_builtin(*b, args),
            other => Err(type_error(format!(
                "'{}' object is not callable",
                other.type_name()
            ))
            .into()),
        }
    }

    pub(super) fn write_stdout(&mut self, text: &str) {
        if self.stdout.len() + text.len() <= MAX_STDOUT_BYTES {
            self.stdout.push_str(text);
        }
    }

    // ---- expressions ----

    fn eval_all(&mut self, exprs: &[Expr]) -> Eval<Vec<Value>> {
        exprs.iter().map(|e| self.eval(e)).collect()
    }

    fn eval(&mut self, expr: &Expr) -> Eval<Value> {
        Ok(match &expr.kind {
            ExprKind::Int(i) => Value::Int(*i),
            ExprKind::Float(f) => Value::Float(*f),
            ExprKind::Str(s) => Value::str(s),
            ExprKind::Bool(b) => Value::Bool(*b),
            ExprKind::None => Value::None,
            ExprKind::Name(n) => self.lookup(n)?,
            ExprKind::List(items) => Value::list(self.eval_all(items)?),
            ExprKind::Tuple(items) => Value::tuple(self.eval_all(items)?),
            ExprKind::Dict(pairs) => {
                let mut d = Dict::default();
                for (k, v) in pairs {
                    let key = self.eval(k)?;
                    if !key.is_hashable() {
                        return Err(type_error(format!(
                            "unhashable type: '{}'",
                            key.type_name()
                        ))
                        .into());
                    }
                    let val = self.eval(v)?;
                    d.insert(key, val);
                }
                Value::Dict(Rc::new(RefCell::new(d)))
            }
            ExprKind::Binary { op, left, right } => {
                let l = self.eval(left)?;
                let r = self.eval(right)?;
                binary_op(*op, &l, &r)?
            }
            ExprKind::Unary { op, operand } => {
                let v = self.eval(operand)?;
                match op {
                    UnaryOp::Neg => negate(&v)?,
                    UnaryOp::Pos => positive(&v)?,
                    UnaryOp::Not => Value::Bool(!v.truthy()),
                }
            }
            ExprKind::BoolOp { and, left, right } => {
                let l = self.eval(left)?;
                if l.truthy() == *and {
                    self.eval(right)?
                } else {
                    l
                }
            }
            ExprKind::Compare { first, rest } => {
                let mut left = self.eval(first)?;
                for (op, right) in rest {
                    let r = self.eval(right)?;
                    if !compare(*op, &left, &r)? {
                        return Ok(Value::Bool(false));
                    }
                    left = r;
                }
                Value::Bool(true)
            }
            ExprKind::IfExp { cond, then, orelse } => {
                if self.eval(cond)?.truthy() {
                    self.eval(then)?
                } else {
                    self.eval(orelse)?
                }
            }
            ExprKind::Call { func, args } => {
                let callee = self.eval(func)?;
                let args = self.eval_all(args)?;
                self.call_value(&callee, args)?
            }
            ExprKind::Method { obj, name, args } => {
                let target = self.eval(obj)?;
                let args = self.eval_all(args)?;
                self.call_method(&target, name, args)?
            }
            ExprKind::Index { obj, index } => {
                let o = self.eval(obj)?;
                let i = self.eval(index)?;
                get_index(&o, &i)?
            }
            ExprKind::Slice {
                obj,
                lower,
                upper,
                step,
            } => {
                let o = self.eval(obj)?;
                let mut bound = |b: &Option<Box<Expr>>| -> Eval<Option<Value>> {
                    b.as_ref().map(|e| self.eval(e)).transpose()
                };
                let (lo, hi, st) = (bound(lower)?, bound(upper)?, bound(step)?);
                get_slice(&o, lo.as_ref(), hi.as_ref(), st.as_ref())?
            }
        })
    }

    /// Materializes an iterable, charging each element against the deadline.
    pub(super) fn iterate(&mut self, v: &Value) -> Eval<Vec<Value>> {
        if let r @ Value::Range { .. } = v {
            if range_len(r) as usize > MAX_SEQUENCE_LEN {
                return Err(Exc::new("MemoryError", "sequence would exceed the size limit").into());
            }
        }
        let mut out = Vec::new();
        for item in make_iter(v)? {
            self.tick()?;
            out.push(item);
        }
        Ok(out)
    }
}

fn make_iter(v: &Value) -> Result<Iter, Exc> {
    Ok(match v {
        Value::List(l) => Iter::List(Rc::clone(l), 0),
        Value::Tuple(t) => Iter::Items(t.iter().cloned().collect::<Vec<_>>().into_iter()),
        Value::Str(s) => Iter::Items(
            s.chars()
                .map(|c| Value::str(&c.to_string()))
                .collect::<Vec<_>>()
                .into_iter(),
        ),
        Value::Dict(d) => Iter::Items(
            d.borrow()
                .entries
                .iter()
                .map(|(k, _)| k.clone())
                .collect::<Vec<_>>()
                .into_iter(),
        ),
        r @ Value::Range { start, step, .. } => Iter::Range {
            next: *start,
            step: *step,
            remaining: range_len(r),
        },
        other => {
            return Err(type_error(format!(
                "'{}' object is not iterable",
                other.type_name()
            )))
        }
    })
}

fn compare(op: CmpOp, a: &Value, b: &Value) -> Result<bool, Exc> {
    use std::cmp::Ordering::*;
    Ok(match op {
        CmpOp::Eq => py_eq(a, b),
        CmpOp::Ne => !py_eq(a, b),
        CmpOp::Lt => py_cmp(a, b)? == Less,
        CmpOp::Le => py_cmp(a, b)? != Greater,
        CmpOp::Gt => py_cmp(a, b)? == Greater,
        CmpOp::Ge => py_cmp(a, b)? != Less,
        CmpOp::In => contains(b, a)?,
        CmpOp::NotIn => !contains(b, a)?,
        CmpOp::Is => py_is(a, b),
        CmpOp::IsNot => !py_is(a, b),
    })
}

pub(super) fn display_all(values: &[Value]) -> String {
    values
        .iter()
        .map(display_string)
        .collect::<Vec<_>>()
        .join(" ")
}
