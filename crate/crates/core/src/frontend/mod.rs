//! Static facts about a snippet: line table, comments, function and loop
//! extents, builtin call sites, and a per-line statement summary used by
//! the explainer.

pub mod ast;
pub mod lexer;
pub mod parser;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::executor::value::{Builtin, METHOD_NAMES};
use ast::{ExprKind, Program, Span, Stmt, StmtKind, TargetKind};

/// Name of the synthetic frame that runs top-level statements.
pub const MODULE_NAME: &str = "<module>";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionInfo {
    pub name: String,
    pub params: Vec<String>,
    pub def_line: u32,
    pub body_start: u32,
    pub body_end: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LoopKind {
    For,
    While,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopExtent {
    pub kind: LoopKind,
    pub header_line: u32,
    pub body_start: u32,
    pub body_end: u32,
    /// Bound target text, for-loops only.
    pub loop_var: Option<String>,
    pub iterable_text: Option<String>,
}

impl LoopExtent {
    pub fn contains(&self, line: u32) -> bool {
        (self.header_line..=self.body_end).contains(&line)
    }

    fn encloses(&self, other: &LoopExtent) -> bool {
        self.header_line < other.header_line && other.body_end <= self.body_end
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuiltinSite {
    pub line: u32,
    pub name: String,
}

/// What kind of statement starts on a line, with the source fragments the
/// explanation templates need.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatementKind {
    Assign {
        target: String,
        /// Variables rebound or mutated by the assignment.
        names: Vec<String>,
        expr: String,
    },
    AugAssign {
        target: String,
        name: Option<String>,
        op: String,
        expr: String,
    },
    IfHeader {
        cond: String,
    },
    ForHeader {
        target: String,
        vars: Vec<String>,
        iterable: String,
    },
    WhileHeader {
        cond: String,
    },
    Return {
        expr: Option<String>,
    },
    Call {
        callee: String,
        args: Vec<String>,
    },
    Def {
        name: String,
        params: Vec<String>,
    },
    Other,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceModel {
    pub path: String,
    pub lines: Vec<String>,
    pub functions: Vec<FunctionInfo>,
    pub loops: Vec<LoopExtent>,
    pub comments: BTreeMap<u32, String>,
    pub builtin_sites: Vec<BuiltinSite>,
    pub statements: BTreeMap<u32, StatementKind>,
}

impl SourceModel {
    pub fn function(&self, name: &str) -> Option<&FunctionInfo> {
        self.functions.iter().find(|f| f.name == name)
    }

    /// Source line without its trailing carriage return, if any.
    pub fn code(&self, line: u32) -> Option<&str> {
        let idx = usize::try_from(line).ok()?.checked_sub(1)?;
        self.lines.get(idx).map(|l| l.strip_suffix('\r').unwrap_or(l))
    }

    pub fn statement(&self, line: u32) -> Option<&StatementKind> {
        self.statements.get(&line)
    }

    /// Reassembles the original text.
    pub fn text(&self) -> String {
        self.lines.join("\n")
    }
}

/// Splits text into lines such that `lines.join("\n") == text`.
pub fn split_lines(text: &str) -> Vec<String> {
    if text.is_empty() {
        return Vec::new();
    }
    text.split('\n').map(str::to_string).collect()
}

pub fn parse_source(text: &str, path: &str) -> Result<SourceModel> {
    parse_program(text, path).map(|(_, model)| model)
}

/// Parses `text` into both the executable program and its static model.
pub fn parse_program(text: &str, path: &str) -> Result<(Program, SourceModel)> {
    let lexed = lexer::tokenize(text).map_err(Error::Parse)?;
    let program = match (parser::parse_program(&lexed.tokens), lexed.unclosed) {
        (Ok(program), None) => program,
        // an error at end of input is a symptom of the unclosed bracket
        (Err(e), Some(open)) if (e.line, e.column) >= lexed.end => {
            return Err(Error::Parse(open))
        }
        (Err(e), _) => return Err(Error::Parse(e)),
        (Ok(_), Some(open)) => return Err(Error::Parse(open)),
    };
    let mut collector = Collector {
        text,
        functions: Vec::new(),
        loops: Vec::new(),
        statements: BTreeMap::new(),
        sites: Vec::new(),
        user_functions: Vec::new(),
    };
    collector.user_functions = program
        .body
        .iter()
        .filter_map(|s| match &s.kind {
            StmtKind::Def(f) => Some(f.name.clone()),
            _ => None,
        })
        .collect();
    collector.block(&program.body);
    let Collector {
        functions,
        mut loops,
        statements,
        mut sites,
        ..
    } = collector;
    loops.sort_by_key(|l| l.header_line);
    sites.sort_by_key(|s| s.line);
    let model = SourceModel {
        path: path.to_string(),
        lines: split_lines(text),
        functions,
        loops,
        comments: lexed.comments,
        builtin_sites: sites,
        statements,
    };
    Ok((program, model))
}

/// Loops whose header lies in `frame_fn`'s body, or outside every function
/// for the module scope, ordered by header line.
pub fn loop_extents(model: &SourceModel, frame_fn: &str) -> Result<Vec<LoopExtent>> {
    let inside = |l: &LoopExtent, f: &FunctionInfo| {
        (f.body_start..=f.body_end).contains(&l.header_line)
    };
    if frame_fn == MODULE_NAME {
        return Ok(model
            .loops
            .iter()
            .filter(|l| !model.functions.iter().any(|f| inside(l, f)))
            .cloned()
            .collect());
    }
    let f = model
        .function(frame_fn)
        .ok_or_else(|| Error::UnknownFunction(frame_fn.to_string()))?;
    Ok(model
        .loops
        .iter()
        .filter(|l| inside(l, f))
        .cloned()
        .collect())
}

/// Loops in `loops` not enclosed by any other loop in the same list.
pub fn outermost(loops: &[LoopExtent]) -> Vec<&LoopExtent> {
    loops
        .iter()
        .filter(|l| !loops.iter().any(|o| o.encloses(l)))
        .collect()
}

/// Loops nested strictly inside `outer`.
pub fn nested_in(loops: &[LoopExtent], outer: &LoopExtent) -> Vec<LoopExtent> {
    loops.iter().filter(|l| outer.encloses(l)).cloned().collect()
}

pub fn builtin_references(model: &SourceModel) -> Vec<(u32, String)> {
    model
        .builtin_sites
        .iter()
        .map(|s| (s.line, s.name.clone()))
        .collect()
}

struct Collector<'a> {
    text: &'a str,
    functions: Vec<FunctionInfo>,
    loops: Vec<LoopExtent>,
    statements: BTreeMap<u32, StatementKind>,
    sites: Vec<BuiltinSite>,
    user_functions: Vec<String>,
}

impl Collector<'_> {
    /// Source fragment for a span with continuation lines folded onto one line.
    fn fragment(&self, span: Span) -> String {
        let raw = &self.text[span.start..span.end];
        raw.split('\n')
            .enumerate()
            .map(|(i, part)| if i == 0 { part.trim_end() } else { part.trim() })
            .filter(|p| !p.is_empty())
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn block(&mut self, body: &[Stmt]) {
        for stmt in body {
            self.stmt(stmt);
        }
    }

    fn stmt(&mut self, stmt: &Stmt) {
        let kind = match &stmt.kind {
            StmtKind::Expr(e) => {
                self.expr(e, stmt.line);
                match &e.kind {
                    ExprKind::Call { func, args } => StatementKind::Call {
                        callee: self.fragment(func.span),
                        args: args.iter().map(|a| self.fragment(a.span)).collect(),
                    },
                    ExprKind::Method { obj, name, args } => StatementKind::Call {
                        callee: format!("{}.{}", self.fragment(obj.span), name),
                        args: args.iter().map(|a| self.fragment(a.span)).collect(),
                    },
                    _ => StatementKind::Other,
                }
            }
            StmtKind::Assign { targets, value } => {
                for t in targets {
                    self.target(t, stmt.line);
                }
                self.expr(value, stmt.line);
                let mut names = Vec::new();
                for t in targets {
                    for n in t.root_names() {
                        if !names.contains(&n) {
                            names.push(n);
                        }
                    }
                }
                StatementKind::Assign {
                    target: targets
                        .iter()
                        .map(|t| self.fragment(t.span))
                        .collect::<Vec<_>>()
                        .join(" = "),
                    names,
                    expr: self.fragment(value.span),
                }
            }
            StmtKind::AugAssign { target, op, value } => {
                self.target(target, stmt.line);
                self.expr(value, stmt.line);
                StatementKind::AugAssign {
                    target: self.fragment(target.span),
                    name: target.root_names().into_iter().next(),
                    op: op.symbol().to_string(),
                    expr: self.fragment(value.span),
                }
            }
            StmtKind::If { branches, orelse } => {
                for b in branches {
                    self.expr(&b.cond, b.line);
                    let cond = self.fragment(b.cond.span);
                    self.statements
                        .insert(b.line, StatementKind::IfHeader { cond });
                    self.block(&b.body);
                }
                if let Some(body) = orelse {
                    self.block(body);
                }
                return;
            }
            StmtKind::For { target, iter, body } => {
                self.target(target, stmt.line);
                self.expr(iter, stmt.line);
                let target_text = self.fragment(target.span);
                let iterable = self.fragment(iter.span);
                self.loops.push(LoopExtent {
                    kind: LoopKind::For,
                    header_line: stmt.line,
                    body_start: body.first().map(|s| s.line).unwrap_or(stmt.line),
                    body_end: stmt.end_line,
                    loop_var: Some(target_text.clone()),
                    iterable_text: Some(iterable.clone()),
                });
                self.statements.insert(
                    stmt.line,
                    StatementKind::ForHeader {
                        target: target_text,
                        vars: target.root_names(),
                        iterable,
                    },
                );
                self.block(body);
                return;
            }
            StmtKind::While { cond, body } => {
                self.expr(cond, stmt.line);
                self.loops.push(LoopExtent {
                    kind: LoopKind::While,
                    header_line: stmt.line,
                    body_start: body.first().map(|s| s.line).unwrap_or(stmt.line),
                    body_end: stmt.end_line,
                    loop_var: None,
                    iterable_text: None,
                });
                let cond = self.fragment(cond.span);
                self.statements
                    .insert(stmt.line, StatementKind::WhileHeader { cond });
                self.block(body);
                return;
            }
            StmtKind::Return(value) => {
                if let Some(v) = value {
                    self.expr(v, stmt.line);
                }
                StatementKind::Return {
                    expr: value.as_ref().map(|v| self.fragment(v.span)),
                }
            }
            StmtKind::Def(f) => {
                self.functions.push(FunctionInfo {
                    name: f.name.clone(),
                    params: f.params.clone(),
                    def_line: f.line,
                    body_start: f.body.first().map(|s| s.line).unwrap_or(f.line),
                    body_end: stmt.end_line,
                });
                self.statements.insert(
                    stmt.line,
                    StatementKind::Def {
                        name: f.name.clone(),
                        params: f.params.clone(),
                    },
                );
                self.block(&f.body);
                return;
            }
            StmtKind::Del(targets) => {
                for t in targets {
                    self.target(t, stmt.line);
                }
                StatementKind::Other
            }
            StmtKind::Pass | StmtKind::Break | StmtKind::Continue => StatementKind::Other,
        };
        self.statements.insert(stmt.line, kind);
    }

    fn target(&mut self, t: &ast::Target, line: u32) {
        match &t.kind {
            TargetKind::Name(_) => {}
            TargetKind::Index { obj, index } => {
                self.expr(obj, line);
                self.expr(index, line);
            }
            TargetKind::Tuple(items) => items.iter().for_each(|i| self.target(i, line)),
        }
    }

    /// Pre-order walk recording builtin call sites; the outer call of
    /// `print(len(xs))` is recorded before the inner one.
    fn expr(&mut self, e: &ast::Expr, line: u32) {
        match &e.kind {
            ExprKind::Call { func, args } => {
                if let ExprKind::Name(n) = &func.kind {
                    if Builtin::from_name(n).is_some() && !self.user_functions.contains(n) {
                        self.sites.push(BuiltinSite {
                            line,
                            name: n.clone(),
                        });
                    }
                }
                self.expr(func, line);
                args.iter().for_each(|a| self.expr(a, line));
            }
            ExprKind::Method { obj, name, args } => {
                if METHOD_NAMES.contains(&name.as_str()) {
                    self.sites.push(BuiltinSite {
                        line,
                        name: name.clone(),
                    });
                }
                self.expr(obj, line);
                args.iter().for_each(|a| self.expr(a, line));
            }
            ExprKind::List(items) | ExprKind::Tuple(items) => {
                items.iter().for_each(|i| self.expr(i, line))
            }
            ExprKind::Dict(pairs) => pairs.iter().for_each(|(k, v)| {
                self.expr(k, line);
                self.expr(v, line);
            }),
            ExprKind::Binary { left, right, .. } | ExprKind::BoolOp { left, right, .. } => {
                self.expr(left, line);
                self.expr(right, line);
            }
            ExprKind::Unary { operand, .. } => self.expr(operand, line),
            ExprKind::Compare { first, rest } => {
                self.expr(first, line);
                rest.iter().for_each(|(_, r)| self.expr(r, line));
            }
            ExprKind::IfExp { cond, then, orelse } => {
                self.expr(then, line);
                self.expr(cond, line);
                self.expr(orelse, line);
            }
            ExprKind::Index { obj, index } => {
                self.expr(obj, line);
                self.expr(index, line);
            }
            ExprKind::Slice {
                obj,
                lower,
                upper,
                step,
            } => {
                self.expr(obj, line);
                for part in [lower, upper, step].into_iter().flatten() {
                    self.expr(part, line);
                }
            }
            ExprKind::Int(_)
            | ExprKind::Float(_)
            | ExprKind::Str(_)
            | ExprKind::Bool(_)
            | ExprKind::None
            | ExprKind::Name(_) => {}
        }
    }
}
