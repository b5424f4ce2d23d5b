//! Recursive-descent parser over the token stream from [`super::lexer`].

use std::sync::Arc;

use super::ast::*;
use super::lexer::{Tok, Token};
use super::ParseError;

const KEYWORDS: &[&str] = &[
    "if", "elif", "else", "for", "while", "def", "return", "pass", "break", "continue", "del",
    "and", "or", "not", "in", "is", "True", "False", "None", "lambda", "class", "import", "from",
    "try", "except", "finally", "raise", "with", "global", "nonlocal", "yield", "assert", "async",
    "await", "as",
];

const UNSUPPORTED_STATEMENTS: &[&str] = &[
    "class", "import", "from", "try", "except", "finally", "raise", "with", "global", "nonlocal",
    "yield", "assert", "async", "await", "lambda",
];

pub struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    fn_depth: usize,
    loop_depth: usize,
}

pub fn parse_program(tokens: &[Token]) -> Result<Program, ParseError> {
    let mut p = Parser {
        tokens,
        pos: 0,
        fn_depth: 0,
        loop_depth: 0,
    };
    let mut body = Vec::new();
    while !p.at(&Tok::Eof) {
        if p.eat(&Tok::Newline) {
            continue;
        }
        if p.at(&Tok::Indent) {
            return Err(p.error_here("unexpected indent"));
        }
        body.push(p.statement()?);
    }
    Ok(Program { body })
}

fn is_keyword(name: &str) -> bool {
    KEYWORDS.contains(&name)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        &self.tokens[(self.pos + offset).min(self.tokens.len() - 1)].tok
    }

    fn at(&self, tok: &Tok) -> bool {
        &self.peek().tok == tok
    }

    fn at_op(&self, op: &str) -> bool {
        matches!(&self.peek().tok, Tok::Op(o) if *o == op)
    }

    fn at_kw(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Name(n) if n == kw)
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.at(tok) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.at_op(op) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn prev_end(&self) -> usize {
        self.tokens[self.pos.saturating_sub(1)].end
    }

    fn prev_line(&self) -> u32 {
        self.tokens[self.pos.saturating_sub(1)].line
    }

    fn error_here(&self, msg: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError {
            line: t.line,
            column: t.col,
            message: msg.into(),
        }
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Name(n) => format!("'{n}'"),
            Tok::Int(i) => format!("'{i}'"),
            Tok::Float(f) => format!("'{f}'"),
            Tok::Str(_) => "string literal".into(),
            Tok::Op(o) => format!("'{o}'"),
            Tok::Newline => "end of line".into(),
            Tok::Indent => "indent".into(),
            Tok::Dedent => "dedent".into(),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect_op(&mut self, op: &str) -> Result<(), ParseError> {
        if self.eat_op(op) {
            Ok(())
        } else {
            let found = Self::describe(&self.peek().tok);
            Err(self.error_here(format!("expected '{op}', found {found}")))
        }
    }

    fn expect_name(&mut self) -> Result<String, ParseError> {
        match &self.peek().tok {
            Tok::Name(n) if !is_keyword(n) => {
                let n = n.clone();
                self.bump();
                Ok(n)
            }
            other => {
                let found = Self::describe(other);
                Err(self.error_here(format!("expected a name, found {found}")))
            }
        }
    }

    fn expect_newline(&mut self) -> Result<(), ParseError> {
        if self.eat(&Tok::Newline) || self.at(&Tok::Eof) {
            Ok(())
        } else {
            let found = Self::describe(&self.peek().tok);
            Err(self.error_here(format!("expected end of line, found {found}")))
        }
    }

    // ---- statements ----

    fn statement(&mut self) -> Result<Stmt, ParseError> {
        let line = self.peek().line;
        if let Tok::Name(n) = &self.peek().tok {
            match n.as_str() {
                "if" => return self.if_stmt(),
                "for" => return self.for_stmt(),
                "while" => return self.while_stmt(),
                "def" => return self.def_stmt(),
                "elif" | "else" => {
                    return Err(self.error_here(format!("'{n}' without a matching 'if'")))
                }
                n if UNSUPPORTED_STATEMENTS.contains(&n) => {
                    return Err(self.error_here(format!("'{n}' is not supported")))
                }
                _ => {}
            }
        }
        let kind = self.simple_statement()?;
        let end_line = self.prev_line();
        self.expect_newline()?;
        Ok(Stmt {
            line,
            end_line,
            kind,
        })
    }

    fn simple_statement(&mut self) -> Result<StmtKind, ParseError> {
        if self.eat_kw("pass") {
            return Ok(StmtKind::Pass);
        }
        if self.at_kw("break") || self.at_kw("continue") {
            if self.loop_depth == 0 {
                return Err(self.error_here("'break'/'continue' outside a loop"));
            }
            let brk = self.at_kw("break");
            self.bump();
            return Ok(if brk {
                StmtKind::Break
            } else {
                StmtKind::Continue
            });
        }
        if self.at_kw("return") {
            if self.fn_depth == 0 {
                return Err(self.error_here("'return' outside a function"));
            }
            self.bump();
            if self.at(&Tok::Newline) || self.at(&Tok::Eof) {
                return Ok(StmtKind::Return(None));
            }
            return Ok(StmtKind::Return(Some(self.expr_list()?)));
        }
        if self.eat_kw("del") {
            let mut targets = Vec::new();
            loop {
                let e = self.expr()?;
                targets.push(self.to_target(e)?);
                if !self.eat_op(",") {
                    break;
                }
            }
            return Ok(StmtKind::Del(targets));
        }

        let first = self.expr_list()?;
        const AUG: &[(&str, BinOp)] = &[
            ("+=", BinOp::Add),
            ("-=", BinOp::Sub),
            ("*=", BinOp::Mul),
            ("/=", BinOp::Div),
            ("//=", BinOp::FloorDiv),
            ("%=", BinOp::Mod),
            ("**=", BinOp::Pow),
        ];
        for (sym, op) in AUG {
            if self.eat_op(sym) {
                let target = self.to_target(first)?;
                if matches!(target.kind, TargetKind::Tuple(_)) {
                    return Err(ParseError {
                        line: self.prev_line(),
                        column: 1,
                        message: "augmented assignment to a tuple is not allowed".into(),
                    });
                }
                let value = self.expr_list()?;
                return Ok(StmtKind::AugAssign {
                    target,
                    op: *op,
                    value,
                });
            }
        }
        if self.at_op("=") {
            let mut chain = vec![first];
            while self.eat_op("=") {
                chain.push(self.expr_list()?);
            }
            let value = chain.pop().expect("chain has at least two items");
            let targets = chain
                .into_iter()
                .map(|e| self.to_target(e))
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(StmtKind::Assign { targets, value });
        }
        Ok(StmtKind::Expr(first))
    }

    /// Parses `: NEWLINE INDENT stmt+ DEDENT`.
    fn block(&mut self) -> Result<Vec<Stmt>, ParseError> {
        self.expect_op(":")?;
        if !self.eat(&Tok::Newline) {
            return Err(self.error_here("expected an indented block on the following line"));
        }
        if !self.eat(&Tok::Indent) {
            return Err(self.error_here("expected an indented block"));
        }
        let mut body = Vec::new();
        while !self.eat(&Tok::Dedent) {
            if self.at(&Tok::Eof) {
                break;
            }
            if self.eat(&Tok::Newline) {
                continue;
            }
            if self.at(&Tok::Indent) {
                return Err(self.error_here("unexpected indent"));
            }
            body.push(self.statement()?);
        }
        Ok(body)
    }

    fn if_stmt(&mut self) -> Result<Stmt, ParseError> {
        let line = self.bump().line;
        let cond = self.expr()?;
        let body = self.block()?;
        let mut branches = vec![Branch { line, cond, body }];
        let mut orelse = None;
        loop {
            if self.at_kw("elif") {
                let l = self.bump().line;
                let cond = self.expr()?;
                let body = self.block()?;
                branches.push(Branch {
                    line: l,
                    cond,
                    body,
                });
            } else if self.at_kw("else") {
                self.bump();
                orelse = Some(self.block()?);
                break;
            } else {
                break;
            }
        }
        let end_line = orelse
            .as_ref()
            .and_then(|b: &Vec<Stmt>| b.last())
            .or_else(|| branches.last().and_then(|b| b.body.last()))
            .map(|s| s.end_line)
            .unwrap_or(line);
        Ok(Stmt {
            line,
            end_line,
            kind: StmtKind::If { branches, orelse },
        })
    }

    fn for_stmt(&mut self) -> Result<Stmt, ParseError> {
        let line = self.bump().line;
        let mut parts = vec![self.arith()?];
        while self.eat_op(",") {
            if self.at_kw("in") {
                break;
            }
            parts.push(self.arith()?);
        }
        let target = if parts.len() == 1 {
            self.to_target(parts.pop().unwrap())?
        } else {
            let span = Span {
                start: parts[0].span.start,
                end: parts.last().unwrap().span.end,
            };
            self.to_target(Expr {
                span,
                kind: ExprKind::Tuple(parts),
            })?
        };
        if !self.eat_kw("in") {
            return Err(self.error_here("expected 'in' in for statement"));
        }
        let iter = self.expr_list()?;
        self.loop_depth += 1;
        let body = self.block();
        self.loop_depth -= 1;
        let body = body?;
        if self.at_kw("else") {
            return Err(self.error_here("'else' on a loop is not supported"));
        }
        Ok(Stmt {
            line,
            end_line: body.last().map(|s| s.end_line).unwrap_or(line),
            kind: StmtKind::For { target, iter, body },
        })
    }

    fn while_stmt(&mut self) -> Result<Stmt, ParseError> {
        let line = self.bump().line;
        let cond = self.expr()?;
        self.loop_depth += 1;
        let body = self.block();
        self.loop_depth -= 1;
        let body = body?;
        if self.at_kw("else") {
            return Err(self.error_here("'else' on a loop is not supported"));
        }
        Ok(Stmt {
            line,
            end_line: body.last().map(|s| s.end_line).unwrap_or(line),
            kind: StmtKind::While { cond, body },
        })
    }

    fn def_stmt(&mut self) -> Result<Stmt, ParseError> {
        if self.fn_depth > 0 {
            return Err(self.error_here("nested function definitions are not supported"));
        }
        let line = self.bump().line;
        let name = self.expect_name()?;
        self.expect_op("(")?;
        let mut params: Vec<String> = Vec::new();
        while !self.at_op(")") {
            let tok = self.peek().clone();
            let p = self.expect_name()?;
            if params.contains(&p) {
                return Err(ParseError {
                    line: tok.line,
                    column: tok.col,
                    message: format!("duplicate parameter '{p}'"),
                });
            }
            if self.at_op("=") {
                return Err(self.error_here("default parameter values are not supported"));
            }
            params.push(p);
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op(")")?;
        let saved_loops = self.loop_depth;
        self.fn_depth += 1;
        self.loop_depth = 0;
        let body = self.block();
        self.fn_depth -= 1;
        self.loop_depth = saved_loops;
        let body = body?;
        Ok(Stmt {
            line,
            end_line: body.last().map(|s| s.end_line).unwrap_or(line),
            kind: StmtKind::Def(Arc::new(FunctionDef {
                name,
                params,
                line,
                body,
            })),
        })
    }

    fn to_target(&self, e: Expr) -> Result<Target, ParseError> {
        let span = e.span;
        let kind = match e.kind {
            ExprKind::Name(n) => TargetKind::Name(n),
            ExprKind::Index { obj, index } => TargetKind::Index { obj, index },
            ExprKind::Tuple(items) | ExprKind::List(items) => TargetKind::Tuple(
                items
                    .into_iter()
                    .map(|e| self.to_target(e))
                    .collect::<Result<Vec<_>, _>>()?,
            ),
            _ => {
                let tok = self
                    .tokens
                    .iter()
                    .find(|t| t.start == span.start)
                    .unwrap_or_else(|| self.peek());
                return Err(ParseError {
                    line: tok.line,
                    column: tok.col,
                    message: "cannot assign to this expression".into(),
                });
            }
        };
        Ok(Target { span, kind })
    }

    // ---- expressions ----

    /// `expr (',' expr)* [',']`, producing a tuple when a comma is present.
    fn expr_list(&mut self) -> Result<Expr, ParseError> {
        let first = self.expr()?;
        if !self.at_op(",") {
            return Ok(first);
        }
        let start = first.span.start;
        let mut items = vec![first];
        while self.eat_op(",") {
            if self.at_expr_end() {
                break;
            }
            items.push(self.expr()?);
        }
        Ok(Expr {
            span: Span {
                start,
                end: self.prev_end(),
            },
            kind: ExprKind::Tuple(items),
        })
    }

    fn at_expr_end(&self) -> bool {
        matches!(
            &self.peek().tok,
            Tok::Newline | Tok::Eof | Tok::Op("=") | Tok::Op(")") | Tok::Op("]") | Tok::Op("}")
                | Tok::Op(":")
        ) || matches!(&self.peek().tok, Tok::Op(o) if o.ends_with('=') && o.len() > 1 && *o != "==")
    }

    pub fn expr(&mut self) -> Result<Expr, ParseError> {
        let body = self.or_test()?;
        if self.at_kw("if") {
            self.bump();
            let cond = self.or_test()?;
            if !self.eat_kw("else") {
                return Err(self.error_here("expected 'else' in conditional expression"));
            }
            let orelse = self.expr()?;
            return Ok(Expr {
                span: Span {
                    start: body.span.start,
                    end: orelse.span.end,
                },
                kind: ExprKind::IfExp {
                    cond: Box::new(cond),
                    then: Box::new(body),
                    orelse: Box::new(orelse),
                },
            });
        }
        Ok(body)
    }

    fn or_test(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.and_test()?;
        while self.eat_kw("or") {
            let right = self.and_test()?;
            left = bool_op(false, left, right);
        }
        Ok(left)
    }

    fn and_test(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.not_test()?;
        while self.eat_kw("and") {
            let right = self.not_test()?;
            left = bool_op(true, left, right);
        }
        Ok(left)
    }

    fn not_test(&mut self) -> Result<Expr, ParseError> {
        if self.at_kw("not") {
            let start = self.bump().start;
            let operand = self.not_test()?;
            return Ok(Expr {
                span: Span {
                    start,
                    end: operand.span.end,
                },
                kind: ExprKind::Unary {
                    op: UnaryOp::Not,
                    operand: Box::new(operand),
                },
            });
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Expr, ParseError> {
        let first = self.arith()?;
        let mut rest = Vec::new();
        loop {
            let op = match &self.peek().tok {
                Tok::Op("==") => CmpOp::Eq,
                Tok::Op("!=") => CmpOp::Ne,
                Tok::Op("<") => CmpOp::Lt,
                Tok::Op("<=") => CmpOp::Le,
                Tok::Op(">") => CmpOp::Gt,
                Tok::Op(">=") => CmpOp::Ge,
                Tok::Name(n) if n == "in" => CmpOp::In,
                Tok::Name(n) if n == "is" => {
                    if matches!(self.peek_at(1), Tok::Name(m) if m == "not") {
                        self.bump();
                        CmpOp::IsNot
                    } else {
                        CmpOp::Is
                    }
                }
                Tok::Name(n) if n == "not" => {
                    if matches!(self.peek_at(1), Tok::Name(m) if m == "in") {
                        self.bump();
                        CmpOp::NotIn
                    } else {
                        break;
                    }
                }
                _ => break,
            };
            self.bump();
            rest.push((op, self.arith()?));
        }
        if rest.is_empty() {
            return Ok(first);
        }
        let span = Span {
            start: first.span.start,
            end: rest.last().map(|(_, e)| e.span.end).unwrap_or(first.span.end),
        };
        Ok(Expr {
            span,
            kind: ExprKind::Compare {
                first: Box::new(first),
                rest,
            },
        })
    }

    fn arith(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.term()?;
        loop {
            let op = if self.at_op("+") {
                BinOp::Add
            } else if self.at_op("-") {
                BinOp::Sub
            } else {
                break;
            };
            self.bump();
            let right = self.term()?;
            left = binary(op, left, right);
        }
        Ok(left)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.factor()?;
        loop {
            let op = match &self.peek().tok {
                Tok::Op("*") => BinOp::Mul,
                Tok::Op("/") => BinOp::Div,
                Tok::Op("//") => BinOp::FloorDiv,
                Tok::Op("%") => BinOp::Mod,
                _ => break,
            };
            self.bump();
            let right = self.factor()?;
            left = binary(op, left, right);
        }
        Ok(left)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let op = if self.at_op("-") {
            UnaryOp::Neg
        } else if self.at_op("+") {
            UnaryOp::Pos
        } else {
            return self.power();
        };
        let start = self.bump().start;
        let operand = self.factor()?;
        Ok(Expr {
            span: Span {
                start,
                end: operand.span.end,
            },
            kind: ExprKind::Unary {
                op,
                operand: Box::new(operand),
            },
        })
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.eat_op("**") {
            let exp = self.factor()?;
            return Ok(binary(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.atom()?;
        loop {
            let start = e.span.start;
            if self.eat_op("(") {
                let args = self.call_args()?;
                e = Expr {
                    span: Span {
                        start,
                        end: self.prev_end(),
                    },
                    kind: ExprKind::Call {
                        func: Box::new(e),
                        args,
                    },
                };
            } else if self.eat_op("[") {
                e = self.subscript(e)?;
            } else if self.eat_op(".") {
                let name = self.expect_name()?;
                if !self.eat_op("(") {
                    return Err(self.error_here(
                        "attribute access is only supported for method calls",
                    ));
                }
                let args = self.call_args()?;
                e = Expr {
                    span: Span {
                        start,
                        end: self.prev_end(),
                    },
                    kind: ExprKind::Method {
                        obj: Box::new(e),
                        name,
                        args,
                    },
                };
            } else {
                return Ok(e);
            }
        }
    }

    fn call_args(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut args = Vec::new();
        while !self.at_op(")") {
            if matches!(self.peek().tok, Tok::Name(_)) && matches!(self.peek_at(1), Tok::Op("="))
            {
                return Err(self.error_here("keyword arguments are not supported"));
            }
            if self.at_op("*") || self.at_op("**") {
                return Err(self.error_here("argument unpacking is not supported"));
            }
            args.push(self.expr()?);
            if !self.eat_op(",") {
                break;
            }
        }
        self.expect_op(")")?;
        Ok(args)
    }

    fn subscript(&mut self, obj: Expr) -> Result<Expr, ParseError> {
        let start = obj.span.start;
        let lower = if self.at_op(":") {
            None
        } else {
            Some(Box::new(self.expr_list()?))
        };
        if self.eat_op("]") {
            let index = lower.ok_or_else(|| self.error_here("empty subscript"))?;
            return Ok(Expr {
                span: Span {
                    start,
                    end: self.prev_end(),
                },
                kind: ExprKind::Index {
                    obj: Box::new(obj),
                    index,
                },
            });
        }
        self.expect_op(":")?;
        let upper = if self.at_op(":") || self.at_op("]") {
            None
        } else {
            Some(Box::new(self.expr()?))
        };
        let mut step = None;
        if self.eat_op(":") && !self.at_op("]") {
            step = Some(Box::new(self.expr()?));
        }
        self.expect_op("]")?;
        Ok(Expr {
            span: Span {
                start,
                end: self.prev_end(),
            },
            kind: ExprKind::Slice {
                obj: Box::new(obj),
                lower,
                upper,
                step,
            },
        })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let tok = self.peek().clone();
        let span = Span {
            start: tok.start,
            end: tok.end,
        };
        let simple = |kind| Expr { span, kind };
        match tok.tok {
            Tok::Int(i) => {
                self.bump();
                Ok(simple(ExprKind::Int(i)))
            }
            Tok::Float(f) => {
                self.bump();
                Ok(simple(ExprKind::Float(f)))
            }
            Tok::Str(s) => {
                self.bump();
                let mut text = s;
                // adjacent literals concatenate
                while let Tok::Str(more) = &self.peek().tok {
                    text.push_str(more);
                    self.bump();
                }
                Ok(Expr {
                    span: Span {
                        start: span.start,
                        end: self.prev_end(),
                    },
                    kind: ExprKind::Str(text),
                })
            }
            Tok::Name(n) => match n.as_str() {
                "True" => {
                    self.bump();
                    Ok(simple(ExprKind::Bool(true)))
                }
                "False" => {
                    self.bump();
                    Ok(simple(ExprKind::Bool(false)))
                }
                "None" => {
                    self.bump();
                    Ok(simple(ExprKind::None))
                }
                "lambda" => Err(self.error_here("'lambda' is not supported")),
                kw if is_keyword(kw) => {
                    Err(self.error_here(format!("unexpected keyword '{kw}'")))
                }
                _ => {
                    self.bump();
                    Ok(simple(ExprKind::Name(n)))
                }
            },
            Tok::Op("(") => {
                self.bump();
                if self.eat_op(")") {
                    return Ok(Expr {
                        span: Span {
                            start: span.start,
                            end: self.prev_end(),
                        },
                        kind: ExprKind::Tuple(Vec::new()),
                    });
                }
                let inner = self.expr_list()?;
                self.expect_op(")")?;
                Ok(Expr {
                    span: Span {
                        start: span.start,
                        end: self.prev_end(),
                    },
                    kind: inner.kind,
                })
            }
            Tok::Op("[") => {
                self.bump();
                let mut items = Vec::new();
                while !self.at_op("]") {
                    items.push(self.expr()?);
                    if self.at_kw("for") {
                        return Err(self.error_here("comprehensions are not supported"));
                    }
                    if !self.eat_op(",") {
                        break;
                    }
                }
                self.expect_op("]")?;
                Ok(Expr {
                    span: Span {
                        start: span.start,
                        end: self.prev_end(),
                    },
                    kind: ExprKind::List(items),
                })
            }
            Tok::Op("{") => {
                self.bump();
                let mut pairs = Vec::new();
                while !self.at_op("}") {
                    let k = self.expr()?;
                    if !self.at_op(":") {
                        return Err(self.error_here("set literals are not supported"));
                    }
                    self.bump();
                    let v = self.expr()?;
                    pairs.push((k, v));
                    if self.at_kw("for") {
                        return Err(self.error_here("comprehensions are not supported"));
                    }
                    if !self.eat_op(",") {
                        break;
                    }
                }
                self.expect_op("}")?;
                Ok(Expr {
                    span: Span {
                        start: span.start,
                        end: self.prev_end(),
                    },
                    kind: ExprKind::Dict(pairs),
                })
            }
            other => {
                let found = Self::describe(&other);
                Err(self.error_here(format!("expected an expression, found {found}")))
            }
        }
    }
}

fn binary(op: BinOp, left: Expr, right: Expr) -> Expr {
    Expr {
        span: Span {
            start: left.span.start,
            end: right.span.end,
        },
        kind: ExprKind::Binary {
            op,
            left: Box::new(left),
            right: Box::new(right),
        },
    }
}

fn bool_op(and: bool, left: Expr, right: Expr) -> Expr {
    Expr {
        span: Span {
            start: left.span.start,
            end: right.span.end,
        },
        kind: ExprKind::BoolOp {
            and,
            left: Box::new(left),
            right: Box::new(right),
        },
    }
}

