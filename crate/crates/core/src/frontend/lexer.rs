//! Tokenizer for the traced language.
//!
//! Produces a flat token stream with explicit `Newline`, `Indent` and
//! `Dedent` tokens, and collects line comments on the side so that a `#`
//! inside a string literal is never mistaken for a comment.

use std::collections::BTreeMap;

use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Name(String),
    Int(i64),
    Float(f64),
    Str(String),
    Op(&'static str),
    Newline,
    Indent,
    Dedent,
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
    /// Byte offsets into the source text.
    pub start: usize,
    pub end: usize,
}

pub struct Lexed {
    pub tokens: Vec<Token>,
    pub comments: BTreeMap<u32, String>,
    /// A bracket still open at end of input. Reported only if the parser
    /// finds nothing wrong earlier in the text.
    pub unclosed: Option<ParseError>,
    /// Line and column where the input ended.
    pub end: (u32, u32),
}

// Longest operators first so that maximal munch works with a linear scan.
const OPERATORS: &[&str] = &[
    "**=", "//=", "**", "//", "==", "!=", "<=", ">=", "+=", "-=", "*=", "/=", "%=", "->", "+", "-",
    "*", "/", "%", "<", ">", "=", "(", ")", "[", "]", "{", "}", ",", ":", ".",
];

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: u32,
    line_start: usize,
    /// Open brackets: symbol, line, column.
    openers: Vec<(&'static str, u32, u32)>,
    unclosed: Option<ParseError>,
    end: (u32, u32),
    indents: Vec<usize>,
    tokens: Vec<Token>,
    comments: BTreeMap<u32, String>,
}

pub fn tokenize(src: &str) -> Result<Lexed, ParseError> {
    let mut lx = Lexer {
        src,
        bytes: src.as_bytes(),
        pos: 0,
        line: 1,
        line_start: 0,
        openers: Vec::new(),
        unclosed: None,
        end: (1, 1),
        indents: vec![0],
        tokens: Vec::new(),
        comments: BTreeMap::new(),
    };
    lx.run()?;
    Ok(Lexed {
        tokens: lx.tokens,
        comments: lx.comments,
        unclosed: lx.unclosed,
        end: lx.end,
    })
}

impl<'a> Lexer<'a> {
    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            column: self.col(self.pos),
            message: msg.into(),
        }
    }

    fn col(&self, pos: usize) -> u32 {
        self.src[self.line_start..pos].chars().count() as u32 + 1
    }

    fn push(&mut self, tok: Tok, start: usize) {
        let col = self.col(start);
        self.tokens.push(Token {
            tok,
            line: self.line,
            col,
            start,
            end: self.pos,
        });
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn newline(&mut self) {
        // caller has consumed the '\n'
        self.line += 1;
        self.line_start = self.pos;
    }

    fn run(&mut self) -> Result<(), ParseError> {
        let mut at_line_start = true;
        while self.pos < self.bytes.len() {
            if at_line_start && self.openers.is_empty() {
                at_line_start = false;
                if self.handle_indentation()? {
                    at_line_start = true;
                    continue;
                }
            }
            let c = self.bytes[self.pos];
            match c {
                b' ' | b'\t' | b'\r' | b'\x0c' => self.pos += 1,
                b'\n' => {
                    self.pos += 1;
                    if self.openers.is_empty() {
                        let start = self.pos - 1;
                        self.tokens.push(Token {
                            tok: Tok::Newline,
                            line: self.line,
                            col: self.col(start),
                            start,
                            end: self.pos,
                        });
                        at_line_start = true;
                    }
                    self.newline();
                }
                b'#' => self.comment(),
                b'\\' => {
                    // explicit line joining
                    let rest = &self.src[self.pos + 1..];
                    let trimmed = rest.trim_start_matches([' ', '\t', '\r']);
                    if trimmed.starts_with('\n') {
                        self.pos = self.bytes.len() - trimmed.len() + 1;
                        self.newline();
                    } else {
                        return Err(self.err("unexpected character after line continuation"));
                    }
                }
                b'"' | b'\'' => self.string()?,
                b'0'..=b'9' => self.number()?,
                b'.' if matches!(self.bytes.get(self.pos + 1), Some(b'0'..=b'9')) => {
                    self.number()?
                }
                c if c == b'_' || c.is_ascii_alphabetic() => self.name(),
                c if c >= 0x80 => {
                    let ch = self.src[self.pos..].chars().next().unwrap_or('\u{fffd}');
                    if ch.is_alphabetic() {
                        self.name();
                    } else {
                        return Err(self.err(format!("unexpected character {ch:?}")));
                    }
                }
                _ => self.operator()?,
            }
        }
        let end = self.bytes.len();
        self.end = (self.line, self.col(end));
        if let Some((op, line, column)) = self.openers.first().copied() {
            self.unclosed = Some(ParseError {
                line,
                column,
                message: format!("'{op}' was never closed"),
            });
            self.openers.clear();
        }
        if !matches!(
            self.tokens.last().map(|t| &t.tok),
            None | Some(Tok::Newline) | Some(Tok::Dedent)
        ) {
            self.tokens.push(Token {
                tok: Tok::Newline,
                line: self.line,
                col: self.col(end),
                start: end,
                end,
            });
        }
        while self.indents.len() > 1 {
            self.indents.pop();
            self.push(Tok::Dedent, end);
        }
        self.push(Tok::Eof, end);
        Ok(())
    }

    /// Measures leading whitespace of a logical line. Returns true when the
    /// line was blank or comment-only and has been consumed entirely.
    fn handle_indentation(&mut self) -> Result<bool, ParseError> {
        let mut width = 0usize;
        let mut p = self.pos;
        while let Some(&c) = self.bytes.get(p) {
            match c {
                b' ' => width += 1,
                b'\t' => width = (width / 8 + 1) * 8,
                b'\x0c' | b'\r' => {}
                _ => break,
            }
            p += 1;
        }
        match self.bytes.get(p) {
            None => {
                self.pos = p;
                return Ok(true);
            }
            Some(b'\n') => {
                self.pos = p + 1;
                self.newline();
                return Ok(true);
            }
            Some(b'#') => {
                self.pos = p;
                self.comment();
                if self.peek() == Some(b'\n') {
                    self.pos += 1;
                    self.newline();
                }
                return Ok(true);
            }
            _ => {}
        }
        self.pos = p;
        let current = *self.indents.last().unwrap_or(&0);
        if width > current {
            self.indents.push(width);
            self.push(Tok::Indent, p);
        } else if width < current {
            while width < *self.indents.last().unwrap_or(&0) {
                self.indents.pop();
                self.push(Tok::Dedent, p);
            }
            if width != *self.indents.last().unwrap_or(&0) {
                return Err(self.err("unindent does not match any outer indentation level"));
            }
        }
        Ok(false)
    }

    fn comment(&mut self) {
        let start = self.pos + 1;
        let end = self.src[start..]
            .find('\n')
            .map(|i| start + i)
            .unwrap_or(self.bytes.len());
        let text = self.src[start..end].trim();
        self.comments.insert(self.line, text.to_string());
        self.pos = end;
    }

    fn name(&mut self) {
        let start = self.pos;
        for (i, ch) in self.src[start..].char_indices() {
            if !(ch == '_' || ch.is_alphanumeric()) {
                self.pos = start + i;
                let text = self.src[start..self.pos].to_string();
                self.push(Tok::Name(text), start);
                return;
            }
        }
        self.pos = self.bytes.len();
        let text = self.src[start..].to_string();
        self.push(Tok::Name(text), start);
    }

    fn number(&mut self) -> Result<(), ParseError> {
        let start = self.pos;
        let mut is_float = false;
        while let Some(c) = self.peek() {
            match c {
                b'0'..=b'9' | b'_' => self.pos += 1,
                b'.' if !is_float => {
                    is_float = true;
                    self.pos += 1;
                }
                b'e' | b'E' => {
                    is_float = true;
                    self.pos += 1;
                    if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
        if matches!(self.peek(), Some(c) if c == b'_' || c.is_ascii_alphabetic()) {
            return Err(self.err("invalid numeric literal"));
        }
        let text: String = self.src[start..self.pos].chars().filter(|&c| c != '_').collect();
        let tok = if is_float {
            Tok::Float(text.parse().map_err(|_| self.err("invalid float literal"))?)
        } else {
            Tok::Int(
                text.parse()
                    .map_err(|_| self.err("integer literal out of range"))?,
            )
        };
        self.push(tok, start);
        Ok(())
    }

    fn string(&mut self) -> Result<(), ParseError> {
        let start = self.pos;
        let start_line = self.line;
        let start_col = self.col(start);
        let quote = self.bytes[self.pos];
        let triple = self.bytes.get(self.pos + 1) == Some(&quote)
            && self.bytes.get(self.pos + 2) == Some(&quote);
        self.pos += if triple { 3 } else { 1 };
        let mut out = String::new();
        loop {
            let Some(ch) = self.src[self.pos..].chars().next() else {
                return Err(ParseError {
                    line: start_line,
                    column: start_col,
                    message: "unterminated string literal".into(),
                });
            };
            let b = ch as u32;
            if b == quote as u32 {
                if !triple {
                    self.pos += 1;
                    break;
                }
                if self.bytes.get(self.pos + 1) == Some(&quote)
                    && self.bytes.get(self.pos + 2) == Some(&quote)
                {
                    self.pos += 3;
                    break;
                }
                out.push(ch);
                self.pos += 1;
                continue;
            }
            match ch {
                '\n' if !triple => {
                    return Err(ParseError {
                        line: start_line,
                        column: start_col,
                        message: "unterminated string literal".into(),
                    })
                }
                '\n' => {
                    out.push('\n');
                    self.pos += 1;
                    self.newline();
                }
                '\\' => {
                    self.pos += 1;
                    let Some(esc) = self.src[self.pos..].chars().next() else {
                        continue;
                    };
                    self.pos += esc.len_utf8();
                    match esc {
                        'n' => out.push('\n'),
                        't' => out.push('\t'),
                        'r' => out.push('\r'),
                        '0' => out.push('\0'),
                        '\\' => out.push('\\'),
                        '\'' => out.push('\''),
                        '"' => out.push('"'),
                        '\n' => self.newline(),
                        other => {
                            out.push('\\');
                            out.push(other);
                        }
                    }
                }
                _ => {
                    out.push(ch);
                    self.pos += ch.len_utf8();
                }
            }
        }
        let col = start_col;
        self.tokens.push(Token {
            tok: Tok::Str(out),
            line: start_line,
            col,
            start,
            end: self.pos,
        });
        Ok(())
    }

    fn operator(&mut self) -> Result<(), ParseError> {
        let rest = &self.src[self.pos..];
        let Some(op) = OPERATORS.iter().find(|op| rest.starts_with(**op)) else {
            let ch = rest.chars().next().unwrap_or('?');
            return Err(self.err(format!("unexpected character {ch:?}")));
        };
        let start = self.pos;
        self.pos += op.len();
        match *op {
            "(" | "[" | "{" => {
                let column = self.col(start);
                self.openers.push((op, self.line, column));
            }
            ")" | "]" | "}" if self.openers.pop().is_none() => {
                return Err(self.err(format!("unmatched '{op}'")));
            }
            _ => {}
        }
        self.push(Tok::Op(op), start);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().tokens.into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn indentation_tokens() {
        let toks = kinds("if x:\n    y = 1\nz\n");
        assert!(toks.contains(&Tok::Indent));
        assert!(toks.contains(&Tok::Dedent));
        assert_eq!(toks.last(), Some(&Tok::Eof));
    }

    #[test]
    fn hash_inside_string_is_not_a_comment() {
        let lexed = tokenize("s = '# not a comment'  # real\n").unwrap();
        assert_eq!(lexed.comments.len(), 1);
        assert_eq!(lexed.comments[&1], "real");
        assert!(lexed
            .tokens
            .iter()
            .any(|t| t.tok == Tok::Str("# not a comment".into())));
    }

    #[test]
    fn comment_only_lines_are_recorded() {
        let lexed = tokenize("# header\nx = 1\n    # indented note\ny = 2\n").unwrap();
        assert_eq!(lexed.comments[&1], "header");
        assert_eq!(lexed.comments[&3], "indented note");
        assert!(!lexed.tokens.iter().any(|t| t.tok == Tok::Indent));
    }

    #[test]
    fn brackets_join_lines() {
        let toks = kinds("xs = [1,\n      2]\n");
        let newlines = toks.iter().filter(|t| **t == Tok::Newline).count();
        assert_eq!(newlines, 1);
    }

    #[test]
    fn bad_dedent_is_an_error() {
        let err = tokenize("if x:\n        a\n    b\n").err().unwrap();
        assert_eq!(err.line, 3);
    }

    #[test]
    fn unterminated_string_reports_start() {
        let err = tokenize("x = 1\ny = 'abc\n").err().unwrap();
        assert_eq!((err.line, err.column), (2, 5));
    }
}
