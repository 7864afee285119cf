use super::ast::{BoolExpr, DateExpr, Field, Program, RelOp, Span, Stmt};
use crate::date::{Period, YmdTriple};
use std::fmt;
use thiserror::Error;

/// Result of a successful parse: the AST plus enough source information to
/// render diagnostics and report excerpts.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub program: Program,
    /// Span of each statement's first token.
    pub stmt_spans: Vec<Span>,
    /// Per statement, the span of the argument of a top-level `sync`, if any.
    pub sync_arg_spans: Vec<Option<Span>>,
    pub source: String,
}

impl Parsed {
    /// The source line (1-based) without its trailing newline.
    pub fn line_text(&self, line: u32) -> &str {
        self.source.lines().nth(line as usize - 1).unwrap_or("")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LangErrorKind {
    Syntax(String),
    InvalidDateLiteral,
    UseBeforeDef(String),
    Redefinition(String),
    NestedSync,
    SyncOutsideAssert,
    AccessorOutsideAssume,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub struct LangError {
    pub kind: LangErrorKind,
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for LangError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: ", self.line, self.col)?;
        match &self.kind {
            LangErrorKind::Syntax(msg) => write!(f, "syntax error: {msg}"),
            LangErrorKind::InvalidDateLiteral => write!(f, "invalid date literal"),
            LangErrorKind::UseBeforeDef(n) => write!(f, "variable `{n}` used before definition"),
            LangErrorKind::Redefinition(n) => write!(f, "variable `{n}` defined twice"),
            LangErrorKind::NestedSync => write!(f, "sync cannot be nested inside sync"),
            LangErrorKind::SyncOutsideAssert => write!(f, "sync is only allowed inside assert"),
            LangErrorKind::AccessorOutsideAssume => {
                write!(f, "date accessors are only allowed inside assume")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(i64),
    Date(i64, i64, i64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Assign,
    Plus,
    Minus,
    Bang,
    AndAnd,
    OrOr,
    Rel(RelOp),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::Date(y, m, d) => write!(f, "`{y:04}-{m:02}-{d:02}`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::LBracket => write!(f, "`[`"),
            Tok::RBracket => write!(f, "`]`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Assign => write!(f, "`=`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Bang => write!(f, "`!`"),
            Tok::AndAnd => write!(f, "`&&`"),
            Tok::OrOr => write!(f, "`||`"),
            Tok::Rel(r) => write!(f, "`{r}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct SpannedTok {
    tok: Tok,
    line: u32,
    col: u32,
    end_col: u32,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn lex(source: &str) -> Result<Vec<SpannedTok>, LangError> {
    let mut toks = Vec::new();
    let chars: Vec<char> = source.chars().collect();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;
    let err = |line, col, msg: String| LangError {
        kind: LangErrorKind::Syntax(msg),
        line,
        col,
    };
    while i < chars.len() {
        let c = chars[i];
        let (tline, tcol) = (line, col);
        let mut push = |tok: Tok, width: u32| {
            toks.push(SpannedTok { tok, line: tline, col: tcol, end_col: tcol + width });
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => {
                push(Tok::LParen, 1);
                i += 1;
                col += 1;
            }
            ')' => {
                push(Tok::RParen, 1);
                i += 1;
                col += 1;
            }
            '[' => {
                push(Tok::LBracket, 1);
                i += 1;
                col += 1;
            }
            ']' => {
                push(Tok::RBracket, 1);
                i += 1;
                col += 1;
            }
            ';' => {
                push(Tok::Semi, 1);
                i += 1;
                col += 1;
            }
            ',' => {
                push(Tok::Comma, 1);
                i += 1;
                col += 1;
            }
            '+' => {
                push(Tok::Plus, 1);
                i += 1;
                col += 1;
            }
            '-' => {
                push(Tok::Minus, 1);
                i += 1;
                col += 1;
            }
            '&' => {
                if chars.get(i + 1) == Some(&'&') {
                    push(Tok::AndAnd, 2);
                    i += 2;
                    col += 2;
                } else {
                    return Err(err(line, col, "expected `&&`".into()));
                }
            }
            '|' => {
                if chars.get(i + 1) == Some(&'|') {
                    push(Tok::OrOr, 2);
                    i += 2;
                    col += 2;
                } else {
                    return Err(err(line, col, "expected `||`".into()));
                }
            }
            '!' => {
                if chars.get(i + 1) == Some(&'=') {
                    push(Tok::Rel(RelOp::Ne), 2);
                    i += 2;
                    col += 2;
                } else {
                    push(Tok::Bang, 1);
                    i += 1;
                    col += 1;
                }
            }
            '<' => {
                if chars.get(i + 1) == Some(&'=') {
                    push(Tok::Rel(RelOp::Le), 2);
                    i += 2;
                    col += 2;
                } else {
                    push(Tok::Rel(RelOp::Lt), 1);
                    i += 1;
                    col += 1;
                }
            }
            '>' => {
                if chars.get(i + 1) == Some(&'=') {
                    push(Tok::Rel(RelOp::Ge), 2);
                    i += 2;
                    col += 2;
                } else {
                    push(Tok::Rel(RelOp::Gt), 1);
                    i += 1;
                    col += 1;
                }
            }
            '=' => {
                if chars.get(i + 1) == Some(&'=') {
                    push(Tok::Rel(RelOp::Eq), 2);
                    i += 2;
                    col += 2;
                } else {
                    push(Tok::Assign, 1);
                    i += 1;
                    col += 1;
                }
            }
            c if c.is_ascii_digit() => {
                let scan = |mut j: usize| {
                    let start = j;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    (start, j)
                };
                let (s0, e0) = scan(i);
                // `YYYY-MM-DD` with the dashes directly adjacent lexes as a
                // single date token; a lone digit run is an integer.
                let is_date = chars.get(e0) == Some(&'-')
                    && chars.get(e0 + 1).is_some_and(|c| c.is_ascii_digit());
                if is_date {
                    let (s1, e1) = scan(e0 + 1);
                    if chars.get(e1) != Some(&'-')
                        || !chars.get(e1 + 1).is_some_and(|c| c.is_ascii_digit())
                    {
                        return Err(err(line, col, "malformed date literal".into()));
                    }
                    let (s2, e2) = scan(e1 + 1);
                    let part = |s: usize, e: usize| -> i64 {
                        chars[s..e].iter().collect::<String>().parse().unwrap_or(i64::MAX)
                    };
                    let width = (e2 - i) as u32;
                    push(Tok::Date(part(s0, e0), part(s1, e1), part(s2, e2)), width);
                    col += width;
                    i = e2;
                } else {
                    let text: String = chars[s0..e0].iter().collect();
                    let n: i64 = text
                        .parse()
                        .map_err(|_| err(line, col, "integer literal out of range".into()))?;
                    let width = (e0 - s0) as u32;
                    push(Tok::Int(n), width);
                    col += width;
                    i = e0;
                }
            }
            c if is_ident_start(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let width = (i - start) as u32;
                push(Tok::Ident(text), width);
                col += width;
            }
            other => {
                return Err(err(line, col, format!("unexpected character `{other}`")));
            }
        }
    }
    toks.push(SpannedTok { tok: Tok::Eof, line, col, end_col: col });
    Ok(toks)
}

struct Parser {
    toks: Vec<SpannedTok>,
    pos: usize,
    defined: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum BoolCtx {
    Assume,
    Assert { under_sync: bool },
}

impl Parser {
    fn peek(&self) -> &SpannedTok {
        &self.toks[self.pos]
    }

    fn prev_end(&self) -> (u32, u32) {
        let t = &self.toks[self.pos.saturating_sub(1)];
        (t.line, t.end_col)
    }

    fn bump(&mut self) -> SpannedTok {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn syntax_err(&self, msg: String) -> LangError {
        let t = self.peek();
        LangError { kind: LangErrorKind::Syntax(msg), line: t.line, col: t.col }
    }

    fn err_at(&self, kind: LangErrorKind, t: &SpannedTok) -> LangError {
        LangError { kind, line: t.line, col: t.col }
    }

    fn expect(&mut self, tok: Tok) -> Result<SpannedTok, LangError> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            Err(self.syntax_err(format!("expected {tok}, found {}", self.peek().tok)))
        }
    }

    fn expect_ident(&mut self) -> Result<(String, SpannedTok), LangError> {
        match self.peek().tok.clone() {
            Tok::Ident(name) => Ok((name, self.bump())),
            other => Err(self.syntax_err(format!("expected identifier, found {other}"))),
        }
    }

    fn signed_int(&mut self) -> Result<i64, LangError> {
        let negative = if self.peek().tok == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().tok.clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(if negative { -n } else { n })
            }
            other => Err(self.syntax_err(format!("expected integer, found {other}"))),
        }
    }

    fn check_defined(&self, name: &str, t: &SpannedTok) -> Result<(), LangError> {
        if self.defined.iter().any(|d| d == name) {
            Ok(())
        } else {
            Err(self.err_at(LangErrorKind::UseBeforeDef(name.to_string()), t))
        }
    }

    fn date_atom(&mut self) -> Result<DateExpr, LangError> {
        let t = self.peek().clone();
        match t.tok.clone() {
            Tok::Date(y, m, d) => {
                self.bump();
                let triple = YmdTriple::new(y, m, d);
                if !triple.is_valid() {
                    return Err(self.err_at(LangErrorKind::InvalidDateLiteral, &t));
                }
                Ok(DateExpr::Literal(triple))
            }
            Tok::Ident(name) => match name.as_str() {
                "random_date" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    self.expect(Tok::RParen)?;
                    Ok(DateExpr::RandomDate)
                }
                "first_day_of" | "last_day_of" => {
                    self.bump();
                    self.expect(Tok::LParen)?;
                    let inner = self.date_expr()?;
                    self.expect(Tok::RParen)?;
                    Ok(if name == "first_day_of" {
                        DateExpr::FirstDayOf(Box::new(inner))
                    } else {
                        DateExpr::LastDayOf(Box::new(inner))
                    })
                }
                _ => {
                    self.bump();
                    self.check_defined(&name, &t)?;
                    Ok(DateExpr::Var(name))
                }
            },
            other => Err(self.syntax_err(format!("expected date expression, found {other}"))),
        }
    }

    fn period_unit(&mut self, plural: &str) -> Result<(), LangError> {
        let singular = &plural[..plural.len() - 1];
        match self.peek().tok.clone() {
            Tok::Ident(ref w) if w == plural || w == singular => {
                self.bump();
                Ok(())
            }
            other => Err(self.syntax_err(format!("expected `{plural}`, found {other}"))),
        }
    }

    fn date_expr(&mut self) -> Result<DateExpr, LangError> {
        let mut expr = self.date_atom()?;
        while self.peek().tok == Tok::Plus {
            self.bump();
            self.expect(Tok::LBracket)?;
            let years = self.signed_int()?;
            self.period_unit("years")?;
            self.expect(Tok::Comma)?;
            let months = self.signed_int()?;
            self.period_unit("months")?;
            self.expect(Tok::Comma)?;
            let days = self.signed_int()?;
            self.period_unit("days")?;
            self.expect(Tok::RBracket)?;
            expr = DateExpr::AddPeriod(Box::new(expr), Period::new(years, months, days));
        }
        Ok(expr)
    }

    fn bool_atom(
        &mut self,
        ctx: BoolCtx,
        sync_span: &mut Option<Span>,
    ) -> Result<BoolExpr, LangError> {
        let t = self.peek().clone();
        match t.tok.clone() {
            Tok::Bang => {
                self.bump();
                let inner = self.bool_atom(ctx, sync_span)?;
                Ok(BoolExpr::Not(Box::new(inner)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.bool_expr(ctx, sync_span)?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) if name == "sync" => {
                match ctx {
                    BoolCtx::Assume => {
                        return Err(self.err_at(LangErrorKind::SyncOutsideAssert, &t))
                    }
                    BoolCtx::Assert { under_sync: true } => {
                        return Err(self.err_at(LangErrorKind::NestedSync, &t))
                    }
                    BoolCtx::Assert { under_sync: false } => {}
                }
                self.bump();
                self.expect(Tok::LParen)?;
                let start = self.peek().clone();
                let inner =
                    self.bool_expr(BoolCtx::Assert { under_sync: true }, sync_span)?;
                let (end_line, end_col) = self.prev_end();
                self.expect(Tok::RParen)?;
                *sync_span = Some(Span {
                    line: start.line,
                    col: start.col,
                    end_col: if end_line == start.line { end_col } else { start.col + 1 },
                });
                Ok(BoolExpr::Sync(Box::new(inner)))
            }
            Tok::Ident(name)
                if name == "day_of" || name == "month_of" || name == "year_of" =>
            {
                if !matches!(ctx, BoolCtx::Assume) {
                    return Err(self.err_at(LangErrorKind::AccessorOutsideAssume, &t));
                }
                self.bump();
                let field = match name.as_str() {
                    "day_of" => Field::Day,
                    "month_of" => Field::Month,
                    _ => Field::Year,
                };
                self.expect(Tok::LParen)?;
                let (var, vtok) = self.expect_ident()?;
                self.check_defined(&var, &vtok)?;
                self.expect(Tok::RParen)?;
                let op = match self.peek().tok.clone() {
                    Tok::Rel(op) => {
                        self.bump();
                        op
                    }
                    other => {
                        return Err(self.syntax_err(format!(
                            "expected comparison operator, found {other}"
                        )))
                    }
                };
                let n = self.signed_int()?;
                Ok(BoolExpr::FieldCmp(field, var, op, n))
            }
            _ => {
                let lhs = self.date_expr()?;
                let op = match self.peek().tok.clone() {
                    Tok::Rel(op) => {
                        self.bump();
                        op
                    }
                    other => {
                        return Err(self.syntax_err(format!(
                            "expected comparison operator, found {other}"
                        )))
                    }
                };
                let rhs = self.date_expr()?;
                Ok(BoolExpr::Cmp(lhs, op, rhs))
            }
        }
    }

    fn bool_and(
        &mut self,
        ctx: BoolCtx,
        sync_span: &mut Option<Span>,
    ) -> Result<BoolExpr, LangError> {
        let mut lhs = self.bool_atom(ctx, sync_span)?;
        while self.peek().tok == Tok::AndAnd {
            self.bump();
            let rhs = self.bool_atom(ctx, sync_span)?;
            lhs = BoolExpr::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn bool_expr(
        &mut self,
        ctx: BoolCtx,
        sync_span: &mut Option<Span>,
    ) -> Result<BoolExpr, LangError> {
        let mut lhs = self.bool_and(ctx, sync_span)?;
        while self.peek().tok == Tok::OrOr {
            self.bump();
            let rhs = self.bool_and(ctx, sync_span)?;
            lhs = BoolExpr::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn stmt(&mut self) -> Result<(Stmt, Span, Option<Span>), LangError> {
        let t = self.peek().clone();
        let span = Span { line: t.line, col: t.col, end_col: t.end_col };
        match t.tok.clone() {
            Tok::Ident(kw) if kw == "date" => {
                self.bump();
                let (name, ntok) = self.expect_ident()?;
                if self.defined.iter().any(|d| d == &name) {
                    return Err(self.err_at(LangErrorKind::Redefinition(name), &ntok));
                }
                self.expect(Tok::Assign)?;
                let expr = self.date_expr()?;
                self.expect(Tok::Semi)?;
                self.defined.push(name.clone());
                Ok((Stmt::DateDecl { name, expr }, span, None))
            }
            Tok::Ident(kw) if kw == "assume" || kw == "assert" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let ctx = if kw == "assume" {
                    BoolCtx::Assume
                } else {
                    BoolCtx::Assert { under_sync: false }
                };
                let mut sync_span = None;
                let body = self.bool_expr(ctx, &mut sync_span)?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::Semi)?;
                let stmt = if kw == "assume" {
                    Stmt::Assume(body)
                } else {
                    Stmt::Assert(body)
                };
                Ok((stmt, span, sync_span))
            }
            other => Err(self.syntax_err(format!(
                "expected `date`, `assume` or `assert`, found {other}"
            ))),
        }
    }
}

/// Parse a `.dl` source into a validated program.
pub fn parse(source: &str) -> Result<Parsed, LangError> {
    let toks = lex(source)?;
    let mut parser = Parser { toks, pos: 0, defined: Vec::new() };
    let mut stmts = Vec::new();
    let mut stmt_spans = Vec::new();
    let mut sync_arg_spans = Vec::new();
    while parser.peek().tok != Tok::Eof {
        let (stmt, span, sync_span) = parser.stmt()?;
        stmts.push(stmt);
        stmt_spans.push(span);
        sync_arg_spans.push(sync_span);
    }
    Ok(Parsed {
        program: Program { stmts },
        stmt_spans,
        sync_arg_spans,
        source: source.to_string(),
    })
}
