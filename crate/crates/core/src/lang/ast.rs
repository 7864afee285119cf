use crate::date::{Period, YmdTriple};
use std::fmt;

/// A straight-line, single-assignment program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub stmts: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    DateDecl { name: String, expr: DateExpr },
    Assume(BoolExpr),
    Assert(BoolExpr),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DateExpr {
    Var(String),
    Literal(YmdTriple),
    RandomDate,
    AddPeriod(Box<DateExpr>, Period),
    FirstDayOf(Box<DateExpr>),
    LastDayOf(Box<DateExpr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl RelOp {
    pub fn eval(self, ord: std::cmp::Ordering) -> bool {
        use std::cmp::Ordering::*;
        match self {
            RelOp::Lt => ord == Less,
            RelOp::Le => ord != Greater,
            RelOp::Gt => ord == Greater,
            RelOp::Ge => ord != Less,
            RelOp::Eq => ord == Equal,
            RelOp::Ne => ord != Equal,
        }
    }

    pub fn negate(self) -> RelOp {
        match self {
            RelOp::Lt => RelOp::Ge,
            RelOp::Le => RelOp::Gt,
            RelOp::Gt => RelOp::Le,
            RelOp::Ge => RelOp::Lt,
            RelOp::Eq => RelOp::Ne,
            RelOp::Ne => RelOp::Eq,
        }
    }
}

impl fmt::Display for RelOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
            RelOp::Eq => "==",
            RelOp::Ne => "!=",
        };
        f.write_str(s)
    }
}

/// Date component selected by an accessor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Year,
    Month,
    Day,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Field::Year => "year_of",
            Field::Month => "month_of",
            Field::Day => "day_of",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BoolExpr {
    Sync(Box<BoolExpr>),
    Cmp(DateExpr, RelOp, DateExpr),
    /// Accessor comparison against a constant, e.g. `day_of(birthday) <= 28`.
    /// Only legal inside `assume`.
    FieldCmp(Field, String, RelOp, i64),
    And(Box<BoolExpr>, Box<BoolExpr>),
    Or(Box<BoolExpr>, Box<BoolExpr>),
    Not(Box<BoolExpr>),
}

/// 1-based source position range on a single line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub line: u32,
    pub col: u32,
    pub end_col: u32,
}
