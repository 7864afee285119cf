//! Numerical abstract domains: intervals, per-variable congruences, a
//! bounded powerset of integers, integer polyhedra, and relational linear
//! congruences (grids), combined in a reduced product with `assign`/`assume`
//! transfer functions over integer expressions.

pub mod congr;
pub mod grid;
pub mod interval;
pub mod linexpr;
pub mod matrix;
pub mod poly;
pub mod product;
pub mod set;

pub use congr::Congruence;
pub use grid::Grid;
pub use interval::Interval;
pub use linexpr::{Fresh, LinExpr};
pub use poly::{ConsOp, LinCons, Polyhedron};
pub use product::ProductState;
pub use set::{IntSet, MAX_CARD};

use crate::lang::RelOp;
use std::fmt;
use std::sync::Arc;

/// Opaque numeric variable identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NumVar(Arc<str>);

impl NumVar {
    pub fn new(name: impl AsRef<str>) -> Self {
        NumVar(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NumVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Integer expressions over numeric variables. Division is floor division by
/// a positive constant; modulo is the matching non-negative remainder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NumExpr {
    Var(NumVar),
    Const(i64),
    Add(Box<NumExpr>, Box<NumExpr>),
    Sub(Box<NumExpr>, Box<NumExpr>),
    Mul(Box<NumExpr>, Box<NumExpr>),
    Div(Box<NumExpr>, i64),
    Mod(Box<NumExpr>, i64),
}

impl NumExpr {
    pub fn var(v: &NumVar) -> NumExpr {
        NumExpr::Var(v.clone())
    }

    pub fn add(self, other: NumExpr) -> NumExpr {
        NumExpr::Add(Box::new(self), Box::new(other))
    }

    pub fn sub(self, other: NumExpr) -> NumExpr {
        NumExpr::Sub(Box::new(self), Box::new(other))
    }

    pub fn mul(self, other: NumExpr) -> NumExpr {
        NumExpr::Mul(Box::new(self), Box::new(other))
    }

    pub fn div_floor(self, k: i64) -> NumExpr {
        assert!(k > 0, "divisor must be positive");
        NumExpr::Div(Box::new(self), k)
    }

    pub fn modulo(self, k: i64) -> NumExpr {
        assert!(k > 0, "modulus must be positive");
        NumExpr::Mod(Box::new(self), k)
    }
}

/// Boolean conditions fed to `assume`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NumCond {
    True,
    False,
    Cmp(NumExpr, RelOp, NumExpr),
    And(Box<NumCond>, Box<NumCond>),
    Or(Box<NumCond>, Box<NumCond>),
    Not(Box<NumCond>),
}

impl NumCond {
    pub fn cmp(lhs: NumExpr, op: RelOp, rhs: NumExpr) -> NumCond {
        NumCond::Cmp(lhs, op, rhs)
    }

    pub fn and(self, other: NumCond) -> NumCond {
        NumCond::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: NumCond) -> NumCond {
        NumCond::Or(Box::new(self), Box::new(other))
    }

    pub fn negated(self) -> NumCond {
        NumCond::Not(Box::new(self))
    }

    /// Conjunction of equalities `v = c` joined disjunctively: `v ∈ set`.
    pub fn var_in(v: &NumVar, values: &[i64]) -> NumCond {
        values
            .iter()
            .map(|&c| NumCond::cmp(NumExpr::var(v), RelOp::Eq, NumExpr::Const(c)))
            .reduce(|a, b| a.or(b))
            .unwrap_or(NumCond::False)
    }
}

/// Concrete evaluation with floor semantics, used by the test oracles.
pub fn eval_num_expr(e: &NumExpr, env: &impl Fn(&NumVar) -> i64) -> i64 {
    match e {
        NumExpr::Var(v) => env(v),
        NumExpr::Const(c) => *c,
        NumExpr::Add(a, b) => eval_num_expr(a, env) + eval_num_expr(b, env),
        NumExpr::Sub(a, b) => eval_num_expr(a, env) - eval_num_expr(b, env),
        NumExpr::Mul(a, b) => eval_num_expr(a, env) * eval_num_expr(b, env),
        NumExpr::Div(a, k) => eval_num_expr(a, env).div_euclid(*k),
        NumExpr::Mod(a, k) => eval_num_expr(a, env).rem_euclid(*k),
    }
}

pub fn eval_num_cond(c: &NumCond, env: &impl Fn(&NumVar) -> i64) -> bool {
    match c {
        NumCond::True => true,
        NumCond::False => false,
        NumCond::Cmp(a, op, b) => {
            op.eval(eval_num_expr(a, env).cmp(&eval_num_expr(b, env)))
        }
        NumCond::And(a, b) => eval_num_cond(a, env) && eval_num_cond(b, env),
        NumCond::Or(a, b) => eval_num_cond(a, env) || eval_num_cond(b, env),
        NumCond::Not(a) => !eval_num_cond(a, env),
    }
}
