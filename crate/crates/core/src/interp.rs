//! Concrete reference interpreter for the analysis language: evaluation at a
//! single rounding mode, and the double-mode product semantics where every
//! expression is evaluated simultaneously under up- and down-rounding with
//! shared random draws.

use crate::date::{self, add_period, nb_days, DateValue, RoundingMode, YmdTriple};
use crate::lang::{BoolExpr, DateExpr, Field, Program, Stmt};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;

pub type Env = BTreeMap<String, DateValue>;

/// Inclusive year range from which `random_date()` draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct YearRange {
    pub lo: i64,
    pub hi: i64,
}

impl Default for YearRange {
    // Wide enough to include century non-leap years.
    fn default() -> Self {
        YearRange { lo: 1900, hi: 2100 }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RuntimeError {
    /// A comparison or assignment observed ⊥, i.e. a rounding decision was
    /// required but the mode refused to make one.
    #[error("ambiguous date computation reached ⊥ at statement {stmt}")]
    Ambiguity { stmt: usize },
}

/// Outcome of running a program once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    /// All statements executed; one entry per `assert`, in program order.
    Finished { asserts: Vec<bool> },
    /// An `assume` did not hold; the execution is discarded.
    AssumeViolated { stmt: usize },
}

impl RunOutcome {
    pub fn all_asserts_pass(&self) -> bool {
        match self {
            RunOutcome::Finished { asserts } => asserts.iter().all(|b| *b),
            RunOutcome::AssumeViolated { .. } => true,
        }
    }
}

fn random_valid_date(rng: &mut ChaCha8Rng, range: YearRange) -> YmdTriple {
    // Uniform over valid dates: draw raw triples with day in 1..=31 and
    // reject day-invalid ones.
    loop {
        let year = rng.gen_range(range.lo..=range.hi);
        let month = rng.gen_range(1i64..=12);
        let day = rng.gen_range(1i64..=31);
        if day <= nb_days(year, month) {
            return YmdTriple::new(year, month, day);
        }
    }
}

/// Evaluate a date expression at a fixed rounding mode.
pub fn eval_expr(
    mode: RoundingMode,
    expr: &DateExpr,
    env: &Env,
    rng: &mut ChaCha8Rng,
    range: YearRange,
) -> DateValue {
    match expr {
        DateExpr::Var(name) => *env.get(name).expect("unbound variable"),
        DateExpr::Literal(t) => DateValue::Date(*t),
        DateExpr::RandomDate => DateValue::Date(random_valid_date(rng, range)),
        DateExpr::AddPeriod(inner, p) => {
            add_period(mode, eval_expr(mode, inner, env, rng, range), *p)
        }
        DateExpr::FirstDayOf(inner) => match eval_expr(mode, inner, env, rng, range) {
            DateValue::Date(t) => DateValue::date(t.year, t.month, 1),
            DateValue::Bottom => DateValue::Bottom,
        },
        DateExpr::LastDayOf(inner) => match eval_expr(mode, inner, env, rng, range) {
            DateValue::Date(t) => DateValue::date(t.year, t.month, nb_days(t.year, t.month)),
            DateValue::Bottom => DateValue::Bottom,
        },
    }
}

fn field_of(t: YmdTriple, field: Field) -> i64 {
    match field {
        Field::Year => t.year,
        Field::Month => t.month,
        Field::Day => t.day,
    }
}

fn eval_bool(
    mode: RoundingMode,
    expr: &BoolExpr,
    env: &Env,
    rng: &mut ChaCha8Rng,
    range: YearRange,
    stmt: usize,
) -> Result<bool, RuntimeError> {
    match expr {
        // At a fixed mode, sync degenerates to its argument's value.
        BoolExpr::Sync(inner) => eval_bool(mode, inner, env, rng, range, stmt),
        BoolExpr::Cmp(lhs, op, rhs) => {
            let a = eval_expr(mode, lhs, env, rng, range);
            let b = eval_expr(mode, rhs, env, rng, range);
            match (a, b) {
                (DateValue::Date(a), DateValue::Date(b)) => Ok(op.eval(date::compare(a, b))),
                _ => Err(RuntimeError::Ambiguity { stmt }),
            }
        }
        BoolExpr::FieldCmp(field, var, op, n) => {
            match env.get(var).expect("unbound variable") {
                DateValue::Date(t) => Ok(op.eval(field_of(*t, *field).cmp(n))),
                DateValue::Bottom => Err(RuntimeError::Ambiguity { stmt }),
            }
        }
        BoolExpr::And(l, r) => Ok(eval_bool(mode, l, env, rng, range, stmt)?
            && eval_bool(mode, r, env, rng, range, stmt)?),
        BoolExpr::Or(l, r) => Ok(eval_bool(mode, l, env, rng, range, stmt)?
            || eval_bool(mode, r, env, rng, range, stmt)?),
        BoolExpr::Not(inner) => Ok(!eval_bool(mode, inner, env, rng, range, stmt)?),
    }
}

/// Run a program at a single rounding mode.
pub fn run_single(
    program: &Program,
    mode: RoundingMode,
    seed: u64,
    range: YearRange,
) -> Result<(RunOutcome, Env), RuntimeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut env = Env::new();
    let mut asserts = Vec::new();
    for (i, stmt) in program.stmts.iter().enumerate() {
        match stmt {
            Stmt::DateDecl { name, expr } => {
                let v = eval_expr(mode, expr, &env, &mut rng, range);
                if v.is_bottom() {
                    return Err(RuntimeError::Ambiguity { stmt: i });
                }
                env.insert(name.clone(), v);
            }
            Stmt::Assume(b) => {
                if !eval_bool(mode, b, &env, &mut rng, range, i)? {
                    return Ok((RunOutcome::AssumeViolated { stmt: i }, env));
                }
            }
            Stmt::Assert(b) => {
                asserts.push(eval_bool(mode, b, &env, &mut rng, range, i)?);
            }
        }
    }
    Ok((RunOutcome::Finished { asserts }, env))
}

/// Both-mode environments after a double execution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DoubleEnv {
    pub up: Env,
    pub down: Env,
}

/// Evaluate a date expression pointwise in both rounding modes; random draws
/// are shared so both components see the same date.
fn eval_pair(
    expr: &DateExpr,
    envs: &DoubleEnv,
    rng: &mut ChaCha8Rng,
    range: YearRange,
) -> (DateValue, DateValue) {
    match expr {
        DateExpr::Var(name) => (
            *envs.up.get(name).expect("unbound variable"),
            *envs.down.get(name).expect("unbound variable"),
        ),
        DateExpr::Literal(t) => (DateValue::Date(*t), DateValue::Date(*t)),
        DateExpr::RandomDate => {
            let d = DateValue::Date(random_valid_date(rng, range));
            (d, d)
        }
        DateExpr::AddPeriod(inner, p) => {
            let (u, d) = eval_pair(inner, envs, rng, range);
            (
                add_period(RoundingMode::Up, u, *p),
                add_period(RoundingMode::Down, d, *p),
            )
        }
        DateExpr::FirstDayOf(inner) => {
            let first = |v: DateValue| match v {
                DateValue::Date(t) => DateValue::date(t.year, t.month, 1),
                DateValue::Bottom => DateValue::Bottom,
            };
            let (u, d) = eval_pair(inner, envs, rng, range);
            (first(u), first(d))
        }
        DateExpr::LastDayOf(inner) => {
            let last = |v: DateValue| match v {
                DateValue::Date(t) => DateValue::date(t.year, t.month, nb_days(t.year, t.month)),
                DateValue::Bottom => DateValue::Bottom,
            };
            let (u, d) = eval_pair(inner, envs, rng, range);
            (last(u), last(d))
        }
    }
}

fn eval_bool_pair(
    expr: &BoolExpr,
    envs: &DoubleEnv,
    rng: &mut ChaCha8Rng,
    range: YearRange,
    stmt: usize,
) -> Result<(bool, bool), RuntimeError> {
    match expr {
        BoolExpr::Sync(inner) => {
            let (bu, bd) = eval_bool_pair(inner, envs, rng, range, stmt)?;
            let synced = bu == bd;
            Ok((synced, synced))
        }
        BoolExpr::Cmp(lhs, op, rhs) => {
            let (lu, ld) = eval_pair(lhs, envs, rng, range);
            let (ru, rd) = eval_pair(rhs, envs, rng, range);
            let cmp = |a: DateValue, b: DateValue| match (a, b) {
                (DateValue::Date(a), DateValue::Date(b)) => Ok(op.eval(date::compare(a, b))),
                _ => Err(RuntimeError::Ambiguity { stmt }),
            };
            Ok((cmp(lu, ru)?, cmp(ld, rd)?))
        }
        BoolExpr::FieldCmp(field, var, op, n) => {
            let get = |env: &Env| match env.get(var).expect("unbound variable") {
                DateValue::Date(t) => Ok(op.eval(field_of(*t, *field).cmp(n))),
                DateValue::Bottom => Err(RuntimeError::Ambiguity { stmt }),
            };
            Ok((get(&envs.up)?, get(&envs.down)?))
        }
        BoolExpr::And(l, r) => {
            let (lu, ld) = eval_bool_pair(l, envs, rng, range, stmt)?;
            let (ru, rd) = eval_bool_pair(r, envs, rng, range, stmt)?;
            Ok((lu && ru, ld && rd))
        }
        BoolExpr::Or(l, r) => {
            let (lu, ld) = eval_bool_pair(l, envs, rng, range, stmt)?;
            let (ru, rd) = eval_bool_pair(r, envs, rng, range, stmt)?;
            Ok((lu || ru, ld || rd))
        }
        BoolExpr::Not(inner) => {
            let (bu, bd) = eval_bool_pair(inner, envs, rng, range, stmt)?;
            Ok((!bu, !bd))
        }
    }
}

/// Execute a program once under the pair semantics. Assignments evaluate
/// pointwise; an assert records whether both components hold (for a sync
/// assert, whether the two modes agreed).
pub fn run_double(
    program: &Program,
    seed: u64,
    range: YearRange,
) -> Result<(RunOutcome, DoubleEnv), RuntimeError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut envs = DoubleEnv { up: Env::new(), down: Env::new() };
    let mut asserts = Vec::new();
    for (i, stmt) in program.stmts.iter().enumerate() {
        match stmt {
            Stmt::DateDecl { name, expr } => {
                let (u, d) = eval_pair(expr, &envs, &mut rng, range);
                if u.is_bottom() || d.is_bottom() {
                    return Err(RuntimeError::Ambiguity { stmt: i });
                }
                envs.up.insert(name.clone(), u);
                envs.down.insert(name.clone(), d);
            }
            Stmt::Assume(b) => {
                let (bu, bd) = eval_bool_pair(b, &envs, &mut rng, range, i)?;
                if !bu || !bd {
                    return Ok((RunOutcome::AssumeViolated { stmt: i }, envs));
                }
            }
            Stmt::Assert(b) => {
                let (bu, bd) = eval_bool_pair(b, &envs, &mut rng, range, i)?;
                asserts.push(bu && bd);
            }
        }
    }
    Ok((RunOutcome::Finished { asserts }, envs))
}
