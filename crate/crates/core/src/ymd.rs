//! The YMD domain combinator: dates are encoded as triples of ghost
//! numerical variables `y#v`, `m#v`, `d#v` (with a `u.`/`d.` prefix when a
//! variable is split between rounding modes). Transfer functions translate
//! date operations into `assign`/`assume` constraints over those ghosts and
//! return case disjunctions.

use crate::date::{RoundingMode, YmdTriple};
use crate::lang::RelOp;
use crate::numdom::{Interval, NumCond, NumExpr, NumVar, ProductState, MAX_CARD};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use std::collections::BTreeSet;
use thiserror::Error;

/// Which component of a date a ghost variable carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DateComponent {
    Year,
    Month,
    Day,
}

/// Whether a date variable is shared between the two rounding modes or has
/// diverged into per-mode copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ModeTag {
    Synced,
    Up,
    Down,
}

impl ModeTag {
    pub fn prefix(self) -> &'static str {
        match self {
            ModeTag::Synced => "",
            ModeTag::Up => "u.",
            ModeTag::Down => "d.",
        }
    }
}

/// Ghost variable for one component of a date variable. `#` is not an
/// identifier character in the source language, so ghosts never collide
/// with program variables.
pub fn ghost_var(base: &str, comp: DateComponent, tag: ModeTag) -> NumVar {
    let c = match comp {
        DateComponent::Year => 'y',
        DateComponent::Month => 'm',
        DateComponent::Day => 'd',
    };
    NumVar::new(format!("{}{c}#{base}", tag.prefix()))
}

/// A registered ghost triple within a numerical state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DateHandle {
    pub year: NumVar,
    pub month: NumVar,
    pub day: NumVar,
}

impl DateHandle {
    pub fn new(base: &str, tag: ModeTag) -> DateHandle {
        DateHandle {
            year: ghost_var(base, DateComponent::Year, tag),
            month: ghost_var(base, DateComponent::Month, tag),
            day: ghost_var(base, DateComponent::Day, tag),
        }
    }

    pub fn vars(&self) -> [&NumVar; 3] {
        [&self.year, &self.month, &self.day]
    }
}

/// Accessor transfer functions: the ghost variable as an expression.
pub fn year_of(h: &DateHandle) -> NumExpr {
    NumExpr::var(&h.year)
}

pub fn month_of(h: &DateHandle) -> NumExpr {
    NumExpr::var(&h.month)
}

pub fn day_of(h: &DateHandle) -> NumExpr {
    NumExpr::var(&h.day)
}

/// One branch of a case disjunction.
#[derive(Debug, Clone)]
pub struct Case<T> {
    pub label: &'static str,
    pub state: ProductState,
    pub result: T,
}

pub type DateCases = Vec<Case<DateHandle>>;
pub type BoolCases = Vec<Case<bool>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum YmdError {
    /// Day addition has no abstract transfer function; the analyzer rejects
    /// programs that need it.
    #[error("day addition is not supported by the abstract domain")]
    UnsupportedDayAddition,
}

fn cmp(lhs: NumExpr, op: RelOp, rhs: i64) -> NumCond {
    NumCond::cmp(lhs, op, NumExpr::Const(rhs))
}

fn eq_expr(lhs: NumExpr, rhs: NumExpr) -> NumCond {
    NumCond::cmp(lhs, RelOp::Eq, rhs)
}

pub fn register_handle(state: &mut ProductState, h: &DateHandle) {
    for v in h.vars() {
        state.add_var(v.clone());
    }
}

/// Months of `h` not excluded by the cheap per-variable components.
fn feasible_months(state: &ProductState, h: &DateHandle) -> Vec<i64> {
    let itv = state.interval_of(&h.month);
    let cng = state.congruence_of(&h.month);
    let set = state.set_of(&h.month);
    (1..=12)
        .filter(|&m| {
            let b = BigInt::from(m);
            itv.contains(&b) && cng.contains(&b) && set.map_or(true, |s| s.contains(&m))
        })
        .collect()
}

/// Whether `year(h)` may be divisible by 4 (necessary for a 29 February).
fn year_can_be_leap(state: &ProductState, h: &DateHandle) -> bool {
    let c = state.congruence_of(&h.year);
    if let Some(k) = state.interval_of(&h.year).as_constant() {
        if !k.mod_floor(&BigInt::from(4)).is_zero() {
            return false;
        }
    }
    if c.modulus.is_zero() {
        c.residue.mod_floor(&BigInt::from(4)).is_zero()
    } else {
        // x ≡ residue (mod modulus) meets x ≡ 0 (mod 4) iff gcd | residue.
        c.residue.mod_floor(&c.modulus.gcd(&BigInt::from(4))).is_zero()
    }
}

/// Month membership as a condition; a set disjunction when small enough for
/// the powerset bound, interval-hull bounds otherwise.
fn month_in(h: &DateHandle, months: &[i64]) -> NumCond {
    if months.len() <= MAX_CARD {
        NumCond::var_in(&h.month, months)
    } else {
        let (lo, hi) = (months[0], months[months.len() - 1]);
        cmp(month_of(h), RelOp::Ge, lo).and(cmp(month_of(h), RelOp::Le, hi))
    }
}

/// Strengthening: removes (some) invalid dates, never valid ones. Validity
/// is a disjunction over month classes (short February, leap February with
/// year divisibility by 4 as the necessary condition, 30-day months, 31-day
/// months); classes already excluded by the state's per-variable facts are
/// pruned first, so the common constrained cases reduce to a plain
/// conjunctive `assume` instead of a chain of joins.
pub fn strengthen(state: &ProductState, h: &DateHandle) -> ProductState {
    if state.is_bottom() {
        return state.clone();
    }
    let s = state.assume(
        &cmp(day_of(h), RelOp::Ge, 1)
            .and(cmp(day_of(h), RelOp::Le, 31))
            .and(cmp(month_of(h), RelOp::Ge, 1))
            .and(cmp(month_of(h), RelOp::Le, 12)),
    );
    if s.is_bottom() {
        return s;
    }
    let months = feasible_months(&s, h);
    let day = s.interval_of(&h.day);
    let day_can_be_le = |k: i64| !day.meet(&Interval::bounded(1, k)).is_empty();
    let feb = months.contains(&2);
    let m30: Vec<i64> = months.iter().copied().filter(|m| [4, 6, 9, 11].contains(m)).collect();
    let m31: Vec<i64> =
        months.iter().copied().filter(|m| [1, 3, 5, 7, 8, 10, 12].contains(m)).collect();
    let mut classes: Vec<NumCond> = Vec::new();
    if feb && day_can_be_le(28) {
        classes.push(cmp(month_of(h), RelOp::Eq, 2).and(cmp(day_of(h), RelOp::Le, 28)));
    }
    if feb && day.contains(&BigInt::from(29)) && year_can_be_leap(&s, h) {
        classes.push(
            cmp(month_of(h), RelOp::Eq, 2)
                .and(cmp(day_of(h), RelOp::Eq, 29))
                .and(cmp(year_of(h).modulo(4), RelOp::Eq, 0)),
        );
    }
    if !m30.is_empty() && day_can_be_le(30) {
        classes.push(month_in(h, &m30).and(cmp(day_of(h), RelOp::Le, 30)));
    }
    if !m31.is_empty() {
        classes.push(month_in(h, &m31));
    }
    match classes.as_slice() {
        [] => s.to_bottom(),
        [only] => s.assume(only),
        _ => {
            // Conjunctive approximation of the surviving disjunction: the
            // weakest day bound and the month hull. A full join would not
            // retain more — relational facts differ per class.
            let day_hi = if !m31.is_empty() {
                31
            } else if !m30.is_empty() {
                30
            } else if classes.len() == 2 && feb {
                29
            } else {
                28
            };
            let mut all = Vec::new();
            if feb {
                all.push(2);
            }
            all.extend(&m30);
            all.extend(&m31);
            let (lo, hi) = (*all.iter().min().unwrap(), *all.iter().max().unwrap());
            s.assume(
                &cmp(day_of(h), RelOp::Le, day_hi)
                    .and(cmp(month_of(h), RelOp::Ge, lo))
                    .and(cmp(month_of(h), RelOp::Le, hi)),
            )
        }
    }
}

/// Field refinement at the YMD level: numerical assume followed by
/// re-strengthening, so conditional validity facts (February implies
/// day ≤ 29, day = 31 excludes short months, …) become unconditional.
pub fn assume_field(
    state: &ProductState,
    h: &DateHandle,
    comp: DateComponent,
    op: RelOp,
    value: i64,
) -> ProductState {
    let e = match comp {
        DateComponent::Year => year_of(h),
        DateComponent::Month => month_of(h),
        DateComponent::Day => day_of(h),
    };
    strengthen(&state.assume(&cmp(e, op, value)), h)
}

/// Register `v` as an arbitrary valid date.
pub fn mk_random_date(state: &ProductState, h: &DateHandle) -> ProductState {
    let mut s = state.clone();
    register_handle(&mut s, h);
    let s = s
        .assume(&cmp(day_of(h), RelOp::Ge, 1).and(cmp(day_of(h), RelOp::Le, 31)))
        .assume(&cmp(month_of(h), RelOp::Ge, 1).and(cmp(month_of(h), RelOp::Le, 12)));
    strengthen(&s, h)
}

/// Register `h` as the concrete date `t`.
pub fn mk_literal(state: &ProductState, h: &DateHandle, t: YmdTriple) -> ProductState {
    let mut s = state.clone();
    register_handle(&mut s, h);
    s.assume(&cmp(year_of(h), RelOp::Eq, t.year))
        .assume(&cmp(month_of(h), RelOp::Eq, t.month))
        .assume(&cmp(day_of(h), RelOp::Eq, t.day))
}

/// `dst` is the first day of `src`'s month.
pub fn first_day_of(state: &ProductState, src: &DateHandle, dst: &DateHandle) -> ProductState {
    let mut s = state.clone();
    register_handle(&mut s, dst);
    s.assume(&eq_expr(year_of(dst), year_of(src)))
        .assume(&eq_expr(month_of(dst), month_of(src)))
        .assume(&cmp(day_of(dst), RelOp::Eq, 1))
}

/// `dst` is the last day of `src`'s month: case split on the month class.
/// The Feb 29 case keeps divisibility by 4 only as a necessary condition,
/// so the 28 case is not pruned for leap years.
pub fn last_day_of(state: &ProductState, src: &DateHandle, dst: &DateHandle) -> DateCases {
    let mut base = state.clone();
    register_handle(&mut base, dst);
    let base = base
        .assume(&eq_expr(year_of(dst), year_of(src)))
        .assume(&eq_expr(month_of(dst), month_of(src)));
    let mut cases = DateCases::new();
    let mut push = |label, s: ProductState| {
        cases.push(Case { label, state: s, result: dst.clone() });
    };
    push(
        "31-day month",
        base.assume(
            &NumCond::var_in(&dst.month, &[1, 3, 5, 7, 8, 10, 12])
                .and(cmp(day_of(dst), RelOp::Eq, 31)),
        ),
    );
    push(
        "30-day month",
        base.assume(
            &NumCond::var_in(&dst.month, &[4, 6, 9, 11]).and(cmp(day_of(dst), RelOp::Eq, 30)),
        ),
    );
    push(
        "leap February",
        base.assume(
            &cmp(month_of(dst), RelOp::Eq, 2)
                .and(cmp(day_of(dst), RelOp::Eq, 29))
                .and(cmp(year_of(dst).modulo(4), RelOp::Eq, 0)),
        ),
    );
    push(
        "common February",
        base.assume(&cmp(month_of(dst), RelOp::Eq, 2).and(cmp(day_of(dst), RelOp::Eq, 28))),
    );
    cases
}

/// Abstract month addition at a fixed rounding mode (Up or Down): the
/// four-way case disjunction over rounding behavior. `nb_m` must be a
/// concrete integer.
pub fn add_months_abs(
    mode: RoundingMode,
    state: &ProductState,
    src: &DateHandle,
    nb_m: i64,
    dst: &DateHandle,
) -> DateCases {
    assert!(
        matches!(mode, RoundingMode::Up | RoundingMode::Down),
        "abstract month addition is defined for Up and Down only"
    );
    let q = NumVar::new("$am.q");
    let rm0 = NumVar::new("$am.rm0"); // res_month − 1 ∈ [0,11]
    let ry = NumVar::new("$am.ry");
    // month − 1 + nb_m = 12·q + rm0 exactly; res_year = year + q.
    let base = state.assign_quot_rem(
        &q,
        &rm0,
        &month_of(src).sub(NumExpr::Const(1)).add(NumExpr::Const(nb_m)),
        12,
    );
    let base = base.assign(&ry, &year_of(src).add(NumExpr::var(&q)));
    let temps: BTreeSet<NumVar> = [q, rm0.clone(), ry.clone()].into_iter().collect();
    let res_month_is = |c: i64| cmp(NumExpr::var(&rm0), RelOp::Eq, c - 1);
    // leap(y) abstracted as y ≡ 0 (mod 4): sound on 1901–2099 and kept as a
    // necessary condition elsewhere.
    let leap_ry = cmp(NumExpr::var(&ry).modulo(4), RelOp::Eq, 0);

    // Rounded result: day `rounded` of the result month (Down) or the first
    // day of the following month (Up). The rounding cases pin res_month to
    // {2, 4, 6, 9, 11}, so the following month is res_month + 1 in the same
    // year and the December wrap-around cannot occur.
    let finish_round = |s: ProductState, rounded: i64| -> ProductState {
        let mut s = s;
        register_handle(&mut s, dst);
        let s = match mode {
            RoundingMode::Down => s
                .assume(&cmp(day_of(dst), RelOp::Eq, rounded))
                .assume(&eq_expr(month_of(dst), NumExpr::var(&rm0).add(NumExpr::Const(1)))),
            _ => s
                .assume(&cmp(day_of(dst), RelOp::Eq, 1))
                .assume(&eq_expr(month_of(dst), NumExpr::var(&rm0).add(NumExpr::Const(2)))),
        };
        s.assume(&eq_expr(year_of(dst), NumExpr::var(&ry))).project_out(&temps)
    };

    let mut cases = DateCases::new();
    // Each guard refines the source date, so the source is re-strengthened
    // afterwards (e.g. February with day > 28 collapses to day 29 with the
    // year divisible by 4).
    let s = base.assume(&cmp(day_of(src), RelOp::Gt, 29).and(res_month_is(2)).and(leap_ry));
    cases.push(Case {
        label: "Rounding to 29 Feb. of a leap year",
        state: finish_round(strengthen(&s, src), 29),
        result: dst.clone(),
    });
    // No ¬leap conjunct here: with leap abstracted modulo 4, the complement
    // would wrongly exclude century years such as 2100 that do round to 28.
    let s = base.assume(&cmp(day_of(src), RelOp::Gt, 28).and(res_month_is(2)));
    cases.push(Case {
        label: "Rounding to 28 Feb. of a non-leap year",
        state: finish_round(strengthen(&s, src), 28),
        result: dst.clone(),
    });
    let s = base.assume(
        &cmp(day_of(src), RelOp::Gt, 30)
            .and(NumCond::var_in(&rm0, &[3, 5, 8, 10])),
    );
    cases.push(Case {
        label: "Rounding to a 30-day month",
        state: finish_round(strengthen(&s, src), 30),
        result: dst.clone(),
    });
    // No rounding: day carried over unchanged; strengthening prunes the
    // combinations that would form an invalid date (and thus concretely
    // fall into one of the rounding cases).
    let mut s = base;
    register_handle(&mut s, dst);
    let s = s
        .assume(&eq_expr(day_of(dst), day_of(src)))
        .assume(&eq_expr(month_of(dst), NumExpr::var(&rm0).add(NumExpr::Const(1))))
        .assume(&eq_expr(year_of(dst), NumExpr::var(&ry)));
    let s = strengthen(&s, dst).project_out(&temps);
    cases.push(Case { label: "No rounding", state: s, result: dst.clone() });
    cases
}

/// Period addition reduced to month addition (`d +y n = d +m 12n`).
pub fn add_period_abs(
    mode: RoundingMode,
    state: &ProductState,
    src: &DateHandle,
    p: crate::date::Period,
    dst: &DateHandle,
) -> Result<DateCases, YmdError> {
    if p.days != 0 {
        return Err(YmdError::UnsupportedDayAddition);
    }
    Ok(add_months_abs(mode, state, src, 12 * p.years + p.months, dst))
}

fn years_eq(d1: &DateHandle, d2: &DateHandle) -> NumCond {
    eq_expr(year_of(d1), year_of(d2))
}

fn months_eq(d1: &DateHandle, d2: &DateHandle) -> NumCond {
    eq_expr(month_of(d1), month_of(d2))
}

/// Lexicographic comparison `d1 < d2`: the six guarded cases.
pub fn dates_lt(state: &ProductState, d1: &DateHandle, d2: &DateHandle) -> BoolCases {
    dates_lex(state, d1, d2, RelOp::Lt)
}

/// `d1 ≤ d2` — same enumeration with the final-day guard adjusted.
pub fn dates_le(state: &ProductState, d1: &DateHandle, d2: &DateHandle) -> BoolCases {
    dates_lex(state, d1, d2, RelOp::Le)
}

fn dates_lex(state: &ProductState, d1: &DateHandle, d2: &DateHandle, day_op: RelOp) -> BoolCases {
    let cmp2 = |a: NumExpr, op: RelOp, b: NumExpr| NumCond::cmp(a, op, b);
    vec![
        Case {
            label: "year <",
            state: state.assume(&cmp2(year_of(d1), RelOp::Lt, year_of(d2))),
            result: true,
        },
        Case {
            label: "year >",
            state: state.assume(&cmp2(year_of(d1), RelOp::Gt, year_of(d2))),
            result: false,
        },
        Case {
            label: "month <",
            state: state
                .assume(&years_eq(d1, d2).and(cmp2(month_of(d1), RelOp::Lt, month_of(d2)))),
            result: true,
        },
        Case {
            label: "month >",
            state: state
                .assume(&years_eq(d1, d2).and(cmp2(month_of(d1), RelOp::Gt, month_of(d2)))),
            result: false,
        },
        Case {
            label: "day",
            state: state.assume(
                &years_eq(d1, d2)
                    .and(months_eq(d1, d2))
                    .and(cmp2(day_of(d1), day_op, day_of(d2))),
            ),
            result: true,
        },
        Case {
            label: "day (negated)",
            state: state.assume(
                &years_eq(d1, d2)
                    .and(months_eq(d1, d2))
                    .and(cmp2(day_of(d1), day_op.negate(), day_of(d2))),
            ),
            result: false,
        },
    ]
}

/// `d1 = d2` by the same lexicographic enumeration.
pub fn dates_eq(state: &ProductState, d1: &DateHandle, d2: &DateHandle) -> BoolCases {
    let cmp2 = |a: NumExpr, op: RelOp, b: NumExpr| NumCond::cmp(a, op, b);
    vec![
        Case {
            label: "all equal",
            state: state.assume(
                &years_eq(d1, d2)
                    .and(months_eq(d1, d2))
                    .and(cmp2(day_of(d1), RelOp::Eq, day_of(d2))),
            ),
            result: true,
        },
        Case {
            label: "year ≠",
            state: state.assume(&cmp2(year_of(d1), RelOp::Ne, year_of(d2))),
            result: false,
        },
        Case {
            label: "month ≠",
            state: state
                .assume(&years_eq(d1, d2).and(cmp2(month_of(d1), RelOp::Ne, month_of(d2)))),
            result: false,
        },
        Case {
            label: "day ≠",
            state: state.assume(
                &years_eq(d1, d2)
                    .and(months_eq(d1, d2))
                    .and(cmp2(day_of(d1), RelOp::Ne, day_of(d2))),
            ),
            result: false,
        },
    ]
}

/// Comparison dispatch: every relational operator by lexicographic
/// enumeration (Gt/Ge swap the operands, Ne flips the booleans).
pub fn dates_cmp(
    state: &ProductState,
    d1: &DateHandle,
    op: RelOp,
    d2: &DateHandle,
) -> BoolCases {
    match op {
        RelOp::Lt => dates_lt(state, d1, d2),
        RelOp::Le => dates_le(state, d1, d2),
        RelOp::Gt => dates_lt(state, d2, d1),
        RelOp::Ge => dates_le(state, d2, d1),
        RelOp::Eq => dates_eq(state, d1, d2),
        RelOp::Ne => dates_eq(state, d1, d2)
            .into_iter()
            .map(|c| Case { label: c.label, state: c.state, result: !c.result })
            .collect(),
    }
}

/// Executable γ-membership: each handle is substituted by its concrete
/// triple (all of which must be valid dates) and the numerical state is
/// checked to contain the induced integer point.
pub fn gamma_member(state: &ProductState, env: &[(&DateHandle, YmdTriple)]) -> bool {
    if env.iter().any(|(_, t)| !t.is_valid()) {
        return false;
    }
    let mut point = std::collections::BTreeMap::new();
    for (h, t) in env {
        point.insert(h.year.clone(), t.year);
        point.insert(h.month.clone(), t.month);
        point.insert(h.day.clone(), t.day);
    }
    state.contains_point(&point)
}
