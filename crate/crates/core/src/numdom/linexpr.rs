//! Affine forms over numeric variables and the flattening of arbitrary
//! `NumExpr`s into affine expressions plus side constraints on fresh
//! temporaries (for floor-division and modulo) — the non-affine residue is
//! linearized by intervalization.

use super::interval::Interval;
use super::{NumExpr, NumVar};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// `Σ coeffs[v]·v + constant`; absent coefficient means 0.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinExpr {
    pub coeffs: BTreeMap<NumVar, BigInt>,
    pub constant: BigInt,
}

impl LinExpr {
    pub fn constant(c: impl Into<BigInt>) -> Self {
        LinExpr { coeffs: BTreeMap::new(), constant: c.into() }
    }

    pub fn var(v: NumVar) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v, BigInt::from(1));
        LinExpr { coeffs, constant: BigInt::zero() }
    }

    pub fn term(v: NumVar, coeff: impl Into<BigInt>) -> Self {
        let mut e = LinExpr::var(v);
        e.scale(&coeff.into());
        e
    }

    pub fn add_term(&mut self, v: &NumVar, coeff: &BigInt) {
        let entry = self.coeffs.entry(v.clone()).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.coeffs.remove(v);
        }
    }

    pub fn add(&mut self, other: &LinExpr) {
        for (v, c) in &other.coeffs {
            self.add_term(v, c);
        }
        self.constant += &other.constant;
    }

    pub fn sub(&mut self, other: &LinExpr) {
        for (v, c) in &other.coeffs {
            self.add_term(v, &-c.clone());
        }
        self.constant -= &other.constant;
    }

    pub fn scale(&mut self, k: &BigInt) {
        if k.is_zero() {
            self.coeffs.clear();
            self.constant = BigInt::zero();
            return;
        }
        for c in self.coeffs.values_mut() {
            *c *= k;
        }
        self.constant *= k;
    }

    pub fn negated(&self) -> LinExpr {
        let mut e = self.clone();
        e.scale(&BigInt::from(-1));
        e
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn as_constant(&self) -> Option<&BigInt> {
        self.is_constant().then_some(&self.constant)
    }

    /// The single (variable, coefficient) pair, when the form is univariate.
    pub fn as_univariate(&self) -> Option<(&NumVar, &BigInt)> {
        if self.coeffs.len() == 1 {
            self.coeffs.iter().next().map(|(v, c)| (v, c))
        } else {
            None
        }
    }

    pub fn eval(&self, env: &impl Fn(&NumVar) -> BigInt) -> BigInt {
        let mut acc = self.constant.clone();
        for (v, c) in &self.coeffs {
            acc += c * env(v);
        }
        acc
    }

    /// Interval of possible values under per-variable interval bounds.
    pub fn eval_interval(&self, itv: &impl Fn(&NumVar) -> Interval) -> Interval {
        let mut acc = Interval::constant(self.constant.clone());
        for (v, c) in &self.coeffs {
            acc = iv_add(&acc, &iv_scale(&itv(v), c));
        }
        acc
    }
}

impl fmt::Display for LinExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.coeffs {
            if first {
                if *c == BigInt::from(1) {
                    write!(f, "{v}")?;
                } else if *c == BigInt::from(-1) {
                    write!(f, "-{v}")?;
                } else {
                    write!(f, "{c}*{v}")?;
                }
                first = false;
            } else if c.is_negative() {
                let m = -c.clone();
                if m == BigInt::from(1) {
                    write!(f, " - {v}")?;
                } else {
                    write!(f, " - {m}*{v}")?;
                }
            } else if *c == BigInt::from(1) {
                write!(f, " + {v}")?;
            } else {
                write!(f, " + {c}*{v}")?;
            }
        }
        if first {
            write!(f, "{}", self.constant)?;
        } else if self.constant.is_positive() {
            write!(f, " + {}", self.constant)?;
        } else if self.constant.is_negative() {
            write!(f, " - {}", -self.constant.clone())?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Interval arithmetic helpers (finite-biased; unbounded operands widen).

pub fn iv_add(a: &Interval, b: &Interval) -> Interval {
    let lo = match (&a.lo, &b.lo) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    };
    let hi = match (&a.hi, &b.hi) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    };
    Interval { lo, hi }
}

pub fn iv_scale(a: &Interval, k: &BigInt) -> Interval {
    if k.is_zero() {
        return Interval::constant(0);
    }
    let (lo, hi) = if k.is_positive() {
        (a.lo.as_ref().map(|v| v * k), a.hi.as_ref().map(|v| v * k))
    } else {
        (a.hi.as_ref().map(|v| v * k), a.lo.as_ref().map(|v| v * k))
    };
    Interval { lo, hi }
}

pub fn iv_mul(a: &Interval, b: &Interval) -> Interval {
    if let Some(k) = a.as_constant() {
        return iv_scale(b, k);
    }
    if let Some(k) = b.as_constant() {
        return iv_scale(a, k);
    }
    match (&a.lo, &a.hi, &b.lo, &b.hi) {
        (Some(al), Some(ah), Some(bl), Some(bh)) => {
            let ps = [al * bl, al * bh, ah * bl, ah * bh];
            Interval {
                lo: ps.iter().min().cloned(),
                hi: ps.iter().max().cloned(),
            }
        }
        _ => Interval::top(),
    }
}

pub fn iv_div_floor(a: &Interval, k: &BigInt) -> Interval {
    debug_assert!(k.is_positive());
    let div = |v: &BigInt| num_integer::Integer::div_floor(v, k);
    Interval { lo: a.lo.as_ref().map(div), hi: a.hi.as_ref().map(div) }
}

pub fn iv_mod(a: &Interval, k: &BigInt) -> Interval {
    debug_assert!(k.is_positive());
    // If the whole interval lies inside one period, modulo is a shift.
    if let (Some(l), Some(h)) = (&a.lo, &a.hi) {
        let lq = num_integer::Integer::div_floor(l, k);
        let hq = num_integer::Integer::div_floor(h, k);
        if lq == hq {
            return Interval { lo: Some(l - &lq * k), hi: Some(h - &hq * k) };
        }
    }
    Interval::bounded(0, k - 1)
}

/// Interval evaluation of a full expression tree.
pub fn expr_interval(e: &NumExpr, itv: &impl Fn(&NumVar) -> Interval) -> Interval {
    match e {
        NumExpr::Var(v) => itv(v),
        NumExpr::Const(c) => Interval::constant(*c),
        NumExpr::Add(a, b) => iv_add(&expr_interval(a, itv), &expr_interval(b, itv)),
        NumExpr::Sub(a, b) => iv_add(
            &expr_interval(a, itv),
            &iv_scale(&expr_interval(b, itv), &BigInt::from(-1)),
        ),
        NumExpr::Mul(a, b) => iv_mul(&expr_interval(a, itv), &expr_interval(b, itv)),
        NumExpr::Div(a, k) => iv_div_floor(&expr_interval(a, itv), &BigInt::from(*k)),
        NumExpr::Mod(a, k) => iv_mod(&expr_interval(a, itv), &BigInt::from(*k)),
    }
}

// ---------------------------------------------------------------------------
// Flattening

/// Affine side constraint on temporaries: `expr = 0` or `expr ≤ 0`.
#[derive(Debug, Clone)]
pub enum TempCons {
    Eq(LinExpr),
    Le(LinExpr),
}

/// Result of flattening: an affine form over program variables plus fresh
/// temporaries, with the side constraints that define the temporaries.
#[derive(Debug, Clone, Default)]
pub struct Flattened {
    pub expr: LinExpr,
    pub temps: Vec<NumVar>,
    pub constraints: Vec<TempCons>,
}

/// Fresh temporary-variable supply. `$` never occurs in user or ghost
/// variable names, so temporaries cannot collide.
#[derive(Debug, Default)]
pub struct Fresh {
    next: usize,
}

impl Fresh {
    pub fn fresh(&mut self) -> NumVar {
        let v = NumVar::new(format!("${}", self.next));
        self.next += 1;
        v
    }
}

/// Flatten an expression to an affine form. Floor-division and modulo
/// introduce quotient/remainder temporaries with `u = k·q + rem ∧ 0 ≤ rem < k`;
/// non-affine products are intervalized via `itv`.
pub fn flatten(
    e: &NumExpr,
    fresh: &mut Fresh,
    itv: &impl Fn(&NumVar) -> Interval,
    out: &mut Flattened,
) -> LinExpr {
    match e {
        NumExpr::Var(v) => LinExpr::var(v.clone()),
        NumExpr::Const(c) => LinExpr::constant(*c),
        NumExpr::Add(a, b) => {
            let mut l = flatten(a, fresh, itv, out);
            let r = flatten(b, fresh, itv, out);
            l.add(&r);
            l
        }
        NumExpr::Sub(a, b) => {
            let mut l = flatten(a, fresh, itv, out);
            let r = flatten(b, fresh, itv, out);
            l.sub(&r);
            l
        }
        NumExpr::Mul(a, b) => {
            let l = flatten(a, fresh, itv, out);
            let r = flatten(b, fresh, itv, out);
            if let Some(k) = l.as_constant() {
                let mut r = r.clone();
                r.scale(k);
                r
            } else if let Some(k) = r.as_constant() {
                let mut l = l.clone();
                l.scale(k);
                l
            } else {
                // Non-affine product: intervalize the whole product into a
                // fresh bounded temporary.
                let bounds = iv_mul(&l.eval_interval(itv), &r.eval_interval(itv));
                let t = fresh.fresh();
                out.temps.push(t.clone());
                if let Some(lo) = &bounds.lo {
                    // lo − t ≤ 0
                    let mut c = LinExpr::term(t.clone(), -1);
                    c.constant += lo;
                    out.constraints.push(TempCons::Le(c));
                }
                if let Some(hi) = &bounds.hi {
                    // t − hi ≤ 0
                    let mut c = LinExpr::var(t.clone());
                    c.constant -= hi;
                    out.constraints.push(TempCons::Le(c));
                }
                LinExpr::var(t)
            }
        }
        NumExpr::Div(a, k) | NumExpr::Mod(a, k) => {
            assert!(*k > 0, "divisor/modulus must be a positive constant");
            let u = flatten(a, fresh, itv, out);
            let q = fresh.fresh();
            let rem = fresh.fresh();
            out.temps.push(q.clone());
            out.temps.push(rem.clone());
            // u − k·q − rem = 0
            let mut eq = u;
            eq.add_term(&q, &BigInt::from(-*k));
            eq.add_term(&rem, &BigInt::from(-1));
            out.constraints.push(TempCons::Eq(eq));
            // −rem ≤ 0 and rem − (k−1) ≤ 0
            out.constraints.push(TempCons::Le(LinExpr::term(rem.clone(), -1)));
            let mut hi = LinExpr::var(rem.clone());
            hi.constant -= BigInt::from(*k - 1);
            out.constraints.push(TempCons::Le(hi));
            match e {
                NumExpr::Div(..) => LinExpr::var(q),
                _ => LinExpr::var(rem),
            }
        }
    }
}
