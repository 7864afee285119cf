//! Conjunctions of integer linear constraints `Σaᵢxᵢ + c ≤ 0` / `= 0`.
//! Coefficients stay integral: constraints are normalized by their gcd with
//! integer tightening of the constant. Feasibility, entailment, and
//! projection all go through Fourier–Motzkin elimination (equalities are
//! substituted away first), with a size cap that degrades soundly.

use super::interval::Interval;
use super::linexpr::{iv_scale, LinExpr};
use super::NumVar;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Beyond this many constraints an elimination step drops the constraints
/// that mention the variable instead of combining them (a sound
/// over-approximation).
const ELIM_CAP: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConsOp {
    /// expr ≤ 0
    Le,
    /// expr = 0
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinCons {
    pub expr: LinExpr,
    pub op: ConsOp,
}

impl LinCons {
    pub fn le(expr: LinExpr) -> Self {
        LinCons { expr, op: ConsOp::Le }
    }

    pub fn eq(expr: LinExpr) -> Self {
        LinCons { expr, op: ConsOp::Eq }
    }

    pub fn holds(&self, env: &impl Fn(&NumVar) -> BigInt) -> bool {
        let v = self.expr.eval(env);
        match self.op {
            ConsOp::Le => !v.is_positive(),
            ConsOp::Eq => v.is_zero(),
        }
    }

    pub fn render(&self) -> String {
        // Move the constant to the right-hand side: Σaᵢvᵢ ≤ c.
        let mut lhs = self.expr.clone();
        let c = -std::mem::take(&mut lhs.constant);
        let op = match self.op {
            ConsOp::Le => "<=",
            ConsOp::Eq => "=",
        };
        format!("{lhs} {op} {c}")
    }
}

enum Normalized {
    True,
    False,
    Cons(LinCons),
}

fn normalize(mut cons: LinCons) -> Normalized {
    if cons.expr.is_constant() {
        let ok = match cons.op {
            ConsOp::Le => !cons.expr.constant.is_positive(),
            ConsOp::Eq => cons.expr.constant.is_zero(),
        };
        return if ok { Normalized::True } else { Normalized::False };
    }
    let g = cons
        .expr
        .coeffs
        .values()
        .fold(BigInt::zero(), |acc, c| acc.gcd(c));
    match cons.op {
        ConsOp::Le => {
            if !g.is_one() {
                for c in cons.expr.coeffs.values_mut() {
                    *c /= &g;
                }
                // Σ(a/g)x ≤ floor(−c/g), i.e. constant becomes ceil(c/g).
                let c = std::mem::take(&mut cons.expr.constant);
                cons.expr.constant = -(-c).div_floor(&g);
            }
        }
        ConsOp::Eq => {
            if !(&cons.expr.constant % &g).is_zero() {
                return Normalized::False;
            }
            if !g.is_one() {
                for c in cons.expr.coeffs.values_mut() {
                    *c /= &g;
                }
                cons.expr.constant /= &g;
            }
            // Canonical sign: leading coefficient positive.
            if cons.expr.coeffs.values().next().map_or(false, Signed::is_negative) {
                cons.expr = cons.expr.negated();
            }
        }
    }
    Normalized::Cons(cons)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Polyhedron {
    pub cons: Vec<LinCons>,
    infeasible: bool,
}

impl Polyhedron {
    pub fn top() -> Self {
        Polyhedron::default()
    }

    pub fn is_marked_infeasible(&self) -> bool {
        self.infeasible
    }

    pub fn insert(&mut self, cons: LinCons) {
        match normalize(cons) {
            Normalized::True => {}
            Normalized::False => self.infeasible = true,
            Normalized::Cons(c) => {
                // Collapse ladders over the same coefficients: keep only the
                // tighter of two parallel inequalities, and detect parallel
                // equalities with different constants as conflicts.
                for d in &mut self.cons {
                    if d.expr.coeffs != c.expr.coeffs {
                        continue;
                    }
                    match (d.op, c.op) {
                        (ConsOp::Le, ConsOp::Le) => {
                            if c.expr.constant > d.expr.constant {
                                d.expr.constant = c.expr.constant;
                            }
                            return;
                        }
                        (ConsOp::Eq, ConsOp::Eq) => {
                            if d.expr.constant != c.expr.constant {
                                self.infeasible = true;
                            }
                            return;
                        }
                        (ConsOp::Eq, ConsOp::Le) => {
                            // e = −k_d already forces e + k_c ≤ 0 or bottom.
                            if c.expr.constant > d.expr.constant {
                                self.infeasible = true;
                            }
                            return;
                        }
                        (ConsOp::Le, ConsOp::Eq) => {}
                    }
                }
                self.cons.push(c);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<NumVar> {
        self.cons
            .iter()
            .flat_map(|c| c.expr.coeffs.keys().cloned())
            .collect()
    }

    /// Eliminate `v` (existential projection). Equalities mentioning `v` are
    /// substituted; remaining inequalities are combined pairwise.
    fn eliminate(&self, v: &NumVar) -> Polyhedron {
        let (with_v, without): (Vec<_>, Vec<_>) = self
            .cons
            .iter()
            .cloned()
            .partition(|c| c.expr.coeffs.contains_key(v));
        let mut out = Polyhedron { cons: without, infeasible: self.infeasible };
        if with_v.is_empty() {
            return out;
        }
        let estimated = {
            let pos = with_v
                .iter()
                .filter(|c| c.op == ConsOp::Le && c.expr.coeffs[v].is_positive())
                .count();
            let neg = with_v.len() - pos;
            out.cons.len() + pos * neg
        };
        if estimated > ELIM_CAP {
            // Dropping the constraints that mention v is a sound projection.
            return out;
        }
        if let Some(eq_idx) = with_v
            .iter()
            .enumerate()
            .filter(|(_, c)| c.op == ConsOp::Eq)
            .min_by_key(|(_, c)| c.expr.coeffs[v].abs())
            .map(|(i, _)| i)
        {
            let eq = with_v[eq_idx].clone();
            let a = eq.expr.coeffs[v].clone();
            for (i, c) in with_v.into_iter().enumerate() {
                if i == eq_idx {
                    continue;
                }
                let b = c.expr.coeffs[v].clone();
                // |a|·c − b·sign(a)·eq cancels v; |a| > 0 keeps ≤ oriented.
                let mut expr = c.expr.clone();
                expr.scale(&a.abs());
                let mut sub = eq.expr.clone();
                sub.scale(&(&b * a.signum()));
                expr.sub(&sub);
                out.insert(LinCons { expr, op: c.op });
            }
        } else {
            let (pos, neg): (Vec<_>, Vec<_>) =
                with_v.into_iter().partition(|c| c.expr.coeffs[v].is_positive());
            for p in &pos {
                for n in &neg {
                    let ap = p.expr.coeffs[v].clone();
                    let an = n.expr.coeffs[v].clone();
                    let mut expr = p.expr.clone();
                    expr.scale(&-an);
                    let mut rhs = n.expr.clone();
                    rhs.scale(&ap);
                    expr.add(&rhs);
                    out.insert(LinCons::le(expr));
                }
            }
        }
        out
    }

    /// Rational feasibility with integer tightening at each normalization.
    /// May answer `true` when the cap forces constraints to be dropped.
    /// Variables are eliminated cheapest first (fewest pairwise products).
    pub fn feasible(&self) -> bool {
        if self.infeasible {
            return false;
        }
        let mut cur = self.clone();
        loop {
            let Some(v) = cur.cheapest_var() else { break };
            cur = cur.eliminate(&v);
            if cur.infeasible {
                return false;
            }
        }
        !cur.infeasible
    }

    /// The variable whose elimination produces the fewest combined
    /// constraints right now.
    fn cheapest_var(&self) -> Option<NumVar> {
        let mut degree: BTreeMap<&NumVar, (usize, usize)> = BTreeMap::new();
        for c in &self.cons {
            for (v, a) in &c.expr.coeffs {
                let d = degree.entry(v).or_default();
                if c.op == ConsOp::Le && a.is_positive() {
                    d.0 += 1;
                } else {
                    d.1 += 1;
                }
            }
        }
        degree
            .into_iter()
            .min_by_key(|(_, (pos, neg))| pos * neg)
            .map(|(v, _)| v.clone())
    }

    /// Is `cons` implied by a single stored constraint over the same
    /// coefficients? Cheap sufficient check before the full refutation.
    fn syntactic_entails(&self, cons: &LinCons) -> bool {
        let neg = cons.expr.negated();
        self.cons.iter().any(|d| match (d.op, cons.op) {
            // e + k ≤ 0 entails e + k' ≤ 0 for k' ≤ k.
            (ConsOp::Le, ConsOp::Le) => {
                d.expr.coeffs == cons.expr.coeffs && d.expr.constant >= cons.expr.constant
            }
            // Σa·x + k = 0 entails Σa·x + k' ≤ 0 when k' ≤ k, and
            // −Σa·x + k' ≤ 0 when k + k' ≤ 0.
            (ConsOp::Eq, ConsOp::Le) => {
                (d.expr.coeffs == cons.expr.coeffs && d.expr.constant >= cons.expr.constant)
                    || (d.expr.coeffs == neg.coeffs
                        && !(&d.expr.constant + &cons.expr.constant).is_positive())
            }
            (ConsOp::Eq, ConsOp::Eq) => {
                d.expr == cons.expr || (d.expr.coeffs == neg.coeffs && d.expr.constant == neg.constant)
            }
            (ConsOp::Le, ConsOp::Eq) => false,
        })
    }

    /// Constraints transitively sharing variables with `seed`. Restricting a
    /// refutation probe to this component is sound: if the component is
    /// already infeasible, so is the whole system.
    fn component_of(&self, seed: &LinCons) -> Polyhedron {
        let mut vars: BTreeSet<NumVar> = seed.expr.coeffs.keys().cloned().collect();
        let mut picked = vec![false; self.cons.len()];
        loop {
            let mut grew = false;
            for (i, c) in self.cons.iter().enumerate() {
                if !picked[i] && c.expr.coeffs.keys().any(|v| vars.contains(v)) {
                    picked[i] = true;
                    vars.extend(c.expr.coeffs.keys().cloned());
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        let cons = self
            .cons
            .iter()
            .zip(&picked)
            .filter(|(_, p)| **p)
            .map(|(c, _)| c.clone())
            .collect();
        Polyhedron { cons, infeasible: self.infeasible }
    }

    /// Does every point of the polyhedron satisfy `cons`?
    pub fn entails(&self, cons: &LinCons) -> bool {
        if self.infeasible {
            return true;
        }
        let cons = match normalize(cons.clone()) {
            Normalized::True => return true,
            Normalized::False => return !self.feasible(),
            Normalized::Cons(c) => c,
        };
        if self.syntactic_entails(&cons) {
            return true;
        }
        match cons.op {
            ConsOp::Eq => {
                self.entails(&LinCons::le(cons.expr.clone()))
                    && self.entails(&LinCons::le(cons.expr.negated()))
            }
            ConsOp::Le => {
                // Refute the negation e ≥ 1, i.e. −e + 1 ≤ 0, against the
                // constraints that can interact with it.
                let mut neg = cons.expr.negated();
                neg.constant += 1;
                let mut probe = self.component_of(&cons);
                probe.insert(LinCons::le(neg));
                !probe.feasible()
            }
        }
    }

    pub fn project_out(&self, vars: &BTreeSet<NumVar>) -> Polyhedron {
        let mut cur = self.clone();
        for v in vars {
            cur = cur.eliminate(v);
        }
        cur
    }

    pub fn rename(&self, map: &BTreeMap<NumVar, NumVar>) -> Polyhedron {
        let mut out = Polyhedron { cons: Vec::new(), infeasible: self.infeasible };
        for c in &self.cons {
            let mut expr = LinExpr::constant(c.expr.constant.clone());
            for (v, coeff) in &c.expr.coeffs {
                let v2 = map.get(v).unwrap_or(v);
                expr.add_term(v2, coeff);
            }
            out.insert(LinCons { expr, op: c.op });
        }
        out
    }

    /// Constraint-entailment join: keep each constraint of either operand
    /// that the other entails.
    pub fn join(&self, other: &Polyhedron) -> Polyhedron {
        if self.infeasible {
            return other.clone();
        }
        if other.infeasible {
            return self.clone();
        }
        let mut out = Polyhedron::top();
        for c in &self.cons {
            if other.entails(c) {
                out.insert(c.clone());
            }
        }
        for c in &other.cons {
            if !out.cons.contains(c) && self.entails(c) {
                out.insert(c.clone());
            }
        }
        out
    }

    pub fn meet(&self, other: &Polyhedron) -> Polyhedron {
        let mut out = self.clone();
        out.infeasible |= other.infeasible;
        for c in &other.cons {
            out.insert(c.clone());
        }
        out
    }

    pub fn leq(&self, other: &Polyhedron) -> bool {
        if !self.feasible() {
            return true;
        }
        other.cons.iter().all(|c| self.entails(c))
    }

    pub fn holds_at(&self, env: &impl Fn(&NumVar) -> BigInt) -> bool {
        !self.infeasible && self.cons.iter().all(|c| c.holds(env))
    }

    /// Derive tighter per-variable intervals by propagating each constraint
    /// through the current interval bounds of the other variables.
    pub fn propagate_bounds(
        &self,
        get: &impl Fn(&NumVar) -> Interval,
    ) -> BTreeMap<NumVar, Interval> {
        let mut refined: BTreeMap<NumVar, Interval> = BTreeMap::new();
        let lookup = |m: &BTreeMap<NumVar, Interval>, v: &NumVar| -> Interval {
            m.get(v).cloned().unwrap_or_else(|| get(v))
        };
        for c in &self.cons {
            let les: Vec<LinExpr> = match c.op {
                ConsOp::Le => vec![c.expr.clone()],
                ConsOp::Eq => vec![c.expr.clone(), c.expr.negated()],
            };
            for e in les {
                // Σaᵢxᵢ + k ≤ 0 ⇒ aⱼxⱼ ≤ −k − Σ_{i≠j} aᵢxᵢ.
                for (vj, aj) in &e.coeffs {
                    let mut rhs = Interval::constant(-e.constant.clone());
                    let mut unbounded = false;
                    for (vi, ai) in &e.coeffs {
                        if vi == vj {
                            continue;
                        }
                        let contrib = iv_scale(&lookup(&refined, vi), &-ai.clone());
                        if contrib.hi.is_none() {
                            unbounded = true;
                            break;
                        }
                        rhs = super::linexpr::iv_add(&rhs, &contrib);
                    }
                    if unbounded {
                        continue;
                    }
                    let ub = match rhs.hi {
                        Some(u) => u,
                        None => continue,
                    };
                    let cur = lookup(&refined, vj);
                    let tightened = if aj.is_positive() {
                        cur.meet(&Interval { lo: None, hi: Some(ub.div_floor(aj)) })
                    } else {
                        // aⱼ < 0: xⱼ ≥ ub/aⱼ, i.e. xⱼ ≥ −⌊ub/|aⱼ|⌋.
                        let lo = -ub.div_floor(&-aj.clone());
                        cur.meet(&Interval { lo: Some(lo), hi: None })
                    };
                    if tightened != cur {
                        refined.insert(vj.clone(), tightened);
                    }
                }
            }
        }
        refined
    }
}
