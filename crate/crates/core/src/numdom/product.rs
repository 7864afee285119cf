//! Reduced product of intervals, congruences, bounded sets, polyhedra and
//! grids, with `assign`/`assume` transfer functions. States are immutable
//! values from the caller's perspective; all operations are pure.

use super::congr::Congruence;
use super::grid::Grid;
use super::interval::Interval;
use super::linexpr::{expr_interval, flatten, Flattened, Fresh, LinExpr, TempCons};
use super::poly::{ConsOp, LinCons, Polyhedron};
use super::set::{self, IntSet, MAX_CARD};
use super::{NumCond, NumExpr, NumVar};
use crate::lang::RelOp;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Reduction passes per `reduce` call; the exchanges below reach their
/// useful fixpoint quickly on loop-free programs.
const REDUCE_PASSES: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductState {
    vars: BTreeSet<NumVar>,
    bottom: bool,
    itv: BTreeMap<NumVar, Interval>,
    cng: BTreeMap<NumVar, Congruence>,
    set: BTreeMap<NumVar, IntSet>,
    poly: Polyhedron,
    grid: Grid,
    /// Whether the polyhedron gained constraints since the last Fourier–
    /// Motzkin feasibility check in `reduce`.
    poly_dirty: bool,
}

impl ProductState {
    pub fn top(vars: impl IntoIterator<Item = NumVar>) -> ProductState {
        let vars: BTreeSet<NumVar> = vars.into_iter().collect();
        let grid = Grid::top(vars.iter().cloned());
        ProductState {
            vars,
            bottom: false,
            itv: BTreeMap::new(),
            cng: BTreeMap::new(),
            set: BTreeMap::new(),
            poly: Polyhedron::top(),
            grid,
            poly_dirty: false,
        }
    }

    pub fn bottom() -> ProductState {
        let mut s = ProductState::top([]);
        s.bottom = true;
        s
    }

    /// Bottom over this state's variables.
    pub fn to_bottom(&self) -> ProductState {
        let mut s = ProductState::top(self.vars.iter().cloned());
        s.bottom = true;
        s
    }

    pub fn is_bottom(&self) -> bool {
        self.bottom
    }

    pub fn vars(&self) -> &BTreeSet<NumVar> {
        &self.vars
    }

    pub fn has_var(&self, v: &NumVar) -> bool {
        self.vars.contains(v)
    }

    pub fn add_var(&mut self, v: NumVar) {
        assert!(!self.vars.contains(&v), "variable {v} already registered");
        self.grid.add_var(v.clone());
        self.vars.insert(v);
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn poly(&self) -> &Polyhedron {
        &self.poly
    }

    pub fn interval_of(&self, v: &NumVar) -> Interval {
        self.itv.get(v).cloned().unwrap_or_else(Interval::top)
    }

    pub fn congruence_of(&self, v: &NumVar) -> Congruence {
        self.cng.get(v).cloned().unwrap_or_else(Congruence::top)
    }

    pub fn set_of(&self, v: &NumVar) -> Option<&IntSet> {
        self.set.get(v)
    }

    // -- component refinement helpers -------------------------------------

    fn meet_interval(&mut self, v: &NumVar, i: &Interval) -> bool {
        if i.is_top() {
            return false;
        }
        let cur = self.interval_of(v);
        let m = cur.meet(i);
        if m.is_empty() {
            self.bottom = true;
            return true;
        }
        if m != cur {
            self.itv.insert(v.clone(), m);
            true
        } else {
            false
        }
    }

    fn meet_congruence(&mut self, v: &NumVar, c: &Congruence) -> bool {
        if c.is_top() {
            return false;
        }
        let cur = self.congruence_of(v);
        match cur.meet(c) {
            None => {
                self.bottom = true;
                true
            }
            Some(m) => {
                if m != cur {
                    self.cng.insert(v.clone(), m);
                    true
                } else {
                    false
                }
            }
        }
    }

    fn meet_set(&mut self, v: &NumVar, s: &IntSet) -> bool {
        let m = match self.set.get(v) {
            Some(cur) => set::meet(cur, s),
            None => s.clone(),
        };
        if m.is_empty() {
            self.bottom = true;
            return true;
        }
        if self.set.get(v) != Some(&m) {
            self.set.insert(v.clone(), m);
            true
        } else {
            false
        }
    }

    fn constrain_grid(&mut self, expr: &LinExpr, modulus: &BigInt) {
        match self.grid.constrain(expr, modulus) {
            Some(g) => self.grid = g,
            None => self.bottom = true,
        }
    }

    fn add_le(&mut self, expr: LinExpr) {
        self.poly.insert(LinCons::le(expr));
        self.poly_dirty = true;
    }

    fn add_eq(&mut self, expr: LinExpr) {
        self.constrain_grid(&expr, &BigInt::zero());
        self.poly.insert(LinCons::eq(expr));
        self.poly_dirty = true;
    }

    // -- reduction ---------------------------------------------------------

    /// Exchange information between components until (bounded) fixpoint.
    pub fn reduce(&mut self) {
        if self.bottom {
            return;
        }
        for _ in 0..REDUCE_PASSES {
            if self.bottom {
                return;
            }
            let mut changed = false;
            if self.poly.is_marked_infeasible() {
                self.bottom = true;
                return;
            }
            // Polyhedron bounds → intervals.
            let refined = {
                let itv = &self.itv;
                self.poly
                    .propagate_bounds(&|v| itv.get(v).cloned().unwrap_or_else(Interval::top))
            };
            for (v, i) in refined {
                changed |= self.meet_interval(&v, &i);
                if self.bottom {
                    return;
                }
            }
            // Grid → per-variable congruences.
            for v in self.vars.clone() {
                let c = self.grid.var_congruence(&v);
                changed |= self.meet_congruence(&v, &c);
                if self.bottom {
                    return;
                }
            }
            // Congruences tighten intervals.
            for (v, c) in self.cng.clone() {
                let t = self.interval_of(&v).tighten_to_congruence(&c.modulus, &c.residue);
                changed |= self.meet_interval(&v, &t);
                if self.bottom {
                    return;
                }
            }
            // Sets filtered by interval and congruence.
            for (v, s) in self.set.clone() {
                let itv = self.interval_of(&v);
                let cng = self.congruence_of(&v);
                let filtered: IntSet = s
                    .iter()
                    .copied()
                    .filter(|&x| itv.contains(&BigInt::from(x)) && cng.contains(&BigInt::from(x)))
                    .collect();
                if filtered != s {
                    changed = true;
                    if filtered.is_empty() {
                        self.bottom = true;
                        return;
                    }
                    self.set.insert(v.clone(), filtered);
                }
            }
            // Small finite intervals materialize sets.
            for v in self.vars.clone() {
                if self.set.contains_key(&v) {
                    continue;
                }
                let itv = self.interval_of(&v);
                let small = itv.count().and_then(|c| c.to_usize()).map_or(false, |c| {
                    c <= MAX_CARD
                });
                if small {
                    let cng = self.congruence_of(&v);
                    let (lo, hi) = (itv.lo.clone().unwrap(), itv.hi.clone().unwrap());
                    let mut s = IntSet::new();
                    let mut x = lo;
                    let mut representable = true;
                    while x <= hi {
                        if cng.contains(&x) {
                            match x.to_i64() {
                                Some(v64) => {
                                    s.insert(v64);
                                }
                                None => representable = false,
                            }
                        }
                        x += 1;
                    }
                    if representable {
                        if s.is_empty() {
                            self.bottom = true;
                            return;
                        }
                        self.set.insert(v.clone(), s);
                        changed = true;
                    }
                }
            }
            // Sets push back bounds and congruences.
            for (v, s) in self.set.clone() {
                let lo = *s.iter().next().unwrap();
                let hi = *s.iter().next_back().unwrap();
                changed |= self.meet_interval(&v, &Interval::bounded(lo, hi));
                if self.bottom {
                    return;
                }
                let mut c = Congruence::constant(lo);
                for x in s.iter().skip(1) {
                    c = c.join(&Congruence::constant(*x));
                }
                changed |= self.meet_congruence(&v, &c);
                if self.bottom {
                    return;
                }
            }
            // Sets transfer along exact unit differences known to the grid
            // (w = v + c gives w the shifted set of v).
            let with_set: Vec<NumVar> = self.set.keys().cloned().collect();
            for w in self.vars.clone() {
                if self.set.contains_key(&w) {
                    continue;
                }
                for v in &with_set {
                    let shift = self
                        .grid
                        .diff_congruence(&w, v)
                        .as_constant()
                        .and_then(|c| c.to_i64());
                    if let Some(c) = shift {
                        let shifted: Option<IntSet> = self.set[v]
                            .iter()
                            .map(|x| x.checked_add(c))
                            .collect();
                        if let Some(s) = shifted {
                            changed |= self.meet_set(&w, &s);
                            if self.bottom {
                                return;
                            }
                            break;
                        }
                    }
                }
            }
            // Constants feed the relational components.
            for v in self.vars.clone() {
                let cst = self
                    .interval_of(&v)
                    .as_constant()
                    .cloned()
                    .or_else(|| self.congruence_of(&v).as_constant().cloned());
                if let Some(c) = cst {
                    let mut e = LinExpr::var(v.clone());
                    e.constant = -c.clone();
                    if !self.grid.var_congruence(&v).as_constant().is_some() {
                        self.constrain_grid(&e, &BigInt::zero());
                        changed = true;
                        if self.bottom {
                            return;
                        }
                    }
                    let cons = LinCons::eq(e);
                    if !self.poly.cons.contains(&cons) {
                        self.poly.insert(cons);
                        self.poly_dirty = true;
                        changed = true;
                    }
                }
            }
            // Polyhedral equalities feed the grid.
            for cons in self.poly.cons.clone() {
                if cons.op == ConsOp::Eq {
                    if !self.grid.entails_eq(&cons.expr) {
                        self.constrain_grid(&cons.expr, &BigInt::zero());
                        changed = true;
                        if self.bottom {
                            return;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        if self.poly_dirty {
            if self.poly.feasible() {
                self.poly_dirty = false;
            } else {
                self.bottom = true;
            }
        }
    }

    // -- transfer functions ------------------------------------------------

    fn negate_cond(c: &NumCond) -> NumCond {
        match c {
            NumCond::True => NumCond::False,
            NumCond::False => NumCond::True,
            NumCond::Cmp(a, op, b) => NumCond::Cmp(a.clone(), op.negate(), b.clone()),
            NumCond::And(a, b) => NumCond::Or(
                Box::new(Self::negate_cond(a)),
                Box::new(Self::negate_cond(b)),
            ),
            NumCond::Or(a, b) => NumCond::And(
                Box::new(Self::negate_cond(a)),
                Box::new(Self::negate_cond(b)),
            ),
            NumCond::Not(inner) => (**inner).clone(),
        }
    }

    pub fn assume(&self, c: &NumCond) -> ProductState {
        if self.bottom {
            return self.clone();
        }
        match c {
            NumCond::True => self.clone(),
            NumCond::False => self.to_bottom(),
            NumCond::Or(a, b) => self.assume(a).join(&self.assume(b)),
            NumCond::Not(inner) => self.assume(&Self::negate_cond(inner)),
            NumCond::And(..) | NumCond::Cmp(..) => {
                // Apply the whole conjunction of comparisons, then reduce
                // once: interleaving a reduction (and its feasibility check)
                // after every atom costs far more than it refines.
                let mut s = self.clone();
                let mut fresh = Fresh::default();
                let mut temps = BTreeSet::new();
                s.assume_conj(c, &mut fresh, &mut temps);
                if s.bottom {
                    return s;
                }
                s.reduce();
                if !temps.is_empty() {
                    s = s.project_out(&temps);
                    s.reduce();
                }
                s
            }
        }
    }

    /// Apply a conjunction of comparisons in place without reducing; nested
    /// disjunctions fall back to `assume` on the current state.
    fn assume_conj(&mut self, c: &NumCond, fresh: &mut Fresh, temps: &mut BTreeSet<NumVar>) {
        if self.bottom {
            return;
        }
        match c {
            NumCond::True => {}
            NumCond::False => *self = self.to_bottom(),
            NumCond::And(a, b) => {
                self.assume_conj(a, fresh, temps);
                self.assume_conj(b, fresh, temps);
            }
            NumCond::Or(..) | NumCond::Not(..) => {
                self.reduce();
                *self = self.assume(c);
            }
            NumCond::Cmp(lhs, op, rhs) => self.assume_cmp_in_place(lhs, *op, rhs, fresh, temps),
        }
    }

    fn assume_cmp_in_place(
        &mut self,
        lhs: &NumExpr,
        op: RelOp,
        rhs: &NumExpr,
        fresh: &mut Fresh,
        temps: &mut BTreeSet<NumVar>,
    ) {
        let mut out = Flattened::default();
        let (l, r) = {
            let itv = |v: &NumVar| self.interval_of(v);
            let l = flatten(lhs, fresh, &itv, &mut out);
            let r = flatten(rhs, fresh, &itv, &mut out);
            (l, r)
        };
        let mut diff = l;
        diff.sub(&r);
        for t in &out.temps {
            self.add_var(t.clone());
            temps.insert(t.clone());
        }
        self.apply_temp_constraints(&out.constraints);
        match op {
            RelOp::Le => self.add_le(diff),
            RelOp::Lt => {
                diff.constant += 1;
                self.add_le(diff);
            }
            RelOp::Ge => self.add_le(diff.negated()),
            RelOp::Gt => {
                let mut d = diff.negated();
                d.constant += 1;
                self.add_le(d);
            }
            RelOp::Eq => self.add_eq(diff),
            RelOp::Ne => {
                let mut lt = self.clone();
                let mut below = diff.clone();
                below.constant += 1;
                lt.add_le(below);
                lt.reduce();
                let mut gt = self.clone();
                let mut above = diff.negated();
                above.constant += 1;
                gt.add_le(above);
                gt.reduce();
                *self = lt.join(&gt);
            }
        }
    }

    fn apply_temp_constraints(&mut self, cons: &[TempCons]) {
        for c in cons {
            match c {
                TempCons::Eq(e) => self.add_eq(e.clone()),
                TempCons::Le(e) => self.add_le(e.clone()),
            }
        }
    }

    pub fn assign(&self, v: &NumVar, e: &NumExpr) -> ProductState {
        if self.bottom {
            return self.clone();
        }
        let mut s = self.clone();
        let mut out = Flattened::default();
        let mut fresh = Fresh::default();
        let lin = {
            let itv = |nv: &NumVar| self.interval_of(nv);
            flatten(e, &mut fresh, &itv, &mut out)
        };
        let vnew = fresh.fresh();
        for t in &out.temps {
            s.add_var(t.clone());
        }
        s.add_var(vnew.clone());
        s.apply_temp_constraints(&out.constraints);
        let mut eq = LinExpr::var(vnew.clone());
        eq.sub(&lin);
        s.add_eq(eq);
        {
            let itv = |nv: &NumVar| self.interval_of(nv);
            let bounds = expr_interval(e, &itv);
            s.meet_interval(&vnew, &bounds);
        }
        s.reduce();
        let mut drop: BTreeSet<NumVar> = out.temps.iter().cloned().collect();
        if s.vars.contains(v) {
            drop.insert(v.clone());
        }
        s = s.project_out(&drop);
        let mut map = BTreeMap::new();
        map.insert(vnew, v.clone());
        let mut s = s.rename(&map);
        s.reduce();
        s
    }

    /// Simultaneous quotient/remainder assignment: after the call,
    /// `e = k·q + r ∧ 0 ≤ r < k` holds exactly (relationally), which a pair
    /// of separate `div`/`mod` assignments cannot express.
    pub fn assign_quot_rem(&self, q: &NumVar, r: &NumVar, e: &NumExpr, k: i64) -> ProductState {
        assert!(k > 0, "modulus must be positive");
        if self.bottom {
            return self.clone();
        }
        let mut s = self.clone();
        let mut out = Flattened::default();
        let mut fresh = Fresh::default();
        let lin = {
            let itv = |nv: &NumVar| self.interval_of(nv);
            flatten(e, &mut fresh, &itv, &mut out)
        };
        let qnew = fresh.fresh();
        let rnew = fresh.fresh();
        for t in &out.temps {
            s.add_var(t.clone());
        }
        s.add_var(qnew.clone());
        s.add_var(rnew.clone());
        s.apply_temp_constraints(&out.constraints);
        // e − k·q − r = 0
        let mut eq = lin;
        eq.add_term(&qnew, &BigInt::from(-k));
        eq.add_term(&rnew, &BigInt::from(-1));
        s.add_eq(eq);
        s.meet_interval(&rnew, &Interval::bounded(0, k - 1));
        s.reduce();
        let mut drop: BTreeSet<NumVar> = out.temps.iter().cloned().collect();
        for old in [q, r] {
            if s.vars.contains(old) {
                drop.insert(old.clone());
            }
        }
        s = s.project_out(&drop);
        let mut map = BTreeMap::new();
        map.insert(qnew, q.clone());
        map.insert(rnew, r.clone());
        let mut s = s.rename(&map);
        s.reduce();
        s
    }

    // -- lattice and structural operations ---------------------------------

    pub fn join(&self, other: &ProductState) -> ProductState {
        if self.bottom {
            return other.clone();
        }
        if other.bottom {
            return self.clone();
        }
        assert_eq!(self.vars, other.vars, "join over different variables");
        let mut out = ProductState::top(self.vars.iter().cloned());
        for v in &self.vars {
            let j = self.interval_of(v).join(&other.interval_of(v));
            if !j.is_top() {
                out.itv.insert(v.clone(), j);
            }
            let j = self.congruence_of(v).join(&other.congruence_of(v));
            if !j.is_top() {
                out.cng.insert(v.clone(), j);
            }
            if let (Some(a), Some(b)) = (self.set.get(v), other.set.get(v)) {
                if let Some(u) = set::join(a, b) {
                    out.set.insert(v.clone(), u);
                }
            }
        }
        out.poly = self.poly.join(&other.poly);
        out.poly_dirty = self.poly_dirty || other.poly_dirty;
        out.grid = self.grid.join(&other.grid);
        out.reduce();
        out
    }

    pub fn meet(&self, other: &ProductState) -> ProductState {
        if self.bottom || other.bottom {
            return if self.bottom { self.clone() } else { other.clone() };
        }
        assert_eq!(self.vars, other.vars, "meet over different variables");
        let mut out = self.clone();
        for (v, i) in &other.itv {
            out.meet_interval(v, i);
        }
        for (v, c) in &other.cng {
            out.meet_congruence(v, c);
        }
        for (v, s) in &other.set {
            out.meet_set(v, s);
        }
        out.poly = out.poly.meet(&other.poly);
        out.poly_dirty = true;
        match out.grid.meet(&other.grid) {
            Some(g) => out.grid = g,
            None => out.bottom = true,
        }
        out.reduce();
        out
    }

    /// Polyhedron enriched with interval bounds (used for entailment).
    fn poly_with_bounds(&self) -> Polyhedron {
        let mut p = self.poly.clone();
        for (v, i) in &self.itv {
            if let Some(lo) = &i.lo {
                let mut e = LinExpr::term(v.clone(), -1);
                e.constant += lo;
                p.insert(LinCons::le(e));
            }
            if let Some(hi) = &i.hi {
                let mut e = LinExpr::var(v.clone());
                e.constant -= hi;
                p.insert(LinCons::le(e));
            }
        }
        p
    }

    /// Grid enriched with the per-variable congruence component.
    fn grid_with_congruences(&self) -> Grid {
        let mut g = self.grid.clone();
        for (v, c) in &self.cng {
            let mut e = LinExpr::var(v.clone());
            e.constant = -c.residue.clone();
            match g.constrain(&e, &c.modulus) {
                Some(g2) => g = g2,
                None => return g, // inconsistent; reduce would have caught it
            }
        }
        g
    }

    pub fn leq(&self, other: &ProductState) -> bool {
        if self.bottom {
            return true;
        }
        if other.bottom {
            return false;
        }
        assert_eq!(self.vars, other.vars, "leq over different variables");
        for v in &self.vars {
            if !self.interval_of(v).leq(&other.interval_of(v)) {
                return false;
            }
            if !self.congruence_of(v).leq(&other.congruence_of(v)) {
                return false;
            }
            if let Some(os) = other.set.get(v) {
                match self.set.get(v) {
                    Some(ss) => {
                        if !ss.is_subset(os) {
                            return false;
                        }
                    }
                    None => return false,
                }
            }
        }
        let augmented = self.poly_with_bounds();
        if !other.poly.cons.iter().all(|c| augmented.entails(c)) {
            return false;
        }
        self.grid_with_congruences().leq(&other.grid)
    }

    pub fn forget(&self, v: &NumVar) -> ProductState {
        let mut s = self.clone();
        s.itv.remove(v);
        s.cng.remove(v);
        s.set.remove(v);
        s.poly = s.poly.project_out(&[v.clone()].into_iter().collect());
        s.grid = s.grid.project_onto(&|nv| nv != v);
        s.grid.add_var(v.clone());
        s
    }

    /// Existentially eliminate every variable in `drop`.
    pub fn project_out(&self, drop: &BTreeSet<NumVar>) -> ProductState {
        let mut s = self.clone();
        for v in drop {
            s.vars.remove(v);
            s.itv.remove(v);
            s.cng.remove(v);
            s.set.remove(v);
        }
        s.poly = s.poly.project_out(drop);
        s.grid = s.grid.project_onto(&|nv| !drop.contains(nv));
        s
    }

    /// Keep only `keep`, eliminating everything else.
    pub fn project(&self, keep: &BTreeSet<NumVar>) -> ProductState {
        let drop: BTreeSet<NumVar> =
            self.vars.difference(keep).cloned().collect();
        self.project_out(&drop)
    }

    pub fn rename(&self, map: &BTreeMap<NumVar, NumVar>) -> ProductState {
        let remap = |v: &NumVar| map.get(v).cloned().unwrap_or_else(|| v.clone());
        let s = ProductState {
            vars: self.vars.iter().map(&remap).collect(),
            bottom: self.bottom,
            itv: self.itv.iter().map(|(v, i)| (remap(v), i.clone())).collect(),
            cng: self.cng.iter().map(|(v, c)| (remap(v), c.clone())).collect(),
            set: self.set.iter().map(|(v, x)| (remap(v), x.clone())).collect(),
            poly: self.poly.rename(map),
            grid: self.grid.rename(map),
            poly_dirty: self.poly_dirty,
        };
        assert_eq!(s.vars.len(), self.vars.len(), "rename collision");
        s
    }

    /// Executable γ-membership: is the concrete environment described by
    /// `env` (one integer per registered variable) inside the state?
    pub fn contains_point(&self, env: &BTreeMap<NumVar, i64>) -> bool {
        if self.bottom {
            return false;
        }
        let get = |v: &NumVar| BigInt::from(*env.get(v).expect("missing variable in point"));
        for v in &self.vars {
            let x = get(v);
            if !self.interval_of(v).contains(&x) {
                return false;
            }
            if !self.congruence_of(v).contains(&x) {
                return false;
            }
            if let Some(s) = self.set.get(v) {
                match x.to_i64() {
                    Some(x64) => {
                        if !s.contains(&x64) {
                            return false;
                        }
                    }
                    None => return false,
                }
            }
        }
        self.poly.holds_at(&get) && self.grid.member(&get)
    }

    /// Debug rendering as a deterministic conjunction list.
    pub fn render(&self) -> Vec<String> {
        if self.bottom {
            return vec!["⊥".to_string()];
        }
        let mut out = Vec::new();
        for v in &self.vars {
            let i = self.interval_of(v);
            if !i.is_top() {
                out.push(format!("{v} = {i}"));
            }
            let c = self.congruence_of(v);
            if !c.is_top() && c.as_constant().is_none() && i.as_constant().is_none() {
                out.push(format!("{v} {c}"));
            }
            if let Some(s) = self.set.get(v) {
                if i.count().and_then(|n| n.to_usize()) != Some(s.len()) {
                    let elems: Vec<String> = s.iter().map(|x| x.to_string()).collect();
                    out.push(format!("{v} in {{{}}}", elems.join(",")));
                }
            }
        }
        for c in &self.poly.cons {
            if c.expr.coeffs.len() > 1 {
                out.push(c.render());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(name: &str) -> NumVar {
        NumVar::new(name)
    }

    fn ve(name: &str) -> NumExpr {
        NumExpr::Var(v(name))
    }

    fn top(names: &[&str]) -> ProductState {
        ProductState::top(names.iter().map(|n| NumVar::new(n)))
    }

    #[test]
    fn lattice_constants() {
        assert!(ProductState::bottom().is_bottom());
        assert!(!top(&["x"]).is_bottom());
        let s = top(&["x"]);
        let contradiction = s
            .assume(&NumCond::cmp(ve("x"), RelOp::Lt, NumExpr::Const(0)))
            .assume(&NumCond::cmp(ve("x"), RelOp::Gt, NumExpr::Const(0)));
        assert!(contradiction.is_bottom());
    }

    #[test]
    fn assume_refines_intervals() {
        // day > 29 ∧ res_month = 2 refines day to [30,31].
        let s = top(&["day", "res_month"])
            .assume(&NumCond::cmp(ve("day"), RelOp::Ge, NumExpr::Const(1)))
            .assume(&NumCond::cmp(ve("day"), RelOp::Le, NumExpr::Const(31)))
            .assume(
                &NumCond::cmp(ve("day"), RelOp::Gt, NumExpr::Const(29))
                    .and(NumCond::cmp(ve("res_month"), RelOp::Eq, NumExpr::Const(2))),
            );
        assert_eq!(s.interval_of(&v("day")), Interval::bounded(30, 31));
        assert_eq!(s.interval_of(&v("res_month")).as_constant(),
                   Some(&BigInt::from(2)));
        assert_eq!(s.set_of(&v("day")), Some(&[30, 31].into_iter().collect()));
    }

    #[test]
    fn mod_assignment_builds_congruence() {
        // res_month = 1 + (month−1+1) mod 12 with month ∈ [1,12]:
        // the grid must entail res_month ≡ month+1 (mod 12).
        let s = top(&["month", "res_month"])
            .assume(&NumCond::cmp(ve("month"), RelOp::Ge, NumExpr::Const(1)))
            .assume(&NumCond::cmp(ve("month"), RelOp::Le, NumExpr::Const(12)));
        let s = s.assign(
            &v("res_month"),
            &NumExpr::Const(1)
                .add(ve("month").sub(NumExpr::Const(1)).add(NumExpr::Const(1)).modulo(12)),
        );
        let mut form = LinExpr::var(v("res_month"));
        form.sub(&LinExpr::var(v("month")));
        form.constant = BigInt::from(-1);
        let c = s.grid().congruence_of(&form);
        assert_eq!(c.modulus, BigInt::from(12));
        assert!(c.contains(&BigInt::zero()));
        assert_eq!(s.interval_of(&v("res_month")), Interval::bounded(1, 12));
    }

    #[test]
    fn div_assignment_builds_inequalities() {
        // res_year = year + (month−1+1) div 12 with month ∈ [1,12] entails
        // 12·year + month ≤ 12·res_year + 11 and 12·res_year ≤ 12·year + month + 1...
        // (checked via the tight two-sided bound 0 ≤ 12·(res_year−year) ≤ month).
        let s = top(&["year", "month", "res_year"])
            .assume(&NumCond::cmp(ve("month"), RelOp::Ge, NumExpr::Const(1)))
            .assume(&NumCond::cmp(ve("month"), RelOp::Le, NumExpr::Const(12)));
        let s = s.assign(
            &v("res_year"),
            &ve("year").add(ve("month").sub(NumExpr::Const(1)).add(NumExpr::Const(1)).div_floor(12)),
        );
        // 12·year + month − 12·res_year − 11 ≤ 0
        let mut e = LinExpr::term(v("year"), 12);
        e.add(&LinExpr::var(v("month")));
        e.add(&LinExpr::term(v("res_year"), -12));
        e.constant = BigInt::from(-11);
        assert!(s.poly_with_bounds().entails(&LinCons::le(e)));
        // 12·res_year − 12·year − month ≤ 0
        let mut e = LinExpr::term(v("res_year"), 12);
        e.add(&LinExpr::term(v("year"), -12));
        e.sub(&LinExpr::var(v("month")));
        assert!(s.poly_with_bounds().entails(&LinCons::le(e)));
    }

    #[test]
    fn quot_rem_assignment_is_exact() {
        let s = top(&["month", "q", "r"])
            .assume(&NumCond::cmp(ve("month"), RelOp::Ge, NumExpr::Const(1)))
            .assume(&NumCond::cmp(ve("month"), RelOp::Le, NumExpr::Const(12)));
        let s = s.assign_quot_rem(&v("q"), &v("r"), &ve("month").sub(NumExpr::Const(1)).add(NumExpr::Const(1)), 12);
        // month = 12q + r exactly: grid entails month − 12q − r = 0.
        let mut e = LinExpr::var(v("month"));
        e.add(&LinExpr::term(v("q"), -12));
        e.add(&LinExpr::term(v("r"), -1));
        assert_eq!(s.grid().congruence_of(&e), Congruence::constant(0));
        assert_eq!(s.interval_of(&v("r")), Interval::bounded(0, 11));
        assert_eq!(s.interval_of(&v("q")), Interval::bounded(0, 1));
    }

    #[test]
    fn set_precision_through_disjunction() {
        // res_month ∈ {4,6,9,11} with res_month ≡ month+1 (mod 12) and
        // month ∈ [1,12] pins month to {3,5,8,10}.
        let s = top(&["month", "res_month"])
            .assume(&NumCond::cmp(ve("month"), RelOp::Ge, NumExpr::Const(1)))
            .assume(&NumCond::cmp(ve("month"), RelOp::Le, NumExpr::Const(12)));
        let s = s.assign(
            &v("res_month"),
            &NumExpr::Const(1)
                .add(ve("month").sub(NumExpr::Const(1)).add(NumExpr::Const(1)).modulo(12)),
        );
        let s = s.assume(&NumCond::var_in(&v("res_month"), &[4, 6, 9, 11]));
        assert_eq!(s.set_of(&v("month")), Some(&[3, 5, 8, 10].into_iter().collect()));
        assert_eq!(s.interval_of(&v("month")), Interval::bounded(3, 10));
    }

    #[test]
    fn join_collects_components() {
        let s = top(&["x"]);
        let s1 = s.assume(&NumCond::cmp(ve("x"), RelOp::Eq, NumExpr::Const(1)));
        let s3 = s.assume(&NumCond::cmp(ve("x"), RelOp::Eq, NumExpr::Const(3)));
        let j = s1.join(&s3);
        assert_eq!(j.interval_of(&v("x")), Interval::bounded(1, 3));
        assert_eq!(j.set_of(&v("x")), Some(&[1, 3].into_iter().collect()));
        assert_eq!(j.congruence_of(&v("x")), Congruence::modular(2, 1));
        assert!(s1.leq(&j) && s3.leq(&j));
        assert!(!j.leq(&s1));
    }

    #[test]
    fn assignment_examples() {
        let s = top(&["x", "v"]);
        let s = s.assign(&v("v"), &ve("x").add(NumExpr::Const(1)));
        let s = s.assume(&NumCond::cmp(ve("x"), RelOp::Eq, NumExpr::Const(5)));
        assert_eq!(s.interval_of(&v("v")).as_constant(), Some(&BigInt::from(6)));
        // Self-referential assignment via the fresh-variable path.
        let s = s.assign(&v("x"), &ve("x").add(NumExpr::Const(1)));
        assert_eq!(s.interval_of(&v("x")).as_constant(), Some(&BigInt::from(6)));
    }

    #[test]
    fn projection_drops_auxiliaries() {
        let s = top(&["x", "y"])
            .assume(&NumCond::cmp(
                ve("x"),
                RelOp::Eq,
                ve("y").add(NumExpr::Const(2)),
            ))
            .assume(&NumCond::cmp(ve("y"), RelOp::Ge, NumExpr::Const(0)))
            .assume(&NumCond::cmp(ve("y"), RelOp::Le, NumExpr::Const(5)));
        let p = s.project(&[v("x")].into_iter().collect());
        assert_eq!(p.interval_of(&v("x")), Interval::bounded(2, 7));
        assert!(p.vars().iter().all(|n| n.name() == "x"));
    }

    #[test]
    fn ne_splits_and_rejoins() {
        let s = top(&["x"])
            .assume(&NumCond::cmp(ve("x"), RelOp::Ge, NumExpr::Const(1)))
            .assume(&NumCond::cmp(ve("x"), RelOp::Le, NumExpr::Const(3)))
            .assume(&NumCond::cmp(ve("x"), RelOp::Ne, NumExpr::Const(2)));
        assert_eq!(s.set_of(&v("x")), Some(&[1, 3].into_iter().collect()));
    }

    #[test]
    fn gamma_membership() {
        let s = top(&["x", "y"]).assume(&NumCond::cmp(
            ve("x"),
            RelOp::Eq,
            ve("y").add(NumExpr::Const(2)),
        ));
        let mut env = BTreeMap::new();
        env.insert(v("x"), 7);
        env.insert(v("y"), 5);
        assert!(s.contains_point(&env));
        env.insert(v("y"), 4);
        assert!(!s.contains_point(&env));
        assert!(!s.to_bottom().contains_point(&env));
    }

    #[test]
    fn rendering_is_deterministic() {
        let s = top(&["day", "month"])
            .assume(&NumCond::cmp(ve("day"), RelOp::Ge, NumExpr::Const(30)))
            .assume(&NumCond::cmp(ve("day"), RelOp::Le, NumExpr::Const(31)))
            .assume(&NumCond::cmp(ve("month"), RelOp::Eq, NumExpr::Const(2)));
        let lines = s.render();
        assert!(lines.contains(&"day = [30,31]".to_string()), "{lines:?}");
        assert!(lines.contains(&"month = [2,2]".to_string()), "{lines:?}");
    }
}
