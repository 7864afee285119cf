//! Abstract pair semantics: every date expression is evaluated under up- and
//! down-rounding simultaneously over one shared numerical state. Variables
//! are duplicated shallowly — a variable gets separate `u.`/`d.` ghost
//! triples only in partitions where a rounding case actually fired — and the
//! case disjunctions of the YMD transfer functions become state partitions.

use crate::date::YmdTriple;
use crate::interp::DoubleEnv;
use crate::lang::{BoolExpr, DateExpr, Field, Program, RelOp, Stmt};
use crate::numdom::{NumCond, NumExpr, NumVar, ProductState};
use crate::ymd::{
    add_months_abs, assume_field, dates_cmp, day_of, first_day_of, gamma_member, last_day_of,
    mk_literal, mk_random_date, month_of, strengthen, year_of, DateComponent,
    DateHandle, ModeTag, YmdError,
};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// How a program variable is represented in one partition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Duplication {
    /// One shared ghost triple: both rounding modes agree on the value.
    Synced(DateHandle),
    /// The value diverged; each mode has its own ghost triple.
    Split { up: DateHandle, down: DateHandle },
}

/// One of the two rounding-mode components of the pair semantics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Up,
    Down,
}

impl Duplication {
    pub fn is_split(&self) -> bool {
        matches!(self, Duplication::Split { .. })
    }

    /// The handle seen by one component (the shared one when synced).
    pub fn side(&self, side: Side) -> &DateHandle {
        match self {
            Duplication::Synced(h) => h,
            Duplication::Split { up, down } => match side {
                Side::Up => up,
                Side::Down => down,
            },
        }
    }

    pub fn handles(&self) -> Vec<&DateHandle> {
        match self {
            Duplication::Synced(h) => vec![h],
            Duplication::Split { up, down } => vec![up, down],
        }
    }
}

pub type DupRegistry = BTreeMap<String, Duplication>;

/// One disjunct of the analysis state.
#[derive(Debug, Clone)]
pub struct Partition {
    pub state: ProductState,
    pub registry: DupRegistry,
    /// Case labels accumulated along this partition's history.
    pub trace: Vec<String>,
}

impl Partition {
    fn child(&self, state: ProductState, labels: &[String]) -> Partition {
        let mut trace = self.trace.clone();
        trace.extend(labels.iter().cloned());
        Partition { state, registry: self.registry.clone(), trace }
    }

    /// Split-status signature; partitions are joinable iff these match.
    fn signature(&self) -> BTreeMap<&str, bool> {
        self.registry.iter().map(|(v, d)| (v.as_str(), d.is_split())).collect()
    }
}

/// Disjunction of partitions, capped.
#[derive(Debug, Clone)]
pub struct PartitionedState {
    pub partitions: Vec<Partition>,
    pub cap: usize,
}

pub const DEFAULT_PARTITION_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecOptions {
    pub cap: usize,
    /// Inclusive year bounds assumed for `random_date()`, if any.
    pub year_range: Option<(i64, i64)>,
}

impl Default for ExecOptions {
    fn default() -> Self {
        ExecOptions { cap: DEFAULT_PARTITION_CAP, year_range: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BidatesError {
    #[error("statement {stmt}: {source}")]
    Unsupported {
        #[source]
        source: YmdError,
        stmt: usize,
    },
}

/// Verdict of one `assert`.
#[derive(Debug, Clone)]
pub enum SyncVerdict {
    Proven,
    /// Non-bottom refinements in which the assertion fails (for a sync
    /// assert: the two modes disagree).
    Unproven(Vec<Partition>),
}

impl SyncVerdict {
    pub fn is_proven(&self) -> bool {
        matches!(self, SyncVerdict::Proven)
    }
}

/// Result of abstractly executing a whole program.
#[derive(Debug, Clone)]
pub struct ExecResult {
    pub final_state: PartitionedState,
    /// One verdict per `assert`, tagged with its statement index.
    pub asserts: Vec<(usize, SyncVerdict)>,
    /// Largest partition count observed.
    pub partitions_max: usize,
}

/// Allocator for anonymous intermediate dates; their ghost variables are
/// projected away once the enclosing statement completes.
struct Temps {
    counter: usize,
    vars: BTreeSet<NumVar>,
}

impl Temps {
    fn new() -> Temps {
        Temps { counter: 0, vars: BTreeSet::new() }
    }

    fn fresh_base(&mut self) -> String {
        let base = format!("$t{}", self.counter);
        self.counter += 1;
        base
    }

    fn track(&mut self, h: &DateHandle) {
        self.vars.extend(h.vars().into_iter().cloned());
    }

    fn synced(&mut self) -> DateHandle {
        let h = DateHandle::new(&self.fresh_base(), ModeTag::Synced);
        self.track(&h);
        h
    }

    fn split(&mut self) -> (DateHandle, DateHandle) {
        let base = self.fresh_base();
        let up = DateHandle::new(&base, ModeTag::Up);
        let down = DateHandle::new(&base, ModeTag::Down);
        self.track(&up);
        self.track(&down);
        (up, down)
    }
}

fn eq_dates(a: &DateHandle, b: &DateHandle) -> NumCond {
    NumCond::cmp(year_of(a), RelOp::Eq, year_of(b))
        .and(NumCond::cmp(month_of(a), RelOp::Eq, month_of(b)))
        .and(NumCond::cmp(day_of(a), RelOp::Eq, day_of(b)))
}

/// Bind `dst` to the value of `src` (registering `dst` if needed).
fn copy_date(state: &ProductState, src: &DateHandle, dst: &DateHandle) -> ProductState {
    let mut s = state.clone();
    for v in dst.vars() {
        if !s.has_var(v) {
            s.add_var(v.clone());
        }
    }
    s.assume(&eq_dates(dst, src))
}

/// One case of abstract date-expression evaluation.
struct DCase {
    state: ProductState,
    value: Duplication,
    labels: Vec<String>,
}

/// One case of abstract boolean evaluation: the truth values seen by the two
/// rounding modes in this refinement.
struct BCase {
    state: ProductState,
    bu: bool,
    bd: bool,
}

fn prune<T>(cases: Vec<T>, state_of: impl Fn(&T) -> &ProductState) -> Vec<T> {
    cases.into_iter().filter(|c| !state_of(c).is_bottom()).collect()
}

fn eval_dexpr(
    state: &ProductState,
    registry: &DupRegistry,
    expr: &DateExpr,
    temps: &mut Temps,
    opts: &ExecOptions,
) -> Result<Vec<DCase>, YmdError> {
    use crate::date::RoundingMode::{Down, Up};
    let cases = match expr {
        DateExpr::Var(name) => {
            let dup = registry.get(name).expect("unbound variable").clone();
            vec![DCase { state: state.clone(), value: dup, labels: Vec::new() }]
        }
        DateExpr::Literal(t) => {
            let h = temps.synced();
            let s = mk_literal(state, &h, *t);
            vec![DCase { state: s, value: Duplication::Synced(h), labels: Vec::new() }]
        }
        DateExpr::RandomDate => {
            let h = temps.synced();
            let mut s = mk_random_date(state, &h);
            if let Some((lo, hi)) = opts.year_range {
                s = s
                    .assume(&NumCond::cmp(year_of(&h), RelOp::Ge, NumExpr::Const(lo)))
                    .assume(&NumCond::cmp(year_of(&h), RelOp::Le, NumExpr::Const(hi)));
            }
            vec![DCase { state: s, value: Duplication::Synced(h), labels: Vec::new() }]
        }
        DateExpr::AddPeriod(inner, p) => {
            if p.days != 0 {
                return Err(YmdError::UnsupportedDayAddition);
            }
            let nb_m = 12 * p.years + p.months;
            let inner_cases = eval_dexpr(state, registry, inner, temps, opts)?;
            if nb_m == 0 {
                // Adding the zero period never rounds: alias the source.
                return Ok(inner_cases);
            }
            let mut out = Vec::new();
            for c in inner_cases {
                match &c.value {
                    Duplication::Synced(src) => {
                        // Whether rounding fires depends only on the (shared)
                        // source, so the no-rounding case keeps the result
                        // synced, and each rounding case constrains the up-
                        // and down-results of the same guard in one state.
                        let sh = temps.synced();
                        let (uh, dh) = temps.split();
                        for cd in add_months_abs(Down, &c.state, src, nb_m, &sh) {
                            if cd.label != "No rounding" {
                                continue;
                            }
                            out.push(DCase {
                                state: cd.state,
                                value: Duplication::Synced(sh.clone()),
                                labels: with_label(&c.labels, cd.label),
                            });
                        }
                        for cd in add_months_abs(Down, &c.state, src, nb_m, &dh) {
                            if cd.label == "No rounding" {
                                continue;
                            }
                            for cu in add_months_abs(Up, &cd.state, src, nb_m, &uh) {
                                if cu.label != cd.label {
                                    continue;
                                }
                                out.push(DCase {
                                    state: cu.state,
                                    value: Duplication::Split { up: uh.clone(), down: dh.clone() },
                                    labels: with_label(&c.labels, cd.label),
                                });
                            }
                        }
                    }
                    Duplication::Split { up: iu, down: id } => {
                        let (uh, dh) = temps.split();
                        for cd in add_months_abs(Down, &c.state, id, nb_m, &dh) {
                            for cu in add_months_abs(Up, &cd.state, iu, nb_m, &uh) {
                                if cu.state.is_bottom() {
                                    continue;
                                }
                                let mut labels = c.labels.clone();
                                labels.push(format!("down: {}", cd.label));
                                labels.push(format!("up: {}", cu.label));
                                out.push(DCase {
                                    state: cu.state.clone(),
                                    value: Duplication::Split { up: uh.clone(), down: dh.clone() },
                                    labels,
                                });
                            }
                        }
                    }
                }
            }
            out
        }
        DateExpr::FirstDayOf(inner) => {
            let inner_cases = eval_dexpr(state, registry, inner, temps, opts)?;
            let mut out = Vec::new();
            for c in inner_cases {
                match &c.value {
                    Duplication::Synced(src) => {
                        let h = temps.synced();
                        out.push(DCase {
                            state: first_day_of(&c.state, src, &h),
                            value: Duplication::Synced(h),
                            labels: c.labels,
                        });
                    }
                    Duplication::Split { up: iu, down: id } => {
                        let (uh, dh) = temps.split();
                        let s = first_day_of(&c.state, id, &dh);
                        out.push(DCase {
                            state: first_day_of(&s, iu, &uh),
                            value: Duplication::Split { up: uh, down: dh },
                            labels: c.labels,
                        });
                    }
                }
            }
            out
        }
        DateExpr::LastDayOf(inner) => {
            let inner_cases = eval_dexpr(state, registry, inner, temps, opts)?;
            let mut out = Vec::new();
            for c in inner_cases {
                match &c.value {
                    Duplication::Synced(src) => {
                        let h = temps.synced();
                        for cd in last_day_of(&c.state, src, &h) {
                            out.push(DCase {
                                state: cd.state,
                                value: Duplication::Synced(h.clone()),
                                labels: with_label(&c.labels, cd.label),
                            });
                        }
                    }
                    Duplication::Split { up: iu, down: id } => {
                        let (uh, dh) = temps.split();
                        for cd in last_day_of(&c.state, id, &dh) {
                            for cu in last_day_of(&cd.state, iu, &uh) {
                                let mut labels = c.labels.clone();
                                labels.push(format!("down: {}", cd.label));
                                labels.push(format!("up: {}", cu.label));
                                out.push(DCase {
                                    state: cu.state,
                                    value: Duplication::Split { up: uh.clone(), down: dh.clone() },
                                    labels,
                                });
                            }
                        }
                    }
                }
            }
            out
        }
    };
    Ok(prune(cases, |c: &DCase| &c.state))
}

fn with_label(labels: &[String], label: &str) -> Vec<String> {
    let mut v = labels.to_vec();
    v.push(label.to_string());
    v
}

fn field_component(f: Field) -> DateComponent {
    match f {
        Field::Year => DateComponent::Year,
        Field::Month => DateComponent::Month,
        Field::Day => DateComponent::Day,
    }
}

/// Re-strengthen every handle of the two compared values; comparison guards
/// refine months and years, which strengthening turns into day bounds.
fn strengthen_operands(state: &ProductState, values: [&Duplication; 2]) -> ProductState {
    let mut s = state.clone();
    for v in values {
        for h in v.handles() {
            s = strengthen(&s, h);
        }
    }
    s
}

fn eval_bexpr(
    state: &ProductState,
    registry: &DupRegistry,
    expr: &BoolExpr,
    temps: &mut Temps,
    opts: &ExecOptions,
) -> Result<Vec<BCase>, YmdError> {
    let cases = match expr {
        BoolExpr::Sync(inner) => eval_bexpr(state, registry, inner, temps, opts)?
            .into_iter()
            .map(|c| {
                let synced = c.bu == c.bd;
                BCase { state: c.state, bu: synced, bd: synced }
            })
            .collect(),
        BoolExpr::Cmp(lhs, op, rhs) => {
            let mut out = Vec::new();
            for cl in eval_dexpr(state, registry, lhs, temps, opts)? {
                for cr in eval_dexpr(&cl.state, registry, rhs, temps, opts)? {
                    let l = &cl.value;
                    let r = &cr.value;
                    if !l.is_split() && !r.is_split() {
                        // Both components compare the same triples: one case
                        // family, necessarily synchronized.
                        for c in dates_cmp(&cr.state, l.side(Side::Up), *op, r.side(Side::Up)) {
                            out.push(BCase {
                                state: strengthen_operands(&c.state, [l, r]),
                                bu: c.result,
                                bd: c.result,
                            });
                        }
                    } else {
                        for cu in dates_cmp(&cr.state, l.side(Side::Up), *op, r.side(Side::Up)) {
                            if cu.state.is_bottom() {
                                continue;
                            }
                            for cd in
                                dates_cmp(&cu.state, l.side(Side::Down), *op, r.side(Side::Down))
                            {
                                out.push(BCase {
                                    state: strengthen_operands(&cd.state, [l, r]),
                                    bu: cu.result,
                                    bd: cd.result,
                                });
                            }
                        }
                    }
                }
            }
            out
        }
        BoolExpr::FieldCmp(field, var, op, n) => {
            let dup = registry.get(var).expect("unbound variable").clone();
            let comp = field_component(*field);
            match dup {
                Duplication::Synced(h) => vec![
                    BCase { state: assume_field(state, &h, comp, *op, *n), bu: true, bd: true },
                    BCase {
                        state: assume_field(state, &h, comp, op.negate(), *n),
                        bu: false,
                        bd: false,
                    },
                ],
                Duplication::Split { up, down } => {
                    let mut out = Vec::new();
                    for (bu, su) in [
                        (true, assume_field(state, &up, comp, *op, *n)),
                        (false, assume_field(state, &up, comp, op.negate(), *n)),
                    ] {
                        if su.is_bottom() {
                            continue;
                        }
                        for (bd, sd) in [
                            (true, assume_field(&su, &down, comp, *op, *n)),
                            (false, assume_field(&su, &down, comp, op.negate(), *n)),
                        ] {
                            out.push(BCase { state: sd, bu, bd });
                        }
                    }
                    out
                }
            }
        }
        BoolExpr::And(l, r) => {
            let mut out = Vec::new();
            for cl in eval_bexpr(state, registry, l, temps, opts)? {
                for cr in eval_bexpr(&cl.state, registry, r, temps, opts)? {
                    out.push(BCase { state: cr.state, bu: cl.bu && cr.bu, bd: cl.bd && cr.bd });
                }
            }
            out
        }
        BoolExpr::Or(l, r) => {
            let mut out = Vec::new();
            for cl in eval_bexpr(state, registry, l, temps, opts)? {
                for cr in eval_bexpr(&cl.state, registry, r, temps, opts)? {
                    out.push(BCase { state: cr.state, bu: cl.bu || cr.bu, bd: cl.bd || cr.bd });
                }
            }
            out
        }
        BoolExpr::Not(inner) => eval_bexpr(state, registry, inner, temps, opts)?
            .into_iter()
            .map(|c| BCase { state: c.state, bu: !c.bu, bd: !c.bd })
            .collect(),
    };
    Ok(prune(cases, |c: &BCase| &c.state))
}

impl PartitionedState {
    pub fn initial(cap: usize) -> PartitionedState {
        PartitionedState {
            partitions: vec![Partition {
                state: ProductState::top([]),
                registry: DupRegistry::new(),
                trace: Vec::new(),
            }],
            cap,
        }
    }

    /// `date v = e;`
    pub fn assign_date(
        &self,
        name: &str,
        expr: &DateExpr,
        opts: &ExecOptions,
    ) -> Result<PartitionedState, YmdError> {
        let mut partitions = Vec::new();
        for p in &self.partitions {
            let mut temps = Temps::new();
            for c in eval_dexpr(&p.state, &p.registry, expr, &mut temps, opts)? {
                let (state, dup) = match &c.value {
                    Duplication::Synced(src) => {
                        let h = DateHandle::new(name, ModeTag::Synced);
                        (copy_date(&c.state, src, &h), Duplication::Synced(h))
                    }
                    Duplication::Split { up, down } => {
                        let hu = DateHandle::new(name, ModeTag::Up);
                        let hd = DateHandle::new(name, ModeTag::Down);
                        let s = copy_date(&c.state, up, &hu);
                        let s = copy_date(&s, down, &hd);
                        (s, Duplication::Split { up: hu, down: hd })
                    }
                };
                let state = state.project_out(&temps.vars);
                if state.is_bottom() {
                    continue;
                }
                let mut child = p.child(state, &c.labels);
                child.registry.insert(name.to_string(), dup);
                partitions.push(child);
            }
        }
        Ok(PartitionedState { partitions, cap: self.cap }.enforce_cap())
    }

    /// `assume(e);` — keeps the refinements where both components hold.
    pub fn assume(&self, expr: &BoolExpr, opts: &ExecOptions) -> Result<PartitionedState, YmdError> {
        let mut partitions = Vec::new();
        for p in &self.partitions {
            let mut temps = Temps::new();
            for c in eval_bexpr(&p.state, &p.registry, expr, &mut temps, opts)? {
                if !(c.bu && c.bd) {
                    continue;
                }
                let state = c.state.project_out(&temps.vars);
                if !state.is_bottom() {
                    partitions.push(p.child(state, &[]));
                }
            }
        }
        Ok(PartitionedState { partitions, cap: self.cap }.enforce_cap())
    }

    /// `assert(e);` — collects the refinements where the assertion fails.
    /// With `e = sync(c)` these are exactly the desynchronization cases
    /// (up-true ∧ down-false and up-false ∧ down-true).
    pub fn eval_assert(&self, expr: &BoolExpr, opts: &ExecOptions) -> Result<SyncVerdict, YmdError> {
        let mut failing = Vec::new();
        for p in &self.partitions {
            let mut temps = Temps::new();
            for c in eval_bexpr(&p.state, &p.registry, expr, &mut temps, opts)? {
                if c.bu && c.bd {
                    continue;
                }
                let state = c.state.project_out(&temps.vars);
                if !state.is_bottom() {
                    failing.push(p.child(state, &[]));
                }
            }
        }
        if failing.is_empty() {
            Ok(SyncVerdict::Proven)
        } else {
            Ok(SyncVerdict::Unproven(failing))
        }
    }

    /// Join partitions down to the cap. Only partitions with identical
    /// split-status signatures can be joined; when none exist, synced
    /// variables are promoted to split form first (sound: the shared triple
    /// becomes two equal ones).
    pub fn enforce_cap(mut self) -> PartitionedState {
        while self.partitions.len() > self.cap {
            if let Some((i, j)) = self.best_join_pair() {
                let pj = self.partitions.remove(j);
                let pi = &mut self.partitions[i];
                pi.state = pi.state.join(&pj.state);
                for l in pj.trace {
                    if !pi.trace.contains(&l) {
                        pi.trace.push(l);
                    }
                }
            } else {
                for p in &mut self.partitions {
                    promote_all(p);
                }
            }
        }
        self
    }

    /// The joinable pair whose join loses the fewest singleton ghost
    /// intervals, i.e. the least-informative pair.
    fn best_join_pair(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, (usize, usize))> = None;
        for i in 0..self.partitions.len() {
            for j in i + 1..self.partitions.len() {
                let (a, b) = (&self.partitions[i], &self.partitions[j]);
                if a.signature() != b.signature() {
                    continue;
                }
                let joined = a.state.join(&b.state);
                let lost = a
                    .state
                    .vars()
                    .iter()
                    .filter(|v| {
                        let single = |s: &ProductState| {
                            s.interval_of(v).as_constant().is_some()
                        };
                        single(&a.state) && single(&b.state) && !single(&joined)
                    })
                    .count();
                if best.map_or(true, |(cost, _)| lost < cost) {
                    best = Some((lost, (i, j)));
                }
            }
        }
        best.map(|(_, pair)| pair)
    }

    /// Is the concrete pair of environments represented by some partition?
    pub fn double_env_member(&self, envs: &DoubleEnv) -> bool {
        self.partitions.iter().any(|p| partition_member(p, envs))
    }
}

/// Promote every synced variable of the partition to split form.
fn promote_all(p: &mut Partition) {
    let names: Vec<String> = p
        .registry
        .iter()
        .filter(|(_, d)| !d.is_split())
        .map(|(v, _)| v.clone())
        .collect();
    for name in names {
        let h = DateHandle::new(&name, ModeTag::Synced);
        let up = DateHandle::new(&name, ModeTag::Up);
        let down = DateHandle::new(&name, ModeTag::Down);
        let s = copy_date(&p.state, &h, &up);
        let s = copy_date(&s, &h, &down);
        p.state = s.project_out(&h.vars().into_iter().cloned().collect());
        p.registry.insert(name, Duplication::Split { up, down });
    }
}

/// γ-membership of a concrete double environment in one partition: synced
/// variables must agree between the modes and bind the shared triple; split
/// variables bind each mode's triple.
pub fn partition_member(p: &Partition, envs: &DoubleEnv) -> bool {
    let mut bindings: Vec<(&DateHandle, YmdTriple)> = Vec::new();
    for (name, dup) in &p.registry {
        let (u, d) = match (envs.up.get(name), envs.down.get(name)) {
            (Some(u), Some(d)) => match (u.triple(), d.triple()) {
                (Some(u), Some(d)) => (u, d),
                _ => return false,
            },
            _ => return false,
        };
        match dup {
            Duplication::Synced(h) => {
                if u != d {
                    return false;
                }
                bindings.push((h, u));
            }
            Duplication::Split { up, down } => {
                bindings.push((up, u));
                bindings.push((down, d));
            }
        }
    }
    gamma_member(&p.state, &bindings)
}

/// Abstractly execute a whole program.
pub fn exec_program(program: &Program, opts: &ExecOptions) -> Result<ExecResult, BidatesError> {
    let mut ps = PartitionedState::initial(opts.cap);
    let mut asserts = Vec::new();
    let mut partitions_max = ps.partitions.len();
    for (i, stmt) in program.stmts.iter().enumerate() {
        let wrap = |source| BidatesError::Unsupported { source, stmt: i };
        match stmt {
            Stmt::DateDecl { name, expr } => {
                ps = ps.assign_date(name, expr, opts).map_err(wrap)?;
            }
            Stmt::Assume(b) => {
                ps = ps.assume(b, opts).map_err(wrap)?;
            }
            Stmt::Assert(b) => {
                asserts.push((i, ps.eval_assert(b, opts).map_err(wrap)?));
            }
        }
        partitions_max = partitions_max.max(ps.partitions.len());
    }
    Ok(ExecResult { final_state: ps, asserts, partitions_max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{run_double, RunOutcome, YearRange};
    use crate::lang::parse;

    const LISTING1: &str = "\
date current = random_date();
date birthday = random_date();
date intermediate = birthday + [2 years, 0 months, 0 days];
date limit = first_day_of(intermediate);
assert(sync(current < limit));
";

    fn exec_src(src: &str) -> ExecResult {
        let parsed = parse(src).unwrap();
        exec_program(&parsed.program, &ExecOptions::default()).unwrap()
    }

    /// Does the state entail `cond`? Checked by refuting its negation.
    fn entails(state: &ProductState, cond: &NumCond) -> bool {
        state.assume(&cond.clone().negated()).is_bottom()
    }

    #[test]
    fn zero_period_addition_stays_synced() {
        let res = exec_src(
            "date d = random_date();\n\
             date d2 = d + [0 years, 0 months, 0 days];\n",
        );
        for p in &res.final_state.partitions {
            assert!(!p.registry["d2"].is_split());
            // The alias carries the source's exact value.
            let (h, h2) = (p.registry["d"].side(Side::Up), p.registry["d2"].side(Side::Up));
            assert!(entails(&p.state, &eq_dates(h, h2)));
        }
    }

    #[test]
    fn addition_partitions_into_synced_and_split() {
        let res = exec_src(
            "date birthday = random_date();\n\
             date intermediate = birthday + [2 years, 0 months, 0 days];\n",
        );
        let splits: Vec<&Partition> = res
            .final_state
            .partitions
            .iter()
            .filter(|p| p.registry["intermediate"].is_split())
            .collect();
        let synced = res.final_state.partitions.len() - splits.len();
        assert_eq!(synced, 1, "one no-rounding partition");
        // Adding 24 months re-lands in the birth month, so only the Feb-29
        // birthday case can round.
        assert_eq!(splits.len(), 1, "one rounding partition");
        let p = splits[0];
        let b = p.registry["birthday"].side(Side::Up);
        assert!(entails(&p.state, &NumCond::cmp(month_of(b), RelOp::Eq, NumExpr::Const(2))));
        assert!(entails(&p.state, &NumCond::cmp(day_of(b), RelOp::Eq, NumExpr::Const(29))));
        let up = p.registry["intermediate"].side(Side::Up);
        let down = p.registry["intermediate"].side(Side::Down);
        assert!(entails(&p.state, &NumCond::cmp(month_of(up), RelOp::Eq, NumExpr::Const(3))));
        assert!(entails(&p.state, &NumCond::cmp(day_of(up), RelOp::Eq, NumExpr::Const(1))));
        assert!(entails(&p.state, &NumCond::cmp(month_of(down), RelOp::Eq, NumExpr::Const(2))));
        assert!(entails(&p.state, &NumCond::cmp(day_of(down), RelOp::Eq, NumExpr::Const(28))));
    }

    #[test]
    fn listing1_is_unproven_with_february_desync() {
        let res = exec_src(LISTING1);
        assert_eq!(res.asserts.len(), 1);
        let desyncs = match &res.asserts[0].1 {
            SyncVerdict::Unproven(d) => d,
            SyncVerdict::Proven => panic!("expected Unproven"),
        };
        assert!(!desyncs.is_empty());
        for p in desyncs {
            let current = p.registry["current"].side(Side::Up);
            let birthday = p.registry["birthday"].side(Side::Up);
            assert!(entails(&p.state, &NumCond::cmp(month_of(current), RelOp::Eq, NumExpr::Const(2))));
            assert!(entails(
                &p.state,
                &NumCond::cmp(year_of(current), RelOp::Eq, year_of(birthday).add(NumExpr::Const(2))),
            ));
        }
    }

    #[test]
    fn constrained_listing1_is_proven() {
        let src = "\
date current = random_date();
date birthday = random_date();
assume(day_of(birthday) <= 28);
date intermediate = birthday + [2 years, 0 months, 0 days];
date limit = first_day_of(intermediate);
assert(sync(current < limit));
";
        let res = exec_src(src);
        assert!(res.asserts[0].1.is_proven());
    }

    #[test]
    fn midmonth_comparison_is_proven() {
        let res = exec_src(
            "date d = random_date();\n\
             assert(sync(d + [0 years, 1 months, 0 days] <= 2023-03-15));\n",
        );
        assert!(res.asserts[0].1.is_proven());
    }

    #[test]
    fn double_executions_are_members_of_some_partition() {
        for src in [
            LISTING1,
            "date d = random_date();\n\
             date e = d + [0 years, 7 months, 0 days];\n\
             date f = last_day_of(e);\n",
            "date a = random_date();\n\
             assume(month_of(a) >= 6);\n\
             date b = a + [1 years, 1 months, 0 days];\n\
             date c = first_day_of(a);\n",
        ] {
            let parsed = parse(src).unwrap();
            let res = exec_program(&parsed.program, &ExecOptions::default()).unwrap();
            for seed in 0..150 {
                let (out, envs) = run_double(&parsed.program, seed, YearRange::default()).unwrap();
                if matches!(out, RunOutcome::AssumeViolated { .. }) {
                    continue;
                }
                assert!(
                    res.final_state.double_env_member(&envs),
                    "seed {seed} escaped all partitions\n{src}"
                );
            }
        }
    }

    #[test]
    fn partition_cap_collapses_soundly() {
        let src = "date d = random_date();\n\
                   date e = d + [0 years, 2 months, 0 days];\n\
                   date f = d + [0 years, 3 months, 0 days];\n";
        let parsed = parse(src).unwrap();
        let opts = ExecOptions { cap: 1, ..ExecOptions::default() };
        let res = exec_program(&parsed.program, &opts).unwrap();
        assert_eq!(res.final_state.partitions.len(), 1);
        for seed in 0..200 {
            let (_, envs) = run_double(&parsed.program, seed, YearRange::default()).unwrap();
            assert!(res.final_state.double_env_member(&envs), "seed {seed}");
        }
    }
}
