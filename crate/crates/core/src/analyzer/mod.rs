//! Analysis driver and reporting: runs a program through the abstract pair
//! semantics, selects the most informative desynchronization partition per
//! failed assertion, and extracts human-readable counter-example hints from
//! its numerical state.

use crate::bidates::{
    exec_program, BidatesError, DupRegistry, ExecOptions, Partition, SyncVerdict,
};
use crate::lang::{parse, render_bexpr, BoolExpr, LangError, Parsed, Span, Stmt};
use crate::numdom::{LinExpr, NumCond, NumExpr, NumVar, ProductState};
use num_traits::ToPrimitive;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalyzeOptions {
    pub exec: ExecOptions,
    pub unicode: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { exec: ExecOptions::default(), unicode: false }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AnalyzeError {
    #[error("{0}")]
    Parse(LangError),
    #[error("{line}: {message}")]
    Unsupported { stmt: usize, line: u32, message: String },
}

/// One fact about a desynchronization partition, re-checkable against the
/// abstract state via `as_cond`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Hint {
    /// `v ∈ [lo, hi]` (a constant when `lo == hi`).
    Interval { var: NumVar, lo: i64, hi: i64 },
    /// `v ≡ residue (mod modulus)`, modulus > 1.
    Congruence { var: NumVar, modulus: i64, residue: i64 },
    /// Variables pairwise equal up to constant offsets. Offsets are relative
    /// to the leading group, whose members all carry offset 0.
    Chain { members: Vec<(NumVar, i64)> },
}

impl Hint {
    /// The hint as a numerical condition (for entailment re-checking).
    pub fn as_cond(&self) -> NumCond {
        match self {
            Hint::Interval { var, lo, hi } => NumCond::cmp(
                NumExpr::var(var),
                crate::lang::RelOp::Ge,
                NumExpr::Const(*lo),
            )
            .and(NumCond::cmp(NumExpr::var(var), crate::lang::RelOp::Le, NumExpr::Const(*hi))),
            Hint::Congruence { var, modulus, residue } => NumCond::cmp(
                NumExpr::var(var).modulo(*modulus),
                crate::lang::RelOp::Eq,
                NumExpr::Const(*residue),
            ),
            Hint::Chain { members } => {
                let (v0, o0) = &members[0];
                members[1..].iter().fold(NumCond::True, |acc, (v, o)| {
                    acc.and(NumCond::cmp(
                        NumExpr::var(v0),
                        crate::lang::RelOp::Eq,
                        NumExpr::var(v).add(NumExpr::Const(o0 - o)),
                    ))
                })
            }
        }
    }

    pub fn render(&self, unicode: bool) -> String {
        match self {
            Hint::Interval { var, lo, hi } => {
                if lo == hi {
                    format!("{} = {lo}", pretty_var(var, unicode))
                } else {
                    format!("{} = [{lo},{hi}]", pretty_var(var, unicode))
                }
            }
            Hint::Congruence { var, modulus, residue } => {
                format!("{} =[{modulus}] {residue}", pretty_var(var, unicode))
            }
            Hint::Chain { members } => {
                let mut out = String::new();
                for (i, (v, off)) in members.iter().enumerate() {
                    if i > 0 {
                        out.push_str(" = ");
                    }
                    out.push_str(&pretty_var(v, unicode));
                    if *off != 0 {
                        // `off` is the group's value minus the leading
                        // group's, so the lead equals this member − off.
                        if *off < 0 {
                            let _ = write!(out, " + {}", -off);
                        } else {
                            let _ = write!(out, " - {off}");
                        }
                    }
                }
                out
            }
        }
    }
}

/// `u.y#limit` → `u.year(limit)` (or `↑year(limit)` in unicode mode).
pub fn pretty_var(v: &NumVar, unicode: bool) -> String {
    let name = v.name();
    let (prefix, rest) = if let Some(r) = name.strip_prefix("u.") {
        (if unicode { "↑" } else { "u." }, r)
    } else if let Some(r) = name.strip_prefix("d.") {
        (if unicode { "↓" } else { "d." }, r)
    } else {
        ("", name)
    };
    let (comp, base) = match rest.split_once('#') {
        Some(("y", b)) => ("year", b),
        Some(("m", b)) => ("month", b),
        Some(("d", b)) => ("day", b),
        _ => return name.to_string(),
    };
    format!("{prefix}{comp}({base})")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Proven,
    Unproven,
}

#[derive(Debug, Clone)]
pub struct AssertReport {
    pub stmt: usize,
    pub span: Span,
    /// Span of the argument of a top-level `sync`, when present.
    pub sync_span: Option<Span>,
    /// Rendered compared expression (the sync argument for sync asserts).
    pub expr: String,
    pub verdict: Verdict,
    pub hints: Vec<Hint>,
    /// The selected desynchronization partition (empty when proven).
    pub hint_partition: Option<Partition>,
}

#[derive(Debug, Clone)]
pub struct AnalysisStats {
    pub partitions_max: usize,
    pub millis: u128,
}

#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub file: String,
    pub asserts: Vec<AssertReport>,
    pub stats: AnalysisStats,
}

impl AnalysisReport {
    pub fn all_proven(&self) -> bool {
        self.asserts.iter().all(|a| a.verdict == Verdict::Proven)
    }
}

/// Declaration order of the program's date variables.
fn decl_order(parsed: &Parsed) -> Vec<String> {
    parsed
        .program
        .stmts
        .iter()
        .filter_map(|s| match s {
            Stmt::DateDecl { name, .. } => Some(name.clone()),
            _ => None,
        })
        .collect()
}

/// §-style heuristic: most split variables first, then most constant
/// day/month ghosts, ties broken by discovery order.
pub fn select_hint_partition<'a>(desyncs: &'a [Partition]) -> &'a Partition {
    let score = |p: &Partition| {
        let splits = p.registry.values().filter(|d| d.is_split()).count();
        let constants = p
            .registry
            .values()
            .flat_map(|d| d.handles())
            .flat_map(|h| [&h.month, &h.day])
            .filter(|v| p.state.interval_of(v).as_constant().is_some())
            .count();
        (splits, constants)
    };
    desyncs
        .iter()
        .fold(None::<(&Partition, (usize, usize))>, |best, p| {
            let s = score(p);
            match best {
                Some((_, bs)) if bs >= s => best,
                _ => Some((p, s)),
            }
        })
        .expect("non-empty desync list")
        .0
}

fn component_of(v: &NumVar) -> char {
    let name = v.name();
    let rest = name.strip_prefix("u.").or_else(|| name.strip_prefix("d.")).unwrap_or(name);
    rest.chars().next().unwrap_or('?')
}

/// All ghost variables of the registry, most recently declared variable
/// first, up before down, month before day before year.
fn ordered_ghosts(registry: &DupRegistry, order: &[String]) -> Vec<NumVar> {
    let mut out = Vec::new();
    for name in order.iter().rev() {
        let Some(dup) = registry.get(name) else { continue };
        for h in dup.handles() {
            out.push(h.month.clone());
            out.push(h.day.clone());
            out.push(h.year.clone());
        }
    }
    out
}

/// Extract the meaningful facts of one abstract state.
pub fn extract_hints(
    state: &ProductState,
    registry: &DupRegistry,
    order: &[String],
) -> Vec<Hint> {
    let ghosts = ordered_ghosts(registry, order);
    let mut hints = Vec::new();
    let mut chain_candidates = Vec::new();
    for v in &ghosts {
        let itv = state.interval_of(v);
        let bounds = match (&itv.lo, &itv.hi) {
            (Some(lo), Some(hi)) => lo.to_i64().zip(hi.to_i64()),
            _ => None,
        };
        // Meaningful intervals: strictly inside the trivial component range
        // (day [1,31], month [1,12]); any finite bounds for years.
        let meaningful = match (component_of(v), bounds) {
            ('d', Some((lo, hi))) => lo > 1 || hi < 31,
            ('m', Some((lo, hi))) => lo > 1 || hi < 12,
            ('y', Some(_)) => true,
            _ => false,
        };
        if meaningful {
            let (lo, hi) = bounds.unwrap();
            hints.push(Hint::Interval { var: v.clone(), lo, hi });
        } else {
            chain_candidates.push(v.clone());
        }
    }
    for v in &ghosts {
        let c = state.congruence_of(v);
        if let (Some(m), Some(r)) = (c.modulus.to_i64(), c.residue.to_i64()) {
            if m > 1 {
                hints.push(Hint::Congruence { var: v.clone(), modulus: m, residue: r });
            }
        }
    }
    hints.extend(equality_chains(state, &chain_candidates));
    hints
}

/// Linear relations among the variables that had no meaningful interval:
/// connected components of the "differs by a constant" relation.
fn equality_chains(state: &ProductState, candidates: &[NumVar]) -> Vec<Hint> {
    let n = candidates.len();
    let diff = |a: &NumVar, b: &NumVar| -> Option<i64> {
        let mut e = LinExpr::var(a.clone());
        e.sub(&LinExpr::var(b.clone()));
        state.grid().congruence_of(&e).as_constant().and_then(|c| c.to_i64())
    };
    let mut chains = Vec::new();
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        // Offsets relative to the start, discovered breadth-first.
        let mut offsets: BTreeMap<usize, i64> = BTreeMap::from([(start, 0)]);
        let mut queue = vec![start];
        seen[start] = true;
        while let Some(i) = queue.pop() {
            for j in 0..n {
                if seen[j] {
                    continue;
                }
                if let Some(d) = diff(&candidates[i], &candidates[j]) {
                    offsets.insert(j, offsets[&i] - d);
                    seen[j] = true;
                    queue.push(j);
                }
            }
        }
        if offsets.len() < 2 {
            continue;
        }
        // Lead with the largest equal group (first-listed variable breaking
        // ties), then the rest by the same rule; offsets are re-based so the
        // leading group sits at 0.
        let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (&i, &off) in &offsets {
            groups.entry(off).or_default().push(i);
        }
        let mut ordered: Vec<(i64, Vec<usize>)> = groups.into_iter().collect();
        ordered.sort_by_key(|(off, members)| {
            (usize::MAX - members.len(), *members.iter().min().unwrap(), *off)
        });
        let base = ordered[0].0;
        let members = ordered
            .iter()
            .flat_map(|(off, ms)| ms.iter().map(move |&i| (candidates[i].clone(), off - base)))
            .collect();
        chains.push(Hint::Chain { members });
    }
    chains
}

/// Analyze a parsed program.
pub fn analyze_parsed(
    file: &str,
    parsed: &Parsed,
    opts: &AnalyzeOptions,
) -> Result<AnalysisReport, AnalyzeError> {
    let started = std::time::Instant::now();
    let order = decl_order(parsed);
    let result = exec_program(&parsed.program, &opts.exec).map_err(|e| match e {
        BidatesError::Unsupported { source, stmt } => AnalyzeError::Unsupported {
            stmt,
            line: parsed.stmt_spans[stmt].line,
            message: source.to_string(),
        },
    })?;
    let mut asserts = Vec::new();
    for (stmt, verdict) in &result.asserts {
        let body = match &parsed.program.stmts[*stmt] {
            Stmt::Assert(b) => b,
            _ => unreachable!("assert verdict on non-assert statement"),
        };
        let expr = match body {
            BoolExpr::Sync(inner) => render_bexpr(inner),
            other => render_bexpr(other),
        };
        let (verdict, hints, hint_partition) = match verdict {
            SyncVerdict::Proven => (Verdict::Proven, Vec::new(), None),
            SyncVerdict::Unproven(desyncs) => {
                let p = select_hint_partition(desyncs);
                (Verdict::Unproven, extract_hints(&p.state, &p.registry, &order), Some(p.clone()))
            }
        };
        asserts.push(AssertReport {
            stmt: *stmt,
            span: parsed.stmt_spans[*stmt],
            sync_span: parsed.sync_arg_spans[*stmt],
            expr,
            verdict,
            hints,
            hint_partition,
        });
    }
    Ok(AnalysisReport {
        file: file.to_string(),
        asserts,
        stats: AnalysisStats {
            partitions_max: result.partitions_max,
            millis: started.elapsed().as_millis(),
        },
    })
}

/// Analyze source text.
pub fn analyze_source(
    file: &str,
    source: &str,
    opts: &AnalyzeOptions,
) -> Result<AnalysisReport, AnalyzeError> {
    let parsed = parse(source).map_err(AnalyzeError::Parse)?;
    analyze_parsed(file, &parsed, opts)
}

/// Wrap comma-separated hints at a width, continuation lines indented.
fn wrap_hints(rendered: &[String], indent: usize, width: usize) -> String {
    let mut out = String::new();
    let mut line = " ".repeat(indent);
    for (i, h) in rendered.iter().enumerate() {
        let sep = if i + 1 < rendered.len() { "," } else { "" };
        if line.trim().is_empty() {
            let _ = write!(line, "{h}{sep}");
        } else if line.chars().count() + h.chars().count() + 2 <= width {
            let _ = write!(line, " {h}{sep}");
        } else {
            out.push_str(&line);
            out.push('\n');
            line = format!("{}{h}{sep}", " ".repeat(indent));
        }
    }
    out.push_str(&line);
    out
}

/// Human-readable report, one block per assertion.
pub fn render_text(report: &AnalysisReport, parsed: &Parsed, unicode: bool) -> String {
    let mut out = String::new();
    for a in &report.asserts {
        let line = a.span.line;
        let prefix = format!("{line}: ");
        let _ = writeln!(out, "{prefix}{}", parsed.line_text(line));
        if let Some(sync) = a.sync_span {
            let pad = prefix.chars().count() + sync.col as usize - 1;
            let _ = writeln!(
                out,
                "{}{}",
                " ".repeat(pad),
                "^".repeat((sync.end_col - sync.col) as usize)
            );
        }
        match a.verdict {
            Verdict::Proven => {
                let what = if a.sync_span.is_some() {
                    "No desynchronization possible"
                } else {
                    "Assertion proven"
                };
                let _ = writeln!(out, "{what}: ({}).", a.expr);
            }
            Verdict::Unproven => {
                let what = if a.sync_span.is_some() {
                    "Desynchronization detected"
                } else {
                    "Assertion not proven"
                };
                let _ = writeln!(out, "{what}: ({}). Hints:", a.expr);
                let rendered: Vec<String> = a.hints.iter().map(|h| h.render(unicode)).collect();
                let _ = writeln!(out, "{}", wrap_hints(&rendered, 2, 78));
            }
        }
    }
    out
}

/// JSON report: `{file, asserts: [{line, col, expr, verdict, hints:
/// [{kind, var, payload}]}], stats: {partitions_max, millis}}`.
pub fn render_json(report: &AnalysisReport) -> serde_json::Value {
    let hint_json = |h: &Hint| {
        let (kind, var) = match h {
            Hint::Interval { var, .. } => ("interval", Some(pretty_var(var, false))),
            Hint::Congruence { var, .. } => ("congruence", Some(pretty_var(var, false))),
            Hint::Chain { .. } => ("chain", None),
        };
        serde_json::json!({ "kind": kind, "var": var, "payload": h.render(false) })
    };
    serde_json::json!({
        "file": report.file,
        "asserts": report.asserts.iter().map(|a| serde_json::json!({
            "line": a.span.line,
            "col": a.span.col,
            "expr": a.expr,
            "verdict": match a.verdict { Verdict::Proven => "proven", Verdict::Unproven => "unproven" },
            "hints": a.hints.iter().map(hint_json).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
        "stats": { "partitions_max": report.stats.partitions_max, "millis": report.stats.millis },
    })
}

/// Shared by CLI and tests: 0 all proven, 1 some assertion unproven.
pub fn exit_code(report: &AnalysisReport) -> i32 {
    if report.all_proven() {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bidates::Side;

    const LISTING1: &str = "\
date current = random_date();
date birthday = random_date();
date intermediate = birthday + [2 years, 0 months, 0 days];
date limit = first_day_of(intermediate);
assert(sync(current < limit));
";

    fn analyze(src: &str) -> (AnalysisReport, Parsed) {
        let parsed = parse(src).unwrap();
        let report = analyze_parsed("test.dl", &parsed, &AnalyzeOptions::default()).unwrap();
        (report, parsed)
    }

    fn hint_strings(report: &AnalysisReport) -> Vec<String> {
        report.asserts[0].hints.iter().map(|h| h.render(false)).collect()
    }

    #[test]
    fn listing1_report_has_expected_hints() {
        let (report, _) = analyze(LISTING1);
        assert_eq!(report.asserts.len(), 1);
        assert_eq!(report.asserts[0].verdict, Verdict::Unproven);
        let hints = hint_strings(&report);
        for expected in [
            "month(birthday) = 2",
            "day(birthday) = 29",
            "month(current) = 2",
            "u.month(limit) = 3",
            "u.day(limit) = 1",
            "d.month(limit) = 2",
            "d.day(limit) = 1",
            "u.month(intermediate) = 3",
            "u.day(intermediate) = 1",
            "d.month(intermediate) = 2",
            "d.day(intermediate) = 28",
            "year(birthday) =[4] 0",
        ] {
            assert!(hints.contains(&expected.to_string()), "missing {expected:?} in {hints:#?}");
        }
        let day_current = hints.iter().find(|h| h.starts_with("day(current)"));
        assert!(
            matches!(day_current.map(String::as_str), Some("day(current) = [1,28]" | "day(current) = [1,29]")),
            "unexpected day(current) hint: {day_current:?}"
        );
        let chain = hints.iter().find(|h| h.contains(" = ") && h.contains("year(current)"));
        let chain = chain.expect("year equality chain");
        for part in [
            "year(current)",
            "u.year(intermediate)",
            "u.year(limit)",
            "d.year(intermediate)",
            "d.year(limit)",
            "year(birthday) + 2",
        ] {
            assert!(chain.contains(part), "chain {chain:?} missing {part:?}");
        }
    }

    #[test]
    fn hints_are_entailed_by_the_selected_state() {
        let (report, _) = analyze(LISTING1);
        let a = &report.asserts[0];
        let p = a.hint_partition.as_ref().unwrap();
        for h in &a.hints {
            assert!(
                p.state.assume(&h.as_cond().negated()).is_bottom(),
                "hint not entailed: {}",
                h.render(false)
            );
        }
    }

    #[test]
    fn constrained_program_is_proven_with_no_hints() {
        let src = "\
date current = random_date();
date birthday = random_date();
assume(day_of(birthday) <= 28);
date intermediate = birthday + [2 years, 0 months, 0 days];
date limit = first_day_of(intermediate);
assert(sync(current < limit));
";
        let (report, parsed) = analyze(src);
        assert!(report.all_proven());
        assert_eq!(exit_code(&report), 0);
        assert!(report.asserts[0].hints.is_empty());
        let text = render_text(&report, &parsed, false);
        assert!(text.contains("No desynchronization possible"), "{text}");
    }

    #[test]
    fn text_report_is_deterministic_and_well_shaped() {
        let (report1, parsed) = analyze(LISTING1);
        let (report2, _) = analyze(LISTING1);
        let t1 = render_text(&report1, &parsed, false);
        let t2 = render_text(&report2, &parsed, false);
        assert_eq!(t1, t2);
        assert!(t1.starts_with("5: assert(sync(current < limit));\n"), "{t1}");
        let caret_line = t1.lines().nth(1).unwrap();
        assert_eq!(caret_line.trim(), "^".repeat("current < limit".len()));
        // The caret underlines exactly the sync argument in the excerpt.
        let excerpt = t1.lines().next().unwrap();
        let start = caret_line.find('^').unwrap();
        assert_eq!(&excerpt[start..start + 15], "current < limit");
        assert!(t1.contains("Desynchronization detected: (current < limit). Hints:"));
    }

    #[test]
    fn unicode_mode_uses_arrows() {
        let (report, _) = analyze(LISTING1);
        let hints: Vec<String> =
            report.asserts[0].hints.iter().map(|h| h.render(true)).collect();
        assert!(hints.iter().any(|h| h.starts_with("↑month(limit)")), "{hints:#?}");
        assert!(hints.iter().any(|h| h.starts_with("↓month(limit)")), "{hints:#?}");
    }

    #[test]
    fn json_report_matches_schema() {
        let (report, _) = analyze(LISTING1);
        let v = render_json(&report);
        assert_eq!(v["file"], "test.dl");
        assert_eq!(v["asserts"][0]["line"], 5);
        assert_eq!(v["asserts"][0]["verdict"], "unproven");
        assert!(v["asserts"][0]["hints"].as_array().unwrap().len() >= 10);
        assert!(v["stats"]["partitions_max"].as_u64().unwrap() >= 2);
    }

    #[test]
    fn selected_partition_prefers_split_variables() {
        let (report, _) = analyze(LISTING1);
        let p = report.asserts[0].hint_partition.as_ref().unwrap();
        assert!(p.registry["intermediate"].is_split());
        assert!(p.registry["limit"].is_split());
        let b = p.registry["birthday"].side(Side::Up);
        assert!(p.state.interval_of(&b.day).as_constant().is_some());
    }

    #[test]
    fn unsupported_day_periods_are_reported_with_location() {
        let err = analyze_source(
            "t.dl",
            "date d = random_date();\ndate e = d + [0 years, 0 months, 5 days];\n",
            &AnalyzeOptions::default(),
        )
        .unwrap_err();
        match err {
            AnalyzeError::Unsupported { stmt, line, .. } => {
                assert_eq!((stmt, line), (1, 2));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
