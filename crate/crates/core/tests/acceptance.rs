//! Acceptance suite: one test (and one pass/fail line) per criterion.

use datesync::analyzer::{analyze_source, exit_code, AnalyzeOptions, Verdict};
use datesync::bidates::{exec_program, ExecOptions};
use datesync::date::{self, DateValue, Period, RoundingMode, YmdTriple};
use datesync::interp::{run_double, RunOutcome, YearRange};
use datesync::lang::{BoolExpr, DateExpr, Field, Program, RelOp, Stmt};
use datesync::litmus;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::time::Instant;

fn report(n: usize, desc: &str) {
    println!("acceptance criterion {n}: pass — {desc}");
}

fn sample_years() -> Vec<i64> {
    let mut ys: Vec<i64> = (1999..=2001).collect();
    ys.extend(2019..=2025);
    ys.extend(2099..=2101);
    ys
}

fn valid_dates(years: &[i64]) -> Vec<YmdTriple> {
    let mut out = Vec::new();
    for &y in years {
        for m in 1..=12 {
            for d in 1..=date::nb_days(y, m) {
                out.push(YmdTriple::new(y, m, d));
            }
        }
    }
    out
}

#[test]
fn criterion_1_litmus_anchor() {
    let started = Instant::now();
    let start = DateValue::Date(YmdTriple::new(2004, 2, 29));
    let p = Period::years(2);
    assert_eq!(date::add_period(RoundingMode::Down, start, p), DateValue::date(2006, 2, 28));
    assert_eq!(date::add_period(RoundingMode::Up, start, p), DateValue::date(2006, 3, 1));
    assert_eq!(date::add_period(RoundingMode::Abort, start, p), DateValue::Bottom);
    let elapsed = started.elapsed();
    assert!(elapsed.as_micros() < 1000, "took {elapsed:?}");
    report(1, "2004-02-29 + 2y = 2006-02-28 (down) / 2006-03-01 (up) / error (abort)");
}

#[test]
fn criterion_2_executable_theorems() {
    let started = Instant::now();
    let dates = valid_dates(&sample_years());
    for &t in &dates {
        for n in -30i64..=30 {
            // Year/month equivalence (on the raw triple semantics).
            assert_eq!(date::add_years(t, n), date::add_months(t, 12 * n), "{t} n={n}");
            let v = DateValue::Date(t);
            let p = Period::months(n);
            let down = date::add_period(RoundingMode::Down, v, p);
            let up = date::add_period(RoundingMode::Up, v, p);
            // Well-formedness: valid results, never bottom, in both modes.
            let (d, u) = match (down, up) {
                (DateValue::Date(d), DateValue::Date(u)) => (d, u),
                other => panic!("bottom from valid start: {t} n={n} {other:?}"),
            };
            assert!(d.is_valid() && u.is_valid(), "{t} n={n}");
            // Rounding ordering: down ≤ up; agreement unless ambiguous.
            assert!(date::compare(d, u) != std::cmp::Ordering::Greater, "{t} n={n}");
            let abort = date::add_period(RoundingMode::Abort, v, p);
            if abort != DateValue::Bottom {
                assert_eq!(abort, down);
                assert_eq!(down, up);
            }
            // Characterization of ambiguous month additions.
            let raw = date::add_months(t, n);
            let overflow = date::nb_days(raw.year, raw.month) < raw.day;
            assert_eq!(overflow, abort == DateValue::Bottom, "{t} n={n}");
        }
    }
    // Monotonicity with a loose bound: consecutive and strided pairs.
    let mono_pairs = dates
        .windows(2)
        .map(|w| (w[0], w[1]))
        .chain((0..dates.len().saturating_sub(97)).map(|i| (dates[i], dates[i + 97])));
    for (d1, d2) in mono_pairs {
        assert_eq!(date::compare(d1, d2), std::cmp::Ordering::Less);
        for n in (-30i64..=30).step_by(3) {
            for mode in [RoundingMode::Down, RoundingMode::Up] {
                let p = Period::months(n);
                let r1 = date::add_period(mode, DateValue::Date(d1), p).triple().unwrap();
                let r2 = date::add_period(mode, DateValue::Date(d2), p).triple().unwrap();
                assert!(
                    date::compare(r1, r2) != std::cmp::Ordering::Greater,
                    "monotonicity: {d1} vs {d2} n={n} {mode:?}"
                );
            }
        }
    }
    // The bound is loose: distinct dates can collide (search must find one).
    let collision = dates.windows(2).any(|w| {
        date::add_period(RoundingMode::Down, DateValue::Date(w[0]), Period::months(1))
            == date::add_period(RoundingMode::Down, DateValue::Date(w[1]), Period::months(1))
    });
    assert!(collision, "no strict-bound counter-example found");
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
    report(2, "equivalence, monotonicity, down ≤ up, characterization, well-formedness");
}

#[test]
fn criterion_3_non_property_witnesses() {
    let started = Instant::now();
    let dates = valid_dates(&[2023]);
    let mut found = BTreeMap::from([(RoundingMode::Down, 0usize), (RoundingMode::Up, 0usize)]);
    for &t in &dates {
        for m in -13i64..=13 {
            for d in -40i64..=40 {
                for mode in [RoundingMode::Down, RoundingMode::Up] {
                    let v = DateValue::Date(t);
                    let months_first = date::add_period(
                        mode,
                        date::add_period(mode, v, Period::months(m)),
                        Period::days(d),
                    );
                    let days_first = date::add_period(
                        mode,
                        date::add_period(mode, v, Period::days(d)),
                        Period::months(m),
                    );
                    if months_first != days_first
                        && months_first != DateValue::Bottom
                        && days_first != DateValue::Bottom
                    {
                        *found.get_mut(&mode).unwrap() += 1;
                    }
                }
            }
        }
    }
    assert!(found[&RoundingMode::Down] > 0, "no down-rounding commutativity witness");
    assert!(found[&RoundingMode::Up] > 0, "no up-rounding commutativity witness");
    // The published associativity instance, exactly.
    let start = DateValue::Date(YmdTriple::new(2023, 3, 31));
    for (mode, split_expected) in
        [(RoundingMode::Down, DateValue::date(2023, 5, 30)), (RoundingMode::Up, DateValue::date(2023, 6, 1))]
    {
        let split = date::add_period(
            mode,
            date::add_period(mode, start, Period::months(1)),
            Period::months(1),
        );
        assert_eq!(split, split_expected, "{mode:?}");
        assert_eq!(date::add_period(mode, start, Period::months(2)), DateValue::date(2023, 5, 31));
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 30, "took {elapsed:?}");
    report(3, "non-commutativity witnesses per mode and the exact associativity instance");
}

fn bundled(name: &str) -> String {
    let path = format!("{}/../../programs/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

#[test]
fn criterion_4_listing1_hints() {
    let started = Instant::now();
    let report4 =
        analyze_source("listing1.dl", &bundled("listing1.dl"), &AnalyzeOptions::default()).unwrap();
    assert_eq!(report4.asserts.len(), 1);
    assert_eq!(report4.asserts[0].verdict, Verdict::Unproven);
    assert_eq!(exit_code(&report4), 1);
    let hints: Vec<String> = report4.asserts[0].hints.iter().map(|h| h.render(false)).collect();
    for expected in [
        "month(birthday) = 2",
        "day(birthday) = 29",
        "year(birthday) =[4] 0",
        "month(current) = 2",
        "u.month(limit) = 3",
        "u.day(limit) = 1",
        "d.month(limit) = 2",
        "d.day(limit) = 1",
    ] {
        assert!(hints.iter().any(|h| h == expected), "missing {expected:?}: {hints:#?}");
    }
    assert!(
        hints.iter().any(|h| h == "day(current) = [1,28]" || h == "day(current) = [1,29]"),
        "{hints:#?}"
    );
    let chain = hints
        .iter()
        .find(|h| h.contains("year(current)") && h.contains("year(birthday) + 2"))
        .expect("year equality chain");
    for part in ["u.year(intermediate)", "u.year(limit)", "d.year(intermediate)", "d.year(limit)"] {
        assert!(chain.contains(part), "chain {chain:?} missing {part}");
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs() < 3, "took {elapsed:?}");
    report(4, "listing1 refuted with the published counter-example hints");
}

#[test]
fn criterion_5_proven_programs() {
    for name in ["listing1_constrained.dl", "midmonth.dl"] {
        let started = Instant::now();
        let r = analyze_source(name, &bundled(name), &AnalyzeOptions::default()).unwrap();
        assert!(r.all_proven(), "{name} not proven");
        assert_eq!(exit_code(&r), 0, "{name}");
        let elapsed = started.elapsed();
        assert!(elapsed.as_secs() < 3, "{name} took {elapsed:?}");
    }
    report(5, "constrained listing1 and the mid-month comparison proven");
}

/// Random straight-line programs: up to 6 date variables, up to 3 additions,
/// months-only periods, field assumes, sync and plain asserts.
fn gen_program(rng: &mut ChaCha8Rng) -> Program {
    let mut stmts = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut additions = 0usize;
    let n_vars = rng.gen_range(2..=6);
    for i in 0..n_vars {
        let name = format!("v{i}");
        let base = || DateExpr::RandomDate;
        let prev = |rng: &mut ChaCha8Rng, names: &[String]| -> DateExpr {
            if names.is_empty() {
                DateExpr::RandomDate
            } else {
                DateExpr::Var(names[rng.gen_range(0..names.len())].clone())
            }
        };
        let expr = match rng.gen_range(0..10) {
            0..=3 => base(),
            4 => {
                let y = rng.gen_range(1995..=2030);
                let m = rng.gen_range(1..=12);
                let d = rng.gen_range(1..=date::nb_days(y, m));
                DateExpr::Literal(YmdTriple::new(y, m, d))
            }
            5 => DateExpr::FirstDayOf(Box::new(prev(rng, &names))),
            6 => DateExpr::LastDayOf(Box::new(prev(rng, &names))),
            _ if additions < 3 => {
                additions += 1;
                let months = rng.gen_range(-25..=25);
                DateExpr::AddPeriod(Box::new(prev(rng, &names)), Period::months(months))
            }
            _ => prev(rng, &names),
        };
        stmts.push(Stmt::DateDecl { name: name.clone(), expr });
        names.push(name);
        if rng.gen_bool(0.25) {
            let var = names[rng.gen_range(0..names.len())].clone();
            let (field, op, k) = match rng.gen_range(0..3) {
                0 => (Field::Day, RelOp::Le, rng.gen_range(10..=28)),
                1 => (Field::Month, [RelOp::Le, RelOp::Ge][rng.gen_range(0..2)], rng.gen_range(2..=11)),
                _ => (Field::Year, [RelOp::Le, RelOp::Ge][rng.gen_range(0..2)], rng.gen_range(1950..=2050)),
            };
            stmts.push(Stmt::Assume(BoolExpr::FieldCmp(field, var, op, k)));
        }
    }
    for _ in 0..rng.gen_range(0..=2) {
        let ops = [RelOp::Lt, RelOp::Le, RelOp::Gt, RelOp::Ge, RelOp::Eq, RelOp::Ne];
        let cmp = BoolExpr::Cmp(
            DateExpr::Var(names[rng.gen_range(0..names.len())].clone()),
            ops[rng.gen_range(0..ops.len())],
            DateExpr::Var(names[rng.gen_range(0..names.len())].clone()),
        );
        let body =
            if rng.gen_bool(0.7) { BoolExpr::Sync(Box::new(cmp)) } else { cmp };
        stmts.push(Stmt::Assert(body));
    }
    Program { stmts }
}

const FUZZ_PROGRAMS: usize = 10_000;

#[test]
fn criterion_6_soundness_fuzzing() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE97);
    let opts = ExecOptions::default();
    let mut checked_envs = 0usize;
    for case in 0..FUZZ_PROGRAMS {
        let program = gen_program(&mut rng);
        let result = exec_program(&program, &opts)
            .unwrap_or_else(|e| panic!("case {case}: {e}\n{}", datesync::lang::render(&program)));
        for seed in 0..20 {
            let (out, envs) = run_double(&program, seed, YearRange::default())
                .expect("generated programs never reach bottom");
            if matches!(out, RunOutcome::AssumeViolated { .. }) {
                continue;
            }
            checked_envs += 1;
            assert!(
                result.final_state.double_env_member(&envs),
                "case {case} seed {seed}: concrete pair escapes every partition\n{}",
                datesync::lang::render(&program)
            );
        }
    }
    assert!(checked_envs > FUZZ_PROGRAMS, "too few surviving executions: {checked_envs}");
    report(6, "10,000 fuzzed programs × 20 seeds: all double executions covered");
}

#[test]
fn criterion_7_no_false_proven() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE97);
    let opts = ExecOptions::default();
    let mut proven_programs = 0usize;
    for case in 0..FUZZ_PROGRAMS {
        let program = gen_program(&mut rng);
        let Ok(result) = exec_program(&program, &opts) else { continue };
        if result.asserts.is_empty() || !result.asserts.iter().all(|(_, v)| v.is_proven()) {
            continue;
        }
        proven_programs += 1;
        for seed in 0..1000 {
            let (out, _) = run_double(&program, seed, YearRange::default()).unwrap();
            assert!(
                out.all_asserts_pass(),
                "case {case} seed {seed}: proven program fails concretely\n{}",
                datesync::lang::render(&program)
            );
        }
    }
    assert!(proven_programs > 100, "too few proven programs: {proven_programs}");
    report(7, "no fuzzed program proven by the analyzer fails concretely");
}

#[test]
fn criterion_8_litmus_self_classification() {
    for (mode, expected) in [
        (RoundingMode::Down, litmus::Classification::RoundsDown),
        (RoundingMode::Up, litmus::Classification::RoundsUp),
        (RoundingMode::Abort, litmus::Classification::Aborts),
    ] {
        let results: BTreeMap<String, String> =
            litmus::self_results(mode).into_iter().map(|r| (r.id, r.result)).collect();
        assert_eq!(litmus::classify(&results).unwrap(), expected);
    }
    let posix: BTreeMap<String, String> = litmus::builtin_cases()
        .iter()
        .map(|c| {
            let rendered = match c.posix_expected() {
                DateValue::Date(t) => t.to_string(),
                DateValue::Bottom => "error".to_string(),
            };
            (c.id.clone(), rendered)
        })
        .collect();
    assert_eq!(posix["jan31-plus-1m"], "2023-03-03");
    assert_eq!(litmus::classify(&posix).unwrap(), litmus::Classification::PosixNormalize);
    report(8, "each mode self-classifies; the Jan-31→Mar-3 signature classifies posix-normalize");
}
