//! The straight-line date-analysis language: grammar, parser, AST and
//! pretty-printer.
//!
//! ```text
//! program := stmt*
//! stmt    := "date" IDENT "=" dexpr ";"
//!          | "assume" "(" bexpr ")" ";"
//!          | "assert" "(" bexpr ")" ";"
//! dexpr   := IDENT | DATE | "random_date()"
//!          | dexpr "+" "[" INT "years" "," INT "months" "," INT "days" "]"
//!          | ("first_day_of" | "last_day_of") "(" dexpr ")"
//! bexpr   := "sync" "(" bexpr ")" | dexpr RELOP dexpr
//!          | ("day_of" | "month_of" | "year_of") "(" IDENT ")" RELOP INT
//!          | bexpr "&&" bexpr | bexpr "||" bexpr | "!" bexpr | "(" bexpr ")"
//! DATE    := YYYY "-" MM "-" DD
//! ```
//!
//! Source files use the `.dl` extension, UTF-8 encoding and `#` line
//! comments. The paper-style surface syntax never prints its own grammar;
//! this one is a reconstruction of the published example programs, plus
//! `assume` and the `day_of`/`month_of`/`year_of` accessors (the latter only
//! usable inside `assume`, compared against integer constants).

mod ast;
mod parser;
mod print;

pub use ast::{BoolExpr, DateExpr, Field, Program, RelOp, Span, Stmt};
pub use parser::{parse, LangError, LangErrorKind, Parsed};
pub use print::{render, render_bexpr, render_dexpr};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::date::{Period, YmdTriple};
    use proptest::prelude::*;

    const LISTING1: &str = "\
date current = random_date();
date birthday = random_date();
date intermediate = birthday + [2 years, 0 months, 0 days];
date limit = first_day_of(intermediate);
assert(sync(current < limit));
";

    #[test]
    fn parses_listing1() {
        let parsed = parse(LISTING1).unwrap();
        assert_eq!(parsed.program.stmts.len(), 5);
        match &parsed.program.stmts[2] {
            Stmt::DateDecl { name, expr } => {
                assert_eq!(name, "intermediate");
                assert_eq!(
                    expr,
                    &DateExpr::AddPeriod(
                        Box::new(DateExpr::Var("birthday".into())),
                        Period::new(2, 0, 0)
                    )
                );
            }
            other => panic!("unexpected stmt {other:?}"),
        }
    }

    #[test]
    fn parses_midmonth_program() {
        let src = "date d = random_date();\n\
                   assert(sync(d + [0 years, 1 months, 0 days] <= 2023-03-15));\n";
        let parsed = parse(src).unwrap();
        assert_eq!(parsed.program.stmts.len(), 2);
        match &parsed.program.stmts[1] {
            Stmt::Assert(BoolExpr::Sync(inner)) => match inner.as_ref() {
                BoolExpr::Cmp(lhs, RelOp::Le, rhs) => {
                    assert_eq!(
                        lhs,
                        &DateExpr::AddPeriod(
                            Box::new(DateExpr::Var("d".into())),
                            Period::months(1)
                        )
                    );
                    assert_eq!(rhs, &DateExpr::Literal(YmdTriple::new(2023, 3, 15)));
                }
                other => panic!("unexpected sync body {other:?}"),
            },
            other => panic!("unexpected stmt {other:?}"),
        }
    }

    #[test]
    fn rejects_invalid_literal() {
        let err = parse("date d = 2023-02-30;\n").unwrap_err();
        assert_eq!(err.kind, LangErrorKind::InvalidDateLiteral);
        assert_eq!(err.line, 1);
    }

    #[test]
    fn rejects_use_before_def() {
        let err = parse("date d = first_day_of(x);\n").unwrap_err();
        assert!(matches!(err.kind, LangErrorKind::UseBeforeDef(ref n) if n == "x"));
    }

    #[test]
    fn rejects_redefinition() {
        let err = parse("date d = random_date();\ndate d = random_date();\n").unwrap_err();
        assert!(matches!(err.kind, LangErrorKind::Redefinition(ref n) if n == "d"));
        assert_eq!(err.line, 2);
    }

    #[test]
    fn rejects_nested_sync() {
        let err =
            parse("date d = random_date();\nassert(sync(sync(d < d)));\n").unwrap_err();
        assert_eq!(err.kind, LangErrorKind::NestedSync);
    }

    #[test]
    fn rejects_sync_in_assume() {
        let err = parse("date d = random_date();\nassume(sync(d < d));\n").unwrap_err();
        assert_eq!(err.kind, LangErrorKind::SyncOutsideAssert);
    }

    #[test]
    fn rejects_accessor_in_assert() {
        let err = parse("date d = random_date();\nassert(day_of(d) <= 28);\n").unwrap_err();
        assert_eq!(err.kind, LangErrorKind::AccessorOutsideAssume);
    }

    #[test]
    fn accessors_in_assume() {
        let src = "date d = random_date();\nassume(day_of(d) <= 28 && month_of(d) != 2);\n";
        let parsed = parse(src).unwrap();
        match &parsed.program.stmts[1] {
            Stmt::Assume(BoolExpr::And(l, r)) => {
                assert_eq!(**l, BoolExpr::FieldCmp(Field::Day, "d".into(), RelOp::Le, 28));
                assert_eq!(**r, BoolExpr::FieldCmp(Field::Month, "d".into(), RelOp::Ne, 2));
            }
            other => panic!("unexpected stmt {other:?}"),
        }
    }

    #[test]
    fn errors_carry_locations() {
        let err = parse("date d = random_date()\ndate e = d;\n").unwrap_err();
        assert!(matches!(err.kind, LangErrorKind::Syntax(_)));
        assert_eq!(err.line, 2);
    }

    #[test]
    fn round_trips_fixed_programs() {
        for src in [
            LISTING1,
            "date d = random_date();\nassert(sync(d + [0 years, 1 months, 0 days] <= 2023-03-15));\n",
        ] {
            let p1 = parse(src).unwrap().program;
            let p2 = parse(&render(&p1)).unwrap().program;
            assert_eq!(p1, p2);
        }
    }

    // Generator for well-formed programs: every variable declared before use,
    // assigned once.
    fn arb_program() -> impl Strategy<Value = Program> {
        let period = (-30i64..=30, -30i64..=30, -40i64..=40)
            .prop_map(|(y, m, d)| Period::new(y, m, d));
        let literal = (1990i64..=2030, 1i64..=12, 1i64..=28)
            .prop_map(|(y, m, d)| DateExpr::Literal(YmdTriple::new(y, m, d)));
        (1usize..=6, proptest::collection::vec((0usize..=4, period, literal, 0usize..=2), 1..8))
            .prop_map(|(nvars, shapes)| {
                let mut stmts = Vec::new();
                let mut defined: Vec<String> = Vec::new();
                for i in 0..nvars {
                    let name = format!("v{i}");
                    stmts.push(Stmt::DateDecl {
                        name: name.clone(),
                        expr: DateExpr::RandomDate,
                    });
                    defined.push(name);
                }
                for (j, (shape, period, literal, pick)) in shapes.into_iter().enumerate() {
                    let src = DateExpr::Var(defined[pick % defined.len()].clone());
                    let name = format!("w{j}");
                    let expr = match shape {
                        0 => DateExpr::AddPeriod(Box::new(src), period),
                        1 => DateExpr::FirstDayOf(Box::new(src)),
                        2 => DateExpr::LastDayOf(Box::new(src)),
                        3 => literal,
                        _ => DateExpr::AddPeriod(
                            Box::new(DateExpr::FirstDayOf(Box::new(src))),
                            period,
                        ),
                    };
                    stmts.push(Stmt::DateDecl { name: name.clone(), expr });
                    defined.push(name);
                }
                let a = DateExpr::Var(defined[0].clone());
                let b = DateExpr::Var(defined[defined.len() - 1].clone());
                stmts.push(Stmt::Assert(BoolExpr::Sync(Box::new(BoolExpr::Cmp(
                    a,
                    RelOp::Lt,
                    b,
                )))));
                Program { stmts }
            })
    }

    proptest! {
        #[test]
        fn parse_render_round_trip(p in arb_program()) {
            let rendered = render(&p);
            let reparsed = parse(&rendered).unwrap().program;
            prop_assert_eq!(p, reparsed);
        }
    }
}
