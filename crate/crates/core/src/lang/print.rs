use super::ast::{BoolExpr, DateExpr, Program, Stmt};
use std::fmt::Write;

/// Render a program back to surface syntax, one statement per line.
/// Reparsing the output yields a structurally equal AST.
pub fn render(program: &Program) -> String {
    let mut out = String::new();
    for stmt in &program.stmts {
        match stmt {
            Stmt::DateDecl { name, expr } => {
                let _ = writeln!(out, "date {name} = {};", render_dexpr(expr));
            }
            Stmt::Assume(b) => {
                let _ = writeln!(out, "assume({});", render_bexpr(b));
            }
            Stmt::Assert(b) => {
                let _ = writeln!(out, "assert({});", render_bexpr(b));
            }
        }
    }
    out
}

pub fn render_dexpr(e: &DateExpr) -> String {
    match e {
        DateExpr::Var(name) => name.clone(),
        DateExpr::Literal(t) => t.to_string(),
        DateExpr::RandomDate => "random_date()".into(),
        DateExpr::AddPeriod(inner, p) => format!(
            "{} + [{} years, {} months, {} days]",
            render_dexpr(inner),
            p.years,
            p.months,
            p.days
        ),
        DateExpr::FirstDayOf(inner) => format!("first_day_of({})", render_dexpr(inner)),
        DateExpr::LastDayOf(inner) => format!("last_day_of({})", render_dexpr(inner)),
    }
}

pub fn render_bexpr(e: &BoolExpr) -> String {
    match e {
        BoolExpr::Sync(inner) => format!("sync({})", render_bexpr(inner)),
        BoolExpr::Cmp(lhs, op, rhs) => {
            format!("{} {op} {}", render_dexpr(lhs), render_dexpr(rhs))
        }
        BoolExpr::FieldCmp(field, var, op, n) => format!("{field}({var}) {op} {n}"),
        BoolExpr::And(l, r) => format!("({}) && ({})", render_bexpr(l), render_bexpr(r)),
        BoolExpr::Or(l, r) => format!("({}) || ({})", render_bexpr(l), render_bexpr(r)),
        BoolExpr::Not(inner) => format!("!({})", render_bexpr(inner)),
    }
}
