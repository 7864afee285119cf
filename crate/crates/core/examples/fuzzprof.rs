use datesync::bidates::{exec_program, ExecOptions};
use datesync::date::{self, Period};
use datesync::lang::{BoolExpr, DateExpr, Field, Program, RelOp, Stmt};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn gen_program(rng: &mut ChaCha8Rng) -> Program {
    let mut stmts = Vec::new();
    let mut names: Vec<String> = Vec::new();
    let mut additions = 0usize;
    let n_vars = rng.gen_range(2..=6);
    for i in 0..n_vars {
        let name = format!("v{i}");
        let prev = |rng: &mut ChaCha8Rng, names: &[String]| -> DateExpr {
            if names.is_empty() {
                DateExpr::RandomDate
            } else {
                DateExpr::Var(names[rng.gen_range(0..names.len())].clone())
            }
        };
        let expr = match rng.gen_range(0..10) {
            0..=3 => DateExpr::RandomDate,
            4 => {
                let y = rng.gen_range(1995..=2030);
                let m = rng.gen_range(1..=12);
                let d = rng.gen_range(1..=date::nb_days(y, m));
                DateExpr::Literal(datesync::date::YmdTriple::new(y, m, d))
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
        let body = if rng.gen_bool(0.7) { BoolExpr::Sync(Box::new(cmp)) } else { cmp };
        stmts.push(Stmt::Assert(body));
    }
    Program { stmts }
}

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE97);
    let opts = ExecOptions::default();
    let mut times: Vec<(u128, usize, usize, usize)> = Vec::new();
    let started = Instant::now();
    for case in 0..n {
        let program = gen_program(&mut rng);
        let t = Instant::now();
        let r = exec_program(&program, &opts).unwrap();
        let ms = t.elapsed().as_millis();
        times.push((ms, case, r.partitions_max, program.stmts.len()));
        if ms > 2000 {
            eprintln!("--- case {case}: {ms} ms, max {} partitions\n{}", r.partitions_max, datesync::lang::render(&program));
        }
    }
    let total = started.elapsed();
    times.sort_unstable_by(|a, b| b.cmp(a));
    println!("total {:?} for {n} programs; mean {:.1} ms", total, total.as_millis() as f64 / n as f64);
    println!("slowest (ms, case, max_partitions, stmts): {:?}", &times[..times.len().min(12)]);
}
