//! Command-line front end: `analyze` (abstract interpretation with
//! counter-example hints), `run` (concrete reference interpreter), and
//! `litmus` (rounding-behavior test suite and classifier).

use clap::{Args, Parser, Subcommand, ValueEnum};
use datesync::analyzer::{exit_code, render_json, render_text, AnalyzeOptions};
use datesync::bidates::{ExecOptions, DEFAULT_PARTITION_CAP};
use datesync::date::{self, DateValue, Period, RoundingMode, YmdTriple};
use datesync::interp::{run_double, run_single, RunOutcome, YearRange};
use datesync::lang::parse;
use datesync::litmus;
use std::io::Read;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "datesync", about = "Rounding-insensitivity analysis for date programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Statically prove or refute rounding-insensitivity of the assertions
    /// in a program.
    Analyze(AnalyzeArgs),
    /// Execute a program concretely with the reference interpreter.
    Run(RunArgs),
    /// Litmus tests for rounding behavior of date implementations.
    Litmus(LitmusArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Program to analyze (`.dl`).
    file: std::path::PathBuf,
    /// Partition cap; excess partitions are joined.
    #[arg(long, default_value_t = DEFAULT_PARTITION_CAP)]
    max_partitions: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Render mode prefixes as arrows.
    #[arg(long)]
    unicode: bool,
    /// Restrict `random_date()` to these years, e.g. `1900..2100`.
    #[arg(long, value_parser = parse_year_range)]
    year_range: Option<(i64, i64)>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct RunArgs {
    file: std::path::PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Double)]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Years drawn by `random_date()`, e.g. `1900..2100`.
    #[arg(long, value_parser = parse_year_range)]
    year_range: Option<(i64, i64)>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Up,
    Down,
    Abort,
    /// Both modes at once with shared random draws; asserts check agreement.
    Double,
}

#[derive(Args)]
struct LitmusArgs {
    #[command(subcommand)]
    command: LitmusCommand,
}

#[derive(Subcommand)]
enum LitmusCommand {
    /// Print the case suite.
    Export {
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        /// One row per case with the expected result per mode.
        #[arg(long)]
        csv: bool,
    },
    /// Classify a result set (JSONL of {"id", "result"}; `-` for stdin).
    Classify { results: String },
    /// Adapter for the date core itself: reads the exported case list on
    /// stdin and writes one result line per case.
    Adapter {
        #[arg(long, value_enum)]
        mode: AdapterMode,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AdapterMode {
    Up,
    Down,
    Abort,
}

fn parse_year_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once("..").ok_or("expected LO..HI")?;
    let lo = lo.trim().parse::<i64>().map_err(|e| e.to_string())?;
    let hi = hi.trim().parse::<i64>().map_err(|e| e.to_string())?;
    if lo > hi {
        return Err("empty range".into());
    }
    Ok((lo, hi))
}

fn read_source(path: &std::path::Path) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("{}: {e}", path.display());
        ExitCode::from(2)
    })
}

fn cmd_analyze(args: &AnalyzeArgs) -> ExitCode {
    let source = match read_source(&args.file) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let opts = AnalyzeOptions {
        exec: ExecOptions { cap: args.max_partitions, year_range: args.year_range },
        unicode: args.unicode,
    };
    let file = args.file.display().to_string();
    let parsed = match parse(&source) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{file}:{e}");
            return ExitCode::from(2);
        }
    };
    match datesync::analyzer::analyze_parsed(&file, &parsed, &opts) {
        Ok(report) => {
            match args.format {
                Format::Text => print!("{}", render_text(&report, &parsed, args.unicode)),
                Format::Json => println!("{:#}", render_json(&report)),
            }
            ExitCode::from(exit_code(&report) as u8)
        }
        Err(e) => {
            eprintln!("{file}:{e}");
            ExitCode::from(2)
        }
    }
}

fn print_env_line(name: &str, v: &DateValue) {
    match v {
        DateValue::Date(t) => println!("  {name} = {t}"),
        DateValue::Bottom => println!("  {name} = ⊥"),
    }
}

fn report_outcome(outcome: &RunOutcome) -> ExitCode {
    match outcome {
        RunOutcome::Finished { asserts } => {
            for (i, ok) in asserts.iter().enumerate() {
                println!("assert #{i}: {}", if *ok { "pass" } else { "FAIL" });
            }
            if asserts.iter().all(|b| *b) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        RunOutcome::AssumeViolated { stmt } => {
            println!("assume at statement {stmt} not satisfied; run discarded");
            ExitCode::SUCCESS
        }
    }
}

fn cmd_run(args: &RunArgs) -> ExitCode {
    let source = match read_source(&args.file) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let parsed = match parse(&source) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{}:{e}", args.file.display());
            return ExitCode::from(2);
        }
    };
    let range = args
        .year_range
        .map(|(lo, hi)| YearRange { lo, hi })
        .unwrap_or_default();
    match args.mode {
        Mode::Double => match run_double(&parsed.program, args.seed, range) {
            Ok((outcome, envs)) => {
                for (name, v) in &envs.up {
                    if envs.down[name] == *v {
                        print_env_line(name, v);
                    } else {
                        print_env_line(&format!("u.{name}"), v);
                        print_env_line(&format!("d.{name}"), &envs.down[name]);
                    }
                }
                report_outcome(&outcome)
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::from(2)
            }
        },
        mode => {
            let mode = match mode {
                Mode::Up => RoundingMode::Up,
                Mode::Down => RoundingMode::Down,
                Mode::Abort => RoundingMode::Abort,
                Mode::Double => unreachable!(),
            };
            match run_single(&parsed.program, mode, args.seed, range) {
                Ok((outcome, env)) => {
                    for (name, v) in &env {
                        print_env_line(name, v);
                    }
                    report_outcome(&outcome)
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}

fn read_stdin() -> Result<String, ExitCode> {
    let mut buf = String::new();
    std::io::stdin().read_to_string(&mut buf).map_err(|e| {
        eprintln!("stdin: {e}");
        ExitCode::from(2)
    })?;
    Ok(buf)
}

fn cmd_litmus(args: &LitmusArgs) -> ExitCode {
    match &args.command {
        LitmusCommand::Export { json: _, csv } => {
            if *csv {
                print!("{}", litmus::export_csv());
            } else {
                println!("{:#}", litmus::export_json());
            }
            ExitCode::SUCCESS
        }
        LitmusCommand::Classify { results } => {
            let text = if results == "-" {
                match read_stdin() {
                    Ok(t) => t,
                    Err(code) => return code,
                }
            } else {
                match read_source(std::path::Path::new(results)) {
                    Ok(t) => t,
                    Err(code) => return code,
                }
            };
            match litmus::parse_results(&text).and_then(|map| litmus::classify(&map)) {
                Ok(c) => {
                    println!("{c}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(2)
                }
            }
        }
        LitmusCommand::Adapter { mode } => {
            let mode = match mode {
                AdapterMode::Up => RoundingMode::Up,
                AdapterMode::Down => RoundingMode::Down,
                AdapterMode::Abort => RoundingMode::Abort,
            };
            let input = match read_stdin() {
                Ok(t) => t,
                Err(code) => return code,
            };
            let cases: Vec<serde_json::Value> = match serde_json::from_str(&input) {
                Ok(v) => v,
                Err(e) => {
                    eprintln!("case list: {e}");
                    return ExitCode::from(2);
                }
            };
            for c in cases {
                let (Some(id), Some(start), Some(p)) =
                    (c["id"].as_str(), c["start"].as_str(), c.get("period"))
                else {
                    eprintln!("malformed case {c}");
                    return ExitCode::from(2);
                };
                let Some(start) = parse_date(start) else {
                    eprintln!("bad date in case {id}");
                    return ExitCode::from(2);
                };
                let period = Period::new(
                    p["years"].as_i64().unwrap_or(0),
                    p["months"].as_i64().unwrap_or(0),
                    p["days"].as_i64().unwrap_or(0),
                );
                let result = match date::add_period(mode, DateValue::Date(start), period) {
                    DateValue::Date(t) => t.to_string(),
                    DateValue::Bottom => "error".to_string(),
                };
                println!("{}", serde_json::json!({ "id": id, "result": result }));
            }
            ExitCode::SUCCESS
        }
    }
}

fn parse_date(s: &str) -> Option<YmdTriple> {
    let mut it = s.splitn(3, '-');
    let year = it.next()?.parse().ok()?;
    let month = it.next()?.parse().ok()?;
    let day = it.next()?.parse().ok()?;
    let t = YmdTriple::new(year, month, day);
    t.is_valid().then_some(t)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Run(args) => cmd_run(&args),
        Command::Litmus(args) => cmd_litmus(&args),
    }
}
