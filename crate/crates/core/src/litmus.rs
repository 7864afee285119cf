//! Litmus tests for the rounding behavior of date libraries: a fixed case
//! suite whose expected results are generated from the date core, a JSONL
//! adapter protocol for exercising external implementations, and a
//! classifier mapping observed results to a rounding policy.

use crate::date::{self, DateValue, Period, RoundingMode, YmdTriple};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use thiserror::Error;

/// One test: a start date plus a period, with the expected result under each
/// rounding mode (always regenerated from the date core, never hand-kept).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LitmusCase {
    pub id: String,
    pub start: YmdTriple,
    pub period: Period,
    pub expected: BTreeMap<RoundingMode, DateValue>,
}

impl LitmusCase {
    fn new(id: impl Into<String>, start: YmdTriple, period: Period) -> LitmusCase {
        let expected = [RoundingMode::Down, RoundingMode::Up, RoundingMode::Abort]
            .into_iter()
            .map(|m| (m, date::add_period(m, DateValue::Date(start), period)))
            .collect();
        LitmusCase { id: id.into(), start, period, expected }
    }

    /// Up and Down disagree, so the result discriminates the rounding mode.
    pub fn is_ambiguous(&self) -> bool {
        self.expected[&RoundingMode::Up] != self.expected[&RoundingMode::Down]
    }

    /// The result a normalizing (POSIX `mktime`-style) implementation gives:
    /// day overflow is carried into the following month.
    pub fn posix_expected(&self) -> DateValue {
        let raw = date::add_months(date::add_years(self.start, self.period.years), self.period.months);
        let from_first = DateValue::date(raw.year, raw.month, 1);
        date::add_days(from_first, raw.day - 1 + self.period.days)
    }
}

/// An observed result from an implementation under test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseResult {
    pub id: String,
    /// `"YYYY-MM-DD"`, or `"error"` for implementations that refuse.
    pub result: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    RoundsDown,
    RoundsUp,
    Aborts,
    PosixNormalize,
    /// The observed results match none of the known policies; carries the
    /// first discriminating case id and the observed result.
    Other { case: String, observed: String },
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Classification::RoundsDown => write!(f, "rounds-down"),
            Classification::RoundsUp => write!(f, "rounds-up"),
            Classification::Aborts => write!(f, "aborts"),
            Classification::PosixNormalize => write!(f, "posix-normalize"),
            Classification::Other { case, observed } => {
                write!(f, "other (case {case}: observed {observed})")
            }
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LitmusError {
    #[error("missing result for case {0}")]
    MissingResult(String),
    #[error("malformed result line: {0}")]
    MalformedResult(String),
}

fn render_value(v: &DateValue) -> String {
    match v {
        DateValue::Date(t) => t.to_string(),
        DateValue::Bottom => "error".to_string(),
    }
}

/// The fixed suite: the survey anchors plus generated ambiguous and
/// unambiguous cases.
pub fn builtin_cases() -> Vec<LitmusCase> {
    let mut cases = vec![
        // The canonical leap-day case: +2y from 2004-02-29.
        LitmusCase::new("leap-day-plus-2y", YmdTriple::new(2004, 2, 29), Period::years(2)),
        // One month from a 31-day month end into a 30-day month.
        LitmusCase::new("mar31-plus-1m", YmdTriple::new(2023, 3, 31), Period::months(1)),
        // One month from Jan 31: the posix-normalization signature case
        // (2023-02-31 normalizes to 2023-03-03).
        LitmusCase::new("jan31-plus-1m", YmdTriple::new(2023, 1, 31), Period::months(1)),
        // The spreadsheet-style 18-year addition expressed in months.
        LitmusCase::new("leap-day-plus-216m", YmdTriple::new(2004, 2, 29), Period::months(216)),
        // Non-commutativity witness: +1m then +1m differs from +2m.
        LitmusCase::new("mar31-plus-2m", YmdTriple::new(2023, 3, 31), Period::months(2)),
        // A mid-month date: never ambiguous, any sane library agrees.
        LitmusCase::new("midmonth-plus-1m", YmdTriple::new(2023, 6, 15), Period::months(1)),
    ];
    // Generated block: month-end starts across one leap cycle, keeping a mix
    // of ambiguous and unambiguous cases.
    for year in [2019, 2020, 2021, 2023, 2024] {
        for (month, day) in [(1, 31), (1, 30), (2, 28), (2, 29), (5, 31), (8, 31), (12, 31)] {
            let start = YmdTriple::new(year, month, day);
            if !start.is_valid() {
                continue;
            }
            for nb_m in [1, 3, 12] {
                let id = format!("gen-{start}-plus-{nb_m}m");
                cases.push(LitmusCase::new(id, start, Period::months(nb_m)));
            }
        }
    }
    cases
}

/// Run the date core itself over the suite — the bundled self-adapter.
pub fn self_results(mode: RoundingMode) -> Vec<CaseResult> {
    builtin_cases()
        .iter()
        .map(|c| CaseResult { id: c.id.clone(), result: render_value(&c.expected[&mode]) })
        .collect()
}

/// Decide which policy a result set exhibits. Only ambiguous cases
/// discriminate; unambiguous ones must match exactly under any policy.
pub fn classify(results: &BTreeMap<String, String>) -> Result<Classification, LitmusError> {
    let cases = builtin_cases();
    let get = |c: &LitmusCase| -> Result<&String, LitmusError> {
        results.get(&c.id).ok_or_else(|| LitmusError::MissingResult(c.id.clone()))
    };
    let matches_policy = |expected: &dyn Fn(&LitmusCase) -> String| -> Result<Option<(String, String)>, LitmusError> {
        for c in &cases {
            let seen = get(c)?;
            if seen != &expected(c) {
                return Ok(Some((c.id.clone(), seen.clone())));
            }
        }
        Ok(None)
    };
    let policies: [(&dyn Fn(&LitmusCase) -> String, Classification); 4] = [
        (&|c| render_value(&c.expected[&RoundingMode::Down]), Classification::RoundsDown),
        (&|c| render_value(&c.expected[&RoundingMode::Up]), Classification::RoundsUp),
        (&|c| render_value(&c.expected[&RoundingMode::Abort]), Classification::Aborts),
        (&|c| render_value(&c.posix_expected()), Classification::PosixNormalize),
    ];
    let mut first_mismatch = None;
    for (expected, label) in policies {
        match matches_policy(&expected)? {
            None => return Ok(label),
            Some(m) => first_mismatch.get_or_insert(m),
        };
    }
    let (case, observed) = first_mismatch.expect("non-empty suite");
    Ok(Classification::Other { case, observed })
}

/// Parse adapter output: one `{"id": ..., "result": ...}` JSON object per
/// line (blank lines ignored).
pub fn parse_results(jsonl: &str) -> Result<BTreeMap<String, String>, LitmusError> {
    let mut out = BTreeMap::new();
    for line in jsonl.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let r: CaseResult = serde_json::from_str(line)
            .map_err(|_| LitmusError::MalformedResult(line.to_string()))?;
        out.insert(r.id, r.result);
    }
    Ok(out)
}

/// The case list as JSON (the adapter protocol's input document).
pub fn export_json() -> serde_json::Value {
    serde_json::json!(builtin_cases()
        .iter()
        .map(|c| serde_json::json!({
            "id": c.id,
            "start": c.start.to_string(),
            "period": { "years": c.period.years, "months": c.period.months, "days": c.period.days },
        }))
        .collect::<Vec<_>>())
}

/// One row per case, one column per mode, plus the normalized result.
pub fn export_csv() -> String {
    let mut out = String::from("id,start,years,months,days,down,up,abort,posix\n");
    for c in builtin_cases() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            c.id,
            c.start,
            c.period.years,
            c.period.months,
            c.period.days,
            render_value(&c.expected[&RoundingMode::Down]),
            render_value(&c.expected[&RoundingMode::Up]),
            render_value(&c.expected[&RoundingMode::Abort]),
            render_value(&c.posix_expected()),
        );
    }
    out
}
