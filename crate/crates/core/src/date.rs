//! Gregorian year/month/day arithmetic with explicit rounding modes.
//!
//! Additions on years and months keep the day untouched, which can produce
//! day-invalid triples such as `(2023, 2, 31)`. A [`RoundingMode`] decides
//! what happens to those: round down to the last valid day of the month,
//! round up to the first day of the next month, or abort with [`DateValue::Bottom`].
//!
//! The module ships two implementations of the same semantics: the fast
//! arithmetic one below, and a literal rule-by-rule small-step interpreter in
//! [`reference`] used as a test oracle.

use std::fmt;

/// A year/month/day triple. Months are 1-based (1 = January), the calendar is
/// proleptic Gregorian for all years. Mid-computation triples may carry a
/// day that is out of range for their month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct YmdTriple {
    pub year: i64,
    pub month: i64,
    pub day: i64,
}

impl YmdTriple {
    pub const fn new(year: i64, month: i64, day: i64) -> Self {
        YmdTriple { year, month, day }
    }

    /// True iff the triple denotes an actual calendar date.
    pub fn is_valid(&self) -> bool {
        (1..=12).contains(&self.month) && self.day >= 1 && self.day <= nb_days(self.year, self.month)
    }
}

impl fmt::Display for YmdTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

/// A date or the absorbing error element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DateValue {
    Date(YmdTriple),
    Bottom,
}

impl DateValue {
    pub fn date(year: i64, month: i64, day: i64) -> Self {
        DateValue::Date(YmdTriple::new(year, month, day))
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, DateValue::Bottom)
    }

    pub fn triple(&self) -> Option<YmdTriple> {
        match self {
            DateValue::Date(t) => Some(*t),
            DateValue::Bottom => None,
        }
    }
}

impl fmt::Display for DateValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DateValue::Date(t) => t.fmt(f),
            DateValue::Bottom => write!(f, "⊥"),
        }
    }
}

impl From<YmdTriple> for DateValue {
    fn from(t: YmdTriple) -> Self {
        DateValue::Date(t)
    }
}

/// A signed (years, months, days) triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Period {
    pub years: i64,
    pub months: i64,
    pub days: i64,
}

impl Period {
    pub const fn new(years: i64, months: i64, days: i64) -> Self {
        Period { years, months, days }
    }

    pub const fn years(years: i64) -> Self {
        Period { years, months: 0, days: 0 }
    }

    pub const fn months(months: i64) -> Self {
        Period { years: 0, months, days: 0 }
    }

    pub const fn days(days: i64) -> Self {
        Period { years: 0, months: 0, days }
    }
}

/// Policy for resolving a day-invalid date after year/month addition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RoundingMode {
    Up,
    Down,
    Abort,
}

impl RoundingMode {
    pub const ALL: [RoundingMode; 3] = [RoundingMode::Up, RoundingMode::Down, RoundingMode::Abort];
}

impl fmt::Display for RoundingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoundingMode::Up => write!(f, "up"),
            RoundingMode::Down => write!(f, "down"),
            RoundingMode::Abort => write!(f, "abort"),
        }
    }
}

/// Gregorian leap-year rule, extended to all integer years.
pub fn is_leap(year: i64) -> bool {
    year.rem_euclid(4) == 0 && (year.rem_euclid(100) != 0 || year.rem_euclid(400) == 0)
}

/// Number of days of month `month` (1..=12) of `year`.
///
/// Panics if `month` is out of range; callers dealing with possibly invalid
/// months must check first.
pub fn nb_days(year: i64, month: i64) -> i64 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 => {
            if is_leap(year) {
                29
            } else {
                28
            }
        }
        _ => panic!("nb_days: month {month} out of range"),
    }
}

/// `(y, m, d) +y n = (y+n, m, d)`; the day is kept even if the result is
/// day-invalid.
pub fn add_years(t: YmdTriple, n: i64) -> YmdTriple {
    YmdTriple::new(t.year + n, t.month, t.day)
}

/// Month addition with floor-based normalization: the result month lands in
/// 1..=12 and the year absorbs the carry. Equal to unrolling the recursive
/// over/underflow rules, but O(1).
pub fn add_months(t: YmdTriple, n: i64) -> YmdTriple {
    let total = t.month - 1 + n;
    YmdTriple::new(t.year + total.div_euclid(12), 1 + total.rem_euclid(12), t.day)
}

/// Day addition. Month/year boundaries are always crossed through the first
/// day of a month, so a valid start can never produce `Bottom`. A day-invalid
/// start (day < 1 or day > nb_days) yields `Bottom`, as does a month outside
/// 1..=12.
pub fn add_days(v: DateValue, n: i64) -> DateValue {
    let mut t = match v {
        DateValue::Date(t) => t,
        DateValue::Bottom => return DateValue::Bottom,
    };
    let mut n = n;
    loop {
        if !(1..=12).contains(&t.month) {
            return DateValue::Bottom;
        }
        let nb = nb_days(t.year, t.month);
        if t.day < 1 || t.day > nb {
            return DateValue::Bottom;
        }
        if (1..=nb).contains(&(t.day + n)) {
            return DateValue::date(t.year, t.month, t.day + n);
        }
        if t.day + n > nb {
            // Add-Days-Over: hop to the first of the next month.
            n -= nb - t.day + 1;
            t = add_months(YmdTriple::new(t.year, t.month, 1), 1);
        } else if t.day > 1 {
            // Add-Days-Under1: come back to the first of this month.
            n += t.day - 1;
            t.day = 1;
        } else {
            // Add-Days-Under2: step to the first of the previous month and
            // re-add its length.
            let prev = add_months(YmdTriple::new(t.year, t.month, 1), -1);
            n += nb_days(prev.year, prev.month);
            t = prev;
        }
    }
}

/// Resolve a possibly day-invalid date according to `mode`. Valid dates pass
/// through unchanged; a day below 1 or a month outside 1..=12 is `Bottom` in
/// every mode.
pub fn round(mode: RoundingMode, v: DateValue) -> DateValue {
    let t = match v {
        DateValue::Date(t) => t,
        DateValue::Bottom => return DateValue::Bottom,
    };
    if !(1..=12).contains(&t.month) || t.day < 1 {
        return DateValue::Bottom;
    }
    let nb = nb_days(t.year, t.month);
    if t.day <= nb {
        return DateValue::Date(t);
    }
    match mode {
        RoundingMode::Down => DateValue::date(t.year, t.month, nb),
        RoundingMode::Up => {
            let next = add_months(YmdTriple::new(t.year, t.month, t.day), 1);
            DateValue::date(next.year, next.month, 1)
        }
        RoundingMode::Abort => DateValue::Bottom,
    }
}

/// Period addition in its derived form: years, then months, then a single
/// rounding, then days.
pub fn add_period(mode: RoundingMode, v: DateValue, p: Period) -> DateValue {
    let t = match v {
        DateValue::Date(t) => t,
        DateValue::Bottom => return DateValue::Bottom,
    };
    let after_ym = add_months(add_years(t, p.years), p.months);
    add_days(round(mode, DateValue::Date(after_ym)), p.days)
}

/// Lexicographic order on (year, month, day). Both operands must be valid.
pub fn compare(a: YmdTriple, b: YmdTriple) -> std::cmp::Ordering {
    debug_assert!(a.is_valid() && b.is_valid());
    a.cmp(&b)
}

/// True iff adding `p` to `v` requires a rounding decision, i.e. the abort
/// mode reduces to `Bottom`.
pub fn is_ambiguous(v: DateValue, p: Period) -> bool {
    add_period(RoundingMode::Abort, v, p).is_bottom()
}

pub mod reference {
    //! Rule-by-rule small-step interpreter of the addition and rounding
    //! semantics, kept deliberately close to the inference rules (recursion
    //! as written, one rule applied per step). Used as an oracle in tests.

    use super::{nb_days, DateValue, Period, RoundingMode};

    #[derive(Debug, Clone, Copy, PartialEq, Eq)]
    pub enum Unit {
        Year,
        Month,
        Day,
    }

    /// Date expressions: values, unit additions, rounding.
    #[derive(Debug, Clone, PartialEq, Eq)]
    pub enum Expr {
        Value(DateValue),
        Add(Box<Expr>, Unit, i64),
        Round(RoundingMode, Box<Expr>),
    }

    impl Expr {
        pub fn value(v: DateValue) -> Expr {
            Expr::Value(v)
        }

        pub fn add(e: Expr, unit: Unit, n: i64) -> Expr {
            Expr::Add(Box::new(e), unit, n)
        }

        pub fn round(mode: RoundingMode, e: Expr) -> Expr {
            Expr::Round(mode, Box::new(e))
        }
    }

    fn month_in_range(m: i64) -> bool {
        (1..=12).contains(&m)
    }

    /// One reduction step, or `None` if `e` is a value.
    pub fn step(e: &Expr) -> Option<Expr> {
        match e {
            Expr::Value(_) => None,
            Expr::Add(inner, unit, n) => {
                if let Some(inner2) = step(inner) {
                    // Add-Comp
                    return Some(Expr::Add(Box::new(inner2), *unit, *n));
                }
                let v = match inner.as_ref() {
                    Expr::Value(v) => *v,
                    _ => unreachable!(),
                };
                let t = match v {
                    DateValue::Bottom => return Some(Expr::Value(DateValue::Bottom)),
                    DateValue::Date(t) => t,
                };
                let n = *n;
                Some(match unit {
                    // Add-Year
                    Unit::Year => Expr::Value(DateValue::date(t.year + n, t.month, t.day)),
                    Unit::Month => {
                        if 1 <= t.month + n && t.month + n <= 12 {
                            // Add-Month
                            Expr::Value(DateValue::date(t.year, t.month + n, t.day))
                        } else if t.month + n > 12 {
                            // Add-Month-Over
                            Expr::Add(
                                Box::new(Expr::Value(DateValue::date(t.year + 1, t.month, t.day))),
                                Unit::Month,
                                n - 12,
                            )
                        } else {
                            // Add-Month-Under
                            Expr::Add(
                                Box::new(Expr::Value(DateValue::date(t.year - 1, t.month, t.day))),
                                Unit::Month,
                                n + 12,
                            )
                        }
                    }
                    Unit::Day => {
                        // Omitted error rules: months out of 1..=12 reduce to ⊥.
                        if !month_in_range(t.month) {
                            return Some(Expr::Value(DateValue::Bottom));
                        }
                        let nb = nb_days(t.year, t.month);
                        if t.day < 1 {
                            // Add-Days-Err1
                            Expr::Value(DateValue::Bottom)
                        } else if t.day > nb {
                            // Add-Days-Err2
                            Expr::Value(DateValue::Bottom)
                        } else if 1 <= t.day + n && t.day + n <= nb {
                            // Add-Days
                            Expr::Value(DateValue::date(t.year, t.month, t.day + n))
                        } else if t.day + n > nb {
                            // Add-Days-Over
                            Expr::Add(
                                Box::new(Expr::Add(
                                    Box::new(Expr::Value(DateValue::date(t.year, t.month, 1))),
                                    Unit::Month,
                                    1,
                                )),
                                Unit::Day,
                                n - (nb - t.day) - 1,
                            )
                        } else if t.day > 1 {
                            // Add-Days-Under1
                            Expr::Add(
                                Box::new(Expr::Value(DateValue::date(t.year, t.month, 1))),
                                Unit::Day,
                                t.day - 1 + n,
                            )
                        } else {
                            // Add-Days-Under2: evaluate (y, m, 1) +m -1 in the premise.
                            let prev = eval(&Expr::Add(
                                Box::new(Expr::Value(DateValue::date(t.year, t.month, 1))),
                                Unit::Month,
                                -1,
                            ));
                            match prev {
                                DateValue::Date(p) => Expr::Add(
                                    Box::new(Expr::Value(DateValue::date(p.year, p.month, 1))),
                                    Unit::Day,
                                    n + nb_days(p.year, p.month),
                                ),
                                DateValue::Bottom => Expr::Value(DateValue::Bottom),
                            }
                        }
                    }
                })
            }
            Expr::Round(mode, inner) => {
                if let Some(inner2) = step(inner) {
                    return Some(Expr::Round(*mode, Box::new(inner2)));
                }
                let v = match inner.as_ref() {
                    Expr::Value(v) => *v,
                    _ => unreachable!(),
                };
                let t = match v {
                    DateValue::Bottom => return Some(Expr::Value(DateValue::Bottom)),
                    DateValue::Date(t) => t,
                };
                if !month_in_range(t.month) {
                    return Some(Expr::Value(DateValue::Bottom));
                }
                let nb = nb_days(t.year, t.month);
                Some(if t.day < 1 {
                    // Round-Err1
                    Expr::Value(DateValue::Bottom)
                } else if t.day <= nb {
                    // Round-Noop
                    Expr::Value(DateValue::Date(t))
                } else {
                    match mode {
                        // Round-Down
                        RoundingMode::Down => {
                            Expr::Value(DateValue::date(t.year, t.month, nb))
                        }
                        // Round-Up: (y, m, d) +m 1 →* (y', m', d'), result (y', m', 1)
                        RoundingMode::Up => {
                            let next = eval(&Expr::Add(
                                Box::new(Expr::Value(DateValue::Date(t))),
                                Unit::Month,
                                1,
                            ));
                            match next {
                                DateValue::Date(nt) => {
                                    Expr::Value(DateValue::date(nt.year, nt.month, 1))
                                }
                                DateValue::Bottom => Expr::Value(DateValue::Bottom),
                            }
                        }
                        // Round-Err2
                        RoundingMode::Abort => Expr::Value(DateValue::Bottom),
                    }
                })
            }
        }
    }

    /// Transitive closure of [`step`].
    pub fn eval(e: &Expr) -> DateValue {
        let mut cur = e.clone();
        loop {
            match step(&cur) {
                Some(next) => cur = next,
                None => match cur {
                    Expr::Value(v) => return v,
                    _ => unreachable!("stuck non-value expression"),
                },
            }
        }
    }

    /// The derived period addition `rnd_r(((e +y y) +m m)) +d d`, built as an
    /// expression and reduced step by step.
    pub fn add_period(mode: RoundingMode, v: DateValue, p: Period) -> DateValue {
        let e = Expr::add(
            Expr::round(
                mode,
                Expr::add(
                    Expr::add(Expr::value(v), Unit::Year, p.years),
                    Unit::Month,
                    p.months,
                ),
            ),
            Unit::Day,
            p.days,
        );
        eval(&e)
    }
}

#[cfg(test)]
mod tests {
    use super::reference::{self, Expr, Unit};
    use super::*;
    use std::cmp::Ordering;

    fn d(y: i64, m: i64, day: i64) -> YmdTriple {
        YmdTriple::new(y, m, day)
    }

    #[test]
    fn leap_years() {
        assert!(is_leap(2004));
        assert!(is_leap(2000));
        assert!(!is_leap(1900));
        assert!(!is_leap(2100));
        assert!(!is_leap(2023));
    }

    #[test]
    fn month_lengths() {
        assert_eq!(nb_days(2023, 1), 31);
        assert_eq!(nb_days(2020, 2), 29);
        assert_eq!(nb_days(2023, 2), 28);
        assert_eq!(nb_days(2023, 4), 30);
    }

    #[test]
    fn year_addition() {
        assert_eq!(add_years(d(2004, 2, 29), 2), d(2006, 2, 29));
        assert_eq!(add_years(d(2023, 6, 15), 0), d(2023, 6, 15));
        assert_eq!(add_years(d(2023, 6, 15), -24), d(1999, 6, 15));
    }

    #[test]
    fn month_addition() {
        assert_eq!(add_months(d(2023, 1, 31), 1), d(2023, 2, 31));
        assert_eq!(add_months(d(2023, 11, 5), 3), d(2024, 2, 5));
        assert_eq!(add_months(d(2023, 1, 10), -1), d(2022, 12, 10));
    }

    #[test]
    fn month_addition_matches_recursive_rules() {
        // Floor-based normalization against the literal over/underflow recursion.
        for m in 1..=12 {
            for n in -1000..=1000 {
                let t = d(2023, m, 15);
                let fast = add_months(t, n);
                let slow = reference::eval(&Expr::add(
                    Expr::value(DateValue::Date(t)),
                    Unit::Month,
                    n,
                ));
                assert_eq!(DateValue::Date(fast), slow, "m={m} n={n}");
            }
        }
    }

    #[test]
    fn day_addition() {
        assert_eq!(add_days(DateValue::date(2023, 1, 29), 30), DateValue::date(2023, 2, 28));
        assert_eq!(add_days(DateValue::date(2023, 3, 1), -1), DateValue::date(2023, 2, 28));
        assert_eq!(add_days(DateValue::date(2023, 4, 31), 1), DateValue::Bottom);
        assert_eq!(add_days(DateValue::Bottom, 5), DateValue::Bottom);
    }

    #[test]
    fn day_addition_matches_small_step() {
        for day in [1, 15, 28, 29, 30, 31] {
            for m in 1..=12 {
                let t = d(2023, m, day);
                if !t.is_valid() {
                    continue;
                }
                for n in -800..=800 {
                    let fast = add_days(DateValue::Date(t), n);
                    let slow = reference::eval(&Expr::add(
                        Expr::value(DateValue::Date(t)),
                        Unit::Day,
                        n,
                    ));
                    assert_eq!(fast, slow, "t={t} n={n}");
                }
            }
        }
    }

    #[test]
    fn rounding() {
        assert_eq!(round(RoundingMode::Down, DateValue::date(2006, 2, 29)), DateValue::date(2006, 2, 28));
        assert_eq!(round(RoundingMode::Up, DateValue::date(2006, 2, 29)), DateValue::date(2006, 3, 1));
        assert_eq!(round(RoundingMode::Abort, DateValue::date(2023, 4, 31)), DateValue::Bottom);
        assert_eq!(round(RoundingMode::Up, DateValue::date(2023, 4, 15)), DateValue::date(2023, 4, 15));
        assert_eq!(round(RoundingMode::Down, DateValue::date(2023, 4, 0)), DateValue::Bottom);
        assert_eq!(round(RoundingMode::Up, DateValue::date(2023, 13, 5)), DateValue::Bottom);
    }

    #[test]
    fn period_addition() {
        assert_eq!(
            add_period(RoundingMode::Down, DateValue::date(2004, 2, 29), Period::new(2, 0, 0)),
            DateValue::date(2006, 2, 28)
        );
        assert_eq!(
            add_period(RoundingMode::Up, DateValue::date(2020, 2, 29), Period::new(1, 1, 0)),
            DateValue::date(2021, 3, 29)
        );
        assert_eq!(
            add_period(RoundingMode::Abort, DateValue::date(2023, 1, 31), Period::new(0, 1, 0)),
            DateValue::Bottom
        );
    }

    #[test]
    fn period_addition_matches_small_step() {
        let starts = [d(2004, 2, 29), d(2023, 1, 31), d(2023, 12, 15), d(1999, 6, 1)];
        for t in starts {
            for years in -3..=3 {
                for months in -15..=15 {
                    for days in [-40, -1, 0, 1, 40] {
                        let p = Period::new(years, months, days);
                        for mode in RoundingMode::ALL {
                            assert_eq!(
                                add_period(mode, DateValue::Date(t), p),
                                reference::add_period(mode, DateValue::Date(t), p),
                                "t={t} p={p:?} mode={mode}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn comparison() {
        assert_eq!(compare(d(2023, 2, 28), d(2023, 3, 1)), Ordering::Less);
        assert_eq!(compare(d(2023, 3, 1), d(2023, 3, 1)), Ordering::Equal);
        assert_eq!(compare(d(2024, 1, 1), d(2023, 12, 31)), Ordering::Greater);
    }

    #[test]
    fn ambiguity() {
        assert!(is_ambiguous(DateValue::date(2004, 2, 29), Period::new(2, 0, 0)));
        assert!(!is_ambiguous(DateValue::date(2023, 6, 15), Period::new(0, 1, 0)));
        assert!(is_ambiguous(DateValue::date(2023, 3, 31), Period::new(0, 1, 0)));
    }

    #[test]
    fn ambiguity_agrees_with_mode_disagreement() {
        for m in 1..=12 {
            for day in 1..=nb_days(2023, m) {
                let v = DateValue::date(2023, m, day);
                for n in -14..=14 {
                    let p = Period::months(n);
                    let differs = add_period(RoundingMode::Down, v, p)
                        != add_period(RoundingMode::Up, v, p);
                    assert_eq!(is_ambiguous(v, p), differs, "v={v} n={n}");
                }
            }
        }
    }
}
