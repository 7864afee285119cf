//! Bounded powerset of integers: finite sets of at most `MAX_CARD` values.
//! A set that would grow past the bound widens to ⊤ (represented by absence
//! from the environment at the product level).

use std::collections::BTreeSet;

/// Maximum cardinality a tracked set may have.
pub const MAX_CARD: usize = 4;

pub type IntSet = BTreeSet<i64>;

/// Union; `None` is ⊤ (cardinality overflow).
pub fn join(a: &IntSet, b: &IntSet) -> Option<IntSet> {
    let u: IntSet = a.union(b).copied().collect();
    (u.len() <= MAX_CARD).then_some(u)
}

/// Intersection; an empty result means the component is unsatisfiable.
pub fn meet(a: &IntSet, b: &IntSet) -> IntSet {
    a.intersection(b).copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(vs: &[i64]) -> IntSet {
        vs.iter().copied().collect()
    }

    #[test]
    fn join_widens_past_the_bound() {
        assert_eq!(join(&s(&[1, 3]), &s(&[5, 8])), Some(s(&[1, 3, 5, 8])));
        assert_eq!(join(&s(&[1, 3, 5]), &s(&[7, 9])), None);
        assert_eq!(join(&s(&[1, 3]), &s(&[1, 3])), Some(s(&[1, 3])));
    }

    #[test]
    fn meet_intersects() {
        assert_eq!(meet(&s(&[3, 5, 8, 10]), &s(&[4, 5, 6, 10])), s(&[5, 10]));
        assert!(meet(&s(&[1]), &s(&[2])).is_empty());
    }
}
