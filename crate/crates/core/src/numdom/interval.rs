//! Integer intervals over ℤ ∪ {±∞}. `None` bounds denote infinities; an
//! environment maps variables to intervals, with absent entries meaning ⊤.

use num_bigint::BigInt;
use num_traits::Zero;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    /// Lower bound; `None` is −∞.
    pub lo: Option<BigInt>,
    /// Upper bound; `None` is +∞.
    pub hi: Option<BigInt>,
}

impl Interval {
    pub fn top() -> Self {
        Interval { lo: None, hi: None }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        let c = c.into();
        Interval { lo: Some(c.clone()), hi: Some(c) }
    }

    pub fn bounded(lo: impl Into<BigInt>, hi: impl Into<BigInt>) -> Self {
        Interval { lo: Some(lo.into()), hi: Some(hi.into()) }
    }

    pub fn is_top(&self) -> bool {
        self.lo.is_none() && self.hi.is_none()
    }

    pub fn is_empty(&self) -> bool {
        matches!((&self.lo, &self.hi), (Some(l), Some(h)) if l > h)
    }

    pub fn as_constant(&self) -> Option<&BigInt> {
        match (&self.lo, &self.hi) {
            (Some(l), Some(h)) if l == h => Some(l),
            _ => None,
        }
    }

    pub fn contains(&self, v: &BigInt) -> bool {
        self.lo.as_ref().map_or(true, |l| l <= v) && self.hi.as_ref().map_or(true, |h| v <= h)
    }

    pub fn meet(&self, other: &Interval) -> Interval {
        let lo = match (&self.lo, &other.lo) {
            (Some(a), Some(b)) => Some(a.max(b).clone()),
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        };
        let hi = match (&self.hi, &other.hi) {
            (Some(a), Some(b)) => Some(a.min(b).clone()),
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        };
        Interval { lo, hi }
    }

    pub fn join(&self, other: &Interval) -> Interval {
        let lo = match (&self.lo, &other.lo) {
            (Some(a), Some(b)) => Some(a.min(b).clone()),
            _ => None,
        };
        let hi = match (&self.hi, &other.hi) {
            (Some(a), Some(b)) => Some(a.max(b).clone()),
            _ => None,
        };
        Interval { lo, hi }
    }

    pub fn leq(&self, other: &Interval) -> bool {
        if self.is_empty() {
            return true;
        }
        let lo_ok = match (&self.lo, &other.lo) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a >= b,
        };
        let hi_ok = match (&self.hi, &other.hi) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a <= b,
        };
        lo_ok && hi_ok
    }

    /// Shrink to values satisfying `x ≡ residue (mod modulus)`; modulus 0
    /// means the exact constant `residue`.
    pub fn tighten_to_congruence(&self, modulus: &BigInt, residue: &BigInt) -> Interval {
        if modulus.is_zero() {
            return if self.contains(residue) {
                Interval::constant(residue.clone())
            } else {
                Interval::bounded(1, 0) // canonical empty
            };
        }
        let lo = self.lo.as_ref().map(|l| {
            // Smallest value ≥ l congruent to residue.
            let diff = (residue - l).mod_floor(modulus);
            l + diff
        });
        let hi = self.hi.as_ref().map(|h| {
            let diff = (h - residue).mod_floor(modulus);
            h - diff
        });
        Interval { lo, hi }
    }

    /// Width as a count of integer points, when finite.
    pub fn count(&self) -> Option<BigInt> {
        match (&self.lo, &self.hi) {
            (Some(l), Some(h)) if l <= h => Some(h - l + 1),
            (Some(l), Some(h)) if l > h => Some(BigInt::zero()),
            _ => None,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lo = self.lo.as_ref().map_or("-oo".to_string(), |v| v.to_string());
        let hi = self.hi.as_ref().map_or("+oo".to_string(), |v| v.to_string());
        write!(f, "[{lo},{hi}]")
    }
}

trait ModFloor {
    fn mod_floor(&self, m: &BigInt) -> BigInt;
}

impl ModFloor for BigInt {
    fn mod_floor(&self, m: &BigInt) -> BigInt {
        num_integer::Integer::mod_floor(self, m)
    }
}
