//! Per-variable arithmetic congruences `x ≡ c (mod m)`. Modulus 0 encodes
//! the exact constant `c`; modulus 1 is ⊤.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Congruence {
    pub modulus: BigInt,
    pub residue: BigInt,
}

impl Congruence {
    pub fn top() -> Self {
        Congruence { modulus: BigInt::one(), residue: BigInt::zero() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Congruence { modulus: BigInt::zero(), residue: c.into() }
    }

    pub fn modular(m: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        Congruence { modulus: m.into(), residue: c.into() }.normalized()
    }

    fn normalized(mut self) -> Self {
        if !self.modulus.is_zero() {
            self.residue = self.residue.mod_floor(&self.modulus);
        }
        self
    }

    pub fn is_top(&self) -> bool {
        self.modulus.is_one()
    }

    pub fn as_constant(&self) -> Option<&BigInt> {
        self.modulus.is_zero().then_some(&self.residue)
    }

    pub fn contains(&self, v: &BigInt) -> bool {
        if self.modulus.is_zero() {
            v == &self.residue
        } else {
            (v - &self.residue).mod_floor(&self.modulus).is_zero()
        }
    }

    /// Conjunction; `None` when the two congruences are incompatible.
    pub fn meet(&self, other: &Congruence) -> Option<Congruence> {
        match (self.as_constant(), other.as_constant()) {
            (Some(a), Some(b)) => (a == b).then(|| self.clone()),
            (Some(a), None) => other.contains(a).then(|| self.clone()),
            (None, Some(b)) => self.contains(b).then(|| other.clone()),
            (None, None) => {
                // Chinese remaindering on x ≡ c₁ (m₁) ∧ x ≡ c₂ (m₂).
                let e = self.modulus.extended_gcd(&other.modulus);
                let diff = &other.residue - &self.residue;
                let (q, r) = diff.div_rem(&e.gcd);
                if !r.is_zero() {
                    return None;
                }
                let lcm = self.modulus.lcm(&other.modulus);
                let residue = &self.residue + &self.modulus * &e.x * q;
                Some(Congruence::modular(lcm, residue))
            }
        }
    }

    pub fn join(&self, other: &Congruence) -> Congruence {
        let g = self
            .modulus
            .gcd(&other.modulus)
            .gcd(&(&self.residue - &other.residue));
        if g.is_zero() {
            // Both are the same constant.
            self.clone()
        } else {
            Congruence::modular(g, self.residue.clone())
        }
    }

    pub fn leq(&self, other: &Congruence) -> bool {
        match other.as_constant() {
            Some(b) => self.as_constant() == Some(b),
            None => {
                (&self.modulus % &other.modulus).is_zero()
                    && other.contains(&self.residue)
            }
        }
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "=[{}] {}", self.modulus, self.residue)
    }
}
