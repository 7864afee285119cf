//! Relational linear-congruence domain (grid), kept in generator form: a
//! base point plus an integer lattice of displacement generators, so the
//! concretization is `{ point + Σ λᵢ·basisᵢ | λ ∈ ℤᵏ }`. Every operation
//! reduces to the Diophantine solver in `matrix`. Modulus-0 facts (exact
//! affine equalities) are simply directions absent from the lattice.

use super::congr::Congruence;
use super::linexpr::LinExpr;
use super::matrix::{self, canonical_basis, lattice_member, solve_dioph, Matrix, Vector};
use super::NumVar;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    /// Coordinate order; always sorted.
    vars: Vec<NumVar>,
    point: Vector,
    basis: Matrix,
}

impl Grid {
    /// Fully unconstrained grid over the given variables.
    pub fn top(vars: impl IntoIterator<Item = NumVar>) -> Grid {
        let mut vars: Vec<NumVar> = vars.into_iter().collect();
        vars.sort();
        vars.dedup();
        let n = vars.len();
        Grid { vars, point: matrix::zeros(n), basis: matrix::identity(n) }
    }

    pub fn vars(&self) -> &[NumVar] {
        &self.vars
    }

    fn index_of(&self, v: &NumVar) -> usize {
        self.vars.binary_search(v).expect("variable not in grid")
    }

    /// Register a new, unconstrained variable.
    pub fn add_var(&mut self, v: NumVar) {
        let idx = match self.vars.binary_search(&v) {
            Ok(_) => panic!("variable already in grid"),
            Err(i) => i,
        };
        self.vars.insert(idx, v);
        self.point.insert(idx, BigInt::zero());
        for row in self.basis.iter_mut() {
            row.insert(idx, BigInt::zero());
        }
        let mut unit = matrix::zeros(self.vars.len());
        unit[idx] = BigInt::from(1);
        self.basis.push(unit);
        self.canonicalize();
    }

    /// Existentially drop all variables not in `keep` (coordinate removal is
    /// exact projection in generator form).
    pub fn project_onto(&self, keep: &impl Fn(&NumVar) -> bool) -> Grid {
        let kept: Vec<usize> =
            (0..self.vars.len()).filter(|&i| keep(&self.vars[i])).collect();
        let vars = kept.iter().map(|&i| self.vars[i].clone()).collect();
        let point = kept.iter().map(|&i| self.point[i].clone()).collect();
        let basis = self
            .basis
            .iter()
            .map(|row| kept.iter().map(|&i| row[i].clone()).collect())
            .collect();
        let mut g = Grid { vars, point, basis };
        g.canonicalize();
        g
    }

    pub fn rename(&self, map: &BTreeMap<NumVar, NumVar>) -> Grid {
        let renamed: Vec<NumVar> = self
            .vars
            .iter()
            .map(|v| map.get(v).cloned().unwrap_or_else(|| v.clone()))
            .collect();
        let mut order: Vec<usize> = (0..renamed.len()).collect();
        order.sort_by(|&a, &b| renamed[a].cmp(&renamed[b]));
        let vars = order.iter().map(|&i| renamed[i].clone()).collect();
        let point = order.iter().map(|&i| self.point[i].clone()).collect();
        let basis = self
            .basis
            .iter()
            .map(|row| order.iter().map(|&i| row[i].clone()).collect())
            .collect();
        let mut g = Grid { vars, point, basis };
        g.canonicalize();
        g
    }

    fn canonicalize(&mut self) {
        self.basis = canonical_basis(std::mem::take(&mut self.basis));
    }

    /// Intersect with `expr ≡ 0 (mod m)`; `m = 0` means `expr = 0` exactly.
    /// Returns `None` when the intersection is empty.
    pub fn constrain(&self, expr: &LinExpr, modulus: &BigInt) -> Option<Grid> {
        let a: Vector = self
            .vars
            .iter()
            .map(|v| expr.coeffs.get(v).cloned().unwrap_or_else(BigInt::zero))
            .collect();
        let r0 = matrix::dot(&a, &self.point) + &expr.constant;
        // Solve Σ gᵢλᵢ (+ m·t) = −r0 where gᵢ = a·basisᵢ.
        let k = self.basis.len();
        let mut row: Vector = self.basis.iter().map(|b| matrix::dot(&a, b)).collect();
        if !modulus.is_zero() {
            row.push(modulus.clone());
        }
        let sol = solve_dioph(&vec![row], &[-r0])?;
        let lambda = &sol.particular[..k];
        let n = self.vars.len();
        let mut point = self.point.clone();
        for (l, b) in lambda.iter().zip(&self.basis) {
            for i in 0..n {
                point[i] += l * &b[i];
            }
        }
        let basis: Matrix = sol
            .null_basis
            .iter()
            .map(|z| {
                let mut dir = matrix::zeros(n);
                for (zi, b) in z[..k].iter().zip(&self.basis) {
                    for i in 0..n {
                        dir[i] += zi * &b[i];
                    }
                }
                dir
            })
            .collect();
        let mut g = Grid { vars: self.vars.clone(), point, basis };
        g.canonicalize();
        Some(g)
    }

    /// Lattice-coset intersection; `None` when empty.
    pub fn meet(&self, other: &Grid) -> Option<Grid> {
        assert_eq!(self.vars, other.vars, "grids over different variables");
        let n = self.vars.len();
        let k1 = self.basis.len();
        let k2 = other.basis.len();
        // B₁ᵀλ − B₂ᵀμ = p₂ − p₁, unknowns (λ, μ).
        let a: Matrix = (0..n)
            .map(|i| {
                let mut row = Vector::with_capacity(k1 + k2);
                row.extend(self.basis.iter().map(|b| b[i].clone()));
                row.extend(other.basis.iter().map(|b| -b[i].clone()));
                row
            })
            .collect();
        let b: Vector = (0..n).map(|i| &other.point[i] - &self.point[i]).collect();
        let sol = solve_dioph(&a, &b)?;
        let mut point = self.point.clone();
        for (l, bs) in sol.particular[..k1].iter().zip(&self.basis) {
            for i in 0..n {
                point[i] += l * &bs[i];
            }
        }
        let basis: Matrix = sol
            .null_basis
            .iter()
            .map(|z| {
                let mut dir = matrix::zeros(n);
                for (zi, bs) in z[..k1].iter().zip(&self.basis) {
                    for i in 0..n {
                        dir[i] += zi * &bs[i];
                    }
                }
                dir
            })
            .collect();
        let mut g = Grid { vars: self.vars.clone(), point, basis };
        g.canonicalize();
        Some(g)
    }

    /// Smallest grid containing both cosets: keep one point and add the
    /// difference of points as a generator.
    pub fn join(&self, other: &Grid) -> Grid {
        assert_eq!(self.vars, other.vars, "grids over different variables");
        let n = self.vars.len();
        let mut basis = self.basis.clone();
        basis.extend(other.basis.iter().cloned());
        basis.push((0..n).map(|i| &other.point[i] - &self.point[i]).collect());
        let mut g = Grid { vars: self.vars.clone(), point: self.point.clone(), basis };
        g.canonicalize();
        g
    }

    pub fn leq(&self, other: &Grid) -> bool {
        assert_eq!(self.vars, other.vars, "grids over different variables");
        let n = self.vars.len();
        let diff: Vector = (0..n).map(|i| &self.point[i] - &other.point[i]).collect();
        lattice_member(&other.basis, &diff)
            && self.basis.iter().all(|row| lattice_member(&other.basis, row))
    }

    pub fn member(&self, env: &impl Fn(&NumVar) -> BigInt) -> bool {
        let diff: Vector = self
            .vars
            .iter()
            .enumerate()
            .map(|(i, v)| env(v) - &self.point[i])
            .collect();
        lattice_member(&self.basis, &diff)
    }

    /// Congruence satisfied by an affine form over the grid: modulus is the
    /// gcd of the form along all generators, residue its value at the point.
    pub fn congruence_of(&self, expr: &LinExpr) -> Congruence {
        let a: Vector = self
            .vars
            .iter()
            .map(|v| expr.coeffs.get(v).cloned().unwrap_or_else(BigInt::zero))
            .collect();
        let residue = matrix::dot(&a, &self.point) + &expr.constant;
        let modulus = self
            .basis
            .iter()
            .fold(BigInt::zero(), |acc, b| acc.gcd(&matrix::dot(&a, b)));
        Congruence::modular(modulus, residue)
    }

    pub fn var_congruence(&self, v: &NumVar) -> Congruence {
        let i = self.index_of(v);
        let modulus = self
            .basis
            .iter()
            .fold(BigInt::zero(), |acc, b| acc.gcd(&b[i]));
        Congruence::modular(modulus, self.point[i].clone())
    }

    /// Does the grid already force `expr = 0`? Sparse early-exit variant of
    /// `congruence_of(expr).as_constant() == Some(0)`.
    pub fn entails_eq(&self, expr: &LinExpr) -> bool {
        let sparse: Vec<(usize, &BigInt)> =
            expr.coeffs.iter().map(|(v, a)| (self.index_of(v), a)).collect();
        let at = |row: &Vector| -> BigInt {
            sparse.iter().map(|(i, a)| *a * &row[*i]).sum()
        };
        if !(at(&self.point) + &expr.constant).is_zero() {
            return false;
        }
        self.basis.iter().all(|row| at(row).is_zero())
    }

    /// Congruence of `w − v`, specialized from `congruence_of` to avoid
    /// building a linear expression and dotting it with every generator.
    pub fn diff_congruence(&self, w: &NumVar, v: &NumVar) -> Congruence {
        let (i, j) = (self.index_of(w), self.index_of(v));
        let modulus = self
            .basis
            .iter()
            .fold(BigInt::zero(), |acc, b| acc.gcd(&(&b[i] - &b[j])));
        Congruence::modular(modulus, &self.point[i] - &self.point[j])
    }
}
