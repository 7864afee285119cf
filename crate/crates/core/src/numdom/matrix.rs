//! Exact integer linear algebra: Hermite-style elimination and a solver for
//! systems of linear Diophantine equations `A·z = b`. The grid domain reduces
//! all of its lattice operations (meet, membership, congruence extraction) to
//! this solver.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Vector = Vec<BigInt>;
pub type Matrix = Vec<Vector>;

pub fn zeros(n: usize) -> Vector {
    vec![BigInt::zero(); n]
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            let mut row = zeros(n);
            row[i] = BigInt::one();
            row
        })
        .collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Column `j` of a row-major matrix.
fn column(m: &Matrix, j: usize) -> Vector {
    m.iter().map(|row| row[j].clone()).collect()
}

/// Replace columns `i`, `j` with an unimodular combination
/// `(p·cᵢ + q·cⱼ, r·cᵢ + s·cⱼ)`.
fn combine_columns(
    m: &mut Matrix,
    i: usize,
    j: usize,
    p: &BigInt,
    q: &BigInt,
    r: &BigInt,
    s: &BigInt,
) {
    for row in m.iter_mut() {
        let a = row[i].clone();
        let b = row[j].clone();
        row[i] = p * &a + q * &b;
        row[j] = r * &a + s * &b;
    }
}

/// Solution set of `A·z = b` over the integers, described as
/// `particular + span_ℤ(null_basis)`.
#[derive(Debug, Clone)]
pub struct DiophSolution {
    pub particular: Vector,
    pub null_basis: Matrix,
}

/// Solve `A·z = b` (rows of `a` are equations). Returns `None` when the
/// system has no integer solution.
pub fn solve_dioph(a: &Matrix, b: &[BigInt]) -> Option<DiophSolution> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    if n == 0 {
        // No unknowns: solvable iff b = 0.
        if b.iter().all(Zero::is_zero) {
            return Some(DiophSolution { particular: vec![], null_basis: vec![] });
        }
        return None;
    }
    // Column Hermite reduction: find unimodular U with H = A·U in column
    // echelon form, applying identical column operations to U.
    let mut h = a.clone();
    let mut u = identity(n);
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut pc = 0usize;
    for row in 0..m {
        if pc >= n {
            break;
        }
        if let Some(first) = (pc..n).find(|&j| !h[row][*&j].is_zero()) {
            if first != pc {
                h.iter_mut().for_each(|r| r.swap(pc, first));
                u.iter_mut().for_each(|r| r.swap(pc, first));
            }
            for j in pc + 1..n {
                if h[row][j].is_zero() {
                    continue;
                }
                let x = h[row][pc].clone();
                let y = h[row][j].clone();
                let e = x.extended_gcd(&y);
                // [[p, r], [q, s]] is unimodular: p·x + q·y = g, r·x + s·y = 0.
                let (p, q) = (e.x, e.y);
                let (r, s) = (-(&y / &e.gcd), &x / &e.gcd);
                combine_columns(&mut h, pc, j, &p, &q, &r, &s);
                combine_columns(&mut u, pc, j, &p, &q, &r, &s);
            }
            if h[row][pc].is_negative() {
                for r in h.iter_mut() {
                    r[pc] = -r[pc].clone();
                }
                for r in u.iter_mut() {
                    r[pc] = -r[pc].clone();
                }
            }
            pivots.push((row, pc));
            pc += 1;
        }
    }
    // Forward-substitute through H·y = b. Pivot columns have zeros above
    // their leading row, so each row determines at most one new y.
    let mut y = zeros(n);
    let mut pivot_iter = pivots.iter().peekable();
    for row in 0..m {
        let s: BigInt = dot(&h[row], &y);
        match pivot_iter.peek() {
            Some(&&(prow, pcol)) if prow == row => {
                pivot_iter.next();
                let rhs = &b[row] - &s;
                let (q, r) = rhs.div_rem(&h[row][pcol]);
                if !r.is_zero() {
                    return None;
                }
                y[pcol] = q;
            }
            _ => {
                if s != b[row] {
                    return None;
                }
            }
        }
    }
    let particular = (0..n).map(|i| dot(&u[i], &y)).collect();
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let null_basis = (0..n)
        .filter(|j| !pivot_cols.contains(j))
        .map(|j| column(&u, j))
        .collect();
    Some(DiophSolution { particular, null_basis })
}

/// Canonicalize a lattice basis given as generator rows: row-style Hermite
/// form with zero rows removed. The returned rows generate the same lattice.
pub fn canonical_basis(rows: Matrix) -> Matrix {
    let mut rows: Matrix = rows.into_iter().filter(|r| !r.iter().all(Zero::is_zero)).collect();
    if rows.is_empty() {
        return rows;
    }
    let n = rows[0].len();
    let mut pr = 0usize;
    for col in 0..n {
        if pr >= rows.len() {
            break;
        }
        if let Some(first) = (pr..rows.len()).find(|&i| !rows[i][col].is_zero()) {
            rows.swap(pr, first);
            for i in pr + 1..rows.len() {
                while !rows[i][col].is_zero() {
                    let q = rows[pr][col].div_euclid(&rows[i][col].clone());
                    // Euclidean-style reduction keeps everything integral.
                    let sub: Vector =
                        (0..n).map(|k| &rows[pr][k] - &q * &rows[i][k]).collect();
                    rows[pr] = rows[i].clone();
                    rows[i] = sub;
                }
            }
            if rows[pr][col].is_negative() {
                for v in rows[pr].iter_mut() {
                    *v = -v.clone();
                }
            }
            // Reduce entries above the pivot for a canonical form.
            for i in 0..pr {
                let q = rows[i][col].div_euclid(&rows[pr][col].clone());
                if !q.is_zero() {
                    for k in 0..n {
                        let d = &q * &rows[pr][k];
                        rows[i][k] -= d;
                    }
                }
            }
            pr += 1;
        }
    }
    rows.truncate(pr);
    rows.retain(|r| !r.iter().all(Zero::is_zero));
    rows
}

/// Euclidean division helper on BigInt (num-bigint's div truncates).
trait DivEuclidExt {
    fn div_euclid(&self, rhs: &BigInt) -> BigInt;
}

impl DivEuclidExt for BigInt {
    fn div_euclid(&self, rhs: &BigInt) -> BigInt {
        let (q, r) = self.div_rem(rhs);
        if r.is_negative() {
            if rhs.is_positive() {
                q - 1
            } else {
                q + 1
            }
        } else {
            q
        }
    }
}

/// Does `v` lie in the lattice generated by `rows`?
pub fn lattice_member(rows: &Matrix, v: &[BigInt]) -> bool {
    if v.iter().all(Zero::is_zero) {
        return true;
    }
    if rows.is_empty() {
        return false;
    }
    let n = v.len();
    // Solve Bᵀ·λ = v: unknowns are the row multipliers.
    let a: Matrix = (0..n).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect();
    solve_dioph(&a, v).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn mat(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&v| bi(v)).collect()).collect()
    }

    fn check_solution(a: &Matrix, b: &[BigInt], sol: &DiophSolution) {
        for (row, rhs) in a.iter().zip(b) {
            assert_eq!(&dot(row, &sol.particular), rhs);
            for null in &sol.null_basis {
                assert!(dot(row, null).is_zero());
            }
        }
    }

    #[test]
    fn solves_simple_systems() {
        let a = mat(&[&[2, 3]]);
        let b = vec![bi(7)];
        let sol = solve_dioph(&a, &b).unwrap();
        check_solution(&a, &b, &sol);
        assert_eq!(sol.null_basis.len(), 1);

        let a = mat(&[&[1, 0, 12], &[0, 1, -12]]);
        let b = vec![bi(5), bi(-3)];
        let sol = solve_dioph(&a, &b).unwrap();
        check_solution(&a, &b, &sol);
    }

    #[test]
    fn detects_unsolvable_systems() {
        assert!(solve_dioph(&mat(&[&[2, 4]]), &[bi(3)]).is_none());
        assert!(solve_dioph(&mat(&[&[1, 1], &[1, 1]]), &[bi(0), bi(1)]).is_none());
        assert!(solve_dioph(&mat(&[&[0, 0]]), &[bi(1)]).is_none());
    }

    #[test]
    fn random_systems_round_trip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let m = rng.gen_range(1..=3);
            let n = rng.gen_range(1..=4);
            let a: Matrix = (0..m)
                .map(|_| (0..n).map(|_| bi(rng.gen_range(-6i64..=6))).collect())
                .collect();
            // Build b from a known integer solution so the system is solvable.
            let z: Vector = (0..n).map(|_| bi(rng.gen_range(-5i64..=5))).collect();
            let b: Vector = a.iter().map(|row| dot(row, &z)).collect();
            let sol = solve_dioph(&a, &b).expect("solvable by construction");
            check_solution(&a, &b, &sol);
        }
    }

    #[test]
    fn canonical_basis_preserves_lattice() {
        let rows = mat(&[&[2, 4, 0], &[0, 6, 0], &[2, 10, 0]]);
        let canon = canonical_basis(rows.clone());
        for r in &rows {
            assert!(lattice_member(&canon, r));
        }
        for r in &canon {
            assert!(lattice_member(&rows, r));
        }
        assert!(canon.len() <= 2);
    }

    #[test]
    fn lattice_membership() {
        let rows = mat(&[&[12, 0], &[0, 4]]);
        assert!(lattice_member(&rows, &[bi(24), bi(-8)]));
        assert!(!lattice_member(&rows, &[bi(6), bi(0)]));
        assert!(lattice_member(&mat(&[]), &[bi(0), bi(0)]));
        assert!(!lattice_member(&mat(&[]), &[bi(1), bi(0)]));
    }

    #[test]
    fn gcd_column_extraction() {
        // Column gcds of a canonical basis describe per-variable congruences.
        let canon = canonical_basis(mat(&[&[12, 1], &[0, 4]]));
        let g0 = canon
            .iter()
            .fold(BigInt::zero(), |acc, r| acc.gcd(&r[0]))
            .to_i64()
            .unwrap();
        assert_eq!(g0, 12);
    }
}
