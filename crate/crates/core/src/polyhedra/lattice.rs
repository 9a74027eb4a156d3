//! Integer column echelon forms and integer solutions of linear equations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::numeric::{denominator_lcm, Rational};

pub(crate) type IntMatrix = Vec<Vec<BigInt>>;

pub(crate) fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect()
}

/// `A·U = [H | 0]` with `U` unimodular. `H` has `rank` nonzero columns in
/// echelon form; column `j` has its leading positive entry in row
/// `pivot_rows[j]`.
#[derive(Clone, Debug)]
pub(crate) struct ColumnEchelon {
    pub h: IntMatrix,
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub rank: usize,
    pub pivot_rows: Vec<usize>,
}

pub(crate) fn column_echelon(a: &[Vec<BigInt>], n: usize) -> ColumnEchelon {
    let mut h: IntMatrix = a.to_vec();
    let mut u = identity(n);
    let mut u_inv = identity(n);
    let mut pivot_rows = Vec::new();
    let mut c = 0;
    for r in 0..h.len() {
        if c == n {
            break;
        }
        for j in c + 1..n {
            if h[r][j].is_zero() {
                continue;
            }
            let x = h[r][c].clone();
            let y = h[r][j].clone();
            let e = x.extended_gcd(&y);
            let (g, s, t) = (e.gcd, e.x, e.y);
            let (xg, yg) = (&x / &g, &y / &g);
            // col_c ← s·col_c + t·col_j, col_j ← −(y/g)·col_c + (x/g)·col_j
            for m in [&mut h, &mut u] {
                for row in m.iter_mut() {
                    let (pc, pj) = (row[c].clone(), row[j].clone());
                    row[c] = &s * &pc + &t * &pj;
                    row[j] = -&yg * &pc + &xg * &pj;
                }
            }
            // inverse transform acts on rows c and j of U⁻¹
            let (rc, rj) = (u_inv[c].clone(), u_inv[j].clone());
            u_inv[c] = rc.iter().zip(&rj).map(|(p, q)| &xg * p + &yg * q).collect();
            u_inv[j] = rc.iter().zip(&rj).map(|(p, q)| -&t * p + &s * q).collect();
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            for m in [&mut h, &mut u] {
                for row in m.iter_mut() {
                    row[c] = -&row[c];
                }
            }
            for v in u_inv[c].iter_mut() {
                *v = -&*v;
            }
        }
        pivot_rows.push(r);
        c += 1;
    }
    ColumnEchelon {
        h,
        u,
        u_inv,
        rank: c,
        pivot_rows,
    }
}

/// Integer row scaling of `a·x = b`.
pub(crate) fn integral_row(coeffs: &[Rational], rhs: &Rational) -> (Vec<BigInt>, BigInt) {
    let l = denominator_lcm(coeffs.iter().chain(std::iter::once(rhs)));
    let l = Rational::from_integer(l);
    (
        coeffs.iter().map(|c| (c * &l).to_integer()).collect(),
        (rhs * &l).to_integer(),
    )
}

/// All integer solutions of `E·x = e` as `x = x0 + W·z`, `z ∈ ℤ^p`, with an
/// integer left inverse `z = V·x` on that set.
#[derive(Clone, Debug)]
pub(crate) struct LatticeSolution {
    pub x0: Vec<BigInt>,
    /// `n × p`.
    pub w: IntMatrix,
    /// `p × n`.
    pub v: IntMatrix,
}

/// `None` when `E·x = e` has no integer solution.
pub(crate) fn solve_integer(e: &[Vec<BigInt>], rhs: &[BigInt], n: usize) -> Option<LatticeSolution> {
    let ech = column_echelon(e, n);
    let k = ech.rank;
    let mut w1: Vec<BigInt> = Vec::with_capacity(k);
    for (j, &r) in ech.pivot_rows.iter().enumerate() {
        let acc: BigInt = (0..j).map(|i| &ech.h[r][i] * &w1[i]).sum();
        let num = &rhs[r] - acc;
        let (q, rem) = num.div_rem(&ech.h[r][j]);
        if !rem.is_zero() {
            return None;
        }
        w1.push(q);
    }
    for (r, row) in ech.h.iter().enumerate() {
        let lhs: BigInt = (0..k).map(|i| &row[i] * &w1[i]).sum();
        if lhs != rhs[r] {
            return None;
        }
    }
    let x0 = (0..n)
        .map(|i| (0..k).map(|j| &ech.u[i][j] * &w1[j]).sum())
        .collect();
    let w = (0..n).map(|i| ech.u[i][k..].to_vec()).collect();
    let v = ech.u_inv[k..].to_vec();
    Some(LatticeSolution { x0, w, v })
}

#[cfg(test)]
pub(crate) fn mat_vec(m: &[Vec<BigInt>], x: &[BigInt]) -> Vec<BigInt> {
    m.iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

pub(crate) fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>], inner: usize, cols: usize) -> IntMatrix {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| &row[k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

#[cfg(test)]
pub(crate) fn is_identity(m: &[Vec<BigInt>]) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        row.iter()
            .enumerate()
            .all(|(j, v)| if i == j { num_traits::One::is_one(v) } else { v.is_zero() })
    })
}
