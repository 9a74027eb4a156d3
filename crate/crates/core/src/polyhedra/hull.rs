//! Integer hulls by Gomory-Chvátal cuts, with a bounded enumeration fallback.
//!
//! The polyhedron is first restricted to the integer lattice of its affine
//! hull and stripped of its lineality space, so the cutting loop runs on a
//! pointed polyhedron in the remaining coordinates.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::generators::{DoubleDescription, GeneratorRep};
use super::lattice::{self, IntMatrix};
use super::{Constraint, Polyhedron, Relation};
use crate::error::{Error, Result};
use crate::numeric::{RatVec, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HullMethod {
    /// Cutting planes until every vertex is integral.
    Cuts,
    /// Enumeration of integer points in a bounded region after the cut
    /// budget ran out.
    Enumeration,
}

#[derive(Clone, Debug)]
pub struct HullOptions {
    pub max_cuts: usize,
    /// Whether to enumerate integer points when the cut budget runs out.
    pub fallback: bool,
    /// Largest bounding box (in lattice points) the fallback will scan.
    pub max_enumeration: usize,
}

impl Default for HullOptions {
    fn default() -> Self {
        HullOptions {
            max_cuts: 10_000,
            fallback: true,
            max_enumeration: 200_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct HullOutcome {
    pub polyhedron: Polyhedron,
    /// Number of cuts added in reduced coordinates.
    pub cuts: usize,
    pub method: HullMethod,
}

fn big(r: &Rational) -> BigInt {
    debug_assert!(r.is_integer());
    r.to_integer()
}

fn rat(b: &BigInt) -> Rational {
    Rational::from_integer(b.clone())
}

/// Primitive integer row with floored rhs; `None` for a zero row.
fn normalize(a: &RatVec, b: &Rational) -> Option<(RatVec, Rational)> {
    let i = a.iter().position(|v| !v.is_zero())?;
    let p = a.primitive();
    let s = &p[i] / &a[i];
    Some((p, (b * s).floor()))
}

fn empty_outcome(n: usize, cuts: usize) -> HullOutcome {
    HullOutcome {
        polyhedron: Polyhedron::empty(n),
        cuts,
        method: HullMethod::Cuts,
    }
}

/// Strict rows tightened for integer points: `a·x < b` becomes
/// `a·x ≤ ⌈b⌉ − 1` once `a` is scaled to coprime integers.
fn tighten_strict(p: &Polyhedron) -> Result<Polyhedron> {
    let cs = p
        .constraints()
        .iter()
        .map(|c| {
            if c.relation != Relation::Lt {
                return c.clone();
            }
            match c.coeffs.iter().position(|v| !v.is_zero()) {
                None => {
                    let ok = Rational::zero() < c.rhs;
                    Constraint::le(c.coeffs.clone(), if ok { c.rhs.clone() } else { -Rational::one() })
                }
                Some(i) => {
                    let a = c.coeffs.primitive();
                    let s = &a[i] / &c.coeffs[i];
                    let b = (&c.rhs * s).ceil() - Rational::one();
                    Constraint::le(a, b)
                }
            }
        })
        .collect();
    Polyhedron::new(p.dim(), cs)
}

pub(super) fn integer_hull(p: &Polyhedron, opts: &HullOptions) -> Result<HullOutcome> {
    let n = p.dim();
    let q = tighten_strict(p)?;
    if !q.is_feasible().is_feasible() {
        return Ok(empty_outcome(n, 0));
    }
    let eq_idx = q.implicit_equalities()?;
    let mut e_rows: IntMatrix = Vec::new();
    let mut e_rhs = Vec::new();
    let mut equalities = Vec::new();
    let mut ineqs = Vec::new();
    for (i, c) in q.constraints().iter().enumerate() {
        if eq_idx.contains(&i) {
            let (a, b) = lattice::integral_row(&c.coeffs, &c.rhs);
            e_rows.push(a);
            e_rhs.push(b);
            equalities.push(Constraint::eq(c.coeffs.clone(), c.rhs.clone()));
        } else {
            ineqs.push(c.clone());
        }
    }
    let Some(sol) = lattice::solve_integer(&e_rows, &e_rhs, n) else {
        return Ok(empty_outcome(n, 0));
    };
    let pdim = sol.v.len();

    // inequalities in lattice coordinates z, x = x0 + W z
    let mut m_rows: IntMatrix = Vec::new();
    let mut m_rhs: Vec<BigInt> = Vec::new();
    for c in &ineqs {
        let a: Vec<Rational> = (0..pdim)
            .map(|j| (0..n).map(|i| &c.coeffs[i] * rat(&sol.w[i][j])).sum())
            .collect();
        let ax0: Rational = (0..n).map(|i| &c.coeffs[i] * rat(&sol.x0[i])).sum();
        let (a, b) = lattice::integral_row(&a, &(&c.rhs - ax0));
        m_rows.push(a);
        m_rhs.push(b);
    }

    // split off lineality: M·U2 = [H2 | 0], u1 = first rank rows of U2⁻¹·z
    let ech = lattice::column_echelon(&m_rows, pdim);
    let k = ech.rank;
    let mut rows: Vec<(RatVec, Rational)> = Vec::new();
    for (row, b) in ech.h.iter().zip(&m_rhs) {
        let a: RatVec = row[..k].iter().map(rat).collect();
        match normalize(&a, &rat(b)) {
            Some(r) => rows.push(r),
            None if b.is_negative() => return Ok(empty_outcome(n, 0)),
            None => {}
        }
    }

    let (hull_rows, cuts, method) = match hull_pointed(k, rows, opts)? {
        Pointed::Empty(cuts) => return Ok(empty_outcome(n, cuts)),
        Pointed::Hull(rows, cuts, method) => (rows, cuts, method),
    };

    // back to x: u1 = T·V·x with T the top rows of U2⁻¹
    let tv = lattice::mat_mul(&ech.u_inv[..k], &sol.v, pdim, n);
    let mut out = equalities;
    for c in hull_rows {
        let a: RatVec = (0..n)
            .map(|i| (0..k).map(|j| &c.coeffs[j] * rat(&tv[j][i])).sum())
            .collect();
        out.push(Constraint::new(a, c.relation, c.rhs));
    }
    let hull = Polyhedron::new(n, out)?.without_redundant()?;
    Ok(HullOutcome {
        polyhedron: hull,
        cuts,
        method,
    })
}

enum Pointed {
    Empty(usize),
    Hull(Vec<Constraint>, usize, HullMethod),
}

fn hull_pointed(k: usize, rows: Vec<(RatVec, Rational)>, opts: &HullOptions) -> Result<Pointed> {
    if k == 0 {
        return Ok(Pointed::Hull(Vec::new(), 0, HullMethod::Cuts));
    }
    let mut dd = DoubleDescription::new(k);
    let mut seen: HashSet<(RatVec, Rational)> = HashSet::new();
    let mut current: Vec<(RatVec, Rational)> = Vec::new();
    for r in rows {
        if seen.insert(r.clone()) {
            dd.add_constraint(&Constraint::le(r.0.clone(), r.1.clone()))?;
            current.push(r);
        }
    }
    let mut cuts = 0usize;
    loop {
        let gens = dd.generators();
        if gens.is_empty() {
            return Ok(Pointed::Empty(cuts));
        }
        let Some(v) = gens.vertices.iter().find(|v| !v.is_integral()) else {
            let cs = current
                .into_iter()
                .map(|(a, b)| Constraint::le(a, b))
                .collect();
            return Ok(Pointed::Hull(cs, cuts, HullMethod::Cuts));
        };
        if cuts >= opts.max_cuts {
            let partial = Polyhedron::new(
                k,
                current.iter().map(|(a, b)| Constraint::le(a.clone(), b.clone())).collect(),
            )?;
            if opts.fallback {
                if let Some(r) = enumerate(k, &current, &gens, opts.max_enumeration)? {
                    return Ok(match r {
                        None => Pointed::Empty(cuts),
                        Some(cs) => Pointed::Hull(cs, cuts, HullMethod::Enumeration),
                    });
                }
            }
            return Err(Error::CutLimitExceeded {
                cuts,
                partial: Box::new(partial),
            });
        }
        let new = gomory_cuts(k, &current, v)?;
        let mut added = false;
        for r in new {
            if seen.insert(r.clone()) {
                dd.add_constraint(&Constraint::le(r.0.clone(), r.1.clone()))?;
                current.push(r);
                cuts += 1;
                added = true;
            }
        }
        if !added {
            return Err(Error::Internal("cut does not separate the vertex".into()));
        }
    }
}

/// Chvátal-Gomory cuts read off a basis of rows tight at the vertex `v`,
/// one per fractional coordinate.
fn gomory_cuts(k: usize, rows: &[(RatVec, Rational)], v: &RatVec) -> Result<Vec<(RatVec, Rational)>> {
    let mut basis: Vec<usize> = Vec::new();
    let mut echelon: Vec<RatVec> = Vec::new();
    for (i, (a, b)) in rows.iter().enumerate() {
        if a.dot(v) != *b {
            continue;
        }
        let mut r = a.clone();
        for e in &echelon {
            let piv = e.iter().position(|x| !x.is_zero()).expect("nonzero");
            if !r[piv].is_zero() {
                let f = &r[piv] / &e[piv];
                r = &r - &e.scaled(&f);
            }
        }
        if !r.is_zero() {
            echelon.push(r);
            basis.push(i);
            if basis.len() == k {
                break;
            }
        }
    }
    if basis.len() != k {
        return Err(Error::Internal("vertex without a full tight basis".into()));
    }
    let a_b: Vec<RatVec> = basis.iter().map(|&i| rows[i].0.clone()).collect();
    let b_b: Vec<Rational> = basis.iter().map(|&i| rows[i].1.clone()).collect();
    let inv = invert(&a_b)?;
    let mut out = Vec::new();
    for j in 0..k {
        if v[j].is_integer() {
            continue;
        }
        let u: Vec<Rational> = inv[j].iter().map(|l| l - l.floor()).collect();
        let coeffs: RatVec = (0..k)
            .map(|c| u.iter().zip(&a_b).map(|(ui, row)| ui * &row[c]).sum())
            .collect();
        let rhs: Rational = u.iter().zip(&b_b).map(|(ui, bi)| ui * bi).sum();
        match normalize(&coeffs, &rhs.floor()) {
            Some(r) => out.push(r),
            None => return Err(Error::Internal("degenerate cut".into())),
        }
    }
    Ok(out)
}

/// Gauss-Jordan inverse of a square nonsingular matrix.
fn invert(m: &[RatVec]) -> Result<Vec<RatVec>> {
    let k = m.len();
    let mut a: Vec<Vec<Rational>> = m.iter().map(|r| r.to_vec()).collect();
    let mut inv: Vec<Vec<Rational>> = (0..k).map(|i| RatVec::unit(k, i).into_inner()).collect();
    for col in 0..k {
        let piv = (col..k)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Internal("singular basis".into()))?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col].clone();
        for v in a[col].iter_mut().chain(inv[col].iter_mut()) {
            *v /= &d;
        }
        for r in 0..k {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..k {
                let (x, y) = (&a[col][c] * &f, &inv[col][c] * &f);
                a[r][c] -= x;
                inv[r][c] -= y;
            }
        }
    }
    Ok(inv.into_iter().map(RatVec::from).collect())
}

/// Integer points of the pointed polyhedron inside `conv(V) + Σ [0,1]·r`,
/// turned back into constraints together with the rays.
///
/// Outer `None`: the box is too large. Inner `None`: no integer points.
fn enumerate(
    k: usize,
    rows: &[(RatVec, Rational)],
    gens: &GeneratorRep,
    limit: usize,
) -> Result<Option<Option<Vec<Constraint>>>> {
    let mut lo: Vec<BigInt> = Vec::with_capacity(k);
    let mut hi: Vec<BigInt> = Vec::with_capacity(k);
    let mut size = BigInt::one();
    for i in 0..k {
        let vmin = gens.vertices.iter().map(|v| v[i].clone()).min().expect("nonempty");
        let vmax = gens.vertices.iter().map(|v| v[i].clone()).max().expect("nonempty");
        let neg: Rational = gens.rays.iter().filter(|r| r[i].is_negative()).map(|r| r[i].clone()).sum();
        let pos: Rational = gens.rays.iter().filter(|r| r[i].is_positive()).map(|r| r[i].clone()).sum();
        let l = big(&(vmin + neg).ceil());
        let h = big(&(vmax + pos).floor());
        if h < l {
            return Ok(Some(None));
        }
        size *= &h - &l + BigInt::one();
        lo.push(l);
        hi.push(h);
    }
    if size > BigInt::from(limit) {
        return Ok(None);
    }
    let mut points = Vec::new();
    let mut x = lo.clone();
    'outer: loop {
        let xr: RatVec = x.iter().map(rat).collect();
        if rows.iter().all(|(a, b)| a.dot(&xr) <= *b) {
            points.push(xr);
        }
        for i in 0..k {
            if x[i] < hi[i] {
                x[i] += 1;
                continue 'outer;
            }
            x[i] = lo[i].clone();
        }
        break;
    }
    if points.is_empty() {
        return Ok(Some(None));
    }
    let hull = Polyhedron::from_generators(
        k,
        &GeneratorRep {
            vertices: points,
            rays: gens.rays.clone(),
        },
    )?;
    Ok(Some(Some(hull.constraints().to_vec())))
}
