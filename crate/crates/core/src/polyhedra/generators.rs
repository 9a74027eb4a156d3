//! Double description: constraints to generators and back.

use num_traits::{One, Signed, Zero};

use super::{Constraint, Polyhedron, Relation};
use crate::error::{Error, Result};
use crate::numeric::{RatVec, Rational};

/// `P = conv(vertices) + cone(rays)`. An empty polyhedron has no vertices
/// and no rays. Rays are primitive integer vectors; a lineality direction
/// shows up as a pair of opposite rays.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GeneratorRep {
    pub vertices: Vec<RatVec>,
    pub rays: Vec<RatVec>,
}

impl GeneratorRep {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.rays.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn first(n: usize) -> Bits {
        let mut b = Bits(vec![0; n.div_ceil(64)]);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        let w = i / 64;
        if w >= self.0.len() {
            self.0.resize(w + 1, 0);
        }
        self.0[w] |= 1 << (i % 64);
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn subset_of(&self, other: &Bits) -> bool {
        self.0
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.0.get(i).copied().unwrap_or(0) == 0)
    }
}

#[derive(Clone, Debug)]
struct ConeRay {
    v: RatVec,
    tight: Bits,
}

/// A cone `{y | h·y ≤ 0 for every added row}` kept as lines plus extreme
/// rays, refined one row at a time.
#[derive(Clone, Debug)]
pub(crate) struct Cone {
    dim: usize,
    lines: Vec<RatVec>,
    rays: Vec<ConeRay>,
    rows: usize,
}

impl Cone {
    pub(crate) fn new(dim: usize) -> Cone {
        Cone {
            dim,
            lines: (0..dim).map(|i| RatVec::unit(dim, i)).collect(),
            rays: Vec::new(),
            rows: 0,
        }
    }

    pub(crate) fn add(&mut self, h: &RatVec) {
        debug_assert_eq!(h.dim(), self.dim);
        let idx = self.rows;
        self.rows += 1;

        if let Some(p) = self.lines.iter().position(|l| !h.dot(l).is_zero()) {
            let l = self.lines.remove(p);
            let hl = h.dot(&l);
            for other in &mut self.lines {
                let ho = h.dot(other);
                if !ho.is_zero() {
                    *other = (&*other - &l.scaled(&(ho / &hl))).primitive();
                }
            }
            for r in &mut self.rays {
                let hr = h.dot(&r.v);
                if !hr.is_zero() {
                    r.v = (&r.v - &l.scaled(&(hr / &hl))).primitive();
                }
                r.tight.set(idx);
            }
            let v = if hl.is_positive() {
                l.scaled(&-Rational::one())
            } else {
                l
            };
            self.rays.push(ConeRay {
                v: v.primitive(),
                tight: Bits::first(idx),
            });
            return;
        }

        let vals: Vec<Rational> = self.rays.iter().map(|r| h.dot(&r.v)).collect();
        let pos: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].is_positive()).collect();
        if pos.is_empty() {
            for (r, v) in self.rays.iter_mut().zip(&vals) {
                if v.is_zero() {
                    r.tight.set(idx);
                }
            }
            return;
        }
        let neg: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].is_negative()).collect();
        // a 2-face of the pointed part needs at least (d − 2) tight rows
        let needed = (self.dim - self.lines.len()).saturating_sub(2);

        let mut next = Vec::with_capacity(self.rays.len());
        for &n in &neg {
            for &p in &pos {
                let common = self.rays[p].tight.and(&self.rays[n].tight);
                if common.count() < needed {
                    continue;
                }
                let adjacent = !self
                    .rays
                    .iter()
                    .enumerate()
                    .any(|(r, ray)| r != p && r != n && common.subset_of(&ray.tight));
                if !adjacent {
                    continue;
                }
                let v = &self.rays[n].v.scaled(&vals[p]) - &self.rays[p].v.scaled(&vals[n]);
                let mut tight = common;
                tight.set(idx);
                next.push(ConeRay {
                    v: v.primitive(),
                    tight,
                });
            }
        }
        let mut kept: Vec<ConeRay> = Vec::with_capacity(self.rays.len() + next.len());
        for (mut r, v) in std::mem::take(&mut self.rays).into_iter().zip(&vals) {
            if v.is_positive() {
                continue;
            }
            if v.is_zero() {
                r.tight.set(idx);
            }
            kept.push(r);
        }
        kept.extend(next);
        self.rays = kept;
    }

    pub(crate) fn lines(&self) -> &[RatVec] {
        &self.lines
    }

    pub(crate) fn rays(&self) -> impl Iterator<Item = &RatVec> {
        self.rays.iter().map(|r| &r.v)
    }
}

/// Incremental constraints-to-generators conversion for a polyhedron in
/// `ℚ^dim`. Rows may be appended after generators have been read.
#[derive(Clone, Debug)]
pub struct DoubleDescription {
    dim: usize,
    cone: Cone,
}

impl DoubleDescription {
    /// Starts from all of `ℚ^dim`.
    pub fn new(dim: usize) -> Self {
        let mut cone = Cone::new(dim + 1);
        // homogenising coordinate t ≥ 0
        cone.add(&RatVec::unit(dim + 1, dim).scaled(&-Rational::one()));
        DoubleDescription { dim, cone }
    }

    pub fn add_constraint(&mut self, c: &Constraint) -> Result<()> {
        if c.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: c.dim(),
            });
        }
        let h = c.coeffs.concat(&RatVec::new(vec![-&c.rhs]));
        match c.relation {
            Relation::Le => self.cone.add(&h),
            Relation::Eq => {
                self.cone.add(&h);
                self.cone.add(&h.scaled(&-Rational::one()));
            }
            Relation::Lt => return Err(Error::StrictUnsupported("double description")),
        }
        Ok(())
    }

    pub fn generators(&self) -> GeneratorRep {
        let n = self.dim;
        let mut vertices = Vec::new();
        let mut rays = Vec::new();
        for v in self.cone.rays() {
            let t = &v[n];
            let x: RatVec = v.entries()[..n].iter().cloned().collect();
            if t.is_positive() {
                vertices.push(x.scaled(&t.recip()));
            } else {
                rays.push(x.primitive());
            }
        }
        if vertices.is_empty() {
            return GeneratorRep::default();
        }
        for l in self.cone.lines() {
            debug_assert!(l[n].is_zero());
            let x: RatVec = l.entries()[..n].iter().cloned().collect();
            let x = x.primitive();
            rays.push(x.scaled(&-Rational::one()));
            rays.push(x);
        }
        GeneratorRep { vertices, rays }
    }
}

pub(super) fn compute(p: &Polyhedron) -> GeneratorRep {
    let mut dd = DoubleDescription::new(p.dim());
    for c in p.constraints() {
        dd.add_constraint(c).expect("checked by caller");
    }
    dd.generators()
}

/// Facets of `conv(V) + cone(R)` from the polar cone
/// `{(a, β) | a·v ≤ β, a·r ≤ 0}`.
pub(super) fn to_constraints(dim: usize, gens: &GeneratorRep) -> Result<Polyhedron> {
    for g in gens.vertices.iter().chain(&gens.rays) {
        if g.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: g.dim(),
            });
        }
    }
    if gens.vertices.is_empty() {
        return Ok(Polyhedron::empty(dim));
    }
    let mut cone = Cone::new(dim + 1);
    for v in &gens.vertices {
        cone.add(&v.concat(&RatVec::new(vec![-Rational::one()])));
    }
    for r in &gens.rays {
        cone.add(&r.concat(&RatVec::new(vec![Rational::zero()])));
    }
    let split = |y: &RatVec| -> (RatVec, Rational) {
        (y.entries()[..dim].iter().cloned().collect(), y[dim].clone())
    };
    let mut cs = Vec::new();
    for l in cone.lines() {
        let (a, b) = split(l);
        if !a.is_zero() {
            cs.push(Constraint::eq(a, b));
        }
    }
    for r in cone.rays() {
        let (a, b) = split(r);
        if !a.is_zero() {
            cs.push(Constraint::le(a, b));
        }
    }
    Polyhedron::new(dim, cs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{frac, int};
    use proptest::prelude::*;

    fn le(coeffs: &[i64], rhs: i64) -> Constraint {
        Constraint::le(RatVec::from_ints(coeffs), int(rhs))
    }

    fn sorted(mut v: Vec<RatVec>) -> Vec<RatVec> {
        v.sort_by(|a, b| a.entries().cmp(b.entries()));
        v
    }

    #[test]
    fn unit_square() {
        let p = Polyhedron::new(
            2,
            vec![le(&[-1, 0], 0), le(&[0, -1], 0), le(&[1, 0], 1), le(&[0, 1], 1)],
        )
        .unwrap();
        let g = p.generators().unwrap();
        assert!(g.rays.is_empty());
        assert_eq!(
            sorted(g.vertices),
            vec![
                RatVec::from_ints(&[0, 0]),
                RatVec::from_ints(&[0, 1]),
                RatVec::from_ints(&[1, 0]),
                RatVec::from_ints(&[1, 1]),
            ]
        );
    }

    #[test]
    fn half_line_and_plane() {
        let p = Polyhedron::new(1, vec![le(&[-1], -2)]).unwrap();
        let g = p.generators().unwrap();
        assert_eq!(g.vertices, vec![RatVec::from_ints(&[2])]);
        assert_eq!(g.rays, vec![RatVec::from_ints(&[1])]);

        let g = Polyhedron::universe(2).generators().unwrap();
        assert_eq!(g.vertices, vec![RatVec::from_ints(&[0, 0])]);
        assert_eq!(g.rays.len(), 4);
    }

    #[test]
    fn empty_has_no_generators() {
        let g = Polyhedron::empty(3).generators().unwrap();
        assert!(g.is_empty() && g.rays.is_empty());
    }

    #[test]
    fn fractional_vertex() {
        // 2x <= 1, x >= 0
        let p = Polyhedron::new(1, vec![le(&[2], 1), le(&[-1], 0)]).unwrap();
        let g = p.generators().unwrap();
        assert_eq!(
            sorted(g.vertices),
            vec![RatVec::new(vec![int(0)]), RatVec::new(vec![frac(1, 2)])]
        );
    }

    #[test]
    fn round_trip_triangle() {
        let p = Polyhedron::new(2, vec![le(&[-1, 0], 0), le(&[0, -1], 0), le(&[1, 1], 2)])
            .unwrap();
        let q = Polyhedron::from_generators(2, &p.generators().unwrap()).unwrap();
        assert!(p.same_set(&q).unwrap());
    }

    #[test]
    fn equalities_come_back_as_lines() {
        let p = Polyhedron::new(
            2,
            vec![Constraint::eq(RatVec::from_ints(&[1, -1]), int(0)), le(&[1, 0], 3)],
        )
        .unwrap();
        let q = Polyhedron::from_generators(2, &p.generators().unwrap()).unwrap();
        assert!(p.same_set(&q).unwrap());
    }

    /// Every vertex from pairwise intersections of 2-D lines, checked for
    /// membership.
    fn brute_vertices(cs: &[(i64, i64, i64)]) -> Vec<RatVec> {
        let mut out: Vec<RatVec> = Vec::new();
        for i in 0..cs.len() {
            for j in i + 1..cs.len() {
                let (a1, b1, c1) = cs[i];
                let (a2, b2, c2) = cs[j];
                let det = a1 * b2 - a2 * b1;
                if det == 0 {
                    continue;
                }
                let x = frac(c1 * b2 - c2 * b1, det);
                let y = frac(a1 * c2 - a2 * c1, det);
                let ok = cs
                    .iter()
                    .all(|&(a, b, c)| int(a) * &x + int(b) * &y <= int(c));
                let v = RatVec::new(vec![x, y]);
                if ok && !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn bounded_vertices_match_brute_force(
            extra in proptest::collection::vec((-4i64..=4, -4i64..=4, -6i64..=6), 0..5)
        ) {
            // box keeps it bounded
            let mut cs = vec![(1, 0, 5), (-1, 0, 5), (0, 1, 5), (0, -1, 5)];
            cs.extend(extra.into_iter().filter(|&(a, b, _)| a != 0 || b != 0));
            let p = Polyhedron::new(
                2,
                cs.iter().map(|&(a, b, c)| le(&[a, b], c)).collect(),
            ).unwrap();
            let g = p.generators().unwrap();
            prop_assert!(g.rays.is_empty());
            prop_assert_eq!(sorted(g.vertices), sorted(brute_vertices(&cs)));
        }

        #[test]
        fn from_generators_round_trips(
            rows in proptest::collection::vec((-3i64..=3, -3i64..=3, -3i64..=3, -5i64..=5), 1..6)
        ) {
            let p = Polyhedron::new(
                3,
                rows.iter().map(|&(a, b, c, d)| le(&[a, b, c], d)).collect(),
            ).unwrap();
            let g = p.generators().unwrap();
            for v in &g.vertices {
                prop_assert!(p.contains(v));
            }
            let q = Polyhedron::from_generators(3, &g).unwrap();
            prop_assert!(p.same_set(&q).unwrap());
        }
    }
}
