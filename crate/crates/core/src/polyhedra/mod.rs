//! Exact polyhedral engine.
//!
//! A [`Polyhedron`] is a finite list of affine constraints `a·x ≤ b`,
//! `a·x < b` or `a·x = b`. Feasibility and optimisation go through the exact
//! simplex in [`crate::lp`]; every claim that an affine function is
//! nonnegative over a polyhedron comes with a [`FarkasCert`] that is
//! recombined exactly before it is handed out.

mod generators;
mod hull;
pub(crate) mod lattice;

use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lp::{Cmp, LinearProgram, LpOutcome, Sense, VarDomain};
use crate::numeric::{AffineFunc, RatVec, Rational};

pub use generators::{DoubleDescription, GeneratorRep};
pub use hull::{HullMethod, HullOptions, HullOutcome};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Lt,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Lt => "<",
            Relation::Eq => "=",
        }
    }
}

/// `coeffs·x (≤ | < | =) rhs`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub coeffs: RatVec,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: RatVec, relation: Relation, rhs: Rational) -> Self {
        Constraint {
            coeffs,
            relation,
            rhs,
        }
    }

    pub fn le(coeffs: RatVec, rhs: Rational) -> Self {
        Self::new(coeffs, Relation::Le, rhs)
    }

    pub fn lt(coeffs: RatVec, rhs: Rational) -> Self {
        Self::new(coeffs, Relation::Lt, rhs)
    }

    pub fn eq(coeffs: RatVec, rhs: Rational) -> Self {
        Self::new(coeffs, Relation::Eq, rhs)
    }

    /// `f(x) ≥ 0`, written as `−λ·x ≤ λ0`.
    pub fn nonneg(f: &AffineFunc) -> Self {
        Self::le(f.coeffs().scaled(&-Rational::one()), f.constant().clone())
    }

    /// `f(x) ≤ 0`.
    pub fn nonpos(f: &AffineFunc) -> Self {
        Self::le(f.coeffs().clone(), -f.constant())
    }

    /// `f(x) < 0`.
    pub fn negative(f: &AffineFunc) -> Self {
        Self::lt(f.coeffs().clone(), -f.constant())
    }

    /// `f(x) > 0`.
    pub fn positive(f: &AffineFunc) -> Self {
        Self::lt(f.coeffs().scaled(&-Rational::one()), f.constant().clone())
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    pub fn is_strict(&self) -> bool {
        self.relation == Relation::Lt
    }

    /// The slack `b − a·x`; nonnegative exactly where a `≤` row holds.
    pub fn slack(&self) -> AffineFunc {
        AffineFunc::new(self.coeffs.scaled(&-Rational::one()), self.rhs.clone())
    }

    pub fn satisfied_by(&self, x: &[Rational]) -> bool {
        let lhs = self.coeffs.dot(x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Lt => lhs < self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }

    /// Renders as `x - 1/2*y <= r`, naming unnamed columns `v1, v2, …`.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayConstraint { c: self, names }
    }
}

struct DisplayConstraint<'a> {
    c: &'a Constraint,
    names: &'a [String],
}

impl fmt::Display for DisplayConstraint<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lhs = AffineFunc::new(self.c.coeffs.clone(), Rational::zero());
        let shown = lhs.display_with(self.names).to_string();
        write!(f, "{shown} {} {}", self.c.relation.symbol(), self.c.rhs)
    }
}

/// Result of a feasibility test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(RatVec),
    Infeasible,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }

    pub fn witness(&self) -> Option<&RatVec> {
        match self {
            Feasibility::Feasible(x) => Some(x),
            Feasibility::Infeasible => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Optimum {
    Optimal { value: Rational, point: RatVec },
    Unbounded { point: RatVec, ray: RatVec },
    Infeasible,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertKind {
    /// `f = Σ λ_i·(b_i − a_i·x) + c0` with `λ, c0 ≥ 0`.
    Implication,
    /// `Σ λ_i·a_i = 0` and `Σ λ_i·b_i < 0`: the polyhedron is empty, so any
    /// claim holds vacuously.
    Infeasibility,
}

/// Farkas multipliers, one per inequality row of the polyhedron (see
/// [`Polyhedron::inequality_rows`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCert {
    pub multipliers: RatVec,
    /// The leftover nonnegative constant `c0`.
    pub constant: Rational,
    pub kind: CertKind,
}

impl FarkasCert {
    pub fn is_vacuous(&self) -> bool {
        self.kind == CertKind::Infeasibility
    }

    /// Exact recombination check against `p` and the certified `f`.
    pub fn verify(&self, p: &Polyhedron, f: &AffineFunc) -> bool {
        let rows = match p.inequality_rows() {
            Ok(r) => r,
            Err(_) => return false,
        };
        if self.multipliers.dim() != rows.len() || f.dim() != p.dim() {
            return false;
        }
        if self.multipliers.iter().any(Signed::is_negative) || self.constant.is_negative() {
            return false;
        }
        let mut lin = RatVec::zeros(p.dim());
        let mut rhs = Rational::zero();
        for (lam, (a, b)) in self.multipliers.iter().zip(&rows) {
            if lam.is_zero() {
                continue;
            }
            for (acc, ai) in lin.iter_mut().zip(a.iter()) {
                *acc += lam * ai;
            }
            rhs += lam * b;
        }
        match self.kind {
            CertKind::Implication => {
                // f.coeffs = −Σ λ a,  f.const = Σ λ b + c0
                lin.iter().zip(f.coeffs().iter()).all(|(l, c)| -l == *c)
                    && rhs + &self.constant == *f.constant()
            }
            CertKind::Infeasibility => lin.is_zero() && rhs.is_negative(),
        }
    }
}

/// Answer of [`Polyhedron::implies_nonneg`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Implication {
    Holds(FarkasCert),
    /// A point of the polyhedron where the function is negative.
    Fails(RatVec),
}

impl Implication {
    pub fn holds(&self) -> bool {
        matches!(self, Implication::Holds(_))
    }
}

/// Nonnegative weights `μ_1..μ_{k−1}` such that `Σ μ_j f_j + f_k ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuWitness {
    pub mus: Vec<Rational>,
    /// The combined function `Σ μ_j f_j + f_k`.
    pub combined: AffineFunc,
    pub cert: FarkasCert,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Combination {
    Witness(MuWitness),
    NoWitness,
}

impl Combination {
    pub fn witness(self) -> Option<MuWitness> {
        match self {
            Combination::Witness(w) => Some(w),
            Combination::NoWitness => None,
        }
    }
}

#[derive(Clone, Debug, Default)]
struct Cache {
    feasibility: OnceLock<Feasibility>,
    implicit_equalities: OnceLock<Vec<usize>>,
    generators: OnceLock<GeneratorRep>,
}

/// A rational polyhedron `{ x ∈ ℚ^dim | constraints }`.
///
/// Cached facts (feasibility, implicit equalities, generators) are filled in
/// lazily and dropped by every constructor that changes the constraints.
#[derive(Clone, Debug)]
pub struct Polyhedron {
    dim: usize,
    constraints: Vec<Constraint>,
    cache: Cache,
}

impl PartialEq for Polyhedron {
    /// Syntactic equality of the constraint lists.
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.constraints == other.constraints
    }
}

impl Polyhedron {
    pub fn new(dim: usize, constraints: Vec<Constraint>) -> Result<Self> {
        if let Some(c) = constraints.iter().find(|c| c.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: c.dim(),
            });
        }
        Ok(Polyhedron {
            dim,
            constraints,
            cache: Cache::default(),
        })
    }

    /// All of `ℚ^dim`.
    pub fn universe(dim: usize) -> Self {
        Polyhedron {
            dim,
            constraints: Vec::new(),
            cache: Cache::default(),
        }
    }

    /// The canonical empty polyhedron `{0 ≤ −1}`.
    pub fn empty(dim: usize) -> Self {
        Polyhedron {
            dim,
            constraints: vec![Constraint::le(RatVec::zeros(dim), -Rational::one())],
            cache: Cache::default(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn has_strict(&self) -> bool {
        self.constraints.iter().any(Constraint::is_strict)
    }

    /// A copy with one more constraint.
    pub fn with(&self, c: Constraint) -> Result<Polyhedron> {
        let mut cs = self.constraints.clone();
        cs.push(c);
        Polyhedron::new(self.dim, cs)
    }

    pub fn with_all(&self, extra: impl IntoIterator<Item = Constraint>) -> Result<Polyhedron> {
        let mut cs = self.constraints.clone();
        cs.extend(extra);
        Polyhedron::new(self.dim, cs)
    }

    /// Both constraint lists together.
    pub fn intersect(&self, other: &Polyhedron) -> Result<Polyhedron> {
        self.with_all(other.constraints.iter().cloned())
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.dim && self.constraints.iter().all(|c| c.satisfied_by(x))
    }

    /// Non-strict rows as `(a, b)` meaning `a·x ≤ b`; each equality
    /// contributes `(a, b)` followed by `(−a, −b)`. Farkas multipliers are
    /// indexed by this list.
    pub fn inequality_rows(&self) -> Result<Vec<(RatVec, Rational)>> {
        let mut rows = Vec::with_capacity(self.constraints.len());
        for c in &self.constraints {
            match c.relation {
                Relation::Le => rows.push((c.coeffs.clone(), c.rhs.clone())),
                Relation::Eq => {
                    rows.push((c.coeffs.clone(), c.rhs.clone()));
                    rows.push((c.coeffs.scaled(&-Rational::one()), -&c.rhs));
                }
                Relation::Lt => return Err(Error::StrictUnsupported("inequality_rows")),
            }
        }
        Ok(rows)
    }

    fn lp_over_space(&self, extra_vars: usize) -> LinearProgram {
        let mut domains = vec![VarDomain::Free; self.dim];
        domains.extend(std::iter::repeat_n(VarDomain::NonNeg, extra_vars));
        LinearProgram::new(domains)
    }

    /// Decides feasibility; strict rows are satisfied strictly by the witness.
    pub fn is_feasible(&self) -> Feasibility {
        self.cache
            .feasibility
            .get_or_init(|| self.compute_feasibility())
            .clone()
    }

    fn compute_feasibility(&self) -> Feasibility {
        let n = self.dim;
        if !self.has_strict() {
            let mut lp = self.lp_over_space(0);
            for c in &self.constraints {
                let cmp = if c.relation == Relation::Eq {
                    Cmp::Eq
                } else {
                    Cmp::Le
                };
                lp.add_row(c.coeffs.to_vec(), cmp, c.rhs.clone());
            }
            return match lp.solve() {
                LpOutcome::Optimal { point, .. } => Feasibility::Feasible(point.into()),
                LpOutcome::Infeasible => Feasibility::Infeasible,
                LpOutcome::Unbounded { .. } => unreachable!("zero objective"),
            };
        }
        // max t  s.t. non-strict rows, a·x + t ≤ b on strict rows, t ≤ 1
        let mut domains = vec![VarDomain::Free; n + 1];
        domains[n] = VarDomain::Free;
        let mut lp = LinearProgram::new(domains);
        for c in &self.constraints {
            let mut row = c.coeffs.to_vec();
            row.push(Rational::zero());
            let cmp = match c.relation {
                Relation::Le => Cmp::Le,
                Relation::Eq => Cmp::Eq,
                Relation::Lt => {
                    row[n] = Rational::one();
                    Cmp::Le
                }
            };
            lp.add_row(row, cmp, c.rhs.clone());
        }
        let mut cap = vec![Rational::zero(); n + 1];
        cap[n] = Rational::one();
        lp.add_row(cap.clone(), Cmp::Le, Rational::one());
        lp.set_objective(cap, Sense::Maximize);
        match lp.solve() {
            LpOutcome::Optimal { value, mut point } if value.is_positive() => {
                point.truncate(n);
                Feasibility::Feasible(point.into())
            }
            LpOutcome::Optimal { .. } | LpOutcome::Infeasible => Feasibility::Infeasible,
            LpOutcome::Unbounded { .. } => unreachable!("t is capped"),
        }
    }

    /// Exact optimum of `objective` over the polyhedron.
    pub fn optimize(&self, objective: &AffineFunc, sense: Sense) -> Result<Optimum> {
        self.check_dim(objective.dim())?;
        if self.has_strict() {
            return Err(Error::StrictUnsupported("optimize"));
        }
        let mut lp = self.lp_over_space(0);
        for c in &self.constraints {
            let cmp = if c.relation == Relation::Eq {
                Cmp::Eq
            } else {
                Cmp::Le
            };
            lp.add_row(c.coeffs.to_vec(), cmp, c.rhs.clone());
        }
        lp.set_objective(objective.coeffs().to_vec(), sense);
        Ok(match lp.solve() {
            LpOutcome::Optimal { value, point } => Optimum::Optimal {
                value: value + objective.constant(),
                point: point.into(),
            },
            LpOutcome::Unbounded { point, ray } => Optimum::Unbounded {
                point: point.into(),
                ray: ray.into(),
            },
            LpOutcome::Infeasible => Optimum::Infeasible,
        })
    }

    /// Decides `∀x ∈ P: f(x) ≥ 0`.
    ///
    /// The primal side minimises `f`; when the minimum is nonnegative the
    /// Farkas multipliers are found by a separate LP and recombined exactly.
    /// An empty polyhedron yields a vacuous certificate.
    pub fn implies_nonneg(&self, f: &AffineFunc) -> Result<Implication> {
        self.check_dim(f.dim())?;
        if self.has_strict() {
            return Err(Error::StrictUnsupported("implies_nonneg"));
        }
        match self.optimize(f, Sense::Minimize)? {
            Optimum::Infeasible => {
                let cert = self.infeasibility_certificate()?;
                Ok(Implication::Holds(cert))
            }
            Optimum::Unbounded { point, ray } => {
                // walk along the ray until f reaches −1
                let at = f.eval(&point)?;
                let slope = f.coeffs().dot(&ray);
                debug_assert!(slope.is_negative());
                let mut t = (at + Rational::one()) / -slope;
                if t.is_negative() {
                    t = Rational::zero();
                }
                let x = &point + &ray.scaled(&t);
                Ok(Implication::Fails(x))
            }
            Optimum::Optimal { value, point } => {
                if value.is_negative() {
                    return Ok(Implication::Fails(point));
                }
                let cert = self.farkas_certificate(f)?;
                Ok(Implication::Holds(cert))
            }
        }
    }

    /// `y ≥ 0` with `yᵀA = −λ` and `yᵀb ≤ λ0`.
    fn farkas_certificate(&self, f: &AffineFunc) -> Result<FarkasCert> {
        let rows = self.inequality_rows()?;
        let m = rows.len();
        let mut lp = LinearProgram::new(vec![VarDomain::NonNeg; m]);
        for l in 0..self.dim {
            let coeffs = rows.iter().map(|(a, _)| a[l].clone()).collect();
            lp.add_row(coeffs, Cmp::Eq, -&f.coeffs()[l]);
        }
        lp.add_row(
            rows.iter().map(|(_, b)| b.clone()).collect(),
            Cmp::Le,
            f.constant().clone(),
        );
        let LpOutcome::Optimal { point, .. } = lp.solve() else {
            return Err(Error::Certificate(
                "no Farkas multipliers for a nonnegative minimum".into(),
            ));
        };
        let combined = rows
            .iter()
            .zip(&point)
            .fold(Rational::zero(), |acc, ((_, b), y)| acc + y * b);
        let cert = FarkasCert {
            multipliers: point.into(),
            constant: f.constant() - combined,
            kind: CertKind::Implication,
        };
        if !cert.verify(self, f) {
            return Err(Error::Certificate("Farkas recombination mismatch".into()));
        }
        Ok(cert)
    }

    /// `y ≥ 0` with `yᵀA = 0`, `yᵀb ≤ −1`.
    fn infeasibility_certificate(&self) -> Result<FarkasCert> {
        let rows = self.inequality_rows()?;
        let m = rows.len();
        let mut lp = LinearProgram::new(vec![VarDomain::NonNeg; m]);
        for l in 0..self.dim {
            lp.add_row(
                rows.iter().map(|(a, _)| a[l].clone()).collect(),
                Cmp::Eq,
                Rational::zero(),
            );
        }
        lp.add_row(
            rows.iter().map(|(_, b)| b.clone()).collect(),
            Cmp::Le,
            -Rational::one(),
        );
        let LpOutcome::Optimal { point, .. } = lp.solve() else {
            return Err(Error::Certificate(
                "empty polyhedron without an infeasibility certificate".into(),
            ));
        };
        let cert = FarkasCert {
            multipliers: point.into(),
            constant: Rational::zero(),
            kind: CertKind::Infeasibility,
        };
        if !cert.verify(self, &AffineFunc::zero(self.dim)) {
            return Err(Error::Certificate("infeasibility certificate mismatch".into()));
        }
        Ok(cert)
    }

    /// Weights `μ ≥ 0` making `Σ μ_j f_j + f_k` nonnegative over `P`, for the
    /// premise `f_1 > 0 ∨ … ∨ f_{k−1} > 0 ∨ f_k ≥ 0`.
    ///
    /// The weight of `f_k` is fixed to one and the multiplier system is solved
    /// as an LP; `NoWitness` means no such weights exist.
    pub fn motzkin_combine_strict(&self, fs: &[AffineFunc], fk: &AffineFunc) -> Result<Combination> {
        self.combine(fs, fk, false)
    }

    /// Weights with `μ_k = 1` making `μ_1 f_1 + … + μ_{k−1} f_{k−1} + f_k`
    /// nonnegative over `P`, for the premise `f_1 ≥ 0 ∨ … ∨ f_k ≥ 0`.
    pub fn conic_combine_nonneg(&self, fs: &[AffineFunc]) -> Result<Combination> {
        let Some((fk, rest)) = fs.split_last() else {
            return Err(Error::Internal("conic combination of no functions".into()));
        };
        self.combine(rest, fk, false)
    }

    /// Like [`motzkin_combine_strict`](Self::motzkin_combine_strict) but
    /// maximising the last weight `μ_{k−1}` under the cap `μ_{k−1} ≤ 1`.
    pub fn combine_maximizing_last(&self, fs: &[AffineFunc], fk: &AffineFunc) -> Result<Combination> {
        self.combine(fs, fk, true)
    }

    fn combine(&self, fs: &[AffineFunc], fk: &AffineFunc, maximize_last: bool) -> Result<Combination> {
        self.check_dim(fk.dim())?;
        for f in fs {
            self.check_dim(f.dim())?;
        }
        if self.has_strict() {
            return Err(Error::StrictUnsupported("combine"));
        }
        if !self.is_feasible().is_feasible() {
            return Err(Error::EmptyPolyhedron);
        }
        let rows = self.inequality_rows()?;
        let k = fs.len();
        let m = rows.len();
        // unknowns: μ_1..μ_{k−1}, then y_1..y_m
        let mut lp = LinearProgram::new(vec![VarDomain::NonNeg; k + m]);
        for l in 0..self.dim {
            let mut row: Vec<Rational> = fs.iter().map(|f| f.coeffs()[l].clone()).collect();
            row.extend(rows.iter().map(|(a, _)| a[l].clone()));
            lp.add_row(row, Cmp::Eq, -&fk.coeffs()[l]);
        }
        let mut row: Vec<Rational> = fs.iter().map(|f| -f.constant()).collect();
        row.extend(rows.iter().map(|(_, b)| b.clone()));
        lp.add_row(row, Cmp::Le, fk.constant().clone());
        if maximize_last && k > 0 {
            let mut cap = vec![Rational::zero(); k + m];
            cap[k - 1] = Rational::one();
            lp.add_row(cap.clone(), Cmp::Le, Rational::one());
            lp.set_objective(cap, Sense::Maximize);
        }
        let point = match lp.solve() {
            LpOutcome::Optimal { point, .. } => point,
            LpOutcome::Infeasible => return Ok(Combination::NoWitness),
            LpOutcome::Unbounded { .. } => unreachable!("bounded or zero objective"),
        };
        let mus: Vec<Rational> = point[..k].to_vec();
        let combined = fs
            .iter()
            .zip(&mus)
            .fold(fk.clone(), |acc, (f, mu)| &acc + &f.scaled(mu));
        match self.implies_nonneg(&combined)? {
            Implication::Holds(cert) => Ok(Combination::Witness(MuWitness {
                mus,
                combined,
                cert,
            })),
            Implication::Fails(_) => Err(Error::Certificate(
                "combined function is not nonnegative".into(),
            )),
        }
    }

    /// Indices of constraints that hold with equality on every point:
    /// `=` rows plus `≤` rows whose reverse inequality is implied.
    pub fn implicit_equalities(&self) -> Result<Vec<usize>> {
        if let Some(v) = self.cache.implicit_equalities.get() {
            return Ok(v.clone());
        }
        if self.has_strict() {
            return Err(Error::StrictUnsupported("implicit_equalities"));
        }
        let mut eqs = Vec::new();
        for (i, c) in self.constraints.iter().enumerate() {
            match c.relation {
                Relation::Eq => eqs.push(i),
                Relation::Le => {
                    // a·x ≥ b  ⟺  a·x − b ≥ 0
                    let reverse = AffineFunc::new(c.coeffs.clone(), -&c.rhs);
                    if self.implies_nonneg(&reverse)?.holds() {
                        eqs.push(i);
                    }
                }
                Relation::Lt => unreachable!(),
            }
        }
        let _ = self.cache.implicit_equalities.set(eqs.clone());
        Ok(eqs)
    }

    /// Vertices and rays with `conv(vertices) + cone(rays) = P`.
    pub fn generators(&self) -> Result<GeneratorRep> {
        if let Some(g) = self.cache.generators.get() {
            return Ok(g.clone());
        }
        if self.has_strict() {
            return Err(Error::StrictUnsupported("generators"));
        }
        let g = generators::compute(self);
        let _ = self.cache.generators.set(g.clone());
        Ok(g)
    }

    /// Constraint representation of `conv(vertices) + cone(rays)`.
    pub fn from_generators(dim: usize, gens: &GeneratorRep) -> Result<Polyhedron> {
        generators::to_constraints(dim, gens)
    }

    /// The integer hull `conv(P ∩ ℤ^dim)` with default options.
    pub fn integer_hull(&self) -> Result<Polyhedron> {
        Ok(hull::integer_hull(self, &HullOptions::default())?.polyhedron)
    }

    pub fn integer_hull_with(&self, opts: &HullOptions) -> Result<HullOutcome> {
        hull::integer_hull(self, opts)
    }

    /// Mutual containment, decided row by row.
    pub fn same_set(&self, other: &Polyhedron) -> Result<bool> {
        Ok(self.subset_of(other)? && other.subset_of(self)?)
    }

    /// `self ⊆ other`: no point of `self` violates a row of `other`.
    pub fn subset_of(&self, other: &Polyhedron) -> Result<bool> {
        self.check_dim(other.dim)?;
        for c in &other.constraints {
            let neg = c.coeffs.scaled(&-Rational::one());
            let violations = match c.relation {
                Relation::Le => vec![Constraint::lt(neg, -&c.rhs)],
                Relation::Lt => vec![Constraint::le(neg, -&c.rhs)],
                Relation::Eq => vec![
                    Constraint::lt(neg, -&c.rhs),
                    Constraint::lt(c.coeffs.clone(), c.rhs.clone()),
                ],
            };
            for v in violations {
                if self.with(v)?.is_feasible().is_feasible() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Drops `≤` rows implied by the remaining ones (first to last).
    pub fn without_redundant(&self) -> Result<Polyhedron> {
        if self.has_strict() {
            return Err(Error::StrictUnsupported("without_redundant"));
        }
        if !self.is_feasible().is_feasible() {
            return Ok(Polyhedron::empty(self.dim));
        }
        let mut kept = self.constraints.clone();
        let mut i = 0;
        while i < kept.len() {
            let c = kept[i].clone();
            let trivially = c.coeffs.is_zero() && (c.relation != Relation::Eq || c.rhs.is_zero());
            let others: Vec<Constraint> = kept
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, c)| c.clone())
                .collect();
            let rest = Polyhedron::new(self.dim, others.clone())?;
            let redundant = trivially
                || match c.relation {
                    Relation::Le => rest.implies_nonneg(&c.slack())?.holds(),
                    Relation::Eq => {
                        rest.implies_nonneg(&c.slack())?.holds()
                            && rest.implies_nonneg(&(-&c.slack()))?.holds()
                    }
                    Relation::Lt => unreachable!(),
                };
            if redundant {
                kept = others;
            } else {
                i += 1;
            }
        }
        Polyhedron::new(self.dim, kept)
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: d,
            })
        } else {
            Ok(())
        }
    }

    /// One constraint per line in `c1*v1 + c2*v2 <= r` form.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayPoly { p: self, names }
    }
}

struct DisplayPoly<'a> {
    p: &'a Polyhedron,
    names: &'a [String],
}

impl fmt::Display for DisplayPoly<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.p.constraints {
            writeln!(f, "{}", c.display_with(self.names))?;
        }
        Ok(())
    }
}

impl fmt::Display for Polyhedron {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display_with(&[]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{frac, int};

    fn le(coeffs: &[i64], rhs: i64) -> Constraint {
        Constraint::le(RatVec::from_ints(coeffs), int(rhs))
    }

    fn poly(dim: usize, cs: Vec<Constraint>) -> Polyhedron {
        Polyhedron::new(dim, cs).unwrap()
    }

    #[test]
    fn contradictory_rows_are_infeasible() {
        let p = poly(1, vec![le(&[0], -1)]);
        assert_eq!(p.is_feasible(), Feasibility::Infeasible);
        // x >= 0 and x < 0
        let p = poly(
            1,
            vec![le(&[-1], 0), Constraint::lt(RatVec::from_ints(&[1]), int(0))],
        );
        assert_eq!(p.is_feasible(), Feasibility::Infeasible);
    }

    #[test]
    fn strict_witness_is_strict() {
        // 0 < x < 1/3
        let p = poly(
            1,
            vec![
                Constraint::lt(RatVec::from_ints(&[-1]), int(0)),
                Constraint::lt(RatVec::from_ints(&[3]), int(1)),
            ],
        );
        let x = p.is_feasible().witness().cloned().unwrap();
        assert!(x[0] > int(0) && x[0] < frac(1, 3));
        assert!(p.contains(&x));
    }

    #[test]
    fn optimize_examples() {
        let p = poly(1, vec![le(&[-1], -3)]);
        let x = AffineFunc::from_ints(&[1], 0);
        assert_eq!(
            p.optimize(&x, Sense::Minimize).unwrap(),
            Optimum::Optimal {
                value: int(3),
                point: RatVec::from_ints(&[3])
            }
        );
        let p = poly(1, vec![le(&[1], 3)]);
        match p.optimize(&x, Sense::Minimize).unwrap() {
            Optimum::Unbounded { ray, .. } => assert_eq!(ray, RatVec::from_ints(&[-1])),
            other => panic!("{other:?}"),
        }
        let strict = poly(1, vec![Constraint::lt(RatVec::from_ints(&[1]), int(0))]);
        assert!(matches!(
            strict.optimize(&x, Sense::Minimize),
            Err(Error::StrictUnsupported(_))
        ));
    }

    #[test]
    fn implies_nonneg_examples() {
        let p = poly(1, vec![le(&[-1], -1)]); // x >= 1
        match p.implies_nonneg(&AffineFunc::from_ints(&[1], -1)).unwrap() {
            Implication::Holds(cert) => {
                assert_eq!(cert.multipliers, RatVec::from_ints(&[1]));
                assert_eq!(cert.constant, int(0));
            }
            other => panic!("{other:?}"),
        }
        let neg_x = AffineFunc::from_ints(&[-1], 0);
        match p.implies_nonneg(&neg_x).unwrap() {
            Implication::Fails(x) => {
                assert_eq!(x, RatVec::from_ints(&[1]));
                assert!(p.contains(&x));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unbounded_counterexample_lies_in_polyhedron() {
        // x <= 0, f = x + 10 fails far out along the ray
        let p = poly(1, vec![le(&[1], 0)]);
        let f = AffineFunc::from_ints(&[1], 10);
        match p.implies_nonneg(&f).unwrap() {
            Implication::Fails(x) => {
                assert!(p.contains(&x));
                assert!(f.eval(&x).unwrap() < int(0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_polyhedron_gives_vacuous_certificate() {
        let p = poly(2, vec![le(&[1, 0], 0), le(&[-1, 0], -1)]);
        match p.implies_nonneg(&AffineFunc::from_ints(&[0, 0], -5)).unwrap() {
            Implication::Holds(cert) => {
                assert!(cert.is_vacuous());
                assert!(cert.verify(&p, &AffineFunc::zero(2)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equalities_expand_into_two_rows() {
        let p = poly(
            2,
            vec![Constraint::eq(RatVec::from_ints(&[1, -1]), int(0)), le(&[-1, 0], 0)],
        );
        // y >= 0 follows from x = y, x >= 0
        let f = AffineFunc::from_ints(&[0, 1], 0);
        let Implication::Holds(cert) = p.implies_nonneg(&f).unwrap() else {
            panic!()
        };
        assert_eq!(cert.multipliers.dim(), 3);
        assert!(cert.verify(&p, &f));
    }

    #[test]
    fn motzkin_degenerate_and_zero_weight() {
        let p = poly(1, vec![le(&[-1], 0)]);
        let w = p
            .motzkin_combine_strict(&[], &AffineFunc::from_ints(&[1], 0))
            .unwrap()
            .witness()
            .unwrap();
        assert!(w.mus.is_empty());

        // x <= -1: −x − 1 ≥ 0 already, so μ must be 0
        let p = poly(1, vec![le(&[1], -1)]);
        let w = p
            .motzkin_combine_strict(
                &[AffineFunc::from_ints(&[1], 0)],
                &AffineFunc::from_ints(&[-1], -1),
            )
            .unwrap()
            .witness()
            .unwrap();
        assert_eq!(w.mus, vec![int(0)]);
    }

    #[test]
    fn conic_examples() {
        let p = poly(1, vec![le(&[-1], 0)]);
        let w = p
            .conic_combine_nonneg(&[AffineFunc::from_ints(&[1], 0)])
            .unwrap()
            .witness()
            .unwrap();
        assert!(w.mus.is_empty());

        let p = poly(2, vec![le(&[-1, -1], 0)]); // x + y >= 0
        let w = p
            .conic_combine_nonneg(&[
                AffineFunc::from_ints(&[1, 0], 0),
                AffineFunc::from_ints(&[0, 1], 0),
            ])
            .unwrap()
            .witness()
            .unwrap();
        assert_eq!(w.mus, vec![int(1)]);
        assert!(w.cert.verify(&p, &w.combined));
    }

    #[test]
    fn combine_requires_nonempty() {
        let p = Polyhedron::empty(1);
        assert!(matches!(
            p.conic_combine_nonneg(&[AffineFunc::from_ints(&[1], 0)]),
            Err(Error::EmptyPolyhedron)
        ));
    }

    #[test]
    fn no_witness_when_premise_fails() {
        // over all of ℚ, neither x nor −x − 1 ≥ 0 everywhere, and no μ helps
        let p = Polyhedron::universe(1);
        let r = p
            .motzkin_combine_strict(
                &[AffineFunc::from_ints(&[1], 0)],
                &AffineFunc::from_ints(&[1], -1),
            )
            .unwrap();
        assert_eq!(r, Combination::NoWitness);
    }

    #[test]
    fn implicit_equalities_detected() {
        // x <= 1, x >= 1, y <= 5
        let p = poly(2, vec![le(&[1, 0], 1), le(&[-1, 0], -1), le(&[0, 1], 5)]);
        assert_eq!(p.implicit_equalities().unwrap(), vec![0, 1]);
    }

    #[test]
    fn redundancy_removal() {
        let p = poly(1, vec![le(&[1], 3), le(&[1], 5), le(&[-1], 0)]);
        let r = p.without_redundant().unwrap();
        assert_eq!(r.constraints(), &[le(&[1], 3), le(&[-1], 0)]);
    }

    #[test]
    fn debug_dump_format() {
        let p = poly(2, vec![Constraint::le(RatVec::new(vec![frac(1, 2), int(-1)]), int(3))]);
        let names = vec!["x".to_string(), "y".to_string()];
        assert_eq!(p.display_with(&names).to_string(), "1/2*x - y <= 3\n");
        assert_eq!(p.to_string(), "1/2*v1 - v2 <= 3\n");
    }
}
