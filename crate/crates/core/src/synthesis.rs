//! Multiphase ranking function synthesis.
//!
//! Nested ranking functions of a fixed depth are found with one LP: every
//! condition "g ≥ 0 over Q" is replaced by the existence of Farkas
//! multipliers, and the unknown coefficients of the components enter those
//! equations linearly. Since every multiphase ranking function can be turned
//! into a nested one of no greater depth, searching depths `1, 2, …` finds the
//! minimal multiphase depth over the rationals. Over the integers the same
//! search runs on the integer hull.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::loopmodel::{check_mlrf, check_nested, Domain, NestedCheck, RankTuple, SLCLoop, TupleKind};
use crate::lp::{Cmp, LinearProgram, LpOutcome, VarDomain};
use crate::numeric::{AffineFunc, RatVec, Rational};
use crate::polyhedra::{Constraint, FarkasCert, HullMethod, HullOptions, Polyhedron, Relation};

#[derive(Clone, Debug, PartialEq)]
pub enum NestedSynthesis {
    Found {
        tuple: RankTuple,
        /// One certificate per nested condition, as returned by
        /// [`check_nested`].
        certs: Vec<FarkasCert>,
        /// `Q` is empty and the empty tuple was returned.
        vacuous: bool,
    },
    NotFound,
}

/// Searches for a nested ranking function of depth exactly `d` over `Q`.
pub fn synth_nested(q: &Polyhedron, d: usize) -> Result<NestedSynthesis> {
    if d == 0 {
        return Err(Error::InvalidArgument("depth must be at least 1".into()));
    }
    if q.dim() % 2 != 0 {
        return Err(Error::DimensionMismatch {
            expected: q.dim() + 1,
            found: q.dim(),
        });
    }
    if q.has_strict() {
        return Err(Error::StrictUnsupported("synth_nested"));
    }
    let n = q.dim() / 2;
    if !q.is_feasible().is_feasible() {
        return Ok(NestedSynthesis::Found {
            tuple: RankTuple::new(Vec::new(), TupleKind::Nested),
            certs: Vec::new(),
            vacuous: true,
        });
    }

    let rows = q.inequality_rows()?;
    let m = rows.len();
    let width = n + 1;
    let coeff = |i: usize, l: usize| i * width + l;
    let constant = |i: usize| i * width + n;
    let mult = |c: usize, r: usize| d * width + c * m + r;
    let num_vars = d * width + (d + 1) * m;
    let mut domains = vec![VarDomain::Free; d * width];
    domains.resize(num_vars, VarDomain::NonNeg);
    let mut lp = LinearProgram::new(domains);

    // condition c: Σ_r y_r a_r + g.coeffs = 0 and Σ_r y_r b_r − g.const ≤ 0
    for c in 0..=d {
        for l in 0..2 * n {
            let mut terms: Vec<(usize, Rational)> = rows
                .iter()
                .enumerate()
                .filter(|(_, (a, _))| !a[l].is_zero())
                .map(|(r, (a, _))| (mult(c, r), a[l].clone()))
                .collect();
            let (pre, var) = (l < n, l % n);
            if c < d {
                // (Δf_c − 1) + f_{c−1}
                let sign = if pre { Rational::one() } else { -Rational::one() };
                terms.push((coeff(c, var), sign));
                if c > 0 && pre {
                    terms.push((coeff(c - 1, var), Rational::one()));
                }
            } else if pre {
                terms.push((coeff(d - 1, var), Rational::one()));
            }
            lp.add_sparse_row(&terms, Cmp::Eq, Rational::zero());
        }
        let mut terms: Vec<(usize, Rational)> = rows
            .iter()
            .enumerate()
            .filter(|(_, (_, b))| !b.is_zero())
            .map(|(r, (_, b))| (mult(c, r), b.clone()))
            .collect();
        let rhs = if c < d {
            if c > 0 {
                terms.push((constant(c - 1), -Rational::one()));
            }
            -Rational::one()
        } else {
            terms.push((constant(d - 1), -Rational::one()));
            Rational::zero()
        };
        lp.add_sparse_row(&terms, Cmp::Le, rhs);
    }

    let point = match lp.solve() {
        LpOutcome::Optimal { point, .. } => point,
        LpOutcome::Infeasible => return Ok(NestedSynthesis::NotFound),
        LpOutcome::Unbounded { .. } => unreachable!("no objective"),
    };
    let components = (0..d)
        .map(|i| {
            let cs: RatVec = (0..n).map(|l| point[coeff(i, l)].clone()).collect();
            AffineFunc::new(cs, point[constant(i)].clone())
        })
        .collect();
    let tuple = RankTuple::new(components, TupleKind::Nested);
    match check_nested(q, &tuple)? {
        NestedCheck::Valid(certs) => Ok(NestedSynthesis::Found {
            tuple,
            certs,
            vacuous: false,
        }),
        NestedCheck::Invalid { .. } => Err(Error::Certificate(
            "synthesized tuple fails the nested conditions".into(),
        )),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SynthesisStatus {
    Found {
        tuple: RankTuple,
        depth: usize,
        certs: Vec<FarkasCert>,
        vacuous: bool,
    },
    NotFoundUpToDepth(usize),
}

#[derive(Clone, Debug)]
pub struct SynthesisResult {
    pub status: SynthesisStatus,
    pub domain_used: Domain,
    pub hull_applied: bool,
    /// How the integer hull was obtained, when one was computed.
    pub hull_method: Option<HullMethod>,
    /// The polyhedron the tuple was synthesized for: `Q` or its integer hull.
    pub polyhedron: Polyhedron,
}

impl SynthesisResult {
    pub fn tuple(&self) -> Option<&RankTuple> {
        match &self.status {
            SynthesisStatus::Found { tuple, .. } => Some(tuple),
            SynthesisStatus::NotFoundUpToDepth(_) => None,
        }
    }

    pub fn is_found(&self) -> bool {
        self.tuple().is_some()
    }
}

/// `Q` with strict rows relaxed to `≤`. A ranking function for the closure
/// also ranks the loop.
fn closure(q: &Polyhedron) -> Polyhedron {
    let cs = q
        .constraints()
        .iter()
        .map(|c| match c.relation {
            Relation::Lt => Constraint::le(c.coeffs.clone(), c.rhs.clone()),
            _ => c.clone(),
        })
        .collect();
    Polyhedron::new(q.dim(), cs).expect("same dimension")
}

/// The polyhedron synthesis works on for `l`: the integer hull of `Q` for
/// integer loops, the closure of `Q` otherwise.
pub fn analysis_polyhedron(l: &SLCLoop, opts: &HullOptions) -> Result<(Polyhedron, Option<HullMethod>)> {
    let q = l.transition_polyhedron();
    match l.domain() {
        Domain::Integer => {
            let out = q.integer_hull_with(opts)?;
            Ok((out.polyhedron, Some(out.method)))
        }
        Domain::Rational => Ok((closure(&q), None)),
    }
}

/// Tries depths `1..=dmax` in order; the first success wins.
pub fn synth_mlrf(l: &SLCLoop, dmax: usize) -> Result<SynthesisResult> {
    synth_mlrf_with(l, dmax, &HullOptions::default())
}

pub fn synth_mlrf_with(l: &SLCLoop, dmax: usize, opts: &HullOptions) -> Result<SynthesisResult> {
    if dmax == 0 {
        return Err(Error::InvalidArgument("maximum depth must be at least 1".into()));
    }
    let (q, hull_method) = analysis_polyhedron(l, opts)?;
    synth_on(q, l.domain(), hull_method, dmax)
}

fn synth_on(q: Polyhedron, domain: Domain, hull_method: Option<HullMethod>, dmax: usize) -> Result<SynthesisResult> {
    let mut status = SynthesisStatus::NotFoundUpToDepth(dmax);
    for d in 1..=dmax {
        if let NestedSynthesis::Found { tuple, certs, vacuous } = synth_nested(&q, d)? {
            status = SynthesisStatus::Found {
                depth: tuple.depth(),
                tuple,
                certs,
                vacuous,
            };
            break;
        }
    }
    Ok(SynthesisResult {
        status,
        domain_used: domain,
        hull_applied: hull_method.is_some(),
        hull_method,
        polyhedron: q,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum LrfSynthesis {
    Found(AffineFunc),
    NotFound,
}

/// A linear ranking function, i.e. a nested one of depth one.
pub fn synth_lrf(l: &SLCLoop) -> Result<LrfSynthesis> {
    let r = synth_mlrf(l, 1)?;
    Ok(match r.status {
        SynthesisStatus::Found { tuple, .. } => LrfSynthesis::Found(
            tuple
                .components
                .into_iter()
                .next()
                .unwrap_or_else(|| AffineFunc::zero(l.n())),
        ),
        SynthesisStatus::NotFoundUpToDepth(_) => LrfSynthesis::NotFound,
    })
}

/// Drops components while the tuple stays a valid multiphase ranking
/// function, trying the lowest index first and restarting after each removal.
pub fn reduce_irredundant(q: &Polyhedron, tuple: &RankTuple) -> Result<RankTuple> {
    if !check_mlrf(q, tuple)?.is_valid() {
        return Err(Error::InvalidTuple {
            kind: "multiphase ranking function",
        });
    }
    let mut current = tuple.clone();
    'restart: loop {
        for i in 0..current.depth() {
            let mut candidate = current.clone();
            candidate.components.remove(i);
            if check_mlrf(q, &candidate)?.is_valid() {
                current = candidate;
                continue 'restart;
            }
        }
        return Ok(current);
    }
}

/// Turns a multiphase ranking function into a nested one of no greater
/// depth.
///
/// With `h = f_1 + 1`, the tail is a multiphase ranking function on
/// `Q' = Q ∩ {h ≤ 0}` and is converted recursively. Each condition of the
/// converted tail holds on `Q'`, so adding a nonnegative multiple of `h`
/// makes it hold on `Q`; these repairs run from the last component down.
/// The head becomes `μ·h`, and everything is divided by `μ` when `μ < 1`.
pub fn mlrf_to_nested(q: &Polyhedron, tuple: &RankTuple) -> Result<RankTuple> {
    let n = q.dim() / 2;
    tuple.check_dim(n)?;
    if q.has_strict() {
        return Err(Error::StrictUnsupported("mlrf_to_nested"));
    }
    if check_nested(q, tuple)?.is_valid() {
        return Ok(tuple.with_kind(TupleKind::Nested));
    }
    if !check_mlrf(q, tuple)?.is_valid() {
        return Err(Error::InvalidTuple {
            kind: "multiphase ranking function",
        });
    }
    let out = to_nested(q, &tuple.components)?;
    let out = RankTuple::new(out, TupleKind::Nested);
    if !check_nested(q, &out)?.is_valid() {
        return Err(Error::Certificate("converted tuple is not nested".into()));
    }
    Ok(out)
}

fn motzkin_weight(q: &Polyhedron, h: &AffineFunc, g: &AffineFunc) -> Result<Rational> {
    let w = q
        .motzkin_combine_strict(std::slice::from_ref(h), g)?
        .witness()
        .ok_or_else(|| Error::Certificate("no repair weight for a residual condition".into()))?;
    Ok(w.mus[0].clone())
}

fn to_nested(q: &Polyhedron, fs: &[AffineFunc]) -> Result<Vec<AffineFunc>> {
    if !q.is_feasible().is_feasible() {
        return Ok(Vec::new());
    }
    let Some((f1, tail)) = fs.split_first() else {
        return Err(Error::Certificate("empty tuple on a nonempty polyhedron".into()));
    };
    let head = f1.shifted(&Rational::one());
    let q_rest = q.with(Constraint::nonpos(&head.on_pre_state()))?;
    if !q_rest.is_feasible().is_feasible() {
        // head > 0 on Q, so it is a linear ranking function by itself
        return Ok(vec![head]);
    }
    let mut gs = to_nested(&q_rest, tail)?;
    let k = gs.len();
    if k == 0 {
        return Err(Error::Certificate("tail conversion came back empty".into()));
    }
    let h = head.on_pre_state();

    // last component nonnegative on Q
    let mu = motzkin_weight(q, &h, &gs[k - 1].on_pre_state())?;
    gs[k - 1] = &gs[k - 1] + &head.scaled(&mu);
    // (Δg_i − 1) + g_{i−1} ≥ 0 on Q, repairing g_{i−1}
    for i in (1..k).rev() {
        let cond = &gs[i].delta().shifted(&-Rational::one()) + &gs[i - 1].on_pre_state();
        let mu = motzkin_weight(q, &h, &cond)?;
        gs[i - 1] = &gs[i - 1] + &head.scaled(&mu);
    }
    // Δg_1 − 1 + μ·h ≥ 0 decides the weight of the head
    let cond = gs[0].delta().shifted(&-Rational::one());
    let mu = motzkin_weight(q, &h, &cond)?;
    if mu.is_zero() {
        return Ok(gs);
    }
    let mut out = Vec::with_capacity(k + 1);
    if mu < Rational::one() {
        let inv = mu.recip();
        out.push(head);
        out.extend(gs.iter().map(|g| g.scaled(&inv)));
    } else {
        out.push(head.scaled(&mu));
        out.extend(gs);
    }
    Ok(out)
}
