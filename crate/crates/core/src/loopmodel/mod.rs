//! Single-path linear-constraint loops and ranking tuples.
//!
//! A loop over `n` variables has a guard over `x` and an update relation over
//! `(x, x')`. Its transition polyhedron `Q ⊆ ℚ^{2n}` holds the guard rows
//! padded with zeros on the primed half, followed by the update rows.

mod parse;

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numeric::{AffineFunc, RatVec, Rational};
use crate::polyhedra::{Constraint, FarkasCert, Implication, Polyhedron, Relation};

pub use parse::{parse_affine, parse_loop, parse_tuple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Domain {
    #[default]
    Rational,
    Integer,
}

impl Domain {
    pub fn short_name(self) -> &'static str {
        match self {
            Domain::Rational => "rat",
            Domain::Integer => "int",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SLCLoop {
    var_names: Vec<String>,
    guard: Vec<Constraint>,
    update: Vec<Constraint>,
    domain: Domain,
}

impl SLCLoop {
    /// Guard rows must have dimension `n`, update rows `2n`.
    pub fn new(
        var_names: Vec<String>,
        guard: Vec<Constraint>,
        update: Vec<Constraint>,
        domain: Domain,
    ) -> Result<Self> {
        let n = var_names.len();
        if n == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        for c in &guard {
            if c.dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.dim(),
                });
            }
        }
        for c in &update {
            if c.dim() != 2 * n {
                return Err(Error::DimensionMismatch {
                    expected: 2 * n,
                    found: c.dim(),
                });
            }
        }
        Ok(SLCLoop {
            var_names,
            guard,
            update,
            domain,
        })
    }

    pub fn n(&self) -> usize {
        self.var_names.len()
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    /// `x`, then `x'` for every variable.
    pub fn transition_names(&self) -> Vec<String> {
        let mut names = self.var_names.clone();
        names.extend(self.var_names.iter().map(|v| format!("{v}'")));
        names
    }

    pub fn guard(&self) -> &[Constraint] {
        &self.guard
    }

    pub fn update(&self) -> &[Constraint] {
        &self.update
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn with_domain(&self, domain: Domain) -> SLCLoop {
        SLCLoop {
            domain,
            ..self.clone()
        }
    }

    /// The guard as a polyhedron over `x`.
    pub fn guard_polyhedron(&self) -> Polyhedron {
        Polyhedron::new(self.n(), self.guard.clone()).expect("validated")
    }

    pub fn guard_holds(&self, x: &[Rational]) -> bool {
        self.guard.iter().all(|c| c.satisfied_by(x))
    }

    /// `Q` over `(x, x')`.
    pub fn transition_polyhedron(&self) -> Polyhedron {
        transition_polyhedron(self)
    }

    /// The update as `x'_i = e_i(x)` when every primed variable is defined by
    /// exactly one equality and appears nowhere else.
    pub fn deterministic_update(&self) -> Result<Vec<AffineFunc>> {
        let n = self.n();
        let rows = &self.update;
        let mut used = vec![false; rows.len()];
        let mut defs: Vec<Option<AffineFunc>> = vec![None; n];
        for i in 0..rows.len() {
            if used[i] {
                continue;
            }
            let r = &rows[i];
            let primed: Vec<usize> = (n..2 * n).filter(|&j| !r.coeffs[j].is_zero()).collect();
            if primed.is_empty() {
                return Err(Error::Nondeterministic(
                    "update row without primed variables".into(),
                ));
            }
            let (a, b) = match r.relation {
                Relation::Eq => (r.coeffs.clone(), r.rhs.clone()),
                Relation::Le => {
                    let neg = r.coeffs.scaled(&-Rational::one());
                    let partner = (i + 1..rows.len()).find(|&j| {
                        !used[j]
                            && rows[j].relation == Relation::Le
                            && rows[j].coeffs == neg
                            && rows[j].rhs == -&r.rhs
                    });
                    match partner {
                        Some(j) => {
                            used[j] = true;
                            (r.coeffs.clone(), r.rhs.clone())
                        }
                        None => {
                            return Err(Error::Nondeterministic(format!(
                                "inequality on {}",
                                self.transition_names()[primed[0]]
                            )))
                        }
                    }
                }
                Relation::Lt => {
                    return Err(Error::Nondeterministic("strict update row".into()));
                }
            };
            used[i] = true;
            if primed.len() != 1 {
                return Err(Error::Nondeterministic(
                    "equality mentions several primed variables".into(),
                ));
            }
            let p = primed[0];
            let k = p - n;
            if defs[k].is_some() {
                return Err(Error::Nondeterministic(format!(
                    "{}' defined twice",
                    self.var_names[k]
                )));
            }
            // c·x' + a·x = b  ⟹  x' = (b − a·x)/c
            let c = a[p].clone();
            let coeffs: RatVec = (0..n).map(|j| -&a[j] / &c).collect();
            defs[k] = Some(AffineFunc::new(coeffs, b / c));
        }
        defs.into_iter()
            .enumerate()
            .map(|(k, d)| {
                d.ok_or_else(|| {
                    Error::Nondeterministic(format!("{}' is not defined", self.var_names[k]))
                })
            })
            .collect()
    }
}

impl fmt::Display for SLCLoop {
    /// The loop file format.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars {}", self.var_names.join(" "))?;
        if self.domain == Domain::Integer {
            writeln!(f, "domain int")?;
        }
        let names = self.transition_names();
        for c in &self.guard {
            writeln!(f, "guard {}", source_form(c, &self.var_names))?;
        }
        for c in &self.update {
            writeln!(f, "update {}", source_form(c, &names))?;
        }
        Ok(())
    }
}

fn source_form(c: &Constraint, names: &[String]) -> String {
    let lhs = AffineFunc::new(c.coeffs.clone(), Rational::zero());
    format!(
        "{} {} {}",
        lhs.display_with(names),
        c.relation.symbol(),
        c.rhs
    )
}

/// Guard rows padded with zeros on the primed half, then the update rows.
pub fn transition_polyhedron(l: &SLCLoop) -> Polyhedron {
    let n = l.n();
    let mut cs: Vec<Constraint> = l
        .guard
        .iter()
        .map(|c| Constraint::new(c.coeffs.concat(&RatVec::zeros(n)), c.relation, c.rhs.clone()))
        .collect();
    cs.extend(l.update.iter().cloned());
    Polyhedron::new(2 * n, cs).expect("validated")
}

/// A point `(x, x')` of `ℚ^{2n}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionPoint {
    pub values: RatVec,
}

impl TransitionPoint {
    pub fn new(values: RatVec) -> Self {
        debug_assert!(values.dim() % 2 == 0);
        TransitionPoint { values }
    }

    pub fn n(&self) -> usize {
        self.values.dim() / 2
    }

    pub fn pre(&self) -> &[Rational] {
        &self.values[..self.n()]
    }

    pub fn post(&self) -> &[Rational] {
        &self.values[self.n()..]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TupleKind {
    Mlrf,
    Nested,
    BmsLlrf,
    WeakBmsLlrf,
}

/// `⟨f_1, …, f_d⟩` over the `n` loop variables. The empty tuple is allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankTuple {
    pub components: Vec<AffineFunc>,
    pub kind: TupleKind,
}

impl RankTuple {
    pub fn new(components: Vec<AffineFunc>, kind: TupleKind) -> Self {
        RankTuple { components, kind }
    }

    pub fn depth(&self) -> usize {
        self.components.len()
    }

    pub fn with_kind(&self, kind: TupleKind) -> RankTuple {
        RankTuple {
            components: self.components.clone(),
            kind,
        }
    }

    pub fn check_dim(&self, n: usize) -> Result<()> {
        match self.components.iter().find(|f| f.dim() != n) {
            Some(f) => Err(Error::DimensionMismatch {
                expected: n,
                found: f.dim(),
            }),
            None => Ok(()),
        }
    }

    /// `⟨f_1, f_2⟩`-style rendering.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayTuple { t: self, names }
    }

    /// The tuple file format, one `component` line per entry.
    pub fn to_source(&self, names: &[String]) -> String {
        self.components
            .iter()
            .map(|f| format!("component {}\n", f.display_with(names)))
            .collect()
    }
}

struct DisplayTuple<'a> {
    t: &'a RankTuple,
    names: &'a [String],
}

impl fmt::Display for DisplayTuple<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, c) in self.t.components.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", c.display_with(self.names))?;
        }
        write!(f, ">")
    }
}

/// Which part of the multiphase condition failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MlrfFailure {
    /// Component `i` (1-based) decreases by less than required on a transition
    /// where all earlier components are negative.
    Decrease(usize),
    /// Every component is negative on the transition.
    AllNegative,
}

#[derive(Clone, Debug, PartialEq)]
pub enum MlrfCheck {
    Valid,
    Invalid {
        /// `Q` with the earlier components negative; may contain strict rows.
        residual: Polyhedron,
        witness: TransitionPoint,
        failure: MlrfFailure,
    },
}

impl MlrfCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, MlrfCheck::Valid)
    }
}

/// Decides whether `tuple` is a multiphase ranking function for `Q`.
///
/// A transition is ranked by `i` when `Δf_j ≥ 1` for `j ≤ i`, `f_i ≥ 0` and
/// `f_j ≤ 0` for `j < i`. Equivalently, for each `i` the transitions with
/// `f_1, …, f_{i−1} < 0` must satisfy `Δf_i ≥ 1`, and no transition has every
/// component negative. Each step is one mixed strict feasibility test.
pub fn check_mlrf(q: &Polyhedron, tuple: &RankTuple) -> Result<MlrfCheck> {
    check_mlrf_with(q, tuple, Decrease::AtLeastOne)
}

/// How much a ranking component must drop on a transition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Decrease {
    /// `Δf ≥ 1`.
    #[default]
    AtLeastOne,
    /// `Δf > 0`. Over the rationals this admits tuples whose decrease tends
    /// to zero, which no rescaling turns into `Δf ≥ 1`.
    Positive,
}

/// [`check_mlrf`] with a choice of decrease condition.
pub fn check_mlrf_with(q: &Polyhedron, tuple: &RankTuple, decrease: Decrease) -> Result<MlrfCheck> {
    let n = half_dim(q)?;
    tuple.check_dim(n)?;
    let mut residual = q.clone();
    for (i, f) in tuple.components.iter().enumerate() {
        let slow = match decrease {
            // Δf < 1  ⟺  f(x) − f(x') − 1 < 0
            Decrease::AtLeastOne => Constraint::negative(&f.delta().shifted(&-Rational::one())),
            Decrease::Positive => Constraint::nonpos(&f.delta()),
        };
        let bad = residual.with(slow)?;
        if let Some(w) = bad.is_feasible().witness() {
            return Ok(MlrfCheck::Invalid {
                residual,
                witness: TransitionPoint::new(w.clone()),
                failure: MlrfFailure::Decrease(i + 1),
            });
        }
        residual = residual.with(Constraint::negative(&f.on_pre_state()))?;
    }
    match residual.is_feasible().witness() {
        Some(w) => Ok(MlrfCheck::Invalid {
            witness: TransitionPoint::new(w.clone()),
            residual,
            failure: MlrfFailure::AllNegative,
        }),
        None => Ok(MlrfCheck::Valid),
    }
}

/// One condition of a nested ranking function.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NestedCondition {
    /// `(Δf_i − 1) + f_{i−1} ≥ 0`, 1-based, with `f_0 = 0`.
    Decrease(usize),
    /// `f_d ≥ 0`.
    LastNonneg,
    /// The empty tuple on a nonempty `Q`.
    Empty,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NestedCheck {
    /// Certificates for conditions `1..=d`, then for `f_d ≥ 0`. The empty
    /// tuple on an empty `Q` carries no certificates.
    Valid(Vec<FarkasCert>),
    Invalid {
        condition: NestedCondition,
        witness: TransitionPoint,
    },
}

impl NestedCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, NestedCheck::Valid(_))
    }
}

/// The affine functions over `(x, x')` that must be nonnegative on `Q`:
/// `(Δf_i − 1) + f_{i−1}` for `i = 1..d`, then `f_d`.
pub fn nested_conditions(components: &[AffineFunc]) -> Vec<AffineFunc> {
    let mut out = Vec::with_capacity(components.len() + 1);
    for (i, f) in components.iter().enumerate() {
        let mut g = f.delta().shifted(&-Rational::one());
        if i > 0 {
            g = &g + &components[i - 1].on_pre_state();
        }
        out.push(g);
    }
    if let Some(last) = components.last() {
        out.push(last.on_pre_state());
    }
    out
}

pub fn check_nested(q: &Polyhedron, tuple: &RankTuple) -> Result<NestedCheck> {
    let n = half_dim(q)?;
    tuple.check_dim(n)?;
    if tuple.components.is_empty() {
        return Ok(match q.is_feasible().witness() {
            None => NestedCheck::Valid(Vec::new()),
            Some(w) => NestedCheck::Invalid {
                condition: NestedCondition::Empty,
                witness: TransitionPoint::new(w.clone()),
            },
        });
    }
    let d = tuple.depth();
    let mut certs = Vec::with_capacity(d + 1);
    for (i, g) in nested_conditions(&tuple.components).iter().enumerate() {
        match q.implies_nonneg(g)? {
            Implication::Holds(c) => certs.push(c),
            Implication::Fails(w) => {
                let condition = if i == d {
                    NestedCondition::LastNonneg
                } else {
                    NestedCondition::Decrease(i + 1)
                };
                return Ok(NestedCheck::Invalid {
                    condition,
                    witness: TransitionPoint::new(w),
                });
            }
        }
    }
    Ok(NestedCheck::Valid(certs))
}

fn half_dim(q: &Polyhedron) -> Result<usize> {
    if q.dim() % 2 != 0 {
        return Err(Error::DimensionMismatch {
            expected: q.dim() + 1,
            found: q.dim(),
        });
    }
    Ok(q.dim() / 2)
}

/// The least index (1-based) ranking `(x, x')` under the multiphase
/// definition, or `None` when no index does.
pub fn mlrf_rank_index(components: &[AffineFunc], pre: &[Rational], post: &[Rational]) -> Option<usize> {
    let one = Rational::one();
    for (i, f) in components.iter().enumerate() {
        let now = f.eval(pre).ok()?;
        let drop = &now - f.eval(post).ok()?;
        if drop < one {
            return None;
        }
        if !now.is_negative() {
            return Some(i + 1);
        }
    }
    None
}

/// Pointwise multiphase definition with `f_j ≤ 0` (closed) for `j < i`.
pub fn mlrf_ranks_pointwise(components: &[AffineFunc], pre: &[Rational], post: &[Rational]) -> bool {
    let one = Rational::one();
    (0..components.len()).any(|i| {
        let ok_prefix = components[..=i].iter().all(|f| {
            let a = f.eval(pre).unwrap();
            let b = f.eval(post).unwrap();
            a - b >= one
        });
        ok_prefix
            && !components[i].eval(pre).unwrap().is_negative()
            && components[..i]
                .iter()
                .all(|f| !f.eval(pre).unwrap().is_positive())
    })
}

/// Pointwise lexicographic definition: some `i` with `Δf_j ≥ 0` for `j < i`,
/// `f_i ≥ 0`, and `Δf_i ≥ 1` (or `> 0` when `weak`).
pub fn llrf_ranks_pointwise(
    components: &[AffineFunc],
    pre: &[Rational],
    post: &[Rational],
    weak: bool,
) -> bool {
    let one = Rational::one();
    for f in components {
        let now = f.eval(pre).unwrap();
        let drop = &now - f.eval(post).unwrap();
        let decreases = if weak { drop.is_positive() } else { drop >= one };
        if decreases && !now.is_negative() {
            return true;
        }
        if drop.is_negative() {
            return false;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::numeric::int;

    fn tuple(l: &SLCLoop, src: &str, kind: TupleKind) -> RankTuple {
        parse_tuple(src, l.var_names(), kind).unwrap()
    }

    #[test]
    fn l1_transition_polyhedron() {
        let l = fixtures::l1();
        let q = l.transition_polyhedron();
        assert_eq!(q.dim(), 6);
        assert_eq!(q.constraints()[0].coeffs, RatVec::from_ints(&[-1, 0, -1, 0, 0, 0]));
        assert_eq!(q.constraints().len(), 7);
        let w = RatVec::from_ints(&[0, 0, 0, 0, 0, -1]);
        assert!(q.contains(&w));
    }

    #[test]
    fn empty_loop_is_full_space() {
        let l = SLCLoop::new(vec!["x".into()], vec![], vec![], Domain::Rational).unwrap();
        let q = l.transition_polyhedron();
        assert_eq!(q.dim(), 2);
        assert!(q.constraints().is_empty());
    }

    #[test]
    fn l6_rows() {
        let q = fixtures::l6().transition_polyhedron();
        let rows: Vec<(Vec<i64>, i64)> = vec![
            (vec![-1, 0, 0, 0], 0),
            (vec![-1, -1, 1, 0], 0),
            (vec![1, 1, -1, 0], 0),
            (vec![0, -1, 0, 1], -1),
            (vec![0, 1, 0, -1], 1),
        ];
        let expect: Vec<Constraint> = rows
            .into_iter()
            .map(|(a, b)| Constraint::le(RatVec::from_ints(&a), int(b)))
            .collect();
        assert_eq!(q.constraints(), &expect[..]);
    }

    #[test]
    fn l1_checks() {
        let l = fixtures::l1();
        let q = l.transition_polyhedron();
        let t = tuple(&l, "component z + 1\ncomponent y + 1\ncomponent z + x\n", TupleKind::Mlrf);
        assert!(check_mlrf(&q, &t).unwrap().is_valid());
        assert!(check_nested(&q, &t).unwrap().is_valid());

        let t = tuple(&l, "component z + 1\ncomponent y + 1\ncomponent x\n", TupleKind::Mlrf);
        assert!(check_mlrf(&q, &t).unwrap().is_valid());
        match check_nested(&q, &t).unwrap() {
            NestedCheck::Invalid { condition, witness } => {
                assert_eq!(condition, NestedCondition::LastNonneg);
                assert!(q.contains(&witness.values));
                assert!(t.components[2].eval(witness.pre()).unwrap().is_negative());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn l2_bms_tuple_is_not_multiphase() {
        let l = fixtures::l2();
        let q = l.transition_polyhedron();
        let t = tuple(&l, "component 4y\ncomponent 4x - 4z + 4\n", TupleKind::Mlrf);
        match check_mlrf(&q, &t).unwrap() {
            MlrfCheck::Invalid { witness, .. } => {
                assert!(q.contains(&witness.values));
                assert!(!mlrf_ranks_pointwise(&t.components, witness.pre(), witness.post()));
            }
            MlrfCheck::Valid => panic!("expected invalid"),
        }
    }

    #[test]
    fn empty_tuple() {
        let t = RankTuple::new(vec![], TupleKind::Mlrf);
        let empty = Polyhedron::empty(4);
        assert!(check_mlrf(&empty, &t).unwrap().is_valid());
        assert!(check_nested(&empty, &t).unwrap().is_valid());
        let q = fixtures::l6().transition_polyhedron();
        assert!(!check_mlrf(&q, &t).unwrap().is_valid());
        assert!(!check_nested(&q, &t).unwrap().is_valid());
    }

    #[test]
    fn dimension_mismatch() {
        let q = fixtures::l6().transition_polyhedron();
        let t = RankTuple::new(vec![AffineFunc::from_ints(&[1, 0, 0], 0)], TupleKind::Mlrf);
        assert!(matches!(check_mlrf(&q, &t), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(check_nested(&q, &t), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn deterministic_updates() {
        let upd = fixtures::l1().deterministic_update().unwrap();
        assert_eq!(upd[0], AffineFunc::from_ints(&[1, 1, 0], 0));
        assert_eq!(upd[2], AffineFunc::from_ints(&[0, 0, 1], -1));
        let l = parse_loop("vars x\nguard x >= 0\nupdate x' <= x - 1\n").unwrap();
        assert!(matches!(l.deterministic_update(), Err(Error::Nondeterministic(_))));
    }

    #[test]
    fn display_round_trips() {
        for l in fixtures::all() {
            let again = parse_loop(&l.to_string()).unwrap();
            assert_eq!(again, l);
        }
    }

    #[test]
    fn positive_decrease() {
        // x − 2y drops by 4y − x, which can be arbitrarily small below x = 2y
        let l = fixtures::l5(1);
        let q = l.transition_polyhedron();
        let t = tuple(&l, "component x - 2y\ncomponent x - y\n", TupleKind::Mlrf);
        assert!(check_mlrf_with(&q, &t, Decrease::Positive).unwrap().is_valid());
        match check_mlrf(&q, &t).unwrap() {
            MlrfCheck::Invalid { failure, .. } => assert_eq!(failure, MlrfFailure::Decrease(2)),
            MlrfCheck::Valid => panic!("drop below one accepted"),
        }
        let shifted = tuple(&l, "component x - 2y + 1\ncomponent x - y\n", TupleKind::Mlrf);
        assert!(check_mlrf(&q, &shifted).unwrap().is_valid());
    }

    #[test]
    fn pointwise_definitions() {
        let f = [AffineFunc::from_ints(&[0, 1], 1), AffineFunc::from_ints(&[1, 0], 0)];
        // L6 step (1,3) -> (4,2): y+1 drops by 1 and is nonnegative
        assert_eq!(mlrf_rank_index(&f, &[int(1), int(3)], &[int(4), int(2)]), Some(1));
        assert!(mlrf_ranks_pointwise(&f, &[int(1), int(3)], &[int(4), int(2)]));
        // (4,-2) -> (2,-3): y+1 = -1 < 0, x drops by 2
        assert_eq!(mlrf_rank_index(&f, &[int(4), int(-2)], &[int(2), int(-3)]), Some(2));
        assert!(llrf_ranks_pointwise(&f, &[int(4), int(-2)], &[int(2), int(-3)], false));
    }
}
