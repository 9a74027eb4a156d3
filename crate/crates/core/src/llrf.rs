//! Lexicographic ranking functions in the sense where a transition is ranked
//! by `i` when `Δf_j ≥ 0` for `j < i`, `f_i ≥ 0` and `Δf_i ≥ 1` (`Δf_i > 0`
//! for the weak variant), and their conversion to multiphase form.

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::loopmodel::{check_mlrf, RankTuple, TransitionPoint, TupleKind};
use crate::lp::Sense;
use crate::numeric::{AffineFunc, RatVec, Rational};
use crate::polyhedra::{Constraint, Optimum, Polyhedron};

#[derive(Clone, Debug, PartialEq)]
pub enum LlrfCheck {
    Valid,
    /// A transition of `Q` that no component ranks.
    Invalid(TransitionPoint),
}

impl LlrfCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, LlrfCheck::Valid)
    }
}

/// Exact check by case splitting. Below component `j` the region holds the
/// transitions where every earlier `Δf` is nonnegative and no earlier
/// component ranks; such a transition escapes `f_j` either by `Δf_j < 0`
/// (unranked for good), by too small a decrease, or by `f_j < 0`.
pub fn check_bmsllrf(q: &Polyhedron, tuple: &RankTuple, weak: bool) -> Result<LlrfCheck> {
    if q.dim() % 2 != 0 {
        return Err(Error::DimensionMismatch {
            expected: q.dim() + 1,
            found: q.dim(),
        });
    }
    tuple.check_dim(q.dim() / 2)?;
    if q.has_strict() {
        return Err(Error::StrictUnsupported("check_bmsllrf"));
    }
    Ok(match unranked(q.clone(), &tuple.components, weak)? {
        Some(w) => LlrfCheck::Invalid(TransitionPoint::new(w)),
        None => LlrfCheck::Valid,
    })
}

fn unranked(region: Polyhedron, fs: &[AffineFunc], weak: bool) -> Result<Option<RatVec>> {
    let feas = region.is_feasible();
    let Some(w) = feas.witness() else {
        return Ok(None);
    };
    let Some((f, rest)) = fs.split_first() else {
        return Ok(Some(w.clone()));
    };
    let delta = f.delta();
    let increases = region.with(Constraint::negative(&delta))?;
    if let Some(w) = increases.is_feasible().witness() {
        return Ok(Some(w.clone()));
    }
    let nonincreasing = region.with(Constraint::nonneg(&delta))?;
    let small = if weak {
        nonincreasing.with(Constraint::nonpos(&delta))?
    } else {
        nonincreasing.with(Constraint::negative(&delta.shifted(&-Rational::one())))?
    };
    if let Some(w) = unranked(small, rest, weak)? {
        return Ok(Some(w));
    }
    let negative = nonincreasing.with(Constraint::negative(&f.on_pre_state()))?;
    unranked(negative, rest, weak)
}

/// Builds a multiphase ranking function of no greater depth from a valid
/// (weak) lexicographic one.
///
/// A component `g ≥ 0` on `Q` is chosen (one of the `f_i`, or a conic
/// combination whose last weight is one); the remaining components rank
/// `Q ∩ {Δg ≤ 0}`, which is converted recursively. The result is lifted back
/// to `Q` by adding multiples of `g` to its components and appending `g`.
pub fn llrf_to_mlrf(q: &Polyhedron, tuple: &RankTuple, weak: bool) -> Result<RankTuple> {
    if !check_bmsllrf(q, tuple, weak)?.is_valid() {
        return Err(Error::InvalidTuple {
            kind: if weak {
                "weak lexicographic ranking function"
            } else {
                "lexicographic ranking function"
            },
        });
    }
    let out = RankTuple::new(convert(q, &tuple.components)?, TupleKind::Mlrf);
    if !check_mlrf(q, &out)?.is_valid() {
        return Err(Error::Certificate("converted tuple is not multiphase".into()));
    }
    Ok(out)
}

fn convert(q: &Polyhedron, fs: &[AffineFunc]) -> Result<Vec<AffineFunc>> {
    if !q.is_feasible().is_feasible() {
        return Ok(Vec::new());
    }
    if fs.is_empty() {
        return Err(Error::Certificate("no component left for a nonempty region".into()));
    }
    let (g, idx) = nonneg_component(q, fs)?;
    let mut rest = fs.to_vec();
    rest.remove(idx);
    let dg = g.delta();
    let q_rest = q.with(Constraint::nonpos(&dg))?;
    let inner = convert(&q_rest, &rest)?;

    let mut out = Vec::with_capacity(inner.len() + 1);
    let mut region = q.clone();
    for gj in inner {
        let need = gj.delta().shifted(&-Rational::one());
        let lifted = if region.implies_nonneg(&need)?.holds() {
            gj
        } else {
            let w = region
                .motzkin_combine_strict(std::slice::from_ref(&dg), &need)?
                .witness()
                .ok_or_else(|| Error::Certificate("no lifting weight".into()))?;
            &gj + &g.scaled(&w.mus[0])
        };
        let shifted = lifted.shifted(&Rational::one());
        region = region.with(Constraint::nonpos(&shifted.on_pre_state()))?;
        out.push(shifted);
        if !region.is_feasible().is_feasible() {
            return Ok(out);
        }
    }
    let c = match region.optimize(&dg, Sense::Minimize)? {
        Optimum::Optimal { value, .. } => value,
        Optimum::Infeasible => return Ok(out),
        Optimum::Unbounded { .. } => {
            return Err(Error::Certificate("decrease of the chosen component is unbounded below".into()))
        }
    };
    if !c.is_positive() {
        return Err(Error::Certificate("chosen component does not decrease on the residual".into()));
    }
    out.push(if c < Rational::one() { g.scaled(&c.recip()) } else { g });
    Ok(out)
}

/// A function nonnegative on `Q`, and the index of the component it
/// replaces.
fn nonneg_component(q: &Polyhedron, fs: &[AffineFunc]) -> Result<(AffineFunc, usize)> {
    for (i, f) in fs.iter().enumerate() {
        if q.implies_nonneg(&f.on_pre_state())?.holds() {
            return Ok((f.clone(), i));
        }
    }
    let pre: Vec<AffineFunc> = fs.iter().map(AffineFunc::on_pre_state).collect();
    for j in (1..=fs.len()).rev() {
        if let Some(w) = q.conic_combine_nonneg(&pre[..j])?.witness() {
            let g = fs[..j - 1]
                .iter()
                .zip(&w.mus)
                .fold(fs[j - 1].clone(), |acc, (f, mu)| &acc + &f.scaled(mu));
            return Ok((g, j - 1));
        }
    }
    Err(Error::Certificate("no nonnegative combination of the components".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::loopmodel::{llrf_ranks_pointwise, parse_tuple};

    fn tuple(src: &str, vars: &[String]) -> RankTuple {
        parse_tuple(src, vars, TupleKind::BmsLlrf).unwrap()
    }

    #[test]
    fn l2_is_lexicographic() {
        let l = fixtures::l2();
        let q = l.transition_polyhedron();
        let t = tuple("component 4y\ncomponent 4x - 4z + 4\n", l.var_names());
        assert!(check_bmsllrf(&q, &t, false).unwrap().is_valid());
        assert!(check_bmsllrf(&q, &t, true).unwrap().is_valid());
        assert!(!check_mlrf(&q, &t).unwrap().is_valid());

        let m = llrf_to_mlrf(&q, &t, false).unwrap();
        assert!(m.depth() <= 2);
        assert!(check_mlrf(&q, &m).unwrap().is_valid());
    }

    #[test]
    fn unranked_witness_is_genuine() {
        let l = fixtures::l6();
        let q = l.transition_polyhedron();
        let t = tuple("component x\n", l.var_names());
        match check_bmsllrf(&q, &t, false).unwrap() {
            LlrfCheck::Invalid(w) => {
                assert!(q.contains(&w.values));
                assert!(!llrf_ranks_pointwise(&t.components, w.pre(), w.post(), false));
            }
            LlrfCheck::Valid => panic!("x alone does not rank L6"),
        }
    }

    #[test]
    fn multiphase_tuples_are_lexicographic() {
        let l = fixtures::l1();
        let q = l.transition_polyhedron();
        let t = tuple("component z + 1\ncomponent y + 1\ncomponent x\n", l.var_names());
        assert!(check_bmsllrf(&q, &t, false).unwrap().is_valid());
        let m = llrf_to_mlrf(&q, &t, true).unwrap();
        assert_eq!(m.depth(), 3);
        assert!(check_mlrf(&q, &m).unwrap().is_valid());
    }

    #[test]
    fn linear_ranking_function_comes_back_unchanged() {
        let l = fixtures::l3().with_domain(crate::loopmodel::Domain::Integer);
        let q = l.transition_polyhedron().integer_hull().unwrap();
        let t = tuple("component x1 + x2\n", l.var_names());
        assert!(check_bmsllrf(&q, &t, false).unwrap().is_valid());
        assert_eq!(llrf_to_mlrf(&q, &t, false).unwrap().components, t.components);
    }

    #[test]
    fn invalid_input_is_rejected() {
        let l = fixtures::l6();
        let q = l.transition_polyhedron();
        let t = tuple("component y\n", l.var_names());
        assert!(matches!(llrf_to_mlrf(&q, &t, true), Err(Error::InvalidTuple { .. })));
    }
}
