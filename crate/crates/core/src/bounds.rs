//! Linear iteration bounds from multiphase ranking functions.
//!
//! For an irredundant tuple `⟨f_1, …, f_d⟩` each phase `k ≥ 2` has weights
//! with `Σ_{j<k} μ_j f_j + Δf_k − 1 ≥ 0` over `Q` and `μ_{k−1} > 0`. From them
//!
//! ```text
//! c_1 = d_1 = 1
//! c_k = (1 + μ) + (Σ_{j<k} μ_j c_j)/(k − 1) + μ_{k−1} d_{k−1},   μ = Σ_j μ_j
//! d_k = μ_{k−1} d_{k−1} / k
//! ```
//!
//! With `M = max(f_1(x0), …, f_d(x0), 1)`, every `f_k` is negative after
//! `max(1, (c_k/d_k)·M)` iterations, strictly so for `k ≥ 2`; the first
//! component only after more than `M`. The loop therefore runs at most
//! `max(⌊M⌋ + 1, ⌈(c_k/d_k)·M⌉ for k ≥ 2)` iterations, which is below
//! `⌊coefficient · M⌋ + 1` for `coefficient = max_k max(1, c_k/d_k)`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::loopmodel::{check_mlrf, RankTuple};
use crate::numeric::{AffineFunc, Rational};
use crate::polyhedra::{MuWitness, Polyhedron};
use crate::synthesis::reduce_irredundant;

/// Weights for phase `k` (1-based, `2 ≤ k ≤ d`), maximising `μ_{k−1}` up to
/// one.
pub fn phase_multipliers(q: &Polyhedron, tuple: &RankTuple, k: usize) -> Result<MuWitness> {
    let d = tuple.depth();
    if k < 2 || k > d {
        return Err(Error::InvalidArgument(format!(
            "phase {k} outside 2..={d}"
        )));
    }
    tuple.check_dim(q.dim() / 2)?;
    let earlier: Vec<AffineFunc> = tuple.components[..k - 1]
        .iter()
        .map(AffineFunc::on_pre_state)
        .collect();
    let need = tuple.components[k - 1].delta().shifted(&-Rational::one());
    let w = q
        .combine_maximizing_last(&earlier, &need)?
        .witness()
        .ok_or(Error::InvalidTuple {
            kind: "irredundant multiphase ranking function",
        })?;
    if !w.mus[k - 2].is_positive() {
        return Err(Error::NotIrredundant { component: k - 1 });
    }
    if !w.cert.verify(q, &w.combined) {
        return Err(Error::Certificate("phase weights do not recombine".into()));
    }
    Ok(w)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    /// The irredundant tuple the bound was computed for.
    pub tuple: RankTuple,
    /// Weights for phases `2..=d`.
    pub multipliers: Vec<MuWitness>,
    pub c: Vec<Rational>,
    pub d: Vec<Rational>,
    pub coefficient: Rational,
    /// `M` evaluated at the start state, when one was given.
    pub m: Option<Rational>,
    /// `coefficient · M`.
    pub numeric: Option<Rational>,
    /// Iterations after which every component is negative.
    pub iterations: Option<BigInt>,
}

impl BoundReport {
    /// How `M` is obtained from the start state.
    pub fn m_definition(&self, names: &[String]) -> String {
        let mut parts: Vec<String> = self
            .tuple
            .components
            .iter()
            .map(|f| format!("{}", f.display_with(names)))
            .collect();
        parts.push("1".into());
        format!("max({})", parts.join(", "))
    }

    /// `coefficient · M` for a given `M`.
    pub fn bound_for(&self, m: &Rational) -> Rational {
        &self.coefficient * m
    }
}

/// The constants `c_k`, `d_k` of the recurrence, given the weight vectors of
/// phases `2..=d`.
pub fn recurrence(mus: &[Vec<Rational>]) -> (Vec<Rational>, Vec<Rational>) {
    let mut c = vec![Rational::one()];
    let mut d = vec![Rational::one()];
    for (idx, mu) in mus.iter().enumerate() {
        let k = idx + 2;
        let total: Rational = mu.iter().sum();
        let weighted: Rational = mu.iter().zip(&c).map(|(m, cj)| m * cj).sum();
        let last = &mu[k - 2];
        let ck = (Rational::one() + total)
            + weighted / Rational::from_integer(BigInt::from(k - 1))
            + last * &d[k - 2];
        let dk = last * &d[k - 2] / Rational::from_integer(BigInt::from(k));
        c.push(ck);
        d.push(dk);
    }
    (c, d)
}

/// Iterations after which all phases are over, for a given `M ≥ 1`.
pub fn iterations_for(c: &[Rational], d: &[Rational], m: &Rational) -> BigInt {
    if c.is_empty() {
        return BigInt::zero();
    }
    let mut t = m.floor().to_integer() + 1;
    for (ck, dk) in c.iter().zip(d).skip(1) {
        let tk = (ck / dk * m).ceil().to_integer();
        if tk > t {
            t = tk;
        }
    }
    t
}

/// Bound coefficient and, with `x0`, the concrete iteration bound.
pub fn iteration_bound(q: &Polyhedron, tuple: &RankTuple, x0: Option<&[Rational]>) -> Result<BoundReport> {
    let n = q.dim() / 2;
    tuple.check_dim(n)?;
    if !check_mlrf(q, tuple)?.is_valid() {
        return Err(Error::InvalidTuple {
            kind: "multiphase ranking function",
        });
    }
    let tuple = reduce_irredundant(q, tuple)?;
    let depth = tuple.depth();
    let multipliers = (2..=depth)
        .map(|k| phase_multipliers(q, &tuple, k))
        .collect::<Result<Vec<_>>>()?;
    let mus: Vec<Vec<Rational>> = multipliers.iter().map(|w| w.mus.clone()).collect();
    let (c, d) = if depth == 0 {
        (Vec::new(), Vec::new())
    } else {
        recurrence(&mus)
    };
    let coefficient = c
        .iter()
        .zip(&d)
        .map(|(ck, dk)| ck / dk)
        .fold(Rational::one(), |acc, r| if r > acc { r } else { acc });

    let (m, numeric, iterations) = match x0 {
        None => (None, None, None),
        Some(x) => {
            if x.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: x.len(),
                });
            }
            let mut m = Rational::one();
            for f in &tuple.components {
                let v = f.eval(x)?;
                if v > m {
                    m = v;
                }
            }
            let numeric = &coefficient * &m;
            let iterations = iterations_for(&c, &d, &m);
            (Some(m), Some(numeric), Some(iterations))
        }
    };
    debug_assert!(c.iter().chain(&d).all(|v| v.is_positive() && !v.is_zero()));
    Ok(BoundReport {
        tuple,
        multipliers,
        c,
        d,
        coefficient,
        m,
        numeric,
        iterations,
    })
}
