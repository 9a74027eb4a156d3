//! Exact rationals, dense rational vectors and affine functions.
//!
//! Everything in the crate is computed over arbitrary-precision rationals.
//! Rationals print as `p/q`, or just `p` when the denominator is one.

use std::fmt;
use std::slice::SliceIndex;
use std::ops::{Add, Deref, DerefMut, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Canonical arbitrary-precision rational (positive denominator, reduced).
pub type Rational = BigRational;

/// Rational from an integer.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational `n/d`. Panics when `d == 0`.
pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `p/q` or `p`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rational::new(p, q))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Least common multiple of the denominators.
pub fn denominator_lcm<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// A dense vector of rationals.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RatVec(Vec<Rational>);

impl RatVec {
    pub fn new(entries: Vec<Rational>) -> Self {
        RatVec(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        RatVec(vec![Rational::zero(); dim])
    }

    pub fn from_ints(values: &[i64]) -> Self {
        RatVec(values.iter().map(|&v| int(v)).collect())
    }

    /// Unit vector `e_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = Rational::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Rational> {
        self.0
    }

    /// Inner product. Panics on mismatched dimensions.
    pub fn dot(&self, other: &[Rational]) -> Rational {
        assert_eq!(self.dim(), other.len(), "dot product of mismatched vectors");
        self.0
            .iter()
            .zip(other)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn scaled(&self, k: &Rational) -> RatVec {
        RatVec(self.0.iter().map(|v| v * k).collect())
    }

    pub fn concat(&self, other: &RatVec) -> RatVec {
        RatVec(self.0.iter().chain(other.0.iter()).cloned().collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|v| v.is_integer())
    }

    /// Largest absolute entry (zero for the empty vector).
    pub fn max_abs(&self) -> Rational {
        self.0
            .iter()
            .map(|v| v.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// The positive multiple of `self` with coprime integer entries.
    pub fn primitive(&self) -> RatVec {
        if self.is_zero() {
            return self.clone();
        }
        let l = denominator_lcm(&self.0);
        let ints: Vec<BigInt> = self
            .0
            .iter()
            .map(|v| (v * Rational::from_integer(l.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        RatVec(
            ints.into_iter()
                .map(|v| Rational::from_integer(v / &g))
                .collect(),
        )
    }
}

impl Deref for RatVec {
    type Target = [Rational];
    fn deref(&self) -> &[Rational] {
        &self.0
    }
}

impl DerefMut for RatVec {
    fn deref_mut(&mut self) -> &mut [Rational] {
        &mut self.0
    }
}

impl<I: SliceIndex<[Rational]>> Index<I> for RatVec {
    type Output = I::Output;
    fn index(&self, i: I) -> &I::Output {
        &self.0[i]
    }
}

impl<I: SliceIndex<[Rational]>> IndexMut<I> for RatVec {
    fn index_mut(&mut self, i: I) -> &mut I::Output {
        &mut self.0[i]
    }
}

impl From<Vec<Rational>> for RatVec {
    fn from(v: Vec<Rational>) -> Self {
        RatVec(v)
    }
}

impl FromIterator<Rational> for RatVec {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        RatVec(iter.into_iter().collect())
    }
}

impl IntoIterator for RatVec {
    type Item = Rational;
    type IntoIter = std::vec::IntoIter<Rational>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> Add<&'a RatVec> for &'a RatVec {
    type Output = RatVec;
    fn add(self, rhs: &RatVec) -> RatVec {
        assert_eq!(self.dim(), rhs.dim());
        self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect()
    }
}

impl<'a> Sub<&'a RatVec> for &'a RatVec {
    type Output = RatVec;
    fn sub(self, rhs: &RatVec) -> RatVec {
        assert_eq!(self.dim(), rhs.dim());
        self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect()
    }
}

impl fmt::Display for RatVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// An affine function `f(x) = λ·x + λ0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineFunc {
    coeffs: RatVec,
    constant: Rational,
}

impl AffineFunc {
    pub fn new(coeffs: RatVec, constant: Rational) -> Self {
        AffineFunc { coeffs, constant }
    }

    pub fn from_ints(coeffs: &[i64], constant: i64) -> Self {
        AffineFunc::new(RatVec::from_ints(coeffs), int(constant))
    }

    pub fn zero(dim: usize) -> Self {
        AffineFunc::new(RatVec::zeros(dim), Rational::zero())
    }

    pub fn constant_fn(dim: usize, c: Rational) -> Self {
        AffineFunc::new(RatVec::zeros(dim), c)
    }

    /// The coordinate function `x_i`.
    pub fn var(dim: usize, i: usize) -> Self {
        AffineFunc::new(RatVec::unit(dim, i), Rational::zero())
    }

    pub fn dim(&self) -> usize {
        self.coeffs.dim()
    }

    pub fn coeffs(&self) -> &RatVec {
        &self.coeffs
    }

    pub fn constant(&self) -> &Rational {
        &self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_zero()
    }

    pub fn eval(&self, x: &[Rational]) -> Result<Rational> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(self.coeffs.dot(x) + &self.constant)
    }

    /// `Δf(x, x') = f(x) − f(x')` over the doubled space.
    pub fn delta(&self) -> AffineFunc {
        let neg: RatVec = self.coeffs.iter().map(|c| -c).collect();
        AffineFunc::new(self.coeffs.concat(&neg), Rational::zero())
    }

    /// Reads `f` as a function of the unprimed half of `(x, x')`.
    pub fn on_pre_state(&self) -> AffineFunc {
        AffineFunc::new(
            self.coeffs.concat(&RatVec::zeros(self.dim())),
            self.constant.clone(),
        )
    }

    /// Reads `f` as a function of the primed half of `(x, x')`.
    pub fn on_post_state(&self) -> AffineFunc {
        AffineFunc::new(
            RatVec::zeros(self.dim()).concat(&self.coeffs),
            self.constant.clone(),
        )
    }

    pub fn scaled(&self, k: &Rational) -> AffineFunc {
        AffineFunc::new(self.coeffs.scaled(k), &self.constant * k)
    }

    pub fn shifted(&self, c: &Rational) -> AffineFunc {
        AffineFunc::new(self.coeffs.clone(), &self.constant + c)
    }

    /// Renders with variable names, e.g. `4*x - 4*z + 4`.
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayAffine { f: self, names }
    }
}

struct DisplayAffine<'a> {
    f: &'a AffineFunc,
    names: &'a [String],
}

impl fmt::Display for DisplayAffine<'_> {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.f.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let fallback;
            let name = match self.names.get(i) {
                Some(n) => n.as_str(),
                None => {
                    fallback = format!("v{}", i + 1);
                    &fallback
                }
            };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(out, "-")?;
                }
            } else if c.is_negative() {
                write!(out, " - ")?;
            } else {
                write!(out, " + ")?;
            }
            if mag.is_one() {
                write!(out, "{name}")?;
            } else {
                write!(out, "{mag}*{name}")?;
            }
            first = false;
        }
        let k = &self.f.constant;
        if first {
            write!(out, "{k}")
        } else if k.is_negative() {
            write!(out, " - {}", k.abs())
        } else if k.is_positive() {
            write!(out, " + {k}")
        } else {
            Ok(())
        }
    }
}

impl<'a> Add<&'a AffineFunc> for &'a AffineFunc {
    type Output = AffineFunc;
    fn add(self, rhs: &AffineFunc) -> AffineFunc {
        AffineFunc::new(&self.coeffs + &rhs.coeffs, &self.constant + &rhs.constant)
    }
}

impl<'a> Sub<&'a AffineFunc> for &'a AffineFunc {
    type Output = AffineFunc;
    fn sub(self, rhs: &AffineFunc) -> AffineFunc {
        AffineFunc::new(&self.coeffs - &rhs.coeffs, &self.constant - &rhs.constant)
    }
}

impl Neg for &AffineFunc {
    type Output = AffineFunc;
    fn neg(self) -> AffineFunc {
        self.scaled(&-Rational::one())
    }
}

impl Mul<&Rational> for &AffineFunc {
    type Output = AffineFunc;
    fn mul(self, k: &Rational) -> AffineFunc {
        self.scaled(k)
    }
}

/// `λ·x + λ0`, exactly.
pub fn eval_affine(f: &AffineFunc, x: &RatVec) -> Result<Rational> {
    f.eval(x)
}

/// `Δf` for a function over `n` variables; the result lives over `2n`.
pub fn delta(f: &AffineFunc, n: usize) -> Result<AffineFunc> {
    if f.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: f.dim(),
        });
    }
    Ok(f.delta())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn eval_examples() {
        let f = AffineFunc::from_ints(&[1, 1], 1);
        assert_eq!(eval_affine(&f, &RatVec::from_ints(&[0, 0])).unwrap(), int(1));

        let z_plus_1 = AffineFunc::from_ints(&[0, 0, 1], 1);
        assert_eq!(
            eval_affine(&z_plus_1, &RatVec::from_ints(&[-1, 0, 1])).unwrap(),
            int(2)
        );

        // 10*x_2 at (1/2, -1/2, 0): 10 * (-1/2) = -5
        let f = AffineFunc::from_ints(&[0, 10, 0], 0);
        let x = RatVec::new(vec![frac(1, 2), frac(-1, 2), int(0)]);
        assert_eq!(eval_affine(&f, &x).unwrap(), int(-5));
    }

    #[test]
    fn eval_rejects_mismatch() {
        let f = AffineFunc::from_ints(&[1, 1], 0);
        assert!(matches!(
            eval_affine(&f, &RatVec::from_ints(&[1])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn delta_examples() {
        let d = delta(&AffineFunc::from_ints(&[1], 0), 1).unwrap();
        assert_eq!(d, AffineFunc::from_ints(&[1, -1], 0));

        let d = delta(&AffineFunc::from_ints(&[0, 1], 1), 2).unwrap();
        assert_eq!(d, AffineFunc::from_ints(&[0, 1, 0, -1], 0));

        let f = AffineFunc::from_ints(&[4, 0, -4], 4);
        let d = delta(&f, 3).unwrap();
        assert_eq!(d, AffineFunc::from_ints(&[4, 0, -4, -4, 0, 4], 0));
        // both sides agree on a handful of rational points
        let pts = [
            ([frac(1, 2), int(3), frac(-7, 3)], [int(0), frac(5, 4), int(1)]),
            ([int(-2), int(0), int(9)], [frac(1, 9), frac(2, 9), frac(3, 9)]),
            ([int(1), int(1), int(1)], [int(1), int(1), int(1)]),
            ([frac(-3, 7), int(4), int(0)], [int(6), frac(-1, 2), int(2)]),
            ([int(100), int(-100), frac(1, 1000)], [int(0), int(0), int(0)]),
        ];
        for (x, y) in pts {
            let xy: RatVec = x.iter().chain(y.iter()).cloned().collect();
            let lhs = d.eval(&xy).unwrap();
            let rhs = f.eval(&x).unwrap() - f.eval(&y).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn rational_text_format() {
        assert_eq!(frac(6, 4).to_string(), "3/2");
        assert_eq!(int(-3).to_string(), "-3");
        assert_eq!(frac(-1, 2).to_string(), "-1/2");
        assert_eq!(parse_rational("3/2"), Some(frac(3, 2)));
        assert_eq!(parse_rational("-4"), Some(int(-4)));
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn display_affine() {
        let names: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
        let f = AffineFunc::from_ints(&[4, 0, -4], 4);
        assert_eq!(f.display_with(&names).to_string(), "4*x - 4*z + 4");
        let f = AffineFunc::from_ints(&[-1, 1, 0], -1);
        assert_eq!(f.display_with(&names).to_string(), "-x + y - 1");
        assert_eq!(AffineFunc::zero(3).display_with(&names).to_string(), "0");
    }

    #[test]
    fn primitive_vector() {
        let v = RatVec::new(vec![frac(2, 3), frac(-4, 3), int(0)]);
        assert_eq!(v.primitive(), RatVec::from_ints(&[1, -2, 0]));
    }

    fn big_rational() -> impl Strategy<Value = Rational> {
        (any::<i128>(), 1..i128::MAX)
            .prop_map(|(p, q)| Rational::new(BigInt::from(p), BigInt::from(q)))
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..12).prop_map(|(p, q)| frac(p, q))
    }

    proptest! {
        #[test]
        fn arithmetic_is_exact(a in big_rational(), b in big_rational()) {
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!(&(&a * &b) / &b, a);
            }
        }

        #[test]
        fn delta_splits_evaluation(
            coeffs in proptest::collection::vec(small_rational(), 1..6),
            c in small_rational(),
            seed in proptest::collection::vec(small_rational(), 12),
        ) {
            let n = coeffs.len();
            let f = AffineFunc::new(RatVec::new(coeffs), c);
            let x: RatVec = seed[..n].to_vec().into();
            let y: RatVec = seed[6..6 + n].to_vec().into();
            let d = delta(&f, n).unwrap();
            prop_assert_eq!(
                d.eval(&x.concat(&y)).unwrap(),
                f.eval(&x).unwrap() - f.eval(&y).unwrap()
            );
        }
    }
}
