//! The exact ordered field every geometric routine is written against.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, Signed, Zero};

/// An exact ordered field.
///
/// Predicates in this crate decide strict sidedness with no tolerance, so
/// only exact types qualify; floating point is deliberately not an instance.
/// Every `Ratio<I>` over a signed integer type that converts from `i64` is a
/// `Scalar`, which covers [`BigRational`](num_rational::BigRational) as well as
/// fixed-width `Ratio<i64>` / `Ratio<i128>` for small, overflow-free inputs.
pub trait Scalar:
    Clone + Debug + Display + Ord + Hash + Num + Signed + FromStr + Send + Sync + 'static
{
    /// The integer ring the field is built over.
    type Int: Clone + Debug + Ord + Hash + Integer + Signed + Send + Sync;

    fn from_int(n: i64) -> Self;

    /// Numerator and denominator in lowest terms, denominator positive.
    fn to_parts(&self) -> (Self::Int, Self::Int);

    fn from_integer(n: Self::Int) -> Self;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    /// Rescales `v` by a positive factor so that it becomes a primitive
    /// integer vector (integral entries, content 1). The zero vector is left
    /// untouched.
    fn make_primitive(v: &mut [Self]);

    /// Largest integer not exceeding `self`.
    fn floor(&self) -> Self;
}

impl<I> Scalar for Ratio<I>
where
    I: Integer + Signed + Clone + Hash + Debug + Display + FromStr + From<i64> + Send + Sync + 'static,
{
    type Int = I;

    fn from_int(n: i64) -> Self {
        Ratio::from_integer(I::from(n))
    }

    fn to_parts(&self) -> (I, I) {
        (self.numer().clone(), self.denom().clone())
    }

    fn from_integer(n: I) -> Self {
        Ratio::from_integer(n)
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(I::from(numer), I::from(denom))
    }

    fn make_primitive(v: &mut [Self]) {
        if v.iter().all(Zero::is_zero) {
            return;
        }
        let lcm = v
            .iter()
            .fold(I::one(), |acc, x| acc.lcm(x.denom()));
        let ints: Vec<I> = v
            .iter()
            .map(|x| x.numer().clone() * (lcm.clone() / x.denom().clone()))
            .collect();
        let gcd = ints
            .iter()
            .filter(|x| !x.is_zero())
            .fold(I::zero(), |acc, x| acc.gcd(x));
        for (slot, n) in v.iter_mut().zip(ints) {
            *slot = Ratio::from_integer(n / gcd.clone());
        }
    }

    fn floor(&self) -> Self {
        Ratio::floor(self)
    }
}
