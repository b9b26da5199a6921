//! Coefficient fields.
//!
//! Everything algebraic in this crate is generic over [`Coeff`], which has
//! two realizations: exact arbitrary-precision rationals ([`Rational`]) and
//! IEEE doubles. The rational field is the default for identities that must
//! hold exactly; doubles carry data that is irrational (`√2`, `√7`) or comes
//! out of the SDP solver.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational numbers.
pub type Rational = BigRational;

/// A field of polynomial coefficients.
pub trait Coeff:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// Whether arithmetic in this field is exact.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    fn from_rational(r: &Rational) -> Self;

    fn to_f64(&self) -> f64;

    /// Exact value over the rationals; doubles are rounded to the nearest
    /// fraction with denominator at most `max_den`.
    fn to_rational(&self, max_den: u64) -> Option<Rational>;

    /// `|self|` as a double, used for pivot selection and tolerances.
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Treats `self` as zero when `|self| <= tol`. Exact fields ignore `tol`.
    fn is_negligible(&self, tol: f64) -> bool;

    fn mul_ref(&self, other: &Self) -> Self;

    fn add_ref(&self, other: &Self) -> Self;

    /// Square root if it exists in the field.
    fn sqrt_opt(&self) -> Option<Self>;

    /// Parses an unsigned literal (`3`, `3/4`, `0.125`).
    fn parse_literal(s: &str) -> Option<Self>;

    /// Formats an unsigned value so that [`Coeff::parse_literal`] reads it back exactly.
    fn format_literal(&self) -> String;

    fn is_negative(&self) -> bool;

    fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Coeff for Rational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_rational(&self, _max_den: u64) -> Option<Rational> {
        Some(self.clone())
    }

    fn is_negligible(&self, _tol: f64) -> bool {
        self.is_zero()
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }

    fn sqrt_opt(&self) -> Option<Self> {
        if Signed::is_negative(self) {
            return None;
        }
        let n = self.numer();
        let d = self.denom();
        let rn = n.sqrt();
        let rd = d.sqrt();
        if &(&rn * &rn) == n && &(&rd * &rd) == d {
            Some(Rational::new(rn, rd))
        } else {
            None
        }
    }

    fn parse_literal(s: &str) -> Option<Self> {
        if let Some((n, d)) = s.split_once('/') {
            let n = parse_decimal(n)?;
            let d = parse_decimal(d)?;
            if d.is_zero() {
                return None;
            }
            Some(n / d)
        } else {
            parse_decimal(s)
        }
    }

    fn format_literal(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

impl Coeff for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(r: &Rational) -> Self {
        Coeff::to_f64(r)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self, max_den: u64) -> Option<Rational> {
        rationalize(*self, max_den)
    }

    fn is_negligible(&self, tol: f64) -> bool {
        f64::abs(*self) <= tol
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }

    fn sqrt_opt(&self) -> Option<Self> {
        if *self < 0.0 {
            None
        } else {
            Some(self.sqrt())
        }
    }

    fn parse_literal(s: &str) -> Option<Self> {
        if let Some((n, d)) = s.split_once('/') {
            let n: f64 = n.parse().ok()?;
            let d: f64 = d.parse().ok()?;
            Some(n / d)
        } else {
            s.parse().ok()
        }
    }

    fn format_literal(&self) -> String {
        // Display for f64 is the shortest string that round-trips.
        format!("{}", self)
    }

    fn is_negative(&self) -> bool {
        *self < 0.0
    }
}

/// Exact value of a decimal literal such as `12`, `0.25` or `3.`.
fn parse_decimal(s: &str) -> Option<Rational> {
    if s.is_empty() {
        return None;
    }
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{}{}", int, frac);
    let num: BigInt = digits.parse().ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Some(Rational::new(num, den))
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// by continued-fraction convergents.
pub fn rationalize(x: f64, max_den: u64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    let negative = x < 0.0;
    let mut rest = x.abs();
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let bound = BigInt::from(max_den);
    for _ in 0..64 {
        let a = rest.floor();
        let a_int = BigInt::from(a as u64);
        let p2 = &a_int * &p1 + &p0;
        let q2 = &a_int * &q1 + &q0;
        if q2 > bound {
            break;
        }
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let frac = rest - a;
        if frac < 1e-15 {
            break;
        }
        rest = 1.0 / frac;
        if !rest.is_finite() || rest > 1e18 {
            break;
        }
    }
    if q1.is_zero() {
        return None;
    }
    let r = Rational::new(p1, q1);
    Some(if negative { -r } else { r })
}

/// Integer rational `v`.
pub fn rat(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Rational `n / d`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals_round_trip() {
        for s in ["0", "7", "3/4", "123456789012345678901234567891/7"] {
            let v = <Rational as Coeff>::parse_literal(s).unwrap();
            assert_eq!(v.format_literal(), s);
        }
        assert_eq!(<Rational as Coeff>::parse_literal("0.125").unwrap(), ratio(1, 8));
        assert_eq!(<Rational as Coeff>::parse_literal("1.5/3").unwrap(), ratio(1, 2));
        assert!(<Rational as Coeff>::parse_literal("1/0").is_none());
        assert!(<Rational as Coeff>::parse_literal("x").is_none());
        let x = std::f64::consts::SQRT_2;
        assert_eq!(<f64 as Coeff>::parse_literal(&x.format_literal()).unwrap(), x);
    }

    #[test]
    fn rational_sqrt() {
        assert_eq!(ratio(9, 4).sqrt_opt(), Some(ratio(3, 2)));
        assert_eq!(rat(2).sqrt_opt(), None);
        assert_eq!(rat(-1).sqrt_opt(), None);
    }

    #[test]
    fn continued_fractions() {
        assert_eq!(rationalize(0.75, 1_000_000), Some(ratio(3, 4)));
        assert_eq!(rationalize(-2.5, 10), Some(ratio(-5, 2)));
        let pi = rationalize(std::f64::consts::PI, 1000).unwrap();
        assert_eq!(pi, ratio(355, 113));
        let s7 = rationalize(7f64.sqrt(), 1_000_000).unwrap();
        assert!(s7.denom() <= &BigInt::from(1_000_000));
        assert!((Coeff::to_f64(&s7) - 7f64.sqrt()).abs() < 1e-11);
    }
}
