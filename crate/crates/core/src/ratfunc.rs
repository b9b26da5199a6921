//! Rational functions `num / den` without gcd normalization.

use crate::error::{Error, Result};
use crate::field::Coeff;
use crate::poly::Polynomial;

#[derive(Clone, Debug)]
pub struct RationalFunction<C: Coeff> {
    num: Polynomial<C>,
    den: Polynomial<C>,
}

impl<C: Coeff> RationalFunction<C> {
    pub fn new(num: Polynomial<C>, den: Polynomial<C>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        if num.nvars() != den.nvars() {
            return Err(Error::NvarsMismatch(num.nvars(), den.nvars()));
        }
        Ok(RationalFunction { num, den })
    }

    pub fn from_polynomial(p: Polynomial<C>) -> Self {
        let den = Polynomial::one(p.nvars());
        RationalFunction { num: p, den }
    }

    pub fn num(&self) -> &Polynomial<C> {
        &self.num
    }

    pub fn den(&self) -> &Polynomial<C> {
        &self.den
    }

    /// `deg(num) - deg(den)`; `None` for the zero function.
    pub fn degree(&self) -> Option<i64> {
        let n = self.num.degree()? as i64;
        let d = self.den.degree().expect("nonzero denominator") as i64;
        Some(n - d)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.num.is_homogeneous() && self.den.is_homogeneous()
    }

    pub fn add(&self, other: &Self) -> Self {
        RationalFunction { num: &(&self.num * &other.den) + &(&other.num * &self.den), den: &self.den * &other.den }
    }

    pub fn sub(&self, other: &Self) -> Self {
        RationalFunction { num: &(&self.num * &other.den) - &(&other.num * &self.den), den: &self.den * &other.den }
    }

    pub fn mul(&self, other: &Self) -> Self {
        RationalFunction { num: &self.num * &other.num, den: &self.den * &other.den }
    }

    /// Value at `point`, or `None` where the denominator vanishes.
    pub fn evaluate(&self, point: &[C]) -> Option<C> {
        let d = self.den.evaluate(point);
        if d.is_zero() {
            None
        } else {
            Some(self.num.evaluate(point) / d)
        }
    }

    /// Cross-multiplied comparison `a·d == c·b` (tolerant over doubles).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let lhs = &self.num * &other.den;
        let rhs = &other.num * &self.den;
        lhs.approx_eq(&rhs, tol)
    }
}

impl<C: Coeff> PartialEq for RationalFunction<C> {
    fn eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::QPoly;

    fn rf(n: &str, d: &str) -> RationalFunction<crate::field::Rational> {
        RationalFunction::new(QPoly::parse_with_nvars(n, 2).unwrap(), QPoly::parse_with_nvars(d, 2).unwrap()).unwrap()
    }

    #[test]
    fn equality_by_cross_multiplication() {
        assert_eq!(rf("x1^2 - x2^2", "x1 - x2"), rf("x1 + x2", "1"));
        assert_ne!(rf("x1", "x2"), rf("x2", "x1"));
        assert!(RationalFunction::new(QPoly::one(1), QPoly::zero(1)).is_err());
    }

    #[test]
    fn degree_and_homogeneity() {
        let f = rf("x1*x2^2", "x1^2 + x2^2");
        assert_eq!(f.degree(), Some(1));
        assert!(f.is_homogeneous());
        assert!(!rf("x1 + 1", "x2").is_homogeneous());
        let s = f.add(&rf("x1", "1"));
        assert_eq!(s, rf("x1*x2^2 + x1^3 + x1*x2^2", "x1^2 + x2^2"));
    }
}
