//! Sparse multivariate polynomials.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vectors. The derived
//! ordering on [`Monomial`] is lexicographic with `x1 > x2 > ... > xn`, which
//! is the order used both for long division and for canonical printing
//! (largest term first).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::field::{Coeff, Rational};

/// Exponent vector of a monomial.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.checked_sub(*b)).collect::<Option<Vec<_>>>().map(Monomial)
    }

    pub fn eval<C: Coeff>(&self, point: &[C]) -> C {
        let mut acc = C::one();
        for (x, &e) in point.iter().zip(&self.0) {
            for _ in 0..e {
                acc = acc.mul_ref(x);
            }
        }
        acc
    }

    /// All exponent vectors in `nvars` variables of total degree exactly `deg`,
    /// in descending lexicographic order.
    pub fn all_of_degree(nvars: usize, deg: usize) -> Vec<Monomial> {
        fn rec(nvars: usize, left: usize, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if prefix.len() + 1 == nvars {
                prefix.push(left as u32);
                out.push(Monomial(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in (0..=left).rev() {
                prefix.push(e as u32);
                rec(nvars, left - e, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if nvars == 0 {
            if deg == 0 {
                out.push(Monomial(Vec::new()));
            }
            return out;
        }
        rec(nvars, deg, &mut Vec::with_capacity(nvars), &mut out);
        out
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Sparse polynomial in `nvars` variables over the field `C`.
///
/// No stored coefficient is zero and every exponent vector has length `nvars`.
#[derive(Clone, PartialEq)]
pub struct Polynomial<C> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

pub type QPoly = Polynomial<Rational>;
pub type FPoly = Polynomial<f64>;

impl<C: Coeff> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    /// The variable `x_{i+1}` (zero-based index `i`).
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {} out of range for {} variables", i, nvars);
        let mut p = Self::zero(nvars);
        p.terms.insert(Monomial::var(nvars, i), C::one());
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, C)>>(nvars: usize, terms: I) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.0.len(), nvars, "exponent vector length");
            p.add_term(m, c);
        }
        p
    }

    /// Linear form `Σ coeffs[i]·x_{i+1}`.
    pub fn linear(coeffs: &[C]) -> Self {
        let n = coeffs.len();
        Self::from_terms(n, coeffs.iter().enumerate().map(|(i, c)| (Monomial::var(n, i), c.clone())))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Monomial::one(self.nvars))
    }

    /// Total degree; `None` stands for the degree −∞ of the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Largest term in lexicographic order.
    pub fn leading_term(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    /// Zero counts as homogeneous of every degree.
    pub fn is_homogeneous_of(&self, k: usize) -> bool {
        self.terms.keys().all(|m| m.degree() == k)
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.degree() {
            None => true,
            Some(k) => self.is_homogeneous_of(k),
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get().add_ref(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Same polynomial viewed in `n >= nvars` variables.
    pub fn with_nvars(&self, n: usize) -> Self {
        assert!(n >= self.nvars, "cannot drop variables");
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = m.0.clone();
                e.resize(n, 0);
                (Monomial(e), c.clone())
            })
            .collect();
        Polynomial { nvars: n, terms }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            Err(Error::NvarsMismatch(self.nvars, other.nvars))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut acc: BTreeMap<Monomial, C> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.mul(mb);
                let c = ca.mul_ref(cb);
                match acc.get_mut(&m) {
                    Some(v) => *v = v.add_ref(&c),
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Polynomial { nvars: self.nvars, terms: acc })
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), v.mul_ref(c))).filter(|(_, v)| !v.is_zero()).collect();
        Polynomial { nvars: self.nvars, terms }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Sum of the terms of total degree exactly `k`.
    pub fn homogeneous_part(&self, k: usize) -> Self {
        let terms = self.terms.iter().filter(|(m, _)| m.degree() == k).map(|(m, c)| (m.clone(), c.clone())).collect();
        Polynomial { nvars: self.nvars, terms }
    }

    /// `[p_0, p_1, ..., p_deg]`; empty for the zero polynomial.
    pub fn homogeneous_parts(&self) -> Vec<Self> {
        let d = match self.degree() {
            Some(d) => d,
            None => return Vec::new(),
        };
        let mut parts = vec![Self::zero(self.nvars); d + 1];
        for (m, c) in &self.terms {
            parts[m.degree()].terms.insert(m.clone(), c.clone());
        }
        parts
    }

    pub fn evaluate(&self, point: &[C]) -> C {
        assert_eq!(point.len(), self.nvars, "point dimension");
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            acc = acc + c.mul_ref(&m.eval(point));
        }
        acc
    }

    /// `p(t·a)` as a polynomial in the single variable `t`; the coefficient of
    /// `t^k` is `p_k(a)`.
    pub fn restrict_to_line(&self, a: &[C]) -> Self {
        assert_eq!(a.len(), self.nvars, "point dimension");
        let mut out = Self::zero(1);
        for (m, c) in &self.terms {
            out.add_term(Monomial(vec![m.degree() as u32]), c.mul_ref(&m.eval(a)));
        }
        out
    }

    /// Coefficients of a univariate polynomial, lowest degree first.
    pub fn univariate_coeffs(&self) -> Vec<C> {
        assert_eq!(self.nvars, 1, "univariate polynomial expected");
        let d = self.degree().map_or(0, |d| d + 1);
        let mut out = vec![C::zero(); d];
        for (m, c) in &self.terms {
            out[m.0[0] as usize] = c.clone();
        }
        out
    }

    pub fn from_univariate_coeffs(coeffs: &[C]) -> Self {
        Self::from_terms(1, coeffs.iter().enumerate().map(|(k, c)| (Monomial(vec![k as u32]), c.clone())))
    }

    /// Substitutes `x_i := subs[i]`; all substitutes share a variable count.
    pub fn compose(&self, subs: &[Polynomial<C>]) -> Result<Self> {
        if subs.len() != self.nvars {
            return Err(Error::Dimension(format!("{} substitutes for {} variables", subs.len(), self.nvars)));
        }
        let m = subs.first().map_or(0, |s| s.nvars);
        if let Some(bad) = subs.iter().find(|s| s.nvars != m) {
            return Err(Error::NvarsMismatch(m, bad.nvars));
        }
        let max_exp: Vec<u32> =
            (0..self.nvars).map(|i| self.terms.keys().map(|mo| mo.0[i]).max().unwrap_or(0)).collect();
        let powers: Vec<Vec<Polynomial<C>>> = subs
            .iter()
            .zip(&max_exp)
            .map(|(s, &e)| {
                let mut v = vec![Polynomial::one(m)];
                for k in 1..=e as usize {
                    let next = &v[k - 1] * s;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut out = Polynomial::zero(m);
        for (mo, c) in &self.terms {
            let mut t = Polynomial::constant(m, c.clone());
            for (i, &e) in mo.0.iter().enumerate() {
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// `f / divisor` when the division is exact, `None` otherwise.
    ///
    /// Single-divisor long division in lex order: the remainder vanishes
    /// exactly when `divisor` divides `self`, so the first leading term that
    /// is not divisible by the divisor's leading term settles the answer.
    pub fn exact_divide(&self, divisor: &Self) -> Result<Option<Self>> {
        self.check(divisor)?;
        let (lm, lc) = match divisor.leading_term() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return Err(Error::ZeroDivisor),
        };
        let mut rest = self.clone();
        let mut quotient = Self::zero(self.nvars);
        while let Some((m, c)) = rest.leading_term() {
            let qm = match m.div(&lm) {
                Some(qm) => qm,
                None => return Ok(None),
            };
            let qc = c.clone() / lc.clone();
            let term = Polynomial::from_terms(self.nvars, [(qm.clone(), qc.clone())]);
            let before = m.clone();
            rest = &rest - &(&term * divisor);
            // Cancel the leading term outright so float round-off cannot stall.
            rest.terms.remove(&before);
            quotient.add_term(qm, qc);
        }
        Ok(Some(quotient))
    }

    /// Lex-order division `self = q·divisor + r` where no term of `r` is
    /// divisible by the divisor's leading monomial.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        self.check(divisor)?;
        let (lm, lc) = match divisor.leading_term() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return Err(Error::ZeroDivisor),
        };
        let mut rest = self.clone();
        let mut quotient = Self::zero(self.nvars);
        let mut remainder = Self::zero(self.nvars);
        while let Some((m, c)) = rest.leading_term() {
            let (m, c) = (m.clone(), c.clone());
            match m.div(&lm) {
                Some(qm) => {
                    let qc = c / lc.clone();
                    let term = Polynomial::from_terms(self.nvars, [(qm.clone(), qc.clone())]);
                    rest = &rest - &(&term * divisor);
                    rest.terms.remove(&m);
                    quotient.add_term(qm, qc);
                }
                None => {
                    rest.terms.remove(&m);
                    remainder.add_term(m, c);
                }
            }
        }
        Ok((quotient, remainder))
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn to_f64(&self) -> FPoly {
        self.map_coeffs(|c| c.to_f64())
    }

    /// Largest coefficient magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let diff = self - other;
        diff.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    /// Exact equality over exact fields, coefficient-wise `tol` otherwise.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if C::EXACT {
            self == other
        } else {
            self.nvars == other.nvars && self.max_abs_diff(other) <= tol
        }
    }

    /// Drops coefficients with magnitude at most `tol` (no-op over exact fields).
    pub fn prune(&self, tol: f64) -> Self {
        let terms =
            self.terms.iter().filter(|(_, c)| !c.is_negligible(tol)).map(|(m, c)| (m.clone(), c.clone())).collect();
        Polynomial { nvars: self.nvars, terms }
    }

    /// Parses the text grammar, inferring the variable count from the
    /// largest index used.
    pub fn parse(s: &str) -> Result<Self> {
        crate::parse::parse_polynomial(s, None)
    }

    /// Parses with a fixed variable count; indices above `nvars` are errors.
    pub fn parse_with_nvars(s: &str, nvars: usize) -> Result<Self> {
        crate::parse::parse_polynomial(s, Some(nvars))
    }
}

impl<C: Coeff> fmt::Display for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            let is_const = m.0.iter().all(|&e| e == 0);
            if is_const {
                write!(f, "{}", mag.format_literal())?;
            } else if mag.is_one() {
                write!(f, "{}", m)?;
            } else {
                write!(f, "{}*{}", mag.format_literal(), m)?;
            }
        }
        Ok(())
    }
}

impl<C: Coeff> fmt::Debug for Polynomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial[{}]({})", self.nvars, self)
    }
}

// Operator forms panic on mismatched variable counts; use the `checked_*`
// methods at API boundaries.
impl<'a, C: Coeff> Add<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: &'a Polynomial<C>) -> Polynomial<C> {
        self.checked_add(rhs).expect("polynomial add")
    }
}

impl<'a, C: Coeff> Sub<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: &'a Polynomial<C>) -> Polynomial<C> {
        self.checked_sub(rhs).expect("polynomial sub")
    }
}

impl<'a, C: Coeff> Mul<&'a Polynomial<C>> for &'a Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: &'a Polynomial<C>) -> Polynomial<C> {
        self.checked_mul(rhs).expect("polynomial mul")
    }
}

impl<C: Coeff> Neg for &Polynomial<C> {
    type Output = Polynomial<C>;
    fn neg(self) -> Polynomial<C> {
        self.scale(&-C::one())
    }
}

impl<C: Coeff> Add for Polynomial<C> {
    type Output = Polynomial<C>;
    fn add(self, rhs: Polynomial<C>) -> Polynomial<C> {
        &self + &rhs
    }
}

impl<C: Coeff> Sub for Polynomial<C> {
    type Output = Polynomial<C>;
    fn sub(self, rhs: Polynomial<C>) -> Polynomial<C> {
        &self - &rhs
    }
}

impl<C: Coeff> Mul for Polynomial<C> {
    type Output = Polynomial<C>;
    fn mul(self, rhs: Polynomial<C>) -> Polynomial<C> {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, ratio};

    fn q(s: &str) -> QPoly {
        QPoly::parse(s).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let a = q("1 + x1");
        let b = q("1 - x1");
        assert_eq!(&a * &b, q("1 - x1^2"));
        assert_eq!(&a + &QPoly::zero(1), a);
    }

    #[test]
    fn binomial_cube() {
        let p = q("x1 + x2").pow(3);
        assert_eq!(p, q("x1^3 + 3*x1^2*x2 + 3*x1*x2^2 + x2^3"));
    }

    #[test]
    fn mismatched_nvars() {
        let a = q("x1");
        let b = q("x2");
        assert!(matches!(a.checked_add(&b), Err(Error::NvarsMismatch(1, 2))));
    }

    #[test]
    fn homogeneous_parts() {
        let p = q("1 + 2*x1 + x1^2");
        assert_eq!(p.homogeneous_part(1), q("2*x1"));
        assert!(p.homogeneous_part(3).is_zero());
        let quad = q("x1^2 + 3*x1*x2 - x2^2 + 4*x1 - x2 + 1");
        assert_eq!(quad.homogeneous_part(2), q("x1^2 + 3*x1*x2 - x2^2"));
    }

    #[test]
    fn evaluation_and_lines() {
        assert_eq!(q("1 - x1^2").evaluate(&[rat(1)]), rat(0));
        let p = q("x1^2 + 2*x1 + 1 - x2^2");
        assert_eq!(p.evaluate(&[rat(0), rat(0)]), rat(1));
        assert_eq!(p.evaluate(&[rat(1), rat(2)]), rat(0));
        assert_eq!(q("1 - x1^2").restrict_to_line(&[rat(1)]), q("1 - x1^2"));
        assert_eq!(p.restrict_to_line(&[rat(0), rat(1)]), q("1 - x1^2"));
    }

    #[test]
    fn exact_division() {
        assert_eq!(q("1 - x1^2").exact_divide(&q("1 - x1")).unwrap(), Some(q("1 + x1")));
        assert_eq!(q("x1*x2 + 1").exact_divide(&q("x1 + 0*x2")).unwrap(), None);
        assert!(matches!(q("x1").exact_divide(&QPoly::zero(1)), Err(Error::ZeroDivisor)));
    }

    #[test]
    fn composition() {
        let p = q("x1^2 - x2");
        let subs = [q("x1 + x2"), q("2*x2 + 0*x1")];
        assert_eq!(p.compose(&subs).unwrap(), q("x1^2 + 2*x1*x2 + x2^2 - 2*x2"));
    }

    #[test]
    fn printing_is_canonical() {
        let p = q("1 + 2*x1 - x1^2*x2 + 3/4*x2");
        assert_eq!(p.to_string(), "-x1^2*x2 + 2*x1 + 3/4*x2 + 1");
        assert_eq!(QPoly::zero(2).to_string(), "0");
        assert_eq!(q("-1").to_string(), "-1");
        assert_eq!(q("x1").scale(&ratio(-1, 2)).to_string(), "-1/2*x1");
    }

    #[test]
    fn degrees() {
        assert_eq!(QPoly::zero(2).degree(), None);
        assert_eq!(q("1 + x1*x2^2").degree(), Some(3));
        assert!(q("x1*x2 + x2^2").is_homogeneous());
        assert!(!q("x1 + 1").is_homogeneous());
    }

    #[test]
    fn monomials_of_degree() {
        assert_eq!(Monomial::all_of_degree(3, 2).len(), 6);
        assert_eq!(Monomial::all_of_degree(8, 3).len(), 120);
        assert_eq!(Monomial::all_of_degree(2, 0), vec![Monomial(vec![0, 0])]);
    }
}
