//! Newton sums and the parametrized Hermite matrix.
//!
//! For `p = 1 + p_1 + ... + p_d` (homogeneous parts `p_i`) the homogenization
//! `P(x, t) = t^d + p_1 t^{d-1} + ... + p_d` is monic in `t`. Its Newton sums
//! are homogeneous polynomials in `x`, and the Hankel matrix of the first
//! `2d - 1` of them is the parametrized Hermite matrix `H(p)`. Evaluated at a
//! point `a`, `H(p)(a)` is positive semidefinite exactly when `p(ta)` has
//! only real roots.

use crate::error::{Error, Result};
use crate::field::{Coeff, Rational};
use crate::linalg::{sign_variations, Matrix};
use crate::poly::Polynomial;
use crate::polymatrix::PolyMatrix;

/// `H(p)` together with the polynomial it was built from.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteMatrix<C: Coeff> {
    base: PolyMatrix<C>,
    degree: usize,
    source: Polynomial<C>,
}

impl<C: Coeff> HermiteMatrix<C> {
    /// Wraps a matrix without checking that it is the Hermite matrix of `source`.
    pub fn from_parts(base: PolyMatrix<C>, degree: usize, source: Polynomial<C>) -> Self {
        HermiteMatrix { base, degree, source }
    }

    pub fn matrix(&self) -> &PolyMatrix<C> {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn source(&self) -> &Polynomial<C> {
        &self.source
    }

    pub fn nvars(&self) -> usize {
        self.base.nvars()
    }

    pub fn evaluate(&self, point: &[C]) -> Matrix<C> {
        self.base.evaluate(point)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D + Copy) -> HermiteMatrix<D> {
        HermiteMatrix { base: self.base.map_coeffs(f), degree: self.degree, source: self.source.map_coeffs(f) }
    }

    pub fn to_f64(&self) -> HermiteMatrix<f64> {
        self.map_coeffs(|c| c.to_f64())
    }

    /// Hankel structure, `(1,1) = d` and entry `(i,j)` homogeneous of degree `i+j-2`.
    pub fn check_invariants(&self) -> bool {
        let d = self.degree;
        let m = &self.base;
        if d == 0 {
            return m.rows() == 0;
        }
        if m[(0, 0)] != Polynomial::constant(m.nvars(), C::from_i64(d as i64)) {
            return false;
        }
        for i in 0..d {
            for j in 0..d {
                if !m[(i, j)].is_homogeneous_of(i + j) {
                    return false;
                }
                let (i0, j0) = if i + j < d { (0, i + j) } else { (i + j - (d - 1), d - 1) };
                if m[(i, j)] != m[(i0, j0)] {
                    return false;
                }
            }
        }
        true
    }
}

fn check_normalized<C: Coeff>(p: &Polynomial<C>) -> Result<()> {
    if p.constant_term() != C::one() {
        Err(Error::NotNormalized)
    } else {
        Ok(())
    }
}

/// Newton sums `N_0, ..., N_{up_to}` of the homogenization of `p`.
///
/// `N_0 = d` and `N_k = -k p_k - Σ_{i=1}^{k-1} p_i N_{k-i}` with `p_k = 0`
/// beyond the degree.
pub fn newton_sums<C: Coeff>(p: &Polynomial<C>, up_to: usize) -> Result<Vec<Polynomial<C>>> {
    check_normalized(p)?;
    let parts = p.homogeneous_parts();
    let d = parts.len() - 1;
    let n = p.nvars();
    let part = |i: usize| if i <= d { Some(&parts[i]) } else { None };
    let mut sums: Vec<Polynomial<C>> = Vec::with_capacity(up_to + 1);
    sums.push(Polynomial::constant(n, C::from_i64(d as i64)));
    for k in 1..=up_to {
        let mut acc = match part(k) {
            Some(pk) => pk.scale(&C::from_i64(-(k as i64))),
            None => Polynomial::zero(n),
        };
        for i in 1..k.min(d + 1) {
            let pi = &parts[i];
            if pi.is_zero() {
                continue;
            }
            acc = &acc - &(pi * &sums[k - i]);
        }
        sums.push(acc);
    }
    Ok(sums)
}

/// The parametrized Hermite matrix `H(p)`, entry `(i,j) = N_{i+j-2}`.
pub fn hermite_matrix<C: Coeff>(p: &Polynomial<C>) -> Result<HermiteMatrix<C>> {
    check_normalized(p)?;
    let d = p.degree().unwrap_or(0);
    let sums = newton_sums(p, (2 * d).saturating_sub(2))?;
    let base = PolyMatrix::from_fn(d, d, p.nvars(), |i, j| sums[i + j].clone());
    Ok(HermiteMatrix { base, degree: d, source: p.clone() })
}

/// Numeric Hermite matrix of a monic univariate polynomial.
pub fn univariate_hermite<C: Coeff>(f: &Polynomial<C>) -> Result<Matrix<C>> {
    let c = f.univariate_coeffs();
    let d = c.len().saturating_sub(1);
    if d == 0 {
        return Err(Error::Degree { expected: ">= 1".into(), found: d as i64 });
    }
    if !c[d].is_one() {
        return Err(Error::NotMonic);
    }
    // Monic t^d + a_1 t^{d-1} + ... + a_d, with a_i = c[d - i].
    let a = |i: usize| if i <= d { c[d - i].clone() } else { C::zero() };
    let mut sums: Vec<C> = vec![C::from_i64(d as i64)];
    for k in 1..=2 * d - 2 {
        let mut acc = -(a(k).mul_ref(&C::from_i64(k as i64)));
        for i in 1..k.min(d + 1) {
            acc = acc - a(i).mul_ref(&sums[k - i]);
        }
        sums.push(acc);
    }
    Ok(Matrix::from_fn(d, d, |i, j| sums[i + j].clone()))
}

/// Exact `(rank, signature)` of a symmetric rational matrix from the sign
/// pattern of its characteristic polynomial.
///
/// The spectrum is real, so Descartes' rule counts positive eigenvalues
/// exactly; negative ones come from `χ(-t)`.
pub fn rank_and_signature(s: &Matrix<Rational>) -> Result<(usize, i64)> {
    let (pos, neg, zero) = inertia(s)?;
    Ok((s.rows() - zero, pos as i64 - neg as i64))
}

/// `(positive, negative, zero)` eigenvalue counts.
pub fn inertia(s: &Matrix<Rational>) -> Result<(usize, usize, usize)> {
    if !s.is_symmetric(0.0) {
        return Err(Error::NotSymmetric);
    }
    let chi = s.charpoly()?;
    let zero = chi.iter().take_while(|c| num_traits::Zero::is_zero(*c)).count();
    let pos = sign_variations(&chi);
    let flipped: Vec<Rational> =
        chi.iter().enumerate().map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() }).collect();
    let neg = sign_variations(&flipped);
    Ok((pos, neg, zero))
}

/// Exact positive-semidefiniteness test.
pub fn is_psd(s: &Matrix<Rational>) -> Result<bool> {
    let (_, neg, _) = inertia(s)?;
    Ok(neg == 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;
    use crate::poly::QPoly;

    fn q(s: &str) -> QPoly {
        QPoly::parse(s).unwrap()
    }

    fn qm(rows: &[&[i64]]) -> Matrix<Rational> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect()).unwrap()
    }

    #[test]
    fn newton_sums_of_two_roots() {
        // t^2 - 3xt + 2x^2 has roots x and 2x.
        let n = newton_sums(&q("1 - 3*x1 + 2*x1^2"), 3).unwrap();
        assert_eq!(n, vec![q("2 + 0*x1"), q("3*x1"), q("5*x1^2"), q("9*x1^3")]);
    }

    #[test]
    fn first_newton_sum_is_minus_p1() {
        let p = q("1 + 3*x1 - x2 + x1*x2^2 - 7*x2^3");
        let n = newton_sums(&p, 1).unwrap();
        assert_eq!(n[1], -&p.homogeneous_part(1));
    }

    #[test]
    fn unnormalized_rejected() {
        assert!(matches!(newton_sums(&q("2 + x1"), 2), Err(Error::NotNormalized)));
        assert!(matches!(hermite_matrix(&q("x1")), Err(Error::NotNormalized)));
    }

    #[test]
    fn plane_cubic() {
        let h = hermite_matrix(&q("x1^3 - x1^2 - x1 + 1 - x2^2")).unwrap();
        let m = h.matrix();
        assert_eq!(m[(0, 0)], q("3 + 0*x2"));
        assert_eq!(m[(0, 1)], q("x1 + 0*x2"));
        assert_eq!(m[(1, 1)], q("3*x1^2 + 2*x2^2"));
        assert_eq!(m[(1, 2)], q("x1^3 + 3*x1*x2^2"));
        assert_eq!(m[(2, 2)], q("3*x1^4 + 8*x1^2*x2^2 + 2*x2^4"));
        assert!(h.check_invariants());
    }

    #[test]
    fn univariate_examples() {
        assert_eq!(univariate_hermite(&q("x1^2 - 3*x1 + 2")).unwrap(), qm(&[&[2, 3], &[3, 5]]));
        assert_eq!(univariate_hermite(&q("x1^2")).unwrap(), qm(&[&[2, 0], &[0, 0]]));
        assert_eq!(univariate_hermite(&q("x1^2 + 1")).unwrap(), qm(&[&[2, 0], &[0, -2]]));
        assert!(matches!(univariate_hermite(&q("2*x1^2 + 1")), Err(Error::NotMonic)));
    }

    #[test]
    fn signatures() {
        assert_eq!(rank_and_signature(&qm(&[&[2, 3], &[3, 5]])).unwrap(), (2, 2));
        assert_eq!(rank_and_signature(&qm(&[&[2, 0], &[0, -2]])).unwrap(), (2, 0));
        assert_eq!(rank_and_signature(&Matrix::zeros(3, 3)).unwrap(), (0, 0));
        assert!(matches!(rank_and_signature(&qm(&[&[1, 2], &[0, 1]])), Err(Error::NotSymmetric)));
    }

    #[test]
    fn psd_decisions() {
        assert!(is_psd(&Matrix::identity(3)).unwrap());
        assert!(!is_psd(&qm(&[&[2, 0], &[0, -2]])).unwrap());
        assert!(is_psd(&qm(&[&[2, 3], &[3, 5]])).unwrap());
        assert!(is_psd(&qm(&[&[1, 1], &[1, 1]])).unwrap());
    }
}
