//! Rational determinantal representations `M = q⁻²·Q·L_t·H(p)⁻¹·Qᵀ`.
//!
//! The inverse is kept as `adj(H)/det(H)`, so `M` is a polynomial matrix
//! over a single polynomial denominator. No common factors are cancelled.

use rayon::prelude::*;
use serde::Serialize;

use crate::detrep::companion;
use crate::error::{Error, Result};
use crate::field::Coeff;
use crate::hermite::hermite_matrix;
use crate::linalg::Matrix;
use crate::poly::Polynomial;
use crate::polymatrix::PolyMatrix;
use crate::ratfunc::RationalFunction;
use crate::realzero::square_free_probabilistic;
use crate::sampling::{Rng, SampleRange};
use crate::sos::SosCertificate;

/// Matrix `num / den` with a scalar denominator.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMatrix<C: Coeff> {
    num: PolyMatrix<C>,
    den: Polynomial<C>,
}

impl<C: Coeff> RationalMatrix<C> {
    pub fn new(num: PolyMatrix<C>, den: Polynomial<C>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDivisor);
        }
        if !num.is_square() {
            return Err(Error::NotSquare { rows: num.rows(), cols: num.cols() });
        }
        if num.nvars() != den.nvars() {
            return Err(Error::NvarsMismatch(num.nvars(), den.nvars()));
        }
        Ok(RationalMatrix { num, den })
    }

    pub fn num(&self) -> &PolyMatrix<C> {
        &self.num
    }

    pub fn den(&self) -> &Polynomial<C> {
        &self.den
    }

    pub fn size(&self) -> usize {
        self.num.rows()
    }

    pub fn entry(&self, i: usize, j: usize) -> RationalFunction<C> {
        RationalFunction::new(self.num[(i, j)].clone(), self.den.clone()).expect("nonzero denominator")
    }

    /// `M(a)`, or `None` where the denominator vanishes.
    pub fn evaluate(&self, a: &[C]) -> Option<Matrix<C>> {
        let d = self.den.evaluate(a);
        if d.is_zero() {
            return None;
        }
        Some(self.num.evaluate(a).map(|v| v.clone() / d.clone()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.num.is_symmetric(tol)
    }

    /// `den` is homogeneous and every nonzero `num(i,j)` is homogeneous of
    /// degree `deg(den) + 1`, so every entry has degree one.
    pub fn check_degrees(&self) -> bool {
        let dd = match self.den.degree() {
            Some(d) if self.den.is_homogeneous() => d,
            _ => return false,
        };
        self.num.entries().all(|e| e.is_zero() || e.is_homogeneous_of(dd + 1))
    }

    /// Entrywise cross-multiplied comparison with `other(i,j)/other_den(i,j)`.
    pub fn matches(&self, other: &[Vec<RationalFunction<C>>], tol: f64) -> bool {
        let k = self.size();
        other.len() == k
            && other.iter().enumerate().all(|(i, row)| {
                row.len() == k && row.iter().enumerate().all(|(j, f)| self.entry(i, j).approx_eq(f, tol))
            })
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D + Copy) -> RationalMatrix<D> {
        RationalMatrix { num: self.num.map_coeffs(f), den: self.den.map_coeffs(f) }
    }

    pub fn to_f64(&self) -> RationalMatrix<f64> {
        self.map_coeffs(|c| c.to_f64())
    }
}

/// `M = w·q⁻²·Q·L_t·adj(H)·Qᵀ / det(H)` for a certificate `q²·H = w·QᵀQ`.
pub fn rational_pencil<C: Coeff>(p: &Polynomial<C>, cert: &SosCertificate<C>) -> Result<RationalMatrix<C>> {
    let h = hermite_matrix(p)?;
    if !cert.verify(&h)? {
        return Err(Error::InvalidCertificate("q²·H(p) differs from w·QᵀQ".into()));
    }
    if let Some(pq) = crate::detrep::poly_to_rational(p, 1_000_000) {
        if !square_free_probabilistic(&pq, 20, &mut crate::sampling::rng(0x5eed)) {
            log::warn!("p is not certified square-free");
        }
    }
    let l = companion(p, cert.shift())?;
    let hm = h.matrix();
    let det = hm.det()?;
    if det.approx_eq(&Polynomial::zero(p.nvars()), 1e-12) {
        return Err(Error::SingularHermite);
    }
    let adj = hm.adjugate()?;
    let q = cert.matrix();
    let num = q.mul(l.matrix())?.mul(&adj)?.mul(&q.transpose())?.scale(cert.weight());
    let den = &(cert.q() * cert.q()) * &det;
    RationalMatrix::new(num, den)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatrepReport {
    /// `q²·H(p) = w·QᵀQ` and `det(I - L_t) = p`; `None` without a certificate.
    pub symbolic: Option<bool>,
    /// `det(I - M(a)) = p(a)` at every sampled point.
    pub numeric: bool,
    pub points_checked: usize,
    pub max_error: f64,
}

impl RatrepReport {
    pub fn passed(&self) -> bool {
        self.numeric && self.symbolic != Some(false)
    }
}

/// Compares `det(I - M(a))` with `p(a)` at `points` random points of
/// `[-1, 1]^n`, exactly over the rationals and to `1e-8·max(1, |p(a)|)`
/// over doubles. Points where the denominator vanishes are redrawn.
pub fn verify_rational<C: Coeff>(
    m: &RationalMatrix<C>,
    p: &Polynomial<C>,
    cert: Option<&SosCertificate<C>>,
    points: usize,
    rng: &mut Rng,
) -> Result<RatrepReport> {
    let symbolic = match cert {
        Some(cert) => {
            let h = hermite_matrix(p)?;
            let ok = cert.verify(&h)?
                && companion(p, cert.shift()).map(|_| true).or_else(|e| match e {
                    Error::DetMismatch(_) => Ok(false),
                    e => Err(e),
                })?;
            Some(ok)
        }
        None => None,
    };
    let n = p.nvars();
    let mut samples = Vec::with_capacity(points);
    let mut attempts = 0;
    while samples.len() < points {
        attempts += 1;
        if attempts > 20 * points.max(1) {
            return Err(Error::DegenerateSamples);
        }
        let a: Vec<C> = SampleRange::unit_point(rng, n).iter().map(C::from_rational).collect();
        if m.den.evaluate(&a).is_negligible(1e-12) {
            continue;
        }
        samples.push(a);
    }
    let errors: Vec<Option<f64>> = samples
        .par_iter()
        .map(|a| {
            let ma = m.evaluate(a)?;
            let det = Matrix::identity(m.size()).sub(&ma).ok()?.det().ok()?;
            let pa = p.evaluate(a);
            let diff = det - pa.clone();
            if C::EXACT {
                Some(if diff.is_zero() { 0.0 } else { f64::INFINITY })
            } else {
                Some(diff.magnitude() / pa.magnitude().max(1.0))
            }
        })
        .collect();
    let max_error = errors.iter().map(|e| e.unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
    Ok(RatrepReport { symbolic, numeric: max_error <= 1e-8, points_checked: samples.len(), max_error })
}

/// `M(λa) = λ·M(a)` at random points and scalings, plus [`RationalMatrix::check_degrees`].
pub fn check_homogeneity<C: Coeff>(m: &RationalMatrix<C>, trials: usize, rng: &mut Rng) -> bool {
    if !m.check_degrees() {
        return false;
    }
    let range = SampleRange::default();
    let n = m.num.nvars();
    let mut done = 0;
    let mut attempts = 0;
    while done < trials && attempts < 20 * trials.max(1) {
        attempts += 1;
        let a: Vec<C> = range.point(rng, n).iter().map(C::from_rational).collect();
        let lambda = C::from_rational(&range.nonzero_rational(rng));
        let scaled: Vec<C> = a.iter().map(|v| v.mul_ref(&lambda)).collect();
        let (Some(ma), Some(ms)) = (m.evaluate(&a), m.evaluate(&scaled)) else {
            continue;
        };
        let expected = ma.scale(&lambda);
        let tol = 1e-9 * expected.max_abs().max(1.0);
        let diff = ms.sub(&expected).expect("same shape");
        if !(0..m.size()).all(|i| (0..m.size()).all(|j| diff[(i, j)].is_negligible(tol))) {
            return false;
        }
        done += 1;
    }
    done == trials
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rat;
    use crate::poly::QPoly;
    use crate::sampling::rng;
    use crate::sos::quadratic_sos;

    fn q(s: &str) -> QPoly {
        QPoly::parse(s).unwrap()
    }

    #[test]
    fn degree_one_case() {
        let p = q("1 - 2*x1 + 3*x2");
        let cert = SosCertificate::new(QPoly::one(2), PolyMatrix::identity(1, 2), rat(1)).unwrap();
        let m = rational_pencil(&p, &cert).unwrap();
        assert_eq!(m.den(), &QPoly::one(2));
        assert_eq!(m.num()[(0, 0)], q("2*x1 - 3*x2"));
        let rep = verify_rational(&m, &p, Some(&cert), 30, &mut rng(1)).unwrap();
        assert_eq!(rep.symbolic, Some(true));
        assert!(rep.numeric);
        assert_eq!(rep.max_error, 0.0);
    }

    #[test]
    fn quadratic_representation_is_exact() {
        let p = q("1 + 2*x1 + x1^2 - x2^2 - x3^2");
        let cert = quadratic_sos(&p).unwrap();
        let m = rational_pencil(&p, &cert).unwrap();
        assert!(m.is_symmetric(0.0));
        assert!(m.check_degrees());
        let mut g = rng(2);
        assert!(check_homogeneity(&m, 10, &mut g));
        assert!(verify_rational(&m, &p, Some(&cert), 20, &mut g).unwrap().passed());
    }

    #[test]
    fn perturbed_numerator_fails() {
        let p = q("1 + 2*x1 + x1^2 - x2^2");
        let cert = quadratic_sos(&p).unwrap();
        let m = rational_pencil(&p, &cert).unwrap();
        let mut num = m.num().clone();
        num[(0, 1)] = &num[(0, 1)] + &q("x1^3 + 0*x2");
        num[(1, 0)] = num[(0, 1)].clone();
        let bad = RationalMatrix::new(num.clone(), m.den().clone()).unwrap();
        let rep = verify_rational(&bad, &p, None, 20, &mut rng(3)).unwrap();
        assert!(!rep.numeric);
        num[(0, 0)] = &num[(0, 0)] + &q("1 + 0*x2");
        let dehomogenized = RationalMatrix::new(num, m.den().clone()).unwrap();
        assert!(!check_homogeneity(&dehomogenized, 5, &mut rng(4)));
    }
}
