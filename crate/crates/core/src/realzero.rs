//! Real-zero tests and example polynomials.
//!
//! The sampling test evaluates `H(p)` at rational points and decides
//! positive semidefiniteness exactly. A failing point refutes the real-zero
//! property; passing every sample proves nothing beyond those samples.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{rat, rationalize, Coeff, Rational};
use crate::hermite::{hermite_matrix, is_psd};
use crate::linalg::Matrix;
use crate::poly::{Monomial, Polynomial, QPoly};
use crate::sampling::{Rng, SampleRange};
use crate::univariate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    CertifiedPsdOnSamples,
    Counterexample,
    QuadraticExact,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RzReport {
    pub verdict: Verdict,
    /// Point where `H(p)` fails to be PSD.
    pub witness: Option<Vec<Rational>>,
    pub samples_checked: usize,
}

impl RzReport {
    pub fn is_counterexample(&self) -> bool {
        self.verdict == Verdict::Counterexample
    }
}

/// Evaluates `H(p)` at each point; returns the first point where it is not PSD.
pub fn rz_check_samples(p: &QPoly, points: &[Vec<Rational>]) -> Result<RzReport> {
    let h = hermite_matrix(p)?;
    if h.degree() == 0 {
        return Ok(RzReport { verdict: Verdict::CertifiedPsdOnSamples, witness: None, samples_checked: points.len() });
    }
    if let Some(bad) = points.iter().find(|a| a.len() != p.nvars()) {
        return Err(Error::Dimension(format!("sample of length {} for {} variables", bad.len(), p.nvars())));
    }
    let failing = points.par_iter().position_first(|a| !is_psd(&h.evaluate(a)).unwrap_or(false));
    Ok(match failing {
        Some(i) => {
            RzReport { verdict: Verdict::Counterexample, witness: Some(points[i].clone()), samples_checked: i + 1 }
        }
        None => RzReport { verdict: Verdict::CertifiedPsdOnSamples, witness: None, samples_checked: points.len() },
    })
}

/// [`rz_check_samples`] on `count` random points.
pub fn rz_check_random(p: &QPoly, count: usize, rng: &mut Rng) -> Result<RzReport> {
    let points = SampleRange::default().points(rng, p.nvars(), count);
    rz_check_samples(p, &points)
}

/// `p = xᵀAx + bᵀx + 1` with `A` symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct Quadratic<C> {
    pub a: Matrix<C>,
    pub b: Vec<C>,
}

impl<C: Coeff> Quadratic<C> {
    pub fn decompose(p: &Polynomial<C>) -> Result<Self> {
        if p.degree() != Some(2) {
            return Err(Error::Degree { expected: "2".into(), found: p.degree().map_or(-1, |d| d as i64) });
        }
        if p.constant_term() != C::one() {
            return Err(Error::NotNormalized);
        }
        let n = p.nvars();
        let half = C::one() / C::from_i64(2);
        let mut a = Matrix::zeros(n, n);
        let mut b = vec![C::zero(); n];
        for (m, c) in p.terms() {
            let nz: Vec<usize> = (0..n).filter(|&i| m.0[i] > 0).collect();
            match (m.degree(), nz.as_slice()) {
                (1, [i]) => b[*i] = c.clone(),
                (2, [i]) => a[(*i, *i)] = c.clone(),
                (2, [i, j]) => {
                    a[(*i, *j)] = c.mul_ref(&half);
                    a[(*j, *i)] = c.mul_ref(&half);
                }
                _ => {}
            }
        }
        Ok(Quadratic { a, b })
    }

    pub fn nvars(&self) -> usize {
        self.b.len()
    }

    /// `bbᵀ - 4A`, which is PSD exactly for real-zero quadratics.
    pub fn rz_matrix(&self) -> Matrix<C> {
        let four = C::from_i64(4);
        Matrix::from_fn(self.nvars(), self.nvars(), |i, j| {
            self.b[i].mul_ref(&self.b[j]) - four.mul_ref(&self.a[(i, j)])
        })
    }

    pub fn linear_form(&self) -> Polynomial<C> {
        Polynomial::linear(&self.b)
    }

    pub fn to_polynomial(&self) -> Polynomial<C> {
        let n = self.nvars();
        let mut p = Polynomial::one(n);
        for i in 0..n {
            p.add_term(Monomial::var(n, i), self.b[i].clone());
            for j in 0..n {
                let mut e = vec![0; n];
                e[i] += 1;
                e[j] += 1;
                p.add_term(Monomial(e), self.a[(i, j)].clone());
            }
        }
        p
    }
}

/// Exact real-zero decision for quadratics.
pub fn rz_check_quadratic(p: &QPoly) -> Result<bool> {
    is_psd(&Quadratic::decompose(p)?.rz_matrix())
}

/// [`rz_check_quadratic`] as a report; a negative answer carries an exact witness.
pub fn rz_report_quadratic(p: &QPoly) -> Result<RzReport> {
    let quad = Quadratic::decompose(p)?;
    let s = quad.rz_matrix();
    if is_psd(&s)? {
        return Ok(RzReport { verdict: Verdict::QuadraticExact, witness: None, samples_checked: 0 });
    }
    let witness = negative_direction(&s).ok_or_else(|| Error::Invalid("no witness found".into()))?;
    Ok(RzReport { verdict: Verdict::Counterexample, witness: Some(witness), samples_checked: 0 })
}

/// Rational `a` with `aᵀSa < 0`, starting from the eigenvector of the
/// smallest eigenvalue.
fn negative_direction(s: &Matrix<Rational>) -> Option<Vec<Rational>> {
    let quad = |a: &[Rational]| {
        let mut acc = rat(0);
        for i in 0..a.len() {
            for j in 0..a.len() {
                acc += &a[i] * &s[(i, j)] * &a[j];
            }
        }
        acc
    };
    let eig = s.to_f64().to_nalgebra().symmetric_eigen();
    let k = (0..eig.eigenvalues.len()).min_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]))?;
    for den in [100u64, 10_000, 1_000_000] {
        let a: Option<Vec<Rational>> = eig.eigenvectors.column(k).iter().map(|&v| rationalize(v, den)).collect();
        if let Some(a) = a {
            if Coeff::is_negative(&quad(&a)) {
                return Some(a);
            }
        }
    }
    (0..s.rows())
        .map(|i| (0..s.rows()).map(|j| rat((i == j) as i64)).collect::<Vec<_>>())
        .find(|a| Coeff::is_negative(&quad(a)))
}

/// One-sided square-freeness test on random lines through the origin.
///
/// A square factor `g^2` of `p` survives on every line along which `p`
/// keeps its full degree, so one square-free restriction proves `p`
/// square-free. A `true` answer is certain; `false` means no witness line
/// turned up in `trials` full-degree samples.
pub fn square_free_probabilistic(p: &QPoly, trials: usize, rng: &mut Rng) -> bool {
    let d = match p.degree() {
        Some(d) => d,
        None => return false,
    };
    if d == 0 {
        return true;
    }
    let range = SampleRange::default();
    let mut done = 0;
    let mut attempts = 0;
    while done < trials && attempts < 20 * trials.max(1) {
        attempts += 1;
        let a = range.point(rng, p.nvars());
        let f = p.restrict_to_line(&a).univariate_coeffs();
        if f.len() != d + 1 {
            continue;
        }
        if univariate::is_square_free(&f) {
            return true;
        }
        done += 1;
    }
    false
}

/// Random real-zero quadratic with `bbᵀ - 4A = VVᵀ` for a lower triangular
/// integer `V`, so the factorization is exact over the rationals.
pub fn random_rz_quadratic(n: usize, rng: &mut Rng) -> Quadratic<Rational> {
    use rand::RngExt;
    let range = SampleRange { num_bound: 3, max_den: 2 };
    loop {
        let b: Vec<Rational> = range.point(rng, n);
        // Each column of V is either zero or has a nonzero diagonal entry, so
        // the pivots of VVᵀ are perfect squares.
        let mut v = Matrix::zeros(n, n);
        for j in 0..n {
            if rng.random_range(0..4) == 0 {
                continue;
            }
            v[(j, j)] = rat([-2, -1, 1, 2][rng.random_range(0..4)]);
            for i in j + 1..n {
                v[(i, j)] = rat(rng.random_range(-2..=2));
            }
        }
        let vvt = v.mul(&v.transpose()).expect("square");
        let four = rat(4);
        let a = Matrix::from_fn(n, n, |i, j| (&b[i] * &b[j] - &vvt[(i, j)]) / &four);
        if (0..n).any(|i| (0..n).any(|j| !num_traits::Zero::is_zero(&a[(i, j)]))) {
            return Quadratic { a, b };
        }
    }
}

/// Non-bases of the Vámos matroid (one-based variable indices).
pub const VAMOS_NON_BASES: [[usize; 4]; 5] = [[1, 4, 5, 6], [2, 3, 5, 6], [2, 3, 7, 8], [1, 4, 7, 8], [1, 2, 3, 4]];

/// Basis generating polynomial of the Vámos matroid: the sum of all
/// products of four distinct variables of `x1..x8` except the non-bases.
pub fn vamos_basis_polynomial() -> QPoly {
    let mut q = QPoly::zero(8);
    for a in 1..=8usize {
        for b in a + 1..=8 {
            for c in b + 1..=8 {
                for d in c + 1..=8 {
                    let set = [a, b, c, d];
                    if VAMOS_NON_BASES.contains(&set) {
                        continue;
                    }
                    let mut e = vec![0u32; 8];
                    for &i in &set {
                        e[i - 1] = 1;
                    }
                    q.add_term(Monomial(e), rat(1));
                }
            }
        }
    }
    q
}

/// `q(x + 1) / q(1)`, a real-zero polynomial with value 1 at the origin.
pub fn vamos_polynomial() -> QPoly {
    let q = vamos_basis_polynomial();
    let shifted: Vec<QPoly> = (0..8).map(|i| &QPoly::var(8, i) + &QPoly::one(8)).collect();
    let p = q.compose(&shifted).expect("eight substitutes");
    let c = p.constant_term();
    p.scale(&(rat(1) / c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::ratio;
    use crate::sampling::rng;

    fn q(s: &str) -> QPoly {
        QPoly::parse(s).unwrap()
    }

    #[test]
    fn non_rz_univariate() {
        let p = q("1 + x1^2");
        let rep = rz_check_samples(&p, &[vec![rat(3)]]).unwrap();
        assert_eq!(rep.verdict, Verdict::Counterexample);
        assert_eq!(rep.witness, Some(vec![rat(3)]));
        let h = hermite_matrix(&p).unwrap().evaluate(&[rat(3)]);
        assert_eq!(h, Matrix::from_rows(vec![vec![rat(2), rat(0)], vec![rat(0), rat(-18)]]).unwrap());
        // a = 0 is not a counterexample: H(0) = diag(2, 0).
        let rep = rz_check_samples(&p, &[vec![rat(0)], vec![ratio(1, 3)]]).unwrap();
        assert_eq!(rep.samples_checked, 2);
    }

    #[test]
    fn constant_is_vacuous() {
        let rep = rz_check_samples(&QPoly::one(2), &[vec![rat(1), rat(1)]]).unwrap();
        assert_eq!(rep.verdict, Verdict::CertifiedPsdOnSamples);
    }

    #[test]
    fn quadratic_exact() {
        assert!(rz_check_quadratic(&q("x1^2 + 2*x1 + 1 - x2^2")).unwrap());
        assert!(!rz_check_quadratic(&q("1 + x1^2")).unwrap());
        assert!(rz_check_quadratic(&q("1 + 3*x1 - x2 + 0*x1*x2")).is_err());
        let quad = Quadratic::decompose(&q("x1^2 + 2*x1 + 1 - x2^2")).unwrap();
        assert_eq!(quad.rz_matrix(), Matrix::from_rows(vec![vec![rat(0), rat(0)], vec![rat(0), rat(4)]]).unwrap());
        let p = q("3*x1*x2 - x1^2 + 1/2*x2 + 1");
        assert_eq!(Quadratic::decompose(&p).unwrap().to_polynomial(), p);
    }

    #[test]
    fn quadratic_witness_is_exact() {
        let rep = rz_report_quadratic(&q("1 + x1^2 + x1*x2 - x2")).unwrap();
        assert_eq!(rep.verdict, Verdict::Counterexample);
        let p = q("1 + x1^2 + x1*x2 - x2");
        let a = rep.witness.unwrap();
        assert!(!is_psd(&hermite_matrix(&p).unwrap().evaluate(&a)).unwrap());
    }

    #[test]
    fn square_freeness() {
        let mut r = rng(7);
        assert!(!square_free_probabilistic(&q("1 - 2*x1 + x1^2"), 10, &mut r));
        assert!(square_free_probabilistic(&q("1 - x1^2"), 10, &mut r));
        assert!(square_free_probabilistic(&q("x1^3 - x1^2 - x1 + 1 - x2^2"), 10, &mut r));
    }

    #[test]
    fn vamos() {
        let qv = vamos_basis_polynomial();
        assert_eq!(qv.num_terms(), 65);
        assert_eq!(qv.coeff(&Monomial(vec![1, 0, 0, 1, 1, 1, 0, 0])), rat(0));
        let p = vamos_polynomial();
        assert_eq!(p.constant_term(), rat(1));
        assert_eq!(p.degree(), Some(4));
    }
}
