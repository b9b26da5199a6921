#![allow(dead_code)]

pub mod props;

use hermite_detrep::detrep::{LinearPencil, SignConvention};
use hermite_detrep::field::{rat, Rational};
use hermite_detrep::linalg::Matrix;
use hermite_detrep::poly::{Monomial, QPoly};
use hermite_detrep::polymatrix::PolyMatrix;
use hermite_detrep::realzero::Quadratic;
use hermite_detrep::sampling::Rng;
use rand::RngExt;

pub fn q(s: &str) -> QPoly {
    QPoly::parse(s).unwrap()
}

pub fn lin(c: &[Rational]) -> QPoly {
    QPoly::linear(c)
}

/// `[[2, -bᵀx], [-bᵀx, xᵀ(bbᵀ - 2A)x]]`, written out directly from `(A, b)`.
pub fn quadratic_hermite_oracle(quad: &Quadratic<Rational>) -> PolyMatrix<Rational> {
    let n = quad.b.len();
    let mut corner = QPoly::zero(n);
    for i in 0..n {
        for j in 0..n {
            let c = &quad.b[i] * &quad.b[j] - rat(2) * &quad.a[(i, j)];
            let mut e = vec![0u32; n];
            e[i] += 1;
            e[j] += 1;
            corner.add_term(Monomial(e), c);
        }
    }
    let bx = -&lin(&quad.b);
    PolyMatrix::from_rows(vec![vec![QPoly::constant(n, rat(2)), bx.clone()], vec![bx, corner]]).unwrap()
}

pub fn random_symmetric(k: usize, bound: i64, rng: &mut Rng) -> Matrix<Rational> {
    let mut m = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = rat(rng.random_range(-bound..=bound)) / rat(rng.random_range(1..=2));
            m[(i, j)] = v.clone();
            m[(j, i)] = v;
        }
    }
    m
}

/// Random `I - Σ x_i M_i` of size `k` whose determinant has degree exactly `k`.
pub fn random_full_degree_pencil(n: usize, k: usize, rng: &mut Rng) -> (LinearPencil<Rational>, QPoly) {
    loop {
        let coeffs = (0..n).map(|_| random_symmetric(k, 3, rng)).collect();
        let pencil = LinearPencil::new(k, coeffs, SignConvention::IMinusM).unwrap();
        let p = pencil.determinant().unwrap();
        if p.degree() == Some(k) {
            return (pencil, p);
        }
    }
}

pub fn block_diagonal(a: &LinearPencil<Rational>, b: &LinearPencil<Rational>) -> LinearPencil<Rational> {
    let (ka, kb) = (a.size(), b.size());
    let k = ka + kb;
    let coeffs = a
        .coefficients()
        .iter()
        .zip(b.coefficients())
        .map(|(ma, mb)| {
            Matrix::from_fn(k, k, |i, j| match (i < ka, j < ka) {
                (true, true) => ma[(i, j)].clone(),
                (false, false) => mb[(i - ka, j - ka)].clone(),
                _ => rat(0),
            })
        })
        .collect();
    LinearPencil::new(k, coeffs, a.sign()).unwrap()
}

/// Random `p` with `p(0) = 1` and degree exactly `d`.
pub fn random_normalized(n: usize, d: usize, terms: usize, rng: &mut Rng) -> QPoly {
    loop {
        let mut p = QPoly::one(n);
        for _ in 0..terms {
            let deg = rng.random_range(1..=d);
            let mut e = vec![0u32; n];
            for _ in 0..deg {
                e[rng.random_range(0..n)] += 1;
            }
            p.add_term(Monomial(e), rat(rng.random_range(-4..=4)) / rat(rng.random_range(1..=3)));
        }
        if p.degree() == Some(d) {
            return p;
        }
    }
}

/// `max_ij |a_ij - b_ij|` over polynomial coefficients.
pub fn coeff_gap(a: &PolyMatrix<f64>, b: &PolyMatrix<f64>) -> f64 {
    a.max_abs_diff(b)
}
