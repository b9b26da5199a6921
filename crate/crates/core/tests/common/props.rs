use hermite_detrep::detrep::{LinearPencil, SignConvention};
use hermite_detrep::field::{ratio, Rational};
use hermite_detrep::hermite::{hermite_matrix, newton_sums};
use hermite_detrep::linalg::Matrix;
use hermite_detrep::poly::{Monomial, QPoly};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

use super::block_diagonal;

pub const SEED: [u8; 32] = *b"hermite-detrep-properties-seed!!";

pub fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &SEED))
}

fn fmt_err<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

pub fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| ratio(n, d))
}

pub fn poly(nvars: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = QPoly> {
    prop::collection::vec((prop::collection::vec(0..=max_exp, nvars), rational()), 0..=max_terms)
        .prop_map(move |ts| QPoly::from_terms(nvars, ts.into_iter().map(|(e, c)| (Monomial(e), c))))
}

/// `p` with `p(0) = 1` and positive degree.
pub fn normalized(nvars: usize, max_exp: u32, max_terms: usize) -> impl Strategy<Value = QPoly> {
    poly(nvars, max_exp, max_terms)
        .prop_map(move |p| {
            let c0 = p.constant_term();
            let mut p = p;
            p.add_term(Monomial::one(nvars), ratio(1, 1) - c0);
            p
        })
        .prop_filter("positive degree", |p| p.degree().unwrap_or(0) > 0)
}

fn symmetric(k: usize) -> impl Strategy<Value = Matrix<Rational>> {
    prop::collection::vec(rational(), k * (k + 1) / 2).prop_map(move |v| {
        let mut m = Matrix::zeros(k, k);
        let mut it = v.into_iter();
        for i in 0..k {
            for j in i..k {
                let x = it.next().unwrap();
                m[(i, j)] = x.clone();
                m[(j, i)] = x;
            }
        }
        m
    })
}

pub fn pencil(nvars: usize, k: usize) -> impl Strategy<Value = LinearPencil<Rational>> {
    prop::collection::vec(symmetric(k), nvars)
        .prop_map(move |c| LinearPencil::new(k, c, SignConvention::IMinusM).unwrap())
}

pub fn ring_axioms(runner: &mut TestRunner) -> Result<(), String> {
    let s = (poly(3, 2, 5), poly(3, 2, 5), poly(3, 2, 5));
    fmt_err(runner.run(&s, |(a, b, c)| {
        let zero = QPoly::zero(3);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        let copy = a.clone();
        prop_assert_eq!(&a - &copy, zero.clone());
        prop_assert_eq!(&a + &zero, a.clone());
        prop_assert_eq!(&a * &QPoly::one(3), a.clone());
        let parts = a.homogeneous_parts();
        let back = parts.iter().fold(zero.clone(), |acc, part| &acc + part);
        prop_assert_eq!(back, a.clone());
        for (k, part) in parts.iter().enumerate() {
            prop_assert!(part.is_zero() || part.is_homogeneous_of(k));
        }
        if let (Some(da), Some(db)) = (a.degree(), b.degree()) {
            prop_assert_eq!((&a * &b).degree(), Some(da + db));
        }
        Ok(())
    }))
}

pub fn hankel_homogeneity(runner: &mut TestRunner) -> Result<(), String> {
    let s = (normalized(3, 2, 5), prop::collection::vec(rational(), 3), rational());
    fmt_err(runner.run(&s, |(p, a, lambda)| {
        let h = hermite_matrix(&p).unwrap();
        let m = h.matrix();
        let d = p.degree().unwrap();
        prop_assert_eq!(m.rows(), d);
        prop_assert!(h.check_invariants());
        prop_assert_eq!(m[(0, 0)].clone(), QPoly::constant(3, ratio(d as i64, 1)));
        for i in 0..d {
            for j in 0..d {
                let e = &m[(i, j)];
                prop_assert!(e.is_zero() || e.is_homogeneous_of(i + j));
                if i + 1 < d && j > 0 {
                    prop_assert_eq!(e, &m[(i + 1, j - 1)]);
                }
            }
        }
        let scaled: Vec<Rational> = a.iter().map(|v| v * &lambda).collect();
        let (ha, hs) = (h.evaluate(&a), h.evaluate(&scaled));
        for i in 0..d {
            for j in 0..d {
                let factor = num_traits::Pow::pow(&lambda, (i + j) as u32);
                prop_assert_eq!(hs[(i, j)].clone(), &ha[(i, j)] * &factor);
            }
        }
        Ok(())
    }))
}

pub fn divisibility_roundtrip(runner: &mut TestRunner) -> Result<(), String> {
    let s = (poly(3, 2, 4), poly(3, 2, 4));
    fmt_err(runner.run(&s, |(a, b)| {
        prop_assume!(!b.is_zero());
        let ab = &a * &b;
        prop_assert_eq!(ab.exact_divide(&b).unwrap(), Some(a.clone()));
        let (quot, rem) = ab.div_rem(&b).unwrap();
        prop_assert_eq!(quot, a.clone());
        prop_assert!(rem.is_zero());
        if b.degree().unwrap() > 0 {
            let shifted = &ab + &QPoly::one(3);
            prop_assert_eq!(shifted.exact_divide(&b).unwrap(), None);
        }
        Ok(())
    }))
}

/// `p = Π (1 + ℓ_i)` has roots `-ℓ_i(x)`, so `N_k = Σ (-ℓ_i)^k`.
pub fn newton_sums_known_roots(runner: &mut TestRunner) -> Result<(), String> {
    let s = prop::collection::vec(prop::collection::vec(rational(), 3), 1..=4);
    fmt_err(runner.run(&s, |forms| {
        let forms: Vec<QPoly> = forms.iter().map(|c| QPoly::linear(c)).collect();
        let p = forms.iter().fold(QPoly::one(3), |acc, l| &acc * &(&QPoly::one(3) + l));
        prop_assume!(p.degree() == Some(forms.len()));
        let d = forms.len();
        let sums = newton_sums(&p, 2 * d).unwrap();
        for (k, nk) in sums.iter().enumerate() {
            let expected = forms.iter().fold(QPoly::zero(3), |acc, l| &acc + &(-l).pow(k as u32));
            prop_assert_eq!(nk, &expected, "N_{}", k);
        }
        Ok(())
    }))
}

/// `charpoly(M(a)) = t^{k-rd}·(t^d p(a/t))^r` for `det(I - M) = p^r`.
pub fn eigenvalue_correspondence(runner: &mut TestRunner) -> Result<(), String> {
    let s = (1usize..=3, 0usize..=2, any::<bool>(), prop::collection::vec(rational(), 2));
    fmt_err(runner.run(
        &s.prop_flat_map(|(k, extra, twice, a)| (pencil(2, k), Just(extra), Just(twice), Just(a))),
        |(m, extra, twice, a)| {
            let p = m.determinant().unwrap();
            let d = p.degree().unwrap_or(0);
            let (big, r) = if twice { (block_diagonal(&m, &m), 2u32) } else { (m.clone(), 1) };
            let big = big.pad(extra);
            let k = big.size();
            prop_assert_eq!(big.determinant().unwrap(), p.pow(r));
            let chi = big.linear_part_at(&a).charpoly().unwrap();
            // t^d p(a/t) = Σ_i p_i(a) t^{d-i}, lowest coefficient first.
            let parts = p.homogeneous_parts();
            let rev: Vec<Rational> = (0..=d).map(|j| parts[d - j].evaluate(&a)).collect();
            let mut expected = vec![ratio(1, 1)];
            for _ in 0..r {
                let mut next = vec![ratio(0, 1); expected.len() + d];
                for (i, x) in expected.iter().enumerate() {
                    for (j, y) in rev.iter().enumerate() {
                        next[i + j] += x * y;
                    }
                }
                expected = next;
            }
            let mut shifted = vec![ratio(0, 1); k - r as usize * d];
            shifted.extend(expected);
            prop_assert_eq!(chi, shifted);
            Ok(())
        },
    ))
}
