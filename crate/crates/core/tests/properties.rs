mod common;

use common::props::{self, runner};
use common::{random_full_degree_pencil, random_normalized};
use hermite_detrep::detrep::{
    companion, extension_holds, quadratic_pencil, solve_extension, verify_detrep, DetCheck, Extension,
    ExtensionOptions, LinearPencil,
};
use hermite_detrep::field::{rat, Coeff, Rational};
use hermite_detrep::hermite::hermite_matrix;
use hermite_detrep::poly::QPoly;
use hermite_detrep::polymatrix::PolyMatrix;
use hermite_detrep::ratrep::rational_pencil;
use hermite_detrep::realzero::{random_rz_quadratic, square_free_probabilistic};
use hermite_detrep::sampling::{rng, SampleRange};
use hermite_detrep::sdp::{solve, SdpOptions, SdpProblem, SdpStatus, SymMatrix};
use hermite_detrep::sos::{find_sos, quadratic_sos, sos_from_detrep, SosSearch, SosSearchOptions};
use hermite_detrep::univariate;
use nalgebra::DMatrix;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn check(r: Result<(), String>) {
    if let Err(e) = r {
        panic!("{e}");
    }
}

#[test]
fn ring_axioms() {
    check(props::ring_axioms(&mut runner(96)));
}

#[test]
fn hankel_and_homogeneity() {
    check(props::hankel_homogeneity(&mut runner(96)));
}

#[test]
fn divisibility_roundtrip() {
    check(props::divisibility_roundtrip(&mut runner(96)));
}

#[test]
fn newton_sums_match_known_roots() {
    check(props::newton_sums_known_roots(&mut runner(96)));
}

#[test]
fn eigenvalue_correspondence() {
    check(props::eigenvalue_correspondence(&mut runner(96)));
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 48,
        failure_persistence: None,
        rng_seed: RngSeed::Fixed(0x5eed),
        ..ProptestConfig::default()
    })]

    #[test]
    fn quadratic_sos_verifies(seed in any::<u64>(), n in 1usize..=6) {
        let p = random_rz_quadratic(n, &mut rng(seed)).to_polynomial();
        let cert = quadratic_sos(&p).unwrap();
        let h = hermite_matrix(&p).unwrap();
        prop_assert!(cert.verify(&h).unwrap());
        prop_assert!(cert.check_column_degrees());
    }

    #[test]
    fn certificates_are_isometries(seed in any::<u64>(), n in 1usize..=3, k in 1usize..=3) {
        let mut g = rng(seed);
        let (m, p) = random_full_degree_pencil(n, k, &mut g);
        let h = hermite_matrix(&p).unwrap();
        let cert = sos_from_detrep(&m, 1, &p).unwrap();
        let qm = cert.matrix();
        let range = SampleRange::default();
        let mut vec = || {
            let vals: Vec<_> = (0..k).map(|_| range.rational(&mut g)).collect();
            PolyMatrix::from_fn(k, 1, n, |i, _| QPoly::constant(n, vals[i].clone()))
        };
        let (f, gv) = (vec(), vec());
        let lhs = qm.mul(&f).unwrap().transpose().mul(&qm.mul(&gv).unwrap()).unwrap();
        let rhs = f.transpose().mul(h.matrix()).unwrap().mul(&gv).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn certificate_columns_are_injective(seed in any::<u64>(), n in 1usize..=3, k in 1usize..=3) {
        let mut g = rng(seed);
        let (m, p) = random_full_degree_pencil(n, k, &mut g);
        let cert = sos_from_detrep(&m, 1, &p).unwrap();
        let parts = p.homogeneous_parts();
        for _ in 0..20 {
            let a = SampleRange::default().point(&mut g, n);
            // t^k p(a/t), lowest coefficient first; Q(a) has rank equal to its
            // number of distinct roots.
            let f: Vec<Rational> = (0..=k).map(|j| parts[k - j].evaluate(&a)).collect();
            let distinct = k + 1 - univariate::gcd(&f, &univariate::derivative(&f)).len();
            prop_assert_eq!(cert.matrix().evaluate(&a).rank(0.0), distinct);
        }
    }

    #[test]
    fn self_adjoint_and_graded(seed in any::<u64>(), n in 1usize..=4, d in 1usize..=5) {
        let mut g = rng(seed);
        let p = random_normalized(n, d, 5, &mut g);
        let l = companion(&p, 0).unwrap();
        prop_assert!(l.check_grading());
        let lm = l.matrix();
        prop_assert_eq!(PolyMatrix::identity(d, n).sub(lm).unwrap().det().unwrap(), p.clone());
        let h = hermite_matrix(&p).unwrap();
        prop_assert_eq!(lm.transpose().mul(h.matrix()).unwrap(), h.matrix().mul(lm).unwrap());
    }

    #[test]
    fn perturbed_pencil_is_rejected(seed in any::<u64>(), n in 2usize..=4, entry in 0usize..4) {
        let p = random_rz_quadratic(n, &mut rng(seed)).to_polynomial();
        let pencil = quadratic_pencil(&p).unwrap();
        prop_assert!(verify_detrep(&pencil, &p, DetCheck::Divides).unwrap());
        let det = pencil.determinant().unwrap();
        prop_assert!(verify_detrep(&pencil, &det, DetCheck::Power(1)).unwrap());
        let mut coeffs = pencil.coefficients().to_vec();
        let i = entry % pencil.size();
        coeffs[0][(i, i)] += rat(1);
        let bad = LinearPencil::new(pencil.size(), coeffs, pencil.sign()).unwrap();
        prop_assert!(!verify_detrep(&bad, &det, DetCheck::Power(1)).unwrap());
    }

    #[test]
    fn quadratic_extension_divides(seed in any::<u64>(), n in 1usize..=4) {
        let p = random_rz_quadratic(n, &mut rng(seed)).to_polynomial();
        let cert = quadratic_sos(&p).unwrap();
        let l = companion(&p, 0).unwrap();
        match solve_extension(&cert, &l, &ExtensionOptions::default()).unwrap() {
            Extension::Solved { pencil, exact, divides, .. } => {
                prop_assert!(exact);
                match divides {
                    Some(ok) => prop_assert!(ok),
                    None => prop_assert!(!square_free_probabilistic(&p, 20, &mut rng(1))),
                }
                prop_assert!(extension_holds(&pencil, cert.matrix(), &l, 0.0).unwrap());
            }
            other => prop_assert!(false, "{:?}", other),
        }
    }

    #[test]
    fn rational_pencil_is_symmetric_with_real_spectrum(seed in any::<u64>(), n in 2usize..=4) {
        let mut g = rng(seed);
        let quad = random_rz_quadratic(n, &mut g);
        let p = quad.to_polynomial();
        let cert = quadratic_sos(&p).unwrap();
        prop_assume!(cert.matrix().rows() > 1);
        let m = match rational_pencil(&p, &cert) {
            Ok(m) => m,
            Err(hermite_detrep::error::Error::SingularHermite) => return Ok(()),
            Err(e) => panic!("{e}"),
        };
        prop_assert!(m.is_symmetric(0.0));
        prop_assert!(m.check_degrees());
        let a = SampleRange::default().point(&mut g, n);
        if let Some(ma) = m.evaluate(&a) {
            let eig = ma.to_f64().symmetric_eigenvalues();
            let det: f64 = eig.iter().map(|l| 1.0 - l).product();
            let pa = Coeff::to_f64(&p.evaluate(&a));
            prop_assert!((det - pa).abs() <= 1e-8 * pa.abs().max(1.0), "{} vs {}", det, pa);
        }
    }

    #[test]
    fn hermite_is_psd_on_real_zero_quadratics(seed in any::<u64>(), n in 1usize..=4) {
        let mut g = rng(seed);
        let p = random_rz_quadratic(n, &mut g).to_polynomial();
        let h = hermite_matrix(&p).unwrap().to_f64();
        let SosSearch::Found { cert, .. } = find_sos(&h, &SosSearchOptions::default()).unwrap() else {
            return Err(TestCaseError::fail("no certificate"));
        };
        for _ in 0..5 {
            let a: Vec<f64> = SampleRange::default().point(&mut g, n).iter().map(Coeff::to_f64).collect();
            let ha = h.evaluate(&a);
            let qa = cert.matrix().evaluate(&a);
            let gram = qa.transpose().mul(&qa).unwrap();
            let scale = ha.max_abs().max(1.0);
            prop_assert!(ha.symmetric_eigenvalues()[0] >= -1e-6 * scale);
            prop_assert!(gram.sub(&ha).unwrap().max_abs() <= 1e-5 * scale);
        }
    }

    #[test]
    fn sdp_weak_duality(seed in any::<u64>(), n in 2usize..=5) {
        use rand::RngExt;
        let mut g = rng(seed);
        let b0 = DMatrix::from_fn(n, n, |_, _| g.random_range(-1.0..1.0));
        let x0 = &b0 * b0.transpose() + DMatrix::identity(n, n);
        let w = DMatrix::from_fn(n, n, |_, _| g.random_range(-1.0..1.0));
        let mut prob = SdpProblem::new(n);
        prob.set_objective(SymMatrix::from_dense(&(&w * w.transpose())).unwrap()).unwrap();
        for _ in 0..g.random_range(1..=n) {
            let mut a = SymMatrix::zeros(n);
            a.add(g.random_range(0..n), g.random_range(0..n), g.random_range(-2.0..2.0));
            let bi = a.inner(&x0);
            prob.add_constraint(a, bi).unwrap();
        }
        let s = solve(&prob, &SdpOptions::default()).unwrap();
        prop_assert_eq!(s.status, SdpStatus::Optimal);
        let scale = 1.0 + s.primal_objective.abs() + s.dual_objective.abs();
        prop_assert!(s.primal_objective >= s.dual_objective - 1e-8 * scale);
        prop_assert!(s.primal_residual <= 1e-8);
    }
}
