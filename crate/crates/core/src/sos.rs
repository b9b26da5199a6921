//! Matrix sums of squares `q²·H(p) = w·QᵀQ`.
//!
//! Column `i` (zero-based) of `Q` is homogeneous of degree `deg(q) + i`. The
//! positive weight `w` lets exact certificates avoid square roots: the
//! quadratic certificate over the rationals carries `w = 2`, and the one
//! built from a pencil of `p^r` carries `w = 1/r`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::detrep::{verify_detrep, DetCheck, LinearPencil};
use crate::error::{Error, Result};
use crate::field::{Coeff, Rational};
use crate::hermite::HermiteMatrix;
use crate::poly::{Monomial, Polynomial};
use crate::polymatrix::PolyMatrix;
use crate::realzero::Quadratic;
use crate::sdp::{self, InfeasibilityRay, SdpOptions, SdpProblem, SdpStatus, SymMatrix};

/// Coefficient tolerance of [`SosCertificate::verify`] over doubles.
pub const VERIFY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct SosCertificate<C: Coeff> {
    q: Polynomial<C>,
    matrix: PolyMatrix<C>,
    weight: C,
    gram: Option<DMatrix<f64>>,
}

impl<C: Coeff> SosCertificate<C> {
    pub fn new(q: Polynomial<C>, matrix: PolyMatrix<C>, weight: C) -> Result<Self> {
        if q.nvars() != matrix.nvars() {
            return Err(Error::NvarsMismatch(q.nvars(), matrix.nvars()));
        }
        if q.is_zero() || !q.is_homogeneous() {
            return Err(Error::InvalidCertificate("q must be a nonzero homogeneous polynomial".into()));
        }
        if weight.is_zero() || weight.is_negative() {
            return Err(Error::InvalidCertificate("weight must be positive".into()));
        }
        Ok(SosCertificate { q, matrix, weight, gram: None })
    }

    pub fn with_gram(mut self, gram: DMatrix<f64>) -> Self {
        self.gram = Some(gram);
        self
    }

    pub fn q(&self) -> &Polynomial<C> {
        &self.q
    }

    /// The matrix `Q`.
    pub fn matrix(&self) -> &PolyMatrix<C> {
        &self.matrix
    }

    pub fn weight(&self) -> &C {
        &self.weight
    }

    pub fn gram(&self) -> Option<&DMatrix<f64>> {
        self.gram.as_ref()
    }

    pub fn nvars(&self) -> usize {
        self.matrix.nvars()
    }

    /// `deg(q)`, the grading shift `r`.
    pub fn shift(&self) -> usize {
        self.q.degree().unwrap_or(0)
    }

    pub fn column_degrees(&self) -> Vec<usize> {
        (0..self.matrix.cols()).map(|i| self.shift() + i).collect()
    }

    pub fn check_column_degrees(&self) -> bool {
        let degs = self.column_degrees();
        (0..self.matrix.rows())
            .all(|i| degs.iter().enumerate().all(|(j, &dj)| self.matrix[(i, j)].is_homogeneous_of(dj)))
    }

    /// `w·QᵀQ`.
    pub fn gram_product(&self) -> Result<PolyMatrix<C>> {
        Ok(self.matrix.transpose().mul(&self.matrix)?.scale(&self.weight))
    }

    /// `q²·H`, optionally with the `(1,1)` entry of `H` replaced by `c11`.
    fn target(&self, h: &HermiteMatrix<C>, c11: Option<&C>) -> Result<PolyMatrix<C>> {
        if self.matrix.cols() != h.degree() {
            return Err(Error::Dimension(format!(
                "certificate has {} columns, H(p) has size {}",
                self.matrix.cols(),
                h.degree()
            )));
        }
        if self.nvars() != h.nvars() {
            return Err(Error::NvarsMismatch(self.nvars(), h.nvars()));
        }
        let mut hm = h.matrix().clone();
        if let (Some(c), true) = (c11, h.degree() > 0) {
            hm[(0, 0)] = Polynomial::constant(h.nvars(), c.clone());
        }
        Ok(hm.scale_poly(&(&self.q * &self.q)))
    }

    /// Largest coefficient of `q²·H - w·QᵀQ`.
    pub fn residual(&self, h: &HermiteMatrix<C>) -> Result<f64> {
        self.residual_adjusted(h, None)
    }

    pub fn residual_adjusted(&self, h: &HermiteMatrix<C>, c11: Option<&C>) -> Result<f64> {
        Ok(self.target(h, c11)?.max_abs_diff(&self.gram_product()?))
    }

    /// `q²·H(p) = w·QᵀQ`, exactly over the rationals and to [`VERIFY_TOL`]
    /// over doubles, plus the column degree invariant.
    pub fn verify(&self, h: &HermiteMatrix<C>) -> Result<bool> {
        self.verify_adjusted(h, None, VERIFY_TOL)
    }

    /// [`SosCertificate::verify`] against `H` with its `(1,1)` entry replaced.
    pub fn verify_adjusted(&self, h: &HermiteMatrix<C>, c11: Option<&C>, tol: f64) -> Result<bool> {
        let target = self.target(h, c11)?;
        if !self.check_column_degrees() {
            return Ok(false);
        }
        Ok(target.approx_eq(&self.gram_product()?, tol))
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D + Copy) -> SosCertificate<D> {
        SosCertificate {
            q: self.q.map_coeffs(f),
            matrix: self.matrix.map_coeffs(f),
            weight: f(&self.weight),
            gram: self.gram.clone(),
        }
    }

    pub fn to_f64(&self) -> SosCertificate<f64> {
        self.map_coeffs(|c| c.to_f64())
    }

    /// Rounds every coefficient to a fraction with denominator at most `max_den`.
    pub fn to_rational(&self, max_den: u64) -> Option<SosCertificate<Rational>> {
        let poly = |p: &Polynomial<C>| crate::detrep::poly_to_rational(p, max_den);
        let entries: Option<Vec<Polynomial<Rational>>> = self.matrix.entries().map(poly).collect();
        let entries = entries?;
        let cols = self.matrix.cols();
        let matrix = PolyMatrix::from_fn(self.matrix.rows(), cols, self.nvars(), |i, j| entries[i * cols + j].clone());
        Some(SosCertificate {
            q: poly(&self.q)?,
            matrix,
            weight: self.weight.to_rational(max_den)?,
            gram: self.gram.clone(),
        })
    }
}

/// Closed-form certificate of a real-zero quadratic `xᵀAx + bᵀx + 1`.
///
/// With `bbᵀ - 4A = Σ v_i v_iᵀ` the rows are `(1, -½bᵀx)` and `(0, ½v_iᵀx)`,
/// one per nonzero factor, and `H(p) = 2·QᵀQ`. The factor `√2` is folded into
/// `Q` when the field has it and kept as the weight otherwise.
pub fn quadratic_sos<C: Coeff>(p: &Polynomial<C>) -> Result<SosCertificate<C>> {
    let quad = Quadratic::decompose(p)?;
    let n = quad.nvars();
    let vs = crate::detrep::quadratic_factor(&quad)?;
    let half = C::one() / C::from_i64(2);
    let (scale, weight) = match C::from_i64(2).sqrt_opt() {
        Some(s) if !C::EXACT => (s, C::one()),
        _ => (C::one(), C::from_i64(2)),
    };
    let mut rows =
        vec![vec![Polynomial::constant(n, scale.clone()), quad.linear_form().scale(&-(half.mul_ref(&scale)))]];
    for v in &vs {
        rows.push(vec![Polynomial::zero(n), Polynomial::linear(v).scale(&half.mul_ref(&scale))]);
    }
    SosCertificate::new(Polynomial::one(n), PolyMatrix::from_rows(rows)?, weight)
}

/// The certificate `Q_{(l,m), s} = (M^s)_{lm}` of a pencil with
/// `det(I - M) = p^r`.
///
/// `QᵀQ` has entries `tr(M^{i+j})`, which equal `r·N_{i+j}` except in the
/// corner where `tr(I) = k`. The weight is `1/r`, so the certificate verifies
/// against `H(p)` exactly when `k = r·d` and against `H(p)` with corner
/// `k/r` in general (see [`pencil_corner`]).
pub fn sos_from_detrep<C: Coeff>(pencil: &LinearPencil<C>, r: u32, p: &Polynomial<C>) -> Result<SosCertificate<C>> {
    if r == 0 {
        return Err(Error::Invalid("power must be positive".into()));
    }
    if !verify_detrep(pencil, p, DetCheck::Power(r))? {
        return Err(Error::DetMismatch(format!("det(I - M) differs from p^{r}")));
    }
    let d = p.degree().unwrap_or(0);
    let n = p.nvars();
    let k = pencil.size();
    let m = pencil.to_minus_form().matrix();
    let mut powers = Vec::with_capacity(d);
    let mut acc = PolyMatrix::identity(k, n);
    for _ in 0..d {
        powers.push(acc.clone());
        acc = acc.mul(&m)?;
    }
    let matrix = PolyMatrix::from_fn(k * k, d, n, |row, s| powers[s][(row / k, row % k)].clone());
    SosCertificate::new(Polynomial::one(n), matrix, C::one() / C::from_i64(r as i64))
}

/// Corner `k/r` that a size-`k` pencil of `p^r` puts into `H(p)`.
pub fn pencil_corner<C: Coeff>(k: usize, r: u32) -> C {
    C::from_i64(k as i64) / C::from_i64(r as i64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SosSearchOptions {
    /// Replace the corner `d` of `H(p)` by an unknown `c ∈ [d, c11_max]`.
    pub relax_11: Option<f64>,
    pub sdp: SdpOptions,
    /// Gram eigenvalues below this are dropped.
    pub clip: f64,
    /// Largest accepted coefficient residual of the assembled certificate.
    pub residual_tol: f64,
}

impl Default for SosSearchOptions {
    fn default() -> Self {
        SosSearchOptions { relax_11: None, sdp: SdpOptions::default(), clip: 1e-9, residual_tol: 1e-6 }
    }
}

#[derive(Clone, Debug)]
pub enum SosSearch {
    Found {
        cert: SosCertificate<f64>,
        residual: f64,
        /// Corner value used when the relaxation is on.
        c11: Option<f64>,
    },
    /// The Gram SDP is numerically infeasible.
    NotFound { ray: Option<InfeasibilityRay> },
    /// The solver stalled, or the extracted certificate missed the residual
    /// tolerance.
    Indeterminate { reason: String },
}

/// Layout of the Gram variable: block `i` holds the monomials of degree `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramLayout {
    pub blocks: Vec<Vec<Monomial>>,
    pub offsets: Vec<usize>,
    /// Size of the Gram block, without relaxation slacks.
    pub size: usize,
    pub relaxed: bool,
}

impl GramLayout {
    pub fn new(nvars: usize, d: usize, relaxed: bool) -> Self {
        let blocks: Vec<Vec<Monomial>> = (0..d).map(|i| Monomial::all_of_degree(nvars, i)).collect();
        let mut offsets = Vec::with_capacity(d);
        let mut size = 0;
        for b in &blocks {
            offsets.push(size);
            size += b.len();
        }
        GramLayout { blocks, offsets, size, relaxed }
    }

    /// Dimension of the SDP variable, including relaxation slacks.
    pub fn dim(&self) -> usize {
        self.size + if self.relaxed { 2 } else { 0 }
    }
}

/// Gram SDP of `H`: `G ⪰ 0` with `Σ G[(i,α),(j,β)]·x^{α+β} = H_ij`.
///
/// Under the relaxation the constant corner equation becomes
/// `G_00 - s_1 = d` and `G_00 + s_2 = c11_max` with slacks `s_1, s_2` on the
/// diagonal after the Gram block.
pub fn gram_problem(h: &HermiteMatrix<f64>, relax_11: Option<f64>) -> Result<(SdpProblem, GramLayout)> {
    let d = h.degree();
    let n = h.nvars();
    let layout = GramLayout::new(n, d, relax_11.is_some());
    let dim = layout.dim();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect();
    let per_pair: Vec<Vec<(SymMatrix, f64)>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut eqs: BTreeMap<Monomial, SymMatrix> = BTreeMap::new();
            for (a, alpha) in layout.blocks[i].iter().enumerate() {
                for (b, beta) in layout.blocks[j].iter().enumerate() {
                    if i == j && b < a {
                        continue;
                    }
                    let v = if i == j { 1.0 } else { 0.5 };
                    eqs.entry(alpha.mul(beta)).or_insert_with(|| SymMatrix::zeros(dim)).add(
                        layout.offsets[i] + a,
                        layout.offsets[j] + b,
                        v,
                    );
                }
            }
            let target = &h.matrix()[(i, j)];
            for (m, _) in target.terms() {
                eqs.entry(m.clone()).or_insert_with(|| SymMatrix::zeros(dim));
            }
            eqs.into_iter().map(|(m, a)| (a, target.coeff(&m))).collect()
        })
        .collect();
    let mut prob = SdpProblem::new(dim);
    for ((i, j), eqs) in pairs.into_iter().zip(per_pair) {
        for (mut a, b) in eqs {
            if i == 0 && j == 0 {
                if let Some(cmax) = relax_11 {
                    if cmax < b {
                        return Err(Error::Invalid(format!("relaxation bound {cmax} is below the corner {b}")));
                    }
                    let mut upper = a.clone();
                    a.add(layout.size, layout.size, -1.0);
                    upper.add(layout.size + 1, layout.size + 1, 1.0);
                    prob.add_constraint(a, b)?;
                    prob.add_constraint(upper, cmax)?;
                    continue;
                }
            }
            prob.add_constraint(a, b)?;
        }
    }
    Ok((prob, layout))
}

/// Searches for a denominator-free certificate `H = QᵀQ` by semidefinite
/// programming.
pub fn find_sos(h: &HermiteMatrix<f64>, opts: &SosSearchOptions) -> Result<SosSearch> {
    let d = h.degree();
    let n = h.nvars();
    if d == 0 {
        let cert = SosCertificate::new(Polynomial::one(n), PolyMatrix::zeros(0, 0, n), 1.0)?;
        return Ok(SosSearch::Found { cert, residual: 0.0, c11: None });
    }
    let (prob, layout) = gram_problem(h, opts.relax_11)?;
    let sol = sdp::solve(&prob, &opts.sdp)?;
    match sol.status {
        SdpStatus::Infeasible => return Ok(SosSearch::NotFound { ray: sol.ray }),
        SdpStatus::NumericalLimit => {
            return Ok(SosSearch::Indeterminate {
                reason: format!(
                "SDP solver stopped at its numerical limit after {} iterations (gap {:.2e}, residuals {:.2e}/{:.2e})",
                sol.iterations, sol.gap, sol.primal_residual, sol.dual_residual
            ),
            })
        }
        SdpStatus::Optimal => {}
    }
    let g = sol.x.view((0, 0), (layout.size, layout.size)).into_owned();
    let g = (&g + g.transpose()) * 0.5;
    let eig = g.clone().symmetric_eigen();
    let mut rows = Vec::new();
    for (idx, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= opts.clip {
            continue;
        }
        let u = eig.eigenvectors.column(idx) * lambda.sqrt();
        let row: Vec<Polynomial<f64>> = (0..d)
            .map(|j| {
                let terms = layout.blocks[j].iter().enumerate().map(|(a, m)| (m.clone(), u[layout.offsets[j] + a]));
                Polynomial::from_terms(n, terms)
            })
            .collect();
        rows.push(row);
    }
    let matrix = if rows.is_empty() { PolyMatrix::zeros(0, d, n) } else { PolyMatrix::from_rows(rows)? };
    let cert = SosCertificate::new(Polynomial::one(n), matrix, 1.0)?.with_gram(g.clone());
    let c11 = opts.relax_11.map(|_| g[(0, 0)]);
    let residual = cert.residual_adjusted(h, c11.as_ref())?;
    if residual > opts.residual_tol {
        return Ok(SosSearch::Indeterminate {
            reason: format!("extracted certificate has residual {residual:.2e} above {:.0e}", opts.residual_tol),
        });
    }
    Ok(SosSearch::Found { cert, residual, c11 })
}
