//! Linear determinantal representations.
//!
//! A certificate `q²·H(p) = w·QᵀQ` identifies `ℝ[x]^d` with the span of the
//! columns of `Q`. The multiplication operator `L_t` (the companion matrix)
//! is self-adjoint for the form `⟨f, g⟩_p = fᵀH(p)g`, and a linear pencil
//! `M = Σ x_i M_i` with `MQ = QL_t` gives a representation `det(I - M)`
//! divisible by `p`. The condition `MQ = QL_t` is linear in the entries of
//! the `M_i`; this module assembles and solves that system.

use std::collections::BTreeMap;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Coeff, Rational};
use crate::hermite::{hermite_matrix, HermiteMatrix};
use crate::linalg::{psd_factor, LinearSolution, Matrix};
use crate::poly::{Monomial, Polynomial, QPoly};
use crate::polymatrix::{PolyMatrix, DET_LIMIT};
use crate::realzero::{square_free_probabilistic, Quadratic};
use crate::sampling::{rng, SampleRange};
use crate::sos::SosCertificate;

/// Seed for the internal randomized checks, fixed for reproducibility.
const CHECK_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SignConvention {
    /// `det(I - Σ x_i M_i)`.
    #[default]
    IMinusM,
    /// `det(I + Σ x_i M_i)`.
    IPlusM,
}

/// `Σ x_i M_i` with symmetric numeric `M_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearPencil<C: Coeff> {
    size: usize,
    coefficients: Vec<Matrix<C>>,
    sign: SignConvention,
}

impl<C: Coeff> LinearPencil<C> {
    pub fn new(size: usize, coefficients: Vec<Matrix<C>>, sign: SignConvention) -> Result<Self> {
        for m in &coefficients {
            if m.rows() != size || m.cols() != size {
                return Err(Error::Dimension(format!(
                    "pencil coefficient of shape {}x{}, expected {size}x{size}",
                    m.rows(),
                    m.cols()
                )));
            }
            if !m.is_symmetric(1e-12 * m.max_abs().max(1.0)) {
                return Err(Error::NotSymmetric);
            }
        }
        Ok(LinearPencil { size, coefficients, sign })
    }

    /// Reads the `M_i` off a matrix of linear forms.
    pub fn from_polymatrix(m: &PolyMatrix<C>, sign: SignConvention) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        let n = m.nvars();
        let k = m.rows();
        let mut coefficients = vec![Matrix::zeros(k, k); n];
        for i in 0..k {
            for j in 0..k {
                let e = &m[(i, j)];
                if !e.is_homogeneous_of(1) {
                    return Err(Error::DegreeInvariant(format!("pencil entry ({i},{j}) is not a linear form")));
                }
                for (l, c) in coefficients.iter_mut().enumerate() {
                    c[(i, j)] = e.coeff(&Monomial::var(n, l));
                }
            }
        }
        Self::new(k, coefficients, sign)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn nvars(&self) -> usize {
        self.coefficients.len()
    }

    pub fn sign(&self) -> SignConvention {
        self.sign
    }

    pub fn coefficients(&self) -> &[Matrix<C>] {
        &self.coefficients
    }

    /// `Σ x_i M_i`.
    pub fn matrix(&self) -> PolyMatrix<C> {
        let n = self.nvars();
        PolyMatrix::from_fn(self.size, self.size, n, |i, j| {
            let c: Vec<C> = self.coefficients.iter().map(|m| m[(i, j)].clone()).collect();
            Polynomial::linear(&c)
        })
    }

    /// The same pencil written in the `I - M` convention.
    pub fn to_minus_form(&self) -> Self {
        match self.sign {
            SignConvention::IMinusM => self.clone(),
            SignConvention::IPlusM => LinearPencil {
                size: self.size,
                coefficients: self.coefficients.iter().map(|m| m.scale(&-C::one())).collect(),
                sign: SignConvention::IMinusM,
            },
        }
    }

    /// `Σ a_i M_i`.
    pub fn linear_part_at(&self, a: &[C]) -> Matrix<C> {
        let mut out = Matrix::zeros(self.size, self.size);
        for (m, ai) in self.coefficients.iter().zip(a) {
            if ai.is_zero() {
                continue;
            }
            out = out.add(&m.scale(ai)).expect("same shape");
        }
        out
    }

    /// `I ∓ Σ a_i M_i`.
    pub fn pencil_at(&self, a: &[C]) -> Matrix<C> {
        let lin = self.linear_part_at(a);
        let id = Matrix::identity(self.size);
        match self.sign {
            SignConvention::IMinusM => id.sub(&lin),
            SignConvention::IPlusM => id.add(&lin),
        }
        .expect("same shape")
    }

    /// `det(I ∓ M)` as a polynomial.
    pub fn determinant(&self) -> Result<Polynomial<C>> {
        let m = self.matrix();
        let id = PolyMatrix::identity(self.size, self.nvars());
        let full = match self.sign {
            SignConvention::IMinusM => id.sub(&m)?,
            SignConvention::IPlusM => id.add(&m)?,
        };
        full.det_with_limit(DET_LIMIT)
    }

    /// Zero-pads every coefficient to size `size + extra`.
    pub fn pad(&self, extra: usize) -> Self {
        let k = self.size + extra;
        let coefficients = self
            .coefficients
            .iter()
            .map(|m| {
                Matrix::from_fn(k, k, |i, j| if i < self.size && j < self.size { m[(i, j)].clone() } else { C::zero() })
            })
            .collect();
        LinearPencil { size: k, coefficients, sign: self.sign }
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D + Copy) -> LinearPencil<D> {
        LinearPencil {
            size: self.size,
            coefficients: self.coefficients.iter().map(|m| m.map(f)).collect(),
            sign: self.sign,
        }
    }

    pub fn to_f64(&self) -> LinearPencil<f64> {
        self.map_coeffs(|c| c.to_f64())
    }
}

/// The companion matrix `L_t` of `p` with the grading shifted by `shift`.
///
/// Row `i` (zero-based) has a `1` on the subdiagonal and `-p_{d-i}` in the
/// last column, so entry `(i, j)` is homogeneous of degree `j + 1 - i`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompanionOperator<C: Coeff> {
    matrix: PolyMatrix<C>,
    shift: usize,
    source: Polynomial<C>,
}

impl<C: Coeff> CompanionOperator<C> {
    pub fn matrix(&self) -> &PolyMatrix<C> {
        &self.matrix
    }

    pub fn shift(&self) -> usize {
        self.shift
    }

    pub fn source(&self) -> &Polynomial<C> {
        &self.source
    }

    pub fn degree(&self) -> usize {
        self.matrix.rows()
    }

    /// Every entry `(i, j)` is zero or homogeneous of degree `j + 1 - i`.
    pub fn check_grading(&self) -> bool {
        let d = self.degree();
        (0..d).all(|i| {
            (0..d).all(|j| {
                let e = &self.matrix[(i, j)];
                e.is_zero() || (j + 1 >= i && e.is_homogeneous_of(j + 1 - i))
            })
        })
    }
}

pub fn companion<C: Coeff>(p: &Polynomial<C>, shift: usize) -> Result<CompanionOperator<C>> {
    if p.constant_term() != C::one() {
        return Err(Error::NotNormalized);
    }
    let d = match p.degree() {
        Some(d) if d >= 1 => d,
        other => return Err(Error::Degree { expected: ">= 1".into(), found: other.map_or(-1, |d| d as i64) }),
    };
    let n = p.nvars();
    let parts = p.homogeneous_parts();
    let matrix = PolyMatrix::from_fn(d, d, n, |i, j| {
        if j == d - 1 {
            -&parts[d - i]
        } else if i == j + 1 {
            Polynomial::one(n)
        } else {
            Polynomial::zero(n)
        }
    });
    let op = CompanionOperator { matrix, shift, source: p.clone() };
    let det = PolyMatrix::identity(d, n).sub(&op.matrix)?.det_with_limit(24)?;
    if !det.approx_eq(p, 1e-9 * p.max_abs_coeff().max(1.0)) {
        return Err(Error::DetMismatch("det(I - L_t) differs from p".into()));
    }
    Ok(op)
}

/// `L_tᵀ H = H L_t`, i.e. `L_t` is self-adjoint for `⟨·,·⟩_p`.
pub fn check_self_adjoint<C: Coeff>(l: &CompanionOperator<C>, h: &HermiteMatrix<C>) -> Result<bool> {
    let (lm, hm) = (l.matrix(), h.matrix());
    if lm.rows() != hm.rows() {
        return Err(Error::Dimension(format!("companion of size {} against H of size {}", lm.rows(), hm.rows())));
    }
    let lhs = lm.transpose().mul(hm)?;
    let rhs = hm.mul(lm)?;
    let scale = hm.entries().map(|e| e.max_abs_coeff()).fold(1.0, f64::max);
    Ok(lhs.approx_eq(&rhs, 1e-9 * scale))
}

/// `v` with `Σ v vᵀ = bbᵀ - 4A` for a real-zero quadratic.
///
/// Over the rationals this needs square-root pivots in the field; otherwise
/// the factorization is refused and the double field has to be used.
pub fn quadratic_factor<C: Coeff>(quad: &Quadratic<C>) -> Result<Vec<Vec<C>>> {
    let s = quad.rz_matrix();
    let tol = if C::EXACT { 0.0 } else { 1e-12 * s.max_abs().max(1.0) };
    match psd_factor(&s, tol) {
        Ok(Some(vs)) => Ok(vs),
        Ok(None) => Err(Error::Invalid(
            "bbᵀ - 4A has no square-root factorization over the rationals; use the double field".into(),
        )),
        Err(Error::Invalid(_)) => Err(Error::NotRealZero),
        Err(e) => Err(e),
    }
}

/// The arrowhead pencil `½·[[-bᵀx, v_iᵀx], [v_iᵀx, -bᵀx·I]]` of size `n + 1`
/// with `det(I - M) = (1 + ½bᵀx)^{n-1}·p`.
pub fn quadratic_pencil<C: Coeff>(p: &Polynomial<C>) -> Result<LinearPencil<C>> {
    let quad = Quadratic::decompose(p)?;
    let n = quad.nvars();
    let mut vs = quadratic_factor(&quad)?;
    vs.resize(n, vec![C::zero(); n]);
    let half = C::one() / C::from_i64(2);
    let k = n + 1;
    let coefficients = (0..n)
        .map(|l| {
            let diag = -(half.mul_ref(&quad.b[l]));
            Matrix::from_fn(k, k, |i, j| match (i, j) {
                (i, j) if i == j => diag.clone(),
                (0, j) => half.mul_ref(&vs[j - 1][l]),
                (i, 0) => half.mul_ref(&vs[i - 1][l]),
                _ => C::zero(),
            })
        })
        .collect();
    LinearPencil::new(k, coefficients, SignConvention::IMinusM)
}

/// What [`verify_detrep`] checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DetCheck {
    /// `det(I - M) = p^r`.
    Power(u32),
    /// `p` divides `det(I - M)`.
    Divides,
}

/// Checks a determinantal representation of `p`.
///
/// Exact pencils up to the symbolic size limit are checked as polynomial
/// identities. Larger exact pencils and all double pencils in the power
/// mode are compared at 200 points of `[-1, 1]^n` (relative error `1e-8`
/// over doubles). Divisibility over doubles uses the remainder of the lex
/// division.
pub fn verify_detrep<C: Coeff>(pencil: &LinearPencil<C>, p: &Polynomial<C>, check: DetCheck) -> Result<bool> {
    if pencil.nvars() != p.nvars() {
        return Err(Error::NvarsMismatch(pencil.nvars(), p.nvars()));
    }
    match check {
        DetCheck::Power(r) => {
            if C::EXACT && pencil.size() <= DET_LIMIT {
                return Ok(pencil.determinant()? == p.pow(r));
            }
            let mut g = rng(CHECK_SEED);
            for _ in 0..200 {
                let a: Vec<C> = SampleRange::unit_point(&mut g, p.nvars()).iter().map(C::from_rational).collect();
                let lhs = pencil.pencil_at(&a).det()?;
                let mut rhs = C::one();
                let pa = p.evaluate(&a);
                for _ in 0..r {
                    rhs = rhs * pa.clone();
                }
                let scale = lhs.magnitude().max(rhs.magnitude()).max(1.0);
                if !(lhs - rhs).is_negligible(1e-8 * scale) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        DetCheck::Divides => {
            let det = pencil.determinant()?;
            if C::EXACT {
                return Ok(det.exact_divide(p)?.is_some());
            }
            let (_, rem) = det.div_rem(p)?;
            Ok(rem.max_abs_coeff() <= 1e-8 * det.max_abs_coeff().max(1.0))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionOptions {
    /// Solve in floating point when the certificate does not survive
    /// rationalization.
    pub allow_double: bool,
    /// Relative rank tolerance of the double-precision elimination.
    pub rank_tol: f64,
    /// Restricts the system to these rows of `MQ = QL_t` (zero-based).
    pub rows: Option<Vec<usize>>,
    /// Denominator bound for rationalizing double certificates.
    pub max_den: u64,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        ExtensionOptions { allow_double: false, rank_tol: 1e-8, rows: None, max_den: 1_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Extension<C: Coeff> {
    Solved {
        pencil: LinearPencil<C>,
        /// Dimension of the solution space.
        nullity: usize,
        /// Whether the system was solved over the rationals.
        exact: bool,
        /// `p | det(I - M)`; `None` when the check was skipped.
        divides: Option<bool>,
    },
    Infeasible {
        rank: usize,
        augmented_rank: usize,
        exact: bool,
    },
}

impl<C: Coeff> Extension<C> {
    pub fn is_solved(&self) -> bool {
        matches!(self, Extension::Solved { .. })
    }
}

/// Solves `MQ = QL_t` for a symmetric linear pencil `M`.
///
/// Exact certificates are solved by exact elimination. Double certificates
/// are rationalized coefficient by coefficient and re-verified; when that
/// fails the call is refused unless `allow_double` is set. Among all
/// solutions the one of least Frobenius norm is returned.
pub fn solve_extension<C: Coeff>(
    cert: &SosCertificate<C>,
    l: &CompanionOperator<C>,
    opts: &ExtensionOptions,
) -> Result<Extension<C>> {
    let q = cert.matrix();
    if q.cols() != l.degree() {
        return Err(Error::Dimension(format!("certificate has {} columns, p has degree {}", q.cols(), l.degree())));
    }
    if q.nvars() != l.source().nvars() {
        return Err(Error::NvarsMismatch(q.nvars(), l.source().nvars()));
    }
    if cert.shift() != l.shift() {
        return Err(Error::DegreeInvariant(format!(
            "grading shift {} does not match deg q = {}",
            l.shift(),
            cert.shift()
        )));
    }
    if !cert.check_column_degrees() {
        return Err(Error::DegreeInvariant("column i of Q must be homogeneous of degree deg(q) + i".into()));
    }
    if let Some(rows) = &opts.rows {
        if let Some(&bad) = rows.iter().find(|&&r| r >= q.rows()) {
            return Err(Error::Dimension(format!("row {bad} out of range for {} rows", q.rows())));
        }
    }

    let exact = rationalize_inputs(cert, l.source(), opts.max_den);
    if let Some((cert_q, p_q)) = exact {
        let h = hermite_matrix(&p_q)?;
        if cert_q.verify(&h)? {
            let lq = companion(&p_q, l.shift())?;
            let out = solve_system(cert_q.matrix(), lq.matrix(), opts, 0.0)?;
            return Ok(match out {
                Extension::Solved { pencil, nullity, .. } => {
                    let divides = exact_divisibility(&pencil, &p_q)?;
                    Extension::Solved { pencil: pencil.map_coeffs(C::from_rational), nullity, exact: true, divides }
                }
                Extension::Infeasible { rank, augmented_rank, .. } => {
                    Extension::Infeasible { rank, augmented_rank, exact: true }
                }
            });
        }
        if C::EXACT {
            return Err(Error::InvalidCertificate("q²·H(p) differs from w·QᵀQ".into()));
        }
    } else if C::EXACT {
        unreachable!("exact coefficients always rationalize");
    }
    if !opts.allow_double {
        return Err(Error::RationalizationFailed);
    }
    let cert_f = cert.to_f64();
    let p_f = l.source().to_f64();
    if !cert_f.verify(&hermite_matrix(&p_f)?)? {
        return Err(Error::InvalidCertificate("q²·H(p) differs from w·QᵀQ beyond 1e-8".into()));
    }
    let lf = l.matrix().to_f64();
    let out = solve_system(cert_f.matrix(), &lf, opts, opts.rank_tol)?;
    Ok(match out {
        Extension::Solved { pencil, nullity, .. } => {
            let divides =
                if pencil.size() <= DET_LIMIT { Some(verify_detrep(&pencil, &p_f, DetCheck::Divides)?) } else { None };
            Extension::Solved {
                pencil: pencil.map_coeffs(|&v| C::from_rational(&float_to_rational(v))),
                nullity,
                exact: false,
                divides,
            }
        }
        Extension::Infeasible { rank, augmented_rank, .. } => {
            Extension::Infeasible { rank, augmented_rank, exact: false }
        }
    })
}

/// Exact binary value of a finite double.
fn float_to_rational(v: f64) -> Rational {
    Rational::from_float(v).unwrap_or_default()
}

fn rationalize_inputs<C: Coeff>(
    cert: &SosCertificate<C>,
    p: &Polynomial<C>,
    max_den: u64,
) -> Option<(SosCertificate<Rational>, QPoly)> {
    let cert_q = cert.to_rational(max_den)?;
    let p_q = poly_to_rational(p, max_den)?;
    Some((cert_q, p_q))
}

pub(crate) fn poly_to_rational<C: Coeff>(p: &Polynomial<C>, max_den: u64) -> Option<QPoly> {
    let terms: Option<Vec<(Monomial, Rational)>> =
        p.terms().map(|(m, c)| c.to_rational(max_den).map(|r| (m.clone(), r))).collect();
    Some(QPoly::from_terms(p.nvars(), terms?))
}

/// `p | det(I - M)`, skipped unless `p` is certified square-free.
fn exact_divisibility(pencil: &LinearPencil<Rational>, p: &QPoly) -> Result<Option<bool>> {
    if pencil.size() > DET_LIMIT {
        warn!("pencil of size {} exceeds the symbolic determinant limit; divisibility not checked", pencil.size());
        return Ok(None);
    }
    if !square_free_probabilistic(p, 20, &mut rng(CHECK_SEED)) {
        warn!("p is not certified square-free; divisibility of det(I - M) not checked");
        return Ok(None);
    }
    Ok(Some(verify_detrep(pencil, p, DetCheck::Divides)?))
}

/// Index of the unknown `M_l[a][b]`, `a <= b`.
struct Unknowns {
    k: usize,
    per_matrix: usize,
}

impl Unknowns {
    fn new(k: usize) -> Self {
        Unknowns { k, per_matrix: k * (k + 1) / 2 }
    }

    fn index(&self, l: usize, a: usize, b: usize) -> usize {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        l * self.per_matrix + a * self.k - a * (a + 1) / 2 + b
    }

    fn is_diagonal(&self, idx: usize) -> bool {
        let mut r = idx % self.per_matrix;
        for a in 0..self.k {
            let len = self.k - a;
            if r < len {
                return r == 0;
            }
            r -= len;
        }
        unreachable!()
    }
}

/// Coefficient equations of `MQ = QL_t` as a dense system `A z = rhs`.
pub fn extension_system<C: Coeff>(
    q: &PolyMatrix<C>,
    l: &PolyMatrix<C>,
    rows: Option<&[usize]>,
) -> Result<(Matrix<C>, Vec<C>)> {
    let (k, d, n) = (q.rows(), q.cols(), q.nvars());
    let ql = q.mul(l)?;
    let unknowns = Unknowns::new(k);
    let all: Vec<usize> = (0..k).collect();
    let rows = rows.unwrap_or(&all);
    let mut equations: Vec<(BTreeMap<usize, C>, C)> = Vec::new();
    for &a in rows {
        for s in 0..d {
            let mut eq: BTreeMap<Monomial, (BTreeMap<usize, C>, C)> = BTreeMap::new();
            for lvar in 0..n {
                let xl = Monomial::var(n, lvar);
                for b in 0..k {
                    let col = unknowns.index(lvar, a, b);
                    for (m, c) in q[(b, s)].terms() {
                        let entry = eq.entry(m.mul(&xl)).or_insert_with(|| (BTreeMap::new(), C::zero()));
                        let slot = entry.0.entry(col).or_insert_with(C::zero);
                        *slot = slot.add_ref(c);
                    }
                }
            }
            for (m, c) in ql[(a, s)].terms() {
                let entry = eq.entry(m.clone()).or_insert_with(|| (BTreeMap::new(), C::zero()));
                entry.1 = entry.1.add_ref(c);
            }
            equations.extend(eq.into_values());
        }
    }
    let ncols = n * unknowns.per_matrix;
    let mut mat = Matrix::zeros(equations.len(), ncols);
    let mut rhs = Vec::with_capacity(equations.len());
    for (r, (lhs, b)) in equations.into_iter().enumerate() {
        for (c, v) in lhs {
            mat[(r, c)] = v;
        }
        rhs.push(b);
    }
    Ok((mat, rhs))
}

fn solve_system<C: Coeff>(
    q: &PolyMatrix<C>,
    l: &PolyMatrix<C>,
    opts: &ExtensionOptions,
    tol: f64,
) -> Result<Extension<C>> {
    let (k, n) = (q.rows(), q.nvars());
    let (mat, rhs) = extension_system(q, l, opts.rows.as_deref())?;
    let (particular, nullspace) = match mat.solve_system(&rhs, tol)? {
        LinearSolution::Consistent { particular, nullspace } => (particular, nullspace),
        LinearSolution::Inconsistent { rank, augmented_rank } => {
            return Ok(Extension::Infeasible { rank, augmented_rank, exact: C::EXACT });
        }
    };
    let unknowns = Unknowns::new(k);
    let weights: Vec<C> =
        (0..particular.len()).map(|i| C::from_i64(if unknowns.is_diagonal(i) { 1 } else { 2 })).collect();
    let z = least_norm(&particular, &nullspace, &weights, tol)?;
    let coefficients = (0..n).map(|lvar| Matrix::from_fn(k, k, |a, b| z[unknowns.index(lvar, a, b)].clone())).collect();
    let pencil = LinearPencil::new(k, coefficients, SignConvention::IMinusM)?;
    Ok(Extension::Solved { pencil, nullity: nullspace.len(), exact: C::EXACT, divides: None })
}

/// Minimizes `Σ w_i z_i²` over `z = x0 + N c` via `(NᵀWN) c = -NᵀW x0`.
fn least_norm<C: Coeff>(x0: &[C], nullspace: &[Vec<C>], w: &[C], tol: f64) -> Result<Vec<C>> {
    if nullspace.is_empty() {
        return Ok(x0.to_vec());
    }
    let m = nullspace.len();
    let dot =
        |u: &[C], v: &[C]| u.iter().zip(v).zip(w).fold(C::zero(), |acc, ((a, b), wi)| acc + a.mul_ref(b).mul_ref(wi));
    let gram = Matrix::from_fn(m, m, |i, j| dot(&nullspace[i], &nullspace[j]));
    let rhs: Vec<C> = nullspace.iter().map(|v| -dot(v, x0)).collect();
    let c = match gram.solve_system(&rhs, tol)? {
        LinearSolution::Consistent { particular, .. } => particular,
        LinearSolution::Inconsistent { .. } => return Err(Error::Invalid("singular least-norm system".into())),
    };
    let mut z = x0.to_vec();
    for (ci, v) in c.iter().zip(nullspace) {
        for (zi, vi) in z.iter_mut().zip(v) {
            *zi = zi.add_ref(&ci.mul_ref(vi));
        }
    }
    Ok(z)
}

/// `MQ = QL_t` up to `tol` (exactly over the rationals).
pub fn extension_holds<C: Coeff>(
    pencil: &LinearPencil<C>,
    q: &PolyMatrix<C>,
    l: &CompanionOperator<C>,
    tol: f64,
) -> Result<bool> {
    let lhs = pencil.to_minus_form().matrix().mul(q)?;
    let rhs = q.mul(l.matrix())?;
    Ok(lhs.approx_eq(&rhs, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, ratio};
    use crate::hermite::hermite_matrix;

    fn q(s: &str) -> QPoly {
        QPoly::parse(s).unwrap()
    }

    fn qn(s: &str, n: usize) -> QPoly {
        QPoly::parse_with_nvars(s, n).unwrap()
    }

    #[test]
    fn companion_small_cases() {
        let l = companion(&q("1 - x1"), 0).unwrap();
        assert_eq!(l.matrix()[(0, 0)], q("x1"));
        let p = q("1 + 2*x1 + x1^2 - x2^2");
        let l = companion(&p, 0).unwrap();
        let m = l.matrix();
        assert_eq!(m[(0, 0)], QPoly::zero(2));
        assert_eq!(m[(0, 1)], q("x2^2 - x1^2"));
        assert_eq!(m[(1, 0)], QPoly::one(2));
        assert_eq!(m[(1, 1)], q("-2*x1 + 0*x2"));
        assert!(l.check_grading());
        assert!(matches!(companion(&q("2 + x1"), 0), Err(Error::NotNormalized)));
    }

    #[test]
    fn self_adjoint_and_negative_control() {
        let p = q("x1^3 - x1^2 - x1 + 1 - x2^2");
        let l = companion(&p, 0).unwrap();
        let h = hermite_matrix(&p).unwrap();
        assert!(check_self_adjoint(&l, &h).unwrap());
        let mut bad = h.matrix().clone();
        bad[(0, 2)] = &bad[(0, 2)] + &qn("x1^2", 2);
        let bad = crate::hermite::HermiteMatrix::from_parts(bad, h.degree(), p.clone());
        assert!(!check_self_adjoint(&l, &bad).unwrap());
    }

    #[test]
    fn rational_quadratic_pencil() {
        let p = q("1 + 2*x1 + x1^2 - x2^2");
        let m = quadratic_pencil(&p).unwrap();
        assert_eq!(m.size(), 3);
        let expected = &q("1 + x1 + 0*x2") * &p;
        assert_eq!(m.determinant().unwrap(), expected);
        assert!(verify_detrep(&m, &p, DetCheck::Divides).unwrap());
        assert!(!verify_detrep(&m, &p, DetCheck::Power(1)).unwrap());
    }

    #[test]
    fn linear_polynomial_pencil() {
        let p = q("1 + 2*x1 - 4*x2");
        let m = quadratic_pencil(&p.clone());
        // Degree one is not a quadratic.
        assert!(m.is_err());
        let quad = Quadratic { a: Matrix::zeros(2, 2), b: vec![rat(2), rat(-4)] };
        let vs = quadratic_factor(&quad).unwrap();
        assert_eq!(vs.len(), 1);
    }

    #[test]
    fn trivial_extension() {
        let p = q("1 - x1");
        let cert =
            SosCertificate::new(QPoly::one(1), PolyMatrix::from_scalar(&Matrix::identity(1), 1), rat(1)).unwrap();
        let l = companion(&p, 0).unwrap();
        match solve_extension(&cert, &l, &ExtensionOptions::default()).unwrap() {
            Extension::Solved { pencil, nullity, exact, divides } => {
                assert_eq!(pencil.matrix()[(0, 0)], q("x1"));
                assert_eq!(nullity, 0);
                assert!(exact);
                assert_eq!(divides, Some(true));
                assert!(verify_detrep(&pencil, &p, DetCheck::Power(1)).unwrap());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pencil_evaluation_matches_symbolic_form() {
        let m0 = Matrix::from_rows(vec![vec![rat(1), ratio(1, 2)], vec![ratio(1, 2), rat(0)]]).unwrap();
        let m1 = Matrix::from_rows(vec![vec![rat(0), rat(3)], vec![rat(3), rat(-1)]]).unwrap();
        for sign in [SignConvention::IMinusM, SignConvention::IPlusM] {
            let pencil = LinearPencil::new(2, vec![m0.clone(), m1.clone()], sign).unwrap();
            let a = [ratio(2, 3), rat(-5)];
            let id = PolyMatrix::identity(2, 2);
            let sym = match sign {
                SignConvention::IMinusM => id.sub(&pencil.matrix()).unwrap(),
                SignConvention::IPlusM => id.add(&pencil.matrix()).unwrap(),
            };
            assert_eq!(pencil.pencil_at(&a), sym.evaluate(&a));
            let back = LinearPencil::from_polymatrix(&pencil.matrix(), sign).unwrap();
            assert_eq!(back, pencil);
        }
        let asym = Matrix::from_rows(vec![vec![rat(0), rat(1)], vec![rat(0), rat(0)]]).unwrap();
        assert!(matches!(LinearPencil::new(2, vec![asym], SignConvention::IMinusM), Err(Error::NotSymmetric)));
    }

    #[test]
    fn least_norm_weights_count_off_diagonal_twice() {
        let u = Unknowns::new(3);
        let diag: Vec<bool> = (0..6).map(|i| u.is_diagonal(i)).collect();
        assert_eq!(diag, vec![true, false, false, true, false, true]);
        assert_eq!(u.index(1, 2, 1), 6 + 4);
    }
}
