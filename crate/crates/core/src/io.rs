//! JSON formats for Hermite matrices, certificates, pencils and rational
//! representations. Polynomials and scalars are stored as strings in the
//! text grammar of [`Polynomial::parse`], so they round-trip exactly.

use serde::{Deserialize, Serialize};

use crate::detrep::{LinearPencil, SignConvention};
use crate::error::{Error, Result};
use crate::field::Coeff;
use crate::hermite::HermiteMatrix;
use crate::linalg::Matrix;
use crate::poly::Polynomial;
use crate::polymatrix::PolyMatrix;
use crate::ratrep::RationalMatrix;
use crate::sos::SosCertificate;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermiteFile {
    pub d: usize,
    pub entries: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub q: String,
    #[serde(rename = "Q")]
    pub matrix: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PencilFile {
    pub k: usize,
    #[serde(rename = "M")]
    pub coefficients: Vec<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "is_default_sign")]
    pub sign: SignConvention,
}

fn is_default_sign(s: &SignConvention) -> bool {
    *s == SignConvention::IMinusM
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatrepFile {
    pub den: String,
    pub num: Vec<Vec<String>>,
}

pub fn format_scalar<C: Coeff>(c: &C) -> String {
    Polynomial::constant(0, c.clone()).to_string()
}

pub fn parse_scalar<C: Coeff>(s: &str) -> Result<C> {
    let p = Polynomial::<C>::parse(s)?;
    if p.degree().unwrap_or(0) > 0 {
        return Err(Error::Invalid(format!("expected a number, got {s:?}")));
    }
    Ok(p.constant_term())
}

fn matrix_strings<C: Coeff>(m: &PolyMatrix<C>) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)].to_string()).collect()).collect()
}

fn parse_matrix<C: Coeff>(rows: &[Vec<String>], nvars: usize, cols: Option<usize>) -> Result<PolyMatrix<C>> {
    let parsed: Vec<Vec<Polynomial<C>>> = rows
        .iter()
        .map(|r| r.iter().map(|s| Polynomial::parse_with_nvars(s, nvars)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    if parsed.is_empty() {
        return Ok(PolyMatrix::zeros(0, cols.unwrap_or(0), nvars));
    }
    PolyMatrix::from_rows(parsed)
}

impl HermiteFile {
    pub fn from_matrix<C: Coeff>(h: &HermiteMatrix<C>) -> Self {
        HermiteFile { d: h.degree(), entries: matrix_strings(h.matrix()) }
    }
}

impl CertificateFile {
    pub fn from_certificate<C: Coeff>(cert: &SosCertificate<C>) -> Self {
        let weight = (!cert.weight().is_one()).then(|| format_scalar(cert.weight()));
        CertificateFile { q: cert.q().to_string(), matrix: matrix_strings(cert.matrix()), weight }
    }

    /// Reads the certificate with `nvars` variables; `d` fixes the column
    /// count of an empty `Q`.
    pub fn to_certificate<C: Coeff>(&self, nvars: usize, d: usize) -> Result<SosCertificate<C>> {
        let q = Polynomial::parse_with_nvars(&self.q, nvars)?;
        let matrix = parse_matrix(&self.matrix, nvars, Some(d))?;
        let weight = match &self.weight {
            Some(w) => parse_scalar(w)?,
            None => C::one(),
        };
        SosCertificate::new(q, matrix, weight)
    }
}

impl PencilFile {
    pub fn from_pencil<C: Coeff>(pencil: &LinearPencil<C>) -> Self {
        let k = pencil.size();
        let coefficients = pencil
            .coefficients()
            .iter()
            .map(|m| (0..k).map(|i| (0..k).map(|j| format_scalar(&m[(i, j)])).collect()).collect())
            .collect();
        PencilFile { k, coefficients, sign: pencil.sign() }
    }

    pub fn to_pencil<C: Coeff>(&self) -> Result<LinearPencil<C>> {
        let k = self.k;
        let coefficients = self
            .coefficients
            .iter()
            .map(|rows| {
                if rows.len() != k || rows.iter().any(|r| r.len() != k) {
                    return Err(Error::Dimension(format!("pencil coefficient is not {k}x{k}")));
                }
                let vals = rows.iter().map(|r| r.iter().map(|s| parse_scalar(s)).collect()).collect::<Result<_>>()?;
                Matrix::from_rows(vals)
            })
            .collect::<Result<Vec<_>>>()?;
        LinearPencil::new(k, coefficients, self.sign)
    }
}

impl RatrepFile {
    pub fn from_matrix<C: Coeff>(m: &RationalMatrix<C>) -> Self {
        RatrepFile { den: m.den().to_string(), num: matrix_strings(m.num()) }
    }

    pub fn to_matrix<C: Coeff>(&self, nvars: usize) -> Result<RationalMatrix<C>> {
        let den = Polynomial::parse_with_nvars(&self.den, nvars)?;
        RationalMatrix::new(parse_matrix(&self.num, nvars, None)?, den)
    }
}
