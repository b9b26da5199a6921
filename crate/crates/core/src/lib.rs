//! Real-zero certification of multivariate polynomials via the parametrized
//! Hermite matrix, matrix sums of squares, and definite determinantal
//! representations.
//!
//! The crate is organised bottom-up:
//!
//! - [`field`], [`poly`], [`polymatrix`], [`ratfunc`], [`linalg`]: exact
//!   (and double precision) polynomial and matrix arithmetic.
//! - [`hermite`]: Newton sums, `H(p)`, exact rank/signature.
//! - [`realzero`]: sampling and exact quadratic real-zero tests, the Vámos
//!   polynomial.
//! - [`sdp`]: a small dense interior-point SDP solver.
//! - [`sos`]: verification and search of `q²·H(p) = QᵀQ` certificates.
//! - [`detrep`]: companion operator, self-adjointness, the extension system
//!   `MQ = QL_t`, linear pencils.
//! - [`ratrep`]: the rational pencil `q⁻²·Q·L_t·H(p)⁻¹·Qᵀ`.
//! - [`io`] and [`cli`]: file formats and the command-line front end.

pub mod cli;
pub mod detrep;
pub mod error;
pub mod field;
pub mod hermite;
pub mod io;
pub mod linalg;
mod parse;
pub mod poly;
pub mod polymatrix;
pub mod ratfunc;
pub mod ratrep;
pub mod realzero;
pub mod sampling;
pub mod sdp;
pub mod sos;
pub mod univariate;

pub use error::{Error, Result};
pub use field::{Coeff, Rational};
pub use poly::{FPoly, Monomial, Polynomial, QPoly};
pub use polymatrix::PolyMatrix;
