//! C interface.
//!
//! Objects cross the boundary as opaque handles owned by the caller and
//! released with the matching `*_free` function. Every call returns an
//! [`HdStatus`]; on failure [`hd_last_error_message`] describes the error.
//! Strings returned through `char **` are freed with [`hd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hermite_detrep::detrep::{companion, quadratic_pencil, solve_extension, Extension, ExtensionOptions};
use hermite_detrep::hermite::hermite_matrix;
use hermite_detrep::io::{CertificateFile, HermiteFile, PencilFile, RatrepFile};
use hermite_detrep::ratrep::{rational_pencil, verify_rational};
use hermite_detrep::realzero::{rz_check_random, rz_report_quadratic};
use hermite_detrep::sampling::rng;
use hermite_detrep::sos::{find_sos, quadratic_sos, SosCertificate, SosSearch, SosSearchOptions};
use hermite_detrep::{Error, QPoly, Rational};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HdStatus {
    Ok = 0,
    /// A well-defined negative answer.
    Negative = 1,
    InvalidArgument = 2,
    ParseError = 3,
    /// The numerics could not decide.
    Indeterminate = 4,
    Error = 5,
}

/// A polynomial with rational coefficients.
pub struct HdPolynomial(QPoly);

/// A certificate `q²·H(p) = w·QᵀQ`, exact or floating point.
pub enum HdCertificate {
    Exact(SosCertificate<Rational>),
    Double(SosCertificate<f64>),
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> HdStatus {
    match e {
        Error::Parse { .. } | Error::Json(_) => HdStatus::ParseError,
        Error::NotRealZero | Error::DetMismatch(_) | Error::InvalidCertificate(_) | Error::SingularHermite => {
            HdStatus::Negative
        }
        Error::Invalid(_)
        | Error::Dimension(_)
        | Error::NvarsMismatch(..)
        | Error::NotNormalized
        | Error::Degree { .. }
        | Error::NotSquare { .. } => HdStatus::InvalidArgument,
        _ => HdStatus::Error,
    }
}

/// Runs `f`, recording errors and panics.
fn guard(f: impl FnOnce() -> Result<HdStatus, Error>) -> HdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            HdStatus::Error
        }
    }
}

fn invalid(msg: &str) -> Error {
    Error::Invalid(msg.into())
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, Error> {
    if s.is_null() {
        return Err(invalid("null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| invalid("string is not UTF-8"))
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Error> {
    p.as_ref().ok_or_else(|| invalid("null handle"))
}

unsafe fn write_out<T>(out: *mut T, v: T) -> Result<(), Error> {
    if out.is_null() {
        return Err(invalid("null output pointer"));
    }
    out.write(v);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Error> {
    let c = CString::new(s).map_err(|_| invalid("interior NUL"))?;
    write_out(out, c.into_raw())
}

/// Message of the last failed call on this thread. The pointer stays valid
/// until the next call on the same thread.
#[no_mangle]
pub extern "C" fn hd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn hd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn hd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hd_polynomial_parse(text: *const c_char, out: *mut *mut HdPolynomial) -> HdStatus {
    guard(|| {
        let p = QPoly::parse(read_str(text)?)?;
        write_out(out, Box::into_raw(Box::new(HdPolynomial(p))))?;
        Ok(HdStatus::Ok)
    })
}

/// # Safety
/// `p` must be null or a handle from [`hd_polynomial_parse`].
#[no_mangle]
pub unsafe extern "C" fn hd_polynomial_free(p: *mut HdPolynomial) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hd_polynomial_to_string(p: *const HdPolynomial, out: *mut *mut c_char) -> HdStatus {
    guard(|| {
        write_string(out, deref(p)?.0.to_string())?;
        Ok(HdStatus::Ok)
    })
}

/// `H(p)` as JSON `{"d": d, "entries": [[...]]}`.
///
/// # Safety
/// `p` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hd_hermite_json(p: *const HdPolynomial, out: *mut *mut c_char) -> HdStatus {
    guard(|| {
        let h = hermite_matrix(&deref(p)?.0)?;
        write_string(out, serde_json::to_string(&HermiteFile::from_matrix(&h))?)?;
        Ok(HdStatus::Ok)
    })
}

/// Real-zero test: exact for quadratics, `samples` random points otherwise.
/// Returns `HD_STATUS_NEGATIVE` on a counterexample.
///
/// # Safety
/// `p` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn hd_rz_check(p: *const HdPolynomial, seed: u64, samples: usize) -> HdStatus {
    guard(|| {
        let p = &deref(p)?.0;
        let rep = if p.degree() == Some(2) {
            rz_report_quadratic(p)?
        } else {
            rz_check_random(p, samples.max(1), &mut rng(seed))?
        };
        Ok(if rep.is_counterexample() { HdStatus::Negative } else { HdStatus::Ok })
    })
}

/// Reads a certificate in the JSON file format for the variables of `p`.
///
/// # Safety
/// `json` must be a NUL-terminated string, `p` a valid handle and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hd_certificate_from_json(
    json: *const c_char,
    p: *const HdPolynomial,
    out: *mut *mut HdCertificate,
) -> HdStatus {
    guard(|| {
        let p = &deref(p)?.0;
        let file: CertificateFile = serde_json::from_str(read_str(json)?)?;
        let cert = file.to_certificate(p.nvars(), p.degree().unwrap_or(0))?;
        write_out(out, Box::into_raw(Box::new(HdCertificate::Exact(cert))))?;
        Ok(HdStatus::Ok)
    })
}

/// # Safety
/// `c` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hd_certificate_to_json(c: *const HdCertificate, out: *mut *mut c_char) -> HdStatus {
    guard(|| {
        let file = match deref(c)? {
            HdCertificate::Exact(c) => CertificateFile::from_certificate(c),
            HdCertificate::Double(c) => CertificateFile::from_certificate(c),
        };
        write_string(out, serde_json::to_string(&file)?)?;
        Ok(HdStatus::Ok)
    })
}

/// # Safety
/// `c` must be null or a certificate handle from this library.
#[no_mangle]
pub unsafe extern "C" fn hd_certificate_free(c: *mut HdCertificate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// `HD_STATUS_OK` when the certificate verifies, `HD_STATUS_NEGATIVE` otherwise.
///
/// # Safety
/// `p` and `c` must be valid handles.
#[no_mangle]
pub unsafe extern "C" fn hd_sos_verify(p: *const HdPolynomial, c: *const HdCertificate) -> HdStatus {
    guard(|| {
        let p = &deref(p)?.0;
        let ok = match deref(c)? {
            HdCertificate::Exact(c) => c.verify(&hermite_matrix(p)?)?,
            HdCertificate::Double(c) => c.verify_adjusted(&hermite_matrix(&p.to_f64())?, None, 1e-6)?,
        };
        Ok(if ok { HdStatus::Ok } else { HdStatus::Negative })
    })
}

/// Closed-form certificate of a real-zero quadratic.
///
/// # Safety
/// `p` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hd_quadratic_sos(p: *const HdPolynomial, out: *mut *mut HdCertificate) -> HdStatus {
    guard(|| {
        let cert = quadratic_sos(&deref(p)?.0)?;
        write_out(out, Box::into_raw(Box::new(HdCertificate::Exact(cert))))?;
        Ok(HdStatus::Ok)
    })
}

/// SDP search for `H(p) = QᵀQ`. A positive `relax_11` lets the `(1,1)`
/// entry grow up to that value. Returns `HD_STATUS_NEGATIVE` when the SDP
/// is infeasible and `HD_STATUS_INDETERMINATE` when the solver cannot
/// decide; `*out` is set only on success.
///
/// # Safety
/// `p` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hd_sos_find(p: *const HdPolynomial, relax_11: f64, out: *mut *mut HdCertificate) -> HdStatus {
    guard(|| {
        let h = hermite_matrix(&deref(p)?.0.to_f64())?;
        let opts = SosSearchOptions { relax_11: (relax_11 > 0.0).then_some(relax_11), ..Default::default() };
        match find_sos(&h, &opts)? {
            SosSearch::Found { cert, .. } => {
                write_out(out, Box::into_raw(Box::new(HdCertificate::Double(cert))))?;
                Ok(HdStatus::Ok)
            }
            SosSearch::NotFound { .. } => {
                set_error("the Gram SDP is numerically infeasible");
                Ok(HdStatus::Negative)
            }
            SosSearch::Indeterminate { reason } => {
                set_error(&reason);
                Ok(HdStatus::Indeterminate)
            }
        }
    })
}

/// Closed-form pencil of a real-zero quadratic as JSON `{"k", "M"}`.
///
/// # Safety
/// `p` must be a valid handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hd_detrep_quadratic_json(p: *const HdPolynomial, out: *mut *mut c_char) -> HdStatus {
    guard(|| {
        let pencil = quadratic_pencil(&deref(p)?.0)?;
        write_string(out, serde_json::to_string(&PencilFile::from_pencil(&pencil))?)?;
        Ok(HdStatus::Ok)
    })
}

/// Solves `MQ = QL_t` exactly. Writes the pencil JSON on success and
/// returns `HD_STATUS_NEGATIVE` when the system is infeasible.
///
/// # Safety
/// `p` and `c` must be valid handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hd_detrep_extend_json(
    p: *const HdPolynomial,
    c: *const HdCertificate,
    out: *mut *mut c_char,
) -> HdStatus {
    guard(|| {
        let p = &deref(p)?.0;
        let cert = match deref(c)? {
            HdCertificate::Exact(c) => c.clone(),
            HdCertificate::Double(c) => c.to_rational(1_000_000).ok_or(Error::RationalizationFailed)?,
        };
        let l = companion(p, cert.shift())?;
        match solve_extension(&cert, &l, &ExtensionOptions::default())? {
            Extension::Solved { pencil, .. } => {
                write_string(out, serde_json::to_string(&PencilFile::from_pencil(&pencil))?)?;
                Ok(HdStatus::Ok)
            }
            Extension::Infeasible { rank, augmented_rank, .. } => {
                set_error(&format!("infeasible: rank {rank}, augmented rank {augmented_rank}"));
                Ok(HdStatus::Negative)
            }
        }
    })
}

/// Rational representation as JSON `{"den", "num"}`, checked at `samples`
/// random points; `HD_STATUS_NEGATIVE` if the check fails.
///
/// # Safety
/// `p` and `c` must be valid handles and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hd_ratrep_json(
    p: *const HdPolynomial,
    c: *const HdCertificate,
    seed: u64,
    samples: usize,
    out: *mut *mut c_char,
) -> HdStatus {
    guard(|| {
        let p = &deref(p)?.0;
        let (file, passed) = match deref(c)? {
            HdCertificate::Exact(c) => {
                let m = rational_pencil(p, c)?;
                let rep = verify_rational(&m, p, Some(c), samples.max(1), &mut rng(seed))?;
                (RatrepFile::from_matrix(&m), rep.passed())
            }
            HdCertificate::Double(c) => {
                let pf = p.to_f64();
                let m = rational_pencil(&pf, c)?;
                let rep = verify_rational(&m, &pf, Some(c), samples.max(1), &mut rng(seed))?;
                (RatrepFile::from_matrix(&m), rep.passed())
            }
        };
        write_string(out, serde_json::to_string(&file)?)?;
        Ok(if passed { HdStatus::Ok } else { HdStatus::Negative })
    })
}
