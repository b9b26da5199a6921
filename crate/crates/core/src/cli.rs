//! Command-line front end.
//!
//! Commands that produce data (polynomials, Hermite matrices, certificates,
//! pencils) write it to stdout in a form the other commands read back, so
//! they compose through pipes and files. Status lines go to stderr unless
//! `--json` asks for a machine-readable report on stdout.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::detrep::{
    companion, quadratic_pencil, solve_extension, verify_detrep, DetCheck, Extension, ExtensionOptions, LinearPencil,
};
use crate::error::{Error, Result};
use crate::field::{Coeff, Rational};
use crate::hermite::hermite_matrix;
use crate::io::{CertificateFile, HermiteFile, PencilFile, RatrepFile};
use crate::poly::{FPoly, Polynomial, QPoly};
use crate::ratrep::{rational_pencil, verify_rational};
use crate::realzero::{rz_check_random, rz_report_quadratic, vamos_basis_polynomial, vamos_polynomial, Verdict};
use crate::sampling::rng;
use crate::sdp::SdpOptions;
use crate::sos::{
    find_sos, pencil_corner, quadratic_sos, sos_from_detrep, SosCertificate, SosSearch, SosSearchOptions,
};

/// Exit code of an affirmative answer.
pub const EXIT_OK: u8 = 0;
/// Negative answer: counterexample, infeasible, not divisible, not verified.
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
/// The numerics could not decide.
pub const EXIT_INDETERMINATE: u8 = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    #[default]
    Rational,
    Double,
}

#[derive(Debug, Parser)]
#[command(
    name = "hermite-detrep",
    version,
    about = "Real-zero polynomials, Hermite matrices and determinantal representations"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Args)]
pub struct GlobalArgs {
    /// Coefficient field.
    #[arg(long, global = true, value_enum, default_value_t = Field::Rational)]
    pub field: Field,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of random sample points.
    #[arg(long, global = true, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
    /// Verification tolerance (residual acceptance for sos-find).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// SDP duality gap tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub gap_tol: f64,
    /// SDP feasibility tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub feas_tol: f64,
    /// Print reports as JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,
    /// The polynomial; read from --input or stdin when absent.
    #[arg(short = 'p', long = "poly", global = true)]
    pub poly: Option<String>,
    /// File holding the polynomial.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the parametrized Hermite matrix H(p) as JSON.
    Hermite,
    /// Test the real-zero property: exact for quadratics, sampled otherwise.
    RzCheck,
    /// Search for a matrix sum of squares H(p) = QᵀQ by semidefinite programming.
    SosFind {
        /// Allow the (1,1) entry of H(p) to grow up to this value.
        #[arg(long = "relax-11", value_name = "C")]
        relax_11: Option<f64>,
    },
    /// Verify a certificate q²·H(p) = w·QᵀQ.
    SosVerify {
        #[arg(long)]
        cert: PathBuf,
        /// Compare against H(p) with (1,1) entry replaced by this value.
        #[arg(long = "relax-11", value_name = "C")]
        relax_11: Option<String>,
    },
    /// Build the certificate Q_{(l,m),s} = (M^s)_{lm} from a pencil with det(I - M) = p^r.
    SosFromDetrep {
        #[arg(long)]
        pencil: PathBuf,
        #[arg(long, default_value_t = 1)]
        power: u32,
    },
    /// Solve MQ = QL_t for a linear pencil M.
    DetrepExtend {
        #[arg(long)]
        cert: PathBuf,
        /// Fall back to floating point when the certificate does not rationalize.
        #[arg(long)]
        allow_double: bool,
        /// Relative rank tolerance of the floating-point fallback.
        #[arg(long, default_value_t = 1e-8)]
        rank_tol: f64,
        /// Only use these rows of MQ = QL_t (zero-based, comma separated).
        #[arg(long, value_delimiter = ',')]
        rows: Option<Vec<usize>>,
    },
    /// The closed-form pencil of a real-zero quadratic.
    DetrepQuadratic,
    /// The rational representation q⁻²·Q·L_t·H(p)⁻¹·Qᵀ.
    Ratrep {
        /// Certificate to use; quadratics default to the closed form.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Check det(I - M) = p^r, or divisibility by p.
    VerifyDet {
        #[arg(long)]
        pencil: PathBuf,
        #[arg(long, default_value_t = 1, conflicts_with = "divides")]
        power: u32,
        #[arg(long)]
        divides: bool,
    },
    /// Print the normalized Vámos polynomial.
    Vamos {
        /// Print the basis generating polynomial instead.
        #[arg(long)]
        basis: bool,
    },
}

/// Resolved settings of one invocation.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub field: Field,
    pub seed: u64,
    pub samples: usize,
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub verify_tol: Option<f64>,
    pub json: bool,
    #[serde(skip)]
    pub poly: Option<String>,
    #[serde(skip)]
    pub input: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_args(g: &GlobalArgs) -> Result<Self> {
        for (name, v) in [("gap-tol", Some(g.gap_tol)), ("feas-tol", Some(g.feas_tol)), ("tol", g.tol)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::Invalid(format!("--{name} must be positive")));
                }
            }
        }
        Ok(RunConfig {
            field: g.field,
            seed: g.seed,
            samples: g.samples as usize,
            gap_tol: g.gap_tol,
            feas_tol: g.feas_tol,
            verify_tol: g.tol,
            json: g.json,
            poly: g.poly.clone(),
            input: g.input.clone(),
        })
    }

    fn polynomial_text(&self) -> Result<String> {
        if let Some(p) = &self.poly {
            return Ok(p.clone());
        }
        let mut s = String::new();
        match &self.input {
            Some(path) => s = std::fs::read_to_string(path)?,
            None => {
                std::io::stdin().read_to_string(&mut s)?;
            }
        }
        let s = s.trim().to_string();
        if s.is_empty() {
            return Err(Error::Invalid("no polynomial given (use -p, --input or stdin)".into()));
        }
        Ok(s)
    }

    fn polynomial<C: Coeff>(&self) -> Result<Polynomial<C>> {
        Polynomial::parse(&self.polynomial_text()?)
    }

    fn sdp_options(&self) -> SdpOptions {
        SdpOptions { gap_tol: self.gap_tol, feas_tol: self.feas_tol, ..SdpOptions::default() }
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    configure_threads();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match RunConfig::from_args(&cli.global).and_then(|cfg| run(&cfg, &cli.command, &mut out)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}

pub fn main() -> ExitCode {
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    main_with_args(std::env::args_os())
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::NotRealZero | Error::DetMismatch(_) | Error::InvalidCertificate(_) | Error::SingularHermite => {
            EXIT_NEGATIVE
        }
        _ => EXIT_USAGE,
    }
}

/// Caps the rayon pool at `HERMITE_DETREP_THREADS` workers.
fn configure_threads() {
    if let Some(n) = std::env::var("HERMITE_DETREP_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn write_json(out: &mut dyn Write, v: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

fn report(cfg: &RunConfig, out: &mut dyn Write, value: serde_json::Value, text: &str) -> Result<()> {
    if cfg.json {
        write_json(out, &value)
    } else {
        writeln!(out, "{text}")?;
        Ok(())
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn code(ok: bool) -> u8 {
    if ok {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    }
}

pub fn run(cfg: &RunConfig, cmd: &Command, out: &mut dyn Write) -> Result<u8> {
    match cfg.field {
        Field::Rational => run_in::<Rational>(cfg, cmd, out),
        Field::Double => run_in::<f64>(cfg, cmd, out),
    }
}

fn run_in<C: Coeff>(cfg: &RunConfig, cmd: &Command, out: &mut dyn Write) -> Result<u8> {
    match cmd {
        Command::Hermite => {
            let p: Polynomial<C> = cfg.polynomial()?;
            write_json(out, &HermiteFile::from_matrix(&hermite_matrix(&p)?))?;
            Ok(EXIT_OK)
        }
        Command::RzCheck => rz_check(cfg, out),
        Command::SosFind { relax_11 } => sos_find(cfg, *relax_11, out),
        Command::SosVerify { cert, relax_11 } => {
            let p: Polynomial<C> = cfg.polynomial()?;
            let h = hermite_matrix(&p)?;
            let cert: SosCertificate<C> = read_json::<CertificateFile>(cert)?.to_certificate(p.nvars(), h.degree())?;
            let c11 = relax_11.as_deref().map(crate::io::parse_scalar::<C>).transpose()?;
            let tol = cfg.verify_tol.unwrap_or(crate::sos::VERIFY_TOL);
            let ok = cert.verify_adjusted(&h, c11.as_ref(), tol)?;
            let residual = cert.residual_adjusted(&h, c11.as_ref())?;
            let text = if ok { "certificate verifies" } else { "certificate does not verify" };
            report(cfg, out, json!({"verified": ok, "residual": residual}), text)?;
            Ok(code(ok))
        }
        Command::SosFromDetrep { pencil, power } => {
            let p: Polynomial<C> = cfg.polynomial()?;
            let pencil: LinearPencil<C> = read_json::<PencilFile>(pencil)?.to_pencil()?;
            let cert = sos_from_detrep(&pencil, *power, &p)?;
            let d = p.degree().unwrap_or(0);
            if pencil.size() != *power as usize * d {
                eprintln!(
                    "note: pencil size {} exceeds r·d = {}; the certificate matches H(p) with (1,1) entry {}",
                    pencil.size(),
                    *power as usize * d,
                    crate::io::format_scalar(&pencil_corner::<C>(pencil.size(), *power))
                );
            }
            write_json(out, &CertificateFile::from_certificate(&cert))?;
            Ok(EXIT_OK)
        }
        Command::DetrepExtend { cert, allow_double, rank_tol, rows } => {
            let p: Polynomial<C> = cfg.polynomial()?;
            let d = p.degree().unwrap_or(0);
            let cert: SosCertificate<C> = read_json::<CertificateFile>(cert)?.to_certificate(p.nvars(), d)?;
            let l = companion(&p, cert.shift())?;
            let opts = ExtensionOptions {
                allow_double: *allow_double,
                rank_tol: *rank_tol,
                rows: rows.clone(),
                ..Default::default()
            };
            match solve_extension(&cert, &l, &opts)? {
                Extension::Solved { pencil, nullity, exact, divides } => {
                    eprintln!(
                        "solved ({}), solution space of dimension {nullity}, p divides det(I - M): {}",
                        if exact { "exact" } else { "floating point" },
                        divides.map_or("not checked".to_string(), |b| b.to_string())
                    );
                    write_json(out, &PencilFile::from_pencil(&pencil))?;
                    Ok(if divides == Some(false) { EXIT_NEGATIVE } else { EXIT_OK })
                }
                Extension::Infeasible { rank, augmented_rank, exact } => {
                    report(
                        cfg,
                        out,
                        json!({"status": "INFEASIBLE", "rank": rank, "augmented_rank": augmented_rank, "exact": exact}),
                        &format!("INFEASIBLE: rank {rank}, augmented rank {augmented_rank}"),
                    )?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::DetrepQuadratic => {
            let p: Polynomial<C> = cfg.polynomial()?;
            write_json(out, &PencilFile::from_pencil(&quadratic_pencil(&p)?))?;
            Ok(EXIT_OK)
        }
        Command::Ratrep { cert } => {
            let p: Polynomial<C> = cfg.polynomial()?;
            let d = p.degree().unwrap_or(0);
            let cert: SosCertificate<C> = match cert {
                Some(path) => read_json::<CertificateFile>(path)?.to_certificate(p.nvars(), d)?,
                None if d == 2 => quadratic_sos(&p)?,
                None => return Err(Error::Invalid("--cert is required unless p is quadratic".into())),
            };
            let m = rational_pencil(&p, &cert)?;
            let rep = verify_rational(&m, &p, Some(&cert), cfg.samples, &mut rng(cfg.seed))?;
            let file = RatrepFile::from_matrix(&m);
            write_json(out, &json!({"den": file.den, "num": file.num, "report": rep}))?;
            Ok(code(rep.passed()))
        }
        Command::VerifyDet { pencil, power, divides } => {
            let p: Polynomial<C> = cfg.polynomial()?;
            let pencil: LinearPencil<C> = read_json::<PencilFile>(pencil)?.to_pencil()?;
            let check = if *divides { DetCheck::Divides } else { DetCheck::Power(*power) };
            let ok = verify_detrep(&pencil, &p, check)?;
            let what = if *divides { "p divides det(I - M)".to_string() } else { format!("det(I - M) = p^{power}") };
            let text = format!("{what}: {ok}");
            report(cfg, out, json!({"check": what, "holds": ok}), &text)?;
            Ok(code(ok))
        }
        Command::Vamos { basis } => {
            let p = if *basis { vamos_basis_polynomial() } else { vamos_polynomial() };
            writeln!(out, "{}", p.map_coeffs(|c| C::from_rational(c)))?;
            Ok(EXIT_OK)
        }
    }
}

/// Real-zero test over the rationals; double input is rationalized.
fn rz_check(cfg: &RunConfig, out: &mut dyn Write) -> Result<u8> {
    let p: QPoly = match cfg.field {
        Field::Rational => cfg.polynomial()?,
        Field::Double => crate::detrep::poly_to_rational(&cfg.polynomial::<f64>()?, 1_000_000)
            .ok_or_else(|| Error::Invalid("coefficients do not rationalize".into()))?,
    };
    let rep = if p.degree() == Some(2) {
        rz_report_quadratic(&p)?
    } else {
        rz_check_random(&p, cfg.samples, &mut rng(cfg.seed))?
    };
    let witness: Option<Vec<String>> = rep.witness.as_ref().map(|w| w.iter().map(crate::io::format_scalar).collect());
    let text = match rep.verdict {
        Verdict::QuadraticExact => "real-zero (exact quadratic test)".to_string(),
        Verdict::CertifiedPsdOnSamples => format!("H(p) is PSD at all {} sample points", rep.samples_checked),
        Verdict::Counterexample => {
            format!("not real-zero: H(p) is not PSD at ({})", witness.clone().unwrap_or_default().join(", "))
        }
    };
    report(cfg, out, json!({"verdict": rep.verdict, "samples": rep.samples_checked, "witness": witness}), &text)?;
    Ok(code(!rep.is_counterexample()))
}

fn sos_find(cfg: &RunConfig, relax_11: Option<f64>, out: &mut dyn Write) -> Result<u8> {
    let p: FPoly = match cfg.field {
        Field::Rational => cfg.polynomial::<Rational>()?.to_f64(),
        Field::Double => cfg.polynomial()?,
    };
    let h = hermite_matrix(&p)?;
    let mut opts = SosSearchOptions { relax_11, sdp: cfg.sdp_options(), ..Default::default() };
    if let Some(t) = cfg.verify_tol {
        opts.residual_tol = t;
    }
    match find_sos(&h, &opts)? {
        SosSearch::Found { cert, residual, c11 } => {
            eprintln!(
                "certificate found, residual {residual:.3e}{}",
                c11.map_or(String::new(), |c| format!(", (1,1) entry {c}"))
            );
            let file = CertificateFile::from_certificate(&cert);
            if cfg.json {
                write_json(out, &json!({"status": "FOUND", "residual": residual, "c11": c11, "certificate": file}))?;
            } else {
                write_json(out, &file)?;
            }
            Ok(EXIT_OK)
        }
        SosSearch::NotFound { .. } => {
            report(cfg, out, json!({"status": "NOT_FOUND"}), "NOT_FOUND: the Gram SDP is numerically infeasible")?;
            Ok(EXIT_NEGATIVE)
        }
        SosSearch::Indeterminate { reason } => {
            report(
                cfg,
                out,
                json!({"status": "INDETERMINATE", "reason": reason}),
                &format!("INDETERMINATE: {reason}"),
            )?;
            Ok(EXIT_INDETERMINATE)
        }
    }
}
