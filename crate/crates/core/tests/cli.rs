use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use hermite_detrep::field::Rational;
use hermite_detrep::io::{CertificateFile, PencilFile};
use hermite_detrep::poly::QPoly;
use serde_json::Value;

const QUAD: &str = "1 + 2*x1 + x1^2 - x2^2 - x3^2";

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_hermite-detrep"))
        .args(args)
        .env("HERMITE_DETREP_THREADS", "1")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut input = child.stdin.take().unwrap();
    input.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(input);
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hermite-detrep-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn hermite_json_is_deterministic() {
    let a = run(&["-p", "x1^3 - x1^2 - x1 + 1 - x2^2", "hermite"], None);
    let b = run(&["hermite"], Some("x1^3 - x1^2 - x1 + 1 - x2^2\n"));
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    let v: Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["d"], 3);
    assert_eq!(v["entries"][0][0], "3");
    assert_eq!(v["entries"][1][1], "3*x1^2 + 2*x2^2");
}

#[test]
fn exit_codes() {
    assert_eq!(code(&run(&["-p", QUAD, "rz-check"], None)), 0);
    assert_eq!(code(&run(&["-p", "1 + x1^2", "rz-check"], None)), 1);
    assert_eq!(code(&run(&["-p", "1 + x1^2", "sos-find"], None)), 1);
    let parse = run(&["-p", "1 + *x1", "hermite"], None);
    assert_eq!(code(&parse), 2);
    assert!(String::from_utf8_lossy(&parse.stderr).contains("position"));
    assert_eq!(code(&run(&["--bogus", "hermite"], None)), 2);
    assert_eq!(code(&run(&["-p", "2 + x1", "hermite"], None)), 2);
}

#[test]
fn vamos_pipes_into_rz_check() {
    let vamos = run(&["vamos"], None);
    assert_eq!(code(&vamos), 0);
    let text = stdout(&vamos);
    let p = QPoly::parse(text.trim()).unwrap();
    assert_eq!(p.nvars(), 8);
    assert_eq!(p.degree(), Some(4));
    let check = run(&["--json", "--samples", "50", "rz-check"], Some(&text));
    assert_eq!(code(&check), 0);
    let v: Value = serde_json::from_str(&stdout(&check)).unwrap();
    assert_eq!(v["samples"], 50);
}

#[test]
fn certificate_round_trip() {
    let exact = run(&["-p", QUAD, "sos-find"], None);
    assert_eq!(code(&exact), 0);
    let file: CertificateFile = serde_json::from_str(&stdout(&exact)).unwrap();
    let cert = file.to_certificate::<f64>(3, 2).unwrap();
    assert_eq!(cert.matrix().cols(), 2);
    let path = scratch("cert.json", &stdout(&exact));
    let path = path.to_str().unwrap();
    assert_eq!(code(&run(&["-p", QUAD, "--field", "double", "sos-verify", "--cert", path], None)), 0);
    // Rational verification is exact, so a floating-point certificate fails it.
    assert_eq!(code(&run(&["-p", QUAD, "sos-verify", "--cert", path], None)), 1);
    assert_eq!(
        code(&run(&["-p", "1 + 3*x1 + x1^2 - x2^2 - x3^2", "--field", "double", "sos-verify", "--cert", path], None)),
        1
    );
}

#[test]
fn quadratic_pencil_pipeline() {
    let out = run(&["-p", QUAD, "detrep-quadratic"], None);
    assert_eq!(code(&out), 0);
    let file: PencilFile = serde_json::from_str(&stdout(&out)).unwrap();
    let pencil = file.to_pencil::<Rational>().unwrap();
    assert_eq!(pencil.size(), 4);
    assert_eq!(serde_json::to_string_pretty(&PencilFile::from_pencil(&pencil)).unwrap().trim(), stdout(&out).trim());
    let path = scratch("pencil.json", &stdout(&out));
    let path = path.to_str().unwrap();
    assert_eq!(code(&run(&["-p", QUAD, "verify-det", "--pencil", path, "--divides"], None)), 0);
    assert_eq!(code(&run(&["-p", QUAD, "verify-det", "--pencil", path], None)), 1);
    assert_eq!(code(&run(&["-p", QUAD, "sos-from-detrep", "--pencil", path, "--power", "1"], None)), 1);
}

#[test]
fn ratrep_reports_verification() {
    let a = run(&["--json", "--seed", "7", "-p", QUAD, "ratrep"], None);
    let b = run(&["--json", "--seed", "7", "-p", QUAD, "ratrep"], None);
    assert_eq!(code(&a), 0);
    assert_eq!(stdout(&a), stdout(&b));
    let v: Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["den"], "4*x2^2 + 4*x3^2");
    assert_eq!(v["report"]["symbolic"], true);
    assert_eq!(v["report"]["numeric"], true);
}

#[test]
fn cubic_extension_is_infeasible() {
    let s7 = 7f64.sqrt();
    let s2 = std::f64::consts::SQRT_2;
    let cert = serde_json::json!({
        "q": "1",
        "Q": [
            ["0", "x2", format!("{}*x1*x2", (s7 + 1.0) / 2.0)],
            ["0", "-x2", format!("{}*x1*x2", (s7 - 1.0) / 2.0)],
            [format!("{s2}"), format!("{s2}*x1"), format!("{s2}*x1^2 + {s2}*x2^2")],
            ["1", "-x1", "x1^2"],
        ],
    });
    let path = scratch("cubic.json", &cert.to_string());
    let path = path.to_str().unwrap();
    let p = "x1^3 - x1^2 - x1 + 1 - x2^2";
    let refused = run(&["-p", p, "--field", "double", "detrep-extend", "--cert", path], None);
    assert_eq!(code(&refused), 2);
    assert!(String::from_utf8_lossy(&refused.stderr).contains("rationaliz"));
    let out =
        run(&["-p", p, "--field", "double", "detrep-extend", "--cert", path, "--allow-double", "--rows", "0,1"], None);
    assert_eq!(code(&out), 1);
}
