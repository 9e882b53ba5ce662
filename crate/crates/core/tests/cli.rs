//! End-to-end tests of the `finterm` binary: contract examples, exit codes
//! and the property that every JSON document the tool emits can be read
//! back by the tool.

use std::path::PathBuf;
use std::process::Command;

use proptest::prelude::*;
use serde_json::{json, Value};

const DIHEDRAL_TOWER: &str = r#"{"levels":[{"kind":"base"},{"kind":"dihedral","minpoly":["-x","0","1"],"gamma":"1"}]}"#;
const DIHEDRAL_CERT: &str = r#"{"level":1,"terms":[{"c":"1","u":"alpha"}],"v":"0","f":"1/(2*x)"}"#;
const AIRY_TOWER: &str = r#"{"levels":[{"kind":"base"},{"kind":"sl2","r":"0","s":"x","omega":"1"}]}"#;
const AIRY_CERT: &str = r#"{"level":1,"terms":[{"c":"1","u":"1/y"},{"c":"1","u":"x^3*y"}],"v":"0","f":"3/x"}"#;
const MIXED_TOWER: &str = r#"{"levels":[{"kind":"base"},{"kind":"log","arg":"x + 1"},
    {"kind":"weierstrass","g0":"0","g1":"4","alpha":"1"}]}"#;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Run {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", self.stdout))
    }
}

fn finterm(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_finterm"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Writes `content` to a fresh file under the test scratch directory.
fn file(name: &str, content: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(format!("{}-{name}", std::process::id()));
    std::fs::write(&path, content).unwrap();
    path.to_string_lossy().into_owned()
}

fn error_code(run: &Run) -> String {
    run.json()["error"]["code"].as_str().expect("error object").to_string()
}

#[test]
fn descend_dihedral_worked_example() {
    let tower = file("dih-tower.json", DIHEDRAL_TOWER);
    let cert = file("dih-cert.json", DIHEDRAL_CERT);
    let run = finterm(&["descend", "--tower", &tower, "--cert", &cert]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(
        run.json(),
        json!({"level": 0, "terms": [{"c": "1/2", "u": "x"}], "v": "0", "f": "1/(2*x)"})
    );
}

#[test]
fn descend_airy_worked_example_with_trace() {
    let tower = file("airy-tower.json", AIRY_TOWER);
    let cert = file("airy-cert.json", AIRY_CERT);
    let run = finterm(&["--json", "descend", "--tower", &tower, "--cert", &cert, "--trace"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.stdout.trim().lines().count(), 1, "compact output is one line");
    let report = run.json();
    assert_eq!(report["output"]["terms"], json!([{"c": "1", "u": "x^3"}]));
    assert_eq!(report["steps"][0]["extracted"]["e"], "0");
}

#[test]
fn riccati_airy_has_no_rational_solutions() {
    let run = finterm(&["riccati", "--r", "0", "--s", "x"]);
    assert_eq!(run.code, 0);
    assert_eq!(run.json(), json!({"solutions": []}));
}

#[test]
fn riccati_reports_solutions_and_families() {
    let run = finterm(&["riccati", "--r", "0", "--s", "x^2 + 1"]);
    assert_eq!(run.json(), json!({"solutions": ["x"]}));
    let run = finterm(&["riccati", "--r", "0", "--s", "0"]);
    let v = run.json();
    assert!(v["solutions"].as_array().unwrap().contains(&json!("1/x")));
    assert_eq!(v["families"][0]["basis"], json!(["1", "x"]));
}

#[test]
fn verify_cert_rejects_corrupted_certificate() {
    let tower = file("corrupt-tower.json", DIHEDRAL_TOWER);
    let cert = file("corrupt-cert.json", &DIHEDRAL_CERT.replace("2*x", "3*x"));
    let run = finterm(&["verify-cert", "--tower", &tower, "--cert", &cert]);
    assert_eq!(run.code, 1);
    assert_eq!(error_code(&run), "identity_fails");
    assert!(run.json()["error"]["message"]
        .as_str()
        .unwrap()
        .starts_with("identity fails"));
}

#[test]
fn derive_and_laurent_print_text_by_default() {
    let run = finterm(&["derive", "1/(x^2-1)"]);
    assert_eq!(run.stdout.trim(), "-2*x/(x^4 - 2*x^2 + 1)");
    let run = finterm(&["--json", "derive", "1/(x^2-1)"]);
    assert_eq!(run.json(), json!({"derivative": "-2*x/(x^4 - 2*x^2 + 1)"}));
    let run = finterm(&["laurent", "1/(x^2-1)", "--at", "1", "--truncation", "3"]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.starts_with("order -1\n(1/2)*(x - (1))^-1"), "{}", run.stdout);
}

#[test]
fn laurent_truncation_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_finterm"))
        .args(["--json", "laurent", "1/x", "--at", "0"])
        .env("FINTERM_MAX_TRUNCATION", "3")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["truncation"], 3);
    assert_eq!(v["coeffs"].as_array().unwrap().len(), 4);
}

#[test]
fn domain_errors_exit_one_with_codes() {
    let cases: [(&[&str], &str); 6] = [
        (&["derive", "theta'"], "parse_error"),
        (&["derive", "1/0"], "parse_error"),
        (&["derive", "t1 + x"], "parse_error"),
        (&["integrate-rational", "x +"], "parse_error"),
        (&["riccati", "--r", "0", "--s", "1/"], "parse_error"),
        (&["laurent", "1/x", "--at", "0", "--var", "t9"], "parse_error"),
    ];
    for (args, code) in cases {
        let run = finterm(args);
        assert_eq!(run.code, 1, "{args:?}");
        assert_eq!(error_code(&run), code, "{args:?}");
    }
    let bad_json = file("bad.json", "{ not json");
    let run = finterm(&["build-tower", &bad_json]);
    assert_eq!((run.code, error_code(&run).as_str()), (1, "invalid_json"));
    let bad_kind = file("bad-kind.json", r#"{"levels":[{"kind":"base"},{"kind":"spline"}]}"#);
    let run = finterm(&["build-tower", &bad_kind]);
    assert_eq!(run.code, 1);
    assert_eq!(error_code(&run), "schema_error");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["frobnicate"],
        vec![],
        vec!["descend", "--tower", "t.json"],
        vec!["verify-cert", "--cert", "/nonexistent/finterm/cert.json"],
        vec!["laurent", "x", "--at", "0", "--series", "sideways"],
    ] {
        let run = finterm(&args);
        assert_eq!(run.code, 2, "{args:?}: {}", run.stdout);
        assert!(!run.stderr.is_empty());
    }
    assert_eq!(finterm(&["--help"]).code, 0);
    assert_eq!(finterm(&["--version"]).code, 0);
}

#[test]
fn emitted_certificates_are_rereadable() {
    for f in ["1/(x^3 + x + 1)", "(x^4 + 1)/(x^3 - x)", "1/(x^2 + 1)", "x^2 - 3/x"] {
        let run = finterm(&["integrate-rational", f]);
        assert_eq!(run.code, 0, "{f}: {}", run.stdout);
        let cert = file("int-cert.json", &run.stdout);
        let check = finterm(&["verify-cert", "--cert", &cert]);
        assert_eq!(check.json(), json!({"verified": true}), "{f}");
    }
    let tower = file("rt-tower.json", DIHEDRAL_TOWER);
    let cert = file("rt-cert.json", DIHEDRAL_CERT);
    let run = finterm(&["descend", "--tower", &tower, "--cert", &cert, "--trace"]);
    let report = run.json();
    for key in ["input", "output"] {
        let path = file("rt-part.json", &report[key].to_string());
        let args = if key == "input" {
            vec!["verify-cert", "--tower", &tower, "--cert", &path]
        } else {
            vec!["verify-cert", "--cert", &path]
        };
        assert_eq!(finterm(&args).code, 0, "{key}");
    }
}

#[test]
fn emitted_towers_and_expressions_are_rereadable() {
    for src in [DIHEDRAL_TOWER, AIRY_TOWER, MIXED_TOWER] {
        let first = finterm(&["build-tower", &file("tw1.json", src)]);
        assert_eq!(first.code, 0, "{}", first.stdout);
        let second = finterm(&["build-tower", &file("tw2.json", &first.stdout)]);
        assert_eq!(first.json(), second.json());
    }
    let tower = file("expr-tower.json", MIXED_TOWER);
    let d = finterm(&["--json", "derive", "--tower", &tower, "theta*t1/(x + 1)"]).json();
    let printed = d["derivative"].as_str().unwrap();
    let again = finterm(&["--json", "derive", "--tower", &tower, printed]);
    assert_eq!(again.code, 0, "{printed}");

    let l = finterm(&["--json", "laurent", "1/(x^3 - x)", "--at", "-1", "--truncation", "4"]).json();
    for c in l["coeffs"].as_array().unwrap() {
        assert_eq!(finterm(&["derive", c.as_str().unwrap()]).code, 0, "{c}");
    }
    let r = finterm(&["riccati", "--r", "0", "--s", "0"]).json();
    for s in r["solutions"].as_array().unwrap() {
        assert_eq!(finterm(&["derive", s.as_str().unwrap()]).code, 0, "{s}");
    }
}

fn run_in_process(args: &[String]) -> (i32, String) {
    let (mut out, mut err) = (vec![], vec![]);
    let mut argv = vec!["finterm".to_string()];
    argv.extend(args.iter().cloned());
    let code = finterm::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Arbitrary text as an expression never crashes the tool: it is either
    /// parsed (exit 0) or rejected as a domain error with a JSON error
    /// object (exit 1).
    #[test]
    fn arbitrary_expressions_exit_zero_or_one(src in "[-+*/^()x0-9 a-z']{0,16}") {
        let (code, out) = run_in_process(&["derive".into(), src.clone()]);
        prop_assert!(code == 0 || code == 1, "{src:?} exited {code}");
        if code == 1 {
            let v: Value = serde_json::from_str(&out).unwrap();
            prop_assert!(v["error"]["code"].is_string());
        }
    }

    /// Certificates corrupted by replacing one character are rejected with
    /// exit 1 (or still accepted when the edit is harmless), never with a
    /// crash or a usage error.
    #[test]
    fn corrupted_certificates_exit_zero_or_one(pos in 0usize..DIHEDRAL_CERT.len(), ch in "[-0-9a-z{}\\[\\]\":,/*^]") {
        let mut text: Vec<char> = DIHEDRAL_CERT.chars().collect();
        text[pos] = ch.chars().next().unwrap();
        let text: String = text.into_iter().collect();
        let tower = file("prop-tower.json", DIHEDRAL_TOWER);
        let cert = file(&format!("prop-cert-{pos}.json"), &text);
        let (code, out) = run_in_process(&["verify-cert".into(), "--tower".into(), tower, "--cert".into(), cert]);
        prop_assert!(code == 0 || code == 1, "{text} exited {code}");
        let v: Value = serde_json::from_str(&out).unwrap();
        prop_assert!(code == 0 || v["error"]["code"].is_string());
    }
}
