use std::path::PathBuf;
use std::process::{Command, Output};

use fvchar::dieudonne::GradedDieudonneModule;
use fvchar::galois::{FiniteField, Matrix};
use serde_json::{json, Value};

fn fvchar(args: &[&str], stdin: Option<&str>) -> Output {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_fvchar"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn fixture(name: &str, value: &Value) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli-fixtures");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn expf_raynaud_character() {
    let out = fvchar(&["expf"], Some(r#"{"p":2,"r":2,"coeffs":{"1":1,"2":1}}"#));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), json!({"0": 2, "1": 1, "2": 1}));
}

#[test]
fn expf_rejects_non_primitive_support() {
    let out = fvchar(&["expf"], Some(r#"{"p":3,"r":2,"coeffs":{"2":1}}"#));
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn char_and_ch_of_small_modules() {
    let k = FiniteField::new(2, 1).unwrap();
    let zero = fixture("zero.json", &GradedDieudonneModule::zero(k.clone(), 1).unwrap().to_json());
    let out = fvchar(&["ch", "--module", &zero], None);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), json!({"0": 1}));
    assert_eq!(stdout_json(&fvchar(&["char", "--module", &zero], None)), json!({}));

    let k4 = FiniteField::new(2, 2).unwrap();
    let alpha = fixture("alpha.json", &GradedDieudonneModule::alpha(k4, 2, 1).unwrap().to_json());
    assert_eq!(stdout_json(&fvchar(&["char", "--module", &alpha], None)), json!({"2": 1}));
    assert_eq!(stdout_json(&fvchar(&["ch", "--module", &alpha], None)), json!({"0": 1, "2": 1}));
}

#[test]
fn oracle_compare_and_gate() {
    let k = FiniteField::new(3, 2).unwrap();
    let f = Matrix::from_fn(1, 2, |_, j| k.from_index(j as u32 + 1));
    let zero = Matrix::from_fn(2, 1, |_, _| k.from_index(0));
    let m = GradedDieudonneModule::additive(k.clone(), 2, vec![2, 1], &[f, zero]).unwrap();
    let path = fixture("additive.json", &m.to_json());
    let out = fvchar(&["oracle-compare", "--module", &path], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(v["formula"], v["projector"]);
    let gated = fvchar(&["oracle-compare", "--module", &path, "--gate", "3"], None);
    assert_eq!(gated.status.code(), Some(3));
}

#[test]
fn raynaud_iso_over_f5() {
    let ring = fixture("f5.json", &json!({"p": 5, "m": 1, "s": 1}));
    let two = fixture("x2.json", &json!({"w": 0, "pairs": [[2, 0]]}));
    let two_again = fixture("x2b.json", &json!({"w": 0, "pairs": [[2, 0]]}));
    let three = fixture("x3.json", &json!({"w": 0, "pairs": [[3, 0]]}));

    let same = fvchar(&["raynaud-iso", "--ring", &ring, "--left", &two, "--right", &two_again], None);
    assert_eq!(same.status.code(), Some(0));
    assert_eq!(stdout_json(&same), json!({"isomorphic": true, "lambda": [[1]]}));

    let different = fvchar(&["raynaud-iso", "--ring", &ring, "--left", &two, "--right", &three], None);
    assert_eq!(different.status.code(), Some(1));
    assert_eq!(stdout_json(&different), json!({"isomorphic": false}));

    let gated = fvchar(&["raynaud-iso", "--ring", &ring, "--left", &two, "--right", &three, "--gate", "1"], None);
    assert_eq!(gated.status.code(), Some(2));
}

#[test]
fn raynaud_check_verdicts() {
    let yes = fvchar(&["raynaud-check"], Some(r#"{"p":3,"r":2,"coeffs":{"1":1,"3":1}}"#));
    assert_eq!(yes.status.code(), Some(0));
    assert_eq!(stdout_json(&yes), json!({"direct": true, "primitive_coefficients": true}));
    let no = fvchar(&["raynaud-check"], Some(r#"{"p":3,"r":2,"coeffs":{"1":2}}"#));
    assert_eq!(no.status.code(), Some(1));
    assert_eq!(stdout_json(&no), json!({"direct": false, "primitive_coefficients": false}));
    let bad = fvchar(&["raynaud-check"], Some(r#"{"p":3,"r":2,"coeffs":{"1":-1}}"#));
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn gen_round_trips_through_od_check() {
    let first = fvchar(&["gen", "--seed", "1"], None);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, fvchar(&["gen", "--seed", "1"], None).stdout);
    let path = fixture("gen1.json", &stdout_json(&first));
    let check = fvchar(&["od-check", "--module", &path], None);
    assert_eq!(check.status.code(), Some(0));
    let v = stdout_json(&check);
    assert_eq!(v["h"], 1);
    assert_eq!(v["divcar"], true);
    assert_eq!(v["lemma"], true);
    assert_eq!(v["theorem"]["agree"], true);
}

#[test]
fn gen_with_target_lie() {
    let out = fvchar(&["gen", "--seed", "5", "--p", "3", "--target-lie", "1,1"], None);
    assert_eq!(out.status.code(), Some(0));
    let path = fixture("special.json", &stdout_json(&out));
    let v = stdout_json(&fvchar(&["od-check", "--module", &path], None));
    assert_eq!(v["lie_char"], json!({"1": 1, "3": 1}));
    assert_eq!(v["theorem"], json!({"agree": true, "criterion": true, "direct": true}));
    assert_eq!(v["special"], true);

    let impossible = fvchar(&["gen", "--target-lie", "7,0"], None);
    assert_eq!(impossible.status.code(), Some(2));
}

#[test]
fn od_check_rejects_broken_modules() {
    let out = fvchar(&["gen", "--seed", "2", "--no-conjugate"], None);
    let mut v = stdout_json(&out);
    let pi = v["Pi"].as_object_mut().unwrap();
    let key = pi.keys().next().unwrap().clone();
    pi.remove(&key);
    let path = fixture("broken.json", &v);
    let check = fvchar(&["od-check", "--module", &path], None);
    assert_eq!(check.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&check.stderr).contains("Pi"));
}

#[test]
fn malformed_input() {
    assert_eq!(fvchar(&["expf"], Some("{")).status.code(), Some(2));
    assert_eq!(fvchar(&["char", "--module", "/nonexistent/m.json"], None).status.code(), Some(2));
}
