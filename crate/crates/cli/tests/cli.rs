use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_wavecone"));
    c.env_remove("WAVECONE_THREADS").env("RUST_LOG", "error");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_ok(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn stderr_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn gallery(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let p = dir.join(format!("{name}.json"));
    let mut full = vec!["gallery"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", p.to_str().unwrap()]);
    let out = run(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn ell_of_curl_is_analytic() {
    let t = tempfile::tempdir().unwrap();
    let op = gallery(t.path(), "curl", &["curl", "-d", "3", "-m", "2"]);
    let v = json_ok(&["--no-timings", "ell", "-i", s(&op)]);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "ell");
    assert_eq!(v["results"]["value"], 2);
    assert_eq!(v["results"]["mode"], "analytic");
    assert!(v.get("timings").is_none());
    let files = v["inputs"]["files"].as_object().unwrap();
    assert_eq!(files.values().next().unwrap().as_str().unwrap().len(), 64);
}

#[test]
fn unstructured_div_is_lattice_exhausted() {
    let t = tempfile::tempdir().unwrap();
    let op = gallery(t.path(), "div", &["div", "-k", "2", "-d", "2"]);
    let mut j: Value = serde_json::from_slice(&std::fs::read(&op).unwrap()).unwrap();
    j.as_object_mut().unwrap().remove("structure");
    std::fs::write(&op, serde_json::to_vec(&j).unwrap()).unwrap();
    let v = json_ok(&["--no-timings", "ell", "-i", s(&op), "--height", "1"]);
    assert_eq!(v["results"]["value"], 1);
    assert_eq!(v["results"]["mode"], "lattice-exhausted");
}

#[test]
fn zero_principal_part_is_rejected() {
    let t = tempfile::tempdir().unwrap();
    let p = t.path().join("zero.json");
    std::fs::write(
        &p,
        r#"{"d":2,"dimE":1,"dimF":1,"P":[[["0"]],[["0"]]],"P0":[["1"]]}"#,
    )
    .unwrap();
    let err = stderr_of(&["ell", "-i", s(&p)]);
    assert!(err.contains("principal part vanishes"), "{err}");
}

#[test]
fn malformed_operator_names_the_field() {
    let t = tempfile::tempdir().unwrap();
    let p = t.path().join("bad.json");
    std::fs::write(&p, r#"{"d":1,"dimE":1,"dimF":1,"P":[[["x"]]]}"#).unwrap();
    let err = stderr_of(&["ell", "-i", s(&p)]);
    assert!(err.contains("P[0]"), "{err}");
    std::fs::write(&p, r#"{"dimE":1,"dimF":1,"P":[]}"#).unwrap();
    let err = stderr_of(&["ell", "-i", s(&p)]);
    assert!(err.contains("`d`"), "{err}");
}

#[test]
fn member_reports_rank() {
    let t = tempfile::tempdir().unwrap();
    let op = gallery(t.path(), "curl", &["curl", "-d", "2", "-m", "1"]);
    let v = json_ok(&["member", "-i", s(&op), "-e", "1,-1/2"]);
    assert_eq!(v["results"]["member"], true);
    assert_eq!(v["results"]["rank"], 1);
    let err = stderr_of(&["member", "-i", s(&op), "-e", "1,zz"]);
    assert!(err.contains("entry 1"), "{err}");
}

#[test]
fn pipeline_rejects_coarse_grid() {
    let t = tempfile::tempdir().unwrap();
    let op = gallery(t.path(), "div", &["div", "-k", "2", "-d", "2"]);
    let err = stderr_of(&["pipeline", "-i", s(&op), "-n", "8"]);
    assert!(err.contains("grid too coarse for requested scales"), "{err}");
}

#[test]
fn pipeline_passes_on_div() {
    let t = tempfile::tempdir().unwrap();
    let op = gallery(t.path(), "div", &["div", "-k", "2", "-d", "2"]);
    let v = json_ok(&["--no-timings", "pipeline", "-i", s(&op), "-n", "64"]);
    let checks = v["results"]["checks"].as_object().unwrap();
    assert!(checks.values().all(|c| c == true), "{checks:?}");
    assert_eq!(v["results"]["ell"], 1);
}

#[test]
fn verify_appendix_bounds() {
    let err = stderr_of(&["verify-appendix", "--dmax", "7"]);
    assert!(err.contains("dmax"), "{err}");
    let v = json_ok(&["--no-timings", "verify-appendix", "--dmax", "4", "--samples", "100"]);
    assert_eq!(v["command"], "verify-appendix");
}

#[test]
fn measure_round_trip_through_subcommands() {
    let t = tempfile::tempdir().unwrap();
    let op = gallery(t.path(), "curl", &["curl", "-d", "2", "-m", "1"]);
    let cert = t.path().join("cert.json");
    json_ok(&["ell", "-i", s(&op), "-o", s(&cert)]);
    let mu = t.path().join("mu");
    let v = json_ok(&["sharp", "-i", s(&op), "--cert", s(&cert), "-n", "64", "-o", s(&mu)]);
    assert_eq!(v["results"]["ell"], 1);
    assert!((v["results"]["total_mass"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    for f in ["header.json", "mass.f64", "polar.f64"] {
        assert!(mu.join(f).is_file(), "{f}");
    }

    let v = json_ok(&["residual", "-i", s(&op), "-m", s(&mu)]);
    assert!(v["results"]["residual"].as_f64().unwrap() < 0.05);

    let v = json_ok(&["dim-estimate", "-m", s(&mu)]);
    assert!((v["results"]["box_dimension"]["estimate"].as_f64().unwrap() - 1.0).abs() < 0.2);
    assert_eq!(v["results"]["invariance"]["dim"], 1);

    let out = t.path().join("mask");
    let v = json_ok(&["mask", "-i", s(&op), "-m", s(&mu), "-o", s(&out)]);
    assert_eq!(v["results"]["supported_cells"], 64);
    let m = std::fs::read(out.join("mask.u8")).unwrap();
    assert_eq!(m.len(), 64 * 64);
    assert!(m.iter().all(|&b| b == 0), "sharp polar lies in the wave cone");

    let err = stderr_of(&["residual", "-i", s(&gallery(t.path(), "d3", &["div", "-k", "1", "-d", "3"])), "-m", s(&mu)]);
    assert!(err.contains("mismatch"), "{err}");
}

#[test]
fn reports_are_deterministic_without_timings() {
    let t = tempfile::tempdir().unwrap();
    let op = gallery(t.path(), "curl", &["curl", "-d", "3", "-m", "1"]);
    let args = ["--no-timings", "pipeline", "-i", s(&op), "-n", "32", "--seed", "3"];
    let a = run(&args);
    let b = bin().args(args).env("WAVECONE_THREADS", "1").output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn table_format_and_report_file() {
    let t = tempfile::tempdir().unwrap();
    let op = gallery(t.path(), "ext", &["ext", "-d", "3", "-m", "1"]);
    let rep = t.path().join("r.txt");
    let out = run(&["--format", "table", "--report", s(&rep), "ell", "-i", s(&op)]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&rep).unwrap();
    assert!(text.starts_with("command  ell\n"), "{text}");
    assert!(text.contains("time.search"));
}

#[test]
fn bad_thread_count_is_an_error() {
    let out = bin().args(["verify-appendix", "--dmax", "1"]).env("WAVECONE_THREADS", "many").output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("WAVECONE_THREADS"));
}

#[test]
fn long_gallery_flags_and_vector_file() {
    let t = tempfile::tempdir().unwrap();
    let op = gallery(t.path(), "curl", &["curl", "--d", "3", "--m", "2"]);
    let e = t.path().join("e.json");
    std::fs::write(&e, r#"["1", "0", "0", "0", "0", "0"]"#).unwrap();
    let v = json_ok(&["member", "-i", s(&op), "-e", s(&e)]);
    assert_eq!(v["results"]["member"], true);
    assert_eq!(v["results"]["rank"], 2);
    assert_eq!(v["inputs"]["files"].as_object().unwrap().len(), 2);
}
