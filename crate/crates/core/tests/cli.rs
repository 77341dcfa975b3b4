use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use sha2::Digest;

fn legch(args: &[&str], stdin: Option<&[u8]>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_legch"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    if let Some(bytes) = stdin {
        pipe.write_all(bytes).unwrap();
    }
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn examples() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples")
}

fn example(name: &str) -> String {
    examples().join(name).display().to_string()
}

#[test]
fn build_then_classify() {
    let built = legch(&["build", "torus", "--n", "3"], None);
    assert!(built.status.success());
    let classified = legch(&["classify", "-"], Some(&built.stdout));
    assert_eq!(classified.status.code(), Some(0));
    let text = stdout(&classified);
    assert!(text.starts_with("even ∂-class: true\n"), "{text}");
    assert!(text.contains("ℓ(∂a1) = 4"));

    let five = legch(&["build", "torus", "--n", "5"], None);
    let classified = legch(&["classify", "-"], Some(&five.stdout));
    assert!(stdout(&classified).starts_with("even ∂-class: false\n"));
}

#[test]
fn outputs_are_byte_identical() {
    let a = legch(&["build", "torus", "--n", "9"], None);
    let b = legch(&["build", "torus", "--n", "9"], None);
    assert_eq!(a.stdout, b.stdout);
    let t1 = legch(&["tangle", "-", "--prefix", "k1"], Some(&a.stdout));
    let t2 = legch(&["tangle", "-", "--prefix", "k1"], Some(&b.stdout));
    assert!(t1.status.success());
    assert_eq!(t1.stdout, t2.stdout);
    let v1 = legch(&["verdict", "--fly", "3,7", "--power", "1,2,3"], None);
    let v2 = legch(&["verdict", "--fly", "3,7", "--power", "1,2,3"], None);
    assert_eq!(v1.stdout, v2.stdout);
}

#[test]
fn examples_match_the_builders() {
    let built = legch(&["build", "torus", "--n", "3"], None);
    assert_eq!(stdout(&built), std::fs::read_to_string(example("trefoil.json")).unwrap());
    let t = legch(&["tangle", &example("trefoil.json"), "--prefix", "k1"], None);
    assert_eq!(stdout(&t), std::fs::read_to_string(example("trefoil-k1.json")).unwrap());
}

#[test]
fn sum_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sum.json");
    let sum = legch(
        &["sum", &example("trefoil-k1.json"), &example("torus7-k2.json"), "--emit", out.to_str().unwrap()],
        None,
    );
    assert!(sum.status.success(), "{}", String::from_utf8_lossy(&sum.stderr));
    let check = legch(&["check", out.to_str().unwrap()], None);
    assert_eq!(check.status.code(), Some(0));
    assert!(stdout(&check).starts_with("valid"));
    let classify = legch(&["classify", out.to_str().unwrap()], None);
    assert!(stdout(&classify).contains(&format!("ℓ(∂a) = {}", 5 * 177 - 1)));

    let clash = legch(&["sum", &example("trefoil-k1.json"), &example("trefoil-k1.json")], None);
    assert_eq!(clash.status.code(), Some(1), "same prefix twice must be rejected");

    let other = dir.path().join("k2.json");
    let t = legch(&["tangle", &example("trefoil.json"), "--prefix", "k2", "--emit", other.to_str().unwrap()], None);
    assert!(t.status.success());
    let inlined = legch(&["sum", &example("trefoil-k1.json"), other.to_str().unwrap(), "--inline"], None);
    assert!(inlined.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&inlined.stdout).unwrap();
    assert!(doc.get("abbreviations").is_none());
    let da = doc["differential"]["a"].as_str().unwrap();
    assert_eq!(da.split(" + ").count(), 24);
}

#[test]
fn word_of_a_tangle() {
    let o = legch(&["word", &example("torus7-k2.json")], None);
    assert!(o.status.success());
    assert!(stdout(&o).ends_with("ℓ(W) = 177\n"));
}

#[test]
fn script_example() {
    let o = legch(&["script", "run", &example("script.json")], None);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["schema"], "monodromy.v1");
    assert_eq!(doc["map"]["v"], "v + u u");
    assert_eq!(doc["degree_preserving"], true);
}

#[test]
fn verdict_for_the_trefoil_fly() {
    let o = legch(&["verdict", "--fly", "3", "--power", "1"], None);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let row = &doc["rows"][0];
    assert_eq!(row["tau_value"], 1);
    assert_eq!(row["conclusion"], "nontrivial");
    assert!(String::from_utf8_lossy(&o.stderr).contains("conclusion nontrivial"));
}

#[test]
fn exit_codes() {
    let bad_json = legch(&["classify", "-"], Some(b"{not json"));
    assert_eq!(bad_json.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_json.stderr).contains("docs/schemas.md"));

    let missing = legch(&["classify", "/nonexistent/file.json"], None);
    assert_eq!(missing.status.code(), Some(2));

    let no_flag = legch(&["build", "torus"], None);
    assert_eq!(no_flag.status.code(), Some(2));

    let even = legch(&["build", "torus", "--n", "4"], None);
    assert_eq!(even.status.code(), Some(1));

    let bad_summand = legch(&["verdict", "--fly", "5"], None);
    assert_eq!(bad_summand.status.code(), Some(1));

    let broken = r#"{"generators":[{"name":"a","degree":1}],"differential":{"a":"a"},"rotation_zero":true}"#;
    let check = legch(&["check", "-"], Some(broken.as_bytes()));
    assert_eq!(check.status.code(), Some(1));
    assert!(stdout(&check).contains("violation"));
}

#[test]
fn verify_checks() {
    let o = legch(&["verify", "fibonacci", "--max-n", "20"], None);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS fibonacci"));
    let o = legch(&["verify", "properties", "--cases", "50"], None);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn manifest_records_digests() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("run.json");
    let out = dir.path().join("t.json");
    let o = legch(
        &[
            "--manifest",
            manifest.to_str().unwrap(),
            "tangle",
            &example("trefoil.json"),
            "--emit",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    let input = std::fs::read(example("trefoil.json")).unwrap();
    let output = std::fs::read(&out).unwrap();
    assert_eq!(doc["inputs"][0]["sha256"], hex::encode(sha2::Sha256::digest(&input)));
    assert_eq!(doc["outputs"][0]["sha256"], hex::encode(sha2::Sha256::digest(&output)));
    assert_eq!(doc["tool_version"], env!("CARGO_PKG_VERSION"));
    assert!(doc["command"].as_array().unwrap().len() >= 4);
}
