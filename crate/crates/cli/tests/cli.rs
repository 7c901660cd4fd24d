use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn agtool(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_agtool"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("agtool runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn guards_in_generic_and_low_signatures() {
    let dir = tempfile::tempdir().unwrap();
    let out = agtool(&["guards", "--p", "3", "--q", "3"], dir.path());
    assert!(out.status.success());
    let v = json(&out);
    let got: Vec<i64> = ["sym_latin", "alt_latin", "sym_greek", "alt_greek", "mixed"]
        .iter()
        .map(|k| v[k].as_i64().unwrap())
        .collect();
    assert_eq!(got, [20, 16, 20, 16, 32]);

    let v = json(&agtool(&["guards", "--p", "2", "--q", "2"], dir.path()));
    let got: Vec<i64> = ["sym_latin", "alt_latin", "sym_greek", "alt_greek", "mixed"]
        .iter()
        .map(|k| v[k].as_i64().unwrap())
        .collect();
    assert_eq!(got, [4, 0, 4, 0, 12]);

    let out = agtool(&["guards", "--p", "2", "--q", "5", "--pretty"], dir.path());
    assert!(String::from_utf8_lossy(&out.stdout).contains("b¹ route non-unique"));
    assert!(stderr(&out).contains("alt_greek"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["generate", "web", "--p", "3"],
        vec!["generate", "web", "--p", "3", "--q", "2"],
        vec!["guards", "--p", "1", "--q", "3"],
        vec!["guards"],
        vec!["generate", "flat", "--p", "2", "--q", "2", "--nodes", "4"],
        vec!["generate", "flat", "--p", "2", "--q", "2", "--binary"],
        vec!["analyze", "missing.json"],
        vec!["verify", "everything"],
        vec!["guards", "--p", "3", "--q", "3", "--tol-pipeline", "-1"],
    ] {
        let out = agtool(&args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", stderr(&out));
    }
    std::fs::write(dir.path().join("junk.json"), "{not json").unwrap();
    assert_eq!(agtool(&["analyze", "junk.json"], dir.path()).status.code(), Some(2));
}

#[test]
fn random_coefficients_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let out = agtool(&["generate", "random-u", "--p", "2", "--q", "2", "--seed", "7", "--out", name], dir.path());
        assert!(out.status.success());
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.json")).unwrap());
    let other = agtool(&["generate", "random-u", "--p", "2", "--q", "2", "--seed", "8"], dir.path());
    assert_ne!(other.stdout, a);

    let r1 = agtool(&["analyze", "a.json"], dir.path());
    let r2 = agtool(&["analyze", "a.json"], dir.path());
    assert!(r1.status.success());
    assert_eq!(r1.stdout, r2.stdout);
    let v = json(&r1);
    assert_eq!(v["input"], "raw_coefficients");
    assert!(v["torsion_norms"]["a"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["provenance"]["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn constraint_violations_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = agtool(&["generate", "random-u", "--p", "3", "--q", "3", "--seed", "1"], dir.path());
    let mut v = json(&out);
    let c = v["components"][5].as_f64().unwrap();
    v["components"][5] = (c + 1.0).into();
    std::fs::write(dir.path().join("bad.json"), v.to_string()).unwrap();
    let out = agtool(&["analyze", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("antisymmetry"));
}

#[test]
fn flat_field_is_reported_flat() {
    let dir = tempfile::tempdir().unwrap();
    let out = agtool(&["generate", "flat", "--p", "3", "--q", "3", "--nodes", "9", "--out", "flat.json"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let out = agtool(&["analyze", "flat.json", "--pretty"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["verdict"]["flat"], true);
    assert_eq!(v["depth"], "full_jet");
    assert_eq!(v["provenance"]["tolerances"]["pipeline"], 1e-10);
    assert!(stderr(&out).contains("flat"));
}

#[test]
fn web_field_from_binary_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = agtool(
        &["generate", "web", "--p", "2", "--q", "3", "--radius", "1", "--binary", "--out", "web.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(dir.path().join("web.bin").exists());
    let out = agtool(&["analyze", "web.json"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json(&out);
    assert!(v["torsion_norms"]["a_alpha"].as_f64().unwrap() < 1e-10);
    assert!(v["torsion_norms"]["a_beta"].as_f64().unwrap() > 1e-3);
    assert_eq!(v["verdict"]["flat"], false);
    assert_eq!(v["provenance"]["inputs"].as_array().unwrap().len(), 2);
}

#[test]
fn low_signature_reports_non_unique_b() {
    let dir = tempfile::tempdir().unwrap();
    let out = agtool(
        &["generate", "perturbed", "--p", "3", "--q", "2", "--radius", "2", "--nodes", "7", "--out", "f.json"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json(&agtool(&["analyze", "f.json"], dir.path()));
    let notes: Vec<&str> = v["notes"]
        .as_array()
        .unwrap()
        .iter()
        .chain(v["verdict"]["notes"].as_array().unwrap())
        .map(|n| n.as_str().unwrap())
        .collect();
    assert!(notes.iter().any(|n| n.contains("b² route non-unique")), "{notes:?}");
    assert!(notes.iter().any(|n| n.contains("kernel dimension")), "{notes:?}");
}

#[test]
fn verify_reports_pass_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = agtool(&["verify", "core", "--reps", "5", "--seed", "3"], dir.path());
    let b = agtool(&["verify", "core", "--reps", "5", "--seed", "3"], dir.path());
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["passed"], true);
    assert!(stderr(&a).contains("all properties passed"));
}

#[test]
fn verify_fails_with_impossible_tolerances() {
    let dir = tempfile::tempdir().unwrap();
    let out = agtool(&["verify", "core", "--reps", "2", "--tol-constraint", "1e-300"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], false);
}
