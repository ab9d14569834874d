use std::path::Path;
use std::process::{Command, Output};

fn goe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_goe"))
        .args(args)
        .env_remove("GOE_THREADS")
        .output()
        .expect("spawn goe")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn muller_demo() {
    let o = goe(&["muller", "--demo"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("[[x, y + z],[0, 0]]"), "{text}");
    assert!(text.contains("goe witness on {1}"), "{text}");
}

#[test]
fn exit_codes() {
    assert_eq!(goe(&[]).status.code(), Some(2));
    assert_eq!(goe(&["--help"]).status.code(), Some(0));
    assert_eq!(goe(&["lemma1", "--n", "0"]).status.code(), Some(2));
    assert_eq!(goe(&["analyze", "goe", "--ca", "/nonexistent/ca.json"]).status.code(), Some(2));
    assert_eq!(goe(&["ore", "witness", "--radius", "1"]).status.code(), Some(0));
    assert_eq!(goe(&["ore", "witness", "--radius", "3"]).status.code(), Some(1));
}

#[test]
fn lemma1_verify() {
    let o = goe(&["lemma1", "--n", "4", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sizeY=50"));
}

#[test]
fn make_ca_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let id = dir.path().join("identity.json");
    let muller = dir.path().join("muller.json");
    assert_eq!(goe(&["make-ca", "--preset", "identity", "--group", "z2", "--p", "3", "--out", p(&id)]).status.code(), Some(0));
    assert_eq!(goe(&["make-ca", "--preset", "muller", "--out", p(&muller)]).status.code(), Some(0));

    // Identity: no mutually erasable pair, no GOE.
    assert_eq!(goe(&["analyze", "mep", "--ca", p(&id), "--radius", "1"]).status.code(), Some(1));
    assert_eq!(goe(&["analyze", "goe", "--ca", p(&id)]).status.code(), Some(1));

    let wit = dir.path().join("goe.json");
    assert_eq!(goe(&["analyze", "goe", "--ca", p(&muller), "--out", p(&wit)]).status.code(), Some(0));
    let text = std::fs::read_to_string(&wit).unwrap();
    assert!(text.contains("\"artifact\":\"goe_witness\""), "{text}");

    // Window matrix cap.
    assert_eq!(goe(&["analyze", "goe", "--ca", p(&muller), "--window-radius", "2", "--cap", "4"]).status.code(), Some(3));
}

#[test]
fn corrupted_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let ca = dir.path().join("ca.json");
    assert_eq!(goe(&["make-ca", "--preset", "shift", "--p", "5", "--out", p(&ca)]).status.code(), Some(0));
    let text = std::fs::read_to_string(&ca).unwrap();
    std::fs::write(&ca, text.replacen("\"p\":5", "\"p\":7", 1)).unwrap();
    let o = goe(&["analyze", "goe", "--ca", p(&ca)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("digest"));
}

#[test]
fn manifest_replay() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("l4.json");
    let manifest = dir.path().join("run.json");
    let o = goe(&["--manifest", p(&manifest), "lemma1", "--n", "4", "--c", "3", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let m = std::fs::read_to_string(&manifest).unwrap();
    assert!(m.contains("\"artifact\":\"run_manifest\""), "{m}");
    let r = goe(&["replay", p(&manifest)]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(stdout(&r).contains("reproduced"));

    // A changed output no longer reproduces.
    std::fs::write(&out, "{}").unwrap();
    let before = std::fs::read(&out).unwrap();
    let r = goe(&["replay", p(&manifest)]);
    assert_eq!(r.status.code(), Some(0));
    assert_ne!(std::fs::read(&out).unwrap(), before);
}

#[test]
fn synth_small_custom() {
    let dir = tempfile::tempdir().unwrap();
    let ca = dir.path().join("ca.json");
    let cert = dir.path().join("cert.json");
    let o = goe(&[
        "--threads", "1", "synth", "--group", "w3", "--c", "2", "--seed", "1", "--out", p(&ca), "--cert", p(&cert),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::read_to_string(&cert).unwrap().contains("\"artifact\":\"inj_certificate\""));
    assert_eq!(goe(&["analyze", "goe", "--ca", p(&ca)]).status.code(), Some(0));
}

#[test]
fn ore_solve_prints_solution() {
    let o = goe(&["ore", "solve", "--group", "z", "--p", "2", "--a", "1 + u", "--s", "u^-1 + u"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}
