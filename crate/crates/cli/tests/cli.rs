use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Out {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

fn grzlab(args: &[&str]) -> Out {
    let o = Command::new(env!("CARGO_BIN_EXE_grzlab")).args(args).output().unwrap();
    Out {
        code: o.status.code().unwrap(),
        stdout: String::from_utf8(o.stdout).unwrap(),
        stderr: String::from_utf8(o.stderr).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const THREE_CHAIN: &str = r#"{"kind":"heyting","size":3,
    "meet":[[0,0,0],[0,1,1],[0,1,2]],"join":[[0,1,2],[1,1,2],[2,2,2]],
    "imp":[[2,2,2],[0,2,2],[0,1,2]],"bot":0,"top":2}"#;
const TWO_CHAIN: &str = r#"{"kind":"heyting","size":2,"meet":[[0,0],[0,1]],
    "join":[[0,1],[1,1]],"imp":[[1,1],[0,1]],"bot":0,"top":1}"#;
// complex algebra of the 3-chain 0 < 1 < 2: opens are the downsets
const CHAIN_MODAL: &str = r#"{"kind":"modal","atoms":3,"box":[0,1,0,3,0,1,0,7]}"#;

#[test]
fn grz_check_on_standard_algebras() {
    for s in ["S2", "S12"] {
        let o = grzlab(&["grz-check", "--std", s]);
        assert_eq!(o.code, 1, "{s}");
        let v = o.json();
        assert_eq!(v["grz"], false);
        assert!(v["witness"].is_u64());
    }
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", CHAIN_MODAL);
    let o = grzlab(&["grz-check", "--input", m.to_str().unwrap()]);
    assert_eq!(o.code, 0);
    assert_eq!(o.json()["grz"], true);
}

#[test]
fn translate_modus_ponens() {
    let o = grzlab(&["translate", "p, p->q / q"]);
    assert_eq!(o.code, 0);
    assert_eq!(o.json()["sentence"], "p = top, p -> q = top => q = top");
    assert_eq!(o.json()["rule"], "p, p -> q / q");
}

#[test]
fn verify_all_small() {
    let o = grzlab(&["verify-all", "--max-atoms", "3"]);
    assert_eq!(o.code, 0, "{}", o.stdout);
    assert_eq!(o.stdout.lines().filter(|l| l.starts_with("PASS")).count(), 10);
}

#[test]
fn usage_errors_exit_2() {
    let o = grzlab(&["no-such-verb"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.contains("Usage"));
    assert_eq!(grzlab(&["grz-check"]).code, 2);
    assert_eq!(grzlab(&["grz-check", "--std", "S3"]).code, 2);
    assert_eq!(grzlab(&["translate", "p & / q"]).code, 2);
    assert_eq!(grzlab(&["--help"]).code, 0);
}

#[test]
fn caps_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.json", CHAIN_MODAL);
    let o = grzlab(&["grz-check", "--input", m.to_str().unwrap(), "--max-atoms", "2"]);
    assert_eq!(o.code, 3, "{}", o.stderr);
    let k = write(dir.path(), "k.json", THREE_CHAIN);
    let o = grzlab(&["free", "--catalog", k.to_str().unwrap(), "--k", "3", "--max-size", "50"]);
    assert_eq!(o.code, 3, "{}", o.stderr);
}

#[test]
fn functors_and_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.json", THREE_CHAIN);
    let m = write(dir.path(), "m.json", CHAIN_MODAL);
    let h = h.to_str().unwrap();
    let m = m.to_str().unwrap();

    let b = grzlab(&["build-B", "--input", h]).json();
    assert_eq!(b["algebra"]["atoms"], 2);
    assert_eq!(b["embedding"]["map"], serde_json::json!([0, 1, 3]));

    let o = grzlab(&["build-O", "--std", "S12"]).json();
    assert_eq!(o["opens"], serde_json::json!([0, 4, 7]));
    assert_eq!(o["algebra"]["kind"], "heyting");

    let w = grzlab(&["stable-witness", "--std", "S2"]);
    assert_eq!(w.code, 0);
    assert_eq!(w.json()["h"]["map"], serde_json::json!([0, 1, 2, 3]));
    assert_eq!(grzlab(&["stable-witness", "--input", m]).code, 1);

    let f = grzlab(&["finite-blok", "--input", m]);
    assert_eq!(f.code, 0);
    assert_eq!(f.json()["open_chain"], serde_json::json!([0, 1, 3, 7]));
    assert_eq!(grzlab(&["finite-blok", "--std", "S2"]).code, 1);

    let c = grzlab(&["blok-char", "--std", "S12"]);
    assert_eq!(c.code, 1);
    assert_eq!(c.json()["witness"]["target"], "S12");
    assert_eq!(c.json()["witness"]["verified"], true);

    let x = grzlab(&["box-extend", "--input", m, "--g", "2"]);
    assert_eq!(x.code, 0);
    assert_eq!(x.json()["trace"]["p"], 2);
    assert_eq!(x.json()["trace_checked"], true);
    let r = grzlab(&["box-extend", "--input", m]);
    assert_eq!(r.code, 0);
}

#[test]
fn evaluation_verbs() {
    let dir = tempfile::tempdir().unwrap();
    let h = write(dir.path(), "h.json", THREE_CHAIN);
    let h = h.to_str().unwrap();
    let e = grzlab(&["eval", "p | ~p", "--input", h]);
    assert_eq!(e.code, 1);
    assert_eq!(e.json()["counterexample"], serde_json::json!([1]));
    assert_eq!(grzlab(&["eval", "p, p -> q / q", "--input", h]).code, 0);
    assert_eq!(grzlab(&["eval", "box p -> p", "--input", h]).code, 2);
    assert_eq!(grzlab(&["eval", "box (box (p -> box p) -> p) -> p", "--std", "S2"]).code, 1);

    let cat = grzlab(&["enumerate", "heyting", "--max-size", "4"]);
    assert_eq!(cat.code, 0);
    let k = write(dir.path(), "k.json", &cat.stdout);
    let o = grzlab(&["catalog-eval", "p | ~p", "--catalog", k.to_str().unwrap()]);
    assert_eq!(o.code, 1);
    assert_eq!(o.json()["evaluation"]["failing_member"], 2);
}

#[test]
fn free_algebra_verbs() {
    let dir = tempfile::tempdir().unwrap();
    let k = write(dir.path(), "two.json", TWO_CHAIN);
    let k = k.to_str().unwrap();
    let f = grzlab(&["free", "--catalog", k, "--k", "1"]);
    assert_eq!(f.code, 0);
    assert_eq!(f.json()["size"], 4);
    assert_eq!(f.json()["ump_verified"], true);

    let a = grzlab(&["admissible", "p | q / p, q", "--catalog", k]);
    assert_eq!(a.code, 0);
    assert_eq!(grzlab(&["admissible", "/ bot", "--catalog", k]).code, 1);

    assert_eq!(grzlab(&["sigma-free", "--catalog", k, "--k", "1"]).code, 0);
    let r = grzlab(&["completeness-report", "--catalog", k, "--json"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.json()["violations"], serde_json::json!([]));

    let m = write(dir.path(), "m.json", CHAIN_MODAL);
    let b = grzlab(&["be-check", "--input", m.to_str().unwrap(), "--catalog", k]);
    assert_eq!(b.code, 0);
    assert_eq!(b.json()["member"], false);
}

#[test]
fn enumerate_matches_golden_and_is_deterministic() {
    let o = grzlab(&["enumerate", "posets", "--k", "3"]);
    assert_eq!(o.stdout, include_str!("../../core/golden/posets_n3.json"));
    let t = grzlab(&["enumerate", "interior", "--k", "3", "--threads", "2"]);
    assert_eq!(t.stdout, include_str!("../../core/golden/topologies_k3.json"));
    let a = grzlab(&["grz-check", "--std", "S12", "--json"]);
    let b = grzlab(&["grz-check", "--std", "S12", "--json"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout.lines().count(), 1);
    assert_eq!(grzlab(&["enumerate", "posets", "--k", "8"]).code, 3);
}
