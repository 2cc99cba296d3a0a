//! End-to-end tests of the command-line interface through the real binary.

use std::path::Path;
use std::process::{Command, Output};

const BUNDLE: &str = r#"
quiver Q
vertex 1 2
arrow a : 1 -> 2

quiver Qp
vertex 1 2 3 4
arrow b1 : 1 -> 3
arrow b2 : 2 -> 3
arrow b3 : 4 -> 3

representation V over Q field Q
space 1 dim 1
space 2 dim 1
map a = [[1]]

representation M over Qp field Q
space 1 dim 1
space 2 dim 1
space 3 dim 2
space 4 dim 1
map b1 = [[1], [0]]
map b2 = [[0], [1]]
map b3 = [[1], [1]]

nrep Mbar over (Q, Qp) field Q
component 1 = V
component 2 = M
link 2 a b1 = [[1]]
link 2 a b2 = [[1]]
link 2 a b3 = [[1]]

nrep Nbar over (Q, Qp) field Q
component 1 = V
component 2 = M
link 2 a b1 = [[1]]

morphism idm : Mbar -> Mbar
level 1 at 1 = [[1]]
level 1 at 2 = [[1]]
level 2 at 1 = [[1]]
level 2 at 2 = [[1]]
level 2 at 3 = [[1, 0], [0, 1]]
level 2 at 4 = [[1]]
"#;

fn qrep(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrep"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_bundle(dir: &Path) {
    std::fs::write(dir.join("bundle.qrep"), BUNDLE).unwrap();
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn validate_ok_bundle() {
    let dir = tempfile::tempdir().unwrap();
    write_bundle(dir.path());
    let out = qrep(dir.path(), &["validate", "-i", "bundle.qrep"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("2 nrep(s)"));
}

#[test]
fn json_envelope_fields() {
    let dir = tempfile::tempdir().unwrap();
    write_bundle(dir.path());
    let out = qrep(dir.path(), &["pathalg", "Q", "-i", "bundle.qrep", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "pathalg");
    assert_eq!(v["status"], "ok");
    assert_eq!(v["payload"]["dim"], 3);
    assert!(v["diagnostics"].as_array().unwrap().is_empty());
}

#[test]
fn syntax_error_exits_2_with_located_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.qrep"), "quiver Q\narrow a 1 -> 2\n").unwrap();
    let out = qrep(dir.path(), &["validate", "-i", "bad.qrep", "--json"]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["status"], "error");
    let d = &v["diagnostics"][0];
    assert_eq!(d["file"], "bad.qrep");
    assert_eq!(d["line"], 2);
}

#[test]
fn domain_error_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = format!(
        "{BUNDLE}\nmorphism bad : Mbar -> Nbar\n\
         level 1 at 1 = [[1]]\nlevel 1 at 2 = [[1]]\n\
         level 2 at 1 = [[1]]\nlevel 2 at 2 = [[1]]\n\
         level 2 at 3 = [[1, 0], [0, 1]]\nlevel 2 at 4 = [[1]]\n"
    );
    std::fs::write(dir.path().join("bad.qrep"), bad).unwrap();
    let out = qrep(dir.path(), &["validate", "-i", "bad.qrep", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["diagnostics"][0]["kind"], "domain");
}

#[test]
fn usage_error_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = qrep(dir.path(), &["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    write_bundle(dir.path());
    let out = qrep(
        dir.path(),
        &["glue", "Mbar", "-i", "bundle.qrep", "--out", "glued.qrep"],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    let written = std::fs::read_to_string(dir.path().join("glued.qrep")).unwrap();
    assert!(written.contains("quiver NQ(Q,Qp)"));
    assert!(written.contains("representation Mbar.glued over NQ(Q,Qp) field Q"));
}

#[test]
fn glue_decompose_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    write_bundle(dir.path());
    let out = qrep(
        dir.path(),
        &["glue", "Mbar", "-i", "bundle.qrep", "--out", "glued.qrep"],
    );
    assert_eq!(out.status.code(), Some(0));
    let out = qrep(
        dir.path(),
        &[
            "decompose",
            "Mbar.glued",
            "--levels",
            "Q,Qp",
            "-i",
            "bundle.qrep",
            "-i",
            "glued.qrep",
            "--json",
        ],
    );
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["payload"]["nrep"]["total_dim"], 7);
    assert_eq!(
        v["payload"]["nrep"]["level_dims"][0],
        serde_json::json!([1, 1])
    );
    // The emitted text re-parses and round-trips byte-identically.
    let dsl = v["payload"]["dsl"].as_str().unwrap();
    std::fs::write(dir.path().join("split.qrep"), dsl).unwrap();
    let out2 = qrep(
        dir.path(),
        &["validate", "-i", "bundle.qrep", "-i", "split.qrep"],
    );
    assert_eq!(out2.status.code(), Some(0));
}

#[test]
fn block_structure_values() {
    let dir = tempfile::tempdir().unwrap();
    write_bundle(dir.path());
    let out = qrep(
        dir.path(),
        &["block-structure", "Q", "Qp", "-i", "bundle.qrep", "--json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["payload"]["prefix_dim"], 3);
    assert_eq!(v["payload"]["top_dim"], 7);
    assert_eq!(
        v["payload"]["total_dim"],
        v["payload"]["prefix_dim"].as_u64().unwrap()
            + v["payload"]["connecting_dim"].as_u64().unwrap()
            + v["payload"]["top_dim"].as_u64().unwrap()
    );
}

#[test]
fn dsum_links_match_block_diagonal() {
    let dir = tempfile::tempdir().unwrap();
    write_bundle(dir.path());
    let out = qrep(dir.path(), &["dsum", "Mbar", "Nbar", "-i", "bundle.qrep"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("link 2 a b1 = [[1, 0], [0, 1]]"));
    assert!(text.contains("link 2 a b2 = [[1, 0], [0, 0]]"));
    assert!(text.contains("link 2 a b3 = [[1, 0], [0, 0]]"));
}

#[test]
fn hom_space_and_check() {
    let dir = tempfile::tempdir().unwrap();
    write_bundle(dir.path());
    let out = qrep(
        dir.path(),
        &["hom-space", "Mbar", "Mbar", "-i", "bundle.qrep", "--json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["payload"]["dim"], 1);
    let out = qrep(
        dir.path(),
        &["hom-check", "idm", "-i", "bundle.qrep", "--json"],
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["payload"]["is_iso"], true);
}

#[test]
fn coalg_check_good_and_bad() {
    let dir = tempfile::tempdir().unwrap();
    let src = "\
quiver Q
vertex 1 2
arrow a : 1 -> 2

quiver R
vertex 1 2
arrow b : 1 -> 2

representation U1 over Q field Q
space 1 dim 1
space 2 dim 1
map a = [[1]]

representation U2 over R field Q
space 1 dim 1
space 2 dim 1
map b = [[1]]

nrep Ubar over (Q, R) field Q
component 1 = U1
component 2 = U2
link 2 a b = [[1]]

coalgebra C carrier Ubar
comult
level 1 at 1 = [[1]]
level 1 at 2 = [[1]]
level 2 at 1 = [[1]]
level 2 at 2 = [[1]]
counit
level 1 at 1 = [[1]]
level 1 at 2 = [[1]]
level 2 at 1 = [[1]]
level 2 at 2 = [[1]]

coalgebra Bad carrier Ubar
comult
level 1 at 1 = [[2]]
level 1 at 2 = [[2]]
level 2 at 1 = [[2]]
level 2 at 2 = [[2]]
counit
level 1 at 1 = [[1]]
level 1 at 2 = [[1]]
level 2 at 1 = [[1]]
level 2 at 2 = [[1]]
";
    std::fs::write(dir.path().join("c.qrep"), src).unwrap();
    let out = qrep(dir.path(), &["coalg-check", "C", "-i", "c.qrep"]);
    assert_eq!(out.status.code(), Some(0));
    let out = qrep(
        dir.path(),
        &["coalg-check", "Bad", "-i", "c.qrep", "--json"],
    );
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let msg = v["diagnostics"][0]["message"].as_str().unwrap();
    assert!(msg.contains("counit"), "unexpected message: {msg}");
}

#[test]
fn fitting_split_deterministic_for_seed() {
    let dir = tempfile::tempdir().unwrap();
    let src = "\
quiver Q
vertex 1 2
arrow a : 1 -> 2

representation S over Q field Q
space 1 dim 2
space 2 dim 2
map a = [[1, 0], [0, 0]]
";
    std::fs::write(dir.path().join("s.qrep"), src).unwrap();
    let args = [
        "fitting-split",
        "S",
        "-i",
        "s.qrep",
        "--seed",
        "5",
        "--json",
    ];
    let a = qrep(dir.path(), &args);
    let b = qrep(dir.path(), &args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["payload"]["outcome"], "split");
}

#[test]
fn outputs_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    write_bundle(dir.path());
    for args in [
        vec!["validate", "-i", "bundle.qrep", "--json"],
        vec!["pathalg", "Qp", "-i", "bundle.qrep", "--json"],
        vec!["nquiver-build", "Q", "Qp", "-i", "bundle.qrep", "--json"],
        vec!["glue", "Mbar", "-i", "bundle.qrep", "--json"],
        vec!["dsum", "Mbar", "Nbar", "-i", "bundle.qrep", "--json"],
        vec!["tensor", "Mbar", "Nbar", "-i", "bundle.qrep", "--json"],
        vec!["hom-space", "Mbar", "Nbar", "-i", "bundle.qrep", "--json"],
        vec!["kernel", "idm", "-i", "bundle.qrep", "--json"],
        vec!["cokernel", "idm", "-i", "bundle.qrep", "--json"],
        vec!["block-structure", "Q", "Qp", "-i", "bundle.qrep", "--json"],
    ] {
        let a = qrep(dir.path(), &args);
        let b = qrep(dir.path(), &args);
        assert_eq!(a.status.code(), Some(0), "failed: {args:?}");
        assert_eq!(a.stdout, b.stdout, "nondeterministic: {args:?}");
    }
}

#[test]
fn field_flag_checks_consistency() {
    let dir = tempfile::tempdir().unwrap();
    write_bundle(dir.path());
    let ok = qrep(
        dir.path(),
        &["validate", "-i", "bundle.qrep", "--field", "Q"],
    );
    assert_eq!(ok.status.code(), Some(0));
    let bad = qrep(
        dir.path(),
        &["validate", "-i", "bundle.qrep", "--field", "F7"],
    );
    assert_eq!(bad.status.code(), Some(1));
}
