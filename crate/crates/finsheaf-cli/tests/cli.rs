//! End-to-end runs of the `finsheaf` binary: spawn it against fixture files
//! and pin exit codes, witness shapes, and output determinism.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use tempfile::TempDir;

fn write(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).expect("fixture written");
    path
}

/// Run the binary; return (exit code, stdout, stderr).
fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_finsheaf"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("no signal"),
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        String::from_utf8(out.stderr).expect("utf8 stderr"),
    )
}

fn fixtures() -> (TempDir, Fixture) {
    let dir = tempfile::tempdir().expect("tempdir");
    let f = Fixture {
        rp2: write(
            dir.path(),
            "rp2.txt",
            "# six-vertex projective plane\n\
             1 2 3\n1 2 4\n1 3 5\n1 4 6\n1 5 6\n\
             2 3 6\n2 4 5\n2 5 6\n3 4 5\n3 4 6\n",
        ),
        a2: write(
            dir.path(),
            "a2.json",
            r#"{"elements": ["∅", "1", "2", "12"],
                "covers": [["∅", "1"], ["∅", "2"], ["1", "12"], ["2", "12"]]}"#,
        ),
        point: write(dir.path(), "point.json", r#"{"elements": ["p"], "covers": []}"#),
        chain3: write(
            dir.path(),
            "chain3.json",
            r#"{"elements": ["a", "b", "c"], "covers": [["a", "b"], ["b", "c"]]}"#,
        ),
        vee: write(dir.path(), "vee.txt", "a < o\nb < o\n"),
        sheaf_a2: write(
            dir.path(),
            "sheaf_a2.json",
            r#"{"poset": "a2.json",
                "stalk_ranks": {"∅": 1, "1": 1, "2": 1, "12": 1},
                "cover_maps": {"∅->1": [[1]], "∅->2": [[1]],
                               "1->12": [[1]], "2->12": [[1]]}}"#,
        ),
    };
    (dir, f)
}

struct Fixture {
    rp2: PathBuf,
    a2: PathBuf,
    point: PathBuf,
    chain3: PathBuf,
    vee: PathBuf,
    sheaf_a2: PathBuf,
}

fn parse(stdout: &str) -> Value {
    serde_json::from_str(stdout).expect("json output")
}

#[test]
fn the_projective_plane_fails_cm_with_its_torsion_witness() {
    let (_dir, f) = fixtures();
    let (code, out, _) = run(&["cm", "--facets", f.rp2.to_str().unwrap(), "--json"]);
    assert_eq!(code, 1);
    let v = parse(&out);
    assert_eq!(v["cm"], json!(false));
    assert_eq!(
        v["witness"],
        json!({"point": "∅", "degree": 1, "group": {"rank": 0, "torsion": [2]}}),
    );
}

#[test]
fn ext_between_the_corner_and_the_generic_point_of_the_plane() {
    let (_dir, f) = fixtures();
    let (code, out, _) = run(&[
        "ext", "--poset", f.a2.to_str().unwrap(), "--from", "∅", "--to", "12", "--json",
    ]);
    assert_eq!(code, 0);
    assert_eq!(parse(&out), json!({"2": {"rank": 1, "torsion": []}}));
}

#[test]
fn info_reports_the_point_as_local_and_irreducible() {
    let (_dir, f) = fixtures();
    let (code, out, _) = run(&["info", "--poset", f.point.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("dim 0"), "got: {out}");
    assert!(out.contains("local"), "got: {out}");
    assert!(out.contains("irreducible"), "got: {out}");
}

#[test]
fn check_subcommands_exit_zero_on_success_and_one_on_failure() {
    let (_dir, f) = fixtures();
    let a2 = f.a2.to_str().unwrap();
    let chain3 = f.chain3.to_str().unwrap();

    assert_eq!(run(&["dualizable", "--poset", a2]).0, 0);
    assert_eq!(run(&["dualizable", "--poset", chain3]).0, 1);
    assert_eq!(run(&["cm", "--poset", a2]).0, 0);
    assert_eq!(run(&["canonical", "--poset", chain3]).0, 1);
    assert_eq!(run(&["reisner", "--facets", f.rp2.to_str().unwrap()]).0, 1);
}

#[test]
fn malformed_input_exits_two_with_a_diagnostic() {
    let (dir, f) = fixtures();
    let a2 = f.a2.to_str().unwrap();

    let (code, _, err) = run(&["ext", "--poset", a2, "--from", "zz", "--to", "12"]);
    assert_eq!(code, 2);
    assert!(err.contains("zz"), "got: {err}");

    let dup = write(dir.path(), "dup.json", r#"{"elements": ["a", "a"], "covers": []}"#);
    assert_eq!(run(&["info", "--poset", dup.to_str().unwrap()]).0, 2);

    // two sources, no source, missing flag, wrong kind of input
    assert_eq!(run(&["info", "--poset", a2, "--facets", a2]).0, 2);
    assert_eq!(run(&["info"]).0, 2);
    assert_eq!(run(&["local-cohomology", "--poset", a2]).0, 2);
    assert_eq!(run(&["cm-sheaf", "--poset", a2]).0, 2);
}

#[test]
fn json_reports_are_byte_for_byte_deterministic() {
    let (_dir, f) = fixtures();
    let args = ["cm", "--facets", f.rp2.to_str().unwrap(), "--json"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first, second);
    assert!(!first.1.is_empty());
}

#[test]
fn sheaf_files_drive_the_duality_subcommands() {
    let (_dir, f) = fixtures();
    let sheaf = f.sheaf_a2.to_str().unwrap();

    let (code, out, _) = run(&["cm-sheaf", "--sheaf", sheaf, "--json"]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert_eq!(v["cm"], json!(true));
    assert_eq!(v["r"], json!(2));

    assert_eq!(run(&["reflexive", "--sheaf", sheaf]).0, 0);

    let (code, out, _) = run(&["dualize", "--sheaf", sheaf, "--json"]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert_eq!(v["stalk_cohomology"]["12"], json!({"-2": {"rank": 1, "torsion": []}}));
    assert_eq!(v["stalk_cohomology"]["∅"], json!({}));
}

#[test]
fn local_cohomology_accepts_sets_anchors_and_points() {
    let (_dir, f) = fixtures();
    let vee = f.vee.to_str().unwrap();

    let (code, out, _) = run(&["local-cohomology", "--poset", vee, "--point", "o", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(parse(&out), json!({"0": {"rank": 1, "torsion": []}}));

    let (code, out, _) = run(&["local-cohomology", "--poset", vee, "--anchor", "a", "--json"]);
    assert_eq!(code, 0);
    assert_eq!(parse(&out), json!({}));

    let by_set = run(&["local-cohomology", "--poset", vee, "--closed-set", "a", "--json"]);
    assert_eq!(by_set.0, 0);
    assert_eq!(parse(&by_set.1), json!({}));
}

#[test]
fn transforms_emit_posets_that_feed_back_in() {
    let (dir, f) = fixtures();
    let chain3 = f.chain3.to_str().unwrap();

    // opposite twice is the identity on the relation set
    let (code, once, _) = run(&["opposite", "--poset", chain3, "--json"]);
    assert_eq!(code, 0);
    let flipped = write(dir.path(), "flipped.json", &once);
    let (_, twice, _) = run(&["opposite", "--poset", flipped.to_str().unwrap(), "--json"]);
    let original: Value =
        serde_json::from_str(&std::fs::read_to_string(&f.chain3).unwrap()).unwrap();
    assert_eq!(parse(&twice)["covers"], original["covers"]);

    // subdividing the V space yields the barycentric face labels
    let (code, out, _) = run(&["subdivide", "--poset", f.vee.to_str().unwrap(), "--json"]);
    assert_eq!(code, 0);
    let elements = parse(&out)["elements"].as_array().unwrap().len();
    assert_eq!(elements, 5); // a, b, o, a<o, b<o

    // the order complex of the V space is its pair of segments
    let (code, out, _) = run(&["order-complex", "--poset", f.vee.to_str().unwrap()]);
    assert_eq!(code, 0);
    let mut lines: Vec<&str> = out.lines().collect();
    lines.sort_unstable();
    assert_eq!(lines, vec!["a o", "o b"]);

    // product with a point relabels but keeps the cover count
    let (code, out, _) = run(&[
        "product", "--poset", chain3, "--against", f.point.to_str().unwrap(), "--json",
    ]);
    assert_eq!(code, 0);
    assert_eq!(parse(&out)["covers"].as_array().unwrap().len(), 2);
}
