use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freqcube")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn classify_validate_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cat = dir.path().join("d3.cat");
    let o = run(&["classify", "--n", "3", "--kind", "dmds", "--out", p(&cat)]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("total: 51678"));

    let o = run(&["validate", "--n", "3", "--catalog", p(&cat)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sum M_i R_i: 51678"));

    let o = run(&["tables", "--catalogs", p(&cat)]);
    assert!(stdout(&o).contains("total:           10     10      9      6"), "{}", stdout(&o));

    let o = run(&["split-census", "--catalog", p(&cat)]);
    assert!(stdout(&o).contains("non-splittable with splittable layers: 4"));

    // A wrong total in the header fails validation.
    let text = std::fs::read_to_string(&cat).unwrap().replace("total=51678", "total=51679");
    let bad = dir.path().join("bad.cat");
    std::fs::write(&bad, text).unwrap();
    let o = run(&["validate", "--n", "3", "--catalog", p(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["validate", "--n", "3", "--catalog", "/nonexistent/catalog"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sharded_classify_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("u2.cat");
    let o = run(&["classify", "--n", "2", "--kind", "unitrade", "--shards", "3", "--out", p(&out)]);
    assert!(o.status.success());
    assert!(dir.path().join("u2.cat.journal").exists());
    let first = std::fs::read_to_string(&out).unwrap();
    let o = run(&["classify", "--n", "2", "--kind", "unitrade", "--shards", "3", "--resume", "--out", p(&out)]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&out).unwrap(), first);
}

#[test]
fn construct_bound_and_check() {
    let o = run(&["construct", "--nonsplittable", "--n", "5"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("cycle (11)"));

    let o = run(&["bound", "--n", "3"]);
    assert!(stdout(&o).contains("testing set size = 25"));

    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("set.hex");
    std::fs::write(&f, "# a code\n33cc35acca53cc33\n").unwrap();
    let o = run(&["check", "--file", p(&f)]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("double-MDS: true"));
    assert!(s.contains("is canonical"));
    assert!(s.contains("|Aut| = 6·4 (24)"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["bound", "--n", "2"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--n", "3", "--kind", "nope", "--out", "x"]).status.code(), Some(2));
    assert_eq!(run(&["classify", "--n", "4", "--kind", "unitrade", "--out", "x"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}
