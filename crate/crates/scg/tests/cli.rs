use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn grammar(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../grammars").join(name)
}

fn scg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scg")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Word lines of an enumerate listing, footers and the bounds line dropped.
fn listed_words(o: &Output) -> Vec<String> {
    stdout(o)
        .lines()
        .filter(|l| !l.contains(':'))
        .map(String::from)
        .collect()
}

fn transformed(dir: &TempDir, source: &str) -> PathBuf {
    let out = dir.path().join(format!("{source}.scg"));
    let o = scg(&["transform", path(&grammar(&format!("{source}.geffert"))), "-o", path(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    out
}

#[test]
fn metrics_reports() {
    let o = scg(&["metrics", path(&grammar("example1.scg"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("width: 3\n"));

    let dir = TempDir::new().unwrap();
    let t = transformed(&dir, "ab-pairs");
    let text = stdout(&scg(&["metrics", path(&t)]));
    assert!(text.contains("nonterminals: 3\n") && text.contains("width: 9\n"), "{text}");

    let bad = dir.path().join("bad.scg");
    std::fs::write(&bad, "scg\nnonterminals: S\nterminals: a\nstart: S\nprod (S) -> (a\n").unwrap();
    let o = scg(&["metrics", path(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 5"), "{}", stderr(&o));
}

#[test]
fn enumerate_listings() {
    let o = scg(&["enumerate", path(&grammar("example1.scg")), "--max-len", "9"]);
    assert_eq!(listed_words(&o), ["a b c", "a a b b c c", "a a a b b b c c c"]);
    let text = stdout(&o);
    assert!(text.starts_with("bounds: max-len 9 max-depth 36 max-forms 1000000\n"));
    assert!(text.contains("\nexhaustive: true\nvisited: "));

    let o = scg(&["enumerate", path(&grammar("lemma1-2-2.scg")), "--max-len", "20"]);
    let lengths: Vec<usize> = listed_words(&o).iter().map(|w| w.split(' ').count()).collect();
    assert_eq!(lengths, [2, 4, 16]);

    let dir = TempDir::new().unwrap();
    let t = transformed(&dir, "erase-only");
    assert_eq!(listed_words(&scg(&["enumerate", path(&t)])), ["@"]);
}

#[test]
fn transform_writes_grammar_and_sidecar() {
    let dir = TempDir::new().unwrap();
    for (source, productions) in [("erase-only", 6), ("ab-pairs", 8)] {
        let t = transformed(&dir, source);
        let text = std::fs::read_to_string(&t).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("prod ")).count(), productions);
        let g = scg::format::parse_grammar(&text).unwrap();
        assert_eq!(scg::format::render_grammar(&g), text);
        let sidecar = std::fs::read_to_string(format!("{}.provenance", t.display())).unwrap();
        let origins = scg::format::parse_provenance(&sidecar).unwrap();
        assert_eq!(origins.len(), productions);
    }
    let o = scg(&["transform", "no-such-file.geffert", "-o", path(&dir.path().join("x.scg"))]);
    assert_eq!(o.status.code(), Some(2));
    let o = scg(&["transform", path(&grammar("example1.scg")), "-o", path(&dir.path().join("x.scg"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn diff_verdicts() {
    let dir = TempDir::new().unwrap();
    let src = grammar("a-star.geffert");
    let t = transformed(&dir, "a-star");
    let o = scg(&["diff", path(&src), path(&t), "--word-len", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("equal\n"));
    assert!(stdout(&o).contains("exhaustive: "));

    let o = scg(&["diff", path(&grammar("example1.scg")), path(&grammar("lemma1-2-2.scg"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample: a b c\n"), "{}", stdout(&o));

    let e = path(&grammar("example1.scg")).to_string();
    assert_eq!(scg(&["diff", &e, &e]).status.code(), Some(0));
    assert_eq!(scg(&["diff", &e, "missing.scg"]).status.code(), Some(2));
}

#[test]
fn check_families() {
    let dir = TempDir::new().unwrap();
    let t = transformed(&dir, "a-star");
    let o = scg(&["check", path(&t), "--family", "three-nt", "--max-forms", "100000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("visited: 100000\nviolations: 0\n"), "{}", stdout(&o));

    let o = scg(&["check", path(&grammar("lemma1-2-2.scg")), "--family", "lemma1", "--max-len", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("violations: 0\n"));

    let o = scg(&["check", path(&grammar("mixed.geffert")), "--family", "geffert", "--max-forms", "20000"]);
    assert_eq!(o.status.code(), Some(0));

    let o = scg(&["check", path(&t), "--family", "cf"]);
    assert_eq!(o.status.code(), Some(2));
    let o = scg(&["check", path(&grammar("example1.scg")), "--family", "three-nt"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mutated_final_production_is_caught() {
    let dir = TempDir::new().unwrap();
    let t = transformed(&dir, "a-star");
    let text = std::fs::read_to_string(&t).unwrap();
    let mutated = text.replace("prod (S, S, S, A) -> (@, @, @, @)", "prod (S, S, S, A) -> (@, @, @, A)");
    assert_ne!(mutated, text);
    let bad = dir.path().join("bad.scg");
    std::fs::write(&bad, mutated).unwrap();
    let o = scg(&["check", path(&bad), "--family", "three-nt", "--max-len", "16"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    let witness = out.split_once("witness:\n").unwrap().1;
    assert!(witness.lines().last().unwrap().starts_with("step 6 @"), "{witness}");
    let trace = dir.path().join("witness.trace");
    std::fs::write(&trace, witness).unwrap();
    let o = scg(&["replay", path(&bad), path(&trace)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).lines().last().unwrap().contains('A'));
}

#[test]
fn member_and_replay() {
    let dir = TempDir::new().unwrap();
    let e = grammar("example1.scg");
    let o = scg(&["member", path(&e), "a", "a", "b", "b", "c", "c"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let trace = out.split_once("member\n").unwrap().1;
    let file = dir.path().join("t.trace");
    std::fs::write(&file, trace).unwrap();
    let o = scg(&["replay", path(&e), path(&file)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().last(), Some("a a b b c c"));

    let o = scg(&["member", path(&e), "a", "a", "b", "c"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).ends_with("not a member\n"));
    assert_eq!(scg(&["member", path(&e), "a", "x"]).status.code(), Some(2));

    std::fs::write(&file, "start: S\nstep 1 @ 1 2 3\n").unwrap();
    assert_eq!(scg(&["replay", path(&e), path(&file)]).status.code(), Some(1));
    std::fs::write(&file, "start: S\nstep one @ 1\n").unwrap();
    let o = scg(&["replay", path(&e), path(&file)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"));

    let g = grammar("ab-pairs.geffert");
    let o = scg(&["member", path(&g), "a", "a"]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::write(&file, stdout(&o).split_once("member\n").unwrap().1).unwrap();
    let o = scg(&["replay", path(&g), path(&file)]);
    assert_eq!(stdout(&o).lines().last(), Some("a a"));
}

#[test]
fn showcase_output() {
    let o = scg(&["showcase", "example1"]);
    assert_eq!(stdout(&o), std::fs::read_to_string(grammar("example1.scg")).unwrap().replace("# a^n b^n c^n, n >= 1\n", ""));
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("l.scg");
    let o = scg(&["showcase", "lemma1", "--k", "2", "--l", "2", "-o", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(grammar("lemma1-2-2.scg")).unwrap());
    assert_eq!(scg(&["showcase", "lemma1", "--k", "2"]).status.code(), Some(2));
    assert_eq!(scg(&["showcase", "lemma1", "--k", "9", "--l", "9"]).status.code(), Some(2));
    assert_eq!(scg(&["showcase", "lemma2"]).status.code(), Some(2));
}

#[test]
fn duplicate_productions_warn() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("dup.scg");
    std::fs::write(&f, "scg\nnonterminals: S\nterminals: a\nstart: S\nprod (S) -> (a)\nprod (S) -> (a)\n").unwrap();
    let o = scg(&["metrics", path(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
}

#[test]
fn usage_errors() {
    assert_eq!(scg(&[]).status.code(), Some(2));
    assert_eq!(scg(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(scg(&["enumerate", "x", "--max-len", "-3"]).status.code(), Some(2));
    assert_eq!(scg(&["--help"]).status.code(), Some(0));
}

#[test]
fn in_process_run_matches_the_binary() {
    let e = grammar("example1.scg");
    let args = ["scg", "enumerate", path(&e), "--max-len", "12"];
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = scg::cli::run(args, &mut out, &mut err);
    let o = scg(&args[1..]);
    assert_eq!(Some(code), o.status.code());
    assert_eq!(out, o.stdout);
}
