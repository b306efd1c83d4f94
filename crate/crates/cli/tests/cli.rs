//! Exercises the `tlink` binary end to end.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn tlink(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tlink"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Scratch(TempDir);

impl Scratch {
    fn new() -> Self {
        Self(tempfile::tempdir().unwrap())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        s(&p)
    }

    fn gen(&self, name: &str, args: &[&str]) -> String {
        let p = s(&self.path(name));
        let mut full = vec!["gen"];
        full.extend_from_slice(args);
        full.extend_from_slice(&["--out", &p]);
        let o = tlink(&full);
        assert!(o.status.success(), "{}", stderr(&o));
        p
    }
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn gen_rotational_writes_matrix() {
    let o = tlink(&["gen", "--kind", "rotational", "--n", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "TOURN 1 7");
    assert_eq!(lines.len(), 8);
    assert_eq!(lines[1], "0111000");
}

#[test]
fn gen_random_is_reproducible() {
    let args = ["gen", "--kind", "random", "--n", "100", "--seed", "7"];
    let (a, b) = (tlink(&args), tlink(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let other = tlink(&["gen", "--kind", "random", "--n", "100", "--seed", "8"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn gen_rejects_bad_flags() {
    assert_eq!(
        tlink(&["gen", "--kind", "rotational", "--n", "6"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        tlink(&["gen", "--kind", "paley", "--n", "13"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        tlink(&["gen", "--kind", "cubic", "--n", "5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        tlink(&["gen", "--kind", "random", "--n", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn kappa_exact_and_brute() {
    let dir = Scratch::new();
    let t4 = dir.gen("t4", &["--kind", "transitive", "--n", "4"]);
    let r7 = dir.gen("r7", &["--kind", "rotational", "--n", "7"]);
    let big = dir.gen("big", &["--kind", "random", "--n", "20", "--seed", "1"]);
    assert_eq!(stdout(&tlink(&["kappa", "--in", &t4])), "0\n");
    assert_eq!(stdout(&tlink(&["kappa", "--in", &r7, "--exact"])), "3\n");
    assert_eq!(stdout(&tlink(&["kappa", "--in", &r7, "--brute"])), "3\n");
    let o = tlink(&["kappa", "--in", &big, "--brute"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("exceeds"));
}

#[test]
fn malformed_tournament_file_is_input_error() {
    let dir = Scratch::new();
    let bad = dir.write("bad", "TOURN 1 2\n01\n01\n");
    let o = tlink(&["kappa", "--in", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(
        tlink(&["kappa", "--in", &s(&dir.path("missing"))])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn link_verify_round_trip() {
    let dir = Scratch::new();
    let t = dir.gen(
        "t",
        &[
            "--kind",
            "random",
            "--n",
            "1000",
            "--seed",
            "3",
            "--min-degree",
            "452",
        ],
    );
    let pairs = dir.write("pairs", "10 20\n");
    let out = s(&dir.path("paths"));
    let o = tlink(&["link", "--in", &t, "--pairs", &pairs, "--out", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("[menger]"));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1);
    let ids: Vec<&str> = text.split_whitespace().collect();
    assert_eq!((ids[0], *ids.last().unwrap()), ("10", "20"));

    let v = tlink(&["verify", "--in", &t, "--pairs", &pairs, "--paths", &out]);
    assert_eq!(v.status.code(), Some(0));

    // reversing the path breaks it
    let tampered: Vec<&str> = ids.iter().rev().copied().collect();
    let bad = dir.write("bad", &format!("{}\n", tampered.join(" ")));
    let v = tlink(&["verify", "--in", &t, "--pairs", &pairs, "--paths", &bad]);
    assert_eq!(v.status.code(), Some(1));
    assert!(stderr(&v).contains("violation"));
}

#[test]
fn link_input_errors() {
    let dir = Scratch::new();
    let weak = dir.gen("weak", &["--kind", "random", "--n", "300", "--seed", "1"]);
    let pairs = dir.write("pairs", "0 1\n");
    let o = tlink(&["link", "--in", &weak, "--pairs", &pairs]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("vertex 0 "), "{}", stderr(&o));

    let dup = dir.write("dup", "0 1\n1 2\n");
    let o = tlink(&["link", "--in", &weak, "--pairs", &dup, "--force"]);
    assert_eq!(o.status.code(), Some(2));

    let garbage = dir.write("garbage", "0 x\n");
    assert_eq!(
        tlink(&["link", "--in", &weak, "--pairs", &garbage])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn forced_link_reports_failing_stage() {
    let dir = Scratch::new();
    let small = dir.gen("small", &["--kind", "random", "--n", "100", "--seed", "2"]);
    let pairs = dir.write("pairs", "0 1\n");
    let o = tlink(&["link", "--in", &small, "--pairs", &pairs, "--force"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("stage dominate-"), "{}", stderr(&o));
}

#[test]
fn lemma21_routes_all_permutations() {
    let dir = Scratch::new();
    let t = dir.gen(
        "t",
        &[
            "--kind",
            "random",
            "--n",
            "110",
            "--seed",
            "5",
            "--min-degree",
            "40",
        ],
    );
    let o = tlink(&[
        "lemma21", "--in", &t, "--m", "10", "--perms", "100", "--seed", "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("routed: 100/100"));
    let o = tlink(&["lemma21", "--in", &t, "--m", "11", "--perms", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn domset_on_transitive() {
    let dir = Scratch::new();
    let t = dir.gen("t", &["--kind", "transitive", "--n", "5"]);
    let o = tlink(&["domset", "--in", &t, "--flavor", "in", "--size", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "sequence: 4\n|E|: 0\nbound: holds\n");
    let o = tlink(&["domset", "--in", &t, "--flavor", "out", "--size", "1"]);
    assert!(stdout(&o).starts_with("sequence: 0\n"));
    assert_eq!(
        tlink(&["domset", "--in", &t, "--size", "2"]).status.code(),
        Some(1)
    );
}

#[test]
fn oracle_commands() {
    let dir = Scratch::new();
    let t3 = dir.gen("t3", &["--kind", "transitive", "--n", "3"]);
    let c3 = dir.gen("c3", &["--kind", "rotational", "--n", "3"]);
    let o = tlink(&["oracle", "--in", &t3, "--check", "linked", "--k", "1"]);
    assert_eq!(stdout(&o), "not linked: sources [1] sinks [0]\n");
    let o = tlink(&["oracle", "--in", &c3, "--check", "linked"]);
    assert_eq!(stdout(&o), "linked\n");
    let o = tlink(&["oracle", "--in", &c3, "--check", "kappa"]);
    assert_eq!(stdout(&o), "1\n");
    assert_eq!(
        tlink(&["oracle", "--in", &t3, "--check", "linked", "--k", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bench_report_format() {
    let dir = Scratch::new();
    let out = s(&dir.path("report.tsv"));
    let o = tlink(&["bench", "--suite", "forced", "--out", &out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("suite\tn\tk\tseed\tstage_outcomes\truntime_ms")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 9);
    for row in rows {
        let fields: Vec<&str> = row.split('\t').collect();
        assert_eq!(fields.len(), 6);
        assert_eq!(fields[0], "forced");
        assert!(fields[5].parse::<u64>().is_ok());
        assert_eq!(fields[4].split(',').count(), 13);
    }
    assert_eq!(tlink(&["bench", "--suite", "nope"]).status.code(), Some(2));
}
