//! End-to-end tests of the command-line interface: exit codes, verdict
//! vocabulary, and the round-trip property that emitted files reparse and
//! reproduce the originating decision.

use std::path::Path;
use std::process::{Command, Output};

fn regiso(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_regiso"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

const ETA: &str = "type: dfa\nalphabet: 0 1\nstates: 2\ninitial: 0\nfinals: 1\n\
trans: 0 0 0\ntrans: 0 1 1\ntrans: 1 0 0\ntrans: 1 1 1\n";

const AB_B: &str = "type: dfa\nalphabet: a b\nstates: 2\ninitial: 0\nfinals: 1\n\
trans: 0 a 0\ntrans: 0 b 1\ntrans: 1 a 0\ntrans: 1 b 1\n";

const A_STAR_B: &str = "type: dfa\nalphabet: a b\nstates: 2\ninitial: 0\nfinals: 1\n\
trans: 0 a 0\ntrans: 0 b 1\n";

#[test]
fn order_iso_verdicts_and_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(d, "eta.aut", ETA);
    write(d, "abb.aut", AB_B);
    write(d, "asb.aut", A_STAR_B);
    let out = regiso(d, &["order-iso", "eta.aut", "abb.aut"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "isomorphic");
    let out = regiso(d, &["order-iso", "eta.aut", "asb.aut"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "not-isomorphic");
}

#[test]
fn missing_file_is_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = regiso(tmp.path(), &["tree-iso", "nope.aut", "nope.aut"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.aut"));
}

#[test]
fn determinization_overflow_is_exit_3_and_names_the_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let mut nfa = String::from("type: nfa\nalphabet: a b\nstates: 8\ninitial: 0\nfinals: 7\n");
    nfa.push_str("trans: 0 a 0\ntrans: 0 b 0\ntrans: 0 a 1\n");
    for i in 1..7 {
        nfa.push_str(&format!("trans: {i} a {}\ntrans: {i} b {}\n", i + 1, i + 1));
    }
    write(d, "blow.aut", &nfa);
    write(d, "eta.aut", ETA);
    let out = regiso(d, &["order-iso", "blow.aut", "eta.aut", "--cap", "10"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--cap"));
}

#[test]
fn tree_iso_and_canon() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(
        d,
        "two.aut",
        "type: dfa\nalphabet: a b\nstates: 2\ninitial: 0\nfinals: 0 1\ntrans: 0 a 1\ntrans: 0 b 1\n",
    );
    write(
        d,
        "two2.aut",
        "type: dfa\nalphabet: c d\nstates: 2\ninitial: 0\nfinals: 0 1\ntrans: 0 c 1\ntrans: 0 d 1\n",
    );
    let out = regiso(d, &["tree-iso", "two.aut", "two2.aut"]);
    assert_eq!(out.status.code(), Some(0));
    let out = regiso(d, &["tree-canon", "two.aut"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "(()())");
}

#[test]
fn heilbrunner_emits_reparseable_ses_reproducing_the_decision() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(
        d,
        "w.pdfa",
        "type: pdfa\nalphabet: a b\nstates: 2\ninitial: 0\ncolors: x=1\ntrans: 0 a 1\ntrans: 0 b 0\n",
    );
    let out = regiso(d, &["heilbrunner", "w.pdfa", "-o", "w.ses"]);
    assert_eq!(out.status.code(), Some(0));
    // the emitted system must reparse and its start variable must be
    // isomorphic to a direct x^omega
    let mut hand = String::from("ses\nalphabet: x\nstart: W\nW = 'x'^omega\n");
    let emitted = std::fs::read_to_string(d.join("w.ses")).unwrap();
    for line in emitted.lines().skip(1) {
        if !line.starts_with("alphabet:") && !line.starts_with("start:") {
            hand.push_str(line);
            hand.push('\n');
        }
    }
    write(d, "combined.ses", &hand);
    let out = regiso(d, &["ses-iso", "combined.ses", "W", "q0"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn slp_subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(d, "s1.ses", "ses\nalphabet: a b\nstart: X\nX = Y Y\nY = 'a' 'b'\n");
    write(d, "s2.ses", "ses\nalphabet: a b\nstart: Z\nZ = 'a' 'b' 'a' 'b'\n");
    write(d, "p.ses", "ses\nalphabet: a b\nstart: P\nP = 'b' 'a'\n");
    assert_eq!(regiso(d, &["slp", "eq", "s1.ses", "s2.ses"]).status.code(), Some(0));
    let out = regiso(d, &["slp", "len", "s1.ses"]);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "4");
    assert_eq!(regiso(d, &["slp", "factor", "p.ses", "s1.ses"]).status.code(), Some(0));
    // powers are not SLPs
    write(d, "bad.ses", "ses\nalphabet: a\nstart: X\nX = 'a'^omega\n");
    assert_eq!(regiso(d, &["slp", "len", "bad.ses"]).status.code(), Some(2));
}

#[test]
fn gadget_files_round_trip_through_the_deciders() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    write(
        d,
        "c.circ",
        "layer 1 input\ngate 0 = true\ngate 1 = false\nlayer 2 and\ngate 2 = 0 1\n",
    );
    let out = regiso(d, &["gadget", "circuit-tree", "c.circ", "-o", "t1.aut", "t2.aut"]);
    assert_eq!(out.status.code(), Some(0));
    // AND(true, false) = false
    assert_eq!(regiso(d, &["tree-iso", "t1.aut", "t2.aut"]).status.code(), Some(1));
    let out = regiso(d, &["gadget", "circuit-ses", "c.circ", "-o", "c.ses"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(regiso(d, &["ses-iso", "c.ses", "t2", "good2"]).status.code(), Some(1));
    assert_eq!(regiso(d, &["ses-iso", "c.ses", "t2", "bad2"]).status.code(), Some(0));

    // eta gadget over a universal NFA
    write(
        d,
        "uni.aut",
        "type: nfa\nalphabet: a b\nstates: 1\ninitial: 0\nfinals: 0\ntrans: 0 a 0\ntrans: 0 b 0\n",
    );
    write(d, "eta.aut", ETA);
    let out = regiso(d, &["gadget", "eta", "uni.aut", "-o", "g.aut"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(regiso(d, &["order-iso", "g.aut", "eta.aut"]).status.code(), Some(0));
}

#[test]
fn bool_tree_gadget_cli() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    // a true leaf as an automaton file
    let omega = "alphabet: a l_and lp_and r_and l_or lp_or r_or";
    write(
        d,
        "t.aut",
        &format!("type: nfa\n{omega}\nstates: 4\ninitial: 0\nfinals: 0 1 2 3\ntrans: 0 lp_or 1\ntrans: 0 a 2\ntrans: 0 r_or 3\n"),
    );
    write(
        d,
        "f.aut",
        &format!("type: nfa\n{omega}\nstates: 4\ninitial: 0\nfinals: 0 1 2 3\ntrans: 0 lp_and 1\ntrans: 0 a 2\ntrans: 0 r_and 3\n"),
    );
    let out = regiso(d, &["gadget", "bool-tree", "t.aut", "f.aut", "--kind", "or", "-o", "o1.aut", "o2.aut"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(regiso(d, &["tree-iso", "o1.aut", "o2.aut"]).status.code(), Some(0));
    let out = regiso(d, &["gadget", "bool-tree", "t.aut", "f.aut", "--kind", "and", "-o", "a1.aut", "a2.aut"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(regiso(d, &["tree-iso", "a1.aut", "a2.aut"]).status.code(), Some(1));
}

#[test]
fn otree_iso_cli() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    // {ε,a,b,ba} vs {ε,a,b,ab}: unordered isomorphic, ordered not
    write(
        d,
        "l.aut",
        "type: dfa\nalphabet: a b\nstates: 4\ninitial: 0\nfinals: 0 1 2 3\ntrans: 0 a 1\ntrans: 0 b 2\ntrans: 2 a 3\n",
    );
    write(
        d,
        "r.aut",
        "type: dfa\nalphabet: a b\nstates: 4\ninitial: 0\nfinals: 0 1 2 3\ntrans: 0 a 1\ntrans: 0 b 2\ntrans: 1 b 3\n",
    );
    assert_eq!(regiso(d, &["tree-iso", "l.aut", "r.aut"]).status.code(), Some(0));
    assert_eq!(regiso(d, &["otree-iso", "l.aut", "r.aut"]).status.code(), Some(1));
    assert_eq!(
        regiso(d, &["otree-iso", "--prefix-closed", "l.aut", "r.aut"]).status.code(),
        Some(1)
    );
}
