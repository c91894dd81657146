//! The acceptance suite: every criterion is a self-contained check that
//! compares the deciders against independent oracles on seeded random
//! corpora. `regiso selftest` and the `acceptance` integration test both
//! run these. Time budgets are enforced in optimized builds only.

use crate::automata::{determinize, Dfa, Nfa};
use crate::corpus;
use crate::error::{Error, Result};
use crate::gadgets;
use crate::isocore::{
    self, main_step, prepare_for_main_step, rewrite_normalize, ses_iso, ses_iso_with, validate_proper,
    Ref, SesIsoOptions, Strategy, TwoLevelSystem,
};
use crate::slp::{self, Slp};
use crate::treeiso;
use crate::words::{biray_window_oracle, Expr, Ses};
use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use std::time::{Duration, Instant};

pub struct Criterion {
    pub name: &'static str,
    pub run: fn(u64) -> Result<String>,
}

pub fn all() -> Vec<Criterion> {
    vec![
        Criterion { name: "1 tree-iso vs canonical codes (DFA)", run: c01_tree_iso_dfa },
        Criterion { name: "2 tree-iso vs canonical codes (NFA)", run: c02_tree_iso_nfa },
        Criterion { name: "3 slp engine vs expansion", run: c03_slp_engine },
        Criterion { name: "4 identity suite", run: c04_identities },
        Criterion { name: "5 biray vs window oracle", run: c05_biray },
        Criterion { name: "6 heilbrunner finite soundness", run: c06_heilbrunner },
        Criterion { name: "7 eta recognition", run: c07_eta },
        Criterion { name: "8 circuit gadget round-trips", run: c08_circuits },
        Criterion { name: "9 rewriting system confluence", run: c09_rewriting },
        Criterion { name: "10 main-step contract", run: c10_main_step },
        Criterion { name: "11 ordered trees", run: c11_ordered_trees },
        Criterion { name: "12 eta-universality gadget", run: c12_eta_gadget },
    ]
}

/// Run every criterion, printing one pass/fail line each; returns success.
pub fn run_all(seed: u64) -> bool {
    let mut ok = true;
    for c in all() {
        match (c.run)(seed) {
            Ok(msg) => println!("PASS {}: {}", c.name, msg),
            Err(e) => {
                println!("FAIL {}: {}", c.name, e);
                ok = false;
            }
        }
    }
    ok
}

fn budget_check(start: Instant, budget: Duration, what: &str) -> Result<Duration> {
    let elapsed = start.elapsed();
    if cfg!(not(debug_assertions)) && elapsed > budget {
        return Err(Error::ResourceLimit(format!(
            "{what} took {elapsed:?}, budget {budget:?}"
        )));
    }
    Ok(elapsed)
}

fn canon_code(d: &Dfa) -> Result<String> {
    treeiso::finite_tree_canon(&d.to_nfa(), 1 << 20)
}

fn c01_tree_iso_dfa(seed: u64) -> Result<String> {
    let mut r = corpus::rng(corpus::subseed(seed, "c1"));
    let start = Instant::now();
    let n = 2000;
    for i in 0..n {
        let ka = r.gen_range(1..=3);
        let kb = r.gen_range(1..=3);
        let a = corpus::random_acyclic_dfa(&mut r, 8, ka);
        let b = if r.gen_bool(0.3) {
            // a structurally related pair is more likely isomorphic
            corpus::random_acyclic_dfa(&mut r, 8, a.alphabet.len())
        } else {
            corpus::random_acyclic_dfa(&mut r, 8, kb)
        };
        let got = treeiso::tree_iso_dfa(&a, &b)?;
        let want = canon_code(&a)? == canon_code(&b)?;
        if got != want {
            return Err(Error::InvalidInput(format!("disagreement on pair {i}: got {got}, want {want}")));
        }
    }
    let t = budget_check(start, Duration::from_secs(30), "criterion 1")?;
    Ok(format!("{n} pairs agreed in {t:?}"))
}

fn c02_tree_iso_nfa(seed: u64) -> Result<String> {
    let mut r = corpus::rng(corpus::subseed(seed, "c2"));
    let start = Instant::now();
    let n = 500;
    for i in 0..n {
        let ka = r.gen_range(1..=3);
        let kb = r.gen_range(1..=3);
        let a = corpus::random_acyclic_nfa(&mut r, 6, ka);
        let b = corpus::random_acyclic_nfa(&mut r, 6, kb);
        let got = treeiso::tree_iso_nfa(&a, &b, 1 << 16)?;
        let want = treeiso::finite_tree_canon(&a, 1 << 20)? == treeiso::finite_tree_canon(&b, 1 << 20)?;
        if got != want {
            return Err(Error::InvalidInput(format!("disagreement on pair {i}: got {got}, want {want}")));
        }
    }
    let t = budget_check(start, Duration::from_secs(30), "criterion 2")?;
    Ok(format!("{n} pairs agreed in {t:?}"))
}

fn naive_contains(pattern: &[usize], text: &[usize]) -> bool {
    if pattern.len() > text.len() {
        return false;
    }
    text.windows(pattern.len()).any(|w| w == pattern)
}

fn c03_slp_engine(seed: u64) -> Result<String> {
    let mut r = corpus::rng(corpus::subseed(seed, "c3"));
    let start = Instant::now();
    let n = 2000;
    for i in 0..n {
        let a = corpus::random_slp(&mut r, 2, 10_000);
        let b = if r.gen_bool(0.5) {
            a.clone()
        } else {
            corpus::random_slp(&mut r, 2, 10_000)
        };
        let ea = a.expand(10_000).unwrap();
        let eb = b.expand(10_000).unwrap();
        if slp::slp_eq(&a, &b) != (ea == eb) {
            return Err(Error::InvalidInput(format!("slp_eq disagreement on case {i}")));
        }
        // factor: pattern from the text half of the time
        let p = if r.gen_bool(0.5) && ea.len() >= 2 {
            let len = r.gen_range(1..=ea.len().min(40));
            let at = r.gen_range(0..=ea.len() - len);
            Slp::from_word(&ea[at..at + len]).unwrap()
        } else {
            corpus::random_slp(&mut r, 2, 64)
        };
        let ep = p.expand(10_000).unwrap();
        if slp::slp_factor(&p, &a) != naive_contains(&ep, &ea) {
            return Err(Error::InvalidInput(format!("slp_factor disagreement on case {i}")));
        }
        // slice and char oracle
        let la = ea.len();
        let i1 = r.gen_range(1..=la);
        let j1 = r.gen_range(i1..=la);
        let sl = slp::slp_slice(&a, &BigUint::from(i1), &BigUint::from(j1))?;
        if sl.expand(10_000).unwrap() != ea[i1 - 1..j1] {
            return Err(Error::InvalidInput(format!("slp_slice disagreement on case {i}")));
        }
        let k = r.gen_range(1..=la);
        if slp::slp_char_at(&a, &BigUint::from(k))? != ea[k - 1] {
            return Err(Error::InvalidInput(format!("slp_char_at disagreement on case {i}")));
        }
    }
    // two independently built presentations of a^(2^20)
    let t_eq = Instant::now();
    let mut rules: Vec<Vec<slp::Item>> = vec![vec![slp::Item::Sym(0)]];
    for i in 0..20 {
        rules.push(vec![slp::Item::Var(i), slp::Item::Var(i)]);
    }
    let chain = Slp::from_rules(&rules, 20).unwrap();
    let pow = slp::slp_power(&Slp::leaf(0), &(BigUint::one() << 20)).unwrap();
    if !slp::slp_eq(&chain, &pow) {
        return Err(Error::InvalidInput("a^(2^20) presentations compared unequal".into()));
    }
    let eq_time = t_eq.elapsed();
    if cfg!(not(debug_assertions)) && eq_time > Duration::from_millis(500) {
        return Err(Error::ResourceLimit(format!("huge unary equality took {eq_time:?}")));
    }
    let t = start.elapsed();
    Ok(format!("{n} cases agreed in {t:?}; a^(2^20) equality in {eq_time:?}"))
}

/// One random filling of the identity suite; returns SES pairs that must be
/// isomorphic.
fn identity_instances(r: &mut impl Rng) -> Vec<(Ses, usize, usize)> {
    let alpha = 2;
    // the member set X: one to three small expressions
    let k = r.gen_range(1..=3);
    let members: Vec<Expr> = (0..k).map(|_| corpus::random_expr(r, alpha, 2)).collect();
    let shuffle = Expr::shuffle(members.clone());
    let u = members[r.gen_range(0..members.len())].clone();
    let mut out = Vec::new();
    let mut pair = |lhs: Expr, rhs: Expr| {
        let ses = corpus::ses_of(vec![lhs, rhs], alpha);
        out.push((ses, 0, 1));
    };
    // X^eta X^eta = X^eta and X^eta u X^eta = X^eta
    pair(Expr::concat(vec![shuffle.clone(), shuffle.clone()]), shuffle.clone());
    pair(Expr::concat(vec![shuffle.clone(), u.clone(), shuffle.clone()]), shuffle.clone());
    // powers
    pair(Expr::omega(shuffle.clone()), shuffle.clone());
    pair(Expr::omega(Expr::concat(vec![shuffle.clone(), u.clone()])), shuffle.clone());
    pair(Expr::omega_bar(shuffle.clone()), shuffle.clone());
    pair(Expr::omega_bar(Expr::concat(vec![u.clone(), shuffle.clone()])), shuffle.clone());
    // [u1..un, v1..vm]^eta = X^eta with bordered members
    {
        let y = members[r.gen_range(0..members.len())].clone();
        let z = members[r.gen_range(0..members.len())].clone();
        let mut args: Vec<Expr> = Vec::new();
        for _ in 0..r.gen_range(0..=2) {
            args.push(members[r.gen_range(0..members.len())].clone());
        }
        let m = r.gen_range(1..=2);
        for _ in 0..m {
            let v = match r.gen_range(0..4) {
                0 => shuffle.clone(),
                1 => Expr::concat(vec![y.clone(), shuffle.clone()]),
                2 => Expr::concat(vec![shuffle.clone(), z.clone()]),
                _ => Expr::concat(vec![y.clone(), shuffle.clone(), z.clone()]),
            };
            args.push(v);
        }
        pair(Expr::shuffle(args), shuffle.clone());
    }
    // (vw)^omega = v (wv)^omega and (vw)^omegabar = (wv)^omegabar w
    {
        let v = corpus::random_expr(r, alpha, 2);
        let w = corpus::random_expr(r, alpha, 2);
        pair(
            Expr::omega(Expr::concat(vec![v.clone(), w.clone()])),
            Expr::concat(vec![v.clone(), Expr::omega(Expr::concat(vec![w.clone(), v.clone()]))]),
        );
        pair(
            Expr::omega_bar(Expr::concat(vec![v.clone(), w.clone()])),
            Expr::concat(vec![Expr::omega_bar(Expr::concat(vec![w.clone(), v.clone()])), w.clone()]),
        );
    }
    out
}

fn c04_identities(seed: u64) -> Result<String> {
    let mut r = corpus::rng(corpus::subseed(seed, "c4"));
    let start = Instant::now();
    let rounds = 100;
    let mut cases = 0;
    for round in 0..rounds {
        for (i, (ses, x, y)) in identity_instances(&mut r).into_iter().enumerate() {
            cases += 1;
            if !ses_iso(&ses, x, y)? {
                return Err(Error::InvalidInput(format!(
                    "identity {i} failed on round {round}:\n{}",
                    crate::words::write_ses(&ses)
                )));
            }
        }
    }
    let t = budget_check(start, Duration::from_secs(60), "criterion 4")?;
    Ok(format!("{cases} identity instances held in {t:?}"))
}

fn c05_biray(seed: u64) -> Result<String> {
    let start = Instant::now();
    let mut checked = 0usize;
    // exhaustive for lengths 1..=3 over the binary alphabet
    for ell in 1usize..=3 {
        let words: Vec<Vec<usize>> = (0..(1usize << ell))
            .map(|bits| (0..ell).map(|i| (bits >> i) & 1).collect())
            .collect();
        let slps: Vec<Slp> = words.iter().map(|w| Slp::from_word(w).unwrap()).collect();
        for u1 in 0..words.len() {
            for v1 in 0..words.len() {
                for w1 in 0..words.len() {
                    for u2 in 0..words.len() {
                        for v2 in 0..words.len() {
                            for w2 in 0..words.len() {
                                let got = crate::words::biray_eq(
                                    &slps[u1], &slps[v1], &slps[w1], &slps[u2], &slps[v2], &slps[w2],
                                )?;
                                let want = biray_window_oracle(
                                    &words[u1], &words[v1], &words[w1], &words[u2], &words[v2], &words[w2],
                                );
                                if got != want {
                                    return Err(Error::InvalidInput(format!(
                                        "biray disagreement: {:?} {:?} {:?} vs {:?} {:?} {:?}",
                                        words[u1], words[v1], words[w1], words[u2], words[v2], words[w2]
                                    )));
                                }
                                checked += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    // random samples at lengths up to 6
    let mut r = corpus::rng(corpus::subseed(seed, "c5"));
    for _ in 0..1000 {
        let ell = r.gen_range(1..=6);
        let ws: Vec<Vec<usize>> = (0..6)
            .map(|_| (0..ell).map(|_| r.gen_range(0..2)).collect())
            .collect();
        let ss: Vec<Slp> = ws.iter().map(|w| Slp::from_word(w).unwrap()).collect();
        let got = crate::words::biray_eq(&ss[0], &ss[1], &ss[2], &ss[3], &ss[4], &ss[5])?;
        let want = biray_window_oracle(&ws[0], &ws[1], &ws[2], &ws[3], &ws[4], &ws[5]);
        if got != want {
            return Err(Error::InvalidInput(format!("biray random disagreement: {ws:?}")));
        }
        checked += 1;
    }
    let t = budget_check(start, Duration::from_secs(60), "criterion 5")?;
    Ok(format!("{checked} triples agreed in {t:?}"))
}

fn c06_heilbrunner(seed: u64) -> Result<String> {
    let mut r = corpus::rng(corpus::subseed(seed, "c6"));
    let start = Instant::now();
    let n = 1000;
    for i in 0..n {
        let ka = r.gen_range(1..=3);
        let kc = r.gen_range(1..=3);
        let p = corpus::random_acyclic_pdfa(&mut r, 8, ka, kc);
        let ses = crate::heilbrunner::heilbrunner_expression(&p)?;
        let got = ses.eval_finite(ses.start.unwrap(), 1 << 20)?;
        let want = p.finite_word(p.dfa.state_count.max(1));
        if got != want {
            return Err(Error::InvalidInput(format!("finite word mismatch on automaton {i}")));
        }
    }
    let t = budget_check(start, Duration::from_secs(30), "criterion 6")?;
    Ok(format!("{n} automata matched in {t:?}"))
}

fn c07_eta(_seed: u64) -> Result<String> {
    let start = Instant::now();
    let eta = gadgets::eta_order_dfa();
    // {a,b}*b
    let ab = corpus::letters(2);
    let d2 = Dfa::new(2, ab.clone(), vec![(0, 0, 0), (0, 1, 1), (1, 0, 0), (1, 1, 1)], Some(0), [1].into()).unwrap();
    if !isocore::order_iso(&eta, &d2)? {
        return Err(Error::InvalidInput("(0|1)*1 and (a|b)*b should both be the rational order".into()));
    }
    // a*b
    let d3 = Dfa::new(2, ab, vec![(0, 0, 0), (0, 1, 1)], Some(0), [1].into()).unwrap();
    if isocore::order_iso(&eta, &d3)? {
        return Err(Error::InvalidInput("a*b is not dense".into()));
    }
    let t = budget_check(start, Duration::from_secs(5), "criterion 7")?;
    Ok(format!("both checks in {t:?}"))
}

fn c08_circuits(seed: u64) -> Result<String> {
    let mut r = corpus::rng(corpus::subseed(seed, "c8"));
    let start = Instant::now();
    let n = 200;
    for i in 0..n {
        let c = corpus::random_circuit(&mut r, 5, 4);
        let want = c.evaluate();
        let (d1, d2) = gadgets::circuit_to_tree_dags(&c)?;
        if treeiso::tree_iso_dfa(&d1, &d2)? != want {
            return Err(Error::InvalidInput(format!("tree gadget disagreement on circuit {i}")));
        }
        let (ses, tv, gv) = gadgets::circuit_to_ses(&c)?;
        if ses_iso(&ses, tv, gv)? != want {
            return Err(Error::InvalidInput(format!("ses gadget disagreement on circuit {i}")));
        }
    }
    let t = budget_check(start, Duration::from_secs(60), "criterion 8")?;
    Ok(format!("{n} circuits matched evaluation in {t:?}"))
}

fn c09_rewriting(seed: u64) -> Result<String> {
    let mut r = corpus::rng(corpus::subseed(seed, "c9"));
    let start = Instant::now();
    let n = 1000;
    let mut step_checks = 0;
    for i in 0..n {
        let len = r.gen_range(1..=8);
        let forms: Vec<_> = (0..len).map(|_| corpus::random_primitive_form(&mut r, 2, 2)).collect();
        let base = TwoLevelSystem {
            lo_forms: forms,
            up_rhs: Vec::new(),
            sigma: corpus::letters(2),
            tec: Vec::new(),
        };
        let seq: Vec<Ref> = (0..len).map(Ref::Lo).collect();
        let mut s1 = base.clone();
        let mut s2 = base.clone();
        let left = rewrite_normalize(&mut s1, seq.clone(), Strategy::Leftmost);
        let right = rewrite_normalize(&mut s2, seq.clone(), Strategy::Rightmost);
        if left.len() != right.len() {
            return Err(Error::InvalidInput(format!("confluence violated on sequence {i}")));
        }
        for (x, y) in left.iter().zip(right.iter()) {
            let fx = &s1.lo_forms[x.lo().unwrap()];
            let fy = &s2.lo_forms[y.lo().unwrap()];
            if !crate::words::primitive_eq(fx, fy) {
                return Err(Error::InvalidInput(format!("confluence violated on sequence {i}")));
            }
        }
        // semi-good preservation: all-primitive sequences are semi-good, and
        // every single step must keep them semi-good
        let mut s3 = base.clone();
        for stepped in isocore::one_step_rewrites(&mut s3, &seq) {
            step_checks += 1;
            if !isocore::is_semi_good(&s3, &stepped) {
                return Err(Error::InvalidInput(format!("semi-goodness lost on sequence {i}")));
            }
        }
    }
    // semi-good sequences with non-primitive entries
    let mut with_up = 0;
    while with_up < 300 {
        let lo_forms: Vec<_> = (0..4).map(|_| corpus::random_primitive_form(&mut r, 2, 2)).collect();
        let mut sys = TwoLevelSystem {
            lo_forms,
            up_rhs: Vec::new(),
            sigma: corpus::letters(2),
            tec: Vec::new(),
        };
        // one upper variable with a power body over a random lower variable
        let base_lo = r.gen_range(0..4);
        sys.up_rhs.push(if r.gen_bool(0.5) {
            isocore::UpRhs::Omega(Ref::Lo(base_lo))
        } else {
            isocore::UpRhs::OmegaBar(Ref::Lo(base_lo))
        });
        let len = r.gen_range(1..=6);
        let seq: Vec<Ref> = (0..len)
            .map(|_| {
                if r.gen_bool(0.25) {
                    Ref::Up(0)
                } else {
                    Ref::Lo(r.gen_range(0..4))
                }
            })
            .collect();
        if !isocore::is_semi_good(&sys, &seq) {
            continue;
        }
        with_up += 1;
        let mut sys2 = sys.clone();
        for stepped in isocore::one_step_rewrites(&mut sys2, &seq) {
            step_checks += 1;
            if !isocore::is_semi_good(&sys2, &stepped) {
                return Err(Error::InvalidInput("semi-goodness lost around a non-primitive entry".into()));
            }
        }
    }
    let t = budget_check(start, Duration::from_secs(10), "criterion 9")?;
    Ok(format!("{n} confluence checks, {step_checks} step checks in {t:?}"))
}

/// The SES corpus for the main-step contract: identity instances, random
/// systems, and circuit gadget systems.
pub fn ses_corpus_for_debug(seed: u64) -> Vec<(Ses, usize, usize)> { ses_corpus(seed) }

fn ses_corpus(seed: u64) -> Vec<(Ses, usize, usize)> {
    let mut r = corpus::rng(corpus::subseed(seed, "c10"));
    let mut out = Vec::new();
    for _ in 0..10 {
        out.extend(identity_instances(&mut r));
    }
    for _ in 0..60 {
        let a = corpus::random_expr(&mut r, 2, 3);
        let b = corpus::random_expr(&mut r, 2, 3);
        out.push((corpus::ses_of(vec![a, b], 2), 0, 1));
    }
    for _ in 0..15 {
        let c = corpus::random_circuit(&mut r, 4, 3);
        if let Ok((ses, tv, gv)) = gadgets::circuit_to_ses(&c) {
            out.push((ses, tv, gv));
        }
    }
    out
}

fn c10_main_step(seed: u64) -> Result<String> {
    let start = Instant::now();
    let corpus_list = ses_corpus(seed);
    let mut steps = 0;
    for (i, (ses, x, y)) in corpus_list.iter().enumerate() {
        // direct contract of one step
        let (prepared, _) = prepare_for_main_step(ses);
        let step = main_step(&prepared)?;
        steps += 1;
        if !validate_proper(&step.sys) {
            return Err(Error::InvalidInput(format!("main_step output improper on corpus item {i}")));
        }
        isocore::height_bookkeeping_ok(&prepared, &step)
            .map_err(|e| Error::InvalidInput(format!("height bookkeeping failed on item {i}: {e}")))?;
        // the full loop with per-round invariant checks and round budget
        let opts = SesIsoOptions { trace: false, check_invariants: true };
        let (_, stats) = ses_iso_with(ses, *x, *y, &opts)?;
        if stats.rounds > stats.budget {
            return Err(Error::InvalidInput(format!("round budget exceeded on item {i}")));
        }
    }
    let t = budget_check(start, Duration::from_secs(120), "criterion 10")?;
    Ok(format!("{} systems, {steps} direct steps verified in {t:?}", corpus_list.len()))
}

fn ordered_canon(d: &Dfa) -> Result<String> {
    let t = d.trim();
    if !crate::automata::is_acyclic(&t.to_nfa()) {
        return Err(Error::InvalidInput("ordered canon needs an acyclic automaton".into()));
    }
    let words = t.words_up_to(t.state_count.max(1));
    Ok(treeiso::ordered_canon_of_language(&words))
}

fn c11_ordered_trees(seed: u64) -> Result<String> {
    let mut r = corpus::rng(corpus::subseed(seed, "c11"));
    let start = Instant::now();
    let n = 500;
    for i in 0..n {
        let ka = r.gen_range(1..=3);
        let kb = r.gen_range(1..=3);
        let a = corpus::random_acyclic_dfa(&mut r, 8, ka);
        let b = corpus::random_acyclic_dfa(&mut r, 8, kb);
        let got = isocore::ordered_tree_iso(&a, &b)?;
        let want = ordered_canon(&a)? == ordered_canon(&b)?;
        if got != want {
            return Err(Error::InvalidInput(format!(
                "ordered tree disagreement on acyclic pair {i}: got {got}, want {want}"
            )));
        }
    }
    for i in 0..n {
        let ka = r.gen_range(1..=3);
        let kb = r.gen_range(1..=3);
        let a = corpus::random_prefix_closed_dfa(&mut r, 8, ka);
        let b = if r.gen_bool(0.3) {
            a.clone()
        } else {
            corpus::random_prefix_closed_dfa(&mut r, 8, kb)
        };
        let got = isocore::ordered_tree_iso(&a, &b)?;
        let fast = isocore::ordered_tree_iso_prefix_closed(&a, &b)?;
        if got != fast {
            return Err(Error::InvalidInput(format!(
                "prefix-closed disagreement on pair {i}: refinement {got}, search {fast}"
            )));
        }
    }
    let t = budget_check(start, Duration::from_secs(30), "criterion 11")?;
    Ok(format!("{} pairs agreed in {t:?}", 2 * n))
}

/// Universality of an NFA over two letters by subset construction: the
/// determinized automaton must be complete with only final states.
fn nfa_universal(k: &Nfa) -> Result<bool> {
    let d = determinize(k, 1 << 16)?;
    let Some(q0) = d.initial else { return Ok(false) };
    let mut seen = vec![false; d.state_count];
    let mut stack = vec![q0];
    seen[q0] = true;
    while let Some(p) = stack.pop() {
        if !d.finals.contains(&p) {
            return Ok(false);
        }
        for s in 0..d.alphabet.len() {
            match d.step(p, s) {
                None => return Ok(false),
                Some(q) => {
                    if !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
    }
    Ok(true)
}

fn c12_eta_gadget(seed: u64) -> Result<String> {
    let mut r = corpus::rng(corpus::subseed(seed, "c12"));
    let start = Instant::now();
    let eta = gadgets::eta_order_dfa();
    let ab = corpus::letters(2);
    let mut universal_seen = 0;
    let budget = 500;
    for i in 0..budget {
        let k = if i == 0 {
            // the canonical universal automaton
            Nfa::new(1, ab.clone(), vec![(0, 0, 0), (0, 1, 0)], Some(0), [0].into()).unwrap()
        } else {
            let n = r.gen_range(1..=3);
            let mut trans = Vec::new();
            for p in 0..n {
                for s in 0..2 {
                    for q in 0..n {
                        if r.gen_bool(0.5) {
                            trans.push((p, s, q));
                        }
                    }
                }
            }
            let finals: std::collections::BTreeSet<usize> = (0..n).filter(|_| r.gen_bool(0.7)).collect();
            Nfa::new(n, ab.clone(), trans, Some(0), finals).unwrap()
        };
        let want = nfa_universal(&k)?;
        if want {
            universal_seen += 1;
        }
        let gadget = gadgets::eta_universality_gadget(&k)?;
        let d = determinize(&gadget, 1 << 16)?;
        let got = isocore::order_iso(&d, &eta)?;
        if got != want {
            return Err(Error::InvalidInput(format!(
                "gadget disagreement on automaton {i}: order-iso {got}, universal {want}"
            )));
        }
    }
    let t = budget_check(start, Duration::from_secs(60), "criterion 12")?;
    Ok(format!("{budget} automata agreed ({universal_seen} universal) in {t:?}"))
}
