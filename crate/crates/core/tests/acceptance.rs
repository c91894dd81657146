//! The acceptance suite as an integration test: one test per criterion.
//! Time budgets are enforced in optimized builds (`cargo test --release`)
//! and skipped in debug builds; `regiso selftest` runs the same checks.

use regiso::accept;

fn run(index: usize) {
    let c = &accept::all()[index];
    match (c.run)(12345) {
        Ok(msg) => println!("PASS {}: {msg}", c.name),
        Err(e) => panic!("FAIL {}: {e}", c.name),
    }
}

#[test]
fn criterion_01_tree_iso_dfa_vs_canonical_codes() {
    run(0);
}

#[test]
fn criterion_02_tree_iso_nfa_vs_canonical_codes() {
    run(1);
}

#[test]
fn criterion_03_slp_engine_vs_expansion() {
    run(2);
}

#[test]
fn criterion_04_identity_suite() {
    run(3);
}

#[test]
fn criterion_05_biray_vs_window_oracle() {
    run(4);
}

#[test]
fn criterion_06_heilbrunner_finite_soundness() {
    run(5);
}

#[test]
fn criterion_07_eta_recognition() {
    run(6);
}

#[test]
fn criterion_08_circuit_gadget_round_trips() {
    run(7);
}

#[test]
fn criterion_09_rewriting_confluence_and_semi_goodness() {
    run(8);
}

#[test]
fn criterion_10_main_step_contract() {
    run(9);
}

#[test]
fn criterion_11_ordered_trees() {
    run(10);
}

#[test]
fn criterion_12_eta_universality_gadget() {
    run(11);
}
