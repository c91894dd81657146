//! Seeded random generators for automata, expression systems, primitive
//! forms and circuits. These drive the property tests and the acceptance
//! suite; everything is deterministic in the seed.

use crate::automata::{Alphabet, Dfa, Nfa, PartitionedDfa, StateId};
use crate::isocore::{GateDef, LayerKind, LayeredCircuit};
use crate::slp::Slp;
use crate::words::{Expr, PrimitiveForm, Ses};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn letters(k: usize) -> Alphabet {
    let names = ["a", "b", "c", "d", "e", "f"];
    Alphabet::new(names[..k].iter().copied()).unwrap()
}

/// Random acyclic DFA accepting the empty word (transitions go from lower
/// to higher state ids, the initial state 0 is final, trimming never kills
/// the root).
pub fn random_acyclic_dfa(r: &mut impl Rng, max_states: usize, alpha: usize) -> Dfa {
    loop {
        let n = r.gen_range(1..=max_states);
        let alphabet = letters(alpha);
        let mut trans = Vec::new();
        for p in 0..n {
            for s in 0..alpha {
                if p + 1 < n && r.gen_bool(0.55) {
                    trans.push((p, s, r.gen_range(p + 1..n)));
                }
            }
        }
        let mut finals: BTreeSet<StateId> = BTreeSet::from([0]);
        for q in 1..n {
            if r.gen_bool(0.5) {
                finals.insert(q);
            }
        }
        let d = Dfa::new(n, alphabet, trans, Some(0), finals).unwrap().trim();
        if d.state_count > 0 {
            return d;
        }
    }
}

/// Random acyclic NFA accepting the empty word.
pub fn random_acyclic_nfa(r: &mut impl Rng, max_states: usize, alpha: usize) -> Nfa {
    loop {
        let n = r.gen_range(1..=max_states);
        let alphabet = letters(alpha);
        let mut trans = Vec::new();
        for p in 0..n {
            for s in 0..alpha {
                for q in p + 1..n {
                    if r.gen_bool(0.35) {
                        trans.push((p, s, q));
                    }
                }
            }
        }
        let mut finals: BTreeSet<StateId> = BTreeSet::from([0]);
        for q in 1..n {
            if r.gen_bool(0.5) {
                finals.insert(q);
            }
        }
        let a = Nfa::new(n, alphabet, trans, Some(0), finals).unwrap().trim();
        if a.state_count > 0 {
            return a;
        }
    }
}

/// Random (possibly cyclic) DFA with nonempty language.
pub fn random_dfa(r: &mut impl Rng, max_states: usize, alpha: usize, epsilon_in: bool) -> Dfa {
    loop {
        let n = r.gen_range(1..=max_states);
        let alphabet = letters(alpha);
        let mut trans = Vec::new();
        for p in 0..n {
            for s in 0..alpha {
                if r.gen_bool(0.6) {
                    trans.push((p, s, r.gen_range(0..n)));
                }
            }
        }
        let mut finals: BTreeSet<StateId> = BTreeSet::new();
        if epsilon_in {
            finals.insert(0);
        }
        for q in 0..n {
            if r.gen_bool(0.4) {
                finals.insert(q);
            }
        }
        if finals.is_empty() {
            continue;
        }
        let d = Dfa::new(n, alphabet, trans, Some(0), finals).unwrap().trim();
        if d.state_count > 0 {
            return d;
        }
    }
}

/// Random prefix-closed DFA (every state final, all states reachable).
pub fn random_prefix_closed_dfa(r: &mut impl Rng, max_states: usize, alpha: usize) -> Dfa {
    let n = r.gen_range(1..=max_states);
    let alphabet = letters(alpha);
    let mut trans = Vec::new();
    for p in 0..n {
        for s in 0..alpha {
            if r.gen_bool(0.6) {
                trans.push((p, s, r.gen_range(0..n)));
            }
        }
    }
    let finals: BTreeSet<StateId> = (0..n).collect();
    Dfa::new(n, alphabet, trans, Some(0), finals).unwrap().trim()
}

/// Random acyclic partitioned DFA with nonempty language.
pub fn random_acyclic_pdfa(r: &mut impl Rng, max_states: usize, alpha: usize, colors: usize) -> PartitionedDfa {
    loop {
        let d = random_acyclic_dfa(r, max_states, alpha);
        if d.state_count == 0 {
            continue;
        }
        let color_names = ["x", "y", "z"];
        let ca = Alphabet::new(color_names[..colors].iter().copied()).unwrap();
        let color_of: BTreeMap<StateId, usize> =
            d.finals.iter().map(|&q| (q, r.gen_range(0..colors))).collect();
        return PartitionedDfa::new(d, ca, color_of).unwrap();
    }
}

/// Random (possibly cyclic) partitioned DFA with nonempty language.
pub fn random_pdfa(r: &mut impl Rng, max_states: usize, alpha: usize, colors: usize) -> PartitionedDfa {
    let d = random_dfa(r, max_states, alpha, false);
    let color_names = ["x", "y", "z"];
    let ca = Alphabet::new(color_names[..colors].iter().copied()).unwrap();
    let color_of: BTreeMap<StateId, usize> = d.finals.iter().map(|&q| (q, r.gen_range(0..colors))).collect();
    PartitionedDfa::new(d, ca, color_of).unwrap()
}

/// Random SLP with expansion length at most `max_len` (and at least 1).
pub fn random_slp(r: &mut impl Rng, alpha: usize, max_len: usize) -> Slp {
    // random word, then random sharing by repeated squaring of random slices
    let len = r.gen_range(1..=max_len.min(24).max(1));
    let word: Vec<usize> = (0..len).map(|_| r.gen_range(0..alpha)).collect();
    let mut s = Slp::from_word(&word).unwrap();
    for _ in 0..r.gen_range(0..4) {
        let dup = s.concat(&s);
        if dup.expand(max_len).is_some() {
            s = dup;
        } else {
            break;
        }
    }
    s
}

/// Random word of length 1..=max over an alphabet of `alpha` letters.
pub fn random_word(r: &mut impl Rng, alpha: usize, max: usize) -> Vec<usize> {
    let len = r.gen_range(1..=max);
    (0..len).map(|_| r.gen_range(0..alpha)).collect()
}

fn rand_word_slp(r: &mut impl Rng, alpha: usize, max: usize) -> Slp {
    Slp::from_word(&random_word(r, alpha, max)).unwrap()
}

/// Random primitive form over `alpha` letters with component words of
/// length at most `max`.
pub fn random_primitive_form(r: &mut impl Rng, alpha: usize, max: usize) -> PrimitiveForm {
    match r.gen_range(0..5) {
        0 => PrimitiveForm::Finite(rand_word_slp(r, alpha, max)),
        1 => {
            let v = if r.gen_bool(0.5) { Some(rand_word_slp(r, alpha, max)) } else { None };
            PrimitiveForm::RightRay(v, rand_word_slp(r, alpha, max))
        }
        2 => {
            let v = if r.gen_bool(0.5) { Some(rand_word_slp(r, alpha, max)) } else { None };
            PrimitiveForm::LeftRay(rand_word_slp(r, alpha, max), v)
        }
        3 => {
            let v = if r.gen_bool(0.5) { Some(rand_word_slp(r, alpha, max)) } else { None };
            PrimitiveForm::BiRay(rand_word_slp(r, alpha, max), v, rand_word_slp(r, alpha, max))
        }
        _ => {
            let mut g = BTreeSet::new();
            g.insert(r.gen_range(0..alpha));
            for s in 0..alpha {
                if r.gen_bool(0.5) {
                    g.insert(s);
                }
            }
            PrimitiveForm::Uniform(g)
        }
    }
}

/// Random layered monotone circuit.
pub fn random_circuit(r: &mut impl Rng, max_layers: usize, max_gates: usize) -> LayeredCircuit {
    let depth = r.gen_range(1..=max_layers);
    let mut defs: Vec<GateDef> = Vec::new();
    let mut layers: Vec<(LayerKind, Vec<usize>)> = Vec::new();
    let mut prev: Vec<usize> = Vec::new();
    for li in 0..depth {
        let width = if li + 1 == depth { 1 } else { r.gen_range(1..=max_gates) };
        let kind = if li == 0 {
            LayerKind::Input
        } else if r.gen_bool(0.5) {
            LayerKind::And
        } else {
            LayerKind::Or
        };
        let mut ids = Vec::new();
        for _ in 0..width {
            let id = defs.len();
            let def = if li == 0 {
                GateDef::Const(r.gen_bool(0.5))
            } else {
                GateDef::Binary(prev[r.gen_range(0..prev.len())], prev[r.gen_range(0..prev.len())])
            };
            defs.push(def);
            ids.push(id);
        }
        layers.push((kind, ids.clone()));
        prev = ids;
    }
    LayeredCircuit::new(layers, defs).unwrap()
}

/// Random expression over the given variables (used for identity fillings).
pub fn random_expr(r: &mut impl Rng, alpha: usize, depth: usize) -> Expr {
    if depth == 0 || r.gen_bool(0.4) {
        return Expr::Symbol(r.gen_range(0..alpha));
    }
    match r.gen_range(0..4) {
        0 => {
            let n = r.gen_range(1..=3);
            Expr::concat((0..n).map(|_| random_expr(r, alpha, depth - 1)).collect())
        }
        1 => Expr::omega(random_expr(r, alpha, depth - 1)),
        2 => Expr::omega_bar(random_expr(r, alpha, depth - 1)),
        _ => {
            let n = r.gen_range(1..=2);
            Expr::shuffle((0..n).map(|_| random_expr(r, alpha, depth - 1)).collect())
        }
    }
}

/// A fresh SES with the given rhs over two letters.
pub fn ses_of(rhs: Vec<Expr>, alpha: usize) -> Ses {
    let names = (0..rhs.len()).map(|i| format!("V{i}")).collect();
    Ses::new(names, letters(alpha), rhs, Some(0)).unwrap()
}

/// Shuffle the state ids of a partitioned DFA (word-preserving renaming).
pub fn permute_pdfa(r: &mut impl Rng, p: &PartitionedDfa) -> PartitionedDfa {
    let n = p.dfa.state_count;
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = r.gen_range(0..=i);
        perm.swap(i, j);
    }
    let trans = p
        .dfa
        .transition_triples()
        .into_iter()
        .map(|(a, s, b)| (perm[a], s, perm[b]))
        .collect();
    let finals = p.dfa.finals.iter().map(|&q| perm[q]).collect();
    let dfa = Dfa::new(n, p.dfa.alphabet.clone(), trans, p.dfa.initial.map(|q| perm[q]), finals).unwrap();
    let color_of = p.color_of.iter().map(|(&q, &c)| (perm[q], c)).collect();
    PartitionedDfa::new(dfa, p.colors.clone(), color_of).unwrap()
}

/// Deterministic sub-seed derivation for independent streams.
pub fn subseed(seed: u64, tag: &str) -> u64 {
    let mut h = StdRng::seed_from_u64(seed ^ tag.bytes().fold(0u64, |a, b| a.wrapping_mul(131).wrapping_add(b as u64)));
    h.gen()
}
