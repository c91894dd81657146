//! Isomorphism of unordered regular trees `(L; <=pref)` presented by DFAs
//! or NFAs, via partition refinement over final states, plus canonical
//! codes for the finite trees presented by acyclic automata.

use crate::automata::{determinize, is_acyclic, scc_topological, Card, Dfa, Nfa, StateId};
use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// A partition of the final states; classes are ordered by smallest member
/// so class indices are deterministic across runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreePartition {
    pub classes: Vec<Vec<StateId>>,
    pub class_of: BTreeMap<StateId, usize>,
}

impl TreePartition {
    pub fn single(finals: &BTreeSet<StateId>) -> TreePartition {
        let classes = vec![finals.iter().copied().collect::<Vec<_>>()];
        let class_of = finals.iter().map(|&q| (q, 0)).collect();
        TreePartition { classes, class_of }
    }

    /// Build a partition from groups, normalizing class order.
    pub fn from_groups_pub(groups: Vec<Vec<StateId>>) -> TreePartition {
        Self::from_groups(groups)
    }

    fn from_groups(mut groups: Vec<Vec<StateId>>) -> TreePartition {
        for g in groups.iter_mut() {
            g.sort_unstable();
        }
        groups.sort_by_key(|g| g[0]);
        let mut class_of = BTreeMap::new();
        for (i, g) in groups.iter().enumerate() {
            for &q in g {
                class_of.insert(q, i);
            }
        }
        TreePartition { classes: groups, class_of }
    }
}

/// The DFA for `K(A,p,C)`: words labeling paths from `p` to a state of `c`
/// without intermediate final states. A fresh copy of `p` acts as initial
/// state; transitions leaving final states are removed.
pub fn k_automaton(a: &Dfa, p: StateId, c: &BTreeSet<StateId>) -> Dfa {
    let fresh = a.state_count;
    let mut transitions: Vec<(StateId, usize, StateId)> = Vec::new();
    for (q, m) in a.trans.iter().enumerate() {
        if !a.finals.contains(&q) {
            for (&sym, &r) in m {
                transitions.push((q, sym, r));
            }
        }
    }
    for (&sym, &r) in &a.trans[p] {
        transitions.push((fresh, sym, r));
    }
    Dfa::new(a.state_count + 1, a.alphabet.clone(), transitions, Some(fresh), c.clone())
        .expect("k_automaton preserves determinism")
}

/// Child-count matrix `n(p,q) = |K(A,p,{q})|` for all final `p`, `q`,
/// computed by one counting sweep per `p`.
pub fn child_count_matrix(a: &Dfa) -> BTreeMap<StateId, BTreeMap<StateId, Card>> {
    let finals: Vec<StateId> = a.finals.iter().copied().collect();
    let mut matrix = BTreeMap::new();
    for &p in &finals {
        let k = k_automaton(a, p, &a.finals);
        let row = count_to_finals(&k);
        matrix.insert(p, row);
    }
    matrix
}

/// For a DFA with initial state: the cardinality of the path language from
/// the initial state to each final state.
fn count_to_finals(a: &Dfa) -> BTreeMap<StateId, Card> {
    let q0 = a.initial.expect("count_to_finals requires an initial state");
    // reachable states
    let nfa = a.to_nfa();
    let reach = nfa.accessible();
    // states with infinitely many paths from q0: reachable from a reachable cycle
    let scc = scc_topological(&Dfa {
        state_count: a.state_count,
        alphabet: a.alphabet.clone(),
        trans: a
            .trans
            .iter()
            .enumerate()
            .map(|(q, m)| if reach[q] { m.clone() } else { BTreeMap::new() })
            .collect(),
        initial: a.initial,
        finals: a.finals.clone(),
    });
    let mut inf = vec![false; a.state_count];
    for (ci, comp) in scc.components.iter().enumerate() {
        if scc.cyclic[ci] && comp.iter().any(|&q| reach[q]) {
            for &q in comp {
                inf[q] = true;
            }
        }
    }
    // propagate "infinite" forward in topological order
    for comp in &scc.components {
        for &q in comp {
            if inf[q] && reach[q] {
                for (_, &r) in &a.trans[q] {
                    inf[r] = true;
                }
            }
        }
    }
    // count paths on the non-infinite part
    let mut paths: Vec<BigUint> = vec![BigUint::zero(); a.state_count];
    if !inf[q0] {
        paths[q0] = BigUint::one();
    }
    for comp in &scc.components {
        for &q in comp {
            if !reach[q] || inf[q] || paths[q].is_zero() {
                continue;
            }
            let from = paths[q].clone();
            for (_, &r) in &a.trans[q] {
                if !inf[r] {
                    paths[r] += &from;
                }
            }
        }
    }
    a.finals
        .iter()
        .map(|&f| {
            let card = if reach[f] && inf[f] {
                Card::Infinite
            } else if reach[f] {
                Card::Finite(paths[f].clone())
            } else {
                Card::zero()
            };
            (f, card)
        })
        .collect()
}

fn refine_with_matrix(
    matrix: &BTreeMap<StateId, BTreeMap<StateId, Card>>,
    r: &TreePartition,
) -> TreePartition {
    let mut groups: Vec<Vec<StateId>> = Vec::new();
    for class in &r.classes {
        let mut by_profile: BTreeMap<Vec<String>, Vec<StateId>> = BTreeMap::new();
        for &p in class {
            let profile: Vec<String> = r
                .classes
                .iter()
                .map(|c| {
                    let mut total = Card::zero();
                    for &q in c {
                        total = total.add(&matrix[&p][&q]);
                    }
                    total.to_string()
                })
                .collect();
            by_profile.entry(profile).or_default().push(p);
        }
        groups.extend(by_profile.into_values());
    }
    TreePartition::from_groups(groups)
}

/// One refinement step: split classes by the per-class child counts
/// `n(p,C)`. Never merges classes.
pub fn refine_step(a: &Dfa, r: &TreePartition) -> TreePartition {
    let matrix = child_count_matrix(a);
    refine_with_matrix(&matrix, r)
}

/// The subtree-isomorphism partition: refine from the trivial partition of
/// the final states to the fixpoint.
pub fn iso_partition(a: &Dfa) -> TreePartition {
    let matrix = child_count_matrix(a);
    let mut part = TreePartition::single(&a.finals);
    for _round in 0..a.finals.len().max(1) {
        let next = refine_with_matrix(&matrix, &part);
        let stable = next == part;
        part = next;
        if stable {
            break;
        }
    }
    part
}

/// Disjoint union of two trimmed DFAs over the united alphabet; returns the
/// union (without initial state) and the two shifted initial states.
pub fn disjoint_union(a1: &Dfa, a2: &Dfa) -> (Dfa, StateId, StateId) {
    let (alpha, map2) = a1.alphabet.union(&a2.alphabet);
    let shift = a1.state_count;
    let mut transitions = a1.transition_triples();
    for (p, s, q) in a2.transition_triples() {
        transitions.push((p + shift, map2[s], q + shift));
    }
    let mut finals = a1.finals.clone();
    for &q in &a2.finals {
        finals.insert(q + shift);
    }
    let union = Dfa::new(a1.state_count + a2.state_count, alpha, transitions, None, finals)
        .expect("disjoint union preserves determinism");
    (union, a1.initial.expect("trimmed automaton with language"), a2.initial.unwrap() + shift)
}

fn require_epsilon(a: &Dfa, which: &str) -> Result<Dfa> {
    let t = a.trim();
    match t.initial {
        Some(q0) if t.finals.contains(&q0) => Ok(t),
        _ => Err(Error::InvalidInput(format!(
            "{which}: the empty word must be accepted (the tree needs a root)"
        ))),
    }
}

/// Does `(L(a1); <=pref) ~ (L(a2); <=pref)` hold? Both languages must
/// contain the empty word.
pub fn tree_iso_dfa(a1: &Dfa, a2: &Dfa) -> Result<bool> {
    let t1 = require_epsilon(a1, "left input")?;
    let t2 = require_epsilon(a2, "right input")?;
    let (union, i1, i2) = disjoint_union(&t1, &t2);
    let part = iso_partition(&union);
    Ok(part.class_of[&i1] == part.class_of[&i2])
}

/// NFA variant: determinize (with cap) and decide on the DFAs.
pub fn tree_iso_nfa(a1: &Nfa, a2: &Nfa, cap: usize) -> Result<bool> {
    let d1 = determinize(a1, cap)?;
    let d2 = determinize(a2, cap)?;
    tree_iso_dfa(&d1, &d2)
}

/// Canonical code of the finite tree presented by an acyclic automaton:
/// recursively `(` + sorted child codes + `)`. Two acyclic automata present
/// isomorphic trees iff their codes are equal.
pub fn finite_tree_canon(a: &Nfa, cap: usize) -> Result<String> {
    let t = a.trim();
    match t.initial {
        Some(q0) if t.finals.contains(&q0) => {}
        _ => {
            return Err(Error::InvalidInput("tree-canon: the empty word must be accepted".into()));
        }
    }
    if !is_acyclic(&t) {
        return Err(Error::InvalidInput("tree-canon requires an acyclic automaton".into()));
    }
    let words = enumerate_words_capped(&t, cap)?;
    Ok(canon_of_language(&words))
}

/// All accepted words of a trimmed acyclic NFA, failing if more than `cap`.
fn enumerate_words_capped(a: &Nfa, cap: usize) -> Result<Vec<Vec<usize>>> {
    let max_len = a.state_count.saturating_sub(1);
    let mut out: Vec<Vec<usize>> = Vec::new();
    let q0 = a.initial.unwrap();
    let mut stack: Vec<(Vec<usize>, BTreeSet<StateId>)> = vec![(Vec::new(), BTreeSet::from([q0]))];
    while let Some((w, set)) = stack.pop() {
        if set.iter().any(|q| a.finals.contains(q)) {
            out.push(w.clone());
            if out.len() > cap {
                return Err(Error::ResourceLimit(format!(
                    "tree expansion exceeded {cap} nodes (see --cap)"
                )));
            }
        }
        if w.len() == max_len {
            continue;
        }
        for sym in 0..a.alphabet.len() {
            let mut next = BTreeSet::new();
            for &p in &set {
                for (b, q) in a.out(p) {
                    if b == sym {
                        next.insert(q);
                    }
                }
            }
            if !next.is_empty() {
                let mut w2 = w.clone();
                w2.push(sym);
                stack.push((w2, next));
            }
        }
    }
    Ok(out)
}

/// AHU canonical code of the finite prefix tree over an explicit language
/// containing the empty word.
pub fn canon_of_language(words: &[Vec<usize>]) -> String {
    let mut sorted: Vec<&Vec<usize>> = words.iter().collect();
    sorted.sort();
    sorted.dedup();
    let index: HashMap<&[usize], usize> = sorted.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); sorted.len()];
    for (i, w) in sorted.iter().enumerate() {
        if w.is_empty() {
            continue;
        }
        // parent: longest proper prefix that is a tree node
        let mut k = w.len() - 1;
        loop {
            if let Some(&pi) = index.get(&w[..k]) {
                children[pi].push(i);
                break;
            }
            k -= 1;
        }
    }
    fn code(node: usize, children: &[Vec<usize>]) -> String {
        let mut parts: Vec<String> = children[node].iter().map(|&c| code(c, children)).collect();
        parts.sort();
        format!("({})", parts.concat())
    }
    let root = index[&[][..]];
    code(root, &children)
}

/// Ordered canonical code: children appear in lexicographic sibling order
/// instead of sorted code order. Reference oracle for ordered tree tests.
pub fn ordered_canon_of_language(words: &[Vec<usize>]) -> String {
    let mut sorted: Vec<&Vec<usize>> = words.iter().collect();
    sorted.sort();
    sorted.dedup();
    let index: HashMap<&[usize], usize> = sorted.iter().enumerate().map(|(i, w)| (w.as_slice(), i)).collect();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); sorted.len()];
    for (i, w) in sorted.iter().enumerate() {
        if w.is_empty() {
            continue;
        }
        let mut k = w.len() - 1;
        loop {
            if let Some(&pi) = index.get(&w[..k]) {
                children[pi].push(i);
                break;
            }
            k -= 1;
        }
    }
    // children of each node are already in lexicographic order because the
    // words are sorted and children are appended in that order
    fn code(node: usize, children: &[Vec<usize>]) -> String {
        let parts: Vec<String> = children[node].iter().map(|&c| code(c, children)).collect();
        format!("({})", parts.concat())
    }
    let root = index[&[][..]];
    code(root, &children)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Alphabet;

    fn dfa(n: usize, alpha: &[&str], trans: &[(usize, &str, usize)], init: usize, finals: &[usize]) -> Dfa {
        let a = Alphabet::new(alpha.iter().copied()).unwrap();
        let ts = trans
            .iter()
            .map(|&(p, s, q)| (p, a.id_of(s).unwrap(), q))
            .collect();
        Dfa::new(n, a, ts, Some(init), finals.iter().copied().collect()).unwrap()
    }

    #[test]
    fn k_automaton_examples() {
        // finals {0,1}: 0 -a-> 1, 0 -b-> 1  =>  K(A,0,{1}) = {a,b}
        let a = dfa(2, &["a", "b"], &[(0, "a", 1), (0, "b", 1)], 0, &[0, 1]);
        let k = k_automaton(&a, 0, &BTreeSet::from([1]));
        let words = k.words_up_to(3);
        assert_eq!(words, vec![vec![0], vec![1]]);
        // K(A, p, {}) = empty
        let k0 = k_automaton(&a, 0, &BTreeSet::new());
        assert_eq!(crate::automata::count_language(&k0), Card::zero());
        // no outgoing transitions
        let k1 = k_automaton(&a, 1, &BTreeSet::from([0, 1]));
        assert_eq!(crate::automata::count_language(&k1), Card::zero());
    }

    #[test]
    fn refine_step_splits_by_counts() {
        // finals {0,1}; 0 has two children of type 1, state 1 is a sink leaf
        let a = dfa(2, &["a", "b"], &[(0, "a", 1), (0, "b", 1)], 0, &[0, 1]);
        let r0 = TreePartition::single(&a.finals);
        let r1 = refine_step(&a, &r0);
        assert_eq!(r1.classes, vec![vec![0], vec![1]]);
        // fixpoint stays
        let r2 = refine_step(&a, &r1);
        assert_eq!(r2, r1);
    }

    #[test]
    fn refine_full_binary_tree_single_class() {
        let a = dfa(1, &["a", "b"], &[(0, "a", 0), (0, "b", 0)], 0, &[0]);
        let r1 = refine_step(&a, &TreePartition::single(&a.finals));
        assert_eq!(r1.classes.len(), 1);
    }

    #[test]
    fn tree_iso_full_binary_relabels() {
        let a = dfa(1, &["a", "b"], &[(0, "a", 0), (0, "b", 0)], 0, &[0]);
        let b = dfa(1, &["c", "d"], &[(0, "c", 0), (0, "d", 0)], 0, &[0]);
        assert!(tree_iso_dfa(&a, &b).unwrap());
    }

    #[test]
    fn tree_iso_distinguishes_shapes() {
        // {ε,a,b}: root with two children; {ε,a,aa}: a path
        let a = dfa(2, &["a", "b"], &[(0, "a", 1), (0, "b", 1)], 0, &[0, 1]);
        let b = dfa(3, &["a", "b"], &[(0, "a", 1), (1, "a", 2)], 0, &[0, 1, 2]);
        assert!(!tree_iso_dfa(&a, &b).unwrap());
    }

    #[test]
    fn tree_iso_omega_chains() {
        let a = dfa(1, &["a"], &[(0, "a", 0)], 0, &[0]);
        let b = dfa(1, &["b"], &[(0, "b", 0)], 0, &[0]);
        assert!(tree_iso_dfa(&a, &b).unwrap());
    }

    #[test]
    fn tree_iso_requires_epsilon() {
        let a = dfa(2, &["a"], &[(0, "a", 1)], 0, &[1]);
        let b = dfa(1, &["a"], &[], 0, &[0]);
        assert!(matches!(tree_iso_dfa(&a, &b), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn canon_examples() {
        use crate::automata::Nfa;
        let eps = Nfa::new(1, Alphabet::new(["a"]).unwrap(), vec![], Some(0), BTreeSet::from([0])).unwrap();
        assert_eq!(finite_tree_canon(&eps, 1000).unwrap(), "()");
        // {ε, a, b}
        let two = dfa(2, &["a", "b"], &[(0, "a", 1), (0, "b", 1)], 0, &[0, 1]).to_nfa();
        assert_eq!(finite_tree_canon(&two, 1000).unwrap(), "(()())");
        // {ε, a, ab}
        let path = dfa(3, &["a", "b"], &[(0, "a", 1), (1, "b", 2)], 0, &[0, 1, 2]).to_nfa();
        assert_eq!(finite_tree_canon(&path, 1000).unwrap(), "((()))");
    }

    #[test]
    fn tree_iso_nfa_of_determinization() {
        let a = dfa(2, &["a", "b"], &[(0, "a", 1), (0, "b", 1), (1, "a", 0)], 0, &[0, 1]).to_nfa();
        let d = determinize(&a, 1 << 16).unwrap();
        assert!(tree_iso_nfa(&a, &d.to_nfa(), 1 << 16).unwrap());
    }
}
