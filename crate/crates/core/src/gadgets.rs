//! Generators for the classic reduction instances: boolean-formula tree
//! gadgets built with a fixed pair of rational transducers, circuit-to-tree
//! dags, circuit-to-expression systems over a unary alphabet, and the
//! density gadget that ties lexicographic order isomorphism to NFA
//! universality. Used both as a corpus tool and as end-to-end oracles for
//! the deciders.

use crate::automata::{Alphabet, Dfa, Nfa, RationalTransducer, StateId, SymId};
use crate::error::{Error, Result};
use crate::isocore::{GateDef, LayerKind, LayeredCircuit};
use crate::words::{Expr, Ses};
use std::collections::{BTreeMap, BTreeSet};

/// The seven-symbol alphabet of boolean-formula trees:
/// `a`, and left/left-leaf/right markers for both gate kinds.
pub fn omega_alphabet() -> Alphabet {
    Alphabet::new(["a", "l_and", "lp_and", "r_and", "l_or", "lp_or", "r_or"]).unwrap()
}

/// Output alphabet of the formula transducers.
pub fn lr_alphabet() -> Alphabet {
    Alphabet::new(["l", "r"]).unwrap()
}

/// The two rational transducers turning a formula tree into a pair of
/// plain `{l,r}` trees; they differ only in their initial state. All states
/// are final. `which` selects the initial state (1 or 2).
pub fn formula_transducer(which: u8) -> RationalTransducer {
    let omega = omega_alphabet();
    let lr = lr_alphabet();
    let s = |t: &str| omega.id_of(t).unwrap();
    let l = lr.id_of("l").unwrap();
    let r = lr.id_of("r").unwrap();
    let (q1, q2, sink) = (0, 1, 2);
    let mut trans: Vec<(StateId, SymId, Vec<SymId>, StateId)> = Vec::new();
    for q in [q1, q2] {
        trans.push((q, s("l_and"), vec![l], q));
        trans.push((q, s("r_and"), vec![r, l], q));
        trans.push((q, s("r_or"), vec![r, r, l], q));
        trans.push((q, s("lp_or"), vec![l, l], sink));
        trans.push((q, s("lp_or"), vec![r, l, l], sink));
        trans.push((q, s("lp_and"), vec![l], sink));
        trans.push((q, s("a"), vec![l, l, l], sink));
    }
    trans.push((q1, s("l_or"), vec![l, l], q1));
    trans.push((q1, s("l_or"), vec![r, l], q2));
    trans.push((q1, s("r_or"), vec![l, r, l], q2));
    trans.push((q2, s("l_or"), vec![r, l], q2));
    trans.push((q2, s("l_or"), vec![l, l], q1));
    trans.push((q2, s("r_or"), vec![l, r, l], q1));
    trans.push((q2, s("a"), vec![l, r], sink));
    let initial = match which {
        1 => q1,
        2 => q2,
        _ => panic!("transducer 1 or 2"),
    };
    RationalTransducer::new(3, omega, lr, trans, Some(initial), [q1, q2, sink].into_iter().collect())
        .expect("fixed transducer is valid")
}

/// `T = {eps} u l_kind L(u) u r_kind L(v)` as a prefix-closed NFA, followed
/// by both transducer images. The resulting pair is isomorphic exactly when
/// the OR (resp. AND) of the operand pairs' isomorphisms holds.
pub fn boolean_tree_gadget(u: &Nfa, v: &Nfa, and_kind: bool) -> Result<(Nfa, Nfa)> {
    let omega = omega_alphabet();
    for (x, which) in [(u, "left"), (v, "right")] {
        if !x.is_prefix_closed() || x.initial.is_none() {
            return Err(Error::InvalidInput(format!(
                "{which} operand must be a prefix-closed NFA with initial state"
            )));
        }
        if x.alphabet != omega {
            return Err(Error::InvalidInput(format!("{which} operand must use the formula alphabet")));
        }
    }
    let (lsym, rsym) = if and_kind {
        (omega.id_of("l_and").unwrap(), omega.id_of("r_and").unwrap())
    } else {
        (omega.id_of("l_or").unwrap(), omega.id_of("r_or").unwrap())
    };
    // fresh root, then shifted copies of u and v
    let off_u = 1;
    let off_v = 1 + u.state_count;
    let n = 1 + u.state_count + v.state_count;
    let mut trans: Vec<(StateId, SymId, StateId)> = vec![
        (0, lsym, off_u + u.initial.unwrap()),
        (0, rsym, off_v + v.initial.unwrap()),
    ];
    for &(p, a, q) in &u.transitions {
        trans.push((p + off_u, a, q + off_u));
    }
    for &(p, a, q) in &v.transitions {
        trans.push((p + off_v, a, q + off_v));
    }
    let finals: BTreeSet<StateId> = (0..n).collect();
    let t = Nfa::new(n, omega, trans, Some(0), finals)?;
    let t1 = crate::automata::transducer_image(&t, &formula_transducer(1))?;
    let t2 = crate::automata::transducer_image(&t, &formula_transducer(2))?;
    Ok((t1, t2))
}

/// A `true` operand: an OR node with a true constant input,
/// `{eps, lp_or, a, r_or}`. Its own image pair is isomorphic whatever
/// follows, so it acts as a true subformula in compositions.
pub fn true_leaf() -> Nfa {
    let omega = omega_alphabet();
    let lp_or = omega.id_of("lp_or").unwrap();
    let a = omega.id_of("a").unwrap();
    let r_or = omega.id_of("r_or").unwrap();
    Nfa::new(
        4,
        omega,
        vec![(0, lp_or, 1), (0, a, 2), (0, r_or, 3)],
        Some(0),
        [0, 1, 2, 3].into_iter().collect(),
    )
    .unwrap()
}

/// A `false` operand: an AND node with a false constant input,
/// `{eps, lp_and, a, r_and}`; its image pair is never isomorphic.
pub fn false_leaf() -> Nfa {
    let omega = omega_alphabet();
    let lp_and = omega.id_of("lp_and").unwrap();
    let a = omega.id_of("a").unwrap();
    let r_and = omega.id_of("r_and").unwrap();
    Nfa::new(
        4,
        omega,
        vec![(0, lp_and, 1), (0, a, 2), (0, r_and, 3)],
        Some(0),
        [0, 1, 2, 3].into_iter().collect(),
    )
    .unwrap()
}

/// Shared-node dag under construction for the circuit-to-tree reduction.
struct Dag {
    children: Vec<Vec<usize>>,
}

impl Dag {
    fn node(&mut self, children: Vec<usize>) -> usize {
        self.children.push(children);
        self.children.len() - 1
    }
}

/// Two prefix-closed acyclic DFAs whose unfoldings are the gate-gadget
/// trees of the monotone circuit value reduction: the unfoldings at the two
/// output-gate nodes are isomorphic iff the circuit evaluates to true.
pub fn circuit_to_tree_dags(c: &LayeredCircuit) -> Result<(Dfa, Dfa)> {
    let mut dag = Dag { children: Vec::new() };
    // per gate: the two representative nodes
    let mut rep: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    let leaf_a = dag.node(vec![]);
    let leaf_b = dag.node(vec![]);
    for (kind, gates) in &c.layers {
        for &g in gates {
            let pair = match (c.defs[g], kind) {
                (GateDef::Const(true), _) => {
                    // both sides the same node: a root with two leaf children
                    let t = dag.node(vec![leaf_a, leaf_b]);
                    (t, t)
                }
                (GateDef::Const(false), _) => {
                    let t1 = dag.node(vec![leaf_a, leaf_b]);
                    let mid = dag.node(vec![leaf_a]);
                    let t2 = dag.node(vec![leaf_a, mid]);
                    (t1, t2)
                }
                (GateDef::Binary(x, y), LayerKind::And) => {
                    let (x1, x2) = rep[&x];
                    let (y1, y2) = rep[&y];
                    let m1 = dag.node(vec![y1]);
                    let t1 = dag.node(vec![x1, m1]);
                    let m2 = dag.node(vec![y2]);
                    let t2 = dag.node(vec![x2, m2]);
                    (t1, t2)
                }
                (GateDef::Binary(x, y), LayerKind::Or) => {
                    let (x1, x2) = rep[&x];
                    let (y1, y2) = rep[&y];
                    // first tree: children {x1, .->y2} and {x2, .->y1}
                    let m = dag.node(vec![y2]);
                    let c1 = dag.node(vec![x1, m]);
                    let m = dag.node(vec![y1]);
                    let c2 = dag.node(vec![x2, m]);
                    let t1 = dag.node(vec![c1, c2]);
                    // second tree: children {x1, .->y1} and {x2, .->y2}
                    let m = dag.node(vec![y1]);
                    let d1 = dag.node(vec![x1, m]);
                    let m = dag.node(vec![y2]);
                    let d2 = dag.node(vec![x2, m]);
                    let t2 = dag.node(vec![d1, d2]);
                    (t1, t2)
                }
                _ => unreachable!("validated circuit"),
            };
            rep.insert(g, pair);
        }
    }
    let (o1, o2) = rep[&c.output_gate()];
    // label edges by child position
    let alphabet = Alphabet::new(["0", "1"]).unwrap();
    let n = dag.children.len();
    let mut trans: Vec<(StateId, SymId, StateId)> = Vec::new();
    for (p, ch) in dag.children.iter().enumerate() {
        for (i, &q) in ch.iter().enumerate() {
            trans.push((p, i, q));
        }
    }
    let finals: BTreeSet<StateId> = (0..n).collect();
    let d1 = Dfa::new(n, alphabet.clone(), trans.clone(), Some(o1), finals.clone())?;
    let d2 = Dfa::new(n, alphabet, trans, Some(o2), finals)?;
    Ok((d1.trim(), d2.trim()))
}

/// Expression-system form of the circuit value reduction over the unary
/// alphabet: returns the system together with the output-gate test variable
/// and the top-layer reference variable; they are isomorphic iff the
/// circuit evaluates to true.
pub fn circuit_to_ses(c: &LayeredCircuit) -> Result<(Ses, usize, usize)> {
    let alphabet = Alphabet::new(["a"]).unwrap();
    let mut names: Vec<String> = Vec::new();
    let mut rhs: Vec<Expr> = Vec::new();
    let add = |name: String, e: Expr, names: &mut Vec<String>, rhs: &mut Vec<Expr>| -> usize {
        names.push(name);
        rhs.push(e);
        rhs.len() - 1
    };
    let depth = c.layers.len();
    // omega_d vars: d copies of a^omega concatenated, built as a chain
    let mut omega_d: Vec<usize> = Vec::new();
    for d in 1..depth.max(1) {
        let aw = Expr::omega(Expr::Symbol(0));
        let e = if d == 1 {
            aw
        } else {
            Expr::concat(vec![Expr::Var(omega_d[d - 2]), aw])
        };
        let id = add(format!("w{d}"), e, &mut names, &mut rhs);
        omega_d.push(id);
    }
    let prefixed = |d: usize, target: Expr, omega_d: &[usize]| -> Expr {
        // omega*d + target
        Expr::concat(vec![Expr::Var(omega_d[d - 1]), target])
    };
    let mut good: Vec<usize> = Vec::new(); // per layer index (0-based)
    let mut bad: Vec<usize> = Vec::new();
    let mut test: BTreeMap<usize, usize> = BTreeMap::new();
    for (li, (kind, gates)) in c.layers.iter().enumerate() {
        if li == 0 {
            let g = add("good1".into(), Expr::Symbol(0), &mut names, &mut rhs);
            let b = add(
                "bad1".into(),
                Expr::concat(vec![Expr::Symbol(0), Expr::Symbol(0)]),
                &mut names,
                &mut rhs,
            );
            good.push(g);
            bad.push(b);
            for &gate in gates {
                let GateDef::Const(val) = c.defs[gate] else { unreachable!() };
                let e = if val {
                    Expr::Symbol(0)
                } else {
                    Expr::concat(vec![Expr::Symbol(0), Expr::Symbol(0)])
                };
                let id = add(format!("t{gate}"), e, &mut names, &mut rhs);
                test.insert(gate, id);
            }
            continue;
        }
        let d = li; // previous layer index, 1-based depth
        let (g_prev, b_prev) = (good[li - 1], bad[li - 1]);
        let (g_e, b_e) = match kind {
            LayerKind::And => (
                Expr::shuffle(vec![prefixed(d, Expr::Var(g_prev), &omega_d)]),
                Expr::shuffle(vec![
                    prefixed(d, Expr::Var(g_prev), &omega_d),
                    prefixed(d, Expr::Var(b_prev), &omega_d),
                ]),
            ),
            LayerKind::Or => (
                Expr::shuffle(vec![
                    prefixed(d, Expr::Var(g_prev), &omega_d),
                    prefixed(d, Expr::Var(b_prev), &omega_d),
                ]),
                Expr::shuffle(vec![prefixed(d, Expr::Var(b_prev), &omega_d)]),
            ),
            LayerKind::Input => unreachable!("validated circuit"),
        };
        let g = add(format!("good{}", li + 1), g_e, &mut names, &mut rhs);
        let b = add(format!("bad{}", li + 1), b_e, &mut names, &mut rhs);
        good.push(g);
        bad.push(b);
        for &gate in gates {
            let GateDef::Binary(x, y) = c.defs[gate] else { unreachable!() };
            let third = match kind {
                LayerKind::And => g_prev,
                LayerKind::Or => b_prev,
                LayerKind::Input => unreachable!(),
            };
            let e = Expr::shuffle(vec![
                prefixed(d, Expr::Var(test[&x]), &omega_d),
                prefixed(d, Expr::Var(test[&y]), &omega_d),
                prefixed(d, Expr::Var(third), &omega_d),
            ]);
            let id = add(format!("t{gate}"), e, &mut names, &mut rhs);
            test.insert(gate, id);
        }
    }
    let out_test = test[&c.output_gate()];
    let out_good = good[depth - 1];
    let ses = Ses::new(names, alphabet, rhs, Some(out_test))?;
    Ok((ses, out_test, out_good))
}

/// The density gadget: an NFA over `$1 < 0 < 1 < $2 < a < b` accepting
/// `{a,b}*b$1  u  L(k) b {0,1}*1  u  {a,b}*b$2`, whose lexicographic order
/// is the rational order iff `L(k) = {a,b}*`.
pub fn eta_universality_gadget(k: &Nfa) -> Result<Nfa> {
    let expected = Alphabet::new(["a", "b"]).unwrap();
    if k.alphabet != expected {
        return Err(Error::InvalidInput("the gadget input must be an NFA over the alphabet `a b`".into()));
    }
    let k0 = k
        .initial
        .ok_or_else(|| Error::InvalidInput("the gadget input needs an initial state".into()))?;
    let sigma = Alphabet::new(["$1", "0", "1", "$2", "a", "b"]).unwrap();
    let (d1, zero, one, d2, a, b) = (0, 1, 2, 3, 4, 5);
    // a fresh start state that is never re-entered, so the three branches
    // stay separate after the first step
    let start = 0;
    let looping = 1; // {a,b}* loop of the two marker branches
    let pre = 2;
    let fin1 = 3;
    let fin3 = 4;
    let koff = 5;
    let tail0 = koff + k.state_count; // {0,1}-loop state
    let fin2 = tail0 + 1;
    let n = fin2 + 1;
    let mut trans: Vec<(StateId, SymId, StateId)> = vec![
        (looping, a, looping),
        (looping, b, looping),
        (looping, b, pre),
        (pre, d1, fin1),
        (pre, d2, fin3),
        (tail0, zero, tail0),
        (tail0, one, tail0),
        (tail0, one, fin2),
    ];
    for &(p, s, q) in &k.transitions {
        let sym = if s == 0 { a } else { b };
        trans.push((p + koff, sym, q + koff));
    }
    // entering the {0,1}*1 tail: from every final state of k via b
    for &f in &k.finals {
        trans.push((f + koff, b, tail0));
    }
    // start behaves like the union of the branch initial states
    trans.push((start, a, looping));
    trans.push((start, b, looping));
    trans.push((start, b, pre));
    for &(p, s, q) in &k.transitions {
        if p == k0 {
            let sym = if s == 0 { a } else { b };
            trans.push((start, sym, q + koff));
        }
    }
    if k.finals.contains(&k0) {
        trans.push((start, b, tail0));
    }
    let finals: BTreeSet<StateId> = [fin1, fin2, fin3].into_iter().collect();
    let nfa = Nfa::new(n, sigma, trans, Some(start), finals)?;
    Ok(nfa.trim())
}

/// Reference automaton for the rational order: `{0,1}*1` over `0 < 1`.
pub fn eta_order_dfa() -> Dfa {
    let alphabet = Alphabet::new(["0", "1"]).unwrap();
    Dfa::new(
        2,
        alphabet,
        vec![(0, 0, 0), (0, 1, 1), (1, 0, 0), (1, 1, 1)],
        Some(0),
        [1].into_iter().collect(),
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isocore::{order_iso, parse_circuit};
    use crate::treeiso::{tree_iso_dfa, tree_iso_nfa};

    #[test]
    fn transducer_matches_figure_example() {
        // T({eps, lp_and}) through state q1: image of lp_and is {l}
        let t1 = formula_transducer(1);
        let omega = omega_alphabet();
        let word = vec![omega.id_of("lp_and").unwrap()];
        let images = t1.images(&word);
        assert_eq!(images.into_iter().collect::<Vec<_>>(), vec![vec![0]]);
        // a through q2 has two images: lll and lr
        let t2 = formula_transducer(2);
        let images2 = t2.images(&[omega.id_of("a").unwrap()]);
        assert_eq!(images2.len(), 2);
    }

    #[test]
    fn leaf_gadgets() {
        // true leaf under OR: isomorphic pair; false leaf under AND: not
        let (x1, x2) = boolean_tree_gadget(&true_leaf(), &true_leaf(), false).unwrap();
        assert!(tree_iso_nfa(&x1, &x2, 1 << 16).unwrap());
        let (y1, y2) = boolean_tree_gadget(&false_leaf(), &true_leaf(), true).unwrap();
        assert!(!tree_iso_nfa(&y1, &y2, 1 << 16).unwrap());
    }

    #[test]
    fn nested_formula_matches_truth_table() {
        // two-level formulas over the four leaf/kind combinations
        for (lv, rv) in [(false, true), (true, true), (false, false)] {
            let leaf = |b: bool| if b { true_leaf() } else { false_leaf() };
            let inner = t_tree(&leaf(lv), &leaf(rv), true);
            let (i1, i2) = images(&inner);
            assert_eq!(tree_iso_nfa(&i1, &i2, 1 << 16).unwrap(), lv && rv, "and({lv},{rv})");
            let outer = t_tree(&inner, &leaf(rv), false);
            let (o1, o2) = images(&outer);
            assert_eq!(
                tree_iso_nfa(&o1, &o2, 1 << 16).unwrap(),
                (lv && rv) || rv,
                "or(and({lv},{rv}),{rv})"
            );
        }
    }

    fn t_tree(u: &Nfa, v: &Nfa, and_kind: bool) -> Nfa {
        let omega = omega_alphabet();
        let (lsym, rsym) = if and_kind {
            (omega.id_of("l_and").unwrap(), omega.id_of("r_and").unwrap())
        } else {
            (omega.id_of("l_or").unwrap(), omega.id_of("r_or").unwrap())
        };
        let off_u = 1;
        let off_v = 1 + u.state_count;
        let n = 1 + u.state_count + v.state_count;
        let mut trans = vec![
            (0, lsym, off_u + u.initial.unwrap()),
            (0, rsym, off_v + v.initial.unwrap()),
        ];
        for &(p, a, q) in &u.transitions {
            trans.push((p + off_u, a, q + off_u));
        }
        for &(p, a, q) in &v.transitions {
            trans.push((p + off_v, a, q + off_v));
        }
        Nfa::new(n, omega, trans, Some(0), (0..n).collect()).unwrap()
    }

    fn images(t: &Nfa) -> (Nfa, Nfa) {
        (
            crate::automata::transducer_image(t, &formula_transducer(1)).unwrap(),
            crate::automata::transducer_image(t, &formula_transducer(2)).unwrap(),
        )
    }

    #[test]
    fn circuit_tree_dags_match_evaluation() {
        let t = parse_circuit("layer 1 input\ngate 0 = true\n").unwrap();
        let (d1, d2) = circuit_to_tree_dags(&t).unwrap();
        assert!(tree_iso_dfa(&d1, &d2).unwrap());
        let f = parse_circuit("layer 1 input\ngate 0 = false\n").unwrap();
        let (e1, e2) = circuit_to_tree_dags(&f).unwrap();
        assert!(!tree_iso_dfa(&e1, &e2).unwrap());
        let c = parse_circuit(
            "layer 1 input\ngate 0 = true\ngate 1 = false\nlayer 2 or\ngate 2 = 0 1\ngate 3 = 1 1\nlayer 3 and\ngate 4 = 2 3\n",
        )
        .unwrap();
        let (c1, c2) = circuit_to_tree_dags(&c).unwrap();
        assert_eq!(tree_iso_dfa(&c1, &c2).unwrap(), c.evaluate());
    }

    #[test]
    fn circuit_ses_matches_evaluation() {
        for (text, _) in [
            ("layer 1 input\ngate 0 = true\n", true),
            ("layer 1 input\ngate 0 = false\n", false),
            (
                "layer 1 input\ngate 0 = true\ngate 1 = false\nlayer 2 or\ngate 2 = 0 1\ngate 3 = 1 1\nlayer 3 and\ngate 4 = 2 3\n",
                false,
            ),
            (
                "layer 1 input\ngate 0 = true\ngate 1 = true\nlayer 2 and\ngate 2 = 0 1\ngate 3 = 0 0\nlayer 3 or\ngate 4 = 2 3\n",
                true,
            ),
        ] {
            let c = parse_circuit(text).unwrap();
            let (ses, tv, gv) = circuit_to_ses(&c).unwrap();
            assert_eq!(
                crate::isocore::ses_iso(&ses, tv, gv).unwrap(),
                c.evaluate(),
                "mismatch for {text}"
            );
        }
    }

    #[test]
    fn eta_gadget_universal_and_not() {
        let ab = Alphabet::new(["a", "b"]).unwrap();
        // universal: one state accepting everything
        let uni = Nfa::new(1, ab.clone(), vec![(0, 0, 0), (0, 1, 0)], Some(0), [0].into_iter().collect()).unwrap();
        let g = eta_universality_gadget(&uni).unwrap();
        let d = crate::automata::determinize(&g, 1 << 16).unwrap();
        assert!(order_iso(&d, &eta_order_dfa()).unwrap());
        // missing the word `ab`: not dense
        let not_ab = Nfa::new(
            4,
            ab.clone(),
            vec![
                (0, 0, 1),
                (0, 1, 3),
                (1, 0, 3),
                (1, 1, 2),
                (2, 0, 3),
                (2, 1, 3),
                (3, 0, 3),
                (3, 1, 3),
            ],
            Some(0),
            [0, 1, 3].into_iter().collect(),
        )
        .unwrap();
        let g2 = eta_universality_gadget(&not_ab).unwrap();
        let d2 = crate::automata::determinize(&g2, 1 << 16).unwrap();
        assert!(!order_iso(&d2, &eta_order_dfa()).unwrap());
        // empty language: not dense either
        let empty = Nfa::new(1, ab, vec![], Some(0), BTreeSet::new()).unwrap();
        let g3 = eta_universality_gadget(&empty).unwrap();
        let d3 = crate::automata::determinize(&g3, 1 << 16).unwrap();
        assert!(!order_iso(&d3, &eta_order_dfa()).unwrap());
    }
}
