//! From a partitioned DFA to an equivalent succinct expression system:
//! every state becomes a variable, strongly connected components are
//! eliminated starting with the maximal ones, and a cyclic component turns
//! each of its states into `l_p [T]^eta r_p`, where `l_p` and `r_p` wrap up
//! the leftmost and rightmost descents and `T` collects the dense middle
//! contributions between consecutive component subtrees.

use crate::automata::{scc_topological, Alphabet, PartitionedDfa, StateId};
use crate::error::{Error, Result};
use crate::words::{Expr, Ses, VarId};
use std::collections::BTreeSet;

/// Make every final state a dead end: a fresh `$`-successor per final state
/// carries its color, with `$` ordered before every other symbol. The
/// defined regular word is unchanged up to isomorphism.
pub fn dead_end_transform(a: &PartitionedDfa) -> Result<PartitionedDfa> {
    let t = a.trim();
    if t.dfa.initial.is_none() || t.dfa.state_count == 0 {
        return Err(Error::EmptyLanguage("the automaton defines no word".into()));
    }
    let n = t.dfa.state_count;
    let mut symbols: Vec<String> = vec!["$".to_string()];
    symbols.extend(t.dfa.alphabet.symbols().map(str::to_string));
    let alphabet = Alphabet::new(symbols)?;
    let mut transitions: Vec<(StateId, usize, StateId)> = t
        .dfa
        .transition_triples()
        .into_iter()
        .map(|(p, s, q)| (p, s + 1, q))
        .collect();
    let finals: Vec<StateId> = t.dfa.finals.iter().copied().collect();
    let mut color_of = std::collections::BTreeMap::new();
    let mut fresh = n;
    for &q in &finals {
        transitions.push((q, 0, fresh));
        color_of.insert(fresh, t.color_of[&q]);
        fresh += 1;
    }
    let new_finals: BTreeSet<StateId> = (n..fresh).collect();
    let dfa = crate::automata::Dfa::new(fresh, alphabet, transitions, t.dfa.initial, new_finals)?;
    PartitionedDfa::new(dfa, t.colors.clone(), color_of)
}

/// Successor states of `p` in symbol order.
fn out(a: &PartitionedDfa, p: StateId) -> Vec<StateId> {
    a.dfa.trans[p].values().copied().collect()
}

/// Translate a partitioned DFA into an SES over its color alphabet with one
/// variable per state; the start variable evaluates to `w(A)`.
pub fn heilbrunner_expression(a: &PartitionedDfa) -> Result<Ses> {
    let a = dead_end_transform(a)?;
    let n = a.dfa.state_count;
    let scc = scc_topological(&a.dfa);

    let mut var_names: Vec<String> = (0..n).map(|p| format!("q{p}")).collect();
    let mut rhs: Vec<Option<Expr>> = vec![None; n];
    let mut extra: Vec<(String, Expr)> = Vec::new();

    // maximal components first
    for (ci, comp) in scc.components.iter().enumerate().rev() {
        if !scc.cyclic[ci] {
            let p = comp[0];
            if let Some(&color) = a.color_of.get(&p) {
                rhs[p] = Some(Expr::Symbol(color));
            } else {
                let succ = out(&a, p);
                assert!(!succ.is_empty(), "trimmed automata have no dead non-final states");
                rhs[p] = Some(Expr::concat(succ.into_iter().map(Expr::Var).collect()));
            }
            continue;
        }
        let in_comp: BTreeSet<StateId> = comp.iter().copied().collect();
        // factor out(p) = u_p x_p v_p with x_p spanning the component states
        let mut u: std::collections::BTreeMap<StateId, Vec<StateId>> = Default::default();
        let mut v: std::collections::BTreeMap<StateId, Vec<StateId>> = Default::default();
        let mut first_in: std::collections::BTreeMap<StateId, StateId> = Default::default();
        let mut last_in: std::collections::BTreeMap<StateId, StateId> = Default::default();
        for &p in comp {
            let o = out(&a, p);
            let first = o.iter().position(|q| in_comp.contains(q)).expect("component state has a component successor");
            let last = o.iter().rposition(|q| in_comp.contains(q)).unwrap();
            u.insert(p, o[..first].to_vec());
            v.insert(p, o[last + 1..].to_vec());
            first_in.insert(p, o[first]);
            last_in.insert(p, o[last]);
        }
        // l_p: prefix and cycle of the leftmost-descent iteration
        let mut left_expr: std::collections::BTreeMap<StateId, Option<Expr>> = Default::default();
        let mut right_expr: std::collections::BTreeMap<StateId, Option<Expr>> = Default::default();
        for &p in comp {
            // leftmost: p0 = p, p_{i+1} = first_in(p_i)
            let mut path = vec![p];
            loop {
                let next = first_in[path.last().unwrap()];
                if let Some(b) = path.iter().position(|&x| x == next) {
                    // prefix = u[p_0..p_{b-1}], cycle = u[p_b..p_a]
                    let mut parts: Vec<Expr> = Vec::new();
                    for &s in &path[..b] {
                        parts.extend(u[&s].iter().map(|&q| Expr::Var(q)));
                    }
                    let cycle: Vec<Expr> = path[b..]
                        .iter()
                        .flat_map(|s| u[s].iter().map(|&q| Expr::Var(q)))
                        .collect();
                    if !cycle.is_empty() {
                        parts.push(Expr::omega(Expr::concat(cycle)));
                    }
                    left_expr.insert(p, if parts.is_empty() { None } else { Some(Expr::concat(parts)) });
                    break;
                }
                path.push(next);
            }
            // rightmost: q0 = p, q_{i+1} = last_in(q_i)
            let mut path = vec![p];
            loop {
                let next = last_in[path.last().unwrap()];
                if let Some(d) = path.iter().position(|&x| x == next) {
                    let c = path.len() - 1;
                    // (v_{q_c} ... v_{q_d})^omegabar (v_{q_{d-1}} ... v_{q_0})
                    let cycle: Vec<Expr> = (d..=c)
                        .rev()
                        .flat_map(|i| v[&path[i]].iter().map(|&q| Expr::Var(q)))
                        .collect();
                    let mut parts: Vec<Expr> = Vec::new();
                    if !cycle.is_empty() {
                        parts.push(Expr::omega_bar(Expr::concat(cycle)));
                    }
                    for i in (0..d).rev() {
                        parts.extend(v[&path[i]].iter().map(|&q| Expr::Var(q)));
                    }
                    right_expr.insert(p, if parts.is_empty() { None } else { Some(Expr::concat(parts)) });
                    break;
                }
                path.push(next);
            }
        }
        // auxiliary variables for the nonempty l_p / r_p
        let mut lvar: std::collections::BTreeMap<StateId, VarId> = Default::default();
        let mut rvar: std::collections::BTreeMap<StateId, VarId> = Default::default();
        for &p in comp {
            if let Some(e) = &left_expr[&p] {
                let id = n + extra.len();
                extra.push((format!("Lp{p}"), e.clone()));
                lvar.insert(p, id);
            }
            if let Some(e) = &right_expr[&p] {
                let id = n + extra.len();
                extra.push((format!("Rp{p}"), e.clone()));
                rvar.insert(p, id);
            }
        }
        // T: for every factor s y t of some out(p) with y outside the
        // component, the word between the two subtrees is r_s y l_t
        let mut triples: BTreeSet<(StateId, Vec<StateId>, StateId)> = BTreeSet::new();
        for &p in comp {
            let o = out(&a, p);
            let mut prev: Option<(usize, StateId)> = None;
            for (i, &q) in o.iter().enumerate() {
                if in_comp.contains(&q) {
                    if let Some((pi, ps)) = prev {
                        triples.insert((ps, o[pi + 1..i].to_vec(), q));
                    }
                    prev = Some((i, q));
                }
            }
        }
        let mut shuffle_args: Vec<Expr> = Vec::new();
        for (s, y, tt) in &triples {
            let mut parts: Vec<Expr> = Vec::new();
            if let Some(&id) = rvar.get(s) {
                parts.push(Expr::Var(id));
            }
            parts.extend(y.iter().map(|&q| Expr::Var(q)));
            if let Some(&id) = lvar.get(tt) {
                parts.push(Expr::Var(id));
            }
            if !parts.is_empty() {
                shuffle_args.push(Expr::concat(parts));
            }
        }
        for &p in comp {
            let mut parts: Vec<Expr> = Vec::new();
            if let Some(&id) = lvar.get(&p) {
                parts.push(Expr::Var(id));
            }
            if !shuffle_args.is_empty() {
                parts.push(Expr::shuffle(shuffle_args.clone()));
            }
            if let Some(&id) = rvar.get(&p) {
                parts.push(Expr::Var(id));
            }
            assert!(!parts.is_empty(), "a coaccessible state derives a nonempty word");
            rhs[p] = Some(Expr::concat(parts));
        }
    }

    let mut all_rhs: Vec<Expr> = rhs.into_iter().map(|e| e.expect("every state processed")).collect();
    for (name, e) in extra {
        var_names.push(name);
        all_rhs.push(e);
    }
    Ses::new(var_names, a.colors.clone(), all_rhs, a.dfa.initial)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Dfa;
    use crate::words::{normalize_ses, write_ses};
    use std::collections::BTreeMap;

    fn pdfa(
        n: usize,
        alpha: &[&str],
        trans: &[(usize, &str, usize)],
        init: usize,
        colors: &[(usize, &str)],
        color_names: &[&str],
    ) -> PartitionedDfa {
        let a = Alphabet::new(alpha.iter().copied()).unwrap();
        let ca = Alphabet::new(color_names.iter().copied()).unwrap();
        let ts = trans.iter().map(|&(p, s, q)| (p, a.id_of(s).unwrap(), q)).collect();
        let finals = colors.iter().map(|&(q, _)| q).collect();
        let dfa = Dfa::new(n, a, ts, Some(init), finals).unwrap();
        let color_of: BTreeMap<usize, usize> = colors.iter().map(|&(q, c)| (q, ca.id_of(c).unwrap())).collect();
        PartitionedDfa::new(dfa, ca, color_of).unwrap()
    }

    #[test]
    fn dead_end_keeps_finite_word() {
        // L = {ε, a}: word is x y (lex: ε then a)
        let p = pdfa(2, &["a"], &[(0, "a", 1)], 0, &[(0, "x"), (1, "y")], &["x", "y"]);
        let t = dead_end_transform(&p).unwrap();
        // transformed is acyclic; compare finite colored words
        let orig = p.finite_word(8);
        let new = t.finite_word(8);
        assert_eq!(orig, new);
    }

    #[test]
    fn omega_word_from_b_star_a() {
        // L = b*a, all colored x: (L; <=lex) has order type omega
        let p = pdfa(2, &["a", "b"], &[(0, "a", 1), (0, "b", 0)], 0, &[(1, "x")], &["x"]);
        let ses = heilbrunner_expression(&p).unwrap();
        let n = normalize_ses(&ses);
        let forms = crate::words::classify_primitive(&n).unwrap();
        let start = n.start.unwrap();
        match &forms[start] {
            crate::words::ExtendedForm::Primitive(crate::words::PrimitiveForm::RightRay(v, w)) => {
                assert!(v.is_none() || crate::slp::slp_length(v.as_ref().unwrap()) >= 0u32.into());
                assert_eq!(w.expand(10).unwrap(), vec![0]);
            }
            other => panic!("expected x^omega, got {other:?}\n{}", write_ses(&n)),
        }
    }

    #[test]
    fn omegabar_word_from_a_star_b() {
        let p = pdfa(2, &["a", "b"], &[(0, "a", 0), (0, "b", 1)], 0, &[(1, "x")], &["x"]);
        let ses = heilbrunner_expression(&p).unwrap();
        let n = normalize_ses(&ses);
        let forms = crate::words::classify_primitive(&n).unwrap();
        match &forms[n.start.unwrap()] {
            crate::words::ExtendedForm::Primitive(crate::words::PrimitiveForm::LeftRay(u, v)) => {
                assert_eq!(u.expand(10).unwrap(), vec![0]);
                assert!(v.is_none());
            }
            other => panic!("expected x^omegabar, got {other:?}\n{}", write_ses(&n)),
        }
    }

    #[test]
    fn eta_word_from_binary_suffix_one() {
        // ({0,1}*1; <=lex) is the rational order: the SES value must be [x]^eta
        let p = pdfa(
            2,
            &["0", "1"],
            &[(0, "0", 0), (0, "1", 1), (1, "0", 0), (1, "1", 1)],
            0,
            &[(1, "x")],
            &["x"],
        );
        let ses = heilbrunner_expression(&p).unwrap();
        let n = normalize_ses(&ses);
        let forms = crate::words::classify_primitive(&n).unwrap();
        match &forms[n.start.unwrap()] {
            crate::words::ExtendedForm::Primitive(crate::words::PrimitiveForm::Uniform(g)) => {
                assert_eq!(g.len(), 1);
            }
            other => panic!("expected [x]^eta, got {other:?}\n{}", write_ses(&n)),
        }
    }

    #[test]
    fn finite_language_matches_lex_word() {
        // {ε, a, ab, b} colored by two colors
        let p = pdfa(
            3,
            &["a", "b"],
            &[(0, "a", 1), (0, "b", 2), (1, "b", 2)],
            0,
            &[(0, "x"), (1, "y"), (2, "x")],
            &["x", "y"],
        );
        let ses = heilbrunner_expression(&p).unwrap();
        let val = ses.eval_finite(ses.start.unwrap(), 1000).unwrap();
        assert_eq!(val, p.finite_word(8));
    }
}
