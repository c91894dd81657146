//! Finite automata: NFAs, DFAs, partitioned DFAs and rational transducers,
//! together with the handful of constructions the isomorphism algorithms
//! are built from (trimming, powerset determinization, language counting,
//! transducer images, SCC decomposition).

mod parse;

pub use parse::{parse_automaton, write_automaton, ParsedAutomaton};

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

/// Index of a symbol in an [`Alphabet`]. The index order *is* the linear
/// order used for the lexicographic order on words.
pub type SymId = usize;

/// State id; states are always dense naturals `0..state_count`.
pub type StateId = usize;

/// An ordered alphabet. Declaration order defines the strict linear order
/// used by lexicographic comparisons; no implicit sorting happens anywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
    index: HashMap<String, SymId>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Alphabet> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidInput("alphabet must be nonempty".into()));
        }
        let mut index = HashMap::new();
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidInput("empty alphabet token".into()));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidInput(format!("duplicate alphabet token `{s}`")));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, id: SymId) -> &str {
        &self.symbols[id]
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.symbols.iter().map(|s| s.as_str())
    }

    pub fn id_of(&self, token: &str) -> Option<SymId> {
        self.index.get(token).copied()
    }

    /// Union by symbol name; symbols of `self` keep their ids, new symbols of
    /// `other` are appended in their declaration order. Returns the united
    /// alphabet and the id remapping for `other`.
    pub fn union(&self, other: &Alphabet) -> (Alphabet, Vec<SymId>) {
        let mut symbols = self.symbols.clone();
        let mut index = self.index.clone();
        let mut map = Vec::with_capacity(other.len());
        for s in &other.symbols {
            if let Some(&i) = index.get(s) {
                map.push(i);
            } else {
                let i = symbols.len();
                index.insert(s.clone(), i);
                symbols.push(s.clone());
                map.push(i);
            }
        }
        (Alphabet { symbols, index }, map)
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbols.join(" "))
    }
}

/// Nondeterministic finite automaton. Used both with and without an initial
/// state (the partition refinement algorithms work on automata without one).
#[derive(Debug, Clone)]
pub struct Nfa {
    pub state_count: usize,
    pub alphabet: Alphabet,
    /// Sorted, deduplicated transition triples.
    pub transitions: Vec<(StateId, SymId, StateId)>,
    pub initial: Option<StateId>,
    pub finals: BTreeSet<StateId>,
}

impl Nfa {
    pub fn new(
        state_count: usize,
        alphabet: Alphabet,
        mut transitions: Vec<(StateId, SymId, StateId)>,
        initial: Option<StateId>,
        finals: BTreeSet<StateId>,
    ) -> Result<Nfa> {
        for &(p, a, q) in &transitions {
            if p >= state_count || q >= state_count {
                return Err(Error::InvalidInput(format!("state out of range in transition ({p},{a},{q})")));
            }
            if a >= alphabet.len() {
                return Err(Error::InvalidInput(format!("symbol out of range in transition ({p},{a},{q})")));
            }
        }
        if let Some(q0) = initial {
            if q0 >= state_count {
                return Err(Error::InvalidInput(format!("initial state {q0} out of range")));
            }
        }
        if let Some(&q) = finals.iter().next_back() {
            if q >= state_count {
                return Err(Error::InvalidInput(format!("final state {q} out of range")));
            }
        }
        transitions.sort_unstable();
        transitions.dedup();
        Ok(Nfa { state_count, alphabet, transitions, initial, finals })
    }

    pub fn out(&self, p: StateId) -> impl Iterator<Item = (SymId, StateId)> + '_ {
        let lo = self.transitions.partition_point(|&(s, _, _)| s < p);
        let hi = self.transitions.partition_point(|&(s, _, _)| s <= p);
        self.transitions[lo..hi].iter().map(|&(_, a, q)| (a, q))
    }

    pub fn is_prefix_closed(&self) -> bool {
        (0..self.state_count).all(|q| self.finals.contains(&q))
    }

    /// States reachable from the initial state (all states if there is none).
    pub fn accessible(&self) -> Vec<bool> {
        let mut seen = vec![false; self.state_count];
        let mut queue = VecDeque::new();
        match self.initial {
            Some(q0) => {
                seen[q0] = true;
                queue.push_back(q0);
            }
            None => {
                return vec![true; self.state_count];
            }
        }
        while let Some(p) = queue.pop_front() {
            for (_, q) in self.out(p) {
                if !seen[q] {
                    seen[q] = true;
                    queue.push_back(q);
                }
            }
        }
        seen
    }

    /// States from which a final state is reachable.
    pub fn coaccessible(&self) -> Vec<bool> {
        let mut rev: Vec<Vec<StateId>> = vec![Vec::new(); self.state_count];
        for &(p, _, q) in &self.transitions {
            rev[q].push(p);
        }
        let mut seen = vec![false; self.state_count];
        let mut queue: VecDeque<StateId> = self.finals.iter().copied().collect();
        for &q in &self.finals {
            seen[q] = true;
        }
        while let Some(p) = queue.pop_front() {
            for &r in &rev[p] {
                if !seen[r] {
                    seen[r] = true;
                    queue.push_back(r);
                }
            }
        }
        seen
    }

    /// Restrict to accessible-and-coaccessible states and renumber densely,
    /// preserving the relative order of surviving state ids. The accepted
    /// language is unchanged. If the initial state dies, it becomes `None`.
    pub fn trim(&self) -> Nfa {
        let acc = self.accessible();
        let co = self.coaccessible();
        let keep: Vec<bool> = (0..self.state_count).map(|q| acc[q] && co[q]).collect();
        self.restrict(&keep)
    }

    fn restrict(&self, keep: &[bool]) -> Nfa {
        let mut remap = vec![usize::MAX; self.state_count];
        let mut n = 0;
        for q in 0..self.state_count {
            if keep[q] {
                remap[q] = n;
                n += 1;
            }
        }
        let transitions = self
            .transitions
            .iter()
            .filter(|&&(p, _, q)| keep[p] && keep[q])
            .map(|&(p, a, q)| (remap[p], a, remap[q]))
            .collect();
        let finals = self.finals.iter().filter(|&&q| keep[q]).map(|&q| remap[q]).collect();
        let initial = self.initial.filter(|&q0| keep[q0]).map(|q0| remap[q0]);
        Nfa { state_count: n, alphabet: self.alphabet.clone(), transitions, initial, finals }
    }

    pub fn accepts(&self, word: &[SymId]) -> bool {
        let Some(q0) = self.initial else { return false };
        let mut cur: BTreeSet<StateId> = BTreeSet::from([q0]);
        for &a in word {
            let mut next = BTreeSet::new();
            for &p in &cur {
                for (b, q) in self.out(p) {
                    if b == a {
                        next.insert(q);
                    }
                }
            }
            if next.is_empty() {
                return false;
            }
            cur = next;
        }
        cur.iter().any(|q| self.finals.contains(q))
    }

    /// All accepted words of length at most `max_len`, in lexicographic order.
    /// Test and oracle helper; exponential in `max_len`.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Vec<SymId>> {
        let mut out = Vec::new();
        let Some(q0) = self.initial else { return out };
        let mut layer: Vec<(Vec<SymId>, BTreeSet<StateId>)> = vec![(Vec::new(), BTreeSet::from([q0]))];
        if self.finals.contains(&q0) {
            out.push(Vec::new());
        }
        for _ in 0..max_len {
            let mut next_layer = Vec::new();
            for (w, set) in &layer {
                for a in 0..self.alphabet.len() {
                    let mut next = BTreeSet::new();
                    for &p in set {
                        for (b, q) in self.out(p) {
                            if b == a {
                                next.insert(q);
                            }
                        }
                    }
                    if !next.is_empty() {
                        let mut w2 = w.clone();
                        w2.push(a);
                        if next.iter().any(|q| self.finals.contains(q)) {
                            out.push(w2.clone());
                        }
                        next_layer.push((w2, next));
                    }
                }
            }
            layer = next_layer;
            if layer.is_empty() {
                break;
            }
        }
        out.sort_by(|u, v| lex_cmp(u, v));
        out
    }
}

/// Lexicographic order on words induced by the symbol-id order.
pub fn lex_cmp(u: &[SymId], v: &[SymId]) -> std::cmp::Ordering {
    for (a, b) in u.iter().zip(v.iter()) {
        match a.cmp(b) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    u.len().cmp(&v.len())
}

/// Deterministic finite automaton with a partial transition function.
#[derive(Debug, Clone)]
pub struct Dfa {
    pub state_count: usize,
    pub alphabet: Alphabet,
    /// `trans[p]` maps symbols to successor states; at most one per symbol.
    pub trans: Vec<BTreeMap<SymId, StateId>>,
    pub initial: Option<StateId>,
    pub finals: BTreeSet<StateId>,
}

impl Dfa {
    pub fn new(
        state_count: usize,
        alphabet: Alphabet,
        transitions: Vec<(StateId, SymId, StateId)>,
        initial: Option<StateId>,
        finals: BTreeSet<StateId>,
    ) -> Result<Dfa> {
        let mut trans = vec![BTreeMap::new(); state_count];
        for (p, a, q) in transitions {
            if p >= state_count || q >= state_count {
                return Err(Error::InvalidInput(format!("state out of range in transition ({p},{a},{q})")));
            }
            if a >= alphabet.len() {
                return Err(Error::InvalidInput(format!("symbol out of range in transition ({p},{a},{q})")));
            }
            if trans[p].insert(a, q).is_some() {
                return Err(Error::InvalidInput(format!(
                    "duplicate DFA transition from state {p} on `{}`",
                    alphabet.symbol(a)
                )));
            }
        }
        if let Some(q0) = initial {
            if q0 >= state_count {
                return Err(Error::InvalidInput(format!("initial state {q0} out of range")));
            }
        }
        if let Some(&q) = finals.iter().next_back() {
            if q >= state_count {
                return Err(Error::InvalidInput(format!("final state {q} out of range")));
            }
        }
        Ok(Dfa { state_count, alphabet, trans, initial, finals })
    }

    pub fn to_nfa(&self) -> Nfa {
        let transitions = self.transition_triples();
        Nfa {
            state_count: self.state_count,
            alphabet: self.alphabet.clone(),
            transitions,
            initial: self.initial,
            finals: self.finals.clone(),
        }
    }

    pub fn transition_triples(&self) -> Vec<(StateId, SymId, StateId)> {
        let mut v = Vec::new();
        for (p, m) in self.trans.iter().enumerate() {
            for (&a, &q) in m {
                v.push((p, a, q));
            }
        }
        v
    }

    pub fn step(&self, p: StateId, a: SymId) -> Option<StateId> {
        self.trans[p].get(&a).copied()
    }

    pub fn accepts(&self, word: &[SymId]) -> bool {
        let Some(mut p) = self.initial else { return false };
        for &a in word {
            match self.step(p, a) {
                Some(q) => p = q,
                None => return false,
            }
        }
        self.finals.contains(&p)
    }

    pub fn trim(&self) -> Dfa {
        let nfa = self.to_nfa().trim();
        Dfa::new(nfa.state_count, nfa.alphabet.clone(), nfa.transitions.clone(), nfa.initial, nfa.finals.clone())
            .expect("trimming preserves determinism")
    }

    pub fn is_prefix_closed(&self) -> bool {
        (0..self.state_count).all(|q| self.finals.contains(&q))
    }

    pub fn words_up_to(&self, max_len: usize) -> Vec<Vec<SymId>> {
        self.to_nfa().words_up_to(max_len)
    }
}

/// DFA whose final states are colored: the finite presentation of a regular
/// word. `color_of` assigns exactly one color to every final state.
#[derive(Debug, Clone)]
pub struct PartitionedDfa {
    pub dfa: Dfa,
    pub colors: Alphabet,
    pub color_of: BTreeMap<StateId, SymId>,
}

impl PartitionedDfa {
    pub fn new(dfa: Dfa, colors: Alphabet, color_of: BTreeMap<StateId, SymId>) -> Result<PartitionedDfa> {
        for &q in &dfa.finals {
            match color_of.get(&q) {
                Some(&c) if c < colors.len() => {}
                Some(&c) => {
                    return Err(Error::InvalidInput(format!("color {c} out of range for state {q}")));
                }
                None => {
                    return Err(Error::InvalidInput(format!("final state {q} has no color")));
                }
            }
        }
        for q in color_of.keys() {
            if !dfa.finals.contains(q) {
                return Err(Error::InvalidInput(format!("non-final state {q} has a color")));
            }
        }
        Ok(PartitionedDfa { dfa, colors, color_of })
    }

    pub fn trim(&self) -> PartitionedDfa {
        let acc = self.dfa.to_nfa().accessible();
        let co = self.dfa.to_nfa().coaccessible();
        let keep: Vec<bool> = (0..self.dfa.state_count).map(|q| acc[q] && co[q]).collect();
        let mut remap = vec![usize::MAX; self.dfa.state_count];
        let mut n = 0;
        for (q, &k) in keep.iter().enumerate() {
            if k {
                remap[q] = n;
                n += 1;
            }
        }
        let transitions: Vec<_> = self
            .dfa
            .transition_triples()
            .into_iter()
            .filter(|&(p, _, q)| keep[p] && keep[q])
            .map(|(p, a, q)| (remap[p], a, remap[q]))
            .collect();
        let finals = self.dfa.finals.iter().filter(|&&q| keep[q]).map(|&q| remap[q]).collect();
        let initial = self.dfa.initial.filter(|&q| keep[q]).map(|q| remap[q]);
        let dfa = Dfa::new(n, self.dfa.alphabet.clone(), transitions, initial, finals).unwrap();
        let color_of = self
            .color_of
            .iter()
            .filter(|&(&q, _)| keep[q])
            .map(|(&q, &c)| (remap[q], c))
            .collect();
        PartitionedDfa { dfa, colors: self.colors.clone(), color_of }
    }

    /// The finite colored word `(L(A); <=lex)` listed explicitly, as color
    /// symbol ids. Oracle helper; requires an acyclic (trimmed) automaton.
    pub fn finite_word(&self, max_len: usize) -> Vec<SymId> {
        let words = self.dfa.words_up_to(max_len);
        words
            .into_iter()
            .map(|w| {
                let mut p = self.dfa.initial.expect("initial state required");
                for &a in &w {
                    p = self.dfa.step(p, a).unwrap();
                }
                *self.color_of.get(&p).expect("final state has a color")
            })
            .collect()
    }
}

/// Epsilon-free rational transducer; output words on transitions are nonempty.
#[derive(Debug, Clone)]
pub struct RationalTransducer {
    pub state_count: usize,
    pub input_alphabet: Alphabet,
    pub output_alphabet: Alphabet,
    pub transitions: Vec<(StateId, SymId, Vec<SymId>, StateId)>,
    pub initial: Option<StateId>,
    pub finals: BTreeSet<StateId>,
}

impl RationalTransducer {
    pub fn new(
        state_count: usize,
        input_alphabet: Alphabet,
        output_alphabet: Alphabet,
        transitions: Vec<(StateId, SymId, Vec<SymId>, StateId)>,
        initial: Option<StateId>,
        finals: BTreeSet<StateId>,
    ) -> Result<RationalTransducer> {
        for (p, a, w, q) in &transitions {
            if *p >= state_count || *q >= state_count {
                return Err(Error::InvalidInput("transducer state out of range".into()));
            }
            if *a >= input_alphabet.len() {
                return Err(Error::InvalidInput("transducer input symbol out of range".into()));
            }
            if w.is_empty() {
                return Err(Error::InvalidInput("transducer output word must be nonempty".into()));
            }
            if w.iter().any(|&b| b >= output_alphabet.len()) {
                return Err(Error::InvalidInput("transducer output symbol out of range".into()));
            }
        }
        Ok(RationalTransducer { state_count, input_alphabet, output_alphabet, transitions, initial, finals })
    }

    pub fn is_all_final(&self) -> bool {
        (0..self.state_count).all(|q| self.finals.contains(&q))
    }

    /// The set `T(w)` of output words, for testing. Exponential in general.
    pub fn images(&self, word: &[SymId]) -> BTreeSet<Vec<SymId>> {
        let Some(q0) = self.initial else { return BTreeSet::new() };
        let mut cur: Vec<(StateId, Vec<SymId>)> = vec![(q0, Vec::new())];
        for &a in word {
            let mut next = Vec::new();
            for (p, w) in &cur {
                for (s, b, out, t) in &self.transitions {
                    if s == p && *b == a {
                        let mut w2 = w.clone();
                        w2.extend_from_slice(out);
                        next.push((*t, w2));
                    }
                }
            }
            cur = next;
        }
        cur.into_iter().filter(|(q, _)| self.finals.contains(q)).map(|(_, w)| w).collect()
    }
}

/// Cardinality of a language: a natural number or infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Card {
    Finite(BigUint),
    Infinite,
}

impl Card {
    pub fn zero() -> Card {
        Card::Finite(BigUint::zero())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Card::Finite(n) if n.is_zero())
    }

    pub fn add(&self, other: &Card) -> Card {
        match (self, other) {
            (Card::Infinite, _) | (_, Card::Infinite) => Card::Infinite,
            (Card::Finite(a), Card::Finite(b)) => Card::Finite(a + b),
        }
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Card::Finite(n) => write!(f, "{n}"),
            Card::Infinite => write!(f, "infinite"),
        }
    }
}

/// Strongly connected components of the accessible part, in a topological
/// order: a component precedes every component it can reach. Ties are broken
/// by smallest contained state id.
#[derive(Debug, Clone)]
pub struct SccOrder {
    pub components: Vec<Vec<StateId>>,
    /// `component_of[q]` for accessible states; `usize::MAX` for pruned ones.
    pub component_of: Vec<usize>,
    /// A component is cyclic iff it has an internal transition
    /// (size > 1, or a single state with a self-loop).
    pub cyclic: Vec<bool>,
}

/// Prefix closure: trims and makes every state final, so the result accepts
/// `pref(L(a))`.
pub fn prefix_closure(a: &Nfa) -> Result<Nfa> {
    let mut t = a.trim();
    if t.state_count == 0 || t.initial.is_none() {
        return Err(Error::EmptyLanguage("prefix_closure of the empty language".into()));
    }
    t.finals = (0..t.state_count).collect();
    Ok(t)
}

/// Accessible powerset construction. Fails with `ResourceLimit` as soon as
/// more than `cap` subset states have been materialized. The result is
/// trimmed.
pub fn determinize(a: &Nfa, cap: usize) -> Result<Dfa> {
    let q0 = a
        .initial
        .ok_or_else(|| Error::InvalidInput("determinize requires an initial state".into()))?;
    let mut ids: HashMap<Vec<StateId>, usize> = HashMap::new();
    let mut subsets: Vec<Vec<StateId>> = Vec::new();
    let start = vec![q0];
    ids.insert(start.clone(), 0);
    subsets.push(start);
    let mut transitions: Vec<(StateId, SymId, StateId)> = Vec::new();
    let mut work = 0usize;
    while work < subsets.len() {
        let cur = subsets[work].clone();
        for a_sym in 0..a.alphabet.len() {
            let mut next: BTreeSet<StateId> = BTreeSet::new();
            for &p in &cur {
                for (b, q) in a.out(p) {
                    if b == a_sym {
                        next.insert(q);
                    }
                }
            }
            if next.is_empty() {
                continue;
            }
            let next: Vec<StateId> = next.into_iter().collect();
            let id = match ids.get(&next) {
                Some(&id) => id,
                None => {
                    if subsets.len() >= cap {
                        return Err(Error::ResourceLimit(format!(
                            "powerset construction exceeded {cap} subset states (see --cap)"
                        )));
                    }
                    let id = subsets.len();
                    ids.insert(next.clone(), id);
                    subsets.push(next);
                    id
                }
            };
            transitions.push((work, a_sym, id));
        }
        work += 1;
    }
    let finals: BTreeSet<StateId> = subsets
        .iter()
        .enumerate()
        .filter(|(_, s)| s.iter().any(|q| a.finals.contains(q)))
        .map(|(i, _)| i)
        .collect();
    let dfa = Dfa::new(subsets.len(), a.alphabet.clone(), transitions, Some(0), finals)?;
    Ok(dfa.trim())
}

/// `|L(a)|`, computed by trimming and counting paths in topological order.
/// An automaton without initial state (or with an empty language) counts 0.
pub fn count_language(a: &Dfa) -> Card {
    let t = a.trim();
    let Some(q0) = t.initial else { return Card::zero() };
    if t.state_count == 0 {
        return Card::zero();
    }
    let scc = scc_topological(&t);
    if scc.cyclic.iter().any(|&c| c) {
        return Card::Infinite;
    }
    // All SCCs are singletons; `components` is a topological order of states.
    let mut paths: Vec<BigUint> = vec![BigUint::zero(); t.state_count];
    paths[q0] = BigUint::one();
    for comp in &scc.components {
        let p = comp[0];
        let from = paths[p].clone();
        if from.is_zero() {
            continue;
        }
        for (_, q) in t.to_nfa().out(p) {
            paths[q] += &from;
        }
    }
    let mut total = BigUint::zero();
    for &f in &t.finals {
        total += &paths[f];
    }
    Card::Finite(total)
}

/// Path counts from the initial state to every state of the trimmed
/// automaton, or `None` if a cycle survives trimming. Returns the counts
/// together with the trimmed automaton so callers can map final states.
pub fn count_paths_to_states(a: &Dfa) -> (Dfa, Option<Vec<BigUint>>) {
    let t = a.trim();
    let Some(q0) = t.initial else {
        return (t, Some(Vec::new()));
    };
    let scc = scc_topological(&t);
    if scc.cyclic.iter().any(|&c| c) {
        return (t, None);
    }
    let mut paths: Vec<BigUint> = vec![BigUint::zero(); t.state_count];
    paths[q0] = BigUint::one();
    for comp in &scc.components {
        let p = comp[0];
        let from = paths[p].clone();
        if from.is_zero() {
            continue;
        }
        for (&_a, &q) in &t.trans[p] {
            paths[q] += &from;
        }
    }
    (t, Some(paths))
}

/// Image of a prefix-closed language under a rational transducer with all
/// states final: the result accepts `pref(T(L(a)))` and is prefix-closed.
/// Multi-letter outputs are split into chains of fresh states.
pub fn transducer_image(a: &Nfa, t: &RationalTransducer) -> Result<Nfa> {
    let a = a.trim();
    if !a.is_prefix_closed() || a.initial.is_none() {
        return Err(Error::InvalidInput("transducer_image requires a prefix-closed NFA with initial state".into()));
    }
    if !t.is_all_final() || t.initial.is_none() {
        return Err(Error::InvalidInput("transducer_image requires a transducer with all states final".into()));
    }
    let pair_id = |p: StateId, s: StateId| p * t.state_count + s;
    let mut state_count = a.state_count * t.state_count;
    let mut transitions: Vec<(StateId, SymId, StateId)> = Vec::new();
    for &(p, sym, q) in &a.transitions {
        for (s, b, out, s2) in &t.transitions {
            if *b != sym {
                continue;
            }
            // chain p,s --out[0]--> ... --out[last]--> q,s2
            let mut cur = pair_id(p, *s);
            for (i, &o) in out.iter().enumerate() {
                let next = if i + 1 == out.len() {
                    pair_id(q, *s2)
                } else {
                    let fresh = state_count;
                    state_count += 1;
                    fresh
                };
                transitions.push((cur, o, next));
                cur = next;
            }
        }
    }
    let initial = Some(pair_id(a.initial.unwrap(), t.initial.unwrap()));
    let finals: BTreeSet<StateId> = (0..state_count).collect();
    let nfa = Nfa::new(state_count, t.output_alphabet.clone(), transitions, initial, finals)?;
    // All states final, so trimming only removes inaccessible states.
    Ok(nfa.trim())
}

/// Tarjan-style SCC decomposition of the accessible states of a DFA,
/// ordered topologically (sources first) with smallest-state-id tie break.
pub fn scc_topological(a: &Dfa) -> SccOrder {
    let nfa = a.to_nfa();
    scc_topological_nfa(&nfa)
}

pub fn scc_topological_nfa(a: &Nfa) -> SccOrder {
    let acc = a.accessible();
    let n = a.state_count;
    // Iterative Tarjan restricted to accessible states.
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<StateId> = Vec::new();
    let mut next_index = 0usize;
    let mut comp_of = vec![usize::MAX; n];
    let mut comps: Vec<Vec<StateId>> = Vec::new();

    let adj: Vec<Vec<StateId>> = {
        let mut adj = vec![Vec::new(); n];
        for &(p, _, q) in &a.transitions {
            if acc[p] && acc[q] {
                adj[p].push(q);
            }
        }
        adj
    };

    #[derive(Clone)]
    struct Frame {
        v: StateId,
        child: usize,
    }

    for start in 0..n {
        if !acc[start] || index[start] != usize::MAX {
            continue;
        }
        let mut call: Vec<Frame> = vec![Frame { v: start, child: 0 }];
        index[start] = next_index;
        low[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;
        while let Some(top) = call.last_mut() {
            let v = top.v;
            if top.child < adj[v].len() {
                let w = adj[v][top.child];
                top.child += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push(Frame { v: w, child: 0 });
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp_of[w] = comps.len();
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
                call.pop();
                if let Some(parent) = call.last() {
                    let pv = parent.v;
                    low[pv] = low[pv].min(low[v]);
                }
            }
        }
    }

    // Condensation edges, then Kahn with a min-heap on smallest state id.
    let m = comps.len();
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
    let mut indeg = vec![0usize; m];
    let mut cyclic = vec![false; m];
    for &(p, _, q) in &a.transitions {
        if !acc[p] || !acc[q] {
            continue;
        }
        let (cp, cq) = (comp_of[p], comp_of[q]);
        if cp == cq {
            cyclic[cp] = true;
        } else if succ[cp].insert(cq) {
            indeg[cq] += 1;
        }
    }
    for c in comps.iter_mut() {
        c.sort_unstable();
    }
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let mut heap: BinaryHeap<Reverse<(StateId, usize)>> = BinaryHeap::new();
    for (c, &d) in indeg.iter().enumerate() {
        if d == 0 {
            heap.push(Reverse((comps[c][0], c)));
        }
    }
    let mut order = Vec::with_capacity(m);
    let mut indeg = indeg;
    while let Some(Reverse((_, c))) = heap.pop() {
        order.push(c);
        for &d in &succ[c] {
            indeg[d] -= 1;
            if indeg[d] == 0 {
                heap.push(Reverse((comps[d][0], d)));
            }
        }
    }
    debug_assert_eq!(order.len(), m);
    let mut components = Vec::with_capacity(m);
    let mut cyclic_out = Vec::with_capacity(m);
    let mut new_id = vec![usize::MAX; m];
    for (i, &c) in order.iter().enumerate() {
        new_id[c] = i;
        components.push(comps[c].clone());
        cyclic_out.push(cyclic[c]);
    }
    let component_of = comp_of
        .iter()
        .map(|&c| if c == usize::MAX { usize::MAX } else { new_id[c] })
        .collect();
    SccOrder { components, component_of, cyclic: cyclic_out }
}

/// True iff the accessible transition graph has no directed cycle.
pub fn is_acyclic(a: &Nfa) -> bool {
    let scc = scc_topological_nfa(a);
    scc.cyclic.iter().all(|&c| !c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn nfa(n: usize, trans: &[(usize, usize, usize)], init: usize, finals: &[usize]) -> Nfa {
        Nfa::new(n, ab(), trans.to_vec(), Some(init), finals.iter().copied().collect()).unwrap()
    }

    #[test]
    fn prefix_closure_single_word() {
        // L = {ab}
        let a = nfa(3, &[(0, 0, 1), (1, 1, 2)], 0, &[2]);
        let p = prefix_closure(&a).unwrap();
        let words = p.words_up_to(4);
        assert_eq!(words, vec![vec![], vec![0], vec![0, 1]]);
    }

    #[test]
    fn prefix_closure_epsilon() {
        let a = nfa(1, &[], 0, &[0]);
        let p = prefix_closure(&a).unwrap();
        assert_eq!(p.words_up_to(3), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn prefix_closure_a_star_b() {
        // L = a*b  =>  pref(L) = a* ∪ a*b
        let a = nfa(2, &[(0, 0, 0), (0, 1, 1)], 0, &[1]);
        let p = prefix_closure(&a).unwrap();
        let mut expect: Vec<Vec<usize>> = Vec::new();
        for k in 0..=4usize {
            expect.push(vec![0; k]);
            if k < 4 {
                let mut w = vec![0; k];
                w.push(1);
                expect.push(w);
            }
        }
        expect.sort_by(|u, v| lex_cmp(u, v));
        expect.retain(|w| w.len() <= 4);
        assert_eq!(p.words_up_to(4), expect);
    }

    #[test]
    fn prefix_closure_empty_language() {
        let a = nfa(1, &[], 0, &[]);
        assert!(matches!(prefix_closure(&a), Err(Error::EmptyLanguage(_))));
    }

    #[test]
    fn prefix_closure_idempotent() {
        let a = nfa(3, &[(0, 0, 1), (1, 1, 2), (2, 0, 0)], 0, &[2]);
        let p1 = prefix_closure(&a).unwrap();
        let p2 = prefix_closure(&p1).unwrap();
        assert_eq!(p1.words_up_to(5), p2.words_up_to(5));
    }

    #[test]
    fn determinize_preserves_language() {
        // (a|b)*a with 2 states
        let a = nfa(2, &[(0, 0, 0), (0, 1, 0), (0, 0, 1)], 0, &[1]);
        let d = determinize(&a, 1 << 16).unwrap();
        assert_eq!(d.state_count, 2);
        for w in a.words_up_to(5) {
            assert!(d.accepts(&w));
        }
        let dw = d.words_up_to(5);
        assert_eq!(a.words_up_to(5), dw);
    }

    #[test]
    fn determinize_blowup_hits_cap() {
        // Sigma* a Sigma^{n-2} needs 2^{n-2} subset states; n = 8.
        let n = 8;
        let mut trans = vec![(0, 0, 0), (0, 1, 0), (0, 0, 1)];
        for i in 1..n - 1 {
            trans.push((i, 0, i + 1));
            trans.push((i, 1, i + 1));
        }
        let a = Nfa::new(n, ab(), trans, Some(0), [n - 1].into_iter().collect()).unwrap();
        let cap = (1 << (n - 2)) - 1;
        assert!(matches!(determinize(&a, cap), Err(Error::ResourceLimit(_))));
        assert!(determinize(&a, 1 << 16).is_ok());
    }

    #[test]
    fn count_small() {
        // 0 -a-> 1, finals {0,1}: {ε, a} -> 2
        let d = Dfa::new(2, ab(), vec![(0, 0, 1)], Some(0), [0, 1].into_iter().collect()).unwrap();
        assert_eq!(count_language(&d), Card::Finite(2u32.into()));
    }

    #[test]
    fn count_infinite() {
        let d = Dfa::new(1, ab(), vec![(0, 0, 0)], Some(0), [0].into_iter().collect()).unwrap();
        assert_eq!(count_language(&d), Card::Infinite);
    }

    #[test]
    fn count_le2_words() {
        // {a,b}^{<=2} -> 7
        let d = Dfa::new(
            3,
            ab(),
            vec![(0, 0, 1), (0, 1, 1), (1, 0, 2), (1, 1, 2)],
            Some(0),
            [0, 1, 2].into_iter().collect(),
        )
        .unwrap();
        assert_eq!(count_language(&d), Card::Finite(7u32.into()));
    }

    #[test]
    fn scc_chain() {
        let d = Dfa::new(3, ab(), vec![(0, 0, 1), (1, 0, 2)], Some(0), [2].into_iter().collect()).unwrap();
        let s = scc_topological(&d);
        assert_eq!(s.components, vec![vec![0], vec![1], vec![2]]);
        assert!(s.cyclic.iter().all(|&c| !c));
    }

    #[test]
    fn scc_self_loop() {
        let d = Dfa::new(1, ab(), vec![(0, 0, 0)], Some(0), [0].into_iter().collect()).unwrap();
        let s = scc_topological(&d);
        assert_eq!(s.components, vec![vec![0]]);
        assert!(s.cyclic[0]);
    }

    #[test]
    fn scc_pair_before_tail() {
        let d = Dfa::new(
            3,
            ab(),
            vec![(0, 0, 1), (1, 0, 0), (1, 1, 2)],
            Some(0),
            [2].into_iter().collect(),
        )
        .unwrap();
        let s = scc_topological(&d);
        assert_eq!(s.components, vec![vec![0, 1], vec![2]]);
        assert!(s.cyclic[0] && !s.cyclic[1]);
    }

    #[test]
    fn acyclic_checks() {
        let chain = nfa(3, &[(0, 0, 1), (1, 0, 2)], 0, &[2]);
        assert!(is_acyclic(&chain));
        let lp = nfa(1, &[(0, 0, 0)], 0, &[0]);
        assert!(!is_acyclic(&lp));
        let diamond = nfa(4, &[(0, 0, 1), (0, 1, 2), (1, 0, 3), (2, 0, 3)], 0, &[3]);
        assert!(is_acyclic(&diamond));
    }

    #[test]
    fn transducer_identity() {
        let a = prefix_closure(&nfa(3, &[(0, 0, 1), (1, 1, 2)], 0, &[2])).unwrap();
        let t = RationalTransducer::new(
            1,
            ab(),
            ab(),
            vec![(0, 0, vec![0], 0), (0, 1, vec![1], 0)],
            Some(0),
            [0].into_iter().collect(),
        )
        .unwrap();
        let b = transducer_image(&a, &t).unwrap();
        assert_eq!(a.words_up_to(4), b.words_up_to(4));
    }

    #[test]
    fn transducer_two_letter_output() {
        // a|ll applied to {ε, a} gives pref = {ε, l, ll}
        let out = Alphabet::new(["l", "r"]).unwrap();
        let a = prefix_closure(&nfa(2, &[(0, 0, 1)], 0, &[1])).unwrap();
        let t = RationalTransducer::new(
            1,
            ab(),
            out,
            vec![(0, 0, vec![0, 0], 0)],
            Some(0),
            [0].into_iter().collect(),
        )
        .unwrap();
        let b = transducer_image(&a, &t).unwrap();
        assert_eq!(b.words_up_to(3), vec![vec![], vec![0], vec![0, 0]]);
    }

    #[test]
    fn transducer_image_prefix_closed_property() {
        let a = prefix_closure(&nfa(3, &[(0, 0, 1), (1, 1, 2), (2, 1, 0)], 0, &[0])).unwrap();
        let t = RationalTransducer::new(
            2,
            ab(),
            ab(),
            vec![(0, 0, vec![0, 1], 1), (1, 1, vec![1], 0), (0, 1, vec![0], 0)],
            Some(0),
            [0, 1].into_iter().collect(),
        )
        .unwrap();
        let b = transducer_image(&a, &t).unwrap();
        assert!(b.is_prefix_closed());
        // every accepted word of length <= 6 is a prefix of some image of an accepted input
        let inputs = a.words_up_to(6);
        let mut image_prefixes: BTreeSet<Vec<usize>> = BTreeSet::new();
        for w in &inputs {
            for img in t.images(w) {
                for k in 0..=img.len() {
                    image_prefixes.insert(img[..k].to_vec());
                }
            }
        }
        for w in b.words_up_to(6) {
            assert!(image_prefixes.contains(&w), "word {w:?} not an image prefix");
        }
    }
}
