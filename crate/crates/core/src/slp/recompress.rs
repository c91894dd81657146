//! Deterministic equality of SLP-compressed words by recompression:
//! alternating rounds of maximal-block compression and pair compression,
//! applied consistently to both words, until both collapse to single
//! letters. Every round strictly shrinks the words, and compression maps
//! are injective on strings, so equality is preserved exactly in both
//! directions.

use super::{Node, Slp};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::collections::HashMap;

type Letter = u64;

#[derive(Debug, Clone, PartialEq, Eq)]
enum RSym {
    /// `count` consecutive copies of `letter`.
    Run(Letter, BigUint),
    Var(usize),
}

struct LetterTable {
    next: Letter,
    blocks: HashMap<(Letter, BigUint), Letter>,
    pairs: HashMap<(Letter, Letter), Letter>,
}

impl LetterTable {
    fn new(first_fresh: Letter) -> LetterTable {
        LetterTable { next: first_fresh, blocks: HashMap::new(), pairs: HashMap::new() }
    }

    fn block(&mut self, letter: Letter, count: BigUint) -> Letter {
        let next = &mut self.next;
        *self.blocks.entry((letter, count)).or_insert_with(|| {
            let l = *next;
            *next += 1;
            l
        })
    }

    fn pair(&mut self, a: Letter, b: Letter) -> Letter {
        let next = &mut self.next;
        *self.pairs.entry((a, b)).or_insert_with(|| {
            let l = *next;
            *next += 1;
            l
        })
    }
}

struct Rc {
    /// Rule bodies; `None` marks rules that were inlined away.
    rules: Vec<Option<Vec<RSym>>>,
    root_a: usize,
    root_b: usize,
    letters: LetterTable,
}

/// Append the rules for one word; returns the rule id of its root.
fn add_word(rules: &mut Vec<Option<Vec<RSym>>>, s: &Slp) -> usize {
    let reach = s.reachable_from(s.root());
    let mut rule_of = vec![usize::MAX; s.node_count()];
    for &i in &reach {
        if let Node::Cat(l, r) = s.node(i) {
            let item = |j: usize, rule_of: &[usize]| match s.node(j) {
                Node::Leaf(sym) => RSym::Run(sym as u64, BigUint::one()),
                Node::Cat(..) => RSym::Var(rule_of[j]),
            };
            let body = vec![item(l, &rule_of), item(r, &rule_of)];
            rule_of[i] = rules.len();
            rules.push(Some(body));
        }
    }
    match s.node(s.root()) {
        Node::Leaf(sym) => {
            rules.push(Some(vec![RSym::Run(sym as u64, BigUint::one())]));
            rules.len() - 1
        }
        Node::Cat(..) => rule_of[s.root()],
    }
}

fn push_merge(out: &mut Vec<RSym>, sym: RSym) {
    if let (Some(RSym::Run(x, k)), RSym::Run(y, m)) = (out.last_mut(), &sym) {
        if *x == *y {
            *k += m;
            return;
        }
    }
    out.push(sym);
}

/// Popped affixes of a processed rule, to be inlined at every use.
#[derive(Default, Clone)]
struct Affix {
    pre: Vec<RSym>,
    post: Vec<RSym>,
    /// When set, the whole rule is substituted by this sequence.
    inline: Option<Vec<RSym>>,
}

impl Rc {
    fn from_slps(a: &Slp, b: &Slp) -> Rc {
        let mut max_sym = 0u64;
        for s in [a, b] {
            for i in s.reachable_from(s.root()) {
                if let Node::Leaf(sym) = s.node(i) {
                    max_sym = max_sym.max(sym as u64);
                }
            }
        }
        let mut rules: Vec<Option<Vec<RSym>>> = Vec::new();
        let root_a = add_word(&mut rules, a);
        let root_b = add_word(&mut rules, b);
        Rc { rules, root_a, root_b, letters: LetterTable::new(max_sym + 1) }
    }

    fn live_order(&self) -> Vec<usize> {
        (0..self.rules.len()).filter(|&i| self.rules[i].is_some()).collect()
    }

    /// Value length of every rule (number of letters).
    fn lengths(&self) -> Vec<BigUint> {
        let mut lens = vec![BigUint::zero(); self.rules.len()];
        for v in self.live_order() {
            let mut total = BigUint::zero();
            for sym in self.rules[v].as_ref().unwrap() {
                match sym {
                    RSym::Run(_, k) => total += k,
                    RSym::Var(u) => total += &lens[*u],
                }
            }
            lens[v] = total;
        }
        lens
    }

    fn single_letter(&self, root: usize) -> Option<Letter> {
        match self.rules[root].as_deref() {
            Some([RSym::Run(x, k)]) if k.is_one() => Some(*x),
            _ => None,
        }
    }

    /// Substitute processed children (inlines and popped affixes) into `v`'s
    /// body, merging adjacent equal-letter runs.
    fn substitute(&mut self, v: usize, affix: &[Affix]) -> Vec<RSym> {
        let body = self.rules[v].take().unwrap();
        let mut new: Vec<RSym> = Vec::with_capacity(body.len() + 4);
        for sym in body {
            match sym {
                RSym::Run(..) => push_merge(&mut new, sym),
                RSym::Var(u) => {
                    if let Some(inline) = &affix[u].inline {
                        for s in inline {
                            push_merge(&mut new, s.clone());
                        }
                    } else {
                        for s in &affix[u].pre {
                            push_merge(&mut new, s.clone());
                        }
                        new.push(RSym::Var(u));
                        for s in &affix[u].post {
                            push_merge(&mut new, s.clone());
                        }
                    }
                }
            }
        }
        new
    }

    /// One block-compression round: pop boundary blocks bottom-up so every
    /// maximal block becomes a single run inside a single body, then replace
    /// every run of length >= 2 by a fresh block letter.
    fn block_stage(&mut self) {
        let n = self.rules.len();
        let mut affix: Vec<Affix> = vec![Affix::default(); n];
        for v in self.live_order() {
            let is_root = v == self.root_a || v == self.root_b;
            let mut new = self.substitute(v, &affix);
            if !is_root {
                if new.len() <= 2 {
                    affix[v].inline = Some(new);
                    continue;
                }
                let first = new.remove(0);
                debug_assert!(matches!(first, RSym::Run(..)), "bodies start with a run");
                let last = new.pop().unwrap();
                debug_assert!(matches!(last, RSym::Run(..)), "bodies end with a run");
                affix[v].pre = vec![first];
                affix[v].post = vec![last];
                debug_assert!(!new.is_empty());
            }
            self.rules[v] = Some(new);
        }
        // compress runs
        for v in self.live_order() {
            let body = self.rules[v].take().unwrap();
            let mut out = Vec::with_capacity(body.len());
            for sym in body {
                match sym {
                    RSym::Run(x, k) if k > BigUint::one() => {
                        let l = self.letters.block(x, k);
                        push_merge(&mut out, RSym::Run(l, BigUint::one()));
                    }
                    other => push_merge(&mut out, other),
                }
            }
            self.rules[v] = Some(out);
        }
    }

    /// First letter of the value of rule `v` (bodies are nonempty).
    fn first_letter(&self, mut v: usize, memo: &mut HashMap<usize, Letter>) -> Letter {
        loop {
            if let Some(&l) = memo.get(&v) {
                return l;
            }
            match self.rules[v].as_ref().unwrap().first().unwrap() {
                RSym::Run(x, _) => {
                    memo.insert(v, *x);
                    return *x;
                }
                RSym::Var(u) => v = *u,
            }
        }
    }

    fn last_letter(&self, mut v: usize, memo: &mut HashMap<usize, Letter>) -> Letter {
        loop {
            if let Some(&l) = memo.get(&v) {
                return l;
            }
            match self.rules[v].as_ref().unwrap().last().unwrap() {
                RSym::Run(x, _) => {
                    memo.insert(v, *x);
                    return *x;
                }
                RSym::Var(u) => v = *u,
            }
        }
    }

    /// Occurrence counts of adjacent letter pairs (a != b), weighted by rule
    /// multiplicity, saturating.
    fn pair_counts(&self) -> HashMap<(Letter, Letter), u128> {
        let order = self.live_order();
        let mut mult: HashMap<usize, u128> = HashMap::new();
        mult.insert(self.root_a, 1);
        *mult.entry(self.root_b).or_insert(0) += 1;
        for &v in order.iter().rev() {
            let m = *mult.get(&v).unwrap_or(&0);
            if m == 0 {
                continue;
            }
            for sym in self.rules[v].as_ref().unwrap() {
                if let RSym::Var(u) = sym {
                    let e = mult.entry(*u).or_insert(0);
                    *e = e.saturating_add(m);
                }
            }
        }
        let mut firsts = HashMap::new();
        let mut lasts = HashMap::new();
        let mut counts: HashMap<(Letter, Letter), u128> = HashMap::new();
        for &v in &order {
            let m = *mult.get(&v).unwrap_or(&0);
            if m == 0 {
                continue;
            }
            let body = self.rules[v].as_ref().unwrap().clone();
            for w in body.windows(2) {
                let a = match &w[0] {
                    RSym::Run(x, _) => *x,
                    RSym::Var(u) => self.last_letter(*u, &mut lasts),
                };
                let b = match &w[1] {
                    RSym::Run(x, _) => *x,
                    RSym::Var(u) => self.first_letter(*u, &mut firsts),
                };
                if a != b {
                    let e = counts.entry((a, b)).or_insert(0);
                    *e = e.saturating_add(m);
                }
            }
        }
        counts
    }

    /// Greedy directed-cut partition; guarantees at least one compressed pair
    /// whenever any distinct adjacent pair exists.
    fn choose_partition(&self, counts: &HashMap<(Letter, Letter), u128>) -> HashMap<Letter, bool> {
        // map: letter -> true if in L, false if in R
        let mut weight: HashMap<Letter, u128> = HashMap::new();
        for (&(a, b), &c) in counts {
            *weight.entry(a).or_insert(0) += c;
            *weight.entry(b).or_insert(0) += c;
        }
        let mut letters: Vec<Letter> = weight.keys().copied().collect();
        letters.sort_by_key(|l| (std::cmp::Reverse(weight[l]), *l));
        let mut side: HashMap<Letter, bool> = HashMap::new();
        for &c in &letters {
            let mut gain_l = 0u128;
            let mut gain_r = 0u128;
            for (&(a, b), &cnt) in counts {
                if a == c {
                    if let Some(&s) = side.get(&b) {
                        if !s {
                            gain_l = gain_l.saturating_add(cnt);
                        }
                    }
                }
                if b == c {
                    if let Some(&s) = side.get(&a) {
                        if s {
                            gain_r = gain_r.saturating_add(cnt);
                        }
                    }
                }
            }
            side.insert(c, gain_l >= gain_r);
        }
        let covered: u128 = counts
            .iter()
            .filter(|(&(a, b), _)| side.get(&a) == Some(&true) && side.get(&b) == Some(&false))
            .map(|(_, &c)| c)
            .sum();
        if covered == 0 && !counts.is_empty() {
            // force the hottest pair
            let (&(a, b), _) = counts.iter().max_by_key(|(&(x, y), &c)| (c, x, y)).unwrap();
            for (&l, s) in side.iter_mut() {
                *s = l != b;
            }
            side.insert(a, true);
            side.insert(b, false);
        }
        side
    }

    fn pair_stage(&mut self) {
        let counts = self.pair_counts();
        if counts.is_empty() {
            return;
        }
        let side = self.choose_partition(&counts);
        let in_l = |x: Letter, side: &HashMap<Letter, bool>| side.get(&x) == Some(&true);
        let in_r = |x: Letter, side: &HashMap<Letter, bool>| side.get(&x) == Some(&false);
        let n = self.rules.len();
        let mut affix: Vec<Affix> = vec![Affix::default(); n];
        for v in self.live_order() {
            let is_root = v == self.root_a || v == self.root_b;
            let mut new = self.substitute(v, &affix);
            if !is_root {
                if new.len() <= 2 {
                    affix[v].inline = Some(new);
                    continue;
                }
                // pop a single leading letter if it belongs to R
                if let RSym::Run(x, k) = new[0].clone() {
                    if in_r(x, &side) {
                        affix[v].pre = vec![RSym::Run(x, BigUint::one())];
                        if k.is_one() {
                            new.remove(0);
                        } else {
                            new[0] = RSym::Run(x, k - 1u32);
                        }
                    }
                }
                // pop a single trailing letter if it belongs to L
                if let Some(RSym::Run(y, m)) = new.last().cloned() {
                    if in_l(y, &side) && new.len() > 1 {
                        affix[v].post = vec![RSym::Run(y, BigUint::one())];
                        if m.is_one() {
                            new.pop();
                        } else {
                            let last = new.len() - 1;
                            new[last] = RSym::Run(y, m - 1u32);
                        }
                    }
                }
                if new.len() <= 1 {
                    // the core got too small: inline everything
                    let mut whole = affix[v].pre.clone();
                    for s in &new {
                        push_merge(&mut whole, s.clone());
                    }
                    for s in affix[v].post.clone() {
                        push_merge(&mut whole, s);
                    }
                    affix[v] = Affix { pre: Vec::new(), post: Vec::new(), inline: Some(whole) };
                    continue;
                }
            }
            self.rules[v] = Some(new);
        }
        // compress pairs in every live body
        for v in self.live_order() {
            let body = self.rules[v].take().unwrap();
            let mut out: Vec<RSym> = Vec::with_capacity(body.len());
            for sym in body {
                let mut handled = false;
                if let RSym::Run(b, kb) = &sym {
                    if let Some(RSym::Run(a, ka)) = out.last().cloned() {
                        if a != *b && in_l(a, &side) && in_r(*b, &side) {
                            let pl = self.letters.pair(a, *b);
                            if ka.is_one() {
                                out.pop();
                            } else {
                                let last = out.len() - 1;
                                out[last] = RSym::Run(a, ka - 1u32);
                            }
                            push_merge(&mut out, RSym::Run(pl, BigUint::one()));
                            if !kb.is_one() {
                                push_merge(&mut out, RSym::Run(*b, kb - 1u32));
                            }
                            handled = true;
                        }
                    }
                }
                if !handled {
                    push_merge(&mut out, sym);
                }
            }
            self.rules[v] = Some(out);
        }
    }
}

/// Exact equality of val(a) and val(b) by joint recompression.
pub fn equal(a: &Slp, b: &Slp) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut rc = Rc::from_slps(a, b);
    let mut prev_total: Option<BigUint> = None;
    loop {
        let lens = rc.lengths();
        let (la, lb) = (lens[rc.root_a].clone(), lens[rc.root_b].clone());
        if la.is_one() || lb.is_one() {
            if la != lb {
                return false;
            }
            let x = rc.single_letter_resolved(rc.root_a).expect("length-1 value resolves to a letter");
            let y = rc.single_letter_resolved(rc.root_b).expect("length-1 value resolves to a letter");
            return x == y;
        }
        let total = &la + &lb;
        if let Some(p) = &prev_total {
            assert!(&total < p, "recompression must shrink the words");
        }
        prev_total = Some(total);
        rc.block_stage();
        let lens = rc.lengths();
        if lens[rc.root_a].is_one() || lens[rc.root_b].is_one() {
            continue;
        }
        rc.pair_stage();
    }
}

impl Rc {
    /// Single letter of a root whose value length is 1, chasing aliases.
    fn single_letter_resolved(&self, root: usize) -> Option<Letter> {
        let mut v = root;
        loop {
            if let Some(l) = self.single_letter(v) {
                return Some(l);
            }
            match self.rules[v].as_deref() {
                Some([RSym::Var(u)]) => v = *u,
                _ => return None,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{slp_power, Item, Slp};
    use super::*;

    fn word(w: &[usize]) -> Slp {
        Slp::from_word(w).unwrap()
    }

    #[test]
    fn equal_basic() {
        // X = YY, Y = ab  vs  Z = abab
        let y = word(&[0, 1]);
        let x = y.concat(&y);
        let z = word(&[0, 1, 0, 1]);
        assert!(equal(&x, &z));
        assert!(!equal(&word(&[0, 1, 0, 1]), &word(&[0, 1, 1, 0])));
    }

    #[test]
    fn equal_huge_unary() {
        // a^(2^20) via doubling chain vs slp_power
        let n = 20;
        let mut rules: Vec<Vec<Item>> = vec![vec![Item::Sym(0)]];
        for i in 0..n {
            rules.push(vec![Item::Var(i), Item::Var(i)]);
        }
        let chain = Slp::from_rules(&rules, n).unwrap();
        let pow = slp_power(&Slp::leaf(0), &(BigUint::one() << 20)).unwrap();
        assert!(equal(&chain, &pow));
        // small analogue by expansion: n = 4
        let mut rules4: Vec<Vec<Item>> = vec![vec![Item::Sym(0)]];
        for i in 0..4 {
            rules4.push(vec![Item::Var(i), Item::Var(i)]);
        }
        let chain4 = Slp::from_rules(&rules4, 4).unwrap();
        assert_eq!(chain4.expand(100).unwrap(), vec![0; 16]);
    }

    #[test]
    fn equal_random_vs_expansion() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..300 {
            let n = rng.gen_range(1..=12);
            let m = rng.gen_range(1..=12);
            let u: Vec<usize> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            let v: Vec<usize> = (0..m).map(|_| rng.gen_range(0..3)).collect();
            let su = word(&u);
            let sv = word(&v);
            assert_eq!(equal(&su, &sv), u == v, "u={u:?} v={v:?}");
        }
    }

    #[test]
    fn equal_fibonacci_like() {
        // F0 = a, F1 = ab, F_{i+1} = F_i F_{i-1}: two different builds of F_10
        let mut rules: Vec<Vec<Item>> = vec![vec![Item::Sym(0)], vec![Item::Sym(0), Item::Sym(1)]];
        for i in 2..=10 {
            rules.push(vec![Item::Var(i - 1), Item::Var(i - 2)]);
        }
        let f = Slp::from_rules(&rules, 10).unwrap();
        let expanded = f.expand(1 << 12).unwrap();
        let direct = word(&expanded);
        assert!(equal(&f, &direct));
        let mut other = expanded;
        let last = other.len() - 1;
        other[last] ^= 1;
        assert!(!equal(&f, &word(&other)));
    }
}
