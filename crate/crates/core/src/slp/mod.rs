//! Straight-line programs: succinct representations of finite words as
//! concatenation-only expression dags. The derived word may be exponentially
//! longer than the program, so all positions and lengths are big integers and
//! equality / factor queries run on the compressed form.

mod ap;
mod factor;
mod recompress;

use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Terminal symbol id. The SLP layer does not know symbol names; callers
/// keep an [`crate::automata::Alphabet`] (or a variable universe) beside it.
pub type Sym = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    Leaf(Sym),
    Cat(usize, usize),
}

/// A straight-line program in binary form: a dag of concatenations whose
/// leaves are single symbols. Every node derives a nonempty word.
#[derive(Debug, Clone)]
pub struct Slp {
    nodes: Vec<Node>,
    lens: Vec<BigUint>,
    root: usize,
}

/// Right-hand side item for rule-based construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Item {
    Sym(Sym),
    Var(usize),
}

impl Slp {
    pub fn leaf(sym: Sym) -> Slp {
        Slp { nodes: vec![Node::Leaf(sym)], lens: vec![BigUint::one()], root: 0 }
    }

    /// Word given explicitly: a balanced concatenation tree.
    pub fn from_word(word: &[Sym]) -> Result<Slp> {
        if word.is_empty() {
            return Err(Error::InvalidInput("an SLP derives a nonempty word".into()));
        }
        let mut slp = Slp { nodes: Vec::new(), lens: Vec::new(), root: 0 };
        let root = slp.build_balanced(word);
        slp.root = root;
        Ok(slp)
    }

    fn build_balanced(&mut self, word: &[Sym]) -> usize {
        if word.len() == 1 {
            return self.push(Node::Leaf(word[0]));
        }
        let mid = word.len() / 2;
        let l = self.build_balanced(&word[..mid]);
        let r = self.build_balanced(&word[mid..]);
        self.push(Node::Cat(l, r))
    }

    /// Build from variable rules `rhs[v]` (sequences over symbols and other
    /// variables) with designated root variable. The variable reference
    /// relation must be acyclic and every rule nonempty.
    pub fn from_rules(rules: &[Vec<Item>], root_var: usize) -> Result<Slp> {
        let n = rules.len();
        if root_var >= n {
            return Err(Error::InvalidInput("root variable out of range".into()));
        }
        // topological order by iterative DFS, rejecting cycles
        let mut state = vec![0u8; n]; // 0 unseen, 1 active, 2 done
        let mut order = Vec::new();
        let mut stack: Vec<(usize, usize)> = vec![(root_var, 0)];
        state[root_var] = 1;
        while let Some((v, i)) = stack.pop() {
            if rules[v].is_empty() {
                return Err(Error::InvalidInput(format!("empty right-hand side for variable {v}")));
            }
            let mut descended = false;
            let mut i = i;
            while i < rules[v].len() {
                let item = rules[v][i];
                i += 1;
                if let Item::Var(u) = item {
                    if u >= n {
                        return Err(Error::InvalidInput(format!("variable {u} out of range")));
                    }
                    match state[u] {
                        0 => {
                            state[u] = 1;
                            stack.push((v, i));
                            stack.push((u, 0));
                            descended = true;
                            break;
                        }
                        1 => {
                            return Err(Error::InvalidInput("cyclic variable references in SLP".into()));
                        }
                        _ => {}
                    }
                }
            }
            if !descended {
                state[v] = 2;
                order.push(v);
            }
        }
        let mut slp = Slp { nodes: Vec::new(), lens: Vec::new(), root: 0 };
        let mut node_of = vec![usize::MAX; n];
        for &v in &order {
            let mut cur: Option<usize> = None;
            for &item in &rules[v] {
                let nd = match item {
                    Item::Sym(s) => slp.push(Node::Leaf(s)),
                    Item::Var(u) => node_of[u],
                };
                cur = Some(match cur {
                    None => nd,
                    Some(c) => slp.push(Node::Cat(c, nd)),
                });
            }
            node_of[v] = cur.unwrap();
        }
        slp.root = node_of[root_var];
        Ok(slp)
    }

    fn push(&mut self, node: Node) -> usize {
        let len = match node {
            Node::Leaf(_) => BigUint::one(),
            Node::Cat(l, r) => &self.lens[l] + &self.lens[r],
        };
        self.nodes.push(node);
        self.lens.push(len);
        self.nodes.len() - 1
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node(&self, id: usize) -> Node {
        self.nodes[id]
    }

    pub fn node_len(&self, id: usize) -> &BigUint {
        &self.lens[id]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// |val|, an arbitrary-precision natural.
    pub fn len(&self) -> &BigUint {
        &self.lens[self.root]
    }

    pub fn is_empty(&self) -> bool {
        false // an SLP always derives a nonempty word
    }

    /// Concatenation val(self)val(other).
    pub fn concat(&self, other: &Slp) -> Slp {
        let mut out = self.clone();
        let offset = out.nodes.len();
        for (i, n) in other.nodes.iter().enumerate() {
            let shifted = match *n {
                Node::Leaf(s) => Node::Leaf(s),
                Node::Cat(l, r) => Node::Cat(l + offset, r + offset),
            };
            out.nodes.push(shifted);
            out.lens.push(other.lens[i].clone());
        }
        let l = out.root;
        let r = other.root + offset;
        out.root = out.nodes.len();
        out.nodes.push(Node::Cat(l, r));
        let len = &out.lens[l] + &out.lens[r];
        out.lens.push(len);
        out
    }

    /// val reversed; node ids are preserved (node i derives the reversal of
    /// what node i derived before).
    pub fn reverse(&self) -> Slp {
        let nodes = self
            .nodes
            .iter()
            .map(|n| match *n {
                Node::Leaf(s) => Node::Leaf(s),
                Node::Cat(l, r) => Node::Cat(r, l),
            })
            .collect();
        Slp { nodes, lens: self.lens.clone(), root: self.root }
    }

    /// Reachable node set from `from`, in increasing id order.
    pub fn reachable_from(&self, from: usize) -> Vec<usize> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![from];
        seen[from] = true;
        while let Some(v) = stack.pop() {
            if let Node::Cat(l, r) = self.nodes[v] {
                for c in [l, r] {
                    if !seen[c] {
                        seen[c] = true;
                        stack.push(c);
                    }
                }
            }
        }
        (0..self.nodes.len()).filter(|&i| seen[i]).collect()
    }

    /// Explicit expansion, refused if longer than `cap` symbols.
    pub fn expand(&self, cap: usize) -> Option<Vec<Sym>> {
        self.expand_node(self.root, cap)
    }

    pub fn expand_node(&self, node: usize, cap: usize) -> Option<Vec<Sym>> {
        if self.lens[node] > BigUint::from(cap) {
            return None;
        }
        let total = self.lens[node].to_usize()?;
        let mut out = Vec::with_capacity(total);
        let mut stack = vec![node];
        while let Some(v) = stack.pop() {
            match self.nodes[v] {
                Node::Leaf(s) => out.push(s),
                Node::Cat(l, r) => {
                    stack.push(r);
                    stack.push(l);
                }
            }
        }
        Some(out)
    }

    /// First symbol of val(node).
    pub fn first_sym(&self, mut node: usize) -> Sym {
        loop {
            match self.nodes[node] {
                Node::Leaf(s) => return s,
                Node::Cat(l, _) => node = l,
            }
        }
    }

    /// Last symbol of val(node).
    pub fn last_sym(&self, mut node: usize) -> Sym {
        loop {
            match self.nodes[node] {
                Node::Leaf(s) => return s,
                Node::Cat(_, r) => node = r,
            }
        }
    }

    /// The symbol at 1-based position `i` of val(node).
    pub fn char_at_node(&self, mut node: usize, i: &BigUint) -> Result<Sym> {
        if i.is_zero() || i > &self.lens[node] {
            return Err(Error::OutOfRange(format!("position {i} not in 1..={}", self.lens[node])));
        }
        let mut i = i.clone();
        loop {
            match self.nodes[node] {
                Node::Leaf(s) => return Ok(s),
                Node::Cat(l, r) => {
                    if i <= self.lens[l] {
                        node = l;
                    } else {
                        i -= self.lens[l].clone();
                        node = r;
                    }
                }
            }
        }
    }

    /// An SLP whose value is `val(node)[i..=j]` (1-based, inclusive).
    pub fn slice_node(&self, node: usize, i: &BigUint, j: &BigUint) -> Result<Slp> {
        if i.is_zero() || i > j || j > &self.lens[node] {
            return Err(Error::OutOfRange(format!(
                "slice {i}..={j} not within 1..={}",
                self.lens[node]
            )));
        }
        let mut out = self.clone();
        // suffix starting at i, then prefix of length j-i+1
        let suffix_root = out.suffix_from(node, i);
        let keep = j - i + BigUint::one();
        let root = out.prefix_of(suffix_root, &keep);
        out.root = root;
        Ok(out)
    }

    /// New node deriving the suffix of val(node) starting at 1-based `i`.
    fn suffix_from(&mut self, node: usize, i: &BigUint) -> usize {
        if i.is_one() {
            return node;
        }
        match self.nodes[node] {
            Node::Leaf(_) => node, // i == 1 handled above; i > 1 impossible within bounds
            Node::Cat(l, r) => {
                let ll = self.lens[l].clone();
                if i > &ll {
                    let i2 = i - ll;
                    self.suffix_from(r, &i2)
                } else {
                    let ls = self.suffix_from(l, i);
                    self.push(Node::Cat(ls, r))
                }
            }
        }
    }

    /// New node deriving the prefix of val(node) of length `t >= 1`.
    fn prefix_of(&mut self, node: usize, t: &BigUint) -> usize {
        if t == &self.lens[node] {
            return node;
        }
        match self.nodes[node] {
            Node::Leaf(_) => node,
            Node::Cat(l, r) => {
                let ll = self.lens[l].clone();
                if t <= &ll {
                    self.prefix_of(l, t)
                } else {
                    let t2 = t - ll;
                    let rp = self.prefix_of(r, &t2);
                    self.push(Node::Cat(l, rp))
                }
            }
        }
    }

    /// True iff every symbol of val equals `sym` (unary word check).
    pub fn is_unary(&self, sym: Sym) -> bool {
        self.reachable_from(self.root)
            .iter()
            .all(|&i| !matches!(self.nodes[i], Node::Leaf(s) if s != sym))
    }

    /// Some symbol occurring in val.
    pub fn any_sym(&self) -> Sym {
        self.first_sym(self.root)
    }

    /// True iff the single symbol `sym` occurs in val.
    pub fn contains_sym(&self, sym: Sym) -> bool {
        self.reachable_from(self.root)
            .iter()
            .any(|&i| matches!(self.nodes[i], Node::Leaf(s) if s == sym))
    }
}

/// |val(s)|.
pub fn slp_length(s: &Slp) -> BigUint {
    s.len().clone()
}

/// val(s)^k via binary exponentiation; k >= 1.
pub fn slp_power(s: &Slp, k: &BigUint) -> Result<Slp> {
    if k.is_zero() {
        return Err(Error::InvalidInput("slp_power requires k >= 1".into()));
    }
    let mut out = s.clone();
    let mut squares = vec![out.root];
    let bits = k.bits();
    for _ in 1..bits {
        let top = *squares.last().unwrap();
        let sq = out.push(Node::Cat(top, top));
        squares.push(sq);
    }
    let mut acc: Option<usize> = None;
    for b in 0..bits {
        if k.bit(b) {
            let part = squares[b as usize];
            acc = Some(match acc {
                None => part,
                Some(a) => out.push(Node::Cat(a, part)),
            });
        }
    }
    out.root = acc.unwrap();
    Ok(out)
}

/// val(s)[i..=j], 1-based inclusive.
pub fn slp_slice(s: &Slp, i: &BigUint, j: &BigUint) -> Result<Slp> {
    s.slice_node(s.root, i, j)
}

/// The i-th symbol of val(s), 1-based.
pub fn slp_char_at(s: &Slp, i: &BigUint) -> Result<Sym> {
    s.char_at_node(s.root, i)
}

/// Exact equality val(a) = val(b), decided deterministically. A fingerprint
/// comparison filters out unequal words quickly; equal fingerprints are
/// always confirmed by recompression.
pub fn slp_eq(a: &Slp, b: &Slp) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let ha = HashView::new(a);
    let hb = HashView::new(b);
    if ha.full(a.root) != hb.full(b.root) {
        return false;
    }
    recompress::equal(a, b)
}

/// Exact factor test: does val(p) occur in val(t)? Small instances go
/// through explicit expansion; large ones through compressed matching.
pub fn slp_factor(p: &Slp, t: &Slp) -> bool {
    factor::factor(p, t)
}

/// Longest common extension of val(a)[i..] and val(b)[j..] (1-based starts),
/// computed by fingerprint binary search with deterministic confirmation.
pub fn slp_lce(a: &Slp, anode: usize, i: &BigUint, b: &Slp, bnode: usize, j: &BigUint) -> BigUint {
    let ha = HashView::new(a);
    let hb = HashView::new(b);
    lce_with_views(a, &ha, anode, i, b, &hb, bnode, j)
}

pub(crate) fn lce_with_views(
    a: &Slp,
    ha: &HashView,
    anode: usize,
    i: &BigUint,
    b: &Slp,
    hb: &HashView,
    bnode: usize,
    j: &BigUint,
) -> BigUint {
    let rem_a = a.node_len(anode) - i + 1u32;
    let rem_b = b.node_len(bnode) - j + 1u32;
    let max = rem_a.min(rem_b);
    if max.is_zero() {
        return BigUint::zero();
    }
    // binary search on fingerprints
    let mut lo = BigUint::zero();
    let mut hi = max.clone();
    while lo < hi {
        let mid = (&lo + &hi + 1u32) >> 1;
        let fa = ha.range(a, anode, i, &mid);
        let fb = hb.range(b, bnode, j, &mid);
        if fa == fb {
            lo = mid;
        } else {
            hi = mid - 1u32;
        }
    }
    if confirm_lce(a, anode, i, b, bnode, j, &lo, &max) {
        return lo;
    }
    // fingerprint collision: redo the search with exact comparisons
    let mut lo = BigUint::zero();
    let mut hi = max.clone();
    while lo < hi {
        let mid = (&lo + &hi + 1u32) >> 1;
        let ea = a.slice_node(anode, i, &(i + &mid - 1u32)).unwrap();
        let eb = b.slice_node(bnode, j, &(j + &mid - 1u32)).unwrap();
        if slp_eq(&ea, &eb) {
            lo = mid;
        } else {
            hi = mid - 1u32;
        }
    }
    lo
}

/// Verify that h is exactly the lce: prefixes of length h agree and either
/// h is maximal or the next characters differ.
fn confirm_lce(
    a: &Slp,
    anode: usize,
    i: &BigUint,
    b: &Slp,
    bnode: usize,
    j: &BigUint,
    h: &BigUint,
    max: &BigUint,
) -> bool {
    if !h.is_zero() {
        let ea = a.slice_node(anode, i, &(i + h - 1u32)).unwrap();
        let eb = b.slice_node(bnode, j, &(j + h - 1u32)).unwrap();
        if ea.len() != eb.len() || !recompress::equal(&ea, &eb) {
            return false;
        }
    }
    if h == max {
        return true;
    }
    let ca = a.char_at_node(anode, &(i + h)).unwrap();
    let cb = b.char_at_node(bnode, &(j + h)).unwrap();
    ca != cb
}

const HP1: u128 = (1 << 61) - 1; // Mersenne prime 2^61-1
const HP2: u128 = 2_305_843_009_213_693_921; // prime < 2^61
const HB1: u128 = 1_000_003;
const HB2: u128 = 2_000_039;

fn mulmod(a: u64, b: u64, p: u128) -> u64 {
    ((a as u128 * b as u128) % p) as u64
}

fn addmod(a: u64, b: u64, p: u128) -> u64 {
    (((a as u128) + (b as u128)) % p) as u64
}

/// Per-node polynomial fingerprints over two 61-bit prime fields.
pub(crate) struct HashView {
    h1: Vec<u64>,
    pw1: Vec<u64>,
    h2: Vec<u64>,
    pw2: Vec<u64>,
}

type Fp = ((u64, u64), (u64, u64)); // ((h1, pw1), (h2, pw2))

fn combine(a: Fp, b: Fp) -> Fp {
    let h1 = addmod(a.0 .0, mulmod(a.0 .1, b.0 .0, HP1), HP1);
    let pw1 = mulmod(a.0 .1, b.0 .1, HP1);
    let h2 = addmod(a.1 .0, mulmod(a.1 .1, b.1 .0, HP2), HP2);
    let pw2 = mulmod(a.1 .1, b.1 .1, HP2);
    ((h1, pw1), (h2, pw2))
}

impl HashView {
    pub fn new(s: &Slp) -> HashView {
        let n = s.node_count();
        let mut v = HashView { h1: vec![0; n], pw1: vec![0; n], h2: vec![0; n], pw2: vec![0; n] };
        for i in 0..n {
            match s.node(i) {
                Node::Leaf(sym) => {
                    let x = (sym as u64).wrapping_add(1);
                    v.h1[i] = (x as u128 % HP1) as u64;
                    v.pw1[i] = HB1 as u64;
                    v.h2[i] = (x as u128 % HP2) as u64;
                    v.pw2[i] = HB2 as u64;
                }
                Node::Cat(l, r) => {
                    let c = combine(((v.h1[l], v.pw1[l]), (v.h2[l], v.pw2[l])), ((v.h1[r], v.pw1[r]), (v.h2[r], v.pw2[r])));
                    v.h1[i] = c.0 .0;
                    v.pw1[i] = c.0 .1;
                    v.h2[i] = c.1 .0;
                    v.pw2[i] = c.1 .1;
                }
            }
        }
        v
    }

    pub fn full(&self, node: usize) -> (u64, u64) {
        (self.h1[node], self.h2[node])
    }

    /// Fingerprint of val(node)[start .. start+len-1], 1-based.
    pub fn range(&self, s: &Slp, node: usize, start: &BigUint, len: &BigUint) -> (u64, u64) {
        let f = self.range_fp(s, node, &(start - 1u32), len);
        (f.0 .0, f.1 .0)
    }

    fn node_fp(&self, node: usize) -> Fp {
        ((self.h1[node], self.pw1[node]), (self.h2[node], self.pw2[node]))
    }

    fn range_fp(&self, s: &Slp, node: usize, start0: &BigUint, len: &BigUint) -> Fp {
        debug_assert!(!len.is_zero());
        if start0.is_zero() && len == s.node_len(node) {
            return self.node_fp(node);
        }
        match s.node(node) {
            Node::Leaf(_) => self.node_fp(node),
            Node::Cat(l, r) => {
                let ll = s.node_len(l).clone();
                if start0 >= &ll {
                    let s0 = start0 - ll;
                    self.range_fp(s, r, &s0, len)
                } else if start0 + len <= ll {
                    self.range_fp(s, l, start0, len)
                } else {
                    let left_len = &ll - start0;
                    let right_len = len - &left_len;
                    let fl = self.range_fp(s, l, start0, &left_len);
                    let fr = self.range_fp(s, r, &BigUint::zero(), &right_len);
                    combine(fl, fr)
                }
            }
        }
    }
}

/// KMP substring search over expanded words (used by the small-size path).
pub(crate) fn kmp_contains(pattern: &[Sym], text: &[Sym]) -> bool {
    if pattern.is_empty() {
        return true;
    }
    if pattern.len() > text.len() {
        return false;
    }
    let mut fail = vec![0usize; pattern.len()];
    let mut k = 0;
    for i in 1..pattern.len() {
        while k > 0 && pattern[i] != pattern[k] {
            k = fail[k - 1];
        }
        if pattern[i] == pattern[k] {
            k += 1;
        }
        fail[i] = k;
    }
    let mut k = 0;
    for &c in text {
        while k > 0 && c != pattern[k] {
            k = fail[k - 1];
        }
        if c == pattern[k] {
            k += 1;
            if k == pattern.len() {
                return true;
            }
        }
    }
    false
}

pub use recompress::equal as slp_eq_recompression;

#[cfg(test)]
mod tests {
    use super::*;

    fn word(w: &[usize]) -> Slp {
        Slp::from_word(w).unwrap()
    }

    #[test]
    fn length_basics() {
        assert_eq!(slp_length(&Slp::leaf(0)), BigUint::one());
        let y = word(&[0, 1, 0]);
        let z = word(&[1, 1, 0, 0]);
        assert_eq!(slp_length(&y.concat(&z)), BigUint::from(7u32));
    }

    #[test]
    fn doubling_chain_length() {
        // X_i = X_{i+1} X_{i+1}, X_n = a, n = 20 -> |val| = 2^20
        let n = 20;
        let mut rules: Vec<Vec<Item>> = vec![vec![Item::Sym(0)]];
        for i in 0..n {
            rules.push(vec![Item::Var(i), Item::Var(i)]);
        }
        let s = Slp::from_rules(&rules, n).unwrap();
        assert_eq!(slp_length(&s), BigUint::from(1u32) << 20);
    }

    #[test]
    fn power_examples() {
        let ab = word(&[0, 1]);
        let p1 = slp_power(&ab, &BigUint::one()).unwrap();
        assert_eq!(p1.expand(10).unwrap(), vec![0, 1]);
        let p3 = slp_power(&ab, &BigUint::from(3u32)).unwrap();
        assert_eq!(p3.expand(10).unwrap(), vec![0, 1, 0, 1, 0, 1]);
        assert!(slp_power(&ab, &BigUint::zero()).is_err());
        let big = slp_power(&Slp::leaf(0), &(BigUint::one() << 30)).unwrap();
        assert_eq!(slp_length(&big), BigUint::one() << 30);
        assert!(big.node_count() <= 1 + 2 * 30 + 4);
    }

    #[test]
    fn slice_examples() {
        let abab = word(&[0, 1, 0, 1]);
        let s = slp_slice(&abab, &BigUint::from(2u32), &BigUint::from(3u32)).unwrap();
        assert_eq!(s.expand(10).unwrap(), vec![1, 0]);
        let full = slp_slice(&abab, &BigUint::one(), &BigUint::from(4u32)).unwrap();
        assert_eq!(full.expand(10).unwrap(), vec![0, 1, 0, 1]);
        assert!(slp_slice(&abab, &BigUint::from(3u32), &BigUint::from(2u32)).is_err());
        assert!(slp_slice(&abab, &BigUint::zero(), &BigUint::from(2u32)).is_err());

        // a^(2^20) sliced keeps length and content
        let big = slp_power(&Slp::leaf(0), &(BigUint::one() << 20)).unwrap();
        let i = BigUint::from(5u32);
        let j = (BigUint::one() << 20) - 5u32;
        let sl = slp_slice(&big, &i, &j).unwrap();
        assert_eq!(slp_length(&sl), (BigUint::one() << 20) - 9u32);
        assert_eq!(slp_char_at(&sl, &BigUint::from(12345u32)).unwrap(), 0);
    }

    #[test]
    fn char_at_examples() {
        let abc = word(&[0, 1, 2]);
        assert_eq!(slp_char_at(&abc, &BigUint::from(2u32)).unwrap(), 1);
        let ab8 = slp_power(&word(&[0, 1]), &BigUint::from(8u32)).unwrap();
        assert_eq!(slp_char_at(&ab8, &BigUint::from(7u32)).unwrap(), 0);
        assert!(slp_char_at(&abc, &BigUint::from(4u32)).is_err());
    }

    #[test]
    fn reverse_works() {
        let w = word(&[0, 1, 2, 2]);
        assert_eq!(w.reverse().expand(10).unwrap(), vec![2, 2, 1, 0]);
    }

    #[test]
    fn lce_simple() {
        let a = word(&[0, 1, 0, 1, 1]);
        let b = word(&[0, 1, 0, 0]);
        let h = slp_lce(&a, a.root(), &BigUint::one(), &b, b.root(), &BigUint::one());
        assert_eq!(h, BigUint::from(3u32));
    }
}
