//! The block calculus behind the polynomial-time isomorphism check for
//! regular words: two-level systems (an upper expression dag over a
//! primitive, irredundant lower level), the merging relation and rewriting
//! system on block sequences, the main reduction step, and the top-level
//! deciders for words, linear orders and ordered trees.

mod circuit;
mod deciders;
mod mainstep;
mod rewrite;

pub use circuit::{parse_circuit, write_circuit, GateDef, LayerKind, LayeredCircuit};
pub use deciders::{
    order_iso, ordered_tree_iso, ordered_tree_iso_prefix_closed, ses_iso, ses_iso_pair,
    ses_iso_pair_with, ses_iso_with, word_iso, IsoStats, SesIsoOptions,
};
pub use mainstep::{
    bad_shape_vars, height_bookkeeping_ok, main_step, prepare_for_main_step, validate_proper,
    MainStepResult,
};
pub use rewrite::{
    make_good, make_good_periodic, make_irredundant, one_step_rewrites, rewrite_normalize,
    PeriodicDirection, Strategy,
};

use crate::automata::Alphabet;
use crate::words::{Expr, ExtendedForm, PrimitiveForm, Ses};
use std::collections::BTreeMap;

pub type LoId = usize;
pub type UpId = usize;

/// Reference to a variable of a two-level system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Ref {
    Lo(LoId),
    Up(UpId),
}

impl Ref {
    pub fn lo(self) -> Option<LoId> {
        match self {
            Ref::Lo(l) => Some(l),
            Ref::Up(_) => None,
        }
    }

    pub fn is_lo(self) -> bool {
        matches!(self, Ref::Lo(_))
    }
}

/// Right-hand side of an upper-level variable, in normal form over
/// references to lower and upper variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UpRhs {
    Concat(Vec<Ref>),
    Omega(Ref),
    OmegaBar(Ref),
    Shuffle(Vec<Ref>),
}

impl UpRhs {
    pub fn refs(&self) -> Vec<Ref> {
        match self {
            UpRhs::Concat(rs) | UpRhs::Shuffle(rs) => rs.clone(),
            UpRhs::Omega(r) | UpRhs::OmegaBar(r) => vec![*r],
        }
    }
}

/// First/second/last/second-last block bookkeeping for an upper variable;
/// every recorded block is the value of a lower variable.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TecRecord {
    pub first_block: Option<LoId>,
    pub second_block: Option<LoId>,
    pub last_block: Option<LoId>,
    pub second_last_block: Option<LoId>,
}

/// A two-level system: a lower level of primitive words (carried as normal
/// forms) and an upper expression dag over references into both levels.
#[derive(Debug, Clone)]
pub struct TwoLevelSystem {
    pub lo_forms: Vec<PrimitiveForm>,
    pub up_rhs: Vec<UpRhs>,
    /// Terminal alphabet of the lower level (kept for tracing).
    pub sigma: Alphabet,
    pub tec: Vec<TecRecord>,
}

impl TwoLevelSystem {
    pub fn lo_count(&self) -> usize {
        self.lo_forms.len()
    }

    pub fn up_count(&self) -> usize {
        self.up_rhs.len()
    }

    /// Upper variables in dependency order (referenced before referencing).
    pub fn up_topological(&self) -> Vec<UpId> {
        let n = self.up_rhs.len();
        let mut state = vec![0u8; n];
        let mut order = Vec::with_capacity(n);
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            state[root] = 1;
            while let Some((v, i)) = stack.pop() {
                let deps: Vec<UpId> = self.up_rhs[v]
                    .refs()
                    .into_iter()
                    .filter_map(|r| match r {
                        Ref::Up(u) => Some(u),
                        Ref::Lo(_) => None,
                    })
                    .collect();
                let mut descended = false;
                let mut i = i;
                while i < deps.len() {
                    let u = deps[i];
                    i += 1;
                    match state[u] {
                        0 => {
                            state[u] = 1;
                            stack.push((v, i));
                            stack.push((u, 0));
                            descended = true;
                            break;
                        }
                        1 => panic!("cyclic upper level"),
                        _ => {}
                    }
                }
                if !descended {
                    state[v] = 2;
                    order.push(v);
                }
            }
        }
        order
    }

    /// The upper part as an SES whose terminal alphabet has one symbol per
    /// lower variable.
    pub fn upper_as_ses(&self) -> Ses {
        let alphabet = Alphabet::new((0..self.lo_count()).map(|l| format!("b{l}")))
            .expect("nonempty lower level");
        let to_expr = |r: &Ref| match r {
            Ref::Lo(l) => Expr::Symbol(*l),
            Ref::Up(u) => Expr::Var(*u),
        };
        let rhs: Vec<Expr> = self
            .up_rhs
            .iter()
            .map(|r| match r {
                UpRhs::Concat(rs) => Expr::concat(rs.iter().map(to_expr).collect()),
                UpRhs::Omega(x) => Expr::omega(to_expr(x)),
                UpRhs::OmegaBar(x) => Expr::omega_bar(to_expr(x)),
                UpRhs::Shuffle(rs) => Expr::shuffle(rs.iter().map(to_expr).collect()),
            })
            .collect();
        let names = (0..self.up_count()).map(|u| format!("X{u}")).collect();
        Ses::new(names, alphabet, rhs, None).expect("upper level is a valid SES")
    }

    /// A readable dump of the whole system in SES syntax (used by --trace).
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (l, f) in self.lo_forms.iter().enumerate() {
            out.push_str(&format!("  lo b{l} = {}\n", describe_form(f, &self.sigma)));
        }
        let ses = self.upper_as_ses();
        for (u, _) in self.up_rhs.iter().enumerate() {
            let mut s = String::new();
            crate::words::write_ses(&ses)
                .lines()
                .filter(|line| line.starts_with(&format!("X{u} =")))
                .for_each(|line| s.push_str(line));
            out.push_str(&format!("  up {s}\n"));
        }
        out
    }
}

fn describe_form(f: &PrimitiveForm, sigma: &Alphabet) -> String {
    let show = |s: &crate::slp::Slp| -> String {
        match s.expand(32) {
            Some(w) => w.iter().map(|&c| sigma.symbol(c)).collect::<Vec<_>>().join(""),
            None => format!("<{} letters>", crate::slp::slp_length(s)),
        }
    };
    match f {
        PrimitiveForm::Finite(s) => show(s),
        PrimitiveForm::RightRay(v, w) => format!(
            "{}({})^omega",
            v.as_ref().map(&show).unwrap_or_default(),
            show(w)
        ),
        PrimitiveForm::LeftRay(u, v) => format!(
            "({})^omegabar{}",
            show(u),
            v.as_ref().map(&show).unwrap_or_default()
        ),
        PrimitiveForm::BiRay(u, v, w) => format!(
            "({})^omegabar{}({})^omega",
            show(u),
            v.as_ref().map(&show).unwrap_or_default(),
            show(w)
        ),
        PrimitiveForm::Uniform(g) => {
            let syms: Vec<&str> = g.iter().map(|&c| sigma.symbol(c)).collect();
            format!("[{}]^eta", syms.join(","))
        }
    }
}

/// Does a pair or triple of primitive words merge (fuse blocks when
/// concatenated)? A pair merges iff both are uniform over the same set or
/// the first is right-closed and the second left-closed; a triple merges
/// iff an adjacent pair does or the outer two are uniform over the same set
/// and the middle is a single symbol of it.
pub fn merges(forms: &[&PrimitiveForm]) -> bool {
    let pair = |a: &PrimitiveForm, b: &PrimitiveForm| -> bool {
        if let (Some(g1), Some(g2)) = (a.uniform_set(), b.uniform_set()) {
            return g1 == g2;
        }
        a.is_right_closed() && b.is_left_closed()
    };
    match forms {
        [a, b] => pair(a, b),
        [a, b, c] => {
            if pair(a, b) || pair(b, c) {
                return true;
            }
            match (a.uniform_set(), b.single_symbol(), c.uniform_set()) {
                (Some(g1), Some(s), Some(g2)) => g1 == g2 && g1.contains(&s),
                _ => false,
            }
        }
        _ => panic!("merges takes a pair or a triple"),
    }
}

/// Block boundary facts for a reference: which lower variables carry the
/// first/second/last/second-last blocks of its value (when they exist).
/// Relies on all constructed right-hand sides being non-merging.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlockFacts {
    pub first: Option<LoId>,
    pub second: Option<LoId>,
    pub last: Option<LoId>,
    pub second_last: Option<LoId>,
}

pub fn block_facts(sys: &TwoLevelSystem, r: Ref, memo: &mut BTreeMap<UpId, BlockFacts>) -> BlockFacts {
    match r {
        Ref::Lo(l) => BlockFacts { first: Some(l), second: None, last: Some(l), second_last: None },
        Ref::Up(x) => {
            if let Some(f) = memo.get(&x) {
                return f.clone();
            }
            let facts = match &sys.up_rhs[x] {
                UpRhs::Shuffle(_) => BlockFacts::default(),
                UpRhs::Omega(y) => {
                    let fy = block_facts(sys, *y, memo);
                    let second = match *y {
                        Ref::Lo(l) => Some(l), // Y Y Y...: the second block is Y again
                        Ref::Up(_) => fy.second,
                    };
                    BlockFacts { first: fy.first, second, last: None, second_last: None }
                }
                UpRhs::OmegaBar(y) => {
                    let fy = block_facts(sys, *y, memo);
                    let second_last = match *y {
                        Ref::Lo(l) => Some(l),
                        Ref::Up(_) => fy.second_last,
                    };
                    BlockFacts { first: None, second: None, last: fy.last, second_last }
                }
                UpRhs::Concat(rs) => {
                    let head = block_facts(sys, rs[0], memo);
                    let (first, second) = match (rs[0], head.first) {
                        (_, None) => (None, None),
                        (Ref::Lo(l), _) => {
                            let second = rs.get(1).map(|&r2| block_facts(sys, r2, memo).first).unwrap_or(None);
                            (Some(l), second)
                        }
                        (Ref::Up(_), f) => (f, head.second),
                    };
                    let tail = block_facts(sys, *rs.last().unwrap(), memo);
                    let (last, second_last) = match (*rs.last().unwrap(), tail.last) {
                        (_, None) => (None, None),
                        (Ref::Lo(l), _) => {
                            let second_last = if rs.len() >= 2 {
                                block_facts(sys, rs[rs.len() - 2], memo).last
                            } else {
                                None
                            };
                            (Some(l), second_last)
                        }
                        (Ref::Up(_), f) => (f, tail.second_last),
                    };
                    BlockFacts { first, second, last, second_last }
                }
            };
            memo.insert(x, facts.clone());
            facts
        }
    }
}

/// Merge adjudication for sequences that may contain non-primitive entries:
/// a pair with a non-primitive member merges iff the corresponding boundary
/// blocks merge, and a member without a boundary block never merges on that
/// side.
fn pair_merges_refs(sys: &TwoLevelSystem, a: Ref, b: Ref, memo: &mut BTreeMap<UpId, BlockFacts>) -> bool {
    let fa = block_facts(sys, a, memo);
    let fb = block_facts(sys, b, memo);
    match (fa.last, fb.first) {
        (Some(x), Some(y)) => merges(&[&sys.lo_forms[x], &sys.lo_forms[y]]),
        _ => false,
    }
}

fn triple_merges_refs(sys: &TwoLevelSystem, a: Ref, b: Ref, c: Ref, memo: &mut BTreeMap<UpId, BlockFacts>) -> bool {
    if pair_merges_refs(sys, a, b, memo) || pair_merges_refs(sys, b, c, memo) {
        return true;
    }
    // the middle entry must be a single block (a primitive word)
    let Ref::Lo(m) = b else { return false };
    let fa = block_facts(sys, a, memo);
    let fc = block_facts(sys, c, memo);
    match (fa.last, fc.first) {
        (Some(x), Some(y)) => merges(&[&sys.lo_forms[x], &sys.lo_forms[m], &sys.lo_forms[y]]),
        _ => false,
    }
}

/// Does the whole sequence avoid merging?
pub fn seq_non_merging(sys: &TwoLevelSystem, seq: &[Ref]) -> bool {
    let mut memo = BTreeMap::new();
    for w in seq.windows(2) {
        if pair_merges_refs(sys, w[0], w[1], &mut memo) {
            return false;
        }
    }
    for w in seq.windows(3) {
        if triple_merges_refs(sys, w[0], w[1], w[2], &mut memo) {
            return false;
        }
    }
    true
}

/// Irreducibility with respect to the rewriting system: no all-primitive
/// pair or triple of adjacent entries forms a left-hand side. Non-primitive
/// entries are never rewritten.
pub fn is_irreducible(sys: &TwoLevelSystem, seq: &[Ref]) -> bool {
    for w in seq.windows(2) {
        if let (Ref::Lo(a), Ref::Lo(b)) = (w[0], w[1]) {
            if merges(&[&sys.lo_forms[a], &sys.lo_forms[b]]) {
                return false;
            }
        }
    }
    for w in seq.windows(3) {
        if let (Ref::Lo(a), Ref::Lo(b), Ref::Lo(c)) = (w[0], w[1], w[2]) {
            if merges(&[&sys.lo_forms[a], &sys.lo_forms[b], &sys.lo_forms[c]]) {
                return false;
            }
        }
    }
    true
}

/// The boundary conditions around non-primitive entries: every entry with a
/// first (last) block is guarded on that side by a uniform primitive
/// neighbor or by two primitive neighbors, without merging.
pub fn is_semi_good(sys: &TwoLevelSystem, seq: &[Ref]) -> bool {
    let mut memo = BTreeMap::new();
    for (i, &r) in seq.iter().enumerate() {
        let Ref::Up(x) = r else { continue };
        let facts = block_facts(sys, Ref::Up(x), &mut memo);
        if let Some(fb) = facts.first {
            let ok1 = i >= 1
                && matches!(seq[i - 1], Ref::Lo(l) if sys.lo_forms[l].is_uniform()
                    && !merges(&[&sys.lo_forms[l], &sys.lo_forms[fb]]));
            let ok2 = i >= 2
                && seq[i - 1].is_lo()
                && seq[i - 2].is_lo()
                && !merges(&[
                    &sys.lo_forms[seq[i - 2].lo().unwrap()],
                    &sys.lo_forms[seq[i - 1].lo().unwrap()],
                    &sys.lo_forms[fb],
                ]);
            if !(ok1 || ok2) {
                return false;
            }
        }
        if let Some(lb) = facts.last {
            let ok1 = i + 1 < seq.len()
                && matches!(seq[i + 1], Ref::Lo(l) if sys.lo_forms[l].is_uniform()
                    && !merges(&[&sys.lo_forms[lb], &sys.lo_forms[l]]));
            let ok2 = i + 2 < seq.len()
                && seq[i + 1].is_lo()
                && seq[i + 2].is_lo()
                && !merges(&[
                    &sys.lo_forms[lb],
                    &sys.lo_forms[seq[i + 1].lo().unwrap()],
                    &sys.lo_forms[seq[i + 2].lo().unwrap()],
                ]);
            if !(ok1 || ok2) {
                return false;
            }
        }
    }
    true
}

/// good = irreducible + semi-good.
pub fn is_good(sys: &TwoLevelSystem, seq: &[Ref]) -> bool {
    is_irreducible(sys, seq) && is_semi_good(sys, seq)
}

/// The value-level form of a reference: the classification algebra applied
/// over the actual lower-level forms (not over abstract skeleton letters).
pub fn value_form(sys: &TwoLevelSystem, r: Ref, memo: &mut BTreeMap<UpId, ExtendedForm>) -> ExtendedForm {
    match r {
        Ref::Lo(l) => ExtendedForm::Primitive(sys.lo_forms[l].clone()),
        Ref::Up(x) => {
            if let Some(f) = memo.get(&x) {
                return f.clone();
            }
            // reuse the SES classification by building a tiny one-level view
            let rhs = &sys.up_rhs[x];
            let sub: Vec<ExtendedForm> =
                rhs.refs().iter().map(|&rr| value_form(sys, rr, memo)).collect();
            let f = classify_rhs_with(rhs, &sub);
            memo.insert(x, f.clone());
            f
        }
    }
}

/// Apply the classification algebra to one rhs whose references have the
/// given forms (in `refs()` order).
fn classify_rhs_with(rhs: &UpRhs, sub: &[ExtendedForm]) -> ExtendedForm {
    use crate::words::{combine_concat, combine_omega, combine_omega_bar, combine_shuffle};
    match rhs {
        UpRhs::Concat(_) => combine_concat(sub),
        UpRhs::Omega(_) => combine_omega(&sub[0]),
        UpRhs::OmegaBar(_) => combine_omega_bar(&sub[0]),
        UpRhs::Shuffle(_) => combine_shuffle(sub),
    }
}
