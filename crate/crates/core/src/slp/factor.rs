//! Factor queries on compressed words. Small instances are expanded and
//! searched directly; large ones are decided on the compressed form by
//! tabulating, for every pattern node and every text node, the arithmetic
//! progression of pattern occurrences that cover the text node's split
//! point. Progression filtering uses longest-common-extension queries and
//! the periodicity of overlapping occurrences, so each table entry costs a
//! constant number of extensions.

use super::ap::Ap;
use super::{kmp_contains, lce_with_views, slp_eq, slp_power, HashView, Node, Slp};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use std::collections::HashMap;

/// Expansion threshold: below this both sides are expanded and searched.
const EXPAND_LIMIT: usize = 1_000_000;

pub fn factor(p: &Slp, t: &Slp) -> bool {
    if p.len() > t.len() {
        return false;
    }
    if p.len().is_one() {
        return t.contains_sym(p.first_sym(p.root()));
    }
    // unary fast path: pattern all one symbol
    let a = p.first_sym(p.root());
    if p.is_unary(a) {
        return max_block_of(t, a) >= *p.len();
    }
    let limit = BigUint::from(EXPAND_LIMIT);
    if *p.len() <= limit && *t.len() <= limit {
        let pe = p.expand(EXPAND_LIMIT).unwrap();
        let te = t.expand(EXPAND_LIMIT).unwrap();
        return kmp_contains(&pe, &te);
    }
    fcpm(p, t)
}

/// Longest run of symbol `a` anywhere in val(t).
fn max_block_of(t: &Slp, a: usize) -> BigUint {
    // per node: (prefix run, suffix run, best internal run, node length)
    let mut pre: HashMap<usize, BigUint> = HashMap::new();
    let mut suf: HashMap<usize, BigUint> = HashMap::new();
    let mut best: HashMap<usize, BigUint> = HashMap::new();
    for i in t.reachable_from(t.root()) {
        match t.node(i) {
            Node::Leaf(s) => {
                let one = if s == a { BigUint::one() } else { BigUint::zero() };
                pre.insert(i, one.clone());
                suf.insert(i, one.clone());
                best.insert(i, one);
            }
            Node::Cat(l, r) => {
                let mid = &suf[&l] + &pre[&r];
                let b = best[&l].clone().max(best[&r].clone()).max(mid);
                let p = if pre[&l] == *t.node_len(l) { &pre[&l] + &pre[&r] } else { pre[&l].clone() };
                let s = if suf[&r] == *t.node_len(r) { &suf[&r] + &suf[&l] } else { suf[&r].clone() };
                pre.insert(i, p);
                suf.insert(i, s);
                best.insert(i, b);
            }
        }
    }
    best[&t.root()].clone()
}

struct Matcher<'a> {
    p: &'a Slp,
    t: &'a Slp,
    rp: Slp,
    rt: Slp,
    vp: HashView,
    vt: HashView,
    vrp: HashView,
    vrt: HashView,
    occ: HashMap<(usize, usize), Ap>,
}

/// Fully compressed matching on the occurrence tables.
pub(crate) fn fcpm(p: &Slp, t: &Slp) -> bool {
    let rp = p.reverse();
    let rt = t.reverse();
    let m = Matcher {
        vp: HashView::new(p),
        vt: HashView::new(t),
        vrp: HashView::new(&rp),
        vrt: HashView::new(&rt),
        p,
        t,
        rp,
        rt,
        occ: HashMap::new(),
    };
    m.run()
}

impl<'a> Matcher<'a> {
    fn run(mut self) -> bool {
        let pat_nodes = self.p.reachable_from(self.p.root());
        let text_nodes: Vec<usize> = self
            .t
            .reachable_from(self.t.root())
            .into_iter()
            .filter(|&x| matches!(self.t.node(x), Node::Cat(..)))
            .collect();
        for &pn in &pat_nodes {
            for &tn in &text_nodes {
                let ap = self.occurrences_at_cut(pn, tn);
                self.occ.insert((pn, tn), ap);
            }
        }
        let root = self.p.root();
        text_nodes.iter().any(|&tn| !self.occ[&(root, tn)].is_empty())
    }

    fn occurrences_at_cut(&mut self, pn: usize, tn: usize) -> Ap {
        let (tl, _tr) = match self.t.node(tn) {
            Node::Cat(l, r) => (l, r),
            Node::Leaf(_) => return Ap::empty(),
        };
        let cut = self.t.node_len(tl).clone();
        let n = self.t.node_len(tn).clone();
        let plen = self.p.node_len(pn).clone();
        if plen > n {
            return Ap::empty();
        }
        // window of occurrence starts that cover position `cut`
        let lo = if cut >= plen { &cut - &plen + 1u32 } else { BigUint::one() };
        let hi = cut.clone().min(&n - &plen + 1u32);
        if lo > hi {
            return Ap::empty();
        }
        match self.p.node(pn) {
            Node::Leaf(sym) => {
                // single letter at position `cut`
                let at = self.t.last_sym(tl);
                if at == sym && cut >= lo && cut <= hi {
                    Ap::singleton(cut)
                } else {
                    Ap::empty()
                }
            }
            Node::Cat(a, b) => {
                let la = self.p.node_len(a).clone();
                let lb = self.p.node_len(b).clone();
                // branch 1: the cut falls inside the A-part
                let cand1 = self.occ[&(a, tn)].clip(&lo, &hi);
                let f1 = self.filter_next(false, tn, &n, &cand1, &la, b);
                // branch 2: the cut falls inside the B-part
                let lo2 = &lo + &la;
                let hi2 = &hi + &la;
                let cand2 = self.occ[&(b, tn)].clip(&lo2, &hi2);
                let f2 = if cand2.is_empty() {
                    Ap::empty()
                } else {
                    // mirror into reversed coordinates: rev(B) occurrences
                    // followed immediately by rev(A)
                    let rev_start = &n - &cand2.last() - &lb + 2u32;
                    let rev_ap =
                        Ap { start: rev_start, diff: cand2.diff.clone(), count: cand2.count.clone() };
                    let fr = self.filter_next(true, tn, &n, &rev_ap, &lb, a);
                    if fr.is_empty() {
                        Ap::empty()
                    } else {
                        // map back: s = n - lenB + 2 - r - lenA
                        let start = &n - &lb + 2u32 - fr.last() - &la;
                        Ap { start, diff: fr.diff.clone(), count: fr.count.clone() }
                    }
                };
                f2.union(&f1)
            }
        }
    }

    /// Keep those positions `s` of `cand` (occurrences of a word of length
    /// `wa` in the chosen text) such that pattern node `bn` occurs at
    /// `s + wa`. `rev` selects the reversed text/pattern pair.
    fn filter_next(&self, rev: bool, tn: usize, n: &BigUint, cand: &Ap, wa: &BigUint, bn: usize) -> Ap {
        let (t, _vt, p, vp) = if rev {
            (&self.rt, &self.vrt, &self.rp, &self.vrp)
        } else {
            (self.t, &self.vt, self.p, &self.vp)
        };
        let lb = p.node_len(bn).clone();
        // the full A.B occurrence must fit: s + wa + lb - 1 <= n
        let need = wa + &lb;
        if *n < need {
            return Ap::empty();
        }
        let limit = n - &need + 1u32;
        let cand = cand.clip(&BigUint::one(), &limit);
        if cand.is_empty() {
            return Ap::empty();
        }
        let k = cand.count.clone();
        if k <= BigUint::from(3u32) {
            let mut points = Vec::new();
            for s in cand.iter_small() {
                let pos = &s + wa;
                if self.occurs_at(t, tn, p, bn, &pos) {
                    points.push(s);
                }
            }
            return points_to_ap(points);
        }
        let d = cand.diff.clone();
        let e = cand.last() + wa - 1u32;
        // the region [cand.start, e] is d-periodic; D is its last period
        let dslice = t.slice_node(tn, &(&e - &d + 1u32), &e).expect("period slice in range");
        let reps = &lb / &d + 2u32;
        let dpow = slp_power(&dslice, &reps).expect("reps >= 2");
        let vdpow = HashView::new(&dpow);
        let one = BigUint::one();
        let h = lce_with_views(p, vp, bn, &one, &dpow, &vdpow, dpow.root(), &one);
        // V: the text right after the periodic region
        let vlen = if e < *n { (n - &e).min(lb.clone()) } else { BigUint::zero() };
        let (vslice, psi) = if vlen.is_zero() {
            (None, BigUint::zero())
        } else {
            let v = t.slice_node(tn, &(&e + 1u32), &(&e + &vlen)).expect("V slice in range");
            let vv = HashView::new(&v);
            let psi = lce_with_views(&dpow, &vdpow, dpow.root(), &one, &v, &vv, v.root(), &one);
            (Some(v), psi)
        };
        if h >= lb {
            // every candidate whose tail beyond the region is covered by psi
            let needed = if psi >= lb { BigUint::zero() } else { &lb - &psi };
            if needed.is_zero() {
                return cand;
            }
            // alpha_j = (k-1-j)*d >= needed  <=>  j <= k-1 - ceil(needed/d)
            let steps = (&needed + &d - 1u32) / &d;
            if steps > &k - 1u32 {
                return Ap::empty();
            }
            let keep = &k - &steps;
            return cand.take(&keep);
        }
        // h < lb: at most one candidate alignment can survive
        if psi > h {
            return Ap::empty();
        }
        let alpha = &h - &psi;
        if !(&alpha % &d).is_zero() {
            return Ap::empty();
        }
        let i = &alpha / &d;
        if i > &k - 1u32 {
            return Ap::empty();
        }
        let jstar = &k - 1u32 - &i;
        let s = cand.nth(&jstar);
        // verify the non-periodic tail of B against V directly
        let z = &lb - &h; // >= 1
        let v = match &vslice {
            Some(v) => v,
            None => return Ap::empty(),
        };
        if &psi + &z > *v.node_len(v.root()) {
            return Ap::empty();
        }
        let vpart = v.slice_node(v.root(), &(&psi + 1u32), &(&psi + &z)).unwrap();
        let zpart = p.slice_node(bn, &(&h + 1u32), &lb).unwrap();
        if slp_eq(&vpart, &zpart) {
            Ap::singleton(s)
        } else {
            Ap::empty()
        }
    }

    /// Does pattern node `bn` occur at (1-based) `pos` in val of text node `tn`?
    fn occurs_at(&self, t: &Slp, tn: usize, p: &Slp, bn: usize, pos: &BigUint) -> bool {
        let lb = p.node_len(bn);
        let end = pos + lb - 1u32;
        if pos.is_zero() || end > *t.node_len(tn) {
            return false;
        }
        let tslice = t.slice_node(tn, pos, &end).unwrap();
        let pslice = p.slice_node(bn, &BigUint::one(), lb).unwrap();
        slp_eq(&pslice, &tslice)
    }
}

fn points_to_ap(points: Vec<BigUint>) -> Ap {
    match points.len() {
        0 => Ap::empty(),
        1 => Ap::singleton(points.into_iter().next().unwrap()),
        2 => {
            let d = &points[1] - &points[0];
            Ap { start: points[0].clone(), diff: d, count: BigUint::from(2u32) }
        }
        3 => {
            let d1 = &points[1] - &points[0];
            let d2 = &points[2] - &points[1];
            assert_eq!(d1, d2, "occurrences in a short window must be one progression");
            Ap { start: points[0].clone(), diff: d1, count: BigUint::from(3u32) }
        }
        _ => unreachable!("direct checks only run for up to 3 candidates"),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{slp_factor, slp_power, Slp};
    use super::*;

    fn word(w: &[usize]) -> Slp {
        Slp::from_word(w).unwrap()
    }

    #[test]
    fn factor_basics() {
        let abba = word(&[0, 1, 1, 0]);
        assert!(slp_factor(&abba, &abba));
        assert!(!slp_factor(&word(&[0, 1, 0]), &abba));
        assert!(slp_factor(&word(&[1, 1]), &abba));
    }

    #[test]
    fn factor_power_in_power() {
        // (ab)^(2^10) in (ab)^(2^10 + 1)
        let ab = word(&[0, 1]);
        let big = BigUint::one() << 10;
        let p = slp_power(&ab, &big).unwrap();
        let t = slp_power(&ab, &(&big + 1u32)).unwrap();
        assert!(slp_factor(&p, &t));
        // small analogue by expansion: (ab)^3 in (ab)^4
        let p3 = slp_power(&ab, &3u32.into()).unwrap();
        let t4 = slp_power(&ab, &4u32.into()).unwrap();
        assert!(kmp_contains(&p3.expand(100).unwrap(), &t4.expand(100).unwrap()));
    }

    #[test]
    fn fcpm_agrees_with_expansion_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for case in 0..400 {
            let tn = rng.gen_range(2..=40);
            let pn = rng.gen_range(1..=8);
            let alpha = rng.gen_range(1..=2);
            let tw: Vec<usize> = (0..tn).map(|_| rng.gen_range(0..=alpha)).collect();
            let pw: Vec<usize> = if rng.gen_bool(0.5) && tn > pn {
                let at = rng.gen_range(0..=tn - pn);
                tw[at..at + pn].to_vec()
            } else {
                (0..pn).map(|_| rng.gen_range(0..=alpha)).collect()
            };
            let p = word(&pw);
            let t = word(&tw);
            let expect = kmp_contains(&pw, &tw);
            if pw.len() >= 2 && pw.iter().any(|&c| c != pw[0]) {
                assert_eq!(fcpm(&p, &t), expect, "case {case}: p={pw:?} t={tw:?}");
            }
            assert_eq!(slp_factor(&p, &t), expect, "case {case}: p={pw:?} t={tw:?}");
        }
    }

    #[test]
    fn fcpm_highly_periodic() {
        // pattern (abc)^k d-tail inside texts built from rotations
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..120 {
            let period: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(0..2)).collect();
            let reps = rng.gen_range(1..=4);
            let mut pw: Vec<usize> = Vec::new();
            for _ in 0..reps {
                pw.extend_from_slice(&period);
            }
            if rng.gen_bool(0.6) {
                pw.push(rng.gen_range(0..2));
            }
            let mut tw: Vec<usize> = Vec::new();
            for _ in 0..rng.gen_range(1..=6) {
                tw.extend_from_slice(&period);
            }
            tw.push(rng.gen_range(0..2));
            for _ in 0..rng.gen_range(0..=2) {
                tw.extend_from_slice(&period);
            }
            if pw.iter().any(|&c| c != pw[0]) && pw.len() >= 2 && pw.len() <= tw.len() {
                let expect = kmp_contains(&pw, &tw);
                assert_eq!(fcpm(&word(&pw), &word(&tw)), expect, "p={pw:?} t={tw:?}");
            }
        }
    }

    #[test]
    fn factor_huge_structured() {
        // u v w blocks of equal huge length: pattern u v w^2 inside u^2 v w^2
        let base = word(&[0, 1, 0]);
        let ell = BigUint::from(3u32) << 20;
        let u = slp_power(&base, &(&ell / 3u32)).unwrap();
        let pattern = u.concat(&u).concat(&u).concat(&u);
        let text = u.concat(&u).concat(&u).concat(&u).concat(&u);
        assert!(fcpm(&pattern, &text));
        // and a mismatching pattern
        let vdiff = word(&[1, 0, 0]);
        let v = slp_power(&vdiff, &(&ell / 3u32)).unwrap();
        let pattern2 = u.concat(&v).concat(&u).concat(&u);
        assert!(!fcpm(&pattern2, &text));
    }

    #[test]
    fn unary_fast_path() {
        let a_small = slp_power(&Slp::leaf(0), &(BigUint::one() << 30)).unwrap();
        let a_big = slp_power(&Slp::leaf(0), &((BigUint::one() << 30) + 1u32)).unwrap();
        assert!(slp_factor(&a_small, &a_big));
        assert!(!slp_factor(&a_big, &a_small));
    }
}
