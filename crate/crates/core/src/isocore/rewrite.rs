//! The length-reducing rewriting system on sequences of primitive words:
//! a right-closed word followed by a left-closed word fuses into their
//! concatenation, two equal uniform words collapse into one, and a uniform
//! word around a single one of its symbols absorbs the symbol. The system
//! is strongly confluent, so normal forms are strategy-independent.

use super::{is_irreducible, merges, LoId, Ref, TwoLevelSystem};
use crate::error::{Error, Result};
use crate::words::{primitive_eq, PrimitiveForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

enum Redex {
    /// Fuse seq[i], seq[i+1] into a fresh lower variable.
    FusePair(usize),
    /// Drop one of two equal uniform entries at i, i+1.
    DropUniform(usize),
    /// Collapse uniform-symbol-uniform at i, i+1, i+2 into seq[i].
    DropTriple(usize),
}

fn find_redex(sys: &TwoLevelSystem, seq: &[Ref], strategy: Strategy) -> Option<Redex> {
    let positions: Vec<usize> = match strategy {
        Strategy::Leftmost => (0..seq.len()).collect(),
        Strategy::Rightmost => (0..seq.len()).rev().collect(),
    };
    for i in positions {
        if i + 1 < seq.len() {
            if let (Ref::Lo(a), Ref::Lo(b)) = (seq[i], seq[i + 1]) {
                let fa = &sys.lo_forms[a];
                let fb = &sys.lo_forms[b];
                if fa.is_uniform() && fb.is_uniform() && fa.uniform_set() == fb.uniform_set() {
                    return Some(Redex::DropUniform(i));
                }
                if fa.is_right_closed() && fb.is_left_closed() {
                    return Some(Redex::FusePair(i));
                }
            }
        }
        if i + 2 < seq.len() {
            if let (Ref::Lo(a), Ref::Lo(b), Ref::Lo(c)) = (seq[i], seq[i + 1], seq[i + 2]) {
                if !merges(&[&sys.lo_forms[a], &sys.lo_forms[b]])
                    && !merges(&[&sys.lo_forms[b], &sys.lo_forms[c]])
                    && merges(&[&sys.lo_forms[a], &sys.lo_forms[b], &sys.lo_forms[c]])
                {
                    return Some(Redex::DropTriple(i));
                }
            }
        }
    }
    None
}

/// Fresh lower variable for a merging pair.
pub(crate) fn fuse_pair(sys: &mut TwoLevelSystem, a: LoId, b: LoId) -> LoId {
    let form = sys.lo_forms[a].concat_merged(&sys.lo_forms[b]);
    sys.lo_forms.push(form);
    sys.lo_forms.len() - 1
}

/// Every sequence reachable from `seq` in exactly one rewrite step (fused
/// pairs extend the system with fresh lower variables).
pub fn one_step_rewrites(sys: &mut TwoLevelSystem, seq: &[Ref]) -> Vec<Vec<Ref>> {
    let mut out = Vec::new();
    for i in 0..seq.len() {
        if i + 1 < seq.len() {
            if let (Ref::Lo(a), Ref::Lo(b)) = (seq[i], seq[i + 1]) {
                let fa = sys.lo_forms[a].clone();
                let fb = sys.lo_forms[b].clone();
                if fa.is_uniform() && fb.is_uniform() && fa.uniform_set() == fb.uniform_set() {
                    let mut s = seq.to_vec();
                    s.remove(i + 1);
                    out.push(s);
                } else if fa.is_right_closed() && fb.is_left_closed() {
                    let fresh = fuse_pair(sys, a, b);
                    let mut s = seq.to_vec();
                    s[i] = Ref::Lo(fresh);
                    s.remove(i + 1);
                    out.push(s);
                }
            }
        }
        if i + 2 < seq.len() {
            if let (Ref::Lo(a), Ref::Lo(b), Ref::Lo(c)) = (seq[i], seq[i + 1], seq[i + 2]) {
                if !merges(&[&sys.lo_forms[a], &sys.lo_forms[b]])
                    && !merges(&[&sys.lo_forms[b], &sys.lo_forms[c]])
                    && merges(&[&sys.lo_forms[a], &sys.lo_forms[b], &sys.lo_forms[c]])
                {
                    let mut s = seq.to_vec();
                    s.remove(i + 2);
                    s.remove(i + 1);
                    out.push(s);
                }
            }
        }
    }
    out
}

/// Exhaustive rewriting to the irreducible normal form. Fused pairs add
/// fresh lower variables to the system; non-primitive entries are left
/// untouched. By strong confluence the result does not depend on the
/// strategy.
pub fn rewrite_normalize(sys: &mut TwoLevelSystem, mut seq: Vec<Ref>, strategy: Strategy) -> Vec<Ref> {
    while let Some(redex) = find_redex(sys, &seq, strategy) {
        match redex {
            Redex::DropUniform(i) => {
                seq.remove(i + 1);
            }
            Redex::FusePair(i) => {
                let (a, b) = (seq[i].lo().unwrap(), seq[i + 1].lo().unwrap());
                let fresh = fuse_pair(sys, a, b);
                seq[i] = Ref::Lo(fresh);
                seq.remove(i + 1);
            }
            Redex::DropTriple(i) => {
                seq.remove(i + 2);
                seq.remove(i + 1);
            }
        }
    }
    debug_assert!(is_irreducible(sys, &seq));
    seq
}

/// Make a semi-good sequence good by rewriting it to its irreducible normal
/// form. The subsequence of upper-level references is preserved and the
/// length never grows.
pub fn make_good(sys: &mut TwoLevelSystem, seq: Vec<Ref>) -> Result<Vec<Ref>> {
    if !super::is_semi_good(sys, &seq) {
        return Err(Error::InvalidInput("make_good requires a semi-good sequence".into()));
    }
    let ups_before: Vec<Ref> = seq.iter().copied().filter(|r| !r.is_lo()).collect();
    let n = seq.len();
    let out = rewrite_normalize(sys, seq, Strategy::Leftmost);
    let ups_after: Vec<Ref> = out.iter().copied().filter(|r| !r.is_lo()).collect();
    debug_assert_eq!(ups_before, ups_after);
    debug_assert!(out.len() <= n);
    debug_assert!(super::is_good(sys, &out));
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PeriodicDirection {
    Omega,
    OmegaBar,
}

/// Make a periodic sequence of lower variables irreducible at the seam.
///
/// For `Omega`, returns `(affix, period)` with
/// `period_in^omega = affix . period^omega`; for `OmegaBar` with
/// `period_in^omegabar = period^omegabar . affix`. At most one fresh lower
/// variable is created and both outputs are at most as long as the input.
pub fn make_good_periodic(
    sys: &mut TwoLevelSystem,
    period: &[LoId],
    direction: PeriodicDirection,
) -> Result<(Vec<LoId>, Vec<LoId>)> {
    let k = period.len();
    if k < 3 {
        return Err(Error::InvalidInput("make_good_periodic requires a period of length at least 3".into()));
    }
    let refs: Vec<Ref> = period.iter().map(|&l| Ref::Lo(l)).collect();
    if !is_irreducible(sys, &refs) {
        return Err(Error::InvalidInput("make_good_periodic requires an irreducible period".into()));
    }
    let f = |l: LoId| &sys.lo_forms[l];
    let uniform_eq = |a: LoId, b: LoId| {
        f(a).is_uniform() && f(b).is_uniform() && f(a).uniform_set() == f(b).uniform_set()
    };
    let last = period[k - 1];
    let first = period[0];
    let (affix, new_period): (Vec<LoId>, Vec<LoId>) = if uniform_eq(last, first) {
        // seam pair of equal uniforms: one copy disappears per round
        match direction {
            PeriodicDirection::Omega => (period.to_vec(), period[1..].to_vec()),
            PeriodicDirection::OmegaBar => (Vec::new(), period[1..].to_vec()),
        }
    } else if f(last).is_right_closed() && f(first).is_left_closed() {
        // seam fusion into a fresh variable
        let fresh = fuse_pair(sys, last, first);
        match direction {
            PeriodicDirection::Omega => {
                let mut p = vec![fresh];
                p.extend_from_slice(&period[1..k - 1]);
                (period[..k - 1].to_vec(), p)
            }
            PeriodicDirection::OmegaBar => {
                let mut p = vec![fresh];
                p.extend_from_slice(&period[1..k - 1]);
                (vec![period[k - 1]], p)
            }
        }
    } else if f(last).is_uniform()
        && f(first)
            .single_symbol()
            .is_some_and(|s| f(last).uniform_set().unwrap().contains(&s))
        && uniform_eq(last, period[1])
    {
        // seam triple (last, first, second) = uniform, symbol, uniform
        assert!(k >= 4, "a length-3 period with this seam would be reducible");
        match direction {
            PeriodicDirection::Omega => (period.to_vec(), period[2..].to_vec()),
            PeriodicDirection::OmegaBar => (Vec::new(), period[2..].to_vec()),
        }
    } else if f(period[k - 2]).is_uniform()
        && f(last)
            .single_symbol()
            .is_some_and(|s| f(period[k - 2]).uniform_set().unwrap().contains(&s))
        && uniform_eq(period[k - 2], first)
    {
        // seam triple (second-last, last, first)
        assert!(k >= 4);
        match direction {
            PeriodicDirection::Omega => {
                let mut p = vec![period[k - 2]];
                p.extend_from_slice(&period[1..k - 2]);
                (period[..k - 2].to_vec(), p)
            }
            PeriodicDirection::OmegaBar => {
                let p = period[1..k - 1].to_vec();
                (vec![period[k - 1]], p)
            }
        }
    } else {
        // already irreducible at the seam
        (Vec::new(), period.to_vec())
    };
    // a window of three periods sees every seam redex of the infinite word
    let mut window: Vec<Ref> = Vec::new();
    let affix_refs: Vec<Ref> = affix.iter().map(|&l| Ref::Lo(l)).collect();
    let period_refs: Vec<Ref> = new_period.iter().map(|&l| Ref::Lo(l)).collect();
    match direction {
        PeriodicDirection::Omega => {
            window.extend(&affix_refs);
            for _ in 0..3 {
                window.extend(&period_refs);
            }
        }
        PeriodicDirection::OmegaBar => {
            for _ in 0..3 {
                window.extend(&period_refs);
            }
            window.extend(&affix_refs);
        }
    }
    debug_assert!(is_irreducible(sys, &window), "periodic normalization left a seam redex");
    debug_assert!(affix.len() <= k && new_period.len() <= k && !new_period.is_empty());
    Ok((affix, new_period))
}

/// Remove duplicate lower variables (equal primitive words); the smallest
/// variable id survives and all references are rewritten. Returns the
/// remapping old id -> new id alongside the rewritten system.
pub fn make_irredundant(sys: &TwoLevelSystem) -> (TwoLevelSystem, Vec<LoId>) {
    let n = sys.lo_forms.len();
    // representative (smallest id) of each equality class
    let mut repr: Vec<usize> = (0..n).collect();
    for i in 0..n {
        if repr[i] != i {
            continue;
        }
        for j in i + 1..n {
            if repr[j] == j && primitive_eq(&sys.lo_forms[i], &sys.lo_forms[j]) {
                repr[j] = i;
            }
        }
    }
    // compact ids
    let mut new_id = vec![usize::MAX; n];
    let mut lo_forms: Vec<PrimitiveForm> = Vec::new();
    for i in 0..n {
        if repr[i] == i {
            new_id[i] = lo_forms.len();
            lo_forms.push(sys.lo_forms[i].clone());
        }
    }
    let map: Vec<LoId> = (0..n).map(|i| new_id[repr[i]]).collect();
    let remap_ref = |r: &Ref| match r {
        Ref::Lo(l) => Ref::Lo(map[*l]),
        Ref::Up(u) => Ref::Up(*u),
    };
    let up_rhs = sys
        .up_rhs
        .iter()
        .map(|rhs| match rhs {
            super::UpRhs::Concat(rs) => super::UpRhs::Concat(rs.iter().map(remap_ref).collect()),
            super::UpRhs::Omega(r) => super::UpRhs::Omega(remap_ref(r)),
            super::UpRhs::OmegaBar(r) => super::UpRhs::OmegaBar(remap_ref(r)),
            super::UpRhs::Shuffle(rs) => {
                let mut out: Vec<Ref> = Vec::new();
                for r in rs.iter().map(|r| remap_ref(r)) {
                    if !out.contains(&r) {
                        out.push(r);
                    }
                }
                super::UpRhs::Shuffle(out)
            }
        })
        .collect();
    let tec = sys
        .tec
        .iter()
        .map(|t| super::TecRecord {
            first_block: t.first_block.map(|l| map[l]),
            second_block: t.second_block.map(|l| map[l]),
            last_block: t.last_block.map(|l| map[l]),
            second_last_block: t.second_last_block.map(|l| map[l]),
        })
        .collect();
    (
        TwoLevelSystem { lo_forms, up_rhs, sigma: sys.sigma.clone(), tec },
        map,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Alphabet;
    use crate::slp::Slp;
    use std::collections::BTreeSet;

    fn sys_with(forms: Vec<PrimitiveForm>) -> TwoLevelSystem {
        TwoLevelSystem {
            lo_forms: forms,
            up_rhs: Vec::new(),
            sigma: Alphabet::new(["a", "b", "c"]).unwrap(),
            tec: Vec::new(),
        }
    }

    fn fin(w: &[usize]) -> PrimitiveForm {
        PrimitiveForm::Finite(Slp::from_word(w).unwrap())
    }

    fn uni(set: &[usize]) -> PrimitiveForm {
        PrimitiveForm::Uniform(set.iter().copied().collect::<BTreeSet<_>>())
    }

    #[test]
    fn merges_examples() {
        let ab = fin(&[0, 1]);
        let ba = fin(&[1, 0]);
        assert!(merges(&[&ab, &ba]));
        let g = uni(&[0, 1]);
        assert!(!merges(&[&g, &g.clone()]) == false); // uniform pair merges
        assert!(merges(&[&g, &g]));
        let a = fin(&[0]);
        assert!(merges(&[&g, &a, &g]));
        // [ab]^eta-style entries never merge with each other only if not uniform-equal:
        let g2 = uni(&[0]);
        assert!(!merges(&[&g, &g2]));
    }

    #[test]
    fn rewrite_spec_example() {
        // (a, b, {a,b}^eta, {a,b}^eta) -> (ab, {a,b}^eta)
        let mut sys = sys_with(vec![fin(&[0]), fin(&[1]), uni(&[0, 1]), uni(&[0, 1])]);
        let seq = vec![Ref::Lo(0), Ref::Lo(1), Ref::Lo(2), Ref::Lo(3)];
        let out = rewrite_normalize(&mut sys, seq, Strategy::Leftmost);
        assert_eq!(out.len(), 2);
        let Ref::Lo(fused) = out[0] else { panic!() };
        match &sys.lo_forms[fused] {
            PrimitiveForm::Finite(s) => assert_eq!(s.expand(10).unwrap(), vec![0, 1]),
            other => panic!("{other:?}"),
        }
        assert_eq!(out[1], Ref::Lo(2));
    }

    #[test]
    fn rewrite_triple_rule() {
        // ({a,b}^eta, a, {a,b}^eta) -> ({a,b}^eta)
        let mut sys = sys_with(vec![uni(&[0, 1]), fin(&[0]), uni(&[0, 1])]);
        let out = rewrite_normalize(&mut sys, vec![Ref::Lo(0), Ref::Lo(1), Ref::Lo(2)], Strategy::Rightmost);
        assert_eq!(out, vec![Ref::Lo(0)]);
    }

    #[test]
    fn rewrite_confluence_small() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(1..=8);
            let mut forms = Vec::new();
            for _ in 0..n {
                forms.push(match rng.gen_range(0..6) {
                    0 => fin(&[rng.gen_range(0..2)]),
                    1 => fin(&[rng.gen_range(0..2), rng.gen_range(0..2)]),
                    2 => uni(&[0, 1]),
                    3 => uni(&[rng.gen_range(0..2)]),
                    4 => PrimitiveForm::RightRay(None, Slp::from_word(&[rng.gen_range(0..2)]).unwrap()),
                    _ => PrimitiveForm::LeftRay(Slp::from_word(&[rng.gen_range(0..2)]).unwrap(), None),
                });
            }
            let mut sys1 = sys_with(forms.clone());
            let mut sys2 = sys_with(forms);
            let seq: Vec<Ref> = (0..n).map(Ref::Lo).collect();
            let l = rewrite_normalize(&mut sys1, seq.clone(), Strategy::Leftmost);
            let r = rewrite_normalize(&mut sys2, seq, Strategy::Rightmost);
            assert_eq!(l.len(), r.len());
            for (x, y) in l.iter().zip(r.iter()) {
                let fx = match x {
                    Ref::Lo(i) => &sys1.lo_forms[*i],
                    _ => unreachable!(),
                };
                let fy = match y {
                    Ref::Lo(i) => &sys2.lo_forms[*i],
                    _ => unreachable!(),
                };
                assert!(primitive_eq(fx, fy), "normal forms differ");
            }
        }
    }

    #[test]
    fn periodic_seam_fusion() {
        // period (ab, {a,b}^eta, ba): seam (ba, ab) fuses
        let mut sys = sys_with(vec![fin(&[0, 1]), uni(&[0, 1]), fin(&[1, 0])]);
        let (affix, period) = make_good_periodic(&mut sys, &[0, 1, 2], PeriodicDirection::Omega).unwrap();
        assert_eq!(affix, vec![0, 1]);
        assert_eq!(period.len(), 2);
        match &sys.lo_forms[period[0]] {
            PrimitiveForm::Finite(s) => assert_eq!(s.expand(10).unwrap(), vec![1, 0, 0, 1]),
            other => panic!("{other:?}"),
        }
        assert_eq!(period[1], 1);
    }

    #[test]
    fn periodic_already_irreducible() {
        // (a, {a,b}^eta, b): seam (b, a) fuses actually; use ({a}^eta, b, {a,b}^eta)
        let mut sys = sys_with(vec![uni(&[0]), fin(&[1]), uni(&[0, 1])]);
        let (affix, period) = make_good_periodic(&mut sys, &[0, 1, 2], PeriodicDirection::Omega).unwrap();
        assert!(affix.is_empty());
        assert_eq!(period, vec![0, 1, 2]);
    }

    #[test]
    fn periodic_uniform_seam() {
        // period ({a,b}^eta, c, {a,b}^eta): seam (last={a,b}^eta, first={a,b}^eta) uniform pair
        let mut sys = sys_with(vec![uni(&[0, 1]), fin(&[2]), uni(&[0, 1])]);
        let (affix, period) = make_good_periodic(&mut sys, &[0, 1, 2], PeriodicDirection::Omega).unwrap();
        assert_eq!(affix, vec![0, 1, 2]);
        assert_eq!(period, vec![1, 2]);
    }

    #[test]
    fn periodic_rejects_short_or_reducible() {
        let mut sys = sys_with(vec![uni(&[0]), fin(&[1])]);
        assert!(make_good_periodic(&mut sys, &[0, 1], PeriodicDirection::Omega).is_err());
        let mut sys2 = sys_with(vec![fin(&[0]), fin(&[1]), uni(&[0])]);
        assert!(make_good_periodic(&mut sys2, &[0, 1, 2], PeriodicDirection::Omega).is_err());
    }

    #[test]
    fn irredundant_merges_equal_values() {
        // two lower variables both equal to ab; and a rotation pair
        let sys = sys_with(vec![
            fin(&[0, 1]),
            fin(&[0, 1]),
            PrimitiveForm::RightRay(None, Slp::from_word(&[0, 1]).unwrap()),
            PrimitiveForm::RightRay(Some(Slp::from_word(&[0]).unwrap()), Slp::from_word(&[1, 0]).unwrap()),
        ]);
        let (out, map) = make_irredundant(&sys);
        assert_eq!(out.lo_forms.len(), 2);
        assert_eq!(map[0], map[1]);
        assert_eq!(map[2], map[3]);
    }
}
