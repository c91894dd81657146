//! One reduction round: from an expression system in the restricted input
//! shape to a proper two-level system. Variables with primitive values sink
//! into the lower level; every surviving upper variable is rewritten into a
//! good sequence, a shuffle, or a power guarded by explicit period copies,
//! with fresh helper variables keeping right-hand sides short. Values of
//! surviving variables are preserved, and heights drop for good-shape
//! variables while bad-shape variables become good shape.

use super::rewrite::{fuse_pair, make_good, make_good_periodic, make_irredundant, rewrite_normalize, PeriodicDirection, Strategy};
use super::{block_facts, seq_non_merging, LoId, Ref, TecRecord, TwoLevelSystem, UpId, UpRhs};
use crate::error::{Error, Result};
use crate::slp::{slp_length, Slp};
use crate::words::{
    classify_primitive, depth_height, normalize_ses, Expr, ExtendedForm, PrimitiveForm, Ses, VarId,
};
use num_traits::One;
use std::collections::{BTreeMap, BTreeSet};

/// Result of a main step: the proper system plus the placement of the input
/// variables (primitive values went to `lo_of`, the rest to `up_of`).
#[derive(Debug, Clone)]
pub struct MainStepResult {
    pub sys: TwoLevelSystem,
    pub up_of: BTreeMap<VarId, UpId>,
    pub lo_of: BTreeMap<VarId, LoId>,
}

/// Bring a normal-form SES into the restricted shape of the main step:
/// no variable aliases are read anywhere, and every concatenation is a
/// symbol word, a symbol-padded single variable, or a pair of variables.
pub fn prepare_for_main_step(s: &Ses) -> (Ses, Vec<VarId>) {
    let s = normalize_ses(s);
    // resolve alias chains rhs(X) = Y
    let n = s.var_count();
    let mut res: Vec<VarId> = (0..n).collect();
    let order = s.topological().expect("valid SES");
    for v in order {
        if let Expr::Var(u) = &s.rhs[v] {
            res[v] = res[*u];
        }
    }
    fn subst(e: &Expr, res: &[VarId]) -> Expr {
        match e {
            Expr::Symbol(_) => e.clone(),
            Expr::Var(u) => Expr::Var(res[*u]),
            Expr::Concat(ps) => Expr::Concat(ps.iter().map(|p| subst(p, res)).collect()),
            Expr::Omega(c) => Expr::Omega(Box::new(subst(c, res))),
            Expr::OmegaBar(c) => Expr::OmegaBar(Box::new(subst(c, res))),
            Expr::Shuffle(ps) => Expr::shuffle(ps.iter().map(|p| subst(p, res)).collect()),
        }
    }
    let mut rhs: Vec<Expr> = s.rhs.iter().map(|e| subst(e, &res)).collect();
    let mut names = s.var_names.clone();
    let mut used: BTreeSet<String> = names.iter().cloned().collect();
    // chunk long concatenations into (Sigma* V Sigma*) and (V V) pieces
    let mut v = 0;
    while v < rhs.len() {
        if let Expr::Concat(parts) = rhs[v].clone() {
            let var_count = parts.iter().filter(|p| matches!(p, Expr::Var(_))).count();
            if var_count >= 2 {
                // left: symbols up to and including the first variable plus
                // the following symbol run; right: the rest
                let first_var = parts.iter().position(|p| matches!(p, Expr::Var(_))).unwrap();
                let mut cut = first_var + 1;
                while cut < parts.len() && matches!(parts[cut], Expr::Symbol(_)) {
                    cut += 1;
                }
                let (left, right) = parts.split_at(cut);
                let mut mk = |chunk: &[Expr], names: &mut Vec<String>, rhs: &mut Vec<Expr>| -> Expr {
                    if chunk.len() == 1 {
                        chunk[0].clone()
                    } else {
                        let id = rhs.len();
                        names.push(crate::words::fresh_name(&mut used, id));
                        rhs.push(Expr::Concat(chunk.to_vec()));
                        Expr::Var(id)
                    }
                };
                let l = mk(left, &mut names, &mut rhs);
                let r = mk(right, &mut names, &mut rhs);
                rhs[v] = Expr::Concat(vec![l, r]);
            }
        }
        v += 1;
    }
    let ses = Ses::new(names, s.alphabet.clone(), rhs, s.start).expect("chunking preserves validity");
    (ses, res)
}

fn shape_ok(e: &Expr) -> bool {
    let atom = |p: &Expr| matches!(p, Expr::Symbol(_) | Expr::Var(_));
    match e {
        Expr::Symbol(_) | Expr::Var(_) => true,
        Expr::Omega(c) | Expr::OmegaBar(c) => atom(c),
        Expr::Shuffle(ps) => ps.iter().all(atom),
        Expr::Concat(ps) => {
            if !ps.iter().all(atom) {
                return false;
            }
            let vars = ps.iter().filter(|p| matches!(p, Expr::Var(_))).count();
            match vars {
                0 | 1 => true,
                2 => ps.len() == 2,
                _ => false,
            }
        }
    }
}

struct Builder {
    forms: Vec<ExtendedForm>,
    sys: TwoLevelSystem,
    lo_of: BTreeMap<VarId, LoId>,
    up_of: BTreeMap<VarId, UpId>,
    sym_lo: BTreeMap<usize, LoId>,
}

impl Builder {
    fn fresh_lo(&mut self, form: PrimitiveForm) -> LoId {
        self.sys.lo_forms.push(form);
        self.sys.lo_forms.len() - 1
    }

    fn lo_for_symbol(&mut self, sym: usize) -> LoId {
        if let Some(&l) = self.sym_lo.get(&sym) {
            return l;
        }
        let l = self.fresh_lo(PrimitiveForm::Finite(Slp::leaf(sym)));
        self.sym_lo.insert(sym, l);
        l
    }

    fn lo_for_word(&mut self, word: &[usize]) -> LoId {
        if word.len() == 1 {
            return self.lo_for_symbol(word[0]);
        }
        self.fresh_lo(PrimitiveForm::Finite(Slp::from_word(word).unwrap()))
    }

    fn fresh_up(&mut self, rhs: UpRhs) -> UpId {
        self.sys.up_rhs.push(rhs);
        self.sys.up_rhs.len() - 1
    }

    fn atom_ref(&mut self, e: &Expr) -> Ref {
        match e {
            Expr::Symbol(s) => Ref::Lo(self.lo_for_symbol(*s)),
            Expr::Var(v) => {
                if let Some(&l) = self.lo_of.get(v) {
                    Ref::Lo(l)
                } else {
                    Ref::Up(self.up_of[v])
                }
            }
            _ => unreachable!("atoms only"),
        }
    }

    /// Convert an input rhs to a reference rhs, grouping symbol runs into
    /// finite lower variables.
    fn convert_rhs(&mut self, e: &Expr) -> UpRhs {
        match e {
            Expr::Symbol(_) | Expr::Var(_) => UpRhs::Concat(vec![self.atom_ref(e)]),
            Expr::Omega(c) => {
                let r = self.atom_ref(c);
                UpRhs::Omega(r)
            }
            Expr::OmegaBar(c) => {
                let r = self.atom_ref(c);
                UpRhs::OmegaBar(r)
            }
            Expr::Shuffle(ps) => {
                let mut refs: Vec<Ref> = Vec::new();
                for p in ps {
                    let r = self.atom_ref(p);
                    if !refs.contains(&r) {
                        refs.push(r);
                    }
                }
                UpRhs::Shuffle(refs)
            }
            Expr::Concat(ps) => {
                let mut refs: Vec<Ref> = Vec::new();
                let mut run: Vec<usize> = Vec::new();
                for p in ps {
                    match p {
                        Expr::Symbol(s) => run.push(*s),
                        Expr::Var(_) => {
                            if !run.is_empty() {
                                let w = std::mem::take(&mut run);
                                refs.push(Ref::Lo(self.lo_for_word(&w)));
                            }
                            refs.push(self.atom_ref(p));
                        }
                        _ => unreachable!("atoms only"),
                    }
                }
                if !run.is_empty() {
                    refs.push(Ref::Lo(self.lo_for_word(&run)));
                }
                UpRhs::Concat(refs)
            }
        }
    }

    /// Follow single-reference concatenations to their target.
    fn resolve(&self, mut r: Ref) -> Ref {
        loop {
            let Ref::Up(x) = r else { return r };
            match &self.sys.up_rhs[x] {
                UpRhs::Concat(rs) if rs.len() == 1 => r = rs[0],
                _ => return r,
            }
        }
    }

    /// Splice processed concatenation bodies of upper references into the
    /// sequence; shuffles stay as references.
    fn inline_seq(&self, seq: &[Ref]) -> Vec<Ref> {
        let mut out = Vec::new();
        for &r in seq {
            match self.resolve(r) {
                Ref::Lo(l) => out.push(Ref::Lo(l)),
                Ref::Up(z) => match &self.sys.up_rhs[z] {
                    UpRhs::Concat(rs) => out.extend(rs.iter().map(|&rr| self.resolve(rr))),
                    _ => out.push(Ref::Up(z)),
                },
            }
        }
        out
    }

    /// Case split of a good sequence into a short right-hand side plus at
    /// most two fresh upper variables (used for pairs of upper references).
    fn split_good_seq(&mut self, u: Vec<Ref>) -> UpRhs {
        let ups: Vec<usize> = u
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_lo())
            .map(|(i, _)| i)
            .collect();
        match ups.len() {
            0 => {
                let k = u.len();
                if k <= 5 {
                    UpRhs::Concat(u)
                } else {
                    let mid = self.fresh_up(UpRhs::Concat(u[2..k - 2].to_vec()));
                    UpRhs::Concat(vec![u[0], u[1], Ref::Up(mid), u[k - 2], u[k - 1]])
                }
            }
            1 => {
                let i = ups[0];
                let (pre, post) = (&u[..i], &u[i + 1..]);
                if pre.len() <= 2 && post.len() <= 2 {
                    return UpRhs::Concat(u);
                }
                let mut inner: Vec<Ref> = Vec::new();
                inner.extend(&pre[pre.len().min(2)..]);
                inner.push(u[i]);
                inner.extend(&post[..post.len().saturating_sub(2)]);
                let v = self.fresh_up(UpRhs::Concat(inner));
                let mut outer: Vec<Ref> = pre[..pre.len().min(2)].to_vec();
                outer.push(Ref::Up(v));
                outer.extend(&post[post.len().saturating_sub(2)..]);
                UpRhs::Concat(outer)
            }
            2 => {
                let (i, j) = (ups[0], ups[1]);
                let pre = &u[..i];
                let mid = &u[i + 1..j];
                let post = &u[j + 1..];
                if pre.is_empty() && post.is_empty() {
                    // splitting would leave a bare alias; keep the sequence
                    return UpRhs::Concat(u);
                }
                let mut w2_refs: Vec<Ref> = Vec::new();
                w2_refs.extend(&pre[pre.len().min(2)..]);
                w2_refs.push(u[i]);
                w2_refs.extend(mid);
                let left = if w2_refs.len() == 1 {
                    w2_refs[0]
                } else {
                    Ref::Up(self.fresh_up(UpRhs::Concat(w2_refs)))
                };
                let w1 = self.fresh_up(UpRhs::Concat(vec![left, u[j]]));
                let mut outer: Vec<Ref> = pre[..pre.len().min(2)].to_vec();
                outer.push(Ref::Up(w1));
                outer.extend(post);
                UpRhs::Concat(outer)
            }
            // more upper references than the size-bounding split covers:
            // keep the good sequence whole
            _ => UpRhs::Concat(u),
        }
    }

    /// The omega (or omega-bar) case for a power over `target`.
    fn power_case(&mut self, target: Ref, bar: bool) -> UpRhs {
        let target = self.resolve(target);
        match target {
            Ref::Lo(a) => {
                // primitive base: Y Y Z with Z = Y^omega (mirrored for bar)
                let inner = if bar { UpRhs::OmegaBar(Ref::Lo(a)) } else { UpRhs::Omega(Ref::Lo(a)) };
                let z = self.fresh_up(inner);
                if bar {
                    UpRhs::Concat(vec![Ref::Up(z), Ref::Lo(a), Ref::Lo(a)])
                } else {
                    UpRhs::Concat(vec![Ref::Lo(a), Ref::Lo(a), Ref::Up(z)])
                }
            }
            Ref::Up(z) => match self.sys.up_rhs[z].clone() {
                UpRhs::Shuffle(_) => UpRhs::Concat(vec![Ref::Up(z)]),
                UpRhs::Omega(_) | UpRhs::OmegaBar(_) => {
                    // a power of a power: the base has no boundary block on
                    // at least one side, so copies never merge
                    debug_assert!(seq_non_merging(&self.sys, &[Ref::Up(z), Ref::Up(z), Ref::Up(z)]));
                    let v = self.fresh_up(if bar { UpRhs::OmegaBar(Ref::Up(z)) } else { UpRhs::Omega(Ref::Up(z)) });
                    UpRhs::Concat(vec![Ref::Up(v)])
                }
                UpRhs::Concat(rs) => {
                    let ups: Vec<usize> = rs
                        .iter()
                        .enumerate()
                        .filter(|(_, r)| !r.is_lo())
                        .map(|(i, _)| i)
                        .collect();
                    if ups.is_empty() {
                        let los: Vec<LoId> = rs.iter().map(|r| r.lo().unwrap()).collect();
                        return match los.len() {
                            0 | 1 => unreachable!("a nonempty non-primitive sequence has length >= 2"),
                            2 => self.power_pair_case(z, los[0], los[1], bar),
                            _ => self.power_long_case(z, &los, bar),
                        };
                    }
                    // (u M v)^omega = u (M nf(vu))^omega where M spans from
                    // the first to the last upper reference (mirrored for
                    // the omega-bar direction)
                    let i = ups[0];
                    let j = *ups.last().unwrap();
                    let mid: Vec<Ref> = rs[i..=j].to_vec();
                    let pre: Vec<Ref> = rs[..i].to_vec();
                    let post: Vec<Ref> = rs[j + 1..].to_vec();
                    let around: Vec<Ref> = post.iter().chain(pre.iter()).copied().collect();
                    let w = rewrite_normalize(&mut self.sys, around, Strategy::Leftmost);
                    let mut period: Vec<Ref> = Vec::new();
                    if bar {
                        period.extend(&w);
                        period.extend(&mid);
                    } else {
                        period.extend(&mid);
                        period.extend(&w);
                    }
                    let base = if period.len() == 1 {
                        period[0]
                    } else {
                        Ref::Up(self.fresh_up(UpRhs::Concat(period)))
                    };
                    let v_var = self.fresh_up(if bar { UpRhs::OmegaBar(base) } else { UpRhs::Omega(base) });
                    let mut outer: Vec<Ref> = Vec::new();
                    if bar {
                        outer.push(Ref::Up(v_var));
                        outer.extend(&post);
                    } else {
                        outer.extend(&pre);
                        outer.push(Ref::Up(v_var));
                    }
                    UpRhs::Concat(outer)
                }
            },
        }
    }

    /// Power over a processed variable with a two-entry primitive body.
    fn power_pair_case(&mut self, z: UpId, a1: LoId, a2: LoId, bar: bool) -> UpRhs {
        let f1 = self.sys.lo_forms[a1].clone();
        let f2 = self.sys.lo_forms[a2].clone();
        let uniform_sym = |g: &PrimitiveForm, s: &PrimitiveForm| -> bool {
            g.is_uniform() && s.single_symbol().is_some_and(|c| g.uniform_set().unwrap().contains(&c))
        };
        if !bar {
            if uniform_sym(&f1, &f2) {
                unreachable!("(G^eta a)^omega is primitive and sinks to the lower level");
            }
            if uniform_sym(&f2, &f1) {
                // (a G^eta)^omega = a G^eta: the power collapses to the base
                return UpRhs::Concat(vec![Ref::Up(z)]);
            }
            if f2.is_right_closed() && f1.is_left_closed() {
                let b = fuse_pair(&mut self.sys, a2, a1);
                let zz = self.fresh_up(UpRhs::Omega(Ref::Lo(b)));
                return UpRhs::Concat(vec![Ref::Lo(a1), Ref::Lo(b), Ref::Up(zz)]);
            }
            let zz = self.fresh_up(UpRhs::Omega(Ref::Up(z)));
            UpRhs::Concat(vec![Ref::Lo(a1), Ref::Lo(a2), Ref::Up(zz)])
        } else {
            if uniform_sym(&f2, &f1) {
                unreachable!("(a G^eta)^omegabar is primitive and sinks to the lower level");
            }
            if uniform_sym(&f1, &f2) {
                // (G^eta a)^omegabar = G^eta a
                return UpRhs::Concat(vec![Ref::Up(z)]);
            }
            if f2.is_right_closed() && f1.is_left_closed() {
                let b = fuse_pair(&mut self.sys, a2, a1);
                let zz = self.fresh_up(UpRhs::OmegaBar(Ref::Lo(b)));
                return UpRhs::Concat(vec![Ref::Up(zz), Ref::Lo(b), Ref::Lo(a2)]);
            }
            let zz = self.fresh_up(UpRhs::OmegaBar(Ref::Up(z)));
            UpRhs::Concat(vec![Ref::Up(zz), Ref::Lo(a1), Ref::Lo(a2)])
        }
    }

    /// Power over a processed variable with a long primitive body.
    fn power_long_case(&mut self, _z: UpId, los: &[LoId], bar: bool) -> UpRhs {
        let dir = if bar { PeriodicDirection::OmegaBar } else { PeriodicDirection::Omega };
        let (mut affix, period) =
            make_good_periodic(&mut self.sys, los, dir).expect("processed bodies are irreducible");
        if affix.len() < 2 {
            // pad with whole periods so the outer sequence has two leading
            // (trailing) primitive entries
            if bar {
                let mut padded = period.clone();
                padded.extend(period.clone());
                padded.extend(affix);
                affix = padded;
            } else {
                let mut padded = affix;
                padded.extend(period.clone());
                padded.extend(period.clone());
                affix = padded;
            }
        }
        let base = if period.len() == 1 {
            Ref::Lo(period[0])
        } else {
            Ref::Up(self.fresh_up(UpRhs::Concat(period.iter().map(|&l| Ref::Lo(l)).collect())))
        };
        let v_var = self.fresh_up(if bar { UpRhs::OmegaBar(base) } else { UpRhs::Omega(base) });
        let mut outer: Vec<Ref> = Vec::new();
        if bar {
            outer.push(Ref::Up(v_var));
            outer.extend(affix.iter().map(|&l| Ref::Lo(l)));
        } else {
            outer.extend(affix.iter().map(|&l| Ref::Lo(l)));
            outer.push(Ref::Up(v_var));
        }
        UpRhs::Concat(outer)
    }
}

/// Run the main reduction step on an SES in the restricted shape.
pub fn main_step(s: &Ses) -> Result<MainStepResult> {
    for (v, e) in s.rhs.iter().enumerate() {
        if !shape_ok(e) {
            return Err(Error::InvalidInput(format!(
                "main_step input shape violated at `{}`",
                s.var_names[v]
            )));
        }
    }
    let forms = classify_primitive(s)?;
    let mut builder = Builder {
        forms,
        sys: TwoLevelSystem {
            lo_forms: Vec::new(),
            up_rhs: Vec::new(),
            sigma: s.alphabet.clone(),
            tec: Vec::new(),
        },
        lo_of: BTreeMap::new(),
        up_of: BTreeMap::new(),
        sym_lo: BTreeMap::new(),
    };
    let order = s.topological()?;
    // place primitive variables low, allocate upper slots for the rest
    for &v in &order {
        if let Some(p) = builder.forms[v].primitive() {
            let l = builder.fresh_lo(p.clone());
            builder.lo_of.insert(v, l);
        } else {
            let placeholder = UpRhs::Concat(Vec::new());
            let u = builder.fresh_up(placeholder);
            builder.up_of.insert(v, u);
        }
    }
    // convert and process upper variables bottom-up
    for &v in &order {
        if builder.lo_of.contains_key(&v) {
            continue;
        }
        let x = builder.up_of[&v];
        let converted = builder.convert_rhs(&s.rhs[v]);
        let new_rhs = match converted {
            UpRhs::Shuffle(refs) => UpRhs::Shuffle(refs),
            UpRhs::Omega(r) => builder.power_case(r, false),
            UpRhs::OmegaBar(r) => builder.power_case(r, true),
            UpRhs::Concat(refs) => {
                let ups = refs.iter().filter(|r| !r.is_lo()).count();
                let seq = builder.inline_seq(&refs);
                let sys = &mut builder.sys;
                let good = make_good(sys, seq)?;
                if ups == 2 {
                    builder.split_good_seq(good)
                } else {
                    UpRhs::Concat(good)
                }
            }
        };
        builder.sys.up_rhs[x] = new_rhs;
    }
    // drop duplicates in the lower level, then record the block bookkeeping
    let (mut sys, lo_map) = make_irredundant(&builder.sys);
    let mut memo = BTreeMap::new();
    sys.tec = (0..sys.up_rhs.len())
        .map(|x| {
            let f = block_facts(&sys, Ref::Up(x), &mut memo);
            TecRecord {
                first_block: f.first,
                second_block: f.second,
                last_block: f.last,
                second_last_block: f.second_last,
            }
        })
        .collect();
    let lo_of = builder.lo_of.into_iter().map(|(v, l)| (v, lo_map[l])).collect();
    Ok(MainStepResult { sys, up_of: builder.up_of, lo_of })
}

/// Is a two-level system proper? Checks irredundancy of the lower level and
/// the properness conditions of every upper variable, including that no
/// shuffle-valued variable is secretly primitive.
pub fn validate_proper(sys: &TwoLevelSystem) -> bool {
    // irredundant lower level
    for i in 0..sys.lo_forms.len() {
        for j in i + 1..sys.lo_forms.len() {
            if crate::words::primitive_eq(&sys.lo_forms[i], &sys.lo_forms[j]) {
                return false;
            }
        }
    }
    let mut value_memo = BTreeMap::new();
    // every upper variable: proper rhs and non-primitive value
    for x in 0..sys.up_rhs.len() {
        let vf = super::value_form(sys, Ref::Up(x), &mut value_memo);
        if vf.is_primitive() {
            return false;
        }
        match &sys.up_rhs[x] {
            UpRhs::Concat(rs) => {
                if rs.is_empty() || !seq_non_merging(sys, rs) {
                    return false;
                }
            }
            UpRhs::Omega(r) | UpRhs::OmegaBar(r) => {
                if !seq_non_merging(sys, &[*r, *r, *r]) {
                    return false;
                }
            }
            UpRhs::Shuffle(rs) => {
                if rs.is_empty() {
                    return false;
                }
            }
        }
    }
    true
}

/// Shape accounting of the proposition: which input variables are of bad
/// shape (their height is realized through a shuffle of finite words with a
/// long entry at the bottom).
pub fn bad_shape_vars(s: &Ses) -> Result<Vec<bool>> {
    let forms = classify_primitive(s)?;
    let order = s.topological()?;
    let n = s.var_count();
    let mut height = vec![0usize; n];
    for &v in &order {
        height[v] = depth_height(s, v)?.1;
    }
    // finite-valued variables and bad bases
    let is_finite = |v: VarId| matches!(forms[v].primitive(), Some(PrimitiveForm::Finite(_)));
    let mut bad_base = vec![false; n];
    for v in 0..n {
        if let Expr::Shuffle(ps) = &s.rhs[v] {
            let all_finite = ps.iter().all(|p| match p {
                Expr::Symbol(_) => true,
                Expr::Var(u) => is_finite(*u),
                _ => false,
            });
            let some_long = ps.iter().any(|p| match p {
                Expr::Symbol(_) => false,
                Expr::Var(u) => match forms[*u].primitive() {
                    Some(PrimitiveForm::Finite(w)) => slp_length(w) > num_bigint::BigUint::one(),
                    _ => false,
                },
                _ => false,
            });
            bad_base[v] = all_finite && some_long;
        }
    }
    // reachability over variable references
    let mut reach: Vec<BTreeSet<VarId>> = vec![BTreeSet::new(); n];
    for &v in &order {
        let mut set = BTreeSet::new();
        for u in s.rhs[v].vars() {
            set.insert(u);
            set.extend(reach[u].iter().copied());
        }
        reach[v] = set;
    }
    let mut bad = vec![false; n];
    for &v in &order {
        bad[v] = if height[v] == 1 {
            // the bad base may be wrapped in concatenations at the same height
            bad_base[v] || reach[v].iter().any(|&u| bad_base[u])
        } else if height[v] > 1 {
            reach[v]
                .iter()
                .any(|&u| height[u] == height[v] - 1 && bad[u])
        } else {
            false
        };
    }
    Ok(bad)
}

/// Check the height bookkeeping of one main step: good-shape variables
/// strictly drop in height; bad-shape variables never grow, and when their
/// height is preserved they must have become good shape (so the following
/// step drops it). The shuffle-power collapse can make a bad-shape variable
/// drop immediately, which only speeds the loop up.
pub fn height_bookkeeping_ok(prepared: &Ses, result: &MainStepResult) -> Result<()> {
    let bad = bad_shape_vars(prepared)?;
    let upper = result.sys.upper_as_ses();
    let upper_norm = normalize_ses(&upper);
    let upper_bad = bad_shape_vars(&upper_norm)?;
    for (&v, &x) in &result.up_of {
        let h_in = depth_height(prepared, v)?.1;
        let h_up = depth_height(&upper_norm, x)?.1;
        if bad[v] {
            if h_up > h_in {
                return Err(Error::InvalidInput(format!(
                    "bad-shape variable {v} grew in height: {h_in} -> {h_up}"
                )));
            }
            if h_up == h_in && upper_bad[x] {
                return Err(Error::InvalidInput(format!(
                    "bad-shape variable {v} kept height {h_in} without becoming good shape"
                )));
            }
        } else if h_up >= h_in {
            return Err(Error::InvalidInput(format!(
                "good-shape variable {v} did not drop height: {h_in} -> {h_up}"
            )));
        }
    }
    Ok(())
}
