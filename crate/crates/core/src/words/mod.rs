//! Succinct expression systems for regular words: dags of expressions built
//! from symbols by concatenation, omega and omega-bar powers and dense
//! shuffles. Includes the text format, normal form, depth/height measures,
//! primitivity classification and equality of primitive words.

mod classify;
mod parse;
mod primitive;

pub use classify::{
    classify_primitive, combine_concat, combine_omega, combine_omega_bar, combine_shuffle,
    ExtendedForm,
};
pub use parse::{parse_ses, write_ses};
pub use primitive::{biray_eq, biray_window_oracle, primitive_eq, PrimitiveForm};

use crate::automata::{Alphabet, SymId};
use crate::error::{Error, Result};
use std::collections::BTreeSet;

pub type VarId = usize;

/// An expression over variables and terminal symbols.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Expr {
    Symbol(SymId),
    Var(VarId),
    Concat(Vec<Expr>),
    Omega(Box<Expr>),
    OmegaBar(Box<Expr>),
    Shuffle(Vec<Expr>),
}

impl Expr {
    /// Concatenation; flattens nested concatenations and singleton lists.
    pub fn concat(mut parts: Vec<Expr>) -> Expr {
        let mut flat = Vec::with_capacity(parts.len());
        for e in parts.drain(..) {
            match e {
                Expr::Concat(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            Expr::Concat(flat)
        }
    }

    /// Shuffle with syntactic deduplication of the argument list; shuffles
    /// depend only on the set of arguments.
    pub fn shuffle(parts: Vec<Expr>) -> Expr {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for e in parts {
            if seen.insert(e.clone()) {
                out.push(e);
            }
        }
        Expr::Shuffle(out)
    }

    pub fn omega(e: Expr) -> Expr {
        Expr::Omega(Box::new(e))
    }

    pub fn omega_bar(e: Expr) -> Expr {
        Expr::OmegaBar(Box::new(e))
    }

    fn check(&self, var_count: usize, alphabet_len: usize) -> Result<()> {
        match self {
            Expr::Symbol(s) => {
                if *s >= alphabet_len {
                    return Err(Error::InvalidInput(format!("symbol id {s} out of range")));
                }
            }
            Expr::Var(v) => {
                if *v >= var_count {
                    return Err(Error::InvalidInput(format!("variable id {v} out of range")));
                }
            }
            Expr::Concat(parts) | Expr::Shuffle(parts) => {
                if parts.is_empty() {
                    return Err(Error::InvalidInput("empty concatenation or shuffle".into()));
                }
                for p in parts {
                    p.check(var_count, alphabet_len)?;
                }
            }
            Expr::Omega(c) | Expr::OmegaBar(c) => c.check(var_count, alphabet_len)?,
        }
        Ok(())
    }

    fn vars_into(&self, out: &mut Vec<VarId>) {
        match self {
            Expr::Symbol(_) => {}
            Expr::Var(v) => out.push(*v),
            Expr::Concat(ps) | Expr::Shuffle(ps) => {
                for p in ps {
                    p.vars_into(out);
                }
            }
            Expr::Omega(c) | Expr::OmegaBar(c) => c.vars_into(out),
        }
    }

    pub fn vars(&self) -> Vec<VarId> {
        let mut v = Vec::new();
        self.vars_into(&mut v);
        v
    }

    /// Is this a normal-form right-hand side?
    fn is_normal(&self) -> bool {
        fn atom(e: &Expr) -> bool {
            matches!(e, Expr::Symbol(_) | Expr::Var(_))
        }
        match self {
            Expr::Symbol(_) | Expr::Var(_) => true,
            Expr::Concat(ps) => ps.iter().all(atom),
            Expr::Omega(c) | Expr::OmegaBar(c) => atom(c),
            Expr::Shuffle(ps) => ps.iter().all(atom),
        }
    }
}

/// A succinct expression system: acyclic variable definitions over a
/// terminal alphabet, with an optional start variable.
#[derive(Debug, Clone)]
pub struct Ses {
    pub var_names: Vec<String>,
    pub alphabet: Alphabet,
    pub rhs: Vec<Expr>,
    pub start: Option<VarId>,
}

impl Ses {
    pub fn new(var_names: Vec<String>, alphabet: Alphabet, rhs: Vec<Expr>, start: Option<VarId>) -> Result<Ses> {
        if var_names.len() != rhs.len() {
            return Err(Error::InvalidInput("one name per variable required".into()));
        }
        let ses = Ses { var_names, alphabet, rhs, start };
        for e in &ses.rhs {
            e.check(ses.rhs.len(), ses.alphabet.len())?;
        }
        ses.topological()?;
        if let Some(s) = start {
            if s >= ses.rhs.len() {
                return Err(Error::InvalidInput("start variable out of range".into()));
            }
        }
        Ok(ses)
    }

    pub fn var_count(&self) -> usize {
        self.rhs.len()
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.var_names.iter().position(|n| n == name)
    }

    /// Size |A| = sum of expression sizes of all right-hand sides.
    pub fn size(&self) -> usize {
        fn sz(e: &Expr) -> usize {
            match e {
                Expr::Symbol(_) | Expr::Var(_) => 1,
                Expr::Concat(ps) => ps.iter().map(sz).sum(),
                Expr::Omega(c) | Expr::OmegaBar(c) => sz(c) + 1,
                Expr::Shuffle(ps) => ps.iter().map(sz).sum::<usize>() + 1,
            }
        }
        self.rhs.iter().map(sz).sum()
    }

    /// Variables in hierarchical order (referenced before referencing).
    pub fn topological(&self) -> Result<Vec<VarId>> {
        let n = self.rhs.len();
        let mut state = vec![0u8; n];
        let mut order = Vec::with_capacity(n);
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, self.rhs[root].vars(), 0usize)];
            state[root] = 1;
            while let Some((v, deps, mut i)) = stack.pop() {
                let mut descended = false;
                while i < deps.len() {
                    let u = deps[i];
                    i += 1;
                    match state[u] {
                        0 => {
                            state[u] = 1;
                            stack.push((v, deps, i));
                            stack.push((u, self.rhs[u].vars(), 0));
                            descended = true;
                            break;
                        }
                        1 => {
                            return Err(Error::InvalidInput(format!(
                                "cyclic variable references involving `{}`",
                                self.var_names[u]
                            )));
                        }
                        _ => {}
                    }
                }
                if !descended {
                    state[v] = 2;
                    order.push(v);
                }
            }
        }
        Ok(order)
    }

    pub fn is_normal_form(&self) -> bool {
        self.rhs.iter().all(|e| e.is_normal())
    }

    /// Evaluate a variable to an explicit finite word. Fails if the value is
    /// infinite (omega, omega-bar or shuffle occur) or exceeds `cap` letters.
    pub fn eval_finite(&self, var: VarId, cap: usize) -> Result<Vec<SymId>> {
        let order = self.topological()?;
        let mut vals: Vec<Option<Vec<SymId>>> = vec![None; self.rhs.len()];
        fn eval(e: &Expr, vals: &[Option<Vec<SymId>>], cap: usize) -> Result<Vec<SymId>> {
            match e {
                Expr::Symbol(s) => Ok(vec![*s]),
                Expr::Var(v) => Ok(vals[*v].clone().expect("topological order")),
                Expr::Concat(ps) => {
                    let mut out = Vec::new();
                    for p in ps {
                        out.extend(eval(p, vals, cap)?);
                        if out.len() > cap {
                            return Err(Error::ResourceLimit(format!("finite evaluation exceeded {cap} letters")));
                        }
                    }
                    Ok(out)
                }
                _ => Err(Error::InvalidInput("value is not a finite word".into())),
            }
        }
        for v in order {
            vals[v] = Some(eval(&self.rhs[v], &vals, cap)?);
        }
        Ok(vals[var].clone().unwrap())
    }
}

/// Normal form: every right-hand side is a nonempty word over variables and
/// symbols, or `Y^omega`, `Y^omegabar`, `[Y1,...,Yn]^eta` with atomic `Yi`.
/// Fresh variables are introduced for nested subexpressions; the values of
/// the original variables are unchanged.
pub fn normalize_ses(s: &Ses) -> Ses {
    let mut names = s.var_names.clone();
    let mut used: BTreeSet<String> = names.iter().cloned().collect();
    let mut rhs = s.rhs.clone();
    let mut i = 0;
    while i < rhs.len() {
        let e = rhs[i].clone();
        let mut fresh = Vec::new();
        let n = normalize_rhs(e, &mut fresh, rhs.len());
        rhs[i] = n;
        for f in fresh {
            names.push(fresh_name(&mut used, rhs.len()));
            rhs.push(f);
        }
        i += 1;
    }
    Ses::new(names, s.alphabet.clone(), rhs, s.start).expect("normalization preserves validity")
}

pub(crate) fn fresh_name(used: &mut BTreeSet<String>, hint: usize) -> String {
    let mut i = hint;
    loop {
        let name = format!("_n{i}");
        if !used.contains(&name) {
            used.insert(name.clone());
            return name;
        }
        i += 1;
    }
}

/// Rewrite one right-hand side into normal form, appending definitions of
/// fresh variables to `fresh` (ids continue from `next_id`).
fn normalize_rhs(e: Expr, fresh: &mut Vec<Expr>, next_id: usize) -> Expr {
    fn atomize(e: Expr, fresh: &mut Vec<Expr>, next_id: usize) -> Expr {
        match e {
            Expr::Symbol(_) | Expr::Var(_) => e,
            other => {
                let n = normalize_rhs(other, fresh, next_id);
                fresh.push(n);
                Expr::Var(next_id + fresh.len() - 1)
            }
        }
    }
    match e {
        Expr::Symbol(_) | Expr::Var(_) => e,
        Expr::Concat(parts) => {
            let flat = Expr::concat(parts);
            match flat {
                Expr::Concat(parts) => {
                    let atoms = parts.into_iter().map(|p| atomize(p, fresh, next_id)).collect();
                    Expr::Concat(atoms)
                }
                single => normalize_rhs(single, fresh, next_id),
            }
        }
        Expr::Omega(c) => Expr::Omega(Box::new(atomize(*c, fresh, next_id))),
        Expr::OmegaBar(c) => Expr::OmegaBar(Box::new(atomize(*c, fresh, next_id))),
        Expr::Shuffle(parts) => {
            let atoms: Vec<Expr> = parts.into_iter().map(|p| atomize(p, fresh, next_id)).collect();
            Expr::shuffle(atoms)
        }
    }
}

/// depth and height of a variable of a normal-form SES.
pub fn depth_height(s: &Ses, var: VarId) -> Result<(usize, usize)> {
    if !s.is_normal_form() {
        return Err(Error::InvalidInput("depth/height requires a normal-form SES".into()));
    }
    let order = s.topological()?;
    let mut dh: Vec<(usize, usize)> = vec![(0, 0); s.var_count()];
    let of = |e: &Expr, dh: &[(usize, usize)]| -> (usize, usize) {
        match e {
            Expr::Symbol(_) => (0, 0),
            Expr::Var(v) => dh[*v],
            _ => unreachable!("atoms only"),
        }
    };
    for v in order {
        dh[v] = match &s.rhs[v] {
            a @ (Expr::Symbol(_) | Expr::Var(_)) => {
                let (d, h) = of(a, &dh);
                (d + 1, h)
            }
            Expr::Concat(parts) => {
                let ds = parts.iter().map(|p| of(p, &dh));
                let (d, h) = ds.fold((0, 0), |(d, h), (d2, h2)| (d.max(d2), h.max(h2)));
                (d + 1, h)
            }
            Expr::Omega(c) | Expr::OmegaBar(c) => {
                let (d, h) = of(c, &dh);
                (d + 1, h + 1)
            }
            Expr::Shuffle(parts) => {
                let ds = parts.iter().map(|p| of(p, &dh));
                let (d, h) = ds.fold((0, 0), |(d, h), (d2, h2)| (d.max(d2), h.max(h2)));
                (d + 1, h + 1)
            }
        };
    }
    Ok(dh[var])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha_ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    #[test]
    fn normalize_extracts_nested() {
        // X = (ab)^omega  =>  X = Y^omega, Y = a b
        let ses = Ses::new(
            vec!["X".into()],
            alpha_ab(),
            vec![Expr::omega(Expr::concat(vec![Expr::Symbol(0), Expr::Symbol(1)]))],
            Some(0),
        )
        .unwrap();
        let n = normalize_ses(&ses);
        assert!(n.is_normal_form());
        assert_eq!(n.var_count(), 2);
        assert_eq!(n.rhs[0], Expr::Omega(Box::new(Expr::Var(1))));
        assert_eq!(n.rhs[1], Expr::Concat(vec![Expr::Symbol(0), Expr::Symbol(1)]));
    }

    #[test]
    fn normalize_already_normal_unchanged() {
        let ses = Ses::new(
            vec!["X".into(), "Y".into()],
            alpha_ab(),
            vec![Expr::Omega(Box::new(Expr::Var(1))), Expr::Concat(vec![Expr::Symbol(0), Expr::Symbol(1)])],
            Some(0),
        )
        .unwrap();
        let n = normalize_ses(&ses);
        assert_eq!(n.var_count(), 2);
        assert_eq!(n.rhs, ses.rhs);
    }

    #[test]
    fn normalize_shuffle_args() {
        // X = [Y Z, a]^eta  =>  X = [W, a]^eta, W = Y Z
        let ses = Ses::new(
            vec!["X".into(), "Y".into(), "Z".into()],
            alpha_ab(),
            vec![
                Expr::shuffle(vec![Expr::concat(vec![Expr::Var(1), Expr::Var(2)]), Expr::Symbol(0)]),
                Expr::Symbol(0),
                Expr::Symbol(1),
            ],
            Some(0),
        )
        .unwrap();
        let n = normalize_ses(&ses);
        assert!(n.is_normal_form());
        assert_eq!(n.rhs[0], Expr::Shuffle(vec![Expr::Var(3), Expr::Symbol(0)]));
        assert_eq!(n.rhs[3], Expr::Concat(vec![Expr::Var(1), Expr::Var(2)]));
    }

    #[test]
    fn depth_height_examples() {
        // X = Y^omega, Y = ab: depth(X)=2, height(X)=1
        let ses = Ses::new(
            vec!["X".into(), "Y".into()],
            alpha_ab(),
            vec![Expr::Omega(Box::new(Expr::Var(1))), Expr::Concat(vec![Expr::Symbol(0), Expr::Symbol(1)])],
            Some(0),
        )
        .unwrap();
        assert_eq!(depth_height(&ses, 0).unwrap(), (2, 1));
        assert_eq!(depth_height(&ses, 1).unwrap(), (1, 0));

        // X = [Y]^eta, Y = Z^omega, Z = a: height(X) = 2
        let ses2 = Ses::new(
            vec!["X".into(), "Y".into(), "Z".into()],
            alpha_ab(),
            vec![
                Expr::Shuffle(vec![Expr::Var(1)]),
                Expr::Omega(Box::new(Expr::Var(2))),
                Expr::Symbol(0),
            ],
            Some(0),
        )
        .unwrap();
        assert_eq!(depth_height(&ses2, 0).unwrap().1, 2);
    }

    #[test]
    fn depth_height_rejects_non_normal() {
        let ses = Ses::new(
            vec!["X".into()],
            alpha_ab(),
            vec![Expr::omega(Expr::concat(vec![Expr::Symbol(0), Expr::Symbol(1)]))],
            Some(0),
        )
        .unwrap();
        assert!(depth_height(&ses, 0).is_err());
    }

    #[test]
    fn cyclic_rejected() {
        let r = Ses::new(
            vec!["X".into(), "Y".into()],
            alpha_ab(),
            vec![Expr::Var(1), Expr::Var(0)],
            None,
        );
        assert!(r.is_err());
    }

    #[test]
    fn eval_finite_works() {
        let ses = Ses::new(
            vec!["X".into(), "Y".into()],
            alpha_ab(),
            vec![Expr::Concat(vec![Expr::Var(1), Expr::Var(1)]), Expr::Concat(vec![Expr::Symbol(0), Expr::Symbol(1)])],
            Some(0),
        )
        .unwrap();
        assert_eq!(ses.eval_finite(0, 100).unwrap(), vec![0, 1, 0, 1]);
    }
}
