//! Bottom-up classification of SES variables: is the value a primitive word
//! (one block), one of the bordered uniform forms `a G^eta`, `G^eta b`,
//! `a G^eta b`, or neither? The uniform absorption identities
//! `G^eta G^eta = G^eta a G^eta = (G^eta)^omega = (G^eta a)^omega = ... = G^eta`
//! and `(a G^eta)^omega = a G^eta` drive the case analysis; SLPs for the
//! scattered components are built along the way.

use super::{Expr, PrimitiveForm, Ses};
use crate::automata::SymId;
use crate::error::{Error, Result};
use crate::slp::{slp_length, Slp};
use num_traits::One;
use std::collections::BTreeSet;

/// Classification result for one variable.
#[derive(Debug, Clone)]
pub enum ExtendedForm {
    Primitive(PrimitiveForm),
    /// `a G^eta` with `a` in `G`.
    LUniform(SymId, BTreeSet<SymId>),
    /// `G^eta b` with `b` in `G`.
    RUniform(BTreeSet<SymId>, SymId),
    /// `a G^eta b` with `a`, `b` in `G`.
    LRUniform(SymId, BTreeSet<SymId>, SymId),
    NotClassifiable,
}

impl ExtendedForm {
    pub fn primitive(&self) -> Option<&PrimitiveForm> {
        match self {
            ExtendedForm::Primitive(p) => Some(p),
            _ => None,
        }
    }

    pub fn is_primitive(&self) -> bool {
        matches!(self, ExtendedForm::Primitive(_))
    }
}

/// Working form during folding; `Uni(l, g, r)` is `l? G^eta r?`.
#[derive(Debug, Clone)]
enum K {
    Fin(Slp),
    RRay(Option<Slp>, Slp),
    LRay(Slp, Option<Slp>),
    BRay(Slp, Option<Slp>, Slp),
    Uni(Option<SymId>, BTreeSet<SymId>, Option<SymId>),
    Nc,
}

fn cat_opt(a: Option<Slp>, b: Option<Slp>) -> Option<Slp> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(a.concat(&b)),
    }
}

fn single_sym(s: &Slp) -> Option<SymId> {
    if slp_length(s).is_one() {
        Some(s.first_sym(s.root()))
    } else {
        None
    }
}

fn concat(x: &K, y: &K) -> K {
    use K::*;
    match (x, y) {
        (Nc, _) | (_, Nc) => Nc,
        (Fin(a), Fin(b)) => Fin(a.concat(b)),
        (Fin(a), RRay(v, w)) => RRay(cat_opt(Some(a.clone()), v.clone()), w.clone()),
        (LRay(u, v), Fin(b)) => LRay(u.clone(), cat_opt(v.clone(), Some(b.clone()))),
        (LRay(u, v1), RRay(v2, w)) => BRay(u.clone(), cat_opt(v1.clone(), v2.clone()), w.clone()),
        (Fin(a), Uni(None, g, r)) => match single_sym(a) {
            Some(s) if g.contains(&s) => Uni(Some(s), g.clone(), *r),
            _ => Nc,
        },
        (Uni(l, g, None), Fin(b)) => match single_sym(b) {
            Some(s) if g.contains(&s) => Uni(*l, g.clone(), Some(s)),
            _ => Nc,
        },
        (Uni(l1, g1, r1), Uni(l2, g2, r2)) => {
            // G^eta x G^eta = G^eta for x absent or a single symbol of G
            if g1 == g2 && (r1.is_none() || l2.is_none()) {
                Uni(*l1, g1.clone(), *r2)
            } else {
                Nc
            }
        }
        _ => Nc,
    }
}

fn omega(x: &K) -> K {
    use K::*;
    match x {
        Fin(w) => RRay(None, w.clone()),
        Uni(None, g, _) => Uni(None, g.clone(), None), // (G^eta)^w = (G^eta b)^w = G^eta
        Uni(Some(a), g, None) => Uni(Some(*a), g.clone(), None), // (a G^eta)^w = a G^eta
        _ => Nc,
    }
}

fn omega_bar(x: &K) -> K {
    use K::*;
    match x {
        Fin(w) => LRay(w.clone(), None),
        Uni(_, g, None) => Uni(None, g.clone(), None),
        Uni(None, g, Some(b)) => Uni(None, g.clone(), Some(*b)),
        _ => Nc,
    }
}

fn shuffle(args: &[K]) -> K {
    use K::*;
    let mut gamma: BTreeSet<SymId> = BTreeSet::new();
    let mut any_uni = false;
    for a in args {
        match a {
            Fin(w) => match single_sym(w) {
                Some(s) => {
                    gamma.insert(s);
                }
                None => return Nc,
            },
            Uni(_, g, _) => {
                any_uni = true;
                gamma.extend(g.iter().copied());
            }
            _ => return Nc,
        }
    }
    if any_uni {
        // every uniform argument must already span the whole set
        for a in args {
            if let Uni(_, g, _) = a {
                if *g != gamma {
                    return Nc;
                }
            }
        }
    }
    Uni(None, gamma, None)
}

fn to_extended(k: K) -> ExtendedForm {
    match k {
        K::Fin(s) => ExtendedForm::Primitive(PrimitiveForm::Finite(s)),
        K::RRay(v, w) => ExtendedForm::Primitive(PrimitiveForm::RightRay(v, w)),
        K::LRay(u, v) => ExtendedForm::Primitive(PrimitiveForm::LeftRay(u, v)),
        K::BRay(u, v, w) => ExtendedForm::Primitive(PrimitiveForm::BiRay(u, v, w)),
        K::Uni(None, g, None) => ExtendedForm::Primitive(PrimitiveForm::Uniform(g)),
        K::Uni(Some(a), g, None) => ExtendedForm::LUniform(a, g),
        K::Uni(None, g, Some(b)) => ExtendedForm::RUniform(g, b),
        K::Uni(Some(a), g, Some(b)) => ExtendedForm::LRUniform(a, g, b),
        K::Nc => ExtendedForm::NotClassifiable,
    }
}

fn to_k(e: &ExtendedForm) -> K {
    match e {
        ExtendedForm::Primitive(PrimitiveForm::Finite(s)) => K::Fin(s.clone()),
        ExtendedForm::Primitive(PrimitiveForm::RightRay(v, w)) => K::RRay(v.clone(), w.clone()),
        ExtendedForm::Primitive(PrimitiveForm::LeftRay(u, v)) => K::LRay(u.clone(), v.clone()),
        ExtendedForm::Primitive(PrimitiveForm::BiRay(u, v, w)) => K::BRay(u.clone(), v.clone(), w.clone()),
        ExtendedForm::Primitive(PrimitiveForm::Uniform(g)) => K::Uni(None, g.clone(), None),
        ExtendedForm::LUniform(a, g) => K::Uni(Some(*a), g.clone(), None),
        ExtendedForm::RUniform(g, b) => K::Uni(None, g.clone(), Some(*b)),
        ExtendedForm::LRUniform(a, g, b) => K::Uni(Some(*a), g.clone(), Some(*b)),
        ExtendedForm::NotClassifiable => K::Nc,
    }
}

/// The classification algebra on already-classified operands, exposed for
/// the two-level systems which classify over their own reference universe.
pub fn combine_concat(forms: &[ExtendedForm]) -> ExtendedForm {
    let mut acc = to_k(&forms[0]);
    for f in &forms[1..] {
        acc = concat(&acc, &to_k(f));
    }
    to_extended(acc)
}

pub fn combine_omega(f: &ExtendedForm) -> ExtendedForm {
    to_extended(omega(&to_k(f)))
}

pub fn combine_omega_bar(f: &ExtendedForm) -> ExtendedForm {
    to_extended(omega_bar(&to_k(f)))
}

pub fn combine_shuffle(forms: &[ExtendedForm]) -> ExtendedForm {
    let ks: Vec<K> = forms.iter().map(to_k).collect();
    to_extended(shuffle(&ks))
}

/// Classify every variable of a normal-form SES.
pub fn classify_primitive(s: &Ses) -> Result<Vec<ExtendedForm>> {
    if !s.is_normal_form() {
        return Err(Error::InvalidInput("classification requires a normal-form SES".into()));
    }
    let order = s.topological()?;
    let mut forms: Vec<ExtendedForm> = vec![ExtendedForm::NotClassifiable; s.var_count()];
    for v in order {
        let atom_k = |e: &Expr, forms: &[ExtendedForm]| -> K {
            match e {
                Expr::Symbol(sym) => K::Fin(Slp::leaf(*sym)),
                Expr::Var(u) => to_k(&forms[*u]),
                _ => unreachable!("normal form atoms"),
            }
        };
        let k = match &s.rhs[v] {
            a @ (Expr::Symbol(_) | Expr::Var(_)) => atom_k(a, &forms),
            Expr::Concat(parts) => {
                let mut acc = atom_k(&parts[0], &forms);
                for p in &parts[1..] {
                    acc = concat(&acc, &atom_k(p, &forms));
                }
                acc
            }
            Expr::Omega(c) => omega(&atom_k(c, &forms)),
            Expr::OmegaBar(c) => omega_bar(&atom_k(c, &forms)),
            Expr::Shuffle(parts) => {
                let ks: Vec<K> = parts.iter().map(|p| atom_k(p, &forms)).collect();
                shuffle(&ks)
            }
        };
        forms[v] = to_extended(k);
    }
    Ok(forms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Alphabet;
    use crate::words::normalize_ses;

    fn alpha_ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn classify(rhs: Vec<Expr>) -> Vec<ExtendedForm> {
        let names = (0..rhs.len()).map(|i| format!("V{i}")).collect();
        let ses = Ses::new(names, alpha_ab(), rhs, Some(0)).unwrap();
        classify_primitive(&normalize_ses(&ses)).unwrap()
    }

    #[test]
    fn omega_of_finite_is_right_ray() {
        // X = Y^omega, Y = ab
        let forms = classify(vec![
            Expr::Omega(Box::new(Expr::Var(1))),
            Expr::Concat(vec![Expr::Symbol(0), Expr::Symbol(1)]),
        ]);
        match &forms[0] {
            ExtendedForm::Primitive(PrimitiveForm::RightRay(None, w)) => {
                assert_eq!(w.expand(10).unwrap(), vec![0, 1]);
            }
            other => panic!("expected a right ray, got {other:?}"),
        }
    }

    #[test]
    fn shuffle_of_symbols_is_uniform() {
        // X = [A, B]^eta, A = a, B = b
        let forms = classify(vec![
            Expr::Shuffle(vec![Expr::Var(1), Expr::Var(2)]),
            Expr::Symbol(0),
            Expr::Symbol(1),
        ]);
        match &forms[0] {
            ExtendedForm::Primitive(PrimitiveForm::Uniform(g)) => {
                assert_eq!(g.iter().copied().collect::<Vec<_>>(), vec![0, 1]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn footnote_case_luniform_inside_shuffle() {
        // X = [Y]^eta with val(Y) = a [a]^eta: X is primitive, Y is not
        let forms = classify(vec![
            Expr::Shuffle(vec![Expr::Var(1)]),
            Expr::Concat(vec![Expr::Symbol(0), Expr::Var(2)]),
            Expr::Shuffle(vec![Expr::Symbol(0)]),
        ]);
        match &forms[1] {
            ExtendedForm::LUniform(a, g) => {
                assert_eq!(*a, 0);
                assert_eq!(g.iter().copied().collect::<Vec<_>>(), vec![0]);
            }
            other => panic!("Y should be a bordered uniform, got {other:?}"),
        }
        assert!(matches!(&forms[0], ExtendedForm::Primitive(PrimitiveForm::Uniform(_))));
    }

    #[test]
    fn shuffle_of_long_word_not_classifiable() {
        // [ab]^eta is not primitive: blocks are the ab copies
        let forms = classify(vec![Expr::Shuffle(vec![Expr::Var(1)]), Expr::Concat(vec![Expr::Symbol(0), Expr::Symbol(1)])]);
        assert!(matches!(forms[0], ExtendedForm::NotClassifiable));
    }

    #[test]
    fn uniform_absorption_chain() {
        // G^eta a G^eta = G^eta; (G^eta a)^omega = G^eta; (a G^eta)^omega = a G^eta
        let g = Expr::Shuffle(vec![Expr::Symbol(0), Expr::Symbol(1)]);
        let forms = classify(vec![
            Expr::concat(vec![g.clone(), Expr::Symbol(0), g.clone()]),
            Expr::omega(Expr::concat(vec![g.clone(), Expr::Symbol(0)])),
            Expr::omega(Expr::concat(vec![Expr::Symbol(0), g.clone()])),
        ]);
        assert!(matches!(&forms[0], ExtendedForm::Primitive(PrimitiveForm::Uniform(_))));
        assert!(matches!(&forms[1], ExtendedForm::Primitive(PrimitiveForm::Uniform(_))));
        assert!(matches!(&forms[2], ExtendedForm::LUniform(0, _)));
    }

    #[test]
    fn mixed_uniform_sets_not_classifiable() {
        // [ {a}^eta-copy , b ]^eta with b outside the set
        let forms = classify(vec![Expr::Shuffle(vec![Expr::Var(1), Expr::Symbol(1)]), Expr::Shuffle(vec![Expr::Symbol(0)])]);
        assert!(matches!(forms[0], ExtendedForm::NotClassifiable));
    }

    #[test]
    fn rays_and_birays() {
        // X = A^omegabar B^omega, A = a, B = b
        let forms = classify(vec![
            Expr::concat(vec![Expr::omega_bar(Expr::Symbol(0)), Expr::omega(Expr::Symbol(1))]),
        ]);
        assert!(matches!(&forms[0], ExtendedForm::Primitive(PrimitiveForm::BiRay(..))));
        // omega of a ray is not classifiable
        let forms2 = classify(vec![Expr::omega(Expr::omega(Expr::Symbol(0)))]);
        assert!(matches!(forms2[0], ExtendedForm::NotClassifiable));
    }
}
