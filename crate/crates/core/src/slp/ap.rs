//! Arithmetic progressions of big-integer positions. Occurrence sets of a
//! pattern inside a window shorter than twice the pattern always form a
//! single progression, which keeps the occurrence tables of the compressed
//! matcher constant-size.

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `{start + i*diff | 0 <= i < count}`; `diff >= 1` whenever `count >= 2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ap {
    pub start: BigUint,
    pub diff: BigUint,
    pub count: BigUint,
}

impl Ap {
    pub fn empty() -> Ap {
        Ap { start: BigUint::zero(), diff: BigUint::zero(), count: BigUint::zero() }
    }

    pub fn singleton(p: BigUint) -> Ap {
        Ap { start: p, diff: BigUint::zero(), count: BigUint::one() }
    }

    pub fn is_empty(&self) -> bool {
        self.count.is_zero()
    }

    pub fn last(&self) -> BigUint {
        debug_assert!(!self.is_empty());
        &self.start + &self.diff * (&self.count - 1u32)
    }

    pub fn nth(&self, i: &BigUint) -> BigUint {
        debug_assert!(i < &self.count);
        &self.start + &self.diff * i
    }

    pub fn contains(&self, p: &BigUint) -> bool {
        if self.is_empty() || p < &self.start || *p > self.last() {
            return false;
        }
        if self.diff.is_zero() {
            return *p == self.start;
        }
        (p - &self.start) % &self.diff == BigUint::zero()
    }

    /// Restrict to positions in `[lo, hi]`.
    pub fn clip(&self, lo: &BigUint, hi: &BigUint) -> Ap {
        if self.is_empty() || lo > hi || self.last() < *lo || &self.start > hi {
            return Ap::empty();
        }
        if self.diff.is_zero() || self.count.is_one() {
            return if &self.start >= lo && &self.start <= hi {
                Ap::singleton(self.start.clone())
            } else {
                Ap::empty()
            };
        }
        let first_i = if &self.start >= lo {
            BigUint::zero()
        } else {
            // ceil((lo - start)/diff)
            (lo - &self.start + &self.diff - 1u32) / &self.diff
        };
        let last_i = (hi - &self.start) / &self.diff; // start <= hi here
        if first_i > last_i || first_i >= self.count {
            return Ap::empty();
        }
        let last_i = last_i.min(&self.count - 1u32);
        let start = self.nth(&first_i);
        let count = &last_i - &first_i + 1u32;
        let diff = if count.is_one() { BigUint::zero() } else { self.diff.clone() };
        Ap { start, diff, count }
    }

    /// Keep the first `n` elements.
    pub fn take(&self, n: &BigUint) -> Ap {
        if n >= &self.count {
            return self.clone();
        }
        if n.is_zero() {
            return Ap::empty();
        }
        let diff = if n.is_one() { BigUint::zero() } else { self.diff.clone() };
        Ap { start: self.start.clone(), diff, count: n.clone() }
    }

    pub fn iter_small(&self) -> impl Iterator<Item = BigUint> + '_ {
        let mut i = BigUint::zero();
        std::iter::from_fn(move || {
            if i >= self.count {
                return None;
            }
            let v = self.nth(&i);
            i += 1u32;
            Some(v)
        })
    }

    /// Union of two progressions that are known (by the periodicity lemma)
    /// to be consecutive pieces of one progression.
    pub fn union(&self, other: &Ap) -> Ap {
        if self.is_empty() {
            return other.clone();
        }
        if other.is_empty() {
            return self.clone();
        }
        let (a, b) = if self.start <= other.start { (self, other) } else { (other, self) };
        if a.contains(&b.start) && a.contains(&b.last()) && (b.diff.is_zero() || b.diff == a.diff || b.count.is_one())
        {
            if b.last() <= a.last() {
                return a.clone();
            }
        }
        let diff = if !a.diff.is_zero() {
            a.diff.clone()
        } else if !b.diff.is_zero() {
            b.diff.clone()
        } else {
            &b.start - &a.start
        };
        debug_assert!(
            {
                let gap = &b.start - &a.last();
                (a.count.is_one() || a.diff == diff)
                    && (b.count.is_one() || b.diff == diff)
                    && (gap == diff || gap.is_zero())
            },
            "occurrence progressions must be consecutive pieces"
        );
        if b.start == a.last() {
            // overlap in one point
            return Ap { start: a.start.clone(), diff, count: &a.count + &b.count - 1u32 };
        }
        Ap { start: a.start.clone(), diff, count: &a.count + &b.count }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ap(s: u32, d: u32, c: u32) -> Ap {
        Ap { start: s.into(), diff: d.into(), count: c.into() }
    }

    #[test]
    fn clip_basics() {
        let a = ap(10, 3, 5); // 10 13 16 19 22
        let c = a.clip(&12u32.into(), &20u32.into());
        assert_eq!(c, ap(13, 3, 3));
        assert!(a.clip(&23u32.into(), &30u32.into()).is_empty());
        let single = a.clip(&16u32.into(), &16u32.into());
        assert_eq!(single.start, 16u32.into());
        assert_eq!(single.count, BigUint::one());
    }

    #[test]
    fn union_consecutive() {
        let a = ap(10, 3, 3); // 10 13 16
        let b = ap(19, 3, 2); // 19 22
        let u = a.union(&b);
        assert_eq!(u, ap(10, 3, 5));
        let s = Ap::singleton(7u32.into());
        let u2 = s.union(&ap(10, 3, 3));
        assert_eq!(u2, ap(7, 3, 4));
    }
}
