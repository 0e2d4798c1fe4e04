//! Marking semigroups.
//!
//! Graph vertices carry a mark `a(v)` in a commutative unital semigroup `A`
//! with an indecomposable zero (`a + b = 0` forces `a = b = 0`) and finitely
//! many decompositions of every element. Two instances ship: the trivial
//! semigroup and the two-element `{0, 1}` with `1 + 1 = 1`.

use std::fmt::Debug;
use std::hash::Hash;

/// A commutative unital semigroup with indecomposable zero and finite
/// decompositions.
pub trait MarkSemigroup: Copy + Eq + Ord + Hash + Debug + Send + Sync + 'static {
    fn zero() -> Self;

    fn add(self, other: Self) -> Self;

    /// All elements. Only finite instances are shipped.
    fn elements() -> Vec<Self>;

    /// Every ordered pair `(a1, a2)` with `a1 + a2 == self`, without repeats.
    fn decompositions(self) -> Vec<(Self, Self)> {
        let all = Self::elements();
        let mut out = Vec::new();
        for &a in &all {
            for &b in &all {
                if a.add(b) == self {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Small integer code used for serialization and graph coloring.
    fn code(self) -> u32;

    fn from_code(code: u32) -> Option<Self>;

    fn is_zero(self) -> bool {
        self == Self::zero()
    }
}

/// `A = {0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Trivial;

impl MarkSemigroup for Trivial {
    fn zero() -> Self {
        Trivial
    }

    fn add(self, _other: Self) -> Self {
        Trivial
    }

    fn elements() -> Vec<Self> {
        vec![Trivial]
    }

    fn decompositions(self) -> Vec<(Self, Self)> {
        vec![(Trivial, Trivial)]
    }

    fn code(self) -> u32 {
        0
    }

    fn from_code(code: u32) -> Option<Self> {
        (code == 0).then_some(Trivial)
    }
}

/// `A = {0, 1}` with `1 + 1 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Bool01(pub bool);

impl MarkSemigroup for Bool01 {
    fn zero() -> Self {
        Bool01(false)
    }

    fn add(self, other: Self) -> Self {
        Bool01(self.0 || other.0)
    }

    fn elements() -> Vec<Self> {
        vec![Bool01(false), Bool01(true)]
    }

    fn code(self) -> u32 {
        self.0 as u32
    }

    fn from_code(code: u32) -> Option<Self> {
        match code {
            0 => Some(Bool01(false)),
            1 => Some(Bool01(true)),
            _ => None,
        }
    }
}

/// Sum of a sequence of marks.
pub fn sum_marks<A: MarkSemigroup>(marks: impl IntoIterator<Item = A>) -> A {
    marks.into_iter().fold(A::zero(), A::add)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_axioms<A: MarkSemigroup>() {
        let all = A::elements();
        for &a in &all {
            assert_eq!(a.add(A::zero()), a);
            for &b in &all {
                assert_eq!(a.add(b), b.add(a));
                if a.add(b).is_zero() {
                    assert!(a.is_zero() && b.is_zero(), "zero must be indecomposable");
                }
                for &c in &all {
                    assert_eq!(a.add(b).add(c), a.add(b.add(c)));
                }
            }
            let decs = a.decompositions();
            for &(x, y) in &decs {
                assert_eq!(x.add(y), a);
            }
            let mut sorted = decs.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), decs.len(), "duplicate decomposition");
            let brute = all
                .iter()
                .flat_map(|&x| all.iter().map(move |&y| (x, y)))
                .filter(|&(x, y)| x.add(y) == a)
                .count();
            assert_eq!(brute, decs.len(), "missing decomposition");
            assert_eq!(A::from_code(a.code()), Some(a));
        }
    }

    #[test]
    fn trivial_instance() {
        check_axioms::<Trivial>();
        assert_eq!(Trivial.decompositions(), vec![(Trivial, Trivial)]);
    }

    #[test]
    fn two_element_instance() {
        check_axioms::<Bool01>();
        let one = Bool01(true);
        let zero = Bool01(false);
        assert_eq!(one.decompositions(), vec![(zero, one), (one, zero), (one, one)]);
        assert_eq!(zero.decompositions(), vec![(zero, zero)]);
        assert_eq!(sum_marks([zero, one, one]), one);
    }
}
