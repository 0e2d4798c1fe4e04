use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::characters::CharacterTable;
use super::partition::Partition;
use super::perm::{all_perms, discrete_labels, is_single_block, Perm};
use super::HurwitzError;
use crate::rational::{factorial_u, Rational};

/// A degree and a list of conjugacy classes of `S_d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TupleSpec {
    pub degree: u32,
    pub classes: Vec<Partition>,
}

impl TupleSpec {
    pub fn new(degree: u32, classes: Vec<Partition>) -> Result<Self, HurwitzError> {
        for c in &classes {
            if c.size() != degree {
                return Err(HurwitzError::SizeMismatch { expected: degree, found: c.size() });
            }
        }
        Ok(TupleSpec { degree, classes })
    }

    /// The same spec with identity classes dropped and the rest sorted.
    /// Neither change affects tuple counts.
    pub fn normalized(&self) -> Self {
        let id = Partition::identity(self.degree);
        let mut classes: Vec<Partition> = self.classes.iter().filter(|c| **c != id).cloned().collect();
        classes.sort();
        TupleSpec { degree: self.degree, classes }
    }
}

fn class_members(d: usize) -> HashMap<Partition, Vec<Perm>> {
    let mut out: HashMap<Partition, Vec<Perm>> = HashMap::new();
    for p in all_perms(d) {
        out.entry(p.cycle_type()).or_default().push(p);
    }
    out
}

/// The classes ordered so that the largest is last: it is never iterated.
fn iteration_order(spec: &TupleSpec) -> Vec<Partition> {
    let mut classes = spec.classes.clone();
    classes.sort_by_key(|c| c.class_size());
    classes
}

/// `#{(σ_i) : σ_i ∈ C_i, σ_1⋯σ_n = 1}` by dynamic programming over partial
/// products; the last permutation is forced to be the inverse product.
pub fn brute_all(spec: &TupleSpec) -> BigUint {
    let d = spec.degree as usize;
    let classes = iteration_order(spec);
    let Some((last, init)) = classes.split_last() else {
        return BigUint::one();
    };
    let members = class_members(d);
    let mut state: HashMap<Perm, BigUint> = HashMap::from([(Perm::identity(d), BigUint::one())]);
    for c in init {
        let mut next: HashMap<Perm, BigUint> = HashMap::new();
        for (p, n) in &state {
            for s in &members[c] {
                *next.entry(p.then(s)).or_default() += n;
            }
        }
        state = next;
    }
    state
        .into_iter()
        .filter(|(p, _)| &p.cycle_type() == last)
        .map(|(_, n)| n)
        .sum()
}

/// The same count restricted to tuples generating a transitive subgroup.
/// The state also tracks the orbit partition of the group generated so far.
pub fn brute_transitive(spec: &TupleSpec) -> BigUint {
    let d = spec.degree as usize;
    let classes = iteration_order(spec);
    let Some((last, init)) = classes.split_last() else {
        return if d == 1 { BigUint::one() } else { BigUint::zero() };
    };
    let members = class_members(d);
    let mut state: HashMap<(Perm, u64), BigUint> =
        HashMap::from([((Perm::identity(d), discrete_labels(d)), BigUint::one())]);
    for c in init {
        let mut next: HashMap<(Perm, u64), BigUint> = HashMap::new();
        for ((p, orbits), n) in &state {
            for s in &members[c] {
                *next.entry((p.then(s), s.merge_orbits(*orbits))).or_default() += n;
            }
        }
        state = next;
    }
    state
        .into_iter()
        .filter(|((p, orbits), _)| {
            &p.cycle_type() == last && is_single_block(d, p.merge_orbits(*orbits))
        })
        .map(|(_, n)| n)
        .sum()
}

/// Frobenius' formula
/// `(∏|C_i| / d!) · Σ_λ ∏ χ_λ(C_i) / (dim λ)^{n-2}`.
pub fn frobenius_all(spec: &TupleSpec, table: &CharacterTable) -> BigUint {
    assert_eq!(table.degree, spec.degree, "character table of the wrong degree");
    let n = spec.classes.len() as i32;
    let cols: Vec<usize> = spec
        .classes
        .iter()
        .map(|c| table.index_of(c).expect("class of the right size"))
        .collect();
    let mut sum = Rational::zero();
    for row in 0..table.partitions.len() {
        let prod: BigInt = cols.iter().map(|&c| table.values[row][c].clone()).product();
        if prod.is_zero() {
            continue;
        }
        let dim = Rational::from(table.dimension(row).clone());
        sum += Rational::from(prod) * dim.pow(2 - n);
    }
    let sizes: BigUint = spec.classes.iter().map(Partition::class_size).product();
    let total = sum * Rational::from(sizes) / Rational::from(factorial_u(spec.degree));
    let n = total.to_integer().expect("tuple counts are integers");
    n.to_biguint().expect("tuple counts are non-negative")
}

/// Choices of one sub-multiset of size `b` from each class, paired with
/// the complements.
pub(crate) fn split_choices(classes: &[Partition], b: u32) -> Vec<(Vec<Partition>, Vec<Partition>)> {
    let mut out = vec![(Vec::new(), Vec::new())];
    for c in classes {
        let subs: Vec<(Partition, Partition)> =
            c.sub_multisets().into_iter().filter(|(s, _)| s.size() == b).collect();
        let mut next = Vec::new();
        for (a, r) in &out {
            for (s, t) in &subs {
                let mut a = a.clone();
                let mut r = r.clone();
                a.push(s.clone());
                r.push(t.clone());
                next.push((a, r));
            }
        }
        out = next;
    }
    out
}

/// Binomial coefficient as a `BigUint`.
pub(crate) fn binomial(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    factorial_u(n) / (factorial_u(k) * factorial_u(n - k))
}

/// Transitive counts from unrestricted ones by peeling off the orbit of the
/// point 1: `A(λ) = Σ_b C(d-1, b-1) Σ_{μ ⊂ λ, |μ| = b} T(μ) A(λ - μ)`.
pub(crate) fn transitive_by_inclusion_exclusion(
    spec: &TupleSpec,
    all: &mut dyn FnMut(&TupleSpec) -> Result<BigUint, HurwitzError>,
    memo: &mut HashMap<TupleSpec, BigUint>,
) -> Result<BigUint, HurwitzError> {
    let spec = spec.normalized();
    if let Some(v) = memo.get(&spec) {
        return Ok(v.clone());
    }
    let d = spec.degree;
    let mut value = BigInt::from(all(&spec)?);
    for b in 1..d {
        let coeff = BigInt::from(binomial(d - 1, b - 1));
        for (sub, rest) in split_choices(&spec.classes, b) {
            let t = transitive_by_inclusion_exclusion(&TupleSpec { degree: b, classes: sub }, all, memo)?;
            if t.is_zero() {
                continue;
            }
            let a = all(&TupleSpec { degree: d - b, classes: rest })?;
            value -= &coeff * BigInt::from(t) * BigInt::from(a);
        }
    }
    let value = value.to_biguint().expect("inclusion-exclusion gives a non-negative count");
    memo.insert(spec, value.clone());
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(d: u32, classes: &[&str]) -> TupleSpec {
        TupleSpec::new(d, classes.iter().map(|c| c.parse().unwrap()).collect()).unwrap()
    }

    #[test]
    fn degree_three_counts() {
        let s = spec(2, &["2", "2", "2", "2"]);
        assert_eq!(brute_all(&s), BigUint::from(1u32));
        assert_eq!(brute_transitive(&s), BigUint::from(1u32));
        let s = spec(3, &["3", "2,1", "2,1", "2,1", "2,1", "2,1", "2,1"]);
        assert_eq!(brute_all(&s), BigUint::from(486u32));
        assert_eq!(brute_transitive(&s), BigUint::from(486u32));
        let s = spec(3, &["3", "2,1", "2,1"]);
        assert_eq!(brute_all(&s), BigUint::from(6u32));
        assert_eq!(frobenius_all(&s, &CharacterTable::build(3)), BigUint::from(6u32));
        assert_eq!(brute_transitive(&spec(2, &["1,1", "1,1"])), BigUint::zero());
    }

    #[test]
    fn degenerate_specs() {
        let empty = TupleSpec::new(3, vec![]).unwrap();
        assert_eq!(brute_all(&empty), BigUint::one());
        assert_eq!(brute_transitive(&empty), BigUint::zero());
        assert_eq!(frobenius_all(&empty, &CharacterTable::build(3)), BigUint::one());
        let one = spec(1, &[]);
        assert_eq!(brute_transitive(&one), BigUint::one());
        let single = spec(3, &["1,1,1"]);
        assert_eq!(brute_all(&single), BigUint::one());
        assert_eq!(frobenius_all(&single, &CharacterTable::build(3)), BigUint::one());
    }

    #[test]
    fn size_mismatch_is_rejected() {
        let err = TupleSpec::new(3, vec!["2".parse().unwrap()]).unwrap_err();
        assert!(matches!(err, HurwitzError::SizeMismatch { expected: 3, found: 2 }));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(2, 3), BigUint::zero());
    }
}
