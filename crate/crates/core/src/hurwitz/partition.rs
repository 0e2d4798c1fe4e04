use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::HurwitzError;
use crate::rational::factorial_u;

/// An integer partition, parts weakly decreasing and positive.
///
/// Serializes as a descending array of parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Sorts `parts` descending; rejects zero parts.
    pub fn new(mut parts: Vec<u32>) -> Result<Self, HurwitzError> {
        if parts.contains(&0) {
            return Err(HurwitzError::InvalidPartition(format!("{parts:?}")));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition(parts))
    }

    /// `(1^d)`, the class of the identity.
    pub fn identity(d: u32) -> Self {
        Partition(vec![1; d as usize])
    }

    /// `(d)`, the class of a full cycle.
    pub fn cycle(d: u32) -> Self {
        if d == 0 {
            Partition(vec![])
        } else {
            Partition(vec![d])
        }
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `m_i`, the number of parts equal to `i`, for `i = 1..=size`.
    pub fn multiplicities(&self) -> Vec<u32> {
        let mut m = vec![0; self.size() as usize + 1];
        for &p in &self.0 {
            m[p as usize] += 1;
        }
        m
    }

    /// `z_λ = ∏ i^{m_i} m_i!`, the centraliser order.
    pub fn z(&self) -> BigUint {
        let mut z = BigUint::from(1u32);
        for (i, &m) in self.multiplicities().iter().enumerate().skip(1) {
            z *= BigUint::from(i as u32).pow(m) * factorial_u(m);
        }
        z
    }

    /// Number of permutations of cycle type `self`: `d! / z_λ`.
    pub fn class_size(&self) -> BigUint {
        factorial_u(self.size()) / self.z()
    }

    /// Every partition of `d`, in reverse lexicographic order: `(d)` first,
    /// `(1^d)` last.
    pub fn all(d: u32) -> Vec<Partition> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
            if rest == 0 {
                out.push(Partition(cur.clone()));
                return;
            }
            for p in (1..=rest.min(max)).rev() {
                cur.push(p);
                rec(rest - p, p, cur, out);
                cur.pop();
            }
        }
        rec(d, d, &mut cur, &mut out);
        out
    }

    /// The partitions obtained by choosing a sub-multiset of parts; each
    /// distinct sub-multiset once, paired with its complement.
    pub fn sub_multisets(&self) -> Vec<(Partition, Partition)> {
        let mut groups: Vec<(u32, u32)> = Vec::new();
        for &p in &self.0 {
            match groups.last_mut() {
                Some((q, c)) if *q == p => *c += 1,
                _ => groups.push((p, 1)),
            }
        }
        let mut out = vec![(Vec::new(), Vec::new())];
        for &(p, c) in &groups {
            let mut next = Vec::new();
            for (a, b) in &out {
                for k in 0..=c {
                    let mut a: Vec<u32> = a.clone();
                    let mut b: Vec<u32> = b.clone();
                    a.extend(std::iter::repeat_n(p, k as usize));
                    b.extend(std::iter::repeat_n(p, (c - k) as usize));
                    next.push((a, b));
                }
            }
            out = next;
        }
        out.into_iter().map(|(a, b)| (Partition(a), Partition(b))).collect()
    }
}

impl TryFrom<Vec<u32>> for Partition {
    type Error = HurwitzError;
    fn try_from(v: Vec<u32>) -> Result<Self, Self::Error> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<u32> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Parses comma-separated parts, e.g. `"2,1"`.
impl FromStr for Partition {
    type Err = HurwitzError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = s
            .split(',')
            .map(|x| x.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| HurwitzError::InvalidPartition(s.to_string()))?;
        Partition::new(parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn class_sizes_in_s3() {
        assert_eq!(p(&[1, 1, 1]).class_size(), BigUint::from(1u32));
        assert_eq!(p(&[2, 1]).class_size(), BigUint::from(3u32));
        assert_eq!(p(&[3]).class_size(), BigUint::from(2u32));
    }

    #[test]
    fn class_sizes_sum_to_factorial() {
        for d in 1..=8 {
            let total: BigUint = Partition::all(d).iter().map(Partition::class_size).sum();
            assert_eq!(total, factorial_u(d));
        }
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=8).map(|d| Partition::all(d).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22]);
    }

    #[test]
    fn parse_and_display() {
        let q: Partition = "1,3,1".parse().unwrap();
        assert_eq!(q.parts(), &[3, 1, 1]);
        assert_eq!(q.to_string(), "3,1,1");
        assert!("2,0".parse::<Partition>().is_err());
        assert!("x".parse::<Partition>().is_err());
        assert_eq!(serde_json::to_string(&q).unwrap(), "[3,1,1]");
        let back: Partition = serde_json::from_str("[1,3,1]").unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn sub_multisets_of_repeated_parts() {
        let subs = p(&[2, 1, 1]).sub_multisets();
        assert_eq!(subs.len(), 6);
        for (a, b) in subs {
            assert_eq!(a.size() + b.size(), 4);
        }
    }
}
