use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::partition::Partition;
use crate::rational::factorial_u;

/// Irreducible characters of `S_d`. Rows and columns are both indexed by
/// [`Partition::all`]`(d)`: rows are irreducibles, columns are classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterTable {
    pub degree: u32,
    pub partitions: Vec<Partition>,
    pub values: Vec<Vec<BigInt>>,
}

impl CharacterTable {
    pub(crate) fn build(d: u32) -> Self {
        let partitions = Partition::all(d);
        let mut memo = HashMap::new();
        let values = partitions
            .iter()
            .map(|lambda| {
                partitions
                    .iter()
                    .map(|mu| murnaghan_nakayama(lambda.parts(), mu.parts(), &mut memo))
                    .collect()
            })
            .collect();
        CharacterTable { degree: d, partitions, values }
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.partitions.iter().position(|q| q == p)
    }

    /// `χ_λ(μ)`.
    pub fn value(&self, lambda: &Partition, mu: &Partition) -> Option<&BigInt> {
        Some(&self.values[self.index_of(lambda)?][self.index_of(mu)?])
    }

    /// `dim λ = χ_λ(1^d)`.
    pub fn dimension(&self, row: usize) -> &BigInt {
        self.values[row].last().expect("the identity class is the last column")
    }

    /// `Σ_λ χ_λ(C) χ_λ(C') = δ_{C,C'} · d! / |C|` for every pair of columns.
    pub fn column_orthogonality_holds(&self) -> bool {
        let n = self.partitions.len();
        let order = BigInt::from(factorial_u(self.degree));
        for a in 0..n {
            for b in 0..n {
                let s: BigInt = (0..n).map(|r| &self.values[r][a] * &self.values[r][b]).sum();
                let expect = if a == b {
                    order.clone() / BigInt::from(self.partitions[a].class_size())
                } else {
                    BigInt::zero()
                };
                if s != expect {
                    return false;
                }
            }
        }
        true
    }
}

/// `χ_λ(μ)` by removing border strips of length `μ_1, μ_2, …` from `λ`,
/// working on beta-sets. Memoised on `(λ, remaining μ)`.
fn murnaghan_nakayama(
    lambda: &[u32],
    mu: &[u32],
    memo: &mut HashMap<(Vec<u32>, Vec<u32>), BigInt>,
) -> BigInt {
    if mu.is_empty() {
        return if lambda.is_empty() { BigInt::one() } else { BigInt::zero() };
    }
    let key = (lambda.to_vec(), mu.to_vec());
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let r = mu[0];
    let len = lambda.len() as u32;
    let beta: Vec<u32> = lambda.iter().enumerate().map(|(i, &l)| l + len - 1 - i as u32).collect();
    let mut total = BigInt::zero();
    for (i, &b) in beta.iter().enumerate() {
        if b < r || beta.contains(&(b - r)) {
            continue;
        }
        let crossed = beta.iter().filter(|&&x| x > b - r && x < b).count();
        let mut nb = beta.clone();
        nb[i] = b - r;
        nb.sort_unstable_by(|x, y| y.cmp(x));
        let shape: Vec<u32> = nb
            .iter()
            .enumerate()
            .map(|(j, &x)| x - (len - 1 - j as u32))
            .filter(|&p| p > 0)
            .collect();
        let v = murnaghan_nakayama(&shape, &mu[1..], memo);
        if crossed % 2 == 0 {
            total += v;
        } else {
            total -= v;
        }
    }
    memo.insert(key, total.clone());
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;

    fn dimension_square_sum(t: &CharacterTable) -> BigUint {
        (0..t.partitions.len()).map(|r| t.dimension(r).magnitude().pow(2)).sum()
    }

    #[test]
    fn s1_and_s3() {
        let t = CharacterTable::build(1);
        assert_eq!(t.values, vec![vec![BigInt::one()]]);
        let t = CharacterTable::build(3);
        let p = |s: &str| s.parse::<Partition>().unwrap();
        let row = |l: &str| -> Vec<i64> {
            ["1,1,1", "2,1", "3"]
                .iter()
                .map(|m| t.value(&p(l), &p(m)).unwrap().try_into().unwrap())
                .collect()
        };
        assert_eq!(row("3"), vec![1, 1, 1]);
        assert_eq!(row("2,1"), vec![2, 0, -1]);
        assert_eq!(row("1,1,1"), vec![1, -1, 1]);
    }

    #[test]
    fn orthogonality_up_to_eight() {
        for d in 1..=8 {
            let t = CharacterTable::build(d);
            assert!(t.column_orthogonality_holds(), "d = {d}");
            assert_eq!(dimension_square_sum(&t), factorial_u(d));
        }
    }
}
