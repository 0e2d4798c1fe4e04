//! Reference values from the Virasoro (DVV) recursion.
//!
//! Nothing here touches the covering machinery; the only shared pieces are
//! [`Rational`] and [`BracketQuery`].

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;

use crate::query::{BracketQuery, QueryError};
use crate::rational::Rational;

/// `(2m - 1)!!`, with `(-1)!! = 1`.
fn odd_double_factorial(m: u32) -> BigInt {
    (1..=m).map(|i| BigInt::from(2 * i - 1)).product()
}

/// Memoised intersection numbers `⟨τ_{k_1}⋯τ_{k_n}⟩_g`, keyed by genus and
/// sorted exponents.
#[derive(Debug, Default, Clone)]
pub struct BracketTable {
    memo: HashMap<(u32, Vec<u32>), Rational>,
}

impl BracketTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.memo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.memo.is_empty()
    }

    /// The value for a dimension-valid query.
    pub fn get(&mut self, query: &BracketQuery) -> Rational {
        self.value(query.genus(), query.powers())
    }

    /// Every query with genus `≤ max_genus` and `1..=max_points` points.
    pub fn populate(&mut self, max_genus: u32, max_points: u32) {
        for g in 0..=max_genus {
            for n in 1..=max_points {
                for q in BracketQuery::all(g, n) {
                    self.get(&q);
                }
            }
        }
    }

    /// Stored entries with nonempty exponent lists, sorted.
    pub fn entries(&self) -> Vec<(u32, Vec<u32>, Rational)> {
        let mut v: Vec<_> = self
            .memo
            .iter()
            .filter(|((_, k), _)| !k.is_empty())
            .map(|((g, k), r)| (*g, k.clone(), r.clone()))
            .collect();
        v.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        v
    }

    /// Zero off the dimension constraint and for unstable or negative-genus
    /// signatures.
    pub fn value(&mut self, genus: u32, exponents: &[u32]) -> Rational {
        let n = exponents.len() as i64;
        let g = genus as i64;
        let total: i64 = exponents.iter().map(|&k| k as i64).sum();
        if 2 * g - 2 + n <= 0 || total != 3 * g - 3 + n {
            return Rational::zero();
        }
        let mut key = exponents.to_vec();
        key.sort_unstable_by(|a, b| b.cmp(a));
        if let Some(v) = self.memo.get(&(genus, key.clone())) {
            return v.clone();
        }
        let v = self.recurse(genus, &key);
        self.memo.insert((genus, key), v.clone());
        v
    }

    /// `key` is sorted descending, so `key[0]` is the largest exponent.
    fn recurse(&mut self, g: u32, key: &[u32]) -> Rational {
        if key.iter().all(|&k| k == 0) {
            // Only ⟨τ_0³⟩_0 survives the dimension check.
            return Rational::one();
        }
        if g == 1 && key == [1] {
            return Rational::new(1, 24);
        }
        let k = key[0] - 1;
        let rest = &key[1..];
        let mut acc = Rational::zero();

        for j in 0..rest.len() {
            let mut smaller: Vec<u32> = rest.to_vec();
            let kj = smaller.remove(j);
            smaller.push(k + kj);
            let c = Rational::new(odd_double_factorial(k + kj + 1), odd_double_factorial(kj));
            acc += c * self.value(g, &smaller);
        }

        let half = Rational::new(1, 2);
        for r in 0..k {
            let s = k - 1 - r;
            let c = Rational::from(odd_double_factorial(r + 1) * odd_double_factorial(s + 1)) * &half;
            if g > 0 {
                let mut loop_key = rest.to_vec();
                loop_key.push(r);
                loop_key.push(s);
                acc += &c * self.value(g - 1, &loop_key);
            }
            let m = rest.len();
            for mask in 0u32..(1 << m) {
                let (mut left, mut right) = (vec![r], vec![s]);
                for (i, &x) in rest.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        left.push(x);
                    } else {
                        right.push(x);
                    }
                }
                for g1 in 0..=g {
                    let a = self.value(g1, &left);
                    if a.is_zero() {
                        continue;
                    }
                    acc += &c * a * self.value(g - g1, &right);
                }
            }
        }
        acc / Rational::from(odd_double_factorial(k + 2))
    }
}

thread_local! {
    static TABLE: RefCell<BracketTable> = RefCell::new(BracketTable::new());
}

/// `⟨∏τ_{k_i}⟩_g` by the recursion, memoised per thread.
pub fn dvv_bracket(query: &BracketQuery) -> Rational {
    TABLE.with(|t| t.borrow_mut().get(query))
}

/// Like [`dvv_bracket`] but starting from unvalidated input.
pub fn dvv_value(genus: u32, powers: &[u32]) -> Result<Rational, QueryError> {
    Ok(dvv_bracket(&BracketQuery::new(genus, powers.to_vec())?))
}

/// A failed string or dilaton identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityViolation {
    pub identity: &'static str,
    pub genus: u32,
    pub exponents: Vec<u32>,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl fmt::Display for IdentityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails at genus {} {:?}: {} != {}", self.identity, self.genus, self.exponents, self.lhs, self.rhs)
    }
}

/// Checks the string and dilaton equations on every entry of `table` that
/// has a `τ_0` (resp. `τ_1`) whose removal leaves a stable signature.
pub fn string_dilaton_check(table: &mut BracketTable) -> Result<usize, Vec<IdentityViolation>> {
    let mut bad = Vec::new();
    let mut checked = 0;
    for (g, k, lhs) in table.entries() {
        let n = k.len() as i64;
        let stable_without_one = 2 * g as i64 - 2 + (n - 1) > 0;
        if !stable_without_one {
            continue;
        }
        if let Some(pos) = k.iter().position(|&x| x == 0) {
            let mut rest = k.clone();
            rest.remove(pos);
            let mut rhs = Rational::zero();
            for i in 0..rest.len() {
                if rest[i] > 0 {
                    let mut lowered = rest.clone();
                    lowered[i] -= 1;
                    rhs += table.value(g, &lowered);
                }
            }
            checked += 1;
            if rhs != lhs {
                bad.push(IdentityViolation { identity: "string", genus: g, exponents: k.clone(), lhs: lhs.clone(), rhs });
            }
        }
        if let Some(pos) = k.iter().position(|&x| x == 1) {
            let mut rest = k.clone();
            rest.remove(pos);
            let rhs = Rational::from(2 * g as i64 - 2 + rest.len() as i64) * table.value(g, &rest);
            checked += 1;
            if rhs != lhs {
                bad.push(IdentityViolation { identity: "dilaton", genus: g, exponents: k.clone(), lhs, rhs });
            }
        }
    }
    if bad.is_empty() {
        Ok(checked)
    } else {
        Err(bad)
    }
}
