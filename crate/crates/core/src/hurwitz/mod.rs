//! Counting kernel for the symmetric group.
//!
//! The central quantity is the number of tuples `(σ_1, …, σ_n)` of
//! permutations in prescribed conjugacy classes with `σ_1⋯σ_n = 1`, with or
//! without the requirement that they generate a transitive subgroup. Each
//! count has two independent implementations: an exhaustive dynamic program
//! over `S_d` and a character-theoretic formula. [`HurwitzKernel`] runs
//! whichever are enabled by its caps and refuses to answer if they disagree.

mod characters;
mod classalg;
mod partition;
mod perm;
mod tuples;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use characters::CharacterTable;
pub use classalg::ClassAlgebra;
pub use partition::Partition;
pub use tuples::{brute_all, brute_transitive, frobenius_all, TupleSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HurwitzError {
    #[error("{what} needs degree {degree}, above the configured cap {cap}")]
    CapExceeded { what: &'static str, degree: u32, cap: u32 },
    #[error("invalid partition {0:?}")]
    InvalidPartition(String),
    #[error("class of size {found} in a spec of degree {expected}")]
    SizeMismatch { expected: u32, found: u32 },
    #[error("brute force gives {brute} but the character formula gives {character}")]
    Disagreement { brute: BigUint, character: BigUint },
}

/// Caps on the degree for the exhaustive and the character-based paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelConfig {
    pub brute_cap: u32,
    pub char_cap: u32,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig { brute_cap: 6, char_cap: 8 }
    }
}

/// A count together with the value from each algorithm that ran.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TupleCount {
    pub value: BigUint,
    pub brute: Option<BigUint>,
    pub character: Option<BigUint>,
}

/// Shared, memoising front end to the counting algorithms. Safe to use
/// from several threads.
#[derive(Debug, Default)]
pub struct HurwitzKernel {
    config: KernelConfig,
    tables: Mutex<HashMap<u32, Arc<CharacterTable>>>,
    transitive: Mutex<HashMap<TupleSpec, BigUint>>,
}

/// Permutations are packed four bits per point.
const PERM_LIMIT: u32 = 16;

impl HurwitzKernel {
    pub fn new(config: KernelConfig) -> Self {
        HurwitzKernel { config, ..Default::default() }
    }

    pub fn config(&self) -> KernelConfig {
        self.config
    }

    fn brute_allowed(&self, d: u32) -> bool {
        d <= self.config.brute_cap.min(PERM_LIMIT)
    }

    fn char_allowed(&self, d: u32) -> bool {
        d <= self.config.char_cap
    }

    pub fn character_table(&self, d: u32) -> Result<Arc<CharacterTable>, HurwitzError> {
        if d == 0 || !self.char_allowed(d) {
            return Err(HurwitzError::CapExceeded { what: "character table", degree: d, cap: self.config.char_cap });
        }
        if let Some(t) = self.tables.lock().unwrap().get(&d) {
            return Ok(t.clone());
        }
        let t = Arc::new(CharacterTable::build(d));
        self.tables.lock().unwrap().insert(d, t.clone());
        Ok(t)
    }

    pub fn class_algebra(&self, d: u32) -> Result<ClassAlgebra, HurwitzError> {
        if d == 0 || !self.char_allowed(d) || d > PERM_LIMIT {
            return Err(HurwitzError::CapExceeded { what: "class algebra", degree: d, cap: self.config.char_cap });
        }
        Ok(ClassAlgebra::build(d))
    }

    fn frobenius(&self, spec: &TupleSpec) -> Result<BigUint, HurwitzError> {
        if spec.degree == 0 {
            return Ok(BigUint::from(1u32));
        }
        Ok(frobenius_all(spec, &*self.character_table(spec.degree)?))
    }

    fn reconcile(brute: Option<BigUint>, character: Option<BigUint>, d: u32, cap: u32) -> Result<TupleCount, HurwitzError> {
        let value = match (&brute, &character) {
            (Some(b), Some(c)) if b != c => {
                return Err(HurwitzError::Disagreement { brute: b.clone(), character: c.clone() })
            }
            (Some(v), _) | (None, Some(v)) => v.clone(),
            (None, None) => return Err(HurwitzError::CapExceeded { what: "tuple count", degree: d, cap }),
        };
        Ok(TupleCount { value, brute, character })
    }

    /// `#{σ_i ∈ C_i : ∏σ_i = 1}` by every enabled algorithm.
    pub fn count_all(&self, spec: &TupleSpec) -> Result<TupleCount, HurwitzError> {
        let d = spec.degree;
        let brute = self.brute_allowed(d).then(|| brute_all(spec));
        let character = if self.char_allowed(d) { Some(self.frobenius(spec)?) } else { None };
        Self::reconcile(brute, character, d, self.config.brute_cap.max(self.config.char_cap))
    }

    /// The transitive count by every enabled algorithm.
    pub fn count_transitive(&self, spec: &TupleSpec) -> Result<TupleCount, HurwitzError> {
        let d = spec.degree;
        let brute = self.brute_allowed(d).then(|| brute_transitive(spec));
        let character = if self.char_allowed(d) { Some(self.inclusion_exclusion(spec)?) } else { None };
        Self::reconcile(brute, character, d, self.config.brute_cap.max(self.config.char_cap))
    }

    fn inclusion_exclusion(&self, spec: &TupleSpec) -> Result<BigUint, HurwitzError> {
        let mut memo = std::mem::take(&mut *self.transitive.lock().unwrap());
        let r = tuples::transitive_by_inclusion_exclusion(spec, &mut |s| self.frobenius(s), &mut memo);
        self.transitive.lock().unwrap().extend(memo);
        r
    }

    /// `χ`: the transitive count, memoised on the sorted class list and
    /// cross-checked once per new spec when both algorithms are enabled.
    pub fn transitive(&self, spec: &TupleSpec) -> Result<BigUint, HurwitzError> {
        let key = spec.normalized();
        if let Some(v) = self.transitive.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let count = self.count_transitive(&key)?;
        self.transitive.lock().unwrap().insert(key, count.value.clone());
        Ok(count.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(d: u32, classes: &[&str]) -> TupleSpec {
        TupleSpec::new(d, classes.iter().map(|c| c.parse().unwrap()).collect()).unwrap()
    }

    #[test]
    fn both_paths_run_and_agree() {
        let k = HurwitzKernel::default();
        let c = k.count_transitive(&spec(3, &["3", "2,1", "2,1", "2,1", "2,1", "2,1", "2,1"])).unwrap();
        assert_eq!(c.value, BigUint::from(486u32));
        assert_eq!(c.brute, c.character);
        let c = k.count_all(&spec(4, &["2,1,1"; 6])).unwrap();
        assert!(c.brute.is_some() && c.character.is_some());
    }

    #[test]
    fn caps_are_enforced() {
        let k = HurwitzKernel::new(KernelConfig { brute_cap: 2, char_cap: 3 });
        assert!(k.count_all(&spec(3, &["3", "3", "3"])).unwrap().brute.is_none());
        assert!(matches!(k.character_table(4), Err(HurwitzError::CapExceeded { .. })));
        assert!(k.count_all(&spec(4, &["4", "4"])).is_err());
    }

    #[test]
    fn memo_is_order_independent() {
        let k = HurwitzKernel::default();
        let a = k.transitive(&spec(3, &["3", "2,1", "2,1"])).unwrap();
        let b = k.transitive(&spec(3, &["2,1", "3", "2,1"])).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, BigUint::from(6u32));
    }
}
