use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("exponents sum to {found}, but 3g - 3 + n = {expected}")]
    Dimension { expected: i64, found: u32 },
    #[error("genus {0} needs at least one marked point")]
    NoPoints(u32),
    #[error("genus 0 needs at least three marked points")]
    Unstable,
    #[error("cannot parse powers {0:?}: expected comma-separated non-negative integers")]
    Parse(String),
}

/// `⟨τ_{k_1} ⋯ τ_{k_n}⟩_g`, with the dimension constraint checked on
/// construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BracketQuery {
    genus: u32,
    powers: Vec<u32>,
}

impl BracketQuery {
    pub fn new(genus: u32, powers: Vec<u32>) -> Result<Self, QueryError> {
        let n = powers.len() as i64;
        if genus == 0 && n < 3 {
            return Err(QueryError::Unstable);
        }
        if genus > 0 && n == 0 {
            return Err(QueryError::NoPoints(genus));
        }
        let expected = 3 * genus as i64 - 3 + n;
        let found: u32 = powers.iter().sum();
        if found as i64 != expected {
            return Err(QueryError::Dimension { expected, found });
        }
        Ok(BracketQuery { genus, powers })
    }

    /// Parses a comma-separated exponent list such as `"1,0,2"`.
    pub fn parse_powers(s: &str) -> Result<Vec<u32>, QueryError> {
        s.split(',')
            .map(|x| x.trim().parse::<u32>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| QueryError::Parse(s.to_string()))
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn powers(&self) -> &[u32] {
        &self.powers
    }

    pub fn points(&self) -> u32 {
        self.powers.len() as u32
    }

    /// `Σ k_i = 3g - 3 + n`.
    pub fn degree(&self) -> u32 {
        self.powers.iter().sum()
    }

    /// Every dimension-valid exponent vector for `(genus, points)`, in
    /// lexicographic order.
    pub fn all(genus: u32, points: u32) -> Vec<BracketQuery> {
        let total = 3 * genus as i64 - 3 + points as i64;
        if total < 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        let mut cur = Vec::new();
        fn rec(left: u32, slots: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if slots == 0 {
                if left == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            for k in 0..=left {
                cur.push(k);
                rec(left - k, slots - 1, cur, out);
                cur.pop();
            }
        }
        let mut vectors = Vec::new();
        rec(total as u32, points, &mut cur, &mut vectors);
        for v in vectors {
            if let Ok(q) = BracketQuery::new(genus, v) {
                out.push(q);
            }
        }
        out
    }
}

impl fmt::Display for BracketQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, k) in self.powers.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "tau_{k}")?;
        }
        write!(f, ">_{}", self.genus)
    }
}
