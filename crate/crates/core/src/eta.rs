//! The covering label `η` attached to a bracket query.
//!
//! For a genus `g ≥ 1` curve with `n ≥ 1` marked points, split the points
//! into poles `I` and the rest `J`, and give the poles degrees `d(i)`
//! summing to `g + 1`. A generic such curve has a unique map to `P¹` with
//! polar divisor `Σ d(i)·i`, simply branched over `k = #I + 3g - 1` further
//! points. `η` records the profile of that map: a single genus-`g` source
//! vertex of degree `g + 1` over a single genus-0 target vertex.
//!
//! Target tails are labelled `∞ = 0`, then `J` in increasing order, then the
//! branch points `1..=k`. Source tails are labelled poles first, then
//! `J × [g+1]` row by row, then `[g] × [k]` row by row.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{CoveringGraph, TwistedGraph};
use crate::rational::{factorial, Rational};
use crate::semigroup::Trivial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EtaError {
    #[error("genus 0 has no covering label; use the closed genus-0 formula")]
    GenusZero,
    #[error("at least one marked point is needed")]
    NoPoints,
    #[error("invalid pole choice: {0}")]
    InvalidChoice(String),
}

/// A marked point used as a pole, with its order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pole {
    /// 1-based marked point.
    pub point: u32,
    pub degree: u32,
}

/// The pole set with its degrees.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EtaChoice {
    pub poles: Vec<Pole>,
}

impl EtaChoice {
    /// A single pole at point 1 of order `g + 1`.
    pub fn default_for(genus: u32) -> Self {
        EtaChoice { poles: vec![Pole { point: 1, degree: genus + 1 }] }
    }

    /// Parses `point:degree` pairs separated by commas, e.g. `"1:1,2:1"`.
    pub fn parse(s: &str) -> Result<Self, EtaError> {
        let bad = || EtaError::InvalidChoice(format!("cannot parse {s:?}"));
        let poles = s
            .split(',')
            .map(|item| {
                let (p, d) = item.trim().split_once(':').ok_or_else(bad)?;
                Ok(Pole {
                    point: p.trim().parse().map_err(|_| bad())?,
                    degree: d.trim().parse().map_err(|_| bad())?,
                })
            })
            .collect::<Result<Vec<_>, EtaError>>()?;
        Ok(EtaChoice { poles })
    }

    pub fn validate(&self, genus: u32, points: u32) -> Result<(), EtaError> {
        if self.poles.is_empty() {
            return Err(EtaError::InvalidChoice("the pole set is empty".into()));
        }
        let mut seen = Vec::new();
        for p in &self.poles {
            if p.point == 0 || p.point > points {
                return Err(EtaError::InvalidChoice(format!("point {} is not in 1..={points}", p.point)));
            }
            if p.degree == 0 {
                return Err(EtaError::InvalidChoice(format!("pole at {} has degree 0", p.point)));
            }
            if seen.contains(&p.point) {
                return Err(EtaError::InvalidChoice(format!("point {} listed twice", p.point)));
            }
            seen.push(p.point);
        }
        let total: u32 = self.poles.iter().map(|p| p.degree).sum();
        if total != genus + 1 {
            return Err(EtaError::InvalidChoice(format!("pole degrees sum to {total}, not {}", genus + 1)));
        }
        Ok(())
    }

    /// Every valid choice for `(genus, points)`: each non-empty pole set
    /// with each assignment of positive degrees summing to `genus + 1`.
    pub fn all(genus: u32, points: u32) -> Vec<EtaChoice> {
        let mut out = Vec::new();
        for mask in 1u32..(1 << points) {
            let set: Vec<u32> = (0..points).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect();
            for degrees in compositions(genus + 1, set.len()) {
                let poles = set.iter().zip(degrees).map(|(&point, degree)| Pole { point, degree }).collect();
                out.push(EtaChoice { poles });
            }
        }
        out
    }

    fn sorted(&self) -> Vec<Pole> {
        let mut p = self.poles.clone();
        p.sort();
        p
    }
}

impl fmt::Display for EtaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.sorted().iter().map(|p| format!("{}:{}", p.point, p.degree)).collect();
        write!(f, "{}", items.join(","))
    }
}

/// Ordered ways of writing `total` as `parts` positive integers.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum TargetTailKind {
    Infinity,
    /// A non-pole marked point (1-based).
    Point(u32),
    /// A simple branch point, `1..=k`.
    Branch(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SourceTailKind {
    Pole { point: u32 },
    /// `(j, sheet)` in `J × [g+1]`.
    Sheet { point: u32, sheet: u32 },
    /// `(row, branch)` in `[g] × [k]`.
    Branch { row: u32, branch: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SourceTail {
    pub kind: SourceTailKind,
    /// Target tail label underneath.
    pub over: u32,
    pub mult: u32,
    pub degree: u32,
    /// The marked point this tail is identified with, if it is retained.
    pub retained: Option<u32>,
}

/// A retained source tail and the marked point it stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RetainedTail {
    pub point: u32,
    pub source_label: u32,
}

/// `η` with its bookkeeping. Tail labels index `target_tails` and
/// `source_tails` respectively.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaLabel {
    pub genus: u32,
    pub points: u32,
    pub choice: EtaChoice,
    pub k: u32,
    pub covering: CoveringGraph,
    pub target_tails: Vec<TargetTailKind>,
    pub target_mults: Vec<u32>,
    pub source_tails: Vec<SourceTail>,
    /// Sorted by point.
    pub retained: Vec<RetainedTail>,
    /// Labels of the forgotten source tails, sorted.
    pub forget: Vec<u32>,
}

impl EtaLabel {
    pub fn degree(&self) -> u32 {
        self.genus + 1
    }

    /// `m(∞)`, the lcm of the pole degrees.
    pub fn infinity_mult(&self) -> u32 {
        self.target_mults[0]
    }

    pub fn num_non_poles(&self) -> u32 {
        self.points - self.choice.poles.len() as u32
    }

    /// Source tails lying over target tail `t`.
    pub fn source_tails_over(&self, t: u32) -> Vec<u32> {
        (0..self.source_tails.len() as u32).filter(|&s| self.source_tails[s as usize].over == t).collect()
    }

    /// `dim = k + #J - 2`, which equals `3g - 3 + n`.
    pub fn dimension(&self) -> u32 {
        self.k + self.num_non_poles() - 2
    }
}

/// Builds `η` for a genus-`genus` curve with `points` marked points.
pub fn build_eta(genus: u32, points: u32, choice: Option<&EtaChoice>) -> Result<EtaLabel, EtaError> {
    if genus == 0 {
        return Err(EtaError::GenusZero);
    }
    if points == 0 {
        return Err(EtaError::NoPoints);
    }
    let choice = choice.cloned().unwrap_or_else(|| EtaChoice::default_for(genus));
    choice.validate(genus, points)?;
    let poles = choice.sorted();
    let non_poles: Vec<u32> = (1..=points).filter(|p| !poles.iter().any(|q| q.point == *p)).collect();
    let k = poles.len() as u32 + 3 * genus - 1;
    let m_inf = poles.iter().fold(1u32, |acc, p| acc.lcm(&p.degree));

    let mut target_tails = vec![TargetTailKind::Infinity];
    let mut target_mults = vec![m_inf];
    for &j in &non_poles {
        target_tails.push(TargetTailKind::Point(j));
        target_mults.push(1);
    }
    let branch_base = target_tails.len() as u32;
    for r in 1..=k {
        target_tails.push(TargetTailKind::Branch(r));
        target_mults.push(2);
    }

    let mut source_tails = Vec::new();
    for p in &poles {
        source_tails.push(SourceTail {
            kind: SourceTailKind::Pole { point: p.point },
            over: 0,
            mult: m_inf / p.degree,
            degree: p.degree,
            retained: Some(p.point),
        });
    }
    for (ji, &j) in non_poles.iter().enumerate() {
        for sheet in 1..=genus + 1 {
            source_tails.push(SourceTail {
                kind: SourceTailKind::Sheet { point: j, sheet },
                over: 1 + ji as u32,
                mult: 1,
                degree: 1,
                retained: (sheet == genus + 1).then_some(j),
            });
        }
    }
    for row in 1..=genus {
        for r in 1..=k {
            let (mult, degree) = if row == 1 { (1, 2) } else { (2, 1) };
            source_tails.push(SourceTail {
                kind: SourceTailKind::Branch { row, branch: r },
                over: branch_base + r - 1,
                mult,
                degree,
                retained: None,
            });
        }
    }

    let mut target = TwistedGraph::new();
    let tv = target.add_vertex(0, Trivial);
    for (label, &m) in target_mults.iter().enumerate() {
        target.add_tail(tv, label as u32, m);
    }
    let mut source = TwistedGraph::new();
    let sv = source.add_vertex(genus, Trivial);
    let mut half_edge_map = Vec::new();
    for (label, t) in source_tails.iter().enumerate() {
        source.add_tail(sv, label as u32, t.mult);
        half_edge_map.push(t.over as usize);
    }
    let covering = CoveringGraph {
        target,
        source,
        vertex_map: vec![0],
        half_edge_map,
        vertex_degree: vec![genus + 1],
    };

    let mut retained: Vec<RetainedTail> = source_tails
        .iter()
        .enumerate()
        .filter_map(|(l, t)| t.retained.map(|point| RetainedTail { point, source_label: l as u32 }))
        .collect();
    retained.sort_by_key(|r| r.point);
    let forget = (0..source_tails.len() as u32).filter(|&l| source_tails[l as usize].retained.is_none()).collect();

    Ok(EtaLabel {
        genus,
        points,
        choice,
        k,
        covering,
        target_tails,
        target_mults,
        source_tails,
        retained,
        forget,
    })
}

/// Degree of the forgetful map from the `η` moduli onto the genus-`g`
/// moduli: `k! (g!)^{#J} ((g-1)!)^k / (2^k m(∞))`.
pub fn eta_degree(eta: &EtaLabel) -> Rational {
    let g = eta.genus;
    let num = factorial(eta.k)
        * num_traits::pow(factorial(g), eta.num_non_poles() as usize)
        * num_traits::pow(factorial(g - 1), eta.k as usize);
    Rational::new(num, Rational::from(2).pow(eta.k as i32).to_integer().unwrap() * eta.infinity_mult())
}
