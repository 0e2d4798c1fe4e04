//! Evaluating brackets by summing over covering contractions.
//!
//! Each term `f: ρ → η` contributes
//! `∏k_i! / (n_η ‖f‖) · [z^k] ∫ e^{Σ w_t ψ_t} ∏_e (−Σ_j w_e^j ψ_e^{j−1} / j!)`,
//! where the integral over the stratum of `ρ` splits into one covering
//! integral per target vertex.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eta::{build_eta, eta_degree, EtaChoice, EtaError, EtaLabel};
use crate::graph::{local_automorphisms, CoveringDatum};
use crate::hurwitz::{HurwitzError, HurwitzKernel, KernelConfig};
use crate::query::{BracketQuery, QueryError};
use crate::rational::{factorial, Rational};
use crate::series::{PsiSeries, SeriesShape};
use crate::strata::{contributing_terms, ContractionTerm, StrataConfig, StrataError};

#[derive(Debug, Error)]
pub enum IntegratorError {
    #[error("genus-0 integral needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("target vertex with {points} special points is unstable")]
    UnstableVertex { points: usize },
    #[error("target vertex of genus {0}; only rational target vertices occur")]
    TargetGenus(u32),
    #[error("{found} exponents for {expected} points")]
    ExponentCount { expected: usize, found: usize },
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Eta(#[from] EtaError),
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error(transparent)]
    Hurwitz(#[from] HurwitzError),
}

/// `∫_{M̄_{0,n}} ∏ψ_i^{k_i}`.
pub fn genus0_integral(exponents: &[u32]) -> Result<Rational, IntegratorError> {
    let n = exponents.len();
    if n < 3 {
        return Err(IntegratorError::TooFewPoints(n));
    }
    let total: u32 = exponents.iter().sum();
    if total as usize != n - 3 {
        return Ok(Rational::zero());
    }
    let denom: Rational = exponents.iter().map(|&k| Rational::from(factorial(k))).product();
    Ok(Rational::from(factorial(total)) / denom)
}

/// Integral of `∏ψ_i^{k_i}` (target `ψ` classes, one exponent per target
/// point of `datum`) over the space of coverings described by `datum`.
///
/// The space maps to the rational target with degree
/// `Aut_loc · ∏_i m(i)^{-1} · ∏_sheets χ_s / d_s!`, and each `ψ_i` pulls
/// back from the target divided by `m(i)`.
pub fn covering_vertex_integral(
    kernel: &HurwitzKernel,
    datum: &CoveringDatum,
    exponents: &[u32],
) -> Result<Rational, IntegratorError> {
    let n = datum.num_points();
    if exponents.len() != n {
        return Err(IntegratorError::ExponentCount { expected: n, found: exponents.len() });
    }
    if datum.target.genus != 0 {
        return Err(IntegratorError::TargetGenus(datum.target.genus));
    }
    if n < 3 {
        return Err(IntegratorError::UnstableVertex { points: n });
    }
    let base = genus0_integral(exponents)?;
    if base.is_zero() {
        return Ok(base);
    }
    let mut value = base * Rational::from(local_automorphisms(datum));
    for (i, &k) in exponents.iter().enumerate() {
        value = value / Rational::from(datum.target.tail_mults[i]).pow(k as i32 + 1);
    }
    for s in 0..datum.sheets.len() {
        let chi = kernel.transitive(&sheet_spec(datum, s))?;
        if chi == BigUint::from(0u32) {
            return Ok(Rational::zero());
        }
        value = value * Rational::from(chi) / Rational::from(factorial(datum.sheets[s].degree));
    }
    Ok(value)
}

fn sheet_spec(datum: &CoveringDatum, s: usize) -> crate::hurwitz::TupleSpec {
    use crate::hurwitz::{Partition, TupleSpec};
    let classes = (0..datum.num_points())
        .map(|i| Partition::new(datum.local_partition(s, i)).expect("positive local degrees"))
        .collect();
    TupleSpec::new(datum.sheets[s].degree, classes).expect("local degrees sum to the sheet degree")
}

/// The integrand `e^{Σ w_t ψ_t} ∏_e (−Σ_{j≥1} w_e^j ψ_e^{j−1}/j!)` of a
/// term, with `ψ_e = ψ_h + ψ_h'` over the two germs of `e`. Variables are
/// target half-edges; the series is truncated at `z^powers` and at each
/// vertex dimension.
pub fn term_integrand(term: &ContractionTerm, powers: &[u32]) -> PsiSeries {
    let target = &term.rho.target;
    let shape = term_shape(term, powers);
    let mut exponent = PsiSeries::zero(shape.clone());
    for tw in &term.tail_weights {
        let w = PsiSeries::z_linear(shape.clone(), tw.weight.coeffs());
        exponent = exponent.add(&w.mul(&PsiSeries::psi(shape.clone(), tw.half_edge)));
    }
    let mut integrand = exponent.exp();

    let max_j: u32 = powers.iter().sum();
    for ew in &term.edge_weights {
        let a = ew.edge;
        let b = target.half_edges[a].partner;
        let psi_e = PsiSeries::psi(shape.clone(), a).add(&PsiSeries::psi(shape.clone(), b));
        let w = PsiSeries::z_linear(shape.clone(), ew.weight.coeffs());
        let mut factor = PsiSeries::zero(shape.clone());
        let mut w_pow = PsiSeries::one(shape.clone());
        let mut psi_pow = PsiSeries::one(shape.clone());
        for j in 1..=max_j {
            w_pow = w_pow.mul(&w);
            if w_pow.is_zero() {
                break;
            }
            let c = Rational::new(-1, factorial(j));
            factor = factor.add(&w_pow.mul(&psi_pow).scale(&c));
            psi_pow = psi_pow.mul(&psi_e);
        }
        integrand = integrand.mul(&factor);
        if integrand.is_zero() {
            break;
        }
    }
    integrand
}

/// `∫_{M̄_ρ} ∏_h ψ_h^{e_h}` for one `ψ` exponent per target half-edge:
/// the product of the covering integrals at the target vertices.
pub fn monomial_integral(
    kernel: &HurwitzKernel,
    term: &ContractionTerm,
    psi_exponents: &[u8],
) -> Result<Rational, IntegratorError> {
    let mut value = Rational::one();
    for vd in &term.vertices {
        let exps: Vec<u32> =
            term.rho.target.half_edges_at(vd.vertex).iter().map(|&h| psi_exponents[h] as u32).collect();
        value *= covering_vertex_integral(kernel, &vd.datum, &exps)?;
        if value.is_zero() {
            break;
        }
    }
    Ok(value)
}

/// Integrates `integrand` (germ variables of `term`'s target) over the
/// stratum, coefficientwise in `z`: the result maps each `z` exponent
/// vector to its integral, omitting zeros.
pub fn stratum_integral(
    kernel: &HurwitzKernel,
    term: &ContractionTerm,
    integrand: &PsiSeries,
) -> Result<BTreeMap<Vec<u32>, Rational>, IntegratorError> {
    let nz = integrand.shape().z_caps.len();
    let mut out: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
    for (m, c) in integrand.terms() {
        let v = monomial_integral(kernel, term, &m[nz..])?;
        if v.is_zero() {
            continue;
        }
        let z: Vec<u32> = m[..nz].iter().map(|&e| e as u32).collect();
        *out.entry(z).or_insert_with(Rational::zero) += c * &v;
    }
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// A [`SeriesShape`] over the germs of `term`'s target, with `z` caps
/// `powers` and each vertex capped at its dimension.
pub fn term_shape(term: &ContractionTerm, powers: &[u32]) -> Arc<SeriesShape> {
    let target = &term.rho.target;
    let psi_groups: Vec<usize> = target.half_edges.iter().map(|h| h.vertex).collect();
    let group_caps: Vec<u32> = (0..target.num_vertices())
        .map(|v| target.valence(v).saturating_sub(3) as u32)
        .collect();
    Arc::new(SeriesShape { z_caps: powers.to_vec(), psi_groups, group_caps })
}

/// Audit record of one summand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermAudit {
    pub key: String,
    pub edges: usize,
    pub aut_count: u64,
    /// `1 / (n_η ‖f‖)`.
    pub prefactor: Rational,
    /// Transitive counts per target vertex, one per sheet.
    pub chi: Vec<Vec<BigUint>>,
    pub contribution: Rational,
}

/// A bracket value together with everything that went into it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketValue {
    pub genus: u32,
    pub powers: Vec<u32>,
    pub value: Rational,
    /// `n_η`, absent in genus 0.
    pub eta_degree: Option<Rational>,
    pub terms: Vec<TermAudit>,
}

type TermKey = (u32, u32, EtaChoice, usize);

/// Bracket evaluator: a counting kernel plus enumeration settings.
///
/// The enumerated terms depend on the genus, the number of points and the
/// covering label but not on the exponents, so they are cached per label.
#[derive(Debug, Default)]
pub struct Integrator {
    kernel: HurwitzKernel,
    strata: StrataConfig,
    terms: Mutex<HashMap<TermKey, Arc<Vec<ContractionTerm>>>>,
}

impl Integrator {
    pub fn new(kernel: KernelConfig, strata: StrataConfig) -> Self {
        Integrator { kernel: HurwitzKernel::new(kernel), strata, terms: Mutex::default() }
    }

    /// The terms of the sum for `query` under `eta`, enumerated once per label.
    pub fn terms(
        &self,
        eta: &EtaLabel,
        query: &BracketQuery,
    ) -> Result<Arc<Vec<ContractionTerm>>, IntegratorError> {
        let max_edges = self.strata.max_edges.unwrap_or(query.degree() as usize);
        let key = (eta.genus, eta.points, eta.choice.clone(), max_edges);
        if let Some(t) = self.terms.lock().unwrap().get(&key) {
            return Ok(t.clone());
        }
        let config = StrataConfig { max_edges: Some(max_edges), ..self.strata };
        let terms = Arc::new(contributing_terms(eta, query, &config)?);
        Ok(self.terms.lock().unwrap().entry(key).or_insert(terms).clone())
    }

    pub fn kernel(&self) -> &HurwitzKernel {
        &self.kernel
    }

    pub fn strata_config(&self) -> &StrataConfig {
        &self.strata
    }

    /// `⟨∏τ_{k_i}⟩_g` using the covering label `choice` (the default one
    /// when `None`).
    pub fn bracket(
        &self,
        query: &BracketQuery,
        choice: Option<&EtaChoice>,
    ) -> Result<BracketValue, IntegratorError> {
        let powers = query.powers().to_vec();
        if query.genus() == 0 {
            return Ok(BracketValue {
                genus: 0,
                powers: powers.clone(),
                value: genus0_integral(&powers)?,
                eta_degree: None,
                terms: Vec::new(),
            });
        }
        let eta = build_eta(query.genus(), query.points(), choice)?;
        let n_eta = eta_degree(&eta);
        let terms = self.terms(&eta, query)?;
        let audits: Vec<TermAudit> = terms
            .par_iter()
            .map(|t| self.evaluate_term(&eta, &n_eta, t, &powers))
            .collect::<Result<_, _>>()?;
        let value = audits.iter().map(|a| &a.contribution).sum();
        Ok(BracketValue { genus: query.genus(), powers, value, eta_degree: Some(n_eta), terms: audits })
    }

    /// The contribution of a single term.
    pub fn evaluate_term(
        &self,
        _eta: &EtaLabel,
        n_eta: &Rational,
        term: &ContractionTerm,
        powers: &[u32],
    ) -> Result<TermAudit, IntegratorError> {
        let chi = term
            .vertices
            .iter()
            .map(|vd| vd.chi_inputs.iter().map(|s| self.kernel.transitive(s)).collect())
            .collect::<Result<Vec<Vec<BigUint>>, _>>()?;
        let integrand = term_integrand(term, powers);
        let mut integral = Rational::zero();
        let mut memo: HashMap<Vec<u8>, Rational> = HashMap::new();
        for (psi, c) in integrand.coefficient_of_z(powers) {
            let v = match memo.get(&psi) {
                Some(v) => v.clone(),
                None => {
                    let v = monomial_integral(&self.kernel, term, &psi)?;
                    memo.insert(psi, v.clone());
                    v
                }
            };
            integral += c * v;
        }
        let k_fact: Rational = powers.iter().map(|&k| Rational::from(factorial(k))).product();
        let prefactor = (n_eta.clone() * term.norm.clone()).recip();
        let contribution = integral * k_fact * prefactor.clone();
        Ok(TermAudit {
            key: term.key.clone(),
            edges: term.num_edges(),
            aut_count: term.aut_count,
            prefactor,
            chi,
            contribution,
        })
    }
}

/// `⟨∏τ_{k_i}⟩_g` with default settings.
pub fn bracket(query: &BracketQuery) -> Result<Rational, IntegratorError> {
    Ok(Integrator::default().bracket(query, None)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{LocalPoint, Sheet, TwistedVertex};
    use crate::semigroup::Trivial;

    #[test]
    fn genus0_values() {
        assert_eq!(genus0_integral(&[0, 0, 0]).unwrap(), Rational::one());
        assert_eq!(genus0_integral(&[1, 1, 0, 0, 0]).unwrap(), Rational::from(2));
        assert_eq!(genus0_integral(&[2, 0, 0, 0, 0]).unwrap(), Rational::one());
        assert!(!genus0_integral(&[1, 0, 0, 0]).unwrap().is_zero());
        assert!(genus0_integral(&[1, 1, 0, 0]).unwrap().is_zero());
        assert!(matches!(genus0_integral(&[0, 0]), Err(IntegratorError::TooFewPoints(2))));
    }

    #[test]
    fn trivial_covering_matches_genus0() {
        let k = HurwitzKernel::default();
        let target = TwistedVertex::new(0, vec![1; 5], Trivial);
        let datum = CoveringDatum {
            target,
            sheets: vec![Sheet {
                genus: 0,
                mark: Trivial,
                degree: 1,
                points: (0..5).map(|i| LocalPoint { over: i, mult: 1 }).collect(),
            }],
        };
        for e in [[2, 0, 0, 0, 0], [1, 1, 0, 0, 0], [0, 0, 0, 1, 1]] {
            assert_eq!(covering_vertex_integral(&k, &datum, &e).unwrap(), genus0_integral(&e).unwrap());
        }
    }

    #[test]
    fn unstable_vertex_is_an_error() {
        let k = HurwitzKernel::default();
        let datum = CoveringDatum {
            target: TwistedVertex::new(0, vec![1, 1], Trivial),
            sheets: vec![],
        };
        assert!(matches!(
            covering_vertex_integral(&k, &datum, &[0, 0]),
            Err(IntegratorError::UnstableVertex { points: 2 })
        ));
    }

    #[test]
    fn genus_one_point() {
        let q = BracketQuery::new(1, vec![1]).unwrap();
        assert_eq!(bracket(&q).unwrap(), Rational::new(1, 24));
    }
}
