//! Enumeration of the covering contractions `f: ρ → η` that index the
//! boundary sum, with their weights and symmetry factors.
//!
//! The target `t(ρ)` of any such map is a stable genus-0 tree whose leaves
//! are the target tails of `η`. The enumeration runs in four stages:
//!
//! 1. trees, as compatible families of splits of the tail set;
//! 2. for each tree vertex, every local covering of degree `g + 1` carrying
//!    the prescribed source tails, with source genera from Riemann-Hurwitz;
//! 3. choices of local coverings that agree on the germ degrees across each
//!    tree edge, glued in every way up to the symmetry of equal germs;
//! 4. filters: connected source of genus `g`, nonzero edge weights, and
//!    deduplication by canonical key.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eta::{EtaError, EtaLabel};
use crate::graph::{
    covering_canonical_form_and_automorphisms, induced_covering_contraction, CoveringContraction,
    CoveringDatum, CoveringGraph, TwistedGraph,
};
use crate::hurwitz::{Partition, TupleSpec};
use crate::query::BracketQuery;
use crate::rational::Rational;
use crate::semigroup::Trivial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrataError {
    #[error("the query has {found} points but the covering label has {expected}")]
    PointCount { expected: u32, found: u32 },
    #[error("the query has genus {found} but the covering label has genus {expected}")]
    Genus { expected: u32, found: u32 },
    #[error(transparent)]
    Eta(#[from] EtaError),
}

/// A linear form `Σ c_i z_i` in the marked-point variables; `coeffs[i]`
/// multiplies `z_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightForm(pub Vec<u32>);

impl WeightForm {
    pub fn zero(points: usize) -> Self {
        WeightForm(vec![0; points])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.0
    }

    fn add_term(&mut self, point: u32, coeff: u32) {
        self.0[point as usize - 1] += coeff;
    }
}

impl fmt::Display for WeightForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| if c == 1 { format!("z{}", i + 1) } else { format!("{c}*z{}", i + 1) })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrataConfig {
    /// Drop terms with a vanishing edge weight; their integrand is zero.
    pub prune: bool,
    /// Largest number of target edges; defaults to `Σ k_i`, beyond which
    /// every term has too high a z-degree.
    pub max_edges: Option<usize>,
}

impl Default for StrataConfig {
    fn default() -> Self {
        StrataConfig { prune: true, max_edges: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailWeight {
    pub label: u32,
    pub half_edge: usize,
    pub weight: WeightForm,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeWeight {
    /// Lower half-edge of the target edge.
    pub edge: usize,
    pub weight: WeightForm,
}

/// The local covering over one target vertex and the tuple counts that
/// enter its integral, one spec per sheet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexDecomposition {
    pub vertex: usize,
    pub datum: CoveringDatum,
    pub chi_inputs: Vec<TupleSpec>,
}

/// One summand `f: ρ → η`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContractionTerm {
    pub key: String,
    pub rho: CoveringGraph,
    /// Automorphisms of `ρ` fixing every tail.
    pub aut_count: u64,
    /// `‖f‖ = aut_count / ∏ m(e)²`.
    pub norm: Rational,
    pub tail_weights: Vec<TailWeight>,
    pub edge_weights: Vec<EdgeWeight>,
    pub vertices: Vec<VertexDecomposition>,
}

impl ContractionTerm {
    /// The morphism `ρ → η` contracting every target edge.
    pub fn morphism(&self) -> CoveringContraction {
        let edges: Vec<usize> = self.rho.target.edges().into_iter().map(|(a, _)| a).collect();
        induced_covering_contraction(&self.rho, &edges)
    }

    pub fn num_edges(&self) -> usize {
        self.rho.target.num_edges()
    }
}

/// `S(e', t, A)`: whether, after contracting every source edge but `e'`,
/// the vertex holding the source tail `tail` has genus 0 and carries only
/// `tail`, one germ of `e'` and tails in `forget`.
pub fn s_indicator(
    rho: &CoveringGraph,
    source_edge: usize,
    tail: usize,
    forget: &dyn Fn(u32) -> bool,
) -> bool {
    let s = &rho.source;
    let e = s.edge_of(source_edge);
    let partner = s.half_edges[e].partner;
    let side = component_without_edge(s, e, s.half_edges[tail].vertex);
    if side.contains(&s.half_edges[e].vertex) && side.contains(&s.half_edges[partner].vertex) {
        return false;
    }
    let mut genus = 0i64;
    let mut inner_edges = 0i64;
    for &v in &side {
        genus += s.vertices[v].genus as i64;
        if s.vertices[v].mark != Trivial {
            return false;
        }
    }
    for (a, b) in s.edges() {
        if a != e && side.contains(&s.half_edges[a].vertex) && side.contains(&s.half_edges[b].vertex) {
            inner_edges += 1;
        }
    }
    if genus + inner_edges - side.len() as i64 + 1 != 0 {
        return false;
    }
    s.half_edges.iter().enumerate().all(|(h, he)| {
        if !side.contains(&he.vertex) || !he.is_tail() || h == tail {
            return true;
        }
        forget(he.tail.expect("tails carry labels"))
    })
}

/// Vertices reachable from `start` without crossing edge `e`.
fn component_without_edge(g: &TwistedGraph, e: usize, start: usize) -> BTreeSet<usize> {
    let p = g.half_edges[e].partner;
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for h in g.half_edges_at(v) {
            let he = &g.half_edges[h];
            if he.is_tail() || h == e || h == p {
                continue;
            }
            let w = g.half_edges[he.partner].vertex;
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen
}

/// `w_e = Σ_{e' over e} Σ_t m(e') S(e', t, A) z_t`.
pub fn edge_weight(rho: &CoveringGraph, eta: &EtaLabel, target_edge: usize) -> WeightForm {
    let mut w = WeightForm::zero(eta.points as usize);
    let forget = |l: u32| eta.source_tails[l as usize].retained.is_none();
    let retained: Vec<(usize, u32)> = rho
        .source
        .tails()
        .into_iter()
        .filter_map(|h| {
            let label = rho.source.half_edges[h].tail?;
            eta.source_tails[label as usize].retained.map(|p| (h, p))
        })
        .collect();
    for e in rho.source_edges_over(target_edge) {
        let m = rho.source.half_edges[e].mult;
        for &(h, point) in &retained {
            if s_indicator(rho, e, h, &forget) {
                w.add_term(point, m);
            }
        }
    }
    w
}

/// `w_t = Σ m(t') z_{t'}` over retained source tails above target tail `t`.
pub fn tail_weight(rho: &CoveringGraph, eta: &EtaLabel, target_tail: usize) -> WeightForm {
    let mut w = WeightForm::zero(eta.points as usize);
    for h in rho.preimages(target_tail) {
        let he = &rho.source.half_edges[h];
        if let Some(label) = he.tail {
            if let Some(point) = eta.source_tails[label as usize].retained {
                w.add_term(point, he.mult);
            }
        }
    }
    w
}

/// Every isomorphism class of `f: ρ → η` whose term can be nonzero for
/// `query`, sorted by canonical key.
pub fn contributing_terms(
    eta: &EtaLabel,
    query: &BracketQuery,
    config: &StrataConfig,
) -> Result<Vec<ContractionTerm>, StrataError> {
    if query.points() != eta.points {
        return Err(StrataError::PointCount { expected: eta.points, found: query.points() });
    }
    if query.genus() != eta.genus {
        return Err(StrataError::Genus { expected: eta.genus, found: query.genus() });
    }
    let max_edges = config.max_edges.unwrap_or(query.degree() as usize);
    let trees = enumerate_trees(eta.target_tails.len(), max_edges);
    let cache = LocalCache::default();
    let n = eta.target_tails.len();
    let mut terms: Vec<ContractionTerm> = trees
        .par_iter()
        .flat_map_iter(|splits| terms_over_tree(eta, &TreeShape::from_splits(n, splits), config, &cache))
        .collect();
    terms.sort_by(|a, b| a.key.cmp(&b.key));
    Ok(terms)
}

// ---------------------------------------------------------------------------
// Stage 1: target trees.

/// Compatible split families on tails `0..n`. A split is the bitmask of
/// the side away from tail 0; both sides have at least two tails.
fn enumerate_trees(n: usize, max_edges: usize) -> Vec<Vec<u32>> {
    let full: u32 = ((1u64 << n) - 1) as u32 & !1;
    let splits: Vec<u32> = (1..=full)
        .filter(|&s| s & 1 == 0 && s & !full == 0)
        .filter(|s| s.count_ones() >= 2 && (n as u32 - s.count_ones()) >= 2)
        .collect();
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, splits: &[u32], max: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        out.push(cur.clone());
        if cur.len() == max {
            return;
        }
        for i in start..splits.len() {
            let s = splits[i];
            if cur.iter().all(|&c| c & s == 0 || c & s == c || c & s == s) {
                cur.push(s);
                rec(i + 1, splits, max, cur, out);
                cur.pop();
            }
        }
    }
    rec(0, &splits, max_edges, &mut cur, &mut out);
    out
}

/// A rooted target tree. Vertex 0 holds tail 0; vertex `i > 0` hangs off
/// its parent by edge `i - 1`. Parents precede children.
#[derive(Debug, Clone)]
struct TreeShape {
    parent: Vec<Option<usize>>,
    tails: Vec<Vec<u32>>,
    /// Edges at each vertex: the parent edge first, then child edges.
    germs: Vec<Vec<usize>>,
}

impl TreeShape {
    fn from_splits(n: usize, splits: &[u32]) -> Self {
        let mut order: Vec<u32> = splits.to_vec();
        order.sort_by(|a, b| b.count_ones().cmp(&a.count_ones()).then(a.cmp(b)));
        let nv = order.len() + 1;
        let smallest_containing = |mask: u32| -> usize {
            order
                .iter()
                .enumerate()
                .filter(|(_, &s)| s & mask == mask)
                .min_by_key(|(_, s)| s.count_ones())
                .map_or(0, |(i, _)| i + 1)
        };
        let mut parent = vec![None; nv];
        for (i, &s) in order.iter().enumerate() {
            let p = order
                .iter()
                .enumerate()
                .filter(|(j, &t)| *j != i && t & s == s && t != s)
                .min_by_key(|(_, t)| t.count_ones())
                .map_or(0, |(j, _)| j + 1);
            parent[i + 1] = Some(p);
        }
        let mut tails = vec![Vec::new(); nv];
        tails[0].push(0);
        for t in 1..n as u32 {
            tails[smallest_containing(1 << t)].push(t);
        }
        let mut germs = vec![Vec::new(); nv];
        for v in 1..nv {
            germs[v].push(v - 1);
        }
        for v in 1..nv {
            germs[parent[v].unwrap()].push(v - 1);
        }
        TreeShape { parent, tails, germs }
    }

    fn num_vertices(&self) -> usize {
        self.parent.len()
    }

    /// Position of edge `e` among the germs at vertex `v`.
    fn germ_slot(&self, v: usize, e: usize) -> usize {
        self.germs[v].iter().position(|&x| x == e).expect("edge is incident")
    }
}

// ---------------------------------------------------------------------------
// Stage 2: local coverings.

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct LocalSheet {
    degree: u32,
    genus: u32,
    /// Source tail labels, sorted.
    tails: Vec<u32>,
    /// Germ degrees, one descending list per germ slot at the vertex.
    germs: Vec<Vec<u32>>,
}

#[derive(Debug, Clone)]
struct LocalOption {
    sheets: Vec<LocalSheet>,
    /// Sorted germ degrees over each germ slot, across all sheets.
    germ_multisets: Vec<Vec<u32>>,
    genus_sum: u32,
}

fn local_options(eta: &EtaLabel, tails: &[u32], num_germs: usize) -> Vec<LocalOption> {
    let degree = eta.degree();
    let points: Vec<Vec<(u32, u32)>> = tails
        .iter()
        .map(|&t| eta.source_tails_over(t).into_iter().map(|l| (l, eta.source_tails[l as usize].degree)).collect())
        .collect();
    let mut seen: BTreeSet<Vec<LocalSheet>> = BTreeSet::new();
    for shape in Partition::all(degree) {
        let degs = shape.parts().to_vec();
        let mut tail_choices: Vec<Vec<Vec<u32>>> = vec![vec![Vec::new(); degs.len()]];
        for sources in &points {
            let mut next = Vec::new();
            for base in &tail_choices {
                for split in distribute(sources, &degs) {
                    let mut merged = base.clone();
                    for (s, labels) in split.into_iter().enumerate() {
                        merged[s].extend(labels);
                    }
                    next.push(merged);
                }
            }
            tail_choices = next;
            if tail_choices.is_empty() {
                break;
            }
        }
        if tail_choices.is_empty() {
            continue;
        }
        let per_sheet_germs: Vec<Vec<Vec<Vec<u32>>>> =
            degs.iter().map(|&d| germ_choices(d, num_germs)).collect();
        for tails_by_sheet in &tail_choices {
            let mut acc: Vec<Vec<LocalSheet>> = vec![Vec::new()];
            for (s, &d) in degs.iter().enumerate() {
                let mut labels = tails_by_sheet[s].clone();
                labels.sort_unstable();
                let tail_ram: i64 = labels.iter().map(|&l| eta.source_tails[l as usize].degree as i64 - 1).sum();
                let mut next = Vec::new();
                for germs in &per_sheet_germs[s] {
                    let germ_ram: i64 = germs.iter().flatten().map(|&x| x as i64 - 1).sum();
                    let twice = 2 - 2 * d as i64 + tail_ram + germ_ram;
                    if twice < 0 || twice % 2 != 0 {
                        continue;
                    }
                    let genus = (twice / 2) as u32;
                    let special = labels.len() + germs.iter().map(Vec::len).sum::<usize>();
                    if 2 * genus as i64 - 2 + special as i64 <= 0 {
                        continue;
                    }
                    let sheet = LocalSheet { degree: d, genus, tails: labels.clone(), germs: germs.clone() };
                    for a in &acc {
                        let mut a = a.clone();
                        a.push(sheet.clone());
                        next.push(a);
                    }
                }
                acc = next;
            }
            for mut sheets in acc {
                sheets.sort();
                seen.insert(sheets);
            }
        }
    }
    seen.into_iter()
        .filter_map(|sheets| {
            let genus_sum: u32 = sheets.iter().map(|s| s.genus).sum();
            if genus_sum > eta.genus {
                return None;
            }
            let germ_multisets = (0..num_germs)
                .map(|slot| {
                    let mut m: Vec<u32> = sheets.iter().flat_map(|s| s.germs[slot].iter().copied()).collect();
                    m.sort_unstable();
                    m
                })
                .collect();
            Some(LocalOption { sheets, germ_multisets, genus_sum })
        })
        .collect()
}

/// Ways to hand the labelled `sources` (label, degree) to sheets so that
/// sheet `s` receives total degree exactly `degs[s]`.
fn distribute(sources: &[(u32, u32)], degs: &[u32]) -> Vec<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    let mut cur = vec![Vec::new(); degs.len()];
    let mut left = degs.to_vec();
    fn rec(
        i: usize,
        sources: &[(u32, u32)],
        left: &mut Vec<u32>,
        cur: &mut Vec<Vec<u32>>,
        out: &mut Vec<Vec<Vec<u32>>>,
    ) {
        if i == sources.len() {
            if left.iter().all(|&x| x == 0) {
                out.push(cur.clone());
            }
            return;
        }
        let (label, d) = sources[i];
        for s in 0..left.len() {
            if left[s] >= d {
                left[s] -= d;
                cur[s].push(label);
                rec(i + 1, sources, left, cur, out);
                cur[s].pop();
                left[s] += d;
            }
        }
    }
    rec(0, sources, &mut left, &mut cur, &mut out);
    out
}

/// One partition of `d` per germ slot, in every combination.
fn germ_choices(d: u32, slots: usize) -> Vec<Vec<Vec<u32>>> {
    let parts: Vec<Vec<u32>> = Partition::all(d).into_iter().map(Vec::from).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..slots {
        let mut next = Vec::new();
        for base in &out {
            for p in &parts {
                let mut b = base.clone();
                b.push(p.clone());
                next.push(b);
            }
        }
        out = next;
    }
    out
}

// ---------------------------------------------------------------------------
// Stage 3: compatible choices and gluings.

/// The local options at a vertex, with an index of them by the germ
/// degrees over germ slot 0 (the parent edge, at non-root vertices).
struct LocalTable {
    options: Vec<LocalOption>,
    by_first_germ: HashMap<Vec<u32>, Vec<usize>>,
}

/// Local tables shared across trees, keyed by tail set and germ count.
type LocalCache = Mutex<HashMap<(Vec<u32>, usize), Arc<LocalTable>>>;

fn local_table(eta: &EtaLabel, cache: &LocalCache, tails: &[u32], num_germs: usize) -> Arc<LocalTable> {
    let key = (tails.to_vec(), num_germs);
    if let Some(t) = cache.lock().unwrap().get(&key) {
        return t.clone();
    }
    let options = local_options(eta, tails, num_germs);
    let mut by_first_germ: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
    if num_germs > 0 {
        for (i, o) in options.iter().enumerate() {
            by_first_germ.entry(o.germ_multisets[0].clone()).or_default().push(i);
        }
    }
    let table = Arc::new(LocalTable { options, by_first_germ });
    cache.lock().unwrap().entry(key).or_insert(table).clone()
}

fn terms_over_tree(
    eta: &EtaLabel,
    tree: &TreeShape,
    config: &StrataConfig,
    cache: &LocalCache,
) -> Vec<ContractionTerm> {
    let nv = tree.num_vertices();
    let tables: Vec<Arc<LocalTable>> =
        (0..nv).map(|v| local_table(eta, cache, &tree.tails[v], tree.germs[v].len())).collect();
    if tables.iter().any(|t| t.options.is_empty()) {
        return Vec::new();
    }
    let options: Vec<&[LocalOption]> = tables.iter().map(|t| t.options.as_slice()).collect();
    let index: Vec<&HashMap<Vec<u32>, Vec<usize>>> = tables.iter().map(|t| &t.by_first_germ).collect();

    let mut found: HashMap<String, ContractionTerm> = HashMap::new();
    let mut chosen = vec![0usize; nv];
    choose(eta, tree, config, &options, &index, 0, 0, &mut chosen, &mut found);
    found.into_values().collect()
}

#[allow(clippy::too_many_arguments)]
fn choose(
    eta: &EtaLabel,
    tree: &TreeShape,
    config: &StrataConfig,
    options: &[&[LocalOption]],
    index: &[&HashMap<Vec<u32>, Vec<usize>>],
    v: usize,
    // Σ genus + #edges - #sheets over the vertices chosen so far.
    excess: i64,
    chosen: &mut Vec<usize>,
    found: &mut HashMap<String, ContractionTerm>,
) {
    if v == tree.num_vertices() {
        glue_all(eta, tree, config, options, chosen, found);
        return;
    }
    let candidates: Vec<usize> = match tree.parent[v] {
        None => (0..options[v].len()).collect(),
        Some(p) => {
            let slot = tree.germ_slot(p, v - 1);
            let key = &options[p][chosen[p]].germ_multisets[slot];
            match index[v].get(key) {
                Some(c) => c.clone(),
                None => return,
            }
        }
    };
    for i in candidates {
        let o = &options[v][i];
        let edges = if v > 0 { o.germ_multisets[0].len() as i64 } else { 0 };
        let excess = excess + o.genus_sum as i64 + edges - o.sheets.len() as i64;
        // Genus and cycle rank only grow as vertices are added.
        if excess + 1 > eta.genus as i64 {
            continue;
        }
        chosen[v] = i;
        choose(eta, tree, config, options, index, v + 1, excess, chosen, found);
    }
}

/// Non-negative integer matrices with the given row and column sums.
fn contingency_tables(rows: &[u32], cols: &[u32]) -> Vec<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    let mut table = vec![vec![0u32; cols.len()]; rows.len()];
    let mut col_left = cols.to_vec();
    fn rec(
        r: usize,
        c: usize,
        row_left: u32,
        rows: &[u32],
        col_left: &mut Vec<u32>,
        table: &mut Vec<Vec<u32>>,
        out: &mut Vec<Vec<Vec<u32>>>,
    ) {
        if r == rows.len() {
            if col_left.iter().all(|&x| x == 0) {
                out.push(table.clone());
            }
            return;
        }
        if c == col_left.len() {
            if row_left == 0 {
                let next = if r + 1 < rows.len() { rows[r + 1] } else { 0 };
                rec(r + 1, 0, next, rows, col_left, table, out);
            }
            return;
        }
        for x in 0..=row_left.min(col_left[c]) {
            table[r][c] = x;
            col_left[c] -= x;
            rec(r, c + 1, row_left - x, rows, col_left, table, out);
            col_left[c] += x;
        }
        table[r][c] = 0;
    }
    if rows.iter().sum::<u32>() != cols.iter().sum::<u32>() {
        return out;
    }
    let first = rows.first().copied().unwrap_or(0);
    rec(0, 0, first, rows, &mut col_left, &mut table, &mut out);
    out
}

/// One block of source edges: `count` edges of degree `degree` over target
/// edge `edge`, from parent-side sheet `upper` to child-side sheet `lower`
/// (indices into the sheets at those vertices).
#[derive(Debug, Clone, Copy)]
struct EdgeBlock {
    edge: usize,
    degree: u32,
    upper: usize,
    lower: usize,
    count: u32,
}

fn glue_all(
    eta: &EtaLabel,
    tree: &TreeShape,
    config: &StrataConfig,
    options: &[&[LocalOption]],
    chosen: &[usize],
    found: &mut HashMap<String, ContractionTerm>,
) {
    let nv = tree.num_vertices();
    let local: Vec<&LocalOption> = (0..nv).map(|v| &options[v][chosen[v]]).collect();
    let sheets: usize = local.iter().map(|o| o.sheets.len()).sum();
    let source_edges: usize = (1..nv).map(|c| local[c].germ_multisets[0].len()).sum();
    let genus_sum: u32 = local.iter().map(|o| o.genus_sum).sum();
    if genus_sum as i64 + source_edges as i64 - sheets as i64 + 1 != eta.genus as i64 {
        return;
    }
    // For each (edge, degree), the possible tables.
    let mut factors: Vec<Vec<Vec<EdgeBlock>>> = Vec::new();
    for c in 1..nv {
        let e = c - 1;
        let p = tree.parent[c].unwrap();
        let pslot = tree.germ_slot(p, e);
        let mut degrees = local[c].germ_multisets[0].clone();
        degrees.dedup();
        for d in degrees {
            let count = |o: &LocalOption, slot: usize| -> Vec<u32> {
                o.sheets.iter().map(|s| s.germs[slot].iter().filter(|&&x| x == d).count() as u32).collect()
            };
            let rows = count(local[p], pslot);
            let cols = count(local[c], 0);
            let tables = contingency_tables(&rows, &cols);
            let blocks: Vec<Vec<EdgeBlock>> = tables
                .into_iter()
                .map(|t| {
                    let mut b = Vec::new();
                    for (i, row) in t.iter().enumerate() {
                        for (j, &n) in row.iter().enumerate() {
                            if n > 0 {
                                b.push(EdgeBlock { edge: e, degree: d, upper: i, lower: j, count: n });
                            }
                        }
                    }
                    b
                })
                .collect();
            factors.push(blocks);
        }
    }
    let mut pick = vec![0usize; factors.len()];
    loop {
        let blocks: Vec<EdgeBlock> = factors.iter().zip(&pick).flat_map(|(f, &i)| f[i].iter().copied()).collect();
        if admissible(eta, tree, config, &local, &blocks) {
            if let Some(term) = assemble(eta, tree, config, &local, &blocks) {
                found.entry(term.key.clone()).or_insert(term);
            }
        }
        // Odometer over the factor choices.
        let mut i = 0;
        loop {
            if i == factors.len() {
                return;
            }
            pick[i] += 1;
            if pick[i] < factors[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Stage 4: build, filter, key.

/// Connectivity, genus and (when pruning) nonzero edge weights, decided on
/// the sheet graph alone before anything is built. Sheets are bits.
fn admissible(
    eta: &EtaLabel,
    tree: &TreeShape,
    config: &StrataConfig,
    local: &[&LocalOption],
    blocks: &[EdgeBlock],
) -> bool {
    let mut first = Vec::with_capacity(local.len());
    let mut genus = Vec::new();
    let mut retained = Vec::new();
    for o in local {
        first.push(genus.len());
        for s in &o.sheets {
            genus.push(s.genus as i64);
            retained.push(s.tails.iter().filter(|&&l| eta.source_tails[l as usize].retained.is_some()).count());
        }
    }
    let n = genus.len();
    if n > 64 {
        return true;
    }
    // (a, b, target edge)
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for b in blocks {
        let c = b.edge + 1;
        let p = tree.parent[c].unwrap();
        for _ in 0..b.count {
            edges.push((first[p] + b.upper, first[c] + b.lower, b.edge));
        }
    }
    let reach = |start: usize, skip: usize| -> u64 {
        let mut seen = 1u64 << start;
        loop {
            let before = seen;
            for (i, &(a, b, _)) in edges.iter().enumerate() {
                if i == skip {
                    continue;
                }
                if seen >> a & 1 == 1 || seen >> b & 1 == 1 {
                    seen |= 1 << a | 1 << b;
                }
            }
            if seen == before {
                return seen;
            }
        }
    };
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    if reach(0, usize::MAX) != all {
        return false;
    }
    let total: i64 = genus.iter().sum::<i64>() + edges.len() as i64 - n as i64 + 1;
    if total != eta.genus as i64 {
        return false;
    }
    if !config.prune {
        return true;
    }
    let side_is_rational_leaf = |side: u64, skip: usize| -> bool {
        let verts = side.count_ones() as i64;
        let g: i64 = (0..n).filter(|&v| side >> v & 1 == 1).map(|v| genus[v]).sum();
        let inner = edges
            .iter()
            .enumerate()
            .filter(|&(i, &(a, b, _))| i != skip && side >> a & 1 == 1 && side >> b & 1 == 1)
            .count() as i64;
        let r: usize = (0..n).filter(|&v| side >> v & 1 == 1).map(|v| retained[v]).sum();
        g + inner - verts + 1 == 0 && r == 1
    };
    let mut weighted = vec![false; tree.num_vertices().saturating_sub(1)];
    for (i, &(a, b, e)) in edges.iter().enumerate() {
        if weighted[e] {
            continue;
        }
        let side = reach(a, i);
        if side >> b & 1 == 1 {
            continue;
        }
        if side_is_rational_leaf(side, i) || side_is_rational_leaf(all & !side, i) {
            weighted[e] = true;
        }
    }
    weighted.iter().all(|&w| w)
}

fn assemble(
    eta: &EtaLabel,
    tree: &TreeShape,
    config: &StrataConfig,
    local: &[&LocalOption],
    blocks: &[EdgeBlock],
) -> Option<ContractionTerm> {
    let nv = tree.num_vertices();
    let mut target = TwistedGraph::new();
    for _ in 0..nv {
        target.add_vertex(0, Trivial);
    }
    let mut tail_he = vec![usize::MAX; eta.target_tails.len()];
    for v in 0..nv {
        for &t in &tree.tails[v] {
            tail_he[t as usize] = target.add_tail(v, t, eta.target_mults[t as usize]);
        }
    }
    let mut edge_mult = vec![1u32; nv.saturating_sub(1)];
    for b in blocks {
        edge_mult[b.edge] = edge_mult[b.edge].lcm(&b.degree);
    }
    // (upper half at the parent, lower half at the child)
    let mut edge_he = Vec::with_capacity(nv - 1);
    for c in 1..nv {
        edge_he.push(target.add_edge(tree.parent[c].unwrap(), c, edge_mult[c - 1]));
    }

    let mut source = TwistedGraph::new();
    let mut vertex_map = Vec::new();
    let mut vertex_degree = Vec::new();
    let mut first_sheet = Vec::with_capacity(nv);
    for (v, o) in local.iter().enumerate() {
        first_sheet.push(source.num_vertices());
        for s in &o.sheets {
            source.add_vertex(s.genus, Trivial);
            vertex_map.push(v);
            vertex_degree.push(s.degree);
        }
    }
    let mut half_edge_map = Vec::new();
    for (v, o) in local.iter().enumerate() {
        for (i, s) in o.sheets.iter().enumerate() {
            for &l in &s.tails {
                let st = &eta.source_tails[l as usize];
                source.add_tail(first_sheet[v] + i, l, st.mult);
                half_edge_map.push(tail_he[st.over as usize]);
            }
        }
    }
    for b in blocks {
        let c = b.edge + 1;
        let p = tree.parent[c].unwrap();
        for _ in 0..b.count {
            source.add_edge(first_sheet[p] + b.upper, first_sheet[c] + b.lower, edge_mult[b.edge] / b.degree);
            half_edge_map.push(edge_he[b.edge].0);
            half_edge_map.push(edge_he[b.edge].1);
        }
    }
    if !source.is_connected() || source.genus() != eta.genus as i64 {
        return None;
    }
    let rho = CoveringGraph { target, source, vertex_map, half_edge_map, vertex_degree };

    let edge_weights: Vec<EdgeWeight> = edge_he
        .iter()
        .map(|&(h, _)| EdgeWeight { edge: h, weight: edge_weight(&rho, eta, h) })
        .collect();
    if config.prune && edge_weights.iter().any(|w| w.weight.is_zero()) {
        return None;
    }
    let tail_weights = (0..eta.target_tails.len())
        .map(|t| TailWeight { label: t as u32, half_edge: tail_he[t], weight: tail_weight(&rho, eta, tail_he[t]) })
        .collect();
    let (key, aut_count) = covering_canonical_form_and_automorphisms(&rho);
    let denom: Rational = edge_mult.iter().map(|&m| Rational::from(m).pow(2)).product();
    let norm = Rational::from(aut_count) / denom;
    let vertices = (0..nv).map(|v| vertex_decomposition(&rho, v)).collect();
    Some(ContractionTerm { key, rho, aut_count, norm, tail_weights, edge_weights, vertices })
}

/// The local datum at `v` and one tuple spec per sheet: over each target
/// point, the sheet's local degrees form a conjugacy class of `S_d`.
pub fn vertex_decomposition(rho: &CoveringGraph, v: usize) -> VertexDecomposition {
    let datum = rho.local_datum(v);
    let chi_inputs = (0..datum.sheets.len())
        .map(|s| {
            let d = datum.sheets[s].degree;
            let classes = (0..datum.num_points())
                .map(|i| Partition::new(datum.local_partition(s, i)).expect("local degrees are positive"))
                .collect();
            TupleSpec::new(d, classes).expect("local degrees sum to the sheet degree")
        })
        .collect();
    VertexDecomposition { vertex: v, datum, chi_inputs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eta::build_eta;

    #[test]
    fn tree_counts() {
        // Stable trees on 4 leaves: the star and three one-edge trees.
        assert_eq!(enumerate_trees(4, 10).len(), 4);
        // On 5 leaves: 1 + 10 + 15.
        assert_eq!(enumerate_trees(5, 10).len(), 26);
        assert_eq!(enumerate_trees(5, 1).len(), 11);
    }

    #[test]
    fn tree_shape_places_tails() {
        let t = TreeShape::from_splits(5, &[0b11000, 0b11100]);
        assert_eq!(t.parent, vec![None, Some(0), Some(1)]);
        assert_eq!(t.tails, vec![vec![0, 1], vec![2], vec![3, 4]]);
        assert_eq!(t.germs, vec![vec![0], vec![0, 1], vec![1]]);
    }

    #[test]
    fn tables() {
        assert_eq!(contingency_tables(&[2], &[1, 1]).len(), 1);
        assert_eq!(contingency_tables(&[1, 1], &[1, 1]).len(), 2);
        assert_eq!(contingency_tables(&[2, 1], &[1, 2]).len(), 2);
        assert!(contingency_tables(&[2], &[1]).is_empty());
    }

    #[test]
    fn genus_one_has_only_eta() {
        let eta = build_eta(1, 1, None).unwrap();
        let q = BracketQuery::new(1, vec![1]).unwrap();
        let terms = contributing_terms(&eta, &q, &StrataConfig::default()).unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].num_edges(), 0);
        assert_eq!(terms[0].norm, Rational::one());
    }

    #[test]
    fn wrong_query_is_rejected() {
        let eta = build_eta(1, 1, None).unwrap();
        let q = BracketQuery::new(1, vec![1, 1]).unwrap();
        assert!(matches!(
            contributing_terms(&eta, &q, &StrataConfig::default()),
            Err(StrataError::PointCount { .. })
        ));
    }
}
