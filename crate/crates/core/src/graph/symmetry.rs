//! Automorphism counts, canonical keys and norms of contractions.

use serde::{Deserialize, Serialize};

use super::canon::{hex, ColoredGraph};
use super::contraction::{Contraction, HalfEdgeImage};
use super::covering::{CoveringContraction, CoveringDatum, CoveringGraph};
use super::twisted::TwistedGraph;
use crate::rational::Rational;
use crate::semigroup::MarkSemigroup;

const LINK_ATTACH: u32 = 0;
const LINK_SIGMA: u32 = 1;
const LINK_PROJECT: u32 = 2;

const KIND_VERTEX: u32 = 0;
const KIND_HALF_EDGE: u32 = 1;
const KIND_SOURCE_VERTEX: u32 = 2;
const KIND_SOURCE_HALF_EDGE: u32 = 3;

/// Which parts of a structure an automorphism must fix.
///
/// `tail_labels` makes tails with different labels distinguishable, which
/// fixes them pointwise when labels are unique. `target` pins every target
/// vertex and half-edge of a covering; `source_vertices` pins the source
/// vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Fixing {
    pub tail_labels: bool,
    pub target: bool,
    pub source_vertices: bool,
}

impl Fixing {
    pub const NOTHING: Fixing = Fixing { tail_labels: false, target: false, source_vertices: false };
    pub const TAILS: Fixing = Fixing { tail_labels: true, target: false, source_vertices: false };
    pub const TARGET: Fixing = Fixing { tail_labels: false, target: true, source_vertices: false };
    /// Target fixed and source vertices fixed; source tails may permute.
    pub const TARGET_AND_SOURCE_VERTICES: Fixing =
        Fixing { tail_labels: false, target: true, source_vertices: true };
}

fn encode_graph<A: MarkSemigroup>(
    cg: &mut ColoredGraph,
    g: &TwistedGraph<A>,
    kinds: (u32, u32),
    labels: bool,
    vextra: &dyn Fn(usize) -> Vec<u32>,
    hextra: &dyn Fn(usize) -> Vec<u32>,
) -> (Vec<usize>, Vec<usize>) {
    let vnodes: Vec<usize> = g
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut c = vec![kinds.0, v.genus, v.mark.code()];
            c.extend(vextra(i));
            cg.add_node(c)
        })
        .collect();
    let hnodes: Vec<usize> = g
        .half_edges
        .iter()
        .enumerate()
        .map(|(i, h)| {
            let label = match h.tail {
                Some(l) if labels => l + 1,
                _ => 0,
            };
            let mut c = vec![kinds.1, h.mult, h.is_tail() as u32, label];
            c.extend(hextra(i));
            cg.add_node(c)
        })
        .collect();
    for (i, h) in g.half_edges.iter().enumerate() {
        cg.link(vnodes[h.vertex], hnodes[i], LINK_ATTACH);
        if h.partner > i {
            cg.link(hnodes[i], hnodes[h.partner], LINK_SIGMA);
        }
    }
    (vnodes, hnodes)
}

fn encode_covering<A: MarkSemigroup>(
    rho: &CoveringGraph<A>,
    fixing: Fixing,
    extra: Option<&CoveringExtra>,
) -> ColoredGraph {
    let mut cg = ColoredGraph::new();
    let tv = |i: usize| {
        let mut c = Vec::new();
        if fixing.target {
            c.push(i as u32 + 1);
        }
        if let Some(x) = extra {
            c.extend(x.target_vertex[i].iter());
        }
        c
    };
    let th = |i: usize| {
        let mut c = Vec::new();
        if fixing.target {
            c.push(i as u32 + 1);
        }
        if let Some(x) = extra {
            c.extend(x.target_half_edge[i].iter());
        }
        c
    };
    let (tvn, thn) = encode_graph(
        &mut cg,
        &rho.target,
        (KIND_VERTEX, KIND_HALF_EDGE),
        fixing.tail_labels,
        &tv,
        &th,
    );
    let sv = |i: usize| {
        let mut c = vec![rho.vertex_degree[i]];
        if fixing.source_vertices {
            c.push(i as u32 + 1);
        }
        if let Some(x) = extra {
            c.extend(x.source_vertex[i].iter());
        }
        c
    };
    let sh = |i: usize| {
        let mut c = Vec::new();
        if let Some(x) = extra {
            c.extend(x.source_half_edge[i].iter());
        }
        c
    };
    let (svn, shn) = encode_graph(
        &mut cg,
        &rho.source,
        (KIND_SOURCE_VERTEX, KIND_SOURCE_HALF_EDGE),
        fixing.tail_labels,
        &sv,
        &sh,
    );
    for (v, &t) in rho.vertex_map.iter().enumerate() {
        cg.link(svn[v], tvn[t], LINK_PROJECT);
    }
    for (h, &t) in rho.half_edge_map.iter().enumerate() {
        cg.link(shn[h], thn[t], LINK_PROJECT);
    }
    cg
}

struct CoveringExtra {
    target_vertex: Vec<Vec<u32>>,
    target_half_edge: Vec<Vec<u32>>,
    source_vertex: Vec<Vec<u32>>,
    source_half_edge: Vec<Vec<u32>>,
}

/// Colours recording where each item goes under a contraction; automorphisms
/// preserving them are exactly those commuting with the contraction.
fn image_colors<A>(f: &Contraction<A>) -> (Vec<Vec<u32>>, Vec<Vec<u32>>) {
    let v = f.vertex_map.iter().map(|&t| vec![t as u32]).collect();
    let h = f
        .half_edge_map
        .iter()
        .map(|img| match *img {
            HalfEdgeImage::Kept(k) => vec![0, k as u32],
            HalfEdgeImage::Contracted(t) => vec![1, t as u32],
        })
        .collect();
    (v, h)
}

/// Order of the automorphism group of a twisted graph. With
/// `fixing.tail_labels` tails keep their labels; the other flags do not
/// apply to a bare graph.
pub fn graph_automorphisms<A: MarkSemigroup>(g: &TwistedGraph<A>, fixing: Fixing) -> u64 {
    let mut cg = ColoredGraph::new();
    encode_graph(&mut cg, g, (KIND_VERTEX, KIND_HALF_EDGE), fixing.tail_labels, &|_| vec![], &|_| vec![]);
    cg.canonize().automorphisms
}

/// Order of the automorphism group of a covering (pairs of compatible
/// automorphisms of target and source), subject to `fixing`.
pub fn covering_automorphisms<A: MarkSemigroup>(rho: &CoveringGraph<A>, fixing: Fixing) -> u64 {
    encode_covering(rho, fixing, None).canonize().automorphisms
}

/// `#Aut(η | t(η), V(s(η)))` for a local covering datum: permutations of
/// source points over the same target point, on the same sheet, with the
/// same degree. Computed in closed form.
pub fn local_automorphisms<A: MarkSemigroup>(datum: &CoveringDatum<A>) -> u64 {
    let mut total = 1u64;
    for sheet in &datum.sheets {
        let mut keys: Vec<(usize, u32)> = sheet.points.iter().map(|p| (p.over, p.mult)).collect();
        keys.sort_unstable();
        let mut i = 0;
        while i < keys.len() {
            let j = (i..keys.len()).find(|&j| keys[j] != keys[i]).unwrap_or(keys.len());
            total *= (1..=(j - i) as u64).product::<u64>();
            i = j;
        }
    }
    total
}

/// Automorphisms of `f.source` commuting with `f` (i.e. inducing the
/// identity on `f.target`).
pub fn contraction_automorphisms<A: MarkSemigroup>(f: &Contraction<A>) -> u64 {
    let (v, h) = image_colors(f);
    let mut cg = ColoredGraph::new();
    encode_graph(
        &mut cg,
        &f.source,
        (KIND_VERTEX, KIND_HALF_EDGE),
        true,
        &|i| v[i].clone(),
        &|i| h[i].clone(),
    );
    cg.canonize().automorphisms
}

/// Automorphisms of the larger covering commuting with a covering morphism.
pub fn covering_contraction_automorphisms<A: MarkSemigroup>(f: &CoveringContraction<A>) -> u64 {
    let (tv, th) = image_colors(&f.target_map);
    let (sv, sh) = image_colors(&f.source_map);
    let extra = CoveringExtra {
        target_vertex: tv,
        target_half_edge: th,
        source_vertex: sv,
        source_half_edge: sh,
    };
    encode_covering(&f.source, Fixing::TAILS, Some(&extra)).canonize().automorphisms
}

/// Lowercase-hex canonical key of a graph, respecting tail labels.
pub fn graph_canonical_form<A: MarkSemigroup>(g: &TwistedGraph<A>) -> String {
    let mut cg = ColoredGraph::new();
    encode_graph(&mut cg, g, (KIND_VERTEX, KIND_HALF_EDGE), true, &|_| vec![], &|_| vec![]);
    hex(&cg.canonize().certificate.to_bytes())
}

/// Lowercase-hex canonical key of a covering, respecting tail labels,
/// multiplicities, degrees and marks.
pub fn covering_canonical_form<A: MarkSemigroup>(rho: &CoveringGraph<A>) -> String {
    hex(&encode_covering(rho, Fixing::TAILS, None).canonize().certificate.to_bytes())
}

/// Canonical key plus automorphisms fixing all tails, in one search.
pub fn covering_canonical_form_and_automorphisms<A: MarkSemigroup>(
    rho: &CoveringGraph<A>,
) -> (String, u64) {
    let r = encode_covering(rho, Fixing::TAILS, None).canonize();
    (hex(&r.certificate.to_bytes()), r.automorphisms)
}

/// Degree `‖f‖` of the map from the source moduli of a contraction onto its
/// image stratum. Always positive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NormValue(Rational);

impl NormValue {
    fn new(value: Rational) -> Self {
        assert!(value.is_positive(), "norms are positive");
        NormValue(value)
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }
}

/// Which graph category a plain contraction is read in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphCategory {
    /// Multiplicities ignored: `‖f‖ = #Aut`.
    Untwisted,
    /// `‖f‖ = #Aut / ∏ m(i)` over contracted edges.
    Twisted,
}

pub fn contraction_norm<A: MarkSemigroup>(f: &Contraction<A>, category: GraphCategory) -> NormValue {
    let aut = Rational::from(contraction_automorphisms(f));
    match category {
        GraphCategory::Untwisted => NormValue::new(aut),
        GraphCategory::Twisted => {
            let prod: Rational =
                f.contracted.iter().map(|&e| Rational::from(f.source.half_edges[e].mult)).product();
            NormValue::new(aut / prod)
        }
    }
}

/// `‖f‖ = #Aut(ρ' → ρ | ρ) / ∏ m(e)²` over contracted target edges.
pub fn covering_norm<A: MarkSemigroup>(f: &CoveringContraction<A>) -> NormValue {
    let aut = Rational::from(covering_contraction_automorphisms(f));
    let prod: Rational = f
        .target_map
        .contracted
        .iter()
        .map(|&e| Rational::from(f.source.target.half_edges[e].mult).pow(2))
        .product();
    NormValue::new(aut / prod)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::contraction::contract;
    use crate::graph::covering::{LocalPoint, Sheet};
    use crate::graph::twisted::TwistedVertex;
    use crate::semigroup::Trivial;

    #[test]
    fn identity_norm_is_one() {
        let mut g = TwistedGraph::new();
        let a = g.add_vertex(1, Trivial);
        g.add_tail(a, 0, 2);
        let f = contract(&g, &[]);
        assert_eq!(contraction_norm(&f, GraphCategory::Twisted).value(), &Rational::one());
    }

    #[test]
    fn twisted_norm_divides_by_multiplicity() {
        let mut g = TwistedGraph::new();
        let a = g.add_vertex(0, Trivial);
        let b = g.add_vertex(1, Trivial);
        g.add_tail(a, 0, 1);
        g.add_tail(a, 1, 1);
        let (e, _) = g.add_edge(a, b, 3);
        let f = contract(&g, &[e]);
        assert_eq!(contraction_automorphisms(&f), 1);
        assert_eq!(contraction_norm(&f, GraphCategory::Twisted).value(), &Rational::new(1, 3));
        assert_eq!(contraction_norm(&f, GraphCategory::Untwisted).value(), &Rational::one());
    }

    #[test]
    fn interchangeable_source_tails() {
        // Two source tails of degree 1 over the same target tail on one sheet.
        let datum = CoveringDatum {
            target: TwistedVertex::new(0, vec![1, 2, 2, 2, 2], Trivial),
            sheets: vec![Sheet {
                genus: 1,
                mark: Trivial,
                degree: 2,
                points: vec![
                    LocalPoint { over: 0, mult: 1 },
                    LocalPoint { over: 0, mult: 1 },
                    LocalPoint { over: 1, mult: 1 },
                    LocalPoint { over: 2, mult: 1 },
                    LocalPoint { over: 3, mult: 1 },
                    LocalPoint { over: 4, mult: 1 },
                ],
            }],
        };
        datum.validate().unwrap();
        assert_eq!(local_automorphisms(&datum), 2);
        let g = datum.to_covering_graph();
        assert_eq!(covering_automorphisms(&g, Fixing::TARGET_AND_SOURCE_VERTICES), 2);
        assert_eq!(covering_automorphisms(&g, Fixing::TAILS), 1);
    }

    #[test]
    fn canonical_key_ignores_numbering() {
        let mut g = TwistedGraph::new();
        let a = g.add_vertex(0, Trivial);
        let b = g.add_vertex(2, Trivial);
        g.add_tail(a, 0, 1);
        g.add_tail(a, 1, 1);
        g.add_edge(a, b, 1);
        let h = g.relabeled(&[1, 0], &[3, 2, 0, 1]);
        assert_ne!(g, h);
        assert_eq!(graph_canonical_form(&g), graph_canonical_form(&h));
        let key = graph_canonical_form(&g);
        assert!(key.chars().all(|c| c.is_ascii_hexdigit() && !c.is_ascii_uppercase()));
    }
}
