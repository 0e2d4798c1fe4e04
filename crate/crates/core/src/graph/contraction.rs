use serde::{Deserialize, Serialize};

use super::twisted::{TwistedGraph, UnionFind};
use super::Violation;
use crate::semigroup::MarkSemigroup;

/// Where a source half-edge goes under a contraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HalfEdgeImage {
    Kept(usize),
    /// The half-edge belongs to a contracted edge and lands on this vertex.
    Contracted(usize),
}

/// A contraction `f: source -> target` collapsing the edges in `contracted`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: MarkSemigroup")]
pub struct Contraction<A> {
    pub source: TwistedGraph<A>,
    pub target: TwistedGraph<A>,
    pub vertex_map: Vec<usize>,
    pub half_edge_map: Vec<HalfEdgeImage>,
    /// Contracted source edges, named by their lower half-edge, sorted.
    pub contracted: Vec<usize>,
}

/// The unique contraction of `g` whose contracted edge set is `edges`.
///
/// Edges may be named by either half-edge. Target vertices are numbered by
/// the first source vertex they contain; kept half-edges keep their order.
pub fn contract<A: MarkSemigroup>(g: &TwistedGraph<A>, edges: &[usize]) -> Contraction<A> {
    let mut contracted: Vec<usize> = edges.iter().map(|&h| g.edge_of(h)).collect();
    contracted.sort_unstable();
    contracted.dedup();
    assert!(
        contracted.iter().all(|&h| !g.half_edges[h].is_tail()),
        "tails cannot be contracted"
    );

    let mut uf = UnionFind::new(g.num_vertices());
    for &h in &contracted {
        uf.union(g.half_edges[h].vertex, g.half_edges[g.half_edges[h].partner].vertex);
    }
    let vertex_map = uf.labels();
    let nt = vertex_map.iter().max().map_or(0, |m| m + 1);

    let mut genus = vec![0i64; nt];
    let mut count = vec![0i64; nt];
    let mut marks = vec![A::zero(); nt];
    for (v, vx) in g.vertices.iter().enumerate() {
        let t = vertex_map[v];
        genus[t] += vx.genus as i64;
        count[t] += 1;
        marks[t] = marks[t].add(vx.mark);
    }
    for &h in &contracted {
        genus[vertex_map[g.half_edges[h].vertex]] += 1;
    }

    let mut target = TwistedGraph::new();
    for t in 0..nt {
        let gt = genus[t] - count[t] + 1;
        target.add_vertex(gt as u32, marks[t]);
    }

    let is_contracted = |h: usize| !g.half_edges[h].is_tail() && contracted.binary_search(&g.edge_of(h)).is_ok();
    let mut new_index = vec![usize::MAX; g.half_edges.len()];
    let mut next = 0;
    for h in 0..g.half_edges.len() {
        if !is_contracted(h) {
            new_index[h] = next;
            next += 1;
        }
    }
    let mut half_edge_map = Vec::with_capacity(g.half_edges.len());
    for (h, he) in g.half_edges.iter().enumerate() {
        if is_contracted(h) {
            half_edge_map.push(HalfEdgeImage::Contracted(vertex_map[he.vertex]));
        } else {
            target.half_edges.push(super::twisted::HalfEdge {
                vertex: vertex_map[he.vertex],
                mult: he.mult,
                partner: new_index[he.partner],
                tail: he.tail,
            });
            half_edge_map.push(HalfEdgeImage::Kept(new_index[h]));
        }
    }

    Contraction { source: g.clone(), target, vertex_map, half_edge_map, contracted }
}

impl<A: MarkSemigroup> Contraction<A> {
    pub fn identity(g: &TwistedGraph<A>) -> Self {
        contract(g, &[])
    }

    /// Target edges are named by their lower half-edge; this maps a source
    /// edge name to the target edge name, or `None` if it was contracted.
    pub fn edge_image(&self, source_edge: usize) -> Option<usize> {
        match self.half_edge_map[source_edge] {
            HalfEdgeImage::Kept(h) => Some(self.target.edge_of(h)),
            HalfEdgeImage::Contracted(_) => None,
        }
    }

    /// `other ∘ self`, where `other` starts at `self.target`.
    pub fn then(&self, other: &Contraction<A>) -> Contraction<A> {
        assert_eq!(self.target, other.source, "contractions do not compose");
        let vertex_map = self.vertex_map.iter().map(|&v| other.vertex_map[v]).collect();
        let half_edge_map = self
            .half_edge_map
            .iter()
            .map(|img| match *img {
                HalfEdgeImage::Kept(h) => other.half_edge_map[h],
                HalfEdgeImage::Contracted(v) => HalfEdgeImage::Contracted(other.vertex_map[v]),
            })
            .collect::<Vec<_>>();
        let mut contracted: Vec<usize> = (0..self.source.half_edges.len())
            .filter(|&h| {
                !self.source.half_edges[h].is_tail()
                    && h < self.source.half_edges[h].partner
                    && matches!(half_edge_map[h], HalfEdgeImage::Contracted(_))
            })
            .collect();
        contracted.sort_unstable();
        Contraction {
            source: self.source.clone(),
            target: other.target.clone(),
            vertex_map,
            half_edge_map,
            contracted,
        }
    }

    /// Checks the contraction axioms: surjectivity, commutation with the
    /// involution and attachment, bijectivity over target half-edges, no
    /// contracted tails, and connected fibres of the right genus and mark.
    pub fn violations(&self) -> Vec<Violation> {
        let (s, t) = (&self.source, &self.target);
        let mut out = Vec::new();
        let mut hit_v = vec![false; t.num_vertices()];
        for &v in &self.vertex_map {
            if v < hit_v.len() {
                hit_v[v] = true;
            }
        }
        let mut hit_h = vec![0usize; t.half_edges.len()];
        for (h, img) in self.half_edge_map.iter().enumerate() {
            let he = &s.half_edges[h];
            match *img {
                HalfEdgeImage::Kept(k) => {
                    hit_h[k] += 1;
                    let te = &t.half_edges[k];
                    let partner_ok = matches!(self.half_edge_map[he.partner],
                        HalfEdgeImage::Kept(p) if p == te.partner);
                    if !partner_ok || self.vertex_map[he.vertex] != te.vertex {
                        out.push(Violation::ContractionNotEquivariant { half_edge: h });
                    }
                    if te.mult != he.mult || te.tail != he.tail {
                        out.push(Violation::ContractionLabelChanged { half_edge: h });
                    }
                }
                HalfEdgeImage::Contracted(v) => {
                    if he.is_tail() {
                        out.push(Violation::TailContracted { half_edge: h });
                    }
                    let partner_ok = matches!(self.half_edge_map[he.partner],
                        HalfEdgeImage::Contracted(w) if w == v);
                    if !partner_ok || self.vertex_map[he.vertex] != v {
                        out.push(Violation::ContractionNotEquivariant { half_edge: h });
                    }
                }
            }
        }
        if hit_v.iter().any(|&x| !x) || hit_h.contains(&0) {
            out.push(Violation::ContractionNotSurjective);
        }
        if hit_h.iter().any(|&c| c > 1) {
            out.push(Violation::ContractionNotInjective);
        }
        if !out.is_empty() {
            return out;
        }
        // Fibres.
        for v in 0..t.num_vertices() {
            let members: Vec<usize> =
                (0..s.num_vertices()).filter(|&x| self.vertex_map[x] == v).collect();
            let mut uf = UnionFind::new(s.num_vertices());
            let mut internal = 0i64;
            for (a, b) in s.edges() {
                if matches!(self.half_edge_map[a], HalfEdgeImage::Contracted(w) if w == v) {
                    uf.union(s.half_edges[a].vertex, s.half_edges[b].vertex);
                    internal += 1;
                }
            }
            let root = uf.find(members[0]);
            if members.iter().any(|&x| uf.find(x) != root) {
                out.push(Violation::FiberDisconnected { vertex: v });
                continue;
            }
            let g: i64 = members.iter().map(|&x| s.vertices[x].genus as i64).sum::<i64>() + internal
                - members.len() as i64
                + 1;
            if g != t.vertices[v].genus as i64 {
                out.push(Violation::FiberGenusMismatch { vertex: v });
            }
            let mark = crate::semigroup::sum_marks(members.iter().map(|&x| s.vertices[x].mark));
            if mark != t.vertices[v].mark {
                out.push(Violation::MarkSumMismatch { vertex: v });
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::twisted::TwistedGraph;
    use crate::semigroup::{Bool01, Trivial};

    #[test]
    fn identity_contraction() {
        let mut g = TwistedGraph::new();
        let a = g.add_vertex(1, Trivial);
        g.add_tail(a, 0, 1);
        let f = contract(&g, &[]);
        assert_eq!(f.target, g);
        assert!(f.violations().is_empty());
    }

    #[test]
    fn merging_two_vertices_adds_genus_and_marks() {
        let mut g = TwistedGraph::new();
        let a = g.add_vertex(1, Bool01(false));
        let b = g.add_vertex(2, Bool01(true));
        g.add_tail(a, 7, 1);
        let (e, _) = g.add_edge(a, b, 3);
        let f = contract(&g, &[e]);
        assert_eq!(f.target.num_vertices(), 1);
        assert_eq!(f.target.vertices[0].genus, 3);
        assert_eq!(f.target.vertices[0].mark, Bool01(true));
        assert_eq!(f.target.half_edges.len(), 1);
        assert!(f.violations().is_empty());
        assert_eq!(f.target.genus(), g.genus());
    }

    #[test]
    fn loop_contraction_raises_vertex_genus() {
        let mut g = TwistedGraph::new();
        let a = g.add_vertex(0, Trivial);
        g.add_tail(a, 0, 1);
        let (e, _) = g.add_edge(a, a, 1);
        let f = contract(&g, &[e + 1]);
        assert_eq!(f.target.vertices[0].genus, 1);
        assert!(f.violations().is_empty());
    }

    #[test]
    fn detects_broken_fibre() {
        let mut g = TwistedGraph::new();
        let a = g.add_vertex(0, Trivial);
        let b = g.add_vertex(0, Trivial);
        for l in 0..2 {
            g.add_tail(a, l, 1);
            g.add_tail(b, l + 2, 1);
        }
        let (e, _) = g.add_edge(a, b, 1);
        let mut f = contract(&g, &[e]);
        f.target.vertices[0].genus = 5;
        assert_eq!(f.violations(), vec![Violation::FiberGenusMismatch { vertex: 0 }]);
    }
}
