use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::Violation;
use crate::semigroup::{MarkSemigroup, Trivial};

pub(crate) fn ser_mark<A: MarkSemigroup, S: Serializer>(a: &A, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u32(a.code())
}

pub(crate) fn de_mark<'de, A: MarkSemigroup, D: Deserializer<'de>>(d: D) -> Result<A, D::Error> {
    let code = u32::deserialize(d)?;
    A::from_code(code).ok_or_else(|| serde::de::Error::custom(format!("unknown mark code {code}")))
}

/// A single labelled vertex `(g, T, m, a)`: genus, tail multiplicities and
/// mark. With every multiplicity equal to one this is an untwisted label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "A: MarkSemigroup")]
pub struct TwistedVertex<A = Trivial> {
    pub genus: u32,
    pub tail_mults: Vec<u32>,
    #[serde(serialize_with = "ser_mark", deserialize_with = "de_mark")]
    pub mark: A,
}

impl<A: MarkSemigroup> TwistedVertex<A> {
    pub fn new(genus: u32, tail_mults: Vec<u32>, mark: A) -> Self {
        TwistedVertex { genus, tail_mults, mark }
    }

    pub fn is_stable(&self) -> bool {
        is_stable(self.genus, self.tail_mults.len(), self.mark)
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !self.is_stable() {
            out.push(Violation::Unstable { vertex: 0 });
        }
        for (i, &m) in self.tail_mults.iter().enumerate() {
            if m == 0 {
                out.push(Violation::ZeroMultiplicity { half_edge: i });
            }
        }
        out
    }
}

pub(crate) fn is_stable<A: MarkSemigroup>(genus: u32, special: usize, mark: A) -> bool {
    !mark.is_zero() || 2 * genus as i64 - 2 + special as i64 > 0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "A: MarkSemigroup")]
pub struct Vertex<A = Trivial> {
    pub genus: u32,
    #[serde(serialize_with = "ser_mark", deserialize_with = "de_mark")]
    pub mark: A,
}

/// A half-edge. Tails are the fixed points of the involution and carry an
/// external label; the other half-edges pair up into edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HalfEdge {
    pub vertex: usize,
    pub mult: u32,
    pub partner: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail: Option<u32>,
}

impl HalfEdge {
    pub fn is_tail(&self) -> bool {
        self.tail.is_some()
    }
}

/// A possibly disconnected graph of twisted vertices with a half-edge
/// involution. An edge is named by its lower half-edge index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "A: MarkSemigroup")]
pub struct TwistedGraph<A = Trivial> {
    pub vertices: Vec<Vertex<A>>,
    pub half_edges: Vec<HalfEdge>,
}

impl<A: MarkSemigroup> Default for TwistedGraph<A> {
    fn default() -> Self {
        Self::new()
    }
}

impl<A: MarkSemigroup> TwistedGraph<A> {
    pub fn new() -> Self {
        TwistedGraph { vertices: Vec::new(), half_edges: Vec::new() }
    }

    pub fn add_vertex(&mut self, genus: u32, mark: A) -> usize {
        self.vertices.push(Vertex { genus, mark });
        self.vertices.len() - 1
    }

    pub fn add_tail(&mut self, vertex: usize, label: u32, mult: u32) -> usize {
        let h = self.half_edges.len();
        self.half_edges.push(HalfEdge { vertex, mult, partner: h, tail: Some(label) });
        h
    }

    /// Adds an edge and returns its two half-edges; the first one names the edge.
    pub fn add_edge(&mut self, a: usize, b: usize, mult: u32) -> (usize, usize) {
        let h = self.half_edges.len();
        self.half_edges.push(HalfEdge { vertex: a, mult, partner: h + 1, tail: None });
        self.half_edges.push(HalfEdge { vertex: b, mult, partner: h, tail: None });
        (h, h + 1)
    }

    /// A single-vertex graph whose tails are labelled `0..n` in order.
    pub fn from_vertex(v: &TwistedVertex<A>) -> Self {
        let mut g = TwistedGraph::new();
        let x = g.add_vertex(v.genus, v.mark);
        for (i, &m) in v.tail_mults.iter().enumerate() {
            g.add_tail(x, i as u32, m);
        }
        g
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Edges as `(h, σ(h))` with `h < σ(h)`, ordered by `h`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.half_edges
            .iter()
            .enumerate()
            .filter(|(i, h)| !h.is_tail() && *i < h.partner)
            .map(|(i, h)| (i, h.partner))
            .collect()
    }

    pub fn num_edges(&self) -> usize {
        self.half_edges.iter().enumerate().filter(|(i, h)| !h.is_tail() && *i < h.partner).count()
    }

    /// Tail half-edge indices.
    pub fn tails(&self) -> Vec<usize> {
        (0..self.half_edges.len()).filter(|&i| self.half_edges[i].is_tail()).collect()
    }

    pub fn tail_by_label(&self, label: u32) -> Option<usize> {
        self.half_edges.iter().position(|h| h.tail == Some(label))
    }

    /// Lower half-edge of the edge containing `h`.
    pub fn edge_of(&self, h: usize) -> usize {
        h.min(self.half_edges[h].partner)
    }

    pub fn half_edges_at(&self, v: usize) -> Vec<usize> {
        (0..self.half_edges.len()).filter(|&i| self.half_edges[i].vertex == v).collect()
    }

    pub fn valence(&self, v: usize) -> usize {
        self.half_edges.iter().filter(|h| h.vertex == v).count()
    }

    /// Connected component index of every vertex, numbered by first vertex.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.vertices.len());
        for (a, b) in self.edges() {
            uf.union(self.half_edges[a].vertex, self.half_edges[b].vertex);
        }
        uf.labels()
    }

    pub fn num_components(&self) -> usize {
        self.component_labels().iter().max().map_or(0, |m| m + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() == 1
    }

    /// `Σ g(v) + #E - #V + #components`; the genus when connected.
    pub fn genus(&self) -> i64 {
        let gsum: i64 = self.vertices.iter().map(|v| v.genus as i64).sum();
        gsum + self.num_edges() as i64 - self.vertices.len() as i64 + self.num_components() as i64
    }

    pub fn total_mark(&self) -> A {
        crate::semigroup::sum_marks(self.vertices.iter().map(|v| v.mark))
    }

    pub fn vertex_label(&self, v: usize) -> TwistedVertex<A> {
        let vx = &self.vertices[v];
        TwistedVertex {
            genus: vx.genus,
            tail_mults: self.half_edges_at(v).iter().map(|&h| self.half_edges[h].mult).collect(),
            mark: vx.mark,
        }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let nv = self.vertices.len();
        let nh = self.half_edges.len();
        let mut labels = Vec::new();
        for (i, h) in self.half_edges.iter().enumerate() {
            if h.vertex >= nv {
                out.push(Violation::BadAttachment { half_edge: i });
            }
            if h.mult == 0 {
                out.push(Violation::ZeroMultiplicity { half_edge: i });
            }
            if h.partner >= nh || self.half_edges[h.partner].partner != i {
                out.push(Violation::NotAnInvolution { half_edge: i });
                continue;
            }
            match (h.partner == i, h.tail) {
                (true, Some(l)) => labels.push(l),
                (true, None) | (false, Some(_)) => {
                    out.push(Violation::TailLabelMismatch { half_edge: i })
                }
                (false, None) => {
                    if self.half_edges[h.partner].mult != h.mult && i < h.partner {
                        out.push(Violation::EdgeMultiplicityMismatch { edge: i });
                    }
                }
            }
        }
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            out.push(Violation::DuplicateTailLabel);
        }
        if out.iter().any(|v| matches!(v, Violation::BadAttachment { .. })) {
            return out;
        }
        for (v, vx) in self.vertices.iter().enumerate() {
            if !is_stable(vx.genus, self.valence(v), vx.mark) {
                out.push(Violation::Unstable { vertex: v });
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(v)
        }
    }

    /// Applies a vertex relabelling and half-edge relabelling, producing an
    /// isomorphic copy. `vperm[old] = new`, `hperm[old] = new`.
    pub fn relabeled(&self, vperm: &[usize], hperm: &[usize]) -> Self {
        let mut vertices = self.vertices.clone();
        for (old, &new) in vperm.iter().enumerate() {
            vertices[new] = self.vertices[old];
        }
        let mut half_edges = self.half_edges.clone();
        for (old, &new) in hperm.iter().enumerate() {
            let h = self.half_edges[old];
            half_edges[new] = HalfEdge {
                vertex: vperm[h.vertex],
                mult: h.mult,
                partner: hperm[h.partner],
                tail: h.tail,
            };
        }
        TwistedGraph { vertices, half_edges }
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    /// Dense labels in order of first appearance.
    pub(crate) fn labels(&mut self) -> Vec<usize> {
        let n = self.parent.len();
        let mut map = vec![usize::MAX; n];
        let mut next = 0;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let r = self.find(i);
            if map[r] == usize::MAX {
                map[r] = next;
                next += 1;
            }
            out.push(map[r]);
        }
        out
    }
}
