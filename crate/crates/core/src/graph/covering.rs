use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::contraction::{contract, Contraction, HalfEdgeImage};
use super::twisted::{de_mark, ser_mark, TwistedGraph, TwistedVertex};
use super::Violation;
use crate::semigroup::{sum_marks, MarkSemigroup, Trivial};

/// A special point of a source sheet in a local covering: it lies over
/// target point `over` and has multiplicity `mult`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LocalPoint {
    pub over: usize,
    pub mult: u32,
}

/// One connected source component of a local covering.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "A: MarkSemigroup")]
pub struct Sheet<A = Trivial> {
    pub genus: u32,
    #[serde(serialize_with = "ser_mark", deserialize_with = "de_mark")]
    pub mark: A,
    pub degree: u32,
    pub points: Vec<LocalPoint>,
}

/// A covering of a single target vertex by a disjoint union of sheets.
/// Edge germs, when the datum comes from a graph, are ordinary points here.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "A: MarkSemigroup")]
pub struct CoveringDatum<A = Trivial> {
    pub target: TwistedVertex<A>,
    pub sheets: Vec<Sheet<A>>,
}

/// Genus forced by Riemann-Hurwitz for a connected sheet of degree `degree`
/// over a base of genus `base_genus`, with local degrees `point_degrees`.
/// `None` when the formula gives a negative or half-integral genus.
pub fn riemann_hurwitz_genus(
    base_genus: u32,
    degree: u32,
    point_degrees: impl IntoIterator<Item = u32>,
) -> Option<u32> {
    let ram: i64 = point_degrees.into_iter().map(|d| d as i64 - 1).sum();
    let twice = 2 * degree as i64 * (base_genus as i64 - 1) + ram + 2;
    (twice >= 0 && twice % 2 == 0).then_some((twice / 2) as u32)
}

impl<A: MarkSemigroup> CoveringDatum<A> {
    pub fn num_points(&self) -> usize {
        self.target.tail_mults.len()
    }

    /// `d(t') = m(p(t')) / m(t')`, or `None` if the multiplicity does not divide.
    pub fn point_degree(&self, p: &LocalPoint) -> Option<u32> {
        let m = *self.target.tail_mults.get(p.over)?;
        (p.mult > 0 && m % p.mult == 0).then(|| m / p.mult)
    }

    pub fn total_degree(&self) -> u32 {
        self.sheets.iter().map(|s| s.degree).sum()
    }

    /// The partition of `sheet.degree` cut out over target point `i`.
    pub fn local_partition(&self, sheet: usize, i: usize) -> Vec<u32> {
        let mut parts: Vec<u32> = self.sheets[sheet]
            .points
            .iter()
            .filter(|p| p.over == i)
            .filter_map(|p| self.point_degree(p))
            .collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        parts
    }

    /// All covering axioms: marks add up, multiplicities divide, the target
    /// multiplicity is the lcm of the local degrees, degrees add up on every
    /// sheet over every point, and Riemann-Hurwitz holds sheet by sheet.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !self.target.is_stable() {
            out.push(Violation::Unstable { vertex: 0 });
        }
        let n = self.num_points();
        if sum_marks(self.sheets.iter().map(|s| s.mark)) != self.target.mark {
            out.push(Violation::MarkSumMismatch { vertex: 0 });
        }
        let mut lcms = vec![1u32; n];
        let mut seen = vec![false; n];
        for (si, sheet) in self.sheets.iter().enumerate() {
            if sheet.degree == 0 {
                out.push(Violation::ZeroDegree { sheet: si });
            }
            let mut sums = vec![0u32; n];
            let mut degrees = Vec::new();
            let mut well_formed = true;
            for (pi, p) in sheet.points.iter().enumerate() {
                if p.over >= n {
                    out.push(Violation::BadAttachment { half_edge: pi });
                    well_formed = false;
                    continue;
                }
                match self.point_degree(p) {
                    Some(d) => {
                        sums[p.over] += d;
                        lcms[p.over] = lcms[p.over].lcm(&d);
                        seen[p.over] = true;
                        degrees.push(d);
                    }
                    None => {
                        out.push(Violation::MultiplicityNotDividing { sheet: si, point: pi });
                        well_formed = false;
                    }
                }
            }
            if !well_formed {
                continue;
            }
            for (i, &s) in sums.iter().enumerate() {
                if s != sheet.degree {
                    out.push(Violation::DegreeSumMismatch { sheet: si, point: i });
                }
            }
            let rh = riemann_hurwitz_genus(self.target.genus, sheet.degree, degrees.iter().copied());
            if rh != Some(sheet.genus) {
                out.push(Violation::RiemannHurwitz { sheet: si });
            }
            if !super::twisted::is_stable(sheet.genus, sheet.points.len(), sheet.mark) {
                out.push(Violation::Unstable { vertex: si });
            }
        }
        for i in 0..n {
            if seen[i] && lcms[i] != self.target.tail_mults[i] {
                out.push(Violation::LcmMismatch { point: i });
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

    /// The same datum as a one-vertex covering graph. Target points become
    /// tails labelled `0..n`; source points get labels `n..`.
    pub fn to_covering_graph(&self) -> CoveringGraph<A> {
        let target = TwistedGraph::from_vertex(&self.target);
        let mut source = TwistedGraph::new();
        let mut half_edge_map = Vec::new();
        let mut vertex_degree = Vec::new();
        let mut label = self.num_points() as u32;
        for sheet in &self.sheets {
            let v = source.add_vertex(sheet.genus, sheet.mark);
            vertex_degree.push(sheet.degree);
            for p in &sheet.points {
                source.add_tail(v, label, p.mult);
                label += 1;
                half_edge_map.push(p.over);
            }
        }
        CoveringGraph {
            target,
            vertex_map: vec![0; source.num_vertices()],
            source,
            half_edge_map,
            vertex_degree,
        }
    }
}

/// A covering `source ↠ target` of twisted graphs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(bound = "A: MarkSemigroup")]
pub struct CoveringGraph<A = Trivial> {
    pub target: TwistedGraph<A>,
    pub source: TwistedGraph<A>,
    pub vertex_map: Vec<usize>,
    pub half_edge_map: Vec<usize>,
    pub vertex_degree: Vec<u32>,
}

impl<A: MarkSemigroup> CoveringGraph<A> {
    /// Local degree of a source half-edge.
    pub fn half_edge_degree(&self, h: usize) -> Option<u32> {
        let m = self.target.half_edges[self.half_edge_map[h]].mult;
        let mm = self.source.half_edges[h].mult;
        (mm > 0 && m.is_multiple_of(mm)).then(|| m / mm)
    }

    pub fn sheets_over(&self, v: usize) -> Vec<usize> {
        (0..self.source.num_vertices()).filter(|&x| self.vertex_map[x] == v).collect()
    }

    /// Source half-edges lying over target half-edge `h`.
    pub fn preimages(&self, h: usize) -> Vec<usize> {
        (0..self.source.half_edges.len()).filter(|&x| self.half_edge_map[x] == h).collect()
    }

    /// Source edges (lower half-edge names) over the target edge `e`.
    pub fn source_edges_over(&self, e: usize) -> Vec<usize> {
        let e = self.target.edge_of(e);
        let mut out: Vec<usize> = (0..self.source.half_edges.len())
            .filter(|&x| {
                !self.source.half_edges[x].is_tail() && self.target.edge_of(self.half_edge_map[x]) == e
            })
            .map(|x| self.source.edge_of(x))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The local covering at target vertex `v`. Target points are the
    /// half-edges at `v` in index order (tails and edge germs alike).
    pub fn local_datum(&self, v: usize) -> CoveringDatum<A> {
        let points = self.target.half_edges_at(v);
        let target = self.target.vertex_label(v);
        let sheets = self
            .sheets_over(v)
            .into_iter()
            .map(|x| Sheet {
                genus: self.source.vertices[x].genus,
                mark: self.source.vertices[x].mark,
                degree: self.vertex_degree[x],
                points: self
                    .source
                    .half_edges_at(x)
                    .into_iter()
                    .map(|h| LocalPoint {
                        over: points.iter().position(|&p| p == self.half_edge_map[h]).unwrap_or(usize::MAX),
                        mult: self.source.half_edges[h].mult,
                    })
                    .collect(),
            })
            .collect();
        CoveringDatum { target, sheets }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        out.extend(self.target.violations().into_iter().map(|v| Violation::InTarget(Box::new(v))));
        out.extend(self.source.violations().into_iter().map(|v| Violation::InSource(Box::new(v))));
        if !out.is_empty() {
            return out;
        }
        let (s, t) = (&self.source, &self.target);
        if self.vertex_map.len() != s.num_vertices()
            || self.vertex_degree.len() != s.num_vertices()
            || self.half_edge_map.len() != s.half_edges.len()
            || self.vertex_map.iter().any(|&v| v >= t.num_vertices())
            || self.half_edge_map.iter().any(|&h| h >= t.half_edges.len())
        {
            out.push(Violation::MalformedCovering);
            return out;
        }
        for (h, he) in s.half_edges.iter().enumerate() {
            let img = self.half_edge_map[h];
            let te = &t.half_edges[img];
            if self.half_edge_map[he.partner] != te.partner {
                out.push(Violation::NotEquivariant { half_edge: h });
            }
            if he.is_tail() != te.is_tail() {
                out.push(Violation::TailEdgeMismatch { half_edge: h });
            }
            if self.vertex_map[he.vertex] != te.vertex {
                out.push(Violation::BadAttachment { half_edge: h });
            }
        }
        for v in 0..t.num_vertices() {
            if self.sheets_over(v).is_empty() {
                out.push(Violation::EmptyFibre { vertex: v });
                continue;
            }
            for inner in self.local_datum(v).violations() {
                out.push(Violation::Local { vertex: v, inner: Box::new(inner) });
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
}

/// A morphism in the category of coverings: compatible contractions of the
/// target and source graphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound = "A: MarkSemigroup")]
pub struct CoveringContraction<A = Trivial> {
    pub source: CoveringGraph<A>,
    pub target: CoveringGraph<A>,
    pub target_map: Contraction<A>,
    pub source_map: Contraction<A>,
}

impl<A: MarkSemigroup> CoveringContraction<A> {
    /// Contracted target edges, named in `self.source.target`.
    pub fn contracted_target_edges(&self) -> &[usize] {
        &self.target_map.contracted
    }

    /// The square `source ↠ target` over the contractions commutes.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = self.target_map.violations();
        out.extend(self.source_map.violations());
        let (big, small) = (&self.source, &self.target);
        for (v, &tv) in big.vertex_map.iter().enumerate() {
            if self.target_map.vertex_map[tv] != small.vertex_map[self.source_map.vertex_map[v]] {
                out.push(Violation::SquareDoesNotCommute);
                return out;
            }
        }
        for (h, &th) in big.half_edge_map.iter().enumerate() {
            let ok = match (self.source_map.half_edge_map[h], self.target_map.half_edge_map[th]) {
                (HalfEdgeImage::Kept(a), HalfEdgeImage::Kept(b)) => small.half_edge_map[a] == b,
                (HalfEdgeImage::Contracted(a), HalfEdgeImage::Contracted(b)) => small.vertex_map[a] == b,
                _ => false,
            };
            if !ok {
                out.push(Violation::SquareDoesNotCommute);
                return out;
            }
        }
        out
    }
}

/// Contracts the target edges `edges` of `rho` together with every source
/// edge lying over them.
pub fn induced_covering_contraction<A: MarkSemigroup>(
    rho: &CoveringGraph<A>,
    edges: &[usize],
) -> CoveringContraction<A> {
    let target_map = contract(&rho.target, edges);
    let mut source_edges = Vec::new();
    for &e in &target_map.contracted {
        source_edges.extend(rho.source_edges_over(e));
    }
    let source_map = contract(&rho.source, &source_edges);

    let ns = source_map.target.num_vertices();
    let mut vertex_map = vec![usize::MAX; ns];
    let mut anchor = vec![usize::MAX; ns];
    for (v, &nv) in source_map.vertex_map.iter().enumerate() {
        if vertex_map[nv] == usize::MAX {
            vertex_map[nv] = target_map.vertex_map[rho.vertex_map[v]];
            anchor[nv] = rho.vertex_map[v];
        }
    }
    let mut vertex_degree = vec![0u32; ns];
    for (v, &nv) in source_map.vertex_map.iter().enumerate() {
        if rho.vertex_map[v] == anchor[nv] {
            vertex_degree[nv] += rho.vertex_degree[v];
        }
    }
    let mut half_edge_map = vec![usize::MAX; source_map.target.half_edges.len()];
    for (h, img) in source_map.half_edge_map.iter().enumerate() {
        if let HalfEdgeImage::Kept(nh) = *img {
            match target_map.half_edge_map[rho.half_edge_map[h]] {
                HalfEdgeImage::Kept(th) => half_edge_map[nh] = th,
                HalfEdgeImage::Contracted(_) => unreachable!("kept source germ over contracted edge"),
            }
        }
    }
    let small = CoveringGraph {
        target: target_map.target.clone(),
        source: source_map.target.clone(),
        vertex_map,
        half_edge_map,
        vertex_degree,
    };
    CoveringContraction { source: rho.clone(), target: small, target_map, source_map }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::Trivial;

    /// One genus-1 sheet of degree 2 over four points of multiplicity 2.
    fn elliptic_datum() -> CoveringDatum {
        CoveringDatum {
            target: TwistedVertex::new(0, vec![2, 2, 2, 2], Trivial),
            sheets: vec![Sheet {
                genus: 1,
                mark: Trivial,
                degree: 2,
                points: (0..4).map(|i| LocalPoint { over: i, mult: 1 }).collect(),
            }],
        }
    }

    #[test]
    fn elliptic_double_cover_is_valid() {
        assert!(elliptic_datum().validate().is_ok());
        assert_eq!(elliptic_datum().total_degree(), 2);
    }

    #[test]
    fn broken_degree_is_caught() {
        let mut d = elliptic_datum();
        d.sheets[0].points[3].mult = 2;
        let v = d.violations();
        assert!(v.contains(&Violation::RiemannHurwitz { sheet: 0 }), "{v:?}");
        assert!(v.contains(&Violation::DegreeSumMismatch { sheet: 0, point: 3 }));
    }

    #[test]
    fn lcm_rule() {
        let mut d = elliptic_datum();
        d.target.tail_mults[0] = 4;
        d.sheets[0].points[0].mult = 2;
        assert!(d.violations().contains(&Violation::LcmMismatch { point: 0 }));
    }

    #[test]
    fn rh_genus() {
        assert_eq!(riemann_hurwitz_genus(0, 2, [2, 2, 2, 2]), Some(1));
        assert_eq!(riemann_hurwitz_genus(0, 2, [2, 2, 2]), None);
        assert_eq!(riemann_hurwitz_genus(0, 1, [1, 1, 1]), Some(0));
        assert_eq!(riemann_hurwitz_genus(0, 3, [1, 1, 1]), None);
    }

    #[test]
    fn datum_graph_round_trip() {
        let d = elliptic_datum();
        let g = d.to_covering_graph();
        assert!(g.validate().is_ok());
        assert_eq!(g.local_datum(0), d);
    }
}
