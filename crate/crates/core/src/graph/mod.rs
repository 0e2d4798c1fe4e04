//! Labelled graphs, contractions and coverings.
//!
//! A [`TwistedGraph`] is a set of vertices carrying genus and mark, plus
//! half-edges carrying multiplicities, glued by an involution. Tails are the
//! fixed half-edges. A [`CoveringGraph`] maps one twisted graph onto another
//! compatibly with the involutions, and decomposes into one
//! [`CoveringDatum`] per target vertex with edge germs treated as points.

mod canon;
mod contraction;
mod covering;
mod symmetry;
mod twisted;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use contraction::{contract, Contraction, HalfEdgeImage};
pub use covering::{
    induced_covering_contraction, riemann_hurwitz_genus, CoveringContraction, CoveringDatum,
    CoveringGraph, LocalPoint, Sheet,
};
pub use symmetry::{
    contraction_automorphisms, contraction_norm, covering_automorphisms,
    covering_canonical_form, covering_canonical_form_and_automorphisms,
    covering_contraction_automorphisms, covering_norm, graph_automorphisms,
    graph_canonical_form, local_automorphisms, Fixing, GraphCategory, NormValue,
};
pub use twisted::{HalfEdge, TwistedGraph, TwistedVertex, Vertex};

/// A failed structural axiom. Violations are reported as data.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "axiom")]
pub enum Violation {
    Unstable { vertex: usize },
    ZeroMultiplicity { half_edge: usize },
    BadAttachment { half_edge: usize },
    NotAnInvolution { half_edge: usize },
    TailLabelMismatch { half_edge: usize },
    DuplicateTailLabel,
    EdgeMultiplicityMismatch { edge: usize },
    MarkSumMismatch { vertex: usize },
    MultiplicityNotDividing { sheet: usize, point: usize },
    LcmMismatch { point: usize },
    ZeroDegree { sheet: usize },
    DegreeSumMismatch { sheet: usize, point: usize },
    RiemannHurwitz { sheet: usize },
    MalformedCovering,
    NotEquivariant { half_edge: usize },
    TailEdgeMismatch { half_edge: usize },
    EmptyFibre { vertex: usize },
    Local { vertex: usize, inner: Box<Violation> },
    InTarget(Box<Violation>),
    InSource(Box<Violation>),
    ContractionNotSurjective,
    ContractionNotInjective,
    ContractionNotEquivariant { half_edge: usize },
    ContractionLabelChanged { half_edge: usize },
    TailContracted { half_edge: usize },
    FiberDisconnected { vertex: usize },
    FiberGenusMismatch { vertex: usize },
    SquareDoesNotCommute,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            Unstable { vertex } => write!(f, "vertex {vertex} is unstable (2g-2+n <= 0 with zero mark)"),
            ZeroMultiplicity { half_edge } => write!(f, "half-edge {half_edge} has multiplicity 0"),
            BadAttachment { half_edge } => write!(f, "half-edge {half_edge} is attached inconsistently"),
            NotAnInvolution { half_edge } => write!(f, "involution fails at half-edge {half_edge}"),
            TailLabelMismatch { half_edge } => {
                write!(f, "half-edge {half_edge}: tail label and involution disagree")
            }
            DuplicateTailLabel => write!(f, "two tails share a label"),
            EdgeMultiplicityMismatch { edge } => write!(f, "edge {edge} has unequal multiplicities"),
            MarkSumMismatch { vertex } => write!(f, "marks do not add up at vertex {vertex}"),
            MultiplicityNotDividing { sheet, point } => {
                write!(f, "sheet {sheet} point {point}: multiplicity does not divide the target's")
            }
            LcmMismatch { point } => write!(f, "target point {point}: multiplicity is not the lcm of local degrees"),
            ZeroDegree { sheet } => write!(f, "sheet {sheet} has degree 0"),
            DegreeSumMismatch { sheet, point } => {
                write!(f, "sheet {sheet}: local degrees over point {point} do not sum to the sheet degree")
            }
            RiemannHurwitz { sheet } => write!(f, "sheet {sheet} violates Riemann-Hurwitz"),
            MalformedCovering => write!(f, "covering maps have the wrong shape"),
            NotEquivariant { half_edge } => write!(f, "covering map does not commute with the involution at {half_edge}"),
            TailEdgeMismatch { half_edge } => write!(f, "half-edge {half_edge}: tails must map to tails and edges to edges"),
            EmptyFibre { vertex } => write!(f, "no source vertex over target vertex {vertex}"),
            Local { vertex, inner } => write!(f, "at target vertex {vertex}: {inner}"),
            InTarget(inner) => write!(f, "target graph: {inner}"),
            InSource(inner) => write!(f, "source graph: {inner}"),
            ContractionNotSurjective => write!(f, "contraction is not surjective"),
            ContractionNotInjective => write!(f, "contraction is not injective over target half-edges"),
            ContractionNotEquivariant { half_edge } => write!(f, "contraction breaks incidence at half-edge {half_edge}"),
            ContractionLabelChanged { half_edge } => write!(f, "contraction changes the label of half-edge {half_edge}"),
            TailContracted { half_edge } => write!(f, "tail {half_edge} is contracted"),
            FiberDisconnected { vertex } => write!(f, "fibre over vertex {vertex} is disconnected"),
            FiberGenusMismatch { vertex } => write!(f, "fibre over vertex {vertex} has the wrong genus"),
            SquareDoesNotCommute => write!(f, "covering square does not commute"),
        }
    }
}
