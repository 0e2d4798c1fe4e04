pub mod eta;
pub mod graph;
pub mod hurwitz;
pub mod integrator;
pub mod oracle;
pub mod query;
pub mod rational;
pub mod semigroup;
pub mod series;
pub mod strata;

pub use query::BracketQuery;
pub use rational::Rational;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub struct Introduction;
    #[doc = include_str!("../../../book/src/brackets.md")]
    pub struct Brackets;
    #[doc = include_str!("../../../book/src/graphs.md")]
    pub struct Graphs;
    #[doc = include_str!("../../../book/src/hurwitz.md")]
    pub struct Hurwitz;
    #[doc = include_str!("../../../book/src/labels.md")]
    pub struct Labels;
    #[doc = include_str!("../../../book/src/terms.md")]
    pub struct Terms;
    #[doc = include_str!("../../../book/src/integration.md")]
    pub struct Integration;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
    #[doc = include_str!("../../../book/src/json.md")]
    pub struct Json;
}
