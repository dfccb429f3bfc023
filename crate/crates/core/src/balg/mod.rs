//! Boolean algebras presented by generators and relations, realised through
//! their Stone spaces.

mod calg;
mod element;
mod norm;
mod presentation;
mod scenario;
mod solver;

pub use calg::{generator_nonzero, is_c_algebra, nice_property, zero_generators, CAlgebraReport, Witness};
pub use element::{Element, ElementAlgebra};
pub use norm::{dichotomy_check, norm_simple, norm_with, Dichotomy, SimpleFunction};
pub use presentation::{Assignment, Presentation};
pub use scenario::{scenario_bounds, EmbeddingScenario, ScenarioReport};
pub use solver::{projection, stone_points, Backend, Budget, Solver};

use thiserror::Error;

use crate::text::ParseError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BalgError {
    #[error("{gens} generators exceed the solver budget of {limit}")]
    TooLarge { gens: usize, limit: usize },
    #[error("generator {gen} is not in a presentation with {gens} generators")]
    UnknownGenerator { gen: usize, gens: usize },
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("bad term `{0}`")]
    BadTerm(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
