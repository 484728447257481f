//! Scoring glyph designs against twelve criteria.
//!
//! Criterion inputs are turned into 5-level scores ([`criteria`]), averaged and
//! weighted into a design score ([`aggregation`]), rendered ([`report`]) and
//! stored as score-sheet documents ([`io`]). [`invariance`] produces the
//! scaled and recoloured test sheets the geometry and colorimetry criteria use.

pub mod aggregation;
pub mod criteria;
pub mod error;
pub mod invariance;
pub mod io;
pub mod model;
pub mod rational;
pub mod report;

pub use aggregation::{
    aggregate_type_a, compare_designs, merge_sheets, weighted_average, MergePolicy, Ranking,
};
pub use error::{Error, ErrorKind, Result};
pub use model::*;
pub use rational::Rational;
