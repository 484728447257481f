//! Level derivation for the twelve criteria.

pub mod derive;
pub mod importance;
pub mod kop;
pub mod levels;
pub mod separability;

pub use derive::{derive, Derivation, DeriveContext};
