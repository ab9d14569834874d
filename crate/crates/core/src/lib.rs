//! Linear cellular automata on finitely generated groups.
//!
//! The crate builds automata that have Gardens of Eden but no mutually
//! erasable patterns on non-amenable groups, certifies them with exact
//! finite-field linear algebra, and provides the group-ring tools around
//! them (Ore solutions on free abelian groups, failure witnesses, restriction
//! of scalars).

pub mod ca;
pub mod cli;
pub mod codec;
pub mod eden;
pub mod error;
pub mod exact;
pub mod ff;
pub mod group;
pub mod lemma1;
pub mod ore;
pub mod rng;
pub mod synth;

pub use error::{Error, Result};
