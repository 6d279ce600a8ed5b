//! Executable semantics for the pure pattern calculus and its refinement
//! with explicit matching.

pub mod em;
pub mod free;
pub mod gen;
pub mod measure;
pub mod name;
pub mod outcome;
pub mod parallel;
pub mod partial;
pub mod ppc;
pub mod strategy;
pub mod subst;
pub mod suites;
pub mod syntax;
pub mod term;

pub use name::Name;
pub use syntax::{parse, parse_with, ParseError};
pub use term::{Bottom, DecidedMatch, Path, Record, Term};
