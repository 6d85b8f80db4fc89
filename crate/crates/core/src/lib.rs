//! Finite permutation groups, their canonical series, and executable checks of
//! bounds on the non-p-soluble length in terms of commutator-word exponents.

pub mod chain;
pub mod cli;
pub mod constructions;
pub mod elements;
pub mod error;
pub mod factored;
pub mod group;
pub mod hom;
pub mod io;
pub mod lengths;
pub mod mode;
pub mod perm;
pub mod radicals;
pub mod report;
pub mod sylow;
pub mod verifier;
pub mod words;

pub use error::{Error, Result};
pub use factored::FactoredInteger;
pub use group::PermGroup;
pub use perm::Permutation;
