//! Exact (co)homological algebra on finite partially ordered spaces.
//!
//! A finite poset carries a T0 topology (open = upward closed), and a sheaf
//! of abelian groups on it is the same thing as a functor assigning a stalk
//! to each element and a restriction map to each cover relation. This crate
//! computes, entirely over the integers:
//!
//! * global, reduced and local sheaf (co)homology via chain-indexed models,
//! * derived homs `RHom(F, G)` both as graded groups and as sheaf complexes,
//! * explicit dualizing complexes and canonical complexes, with verdicts on
//!   when a space admits one,
//! * Cohen-Macaulay certificates for spaces, sheaves and closed subspaces,
//! * simplicial complexes, links and the Reisner vanishing criterion as an
//!   independent cross-check of the poset pipeline.
//!
//! All matrix arithmetic is arbitrary-precision ([`zlinalg`]); every reported
//! group is exact, never a numerical approximation.

// Index loops over order matrices and DP tables read better than iterator
// chains here; the indices are genuinely positional.
#![allow(clippy::needless_range_loop)]

pub mod cm;
pub mod cohomology;
pub mod duality;
pub mod family;
pub mod io;
pub mod poset;
pub mod sheaf;
pub mod simplicial;
pub mod zlinalg;

use thiserror::Error;

/// Errors surfaced by constructors and validators.
///
/// Dimension mismatches in low-level matrix arithmetic are programming
/// errors and panic instead; `Error` is reserved for data-level problems
/// that well-formed code can legitimately run into.
#[derive(Debug, Error)]
pub enum Error {
    /// A would-be complex has a nonzero composite of consecutive maps.
    #[error("not a complex: d∘d ≠ 0 between degrees {deg} and {}", deg + 2)]
    NotAComplex { deg: i64 },

    /// Differential shapes do not match the declared ranks.
    #[error("bad complex data at degree {deg}: {detail}")]
    BadComplex { deg: i64, detail: String },

    /// The relation data fed to a poset constructor is not a partial order.
    #[error("not a partial order: {0}")]
    NotAPartialOrder(String),

    /// A label was referenced that the space does not contain.
    #[error("unknown element {0:?}")]
    UnknownElement(String),

    /// Duplicate label in a poset or complex description.
    #[error("duplicate element {0:?}")]
    DuplicateElement(String),

    /// Sheaf data that fails functoriality or shape validation.
    #[error("invalid sheaf: {0}")]
    InvalidSheaf(String),

    /// A subset lacked the openness/closedness the operation requires.
    #[error("subset is not {expected}: {detail}")]
    BadSubset { expected: &'static str, detail: String },

    /// The space fails a precondition (locality, dualizability, ...).
    #[error("{0}")]
    Unsupported(String),

    /// Malformed textual or JSON input.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
