//! Rigorous search and classification of normalized central configurations
//! (nCCs) of the Newtonian n-body problem in dimensions 2 and 3.
//!
//! The pipeline: [`interval`] provides outward-rounded interval arithmetic,
//! [`model`] the central-configuration equations and their reduced systems,
//! [`degeneracy`] the detection and repair of reduced-system degeneracies,
//! [`search`] the branch-and-prune loop with Krawczyk certification, and
//! [`classify`] the merge of certified solutions into equivalence classes
//! under rotation together with shape labels.


pub mod classify;
pub mod degeneracy;
pub mod interval;
pub mod job;

pub mod model;
pub mod search;


/// Errors surfaced by the rigorous kernel.
///
/// `CollisionPossible` is not a failure: it tells the search that the box
/// under examination may contain a collision and must be shrunk or pruned
/// by other means before any enclosure can be evaluated.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("domain error: operation undefined on the given interval")]
    Domain,
    #[error("box may contain a collision between two bodies")]
    CollisionPossible,
    #[error("midpoint matrix is numerically singular")]
    SingularMidpoint,
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
    #[error("no degeneracy repair available for this box")]
    NoRepairAvailable,
}

pub type Result<T> = std::result::Result<T, Error>;
