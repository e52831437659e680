//! Machine verification of the local-rule results: the fits/forcing engine,
//! forced neighborhoods, and the checks built on supertile enumeration.

pub mod fits;
pub mod lemma;
pub mod report;
pub mod theorems;

pub use fits::{
    enumerate_fits, force, refute, FitIndex, ForceBudget, ForceResult, ForceStatus, PlacedStar,
    Refutation, TraceStep,
};
