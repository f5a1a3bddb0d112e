//! Structural controllability toolkit for networked relative-coupling
//! systems: identical linear subsystems coupled through differences of
//! neighbor outputs over a weighted digraph.
//!
//! The crate answers one question — does there exist an assignment of
//! interaction weights making the lumped network controllable? — and
//! backs every verdict with a randomized numerical oracle.

pub mod analysis;
pub mod cli;
pub mod design;
pub mod graph;
pub mod linalg;
pub mod model;
pub mod verify;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("fashion mismatch: {0}")]
    InvalidFashion(String),

    #[error("graph is not globally input-reachable; unreachable vertices: {unreachable:?}")]
    NotInputReachable { unreachable: Vec<usize> },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("model is not structurally controllable: {0}")]
    NotStructurallyControllable(String),

    #[error("weight design failed: {0}")]
    DesignFailure(String),

    #[error("model parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
