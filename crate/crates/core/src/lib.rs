//! Decision procedures for simple closed curves on the bridge sphere of a
//! two-bridge link, together with numerical cross-checks on the associated
//! character variety.
//!
//! The exact layer (`farey`, `orbit`, `words`, `sseq`, `smallcancel`,
//! `decide`) works over arbitrary-precision rationals and answers
//! null-homotopy, homotopy, peripherality and primitivity questions for the
//! curves indexed by slopes. The numerical layer (`riley`) constructs a
//! parabolic PSL(2,C) representation from a one-variable matrix relator
//! polynomial and verifies identities (boundary series, cusp shape) that the
//! exact layer predicts.

pub mod cli;
pub mod config;
pub mod decide;
pub mod farey;
pub mod orbit;
pub mod riley;
pub mod smallcancel;
pub mod sseq;
pub mod words;

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid slope: {0}")]
    InvalidSlope(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("iteration limit exceeded in {0}")]
    IterationLimit(&'static str),
    #[error("root finding failed: {0}")]
    RootFinding(String),
    #[error("no admissible representation root: {0}")]
    RootSelection(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
