//! Quivers with potentials, their mutation classes and invariants.

pub mod canon;
pub mod error;
pub mod explorer;
pub mod generators;
pub mod gentle;
pub mod jacobian;
pub mod linalg;
pub mod potential;
pub mod quiver;
pub mod verify;

pub use error::{Error, Result};
pub use potential::{Coeff, KeyMode, Potential, ReductionConfig, QP};
pub use quiver::{Arrow, ExchangeMatrix, Quiver};
