//! Deformed Box sets, deformed Stanley–Reisner cohomology, deformed
//! Grothendieck-ring spectra and Gamma-series solutions of the
//! better-behaved GKZ system for simplicial stacky fans.
//!
//! All combinatorial data is computed exactly; floating point enters only
//! through the evaluation of Gamma series and the numerical rank of their
//! solution matrix.

pub mod boxes;
pub mod cli;
pub mod error;
pub mod exact;
pub mod fan;
pub mod fixtures;
pub mod gkz;
pub mod io;
pub mod kring;
pub mod quotient;
pub mod triangulate;

pub use error::{Error, Result};
pub use fan::{ConeRef, RealView, StackyFan, ValidationReport};
