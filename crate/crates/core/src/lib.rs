//! Executable predimension calculus and collapsed amalgamation.
//!
//! The crate works with finite *colored structures*: finite sets of points
//! in a computable pregeometry, each painted black or white. On these it
//! provides
//!
//! * the predimension `δ(A) = p·rank(A) − #black(A)` and its relative form,
//!   self-sufficiency and the self-sufficient closure ([`colored`]);
//! * decomposition of self-sufficient extensions into minimal steps and
//!   their classification ([`extensions`]);
//! * code templates, generic realizations and pseudo-Morley sequences
//!   ([`codes`]);
//! * the μ bound and membership in the collapsed class ([`collapse`]);
//! * free amalgamation and amalgamation with internal copies, and a seeded
//!   builder for finite approximations of rich structures ([`amalgam`]);
//! * the d-rank, type comparison, axiom checks and the sum-of-blacks
//!   example ([`ranks`]);
//! * seeded generators of small structures for tests ([`samples`]).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod amalgam;
pub mod arith;
pub mod codes;
pub mod collapse;
pub mod colored;
pub mod error;
pub mod extensions;
mod partition;
pub mod pregeometry;
pub mod ranks;
pub mod samples;
mod subsets;

pub use error::{Error, Result};
pub use pregeometry::{GeometryKind, GeometryPoint, Payload, PointId, RankMode};
