//! Exact linear algebra for crossingless-connection bases on the disc, the
//! annulus, and the Möbius band.
//!
//! The crate enumerates the diagram bases, evaluates the bilinear pairings
//! obtained by gluing two diagrams along their boundary (reading off each
//! glued loop as a curve class on the resulting surface), assembles the Gram
//! matrices, and computes their determinants exactly by fraction-free
//! elimination.  Closed product formulas for those determinants are built
//! from Chebyshev polynomials and checked against the computed values as
//! exact polynomial identities.

pub mod diagrams;
pub mod formulas;
pub mod gram;
pub mod pairing;
pub mod polyring;
pub mod report;
pub mod symmetry;
pub mod wenzl;

pub use diagrams::{AnnularDiagram, DiscDiagram, MobiusDiagram, SurfaceKind};
pub use gram::{GramKind, GramMatrix, Limits};
pub use polyring::{Polynomial, RationalFunction, Variable};
pub use report::{Status, VerificationReport};
