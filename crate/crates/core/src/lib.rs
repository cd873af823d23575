//! Exact computation of degree-0 Poisson homology for the invariant rings of
//! the Weyl groups B_n and D_n acting on `ℂ[x, y]`.
//!
//! The pipeline: build invariant highest-weight-0 candidates from pfaffian
//! words ([`sl2`]), push them through the shifted operator
//! `E_n(P) = R_n((z·y − t·x) P(x + z, y + t))` ([`beg`]), and read off the
//! nullspace with exact rational elimination ([`linalg`]). [`graph`] renders
//! words as multigraphs and assembles catalogs of solutions.

pub mod beg;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod poly;
pub mod sl2;
pub mod weyl;

pub use error::{Error, Result};
pub use poly::{Block, Monomial, Polynomial, Rational, VarId, MAX_RANK};
pub use weyl::{Family, SignedPermutation, WeylGroup};
