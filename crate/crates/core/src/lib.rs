//! Algebraic-geometric secret sharing over prime fields.
//!
//! The crate builds Massey-style linear secret sharing schemes from the
//! evaluation code `C_L(D, mQ)` and its dual on elliptic curves and
//! odd-degree hyperelliptic curves, decides whether a set of players is
//! qualified by several independent criteria, and measures how the
//! quasi-threshold gray zone behaves as the field grows.
//!
//! Module map:
//!
//! * [`field`]: prime fields, elements, and exact linear algebra.
//! * [`curve`]: curve models, point enumeration, the elliptic group law and
//!   Riemann–Roch monomial bases at the point at infinity.
//! * [`group`]: finite abelian groups, characters, exact subset-sum counts
//!   and the sieve combinatorics behind the deviation bound.
//! * [`scheme`]: scheme construction, share/reconstruct, qualified-set
//!   oracles.
//! * [`lab`]: exact and Monte Carlo proportions, theoretical bounds and
//!   reproducible parameter sweeps.
//! * [`config`]: the flat `key = value` experiment configuration format.

pub mod config;
pub mod curve;
pub mod error;
pub mod field;
pub mod group;
pub mod lab;
pub mod scheme;

mod bigmath;

pub use error::{Error, Result};
