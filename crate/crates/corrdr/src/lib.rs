//! Exact arithmetic for the combinatorial core of correlated double
//! ramification cycles on abelian targets.
//!
//! The crate is organized bottom-up:
//!
//! * [`exact`] — arbitrary-precision rationals, truncated multivariate
//!   polynomials, Laurent polynomials in `q^(1/2)`, bivariate power series,
//!   and exact Lagrange interpolation;
//! * [`graphs`] — decorated stable graphs, enumeration, contraction,
//!   automorphisms, cycle bases, and edge subdivision;
//! * [`abelian`] — subgroups of `(Z/δ)^(2q)`, the torsion Weil pairing,
//!   orthogonals, the subgroup lattice with its Möbius function, and
//!   covering degrees of twisted diagonals;
//! * [`tropical`] — δ-torsion divisor classes on subdivided graphs and the
//!   piecewise linear functions trivializing their δ-th powers;
//! * [`monodromy`] — graphs decorated with a torsion subgroup and a
//!   monodromy pairing, their contractions and strata enumeration;
//! * [`pixton`] — r-weighting sums, polynomial constant terms, cone
//!   functions, and assembly of the piecewise polynomial classes;
//! * [`elliptic`] — closed-form correlated invariants for elliptic targets
//!   and the q-series identity connecting them;
//! * [`verify`] — the runnable verification suites behind `corrdr verify`.

pub mod abelian;
pub mod elliptic;
pub mod error;
pub mod exact;
pub mod graphs;
pub mod monodromy;
pub mod pixton;
pub mod tropical;
pub mod verify;

pub use error::Error;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
