//! Exact coefficient arithmetic.
//!
//! Everything downstream (weighting sums, tropical data, invariants) works
//! over ℚ with no floating point anywhere. The submodules provide the
//! rational scalar type, truncated multivariate polynomials over a shared
//! symbol table, Laurent polynomials in half-integer powers of `q`,
//! bivariate truncated series in `(u, y)`, and exact Lagrange interpolation
//! used to extract polynomial constant terms in `r`.

mod biseries;
mod interp;
mod laurent;
mod poly;
pub mod rational;

pub use biseries::BiSeries;
#[cfg(test)]
pub(crate) use biseries::sin_series;
pub use interp::{eval_at_r, interpolate, interpolate_checked};
pub use laurent::LaurentQ;
pub use poly::{Monomial, TruncPoly, VarTable};
pub use rational::{rat, rat_int, Rat};
