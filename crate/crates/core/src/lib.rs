//! Decide quasihomogeneity of algebroid curves given parametrically.
//!
//! A one-dimensional complete local algebroid curve over the rationals is
//! handed to this crate as a parametrization
//! `R = k[[x_1(t), ..., x_n(t)]] ⊆ k[[t]]`, each generator an exact
//! polynomial in `t`. The crate computes the value semigroup, standard bases,
//! and fractional-ideal data of `R`, and decides whether `R` is
//! quasihomogeneous (isomorphic to a numerical-semigroup ring) two ways:
//!
//! * a sufficient *valuation criterion* on the orders of the generators'
//!   unit parts, which when it fires also produces a verified change of
//!   uniformizer exhibiting `R` as a monomial ring, and
//! * an exact *trace criterion* comparing the valuation of the trace ideal of
//!   the derivative module with the valuation of the maximal ideal.
//!
//! Everything is computed over exact rationals with explicit truncation
//! windows; no floating point is involved anywhere.

pub mod analysis;
pub mod cli;
pub mod ideal;
pub mod parse;
pub mod report;
pub mod oracle;
pub mod ring;
pub mod series;

pub use series::{Rat, SeriesError, TruncatedSeries, Valuation};
