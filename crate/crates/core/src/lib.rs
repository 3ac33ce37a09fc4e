//! Beta-spaces over formal Laurent series.
//!
//! The crate is organized bottom-up:
//!
//! - [`laurent`]: exact Laurent-series arithmetic, order, valuation, metric
//!   and Cauchy limits.
//! - [`field`]: the ordered-field interface shared by rationals and series.
//! - [`beta`]: the beta-space abstraction, swing machinery, sequence
//!   certificates and exhaustive checks on finite carriers.
//! - [`uniformity`]: the bridge between symmetric, intersection-closed
//!   beta-spaces and uniform spaces on finite carriers.
//! - [`level`]: level sets, contraction certificates and the level-descent
//!   fixed-point solver.
//! - [`props`]: seeded property suites over all of the above.

pub mod beta;
pub mod field;
pub mod laurent;
pub mod level;
pub mod props;
pub mod rational;
pub mod sample;
pub mod uniformity;

pub use laurent::{LaurentSeries, PrecisionBudget, SeriesError, SeriesVector, Sign};
pub use rational::Rational;
