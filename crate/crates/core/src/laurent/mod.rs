//! Formal Laurent series over the rationals: the ordered, nonarchimedean
//! field in which `x` is a positive infinitesimal.

mod limit;
mod parse;
mod series;
mod vector;

use thiserror::Error;

pub use limit::{
    cauchy_limit, check_cauchy_precondition, sequence, ExponentModulus, LimitCheck, LimitError,
    SeriesSequence,
};
pub use parse::{eval_expression, parse_series};
pub use series::{metric, CoefficientRule, LaurentSeries, PrecisionBudget, SeriesDisplay, Sign};
pub use vector::{sup_metric, SeriesVector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("zero denominator at position {position}")]
    ZeroDenominator { position: usize },
    #[error("undecidable: every coefficient from x^{from} to x^{to} vanishes")]
    Undecidable { from: i64, to: i64 },
    #[error("division by a series that is zero{}", if *.provable { "" } else { " up to the search depth" })]
    ZeroDivisor { provable: bool },
    #[error("the zero series has no valuation")]
    ZeroValuation,
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
}
