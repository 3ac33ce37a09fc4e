//! Linearly ordered fields used as metric values.

use std::cmp::Ordering;
use std::fmt::Debug;

use num_traits::{One, Signed, Zero};

use crate::laurent::{LaurentSeries, PrecisionBudget, SeriesError, Sign};
use crate::rational::{self, Rational};

pub trait OrderedField: Clone + Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(value: Rational) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn scaled(&self, factor: &Rational) -> Self;
    fn sign(&self, budget: &PrecisionBudget) -> Result<Sign, SeriesError>;
    /// Human-readable form materialized to the budget horizon.
    fn render(&self, budget: &PrecisionBudget) -> String;

    fn negated(&self) -> Self {
        self.scaled(&-<Rational as One>::one())
    }

    fn half(&self) -> Self {
        self.scaled(&rational::rat(1, 2))
    }

    fn compare(&self, other: &Self, budget: &PrecisionBudget) -> Result<Ordering, SeriesError> {
        Ok(match self.minus(other).sign(budget)? {
            Sign::Negative => Ordering::Less,
            Sign::Zero => Ordering::Equal,
            Sign::Positive => Ordering::Greater,
        })
    }

    fn abs(&self, budget: &PrecisionBudget) -> Result<Self, SeriesError> {
        Ok(if self.sign(budget)? == Sign::Negative {
            self.negated()
        } else {
            self.clone()
        })
    }

    /// Larger value; ties keep `self`.
    fn max_of(&self, other: &Self, budget: &PrecisionBudget) -> Result<Self, SeriesError> {
        Ok(if self.compare(other, budget)? == Ordering::Less {
            other.clone()
        } else {
            self.clone()
        })
    }
}

impl OrderedField for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(value: Rational) -> Self {
        value
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn scaled(&self, factor: &Rational) -> Self {
        self * factor
    }
    fn sign(&self, _budget: &PrecisionBudget) -> Result<Sign, SeriesError> {
        Ok(if self.is_zero() {
            Sign::Zero
        } else if self.is_positive() {
            Sign::Positive
        } else {
            Sign::Negative
        })
    }
    fn render(&self, _budget: &PrecisionBudget) -> String {
        rational::format_rational(self)
    }
}

impl OrderedField for LaurentSeries {
    fn zero() -> Self {
        LaurentSeries::zero()
    }
    fn one() -> Self {
        LaurentSeries::one()
    }
    fn from_rational(value: Rational) -> Self {
        LaurentSeries::constant(value)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn scaled(&self, factor: &Rational) -> Self {
        self.scale(factor)
    }
    fn sign(&self, budget: &PrecisionBudget) -> Result<Sign, SeriesError> {
        LaurentSeries::sign(self, budget)
    }
    fn render(&self, budget: &PrecisionBudget) -> String {
        self.display(budget.horizon).to_string()
    }
}
