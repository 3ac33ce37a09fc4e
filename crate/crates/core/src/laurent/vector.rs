use std::fmt;

use super::{metric, LaurentSeries, PrecisionBudget, SeriesError};

/// A point of the n-fold product of Laurent series.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesVector {
    components: Vec<LaurentSeries>,
}

impl SeriesVector {
    pub fn new(components: Vec<LaurentSeries>) -> Self {
        assert!(
            !components.is_empty(),
            "series vectors have arity at least 1"
        );
        Self { components }
    }

    /// The one-component vector holding `s`.
    pub fn scalar(s: LaurentSeries) -> Self {
        Self::new(vec![s])
    }

    pub fn zeros(arity: usize) -> Self {
        Self::new(vec![LaurentSeries::zero(); arity])
    }

    pub fn arity(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[LaurentSeries] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &LaurentSeries {
        &self.components[j]
    }

    pub fn map(&self, f: impl Fn(&LaurentSeries) -> LaurentSeries) -> Self {
        Self::new(self.components.iter().map(f).collect())
    }

    pub fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&LaurentSeries, &LaurentSeries) -> LaurentSeries,
    ) -> Result<Self, SeriesError> {
        self.check_arity(other)?;
        Ok(Self::new(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| f(a, b))
                .collect(),
        ))
    }

    fn check_arity(&self, other: &Self) -> Result<(), SeriesError> {
        if self.arity() != other.arity() {
            return Err(SeriesError::ArityMismatch {
                left: self.arity(),
                right: other.arity(),
            });
        }
        Ok(())
    }

    pub fn truncate(&self, max_exponent: i64) -> Self {
        self.map(|c| c.truncate(max_exponent))
    }

    pub fn agrees_to(&self, other: &Self, horizon: i64) -> bool {
        self.arity() == other.arity()
            && self
                .components
                .iter()
                .zip(&other.components)
                .all(|(a, b)| a.agrees_to(b, horizon))
    }

    pub fn display(&self, horizon: i64) -> String {
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|c| c.display(horizon).to_string())
            .collect();
        format!("[{}]", parts.join(", "))
    }
}

impl fmt::Display for SeriesVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(PrecisionBudget::default().horizon))
    }
}

/// `max_j |b_j - a_j|` under the field order.
pub fn sup_metric(
    a: &SeriesVector,
    b: &SeriesVector,
    budget: &PrecisionBudget,
) -> Result<LaurentSeries, SeriesError> {
    a.check_arity(b)?;
    let mut best = LaurentSeries::zero();
    for (x, y) in a.components.iter().zip(&b.components) {
        let d = metric(x, y, budget)?;
        best = best.max(&d, budget)?;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn sup_metric_examples() {
        let b = PrecisionBudget::default();
        let zero = SeriesVector::zeros(2);
        let v = SeriesVector::new(vec![LaurentSeries::x(), LaurentSeries::monomial(int(1), 2)]);
        assert_eq!(sup_metric(&zero, &v, &b).unwrap(), LaurentSeries::x());
        assert!(sup_metric(&v, &v, &b).unwrap().is_provably_zero());
        let e1 = SeriesVector::new(vec![LaurentSeries::one(), LaurentSeries::zero()]);
        let e2 = SeriesVector::new(vec![LaurentSeries::zero(), LaurentSeries::one()]);
        assert_eq!(sup_metric(&e1, &e2, &b).unwrap(), LaurentSeries::one());
    }

    #[test]
    fn arity_mismatch() {
        let b = PrecisionBudget::default();
        let err = sup_metric(&SeriesVector::zeros(2), &SeriesVector::zeros(3), &b).unwrap_err();
        assert_eq!(err, SeriesError::ArityMismatch { left: 2, right: 3 });
    }
}
