//! Swing sequences and the radial order.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{cmp_or_err, BetaError, BetaSpace};

/// Radii `(r_1, r_2, …)` with each `r_{k+1}` a swing value of `r_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SwingSequence<R> {
    values: Vec<R>,
}

impl<R> SwingSequence<R> {
    pub fn values(&self) -> &[R] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `r_n`, 1-based.
    pub fn term(&self, n: usize) -> &R {
        &self.values[n - 1]
    }

    pub fn into_values(self) -> Vec<R> {
        self.values
    }
}

/// Validates `values` as a swing sequence and wraps it.
pub fn validate_swing_sequence<S: BetaSpace>(
    space: &S,
    values: Vec<S::Radius>,
) -> Result<SwingSequence<S::Radius>, BetaError> {
    if values.is_empty() {
        return Err(BetaError::Precondition(
            "a swing sequence has at least one term".into(),
        ));
    }
    for (i, pair) in values.windows(2).enumerate() {
        if !space.is_swing_value(&pair[0], &pair[1])? {
            return Err(BetaError::SwingRuleFailure { step: i + 2 });
        }
    }
    Ok(SwingSequence { values })
}

/// `(r, swing(r), swing²(r), …)` of the given length, each step validated.
pub fn swing_sequence<S: BetaSpace>(
    space: &S,
    r: &S::Radius,
    length: usize,
) -> Result<SwingSequence<S::Radius>, BetaError> {
    if length == 0 {
        return Err(BetaError::Precondition(
            "a swing sequence has at least one term".into(),
        ));
    }
    let mut values = vec![r.clone()];
    while values.len() < length {
        let prev = values.last().expect("nonempty");
        let next = space.swing(prev)?;
        if !space.is_swing_value(prev, &next)? {
            return Err(BetaError::SwingRuleFailure {
                step: values.len() + 1,
            });
        }
        values.push(next);
    }
    Ok(SwingSequence { values })
}

/// Pointwise maximum of two swing sequences from the same start, ties
/// keeping the first argument's radius. The result is validated.
pub fn max_swing_merge<S: BetaSpace>(
    space: &S,
    a: &SwingSequence<S::Radius>,
    b: &SwingSequence<S::Radius>,
) -> Result<SwingSequence<S::Radius>, BetaError> {
    if a.len() != b.len() {
        return Err(BetaError::Precondition(format!(
            "sequences have lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    if space.radial_cmp(&a.values[0], &b.values[0])? != Some(Ordering::Equal) {
        return Err(BetaError::MismatchedStart);
    }
    let mut merged = Vec::with_capacity(a.len());
    for (i, (r, s)) in a.values.iter().zip(&b.values).enumerate() {
        merged.push(match cmp_or_err(space, r, s, i + 1)? {
            Ordering::Less => s.clone(),
            _ => r.clone(),
        });
    }
    validate_swing_sequence(space, merged)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadialLeq {
    True,
    False,
    Incomparable,
}

/// `r ≤ s` in the containment order.
pub fn radial_leq<S: BetaSpace>(
    space: &S,
    r: &S::Radius,
    s: &S::Radius,
) -> Result<RadialLeq, BetaError> {
    Ok(match space.radial_cmp(r, s)? {
        Some(Ordering::Less | Ordering::Equal) => RadialLeq::True,
        Some(Ordering::Greater) => RadialLeq::False,
        None => RadialLeq::Incomparable,
    })
}
