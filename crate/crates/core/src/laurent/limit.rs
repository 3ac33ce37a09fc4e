//! Limits of Cauchy sequences of Laurent series.
//!
//! A Cauchy sequence stabilizes coefficient by coefficient: once
//! `|f_n - f_m| < x^k` for all `n, m ≥ N_k`, the terms agree below exponent
//! `k`. The limit reads coefficient `i` from term `N_{i+1}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use super::{metric, LaurentSeries, PrecisionBudget, SeriesError};

pub type SeriesSequence = Arc<dyn Fn(usize) -> LaurentSeries + Send + Sync>;

/// Wraps a closure as a shareable sequence.
pub fn sequence<F>(f: F) -> SeriesSequence
where
    F: Fn(usize) -> LaurentSeries + Send + Sync + 'static,
{
    Arc::new(f)
}

/// Map from radius exponent `k` (radius `x^k`) to the index `N_k`.
#[derive(Clone)]
pub struct ExponentModulus {
    rule: Arc<dyn Fn(i64) -> Option<usize> + Send + Sync>,
}

impl ExponentModulus {
    pub fn total<F>(f: F) -> Self
    where
        F: Fn(i64) -> usize + Send + Sync + 'static,
    {
        Self {
            rule: Arc::new(move |k| Some(f(k))),
        }
    }

    pub fn partial<F>(f: F) -> Self
    where
        F: Fn(i64) -> Option<usize> + Send + Sync + 'static,
    {
        Self { rule: Arc::new(f) }
    }

    /// Moduli from an explicit table; exponents below the smallest key
    /// reuse its entry, exponents above the largest key are undefined.
    pub fn table(entries: BTreeMap<i64, usize>) -> Self {
        Self::partial(move |k| match entries.range(k..).next() {
            Some((&key, &n)) if key == k => Some(n),
            Some((_, &n)) if entries.keys().next().is_some_and(|&first| k < first) => Some(n),
            _ => None,
        })
    }

    pub fn at(&self, exponent: i64) -> Option<usize> {
        (self.rule)(exponent)
    }
}

/// Which radii `x^k` the Cauchy precondition is sampled on, and how many
/// indices past each `N_k` are paired up.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LimitCheck {
    pub first_exponent: i64,
    pub last_exponent: i64,
    pub window: usize,
}

impl LimitCheck {
    /// Certify every coefficient up to the budget's horizon.
    pub fn through_horizon(first_exponent: i64, budget: &PrecisionBudget, window: usize) -> Self {
        Self {
            first_exponent,
            last_exponent: budget.horizon + 1,
            window,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LimitError {
    #[error("no modulus for radius x^{exponent}")]
    MissingModulus { exponent: i64 },
    #[error("terms {n} and {m} differ by at least x^{exponent}")]
    CoefficientInstability { exponent: i64, n: usize, m: usize },
    #[error(
        "term {n} has a nonzero coefficient at x^{index}, below the common lower bound {bound}"
    )]
    NoCommonLowerBound { n: usize, index: i64, bound: i64 },
    #[error("coefficient at x^{index} of component {component} does not settle: {reason}")]
    StabilizationFailure {
        component: usize,
        index: i64,
        reason: String,
    },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Checks `|seq(n) - seq(m)| < x^k` on the sampled pairs.
pub fn check_cauchy_precondition(
    seq: &SeriesSequence,
    moduli: &ExponentModulus,
    check: &LimitCheck,
    budget: &PrecisionBudget,
) -> Result<(), LimitError> {
    for k in check.first_exponent..=check.last_exponent {
        let start = moduli
            .at(k)
            .ok_or(LimitError::MissingModulus { exponent: k })?;
        let radius = LaurentSeries::monomial(crate::rational::int(1), k);
        let terms: Vec<LaurentSeries> = (start..start + check.window).map(|n| seq(n)).collect();
        for (i, a) in terms.iter().enumerate() {
            for (j, b) in terms.iter().enumerate().skip(i + 1) {
                if !metric(a, b, budget)?.less_than(&radius, budget)? {
                    return Err(LimitError::CoefficientInstability {
                        exponent: k,
                        n: start + i,
                        m: start + j,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Limit of a Cauchy sequence given its moduli.
///
/// The precondition is sampled first; the returned series is generated,
/// with coefficient `i` equal to coefficient `i` of `seq(N_{i+1})`. Past
/// `check.last_exponent` the coefficients are read from the last certified
/// term when the modulus is undefined there.
pub fn cauchy_limit(
    seq: &SeriesSequence,
    moduli: &ExponentModulus,
    check: &LimitCheck,
    budget: &PrecisionBudget,
) -> Result<LaurentSeries, LimitError> {
    let k0 = check.first_exponent;
    let n0 = moduli
        .at(k0)
        .ok_or(LimitError::MissingModulus { exponent: k0 })?;
    let anchor = seq(n0);
    let anchor_lower = match anchor.normalized(budget) {
        Ok(s) if s.is_provably_zero() => k0,
        Ok(s) => s.lower_bound(),
        Err(_) => anchor.lower_bound(),
    };
    let alpha = anchor_lower.min(k0);
    for n in n0..n0 + check.window {
        let term = seq(n);
        for i in term.lower_bound()..alpha {
            if term.coefficient(i) != num_traits::Zero::zero() {
                return Err(LimitError::NoCommonLowerBound {
                    n,
                    index: i,
                    bound: alpha,
                });
            }
        }
    }
    check_cauchy_precondition(seq, moduli, check, budget)?;

    let last_n = moduli
        .at(check.last_exponent)
        .ok_or(LimitError::MissingModulus {
            exponent: check.last_exponent,
        })?;
    let seq = Arc::clone(seq);
    let moduli = moduli.clone();
    Ok(LaurentSeries::generated(alpha, move |i| {
        let n = moduli.at(i + 1).unwrap_or(last_n);
        seq(n).coefficient(i)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn partial_sums() -> SeriesSequence {
        sequence(|n| LaurentSeries::from_terms((0..=n as i64).map(|i| (i, int(1)))))
    }

    #[test]
    fn partial_sums_converge_to_geometric() {
        let b = PrecisionBudget::default();
        let moduli = ExponentModulus::total(|k| (k + 1).max(0) as usize);
        let seq = partial_sums();
        let g = cauchy_limit(&seq, &moduli, &LimitCheck::through_horizon(0, &b, 3), &b).unwrap();
        assert!(g.agrees_to(&LaurentSeries::geometric(), 64));
        for k in 0..=8i64 {
            let radius = LaurentSeries::monomial(int(1), k);
            for n in (k + 2) as usize..(k + 6) as usize {
                let d = metric(&g, &seq(n), &b).unwrap();
                assert!(d.less_than(&radius, &b).unwrap(), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn constant_sequence() {
        let b = PrecisionBudget::default();
        let s = LaurentSeries::from_terms([(-2, rat(1, 3)), (4, int(9))]);
        let s2 = s.clone();
        let seq = sequence(move |_| s2.clone());
        let moduli = ExponentModulus::total(|_| 0);
        let g = cauchy_limit(&seq, &moduli, &LimitCheck::through_horizon(-3, &b, 2), &b).unwrap();
        assert!(g.agrees_to(&s, 64));
        assert_eq!(g.lower_bound(), -3);
    }

    #[test]
    fn halving_constants_have_no_fine_moduli() {
        let b = PrecisionBudget::default();
        let seq = sequence(|n| LaurentSeries::constant(rat(1, 1 << n.min(60))));
        let coarse = ExponentModulus::partial(|k| (k <= 0).then_some(1));
        let err =
            cauchy_limit(&seq, &coarse, &LimitCheck::through_horizon(0, &b, 3), &b).unwrap_err();
        assert_eq!(err, LimitError::MissingModulus { exponent: 1 });
        // Claiming a modulus at x^1 does not help: standard differences exceed x.
        let bogus = ExponentModulus::total(|_| 1);
        let err =
            cauchy_limit(&seq, &bogus, &LimitCheck::through_horizon(0, &b, 3), &b).unwrap_err();
        assert!(matches!(
            err,
            LimitError::CoefficientInstability { exponent: 1, .. }
        ));
        // Coarse radii alone are satisfied.
        let coarse_only = LimitCheck {
            first_exponent: -4,
            last_exponent: 0,
            window: 4,
        };
        check_cauchy_precondition(&seq, &coarse, &coarse_only, &b).unwrap();
    }

    #[test]
    fn diverging_lower_bounds_rejected() {
        let b = PrecisionBudget::default();
        let seq = sequence(|n| LaurentSeries::monomial(int(1), -(n as i64)));
        let moduli = ExponentModulus::total(|_| 0);
        let err =
            cauchy_limit(&seq, &moduli, &LimitCheck::through_horizon(0, &b, 3), &b).unwrap_err();
        assert!(matches!(err, LimitError::NoCommonLowerBound { .. }));
    }

    #[test]
    fn table_moduli() {
        let m = ExponentModulus::table(BTreeMap::from([(0, 2), (1, 5)]));
        assert_eq!(m.at(-7), Some(2));
        assert_eq!(m.at(0), Some(2));
        assert_eq!(m.at(1), Some(5));
        assert_eq!(m.at(2), None);
    }
}
