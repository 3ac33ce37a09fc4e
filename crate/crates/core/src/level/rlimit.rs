//! Canonical representatives of r-convergence sets on `𝕃ⁿ`.

use num_traits::Zero;

use crate::laurent::{sup_metric, LaurentSeries, LimitError, PrecisionBudget, SeriesVector};
use crate::rational::{format_rational, Rational};

/// Sampling plan for [`r_limit`]: the swing levels `r_k = r / 2^(k-1)`
/// checked after the fact, and how many terms past each modulus are read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RLimitCheck {
    pub levels: usize,
    pub window: usize,
}

impl Default for RLimitCheck {
    fn default() -> Self {
        Self {
            levels: 4,
            window: 5,
        }
    }
}

/// Limit of `values` assuming `c_m = L + C q^m`, by Aitken's Δ² on every
/// consecutive triple. `None` unless all triples agree.
pub fn aitken_limit(values: &[Rational]) -> Option<Rational> {
    if values.len() < 3 {
        return None;
    }
    let mut estimate: Option<Rational> = None;
    for w in values.windows(3) {
        let (d1, d2) = (&w[1] - &w[0], &w[2] - &w[1]);
        let next = if d1.is_zero() && d2.is_zero() {
            w[2].clone()
        } else if d1 == d2 {
            return None;
        } else {
            &w[2] - &d2 * &d2 / (&d2 - &d1)
        };
        match &estimate {
            Some(e) if *e != next => return None,
            _ => estimate = Some(next),
        }
    }
    estimate
}

/// Representative of the set every r-limit of `seq` lies in: coefficients
/// below `v(r)` read from the stabilized terms, the coefficient at `v(r)`
/// as the limit of its rational sequence, everything above set to zero.
///
/// `moduli(k)` is the index past which terms are within `r_k` of each
/// other. The result is checked against `r_1 … r_levels` on the window
/// after each modulus.
pub fn r_limit(
    seq: &dyn Fn(usize) -> SeriesVector,
    r: &LaurentSeries,
    moduli: &dyn Fn(usize) -> usize,
    check: &RLimitCheck,
    budget: &PrecisionBudget,
) -> Result<SeriesVector, LimitError> {
    let n = r.valuation(budget)?;
    let start = moduli(1);
    let window = check.window.max(3);
    let terms: Vec<SeriesVector> = (start..start + window).map(seq).collect();
    let arity = terms[0].arity();
    let mut parts = Vec::with_capacity(arity);
    for j in 0..arity {
        let comps: Vec<&LaurentSeries> = terms.iter().map(|t| t.component(j)).collect();
        let low = comps
            .iter()
            .map(|c| c.lower_bound())
            .min()
            .expect("nonempty window");
        let mut coefficients = Vec::new();
        for i in low..n {
            let c = comps[0].coefficient(i);
            if let Some(t) = comps.iter().position(|other| other.coefficient(i) != c) {
                return Err(LimitError::StabilizationFailure {
                    component: j,
                    index: i,
                    reason: format!("terms {start} and {} differ", start + t),
                });
            }
            coefficients.push((i, c));
        }
        let level: Vec<Rational> = comps.iter().map(|c| c.coefficient(n)).collect();
        let limit = aitken_limit(&level).ok_or_else(|| LimitError::StabilizationFailure {
            component: j,
            index: n,
            reason: format!(
                "no geometric limit for [{}]",
                level
                    .iter()
                    .map(format_rational)
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        })?;
        coefficients.push((n, limit));
        parts.push(LaurentSeries::from_terms(coefficients));
    }
    let rep = SeriesVector::new(parts);
    let mut radius = r.clone();
    for k in 1..=check.levels {
        let from = moduli(k);
        for m in from..from + window {
            if !sup_metric(&seq(m), &rep, budget)?.less_than(&radius, budget)? {
                return Err(LimitError::StabilizationFailure {
                    component: 0,
                    index: n,
                    reason: format!("term {m} is not within r_{k} of the representative"),
                });
            }
        }
        radius = radius.half();
    }
    Ok(rep)
}

/// [`r_limit`] on `𝕃`.
pub fn r_limit_series(
    seq: &dyn Fn(usize) -> LaurentSeries,
    r: &LaurentSeries,
    moduli: &dyn Fn(usize) -> usize,
    check: &RLimitCheck,
    budget: &PrecisionBudget,
) -> Result<LaurentSeries, LimitError> {
    let lifted = |m: usize| SeriesVector::scalar(seq(m));
    Ok(r_limit(&lifted, r, moduli, check, budget)?
        .component(0)
        .clone())
}
