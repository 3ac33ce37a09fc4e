//! Certificate-based Cauchy and convergence checks, and the nested-ball
//! containment for orbits stepping by a swing sequence.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{sample_rng, validate_swing_sequence, BetaError, BetaSpace};

/// Modulus `r ↦ N`; `None` where the certificate is undefined.
pub type ConvergenceCertificate<R> = Arc<dyn Fn(&R) -> Option<usize> + Send + Sync>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SequenceVerdict {
    Pass {
        checks: usize,
    },
    Violation {
        radius: String,
        n: usize,
        #[serde(skip_serializing_if = "Option::is_none")]
        m: Option<usize>,
        detail: String,
    },
    MissingModulus {
        radius: String,
    },
}

impl SequenceVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, SequenceVerdict::Pass { .. })
    }
}

/// Checks `a_m ∈ β(a_n, r)` for `n, m` in `N..N + pair_budget`, `N = cert(r)`.
pub fn check_cauchy<S: BetaSpace>(
    space: &S,
    seq: &dyn Fn(usize) -> S::Point,
    cert: &ConvergenceCertificate<S::Radius>,
    radii: &[S::Radius],
    pair_budget: usize,
) -> Result<SequenceVerdict, BetaError> {
    let mut checks = 0;
    for r in radii {
        let Some(start) = cert(r) else {
            return Ok(SequenceVerdict::MissingModulus {
                radius: space.describe_radius(r),
            });
        };
        let terms: Vec<S::Point> = (start..start + pair_budget).map(seq).collect();
        for (i, a) in terms.iter().enumerate() {
            for (j, b) in terms.iter().enumerate() {
                checks += 1;
                if !space.in_ball(a, r, b)? {
                    return Ok(SequenceVerdict::Violation {
                        radius: space.describe_radius(r),
                        n: start + i,
                        m: Some(start + j),
                        detail: format!("a_m = {} ∉ β(a_n, r)", space.describe_point(b)),
                    });
                }
            }
        }
    }
    Ok(SequenceVerdict::Pass { checks })
}

/// Checks both `a_n ∈ β(limit, r)` and `limit ∈ β(a_n, r)` for `n` in
/// `N..N + budget`.
pub fn check_converges<S: BetaSpace>(
    space: &S,
    seq: &dyn Fn(usize) -> S::Point,
    limit: &S::Point,
    cert: &ConvergenceCertificate<S::Radius>,
    radii: &[S::Radius],
    budget: usize,
) -> Result<SequenceVerdict, BetaError> {
    let mut checks = 0;
    for r in radii {
        let Some(start) = cert(r) else {
            return Ok(SequenceVerdict::MissingModulus {
                radius: space.describe_radius(r),
            });
        };
        for n in start..start + budget {
            let a = seq(n);
            checks += 2;
            let detail = if !space.in_ball(limit, r, &a)? {
                "a_n ∉ β(limit, r)"
            } else if !space.in_ball(&a, r, limit)? {
                "limit ∉ β(a_n, r)"
            } else {
                continue;
            };
            return Ok(SequenceVerdict::Violation {
                radius: space.describe_radius(r),
                n,
                m: None,
                detail: format!("{detail} with a_n = {}", space.describe_point(&a)),
            });
        }
    }
    Ok(SequenceVerdict::Pass { checks })
}

/// Radii `r, s, t`, a swing sequence `t_seq` starting at `t` and an orbit
/// `a_1..a_m` with `a_{n+1} ∈ β(a_n, t_n)`. With `p` set, the additional
/// containment in every `β(a_k, p)` is checked as well.
#[derive(Clone, Debug)]
pub struct GeometricInstance<P, R> {
    pub r: R,
    pub s: R,
    pub t: R,
    pub t_seq: Vec<R>,
    pub orbit: Vec<P>,
    pub p: Option<R>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum GeometricVerdict {
    Pass {
        containments: usize,
        exhaustive: bool,
    },
    Violation {
        n: usize,
        outer: String,
        witness: String,
    },
}

impl GeometricVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, GeometricVerdict::Pass { .. })
    }
}

/// Checks `β(a_n, t_n) ⊆ β(a_1, r)` for every `n` on ball witnesses; with
/// `p`, also `β(a_n, t_n) ⊆ β(a_k, p)` for every `k`. Preconditions are
/// validated first and a failure names the offending step.
pub fn geometric_series_check<S: BetaSpace>(
    space: &S,
    instance: &GeometricInstance<S::Point, S::Radius>,
    probes: usize,
    seed: u64,
) -> Result<GeometricVerdict, BetaError> {
    let GeometricInstance {
        r,
        s,
        t,
        t_seq,
        orbit,
        p,
    } = instance;
    if !space.is_swing_value(r, s)? {
        return Err(BetaError::Precondition(
            "s is not a swing value of r".into(),
        ));
    }
    if !space.is_swing_value(s, t)? {
        return Err(BetaError::Precondition(
            "t is not a swing value of s".into(),
        ));
    }
    if let Some(p) = p {
        if !space.is_swing_value(p, r)? {
            return Err(BetaError::Precondition(
                "r is not a swing value of p".into(),
            ));
        }
    }
    let t_seq = validate_swing_sequence(space, t_seq.clone())?;
    if space.radial_cmp(t_seq.term(1), t)? != Some(std::cmp::Ordering::Equal) {
        return Err(BetaError::Precondition(
            "the swing sequence does not start at t".into(),
        ));
    }
    if orbit.is_empty() || t_seq.len() < orbit.len() {
        return Err(BetaError::Precondition(format!(
            "orbit of length {} needs at least as many swing radii, got {}",
            orbit.len(),
            t_seq.len()
        )));
    }
    for n in 1..orbit.len() {
        if !space.in_ball(&orbit[n - 1], t_seq.term(n), &orbit[n])? {
            return Err(BetaError::Precondition(format!(
                "a_{} ∉ β(a_{n}, t_{n})",
                n + 1
            )));
        }
    }

    let mut rng = sample_rng(seed);
    let mut containments = 0;
    for (i, a) in orbit.iter().enumerate() {
        let n = i + 1;
        let witnesses = space.ball_witnesses(a, t_seq.term(n), &mut rng, probes)?;
        let mut outers = vec![(&orbit[0], r, "β(a_1, r)".to_string())];
        if let Some(p) = p {
            outers.extend(
                orbit
                    .iter()
                    .enumerate()
                    .map(|(k, c)| (c, p, format!("β(a_{}, p)", k + 1))),
            );
        }
        for (center, radius, label) in outers {
            containments += 1;
            for w in &witnesses {
                if !space.in_ball(center, radius, w)? {
                    return Ok(GeometricVerdict::Violation {
                        n,
                        outer: label,
                        witness: space.describe_point(w),
                    });
                }
            }
        }
    }
    Ok(GeometricVerdict::Pass {
        containments,
        exhaustive: space.exhaustive_points(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::{
        field_metric_space, FieldMetricSpace, FiniteBetaSpace, LaurentLine, RationalLine,
    };
    use crate::laurent::{LaurentSeries, PrecisionBudget};
    use crate::rational::{int, pow, rat, Rational};

    fn line() -> FieldMetricSpace<LaurentLine> {
        field_metric_space(LaurentLine, PrecisionBudget::default()).unwrap()
    }

    fn x_pow(k: i64) -> LaurentSeries {
        LaurentSeries::monomial(int(1), k)
    }

    fn exponent_cert(offset: i64) -> ConvergenceCertificate<LaurentSeries> {
        let b = PrecisionBudget::default();
        Arc::new(move |r: &LaurentSeries| {
            r.valuation(&b).ok().map(|k| (k + offset).max(0) as usize)
        })
    }

    #[test]
    fn partial_sums_are_cauchy() {
        let seq = |n: usize| LaurentSeries::from_terms((0..=n as i64).map(|i| (i, int(1))));
        let radii: Vec<_> = (0..6).map(x_pow).collect();
        assert!(check_cauchy(&line(), &seq, &exponent_cert(1), &radii, 4)
            .unwrap()
            .passed());
    }

    #[test]
    fn constant_and_divergent() {
        let c = LaurentSeries::constant(rat(2, 3));
        let one: ConvergenceCertificate<LaurentSeries> = Arc::new(|_| Some(1));
        let radii = vec![x_pow(3), LaurentSeries::one()];
        assert!(check_cauchy(&line(), &|_| c.clone(), &one, &radii, 3)
            .unwrap()
            .passed());
        let v = check_cauchy(
            &line(),
            &|n| LaurentSeries::from(n as i64),
            &one,
            &[LaurentSeries::one()],
            3,
        )
        .unwrap();
        assert!(matches!(v, SequenceVerdict::Violation { .. }));
    }

    #[test]
    fn missing_modulus_reported() {
        let none: ConvergenceCertificate<LaurentSeries> = Arc::new(|_| None);
        let v = check_cauchy(
            &line(),
            &|_| LaurentSeries::zero(),
            &none,
            &[LaurentSeries::one()],
            2,
        )
        .unwrap();
        assert!(matches!(v, SequenceVerdict::MissingModulus { .. }));
    }

    #[test]
    fn powers_converge_to_zero() {
        let radii: Vec<_> = (0..8).map(x_pow).collect();
        let v = check_converges(
            &line(),
            &|n| x_pow(n as i64),
            &LaurentSeries::zero(),
            &exponent_cert(1),
            &radii,
            5,
        )
        .unwrap();
        assert!(v.passed(), "{v:?}");
    }

    #[test]
    fn oscillation_fails_at_odd_index() {
        let q = field_metric_space(RationalLine, PrecisionBudget::default()).unwrap();
        let cert: ConvergenceCertificate<Rational> = Arc::new(|_| Some(0));
        let seq = |n: usize| if n.is_multiple_of(2) { int(1) } else { int(-1) };
        match check_converges(&q, &seq, &int(1), &cert, &[rat(1, 2)], 4).unwrap() {
            SequenceVerdict::Violation { n, .. } => assert_eq!(n % 2, 1),
            v => panic!("{v:?}"),
        }
    }

    fn rational_instance(len: usize) -> GeometricInstance<Rational, Rational> {
        let half = rat(1, 2);
        let t_seq: Vec<Rational> = (1..=len as u32).map(|n| pow(&half, n + 1)).collect();
        let mut orbit = vec![int(0)];
        for n in 1..len as u32 {
            let next = orbit.last().unwrap() + pow(&half, n + 2);
            orbit.push(next);
        }
        GeometricInstance {
            r: int(1),
            s: half,
            t: rat(1, 4),
            t_seq,
            orbit,
            p: Some(int(2)),
        }
    }

    #[test]
    fn rational_geometric_example() {
        let q = field_metric_space(RationalLine, PrecisionBudget::default()).unwrap();
        let v = geometric_series_check(&q, &rational_instance(12), 64, 3).unwrap();
        assert!(v.passed(), "{v:?}");
    }

    #[test]
    fn constant_orbit_passes() {
        let q = field_metric_space(RationalLine, PrecisionBudget::default()).unwrap();
        let mut inst = rational_instance(6);
        inst.orbit = vec![rat(5, 3); 6];
        assert!(geometric_series_check(&q, &inst, 32, 0).unwrap().passed());
    }

    #[test]
    fn planted_step_violation() {
        let q = field_metric_space(RationalLine, PrecisionBudget::default()).unwrap();
        let mut inst = rational_instance(6);
        inst.orbit[3] = int(5);
        let err = geometric_series_check(&q, &inst, 8, 0).unwrap_err();
        assert_eq!(err, BetaError::Precondition("a_4 ∉ β(a_3, t_3)".into()));
    }

    #[test]
    fn finite_fixture_is_exhaustive() {
        let f = FiniteBetaSpace::two_point(&[rat(1, 2), int(2)]);
        let inst = GeometricInstance {
            r: 1,
            s: 0,
            t: 0,
            t_seq: vec![0, 0, 0],
            orbit: vec![1, 1, 1],
            p: Some(1),
        };
        let v = geometric_series_check(&f, &inst, 0, 0).unwrap();
        assert!(matches!(
            v,
            GeometricVerdict::Pass {
                exhaustive: true,
                ..
            }
        ));
    }
}
