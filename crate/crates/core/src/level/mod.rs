//! Level sets, contraction certificates and the level-descent fixed-point
//! solver.
//!
//! On Laurent spaces the level set `L(x, r)` reduces to a valuation test:
//! `z ∈ L(x, r)` iff `z = x` or `v(d(x, z)) > v(r)`. Finite carriers are
//! handled by an exhaustive search over swing sequences.

mod contraction;
mod finite;
mod rlimit;
mod solver;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beta::{BetaError, BetaSpace, FieldMetric, FieldMetricSpace, SampleRng};
use crate::field::OrderedField;
use crate::laurent::{LaurentSeries, LimitError, PrecisionBudget, SeriesError, Sign};

pub use contraction::{
    certify_black_box, certify_contraction, AffineMap, CertificateKind, ContractionCertificate,
    FnMap, SeriesMap,
};
pub use finite::{
    check_level_structure, finite_level_set, solve_finite, FiniteFixedPoint, FiniteLevelReport,
};
pub use rlimit::{aitken_limit, r_limit, r_limit_series, RLimitCheck};
pub use solver::{
    cmt_solve, orbit_r_cauchy, product_space, unit_interval_carrier, FixedPointResult,
    FixedPointSummary, RConvergenceReport, ResidualValuation, SolveOptions, StageRecord,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LevelError {
    #[error(transparent)]
    Beta(#[from] BetaError),
    #[error(transparent)]
    Limit(#[from] LimitError),
    #[error("{point} is not in the level set L({base}, {radius})")]
    NotInLevel {
        base: String,
        point: String,
        radius: String,
    },
    #[error("no listed point is separable from {point}")]
    NotSeparable { point: String },
    #[error("witness {witness} is not level-smaller than {radius}")]
    NotLevelSmaller { witness: String, radius: String },
    #[error("the space is not level structured: {witness}")]
    NotLevelStructured { witness: String },
    #[error("the space lacks a solver hypothesis: {0}")]
    Hypothesis(String),
    #[error("chain is not strictly level-descending at position {index}")]
    NotDescending { index: usize },
    #[error("chain has {len} elements but index {needed} is needed to get below {radius}")]
    ChainTooShort {
        needed: usize,
        len: usize,
        radius: String,
    },
    #[error("no finite contraction degree: {reason}")]
    NoFiniteDegree { reason: String },
    #[error("contraction condition {condition} fails: {witness}")]
    CertificateViolation { condition: u8, witness: String },
    #[error("orbit is not r-Cauchy at level {level}: terms {n} and {m}")]
    NotRCauchy { level: usize, n: usize, m: usize },
    #[error("stage budget of {stages} exhausted before the horizon")]
    StageBudgetExhausted { stages: usize },
    #[error("level descent stuck at stage {stage}: {witness}")]
    DescentStuck { stage: usize, witness: String },
    #[error("residual has valuation {valuation}, within the horizon {horizon}")]
    ResidualNonzero { valuation: i64, horizon: i64 },
    #[error("orbit from {start} cycles without a fixed point")]
    NoFixedPoint { start: String },
    #[error("map has arity {map} but the point has arity {point}")]
    Arity { map: usize, point: usize },
    #[error("malformed map description: {0}")]
    Malformed(String),
}

impl From<SeriesError> for LevelError {
    fn from(e: SeriesError) -> Self {
        LevelError::Beta(BetaError::Series(e))
    }
}

impl LevelError {
    /// Whether the failure comes from a precision or stage budget rather
    /// than from the input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            LevelError::StageBudgetExhausted { .. }
                | LevelError::Beta(BetaError::Series(SeriesError::Undecidable { .. }))
                | LevelError::Limit(LimitError::Series(SeriesError::Undecidable { .. }))
        )
    }
}

/// Comparison of radii by inclusion of their level sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelOrder {
    Less,
    Equal,
    Greater,
    Incomparable,
}

/// Valuation, or `None` for the zero series.
pub fn level_of(s: &LaurentSeries, budget: &PrecisionBudget) -> Result<Option<i64>, SeriesError> {
    Ok(s.leading(budget)?.map(|(v, _)| v))
}

/// Spaces whose level sets and level order are computable.
pub trait LevelStructure: BetaSpace {
    fn level_membership(
        &self,
        x: &Self::Point,
        r: &Self::Radius,
        z: &Self::Point,
    ) -> Result<bool, LevelError>;

    fn level_leq(&self, r: &Self::Radius, s: &Self::Radius) -> Result<LevelOrder, LevelError>;

    /// Points to test level-set claims on: the whole carrier when finite.
    fn level_probes(
        &self,
        x: &Self::Point,
        r: &Self::Radius,
        rng: &mut SampleRng,
        count: usize,
    ) -> Result<Vec<Self::Point>, LevelError>;

    /// Decides `L(x, r) = L(y, r)` outright when the space allows it.
    fn exact_level_equality(
        &self,
        _x: &Self::Point,
        _y: &Self::Point,
        _r: &Self::Radius,
    ) -> Result<Option<bool>, LevelError> {
        Ok(None)
    }
}

impl<M: FieldMetric<Value = LaurentSeries>> FieldMetricSpace<M> {
    fn radius_level(&self, r: &LaurentSeries) -> Result<i64, LevelError> {
        if r.sign(self.budget())? != Sign::Positive {
            return Err(BetaError::NonPositiveRadius(r.render(self.budget())).into());
        }
        Ok(r.valuation(self.budget())?)
    }
}

impl<M: FieldMetric<Value = LaurentSeries>> LevelStructure for FieldMetricSpace<M> {
    fn level_membership(
        &self,
        x: &M::Point,
        r: &LaurentSeries,
        z: &M::Point,
    ) -> Result<bool, LevelError> {
        let n = self.radius_level(r)?;
        if !self.in_carrier(z)? {
            return Ok(false);
        }
        let d = self.distance(x, z)?;
        Ok(level_of(&d, self.budget())?.is_none_or(|v| v > n))
    }

    fn level_leq(&self, r: &LaurentSeries, s: &LaurentSeries) -> Result<LevelOrder, LevelError> {
        Ok(match self.radius_level(r)?.cmp(&self.radius_level(s)?) {
            Ordering::Greater => LevelOrder::Less,
            Ordering::Equal => LevelOrder::Equal,
            Ordering::Less => LevelOrder::Greater,
        })
    }

    fn level_probes(
        &self,
        x: &M::Point,
        r: &LaurentSeries,
        rng: &mut SampleRng,
        count: usize,
    ) -> Result<Vec<M::Point>, LevelError> {
        let per = count.div_ceil(4).max(1);
        let mut out = Vec::with_capacity(4 * per);
        for radius in [r.clone(), r.shift(1), r.shift(-1)] {
            out.extend(self.metric().probes_within(x, &radius, rng, per));
        }
        out.extend((0..per).map(|_| self.metric().random_point(rng)));
        out.truncate(count.max(1));
        Ok(out)
    }

    fn exact_level_equality(
        &self,
        x: &M::Point,
        y: &M::Point,
        r: &LaurentSeries,
    ) -> Result<Option<bool>, LevelError> {
        Ok(Some(self.level_membership(x, r, y)?))
    }
}

/// A level class `L(base, r)` in its valuation-reduced form.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelClass<P> {
    pub base: P,
    pub radius: LaurentSeries,
    pub valuation: i64,
}

impl<P: Clone> LevelClass<P> {
    pub fn of<M: FieldMetric<Point = P, Value = LaurentSeries>>(
        space: &FieldMetricSpace<M>,
        base: &P,
        radius: &LaurentSeries,
    ) -> Result<Self, LevelError> {
        Ok(Self {
            base: base.clone(),
            radius: radius.clone(),
            valuation: space.radius_level(radius)?,
        })
    }

    pub fn contains<M: FieldMetric<Point = P, Value = LaurentSeries>>(
        &self,
        space: &FieldMetricSpace<M>,
        z: &P,
    ) -> Result<bool, LevelError> {
        space.level_membership(&self.base, &self.radius, z)
    }

    /// Same valuation and bases in each other's class.
    pub fn same_class<M: FieldMetric<Point = P, Value = LaurentSeries>>(
        &self,
        space: &FieldMetricSpace<M>,
        other: &Self,
    ) -> Result<bool, LevelError> {
        Ok(self.valuation == other.valuation && self.contains(space, &other.base)?)
    }
}

/// Outcome of comparing `L(x, r)` with `L(y, r)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelEquality {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,
    pub probes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<String>,
}

impl LevelEquality {
    pub fn holds(&self) -> bool {
        self.exact != Some(false) && self.mismatch.is_none()
    }
}

/// Double-inclusion check of `L(x, r) = L(y, r)` for `y ∈ L(x, r)`.
pub fn level_equality_check<S: LevelStructure>(
    space: &S,
    x: &S::Point,
    y: &S::Point,
    r: &S::Radius,
    probes: usize,
    rng: &mut SampleRng,
) -> Result<LevelEquality, LevelError> {
    if !space.level_membership(x, r, y)? {
        return Err(LevelError::NotInLevel {
            base: space.describe_point(x),
            point: space.describe_point(y),
            radius: space.describe_radius(r),
        });
    }
    let mut candidates = space.level_probes(x, r, rng, probes)?;
    candidates.extend(space.level_probes(y, r, rng, probes)?);
    let mut mismatch = None;
    for z in &candidates {
        if space.level_membership(x, r, z)? != space.level_membership(y, r, z)? {
            mismatch = Some(space.describe_point(z));
            break;
        }
    }
    Ok(LevelEquality {
        exact: space.exact_level_equality(x, y, r)?,
        probes: candidates.len(),
        mismatch,
    })
}

/// `2m` for `m = max d(x, y_i)`, or `1` when every `y_i = x`.
pub fn structured_witness<M: FieldMetric>(
    space: &FieldMetricSpace<M>,
    x: &M::Point,
    ys: &[M::Point],
) -> Result<M::Value, LevelError> {
    let m = max_distance(space, x, ys)?;
    if m.sign(space.budget())? == Sign::Zero {
        return Ok(M::Value::one());
    }
    Ok(m.plus(&m))
}

fn max_distance<M: FieldMetric>(
    space: &FieldMetricSpace<M>,
    x: &M::Point,
    ys: &[M::Point],
) -> Result<M::Value, LevelError> {
    let mut m = M::Value::zero();
    for y in ys {
        m = m.max_of(&space.distance(x, y)?, space.budget())?;
    }
    Ok(m)
}

/// The witness `2m`, checked to be level-smaller than `r`, for points
/// `ys ⊆ L(x, r)`.
pub fn level_structured_witness<M: FieldMetric<Value = LaurentSeries>>(
    space: &FieldMetricSpace<M>,
    x: &M::Point,
    ys: &[M::Point],
    r: &LaurentSeries,
) -> Result<LaurentSeries, LevelError> {
    for y in ys {
        if !space.level_membership(x, r, y)? {
            return Err(LevelError::NotInLevel {
                base: space.describe_point(x),
                point: space.describe_point(y),
                radius: space.describe_radius(r),
            });
        }
    }
    let m = max_distance(space, x, ys)?;
    if m.sign(space.budget())? == Sign::Zero {
        return Err(LevelError::NotSeparable {
            point: space.describe_point(x),
        });
    }
    let witness = &m + &m;
    if space.level_leq(&witness, r)? != LevelOrder::Less {
        return Err(LevelError::NotLevelSmaller {
            witness: space.describe_radius(&witness),
            radius: space.describe_radius(r),
        });
    }
    Ok(witness)
}

/// 1-based index `m` with `chain[m] <_L s`, read off from valuations.
pub fn cdlb_gap<M: FieldMetric<Value = LaurentSeries>>(
    space: &FieldMetricSpace<M>,
    s: &LaurentSeries,
    chain: &[LaurentSeries],
) -> Result<usize, LevelError> {
    let levels: Vec<i64> = chain
        .iter()
        .map(|r| space.radius_level(r))
        .collect::<Result<_, _>>()?;
    if let Some(i) = levels.windows(2).position(|w| w[1] <= w[0]) {
        return Err(LevelError::NotDescending { index: i + 2 });
    }
    let n = space.radius_level(s)?;
    let first = *levels.first().ok_or_else(|| LevelError::ChainTooShort {
        needed: 1,
        len: 0,
        radius: space.describe_radius(s),
    })?;
    let m = (n - first + 2).max(1) as usize;
    if m > chain.len() {
        return Err(LevelError::ChainTooShort {
            needed: m,
            len: chain.len(),
            radius: space.describe_radius(s),
        });
    }
    debug_assert_eq!(space.level_leq(&chain[m - 1], s)?, LevelOrder::Less);
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::{field_metric_space, sample_rng, LaurentLine};
    use crate::rational::{int, rat};

    fn line() -> FieldMetricSpace<LaurentLine> {
        field_metric_space(LaurentLine, PrecisionBudget::default()).unwrap()
    }

    fn c(n: i64, d: i64) -> LaurentSeries {
        LaurentSeries::constant(rat(n, d))
    }

    #[test]
    fn membership_examples() {
        let l = line();
        let x = LaurentSeries::x();
        let zero = LaurentSeries::zero();
        assert!(l.level_membership(&zero, &x, &x.pow(2)).unwrap());
        assert!(l.level_membership(&x, &x, &x).unwrap());
        assert!(!l
            .level_membership(&zero, &LaurentSeries::one(), &c(1, 2))
            .unwrap());
        assert!(l
            .level_membership(&zero, &LaurentSeries::one(), &x)
            .unwrap());
    }

    #[test]
    fn level_order_examples() {
        let l = line();
        let x = LaurentSeries::x();
        assert_eq!(l.level_leq(&x.pow(2), &x).unwrap(), LevelOrder::Less);
        assert_eq!(l.level_leq(&c(3, 1), &c(1, 2)).unwrap(), LevelOrder::Equal);
        assert_eq!(l.level_leq(&x, &x).unwrap(), LevelOrder::Equal);
        assert_eq!(l.level_leq(&x, &x.pow(2)).unwrap(), LevelOrder::Greater);
    }

    #[test]
    fn level_equality_examples() {
        let l = line();
        let x = LaurentSeries::x();
        let zero = LaurentSeries::zero();
        let mut rng = sample_rng(5);
        let eq = level_equality_check(&l, &zero, &x.pow(2), &x, 32, &mut rng).unwrap();
        assert!(eq.holds());
        assert_eq!(eq.exact, Some(true));
        assert!(level_equality_check(&l, &x, &x, &x, 8, &mut rng)
            .unwrap()
            .holds());
        assert!(matches!(
            level_equality_check(&l, &zero, &LaurentSeries::one(), &x, 8, &mut rng),
            Err(LevelError::NotInLevel { .. })
        ));
    }

    #[test]
    fn structured_witness_examples() {
        let l = line();
        let x = LaurentSeries::x();
        let zero = LaurentSeries::zero();
        assert_eq!(
            structured_witness(&l, &zero, &[x.clone(), x.pow(2)]).unwrap(),
            x.scale(&int(2))
        );
        assert_eq!(
            structured_witness(&l, &x, &[x.clone(), x.clone()]).unwrap(),
            LaurentSeries::one()
        );
        assert_eq!(structured_witness(&l, &zero, &[c(3, 1)]).unwrap(), c(6, 1));
    }

    #[test]
    fn level_structured_witness_examples() {
        let l = line();
        let x = LaurentSeries::x();
        let zero = LaurentSeries::zero();
        let w = level_structured_witness(&l, &zero, &[x.pow(2), x.pow(3)], &x).unwrap();
        assert_eq!(w, x.pow(2).scale(&int(2)));
        assert_eq!(l.level_leq(&w, &x).unwrap(), LevelOrder::Less);
        assert!(matches!(
            level_structured_witness(&l, &x, std::slice::from_ref(&x), &x),
            Err(LevelError::NotSeparable { .. })
        ));
        assert!(matches!(
            level_structured_witness(&l, &zero, &[LaurentSeries::one()], &x),
            Err(LevelError::NotInLevel { .. })
        ));
    }

    #[test]
    fn cdlb_examples() {
        let l = line();
        let x = LaurentSeries::x();
        let chain: Vec<LaurentSeries> = (0..8).map(|k| x.pow(k)).collect();
        assert_eq!(cdlb_gap(&l, &x.pow(3), &chain).unwrap(), 5);
        assert_eq!(cdlb_gap(&l, &c(2, 1), &chain).unwrap(), 2);
        assert_eq!(cdlb_gap(&l, &x.shift(-4), &chain).unwrap(), 1);
        let flat = vec![LaurentSeries::one(), x.clone(), c(1, 2)];
        assert_eq!(
            cdlb_gap(&l, &c(2, 1), &flat).unwrap_err(),
            LevelError::NotDescending { index: 3 }
        );
        assert!(matches!(
            cdlb_gap(&l, &x.pow(9), &chain),
            Err(LevelError::ChainTooShort { .. })
        ));
    }

    #[test]
    fn class_reduction() {
        let l = line();
        let x = LaurentSeries::x();
        let a = LevelClass::of(&l, &LaurentSeries::zero(), &x).unwrap();
        let b = LevelClass::of(&l, &x.pow(2), &x.scale(&int(7))).unwrap();
        assert!(a.same_class(&l, &b).unwrap());
        let c1 = LevelClass::of(&l, &x, &x).unwrap();
        assert!(!a.same_class(&l, &c1).unwrap());
    }
}
