//! Beta-spaces: a carrier, a set of radial values and a ball function
//! `β(x, r)` satisfying
//!
//! 1. `x ∈ β(x, r)`;
//! 2. every ball is open;
//! 3. balls centered at a point of an open set fit inside it;
//! 4. every radius `r` has a *swing value* `s` with
//!    `x ∈ β(y, s) ⇒ β(y, s) ⊆ β(x, r)` for all `x, y`.
//!
//! Finite carriers are checked exhaustively. Field-metric spaces over
//! Laurent series are checked on seeded samples, and every verdict records
//! which of the two it was.

mod axioms;
mod finite;
mod metric;
mod sequences;
mod swing;
mod topology;

use std::cmp::Ordering;
use std::fmt::Debug;

use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::laurent::SeriesError;

pub use axioms::{check_axioms, AxiomReport, AxiomVerdict, Verdict};
pub use finite::{FiniteBetaSpace, FiniteSpaceFile, PointSet, MAX_POINTS};
pub use metric::{
    field_metric_space, CarrierPredicate, FieldMetric, FieldMetricSpace, FiniteMetric, LaurentLine,
    LaurentProduct, RationalLine,
};
pub use sequences::{
    check_cauchy, check_converges, geometric_series_check, ConvergenceCertificate,
    GeometricInstance, GeometricVerdict, SequenceVerdict,
};
pub use swing::{
    max_swing_merge, radial_leq, swing_sequence, validate_swing_sequence, RadialLeq, SwingSequence,
};
pub use topology::{
    check_separation, check_totally_bounded, finite_topology, FiniteTopology, Separation,
    TotallyBoundedReport, MAX_TOPOLOGY_POINTS,
};

/// Seeded generator used by every sampled check.
pub type SampleRng = ChaCha8Rng;

pub fn sample_rng(seed: u64) -> SampleRng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BetaError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("radius {0} is not positive")]
    NonPositiveRadius(String),
    #[error("no swing value exists for radius {radius}")]
    NoSwingValue { radius: String },
    #[error("step {step} of the swing sequence is not a swing value of its predecessor")]
    SwingRuleFailure { step: usize },
    #[error("radii at position {index} are incomparable; the space is not ordered there")]
    NotOrdered { index: usize },
    #[error("swing sequences start at different radii")]
    MismatchedStart,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("carrier has {points} points; at most {limit} are supported here")]
    CarrierTooLarge { points: usize, limit: usize },
    #[error("malformed space description: {0}")]
    Malformed(String),
}

/// A carrier with radial values and a ball-membership rule.
///
/// Balls are predicates. Spaces with an enumerable carrier return
/// `Some` from [`BetaSpace::points`] and then every quantifier over points
/// is exhaustive; otherwise checks fall back to samples and probes.
pub trait BetaSpace: Sync {
    type Point: Clone + Debug + Send + Sync;
    type Radius: Clone + Debug + Send + Sync;

    fn in_ball(
        &self,
        center: &Self::Point,
        radius: &Self::Radius,
        z: &Self::Point,
    ) -> Result<bool, BetaError>;

    /// The space's designated swing value for `radius`.
    fn swing(&self, radius: &Self::Radius) -> Result<Self::Radius, BetaError>;

    /// Whether `candidate` is a swing value of `radius`.
    fn is_swing_value(
        &self,
        radius: &Self::Radius,
        candidate: &Self::Radius,
    ) -> Result<bool, BetaError>;

    /// Containment order `r ≤ s ⇔ β(x, r) ⊆ β(x, s)` for all `x`; `None`
    /// when neither containment holds.
    fn radial_cmp(&self, r: &Self::Radius, s: &Self::Radius)
        -> Result<Option<Ordering>, BetaError>;

    /// Members of `β(center, radius)` used to test containment claims: the
    /// whole ball on enumerable carriers, seeded probes otherwise.
    fn ball_witnesses(
        &self,
        center: &Self::Point,
        radius: &Self::Radius,
        rng: &mut SampleRng,
        count: usize,
    ) -> Result<Vec<Self::Point>, BetaError>;

    fn points(&self) -> Option<Vec<Self::Point>>;
    fn radii(&self) -> Option<Vec<Self::Radius>>;
    fn sample_point(&self, rng: &mut SampleRng) -> Self::Point;
    fn sample_radius(&self, rng: &mut SampleRng) -> Self::Radius;

    fn describe_point(&self, p: &Self::Point) -> String;
    fn describe_radius(&self, r: &Self::Radius) -> String;

    /// Verdicts for axioms 2 and 3 when the topology is materializable.
    fn topology_axioms(&self) -> Option<(Verdict, Verdict)> {
        None
    }

    fn exhaustive_points(&self) -> bool {
        self.points().is_some()
    }

    /// Subset check `β(inner) ⊆ β(outer)` over ball witnesses.
    fn ball_contained(
        &self,
        inner: (&Self::Point, &Self::Radius),
        outer: (&Self::Point, &Self::Radius),
        rng: &mut SampleRng,
        probes: usize,
    ) -> Result<Option<Self::Point>, BetaError> {
        for w in self.ball_witnesses(inner.0, inner.1, rng, probes)? {
            if !self.in_ball(outer.0, outer.1, &w)? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }
}

/// Orders radii of spaces that only expose `radial_cmp`.
pub(crate) fn cmp_or_err<S: BetaSpace>(
    space: &S,
    r: &S::Radius,
    s: &S::Radius,
    index: usize,
) -> Result<Ordering, BetaError> {
    space
        .radial_cmp(r, s)?
        .ok_or(BetaError::NotOrdered { index })
}
