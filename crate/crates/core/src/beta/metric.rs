//! Field-metric spaces: `β(x, r) = {y : d(x, y) < r}` with swing `r/2`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::{sample_rng, BetaError, BetaSpace, SampleRng};
use crate::field::OrderedField;
use crate::laurent::{
    metric, sup_metric, LaurentSeries, PrecisionBudget, SeriesError, SeriesVector, Sign,
};
use crate::rational::{format_rational, int, rat, Rational};
use crate::sample;

/// A distance with values in an ordered field, plus the samplers the
/// checkers need.
pub trait FieldMetric: Send + Sync {
    type Point: Clone + fmt::Debug + Send + Sync;
    type Value: OrderedField;

    fn distance(
        &self,
        a: &Self::Point,
        b: &Self::Point,
        budget: &PrecisionBudget,
    ) -> Result<Self::Value, SeriesError>;

    /// The carrier, when it is finite.
    fn points(&self) -> Option<Vec<Self::Point>> {
        None
    }

    fn random_point(&self, rng: &mut SampleRng) -> Self::Point;
    fn random_radius(&self, rng: &mut SampleRng) -> Self::Value;

    /// Candidate members of `B(center, radius)`: the center, random interior
    /// points and points just inside the boundary.
    fn probes_within(
        &self,
        center: &Self::Point,
        radius: &Self::Value,
        rng: &mut SampleRng,
        count: usize,
    ) -> Vec<Self::Point>;

    fn render_point(&self, p: &Self::Point, budget: &PrecisionBudget) -> String;
}

/// The Laurent line with `d(a, b) = |a - b|`.
#[derive(Clone, Copy, Debug, Default)]
pub struct LaurentLine;

/// `𝕃ⁿ` with the sup metric.
#[derive(Clone, Copy, Debug)]
pub struct LaurentProduct {
    pub arity: usize,
}

/// The rationals with `d(a, b) = |a - b|`.
#[derive(Clone, Copy, Debug, Default)]
pub struct RationalLine;

/// Explicit finite carrier with rational distances.
#[derive(Clone, Debug)]
pub struct FiniteMetric {
    labels: Vec<String>,
    distances: Vec<Vec<Rational>>,
}

impl FieldMetric for LaurentLine {
    type Point = LaurentSeries;
    type Value = LaurentSeries;

    fn distance(
        &self,
        a: &LaurentSeries,
        b: &LaurentSeries,
        budget: &PrecisionBudget,
    ) -> Result<LaurentSeries, SeriesError> {
        metric(a, b, budget)
    }

    fn random_point(&self, rng: &mut SampleRng) -> LaurentSeries {
        sample::series(rng, -3, 6)
    }

    fn random_radius(&self, rng: &mut SampleRng) -> LaurentSeries {
        sample::positive_polynomial(rng, -2, 5, 3)
    }

    fn probes_within(
        &self,
        center: &LaurentSeries,
        radius: &LaurentSeries,
        rng: &mut SampleRng,
        count: usize,
    ) -> Vec<LaurentSeries> {
        let mut out = vec![center.clone()];
        out.extend((1..count).map(|_| center + &(radius * &sample::unit_multiplier(rng))));
        out
    }

    fn render_point(&self, p: &LaurentSeries, budget: &PrecisionBudget) -> String {
        p.render(budget)
    }
}

impl FieldMetric for LaurentProduct {
    type Point = SeriesVector;
    type Value = LaurentSeries;

    fn distance(
        &self,
        a: &SeriesVector,
        b: &SeriesVector,
        budget: &PrecisionBudget,
    ) -> Result<LaurentSeries, SeriesError> {
        sup_metric(a, b, budget)
    }

    fn random_point(&self, rng: &mut SampleRng) -> SeriesVector {
        SeriesVector::new(
            (0..self.arity)
                .map(|_| sample::series(rng, -3, 6))
                .collect(),
        )
    }

    fn random_radius(&self, rng: &mut SampleRng) -> LaurentSeries {
        sample::positive_polynomial(rng, -2, 5, 3)
    }

    fn probes_within(
        &self,
        center: &SeriesVector,
        radius: &LaurentSeries,
        rng: &mut SampleRng,
        count: usize,
    ) -> Vec<SeriesVector> {
        let mut out = vec![center.clone()];
        for _ in 1..count {
            let shifted = center
                .components()
                .iter()
                .map(|c| c + &(radius * &sample::unit_multiplier(rng)))
                .collect();
            out.push(SeriesVector::new(shifted));
        }
        out
    }

    fn render_point(&self, p: &SeriesVector, budget: &PrecisionBudget) -> String {
        p.display(budget.horizon)
    }
}

impl FieldMetric for RationalLine {
    type Point = Rational;
    type Value = Rational;

    fn distance(
        &self,
        a: &Rational,
        b: &Rational,
        _budget: &PrecisionBudget,
    ) -> Result<Rational, SeriesError> {
        Ok(crate::rational::abs(&(a - b)))
    }

    fn random_point(&self, rng: &mut SampleRng) -> Rational {
        sample::rational(rng, 20, 8)
    }

    fn random_radius(&self, rng: &mut SampleRng) -> Rational {
        rat(rng.gen_range(1..=16), rng.gen_range(1..=8))
    }

    fn probes_within(
        &self,
        center: &Rational,
        radius: &Rational,
        rng: &mut SampleRng,
        count: usize,
    ) -> Vec<Rational> {
        let mut out = vec![center.clone()];
        out.extend((1..count).map(|_| center + radius * sample::unit_rational_multiplier(rng)));
        out
    }

    fn render_point(&self, p: &Rational, _budget: &PrecisionBudget) -> String {
        format_rational(p)
    }
}

impl FiniteMetric {
    pub fn new(labels: Vec<String>, distances: Vec<Vec<Rational>>) -> Result<Self, BetaError> {
        let n = labels.len();
        if n == 0 || distances.len() != n || distances.iter().any(|row| row.len() != n) {
            return Err(BetaError::Malformed(
                "distance matrix does not match the carrier".into(),
            ));
        }
        Ok(Self { labels, distances })
    }

    /// `{p, q}` with `d(p, q) = 1`.
    pub fn two_point() -> Self {
        Self::new(
            vec!["p".into(), "q".into()],
            vec![vec![int(0), int(1)], vec![int(1), int(0)]],
        )
        .expect("well-formed two-point metric")
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn distances(&self) -> &[Vec<Rational>] {
        &self.distances
    }
}

impl FieldMetric for FiniteMetric {
    type Point = usize;
    type Value = Rational;

    fn distance(
        &self,
        a: &usize,
        b: &usize,
        _budget: &PrecisionBudget,
    ) -> Result<Rational, SeriesError> {
        Ok(self.distances[*a][*b].clone())
    }

    fn points(&self) -> Option<Vec<usize>> {
        Some((0..self.labels.len()).collect())
    }

    fn random_point(&self, rng: &mut SampleRng) -> usize {
        rng.gen_range(0..self.labels.len())
    }

    fn random_radius(&self, rng: &mut SampleRng) -> Rational {
        let positive: Vec<&Rational> = self
            .distances
            .iter()
            .flatten()
            .filter(|d| **d > int(0))
            .collect();
        if !positive.is_empty() && rng.gen_bool(0.5) {
            positive[rng.gen_range(0..positive.len())].clone()
        } else {
            rat(rng.gen_range(1..=12), rng.gen_range(1..=4))
        }
    }

    fn probes_within(
        &self,
        center: &usize,
        radius: &Rational,
        _rng: &mut SampleRng,
        _count: usize,
    ) -> Vec<usize> {
        (0..self.labels.len())
            .filter(|&y| self.distances[*center][y] < *radius)
            .collect()
    }

    fn render_point(&self, p: &usize, _budget: &PrecisionBudget) -> String {
        self.labels[*p].clone()
    }
}

/// Membership test restricting a field-metric space to a subspace.
pub type CarrierPredicate<P> =
    Arc<dyn Fn(&P, &PrecisionBudget) -> Result<bool, SeriesError> + Send + Sync>;

/// The beta-structure induced by a field metric.
#[derive(Clone)]
pub struct FieldMetricSpace<M: FieldMetric> {
    metric: M,
    budget: PrecisionBudget,
    carrier: Option<CarrierPredicate<M::Point>>,
}

impl<M: FieldMetric + fmt::Debug> fmt::Debug for FieldMetricSpace<M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldMetricSpace")
            .field("metric", &self.metric)
            .field("budget", &self.budget)
            .field("restricted", &self.carrier.is_some())
            .finish()
    }
}

/// Builds the induced space after spot-checking the metric on 32 seeded
/// triples.
pub fn field_metric_space<M: FieldMetric>(
    metric: M,
    budget: PrecisionBudget,
) -> Result<FieldMetricSpace<M>, BetaError> {
    let space = FieldMetricSpace {
        metric,
        budget,
        carrier: None,
    };
    space.spot_check(&mut sample_rng(0), 32)?;
    Ok(space)
}

impl<M: FieldMetric> FieldMetricSpace<M> {
    pub fn metric(&self) -> &M {
        &self.metric
    }

    pub fn budget(&self) -> &PrecisionBudget {
        &self.budget
    }

    /// The same structure on the subspace where `predicate` holds.
    pub fn restricted(mut self, predicate: CarrierPredicate<M::Point>) -> Self {
        self.carrier = Some(predicate);
        self
    }

    pub fn in_carrier(&self, p: &M::Point) -> Result<bool, BetaError> {
        match &self.carrier {
            None => Ok(true),
            Some(pred) => Ok(pred(p, &self.budget)?),
        }
    }

    pub fn distance(&self, a: &M::Point, b: &M::Point) -> Result<M::Value, BetaError> {
        Ok(self.metric.distance(a, b, &self.budget)?)
    }

    /// Symmetry, `d(a, a) = 0` and the triangle inequality on seeded
    /// triples; triples whose comparisons are undecidable are skipped.
    fn spot_check(&self, rng: &mut SampleRng, samples: usize) -> Result<(), BetaError> {
        let b = &self.budget;
        for _ in 0..samples {
            let (p, q, r) = (
                self.metric.random_point(rng),
                self.metric.random_point(rng),
                self.metric.random_point(rng),
            );
            let failure = match self.metric_failure(&p, &q, &r) {
                Ok(failure) => failure,
                Err(SeriesError::Undecidable { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            if let Some(what) = failure {
                return Err(BetaError::Precondition(format!(
                    "metric fails {what} at ({}, {}, {})",
                    self.metric.render_point(&p, b),
                    self.metric.render_point(&q, b),
                    self.metric.render_point(&r, b)
                )));
            }
        }
        Ok(())
    }

    fn metric_failure(
        &self,
        p: &M::Point,
        q: &M::Point,
        r: &M::Point,
    ) -> Result<Option<&'static str>, SeriesError> {
        let (m, b) = (&self.metric, &self.budget);
        let pq = m.distance(p, q, b)?;
        if m.distance(p, p, b)?.sign(b)? != Sign::Zero {
            return Ok(Some("d(a, a) = 0"));
        }
        if pq.compare(&m.distance(q, p, b)?, b)? != Ordering::Equal {
            return Ok(Some("symmetry"));
        }
        let detour = pq.plus(&m.distance(q, r, b)?);
        if m.distance(p, r, b)?.compare(&detour, b)? == Ordering::Greater {
            return Ok(Some("the triangle inequality"));
        }
        Ok(None)
    }

    fn check_radius(&self, r: &M::Value) -> Result<(), BetaError> {
        if r.sign(&self.budget)? != Sign::Positive {
            return Err(BetaError::NonPositiveRadius(r.render(&self.budget)));
        }
        Ok(())
    }

    fn finite_swing_holds(
        &self,
        points: &[M::Point],
        r: &M::Value,
        s: &M::Value,
    ) -> Result<bool, BetaError> {
        for z in points {
            let ball: Vec<&M::Point> = points
                .iter()
                .filter_map(|y| {
                    self.in_ball(z, s, y)
                        .map(|inside| inside.then_some(y))
                        .transpose()
                })
                .collect::<Result<_, _>>()?;
            for y in &ball {
                for w in &ball {
                    if !self.in_ball(y, r, w)? {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

impl<M: FieldMetric> BetaSpace for FieldMetricSpace<M> {
    type Point = M::Point;
    type Radius = M::Value;

    fn in_ball(
        &self,
        center: &M::Point,
        radius: &M::Value,
        z: &M::Point,
    ) -> Result<bool, BetaError> {
        self.check_radius(radius)?;
        if !self.in_carrier(z)? {
            return Ok(false);
        }
        Ok(self.distance(center, z)?.compare(radius, &self.budget)? == Ordering::Less)
    }

    fn swing(&self, radius: &M::Value) -> Result<M::Value, BetaError> {
        self.check_radius(radius)?;
        Ok(radius.half())
    }

    /// Exhaustive on finite carriers; elsewhere `0 < s ≤ r/2`, which the
    /// triangle inequality makes sufficient.
    fn is_swing_value(&self, radius: &M::Value, candidate: &M::Value) -> Result<bool, BetaError> {
        self.check_radius(radius)?;
        if candidate.sign(&self.budget)? != Sign::Positive {
            return Ok(false);
        }
        match self.metric.points() {
            Some(points) => self.finite_swing_holds(&points, radius, candidate),
            None => Ok(candidate.compare(&radius.half(), &self.budget)? != Ordering::Greater),
        }
    }

    fn radial_cmp(&self, r: &M::Value, s: &M::Value) -> Result<Option<Ordering>, BetaError> {
        self.check_radius(r)?;
        self.check_radius(s)?;
        let Some(points) = self.metric.points() else {
            return Ok(Some(r.compare(s, &self.budget)?));
        };
        let (mut r_in_s, mut s_in_r) = (true, true);
        for x in &points {
            for y in &points {
                let (a, b) = (self.in_ball(x, r, y)?, self.in_ball(x, s, y)?);
                r_in_s &= !a || b;
                s_in_r &= !b || a;
            }
        }
        Ok(match (r_in_s, s_in_r) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        })
    }

    fn ball_witnesses(
        &self,
        center: &M::Point,
        radius: &M::Value,
        rng: &mut SampleRng,
        count: usize,
    ) -> Result<Vec<M::Point>, BetaError> {
        let mut out = Vec::new();
        for p in self.metric.probes_within(center, radius, rng, count) {
            if self.in_ball(center, radius, &p)? {
                out.push(p);
            }
        }
        Ok(out)
    }

    fn points(&self) -> Option<Vec<M::Point>> {
        let points = self.metric.points()?;
        Some(
            points
                .into_iter()
                .filter(|p| self.in_carrier(p).unwrap_or(false))
                .collect(),
        )
    }

    fn radii(&self) -> Option<Vec<M::Value>> {
        None
    }

    fn sample_point(&self, rng: &mut SampleRng) -> M::Point {
        self.metric.random_point(rng)
    }

    fn sample_radius(&self, rng: &mut SampleRng) -> M::Value {
        self.metric.random_radius(rng)
    }

    fn describe_point(&self, p: &M::Point) -> String {
        self.metric.render_point(p, &self.budget)
    }

    fn describe_radius(&self, r: &M::Value) -> String {
        r.render(&self.budget)
    }
}
