//! Seeded property suites. Each suite draws every sample from one
//! ChaCha stream seeded with `seed`, so equal configurations produce
//! byte-identical reports.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::Signed;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beta::{
    check_axioms, field_metric_space, geometric_series_check, max_swing_merge, radial_leq,
    sample_rng, swing_sequence, validate_swing_sequence, BetaError, BetaSpace, FieldMetric,
    FieldMetricSpace, FiniteBetaSpace, GeometricInstance, LaurentLine, RadialLeq, RationalLine,
    SampleRng,
};
use crate::field::OrderedField;
use crate::laurent::{LaurentSeries, PrecisionBudget, SeriesError, SeriesVector};
use crate::level::{
    cdlb_gap, certify_contraction, cmt_solve, level_equality_check, orbit_r_cauchy, product_space,
    AffineMap, LevelError, LevelOrder, LevelStructure, RLimitCheck, SeriesMap, SolveOptions,
};
use crate::rational::{int, rat, Rational};
use crate::sample;
use crate::uniformity::{beta_to_uniformity, random_symmetric_structure, roundtrip_check};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    FieldLaws,
    BetaAxioms,
    Swing,
    GeometricSeries,
    Levels,
    Uniformity,
    Contraction,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::FieldLaws,
        Suite::BetaAxioms,
        Suite::Swing,
        Suite::GeometricSeries,
        Suite::Levels,
        Suite::Uniformity,
        Suite::Contraction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::FieldLaws => "field-laws",
            Suite::BetaAxioms => "beta-axioms",
            Suite::Swing => "swing",
            Suite::GeometricSeries => "geometric-series",
            Suite::Levels => "levels",
            Suite::Uniformity => "uniformity",
            Suite::Contraction => "contraction",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown suite '{0}'; expected one of field-laws, beta-axioms, swing, geometric-series, levels, uniformity, contraction")]
pub struct UnknownSuite(pub String);

impl FromStr for Suite {
    type Err = UnknownSuite;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| UnknownSuite(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    pub budget: PrecisionBudget,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub sample: usize,
    pub check: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub samples: usize,
    pub passed: usize,
    pub failed: usize,
    pub checks: BTreeMap<String, Tally>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_counterexample: Option<Counterexample>,
}

impl SuiteReport {
    pub fn clean(&self) -> bool {
        self.failed == 0
    }

    pub fn check(&self, name: &str) -> Tally {
        self.checks.get(name).cloned().unwrap_or_default()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "suite {} seed {} samples {}: {} passed, {} failed\n",
            self.suite, self.seed, self.samples, self.passed, self.failed
        );
        for (name, t) in &self.checks {
            out += &format!(
                "  {name}: {} passed, {} failed, {} skipped\n",
                t.passed, t.failed, t.skipped
            );
        }
        if let Some(c) = &self.first_counterexample {
            out += &format!(
                "first counterexample (sample {}, {}): {}\n",
                c.sample, c.check, c.detail
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

enum Outcome {
    Pass,
    Fail(String),
    Skip,
}

/// Collects named outcomes for one sample.
struct Sample<'a> {
    index: usize,
    report: &'a mut SuiteReport,
    failed: bool,
}

impl Sample<'_> {
    fn record(&mut self, check: &str, outcome: Outcome) {
        let tally = self.report.checks.entry(check.to_string()).or_default();
        match outcome {
            Outcome::Pass => tally.passed += 1,
            Outcome::Skip => tally.skipped += 1,
            Outcome::Fail(detail) => {
                tally.failed += 1;
                self.failed = true;
                if self.report.first_counterexample.is_none() {
                    self.report.first_counterexample = Some(Counterexample {
                        sample: self.index,
                        check: check.to_string(),
                        detail,
                    });
                }
            }
        }
    }

    /// Pass when `Ok(None)`, fail with the detail on `Ok(Some(_))`, skip on
    /// undecidable comparisons and fail on any other error.
    fn check(&mut self, name: &str, result: Result<Option<String>, LevelError>) {
        let outcome = match result {
            Ok(None) => Outcome::Pass,
            Ok(Some(detail)) => Outcome::Fail(detail),
            Err(e) if is_undecidable(&e) => Outcome::Skip,
            Err(e) => Outcome::Fail(e.to_string()),
        };
        self.record(name, outcome);
    }

    fn expect(&mut self, name: &str, holds: bool, detail: impl FnOnce() -> String) {
        self.record(
            name,
            if holds {
                Outcome::Pass
            } else {
                Outcome::Fail(detail())
            },
        );
    }
}

fn is_undecidable(e: &LevelError) -> bool {
    matches!(
        e,
        LevelError::Beta(BetaError::Series(SeriesError::Undecidable { .. }))
            | LevelError::Limit(crate::laurent::LimitError::Series(
                SeriesError::Undecidable { .. }
            ))
    )
}

pub fn run_suite(suite: Suite, config: &SuiteConfig) -> SuiteReport {
    let mut report = SuiteReport {
        suite,
        seed: config.seed,
        samples: config.samples,
        passed: 0,
        failed: 0,
        checks: BTreeMap::new(),
        first_counterexample: None,
    };
    let mut rng = sample_rng(config.seed);
    let ctx = Context::new(config.budget);
    for index in 0..config.samples {
        let mut sample = Sample {
            index,
            report: &mut report,
            failed: false,
        };
        match suite {
            Suite::FieldLaws => field_laws(&ctx, &mut rng, &mut sample),
            Suite::BetaAxioms => beta_axioms(&ctx, &mut rng, &mut sample),
            Suite::Swing => swing(&ctx, &mut rng, &mut sample),
            Suite::GeometricSeries => geometric(&ctx, &mut rng, &mut sample, index),
            Suite::Levels => levels(&ctx, &mut rng, &mut sample),
            Suite::Uniformity => uniformity(&mut rng, &mut sample),
            Suite::Contraction => contraction(&ctx, &mut rng, &mut sample),
        }
        if sample.failed {
            report.failed += 1;
        } else {
            report.passed += 1;
        }
    }
    report
}

struct Context {
    budget: PrecisionBudget,
    line: FieldMetricSpace<LaurentLine>,
    rationals: FieldMetricSpace<RationalLine>,
}

impl Context {
    fn new(budget: PrecisionBudget) -> Self {
        Self {
            budget,
            line: field_metric_space(LaurentLine, budget)
                .expect("the Laurent metric passes its spot check"),
            rationals: field_metric_space(RationalLine, budget)
                .expect("the rational metric passes its spot check"),
        }
    }
}

fn show(s: &LaurentSeries, budget: &PrecisionBudget) -> String {
    s.display(budget.horizon.min(12)).to_string()
}

fn field_laws(ctx: &Context, rng: &mut SampleRng, sample: &mut Sample<'_>) {
    let h = ctx.budget.horizon;
    let (a, b, c) = (
        sample::series(rng, -3, 6),
        sample::series(rng, -3, 6),
        sample::series(rng, -3, 6),
    );
    let triple = || {
        format!(
            "a = {}, b = {}, c = {}",
            show(&a, &ctx.budget),
            show(&b, &ctx.budget),
            show(&c, &ctx.budget)
        )
    };
    let laws: [(&str, LaurentSeries, LaurentSeries); 7] = [
        ("add-associative", &(&a + &b) + &c, &a + &(&b + &c)),
        ("add-commutative", &a + &b, &b + &a),
        ("mul-associative", &(&a * &b) * &c, &a * &(&b * &c)),
        ("mul-commutative", &a * &b, &b * &a),
        ("distributive", &a * &(&b + &c), &(&a * &b) + &(&a * &c)),
        ("additive-inverse", &a + &(-&a), LaurentSeries::zero()),
        ("subtraction", &(&a - &b) + &b, a.clone()),
    ];
    for (name, left, right) in laws {
        sample.expect(name, left.agrees_to(&right, h), triple);
    }
    let outcome = match a.invert(&ctx.budget) {
        Ok(inv) => {
            if (&a * &inv).agrees_to(&LaurentSeries::one(), h) {
                Outcome::Pass
            } else {
                Outcome::Fail(triple())
            }
        }
        Err(SeriesError::ZeroDivisor { .. }) => Outcome::Skip,
        Err(e) => Outcome::Fail(e.to_string()),
    };
    sample.record("multiplicative-inverse", outcome);
}

fn beta_axioms(ctx: &Context, rng: &mut SampleRng, sample: &mut Sample<'_>) {
    let space = &ctx.line;
    let x = space.sample_point(rng);
    let r = space.sample_radius(rng);
    let result = (|| -> Result<(Option<String>, Option<String>), LevelError> {
        let first = (!space.in_ball(&x, &r, &x)?).then(|| {
            format!(
                "x = {} ∉ β(x, {})",
                show(&x, &ctx.budget),
                show(&r, &ctx.budget)
            )
        });
        let s = space.swing(&r)?;
        if s != r.half() || !space.is_swing_value(&r, &s)? {
            return Ok((
                first,
                Some(format!("swing of {} is not r/2", show(&r, &ctx.budget))),
            ));
        }
        let y = &x + &(&s * &sample::unit_multiplier(rng).truncate(8));
        if !space.in_ball(&x, &s, &y)? {
            return Ok((first, Some("constructed y is outside β(x, s)".into())));
        }
        let fourth = space.ball_contained((&x, &s), (&y, &r), rng, 16)?.map(|w| {
            format!(
                "x = {}, y = {}, r = {}: {} ∈ β(x, r/2) but ∉ β(y, r)",
                show(&x, &ctx.budget),
                show(&y, &ctx.budget),
                show(&r, &ctx.budget),
                show(&w, &ctx.budget)
            )
        });
        Ok((first, fourth))
    })();
    match result {
        Ok((first, fourth)) => {
            sample.check("axiom-1", Ok(first));
            sample.check("axiom-4", Ok(fourth));
        }
        Err(e) => {
            sample.check("axiom-1", Err(e.clone()));
            sample.check("axiom-4", Err(e));
        }
    }
}

/// A radius `r·q` with `q ∈ (0, 1/2]`, so a swing value of `r` on a
/// field-metric line.
fn shrink<R: Rng>(rng: &mut R, r: &LaurentSeries) -> LaurentSeries {
    let q = rat(rng.gen_range(1..=4), rng.gen_range(8..=16));
    if rng.gen_bool(0.3) {
        r * &LaurentSeries::monomial(q, rng.gen_range(1..=2))
    } else {
        r.scale(&q)
    }
}

fn swing(ctx: &Context, rng: &mut SampleRng, sample: &mut Sample<'_>) {
    let space = &ctx.line;
    let r = space.sample_radius(rng);
    let result = (|| -> Result<Option<String>, LevelError> {
        let halving = swing_sequence(space, &r, 6)?;
        let mut other = vec![r.clone()];
        for _ in 1..6 {
            let next = shrink(rng, other.last().expect("nonempty"));
            other.push(next);
        }
        let other = validate_swing_sequence(space, other)?;
        let merged = max_swing_merge(space, &halving, &other)?;
        for (k, m) in merged.values().iter().enumerate() {
            let (a, b) = (halving.term(k + 1), other.term(k + 1));
            if m.compare(a, &ctx.budget)? == Ordering::Less
                || m.compare(b, &ctx.budget)? == Ordering::Less
            {
                return Ok(Some(format!("merged term {} is below an input", k + 1)));
            }
        }
        Ok(None)
    })();
    sample.check("merge", result);

    let q = &ctx.rationals;
    let rq = q.sample_radius(rng);
    let result = (|| -> Result<Option<String>, LevelError> {
        let halving = swing_sequence(q, &rq, 6)?;
        let mut third: Vec<Rational> = vec![rq.clone()];
        for _ in 1..6 {
            let next = third.last().expect("nonempty") * rat(1, rng.gen_range(2..=5));
            third.push(next);
        }
        let third = validate_swing_sequence(q, third)?;
        max_swing_merge(q, &halving, &third)?;
        Ok(None)
    })();
    sample.check("merge-rational", result);

    let s = space.sample_radius(rng);
    let result = (|| -> Result<Option<String>, LevelError> {
        let leq = radial_leq(space, &r, &s)?;
        let expected = if r.compare(&s, &ctx.budget)? == Ordering::Greater {
            RadialLeq::False
        } else {
            RadialLeq::True
        };
        if leq != expected {
            return Ok(Some(format!(
                "radial_leq({}, {}) = {leq:?}",
                show(&r, &ctx.budget),
                show(&s, &ctx.budget)
            )));
        }
        let level = space.level_leq(&r, &s)?;
        if leq == RadialLeq::True && level == LevelOrder::Greater {
            return Ok(Some(format!(
                "{} ≤ {} but level order is greater",
                show(&r, &ctx.budget),
                show(&s, &ctx.budget)
            )));
        }
        Ok(None)
    })();
    sample.check("ordered-implies-level-ordered", result);
}

/// An admissible instance on a line: `s = swing(r)`-like, `t` likewise,
/// `t_{n+1} ≤ t_n / 2` and each step `a_{n+1} ∈ β(a_n, t_n)`.
fn line_instance<M: FieldMetric>(
    space: &FieldMetricSpace<M>,
    rng: &mut SampleRng,
    shrink_by: impl Fn(&mut SampleRng, &M::Value) -> M::Value,
    len: usize,
) -> GeometricInstance<M::Point, M::Value> {
    let r = space.sample_radius(rng);
    let s = shrink_by(rng, &r);
    let t = shrink_by(rng, &s);
    let mut t_seq = vec![t.clone()];
    while t_seq.len() < len {
        let next = shrink_by(rng, t_seq.last().expect("nonempty"));
        t_seq.push(next);
    }
    let mut orbit = vec![space.sample_point(rng)];
    for n in 1..len {
        let step = space
            .metric()
            .probes_within(&orbit[n - 1], &t_seq[n - 1], rng, 2);
        orbit.push(step.last().expect("probe").clone());
    }
    let p = rng.gen_bool(0.5).then(|| {
        let mut p = r.plus(&r);
        for _ in 0..rng.gen_range(0..3) {
            p = p.plus(&r);
        }
        p
    });
    GeometricInstance {
        r,
        s,
        t,
        t_seq,
        orbit,
        p,
    }
}

fn finite_fixtures() -> Vec<FiniteBetaSpace> {
    let three = FiniteBetaSpace::from_metric(
        FiniteBetaSpace::default_labels(3),
        &[
            vec![int(0), int(1), int(3)],
            vec![int(1), int(0), int(2)],
            vec![int(3), int(2), int(0)],
        ],
        &[rat(1, 2), int(2), int(4)],
    )
    .expect("well-formed metric fixture");
    vec![
        FiniteBetaSpace::two_point(&[rat(1, 2), int(2)]),
        FiniteBetaSpace::discrete(3),
        FiniteBetaSpace::indiscrete(2),
        three,
    ]
}

/// A random admissible instance on a finite fixture, or `None` when the
/// drawn radius has no swing chain.
fn finite_instance(
    space: &FiniteBetaSpace,
    rng: &mut SampleRng,
    len: usize,
) -> Option<GeometricInstance<usize, usize>> {
    let pick = |rng: &mut SampleRng, options: Vec<usize>| {
        (!options.is_empty()).then(|| options[rng.gen_range(0..options.len())])
    };
    let r = rng.gen_range(0..space.radius_count());
    let s = pick(rng, space.swing_values(r))?;
    let t = pick(rng, space.swing_values(s))?;
    let mut t_seq = vec![t];
    while t_seq.len() < len {
        let next = pick(rng, space.swing_values(*t_seq.last().expect("nonempty")))?;
        t_seq.push(next);
    }
    let mut orbit = vec![rng.gen_range(0..space.point_count())];
    for n in 1..len {
        let ball: Vec<usize> = space.ball(orbit[n - 1], t_seq[n - 1]).iter().collect();
        orbit.push(pick(rng, ball)?);
    }
    let p = pick(
        rng,
        (0..space.radius_count())
            .filter(|&p| space.swing_holds(p, r))
            .collect(),
    );
    Some(GeometricInstance {
        r,
        s,
        t,
        t_seq,
        orbit,
        p,
    })
}

fn geometric(ctx: &Context, rng: &mut SampleRng, sample: &mut Sample<'_>, index: usize) {
    let len = rng.gen_range(2..=8);
    let seed = rng.gen();
    let verdict = |v: Result<crate::beta::GeometricVerdict, BetaError>| -> Result<Option<String>, LevelError> {
        let v = v?;
        Ok((!v.passed()).then(|| format!("{v:?}")))
    };
    match index % 3 {
        0 => {
            let inst = line_instance(&ctx.line, rng, shrink, len);
            sample.check(
                "laurent",
                verdict(geometric_series_check(&ctx.line, &inst, 64, seed)),
            );
        }
        1 => {
            let inst = line_instance(
                &ctx.rationals,
                rng,
                |rng, r| r * rat(1, rng.gen_range(2..=5)),
                len,
            );
            sample.check(
                "rational",
                verdict(geometric_series_check(&ctx.rationals, &inst, 64, seed)),
            );
        }
        _ => {
            let fixtures = finite_fixtures();
            let space = &fixtures[rng.gen_range(0..fixtures.len())];
            match finite_instance(space, rng, len) {
                Some(inst) => sample.check(
                    "finite",
                    verdict(geometric_series_check(space, &inst, 0, seed)),
                ),
                None => sample.record("finite", Outcome::Skip),
            }
        }
    }
}

/// Exponent of the first coefficient where `a` and `b` differ below
/// `limit`, computed straight from the coefficients.
fn first_difference(a: &LaurentSeries, b: &LaurentSeries, limit: i64) -> Option<i64> {
    let from = a.lower_bound().min(b.lower_bound());
    (from..=limit).find(|&i| a.coefficient(i) != b.coefficient(i))
}

fn levels(ctx: &Context, rng: &mut SampleRng, sample: &mut Sample<'_>) {
    let space = &ctx.line;
    let x = sample::polynomial(rng, -3, 6, 4);
    let r = space.sample_radius(rng);
    let n = r
        .valuation(&ctx.budget)
        .expect("sampled radii are polynomials");
    let z = match rng.gen_range(0..4) {
        0 => x.clone(),
        1 => sample::polynomial(rng, -3, 6, 4),
        _ => {
            &x + &LaurentSeries::monomial(
                sample::nonzero_rational(rng, 9, 4),
                n + rng.gen_range(-1..=2),
            )
        }
    };
    let result = (|| -> Result<Option<String>, LevelError> {
        let member = space.level_membership(&x, &r, &z)?;
        let oracle = first_difference(&x, &z, n).is_none();
        Ok((member != oracle).then(|| {
            format!(
                "x = {}, r = {}, z = {}: membership {member}, valuation test {oracle}",
                show(&x, &ctx.budget),
                show(&r, &ctx.budget),
                show(&z, &ctx.budget)
            )
        }))
    })();
    sample.check("membership", result);

    let y = &x + &(&LaurentSeries::monomial(int(1), n + 1) * &sample::series(rng, 0, 4));
    let probe_seed: u64 = rng.gen();
    let result = (|| -> Result<Option<String>, LevelError> {
        if !space.level_membership(&x, &r, &y)? {
            return Ok(None);
        }
        let eq = level_equality_check(space, &x, &y, &r, 32, &mut sample_rng(probe_seed))?;
        Ok((!eq.holds()).then(|| {
            format!(
                "L(x, r) ≠ L(y, r) for x = {}, y = {}: {eq:?}",
                show(&x, &ctx.budget),
                show(&y, &ctx.budget)
            )
        }))
    })();
    sample.check("class-equality", result);

    let s = &r
        * &LaurentSeries::monomial(
            Signed::abs(&sample::nonzero_rational(rng, 5, 3)),
            rng.gen_range(1..=3),
        );
    let result = (|| -> Result<Option<String>, LevelError> {
        if space.level_leq(&s, &r)? != LevelOrder::Less {
            return Ok(Some("s = r·x^k is not level-smaller".into()));
        }
        let mut probe_rng = sample_rng(probe_seed ^ 1);
        for w in space.ball_witnesses(&x, &s, &mut probe_rng, 16)? {
            if !space.level_membership(&x, &r, &w)? {
                return Ok(Some(format!(
                    "{} ∈ β(x, s) but ∉ L(x, r)",
                    show(&w, &ctx.budget)
                )));
            }
        }
        for w in space.level_probes(&x, &s, &mut probe_rng, 16)? {
            if space.level_membership(&x, &s, &w)? && !space.in_ball(&x, &r, &w)? {
                return Ok(Some(format!(
                    "{} ∈ L(x, s) but ∉ β(x, r)",
                    show(&w, &ctx.budget)
                )));
            }
        }
        Ok(None)
    })();
    sample.check("level-less-than", result);

    let start = rng.gen_range(-3..=3);
    let mut valuation = start;
    let mut chain = Vec::with_capacity(12);
    for _ in 0..12 {
        chain.push(
            LaurentSeries::monomial(rat(rng.gen_range(1..=9), rng.gen_range(1..=4)), valuation)
                + LaurentSeries::monomial(int(1), valuation + 20),
        );
        valuation += rng.gen_range(1..=2);
    }
    let target = LaurentSeries::monomial(rat(rng.gen_range(1..=9), 2), rng.gen_range(-3..=6));
    let result = (|| -> Result<Option<String>, LevelError> {
        let m = cdlb_gap(space, &target, &chain)?;
        Ok(
            (m == 0 || space.level_leq(&chain[m - 1], &target)? != LevelOrder::Less)
                .then(|| format!("index {m} is not below the target")),
        )
    })();
    sample.check("cdlb-gap", result);
}

fn uniformity(rng: &mut SampleRng, sample: &mut Sample<'_>) {
    let n = rng.gen_range(2..=4);
    let space = random_symmetric_structure(rng, n);
    let result = (|| -> Result<Option<String>, BetaError> {
        let axioms = check_axioms(&space, 0, 0);
        if !axioms.all_hold() {
            return Ok(Some(axioms.to_text()));
        }
        Ok(None)
    })();
    sample.check("axioms", result.map_err(LevelError::from));
    let bridge = match (beta_to_uniformity(&space), roundtrip_check(&space)) {
        (Ok(u), Ok(rt)) => {
            let report = u.check();
            if !report.all_hold() {
                Some(format!("uniformity axioms fail: {report:?}"))
            } else if !rt.passed() {
                Some(rt.mismatch.unwrap_or_else(|| "round trip differs".into()))
            } else {
                None
            }
        }
        (Err(e), _) | (_, Err(e)) => Some(e.to_string()),
    };
    sample.check("roundtrip", Ok(bridge));
}

/// Affine contraction with either a rational multiplier of modulus at most
/// 1/2 or a standard part below 1 plus an infinitesimal.
pub fn random_affine(rng: &mut SampleRng, infinitesimal: bool) -> AffineMap {
    let a = if infinitesimal {
        let d = rng.gen_range(2..=10);
        let standard = rat(rng.gen_range(-(d - 1)..=d - 1), d);
        LaurentSeries::constant(standard) + sample::nonzero_polynomial(rng, 1, 4, 2)
    } else {
        let d = rng.gen_range(2..=12);
        let q = rat(rng.gen_range(1..=d / 2), d);
        LaurentSeries::constant(if rng.gen_bool(0.5) { q } else { -q })
    };
    AffineMap::scalar(a, sample::series(rng, -3, 6))
}

fn contraction(ctx: &Context, rng: &mut SampleRng, sample: &mut Sample<'_>) {
    let h = ctx.budget.horizon;
    let infinitesimal = rng.gen_bool(0.3);
    let map = random_affine(rng, infinitesimal);
    let x0 = SeriesVector::scalar(sample::series(rng, -3, 6));
    let x1 = SeriesVector::scalar(sample::series(rng, -3, 6));
    let description = map.describe();
    let space = product_space(1, ctx.budget).expect("the product metric passes its spot check");
    let cert = match certify_contraction(map, &ctx.budget) {
        Ok(c) => c,
        Err(e) => {
            sample.check("certify", Err(e));
            return;
        }
    };
    sample.check("certify", Ok(None));
    let options = SolveOptions::default();
    let first = cmt_solve(&space, &cert, &x0, &options);
    let result = first.as_ref().map_err(Clone::clone).map(|r| {
        (r.closed_form_agrees != Some(true) || !r.residual_valuation.exceeds(h)).then(|| {
            format!(
                "{description}: got {} with residual valuation {}",
                r.render_point(),
                r.residual_valuation
            )
        })
    });
    sample.check("closed-form", result);
    if let Ok(first) = &first {
        let second = cmt_solve(&space, &cert, &x1, &options).map(|r| {
            (r.render_point() != first.render_point())
                .then(|| format!("{description}: fixed points differ between starts"))
        });
        sample.check("uniqueness", second);
    }
    let invariant =
        orbit_r_cauchy(&space, &cert, &x1, &RLimitCheck::default()).and_then(|report| {
            let image = cert.map().apply(report.representative()).truncate(h + 4);
            Ok((!report.limit_class.contains(&space, &image)?)
                .then(|| format!("{description}: f(A) ⊄ A")))
        });
    sample.check("image-of-limit-class", invariant);
}
