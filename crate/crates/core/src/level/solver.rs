//! Orbits, r-convergence and the level-descent fixed-point solver on `𝕃ⁿ`.

use std::cell::RefCell;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use serde::{Deserialize, Serialize};

use super::{
    level_of, level_structured_witness, r_limit, structured_witness, CertificateKind,
    ContractionCertificate, LevelClass, LevelError, RLimitCheck,
};
use crate::beta::{
    field_metric_space, swing_sequence, CarrierPredicate, FieldMetricSpace, LaurentProduct,
    SwingSequence,
};
use crate::laurent::{LaurentSeries, PrecisionBudget, SeriesError, SeriesVector, Sign};
use crate::rational::Rational;

/// Extra exponents kept past the horizon while iterating.
const SLACK: i64 = 4;

/// `𝕃ⁿ` with the sup metric.
pub fn product_space(
    arity: usize,
    budget: PrecisionBudget,
) -> Result<FieldMetricSpace<LaurentProduct>, LevelError> {
    Ok(field_metric_space(LaurentProduct { arity }, budget)?)
}

/// Points of `𝕃ⁿ` whose first component is infinitesimally close to a
/// rational strictly between 0 and 1.
pub fn unit_interval_carrier() -> CarrierPredicate<SeriesVector> {
    Arc::new(|p: &SeriesVector, _budget: &PrecisionBudget| {
        let c = p.component(0);
        let lower = c.lower_bound();
        if lower < 0 && c.coefficients(lower, -1).iter().any(|q| !q.is_zero()) {
            return Ok(false);
        }
        let standard = c.coefficient(0);
        Ok(standard.is_positive() && standard < Rational::one())
    })
}

/// Memoized orbit `f^0(x), f^1(x), …`, each iterate truncated past `cutoff`.
struct Orbit<'a> {
    cert: &'a ContractionCertificate,
    cutoff: i64,
    terms: RefCell<Vec<SeriesVector>>,
}

impl<'a> Orbit<'a> {
    fn new(cert: &'a ContractionCertificate, x: &SeriesVector, cutoff: i64) -> Self {
        Self {
            cert,
            cutoff,
            terms: RefCell::new(vec![x.truncate(cutoff)]),
        }
    }

    fn at(&self, n: usize) -> SeriesVector {
        let mut terms = self.terms.borrow_mut();
        while terms.len() <= n {
            let next = self
                .cert
                .map()
                .apply(terms.last().expect("orbit starts at x"))
                .truncate(self.cutoff);
            terms.push(next);
        }
        terms[n].clone()
    }

    fn first(&self, count: usize) -> Vec<SeriesVector> {
        (1..=count).map(|i| self.at(i)).collect()
    }
}

/// The orbit of `x` seen at one radius: the proof's swing sequence and
/// moduli, and the level class every r-limit of the orbit lies in.
#[derive(Clone, Debug)]
pub struct RConvergenceReport {
    pub radius: LaurentSeries,
    pub swing_seq: SwingSequence<LaurentSeries>,
    /// `moduli[k - 1] = (k + 3)·N`.
    pub moduli: Vec<usize>,
    pub cauchy_pairs: usize,
    pub limit_class: LevelClass<SeriesVector>,
    pub representative_in_carrier: bool,
}

impl RConvergenceReport {
    pub fn representative(&self) -> &SeriesVector {
        &self.limit_class.base
    }

    /// No representative inside the carrier was found.
    pub fn empty_within_budget(&self) -> bool {
        !self.representative_in_carrier
    }

    pub fn to_text(&self, horizon: i64) -> String {
        format!(
            "radius {}\nvaluation {}\nmoduli {:?}\ncauchy-pairs {}\nrepresentative {}\nin-carrier {}\n",
            self.radius.display(horizon),
            self.limit_class.valuation,
            self.moduli,
            self.cauchy_pairs,
            self.limit_class.base.display(horizon),
            self.representative_in_carrier
        )
    }
}

/// Runs the orbit of `x` at the radius `r = 2·max_{i ≤ N} d(x, f^i x)`,
/// samples the r-Cauchy condition and finds the limit class.
pub fn orbit_r_cauchy(
    space: &FieldMetricSpace<LaurentProduct>,
    cert: &ContractionCertificate,
    x: &SeriesVector,
    check: &RLimitCheck,
) -> Result<RConvergenceReport, LevelError> {
    check_arity(space, cert, x)?;
    let horizon = space.budget().horizon;
    let orbit = Orbit::new(cert, x, horizon + SLACK);
    let r = structured_witness(space, &orbit.at(0), &orbit.first(cert.degree()))?;
    let cutoff = r.valuation(space.budget())?.min(horizon) + SLACK;
    r_convergence(space, cert, &Orbit::new(cert, x, cutoff), r, check)
}

fn check_arity(
    space: &FieldMetricSpace<LaurentProduct>,
    cert: &ContractionCertificate,
    x: &SeriesVector,
) -> Result<(), LevelError> {
    let arity = space.metric().arity;
    if cert.map().arity() != arity || x.arity() != arity {
        return Err(LevelError::Arity {
            map: cert.map().arity(),
            point: x.arity(),
        });
    }
    Ok(())
}

fn r_convergence(
    space: &FieldMetricSpace<LaurentProduct>,
    cert: &ContractionCertificate,
    orbit: &Orbit<'_>,
    r: LaurentSeries,
    check: &RLimitCheck,
) -> Result<RConvergenceReport, LevelError> {
    let budget = space.budget();
    let n = cert.degree();
    let swing_seq = swing_sequence(space, &r, check.levels.max(1))?;
    let moduli: Vec<usize> = (1..=swing_seq.len()).map(|k| (k + 3) * n).collect();
    let window = check.window.max(3);
    let mut cauchy_pairs = 0;
    for (k, rk) in swing_seq.values().iter().enumerate() {
        let from = moduli[k];
        for i in from..from + window {
            for j in i + 1..from + window {
                if !space
                    .distance(&orbit.at(i), &orbit.at(j))?
                    .less_than(rk, budget)?
                {
                    return Err(LevelError::NotRCauchy {
                        level: k + 1,
                        n: i,
                        m: j,
                    });
                }
                cauchy_pairs += 1;
            }
        }
    }
    let seq = |m: usize| orbit.at(m);
    let modulus = |k: usize| moduli[(k - 1).min(moduli.len() - 1)];
    let rep = r_limit(&seq, &r, &modulus, check, budget)?;
    let limit_class = LevelClass::of(space, &rep, &r)?;
    let representative_in_carrier = space.in_carrier(&rep)?;
    Ok(RConvergenceReport {
        radius: r,
        swing_seq,
        moduli,
        cauchy_pairs,
        limit_class,
        representative_in_carrier,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub stage_budget: usize,
    pub check: RLimitCheck,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            stage_budget: 256,
            check: RLimitCheck::default(),
        }
    }
}

/// Valuation of a residual `d(f(x), x)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum ResidualValuation {
    /// The residual is the zero series.
    Infinite,
    Exact(i64),
    /// Every coefficient up to the given exponent vanishes.
    Beyond(i64),
}

impl ResidualValuation {
    pub fn exceeds(&self, horizon: i64) -> bool {
        match self {
            ResidualValuation::Infinite => true,
            ResidualValuation::Exact(v) | ResidualValuation::Beyond(v) => *v > horizon,
        }
    }

    fn sort_key(&self) -> (i64, u8) {
        match self {
            ResidualValuation::Infinite => (i64::MAX, 2),
            ResidualValuation::Exact(v) => (*v, 0),
            ResidualValuation::Beyond(v) => (*v, 1),
        }
    }

    fn of(s: &LaurentSeries, horizon: i64) -> Result<Self, SeriesError> {
        let depth = (horizon - s.lower_bound()).max(0) as usize + 64;
        match level_of(s, &PrecisionBudget::new(horizon, depth)) {
            Ok(None) => Ok(Self::Infinite),
            Ok(Some(v)) => Ok(Self::Exact(v)),
            Err(SeriesError::Undecidable { to, .. }) => Ok(Self::Beyond(to)),
            Err(e) => Err(e),
        }
    }
}

impl std::fmt::Display for ResidualValuation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ResidualValuation::Infinite => write!(f, "∞"),
            ResidualValuation::Exact(v) => write!(f, "{v}"),
            ResidualValuation::Beyond(v) => write!(f, "> {v}"),
        }
    }
}

/// One level-descent stage: `x_k`, the radius `r_k` it was run at and the
/// residual of `x_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: usize,
    pub radius_valuation: i64,
    pub point: String,
    pub residual_valuation: ResidualValuation,
}

#[derive(Clone, Debug)]
pub struct FixedPointResult {
    pub fixed_point: SeriesVector,
    pub horizon: i64,
    pub trace: Vec<StageRecord>,
    /// `f(x*) - x*`.
    pub residual: SeriesVector,
    pub residual_valuation: ResidualValuation,
    /// `f(x*) = x*` holds exactly, not just to the horizon.
    pub exact: bool,
    pub certificate: CertificateKind,
    pub closed_form_agrees: Option<bool>,
}

/// Serializable view of a [`FixedPointResult`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixedPointSummary {
    pub fixed_point: String,
    pub horizon: i64,
    pub stages: usize,
    pub trace: Vec<StageRecord>,
    pub residual_valuation: ResidualValuation,
    pub exact: bool,
    pub certificate: CertificateKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_agrees: Option<bool>,
}

impl FixedPointResult {
    pub fn stage_count(&self) -> usize {
        self.trace.len()
    }

    /// The fixed point printed to the horizon; scalars without brackets.
    pub fn render_point(&self) -> String {
        render(&self.fixed_point, self.horizon)
    }

    pub fn summary(&self) -> FixedPointSummary {
        FixedPointSummary {
            fixed_point: self.render_point(),
            horizon: self.horizon,
            stages: self.stage_count(),
            trace: self.trace.clone(),
            residual_valuation: self.residual_valuation.clone(),
            exact: self.exact,
            certificate: self.certificate.clone(),
            closed_form_agrees: self.closed_form_agrees,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("fixed point {}\n", self.render_point());
        for s in &self.trace {
            out += &format!(
                "stage {} r-valuation {} residual-valuation {} x = {}\n",
                s.stage, s.radius_valuation, s.residual_valuation, s.point
            );
        }
        out += &format!(
            "stages {}\nresidual valuation {}\n",
            self.stage_count(),
            self.residual_valuation
        );
        if let CertificateKind::SampledCertificate { .. } = self.certificate {
            out += "certificate sampled-certificate\n";
        }
        if let Some(agrees) = self.closed_form_agrees {
            out += &format!(
                "closed form {}\n",
                if agrees { "agrees" } else { "differs" }
            );
        }
        out
    }
}

fn render(v: &SeriesVector, horizon: i64) -> String {
    if v.arity() == 1 {
        v.component(0).display(horizon).to_string()
    } else {
        v.display(horizon)
    }
}

fn exactly_fixed(cert: &ContractionCertificate, x: &SeriesVector) -> bool {
    let image = cert.map().apply(x);
    image
        .components()
        .iter()
        .zip(x.components())
        .all(|(a, b)| (a - b).is_provably_zero())
}

/// Every image equals `x` to the depth of the budget.
fn settled(
    space: &FieldMetricSpace<LaurentProduct>,
    x: &SeriesVector,
    images: &[SeriesVector],
) -> Result<bool, LevelError> {
    for y in images {
        if space.distance(x, y)?.sign(space.budget())? != Sign::Zero {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Level descent: from `x_k`, take the orbit's limit class at
/// `r_k = 2·max_{i ≤ N} d(x_k, f^i x_k)` and move to its canonical
/// representative. Each `r_{k+1}` must be level-smaller than `r_k`. The
/// loop ends at an exact fixed point or once `r_k` is below the horizon.
pub fn cmt_solve(
    space: &FieldMetricSpace<LaurentProduct>,
    cert: &ContractionCertificate,
    x0: &SeriesVector,
    options: &SolveOptions,
) -> Result<FixedPointResult, LevelError> {
    check_arity(space, cert, x0)?;
    let budget = space.budget();
    let horizon = budget.horizon;
    let cutoff = horizon + SLACK;
    let mut x = x0.truncate(cutoff);
    let mut trace = Vec::new();
    let mut previous: Option<LaurentSeries> = None;
    let mut exact = exactly_fixed(cert, &x);
    let mut stage = 0;
    while !exact {
        stage += 1;
        if stage > options.stage_budget {
            return Err(LevelError::StageBudgetExhausted {
                stages: options.stage_budget,
            });
        }
        let orbit = Orbit::new(cert, &x, cutoff);
        let images = orbit.first(cert.degree());
        if settled(space, &x, &images)? {
            break;
        }
        let r = match &previous {
            None => structured_witness(space, &x, &images)?,
            Some(prev) => level_structured_witness(space, &x, &images, prev).map_err(|e| {
                LevelError::DescentStuck {
                    stage,
                    witness: e.to_string(),
                }
            })?,
        };
        let v = r.valuation(budget)?;
        if v > horizon {
            break;
        }
        let residual = space.distance(&x, &images[0])?;
        trace.push(StageRecord {
            stage,
            radius_valuation: v,
            point: render(&x.truncate(horizon), horizon),
            residual_valuation: ResidualValuation::of(&residual, horizon)?,
        });
        let stage_orbit = Orbit::new(cert, &x, v + SLACK);
        let report = r_convergence(space, cert, &stage_orbit, r.clone(), &options.check)?;
        x = report.limit_class.base;
        exact = exactly_fixed(cert, &x);
        previous = Some(r);
    }
    let fixed_point = x.truncate(horizon);
    let residual = cert
        .map()
        .apply(&fixed_point)
        .zip_with(&fixed_point, |a, b| a - b)?;
    let residual_valuation = residual
        .components()
        .iter()
        .map(|c| ResidualValuation::of(c, horizon))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .min_by_key(ResidualValuation::sort_key)
        .expect("arity at least 1");
    if let ResidualValuation::Exact(v) = residual_valuation {
        if v <= horizon {
            return Err(LevelError::ResidualNonzero {
                valuation: v,
                horizon,
            });
        }
    }
    let closed_form_agrees = match (cert.map().as_affine(), cert.is_sampled()) {
        (Some(affine), false) => Some(fixed_point.agrees_to(&affine.closed_form(budget)?, horizon)),
        _ => None,
    };
    Ok(FixedPointResult {
        exact: exact && fixed_point == x,
        fixed_point,
        horizon,
        trace,
        residual,
        residual_valuation,
        certificate: cert.kind().clone(),
        closed_form_agrees,
    })
}
