//! Contraction maps on `𝕃ⁿ` and their certificates.

use std::fmt;
use std::sync::Arc;

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{level_of, LevelError};
use crate::beta::{sample_rng, FieldMetric, LaurentProduct};
use crate::laurent::{
    eval_expression, sup_metric, LaurentSeries, PrecisionBudget, SeriesError, SeriesVector,
};
use crate::rational::{self, rat, Rational};

/// A self-map of `𝕃ⁿ`.
pub trait SeriesMap: Send + Sync {
    fn arity(&self) -> usize;
    fn apply(&self, y: &SeriesVector) -> SeriesVector;
    fn describe(&self) -> String;

    fn as_affine(&self) -> Option<&AffineMap> {
        None
    }
}

/// `y ↦ a·y + b`, componentwise on `𝕃ⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    a: Vec<LaurentSeries>,
    b: Vec<LaurentSeries>,
}

impl AffineMap {
    pub fn scalar(a: LaurentSeries, b: LaurentSeries) -> Self {
        Self {
            a: vec![a],
            b: vec![b],
        }
    }

    pub fn diagonal(a: Vec<LaurentSeries>, b: Vec<LaurentSeries>) -> Result<Self, LevelError> {
        if a.is_empty() || a.len() != b.len() {
            return Err(LevelError::Malformed(format!(
                "a has {} components and b has {}",
                a.len(),
                b.len()
            )));
        }
        Ok(Self { a, b })
    }

    /// Reads `affine a=<expr> b=<expr>`, with `[e1; e2; …]` for vectors.
    pub fn parse(text: &str, budget: &PrecisionBudget) -> Result<Self, LevelError> {
        let rest = text
            .trim()
            .strip_prefix("affine")
            .ok_or_else(|| LevelError::Malformed("expected 'affine a=<series> b=<series>'".into()))?
            .trim_start();
        let rest = rest
            .strip_prefix("a=")
            .ok_or_else(|| LevelError::Malformed("expected 'a='".into()))?;
        let split = rest
            .find("b=")
            .ok_or_else(|| LevelError::Malformed("expected 'b='".into()))?;
        let (a, b) = (rest[..split].trim(), rest[split + 2..].trim());
        Self::diagonal(components(a, budget)?, components(b, budget)?)
    }

    pub fn a(&self) -> &[LaurentSeries] {
        &self.a
    }

    pub fn b(&self) -> &[LaurentSeries] {
        &self.b
    }

    /// `b_j / (1 - a_j)` in each component.
    pub fn closed_form(&self, budget: &PrecisionBudget) -> Result<SeriesVector, LevelError> {
        let parts = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(a, b)| Ok(b * &(LaurentSeries::one() - a).invert(budget)?))
            .collect::<Result<Vec<_>, SeriesError>>()?;
        Ok(SeriesVector::new(parts))
    }
}

fn components(text: &str, budget: &PrecisionBudget) -> Result<Vec<LaurentSeries>, LevelError> {
    let inner = match text.strip_prefix('[') {
        Some(rest) => rest
            .strip_suffix(']')
            .ok_or_else(|| LevelError::Malformed("unclosed '['".into()))?,
        None => text,
    };
    inner
        .split(';')
        .map(|part| eval_expression(part.trim(), budget).map_err(LevelError::from))
        .collect()
}

impl SeriesMap for AffineMap {
    fn arity(&self) -> usize {
        self.a.len()
    }

    fn apply(&self, y: &SeriesVector) -> SeriesVector {
        assert_eq!(
            y.arity(),
            self.arity(),
            "affine map applied to a point of the wrong arity"
        );
        SeriesVector::new(
            y.components()
                .iter()
                .zip(self.a.iter().zip(&self.b))
                .map(|(yj, (a, b))| &(a * yj) + b)
                .collect(),
        )
    }

    fn describe(&self) -> String {
        let show = |v: &[LaurentSeries]| {
            let parts: Vec<String> = v
                .iter()
                .map(|s| s.display(PrecisionBudget::default().horizon).to_string())
                .collect();
            if parts.len() == 1 {
                parts[0].clone()
            } else {
                format!("[{}]", parts.join("; "))
            }
        };
        format!("affine a={} b={}", show(&self.a), show(&self.b))
    }

    fn as_affine(&self) -> Option<&AffineMap> {
        Some(self)
    }
}

type Rule = Arc<dyn Fn(&SeriesVector) -> SeriesVector + Send + Sync>;

/// A map given only as a rule.
#[derive(Clone)]
pub struct FnMap {
    arity: usize,
    name: String,
    rule: Rule,
}

impl FnMap {
    pub fn new<F>(arity: usize, name: impl Into<String>, rule: F) -> Self
    where
        F: Fn(&SeriesVector) -> SeriesVector + Send + Sync + 'static,
    {
        Self {
            arity,
            name: name.into(),
            rule: Arc::new(rule),
        }
    }
}

impl fmt::Debug for FnMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnMap")
            .field("arity", &self.arity)
            .field("name", &self.name)
            .finish()
    }
}

impl SeriesMap for FnMap {
    fn arity(&self) -> usize {
        self.arity
    }

    fn apply(&self, y: &SeriesVector) -> SeriesVector {
        (self.rule)(y)
    }

    fn describe(&self) -> String {
        self.name.clone()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CertificateKind {
    /// Both conditions follow from `|a_j|^N ≤ 1/2`.
    Analytic {
        lipschitz: Vec<String>,
        standard_part_degree: usize,
    },
    /// Both conditions hold on the drawn samples.
    SampledCertificate {
        samples: usize,
        skipped: usize,
        seed: u64,
    },
}

/// A map with a degree `N` such that `f^N(β(x, r)) ⊆ β(f^N(x), r/2)`.
#[derive(Clone)]
pub struct ContractionCertificate {
    map: Arc<dyn SeriesMap>,
    degree: usize,
    kind: CertificateKind,
}

impl fmt::Debug for ContractionCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContractionCertificate")
            .field("map", &self.map.describe())
            .field("degree", &self.degree)
            .field("kind", &self.kind)
            .finish()
    }
}

impl ContractionCertificate {
    pub fn map(&self) -> &dyn SeriesMap {
        self.map.as_ref()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> &CertificateKind {
        &self.kind
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self.kind, CertificateKind::SampledCertificate { .. })
    }

    /// The radius `s` in condition 2 for a given `r`.
    pub fn swing_witness(&self, r: &LaurentSeries) -> LaurentSeries {
        r.half()
    }
}

/// Smallest `N ≥ 1` with `q^N ≤ 1/2`, for rational `0 ≤ q < 1`.
fn rational_degree(q: &Rational) -> usize {
    let half = rat(1, 2);
    let mut power = q.clone();
    let mut n = 1;
    while power > half {
        power *= q;
        n += 1;
    }
    n
}

/// Certifies an affine map: each `|a_j|` must have nonnegative valuation
/// and standard part below 1. The degree is the least `N` with
/// `|a_j|^N ≤ 1/2` for all `j`; the standard-part bound `((1 + r')/2)^N ≤ 1/2`
/// caps the search.
pub fn certify_contraction(
    map: AffineMap,
    budget: &PrecisionBudget,
) -> Result<ContractionCertificate, LevelError> {
    let half = LaurentSeries::constant(rat(1, 2));
    let mut standard_part_degree = 1;
    let mut degree = 1;
    let mut lipschitz = Vec::with_capacity(map.arity());
    for a in &map.a {
        let abs = a.abs(budget)?;
        lipschitz.push(abs.display(budget.horizon).to_string());
        let Some(v) = level_of(&abs, budget)? else {
            continue;
        };
        if v < 0 {
            return Err(LevelError::NoFiniteDegree {
                reason: format!("|a| = {} is infinitely large", abs.display(budget.horizon)),
            });
        }
        let standard = abs.coefficient(0);
        if standard >= Rational::one() {
            return Err(LevelError::NoFiniteDegree {
                reason: format!(
                    "|a| = {} has standard part {}, not below 1",
                    abs.display(budget.horizon),
                    rational::format_rational(&standard)
                ),
            });
        }
        let s = (Rational::one() + &standard) / rational::int(2);
        let bound = rational_degree(&s);
        standard_part_degree = standard_part_degree.max(bound);
        let mut power = abs.clone();
        let mut n = 1;
        while n < bound {
            match power.compare(&half, budget) {
                Ok(std::cmp::Ordering::Greater) | Err(SeriesError::Undecidable { .. }) => {}
                Ok(_) => break,
                Err(e) => return Err(e.into()),
            }
            power = &power * &abs;
            n += 1;
        }
        degree = degree.max(n);
    }
    Ok(ContractionCertificate {
        map: Arc::new(map),
        degree,
        kind: CertificateKind::Analytic {
            lipschitz,
            standard_part_degree,
        },
    })
}

/// Samples both contraction conditions for a rule with a claimed degree.
pub fn certify_black_box(
    map: Arc<dyn SeriesMap>,
    degree: usize,
    samples: usize,
    seed: u64,
    budget: &PrecisionBudget,
) -> Result<ContractionCertificate, LevelError> {
    if degree == 0 {
        return Err(LevelError::Malformed("the degree must be positive".into()));
    }
    let space = LaurentProduct { arity: map.arity() };
    let mut rng = sample_rng(seed);
    let mut skipped = 0;
    let iterate = |mut y: SeriesVector| {
        for _ in 0..degree {
            y = map.apply(&y);
        }
        y
    };
    for _ in 0..samples {
        let y = space.random_point(&mut rng);
        let r = space.random_radius(&mut rng);
        let probes = space.probes_within(&y, &r, &mut rng, 4);
        for z in probes.into_iter().skip(1) {
            let check = || -> Result<Option<u8>, SeriesError> {
                if !sup_metric(&map.apply(&y), &map.apply(&z), budget)?.less_than(&r, budget)? {
                    return Ok(Some(1));
                }
                if !sup_metric(&iterate(y.clone()), &iterate(z.clone()), budget)?
                    .less_than(&r.half(), budget)?
                {
                    return Ok(Some(2));
                }
                Ok(None)
            };
            match check() {
                Ok(None) => {}
                Ok(Some(condition)) => {
                    return Err(LevelError::CertificateViolation {
                        condition,
                        witness: format!(
                            "y = {}, z = {}, r = {}",
                            y.display(budget.horizon),
                            z.display(budget.horizon),
                            r.display(budget.horizon)
                        ),
                    })
                }
                Err(SeriesError::Undecidable { .. }) => skipped += 1,
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(ContractionCertificate {
        map,
        degree,
        kind: CertificateKind::SampledCertificate {
            samples,
            skipped,
            seed,
        },
    })
}
