//! Axiom checker producing serializable per-axiom verdicts.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{sample_rng, BetaError, BetaSpace, SampleRng};

/// How an axiom was established, or the witness that refutes it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Verdict {
    VerifiedExhaustively { checks: usize },
    VerifiedOnSamples { samples: usize, skipped: usize },
    HoldsByConstruction { reason: String },
    Counterexample { witness: String },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        !matches!(self, Verdict::Counterexample { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::VerifiedExhaustively { .. } => "verified-exhaustively",
            Verdict::VerifiedOnSamples { .. } => "verified-on-samples",
            Verdict::HoldsByConstruction { .. } => "holds-by-construction",
            Verdict::Counterexample { .. } => "counterexample",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomVerdict {
    pub axiom: u8,
    pub name: String,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub seed: u64,
    pub budget: usize,
    pub axioms: Vec<AxiomVerdict>,
}

impl AxiomReport {
    pub fn all_hold(&self) -> bool {
        self.axioms.iter().all(|a| a.verdict.holds())
    }

    pub fn verdict(&self, axiom: u8) -> &Verdict {
        &self.axioms[axiom as usize - 1].verdict
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("seed {} budget {}\n", self.seed, self.budget);
        for a in &self.axioms {
            let detail = match &a.verdict {
                Verdict::VerifiedExhaustively { checks } => format!("{checks} checks"),
                Verdict::VerifiedOnSamples { samples, skipped } => {
                    format!("{samples} samples, {skipped} undecidable")
                }
                Verdict::HoldsByConstruction { reason } => reason.clone(),
                Verdict::Counterexample { witness } => witness.clone(),
            };
            out.push_str(&format!(
                "axiom {} ({}): {} [{}]\n",
                a.axiom,
                a.name,
                a.verdict.label(),
                detail
            ));
        }
        out
    }
}

const NAMES: [&str; 4] = [
    "center membership",
    "balls are open",
    "balls form a basis",
    "swing values",
];

/// Checks axioms 1-4. `budget` is the number of samples per sampled axiom;
/// spaces with finite carriers and radial sets are enumerated instead.
pub fn check_axioms<S: BetaSpace>(space: &S, budget: usize, seed: u64) -> AxiomReport {
    let mut rng = sample_rng(seed);
    let first = axiom_one(space, budget, &mut rng);
    let fourth = axiom_four(space, budget, &mut rng);
    let (second, third) = space.topology_axioms().unwrap_or_else(|| {
        let reason = "open balls of a field metric are open in the induced topology".to_string();
        (
            Verdict::HoldsByConstruction {
                reason: reason.clone(),
            },
            Verdict::HoldsByConstruction { reason },
        )
    });
    let axioms = [first, second, third, fourth]
        .into_iter()
        .enumerate()
        .map(|(i, verdict)| AxiomVerdict {
            axiom: i as u8 + 1,
            name: NAMES[i].to_string(),
            verdict,
        })
        .collect();
    AxiomReport {
        seed,
        budget,
        axioms,
    }
}

type Carrier<S> = (Vec<<S as BetaSpace>::Point>, Vec<<S as BetaSpace>::Radius>);

fn enumerated<S: BetaSpace>(space: &S) -> Option<Carrier<S>> {
    Some((space.points()?, space.radii()?))
}

fn sample_point<S: BetaSpace>(
    space: &S,
    points: &Option<Vec<S::Point>>,
    rng: &mut SampleRng,
) -> S::Point {
    match points {
        Some(p) if !p.is_empty() => p[rng.gen_range(0..p.len())].clone(),
        _ => space.sample_point(rng),
    }
}

fn axiom_one<S: BetaSpace>(space: &S, budget: usize, rng: &mut SampleRng) -> Verdict {
    let counterexample = |x: &S::Point, r: &S::Radius| Verdict::Counterexample {
        witness: format!(
            "x = {} is not in β(x, {})",
            space.describe_point(x),
            space.describe_radius(r)
        ),
    };
    if let Some((points, radii)) = enumerated(space) {
        let mut checks = 0;
        for r in &radii {
            for x in &points {
                checks += 1;
                if !space.in_ball(x, r, x).unwrap_or(false) {
                    return counterexample(x, r);
                }
            }
        }
        return Verdict::VerifiedExhaustively { checks };
    }
    let points = space.points();
    let (mut samples, mut skipped) = (0, 0);
    for _ in 0..budget {
        let x = sample_point(space, &points, rng);
        let r = space.sample_radius(rng);
        match space.in_ball(&x, &r, &x) {
            Ok(true) => samples += 1,
            Ok(false) => return counterexample(&x, &r),
            Err(_) => skipped += 1,
        }
    }
    Verdict::VerifiedOnSamples { samples, skipped }
}

fn swing_witness<S: BetaSpace>(
    space: &S,
    r: &S::Radius,
    s: &S::Radius,
    z: &S::Point,
    y: &S::Point,
    w: &S::Point,
) -> Verdict {
    Verdict::Counterexample {
        witness: format!(
            "r = {}, s = {}: {} ∈ β({}, s) but {} ∉ β({}, r)",
            space.describe_radius(r),
            space.describe_radius(s),
            space.describe_point(y),
            space.describe_point(z),
            space.describe_point(w),
            space.describe_point(y)
        ),
    }
}

/// `Ok(None)` when the triple holds, `Ok(Some(v))` for a counterexample.
fn swing_at<S: BetaSpace>(
    space: &S,
    r: &S::Radius,
    z: &S::Point,
    rng: &mut SampleRng,
    probes: usize,
    pick_one: bool,
) -> Result<(Option<Verdict>, usize), BetaError> {
    let s = match space.swing(r) {
        Ok(s) => s,
        Err(BetaError::NoSwingValue { radius }) => {
            return Ok((
                Some(Verdict::Counterexample {
                    witness: format!("no swing value for r = {radius}"),
                }),
                0,
            ))
        }
        Err(e) => return Err(e),
    };
    let ball = space.ball_witnesses(z, &s, rng, probes)?;
    let centers: Vec<&S::Point> = if pick_one {
        ball.get(rng.gen_range(0..ball.len().max(1)))
            .into_iter()
            .collect()
    } else {
        ball.iter().collect()
    };
    let mut checks = 0;
    for y in centers {
        for w in &ball {
            checks += 1;
            if !space.in_ball(y, r, w)? {
                return Ok((Some(swing_witness(space, r, &s, z, y, w)), checks));
            }
        }
    }
    Ok((None, checks))
}

fn axiom_four<S: BetaSpace>(space: &S, budget: usize, rng: &mut SampleRng) -> Verdict {
    if let Some((points, radii)) = enumerated(space) {
        let mut checks = 0;
        for r in &radii {
            for z in &points {
                match swing_at(space, r, z, rng, 0, false) {
                    Ok((Some(v), _)) => return v,
                    Ok((None, n)) => checks += n,
                    Err(e) => {
                        return Verdict::Counterexample {
                            witness: format!(
                                "swing rule failed for r = {}: {e}",
                                space.describe_radius(r)
                            ),
                        }
                    }
                }
            }
        }
        return Verdict::VerifiedExhaustively { checks };
    }
    let points = space.points();
    let (mut samples, mut skipped) = (0, 0);
    for _ in 0..budget {
        let z = sample_point(space, &points, rng);
        let r = space.sample_radius(rng);
        match swing_at(space, &r, &z, rng, 8, true) {
            Ok((Some(v), _)) => return v,
            Ok((None, _)) => samples += 1,
            Err(_) => skipped += 1,
        }
    }
    Verdict::VerifiedOnSamples { samples, skipped }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::{field_metric_space, FiniteBetaSpace, LaurentLine, PointSet};
    use crate::laurent::PrecisionBudget;
    use crate::rational::{int, rat};

    #[test]
    fn laurent_axioms_sampled() {
        let l = field_metric_space(LaurentLine, PrecisionBudget::default()).unwrap();
        let report = check_axioms(&l, 100, 7);
        assert!(report.all_hold(), "{}", report.to_text());
        assert!(matches!(
            report.verdict(1),
            Verdict::VerifiedOnSamples { samples: 100, .. }
        ));
        assert!(matches!(
            report.verdict(2),
            Verdict::HoldsByConstruction { .. }
        ));
    }

    #[test]
    fn two_point_exhaustive() {
        let s = FiniteBetaSpace::two_point(&[rat(1, 2), int(2)]);
        let report = check_axioms(&s, 10, 0);
        assert!(report.all_hold(), "{}", report.to_text());
        for i in 1..=4 {
            assert!(
                matches!(report.verdict(i), Verdict::VerifiedExhaustively { .. }),
                "axiom {i}"
            );
        }
    }

    #[test]
    fn planted_axiom_one_violation() {
        let balls = vec![vec![PointSet::singleton(1), PointSet::singleton(1)]];
        let s =
            FiniteBetaSpace::new(vec!["a".into(), "b".into()], vec!["r".into()], balls).unwrap();
        let report = check_axioms(&s, 10, 0);
        match report.verdict(1) {
            Verdict::Counterexample { witness } => {
                assert!(witness.contains("x = a") && witness.contains('r'))
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn report_serializes_with_seed() {
        let s = FiniteBetaSpace::discrete(2);
        let json = serde_json::to_string(&check_axioms(&s, 5, 42)).unwrap();
        assert!(json.contains("\"seed\":42"));
        assert!(json.contains("verified-exhaustively"));
    }
}
