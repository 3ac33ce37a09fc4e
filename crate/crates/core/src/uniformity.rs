//! The correspondence between symmetric, intersection-closed beta-spaces
//! and uniform spaces on finite carriers.
//!
//! A uniformity is stored as a finite base of entourages; supersets are
//! never materialized.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::beta::{
    check_axioms, finite_topology, BetaError, FiniteBetaSpace, PointSet, SampleRng, Verdict,
};

/// Relation on a finite carrier; `rows[x] = U[x] = {y : (x, y) ∈ U}`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Entourage {
    rows: Vec<PointSet>,
}

impl Entourage {
    pub fn from_rows(rows: Vec<PointSet>) -> Self {
        Self { rows }
    }

    pub fn diagonal(n: usize) -> Self {
        Self::from_rows((0..n).map(PointSet::singleton).collect())
    }

    pub fn full(n: usize) -> Self {
        Self::from_rows(vec![PointSet::full(n); n])
    }

    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(n: usize, pairs: I) -> Self {
        let mut rows = vec![PointSet::EMPTY; n];
        for (x, y) in pairs {
            rows[x] = rows[x].with(y);
        }
        Self { rows }
    }

    pub fn points(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[PointSet] {
        &self.rows
    }

    /// `U[x]`.
    pub fn section(&self, x: usize) -> PointSet {
        self.rows[x]
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.rows[x].contains(y)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(x, row)| row.iter().map(move |y| (x, y)))
    }

    pub fn inverse(&self) -> Self {
        Self::from_pairs(self.points(), self.pairs().map(|(x, y)| (y, x)))
    }

    pub fn intersect(&self, other: &Self) -> Self {
        Self::from_rows(
            self.rows
                .iter()
                .zip(&other.rows)
                .map(|(a, b)| a.intersect(*b))
                .collect(),
        )
    }

    /// `self ∘ other = {(x, z) : (x, y) ∈ self, (y, z) ∈ other}`.
    pub fn compose(&self, other: &Self) -> Self {
        Self::from_rows(
            self.rows
                .iter()
                .map(|row| {
                    row.iter()
                        .fold(PointSet::EMPTY, |acc, y| acc.union(other.rows[y]))
                })
                .collect(),
        )
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.rows
            .iter()
            .zip(&other.rows)
            .all(|(a, b)| a.is_subset(*b))
    }

    pub fn is_symmetric(&self) -> bool {
        *self == self.inverse()
    }

    pub fn contains_diagonal(&self) -> bool {
        self.rows.iter().enumerate().all(|(x, row)| row.contains(x))
    }
}

impl fmt::Debug for Entourage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.pairs()).finish()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Uniformity {
    points: Vec<String>,
    generators: Vec<Entourage>,
}

/// Interchange format: generators as lists of `[x, y]` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformityFile {
    pub points: Vec<String>,
    pub generators: Vec<Vec<(String, String)>>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BridgeError {
    #[error("beta-space axiom {axiom} fails: {witness}")]
    AxiomFailure { axiom: u8, witness: String },
    #[error("space is not symmetric: {0}")]
    NotSymmetric(String),
    #[error("space is not intersection-closed: {0}")]
    NotIntersectionClosed(String),
    #[error("uniformity {axiom} axiom fails: {witness}")]
    UniformityAxiom {
        axiom: &'static str,
        witness: String,
    },
    #[error("malformed uniformity: {0}")]
    Malformed(String),
    #[error(transparent)]
    Beta(#[from] BetaError),
}

impl Uniformity {
    pub fn new(points: Vec<String>, generators: Vec<Entourage>) -> Result<Self, BridgeError> {
        if points.is_empty() || generators.is_empty() {
            return Err(BridgeError::Malformed(
                "carrier and generators must be nonempty".into(),
            ));
        }
        if generators.iter().any(|g| g.points() != points.len()) {
            return Err(BridgeError::Malformed(
                "generator does not match the carrier".into(),
            ));
        }
        Ok(Self { points, generators })
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn generators(&self) -> &[Entourage] {
        &self.generators
    }

    pub fn from_file(file: &UniformityFile) -> Result<Self, BridgeError> {
        let index = |label: &str| {
            file.points
                .iter()
                .position(|p| p == label)
                .ok_or_else(|| BridgeError::Malformed(format!("unknown point `{label}`")))
        };
        let mut generators = Vec::with_capacity(file.generators.len());
        for g in &file.generators {
            let pairs = g
                .iter()
                .map(|(x, y)| Ok((index(x)?, index(y)?)))
                .collect::<Result<Vec<_>, BridgeError>>()?;
            generators.push(Entourage::from_pairs(file.points.len(), pairs));
        }
        Self::new(file.points.clone(), generators)
    }

    pub fn to_file(&self) -> UniformityFile {
        UniformityFile {
            points: self.points.clone(),
            generators: self
                .generators
                .iter()
                .map(|g| {
                    g.pairs()
                        .map(|(x, y)| (self.points[x].clone(), self.points[y].clone()))
                        .collect()
                })
                .collect(),
        }
    }

    fn render(&self, e: &Entourage) -> String {
        let pairs: Vec<String> = e
            .pairs()
            .map(|(x, y)| format!("({}, {})", self.points[x], self.points[y]))
            .collect();
        format!("{{{}}}", pairs.join(", "))
    }

    /// The five filter-base axioms, each decided exhaustively.
    pub fn check(&self) -> UniformityReport {
        let n = self.points.len();
        let g = &self.generators;
        let fail = |witness: String| Verdict::Counterexample { witness };
        let exhaustive = |checks: usize| Verdict::VerifiedExhaustively { checks };

        let diagonal = match g.iter().find(|u| !u.contains_diagonal()) {
            Some(u) => fail(format!("{} misses part of the diagonal", self.render(u))),
            None => exhaustive(g.len() * n),
        };
        let supersets = Verdict::HoldsByConstruction {
            reason: "the filter is the set of supersets of the base".into(),
        };
        let mut intersection = exhaustive(g.len() * g.len());
        'outer: for a in g {
            for b in g {
                let meet = a.intersect(b);
                if !g.iter().any(|c| c.is_subset(&meet)) {
                    intersection = fail(format!(
                        "no generator inside {} ∩ {}",
                        self.render(a),
                        self.render(b)
                    ));
                    break 'outer;
                }
            }
        }
        let composition = match g
            .iter()
            .find(|u| !g.iter().any(|v| v.compose(v).is_subset(u)))
        {
            Some(u) => fail(format!("no generator V with V∘V ⊆ {}", self.render(u))),
            None => exhaustive(g.len() * g.len()),
        };
        let inverse = match g.iter().find(|u| {
            let inv = u.inverse();
            !g.iter().any(|v| v.is_subset(&inv))
        }) {
            Some(u) => fail(format!(
                "no generator inside the inverse of {}",
                self.render(u)
            )),
            None => exhaustive(g.len() * g.len()),
        };
        UniformityReport {
            axioms: [
                ("diagonal", diagonal),
                ("supersets", supersets),
                ("intersection", intersection),
                ("composition", composition),
                ("inverse", inverse),
            ]
            .into_iter()
            .map(|(name, verdict)| UniformAxiom {
                name: name.to_string(),
                verdict,
            })
            .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformAxiom {
    pub name: String,
    #[serde(flatten)]
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub axioms: Vec<UniformAxiom>,
}

impl UniformityReport {
    pub fn all_hold(&self) -> bool {
        self.axioms.iter().all(|a| a.verdict.holds())
    }

    fn first_failure(&self) -> Option<BridgeError> {
        self.axioms.iter().find_map(|a| match &a.verdict {
            Verdict::Counterexample { witness } => Some(BridgeError::UniformityAxiom {
                axiom: match a.name.as_str() {
                    "diagonal" => "diagonal",
                    "intersection" => "intersection",
                    "composition" => "composition",
                    _ => "inverse",
                },
                witness: witness.clone(),
            }),
            _ => None,
        })
    }
}

/// Exhaustive check of `y ∈ β(x, r) ⇔ x ∈ β(y, r)`.
pub fn check_symmetric(space: &FiniteBetaSpace) -> Verdict {
    let n = space.point_count();
    for r in 0..space.radius_count() {
        for x in 0..n {
            for y in space.ball(x, r).iter() {
                if !space.ball(y, r).contains(x) {
                    return Verdict::Counterexample {
                        witness: format!(
                            "{} ∈ β({}, {}) but {} ∉ β({}, {})",
                            space.point_labels()[y],
                            space.point_labels()[x],
                            space.radius_labels()[r],
                            space.point_labels()[x],
                            space.point_labels()[y],
                            space.radius_labels()[r]
                        ),
                    };
                }
            }
        }
    }
    Verdict::VerifiedExhaustively {
        checks: n * n * space.radius_count(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub closed: bool,
    /// `"r,s"` to the first radius `t` with `β(x, r) ∩ β(x, s) = β(x, t)` for every `x`.
    pub witnesses: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// Searches the radial set for a uniform intersection witness for every pair.
pub fn check_intersection_closed(space: &FiniteBetaSpace) -> IntersectionReport {
    let n = space.point_count();
    let labels = space.radius_labels();
    let mut witnesses = BTreeMap::new();
    for r in 0..space.radius_count() {
        for s in 0..space.radius_count() {
            let found = (0..space.radius_count()).find(|&t| {
                (0..n).all(|x| space.ball(x, r).intersect(space.ball(x, s)) == space.ball(x, t))
            });
            match found {
                Some(t) => {
                    witnesses.insert(format!("{},{}", labels[r], labels[s]), labels[t].clone());
                }
                None => {
                    return IntersectionReport {
                        closed: false,
                        witnesses,
                        failure: Some(format!(
                            "no radius t with β(x, {}) ∩ β(x, {}) = β(x, t) for all x",
                            labels[r], labels[s]
                        )),
                    }
                }
            }
        }
    }
    IntersectionReport {
        closed: true,
        witnesses,
        failure: None,
    }
}

/// `U_r = {(x, y) : y ∈ β(x, r)}`.
pub fn radius_entourage(space: &FiniteBetaSpace, r: usize) -> Entourage {
    Entourage::from_rows((0..space.point_count()).map(|x| space.ball(x, r)).collect())
}

fn require_hypotheses(space: &FiniteBetaSpace) -> Result<(), BridgeError> {
    for a in check_axioms(space, 0, 0).axioms {
        if let Verdict::Counterexample { witness } = a.verdict {
            return Err(BridgeError::AxiomFailure {
                axiom: a.axiom,
                witness,
            });
        }
    }
    if let Verdict::Counterexample { witness } = check_symmetric(space) {
        return Err(BridgeError::NotSymmetric(witness));
    }
    let closure = check_intersection_closed(space);
    if let Some(failure) = closure.failure {
        return Err(BridgeError::NotIntersectionClosed(failure));
    }
    Ok(())
}

/// Uniformity with base `{U_r : r ∈ R}`, duplicates removed.
pub fn beta_to_uniformity(space: &FiniteBetaSpace) -> Result<Uniformity, BridgeError> {
    require_hypotheses(space)?;
    let mut generators: Vec<Entourage> = Vec::new();
    for r in 0..space.radius_count() {
        let u = radius_entourage(space, r);
        if !generators.contains(&u) {
            generators.push(u);
        }
    }
    let u = Uniformity::new(space.point_labels().to_vec(), generators)?;
    if let Some(err) = u.check().first_failure() {
        return Err(err);
    }
    Ok(u)
}

/// Beta-space with radii the intersection closure of `{G ∩ G⁻¹}` over the
/// generators and `β(x, W) = W[x]`.
pub fn uniformity_to_beta(u: &Uniformity) -> Result<FiniteBetaSpace, BridgeError> {
    if let Some(err) = u.check().first_failure() {
        return Err(err);
    }
    let mut radii: Vec<Entourage> = Vec::new();
    for g in u.generators() {
        let sym = g.intersect(&g.inverse());
        if !radii.contains(&sym) {
            radii.push(sym);
        }
    }
    let mut i = 0;
    while i < radii.len() {
        for j in 0..=i {
            let meet = radii[i].intersect(&radii[j]);
            if !radii.contains(&meet) {
                radii.push(meet);
            }
        }
        i += 1;
    }
    let labels = (0..radii.len()).map(|i| format!("W{i}")).collect();
    let balls = radii.iter().map(|w| w.rows().to_vec()).collect();
    Ok(FiniteBetaSpace::new(u.points().to_vec(), labels, balls)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTrip {
    pub topology_equal: bool,
    pub ball_families_equal: bool,
    pub generators: usize,
    pub radii_after: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<String>,
}

impl RoundTrip {
    pub fn passed(&self) -> bool {
        self.topology_equal && self.ball_families_equal
    }
}

/// `β(x, ·)` as a set of subsets, per point.
fn ball_families(space: &FiniteBetaSpace) -> Vec<Vec<PointSet>> {
    (0..space.point_count())
        .map(|x| {
            let mut family: Vec<PointSet> = (0..space.radius_count())
                .map(|r| space.ball(x, r))
                .collect();
            family.sort();
            family.dedup();
            family
        })
        .collect()
}

/// Compares `space` with `uniformity_to_beta(beta_to_uniformity(space))`.
pub fn roundtrip_check(space: &FiniteBetaSpace) -> Result<RoundTrip, BridgeError> {
    let u = beta_to_uniformity(space)?;
    let back = uniformity_to_beta(&u)?;
    let topology_equal = finite_topology(space)?.opens() == finite_topology(&back)?.opens();
    let (before, after) = (ball_families(space), ball_families(&back));
    let mismatch = (0..space.point_count())
        .find(|&x| before[x] != after[x])
        .map(|x| {
            let render = |f: &[PointSet]| {
                f.iter()
                    .map(|s| space.render_set(*s))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            format!(
                "balls at {}: before [{}], after [{}]",
                space.point_labels()[x],
                render(&before[x]),
                render(&after[x])
            )
        });
    Ok(RoundTrip {
        topology_equal,
        ball_families_equal: mismatch.is_none(),
        generators: u.generators().len(),
        radii_after: back.radius_count(),
        mismatch: mismatch
            .or_else(|| (!topology_equal).then(|| "generated topologies differ".to_string())),
    })
}

/// Reflexive symmetric relations on `n` points, in bitmask order.
fn reflexive_symmetric_relations(n: usize) -> Vec<Entourage> {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .collect();
    (0u64..1 << edges.len())
        .map(|mask| {
            let chosen = edges
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .flat_map(|(_, &(x, y))| [(x, y), (y, x)]);
            Entourage::from_pairs(n, (0..n).map(|x| (x, x)).chain(chosen))
        })
        .collect()
}

fn family_space(n: usize, family: &[Entourage]) -> FiniteBetaSpace {
    let labels = (0..family.len()).map(|i| format!("r{i}")).collect();
    let balls = family.iter().map(|e| e.rows().to_vec()).collect();
    FiniteBetaSpace::new(FiniteBetaSpace::default_labels(n), labels, balls)
        .expect("well-formed family")
}

fn intersection_closed(family: &[Entourage]) -> bool {
    family
        .iter()
        .all(|a| family.iter().all(|b| family.contains(&a.intersect(b))))
}

/// Every symmetric, intersection-closed, axiom-passing structure on `n`
/// points, one per family of distinct ball relations. Intended for `n ≤ 3`.
pub fn symmetric_structures(n: usize) -> Vec<FiniteBetaSpace> {
    let relations = reflexive_symmetric_relations(n);
    let mut out = Vec::new();
    for mask in 1u64..1 << relations.len() {
        let family: Vec<Entourage> = relations
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, e)| e.clone())
            .collect();
        if !intersection_closed(&family) {
            continue;
        }
        let space = family_space(n, &family);
        if check_axioms(&space, 0, 0).all_hold() {
            out.push(space);
        }
    }
    out
}

fn random_partition(rng: &mut SampleRng, n: usize) -> Entourage {
    let blocks: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
    Entourage::from_pairs(
        n,
        (0..n)
            .flat_map(|x| (0..n).map(move |y| (x, y)))
            .filter(|&(x, y)| blocks[x] == blocks[y]),
    )
}

fn random_symmetric(rng: &mut SampleRng, n: usize) -> Entourage {
    let mut pairs: Vec<(usize, usize)> = (0..n).map(|x| (x, x)).collect();
    for x in 0..n {
        for y in x + 1..n {
            if rng.gen_bool(0.5) {
                pairs.extend([(x, y), (y, x)]);
            }
        }
    }
    Entourage::from_pairs(n, pairs)
}

/// Seeded rejection sampler for symmetric, intersection-closed,
/// axiom-passing structures on `n` points.
pub fn random_symmetric_structure(rng: &mut SampleRng, n: usize) -> FiniteBetaSpace {
    loop {
        let count = rng.gen_range(1..=4);
        let mut family: Vec<Entourage> = Vec::new();
        for _ in 0..count {
            let e = if rng.gen_bool(0.5) {
                random_partition(rng, n)
            } else {
                random_symmetric(rng, n)
            };
            if !family.contains(&e) {
                family.push(e);
            }
        }
        let mut i = 0;
        while i < family.len() {
            for j in 0..=i {
                let meet = family[i].intersect(&family[j]);
                if !family.contains(&meet) {
                    family.push(meet);
                }
            }
            i += 1;
        }
        let space = family_space(n, &family);
        if check_axioms(&space, 0, 0).all_hold() {
            return space;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::sample_rng;
    use crate::rational::{int, rat};

    #[test]
    fn two_point_generators() {
        let s = FiniteBetaSpace::two_point(&[rat(1, 2), int(2)]);
        let u = beta_to_uniformity(&s).unwrap();
        assert_eq!(
            u.generators(),
            &[Entourage::diagonal(2), Entourage::full(2)]
        );
        assert!(u.check().all_hold());
        assert!(roundtrip_check(&s).unwrap().passed());
    }

    #[test]
    fn one_point_space() {
        let s = FiniteBetaSpace::discrete(1);
        assert!(check_symmetric(&s).holds());
        let u = beta_to_uniformity(&s).unwrap();
        assert_eq!(u.generators(), &[Entourage::diagonal(1)]);
    }

    #[test]
    fn asymmetric_rejected() {
        let balls = vec![vec![PointSet::full(2), PointSet::singleton(1)]];
        let s =
            FiniteBetaSpace::new(vec!["a".into(), "b".into()], vec!["r".into()], balls).unwrap();
        assert!(!check_symmetric(&s).holds());
    }

    #[test]
    fn intersection_witnesses() {
        let s = FiniteBetaSpace::two_point(&[rat(1, 2), int(2)]);
        let report = check_intersection_closed(&s);
        assert!(report.closed);
        assert_eq!(report.witnesses["1/2,2"], "1/2");
        let n = 3;
        let a = Entourage::from_pairs(n, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0)]);
        let b = Entourage::from_pairs(n, [(0, 0), (1, 1), (2, 2), (1, 2), (2, 1)]);
        let planted = family_space(n, &[a, b]);
        assert!(!check_intersection_closed(&planted).closed);
    }

    #[test]
    fn indiscrete_and_discrete_uniformities() {
        let full =
            Uniformity::new(FiniteBetaSpace::default_labels(3), vec![Entourage::full(3)]).unwrap();
        let back = uniformity_to_beta(&full).unwrap();
        assert_eq!(back.radius_count(), 1);
        assert!((0..3).all(|x| back.ball(x, 0) == PointSet::full(3)));
        let diag = Uniformity::new(
            FiniteBetaSpace::default_labels(3),
            vec![Entourage::diagonal(3)],
        )
        .unwrap();
        let back = uniformity_to_beta(&diag).unwrap();
        assert!((0..3).all(|x| back.ball(x, 0) == PointSet::singleton(x)));
    }

    #[test]
    fn pair_generator_on_three_points() {
        let n = 3;
        let g = Entourage::from_pairs(n, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0)]);
        let u = Uniformity::new(
            FiniteBetaSpace::default_labels(n),
            vec![g, Entourage::diagonal(n)],
        )
        .unwrap();
        let back = uniformity_to_beta(&u).unwrap();
        assert_eq!(back.radius_count(), 2);
        assert!(check_axioms(&back, 0, 0).all_hold());
        assert!(check_symmetric(&back).holds());
        assert!(check_intersection_closed(&back).closed);
    }

    #[test]
    fn composition_failure_detected() {
        let n = 3;
        let g = Entourage::from_pairs(n, [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0), (1, 2), (2, 1)]);
        let u = Uniformity::new(FiniteBetaSpace::default_labels(n), vec![g]).unwrap();
        assert!(matches!(
            uniformity_to_beta(&u),
            Err(BridgeError::UniformityAxiom {
                axiom: "composition",
                ..
            })
        ));
    }

    #[test]
    fn small_enumeration_round_trips() {
        for n in 1..=3 {
            let all = symmetric_structures(n);
            assert!(!all.is_empty());
            for s in all {
                assert!(roundtrip_check(&s).unwrap().passed());
            }
        }
    }

    #[test]
    fn random_structures_round_trip() {
        let mut rng = sample_rng(5);
        for _ in 0..10 {
            let s = random_symmetric_structure(&mut rng, 4);
            assert!(roundtrip_check(&s).unwrap().passed());
        }
    }

    #[test]
    fn file_round_trip() {
        let s = FiniteBetaSpace::two_point(&[rat(1, 2), int(2)]);
        let u = beta_to_uniformity(&s).unwrap();
        let json = serde_json::to_string(&u.to_file()).unwrap();
        let back = Uniformity::from_file(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, u);
    }
}
