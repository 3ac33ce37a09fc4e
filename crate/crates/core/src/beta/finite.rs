//! Beta-spaces with explicit point and radius lists and a ball table.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{topology, BetaError, BetaSpace, SampleRng, Verdict};
use crate::rational::{format_rational, Rational};

/// Largest carrier a [`PointSet`] can hold.
pub const MAX_POINTS: usize = 64;

/// Subset of a finite carrier, as a bitmask over point indices.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PointSet(pub u64);

impl PointSet {
    pub const EMPTY: PointSet = PointSet(0);

    pub fn full(n: usize) -> Self {
        if n >= 64 {
            PointSet(u64::MAX)
        } else {
            PointSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        PointSet(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices.into_iter().fold(Self::EMPTY, |s, i| s.with(i))
    }

    pub fn with(self, i: usize) -> Self {
        PointSet(self.0 | (1 << i))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn union(self, other: Self) -> Self {
        PointSet(self.0 | other.0)
    }

    pub fn intersect(self, other: Self) -> Self {
        PointSet(self.0 & other.0)
    }

    pub fn minus(self, other: Self) -> Self {
        PointSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Finite beta-space. Points and radii are indices into label lists;
/// `balls[r][x]` is `β(x, r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteBetaSpace {
    point_labels: Vec<String>,
    radius_labels: Vec<String>,
    balls: Vec<Vec<PointSet>>,
    swing_table: Option<Vec<usize>>,
}

/// Interchange format: `balls` maps `"point,radius"` to the listed members.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteSpaceFile {
    pub points: Vec<String>,
    pub radii: Vec<String>,
    pub balls: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub swing: Option<BTreeMap<String, String>>,
}

impl FiniteBetaSpace {
    pub fn new(
        points: Vec<String>,
        radii: Vec<String>,
        balls: Vec<Vec<PointSet>>,
    ) -> Result<Self, BetaError> {
        if points.len() > MAX_POINTS {
            return Err(BetaError::CarrierTooLarge {
                points: points.len(),
                limit: MAX_POINTS,
            });
        }
        if points.is_empty() || radii.is_empty() {
            return Err(BetaError::Malformed(
                "carrier and radial set must be nonempty".into(),
            ));
        }
        if balls.len() != radii.len() || balls.iter().any(|row| row.len() != points.len()) {
            return Err(BetaError::Malformed(
                "ball table does not match points × radii".into(),
            ));
        }
        let full = PointSet::full(points.len());
        if balls.iter().flatten().any(|b| !b.is_subset(full)) {
            return Err(BetaError::Malformed(
                "ball contains an index outside the carrier".into(),
            ));
        }
        Ok(Self {
            point_labels: points,
            radius_labels: radii,
            balls,
            swing_table: None,
        })
    }

    /// Attaches an explicit swing rule, `table[r]` being the swing of radius `r`.
    pub fn with_swing_table(mut self, table: Vec<usize>) -> Result<Self, BetaError> {
        if table.len() != self.radius_count() || table.iter().any(|&s| s >= self.radius_count()) {
            return Err(BetaError::Malformed(
                "swing table does not match the radial set".into(),
            ));
        }
        self.swing_table = Some(table);
        Ok(self)
    }

    /// Finite metric space with the given radii: `β(x, r) = {y : d(x, y) < r}`.
    pub fn from_metric(
        labels: Vec<String>,
        distances: &[Vec<Rational>],
        radii: &[Rational],
    ) -> Result<Self, BetaError> {
        let n = labels.len();
        if distances.len() != n || distances.iter().any(|row| row.len() != n) {
            return Err(BetaError::Malformed(
                "distance matrix does not match the carrier".into(),
            ));
        }
        let balls = radii
            .iter()
            .map(|r| {
                (0..n)
                    .map(|x| PointSet::from_indices((0..n).filter(|&y| distances[x][y] < *r)))
                    .collect()
            })
            .collect();
        Self::new(labels, radii.iter().map(format_rational).collect(), balls)
    }

    /// The two-point metric space `d(p, q) = 1` with the given radii.
    pub fn two_point(radii: &[Rational]) -> Self {
        use crate::rational::int;
        let d = vec![vec![int(0), int(1)], vec![int(1), int(0)]];
        Self::from_metric(vec!["p".into(), "q".into()], &d, radii)
            .expect("well-formed two-point space")
    }

    /// Every ball is a singleton.
    pub fn discrete(n: usize) -> Self {
        let balls = vec![(0..n).map(PointSet::singleton).collect()];
        Self::new(Self::default_labels(n), vec!["r".into()], balls)
            .expect("well-formed discrete space")
    }

    /// Every ball is the whole carrier.
    pub fn indiscrete(n: usize) -> Self {
        let balls = vec![vec![PointSet::full(n); n]];
        Self::new(Self::default_labels(n), vec!["r".into()], balls)
            .expect("well-formed indiscrete space")
    }

    pub fn default_labels(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    pub fn point_count(&self) -> usize {
        self.point_labels.len()
    }

    pub fn radius_count(&self) -> usize {
        self.radius_labels.len()
    }

    pub fn point_labels(&self) -> &[String] {
        &self.point_labels
    }

    pub fn radius_labels(&self) -> &[String] {
        &self.radius_labels
    }

    pub fn carrier(&self) -> PointSet {
        PointSet::full(self.point_count())
    }

    pub fn ball(&self, x: usize, r: usize) -> PointSet {
        self.balls[r][x]
    }

    pub fn balls(&self) -> impl Iterator<Item = PointSet> + '_ {
        self.balls.iter().flatten().copied()
    }

    pub fn swing_table(&self) -> Option<&[usize]> {
        self.swing_table.as_deref()
    }

    pub fn point_index(&self, label: &str) -> Option<usize> {
        self.point_labels.iter().position(|p| p == label)
    }

    pub fn radius_index(&self, label: &str) -> Option<usize> {
        self.radius_labels.iter().position(|r| r == label)
    }

    pub fn render_set(&self, set: PointSet) -> String {
        let names: Vec<&str> = set.iter().map(|i| self.point_labels[i].as_str()).collect();
        format!("{{{}}}", names.join(", "))
    }

    /// Whether every `y ∈ β(z, s)` has `β(z, s) ⊆ β(y, r)`.
    pub fn swing_holds(&self, r: usize, s: usize) -> bool {
        self.swing_violation(r, s).is_none()
    }

    /// First `(y, z)` with `y ∈ β(z, s)` but `β(z, s) ⊄ β(y, r)`.
    pub fn swing_violation(&self, r: usize, s: usize) -> Option<(usize, usize)> {
        (0..self.point_count()).find_map(|z| {
            let ball = self.ball(z, s);
            ball.iter()
                .find(|&y| !ball.is_subset(self.ball(y, r)))
                .map(|y| (y, z))
        })
    }

    /// All radii that are swing values of `r`, in radius order.
    pub fn swing_values(&self, r: usize) -> Vec<usize> {
        (0..self.radius_count())
            .filter(|&s| self.swing_holds(r, s))
            .collect()
    }

    fn contained(&self, r: usize, s: usize) -> bool {
        (0..self.point_count()).all(|x| self.ball(x, r).is_subset(self.ball(x, s)))
    }

    pub fn from_file(file: &FiniteSpaceFile) -> Result<Self, BetaError> {
        let points = file.points.clone();
        let radii = file.radii.clone();
        let lookup = |label: &str, list: &[String], what: &str| {
            list.iter()
                .position(|p| p == label)
                .ok_or_else(|| BetaError::Malformed(format!("unknown {what} `{label}`")))
        };
        let mut table = vec![vec![None; points.len()]; radii.len()];
        for (key, members) in &file.balls {
            let (p, r) = key.split_once(',').ok_or_else(|| {
                BetaError::Malformed(format!("ball key `{key}` is not `point,radius`"))
            })?;
            let x = lookup(p.trim(), &points, "point")?;
            let r = lookup(r.trim(), &radii, "radius")?;
            let mut set = PointSet::EMPTY;
            for m in members {
                set = set.with(lookup(m, &points, "point")?);
            }
            if table[r][x].replace(set).is_some() {
                return Err(BetaError::Malformed(format!("duplicate ball `{key}`")));
            }
        }
        let mut balls = Vec::with_capacity(radii.len());
        for (r, row) in table.into_iter().enumerate() {
            let mut out = Vec::with_capacity(points.len());
            for (x, b) in row.into_iter().enumerate() {
                out.push(b.ok_or_else(|| {
                    BetaError::Malformed(format!("missing ball `{},{}`", points[x], radii[r]))
                })?);
            }
            balls.push(out);
        }
        let space = Self::new(points, radii, balls)?;
        match &file.swing {
            None => Ok(space),
            Some(map) => {
                let mut table = Vec::with_capacity(space.radius_count());
                for r in &space.radius_labels {
                    let s = map.get(r).ok_or_else(|| {
                        BetaError::Malformed(format!("swing table has no entry for `{r}`"))
                    })?;
                    table.push(lookup(s, &space.radius_labels, "radius")?);
                }
                space.with_swing_table(table)
            }
        }
    }

    pub fn to_file(&self) -> FiniteSpaceFile {
        let mut balls = BTreeMap::new();
        for (r, row) in self.balls.iter().enumerate() {
            for (x, set) in row.iter().enumerate() {
                let members = set.iter().map(|i| self.point_labels[i].clone()).collect();
                balls.insert(
                    format!("{},{}", self.point_labels[x], self.radius_labels[r]),
                    members,
                );
            }
        }
        let swing = self.swing_table.as_ref().map(|t| {
            t.iter()
                .enumerate()
                .map(|(r, &s)| (self.radius_labels[r].clone(), self.radius_labels[s].clone()))
                .collect()
        });
        FiniteSpaceFile {
            points: self.point_labels.clone(),
            radii: self.radius_labels.clone(),
            balls,
            swing,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, BetaError> {
        let file: FiniteSpaceFile =
            serde_json::from_str(text).map_err(|e| BetaError::Malformed(e.to_string()))?;
        Self::from_file(&file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("serializable space")
    }
}

impl BetaSpace for FiniteBetaSpace {
    type Point = usize;
    type Radius = usize;

    fn in_ball(&self, center: &usize, radius: &usize, z: &usize) -> Result<bool, BetaError> {
        Ok(self.ball(*center, *radius).contains(*z))
    }

    fn swing(&self, radius: &usize) -> Result<usize, BetaError> {
        if let Some(table) = &self.swing_table {
            return Ok(table[*radius]);
        }
        self.swing_values(*radius)
            .first()
            .copied()
            .ok_or_else(|| BetaError::NoSwingValue {
                radius: self.radius_labels[*radius].clone(),
            })
    }

    fn is_swing_value(&self, radius: &usize, candidate: &usize) -> Result<bool, BetaError> {
        Ok(self.swing_holds(*radius, *candidate))
    }

    fn radial_cmp(&self, r: &usize, s: &usize) -> Result<Option<Ordering>, BetaError> {
        Ok(match (self.contained(*r, *s), self.contained(*s, *r)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        })
    }

    fn ball_witnesses(
        &self,
        center: &usize,
        radius: &usize,
        _rng: &mut SampleRng,
        _count: usize,
    ) -> Result<Vec<usize>, BetaError> {
        Ok(self.ball(*center, *radius).iter().collect())
    }

    fn points(&self) -> Option<Vec<usize>> {
        Some((0..self.point_count()).collect())
    }

    fn radii(&self) -> Option<Vec<usize>> {
        Some((0..self.radius_count()).collect())
    }

    fn sample_point(&self, rng: &mut SampleRng) -> usize {
        rng.gen_range(0..self.point_count())
    }

    fn sample_radius(&self, rng: &mut SampleRng) -> usize {
        rng.gen_range(0..self.radius_count())
    }

    fn describe_point(&self, p: &usize) -> String {
        self.point_labels[*p].clone()
    }

    fn describe_radius(&self, r: &usize) -> String {
        self.radius_labels[*r].clone()
    }

    fn topology_axioms(&self) -> Option<(Verdict, Verdict)> {
        topology::decide_open_axioms(self)
    }
}
