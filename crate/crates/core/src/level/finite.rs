//! Level sets and the solver hypotheses on finite carriers.

use serde::{Deserialize, Serialize};

use super::{LevelError, LevelOrder, LevelStructure};
use crate::beta::{
    check_separation, finite_topology, BetaError, BetaSpace, FiniteBetaSpace, PointSet, SampleRng,
};

/// `L(x, r)`: the points lying in `β(x, r_i)` along some infinite swing
/// sequence starting at `r`.
pub fn finite_level_set(space: &FiniteBetaSpace, x: usize, r: usize) -> PointSet {
    let radii = space.radius_count();
    let edges: Vec<Vec<usize>> = (0..radii).map(|t| space.swing_values(t)).collect();
    let mut set = PointSet::EMPTY;
    for y in 0..space.point_count() {
        let mut alive: Vec<bool> = (0..radii).map(|t| space.ball(x, t).contains(y)).collect();
        loop {
            let next: Vec<bool> = (0..radii)
                .map(|t| alive[t] && edges[t].iter().any(|&s| alive[s]))
                .collect();
            if next == alive {
                break;
            }
            alive = next;
        }
        if alive[r] {
            set = set.with(y);
        }
    }
    set
}

impl LevelStructure for FiniteBetaSpace {
    fn level_membership(&self, x: &usize, r: &usize, z: &usize) -> Result<bool, LevelError> {
        Ok(finite_level_set(self, *x, *r).contains(*z))
    }

    fn level_leq(&self, r: &usize, s: &usize) -> Result<LevelOrder, LevelError> {
        let (mut r_in_s, mut s_in_r) = (true, true);
        for x in 0..self.point_count() {
            let (lr, ls) = (finite_level_set(self, x, *r), finite_level_set(self, x, *s));
            r_in_s &= lr.is_subset(ls);
            s_in_r &= ls.is_subset(lr);
        }
        Ok(match (r_in_s, s_in_r) {
            (true, true) => LevelOrder::Equal,
            (true, false) => LevelOrder::Less,
            (false, true) => LevelOrder::Greater,
            (false, false) => LevelOrder::Incomparable,
        })
    }

    fn level_probes(
        &self,
        _x: &usize,
        _r: &usize,
        _rng: &mut SampleRng,
        _count: usize,
    ) -> Result<Vec<usize>, LevelError> {
        Ok((0..self.point_count()).collect())
    }

    fn exact_level_equality(
        &self,
        x: &usize,
        y: &usize,
        r: &usize,
    ) -> Result<Option<bool>, LevelError> {
        Ok(Some(
            finite_level_set(self, *x, *r) == finite_level_set(self, *y, *r),
        ))
    }
}

/// The hypotheses of level-descent convergence, decided on a finite space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteLevelReport {
    pub hausdorff: bool,
    pub ordered: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structured_violation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level_structured_violation: Option<String>,
}

impl FiniteLevelReport {
    pub fn all_hold(&self) -> bool {
        self.hausdorff
            && self.ordered
            && self.structured_violation.is_none()
            && self.level_structured_violation.is_none()
    }
}

pub fn check_level_structure(space: &FiniteBetaSpace) -> Result<FiniteLevelReport, LevelError> {
    let n = space.point_count();
    let radii = space.radius_count();
    let separation = check_separation(space)?;
    let mut ordered = true;
    for r in 0..radii {
        for s in r + 1..radii {
            ordered &= space.radial_cmp(&r, &s)?.is_some();
        }
    }
    let top = finite_topology(space)?;
    let minimal: Vec<PointSet> = (0..n).map(|x| top.minimal_neighbourhood(x)).collect();
    let label = |i: usize| space.point_labels()[i].clone();
    let rlabel = |i: usize| space.radius_labels()[i].clone();

    let structured_violation = (0..n)
        .find(|&x| (0..radii).all(|s| space.ball(x, s) != space.carrier()))
        .map(|x| format!("no ball around {} contains the whole carrier", label(x)));

    let mut level_structured_violation = None;
    'search: for x in 0..n {
        for r in 0..radii {
            let level = finite_level_set(space, x, r);
            let Some(y) = level
                .iter()
                .find(|&y| minimal[x].intersect(minimal[y]).is_empty())
            else {
                continue;
            };
            let mut found = false;
            for s in 0..radii {
                if level.is_subset(space.ball(x, s)) && space.level_leq(&s, &r)? == LevelOrder::Less
                {
                    found = true;
                    break;
                }
            }
            if !found {
                level_structured_violation = Some(format!(
                    "x = {}, r = {}, separable y = {}: no radius s <_L {} has L({}, {}) ⊆ β({}, s)",
                    label(x),
                    rlabel(r),
                    label(y),
                    rlabel(r),
                    label(x),
                    rlabel(r),
                    label(x)
                ));
                break 'search;
            }
        }
    }
    Ok(FiniteLevelReport {
        hausdorff: separation.hausdorff,
        ordered,
        structured_violation,
        level_structured_violation,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteFixedPoint {
    pub point: String,
    pub steps: usize,
    pub fixed_points: Vec<String>,
}

/// Fixed point of `map` (given as point indices) on a finite space, after
/// the solver hypotheses and contraction condition 1 are decided.
pub fn solve_finite(
    space: &FiniteBetaSpace,
    map: &[usize],
    x0: usize,
) -> Result<FiniteFixedPoint, LevelError> {
    let n = space.point_count();
    if map.len() != n || map.iter().any(|&y| y >= n) || x0 >= n {
        return Err(BetaError::Malformed(
            "map must send each point to a point of the carrier".into(),
        )
        .into());
    }
    let report = check_level_structure(space)?;
    if !report.hausdorff {
        return Err(LevelError::Hypothesis(
            "the topology is not Hausdorff".into(),
        ));
    }
    if !report.ordered {
        return Err(LevelError::Hypothesis(
            "the radii are not totally ordered".into(),
        ));
    }
    if let Some(witness) = report.level_structured_violation {
        return Err(LevelError::NotLevelStructured { witness });
    }
    let label = |i: usize| space.point_labels()[i].clone();
    for x in 0..n {
        for r in 0..space.radius_count() {
            let image = space.ball(map[x], r);
            if let Some(z) = space.ball(x, r).iter().find(|&z| !image.contains(map[z])) {
                return Err(LevelError::CertificateViolation {
                    condition: 1,
                    witness: format!(
                        "{} ∈ β({}, {}) but f({}) ∉ β(f({}), {})",
                        label(z),
                        label(x),
                        space.radius_labels()[r],
                        label(z),
                        label(x),
                        space.radius_labels()[r]
                    ),
                });
            }
        }
    }
    let mut x = x0;
    for steps in 0..=n {
        if map[x] == x {
            return Ok(FiniteFixedPoint {
                point: label(x),
                steps,
                fixed_points: (0..n).filter(|&y| map[y] == y).map(label).collect(),
            });
        }
        x = map[x];
    }
    Err(LevelError::NoFixedPoint { start: label(x0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn two_point() -> FiniteBetaSpace {
        FiniteBetaSpace::two_point(&[rat(1, 2), int(2)])
    }

    #[test]
    fn two_point_level_sets() {
        let s = two_point();
        assert_eq!(finite_level_set(&s, 0, 0), PointSet::singleton(0));
        assert_eq!(finite_level_set(&s, 0, 1), PointSet::full(2));
        assert_eq!(s.level_leq(&0, &1).unwrap(), LevelOrder::Less);
    }

    #[test]
    fn identity_is_refused() {
        let s = two_point();
        match solve_finite(&s, &[0, 1], 0).unwrap_err() {
            LevelError::NotLevelStructured { witness } => {
                assert!(
                    witness.starts_with("x = p, r = 2, separable y = q"),
                    "{witness}"
                );
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn discrete_constant_map() {
        let s = FiniteBetaSpace::discrete(3);
        let report = check_level_structure(&s).unwrap();
        assert!(report.hausdorff && report.ordered);
        assert!(report.structured_violation.is_some());
    }

    #[test]
    fn level_structured_space_solves() {
        let s = FiniteBetaSpace::two_point(&[rat(1, 2)]);
        let report = check_level_structure(&s).unwrap();
        assert!(report.level_structured_violation.is_none());
        let fp = solve_finite(&s, &[0, 0], 1).unwrap();
        assert_eq!(fp.point, "p");
        assert_eq!(fp.steps, 1);
    }
}
