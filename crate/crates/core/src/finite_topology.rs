//! Finite topological spaces encoded by their specialization preorder.
//!
//! `spec[x][y]` holds iff `x` lies in the closure of `{y}`. Closed sets are
//! the down-sets of this preorder and open sets the up-sets, so every point
//! has a smallest open neighborhood `{y : spec[x][y]}` and every topological
//! question reduces to bitset queries.

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{invalid, Error, Result};

pub type PointSet = BitSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpaceRepr", into = "SpaceRepr")]
pub struct FiniteSpace {
    spec: Vec<Vec<bool>>,
    /// `up[x]`: the smallest open set containing `x`.
    up: Vec<PointSet>,
    /// `down[y]`: the closure of `{y}`.
    down: Vec<PointSet>,
}

impl FiniteSpace {
    pub fn new(spec: Vec<Vec<bool>>) -> Result<Self> {
        let n = spec.len();
        if spec.iter().any(|r| r.len() != n) {
            return Err(Error::Malformed("specialization matrix is not square".into()));
        }
        if let Some(x) = (0..n).find(|&x| !spec[x][x]) {
            return Err(invalid("finite space", format!("spec[{x}][{x}] must be true (reflexivity)")));
        }
        for x in 0..n {
            for y in 0..n {
                if !spec[x][y] {
                    continue;
                }
                if let Some(z) = (0..n).find(|&z| spec[y][z] && !spec[x][z]) {
                    return Err(invalid(
                        "finite space",
                        format!("spec is not transitive at ({x}, {y}, {z})"),
                    ));
                }
            }
        }
        Ok(Self::from_valid(spec))
    }

    fn from_valid(spec: Vec<Vec<bool>>) -> Self {
        let n = spec.len();
        let up = (0..n)
            .map(|x| BitSet::from_indices(n, (0..n).filter(|&y| spec[x][y])).expect("in range"))
            .collect();
        let down = (0..n)
            .map(|y| BitSet::from_indices(n, (0..n).filter(|&x| spec[x][y])).expect("in range"))
            .collect();
        FiniteSpace { spec, up, down }
    }

    pub fn discrete(n: usize) -> Self {
        Self::from_valid((0..n).map(|i| (0..n).map(|j| i == j).collect()).collect())
    }

    pub fn indiscrete(n: usize) -> Self {
        Self::from_valid(vec![vec![true; n]; n])
    }

    /// Points `{0, 1}` with open sets `∅, {1}, {0, 1}`.
    pub fn sierpinski() -> Self {
        Self::from_valid(vec![vec![true, true], vec![false, true]])
    }

    /// The topology generated by a partition into blocks (`class[x]` is the block of `x`).
    pub fn from_partition(class: &[usize]) -> Self {
        Self::from_valid(
            class
                .iter()
                .map(|a| class.iter().map(|b| a == b).collect())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.spec.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spec.is_empty()
    }

    pub fn spec(&self) -> &[Vec<bool>] {
        &self.spec
    }

    /// `x ∈ cls({y})`.
    pub fn specializes(&self, x: usize, y: usize) -> bool {
        self.spec[x][y]
    }

    pub fn empty_set(&self) -> PointSet {
        BitSet::empty(self.len())
    }

    pub fn whole(&self) -> PointSet {
        BitSet::full(self.len())
    }

    pub fn set<I: IntoIterator<Item = usize>>(&self, points: I) -> Result<PointSet> {
        BitSet::from_indices(self.len(), points)
            .map_err(|i| Error::Malformed(format!("point {i} out of range for a {}-point space", self.len())))
    }

    fn check_point(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            Err(Error::Malformed(format!("point {x} out of range for a {}-point space", self.len())))
        }
    }

    fn check_set(&self, e: &PointSet) -> Result<()> {
        if e.universe() == self.len() {
            Ok(())
        } else {
            Err(Error::Malformed(format!(
                "set over {} points used in a {}-point space",
                e.universe(),
                self.len()
            )))
        }
    }

    /// Smallest open set containing `x`; every neighborhood of `x` contains it.
    pub fn minimal_neighborhood(&self, x: usize) -> &PointSet {
        &self.up[x]
    }

    /// Smallest open set containing `e` (the intersection of all its open supersets).
    pub fn minimal_open_superset(&self, e: &PointSet) -> PointSet {
        let mut out = self.empty_set();
        for x in e.iter() {
            out.union_with(&self.up[x]);
        }
        out
    }

    pub fn closure(&self, e: &PointSet) -> PointSet {
        let mut out = self.empty_set();
        for y in e.iter() {
            out.union_with(&self.down[y]);
        }
        out
    }

    pub fn is_open(&self, u: &PointSet) -> bool {
        u.iter().all(|x| self.up[x].is_subset(u))
    }

    pub fn is_closed(&self, c: &PointSet) -> bool {
        c.iter().all(|y| self.down[y].is_subset(c))
    }

    /// Some open `O` satisfies `x ∈ O ⊆ u`.
    pub fn is_neighborhood(&self, u: &PointSet, x: usize) -> Result<bool> {
        self.check_set(u)?;
        self.check_point(x)?;
        Ok(self.up[x].is_subset(u))
    }

    /// `u` contains an open superset of `e`.
    pub fn is_neighborhood_of_set(&self, u: &PointSet, e: &PointSet) -> bool {
        self.minimal_open_superset(e).is_subset(u)
    }

    /// Every open set, by filtering all subsets (at most 20 points).
    pub fn open_sets(&self) -> Vec<PointSet> {
        BitSet::all_subsets(self.len()).filter(|u| self.is_open(u)).collect()
    }

    pub fn closed_sets(&self) -> Vec<PointSet> {
        BitSet::all_subsets(self.len()).filter(|c| self.is_closed(c)).collect()
    }

    /// Distinct points have disjoint neighborhoods.
    pub fn is_hausdorff(&self) -> bool {
        let n = self.len();
        (0..n).all(|x| (x + 1..n).all(|y| self.up[x].is_disjoint(&self.up[y])))
    }

    /// Every neighborhood of every point contains a closed neighborhood of that point.
    ///
    /// A closed neighborhood of `x` contains `cls(up(x))`, which is itself a closed
    /// neighborhood, so the condition is `cls(up(x)) ⊆ U` for every `U ⊇ up(x)`,
    /// i.e. `cls(up(x)) ⊆ up(x)`.
    pub fn is_regular(&self) -> bool {
        (0..self.len()).all(|x| self.closure(&self.up[x]).is_subset(&self.up[x]))
    }

    /// Disjoint neighborhoods `(u, v)` of `k` and `y`, smallest candidates first.
    ///
    /// Returns `None` when no disjoint pair exists. For empty `k` the pair is `(∅, X)`.
    pub fn separate_compact_from_point(&self, k: &PointSet, y: usize) -> Result<Option<(PointSet, PointSet)>> {
        self.check_set(k)?;
        self.check_point(y)?;
        if k.contains(y) {
            return Err(Error::Precondition(format!("point {y} lies in the compact set")));
        }
        if k.is_empty() {
            return Ok(Some((self.empty_set(), self.whole())));
        }
        let u = self.minimal_open_superset(k);
        let v = self.up[y].clone();
        Ok(if u.is_disjoint(&v) { Some((u, v)) } else { None })
    }

    /// The topology comes from a pseudo-metric iff the specialization preorder is symmetric.
    pub fn is_pseudometrizable(&self) -> bool {
        let n = self.len();
        (0..n).all(|x| (0..n).all(|y| self.spec[x][y] == self.spec[y][x]))
    }
}

/// Every topology on `n <= 5` labeled points, each exactly once.
pub fn enumerate_spaces(n: usize) -> Result<impl Iterator<Item = FiniteSpace>> {
    if n > 5 {
        return Err(Error::SizeLimit(format!("space enumeration is capped at 5 points, got {n}")));
    }
    let off: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let total = 1u64 << off.len();
    Ok((0..total).filter_map(move |mask| {
        let mut rows = [0u8; 5];
        for (i, row) in rows.iter_mut().enumerate().take(n) {
            *row = 1 << i;
        }
        for (b, &(i, j)) in off.iter().enumerate() {
            if mask >> b & 1 == 1 {
                rows[i] |= 1 << j;
            }
        }
        // Transitive iff each row contains the rows of its members.
        let transitive = (0..n).all(|i| (0..n).all(|j| rows[i] >> j & 1 == 0 || rows[j] & !rows[i] == 0));
        transitive.then(|| {
            FiniteSpace::from_valid(
                (0..n)
                    .map(|i| (0..n).map(|j| rows[i] >> j & 1 == 1).collect())
                    .collect(),
            )
        })
    }))
}

#[derive(Serialize, Deserialize)]
struct SpaceRepr {
    n: usize,
    spec: Vec<Vec<bool>>,
}

impl TryFrom<SpaceRepr> for FiniteSpace {
    type Error = Error;

    fn try_from(r: SpaceRepr) -> Result<Self> {
        if r.spec.len() != r.n {
            return Err(Error::Malformed(format!("n = {} but spec has {} rows", r.n, r.spec.len())));
        }
        FiniteSpace::new(r.spec)
    }
}

impl From<FiniteSpace> for SpaceRepr {
    fn from(s: FiniteSpace) -> Self {
        SpaceRepr { n: s.len(), spec: s.spec }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_examples() {
        let s = FiniteSpace::sierpinski();
        assert!(s.closure(&s.empty_set()).is_empty());
        assert_eq!(s.closure(&s.set([1]).unwrap()).to_vec(), vec![0, 1]);
        assert_eq!(s.closure(&s.set([0]).unwrap()).to_vec(), vec![0]);
        let d = FiniteSpace::discrete(2);
        assert_eq!(d.closure(&d.set([0]).unwrap()).to_vec(), vec![0]);
    }

    #[test]
    fn sierpinski_open_sets() {
        let s = FiniteSpace::sierpinski();
        let opens: Vec<Vec<usize>> = s.open_sets().iter().map(|u| u.to_vec()).collect();
        assert_eq!(opens, vec![vec![], vec![1], vec![0, 1]]);
    }

    #[test]
    fn neighborhood_examples() {
        let s = FiniteSpace::sierpinski();
        assert!(s.is_neighborhood(&s.whole(), 0).unwrap());
        assert!(!s.is_neighborhood(&s.set([0]).unwrap(), 0).unwrap());
        assert!(s.is_neighborhood(&s.set([1]).unwrap(), 1).unwrap());
        let d = FiniteSpace::discrete(3);
        assert!(d.is_neighborhood(&d.set([1, 2]).unwrap(), 2).unwrap());
    }

    #[test]
    fn separation_examples() {
        assert!(FiniteSpace::discrete(3).is_hausdorff());
        assert!(!FiniteSpace::sierpinski().is_hausdorff());
        assert!(!FiniteSpace::indiscrete(2).is_hausdorff());
        assert!(FiniteSpace::discrete(3).is_regular());
        assert!(!FiniteSpace::sierpinski().is_regular());
        assert!(FiniteSpace::indiscrete(2).is_regular());
        assert!(FiniteSpace::indiscrete(3).is_pseudometrizable());
        assert!(!FiniteSpace::sierpinski().is_pseudometrizable());
    }

    #[test]
    fn separate_compact_examples() {
        let d = FiniteSpace::discrete(2);
        let (u, v) = d.separate_compact_from_point(&d.set([0]).unwrap(), 1).unwrap().unwrap();
        assert_eq!((u.to_vec(), v.to_vec()), (vec![0], vec![1]));
        let s = FiniteSpace::sierpinski();
        assert_eq!(s.separate_compact_from_point(&s.set([0]).unwrap(), 1).unwrap(), None);
        let (u, v) = s.separate_compact_from_point(&s.empty_set(), 1).unwrap().unwrap();
        assert!(u.is_empty());
        assert_eq!(v, s.whole());
        assert!(matches!(
            s.separate_compact_from_point(&s.set([1]).unwrap(), 1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_spaces(1).unwrap().count(), 1);
        assert_eq!(enumerate_spaces(2).unwrap().count(), 4);
        assert_eq!(enumerate_spaces(3).unwrap().count(), 29);
        assert_eq!(enumerate_spaces(4).unwrap().count(), 355);
        assert_eq!(enumerate_spaces(5).unwrap().count(), 6942);
        assert!(matches!(enumerate_spaces(6), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn rejects_non_preorders() {
        assert!(FiniteSpace::new(vec![vec![false]]).is_err());
        let intransitive = vec![
            vec![true, true, false],
            vec![false, true, true],
            vec![false, false, true],
        ];
        assert!(matches!(FiniteSpace::new(intransitive), Err(Error::Invalid { .. })));
    }

    #[test]
    fn json_shape() {
        let s: FiniteSpace = serde_json::from_str(r#"{"n":2,"spec":[[true,true],[false,true]]}"#).unwrap();
        assert_eq!(s, FiniteSpace::sierpinski());
        assert!(serde_json::from_str::<FiniteSpace>(r#"{"n":3,"spec":[[true]]}"#).is_err());
    }
}
