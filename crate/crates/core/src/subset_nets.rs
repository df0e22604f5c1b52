//! Nets of subsets over the finite and the rational backends.
//!
//! Finite nets are indexed by a finite directed order or by `Z+` with an
//! eventually periodic schedule. Rational nets are `Z+`-indexed with a
//! finite preperiod followed by one of three closed-form tail rules. Every
//! question in this module is answered exactly for these families.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::bitset::BitSet;
use crate::directed_sets::{DirectedOrder, FiniteOrder};
use crate::error::{invalid, Error, Result};
use crate::finite_topology::{FiniteSpace, PointSet};
use crate::pseudometric_core::{
    kuratowski_horizon_oracle, point_from_json, point_set_distance, point_to_json, ExtendedRational,
    FinitePseudoMetric, Point, PointJson, Rational, RationalJson, RationalPointSpace, RationalSet,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictState {
    Holds,
    Fails,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Verdict {
    pub state: VerdictState,
    /// Evaluation bound, present only for `unknown`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
}

impl Verdict {
    pub const HOLDS: Verdict = Verdict {
        state: VerdictState::Holds,
        horizon: None,
    };
    pub const FAILS: Verdict = Verdict {
        state: VerdictState::Fails,
        horizon: None,
    };

    pub fn unknown(horizon: u64) -> Self {
        Verdict {
            state: VerdictState::Unknown,
            horizon: Some(horizon),
        }
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Self::HOLDS
        } else {
            Self::FAILS
        }
    }

    pub fn holds(&self) -> bool {
        self.state == VerdictState::Holds
    }

    pub fn fails(&self) -> bool {
        self.state == VerdictState::Fails
    }

    pub fn is_unknown(&self) -> bool {
        self.state == VerdictState::Unknown
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.state, self.horizon) {
            (VerdictState::Holds, _) => write!(f, "holds"),
            (VerdictState::Fails, _) => write!(f, "fails"),
            (VerdictState::Unknown, Some(h)) => write!(f, "unknown (horizon {h})"),
            (VerdictState::Unknown, None) => write!(f, "unknown"),
        }
    }
}

/// A subset of either backend's ground space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetDescription {
    Indices(PointSet),
    Points(RationalSet),
}

impl SetDescription {
    pub fn is_empty(&self) -> bool {
        match self {
            SetDescription::Indices(s) => s.is_empty(),
            SetDescription::Points(s) => s.is_empty(),
        }
    }

    pub fn as_indices(&self) -> Option<&PointSet> {
        match self {
            SetDescription::Indices(s) => Some(s),
            SetDescription::Points(_) => None,
        }
    }

    pub fn as_points(&self) -> Option<&RationalSet> {
        match self {
            SetDescription::Points(s) => Some(s),
            SetDescription::Indices(_) => None,
        }
    }

    /// Set inclusion; sets from different backends are never comparable.
    pub fn is_subset(&self, other: &SetDescription) -> bool {
        match (self, other) {
            (SetDescription::Indices(a), SetDescription::Indices(b)) => a.is_subset(b),
            (SetDescription::Points(a), SetDescription::Points(b)) => a.is_subset(b),
            _ => false,
        }
    }
}

impl Serialize for SetDescription {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            SetDescription::Indices(set) => set.to_vec().serialize(s),
            SetDescription::Points(set) => set.iter().map(point_to_json).collect::<Vec<_>>().serialize(s),
        }
    }
}

impl fmt::Display for SetDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetDescription::Indices(s) => write!(f, "{s}"),
            SetDescription::Points(s) => {
                write!(f, "{{")?;
                for (i, p) in s.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// Summary of the compactness-type properties of one net.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NetAnalysis {
    pub limit_set: SetDescription,
    pub limit_set_compact: Verdict,
    pub asympt_seq_compact: Verdict,
    pub weakly_asympt_seq_compact: Verdict,
    pub lagrange_stable: Verdict,
    pub converges_above_to_limit: Verdict,
}

/// Ground of a finite net: a topology, optionally induced by a pseudo-metric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGround {
    space: FiniteSpace,
    metric: Option<FinitePseudoMetric>,
}

impl FiniteGround {
    pub fn topological(space: FiniteSpace) -> Self {
        FiniteGround { space, metric: None }
    }

    pub fn metric_space(metric: FinitePseudoMetric) -> Self {
        FiniteGround {
            space: metric.topology(),
            metric: Some(metric),
        }
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn metric(&self) -> Option<&FinitePseudoMetric> {
        self.metric.as_ref()
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    /// Parses `{"n", "spec"}` (topology) or `{"n", "dist"}` (pseudo-metric).
    pub fn from_json_value(v: serde_json::Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Malformed("ground must be an object".into()))?;
        if obj.contains_key("dist") {
            Ok(FiniteGround::metric_space(from_value(v, "ground")?))
        } else if obj.contains_key("spec") {
            Ok(FiniteGround::topological(from_value(v, "ground")?))
        } else {
            Err(Error::Malformed("finite ground needs spec or dist".into()))
        }
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        match &self.metric {
            Some(m) => serde_json::to_value(m),
            None => serde_json::to_value(&self.space),
        }
        .expect("ground serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiniteIndexing {
    /// One set per element of a finite directed order.
    Directed { order: FiniteOrder, sets: Vec<PointSet> },
    /// `X_n = preperiod[n]` for `n < len`, then the cycle repeats forever.
    Sequence { preperiod: Vec<PointSet>, cycle: Vec<PointSet> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteNet {
    ground: FiniteGround,
    indexing: FiniteIndexing,
    /// Sets indexed at or above the top of the order (or the cycle): exactly the tail values that recur.
    recurring: Vec<usize>,
}

fn check_universe(n: usize, set: &PointSet, what: &str) -> Result<()> {
    if set.universe() == n {
        Ok(())
    } else {
        Err(Error::Malformed(format!(
            "{what} lives in a {}-point universe, ground has {n} points",
            set.universe()
        )))
    }
}

impl FiniteNet {
    pub fn sequence(ground: FiniteGround, preperiod: Vec<PointSet>, cycle: Vec<PointSet>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(invalid("subset net", "cycle must be nonempty"));
        }
        for s in preperiod.iter().chain(&cycle) {
            check_universe(ground.len(), s, "net member")?;
        }
        let recurring = (0..cycle.len()).collect();
        Ok(FiniteNet {
            ground,
            indexing: FiniteIndexing::Sequence { preperiod, cycle },
            recurring,
        })
    }

    pub fn directed(ground: FiniteGround, order: FiniteOrder, sets: Vec<PointSet>) -> Result<Self> {
        if sets.len() != order.len() {
            return Err(Error::Malformed(format!(
                "{} sets for a {}-element index order",
                sets.len(),
                order.len()
            )));
        }
        for s in &sets {
            check_universe(ground.len(), s, "net member")?;
        }
        let n = order.len();
        let top = (0..n)
            .find(|&u| (0..n).all(|t| order.leq(t, u)))
            .expect("finite directed orders have a global upper bound");
        let recurring = (0..n).filter(|&t| order.leq(top, t)).collect();
        Ok(FiniteNet {
            ground,
            indexing: FiniteIndexing::Directed { order, sets },
            recurring,
        })
    }

    /// Constant net `X_n = set`.
    pub fn constant(ground: FiniteGround, set: PointSet) -> Result<Self> {
        Self::sequence(ground, Vec::new(), vec![set])
    }

    pub fn ground(&self) -> &FiniteGround {
        &self.ground
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.ground.space
    }

    pub fn indexing(&self) -> &FiniteIndexing {
        &self.indexing
    }

    /// The repeating part of a `Z+`-indexed net.
    pub fn cycle(&self) -> Option<&[PointSet]> {
        match &self.indexing {
            FiniteIndexing::Sequence { cycle, .. } => Some(cycle),
            FiniteIndexing::Directed { .. } => None,
        }
    }

    /// `X_n` of a `Z+`-indexed net.
    pub fn set_at(&self, n: u64) -> Option<&PointSet> {
        match &self.indexing {
            FiniteIndexing::Sequence { preperiod, cycle } => Some(sequence_term(preperiod, cycle, n)),
            FiniteIndexing::Directed { .. } => None,
        }
    }

    fn members(&self) -> &[PointSet] {
        match &self.indexing {
            FiniteIndexing::Sequence { cycle, .. } => cycle,
            FiniteIndexing::Directed { sets, .. } => sets,
        }
    }

    fn recurring_sets(&self) -> impl Iterator<Item = &PointSet> + '_ {
        let members = self.members();
        self.recurring.iter().map(move |&i| &members[i])
    }

    fn check_set(&self, a: &PointSet) -> Result<()> {
        check_universe(self.ground.len(), a, "target set")
    }

    /// Smallest tail union `∪_{t >= s} X_t` over all `s`.
    pub fn tail_union(&self) -> PointSet {
        self.recurring_sets().fold(self.space().empty_set(), |acc, s| acc.union(s))
    }

    pub fn limit_set(&self) -> PointSet {
        self.space().closure(&self.tail_union())
    }

    /// `∩_{s <= h} cls(∪_{s <= t <= h2} X_t)`, straight from the definition.
    ///
    /// For a finite index order the intersection runs over every element and the horizons are ignored.
    pub fn limit_set_horizon_oracle(&self, h: u64, h2: u64) -> Result<PointSet> {
        if h2 < h {
            return Err(Error::Precondition(format!("tail depth {h2} is below horizon {h}")));
        }
        let space = self.space();
        let mut out = space.whole();
        match &self.indexing {
            FiniteIndexing::Directed { order, sets } => {
                for s in 0..order.len() {
                    let tail = (0..order.len())
                        .filter(|&t| order.leq(s, t))
                        .fold(space.empty_set(), |acc, t| acc.union(&sets[t]));
                    out.intersect_with(&space.closure(&tail));
                }
            }
            FiniteIndexing::Sequence { preperiod, cycle } => {
                for s in 0..=h {
                    let tail = (s..=h2).fold(space.empty_set(), |acc, t| acc.union(sequence_term(preperiod, cycle, t)));
                    out.intersect_with(&space.closure(&tail));
                }
            }
        }
        Ok(out)
    }

    /// Points reached by selections along monotone final subsequences.
    ///
    /// Such subsequences eventually run inside the recurring indices, so `y`
    /// qualifies iff some recurring member meets the smallest neighborhood of `y`.
    pub fn sequential_limit_set(&self) -> PointSet {
        let space = self.space();
        let mut out = space.empty_set();
        for y in 0..space.len() {
            if self.recurring_sets().any(|s| s.intersects(space.minimal_neighborhood(y))) {
                out.insert(y);
            }
        }
        out
    }

    /// Brute-force selection search.
    ///
    /// `Z+` nets: `y` is accepted when some arithmetic subsequence `t0 + k q`
    /// has at least two terms in `[h/2, h]` and every such term meets every
    /// open set around `y`. Exact once `h/2` clears the preperiod and one cycle.
    pub fn sequential_limit_set_horizon(&self, h: u64) -> Result<PointSet> {
        let space = self.space();
        let nbhds: Vec<PointSet> = (0..space.len()).map(|y| neighborhood_core(space, y)).collect();
        let mut out = space.empty_set();
        match &self.indexing {
            FiniteIndexing::Directed { order, sets } => {
                // Monotone final sequences end among the global upper bounds, any of which may repeat forever.
                let n = order.len();
                let uppers: Vec<usize> = (0..n).filter(|&u| (0..n).all(|t| order.leq(t, u))).collect();
                for (y, nb) in nbhds.iter().enumerate() {
                    if uppers.iter().any(|&u| sets[u].intersects(nb)) {
                        out.insert(y);
                    }
                }
            }
            FiniteIndexing::Sequence { preperiod, cycle } => {
                if h < 4 {
                    return Err(Error::Precondition("selection search needs a horizon of at least 4".into()));
                }
                let lo = h / 2;
                for (y, nb) in nbhds.iter().enumerate() {
                    let meets: Vec<bool> = (0..=h).map(|t| sequence_term(preperiod, cycle, t).intersects(nb)).collect();
                    let found = (1..=h).any(|q| {
                        (0..q).any(|phase| {
                            let terms: Vec<u64> = (lo..=h).filter(|t| t % q == phase).collect();
                            terms.len() >= 2 && terms.iter().all(|&t| meets[t as usize])
                        })
                    });
                    if found {
                        out.insert(y);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn converges_from_above(&self, a: &PointSet) -> Result<Verdict> {
        self.check_set(a)?;
        let u = self.space().minimal_open_superset(a);
        Ok(Verdict::from_bool(self.tail_union().is_subset(&u)))
    }

    pub fn converges_from_below(&self, a: &PointSet) -> Result<Verdict> {
        self.check_set(a)?;
        let space = self.space();
        Ok(Verdict::from_bool(a.iter().all(|y| {
            let nb = space.minimal_neighborhood(y);
            self.recurring_sets().all(|s| s.intersects(nb))
        })))
    }

    fn metric_for(&self, k: &PointSet) -> Result<&FinitePseudoMetric> {
        self.check_set(k)?;
        if k.is_empty() {
            return Err(Error::Precondition("compact target must be nonempty".into()));
        }
        self.ground
            .metric()
            .ok_or_else(|| Error::Unsupported("semi-distance checks need a pseudo-metric ground".into()))
    }

    /// Whether `d(X_s; k) -> 0`.
    pub fn semidistance_convergence_check(&self, k: &PointSet) -> Result<Verdict> {
        let m = self.metric_for(k)?;
        for s in self.recurring_sets() {
            if !m.semidistance(s, k)?.is_zero() {
                return Ok(Verdict::FAILS);
            }
        }
        Ok(Verdict::HOLDS)
    }

    /// `(converges_from_below(k), d(k; X_s) -> 0)`.
    pub fn below_iff_semidistance(&self, k: &PointSet) -> Result<(Verdict, Verdict)> {
        let m = self.metric_for(k)?;
        let below = self.converges_from_below(k)?;
        let mut dist = true;
        for s in self.recurring_sets() {
            dist &= m.semidistance(k, s)?.is_zero();
        }
        Ok((below, Verdict::from_bool(dist)))
    }

    pub fn is_eventually_lagrange_stable(&self) -> Verdict {
        Verdict::HOLDS
    }

    pub fn is_asymptotically_seq_compact(&self) -> Verdict {
        Verdict::HOLDS
    }

    pub fn is_weakly_asymptotically_seq_compact(&self) -> Verdict {
        Verdict::HOLDS
    }

    pub fn is_limit_set_compact(&self) -> Verdict {
        let l = self.limit_set();
        Verdict::from_bool(!l.is_empty() && self.converges_from_above(&l).expect("same universe").holds())
    }

    pub fn is_singleton_valued(&self) -> bool {
        match &self.indexing {
            FiniteIndexing::Sequence { preperiod, cycle } => preperiod.iter().chain(cycle).all(|s| s.len() == 1),
            FiniteIndexing::Directed { sets, .. } => sets.iter().all(|s| s.len() == 1),
        }
    }

    fn require_point_net(&self) -> Result<()> {
        if self.is_singleton_valued() {
            Ok(())
        } else {
            Err(Error::Precondition("net is not singleton-valued".into()))
        }
    }

    /// Points `y` such that the point net is frequently in every neighborhood of `y`.
    pub fn cluster_set(&self) -> Result<PointSet> {
        self.require_point_net()?;
        let space = self.space();
        let mut out = space.empty_set();
        for y in 0..space.len() {
            if self.recurring_sets().any(|s| s.is_subset(space.minimal_neighborhood(y))) {
                out.insert(y);
            }
        }
        Ok(out)
    }

    pub fn eventually_in(&self, u: &PointSet) -> Result<Verdict> {
        self.require_point_net()?;
        self.check_set(u)?;
        Ok(Verdict::from_bool(self.recurring_sets().all(|s| s.is_subset(u))))
    }

    pub fn frequently_in(&self, u: &PointSet) -> Result<Verdict> {
        self.require_point_net()?;
        self.check_set(u)?;
        Ok(Verdict::from_bool(self.recurring_sets().any(|s| s.is_subset(u))))
    }

    pub fn analyze(&self) -> NetAnalysis {
        let l = self.limit_set();
        NetAnalysis {
            converges_above_to_limit: self.converges_from_above(&l).expect("same universe"),
            limit_set_compact: self.is_limit_set_compact(),
            asympt_seq_compact: self.is_asymptotically_seq_compact(),
            weakly_asympt_seq_compact: self.is_weakly_asymptotically_seq_compact(),
            lagrange_stable: self.is_eventually_lagrange_stable(),
            limit_set: SetDescription::Indices(l),
        }
    }
}

fn sequence_term<'a, T>(preperiod: &'a [T], cycle: &'a [T], n: u64) -> &'a T {
    let p = preperiod.len() as u64;
    if n < p {
        &preperiod[n as usize]
    } else {
        &cycle[((n - p) % cycle.len() as u64) as usize]
    }
}

/// Intersection of all open sets containing `y`, enumerated directly on small spaces.
fn neighborhood_core(space: &FiniteSpace, y: usize) -> PointSet {
    if space.len() > 10 {
        return space.minimal_neighborhood(y).clone();
    }
    space
        .open_sets()
        .into_iter()
        .filter(|u| u.contains(y))
        .fold(space.whole(), |acc, u| acc.intersection(&u))
}

/// Closed-form tails of a rational net.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TailRule {
    Periodic(Vec<RationalSet>),
    /// `X_n = {c + n v}`.
    AffineEscape { c: Point, v: Point },
    /// `X_n = {a + r^n (b - a)}`.
    GeometricConverge { a: Point, b: Point, r: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalNet {
    space: RationalPointSpace,
    preperiod: Vec<RationalSet>,
    tail: TailRule,
}

impl RationalNet {
    pub fn new(space: RationalPointSpace, preperiod: Vec<RationalSet>, tail: TailRule) -> Result<Self> {
        for s in &preperiod {
            space.check_set(s)?;
        }
        let start = preperiod.len() as u64;
        match &tail {
            TailRule::Periodic(cycle) => {
                if cycle.is_empty() {
                    return Err(invalid("tail rule", "periodic cycle must be nonempty"));
                }
                for s in cycle {
                    space.check_set(s)?;
                }
            }
            TailRule::AffineEscape { c, v } => {
                check_dim(&space, c)?;
                check_dim(&space, v)?;
                if v.is_origin() {
                    return Err(invalid("tail rule", "affine escape direction must be nonzero"));
                }
                for e in space.excluded() {
                    if let Some(n) = affine_hit(c, v, e, start) {
                        return Err(Error::NotMember(format!("{e} (affine term n = {n})")));
                    }
                }
            }
            TailRule::GeometricConverge { a, b, r } => {
                check_dim(&space, a)?;
                check_dim(&space, b)?;
                if r.is_zero() || r.abs() >= Rational::one() {
                    return Err(invalid("tail rule", format!("geometric ratio must satisfy 0 < |r| < 1, got {r}")));
                }
                for e in space.excluded() {
                    if let Some(n) = geometric_hit(a, b, r, e, start) {
                        return Err(Error::NotMember(format!("{e} (geometric term n = {n})")));
                    }
                }
            }
        }
        Ok(RationalNet { space, preperiod, tail })
    }

    pub fn space(&self) -> &RationalPointSpace {
        &self.space
    }

    pub fn preperiod(&self) -> &[RationalSet] {
        &self.preperiod
    }

    pub fn tail(&self) -> &TailRule {
        &self.tail
    }

    pub fn set_at(&self, n: u64) -> RationalSet {
        let p = self.preperiod.len() as u64;
        if n < p {
            return self.preperiod[n as usize].clone();
        }
        match &self.tail {
            TailRule::Periodic(cycle) => sequence_term(&[], cycle, n - p).clone(),
            TailRule::AffineEscape { c, v } => BTreeSet::from([affine_term(c, v, n)]),
            TailRule::GeometricConverge { a, b, r } => BTreeSet::from([geometric_term(a, b, r, n)]),
        }
    }

    /// Every point named by the net's description plus the tail's analytic limit.
    pub fn candidate_grid(&self) -> RationalSet {
        let mut grid: RationalSet = self.preperiod.iter().flatten().cloned().collect();
        match &self.tail {
            TailRule::Periodic(cycle) => grid.extend(cycle.iter().flatten().cloned()),
            TailRule::AffineEscape { c, .. } => {
                grid.insert(c.clone());
            }
            TailRule::GeometricConverge { a, b, .. } => {
                grid.insert(a.clone());
                grid.insert(b.clone());
            }
        }
        grid
    }

    /// The analytic limit point of a geometric tail, when it belongs to the space.
    fn geometric_limit(&self) -> Option<&Point> {
        match &self.tail {
            TailRule::GeometricConverge { a, .. } if self.space.contains(a) => Some(a),
            _ => None,
        }
    }

    pub fn limit_set(&self) -> RationalSet {
        match &self.tail {
            TailRule::Periodic(cycle) => cycle.iter().flatten().cloned().collect(),
            TailRule::AffineEscape { .. } => RationalSet::new(),
            TailRule::GeometricConverge { .. } => self.geometric_limit().into_iter().cloned().collect(),
        }
    }

    /// The defining intersection on truncated data over the candidate grid.
    ///
    /// Periodic tails repeat, so closure of a truncated union is the union
    /// itself. For the injective rules closure membership is judged by the
    /// shrinking-distance test of [`kuratowski_horizon_oracle`] at depth `h2`.
    pub fn limit_set_horizon_oracle(&self, h: u64, h2: u64) -> Result<RationalSet> {
        if h2 < h {
            return Err(Error::Precondition(format!("tail depth {h2} is below horizon {h}")));
        }
        match &self.tail {
            TailRule::Periodic(_) => {
                let grid = self.candidate_grid();
                let sets: Vec<RationalSet> = (0..=h2).map(|t| self.set_at(t)).collect();
                Ok(grid
                    .into_iter()
                    .filter(|y| (0..=h as usize).all(|s| sets[s..].iter().any(|x| x.contains(y))))
                    .collect())
            }
            _ => {
                let k = kuratowski_horizon_oracle(self, h2)?;
                Ok(k.limsup.as_points().expect("rational backend").clone())
            }
        }
    }

    pub fn sequential_limit_set(&self) -> RationalSet {
        match &self.tail {
            // Constant selections along each phase.
            TailRule::Periodic(cycle) => cycle.iter().flatten().cloned().collect(),
            TailRule::AffineEscape { .. } => RationalSet::new(),
            TailRule::GeometricConverge { .. } => self.geometric_limit().into_iter().cloned().collect(),
        }
    }

    /// Selection search along arithmetic subsequences `t0 + k q`, `q <= h/16`.
    ///
    /// A grid point is accepted when the selected distances `d(y, X_t)` over
    /// `[h/2, h]` are all zero or all at most half of the smallest one over
    /// `[h/4, h/2)`. The step cap keeps at least four terms in the early window.
    pub fn sequential_limit_set_horizon(&self, h: u64) -> Result<RationalSet> {
        if h < 16 {
            return Err(Error::Precondition("selection search needs a horizon of at least 16".into()));
        }
        let sets: Vec<RationalSet> = (0..=h).map(|t| self.set_at(t)).collect();
        let mut out = RationalSet::new();
        for y in self.candidate_grid() {
            if !self.space.contains(&y) {
                continue;
            }
            let d: Vec<ExtendedRational> = sets.iter().map(|s| point_set_distance(&self.space, &y, s)).collect();
            let found = (1..=h / 16).any(|q| {
                (0..q).any(|phase| {
                    let along = |lo: u64, hi: u64| (lo..hi).filter(move |t| t % q == phase).map(|t| d[t as usize].clone());
                    match (along(h / 2, h + 1).max(), along(h / 4, h / 2).min()) {
                        (Some(late), _) if late.is_zero() => true,
                        (Some(ExtendedRational::Finite(late)), Some(ExtendedRational::Finite(early))) => {
                            &late + &late <= early
                        }
                        _ => false,
                    }
                })
            });
            if found {
                out.insert(y);
            }
        }
        Ok(out)
    }

    pub fn converges_from_above(&self, a: &RationalSet) -> Result<Verdict> {
        self.space.check_set(a)?;
        Ok(Verdict::from_bool(match &self.tail {
            // Finite tail union; metric neighborhoods of a finite set can exclude any outside point.
            TailRule::Periodic(cycle) => cycle.iter().flatten().all(|p| a.contains(p)),
            TailRule::AffineEscape { .. } => false,
            TailRule::GeometricConverge { a: lim, .. } => a.contains(lim),
        }))
    }

    fn check_compact_target(&self, k: &RationalSet) -> Result<()> {
        self.space.check_set(k)?;
        if k.is_empty() {
            return Err(Error::Precondition("compact target must be nonempty".into()));
        }
        Ok(())
    }

    /// Whether `d(X_n; k) -> 0`.
    pub fn semidistance_convergence_check(&self, k: &RationalSet) -> Result<Verdict> {
        self.check_compact_target(k)?;
        Ok(match &self.tail {
            TailRule::Periodic(cycle) => {
                let mut ok = true;
                for c in cycle {
                    ok &= self.space.semidistance(c, k)?.is_zero();
                }
                Verdict::from_bool(ok)
            }
            TailRule::AffineEscape { .. } => Verdict::FAILS,
            // d(x_n, k) -> d(a, k) by continuity.
            TailRule::GeometricConverge { a, .. } => {
                Verdict::from_bool(point_set_distance(&self.space, a, k).is_zero())
            }
        })
    }

    pub fn converges_from_below(&self, a: &RationalSet) -> Result<Verdict> {
        self.space.check_set(a)?;
        Ok(Verdict::from_bool(match &self.tail {
            TailRule::Periodic(cycle) => a.iter().all(|y| cycle.iter().all(|c| c.contains(y))),
            TailRule::AffineEscape { .. } => a.is_empty(),
            TailRule::GeometricConverge { a: lim, .. } => a.iter().all(|y| y == lim),
        }))
    }

    /// `(converges_from_below(k), d(k; X_n) -> 0)`.
    pub fn below_iff_semidistance(&self, k: &RationalSet) -> Result<(Verdict, Verdict)> {
        self.check_compact_target(k)?;
        let below = self.converges_from_below(k)?;
        let dist = match &self.tail {
            TailRule::Periodic(cycle) => {
                let mut ok = true;
                for c in cycle {
                    ok &= self.space.semidistance(k, c)?.is_zero();
                }
                ok
            }
            TailRule::AffineEscape { .. } => false,
            // d(k; x_n) -> max over k of d(y, a).
            TailRule::GeometricConverge { a, .. } => k.iter().all(|y| y == a),
        };
        Ok((below, Verdict::from_bool(dist)))
    }

    pub fn is_eventually_lagrange_stable(&self) -> Verdict {
        Verdict::from_bool(match &self.tail {
            TailRule::Periodic(_) => true,
            TailRule::AffineEscape { .. } => false,
            TailRule::GeometricConverge { .. } => self.geometric_limit().is_some(),
        })
    }

    /// Selection route: every selection along a subsequence has a convergent subsequence.
    pub fn is_asymptotically_seq_compact(&self) -> Verdict {
        Verdict::from_bool(match &self.tail {
            // Selections take finitely many values, so one value repeats.
            TailRule::Periodic(_) => true,
            TailRule::AffineEscape { .. } => false,
            TailRule::GeometricConverge { .. } => self.geometric_limit().is_some(),
        })
    }

    /// Tail-union route: sequences drawn from `∪_{t >= s} X_t` cluster inside the space.
    pub fn is_weakly_asymptotically_seq_compact(&self) -> Verdict {
        Verdict::from_bool(match &self.tail {
            TailRule::Periodic(_) => true,
            TailRule::AffineEscape { .. } => false,
            TailRule::GeometricConverge { a, .. } => self.space.contains(a),
        })
    }

    pub fn is_limit_set_compact(&self) -> Verdict {
        let l = self.limit_set();
        Verdict::from_bool(!l.is_empty() && self.converges_from_above(&l).expect("limit set lies in the space").holds())
    }

    pub fn is_singleton_valued(&self) -> bool {
        self.preperiod.iter().all(|s| s.len() == 1)
            && match &self.tail {
                TailRule::Periodic(cycle) => cycle.iter().all(|s| s.len() == 1),
                _ => true,
            }
    }

    fn require_point_net(&self) -> Result<()> {
        if self.is_singleton_valued() {
            Ok(())
        } else {
            Err(Error::Precondition("net is not singleton-valued".into()))
        }
    }

    pub fn cluster_set(&self) -> Result<RationalSet> {
        self.require_point_net()?;
        Ok(match &self.tail {
            TailRule::Periodic(cycle) => cycle.iter().flatten().cloned().collect(),
            TailRule::AffineEscape { .. } => RationalSet::new(),
            TailRule::GeometricConverge { .. } => self.geometric_limit().into_iter().cloned().collect(),
        })
    }

    fn constant_geometric(&self) -> bool {
        matches!(&self.tail, TailRule::GeometricConverge { a, b, .. } if a == b)
    }

    pub fn eventually_in(&self, u: &RationalSet) -> Result<Verdict> {
        self.require_point_net()?;
        self.space.check_set(u)?;
        Ok(Verdict::from_bool(match &self.tail {
            TailRule::Periodic(cycle) => cycle.iter().flatten().all(|p| u.contains(p)),
            // Injective point sequences visit a finite set only finitely often.
            TailRule::AffineEscape { .. } => false,
            TailRule::GeometricConverge { a, .. } => self.constant_geometric() && u.contains(a),
        }))
    }

    pub fn frequently_in(&self, u: &RationalSet) -> Result<Verdict> {
        self.require_point_net()?;
        self.space.check_set(u)?;
        Ok(Verdict::from_bool(match &self.tail {
            TailRule::Periodic(cycle) => cycle.iter().flatten().any(|p| u.contains(p)),
            TailRule::AffineEscape { .. } => false,
            TailRule::GeometricConverge { a, .. } => self.constant_geometric() && u.contains(a),
        }))
    }

    pub fn analyze(&self) -> NetAnalysis {
        let l = self.limit_set();
        NetAnalysis {
            converges_above_to_limit: self.converges_from_above(&l).expect("limit set lies in the space"),
            limit_set_compact: self.is_limit_set_compact(),
            asympt_seq_compact: self.is_asymptotically_seq_compact(),
            weakly_asympt_seq_compact: self.is_weakly_asymptotically_seq_compact(),
            lagrange_stable: self.is_eventually_lagrange_stable(),
            limit_set: SetDescription::Points(l),
        }
    }
}

fn check_dim(space: &RationalPointSpace, p: &Point) -> Result<()> {
    if p.dim() == space.dim() {
        Ok(())
    } else {
        Err(Error::Malformed(format!("point {p} has dimension {}, space has {}", p.dim(), space.dim())))
    }
}

fn affine_term(c: &Point, v: &Point, n: u64) -> Point {
    c.add(&v.scale(&Rational::from_integer(n.into())))
}

fn geometric_term(a: &Point, b: &Point, r: &Rational, n: u64) -> Point {
    a.add(&b.sub(a).scale(&num_traits::pow(r.clone(), n as usize)))
}

/// Solves `w = lambda * dir` for a scalar `lambda`, if one exists.
fn scalar_multiple(w: &Point, dir: &Point) -> Option<Rational> {
    let i = dir.coords().iter().position(|x| !x.is_zero())?;
    let lambda = &w.coords()[i] / &dir.coords()[i];
    (w == &dir.scale(&lambda)).then_some(lambda)
}

/// The tail index `n >= start` with `c + n v = e`, if any.
fn affine_hit(c: &Point, v: &Point, e: &Point, start: u64) -> Option<u64> {
    let lambda = scalar_multiple(&e.sub(c), v)?;
    if !lambda.is_integer() || lambda.is_negative() {
        return None;
    }
    let n: u64 = lambda.to_integer().try_into().ok()?;
    (n >= start).then_some(n)
}

/// The tail index `n >= start` with `a + r^n (b - a) = e`, if any.
fn geometric_hit(a: &Point, b: &Point, r: &Rational, e: &Point, start: u64) -> Option<u64> {
    if a == b {
        return (e == a).then_some(start);
    }
    let lambda = scalar_multiple(&e.sub(a), &b.sub(a))?;
    if lambda.is_zero() {
        return None;
    }
    let mut n = start;
    let mut p = num_traits::pow(r.clone(), start as usize);
    // |r^n| strictly decreases, so stop once it drops below |lambda|.
    while p.abs() >= lambda.abs() {
        if p == lambda {
            return Some(n);
        }
        p *= r;
        n += 1;
    }
    None
}

/// A net over either backend.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubsetNet {
    Finite(FiniteNet),
    Rational(RationalNet),
}

impl SubsetNet {
    pub fn limit_set(&self) -> SetDescription {
        match self {
            SubsetNet::Finite(n) => SetDescription::Indices(n.limit_set()),
            SubsetNet::Rational(n) => SetDescription::Points(n.limit_set()),
        }
    }

    pub fn limit_set_horizon_oracle(&self, h: u64, h2: u64) -> Result<SetDescription> {
        Ok(match self {
            SubsetNet::Finite(n) => SetDescription::Indices(n.limit_set_horizon_oracle(h, h2)?),
            SubsetNet::Rational(n) => SetDescription::Points(n.limit_set_horizon_oracle(h, h2)?),
        })
    }

    pub fn sequential_limit_set(&self) -> SetDescription {
        match self {
            SubsetNet::Finite(n) => SetDescription::Indices(n.sequential_limit_set()),
            SubsetNet::Rational(n) => SetDescription::Points(n.sequential_limit_set()),
        }
    }

    pub fn analyze(&self) -> NetAnalysis {
        match self {
            SubsetNet::Finite(n) => n.analyze(),
            SubsetNet::Rational(n) => n.analyze(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: NetRepr = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        repr.build()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(NetRepr::from(self)).expect("net serializes")
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum SetRepr {
    Indices(Vec<usize>),
    Points(Vec<PointJson>),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum TailRepr {
    Periodic { cycle: Vec<SetRepr> },
    Affine { c: PointJson, v: PointJson },
    Geometric { a: PointJson, b: PointJson, r: RationalJson },
}

#[derive(Serialize, Deserialize)]
struct NetRepr {
    ground: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    index: Option<DirectedOrder>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    preperiod: Option<Vec<SetRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tail: Option<TailRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sets: Option<Vec<SetRepr>>,
}

pub(crate) fn from_value<T: serde::de::DeserializeOwned>(v: serde_json::Value, what: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Malformed(format!("{what}: {e}")))
}

impl SetRepr {
    fn finite(&self, n: usize) -> Result<PointSet> {
        match self {
            SetRepr::Indices(ix) => BitSet::from_indices(n, ix.iter().copied())
                .map_err(|i| Error::Malformed(format!("point index {i} out of range for {n} points"))),
            SetRepr::Points(_) => Err(Error::Malformed("finite ground expects point indices".into())),
        }
    }

    fn rational(&self) -> Result<RationalSet> {
        match self {
            SetRepr::Indices(ix) if ix.is_empty() => Ok(RationalSet::new()),
            SetRepr::Indices(_) => Err(Error::Malformed("rational ground expects coordinate lists".into())),
            SetRepr::Points(ps) => ps.iter().map(|p| point_from_json(p)).collect(),
        }
    }
}

impl NetRepr {
    fn build(self) -> Result<SubsetNet> {
        if self.ground.get("dim").is_some() {
            self.build_rational()
        } else {
            let ground = FiniteGround::from_json_value(self.ground.clone())?;
            self.build_finite(ground)
        }
    }

    fn build_finite(self, ground: FiniteGround) -> Result<SubsetNet> {
        let n = ground.len();
        let order = self.index.unwrap_or(DirectedOrder::Naturals);
        if let DirectedOrder::Naturals = order {
            if self.sets.is_some() {
                return Err(Error::Malformed("Z+-indexed nets use preperiod/tail, not sets".into()));
            }
            let preperiod = self.preperiod.unwrap_or_default().iter().map(|s| s.finite(n)).collect::<Result<_>>()?;
            let cycle = match self.tail {
                Some(TailRepr::Periodic { cycle }) => cycle.iter().map(|s| s.finite(n)).collect::<Result<_>>()?,
                Some(_) => return Err(Error::Unsupported("affine and geometric tails need a rational ground".into())),
                None => return Err(Error::Malformed("Z+-indexed net needs a tail".into())),
            };
            return Ok(SubsetNet::Finite(FiniteNet::sequence(ground, preperiod, cycle)?));
        }
        let rel = order
            .materialize()
            .ok_or_else(|| Error::Unsupported("finite nets need a finite or Z+ index".into()))?;
        let sets = self
            .sets
            .ok_or_else(|| Error::Malformed("finite-index net needs sets".into()))?
            .iter()
            .map(|s| s.finite(n))
            .collect::<Result<_>>()?;
        Ok(SubsetNet::Finite(FiniteNet::directed(ground, FiniteOrder::new(rel)?, sets)?))
    }

    fn build_rational(self) -> Result<SubsetNet> {
        let space: RationalPointSpace = from_value(self.ground, "ground")?;
        if !matches!(self.index, None | Some(DirectedOrder::Naturals)) {
            return Err(Error::Unsupported("rational nets are indexed by Z+".into()));
        }
        let preperiod = self.preperiod.unwrap_or_default().iter().map(SetRepr::rational).collect::<Result<_>>()?;
        let tail = match self.tail.ok_or_else(|| Error::Malformed("net needs a tail".into()))? {
            TailRepr::Periodic { cycle } => TailRule::Periodic(cycle.iter().map(SetRepr::rational).collect::<Result<_>>()?),
            TailRepr::Affine { c, v } => TailRule::AffineEscape {
                c: point_from_json(&c)?,
                v: point_from_json(&v)?,
            },
            TailRepr::Geometric { a, b, r } => TailRule::GeometricConverge {
                a: point_from_json(&a)?,
                b: point_from_json(&b)?,
                r: r.parse()?,
            },
        };
        Ok(SubsetNet::Rational(RationalNet::new(space, preperiod, tail)?))
    }
}

fn finite_set_repr(s: &PointSet) -> SetRepr {
    SetRepr::Indices(s.to_vec())
}

fn rational_set_repr(s: &RationalSet) -> SetRepr {
    SetRepr::Points(s.iter().map(point_to_json).collect())
}

impl From<&SubsetNet> for NetRepr {
    fn from(net: &SubsetNet) -> Self {
        match net {
            SubsetNet::Finite(f) => {
                let ground = f.ground.to_json_value();
                match &f.indexing {
                    FiniteIndexing::Sequence { preperiod, cycle } => NetRepr {
                        ground,
                        index: Some(DirectedOrder::Naturals),
                        preperiod: Some(preperiod.iter().map(finite_set_repr).collect()),
                        tail: Some(TailRepr::Periodic {
                            cycle: cycle.iter().map(finite_set_repr).collect(),
                        }),
                        sets: None,
                    },
                    FiniteIndexing::Directed { order, sets } => NetRepr {
                        ground,
                        index: Some(DirectedOrder::Finite(order.clone())),
                        preperiod: None,
                        tail: None,
                        sets: Some(sets.iter().map(finite_set_repr).collect()),
                    },
                }
            }
            SubsetNet::Rational(r) => NetRepr {
                ground: serde_json::to_value(&r.space).expect("space serializes"),
                index: Some(DirectedOrder::Naturals),
                preperiod: Some(r.preperiod.iter().map(rational_set_repr).collect()),
                tail: Some(match &r.tail {
                    TailRule::Periodic(cycle) => TailRepr::Periodic {
                        cycle: cycle.iter().map(rational_set_repr).collect(),
                    },
                    TailRule::AffineEscape { c, v } => TailRepr::Affine {
                        c: point_to_json(c),
                        v: point_to_json(v),
                    },
                    TailRule::GeometricConverge { a, b, r } => TailRepr::Geometric {
                        a: point_to_json(a),
                        b: point_to_json(b),
                        r: RationalJson::from(r),
                    },
                }),
                sets: None,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pseudometric_core::{int, kuratowski_limits, rat};

    fn pts(vals: &[Rational]) -> RationalSet {
        vals.iter().map(|v| Point::new(vec![v.clone()])).collect()
    }

    fn p1(v: Rational) -> Point {
        Point::new(vec![v])
    }

    fn discrete_alternating() -> FiniteNet {
        let g = FiniteGround::topological(FiniteSpace::discrete(2));
        let s = |i| BitSet::singleton(2, i);
        FiniteNet::sequence(g, vec![], vec![s(0), s(1)]).unwrap()
    }

    fn line() -> RationalPointSpace {
        RationalPointSpace::full(1)
    }

    fn alternating_signs() -> RationalNet {
        RationalNet::new(line(), vec![], TailRule::Periodic(vec![pts(&[int(1)]), pts(&[int(-1)])])).unwrap()
    }

    #[test]
    fn finite_limit_set_examples() {
        let net = discrete_alternating();
        assert_eq!(net.limit_set().to_vec(), vec![0, 1]);
        assert_eq!(net.limit_set_horizon_oracle(3, 10).unwrap().to_vec(), vec![0, 1]);
        assert!(net.limit_set_horizon_oracle(10, 3).is_err());

        let s = FiniteSpace::sierpinski();
        let c = FiniteNet::constant(FiniteGround::topological(s.clone()), s.set([1]).unwrap()).unwrap();
        assert_eq!(c.limit_set().to_vec(), vec![0, 1]);
    }

    #[test]
    fn directed_net_uses_top_tail() {
        // Chain 0 <= 1 <= 2 with X_2 = {0}.
        let g = FiniteGround::topological(FiniteSpace::discrete(3));
        let sets = vec![BitSet::singleton(3, 2), BitSet::singleton(3, 1), BitSet::singleton(3, 0)];
        let net = FiniteNet::directed(g, FiniteOrder::chain(3), sets).unwrap();
        assert_eq!(net.limit_set().to_vec(), vec![0]);
        assert_eq!(net.limit_set_horizon_oracle(0, 0).unwrap().to_vec(), vec![0]);
        assert_eq!(net.sequential_limit_set_horizon(0).unwrap().to_vec(), vec![0]);
    }

    #[test]
    fn finite_convergence_examples() {
        let net = discrete_alternating();
        let whole = net.space().whole();
        assert!(net.converges_from_above(&whole).unwrap().holds());
        assert!(net.converges_from_above(&BitSet::singleton(2, 0)).unwrap().fails());
        assert!(net.converges_from_below(&BitSet::empty(2)).unwrap().holds());
        assert!(net.converges_from_below(&BitSet::singleton(2, 0)).unwrap().fails());

        let ind = FiniteGround::topological(FiniteSpace::indiscrete(2));
        let n2 = FiniteNet::sequence(ind, vec![], vec![BitSet::singleton(2, 0), BitSet::empty(2)]).unwrap();
        assert!(n2.converges_from_above(&BitSet::singleton(2, 1)).unwrap().holds());
    }

    #[test]
    fn empty_target_from_above_needs_empty_tails() {
        let g = FiniteGround::topological(FiniteSpace::discrete(2));
        let eventually_empty = FiniteNet::sequence(g.clone(), vec![BitSet::singleton(2, 0)], vec![BitSet::empty(2)]).unwrap();
        assert!(eventually_empty.converges_from_above(&BitSet::empty(2)).unwrap().holds());
        assert!(discrete_alternating().converges_from_above(&BitSet::empty(2)).unwrap().fails());
    }

    #[test]
    fn finite_point_net_examples() {
        let net = discrete_alternating();
        assert_eq!(net.cluster_set().unwrap().to_vec(), vec![0, 1]);
        let u = BitSet::singleton(2, 0);
        assert!(net.eventually_in(&u).unwrap().fails());
        assert!(net.frequently_in(&u).unwrap().holds());

        let s = FiniteSpace::sierpinski();
        let c = FiniteNet::constant(FiniteGround::topological(s.clone()), s.set([1]).unwrap()).unwrap();
        assert_eq!(c.cluster_set().unwrap().to_vec(), vec![0, 1]);

        let fat = FiniteNet::constant(FiniteGround::topological(s.clone()), s.whole()).unwrap();
        assert!(matches!(fat.cluster_set(), Err(Error::Precondition(_))));
    }

    #[test]
    fn finite_metric_semidistance() {
        let m = FinitePseudoMetric::from_ints(&[vec![0, 1], vec![1, 0]]).unwrap();
        let net = FiniteNet::sequence(FiniteGround::metric_space(m), vec![], vec![BitSet::singleton(2, 0), BitSet::singleton(2, 1)]).unwrap();
        let k = BitSet::singleton(2, 0);
        assert!(net.semidistance_convergence_check(&k).unwrap().fails());
        assert_eq!(net.below_iff_semidistance(&k).unwrap(), (Verdict::FAILS, Verdict::FAILS));
        assert!(net.semidistance_convergence_check(&BitSet::empty(2)).is_err());
        assert!(discrete_alternating().semidistance_convergence_check(&k).is_err());
    }

    #[test]
    fn rational_limit_sets() {
        let alt = alternating_signs();
        assert_eq!(alt.limit_set(), pts(&[int(-1), int(1)]));
        let escape = RationalNet::new(line(), vec![], TailRule::AffineEscape { c: p1(int(0)), v: p1(int(1)) }).unwrap();
        assert!(escape.limit_set().is_empty());
        assert!(escape.sequential_limit_set().is_empty());
        let geo = RationalNet::new(
            line(),
            vec![],
            TailRule::GeometricConverge { a: p1(int(0)), b: p1(int(1)), r: rat(1, 2) },
        )
        .unwrap();
        assert_eq!(geo.sequential_limit_set(), pts(&[int(0)]));
        assert_eq!(geo.sequential_limit_set_horizon(64).unwrap(), pts(&[int(0)]));
        assert_eq!(geo.limit_set_horizon_oracle(16, 64).unwrap(), pts(&[int(0)]));
        assert_eq!(alt.limit_set_horizon_oracle(3, 10).unwrap(), alt.limit_set());
    }

    #[test]
    fn excluded_limit_point() {
        let punctured = RationalPointSpace::new(1, vec![p1(int(0))]).unwrap();
        let geo = RationalNet::new(
            punctured,
            vec![],
            TailRule::GeometricConverge { a: p1(int(0)), b: p1(int(1)), r: rat(1, 2) },
        )
        .unwrap();
        assert!(geo.limit_set().is_empty());
        assert!(geo.is_eventually_lagrange_stable().fails());
        assert!(geo.is_asymptotically_seq_compact().fails());
        assert!(geo.is_weakly_asymptotically_seq_compact().fails());
        assert!(geo.is_limit_set_compact().fails());
        let k = kuratowski_limits(&SubsetNet::Rational(geo.clone())).unwrap();
        assert!(k.limsup.is_empty() && k.liminf.is_empty());
        let o = kuratowski_horizon_oracle(&geo, 64).unwrap();
        assert!(o.limsup.is_empty() && o.liminf.is_empty());
    }

    #[test]
    fn tail_points_must_avoid_excluded_set() {
        let space = RationalPointSpace::new(1, vec![p1(rat(1, 8))]).unwrap();
        let hits = RationalNet::new(
            space.clone(),
            vec![],
            TailRule::GeometricConverge { a: p1(int(0)), b: p1(int(1)), r: rat(1, 2) },
        );
        assert!(matches!(hits, Err(Error::NotMember(_))));
        // The collision sits in the preperiod window, before the tail starts.
        let skip = RationalNet::new(
            space,
            vec![pts(&[int(5)]); 4],
            TailRule::GeometricConverge { a: p1(int(0)), b: p1(int(1)), r: rat(1, 2) },
        );
        assert!(skip.is_ok());

        let far = RationalPointSpace::new(1, vec![p1(int(1000))]).unwrap();
        let affine = RationalNet::new(far, vec![], TailRule::AffineEscape { c: p1(int(0)), v: p1(int(1)) });
        assert!(matches!(affine, Err(Error::NotMember(_))));
        assert!(RationalNet::new(line(), vec![], TailRule::AffineEscape { c: p1(int(0)), v: p1(int(0)) }).is_err());
        assert!(RationalNet::new(
            line(),
            vec![],
            TailRule::GeometricConverge { a: p1(int(0)), b: p1(int(1)), r: int(1) }
        )
        .is_err());
    }

    #[test]
    fn rational_convergence_examples() {
        let geo = RationalNet::new(
            line(),
            vec![],
            TailRule::GeometricConverge { a: p1(int(3)), b: p1(int(5)), r: rat(1, 2) },
        )
        .unwrap();
        let a = pts(&[int(3)]);
        assert!(geo.semidistance_convergence_check(&a).unwrap().holds());
        assert!(geo.converges_from_below(&a).unwrap().holds());
        assert!(geo.converges_from_above(&a).unwrap().holds());

        let escape = RationalNet::new(line(), vec![], TailRule::AffineEscape { c: p1(int(0)), v: p1(int(1)) }).unwrap();
        assert!(escape.semidistance_convergence_check(&a).unwrap().fails());
        assert!(escape.is_eventually_lagrange_stable().fails());
        assert!(escape.is_limit_set_compact().fails());
        let bounded = pts(&[int(0), int(1), int(2)]);
        assert!(escape.eventually_in(&bounded).unwrap().fails());
        assert!(escape.frequently_in(&bounded).unwrap().fails());

        let alt = alternating_signs();
        let k = pts(&[int(-1), int(1)]);
        assert_eq!(alt.below_iff_semidistance(&k).unwrap(), (Verdict::FAILS, Verdict::FAILS));
        let constant = RationalNet::new(line(), vec![], TailRule::Periodic(vec![k.clone()])).unwrap();
        assert_eq!(constant.below_iff_semidistance(&k).unwrap(), (Verdict::HOLDS, Verdict::HOLDS));
        assert!(alt.semidistance_convergence_check(&RationalSet::new()).is_err());
    }

    #[test]
    fn kuratowski_examples() {
        let alt = SubsetNet::Rational(alternating_signs());
        let k = kuratowski_limits(&alt).unwrap();
        assert_eq!(k.limsup.as_points().unwrap(), &pts(&[int(-1), int(1)]));
        assert!(k.liminf.is_empty());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"ground":{"dim":1,"excluded":[]},"index":{"kind":"znn"},"preperiod":[],
            "tail":{"kind":"affine","c":[{"num":"0","den":"1"}],"v":[{"num":"1","den":"1"}]}}"#;
        let net = SubsetNet::from_json(text).unwrap();
        let again = SubsetNet::from_json(&net.to_json().to_string()).unwrap();
        assert_eq!(net, again);
        let a = net.analyze();
        assert!(a.limit_set.is_empty());
        assert!(a.limit_set_compact.fails());

        let fin = r#"{"ground":{"n":2,"spec":[[true,false],[false,true]]},"index":{"kind":"finite","rel":[[true,true],[false,true]]},"sets":[[0],[1]]}"#;
        let net = SubsetNet::from_json(fin).unwrap();
        assert_eq!(net.limit_set(), SetDescription::Indices(BitSet::singleton(2, 1)));
        assert_eq!(SubsetNet::from_json(&net.to_json().to_string()).unwrap(), net);
    }

    #[test]
    fn verdict_json() {
        assert_eq!(serde_json::to_string(&Verdict::HOLDS).unwrap(), r#"{"state":"holds"}"#);
        assert_eq!(serde_json::to_string(&Verdict::unknown(64)).unwrap(), r#"{"state":"unknown","horizon":64}"#);
    }
}
