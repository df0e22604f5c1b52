//! Exact rational pseudo-metric geometry.
//!
//! Two ground spaces live here: [`RationalPointSpace`], the rational points
//! of `Q^d` under the max-norm minus a finite excluded set, and
//! [`FinitePseudoMetric`], an explicit distance matrix on `n` points. All
//! distances are exact `BigRational`s; the empty-set conventions use
//! [`ExtendedRational::Infinite`].

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{invalid, Error, Result};
use crate::finite_topology::{FiniteSpace, PointSet};
use crate::subset_nets::{RationalNet, SetDescription, SubsetNet, TailRule};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A rational number or `+∞`; `∞` absorbs addition and `max`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedRational {
    Finite(Rational),
    Infinite,
}

impl ExtendedRational {
    pub fn zero() -> Self {
        ExtendedRational::Finite(Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtendedRational::Finite(q) if q.is_zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedRational::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtendedRational::Finite(q) => Some(q),
            ExtendedRational::Infinite => None,
        }
    }

    pub fn add(&self, other: &ExtendedRational) -> ExtendedRational {
        match (self, other) {
            (ExtendedRational::Finite(a), ExtendedRational::Finite(b)) => ExtendedRational::Finite(a + b),
            _ => ExtendedRational::Infinite,
        }
    }

    pub fn max(self, other: ExtendedRational) -> ExtendedRational {
        std::cmp::max(self, other)
    }

    pub fn min(self, other: ExtendedRational) -> ExtendedRational {
        std::cmp::min(self, other)
    }
}

impl From<Rational> for ExtendedRational {
    fn from(q: Rational) -> Self {
        ExtendedRational::Finite(q)
    }
}

impl fmt::Display for ExtendedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedRational::Finite(q) => write!(f, "{q}"),
            ExtendedRational::Infinite => write!(f, "inf"),
        }
    }
}

/// A point of `Q^d`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point(pub Vec<Rational>);

impl Point {
    pub fn new(coords: Vec<Rational>) -> Self {
        Point(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        Point(coords.iter().map(|&c| int(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn sub(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: &Rational) -> Point {
        Point(self.0.iter().map(|a| a * s).collect())
    }

    /// Max-norm distance in `Q^d`.
    pub fn max_dist(&self, other: &Point) -> Rational {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

pub type RationalSet = BTreeSet<Point>;

/// A space with an exact rational pseudo-metric.
pub trait PseudoMetric {
    type Point: ?Sized;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> Rational;
}

/// `inf` over `a` of `d(x, ·)`, with `d(x, ∅) = ∞`.
pub fn point_set_distance<'a, M, I>(m: &M, x: &M::Point, a: I) -> ExtendedRational
where
    M: PseudoMetric,
    M::Point: 'a,
    I: IntoIterator<Item = &'a M::Point>,
{
    a.into_iter()
        .map(|y| m.distance(x, y))
        .min()
        .map_or(ExtendedRational::Infinite, ExtendedRational::Finite)
}

/// `sup` over `a` of `d(·, b)`, with `d(∅; b) = 0`, `d(a; ∅) = ∞` and `d(∅; ∅)` undefined.
pub fn semidistance<'a, M, IA, IB>(m: &M, a: IA, b: IB) -> Result<ExtendedRational>
where
    M: PseudoMetric,
    M::Point: 'a,
    IA: IntoIterator<Item = &'a M::Point>,
    IB: IntoIterator<Item = &'a M::Point> + Clone,
{
    let mut a = a.into_iter().peekable();
    let b_empty = b.clone().into_iter().next().is_none();
    match (a.peek().is_none(), b_empty) {
        (true, true) => Err(Error::Undefined("d(∅; ∅) is not defined".into())),
        (true, false) => Ok(ExtendedRational::zero()),
        (false, true) => Ok(ExtendedRational::Infinite),
        (false, false) => Ok(a
            .map(|x| point_set_distance(m, x, b.clone()))
            .max()
            .expect("nonempty")),
    }
}

/// `Q^dim` under the max-norm, minus finitely many excluded points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RationalSpaceRepr", into = "RationalSpaceRepr")]
pub struct RationalPointSpace {
    dim: usize,
    excluded: RationalSet,
}

impl RationalPointSpace {
    pub fn new(dim: usize, excluded: Vec<Point>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("rational point space", "dimension must be positive"));
        }
        let mut set = RationalSet::new();
        for p in excluded {
            if p.dim() != dim {
                return Err(Error::Malformed(format!("excluded point {p} has dimension {}", p.dim())));
            }
            if !set.insert(p.clone()) {
                return Err(invalid("rational point space", format!("excluded point {p} listed twice")));
            }
        }
        Ok(RationalPointSpace { dim, excluded: set })
    }

    pub fn full(dim: usize) -> Self {
        Self::new(dim, Vec::new()).expect("positive dimension")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn excluded(&self) -> &RationalSet {
        &self.excluded
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim && !self.excluded.contains(p)
    }

    pub fn check_member(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::Malformed(format!(
                "point {p} has dimension {} in a {}-dimensional space",
                p.dim(),
                self.dim
            )));
        }
        if self.excluded.contains(p) {
            return Err(Error::NotMember(p.to_string()));
        }
        Ok(())
    }

    pub fn check_set(&self, a: &RationalSet) -> Result<()> {
        a.iter().try_for_each(|p| self.check_member(p))
    }

    pub fn point_set_distance(&self, x: &Point, a: &RationalSet) -> Result<ExtendedRational> {
        self.check_member(x)?;
        self.check_set(a)?;
        Ok(point_set_distance(self, x, a))
    }

    pub fn semidistance(&self, a: &RationalSet, b: &RationalSet) -> Result<ExtendedRational> {
        self.check_set(a)?;
        self.check_set(b)?;
        semidistance(self, a, b)
    }

    /// The open ball `B(a; r) = {y : d(y, a) < r}`.
    pub fn ball_of_set(&self, a: &RationalSet, r: &Rational) -> Result<Ball<'_>> {
        if !r.is_positive() {
            return Err(Error::Precondition(format!("ball radius must be positive, got {r}")));
        }
        self.check_set(a)?;
        Ok(Ball {
            space: self,
            centers: a.clone(),
            radius: r.clone(),
        })
    }
}

impl PseudoMetric for RationalPointSpace {
    type Point = Point;

    fn distance(&self, x: &Point, y: &Point) -> Rational {
        x.max_dist(y)
    }
}

/// Membership predicate of an open ball around a finite set.
#[derive(Clone, Debug)]
pub struct Ball<'s> {
    space: &'s RationalPointSpace,
    centers: RationalSet,
    radius: Rational,
}

impl Ball<'_> {
    pub fn contains(&self, y: &Point) -> bool {
        self.space.contains(y)
            && match point_set_distance(self.space, y, &self.centers) {
                ExtendedRational::Finite(d) => d < self.radius,
                ExtendedRational::Infinite => false,
            }
    }

    pub fn contains_all<'a, I: IntoIterator<Item = &'a Point>>(&self, ys: I) -> bool {
        ys.into_iter().all(|y| self.contains(y))
    }
}

/// An explicit pseudo-metric on `{0, .., n-1}`; zero off-diagonal distances are allowed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MetricRepr", into = "MetricRepr")]
pub struct FinitePseudoMetric {
    dist: Vec<Vec<Rational>>,
}

impl FinitePseudoMetric {
    /// Max-norm distances between the given points; always a pseudo-metric, so nothing is rechecked.
    pub fn from_points(points: &[Point]) -> Self {
        FinitePseudoMetric {
            dist: points.iter().map(|a| points.iter().map(|b| a.max_dist(b)).collect()).collect(),
        }
    }

    #[allow(clippy::needless_range_loop)]
    pub fn new(dist: Vec<Vec<Rational>>) -> Result<Self> {
        let n = dist.len();
        if dist.iter().any(|r| r.len() != n) {
            return Err(Error::Malformed("distance matrix is not square".into()));
        }
        for i in 0..n {
            if !dist[i][i].is_zero() {
                return Err(invalid("pseudo-metric", format!("dist[{i}][{i}] must be 0")));
            }
            for j in 0..n {
                if dist[i][j].is_negative() {
                    return Err(invalid("pseudo-metric", format!("dist[{i}][{j}] is negative")));
                }
                if dist[i][j] != dist[j][i] {
                    return Err(invalid("pseudo-metric", format!("dist[{i}][{j}] != dist[{j}][{i}]")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if dist[i][k] > &dist[i][j] + &dist[j][k] {
                        return Err(invalid(
                            "pseudo-metric",
                            format!("triangle inequality fails for ({i}, {j}, {k})"),
                        ));
                    }
                }
            }
        }
        Ok(FinitePseudoMetric { dist })
    }

    pub fn from_ints(dist: &[Vec<i64>]) -> Result<Self> {
        Self::new(dist.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn dist(&self, i: usize, j: usize) -> &Rational {
        &self.dist[i][j]
    }

    pub fn matrix(&self) -> &[Vec<Rational>] {
        &self.dist
    }

    /// The induced topology: `x ∈ cls({y})` iff `d(x, y) = 0`.
    pub fn topology(&self) -> FiniteSpace {
        let n = self.len();
        FiniteSpace::new(
            (0..n)
                .map(|x| (0..n).map(|y| self.dist[x][y].is_zero()).collect())
                .collect(),
        )
        .expect("zero-distance relation of a pseudo-metric is an equivalence")
    }

    fn check_set(&self, e: &PointSet) -> Result<()> {
        if e.universe() == self.len() {
            Ok(())
        } else {
            Err(Error::Malformed(format!(
                "set over {} points used with a {}-point metric",
                e.universe(),
                self.len()
            )))
        }
    }

    pub fn point_set_distance(&self, x: usize, a: &PointSet) -> ExtendedRational {
        a.iter()
            .map(|y| &self.dist[x][y])
            .min()
            .map_or(ExtendedRational::Infinite, |d| ExtendedRational::Finite(d.clone()))
    }

    pub fn semidistance(&self, a: &PointSet, b: &PointSet) -> Result<ExtendedRational> {
        self.check_set(a)?;
        self.check_set(b)?;
        match (a.is_empty(), b.is_empty()) {
            (true, true) => Err(Error::Undefined("d(∅; ∅) is not defined".into())),
            (true, false) => Ok(ExtendedRational::zero()),
            (false, true) => Ok(ExtendedRational::Infinite),
            (false, false) => Ok(a
                .iter()
                .map(|x| self.point_set_distance(x, b))
                .max()
                .expect("nonempty")),
        }
    }

    /// `B(a; r)` as an explicit point set.
    pub fn ball(&self, a: &PointSet, r: &Rational) -> PointSet {
        let mut out = BitSet::empty(self.len());
        for y in 0..self.len() {
            if a.iter().any(|x| &self.dist[x][y] < r) {
                out.insert(y);
            }
        }
        out
    }

    /// Radius `δ > 0` with `B(k; δ) ⊆ u`: the least distance from `k` to the complement of `u`.
    ///
    /// Returns 1 when `u` is the whole space.
    pub fn compact_inner_radius(&self, k: &PointSet, u: &PointSet) -> Result<Rational> {
        self.check_set(k)?;
        self.check_set(u)?;
        if k.is_empty() {
            return Err(Error::Precondition("compact set must be nonempty".into()));
        }
        if !k.is_subset(u) {
            return Err(Error::Precondition("compact set is not contained in the neighborhood".into()));
        }
        // Zero distances make the topology coarser than discrete: u must be a union of zero-classes.
        if let Some((x, y)) = u
            .iter()
            .flat_map(|x| (0..self.len()).map(move |y| (x, y)))
            .find(|&(x, y)| self.dist[x][y].is_zero() && !u.contains(y))
        {
            return Err(Error::Precondition(format!(
                "neighborhood is not open: point {y} is at distance 0 from member {x}"
            )));
        }
        let outside = u.complement();
        let delta = match k.iter().map(|x| self.point_set_distance(x, &outside)).min() {
            Some(ExtendedRational::Finite(d)) => d,
            _ => Rational::one(),
        };
        debug_assert!(self.ball(k, &delta).is_subset(u));
        Ok(delta)
    }
}

impl PseudoMetric for FinitePseudoMetric {
    type Point = usize;

    fn distance(&self, x: &usize, y: &usize) -> Rational {
        self.dist[*x][*y].clone()
    }
}

/// Kuratowski upper and lower limits of a sequence of sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KuratowskiLimits {
    pub limsup: SetDescription,
    pub liminf: SetDescription,
}

/// Exact `Limsup` / `Liminf` of a Z+-indexed net over a pseudo-metric ground.
///
/// Membership is decided from the eventual behaviour of `d(y, X_n)`: limsup
/// needs `liminf d(y, X_n) = 0`, liminf needs `d(y, X_n) -> 0`.
pub fn kuratowski_limits(net: &SubsetNet) -> Result<KuratowskiLimits> {
    match net {
        SubsetNet::Rational(net) => rational_kuratowski(net),
        SubsetNet::Finite(net) => {
            let metric = net.ground().metric().ok_or_else(|| {
                Error::Unsupported("Kuratowski limits need a pseudo-metric ground".into())
            })?;
            let cycle = net.cycle().ok_or_else(|| {
                Error::Unsupported("Kuratowski limits are defined for Z+-indexed nets".into())
            })?;
            let n = metric.len();
            let mut limsup = BitSet::empty(n);
            let mut liminf = BitSet::empty(n);
            for y in 0..n {
                let zeros: Vec<bool> = cycle.iter().map(|c| metric.point_set_distance(y, c).is_zero()).collect();
                if zeros.iter().any(|&z| z) {
                    limsup.insert(y);
                }
                if zeros.iter().all(|&z| z) {
                    liminf.insert(y);
                }
            }
            Ok(KuratowskiLimits {
                limsup: SetDescription::Indices(limsup),
                liminf: SetDescription::Indices(liminf),
            })
        }
    }
}

fn rational_kuratowski(net: &RationalNet) -> Result<KuratowskiLimits> {
    let space = net.space();
    let grid: Vec<Point> = net.candidate_grid().into_iter().filter(|p| space.contains(p)).collect();
    let mut limsup = RationalSet::new();
    let mut liminf = RationalSet::new();
    for y in grid {
        // Eventual values of d(y, X_n), or their limit.
        let (lower, upper) = match net.tail() {
            TailRule::Periodic(cycle) => {
                let vals: Vec<ExtendedRational> = cycle.iter().map(|c| point_set_distance(space, &y, c)).collect();
                (
                    vals.iter().min().cloned().expect("nonempty cycle"),
                    vals.iter().max().cloned().expect("nonempty cycle"),
                )
            }
            TailRule::AffineEscape { .. } => (ExtendedRational::Infinite, ExtendedRational::Infinite),
            TailRule::GeometricConverge { a, .. } => {
                let lim = ExtendedRational::Finite(y.max_dist(a));
                (lim.clone(), lim)
            }
        };
        if lower.is_zero() {
            limsup.insert(y.clone());
        }
        if upper.is_zero() {
            liminf.insert(y);
        }
    }
    Ok(KuratowskiLimits {
        limsup: SetDescription::Points(limsup),
        liminf: SetDescription::Points(liminf),
    })
}

/// Brute-force Kuratowski limits from `d(y, X_n)`, `n <= horizon`, over the candidate grid.
///
/// A candidate passes when the relevant tail statistic (min for limsup, max
/// for liminf) is zero on `[h/2, h]` or at most half its value on
/// `[h/4, h/2)`. This resolves geometric rules with `|r|^(h/4) <= 1/2`.
pub fn kuratowski_horizon_oracle(net: &RationalNet, horizon: u64) -> Result<KuratowskiLimits> {
    if horizon < 8 {
        return Err(Error::Precondition("horizon oracle needs a horizon of at least 8".into()));
    }
    let space = net.space();
    let early = horizon / 4..horizon / 2;
    let late = horizon / 2..=horizon;
    let sets: Vec<RationalSet> = (0..=horizon).map(|n| net.set_at(n)).collect();
    let mut limsup = RationalSet::new();
    let mut liminf = RationalSet::new();
    for y in net.candidate_grid() {
        if !space.contains(&y) {
            continue;
        }
        let d: Vec<ExtendedRational> = sets.iter().map(|s| point_set_distance(space, &y, s)).collect();
        let window = |r: &mut dyn Iterator<Item = u64>| -> Vec<ExtendedRational> { r.map(|n| d[n as usize].clone()).collect() };
        let e = window(&mut early.clone());
        let l = window(&mut late.clone());
        let shrinks = |late_stat: Option<ExtendedRational>, early_stat: Option<ExtendedRational>| match (late_stat, early_stat) {
            (Some(ExtendedRational::Finite(lv)), _) if lv.is_zero() => true,
            (Some(ExtendedRational::Finite(lv)), Some(ExtendedRational::Finite(ev))) => {
                (&lv + &lv).cmp(&ev) != Ordering::Greater
            }
            _ => false,
        };
        if shrinks(l.iter().min().cloned(), e.iter().min().cloned()) {
            limsup.insert(y.clone());
        }
        if shrinks(l.iter().max().cloned(), e.iter().max().cloned()) {
            liminf.insert(y);
        }
    }
    Ok(KuratowskiLimits {
        limsup: SetDescription::Points(limsup),
        liminf: SetDescription::Points(liminf),
    })
}

/// Wire form of a rational: `{"num": "1", "den": "2"}`.
///
/// Integers are also accepted for `num`/`den`, as are bare integers and `"a/b"` strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalJson {
    Fraction { num: IntJson, den: IntJson },
    Integer(i64),
    Text(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntJson {
    Int(i64),
    Text(String),
}

impl IntJson {
    fn parse(&self) -> Result<BigInt> {
        match self {
            IntJson::Int(i) => Ok(BigInt::from(*i)),
            IntJson::Text(t) => t
                .trim()
                .parse()
                .map_err(|_| Error::Malformed(format!("not an integer: {t:?}"))),
        }
    }
}

impl RationalJson {
    pub fn parse(&self) -> Result<Rational> {
        match self {
            RationalJson::Fraction { num, den } => {
                let den = den.parse()?;
                if den.is_zero() {
                    return Err(Error::Malformed("rational with zero denominator".into()));
                }
                Ok(Rational::new(num.parse()?, den))
            }
            RationalJson::Integer(i) => Ok(int(*i)),
            RationalJson::Text(t) => t
                .trim()
                .parse::<Rational>()
                .map_err(|_| Error::Malformed(format!("not a rational: {t:?}"))),
        }
    }
}

impl From<&Rational> for RationalJson {
    fn from(q: &Rational) -> Self {
        RationalJson::Fraction {
            num: IntJson::Text(q.numer().to_string()),
            den: IntJson::Text(q.denom().to_string()),
        }
    }
}

pub type PointJson = Vec<RationalJson>;

pub fn point_from_json(p: &[RationalJson]) -> Result<Point> {
    p.iter().map(RationalJson::parse).collect::<Result<Vec<_>>>().map(Point)
}

pub fn point_to_json(p: &Point) -> PointJson {
    p.0.iter().map(RationalJson::from).collect()
}

#[derive(Serialize, Deserialize)]
struct RationalSpaceRepr {
    dim: usize,
    #[serde(default)]
    excluded: Vec<PointJson>,
}

impl TryFrom<RationalSpaceRepr> for RationalPointSpace {
    type Error = Error;

    fn try_from(r: RationalSpaceRepr) -> Result<Self> {
        let excluded = r.excluded.iter().map(|p| point_from_json(p)).collect::<Result<Vec<_>>>()?;
        RationalPointSpace::new(r.dim, excluded)
    }
}

impl From<RationalPointSpace> for RationalSpaceRepr {
    fn from(s: RationalPointSpace) -> Self {
        RationalSpaceRepr {
            dim: s.dim,
            excluded: s.excluded.iter().map(point_to_json).collect(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MetricRepr {
    n: usize,
    dist: Vec<Vec<RationalJson>>,
}

impl TryFrom<MetricRepr> for FinitePseudoMetric {
    type Error = Error;

    fn try_from(r: MetricRepr) -> Result<Self> {
        if r.dist.len() != r.n {
            return Err(Error::Malformed(format!("n = {} but dist has {} rows", r.n, r.dist.len())));
        }
        let dist = r
            .dist
            .iter()
            .map(|row| row.iter().map(RationalJson::parse).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        FinitePseudoMetric::new(dist)
    }
}

impl From<FinitePseudoMetric> for MetricRepr {
    fn from(m: FinitePseudoMetric) -> Self {
        MetricRepr {
            n: m.len(),
            dist: m.dist.iter().map(|r| r.iter().map(RationalJson::from).collect()).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q1(vals: &[i64]) -> RationalSet {
        vals.iter().map(|&v| Point::from_ints(&[v])).collect()
    }

    #[test]
    fn point_set_distance_examples() {
        let s = RationalPointSpace::full(1);
        let x = Point::from_ints(&[0]);
        assert!(s.point_set_distance(&x, &q1(&[0])).unwrap().is_zero());
        assert_eq!(s.point_set_distance(&x, &RationalSet::new()).unwrap(), ExtendedRational::Infinite);
        assert_eq!(s.point_set_distance(&x, &q1(&[3, 4])).unwrap(), int(3).into());
    }

    #[test]
    fn excluded_point_is_rejected() {
        let s = RationalPointSpace::new(1, vec![Point::from_ints(&[0])]).unwrap();
        assert!(matches!(
            s.point_set_distance(&Point::from_ints(&[0]), &q1(&[1])),
            Err(Error::NotMember(_))
        ));
    }

    #[test]
    fn semidistance_examples() {
        let s = RationalPointSpace::full(1);
        let a = q1(&[0, 10]);
        assert!(s.semidistance(&a, &a).unwrap().is_zero());
        assert!(s.semidistance(&RationalSet::new(), &q1(&[5])).unwrap().is_zero());
        assert_eq!(s.semidistance(&q1(&[5]), &RationalSet::new()).unwrap(), ExtendedRational::Infinite);
        assert_eq!(s.semidistance(&a, &q1(&[1, 9])).unwrap(), int(1).into());
        assert!(matches!(
            s.semidistance(&RationalSet::new(), &RationalSet::new()),
            Err(Error::Undefined(_))
        ));
    }

    #[test]
    fn ball_is_strict() {
        let s = RationalPointSpace::full(1);
        let b = s.ball_of_set(&q1(&[0]), &int(1)).unwrap();
        assert!(b.contains(&Point::from_ints(&[0])));
        assert!(!b.contains(&Point::from_ints(&[1])));
        let b2 = s.ball_of_set(&q1(&[0]), &int(2)).unwrap();
        let pts = [Point::from_ints(&[-1]), Point::from_ints(&[0]), Point::new(vec![rat(3, 2)])];
        assert!(b2.contains_all(&pts));
        assert!(s.ball_of_set(&q1(&[0]), &int(0)).is_err());
    }

    #[test]
    fn inner_radius_examples() {
        let line = FinitePseudoMetric::from_ints(&[vec![0, 1, 2], vec![1, 0, 1], vec![2, 1, 0]]).unwrap();
        let k = BitSet::from_indices(3, [0]).unwrap();
        assert_eq!(line.compact_inner_radius(&k, &BitSet::full(3)).unwrap(), int(1));
        let u = BitSet::from_indices(3, [0, 1]).unwrap();
        assert_eq!(line.compact_inner_radius(&k, &u).unwrap(), int(2));
        let not_sup = BitSet::from_indices(3, [1]).unwrap();
        assert!(matches!(line.compact_inner_radius(&k, &not_sup), Err(Error::Precondition(_))));
        assert!(line.compact_inner_radius(&BitSet::empty(3), &u).is_err());
    }

    #[test]
    fn inner_radius_rejects_non_open_sets() {
        let pm = FinitePseudoMetric::from_ints(&[vec![0, 0], vec![0, 0]]).unwrap();
        let k = BitSet::from_indices(2, [0]).unwrap();
        assert!(matches!(pm.compact_inner_radius(&k, &k), Err(Error::Precondition(_))));
    }

    #[test]
    fn metric_validation() {
        assert!(FinitePseudoMetric::from_ints(&[vec![0, 1], vec![2, 0]]).is_err());
        assert!(FinitePseudoMetric::from_ints(&[vec![0, 1, 5], vec![1, 0, 1], vec![5, 1, 0]]).is_err());
        assert!(FinitePseudoMetric::from_ints(&[vec![0, 0], vec![0, 0]]).is_ok());
    }

    #[test]
    fn rational_json_forms() {
        let q: RationalJson = serde_json::from_str(r#"{"num":"-3","den":"6"}"#).unwrap();
        assert_eq!(q.parse().unwrap(), rat(-1, 2));
        let q: RationalJson = serde_json::from_str(r#"{"num":1,"den":4}"#).unwrap();
        assert_eq!(q.parse().unwrap(), rat(1, 4));
        let q: RationalJson = serde_json::from_str("7").unwrap();
        assert_eq!(q.parse().unwrap(), int(7));
        let bad: RationalJson = serde_json::from_str(r#"{"num":1,"den":0}"#).unwrap();
        assert!(bad.parse().is_err());
        assert_eq!(
            serde_json::to_string(&RationalJson::from(&rat(2, 4))).unwrap(),
            r#"{"num":"1","den":"2"}"#
        );
    }

    #[test]
    fn metric_json_round_trip() {
        let m: FinitePseudoMetric = serde_json::from_str(r#"{"n":2,"dist":[[0,{"num":1,"den":2}],[{"num":"1","den":"2"},0]]}"#).unwrap();
        assert_eq!(m.dist(0, 1), &rat(1, 2));
        let back: FinitePseudoMetric = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        let space: RationalPointSpace = serde_json::from_str(r#"{"dim":1,"excluded":[[0]]}"#).unwrap();
        assert!(!space.contains(&Point::from_ints(&[0])));
    }

    #[test]
    fn extended_arithmetic() {
        let one = ExtendedRational::from(int(1));
        assert_eq!(one.add(&ExtendedRational::Infinite), ExtendedRational::Infinite);
        assert_eq!(one.clone().max(ExtendedRational::Infinite), ExtendedRational::Infinite);
        assert_eq!(one.add(&one), int(2).into());
        assert!(one < ExtendedRational::Infinite);
    }

    #[test]
    fn metric_from_points_passes_validation() {
        let pts = vec![Point::from_ints(&[0, 0]), Point::from_ints(&[1, 3]), Point::from_ints(&[-2, 1]), Point::from_ints(&[0, 0])];
        let m = FinitePseudoMetric::from_points(&pts);
        assert_eq!(FinitePseudoMetric::new(m.matrix().to_vec()).unwrap(), m);
        assert_eq!(m.dist(1, 2), &int(3));
        assert!(m.dist(0, 3).is_zero());
    }
}
