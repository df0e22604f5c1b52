//! Instance generators: exhaustive enumerators for the finite backends and
//! seeded random draws for the rational and finite-metric ones.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;
use crate::directed_sets::{all_preorders, is_directed};
use crate::finite_topology::{FiniteSpace, PointSet};
use crate::pseudometric_core::{int, rat, FinitePseudoMetric, Point, Rational, RationalPointSpace, RationalSet};
use crate::subset_nets::{RationalNet, TailRule};

/// Every eventually periodic schedule `(preperiod, cycle)` over the subsets of
/// an `n`-point space with bounded lengths.
pub fn periodic_schedules(
    n: usize,
    max_preperiod: usize,
    max_cycle: usize,
    nonempty: bool,
) -> Vec<(Vec<PointSet>, Vec<PointSet>)> {
    let subsets: Vec<PointSet> = BitSet::all_subsets(n).filter(|s| !nonempty || !s.is_empty()).collect();
    let mut out = Vec::new();
    for p in 0..=max_preperiod {
        for c in 1..=max_cycle {
            for word in words(&subsets, p + c) {
                let (pre, cyc) = word.split_at(p);
                out.push((pre.to_vec(), cyc.to_vec()));
            }
        }
    }
    out
}

/// All words of length `len` over `alphabet`.
pub fn words<T: Clone>(alphabet: &[T], len: usize) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                alphabet.iter().map(move |a| {
                    let mut w2 = w.clone();
                    w2.push(a.clone());
                    w2
                })
            })
            .collect();
    }
    out
}

/// Every directed preorder on `1..=max_n` elements.
pub fn directed_preorders(max_n: usize) -> Vec<Vec<Vec<bool>>> {
    (1..=max_n)
        .flat_map(all_preorders)
        .filter(|r| is_directed(r).expect("square"))
        .collect()
}

/// Every topology on `1..=max_n` points.
pub fn all_spaces(max_n: usize) -> Vec<FiniteSpace> {
    (1..=max_n)
        .flat_map(|n| crate::finite_topology::enumerate_spaces(n).expect("within enumeration cap"))
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..n)
                    .filter(|i| !p.contains(i))
                    .map(|i| {
                        let mut q = p.clone();
                        q.push(i);
                        q
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    out
}

/// Pseudo-metrics on `n` points with values in `{0, .., max_value}`, one per relabeling class.
pub fn small_metrics_up_to_relabeling(n: usize, max_value: i64) -> Vec<FinitePseudoMetric> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let values: Vec<i64> = (0..=max_value).collect();
    let perms = permutations(n);
    let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut out = Vec::new();
    for word in words(&values, pairs.len()) {
        let mut m = vec![vec![0i64; n]; n];
        for (&(i, j), &v) in pairs.iter().zip(&word) {
            m[i][j] = v;
            m[j][i] = v;
        }
        let triangle = (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| m[i][k] <= m[i][j] + m[j][k])));
        if !triangle {
            continue;
        }
        let canon = perms
            .iter()
            .map(|p| pairs.iter().map(|&(i, j)| m[p[i]][p[j]]).collect::<Vec<_>>())
            .min()
            .expect("at least one permutation");
        if seen.insert(canon) {
            out.push(FinitePseudoMetric::from_ints(&m).expect("validated above"));
        }
    }
    out
}

/// A random pseudo-metric: shortest-path closure of random weights in `{0, .., 3}`.
#[allow(clippy::needless_range_loop)]
pub fn random_metric(rng: &mut ChaCha8Rng, n: usize) -> FinitePseudoMetric {
    let mut m = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = rng.gen_range(0..=3);
            m[i][j] = w;
            m[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                m[i][j] = m[i][j].min(m[i][k] + m[k][j]);
            }
        }
    }
    FinitePseudoMetric::from_ints(&m).expect("shortest paths form a pseudo-metric")
}

pub fn random_subset(rng: &mut ChaCha8Rng, n: usize, nonempty: bool) -> PointSet {
    loop {
        let s = BitSet::from_mask(n, rng.gen_range(0..1u64 << n));
        if !nonempty || !s.is_empty() {
            return s;
        }
    }
}

/// Which tail family a random rational net should use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    Periodic,
    Affine,
    Geometric,
    /// Geometric tail whose limit point is excluded from the space.
    Trap,
}

impl RuleKind {
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        *[RuleKind::Periodic, RuleKind::Affine, RuleKind::Geometric].choose(rng).expect("nonempty")
    }
}

/// Coordinates are halves in `[-5, 5]`.
pub fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> Point {
    Point::new((0..dim).map(|_| rat(rng.gen_range(-10..=10), 2)).collect())
}

fn random_ratio(rng: &mut ChaCha8Rng) -> Rational {
    let q = rng.gen_range(2..=6);
    let p = rng.gen_range(1..q);
    if rng.gen_bool(0.3) {
        -rat(p, q)
    } else {
        rat(p, q)
    }
}

fn random_set(rng: &mut ChaCha8Rng, dim: usize, excluded: &RationalSet, nonempty: bool, pool: &[Point]) -> RationalSet {
    let size = if nonempty { rng.gen_range(1..=3) } else { rng.gen_range(0..=3) };
    let mut s = RationalSet::new();
    while s.len() < size {
        let p = if !pool.is_empty() && rng.gen_bool(0.5) {
            pool.choose(rng).expect("nonempty pool").clone()
        } else {
            random_point(rng, dim)
        };
        if !excluded.contains(&p) {
            s.insert(p);
        }
    }
    s
}

/// A random net of the given family; `nonempty` keeps every `X_n` nonempty.
pub fn random_rational_net(rng: &mut ChaCha8Rng, kind: RuleKind, nonempty: bool) -> RationalNet {
    loop {
        let dim = rng.gen_range(1..=2);
        let mut excluded: RationalSet = (0..rng.gen_range(0..=2)).map(|_| random_point(rng, dim)).collect();
        let tail = match kind {
            RuleKind::Periodic => None,
            RuleKind::Affine => {
                let v = random_point(rng, dim);
                if v.is_origin() {
                    continue;
                }
                Some(TailRule::AffineEscape {
                    c: random_point(rng, dim),
                    v,
                })
            }
            RuleKind::Geometric | RuleKind::Trap => {
                let a = random_point(rng, dim);
                let b = if rng.gen_bool(0.1) { a.clone() } else { random_point(rng, dim) };
                if kind == RuleKind::Trap {
                    if a == b {
                        continue;
                    }
                    excluded.insert(a.clone());
                } else {
                    excluded.remove(&a);
                }
                Some(TailRule::GeometricConverge { a, b, r: random_ratio(rng) })
            }
        };
        // Reusing a few points makes phases overlap, which exercises the liminf side.
        let pool: Vec<Point> = (0..3).map(|_| random_point(rng, dim)).filter(|p| !excluded.contains(p)).collect();
        let tail = tail.unwrap_or_else(|| {
            let len = rng.gen_range(1..=3);
            TailRule::Periodic((0..len).map(|_| random_set(rng, dim, &excluded, nonempty, &pool)).collect())
        });
        let preperiod = (0..rng.gen_range(0..=2))
            .map(|_| random_set(rng, dim, &excluded, nonempty, &pool))
            .collect();
        let space = RationalPointSpace::new(dim, excluded.into_iter().collect()).expect("distinct points");
        if let Ok(net) = RationalNet::new(space, preperiod, tail) {
            return net;
        }
    }
}

/// A finite target for convergence checks, biased towards points of the net.
pub fn random_target(rng: &mut ChaCha8Rng, net: &RationalNet, nonempty: bool) -> RationalSet {
    let mut pool: Vec<Point> = net
        .candidate_grid()
        .into_iter()
        .filter(|p| net.space().contains(p))
        .collect();
    pool.push(random_point(rng, net.space().dim()));
    pool.retain(|p| net.space().contains(p));
    while nonempty && pool.is_empty() {
        let p = random_point(rng, net.space().dim());
        if net.space().contains(&p) {
            pool.push(p);
        }
    }
    if let TailRule::Periodic(cycle) = net.tail() {
        if rng.gen_bool(0.3) {
            let mut all: RationalSet = cycle.iter().flatten().cloned().collect();
            if rng.gen_bool(0.5) {
                if let Some(p) = pool.choose(rng) {
                    all.insert(p.clone());
                }
            }
            if !all.is_empty() || !nonempty {
                return all;
            }
        }
    }
    loop {
        let s: RationalSet = pool.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        if !nonempty || !s.is_empty() {
            return s;
        }
    }
}

pub fn point_line(vals: &[i64]) -> RationalSet {
    vals.iter().map(|&v| Point::new(vec![int(v)])).collect()
}
