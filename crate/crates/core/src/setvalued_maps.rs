//! Upper and lower semicontinuity of set-valued maps between finite spaces.
//!
//! Neighborhood quantifiers collapse to smallest open sets: the smallest
//! neighborhood of `x` is `up(x)` and the smallest open superset of a set is
//! the union of the `up`s of its points.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::finite_topology::PointSet;
use crate::pseudometric_core::{ExtendedRational, FinitePseudoMetric, Rational};
use crate::subset_nets::{FiniteGround, FiniteNet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetValuedMap {
    domain: FiniteGround,
    codomain: FiniteGround,
    graph: Vec<PointSet>,
}

impl SetValuedMap {
    pub fn new(domain: FiniteGround, codomain: FiniteGround, graph: Vec<PointSet>) -> Result<Self> {
        if graph.len() != domain.len() {
            return Err(Error::Malformed(format!(
                "graph has {} values for {} domain points",
                graph.len(),
                domain.len()
            )));
        }
        if let Some(x) = graph.iter().position(|v| v.universe() != codomain.len()) {
            return Err(Error::Malformed(format!("value at {x} is not a subset of the codomain")));
        }
        Ok(SetValuedMap { domain, codomain, graph })
    }

    pub fn domain(&self) -> &FiniteGround {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteGround {
        &self.codomain
    }

    pub fn value(&self, x: usize) -> &PointSet {
        &self.graph[x]
    }

    pub fn graph(&self) -> &[PointSet] {
        &self.graph
    }

    fn check_point(&self, x: usize) -> Result<()> {
        if x < self.domain.len() {
            Ok(())
        } else {
            Err(Error::Malformed(format!("point {x} outside a {}-point domain", self.domain.len())))
        }
    }

    /// `F(A0) = ∪_{a ∈ A0} F(a)`.
    pub fn image(&self, a0: &PointSet) -> Result<PointSet> {
        if a0.universe() != self.domain.len() {
            return Err(Error::Malformed("image argument is not a subset of the domain".into()));
        }
        Ok(a0
            .iter()
            .fold(BitSet::empty(self.codomain.len()), |acc, a| acc.union(&self.graph[a])))
    }

    /// `F(up(x)) ⊆ U_min(F(x))`; larger open `U` or smaller `V` only make the test easier.
    pub fn is_usc_at(&self, x: usize) -> Result<bool> {
        self.check_point(x)?;
        let v = self.domain.space().minimal_neighborhood(x);
        let u = self.codomain.space().minimal_open_superset(&self.graph[x]);
        Ok(self.image(v)?.is_subset(&u))
    }

    /// Every `y ∈ F(x)` is met by `F(x')` for all `x'` in the smallest neighborhood of `x`.
    pub fn is_lsc_at(&self, x: usize) -> Result<bool> {
        self.check_point(x)?;
        let v = self.domain.space().minimal_neighborhood(x);
        let cod = self.codomain.space();
        Ok(self.graph[x]
            .iter()
            .all(|y| v.iter().all(|xp| self.graph[xp].intersects(cod.minimal_neighborhood(y)))))
    }

    /// The semi-distance criterion: for every `ε > 0` some ball `B(x; δ)`
    /// keeps `ρ(F(x); F(x')) < ε`.
    ///
    /// `ε` ranges over midpoints between consecutive realized values of
    /// `ρ(F(x); F(·))` plus one value above them all; `δ` ranges over
    /// midpoints between consecutive distances from `x` plus one value above.
    pub fn lsc_via_semidistance(&self, x: usize) -> Result<bool> {
        self.check_point(x)?;
        let (dm, cm) = match (self.domain.metric(), self.codomain.metric()) {
            (Some(d), Some(c)) => (d, c),
            _ => return Err(Error::Unsupported("semi-distance criterion needs metric domain and codomain".into())),
        };
        let fx = &self.graph[x];
        if fx.is_empty() {
            return Err(Error::Precondition(format!("F({x}) is empty")));
        }
        let rho: Vec<ExtendedRational> = (0..dm.len())
            .map(|xp| cm.semidistance(fx, &self.graph[xp]))
            .collect::<Result<_>>()?;
        let finite: Vec<Rational> = rho.iter().filter_map(|r| r.finite().cloned()).collect();
        let epsilons = threshold_grid(finite);
        let radii = threshold_grid((0..dm.len()).map(|xp| dm.dist(x, xp).clone()).collect());
        Ok(epsilons.iter().all(|eps| {
            radii.iter().any(|delta| {
                ball_around(dm, x, delta).all(|xp| matches!(&rho[xp], ExtendedRational::Finite(r) if r < eps))
            })
        }))
    }

    /// The net of images along the approach net of `x`: points by decreasing
    /// distance from `x`, then the zero-distance class of `x` repeating.
    pub fn approach_image_net(&self, x: usize) -> Result<FiniteNet> {
        self.check_point(x)?;
        let dm = self
            .domain
            .metric()
            .ok_or_else(|| Error::Unsupported("approach nets need a metric domain".into()))?;
        let mut far: Vec<usize> = (0..dm.len()).filter(|&p| !dm.dist(x, p).is_zero()).collect();
        far.sort_by(|&a, &b| dm.dist(x, b).cmp(dm.dist(x, a)).then(a.cmp(&b)));
        let near = (0..dm.len()).filter(|&p| dm.dist(x, p).is_zero());
        FiniteNet::sequence(
            self.codomain.clone(),
            far.iter().map(|&p| self.graph[p].clone()).collect(),
            near.map(|p| self.graph[p].clone()).collect(),
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: MapRepr = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let domain = FiniteGround::from_json_value(repr.domain)?;
        let codomain = FiniteGround::from_json_value(repr.codomain)?;
        let mut graph = vec![None; domain.len()];
        for (k, vals) in repr.graph {
            let x: usize = k
                .parse()
                .ok()
                .filter(|&x| x < domain.len())
                .ok_or_else(|| Error::Malformed(format!("graph key {k:?} is not a domain point")))?;
            let set = BitSet::from_indices(codomain.len(), vals)
                .map_err(|y| Error::Malformed(format!("value {y} outside the codomain")))?;
            graph[x] = Some(set);
        }
        let graph = graph
            .into_iter()
            .enumerate()
            .map(|(x, v)| v.ok_or_else(|| Error::Malformed(format!("graph has no entry for point {x}"))))
            .collect::<Result<_>>()?;
        Self::new(domain, codomain, graph)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(MapRepr {
            domain: self.domain.to_json_value(),
            codomain: self.codomain.to_json_value(),
            graph: self.graph.iter().enumerate().map(|(x, v)| (x.to_string(), v.to_vec())).collect(),
        })
        .expect("map serializes")
    }
}

/// Midpoints between consecutive distinct values, plus one past the largest.
fn threshold_grid(mut vals: Vec<Rational>) -> Vec<Rational> {
    vals.push(Rational::zero());
    vals.sort();
    vals.dedup();
    let two = Rational::from_integer(2.into());
    let mut out: Vec<Rational> = vals.windows(2).map(|w| (&w[0] + &w[1]) / &two).collect();
    out.push(vals.last().expect("contains zero") + Rational::from_integer(1.into()));
    out
}

fn ball_around<'a>(m: &'a FinitePseudoMetric, x: usize, r: &'a Rational) -> impl Iterator<Item = usize> + 'a {
    (0..m.len()).filter(move |&p| m.dist(x, p) < r)
}

#[derive(Serialize, Deserialize)]
struct MapRepr {
    domain: serde_json::Value,
    codomain: serde_json::Value,
    graph: BTreeMap<String, Vec<usize>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_topology::FiniteSpace;

    fn set(n: usize, ix: &[usize]) -> PointSet {
        BitSet::from_indices(n, ix.iter().copied()).unwrap()
    }

    #[test]
    fn image_examples() {
        let g = FiniteGround::topological(FiniteSpace::discrete(3));
        let id = SetValuedMap::new(g.clone(), g, (0..3).map(|i| set(3, &[i])).collect()).unwrap();
        assert!(id.image(&set(3, &[])).unwrap().is_empty());
        assert_eq!(id.image(&set(3, &[0, 2])).unwrap(), set(3, &[0, 2]));
    }

    #[test]
    fn isolated_points_are_semicontinuous() {
        let d = FiniteGround::topological(FiniteSpace::discrete(2));
        let s = FiniteGround::topological(FiniteSpace::sierpinski());
        let f = SetValuedMap::new(d, s, vec![set(2, &[1]), set(2, &[])]).unwrap();
        for x in 0..2 {
            assert!(f.is_usc_at(x).unwrap());
            assert!(f.is_lsc_at(x).unwrap());
        }
    }

    #[test]
    fn sierpinski_swap() {
        // up(0) = {0, 1}, up(1) = {1}.
        let s = FiniteGround::topological(FiniteSpace::sierpinski());
        let f = SetValuedMap::new(s.clone(), s, vec![set(2, &[1]), set(2, &[0])]).unwrap();
        assert!(!f.is_usc_at(0).unwrap());
        assert!(f.is_usc_at(1).unwrap());
        assert!(!f.is_lsc_at(0).unwrap());
        assert!(f.is_lsc_at(1).unwrap());
    }

    #[test]
    fn empty_value_is_lsc() {
        let s = FiniteGround::topological(FiniteSpace::indiscrete(2));
        let f = SetValuedMap::new(s.clone(), s, vec![set(2, &[]), set(2, &[0])]).unwrap();
        assert!(f.is_lsc_at(0).unwrap());
    }

    #[test]
    fn semidistance_criterion_examples() {
        let dom = FiniteGround::metric_space(FinitePseudoMetric::from_ints(&[vec![0, 1], vec![1, 0]]).unwrap());
        let cod = FiniteGround::metric_space(FinitePseudoMetric::from_ints(&[vec![0, 1], vec![1, 0]]).unwrap());
        let f = SetValuedMap::new(dom.clone(), cod.clone(), vec![set(2, &[0, 1]), set(2, &[0])]).unwrap();
        assert!(f.lsc_via_semidistance(0).unwrap());
        assert_eq!(f.lsc_via_semidistance(0).unwrap(), f.is_lsc_at(0).unwrap());

        let glued = FiniteGround::metric_space(FinitePseudoMetric::from_ints(&[vec![0, 0], vec![0, 0]]).unwrap());
        let g = SetValuedMap::new(glued, cod.clone(), vec![set(2, &[0, 1]), set(2, &[0])]).unwrap();
        assert!(!g.lsc_via_semidistance(0).unwrap());
        assert!(!g.is_lsc_at(0).unwrap());
        assert!(g.approach_image_net(0).unwrap().converges_from_below(&set(2, &[0, 1])).unwrap().fails());

        let constant = SetValuedMap::new(dom, cod, vec![set(2, &[1]), set(2, &[1])]).unwrap();
        assert!(constant.lsc_via_semidistance(0).unwrap());
        let hollow = SetValuedMap::new(
            constant.domain.clone(),
            constant.codomain.clone(),
            vec![set(2, &[]), set(2, &[1])],
        )
        .unwrap();
        assert!(matches!(hollow.lsc_via_semidistance(0), Err(Error::Precondition(_))));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"domain":{"n":2,"spec":[[true,true],[false,true]]},
            "codomain":{"n":2,"dist":[[0,1],[1,0]]},"graph":{"0":[1],"1":[]}}"#;
        let f = SetValuedMap::from_json(text).unwrap();
        assert_eq!(f.value(0), &set(2, &[1]));
        assert_eq!(SetValuedMap::from_json(&f.to_json().to_string()).unwrap(), f);
        assert!(SetValuedMap::from_json(r#"{"domain":{"n":1,"spec":[[true]]},"codomain":{"n":1,"spec":[[true]]},"graph":{}}"#).is_err());
    }
}
