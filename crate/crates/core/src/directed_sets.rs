//! Directed preorders used as index sets of nets.
//!
//! Three shapes are supported: an explicit finite preorder given by its
//! relation matrix, the nonnegative integers, and binary products of those.
//! Everything a net needs (comparison, upper bounds, cofinality, monotone
//! final maps) is decidable on these shapes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// A reflexive, transitive relation on `{0, .., n-1}` in which every pair has an upper bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteOrder {
    rel: Vec<Vec<bool>>,
}

impl FiniteOrder {
    pub fn new(rel: Vec<Vec<bool>>) -> Result<Self> {
        if !is_directed(&rel)? {
            return Err(invalid(
                "directed order",
                "relation must be reflexive, transitive and have pairwise upper bounds",
            ));
        }
        Ok(FiniteOrder { rel })
    }

    /// The chain `0 <= 1 <= .. <= n-1`.
    pub fn chain(n: usize) -> Self {
        let rel = (0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect();
        FiniteOrder { rel }
    }

    pub fn len(&self) -> usize {
        self.rel.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rel.is_empty()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.rel[a][b]
    }

    pub fn relation(&self) -> &[Vec<bool>] {
        &self.rel
    }
}

/// Index sets for nets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "OrderRepr", into = "OrderRepr")]
pub enum DirectedOrder {
    Finite(FiniteOrder),
    /// The nonnegative integers with their usual order.
    Naturals,
    Product(Box<DirectedOrder>, Box<DirectedOrder>),
}

/// An element of a [`DirectedOrder`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Index {
    Finite(usize),
    Nat(u64),
    Pair(Box<Index>, Box<Index>),
}

impl Index {
    pub fn pair(a: Index, b: Index) -> Index {
        Index::Pair(Box::new(a), Box::new(b))
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Finite(i) => write!(f, "#{i}"),
            Index::Nat(n) => write!(f, "{n}"),
            Index::Pair(a, b) => write!(f, "({a},{b})"),
        }
    }
}

fn mismatch(order: &DirectedOrder, idx: &Index) -> Error {
    Error::Malformed(format!("index {idx} is not an element of {}", order.describe()))
}

impl DirectedOrder {
    pub fn finite(rel: Vec<Vec<bool>>) -> Result<Self> {
        FiniteOrder::new(rel).map(DirectedOrder::Finite)
    }

    pub fn naturals() -> Self {
        DirectedOrder::Naturals
    }

    fn describe(&self) -> String {
        match self {
            DirectedOrder::Finite(o) => format!("finite order on {} elements", o.len()),
            DirectedOrder::Naturals => "Z+".to_string(),
            DirectedOrder::Product(a, b) => format!("{} x {}", a.describe(), b.describe()),
        }
    }

    pub fn contains(&self, idx: &Index) -> bool {
        match (self, idx) {
            (DirectedOrder::Finite(o), Index::Finite(i)) => *i < o.len(),
            (DirectedOrder::Naturals, Index::Nat(_)) => true,
            (DirectedOrder::Product(a, b), Index::Pair(x, y)) => a.contains(x) && b.contains(y),
            _ => false,
        }
    }

    pub fn leq(&self, a: &Index, b: &Index) -> Result<bool> {
        match (self, a, b) {
            (DirectedOrder::Finite(o), Index::Finite(i), Index::Finite(j)) if *i < o.len() && *j < o.len() => {
                Ok(o.leq(*i, *j))
            }
            (DirectedOrder::Naturals, Index::Nat(m), Index::Nat(n)) => Ok(m <= n),
            (DirectedOrder::Product(l, r), Index::Pair(a1, a2), Index::Pair(b1, b2)) => {
                Ok(l.leq(a1, b1)? && r.leq(a2, b2)?)
            }
            _ => Err(if self.contains(a) { mismatch(self, b) } else { mismatch(self, a) }),
        }
    }

    /// Upper bound of `a` and `b`; ties among finite candidates go to the least element index.
    pub fn upper_bound(&self, a: &Index, b: &Index) -> Result<Index> {
        match (self, a, b) {
            (DirectedOrder::Finite(o), Index::Finite(i), Index::Finite(j)) if *i < o.len() && *j < o.len() => (0..o
                .len())
                .find(|&c| o.leq(*i, c) && o.leq(*j, c))
                .map(Index::Finite)
                .ok_or_else(|| Error::Malformed("finite order lost directedness".into())),
            (DirectedOrder::Naturals, Index::Nat(m), Index::Nat(n)) => Ok(Index::Nat(*m.max(n))),
            (DirectedOrder::Product(l, r), Index::Pair(a1, a2), Index::Pair(b1, b2)) => {
                Ok(Index::pair(l.upper_bound(a1, b1)?, r.upper_bound(a2, b2)?))
            }
            _ => Err(if self.contains(a) { mismatch(self, b) } else { mismatch(self, a) }),
        }
    }

    /// Number of elements, or `None` when the order contains a copy of Z+.
    pub fn element_count(&self) -> Option<usize> {
        match self {
            DirectedOrder::Finite(o) => Some(o.len()),
            DirectedOrder::Naturals => None,
            DirectedOrder::Product(a, b) => Some(a.element_count()? * b.element_count()?),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.element_count().is_some()
    }

    /// All elements of a finite order, products in lexicographic order.
    pub fn elements(&self) -> Option<Vec<Index>> {
        match self {
            DirectedOrder::Finite(o) => Some((0..o.len()).map(Index::Finite).collect()),
            DirectedOrder::Naturals => None,
            DirectedOrder::Product(a, b) => {
                let left = a.elements()?;
                let right = b.elements()?;
                Some(
                    left.iter()
                        .flat_map(|x| right.iter().map(move |y| Index::pair(x.clone(), y.clone())))
                        .collect(),
                )
            }
        }
    }

    /// Position of `idx` in [`DirectedOrder::elements`].
    pub fn position(&self, idx: &Index) -> Option<usize> {
        match (self, idx) {
            (DirectedOrder::Finite(o), Index::Finite(i)) if *i < o.len() => Some(*i),
            (DirectedOrder::Product(a, b), Index::Pair(x, y)) => {
                Some(a.position(x)? * b.element_count()? + b.position(y)?)
            }
            _ => None,
        }
    }

    /// Explicit relation matrix of a finite order, rows in [`DirectedOrder::elements`] order.
    pub fn materialize(&self) -> Option<Vec<Vec<bool>>> {
        match self {
            DirectedOrder::Finite(o) => Some(o.rel.clone()),
            DirectedOrder::Naturals => None,
            DirectedOrder::Product(a, b) => {
                let ra = a.materialize()?;
                let rb = b.materialize()?;
                let (na, nb) = (ra.len(), rb.len());
                let n = na * nb;
                let mut rel = vec![vec![false; n]; n];
                for (p, row) in rel.iter_mut().enumerate() {
                    for (q, cell) in row.iter_mut().enumerate() {
                        *cell = ra[p / nb][q / nb] && rb[p % nb][q % nb];
                    }
                }
                Some(rel)
            }
        }
    }

    /// Least-index element above every element; `None` for infinite orders.
    pub fn top_element(&self) -> Option<Index> {
        let elems = self.elements()?;
        elems
            .iter()
            .find(|c| elems.iter().all(|a| self.leq(a, c).unwrap_or(false)))
            .cloned()
    }

    /// Every supported order admits a sequence tending to its boundary.
    pub fn is_sequential(&self) -> bool {
        true
    }

    /// A canonical monotone final sequence of the given length.
    pub fn canonical_final_sequence(&self, len: usize) -> Vec<Index> {
        match self {
            DirectedOrder::Naturals => (0..len as u64).map(Index::Nat).collect(),
            DirectedOrder::Product(a, b) => a
                .canonical_final_sequence(len)
                .into_iter()
                .zip(b.canonical_final_sequence(len))
                .map(|(x, y)| Index::pair(x, y))
                .collect(),
            DirectedOrder::Finite(_) => {
                let top = self.top_element().expect("finite directed order has a top");
                vec![top; len]
            }
        }
    }
}

/// True iff `rel` is reflexive, transitive, and every pair has an upper bound.
pub fn is_directed(rel: &[Vec<bool>]) -> Result<bool> {
    let n = rel.len();
    if let Some(row) = rel.iter().find(|r| r.len() != n) {
        return Err(Error::Malformed(format!(
            "relation matrix is not square: {n} rows but a row of length {}",
            row.len()
        )));
    }
    if n == 0 {
        return Ok(false);
    }
    let reflexive = (0..n).all(|i| rel[i][i]);
    let transitive = (0..n).all(|i| (0..n).all(|j| !rel[i][j] || (0..n).all(|k| !rel[j][k] || rel[i][k])));
    let bounded = (0..n).all(|a| (0..n).all(|b| (0..n).any(|c| rel[a][c] && rel[b][c])));
    Ok(reflexive && transitive && bounded)
}

/// The componentwise product of two directed orders.
pub fn product_order(a: &DirectedOrder, b: &DirectedOrder) -> DirectedOrder {
    DirectedOrder::Product(Box::new(a.clone()), Box::new(b.clone()))
}

/// A subset of an index set, in one of the decidable forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndexSubset {
    /// A finite list of elements.
    Elements(Vec<Index>),
    /// Membership of `n` in Z+ is `prefix[n]` for `n < prefix.len()`, then cycles through `cycle`.
    EventuallyPeriodic { prefix: Vec<bool>, cycle: Vec<bool> },
}

impl IndexSubset {
    pub fn contains_nat(&self, n: u64) -> bool {
        match self {
            IndexSubset::Elements(es) => es.contains(&Index::Nat(n)),
            IndexSubset::EventuallyPeriodic { prefix, cycle } => {
                let n = n as usize;
                if n < prefix.len() {
                    prefix[n]
                } else {
                    !cycle.is_empty() && cycle[(n - prefix.len()) % cycle.len()]
                }
            }
        }
    }
}

/// True iff every element of `order` lies below some member of `subset`.
pub fn is_cofinal(subset: &IndexSubset, order: &DirectedOrder) -> Result<bool> {
    match subset {
        IndexSubset::Elements(members) => {
            if let Some(bad) = members.iter().find(|m| !order.contains(m)) {
                return Err(mismatch(order, bad));
            }
            match order.elements() {
                Some(all) => {
                    for a in &all {
                        let mut covered = false;
                        for m in members {
                            if order.leq(a, m)? {
                                covered = true;
                                break;
                            }
                        }
                        if !covered {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                }
                // A finite subset of an order containing Z+ is bounded in that coordinate.
                None => Ok(false),
            }
        }
        IndexSubset::EventuallyPeriodic { cycle, .. } => match order {
            DirectedOrder::Naturals => {
                if cycle.is_empty() {
                    return Err(Error::Malformed("eventually periodic membership needs a nonempty cycle".into()));
                }
                Ok(cycle.iter().any(|&b| b))
            }
            _ => Err(Error::Unsupported(
                "eventually periodic membership is only decided on Z+".into(),
            )),
        },
    }
}

/// How an [`IndexMap`] sends source elements to target elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapRule {
    /// `table[i]` is the image of the `i`-th source element (finite sources only).
    Table(Vec<Index>),
    /// `n -> scale * n + offset` on Z+, `scale >= 1`.
    Affine { scale: u64, offset: u64 },
}

/// A map between index sets, the `h` of a subnet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexMap {
    source: DirectedOrder,
    target: DirectedOrder,
    rule: MapRule,
}

impl IndexMap {
    pub fn new(source: DirectedOrder, target: DirectedOrder, rule: MapRule) -> Result<Self> {
        match &rule {
            MapRule::Table(images) => {
                let count = source
                    .element_count()
                    .ok_or_else(|| Error::Unsupported("table maps need a finite source".into()))?;
                if images.len() != count {
                    return Err(Error::Malformed(format!(
                        "table has {} entries for {count} source elements",
                        images.len()
                    )));
                }
                if let Some(bad) = images.iter().find(|i| !target.contains(i)) {
                    return Err(mismatch(&target, bad));
                }
            }
            MapRule::Affine { scale, .. } => {
                if source != DirectedOrder::Naturals || target != DirectedOrder::Naturals {
                    return Err(Error::Unsupported("affine maps are defined on Z+ -> Z+".into()));
                }
                if *scale == 0 {
                    return Err(invalid("index map", "affine scale must be at least 1"));
                }
            }
        }
        Ok(IndexMap { source, target, rule })
    }

    pub fn identity(order: DirectedOrder) -> Result<Self> {
        match &order {
            DirectedOrder::Naturals => Self::new(order.clone(), order, MapRule::Affine { scale: 1, offset: 0 }),
            _ => {
                let elems = order
                    .elements()
                    .ok_or_else(|| Error::Unsupported("identity on infinite products".into()))?;
                Self::new(order.clone(), order, MapRule::Table(elems))
            }
        }
    }

    pub fn source(&self) -> &DirectedOrder {
        &self.source
    }

    pub fn target(&self) -> &DirectedOrder {
        &self.target
    }

    pub fn rule(&self) -> &MapRule {
        &self.rule
    }

    pub fn apply(&self, idx: &Index) -> Result<Index> {
        match (&self.rule, idx) {
            (MapRule::Affine { scale, offset }, Index::Nat(n)) => scale
                .checked_mul(*n)
                .and_then(|v| v.checked_add(*offset))
                .map(Index::Nat)
                .ok_or_else(|| Error::SizeLimit("affine index overflow".into())),
            (MapRule::Table(images), _) => self
                .source
                .position(idx)
                .map(|p| images[p].clone())
                .ok_or_else(|| mismatch(&self.source, idx)),
            _ => Err(mismatch(&self.source, idx)),
        }
    }

    /// `h(b) -> bd(target)` as `b -> bd(source)`: every target element is eventually exceeded.
    pub fn tends_to_boundary(&self) -> Result<bool> {
        match &self.rule {
            MapRule::Affine { .. } => Ok(true),
            MapRule::Table(_) => {
                // On a finite source, "eventually" means at every element above the top.
                let src = self.source.elements().unwrap_or_default();
                let top = self.source.top_element().expect("finite source has a top");
                let tail: Vec<&Index> = src.iter().filter(|b| self.source.leq(&top, b).unwrap_or(false)).collect();
                match self.target.elements() {
                    Some(tgt) => {
                        for a in &tgt {
                            for b in &tail {
                                if !self.target.leq(a, &self.apply(b)?)? {
                                    return Ok(false);
                                }
                            }
                        }
                        Ok(true)
                    }
                    None => Ok(false),
                }
            }
        }
    }
}

/// True iff `h` is order preserving and its image is cofinal in the target.
pub fn is_monotone_final_map(h: &IndexMap) -> Result<bool> {
    match &h.rule {
        // scale >= 1 makes the map monotone with h(n) >= n.
        MapRule::Affine { .. } => Ok(true),
        MapRule::Table(images) => {
            let src = h.source.elements().expect("table maps have finite sources");
            for (i, a) in src.iter().enumerate() {
                for (j, b) in src.iter().enumerate() {
                    if h.source.leq(a, b)? && !h.target.leq(&images[i], &images[j])? {
                        return Ok(false);
                    }
                }
            }
            is_cofinal(&IndexSubset::Elements(images.clone()), &h.target)
        }
    }
}

/// Replaces `t` on `0..window` by a monotone sequence `s` with `s[n] >= t[n]`.
///
/// `s[0] = t[0]` and `s[n+1]` is the deterministic upper bound of `s[n]` and `t[n+1]`.
pub fn monotonize_final_sequence(order: &DirectedOrder, t: &[Index], window: usize) -> Result<Vec<Index>> {
    if window == 0 {
        return Err(Error::Precondition("window must be positive".into()));
    }
    if t.len() < window {
        return Err(Error::Precondition(format!(
            "sequence has {} terms but the window is {window}",
            t.len()
        )));
    }
    let mut out: Vec<Index> = Vec::with_capacity(window);
    for term in &t[..window] {
        let next = match out.last() {
            None => {
                if !order.contains(term) {
                    return Err(mismatch(order, term));
                }
                term.clone()
            }
            Some(prev) => order.upper_bound(prev, term)?,
        };
        out.push(next);
    }
    Ok(out)
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum OrderRepr {
    Finite { rel: Vec<Vec<bool>> },
    Znn,
    Product { left: Box<OrderRepr>, right: Box<OrderRepr> },
}

impl TryFrom<OrderRepr> for DirectedOrder {
    type Error = Error;

    fn try_from(r: OrderRepr) -> Result<Self> {
        Ok(match r {
            OrderRepr::Finite { rel } => DirectedOrder::finite(rel)?,
            OrderRepr::Znn => DirectedOrder::Naturals,
            OrderRepr::Product { left, right } => {
                DirectedOrder::Product(Box::new((*left).try_into()?), Box::new((*right).try_into()?))
            }
        })
    }
}

impl From<DirectedOrder> for OrderRepr {
    fn from(o: DirectedOrder) -> Self {
        match o {
            DirectedOrder::Finite(f) => OrderRepr::Finite { rel: f.rel },
            DirectedOrder::Naturals => OrderRepr::Znn,
            DirectedOrder::Product(a, b) => OrderRepr::Product {
                left: Box::new((*a).into()),
                right: Box::new((*b).into()),
            },
        }
    }
}

/// Every reflexive-transitive relation on `n <= 4` elements, directed or not.
///
/// Used by the exhaustive suites; brute force over off-diagonal patterns.
pub fn all_preorders(n: usize) -> Vec<Vec<Vec<bool>>> {
    assert!(n <= 4, "preorder enumeration capped at 4 elements");
    let off: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for mask in 0u32..1 << off.len() {
        let mut rel = vec![vec![false; n]; n];
        for (i, row) in rel.iter_mut().enumerate() {
            row[i] = true;
        }
        for (b, &(i, j)) in off.iter().enumerate() {
            rel[i][j] = mask >> b & 1 == 1;
        }
        let transitive = (0..n).all(|i| (0..n).all(|j| !rel[i][j] || (0..n).all(|k| !rel[j][k] || rel[i][k])));
        if transitive {
            out.push(rel);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nat(n: u64) -> Index {
        Index::Nat(n)
    }

    #[test]
    fn chain_is_directed_and_antichain_is_not() {
        assert!(is_directed(FiniteOrder::chain(3).relation()).unwrap());
        let antichain = vec![vec![true, false], vec![false, true]];
        assert!(!is_directed(&antichain).unwrap());
    }

    #[test]
    fn non_square_matrix_is_malformed() {
        let bad = vec![vec![true, false], vec![true]];
        assert!(matches!(is_directed(&bad), Err(Error::Malformed(_))));
    }

    #[test]
    fn product_of_singletons_is_singleton() {
        let one = DirectedOrder::finite(vec![vec![true]]).unwrap();
        let p = product_order(&one, &one);
        assert_eq!(p.element_count(), Some(1));
        assert!(is_directed(&p.materialize().unwrap()).unwrap());
    }

    #[test]
    fn naturals_product_is_componentwise() {
        let p = product_order(&DirectedOrder::Naturals, &DirectedOrder::Naturals);
        let a = Index::pair(nat(1), nat(2));
        let b = Index::pair(nat(2), nat(1));
        assert!(!p.leq(&a, &b).unwrap());
        assert!(!p.leq(&b, &a).unwrap());
        assert_eq!(p.upper_bound(&a, &b).unwrap(), Index::pair(nat(2), nat(2)));
    }

    #[test]
    fn cofinality_examples() {
        let chain = DirectedOrder::Finite(FiniteOrder::chain(3));
        let whole = IndexSubset::Elements(chain.elements().unwrap());
        assert!(is_cofinal(&whole, &chain).unwrap());
        let evens = IndexSubset::EventuallyPeriodic {
            prefix: vec![],
            cycle: vec![true, false],
        };
        assert!(is_cofinal(&evens, &DirectedOrder::Naturals).unwrap());
        let finite = IndexSubset::Elements(vec![nat(3), nat(10)]);
        assert!(!is_cofinal(&finite, &DirectedOrder::Naturals).unwrap());
        assert!(matches!(is_cofinal(&evens, &chain), Err(Error::Unsupported(_))));
    }

    #[test]
    fn monotone_final_map_examples() {
        let id = IndexMap::identity(DirectedOrder::Naturals).unwrap();
        assert!(is_monotone_final_map(&id).unwrap());
        let double = IndexMap::new(
            DirectedOrder::Naturals,
            DirectedOrder::Naturals,
            MapRule::Affine { scale: 2, offset: 0 },
        )
        .unwrap();
        assert!(is_monotone_final_map(&double).unwrap());
        assert_eq!(double.apply(&nat(7)).unwrap(), nat(14));

        let chain = DirectedOrder::Finite(FiniteOrder::chain(3));
        let constant = IndexMap::new(chain.clone(), chain.clone(), MapRule::Table(vec![Index::Finite(1); 3])).unwrap();
        assert!(!is_monotone_final_map(&constant).unwrap());
        assert!(!constant.tends_to_boundary().unwrap());
        let to_top = IndexMap::new(chain.clone(), chain, MapRule::Table(vec![Index::Finite(2); 3])).unwrap();
        assert!(is_monotone_final_map(&to_top).unwrap());
    }

    #[test]
    fn affine_scale_zero_rejected() {
        let r = IndexMap::new(
            DirectedOrder::Naturals,
            DirectedOrder::Naturals,
            MapRule::Affine { scale: 0, offset: 3 },
        );
        assert!(matches!(r, Err(Error::Invalid { .. })));
    }

    #[test]
    fn monotonize_examples() {
        let t: Vec<Index> = [1, 2, 3, 4].into_iter().map(nat).collect();
        assert_eq!(monotonize_final_sequence(&DirectedOrder::Naturals, &t, 4).unwrap(), t);
        let t: Vec<Index> = [5, 1, 7, 2].into_iter().map(nat).collect();
        let s = monotonize_final_sequence(&DirectedOrder::Naturals, &t, 4).unwrap();
        assert_eq!(s, [5, 5, 7, 7].into_iter().map(nat).collect::<Vec<_>>());
        assert!(monotonize_final_sequence(&DirectedOrder::Naturals, &t, 0).is_err());
        assert!(monotonize_final_sequence(&DirectedOrder::Naturals, &t, 5).is_err());
    }

    #[test]
    fn json_forms() {
        let p = product_order(&DirectedOrder::finite(vec![vec![true]]).unwrap(), &DirectedOrder::Naturals);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"kind":"product","left":{"kind":"finite","rel":[[true]]},"right":{"kind":"znn"}}"#);
        let back: DirectedOrder = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
        let bad = r#"{"kind":"finite","rel":[[true,false],[false,true]]}"#;
        assert!(serde_json::from_str::<DirectedOrder>(bad).is_err());
    }
}
