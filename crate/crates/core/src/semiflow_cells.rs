//! Cell-mapping discretization of discrete-time semiflows on `[0,1]^d`.
//!
//! The unit box is split into `m^d` cells (half-open, the last cell per axis
//! closed at 1). A continuous map is pushed forward by sampling an 8-point
//! lattice per axis in each closed cell and padding the hits by one cell.
//! Iterating the cell image from an initial set reaches a cycle in finitely
//! many steps; the union of the cycle is the cell-level omega limit set.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::bitset::BitSet;
use crate::error::{invalid, Error, Result};
use crate::pseudometric_core::{int, FinitePseudoMetric, Point, Rational};
use crate::subset_nets::{FiniteGround, FiniteNet};

pub type CellSet = BitSet;

/// Sample points per axis in each cell.
pub const SAMPLES_PER_AXIS: usize = 8;

/// Iteration cap for cycle detection.
pub const MAX_ITERATIONS: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CellGrid {
    dim: usize,
    cells_per_axis: usize,
}

impl CellGrid {
    pub fn new(dim: usize, cells_per_axis: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(invalid("cell grid", format!("dimension must be 1 or 2, got {dim}")));
        }
        if !cells_per_axis.is_power_of_two() || cells_per_axis > 4096 {
            return Err(invalid(
                "cell grid",
                format!("cells per axis must be a power of two up to 4096, got {cells_per_axis}"),
            ));
        }
        Ok(CellGrid { dim, cells_per_axis })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells_per_axis
    }

    pub fn cell_count(&self) -> usize {
        self.cells_per_axis.pow(self.dim as u32)
    }

    pub fn empty(&self) -> CellSet {
        BitSet::empty(self.cell_count())
    }

    pub fn all(&self) -> CellSet {
        BitSet::full(self.cell_count())
    }

    pub fn cells<I: IntoIterator<Item = usize>>(&self, it: I) -> Result<CellSet> {
        BitSet::from_indices(self.cell_count(), it)
            .map_err(|c| Error::Malformed(format!("cell {c} out of range for {} cells", self.cell_count())))
    }

    /// Per-axis coordinate to cell index; the last cell is closed at 1.
    pub fn axis_cell(&self, x: f64) -> usize {
        let m = self.cells_per_axis;
        if x.is_nan() || x <= 0.0 {
            0
        } else {
            ((x * m as f64).floor() as usize).min(m - 1)
        }
    }

    /// Cell containing a point; x varies fastest.
    pub fn cell_of(&self, p: &[f64]) -> usize {
        match self.dim {
            1 => self.axis_cell(p[0]),
            _ => self.axis_cell(p[0]) + self.cells_per_axis * self.axis_cell(p[1]),
        }
    }

    pub fn axis_indices(&self, cell: usize) -> (usize, usize) {
        (cell % self.cells_per_axis, cell / self.cells_per_axis)
    }

    /// Cell centers as exact rational points.
    pub fn center(&self, cell: usize) -> Point {
        let m = self.cells_per_axis as i64;
        let c = |i: usize| Rational::new(BigInt::from(2 * i as i64 + 1), BigInt::from(2 * m));
        let (i, j) = self.axis_indices(cell);
        match self.dim {
            1 => Point::new(vec![c(i)]),
            _ => Point::new(vec![c(i), c(j)]),
        }
    }

    /// Chebyshev distance between cells, in cells.
    pub fn cell_distance(&self, a: usize, b: usize) -> usize {
        let (ai, aj) = self.axis_indices(a);
        let (bi, bj) = self.axis_indices(b);
        ai.abs_diff(bi).max(aj.abs_diff(bj))
    }

    /// `cells` plus every cell at Chebyshev distance 1, wrapping the x axis when `wrap` is set.
    pub fn dilate(&self, cells: &CellSet, wrap: bool) -> CellSet {
        let m = self.cells_per_axis as isize;
        let mut out = cells.clone();
        let offsets: &[isize] = &[-1, 0, 1];
        for c in cells.iter() {
            let (i, j) = self.axis_indices(c);
            for &di in offsets {
                let mut ni = i as isize + di;
                if wrap {
                    ni = ni.rem_euclid(m);
                } else if !(0..m).contains(&ni) {
                    continue;
                }
                if self.dim == 1 {
                    out.insert(ni as usize);
                    continue;
                }
                for &dj in offsets {
                    let nj = j as isize + dj;
                    if (0..m).contains(&nj) {
                        out.insert((ni + m * nj) as usize);
                    }
                }
            }
        }
        out
    }
}

/// A map of the unit box into itself, or an explicit cell-to-cells table.
#[derive(Clone, Debug, PartialEq)]
pub enum DiscreteSemiflow {
    /// `x -> r x (1 - x)`, `r ∈ [0, 4]`.
    Logistic { r: f64 },
    /// `x -> mu min(x, 1 - x)`, `mu ∈ [0, 2]`.
    Tent { mu: f64 },
    /// `x -> x + theta mod 1`.
    Rotation { theta: BigRational },
    /// `(x, y) -> (1 - a x^2 + y, b x)` on `[-3/2, 3/2]^2`, rescaled onto the unit square and clamped.
    Henon { a: f64, b: f64 },
    Table(Vec<CellSet>),
}

impl fmt::Display for DiscreteSemiflow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiscreteSemiflow::Logistic { r } => write!(f, "logistic(r={r})"),
            DiscreteSemiflow::Tent { mu } => write!(f, "tent(mu={mu})"),
            DiscreteSemiflow::Rotation { theta } => write!(f, "rotation(theta={theta})"),
            DiscreteSemiflow::Henon { a, b } => write!(f, "henon(a={a}, b={b})"),
            DiscreteSemiflow::Table(t) => write!(f, "table({} cells)", t.len()),
        }
    }
}

const HENON_HALF_WIDTH: f64 = 1.5;

impl DiscreteSemiflow {
    pub fn logistic(r: f64) -> Result<Self> {
        if !(0.0..=4.0).contains(&r) {
            return Err(invalid("logistic map", format!("r must lie in [0, 4], got {r}")));
        }
        Ok(DiscreteSemiflow::Logistic { r })
    }

    pub fn tent(mu: f64) -> Result<Self> {
        if !(0.0..=2.0).contains(&mu) {
            return Err(invalid("tent map", format!("mu must lie in [0, 2], got {mu}")));
        }
        Ok(DiscreteSemiflow::Tent { mu })
    }

    pub fn rotation(theta: BigRational) -> Self {
        DiscreteSemiflow::Rotation { theta }
    }

    pub fn henon(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(invalid("henon map", "parameters must be finite"));
        }
        Ok(DiscreteSemiflow::Henon { a, b })
    }

    pub fn table(grid: &CellGrid, table: Vec<CellSet>) -> Result<Self> {
        if table.len() != grid.cell_count() {
            return Err(Error::Malformed(format!(
                "table has {} rows for {} cells",
                table.len(),
                grid.cell_count()
            )));
        }
        if table.iter().any(|row| row.universe() != grid.cell_count()) {
            return Err(Error::Malformed("table row over the wrong number of cells".into()));
        }
        Ok(DiscreteSemiflow::Table(table))
    }

    pub fn identity(grid: &CellGrid) -> Self {
        DiscreteSemiflow::Table((0..grid.cell_count()).map(|c| BitSet::singleton(grid.cell_count(), c)).collect())
    }

    pub fn natural_dim(&self) -> Option<usize> {
        match self {
            DiscreteSemiflow::Logistic { .. } | DiscreteSemiflow::Tent { .. } | DiscreteSemiflow::Rotation { .. } => Some(1),
            DiscreteSemiflow::Henon { .. } => Some(2),
            DiscreteSemiflow::Table(_) => None,
        }
    }

    fn check_grid(&self, grid: &CellGrid) -> Result<()> {
        match (self, self.natural_dim()) {
            (DiscreteSemiflow::Table(t), _) if t.len() != grid.cell_count() => Err(Error::Malformed(format!(
                "table has {} rows for {} cells",
                t.len(),
                grid.cell_count()
            ))),
            (_, Some(d)) if d != grid.dim() => Err(Error::Precondition(format!(
                "{self} acts on dimension {d}, grid has dimension {}",
                grid.dim()
            ))),
            _ => Ok(()),
        }
    }

    /// Evaluates the map at a point of the box.
    pub fn apply(&self, p: &[f64]) -> Vec<f64> {
        match self {
            DiscreteSemiflow::Logistic { r } => vec![r * p[0] * (1.0 - p[0])],
            DiscreteSemiflow::Tent { mu } => vec![mu * p[0].min(1.0 - p[0])],
            DiscreteSemiflow::Rotation { theta } => {
                let t = theta.to_f64().unwrap_or(0.0);
                vec![(p[0] + t).rem_euclid(1.0)]
            }
            DiscreteSemiflow::Henon { a, b } => {
                let w = 2.0 * HENON_HALF_WIDTH;
                let x = p[0] * w - HENON_HALF_WIDTH;
                let y = p[1] * w - HENON_HALF_WIDTH;
                let nx = 1.0 - a * x * x + y;
                let ny = b * x;
                vec![
                    ((nx + HENON_HALF_WIDTH) / w).clamp(0.0, 1.0),
                    ((ny + HENON_HALF_WIDTH) / w).clamp(0.0, 1.0),
                ]
            }
            DiscreteSemiflow::Table(_) => panic!("table flows have no point map"),
        }
    }

    /// Exact cell shift of a rotation whose angle is a whole number of cells.
    fn exact_shift(&self, grid: &CellGrid) -> Option<usize> {
        match self {
            DiscreteSemiflow::Rotation { theta } => {
                let steps = theta * int(grid.cells_per_axis() as i64);
                steps.is_integer().then(|| {
                    let m = BigInt::from(grid.cells_per_axis());
                    steps.to_integer().mod_floor(&m).to_usize().expect("below cell count")
                })
            }
            _ => None,
        }
    }
}

/// Cells hit by the sample lattice of one closed cell, before padding.
fn sampled_image(grid: &CellGrid, flow: &DiscreteSemiflow, cell: usize) -> Vec<usize> {
    let m = grid.cells_per_axis() as f64;
    let k = SAMPLES_PER_AXIS;
    let coord = |i: usize, s: usize| (i as f64 + s as f64 / (k - 1) as f64) / m;
    let (i, j) = grid.axis_indices(cell);
    let mut hits = Vec::with_capacity(k * k);
    for s in 0..k {
        if grid.dim() == 1 {
            hits.push(grid.cell_of(&flow.apply(&[coord(i, s)])));
            continue;
        }
        for t in 0..k {
            hits.push(grid.cell_of(&flow.apply(&[coord(i, s), coord(j, t)])));
        }
    }
    hits.sort_unstable();
    hits.dedup();
    hits
}

/// Per-cell images, computed on demand and reused across iterations.
struct ImageCache<'a> {
    grid: &'a CellGrid,
    flow: &'a DiscreteSemiflow,
    shift: Option<usize>,
    raw: HashMap<usize, Vec<usize>>,
}

impl<'a> ImageCache<'a> {
    fn new(grid: &'a CellGrid, flow: &'a DiscreteSemiflow) -> Result<Self> {
        flow.check_grid(grid)?;
        Ok(ImageCache {
            grid,
            flow,
            shift: flow.exact_shift(grid),
            raw: HashMap::new(),
        })
    }

    fn image(&mut self, cells: &CellSet) -> CellSet {
        let grid = self.grid;
        match (self.flow, self.shift) {
            (DiscreteSemiflow::Table(t), _) => cells.iter().fold(grid.empty(), |acc, c| acc.union(&t[c])),
            (_, Some(shift)) => {
                let m = grid.cells_per_axis();
                let mut out = grid.empty();
                for c in cells.iter() {
                    out.insert((c + shift) % m);
                }
                out
            }
            (flow, None) => {
                let missing: Vec<usize> = cells.iter().filter(|c| !self.raw.contains_key(c)).collect();
                let fresh: Vec<(usize, Vec<usize>)> = missing
                    .into_par_iter()
                    .map(|c| (c, sampled_image(grid, flow, c)))
                    .collect();
                self.raw.extend(fresh);
                let mut hit = grid.empty();
                for c in cells.iter() {
                    for &h in &self.raw[&c] {
                        hit.insert(h);
                    }
                }
                grid.dilate(&hit, matches!(flow, DiscreteSemiflow::Rotation { .. }))
            }
        }
    }
}

fn check_cells(grid: &CellGrid, cells: &CellSet) -> Result<()> {
    if cells.universe() == grid.cell_count() {
        Ok(())
    } else {
        Err(Error::Malformed(format!(
            "cell set over {} cells used with a {}-cell grid",
            cells.universe(),
            grid.cell_count()
        )))
    }
}

/// Outer approximation of the image of a union of cells.
pub fn cell_image(grid: &CellGrid, flow: &DiscreteSemiflow, cells: &CellSet) -> Result<CellSet> {
    check_cells(grid, cells)?;
    Ok(ImageCache::new(grid, flow)?.image(cells))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub n: usize,
    pub cardinality: usize,
    /// `d(I_n; omega)` between cell-center sets, in cells; `None` when both are empty.
    pub distance_cells: Option<DistanceCells>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum DistanceCells {
    Finite(usize),
    #[serde(serialize_with = "serialize_infinite")]
    Infinite,
}

fn serialize_infinite<S: serde::Serializer>(s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str("inf")
}

impl DistanceCells {
    pub fn is_zero(&self) -> bool {
        matches!(self, DistanceCells::Finite(0))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OmegaResult {
    pub grid: CellGrid,
    pub omega: CellSet,
    pub preperiod: usize,
    pub period: usize,
    /// `I_0, .., I_{preperiod + period - 1}`.
    pub iterates: Vec<CellSet>,
    pub trace: Vec<TraceEntry>,
}

impl OmegaResult {
    pub fn cycle(&self) -> &[CellSet] {
        &self.iterates[self.preperiod..]
    }

    /// Trace distance scaled to box units: cells times `1 / m`.
    pub fn distance_value(&self, e: &TraceEntry) -> Option<f64> {
        e.distance_cells.map(|d| match d {
            DistanceCells::Finite(k) => k as f64 / self.grid.cells_per_axis() as f64,
            DistanceCells::Infinite => f64::INFINITY,
        })
    }

    /// The iterates as an eventually periodic net over the pseudo-metric space of the given cell centers.
    ///
    /// `cells` must contain every cell used by the iterates; distances are max-norm between centers.
    pub fn center_net(&self, cells: &[usize]) -> Result<FiniteNet> {
        let pos: HashMap<usize, usize> = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let centers: Vec<Point> = cells.iter().map(|&c| self.grid.center(c)).collect();
        let metric = FinitePseudoMetric::from_points(&centers);
        let relabel = |s: &CellSet| -> Result<BitSet> {
            BitSet::from_indices(cells.len(), s.iter().map(|c| pos.get(&c).copied().unwrap_or(usize::MAX)))
                .map_err(|_| Error::Precondition("center net is missing a cell used by the iterates".into()))
        };
        let preperiod = self.iterates[..self.preperiod].iter().map(relabel).collect::<Result<_>>()?;
        let cycle = self.cycle().iter().map(relabel).collect::<Result<_>>()?;
        FiniteNet::sequence(FiniteGround::metric_space(metric), preperiod, cycle)
    }
}

/// Chebyshev distance (in cells) from every cell to `target`, by breadth-first search.
fn distance_transform(grid: &CellGrid, target: &CellSet) -> Vec<Option<usize>> {
    let n = grid.cell_count();
    let mut dist = vec![None; n];
    let mut frontier: Vec<usize> = target.iter().collect();
    for &c in &frontier {
        dist[c] = Some(0);
    }
    let mut level = 0;
    while !frontier.is_empty() {
        level += 1;
        let mut next = Vec::new();
        for c in frontier {
            for nb in grid.dilate(&BitSet::singleton(n, c), false).iter() {
                if dist[nb].is_none() {
                    dist[nb] = Some(level);
                    next.push(nb);
                }
            }
        }
        frontier = next;
    }
    dist
}

fn trace_distance(dist: &[Option<usize>], omega: &CellSet, set: &CellSet) -> Option<DistanceCells> {
    match (set.is_empty(), omega.is_empty()) {
        (true, true) => None,
        (true, false) => Some(DistanceCells::Finite(0)),
        (false, true) => Some(DistanceCells::Infinite),
        (false, false) => Some(DistanceCells::Finite(
            set.iter().map(|c| dist[c].expect("grid is connected")).max().expect("nonempty"),
        )),
    }
}

/// Iterates `I_{n+1} = cell_image(I_n)` from `I_0 = e` until a set repeats.
pub fn omega_limit_cells(grid: &CellGrid, flow: &DiscreteSemiflow, e: &CellSet) -> Result<OmegaResult> {
    check_cells(grid, e)?;
    if e.is_empty() {
        return Err(Error::Precondition("initial cell set must be nonempty".into()));
    }
    let mut cache = ImageCache::new(grid, flow)?;
    let mut seen: HashMap<CellSet, usize> = HashMap::new();
    let mut iterates = Vec::new();
    let mut current = e.clone();
    let preperiod = loop {
        if let Some(&first) = seen.get(&current) {
            break first;
        }
        if iterates.len() >= MAX_ITERATIONS {
            return Err(Error::SizeLimit(format!("no cycle within {MAX_ITERATIONS} iterations")));
        }
        seen.insert(current.clone(), iterates.len());
        let next = cache.image(&current);
        iterates.push(std::mem::replace(&mut current, next));
    };
    let period = iterates.len() - preperiod;
    let omega = iterates[preperiod..].iter().fold(grid.empty(), |acc, s| acc.union(s));
    let dist = distance_transform(grid, &omega);
    let trace = (0..=preperiod + period)
        .map(|n| {
            let set = if n < iterates.len() { &iterates[n] } else { &iterates[preperiod + (n - preperiod) % period] };
            TraceEntry {
                n,
                cardinality: set.len(),
                distance_cells: trace_distance(&dist, &omega, set),
            }
        })
        .collect();
    Ok(OmegaResult {
        grid: *grid,
        omega,
        preperiod,
        period,
        iterates,
        trace,
    })
}

/// Whether `d(I_n; omega) = 0` for every traced `n >= preperiod`.
///
/// Iterates that are empty together with an empty omega count as converged.
pub fn attraction_trace_check(result: &OmegaResult) -> bool {
    result
        .trace
        .iter()
        .filter(|e| e.n >= result.preperiod)
        .all(|e| e.distance_cells.is_none_or(|d| d.is_zero()))
}

/// Parses a rotation angle such as `1/8`, `0.125` or `3`.
pub fn parse_angle(text: &str) -> Result<BigRational> {
    let t = text.trim();
    if let Ok(q) = t.parse::<BigRational>() {
        return Ok(q);
    }
    let (whole, frac) = t
        .split_once('.')
        .ok_or_else(|| Error::Malformed(format!("not a rational angle: {text:?}")))?;
    let digits = format!("{whole}{frac}");
    let num: BigInt = digits
        .parse()
        .map_err(|_| Error::Malformed(format!("not a rational angle: {text:?}")))?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Ok(BigRational::new(num, den))
}
