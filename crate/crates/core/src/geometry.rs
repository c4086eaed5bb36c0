//! Domains, dyadic cells and cube chains.
//!
//! Dyadic cells are `Q_{k,ν} = 2^{-k}ν + 2^{-k}(0,1)^d`. Catalog domains answer
//! box queries exactly; predicate domains answer them by sampling.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::{Error, Result};

/// Integer shift `ν ∈ ℤ^d`.
pub type Shift = Vec<i64>;

/// Default sampling density (points per axis per cell) for predicate domains.
pub const PREDICATE_SAMPLES: usize = 16;

/// Serializable description of a catalog domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DomainSpec {
    UnitCube { dim: usize },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    LShape,
    Staircase,
    Scaled {
        origin: Vec<f64>,
        delta: f64,
        inner: std::boxed::Box<DomainSpec>,
    },
}

impl DomainSpec {
    pub fn dim(&self) -> usize {
        match self {
            DomainSpec::UnitCube { dim } => *dim,
            DomainSpec::Box { lo, .. } => lo.len(),
            DomainSpec::Ball { center, .. } => center.len(),
            DomainSpec::LShape | DomainSpec::Staircase => 2,
            DomainSpec::Scaled { inner, .. } => inner.dim(),
        }
    }
}

type Predicate = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

#[derive(Clone)]
enum Shape {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    LShape,
    Staircase,
    Scaled {
        origin: Vec<f64>,
        delta: f64,
        inner: std::boxed::Box<Domain>,
    },
    Predicate { pred: Predicate, samples: usize },
}

/// Bounded open set `D ⊂ ℝ^d` with a bounding box.
#[derive(Clone)]
pub struct Domain {
    dim: usize,
    shape: Shape,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Domain")
            .field("tag", &self.tag())
            .field("dim", &self.dim)
            .field("lo", &self.lo)
            .field("hi", &self.hi)
            .finish()
    }
}

impl Domain {
    pub fn unit_cube(dim: usize) -> Self {
        Self::axis_box(vec![0.0; dim], vec![1.0; dim]).expect("valid box")
    }

    pub fn axis_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::param("domain", "box corners must have equal nonzero length"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(Error::param("domain", "box must satisfy lo < hi on every axis"));
        }
        Ok(Domain {
            dim: lo.len(),
            shape: Shape::Box {
                lo: lo.clone(),
                hi: hi.clone(),
            },
            lo,
            hi,
        })
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() || !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::param("domain.radius", "ball needs a positive radius"));
        }
        Ok(Domain {
            dim: center.len(),
            lo: center.iter().map(|c| c - radius).collect(),
            hi: center.iter().map(|c| c + radius).collect(),
            shape: Shape::Ball { center, radius },
        })
    }

    /// `(0,1)^2` minus the closed quadrant `[1/2, 1]^2`.
    pub fn l_shape() -> Self {
        Domain {
            dim: 2,
            shape: Shape::LShape,
            lo: vec![0.0, 0.0],
            hi: vec![1.0, 1.0],
        }
    }

    /// Interior of the union of the squares `2^{-k}e_1 + 2^{-k}[0,1]^2`, `k ≥ 0`.
    ///
    /// Equivalently `{0 < x < 2, 0 < y < h(x)}` with `h(x) = 2^{e-1}` for the
    /// smallest integer `e` with `x ≤ 2^e`.
    pub fn staircase() -> Self {
        Domain {
            dim: 2,
            shape: Shape::Staircase,
            lo: vec![0.0, 0.0],
            hi: vec![2.0, 1.0],
        }
    }

    /// `origin + delta * inner`.
    pub fn scaled(origin: Vec<f64>, delta: f64, inner: Domain) -> Result<Self> {
        if origin.len() != inner.dim {
            return Err(Error::DimensionMismatch {
                expected: inner.dim,
                found: origin.len(),
            });
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::param("domain.delta", "scale must be positive"));
        }
        Ok(Domain {
            dim: inner.dim,
            lo: inner.lo.iter().zip(&origin).map(|(l, o)| o + delta * l).collect(),
            hi: inner.hi.iter().zip(&origin).map(|(h, o)| o + delta * h).collect(),
            shape: Shape::Scaled {
                origin,
                delta,
                inner: std::boxed::Box::new(inner),
            },
        })
    }

    /// Domain known only through a membership predicate; box queries are sampled.
    pub fn from_predicate<P>(lo: Vec<f64>, hi: Vec<f64>, pred: P) -> Result<Self>
    where
        P: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        let b = Self::axis_box(lo, hi)?;
        Ok(Domain {
            dim: b.dim,
            shape: Shape::Predicate {
                pred: Arc::new(pred),
                samples: PREDICATE_SAMPLES,
            },
            lo: b.lo,
            hi: b.hi,
        })
    }

    pub fn from_spec(spec: &DomainSpec) -> Result<Self> {
        match spec {
            DomainSpec::UnitCube { dim } => {
                if *dim == 0 || *dim > 3 {
                    return Err(Error::param("domain.dim", "dimension must be 1, 2 or 3"));
                }
                Ok(Self::unit_cube(*dim))
            }
            DomainSpec::Box { lo, hi } => Self::axis_box(lo.clone(), hi.clone()),
            DomainSpec::Ball { center, radius } => Self::ball(center.clone(), *radius),
            DomainSpec::LShape => Ok(Self::l_shape()),
            DomainSpec::Staircase => Ok(Self::staircase()),
            DomainSpec::Scaled {
                origin,
                delta,
                inner,
            } => Self::scaled(origin.clone(), *delta, Self::from_spec(inner)?),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bbox(&self) -> (&[f64], &[f64]) {
        (&self.lo, &self.hi)
    }

    pub fn tag(&self) -> &'static str {
        match &self.shape {
            Shape::Box { lo, hi } => {
                if lo.iter().all(|&v| v == 0.0) && hi.iter().all(|&v| v == 1.0) {
                    "unit-cube"
                } else {
                    "box"
                }
            }
            Shape::Ball { .. } => "ball",
            Shape::LShape => "l-shape",
            Shape::Staircase => "staircase",
            Shape::Scaled { .. } => "scaled",
            Shape::Predicate { .. } => "predicate",
        }
    }

    /// Box domains (and their scaled images) are exactly their own bounding box.
    pub fn is_box(&self) -> bool {
        match &self.shape {
            Shape::Box { .. } => true,
            Shape::Scaled { inner, .. } => inner.is_box(),
            _ => false,
        }
    }

    pub fn is_convex(&self) -> bool {
        match &self.shape {
            Shape::Box { .. } | Shape::Ball { .. } => true,
            Shape::Scaled { inner, .. } => inner.is_convex(),
            _ => false,
        }
    }

    /// Whether the domain answers box queries exactly.
    pub fn has_exact_oracle(&self) -> bool {
        match &self.shape {
            Shape::Predicate { .. } => false,
            Shape::Scaled { inner, .. } => inner.has_exact_oracle(),
            _ => true,
        }
    }

    /// `x ∈ D`.
    pub fn contains(&self, x: &[f64]) -> bool {
        match &self.shape {
            Shape::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| a < v && v < b),
            Shape::Ball { center, radius } => dist2(x, center) < radius * radius,
            Shape::LShape => {
                let (a, b) = (x[0], x[1]);
                a > 0.0 && b > 0.0 && a < 1.0 && b < 1.0 && (a < 0.5 || b < 0.5)
            }
            Shape::Staircase => {
                let (a, b) = (x[0], x[1]);
                a > 0.0 && a < 2.0 && b > 0.0 && b < stair_height(a)
            }
            Shape::Scaled {
                origin,
                delta,
                inner,
            } => {
                let y: Vec<f64> = x.iter().zip(origin).map(|(v, o)| (v - o) / delta).collect();
                inner.contains(&y)
            }
            Shape::Predicate { pred, .. } => pred(x),
        }
    }

    /// Closed box `[lo, hi] ⊂ D`.
    pub fn closed_box_inside(&self, lo: &[f64], hi: &[f64]) -> bool {
        match &self.shape {
            Shape::Box { lo: a, hi: b } => (0..self.dim).all(|j| lo[j] > a[j] && hi[j] < b[j]),
            Shape::Ball { center, radius } => far_corner2(center, lo, hi) < radius * radius,
            Shape::LShape => {
                lo[0] > 0.0
                    && lo[1] > 0.0
                    && hi[0] < 1.0
                    && hi[1] < 1.0
                    && (hi[0] < 0.5 || hi[1] < 0.5)
            }
            Shape::Staircase => lo[0] > 0.0 && hi[0] < 2.0 && lo[1] > 0.0 && hi[1] < stair_height(lo[0]),
            Shape::Scaled {
                origin,
                delta,
                inner,
            } => {
                let (l, h) = to_inner(origin, *delta, lo, hi);
                inner.closed_box_inside(&l, &h)
            }
            Shape::Predicate { pred, samples } => {
                grid_points(lo, hi, *samples, true).iter().all(|p| pred(p))
            }
        }
    }

    /// Open box `(lo, hi) ⊂ D`.
    pub fn open_box_inside(&self, lo: &[f64], hi: &[f64]) -> bool {
        match &self.shape {
            Shape::Box { lo: a, hi: b } => (0..self.dim).all(|j| lo[j] >= a[j] && hi[j] <= b[j]),
            Shape::Ball { center, radius } => far_corner2(center, lo, hi) <= radius * radius,
            Shape::LShape => {
                lo[0] >= 0.0
                    && lo[1] >= 0.0
                    && hi[0] <= 1.0
                    && hi[1] <= 1.0
                    && !(hi[0] > 0.5 && hi[1] > 0.5)
            }
            Shape::Staircase => {
                lo[0] >= 0.0 && hi[0] <= 2.0 && lo[1] >= 0.0 && hi[1] <= stair_height_right(lo[0])
            }
            Shape::Scaled {
                origin,
                delta,
                inner,
            } => {
                let (l, h) = to_inner(origin, *delta, lo, hi);
                inner.open_box_inside(&l, &h)
            }
            Shape::Predicate { pred, samples } => {
                grid_points(lo, hi, *samples, false).iter().all(|p| pred(p))
            }
        }
    }

    /// Open box `(lo, hi)` meets `D`. Equivalent to the closed box meeting `D`, as `D` is open.
    pub fn open_box_meets(&self, lo: &[f64], hi: &[f64]) -> bool {
        match &self.shape {
            Shape::Box { lo: a, hi: b } => (0..self.dim).all(|j| lo[j] < b[j] && hi[j] > a[j]),
            Shape::Ball { center, radius } => {
                let d2: f64 = (0..self.dim)
                    .map(|j| {
                        let c = center[j].clamp(lo[j], hi[j]);
                        (c - center[j]).powi(2)
                    })
                    .sum();
                d2 < radius * radius
            }
            Shape::LShape => {
                let a0 = lo[0].max(0.0);
                let a1 = lo[1].max(0.0);
                let b0 = hi[0].min(1.0);
                let b1 = hi[1].min(1.0);
                a0 < b0 && a1 < b1 && (a0 < 0.5 || a1 < 0.5)
            }
            Shape::Staircase => {
                lo[0] < 2.0 && hi[0] > 0.0 && hi[1] > 0.0 && lo[1] < stair_height(hi[0].min(2.0))
            }
            Shape::Scaled {
                origin,
                delta,
                inner,
            } => {
                let (l, h) = to_inner(origin, *delta, lo, hi);
                inner.open_box_meets(&l, &h)
            }
            Shape::Predicate { pred, samples } => {
                grid_points(lo, hi, *samples, false).iter().any(|p| pred(p))
            }
        }
    }

    /// Catalog description, when the domain came from the catalog.
    pub fn spec(&self) -> Option<DomainSpec> {
        Some(match &self.shape {
            Shape::Box { lo, hi } => {
                if self.tag() == "unit-cube" {
                    DomainSpec::UnitCube { dim: self.dim }
                } else {
                    DomainSpec::Box {
                        lo: lo.clone(),
                        hi: hi.clone(),
                    }
                }
            }
            Shape::Ball { center, radius } => DomainSpec::Ball {
                center: center.clone(),
                radius: *radius,
            },
            Shape::LShape => DomainSpec::LShape,
            Shape::Staircase => DomainSpec::Staircase,
            Shape::Scaled {
                origin,
                delta,
                inner,
            } => DomainSpec::Scaled {
                origin: origin.clone(),
                delta: *delta,
                inner: std::boxed::Box::new(inner.spec()?),
            },
            Shape::Predicate { .. } => return None,
        })
    }

    /// Range of shifts whose level-`k` support boxes (order `m`) can meet the bounding box.
    fn shift_range(&self, k: u32, reach: i64) -> (Shift, Shift) {
        let s = (k as f64).exp2();
        let lo = self.lo.iter().map(|v| (v * s).floor() as i64 - reach).collect();
        let hi = self.hi.iter().map(|v| (v * s).ceil() as i64).collect();
        (lo, hi)
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

fn far_corner2(center: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    (0..center.len())
        .map(|j| (center[j] - lo[j]).abs().max((hi[j] - center[j]).abs()).powi(2))
        .sum()
}

fn to_inner(origin: &[f64], delta: f64, lo: &[f64], hi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    (
        lo.iter().zip(origin).map(|(v, o)| (v - o) / delta).collect(),
        hi.iter().zip(origin).map(|(v, o)| (v - o) / delta).collect(),
    )
}

/// `h(x) = 2^{e-1}`, `e` the smallest integer with `x ≤ 2^e` (left-continuous).
fn stair_height(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let mut p = 1.0f64;
    while x > p {
        p *= 2.0;
    }
    while x <= p / 2.0 {
        p /= 2.0;
    }
    p / 2.0
}

/// Right limit `h(x+)`: smallest `e` with `x < 2^e`.
fn stair_height_right(x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    if x == 0.0 {
        return 0.0;
    }
    let mut p = 1.0f64;
    while x >= p {
        p *= 2.0;
    }
    while x < p / 2.0 {
        p /= 2.0;
    }
    p / 2.0
}

/// Sample points of a box: `n + 1` nodes per axis including faces, or `n` cell midpoints.
fn grid_points(lo: &[f64], hi: &[f64], n: usize, closed: bool) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = (0..lo.len())
        .map(|j| {
            let h = (hi[j] - lo[j]) / n as f64;
            if closed {
                (0..=n).map(|i| lo[j] + h * i as f64).collect()
            } else {
                (0..n).map(|i| lo[j] + h * (i as f64 + 0.5)).collect()
            }
        })
        .collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(lo.len());
    product(&axes, &mut cur, &mut out);
    out
}

fn product(axes: &[Vec<f64>], cur: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
    if cur.len() == axes.len() {
        out.push(cur.clone());
        return;
    }
    for &v in &axes[cur.len()] {
        cur.push(v);
        product(axes, cur, out);
        cur.pop();
    }
}

/// All integer points of `[lo, hi]` (inclusive) in lexicographic order.
pub fn index_box(lo: &[i64], hi: &[i64]) -> Vec<Shift> {
    let mut out = Vec::new();
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return out;
    }
    let mut cur = lo.to_vec();
    loop {
        out.push(cur.clone());
        let mut j = cur.len();
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if cur[j] < hi[j] {
                cur[j] += 1;
                for t in j + 1..cur.len() {
                    cur[t] = lo[t];
                }
                break;
            }
        }
    }
}

/// Corners of the open cell `Q_{k,ν}`.
pub fn cell_box(k: u32, nu: &[i64]) -> (Vec<f64>, Vec<f64>) {
    let h = (-(k as f64)).exp2();
    (
        nu.iter().map(|&v| v as f64 * h).collect(),
        nu.iter().map(|&v| (v + 1) as f64 * h).collect(),
    )
}

/// Support box `2^{-k}ν + 2^{-k}(m+1)[0,1]^d` of `g_{k,ν}^{m,d}`.
pub fn support_box(k: u32, m: usize, nu: &[i64]) -> (Vec<f64>, Vec<f64>) {
    let h = (-(k as f64)).exp2();
    (
        nu.iter().map(|&v| v as f64 * h).collect(),
        nu.iter().map(|&v| (v + m as i64 + 1) as f64 * h).collect(),
    )
}

/// `N_k^{d,m,D}`: shifts whose basis support meets `D`, in lexicographic order.
pub fn active_cells(domain: &Domain, k: u32, m: usize) -> Result<Vec<Shift>> {
    let (lo, hi) = domain.shift_range(k, m as i64 + 1);
    let cells: Vec<Shift> = index_box(&lo, &hi)
        .into_iter()
        .filter(|nu| {
            let (a, b) = support_box(k, m, nu);
            domain.open_box_meets(&a, &b)
        })
        .collect();
    if cells.is_empty() {
        return Err(Error::EmptyActiveSet(k));
    }
    Ok(cells)
}

/// `𝒩_k(D)`: shifts whose closed cell lies in `D`, in lexicographic order.
pub fn interior_cells(domain: &Domain, k: u32) -> Vec<Shift> {
    let (lo, hi) = domain.shift_range(k, 0);
    index_box(&lo, &hi)
        .into_iter()
        .filter(|nu| {
            let (a, b) = cell_box(k, nu);
            domain.closed_box_inside(&a, &b)
        })
        .collect()
}

/// Interior cells of one level with fast membership and nearest-cell search.
#[derive(Clone, Debug)]
pub struct InteriorSet {
    pub level: u32,
    cells: Vec<Shift>,
    lookup: HashSet<Shift>,
    lo: Shift,
    hi: Shift,
}

impl InteriorSet {
    pub fn new(domain: &Domain, k: u32) -> Self {
        Self::from_cells(k, interior_cells(domain, k))
    }

    pub fn from_cells(k: u32, cells: Vec<Shift>) -> Self {
        let d = cells.first().map_or(0, |c| c.len());
        let mut lo = vec![i64::MAX; d];
        let mut hi = vec![i64::MIN; d];
        for c in &cells {
            for j in 0..d {
                lo[j] = lo[j].min(c[j]);
                hi[j] = hi[j].max(c[j]);
            }
        }
        InteriorSet {
            level: k,
            lookup: cells.iter().cloned().collect(),
            cells,
            lo,
            hi,
        }
    }

    pub fn cells(&self) -> &[Shift] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, nu: &[i64]) -> bool {
        self.lookup.contains(nu)
    }

    /// `ν_k^D(ν)`: an ℓ∞-nearest interior shift, ties broken lexicographically.
    pub fn nearest(&self, nu: &[i64]) -> Result<Shift> {
        if self.cells.is_empty() {
            return Err(Error::NoInteriorCells(self.level));
        }
        if self.lookup.contains(nu) {
            return Ok(nu.to_vec());
        }
        let reach = (0..nu.len())
            .map(|j| (nu[j] - self.lo[j]).abs().max((nu[j] - self.hi[j]).abs()))
            .max()
            .unwrap_or(0);
        for r in 1..=reach {
            let lo: Shift = nu.iter().map(|v| v - r).collect();
            let hi: Shift = nu.iter().map(|v| v + r).collect();
            // Lexicographic scan of the cube; only the shell at radius r is new.
            for cand in index_box(&lo, &hi) {
                let on_shell = cand.iter().zip(nu).any(|(c, v)| (c - v).abs() == r);
                if on_shell && self.lookup.contains(&cand) {
                    return Ok(cand);
                }
            }
        }
        unreachable!("an interior cell lies within the searched radius")
    }
}

/// Convenience wrapper around [`InteriorSet::nearest`].
pub fn nearest_interior(domain: &Domain, k: u32, nu: &[i64]) -> Result<Shift> {
    InteriorSet::new(domain, k).nearest(nu)
}

/// Partition of `cells` by residue `ν mod (m+1)`.
pub fn color_classes(cells: &[Shift], m: usize) -> BTreeMap<Shift, Vec<Shift>> {
    let mut out: BTreeMap<Shift, Vec<Shift>> = BTreeMap::new();
    for c in cells {
        out.entry(color_of(c, m)).or_default().push(c.clone());
    }
    out
}

pub fn color_of(nu: &[i64], m: usize) -> Shift {
    nu.iter().map(|v| v.rem_euclid(m as i64 + 1)).collect()
}

/// Sequence of level-`k` cells joined by unit moves along coordinate axes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CubeChain {
    pub level: u32,
    pub cells: Vec<Shift>,
    /// `(axis, ±1)` for each move; `cells[i+1] = cells[i] + sign · e_axis`.
    pub moves: Vec<(usize, i8)>,
}

impl CubeChain {
    fn start(level: u32, cell: Shift) -> Self {
        CubeChain {
            level,
            cells: vec![cell],
            moves: Vec::new(),
        }
    }

    /// Number of moves `𝔍`.
    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn last(&self) -> &Shift {
        self.cells.last().expect("chain has a first cell")
    }

    /// Appends unit moves, in axis order, reaching a cell at ℓ∞ distance at most 1.
    fn step_to(&mut self, target: &[i64]) {
        let mut cur = self.last().clone();
        assert!(
            cur.iter().zip(target).all(|(a, b)| (a - b).abs() <= 1),
            "cells sharing a point differ by at most one per axis"
        );
        for j in 0..cur.len() {
            let diff = target[j] - cur[j];
            if diff != 0 {
                cur[j] += diff;
                self.moves.push((j, diff as i8));
                self.cells.push(cur.clone());
            }
        }
    }

    fn append(&mut self, other: &CubeChain) {
        self.step_to(&other.cells[0]);
        for (cell, mv) in other.cells[1..].iter().zip(&other.moves) {
            self.cells.push(cell.clone());
            self.moves.push(*mv);
        }
    }
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coordinate")
}

fn floor_int(x: &BigRational) -> BigInt {
    x.floor().to_integer()
}

/// Entry cell at `y` for a walk in direction `eta`: faces are resolved toward the motion.
fn entry_cell(y: &[BigRational], eta: &[BigRational]) -> Vec<BigInt> {
    y.iter()
        .zip(eta)
        .map(|(v, e)| {
            if v.is_integer() {
                let c = v.to_integer();
                if e.is_negative() {
                    c - 1
                } else {
                    c
                }
            } else {
                floor_int(v)
            }
        })
        .collect()
}

fn to_shift(v: &[BigInt]) -> Shift {
    v.iter()
        .map(|b| i64::try_from(b).expect("cell index fits in i64"))
        .collect()
}

/// Chain of level-`k` cells following the segment `x0 + tξ`, `t ∈ [0,1]`.
///
/// Computed in exact rational arithmetic in the scaled coordinates `y = 2^k x`.
pub fn segment_chain(k: u32, x0: &[f64], xi: &[f64]) -> CubeChain {
    let scale = BigRational::from_integer(BigInt::one() << k as usize);
    let y0: Vec<BigRational> = x0.iter().map(|&v| rational(v) * &scale).collect();
    let eta: Vec<BigRational> = xi.iter().map(|&v| rational(v) * &scale).collect();
    let one = BigRational::one();

    let mut n = entry_cell(&y0, &eta);
    let mut chain = CubeChain::start(k, to_shift(&n));
    if eta.iter().all(|e| e.is_zero()) {
        return chain;
    }
    loop {
        // Largest t keeping y(t) in the closed current cell.
        let mut t_exit: Option<BigRational> = None;
        for j in 0..y0.len() {
            if eta[j].is_zero() {
                continue;
            }
            let face = if eta[j].is_positive() {
                BigRational::from_integer(&n[j] + 1)
            } else {
                BigRational::from_integer(n[j].clone())
            };
            let t = (face - &y0[j]) / &eta[j];
            if t_exit.as_ref().is_none_or(|cur| &t < cur) {
                t_exit = Some(t);
            }
        }
        let t = t_exit.expect("nonzero direction");
        if t >= one {
            break;
        }
        let y: Vec<BigRational> = y0.iter().zip(&eta).map(|(a, e)| a + e * &t).collect();
        let next = entry_cell(&y, &eta);
        chain.step_to(&to_shift(&next));
        n = next;
    }
    chain
}

/// Violations reported by [`validate_chain`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChainViolation {
    #[error("chain is empty")]
    Empty,
    #[error("start point is not in the closed first cell")]
    Start,
    #[error("end point is not in the closed last cell")]
    End,
    #[error("move {0} is not a unit coordinate step")]
    Step(usize),
    #[error("cell {0} is farther than one cell from every cell met by the segment")]
    Proximity(usize),
}

fn in_closed_cell(y: &[BigRational], cell: &[i64]) -> bool {
    y.iter().zip(cell).all(|(v, &c)| {
        let lo = BigRational::from_integer(BigInt::from(c));
        let hi = BigRational::from_integer(BigInt::from(c + 1));
        &lo <= v && v <= &hi
    })
}

/// Whether `y0 + tη`, `t ∈ [0,1]`, meets the closed box `[lo, hi]`.
fn segment_meets_box(y0: &[BigRational], eta: &[BigRational], lo: &[BigRational], hi: &[BigRational]) -> bool {
    let mut t0 = BigRational::zero();
    let mut t1 = BigRational::one();
    for j in 0..y0.len() {
        if eta[j].is_zero() {
            if y0[j] < lo[j] || y0[j] > hi[j] {
                return false;
            }
            continue;
        }
        let a = (&lo[j] - &y0[j]) / &eta[j];
        let b = (&hi[j] - &y0[j]) / &eta[j];
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if a > t0 {
            t0 = a;
        }
        if b < t1 {
            t1 = b;
        }
        if t0 > t1 {
            return false;
        }
    }
    true
}

/// Exact check of the chain properties for the segment from `x0` to `x0 + ξ` at level `k`.
pub fn validate_chain(chain: &CubeChain, x0: &[f64], xi: &[f64]) -> std::result::Result<(), ChainViolation> {
    if chain.cells.is_empty() {
        return Err(ChainViolation::Empty);
    }
    let scale = BigRational::from_integer(BigInt::one() << chain.level as usize);
    let y0: Vec<BigRational> = x0.iter().map(|&v| rational(v) * &scale).collect();
    let eta: Vec<BigRational> = xi.iter().map(|&v| rational(v) * &scale).collect();
    let y1: Vec<BigRational> = y0.iter().zip(&eta).map(|(a, b)| a + b).collect();
    if !in_closed_cell(&y0, &chain.cells[0]) {
        return Err(ChainViolation::Start);
    }
    if !in_closed_cell(&y1, chain.last()) {
        return Err(ChainViolation::End);
    }
    if chain.moves.len() + 1 != chain.cells.len() {
        return Err(ChainViolation::Step(chain.moves.len()));
    }
    for (i, (&(axis, sign), pair)) in chain.moves.iter().zip(chain.cells.windows(2)).enumerate() {
        let ok = (sign == 1 || sign == -1)
            && (0..pair[0].len()).all(|j| {
                let want = if j == axis { pair[0][j] + sign as i64 } else { pair[0][j] };
                pair[1][j] == want
            });
        if !ok {
            return Err(ChainViolation::Step(i));
        }
    }
    for (i, cell) in chain.cells.iter().enumerate() {
        let lo: Vec<BigRational> = cell.iter().map(|&c| BigRational::from_integer(BigInt::from(c - 1))).collect();
        let hi: Vec<BigRational> = cell.iter().map(|&c| BigRational::from_integer(BigInt::from(c + 2))).collect();
        if !segment_meets_box(&y0, &eta, &lo, &hi) {
            return Err(ChainViolation::Proximity(i));
        }
    }
    Ok(())
}

fn cell_center(k: u32, nu: &[i64]) -> Vec<f64> {
    let h = (-(k as f64)).exp2();
    nu.iter().map(|&v| (v as f64 + 0.5) * h).collect()
}

fn chain_inside(domain: &Domain, chain: &CubeChain) -> bool {
    chain.cells.iter().all(|c| {
        let (a, b) = cell_box(chain.level, c);
        domain.closed_box_inside(&a, &b)
    })
}

fn path_chain(level: u32, points: &[Vec<f64>]) -> CubeChain {
    let mut chain: Option<CubeChain> = None;
    for w in points.windows(2) {
        let xi: Vec<f64> = w[1].iter().zip(&w[0]).map(|(b, a)| b - a).collect();
        let leg = segment_chain(level, &w[0], &xi);
        match chain.as_mut() {
            None => chain = Some(leg),
            Some(c) => c.append(&leg),
        }
    }
    chain.expect("at least one leg")
}

/// Chain of level-`(k+kappa)` cells inside `D` from `Q̄_{k,ν}` to `Q̄_{k,ν'}`.
///
/// Tries the straight path between cell centers, then axis-aligned paths
/// through the corner cells; returns `None` when every candidate leaves `D`.
pub fn interior_chain(domain: &Domain, k: u32, nu: &[i64], nu2: &[i64], kappa: u32) -> Option<CubeChain> {
    let level = k + kappa;
    let a = cell_center(k, nu);
    let b = cell_center(k, nu2);
    let mut candidates = vec![vec![a.clone(), b.clone()]];
    let d = nu.len();
    for order in [(0..d).collect::<Vec<_>>(), (0..d).rev().collect()] {
        let mut pts = vec![a.clone()];
        let mut cur = a.clone();
        for j in order {
            if cur[j] != b[j] {
                cur[j] = b[j];
                pts.push(cur.clone());
            }
        }
        if pts.len() > 2 && !candidates.contains(&pts) {
            candidates.push(pts);
        }
    }
    candidates
        .into_iter()
        .map(|pts| path_chain(level, &pts))
        .find(|c| chain_inside(domain, c))
}

/// Smallest refinement `kappa ≤ kappa_max` admitting an interior chain.
pub fn interior_chain_search(
    domain: &Domain,
    k: u32,
    nu: &[i64],
    nu2: &[i64],
    kappa_max: u32,
) -> Option<(u32, CubeChain)> {
    (0..=kappa_max).find_map(|kappa| interior_chain(domain, k, nu, nu2, kappa).map(|c| (kappa, c)))
}

/// Per-level result of the domain-regularity probe.
#[derive(Clone, Debug, Serialize)]
pub struct LevelProbe {
    pub level: u32,
    pub active: usize,
    pub interior: usize,
    pub gamma: f64,
    pub pairs: usize,
    pub max_kappa: u32,
    /// Largest `𝔍 / ‖ν - ν'‖∞`; `None` when some pair had no chain.
    pub chain_ratio: Option<f64>,
}

/// Empirical regularity constants of a domain.
#[derive(Clone, Debug, Serialize)]
pub struct EtypeReport {
    pub k0: Option<u32>,
    pub gamma0: Option<f64>,
    /// `None` encodes an infinite estimate (some chain search failed).
    pub c0: Option<f64>,
    pub kappa_max: u32,
    pub levels: Vec<LevelProbe>,
    pub failures: Vec<String>,
}

impl EtypeReport {
    pub fn passed(&self) -> bool {
        self.k0.is_some() && self.c0.is_some() && self.failures.is_empty()
    }
}

/// Probes both regularity conditions over `levels` with chain refinement up to `kappa_max`.
pub fn etype_probe(
    domain: &Domain,
    levels: std::ops::RangeInclusive<u32>,
    kappa_max: u32,
    pairs_per_level: usize,
    seed: u64,
) -> EtypeReport {
    let mut report = EtypeReport {
        k0: None,
        gamma0: None,
        c0: Some(0.0),
        kappa_max,
        levels: Vec::new(),
        failures: Vec::new(),
    };
    let sets: Vec<(u32, InteriorSet)> = levels.clone().map(|k| (k, InteriorSet::new(domain, k))).collect();
    // First level from which every probed level has interior cells.
    let mut k0 = None;
    for (k, set) in sets.iter().rev() {
        if set.is_empty() {
            break;
        }
        k0 = Some(*k);
    }
    report.k0 = k0;
    let Some(k0) = k0 else {
        report.c0 = None;
        report.failures.push("no level in range has interior cells".into());
        return report;
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gamma0: f64 = 0.0;
    for (k, set) in sets.iter().filter(|(k, _)| *k >= k0) {
        let active = match active_cells(domain, *k, 0) {
            Ok(a) => a,
            Err(e) => {
                report.failures.push(format!("level {k}: {e}"));
                continue;
            }
        };
        let mut gamma: f64 = 0.0;
        for nu in &active {
            let near = set.nearest(nu).expect("interior set is nonempty");
            let g = (0..nu.len())
                .map(|j| (near[j] - nu[j]).abs().max((near[j] + 1 - nu[j]).abs()))
                .max()
                .unwrap_or(0);
            gamma = gamma.max(g as f64);
        }
        gamma0 = gamma0.max(gamma);

        let cells = set.cells();
        let mut ratio: Option<f64> = Some(0.0);
        let mut max_kappa = 0;
        for _ in 0..pairs_per_level {
            let a = &cells[rng.gen_range(0..cells.len())];
            let b = &cells[rng.gen_range(0..cells.len())];
            if a == b {
                continue;
            }
            let dist = a.iter().zip(b).map(|(x, y)| (x - y).abs()).max().unwrap_or(0) as f64;
            match interior_chain_search(domain, *k, a, b, kappa_max) {
                Some((kappa, chain)) => {
                    max_kappa = max_kappa.max(kappa);
                    if let Some(r) = ratio.as_mut() {
                        *r = r.max(chain.len() as f64 / dist);
                    }
                }
                None => {
                    ratio = None;
                    report
                        .failures
                        .push(format!("level {k}: no interior chain {a:?} -> {b:?} up to refinement {kappa_max}"));
                }
            }
        }
        report.c0 = match (report.c0, ratio) {
            (Some(c), Some(r)) => Some(c.max(r)),
            _ => None,
        };
        report.levels.push(LevelProbe {
            level: *k,
            active: active.len(),
            interior: cells.len(),
            gamma,
            pairs: pairs_per_level,
            max_kappa,
            chain_ratio: ratio,
        });
    }
    report.gamma0 = Some(gamma0);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use std::collections::VecDeque;

    #[test]
    fn active_cells_examples() {
        let d = Domain::unit_cube(1);
        assert_eq!(active_cells(&d, 1, 1).unwrap(), vec![vec![-1], vec![0], vec![1]]);
        for dim in 1..=2 {
            let d = Domain::unit_cube(dim);
            for k in 0..=4u32 {
                for m in 0..=3usize {
                    let n = active_cells(&d, k, m).unwrap().len();
                    assert_eq!(n, (2usize.pow(k) + m).pow(dim as u32));
                }
            }
        }
    }

    #[test]
    fn scaled_domain_cells_are_images() {
        let inner = Domain::unit_cube(2);
        let d = Domain::scaled(vec![0.5, 0.25], 0.5, inner.clone()).unwrap();
        let a = active_cells(&inner, 2, 1).unwrap();
        let b = active_cells(&d, 3, 1).unwrap();
        let mapped: Vec<Shift> = a.iter().map(|v| vec![v[0] + 4, v[1] + 2]).collect();
        assert_eq!(b, mapped);
        let ia = interior_cells(&inner, 3);
        let ib = interior_cells(&d, 4);
        assert_eq!(ib, ia.iter().map(|v| vec![v[0] + 8, v[1] + 4]).collect::<Vec<_>>());
    }

    #[test]
    fn interior_cells_of_cube() {
        let d = Domain::unit_cube(2);
        assert_eq!(interior_cells(&d, 2), vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
        assert!(interior_cells(&d, 1).is_empty());
        assert!(interior_cells(&d, 0).is_empty());
        for dim in 1..=3usize {
            let d = Domain::unit_cube(dim);
            for k in 2..=4u32 {
                assert_eq!(interior_cells(&d, k).len(), (2usize.pow(k) - 2).pow(dim as u32));
            }
        }
    }

    #[test]
    fn interior_within_active() {
        for d in [Domain::unit_cube(2), Domain::ball(vec![0.5, 0.5], 0.5).unwrap(), Domain::l_shape(), Domain::staircase()] {
            for k in 1..=4 {
                for m in 0..=2 {
                    let act: HashSet<Shift> = active_cells(&d, k, m).unwrap().into_iter().collect();
                    assert!(interior_cells(&d, k).iter().all(|c| act.contains(c)));
                }
            }
        }
    }

    #[test]
    fn active_cells_monotone_under_inclusion() {
        let small = Domain::ball(vec![0.5, 0.5], 0.3).unwrap();
        let big = Domain::unit_cube(2);
        let l = Domain::l_shape();
        for k in 1..=4 {
            let a: HashSet<Shift> = active_cells(&small, k, 2).unwrap().into_iter().collect();
            let b: HashSet<Shift> = active_cells(&big, k, 2).unwrap().into_iter().collect();
            let c: HashSet<Shift> = active_cells(&l, k, 2).unwrap().into_iter().collect();
            assert!(a.is_subset(&b));
            assert!(c.is_subset(&b));
        }
    }

    fn brute_nearest(cells: &[Shift], nu: &[i64]) -> Shift {
        let dist = |c: &Shift| c.iter().zip(nu).map(|(a, b)| (a - b).abs()).max().unwrap();
        let best = cells.iter().map(dist).min().unwrap();
        let mut ties: Vec<&Shift> = cells.iter().filter(|c| dist(c) == best).collect();
        ties.sort();
        ties[0].clone()
    }

    #[test]
    fn nearest_interior_examples() {
        let d = Domain::unit_cube(2);
        assert_eq!(nearest_interior(&d, 2, &[-1, 0]).unwrap(), vec![1, 1]);
        assert_eq!(nearest_interior(&d, 2, &[0, 3]).unwrap(), vec![1, 2]);
        assert_eq!(nearest_interior(&d, 2, &[2, 1]).unwrap(), vec![2, 1]);
        assert!(matches!(nearest_interior(&d, 1, &[0, 0]), Err(Error::NoInteriorCells(1))));
        for dom in [Domain::l_shape(), Domain::staircase(), Domain::ball(vec![0.0, 0.0], 1.0).unwrap()] {
            for k in 3..=4 {
                let set = InteriorSet::new(&dom, k);
                for nu in active_cells(&dom, k, 2).unwrap() {
                    assert_eq!(set.nearest(&nu).unwrap(), brute_nearest(set.cells(), &nu));
                }
            }
        }
    }

    #[test]
    fn staircase_oracles_agree_with_sampling() {
        let exact = Domain::staircase();
        let sampled = Domain::from_predicate(vec![0.0, 0.0], vec![2.0, 1.0], |x| Domain::staircase().contains(x)).unwrap();
        for k in 2..=4 {
            let a = interior_cells(&exact, k);
            let b = interior_cells(&sampled, k);
            assert_eq!(a, b, "level {k}");
            assert_eq!(active_cells(&exact, k, 1).unwrap(), active_cells(&sampled, k, 1).unwrap());
        }
        assert!(exact.contains(&[1.0, 0.3]));
        assert!(!exact.contains(&[1.0, 0.7]));
        assert!(exact.contains(&[1.5, 0.9]));
        assert!(!exact.contains(&[0.4, 0.3]));
    }

    #[test]
    fn l_shape_oracles_agree_with_sampling() {
        let exact = Domain::l_shape();
        let sampled = Domain::from_predicate(vec![0.0, 0.0], vec![1.0, 1.0], |x| Domain::l_shape().contains(x)).unwrap();
        for k in 2..=4 {
            assert_eq!(interior_cells(&exact, k), interior_cells(&sampled, k));
            assert_eq!(active_cells(&exact, k, 2).unwrap(), active_cells(&sampled, k, 2).unwrap());
        }
    }

    #[test]
    fn ball_interior_matches_corner_test() {
        let d = Domain::ball(vec![0.5, 0.5], 0.5).unwrap();
        for nu in interior_cells(&d, 4) {
            let (a, b) = cell_box(4, &nu);
            for c in [[a[0], a[1]], [a[0], b[1]], [b[0], a[1]], [b[0], b[1]]] {
                assert!(d.contains(&c));
            }
        }
    }

    #[test]
    fn color_classes_partition() {
        let cells: Vec<Shift> = (0..4).map(|v| vec![v]).collect();
        let cl = color_classes(&cells, 1);
        assert_eq!(cl[&vec![0]], vec![vec![0], vec![2]]);
        assert_eq!(cl[&vec![1]], vec![vec![1], vec![3]]);

        let d = Domain::unit_cube(2);
        let act = active_cells(&d, 3, 2).unwrap();
        let cl = color_classes(&act, 2);
        let total: usize = cl.values().map(|v| v.len()).sum();
        assert_eq!(total, act.len());
        let mut seen = HashSet::new();
        for class in cl.values() {
            for c in class {
                assert!(seen.insert(c.clone()));
            }
            // Open supports within a class are pairwise disjoint.
            for (i, a) in class.iter().enumerate() {
                for b in &class[i + 1..] {
                    let overlap = a.iter().zip(b).all(|(x, y)| (x - y).abs() < 3);
                    assert!(!overlap);
                }
            }
        }
    }

    #[test]
    fn class_sizes_scale_with_volume() {
        let d = Domain::unit_cube(2);
        let mut ratios = Vec::new();
        for k in 3..=6u32 {
            for class in color_classes(&active_cells(&d, k, 2).unwrap(), 2).values() {
                ratios.push(class.len() as f64 / 4f64.powi(k as i32));
            }
        }
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max / min <= 4.0);
    }

    #[test]
    fn segment_chain_examples() {
        let c = segment_chain(3, &[0.3, 0.2], &[0.0, 0.0]);
        assert_eq!(c.cells, vec![vec![2, 1]]);
        assert!(c.is_empty());

        let c = segment_chain(0, &[0.5], &[2.0]);
        assert_eq!(c.cells, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(c.len(), 2);
        validate_chain(&c, &[0.5], &[2.0]).unwrap();

        // Through a vertex: the diagonal move is split into two unit steps.
        let c = segment_chain(0, &[0.5, 0.5], &[1.0, 1.0]);
        assert_eq!(c.cells, vec![vec![0, 0], vec![1, 0], vec![1, 1]]);
        validate_chain(&c, &[0.5, 0.5], &[1.0, 1.0]).unwrap();

        // Start on a face moving backwards.
        let c = segment_chain(0, &[1.0], &[-0.5]);
        assert_eq!(c.cells, vec![vec![0]]);
    }

    #[test]
    fn validator_rejects_broken_chains() {
        let mut c = segment_chain(0, &[0.5], &[2.0]);
        c.cells[1] = vec![5];
        assert!(validate_chain(&c, &[0.5], &[2.0]).is_err());
        let c = CubeChain { level: 0, cells: vec![vec![3]], moves: vec![] };
        assert_eq!(validate_chain(&c, &[0.5], &[0.0]), Err(ChainViolation::Start));
    }

    fn bfs_distance(cells: &HashSet<Shift>, a: &Shift, b: &Shift) -> Option<usize> {
        let mut seen = HashSet::new();
        let mut q = VecDeque::from([(a.clone(), 0usize)]);
        seen.insert(a.clone());
        while let Some((c, dist)) = q.pop_front() {
            if &c == b {
                return Some(dist);
            }
            for j in 0..c.len() {
                for s in [-1, 1] {
                    let mut n = c.clone();
                    n[j] += s;
                    if cells.contains(&n) && seen.insert(n.clone()) {
                        q.push_back((n, dist + 1));
                    }
                }
            }
        }
        None
    }

    #[test]
    fn interior_chain_in_square() {
        let d = Domain::unit_cube(2);
        let c = interior_chain(&d, 2, &[1, 1], &[2, 2], 0).unwrap();
        assert_eq!(c.len(), 2);
        let set: HashSet<Shift> = interior_cells(&d, 2).into_iter().collect();
        assert_eq!(bfs_distance(&set, &vec![1, 1], &vec![2, 2]), Some(c.len()));
        let t = interior_chain(&d, 2, &[1, 2], &[1, 2], 0).unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn interior_chains_in_l_shape_follow_the_corner() {
        let d = Domain::l_shape();
        let k = 3;
        let set: HashSet<Shift> = interior_cells(&d, k).into_iter().collect();
        let (kappa, c) = interior_chain_search(&d, k, &[1, 5], &[5, 1], 3).unwrap();
        assert!(kappa <= 3);
        assert!(chain_inside(&d, &c));
        let bfs = bfs_distance(&set, &vec![1, 5], &vec![5, 1]).unwrap();
        if kappa == 0 {
            assert!(c.len() >= bfs);
        }
    }

    #[test]
    fn etype_probe_cube_and_ball() {
        let r = etype_probe(&Domain::unit_cube(2), 0..=5, 3, 40, 1);
        assert_eq!(r.k0, Some(2));
        assert!(r.passed(), "{:?}", r.failures);
        let b = etype_probe(&Domain::ball(vec![0.5, 0.5], 0.5).unwrap(), 0..=5, 3, 40, 1);
        assert!(b.passed(), "{:?}", b.failures);
        let s = etype_probe(&Domain::staircase(), 2..=5, 3, 40, 1);
        assert!(s.passed(), "{:?}", s.failures);
    }

    #[test]
    fn probe_constants_nonincreasing_in_refinement() {
        let d = Domain::staircase();
        let mut prev: Option<f64> = None;
        let mut prev_gamma = None;
        for kappa_max in 0..=3 {
            let r = etype_probe(&d, 2..=4, kappa_max, 30, 5);
            let c = r.c0.unwrap_or(f64::INFINITY);
            if let Some(p) = prev {
                assert!(c <= p);
            }
            if let Some(g) = prev_gamma {
                assert_eq!(r.gamma0, g);
            }
            prev = Some(c);
            prev_gamma = Some(r.gamma0);
        }
    }

    proptest! {
        #[test]
        fn random_segment_chains_are_valid(
            d in 1usize..=3,
            k in 0u32..=5,
            seed in any::<u64>(),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x0: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let xi: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let c = segment_chain(k, &x0, &xi);
            prop_assert!(validate_chain(&c, &x0, &xi).is_ok());
            let norm = xi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let bound = 4.0 * (d * d) as f64 * ((k as f64).exp2() * norm + 1.0);
            prop_assert!((c.len() as f64) <= bound);
        }
    }
}
