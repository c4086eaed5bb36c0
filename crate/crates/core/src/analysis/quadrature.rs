//! Gauss–Legendre rules, node sets over domains and low-discrepancy samples.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::field::ScalarField;
use crate::geometry::Domain;
use crate::{Error, Result};

/// Numerical integration settings shared by norms and moduli.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Gauss points per axis on each integration cell.
    pub points: usize,
    /// Base tiling level: cells of side `2^{-level}`.
    pub level: u32,
    /// Dyadic subdivision depth for cells cut by the boundary.
    pub boundary_depth: u32,
    /// Number of shift vectors sampled for moduli of smoothness.
    pub xi_samples: usize,
    /// Segment samples used to test `x + sξ ∈ D` on nonconvex domains.
    pub guard_samples: usize,
    pub seed: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            points: 6,
            level: 3,
            boundary_depth: 4,
            xi_samples: 1024,
            guard_samples: 8,
            seed: 0,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.points == 0 || self.points > 64 {
            return Err(Error::param("quadrature.points", "must lie in 1..=64"));
        }
        if self.xi_samples == 0 {
            return Err(Error::param("quadrature.xi_samples", "must be at least 1"));
        }
        if self.guard_samples == 0 {
            return Err(Error::param("quadrature.guard_samples", "must be at least 1"));
        }
        if self.level > 24 || self.boundary_depth > 16 {
            return Err(Error::param("quadrature.level", "tiling too fine"));
        }
        Ok(())
    }

    pub fn with_level(&self, level: u32) -> Self {
        QuadratureSpec {
            level,
            ..self.clone()
        }
    }
}

/// Gauss–Legendre nodes and weights on `[0, 1]` (weights sum to one).
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard.entry(n).or_insert_with(|| Arc::new(compute_gauss(n))).clone()
}

fn compute_gauss(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-like initial guess for the i-th root of P_n on [-1, 1].
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        // Map to [0, 1]; ascending order.
        nodes[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss rule on `[a, b]` split at the dyadic grid of `level` and at `cuts`.
pub fn composite_1d(a: f64, b: f64, level: u32, cuts: &[f64], points: usize) -> (Vec<f64>, Vec<f64>) {
    let mut knots = vec![a, b];
    let h = (-(level as f64)).exp2();
    let mut g = (a / h).floor() + 1.0;
    while g * h < b {
        knots.push(g * h);
        g += 1.0;
    }
    knots.extend(cuts.iter().copied().filter(|c| *c > a && *c < b));
    knots.sort_by(|x, y| x.total_cmp(y));
    knots.dedup_by(|x, y| (*x - *y).abs() <= 1e-15 * (1.0 + y.abs()));
    let rule = gauss_legendre(points);
    let mut nodes = Vec::with_capacity((knots.len() - 1) * points);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for w in knots.windows(2) {
        let len = w[1] - w[0];
        if len <= 0.0 {
            continue;
        }
        for (u, wt) in rule.0.iter().zip(&rule.1) {
            nodes.push(w[0] + len * u);
            weights.push(len * wt);
        }
    }
    (nodes, weights)
}

/// Weighted point cloud approximating integration over a set.
#[derive(Clone, Debug, Default)]
pub struct NodeSet {
    dim: usize,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl NodeSet {
    pub fn empty(dim: usize) -> Self {
        NodeSet {
            dim,
            points: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.points.chunks_exact(self.dim.max(1)).zip(self.weights.iter().copied())
    }

    fn push(&mut self, x: &[f64], w: f64) {
        self.points.extend_from_slice(x);
        self.weights.push(w);
    }

    /// Total weight (the measure of the integration set).
    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Tensor product of per-axis composite rules over the box `[lo, hi]`.
    pub fn for_box(lo: &[f64], hi: &[f64], level: u32, cuts: &[Vec<f64>], points: usize) -> Self {
        let d = lo.len();
        let axes: Vec<(Vec<f64>, Vec<f64>)> = (0..d)
            .map(|j| {
                let c = cuts.get(j).map(|v| v.as_slice()).unwrap_or(&[]);
                composite_1d(lo[j], hi[j], level, c, points)
            })
            .collect();
        let mut set = NodeSet::empty(d);
        if axes.iter().any(|a| a.0.is_empty()) {
            return set;
        }
        let total: usize = axes.iter().map(|a| a.0.len()).product();
        set.points.reserve(total * d);
        set.weights.reserve(total);
        let mut idx = vec![0usize; d];
        let mut x = vec![0.0; d];
        loop {
            let mut w = 1.0;
            for j in 0..d {
                x[j] = axes[j].0[idx[j]];
                w *= axes[j].1[idx[j]];
            }
            set.push(&x, w);
            let mut j = d;
            loop {
                if j == 0 {
                    return set;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < axes[j].0.len() {
                    break;
                }
                idx[j] = 0;
            }
        }
    }

    /// Node set for `D`: Gauss rules on cells inside `D`, subdivision plus midpoint rule at the boundary.
    pub fn for_domain(domain: &Domain, spec: &QuadratureSpec, cuts: &[Vec<f64>]) -> Self {
        let (lo, hi) = domain.bbox();
        if domain.is_box() {
            return Self::for_box(lo, hi, spec.level, cuts, spec.points);
        }
        let d = domain.dim();
        let h = (-(spec.level as f64)).exp2();
        let ilo: Vec<i64> = lo.iter().map(|v| (v / h).floor() as i64).collect();
        let ihi: Vec<i64> = hi.iter().map(|v| (v / h).ceil() as i64 - 1).collect();
        let mut set = NodeSet::empty(d);
        for nu in crate::geometry::index_box(&ilo, &ihi) {
            let a: Vec<f64> = nu.iter().map(|&v| v as f64 * h).collect();
            let b: Vec<f64> = nu.iter().map(|&v| (v + 1) as f64 * h).collect();
            set.add_tile(domain, &a, &b, spec, cuts, spec.boundary_depth);
        }
        set
    }

    fn add_tile(&mut self, domain: &Domain, a: &[f64], b: &[f64], spec: &QuadratureSpec, cuts: &[Vec<f64>], depth: u32) {
        if domain.open_box_inside(a, b) {
            let local_cuts: Vec<Vec<f64>> = (0..a.len())
                .map(|j| cuts.get(j).map_or_else(Vec::new, |c| c.clone()))
                .collect();
            // Level 0 grid lines never fall strictly inside a tile of side < 1.
            let tile = Self::for_box(a, b, 0, &local_cuts, spec.points);
            self.points.extend_from_slice(&tile.points);
            self.weights.extend_from_slice(&tile.weights);
            return;
        }
        if !domain.open_box_meets(a, b) {
            return;
        }
        if depth == 0 {
            let c: Vec<f64> = a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect();
            if domain.contains(&c) {
                let w: f64 = a.iter().zip(b).map(|(x, y)| y - x).product();
                self.push(&c, w);
            }
            return;
        }
        let d = a.len();
        for corner in 0..(1usize << d) {
            let mut lo = a.to_vec();
            let mut hi = b.to_vec();
            for j in 0..d {
                let mid = 0.5 * (a[j] + b[j]);
                if corner >> j & 1 == 0 {
                    hi[j] = mid;
                } else {
                    lo[j] = mid;
                }
            }
            self.add_tile(domain, &lo, &hi, spec, cuts, depth - 1);
        }
    }

    /// `∫ g` over the node set.
    pub fn integrate(&self, g: impl Fn(&[f64]) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * g(x)).sum()
    }

    /// `‖f‖_{L_p}` over the node set; `p = ∞` takes the maximum over nodes.
    pub fn lp_norm(&self, f: &(impl ScalarField + ?Sized), p: f64) -> Result<f64> {
        self.lp_norm_of(|x| f.value(x), p)
    }

    pub fn lp_norm_of(&self, g: impl Fn(&[f64]) -> f64, p: f64) -> Result<f64> {
        check_exponent(p)?;
        if p.is_infinite() {
            return Ok(self.iter().fold(0.0, |m, (x, _)| m.max(g(x).abs())));
        }
        let s: f64 = self.iter().map(|(x, w)| w * g(x).abs().powf(p)).sum();
        Ok(s.powf(1.0 / p))
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// Radical inverse of `i` in base `b`.
fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// First `n` Halton points in `[0,1)^d` with a seeded Cranley–Patterson rotation.
pub fn halton_points(d: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    const BASES: [u64; 6] = [2, 3, 5, 7, 11, 13];
    assert!(d <= BASES.len(), "dimension too large for the Halton table");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();
    (0..n as u64)
        .map(|i| {
            (0..d)
                .map(|j| (radical_inverse(i, BASES[j]) + shift[j]).fract())
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_is_exact_to_degree_2n_minus_1() {
        for n in 1..=12 {
            let g = gauss_legendre(n);
            for deg in 0..2 * n {
                let s: f64 = g.0.iter().zip(&g.1).map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!((s - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn unit_cube_norms() {
        let d = Domain::unit_cube(2);
        let nodes = NodeSet::for_domain(&d, &QuadratureSpec::default(), &[]);
        assert!((nodes.measure() - 1.0).abs() < 1e-12);
        let one = crate::FnField::new(2, |_| 1.0);
        assert!((nodes.lp_norm(&one, 2.0).unwrap() - 1.0).abs() < 1e-10);
        let x1 = crate::FnField::new(1, |x: &[f64]| x[0]);
        let n1 = NodeSet::for_domain(&Domain::unit_cube(1), &QuadratureSpec::default(), &[]);
        assert!((n1.lp_norm(&x1, 2.0).unwrap() - 3f64.powf(-0.5)).abs() < 1e-12);
        assert!(matches!(n1.lp_norm(&x1, 0.5), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn curved_domains_have_close_measure() {
        let spec = QuadratureSpec {
            boundary_depth: 6,
            ..Default::default()
        };
        let ball = Domain::ball(vec![0.5, 0.5], 0.5).unwrap();
        let m = NodeSet::for_domain(&ball, &spec, &[]).measure();
        assert!((m - std::f64::consts::PI / 4.0).abs() < 2e-3);
        let l = NodeSet::for_domain(&Domain::l_shape(), &spec, &[]).measure();
        assert!((l - 0.75).abs() < 1e-12);
        let s = NodeSet::for_domain(&Domain::staircase(), &spec, &[]).measure();
        // 1 + 1/4 + 1/16 + ... = 4/3, truncated by the tiling resolution.
        assert!((s - 4.0 / 3.0).abs() < 1e-3);
    }

    #[test]
    fn cuts_split_cells() {
        let (n, w) = composite_1d(0.0, 1.0, 0, &[0.3], 4);
        assert_eq!(n.len(), 8);
        let s: f64 = n.iter().zip(&w).filter(|(x, _)| **x < 0.3).map(|(_, w)| w).sum();
        assert!((s - 0.3).abs() < 1e-14);
    }

    #[test]
    fn halton_is_deterministic_and_spread() {
        let a = halton_points(2, 256, 9);
        let b = halton_points(2, 256, 9);
        assert_eq!(a, b);
        let mean: f64 = a.iter().map(|p| p[0]).sum::<f64>() / 256.0;
        assert!((mean - 0.5).abs() < 0.01);
    }
}
