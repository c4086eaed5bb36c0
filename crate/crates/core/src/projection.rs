//! Local L2-orthogonal polynomial projectors on axis-aligned boxes.
//!
//! Projection is carried out on the reference box `[0,1]^d` in an orthonormal
//! tensor Legendre frame and mapped back to global coordinates, so the result
//! commutes with affine pullbacks by construction.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::quadrature::composite_1d;
use crate::field::ScalarField;
use crate::polynomials::{indices, Polynomial};
use crate::{Error, Result};

/// Orthonormal shifted Legendre polynomial `L_n` on `[0,1]` in the monomial basis.
fn legendre_monomials(n: u32) -> Vec<f64> {
    // P_n(2u - 1) = Σ_k (-1)^{n+k} C(n,k) C(n+k,k) u^k
    let norm = (2.0 * n as f64 + 1.0).sqrt();
    (0..=n)
        .map(|k| {
            let sign = if (n + k).is_multiple_of(2) { 1.0 } else { -1.0 };
            norm * sign * crate::polynomials::binom(n, k) as f64 * crate::polynomials::binom(n + k, k) as f64
        })
        .collect()
}

fn legendre_values(u: f64, n: u32) -> Vec<f64> {
    let x = 2.0 * u - 1.0;
    let mut p = vec![1.0; n as usize + 1];
    if n >= 1 {
        p[1] = x;
    }
    for k in 2..=n as usize {
        p[k] = ((2 * k - 1) as f64 * x * p[k - 1] - (k - 1) as f64 * p[k - 2]) / k as f64;
    }
    p.iter()
        .enumerate()
        .map(|(k, v)| v * (2.0 * k as f64 + 1.0).sqrt())
        .collect()
}

/// Reference-box quadrature and basis table for one `(d, degree, points, subdivisions)`.
struct Table {
    /// Node coordinates, flat `n × d`.
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// Basis values, flat `n × card`.
    phi: Vec<f64>,
    /// `M[λ][μ]`: monomial coefficient of `u^μ` in `φ_λ`, flat `card × card`.
    to_monomial: Arc<Vec<f64>>,
}

fn monomial_matrix(d: usize, degree: u32) -> Arc<Vec<f64>> {
    type Key = (usize, u32);
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Vec<f64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry((d, degree))
        .or_insert_with(|| {
            let idx = indices(d, degree);
            let one_d: Vec<Vec<f64>> = (0..=degree).map(legendre_monomials).collect();
            let n = idx.len();
            let mut m = vec![0.0; n * n];
            for (a, lambda) in idx.iter().enumerate() {
                for (b, mu) in idx.iter().enumerate() {
                    if lambda.iter().zip(mu).all(|(l, u)| u <= l) {
                        m[a * n + b] = lambda
                            .iter()
                            .zip(mu)
                            .map(|(&l, &u)| one_d[l as usize][u as usize])
                            .product();
                    }
                }
            }
            Arc::new(m)
        })
        .clone()
}

fn basis_row(u: &[f64], degree: u32, idx: &[Vec<u32>], out: &mut Vec<f64>) {
    let per_axis: Vec<Vec<f64>> = u.iter().map(|&v| legendre_values(v, degree)).collect();
    out.clear();
    out.extend(
        idx.iter()
            .map(|lambda| lambda.iter().enumerate().map(|(j, &e)| per_axis[j][e as usize]).product::<f64>()),
    );
}

fn build_table(d: usize, degree: u32, axes: &[(Vec<f64>, Vec<f64>)]) -> Table {
    let idx = indices(d, degree);
    let total: usize = axes.iter().map(|a| a.0.len()).product();
    let mut nodes = Vec::with_capacity(total * d);
    let mut weights = Vec::with_capacity(total);
    let mut phi = Vec::with_capacity(total * idx.len());
    let mut i = vec![0usize; d];
    let mut u = vec![0.0; d];
    let mut row = Vec::new();
    'outer: loop {
        let mut w = 1.0;
        for j in 0..d {
            u[j] = axes[j].0[i[j]];
            w *= axes[j].1[i[j]];
        }
        nodes.extend_from_slice(&u);
        weights.push(w);
        basis_row(&u, degree, &idx, &mut row);
        phi.extend_from_slice(&row);
        let mut j = d;
        loop {
            if j == 0 {
                break 'outer;
            }
            j -= 1;
            i[j] += 1;
            if i[j] < axes[j].0.len() {
                break;
            }
            i[j] = 0;
        }
    }
    Table {
        nodes,
        weights,
        phi,
        to_monomial: monomial_matrix(d, degree),
    }
}

fn cached_table(d: usize, degree: u32, points: usize, subdivisions: u32) -> Arc<Table> {
    type Key = (usize, u32, usize, u32);
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Table>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry((d, degree, points, subdivisions))
        .or_insert_with(|| {
            let axis = composite_1d(0.0, 1.0, subdivisions, &[], points);
            Arc::new(build_table(d, degree, &vec![axis; d]))
        })
        .clone()
}

/// `P^{l,d}` on the box `Q = x⁰ + δ ρ I^d`: the L2(Q)-orthogonal projection onto `𝒫^{l,d}`.
#[derive(Clone, Debug)]
pub struct LocalProjector {
    lo: Vec<f64>,
    side: Vec<f64>,
    degree: u32,
    points: usize,
    subdivisions: u32,
}

impl LocalProjector {
    /// Minimum Gauss points per axis accepted for degree `l`.
    pub fn required_points(degree: u32) -> usize {
        2 * degree as usize + 2
    }

    pub fn new(x0: &[f64], delta: f64, rho: &[f64], degree: u32, points: usize) -> Result<Self> {
        if x0.len() != rho.len() || x0.is_empty() {
            return Err(Error::DimensionMismatch { expected: x0.len(), found: rho.len() });
        }
        if !(delta > 0.0) || rho.iter().any(|r| !(*r > 0.0)) {
            return Err(Error::param("projector.box", "δ and ρ must be positive"));
        }
        let side = rho.iter().map(|r| delta * r).collect();
        Self::from_parts(x0.to_vec(), side, degree, points)
    }

    pub fn on_box(lo: &[f64], hi: &[f64], degree: u32, points: usize) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(Error::DimensionMismatch { expected: lo.len(), found: hi.len() });
        }
        if lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
            return Err(Error::param("projector.box", "box must be nondegenerate"));
        }
        Self::from_parts(lo.to_vec(), lo.iter().zip(hi).map(|(a, b)| b - a).collect(), degree, points)
    }

    /// Projector on the dyadic cell `Q_{k,ν}`.
    pub fn for_cell(k: u32, nu: &[i64], degree: u32, points: usize) -> Result<Self> {
        let h = (-(k as f64)).exp2();
        Self::from_parts(nu.iter().map(|&v| v as f64 * h).collect(), vec![h; nu.len()], degree, points)
    }

    fn from_parts(lo: Vec<f64>, side: Vec<f64>, degree: u32, points: usize) -> Result<Self> {
        let required = Self::required_points(degree);
        if points < required {
            return Err(Error::QuadratureOrder {
                points,
                degree: degree as i32,
                required,
            });
        }
        Ok(LocalProjector {
            lo,
            side,
            degree,
            points,
            subdivisions: 0,
        })
    }

    /// Composite rule: `2^s` Gauss panels per axis.
    pub fn with_subdivisions(mut self, s: u32) -> Self {
        self.subdivisions = s;
        self
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.side).map(|(a, h)| a + h).collect()
    }

    fn to_global(&self, u: &[f64], x: &mut [f64]) {
        for j in 0..u.len() {
            x[j] = self.lo[j] + self.side[j] * u[j];
        }
    }

    /// Reference cuts: breakpoints of `f` strictly inside the box.
    fn local_cuts(&self, f: &(impl ScalarField + ?Sized)) -> Option<Vec<Vec<f64>>> {
        let mut any = false;
        let cuts: Vec<Vec<f64>> = (0..self.dim())
            .map(|j| {
                let c: Vec<f64> = f
                    .breakpoints(j)
                    .into_iter()
                    .map(|b| (b - self.lo[j]) / self.side[j])
                    .filter(|u| *u > 1e-14 && *u < 1.0 - 1e-14)
                    .collect();
                any |= !c.is_empty();
                c
            })
            .collect();
        any.then_some(cuts)
    }

    fn table_for(&self, f: &(impl ScalarField + ?Sized)) -> Arc<Table> {
        match self.local_cuts(f) {
            None => cached_table(self.dim(), self.degree, self.points, self.subdivisions),
            Some(cuts) => {
                let axes: Vec<(Vec<f64>, Vec<f64>)> = cuts
                    .iter()
                    .map(|c| composite_1d(0.0, 1.0, self.subdivisions, c, self.points))
                    .collect();
                Arc::new(build_table(self.dim(), self.degree, &axes))
            }
        }
    }

    /// Projection in reference coordinates `u = (x - lo) / side`.
    pub fn project_reference(&self, f: &(impl ScalarField + ?Sized)) -> Polynomial {
        let table = self.table_for(f);
        let d = self.dim();
        let n = indices(d, self.degree).len();
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; d];
        for (i, (u, w)) in table.nodes.chunks_exact(d).zip(&table.weights).enumerate() {
            self.to_global(u, &mut x);
            let v = w * f.value(&x);
            if v == 0.0 {
                continue;
            }
            for (ci, p) in c.iter_mut().zip(&table.phi[i * n..(i + 1) * n]) {
                *ci += v * p;
            }
        }
        let m = &table.to_monomial;
        let coeffs: Vec<f64> = (0..n).map(|b| (0..n).map(|a| c[a] * m[a * n + b]).sum()).collect();
        Polynomial::from_coeffs(d, self.degree, coeffs).expect("coefficient count matches")
    }

    /// `P f` in global coordinates.
    pub fn project(&self, f: &(impl ScalarField + ?Sized)) -> Polynomial {
        let shift: Vec<f64> = self.lo.iter().zip(&self.side).map(|(a, h)| -a / h).collect();
        let scale: Vec<f64> = self.side.iter().map(|h| 1.0 / h).collect();
        self.project_reference(f).affine_substitute(&shift, &scale)
    }

    /// `‖g‖_{L_p(Q)}` on the projector's own node set (cuts from `g`).
    pub fn lp_norm(&self, g: &(impl ScalarField + ?Sized), p: f64) -> Result<f64> {
        crate::analysis::quadrature::check_exponent(p)?;
        let table = self.table_for(g);
        let d = self.dim();
        let vol: f64 = self.side.iter().product();
        let mut x = vec![0.0; d];
        let mut acc: f64 = 0.0;
        for (u, w) in table.nodes.chunks_exact(d).zip(&table.weights) {
            self.to_global(u, &mut x);
            let v = g.value(&x).abs();
            if p.is_infinite() {
                acc = acc.max(v);
            } else {
                acc += w * vol * v.powf(p);
            }
        }
        Ok(if p.is_infinite() { acc } else { acc.powf(1.0 / p) })
    }
}

/// `P f` for the projector `P`.
pub fn local_project(projector: &LocalProjector, f: &(impl ScalarField + ?Sized)) -> Polynomial {
    projector.project(f)
}

/// Random piecewise-constant function on a `2^s`-per-axis grid of a box.
pub struct RoughField {
    lo: Vec<f64>,
    side: Vec<f64>,
    n: usize,
    values: Vec<f64>,
}

impl RoughField {
    pub fn random(lo: &[f64], hi: &[f64], s: u32, rng: &mut impl Rng) -> Self {
        let d = lo.len();
        let n = 1usize << s;
        RoughField {
            lo: lo.to_vec(),
            side: lo.iter().zip(hi).map(|(a, b)| b - a).collect(),
            n,
            values: (0..n.pow(d as u32)).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        }
    }
}

impl ScalarField for RoughField {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut idx = 0;
        for j in 0..x.len() {
            let u = (x[j] - self.lo[j]) / self.side[j];
            if !(0.0..=1.0).contains(&u) {
                return 0.0;
            }
            let i = ((u * self.n as f64) as usize).min(self.n - 1);
            idx = idx * self.n + i;
        }
        self.values[idx]
    }
}

/// Largest observed `‖Pf‖_p / ‖f‖_p` over random piecewise-constant `f`
/// aligned with the projector's composite rule.
pub fn stability_probe(projector: &LocalProjector, p: f64, trials: usize, seed: u64) -> Result<f64> {
    crate::analysis::quadrature::check_exponent(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hi = projector.hi();
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let f = RoughField::random(&projector.lo, &hi, projector.subdivisions, &mut rng);
        let pf = projector.project(&f);
        let num = projector.lp_norm(&pf, p)?;
        let den = projector.lp_norm(&f, p)?;
        if den > 0.0 {
            worst = worst.max(num / den);
        }
    }
    Ok(worst)
}
