//! Spline fields `Σ_ν f_ν g_{k,ν}`, the quasi-interpolant `E_k`, the two-scale
//! prolongation `H_k`, detail operators and the color-class discretization.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::{Arc, Mutex};

use crate::bsplines::{refinement_coeffs, CardinalBSpline};
use crate::field::ScalarField;
use crate::geometry::{active_cells, color_of, index_box, Domain, InteriorSet, Shift};
use crate::polynomials::{falling, indices, lattice_interpolate, powers, Polynomial};
use crate::projection::LocalProjector;
use crate::{Error, Result};

const DUMP_HEADER: &str = "besov-field v1";

/// Element of `𝒫_k^{l,d,m}`: polynomial coefficients `f_ν` (global coordinates)
/// on a set of shifts, stored densely over their bounding index box.
#[derive(Clone, Debug, PartialEq)]
pub struct SplineField {
    dim: usize,
    level: u32,
    m: usize,
    degree: u32,
    lo: Shift,
    shape: Vec<usize>,
    present: Vec<bool>,
    coeffs: Vec<f64>,
}

impl SplineField {
    /// Zero field over `cells`.
    pub fn zeros(dim: usize, level: u32, m: usize, degree: u32, cells: &[Shift]) -> Self {
        let mut lo = vec![i64::MAX; dim];
        let mut hi = vec![i64::MIN; dim];
        for c in cells {
            for j in 0..dim {
                lo[j] = lo[j].min(c[j]);
                hi[j] = hi[j].max(c[j]);
            }
        }
        if cells.is_empty() {
            lo = vec![0; dim];
            hi = vec![-1; dim];
        }
        let shape: Vec<usize> = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1).max(0) as usize).collect();
        let n: usize = shape.iter().product();
        let card = indices(dim, degree).len();
        let mut f = SplineField {
            dim,
            level,
            m,
            degree,
            lo,
            shape,
            present: vec![false; n],
            coeffs: vec![0.0; n * card],
        };
        for c in cells {
            let i = f.slot(c).expect("cell inside its own bounding box");
            f.present[i] = true;
        }
        f
    }

    /// Field with the given coefficient polynomials (degree raised or checked against `degree`).
    pub fn from_map(dim: usize, level: u32, m: usize, degree: u32, map: &BTreeMap<Shift, Polynomial>) -> Result<Self> {
        let cells: Vec<Shift> = map.keys().cloned().collect();
        let mut f = Self::zeros(dim, level, m, degree, &cells);
        for (nu, p) in map {
            f.set(nu, p)?;
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn order(&self) -> usize {
        self.m
    }

    /// Degree bound of the coefficient polynomials.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    fn card(&self) -> usize {
        indices(self.dim, self.degree).len()
    }

    fn slot(&self, nu: &[i64]) -> Option<usize> {
        let mut i = 0usize;
        for j in 0..self.dim {
            let o = nu[j] - self.lo[j];
            if o < 0 || o as usize >= self.shape[j] {
                return None;
            }
            i = i * self.shape[j] + o as usize;
        }
        Some(i)
    }

    fn shift_of(&self, mut i: usize) -> Shift {
        let mut nu = vec![0; self.dim];
        for j in (0..self.dim).rev() {
            nu[j] = self.lo[j] + (i % self.shape[j]) as i64;
            i /= self.shape[j];
        }
        nu
    }

    /// Shifts carrying a coefficient, in lexicographic order.
    pub fn cells(&self) -> Vec<Shift> {
        (0..self.present.len()).filter(|&i| self.present[i]).map(|i| self.shift_of(i)).collect()
    }

    pub fn len(&self) -> usize {
        self.present.iter().filter(|p| **p).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, nu: &[i64]) -> bool {
        self.slot(nu).is_some_and(|i| self.present[i])
    }

    pub fn coeff_slice(&self, nu: &[i64]) -> Option<&[f64]> {
        let c = self.card();
        self.slot(nu).filter(|&i| self.present[i]).map(|i| &self.coeffs[i * c..(i + 1) * c])
    }

    pub fn get(&self, nu: &[i64]) -> Option<Polynomial> {
        self.coeff_slice(nu)
            .map(|s| Polynomial::from_coeffs(self.dim, self.degree, s.to_vec()).expect("card matches"))
    }

    /// Overwrite `f_ν`; `ν` must be one of the field's shifts.
    pub fn set(&mut self, nu: &[i64], p: &Polynomial) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: p.dim() });
        }
        if p.degree() > self.degree as i32 {
            return Err(Error::param("field.degree", "coefficient degree exceeds the field's bound"));
        }
        let c = self.card();
        let i = self
            .slot(nu)
            .filter(|&i| self.present[i])
            .ok_or_else(|| Error::param("field.cell", "shift is not part of the field"))?;
        let q = p.with_degree(self.degree);
        self.coeffs[i * c..(i + 1) * c].copy_from_slice(q.coeffs());
        Ok(())
    }

    fn accumulate(&mut self, nu: &[i64], src: &[f64], w: f64) {
        let c = self.card();
        if let Some(i) = self.slot(nu).filter(|&i| self.present[i]) {
            for (a, b) in self.coeffs[i * c..(i + 1) * c].iter_mut().zip(src) {
                *a += w * b;
            }
        }
    }

    /// Per-axis B-spline values `2^{kr} ψ^{(r)}(2^k x_j - ν_j)` for `ν_j ∈ c_j - m ..= c_j`.
    fn axis_values(&self, x: &[f64], lambda: Option<&[u32]>) -> (Vec<i64>, Vec<Vec<f64>>) {
        let s = CardinalBSpline::get(self.m).expect("order validated at construction");
        let scale = (self.level as f64).exp2();
        let mut base = Vec::with_capacity(self.dim);
        let mut vals = Vec::with_capacity(self.dim);
        for j in 0..self.dim {
            let y = scale * x[j];
            let c = y.floor() as i64;
            let r = lambda.map_or(0, |l| l[j] as usize);
            let f = scale.powi(r as i32);
            base.push(c - self.m as i64);
            vals.push((0..=self.m).map(|t| f * s.eval(y - (c - self.m as i64 + t as i64) as f64, r)).collect());
        }
        (base, vals)
    }

    /// Sum over the `(m+1)^d` shifts whose support contains `x`.
    fn gather(&self, x: &[f64], basis_lambda: Option<&[u32]>, mono: &[f64]) -> f64 {
        let (base, vals) = self.axis_values(x, basis_lambda);
        let c = self.card();
        let n = self.m + 1;
        let mut t = vec![0usize; self.dim];
        let mut nu = vec![0i64; self.dim];
        let mut total = 0.0;
        'outer: loop {
            let mut g = 1.0;
            for j in 0..self.dim {
                nu[j] = base[j] + t[j] as i64;
                g *= vals[j][t[j]];
            }
            if g != 0.0 {
                if let Some(i) = self.slot(&nu).filter(|&i| self.present[i]) {
                    let coeffs = &self.coeffs[i * c..(i + 1) * c];
                    let fv: f64 = coeffs.iter().zip(mono).map(|(a, b)| a * b).sum();
                    total += fv * g;
                }
            }
            let mut j = self.dim;
            loop {
                if j == 0 {
                    break 'outer;
                }
                j -= 1;
                t[j] += 1;
                if t[j] < n {
                    break;
                }
                t[j] = 0;
            }
        }
        total
    }

    /// Values of `𝒟^μ x^β` for every monomial `β` of the field's degree.
    fn monomials(&self, x: &[f64], mu: &[u32]) -> Vec<f64> {
        let pw = powers(x, self.degree);
        indices(self.dim, self.degree)
            .iter()
            .map(|beta| {
                beta.iter()
                    .enumerate()
                    .map(|(j, &b)| {
                        if mu[j] > b {
                            0.0
                        } else {
                            falling(b, mu[j]) * pw[j][(b - mu[j]) as usize]
                        }
                    })
                    .product()
            })
            .collect()
    }

    /// `F(x) = Σ_ν f_ν(x) g_{k,ν}(x)`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let mono = self.monomials(x, &vec![0; self.dim]);
        self.gather(x, None, &mono)
    }

    /// `𝒟^λ F(x)` by the product rule; `λ_j ≤ m` on every axis.
    pub fn eval_derivative(&self, x: &[f64], lambda: &[u32]) -> Result<f64> {
        if lambda.len() != self.dim || x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: lambda.len().min(x.len()) });
        }
        if lambda.iter().any(|&r| r as usize > self.m) {
            return Err(Error::DerivativeOutOfRange { order: lambda.to_vec(), m: self.m });
        }
        let mut total = 0.0;
        // μ ranges over the box 0 ≤ μ ≤ λ.
        let lo = vec![0i64; self.dim];
        let hi: Vec<i64> = lambda.iter().map(|&v| v as i64).collect();
        for mu in index_box(&lo, &hi) {
            let mu: Vec<u32> = mu.iter().map(|&v| v as u32).collect();
            let weight: f64 = lambda
                .iter()
                .zip(&mu)
                .map(|(&l, &u)| crate::polynomials::binom(l, u) as f64)
                .product();
            let rest: Vec<u32> = lambda.iter().zip(&mu).map(|(l, u)| l - u).collect();
            let mono = self.monomials(x, &mu);
            total += weight * self.gather(x, Some(&rest), &mono);
        }
        Ok(total)
    }

    /// `(union of supports)`: the box `2^{-k}[lo, hi + m + 1]`.
    pub fn support_bbox(&self) -> (Vec<f64>, Vec<f64>) {
        let h = (-(self.level as f64)).exp2();
        let lo = self.lo.iter().map(|&v| v as f64 * h).collect();
        let hi = self
            .lo
            .iter()
            .zip(&self.shape)
            .map(|(&a, &n)| (a + n as i64 + self.m as i64) as f64 * h)
            .collect();
        (lo, hi)
    }

    /// `‖F‖_{L_p(ℝ^d)}` by Gauss rules on every knot cell of the support box.
    pub fn lp_norm_full(&self, p: f64, points: usize) -> Result<f64> {
        crate::analysis::quadrature::check_exponent(p)?;
        if self.is_empty() {
            return Ok(0.0);
        }
        let (lo, hi) = self.support_bbox();
        let nodes = crate::analysis::quadrature::NodeSet::for_box(&lo, &hi, self.level, &[], points);
        nodes.lp_norm(self, p)
    }

    /// `‖𝒟^λ F‖_{L_p(ℝ^d)}`.
    pub fn derivative_norm_full(&self, lambda: &[u32], p: f64, points: usize) -> Result<f64> {
        crate::analysis::quadrature::check_exponent(p)?;
        if self.is_empty() {
            return Ok(0.0);
        }
        let (lo, hi) = self.support_bbox();
        let nodes = crate::analysis::quadrature::NodeSet::for_box(&lo, &hi, self.level, &[], points);
        let err = std::cell::Cell::new(false);
        let v = nodes.lp_norm_of(
            |x| {
                self.eval_derivative(x, lambda).unwrap_or_else(|_| {
                    err.set(true);
                    0.0
                })
            },
            p,
        )?;
        if err.get() {
            return Err(Error::DerivativeOutOfRange { order: lambda.to_vec(), m: self.m });
        }
        Ok(v)
    }

    fn check_compatible(&self, other: &SplineField) -> Result<()> {
        if self.dim != other.dim || self.level != other.level || self.m != other.m || self.degree != other.degree {
            return Err(Error::param("field", "fields differ in dimension, level, order or degree"));
        }
        Ok(())
    }

    /// `a·self + b·other` over the union of both shift sets.
    pub fn combine(&self, a: f64, other: &SplineField, b: f64) -> Result<SplineField> {
        self.check_compatible(other)?;
        let mut cells = self.cells();
        cells.extend(other.cells());
        cells.sort();
        cells.dedup();
        let mut out = SplineField::zeros(self.dim, self.level, self.m, self.degree, &cells);
        for (f, w) in [(self, a), (other, b)] {
            for nu in f.cells() {
                out.accumulate(&nu, f.coeff_slice(&nu).expect("present"), w);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SplineField) -> Result<SplineField> {
        self.combine(1.0, other, -1.0)
    }

    pub fn add(&self, other: &SplineField) -> Result<SplineField> {
        self.combine(1.0, other, 1.0)
    }

    pub fn scale(&self, s: f64) -> SplineField {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Shifts grouped by color `ν mod (m+1)`.
    pub fn colors(&self) -> BTreeMap<Shift, Vec<Shift>> {
        crate::geometry::color_classes(&self.cells(), self.m)
    }

    /// `F_σ`: the part of the field carried by the color class `σ`.
    pub fn restrict_color(&self, sigma: &[i64]) -> SplineField {
        let cells: Vec<Shift> = self.cells().into_iter().filter(|nu| color_of(nu, self.m) == sigma).collect();
        let mut out = SplineField::zeros(self.dim, self.level, self.m, self.degree, &cells);
        for nu in &cells {
            out.accumulate(nu, self.coeff_slice(nu).expect("present"), 1.0);
        }
        out
    }

    /// `𝓘_{k,σ} F`: values `f_ν(2^{-k}(ν + λ))`, `λ ∈ ℤ_{+l}^d`, ordered by `(ν, λ)`.
    pub fn discretize_color(&self) -> Result<Vec<f64>> {
        let cells = self.cells();
        if let Some(first) = cells.first() {
            let s0 = color_of(first, self.m);
            if let Some(bad) = cells.iter().find(|nu| color_of(nu, self.m) != s0) {
                return Err(Error::MixedColors(s0, color_of(bad, self.m)));
            }
        }
        let h = (-(self.level as f64)).exp2();
        let lattice = indices(self.dim, self.degree);
        let mut out = Vec::with_capacity(cells.len() * lattice.len());
        let mut x = vec![0.0; self.dim];
        for nu in &cells {
            let c = self.coeff_slice(nu).expect("present");
            for lambda in lattice.iter() {
                for j in 0..self.dim {
                    x[j] = h * (nu[j] as f64 + lambda[j] as f64);
                }
                let mono = self.monomials(&x, &vec![0; self.dim]);
                out.push(c.iter().zip(&mono).map(|(a, b)| a * b).sum());
            }
        }
        Ok(out)
    }

    /// Inverse of [`discretize_color`](Self::discretize_color) by per-cell lattice interpolation.
    pub fn from_discretization(
        dim: usize,
        level: u32,
        m: usize,
        degree: u32,
        cells: &[Shift],
        values: &[f64],
    ) -> Result<SplineField> {
        let n = indices(dim, degree).len();
        if values.len() != n * cells.len() {
            return Err(Error::LatticeSize { expected: n * cells.len(), found: values.len() });
        }
        let scale = (level as f64).exp2();
        let mut out = SplineField::zeros(dim, level, m, degree, cells);
        for (nu, chunk) in cells.iter().zip(values.chunks_exact(n)) {
            let q = lattice_interpolate(dim, degree, chunk)?;
            let shift: Vec<f64> = nu.iter().map(|&v| -(v as f64)).collect();
            out.set(nu, &q.affine_substitute(&shift, &vec![scale; dim]))?;
        }
        Ok(out)
    }

    /// Text dump: header, parameters, then one sorted record per shift with
    /// coefficients in lexicographic monomial order. Floats use the shortest
    /// round-trip representation, so the dump is byte-stable.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{DUMP_HEADER}");
        let _ = writeln!(s, "dim {} order {} degree {} level {}", self.dim, self.m, self.degree, self.level);
        let cells = self.cells();
        let _ = writeln!(s, "cells {}", cells.len());
        for nu in &cells {
            let shift: Vec<String> = nu.iter().map(|v| v.to_string()).collect();
            let coeffs: Vec<String> = self.coeff_slice(nu).expect("present").iter().map(|c| format!("{c:?}")).collect();
            let _ = writeln!(s, "{} : {}", shift.join(" "), coeffs.join(" "));
        }
        s
    }

    pub fn parse(text: &str) -> Result<SplineField> {
        let bad = |msg: &str| Error::Format(msg.to_string());
        let mut lines = text.lines();
        if lines.next() != Some(DUMP_HEADER) {
            return Err(bad("missing header"));
        }
        let params: Vec<&str> = lines.next().ok_or_else(|| bad("missing parameters"))?.split_whitespace().collect();
        if params.len() != 8 || params[0] != "dim" || params[2] != "order" || params[4] != "degree" || params[6] != "level" {
            return Err(bad("malformed parameter line"));
        }
        let num = |s: &str| s.parse::<u64>().map_err(|_| bad("invalid integer parameter"));
        let (dim, m, degree, level) = (num(params[1])? as usize, num(params[3])? as usize, num(params[5])? as u32, num(params[7])? as u32);
        CardinalBSpline::get(m)?;
        let count_line = lines.next().ok_or_else(|| bad("missing cell count"))?;
        let count = count_line
            .strip_prefix("cells ")
            .ok_or_else(|| bad("malformed cell count"))?
            .parse::<usize>()
            .map_err(|_| bad("invalid cell count"))?;
        let mut map = BTreeMap::new();
        for _ in 0..count {
            let line = lines.next().ok_or_else(|| bad("truncated cell records"))?;
            let (lhs, rhs) = line.split_once(" : ").ok_or_else(|| bad("malformed cell record"))?;
            let nu = lhs
                .split_whitespace()
                .map(|v| v.parse::<i64>().map_err(|_| bad("invalid shift")))
                .collect::<Result<Shift>>()?;
            let coeffs = rhs
                .split_whitespace()
                .map(|v| v.parse::<f64>().map_err(|_| bad("invalid coefficient")))
                .collect::<Result<Vec<f64>>>()?;
            if nu.len() != dim {
                return Err(bad("shift has the wrong dimension"));
            }
            map.insert(nu, Polynomial::from_coeffs(dim, degree, coeffs)?);
        }
        if lines.next().is_some() {
            return Err(bad("trailing data"));
        }
        SplineField::from_map(dim, level, m, degree, &map)
    }
}

impl ScalarField for SplineField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }

    fn derivative(&self, x: &[f64], lambda: &[u32]) -> Option<f64> {
        self.eval_derivative(x, lambda).ok()
    }

    /// Knots of the level-`k` grid across the support.
    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        let h = (-(self.level as f64)).exp2();
        let a = self.lo[axis];
        let b = a + self.shape[axis] as i64 + self.m as i64;
        (a..=b).map(|v| v as f64 * h).collect()
    }
}

/// `𝔐^{m,d}(ν)` with weights: `(𝔪, 𝔫(ν, 𝔪), A_𝔪)` for every admissible `𝔪`.
pub fn parity_stencil(m: usize, nu: &[i64]) -> Vec<(Vec<usize>, Shift, f64)> {
    let a = refinement_coeffs(m);
    let per_axis: Vec<Vec<usize>> = nu
        .iter()
        .map(|&v| (0..=m + 1).filter(|&mm| (v - mm as i64).rem_euclid(2) == 0).collect())
        .collect();
    let lo = vec![0i64; nu.len()];
    let hi: Vec<i64> = per_axis.iter().map(|p| p.len() as i64 - 1).collect();
    index_box(&lo, &hi)
        .into_iter()
        .map(|t| {
            let mm: Vec<usize> = t.iter().enumerate().map(|(j, &i)| per_axis[j][i as usize]).collect();
            let parent: Shift = nu.iter().zip(&mm).map(|(&v, &u)| (v - u as i64).div_euclid(2)).collect();
            let w = mm.iter().map(|&u| a[u]).product();
            (mm, parent, w)
        })
        .collect()
}

/// `H_k F` on the given children: `Σ_{𝔪 ∈ 𝔐(ν)} A_𝔪 f_{𝔫(ν,𝔪)}`, missing parents contribute zero.
pub fn refine_onto(field: &SplineField, children: &[Shift]) -> SplineField {
    let mut out = SplineField::zeros(field.dim, field.level + 1, field.m, field.degree, children);
    for nu in children {
        for (_, parent, w) in parity_stencil(field.m, nu) {
            if let Some(src) = field.coeff_slice(&parent) {
                let src = src.to_vec();
                out.accumulate(nu, &src, w);
            }
        }
    }
    out
}

/// `H_k F` over every child whose support meets `D`.
pub fn two_scale_refine(field: &SplineField, domain: &Domain) -> Result<SplineField> {
    let children = active_cells(domain, field.level + 1, field.m)?;
    let out = refine_onto(field, &children);
    if cfg!(debug_assertions) {
        // Every parent of an active child is active whenever the field covers N_k.
        if let Ok(parents) = active_cells(domain, field.level, field.m) {
            if parents.len() == field.len() {
                for nu in &children {
                    for (_, p, _) in parity_stencil(field.m, nu) {
                        debug_assert!(field.contains(&p), "active child {nu:?} has inactive parent {p:?}");
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Per-level index data for a fixed domain.
#[derive(Debug)]
pub struct LevelData {
    pub level: u32,
    /// `N_k^{d,m,D}`.
    pub active: Vec<Shift>,
    /// `𝒩_k(D)`.
    pub interior: InteriorSet,
    /// `ν_k^D(ν)` for each active `ν`, aligned with `active`.
    pub nearest: Vec<Shift>,
}

/// Quasi-interpolation scheme `E_k^{l-1,d,m,D}` on a fixed domain.
#[derive(Debug)]
pub struct Scheme {
    domain: Domain,
    l: u32,
    m: usize,
    points: usize,
    subdivisions: u32,
    levels: Mutex<BTreeMap<u32, Arc<LevelData>>>,
}

impl Scheme {
    /// Coefficients of degree `l - 1`, B-splines of order `m ≥ l`.
    pub fn new(domain: Domain, l: u32, m: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::param("l", "must be at least 1"));
        }
        if m < l as usize {
            return Err(Error::param("m", "B-spline order must satisfy l ≤ m"));
        }
        CardinalBSpline::get(m)?;
        Ok(Scheme {
            domain,
            l,
            m,
            points: LocalProjector::required_points(l - 1),
            subdivisions: 0,
            levels: Mutex::new(BTreeMap::new()),
        })
    }

    /// Gauss points per axis and composite panels (`2^s`) for the local projectors.
    pub fn with_quadrature(mut self, points: usize, subdivisions: u32) -> Result<Self> {
        let required = LocalProjector::required_points(self.l - 1);
        if points < required {
            return Err(Error::QuadratureOrder { points, degree: self.l as i32 - 1, required });
        }
        self.points = points;
        self.subdivisions = subdivisions;
        Ok(self)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> u32 {
        self.l - 1
    }

    pub fn level(&self, k: u32) -> Result<Arc<LevelData>> {
        if let Some(v) = self.levels.lock().unwrap_or_else(|e| e.into_inner()).get(&k) {
            return Ok(v.clone());
        }
        let interior = InteriorSet::new(&self.domain, k);
        if interior.is_empty() {
            return Err(Error::NoInteriorCells(k));
        }
        let active = active_cells(&self.domain, k, self.m)?;
        let nearest = active.iter().map(|nu| interior.nearest(nu)).collect::<Result<Vec<_>>>()?;
        let data = Arc::new(LevelData { level: k, active, interior, nearest });
        self.levels.lock().unwrap_or_else(|e| e.into_inner()).insert(k, data.clone());
        Ok(data)
    }

    fn projector(&self, k: u32, nu: &[i64]) -> LocalProjector {
        LocalProjector::for_cell(k, nu, self.l - 1, self.points)
            .expect("quadrature order validated")
            .with_subdivisions(self.subdivisions)
    }

    /// `S_{k,ν} f`: projection over the cell `Q_{k,ν}`.
    pub fn local_projection(&self, f: &(impl ScalarField + ?Sized), k: u32, nu: &[i64]) -> Polynomial {
        self.projector(k, nu).project(f)
    }

    /// `E_k f = Σ_{ν ∈ N_k} (S_{k,ν_k^D(ν)} f) g_{k,ν}`.
    pub fn quasi_interpolant(&self, f: &(impl ScalarField + ?Sized), k: u32) -> Result<SplineField> {
        if f.dim() != self.domain.dim() {
            return Err(Error::DimensionMismatch { expected: self.domain.dim(), found: f.dim() });
        }
        let data = self.level(k)?;
        let mut projections: HashMap<&Shift, Polynomial> = HashMap::new();
        for src in &data.nearest {
            projections.entry(src).or_insert_with(|| self.local_projection(f, k, src));
        }
        let mut field = SplineField::zeros(self.domain.dim(), k, self.m, self.l - 1, &data.active);
        for (nu, src) in data.active.iter().zip(&data.nearest) {
            field.set(nu, &projections[src])?;
        }
        Ok(field)
    }

    /// `H_k F` onto `N_{k+1}`.
    pub fn refine(&self, field: &SplineField) -> Result<SplineField> {
        let data = self.level(field.level + 1)?;
        Ok(refine_onto(field, &data.active))
    }

    /// `𝓔_k f = E_k f - H_{k-1} E_{k-1} f`.
    pub fn detail(&self, f: &(impl ScalarField + ?Sized), k: u32) -> Result<SplineField> {
        if k == 0 {
            return Err(Error::NoInteriorCells(0));
        }
        self.level(k - 1)?;
        let fine = self.quasi_interpolant(f, k)?;
        let coarse = self.quasi_interpolant(f, k - 1)?;
        fine.sub(&self.refine(&coarse)?)
    }

    /// `𝓔_{k,σ} f` for every color `σ`.
    pub fn detail_colors(&self, f: &(impl ScalarField + ?Sized), k: u32) -> Result<BTreeMap<Shift, SplineField>> {
        let det = self.detail(f, k)?;
        Ok(det.colors().keys().map(|s| (s.clone(), det.restrict_color(s))).collect())
    }

    /// `E_{k0} f` and `𝓔_κ f` for `κ = k0+1..=k`, each lifted to level `k`, summed.
    pub fn telescoped(&self, f: &(impl ScalarField + ?Sized), k0: u32, k: u32) -> Result<SplineField> {
        let mut acc = self.quasi_interpolant(f, k0)?;
        for kappa in k0 + 1..=k {
            acc = self.refine(&acc)?.add(&self.detail(f, kappa)?)?;
        }
        Ok(acc)
    }
}

/// `E_k^{l-1,d,m,D} f` with a fresh scheme.
pub fn quasi_interpolant(f: &(impl ScalarField + ?Sized), domain: &Domain, k: u32, l: u32, m: usize) -> Result<SplineField> {
    Scheme::new(domain.clone(), l, m)?.quasi_interpolant(f, k)
}

/// `𝓔_k^{l-1,d,m,D} f` with a fresh scheme.
pub fn detail(f: &(impl ScalarField + ?Sized), domain: &Domain, k: u32, l: u32, m: usize) -> Result<SplineField> {
    Scheme::new(domain.clone(), l, m)?.detail(f, k)
}
