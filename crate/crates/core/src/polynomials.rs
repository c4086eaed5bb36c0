//! Multivariate polynomials in the monomial basis.
//!
//! Coefficients are stored densely, aligned with the lexicographic
//! enumeration of multi-indices of order at most the degree bound.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A multi-index `(λ_1, …, λ_d)` of nonnegative integers.
pub type MultiIndex = Vec<u32>;

/// Order `|λ| = Σ λ_j`.
pub fn order(lambda: &[u32]) -> u32 {
    lambda.iter().sum()
}

/// All multi-indices of dimension `d` and order at most `l`, in lexicographic order.
pub fn multi_indices(d: usize, l: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; d];
    fill(&mut cur, 0, l, &mut out);
    out
}

fn fill(cur: &mut Vec<u32>, axis: usize, budget: u32, out: &mut Vec<MultiIndex>) {
    if axis == cur.len() {
        out.push(cur.clone());
        return;
    }
    for v in 0..=budget {
        cur[axis] = v;
        fill(cur, axis + 1, budget - v, out);
    }
    cur[axis] = 0;
}

/// Cached enumeration, shared between all polynomials of the same shape.
pub fn indices(d: usize, l: u32) -> Arc<Vec<MultiIndex>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<Vec<MultiIndex>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry((d, l))
        .or_insert_with(|| Arc::new(multi_indices(d, l)))
        .clone()
}

/// `C(l + d, d)`, the number of multi-indices of order at most `l`.
pub fn card(d: usize, l: u32) -> usize {
    let mut c: u128 = 1;
    for i in 1..=d as u128 {
        c = c * (l as u128 + i) / i;
    }
    c as usize
}

/// Position of `lambda` in the lexicographic enumeration, if its order is at most `l`.
pub fn rank(lambda: &[u32], l: u32) -> Option<usize> {
    if order(lambda) > l {
        return None;
    }
    indices(lambda.len(), l).binary_search_by(|m| m.as_slice().cmp(lambda)).ok()
}

/// Element of `𝒫^{l,d}` stored as monomial coefficients.
///
/// A degree bound of `-1` marks the zero polynomial, which has no coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    dim: usize,
    degree: i32,
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Polynomial {
            dim,
            degree: -1,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Polynomial {
            dim,
            degree: 0,
            coeffs: vec![c],
        }
    }

    /// Polynomial with the given coefficients, listed in lexicographic multi-index order.
    pub fn from_coeffs(dim: usize, degree: u32, coeffs: Vec<f64>) -> Result<Self> {
        let expected = card(dim, degree);
        if coeffs.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: coeffs.len(),
            });
        }
        Ok(Polynomial {
            dim,
            degree: degree as i32,
            coeffs,
        })
    }

    /// Polynomial from sparse `(λ, a_λ)` terms; the degree bound is the largest order present.
    pub fn from_terms(dim: usize, terms: &[(MultiIndex, f64)]) -> Result<Self> {
        let mut degree = 0;
        for (lambda, _) in terms {
            if lambda.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: lambda.len(),
                });
            }
            degree = degree.max(order(lambda));
        }
        let mut coeffs = vec![0.0; card(dim, degree)];
        for (lambda, a) in terms {
            let r = rank(lambda, degree).expect("order checked above");
            coeffs[r] += a;
        }
        Ok(Polynomial {
            dim,
            degree: degree as i32,
            coeffs,
        })
    }

    /// The monomial `x^λ`.
    pub fn monomial(lambda: &[u32]) -> Self {
        Self::from_terms(lambda.len(), &[(lambda.to_vec(), 1.0)]).expect("consistent dimension")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Degree bound `l`; `-1` for the zero polynomial.
    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Coefficient `a_λ` (zero when `|λ|` exceeds the degree bound).
    pub fn coeff(&self, lambda: &[u32]) -> f64 {
        if self.degree < 0 {
            return 0.0;
        }
        rank(lambda, self.degree as u32).map_or(0.0, |r| self.coeffs[r])
    }

    /// `(λ, a_λ)` pairs in lexicographic order.
    pub fn terms(&self) -> Vec<(MultiIndex, f64)> {
        if self.degree < 0 {
            return Vec::new();
        }
        indices(self.dim, self.degree as u32)
            .iter()
            .cloned()
            .zip(self.coeffs.iter().copied())
            .collect()
    }

    /// `Σ a_λ x^λ`, summed in lexicographic order.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64]) -> f64 {
        if self.degree < 0 {
            return 0.0;
        }
        let l = self.degree as u32;
        let pw = powers(x, l);
        let idx = indices(self.dim, l);
        let mut s = 0.0;
        for (lambda, c) in idx.iter().zip(&self.coeffs) {
            let mut t = *c;
            for (j, &e) in lambda.iter().enumerate() {
                t *= pw[j][e as usize];
            }
            s += t;
        }
        s
    }

    /// Exact derivative `𝒟^λ p`; the degree bound drops by `|λ|`.
    pub fn derivative(&self, lambda: &[u32]) -> Polynomial {
        assert_eq!(lambda.len(), self.dim, "derivative multi-index dimension");
        let new_deg = self.degree - order(lambda) as i32;
        if new_deg < 0 {
            return Polynomial::zero(self.dim);
        }
        let idx = indices(self.dim, self.degree as u32);
        let mut coeffs = vec![0.0; card(self.dim, new_deg as u32)];
        for (kappa, c) in idx.iter().zip(&self.coeffs) {
            if kappa.iter().zip(lambda).any(|(k, l)| k < l) {
                continue;
            }
            let mut factor = *c;
            let mut reduced = Vec::with_capacity(self.dim);
            for (&k, &l) in kappa.iter().zip(lambda) {
                factor *= falling(k, l);
                reduced.push(k - l);
            }
            let r = rank(&reduced, new_deg as u32).expect("order bound holds");
            coeffs[r] += factor;
        }
        Polynomial {
            dim: self.dim,
            degree: new_deg,
            coeffs,
        }
    }

    /// Re-expresses the polynomial with a larger degree bound.
    pub fn with_degree(&self, degree: u32) -> Polynomial {
        let degree = degree.max(self.degree.max(0) as u32);
        let mut coeffs = vec![0.0; card(self.dim, degree)];
        if self.degree >= 0 {
            let idx = indices(self.dim, self.degree as u32);
            for (lambda, c) in idx.iter().zip(&self.coeffs) {
                coeffs[rank(lambda, degree).expect("within bound")] = *c;
            }
        }
        Polynomial {
            dim: self.dim,
            degree: degree as i32,
            coeffs,
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        assert_eq!(self.dim, other.dim, "polynomial dimension");
        if self.degree < 0 {
            return other.clone();
        }
        if other.degree < 0 {
            return self.clone();
        }
        let deg = self.degree.max(other.degree) as u32;
        let mut a = self.with_degree(deg);
        let b = other.with_degree(deg);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y;
        }
        a
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Polynomial {
        Polynomial {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `q(x) = p(shift + scale ⊙ x)` with a diagonal affine map.
    pub fn affine_substitute(&self, shift: &[f64], scale: &[f64]) -> Polynomial {
        assert_eq!(shift.len(), self.dim);
        assert_eq!(scale.len(), self.dim);
        if self.degree < 0 {
            return self.clone();
        }
        let l = self.degree as u32;
        // Per axis: expansion of (a + b x)^e into powers of x.
        let expansions: Vec<Vec<Vec<f64>>> = (0..self.dim)
            .map(|j| {
                (0..=l)
                    .map(|e| {
                        (0..=e)
                            .map(|i| {
                                binom(e, i) as f64
                                    * shift[j].powi((e - i) as i32)
                                    * scale[j].powi(i as i32)
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let idx = indices(self.dim, l);
        let mut coeffs = vec![0.0; idx.len()];
        let mut target = vec![0u32; self.dim];
        for (lambda, c) in idx.iter().zip(&self.coeffs) {
            if *c == 0.0 {
                continue;
            }
            expand(&expansions, lambda, 0, *c, &mut target, l, &mut coeffs);
        }
        Polynomial {
            dim: self.dim,
            degree: self.degree,
            coeffs,
        }
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

fn expand(
    expansions: &[Vec<Vec<f64>>],
    lambda: &[u32],
    axis: usize,
    acc: f64,
    target: &mut Vec<u32>,
    l: u32,
    out: &mut [f64],
) {
    if axis == lambda.len() {
        out[rank(target, l).expect("order preserved")] += acc;
        return;
    }
    let e = lambda[axis] as usize;
    for (i, w) in expansions[axis][e].iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        target[axis] = i as u32;
        expand(expansions, lambda, axis + 1, acc * w, target, l, out);
    }
    target[axis] = 0;
}

/// Per-axis power tables `x_j^e`, `e = 0..=l`.
pub(crate) fn powers(x: &[f64], l: u32) -> Vec<Vec<f64>> {
    x.iter()
        .map(|&xj| {
            let mut row = Vec::with_capacity(l as usize + 1);
            let mut v = 1.0;
            for _ in 0..=l {
                row.push(v);
                v *= xj;
            }
            row
        })
        .collect()
}

/// Falling factorial `k (k-1) … (k-r+1)`.
pub fn falling(k: u32, r: u32) -> f64 {
    if r > k {
        return 0.0;
    }
    (0..r).fold(1.0, |acc, i| acc * (k - i) as f64)
}

pub fn binom(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Vandermonde matrix of the lattice `ℤ_{+l}^d` against monomials of order `≤ l`.
fn lattice_vandermonde(d: usize, l: u32) -> DMatrix<f64> {
    let idx = indices(d, l);
    let n = idx.len();
    DMatrix::from_fn(n, n, |i, j| {
        idx[i]
            .iter()
            .zip(&idx[j])
            .fold(1.0, |acc, (&node, &e)| acc * (node as f64).powi(e as i32))
    })
}

/// The unique `p ∈ 𝒫^{l,d}` with `p(λ) = values[λ]` on the lattice `ℤ_{+l}^d`.
///
/// `values` is listed in lexicographic multi-index order.
pub fn lattice_interpolate(d: usize, l: u32, values: &[f64]) -> Result<Polynomial> {
    let n = card(d, l);
    if values.len() != n {
        return Err(Error::LatticeSize {
            expected: n,
            found: values.len(),
        });
    }
    let lu = lattice_vandermonde(d, l).lu();
    let sol = lu
        .solve(&DVector::from_column_slice(values))
        .ok_or(Error::SingularSystem {
            column: 0,
            pivot: 0.0,
        })?;
    Polynomial::from_coeffs(d, l, sol.as_slice().to_vec())
}

/// Same as [`lattice_interpolate`] with values keyed by multi-index.
pub fn lattice_interpolate_map(
    d: usize,
    l: u32,
    values: &std::collections::BTreeMap<MultiIndex, f64>,
) -> Result<Polynomial> {
    if values.len() != card(d, l) {
        return Err(Error::LatticeSize {
            expected: card(d, l),
            found: values.len(),
        });
    }
    let ordered = indices(d, l)
        .iter()
        .map(|lambda| {
            values
                .get(lambda)
                .copied()
                .ok_or_else(|| Error::MissingLatticeValue(lambda.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    lattice_interpolate(d, l, &ordered)
}

/// Lagrange basis `{π_μ}` of `𝒫^{l,d}` for the lattice `ℤ_{+l}^d`, in lexicographic order of `μ`.
pub fn lagrange_basis(d: usize, l: u32) -> Vec<Polynomial> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<Vec<Polynomial>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    let basis = guard.entry((d, l)).or_insert_with(|| {
        let n = card(d, l);
        let inv = lattice_vandermonde(d, l)
            .try_inverse()
            .expect("lattice Vandermonde matrix is invertible");
        Arc::new(
            (0..n)
                .map(|mu| {
                    let col = inv.column(mu).iter().copied().collect();
                    Polynomial::from_coeffs(d, l, col).expect("card matches")
                })
                .collect(),
        )
    });
    basis.as_ref().clone()
}
