//! The operator `V f = 𝒟^λ(E_k f)|_D` with norm and error probes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::norms::{lp_norm, nodes_for};
use crate::analysis::quadrature::{check_exponent, QuadratureSpec};
use crate::field::ScalarField;
use crate::geometry::Domain;
use crate::multiscale::{Scheme, SplineField};
use crate::polynomials::order;
use crate::{Error, Result};

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

fn inv(p: f64) -> f64 {
    if p.is_infinite() {
        0.0
    } else {
        1.0 / p
    }
}

/// `(d/p - d/q)_+`.
pub fn embedding_loss(d: usize, p: f64, q: f64) -> f64 {
    pos(d as f64 * (inv(p) - inv(q)))
}

/// `τ = |λ| + (d/s - d/q)_+`.
pub fn tau(lambda: &[u32], s: f64, q: f64) -> f64 {
    order(lambda) as f64 + embedding_loss(lambda.len(), s, q)
}

/// `γ = α - |λ| - (d/p - d/q)_+`.
pub fn gamma(alpha: f64, lambda: &[u32], p: f64, q: f64) -> f64 {
    alpha - order(lambda) as f64 - embedding_loss(lambda.len(), p, q)
}

/// `𝒟^λ F` for a spline field `F`.
#[derive(Clone, Debug)]
pub struct DerivativeField {
    pub field: SplineField,
    pub lambda: Vec<u32>,
}

impl ScalarField for DerivativeField {
    fn dim(&self) -> usize {
        self.field.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.field.eval_derivative(x, &self.lambda).unwrap_or(f64::NAN)
    }

    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        self.field.breakpoints(axis)
    }
}

/// `𝒟^λ f - V f`.
struct Gap<'a, F: ?Sized> {
    f: &'a F,
    v: &'a DerivativeField,
}

impl<F: ScalarField + ?Sized> ScalarField for Gap<'_, F> {
    fn dim(&self) -> usize {
        self.v.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.f.derivative(x, &self.v.lambda).unwrap_or(f64::NAN) - self.v.value(x)
    }

    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        let mut c = self.f.breakpoints(axis);
        c.extend(self.v.breakpoints(axis));
        c
    }

    fn singularities(&self, axis: usize) -> Vec<f64> {
        self.f.singularities(axis)
    }
}

/// `‖𝒟^λ f - 𝒟^λ F‖_{L_q(D)}`.
pub fn derivative_gap_norm<F: ScalarField + ?Sized>(
    f: &F,
    v: &DerivativeField,
    domain: &Domain,
    q: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let (lo, hi) = domain.bbox();
    let probe: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect();
    if f.derivative(&probe, &v.lambda).is_none() {
        return Err(Error::DerivativeUnavailable(v.lambda.clone()));
    }
    let gap = Gap { f, v };
    nodes_for(&gap, domain, spec).lp_norm(&gap, q)
}

/// Piecewise constant on the level-`k` cells meeting a box.
struct CellField {
    k: u32,
    lo: Vec<i64>,
    n: Vec<usize>,
    values: Vec<f64>,
}

impl CellField {
    fn new(domain: &Domain, k: u32, pattern: impl FnMut(&[i64]) -> f64) -> Self {
        let s = (k as f64).exp2();
        let (a, b) = domain.bbox();
        let lo: Vec<i64> = a.iter().map(|v| (v * s).floor() as i64).collect();
        let hi: Vec<i64> = b.iter().map(|v| (v * s).ceil() as i64 - 1).collect();
        let n = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1).max(1) as usize).collect();
        let values = crate::geometry::index_box(&lo, &hi).iter().map(|v| v.as_slice()).map(pattern).collect();
        CellField { k, lo, n, values }
    }
}

impl ScalarField for CellField {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let s = (self.k as f64).exp2();
        let mut idx = 0;
        for j in 0..x.len() {
            let i = (x[j] * s).floor() as i64 - self.lo[j];
            if i < 0 || i as usize >= self.n[j] {
                return 0.0;
            }
            idx = idx * self.n[j] + i as usize;
        }
        self.values[idx]
    }

    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        let h = (-(self.k as f64)).exp2();
        (0..=self.n[axis]).map(|i| (self.lo[axis] + i as i64) as f64 * h).collect()
    }
}

/// `V = 𝒟^λ E_k` restricted to `D`.
pub struct StechkinOperator<'a> {
    scheme: &'a Scheme,
    k: u32,
    lambda: Vec<u32>,
}

impl<'a> StechkinOperator<'a> {
    pub fn new(scheme: &'a Scheme, k: u32, lambda: Vec<u32>) -> Result<Self> {
        let d = scheme.domain().dim();
        if lambda.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: lambda.len() });
        }
        if lambda.iter().any(|&r| r as usize > scheme.m()) {
            return Err(Error::DerivativeOutOfRange { order: lambda, m: scheme.m() });
        }
        scheme.level(k)?;
        Ok(StechkinOperator { scheme, k, lambda })
    }

    pub fn level(&self) -> u32 {
        self.k
    }

    pub fn lambda(&self) -> &[u32] {
        &self.lambda
    }

    pub fn apply(&self, f: &(impl ScalarField + ?Sized)) -> Result<DerivativeField> {
        Ok(DerivativeField {
            field: self.scheme.quasi_interpolant(f, self.k)?,
            lambda: self.lambda.clone(),
        })
    }

    /// `2^{kτ}`, the growth of `‖V‖_{L_s → L_q}` up to a constant.
    pub fn analytic_ceiling(&self, s: f64, q: f64) -> f64 {
        (self.k as f64 * tau(&self.lambda, s, q)).exp2()
    }

    /// Largest `‖Vf‖_q / ‖f‖_s` over piecewise constants on level-`k` cells:
    /// the alternating pattern first, then `trials` seeded random ones.
    pub fn norm_probe(&self, s: f64, q: f64, trials: usize, seed: u64, spec: &QuadratureSpec) -> Result<f64> {
        check_exponent(s)?;
        check_exponent(q)?;
        let domain = self.scheme.domain();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inputs = vec![CellField::new(domain, self.k, |nu| {
            if nu.iter().sum::<i64>() % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        })];
        for _ in 0..trials {
            inputs.push(CellField::new(domain, self.k, |_| rng.gen_range(-1.0..1.0)));
        }
        let mut best: f64 = 0.0;
        for f in &inputs {
            let den = lp_norm(f, domain, s, spec)?;
            if den > 0.0 {
                let vf = self.apply(f)?;
                best = best.max(lp_norm(&vf, domain, q, spec)? / den);
            }
        }
        Ok(best)
    }

    /// `max_f ‖𝒟^λ f - V f‖_{L_q(D)}` over a test family with exact derivatives.
    pub fn error_probe<F: ScalarField>(&self, family: &[F], q: f64, spec: &QuadratureSpec) -> Result<f64> {
        let domain = self.scheme.domain();
        let mut worst: f64 = 0.0;
        for f in family {
            let v = self.apply(f)?;
            worst = worst.max(derivative_gap_norm(f, &v, domain, q, spec)?);
        }
        Ok(worst)
    }
}
