//! Closed-form test functions and affine reparameterizations.

use serde::{Deserialize, Serialize};

use crate::field::ScalarField;
use crate::polynomials::{MultiIndex, Polynomial};
use crate::{Error, Result};

/// Which side of the anchor a cusp factor lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    /// `(x - c)_+^β`
    Right,
    /// `(c - x)_+^β`
    Left,
    /// `|x - c|^β`
    Both,
    /// `sign(x - c) |x - c|^β`, a smoothed step.
    Odd,
}

/// Univariate factor of a tensor-product test function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Factor {
    Cusp { beta: f64, anchor: f64, side: Side },
    /// `sin(π · freq · x + phase)`
    Sine { freq: f64, phase: f64 },
    /// `Σ c_i x^i`
    Poly { coeffs: Vec<f64> },
}

fn falling_real(beta: f64, r: u32) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (beta - i as f64))
}

impl Factor {
    pub fn eval(&self, x: f64, r: u32) -> f64 {
        match self {
            Factor::Cusp { beta, anchor, side } => {
                let right = |s: f64| {
                    if s > 0.0 {
                        falling_real(*beta, r) * s.powf(beta - r as f64)
                    } else {
                        0.0
                    }
                };
                let sign = if r.is_multiple_of(2) { 1.0 } else { -1.0 };
                let u = x - anchor;
                match side {
                    Side::Right => right(u),
                    Side::Left => sign * right(-u),
                    Side::Both => right(u) + sign * right(-u),
                    Side::Odd => right(u) - sign * right(-u),
                }
            }
            Factor::Sine { freq, phase } => {
                let w = std::f64::consts::PI * freq;
                w.powi(r as i32) * (w * x + phase + r as f64 * std::f64::consts::FRAC_PI_2).sin()
            }
            Factor::Poly { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(r as usize)
                .map(|(i, c)| c * crate::polynomials::falling(i as u32, r) * x.powi((i as u32 - r) as i32))
                .sum(),
        }
    }

    fn breakpoint(&self) -> Option<f64> {
        match self {
            Factor::Cusp { anchor, .. } => Some(*anchor),
            _ => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Factor::Cusp { beta, anchor, .. } => {
                if !(*beta > 0.0) || !beta.is_finite() || !anchor.is_finite() {
                    return Err(Error::param("family.factors.beta", "cusp exponent must be positive"));
                }
            }
            Factor::Sine { freq, phase } => {
                if !freq.is_finite() || !phase.is_finite() {
                    return Err(Error::param("family.factors.freq", "must be finite"));
                }
            }
            Factor::Poly { coeffs } => {
                if coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(Error::param("family.factors.coeffs", "must be finite"));
                }
            }
        }
        Ok(())
    }
}

/// Catalog of closed-form functions used by the experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TestFunction {
    /// Polynomial given by sparse monomial terms.
    Polynomial { dim: usize, terms: Vec<(MultiIndex, f64)> },
    /// `scale · Π_j φ_j(x_j)`.
    Tensor {
        factors: Vec<Factor>,
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl TestFunction {
    pub fn cusp_1d(beta: f64, anchor: f64, side: Side) -> Self {
        TestFunction::Tensor {
            factors: vec![Factor::Cusp { beta, anchor, side }],
            scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TestFunction::Polynomial { dim, terms } => {
                if *dim == 0 || terms.iter().any(|(l, c)| l.len() != *dim || !c.is_finite()) {
                    return Err(Error::param("family.terms", "terms must match the dimension"));
                }
            }
            TestFunction::Tensor { factors, scale } => {
                if factors.is_empty() || !scale.is_finite() {
                    return Err(Error::param("family.factors", "need at least one factor"));
                }
                for f in factors {
                    f.validate()?;
                }
            }
        }
        Ok(())
    }

    /// The polynomial this function equals, if it is one.
    pub fn as_polynomial(&self) -> Option<Polynomial> {
        match self {
            TestFunction::Polynomial { dim, terms } => Polynomial::from_terms(*dim, terms).ok(),
            TestFunction::Tensor { .. } => None,
        }
    }
}

impl ScalarField for TestFunction {
    fn dim(&self) -> usize {
        match self {
            TestFunction::Polynomial { dim, .. } => *dim,
            TestFunction::Tensor { factors, .. } => factors.len(),
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self {
            TestFunction::Polynomial { terms, .. } => terms
                .iter()
                .map(|(l, c)| c * l.iter().zip(x).map(|(&e, &v)| v.powi(e as i32)).product::<f64>())
                .sum(),
            TestFunction::Tensor { factors, scale } => {
                scale * factors.iter().zip(x).map(|(f, &v)| f.eval(v, 0)).product::<f64>()
            }
        }
    }

    fn derivative(&self, x: &[f64], lambda: &[u32]) -> Option<f64> {
        match self {
            TestFunction::Polynomial { dim, terms } => {
                let p = Polynomial::from_terms(*dim, terms).ok()?;
                Some(p.derivative(lambda).eval(x).ok()?)
            }
            TestFunction::Tensor { factors, scale } => Some(
                scale
                    * factors
                        .iter()
                        .zip(x)
                        .zip(lambda)
                        .map(|((f, &v), &r)| f.eval(v, r))
                        .product::<f64>(),
            ),
        }
    }

    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        match self {
            TestFunction::Polynomial { .. } => Vec::new(),
            TestFunction::Tensor { factors, .. } => factors.get(axis).and_then(|f| f.breakpoint()).into_iter().collect(),
        }
    }

    fn singularities(&self, axis: usize) -> Vec<f64> {
        self.breakpoints(axis)
    }
}

/// `(h_{δ,x⁰} f)(x) = f(x⁰ + δx)`.
pub struct Pullback<F> {
    pub f: F,
    pub delta: f64,
    pub origin: Vec<f64>,
}

/// `(h_{δ,x⁰}^{-1} f)(y) = f((y - x⁰)/δ)`.
pub struct InversePullback<F> {
    pub f: F,
    pub delta: f64,
    pub origin: Vec<f64>,
}

pub fn affine_pullback<F: ScalarField>(f: F, delta: f64, origin: Vec<f64>) -> Pullback<F> {
    assert!(delta > 0.0, "scale must be positive");
    Pullback { f, delta, origin }
}

pub fn affine_pullback_inverse<F: ScalarField>(f: F, delta: f64, origin: Vec<f64>) -> InversePullback<F> {
    assert!(delta > 0.0, "scale must be positive");
    InversePullback { f, delta, origin }
}

impl<F: ScalarField> ScalarField for Pullback<F> {
    fn dim(&self) -> usize {
        self.f.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        let y: Vec<f64> = x.iter().zip(&self.origin).map(|(v, o)| o + self.delta * v).collect();
        self.f.value(&y)
    }
    fn derivative(&self, x: &[f64], lambda: &[u32]) -> Option<f64> {
        let y: Vec<f64> = x.iter().zip(&self.origin).map(|(v, o)| o + self.delta * v).collect();
        let ord: u32 = lambda.iter().sum();
        Some(self.delta.powi(ord as i32) * self.f.derivative(&y, lambda)?)
    }
    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        self.f
            .breakpoints(axis)
            .into_iter()
            .map(|b| (b - self.origin[axis]) / self.delta)
            .collect()
    }
    fn singularities(&self, axis: usize) -> Vec<f64> {
        self.f
            .singularities(axis)
            .into_iter()
            .map(|b| (b - self.origin[axis]) / self.delta)
            .collect()
    }
}

impl<F: ScalarField> ScalarField for InversePullback<F> {
    fn dim(&self) -> usize {
        self.f.dim()
    }
    fn value(&self, x: &[f64]) -> f64 {
        let y: Vec<f64> = x.iter().zip(&self.origin).map(|(v, o)| (v - o) / self.delta).collect();
        self.f.value(&y)
    }
    fn derivative(&self, x: &[f64], lambda: &[u32]) -> Option<f64> {
        let y: Vec<f64> = x.iter().zip(&self.origin).map(|(v, o)| (v - o) / self.delta).collect();
        let ord: u32 = lambda.iter().sum();
        Some(self.delta.powi(-(ord as i32)) * self.f.derivative(&y, lambda)?)
    }
    fn breakpoints(&self, axis: usize) -> Vec<f64> {
        self.f
            .breakpoints(axis)
            .into_iter()
            .map(|b| self.origin[axis] + self.delta * b)
            .collect()
    }
    fn singularities(&self, axis: usize) -> Vec<f64> {
        self.f
            .singularities(axis)
            .into_iter()
            .map(|b| self.origin[axis] + self.delta * b)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cusp_derivatives_match_finite_differences() {
        for side in [Side::Right, Side::Left, Side::Both, Side::Odd] {
            let f = Factor::Cusp { beta: 2.5, anchor: 0.5, side };
            for x in [0.1, 0.37, 0.62, 0.9] {
                let h = 1e-6;
                let fd = (f.eval(x + h, 0) - f.eval(x - h, 0)) / (2.0 * h);
                assert!((fd - f.eval(x, 1)).abs() < 1e-6, "{side:?} {x}");
                let fd2 = (f.eval(x + h, 1) - f.eval(x - h, 1)) / (2.0 * h);
                assert!((fd2 - f.eval(x, 2)).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn sine_and_poly_derivatives() {
        let s = Factor::Sine { freq: 1.5, phase: 0.3 };
        let p = Factor::Poly { coeffs: vec![1.0, -2.0, 0.5, 3.0] };
        for x in [0.2, 0.8] {
            let h = 1e-6;
            for f in [&s, &p] {
                let fd = (f.eval(x + h, 1) - f.eval(x - h, 1)) / (2.0 * h);
                assert!((fd - f.eval(x, 2)).abs() < 1e-5);
            }
        }
        assert_eq!(p.eval(2.0, 3), 18.0);
        assert_eq!(p.eval(2.0, 4), 0.0);
    }

    #[test]
    fn tensor_function_derivative_and_breakpoints() {
        let f = TestFunction::Tensor {
            factors: vec![
                Factor::Cusp { beta: 1.5, anchor: 0.25, side: Side::Right },
                Factor::Sine { freq: 1.0, phase: 0.0 },
            ],
            scale: 2.0,
        };
        assert_eq!(f.breakpoints(0), vec![0.25]);
        assert!(f.breakpoints(1).is_empty());
        let x = [0.5, 0.3];
        let v = f.derivative(&x, &[1, 1]).unwrap();
        let want = 2.0 * 1.5 * 0.25f64.sqrt() * std::f64::consts::PI * (std::f64::consts::PI * 0.3).cos();
        assert!((v - want).abs() < 1e-12);
    }

    #[test]
    fn serde_round_trip() {
        let f = TestFunction::cusp_1d(0.75, 0.5, Side::Odd);
        let s = serde_json::to_string(&f).unwrap();
        let g: TestFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn pullback_identity_and_inverse() {
        let f = TestFunction::cusp_1d(0.75, 0.5, Side::Both);
        let id = affine_pullback(&f, 1.0, vec![0.0]);
        assert_eq!(id.value(&[0.3]), f.value(&[0.3]));
        let g = affine_pullback(&f, 0.5, vec![0.25]);
        let back = affine_pullback_inverse(&g, 0.5, vec![0.25]);
        for x in [0.1, 0.4, 0.77] {
            assert!((back.value(&[x]) - f.value(&[x])).abs() < 1e-15);
        }
        assert_eq!(g.breakpoints(0), vec![0.5]);
    }
}
