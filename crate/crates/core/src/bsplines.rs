//! Cardinal B-splines `ψ^{m,1}`, their tensor products and refinement weights.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::{Error, Result};

/// Largest supported spline order.
pub const MAX_ORDER: usize = 8;

/// Piecewise polynomial `ψ^{m,1}` supported on `[0, m+1]`.
///
/// Piece `j` lives on `[j, j+1)` and is stored in the local variable `u = x - j`.
#[derive(Clone, Debug)]
pub struct CardinalBSpline {
    m: usize,
    exact: Vec<Vec<BigRational>>,
    /// `derivs[r][j]`: ascending coefficients of the `r`-th derivative of piece `j`.
    derivs: Vec<Vec<Vec<f64>>>,
}

impl CardinalBSpline {
    /// Builds `ψ^{m,1}` by exact repeated integration `ψ^m(x) = ∫_{x-1}^{x} ψ^{m-1}`.
    pub fn build(m: usize) -> Result<Self> {
        if m > MAX_ORDER {
            return Err(Error::OrderOutOfRange(m));
        }
        let mut pieces: Vec<Vec<BigRational>> = vec![vec![BigRational::one()]];
        for _ in 1..=m {
            let anti: Vec<Vec<BigRational>> = pieces.iter().map(|p| antiderivative(p)).collect();
            let n = pieces.len();
            let mut next = Vec::with_capacity(n + 1);
            for j in 0..=n {
                // new_j(u) = F_j(u) + F_{j-1}(1) - F_{j-1}(u)
                let mut piece = vec![BigRational::zero(); n + 1];
                if j < n {
                    for (c, a) in piece.iter_mut().zip(&anti[j]) {
                        *c += a;
                    }
                }
                if j > 0 {
                    let prev = &anti[j - 1];
                    let at_one: BigRational = prev.iter().cloned().sum();
                    piece[0] += at_one;
                    for (c, a) in piece.iter_mut().zip(prev) {
                        *c -= a;
                    }
                }
                next.push(piece);
            }
            pieces = next;
        }
        let derivs = (0..=m)
            .map(|r| {
                pieces
                    .iter()
                    .map(|p| {
                        let mut q = p.clone();
                        for _ in 0..r {
                            q = differentiate(&q);
                        }
                        q.iter().map(|c| c.to_f64().expect("finite rational")).collect()
                    })
                    .collect()
            })
            .collect();
        Ok(CardinalBSpline {
            m,
            exact: pieces,
            derivs,
        })
    }

    /// Shared instance of order `m`, built once per process.
    pub fn get(m: usize) -> Result<&'static CardinalBSpline> {
        static ALL: OnceLock<Vec<CardinalBSpline>> = OnceLock::new();
        if m > MAX_ORDER {
            return Err(Error::OrderOutOfRange(m));
        }
        let all = ALL.get_or_init(|| {
            (0..=MAX_ORDER)
                .map(|m| CardinalBSpline::build(m).expect("order within cap"))
                .collect()
        });
        Ok(&all[m])
    }

    pub fn order(&self) -> usize {
        self.m
    }

    /// Exact rational coefficients of piece `j` in the local variable.
    pub fn exact_piece(&self, j: usize) -> &[BigRational] {
        &self.exact[j]
    }

    /// `ψ^{(r)}(x)`; zero outside `[0, m+1)`. Half-open pieces make knot values one-sided.
    #[inline]
    pub fn eval(&self, x: f64, r: usize) -> f64 {
        if !(x >= 0.0) || r > self.m {
            return 0.0;
        }
        let j = x.floor();
        if j > self.m as f64 {
            return 0.0;
        }
        let j = j as usize;
        let u = x - j as f64;
        let c = &self.derivs[r][j];
        c.iter().rev().fold(0.0, |acc, &a| acc * u + a)
    }

    /// Exact integral over the support.
    pub fn integral(&self) -> BigRational {
        self.exact
            .iter()
            .map(|p| antiderivative(p).into_iter().sum::<BigRational>())
            .sum()
    }
}

fn antiderivative(p: &[BigRational]) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(p.len() + 1);
    out.push(BigRational::zero());
    for (i, c) in p.iter().enumerate() {
        out.push(c / BigRational::from_integer(BigInt::from(i + 1)));
    }
    out
}

fn differentiate(p: &[BigRational]) -> Vec<BigRational> {
    if p.len() <= 1 {
        return vec![BigRational::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
        .collect()
}

/// Exact refinement weights `a_μ = 2^{-m} C(m+1, μ)`, `μ = 0..=m+1`.
pub fn refinement_coeffs_exact(m: usize) -> Vec<BigRational> {
    let denom = BigInt::one() << m;
    (0..=m + 1)
        .map(|mu| {
            BigRational::new(
                BigInt::from(crate::polynomials::binom(m as u32 + 1, mu as u32)),
                denom.clone(),
            )
        })
        .collect()
}

/// Refinement weights in floating point (exact: dyadic rationals).
pub fn refinement_coeffs(m: usize) -> Vec<f64> {
    refinement_coeffs_exact(m)
        .iter()
        .map(|c| c.to_f64().expect("finite"))
        .collect()
}

/// Tensor weight `A_μ = Π_j a_{μ_j}`.
pub fn tensor_weight(m: usize, mu: &[usize]) -> f64 {
    let a = refinement_coeffs(m);
    mu.iter().map(|&v| a[v]).product()
}

/// `ψ^{m,d}(x) = Π_j ψ^{m,1}(x_j)`.
pub fn tensor_eval(m: usize, x: &[f64]) -> Result<f64> {
    let s = CardinalBSpline::get(m)?;
    Ok(x.iter().map(|&v| s.eval(v, 0)).product())
}

/// `𝒟^λ g_{k,ν}^{m,d}(x) = 2^{k|λ|} Π_j ψ^{(λ_j)}(2^k x_j - ν_j)`.
pub fn basis_eval(m: usize, k: u32, nu: &[i64], x: &[f64], lambda: Option<&[u32]>) -> Result<f64> {
    if nu.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: nu.len(),
            found: x.len(),
        });
    }
    let s = CardinalBSpline::get(m)?;
    if let Some(lam) = lambda {
        if lam.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: lam.len(),
            });
        }
        if lam.iter().any(|&r| r as usize > m) {
            return Err(Error::DerivativeOutOfRange {
                order: lam.to_vec(),
                m,
            });
        }
    }
    let scale = (k as f64).exp2();
    let mut v = 1.0;
    for j in 0..x.len() {
        let r = lambda.map_or(0, |l| l[j] as usize);
        v *= scale.powi(r as i32) * s.eval(scale * x[j] - nu[j] as f64, r);
    }
    Ok(v)
}

/// `ψ^{m,d}(x) - Σ_μ A_μ ψ^{m,d}(2x - μ)`.
pub fn refinement_check(m: usize, x: &[f64]) -> Result<f64> {
    let s = CardinalBSpline::get(m)?;
    let a = refinement_coeffs(m);
    let lhs: f64 = x.iter().map(|&v| s.eval(v, 0)).product();
    // The sum factorizes per axis.
    let rhs: f64 = x
        .iter()
        .map(|&v| {
            a.iter()
                .enumerate()
                .map(|(mu, w)| w * s.eval(2.0 * v - mu as f64, 0))
                .sum::<f64>()
        })
        .product();
    Ok(lhs - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn low_orders_by_hand() {
        let s0 = CardinalBSpline::build(0).unwrap();
        assert_eq!(s0.eval(0.0, 0), 1.0);
        assert_eq!(s0.eval(0.999, 0), 1.0);
        assert_eq!(s0.eval(1.0, 0), 0.0);
        assert_eq!(s0.eval(-1e-9, 0), 0.0);

        let s1 = CardinalBSpline::build(1).unwrap();
        assert_eq!(s1.exact_piece(0), &[r(0, 1), r(1, 1)]);
        // 2 - x on [1, 2) is 1 - u in the local variable.
        assert_eq!(s1.exact_piece(1), &[r(1, 1), r(-1, 1)]);
        assert_eq!(s1.eval(1.0, 0), 1.0);
        assert_eq!(s1.eval(0.5, 0), 0.5);

        let s2 = CardinalBSpline::build(2).unwrap();
        assert_eq!(s2.exact_piece(0), &[r(0, 1), r(0, 1), r(1, 2)]);
        assert_eq!(s2.exact_piece(1), &[r(1, 2), r(1, 1), r(-1, 1)]);
        assert_eq!(s2.exact_piece(2), &[r(1, 2), r(-1, 1), r(1, 2)]);
    }

    #[test]
    fn unit_mass() {
        for m in 0..=MAX_ORDER {
            assert_eq!(CardinalBSpline::get(m).unwrap().integral(), BigRational::one());
        }
        assert!(matches!(CardinalBSpline::build(9), Err(Error::OrderOutOfRange(9))));
    }

    #[test]
    fn weights() {
        assert_eq!(refinement_coeffs(0), vec![1.0, 1.0]);
        assert_eq!(refinement_coeffs(1), vec![0.5, 1.0, 0.5]);
        for m in 0..=6 {
            let a = refinement_coeffs_exact(m);
            let even: BigRational = a.iter().step_by(2).cloned().sum();
            let odd: BigRational = a.iter().skip(1).step_by(2).cloned().sum();
            assert_eq!(even, BigRational::one());
            assert_eq!(odd, BigRational::one());
        }
    }

    #[test]
    fn continuity_at_knots() {
        for m in 1..=MAX_ORDER {
            let s = CardinalBSpline::get(m).unwrap();
            for r in 0..m {
                for j in 1..=m {
                    let left = s.eval(j as f64 - 1e-12, r);
                    let right = s.eval(j as f64, r);
                    let scale = 1.0 + right.abs();
                    assert!((left - right).abs() < 1e-8 * scale, "m={m} r={r} j={j}");
                }
            }
        }
    }

    #[test]
    fn positivity_exactly_on_open_support() {
        for m in 0..=4 {
            let s = CardinalBSpline::get(m).unwrap();
            for i in -20..=(20 * (m as i32 + 2)) {
                let x = i as f64 / 20.0 + 1.0 / 97.0;
                let v = s.eval(x, 0);
                if x > 0.0 && x < (m + 1) as f64 {
                    assert!(v > 0.0);
                } else {
                    assert_eq!(v, 0.0);
                }
            }
        }
    }

    #[test]
    fn basis_support_and_peak() {
        assert_eq!(basis_eval(1, 0, &[0], &[1.0], None).unwrap(), 1.0);
        // Support of g_{2,(1,-1)} for m = 2 is [1/4, 1] x [-1/4, 1/2].
        assert_eq!(basis_eval(2, 2, &[1, -1], &[1.01, 0.0], None).unwrap(), 0.0);
        assert_eq!(basis_eval(2, 2, &[1, -1], &[0.5, 0.6], None).unwrap(), 0.0);
        assert!(basis_eval(2, 2, &[1, -1], &[0.5, 0.1], None).unwrap() > 0.0);
        assert!(matches!(
            basis_eval(1, 0, &[0], &[0.5], Some(&[2])),
            Err(Error::DerivativeOutOfRange { .. })
        ));
    }

    #[test]
    fn derivative_scaling_is_level_independent() {
        let m = 3;
        let mut reference: Option<f64> = None;
        for k in 0..=4u32 {
            let h = (-(k as f64)).exp2();
            let mut best: f64 = 0.0;
            for i in 0..=400 {
                let x = h * (m as f64 + 1.0) * i as f64 / 400.0;
                let v = basis_eval(m, k, &[0], &[x], Some(&[2])).unwrap();
                best = best.max(v.abs() / (k as f64 * 2.0).exp2());
            }
            let r = *reference.get_or_insert(best);
            assert!((best / r - 1.0).abs() < 0.05);
        }
    }

    proptest! {
        #[test]
        fn symmetric(m in 0usize..=6, x in 0.0f64..7.0) {
            let s = CardinalBSpline::get(m).unwrap();
            let y = (m + 1) as f64 - x;
            // Skip knots where the half-open convention breaks symmetry.
            prop_assume!((x - x.round()).abs() > 1e-9);
            prop_assert!((s.eval(x, 0) - s.eval(y, 0)).abs() < 1e-12);
        }

        #[test]
        fn partition_of_unity(m in 0usize..=5, x in -10.0f64..10.0) {
            let s = CardinalBSpline::get(m).unwrap();
            let sum: f64 = ((x.floor() as i64 - m as i64)..=x.floor() as i64)
                .map(|nu| s.eval(x - nu as f64, 0))
                .sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }

        #[test]
        fn refinement_residual(m in 1usize..=4, x in -1.0f64..6.0, y in -1.0f64..6.0) {
            prop_assert!(refinement_check(m, &[x, y]).unwrap().abs() < 1e-12);
        }
    }
}
