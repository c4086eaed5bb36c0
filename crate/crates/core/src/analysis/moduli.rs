//! Averaged and sup moduli of smoothness.
//!
//! Both moduli share one set of shift vectors so that the averaged value never
//! exceeds the sup value as computed.

use crate::analysis::norms::{difference_unchecked, guard};
use crate::analysis::quadrature::{check_exponent, halton_points, NodeSet, QuadratureSpec};
use crate::field::ScalarField;
use crate::geometry::Domain;
use crate::{Error, Result};

/// `Ω′^l(f, t)` and `Ω^l(f, t)` at one `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModulusPoint {
    pub t: f64,
    pub avg: f64,
    pub sup: f64,
}

/// Shift vectors `ξ ∈ [-t, t]^d` from a shifted Halton sequence.
pub fn shift_samples(d: usize, t: f64, spec: &QuadratureSpec) -> Vec<Vec<f64>> {
    halton_points(d, spec.xi_samples, spec.seed)
        .into_iter()
        .map(|u| u.into_iter().map(|v| t * (2.0 * v - 1.0)).collect())
        .collect()
}

/// Extra shifts for the sup: the grid `{-1, -1/2, 0, 1/2, 1}^d · t`.
fn grid_shifts(d: usize, t: f64) -> Vec<Vec<f64>> {
    const STEPS: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];
    crate::geometry::index_box(&vec![0; d], &vec![4; d])
        .into_iter()
        .map(|i| i.iter().map(|&s| STEPS[s as usize] * t).collect())
        .collect()
}

/// Cuts at `c - iξ_j` for every breakpoint `c`, graded geometrically towards
/// singular points so that a Gauss rule resolves features of width `|lξ_j|`.
fn shifted_cuts(f: &(impl ScalarField + ?Sized), xi: &[f64], l: u32, level: u32) -> Vec<Vec<f64>> {
    let h = (-(level as f64)).exp2();
    (0..xi.len())
        .map(|j| {
            let mut out = Vec::new();
            for c in f.breakpoints(j) {
                for i in 0..=l {
                    out.push(c - i as f64 * xi[j]);
                }
            }
            let s = (xi[j] * l as f64).abs();
            for c in f.singularities(j) {
                for i in 0..=l {
                    let base = c - i as f64 * xi[j];
                    out.push(base);
                    if s > 0.0 {
                        let mut r = s;
                        while r < h {
                            out.push(base - r);
                            out.push(base + r);
                            r *= 2.0;
                        }
                    }
                }
            }
            out
        })
        .collect()
}

/// `∫_{D_{lξ}} |Δ_ξ^l f|^p` (or the max when `p = ∞`).
pub fn shifted_integral(
    f: &(impl ScalarField + ?Sized),
    domain: &Domain,
    base: Option<&NodeSet>,
    xi: &[f64],
    l: u32,
    p: f64,
    spec: &QuadratureSpec,
) -> f64 {
    let power = |v: f64| if p.is_infinite() { v.abs() } else { v.abs().powf(p) };
    let combine = |acc: f64, w: f64, v: f64| if p.is_infinite() { acc.max(v) } else { acc + w * v };
    if domain.is_box() {
        let (a, b) = domain.bbox();
        let lo: Vec<f64> = a.iter().zip(xi).map(|(a, x)| a - (l as f64 * x).min(0.0)).collect();
        let hi: Vec<f64> = b.iter().zip(xi).map(|(b, x)| b - (l as f64 * x).max(0.0)).collect();
        if lo.iter().zip(&hi).any(|(a, b)| a >= b) {
            return 0.0;
        }
        let nodes = NodeSet::for_box(&lo, &hi, spec.level, &shifted_cuts(f, xi, l, spec.level), spec.points);
        return nodes
            .iter()
            .fold(0.0, |acc, (x, w)| combine(acc, w, power(difference_unchecked(f, xi, l, x))));
    }
    let owned;
    let nodes = match base {
        Some(n) => n,
        None => {
            owned = crate::analysis::norms::nodes_for(f, domain, spec);
            &owned
        }
    };
    nodes.iter().fold(0.0, |acc, (x, w)| {
        if guard(domain, l, xi, x, spec.guard_samples) {
            combine(acc, w, power(difference_unchecked(f, xi, l, x)))
        } else {
            acc
        }
    })
}

fn root(s: f64, p: f64) -> f64 {
    if p.is_infinite() {
        s
    } else {
        s.powf(1.0 / p)
    }
}

fn check(l: u32, t: f64, p: f64) -> Result<()> {
    check_exponent(p)?;
    if l == 0 {
        return Err(Error::param("l", "difference order must be positive"));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::param("t", "must be positive and finite"));
    }
    Ok(())
}

/// Both moduli at a single `t`.
pub fn modulus_pair(
    f: &(impl ScalarField + ?Sized),
    domain: &Domain,
    l: u32,
    t: f64,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<ModulusPoint> {
    check(l, t, p)?;
    let d = domain.dim();
    if f.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: f.dim() });
    }
    let base = (!domain.is_box()).then(|| crate::analysis::norms::nodes_for(f, domain, spec));
    let mut sum: f64 = 0.0;
    let mut sup: f64 = 0.0;
    let samples = shift_samples(d, t, spec);
    for xi in &samples {
        let s = shifted_integral(f, domain, base.as_ref(), xi, l, p, spec);
        sum = if p.is_infinite() { sum.max(s) } else { sum + s };
        sup = sup.max(s);
    }
    for xi in grid_shifts(d, t) {
        sup = sup.max(shifted_integral(f, domain, base.as_ref(), &xi, l, p, spec));
    }
    let avg = if p.is_infinite() { sum } else { sum / samples.len() as f64 };
    Ok(ModulusPoint {
        t,
        avg: root(avg, p),
        sup: root(sup, p),
    })
}

/// `Ω′^l(f, t)_{L_p(D)}`: mean over shifts of `‖Δ_ξ^l f‖_{L_p(D_{lξ})}^p`, then the `1/p` power.
pub fn modulus_avg(
    f: &(impl ScalarField + ?Sized),
    domain: &Domain,
    l: u32,
    t: f64,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if p.is_infinite() {
        return Err(Error::InvalidExponent(p));
    }
    Ok(modulus_pair(f, domain, l, t, p, spec)?.avg)
}

/// `Ω^l(f, t)_{L_p(D)}` over the sampled shifts; a lower bound for the essential sup.
pub fn modulus_sup(
    f: &(impl ScalarField + ?Sized),
    domain: &Domain,
    l: u32,
    t: f64,
    p: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    Ok(modulus_pair(f, domain, l, t, p, spec)?.sup)
}

/// Moduli over increasing `ts`; the sup column is made nondecreasing by a running max.
pub fn modulus_profile(
    f: &(impl ScalarField + ?Sized),
    domain: &Domain,
    l: u32,
    ts: &[f64],
    p: f64,
    spec: &QuadratureSpec,
) -> Result<Vec<ModulusPoint>> {
    let mut order: Vec<usize> = (0..ts.len()).collect();
    order.sort_by(|&a, &b| ts[a].total_cmp(&ts[b]));
    let mut out = vec![ModulusPoint { t: 0.0, avg: 0.0, sup: 0.0 }; ts.len()];
    let mut running: f64 = 0.0;
    for i in order {
        let mut pt = modulus_pair(f, domain, l, ts[i], p, spec)?;
        running = running.max(pt.sup);
        pt.sup = running;
        out[i] = pt;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::functions::{affine_pullback, Factor, Side, TestFunction};
    use crate::analysis::norms::lp_norm;
    use crate::FnField;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn linear_function_closed_form() {
        let x = TestFunction::Polynomial { dim: 1, terms: vec![(vec![1], 1.0)] };
        let d = Domain::unit_cube(1);
        for t in [0.1, 0.25, 0.5, 1.0] {
            let v = modulus_avg(&x, &d, 1, t, 1.0, &spec()).unwrap();
            let want = t / 2.0 - t * t / 3.0;
            assert!((v - want).abs() < 1e-6, "t={t}: {v} vs {want}");
        }
    }

    #[test]
    fn polynomials_are_annihilated() {
        let q = TestFunction::Polynomial { dim: 2, terms: vec![(vec![0, 0], 1.0), (vec![1, 0], 2.0), (vec![0, 1], -1.0)] };
        let d = Domain::unit_cube(2);
        let s = QuadratureSpec { xi_samples: 64, ..spec() };
        let m = modulus_pair(&q, &d, 2, 0.2, 2.0, &s).unwrap();
        assert!(m.avg < 1e-9 && m.sup < 1e-9);
        let ball = Domain::ball(vec![0.5, 0.5], 0.5).unwrap();
        assert!(modulus_sup(&q, &ball, 2, 0.2, 2.0, &s).unwrap() < 1e-9);
    }

    #[test]
    fn averaged_never_exceeds_sup() {
        let s = QuadratureSpec { xi_samples: 64, ..spec() };
        for i in 0..20 {
            let beta = 0.3 + 0.07 * i as f64;
            let f = TestFunction::cusp_1d(beta, 0.5, Side::Both);
            let t = 0.02 * (i + 1) as f64;
            let m = modulus_pair(&f, &Domain::unit_cube(1), 1 + (i % 2), t, 2.0, &s).unwrap();
            assert!(m.avg <= m.sup, "{m:?}");
        }
    }

    #[test]
    fn sup_profile_is_monotone_and_bounded() {
        let f = TestFunction::cusp_1d(0.6, 0.375, Side::Right);
        let d = Domain::unit_cube(1);
        let s = QuadratureSpec { xi_samples: 128, ..spec() };
        let ts: Vec<f64> = (0..8).map(|j| (-(j as f64)).exp2()).collect();
        let prof = modulus_profile(&f, &d, 2, &ts, 2.0, &s).unwrap();
        let mut sorted = prof.clone();
        sorted.sort_by(|a, b| a.t.total_cmp(&b.t));
        for w in sorted.windows(2) {
            assert!(w[0].sup <= w[1].sup);
        }
        let norm = lp_norm(&f, &d, 2.0, &s).unwrap();
        for pt in &prof {
            assert!(pt.avg <= 4.0 * norm);
        }
    }

    #[test]
    fn scaling_law_under_pullback() {
        let f = TestFunction::Tensor {
            factors: vec![Factor::Cusp { beta: 0.75, anchor: 0.9, side: Side::Right }],
            scale: 1.0,
        };
        let delta = 0.5;
        let origin = vec![0.5];
        let d = Domain::unit_cube(1);
        let image = Domain::scaled(origin.clone(), delta, d.clone()).unwrap();
        let s = QuadratureSpec { xi_samples: 256, ..spec() };
        let t = 0.2;
        let p = 2.0;
        let lhs = modulus_avg(&affine_pullback(&f, delta, origin), &d, 2, t, p, &s).unwrap();
        let rhs = delta.powf(-1.0 / p) * modulus_avg(&f, &image, 2, delta * t, p, &s).unwrap();
        assert!((lhs / rhs - 1.0).abs() < 0.02, "{lhs} vs {rhs}");
    }

    #[test]
    fn rejects_bad_arguments() {
        let f = FnField::new(1, |x: &[f64]| x[0]);
        let d = Domain::unit_cube(1);
        assert!(modulus_avg(&f, &d, 1, 0.1, f64::INFINITY, &spec()).is_err());
        assert!(modulus_avg(&f, &d, 1, 0.0, 2.0, &spec()).is_err());
        assert!(modulus_avg(&f, &d, 0, 0.1, 2.0, &spec()).is_err());
    }
}
