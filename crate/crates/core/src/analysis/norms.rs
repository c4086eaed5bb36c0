//! `L_p` and Sobolev norms over domains, finite differences.

use crate::analysis::quadrature::{check_exponent, NodeSet, QuadratureSpec};
use crate::field::ScalarField;
use crate::geometry::Domain;
use crate::polynomials::{multi_indices, order, MultiIndex};
use crate::{Error, Result};

fn cuts_of(f: &(impl ScalarField + ?Sized), d: usize) -> Vec<Vec<f64>> {
    (0..d).map(|j| f.breakpoints(j)).collect()
}

/// Node set for `D` that also splits cells at the breakpoints of `f`.
pub fn nodes_for(f: &(impl ScalarField + ?Sized), domain: &Domain, spec: &QuadratureSpec) -> NodeSet {
    NodeSet::for_domain(domain, spec, &cuts_of(f, domain.dim()))
}

/// `‖f‖_{L_p(D)}`.
pub fn lp_norm(f: &(impl ScalarField + ?Sized), domain: &Domain, p: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_exponent(p)?;
    check_dim(f.dim(), domain.dim())?;
    nodes_for(f, domain, spec).lp_norm(f, p)
}

fn check_dim(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: b, found: a });
    }
    Ok(())
}

/// Multi-indices of order exactly `order_m`.
pub fn exact_order(d: usize, order_m: u32) -> Vec<MultiIndex> {
    multi_indices(d, order_m)
        .into_iter()
        .filter(|l| order(l) == order_m)
        .collect()
}

/// `max(‖f‖_{L_q}, max_{|λ| = 𝔪} ‖𝒟^λ f‖_{L_q})` with exact derivatives.
pub fn sobolev_norm(
    f: &(impl ScalarField + ?Sized),
    domain: &Domain,
    q: f64,
    order_m: u32,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let nodes = nodes_for(f, domain, spec);
    sobolev_norm_on(f, &nodes, q, order_m)
}

/// [`sobolev_norm`] on a prepared node set.
pub fn sobolev_norm_on(f: &(impl ScalarField + ?Sized), nodes: &NodeSet, q: f64, order_m: u32) -> Result<f64> {
    let mut best = nodes.lp_norm(f, q)?;
    if order_m == 0 {
        return Ok(best);
    }
    for lambda in exact_order(nodes.dim(), order_m) {
        if let Some((x, _)) = nodes.iter().next() {
            if f.derivative(x, &lambda).is_none() {
                return Err(Error::DerivativeUnavailable(lambda));
            }
        }
        let v = nodes.lp_norm_of(|x| f.derivative(x, &lambda).unwrap_or(f64::NAN), q)?;
        best = best.max(v);
    }
    Ok(best)
}

/// `(Δ_ξ^l f)(x) = Σ_i C(l,i) (-1)^{l-i} f(x + iξ)`, without domain guard.
pub fn difference_unchecked(f: &(impl ScalarField + ?Sized), xi: &[f64], l: u32, x: &[f64]) -> f64 {
    let mut y = x.to_vec();
    let mut s = 0.0;
    for i in 0..=l {
        let c = crate::polynomials::binom(l, i) as f64;
        let sign = if (l - i).is_multiple_of(2) { 1.0 } else { -1.0 };
        for j in 0..x.len() {
            y[j] = x[j] + i as f64 * xi[j];
        }
        s += sign * c * f.value(&y);
    }
    s
}

/// Whether `x + s·lξ ∈ D` for `s ∈ [0, 1]`, tested at the segment ends and `samples` interior points.
///
/// Exact for convex catalog domains, where the endpoints decide.
pub fn guard(domain: &Domain, l: u32, xi: &[f64], x: &[f64], samples: usize) -> bool {
    if !domain.contains(x) {
        return false;
    }
    let end: Vec<f64> = x.iter().zip(xi).map(|(a, b)| a + l as f64 * b).collect();
    if !domain.contains(&end) {
        return false;
    }
    if domain.is_convex() {
        return true;
    }
    let mut y = x.to_vec();
    (1..=samples).all(|i| {
        let s = i as f64 / (samples + 1) as f64;
        for j in 0..x.len() {
            y[j] = x[j] + s * l as f64 * xi[j];
        }
        domain.contains(&y)
    })
}

/// `(Δ_ξ^l f)(x)` for `x ∈ D_{lξ}`; `None` when the guard excludes `x`.
pub fn difference(
    f: &(impl ScalarField + ?Sized),
    xi: &[f64],
    l: u32,
    x: &[f64],
    domain: &Domain,
) -> Option<f64> {
    guard(domain, l, xi, x, 8).then(|| difference_unchecked(f, xi, l, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::functions::{Factor, Side, TestFunction};
    use crate::FnField;

    #[test]
    fn lp_norm_examples() {
        let spec = QuadratureSpec::default();
        let one = FnField::new(3, |_| 1.0);
        assert!((lp_norm(&one, &Domain::unit_cube(3), 2.0, &spec).unwrap() - 1.0).abs() < 1e-10);
        let x = FnField::new(1, |x: &[f64]| x[0]);
        let v = lp_norm(&x, &Domain::unit_cube(1), 2.0, &spec).unwrap();
        assert!((v - 3f64.powf(-0.5)).abs() < 1e-8);
    }

    #[test]
    fn holder_on_unit_measure_domain() {
        let spec = QuadratureSpec::default();
        let d = Domain::unit_cube(2);
        for i in 0..20 {
            let f = TestFunction::Tensor {
                factors: vec![
                    Factor::Cusp { beta: 0.3 + 0.1 * i as f64, anchor: 0.5, side: Side::Odd },
                    Factor::Sine { freq: 1.0 + i as f64, phase: 0.2 },
                ],
                scale: 1.0,
            };
            let n1 = lp_norm(&f, &d, 1.0, &spec).unwrap();
            let n2 = lp_norm(&f, &d, 2.0, &spec).unwrap();
            assert!(n1 <= n2 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn sobolev_examples() {
        let spec = QuadratureSpec::default();
        let d = Domain::unit_cube(1);
        let f = TestFunction::Polynomial { dim: 1, terms: vec![(vec![1], 1.0)] };
        assert!((sobolev_norm(&f, &d, f64::INFINITY, 1, &spec).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            sobolev_norm(&f, &d, 2.0, 0, &spec).unwrap(),
            lp_norm(&f, &d, 2.0, &spec).unwrap()
        );
        let g = FnField::new(1, |x: &[f64]| x[0]);
        assert!(matches!(sobolev_norm(&g, &d, 2.0, 1, &spec), Err(Error::DerivativeUnavailable(_))));
    }

    #[test]
    fn difference_examples() {
        let d = Domain::unit_cube(1);
        let x = FnField::new(1, |x: &[f64]| x[0]);
        assert!((difference(&x, &[0.1], 1, &[0.3], &d).unwrap() - 0.1).abs() < 1e-15);
        let sq = FnField::new(1, |x: &[f64]| x[0] * x[0]);
        assert!((difference(&sq, &[0.1], 2, &[0.2], &d).unwrap() - 0.02).abs() < 1e-15);
        assert!(difference(&sq, &[0.3], 2, &[0.5], &d).is_none());
        let lin = FnField::new(1, |x: &[f64]| 3.0 * x[0] - 1.0);
        assert!(difference(&lin, &[0.05], 2, &[0.1], &d).unwrap().abs() < 1e-14);
    }

    #[test]
    fn guard_on_nonconvex_domain() {
        let l = Domain::l_shape();
        // Both ends inside, the segment crosses the removed quadrant.
        assert!(!guard(&l, 1, &[0.5, 0.5], &[0.4, 0.4], 8));
        assert!(guard(&l, 1, &[0.0, 0.5], &[0.2, 0.1], 8));
    }
}
