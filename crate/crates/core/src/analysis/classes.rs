//! Nikolskii and Besov class norms, smoothness measurement and rate fits.

use serde::{Deserialize, Serialize};

use crate::analysis::moduli::modulus_avg;
use crate::analysis::norms::lp_norm;
use crate::analysis::quadrature::QuadratureSpec;
use crate::field::ScalarField;
use crate::geometry::Domain;
use crate::{Error, Result};

/// `(α, p, θ)`; `θ = None` is the Nikolskii case `θ = ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SmoothnessClass {
    pub alpha: f64,
    pub p: f64,
    #[serde(default)]
    pub theta: Option<f64>,
}

impl SmoothnessClass {
    pub fn new(alpha: f64, p: f64, theta: Option<f64>) -> Result<Self> {
        let c = SmoothnessClass { alpha, p, theta };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return Err(Error::param("alpha", "must be positive and finite"));
        }
        if !(self.p > 1.0) || !self.p.is_finite() {
            return Err(Error::param("p", "class norms need 1 < p < ∞"));
        }
        if let Some(t) = self.theta {
            if !(t >= 1.0) {
                return Err(Error::param("theta", "must be at least 1"));
            }
        }
        Ok(())
    }

    /// `l(α) = min{m ∈ ℕ : α < m}`.
    pub fn l(&self) -> u32 {
        l_of(self.alpha)
    }

    pub fn is_nikolskii(&self) -> bool {
        self.theta.is_none_or(f64::is_infinite)
    }
}

/// Smallest integer strictly above `α`.
pub fn l_of(alpha: f64) -> u32 {
    alpha.floor() as u32 + 1
}

/// Primed class norm on the dyadic grid `t = 2^{-j}`, `j ∈ js`.
///
/// Nikolskii: `max(‖f‖, max_j 2^{jα} Ω′(2^{-j}))`. Besov: blocks
/// `[2^{-j}, 2^{-j+1}]` use the left endpoint; the part `t > 2^{-j_min+1}`
/// is closed analytically with `Ω′` bounded by its largest grid value
/// (itself at most `2^l ‖f‖`).
pub fn class_norm(
    f: &(impl ScalarField + ?Sized),
    domain: &Domain,
    cls: &SmoothnessClass,
    spec: &QuadratureSpec,
    js: std::ops::RangeInclusive<i32>,
) -> Result<f64> {
    cls.validate()?;
    if js.is_empty() {
        return Err(Error::param("t_levels", "grid must be nonempty"));
    }
    let l = cls.l();
    let base = lp_norm(f, domain, cls.p, spec)?;
    let mut mods = Vec::new();
    for j in js.clone() {
        mods.push((j, modulus_avg(f, domain, l, (-(j as f64)).exp2(), cls.p, spec)?));
    }
    let a = cls.alpha;
    let seminorm = match cls.theta.filter(|t| t.is_finite()) {
        None => mods.iter().fold(0.0_f64, |m, &(j, w)| m.max((j as f64 * a).exp2() * w)),
        Some(theta) => {
            let ta = theta * a;
            let block = (1.0 - (-ta).exp2()) / ta;
            let mut s: f64 = mods.iter().map(|&(j, w)| (j as f64 * ta).exp2() * block * w.powf(theta)).sum();
            let top = mods.iter().fold(0.0_f64, |m, &(_, w)| m.max(w)).min((l as f64).exp2() * base);
            let big_t = (-(*js.start() as f64) + 1.0).exp2();
            s += top.powf(theta) * big_t.powf(-ta) / ta;
            s.powf(1.0 / theta)
        }
    };
    Ok(base.max(seminorm))
}

/// Least-squares line through `(x_i, log₂ v_i)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub levels: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

pub fn fit_rate(levels: &[f64], values: &[f64]) -> Result<RateFit> {
    if levels.len() != values.len() {
        return Err(Error::DimensionMismatch { expected: levels.len(), found: values.len() });
    }
    if values.len() < 3 {
        return Err(Error::TooFewPoints(values.len()));
    }
    if let Some((i, &v)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::NonPositiveValue(v, i));
    }
    let n = levels.len() as f64;
    let ys: Vec<f64> = values.iter().map(|v| v.log2()).collect();
    let mx = levels.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = levels.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::param("levels", "need at least two distinct abscissae"));
    }
    let sxy: f64 = levels.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = levels
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Ok(RateFit {
        levels: levels.to_vec(),
        values: values.to_vec(),
        slope,
        intercept,
        max_residual,
    })
}

/// Fit of `log₂ Ω′^l(f, 2^{-j})` against `log₂ t = -j`; the slope is `α̂`.
pub fn measure_smoothness_fit(
    f: &(impl ScalarField + ?Sized),
    domain: &Domain,
    p: f64,
    l: u32,
    js: std::ops::RangeInclusive<i32>,
    spec: &QuadratureSpec,
) -> Result<RateFit> {
    let scale = lp_norm(f, domain, p, spec)?.max(1.0);
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for j in js {
        let w = modulus_avg(f, domain, l, (-(j as f64)).exp2(), p, spec)?;
        if w <= 1e-11 * scale {
            return Err(Error::DegenerateModulus);
        }
        xs.push(-(j as f64));
        vs.push(w);
    }
    fit_rate(&xs, &vs)
}

/// `α̂` with `Ω′^l(f, t) ≈ C t^α̂` on the grid.
pub fn measure_smoothness(
    f: &(impl ScalarField + ?Sized),
    domain: &Domain,
    p: f64,
    l: u32,
    js: std::ops::RangeInclusive<i32>,
    spec: &QuadratureSpec,
) -> Result<f64> {
    Ok(measure_smoothness_fit(f, domain, p, l, js, spec)?.slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::functions::{Factor, Side, TestFunction};

    #[test]
    fn l_of_alpha() {
        assert_eq!(l_of(0.5), 1);
        assert_eq!(l_of(1.0), 2);
        assert_eq!(l_of(1.25), 2);
        assert_eq!(l_of(2.999), 3);
    }

    #[test]
    fn fit_rate_examples() {
        let ks = [1.0, 2.0, 3.0, 4.0];
        let v: Vec<f64> = ks.iter().map(|k| (-2.0_f64 * k).exp2()).collect();
        assert_eq!(fit_rate(&ks, &v).unwrap().slope, -2.0);
        assert_eq!(fit_rate(&ks, &[3.0; 4]).unwrap().slope, 0.0);
        let mut w = v.clone();
        w[2] *= 1.05;
        assert!((fit_rate(&ks, &w).unwrap().slope + 2.0).abs() < 0.05);
        assert!(matches!(fit_rate(&ks[..2], &v[..2]), Err(Error::TooFewPoints(2))));
        assert!(matches!(fit_rate(&ks, &[1.0, 0.0, 1.0, 1.0]), Err(Error::NonPositiveValue(_, 1))));
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec { xi_samples: 256, ..Default::default() }
    }

    #[test]
    fn zero_and_polynomial_norms() {
        let d = Domain::unit_cube(1);
        let cls = SmoothnessClass::new(1.5, 2.0, Some(2.0)).unwrap();
        let zero = TestFunction::Polynomial { dim: 1, terms: vec![] };
        assert_eq!(class_norm(&zero, &d, &cls, &spec(), 0..=6).unwrap(), 0.0);
        let lin = TestFunction::Polynomial { dim: 1, terms: vec![(vec![0], 1.0), (vec![1], 2.0)] };
        let n = lp_norm(&lin, &d, 2.0, &spec()).unwrap();
        for c in [cls, SmoothnessClass::new(1.5, 2.0, None).unwrap()] {
            let v = class_norm(&lin, &d, &c, &spec(), 0..=6).unwrap();
            assert!((v - n).abs() < 1e-9 * n, "{v} vs {n}");
        }
    }

    #[test]
    fn nikolskii_bounded_by_besov() {
        let d = Domain::unit_cube(1);
        let mut ratios = Vec::new();
        for i in 0..10 {
            let beta = 0.8 + 0.07 * i as f64;
            let f = TestFunction::cusp_1d(beta, 0.25 + 0.05 * i as f64, Side::Both);
            let alpha = 1.0;
            let h = class_norm(&f, &d, &SmoothnessClass::new(alpha, 2.0, None).unwrap(), &spec(), 0..=8).unwrap();
            let b = class_norm(&f, &d, &SmoothnessClass::new(alpha, 2.0, Some(1.0)).unwrap(), &spec(), 0..=8).unwrap();
            ratios.push(h / b);
        }
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(max <= 4.0 && max / min < 4.0, "{ratios:?}");
    }

    #[test]
    fn cusp_smoothness() {
        let f = TestFunction::cusp_1d(0.75, 0.5, Side::Right);
        let a = measure_smoothness(&f, &Domain::unit_cube(1), 2.0, 2, 4..=10, &spec()).unwrap();
        assert!((a - 1.25).abs() < 0.1, "{a}");
    }

    #[test]
    fn smooth_saturates_at_l() {
        let f = TestFunction::Tensor {
            factors: vec![Factor::Sine { freq: 1.0, phase: 0.3 }],
            scale: 1.0,
        };
        let a = measure_smoothness(&f, &Domain::unit_cube(1), 2.0, 2, 4..=10, &spec()).unwrap();
        assert!((a - 2.0).abs() < 0.15, "{a}");
    }

    #[test]
    fn linear_is_degenerate_for_second_differences() {
        let f = TestFunction::Polynomial { dim: 1, terms: vec![(vec![1], 1.0)] };
        assert!(matches!(
            measure_smoothness(&f, &Domain::unit_cube(1), 2.0, 2, 2..=6, &spec()),
            Err(Error::DegenerateModulus)
        ));
    }
}
