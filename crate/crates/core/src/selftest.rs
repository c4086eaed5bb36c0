//! Deterministic invariant suite. Each check is a function sized by its
//! arguments, so the same code backs `besov selftest` (small sizes) and the
//! acceptance suite (full sizes).

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analysis::functions::{Side, TestFunction};
use crate::analysis::moduli::modulus_avg;
use crate::analysis::norms::lp_norm;
use crate::analysis::quadrature::QuadratureSpec;
use crate::bsplines::{basis_eval, refinement_coeffs, refinement_coeffs_exact, CardinalBSpline};
use crate::field::{Combination, ScalarField};
use crate::geometry::{index_box, interior_cells, interior_chain_search, segment_chain, validate_chain, Domain, Shift};
use crate::multiscale::{parity_stencil, Scheme, SplineField};
use crate::operators::{extend, interpolation_residual, recovery, sample_points, StechkinOperator};
use crate::polynomials::{indices, Polynomial};
use crate::Result;

/// One named invariant with its worst observed value and the bound it must meet.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub bound: f64,
    pub detail: String,
}

impl Outcome {
    fn at_most(name: &str, value: f64, bound: f64, detail: impl Into<String>) -> Self {
        Outcome {
            name: name.into(),
            passed: value <= bound,
            value,
            bound,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Outcome>,
}

impl SelftestReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> Result<String> {
        crate::operators::experiments::rows_to_csv(&self.checks)
    }
}

fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn random_poly(d: usize, degree: u32, rng: &mut impl Rng) -> Polynomial {
    let n = indices(d, degree).len();
    Polynomial::from_coeffs(d, degree, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).expect("sizes match")
}

fn random_point_in(domain: &Domain, rng: &mut impl Rng) -> Vec<f64> {
    let (lo, hi) = domain.bbox();
    loop {
        let x: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| rng.gen_range(*a..*b)).collect();
        if domain.contains(&x) {
            return x;
        }
    }
}

/// Random coefficients `p_ν(2^k x - ν)` of degree `degree` on every given shift.
pub fn random_field(d: usize, k: u32, m: usize, degree: u32, cells: &[Shift], rng: &mut impl Rng) -> Result<SplineField> {
    let mut f = SplineField::zeros(d, k, m, degree, cells);
    for nu in cells {
        let shift: Vec<f64> = nu.iter().map(|&v| -(v as f64)).collect();
        f.set(nu, &random_poly(d, degree, rng).affine_substitute(&shift, &vec![(k as f64).exp2(); d]))?;
    }
    Ok(f)
}

/// `|ψ^{m,d}(x) - Σ_{μ ∈ {0..m+1}^d} A_μ ψ^{m,d}(2x - μ)|` summed term by term.
pub fn refinement_identity(seed: u64, points: usize, orders: &[usize], dims: &[usize]) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for &d in dims {
        for &m in orders {
            let s = CardinalBSpline::get(m)?;
            let a = refinement_coeffs(m);
            let mus = index_box(&vec![0; d], &vec![m as i64 + 1; d]);
            let mut r = rng(seed, 1 + 10 * d as u64 + m as u64);
            let mut taken = 0;
            while taken < points {
                let x: Vec<f64> = (0..d).map(|_| r.gen_range(-0.5..m as f64 + 1.5)).collect();
                // The indicator is sampled away from the dyadic knots.
                if m == 0 && x.iter().any(|v| ((2.0 * v).round() - 2.0 * v).abs() < 1e-9) {
                    continue;
                }
                taken += 1;
                let lhs: f64 = x.iter().map(|&v| s.eval(v, 0)).product();
                let rhs: f64 = mus
                    .iter()
                    .map(|mu| {
                        mu.iter()
                            .zip(&x)
                            .map(|(&u, &v)| a[u as usize] * s.eval(2.0 * v - u as f64, 0))
                            .product::<f64>()
                    })
                    .sum();
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    Ok(Outcome::at_most(
        "refinement identity",
        worst,
        1e-12,
        format!("{points} points per (m, d), m in {orders:?}, d in {dims:?}"),
    ))
}

/// `|Σ_ν g_{k,ν}(x) - 1|` over the shifts whose support contains `x`.
pub fn partition_of_unity(seed: u64, points: usize, m_max: usize, dims: &[usize], k_max: u32) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for &d in dims {
        for m in 0..=m_max {
            for k in 0..=k_max {
                let mut r = rng(seed, 2 + 100 * d as u64 + 10 * m as u64 + k as u64);
                let s = (k as f64).exp2();
                for _ in 0..points {
                    let x: Vec<f64> = (0..d).map(|_| r.gen_range(-2.0..2.0)).collect();
                    let base: Vec<i64> = x.iter().map(|v| (v * s).floor() as i64).collect();
                    let lo: Vec<i64> = base.iter().map(|b| b - m as i64).collect();
                    let total: f64 = index_box(&lo, &base)
                        .iter()
                        .map(|nu| basis_eval(m, k, nu, &x, None))
                        .sum::<Result<f64>>()?;
                    worst = worst.max((total - 1.0).abs());
                }
            }
        }
    }
    Ok(Outcome::at_most(
        "partition of unity",
        worst,
        1e-12,
        format!("{points} points per (m, d, k), m ≤ {m_max}, k ≤ {k_max}"),
    ))
}

/// `Σ_{𝔪 ∈ 𝔐^{m,d}(ν)} A_𝔪 = 1` in rational arithmetic.
pub fn weight_normalization(seed: u64, shifts: usize, m_max: usize, d_max: usize) -> Result<Outcome> {
    let mut failures = 0usize;
    let mut total = 0usize;
    for d in 1..=d_max {
        for m in 0..=m_max {
            let a = refinement_coeffs_exact(m);
            let mut r = rng(seed, 3 + 10 * d as u64 + m as u64);
            for _ in 0..shifts {
                let nu: Vec<i64> = (0..d).map(|_| r.gen_range(-1000..1000)).collect();
                let sum = parity_stencil(m, &nu)
                    .iter()
                    .map(|(mm, _, _)| mm.iter().fold(BigRational::one(), |acc, &j| acc * &a[j]))
                    .fold(BigRational::zero(), |acc, w| acc + w);
                total += 1;
                if sum != BigRational::one() {
                    failures += 1;
                }
            }
        }
    }
    Ok(Outcome::at_most(
        "weight normalization",
        failures as f64,
        0.0,
        format!("{total} shifts checked exactly, m ≤ {m_max}, d ≤ {d_max}"),
    ))
}

fn two_scale_domains() -> Vec<Domain> {
    vec![Domain::unit_cube(2), Domain::ball(vec![0.5, 0.5], 0.5).expect("valid ball")]
}

/// `|(H_k F)(x) - F(x)|` on `D` for random level-`k` fields.
pub fn two_scale_exactness(seed: u64, points: usize, levels: &[u32]) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for (i, domain) in two_scale_domains().into_iter().enumerate() {
        for (l, m) in [(1u32, 1usize), (2, 2), (3, 3)] {
            let scheme = Scheme::new(domain.clone(), l, m)?;
            for &k in levels {
                let mut r = rng(seed, 4 + 100 * i as u64 + 10 * l as u64 + k as u64);
                let data = scheme.level(k)?;
                let f = random_field(2, k, m, l - 1, &data.active, &mut r)?;
                let h = scheme.refine(&f)?;
                for _ in 0..points {
                    let x = random_point_in(&domain, &mut r);
                    worst = worst.max((h.eval(&x) - f.eval(&x)).abs());
                }
            }
        }
    }
    Ok(Outcome::at_most(
        "two-scale exactness",
        worst,
        1e-10,
        format!("cube and ball, levels {levels:?}, {points} points each"),
    ))
}

fn reproduction_domains() -> Vec<Domain> {
    vec![
        Domain::unit_cube(1),
        Domain::unit_cube(2),
        Domain::ball(vec![0.5, 0.5], 0.5).expect("valid ball"),
        Domain::l_shape(),
    ]
}

/// `E_k p = p` and `𝓔_k p = 0` on `D` for `p ∈ 𝒫^{l-1,d}`, `l ≤ 3`.
pub fn polynomial_reproduction(seed: u64, points: usize, k: u32) -> Result<Vec<Outcome>> {
    let mut rel: f64 = 0.0;
    let mut det: f64 = 0.0;
    for (i, domain) in reproduction_domains().into_iter().enumerate() {
        let d = domain.dim();
        for l in 1..=3u32 {
            let mut r = rng(seed, 5 + 10 * i as u64 + l as u64);
            let p = random_poly(d, l - 1, &mut r);
            let scheme = Scheme::new(domain.clone(), l, l as usize)?;
            let e = scheme.quasi_interpolant(&p, k)?;
            let detail = scheme.detail(&p, k)?;
            let scale = p.max_abs_coeff().max(1e-300);
            for _ in 0..points {
                let x = random_point_in(&domain, &mut r);
                rel = rel.max((e.eval(&x) - p.eval(&x)?).abs() / scale);
                det = det.max(detail.eval(&x).abs() / scale);
            }
        }
    }
    Ok(vec![
        Outcome::at_most("polynomial reproduction", rel, 1e-8, format!("l ≤ 3, level {k}, relative to the coefficient size")),
        Outcome::at_most("detail annihilation", det, 1e-8, format!("l ≤ 3, level {k}")),
    ])
}

/// Cusp family used by the detail and telescoping checks.
pub fn cusp_family(beta: f64) -> Vec<TestFunction> {
    // Anchors are dyadic of level ≤ 3, so every member is self-similar from k = 3 on.
    let anchors = [0.5, 0.25, 0.375, 0.625, 0.75, 0.375];
    let sides = [Side::Both, Side::Right, Side::Left, Side::Odd, Side::Both, Side::Right];
    anchors.iter().zip(sides).map(|(&a, s)| TestFunction::cusp_1d(beta, a, s)).collect()
}

/// Partial sums equal `E_k f` on `D`, and `‖f - E_k f‖` strictly decreases in `k`.
pub fn telescoping(seed: u64, points: usize, k0: u32, k_max: u32) -> Result<Vec<Outcome>> {
    let domain = Domain::unit_cube(1);
    let scheme = Scheme::new(domain.clone(), 2, 2)?;
    let spec = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    let mut violations = 0usize;
    for (i, f) in cusp_family(0.75).iter().enumerate() {
        let mut r = rng(seed, 6 + i as u64);
        let mut prev = f64::INFINITY;
        for k in k0..=k_max {
            let direct = scheme.quasi_interpolant(f, k)?;
            if k > k0 {
                let sum = scheme.telescoped(f, k0, k)?;
                for _ in 0..points {
                    let x = random_point_in(&domain, &mut r);
                    worst = worst.max((sum.eval(&x) - direct.eval(&x)).abs());
                }
            }
            let err = lp_norm(&Combination { a: 1.0, f, b: -1.0, g: &direct }, &domain, 2.0, &spec)?;
            if !(err < prev) {
                violations += 1;
            }
            prev = err;
        }
    }
    Ok(vec![
        Outcome::at_most("telescoping", worst, 1e-10, format!("levels {k0}..={k_max}, six cusp functions")),
        Outcome::at_most("monotone error", violations as f64, 0.0, "‖f - E_k f‖_2 strictly decreasing"),
    ])
}

/// `‖𝓔_k f‖_{L_p} / Ω′^l(f, 2^{-k+1})` stays in a band of width `band` across `levels`.
pub fn detail_bound(levels: std::ops::RangeInclusive<u32>, p: f64, xi_samples: usize) -> Result<Outcome> {
    let domain = Domain::unit_cube(1);
    let scheme = Scheme::new(domain.clone(), 2, 2)?;
    let spec = QuadratureSpec { xi_samples, ..Default::default() };
    let mut widest: f64 = 0.0;
    let mut ratios_text = Vec::new();
    for f in cusp_family(0.75) {
        let mut ratios = Vec::new();
        for k in levels.clone() {
            let det = scheme.detail(&f, k)?;
            let num = det.lp_norm_full(p, 6)?;
            let den = modulus_avg(&f, &domain, scheme.l(), (-(k as f64) + 1.0).exp2(), p, &spec)?;
            ratios.push(num / den);
        }
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        widest = widest.max(max / min);
        ratios_text.push(format!("{:.3}..{:.3}", min, max));
    }
    Ok(Outcome::at_most(
        "detail bound",
        widest,
        4.0,
        format!("max/min of the ratio per function over k in {levels:?}: {}", ratios_text.join(", ")),
    ))
}

/// `‖F_σ‖_{L_p} / (2^{-kd/p} ‖𝓘_{k,σ} F‖_{ℓ_p})` band per `(σ, p)` across levels, `D = I²`.
pub fn discretization_equivalence(seed: u64, levels: std::ops::RangeInclusive<u32>) -> Result<Outcome> {
    let domain = Domain::unit_cube(2);
    let (l, m) = (2u32, 2usize);
    let scheme = Scheme::new(domain, l, m)?;
    let mut bands: std::collections::BTreeMap<(Shift, usize), Vec<f64>> = Default::default();
    let ps = [1.0, 2.0, f64::INFINITY];
    for k in levels.clone() {
        let mut r = rng(seed, 12 + k as u64);
        let data = scheme.level(k)?;
        let field = random_field(2, k, m, l - 1, &data.active, &mut r)?;
        for (sigma, _) in field.colors() {
            let part = field.restrict_color(&sigma);
            let disc = part.discretize_color()?;
            for (pi, &p) in ps.iter().enumerate() {
                let cont = part.lp_norm_full(p, 4)?;
                let discrete = if p.is_infinite() {
                    disc.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
                } else {
                    disc.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p) * (-(k as f64) * 2.0 / p).exp2()
                };
                bands.entry((sigma.clone(), pi)).or_default().push(cont / discrete);
            }
        }
    }
    let mut widest: f64 = 0.0;
    for ratios in bands.values() {
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        widest = widest.max(max / min);
    }
    Ok(Outcome::at_most(
        "discretization equivalence",
        widest,
        4.0,
        format!("{} (color, p) classes, levels {levels:?}", bands.len()),
    ))
}

/// Segment chains are exactly valid and short; staircase interior chains need `𝔨 ≤ 3`.
pub fn chain_machinery(seed: u64, cases: usize, staircase_pairs: usize) -> Result<Vec<Outcome>> {
    let mut r = rng(seed, 13);
    let mut invalid = 0usize;
    let mut worst_ratio: f64 = 0.0;
    for _ in 0..cases {
        let d = r.gen_range(1..=3usize);
        let k = r.gen_range(0..=6u32);
        let x0: Vec<f64> = (0..d).map(|_| r.gen_range(-1.0..1.0)).collect();
        let xi: Vec<f64> = (0..d).map(|_| r.gen_range(-1.0..1.0)).collect();
        let chain = segment_chain(k, &x0, &xi);
        if validate_chain(&chain, &x0, &xi).is_err() {
            invalid += 1;
        }
        let norm = xi.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let bound = 4.0 * (d * d) as f64 * ((k as f64).exp2() * norm + 1.0);
        worst_ratio = worst_ratio.max(chain.len() as f64 / bound);
    }
    let domain = Domain::staircase();
    let mut worst_kappa = 0u32;
    let mut missing = 0usize;
    for k in 2..=4u32 {
        let cells = interior_cells(&domain, k);
        for _ in 0..staircase_pairs {
            let a = &cells[r.gen_range(0..cells.len())];
            let b = &cells[r.gen_range(0..cells.len())];
            match interior_chain_search(&domain, k, a, b, 3) {
                Some((kappa, _)) => worst_kappa = worst_kappa.max(kappa),
                None => missing += 1,
            }
        }
    }
    Ok(vec![
        Outcome::at_most("chain validity", invalid as f64, 0.0, format!("{cases} random segments, d ≤ 3")),
        Outcome::at_most("chain length", worst_ratio, 1.0, "largest 𝔍 / (4d²(2^k‖ξ‖∞ + 1))"),
        Outcome::at_most(
            "staircase chains",
            if missing > 0 { f64::INFINITY } else { worst_kappa as f64 },
            3.0,
            format!("{} interior pairs on levels 2..=4", 3 * staircase_pairs),
        ),
    ])
}

/// `T(af + bg) = aTf + bTg` for `E_k`, `𝓔_k`, recovery and `V`.
pub fn linearity(seed: u64, points: usize) -> Result<Outcome> {
    let domain = Domain::ball(vec![0.5, 0.5], 0.5)?;
    let scheme = Scheme::new(domain.clone(), 2, 2)?;
    let mut r = rng(seed, 14);
    let f = TestFunction::Tensor {
        factors: vec![
            crate::analysis::functions::Factor::Cusp { beta: 1.25, anchor: 0.4, side: Side::Both },
            crate::analysis::functions::Factor::Sine { freq: 1.0, phase: 0.2 },
        ],
        scale: 1.0,
    };
    let g = random_poly(2, 3, &mut r);
    let (a, b) = (r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0));
    let h = Combination { a, f: &f, b, g: &g };
    let k = 4;
    let mut worst: f64 = 0.0;
    let mut compare = |ff: &SplineField, gg: &SplineField, hh: &SplineField| -> Result<()> {
        worst = worst.max(hh.sub(&ff.combine(a, gg, b)?)?.max_abs_coeff());
        Ok(())
    };
    compare(&scheme.quasi_interpolant(&f, k)?, &scheme.quasi_interpolant(&g, k)?, &scheme.quasi_interpolant(&h, k)?)?;
    compare(&scheme.detail(&f, k)?, &scheme.detail(&g, k)?, &scheme.detail(&h, k)?)?;
    let s = sample_points(&domain, k, 2)?;
    compare(
        &recovery(&s.clone().sample(&f), &scheme)?,
        &recovery(&s.clone().sample(&g), &scheme)?,
        &recovery(&s.sample(&h), &scheme)?,
    )?;
    let v = StechkinOperator::new(&scheme, k, vec![1, 0])?;
    let (vf, vg, vh) = (v.apply(&f)?, v.apply(&g)?, v.apply(&h)?);
    for _ in 0..points {
        let x = random_point_in(&domain, &mut r);
        worst = worst.max((vh.value(&x) - a * vf.value(&x) - b * vg.value(&x)).abs());
    }
    Ok(Outcome::at_most("linearity", worst, 1e-9, "quasi-interpolant, detail, recovery and derivative operator"))
}

/// Sample interpolation identity and recovery reproduction of `𝒫^{l-1,d}`.
pub fn recovery_identities(seed: u64, points: usize) -> Result<Vec<Outcome>> {
    let mut resid: f64 = 0.0;
    let mut repro: f64 = 0.0;
    for (i, domain) in reproduction_domains().into_iter().enumerate() {
        let d = domain.dim();
        for l in 1..=3u32 {
            let mut r = rng(seed, 15 + 10 * i as u64 + l as u64);
            let scheme = Scheme::new(domain.clone(), l, l as usize)?;
            let f = TestFunction::cusp_1d(0.75, 0.4, Side::Both);
            if d == 1 {
                resid = resid.max(interpolation_residual(&sample_points(&domain, 4, l)?.sample(&f))?);
            }
            let p = random_poly(d, l - 1, &mut r);
            let a = recovery(&sample_points(&domain, 4, l)?.sample(&p), &scheme)?;
            let scale = p.max_abs_coeff().max(1e-300);
            for _ in 0..points {
                let x = random_point_in(&domain, &mut r);
                repro = repro.max((a.eval(&x) - p.eval(&x)?).abs() / scale);
            }
        }
    }
    Ok(vec![
        Outcome::at_most("interpolation identity", resid, 1e-9, "every sample point, l ≤ 3"),
        Outcome::at_most("recovery reproduction", repro, 1e-8, "random polynomials of degree l-1, l ≤ 3"),
    ])
}

/// Extension restricts to `E_{k_max} f` on `D` and vanishes off the inflated box.
pub fn extension_identities(seed: u64, points: usize) -> Result<Vec<Outcome>> {
    let domain = Domain::ball(vec![0.5, 0.5], 0.5)?;
    let scheme = Scheme::new(domain.clone(), 2, 2)?;
    let f = TestFunction::Tensor {
        factors: vec![
            crate::analysis::functions::Factor::Cusp { beta: 0.75, anchor: 0.45, side: Side::Both },
            crate::analysis::functions::Factor::Sine { freq: 1.0, phase: 0.1 },
        ],
        scale: 1.0,
    };
    let k0 = crate::operators::first_interior_level(&domain, 8)?;
    let ext = extend(&f, &scheme, k0, k0 + 2)?;
    let direct = scheme.quasi_interpolant(&f, k0 + 2)?;
    let (lo, hi) = ext.support_box(&domain);
    let mut r = rng(seed, 16);
    let mut restrict: f64 = 0.0;
    let mut outside: f64 = 0.0;
    for _ in 0..points {
        let x = random_point_in(&domain, &mut r);
        restrict = restrict.max((ext.value(&x) - direct.eval(&x)).abs());
        let y: Vec<f64> = lo
            .iter()
            .zip(&hi)
            .map(|(a, b)| {
                let w = b - a;
                if r.gen_bool(0.5) {
                    a - r.gen_range(0.0..w)
                } else {
                    b + r.gen_range(0.0..w)
                }
            })
            .collect();
        outside = outside.max(ext.value(&y).abs());
    }
    Ok(vec![
        Outcome::at_most("extension restriction", restrict, 1e-10, format!("ball, levels {k0}..={}", k0 + 2)),
        Outcome::at_most("extension support", outside, 0.0, "zero outside the inflated bounding box"),
    ])
}

/// Sample counts for [`run_with`].
#[derive(Clone, Copy, Debug)]
pub struct Sizes {
    pub points: usize,
    pub shifts: usize,
    pub xi_samples: usize,
    pub chain_cases: usize,
    pub staircase_pairs: usize,
    pub max_level: u32,
}

impl Sizes {
    /// The sizes used by `besov selftest` and the acceptance suite.
    pub const FULL: Sizes = Sizes {
        points: 1000,
        shifts: 100,
        xi_samples: 256,
        chain_cases: 10_000,
        staircase_pairs: 200,
        max_level: 5,
    };

    pub const QUICK: Sizes = Sizes {
        points: 100,
        shifts: 20,
        xi_samples: 128,
        chain_cases: 1000,
        staircase_pairs: 10,
        max_level: 4,
    };
}

/// The full invariant suite.
pub fn run(seed: u64) -> Result<SelftestReport> {
    run_with(seed, Sizes::FULL)
}

pub fn run_with(seed: u64, n: Sizes) -> Result<SelftestReport> {
    let mut checks = vec![
        refinement_identity(seed, n.points, &[0, 1, 2, 3, 4], &[1, 2])?,
        partition_of_unity(seed, n.points, 3, &[1, 2], 4)?,
        weight_normalization(seed, n.shifts, 4, 3)?,
        two_scale_exactness(seed, n.points, &[3, 4])?,
    ];
    checks.extend(polynomial_reproduction(seed, n.points, 4)?);
    checks.extend(telescoping(seed, n.points, 2, 6)?);
    checks.push(detail_bound(3..=6, 2.0, n.xi_samples)?);
    checks.push(discretization_equivalence(seed, 2..=n.max_level)?);
    checks.extend(chain_machinery(seed, n.chain_cases, n.staircase_pairs)?);
    checks.push(linearity(seed, n.points)?);
    checks.extend(recovery_identities(seed, n.points)?);
    checks.extend(extension_identities(seed, n.points)?);
    Ok(SelftestReport {
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_and_is_deterministic() {
        let a = run_with(11, Sizes::QUICK).unwrap();
        for c in &a.checks {
            assert!(c.passed, "{c:?}");
        }
        let b = run_with(11, Sizes::QUICK).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert!(a.to_csv().unwrap().starts_with("name,passed,value,bound,detail"));
    }
}
