//! Rate experiments and their reports.

use serde::Serialize;

use crate::analysis::classes::{class_norm, fit_rate, measure_smoothness, RateFit, SmoothnessClass};
use crate::analysis::functions::TestFunction;
use crate::analysis::norms::{lp_norm, nodes_for, sobolev_norm};
use crate::analysis::quadrature::QuadratureSpec;
use crate::config::{ExperimentConfig, Kind};
use crate::field::{Combination, ScalarField};
use crate::geometry::{etype_probe, Domain, EtypeReport};
use crate::multiscale::{Scheme, SplineField};
use crate::operators::extension::{extend, first_interior_level};
use crate::operators::recovery::{interpolation_residual, recovery, sample_points};
use crate::operators::stechkin::{derivative_gap_norm, embedding_loss, gamma, tau, DerivativeField, StechkinOperator};
use crate::polynomials::{card, order};
use crate::{Error, Result};

/// Status string for runs whose errors sit at rounding level.
pub const DEGENERATE: &str = "degenerate: below noise floor";

/// Relative size below which an error counts as rounding noise.
const NOISE_FLOOR: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub function: String,
    pub level: u32,
    pub n: usize,
    pub error: f64,
    pub norm: f64,
    pub expected: Option<f64>,
    pub fitted: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), passed, detail: detail.into() }
    }
}

/// Per-function outcome of a rate experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FunctionSummary {
    pub label: String,
    /// `α` from the config or the measured `α̂`; `None` when the modulus vanished.
    pub alpha: Option<f64>,
    pub alpha_measured: bool,
    pub expected_slope: Option<f64>,
    pub fit: Option<RateFit>,
    pub status: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub kind: Kind,
    pub passed: bool,
    pub degenerate: bool,
    pub tolerance: f64,
    pub seed: u64,
    pub functions: Vec<FunctionSummary>,
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
    pub config: ExperimentConfig,
    #[serde(skip)]
    pub field_dump: Option<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> Result<String> {
        rows_to_csv(&self.rows)
    }

    fn finish(kind: Kind, cfg: &ExperimentConfig, functions: Vec<FunctionSummary>, rows: Vec<Row>, mut checks: Vec<Check>) -> Self {
        let mut all: Vec<Check> = functions
            .iter()
            .map(|f| {
                let detail = match (&f.fit, f.expected_slope) {
                    (Some(fit), Some(e)) => format!("fitted {:.4}, expected {:.4}, tolerance {}", fit.slope, e, cfg.tolerance),
                    _ => f.status.clone(),
                };
                Check::new(format!("slope {}", f.label), f.passed, detail)
            })
            .collect();
        all.append(&mut checks);
        let checks = all;
        let degenerate = !functions.is_empty() && functions.iter().all(|f| f.status == DEGENERATE);
        let passed = checks.iter().all(|c| c.passed);
        Report {
            kind,
            passed,
            degenerate,
            tolerance: cfg.tolerance,
            seed: cfg.seed,
            functions,
            rows,
            checks,
            config: cfg.clone(),
            field_dump: None,
        }
    }
}

pub fn rows_to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Format(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

/// Runs one experiment of the given kind.
pub fn rate_experiment(kind: Kind, cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate_for(kind)?;
    match kind {
        Kind::Approx => run_approx(cfg),
        Kind::Recovery => run_recovery(cfg),
        Kind::Stechkin => run_stechkin(cfg),
        Kind::Extension => run_extension(cfg),
    }
}

/// `α` from the config or `α̂` measured with the difference order `l` (default 3).
#[derive(Clone, Copy, Debug)]
struct Smoothness {
    alpha: Option<f64>,
    measured: bool,
}

fn smoothness(f: &TestFunction, domain: &Domain, cfg: &ExperimentConfig) -> Result<Smoothness> {
    if let Some(a) = cfg.alpha {
        return Ok(Smoothness { alpha: Some(a), measured: false });
    }
    let js = cfg.measure_levels[0]..=cfg.measure_levels[1];
    match measure_smoothness(f, domain, cfg.p.min(1e6), cfg.l.unwrap_or(3), js, &cfg.quadrature) {
        Ok(a) => Ok(Smoothness { alpha: Some(a), measured: true }),
        Err(Error::DegenerateModulus) => Ok(Smoothness { alpha: None, measured: true }),
        Err(e) => Err(e),
    }
}

fn scheme_for(cfg: &ExperimentConfig, domain: &Domain, alpha: Option<f64>) -> Result<Scheme> {
    let l = match (cfg.l, alpha) {
        (Some(l), _) => l,
        (None, Some(a)) => cfg.l_for(a),
        (None, None) => {
            return Err(Error::Config {
                path: "l".into(),
                message: "required when the smoothness of a family member cannot be measured".into(),
            })
        }
    };
    let m = cfg.m_for(l);
    if cfg.lambda().iter().any(|&r| r as usize > m) {
        return Err(Error::Config { path: "lambda".into(), message: "components must not exceed m".into() });
    }
    Scheme::new(domain.clone(), l, m)
}

fn is_noise(error: f64, scale: f64) -> bool {
    error <= NOISE_FLOOR * scale.max(1.0)
}

/// Fits `rows` against `xs`, fills the expected and fitted columns and decides the status.
fn summarize(
    label: String,
    s: Smoothness,
    expected: Option<f64>,
    xs: &[f64],
    rows: &mut [Row],
    tolerance: f64,
) -> Result<FunctionSummary> {
    let mut summary = FunctionSummary {
        label,
        alpha: s.alpha,
        alpha_measured: s.measured,
        expected_slope: expected,
        fit: None,
        status: String::new(),
        passed: false,
    };
    if rows.iter().all(|r| is_noise(r.error, r.norm)) {
        summary.status = DEGENERATE.into();
        summary.passed = true;
        return Ok(summary);
    }
    let errors: Vec<f64> = rows.iter().map(|r| r.error).collect();
    let fit = match fit_rate(xs, &errors) {
        Ok(f) => f,
        Err(Error::NonPositiveValue(..)) => {
            summary.status = "failed: some errors vanish while others do not".into();
            return Ok(summary);
        }
        Err(e) => return Err(e),
    };
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = errors.iter().map(|e| e.log2()).sum::<f64>() / n;
    for (row, x) in rows.iter_mut().zip(xs) {
        row.fitted = Some((fit.intercept + fit.slope * x).exp2());
        row.expected = expected.map(|e| (my + e * (x - mx)).exp2());
    }
    match expected {
        Some(e) => {
            summary.passed = (fit.slope - e).abs() <= tolerance;
            summary.status = if summary.passed { "ok" } else { "failed: slope outside tolerance" }.into();
        }
        None => summary.status = "failed: errors above the noise floor but the modulus vanished".into(),
    }
    summary.fit = Some(fit);
    Ok(summary)
}

fn label(i: usize) -> String {
    format!("f{i}")
}

/// Runs `work` on every family member in parallel; results keep family order.
fn per_function<T: Send>(
    cfg: &ExperimentConfig,
    work: impl Fn(usize, &TestFunction) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .family
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let work = &work;
                scope.spawn(move || work(i, f))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p)))
            .collect()
    })
}

/// `‖𝒟^λ(f - F)‖_{L_q(D)}`.
fn approximation_error(
    f: &TestFunction,
    field: &SplineField,
    lambda: &[u32],
    domain: &Domain,
    q: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if order(lambda) == 0 {
        let gap = Combination { a: 1.0, f, b: -1.0, g: field };
        return lp_norm(&gap, domain, q, spec);
    }
    let v = DerivativeField { field: field.clone(), lambda: lambda.to_vec() };
    derivative_gap_norm(f, &v, domain, q, spec)
}

struct FunctionRun {
    summary: FunctionSummary,
    rows: Vec<Row>,
    checks: Vec<Check>,
    dump: Option<String>,
}

fn run_approx(cfg: &ExperimentConfig) -> Result<Report> {
    let domain = cfg.domain()?;
    let lambda = cfg.lambda();
    let d = domain.dim();
    let runs = per_function(cfg, |i, f| {
        let s = smoothness(f, &domain, cfg)?;
        if let Some(a) = s.alpha {
            cfg.check_conditions(Kind::Approx, a)?;
        }
        let scheme = scheme_for(cfg, &domain, s.alpha)?;
        let norm = lp_norm(f, &domain, cfg.p, &cfg.quadrature)?;
        let per = card(d, scheme.degree());
        let mut rows = Vec::new();
        let mut xs = Vec::new();
        let mut last = None;
        for k in cfg.level_range() {
            let field = scheme.quasi_interpolant(f, k)?;
            let error = approximation_error(f, &field, &lambda, &domain, cfg.q, &cfg.quadrature)?;
            rows.push(Row { function: label(i), level: k, n: per * field.len(), error, norm, expected: None, fitted: None });
            xs.push(k as f64);
            last = Some(field);
        }
        let expected = s.alpha.map(|a| -gamma(a, &lambda, cfg.p, cfg.q));
        let summary = summarize(label(i), s, expected, &xs, &mut rows, cfg.tolerance)?;
        let mut checks = Vec::new();
        if summary.status != DEGENERATE {
            let decreasing = rows.windows(2).all(|w| w[1].error < w[0].error);
            checks.push(Check::new(format!("decreasing {}", label(i)), decreasing, "errors strictly decrease in k"));
        }
        let dump = (cfg.dump_field && i == 0).then(|| last.map(|f| f.dump())).flatten();
        Ok(FunctionRun { summary, rows, checks, dump })
    })?;
    Ok(assemble(Kind::Approx, cfg, runs, Vec::new()))
}

fn assemble(kind: Kind, cfg: &ExperimentConfig, runs: Vec<FunctionRun>, extra: Vec<Check>) -> Report {
    let mut functions = Vec::new();
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut dump = None;
    for r in runs {
        functions.push(r.summary);
        rows.extend(r.rows);
        checks.extend(r.checks);
        dump = dump.or(r.dump);
    }
    checks.extend(extra);
    let mut report = Report::finish(kind, cfg, functions, rows, checks);
    report.field_dump = dump;
    report
}

fn run_recovery(cfg: &ExperimentConfig) -> Result<Report> {
    let domain = cfg.domain()?;
    let d = domain.dim() as f64;
    let order_m = cfg.sobolev_order;
    let runs = per_function(cfg, |i, f| {
        let s = smoothness(f, &domain, cfg)?;
        if let Some(a) = s.alpha {
            cfg.check_conditions(Kind::Recovery, a)?;
        }
        let scheme = scheme_for(cfg, &domain, s.alpha)?;
        let spec = &cfg.quadrature;
        let norm = sobolev_norm(f, &domain, cfg.q, order_m, spec)?;
        let mut rows = Vec::new();
        let mut xs = Vec::new();
        let mut residual: f64 = 0.0;
        let mut holder = true;
        let mut last = None;
        for k in cfg.level_range() {
            let samples = sample_points(&domain, k, scheme.l())?.sample(f);
            residual = residual.max(interpolation_residual(&samples)? / norm.max(1.0));
            let a = recovery(&samples, &scheme)?;
            let gap = Combination { a: 1.0, f, b: -1.0, g: &a };
            let nodes = nodes_for(&gap, &domain, spec);
            let error = crate::analysis::norms::sobolev_norm_on(&gap, &nodes, cfg.q, order_m)?;
            if order_m == 0 && cfg.q > 1.0 {
                // Hölder on a bounded set: ‖g‖_1 ≤ |D|^{1-1/q} ‖g‖_q.
                let e1 = nodes.lp_norm(&gap, 1.0)?;
                let exponent = if cfg.q.is_infinite() { 1.0 } else { 1.0 - 1.0 / cfg.q };
                holder &= e1 <= nodes.measure().powf(exponent) * error * (1.0 + 1e-9) + 1e-15;
            }
            rows.push(Row { function: label(i), level: k, n: samples.len(), error, norm, expected: None, fitted: None });
            xs.push((samples.len() as f64).log2());
            last = Some(a);
        }
        let loss = embedding_loss(1, cfg.p, cfg.q);
        let expected = s.alpha.map(|a| -(a - order_m as f64) / d + loss);
        let summary = summarize(label(i), s, expected, &xs, &mut rows, cfg.tolerance)?;
        let mut checks = vec![Check::new(
            format!("interpolation {}", label(i)),
            residual <= 1e-9,
            format!("largest sample residual {residual:.3e}"),
        )];
        if order_m == 0 && cfg.q > 1.0 {
            checks.push(Check::new(format!("holder {}", label(i)), holder, "L_1 error bounded by the L_q error"));
        }
        let dump = (cfg.dump_field && i == 0).then(|| last.map(|f| f.dump())).flatten();
        Ok(FunctionRun { summary, rows, checks, dump })
    })?;
    Ok(assemble(Kind::Recovery, cfg, runs, Vec::new()))
}

fn run_stechkin(cfg: &ExperimentConfig) -> Result<Report> {
    let domain = cfg.domain()?;
    let lambda = cfg.lambda();
    let measured = per_function(cfg, |_, f| smoothness(f, &domain, cfg))?;
    let alphas: Vec<f64> = measured.iter().filter_map(|s| s.alpha).collect();
    if alphas.len() != measured.len() {
        return Err(Error::Config {
            path: "family".into(),
            message: "every member needs a measurable smoothness".into(),
        });
    }
    let alpha = alphas.iter().cloned().fold(f64::INFINITY, f64::min);
    cfg.check_conditions(Kind::Stechkin, alpha)?;
    let scheme = scheme_for(cfg, &domain, Some(alpha))?;
    let t = tau(&lambda, cfg.s, cfg.q);
    let g = gamma(alpha, &lambda, cfg.p, cfg.q);
    let levels: Vec<u32> = cfg.level_range().collect();
    let probes: Vec<Result<(f64, f64)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = levels
            .iter()
            .map(|&k| {
                let scheme = &scheme;
                let lambda = lambda.clone();
                scope.spawn(move || {
                    let v = StechkinOperator::new(scheme, k, lambda)?;
                    let rho = v.norm_probe(cfg.s, cfg.q, cfg.trials, cfg.seed.wrapping_add(k as u64), &cfg.quadrature)?;
                    let err = v.error_probe(&cfg.family, cfg.q, &cfg.quadrature)?;
                    Ok((rho, err))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p))).collect()
    });
    let probes = probes.into_iter().collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<Row> = levels
        .iter()
        .zip(&probes)
        .map(|(&k, &(rho, err))| Row {
            function: "family".into(),
            level: k,
            n: 0,
            error: err,
            norm: rho,
            expected: None,
            fitted: None,
        })
        .collect();
    let xs: Vec<f64> = probes.iter().map(|(rho, _)| rho.log2()).collect();
    let s = Smoothness { alpha: Some(alpha), measured: cfg.alpha.is_none() };
    let summary = summarize("family".into(), s, Some(-g / t), &xs, &mut rows, cfg.tolerance)?;
    let ks: Vec<f64> = levels.iter().map(|&k| k as f64).collect();
    let rhos: Vec<f64> = probes.iter().map(|p| p.0).collect();
    let growth = fit_rate(&ks, &rhos)?;
    for row in &mut rows {
        row.n = card(domain.dim(), scheme.degree()) * scheme.level(row.level)?.active.len();
    }
    let checks = vec![
        Check::new(
            "norm growth",
            (growth.slope - t).abs() <= cfg.tolerance,
            format!("norm probe slope {:.4} in k, ceiling exponent τ = {t:.4}", growth.slope),
        ),
        Check::new("exponents", g > 0.0 && t > 0.0, format!("γ = {g:.4}, τ = {t:.4}, α̂ = {alpha:.4}")),
    ];
    let mut report = Report::finish(Kind::Stechkin, cfg, vec![summary], rows, checks);
    if cfg.dump_field {
        let k = *levels.last().expect("nonempty");
        report.field_dump = Some(scheme.quasi_interpolant(&cfg.family[0], k)?.dump());
    }
    Ok(report)
}

fn run_extension(cfg: &ExperimentConfig) -> Result<Report> {
    let domain = cfg.domain()?;
    let k_top = cfg.levels[1];
    let k0 = match cfg.k0 {
        Some(k) => k,
        None => first_interior_level(&domain, k_top)?,
    };
    if cfg.levels[0] < k0 {
        return Err(Error::Config {
            path: "levels".into(),
            message: format!("must start at or above the first admissible level K⁰ = {k0}"),
        });
    }
    let js = cfg.class_levels[0]..=cfg.class_levels[1];
    let runs = per_function(cfg, |i, f| {
        let s = smoothness(f, &domain, cfg)?;
        if let Some(a) = s.alpha {
            cfg.check_conditions(Kind::Extension, a)?;
        }
        let scheme = scheme_for(cfg, &domain, s.alpha)?;
        let ext = extend(f, &scheme, k0, k_top)?;
        let (lo, hi) = ext.support_box(&domain);
        let outer = Domain::axis_box(lo.clone(), hi.clone())?;
        let spec = &cfg.quadrature;
        let mut rows = Vec::new();
        let mut xs = Vec::new();
        for k in cfg.level_range() {
            let part = ext.truncated(k);
            let gap = Combination { a: 1.0, f, b: -1.0, g: &part };
            let error = lp_norm(&gap, &domain, cfg.p, spec)?;
            let norm = lp_norm(&part, &outer, cfg.p, spec)?;
            rows.push(Row { function: label(i), level: k, n: part.coefficient_count(), error, norm, expected: None, fitted: None });
            xs.push(k as f64);
        }
        let expected = s.alpha.map(|a| -a);
        let summary = summarize(label(i), s, expected, &xs, &mut rows, cfg.tolerance)?;

        // Support: zero outside the inflated box.
        let pad: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.25 * (b - a)).collect();
        let mut outside_max: f64 = 0.0;
        for t in 0..64 {
            let u = (t as f64 + 0.5) / 64.0;
            let below: Vec<f64> = lo.iter().zip(&pad).map(|(a, p)| a - p * u).collect();
            let above: Vec<f64> = hi.iter().zip(&pad).map(|(b, p)| b + p * u).collect();
            outside_max = outside_max.max(ext.value(&below).abs()).max(ext.value(&above).abs());
        }
        let mut checks = vec![Check::new(
            format!("support {}", label(i)),
            outside_max == 0.0,
            "extension vanishes outside the inflated bounding box",
        )];

        let ratio = match s.alpha {
            Some(a) => {
                let cls = SmoothnessClass::new(cfg.class_alpha.unwrap_or(a - 0.25), cfg.p, cfg.theta)?;
                let num = class_norm(&ext, &outer, &cls, spec, js.clone())?;
                let den = class_norm(f, &domain, &cls, spec, js.clone())?;
                Some(num / den)
            }
            None => None,
        };
        if let Some(r) = ratio {
            checks.push(Check::new(format!("norm ratio {}", label(i)), r.is_finite() && r > 0.0, format!("{r:.6}")));
        }
        let dump = (cfg.dump_field && i == 0).then(|| ext.collapse(&scheme).map(|f| f.dump())).transpose()?;
        Ok((FunctionRun { summary, rows, checks, dump }, ratio))
    })?;
    let ratios: Vec<f64> = runs.iter().filter_map(|(_, r)| *r).collect();
    let mut extra = Vec::new();
    if !ratios.is_empty() {
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        extra.push(Check::new(
            "norm-ratio stability",
            max / min <= 8.0,
            format!("max/min = {:.4} over {} functions (bound 8); the extension constant itself is not computed", max / min, ratios.len()),
        ));
    }
    let runs = runs.into_iter().map(|(r, _)| r).collect();
    Ok(assemble(Kind::Extension, cfg, runs, extra))
}

/// Domain-regularity report for `verify-domain`.
#[derive(Clone, Debug, Serialize)]
pub struct DomainReport {
    pub domain: String,
    pub passed: bool,
    pub probe: EtypeReport,
    pub checks: Vec<Check>,
    pub seed: u64,
    pub config: ExperimentConfig,
}

impl DomainReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> Result<String> {
        rows_to_csv(&self.probe.levels)
    }
}

fn shown<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "not found".to_string(), |v| v.to_string())
}

pub fn verify_domain(cfg: &ExperimentConfig) -> Result<DomainReport> {
    let domain = cfg.domain()?;
    let probe = etype_probe(&domain, cfg.level_range(), cfg.kappa_max, cfg.pairs_per_level, cfg.seed);
    let mut checks = vec![
        Check::new("interior cells", probe.k0.is_some(), format!("K⁰ = {}", shown(probe.k0))),
        Check::new("nearby interior cell", probe.gamma0.is_some(), format!("Γ⁰ = {}", shown(probe.gamma0))),
        Check::new("interior chains", probe.c0.is_some(), format!("c₀ = {}", shown(probe.c0))),
    ];
    for f in &probe.failures {
        checks.push(Check::new("probe failure", false, f.clone()));
    }
    Ok(DomainReport {
        domain: domain.tag().to_string(),
        passed: probe.passed() && checks.iter().all(|c| c.passed),
        probe,
        checks,
        seed: cfg.seed,
        config: cfg.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(extra: serde_json::Value) -> ExperimentConfig {
        let mut v = serde_json::json!({
            "version": 1,
            "domain": {"kind": "unit-cube", "dim": 1},
            "levels": [3, 5],
            "l": 2,
            "quadrature": {"xi_samples": 128},
            "family": [
                {"kind": "tensor", "factors": [{"kind": "cusp", "beta": 0.75, "anchor": 0.5, "side": "both"}]},
                {"kind": "tensor", "factors": [{"kind": "cusp", "beta": 0.75, "anchor": 0.375, "side": "right"}]}
            ]
        });
        for (k, val) in extra.as_object().unwrap() {
            v[k] = val.clone();
        }
        ExperimentConfig::from_json(&v.to_string()).unwrap()
    }

    #[test]
    fn polynomial_family_is_degenerate() {
        let c = cfg(serde_json::json!({
            "family": [{"kind": "polynomial", "dim": 1, "terms": [[[0], 1.0], [[1], -2.0]]}]
        }));
        let r = rate_experiment(Kind::Approx, &c).unwrap();
        assert!(r.passed && r.degenerate);
        assert_eq!(r.functions[0].status, DEGENERATE);
        assert!(r.to_json().contains(DEGENERATE));
    }

    #[test]
    fn stechkin_exponent_wiring() {
        let c = cfg(serde_json::json!({"alpha": 1.75, "lambda": [1], "q": 2.0, "s": 1.0, "trials": 1,
            "family": [{"kind": "tensor", "factors": [{"kind": "cusp", "beta": 1.25, "anchor": 0.5, "side": "both"}]}]}));
        let r = rate_experiment(Kind::Stechkin, &c).unwrap();
        let t = 1.0 + 0.5;
        let g = 1.75 - 1.0;
        assert_eq!(r.functions[0].expected_slope, Some(-g / t));
    }

    #[test]
    fn approx_rows_and_csv() {
        let r = rate_experiment(Kind::Approx, &cfg(serde_json::json!({}))).unwrap();
        assert_eq!(r.rows.len(), 6);
        let csv = r.to_csv().unwrap();
        assert!(csv.starts_with("function,level,n,error,norm,expected,fitted\n"));
        assert_eq!(csv.lines().count(), 7);
        for f in &r.functions {
            assert!((f.alpha.unwrap() - 1.25).abs() < 0.1);
        }
    }

    #[test]
    fn recovery_counts_samples_and_checks_identity() {
        let r = rate_experiment(Kind::Recovery, &cfg(serde_json::json!({}))).unwrap();
        let n3 = r.rows.iter().find(|row| row.level == 3).unwrap().n;
        // Closed cells inside (0, 1) at level 3: ν = 1..=6.
        assert_eq!(n3, 2 * 6);
        assert!(r.checks.iter().any(|c| c.name.starts_with("interpolation") && c.passed));
    }

    #[test]
    fn measured_smoothness_is_checked_against_the_condition() {
        let c = cfg(serde_json::json!({"sobolev_order": 2, "m": 3}));
        assert!(matches!(rate_experiment(Kind::Recovery, &c), Err(Error::ConditionViolated { .. })));
    }

    #[test]
    fn staircase_domain_report() {
        let c = ExperimentConfig::from_json(
            &serde_json::json!({
                "version": 1,
                "domain": {"kind": "staircase"},
                "levels": [2, 4],
                "pairs_per_level": 16,
                "family": [{"kind": "polynomial", "dim": 2, "terms": []}]
            })
            .to_string(),
        )
        .unwrap();
        let r = verify_domain(&c).unwrap();
        assert!(r.passed, "{:?}", r.checks);
        assert!(r.to_csv().unwrap().starts_with("level,active,interior"));
    }
}
