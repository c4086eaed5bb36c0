//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p besov-core --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use besov_core::config::{ExperimentConfig, Kind};
use besov_core::operators::{rate_experiment, Report};
use besov_core::selftest::{self, Outcome};
use besov_core::Result;

const SEED: u64 = 20240601;

struct Verdict {
    passed: bool,
    detail: String,
}

fn outcomes(list: Vec<Outcome>) -> Verdict {
    let passed = list.iter().all(|o| o.passed);
    let detail = list
        .iter()
        .map(|o| format!("{}: {:.3e} <= {:.1e} ({})", o.name, o.value, o.bound, o.detail))
        .collect::<Vec<_>>()
        .join("; ");
    Verdict { passed, detail }
}

fn experiment(kind: Kind, json: &str) -> Result<Report> {
    let cfg = ExperimentConfig::from_json(json)?;
    rate_experiment(kind, &cfg)
}

fn reports(list: &[Report]) -> Verdict {
    let passed = list.iter().all(|r| r.passed);
    let mut lines = Vec::new();
    for r in list {
        for c in &r.checks {
            if !c.passed || c.name.starts_with("slope") || c.name.starts_with("norm-ratio") {
                lines.push(format!("{}{}: {}", if c.passed { "" } else { "FAILED " }, c.name, c.detail));
            }
        }
    }
    Verdict { passed, detail: lines.join("; ") }
}

fn within(v: Verdict, elapsed: Duration, limit: Option<Duration>) -> Verdict {
    match limit {
        Some(l) if elapsed > l => Verdict {
            passed: false,
            detail: format!("runtime {:.1}s exceeds {:.0}s; {}", elapsed.as_secs_f64(), l.as_secs_f64(), v.detail),
        },
        _ => v,
    }
}

fn criterion(id: u32, name: &str, limit: Option<Duration>, body: impl FnOnce() -> Result<Verdict>) -> bool {
    let t = Instant::now();
    let v = body();
    let elapsed = t.elapsed();
    let v = match v {
        Ok(v) => within(v, elapsed, limit),
        Err(e) => Verdict { passed: false, detail: format!("error: {e}") },
    };
    println!(
        "[{}] {id:>2} {name} ({:.2}s): {}",
        if v.passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        v.detail
    );
    v.passed
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let results = [
        criterion(1, "refinement identity", Some(secs(5)), || {
            Ok(outcomes(vec![selftest::refinement_identity(SEED, 1000, &[0, 1, 2, 3, 4], &[1, 2])?]))
        }),
        criterion(2, "partition of unity", None, || {
            Ok(outcomes(vec![selftest::partition_of_unity(SEED, 1000, 3, &[1, 2], 4)?]))
        }),
        criterion(3, "weight normalization", None, || {
            Ok(outcomes(vec![selftest::weight_normalization(SEED, 100, 4, 3)?]))
        }),
        criterion(4, "two-scale exactness", None, || {
            Ok(outcomes(vec![selftest::two_scale_exactness(SEED, 1000, &[3, 4])?]))
        }),
        criterion(5, "polynomial reproduction", None, || {
            let mut all = selftest::polynomial_reproduction(SEED, 1000, 4)?;
            all.extend(selftest::polynomial_reproduction(SEED + 1, 1000, 5)?);
            Ok(outcomes(all))
        }),
        criterion(6, "telescoping", None, || Ok(outcomes(selftest::telescoping(SEED, 1000, 2, 6)?))),
        criterion(7, "Jackson rate", Some(secs(60)), || {
            Ok(reports(&[experiment(Kind::Approx, include_str!("../../../configs/approx-1d.json"))?]))
        }),
        criterion(8, "detail bound", None, || Ok(outcomes(vec![selftest::detail_bound(3..=6, 2.0, 256)?]))),
        criterion(9, "recovery", Some(secs(300)), || {
            Ok(reports(&[
                experiment(Kind::Recovery, include_str!("../../../configs/recovery-1d-l2.json"))?,
                experiment(Kind::Recovery, include_str!("../../../configs/recovery-1d-linf.json"))?,
                experiment(Kind::Recovery, include_str!("../../../configs/recovery-2d.json"))?,
                experiment(Kind::Recovery, include_str!("../../../configs/recovery-1d-sobolev.json"))?,
            ]))
        }),
        criterion(10, "Stechkin tradeoff", None, || {
            Ok(reports(&[experiment(Kind::Stechkin, include_str!("../../../configs/stechkin-1d.json"))?]))
        }),
        criterion(11, "extension", None, || {
            Ok(reports(&[experiment(Kind::Extension, include_str!("../../../configs/extension-1d.json"))?]))
        }),
        criterion(12, "discretization equivalence", None, || {
            Ok(outcomes(vec![selftest::discretization_equivalence(SEED, 2..=5)?]))
        }),
        criterion(13, "chain machinery", None, || Ok(outcomes(selftest::chain_machinery(SEED, 10_000, 200)?))),
        criterion(14, "determinism", None, || {
            let a = selftest::run(SEED)?;
            let b = selftest::run(SEED)?;
            let same = a.to_json() == b.to_json() && a.to_csv()? == b.to_csv()?;
            Ok(Verdict {
                passed: same && a.passed,
                detail: format!("byte-identical: {same}, suite passed: {}", a.passed),
            })
        }),
    ];
    let failed = results.iter().filter(|&&p| !p).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
