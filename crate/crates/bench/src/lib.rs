//! Benchmark fixtures.

use besov_core::analysis::functions::{Factor, Side, TestFunction};
use besov_core::{Domain, Scheme};

pub fn ball_scheme() -> Scheme {
    let domain = Domain::ball(vec![0.5, 0.5], 0.45).expect("valid ball");
    Scheme::new(domain, 3, 3).expect("valid scheme")
}

pub fn interval_scheme(l: u32) -> Scheme {
    Scheme::new(Domain::unit_cube(1), l, l as usize).expect("valid scheme")
}

pub fn cusp() -> TestFunction {
    TestFunction::cusp_1d(1.25, 0.375, Side::Both)
}

/// `|x₁ - 3/8|^{5/4} · sin(πx₂/2 + 1/10)`.
pub fn cusp_2d() -> TestFunction {
    TestFunction::Tensor {
        factors: vec![
            Factor::Cusp { beta: 1.25, anchor: 0.375, side: Side::Both },
            Factor::Sine { freq: 0.5, phase: 0.1 },
        ],
        scale: 1.0,
    }
}
