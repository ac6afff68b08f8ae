//! Test-side oracles shared by the property suites and the acceptance harness.

#![allow(dead_code)]

use std::f64::consts::PI;

use vps_core::abel_eddington::HalfLineFunction;
use vps_core::models::{fixture, FixtureParams};
use vps_core::RadialDensity;

/// The closed-form fixture densities used by the identity checks.
pub fn analytic_densities() -> Vec<RadialDensity> {
    let p = |name: &str, cutoff: Option<f64>, b: Option<f64>| {
        fixture(name, &FixtureParams { cutoff, b, c: None })
            .unwrap()
            .density
            .unwrap()
    };
    vec![
        p("quadratic-5.1", Some(8.0), None),
        p("quadratic-5.1", Some(1.0), None),
        p("squared-linear-5.2", Some(2.0), None),
        p("exponential-5.3", Some(3.0), None),
        p("exponential-5.3", Some(1.0), None),
        p("power-law-5.4", Some(1.0), Some(0.5)),
        p("power-law-5.4", Some(1.0), Some(1.5)),
        p("power-law-5.4", Some(2.0), Some(2.5)),
        p("quartic-5.9", None, None),
    ]
}

/// `g(x) = c₁x + c₂x² + c₃x³ + c₄x⁴` with both derivatives, so `g(0) = 0`.
pub fn poly(c: [f64; 4], upper: f64) -> HalfLineFunction {
    HalfLineFunction::new(upper, move |x| {
        x * (c[0] + x * (c[1] + x * (c[2] + x * c[3])))
    })
    .with_derivative(move |x| c[0] + x * (2.0 * c[1] + x * (3.0 * c[2] + x * 4.0 * c[3])))
    .with_second_derivative(move |x| 2.0 * c[1] + x * (6.0 * c[2] + x * 12.0 * c[3]))
}

/// `L(hat_k)(r)` by Simpson's rule on the linear pieces, exact for the cubic integrands.
pub fn hat_potential_oracle(n: usize, cutoff: f64, k: usize, r: f64) -> f64 {
    let h = cutoff / n as f64;
    let node = k as f64 * h;
    let hat = |s: f64| (1.0 - (s - node).abs() / h).max(0.0);
    let mut breaks = vec![0.0, r, (node - h).max(0.0), node, node + h];
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let simpson = |f: &dyn Fn(f64) -> f64, a: f64, b: f64| {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    };
    let mut inner = 0.0;
    let mut outer = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= r {
            inner += simpson(&|s| hat(s) * s * s, a, b);
        } else if a >= r {
            outer += simpson(&|s| hat(s) * s, a, b);
        }
    }
    let inner = if r > 0.0 { inner / r } else { 0.0 };
    4.0 * PI * (inner + outer)
}
