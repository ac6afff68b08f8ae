//! Grid refinement `n = 1, 2, 4, …`: scalar bisection at `n = 1`, then Newton
//! started from the interpolated coarser polygon.

use serde::{Deserialize, Serialize};

use super::gzero::GZeroMap;
use super::newton::{kantorovich_check, newton_solve, AnsSystem, NewtonOptions, SolveReport};
use crate::density::RadialDensity;
use crate::error::{Result, VpsError};
use crate::quadrature;

/// Panels per polygon segment in [`l2_error`].
pub const L2_PANELS_PER_SEGMENT: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderOptions {
    pub newton: NewtonOptions,
    /// Evaluate the Kantorovich check at each start vector.
    pub kantorovich: bool,
    /// Relative width at which the `n = 1` bisection stops.
    pub bisection_tol: f64,
}

impl Default for LadderOptions {
    fn default() -> Self {
        Self {
            newton: NewtonOptions::default(),
            kantorovich: true,
            bisection_tol: 1e-12,
        }
    }
}

/// Solves for `n = 1, 2, 4, …, n_max`. Stops early (returning the failed report last)
/// if a Newton solve does not converge.
pub fn refinement_ladder(
    g0: &GZeroMap,
    cutoff: f64,
    n_max: usize,
    reference: Option<&dyn Fn(f64) -> f64>,
    options: &LadderOptions,
) -> Result<Vec<SolveReport>> {
    if n_max == 0 || !n_max.is_power_of_two() {
        return Err(VpsError::Domain(format!(
            "n_max must be a power of two, got {n_max}"
        )));
    }
    let mut reports = Vec::new();
    let mut current = solve_single_node(g0, cutoff, options.bisection_tol)?;
    if let Some(f) = reference {
        current.l2_error = Some(l2_error(&current.x, cutoff, f));
    }
    reports.push(current.clone());
    let mut n = 1;
    while n < n_max {
        n *= 2;
        let system = AnsSystem::new(n, cutoff, g0.clone())?;
        let start: Vec<f64> = system
            .nodes()
            .iter()
            .map(|&r| current.value_at(r))
            .collect();
        let kantorovich = if options.kantorovich {
            Some(kantorovich_check(&system, &start)?)
        } else {
            None
        };
        let mut report = newton_solve(&system, &start, &options.newton)?;
        if let Some(k) = kantorovich {
            report.kantorovich = k;
        }
        if let Some(f) = reference {
            report.l2_error = Some(l2_error(&report.x, cutoff, f));
        }
        let converged = report.converged;
        reports.push(report.clone());
        if !converged {
            break;
        }
        current = report;
    }
    Ok(reports)
}

/// `n = 1`: the scalar equation `A₀₀ x = G₀(x)` by bisection on `[ε, x_hi]`,
/// `ε = 1e-12`, with `x_hi` doubled from 1 until the residual changes sign.
pub fn solve_single_node(g0: &GZeroMap, cutoff: f64, rel_tol: f64) -> Result<SolveReport> {
    let system = AnsSystem::new(1, cutoff, g0.clone())?;
    let a00 = system.a()[(0, 0)];
    let f = |x: f64| a00 * x - g0.eval(x);
    let mut lo = 1e-12;
    let f_lo = f(lo);
    if f_lo == 0.0 {
        return Err(VpsError::Bracket(
            "residual vanishes at the lower bracket end".into(),
        ));
    }
    let mut hi = 1.0;
    let mut doublings = 0;
    while f(hi).signum() == f_lo.signum() {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(VpsError::Bracket(format!(
                "no sign change of A00·x − G0(x) on [1e-12, {hi:e}] (A00 = {a00}, residual at 1e-12 = {f_lo:e})"
            )));
        }
    }
    let mut steps = 0;
    while hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid).signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        steps += 1;
    }
    let x = nalgebra::DVector::from_element(1, 0.5 * (lo + hi));
    let mut report = SolveReport::new(&system, &x, steps);
    report.converged = true;
    Ok(report)
}

/// The polygon through `(kR/n, x_k)` and `(R, 0)`.
pub fn polygon_to_density(x: &[f64], cutoff: f64) -> Result<RadialDensity> {
    RadialDensity::polygon(x.to_vec(), cutoff)
}

/// `‖p_n − reference‖₂` on `[0, R]`, three-point Gauss on
/// `L2_PANELS_PER_SEGMENT` panels per polygon segment.
pub fn l2_error(x: &[f64], cutoff: f64, reference: &dyn Fn(f64) -> f64) -> f64 {
    let n = x.len();
    let h = cutoff / n as f64;
    let mut sum = 0.0;
    for k in 0..n {
        let a = k as f64 * h;
        let left = x[k];
        let right = if k + 1 < n { x[k + 1] } else { 0.0 };
        sum += quadrature::composite_gauss3(
            |r| {
                let poly = left + (right - left) * (r - a) / h;
                let d = poly - reference(r);
                d * d
            },
            a,
            a + h,
            L2_PANELS_PER_SEGMENT,
        );
    }
    sum.sqrt()
}

/// `‖p_n‖₂` on `[0, R]` (exact for a polygon).
pub fn l2_norm(x: &[f64], cutoff: f64) -> f64 {
    let n = x.len();
    let h = cutoff / n as f64;
    let sum: f64 = (0..n)
        .map(|k| {
            let a = x[k];
            let b = if k + 1 < n { x[k + 1] } else { 0.0 };
            h * (a * a + a * b + b * b) / 3.0
        })
        .sum();
    sum.sqrt()
}
