//! Newton's method for `A x = G₀(x)` with positivity damping and deflation of the
//! trivial root, plus an ∞-norm Kantorovich check.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::assembly::{assemble_b, assemble_c};
use super::gzero::GZeroMap;
use crate::error::{Result, VpsError};

/// Shift `σ` of the deflation operator `M(x) = ‖x‖₂⁻² + σ`.
pub const DEFLATION_SHIFT: f64 = 1.0;

/// Components below this value are clamped (and the report flagged).
pub const POSITIVITY_FLOOR: f64 = 1e-14;

/// The discretized system on `n` equidistant nodes of `[0, R]`.
#[derive(Debug, Clone)]
pub struct AnsSystem {
    n: usize,
    cutoff: f64,
    b: DMatrix<f64>,
    c: DVector<f64>,
    a: DMatrix<f64>,
    g0: GZeroMap,
}

impl AnsSystem {
    pub fn new(n: usize, cutoff: f64, g0: GZeroMap) -> Result<Self> {
        if n == 0 {
            return Err(VpsError::Domain(
                "the system needs at least one node".into(),
            ));
        }
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(VpsError::Domain(format!(
                "cutoff radius must be positive and finite, got {cutoff}"
            )));
        }
        let b = assemble_b(n, cutoff);
        let c = assemble_c(n, cutoff);
        let mut a = b.clone();
        for k in 0..n {
            for i in 0..n {
                a[(i, k)] -= c[k];
            }
        }
        Ok(Self {
            n,
            cutoff,
            b,
            c,
            a,
            g0,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// The nodes `R_k = kR/n`, `k = 0..n−1`.
    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n)
            .map(|k| self.cutoff * k as f64 / self.n as f64)
            .collect()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn g0(&self) -> &GZeroMap {
        &self.g0
    }

    /// `A x − G₀(x)`.
    pub fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * x - x.map(|t| self.g0.eval(t))
    }

    /// `A − diag(G₀′(x))`.
    pub fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let mut j = self.a.clone();
        for i in 0..self.n {
            j[(i, i)] -= self.g0.derivative(x[i]);
        }
        j
    }

    /// `E₀ₙ = Σ C_k x_k`, the potential of the polygon at `R`.
    pub fn e0n(&self, x: &DVector<f64>) -> f64 {
        self.c.dot(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    /// Stop once `‖Δx‖∞ <= step_tol · ‖x‖∞`.
    pub step_tol: f64,
    /// Accept only if `‖Ax − G₀(x)‖∞ <= residual_tol · (1 + ‖x‖∞)`.
    pub residual_tol: f64,
    pub max_iterations: usize,
    pub max_halvings: usize,
    /// Scale Newton steps to repel the trivial root `x = 0`.
    pub deflate_trivial: bool,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            step_tol: 1e-9,
            residual_tol: 1e-9,
            max_iterations: 50,
            max_halvings: 30,
            deflate_trivial: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KantorovichStatus {
    Satisfied,
    Failed,
    NotEvaluated,
}

/// Constants of the check `h₀ = β η K <= 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KantorovichReport {
    pub status: KantorovichStatus,
    pub beta: Option<f64>,
    pub eta: Option<f64>,
    pub k: Option<f64>,
    pub h0: Option<f64>,
}

impl KantorovichReport {
    pub fn not_evaluated() -> Self {
        Self {
            status: KantorovichStatus::NotEvaluated,
            beta: None,
            eta: None,
            k: None,
            h0: None,
        }
    }
}

/// Outcome of one solve. Failed solves carry the last iterate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub n: usize,
    pub cutoff: f64,
    /// Polygon values at `R_0, …, R_{n−1}`.
    pub x: Vec<f64>,
    pub e0n: f64,
    pub residual_inf: f64,
    pub iterations: usize,
    pub converged: bool,
    pub failure: Option<String>,
    /// Some component had to be clamped to the positivity floor.
    pub clamped: bool,
    pub kantorovich: KantorovichReport,
    pub l2_error: Option<f64>,
}

impl SolveReport {
    pub(crate) fn new(system: &AnsSystem, x: &DVector<f64>, iterations: usize) -> Self {
        Self {
            n: system.n,
            cutoff: system.cutoff,
            x: x.iter().copied().collect(),
            e0n: system.e0n(x),
            residual_inf: system.residual(x).amax(),
            iterations,
            converged: false,
            failure: None,
            clamped: false,
            kantorovich: KantorovichReport::not_evaluated(),
            l2_error: None,
        }
    }

    /// Polygon value at `r` (linear between nodes, 0 at and beyond `R`).
    pub fn value_at(&self, r: f64) -> f64 {
        if r >= self.cutoff {
            0.0
        } else {
            crate::density::polygon_value(&self.x, self.cutoff, r)
        }
    }
}

/// Newton's method from a strictly positive start.
///
/// The Newton direction `d = −J⁻¹F` is scaled by `1/(1 − ∇M·d/M)` with
/// `M(x) = ‖x‖₂⁻² + 1` when `deflate_trivial` is set, which keeps the iteration away
/// from the root `x = 0` that every system with `G₀(0) = 0` has. Steps leaving the
/// positive cone are halved up to `max_halvings` times.
pub fn newton_solve(
    system: &AnsSystem,
    x_start: &[f64],
    options: &NewtonOptions,
) -> Result<SolveReport> {
    if x_start.len() != system.n {
        return Err(VpsError::Domain(format!(
            "start vector has {} entries, expected {}",
            x_start.len(),
            system.n
        )));
    }
    if x_start.iter().any(|&v| !(v > 0.0)) {
        return Err(VpsError::Domain(
            "start vector must be strictly positive".into(),
        ));
    }
    let mut x = DVector::from_column_slice(x_start);
    let mut clamped = false;
    let mut last_step = f64::NAN;
    let accept =
        |x: &DVector<f64>| system.residual(x).amax() <= options.residual_tol * (1.0 + x.amax());

    if accept(&x) {
        let mut report = SolveReport::new(system, &x, 0);
        report.converged = true;
        return Ok(report);
    }

    for iteration in 1..=options.max_iterations {
        let f = system.residual(&x);
        let Some(lu) = Some(system.jacobian(&x).lu()).filter(|lu| lu.is_invertible()) else {
            let mut report = SolveReport::new(system, &x, iteration - 1);
            report.failure = Some(VpsError::SingularJacobian { iteration }.to_string());
            return Ok(report);
        };
        let Some(newton) = lu.solve(&(-&f)) else {
            let mut report = SolveReport::new(system, &x, iteration - 1);
            report.failure = Some(VpsError::SingularJacobian { iteration }.to_string());
            return Ok(report);
        };
        let mut step = newton;
        if options.deflate_trivial {
            let norm2 = x.norm_squared();
            let m = 1.0 / norm2 + DEFLATION_SHIFT;
            let grad_dot = -2.0 / (norm2 * norm2) * x.dot(&step);
            let denom = 1.0 - grad_dot / m;
            if denom.is_finite() && denom != 0.0 {
                step /= denom;
            }
        }
        let mut t = 1.0;
        let mut halvings = 0;
        while (0..system.n).any(|i| x[i] + t * step[i] <= 0.0) && halvings < options.max_halvings {
            t *= 0.5;
            halvings += 1;
        }
        let applied = &step * t;
        last_step = applied.amax();
        x += &applied;
        for v in x.iter_mut() {
            if *v < POSITIVITY_FLOOR {
                *v = POSITIVITY_FLOOR;
                clamped = true;
            }
        }
        if applied.amax() <= options.step_tol * x.amax() && accept(&x) {
            let mut report = SolveReport::new(system, &x, iteration);
            report.converged = true;
            report.clamped = clamped;
            return Ok(report);
        }
    }
    let mut report = SolveReport::new(system, &x, options.max_iterations);
    report.clamped = clamped;
    report.failure = Some(
        VpsError::NoConvergence {
            iterations: options.max_iterations,
            last_step,
        }
        .to_string(),
    );
    Ok(report)
}

/// ∞-norm Kantorovich check at `x0`: `β = ‖J⁻¹‖∞`, `η = ‖J⁻¹F‖∞`, `K` = largest
/// `|G₀″|` over `[min x0 − 2η, max x0 + 2η] ∩ (0, ∞)` (sampled on 2001 points including
/// both ends), `h₀ = βηK`; satisfied iff `h₀ <= 1/2`.
pub fn kantorovich_check(system: &AnsSystem, x0: &[f64]) -> Result<KantorovichReport> {
    if !system.g0.has_second_derivative() {
        return Ok(KantorovichReport::not_evaluated());
    }
    let x = DVector::from_column_slice(x0);
    let inverse = system
        .jacobian(&x)
        .try_inverse()
        .ok_or(VpsError::SingularJacobian { iteration: 0 })?;
    let beta = inverse
        .row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let eta = (&inverse * system.residual(&x)).amax();
    let lo = (x.min() - 2.0 * eta).max(POSITIVITY_FLOOR);
    let hi = x.max() + 2.0 * eta;
    const SAMPLES: usize = 2001;
    let k = (0..SAMPLES)
        .map(|j| {
            let t = lo + (hi - lo) * j as f64 / (SAMPLES - 1) as f64;
            system.g0.second_derivative(t).unwrap_or(f64::NAN).abs()
        })
        .fold(0.0, f64::max);
    let h0 = beta * eta * k;
    let status = if h0 <= 0.5 {
        KantorovichStatus::Satisfied
    } else {
        KantorovichStatus::Failed
    };
    Ok(KantorovichReport {
        status,
        beta: Some(beta),
        eta: Some(eta),
        k: Some(k),
        h0: Some(h0),
    })
}
