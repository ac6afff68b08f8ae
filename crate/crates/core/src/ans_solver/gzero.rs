//! The map `G₀ = F₀⁻¹` that closes the discretized system.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::abel_eddington::{abel_integral, eddington_integral, Evaluator};
use crate::error::{Result, VpsError};
use crate::inverse_problem::MicroDistribution;

/// Number of energy samples used to tabulate `F₀` for a numeric `G₀`.
pub const NUMERIC_GRID: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GZeroProvenance {
    ClosedForm,
    NumericInverse,
}

/// A strictly increasing `G₀: [0, t_max) → [0, ∞)` with `G₀(0) = 0`.
#[derive(Clone)]
pub struct GZeroMap {
    g: Evaluator,
    g_prime: Evaluator,
    g_second: Option<Evaluator>,
    t_max: f64,
    provenance: GZeroProvenance,
}

impl std::fmt::Debug for GZeroMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GZeroMap")
            .field("t_max", &self.t_max)
            .field("has_second_derivative", &self.g_second.is_some())
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl GZeroMap {
    pub fn closed_form<G, D>(g: G, g_prime: D) -> Self
    where
        G: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            g: Arc::new(g),
            g_prime: Arc::new(g_prime),
            g_second: None,
            t_max: f64::INFINITY,
            provenance: GZeroProvenance::ClosedForm,
        }
    }

    pub fn with_second_derivative<S>(mut self, g_second: S) -> Self
    where
        S: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.g_second = Some(Arc::new(g_second));
        self
    }

    /// Restrict the domain to `[0, t_max)`.
    pub fn with_domain(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    /// `G₀(t) = (πR²/5)(t² + 4t/3)`, the map of the quadratic density `1 − (r/R)²`.
    pub fn quadratic(cutoff: f64) -> Self {
        let k = PI * cutoff * cutoff / 5.0;
        Self::closed_form(
            move |t| k * (t * t + 4.0 * t / 3.0),
            move |t| k * (2.0 * t + 4.0 / 3.0),
        )
        .with_second_derivative(move |_| 2.0 * k)
        .with_domain(1.0)
    }

    /// `G₀(t) = (2^{1/4}/(π√c)) √t`, the map of `q(s) = c√s`.
    pub fn sqrt_q(c: f64) -> Self {
        let k = 2f64.powf(0.25) / (PI * c.sqrt());
        Self::closed_form(
            move |t: f64| k * t.max(0.0).sqrt(),
            move |t: f64| 0.5 * k / t.sqrt(),
        )
        .with_second_derivative(move |t: f64| -0.25 * k * t.powf(-1.5))
    }

    /// `G₀` for a given `q`: `F₀(h) = 4π√2 ∫₀ʰ q(s)√(h−s) ds` is tabulated on
    /// `NUMERIC_GRID` equidistant energies in `[0, h_max]` and inverted by bisection on
    /// a local cubic interpolant. `G₀′ = 1/F₀′(G₀)` with
    /// `F₀′(h) = (4π/√2) ∫₀ʰ q(s)/√(h−s) ds`.
    pub fn numeric_from_q(q: &MicroDistribution, h_max: f64) -> Result<Self> {
        if !(h_max > 0.0 && h_max.is_finite()) {
            return Err(VpsError::Domain(format!(
                "energy range must be positive and finite, got {h_max}"
            )));
        }
        let singular = q.is_singular_at_zero();
        let qf = q.clone();
        let forward = move |h: f64| {
            4.0 * PI * 2f64.sqrt() * eddington_integral(|s| qf.value(s), h, singular).value
        };
        let hs: Vec<f64> = (0..NUMERIC_GRID)
            .map(|j| h_max * j as f64 / (NUMERIC_GRID - 1) as f64)
            .collect();
        let fs: Vec<f64> = hs.iter().map(|&h| forward(h)).collect();
        if fs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(VpsError::NonInvertible(
                "F₀ built from q is not strictly increasing".into(),
            ));
        }
        let t_max = *fs.last().expect("non-empty grid");
        let table = Arc::new(Table { hs, fs });
        let t1 = table.clone();
        let g = move |t: f64| t1.invert(t);
        let qd = q.clone();
        let t2 = table;
        let g_prime = move |t: f64| {
            let h = t2.invert(t);
            let slope = 4.0 * PI / 2f64.sqrt() * abel_integral(|s| qd.value(s), h, singular).value;
            1.0 / slope
        };
        Ok(Self {
            g: Arc::new(g),
            g_prime: Arc::new(g_prime),
            g_second: None,
            t_max,
            provenance: GZeroProvenance::NumericInverse,
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.g)(t)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        (self.g_prime)(t)
    }

    pub fn second_derivative(&self, t: f64) -> Option<f64> {
        self.g_second.as_ref().map(|d| d(t))
    }

    pub fn has_second_derivative(&self) -> bool {
        self.g_second.is_some()
    }

    pub fn domain_upper(&self) -> f64 {
        self.t_max
    }

    pub fn provenance(&self) -> GZeroProvenance {
        self.provenance
    }
}

struct Table {
    hs: Vec<f64>,
    fs: Vec<f64>,
}

impl Table {
    /// `h` with `F₀(h) = t`, clamped to the tabulated range.
    fn invert(&self, t: f64) -> f64 {
        let n = self.fs.len();
        if t <= self.fs[0] {
            return self.hs[0];
        }
        if t >= self.fs[n - 1] {
            return self.hs[n - 1];
        }
        let j = self.fs.partition_point(|&f| f <= t) - 1;
        let start = j.saturating_sub(1).min(n - 4);
        let xs = &self.hs[start..start + 4];
        let ys = &self.fs[start..start + 4];
        let cubic = |x: f64| {
            let mut sum = 0.0;
            for a in 0..4 {
                let mut w = ys[a];
                for b in 0..4 {
                    if a != b {
                        w *= (x - xs[b]) / (xs[a] - xs[b]);
                    }
                }
                sum += w;
            }
            sum
        };
        let (mut lo, mut hi) = (self.hs[j], self.hs[j + 1]);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if cubic(mid) < t {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}
