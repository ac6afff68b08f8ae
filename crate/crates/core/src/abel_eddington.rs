//! Abel's equation `g(x) = ∫₀ˣ f(s)/√(x−s) ds` and Eddington's equation
//! `g(x) = ∫₀ˣ f(s)√(x−s) ds`: forward evaluation and inversion.
//!
//! The weakly singular kernels are removed by substitution before quadrature:
//! `s = x − t²` by default, or `s = x sin²θ` when the integrand itself is flagged
//! singular at the origin (e.g. `f(s) ~ s^{-1/2}`), which smooths both endpoints.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use crate::error::{Result, VpsError};
use crate::quadrature::{self, Integral};

/// Relative change at which panel doubling stops.
pub const SINGULAR_REL_TOL: f64 = 1e-10;
/// Upper bound on the number of 64-node panels.
pub const MAX_PANELS: usize = 1 << 12;
/// `|G(ε)|` above this value at `ε = 1e-8·T` rejects an inversion unless `G` is
/// still visibly decaying towards 0 there.
pub const VANISHING_TOL: f64 = 1e-6;

/// Shared evaluator type.
pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A function on `[0, T)`, optionally with its first two derivatives.
#[derive(Clone)]
pub struct HalfLineFunction {
    upper: f64,
    value: Evaluator,
    derivative: Option<Evaluator>,
    second_derivative: Option<Evaluator>,
    singular_at_zero: bool,
}

impl fmt::Debug for HalfLineFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HalfLineFunction")
            .field("upper", &self.upper)
            .field("has_derivative", &self.derivative.is_some())
            .field("has_second_derivative", &self.second_derivative.is_some())
            .field("singular_at_zero", &self.singular_at_zero)
            .finish()
    }
}

impl HalfLineFunction {
    pub fn new<F>(upper: f64, value: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            upper,
            value: Arc::new(value),
            derivative: None,
            second_derivative: None,
            singular_at_zero: false,
        }
    }

    /// The zero function on `[0, upper)`.
    pub fn zero(upper: f64) -> Self {
        Self::new(upper, |_| 0.0)
            .with_derivative(|_| 0.0)
            .with_second_derivative(|_| 0.0)
    }

    /// Piecewise-linear interpolant of `(x, y)` samples with strictly increasing `x`
    /// starting at 0. Extrapolates flat beyond the last sample.
    pub fn from_samples(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() {
            return Err(VpsError::Domain(
                "need at least two (x, y) samples of equal length".into(),
            ));
        }
        if xs[0] != 0.0 || xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(VpsError::Domain(
                "sample abscissae must start at 0 and increase strictly".into(),
            ));
        }
        let upper = *xs.last().expect("non-empty");
        Ok(Self::new(upper, move |x| {
            let k = xs.partition_point(|&v| v <= x);
            if k == 0 {
                return ys[0];
            }
            if k >= xs.len() {
                return *ys.last().expect("non-empty");
            }
            let t = (x - xs[k - 1]) / (xs[k] - xs[k - 1]);
            ys[k - 1] + t * (ys[k] - ys[k - 1])
        }))
    }

    pub fn with_derivative<F>(mut self, derivative: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    pub fn with_second_derivative<F>(mut self, second: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.second_derivative = Some(Arc::new(second));
        self
    }

    /// Mark the function as (integrably) singular or non-smooth at the origin.
    pub fn singular_at_zero(mut self, flag: bool) -> Self {
        self.singular_at_zero = flag;
        self
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn is_singular_at_zero(&self) -> bool {
        self.singular_at_zero
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    pub fn derivative(&self) -> Option<&Evaluator> {
        self.derivative.as_ref()
    }

    pub fn second_derivative(&self) -> Option<&Evaluator> {
        self.second_derivative.as_ref()
    }
}

fn check_point(x: f64, upper: f64) -> Result<()> {
    if x >= 0.0 && x <= upper {
        Ok(())
    } else {
        Err(VpsError::Domain(format!(
            "argument {x} outside [0, {upper}]"
        )))
    }
}

/// `∫₀ˣ φ(s)/√(x−s) ds` with the kernel removed by substitution.
pub fn abel_integral<F: Fn(f64) -> f64>(phi: F, x: f64, singular_at_zero: bool) -> Integral {
    if x <= 0.0 {
        return Integral {
            value: 0.0,
            error: 0.0,
        };
    }
    if singular_at_zero {
        // s = x sin²θ: ds/√(x−s) = 2√x sinθ dθ
        let root = x.sqrt();
        let r = quadrature::panel_doubling(
            |th: f64| {
                let sn = th.sin();
                phi(x * sn * sn) * sn
            },
            0.0,
            FRAC_PI_2,
            SINGULAR_REL_TOL,
            MAX_PANELS,
        );
        Integral {
            value: 2.0 * root * r.value,
            error: 2.0 * root * r.error,
        }
    } else {
        // s = x − t²: ds/√(x−s) = 2 dt
        let r = quadrature::panel_doubling(
            |t: f64| phi(x - t * t),
            0.0,
            x.sqrt(),
            SINGULAR_REL_TOL,
            MAX_PANELS,
        );
        Integral {
            value: 2.0 * r.value,
            error: 2.0 * r.error,
        }
    }
}

/// `∫₀ˣ φ(s)√(x−s) ds` with the square-root kernel removed by substitution.
pub fn eddington_integral<F: Fn(f64) -> f64>(phi: F, x: f64, singular_at_zero: bool) -> Integral {
    if x <= 0.0 {
        return Integral {
            value: 0.0,
            error: 0.0,
        };
    }
    if singular_at_zero {
        // s = x sin²θ: √(x−s) ds = 2 x^{3/2} sinθ cos²θ dθ
        let scale = 2.0 * x * x.sqrt();
        let r = quadrature::panel_doubling(
            |th: f64| {
                let (sn, cs) = th.sin_cos();
                phi(x * sn * sn) * sn * cs * cs
            },
            0.0,
            FRAC_PI_2,
            SINGULAR_REL_TOL,
            MAX_PANELS,
        );
        Integral {
            value: scale * r.value,
            error: scale * r.error,
        }
    } else {
        // s = x − t²: √(x−s) ds = 2t² dt
        let r = quadrature::panel_doubling(
            |t: f64| phi(x - t * t) * t * t,
            0.0,
            x.sqrt(),
            SINGULAR_REL_TOL,
            MAX_PANELS,
        );
        Integral {
            value: 2.0 * r.value,
            error: 2.0 * r.error,
        }
    }
}

/// `g(x) = ∫₀ˣ f(s)/√(x−s) ds`.
pub fn abel_forward(f: &HalfLineFunction, x: f64) -> Result<f64> {
    check_point(x, f.upper)?;
    Ok(abel_integral(|s| f.eval(s), x, f.singular_at_zero).value)
}

/// The unique solution `f = (1/π) G′` of Abel's equation, where
/// `G(x) = ∫₀ˣ g(s)/√(x−s) ds`.
///
/// `G′` is taken analytically when `g′` is available,
/// `G′(x) = g(0)/√x + ∫₀ˣ g′(s)/√(x−s) ds`, and by central differences with step
/// `1e-5·T` otherwise. Inputs with `G(0+) ≠ 0` (such as `g(s) = 1/√s`, for which
/// `G ≡ π`) are rejected.
pub fn abel_invert(g: &HalfLineFunction, x: f64) -> Result<f64> {
    check_point(x, g.upper)?;
    check_vanishing_at_zero(g, "∫₀ˣ g(s)/√(x−s) ds")?;
    if x == 0.0 {
        return Err(VpsError::Domain(
            "Abel inversion is evaluated on (0, T]".into(),
        ));
    }
    let g_prime = match &g.derivative {
        Some(d) if !g.singular_at_zero => {
            g.eval(0.0) / x.sqrt() + abel_integral(|s| d(s), x, false).value
        }
        _ => central_difference(
            |y| abel_integral(|s| g.eval(s), y, g.singular_at_zero).value,
            x,
            g.upper,
        ),
    };
    Ok(g_prime / PI)
}

/// `F(h) = c ∫₀ʰ q(s)√(h−s) ds` with `c = 4π√2` when `with_prefactor` is set, else 1.
pub fn eddington_forward(q: &HalfLineFunction, h: f64, with_prefactor: bool) -> Result<f64> {
    check_point(h, q.upper)?;
    let factor = if with_prefactor {
        4.0 * PI * 2f64.sqrt()
    } else {
        1.0
    };
    Ok(factor * eddington_integral(|s| q.eval(s), h, q.singular_at_zero).value)
}

/// The unique solution `f = (2/π) H′_{g′}` of Eddington's equation, where
/// `H_{g′}(h) = ∫₀ʰ g′(s)/√(h−s) ds`. Requires `g′`.
///
/// With `g″` available the expanded form `g′(0)/√h + ∫₀ʰ g″(s)/√(h−s) ds` is used.
/// At `h = 0` the value is `+∞` when `g′(0) > 0` (an integrable singularity, not a failure).
pub fn eddington_invert(g: &HalfLineFunction, h: f64) -> Result<f64> {
    check_point(h, g.upper)?;
    let Some(gp) = g.derivative.as_ref() else {
        return Err(VpsError::NonInvertible(
            "Eddington inversion needs the derivative g′".into(),
        ));
    };
    let g0 = g.eval(0.0);
    if g0.abs() > 1e-12 * (1.0 + g.eval(g.upper * 0.5).abs()) {
        return Err(VpsError::NonInvertible(format!("g(0) = {g0} must vanish")));
    }
    let gp_fn = HalfLineFunction {
        upper: g.upper,
        value: gp.clone(),
        derivative: None,
        second_derivative: None,
        singular_at_zero: g.singular_at_zero,
    };
    check_vanishing_at_zero(&gp_fn, "∫₀ʰ g′(s)/√(h−s) ds")?;
    let slope0 = gp(0.0);
    if h == 0.0 {
        return Ok(if slope0 > 0.0 {
            f64::INFINITY
        } else if slope0 < 0.0 {
            f64::NEG_INFINITY
        } else {
            0.0
        });
    }
    let h_prime = match &g.second_derivative {
        Some(gpp) if !g.singular_at_zero => {
            slope0 / h.sqrt() + abel_integral(|s| gpp(s), h, false).value
        }
        _ => central_difference(
            |y| abel_integral(|s| gp(s), y, g.singular_at_zero).value,
            h,
            g.upper,
        ),
    };
    Ok(2.0 / PI * h_prime)
}

fn check_vanishing_at_zero(g: &HalfLineFunction, what: &str) -> Result<()> {
    let eps = 1e-8 * g.upper;
    let at_eps = abel_integral(|s| g.eval(s), eps, g.singular_at_zero).value;
    // A transform that tends to 0 like √ε (bounded g with g(0) ≠ 0) is accepted when it
    // keeps decaying: a hundredfold smaller ε must shrink it at least twofold.
    let at_tiny = abel_integral(|s| g.eval(s), 1e-2 * eps, g.singular_at_zero).value;
    let decaying = at_tiny.abs() <= 0.5 * at_eps.abs();
    if !at_eps.is_finite() || (at_eps.abs() > VANISHING_TOL && !decaying) {
        return Err(VpsError::NonInvertible(format!(
            "{what} does not vanish at 0 (value {at_eps:.6e} at {eps:e}); the transform is not absolutely continuous with zero initial value"
        )));
    }
    Ok(())
}

/// Central difference with step `1e-5·T`, shrunk near 0 and one-sided at `T`.
fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64, upper: f64) -> f64 {
    let step = (1e-5 * upper).min(0.5 * x);
    if x + step > upper {
        return (f(x) - f(x - step)) / step;
    }
    (f(x + step) - f(x - step)) / (2.0 * step)
}
