//! The spherical potential operator
//!
//! ```text
//! Lp(r) = 4π [ (1/r) ∫₀ʳ p(s) s² ds + ∫ᵣ^∞ p(s) s ds ]
//! ```
//!
//! with its first two derivatives, closed forms for the density families of
//! [`DensityShape`], a generic adaptive-quadrature path, and the monotone
//! inverse of `P = Lp` on `[0, R]`.

use std::f64::consts::PI;

use crate::density::{DensityShape, RadialDensity};
use crate::error::{Result, VpsError};
use crate::quadrature::{self, Integral};

const FOUR_PI: f64 = 4.0 * PI;

/// Tolerance of the generic quadrature path (absolute and relative).
pub const QUADRATURE_TOL: f64 = 1e-10;

/// `Lp(r)` for `r >= 0`; at `r = 0` the limit `4π ∫₀^∞ p(s) s ds` (possibly `+∞`).
pub fn eval_l(p: &RadialDensity, r: f64) -> Result<f64> {
    check_radius(r)?;
    let (inner, outer) = moments(p, r);
    if r == 0.0 {
        return Ok(FOUR_PI * outer);
    }
    Ok(FOUR_PI * (inner + outer))
}

/// `(Lp)′(r) = −(4π/r²) ∫₀ʳ p(s) s² ds`. At `r = 0` the limit is returned:
/// 0 for bounded densities (and power laws with `b < 1`).
pub fn eval_l_prime(p: &RadialDensity, r: f64) -> Result<f64> {
    check_radius(r)?;
    if r == 0.0 {
        return Ok(match p.shape() {
            DensityShape::PowerLaw { b } if *b > 1.0 => f64::NEG_INFINITY,
            DensityShape::PowerLaw { b } if *b == 1.0 => -FOUR_PI / 2.0,
            _ => 0.0,
        });
    }
    Ok(-FOUR_PI * mass_over_r2(p, r))
}

/// `(Lp)″(r) = −(2/r)(Lp)′(r) − 4π p(r)` for `r > 0`.
pub fn eval_l_second(p: &RadialDensity, r: f64) -> Result<f64> {
    check_radius(r)?;
    if r == 0.0 {
        return Err(VpsError::Domain(
            "second derivative of the potential at r = 0".into(),
        ));
    }
    // −(2/r)(Lp)′ = 8π ∫₀ʳ p s² ds / r³
    Ok(2.0 * FOUR_PI * mass_over_r3(p, r) - FOUR_PI * p.value(r))
}

/// `L(r^l)` restricted to `[0, R]`; beyond `R` the exterior branch `4π R^{l+3}/((l+3) r)`.
pub fn l_monomial(l: u32, cutoff: f64, r: f64) -> f64 {
    let lf = l as f64;
    if r > cutoff {
        return FOUR_PI * cutoff.powi(l as i32 + 3) / ((lf + 3.0) * r);
    }
    FOUR_PI
        * (-r.powi(l as i32 + 2) / ((lf + 2.0) * (lf + 3.0))
            + cutoff.powi(l as i32 + 2) / (lf + 2.0))
}

/// `Lp(r)` by adaptive Gauss–Kronrod quadrature of both integrals, independent of the
/// closed forms. The error is the sum of both integrals' estimates, scaled by 4π.
pub fn eval_l_quadrature(p: &RadialDensity, r: f64) -> Result<Integral> {
    check_radius(r)?;
    let big_r = p.cutoff();
    let upper = r.min(big_r);
    let inner = quadrature::adaptive(
        |s| p.value(s) * s * s,
        0.0,
        upper,
        QUADRATURE_TOL * 1e-3,
        QUADRATURE_TOL,
        20_000,
    );
    let outer = if r < big_r {
        quadrature::adaptive(
            |s| p.value(s) * s,
            r,
            big_r,
            QUADRATURE_TOL * 1e-3,
            QUADRATURE_TOL,
            20_000,
        )
    } else {
        Integral {
            value: 0.0,
            error: 0.0,
        }
    };
    let inner_term = if r > 0.0 { inner.value / r } else { 0.0 };
    let inner_err = if r > 0.0 { inner.error / r } else { 0.0 };
    Ok(Integral {
        value: FOUR_PI * (inner_term + outer.value),
        error: FOUR_PI * (inner_err + outer.error),
    })
}

/// `(Lp)′(r)` by adaptive quadrature of the enclosed mass.
pub fn eval_l_prime_quadrature(p: &RadialDensity, r: f64) -> Result<Integral> {
    check_radius(r)?;
    if r == 0.0 {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
        });
    }
    let upper = r.min(p.cutoff());
    let m = quadrature::adaptive(
        |s| p.value(s) * s * s,
        0.0,
        upper,
        QUADRATURE_TOL * 1e-3,
        QUADRATURE_TOL,
        20_000,
    );
    Ok(Integral {
        value: -FOUR_PI * m.value / (r * r),
        error: FOUR_PI * m.error / (r * r),
    })
}

/// `P(a) − P(a + δ)` for `a >= 0`, `δ >= 0`, computed without the cancellation of
/// subtracting two nearby potential values: exactly for polynomials (differences of
/// powers factored through `δ`), otherwise by quadrature of `−P′` when the direct
/// difference is small compared with `P(a)`.
pub fn potential_drop(p: &RadialDensity, a: f64, delta: f64) -> Result<f64> {
    check_radius(a)?;
    if !(delta >= 0.0) {
        return Err(VpsError::Domain(format!(
            "potential drop needs delta >= 0, got {delta}"
        )));
    }
    if delta == 0.0 {
        return Ok(0.0);
    }
    let big_r = p.cutoff();
    let b = a + delta;
    if let DensityShape::Polynomial { coefficients } = p.shape() {
        if a >= big_r {
            return Ok(eval_l(p, a)? - eval_l(p, b)?);
        }
        let (inner_delta, exterior) = if b > big_r {
            let mass = mass_over_r2(p, big_r) * big_r * big_r;
            (big_r - a, FOUR_PI * mass * (b - big_r) / (big_r * b))
        } else {
            (delta, 0.0)
        };
        let top = a + inner_delta;
        let inner: f64 = coefficients
            .iter()
            .enumerate()
            .map(|(l, c)| {
                let k = l as i32 + 2;
                c * power_difference(top, a, inner_delta, k) / ((k * (k + 1)) as f64)
            })
            .sum();
        return Ok(FOUR_PI * inner + exterior);
    }
    let direct = eval_l(p, a)? - eval_l(p, b)?;
    if direct.is_finite() && direct > 1e-4 * eval_l(p, a)?.abs() {
        return Ok(direct);
    }
    let r = quadrature::adaptive(
        |s| -eval_l_prime(p, s).unwrap_or(f64::NAN),
        a,
        b,
        0.0,
        1e-13,
        2_000,
    );
    Ok(r.value)
}

/// `b^k − a^k` given `δ = b − a` exactly: `δ Σ_{j<k} b^j a^{k−1−j}`.
fn power_difference(b: f64, a: f64, delta: f64, k: i32) -> f64 {
    let mut sum = 0.0;
    let mut bj = 1.0;
    for j in 0..k {
        sum += bj * a.powi(k - 1 - j);
        bj *= b;
    }
    delta * sum
}

fn check_radius(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(VpsError::Domain(format!(
            "radius must be finite and non-negative, got {r}"
        )))
    }
}

/// `((1/r) ∫₀ʳ p s², ∫ᵣ^R p s)`; the first entry is 0 at `r = 0`.
fn moments(p: &RadialDensity, r: f64) -> (f64, f64) {
    let big_r = p.cutoff();
    let inner = if r == 0.0 {
        0.0
    } else {
        mass_over_r2(p, r) * r
    };
    let outer = if r >= big_r { 0.0 } else { outer_moment(p, r) };
    (inner, outer)
}

/// `∫ᵣ^R p(s) s ds` for `r < R`.
fn outer_moment(p: &RadialDensity, r: f64) -> f64 {
    let big_r = p.cutoff();
    match p.shape() {
        DensityShape::Polynomial { coefficients } => coefficients
            .iter()
            .enumerate()
            .map(|(l, a)| {
                let k = l as i32 + 2;
                a * (big_r.powi(k) - r.powi(k)) / k as f64
            })
            .sum(),
        DensityShape::ExponentialShift => {
            let e_r = (-big_r).exp();
            (-r).exp() * (r + 1.0) - e_r * (big_r + 1.0) - e_r * (big_r * big_r - r * r) / 2.0
        }
        DensityShape::PowerLaw { b } => {
            let b = *b;
            let tail = big_r.powf(-b) * (big_r * big_r - r * r) / 2.0;
            if b == 2.0 {
                if r == 0.0 {
                    return f64::INFINITY;
                }
                (big_r / r).ln() - tail
            } else {
                if r == 0.0 && b > 2.0 {
                    return f64::INFINITY;
                }
                (big_r.powf(2.0 - b) - r.powf(2.0 - b)) / (2.0 - b) - tail
            }
        }
        DensityShape::Polygon { values } => polygon_moments(values, big_r, r).1,
    }
}

/// `(1/r²) ∫₀^{min(r,R)} p(s) s² ds` for `r > 0`.
fn mass_over_r2(p: &RadialDensity, r: f64) -> f64 {
    let big_r = p.cutoff();
    if r > big_r {
        return mass_over_r2(p, big_r) * (big_r / r) * (big_r / r);
    }
    match p.shape() {
        DensityShape::Polynomial { coefficients } => coefficients
            .iter()
            .enumerate()
            .map(|(l, a)| a * r.powi(l as i32 + 1) / (l as f64 + 3.0))
            .sum(),
        DensityShape::ExponentialShift => exp_gamma3_over_power(r, 2) - (-big_r).exp() * r / 3.0,
        DensityShape::PowerLaw { b } => r.powf(1.0 - b) / (3.0 - b) - big_r.powf(-b) * r / 3.0,
        DensityShape::Polygon { values } => polygon_moments(values, big_r, r).0 / (r * r),
    }
}

/// `(1/r³) ∫₀^{min(r,R)} p(s) s² ds` for `r > 0`.
fn mass_over_r3(p: &RadialDensity, r: f64) -> f64 {
    match p.shape() {
        DensityShape::ExponentialShift if r <= p.cutoff() => {
            exp_gamma3_over_power(r, 3) - (-p.cutoff()).exp() / 3.0
        }
        DensityShape::Polynomial { coefficients } if r <= p.cutoff() => coefficients
            .iter()
            .enumerate()
            .map(|(l, a)| a * r.powi(l as i32) / (l as f64 + 3.0))
            .sum(),
        _ => mass_over_r2(p, r) / r,
    }
}

/// `∫₀ʳ e^{-s} s² ds / r^k` for `k ∈ {2, 3}`.
///
/// Below `r = 1` the integral is written as `2 e^{-r} r³ Σ_{j≥0} r^j/(j+3)!`, which
/// avoids the cancellation in `2 − e^{-r}(r² + 2r + 2)` near the origin.
fn exp_gamma3_over_power(r: f64, k: i32) -> f64 {
    if r < 1.0 {
        let mut term = 1.0 / 6.0;
        let mut sum = term;
        let mut j = 3.0;
        loop {
            j += 1.0;
            term *= r / j;
            if term < 1e-16 * sum {
                break;
            }
            sum += term;
        }
        2.0 * (-r).exp() * r.powi(3 - k) * sum
    } else {
        (2.0 - (-r).exp() * (r * r + 2.0 * r + 2.0)) / r.powi(k)
    }
}

/// Exact `(∫₀^{min(r,R)} p s², ∫_{r}^{R} p s)` for a polygon.
fn polygon_moments(values: &[f64], cutoff: f64, r: f64) -> (f64, f64) {
    let n = values.len();
    let h = cutoff / n as f64;
    let mut inner = 0.0;
    let mut outer = 0.0;
    for k in 0..n {
        let a = k as f64 * h;
        let b = if k + 1 == n {
            cutoff
        } else {
            (k + 1) as f64 * h
        };
        let va = values[k];
        let vb = if k + 1 < n { values[k + 1] } else { 0.0 };
        let slope = (vb - va) / (b - a);
        let intercept = va - slope * a;
        let m2 = |lo: f64, hi: f64| {
            intercept * (hi.powi(3) - lo.powi(3)) / 3.0 + slope * (hi.powi(4) - lo.powi(4)) / 4.0
        };
        let m1 = |lo: f64, hi: f64| {
            intercept * (hi * hi - lo * lo) / 2.0 + slope * (hi.powi(3) - lo.powi(3)) / 3.0
        };
        if a < r {
            inner += m2(a, b.min(r));
        }
        if b > r {
            outer += m1(a.max(r), b);
        }
    }
    (inner, outer)
}

/// `P = Lp` on `[0, R]` together with `E₀ = P(R)`, `P(0)` and the inverse `P⁻¹`.
///
/// `U(r) = −P(r)` is the gravitational potential of the model.
#[derive(Debug, Clone)]
pub struct PotentialProfile {
    density: RadialDensity,
    e0: f64,
    p0: f64,
}

impl PotentialProfile {
    pub fn new(density: RadialDensity) -> Result<Self> {
        let e0 = eval_l(&density, density.cutoff())?;
        let p0 = eval_l(&density, 0.0)?;
        if !(p0 > e0 && e0 > 0.0) {
            return Err(VpsError::InvalidDensity(format!(
                "potential is not strictly decreasing and positive: P(0) = {p0}, E0 = {e0}"
            )));
        }
        Ok(Self { density, e0, p0 })
    }

    pub fn density(&self) -> &RadialDensity {
        &self.density
    }

    pub fn cutoff(&self) -> f64 {
        self.density.cutoff()
    }

    /// `E₀ = P(R)`.
    pub fn e0(&self) -> f64 {
        self.e0
    }

    /// `P(0)`; infinite for power laws with `b >= 2`.
    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn value(&self, r: f64) -> f64 {
        eval_l(&self.density, r).unwrap_or(f64::NAN)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        eval_l_prime(&self.density, r).unwrap_or(f64::NAN)
    }

    pub fn second_derivative(&self, r: f64) -> f64 {
        eval_l_second(&self.density, r).unwrap_or(f64::NAN)
    }

    /// `U(r) = −P(r)`.
    pub fn gravitational_potential(&self, r: f64) -> f64 {
        -self.value(r)
    }

    /// `P(0) − P(r)`, accurate for small `r`.
    pub fn depth(&self, r: f64) -> f64 {
        potential_drop(&self.density, 0.0, r).unwrap_or(f64::NAN)
    }

    /// `P(r) − E₀`, accurate for `r` close to `R`.
    pub fn height(&self, r: f64) -> f64 {
        let big_r = self.cutoff();
        if r >= big_r {
            return -potential_drop(&self.density, big_r, r - big_r).unwrap_or(f64::NAN);
        }
        potential_drop(&self.density, r, big_r - r).unwrap_or(f64::NAN)
    }

    /// The radius `r ∈ [0, R]` with `P(r) − E₀ = s`, for `s ∈ [0, P(0) − E₀]`.
    ///
    /// Works on `P − E₀` in the lower half of the range and on `P(0) − P` in the upper
    /// half, so that both ends resolve radii to full relative precision.
    pub fn inverse_shifted(&self, s: f64) -> Result<f64> {
        let big_r = self.cutoff();
        let span = self.p0 - self.e0;
        if !(s >= 0.0 && s <= span) {
            return Err(VpsError::Range {
                value: s,
                lower: 0.0,
                upper: span,
            });
        }
        if s == 0.0 {
            return Ok(big_r);
        }
        if s == span {
            return Ok(0.0);
        }
        if s <= 0.5 * span {
            Ok(monotone_root(
                |r| self.height(r) - s,
                |r| self.derivative(r),
                big_r,
                false,
            ))
        } else {
            self.inverse_depth(span - s)
        }
    }

    /// The radius `r` with `P(0) − P(r) = d`, for `d ∈ [0, P(0) − E₀]`.
    pub fn inverse_depth(&self, d: f64) -> Result<f64> {
        let big_r = self.cutoff();
        let span = self.p0 - self.e0;
        if !(d >= 0.0 && d <= span) {
            return Err(VpsError::Range {
                value: d,
                lower: 0.0,
                upper: span,
            });
        }
        if d == 0.0 {
            return Ok(0.0);
        }
        Ok(monotone_root(
            |r| self.depth(r) - d,
            |r| -self.derivative(r),
            big_r,
            true,
        ))
    }

    /// `P⁻¹(h)` for `h ∈ [E₀, P(0)]`: bisection down to a bracket of width
    /// `1e-12 R`, then two Newton steps with `P′` that are kept only while they stay
    /// inside the bracket.
    pub fn inverse(&self, h: f64) -> Result<f64> {
        let big_r = self.cutoff();
        if !(h >= self.e0 && h <= self.p0) {
            return Err(VpsError::Range {
                value: h,
                lower: self.e0,
                upper: self.p0,
            });
        }
        if h == self.e0 {
            return Ok(big_r);
        }
        if h == self.p0 {
            return Ok(0.0);
        }
        let (mut lo, mut hi) = (0.0, big_r);
        while hi - lo > 1e-12 * big_r {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.value(mid) > h {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut r = 0.5 * (lo + hi);
        for _ in 0..2 {
            let slope = self.derivative(r);
            if slope.is_finite() && slope != 0.0 {
                let next = r - (self.value(r) - h) / slope;
                if next >= lo && next <= hi {
                    r = next;
                }
            }
        }
        Ok(r)
    }
}

/// Root of a monotone `f` on `[0, R]` by bisection to width `1e-12 R` (and to
/// relative width `1e-15` near 0), then two bracketed Newton steps.
fn monotone_root<F, D>(f: F, df: D, big_r: f64, increasing: bool) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (0.0, big_r);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo
            || mid >= hi
            || (hi - lo <= 1e-12 * big_r && hi - lo <= 1e-15 * hi.max(f64::MIN_POSITIVE) * 1e3)
        {
            break;
        }
        let v = f(mid);
        if (v < 0.0) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut r = 0.5 * (lo + hi);
    for _ in 0..2 {
        let slope = df(r);
        if slope.is_finite() && slope != 0.0 {
            let next = r - f(r) / slope;
            if next >= lo && next <= hi {
                r = next;
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_unit() -> RadialDensity {
        RadialDensity::polynomial(vec![1.0], 1.0).unwrap()
    }

    #[test]
    fn constant_density_at_origin() {
        assert!((eval_l(&constant_unit(), 0.0).unwrap() - 2.0 * PI).abs() < 1e-14);
        let q = eval_l_quadrature(&constant_unit(), 0.0).unwrap();
        assert!((q.value - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn constant_density_derivatives_at_edge() {
        let p = constant_unit();
        assert!((eval_l_prime(&p, 1.0).unwrap() + 4.0 * PI / 3.0).abs() < 1e-14);
        // −(2/1)(−4π/3) − 4π·p(1) with p(1) = 0 outside the open support
        let expected = 8.0 * PI / 3.0;
        assert!((eval_l_second(&p, 1.0).unwrap() - expected).abs() < 1e-13);
        // just inside the support, p = 1
        let inside = eval_l_second(&p, 1.0 - 1e-12).unwrap();
        assert!((inside + 4.0 * PI / 3.0).abs() < 1e-9);
    }

    #[test]
    fn second_derivative_rejects_origin() {
        assert!(matches!(
            eval_l_second(&constant_unit(), 0.0),
            Err(VpsError::Domain(_))
        ));
        assert!(matches!(
            eval_l(&constant_unit(), -1.0),
            Err(VpsError::Domain(_))
        ));
    }

    #[test]
    fn prime_at_origin_is_limit() {
        assert_eq!(eval_l_prime(&constant_unit(), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn monomial_closed_forms() {
        assert!((l_monomial(0, 1.0, 1.0) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((l_monomial(0, 1.0, 0.0) - 2.0 * PI).abs() < 1e-14);
        // continuity at r = R
        for l in 0..7 {
            let inside = l_monomial(l, 2.0, 2.0);
            let outside = l_monomial(l, 2.0, 2.0 + 1e-12);
            assert!((inside - outside).abs() < 1e-9 * inside);
        }
    }

    #[test]
    fn exponential_series_matches_closed_form_at_switch() {
        let a = exp_gamma3_over_power(1.0 - 1e-12, 2);
        let b = exp_gamma3_over_power(1.0, 2);
        assert!((a - b).abs() < 1e-12);
        // small-r limit of ∫₀ʳ e^{-s}s² ds / r³ is 1/3
        assert!((exp_gamma3_over_power(1e-9, 3) - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn polygon_potential_matches_quadrature() {
        let p = RadialDensity::polygon(vec![2.0, 1.5, 0.7, 0.2], 3.0).unwrap();
        for &r in &[0.0, 0.3, 0.75, 1.6, 2.9, 3.0, 4.5] {
            let closed = eval_l(&p, r).unwrap();
            let quad = eval_l_quadrature(&p, r).unwrap().value;
            assert!(
                (closed - quad).abs() < 1e-9 * closed.abs(),
                "r={r}: {closed} vs {quad}"
            );
        }
    }

    #[test]
    fn inverse_endpoints_and_range() {
        let prof =
            PotentialProfile::new(RadialDensity::polynomial(vec![1.0, 0.0, -1.0], 1.0).unwrap())
                .unwrap();
        assert_eq!(prof.inverse(prof.e0()).unwrap(), 1.0);
        assert_eq!(prof.inverse(prof.p0()).unwrap(), 0.0);
        assert!(matches!(
            prof.inverse(prof.e0() * 0.99),
            Err(VpsError::Range { .. })
        ));
        assert!(matches!(
            prof.inverse(prof.p0() * 1.01),
            Err(VpsError::Range { .. })
        ));
    }

    #[test]
    fn power_law_potential_infinite_at_origin_for_b_at_least_two() {
        let p = RadialDensity::power_law(2.0, 1.0).unwrap();
        assert_eq!(eval_l(&p, 0.0).unwrap(), f64::INFINITY);
        let p = RadialDensity::power_law(1.5, 1.0).unwrap();
        let expected = 4.0 * PI * 1.5 / (2.0 * 0.5);
        assert!((eval_l(&p, 0.0).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn potential_drop_matches_difference() {
        let p = RadialDensity::polynomial(
            vec![2.0, 0.0, -39.0 / 146.0, -107.0 / 146.0, 45.0 / 146.0],
            2.0,
        )
        .unwrap();
        for &(a, d) in &[(0.0, 0.5), (0.3, 1.0), (1.5, 0.5), (1.9, 0.3)] {
            let direct = eval_l(&p, a).unwrap() - eval_l(&p, a + d).unwrap();
            let drop = potential_drop(&p, a, d).unwrap();
            assert!((direct - drop).abs() < 1e-12 * direct.abs(), "{a} {d}");
        }
        // tiny drop near the origin: P(0) − P(δ) ≈ (4π/3)·a₀·δ²/2
        let d = 1e-7;
        let drop = potential_drop(&p, 0.0, d).unwrap();
        assert!((drop - 4.0 * PI / 3.0 * d * d).abs() < 1e-6 * drop);
        let e = RadialDensity::exponential_shift(2.0).unwrap();
        let drop = potential_drop(&e, 0.0, 1e-6).unwrap();
        let expected = 4.0 * PI * (1.0 - (-2f64).exp()) / 6.0 * 1e-12;
        assert!(
            (drop - expected).abs() < 1e-5 * expected,
            "{drop} vs {expected}"
        );
    }

    #[test]
    fn shifted_inverse_resolves_both_ends() {
        let prof = PotentialProfile::new(
            RadialDensity::polynomial(vec![1.0, 0.0, -1.0 / 64.0], 8.0).unwrap(),
        )
        .unwrap();
        for &r in &[0.5, 4.0, 7.999, 8.0 - 1e-8] {
            let back = prof.inverse_shifted(prof.height(r)).unwrap();
            assert!((back - r).abs() < 1e-12 * 8.0, "{r} -> {back}");
        }
        for &r in &[1e-9, 1e-7, 1e-3, 0.5] {
            let back = prof.inverse_depth(prof.depth(r)).unwrap();
            assert!((back - r).abs() < 1e-9 * r, "{r} -> {back}");
        }
    }
}
