//! The inverse problem: is a strictly decreasing density `p` the local density of a
//! stationary model `f = q(−E − E₀)`?
//!
//! Along the energy axis `s = P(r) − E₀ ∈ [0, P(0) − E₀)` the density becomes
//! `F₀(s) = p(Φ(s))` with `Φ(s) = P⁻¹(s + E₀)`, and `q` solves Eddington's equation
//! `F₀(h) = 4π√2 ∫₀ʰ q(s)√(h−s) ds`. Hence
//!
//! ```text
//! q(h) = (1/(4π√2)) (2/π) dH/dh,    dH/dh = F₀′(0)/√h + ∫₀ʰ F₀″(s)/√(h−s) ds,
//! ```
//!
//! and `p` is extendable iff `q > 0`. In radius space the integral becomes
//! `(1/√h) ∫_{Φ(h)}^R J(r,h) dr` with `J = X/|P′|² · √(h/(P(Φ)−P(r)))` and
//! `X = p′P″ − p″P′`; `X > 0` on `(0, R)` is sufficient for extendability.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::abel_eddington::{Evaluator, HalfLineFunction};
use crate::density::RadialDensity;
use crate::error::{Result, VpsError};
use crate::potential::{self, PotentialProfile};
use crate::quadrature::{self, Integral};

/// Sample count for the sufficient-condition checks.
pub const SUFFICIENT_GRID: usize = 10_000;
/// Depth of the geometric grids `2^{-k}`, `k = 1..=GEOMETRIC_DEPTH`, at both ends.
pub const GEOMETRIC_DEPTH: i32 = 40;

/// `1/(4π√2) · 2/π`, the factor between `dH/dh` and `q`.
pub fn q_factor() -> f64 {
    1.0 / (4.0 * PI * 2f64.sqrt()) * (2.0 / PI)
}

/// Where an energy slice's values come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SliceProvenance {
    ClosedForm,
    Composed,
}

#[derive(Clone)]
struct ClosedFormSlice {
    f0: Evaluator,
    f0_prime: Evaluator,
    f0_second: Evaluator,
}

/// `F₀ = p ∘ Φ` on `[0, P(0) − E₀)` with its first two derivatives.
#[derive(Clone)]
pub struct EnergySlice {
    profile: PotentialProfile,
    closed: Option<ClosedFormSlice>,
}

impl std::fmt::Debug for EnergySlice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EnergySlice")
            .field("profile", &self.profile)
            .field("provenance", &self.provenance())
            .finish()
    }
}

/// Build `F₀` for a strictly decreasing density with analytic derivatives.
pub fn build_energy_slice(p: &RadialDensity) -> Result<EnergySlice> {
    if !p.has_analytic_derivatives() {
        return Err(VpsError::InvalidDensity(
            "energy slices need analytic p′ and p″".into(),
        ));
    }
    if !p.is_positive_inside(SUFFICIENT_GRID) {
        return Err(VpsError::InvalidDensity(
            "density is not positive on [0, R)".into(),
        ));
    }
    if !p.is_strictly_decreasing(SUFFICIENT_GRID) {
        return Err(VpsError::InvalidDensity(
            "density is not strictly decreasing; F = p∘P⁻¹ is undefined".into(),
        ));
    }
    Ok(EnergySlice {
        profile: PotentialProfile::new(p.clone())?,
        closed: None,
    })
}

impl EnergySlice {
    /// Replace the composed evaluators with closed forms of `F₀`, `F₀′`, `F₀″`.
    pub fn with_closed_form<A, B, C>(mut self, f0: A, f0_prime: B, f0_second: C) -> Self
    where
        A: Fn(f64) -> f64 + Send + Sync + 'static,
        B: Fn(f64) -> f64 + Send + Sync + 'static,
        C: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.closed = Some(ClosedFormSlice {
            f0: std::sync::Arc::new(f0),
            f0_prime: std::sync::Arc::new(f0_prime),
            f0_second: std::sync::Arc::new(f0_second),
        });
        self
    }

    pub fn provenance(&self) -> SliceProvenance {
        if self.closed.is_some() {
            SliceProvenance::ClosedForm
        } else {
            SliceProvenance::Composed
        }
    }

    pub fn profile(&self) -> &PotentialProfile {
        &self.profile
    }

    pub fn density(&self) -> &RadialDensity {
        self.profile.density()
    }

    pub fn e0(&self) -> f64 {
        self.profile.e0()
    }

    pub fn p0(&self) -> f64 {
        self.profile.p0()
    }

    /// Length `P(0) − E₀` of the energy interval (infinite for singular potentials).
    pub fn span(&self) -> f64 {
        self.profile.depth(self.profile.cutoff())
    }

    /// `Φ(s) = P⁻¹(s + E₀)`.
    pub fn phi(&self, s: f64) -> Result<f64> {
        self.profile.inverse_shifted(s)
    }

    pub fn f0(&self, s: f64) -> Result<f64> {
        if let Some(c) = &self.closed {
            return Ok((c.f0)(s));
        }
        let r = self.phi(s)?;
        Ok(self.density().value(r))
    }

    /// `F₀′(s) = p′(r)/P′(r)` at `r = Φ(s)`; `F₀′(0) = p′(R)/P′(R)`.
    pub fn f0_prime(&self, s: f64) -> Result<f64> {
        if let Some(c) = &self.closed {
            return Ok((c.f0_prime)(s));
        }
        let r = self.phi(s)?;
        self.f0_prime_at_radius(r)
    }

    /// `F₀″(s) = X(r)/|P′(r)|³` at `r = Φ(s)`.
    pub fn f0_second(&self, s: f64) -> Result<f64> {
        if let Some(c) = &self.closed {
            return Ok((c.f0_second)(s));
        }
        let r = self.phi(s)?;
        self.f0_second_at_radius(r)
    }

    fn f0_prime_at_radius(&self, r: f64) -> Result<f64> {
        if r <= 0.0 {
            return Err(VpsError::Domain("F₀′ is evaluated for Φ(s) > 0".into()));
        }
        Ok(self.density().derivative(r) / self.profile.derivative(r))
    }

    fn f0_second_at_radius(&self, r: f64) -> Result<f64> {
        let slope = self.profile.derivative(r);
        Ok(x_function(self.density(), r)? / slope.abs().powi(3))
    }
}

/// `X(r) = p′(r)P″(r) − p″(r)P′(r)` for `r ∈ (0, R]`.
pub fn x_function(p: &RadialDensity, r: f64) -> Result<f64> {
    if !(r > 0.0 && r <= p.cutoff()) {
        return Err(VpsError::Domain(format!(
            "X is evaluated on (0, R], got r = {r}"
        )));
    }
    let dp = p.derivative(r);
    let ddp = p.second_derivative(r);
    Ok(dp * potential::eval_l_second(p, r)? - ddp * potential::eval_l_prime(p, r)?)
}

/// `X(0+)`, approximated by `X(1e-9 R)` (the error is `O(1e-9 R)` for smooth densities).
pub fn x_limit_at_zero(p: &RadialDensity) -> Result<f64> {
    x_function(p, 1e-9 * p.cutoff())
}

/// The sufficient conditions for extendability, each sampled on a fine grid of `(0, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SufficientFlags {
    /// `F₀″ > 0` on `(0, P(0) − E₀)`.
    pub convex_f0: bool,
    /// `X > 0` on `(0, R)`.
    pub positive_x: bool,
    /// `(2/r)p′ + p″ > 0` on `(0, R)`.
    pub positive_radial_laplacian: bool,
    /// `convex_f0 ⇔ positive_x`, and `positive_radial_laplacian ⇒` both, held on the grid.
    pub consistent: bool,
}

/// Samples the three sufficient conditions on the midpoints of a uniform
/// `SUFFICIENT_GRID`-cell partition of `(0, R)`. A sample counts as positive only if it
/// exceeds `1e-12` times the magnitude of the terms it is built from.
pub fn check_sufficient(slice: &EnergySlice) -> Result<SufficientFlags> {
    let p = slice.density();
    let big_r = p.cutoff();
    let (mut a, mut b, mut c) = (true, true, true);
    for j in 0..SUFFICIENT_GRID {
        let r = big_r * (j as f64 + 0.5) / SUFFICIENT_GRID as f64;
        let dp = p.derivative(r);
        let ddp = p.second_derivative(r);
        let d_pot = potential::eval_l_prime(p, r)?;
        let dd_pot = potential::eval_l_second(p, r)?;
        let x = dp * dd_pot - ddp * d_pot;
        let x_scale = (dp * dd_pot).abs() + (ddp * d_pot).abs();
        b &= x > 1e-12 * x_scale;
        let f0pp = x / d_pot.abs().powi(3);
        a &= f0pp > 1e-12 * x_scale / d_pot.abs().powi(3);
        let lap = 2.0 / r * dp + ddp;
        c &= lap > 1e-12 * ((2.0 / r * dp).abs() + ddp.abs());
    }
    Ok(SufficientFlags {
        convex_f0: a,
        positive_x: b,
        positive_radial_laplacian: c,
        consistent: a == b && (!c || (a && b)),
    })
}

/// One evaluation of `dH/dh` together with its radius-space ingredients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DhSample {
    pub h: f64,
    /// `Φ(h)`.
    pub phi: f64,
    /// `dH/dh`.
    pub value: f64,
    /// Quadrature error bound of `value`.
    pub error: f64,
    /// `∫_{Φ(h)}^R J(r, h) dr`.
    pub j_integral: f64,
    pub j_error: f64,
}

impl DhSample {
    pub fn q(&self) -> f64 {
        q_factor() * self.value
    }

    pub fn q_error(&self) -> f64 {
        q_factor() * self.error
    }
}

/// `dH/dh` at `h ∈ (0, P(0) − E₀)` in radius space.
pub fn dh_dh(slice: &EnergySlice, h: f64) -> Result<DhSample> {
    let span = slice.span();
    if !(h > 0.0 && h < span) {
        return Err(VpsError::Range {
            value: h,
            lower: 0.0,
            upper: span,
        });
    }
    let phi = slice.phi(h)?;
    dh_dh_core(slice, h, phi)
}

/// `dH/dh` at the energy whose radius is `Φ = phi ∈ (0, R)`. Avoids inverting `P` and
/// so resolves energies arbitrarily close to `P(0) − E₀`.
pub fn dh_dh_at_radius(slice: &EnergySlice, phi: f64) -> Result<DhSample> {
    let big_r = slice.profile.cutoff();
    if !(phi > 0.0 && phi < big_r) {
        return Err(VpsError::Range {
            value: phi,
            lower: 0.0,
            upper: big_r,
        });
    }
    let h = slice.profile.height(phi);
    dh_dh_core(slice, h, phi)
}

fn dh_dh_core(slice: &EnergySlice, h: f64, phi: f64) -> Result<DhSample> {
    let p = slice.density();
    let big_r = p.cutoff();
    let f0_prime_zero = p.derivative(big_r) / slice.profile.derivative(big_r);
    let slope_phi = slice.profile.derivative(phi);
    // r = Φ + t² removes the inverse-square-root singularity at r = Φ.
    let integrand = |t: f64| {
        let delta = t * t;
        let r = phi + delta;
        let slope = slice.profile.derivative(r);
        let x = x_function(p, r.min(big_r)).unwrap_or(f64::NAN);
        let weight = x / (slope * slope);
        if delta == 0.0 {
            return 2.0 * weight * (h / -slope_phi).sqrt();
        }
        let mut drop = potential::potential_drop(p, phi, delta).unwrap_or(f64::NAN);
        if !(drop > 0.0) {
            drop = -slope_phi * delta;
        }
        2.0 * t * weight * (h / drop).sqrt()
    };
    let j = quadrature::adaptive(integrand, 0.0, (big_r - phi).sqrt(), 1e-13, 1e-11, 20_000);
    let root = h.sqrt();
    Ok(DhSample {
        h,
        phi,
        value: (f0_prime_zero + j.value) / root,
        error: j.error / root,
        j_integral: j.value,
        j_error: j.error,
    })
}

/// `dH/dh = F₀′(0)/√h + ∫₀ʰ F₀″(s)/√(h−s) ds` in energy space (substituting
/// `s = h − t²`); an independent cross-check of [`dh_dh`].
pub fn dh_dh_energy_space(slice: &EnergySlice, h: f64) -> Result<Integral> {
    let span = slice.span();
    if !(h > 0.0 && h < span) {
        return Err(VpsError::Range {
            value: h,
            lower: 0.0,
            upper: span,
        });
    }
    let start = slice.f0_prime(0.0)?;
    let inner = quadrature::adaptive(
        |t: f64| slice.f0_second(h - t * t).unwrap_or(f64::NAN),
        0.0,
        h.sqrt(),
        1e-13,
        1e-11,
        20_000,
    );
    Ok(Integral {
        value: start / h.sqrt() + 2.0 * inner.value,
        error: 2.0 * inner.error,
    })
}

/// `q(h) = (1/(4π√2))(2/π) dH/dh`.
pub fn recover_q(slice: &EnergySlice, h: f64) -> Result<f64> {
    Ok(dh_dh(slice, h)?.q())
}

/// A microscopic distribution `q` with `q(s) = 0` for `s <= 0`.
#[derive(Clone)]
pub struct MicroDistribution {
    upper: f64,
    q: Evaluator,
    singular_at_zero: bool,
}

impl std::fmt::Debug for MicroDistribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MicroDistribution")
            .field("upper", &self.upper)
            .field("singular_at_zero", &self.singular_at_zero)
            .finish()
    }
}

impl MicroDistribution {
    pub fn new<F>(upper: f64, q: F, singular_at_zero: bool) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            upper,
            q: std::sync::Arc::new(q),
            singular_at_zero,
        }
    }

    /// The `q` recovered from a density by Eddington inversion.
    pub fn from_slice(slice: &EnergySlice) -> Self {
        let upper = slice.span();
        let slice = slice.clone();
        Self::new(
            upper,
            move |h| recover_q(&slice, h).unwrap_or(f64::NAN),
            true,
        )
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn is_singular_at_zero(&self) -> bool {
        self.singular_at_zero
    }

    pub fn value(&self, s: f64) -> f64 {
        if s <= 0.0 {
            0.0
        } else {
            (self.q)(s)
        }
    }

    /// The same function as an input for the Eddington transforms.
    pub fn to_half_line(&self) -> HalfLineFunction {
        let q = self.q.clone();
        HalfLineFunction::new(self.upper, move |s| if s <= 0.0 { 0.0 } else { q(s) })
            .singular_at_zero(self.singular_at_zero)
    }

    /// `f_q(r, u) = q(−E(r,u) − E₀)` with `E = U(r) + u²/2` and `U = −P`.
    pub fn phase_space_density(&self, profile: &PotentialProfile, r: f64, u: f64) -> f64 {
        let energy = profile.gravitational_potential(r) + 0.5 * u * u;
        self.value(-energy - profile.e0())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Extendable,
    NotExtendable,
    Inconclusive,
}

/// Which test decided the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Evidence {
    /// `F₀″ > 0`.
    #[serde(rename = "3a")]
    ConvexF0,
    /// `X > 0`.
    #[serde(rename = "3b")]
    PositiveX,
    /// `(2/r)p′ + p″ > 0`.
    #[serde(rename = "3c")]
    PositiveRadialLaplacian,
    /// Every sampled `q` is positive beyond its error bound.
    #[serde(rename = "direct-q-positivity")]
    DirectQPositivity,
    /// A sampled `q` is negative with error below half its magnitude.
    #[serde(rename = "numerical-negative-q")]
    NumericalNegativeQ,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XSample {
    pub r: f64,
    pub x: f64,
}

/// The smallest sampled `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QMinimum {
    pub h: f64,
    pub phi: f64,
    pub q: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtendabilityReport {
    pub verdict: Verdict,
    pub evidence: Option<Evidence>,
    pub sufficient: SufficientFlags,
    pub e0: f64,
    pub p0: f64,
    pub x_samples: Vec<XSample>,
    pub dh_samples: Vec<DhSample>,
    pub q_min: Option<QMinimum>,
}

/// Decide extendability. The sufficient conditions are tried first (3c, then 3b/3a);
/// otherwise `q` is sampled on `grid_size` uniform energies plus geometric grids
/// `2^{-k}`, `k = 1..40`, towards both ends of the energy interval. A negative sample
/// counts only when its error bound is below half its magnitude.
pub fn extendability_verdict(p: &RadialDensity, grid_size: usize) -> Result<ExtendabilityReport> {
    let slice = build_energy_slice(p)?;
    let flags = check_sufficient(&slice)?;
    let big_r = p.cutoff();
    let x_samples = (1..=grid_size)
        .map(|j| {
            let r = big_r * j as f64 / grid_size as f64;
            Ok(XSample {
                r,
                x: x_function(p, r)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = ExtendabilityReport {
        verdict: Verdict::Inconclusive,
        evidence: None,
        sufficient: flags,
        e0: slice.e0(),
        p0: slice.p0(),
        x_samples,
        dh_samples: Vec::new(),
        q_min: None,
    };
    let evidence = if flags.positive_radial_laplacian {
        Some(Evidence::PositiveRadialLaplacian)
    } else if flags.positive_x {
        Some(Evidence::PositiveX)
    } else if flags.convex_f0 {
        Some(Evidence::ConvexF0)
    } else {
        None
    };
    if let Some(e) = evidence {
        report.verdict = Verdict::Extendable;
        report.evidence = Some(e);
        return Ok(report);
    }

    let span = slice.span();
    if !span.is_finite() {
        return Ok(report);
    }
    let mut samples = Vec::new();
    for k in 1..=GEOMETRIC_DEPTH {
        let step = span * 2f64.powi(-k);
        samples.push(dh_dh(&slice, step)?);
        if k > 1 {
            let phi = slice.profile.inverse_depth(step)?;
            if phi > 0.0 {
                samples.push(dh_dh_at_radius(&slice, phi)?);
            }
        }
    }
    for j in 1..=grid_size {
        samples.push(dh_dh(&slice, span * j as f64 / (grid_size + 1) as f64)?);
    }
    samples.sort_by(|a, b| a.h.total_cmp(&b.h).then(b.phi.total_cmp(&a.phi)));

    let minimum = samples
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .copied()
        .expect("grid is non-empty");
    report.q_min = Some(QMinimum {
        h: minimum.h,
        phi: minimum.phi,
        q: minimum.q(),
        error: minimum.q_error(),
    });
    let certified_negative = samples
        .iter()
        .any(|s| s.value < 0.0 && s.error < 0.5 * s.value.abs());
    let all_positive = samples.iter().all(|s| s.value > 0.0 && s.error < s.value);
    if certified_negative {
        report.verdict = Verdict::NotExtendable;
        report.evidence = Some(Evidence::NumericalNegativeQ);
    } else if all_positive {
        report.verdict = Verdict::Extendable;
        report.evidence = Some(Evidence::DirectQPositivity);
    }
    report.dh_samples = samples;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic(big_r: f64) -> RadialDensity {
        RadialDensity::polynomial(vec![1.0, 0.0, -1.0 / (big_r * big_r)], big_r).unwrap()
    }

    #[test]
    fn slice_vanishes_at_zero_and_increases() {
        let slice = build_energy_slice(&quadratic(8.0)).unwrap();
        assert!(slice.f0(0.0).unwrap().abs() < 1e-15);
        let span = slice.span();
        let mut prev = 0.0;
        for j in 1..100 {
            let v = slice.f0(span * j as f64 / 100.0).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn quadratic_x_is_negative_cubic() {
        let big_r = 3.0;
        let p = quadratic(big_r);
        for r in [0.1f64, 1.0, 2.5] {
            let expected = -16.0 * PI / 5.0 * r.powi(3) / big_r.powi(4);
            assert!((x_function(&p, r).unwrap() - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_q_matches_closed_form() {
        let big_r = 8.0;
        let slice = build_energy_slice(&quadratic(big_r)).unwrap();
        let a = 5.0 / (PI * big_r * big_r);
        for h in [1e-3, 0.5, 5.0, 30.0] {
            let expected = 2f64.sqrt() / (4.0 * PI * PI) / 3.0 / ((h + 4.0 / (9.0 * a)) * h.sqrt());
            let got = recover_q(&slice, h).unwrap();
            assert!(
                (got - expected).abs() < 1e-9 * expected,
                "h={h}: {got} vs {expected}"
            );
        }
    }

    #[test]
    fn rejects_non_decreasing_density() {
        let p = RadialDensity::polynomial(vec![1.0, 1.0, -2.0], 1.0).unwrap();
        assert!(matches!(
            build_energy_slice(&p),
            Err(VpsError::InvalidDensity(_))
        ));
    }

    #[test]
    fn range_checked() {
        let slice = build_energy_slice(&quadratic(1.0)).unwrap();
        assert!(matches!(dh_dh(&slice, 0.0), Err(VpsError::Range { .. })));
        assert!(matches!(
            dh_dh(&slice, slice.span()),
            Err(VpsError::Range { .. })
        ));
    }

    #[test]
    fn q_vanishes_for_non_positive_energy() {
        let q = MicroDistribution::new(1.0, |_| 3.0, false);
        assert_eq!(q.value(-0.5), 0.0);
        assert_eq!(q.value(0.0), 0.0);
        assert_eq!(q.value(0.5), 3.0);
    }
}
