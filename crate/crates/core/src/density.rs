//! Radial densities with compact support `[0, R]`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, VpsError};

/// How a density is represented. The representation decides which closed-form
/// potential is available and whether derivatives are analytic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DensityShape {
    /// `p(r) = Σ a_l r^l` on `[0, R]`; coefficients in increasing degree.
    Polynomial { coefficients: Vec<f64> },
    /// `p(r) = e^{-r} − e^{-R}` on `[0, R]`.
    ExponentialShift,
    /// `p(r) = r^{-b} − R^{-b}` on `(0, R]`, `0 < b < 3`.
    PowerLaw { b: f64 },
    /// Piecewise-linear polygon on the equidistant nodes `kR/n`, with the
    /// value 0 at `R`. `values[k]` is the value at node `k`, `k = 0..n−1`.
    Polygon { values: Vec<f64> },
}

/// A radial density `p` with cutoff radius `R`: `p > 0` on `[0, R)` and `p = 0` on `[R, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialDensity {
    cutoff: f64,
    shape: DensityShape,
}

impl RadialDensity {
    pub fn polynomial(coefficients: Vec<f64>, cutoff: f64) -> Result<Self> {
        check_cutoff(cutoff)?;
        if coefficients.is_empty() {
            return Err(VpsError::InvalidDensity(
                "polynomial without coefficients".into(),
            ));
        }
        Ok(Self {
            cutoff,
            shape: DensityShape::Polynomial { coefficients },
        })
    }

    pub fn exponential_shift(cutoff: f64) -> Result<Self> {
        check_cutoff(cutoff)?;
        Ok(Self {
            cutoff,
            shape: DensityShape::ExponentialShift,
        })
    }

    /// Power-law density. Rejects `b >= 3`, where `∫ p s² ds` diverges at the origin.
    pub fn power_law(b: f64, cutoff: f64) -> Result<Self> {
        check_cutoff(cutoff)?;
        if !(b > 0.0) {
            return Err(VpsError::Domain(format!(
                "power-law exponent must be positive, got {b}"
            )));
        }
        if b >= 3.0 {
            return Err(VpsError::Domain(format!(
                "power-law exponent b = {b} >= 3: the density has infinite mass"
            )));
        }
        Ok(Self {
            cutoff,
            shape: DensityShape::PowerLaw { b },
        })
    }

    /// Polygon through `(kR/n, values[k])`, `k = 0..n−1`, and `(R, 0)`.
    pub fn polygon(values: Vec<f64>, cutoff: f64) -> Result<Self> {
        check_cutoff(cutoff)?;
        if values.is_empty() {
            return Err(VpsError::InvalidDensity("polygon without nodes".into()));
        }
        Ok(Self {
            cutoff,
            shape: DensityShape::Polygon { values },
        })
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn shape(&self) -> &DensityShape {
        &self.shape
    }

    /// True when `p′` and `p″` are evaluated from closed forms rather than differences.
    pub fn has_analytic_derivatives(&self) -> bool {
        !matches!(self.shape, DensityShape::Polygon { .. })
    }

    /// `p(r)`. Returns 0 for `r >= R` and `+∞` at `r = 0` for the power law.
    pub fn value(&self, r: f64) -> f64 {
        let big_r = self.cutoff;
        if r >= big_r {
            return 0.0;
        }
        match &self.shape {
            DensityShape::Polynomial { coefficients } => horner(coefficients, r),
            DensityShape::ExponentialShift => (-r).exp() - (-big_r).exp(),
            DensityShape::PowerLaw { b } => r.powf(-b) - big_r.powf(-b),
            DensityShape::Polygon { values } => polygon_value(values, big_r, r),
        }
    }

    /// `p′(r)` on `(0, R]`, taken from the inside at `r = R`; 0 beyond `R`.
    pub fn derivative(&self, r: f64) -> f64 {
        let big_r = self.cutoff;
        if r > big_r {
            return 0.0;
        }
        match &self.shape {
            DensityShape::Polynomial { coefficients } => horner(&differentiate(coefficients), r),
            DensityShape::ExponentialShift => -(-r).exp(),
            DensityShape::PowerLaw { b } => -b * r.powf(-b - 1.0),
            DensityShape::Polygon { .. } => self.central_difference(r, 1),
        }
    }

    /// `p″(r)` on `(0, R]`, taken from the inside at `r = R`; 0 beyond `R`.
    pub fn second_derivative(&self, r: f64) -> f64 {
        let big_r = self.cutoff;
        if r > big_r {
            return 0.0;
        }
        match &self.shape {
            DensityShape::Polynomial { coefficients } => {
                horner(&differentiate(&differentiate(coefficients)), r)
            }
            DensityShape::ExponentialShift => (-r).exp(),
            DensityShape::PowerLaw { b } => b * (b + 1.0) * r.powf(-b - 2.0),
            DensityShape::Polygon { .. } => self.central_difference(r, 2),
        }
    }

    /// Finite-difference derivative with step `max(1e-5 R, cbrt(eps) R)`,
    /// one-sided where the stencil would leave `[0, R]`.
    fn central_difference(&self, r: f64, order: u8) -> f64 {
        let big_r = self.cutoff;
        let step = (1e-5 * big_r).max(f64::EPSILON.cbrt() * big_r);
        let inside = |x: f64| self.value(x.min(big_r * (1.0 - 1e-15)));
        let centre = r.clamp(step, big_r - step);
        match order {
            1 => (inside(centre + step) - inside(centre - step)) / (2.0 * step),
            _ => {
                (inside(centre + step) - 2.0 * inside(centre) + inside(centre - step))
                    / (step * step)
            }
        }
    }

    /// Samples `p` on a uniform grid of `samples` points in `[0, R)` (the power
    /// law starts just inside the origin) and checks strict decrease.
    pub fn is_strictly_decreasing(&self, samples: usize) -> bool {
        let big_r = self.cutoff;
        let start = if matches!(self.shape, DensityShape::PowerLaw { .. }) {
            1e-9 * big_r
        } else {
            0.0
        };
        let mut prev = self.value(start);
        for j in 1..samples {
            let r = start + (big_r - start) * j as f64 / samples as f64;
            let v = self.value(r);
            if !(v < prev) {
                return false;
            }
            prev = v;
        }
        true
    }

    /// Checks `p > 0` on a sampled grid of `[0, R)`.
    pub fn is_positive_inside(&self, samples: usize) -> bool {
        let big_r = self.cutoff;
        (0..samples).all(|j| {
            let r = big_r * j as f64 / samples as f64;
            let r = if r == 0.0 && matches!(self.shape, DensityShape::PowerLaw { .. }) {
                1e-9 * big_r
            } else {
                r
            };
            self.value(r) > 0.0
        })
    }
}

fn check_cutoff(cutoff: f64) -> Result<()> {
    if cutoff > 0.0 && cutoff.is_finite() {
        Ok(())
    } else {
        Err(VpsError::Domain(format!(
            "cutoff radius must be positive and finite, got {cutoff}"
        )))
    }
}

pub(crate) fn horner(coefficients: &[f64], x: f64) -> f64 {
    coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

pub(crate) fn differentiate(coefficients: &[f64]) -> Vec<f64> {
    coefficients
        .iter()
        .enumerate()
        .skip(1)
        .map(|(l, c)| l as f64 * c)
        .collect()
}

pub(crate) fn polygon_value(values: &[f64], cutoff: f64, r: f64) -> f64 {
    let n = values.len();
    let h = cutoff / n as f64;
    if r <= 0.0 {
        return values[0];
    }
    let k = ((r / h).floor() as usize).min(n - 1);
    let left = values[k];
    let right = if k + 1 < n { values[k + 1] } else { 0.0 };
    let t = (r - k as f64 * h) / h;
    left + t * (right - left)
}
