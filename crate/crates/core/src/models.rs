//! Built-in model densities with their closed forms.
//!
//! Every fixture carries the generic [`RadialDensity`] and, where one exists, the
//! closed-form potential, `X`, energy slice `F₀`, microscopic distribution `q` and
//! direct-problem map `G₀`. Tests diff the closed forms against the generic pipeline.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::abel_eddington::Evaluator;
use crate::ans_solver::GZeroMap;
use crate::density::RadialDensity;
use crate::error::{Result, VpsError};
use crate::inverse_problem::{build_energy_slice, EnergySlice, MicroDistribution};

/// Names accepted by [`fixture`].
pub const FIXTURE_NAMES: [&str; 6] = [
    "quadratic-5.1",
    "squared-linear-5.2",
    "exponential-5.3",
    "power-law-5.4",
    "sqrt-q-5.8",
    "quartic-5.9",
];

/// Inflection point `w` of the quartic density.
pub const QUARTIC_W: f64 = 1.3;

/// The constant `c = √2/(16π⁴·1000)` of the `q = c√s` model.
pub fn default_sqrt_q_constant() -> f64 {
    2f64.sqrt() / (16.0 * PI.powi(4) * 1000.0)
}

/// Coefficients `a₀..a₄` of the quartic density on `[0, 2]`.
pub fn quartic_coefficients() -> [f64; 5] {
    [2.0, 0.0, -39.0 / 146.0, -107.0 / 146.0, 45.0 / 146.0]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpectedVerdict {
    Extendable,
    NotExtendable,
    /// No sufficient condition holds; the answer depends on the parameters and is left open.
    RegimeDependent,
}

impl fmt::Display for ExpectedVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Extendable => "extendable",
            Self::NotExtendable => "not-extendable",
            Self::RegimeDependent => "regime-dependent",
        })
    }
}

/// Parameters a fixture may take; unset values fall back to the fixture default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FixtureParams {
    pub cutoff: Option<f64>,
    /// Exponent of the power law.
    pub b: Option<f64>,
    /// Constant of `q(s) = c√s`.
    pub c: Option<f64>,
}

/// `P`, `P′`, `P″` and, when available, `P⁻¹`.
#[derive(Clone)]
pub struct ClosedPotential {
    pub value: Evaluator,
    pub derivative: Evaluator,
    pub second_derivative: Evaluator,
    pub inverse: Option<Evaluator>,
}

/// `F₀`, `F₀′`, `F₀″` on `[0, span]`.
#[derive(Clone)]
pub struct ClosedEnergy {
    pub span: f64,
    pub f0: Evaluator,
    pub f0_prime: Evaluator,
    pub f0_second: Evaluator,
}

#[derive(Clone)]
pub struct ModelFixture {
    pub name: &'static str,
    pub parameters: Vec<(&'static str, f64)>,
    pub cutoff: f64,
    /// `None` for models defined through `q` (the density is then the unknown).
    pub density: Option<RadialDensity>,
    pub potential: Option<ClosedPotential>,
    pub x_function: Option<Evaluator>,
    pub energy: Option<ClosedEnergy>,
    pub micro: Option<MicroDistribution>,
    pub g0: Option<GZeroMap>,
    /// Exact `E₀ = P(R)` where known.
    pub e0: Option<f64>,
    pub expected: ExpectedVerdict,
}

impl fmt::Debug for ModelFixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelFixture")
            .field("name", &self.name)
            .field("parameters", &self.parameters)
            .field("density", &self.density)
            .field("closed_potential", &self.potential.is_some())
            .field("closed_x", &self.x_function.is_some())
            .field("closed_energy", &self.energy.is_some())
            .field("micro", &self.micro)
            .field("g0", &self.g0)
            .field("expected", &self.expected)
            .finish()
    }
}

impl ModelFixture {
    /// The generic energy slice of the density, with the closed-form `F₀` attached when
    /// the fixture has one.
    pub fn energy_slice(&self) -> Result<EnergySlice> {
        let density = self
            .density
            .as_ref()
            .ok_or_else(|| VpsError::Domain(format!("{} has no closed-form density", self.name)))?;
        let slice = build_energy_slice(density)?;
        Ok(match &self.energy {
            Some(e) => {
                let (a, b, c) = (e.f0.clone(), e.f0_prime.clone(), e.f0_second.clone());
                slice.with_closed_form(move |s| a(s), move |s| b(s), move |s| c(s))
            }
            None => slice,
        })
    }

    /// The density as a plain function (for L₂ errors against ladder results).
    pub fn reference(&self) -> Option<impl Fn(f64) -> f64 + '_> {
        self.density.as_ref().map(|d| move |r: f64| d.value(r))
    }
}

/// One row of the `models list` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureSummary {
    pub name: &'static str,
    pub parameters: String,
    pub expected: String,
}

/// Defaults of every fixture with its expected verdict.
pub fn list_fixtures() -> Vec<FixtureSummary> {
    FIXTURE_NAMES
        .iter()
        .map(|&name| {
            let (parameters, expected) = match name {
                "quadratic-5.1" => ("R > 0 (default 8)", "extendable"),
                "squared-linear-5.2" => ("R > 0 (default 1)", "extendable"),
                "exponential-5.3" => (
                    "R > 0 (default 2)",
                    "extendable for R >= 2, regime-dependent below",
                ),
                "power-law-5.4" => (
                    "0 < b < 3 (default 1.5), R > 0 (default 1)",
                    "extendable for b >= 1, regime-dependent below",
                ),
                "sqrt-q-5.8" => (
                    "c > 0 (default sqrt(2)/(16 pi^4 1000)), R > 0 (default 8)",
                    "direct problem only",
                ),
                _ => ("R = 2, w = 13/10 (fixed)", "not-extendable"),
            };
            FixtureSummary {
                name,
                parameters: parameters.into(),
                expected: expected.into(),
            }
        })
        .collect()
}

/// Look up a fixture by name.
pub fn fixture(name: &str, params: &FixtureParams) -> Result<ModelFixture> {
    let positive = |v: f64, what: &str| {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(VpsError::Domain(format!(
                "{what} must be positive and finite, got {v}"
            )))
        }
    };
    match name {
        "quadratic-5.1" => quadratic(positive(params.cutoff.unwrap_or(8.0), "R")?),
        "squared-linear-5.2" => squared_linear(positive(params.cutoff.unwrap_or(1.0), "R")?),
        "exponential-5.3" => exponential(positive(params.cutoff.unwrap_or(2.0), "R")?),
        "power-law-5.4" => power_law(
            params.b.unwrap_or(1.5),
            positive(params.cutoff.unwrap_or(1.0), "R")?,
        ),
        "sqrt-q-5.8" => sqrt_q(
            positive(params.c.unwrap_or_else(default_sqrt_q_constant), "c")?,
            positive(params.cutoff.unwrap_or(8.0), "R")?,
        ),
        "quartic-5.9" => {
            if params.cutoff.is_some_and(|r| r != 2.0) {
                return Err(VpsError::Domain(
                    "quartic-5.9 is defined for R = 2 only".into(),
                ));
            }
            quartic()
        }
        other => Err(VpsError::Domain(format!(
            "unknown fixture {other:?}; known: {}",
            FIXTURE_NAMES.join(", ")
        ))),
    }
}

fn arc<F: Fn(f64) -> f64 + Send + Sync + 'static>(f: F) -> Evaluator {
    Arc::new(f)
}

/// `p = 1 − (r/R)²`: everything in closed form.
fn quadratic(big_r: f64) -> Result<ModelFixture> {
    let r2 = big_r * big_r;
    let a = 5.0 / (PI * r2);
    let span = 7.0 / 15.0 * PI * r2;
    let potential = ClosedPotential {
        value: arc(move |r| {
            PI * r2 * (0.2 * (r / big_r).powi(4) - 2.0 / 3.0 * (r / big_r).powi(2) + 1.0)
        }),
        derivative: arc(move |r| 4.0 * PI * r2 * (0.2 * r.powi(3) / (r2 * r2) - r / (3.0 * r2))),
        second_derivative: arc(move |r| {
            4.0 * PI * r2 * (0.6 * r * r / (r2 * r2) - 1.0 / (3.0 * r2))
        }),
        inverse: Some(arc(move |h| {
            big_r * (5.0 / 3.0 - (a * h - 20.0 / 9.0).max(0.0).sqrt()).sqrt()
        })),
    };
    let energy = ClosedEnergy {
        span,
        f0: arc(move |h| (a * h + 4.0 / 9.0).sqrt() - 2.0 / 3.0),
        f0_prime: arc(move |h| 0.5 * a / (a * h + 4.0 / 9.0).sqrt()),
        f0_second: arc(move |h| -0.25 * a * a / (a * h + 4.0 / 9.0).powf(1.5)),
    };
    let q = move |h: f64| 2f64.sqrt() / (4.0 * PI * PI) / 3.0 / ((h + 4.0 / (9.0 * a)) * h.sqrt());
    Ok(ModelFixture {
        name: "quadratic-5.1",
        parameters: vec![("R", big_r)],
        cutoff: big_r,
        density: Some(RadialDensity::polynomial(vec![1.0, 0.0, -1.0 / r2], big_r)?),
        potential: Some(potential),
        x_function: Some(arc(move |r| -16.0 * PI / 5.0 * r.powi(3) / (r2 * r2))),
        energy: Some(energy),
        micro: Some(MicroDistribution::new(span, q, true)),
        g0: Some(GZeroMap::quadratic(big_r)),
        e0: Some(8.0 / 15.0 * PI * r2),
        expected: ExpectedVerdict::Extendable,
    })
}

/// `p = (1 − r/R)²`.
fn squared_linear(big_r: f64) -> Result<ModelFixture> {
    let potential = ClosedPotential {
        value: arc(move |r| {
            4.0 * PI
                * (-r * r / 6.0 + r.powi(3) / (6.0 * big_r) - r.powi(4) / (20.0 * big_r * big_r)
                    + big_r * big_r / 12.0)
        }),
        derivative: arc(move |r| {
            4.0 * PI * (-r / 3.0 + 0.5 * r * r / big_r - 0.2 * r.powi(3) / (big_r * big_r))
        }),
        second_derivative: arc(move |r| {
            4.0 * PI * (-1.0 / 3.0 + r / big_r - 0.6 * r * r / (big_r * big_r))
        }),
        inverse: None,
    };
    let x = move |r: f64| {
        let al = r / big_r;
        4.0 * PI / big_r * (2.0 / 3.0 - 2.0 * al + 2.2 * al * al - 0.8 * al.powi(3))
    };
    Ok(ModelFixture {
        name: "squared-linear-5.2",
        parameters: vec![("R", big_r)],
        cutoff: big_r,
        density: Some(RadialDensity::polynomial(
            vec![1.0, -2.0 / big_r, 1.0 / (big_r * big_r)],
            big_r,
        )?),
        potential: Some(potential),
        x_function: Some(arc(x)),
        energy: None,
        micro: None,
        g0: None,
        e0: Some(4.0 * PI / 30.0 * big_r * big_r),
        expected: ExpectedVerdict::Extendable,
    })
}

/// `Σ_{k≥5} r^{k−5}/k!`.
fn exp_tail5(r: f64) -> f64 {
    let mut term: f64 = 1.0 / 120.0;
    let mut sum: f64 = 0.0;
    let mut k = 5.0;
    while term > 1e-18 * sum.max(1e-300) || sum == 0.0 {
        sum += term;
        k += 1.0;
        term *= r / k;
        if k > 500.0 {
            break;
        }
    }
    sum
}

/// `X(r, R)` of the exponential model in its cancellation-free series form.
pub fn exponential_x(r: f64, big_r: f64) -> f64 {
    4.0 * PI
        * (-2.0 * r).exp()
        * (-(r - big_r).exp() / 3.0 * (1.0 + r)
            + 1.0 / 3.0
            + r / 6.0
            + r * r / 12.0
            + (2.0 * r - 4.0) * r * r * exp_tail5(r))
}

/// The curve `R(r)` on which `X(r, R) = 0` for `R < 2`.
pub fn exponential_zero_curve(r: f64) -> f64 {
    -(6.0 * ((r + 2.0) * (-r).exp() + r - 2.0) / ((r + 1.0) * r.powi(3))).ln()
}

/// `p = e^{−r} − e^{−R}`.
fn exponential(big_r: f64) -> Result<ModelFixture> {
    let er = (-big_r).exp();
    let potential = ClosedPotential {
        value: arc(move |r| {
            4.0 * PI
                * (-(-r).exp() * (1.0 + 2.0 / r) + 2.0 / r
                    - er * (1.0 + big_r + big_r * big_r / 2.0 - r * r / 6.0))
        }),
        derivative: arc(move |r| {
            4.0 * PI * ((-r).exp() * (1.0 + 2.0 / r + 2.0 / (r * r)) - 2.0 / (r * r) + er * r / 3.0)
        }),
        second_derivative: arc(move |r| {
            4.0 * PI
                * (-(-r).exp() * (1.0 + 2.0 / r + 4.0 / (r * r) + 4.0 / r.powi(3))
                    + 4.0 / r.powi(3)
                    + er / 3.0)
        }),
        inverse: None,
    };
    Ok(ModelFixture {
        name: "exponential-5.3",
        parameters: vec![("R", big_r)],
        cutoff: big_r,
        density: Some(RadialDensity::exponential_shift(big_r)?),
        potential: Some(potential),
        x_function: Some(arc(move |r| exponential_x(r, big_r))),
        energy: None,
        micro: None,
        g0: None,
        e0: Some(
            4.0 * PI
                * (2.0 / big_r
                    - (-big_r).exp() * (1.0 + 2.0 / big_r)
                    - er * (1.0 + big_r + big_r * big_r / 3.0)),
        ),
        expected: if big_r >= 2.0 {
            ExpectedVerdict::Extendable
        } else {
            ExpectedVerdict::RegimeDependent
        },
    })
}

/// Zero `r₀/R = (6/(6 + b − b²))^{1/b}` of `X` for `0 < b < 1`.
pub fn power_law_x_zero(b: f64) -> f64 {
    (6.0 / (6.0 + b - b * b)).powf(1.0 / b)
}

/// `p = r^{−b} − R^{−b}`, `0 < b < 3`.
fn power_law(b: f64, big_r: f64) -> Result<ModelFixture> {
    if !(b > 0.0 && b < 3.0) {
        return Err(VpsError::Domain(format!(
            "power-law exponent must lie in (0, 3), got {b}"
        )));
    }
    let rb = big_r.powf(-b);
    let value: Evaluator = if b == 2.0 {
        arc(move |r| 4.0 * PI * (0.5 + (big_r / r).ln() + r * r / (6.0 * big_r * big_r)))
    } else {
        arc(move |r| {
            4.0 * PI
                * (-r.powf(2.0 - b) / ((3.0 - b) * (2.0 - b))
                    + rb * r * r / 6.0
                    + b * big_r.powf(2.0 - b) / (2.0 * (2.0 - b)))
        })
    };
    let potential = ClosedPotential {
        value,
        derivative: arc(move |r| 4.0 * PI * (-r.powf(1.0 - b) / (3.0 - b) + rb * r / 3.0)),
        second_derivative: arc(move |r| 4.0 * PI * ((b - 1.0) * r.powf(-b) / (3.0 - b) + rb / 3.0)),
        inverse: None,
    };
    let x = move |r: f64| {
        4.0 * PI
            * (2.0 * b / (3.0 - b) * r.powf(-2.0 * b - 1.0)
                - (b * b + 2.0 * b) / 3.0 * rb * r.powf(-b - 1.0))
    };
    let e0 = 4.0 * PI * big_r.powf(2.0 - b) * ((b - 1.0) / (2.0 * (3.0 - b)) + 1.0 / 6.0);
    Ok(ModelFixture {
        name: "power-law-5.4",
        parameters: vec![("b", b), ("R", big_r)],
        cutoff: big_r,
        density: Some(RadialDensity::power_law(b, big_r)?),
        potential: Some(potential),
        x_function: Some(arc(x)),
        energy: None,
        micro: None,
        g0: None,
        e0: Some(e0),
        expected: if b >= 1.0 {
            ExpectedVerdict::Extendable
        } else {
            ExpectedVerdict::RegimeDependent
        },
    })
}

/// `q(s) = c√s`: the density is the unknown of the direct problem.
fn sqrt_q(c: f64, big_r: f64) -> Result<ModelFixture> {
    let k = PI * PI * c / 2f64.sqrt();
    let energy = ClosedEnergy {
        span: f64::INFINITY,
        f0: arc(move |h| k * h * h),
        f0_prime: arc(move |h| 2.0 * k * h),
        f0_second: arc(move |_| 2.0 * k),
    };
    Ok(ModelFixture {
        name: "sqrt-q-5.8",
        parameters: vec![("c", c), ("R", big_r)],
        cutoff: big_r,
        density: None,
        potential: None,
        x_function: None,
        energy: Some(energy),
        micro: Some(MicroDistribution::new(
            f64::INFINITY,
            move |s: f64| c * s.sqrt(),
            true,
        )),
        g0: Some(GZeroMap::sqrt_q(c)),
        e0: None,
        expected: ExpectedVerdict::Extendable,
    })
}

/// The unextendable quartic on `[0, 2]`.
fn quartic() -> Result<ModelFixture> {
    let potential = ClosedPotential {
        value: arc(|r| {
            4.0 * PI
                * (-r * r / 3.0 + 39.0 / 2920.0 * r.powi(4) + 107.0 / 4380.0 * r.powi(5)
                    - 15.0 / 2044.0 * r.powi(6)
                    + 558.0 / 365.0)
        }),
        derivative: arc(|r| {
            4.0 * PI
                * (-2.0 * r / 3.0 + 156.0 / 2920.0 * r.powi(3) + 535.0 / 4380.0 * r.powi(4)
                    - 90.0 / 2044.0 * r.powi(5))
        }),
        second_derivative: arc(|r| {
            4.0 * PI
                * (-2.0 / 3.0 + 468.0 / 2920.0 * r * r + 2140.0 / 4380.0 * r.powi(3)
                    - 450.0 / 2044.0 * r.powi(4))
        }),
        inverse: None,
    };
    Ok(ModelFixture {
        name: "quartic-5.9",
        parameters: vec![("R", 2.0), ("w", QUARTIC_W)],
        cutoff: 2.0,
        density: Some(RadialDensity::polynomial(
            quartic_coefficients().to_vec(),
            2.0,
        )?),
        potential: Some(potential),
        x_function: Some(arc(quartic_x)),
        energy: None,
        micro: None,
        g0: None,
        e0: Some(
            4.0 * PI
                * (-4.0 / 3.0 + 39.0 / 2920.0 * 16.0 + 107.0 / 4380.0 * 32.0
                    - 15.0 / 2044.0 * 64.0
                    + 558.0 / 365.0),
        ),
        expected: ExpectedVerdict::NotExtendable,
    })
}

/// `X` of the quartic density as a polynomial.
pub fn quartic_x(r: f64) -> f64 {
    let poly = [
        0.0,
        0.0,
        -1_093_540.0,
        1_183_812.0,
        -233_688.0,
        -330_515.0,
        329_025.0,
        -81_000.0,
    ];
    4.0 * PI / 746_060.0 * poly.iter().rev().fold(0.0, |acc, c| acc * r + c)
}

/// The sign change `r₁ ∈ (1, 2)` of the quartic's `X`.
pub fn quartic_x_zero() -> f64 {
    let (mut lo, mut hi) = (1.0, 2.0);
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if quartic_x(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
