//! Tables of ladder results: polygon values at `r = 0, R/16, …, R` per `n`, followed
//! by norm and `E₀ₙ` rows. Numbers carry six significant digits.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::ladder::l2_norm;
use super::newton::SolveReport;

/// Which summary rows and last column the table carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartLayout {
    /// Against a known density: last column `p(r) − p_finest(r)`, rows `l2_error`,
    /// `e0n` and `e0_error_pct` relative to the exact `E₀`.
    Reference,
    /// Self-convergence: last column `|p_prev − p_finest| / p_finest` in %, rows
    /// `l2_norm`, `norm_error_pct`, `e0n` and `e0_error_pct` between consecutive `n`.
    SelfConvergence,
}

/// Rows per table: `r_k = kR/16`, `k = 0..=16`.
pub const CHART_ROWS: usize = 16;

/// Formats `v` with six significant digits, trailing zeros removed.
pub fn format_sig6(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exponent = v.abs().log10().floor() as i32;
    let mut s = if (-5..6).contains(&exponent) {
        let decimals = (5 - exponent).max(0) as usize;
        format!("{v:.decimals$}")
    } else {
        format!("{v:.5e}")
    };
    if let Some(epos) = s.find('e') {
        let (mantissa, exp) = s.split_at(epos);
        let mantissa = trim_zeros(mantissa);
        s = format!("{mantissa}{exp}");
    } else {
        s = trim_zeros(&s);
    }
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Builds the CSV table. Cells of radii that are not nodes of a given `n` are empty.
pub fn chart_csv(
    reports: &[SolveReport],
    layout: ChartLayout,
    reference: Option<&dyn Fn(f64) -> f64>,
    exact_e0: Option<f64>,
) -> String {
    let mut out = String::new();
    let Some(finest) = reports.last() else {
        return out;
    };
    let cutoff = finest.cutoff;
    let last_header = match layout {
        ChartLayout::Reference => "reference_minus_finest",
        ChartLayout::SelfConvergence => "finest_change_pct",
    };
    let _ = write!(out, "r");
    for rep in reports {
        let _ = write!(out, ",n={}", rep.n);
    }
    let _ = writeln!(out, ",{last_header}");

    for row in 0..=CHART_ROWS {
        let r = cutoff * row as f64 / CHART_ROWS as f64;
        let _ = write!(out, "{}", format_sig6(r));
        for rep in reports {
            let cell = node_value(rep, row).map(format_sig6).unwrap_or_default();
            let _ = write!(out, ",{cell}");
        }
        let last = match layout {
            ChartLayout::Reference => reference.map(|f| f(r) - finest.value_at(r)),
            ChartLayout::SelfConvergence => {
                let previous = reports.len().checked_sub(2).map(|j| &reports[j]);
                previous.map(|prev| {
                    let fine = finest.value_at(r);
                    if fine == 0.0 {
                        0.0
                    } else {
                        (prev.value_at(r) - fine).abs() / fine * 100.0
                    }
                })
            }
        };
        let _ = writeln!(out, ",{}", last.map(format_sig6).unwrap_or_default());
    }

    let row = |out: &mut String, name: &str, cells: Vec<Option<f64>>, last: Option<f64>| {
        let _ = write!(out, "{name}");
        for c in cells {
            let _ = write!(out, ",{}", c.map(format_sig6).unwrap_or_default());
        }
        let _ = writeln!(out, ",{}", last.map(format_sig6).unwrap_or_default());
    };
    let consecutive = |values: &[f64]| -> Vec<Option<f64>> {
        (0..values.len())
            .map(|j| {
                values
                    .get(j + 1)
                    .map(|next| (values[j] - next).abs() / next.abs() * 100.0)
            })
            .collect()
    };
    let e0s: Vec<f64> = reports.iter().map(|r| r.e0n).collect();
    match layout {
        ChartLayout::Reference => {
            row(
                &mut out,
                "l2_error",
                reports.iter().map(|r| r.l2_error).collect(),
                None,
            );
            row(
                &mut out,
                "e0n",
                e0s.iter().map(|&e| Some(e)).collect(),
                exact_e0,
            );
            let errs = e0s
                .iter()
                .map(|&e| exact_e0.map(|x| (x - e).abs() / x.abs() * 100.0))
                .collect();
            row(&mut out, "e0_error_pct", errs, None);
        }
        ChartLayout::SelfConvergence => {
            let norms: Vec<f64> = reports.iter().map(|r| l2_norm(&r.x, r.cutoff)).collect();
            row(
                &mut out,
                "l2_norm",
                norms.iter().map(|&v| Some(v)).collect(),
                None,
            );
            row(&mut out, "norm_error_pct", consecutive(&norms), None);
            row(
                &mut out,
                "e0n",
                e0s.iter().map(|&e| Some(e)).collect(),
                exact_e0,
            );
            row(&mut out, "e0_error_pct", consecutive(&e0s), None);
        }
    }
    out
}

/// Value of the report's polygon at table row `row` if that radius is a node (or `R`).
fn node_value(rep: &SolveReport, row: usize) -> Option<f64> {
    if row == CHART_ROWS {
        return Some(0.0);
    }
    // r = row·R/16 is node k = row·n/16 when that is an integer
    let scaled = row * rep.n;
    if scaled.is_multiple_of(CHART_ROWS) {
        rep.x.get(scaled / CHART_ROWS).copied()
    } else {
        None
    }
}
