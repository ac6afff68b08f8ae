//! Potentials of hat functions and the matrix `A = B − C` of the discretized
//! equation `Lp − E₀ = G₀(p)`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Result, VpsError};

/// The four pieces of a hat function's potential. `01` is the rising half (0 at the
/// lower end, 1 at the upper), `10` the falling half. Kind `I` evaluates at a radius
/// below the segment, kind `II` above it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentKind {
    #[serde(rename = "I-01")]
    InnerRising,
    #[serde(rename = "I-10")]
    InnerFalling,
    #[serde(rename = "II-01")]
    OuterRising,
    #[serde(rename = "II-10")]
    OuterFalling,
}

/// Potential at `r` of the linear segment on `[lo, hi]` that runs from 0 to 1
/// (rising) or from 1 to 0 (falling), exactly.
pub fn segment_potential(kind: SegmentKind, lo: f64, hi: f64, r: f64) -> Result<f64> {
    let ordered = match kind {
        SegmentKind::InnerRising | SegmentKind::InnerFalling => 0.0 <= r && r <= lo && lo < hi,
        SegmentKind::OuterRising | SegmentKind::OuterFalling => {
            0.0 <= lo && lo < hi && hi <= r && r > 0.0
        }
    };
    if !ordered {
        return Err(VpsError::Domain(format!(
            "segment [{lo}, {hi}] and radius {r} violate the ordering of {kind:?}"
        )));
    }
    let (s, t) = (lo, hi);
    Ok(match kind {
        SegmentKind::InnerRising => 4.0 * PI / 3.0 * (t * t - s * (t + s) / 2.0),
        SegmentKind::InnerFalling => 4.0 * PI / 3.0 * (t * (t + s) / 2.0 - s * s),
        SegmentKind::OuterRising => {
            PI / r * (t.powi(3) - (t * t * s + t * s * s + s.powi(3)) / 3.0)
        }
        SegmentKind::OuterFalling => {
            PI / r * ((t.powi(3) + t * t * s + t * s * s) / 3.0 - s.powi(3))
        }
    })
}

/// `B_{ik} = L(hat_k)(R_i)` for the nodes `R_k = kR/n`, `i, k = 0..n−1`.
pub fn assemble_b(n: usize, cutoff: f64) -> DMatrix<f64> {
    let h = cutoff / n as f64;
    let h2 = h * h;
    DMatrix::from_fn(n, n, |i, k| {
        let (fi, fk) = (i as f64, k as f64);
        match (i, k) {
            (0, 0) => 2.0 * PI / 3.0 * h2,
            (_, 0) => PI / 3.0 / fi * h2,
            (0, _) => 4.0 * PI * fk * h2,
            _ if i > k => 4.0 * PI * h2 / fi * (fk * fk + 1.0 / 6.0),
            _ if i == k => 4.0 * PI * h2 * (fk - 1.0 / 6.0 + 1.0 / (12.0 * fk)),
            _ => 4.0 * PI * h2 * fk,
        }
    })
}

/// `C_k = L(hat_k)(R)`.
pub fn assemble_c(n: usize, cutoff: f64) -> DVector<f64> {
    let h = cutoff / n as f64;
    DVector::from_fn(n, |k, _| {
        if k == 0 {
            PI / (3.0 * cutoff) * h.powi(3)
        } else {
            let fk = k as f64;
            4.0 * PI / n as f64 * h * h * (fk * fk + 1.0 / 6.0)
        }
    })
}

/// `L(hat_k)(r)` composed from the four segment potentials.
pub fn hat_potential(n: usize, cutoff: f64, k: usize, r: f64) -> Result<f64> {
    let h = cutoff / n as f64;
    let node = k as f64 * h;
    // radii within rounding of a segment end are taken to lie on it
    let snap = |r: f64| {
        [node - h, node, node + h]
            .into_iter()
            .find(|b| (r - b).abs() <= 1e-12 * cutoff)
            .unwrap_or(r)
    };
    let r = snap(r);
    let mut total = 0.0;
    if k > 0 {
        let lo = node - h;
        total += if r <= lo {
            segment_potential(SegmentKind::InnerRising, lo, node, r)?
        } else if r >= node {
            segment_potential(SegmentKind::OuterRising, lo, node, r)?
        } else {
            return Err(VpsError::Domain(format!(
                "radius {r} inside the support of hat {k}"
            )));
        };
    }
    let hi = node + h;
    total += if r <= node {
        segment_potential(SegmentKind::InnerFalling, node, hi, r)?
    } else if r >= hi {
        segment_potential(SegmentKind::OuterFalling, node, hi, r)?
    } else {
        return Err(VpsError::Domain(format!(
            "radius {r} inside the support of hat {k}"
        )));
    };
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_examples() {
        let v = segment_potential(SegmentKind::InnerFalling, 0.0, 1.0, 0.0).unwrap();
        assert!((v - 2.0 * PI / 3.0).abs() < 1e-15);
        let v = segment_potential(SegmentKind::OuterFalling, 0.0, 1.0, 2.0).unwrap();
        assert!((v - PI / 6.0).abs() < 1e-15);
        assert!(segment_potential(SegmentKind::InnerRising, 1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn small_system_entries() {
        let b = assemble_b(2, 8.0);
        assert!((b[(0, 0)] - 32.0 * PI / 3.0).abs() < 1e-12);
        assert!((b[(1, 1)] - 64.0 * PI * 11.0 / 12.0).abs() < 1e-12);
        let c = assemble_c(2, 8.0);
        assert!((c[0] - 8.0 * PI / 3.0).abs() < 1e-12);
        assert!((c[1] - 112.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_match_segment_sums() {
        for n in [1, 2, 3, 5, 8] {
            let b = assemble_b(n, 1.7);
            let c = assemble_c(n, 1.7);
            for k in 0..n {
                for i in 0..n {
                    let r = 1.7 * i as f64 / n as f64;
                    let v = hat_potential(n, 1.7, k, r).unwrap();
                    assert!((b[(i, k)] - v).abs() < 1e-13 * v, "n={n} i={i} k={k}");
                }
                let v = hat_potential(n, 1.7, k, 1.7).unwrap();
                assert!((c[k] - v).abs() < 1e-13 * v);
            }
        }
    }
}
