//! Quadrature rules used throughout the crate.
//!
//! Two families are provided:
//! - an adaptive Gauss–Kronrod (7/15) integrator with a global error estimate,
//!   used where an error bound is reported alongside the value;
//! - composite Gauss–Legendre panels with panel doubling, used for the
//!   substituted weakly singular Abel/Eddington kernels.
//!
//! A plain composite midpoint rule is kept as an independent cross-check.

use std::sync::OnceLock;

/// Result of a numerical integration together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Integral {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Integral {
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// The interval with the largest local error is bisected until the summed error
/// estimate drops below `max(abs_tol, rel_tol * |I|)` or `max_intervals` is reached.
/// The returned error is the summed |K15 − G7| estimate, which is conservative for
/// smooth integrands.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Integral {
    if a == b {
        return Integral {
            value: 0.0,
            error: 0.0,
        };
    }
    let first = gk15(&f, a, b);
    let mut pieces: Vec<(f64, f64, Integral)> = vec![(a, b, first)];
    loop {
        let total: f64 = pieces.iter().map(|p| p.2.value).sum();
        let err: f64 = pieces.iter().map(|p| p.2.error).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) || pieces.len() >= max_intervals {
            return Integral {
                value: total,
                error: err,
            };
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.error.total_cmp(&y.1 .2.error))
            .expect("non-empty");
        let (lo, hi, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // Interval can no longer be split in floating point.
            let total: f64 = pieces.iter().map(|p| p.2.value).sum::<f64>() + gk15(&f, lo, hi).value;
            return Integral {
                value: total,
                error: err,
            };
        }
        pieces.push((lo, mid, gk15(&f, lo, mid)));
        pieces.push((mid, hi, gk15(&f, mid, hi)));
    }
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (p, prev) = if n == 0 { (1.0, 0.0) } else { (p1, p0) };
    let d = n as f64 * (x * p - prev) / (x * x - 1.0);
    (p, d)
}

/// Number of nodes per Gauss–Legendre panel for the singular kernels.
pub const PANEL_NODES: usize = 64;

fn gl64() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(PANEL_NODES))
}

/// Composite 64-point Gauss–Legendre rule with `panels` equal panels.
pub fn composite_gauss_legendre<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let (nodes, weights) = gl64();
    let width = (b - a) / panels as f64;
    let mut sum = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * width;
        let centre = lo + 0.5 * width;
        let mut panel = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            panel += w * f(centre + 0.5 * width * x);
        }
        sum += panel * 0.5 * width;
    }
    sum
}

/// Composite 64-point Gauss–Legendre with panel doubling until two successive
/// values differ by at most `rel_tol` relative (with a tiny absolute floor).
/// The difference of the last two values is returned as the error estimate.
pub fn panel_doubling<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Integral {
    if a == b {
        return Integral {
            value: 0.0,
            error: 0.0,
        };
    }
    let mut panels = 1;
    let mut prev = composite_gauss_legendre(&f, a, b, panels);
    loop {
        panels *= 2;
        let next = composite_gauss_legendre(&f, a, b, panels);
        let diff = (next - prev).abs();
        if diff <= rel_tol * next.abs() + 1e-300 || panels >= max_panels {
            return Integral {
                value: next,
                error: diff,
            };
        }
        prev = next;
    }
}

/// Composite midpoint rule with `n` panels.
pub fn midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|k| f(a + (k as f64 + 0.5) * h)).sum::<f64>() * h
}

/// Composite three-point Gauss–Legendre rule with `n` panels.
pub fn composite_gauss3<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    const X: f64 = 0.774_596_669_241_483_4;
    const W_OUT: f64 = 5.0 / 9.0;
    const W_MID: f64 = 8.0 / 9.0;
    let h = (b - a) / n as f64;
    let mut sum = 0.0;
    for k in 0..n {
        let c = a + (k as f64 + 0.5) * h;
        let d = 0.5 * h * X;
        sum += W_OUT * (f(c - d) + f(c + d)) + W_MID * f(c);
    }
    sum * 0.5 * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        for n in [1, 2, 5, 16, 64] {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13, "n={n}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn gauss_legendre_exact_for_high_degree() {
        let (x, w) = gauss_legendre(64);
        // degree 126 monomial integrates exactly
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(126)).sum();
        assert!((s - 2.0 / 127.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_sqrt() {
        let r = adaptive(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12, 1e-12, 2000);
        assert!((r.value - 2.0 / 3.0).abs() < 1e-11, "{r:?}");
        assert!(r.error < 1e-10);
    }

    #[test]
    fn adaptive_error_bounds_true_error() {
        let r = adaptive(|x: f64| (10.0 * x).sin(), 0.0, 3.0, 1e-6, 0.0, 1000);
        let exact = (1.0 - 30f64.cos()) / 10.0;
        assert!((r.value - exact).abs() <= r.error.max(1e-14));
    }

    #[test]
    fn panel_doubling_converges_on_smooth() {
        let r = panel_doubling(|x: f64| x.exp(), 0.0, 2.0, 1e-12, 1 << 10);
        assert!((r.value - (2f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn midpoint_and_gauss3_agree_on_polynomial() {
        let f = |x: f64| 3.0 * x * x;
        assert!((midpoint(f, 0.0, 1.0, 10_000) - 1.0).abs() < 1e-8);
        assert!((composite_gauss3(f, 0.0, 1.0, 3) - 1.0).abs() < 1e-14);
    }
}
