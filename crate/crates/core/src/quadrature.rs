//! Summation and one-dimensional quadrature rules shared by the grid and
//! level-sweep code.

use std::f64::consts::PI;

/// Pairwise (cascade) summation. The association order depends only on the
/// slice length, so reductions are reproducible independent of threading.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Gauss-Legendre nodes and weights on [-1, 1], nodes in decreasing order
/// (so `acos(x)` increases).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let nf = n as f64;
    for k in 0..n {
        let mut x = (PI * (k as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_and_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    (nodes, weights)
}

/// P_n(x) and P_n'(x) via the three-term recurrence.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Chebyshev-spaced levels on `[lo, hi]` with matching quadrature widths.
///
/// Level `k` sits at the angular midpoint of the cell
/// `[lo + (hi-lo)(1-cos(k pi/n))/2, lo + (hi-lo)(1-cos((k+1) pi/n))/2]`, and the
/// returned width is that cell's length. Widths sum to `hi - lo`.
pub fn chebyshev_levels(lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let nf = n as f64;
    let edge = |k: f64| mid - half * (PI * k / nf).cos();
    (0..n)
        .map(|k| {
            let kf = k as f64;
            let c = mid - half * (PI * (kf + 0.5) / nf).cos();
            (c, edge(kf + 1.0) - edge(kf))
        })
        .collect()
}
