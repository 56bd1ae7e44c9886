//! Fully normalized associated Legendre functions
//!
//! `pbar(l, m, theta) = sqrt((2l+1)/(4 pi) * (l-m)!/(l+m)!) * P_l^m(cos theta)`
//! without the Condon-Shortley phase, evaluated by the forward recurrence in
//! `l` at fixed `m`. The recurrence never forms factorials, so degrees in the
//! hundreds stay finite.

use std::f64::consts::PI;

/// Returns `(pbar_l^m, pbar_{l-1}^m)`; the second entry is zero when `l == m`.
pub(crate) fn pbar_pair(l: usize, m: usize, cos_t: f64, sin_t: f64) -> (f64, f64) {
    debug_assert!(m <= l);
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for k in 1..=m {
        let k = k as f64;
        pmm *= ((2.0 * k + 1.0) / (2.0 * k)).sqrt() * sin_t;
    }
    if l == m {
        return (pmm, 0.0);
    }
    let mf = m as f64;
    let mut prev = pmm;
    let mut cur = (2.0 * mf + 3.0).sqrt() * cos_t * pmm;
    for ll in (m + 2)..=l {
        let lf = ll as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
        let next = a * (cos_t * cur - b * prev);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Value and first two `theta`-derivatives of `pbar_l^m(cos theta)`.
///
/// Requires `sin theta > 0`; the derivatives use
/// `dP/dtheta = (l cos P_l - c_l P_{l-1}) / sin` and the associated Legendre
/// equation for the second derivative.
pub(crate) fn pbar_theta_jet(l: usize, m: usize, theta: f64) -> (f64, f64, f64) {
    let (s, c) = theta.sin_cos();
    let (p, p_prev) = pbar_pair(l, m, c, s);
    let (lf, mf) = (l as f64, m as f64);
    let c_l = if l == m {
        0.0
    } else {
        ((2.0 * lf + 1.0) / (2.0 * lf - 1.0) * (lf * lf - mf * mf)).sqrt()
    };
    let dp = (lf * c * p - c_l * p_prev) / s;
    let d2p = -(c / s) * dp - (lf * (lf + 1.0) - mf * mf / (s * s)) * p;
    (p, dp, d2p)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain Legendre polynomial by Bonnet's recurrence.
    fn legendre(l: usize, x: f64) -> f64 {
        let (mut p0, mut p1) = (1.0, x);
        if l == 0 {
            return 1.0;
        }
        for k in 2..=l {
            let k = k as f64;
            let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        p1
    }

    #[test]
    fn zonal_matches_scaled_legendre() {
        for l in 0..30 {
            for &t in &[0.1, 0.7, 1.3, 2.9] {
                let want = ((2.0 * l as f64 + 1.0) / (4.0 * PI)).sqrt() * legendre(l, f64::cos(t));
                let (got, _) = pbar_pair(l, 0, t.cos(), t.sin());
                assert!((got - want).abs() < 1e-12, "l={l} t={t}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn sectoral_closed_form() {
        // pbar_2^2 = sqrt(15/(32 pi)) sin^2
        let t = 0.8f64;
        let (got, _) = pbar_pair(2, 2, t.cos(), t.sin());
        assert!((got - (15.0 / (32.0 * PI)).sqrt() * t.sin().powi(2)).abs() < 1e-14);
        // pbar_2^1 = sqrt(15/(8 pi)) sin cos
        let (got, _) = pbar_pair(2, 1, t.cos(), t.sin());
        assert!((got - (15.0 / (8.0 * PI)).sqrt() * t.sin() * t.cos()).abs() < 1e-14);
    }

    #[test]
    fn theta_derivatives_match_differences() {
        let h = 1e-5;
        for &(l, m) in &[(3, 0), (6, 2), (10, 10), (25, 7)] {
            let t = 1.1;
            let (_, dp, d2p) = pbar_theta_jet(l, m, t);
            let f = |t: f64| pbar_pair(l, m, t.cos(), t.sin()).0;
            let fd1 = (f(t + h) - f(t - h)) / (2.0 * h);
            let g = |t: f64| pbar_theta_jet(l, m, t).1;
            let fd2 = (g(t + h) - g(t - h)) / (2.0 * h);
            assert!((dp - fd1).abs() < 1e-7 * (1.0 + dp.abs()), "l={l} m={m}");
            assert!((d2p - fd2).abs() < 1e-6 * (1.0 + d2p.abs()), "l={l} m={m}");
        }
    }

    #[test]
    fn high_degree_stays_finite() {
        let (p, q) = pbar_pair(400, 200, 0.3f64.cos(), 0.3f64.sin());
        assert!(p.is_finite() && q.is_finite());
    }
}
