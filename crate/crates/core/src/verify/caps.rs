//! Frozen family caps.
//!
//! The inequalities hold up to unknown metric constants, so each check
//! compares its ratio against a cap measured on the canonical families
//! (torus `(n,n)` for n = 1..6, zonal l = 2..40, rectangle `[0,pi]^2`
//! modes with m, n <= 8, the normalized disc paraboloid) and rounded up.
//! `tests/calibration.rs` reprints the family maxima; rerun it before
//! changing any value here.

/// `sum m_A / lambda`; torus family maximum `2/pi`.
pub const THM_CRIT_SUM: f64 = 0.70;
/// `sum m_A^2 / lambda`; torus family maximum `2/pi^2`.
pub const THM_CRIT_SQUARES: f64 = 0.225;
/// `B(u,f) / (||u o f|| (||f|| + ||Delta f||))` for `u = 1` and `u = |t|`;
/// the torus family tends to `1/pi^2`.
pub const THM_MAIN: f64 = 0.11;
/// `sum m_A^6 / lambda^(3/2)`, largest at the zonal `l = 2`.
pub const THM_EIGEN: f64 = 0.0095;
/// `#{m_A >= a lambda^(1/4)} a^6` at `a = 0.3`.
pub const COR_COURANT1: f64 = 0.0075;
/// `#{m_A >= a} / (min(1/a, 1/a^2) lambda)` for `a` in {0.1, 0.5, 1}.
pub const COR_COURANT2: f64 = 0.275;
/// `max |f| / lambda^(1/4)`, largest at the rectangle `(1,1)`.
pub const SUPNORM: f64 = 0.59;
/// `sum m_A^8 / lambda^2` over rectangle Dirichlet modes.
pub const REM_SOGGE: f64 = 0.0074;
/// Nodal domain count over `lambda` for normalized eigenmodes.
pub const COURANT_COUNT: f64 = 2.2;
/// Random combinations are held to this multiple of the pure-mode caps.
pub const COMBINATION_FACTOR: f64 = 5.0;
