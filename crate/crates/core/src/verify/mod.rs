//! Inequality harness: ratio reports for every checked bound and
//! identity, and log-log scaling fits across eigenmode families.
//!
//! Each check returns the left-hand side and the right-hand side *without*
//! its unknown metric constant. The verdict compares the ratio against a
//! frozen family cap from [`caps`].

pub mod caps;
mod fit;
mod random;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::grid::GridField;
use crate::levelsets::{sweep, LevelSweep, SweepSpec, WeightFn};
use crate::nodal::{count_above, extract_domains, extrema_moments};
use crate::sasaki::{co_area_bound, gr_bound};
use crate::surfaces::{ModeIndex, SurfaceModel};
use crate::textfmt::round12;
use crate::{Error, Result};

pub use fit::{expected_exponent, fit_exponent, scaling_study, Family, Quantity, ScalingFit};
pub use random::random_torus_combination;

/// Tolerances of the admissibility gate.
pub const NORM_TOLERANCE: f64 = 1e-6;
pub const MEAN_TOLERANCE: f64 = 1e-6;
/// Ratios within this distance of 1 are reported as equality cases by the
/// checks that have one.
pub const EQUALITY_TOLERANCE: f64 = 1e-4;
/// Thresholds `a` used by [`standard_reports`]. At 0.3 the zonal polar caps
/// qualify for the first Courant-type count.
pub const COURANT1_THRESHOLD: f64 = 0.3;
pub const COURANT2_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    BoundedInFamily,
    EqualityCase,
    ViolatedScaling,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::BoundedInFamily => "bounded-in-family",
            Self::EqualityCase => "equality-case",
            Self::ViolatedScaling => "violated-scaling",
        }
    }

    fn against_cap(ratio: f64, cap: f64) -> Self {
        if ratio.is_finite() && ratio <= cap {
            Self::BoundedInFamily
        } else {
            Self::ViolatedScaling
        }
    }
}

/// One checked inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub name: String,
    pub model: String,
    pub mode: String,
    pub lambda: f64,
    pub lhs: f64,
    pub rhs_scale: f64,
    pub ratio: f64,
    pub verdict: Verdict,
}

impl InequalityReport {
    fn new(name: &str, gf: &GridField, lambda: f64, lhs: f64, rhs_scale: f64, cap: f64) -> Self {
        let ratio = lhs / rhs_scale;
        Self {
            name: name.into(),
            model: gf.model().name().into(),
            mode: gf.expr().to_string(),
            lambda,
            lhs,
            rhs_scale,
            ratio,
            verdict: Verdict::against_cap(ratio, cap),
        }
    }

    /// Copy with every float rounded to 12 significant digits.
    pub fn rounded(&self) -> Self {
        Self {
            lambda: round12(self.lambda),
            lhs: round12(self.lhs),
            rhs_scale: round12(self.rhs_scale),
            ratio: round12(self.ratio),
            ..self.clone()
        }
    }
}

/// Membership gate for the admissible class: unit norm, zero mean on closed
/// models, and `||grad f||^2 <= ||f|| ||Delta f||`. Returns
/// `lambda = ||Delta f||`.
pub fn admit(gf: &GridField) -> Result<f64> {
    let norm = gf.l2_norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NotAdmissible(format!("||f|| = {norm}, expected 1 within {NORM_TOLERANCE:e}")));
    }
    if gf.model().is_closed() {
        let mean = gf.integrate(|n| n.f);
        if mean.abs() > MEAN_TOLERANCE {
            return Err(Error::NotAdmissible(format!("int f = {mean:e} on a closed surface")));
        }
    }
    let lambda = gf.laplacian_l2();
    let grad_sq = gf.gradient_l2().powi(2);
    if grad_sq > norm * lambda * (1.0 + 1e-9) {
        return Err(Error::NotAdmissible(format!("||grad f||^2 = {grad_sq} exceeds ||f|| ||Delta f|| = {}", norm * lambda)));
    }
    if lambda <= 0.0 {
        return Err(Error::NotAdmissible("constant field".into()));
    }
    Ok(lambda)
}

/// Admits `gf` and additionally requires an eigenfunction.
fn admit_eigen(gf: &GridField, check: &str) -> Result<f64> {
    let lambda = admit(gf)?;
    if gf.expr().eigenvalue().is_none() {
        return Err(Error::NotAdmissible(format!("{check} needs an eigenfunction, got {}", gf.expr())));
    }
    Ok(lambda)
}

/// `sum m_A <= k lambda` and `sum m_A^2 <= k lambda`.
pub fn check_thm_crit(gf: &GridField) -> Result<[InequalityReport; 2]> {
    let lambda = admit(gf)?;
    let nds = extract_domains(gf, None)?;
    Ok([
        InequalityReport::new("thm-crit-sum", gf, lambda, extrema_moments(&nds, 1.0), lambda, caps::THM_CRIT_SUM),
        InequalityReport::new("thm-crit-squares", gf, lambda, extrema_moments(&nds, 2.0), lambda, caps::THM_CRIT_SQUARES),
    ])
}

/// `B(u,f) <= k ||u o f|| (||f|| + ||Delta f||)`.
pub fn check_thm_main(gf: &GridField, u: &WeightFn, spec: &SweepSpec) -> Result<InequalityReport> {
    let lambda = admit(gf)?;
    let s = sweep(gf, &SweepSpec { r_values: Vec::new(), keep_contours: false, ..spec.clone() })?;
    thm_main_from_sweep(gf, u, &s, lambda)
}

fn thm_main_from_sweep(gf: &GridField, u: &WeightFn, s: &LevelSweep, lambda: f64) -> Result<InequalityReport> {
    let b = s.banach(u)?;
    let scale = u.composed_norm(gf) * (gf.l2_norm() + gf.laplacian_l2());
    let mut report = InequalityReport::new("thm-main", gf, lambda, b, scale, caps::THM_MAIN);
    if b == 0.0 && scale == 0.0 {
        report.ratio = 0.0;
        report.verdict = Verdict::BoundedInFamily;
    }
    Ok(report)
}

/// `sum m_A^6 <= k lambda^(3/2)` for eigenfunctions on closed surfaces.
pub fn check_thm_eigen(gf: &GridField) -> Result<InequalityReport> {
    if !gf.model().is_closed() {
        return Err(Error::Unsupported(format!("thm-eigen is checked on closed surfaces, not the {}", gf.model().name())));
    }
    let lambda = admit_eigen(gf, "thm-eigen")?;
    let nds = extract_domains(gf, None)?;
    Ok(InequalityReport::new("thm-eigen", gf, lambda, extrema_moments(&nds, 6.0), lambda.powf(1.5), caps::THM_EIGEN))
}

fn check_a(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("threshold a must be positive, got {a}")))
    }
}

/// `#{A : m_A >= a lambda^(1/4)} <= k a^-6` for eigenfunctions.
pub fn check_cor_courant1(gf: &GridField, a: f64) -> Result<InequalityReport> {
    check_a(a)?;
    let lambda = admit_eigen(gf, "cor-courant1")?;
    let nds = extract_domains(gf, None)?;
    let count = count_above(&nds, a * lambda.powf(0.25)) as f64;
    Ok(InequalityReport::new("cor-courant1", gf, lambda, count, a.powi(-6), caps::COR_COURANT1))
}

/// `#{A : m_A >= a} <= k min(1/a, 1/a^2) lambda`.
pub fn check_cor_courant2(gf: &GridField, a: f64) -> Result<InequalityReport> {
    check_a(a)?;
    let lambda = admit(gf)?;
    let nds = extract_domains(gf, None)?;
    let count = count_above(&nds, a) as f64;
    let scale = (1.0 / a).min(1.0 / (a * a)) * lambda;
    Ok(InequalityReport::new("cor-courant2", gf, lambda, count, scale, caps::COR_COURANT2))
}

/// `max |f| <= k lambda^(1/4)` for eigenfunctions.
pub fn check_supnorm(gf: &GridField) -> Result<InequalityReport> {
    let lambda = admit_eigen(gf, "supnorm")?;
    Ok(InequalityReport::new("supnorm", gf, lambda, gf.max_abs(), lambda.powf(0.25), caps::SUPNORM))
}

/// `sum m_A^8 <= k lambda^2` for rectangle Dirichlet eigenfunctions.
pub fn check_rem_sogge(gf: &GridField) -> Result<InequalityReport> {
    let dirichlet = gf.expr().terms().iter().all(|t| matches!(t.mode.index(), ModeIndex::Dirichlet { .. }));
    if !matches!(gf.model(), SurfaceModel::EuclideanRectangle { .. }) || !dirichlet || gf.expr().builtin_field().is_some() {
        return Err(Error::NotAdmissible(format!("rem-sogge needs a rectangle Dirichlet mode, got {}", gf.expr())));
    }
    let lambda = admit_eigen(gf, "rem-sogge")?;
    let nds = extract_domains(gf, None)?;
    Ok(InequalityReport::new("rem-sogge", gf, lambda, extrema_moments(&nds, 8.0), lambda * lambda, caps::REM_SOGGE))
}

/// Nodal domain count against `lambda`.
pub fn check_courant_count(gf: &GridField) -> Result<InequalityReport> {
    let lambda = admit_eigen(gf, "courant-count")?;
    let nds = extract_domains(gf, None)?;
    Ok(InequalityReport::new("courant-count", gf, lambda, nds.len() as f64, lambda, caps::COURANT_COUNT))
}

/// `max |f| <= (1/2pi) int |H_f|`, whose cap is the bound itself; the disc
/// paraboloid is the equality case.
pub fn check_gr(gf: &GridField) -> Result<InequalityReport> {
    let b = gr_bound(gf)?;
    let lambda = gf.laplacian_l2();
    let mut report = InequalityReport::new("rem-gr", gf, lambda, b.lhs, b.rhs, 1.0 + EQUALITY_TOLERANCE);
    if (report.ratio - 1.0).abs() <= EQUALITY_TOLERANCE {
        report.verdict = Verdict::EqualityCase;
    }
    Ok(report)
}

/// `B(u,f)` against the co-area bound with Sasaki parameter `r`.
pub fn check_co_area(gf: &GridField, u: &WeightFn, r: f64, spec: &SweepSpec) -> Result<InequalityReport> {
    let bound = co_area_bound(gf, u, r)?;
    let b = sweep(gf, &SweepSpec { r_values: Vec::new(), keep_contours: false, ..spec.clone() })?.banach(u)?;
    let lambda = gf.laplacian_l2();
    let mut report = InequalityReport::new("co-area", gf, lambda, b, bound, 1.0 + EQUALITY_TOLERANCE);
    if (report.ratio - 1.0).abs() <= EQUALITY_TOLERANCE {
        report.verdict = Verdict::EqualityCase;
    }
    Ok(report)
}

/// Relative residual of the integrated Bochner identity
/// `int tr(H^2) = ||Delta f||^2 - (1/2) int S |grad f|^2`, with `S` the
/// scalar curvature (twice the Gaussian curvature). Closed models only.
pub fn check_bochner(gf: &GridField) -> Result<f64> {
    let model = gf.model();
    if !model.is_closed() {
        return Err(Error::Unsupported(format!("the Bochner identity is checked on closed surfaces, not the {}", model.name())));
    }
    let lhs = gf.integrate(|n| n.hess.trace_sq());
    let curv = gf.integrate(|n| 2.0 * model.curvature(n.point) * n.grad.norm.powi(2));
    let rhs = gf.laplacian_l2().powi(2) - 0.5 * curv;
    let diff = (lhs - rhs).abs();
    Ok(if rhs == 0.0 { diff } else { diff / rhs.abs() })
}

/// Levels of a sweep where `L(c) < kappa(r) beta(c)`, as
/// `(c, r, L, kappa beta)`. Flat models only.
pub fn systole_violations(gf: &GridField, s: &LevelSweep) -> Result<Vec<(f64, f64, f64, f64)>> {
    let mut out = Vec::new();
    for (k, &r) in s.r_values.iter().enumerate() {
        let kappa = crate::sasaki::systole(gf.model(), r)?;
        for l in &s.levels {
            let floor = kappa * l.beta as f64;
            if l.sasaki[k] < floor {
                out.push((l.c, r, l.sasaki[k], floor));
            }
        }
    }
    Ok(out)
}

/// The standard report set for one field: every check that applies to its
/// model and kind, in a fixed order.
pub fn standard_reports(gf: &GridField, u: &WeightFn, spec: &SweepSpec) -> Result<Vec<InequalityReport>> {
    let lambda = admit(gf)?;
    let eigen = gf.expr().eigenvalue().is_some();
    let mut out = Vec::new();
    out.extend(check_thm_crit(gf)?);
    let s = sweep(gf, &SweepSpec { r_values: Vec::new(), keep_contours: false, ..spec.clone() })?;
    out.push(thm_main_from_sweep(gf, u, &s, lambda)?);
    if eigen {
        if gf.model().is_closed() {
            out.push(check_thm_eigen(gf)?);
        }
        out.push(check_supnorm(gf)?);
        out.push(check_courant_count(gf)?);
        out.push(check_cor_courant1(gf, COURANT1_THRESHOLD)?);
    }
    out.push(check_cor_courant2(gf, COURANT2_THRESHOLD)?);
    if matches!(gf.model(), SurfaceModel::EuclideanRectangle { .. }) && eigen && gf.expr().builtin_field().is_none() {
        out.push(check_rem_sogge(gf)?);
    }
    if matches!(gf.model(), SurfaceModel::EuclideanRectangle { .. } | SurfaceModel::UnitDisc) {
        out.push(check_gr(gf)?);
    }
    Ok(out)
}

/// Area of the model, used by callers that report `||1|| = sqrt(area)`.
pub fn unit_norm(model: SurfaceModel) -> f64 {
    model.total_area().sqrt()
}

/// `(1/2pi) sqrt(area) ||Delta f||`, the large-`r` form of the co-area bound
/// on simply connected flat domains.
pub fn disc_limit_bound(gf: &GridField) -> f64 {
    unit_norm(gf.model()) * gf.laplacian_l2() / TAU
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{FieldExpr, ModeSpec, TorusBranch};
    use std::f64::consts::PI;

    fn torus(n: u32) -> GridField {
        let f = FieldExpr::mode(ModeSpec::torus(n, n, TorusBranch::SinSin).unwrap()).normalized();
        GridField::sample(&f, None).unwrap()
    }

    #[test]
    fn gate_rejects_unnormalized() {
        let f = FieldExpr::mode(ModeSpec::torus(1, 1, TorusBranch::SinSin).unwrap());
        let gf = GridField::sample(&f, None).unwrap();
        assert!(matches!(check_thm_crit(&gf), Err(Error::NotAdmissible(_))));
        let zero = GridField::sample(&FieldExpr::zero(SurfaceModel::FlatTorus).normalized(), None).unwrap();
        assert!(admit(&zero).is_err());
    }

    #[test]
    fn gate_rejects_constant() {
        let f = FieldExpr::mode(ModeSpec::zonal(0)).normalized();
        let gf = GridField::sample(&f, None).unwrap();
        assert!(check_supnorm(&gf).is_err());
    }

    #[test]
    fn thm_crit_torus_ratio() {
        let [sum, squares] = check_thm_crit(&torus(2)).unwrap();
        assert!((sum.ratio - 2.0 / PI).abs() < 1e-3);
        assert!((squares.ratio - 2.0 / (PI * PI)).abs() < 1e-3);
        assert_eq!(sum.verdict, Verdict::BoundedInFamily);
    }

    #[test]
    fn eigen_checks_reject_combinations() {
        let terms = vec![
            crate::surfaces::Term { coefficient: 1.0, mode: ModeSpec::torus(1, 0, TorusBranch::SinCos).unwrap() },
            crate::surfaces::Term { coefficient: 1.0, mode: ModeSpec::torus(2, 1, TorusBranch::SinSin).unwrap() },
        ];
        let gf = GridField::sample(&FieldExpr::combination(terms).unwrap().normalized(), None).unwrap();
        assert!(check_thm_eigen(&gf).is_err());
        assert!(check_thm_crit(&gf).is_ok());
    }

    #[test]
    fn bochner_residuals() {
        assert!(check_bochner(&torus(3)).unwrap() < 1e-3);
        let gf = GridField::sample(&FieldExpr::mode(ModeSpec::zonal(10)).normalized(), None).unwrap();
        assert!(check_bochner(&gf).unwrap() < 1e-3);
        let zero = GridField::sample(&FieldExpr::zero(SurfaceModel::FlatTorus), None).unwrap();
        assert_eq!(check_bochner(&zero).unwrap(), 0.0);
        let disc = GridField::sample(&FieldExpr::disc_paraboloid(), None).unwrap();
        assert!(check_bochner(&disc).is_err());
    }

    #[test]
    fn gr_equality_case() {
        let gf = GridField::sample(&FieldExpr::disc_paraboloid(), None).unwrap();
        assert_eq!(check_gr(&gf).unwrap().verdict, Verdict::EqualityCase);
    }

    #[test]
    fn verdict_strings() {
        let json = serde_json::to_string(&Verdict::ViolatedScaling).unwrap();
        assert_eq!(json, "\"violated-scaling\"");
        assert_eq!(Verdict::EqualityCase.as_str(), "equality-case");
    }
}
