//! Log-log scaling fits over eigenmode families.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grid::GridField;
use crate::levelsets::{sweep, SweepSpec, WeightFn};
use crate::nodal::{extract_domains, extrema_moments};
use crate::surfaces::{FieldExpr, ModeSpec, TorusBranch};
use crate::{Error, Result};

/// Fewest family members a fit accepts.
pub const MIN_MEMBERS: usize = 5;
/// The smallest-lambda members left out of the fit.
pub const PREASYMPTOTIC: usize = 2;

/// A one-parameter eigenmode family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Family {
    /// `sin(nx) sin(ny)` on the torus.
    TorusDiagonal { n_min: u32, n_max: u32 },
    /// Zonal harmonics `Y_l^0`.
    Zonal { l_min: u32, l_max: u32 },
    /// `(n, n)` Dirichlet modes on `[0,a] x [0,b]`.
    DirichletDiagonal { a: f64, b: f64, n_min: u32, n_max: u32 },
}

impl Family {
    pub fn modes(&self) -> Result<Vec<ModeSpec>> {
        let check = |lo: u32, hi: u32| {
            if lo > hi {
                Err(Error::Config(format!("empty family range {lo}..={hi}")))
            } else {
                Ok(lo..=hi)
            }
        };
        match *self {
            Self::TorusDiagonal { n_min, n_max } => check(n_min.max(1), n_max)?
                .map(|n| ModeSpec::torus(n, n, TorusBranch::SinSin))
                .collect(),
            Self::Zonal { l_min, l_max } => Ok(check(l_min.max(1), l_max)?.map(ModeSpec::zonal).collect()),
            Self::DirichletDiagonal { a, b, n_min, n_max } => {
                check(n_min.max(1), n_max)?.map(|n| ModeSpec::dirichlet(a, b, n, n)).collect()
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::TorusDiagonal { n_min, n_max } => format!("torus(n,n) n={n_min}..{n_max}"),
            Self::Zonal { l_min, l_max } => format!("zonal l={l_min}..{l_max}"),
            Self::DirichletDiagonal { a, b, n_min, n_max } => {
                format!("rectangle {a}x{b} (n,n) n={n_min}..{n_max}")
            }
        }
    }
}

/// A per-field quantity whose growth in `lambda` is fitted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Quantity {
    /// `sum_A m_A^q`.
    SumExtrema { q: f64 },
    SupNorm,
    LpNorm { p: f64 },
    /// Smallest nodal domain inradius.
    MinInradius,
    DomainCount,
    /// `B(1, f)`.
    Banach,
}

impl Quantity {
    pub fn eval(&self, gf: &GridField) -> Result<f64> {
        Ok(match *self {
            Self::SumExtrema { q } => extrema_moments(&extract_domains(gf, None)?, q),
            Self::SupNorm => gf.max_abs(),
            Self::LpNorm { p } => {
                if !(p >= 1.0) {
                    return Err(Error::Config(format!("L^p norm needs p >= 1, got {p}")));
                }
                gf.lp_norm(p)
            }
            Self::MinInradius => extract_domains(gf, None)?
                .domains
                .iter()
                .map(|d| d.inradius)
                .fold(f64::INFINITY, f64::min),
            Self::DomainCount => extract_domains(gf, None)?.len() as f64,
            Self::Banach => sweep(gf, &SweepSpec { r_values: Vec::new(), ..SweepSpec::default() })?.banach(&WeightFn::one())?,
        })
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SumExtrema { q } => write!(f, "sum_m_A^{q}"),
            Self::SupNorm => write!(f, "max_abs_f"),
            Self::LpNorm { p } => write!(f, "L{p}_norm"),
            Self::MinInradius => write!(f, "min_inradius"),
            Self::DomainCount => write!(f, "domain_count"),
            Self::Banach => write!(f, "banach_B1"),
        }
    }
}

/// Expected growth exponent in `lambda` and the tolerance a fit must meet,
/// where the family's algebra fixes one.
pub fn expected_exponent(family: &Family, quantity: Quantity) -> Option<(f64, f64)> {
    use Quantity::*;
    match (family, quantity) {
        (Family::TorusDiagonal { .. } | Family::DirichletDiagonal { .. }, q) => match q {
            SumExtrema { .. } | DomainCount | Banach => Some((1.0, 0.05)),
            SupNorm | LpNorm { .. } => Some((0.0, 0.03)),
            MinInradius => Some((-0.5, 0.05)),
        },
        (Family::Zonal { .. }, q) => match q {
            // Polar caps dominate for q > 2: each contributes (l^(1/2))^q.
            SumExtrema { q } if q > 2.0 => Some((q / 4.0, 0.1)),
            SumExtrema { q } if q < 2.0 => Some((0.5, 0.1)),
            SumExtrema { .. } => None,
            SupNorm => Some((0.25, 0.03)),
            LpNorm { p: 6.0 } => Some((1.0 / 12.0, 0.1)),
            LpNorm { .. } => None,
            MinInradius => Some((-0.5, 0.05)),
            DomainCount => Some((0.5, 0.05)),
            Banach => None,
        },
    }
}

/// Least-squares slope of `log value` against `log lambda`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub family: String,
    pub quantity: String,
    /// `(lambda, value)` for every member, ascending in `lambda`.
    pub points: Vec<(f64, f64)>,
    /// Members excluded from the fit at the low-lambda end.
    pub excluded: usize,
    pub fitted_exponent: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fitted log values.
    pub residual: f64,
    pub expected_exponent: Option<f64>,
    pub tolerance: Option<f64>,
}

impl ScalingFit {
    /// `intercept + slope log lambda`.
    pub fn predict_log(&self, lambda: f64) -> f64 {
        self.intercept + self.fitted_exponent * lambda.ln()
    }

    pub fn within_tolerance(&self) -> Option<bool> {
        Some((self.fitted_exponent - self.expected_exponent?).abs() <= self.tolerance?)
    }
}

/// Fits `value ~ lambda^p` over `points`, excluding the
/// [`PREASYMPTOTIC`] smallest-lambda members.
pub fn fit_exponent(family: &str, quantity: &str, mut points: Vec<(f64, f64)>) -> Result<ScalingFit> {
    if points.len() < MIN_MEMBERS {
        return Err(Error::Config(format!("a scaling fit needs at least {MIN_MEMBERS} members, got {}", points.len())));
    }
    if let Some(p) = points.iter().find(|(l, v)| !(*l > 0.0 && *v > 0.0 && l.is_finite() && v.is_finite())) {
        return Err(Error::Degenerate(format!("cannot take logs of member (lambda={}, value={})", p.0, p.1)));
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let used: Vec<(f64, f64)> = points[PREASYMPTOTIC..].iter().map(|(l, v)| (l.ln(), v.ln())).collect();
    let n = used.len() as f64;
    let mx = used.iter().map(|p| p.0).sum::<f64>() / n;
    let my = used.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = used.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all fitted members share one lambda".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (used.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(ScalingFit {
        family: family.into(),
        quantity: quantity.into(),
        points,
        excluded: PREASYMPTOTIC,
        fitted_exponent: slope,
        intercept,
        residual,
        expected_exponent: None,
        tolerance: None,
    })
}

/// Samples each normalized family member at the default resolution and fits
/// the growth exponent of `quantity` against `lambda = ||Delta f||`.
pub fn scaling_study(family: &Family, quantity: Quantity) -> Result<ScalingFit> {
    let modes = family.modes()?;
    if modes.len() < MIN_MEMBERS {
        return Err(Error::Config(format!("a scaling fit needs at least {MIN_MEMBERS} members, got {}", modes.len())));
    }
    let points = modes
        .par_iter()
        .map(|m| {
            let gf = GridField::sample(&FieldExpr::mode(*m).normalized(), None)?;
            Ok((gf.laplacian_l2(), quantity.eval(&gf)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut fit = fit_exponent(&family.label(), &quantity.to_string(), points)?;
    if let Some((e, tol)) = expected_exponent(family, quantity) {
        fit.expected_exponent = Some(e);
        fit.tolerance = Some(tol);
    }
    Ok(fit)
}
