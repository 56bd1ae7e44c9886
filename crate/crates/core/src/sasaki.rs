//! Lengths of level-curve lifts to the unit circle bundle under the Sasaki
//! metrics `r^2 g + g`, systoles of the flat models, and the bounds built
//! from them.

use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grid::GridField;
use crate::levelsets::{extract_level, grad_floor, Contour, WeightFn};
use crate::quadrature::pairwise_sum;
use crate::surfaces::SurfaceModel;
use crate::{Error, Result};

fn check_r(r: f64) -> Result<()> {
    if r >= 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("Sasaki parameter r must be finite and >= 0, got {r}")))
    }
}

/// Systole `kappa(r)` of the unit circle bundle. Only the flat models have
/// it in closed form.
pub fn systole(model: SurfaceModel, r: f64) -> Result<f64> {
    check_r(r)?;
    model
        .systole(r)
        .ok_or_else(|| Error::Unsupported(format!("no closed-form systole on the {}", model.name())))
}

/// Sasaki length of the lift of one contour:
/// `sum dt sqrt(1 + r^2 (Hw,w)^2 / |grad f|^2)`, with the fibre part of each
/// segment bounded below by its endpoint normal rotation
/// ([`SegmentSample::lift`]).
///
/// Fails with [`Error::NearCritical`] on the first segment whose midpoint
/// gradient is below the regularity floor.
pub fn lift_length(contour: &Contour, gf: &GridField, r: f64) -> Result<f64> {
    check_r(r)?;
    let floor = grad_floor(gf);
    let samples = contour.samples(gf)?;
    let mut parts = Vec::with_capacity(samples.len());
    for (segment, s) in samples.iter().enumerate() {
        if s.grad_norm < floor {
            return Err(Error::NearCritical { segment, grad_norm: s.grad_norm, floor });
        }
        parts.push(s.lift(r));
    }
    Ok(pairwise_sum(&parts))
}

/// Total turning `sum dt |(Hw,w)| / |grad f|` (segment-wise at least the
/// endpoint rotation), the limit of `lift_length / r` as `r` grows.
pub fn turning(contour: &Contour, gf: &GridField) -> Result<f64> {
    let parts: Vec<f64> = contour.samples(gf)?.iter().map(|s| s.fibre()).collect();
    Ok(pairwise_sum(&parts))
}

/// `L(c)`: the summed lift lengths of every contour of the level.
pub fn level_l(gf: &GridField, c: f64, r: f64) -> Result<f64> {
    let level = extract_level(gf, c)?;
    let parts = level
        .contours
        .par_iter()
        .map(|ct| lift_length(ct, gf, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&parts))
}

/// `kappa(r)^-1 ||u o f|| (int |grad f|^2 + r^2 |H|^2)^(1/2)` with `|H|` the
/// operator norm of the Hessian, which bounds `|(Hw,w)|`.
pub fn co_area_bound(gf: &GridField, u: &WeightFn, r: f64) -> Result<f64> {
    let kappa = systole(gf.model(), r)?;
    let energy = gf.integrate(|n| n.grad.norm.powi(2) + r * r * n.hess.op_norm.powi(2));
    Ok(u.composed_norm(gf) * energy.sqrt() / kappa)
}

/// Both sides of `max |f| <= (1/2pi) int |H|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrBound {
    pub lhs: f64,
    pub rhs: f64,
}

impl GrBound {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }

    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// Evaluates both sides of the Hessian bound on the sup norm. Defined on
/// the simply connected flat models (rectangle, disc).
pub fn gr_bound(gf: &GridField) -> Result<GrBound> {
    match gf.model() {
        SurfaceModel::EuclideanRectangle { .. } | SurfaceModel::UnitDisc => {}
        m => return Err(Error::Unsupported(format!("the Hessian sup-norm bound needs a simply connected flat model, not the {}", m.name()))),
    }
    Ok(GrBound { lhs: gf.max_abs(), rhs: gf.integrate(|n| n.hess.op_norm) / TAU })
}
