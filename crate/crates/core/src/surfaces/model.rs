use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A point in the parameter chart of a model: `(x, y)` on flat models,
/// `(theta, phi)` on the sphere, `(rho, phi)` on the disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub u: f64,
    pub v: f64,
}

impl ChartPoint {
    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }
}

/// One coordinate axis of a chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

impl Axis {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

/// The four model geometries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SurfaceModel {
    /// `[0, 2pi) x [0, 2pi)`, flat, both axes periodic.
    FlatTorus,
    /// Unit sphere in `(theta, phi)`, `phi` periodic.
    RoundSphere,
    /// `[0, a] x [0, b]`, Dirichlet boundary.
    EuclideanRectangle { a: f64, b: f64 },
    /// Unit disc in polar coordinates `(rho, phi)`, `phi` periodic.
    UnitDisc,
}

const EDGE_SLACK: f64 = 1e-12;

impl SurfaceModel {
    pub fn rectangle(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::Config(format!("rectangle sides must be positive, got {a} x {b}")));
        }
        Ok(Self::EuclideanRectangle { a, b })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::FlatTorus => "torus",
            Self::RoundSphere => "sphere",
            Self::EuclideanRectangle { .. } => "rectangle",
            Self::UnitDisc => "disc",
        }
    }

    pub fn axes(&self) -> (Axis, Axis) {
        let periodic = |len| Axis { lo: 0.0, hi: len, periodic: true };
        let closed = |len| Axis { lo: 0.0, hi: len, periodic: false };
        match *self {
            Self::FlatTorus => (periodic(TAU), periodic(TAU)),
            Self::RoundSphere => (closed(PI), periodic(TAU)),
            Self::EuclideanRectangle { a, b } => (closed(a), closed(b)),
            Self::UnitDisc => (closed(1.0), periodic(TAU)),
        }
    }

    /// Gaussian curvature.
    pub fn curvature(&self, _p: ChartPoint) -> f64 {
        match self {
            Self::RoundSphere => 1.0,
            _ => 0.0,
        }
    }

    pub fn total_area(&self) -> f64 {
        match *self {
            Self::FlatTorus => 4.0 * PI * PI,
            Self::RoundSphere => 4.0 * PI,
            Self::EuclideanRectangle { a, b } => a * b,
            Self::UnitDisc => PI,
        }
    }

    /// True when the surface has no boundary.
    pub fn is_closed(&self) -> bool {
        matches!(self, Self::FlatTorus | Self::RoundSphere)
    }

    pub fn is_flat(&self) -> bool {
        !matches!(self, Self::RoundSphere)
    }

    /// Systole of the unit circle bundle under `r^2 g + g`. Known in closed
    /// form only for the flat models.
    pub fn systole(&self, r: f64) -> Option<f64> {
        match self {
            Self::FlatTorus => Some((TAU * r).min(TAU)),
            Self::EuclideanRectangle { .. } | Self::UnitDisc => Some(TAU * r),
            Self::RoundSphere => None,
        }
    }

    /// Validates a chart point and wraps periodic coordinates into `[lo, hi)`.
    pub fn validate(&self, p: ChartPoint) -> Result<ChartPoint> {
        let err = || Error::Domain { model: self.name(), u: p.u, v: p.v };
        if !(p.u.is_finite() && p.v.is_finite()) {
            return Err(err());
        }
        let (au, av) = self.axes();
        let fix = |x: f64, ax: Axis| -> Option<f64> {
            if ax.periodic {
                Some((x - ax.lo).rem_euclid(ax.len()) + ax.lo)
            } else if x >= ax.lo - EDGE_SLACK && x <= ax.hi + EDGE_SLACK {
                Some(x.clamp(ax.lo, ax.hi))
            } else {
                None
            }
        };
        match (fix(p.u, au), fix(p.v, av)) {
            (Some(u), Some(v)) => Ok(ChartPoint { u, v }),
            _ => Err(err()),
        }
    }

    /// Length of the `v` coordinate vector at `p` (the `u` vector is unit on
    /// every chart used here).
    pub fn v_scale(&self, p: ChartPoint) -> f64 {
        match self {
            Self::RoundSphere => p.u.sin(),
            Self::UnitDisc => p.u,
            _ => 1.0,
        }
    }

    /// Position in the ambient Euclidean space (R^2 for flat models, R^3 for
    /// the sphere). The torus is unrolled; callers handle wrap-around.
    fn embed(&self, p: ChartPoint) -> [f64; 3] {
        match self {
            Self::RoundSphere => {
                let s = p.u.sin();
                [s * p.v.cos(), s * p.v.sin(), p.u.cos()]
            }
            Self::UnitDisc => [p.u * p.v.cos(), p.u * p.v.sin(), 0.0],
            _ => [p.u, p.v, 0.0],
        }
    }

    fn unembed(&self, x: [f64; 3]) -> ChartPoint {
        match self {
            Self::RoundSphere => {
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                let theta = (x[2] / r).clamp(-1.0, 1.0).acos();
                ChartPoint::new(theta, x[1].atan2(x[0]).rem_euclid(TAU))
            }
            Self::UnitDisc => {
                let rho = x[0].hypot(x[1]);
                ChartPoint::new(rho, x[1].atan2(x[0]).rem_euclid(TAU))
            }
            Self::FlatTorus => ChartPoint::new(x[0].rem_euclid(TAU), x[1].rem_euclid(TAU)),
            Self::EuclideanRectangle { .. } => ChartPoint::new(x[0], x[1]),
        }
    }

    /// Shortest displacement from `p` to `q` in the unrolled torus chart.
    fn torus_delta(p: ChartPoint, q: ChartPoint) -> (f64, f64) {
        let wrap = |d: f64| d - TAU * (d / TAU).round();
        (wrap(q.u - p.u), wrap(q.v - p.v))
    }

    /// Riemannian length of the short segment between two nearby points.
    /// Geodesic distance on the sphere; straight-line distance otherwise.
    pub fn distance(&self, p: ChartPoint, q: ChartPoint) -> f64 {
        match self {
            Self::FlatTorus => {
                let (du, dv) = Self::torus_delta(p, q);
                du.hypot(dv)
            }
            Self::RoundSphere => {
                let (a, b) = (self.embed(p), self.embed(q));
                let chord = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
                2.0 * (0.5 * chord).min(1.0).asin()
            }
            _ => {
                let (a, b) = (self.embed(p), self.embed(q));
                (a[0] - b[0]).hypot(a[1] - b[1])
            }
        }
    }

    /// Midpoint of the short segment between two nearby points.
    pub fn midpoint(&self, p: ChartPoint, q: ChartPoint) -> ChartPoint {
        match self {
            Self::FlatTorus => {
                let (du, dv) = Self::torus_delta(p, q);
                self.unembed([p.u + 0.5 * du, p.v + 0.5 * dv, 0.0])
            }
            _ => {
                let (a, b) = (self.embed(p), self.embed(q));
                self.unembed([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])])
            }
        }
    }
}
