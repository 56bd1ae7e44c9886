//! Level curves `{f = c}`, the Banach indicatrix `beta(c)` and its weighted
//! integral `B(u, f)`, and Leray lengths.

mod marching;

use std::f64::consts::TAU;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::grid::GridField;
use crate::quadrature::{chebyshev_levels, pairwise_sum};
use crate::surfaces::{ChartPoint, Derivatives, SurfaceModel};
use crate::textfmt::sig12;
use crate::{Error, Result};
use marching::Lattice;

/// Default number of sweep levels.
pub const DEFAULT_LEVELS: usize = 512;
/// Fewest levels a sweep accepts.
pub const MIN_LEVELS: usize = 64;

/// A polyline on the chart. Closed contours repeat their first point.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    pub points: Vec<ChartPoint>,
    pub closed: bool,
}

/// Per-segment data sampled at the segment midpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentSample {
    pub midpoint: ChartPoint,
    /// Riemannian segment length.
    pub dt: f64,
    pub grad_norm: f64,
    /// `(H w, w)` with `w` the unit tangent of the level line.
    pub hww: f64,
    /// Covariant rotation of the unit normal `grad f / |grad f|` between the
    /// segment endpoints, in radians; 0 when an endpoint is critical.
    pub turn: f64,
}

impl SegmentSample {
    /// `sqrt(1 + r^2 (Hw,w)^2 / |grad f|^2)`, the Sasaki speed of the lift.
    pub fn lift_speed(&self, r: f64) -> f64 {
        let num = r * self.hww;
        if num == 0.0 {
            1.0
        } else if self.grad_norm == 0.0 {
            f64::INFINITY
        } else {
            (1.0 + (num / self.grad_norm).powi(2)).sqrt()
        }
    }

    /// Fibre displacement of the lift over this segment: the midpoint rule
    /// `dt |(Hw,w)| / |grad f|`, but never less than the endpoint rotation
    /// `turn`. A segment cutting across a sharp tip of a small loop has a
    /// midpoint far from where the normal turns; the endpoint rotation still
    /// sees it, so a closed loop always accumulates its full `2 pi`.
    pub fn fibre(&self) -> f64 {
        let mid = if self.hww == 0.0 {
            0.0
        } else if self.grad_norm == 0.0 {
            f64::INFINITY
        } else {
            self.dt * (self.hww / self.grad_norm).abs()
        };
        mid.max(self.turn)
    }

    /// Sasaki length of the lifted segment, `sqrt(dt^2 + r^2 fibre^2)`.
    /// Equals `dt * lift_speed(r)` wherever the midpoint rule dominates.
    pub fn lift(&self, r: f64) -> f64 {
        let v = r * self.fibre();
        if v == 0.0 {
            self.dt
        } else {
            self.dt.hypot(v)
        }
    }
}

/// Derivatives at a contour point, stepping off the sphere poles and the
/// disc centre where the chart frame is undefined.
fn derivatives_at(gf: &GridField, p: ChartPoint) -> Result<Derivatives> {
    const POLE_GAP: f64 = 1e-9;
    let p = match gf.model() {
        SurfaceModel::RoundSphere => {
            ChartPoint::new(p.u.clamp(POLE_GAP, std::f64::consts::PI - POLE_GAP), p.v)
        }
        SurfaceModel::UnitDisc => ChartPoint::new(p.u.max(POLE_GAP), p.v),
        _ => p,
    };
    gf.expr().derivatives(p)
}

fn wrap_angle(a: f64) -> f64 {
    a - TAU * (a / TAU).round()
}

/// Rotation of the chart frame against parallel transport along the short
/// path from `p` to `q`: `cos(theta) dphi` on the sphere, `dphi` on the disc.
fn frame_rotation(model: SurfaceModel, p: ChartPoint, q: ChartPoint) -> f64 {
    match model {
        SurfaceModel::RoundSphere => model.midpoint(p, q).u.cos() * wrap_angle(q.v - p.v),
        SurfaceModel::UnitDisc => wrap_angle(q.v - p.v),
        _ => 0.0,
    }
}

impl Contour {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Riemannian length of the polyline.
    pub fn length(&self, model: SurfaceModel) -> f64 {
        let parts: Vec<f64> = self.points.windows(2).map(|w| model.distance(w[0], w[1])).collect();
        pairwise_sum(&parts)
    }

    /// Midpoint samples of every segment, with analytic derivatives.
    pub fn samples(&self, gf: &GridField) -> Result<Vec<SegmentSample>> {
        let model = gf.model();
        let normal_angle = |p: ChartPoint| -> Result<Option<f64>> {
            let g = derivatives_at(gf, p)?.grad;
            Ok((g.norm > 0.0).then(|| g.frame[1].atan2(g.frame[0])))
        };
        let angles = self.points.iter().map(|&p| normal_angle(p)).collect::<Result<Vec<_>>>()?;
        self.points
            .windows(2)
            .zip(angles.windows(2))
            .map(|(w, a)| {
                let midpoint = model.midpoint(w[0], w[1]);
                let d = derivatives_at(gf, midpoint)?;
                let g = d.grad.frame;
                let grad_norm = d.grad.norm;
                let hww = if grad_norm > 0.0 {
                    d.hess.quadratic([-g[1] / grad_norm, g[0] / grad_norm])
                } else {
                    // Any unit vector; the lift speed is infinite regardless.
                    d.hess.op_norm
                };
                let turn = match (a[0], a[1]) {
                    (Some(a0), Some(a1)) => wrap_angle(a1 - a0 + frame_rotation(model, w[0], w[1])).abs(),
                    _ => 0.0,
                };
                Ok(SegmentSample { midpoint, dt: model.distance(w[0], w[1]), grad_norm, hww, turn })
            })
            .collect()
    }
}

/// All contours of one level.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSet {
    pub c: f64,
    pub contours: Vec<Contour>,
}

impl LevelSet {
    /// Number of connected components.
    pub fn beta(&self) -> usize {
        self.contours.len()
    }
}

/// Extracts `{f = c}` by marching squares. Levels outside the sampled range
/// give an empty set.
pub fn extract_level(gf: &GridField, c: f64) -> Result<LevelSet> {
    if !c.is_finite() {
        return Err(Error::Config(format!("level must be finite, got {c}")));
    }
    let contours = Lattice::new(gf)?.extract(c)?;
    Ok(LevelSet { c, contours })
}

/// `|grad f|` below which a level counts as irregular:
/// `1e-3 max|f| sqrt(lambda)` for eigenmode fields, `1e-6 max|f|` otherwise.
pub fn grad_floor(gf: &GridField) -> f64 {
    let m = gf.max_abs();
    match gf.lambda_hint() {
        Some(l) if l > 0.0 => 1e-3 * m * l.sqrt(),
        _ => 1e-6 * m,
    }
}

/// Leray length `sum dt / |grad f|` of the level `c`.
pub fn leray_length(gf: &GridField, c: f64) -> Result<f64> {
    let level = extract_level(gf, c)?;
    if level.contours.is_empty() {
        return Err(Error::Config(format!("level {c} does not meet the sampled field")));
    }
    let floor = grad_floor(gf);
    let mut parts = Vec::new();
    for contour in &level.contours {
        for s in contour.samples(gf)? {
            if s.grad_norm < floor {
                return Err(Error::IrregularLevel { c });
            }
            parts.push(s.dt / s.grad_norm);
        }
    }
    Ok(pairwise_sum(&parts))
}

/// Weight function `u` in `B(u, f) = int u(c) beta(c) dc`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightFn {
    Constant { value: f64 },
    Abs,
    Square,
    /// Piecewise linear through `(t, u)` knots sorted by `t`, held constant
    /// outside the knot range.
    Table { knots: Vec<(f64, f64)> },
}

impl WeightFn {
    pub fn one() -> Self {
        Self::Constant { value: 1.0 }
    }

    pub fn table(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() || knots.iter().any(|(t, u)| !t.is_finite() || !u.is_finite()) {
            return Err(Error::Config("weight table needs finite knots".into()));
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self::Table { knots })
    }

    /// Parses `one`, `abs`, `square`, or a number for a constant weight.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "one" | "1" => Ok(Self::one()),
            "abs" => Ok(Self::Abs),
            "square" => Ok(Self::Square),
            _ => s
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(|value| Self::Constant { value })
                .ok_or_else(|| Error::Config(format!("unknown weight function '{s}'"))),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Abs => t.abs(),
            Self::Square => t * t,
            Self::Table { knots } => {
                let k = knots.partition_point(|&(x, _)| x <= t);
                if k == 0 {
                    knots[0].1
                } else if k == knots.len() {
                    knots[k - 1].1
                } else {
                    let ((x0, y0), (x1, y1)) = (knots[k - 1], knots[k]);
                    y0 + (y1 - y0) * (t - x0) / (x1 - x0)
                }
            }
        }
    }

    /// `||u o f||` in `L^2` over the surface.
    pub fn composed_norm(&self, gf: &GridField) -> f64 {
        gf.integrate(|n| self.eval(n.f).powi(2)).sqrt()
    }

    pub fn label(&self) -> String {
        match self {
            Self::Constant { value } if *value == 1.0 => "one".into(),
            Self::Constant { value } => format!("const({})", sig12(*value)),
            Self::Abs => "abs".into(),
            Self::Square => "square".into(),
            Self::Table { knots } => format!("table({})", knots.len()),
        }
    }
}

/// Sweep range, level count, Sasaki parameters, and whether to keep the
/// contours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSpec {
    /// Defaults to the sampled minimum of `f` (boundary values included).
    pub c_min: Option<f64>,
    pub c_max: Option<f64>,
    pub n_levels: usize,
    pub r_values: Vec<f64>,
    pub keep_contours: bool,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { c_min: None, c_max: None, n_levels: DEFAULT_LEVELS, r_values: vec![1.0], keep_contours: false }
    }
}

impl SweepSpec {
    pub fn with_range(mut self, lo: f64, hi: f64) -> Self {
        self.c_min = Some(lo);
        self.c_max = Some(hi);
        self
    }

    pub fn with_levels(mut self, n: usize) -> Self {
        self.n_levels = n;
        self
    }

    pub fn with_r(mut self, r: Vec<f64>) -> Self {
        self.r_values = r;
        self
    }

    pub fn keeping_contours(mut self) -> Self {
        self.keep_contours = true;
        self
    }
}

/// One level of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelRecord {
    pub c: f64,
    /// Quadrature weight of this level.
    pub width: f64,
    pub beta: usize,
    /// Sasaki lift length `L(c)` for each sweep `r`. Computed at irregular
    /// levels too, where it may be infinite.
    pub sasaki: Vec<f64>,
    /// Leray length; only meaningful at regular levels.
    pub leray: f64,
    /// Smallest midpoint `|grad f|` on the level (infinite when empty).
    pub min_grad: f64,
    pub regular: bool,
    pub contours: Option<Vec<Contour>>,
}

/// Results of a level sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSweep {
    pub c_min: f64,
    pub c_max: f64,
    pub grad_floor: f64,
    pub r_values: Vec<f64>,
    pub levels: Vec<LevelRecord>,
}

/// `int beta^2 / l dc` with its comparison value `||f|| + ||Delta f||`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LerayForm {
    pub integral: f64,
    pub norm_sum: f64,
}

fn level_record(lat: &Lattice, gf: &GridField, c: f64, width: f64, rs: &[f64], floor: f64, keep: bool) -> Result<LevelRecord> {
    let contours = lat.extract(c)?;
    let mut min_grad = f64::INFINITY;
    let mut leray = Vec::new();
    let mut lifts = vec![Vec::new(); rs.len()];
    for contour in &contours {
        for s in contour.samples(gf)? {
            min_grad = min_grad.min(s.grad_norm);
            leray.push(s.dt / s.grad_norm);
            for (acc, &r) in lifts.iter_mut().zip(rs) {
                acc.push(s.lift(r));
            }
        }
    }
    Ok(LevelRecord {
        c,
        width,
        beta: contours.len(),
        sasaki: lifts.iter().map(|v| pairwise_sum(v)).collect(),
        leray: pairwise_sum(&leray),
        min_grad,
        regular: min_grad >= floor,
        contours: keep.then_some(contours),
    })
}

/// Sweeps Chebyshev-spaced levels over `[c_min, c_max]`, in parallel over
/// levels, returning records in ascending `c`.
pub fn sweep(gf: &GridField, spec: &SweepSpec) -> Result<LevelSweep> {
    if spec.n_levels < MIN_LEVELS {
        return Err(Error::Config(format!("a sweep needs at least {MIN_LEVELS} levels, got {}", spec.n_levels)));
    }
    if let Some(r) = spec.r_values.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
        return Err(Error::Config(format!("Sasaki parameter r must be finite and >= 0, got {r}")));
    }
    let lat = Lattice::new(gf)?;
    let (lo, hi) = lat.value_range();
    let c_min = spec.c_min.unwrap_or(lo);
    let c_max = spec.c_max.unwrap_or(hi);
    if !(c_min.is_finite() && c_max.is_finite()) || c_max < c_min {
        return Err(Error::Config(format!("invalid sweep range [{c_min}, {c_max}]")));
    }
    if c_max == c_min {
        return Err(Error::Degenerate(format!("empty value range at {c_min}")));
    }
    let floor = grad_floor(gf);
    let levels = chebyshev_levels(c_min, c_max, spec.n_levels)
        .into_par_iter()
        .map(|(c, w)| level_record(&lat, gf, c, w, &spec.r_values, floor, spec.keep_contours))
        .collect::<Result<Vec<_>>>()?;
    Ok(LevelSweep { c_min, c_max, grad_floor: floor, r_values: spec.r_values.clone(), levels })
}

impl LevelSweep {
    fn regular_levels(&self) -> Result<impl Iterator<Item = &LevelRecord>> {
        if self.levels.iter().all(|l| !l.regular) {
            return Err(Error::Degenerate(format!(
                "all {} levels are irregular (grad floor {:e})",
                self.levels.len(),
                self.grad_floor
            )));
        }
        Ok(self.levels.iter().filter(|l| l.regular))
    }

    /// `B(u, f)`: midpoint quadrature of `u(c) beta(c)` over regular levels.
    pub fn banach(&self, u: &WeightFn) -> Result<f64> {
        let terms: Vec<f64> = self.regular_levels()?.map(|l| u.eval(l.c) * l.beta as f64 * l.width).collect();
        Ok(pairwise_sum(&terms))
    }

    /// `int beta^2 / l dc` over regular levels; empty levels contribute 0.
    pub fn leray_integral(&self) -> Result<f64> {
        let terms: Vec<f64> = self
            .regular_levels()?
            .filter(|l| l.beta > 0)
            .map(|l| (l.beta * l.beta) as f64 / l.leray * l.width)
            .collect();
        Ok(pairwise_sum(&terms))
    }

    /// Total `c`-measure of the levels excluded as irregular.
    pub fn irregular_measure(&self) -> f64 {
        self.levels.iter().filter(|l| !l.regular).map(|l| l.width).sum()
    }

    /// Writes `c,beta,L_sasaki(r=..),...,leray,regular`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "c,beta")?;
        for r in &self.r_values {
            write!(w, ",L_sasaki(r={})", sig12(*r))?;
        }
        writeln!(w, ",leray,regular")?;
        for l in &self.levels {
            write!(w, "{},{}", sig12(l.c), l.beta)?;
            for s in &l.sasaki {
                write!(w, ",{}", sig12(*s))?;
            }
            writeln!(w, ",{},{}", sig12(l.leray), l.regular)?;
        }
        Ok(())
    }

    /// Writes `c,contour,index,x,y` for every level that kept its contours.
    pub fn write_contours_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "c,contour,index,x,y")?;
        for l in &self.levels {
            for (k, contour) in l.contours.iter().flatten().enumerate() {
                for (i, p) in contour.points.iter().enumerate() {
                    writeln!(w, "{},{},{},{},{}", sig12(l.c), k, i, sig12(p.u), sig12(p.v))?;
                }
            }
        }
        Ok(())
    }
}

/// `B(u, f)` over a fresh sweep.
pub fn banach_indicatrix(gf: &GridField, u: &WeightFn, spec: &SweepSpec) -> Result<f64> {
    sweep(gf, &SweepSpec { r_values: Vec::new(), keep_contours: false, ..spec.clone() })?.banach(u)
}

/// `int beta^2 / l dc` paired with `||f|| + ||Delta f||`.
pub fn leray_form_check(gf: &GridField, spec: &SweepSpec) -> Result<LerayForm> {
    let s = sweep(gf, &SweepSpec { r_values: Vec::new(), keep_contours: false, ..spec.clone() })?;
    Ok(LerayForm { integral: s.leray_integral()?, norm_sum: gf.l2_norm() + gf.laplacian_l2() })
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

    fn paraboloid() -> GridField {
        GridField::sample(&FieldExpr::disc_paraboloid(), None).unwrap()
    }

    #[test]
    fn torus_level_counts_loops_per_cell() {
        for n in 1..=3 {
            let level = extract_level(&torus(n), 0.5 / PI).unwrap();
            assert_eq!(level.beta() as u32, 2 * n * n);
            assert!(level.contours.iter().all(|c| c.closed && c.points.first() == c.points.last()));
        }
    }

    #[test]
    fn paraboloid_circle() {
        let gf = paraboloid();
        let level = extract_level(&gf, 0.75).unwrap();
        assert_eq!(level.beta(), 1);
        let len = level.contours[0].length(gf.model());
        assert!((len - PI).abs() < 5e-3 * PI, "{len}");
    }

    #[test]
    fn outside_range_is_empty() {
        let gf = torus(1);
        assert_eq!(extract_level(&gf, 1.0).unwrap().beta(), 0);
        assert!(leray_length(&gf, 1.0).is_err());
    }

    #[test]
    fn paraboloid_leray_is_pi() {
        let gf = paraboloid();
        for c in [0.2, 0.5, 0.9] {
            let l = leray_length(&gf, c).unwrap();
            assert!((l - PI).abs() < 1e-2, "c={c}: {l}");
        }
    }

    #[test]
    fn weight_functions() {
        assert_eq!(WeightFn::one().eval(-3.0), 1.0);
        assert_eq!(WeightFn::Abs.eval(-3.0), 3.0);
        assert_eq!(WeightFn::Square.eval(-3.0), 9.0);
        let t = WeightFn::table(vec![(1.0, 2.0), (0.0, 0.0)]).unwrap();
        assert_eq!(t.eval(0.5), 1.0);
        assert_eq!(t.eval(-1.0), 0.0);
        assert_eq!(t.eval(5.0), 2.0);
        assert_eq!(WeightFn::parse("abs").unwrap(), WeightFn::Abs);
        assert!(WeightFn::parse("cube").is_err());
        assert!(WeightFn::table(Vec::new()).is_err());
    }

    #[test]
    fn paraboloid_banach_is_one() {
        let b = banach_indicatrix(&paraboloid(), &WeightFn::one(), &SweepSpec::default()).unwrap();
        assert!((b - 1.0).abs() < 0.02, "{b}");
    }

    #[test]
    fn zero_weight_gives_zero() {
        let u = WeightFn::Constant { value: 0.0 };
        assert_eq!(banach_indicatrix(&torus(1), &u, &SweepSpec::default()).unwrap(), 0.0);
    }

    #[test]
    fn too_few_levels_rejected() {
        let spec = SweepSpec::default().with_levels(10);
        assert!(matches!(sweep(&torus(1), &spec), Err(Error::Config(_))));
    }

    #[test]
    fn sweep_csv_header() {
        let s = sweep(&torus(1), &SweepSpec::default().with_levels(64).with_r(vec![0.5, 1.0])).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("c,beta,L_sasaki(r=0.5),L_sasaki(r=1),leray,regular\n"));
        assert_eq!(text.lines().count(), 65);
    }
}
