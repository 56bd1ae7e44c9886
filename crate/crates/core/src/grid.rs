//! Structured sampling of a field on its model chart.
//!
//! Nodes are cell representatives for midpoint quadrature with exact cell
//! areas as weights:
//!
//! | model     | u axis                          | v axis              |
//! |-----------|---------------------------------|---------------------|
//! | torus     | `i 2pi/nu`, periodic            | `j 2pi/nv`, periodic|
//! | rectangle | cell centers                    | cell centers        |
//! | sphere    | Gauss-Legendre latitudes        | `j 2pi/nv`, periodic|
//! | disc      | cell centers in `rho`           | `j 2pi/nv`, periodic|
//!
//! The sphere carries two extra polar nodes and the disc one center node.
//! They have zero weight and exist for adjacency: a polar node touches every
//! node of the adjacent row.

use std::f64::consts::TAU;
use std::io::{self, Write};

use rayon::prelude::*;

use crate::quadrature::{gauss_legendre, pairwise_sum};
use crate::surfaces::{ChartPoint, FieldExpr, Gradient, Hessian, SurfaceModel};
use crate::textfmt::sig12;
use crate::{Error, Result};

/// Smallest accepted node count per axis.
pub const MIN_RESOLUTION: usize = 16;

/// Node counts along the two chart axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolution {
    pub nu: usize,
    pub nv: usize,
}

impl Resolution {
    pub const fn new(nu: usize, nv: usize) -> Self {
        Self { nu, nv }
    }

    pub const fn square(n: usize) -> Self {
        Self { nu: n, nv: n }
    }

    /// `max(64, 16 k)` per axis, with `k` the number of sign changes of the
    /// field along that axis.
    pub fn default_for(expr: &FieldExpr) -> Self {
        let (hu, hv) = expr.halfwaves();
        Self { nu: (16 * hu).max(64), nv: (16 * hv).max(64) }
    }
}

/// One sampled node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeRecord {
    pub point: ChartPoint,
    pub f: f64,
    pub grad: Gradient,
    pub hess: Hessian,
    pub laplacian: f64,
    /// Riemannian area of the node's cell.
    pub weight: f64,
}

/// Which end of the `u` axis a polar node closes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleEnd {
    Low,
    High,
}

/// A collapsed chart edge (sphere pole, disc center).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarNode {
    pub point: ChartPoint,
    pub f: f64,
    pub end: PoleEnd,
}

/// A field sampled on a structured grid.
#[derive(Debug, Clone)]
pub struct GridField {
    expr: FieldExpr,
    normalization: f64,
    resolution: Resolution,
    u_coords: Vec<f64>,
    v_coords: Vec<f64>,
    nodes: Vec<NodeRecord>,
    polar: Vec<PolarNode>,
    lambda_hint: Option<f64>,
}

fn axis_layout(model: SurfaceModel, res: Resolution) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let periodic = |n: usize| (0..n).map(|j| TAU * j as f64 / n as f64).collect::<Vec<_>>();
    let centers = |n: usize, len: f64| (0..n).map(|i| (i as f64 + 0.5) * len / n as f64).collect::<Vec<_>>();
    let (nu, nv) = (res.nu, res.nv);
    match model {
        SurfaceModel::FlatTorus => {
            let h = TAU / nu as f64;
            (periodic(nu), periodic(nv), vec![h; nu])
        }
        SurfaceModel::EuclideanRectangle { a, b } => (centers(nu, a), centers(nv, b), vec![a / nu as f64; nu]),
        SurfaceModel::UnitDisc => {
            // rho_i * d rho is the exact ring area factor for midpoint rho_i.
            let u = centers(nu, 1.0);
            let w = u.iter().map(|r| r / nu as f64).collect();
            (u, periodic(nv), w)
        }
        SurfaceModel::RoundSphere => {
            let (x, w) = gauss_legendre(nu);
            (x.iter().map(|x| x.acos()).collect(), periodic(nv), w)
        }
    }
}

impl GridField {
    /// Samples `expr` at `resolution` (or the default policy), applying the
    /// quadrature normalization when the expression requests it.
    pub fn sample(expr: &FieldExpr, resolution: Option<Resolution>) -> Result<Self> {
        let res = resolution.unwrap_or_else(|| Resolution::default_for(expr));
        if res.nu < MIN_RESOLUTION || res.nv < MIN_RESOLUTION {
            return Err(Error::Config(format!(
                "resolution {}x{} is below the minimum of {MIN_RESOLUTION} per axis",
                res.nu, res.nv
            )));
        }
        let model = expr.model();
        let (u_coords, v_coords, u_weight) = axis_layout(model, res);
        let dv = TAU / res.nv as f64;
        let v_weight = match model {
            SurfaceModel::EuclideanRectangle { b, .. } => b / res.nv as f64,
            _ => dv,
        };

        let eval_row = |i: usize, expr: &FieldExpr| -> Result<Vec<NodeRecord>> {
            v_coords
                .iter()
                .map(|&v| {
                    let point = ChartPoint::new(u_coords[i], v);
                    let d = expr.derivatives(point)?;
                    Ok(NodeRecord {
                        point,
                        f: d.value,
                        grad: d.grad,
                        hess: d.hess,
                        laplacian: expr.laplacian(point)?,
                        weight: u_weight[i] * v_weight,
                    })
                })
                .collect()
        };
        let rows: Vec<Vec<NodeRecord>> =
            (0..res.nu).into_par_iter().map(|i| eval_row(i, expr)).collect::<Result<_>>()?;
        let nodes: Vec<NodeRecord> = rows.into_iter().flatten().collect();

        let polar_points: Vec<(ChartPoint, PoleEnd)> = match model {
            SurfaceModel::RoundSphere => vec![
                (ChartPoint::new(0.0, 0.0), PoleEnd::Low),
                (ChartPoint::new(std::f64::consts::PI, 0.0), PoleEnd::High),
            ],
            SurfaceModel::UnitDisc => vec![(ChartPoint::new(0.0, 0.0), PoleEnd::Low)],
            _ => Vec::new(),
        };
        let polar = polar_points
            .into_iter()
            .map(|(point, end)| Ok(PolarNode { point, f: expr.eval(point)?, end }))
            .collect::<Result<Vec<_>>>()?;

        let mut gf = Self {
            expr: expr.clone().with_normalize(false),
            normalization: 1.0,
            resolution: res,
            u_coords,
            v_coords,
            nodes,
            polar,
            lambda_hint: expr.eigenvalue(),
        };
        if expr.normalize_requested() {
            let norm = gf.l2_norm();
            if norm > 0.0 {
                gf.rescale(1.0 / norm);
            }
        }
        Ok(gf)
    }

    fn rescale(&mut self, k: f64) {
        debug_assert!(k > 0.0);
        for n in &mut self.nodes {
            n.f *= k;
            n.laplacian *= k;
            n.grad.chart = n.grad.chart.map(|x| x * k);
            n.grad.frame = n.grad.frame.map(|x| x * k);
            n.grad.norm *= k;
            n.hess.frame = n.hess.frame.map(|r| r.map(|x| x * k));
            n.hess.op_norm *= k;
        }
        for p in &mut self.polar {
            p.f *= k;
        }
        self.expr = self.expr.clone().scaled(k);
        self.normalization *= k;
    }

    /// The sampled field, including any normalization factor.
    pub fn expr(&self) -> &FieldExpr {
        &self.expr
    }

    pub fn model(&self) -> SurfaceModel {
        self.expr.model()
    }

    /// Factor applied to the source expression by normalization (1 if none).
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn lambda_hint(&self) -> Option<f64> {
        self.lambda_hint
    }

    pub fn u_coords(&self) -> &[f64] {
        &self.u_coords
    }

    pub fn v_coords(&self) -> &[f64] {
        &self.v_coords
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn polar(&self) -> &[PolarNode] {
        &self.polar
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.resolution.nv + j
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> &NodeRecord {
        &self.nodes[self.index(i, j)]
    }

    pub fn u_periodic(&self) -> bool {
        self.model().axes().0.periodic
    }

    pub fn v_periodic(&self) -> bool {
        self.model().axes().1.periodic
    }

    /// Polar node closing the given end of the `u` axis, if any.
    pub fn pole(&self, end: PoleEnd) -> Option<(usize, &PolarNode)> {
        self.polar.iter().enumerate().find(|(_, p)| p.end == end)
    }

    /// Quadrature of `g` over the surface, summed pairwise in node order.
    pub fn integrate(&self, g: impl Fn(&NodeRecord) -> f64 + Sync) -> f64 {
        let terms: Vec<f64> = self.nodes.par_iter().map(|n| n.weight * g(n)).collect();
        pairwise_sum(&terms)
    }

    pub fn total_weight(&self) -> f64 {
        self.integrate(|_| 1.0)
    }

    pub fn l2_norm(&self) -> f64 {
        self.integrate(|n| n.f * n.f).sqrt()
    }

    /// `(sum w |f|^p)^(1/p)` for `p >= 1`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        assert!(p >= 1.0, "L^p norm needs p >= 1, got {p}");
        self.integrate(|n| n.f.abs().powf(p)).powf(1.0 / p)
    }

    pub fn laplacian_l2(&self) -> f64 {
        self.integrate(|n| n.laplacian * n.laplacian).sqrt()
    }

    pub fn gradient_l2(&self) -> f64 {
        self.integrate(|n| n.grad.norm * n.grad.norm).sqrt()
    }

    pub fn mean(&self) -> f64 {
        self.integrate(|n| n.f) / self.total_weight()
    }

    /// `max |f|` over all nodes, polar nodes included.
    pub fn max_abs(&self) -> f64 {
        self.values().fold(0.0, |m, f| m.max(f.abs()))
    }

    /// `(min f, max f)` over all nodes.
    pub fn value_range(&self) -> (f64, f64) {
        self.values().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| (lo.min(f), hi.max(f)))
    }

    fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().map(|n| n.f).chain(self.polar.iter().map(|p| p.f))
    }

    /// Writes `x,y,f,grad_norm,hess_norm,weight`, one row per regular node
    /// in row-major order. `x,y` are chart coordinates.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "x,y,f,grad_norm,hess_norm,weight")?;
        for n in &self.nodes {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                sig12(n.point.u),
                sig12(n.point.v),
                sig12(n.f),
                sig12(n.grad.norm),
                sig12(n.hess.op_norm),
                sig12(n.weight)
            )?;
        }
        Ok(())
    }
}

/// [`GridField::sample`] as a free function.
pub fn sample(expr: &FieldExpr, resolution: Option<Resolution>) -> Result<GridField> {
    GridField::sample(expr, resolution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::{ModeSpec, TorusBranch};
    use std::f64::consts::PI;

    fn torus11() -> FieldExpr {
        FieldExpr::mode(ModeSpec::torus(1, 1, TorusBranch::SinSin).unwrap())
    }

    #[test]
    fn weights_sum_to_area() {
        for (expr, res) in [
            (torus11(), 32),
            (FieldExpr::mode(ModeSpec::zonal(3)), 40),
            (FieldExpr::disc_paraboloid(), 128),
            (FieldExpr::mode(ModeSpec::dirichlet(2.0, 3.0, 1, 1).unwrap()), 20),
        ] {
            let gf = GridField::sample(&expr, Some(Resolution::square(res))).unwrap();
            let area = gf.model().total_area();
            assert!((gf.total_weight() - area).abs() < 1e-6 * area, "{}", gf.model().name());
        }
    }

    #[test]
    fn small_resolution_rejected() {
        assert!(matches!(
            GridField::sample(&torus11(), Some(Resolution::new(8, 64))),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn normalized_torus_peak() {
        let gf = GridField::sample(&torus11().normalized(), Some(Resolution::square(64))).unwrap();
        let n = gf.node(16, 16);
        assert!((n.point.u - PI / 2.0).abs() < 1e-12);
        assert!((n.f - 1.0 / PI).abs() < 1e-3);
        assert!((gf.l2_norm() - 1.0).abs() < 1e-12);
        assert!((gf.normalization() - 1.0 / PI).abs() < 1e-10);
    }

    #[test]
    fn zero_field_samples_to_zero() {
        let gf = GridField::sample(&FieldExpr::zero(SurfaceModel::FlatTorus).normalized(), None).unwrap();
        assert!(gf.nodes().iter().all(|n| n.f == 0.0));
        assert_eq!(gf.l2_norm(), 0.0);
        assert_eq!(gf.gradient_l2(), 0.0);
    }

    #[test]
    fn default_resolution_policy() {
        let f = FieldExpr::mode(ModeSpec::torus(6, 6, TorusBranch::SinSin).unwrap());
        assert_eq!(Resolution::default_for(&f), Resolution::square(192));
        assert_eq!(Resolution::default_for(&FieldExpr::mode(ModeSpec::zonal(40))), Resolution::new(640, 64));
        assert_eq!(Resolution::default_for(&torus11()), Resolution::square(64));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let gf = GridField::sample(&torus11(), Some(Resolution::square(16))).unwrap();
        let mut buf = Vec::new();
        gf.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,y,f,grad_norm,hess_norm,weight"));
        assert_eq!(lines.count(), 256);
    }

    #[test]
    fn polar_nodes_hold_pole_values() {
        let gf = GridField::sample(&FieldExpr::mode(ModeSpec::zonal(4)), None).unwrap();
        let (_, north) = gf.pole(PoleEnd::Low).unwrap();
        assert!((north.f - (9.0 / (4.0 * PI)).sqrt()).abs() < 1e-12);
        let disc = GridField::sample(&FieldExpr::disc_paraboloid(), None).unwrap();
        assert_eq!(disc.polar().len(), 1);
        assert_eq!(disc.max_abs(), 1.0);
    }
}
