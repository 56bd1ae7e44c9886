#![allow(dead_code)]

use std::f64::consts::PI;

use nodal_core::{ChartPoint, FieldExpr, GridField, ModeSpec, SurfaceModel, Term, TorusBranch};

pub fn torus_nn(n: u32) -> FieldExpr {
    FieldExpr::mode(ModeSpec::torus(n, n, TorusBranch::SinSin).unwrap()).normalized()
}

pub fn zonal(l: u32) -> FieldExpr {
    FieldExpr::mode(ModeSpec::zonal(l)).normalized()
}

pub fn square_mode(m: u32, n: u32) -> FieldExpr {
    FieldExpr::mode(ModeSpec::dirichlet(PI, PI, m, n).unwrap()).normalized()
}

pub fn combo(modes: &[(f64, ModeSpec)]) -> FieldExpr {
    let terms = modes.iter().map(|&(coefficient, mode)| Term { coefficient, mode }).collect();
    FieldExpr::combination(terms).unwrap().normalized()
}

pub fn sample(f: &FieldExpr) -> GridField {
    GridField::sample(f, None).unwrap()
}

/// Frame gradient and covariant frame Hessian from central differences of
/// `f` in chart coordinates, converted with the Christoffel symbols of each
/// chart: `(theta, phi)` with `|e_phi| = sin theta` on the sphere and
/// `(rho, phi)` with `|e_phi| = rho` on the disc.
pub fn fd_frame(f: &FieldExpr, p: ChartPoint, h: f64) -> ([f64; 2], [[f64; 2]; 2]) {
    let ev = |du: f64, dv: f64| f.eval(ChartPoint::new(p.u + du, p.v + dv)).unwrap();
    let f0 = ev(0.0, 0.0);
    let fu = (ev(h, 0.0) - ev(-h, 0.0)) / (2.0 * h);
    let fv = (ev(0.0, h) - ev(0.0, -h)) / (2.0 * h);
    let fuu = (ev(h, 0.0) - 2.0 * f0 + ev(-h, 0.0)) / (h * h);
    let fvv = (ev(0.0, h) - 2.0 * f0 + ev(0.0, -h)) / (h * h);
    let fuv = (ev(h, h) - ev(h, -h) - ev(-h, h) + ev(-h, -h)) / (4.0 * h * h);
    match f.model() {
        SurfaceModel::FlatTorus | SurfaceModel::EuclideanRectangle { .. } => ([fu, fv], [[fuu, fuv], [fuv, fvv]]),
        SurfaceModel::RoundSphere => {
            let (s, c) = p.u.sin_cos();
            let h12 = (fuv - c / s * fv) / s;
            let h22 = (fvv + s * c * fu) / (s * s);
            ([fu, fv / s], [[fuu, h12], [h12, h22]])
        }
        SurfaceModel::UnitDisc => {
            let r = p.u;
            let h12 = (fuv - fv / r) / r;
            let h22 = (fvv + r * fu) / (r * r);
            ([fu, fv / r], [[fuu, h12], [h12, h22]])
        }
    }
}

/// Largest of the gradient and Hessian discrepancies between the analytic
/// derivatives and [`fd_frame`], each relative to the larger of the
/// analytic magnitude and the field's natural scale at that order
/// (`lambda^(k/2) max|f|`).
pub fn fd_relative_error(f: &FieldExpr, p: ChartPoint, h: f64, max_f: f64, lambda: f64) -> f64 {
    let d = f.derivatives(p).unwrap();
    let (g, hs) = fd_frame(f, p, h);
    let g_err = (d.grad.frame[0] - g[0]).abs().max((d.grad.frame[1] - g[1]).abs());
    let g_scale = d.grad.norm.max(lambda.sqrt() * max_f);
    let h_err = d
        .hess
        .frame
        .iter()
        .flatten()
        .zip(hs.iter().flatten())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let h_scale = d.hess.op_norm.max(lambda * max_f);
    (g_err / g_scale).max(h_err / h_scale)
}
