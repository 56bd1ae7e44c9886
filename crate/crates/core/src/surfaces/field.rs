use std::f64::consts::{PI, SQRT_2};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::legendre::{pbar_pair, pbar_theta_jet};
use super::model::{ChartPoint, SurfaceModel};
use crate::{Error, Result};

/// Which of the four trigonometric products a torus mode uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TorusBranch {
    SinSin,
    SinCos,
    CosSin,
    CosCos,
}

impl TorusBranch {
    pub const ALL: [TorusBranch; 4] = [Self::SinSin, Self::SinCos, Self::CosSin, Self::CosCos];

    fn factors(self) -> (Trig, Trig) {
        match self {
            Self::SinSin => (Trig::Sin, Trig::Sin),
            Self::SinCos => (Trig::Sin, Trig::Cos),
            Self::CosSin => (Trig::Cos, Trig::Sin),
            Self::CosCos => (Trig::Cos, Trig::Cos),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::SinSin => "sin-sin",
            Self::SinCos => "sin-cos",
            Self::CosSin => "cos-sin",
            Self::CosCos => "cos-cos",
        }
    }
}

#[derive(Clone, Copy)]
enum Trig {
    Sin,
    Cos,
}

impl Trig {
    /// `(t(kx), d/dx, d2/dx2)`.
    fn jet(self, k: f64, x: f64) -> (f64, f64, f64) {
        let (s, c) = (k * x).sin_cos();
        match self {
            Trig::Sin => (s, k * c, -k * k * s),
            Trig::Cos => (c, -k * s, -k * k * c),
        }
    }
}

/// Mode indices, one variant per model carrying eigenmodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModeIndex {
    /// `t1(m x) t2(n y)` on the flat torus, `lambda = m^2 + n^2`.
    Torus { m: u32, n: u32, branch: TorusBranch },
    /// Real orthonormal spherical harmonic, `lambda = l(l+1)`. `m > 0`
    /// selects `cos(m phi)`, `m < 0` selects `sin(|m| phi)`.
    Sphere { l: u32, m: i32 },
    /// `sin(m pi x / a) sin(n pi y / b)` on the rectangle.
    Dirichlet { m: u32, n: u32 },
}

/// An eigenmode on a specific model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    model: SurfaceModel,
    index: ModeIndex,
}

impl ModeSpec {
    pub fn new(model: SurfaceModel, index: ModeIndex) -> Result<Self> {
        match (model, index) {
            (SurfaceModel::FlatTorus, ModeIndex::Torus { m, n, branch }) => {
                let (tx, ty) = branch.factors();
                if (m == 0 && matches!(tx, Trig::Sin)) || (n == 0 && matches!(ty, Trig::Sin)) {
                    return Err(Error::Config(format!(
                        "torus mode ({m},{n}) with branch {} vanishes identically",
                        branch.as_str()
                    )));
                }
            }
            (SurfaceModel::RoundSphere, ModeIndex::Sphere { l, m }) => {
                if m.unsigned_abs() > l {
                    return Err(Error::Config(format!("sphere mode needs |m| <= l, got l={l} m={m}")));
                }
            }
            (SurfaceModel::EuclideanRectangle { .. }, ModeIndex::Dirichlet { m, n }) => {
                if m == 0 || n == 0 {
                    return Err(Error::Config(format!("Dirichlet mode needs m, n >= 1, got ({m},{n})")));
                }
            }
            _ => {
                return Err(Error::Config(format!(
                    "mode {index:?} is not defined on the {} model",
                    model.name()
                )))
            }
        }
        Ok(Self { model, index })
    }

    pub fn torus(m: u32, n: u32, branch: TorusBranch) -> Result<Self> {
        Self::new(SurfaceModel::FlatTorus, ModeIndex::Torus { m, n, branch })
    }

    pub fn sphere(l: u32, m: i32) -> Result<Self> {
        Self::new(SurfaceModel::RoundSphere, ModeIndex::Sphere { l, m })
    }

    pub fn zonal(l: u32) -> Self {
        Self { model: SurfaceModel::RoundSphere, index: ModeIndex::Sphere { l, m: 0 } }
    }

    pub fn dirichlet(a: f64, b: f64, m: u32, n: u32) -> Result<Self> {
        Self::new(SurfaceModel::rectangle(a, b)?, ModeIndex::Dirichlet { m, n })
    }

    pub fn model(&self) -> SurfaceModel {
        self.model
    }

    pub fn index(&self) -> ModeIndex {
        self.index
    }

    pub fn eigenvalue(&self) -> f64 {
        match (self.index, self.model) {
            (ModeIndex::Torus { m, n, .. }, _) => f64::from(m * m + n * n),
            (ModeIndex::Sphere { l, .. }, _) => f64::from(l) * f64::from(l + 1),
            (ModeIndex::Dirichlet { m, n }, SurfaceModel::EuclideanRectangle { a, b }) => {
                PI * PI * (f64::from(m * m) / (a * a) + f64::from(n * n) / (b * b))
            }
            _ => unreachable!("validated at construction"),
        }
    }

    /// Number of sign changes ("half waves") along each chart axis.
    fn halfwaves(&self) -> (usize, usize) {
        match self.index {
            ModeIndex::Torus { m, n, .. } => (2 * m as usize, 2 * n as usize),
            ModeIndex::Sphere { l, m } => (l as usize, 2 * m.unsigned_abs() as usize),
            ModeIndex::Dirichlet { m, n } => (m as usize, n as usize),
        }
    }

    fn value(&self, p: ChartPoint) -> f64 {
        match (self.index, self.model) {
            (ModeIndex::Torus { m, n, branch }, _) => {
                let (tx, ty) = branch.factors();
                tx.jet(f64::from(m), p.u).0 * ty.jet(f64::from(n), p.v).0
            }
            (ModeIndex::Sphere { l, m }, _) => {
                let (s, c) = p.u.sin_cos();
                let (pl, _) = pbar_pair(l as usize, m.unsigned_abs() as usize, c, s);
                pl * azimuthal(m, p.v).0
            }
            (ModeIndex::Dirichlet { m, n }, SurfaceModel::EuclideanRectangle { a, b }) => {
                (f64::from(m) * PI * p.u / a).sin() * (f64::from(n) * PI * p.v / b).sin()
            }
            _ => unreachable!("validated at construction"),
        }
    }

    /// Chart partial derivatives. Sphere callers must stay off the poles.
    fn jet(&self, p: ChartPoint) -> Jet {
        let product = |(fx, dx, dxx): (f64, f64, f64), (gy, dy, dyy): (f64, f64, f64)| Jet {
            value: fx * gy,
            du: dx * gy,
            dv: fx * dy,
            duu: dxx * gy,
            duv: dx * dy,
            dvv: fx * dyy,
        };
        match (self.index, self.model) {
            (ModeIndex::Torus { m, n, branch }, _) => {
                let (tx, ty) = branch.factors();
                product(tx.jet(f64::from(m), p.u), ty.jet(f64::from(n), p.v))
            }
            (ModeIndex::Sphere { l, m }, _) => {
                product(pbar_theta_jet(l as usize, m.unsigned_abs() as usize, p.u), azimuthal(m, p.v))
            }
            (ModeIndex::Dirichlet { m, n }, SurfaceModel::EuclideanRectangle { a, b }) => product(
                Trig::Sin.jet(f64::from(m) * PI / a, p.u),
                Trig::Sin.jet(f64::from(n) * PI / b, p.v),
            ),
            _ => unreachable!("validated at construction"),
        }
    }
}

impl fmt::Display for ModeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            ModeIndex::Torus { m, n, branch } => write!(f, "torus({m},{n},{})", branch.as_str()),
            ModeIndex::Sphere { l, m } => write!(f, "sphere({l},{m})"),
            ModeIndex::Dirichlet { m, n } => write!(f, "rectangle({m},{n})"),
        }
    }
}

/// Azimuthal factor of a real spherical harmonic and its derivatives.
fn azimuthal(m: i32, phi: f64) -> (f64, f64, f64) {
    let k = f64::from(m.unsigned_abs());
    match m.signum() {
        0 => (1.0, 0.0, 0.0),
        1 => {
            let (s, c) = (k * phi).sin_cos();
            (SQRT_2 * c, -SQRT_2 * k * s, -SQRT_2 * k * k * c)
        }
        _ => {
            let (s, c) = (k * phi).sin_cos();
            (SQRT_2 * s, SQRT_2 * k * c, -SQRT_2 * k * k * s)
        }
    }
}

/// Chart partials up to second order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Jet {
    value: f64,
    du: f64,
    dv: f64,
    duu: f64,
    duv: f64,
    dvv: f64,
}

impl Jet {
    fn add_scaled(&mut self, k: f64, o: &Jet) {
        self.value += k * o.value;
        self.du += k * o.du;
        self.dv += k * o.dv;
        self.duu += k * o.duu;
        self.duv += k * o.duv;
        self.dvv += k * o.dvv;
    }
}

/// Riemannian gradient: chart components `(df/du, df/dv)`, components in the
/// orthonormal frame `(e_u, e_v / |e_v|)`, and the metric norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gradient {
    pub chart: [f64; 2],
    pub frame: [f64; 2],
    pub norm: f64,
}

/// Covariant Hessian in the orthonormal frame, with its operator norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hessian {
    pub frame: [[f64; 2]; 2],
    pub op_norm: f64,
}

impl Hessian {
    fn from_frame(a: f64, b: f64, d: f64) -> Self {
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        Self { frame: [[a, b], [b, d]], op_norm: mean.abs() + radius }
    }

    pub fn trace(&self) -> f64 {
        self.frame[0][0] + self.frame[1][1]
    }

    /// `tr(H^2)`, the squared Frobenius norm.
    pub fn trace_sq(&self) -> f64 {
        let [[a, b], [_, d]] = self.frame;
        a * a + 2.0 * b * b + d * d
    }

    /// `(H w, w)` for a frame vector `w`.
    pub fn quadratic(&self, w: [f64; 2]) -> f64 {
        let [[a, b], [_, d]] = self.frame;
        a * w[0] * w[0] + 2.0 * b * w[0] * w[1] + d * w[1] * w[1]
    }
}

/// Value, gradient and Hessian at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub value: f64,
    pub grad: Gradient,
    pub hess: Hessian,
}

/// Analytic test fields that are not eigenmodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinField {
    /// `1 - rho^2` on the unit disc.
    DiscParaboloid,
}

impl BuiltinField {
    pub fn model(self) -> SurfaceModel {
        match self {
            Self::DiscParaboloid => SurfaceModel::UnitDisc,
        }
    }
}

/// One `coefficient * mode` term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coefficient: f64,
    pub mode: ModeSpec,
}

#[derive(Debug, Clone, PartialEq)]
enum Source {
    Modes(Vec<Term>),
    Builtin { field: BuiltinField, scale: f64 },
}

/// A function on a model surface: a finite combination of eigenmodes or a
/// scaled builtin field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldExpr {
    model: SurfaceModel,
    source: Source,
    normalize: bool,
}

impl FieldExpr {
    pub fn zero(model: SurfaceModel) -> Self {
        Self { model, source: Source::Modes(Vec::new()), normalize: false }
    }

    pub fn mode(mode: ModeSpec) -> Self {
        Self {
            model: mode.model,
            source: Source::Modes(vec![Term { coefficient: 1.0, mode }]),
            normalize: false,
        }
    }

    /// A linear combination; every mode must live on the same model.
    pub fn combination(terms: Vec<Term>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::Config("combination needs at least one term (use FieldExpr::zero)".into()));
        };
        let model = first.mode.model;
        if let Some(t) = terms.iter().find(|t| t.mode.model != model) {
            return Err(Error::Config(format!(
                "mixed models in one field: {} and {}",
                model.name(),
                t.mode.model.name()
            )));
        }
        if terms.iter().any(|t| !t.coefficient.is_finite()) {
            return Err(Error::Config("non-finite coefficient".into()));
        }
        Ok(Self { model, source: Source::Modes(terms), normalize: false })
    }

    pub fn builtin(field: BuiltinField) -> Self {
        Self { model: field.model(), source: Source::Builtin { field, scale: 1.0 }, normalize: false }
    }

    pub fn disc_paraboloid() -> Self {
        Self::builtin(BuiltinField::DiscParaboloid)
    }

    /// Requests unit L2 norm; applied by the sampler.
    pub fn normalized(mut self) -> Self {
        self.normalize = true;
        self
    }

    pub fn with_normalize(mut self, normalize: bool) -> Self {
        self.normalize = normalize;
        self
    }

    /// Multiplies the field by `k`.
    pub fn scaled(mut self, k: f64) -> Self {
        match &mut self.source {
            Source::Modes(terms) => terms.iter_mut().for_each(|t| t.coefficient *= k),
            Source::Builtin { scale, .. } => *scale *= k,
        }
        self
    }

    pub fn model(&self) -> SurfaceModel {
        self.model
    }

    pub fn normalize_requested(&self) -> bool {
        self.normalize
    }

    pub fn terms(&self) -> &[Term] {
        match &self.source {
            Source::Modes(t) => t,
            Source::Builtin { .. } => &[],
        }
    }

    pub fn builtin_field(&self) -> Option<BuiltinField> {
        match self.source {
            Source::Builtin { field, .. } => Some(field),
            Source::Modes(_) => None,
        }
    }

    /// True for the constant-zero expression.
    pub fn is_zero(&self) -> bool {
        match &self.source {
            Source::Modes(t) => t.iter().all(|t| t.coefficient == 0.0),
            Source::Builtin { scale, .. } => *scale == 0.0,
        }
    }

    /// The common eigenvalue when every (nonzero) term shares one; `None`
    /// for builtins, the zero field, or mixed eigenvalues.
    pub fn eigenvalue(&self) -> Option<f64> {
        let mut lam: Option<f64> = None;
        for t in self.terms().iter().filter(|t| t.coefficient != 0.0) {
            let l = t.mode.eigenvalue();
            match lam {
                None => lam = Some(l),
                Some(prev) if (prev - l).abs() > 1e-9 * prev.max(1.0) => return None,
                _ => {}
            }
        }
        lam
    }

    /// Largest number of sign changes along each chart axis over all terms.
    pub fn halfwaves(&self) -> (usize, usize) {
        match self.source {
            Source::Builtin { .. } => (8, 8),
            Source::Modes(ref terms) => terms
                .iter()
                .map(|t| t.mode.halfwaves())
                .fold((0, 0), |acc, h| (acc.0.max(h.0), acc.1.max(h.1))),
        }
    }

    /// Value at `p`.
    pub fn eval(&self, p: ChartPoint) -> Result<f64> {
        let p = self.model.validate(p)?;
        Ok(match &self.source {
            Source::Modes(terms) => terms.iter().map(|t| t.coefficient * t.mode.value(p)).sum(),
            Source::Builtin { field: BuiltinField::DiscParaboloid, scale } => scale * (1.0 - p.u * p.u),
        })
    }

    pub fn eval_gradient(&self, p: ChartPoint) -> Result<Gradient> {
        Ok(self.derivatives(p)?.grad)
    }

    pub fn eval_hessian(&self, p: ChartPoint) -> Result<Hessian> {
        Ok(self.derivatives(p)?.hess)
    }

    /// Laplace-Beltrami operator at `p`.
    pub fn laplacian(&self, p: ChartPoint) -> Result<f64> {
        let p = self.model.validate(p)?;
        Ok(match &self.source {
            Source::Modes(terms) => terms
                .iter()
                .map(|t| -t.coefficient * t.mode.eigenvalue() * t.mode.value(p))
                .sum(),
            Source::Builtin { field: BuiltinField::DiscParaboloid, scale } => -4.0 * scale,
        })
    }

    /// Value, gradient and covariant Hessian at `p`.
    pub fn derivatives(&self, p: ChartPoint) -> Result<Derivatives> {
        let p = self.model.validate(p)?;
        match &self.source {
            Source::Builtin { field: BuiltinField::DiscParaboloid, scale } => {
                // f = 1 - x^2 - y^2: radial gradient, Hessian -2 I in any frame.
                let k = *scale;
                let g = -2.0 * k * p.u;
                Ok(Derivatives {
                    value: k * (1.0 - p.u * p.u),
                    grad: Gradient { chart: [g, 0.0], frame: [g, 0.0], norm: g.abs() },
                    hess: Hessian::from_frame(-2.0 * k, 0.0, -2.0 * k),
                })
            }
            Source::Modes(terms) => {
                if self.model == SurfaceModel::RoundSphere && p.u.sin() < 1e-12 {
                    return Err(Error::CoordinateSingularity { model: self.model.name(), u: p.u, v: p.v });
                }
                let mut jet = Jet::default();
                for t in terms {
                    jet.add_scaled(t.coefficient, &t.mode.jet(p));
                }
                Ok(self.frame_derivatives(p, &jet))
            }
        }
    }

    fn frame_derivatives(&self, p: ChartPoint, j: &Jet) -> Derivatives {
        let (grad_frame, hess) = match self.model {
            SurfaceModel::RoundSphere => {
                // Christoffel symbols of d theta^2 + sin^2 theta d phi^2.
                let (s, c) = p.u.sin_cos();
                let cot = c / s;
                (
                    [j.du, j.dv / s],
                    Hessian::from_frame(j.duu, (j.duv - cot * j.dv) / s, j.dvv / (s * s) + cot * j.du),
                )
            }
            SurfaceModel::UnitDisc => {
                let rho = p.u;
                (
                    [j.du, j.dv / rho],
                    Hessian::from_frame(j.duu, (j.duv - j.dv / rho) / rho, j.dvv / (rho * rho) + j.du / rho),
                )
            }
            _ => ([j.du, j.dv], Hessian::from_frame(j.duu, j.duv, j.dvv)),
        };
        Derivatives {
            value: j.value,
            grad: Gradient {
                chart: [j.du, j.dv],
                frame: grad_frame,
                norm: grad_frame[0].hypot(grad_frame[1]),
            },
            hess,
        }
    }
}

impl fmt::Display for FieldExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            Source::Builtin { field: BuiltinField::DiscParaboloid, scale } => {
                if *scale == 1.0 {
                    write!(f, "disc-paraboloid")
                } else {
                    write!(f, "{scale}*disc-paraboloid")
                }
            }
            Source::Modes(terms) if terms.is_empty() => write!(f, "{}(zero)", self.model.name()),
            Source::Modes(terms) => {
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    if t.coefficient == 1.0 {
                        write!(f, "{}", t.mode)?;
                    } else {
                        write!(f, "{}*{}", t.coefficient, t.mode)?;
                    }
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn torus_sin_sin_peak() {
        let f = FieldExpr::mode(ModeSpec::torus(1, 1, TorusBranch::SinSin).unwrap());
        let p = ChartPoint::new(FRAC_PI_2, FRAC_PI_2);
        assert!((f.eval(p).unwrap() - 1.0).abs() < 1e-15);
        let g = f.eval_gradient(p).unwrap();
        assert!(g.norm < 1e-15);
    }

    #[test]
    fn paraboloid_values() {
        let f = FieldExpr::disc_paraboloid();
        assert_eq!(f.eval(ChartPoint::new(0.0, 0.0)).unwrap(), 1.0);
        let g = f.eval_gradient(ChartPoint::new(0.3, 1.0)).unwrap();
        assert!((g.norm - 0.6).abs() < 1e-15);
        let h = f.eval_hessian(ChartPoint::new(0.0, 0.0)).unwrap();
        assert_eq!(h.frame, [[-2.0, 0.0], [0.0, -2.0]]);
        assert_eq!(h.op_norm, 2.0);
        assert_eq!(f.laplacian(ChartPoint::new(0.7, 2.0)).unwrap(), -4.0);
    }

    #[test]
    fn torus_diagonal_hessian() {
        for n in 1..=5u32 {
            let f = FieldExpr::mode(ModeSpec::torus(n, n, TorusBranch::SinSin).unwrap());
            // center of the first positive cell
            let c = FRAC_PI_2 / f64::from(n);
            let h = f.eval_hessian(ChartPoint::new(c, c)).unwrap();
            let nn = f64::from(n * n);
            assert!((h.frame[0][0] + nn).abs() < 1e-12);
            assert!((h.frame[1][1] + nn).abs() < 1e-12);
            assert!(h.frame[0][1].abs() < 1e-12);
            assert!((h.op_norm - nn).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_modes_rejected() {
        assert!(ModeSpec::torus(0, 1, TorusBranch::SinSin).is_err());
        assert!(ModeSpec::torus(0, 1, TorusBranch::CosSin).is_ok());
        assert!(ModeSpec::sphere(2, 3).is_err());
        assert!(ModeSpec::dirichlet(1.0, 1.0, 0, 1).is_err());
        assert!(ModeSpec::new(SurfaceModel::UnitDisc, ModeIndex::Dirichlet { m: 1, n: 1 }).is_err());
        let a = ModeSpec::torus(1, 1, TorusBranch::SinSin).unwrap();
        let b = ModeSpec::zonal(2);
        let mixed = FieldExpr::combination(vec![
            Term { coefficient: 1.0, mode: a },
            Term { coefficient: 1.0, mode: b },
        ]);
        assert!(mixed.is_err());
    }

    #[test]
    fn eigenvalues() {
        assert_eq!(ModeSpec::torus(3, 3, TorusBranch::SinSin).unwrap().eigenvalue(), 18.0);
        assert_eq!(ModeSpec::zonal(10).eigenvalue(), 110.0);
        let r = ModeSpec::dirichlet(PI, PI, 2, 3).unwrap();
        assert!((r.eigenvalue() - 13.0).abs() < 1e-12);
    }

    #[test]
    fn sphere_pole_derivatives_are_singular() {
        let f = FieldExpr::mode(ModeSpec::zonal(3));
        assert!(matches!(
            f.eval_hessian(ChartPoint::new(0.0, 0.0)),
            Err(Error::CoordinateSingularity { .. })
        ));
        assert!(f.eval(ChartPoint::new(0.0, 0.0)).is_ok());
    }

    #[test]
    fn zero_combination_laplacian() {
        let f = FieldExpr::zero(SurfaceModel::FlatTorus);
        assert_eq!(f.laplacian(ChartPoint::new(1.0, 2.0)).unwrap(), 0.0);
        assert!(f.is_zero());
        assert_eq!(f.eigenvalue(), None);
    }

    #[test]
    fn display_labels() {
        let f = FieldExpr::mode(ModeSpec::torus(2, 1, TorusBranch::CosSin).unwrap());
        assert_eq!(f.to_string(), "torus(2,1,cos-sin)");
        assert_eq!(FieldExpr::disc_paraboloid().to_string(), "disc-paraboloid");
    }
}
