//! Model geometries and closed-form fields on them.
//!
//! Every field is evaluated analytically: product sines and cosines on the
//! torus and rectangle, real orthonormal spherical harmonics on the sphere,
//! and a small set of builtin polynomials on the disc. Hessians are covariant
//! and expressed in the orthonormal frame `(e_u, e_v / |e_v|)` of the chart,
//! so `|H_f|` is a plain 2x2 eigenvalue problem on every model.

mod field;
mod legendre;
mod model;

pub use field::{
    BuiltinField, Derivatives, FieldExpr, Gradient, Hessian, ModeIndex, ModeSpec, Term, TorusBranch,
};
pub use model::{Axis, ChartPoint, SurfaceModel};
