//! Nodal domains, nodal extrema, generalized Banach indicatrices and Sasaki
//! lift lengths for explicit eigenfunctions on four model surfaces: the flat
//! torus, the round sphere, a Euclidean rectangle with Dirichlet modes, and
//! the unit disc.
//!
//! The pipeline is
//!
//! ```text
//! FieldExpr --sample--> GridField --extract_domains--> NodalDomainSet
//!                           |
//!                           +--sweep--> LevelSweep (beta, Sasaki L(c), Leray l(c))
//! ```
//!
//! and [`verify`] turns the resulting quantities into ratio reports and
//! log-log scaling fits across eigenmode families.

mod error;
pub mod grid;
pub mod levelsets;
pub mod nodal;
pub mod quadrature;
pub mod sasaki;
pub mod surfaces;
pub mod textfmt;
pub mod verify;

pub use error::{Error, Result};
pub use grid::{GridField, NodeRecord, PolarNode, Resolution};
pub use levelsets::{
    banach_indicatrix, extract_level, grad_floor, leray_form_check, leray_length, sweep, Contour,
    LerayForm, LevelRecord, LevelSet, LevelSweep, SegmentSample, SweepSpec, WeightFn,
};
pub use nodal::{count_above, extract_domains, extrema_moments, inradius, NodalDomain, NodalDomainSet};
pub use sasaki::{co_area_bound, gr_bound, level_l, lift_length, systole, turning, GrBound};
pub use surfaces::{
    BuiltinField, ChartPoint, Derivatives, FieldExpr, Gradient, Hessian, ModeIndex, ModeSpec,
    SurfaceModel, Term, TorusBranch,
};
pub use verify::{scaling_study, Family, InequalityReport, Quantity, ScalingFit, Verdict};
