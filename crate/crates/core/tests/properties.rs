mod common;

use std::f64::consts::{PI, TAU};

use nodal_core::verify::fit_exponent;
use nodal_core::{
    extract_domains, extract_level, ChartPoint, FieldExpr, GridField, ModeSpec, Resolution, SurfaceModel, Term,
    TorusBranch,
};
use proptest::prelude::*;

fn branch() -> impl Strategy<Value = TorusBranch> {
    prop::sample::select(TorusBranch::ALL.to_vec())
}

fn torus_mode() -> impl Strategy<Value = ModeSpec> {
    (0u32..5, 0u32..5, branch()).prop_filter_map("vanishing or constant mode", |(m, n, b)| {
        if m == 0 && n == 0 {
            None
        } else {
            ModeSpec::torus(m, n, b).ok()
        }
    })
}

fn torus_field() -> impl Strategy<Value = FieldExpr> {
    prop::collection::vec((-1.0f64..1.0, torus_mode()), 1..4).prop_filter_map("zero field", |terms| {
        let terms: Vec<Term> = terms.into_iter().map(|(coefficient, mode)| Term { coefficient, mode }).collect();
        let f = FieldExpr::combination(terms).ok()?;
        (!f.is_zero()).then(|| f.normalized())
    })
}

fn sphere_mode() -> impl Strategy<Value = ModeSpec> {
    (0u32..12).prop_flat_map(|l| (Just(l), -(l as i32)..=l as i32)).prop_map(|(l, m)| ModeSpec::sphere(l, m).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn torus_fields_are_doubly_periodic(f in torus_field(), u in 0.0..TAU, v in 0.0..TAU) {
        let a = f.eval(ChartPoint::new(u, v)).unwrap();
        let b = f.eval(ChartPoint::new(u + TAU, v - TAU)).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn sphere_modes_are_eigenfunctions(mode in sphere_mode(), u in 0.05..PI - 0.05, v in 0.0..TAU) {
        let f = FieldExpr::mode(mode);
        let p = ChartPoint::new(u, v);
        let lambda = mode.eigenvalue();
        let residual = f.laplacian(p).unwrap() + lambda * f.eval(p).unwrap();
        prop_assert!(residual.abs() < 1e-8 * (1.0 + lambda), "{mode:?}: {residual}");
    }

    #[test]
    fn sphere_derivatives_match_finite_differences(mode in sphere_mode(), u in 0.2..PI - 0.2, v in 0.0..TAU) {
        let f = FieldExpr::mode(mode);
        let lambda = mode.eigenvalue().max(1.0);
        let scale = ((2 * 11 + 1) as f64 / (4.0 * PI)).sqrt();
        let err = common::fd_relative_error(&f, ChartPoint::new(u, v), 1e-4, scale, lambda);
        prop_assert!(err < 1e-5, "{mode:?}: {err}");
    }

    #[test]
    fn contour_vertices_sit_on_the_level(f in torus_field(), t in 0.05f64..0.95) {
        let gf = GridField::sample(&f, Some(Resolution { nu: 64, nv: 64 })).unwrap();
        let (lo, hi) = gf.value_range();
        let c = lo + t * (hi - lo);
        let scale = gf.max_abs();
        for contour in extract_level(&gf, c).unwrap().contours {
            prop_assert!(contour.closed, "torus levels have no ends");
            prop_assert_eq!(contour.points.first(), contour.points.last());
            for p in &contour.points {
                prop_assert!((gf.expr().eval(*p).unwrap() - c).abs() < 1e-9 * scale);
            }
        }
    }

    #[test]
    fn domains_partition_the_nonzero_cells(f in torus_field()) {
        let gf = GridField::sample(&f, Some(Resolution { nu: 48, nv: 48 })).unwrap();
        let nds = extract_domains(&gf, None).unwrap();
        prop_assert!(!nds.is_empty());
        prop_assert!(nds.total_area() <= SurfaceModel::FlatTorus.total_area() * (1.0 + 1e-12));
        let mut seen = vec![false; gf.nodes().len()];
        for d in &nds.domains {
            prop_assert!(d.m_a > 0.0 && d.m_a <= gf.max_abs());
            for &cell in &d.cells {
                prop_assert!(!seen[cell], "cell {} in two domains", cell);
                seen[cell] = true;
                prop_assert_eq!(gf.nodes()[cell].f.signum() as i8, d.sign);
            }
        }
    }

    #[test]
    fn domain_count_ignores_scaling(f in torus_field(), k in 0.01f64..100.0) {
        let res = Some(Resolution { nu: 48, nv: 48 });
        let a = extract_domains(&GridField::sample(&f.clone().with_normalize(false), res).unwrap(), None).unwrap();
        let b = extract_domains(&GridField::sample(&f.with_normalize(false).scaled(k), res).unwrap(), None).unwrap();
        prop_assert_eq!(a.len(), b.len());
    }

    #[test]
    fn fit_recovers_exact_exponents(p in -2.0f64..2.0, a in 0.1f64..10.0, n in 5usize..12) {
        let pts: Vec<(f64, f64)> = (1..=n).map(|k| (k as f64 * 1.7, a * (k as f64 * 1.7).powf(p))).collect();
        let fit = fit_exponent("f", "q", pts).unwrap();
        prop_assert!((fit.fitted_exponent - p).abs() < 1e-9);
        prop_assert!((fit.intercept - a.ln()).abs() < 1e-9);
    }
}
