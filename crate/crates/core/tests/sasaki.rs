mod common;

use std::f64::consts::{PI, TAU};

use nodal_core::{
    banach_indicatrix, co_area_bound, extract_level, gr_bound, level_l, lift_length, sweep, systole, turning,
    FieldExpr, GridField, SurfaceModel, SweepSpec, WeightFn,
};

fn paraboloid() -> GridField {
    common::sample(&FieldExpr::disc_paraboloid())
}

#[test]
fn paraboloid_lift_speed_is_radial() {
    // (Hw, w) = -2 and |grad f| = 2 rho, so the speed is sqrt(1 + r^2 / rho^2).
    let gf = paraboloid();
    for c in [0.2, 0.6, 0.9] {
        let level = extract_level(&gf, c).unwrap();
        for s in level.contours[0].samples(&gf).unwrap() {
            let rho = s.midpoint.u;
            for r in [0.0, 0.3, 2.0] {
                let want = (1.0 + r * r / (rho * rho)).sqrt();
                assert!((s.lift_speed(r) - want).abs() < 1e-9 * want, "c={c} r={r}");
            }
        }
    }
}

#[test]
fn paraboloid_lift_length_closed_form() {
    // A circle of radius rho lifts to length 2 pi sqrt(rho^2 + r^2).
    let gf = paraboloid();
    for c in [0.19, 0.64, 0.91] {
        let rho = (1.0f64 - c).sqrt();
        let level = extract_level(&gf, c).unwrap();
        for r in [0.0, 0.5, 1.0, 4.0] {
            let l = lift_length(&level.contours[0], &gf, r).unwrap();
            let want = TAU * (rho * rho + r * r).sqrt();
            assert!((l - want).abs() < 2e-3 * want, "c={c} r={r}: {l} vs {want}");
        }
    }
}

#[test]
fn lift_over_r_tends_to_turning() {
    let gf = paraboloid();
    let level = extract_level(&gf, 0.5).unwrap();
    let k = &level.contours[0];
    let t = turning(k, &gf).unwrap();
    assert!(t >= TAU && t - TAU < 1e-3 * TAU, "{t}");
    let r = 1e6;
    assert!((lift_length(k, &gf, r).unwrap() / r - t).abs() < 1e-6);
}

#[test]
fn lift_grows_with_r() {
    let gf = common::sample(&common::zonal(5));
    let mut prev = 0.0;
    for r in [0.0, 0.1, 1.0, 10.0] {
        let l = level_l(&gf, 0.1, r).unwrap();
        assert!(l > prev, "r={r}");
        prev = l;
    }
}

#[test]
fn torus_loops_exceed_the_systole() {
    for n in 1..=3 {
        let gf = common::sample(&common::torus_nn(n));
        for c in [0.05, 0.2, 0.3] {
            let beta = extract_level(&gf, c).unwrap().beta() as f64;
            for r in [0.1, 1.0, 10.0] {
                let l = level_l(&gf, c, r).unwrap();
                let kappa = systole(SurfaceModel::FlatTorus, r).unwrap();
                assert!(l >= kappa * beta, "n={n} c={c} r={r}: {l} < {}", kappa * beta);
            }
        }
    }
}

#[test]
fn systole_values() {
    assert_eq!(systole(SurfaceModel::FlatTorus, 0.5).unwrap(), PI);
    assert_eq!(systole(SurfaceModel::FlatTorus, 3.0).unwrap(), TAU);
    assert_eq!(systole(SurfaceModel::UnitDisc, 3.0).unwrap(), 3.0 * TAU);
    assert!(systole(SurfaceModel::RoundSphere, 1.0).is_err());
    assert!(systole(SurfaceModel::FlatTorus, -1.0).is_err());
}

#[test]
fn gr_bound_is_an_equality_on_the_paraboloid() {
    let b = gr_bound(&paraboloid()).unwrap();
    assert!((b.ratio() - 1.0).abs() < 1e-6, "{b:?}");
}

#[test]
fn gr_bound_is_strict_on_rectangle_modes() {
    for (m, n) in [(1, 1), (2, 3), (4, 4)] {
        let b = gr_bound(&common::sample(&common::square_mode(m, n))).unwrap();
        assert!(b.holds() && b.ratio() < 0.9, "({m},{n}): {b:?}");
    }
    assert!(gr_bound(&common::sample(&common::torus_nn(1))).is_err());
}

#[test]
fn co_area_bound_dominates_banach() {
    let gf = paraboloid();
    let b = banach_indicatrix(&gf, &WeightFn::one(), &SweepSpec::default()).unwrap();
    for r in [0.0, 1.0, 1e3] {
        let bound = co_area_bound(&gf, &WeightFn::one(), r).unwrap();
        assert!(bound >= b * (1.0 - 1e-6), "r={r}: {bound} < {b}");
    }
    let gf = common::sample(&common::square_mode(2, 2));
    let b = banach_indicatrix(&gf, &WeightFn::one(), &SweepSpec::default()).unwrap();
    assert!(co_area_bound(&gf, &WeightFn::one(), 1.0).unwrap() >= b);
}

#[test]
fn sweep_records_lift_per_r() {
    let gf = paraboloid();
    let s = sweep(&gf, &SweepSpec::default().with_levels(64).with_r(vec![0.0, 1.0])).unwrap();
    for l in s.levels.iter().filter(|l| l.regular && l.beta == 1 && l.c > 0.05) {
        let rho = (1.0 - l.c).sqrt();
        assert!((l.sasaki[0] - TAU * rho).abs() < 2e-3);
        assert!((l.sasaki[1] - TAU * (rho * rho + 1.0).sqrt()).abs() < 2e-3);
    }
}
