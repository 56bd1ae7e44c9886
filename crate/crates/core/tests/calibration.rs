//! Reprints the canonical-family maxima behind `verify::caps`.
//!
//! `cargo test -p nodal-core --test calibration -- --ignored --nocapture`

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nodal_core::verify::{check_cor_courant2, random_torus_combination, standard_reports};
use nodal_core::{FieldExpr, GridField, ModeSpec, SweepSpec, TorusBranch, WeightFn};

fn canonical() -> Vec<FieldExpr> {
    let mut out = Vec::new();
    for n in 1..=6 {
        out.push(FieldExpr::mode(ModeSpec::torus(n, n, TorusBranch::SinSin).unwrap()));
    }
    for l in 2..=40 {
        out.push(FieldExpr::mode(ModeSpec::zonal(l)));
    }
    for m in 1..=8 {
        for n in 1..=8 {
            out.push(FieldExpr::mode(ModeSpec::dirichlet(PI, PI, m, n).unwrap()));
        }
    }
    out.push(FieldExpr::disc_paraboloid());
    out.into_iter().map(FieldExpr::normalized).collect()
}

fn maxima(fields: impl Iterator<Item = FieldExpr>, u: &WeightFn) -> BTreeMap<String, (f64, String)> {
    let mut best: BTreeMap<String, (f64, String)> = BTreeMap::new();
    for f in fields {
        let gf = GridField::sample(&f, None).unwrap();
        let mut reports = standard_reports(&gf, u, &SweepSpec::default()).unwrap();
        for a in [0.1, 1.0] {
            let mut r = check_cor_courant2(&gf, a).unwrap();
            r.name = format!("cor-courant2(a={a})");
            reports.push(r);
        }
        for r in reports {
            let e = best.entry(r.name.clone()).or_insert((f64::NEG_INFINITY, String::new()));
            if r.ratio > e.0 {
                *e = (r.ratio, r.mode.clone());
            }
        }
    }
    best
}

#[test]
#[ignore = "calibration printout"]
fn print_family_maxima() {
    for u in [WeightFn::one(), WeightFn::Abs] {
        println!("u = {}", u.label());
        for (name, (ratio, mode)) in maxima(canonical().into_iter(), &u) {
            println!("  {name:<18} {ratio:.6}  at {mode}");
        }
    }
    println!("random combinations, seeds 1000..1100");
    for (name, (ratio, mode)) in maxima((1000..1100).map(|s| random_torus_combination(s).unwrap()), &WeightFn::one()) {
        println!("  {name:<18} {ratio:.6}  at {mode}");
    }
}
