use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trace_shape_core::mesh::{make_disk, make_square};
use trace_shape_core::modular::{bulk_modular, gradient_modular, trace_modular};
use trace_shape_core::symmetry::{
    cap_symmetry_check, distribution, distribution_on, layer_cake, perimeter_hypothesis, polar_mesh, polya_szego_check,
    shipped_fields, symmetrize, symmetry_identities, MeasureKind, ANGLES, RADIAL_BINS,
};
use trace_shape_core::trace_solver::SolverConfig;
use trace_shape_core::{Error, MeshDomain, ScalarField, YoungFunction};

fn disk(h: f64) -> Arc<MeshDomain> {
    Arc::new(make_disk(1.0, h).unwrap())
}

fn max_abs_diff(a: &ScalarField, b: &ScalarField) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Cap profile decreasing in the angular distance from `axis_angle`.
fn cap_profile(m: &Arc<MeshDomain>, axis_angle: f64) -> ScalarField {
    ScalarField::from_fn(m.clone(), move |p| {
        let r = p[0].hypot(p[1]);
        (1.0 - r * r) * (1.5 + r * (p[1].atan2(p[0]) - axis_angle).cos())
    })
}

#[test]
fn constant_field_has_a_step_distribution() {
    let m = disk(0.1);
    let c = 0.7;
    let u = ScalarField::from_fn(m.clone(), |_| c);
    for kind in [MeasureKind::Area, MeasureKind::Arclength] {
        let d = distribution_on(&u, kind, &[0.0, 0.35, 0.699, 0.7, 1.4]).unwrap();
        let total = d.total_measure;
        assert_eq!(d.measures[..3], [total, total, total][..]);
        assert!(d.measures[3] < 1e-12 && d.measures[4] == 0.0);
        assert!(d.is_nonincreasing());
    }
}

#[test]
fn linear_field_on_the_square() {
    let m = Arc::new(make_square(1.0, 0.1).unwrap());
    let u = ScalarField::from_fn(m, |p| p[0]);
    let d = distribution_on(&u, MeasureKind::Area, &[0.25, 0.5, 0.75]).unwrap();
    for (t, rho) in d.thresholds.iter().zip(&d.measures) {
        assert!((rho - (1.0 - t)).abs() < 1e-10, "{t}: {rho}");
    }
    // {x > t} meets the boundary in the bottom and top segments plus the right side
    let d = distribution_on(&u, MeasureKind::Arclength, &[0.25, 0.5]).unwrap();
    assert!((d.measures[0] - (2.0 * 0.75 + 1.0)).abs() < 1e-10);
    assert!((d.measures[1] - 2.0).abs() < 1e-10);
    assert!(distribution_on(&u, MeasureKind::Area, &[0.5, 0.25]).is_err());
}

#[test]
fn layer_cake_closed_forms() {
    let m = Arc::new(make_square(1.0, 0.2).unwrap());
    let g = YoungFunction::parse("powlog(3,1,2)").unwrap();
    assert_eq!(layer_cake(&g, &distribution(&ScalarField::zeros(m.clone()), MeasureKind::Area)), 0.0);
    let c = 1.3;
    let d = distribution(&ScalarField::from_fn(m, |_| c), MeasureKind::Area);
    assert!((layer_cake(&g, &d) - g.value(c)).abs() < 1e-6 * g.value(c));
}

#[test]
fn layer_cake_matches_bulk_modular_on_random_fields() {
    let m = disk(0.1);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for spec in ["pow(2)", "pow(3)", "powdivlog(3,1,1)"] {
        let g = YoungFunction::parse(spec).unwrap();
        let v = (0..m.num_vertices()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let u = ScalarField::new(m.clone(), v).unwrap();
        let d = distribution(&u, MeasureKind::Area);
        assert!(d.is_nonincreasing() && d.measures[0] <= d.total_measure + 1e-12);
        let lc = layer_cake(&g, &d);
        assert!(rel(lc, bulk_modular(&g, &u)) < 0.01, "{spec}");
    }
}

// On the polar mesh itself sampling is exact and a rotation by whole angle
// steps is a relabeling, so both identities hold to roundoff there.
fn polar_disk() -> Arc<MeshDomain> {
    Arc::new(polar_mesh([0.0, 0.0], 1.0, 0.0).unwrap())
}

#[test]
fn caps_on_the_axis_are_fixed_points() {
    let m = polar_disk();
    let u = cap_profile(&m, 0.0);
    let s = symmetrize(&u, [1.0, 0.0]).unwrap();
    let (d0, d1) = (max_abs_diff(&s.sampled, &u), max_abs_diff(&s.field, &u));
    assert!(d0 < 1e-12 && d1 < 1e-12, "{d0} {d1}");

    let m = disk(0.05);
    let s = symmetrize(&cap_profile(&m, 0.0), [1.0, 0.0]).unwrap();
    let g = YoungFunction::power(2.0);
    assert!(rel(gradient_modular(&g, &s.field), gradient_modular(&g, &s.sampled)) < 0.01);
}

#[test]
fn rotated_caps_symmetrize_to_the_same_profile() {
    let m = polar_disk();
    let a = symmetrize(&cap_profile(&m, 0.0), [1.0, 0.0]).unwrap();
    let b = symmetrize(&cap_profile(&m, 2.0 * PI * 37.0 / ANGLES as f64), [1.0, 0.0]).unwrap();
    let d = max_abs_diff(&a.field, &b.field);
    assert!(d < 1e-12, "{d}");

    let m = disk(0.05);
    let a = symmetrize(&cap_profile(&m, 0.0), [1.0, 0.0]).unwrap();
    let b = symmetrize(&cap_profile(&m, 2.1), [1.0, 0.0]).unwrap();
    let g = YoungFunction::power(3.0);
    assert!(rel(gradient_modular(&g, &a.field), gradient_modular(&g, &b.field)) < 0.01);
    assert!(rel(bulk_modular(&g, &a.field), bulk_modular(&g, &b.field)) < 0.01);
}

#[test]
fn symmetrization_is_idempotent() {
    let m = disk(0.1);
    for (name, u) in shipped_fields(&m) {
        let once = symmetrize(&u, [0.0, 1.0]).unwrap();
        let twice = symmetrize(&once.field, [0.0, 1.0]).unwrap();
        let scale = once.field.values().iter().fold(0.0f64, |x, y| x.max(y.abs()));
        assert!(max_abs_diff(&once.field, &twice.field) <= 1e-9 * scale, "{name}");
    }
}

#[test]
fn caps_carry_the_original_arc_measures() {
    let m = disk(0.1);
    let (_, u) = shipped_fields(&m).into_iter().nth(2).unwrap();
    let s = symmetrize(&u, [1.0, 0.0]).unwrap();
    let rows = s.report_rows(5);
    assert_eq!(rows.len(), RADIAL_BINS * 5);
    for r in &rows {
        assert!((r.arc_measure - 2.0 * r.radius * r.cap_half_angle).abs() < 1e-12);
    }
    assert!(s.profiles.iter().all(|p| p.len() == ANGLES && p.windows(2).all(|w| w[1] <= w[0])));
    assert!(s.radial_bins.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn identities_hold_on_the_shipped_suite() {
    let m = disk(0.05);
    for p in [2.0, 3.0] {
        let g = YoungFunction::power(p);
        for (name, u) in shipped_fields(&m) {
            let s = symmetrize(&u, [1.0, 0.0]).unwrap();
            let id = symmetry_identities(&g, &g, &u, &s);
            assert!(id.max_gap() < 0.01, "p={p} {name}: {id:?}");
            assert!(rel(trace_modular(&g, &s.field), trace_modular(&g, &u)) < 0.01);
            if perimeter_hypothesis(&u) {
                let ps = polya_szego_check(&g, &u, &s);
                assert!(ps.holds, "p={p} {name}: {ps:?}");
            }
        }
    }
}

#[test]
fn hypothesis_splits_the_suite() {
    let m = disk(0.05);
    let passing: Vec<&str> =
        shipped_fields(&m).into_iter().filter(|(_, u)| perimeter_hypothesis(u)).map(|(n, _)| n).collect();
    assert_eq!(passing, ["radial", "bump_cos", "bump_exp", "annular"]);
}

#[test]
fn radial_fields_are_left_alone() {
    let m = disk(0.05);
    let u = ScalarField::from_fn(m.clone(), |p| (PI * 0.5 * p[0].hypot(p[1])).cos());
    let g = YoungFunction::power(2.0);
    let s = symmetrize(&u, [0.6, 0.8]).unwrap();
    let ps = polya_szego_check(&g, &u, &s);
    assert!(ps.holds && rel(ps.lhs, ps.rhs) < 0.01, "{ps:?}");
}

#[test]
fn non_disks_are_rejected() {
    let m = Arc::new(make_square(1.0, 0.25).unwrap());
    let u = ScalarField::from_fn(m, |p| p[0]);
    assert!(matches!(symmetrize(&u, [1.0, 0.0]), Err(Error::Domain(_))));
    let d = ScalarField::from_fn(disk(0.25), |p| p[0]);
    assert!(matches!(symmetrize(&d, [0.0, 0.0]), Err(Error::Domain(_))));
}

#[test]
fn tiny_windows_pass_the_cap_check() {
    let m = disk(0.1);
    let g = YoungFunction::power(2.0);
    let r = cap_symmetry_check(&g, &g, &m, 1.5 * m.max_boundary_edge(), &SolverConfig::default()).unwrap();
    assert_eq!(r.window.edges().len(), 2);
    assert!(r.passed && r.defect <= 1 && r.gap <= 0.03, "{r:?}");
}

#[test]
fn half_perimeter_cubic_cap() {
    let m = disk(0.1);
    let g = YoungFunction::power(3.0);
    let r = cap_symmetry_check(&g, &g, &m, 0.5 * m.perimeter(), &SolverConfig::default()).unwrap();
    assert!(r.passed, "{r:?}");
    assert_eq!(r.best_arc.runs(&m), 1);
}
