use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trace_shape_core::mesh::{make_disk, make_square};
use trace_shape_core::shape_opt::{
    arc_oracle, band_for_measure, blowup_experiment, closure_ring_area, contiguous_arc, optimize_hole,
    optimize_window, rearrange_hole, rearrange_window, sweep_alpha, Shape,
};
use trace_shape_core::trace_solver::{solve, SolverConfig, VanishingConstraint};
use trace_shape_core::{BoundarySubset, Error, InteriorSubset, MeshDomain, ScalarField, YoungFunction};

fn disk(h: f64) -> Arc<MeshDomain> {
    Arc::new(make_disk(1.0, h).unwrap())
}

fn s_empty(g: &YoungFunction, m: &Arc<MeshDomain>) -> f64 {
    solve(g, g, m, &VanishingConstraint::none(m), &SolverConfig::default()).unwrap().s_value
}

fn window_of(shape: &Shape) -> &BoundarySubset {
    match shape {
        Shape::Window(w) => w,
        Shape::Hole(_) => panic!("expected a window"),
    }
}

fn hole_of(shape: &Shape) -> &InteriorSubset {
    match shape {
        Shape::Hole(h) => h,
        Shape::Window(_) => panic!("expected a hole"),
    }
}

#[test]
fn rearrangement_is_optimal_among_equal_cardinality_subsets() {
    let m = Arc::new(make_square(1.0, 1.0 / 3.0).unwrap());
    let nb = m.boundary_edges().len();
    assert_eq!(nb, 12);
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for trial in 0..10 {
        let v: Vec<f64> = (0..m.num_vertices()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let u = ScalarField::new(m.clone(), v.clone()).unwrap();
        let score: Vec<f64> = m.boundary_edges().iter().map(|&[a, b]| 0.5 * (v[a].abs() + v[b].abs())).collect();
        for alpha in [0.2, 1.2, 2.5, 3.9] {
            let w = rearrange_window(&u, alpha).unwrap();
            let k = w.edges().len();
            let picked: f64 = w.edges().iter().map(|&e| score[e]).sum();
            let best = (0u32..1 << nb)
                .filter(|mask| mask.count_ones() as usize == k)
                .map(|mask| (0..nb).filter(|e| mask >> e & 1 == 1).map(|e| score[e]).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            assert!((picked - best).abs() < 1e-12, "trial {trial} alpha {alpha}");
            assert!(w.achieved_measure() >= alpha * (1.0 - 1e-12) && w.achieved_measure() < alpha + 1.0 / 3.0 + 1e-12);
        }
    }
}

#[test]
fn constant_trace_ties_break_by_edge_index() {
    let m = disk(0.2);
    let u = ScalarField::from_fn(m.clone(), |_| 0.8);
    let alpha = 1.0;
    let w = rearrange_window(&u, alpha).unwrap();
    let k = w.edges().len();
    assert_eq!(w.edges(), (0..k).collect::<Vec<_>>().as_slice());
    assert!(w.achieved_measure() - alpha < m.max_boundary_edge());
}

#[test]
fn zeros_sort_first() {
    let m = disk(0.1);
    // u vanishes on the arc of angles in (0, 1.2)
    let u = ScalarField::from_fn(m.clone(), |p| {
        let t = p[1].atan2(p[0]);
        if (0.0..=1.2).contains(&t) && p[0].hypot(p[1]) > 0.999 { 0.0 } else { 1.0 + p[0] * p[0] }
    });
    let w = rearrange_window(&u, 0.9).unwrap();
    for &e in w.edges() {
        let [a, b] = m.boundary_edges()[e];
        assert_eq!(u.values()[a], 0.0);
        assert_eq!(u.values()[b], 0.0);
    }
}

#[test]
fn measure_out_of_range_is_rejected() {
    let m = disk(0.2);
    let u = ScalarField::from_fn(m.clone(), |p| p[0]);
    for alpha in [0.0, -1.0, m.perimeter(), 10.0] {
        assert!(matches!(rearrange_window(&u, alpha), Err(Error::Domain(_))), "{alpha}");
    }
    for alpha in [0.0, m.area()] {
        assert!(matches!(rearrange_hole(&u, alpha), Err(Error::Domain(_))), "{alpha}");
    }
    let g = YoungFunction::power(2.0);
    assert!(optimize_window(&g, &g, &m, m.perimeter() + 1.0, &SolverConfig::default()).is_err());
}

// Small sets have logarithmically small capacity in the plane, so the gap to
// S(∅) closes slowly; check that it is positive and shrinks with h.
#[test]
fn tiny_window_fades_under_refinement() {
    let g = YoungFunction::power(2.0);
    let gap = |h: f64| {
        let m = disk(h);
        let r = optimize_window(&g, &g, &m, 0.5 * m.max_boundary_edge(), &SolverConfig::default()).unwrap();
        assert_eq!(window_of(&r.best_shape).edges().len(), 1);
        let s0 = s_empty(&g, &m);
        (r.s_alpha - s0) / s0
    };
    let (coarse, fine) = (gap(0.1), gap(0.05));
    assert!(fine > 0.0 && fine < coarse, "{coarse} {fine}");
}

#[test]
fn sweep_is_strictly_increasing() {
    let m = disk(0.1);
    let g = YoungFunction::power(2.0);
    let rows = sweep_alpha(&g, &g, &m, &[0.5, 1.0, 2.0, 3.0], &SolverConfig::default()).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].s_alpha - w[0].s_alpha > 1e-4, "{} {}", w[0].s_alpha, w[1].s_alpha);
    }
    for r in &rows {
        assert_eq!(r.s_alpha, r.best_solve.s_value);
        assert!(r.alpha_achieved >= r.alpha_requested * (1.0 - 1e-12));
        assert!(r.alpha_achieved - r.alpha_requested <= m.max_boundary_edge());
        assert!(r.history.windows(2).all(|h| h[1].1 < h[0].1));
        assert!(r.outer_iterations >= 1);
    }
}

#[test]
fn window_matches_arc_oracle_and_arcs_agree() {
    let m = disk(0.1);
    let g = YoungFunction::power(2.0);
    let cfg = SolverConfig::default();
    let w = optimize_window(&g, &g, &m, FRAC_PI_2, &cfg).unwrap();
    let o = arc_oracle(&g, &g, &m, FRAC_PI_2, &cfg).unwrap();
    assert_eq!(o.candidates.len(), m.boundary_edges().len());
    assert!(o.s_value <= w.s_alpha + 1e-9 || (o.s_value - w.s_alpha).abs() / o.s_value < 0.03);
    assert!((w.s_alpha - o.s_value).abs() / o.s_value < 0.03);
    let worst = o.candidates.iter().map(|c| c.1).fold(0.0, f64::max);
    assert!((worst - o.s_value) / o.s_value < 0.02);
    assert!(window_of(&w.best_shape).runs(&m) <= 2);
    assert_eq!(o.best_arc.runs(&m), 1);
}

#[test]
fn near_full_window_is_expensive() {
    let m = disk(0.1);
    let g = YoungFunction::power(2.0);
    let cfg = SolverConfig::default();
    let nb = m.boundary_edges().len();
    let quarter = solve(&g, &g, &m, &VanishingConstraint::window(&m, contiguous_arc(&m, 0, FRAC_PI_2).unwrap()), &cfg)
        .unwrap()
        .s_value;
    let loop_order = m.boundary_loop();
    let most = BoundarySubset::new(&m, loop_order[..nb - 3].iter().copied()).unwrap();
    let s = solve(&g, &g, &m, &VanishingConstraint::window(&m, most), &cfg).unwrap().s_value;
    assert!(s > 2.0 * quarter, "{s} vs {quarter}");
}

#[test]
fn tiny_hole_fades_under_refinement() {
    let g = YoungFunction::power(2.0);
    let gap = |h: f64| {
        let m = disk(h);
        let r = optimize_hole(&g, &g, &m, 0.5 * m.max_area(), &SolverConfig::default()).unwrap();
        assert_eq!(hole_of(&r.best_shape).triangles().len(), 1);
        let s0 = s_empty(&g, &m);
        (r.s_alpha - s0) / s0
    };
    let (coarse, fine) = (gap(0.1), gap(0.05));
    assert!(fine > 0.0 && fine < coarse, "{coarse} {fine}");
}

#[test]
fn zero_sets_are_sharp() {
    let m = disk(0.1);
    let g = YoungFunction::power(2.0);
    let cfg = SolverConfig::default();
    let w = optimize_window(&g, &g, &m, FRAC_PI_2, &cfg).unwrap();
    assert!(w.best_solve.converged);
    assert!((w.best_solve.zero_window_measure() - FRAC_PI_2).abs() <= m.max_boundary_edge());
    let h = optimize_hole(&g, &g, &m, 0.3, &cfg).unwrap();
    assert!(h.best_solve.converged);
    let ring = closure_ring_area(&m, hole_of(&h.best_shape));
    let zero = h.best_solve.zero_area();
    assert!(zero >= 0.3 - m.max_area());
    assert!(zero <= 0.3 + m.max_area() + ring + 1e-12, "{zero} vs ring {ring}");
}

#[test]
fn optimized_hole_beats_the_band() {
    let m = disk(0.1);
    let g = YoungFunction::power(2.0);
    let cfg = SolverConfig::default();
    let alpha = 0.3;
    let h = optimize_hole(&g, &g, &m, alpha, &cfg).unwrap();
    let (_, band) = band_for_measure(&m, 0.2, alpha).unwrap();
    let sb = solve(&g, &g, &m, &VanishingConstraint::hole(&m, band), &cfg).unwrap().s_value;
    assert!(h.s_alpha <= sb, "{} vs {sb}", h.s_alpha);
}

#[test]
fn superset_windows_never_win() {
    let m = disk(0.1);
    let g = YoungFunction::power(2.0);
    let cfg = SolverConfig::default();
    let r = optimize_window(&g, &g, &m, 1.0, &cfg).unwrap();
    let base = window_of(&r.best_shape);
    let nb = m.boundary_edges().len();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..4 {
        let mut edges = base.edges().to_vec();
        for _ in 0..3 {
            edges.push(rng.gen_range(0..nb));
        }
        let sup = BoundarySubset::new(&m, edges).unwrap();
        let s = solve(&g, &g, &m, &VanishingConstraint::window(&m, sup), &cfg).unwrap().s_value;
        assert!(s >= r.s_alpha - 1e-8 * r.s_alpha, "{s} vs {}", r.s_alpha);
    }
}

#[test]
fn blowup_grows_as_bands_approach_the_boundary() {
    let m = disk(0.025);
    let g = YoungFunction::power(2.0);
    let cfg = SolverConfig::default();
    let t = blowup_experiment(&g, &g, &m, 0.5, &[0.4, 0.2, 0.1], &cfg).unwrap();
    assert!(t.monotone());
    assert!(t.growth_ratio() >= 5.0, "{}", t.growth_ratio());
    for r in &t.rows {
        assert!(r.alpha_achieved >= 0.5 && r.delta > r.eps);
    }
    assert!(matches!(blowup_experiment(&g, &g, &m, 0.5, &[0.1, 0.2], &cfg), Err(Error::Domain(_))));
}

#[test]
fn larger_bands_cost_more() {
    let m = disk(0.05);
    let g = YoungFunction::power(2.0);
    let cfg = SolverConfig::default();
    let t = |a: f64| blowup_experiment(&g, &g, &m, a, &[0.25], &cfg).unwrap().rows[0].solve.s_value;
    let (small, large) = (t(0.3), t(0.6));
    assert!(large >= small, "{large} vs {small}");
    assert!(matches!(band_for_measure(&m, 0.9, 1.0), Err(Error::Infeasible(_))));
}

#[test]
fn reruns_are_bit_identical() {
    let m = disk(0.1);
    let g = YoungFunction::power(3.0);
    let cfg = SolverConfig::default();
    let a = optimize_hole(&g, &g, &m, 0.2, &cfg).unwrap();
    let b = optimize_hole(&g, &g, &m, 0.2, &cfg).unwrap();
    assert_eq!(a.best_shape, b.best_shape);
    assert_eq!(a.best_shape.fingerprint(), b.best_shape.fingerprint());
    assert_eq!(a.history, b.history);
    assert_eq!(a.s_alpha.to_bits(), b.s_alpha.to_bits());
}
