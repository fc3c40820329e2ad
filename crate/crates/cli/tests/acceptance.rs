//! End-to-end acceptance suite. Every criterion prints one PASS/FAIL line
//! to the real stderr (bypassing the test harness capture) and the test
//! fails if any criterion does.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trace_shape_core::capacity::{
    disk_obstacle, gaps_nonincreasing, hausdorff_continuity_experiment, invisibility_experiment, nearest_vertex,
    square_hole, Obstacle, ObstacleCase,
};
use trace_shape_core::mesh::make_disk;
use trace_shape_core::shape_opt::{blowup_experiment, closure_ring_area, optimize_hole, optimize_window, sweep_alpha, Shape};
use trace_shape_core::symmetry::{
    cap_symmetry_check, perimeter_hypothesis, polya_szego_check, shipped_fields, symmetrize, symmetry_identities,
};
use trace_shape_core::trace_solver::{kkt_report, objective, objective_gradient, solve, SolverConfig, VanishingConstraint};
use trace_shape_core::young::{check_trace_compatibility, conjugate, growth_indices, Compatibility};
use trace_shape_core::{MeshDomain, ScalarField, YoungFunction};

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn disk(r: f64, h: f64) -> Arc<MeshDomain> {
    Arc::new(make_disk(r, h).unwrap())
}

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

/// `I_ν(1)` from its power series.
fn bessel_i_at_one(nu: u32) -> f64 {
    let mut term = 0.5f64.powi(nu as i32) / (1..=nu).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..40 {
        term *= 0.25 / (k as f64 * (k + nu) as f64);
        sum += term;
    }
    sum
}

fn steklov() -> Outcome {
    let oracle = bessel_i_at_one(1) / bessel_i_at_one(0);
    let m = disk(1.0, 0.05);
    let g = YoungFunction::power(2.0);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let t = Instant::now();
    let s = pool.install(|| solve(&g, &g, &m, &VanishingConstraint::none(&m), &cfg()).unwrap());
    let secs = t.elapsed().as_secs_f64();
    let rel = (s.s_value - oracle).abs() / oracle;
    (rel < 0.02 && secs < 60.0, format!("S = {:.6}, oracle = {oracle:.6}, rel = {rel:.2e}, {secs:.1} s", s.s_value))
}

fn multiplier_identity() -> Outcome {
    let m = disk(1.0, 0.1);
    let mut worst = (0.0f64, 0.0f64);
    let mut ok = true;
    for p in [2.0, 3.0] {
        let g = YoungFunction::power(p);
        let free = solve(&g, &g, &m, &VanishingConstraint::none(&m), &cfg()).unwrap();
        let win = optimize_window(&g, &g, &m, FRAC_PI_2, &cfg()).unwrap().best_solve;
        for s in [free, win] {
            let rel = (s.multiplier - s.s_value).abs() / s.s_value;
            let res = kkt_report(&g, &g, &s).unwrap().residual;
            ok &= s.converged && rel < 1e-3 && res < 0.05;
            worst = (worst.0.max(rel), worst.1.max(res));
        }
    }
    (ok, format!("max |mu - S|/S = {:.2e}, max KKT residual = {:.2e}", worst.0, worst.1))
}

fn gradient_check() -> Outcome {
    let m = disk(1.0, 0.2);
    let eps = cfg().regularization(&m);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut worst = 0.0f64;
    for spec in ["pow(2)", "pow(3)", "powlog(2,1,1)"] {
        let g = YoungFunction::parse(spec).unwrap();
        for _ in 0..20 {
            let mut field = || {
                let v = (0..m.num_vertices()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                ScalarField::new(m.clone(), v).unwrap()
            };
            let (u, v) = (field(), field());
            let analytic: f64 = objective_gradient(&g, &u, eps, None).iter().zip(v.values()).map(|(a, b)| a * b).sum();
            let at = |s: f64| {
                let w = u.values().iter().zip(v.values()).map(|(a, b)| a + s * b).collect();
                objective(&g, &ScalarField::new(m.clone(), w).unwrap())
            };
            let d = 1e-5;
            let fd = (at(d) - at(-d)) / (2.0 * d);
            worst = worst.max((fd - analytic).abs() / analytic.abs());
        }
    }
    (worst < 1e-4, format!("60 fields, max relative error = {worst:.2e}"))
}

fn monotone_sweep() -> Outcome {
    let m = disk(1.0, 0.1);
    let g = YoungFunction::power(2.0);
    let s: Vec<f64> =
        sweep_alpha(&g, &g, &m, &[0.5, 1.0, 2.0, 3.0], &cfg()).unwrap().iter().map(|r| r.s_alpha).collect();
    let min_gap = s.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    (min_gap > 1e-4, format!("S = {s:.5?}, min gap = {min_gap:.4}"))
}

fn cap_symmetry() -> Outcome {
    let m = disk(1.0, 0.1);
    let mut ok = true;
    let mut parts = Vec::new();
    for p in [2.0, 3.0] {
        let g = YoungFunction::power(p);
        let r = cap_symmetry_check(&g, &g, &m, FRAC_PI_2, &cfg()).unwrap();
        ok &= r.defect <= 1 && r.gap <= 0.03;
        parts.push(format!("p={p}: defect {} gap {:.2e}", r.defect, r.gap));
    }
    (ok, parts.join("; "))
}

fn zero_set_sharpness() -> Outcome {
    let m = disk(1.0, 0.1);
    let g = YoungFunction::power(2.0);
    let w = optimize_window(&g, &g, &m, FRAC_PI_2, &cfg()).unwrap();
    let zw = w.best_solve.zero_window_measure();
    let window_ok = w.best_solve.converged && (zw - FRAC_PI_2).abs() <= m.max_boundary_edge();
    let alpha = 0.3;
    let h = optimize_hole(&g, &g, &m, alpha, &cfg()).unwrap();
    let Shape::Hole(hole) = &h.best_shape else { unreachable!() };
    let ring = closure_ring_area(&m, hole);
    let za = h.best_solve.zero_area();
    let hole_ok = h.best_solve.converged && za >= alpha - m.max_area() && za <= alpha + m.max_area() + ring + 1e-12;
    (window_ok && hole_ok, format!("window zero measure {zw:.4} vs {FRAC_PI_2:.4}; hole zero area {za:.4} vs {alpha} (ring {ring:.4})"))
}

fn blowup() -> Outcome {
    let m = disk(1.0, 0.025);
    let g = YoungFunction::power(2.0);
    let t = blowup_experiment(&g, &g, &m, 0.5, &[0.4, 0.2, 0.1], &cfg()).unwrap();
    let s: Vec<f64> = t.rows.iter().map(|r| r.solve.s_value).collect();
    let ratio = t.growth_ratio();
    (t.monotone() && ratio >= 5.0, format!("S = {s:.3?}, last/first = {ratio:.2}"))
}

fn hausdorff_continuity() -> Outcome {
    let m = disk(1.0, 0.05);
    let g = YoungFunction::power(2.0);
    let base = square_hole(&m, [0.0, 0.0], 0.2);
    let ks = 1..=4;
    let shifted: Vec<_> = ks.clone().map(|k| square_hole(&m, [0.5f64.powi(k), 0.0], 0.2)).collect();
    let dilated: Vec<_> = ks.map(|k| square_hole(&m, [0.0, 0.0], 0.2 * (1.0 + 0.5f64.powi(k)))).collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, family) in [("translate", shifted), ("dilate", dilated)] {
        let rows = hausdorff_continuity_experiment(&g, &g, &m, &base, &family, &cfg()).unwrap();
        ok &= gaps_nonincreasing(&rows, 1e-3);
        let gaps: Vec<f64> = rows.iter().map(|r| r.gap).collect();
        parts.push(format!("{name} gaps {gaps:.4?}"));
    }
    (ok, parts.join("; "))
}

fn invisibility() -> Outcome {
    let g = YoungFunction::power(2.0);
    let hs = [0.1, 0.05, 0.025];
    let case = |h: f64, point: bool| {
        let (domain, box_mesh) = (disk(1.0, h), disk(2.0, h));
        let ob = |m: &MeshDomain| {
            if point {
                Obstacle::Vertices(vec![nearest_vertex(m, [0.3, 0.0])])
            } else {
                Obstacle::Region(disk_obstacle(m, [0.0, 0.0], 0.2))
            }
        };
        ObstacleCase {
            label: format!("{} h={h}", if point { "point" } else { "disk" }),
            obstacle: ob(&domain),
            box_obstacle: ob(&box_mesh),
            domain,
            box_mesh,
        }
    };
    let cases: Vec<_> = hs.iter().map(|&h| case(h, true)).chain(hs.iter().map(|&h| case(h, false))).collect();
    let rows = invisibility_experiment(&g, &g, &cases, &cfg()).unwrap();
    let p: Vec<f64> = rows[..3].iter().map(|r| r.relative_gap()).collect();
    let d: Vec<f64> = rows[3..].iter().map(|r| r.relative_gap()).collect();
    let limit = d[2] - (d[2] - d[1]).powi(2) / (d[2] - 2.0 * d[1] + d[0]);
    let ok = p[1] < p[0] && p[2] < p[1] && d[2] > 1e-3 && limit > 1e-3;
    (ok, format!("point gaps {p:.4?}; disk gaps {d:.4?}, extrapolated {limit:.4}"))
}

fn symmetry_suite() -> Outcome {
    let m = disk(1.0, 0.05);
    let g = YoungFunction::power(2.0);
    let mut worst = 0.0f64;
    let mut ps_ok = true;
    let mut checked = 0;
    for (_, u) in shipped_fields(&m) {
        let s = symmetrize(&u, [1.0, 0.0]).unwrap();
        worst = worst.max(symmetry_identities(&g, &g, &u, &s).max_gap());
        if perimeter_hypothesis(&u) {
            ps_ok &= polya_szego_check(&g, &u, &s).holds;
            checked += 1;
        }
    }
    (worst < 0.01 && ps_ok, format!("max identity gap {worst:.2e}; Polya-Szego holds on {checked} hypothesis fields: {ps_ok}"))
}

fn young_suite() -> Outcome {
    let mut ok = true;
    for p in [1.5, 2.0, 3.0, 4.5] {
        let gi = growth_indices(YoungFunction::power(p).expr());
        ok &= (gi.g_minus - p).abs() < 1e-9 && (gi.g_plus - p).abs() < 1e-9 && gi.delta2;
        let q = p / (p - 1.0);
        let c = conjugate(&YoungFunction::power(p)).unwrap();
        for t in [0.5, 1.0, 2.0] {
            ok &= (c.dual_eval(t).unwrap() - t.powf(q) / q).abs() < 1e-8;
        }
    }
    let g = YoungFunction::power(2.0);
    let verdict = check_trace_compatibility(&g, g.expr(), 2).unwrap().verdict;
    ok &= verdict == Compatibility::Compatible;
    (ok, format!("power indices and conjugates exact; t^2/2 pair is {verdict:?}"))
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.cfg");
    std::fs::write(&config, "command = sweep-alpha\nG = pow(3)\nalpha = 0.5, 1, 2, 3\nh = 0.1\nseed = 11\n").unwrap();
    let run = |jobs: &str, out: &str| {
        let out = dir.path().join(out);
        let status = Command::new(env!("CARGO_BIN_EXE_trace-shape"))
            .args(["--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--jobs", jobs])
            .status()
            .unwrap();
        (status.code(), std::fs::read(out.join("results.csv")).unwrap())
    };
    let (a, b) = (run("1", "a"), run("2", "b"));
    (a.0 == Some(0) && b.0 == Some(0) && a.1 == b.1, format!("{} bytes, identical: {}", a.1.len(), a.1 == b.1))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 12] = [
        ("steklov oracle", steklov),
        ("homogeneous multiplier identity", multiplier_identity),
        ("gradient correctness", gradient_check),
        ("monotone alpha sweep", monotone_sweep),
        ("cap symmetry", cap_symmetry),
        ("zero-set sharpness", zero_set_sharpness),
        ("blow-up", blowup),
        ("hausdorff continuity", hausdorff_continuity),
        ("capacity invisibility", invisibility),
        ("symmetrization identities", symmetry_suite),
        ("young-function suite", young_suite),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    let mut err = std::io::stderr();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = check();
        let line = format!(
            "{} {:>2} {name}: {detail} [{:.1} s]\n",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            t.elapsed().as_secs_f64()
        );
        err.write_all(line.as_bytes()).unwrap();
        if !ok {
            failed.push(*name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
