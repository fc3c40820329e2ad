use std::sync::Arc;

use rayon::prelude::*;
use trace_shape_core::capacity::{disk_obstacle, estimate_capacity, estimate_capacity_relaxed, nearest_vertex, square_hole, Obstacle};
use trace_shape_core::mesh::{hausdorff_distance, make_disk};
use trace_shape_core::shape_opt::{arc_oracle, blowup_experiment, optimize_hole, sweep_alpha, Shape, ShapeOptResult};
use trace_shape_core::symmetry::{perimeter_hypothesis, polya_szego_check, shipped_fields, symmetrize, symmetry_identities};
use trace_shape_core::trace_solver::{solve, TraceSolve, VanishingConstraint};
use trace_shape_core::young::{check_trace_compatibility, Compatibility};
use trace_shape_core::{Error, InteriorSubset, MeshDomain, Result, YoungFunction};

use crate::config::{Command, ExperimentConfig, Family};
use crate::output::{Cell, Plot, RunOutput, Table};

/// Appends a per-iteration trace of one solve.
fn trace(log: &mut Vec<String>, label: &str, s: &TraceSolve) {
    log.push(format!(
        "[{label}] S = {} iterations = {} converged = {} kkt_residual = {}",
        s.s_value, s.iterations, s.converged, s.kkt_residual
    ));
    for (k, j) in s.history.iter().enumerate() {
        log.push(format!("[{label}]   iter {k} J = {j}"));
    }
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mut out = match cfg.command {
        Command::Constant => constant(cfg),
        Command::Window => window(cfg, false),
        Command::SweepAlpha => window(cfg, true),
        Command::Hole => hole(cfg),
        Command::Blowup => blowup(cfg),
        Command::Capacity => capacity(cfg),
        Command::Continuity => continuity(cfg),
        Command::Symmetrize => symmetrize_fields(cfg),
        Command::YoungCheck => young_check(cfg),
    }?;
    let header = format!(
        "command = {} G = {} H = {} h = {} seed = {}",
        cfg.command.name(),
        cfg.g,
        cfg.h,
        cfg.domain.h(),
        cfg.solver.seed
    );
    out.log.insert(0, header);
    Ok(out)
}

fn constant(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mesh = cfg.domain.build()?;
    let s = solve(&cfg.g, &cfg.h, &mesh, &VanishingConstraint::none(&mesh), &cfg.solver)?;
    let mut table = Table::new(&[
        "alpha_requested",
        "alpha_achieved",
        "s_value",
        "multiplier",
        "kkt_residual",
        "iterations",
        "converged",
    ]);
    table.push(vec![
        0.0.into(),
        0.0.into(),
        s.s_value.into(),
        s.multiplier.into(),
        s.kkt_residual.into(),
        s.iterations.into(),
        s.converged.into(),
    ]);
    let mut log = Vec::new();
    trace(&mut log, "constant", &s);
    log.push(s.report_text(&cfg.solver));
    Ok(RunOutput { table, log, all_converged: s.converged, ..Default::default() })
}

fn shape_trace(log: &mut Vec<String>, label: &str, r: &ShapeOptResult) {
    log.push(format!("[{label}] outer iterations = {}", r.outer_iterations));
    for (fp, s) in &r.history {
        log.push(format!("[{label}]   accepted shape {fp:016x} S = {s}"));
    }
    trace(log, label, &r.best_solve);
}

fn window(cfg: &ExperimentConfig, with_plot: bool) -> Result<RunOutput> {
    let mesh = cfg.domain.build()?;
    let results = sweep_alpha(&cfg.g, &cfg.h, &mesh, &cfg.alphas, &cfg.solver)?;
    let oracles = if cfg.oracle {
        cfg.alphas
            .iter()
            .map(|&a| arc_oracle(&cfg.g, &cfg.h, &mesh, a, &cfg.solver).map(Some))
            .collect::<Result<Vec<_>>>()?
    } else {
        vec![None; cfg.alphas.len()]
    };
    let mut table = Table::new(&[
        "alpha_requested",
        "alpha_achieved",
        "s_value",
        "edges",
        "runs",
        "outer_iterations",
        "iterations",
        "converged",
        "s_arc",
        "arc_gap",
        "cap_passed",
    ]);
    let mut log = Vec::new();
    let mut all_converged = true;
    for (r, oracle) in results.iter().zip(&oracles) {
        let Shape::Window(w) = &r.best_shape else { unreachable!("windows only") };
        let runs = w.runs(&mesh);
        let gap = oracle.as_ref().map(|o| (r.s_alpha - o.s_value).abs() / o.s_value);
        table.push(vec![
            r.alpha_requested.into(),
            r.alpha_achieved.into(),
            r.s_alpha.into(),
            w.edges().len().into(),
            runs.into(),
            r.outer_iterations.into(),
            r.best_solve.iterations.into(),
            r.best_solve.converged.into(),
            oracle.as_ref().map(|o| o.s_value).into(),
            gap.into(),
            gap.map(|g| runs <= 2 && g <= 0.03).into(),
        ]);
        all_converged &= r.best_solve.converged && oracle.as_ref().is_none_or(|o| o.best_solve.converged);
        shape_trace(&mut log, &format!("alpha={}", r.alpha_requested), r);
        if let Some(o) = oracle {
            trace(&mut log, &format!("arc alpha={}", r.alpha_requested), &o.best_solve);
        }
    }
    let plot = with_plot.then(|| Plot {
        title: format!("optimal window constant, G = {}", cfg.g),
        x_label: "alpha".into(),
        y_label: "S".into(),
        log_x: false,
        series: vec![("S(alpha)".into(), results.iter().map(|r| (r.alpha_requested, r.s_alpha)).collect())],
    });
    Ok(RunOutput { table, log, plot, all_converged, ..Default::default() })
}

fn hole(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mesh = cfg.domain.build()?;
    let results: Vec<ShapeOptResult> =
        cfg.alphas.par_iter().map(|&a| optimize_hole(&cfg.g, &cfg.h, &mesh, a, &cfg.solver)).collect::<Result<_>>()?;
    let mut table = Table::new(&[
        "alpha_requested",
        "alpha_achieved",
        "s_value",
        "triangles",
        "zero_area",
        "outer_iterations",
        "iterations",
        "converged",
    ]);
    let mut log = Vec::new();
    for r in &results {
        let Shape::Hole(h) = &r.best_shape else { unreachable!("holes only") };
        table.push(vec![
            r.alpha_requested.into(),
            r.alpha_achieved.into(),
            r.s_alpha.into(),
            h.triangles().len().into(),
            r.best_solve.zero_area().into(),
            r.outer_iterations.into(),
            r.best_solve.iterations.into(),
            r.best_solve.converged.into(),
        ]);
        shape_trace(&mut log, &format!("alpha={}", r.alpha_requested), r);
    }
    let all_converged = results.iter().all(|r| r.best_solve.converged);
    Ok(RunOutput { table, log, all_converged, ..Default::default() })
}

fn blowup(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mesh = cfg.domain.build()?;
    let t = blowup_experiment(&cfg.g, &cfg.h, &mesh, cfg.alphas[0], &cfg.eps, &cfg.solver)?;
    let mut table =
        Table::new(&["eps", "delta", "alpha_requested", "alpha_achieved", "s_value", "iterations", "converged"]);
    let mut log = Vec::new();
    for r in &t.rows {
        table.push(vec![
            r.eps.into(),
            r.delta.into(),
            t.alpha.into(),
            r.alpha_achieved.into(),
            r.solve.s_value.into(),
            r.solve.iterations.into(),
            r.solve.converged.into(),
        ]);
        trace(&mut log, &format!("eps={}", r.eps), &r.solve);
    }
    log.push(format!("monotone = {} growth_ratio = {}", t.monotone(), t.growth_ratio()));
    let plot = Some(Plot {
        title: format!("boundary-layer holes of area {}", t.alpha),
        x_label: "eps".into(),
        y_label: "S".into(),
        log_x: true,
        series: vec![("S(eps)".into(), t.rows.iter().map(|r| (r.eps, r.solve.s_value)).collect())],
    });
    let all_converged = t.rows.iter().all(|r| r.solve.converged);
    Ok(RunOutput { table, log, plot, all_converged, ..Default::default() })
}

fn obstacle(mesh: &MeshDomain, r: f64) -> Obstacle {
    if r == 0.0 {
        Obstacle::Vertices(vec![nearest_vertex(mesh, [0.0, 0.0])])
    } else {
        Obstacle::Region(disk_obstacle(mesh, [0.0, 0.0], r))
    }
}

fn capacity(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let domain = cfg.domain.build()?;
    let box_mesh = Arc::new(make_disk(cfg.box_radius, cfg.domain.h())?);
    let empty = solve(&cfg.g, &cfg.h, &domain, &VanishingConstraint::none(&domain), &cfg.solver)?;
    struct Row {
        r: f64,
        area: f64,
        cap: f64,
        relaxed: Option<f64>,
        s_a: TraceSolve,
        converged: bool,
    }
    let rows: Vec<Row> = cfg
        .radii
        .par_iter()
        .map(|&r| {
            let (bo, o) = (obstacle(&box_mesh, r), obstacle(&domain, r));
            let c = estimate_capacity(&cfg.g, &box_mesh, &bo, &cfg.solver)?;
            let relaxed =
                if cfg.relaxed { Some(estimate_capacity_relaxed(&cfg.g, &box_mesh, &bo, &cfg.solver)?) } else { None };
            let s_a = solve(&cfg.g, &cfg.h, &domain, &o.vanishing_constraint(&domain)?, &cfg.solver)?;
            let area = match &o {
                Obstacle::Region(a) => a.achieved_measure(),
                Obstacle::Vertices(_) => 0.0,
            };
            let converged = c.converged && relaxed.as_ref().is_none_or(|x| x.converged) && s_a.converged;
            Ok(Row { r, area, cap: c.value, relaxed: relaxed.map(|x| x.value), s_a, converged })
        })
        .collect::<Result<_>>()?;

    let mut table = Table::new(&[
        "radius",
        "alpha_requested",
        "alpha_achieved",
        "obstacle_area",
        "capacity",
        "capacity_relaxed",
        "s_a",
        "s_empty",
        "gap",
        "converged",
    ]);
    let mut log = Vec::new();
    trace(&mut log, "empty", &empty);
    for row in &rows {
        table.push(vec![
            row.r.into(),
            Cell::Empty,
            Cell::Empty,
            row.area.into(),
            row.cap.into(),
            row.relaxed.into(),
            row.s_a.s_value.into(),
            empty.s_value.into(),
            (row.s_a.s_value - empty.s_value).abs().into(),
            row.converged.into(),
        ]);
        trace(&mut log, &format!("radius={}", row.r), &row.s_a);
    }
    let plot = Some(Plot {
        title: format!("capacity in B_{} against the trace-constant gap", cfg.box_radius),
        x_label: "obstacle radius".into(),
        y_label: "value".into(),
        log_x: false,
        series: vec![
            ("capacity".into(), rows.iter().map(|r| (r.r, r.cap)).collect()),
            ("|S_A - S|".into(), rows.iter().map(|r| (r.r, (r.s_a.s_value - empty.s_value).abs())).collect()),
        ],
    });
    let all_converged = empty.converged && rows.iter().all(|r| r.converged);
    Ok(RunOutput { table, log, plot, all_converged, ..Default::default() })
}

fn continuity(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mesh = cfg.domain.build()?;
    let a = cfg.half_side;
    let base = square_hole(&mesh, [0.0, 0.0], a);
    if base.is_empty() {
        return Err(Error::Infeasible(format!("square hole of half side {a} contains no triangle at this resolution")));
    }
    let family: Vec<InteriorSubset> = (1..=cfg.steps as i32)
        .map(|k| {
            let t = 0.5f64.powi(k);
            match cfg.family {
                Family::Translate => square_hole(&mesh, [t, 0.0], a),
                Family::Dilate => square_hole(&mesh, [0.0, 0.0], a * (1.0 + t)),
            }
        })
        .collect();
    let s_of = |hole: &InteriorSubset| solve(&cfg.g, &cfg.h, &mesh, &VanishingConstraint::hole(&mesh, hole.clone()), &cfg.solver);
    let s_a = s_of(&base)?;
    let pts = base.vertex_points(&mesh);
    let solves: Vec<(f64, TraceSolve)> = family
        .par_iter()
        .map(|hole| Ok((hausdorff_distance(&pts, &hole.vertex_points(&mesh))?, s_of(hole)?)))
        .collect::<Result<_>>()?;

    let mut table =
        Table::new(&["k", "alpha_requested", "alpha_achieved", "hole_area", "dist_h", "s_a", "s_k", "gap", "converged"]);
    let mut log = Vec::new();
    trace(&mut log, "base", &s_a);
    for (k, ((d, s), hole)) in solves.iter().zip(&family).enumerate() {
        table.push(vec![
            (k + 1).into(),
            Cell::Empty,
            Cell::Empty,
            hole.achieved_measure().into(),
            (*d).into(),
            s_a.s_value.into(),
            s.s_value.into(),
            (s.s_value - s_a.s_value).abs().into(),
            s.converged.into(),
        ]);
        trace(&mut log, &format!("k={}", k + 1), s);
    }
    let plot = Some(Plot {
        title: "trace constant under Hausdorff perturbation of a hole".into(),
        x_label: "Hausdorff distance".into(),
        y_label: "|S_k - S_A|".into(),
        log_x: false,
        series: vec![("gap".into(), solves.iter().map(|(d, s)| (*d, (s.s_value - s_a.s_value).abs())).collect())],
    });
    let all_converged = s_a.converged && solves.iter().all(|(_, s)| s.converged);
    Ok(RunOutput { table, log, plot, all_converged, ..Default::default() })
}

fn symmetrize_fields(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let mesh = cfg.domain.build()?;
    let fields: Vec<_> = shipped_fields(&mesh)
        .into_iter()
        .filter(|(name, _)| cfg.fields.is_empty() || cfg.fields.iter().any(|f| f == name))
        .collect();
    let mut table = Table::new(&[
        "field",
        "alpha_requested",
        "alpha_achieved",
        "area_distribution_gap",
        "arclength_distribution_gap",
        "bulk_gap",
        "trace_gap",
        "layer_cake_gap",
        "perimeter_hypothesis",
        "dirichlet_sharp",
        "dirichlet",
        "polya_szego_holds",
    ]);
    let mut bins =
        Table::new(&["field", "alpha_requested", "alpha_achieved", "bin", "radius", "level", "arc_measure", "cap_half_angle"]);
    let mut log = Vec::new();
    for (name, u) in &fields {
        let s = symmetrize(u, cfg.axis)?;
        let id = symmetry_identities(&cfg.g, &cfg.h, u, &s);
        let hyp = perimeter_hypothesis(u);
        let ps = polya_szego_check(&cfg.g, u, &s);
        table.push(vec![
            (*name).into(),
            Cell::Empty,
            Cell::Empty,
            id.area_distribution_gap.into(),
            id.arclength_distribution_gap.into(),
            id.bulk_gap.into(),
            id.trace_gap.into(),
            id.layer_cake_gap.into(),
            hyp.into(),
            ps.lhs.into(),
            ps.rhs.into(),
            ps.holds.into(),
        ]);
        for r in s.report_rows(5) {
            bins.push(vec![
                (*name).into(),
                Cell::Empty,
                Cell::Empty,
                r.bin.into(),
                r.radius.into(),
                r.level.into(),
                r.arc_measure.into(),
                r.cap_half_angle.into(),
            ]);
        }
        log.push(format!("[{name}] max identity gap = {} hypothesis = {hyp} {ps:?}", id.max_gap()));
    }
    Ok(RunOutput { table, extra: vec![("bins.csv".into(), bins)], log, all_converged: true, ..Default::default() })
}

fn young_check(cfg: &ExperimentConfig) -> Result<RunOutput> {
    let report = check_trace_compatibility(&cfg.g, cfg.h.expr(), cfg.dimension)?;
    let verdict = match report.verdict {
        Compatibility::Compatible => "compatible",
        Compatibility::Incompatible => "incompatible",
        Compatibility::Inconclusive => "inconclusive",
    };
    let mut table = Table::new(&[
        "role",
        "function",
        "alpha_requested",
        "alpha_achieved",
        "g_minus",
        "g_plus",
        "delta2",
        "doubling_constant",
        "convexity_defect",
        "compatibility",
        "tail_only",
    ]);
    let row = |role: &str, f: &YoungFunction| {
        let ix = f.indices();
        vec![
            role.into(),
            f.to_string().into(),
            Cell::Empty,
            Cell::Empty,
            ix.g_minus.into(),
            ix.g_plus.into(),
            ix.delta2.into(),
            f.doubling_constant().into(),
            f.convexity_defect().into(),
            verdict.into(),
            report.tail_only.into(),
        ]
    };
    table.push(row("G", &cfg.g));
    table.push(row("H", &cfg.h));
    let log = report.samples.iter().map(|(t, r)| format!("t = {t} ratio = {r}")).collect();
    Ok(RunOutput { table, log, all_converged: true, ..Default::default() })
}
