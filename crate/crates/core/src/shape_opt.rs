//! Window and hole optimization under a measure constraint.
//!
//! Both optimizers alternate between a trace solve for the current shape and
//! a rearrangement of the shape onto the smallest values of the extremal.
//! The shape is first grown by measure doubling from a single element so
//! that it nucleates where the extremal is smallest; at the target measure a
//! rearranged shape is accepted only when its solve strictly lowers S.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{BoundarySubset, InteriorSubset, MeshDomain};
use crate::modular::ScalarField;
use crate::trace_solver::{solve, solve_from, one_ring_closure, SolverConfig, TraceSolve, VanishingConstraint};
use crate::young::YoungFunction;

const MAX_OUTER: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Window(BoundarySubset),
    Hole(InteriorSubset),
}

impl Shape {
    pub fn measure(&self) -> f64 {
        match self {
            Shape::Window(w) => w.achieved_measure(),
            Shape::Hole(h) => h.achieved_measure(),
        }
    }

    fn indices(&self) -> &[usize] {
        match self {
            Shape::Window(w) => w.edges(),
            Shape::Hole(h) => h.triangles(),
        }
    }

    /// FNV-1a over the element indices; stable across runs and platforms.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let tag: u64 = if matches!(self, Shape::Window(_)) { 1 } else { 2 };
        for x in std::iter::once(tag).chain(self.indices().iter().map(|&i| i as u64)) {
            for b in x.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        }
        h
    }
}

#[derive(Debug, Clone)]
pub struct ShapeOptResult {
    pub best_shape: Shape,
    pub best_solve: TraceSolve,
    pub s_alpha: f64,
    pub alpha_requested: f64,
    pub alpha_achieved: f64,
    pub outer_iterations: usize,
    /// `(shape fingerprint, S)` for every accepted step at the target measure.
    pub history: Vec<(u64, f64)>,
}

fn ordered_by_score(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    order
}

/// Relative slack on "measure reached": sums of equal edges in different
/// orders must not disagree about whether they hit `alpha`.
const MEASURE_SLACK: f64 = 1e-12;

fn reached(total: f64, alpha: f64) -> bool {
    total >= alpha * (1.0 - MEASURE_SLACK)
}

fn greedy_prefix(order: &[usize], measures: &[f64], alpha: f64) -> Vec<usize> {
    let mut total = 0.0;
    let mut out = Vec::new();
    for &i in order {
        if reached(total, alpha) && !out.is_empty() {
            break;
        }
        out.push(i);
        total += measures[i];
    }
    out
}

/// Boundary edges sorted by edge-average of `|u|` (index tie-break), taken
/// greedily until their total length reaches `alpha`.
pub fn rearrange_window(u: &ScalarField, alpha: f64) -> Result<BoundarySubset> {
    let mesh = u.mesh();
    let perimeter = mesh.perimeter();
    if !(alpha > 0.0 && alpha < perimeter) {
        return Err(Error::Domain(format!("alpha {alpha} outside (0, {perimeter})")));
    }
    let v = u.values();
    let scores: Vec<f64> = mesh.boundary_edges().iter().map(|&[i, j]| 0.5 * (v[i].abs() + v[j].abs())).collect();
    let picked = greedy_prefix(&ordered_by_score(&scores), mesh.edge_lengths(), alpha);
    BoundarySubset::new(mesh, picked)
}

/// Triangles sorted by vertex-average of `|u|`, taken greedily to area `alpha`.
pub fn rearrange_hole(u: &ScalarField, alpha: f64) -> Result<InteriorSubset> {
    let mesh = u.mesh();
    let area = mesh.area();
    if !(alpha > 0.0 && alpha < area) {
        return Err(Error::Domain(format!("alpha {alpha} outside (0, {area})")));
    }
    let v = u.values();
    let scores: Vec<f64> =
        mesh.triangles().iter().map(|t| (v[t[0]].abs() + v[t[1]].abs() + v[t[2]].abs()) / 3.0).collect();
    let picked = greedy_prefix(&ordered_by_score(&scores), mesh.areas(), alpha);
    InteriorSubset::new(mesh, picked)
}

fn constraint_for(mesh: &MeshDomain, shape: &Shape) -> VanishingConstraint {
    match shape {
        Shape::Window(w) => VanishingConstraint::window(mesh, w.clone()),
        Shape::Hole(h) => VanishingConstraint::hole(mesh, h.clone()),
    }
}

fn rearrange(u: &ScalarField, alpha: f64, hole: bool) -> Result<Shape> {
    Ok(if hole { Shape::Hole(rearrange_hole(u, alpha)?) } else { Shape::Window(rearrange_window(u, alpha)?) })
}

fn solve_shape(
    g: &YoungFunction,
    h: &YoungFunction,
    mesh: &Arc<MeshDomain>,
    shape: &Shape,
    config: &SolverConfig,
    warm: Option<&ScalarField>,
) -> Result<TraceSolve> {
    let c = constraint_for(mesh, shape);
    solve_from(g, h, mesh, &c, config, warm).map_err(|e| match (e, shape) {
        (Error::EmptyAdmissible(msg), Shape::Hole(_)) => Error::Infeasible(format!("hole leaves no free boundary: {msg}")),
        (e, _) => e,
    })
}

fn optimize(
    g: &YoungFunction,
    h: &YoungFunction,
    mesh: &Arc<MeshDomain>,
    alpha: f64,
    config: &SolverConfig,
    hole: bool,
) -> Result<ShapeOptResult> {
    let total = if hole { mesh.area() } else { mesh.perimeter() };
    if !(alpha > 0.0 && alpha < total) {
        return Err(Error::Domain(format!("alpha {alpha} outside (0, {total})")));
    }
    let base = solve(g, h, mesh, &VanishingConstraint::none(mesh), config)?;
    let mut u = base.extremal;

    // nucleate with a single element and double the measure up to alpha
    let mut shape = rearrange(&u, f64::MIN_POSITIVE, hole)?;
    let mut current = solve_shape(g, h, mesh, &shape, config, Some(&u))?;
    u = current.extremal.clone();
    while !reached(shape.measure(), alpha) {
        let target = (2.0 * shape.measure()).min(alpha);
        shape = rearrange(&u, target, hole)?;
        current = solve_shape(g, h, mesh, &shape, config, Some(&u))?;
        u = current.extremal.clone();
    }

    let mut history = vec![(shape.fingerprint(), current.s_value)];
    let mut outer = 0;
    while outer < MAX_OUTER {
        outer += 1;
        let candidate = rearrange(&current.extremal, alpha, hole)?;
        if candidate == shape {
            break;
        }
        let trial = match solve_shape(g, h, mesh, &candidate, config, Some(&current.extremal)) {
            Ok(t) => t,
            Err(Error::Infeasible(_)) | Err(Error::EmptyAdmissible(_)) => break,
            Err(e) => return Err(e),
        };
        if trial.s_value < current.s_value * (1.0 - 1e-12) {
            shape = candidate;
            current = trial;
            history.push((shape.fingerprint(), current.s_value));
        } else {
            break;
        }
    }
    Ok(ShapeOptResult {
        alpha_achieved: shape.measure(),
        best_shape: shape,
        s_alpha: current.s_value,
        best_solve: current,
        alpha_requested: alpha,
        outer_iterations: outer,
        history,
    })
}

/// Optimal window of boundary measure ≈ `alpha`.
pub fn optimize_window(
    g: &YoungFunction,
    h: &YoungFunction,
    mesh: &Arc<MeshDomain>,
    alpha: f64,
    config: &SolverConfig,
) -> Result<ShapeOptResult> {
    optimize(g, h, mesh, alpha, config, false)
}

/// Optimal interior hole of area ≈ `alpha`.
pub fn optimize_hole(
    g: &YoungFunction,
    h: &YoungFunction,
    mesh: &Arc<MeshDomain>,
    alpha: f64,
    config: &SolverConfig,
) -> Result<ShapeOptResult> {
    optimize(g, h, mesh, alpha, config, true)
}

/// Runs [`optimize_window`] for each alpha concurrently; results keep input order.
pub fn sweep_alpha(
    g: &YoungFunction,
    h: &YoungFunction,
    mesh: &Arc<MeshDomain>,
    alphas: &[f64],
    config: &SolverConfig,
) -> Result<Vec<ShapeOptResult>> {
    alphas.par_iter().map(|&a| optimize_window(g, h, mesh, a, config)).collect()
}

#[derive(Debug, Clone)]
pub struct ArcOracle {
    pub best_arc: BoundarySubset,
    pub s_value: f64,
    pub best_solve: TraceSolve,
    /// `(first edge in loop order, S)` for every candidate arc.
    pub candidates: Vec<(usize, f64)>,
}

/// Contiguous boundary run starting at loop position `start`, long enough to
/// reach `alpha`.
pub fn contiguous_arc(mesh: &MeshDomain, start: usize, alpha: f64) -> Result<BoundarySubset> {
    let order = mesh.boundary_loop();
    let n = order.len();
    let mut total = 0.0;
    let mut edges = Vec::new();
    let mut k = 0;
    while (!reached(total, alpha) || edges.is_empty()) && k < n {
        let e = order[(start + k) % n];
        edges.push(e);
        total += mesh.edge_lengths()[e];
        k += 1;
    }
    BoundarySubset::new(mesh, edges)
}

/// Exhaustive search over contiguous arcs of measure ≈ `alpha`, one per
/// boundary vertex.
pub fn arc_oracle(
    g: &YoungFunction,
    h: &YoungFunction,
    mesh: &Arc<MeshDomain>,
    alpha: f64,
    config: &SolverConfig,
) -> Result<ArcOracle> {
    let perimeter = mesh.perimeter();
    if !(alpha > 0.0 && alpha < perimeter) {
        return Err(Error::Domain(format!("alpha {alpha} outside (0, {perimeter})")));
    }
    let n = mesh.boundary_loop().len();
    if n != mesh.boundary_edges().len() {
        return Err(Error::Domain("arc oracle needs a single boundary loop".into()));
    }
    let base = solve(g, h, mesh, &VanishingConstraint::none(mesh), config)?;
    let solves: Vec<(BoundarySubset, TraceSolve)> = (0..n)
        .into_par_iter()
        .map(|k| {
            let arc = contiguous_arc(mesh, k, alpha)?;
            let c = VanishingConstraint::window(mesh, arc.clone());
            Ok((arc, solve_from(g, h, mesh, &c, config, Some(&base.extremal))?))
        })
        .collect::<Result<_>>()?;
    let candidates: Vec<(usize, f64)> = solves.iter().enumerate().map(|(k, s)| (k, s.1.s_value)).collect();
    let best = candidates
        .iter()
        .copied()
        .fold((0, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc })
        .0;
    let (best_arc, best_solve) = solves.into_iter().nth(best).expect("at least one arc");
    Ok(ArcOracle { best_arc, s_value: best_solve.s_value, best_solve, candidates })
}

#[derive(Debug, Clone)]
pub struct BlowupRow {
    pub eps: f64,
    pub delta: f64,
    pub alpha_achieved: f64,
    pub solve: TraceSolve,
}

#[derive(Debug, Clone)]
pub struct BlowupTable {
    pub alpha: f64,
    pub rows: Vec<BlowupRow>,
}

impl BlowupTable {
    /// S nondecreasing along the (decreasing) eps sequence.
    pub fn monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].solve.s_value >= w[0].solve.s_value)
    }

    pub fn growth_ratio(&self) -> f64 {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) => b.solve.s_value / a.solve.s_value,
            _ => f64::NAN,
        }
    }
}

/// Band `{eps <= dist(x, ∂Ω) <= delta}` grown one triangle at a time in order
/// of centroid distance (index tie-break) until its area reaches `alpha`, so
/// it overshoots by less than one triangle; the outermost layer may be
/// partial. `delta` is the distance of the last triangle taken.
pub fn band_for_measure(mesh: &MeshDomain, eps: f64, alpha: f64) -> Result<(f64, InteriorSubset)> {
    let dists: Vec<f64> = (0..mesh.num_triangles()).map(|t| mesh.distance_to_boundary(mesh.centroid(t))).collect();
    let mut order: Vec<usize> = (0..dists.len()).filter(|&t| dists[t] >= eps).collect();
    order.sort_by(|&a, &b| dists[a].total_cmp(&dists[b]).then(a.cmp(&b)));
    let available: f64 = order.iter().map(|&t| mesh.areas()[t]).sum();
    if !reached(available, alpha) {
        return Err(Error::Infeasible(format!("band starting at eps={eps} cannot reach area {alpha}")));
    }
    let taken = greedy_prefix(&order, mesh.areas(), alpha);
    let delta = taken.last().map_or(eps, |&t| dists[t]);
    Ok((delta, InteriorSubset::new(mesh, taken)?))
}

/// Trace constants of annular holes `{eps ≤ dist(x, ∂Ω) ≤ delta}` of fixed
/// area `alpha` for a decreasing sequence of `eps`.
pub fn blowup_experiment(
    g: &YoungFunction,
    h: &YoungFunction,
    mesh: &Arc<MeshDomain>,
    alpha: f64,
    eps_sequence: &[f64],
    config: &SolverConfig,
) -> Result<BlowupTable> {
    if eps_sequence.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Domain("eps sequence must be strictly decreasing".into()));
    }
    let bands: Vec<(f64, f64, InteriorSubset)> = eps_sequence
        .iter()
        .map(|&eps| band_for_measure(mesh, eps, alpha).map(|(d, b)| (eps, d, b)))
        .collect::<Result<_>>()?;
    let rows = bands
        .into_par_iter()
        .map(|(eps, delta, band)| {
            let alpha_achieved = band.achieved_measure();
            let solve = solve_shape(g, h, mesh, &Shape::Hole(band), config, None)?;
            Ok(BlowupRow { eps, delta, alpha_achieved, solve })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlowupTable { alpha, rows })
}

/// Area of triangles forced to zero by the one-ring closure but outside the hole.
pub fn closure_ring_area(mesh: &MeshDomain, hole: &InteriorSubset) -> f64 {
    let zero = one_ring_closure(mesh, hole);
    mesh.triangles()
        .iter()
        .enumerate()
        .filter(|(t, tri)| tri.iter().all(|v| zero.contains(v)) && hole.triangles().binary_search(t).is_err())
        .map(|(t, _)| mesh.areas()[t])
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::make_disk;

    fn disk(h: f64) -> Arc<MeshDomain> {
        Arc::new(make_disk(1.0, h).unwrap())
    }

    #[test]
    fn constant_trace_picks_lowest_indices() {
        let m = disk(0.2);
        let u = ScalarField::from_fn(m.clone(), |_| 1.0);
        let len = m.edge_lengths()[0];
        let w = rearrange_window(&u, 2.5 * len).unwrap();
        assert_eq!(w.edges(), &[0, 1, 2]);
        assert!((w.achieved_measure() - 2.5 * len).abs() <= len);
    }

    #[test]
    fn zeros_are_selected_first() {
        let m = disk(0.2);
        // vanishes on the arc of polar angle in [0, 1.2]
        let u = ScalarField::from_fn(m.clone(), |p| {
            let th = p[1].atan2(p[0]).rem_euclid(std::f64::consts::TAU);
            if th <= 1.2 + 1e-9 { 0.0 } else { 1.0 + th }
        });
        let w = rearrange_window(&u, 0.8).unwrap();
        for &e in w.edges() {
            let mid = m.edge_midpoint(e);
            assert!(mid[1].atan2(mid[0]).rem_euclid(std::f64::consts::TAU) < 1.2);
        }
    }

    #[test]
    fn alpha_out_of_range() {
        let m = disk(0.3);
        let u = ScalarField::from_fn(m.clone(), |_| 1.0);
        assert!(rearrange_window(&u, m.perimeter()).is_err());
        assert!(rearrange_window(&u, 0.0).is_err());
        assert!(rearrange_hole(&u, m.area() + 1.0).is_err());
    }

    #[test]
    fn fingerprints_distinguish_shapes() {
        let m = disk(0.3);
        let a = Shape::Window(BoundarySubset::new(&m, [0, 1]).unwrap());
        let b = Shape::Window(BoundarySubset::new(&m, [0, 2]).unwrap());
        let c = Shape::Hole(InteriorSubset::new(&m, [0, 1]).unwrap());
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), c.fingerprint());
        assert_eq!(a.fingerprint(), a.clone().fingerprint());
    }

    #[test]
    fn arcs_are_contiguous() {
        let m = disk(0.25);
        let n = m.boundary_edges().len();
        for k in [0, n / 2, n - 1] {
            let arc = contiguous_arc(&m, k, 1.0).unwrap();
            assert_eq!(arc.runs(&m), 1);
            assert!(arc.achieved_measure() >= 1.0);
        }
    }

    #[test]
    fn band_overshoots_by_less_than_a_triangle() {
        let m = disk(0.05);
        let (delta, band) = band_for_measure(&m, 0.2, 0.5).unwrap();
        assert!(delta > 0.2);
        let a = band.achieved_measure();
        assert!(reached(a, 0.5) && a - 0.5 < m.max_area(), "{a}");
        assert!(band_for_measure(&m, 0.9, 2.0).is_err());
    }
}
