//! G-capacity of compact sets, computed on a disk box `B_R` centered at the
//! origin with natural conditions on `∂B_R`, and the experiments relating
//! capacity to the trace constant with holes.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{dot, pcg};
use crate::mesh::{hausdorff_distance, InteriorSubset, MeshDomain, Point};
use crate::modular::{bulk_modular, ScalarField};
use crate::trace_solver::{h1_metric, objective, objective_gradient, solve, SolverConfig, VanishingConstraint};
use crate::young::YoungFunction;

#[derive(Debug, Clone, PartialEq)]
pub enum Obstacle {
    /// Clamp at individual vertices (points and other null sets).
    Vertices(Vec<usize>),
    /// Clamp at every vertex of the given triangles.
    Region(InteriorSubset),
}

impl Obstacle {
    fn clamp_mask(&self, mesh: &MeshDomain) -> Result<Vec<bool>> {
        let mut mask = vec![false; mesh.num_vertices()];
        match self {
            Obstacle::Vertices(vs) => {
                for &v in vs {
                    *mask.get_mut(v).ok_or_else(|| Error::Domain(format!("vertex {v} out of range")))? = true;
                }
            }
            Obstacle::Region(r) => {
                for v in r.vertices(mesh) {
                    mask[v] = true;
                }
            }
        }
        Ok(mask)
    }

    /// Trace-solver constraint for the same set: vertex clamps stay as they
    /// are, regions get the one-ring closure.
    pub fn vanishing_constraint(&self, mesh: &MeshDomain) -> Result<VanishingConstraint> {
        match self {
            Obstacle::Vertices(vs) => VanishingConstraint::vertices(mesh, vs.iter().copied()),
            Obstacle::Region(r) => Ok(VanishingConstraint::hole(mesh, r.clone())),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Obstacle::Vertices(v) => v.is_empty(),
            Obstacle::Region(r) => r.is_empty(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CapacityEstimate {
    pub value: f64,
    pub box_radius: f64,
    pub mesh_h: f64,
    pub potential: ScalarField,
    pub iterations: usize,
    pub converged: bool,
}

/// Vertex nearest to `p` (lowest index on ties).
pub fn nearest_vertex(mesh: &MeshDomain, p: Point) -> usize {
    let d = |v: &Point| (v[0] - p[0]).powi(2) + (v[1] - p[1]).powi(2);
    let mut best = 0;
    for (i, v) in mesh.vertices().iter().enumerate() {
        if d(v) < d(&mesh.vertices()[best]) {
            best = i;
        }
    }
    best
}

/// Triangles with every vertex in the closed disk `|x − c| ≤ r`.
pub fn disk_obstacle(mesh: &MeshDomain, c: Point, r: f64) -> InteriorSubset {
    let inside = |v: usize| {
        let p = mesh.vertices()[v];
        ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)).sqrt() <= r * (1.0 + 1e-12)
    };
    let tris = (0..mesh.num_triangles()).filter(|&t| mesh.triangles()[t].iter().all(|&v| inside(v)));
    InteriorSubset::new(mesh, tris).expect("indices come from the mesh")
}

/// Triangles whose centroid lies in the axis-aligned square of half-side `a` around `c`.
pub fn square_hole(mesh: &MeshDomain, c: Point, a: f64) -> InteriorSubset {
    InteriorSubset::from_centroids(mesh, |p| (p[0] - c[0]).abs() <= a && (p[1] - c[1]).abs() <= a)
}

struct Descent {
    phi: Vec<f64>,
    value: f64,
    iterations: usize,
    converged: bool,
}

/// Minimizes `Φ_G(φ) + Φ_G(|∇φ|)` by H¹-preconditioned descent. Dofs in
/// `clamp` keep their value; dofs in `lower` are projected onto `φ ≥ 1`.
fn minimize(
    g: &YoungFunction,
    mesh: &Arc<MeshDomain>,
    mut phi: Vec<f64>,
    clamp: &[bool],
    lower: Option<&[bool]>,
    config: &SolverConfig,
) -> Result<Descent> {
    let n = mesh.num_vertices();
    let eps = config.regularization(mesh);
    let project = |v: &mut [f64]| {
        if let Some(low) = lower {
            for (x, &l) in v.iter_mut().zip(low) {
                if l && *x < 1.0 {
                    *x = 1.0;
                }
            }
        }
    };
    project(&mut phi);
    let field = |v: Vec<f64>| ScalarField::new(mesh.clone(), v);
    let mut u = field(phi)?;
    let mut j = objective(g, &u);
    let mut history = vec![j];
    let mut pinned = clamp.to_vec();
    let mut metric = h1_metric(mesh, &pinned);
    let mut dir = vec![0.0; n];
    let mut step = config.step0;
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..config.max_iters {
        iterations = it + 1;
        let mut r = objective_gradient(g, &u, eps, None);
        if let Some(low) = lower {
            // active set: at the bound and pushed further down
            let active: Vec<bool> =
                (0..n).map(|i| clamp[i] || (low[i] && u.values()[i] <= 1.0 + 1e-12 && r[i] > 0.0)).collect();
            if active != pinned {
                pinned = active;
                metric = h1_metric(mesh, &pinned);
            }
        }
        for i in 0..n {
            if pinned[i] {
                r[i] = 0.0;
            }
        }
        pcg(&metric, &r, &mut dir, 1e-12, 4 * n);
        for i in 0..n {
            if pinned[i] {
                dir[i] = 0.0;
            }
        }
        let slope = dot(&r, &dir);
        if !(slope > 1e-20 * j.abs().max(1e-300)) {
            converged = true;
            break;
        }
        let mut s = step;
        let accepted = loop {
            let mut trial: Vec<f64> = u.values().iter().zip(&dir).map(|(u, d)| u - s * d).collect();
            project(&mut trial);
            let trial = field(trial)?;
            let jt = objective(g, &trial);
            if jt <= j - config.armijo_c * s * slope {
                break Some((trial, jt));
            }
            s *= config.armijo_shrink;
            if s < 1e-14 * config.step0 {
                break None;
            }
        };
        let Some((next, jn)) = accepted else {
            converged = slope <= 1e-9 * j.abs();
            break;
        };
        u = next;
        j = jn;
        history.push(j);
        step = (s * 2.0).min(config.step0);
        let k = history.len();
        if k > 10 && (history[k - 11] - j) <= config.tol_rel * j.abs() {
            converged = true;
            break;
        }
    }
    Ok(Descent { phi: u.into_values(), value: j, iterations, converged })
}

fn box_radius(mesh: &MeshDomain) -> f64 {
    mesh.vertices().iter().map(|v| v[0].hypot(v[1])).fold(0.0, f64::max)
}

fn check_obstacle(mesh: &MeshDomain, mask: &[bool]) -> Result<bool> {
    let full = mask.iter().all(|&m| m);
    if !full && mesh.boundary_edges().iter().flatten().any(|&v| mask[v]) {
        return Err(Error::Domain("obstacle touches the box boundary".into()));
    }
    Ok(full)
}

/// Capacity with `φ = 1` clamped on the obstacle dofs. An obstacle covering
/// the whole box is allowed and gives `Φ_G(1)·|B_R|`.
pub fn estimate_capacity(
    g: &YoungFunction,
    mesh: &Arc<MeshDomain>,
    obstacle: &Obstacle,
    config: &SolverConfig,
) -> Result<CapacityEstimate> {
    config.validate()?;
    let clamp = obstacle.clamp_mask(mesh)?;
    let full = check_obstacle(mesh, &clamp)?;
    let phi0: Vec<f64> = clamp.iter().map(|&c| if c { 1.0 } else { 0.0 }).collect();
    let d = if full {
        let u = ScalarField::new(mesh.clone(), phi0.clone())?;
        Descent { value: bulk_modular(g, &u), phi: phi0, iterations: 0, converged: true }
    } else {
        minimize(g, mesh, phi0, &clamp, None, config)?
    };
    Ok(CapacityEstimate {
        value: d.value,
        box_radius: box_radius(mesh),
        mesh_h: mesh.max_edge_length(),
        potential: ScalarField::new(mesh.clone(), d.phi)?,
        iterations: d.iterations,
        converged: d.converged,
    })
}

/// Capacity with the inequality `φ ≥ 1` on the obstacle, by projected
/// active-set descent started from the clamped potential.
pub fn estimate_capacity_relaxed(
    g: &YoungFunction,
    mesh: &Arc<MeshDomain>,
    obstacle: &Obstacle,
    config: &SolverConfig,
) -> Result<CapacityEstimate> {
    let clamped = estimate_capacity(g, mesh, obstacle, config)?;
    let low = obstacle.clamp_mask(mesh)?;
    if low.iter().all(|&m| m) {
        return Ok(clamped);
    }
    let none = vec![false; low.len()];
    let d = minimize(g, mesh, clamped.potential.values().to_vec(), &none, Some(&low), config)?;
    Ok(CapacityEstimate {
        value: d.value,
        potential: ScalarField::new(mesh.clone(), d.phi)?,
        iterations: clamped.iterations + d.iterations,
        converged: d.converged,
        ..clamped
    })
}

/// One obstacle seen both inside the trace-problem domain and inside a
/// capacity box of matching resolution.
#[derive(Debug, Clone)]
pub struct ObstacleCase {
    pub label: String,
    pub domain: Arc<MeshDomain>,
    pub obstacle: Obstacle,
    pub box_mesh: Arc<MeshDomain>,
    pub box_obstacle: Obstacle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvisibilityRow {
    pub label: String,
    pub h: f64,
    pub capacity: f64,
    pub s_a: f64,
    pub s_empty: f64,
    pub gap: f64,
}

impl InvisibilityRow {
    pub fn relative_gap(&self) -> f64 {
        self.gap / self.s_empty
    }
}

/// For each case: capacity of the obstacle, S with the obstacle as a hole,
/// S without it, and their gap. Cases run concurrently, rows keep input order.
pub fn invisibility_experiment(
    g: &YoungFunction,
    h: &YoungFunction,
    cases: &[ObstacleCase],
    config: &SolverConfig,
) -> Result<Vec<InvisibilityRow>> {
    cases
        .par_iter()
        .map(|c| {
            let capacity = if c.box_obstacle.is_empty() {
                0.0
            } else {
                estimate_capacity(g, &c.box_mesh, &c.box_obstacle, config)?.value
            };
            let s_empty = solve(g, h, &c.domain, &VanishingConstraint::none(&c.domain), config)?.s_value;
            let s_a = if c.obstacle.is_empty() {
                s_empty
            } else {
                solve(g, h, &c.domain, &c.obstacle.vanishing_constraint(&c.domain)?, config)?.s_value
            };
            Ok(InvisibilityRow {
                label: c.label.clone(),
                h: c.domain.max_edge_length(),
                capacity,
                s_a,
                s_empty,
                gap: (s_a - s_empty).abs(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityRow {
    pub dist_h: f64,
    pub s_a: f64,
    pub s_k: f64,
    pub gap: f64,
}

/// Hausdorff distance of perturbed holes to `base` (on hole vertex sets)
/// against the change of the trace constant.
pub fn hausdorff_continuity_experiment(
    g: &YoungFunction,
    h: &YoungFunction,
    mesh: &Arc<MeshDomain>,
    base: &InteriorSubset,
    perturbations: &[InteriorSubset],
    config: &SolverConfig,
) -> Result<Vec<ContinuityRow>> {
    let s_of = |a: &InteriorSubset| -> Result<f64> {
        Ok(solve(g, h, mesh, &VanishingConstraint::hole(mesh, a.clone()), config)?.s_value)
    };
    let s_a = s_of(base)?;
    let pts = base.vertex_points(mesh);
    perturbations
        .par_iter()
        .map(|a| {
            let dist_h = hausdorff_distance(&pts, &a.vertex_points(mesh))?;
            let s_k = if a == base { s_a } else { s_of(a)? };
            Ok(ContinuityRow { dist_h, s_a, s_k, gap: (s_k - s_a).abs() })
        })
        .collect()
}

/// `gap_{k+1} ≤ gap_k + slack` along the table.
pub fn gaps_nonincreasing(rows: &[ContinuityRow], slack: f64) -> bool {
    rows.windows(2).all(|w| w[1].gap <= w[0].gap + slack)
}
