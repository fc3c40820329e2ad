//! Discrete trace constant
//!
//! `S = inf { Φ_G(|∇u|) + Φ_G(u) : Φ_{H,∂Ω}(u) = 1, u = 0 on the constrained dofs }`
//!
//! computed by projected descent on the constraint manifold. Search
//! directions are H¹ Riesz representers of the tangential gradient
//! (`K d = r − λ b` with `K` the P1 stiffness-plus-mass matrix), steps are
//! chosen by Armijo backtracking on `J ∘ P` where `P` is the exact trace
//! renormalization.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{assemble_stiffness_mass, dot, pcg, CsrMatrix};
use crate::mesh::{BoundarySubset, InteriorSubset, MeshDomain};
use crate::modular::{bulk_modular, gradient_modular, normalize_trace, trace_modular, ScalarField};
use crate::quadrature::{EDGE_GAUSS3, TRI_ORDER4};
use crate::young::YoungFunction;

/// Which set the admissible fields vanish on.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintKind {
    None,
    Window(BoundarySubset),
    Hole(InteriorSubset),
    /// Individual vertices clamped to zero (point obstacles).
    Vertices(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct VanishingConstraint {
    kind: ConstraintKind,
    zero_dofs: Vec<usize>,
    mask: Vec<bool>,
}

impl VanishingConstraint {
    fn build(mesh: &MeshDomain, kind: ConstraintKind, zero: BTreeSet<usize>) -> Self {
        let mut mask = vec![false; mesh.num_vertices()];
        for &v in &zero {
            mask[v] = true;
        }
        Self { kind, zero_dofs: zero.into_iter().collect(), mask }
    }

    pub fn none(mesh: &MeshDomain) -> Self {
        Self::build(mesh, ConstraintKind::None, BTreeSet::new())
    }

    /// Zero dofs are the endpoints of the window edges.
    pub fn window(mesh: &MeshDomain, window: BoundarySubset) -> Self {
        let zero = mesh.edge_vertices(window.edges());
        Self::build(mesh, ConstraintKind::Window(window), zero)
    }

    /// Zero dofs are the vertices of the hole triangles and of every triangle
    /// sharing a vertex with them (one-ring closure).
    pub fn hole(mesh: &MeshDomain, hole: InteriorSubset) -> Self {
        let zero = one_ring_closure(mesh, &hole);
        Self::build(mesh, ConstraintKind::Hole(hole), zero)
    }

    pub fn vertices(mesh: &MeshDomain, vertices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let zero: BTreeSet<usize> = vertices.into_iter().collect();
        if zero.iter().any(|&v| v >= mesh.num_vertices()) {
            return Err(Error::Domain("clamped vertex out of range".into()));
        }
        let list = zero.iter().copied().collect();
        Ok(Self::build(mesh, ConstraintKind::Vertices(list), zero))
    }

    pub fn kind(&self) -> &ConstraintKind {
        &self.kind
    }

    pub fn zero_dofs(&self) -> &[usize] {
        &self.zero_dofs
    }

    pub fn is_zero(&self, v: usize) -> bool {
        self.mask[v]
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Measure of the prescribing subset (edge length or area); zero otherwise.
    pub fn achieved_measure(&self) -> f64 {
        match &self.kind {
            ConstraintKind::Window(w) => w.achieved_measure(),
            ConstraintKind::Hole(h) => h.achieved_measure(),
            _ => 0.0,
        }
    }

    /// Boundary edges with both endpoints free.
    pub fn free_boundary_edges(&self, mesh: &MeshDomain) -> usize {
        mesh.boundary_edges().iter().filter(|e| !self.mask[e[0]] && !self.mask[e[1]]).count()
    }
}

pub fn one_ring_closure(mesh: &MeshDomain, hole: &InteriorSubset) -> BTreeSet<usize> {
    let core = hole.vertices(mesh);
    let mut zero = core.clone();
    for &v in &core {
        for &t in mesh.vertex_triangles(v) {
            zero.extend(mesh.triangles()[t]);
        }
    }
    zero
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Regularization of `g(q)/q`, relative to the mesh diameter.
    pub eps_reg: f64,
    pub step0: f64,
    pub armijo_c: f64,
    pub armijo_shrink: f64,
    pub max_iters: usize,
    /// Stop when J decreases by less than this (relative) over 10 iterations.
    pub tol_rel: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { eps_reg: 1e-8, step0: 1.0, armijo_c: 1e-4, armijo_shrink: 0.5, max_iters: 3000, tol_rel: 1e-10, seed: 0 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [self.eps_reg, self.step0, self.armijo_c, self.armijo_shrink, self.tol_rel];
        if positive.iter().any(|v| !(*v > 0.0)) || self.max_iters == 0 {
            return Err(Error::Domain("solver parameters must be positive".into()));
        }
        if self.armijo_c > 0.5 || self.armijo_shrink >= 1.0 {
            return Err(Error::Domain("need armijo_c in (0, 0.5] and armijo_shrink in (0, 1)".into()));
        }
        Ok(())
    }

    pub fn regularization(&self, mesh: &MeshDomain) -> f64 {
        self.eps_reg * mesh.diameter()
    }
}

/// Result of one trace-constant solve.
#[derive(Debug, Clone)]
pub struct TraceSolve {
    pub extremal: ScalarField,
    pub s_value: f64,
    pub multiplier: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// J after every accepted step.
    pub history: Vec<f64>,
    pub eps: f64,
    pub constraint: VanishingConstraint,
}

/// `J(u) = Φ_G(|∇u|) + Φ_G(u)`.
pub fn objective(g: &YoungFunction, u: &ScalarField) -> f64 {
    gradient_modular(g, u) + bulk_modular(g, u)
}

/// Nodal covector `∫ g(q_ε)/q_ε ∇u·∇φᵢ + g(|u|_ε)/|u|_ε u φᵢ`, zero on the
/// constrained dofs.
pub fn objective_gradient(g: &YoungFunction, u: &ScalarField, eps: f64, constraint: Option<&VanishingConstraint>) -> Vec<f64> {
    let mesh = u.mesh();
    let vals = u.values();
    let mut out = vec![0.0; vals.len()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.areas()[t];
        let gr = &mesh.basis_gradients()[t];
        let d = u.gradient(t);
        let q = (d[0] * d[0] + d[1] * d[1] + eps * eps).sqrt();
        let coef = g.deriv(q) / q;
        let (a, b, c) = (vals[tri[0]], vals[tri[1]], vals[tri[2]]);
        let mut local = [0.0; 3];
        for k in 0..3 {
            local[k] = coef * area * (d[0] * gr[k][0] + d[1] * gr[k][1]);
        }
        for (l, w) in &TRI_ORDER4 {
            let uq = l[0] * a + l[1] * b + l[2] * c;
            let m = (uq * uq + eps * eps).sqrt();
            let f = area * w * g.deriv(m) / m * uq;
            for k in 0..3 {
                local[k] += f * l[k];
            }
        }
        for k in 0..3 {
            out[tri[k]] += local[k];
        }
    }
    if let Some(c) = constraint {
        for &v in c.zero_dofs() {
            out[v] = 0.0;
        }
    }
    out
}

/// Gradient of the trace modular, `∫_∂Ω h(|u|_ε)/|u|_ε u φᵢ ds`.
pub fn constraint_gradient(h: &YoungFunction, u: &ScalarField, eps: f64, constraint: Option<&VanishingConstraint>) -> Vec<f64> {
    let mesh = u.mesh();
    let vals = u.values();
    let mut out = vec![0.0; vals.len()];
    for (e, &[i, j]) in mesh.boundary_edges().iter().enumerate() {
        let len = mesh.edge_lengths()[e];
        for &(x, w) in &EDGE_GAUSS3 {
            let uq = (1.0 - x) * vals[i] + x * vals[j];
            let m = (uq * uq + eps * eps).sqrt();
            let f = len * w * h.deriv(m) / m * uq;
            out[i] += f * (1.0 - x);
            out[j] += f * x;
        }
    }
    if let Some(c) = constraint {
        for &v in c.zero_dofs() {
            out[v] = 0.0;
        }
    }
    out
}

/// H¹ metric `∫ ∇φi·∇φj + φi φj` with constrained rows pinned to the identity.
pub(crate) fn h1_metric(mesh: &MeshDomain, mask: &[bool]) -> CsrMatrix {
    let nt = mesh.num_triangles();
    let mut k = CsrMatrix::mesh_pattern(mesh);
    assemble_stiffness_mass(mesh, &vec![1.0; nt], &vec![1.0; nt], &mut k);
    for (v, &z) in mask.iter().enumerate() {
        if z {
            k.pin(v);
        }
    }
    k
}

fn initial_field(mesh: &Arc<MeshDomain>, constraint: &VanishingConstraint, seed: u64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..mesh.num_vertices())
        .map(|v| {
            let jitter: f64 = rng.gen_range(-1.0..1.0);
            if constraint.is_zero(v) {
                0.0
            } else {
                1.0 + 1e-6 * jitter
            }
        })
        .collect();
    ScalarField::new(mesh.clone(), values).expect("finite initial field")
}

pub fn solve(
    g: &YoungFunction,
    h: &YoungFunction,
    mesh: &Arc<MeshDomain>,
    constraint: &VanishingConstraint,
    config: &SolverConfig,
) -> Result<TraceSolve> {
    solve_from(g, h, mesh, constraint, config, None)
}

/// Like [`solve`], starting from `init` (zeroed on the constrained dofs and
/// renormalized) instead of the constant field.
pub fn solve_from(
    g: &YoungFunction,
    h: &YoungFunction,
    mesh: &Arc<MeshDomain>,
    constraint: &VanishingConstraint,
    config: &SolverConfig,
    init: Option<&ScalarField>,
) -> Result<TraceSolve> {
    config.validate()?;
    if constraint.mask().len() != mesh.num_vertices() {
        return Err(Error::Domain("constraint built on a different mesh".into()));
    }
    if constraint.free_boundary_edges(mesh) == 0 {
        return Err(Error::EmptyAdmissible("no boundary edge is left free".into()));
    }
    let eps = config.regularization(mesh);
    let mask = constraint.mask();
    let start = match init {
        Some(f) => {
            let mut v = f.values().to_vec();
            for &z in constraint.zero_dofs() {
                v[z] = 0.0;
            }
            let field = ScalarField::new(mesh.clone(), v)?;
            if trace_modular(h, &field) > 0.0 {
                field
            } else {
                initial_field(mesh, constraint, config.seed)
            }
        }
        None => initial_field(mesh, constraint, config.seed),
    };
    let mut u = normalize_trace(h, &start)?;
    let metric = h1_metric(mesh, mask);
    let n = mesh.num_vertices();

    let mut j = objective(g, &u);
    let mut history = vec![j];
    let mut step = config.step0;
    let mut dir = vec![0.0; n];
    let mut converged = false;
    let mut iterations = 0;
    for it in 0..config.max_iters {
        iterations = it + 1;
        let r = objective_gradient(g, &u, eps, Some(constraint));
        let b = constraint_gradient(h, &u, eps, Some(constraint));
        let lam = dot(&r, u.values()) / dot(&b, u.values());
        let tangent: Vec<f64> = r.iter().zip(&b).map(|(r, b)| r - lam * b).collect();
        pcg(&metric, &tangent, &mut dir, 1e-10, 4 * n);
        for &z in constraint.zero_dofs() {
            dir[z] = 0.0;
        }
        let slope = dot(&tangent, &dir);
        if !(slope > 1e-20 * j.abs().max(1e-300)) {
            converged = true;
            break;
        }
        let mut s = step;
        let accepted = loop {
            let trial: Vec<f64> = u.values().iter().zip(&dir).map(|(u, d)| u - s * d).collect();
            let trial = ScalarField::new(mesh.clone(), trial)?;
            if let Ok(p) = normalize_trace(h, &trial) {
                let jt = objective(g, &p);
                if jt <= j - config.armijo_c * s * slope {
                    break Some((p, jt));
                }
            }
            s *= config.armijo_shrink;
            if s < 1e-14 * config.step0 {
                break None;
            }
        };
        let Some((next, jn)) = accepted else {
            // no detectable decrease left: stationary up to roundoff
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

    // Minimizers can be taken nonnegative.
    let extremal = normalize_trace(h, &u.abs())?;
    let s_value = objective(g, &extremal);
    let mut solve = TraceSolve {
        extremal,
        s_value,
        multiplier: f64::NAN,
        kkt_residual: f64::NAN,
        iterations,
        converged,
        history,
        eps,
        constraint: constraint.clone(),
    };
    if let Ok(k) = kkt_report(g, h, &solve) {
        solve.multiplier = k.multiplier;
        solve.kkt_residual = k.residual;
    }
    Ok(solve)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktReport {
    pub multiplier: f64,
    pub residual: f64,
}

/// Least-squares multiplier `μ = ⟨r,b⟩/⟨b,b⟩` over the free dofs and the
/// relative residual `‖r − μb‖/‖r‖`.
pub fn kkt_report(g: &YoungFunction, h: &YoungFunction, solve: &TraceSolve) -> Result<KktReport> {
    let u = &solve.extremal;
    let r = objective_gradient(g, u, solve.eps, Some(&solve.constraint));
    let b = constraint_gradient(h, u, solve.eps, Some(&solve.constraint));
    let bb = dot(&b, &b);
    if !(bb > 1e-300) {
        return Err(Error::DegenerateMultiplier);
    }
    let multiplier = dot(&r, &b) / bb;
    let rr = dot(&r, &r).sqrt();
    let res: f64 = r.iter().zip(&b).map(|(r, b)| (r - multiplier * b).powi(2)).sum::<f64>().sqrt();
    Ok(KktReport { multiplier, residual: if rr > 0.0 { res / rr } else { 0.0 } })
}

impl TraceSolve {
    /// Structured-text summary: one `key = value` per line.
    pub fn report_text(&self, config: &SolverConfig) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "s_value = {:.16e}", self.s_value);
        let _ = writeln!(s, "multiplier = {:.16e}", self.multiplier);
        let _ = writeln!(s, "kkt_residual = {:.16e}", self.kkt_residual);
        let _ = writeln!(s, "iterations = {}", self.iterations);
        let _ = writeln!(s, "converged = {}", self.converged);
        let _ = writeln!(s, "achieved_measure = {:.16e}", self.constraint.achieved_measure());
        let _ = writeln!(s, "zero_dofs = {}", self.constraint.zero_dofs().len());
        let _ = writeln!(s, "eps = {:.16e}", self.eps);
        let _ = writeln!(s, "config.eps_reg = {:e}", config.eps_reg);
        let _ = writeln!(s, "config.step0 = {:e}", config.step0);
        let _ = writeln!(s, "config.armijo_c = {:e}", config.armijo_c);
        let _ = writeln!(s, "config.armijo_shrink = {:e}", config.armijo_shrink);
        let _ = writeln!(s, "config.max_iters = {}", config.max_iters);
        let _ = writeln!(s, "config.tol_rel = {:e}", config.tol_rel);
        let _ = writeln!(s, "config.seed = {}", config.seed);
        s
    }

    /// Boundary measure of edges on which the extremal vanishes (below 1e-10).
    pub fn zero_window_measure(&self) -> f64 {
        let mesh = self.extremal.mesh();
        let v = self.extremal.values();
        mesh.boundary_edges()
            .iter()
            .zip(mesh.edge_lengths())
            .filter(|(e, _)| v[e[0]].abs() < 1e-10 && v[e[1]].abs() < 1e-10)
            .map(|(_, l)| l)
            .sum()
    }

    /// Area of triangles on which the extremal vanishes (below 1e-10).
    pub fn zero_area(&self) -> f64 {
        let mesh = self.extremal.mesh();
        let v = self.extremal.values();
        mesh.triangles()
            .iter()
            .zip(mesh.areas())
            .filter(|(t, _)| t.iter().all(|&i| v[i].abs() < 1e-10))
            .map(|(_, a)| a)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{make_disk, make_square};

    fn square(h: f64) -> Arc<MeshDomain> {
        Arc::new(make_square(1.0, h).unwrap())
    }

    #[test]
    fn objective_cases() {
        let g = YoungFunction::power(2.0);
        let m = square(0.25);
        assert_eq!(objective(&g, &ScalarField::zeros(m.clone())), 0.0);
        let u = ScalarField::from_fn(m, |p| p[0]);
        assert!((objective(&g, &u) - 2.0 / 3.0).abs() < 1e-10);
        assert_eq!(objective(&g, &u), objective(&g, &u.scaled(-1.0)));
    }

    #[test]
    fn zero_field_has_zero_gradient() {
        let g = YoungFunction::power(3.0);
        let m = square(0.25);
        let r = objective_gradient(&g, &ScalarField::zeros(m), 1e-8, None);
        assert!(r.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn hole_closure_is_one_ring() {
        let m = make_disk(1.0, 0.2).unwrap();
        // the six centre triangles; their one ring reaches ring 2
        let hole = InteriorSubset::new(&m, 0..6).unwrap();
        let c = VanishingConstraint::hole(&m, hole);
        assert_eq!(c.zero_dofs().len(), 1 + 6 + 12);
    }

    #[test]
    fn fully_closed_window_is_rejected() {
        let m = Arc::new(make_disk(1.0, 0.3).unwrap());
        let all = BoundarySubset::new(&m, 0..m.boundary_edges().len()).unwrap();
        let c = VanishingConstraint::window(&m, all);
        let g = YoungFunction::power(2.0);
        let err = solve(&g, &g, &m, &c, &SolverConfig::default()).unwrap_err();
        assert!(matches!(err, Error::EmptyAdmissible(_)));
    }

    #[test]
    fn config_validation() {
        let mut c = SolverConfig::default();
        assert!(c.validate().is_ok());
        c.armijo_c = 0.7;
        assert!(c.validate().is_err());
        c = SolverConfig { max_iters: 0, ..SolverConfig::default() };
        assert!(c.validate().is_err());
    }
}
