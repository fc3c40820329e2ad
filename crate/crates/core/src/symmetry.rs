//! Circular symmetrization on disk meshes, distribution functions of P1
//! fields and the layer-cake representation of modulars.
//!
//! `symmetrize` samples the field on a polar grid (64 rings, 256 angles),
//! sorts each ring in decreasing order and lays the values out by angular
//! distance from the axis, so every ring becomes a cap profile with the same
//! multiset of values.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{BoundarySubset, MeshDomain, Point};
use crate::modular::{bulk_modular, gradient_modular, trace_modular, ScalarField};
use crate::shape_opt::{arc_oracle, optimize_window, Shape};
use crate::trace_solver::SolverConfig;
use crate::young::YoungFunction;

pub const RADIAL_BINS: usize = 64;
pub const ANGLES: usize = 256;
pub const DEFAULT_THRESHOLDS: usize = 256;

/// `N ω_N^{1/N}` for `N = 2`: the isoperimetric constant of the plane.
pub const ISOPERIMETRIC_GAMMA: f64 = 3.544_907_701_811_032; // 2√π

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    Area,
    Arclength,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionFunction {
    pub thresholds: Vec<f64>,
    /// `ρ(t) = μ{|u| > t}` at each threshold.
    pub measures: Vec<f64>,
    /// `ρ` at the midpoints of consecutive thresholds.
    pub midpoint_measures: Vec<f64>,
    pub kind: MeasureKind,
    pub total_measure: f64,
}

impl DistributionFunction {
    pub fn is_nonincreasing(&self) -> bool {
        self.measures.windows(2).all(|w| w[1] <= w[0])
    }

    /// Largest pointwise gap to `other` (same thresholds) relative to the total measure.
    pub fn max_relative_gap(&self, other: &DistributionFunction) -> f64 {
        self.measures.iter().zip(&other.measures).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            / self.total_measure.max(other.total_measure)
    }
}

/// Area of `{λ > t}` for the affine `λ` with vertex values `v` on a triangle of area `area`.
fn triangle_superlevel(mut v: [f64; 3], area: f64, t: f64) -> f64 {
    v.sort_by(f64::total_cmp);
    let [a, b, c] = v;
    if t >= c {
        0.0
    } else if t < a {
        area
    } else if t >= b {
        area * (c - t) * (c - t) / ((c - a) * (c - b))
    } else {
        area * (1.0 - (t - a) * (t - a) / ((b - a) * (c - a)))
    }
}

fn segment_superlevel(a: f64, b: f64, len: f64, t: f64) -> f64 {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if t >= hi {
        0.0
    } else if t < lo {
        len
    } else {
        len * (hi - t) / (hi - lo)
    }
}

/// Exact measure of `{|u| > t}` for the P1 interpolant, `t ≥ 0`.
pub fn superlevel_measure(u: &ScalarField, kind: MeasureKind, t: f64) -> f64 {
    let mesh = u.mesh();
    let v = u.values();
    match kind {
        MeasureKind::Area => mesh
            .triangles()
            .iter()
            .zip(mesh.areas())
            .map(|(tri, &a)| {
                let p = tri.map(|i| v[i]);
                triangle_superlevel(p, a, t) + triangle_superlevel(p.map(|x| -x), a, t)
            })
            .sum(),
        MeasureKind::Arclength => mesh
            .boundary_edges()
            .iter()
            .zip(mesh.edge_lengths())
            .map(|(&[i, j], &l)| segment_superlevel(v[i], v[j], l, t) + segment_superlevel(-v[i], -v[j], l, t))
            .sum(),
    }
}

fn total_measure(mesh: &MeshDomain, kind: MeasureKind) -> f64 {
    match kind {
        MeasureKind::Area => mesh.area(),
        MeasureKind::Arclength => mesh.perimeter(),
    }
}

/// Distribution function on `DEFAULT_THRESHOLDS` equispaced levels spanning `[0, max|u|]`.
pub fn distribution(u: &ScalarField, kind: MeasureKind) -> DistributionFunction {
    let top = u.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let n = DEFAULT_THRESHOLDS;
    let grid: Vec<f64> = (0..n).map(|i| top * i as f64 / (n - 1) as f64).collect();
    distribution_on(u, kind, &grid).expect("grid is increasing")
}

/// Distribution function on caller-supplied nondecreasing, nonnegative thresholds.
pub fn distribution_on(u: &ScalarField, kind: MeasureKind, thresholds: &[f64]) -> Result<DistributionFunction> {
    if thresholds.is_empty() || thresholds[0] < 0.0 || thresholds.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Domain("thresholds must be nonnegative and nondecreasing".into()));
    }
    let measures = thresholds.par_iter().map(|&t| superlevel_measure(u, kind, t)).collect();
    let midpoint_measures =
        thresholds.par_windows(2).map(|w| superlevel_measure(u, kind, 0.5 * (w[0] + w[1]))).collect();
    Ok(DistributionFunction {
        thresholds: thresholds.to_vec(),
        measures,
        midpoint_measures,
        kind,
        total_measure: total_measure(u.mesh(), kind),
    })
}

/// `∫ G′(t) ρ(t) dt` as the Stieltjes midpoint sum `Σ ρ(t_mid)(G(t_{i+1}) − G(t_i))`,
/// which is exact for piecewise-constant fields.
pub fn layer_cake(g: &YoungFunction, dist: &DistributionFunction) -> f64 {
    let t = &dist.thresholds;
    let head = dist.measures.first().map_or(0.0, |&m| m * g.value(t[0]));
    head + t.windows(2).zip(&dist.midpoint_measures).map(|(w, &rho)| rho * (g.value(w[1]) - g.value(w[0]))).sum::<f64>()
}

/// Center and radius of a mesh whose boundary vertices lie on one circle.
pub fn disk_geometry(mesh: &MeshDomain) -> Result<(Point, f64)> {
    let bv: Vec<Point> = mesh.boundary_edges().iter().map(|e| mesh.vertices()[e[0]]).collect();
    let n = bv.len() as f64;
    let c = [bv.iter().map(|p| p[0]).sum::<f64>() / n, bv.iter().map(|p| p[1]).sum::<f64>() / n];
    let radii: Vec<f64> = bv.iter().map(|p| (p[0] - c[0]).hypot(p[1] - c[1])).collect();
    let r = radii.iter().sum::<f64>() / n;
    if radii.iter().any(|&x| (x - r).abs() > 1e-6 * r) || mesh.boundary_loop().len() != bv.len() {
        return Err(Error::Domain("symmetrization needs a disk mesh".into()));
    }
    Ok(([c[0], c[1]], r))
}

fn polar_index(ring: usize, angle: usize) -> usize {
    1 + (ring - 1) * ANGLES + angle % ANGLES
}

/// Structured polar mesh: a center vertex and `RADIAL_BINS` rings of `ANGLES`
/// vertices, angle 0 pointing along `axis_angle`.
pub fn polar_mesh(center: Point, radius: f64, axis_angle: f64) -> Result<MeshDomain> {
    let mut vertices = vec![center];
    for i in 1..=RADIAL_BINS {
        let r = radius * i as f64 / RADIAL_BINS as f64;
        for j in 0..ANGLES {
            let th = axis_angle + 2.0 * PI * j as f64 / ANGLES as f64;
            vertices.push([center[0] + r * th.cos(), center[1] + r * th.sin()]);
        }
    }
    let mut triangles = Vec::with_capacity(ANGLES * (2 * RADIAL_BINS - 1));
    for j in 0..ANGLES {
        triangles.push([0, polar_index(1, j), polar_index(1, j + 1)]);
    }
    for i in 1..RADIAL_BINS {
        for j in 0..ANGLES {
            let (a, b) = (polar_index(i, j), polar_index(i + 1, j));
            let (c, d) = (polar_index(i + 1, j + 1), polar_index(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    let edges = (0..ANGLES).map(|j| [polar_index(RADIAL_BINS, j), polar_index(RADIAL_BINS, j + 1)]).collect();
    MeshDomain::new(vertices, triangles, edges)
}

/// Angle slots ordered by distance from the axis: 0, 1, −1, 2, −2, …
fn cap_order() -> Vec<usize> {
    let mut order = vec![0];
    for k in 1..=ANGLES / 2 {
        order.push(k);
        if ANGLES - k != k {
            order.push(ANGLES - k);
        }
    }
    order
}

#[derive(Debug, Clone)]
pub struct SymmetrizedField {
    pub center: Point,
    pub radius: f64,
    pub axis_angle: f64,
    /// Ring radii, increasing.
    pub radial_bins: Vec<f64>,
    /// Per ring, the sampled values sorted in decreasing order.
    pub profiles: Vec<Vec<f64>>,
    /// The symmetrized field on the polar mesh.
    pub field: ScalarField,
    /// The unsymmetrized samples on the same polar mesh.
    pub sampled: ScalarField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrizationRow {
    pub bin: usize,
    pub radius: f64,
    pub level: f64,
    pub arc_measure: f64,
    pub cap_half_angle: f64,
}

impl SymmetrizedField {
    /// Half-angle of the cap `{u^♯ > level}` on ring `bin` (1-based).
    pub fn cap_half_angle(&self, bin: usize, level: f64) -> f64 {
        let above = self.profiles[bin - 1].iter().filter(|&&v| v > level).count();
        PI * above as f64 / ANGLES as f64
    }

    /// Arc measure of `{u > level}` on ring `bin` from the original samples.
    pub fn arc_measure(&self, bin: usize, level: f64) -> f64 {
        let r = self.radial_bins[bin - 1];
        let above = (0..ANGLES).filter(|&j| self.sampled.values()[polar_index(bin, j)] > level).count();
        2.0 * PI * r * above as f64 / ANGLES as f64
    }

    /// `levels` equispaced levels per ring between the ring minimum and maximum.
    pub fn report_rows(&self, levels: usize) -> Vec<SymmetrizationRow> {
        let mut rows = Vec::with_capacity(RADIAL_BINS * levels);
        for bin in 1..=RADIAL_BINS {
            let p = &self.profiles[bin - 1];
            let (hi, lo) = (p[0], p[ANGLES - 1]);
            for k in 0..levels {
                let level = lo + (hi - lo) * k as f64 / levels.max(2).saturating_sub(1) as f64;
                rows.push(SymmetrizationRow {
                    bin,
                    radius: self.radial_bins[bin - 1],
                    level,
                    arc_measure: self.arc_measure(bin, level),
                    cap_half_angle: self.cap_half_angle(bin, level),
                });
            }
        }
        rows
    }
}

/// Circular symmetrization about the ray from the disk center along `axis`.
pub fn symmetrize(u: &ScalarField, axis: Point) -> Result<SymmetrizedField> {
    let (center, radius) = disk_geometry(u.mesh())?;
    if !(axis[0].hypot(axis[1]) > 0.0) {
        return Err(Error::Domain("axis must be nonzero".into()));
    }
    let axis_angle = axis[1].atan2(axis[0]);
    let polar = Arc::new(polar_mesh(center, radius, axis_angle)?);
    let scale = u.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // interpolation roundoff must not create a trace where u has none
    let samples: Vec<f64> =
        u.eval_many(polar.vertices()).into_iter().map(|v| if v.abs() <= 1e-12 * scale { 0.0 } else { v }).collect();
    let order = cap_order();
    let profiles: Vec<Vec<f64>> = (1..=RADIAL_BINS)
        .into_par_iter()
        .map(|i| {
            let mut ring: Vec<f64> = (0..ANGLES).map(|j| samples[polar_index(i, j)]).collect();
            ring.sort_by(|a, b| b.total_cmp(a));
            ring
        })
        .collect();
    let mut values = vec![samples[0]; samples.len()];
    for (i, prof) in profiles.iter().enumerate() {
        for (v, &slot) in prof.iter().zip(&order) {
            values[polar_index(i + 1, slot)] = *v;
        }
    }
    Ok(SymmetrizedField {
        center,
        radius,
        axis_angle,
        radial_bins: (1..=RADIAL_BINS).map(|i| radius * i as f64 / RADIAL_BINS as f64).collect(),
        profiles,
        field: ScalarField::new(polar.clone(), values)?,
        sampled: ScalarField::new(polar, samples)?,
    })
}

/// Length of `{u = t} ∪ {u = −t}` inside the domain: the relative perimeter
/// of `{|u| > t}` for the P1 interpolant, `t > 0`.
pub fn level_perimeter(u: &ScalarField, t: f64) -> f64 {
    let mesh = u.mesh();
    let v = u.values();
    let mut total = 0.0;
    for tri in mesh.triangles() {
        for level in [t, -t] {
            let mut pts = Vec::with_capacity(2);
            for k in 0..3 {
                let (i, j) = (tri[k], tri[(k + 1) % 3]);
                if (v[i] > level) != (v[j] > level) {
                    let s = (level - v[i]) / (v[j] - v[i]);
                    let (a, b) = (mesh.vertices()[i], mesh.vertices()[j]);
                    pts.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
                }
            }
            if let [p, q] = pts[..] {
                total += (p[0] - q[0]).hypot(p[1] - q[1]);
            }
        }
    }
    total
}

/// Checks `P({|u| > t}) ≥ γ ρ(t)^{1/2}` at the interior levels of the
/// default threshold grid.
pub fn perimeter_hypothesis(u: &ScalarField) -> bool {
    let d = distribution(u, MeasureKind::Area);
    let n = d.thresholds.len();
    (1..n - 1).all(|i| {
        let rho = d.measures[i];
        rho == 0.0 || level_perimeter(u, d.thresholds[i]) >= ISOPERIMETRIC_GAMMA * rho.sqrt() * (1.0 - 1e-9)
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyaSzego {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Dirichlet modulars of `u^♯` and `u`; holds when `lhs ≤ 1.02·rhs`.
pub fn polya_szego_check(g: &YoungFunction, u: &ScalarField, u_sharp: &SymmetrizedField) -> PolyaSzego {
    let lhs = gradient_modular(g, &u_sharp.field);
    let rhs = gradient_modular(g, u);
    PolyaSzego { lhs, rhs, holds: lhs <= rhs * 1.02 }
}

/// Relative differences of the symmetrization identities for one field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryIdentities {
    pub area_distribution_gap: f64,
    pub arclength_distribution_gap: f64,
    pub bulk_gap: f64,
    pub trace_gap: f64,
    pub layer_cake_gap: f64,
}

impl SymmetryIdentities {
    pub fn max_gap(&self) -> f64 {
        [self.area_distribution_gap, self.arclength_distribution_gap, self.bulk_gap, self.trace_gap, self.layer_cake_gap]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Equimeasurability, modular preservation and layer-cake agreement.
pub fn symmetry_identities(g: &YoungFunction, h: &YoungFunction, u: &ScalarField, s: &SymmetrizedField) -> SymmetryIdentities {
    let area = distribution(u, MeasureKind::Area);
    let arc = distribution(u, MeasureKind::Arclength);
    let area_sharp = distribution_on(&s.field, MeasureKind::Area, &area.thresholds).expect("valid grid");
    let arc_sharp = distribution_on(&s.field, MeasureKind::Arclength, &arc.thresholds).expect("valid grid");
    let bulk = bulk_modular(g, u);
    SymmetryIdentities {
        area_distribution_gap: area.max_relative_gap(&area_sharp),
        arclength_distribution_gap: arc.max_relative_gap(&arc_sharp),
        bulk_gap: rel(bulk_modular(g, &s.field), bulk),
        trace_gap: rel(trace_modular(h, &s.field), trace_modular(h, u)),
        layer_cake_gap: rel(layer_cake(g, &area), bulk),
    }
}

/// Test fields on the unit disk: radial, radial-times-angular bumps, a
/// field with nonzero trace and an off-axis cap.
pub fn shipped_fields(mesh: &Arc<MeshDomain>) -> Vec<(&'static str, ScalarField)> {
    let polar = |f: fn(f64, f64) -> f64| {
        // snap roundoff so that fields meant to vanish on the circle do
        ScalarField::from_fn(mesh.clone(), move |p| {
            let v = f(p[0].hypot(p[1]), p[1].atan2(p[0]));
            if v.abs() < 1e-12 { 0.0 } else { v }
        })
    };
    vec![
        ("radial", polar(|r, _| 1.0 - r * r)),
        ("bump_cos", polar(|r, th| (1.0 - r * r) * (1.0 + 0.8 * (th - 0.7).cos()))),
        ("bump_exp", polar(|r, th| (1.0 - r * r).powi(2) * (th - 2.0).cos().exp())),
        ("annular", polar(|r, th| r * (1.0 - r) * (2.0 + th.sin() + 0.5 * (2.0 * th).cos()))),
        ("trace_tilt", polar(|r, th| 1.0 + 0.5 * r * th.cos() + 0.2 * r * r * (3.0 * th).sin())),
        ("cap_offaxis", polar(|r, th| (0.5 + r) * (1.2 + (th + 1.0).cos()))),
    ]
}

#[derive(Debug, Clone)]
pub struct CapSymmetryReport {
    pub window: BoundarySubset,
    pub defect: usize,
    pub s_window: f64,
    pub s_arc: f64,
    pub best_arc: BoundarySubset,
    /// `|S_window − S_arc| / S_arc`.
    pub gap: f64,
    pub passed: bool,
}

/// Optimized window against the best contiguous arc of the same measure.
pub fn cap_symmetry_check(
    g: &YoungFunction,
    h: &YoungFunction,
    mesh: &Arc<MeshDomain>,
    alpha: f64,
    config: &SolverConfig,
) -> Result<CapSymmetryReport> {
    disk_geometry(mesh)?;
    let opt = optimize_window(g, h, mesh, alpha, config)?;
    let Shape::Window(window) = opt.best_shape else {
        unreachable!("optimize_window returns windows")
    };
    let oracle = arc_oracle(g, h, mesh, alpha, config)?;
    let defect = window.runs(mesh).saturating_sub(1);
    let gap = (opt.s_alpha - oracle.s_value).abs() / oracle.s_value;
    Ok(CapSymmetryReport {
        defect,
        s_window: opt.s_alpha,
        s_arc: oracle.s_value,
        best_arc: oracle.best_arc,
        gap,
        passed: defect <= 1 && gap <= 0.03,
        window,
    })
}
