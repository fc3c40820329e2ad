//! Modulars `Φ_{G,Ω}(u)`, `Φ_{G,Ω}(|∇u|)`, `Φ_{H,∂Ω}(u)` and Luxemburg
//! norms of P1 fields.
//!
//! Triangles use the symmetric degree-4 rule, boundary edges 3-point Gauss.
//! Sums run in element order so results are reproducible bit for bit.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::{Locator, MeshDomain, Point};
use crate::quadrature::{EDGE_GAUSS3, TRI_ORDER4};
use crate::young::YoungFunction;

/// Nodal P1 function on a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    mesh: Arc<MeshDomain>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(mesh: Arc<MeshDomain>, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.num_vertices() {
            return Err(Error::Domain(format!(
                "field has {} values, mesh has {} vertices",
                values.len(),
                mesh.num_vertices()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("field has non-finite values".into()));
        }
        Ok(Self { mesh, values })
    }

    pub fn zeros(mesh: Arc<MeshDomain>) -> Self {
        let n = mesh.num_vertices();
        Self { mesh, values: vec![0.0; n] }
    }

    pub fn from_fn(mesh: Arc<MeshDomain>, f: impl Fn(Point) -> f64) -> Self {
        let values = mesh.vertices().iter().map(|&p| f(p)).collect();
        Self { mesh, values }
    }

    pub fn mesh(&self) -> &Arc<MeshDomain> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { mesh: self.mesh.clone(), values: self.values.iter().map(|v| v * s).collect() }
    }

    pub fn abs(&self) -> Self {
        Self { mesh: self.mesh.clone(), values: self.values.iter().map(|v| v.abs()).collect() }
    }

    /// Constant gradient of the interpolant on triangle `t`.
    pub fn gradient(&self, t: usize) -> Point {
        let tri = self.mesh.triangles()[t];
        let g = &self.mesh.basis_gradients()[t];
        let mut out = [0.0; 2];
        for k in 0..3 {
            out[0] += self.values[tri[k]] * g[k][0];
            out[1] += self.values[tri[k]] * g[k][1];
        }
        out
    }

    /// Interpolated value at a point (projected onto the mesh when outside).
    pub fn eval_at(&self, p: Point) -> f64 {
        let (t, l) = self.mesh.locate(p);
        let tri = self.mesh.triangles()[t];
        (0..3).map(|k| l[k] * self.values[tri[k]]).sum()
    }

    /// Interpolated values at many points, sharing one point locator.
    pub fn eval_many(&self, points: &[Point]) -> Vec<f64> {
        let loc = Locator::new(&self.mesh);
        points
            .iter()
            .map(|&p| {
                let (t, l) = loc.locate(p);
                let tri = self.mesh.triangles()[t];
                (0..3).map(|k| l[k] * self.values[tri[k]]).sum()
            })
            .collect()
    }

    pub fn vanishes_on_boundary(&self) -> bool {
        self.mesh
            .boundary_edges()
            .iter()
            .flatten()
            .all(|&v| self.values[v] == 0.0)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::with_capacity(24 * (self.values.len() + 1));
        let _ = writeln!(s, "{}", self.values.len());
        for v in &self.values {
            let _ = writeln!(s, "{v:.16e}");
        }
        s
    }

    pub fn from_text(mesh: Arc<MeshDomain>, text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let count: usize = lines
            .next()
            .ok_or_else(|| Error::Format("empty field file".into()))?
            .parse()
            .map_err(|_| Error::Format("bad vertex count header".into()))?;
        let values = lines
            .map(|l| l.parse::<f64>().map_err(|_| Error::Format(format!("bad value '{l}'"))))
            .collect::<Result<Vec<_>>>()?;
        if values.len() != count {
            return Err(Error::Format(format!("header says {count} values, found {}", values.len())));
        }
        Self::new(mesh, values)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(mesh: Arc<MeshDomain>, path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(mesh, &std::fs::read_to_string(path)?)
    }
}

/// `∫_Ω G(|u_h|) dx`.
pub fn bulk_modular(g: &YoungFunction, u: &ScalarField) -> f64 {
    scaled_bulk(g, u, 1.0)
}

fn scaled_bulk(g: &YoungFunction, u: &ScalarField, s: f64) -> f64 {
    let mesh = u.mesh();
    let vals = u.values();
    let mut total = 0.0;
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let (a, b, c) = (vals[tri[0]], vals[tri[1]], vals[tri[2]]);
        let mut acc = 0.0;
        for (l, w) in &TRI_ORDER4 {
            acc += w * g.value((s * (l[0] * a + l[1] * b + l[2] * c)).abs());
        }
        total += mesh.areas()[t] * acc;
    }
    total
}

/// `∫_Ω G(|∇u_h|) dx`, exact for P1 fields.
pub fn gradient_modular(g: &YoungFunction, u: &ScalarField) -> f64 {
    scaled_gradient(g, u, 1.0)
}

fn scaled_gradient(g: &YoungFunction, u: &ScalarField, s: f64) -> f64 {
    let mesh = u.mesh();
    (0..mesh.num_triangles())
        .map(|t| {
            let d = u.gradient(t);
            mesh.areas()[t] * g.value(s * d[0].hypot(d[1]))
        })
        .sum()
}

/// `∫_∂Ω H(|u_h|) d𝓗¹`.
pub fn trace_modular(h: &YoungFunction, u: &ScalarField) -> f64 {
    scaled_trace(h, u, 1.0)
}

fn scaled_trace(h: &YoungFunction, u: &ScalarField, s: f64) -> f64 {
    let mesh = u.mesh();
    let vals = u.values();
    let mut total = 0.0;
    for (e, &[i, j]) in mesh.boundary_edges().iter().enumerate() {
        let (a, b) = (vals[i], vals[j]);
        let mut acc = 0.0;
        for &(x, w) in &EDGE_GAUSS3 {
            acc += w * h.value((s * ((1.0 - x) * a + x * b)).abs());
        }
        total += mesh.edge_lengths()[e] * acc;
    }
    total
}

/// The two pieces of the trace-constant functional plus the trace modular.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModularReport {
    pub grad_modular: f64,
    pub bulk_modular: f64,
    pub trace_modular: f64,
    pub objective: f64,
}

pub fn modular_report(g: &YoungFunction, h: &YoungFunction, u: &ScalarField) -> ModularReport {
    let grad_modular = gradient_modular(g, u);
    let bulk_modular = bulk_modular(g, u);
    ModularReport {
        grad_modular,
        bulk_modular,
        trace_modular: trace_modular(h, u),
        objective: grad_modular + bulk_modular,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormDomain {
    Bulk,
    Trace,
}

/// Largest `s > 0` such that `phi(s) = 1` for an increasing `phi` with
/// `phi(0) = 0`, by bracketing then bisection to relative 1e-15.
fn solve_unit_level(phi: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    if phi(hi) < 1.0 {
        while phi(hi) < 1.0 {
            lo = hi;
            hi *= 2.0;
        }
    } else {
        while phi(hi * 0.5) >= 1.0 {
            hi *= 0.5;
        }
        lo = hi * 0.5;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `inf{λ > 0 : Φ(u/λ) ≤ 1}`; zero for fields vanishing on the chosen domain.
pub fn luxemburg_norm(g: &YoungFunction, u: &ScalarField, domain: NormDomain) -> f64 {
    let phi = |s: f64| match domain {
        NormDomain::Bulk => scaled_bulk(g, u, s),
        NormDomain::Trace => scaled_trace(g, u, s),
    };
    if phi(1.0) == 0.0 {
        return 0.0;
    }
    // Φ(u/λ) = 1  ⇔  Φ(s u) = 1 with s = 1/λ
    1.0 / solve_unit_level(phi)
}

/// Scale factor `t*` with `Φ_{H,∂Ω}(t* u) = 1`.
pub fn trace_normalizer(h: &YoungFunction, u: &ScalarField) -> Result<f64> {
    let base = trace_modular(h, u);
    if base == 0.0 {
        return Err(Error::NormalizationImpossible);
    }
    if let Some(p) = h.power_exponent() {
        return Ok(base.powf(-1.0 / p));
    }
    Ok(solve_unit_level(|s| scaled_trace(h, u, s)))
}

/// Rescales `u` onto the constraint manifold `Φ_{H,∂Ω}(u) = 1`.
pub fn normalize_trace(h: &YoungFunction, u: &ScalarField) -> Result<ScalarField> {
    Ok(u.scaled(trace_normalizer(h, u)?))
}
