//! Triangulated planar domains, boundary bookkeeping, discrete subsets and
//! the Hausdorff distance between finite point sets.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[inline]
fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn distance(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let ap = sub(p, a);
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let s = if len2 > 0.0 { ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    distance(p, [a[0] + s * ab[0], a[1] + s * ab[1]])
}

/// A 2-D triangulation with counter-clockwise triangles and boundary edges
/// oriented so that the domain lies to their left.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshDomain {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<[usize; 2]>,
    areas: Vec<f64>,
    edge_lengths: Vec<f64>,
    edge_normals: Vec<Point>,
    on_boundary: Vec<bool>,
    basis_grads: Vec<[Point; 3]>,
    vertex_triangles: Vec<Vec<usize>>,
}

impl MeshDomain {
    /// Builds and validates a mesh. Clockwise triangles are rejected, boundary
    /// edges must be exactly the edges owned by a single triangle.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>, boundary_edges: Vec<[usize; 2]>) -> Result<Self> {
        let nv = vertices.len();
        if nv < 3 || triangles.is_empty() {
            return Err(Error::Mesh("need at least one triangle".into()));
        }
        if vertices.iter().any(|v| !v[0].is_finite() || !v[1].is_finite()) {
            return Err(Error::Mesh("non-finite vertex coordinate".into()));
        }
        let mut areas = Vec::with_capacity(triangles.len());
        let mut basis_grads = Vec::with_capacity(triangles.len());
        let mut vertex_triangles = vec![Vec::new(); nv];
        let mut edge_owner: BTreeMap<(usize, usize), Vec<(usize, bool)>> = BTreeMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= nv) {
                return Err(Error::Mesh(format!("triangle {t} references a missing vertex")));
            }
            let [a, b, c] = tri.map(|i| vertices[i]);
            let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
            if det <= 0.0 {
                return Err(Error::Mesh(format!("triangle {t} has non-positive area")));
            }
            areas.push(0.5 * det);
            // ∇λ_i = perp(opposite edge) / det
            let g = |p: Point, q: Point| [(p[1] - q[1]) / det, (q[0] - p[0]) / det];
            basis_grads.push([g(b, c), g(c, a), g(a, b)]);
            for k in 0..3 {
                vertex_triangles[tri[k]].push(t);
                let (i, j) = (tri[k], tri[(k + 1) % 3]);
                edge_owner.entry((i.min(j), i.max(j))).or_default().push((t, i < j));
            }
        }
        let mut single: BTreeMap<(usize, usize), bool> = BTreeMap::new();
        for (e, owners) in &edge_owner {
            match owners.len() {
                1 => {
                    single.insert(*e, owners[0].1);
                }
                2 => {}
                _ => return Err(Error::Mesh(format!("edge {e:?} shared by more than two triangles"))),
            }
        }
        if single.len() != boundary_edges.len() {
            return Err(Error::Mesh(format!(
                "{} boundary edges given, triangulation has {}",
                boundary_edges.len(),
                single.len()
            )));
        }
        let mut oriented = Vec::with_capacity(boundary_edges.len());
        let mut degree = vec![0usize; nv];
        for &[i, j] in &boundary_edges {
            if i >= nv || j >= nv {
                return Err(Error::Mesh("boundary edge references a missing vertex".into()));
            }
            let forward = *single
                .get(&(i.min(j), i.max(j)))
                .ok_or_else(|| Error::Mesh(format!("({i}, {j}) is not a boundary edge")))?;
            let (lo, hi) = (i.min(j), i.max(j));
            oriented.push(if forward { [lo, hi] } else { [hi, lo] });
            degree[i] += 1;
            degree[j] += 1;
        }
        if degree.iter().any(|&d| d != 0 && d != 2) {
            return Err(Error::Mesh("boundary edges do not form closed loops".into()));
        }
        let mut on_boundary = vec![false; nv];
        let mut edge_lengths = Vec::with_capacity(oriented.len());
        let mut edge_normals = Vec::with_capacity(oriented.len());
        for &[i, j] in &oriented {
            on_boundary[i] = true;
            on_boundary[j] = true;
            let d = sub(vertices[j], vertices[i]);
            let len = norm(d);
            edge_lengths.push(len);
            edge_normals.push([d[1] / len, -d[0] / len]);
        }
        Ok(Self {
            vertices,
            triangles,
            boundary_edges: oriented,
            areas,
            edge_lengths,
            edge_normals,
            on_boundary,
            basis_grads,
            vertex_triangles,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }
    pub fn boundary_edges(&self) -> &[[usize; 2]] {
        &self.boundary_edges
    }
    pub fn areas(&self) -> &[f64] {
        &self.areas
    }
    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_lengths
    }
    pub fn edge_normals(&self) -> &[Point] {
        &self.edge_normals
    }
    pub fn on_boundary(&self) -> &[bool] {
        &self.on_boundary
    }
    /// Gradients of the three barycentric basis functions of each triangle.
    pub fn basis_gradients(&self) -> &[[Point; 3]] {
        &self.basis_grads
    }
    pub fn vertex_triangles(&self, v: usize) -> &[usize] {
        &self.vertex_triangles[v]
    }
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn area(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub fn perimeter(&self) -> f64 {
        self.edge_lengths.iter().sum()
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.triangles[t].map(|i| self.vertices[i]);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    pub fn edge_midpoint(&self, e: usize) -> Point {
        let [a, b] = self.boundary_edges[e].map(|i| self.vertices[i]);
        [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
    }

    pub fn max_area(&self) -> f64 {
        self.areas.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_boundary_edge(&self) -> f64 {
        self.edge_lengths.iter().copied().fold(0.0, f64::max)
    }

    /// Longest edge over all triangles.
    pub fn max_edge_length(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k], t[(k + 1) % 3])))
            .map(|(i, j)| distance(self.vertices[i], self.vertices[j]))
            .fold(0.0, f64::max)
    }

    pub fn num_edges(&self) -> usize {
        let set: BTreeSet<(usize, usize)> = self
            .triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k].min(t[(k + 1) % 3]), t[k].max(t[(k + 1) % 3]))))
            .collect();
        set.len()
    }

    /// `V − E + F` counting triangles only; 1 for disk-type domains.
    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_triangles() as i64
    }

    pub fn diameter(&self) -> f64 {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        norm(sub(hi, lo))
    }

    /// Exact distance to the polygonal boundary.
    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        self.boundary_edges
            .iter()
            .map(|&[i, j]| point_segment_distance(p, self.vertices[i], self.vertices[j]))
            .fold(f64::INFINITY, f64::min)
    }

    /// Triangle containing `p` and its barycentric coordinates. Points
    /// outside the mesh are projected onto the nearest boundary edge.
    pub fn locate(&self, p: Point) -> (usize, [f64; 3]) {
        for (t, tri) in self.triangles.iter().enumerate() {
            let l = self.barycentric(t, p);
            if l.iter().all(|&x| x >= -1e-12) {
                let _ = tri;
                return (t, l);
            }
        }
        let mut best = (f64::INFINITY, 0usize, 0.0);
        for (e, &[i, j]) in self.boundary_edges.iter().enumerate() {
            let (a, b) = (self.vertices[i], self.vertices[j]);
            let ab = sub(b, a);
            let ap = sub(p, a);
            let s = ((ap[0] * ab[0] + ap[1] * ab[1]) / (ab[0] * ab[0] + ab[1] * ab[1])).clamp(0.0, 1.0);
            let d = distance(p, [a[0] + s * ab[0], a[1] + s * ab[1]]);
            if d < best.0 {
                best = (d, e, s);
            }
        }
        let [i, j] = self.boundary_edges[best.1];
        let s = best.2;
        let t = self.vertex_triangles[i]
            .iter()
            .copied()
            .find(|&t| self.triangles[t].contains(&j))
            .expect("boundary edge has an owner");
        let tri = self.triangles[t];
        let mut l = [0.0; 3];
        for k in 0..3 {
            if tri[k] == i {
                l[k] = 1.0 - s;
            } else if tri[k] == j {
                l[k] = s;
            }
        }
        (t, l)
    }

    pub fn barycentric(&self, t: usize, p: Point) -> [f64; 3] {
        let tri = self.triangles[t];
        let g = &self.basis_grads[t];
        let mut l = [0.0; 3];
        for k in 0..3 {
            // λ_k is affine with gradient g[k] and vanishes on the opposite edge
            let q = self.vertices[tri[(k + 1) % 3]];
            l[k] = g[k][0] * (p[0] - q[0]) + g[k][1] * (p[1] - q[1]);
        }
        l
    }

    /// Vertex indices whose triangles touch a boundary-edge subset.
    pub fn edge_vertices(&self, edges: &[usize]) -> BTreeSet<usize> {
        edges.iter().flat_map(|&e| self.boundary_edges[e]).collect()
    }

    /// Boundary edges in loop order starting from edge 0, for closed single-loop boundaries.
    pub fn boundary_loop(&self) -> Vec<usize> {
        let mut by_start = BTreeMap::new();
        for (e, &[i, _]) in self.boundary_edges.iter().enumerate() {
            by_start.insert(i, e);
        }
        let mut order = Vec::with_capacity(self.boundary_edges.len());
        let mut e = 0;
        for _ in 0..self.boundary_edges.len() {
            order.push(e);
            match by_start.get(&self.boundary_edges[e][1]) {
                Some(&next) if next != order[0] => e = next,
                _ => break,
            }
        }
        order
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let v = self.vertices.iter().map(|p| [p[0] * factor, p[1] * factor]).collect();
        Self::new(v, self.triangles.clone(), self.boundary_edges.clone())
    }

    pub fn translated(&self, offset: Point) -> Result<Self> {
        let v = self.vertices.iter().map(|p| [p[0] + offset[0], p[1] + offset[1]]).collect();
        Self::new(v, self.triangles.clone(), self.boundary_edges.clone())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "#vertices {}", self.vertices.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{:.16e} {:.16e}", v[0], v[1]);
        }
        let _ = writeln!(s, "#triangles {}", self.triangles.len());
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        let _ = writeln!(s, "#boundary_edges {}", self.boundary_edges.len());
        for e in &self.boundary_edges {
            let _ = writeln!(s, "{} {}", e[0], e[1]);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut section = "";
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                section = match rest.split_whitespace().next() {
                    Some("vertices") => "v",
                    Some("triangles") => "t",
                    Some("boundary_edges") => "e",
                    _ => return Err(Error::Format(format!("line {}: unknown section '{line}'", lineno + 1))),
                };
                continue;
            }
            let bad = || Error::Format(format!("line {}: cannot parse '{line}'", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            match section {
                "v" if fields.len() == 2 => {
                    let x: f64 = fields[0].parse().map_err(|_| bad())?;
                    let y: f64 = fields[1].parse().map_err(|_| bad())?;
                    vertices.push([x, y]);
                }
                "t" if fields.len() == 3 => {
                    let mut t = [0usize; 3];
                    for k in 0..3 {
                        t[k] = fields[k].parse().map_err(|_| bad())?;
                    }
                    triangles.push(t);
                }
                "e" if fields.len() == 2 => {
                    edges.push([fields[0].parse().map_err(|_| bad())?, fields[1].parse().map_err(|_| bad())?]);
                }
                _ => return Err(bad()),
            }
        }
        Self::new(vertices, triangles, edges)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Bucket grid over triangle bounding boxes for repeated point location.
pub struct Locator<'a> {
    mesh: &'a MeshDomain,
    origin: Point,
    cell: f64,
    dims: [usize; 2],
    buckets: Vec<Vec<usize>>,
}

impl<'a> Locator<'a> {
    pub fn new(mesh: &'a MeshDomain) -> Self {
        let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
        for v in mesh.vertices() {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        let cell = (mesh.area() / mesh.num_triangles() as f64).sqrt().max(1e-300);
        let dims = [0, 1].map(|k| (((hi[k] - lo[k]) / cell).floor() as usize + 1).min(4096));
        let mut buckets = vec![Vec::new(); dims[0] * dims[1]];
        let mut this = Self { mesh, origin: lo, cell, dims, buckets: Vec::new() };
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let ps = tri.map(|v| mesh.vertices()[v]);
            let lo = [0, 1].map(|k| ps[0][k].min(ps[1][k]).min(ps[2][k]));
            let hi = [0, 1].map(|k| ps[0][k].max(ps[1][k]).max(ps[2][k]));
            let (a, b) = (this.cell_of(lo), this.cell_of(hi));
            for j in a[1]..=b[1] {
                for i in a[0]..=b[0] {
                    buckets[j * dims[0] + i].push(t);
                }
            }
        }
        this.buckets = buckets;
        this
    }

    fn cell_of(&self, p: Point) -> [usize; 2] {
        [0, 1].map(|k| (((p[k] - self.origin[k]) / self.cell).floor().max(0.0) as usize).min(self.dims[k] - 1))
    }

    /// Same contract as [`MeshDomain::locate`].
    pub fn locate(&self, p: Point) -> (usize, [f64; 3]) {
        let c = self.cell_of(p);
        for &t in &self.buckets[c[1] * self.dims[0] + c[0]] {
            let l = self.mesh.barycentric(t, p);
            if l.iter().all(|&x| x >= -1e-12) {
                return (t, l);
            }
        }
        self.mesh.locate(p)
    }
}

/// Quasi-uniform disk mesh centred at the origin built from concentric rings:
/// ring `k` carries `6k` equally spaced vertices, ring spacing `radius/K`
/// with `K = ⌈radius/target_h⌉`. Boundary vertices lie on the circle.
pub fn make_disk(radius: f64, target_h: f64) -> Result<MeshDomain> {
    if !(radius > 0.0 && target_h > 0.0 && target_h < radius) {
        return Err(Error::Domain(format!("need 0 < h < radius (got radius={radius}, h={target_h})")));
    }
    let rings = (radius / target_h).ceil() as usize;
    let mut vertices = vec![[0.0, 0.0]];
    let mut ring_start = vec![0usize];
    for k in 1..=rings {
        ring_start.push(vertices.len());
        let r = radius * k as f64 / rings as f64;
        let n = 6 * k;
        for j in 0..n {
            let th = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
            vertices.push([r * th.cos(), r * th.sin()]);
        }
    }
    let mut triangles = Vec::with_capacity(6 * rings * rings);
    for j in 0..6 {
        triangles.push([0, ring_start[1] + j, ring_start[1] + (j + 1) % 6]);
    }
    for k in 2..=rings {
        let (ni, no) = (6 * (k - 1), 6 * k);
        let (si, so) = (ring_start[k - 1], ring_start[k]);
        let (mut i, mut j) = (0usize, 0usize);
        while i < ni || j < no {
            // close the gap with the shorter diagonal
            let outer_first = i == ni
                || (j < no
                    && distance(vertices[si + i], vertices[so + (j + 1) % no])
                        <= distance(vertices[so + j], vertices[si + (i + 1) % ni]));
            if outer_first {
                triangles.push([si + i % ni, so + j, so + (j + 1) % no]);
                j += 1;
            } else {
                triangles.push([si + i, so + j % no, si + (i + 1) % ni]);
                i += 1;
            }
        }
    }
    let nb = 6 * rings;
    let sb = ring_start[rings];
    let edges = (0..nb).map(|j| [sb + j, sb + (j + 1) % nb]).collect();
    MeshDomain::new(vertices, triangles, edges)
}

/// Structured mesh of `[0, side]²` with `n = ⌈side/target_h⌉` cells per side,
/// each cell split along its diagonal.
pub fn make_square(side: f64, target_h: f64) -> Result<MeshDomain> {
    if !(side > 0.0 && target_h > 0.0 && target_h <= side) {
        return Err(Error::Domain(format!("need 0 < h <= side (got side={side}, h={target_h})")));
    }
    let n = (side / target_h).ceil() as usize;
    let step = side / n as f64;
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let x = if i == n { side } else { i as f64 * step };
            let y = if j == n { side } else { j as f64 * step };
            vertices.push([x, y]);
        }
    }
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    let mut edges = Vec::with_capacity(4 * n);
    for i in 0..n {
        edges.push([id(i, 0), id(i + 1, 0)]);
    }
    for j in 0..n {
        edges.push([id(n, j), id(n, j + 1)]);
    }
    for i in (0..n).rev() {
        edges.push([id(i + 1, n), id(i, n)]);
    }
    for j in (0..n).rev() {
        edges.push([id(0, j + 1), id(0, j)]);
    }
    MeshDomain::new(vertices, triangles, edges)
}

/// A set of whole boundary edges (a window).
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySubset {
    edges: Vec<usize>,
    achieved_measure: f64,
}

impl BoundarySubset {
    pub fn new(mesh: &MeshDomain, edges: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = edges.into_iter().collect();
        if let Some(&e) = set.iter().next_back() {
            if e >= mesh.boundary_edges().len() {
                return Err(Error::Domain(format!("boundary edge {e} out of range")));
            }
        }
        let edges: Vec<usize> = set.into_iter().collect();
        let achieved_measure = edges.iter().map(|&e| mesh.edge_lengths()[e]).sum();
        Ok(Self { edges, achieved_measure })
    }

    pub fn empty() -> Self {
        Self { edges: Vec::new(), achieved_measure: 0.0 }
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn achieved_measure(&self) -> f64 {
        self.achieved_measure
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: usize) -> bool {
        self.edges.binary_search(&e).is_ok()
    }

    /// Number of maximal runs of consecutive edges along the boundary loop.
    pub fn runs(&self, mesh: &MeshDomain) -> usize {
        if self.edges.is_empty() {
            return 0;
        }
        let order = mesh.boundary_loop();
        let member: Vec<bool> = order.iter().map(|&e| self.contains(e)).collect();
        if member.iter().all(|&m| m) {
            return 1;
        }
        let n = member.len();
        (0..n).filter(|&k| member[k] && !member[(k + n - 1) % n]).count()
    }
}

/// A set of whole triangles (a hole).
#[derive(Debug, Clone, PartialEq)]
pub struct InteriorSubset {
    triangles: Vec<usize>,
    achieved_measure: f64,
}

impl InteriorSubset {
    pub fn new(mesh: &MeshDomain, triangles: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = triangles.into_iter().collect();
        if let Some(&t) = set.iter().next_back() {
            if t >= mesh.num_triangles() {
                return Err(Error::Domain(format!("triangle {t} out of range")));
            }
        }
        let triangles: Vec<usize> = set.into_iter().collect();
        let achieved_measure = triangles.iter().map(|&t| mesh.areas()[t]).sum();
        Ok(Self { triangles, achieved_measure })
    }

    pub fn empty() -> Self {
        Self { triangles: Vec::new(), achieved_measure: 0.0 }
    }

    /// Triangles whose centroid satisfies `pred`.
    pub fn from_centroids(mesh: &MeshDomain, pred: impl Fn(Point) -> bool) -> Self {
        let tris: Vec<usize> = (0..mesh.num_triangles()).filter(|&t| pred(mesh.centroid(t))).collect();
        Self::new(mesh, tris).expect("indices come from the mesh")
    }

    pub fn triangles(&self) -> &[usize] {
        &self.triangles
    }

    pub fn achieved_measure(&self) -> f64 {
        self.achieved_measure
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn vertices(&self, mesh: &MeshDomain) -> BTreeSet<usize> {
        self.triangles.iter().flat_map(|&t| mesh.triangles()[t]).collect()
    }

    /// Vertex coordinates of the subset, used for Hausdorff comparisons.
    pub fn vertex_points(&self, mesh: &MeshDomain) -> Vec<Point> {
        self.vertices(mesh).into_iter().map(|v| mesh.vertices()[v]).collect()
    }
}

/// `max(sup_x inf_y |x−y|, sup_y inf_x |x−y|)` for finite point sets.
pub fn hausdorff_distance(x: &[Point], y: &[Point]) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::Domain("Hausdorff distance of an empty set".into()));
    }
    let directed = |a: &[Point], b: &[Point]| {
        a.iter()
            .map(|&p| b.iter().map(|&q| distance(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(directed(x, y).max(directed(y, x)))
}

/// Triangles whose centroid lies at boundary distance in `[eps, delta]`.
pub fn annular_band(mesh: &MeshDomain, eps: f64, delta: f64) -> Result<InteriorSubset> {
    if !(eps >= 0.0 && delta > eps) {
        return Err(Error::Domain(format!("need 0 <= eps < delta (got {eps}, {delta})")));
    }
    let band = InteriorSubset::from_centroids(mesh, |c| {
        let d = mesh.distance_to_boundary(c);
        d >= eps && d <= delta
    });
    if band.is_empty() {
        return Err(Error::Infeasible(format!("band [{eps}, {delta}] contains no triangle")));
    }
    Ok(band)
}
