//! Compressed-row sparse matrices on the P1 vertex graph and a
//! Jacobi-preconditioned conjugate gradient solver.

use std::collections::BTreeSet;

use crate::mesh::MeshDomain;

#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the sparsity pattern of the mesh vertex graph (diagonal included).
    pub fn mesh_pattern(mesh: &MeshDomain) -> Self {
        let n = mesh.num_vertices();
        let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|i| BTreeSet::from([i])).collect();
        for t in mesh.triangles() {
            for &a in t {
                for &b in t {
                    adj[a].insert(b);
                }
            }
        }
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        row_ptr.push(0);
        for row in adj {
            cols.extend(row);
            row_ptr.push(cols.len());
        }
        let vals = vec![0.0; cols.len()];
        Self { n, row_ptr, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn clear(&mut self) {
        self.vals.iter_mut().for_each(|v| *v = 0.0);
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        self.row_ptr[i] + row.binary_search(&j).expect("entry in pattern")
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.slot(i, j);
        self.vals[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        match row.binary_search(&j) {
            Ok(k) => self.vals[self.row_ptr[i] + k],
            Err(_) => 0.0,
        }
    }

    /// Replaces row and column `i` by the identity (homogeneous Dirichlet dof).
    pub fn pin(&mut self, i: usize) {
        for k in self.row_ptr[i]..self.row_ptr[i + 1] {
            let j = self.cols[k];
            self.vals[k] = if j == i { 1.0 } else { 0.0 };
            if j != i {
                let s = self.slot(j, i);
                self.vals[s] = 0.0;
            }
        }
    }

    pub fn mul(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.n) {
            *yi = (self.row_ptr[i]..self.row_ptr[i + 1]).map(|k| self.vals[k] * x[self.cols[k]]).sum();
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }
}

/// Solves `A x = b` for SPD `A` starting from `x`; returns the iteration count.
pub fn pcg(a: &CsrMatrix, b: &[f64], x: &mut [f64], rel_tol: f64, max_iter: usize) -> usize {
    let n = a.dim();
    let inv_diag: Vec<f64> = a.diagonal().iter().map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 }).collect();
    let mut r = vec![0.0; n];
    a.mul(x, &mut r);
    for i in 0..n {
        r[i] = b[i] - r[i];
    }
    let bnorm = dot(b, b).sqrt().max(f64::MIN_POSITIVE);
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for it in 0..max_iter {
        if dot(&r, &r).sqrt() <= rel_tol * bnorm {
            return it;
        }
        a.mul(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return it;
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    max_iter
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Assembles `∫ κ ∇φi·∇φj + m φi φj` with piecewise-constant per-triangle
/// coefficients `κ` and `m` (consistent mass).
pub fn assemble_stiffness_mass(mesh: &MeshDomain, kappa: &[f64], mass: &[f64], out: &mut CsrMatrix) {
    out.clear();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.areas()[t];
        let g = &mesh.basis_gradients()[t];
        for a in 0..3 {
            for b in 0..3 {
                let k = kappa[t] * area * (g[a][0] * g[b][0] + g[a][1] * g[b][1]);
                let m = mass[t] * area * if a == b { 1.0 / 6.0 } else { 1.0 / 12.0 };
                out.add(tri[a], tri[b], k + m);
            }
        }
    }
}
