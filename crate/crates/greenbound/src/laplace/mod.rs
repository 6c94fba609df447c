//! Discrete Laplace operators: P1 finite elements on meshes (cotangent
//! weights on the sphere surface), Fourier on periodic grids.

pub mod eigen;
pub mod sparse;
pub mod spectral;

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::geometry::{Discretization, GeometryHandle, Mesh};

pub use eigen::{first_nonzero_eigenvalue, EigenResult};
pub use sparse::{CsrMatrix, SparseCholesky};
pub use spectral::SpectralOps;

/// Nodal real values on a geometry's nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteFunction {
    values: Vec<f64>,
}

impl DiscreteFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(DiscreteFunction { values })
    }

    pub fn from_fn(g: &GeometryHandle, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        Self::new((0..g.node_count()).map(|i| f(g.node(i))).collect())
    }

    pub fn zeros(n: usize) -> Self {
        DiscreteFunction { values: vec![0.0; n] }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Vector field sampled per cell (meshes) or per node (grids), with the
/// quadrature weight of each sample.
#[derive(Clone, Debug)]
pub struct VectorField {
    pub dim: usize,
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
}

impl VectorField {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn at(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        (0..self.len()).map(|i| crate::vecops::norm(self.at(i))).collect()
    }
}

/// Where a scalar norm is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Interior,
    Boundary,
}

#[derive(Debug)]
pub enum OperatorKind {
    Fem { stiffness: CsrMatrix, mass: Vec<f64> },
    Spectral(SpectralOps),
}

/// Assembled operator with a lazily computed, shared Dirichlet factorization.
#[derive(Debug)]
pub struct DiscreteOperator {
    geometry: Arc<GeometryHandle>,
    pub kind: OperatorKind,
    interior: Vec<usize>,
    dirichlet: OnceLock<std::result::Result<(CsrMatrix, SparseCholesky), String>>,
}

/// Barycentric gradients and measure of one simplex (up to a tetrahedron
/// in three coordinates).
#[derive(Clone, Copy, Debug)]
pub struct CellGeom {
    pub vol: f64,
    pub k: usize,
    pub grads: [[f64; 3]; 4],
}

pub fn cell_geom(mesh: &Mesh, c: usize) -> CellGeom {
    let ids = mesh.cell(c);
    let k = mesh.cell_dim;
    let d = mesh.dim;
    let v0 = mesh.vertex(ids[0]);
    let mut e = [[0.0f64; 3]; 3];
    for i in 0..k {
        let vi = mesh.vertex(ids[i + 1]);
        for a in 0..d {
            e[i][a] = vi[a] - v0[a];
        }
    }
    let mut g = [[0.0f64; 3]; 3];
    for i in 0..k {
        for j in 0..k {
            g[i][j] = (0..3).map(|a| e[i][a] * e[j][a]).sum();
        }
    }
    let (det, inv) = small_inverse(&g, k);
    let vol = det.max(0.0).sqrt() / crate::vecops::factorial(k);
    let mut grads = [[0.0f64; 3]; 4];
    for i in 0..k {
        for j in 0..k {
            for a in 0..3 {
                grads[i + 1][a] += inv[i][j] * e[j][a];
            }
        }
    }
    for a in 0..3 {
        grads[0][a] = -(1..=k).map(|i| grads[i][a]).sum::<f64>();
    }
    CellGeom { vol, k, grads }
}

fn small_inverse(g: &[[f64; 3]; 3], k: usize) -> (f64, [[f64; 3]; 3]) {
    let mut inv = [[0.0; 3]; 3];
    match k {
        1 => {
            inv[0][0] = 1.0 / g[0][0];
            (g[0][0], inv)
        }
        2 => {
            let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
            inv[0][0] = g[1][1] / det;
            inv[1][1] = g[0][0] / det;
            inv[0][1] = -g[0][1] / det;
            inv[1][0] = -g[1][0] / det;
            (det, inv)
        }
        3 => {
            let c = |i: usize, j: usize| {
                let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
                let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
                g[r0][c0] * g[r1][c1] - g[r0][c1] * g[r1][c0]
            };
            let det = g[0][0] * c(0, 0) + g[0][1] * c(0, 1) + g[0][2] * c(0, 2);
            for i in 0..3 {
                for j in 0..3 {
                    inv[j][i] = c(i, j) / det;
                }
            }
            (det, inv)
        }
        _ => unreachable!("simplices up to dimension 3"),
    }
}

/// Assembles the discrete Laplacian of a geometry.
pub fn assemble(g: Arc<GeometryHandle>) -> Result<DiscreteOperator> {
    let kind = match &g.disc {
        Discretization::Mesh(mesh) => {
            let n = mesh.n_vertices();
            let mut trip = Vec::with_capacity(mesh.n_cells() * 16);
            let mut mass = vec![0.0; n];
            for c in 0..mesh.n_cells() {
                let cg = cell_geom(mesh, c);
                if !(cg.vol > 0.0) || !cg.vol.is_finite() {
                    return Err(Error::DegenerateCell(c));
                }
                let ids = mesh.cell(c);
                for i in 0..=cg.k {
                    mass[ids[i]] += cg.vol / (cg.k + 1) as f64;
                    for j in 0..=cg.k {
                        let v: f64 = (0..3).map(|a| cg.grads[i][a] * cg.grads[j][a]).sum();
                        trip.push((ids[i], ids[j], cg.vol * v));
                    }
                }
            }
            OperatorKind::Fem { stiffness: CsrMatrix::from_triplets(n, trip), mass }
        }
        Discretization::Grid(grid) => OperatorKind::Spectral(SpectralOps::new(grid)),
        Discretization::Samples(_) => return Err(Error::NoDiscretization),
    };
    let interior = (0..g.node_count()).filter(|&i| !g.is_boundary_node(i)).collect();
    Ok(DiscreteOperator { geometry: g, kind, interior, dirichlet: OnceLock::new() })
}

impl DiscreteOperator {
    pub fn geometry(&self) -> &GeometryHandle {
        &self.geometry
    }

    pub fn geometry_arc(&self) -> Arc<GeometryHandle> {
        self.geometry.clone()
    }

    pub fn node_count(&self) -> usize {
        self.geometry.node_count()
    }

    pub fn interior_nodes(&self) -> &[usize] {
        &self.interior
    }

    pub fn stiffness(&self) -> Option<&CsrMatrix> {
        match &self.kind {
            OperatorKind::Fem { stiffness, .. } => Some(stiffness),
            OperatorKind::Spectral(_) => None,
        }
    }

    /// Lumped mass per node.
    pub fn mass(&self) -> Vec<f64> {
        match &self.kind {
            OperatorKind::Fem { mass, .. } => mass.clone(),
            OperatorKind::Spectral(_) => self.geometry.volume_weights().to_vec(),
        }
    }

    pub fn spectral(&self) -> Option<&SpectralOps> {
        match &self.kind {
            OperatorKind::Spectral(s) => Some(s),
            OperatorKind::Fem { .. } => None,
        }
    }

    /// Discrete Laplacian: −M⁻¹K f on meshes, Fourier multiplier on grids.
    pub fn apply_laplacian(&self, f: &[f64]) -> Vec<f64> {
        match &self.kind {
            OperatorKind::Fem { stiffness, mass } => {
                stiffness.matvec(f).iter().zip(mass).map(|(k, m)| -k / m).collect()
            }
            OperatorKind::Spectral(s) => s.laplacian(f),
        }
    }

    fn factor(&self) -> Result<&(CsrMatrix, SparseCholesky)> {
        let stiffness = self.stiffness().ok_or(Error::NoBoundary)?;
        self.dirichlet
            .get_or_init(|| {
                let kii = stiffness.submatrix(&self.interior);
                SparseCholesky::factor(&kii).map(|f| (kii, f)).map_err(|e| e.to_string())
            })
            .as_ref()
            .map_err(|e| Error::Solver(e.clone()))
    }

    /// Right-hand side of the interior system for boundary data `g`
    /// (length = node count, only boundary entries read) and source `rhs`.
    fn interior_rhs(&self, bdata: &[f64], rhs: Option<&[f64]>) -> Vec<f64> {
        let OperatorKind::Fem { stiffness, mass } = &self.kind else { unreachable!() };
        let geo = &self.geometry;
        self.interior
            .iter()
            .map(|&i| {
                let mut b = 0.0;
                for (j, v) in stiffness.row(i) {
                    if geo.is_boundary_node(j) {
                        b -= v * bdata[j];
                    }
                }
                if let Some(r) = rhs {
                    b -= mass[i] * r[i];
                }
                b
            })
            .collect()
    }

    /// Solves Δu = rhs inside, u = boundary data on the boundary, for many
    /// boundary data vectors at once (each of node-count length).
    pub fn solve_dirichlet_many(&self, bdata: &[Vec<f64>], rhs: Option<&[f64]>) -> Result<Vec<Vec<f64>>> {
        if !self.geometry.has_boundary() {
            return Err(Error::NoBoundary);
        }
        let n = self.node_count();
        for b in bdata {
            if b.len() != n {
                return Err(Error::SizeMismatch { expected: n, got: b.len() });
            }
        }
        let (kii, chol) = self.factor()?;
        let ni = self.interior.len();
        let mut sys: Vec<f64> = Vec::with_capacity(ni * bdata.len());
        for b in bdata {
            sys.extend(self.interior_rhs(b, rhs));
        }
        let rhs_copy = sys.clone();
        chol.solve_many(&mut sys, bdata.len());
        let mut out = Vec::with_capacity(bdata.len());
        for (c, b) in bdata.iter().enumerate() {
            let x = &sys[c * ni..(c + 1) * ni];
            let r = kii.matvec(x);
            let rb = &rhs_copy[c * ni..(c + 1) * ni];
            let res: f64 = r.iter().zip(rb).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            let nb: f64 = rb.iter().map(|v| v * v).sum::<f64>().sqrt();
            if res > 1e-10 * nb.max(1e-300) && res > 1e-14 {
                return Err(Error::Solver(format!("relative residual {:e} exceeds 1e-10", res / nb)));
            }
            let mut u = b.clone();
            for (k, &i) in self.interior.iter().enumerate() {
                u[i] = x[k];
            }
            out.push(u);
        }
        Ok(out)
    }

    pub fn solve_dirichlet(&self, boundary_data: &DiscreteFunction, rhs: &DiscreteFunction) -> Result<DiscreteFunction> {
        let n = self.node_count();
        if rhs.len() != n {
            return Err(Error::SizeMismatch { expected: n, got: rhs.len() });
        }
        let mut u = self.solve_dirichlet_many(&[boundary_data.values().to_vec()], Some(rhs.values()))?;
        DiscreteFunction::new(u.pop().unwrap())
    }

    /// Cellwise gradient (meshes) or spectral gradient (grids).
    pub fn gradient(&self, f: &[f64]) -> VectorField {
        match &self.kind {
            OperatorKind::Fem { .. } => {
                let mesh = self.geometry.mesh().expect("fem operator has a mesh");
                let d = mesh.dim;
                let mut values = Vec::with_capacity(mesh.n_cells() * d);
                let mut weights = Vec::with_capacity(mesh.n_cells());
                for c in 0..mesh.n_cells() {
                    let cg = cell_geom(mesh, c);
                    let ids = mesh.cell(c);
                    for a in 0..d {
                        values.push((0..=cg.k).map(|i| cg.grads[i][a] * f[ids[i]]).sum());
                    }
                    weights.push(cg.vol);
                }
                VectorField { dim: d, values, weights }
            }
            OperatorKind::Spectral(s) => {
                let grads = s.gradient(f);
                let d = grads.len();
                let n = f.len();
                let values = (0..n).flat_map(|i| grads.iter().map(move |g| g[i])).collect::<Vec<_>>();
                let _ = d;
                VectorField { dim: grads.len(), values, weights: self.geometry.volume_weights().to_vec() }
            }
        }
    }

    /// Volume-weighted average of adjacent cell gradients at every node.
    pub fn nodal_gradient(&self, f: &[f64]) -> Vec<f64> {
        match &self.kind {
            OperatorKind::Fem { .. } => {
                let mesh = self.geometry.mesh().expect("fem operator has a mesh");
                let d = mesh.dim;
                let field = self.gradient(f);
                let mut acc = vec![0.0; mesh.n_vertices() * d];
                let mut w = vec![0.0; mesh.n_vertices()];
                for c in 0..mesh.n_cells() {
                    for &i in mesh.cell(c) {
                        w[i] += field.weights[c];
                        for a in 0..d {
                            acc[i * d + a] += field.weights[c] * field.values[c * d + a];
                        }
                    }
                }
                for i in 0..mesh.n_vertices() {
                    for a in 0..d {
                        acc[i * d + a] /= w[i];
                    }
                }
                acc
            }
            OperatorKind::Spectral(_) => self.gradient(f).values,
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        Err(Error::Exponent(format!("p = {p} < 1")))
    } else {
        Ok(())
    }
}

/// Weighted L^p norm of samples; p may be infinite (max of |v|).
pub fn weighted_norm(values: &[f64], weights: &[f64], p: f64) -> Result<f64> {
    check_p(p)?;
    if p.is_infinite() {
        return Ok(values.iter().zip(weights).filter(|(_, w)| **w > 0.0).map(|(v, _)| v.abs()).fold(0.0, f64::max));
    }
    Ok(values.iter().zip(weights).map(|(v, w)| w * v.abs().powf(p)).sum::<f64>().powf(1.0 / p))
}

/// L^p norm of nodal values over the interior or the boundary.
pub fn lp_norm(g: &GeometryHandle, values: &[f64], p: f64, region: Region) -> Result<f64> {
    if values.len() != g.node_count() {
        return Err(Error::SizeMismatch { expected: g.node_count(), got: values.len() });
    }
    match region {
        Region::Interior => weighted_norm(values, g.volume_weights(), p),
        Region::Boundary => {
            if !g.has_boundary() {
                return Err(Error::NoBoundary);
            }
            let b: Vec<f64> = g.boundary_nodes().iter().map(|&i| values[i]).collect();
            weighted_norm(&b, g.boundary_weights(), p)
        }
    }
}

/// L^p norm of the pointwise magnitude of a vector field.
pub fn field_norm(field: &VectorField, p: f64) -> Result<f64> {
    weighted_norm(&field.magnitudes(), &field.weights, p)
}

/// Discrete Stokes identity defect |∫⟨∇s1, s2⟩ + ∫ s1 div s2 − ∮ s1 s2·ν|
/// for nodal P1 data, integrated exactly; returns (residual, scale).
pub fn discrete_stokes_residual(g: &GeometryHandle, s1: &[f64], s2: &[f64]) -> Result<(f64, f64)> {
    let mesh = g.mesh().ok_or(Error::NoDiscretization)?;
    let d = mesh.dim;
    let n = mesh.n_vertices();
    if s1.len() != n {
        return Err(Error::SizeMismatch { expected: n, got: s1.len() });
    }
    if s2.len() != n * d {
        return Err(Error::SizeMismatch { expected: n * d, got: s2.len() });
    }
    let (mut grad_term, mut div_term, mut scale) = (0.0, 0.0, 0.0);
    for c in 0..mesh.n_cells() {
        let cg = cell_geom(mesh, c);
        let ids = mesh.cell(c);
        let kp = (cg.k + 1) as f64;
        let mut gs1 = [0.0; 3];
        let mut div = 0.0;
        for (i, &v) in ids.iter().enumerate() {
            for a in 0..d {
                gs1[a] += cg.grads[i][a] * s1[v];
                div += cg.grads[i][a] * s2[v * d + a];
            }
        }
        let mean_s2: Vec<f64> = (0..d).map(|a| ids.iter().map(|&v| s2[v * d + a]).sum::<f64>() / kp).collect();
        let mean_s1 = ids.iter().map(|&v| s1[v]).sum::<f64>() / kp;
        let t1 = cg.vol * (0..d).map(|a| gs1[a] * mean_s2[a]).sum::<f64>();
        let t2 = cg.vol * mean_s1 * div;
        grad_term += t1;
        div_term += t2;
        scale += t1.abs() + t2.abs();
    }
    let mut flux = 0.0;
    for f in 0..mesh.n_faces() {
        let face = mesh.face(f);
        let nu = mesh.face_normal(f);
        let area = mesh.face_area(f);
        let k = face.len() as f64 - 1.0;
        let denom = (k + 1.0) * (k + 2.0);
        let mut acc = 0.0;
        for &i in face {
            for &j in face {
                let w = if i == j { 2.0 } else { 1.0 } / denom;
                let sn: f64 = (0..d).map(|a| s2[j * d + a] * nu[a]).sum();
                acc += w * s1[i] * sn;
            }
        }
        flux += area * acc;
        scale += (area * acc).abs();
    }
    Ok(((grad_term + div_term - flux).abs(), scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_geometry, GeometrySpec};
    use std::f64::consts::PI;

    fn op(kind: &str, params: &[f64], h: f64) -> DiscreteOperator {
        assemble(Arc::new(build_geometry(&GeometrySpec::new(kind, params, h)).unwrap())).unwrap()
    }

    #[test]
    fn interior_row_sums_vanish() {
        let o = op("disk", &[1.0], 0.1);
        let k = o.stiffness().unwrap();
        assert!(k.is_symmetric());
        for &i in o.interior_nodes() {
            let s: f64 = k.row(i).map(|(_, v)| v).sum();
            let nrm: f64 = k.row(i).map(|(_, v)| v * v).sum::<f64>().sqrt();
            assert!(s.abs() <= 1e-10 * nrm);
        }
    }

    #[test]
    fn dirichlet_examples() {
        let o = op("disk", &[1.0], 0.05);
        let g = o.geometry();
        let zero = DiscreteFunction::zeros(g.node_count());
        let one = DiscreteFunction::new(vec![1.0; g.node_count()]).unwrap();
        let u = o.solve_dirichlet(&zero, &one).unwrap();
        assert!((u.values()[0] + 0.25).abs() < 5e-3);
        let bd = DiscreteFunction::from_fn(g, |x| x[0] * x[0] - x[1] * x[1]).unwrap();
        let u = o.solve_dirichlet(&bd, &zero).unwrap();
        assert!(u.values()[0].abs() < 5e-3);
        let b = op("ball3", &[1.0], 0.25);
        let one = DiscreteFunction::new(vec![1.0; b.node_count()]).unwrap();
        let u = b.solve_dirichlet(&one, &DiscreteFunction::zeros(b.node_count())).unwrap();
        assert!(u.values().iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn norms_of_constants() {
        let o = op("disk", &[1.0], 0.1);
        let g = o.geometry();
        let c = vec![2.0; g.node_count()];
        let v = g.volume();
        assert!((lp_norm(g, &c, 3.0, Region::Interior).unwrap() - 2.0 * v.powf(1.0 / 3.0)).abs() < 1e-12);
        assert!(lp_norm(g, &c, 0.5, Region::Interior).is_err());
        let gr = o.gradient(&c);
        assert!(field_norm(&gr, 2.0).unwrap() < 1e-12);
        let r: Vec<f64> = (0..g.node_count()).map(|i| crate::vecops::norm(g.node(i))).collect();
        let b = lp_norm(g, &r, 1.0, Region::Boundary).unwrap();
        assert!((b - 2.0 * PI).abs() < 0.01);
    }

    #[test]
    fn torus_gradient_norm() {
        let o = op("torus2", &[1.0], 1.0 / 64.0);
        let f: Vec<f64> = (0..o.node_count()).map(|i| (2.0 * PI * o.geometry().node(i)[0]).sin()).collect();
        let n = field_norm(&o.gradient(&f), 2.0).unwrap();
        assert!((n * n - 2.0 * PI * PI).abs() < 1e-8);
    }

    #[test]
    fn stokes_is_exact_for_p1() {
        let o = op("annulus2d", &[1.0, 2.0], 0.2);
        let g = o.geometry();
        let s1: Vec<f64> = (0..g.node_count()).map(|i| (g.node(i)[0] * 1.3).sin() + g.node(i)[1]).collect();
        let s2: Vec<f64> = (0..g.node_count()).flat_map(|i| {
            let x = g.node(i);
            vec![x[1].cos(), x[0] * x[1]]
        }).collect();
        let (r, s) = discrete_stokes_residual(g, &s1, &s2).unwrap();
        assert!(r <= 1e-12 * s);
    }
}
