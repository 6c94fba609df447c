//! Catalog geometries: smooth Euclidean domains and closed model manifolds,
//! with their discretizations and closed-form distance functions.

pub mod grid;
pub mod mesh;
pub mod samples;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use grid::StructuredGrid;
pub use mesh::Mesh;
pub use samples::SampleSet;

use crate::error::{Error, Result};
use crate::vecops::{dist, norm, unit_ball_volume, unit_sphere_area};

/// User-facing description of a geometry: catalog kind, parameters and
/// target resolution h.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometrySpec {
    pub kind: String,
    #[serde(default)]
    pub params: Vec<f64>,
    pub resolution: f64,
    /// Interior sample count for sample-set geometries (4-ball).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

impl GeometrySpec {
    pub fn new(kind: &str, params: &[f64], resolution: f64) -> Self {
        GeometrySpec { kind: kind.to_string(), params: params.to_vec(), resolution, samples: None }
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.samples = Some(n);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeometryKind {
    Disk { radius: f64 },
    Ellipse { a: f64, b: f64 },
    Annulus { inner: f64, outer: f64 },
    Ball { dim: usize, radius: f64 },
    Torus { dim: usize, side: f64 },
    Sphere2 { radius: f64 },
}

impl GeometryKind {
    pub fn name(&self) -> String {
        match self {
            GeometryKind::Disk { .. } => "disk".into(),
            GeometryKind::Ellipse { .. } => "ellipse".into(),
            GeometryKind::Annulus { .. } => "annulus2d".into(),
            GeometryKind::Ball { dim, .. } => format!("ball{dim}"),
            GeometryKind::Torus { dim, .. } => format!("torus{dim}"),
            GeometryKind::Sphere2 { .. } => "sphere2".into(),
        }
    }

    pub fn has_boundary(&self) -> bool {
        !matches!(self, GeometryKind::Torus { .. } | GeometryKind::Sphere2 { .. })
    }

    /// Coordinate dimension of points.
    pub fn ambient_dim(&self) -> usize {
        match *self {
            GeometryKind::Disk { .. } | GeometryKind::Ellipse { .. } | GeometryKind::Annulus { .. } => 2,
            GeometryKind::Ball { dim, .. } | GeometryKind::Torus { dim, .. } => dim,
            GeometryKind::Sphere2 { .. } => 3,
        }
    }

    /// Real dimension n of the manifold.
    pub fn manifold_dim(&self) -> usize {
        match self {
            GeometryKind::Sphere2 { .. } => 2,
            k => k.ambient_dim(),
        }
    }

    pub fn exact_volume(&self) -> f64 {
        match *self {
            GeometryKind::Disk { radius } => PI * radius * radius,
            GeometryKind::Ellipse { a, b } => PI * a * b,
            GeometryKind::Annulus { inner, outer } => PI * (outer * outer - inner * inner),
            GeometryKind::Ball { dim, radius } => unit_ball_volume(dim) * radius.powi(dim as i32),
            GeometryKind::Torus { dim, side } => side.powi(dim as i32),
            GeometryKind::Sphere2 { radius } => 4.0 * PI * radius * radius,
        }
    }

    /// Boundary measure; the ellipse perimeter comes from the arclength table.
    pub fn exact_boundary_area(&self) -> f64 {
        match *self {
            GeometryKind::Disk { radius } => 2.0 * PI * radius,
            GeometryKind::Ellipse { a, b } => mesh::EllipseArc::new(a, b).perimeter(),
            GeometryKind::Annulus { inner, outer } => 2.0 * PI * (inner + outer),
            GeometryKind::Ball { dim, radius } => unit_sphere_area(dim) * radius.powi(dim as i32 - 1),
            GeometryKind::Torus { .. } | GeometryKind::Sphere2 { .. } => 0.0,
        }
    }
}

#[derive(Clone, Debug)]
pub enum Discretization {
    Mesh(Mesh),
    Grid(StructuredGrid),
    Samples(SampleSet),
}

/// Immutable geometry with discretization, node quadrature weights and
/// the boundary node set.
#[derive(Clone, Debug)]
pub struct GeometryHandle {
    pub spec: GeometrySpec,
    pub kind: GeometryKind,
    pub disc: Discretization,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    boundary: Vec<usize>,
    boundary_weights: Vec<f64>,
    boundary_slot: Vec<Option<usize>>,
}

const NON_SMOOTH: [&str; 8] = ["square", "rectangle", "cube", "box", "polygon", "triangle", "l_shape", "lshape"];

fn param(spec: &GeometrySpec, i: usize, default: f64) -> f64 {
    spec.params.get(i).copied().unwrap_or(default)
}

fn parse_kind(spec: &GeometrySpec) -> Result<GeometryKind> {
    let key: String = spec.kind.to_ascii_lowercase().chars().filter(|c| c.is_ascii_alphanumeric() || *c == '_').collect();
    if NON_SMOOTH.contains(&key.as_str()) {
        return Err(Error::NonSmooth(spec.kind.clone()));
    }
    let bad = |reason: &str| Error::InvalidParameters { kind: spec.kind.clone(), reason: reason.into() };
    let kind = match key.as_str() {
        "disk" => GeometryKind::Disk { radius: param(spec, 0, 1.0) },
        "ellipse" => GeometryKind::Ellipse { a: param(spec, 0, 2.0), b: param(spec, 1, 1.0) },
        "annulus2d" | "annulus" => {
            let (inner, outer) = (param(spec, 0, 1.0), param(spec, 1, 2.0));
            if inner >= outer {
                return Err(bad("inner radius must be smaller than outer radius"));
            }
            GeometryKind::Annulus { inner, outer }
        }
        "ball3" | "ball4" => GeometryKind::Ball { dim: if key == "ball3" { 3 } else { 4 }, radius: param(spec, 0, 1.0) },
        "torus2" | "torus3" => GeometryKind::Torus { dim: if key == "torus2" { 2 } else { 3 }, side: param(spec, 0, 1.0) },
        "sphere2" | "sphere" => GeometryKind::Sphere2 { radius: param(spec, 0, 1.0) },
        _ => return Err(Error::UnknownKind(spec.kind.clone())),
    };
    let positive = match kind {
        GeometryKind::Disk { radius } | GeometryKind::Ball { radius, .. } | GeometryKind::Sphere2 { radius } => radius > 0.0,
        GeometryKind::Ellipse { a, b } => a > 0.0 && b > 0.0,
        GeometryKind::Annulus { inner, .. } => inner > 0.0,
        GeometryKind::Torus { side, .. } => side > 0.0,
    };
    if !positive || spec.params.iter().any(|p| !p.is_finite()) {
        return Err(bad("lengths must be positive and finite"));
    }
    if !(spec.resolution > 0.0) || !spec.resolution.is_finite() {
        return Err(bad("resolution must be positive"));
    }
    Ok(kind)
}

/// Builds a catalog geometry.
pub fn build_geometry(spec: &GeometrySpec) -> Result<GeometryHandle> {
    let kind = parse_kind(spec)?;
    let h = spec.resolution;
    let disc = match kind {
        GeometryKind::Disk { radius } => Discretization::Mesh(mesh::disk_mesh(radius, h)?),
        GeometryKind::Ellipse { a, b } => Discretization::Mesh(mesh::ellipse_mesh(a, b, h)?),
        GeometryKind::Annulus { inner, outer } => Discretization::Mesh(mesh::annulus_mesh(inner, outer, h)?),
        GeometryKind::Ball { dim: 3, radius } => Discretization::Mesh(mesh::ball3_mesh(radius, h)?),
        GeometryKind::Ball { radius, .. } => {
            let n = spec.samples.unwrap_or_else(|| ((PI * PI / 2.0) * (radius / h).powi(4)).ceil() as usize).max(16);
            let nb = ((n as f64).powf(0.75).ceil() as usize).max(16);
            Discretization::Samples(SampleSet::ball4(radius, n, nb))
        }
        GeometryKind::Torus { dim, side } => {
            let mut n = (side / h).round().max(4.0) as usize;
            n += n % 2;
            Discretization::Grid(StructuredGrid::periodic_cube(dim, n, side))
        }
        GeometryKind::Sphere2 { radius } => Discretization::Mesh(mesh::sphere_mesh(radius, h)?),
    };
    Ok(GeometryHandle::from_parts(spec.clone(), kind, disc))
}

impl GeometryHandle {
    fn from_parts(spec: GeometrySpec, kind: GeometryKind, disc: Discretization) -> Self {
        let (nodes, weights, boundary, boundary_weights) = match &disc {
            Discretization::Mesh(m) => {
                let (b, bw) = m.boundary_vertex_weights();
                (m.vertices.clone(), m.vertex_weights(), b, bw)
            }
            Discretization::Grid(g) => (g.points(), vec![g.cell_volume(); g.len()], Vec::new(), Vec::new()),
            Discretization::Samples(s) => {
                let (n, nb) = (s.len(), s.boundary_len());
                let mut nodes = s.points.clone();
                nodes.extend_from_slice(&s.boundary_points);
                let mut w = vec![s.volume / n as f64; n];
                w.extend(std::iter::repeat_n(0.0, nb));
                (nodes, w, (n..n + nb).collect(), vec![s.boundary_area / nb as f64; nb])
            }
        };
        let count = weights.len();
        let mut boundary_slot = vec![None; count];
        for (k, &i) in boundary.iter().enumerate() {
            boundary_slot[i] = Some(k);
        }
        GeometryHandle { spec, kind, disc, nodes, weights, boundary, boundary_weights, boundary_slot }
    }

    pub fn name(&self) -> String {
        self.kind.name()
    }

    pub fn dim(&self) -> usize {
        self.kind.ambient_dim()
    }

    pub fn manifold_dim(&self) -> usize {
        self.kind.manifold_dim()
    }

    pub fn has_boundary(&self) -> bool {
        self.kind.has_boundary()
    }

    pub fn mesh(&self) -> Option<&Mesh> {
        match &self.disc {
            Discretization::Mesh(m) => Some(m),
            _ => None,
        }
    }

    pub fn grid(&self) -> Option<&StructuredGrid> {
        match &self.disc {
            Discretization::Grid(g) => Some(g),
            _ => None,
        }
    }

    pub fn samples(&self) -> Option<&SampleSet> {
        match &self.disc {
            Discretization::Samples(s) => Some(s),
            _ => None,
        }
    }

    /// Mesh size: max cell diameter, grid spacing, or the sample-set
    /// equivalent spacing (|M|/N)^{1/n}.
    pub fn h(&self) -> f64 {
        match &self.disc {
            Discretization::Mesh(m) => m.h,
            Discretization::Grid(g) => g.spacing.iter().cloned().fold(0.0, f64::max),
            Discretization::Samples(s) => (s.volume / s.len() as f64).powf(1.0 / s.dim as f64),
        }
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.nodes[i * d..(i + 1) * d]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Lumped volume quadrature weight per node.
    pub fn volume_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Boundary node ids (sorted) and their surface weights.
    pub fn boundary_nodes(&self) -> &[usize] {
        &self.boundary
    }

    pub fn boundary_weights(&self) -> &[f64] {
        &self.boundary_weights
    }

    pub fn is_boundary_node(&self, i: usize) -> bool {
        self.boundary_slot[i].is_some()
    }

    /// Position of node `i` in the boundary list.
    pub fn boundary_slot(&self, i: usize) -> Option<usize> {
        self.boundary_slot[i]
    }

    /// Volume tally of the discretization.
    pub fn volume(&self) -> f64 {
        match &self.disc {
            Discretization::Mesh(m) => m.volume(),
            _ => self.weights.iter().sum(),
        }
    }

    pub fn boundary_area(&self) -> f64 {
        match &self.disc {
            Discretization::Mesh(m) => m.boundary_area(),
            _ => self.boundary_weights.iter().sum(),
        }
    }

    fn check_inside(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::OutsideGeometry(x.to_vec()));
        }
        let tol = 1e-9 * self.scale();
        let ok = match self.kind {
            GeometryKind::Disk { radius } | GeometryKind::Ball { radius, .. } => norm(x) <= radius + tol,
            GeometryKind::Ellipse { a, b } => (x[0] / a).powi(2) + (x[1] / b).powi(2) <= 1.0 + tol,
            GeometryKind::Annulus { inner, outer } => {
                let r = norm(x);
                r >= inner - tol && r <= outer + tol
            }
            GeometryKind::Torus { .. } => true,
            GeometryKind::Sphere2 { radius } => (norm(x) - radius).abs() <= tol,
        };
        if ok { Ok(()) } else { Err(Error::OutsideGeometry(x.to_vec())) }
    }

    /// Characteristic length of the geometry.
    pub fn scale(&self) -> f64 {
        match self.kind {
            GeometryKind::Disk { radius } | GeometryKind::Ball { radius, .. } | GeometryKind::Sphere2 { radius } => radius,
            GeometryKind::Ellipse { a, b } => a.max(b),
            GeometryKind::Annulus { outer, .. } => outer,
            GeometryKind::Torus { side, .. } => side,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.check_inside(x).is_ok()
    }

    /// Geodesic distance.
    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.check_inside(x)?;
        self.check_inside(y)?;
        Ok(self.distance_unchecked(x, y))
    }

    pub fn distance_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.kind {
            GeometryKind::Torus { side, .. } => min_image(x, y, side).iter().map(|v| v * v).sum::<f64>().sqrt(),
            GeometryKind::Sphere2 { radius } => {
                let c = crate::vecops::dot(x, y) / (norm(x) * norm(y));
                radius * c.clamp(-1.0, 1.0).acos()
            }
            _ => dist(x, y),
        }
    }

    /// Distance to the boundary, in closed form.
    pub fn boundary_distance(&self, x: &[f64]) -> Result<f64> {
        if !self.has_boundary() {
            return Err(Error::NoBoundary);
        }
        self.check_inside(x)?;
        Ok(self.boundary_distance_unchecked(x))
    }

    pub fn boundary_distance_unchecked(&self, x: &[f64]) -> f64 {
        match self.kind {
            GeometryKind::Disk { radius } | GeometryKind::Ball { radius, .. } => (radius - norm(x)).max(0.0),
            GeometryKind::Annulus { inner, outer } => {
                let r = norm(x);
                (r - inner).min(outer - r).max(0.0)
            }
            GeometryKind::Ellipse { a, b } => ellipse_distance(a, b, x[0], x[1]).0,
            _ => f64::INFINITY,
        }
    }

    /// Nearest boundary point of an interior point.
    pub fn nearest_boundary_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_inside(x)?;
        let r = norm(x);
        let radial = |rho: f64| -> Vec<f64> {
            if r > 0.0 {
                x.iter().map(|v| v * rho / r).collect()
            } else {
                let mut e = vec![0.0; x.len()];
                e[0] = rho;
                e
            }
        };
        match self.kind {
            GeometryKind::Disk { radius } | GeometryKind::Ball { radius, .. } => Ok(radial(radius)),
            GeometryKind::Annulus { inner, outer } => Ok(radial(if r - inner < outer - r { inner } else { outer })),
            GeometryKind::Ellipse { a, b } => {
                let (_, p) = ellipse_distance(a, b, x[0], x[1]);
                Ok(p.to_vec())
            }
            _ => Err(Error::NoBoundary),
        }
    }

    /// Outward unit normal at a boundary point.
    pub fn outward_normal(&self, y: &[f64]) -> Result<Vec<f64>> {
        let r = norm(y);
        match self.kind {
            GeometryKind::Disk { .. } | GeometryKind::Ball { .. } => Ok(y.iter().map(|v| v / r).collect()),
            GeometryKind::Annulus { inner, outer } => {
                let s = if (r - inner).abs() < (r - outer).abs() { -1.0 } else { 1.0 };
                Ok(y.iter().map(|v| s * v / r).collect())
            }
            GeometryKind::Ellipse { a, b } => {
                let g = [y[0] / (a * a), y[1] / (b * b)];
                let l = norm(&g);
                Ok(vec![g[0] / l, g[1] / l])
            }
            _ => Err(Error::NoBoundary),
        }
    }
}

/// Displacement y - x reduced to the fundamental cell around 0.
pub fn min_image(x: &[f64], y: &[f64], side: f64) -> Vec<f64> {
    x.iter()
        .zip(y)
        .map(|(a, b)| {
            let d = b - a;
            d - side * (d / side).round()
        })
        .collect()
}

/// Distance from (px, py) to the ellipse x^2/a^2 + y^2/b^2 = 1 and the
/// nearest point, by bisection on the Lagrange-multiplier equation.
pub fn ellipse_distance(a: f64, b: f64, px: f64, py: f64) -> (f64, [f64; 2]) {
    // reduce to first quadrant with e0 >= e1
    let swap = b > a;
    let (e0, e1) = if swap { (b, a) } else { (a, b) };
    let (mut y0, mut y1) = if swap { (py, px) } else { (px, py) };
    let (s0, s1) = (y0.signum(), y1.signum());
    y0 = y0.abs();
    y1 = y1.abs();
    let (x0, x1) = if y1 > 0.0 {
        if y0 > 0.0 {
            let z0 = y0 / e0;
            let z1 = y1 / e1;
            let g = z0 * z0 + z1 * z1 - 1.0;
            if g != 0.0 {
                let r0 = (e0 / e1).powi(2);
                let sbar = ellipse_root(r0, z0, z1, g);
                (r0 * y0 / (sbar + r0), y1 / (sbar + 1.0))
            } else {
                (y0, y1)
            }
        } else {
            (0.0, e1)
        }
    } else {
        let numer0 = e0 * y0;
        let denom0 = e0 * e0 - e1 * e1;
        if numer0 < denom0 {
            let xde0 = numer0 / denom0;
            (e0 * xde0, e1 * (1.0 - xde0 * xde0).max(0.0).sqrt())
        } else {
            (e0, 0.0)
        }
    };
    let d = ((x0 - y0).powi(2) + (x1 - y1).powi(2)).sqrt();
    let (q0, q1) = (x0 * if s0 < 0.0 { -1.0 } else { 1.0 }, x1 * if s1 < 0.0 { -1.0 } else { 1.0 });
    let p = if swap { [q1, q0] } else { [q0, q1] };
    (d, p)
}

fn ellipse_root(r0: f64, z0: f64, z1: f64, g: f64) -> f64 {
    let n0 = r0 * z0;
    let mut s0 = z1 - 1.0;
    let mut s1 = if g < 0.0 { 0.0 } else { n0.hypot(z1) - 1.0 };
    let mut s = 0.0;
    for _ in 0..1100 {
        s = 0.5 * (s0 + s1);
        if s == s0 || s == s1 {
            break;
        }
        let ratio0 = n0 / (s + r0);
        let ratio1 = z1 / (s + 1.0);
        let gv = ratio0 * ratio0 + ratio1 * ratio1 - 1.0;
        if gv > 0.0 {
            s0 = s;
        } else if gv < 0.0 {
            s1 = s;
        } else {
            break;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_examples() {
        let d = build_geometry(&GeometrySpec::new("disk", &[1.0], 0.05)).unwrap();
        assert!((d.volume() - PI).abs() / PI < 5e-3);
        let t = build_geometry(&GeometrySpec::new("torus2", &[1.0], 1.0 / 256.0)).unwrap();
        assert!(!t.has_boundary());
        assert_eq!(t.volume(), 1.0);
        assert!(t.boundary_nodes().is_empty());
        assert!(!d.boundary_nodes().is_empty());
    }

    #[test]
    fn rejects_corners_and_unknown() {
        assert!(matches!(build_geometry(&GeometrySpec::new("square", &[1.0], 0.1)), Err(Error::NonSmooth(_))));
        assert!(matches!(build_geometry(&GeometrySpec::new("hexagon", &[1.0], 0.1)), Err(Error::UnknownKind(_))));
        assert!(build_geometry(&GeometrySpec::new("annulus2d", &[2.0, 1.0], 0.1)).is_err());
    }

    #[test]
    fn distances() {
        let t = build_geometry(&GeometrySpec::new("torus2", &[1.0], 1.0 / 16.0)).unwrap();
        assert!((t.distance(&[0.1, 0.0], &[0.9, 0.0]).unwrap() - 0.2).abs() < 1e-12);
        let s = build_geometry(&GeometrySpec::new("sphere2", &[1.0], 0.5)).unwrap();
        assert!((s.distance(&[0.0, 0.0, 1.0], &[0.0, 0.0, -1.0]).unwrap() - PI).abs() < 1e-12);
        let a = build_geometry(&GeometrySpec::new("annulus2d", &[1.0, 2.0], 0.2)).unwrap();
        assert!((a.boundary_distance(&[1.25, 0.0]).unwrap() - 0.25).abs() < 1e-12);
        assert!(matches!(t.boundary_distance(&[0.1, 0.1]), Err(Error::NoBoundary)));
        assert!(d_outside());
    }

    fn d_outside() -> bool {
        let d = build_geometry(&GeometrySpec::new("disk", &[1.0], 0.2)).unwrap();
        matches!(d.distance(&[2.0, 0.0], &[0.0, 0.0]), Err(Error::OutsideGeometry(_)))
    }

    #[test]
    fn ellipse_distance_matches_brute_force() {
        let (a, b) = (2.0, 1.0);
        for &(x, y) in &[(0.3, 0.2), (1.5, 0.1), (-0.4, -0.7), (0.0, 0.5), (1.0, 0.0), (0.0, 0.0)] {
            let (d, p) = ellipse_distance(a, b, x, y);
            let brute = (0..200_000)
                .map(|i| {
                    let t = 2.0 * PI * i as f64 / 200_000.0;
                    ((a * t.cos() - x).powi(2) + (b * t.sin() - y).powi(2)).sqrt()
                })
                .fold(f64::INFINITY, f64::min);
            assert!((d - brute).abs() < 1e-8, "({x},{y}): {d} vs {brute}");
            assert!(((p[0] / a).powi(2) + (p[1] / b).powi(2) - 1.0).abs() < 1e-10);
        }
    }
}
