//! Simplicial meshes and the meshers for the catalog shapes.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::vecops::{cross, dot, factorial, norm, sub};

/// Simplicial mesh. `dim` is the coordinate dimension, `cell_dim` the
/// simplex dimension (they differ only for the sphere surface).
#[derive(Clone, Debug)]
pub struct Mesh {
    pub dim: usize,
    pub cell_dim: usize,
    pub vertices: Vec<f64>,
    pub cells: Vec<usize>,
    pub boundary_faces: Vec<usize>,
    pub face_normals: Vec<f64>,
    pub h: f64,
}

impl Mesh {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len() / self.dim
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len() / (self.cell_dim + 1)
    }

    pub fn n_faces(&self) -> usize {
        if self.cell_dim == 0 {
            0
        } else {
            self.boundary_faces.len() / self.cell_dim
        }
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i * self.dim..(i + 1) * self.dim]
    }

    pub fn cell(&self, c: usize) -> &[usize] {
        let k = self.cell_dim + 1;
        &self.cells[c * k..(c + 1) * k]
    }

    pub fn face(&self, f: usize) -> &[usize] {
        let k = self.cell_dim;
        &self.boundary_faces[f * k..(f + 1) * k]
    }

    pub fn face_normal(&self, f: usize) -> &[f64] {
        &self.face_normals[f * self.dim..(f + 1) * self.dim]
    }

    /// Measure of the simplex spanned by the given vertex ids.
    pub fn simplex_measure(&self, ids: &[usize]) -> f64 {
        let k = ids.len() - 1;
        if k == 0 {
            return 1.0;
        }
        let v0 = self.vertex(ids[0]);
        let edges: Vec<Vec<f64>> = ids[1..].iter().map(|&i| sub(self.vertex(i), v0)).collect();
        let gram: Vec<Vec<f64>> = edges
            .iter()
            .map(|a| edges.iter().map(|b| dot(a, b)).collect())
            .collect();
        crate::vecops::det(&gram).max(0.0).sqrt() / factorial(k)
    }

    pub fn cell_volume(&self, c: usize) -> f64 {
        self.simplex_measure(self.cell(c))
    }

    pub fn face_area(&self, f: usize) -> f64 {
        self.simplex_measure(self.face(f))
    }

    pub fn volume(&self) -> f64 {
        (0..self.n_cells()).map(|c| self.cell_volume(c)).sum()
    }

    pub fn boundary_area(&self) -> f64 {
        (0..self.n_faces()).map(|f| self.face_area(f)).sum()
    }

    /// Lumped (barycentric) volume weight of every vertex.
    pub fn vertex_weights(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.n_vertices()];
        let k = (self.cell_dim + 1) as f64;
        for c in 0..self.n_cells() {
            let v = self.cell_volume(c) / k;
            for &i in self.cell(c) {
                w[i] += v;
            }
        }
        w
    }

    /// Boundary vertices in increasing order with their lumped face weights.
    pub fn boundary_vertex_weights(&self) -> (Vec<usize>, Vec<f64>) {
        let mut acc: HashMap<usize, f64> = HashMap::new();
        let k = self.cell_dim as f64;
        for f in 0..self.n_faces() {
            let a = self.face_area(f) / k;
            for &i in self.face(f) {
                *acc.entry(i).or_insert(0.0) += a;
            }
        }
        let mut ids: Vec<usize> = acc.keys().copied().collect();
        ids.sort_unstable();
        let w = ids.iter().map(|i| acc[i]).collect();
        (ids, w)
    }

    /// Checks orientation, closedness of the boundary and unit normals.
    pub fn validate(&self) -> Result<()> {
        for c in 0..self.n_cells() {
            if self.cell_dim == self.dim {
                if signed_volume(self, self.cell(c)) <= 0.0 {
                    return Err(Error::BadMesh(format!("cell {c} not positively oriented")));
                }
            } else if self.cell_dim == 2 && self.dim == 3 {
                let ids = self.cell(c);
                let (a, b, cc) = (self.vertex(ids[0]), self.vertex(ids[1]), self.vertex(ids[2]));
                let n = cross(&sub(b, a), &sub(cc, a));
                let centroid: Vec<f64> = (0..3).map(|d| (a[d] + b[d] + cc[d]) / 3.0).collect();
                if dot(&n, &centroid) <= 0.0 {
                    return Err(Error::BadMesh(format!("surface cell {c} oriented inward")));
                }
            }
        }
        // every ridge of the boundary must be shared by exactly two faces
        let mut ridges: HashMap<Vec<usize>, usize> = HashMap::new();
        for f in 0..self.n_faces() {
            let face = self.face(f);
            for skip in 0..face.len() {
                let mut r: Vec<usize> = face
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                r.sort_unstable();
                *ridges.entry(r).or_insert(0) += 1;
            }
        }
        if let Some((r, n)) = ridges.iter().find(|(_, &n)| n != 2) {
            return Err(Error::BadMesh(format!("boundary ridge {r:?} shared by {n} faces")));
        }
        for f in 0..self.n_faces() {
            let l = norm(self.face_normal(f));
            if (l - 1.0).abs() > 1e-12 {
                return Err(Error::BadMesh(format!("face {f} normal has length {l}")));
            }
        }
        Ok(())
    }

    /// Builds a mesh from raw cells: fixes orientation, extracts boundary
    /// faces with outward normals and measures h.
    pub fn from_cells(dim: usize, cell_dim: usize, vertices: Vec<f64>, mut cells: Vec<usize>) -> Result<Self> {
        let k = cell_dim + 1;
        let mut mesh = Mesh {
            dim,
            cell_dim,
            vertices,
            cells: Vec::new(),
            boundary_faces: Vec::new(),
            face_normals: Vec::new(),
            h: 0.0,
        };
        for c in 0..cells.len() / k {
            let ids = &mut cells[c * k..(c + 1) * k];
            if cell_dim == dim {
                let s = signed_volume(&mesh, ids);
                if s.abs() < 1e-300 || !s.is_finite() {
                    return Err(Error::DegenerateCell(c));
                }
                if s < 0.0 {
                    ids.swap(0, 1);
                }
            } else {
                let (a, b, cc) = (mesh.vertex(ids[0]), mesh.vertex(ids[1]), mesh.vertex(ids[2]));
                let n = cross(&sub(b, a), &sub(cc, a));
                if norm(&n) < 1e-300 {
                    return Err(Error::DegenerateCell(c));
                }
                let centroid: Vec<f64> = (0..3).map(|d| (a[d] + b[d] + cc[d]) / 3.0).collect();
                if dot(&n, &centroid) < 0.0 {
                    ids.swap(1, 2);
                }
            }
        }
        mesh.cells = cells;

        let mut h: f64 = 0.0;
        for c in 0..mesh.n_cells() {
            let ids = mesh.cell(c);
            for i in 0..k {
                for j in i + 1..k {
                    h = h.max(crate::vecops::dist(mesh.vertex(ids[i]), mesh.vertex(ids[j])));
                }
            }
        }
        mesh.h = h;

        if cell_dim == dim {
            let mut seen: HashMap<Vec<usize>, (usize, usize, usize)> = HashMap::new();
            let mut order: Vec<Vec<usize>> = Vec::new();
            for c in 0..mesh.n_cells() {
                let ids = mesh.cell(c).to_vec();
                for skip in 0..k {
                    let mut key: Vec<usize> = ids
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    key.sort_unstable();
                    let e = seen.entry(key.clone()).or_insert_with(|| {
                        order.push(key.clone());
                        (0, c, ids[skip])
                    });
                    e.0 += 1;
                }
            }
            for key in order {
                let (count, _, opposite) = seen[&key];
                if count != 1 {
                    continue;
                }
                let mut face = key;
                let (normal, flip) = outward_normal(&mesh, &face, opposite);
                if flip && face.len() >= 2 {
                    face.swap(0, 1);
                }
                mesh.boundary_faces.extend_from_slice(&face);
                mesh.face_normals.extend_from_slice(&normal);
            }
        }
        Ok(mesh)
    }
}

fn signed_volume(mesh: &Mesh, ids: &[usize]) -> f64 {
    let v0 = mesh.vertex(ids[0]);
    let rows: Vec<Vec<f64>> = ids[1..].iter().map(|&i| sub(mesh.vertex(i), v0)).collect();
    crate::vecops::det(&rows)
}

/// Unit normal of a boundary face pointing away from the opposite vertex,
/// plus whether the face's vertex order must be swapped for that normal
/// to follow the right-hand rule.
fn outward_normal(mesh: &Mesh, face: &[usize], opposite: usize) -> (Vec<f64>, bool) {
    let a = mesh.vertex(face[0]);
    let to_opp = sub(mesh.vertex(opposite), a);
    let mut n = match mesh.dim {
        2 => {
            let e = sub(mesh.vertex(face[1]), a);
            vec![e[1], -e[0]]
        }
        3 => cross(&sub(mesh.vertex(face[1]), a), &sub(mesh.vertex(face[2]), a)).to_vec(),
        _ => unreachable!("meshes are 2D or 3D"),
    };
    let flip = dot(&n, &to_opp) > 0.0;
    if flip {
        n.iter_mut().for_each(|x| *x = -*x);
    }
    let l = norm(&n);
    (n.iter().map(|x| x / l).collect(), flip)
}

/// One closed ring of boundary-parallel nodes: positions and the
/// parametric fraction in [0, 1) of each node.
struct Ring {
    pts: Vec<[f64; 2]>,
    frac: Vec<f64>,
}

fn stitch(rings: &[Ring]) -> (Vec<f64>, Vec<usize>) {
    let mut verts = Vec::new();
    let mut offset = Vec::new();
    for r in rings {
        offset.push(verts.len() / 2);
        for p in &r.pts {
            verts.extend_from_slice(p);
        }
    }
    let mut tris = Vec::new();
    for k in 0..rings.len() - 1 {
        let (a, b) = (&rings[k], &rings[k + 1]);
        let (oa, ob) = (offset[k], offset[k + 1]);
        let (na, nb) = (a.pts.len(), b.pts.len());
        if na == 1 {
            for j in 0..nb {
                tris.extend_from_slice(&[oa, ob + j, ob + (j + 1) % nb]);
            }
            continue;
        }
        let next = |f: &[f64], i: usize| if i + 1 >= f.len() { f[0] + 1.0 } else { f[i + 1] };
        let (mut i, mut j) = (0usize, 0usize);
        while i < na || j < nb {
            let fa = if i < na { next(&a.frac, i) } else { f64::INFINITY };
            let fb = if j < nb { next(&b.frac, j) } else { f64::INFINITY };
            if fa <= fb {
                tris.extend_from_slice(&[oa + i % na, oa + (i + 1) % na, ob + j % nb]);
                i += 1;
            } else {
                tris.extend_from_slice(&[oa + i % na, ob + j % nb, ob + (j + 1) % nb]);
                j += 1;
            }
        }
    }
    (verts, tris)
}

fn orient2(p: &[f64], a: usize, b: usize, c: usize) -> f64 {
    let (ax, ay) = (p[2 * a], p[2 * a + 1]);
    let (bx, by) = (p[2 * b], p[2 * b + 1]);
    let (cx, cy) = (p[2 * c], p[2 * c + 1]);
    (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
}

fn in_circle(p: &[f64], a: usize, b: usize, c: usize, d: usize) -> f64 {
    let (dx, dy) = (p[2 * d], p[2 * d + 1]);
    let row = |i: usize| {
        let x = p[2 * i] - dx;
        let y = p[2 * i + 1] - dy;
        [x, y, x * x + y * y]
    };
    let (ra, rb, rc) = (row(a), row(b), row(c));
    ra[0] * (rb[1] * rc[2] - rb[2] * rc[1]) - ra[1] * (rb[0] * rc[2] - rb[2] * rc[0])
        + ra[2] * (rb[0] * rc[1] - rb[1] * rc[0])
}

/// Lawson edge flips until every interior edge is locally Delaunay.
fn delaunay_flips(p: &[f64], tris: &mut [usize]) {
    let nt = tris.len() / 3;
    for t in 0..nt {
        if orient2(p, tris[3 * t], tris[3 * t + 1], tris[3 * t + 2]) < 0.0 {
            tris.swap(3 * t + 1, 3 * t + 2);
        }
    }
    for _pass in 0..200 {
        let mut edges: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for t in 0..nt {
            for l in 0..3 {
                let (u, v) = (tris[3 * t + (l + 1) % 3], tris[3 * t + (l + 2) % 3]);
                edges.entry((u.min(v), u.max(v))).or_default().push((t, l));
            }
        }
        let mut keys: Vec<(usize, usize)> = edges.keys().copied().collect();
        keys.sort_unstable();
        let mut touched = vec![false; nt];
        let mut flips = 0;
        for key in keys {
            let adj = &edges[&key];
            if adj.len() != 2 {
                continue;
            }
            let ((t1, l1), (t2, l2)) = (adj[0], adj[1]);
            if touched[t1] || touched[t2] {
                continue;
            }
            let c = tris[3 * t1 + l1];
            let d = tris[3 * t2 + l2];
            let a = tris[3 * t1 + (l1 + 1) % 3];
            let b = tris[3 * t1 + (l1 + 2) % 3];
            let scale = {
                let e = [p[2 * a] - p[2 * b], p[2 * a + 1] - p[2 * b + 1]];
                (e[0] * e[0] + e[1] * e[1]).powi(2)
            };
            if in_circle(p, a, b, c, d) <= 1e-10 * scale {
                continue;
            }
            // new triangles (c, a, d) and (d, b, c) must stay positive
            if orient2(p, c, a, d) <= 0.0 || orient2(p, d, b, c) <= 0.0 {
                continue;
            }
            tris[3 * t1..3 * t1 + 3].copy_from_slice(&[c, a, d]);
            tris[3 * t2..3 * t2 + 3].copy_from_slice(&[d, b, c]);
            touched[t1] = true;
            touched[t2] = true;
            flips += 1;
        }
        if flips == 0 {
            break;
        }
    }
}

fn circle_ring(radius: f64, n: usize, shift: f64) -> Ring {
    let frac: Vec<f64> = (0..n).map(|j| (j as f64 + shift) / n as f64).collect();
    let pts = frac
        .iter()
        .map(|f| {
            let t = 2.0 * PI * f;
            [radius * t.cos(), radius * t.sin()]
        })
        .collect();
    Ring { pts, frac }
}

fn finish_2d(rings: Vec<Ring>) -> Result<Mesh> {
    let (verts, mut tris) = stitch(&rings);
    delaunay_flips(&verts, &mut tris);
    let mesh = Mesh::from_cells(2, 2, verts, tris)?;
    mesh.validate()?;
    Ok(mesh)
}

fn ring_count(len: f64, h: f64, min: usize) -> usize {
    ((len / h).ceil() as usize).max(min)
}

pub fn disk_mesh(radius: f64, h: f64) -> Result<Mesh> {
    let m = ring_count(radius, h, 2);
    let mut rings = vec![Ring { pts: vec![[0.0, 0.0]], frac: vec![0.0] }];
    for k in 1..=m {
        let rho = radius * k as f64 / m as f64;
        let n = ring_count(2.0 * PI * rho, h, 6);
        let shift = if k % 2 == 1 { 0.5 } else { 0.0 };
        rings.push(circle_ring(rho, n, if k == m { 0.0 } else { shift }));
    }
    finish_2d(rings)
}

pub fn annulus_mesh(inner: f64, outer: f64, h: f64) -> Result<Mesh> {
    let m = ring_count(outer - inner, h, 2);
    let rings = (0..=m)
        .map(|k| {
            let rho = inner + (outer - inner) * k as f64 / m as f64;
            let n = ring_count(2.0 * PI * rho, h, 8);
            let shift = if k % 2 == 1 && k != m { 0.5 } else { 0.0 };
            circle_ring(rho, n, shift)
        })
        .collect();
    finish_2d(rings)
}

/// Arclength table of the ellipse (a cos t, b sin t), used to place nodes
/// uniformly in arclength.
pub struct EllipseArc {
    a: f64,
    b: f64,
    t: Vec<f64>,
    s: Vec<f64>,
}

impl EllipseArc {
    pub fn new(a: f64, b: f64) -> Self {
        let n = 20_000;
        let speed = |t: f64| (a * a * t.sin().powi(2) + b * b * t.cos().powi(2)).sqrt();
        let mut t = Vec::with_capacity(n + 1);
        let mut s = Vec::with_capacity(n + 1);
        let dt = 2.0 * PI / n as f64;
        let mut acc = 0.0;
        for i in 0..=n {
            let ti = i as f64 * dt;
            if i > 0 {
                let t0 = ti - dt;
                acc += dt / 6.0 * (speed(t0) + 4.0 * speed(t0 + 0.5 * dt) + speed(ti));
            }
            t.push(ti);
            s.push(acc);
        }
        EllipseArc { a, b, t, s }
    }

    pub fn perimeter(&self) -> f64 {
        *self.s.last().unwrap()
    }

    /// Parameter t at arclength fraction f, refined by Newton steps.
    pub fn param_at(&self, f: f64) -> f64 {
        let target = f * self.perimeter();
        let i = self.s.partition_point(|&v| v < target).clamp(1, self.s.len() - 1);
        let (s0, s1) = (self.s[i - 1], self.s[i]);
        let mut t = self.t[i - 1] + (target - s0) / (s1 - s0) * (self.t[i] - self.t[i - 1]);
        let speed = |t: f64| (self.a * self.a * t.sin().powi(2) + self.b * self.b * t.cos().powi(2)).sqrt();
        for _ in 0..3 {
            // local arclength from the bracket start by Simpson
            let t0 = self.t[i - 1];
            let sl = s0 + (t - t0) / 6.0 * (speed(t0) + 4.0 * speed(0.5 * (t0 + t)) + speed(t));
            t -= (sl - target) / speed(t);
        }
        t
    }
}

pub fn ellipse_mesh(a: f64, b: f64, h: f64) -> Result<Mesh> {
    let arc = EllipseArc::new(a, b);
    let m = ring_count(a.max(b), h, 2);
    let mut rings = vec![Ring { pts: vec![[0.0, 0.0]], frac: vec![0.0] }];
    for k in 1..=m {
        let scale = k as f64 / m as f64;
        let n = ring_count(scale * arc.perimeter(), h, 6);
        let shift = if k % 2 == 1 && k != m { 0.5 } else { 0.0 };
        let frac: Vec<f64> = (0..n).map(|j| (j as f64 + shift) / n as f64).collect();
        let pts = frac
            .iter()
            .map(|&f| {
                let t = arc.param_at(f);
                [scale * a * t.cos(), scale * b * t.sin()]
            })
            .collect();
        rings.push(Ring { pts, frac });
    }
    finish_2d(rings)
}

/// Ball in R^3: Kuhn tetrahedra on a cube grid, reflected per octant so the
/// split is symmetric, then pushed radially onto the ball.
pub fn ball3_mesh(radius: f64, h: f64) -> Result<Mesh> {
    let m = ring_count(radius, h, 2) as isize;
    let side = (2 * m + 1) as usize;
    let id = |i: isize, j: isize, k: isize| ((i + m) as usize) + side * (((j + m) as usize) + side * ((k + m) as usize));
    let mut verts = Vec::with_capacity(3 * side * side * side);
    for k in -m..=m {
        for j in -m..=m {
            for i in -m..=m {
                let p = [i as f64 / m as f64, j as f64 / m as f64, k as f64 / m as f64];
                let inf = p.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
                let l2 = norm(&p);
                let s = if l2 > 0.0 { radius * inf / l2 } else { 0.0 };
                verts.extend(p.iter().map(|x| x * s));
            }
        }
    }
    const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let mut cells = Vec::new();
    for k in -m..m {
        for j in -m..m {
            for i in -m..m {
                let lo = [i, j, k];
                let mut start = [0isize; 3];
                let mut dir = [0isize; 3];
                for a in 0..3 {
                    if lo[a] < 0 {
                        start[a] = lo[a] + 1;
                        dir[a] = -1;
                    } else {
                        start[a] = lo[a];
                        dir[a] = 1;
                    }
                }
                for perm in PERMS {
                    let mut cur = start;
                    let mut tet = vec![id(cur[0], cur[1], cur[2])];
                    for &a in &perm {
                        cur[a] += dir[a];
                        tet.push(id(cur[0], cur[1], cur[2]));
                    }
                    cells.extend(tet);
                }
            }
        }
    }
    let mesh = Mesh::from_cells(3, 3, verts, cells)?;
    mesh.validate()?;
    Ok(mesh)
}

/// Icosphere on the sphere of the given radius.
pub fn sphere_mesh(radius: f64, h: f64) -> Result<Mesh> {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = vec![
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ];
    for v in verts.iter_mut() {
        let l = norm(v);
        v.iter_mut().for_each(|x| *x /= l);
    }
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    let mut edge_len = 1.0514622242382672 * radius;
    while edge_len > h {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(faces.len() * 4);
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| {
            *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let (p, q) = (verts[a], verts[b]);
                let mut m = [(p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0, (p[2] + q[2]) / 2.0];
                let l = norm(&m);
                m.iter_mut().for_each(|x| *x /= l);
                verts.push(m);
                verts.len() - 1
            })
        };
        for f in &faces {
            let ab = midpoint(f[0], f[1], &mut verts);
            let bc = midpoint(f[1], f[2], &mut verts);
            let ca = midpoint(f[2], f[0], &mut verts);
            next.push([f[0], ab, ca]);
            next.push([f[1], bc, ab]);
            next.push([f[2], ca, bc]);
            next.push([ab, bc, ca]);
        }
        faces = next;
        edge_len /= 2.0;
    }
    let flat: Vec<f64> = verts.iter().flat_map(|v| v.iter().map(|x| x * radius)).collect();
    let cells: Vec<usize> = faces.iter().flatten().copied().collect();
    let mesh = Mesh::from_cells(3, 2, flat, cells)?;
    mesh.validate()?;
    Ok(mesh)
}
