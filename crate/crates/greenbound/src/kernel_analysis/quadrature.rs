//! Quadrature rules centred at a point: polar rays for weakly singular
//! volume integrals and graded rules on the boundary.

use std::f64::consts::PI;

use crate::geometry::{GeometryHandle, GeometryKind};
use crate::special::gauss_legendre;
use crate::vecops::{dot, norm};

/// Radial grading r = T u^K; integrands like r^{a−1} stay smooth for a ≥ 1/K.
pub const GRADING: i32 = 10;

#[derive(Clone, Debug)]
pub struct PolarNode {
    pub dir: Vec<f64>,
    pub r: f64,
    /// Includes r^{n−1} dr dω.
    pub w: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct PolarResolution {
    pub directions: usize,
    pub panels: usize,
    pub order: usize,
}

impl PolarResolution {
    pub fn for_dim(n: usize) -> Self {
        if n == 2 {
            PolarResolution { directions: 512, panels: 16, order: 16 }
        } else {
            PolarResolution { directions: 48, panels: 8, order: 12 }
        }
    }
}

/// Orthonormal frame whose first vector is `e`.
fn frame3(e: &[f64]) -> [[f64; 3]; 3] {
    let e0 = [e[0], e[1], e[2]];
    let helper = if e0[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let c = dot(&helper, &e0);
    let mut e1 = [helper[0] - c * e0[0], helper[1] - c * e0[1], helper[2] - c * e0[2]];
    let l = norm(&e1);
    e1.iter_mut().for_each(|v| *v /= l);
    let e2 = crate::vecops::cross(&e0, &e1);
    [e0, e1, e2]
}

/// Unit directions with solid-angle weights. In 3D the pole points along
/// `axis` so that features near the nearest boundary point are clustered.
pub fn directions(n: usize, count: usize, axis: &[f64]) -> Vec<(Vec<f64>, f64)> {
    if n == 2 {
        let phi0 = axis[1].atan2(axis[0]);
        (0..count)
            .map(|k| {
                let t = phi0 + 2.0 * PI * (k as f64 + 0.5) / count as f64;
                (vec![t.cos(), t.sin()], 2.0 * PI / count as f64)
            })
            .collect()
    } else {
        let f = frame3(axis);
        let (x, w) = gauss_legendre(count);
        let naz = 2 * count;
        let mut out = Vec::with_capacity(count * naz);
        for (ct, wt) in x.iter().zip(&w) {
            let st = (1.0 - ct * ct).max(0.0).sqrt();
            for k in 0..naz {
                let p = 2.0 * PI * (k as f64 + 0.5) / naz as f64;
                let (sp, cp) = p.sin_cos();
                let d: Vec<f64> = (0..3).map(|a| ct * f[0][a] + st * (cp * f[1][a] + sp * f[2][a])).collect();
                out.push((d, wt * 2.0 * PI / naz as f64));
            }
        }
        out
    }
}

/// Parameter intervals {t > 0 : c + t·d inside} along a ray. From a
/// boundary point, outward rays exit at t ≈ 0 up to rounding; those
/// degenerate intervals are dropped.
pub fn ray_intervals(g: &GeometryHandle, c: &[f64], d: &[f64]) -> Vec<(f64, f64)> {
    let min_len = 1e-12 * g.scale();
    let mut v = raw_intervals(g, c, d);
    v.retain(|(t0, t1)| t1 - t0 > min_len);
    v
}

fn raw_intervals(g: &GeometryHandle, c: &[f64], d: &[f64]) -> Vec<(f64, f64)> {
    let exit_sphere = |rad: f64| -> Option<(f64, f64)> {
        let b = dot(c, d);
        let disc = b * b - dot(c, c) + rad * rad;
        if disc <= 0.0 {
            None
        } else {
            let s = disc.sqrt();
            Some((-b - s, -b + s))
        }
    };
    match g.kind {
        GeometryKind::Disk { radius } | GeometryKind::Ball { radius, .. } => match exit_sphere(radius) {
            Some((_, t)) if t > 0.0 => vec![(0.0, t)],
            _ => vec![],
        },
        GeometryKind::Annulus { inner, outer } => {
            let Some((_, tb)) = exit_sphere(outer).filter(|(_, t)| *t > 0.0) else {
                return vec![];
            };
            match exit_sphere(inner) {
                Some((t1, t2)) if t2 > 0.0 => {
                    let mut v = Vec::new();
                    if t1 > 1e-14 * outer {
                        v.push((0.0, t1));
                    }
                    if tb > t2 {
                        v.push((t2.max(0.0), tb));
                    }
                    v
                }
                _ => vec![(0.0, tb)],
            }
        }
        GeometryKind::Ellipse { a, b } => {
            let (qa, qb) = (1.0 / (a * a), 1.0 / (b * b));
            let aa = d[0] * d[0] * qa + d[1] * d[1] * qb;
            let bb = c[0] * d[0] * qa + c[1] * d[1] * qb;
            let cc = c[0] * c[0] * qa + c[1] * c[1] * qb - 1.0;
            let disc = bb * bb - aa * cc;
            if disc <= 0.0 {
                return vec![];
            }
            let t = (-bb + disc.sqrt()) / aa;
            if t > 0.0 {
                vec![(0.0, t)]
            } else {
                vec![]
            }
        }
        GeometryKind::Torus { side, .. } => {
            let t = d.iter().map(|v| if v.abs() < 1e-300 { f64::INFINITY } else { 0.5 * side / v.abs() }).fold(f64::INFINITY, f64::min);
            vec![(0.0, t)]
        }
        GeometryKind::Sphere2 { .. } => vec![],
    }
}

/// Polar rule over the domain centred at `c` (Euclidean domains and the
/// torus cell around `c`). The first interval of every ray is graded
/// towards r = 0.
pub fn polar_rule(g: &GeometryHandle, c: &[f64], res: PolarResolution) -> Vec<PolarNode> {
    let n = g.dim();
    let axis: Vec<f64> = if norm(c) > 1e-12 { c.iter().map(|v| v / norm(c)).collect() } else { unit(n) };
    let (gx, gw) = gauss_legendre(res.order);
    let mut out = Vec::new();
    for (d, wd) in directions(n, res.directions, &axis) {
        for (k, (t0, t1)) in ray_intervals(g, c, &d).into_iter().enumerate() {
            for p in 0..res.panels {
                let (u0, u1) = (p as f64 / res.panels as f64, (p + 1) as f64 / res.panels as f64);
                for (x, w) in gx.iter().zip(&gw) {
                    let u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * x;
                    let wu = 0.5 * (u1 - u0) * w;
                    let (r, dr) = if k == 0 && t0 == 0.0 {
                        (t1 * u.powi(GRADING), t1 * GRADING as f64 * u.powi(GRADING - 1))
                    } else {
                        (t0 + (t1 - t0) * u, t1 - t0)
                    };
                    out.push(PolarNode { dir: d.clone(), r, w: wd * wu * dr * r.powi(n as i32 - 1) });
                }
            }
        }
    }
    out
}

fn unit(n: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[0] = 1.0;
    e
}

/// Geodesic polar rule on the round sphere about `c`: nodes (θ, y, w).
pub fn sphere_polar_rule(radius: f64, c: &[f64], res: PolarResolution) -> Vec<(f64, Vec<f64>, f64)> {
    let e: Vec<f64> = c.iter().map(|v| v / norm(c)).collect();
    let f = frame3(&e);
    let (gx, gw) = gauss_legendre(res.order);
    let naz = 2 * res.directions;
    let mut out = Vec::new();
    for p in 0..res.panels {
        let (u0, u1) = (p as f64 / res.panels as f64, (p + 1) as f64 / res.panels as f64);
        for (x, w) in gx.iter().zip(&gw) {
            let u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * x;
            let wu = 0.5 * (u1 - u0) * w;
            let th = PI * u.powi(GRADING);
            let dth = PI * GRADING as f64 * u.powi(GRADING - 1);
            let (st, ct) = th.sin_cos();
            for k in 0..naz {
                let ph = 2.0 * PI * (k as f64 + 0.5) / naz as f64;
                let (sp, cp) = ph.sin_cos();
                let y: Vec<f64> = (0..3).map(|a| radius * (ct * f[0][a] + st * (cp * f[1][a] + sp * f[2][a]))).collect();
                out.push((th, y, radius * radius * st * dth * wu * 2.0 * PI / naz as f64));
            }
        }
    }
    out
}

/// Boundary rule graded towards the boundary point nearest to `x`.
/// Returns (point, outward normal, weight).
pub fn boundary_rule(g: &GeometryHandle, x: &[f64], res: PolarResolution) -> Vec<(Vec<f64>, Vec<f64>, f64)> {
    let (gx, gw) = gauss_legendre(res.order);
    let graded = |f: &mut dyn FnMut(f64, f64)| {
        for p in 0..res.panels {
            let (u0, u1) = (p as f64 / res.panels as f64, (p + 1) as f64 / res.panels as f64);
            for (t, w) in gx.iter().zip(&gw) {
                let u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * t;
                let wu = 0.5 * (u1 - u0) * w;
                f(PI * u.powi(3), 3.0 * PI * u * u * wu);
            }
        }
    };
    let mut out = Vec::new();
    let mut circle = |rad: f64, sign: f64| {
        let phi0 = x[1].atan2(x[0]);
        graded(&mut |s, ws| {
            for side in [-1.0, 1.0] {
                let ph = phi0 + side * s;
                let nrm = vec![sign * ph.cos(), sign * ph.sin()];
                out.push((vec![rad * ph.cos(), rad * ph.sin()], nrm, rad * ws));
            }
        });
    };
    match g.kind {
        GeometryKind::Disk { radius } => circle(radius, 1.0),
        GeometryKind::Annulus { inner, outer } => {
            circle(inner, -1.0);
            circle(outer, 1.0);
        }
        GeometryKind::Ball { dim: 3, radius } => {
            let e: Vec<f64> = if norm(x) > 1e-12 { x.iter().map(|v| v / norm(x)).collect() } else { unit(3) };
            let f = frame3(&e);
            let naz = 2 * res.directions;
            graded(&mut |th, wt| {
                let (st, ct) = th.sin_cos();
                for k in 0..naz {
                    let ph = 2.0 * PI * (k as f64 + 0.5) / naz as f64;
                    let (sp, cp) = ph.sin_cos();
                    let nrm: Vec<f64> = (0..3).map(|a| ct * f[0][a] + st * (cp * f[1][a] + sp * f[2][a])).collect();
                    let y = nrm.iter().map(|v| radius * v).collect();
                    out.push((y, nrm, radius * radius * st * wt * 2.0 * PI / naz as f64));
                }
            });
        }
        _ => {}
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_geometry, GeometrySpec};

    fn geo(kind: &str, params: &[f64]) -> GeometryHandle {
        build_geometry(&GeometrySpec::new(kind, params, 0.3)).unwrap()
    }

    #[test]
    fn polar_rules_measure_volume() {
        for (kind, params, c) in [
            ("disk", vec![1.0], vec![0.3, -0.5]),
            ("annulus2d", vec![1.0, 2.0], vec![-1.2, 0.4]),
            ("ellipse", vec![2.0, 1.0], vec![1.0, 0.2]),
            ("ball3", vec![1.0], vec![0.2, 0.1, 0.6]),
            ("torus2", vec![1.0], vec![0.3, 0.7]),
        ] {
            let g = geo(kind, &params);
            let res = PolarResolution { directions: if g.dim() == 2 { 2048 } else { 64 }, panels: 8, order: 12 };
            let v: f64 = polar_rule(&g, &c, res).iter().map(|n| n.w).sum();
            let exact = g.kind.exact_volume();
            assert!((v - exact).abs() < 2e-4 * exact, "{kind}: {v} vs {exact}");
        }
    }

    #[test]
    fn singular_radial_integral() {
        // ∫_disk |y|^{a−2} dy = 2π/a
        let g = geo("disk", &[1.0]);
        for a in [0.1, 0.5, 1.0] {
            let s: f64 = polar_rule(&g, &[0.0, 0.0], PolarResolution::for_dim(2)).iter().map(|n| n.w * n.r.powf(a - 2.0)).sum();
            assert!((s - 2.0 * PI / a).abs() < 1e-9 * (2.0 * PI / a), "{a}: {s}");
        }
    }

    #[test]
    fn boundary_and_sphere_rules_measure_area() {
        let g = geo("ball3", &[1.0]);
        let a: f64 = boundary_rule(&g, &[0.0, 0.0, 0.9], PolarResolution::for_dim(3)).iter().map(|t| t.2).sum();
        assert!((a - 4.0 * PI).abs() < 1e-9);
        let g = geo("annulus2d", &[1.0, 2.0]);
        let a: f64 = boundary_rule(&g, &[1.5, 0.0], PolarResolution::for_dim(2)).iter().map(|t| t.2).sum();
        assert!((a - 6.0 * PI).abs() < 1e-9);
        let s: f64 = sphere_polar_rule(2.0, &[0.0, 0.0, 2.0], PolarResolution::for_dim(3)).iter().map(|t| t.2).sum();
        assert!((s - 16.0 * PI).abs() < 1e-9);
    }
}
