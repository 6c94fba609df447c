//! Deterministic test-function families with closed-form derivatives.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ellipse_distance, min_image, GeometryHandle, GeometryKind};
use crate::green::{corrector_tolerance, fundamental_solution, oracle_for};
use crate::laplace::DiscreteOperator;
use crate::representations::{log_point, ComplexFn, ComplexVecFn, RieszSpec, Smoothness, TestFunctionCase};
use crate::vecops::{dist, dot, scale, sub, unit_sphere_area};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Fourier,
    Bumps,
    Harmonic,
    BoundarySingularGrading,
    LogSingular,
    ComplexPolynomial,
    Antiholomorphic,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 7] = [
        FamilyKind::Fourier,
        FamilyKind::Bumps,
        FamilyKind::Harmonic,
        FamilyKind::BoundarySingularGrading,
        FamilyKind::LogSingular,
        FamilyKind::ComplexPolynomial,
        FamilyKind::Antiholomorphic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Fourier => "fourier",
            FamilyKind::Bumps => "bumps",
            FamilyKind::Harmonic => "harmonic",
            FamilyKind::BoundarySingularGrading => "boundary_singular_grading",
            FamilyKind::LogSingular => "log_singular",
            FamilyKind::ComplexPolynomial => "complex_polynomial",
            FamilyKind::Antiholomorphic => "antiholomorphic",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, count: usize, seed: u64) -> Self {
        FamilySpec { kind, count, seed }
    }
}

#[derive(Clone, Debug)]
pub struct Family {
    pub spec: FamilySpec,
    pub geometry: String,
    pub cases: Vec<TestFunctionCase>,
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn incompatible(kind: FamilyKind, reason: impl Into<String>) -> Error {
    Error::IncompatibleFamily { family: kind.name().into(), reason: reason.into() }
}

/// Builds `spec.count` members (twice that for `log_singular` on domains:
/// the point-mass cases followed by their smooth counterparts).
pub fn generate_family(g: &GeometryHandle, spec: FamilySpec) -> Result<Family> {
    if spec.count == 0 {
        return Err(Error::Empty("family"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let cases = match spec.kind {
        FamilyKind::Fourier => fourier(g, spec.count)?,
        FamilyKind::Bumps => bumps(g, spec.count, &mut rng)?,
        FamilyKind::Harmonic => harmonic(g, spec.count, &mut rng)?,
        FamilyKind::BoundarySingularGrading => grading(g, spec.count, &mut rng)?,
        FamilyKind::LogSingular => log_singular(g, spec.count, &mut rng)?,
        FamilyKind::ComplexPolynomial | FamilyKind::Antiholomorphic => polynomials(g, spec.kind, spec.count, &mut rng)?,
    };
    Ok(Family { spec, geometry: g.name(), cases })
}

/// Modes with first nonzero entry positive, by |k|² and then descending
/// lexicographic order, so (1,0,..) comes first.
fn half_space_modes(dim: usize, kmax: i32) -> Vec<Vec<i32>> {
    let side = (2 * kmax + 1) as usize;
    let mut out = Vec::new();
    for idx in 0..side.pow(dim as u32) {
        let mut r = idx;
        let k: Vec<i32> = (0..dim)
            .map(|_| {
                let v = (r % side) as i32 - kmax;
                r /= side;
                v
            })
            .collect();
        if k.iter().find(|v| **v != 0).is_some_and(|v| *v > 0) {
            out.push(k);
        }
    }
    out.sort_by(|a, b| {
        let n2 = |k: &[i32]| k.iter().map(|v| v * v).sum::<i32>();
        n2(a).cmp(&n2(b)).then_with(|| b.cmp(a))
    });
    out
}

fn fourier(g: &GeometryHandle, count: usize) -> Result<Vec<TestFunctionCase>> {
    if let GeometryKind::Sphere2 { radius } = g.kind {
        return sphere_harmonics(radius, count);
    }
    let n = g.dim();
    let (period, kmax) = match (g.kind, g.grid()) {
        (GeometryKind::Torus { side, .. }, Some(grid)) => {
            let m = *grid.dims.iter().min().unwrap_or(&2);
            (side, (m as i32 - 1) / 2)
        }
        _ => (4.0 * g.scale(), 8),
    };
    let modes = half_space_modes(n, kmax.max(1));
    if 2 * modes.len() < count {
        return Err(incompatible(FamilyKind::Fourier, format!("only {} sub-Nyquist modes", 2 * modes.len())));
    }
    let closed = !g.has_boundary();
    Ok((0..count)
        .map(|m| {
            let k = &modes[m / 2];
            let kv: Vec<f64> = k.iter().map(|&v| 2.0 * PI * v as f64 / period).collect();
            let is_cos = m % 2 == 1;
            let k2 = dot(&kv, &kv);
            let (k1, k3) = (kv.clone(), kv.clone());
            let trig = move |t: f64| if is_cos { t.cos() } else { t.sin() };
            let dtrig = move |t: f64| if is_cos { -t.sin() } else { t.cos() };
            let name = format!("{}{k:?}", if is_cos { "cos" } else { "sin" });
            let mut case = TestFunctionCase::real(&name, n, Smoothness::Smooth, move |x| trig(dot(&kv, x)))
                .with_laplacian(move |x| -k2 * trig(dot(&k1, x)))
                .with_gradient(move |x| {
                    let d = dtrig(dot(&k3, x));
                    k3.iter().map(|v| v * d).collect()
                });
            if closed {
                case.average = Some(c(0.0));
            }
            case
        })
        .collect())
}

/// Sparse polynomial Σ c·x^α in real or complex variables.
#[derive(Clone, Debug)]
struct Poly(Vec<(Complex64, Vec<u32>)>);

impl Poly {
    fn eval<T>(&self, x: &[T]) -> Complex64
    where
        T: Copy + Into<Complex64>,
    {
        self.0
            .iter()
            .map(|(cf, a)| a.iter().zip(x).fold(*cf, |acc, (&e, &v)| acc * v.into().powu(e)))
            .sum()
    }

    fn derivative(&self, var: usize) -> Poly {
        Poly(
            self.0
                .iter()
                .filter(|(_, a)| a[var] > 0)
                .map(|(cf, a)| {
                    let mut b = a.clone();
                    b[var] -= 1;
                    (cf * a[var] as f64, b)
                })
                .collect(),
        )
    }
}

fn real_poly(terms: &[(f64, [u32; 3])]) -> Poly {
    Poly(terms.iter().map(|(cf, a)| (c(*cf), a.to_vec())).collect())
}

/// Degree 1–3 harmonic polynomials restricted to the sphere; each is an
/// eigenfunction of the sphere Laplacian with eigenvalue −l(l+1)/R².
fn sphere_harmonics(radius: f64, count: usize) -> Result<Vec<TestFunctionCase>> {
    let list: Vec<(&str, u32, Poly)> = vec![
        ("x", 1, real_poly(&[(1.0, [1, 0, 0])])),
        ("y", 1, real_poly(&[(1.0, [0, 1, 0])])),
        ("z", 1, real_poly(&[(1.0, [0, 0, 1])])),
        ("xy", 2, real_poly(&[(1.0, [1, 1, 0])])),
        ("yz", 2, real_poly(&[(1.0, [0, 1, 1])])),
        ("xz", 2, real_poly(&[(1.0, [1, 0, 1])])),
        ("x2-y2", 2, real_poly(&[(1.0, [2, 0, 0]), (-1.0, [0, 2, 0])])),
        ("x2+y2-2z2", 2, real_poly(&[(1.0, [2, 0, 0]), (1.0, [0, 2, 0]), (-2.0, [0, 0, 2])])),
        ("x3-3xy2", 3, real_poly(&[(1.0, [3, 0, 0]), (-3.0, [1, 2, 0])])),
        ("3x2y-y3", 3, real_poly(&[(3.0, [2, 1, 0]), (-1.0, [0, 3, 0])])),
        ("z(x2-y2)", 3, real_poly(&[(1.0, [2, 0, 1]), (-1.0, [0, 2, 1])])),
        ("xyz", 3, real_poly(&[(1.0, [1, 1, 1])])),
        ("x(4z2-x2-y2)", 3, real_poly(&[(4.0, [1, 0, 2]), (-1.0, [3, 0, 0]), (-1.0, [1, 2, 0])])),
        ("y(4z2-x2-y2)", 3, real_poly(&[(4.0, [0, 1, 2]), (-1.0, [2, 1, 0]), (-1.0, [0, 3, 0])])),
        ("z(2z2-3x2-3y2)", 3, real_poly(&[(2.0, [0, 0, 3]), (-3.0, [2, 0, 1]), (-3.0, [0, 2, 1])])),
    ];
    if count > list.len() {
        return Err(incompatible(FamilyKind::Fourier, format!("sphere2 family has {} members", list.len())));
    }
    let r2 = radius * radius;
    Ok(list
        .into_iter()
        .take(count)
        .map(|(name, l, p)| {
            let lf = l as f64;
            let grads: Vec<Poly> = (0..3).map(|a| p.derivative(a)).collect();
            let (p1, p2) = (p.clone(), p.clone());
            let mut case = TestFunctionCase::real(name, 3, Smoothness::Smooth, move |x| p.eval(x).re)
                .with_laplacian(move |x| -lf * (lf + 1.0) * p1.eval(x).re / r2)
                .with_gradient(move |x| {
                    let v = p2.eval(x).re;
                    (0..3).map(|a| grads[a].eval(x).re - lf * v * x[a] / r2).collect()
                });
            case.average = Some(c(0.0));
            case
        })
        .collect())
}

/// (1 − s)⁶ with s = |y|²/ρ², y = x − c; returns (φ, g'(s), g''(s)).
fn bump_profile(s: f64) -> (f64, f64, f64) {
    if s >= 1.0 {
        return (0.0, 0.0, 0.0);
    }
    let t = 1.0 - s;
    (t.powi(6), -6.0 * t.powi(5), 30.0 * t.powi(4))
}

/// φ(x − c)·e^{i m·(x − c)}; `offset` maps x to x − c (minimum image on a
/// torus).
fn bump_case(name: String, n: usize, rho: f64, m: Vec<f64>, offset: Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>) -> TestFunctionCase {
    let rho2 = rho * rho;
    let nf = n as f64;
    let m2 = dot(&m, &m);
    let eval = {
        let (m, offset) = (m.clone(), offset.clone());
        move |x: &[f64]| -> (Vec<f64>, f64, f64, f64, Complex64) {
            let y = offset(x);
            let s = dot(&y, &y) / rho2;
            let (p, d1, d2) = bump_profile(s);
            (y.clone(), p, d1, d2, Complex64::from_polar(1.0, dot(&m, &y)))
        }
    };
    let e1 = eval.clone();
    let e2 = eval.clone();
    let e3 = eval.clone();
    let (ma, mb) = (m.clone(), m.clone());
    let f: ComplexFn = Arc::new(move |x| {
        let (_, p, _, _, e) = e1(x);
        e * p
    });
    let gradient: ComplexVecFn = Arc::new(move |x| {
        let (y, p, d1, _, e) = e2(x);
        (0..y.len()).map(|a| e * Complex64::new(d1 * 2.0 * y[a] / rho2, ma[a] * p)).collect()
    });
    let laplacian: ComplexFn = Arc::new(move |x| {
        let (y, p, d1, d2, e) = e3(x);
        let y2 = dot(&y, &y);
        let lap = d2 * 4.0 * y2 / (rho2 * rho2) + d1 * 2.0 * nf / rho2;
        let m_grad: f64 = (0..y.len()).map(|a| mb[a] * d1 * 2.0 * y[a] / rho2).sum();
        e * Complex64::new(lap - m2 * p, 2.0 * m_grad)
    });
    let mut case = TestFunctionCase::real(&name, n, Smoothness::Smooth, |_| 0.0);
    case.f = f;
    case.gradient = Some(gradient);
    case.laplacian = Some(laplacian);
    case
}

/// Bump of the ambient distance restricted to the sphere: tangential
/// gradient, and Δ_S F = ΔF − nᵀHn − (2/R)∂_nF with n = x/R.
fn sphere_bump(name: String, radius: f64, rho: f64, centre: Vec<f64>) -> TestFunctionCase {
    let rho2 = rho * rho;
    let (c1, c2, c3) = (centre.clone(), centre.clone(), centre);
    let mut case = TestFunctionCase::real(&name, 3, Smoothness::Smooth, move |x| {
        let y = sub(x, &c1);
        bump_profile(dot(&y, &y) / rho2).0
    })
    .with_gradient(move |x| {
        let y = sub(x, &c2);
        let (_, d1, _) = bump_profile(dot(&y, &y) / rho2);
        let grad = scale(&y, 2.0 * d1 / rho2);
        let nrm = scale(x, 1.0 / radius);
        let gn = dot(&grad, &nrm);
        (0..3).map(|a| grad[a] - gn * nrm[a]).collect()
    })
    .with_laplacian(move |x| {
        let y = sub(x, &c3);
        let (_, d1, d2) = bump_profile(dot(&y, &y) / rho2);
        let nrm = scale(x, 1.0 / radius);
        let ds = scale(&y, 2.0 / rho2);
        let lap = d2 * dot(&ds, &ds) + d1 * 6.0 / rho2;
        let dsn = dot(&ds, &nrm);
        let hnn = d2 * dsn * dsn + d1 * 2.0 / rho2;
        lap - hnn - 2.0 / radius * d1 * dsn
    });
    case.average = None;
    case
}

fn random_direction(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let l = dot(&v, &v).sqrt();
        if l > 0.1 && l <= 1.0 {
            return scale(&v, 1.0 / l);
        }
    }
}

fn bumps(g: &GeometryHandle, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<TestFunctionCase>> {
    let n = g.dim();
    match g.kind {
        GeometryKind::Sphere2 { radius } => Ok((0..count)
            .map(|k| {
                let centre = scale(&random_direction(rng, 3), radius);
                let rho = radius * rng.random_range(0.4..0.9);
                sphere_bump(format!("bump{k}"), radius, rho, centre)
            })
            .collect()),
        GeometryKind::Torus { side, .. } => Ok((0..count)
            .map(|k| {
                let centre: Vec<f64> = (0..n).map(|_| side * rng.random_range(0.3..0.7)).collect();
                let rho = side * rng.random_range(0.1..0.2);
                let m = modulation(rng, n, rho, k);
                let cc = centre.clone();
                bump_case(format!("bump{k}"), n, rho, m, Arc::new(move |x| min_image(&cc, x, side)))
            })
            .collect()),
        _ => {
            let h = g.h();
            let deep: Vec<usize> = (0..g.node_count()).filter(|&i| g.boundary_distance_unchecked(g.node(i)) > 2.0 * h).collect();
            if deep.is_empty() {
                return Err(incompatible(FamilyKind::Bumps, "no node lies 2h inside the boundary"));
            }
            Ok((0..count)
                .map(|k| {
                    let centre = g.node(deep[rng.random_range(0..deep.len())]).to_vec();
                    let delta = g.boundary_distance_unchecked(&centre).min(0.5 * g.scale());
                    let rho = delta * rng.random_range(0.5..0.9);
                    let m = modulation(rng, n, rho, k);
                    let cc = centre.clone();
                    bump_case(format!("bump{k}"), n, rho, m, Arc::new(move |x| sub(x, &cc)))
                })
                .collect())
        }
    }
}

/// Zero for even members, a random wavevector of size ~2π/ρ for odd ones.
fn modulation(rng: &mut ChaCha8Rng, n: usize, rho: f64, k: usize) -> Vec<f64> {
    let dir = random_direction(rng, n);
    let mag = 2.0 * PI / rho * rng.random_range(0.5..1.5);
    if k % 2 == 0 {
        vec![0.0; n]
    } else {
        scale(&dir, mag)
    }
}

/// Φ(a, ·) + b·x for a pole a outside the domain.
fn pole_case(name: String, n: usize, a: Vec<f64>, b: Vec<f64>) -> Result<TestFunctionCase> {
    let phi = Arc::new(fundamental_solution(n)?);
    let (p1, p2, a1, a2, b1, b2) = (phi.clone(), phi, a.clone(), a, b.clone(), b);
    Ok(TestFunctionCase::real(&name, n, Smoothness::Harmonic, move |x| p1.value(&a1, x) + dot(&b1, x))
        .with_laplacian(|_| 0.0)
        .with_gradient(move |x| p2.grad_y(&a2, x).iter().zip(&b2).map(|(u, v)| u + v).collect()))
}

/// Random boundary node y and the point y + t·d·ν(y), t = ±1.
fn off_boundary(g: &GeometryHandle, rng: &mut ChaCha8Rng, d: f64, outward: bool) -> Result<Vec<f64>> {
    let b = g.boundary_nodes();
    for _ in 0..200 {
        let y = g.node(b[rng.random_range(0..b.len())]);
        let nu = g.outward_normal(y)?;
        let t = if outward { d } else { -d };
        let p: Vec<f64> = y.iter().zip(&nu).map(|(u, v)| u + t * v).collect();
        let bd = if outward { exterior_distance(g, &p) } else { g.boundary_distance_unchecked(&p) };
        if g.contains(&p) != outward && bd > 0.5 * d {
            return Ok(p);
        }
    }
    Err(Error::InvalidParameters { kind: g.name(), reason: format!("no point at distance {d} from the boundary") })
}

/// Distance from an exterior point to the domain.
fn exterior_distance(g: &GeometryHandle, p: &[f64]) -> f64 {
    let r = dot(p, p).sqrt();
    match g.kind {
        GeometryKind::Disk { radius } | GeometryKind::Ball { radius, .. } => r - radius,
        GeometryKind::Annulus { inner, outer } => (inner - r).max(r - outer),
        GeometryKind::Ellipse { a, b } => ellipse_distance(a, b, p[0], p[1]).0,
        _ => 0.0,
    }
}

fn require_boundary(g: &GeometryHandle, kind: FamilyKind) -> Result<()> {
    if g.has_boundary() {
        Ok(())
    } else {
        Err(incompatible(kind, "needs a geometry with boundary"))
    }
}

/// Closed-form harmonic functions: the constant, then fundamental solutions
/// with poles outside the domain plus a random linear part.
fn harmonic(g: &GeometryHandle, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<TestFunctionCase>> {
    require_boundary(g, FamilyKind::Harmonic)?;
    let n = g.dim();
    let mut out = vec![TestFunctionCase::real("constant", n, Smoothness::Harmonic, |_| 1.0)
        .with_laplacian(|_| 0.0)
        .with_gradient(move |_| vec![0.0; n])];
    for k in 1..count {
        let d = g.scale() * rng.random_range(0.1..0.5);
        let a = off_boundary(g, rng, d, true)?;
        let b = scale(&random_direction(rng, n), rng.random_range(0.0..1.0));
        out.push(pole_case(format!("pole{k}"), n, a, b)?);
    }
    Ok(out)
}

/// max over nodes of |u_h − f| where u_h solves the discrete Dirichlet
/// problem with the boundary values of f, together with tol(h).
pub fn harmonic_residual(op: &DiscreteOperator, case: &TestFunctionCase) -> Result<(f64, f64)> {
    let g = op.geometry();
    let f: Vec<f64> = (0..g.node_count()).map(|i| case.eval(g.node(i)).re).collect();
    let u = op.solve_dirichlet_many(std::slice::from_ref(&f), None)?;
    let res = u[0].iter().zip(&f).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok((res, corrector_tolerance(op)?))
}

/// Bumps at inward distance d_k and poles at outward distance d_k with
/// d_k = scale·2^{−k−1}, never below 2h.
fn grading(g: &GeometryHandle, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<TestFunctionCase>> {
    require_boundary(g, FamilyKind::BoundarySingularGrading)?;
    let n = g.dim();
    (0..count)
        .map(|k| {
            let d = (0.5 * g.scale() * 0.5f64.powi((k / 2) as i32)).max(2.0 * g.h());
            if k % 2 == 0 {
                let centre = off_boundary(g, rng, d, false)?;
                let cc = centre.clone();
                Ok(bump_case(format!("bump_d{d:.4}"), n, 0.9 * d, vec![0.0; n], Arc::new(move |x| sub(x, &cc))))
            } else {
                let a = off_boundary(g, rng, d, true)?;
                pole_case(format!("pole_d{d:.4}"), n, a, vec![0.0; n])
            }
        })
        .collect()
}

/// −|x − a|^{2−n} for n ≥ 3 with Δ = (n − 2)|S^{n−1}| δ_a.
fn newton_like(n: usize, a: Vec<f64>) -> TestFunctionCase {
    let e = n as f64 - 2.0;
    let (a1, a2) = (a.clone(), a.clone());
    let mut case = TestFunctionCase::real("point", n, Smoothness::QuasiSubharmonic, move |x| -dist(x, &a1).powf(-e))
        .with_gradient(move |x| {
            let y = sub(x, &a2);
            let r = dot(&y, &y).sqrt();
            scale(&y, e * r.powf(-e - 2.0))
        });
    case.riesz = Some(RieszSpec { point_masses: vec![(a, e * unit_sphere_area(n))], density: Arc::new(|_| 0.0) });
    case
}

/// ½ ln(1 + |x − a|²/ε²): nonnegative, Δ = (nε² + (n − 2)r²)/(ε² + r²)².
fn soft_log(n: usize, a: Vec<f64>, eps: f64) -> TestFunctionCase {
    let e2 = eps * eps;
    let nf = n as f64;
    let (a1, a2, a3) = (a.clone(), a.clone(), a);
    let lap = move |x: &[f64]| {
        let r2 = dist(x, &a3).powi(2);
        (nf * e2 + (nf - 2.0) * r2) / (e2 + r2).powi(2)
    };
    let lap2 = lap.clone();
    let mut case = TestFunctionCase::real("soft_log", n, Smoothness::Subharmonic, move |x| 0.5 * (1.0 + dist(x, &a1).powi(2) / e2).ln())
        .with_gradient(move |x| {
            let y = sub(x, &a2);
            scale(&y, 1.0 / (e2 + dot(&y, &y)))
        })
        .with_laplacian(lap);
    case.riesz = Some(RieszSpec { point_masses: vec![], density: Arc::new(lap2) });
    case
}

/// Keeps a singular point away from the nodes.
fn off_nodes(g: &GeometryHandle, mut a: Vec<f64>) -> Vec<f64> {
    let h = g.h();
    for _ in 0..8 {
        let near = (0..g.node_count()).map(|i| dist(g.node(i), &a)).fold(f64::INFINITY, f64::min);
        if near > 0.05 * h {
            break;
        }
        a[0] += 0.13 * h;
    }
    a
}

fn log_singular(g: &GeometryHandle, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<TestFunctionCase>> {
    let n = g.dim();
    if !g.has_boundary() {
        let oracle: Arc<dyn crate::green::GreenOracle> = Arc::from(oracle_for(g)?);
        let vol = g.volume();
        return Ok((0..count)
            .map(|k| {
                let a = match g.kind {
                    GeometryKind::Sphere2 { radius } => scale(&random_direction(rng, 3), radius),
                    GeometryKind::Torus { side, .. } => (0..n).map(|_| side * rng.random_range(0.0..1.0)).collect(),
                    _ => unreachable!("closed geometries are tori and spheres"),
                };
                let a = off_nodes(g, a);
                let (o, a1) = (oracle.clone(), a.clone());
                let mut case = TestFunctionCase::real(&format!("green{k}"), n, Smoothness::QuasiSubharmonic, move |x| o.value(&a1, x));
                case.riesz = Some(RieszSpec { point_masses: vec![(a, 1.0)], density: Arc::new(move |_| -1.0 / vol) });
                case.average = Some(c(0.0));
                case
            })
            .collect());
    }
    let staged = matches!(g.kind, GeometryKind::Disk { .. } | GeometryKind::Ball { .. });
    let radius = match g.kind {
        GeometryKind::Disk { radius } | GeometryKind::Ball { radius, .. } => radius,
        _ => g.scale(),
    };
    let interior: Vec<usize> = (0..g.node_count()).filter(|&i| !g.is_boundary_node(i)).collect();
    let mut points = Vec::with_capacity(count);
    for k in 0..count {
        let a = if staged {
            let t = if count == 1 { 0.5 } else { 0.1 + 0.8 * k as f64 / (count - 1) as f64 };
            scale(&random_direction(rng, n), t * radius)
        } else {
            let i = interior[rng.random_range(0..interior.len())];
            let nb = g.node(i);
            nb.iter().map(|v| v + 0.3 * g.h() * rng.random_range(-1.0..1.0)).collect()
        };
        let a = off_nodes(g, a);
        if !g.contains(&a) {
            return Err(Error::OutsideGeometry(a));
        }
        points.push(a);
    }
    let eps = 0.05 * g.scale();
    let mut out = Vec::with_capacity(2 * count);
    for (k, a) in points.iter().enumerate() {
        let mut case = if n == 2 { log_point(a) } else { newton_like(n, a.clone()) };
        case.name = format!("{}{k}|a|={:.3}", case.name, dot(a, a).sqrt());
        out.push(case);
    }
    for (k, a) in points.into_iter().enumerate() {
        let mut case = soft_log(n, a, eps);
        case.name = format!("soft_log{k}");
        out.push(case);
    }
    Ok(out)
}

/// Multi-indices of ℂᵐ by total degree, then lexicographic.
fn multi_indices(m: usize, count: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut deg = 0u32;
    while out.len() < count {
        let mut level = Vec::new();
        let mut stack = vec![(Vec::new(), deg)];
        while let Some((pre, rest)) = stack.pop() {
            if pre.len() == m - 1 {
                let mut v: Vec<u32> = pre;
                v.push(rest);
                level.push(v);
                continue;
            }
            for e in 0..=rest {
                let mut v = pre.clone();
                v.push(e);
                stack.push((v, rest - e));
            }
        }
        level.sort();
        level.reverse();
        out.extend(level);
        deg += 1;
    }
    out.truncate(count);
    out
}

fn polynomials(g: &GeometryHandle, kind: FamilyKind, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<TestFunctionCase>> {
    let n = g.dim();
    if n % 2 != 0 {
        return Err(incompatible(kind, format!("needs an even real dimension, got {n}")));
    }
    if !g.has_boundary() || g.manifold_dim() != n {
        return Err(incompatible(kind, "needs a flat domain with boundary"));
    }
    let anti = kind == FamilyKind::Antiholomorphic;
    let m = n / 2;
    let coords = move |x: &[f64]| -> Vec<Complex64> {
        (0..m).map(|j| Complex64::new(x[2 * j], if anti { -x[2 * j + 1] } else { x[2 * j + 1] })).collect()
    };
    Ok(multi_indices(m, count)
        .into_iter()
        .map(|alpha| {
            let coef = Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
            let p = Poly(vec![(coef, alpha.clone())]);
            let derivs: Vec<Poly> = (0..m).map(|j| p.derivative(j)).collect();
            let d2 = derivs.clone();
            let name = format!("{}{alpha:?}", if anti { "zbar^" } else { "z^" });
            let mut case = TestFunctionCase::real(&name, n, if anti { Smoothness::Harmonic } else { Smoothness::Holomorphic }, |_| 0.0);
            case.f = Arc::new(move |x| p.eval(&coords(x)));
            case.laplacian = Some(Arc::new(|_| c(0.0)));
            // ∂_y = i∂_z for holomorphic, −i∂_z̄ for antiholomorphic
            let rot = if anti { -Complex64::i() } else { Complex64::i() };
            case.gradient = Some(Arc::new(move |x| {
                let z = coords(x);
                derivs.iter().flat_map(|d| {
                    let v = d.eval(&z);
                    [v, rot * v]
                }).collect()
            }));
            case.dbar = Some(Arc::new(move |x| {
                if anti {
                    let z = coords(x);
                    d2.iter().map(|d| d.eval(&z)).collect()
                } else {
                    vec![c(0.0); m]
                }
            }));
            case
        })
        .collect())
}
