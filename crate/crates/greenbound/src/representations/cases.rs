//! Named test functions with their Laplacian, gradient, ∂̄-derivative and
//! Riesz measure in closed form.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{GeometryHandle, GeometryKind};
use crate::green::oracle::TorusOracle;
use crate::green::GreenOracle;
use crate::vecops::{dist, dot};

pub type ComplexFn = Arc<dyn Fn(&[f64]) -> Complex64 + Send + Sync>;
pub type ComplexVecFn = Arc<dyn Fn(&[f64]) -> Vec<Complex64> + Send + Sync>;
pub type RealFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothness {
    Harmonic,
    Holomorphic,
    Smooth,
    /// Smooth with Δf ≥ 0.
    Subharmonic,
    QuasiSubharmonic,
}

/// Δf as point masses plus a density; masses are exact, the density is a
/// C² function sampled on the nodes.
#[derive(Clone)]
pub struct RieszSpec {
    pub point_masses: Vec<(Vec<f64>, f64)>,
    pub density: RealFn,
}

/// Riesz measure sampled on a discretization.
#[derive(Clone, Debug, PartialEq)]
pub struct RieszMeasure {
    pub point_masses: Vec<(Vec<f64>, f64)>,
    /// Nodal density values.
    pub density: Vec<f64>,
    /// Node weights the density is integrated with.
    pub weights: Vec<f64>,
}

impl RieszMeasure {
    /// ∫|Δf| = Σ|weights| + ∫|density|.
    pub fn total_variation(&self) -> f64 {
        self.point_masses.iter().map(|m| m.1.abs()).sum::<f64>()
            + self.density.iter().zip(&self.weights).map(|(d, w)| d.abs() * w).sum::<f64>()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.point_masses.iter().all(|m| m.1 >= 0.0) && self.density.iter().all(|d| *d >= 0.0)
    }
}

#[derive(Clone)]
pub struct TestFunctionCase {
    pub name: String,
    pub dim: usize,
    pub smoothness: Smoothness,
    pub f: ComplexFn,
    pub laplacian: Option<ComplexFn>,
    pub gradient: Option<ComplexVecFn>,
    /// ∂f/∂w̄_j for w_j = x_{2j} + i x_{2j+1}.
    pub dbar: Option<ComplexVecFn>,
    pub riesz: Option<RieszSpec>,
    /// Exact mean over a closed manifold.
    pub average: Option<Complex64>,
}

impl fmt::Debug for TestFunctionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunctionCase").field("name", &self.name).field("dim", &self.dim).field("smoothness", &self.smoothness).finish()
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn w(x: &[f64], j: usize) -> Complex64 {
    Complex64::new(x[2 * j], x[2 * j + 1])
}

impl TestFunctionCase {
    pub(crate) fn real(name: &str, dim: usize, smoothness: Smoothness, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        TestFunctionCase {
            name: name.into(),
            dim,
            smoothness,
            f: Arc::new(move |x| c(f(x))),
            laplacian: None,
            gradient: None,
            dbar: None,
            riesz: None,
            average: None,
        }
    }

    pub(crate) fn with_laplacian(mut self, l: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.laplacian = Some(Arc::new(move |x| c(l(x))));
        self
    }

    pub(crate) fn with_gradient(mut self, g: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.gradient = Some(Arc::new(move |x| g(x).into_iter().map(c).collect()));
        self
    }

    pub(crate) fn with_dbar(mut self, d: impl Fn(&[f64]) -> Vec<Complex64> + Send + Sync + 'static) -> Self {
        if self.dim % 2 == 0 {
            self.dbar = Some(Arc::new(d));
        }
        self
    }

    pub fn eval(&self, x: &[f64]) -> Complex64 {
        (self.f)(x)
    }

    /// ∂f/∂w̄_j, from the gradient when no closed form was given.
    pub fn dbar_at(&self, x: &[f64]) -> Option<Vec<Complex64>> {
        if self.dim % 2 != 0 {
            return None;
        }
        if let Some(d) = &self.dbar {
            return Some(d(x));
        }
        let g = self.gradient.as_ref()?(x);
        Some((0..self.dim / 2).map(|j| 0.5 * (g[2 * j] + Complex64::i() * g[2 * j + 1])).collect())
    }

    /// ∂f/∂w_j from the gradient.
    pub fn del_at(&self, x: &[f64]) -> Option<Vec<Complex64>> {
        if self.dim % 2 != 0 {
            return None;
        }
        let g = self.gradient.as_ref()?(x);
        Some((0..self.dim / 2).map(|j| 0.5 * (g[2 * j] - Complex64::i() * g[2 * j + 1])).collect())
    }

    /// c·f with every derived quantity scaled along.
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        let k = Complex64::new(c, 0.0);
        let f = self.f.clone();
        out.f = Arc::new(move |x| k * f(x));
        out.laplacian = self.laplacian.clone().map(|l| -> ComplexFn { Arc::new(move |x| k * l(x)) });
        out.gradient = self.gradient.clone().map(|g| -> ComplexVecFn { Arc::new(move |x| g(x).into_iter().map(|v| k * v).collect()) });
        out.dbar = self.dbar.clone().map(|g| -> ComplexVecFn { Arc::new(move |x| g(x).into_iter().map(|v| k * v).collect()) });
        out.riesz = self.riesz.clone().map(|r| {
            let d = r.density.clone();
            RieszSpec {
                point_masses: r.point_masses.into_iter().map(|(a, m)| (a, c * m)).collect(),
                density: Arc::new(move |x| c * d(x)),
            }
        });
        out.average = self.average.map(|a| k * a);
        if c < 0.0 && matches!(self.smoothness, Smoothness::Subharmonic | Smoothness::QuasiSubharmonic) {
            out.smoothness = Smoothness::Smooth;
        }
        out.name = format!("{c}*{}", self.name);
        out
    }

    /// f + c; derivatives unchanged.
    pub fn shifted(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        let f = self.f.clone();
        out.f = Arc::new(move |x| f(x) + c);
        out.average = self.average.map(|a| a + c);
        out.name = format!("{}+{c}", self.name);
        out
    }

    /// Samples the Riesz measure on the nodes of `g`.
    pub fn riesz_measure(&self, g: &GeometryHandle) -> Result<RieszMeasure> {
        let spec = self.riesz.as_ref().ok_or_else(|| Error::Missing(format!("Riesz measure of case `{}`", self.name)))?;
        Ok(RieszMeasure {
            point_masses: spec.point_masses.clone(),
            density: (0..g.node_count()).map(|i| (spec.density)(g.node(i))).collect(),
            weights: g.volume_weights().to_vec(),
        })
    }

    /// A harmonic or holomorphic tag must come with Δf = 0 on the nodes.
    pub fn metadata_consistent(&self, g: &GeometryHandle) -> bool {
        match (self.smoothness, &self.laplacian) {
            (Smoothness::Harmonic | Smoothness::Holomorphic, Some(l)) => (0..g.node_count()).all(|i| l(g.node(i)).norm() < 1e-12),
            (Smoothness::Harmonic | Smoothness::Holomorphic, None) => false,
            (Smoothness::QuasiSubharmonic, _) => self.riesz.is_some(),
            (Smoothness::Subharmonic, Some(l)) => (0..g.node_count()).all(|i| l(g.node(i)).re >= 0.0),
            _ => true,
        }
    }
}

/// Names accepted by [`case_by_name`].
pub const CASE_NAMES: [&str; 12] = [
    "constant",
    "coordinate",
    "harmonic_quadratic",
    "radial_quadratic",
    "product",
    "fourier_mode",
    "log_point",
    "newton_point",
    "torus_qsh",
    "z",
    "zbar",
    "zbar1_z2",
];

/// Builds a named case for the dimension of `g`.
pub fn case_by_name(name: &str, g: &GeometryHandle) -> Result<TestFunctionCase> {
    let n = g.dim();
    let incompatible = |reason: &str| Error::IncompatibleFamily { family: name.into(), reason: reason.into() };
    Ok(match name {
        "constant" => TestFunctionCase::real(name, n, Smoothness::Harmonic, |_| 1.0)
            .with_laplacian(|_| 0.0)
            .with_gradient(move |_| vec![0.0; n])
            .with_dbar(move |_| vec![c(0.0); n / 2]),
        "coordinate" => TestFunctionCase::real(name, n, Smoothness::Harmonic, |x| x[0])
            .with_laplacian(|_| 0.0)
            .with_gradient(move |_| unit(n, 0))
            .with_dbar(move |_| {
                let mut v = vec![c(0.0); n / 2];
                v[0] = c(0.5);
                v
            }),
        "harmonic_quadratic" => TestFunctionCase::real(name, n, Smoothness::Harmonic, |x| x[0] * x[0] - x[1] * x[1])
            .with_laplacian(|_| 0.0)
            .with_gradient(move |x| {
                let mut v = vec![0.0; n];
                v[0] = 2.0 * x[0];
                v[1] = -2.0 * x[1];
                v
            })
            .with_dbar(move |x| {
                let mut v = vec![c(0.0); n / 2];
                v[0] = w(x, 0).conj();
                v
            }),
        "radial_quadratic" => TestFunctionCase::real(name, n, Smoothness::Smooth, |x| dot(x, x))
            .with_laplacian(move |_| 2.0 * n as f64)
            .with_gradient(|x| x.iter().map(|v| 2.0 * v).collect())
            .with_dbar(move |x| (0..n / 2).map(|j| w(x, j)).collect()),
        "product" => TestFunctionCase::real(name, n, Smoothness::Harmonic, |x| x[0] * x[1])
            .with_laplacian(|_| 0.0)
            .with_gradient(move |x| {
                let mut v = vec![0.0; n];
                v[0] = x[1];
                v[1] = x[0];
                v
            })
            .with_dbar(move |x| {
                let mut v = vec![c(0.0); n / 2];
                v[0] = Complex64::new(0.0, 0.5) * w(x, 0).conj();
                v
            }),
        "fourier_mode" => fourier_mode(g, &unit_mode(n))?,
        "log_point" => {
            if n != 2 {
                return Err(incompatible("planar case"));
            }
            log_point(&[0.5, 0.0])
        }
        "newton_point" => {
            if n != 3 || g.manifold_dim() != 3 {
                return Err(incompatible("three-dimensional case"));
            }
            newton_point(&[0.3, 0.0, 0.0])
        }
        "torus_qsh" => {
            let GeometryKind::Torus { dim: 2, side } = g.kind else {
                return Err(incompatible("defined on torus2"));
            };
            torus_qsh(side)
        }
        "z" | "zbar" => {
            if n % 2 != 0 || g.manifold_dim() != n {
                return Err(incompatible("needs a flat domain of even dimension"));
            }
            let s = if name == "z" { 1.0 } else { -1.0 };
            let mut case = TestFunctionCase::real(name, n, Smoothness::Harmonic, |_| 0.0);
            case.f = Arc::new(move |x| Complex64::new(x[0], s * x[1]));
            case.laplacian = Some(Arc::new(|_| c(0.0)));
            case.gradient = Some(Arc::new(move |_| {
                let mut v = vec![c(0.0); n];
                v[0] = c(1.0);
                v[1] = Complex64::new(0.0, s);
                v
            }));
            case.dbar = Some(Arc::new(move |_| {
                let mut v = vec![c(0.0); n / 2];
                v[0] = c(if s > 0.0 { 0.0 } else { 1.0 });
                v
            }));
            if s > 0.0 {
                case.smoothness = Smoothness::Holomorphic;
            }
            case
        }
        "zbar1_z2" => {
            if n != 4 {
                return Err(incompatible("defined on ℂ²"));
            }
            let mut case = TestFunctionCase::real(name, 4, Smoothness::Harmonic, |_| 0.0);
            case.f = Arc::new(|x| w(x, 0).conj() * w(x, 1));
            case.laplacian = Some(Arc::new(|_| c(0.0)));
            case.gradient = Some(Arc::new(|x| {
                let (a, b) = (w(x, 0).conj(), w(x, 1));
                let i = Complex64::i();
                vec![b, -i * b, a, i * a]
            }));
            case.dbar = Some(Arc::new(|x| vec![w(x, 1), c(0.0)]));
            case
        }
        _ => return Err(Error::IncompatibleFamily { family: name.into(), reason: format!("unknown case; known: {}", CASE_NAMES.join(", ")) }),
    })
}

fn unit(n: usize, a: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[a] = 1.0;
    e
}

fn unit_mode(n: usize) -> Vec<i32> {
    let mut k = vec![0; n];
    k[0] = 1;
    k
}

/// sin(2π k·x / L) on a torus of side L (L = 1 elsewhere).
pub fn fourier_mode(g: &GeometryHandle, k: &[i32]) -> Result<TestFunctionCase> {
    let n = g.dim();
    if k.len() != n {
        return Err(Error::SizeMismatch { expected: n, got: k.len() });
    }
    let side = match g.kind {
        GeometryKind::Torus { side, .. } => side,
        _ => 1.0,
    };
    let kv: Vec<f64> = k.iter().map(|&v| 2.0 * PI * v as f64 / side).collect();
    let k2 = dot(&kv, &kv);
    let (k1, k3) = (kv.clone(), kv.clone());
    let name = format!("fourier_mode{k:?}");
    let mut case = TestFunctionCase::real(&name, n, Smoothness::Smooth, move |x| dot(&kv, x).sin())
        .with_laplacian(move |x| -k2 * dot(&k1, x).sin())
        .with_gradient(move |x| {
            let cs = dot(&k3, x).cos();
            k3.iter().map(|v| v * cs).collect()
        });
    if !g.has_boundary() {
        case.average = Some(c(0.0));
    }
    Ok(case)
}

/// ln|x − a| in the plane, Δ = 2π δ_a.
pub fn log_point(a: &[f64]) -> TestFunctionCase {
    let a = a.to_vec();
    let (a1, a2) = (a.clone(), a.clone());
    let mut case = TestFunctionCase::real("log_point", 2, Smoothness::QuasiSubharmonic, move |x| dist(x, &a1).ln())
        .with_gradient(move |x| {
            let r2 = dist(x, &a2).powi(2);
            vec![(x[0] - a2[0]) / r2, (x[1] - a2[1]) / r2]
        });
    case.riesz = Some(RieszSpec { point_masses: vec![(a, 2.0 * PI)], density: Arc::new(|_| 0.0) });
    case
}

/// −|x − a|^{−1} in space, Δ = 4π δ_a.
pub fn newton_point(a: &[f64]) -> TestFunctionCase {
    let a = a.to_vec();
    let a1 = a.clone();
    let mut case = TestFunctionCase::real("newton_point", 3, Smoothness::QuasiSubharmonic, move |x| -1.0 / dist(x, &a1));
    case.riesz = Some(RieszSpec { point_masses: vec![(a, 4.0 * PI)], density: Arc::new(|_| 0.0) });
    case
}

/// f₁ + f₂ on torus2 with f₁ = ½ G(a, ·) (a point mass of weight ½ and the
/// compensating constant density) and f₂ = cos(2πx₁/L) sin(2πx₂/L).
pub fn torus_qsh(side: f64) -> TestFunctionCase {
    let oracle = Arc::new(TorusOracle::new(2, side));
    let a = vec![0.3 * side, 0.6 * side];
    let k = 2.0 * PI / side;
    let vol = side * side;
    let (o1, a1) = (oracle.clone(), a.clone());
    let f2 = move |x: &[f64]| (k * x[0]).cos() * (k * x[1]).sin();
    let mut case = TestFunctionCase::real("torus_qsh", 2, Smoothness::QuasiSubharmonic, move |x| 0.5 * o1.value(&a1, x) + f2(x));
    case.riesz = Some(RieszSpec {
        point_masses: vec![(a, 0.5)],
        density: Arc::new(move |x| -0.5 / vol - 2.0 * k * k * (k * x[0]).cos() * (k * x[1]).sin()),
    });
    case.average = Some(c(0.0));
    case
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_geometry, GeometrySpec};

    fn fd_check(case: &TestFunctionCase, x: &[f64]) {
        let h = 1e-5;
        let g = case.gradient.as_ref().unwrap()(x);
        let mut lap = c(0.0);
        for a in 0..x.len() {
            let (mut p, mut m) = (x.to_vec(), x.to_vec());
            p[a] += h;
            m[a] -= h;
            let d = (case.eval(&p) - case.eval(&m)) / (2.0 * h);
            assert!((d - g[a]).norm() < 1e-7, "{} grad {a}", case.name);
            lap += (case.eval(&p) + case.eval(&m) - 2.0 * case.eval(x)) / (h * h);
        }
        if let Some(l) = &case.laplacian {
            assert!((lap - l(x)).norm() < 1e-3, "{} laplacian", case.name);
        }
        if let Some(db) = &case.dbar {
            let v = db(x);
            for (j, dj) in v.iter().enumerate() {
                let gx = g[2 * j];
                let gy = g[2 * j + 1];
                let expect = 0.5 * (gx + Complex64::i() * gy);
                assert!((expect - dj).norm() < 1e-7, "{} dbar {j}", case.name);
            }
        }
    }

    #[test]
    fn library_derivatives_match_differences() {
        let disk = build_geometry(&GeometrySpec::new("disk", &[1.0], 0.2)).unwrap();
        let ball4 = build_geometry(&GeometrySpec::new("ball4", &[1.0], 0.5).with_samples(100)).unwrap();
        let torus = build_geometry(&GeometrySpec::new("torus2", &[1.0], 0.1)).unwrap();
        for name in ["constant", "coordinate", "harmonic_quadratic", "radial_quadratic", "product", "fourier_mode", "log_point", "z", "zbar"] {
            let case = case_by_name(name, &disk).unwrap();
            fd_check(&case, &[0.31, -0.22]);
            assert!(case.metadata_consistent(&disk) || case.smoothness == Smoothness::QuasiSubharmonic, "{name}");
        }
        fd_check(&case_by_name("zbar1_z2", &ball4).unwrap(), &[0.1, 0.2, -0.3, 0.15]);
        fd_check(&case_by_name("radial_quadratic", &ball4).unwrap(), &[0.1, 0.2, -0.3, 0.15]);
        assert!(case_by_name("torus_qsh", &disk).is_err());
        assert!(case_by_name("torus_qsh", &torus).is_ok());
    }

    #[test]
    fn riesz_total_variation() {
        let disk = build_geometry(&GeometrySpec::new("disk", &[1.0], 0.2)).unwrap();
        let m = log_point(&[0.5, 0.0]).riesz_measure(&disk).unwrap();
        assert!(m.is_nonnegative());
        assert!((m.total_variation() - 2.0 * PI).abs() < 1e-15);
        let torus = build_geometry(&GeometrySpec::new("torus2", &[1.0], 1.0 / 32.0)).unwrap();
        let m = torus_qsh(1.0).riesz_measure(&torus).unwrap();
        assert!(!m.is_nonnegative());
        assert!(m.total_variation() > 0.5);
    }
}
