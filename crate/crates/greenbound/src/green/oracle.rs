//! Closed-form and series Green functions for the catalog geometries.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::fundamental::{fundamental_solution, FundamentalSolution};
use crate::error::{Error, Result};
use crate::geometry::{min_image, GeometryHandle, GeometryKind};
use crate::special::exp_e1;
use crate::vecops::{dot, norm};

/// Analytic Green function G(x, y) with Δ_y G = δ_x (− 1/|M| when closed).
pub trait GreenOracle: Send + Sync {
    /// G(x, y) for x ≠ y.
    fn value(&self, x: &[f64], y: &[f64]) -> f64;
    /// ∇_y G(x, y) for x ≠ y.
    fn grad_y(&self, x: &[f64], y: &[f64]) -> Vec<f64>;
    /// Closed manifolds: G minus an explicitly integrable singular part,
    /// finite also at y = x.
    fn smooth_part(&self, _x: &[f64], _y: &[f64]) -> Option<f64> {
        None
    }
    /// Closed manifolds: ∫_M (singular part) dV.
    fn singular_integral(&self) -> Option<f64> {
        None
    }
}

/// Kelvin-image Green function of the ball of radius R in R^n.
pub struct BallOracle {
    pub radius: f64,
    phi: FundamentalSolution,
}

impl BallOracle {
    pub fn new(n: usize, radius: f64) -> Self {
        BallOracle { radius, phi: fundamental_solution(n).expect("n >= 2") }
    }

    fn scaled(&self, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        (x.iter().map(|v| v / self.radius).collect(), y.iter().map(|v| v / self.radius).collect())
    }

    /// |x|·|y − x*| written without x* so that x = 0 is regular, as
    /// |x − y|² + (1 − |x|²)(1 − |y|²) which does not cancel near the sphere.
    fn image_distance(x: &[f64], y: &[f64]) -> f64 {
        let (xx, yy) = (dot(x, x), dot(y, y));
        let d2 = crate::vecops::dist(x, y).powi(2);
        (d2 + ((1.0 - xx) * (1.0 - yy)).max(0.0)).sqrt()
    }

    /// Poisson kernel ∂G/∂ν_y at |y| = R.
    pub fn poisson(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.phi.n as i32;
        let r2 = self.radius * self.radius;
        (r2 - dot(x, x)) / (self.phi.omega() * self.radius * crate::vecops::dist(x, y).powi(n))
    }
}

impl GreenOracle for BallOracle {
    fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        let (xs, ys) = self.scaled(x, y);
        let g1 = self.phi.phi(crate::vecops::dist(&xs, &ys)) - self.phi.phi(Self::image_distance(&xs, &ys));
        g1 * self.radius.powi(2 - self.phi.n as i32)
    }

    fn grad_y(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let (xs, ys) = self.scaled(x, y);
        let d = crate::vecops::dist(&xs, &ys);
        let rho = Self::image_distance(&xs, &ys);
        let xx = dot(&xs, &xs);
        let (a, b) = (self.phi.dphi(d) / d, self.phi.dphi(rho) / rho);
        let s = self.radius.powi(1 - self.phi.n as i32);
        // a(y − x) − b(|x|²y − x) regrouped so the boundary term stays exact
        (0..xs.len()).map(|i| s * ((a - b) * (ys[i] - xs[i]) + b * (1.0 - xx) * ys[i])).collect()
    }
}

/// Annulus inner < |y| < outer: Φ minus the separated-variables harmonic
/// corrector matching Φ on both circles.
pub struct AnnulusOracle {
    pub inner: f64,
    pub outer: f64,
    pub tol: f64,
}

struct Corrector {
    value: f64,
    dr: f64,
    dtheta: f64,
}

impl AnnulusOracle {
    pub fn new(inner: f64, outer: f64) -> Self {
        AnnulusOracle { inner, outer, tol: 1e-16 }
    }

    fn corrector(&self, x: &[f64], y: &[f64], want_grad: bool) -> Corrector {
        let (a, b) = (self.inner, self.outer);
        let rho = norm(x);
        let r = norm(y);
        let psi = y[1].atan2(y[0]) - x[1].atan2(x[0]);
        let two_pi = 2.0 * PI;
        let b0 = (b.ln() - rho.ln()) / (two_pi * (b.ln() - a.ln()));
        let a0 = rho.ln() / two_pi - b0 * a.ln();
        let mut value = a0 + b0 * r.ln();
        let mut dr = b0 / r;
        let mut dtheta = 0.0;
        let (qa, qb, q) = (a / rho, rho / b, a / b);
        let (ra, rb) = (r / b, a / r);
        let (mut pa, mut pb, mut pq, mut p1, mut p2) = (1.0, 1.0, 1.0, 1.0, 1.0);
        for k in 1..2_000_000usize {
            pa *= qa;
            pb *= qb;
            pq *= q;
            p1 *= ra;
            p2 *= rb;
            let kf = k as f64;
            let alpha = -pa / (two_pi * kf);
            let beta = -pb / (two_pi * kf);
            let den = 1.0 - pq * pq;
            let c1 = (beta - pq * alpha) / den;
            let c2 = (alpha - pq * beta) / den;
            let (s, c) = (kf * psi).sin_cos();
            let amp = c1 * p1 + c2 * p2;
            value += amp * c;
            if want_grad {
                dr += kf * (c1 * p1 - c2 * p2) / r * c;
                dtheta -= kf * amp * s;
            }
            if (c1.abs() * p1 + c2.abs() * p2) * (if want_grad { kf } else { 1.0 }) < self.tol && (pa + pb) < self.tol {
                break;
            }
        }
        Corrector { value, dr, dtheta }
    }
}

impl GreenOracle for AnnulusOracle {
    fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        crate::vecops::dist(x, y).ln() / (2.0 * PI) - self.corrector(x, y, false).value
    }

    fn grad_y(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let phi = fundamental_solution(2).unwrap();
        let g = phi.grad_y(x, y);
        let c = self.corrector(x, y, true);
        let r = norm(y);
        let (ct, st) = (y[0] / r, y[1] / r);
        let gx = c.dr * ct - c.dtheta / r * st;
        let gy = c.dr * st + c.dtheta / r * ct;
        vec![g[0] - gx, g[1] - gy]
    }
}

/// Flat torus R^n / (L Z)^n by Ewald summation, normalized to mean zero.
pub struct TorusOracle {
    pub dim: usize,
    pub side: f64,
    alpha: f64,
    volume: f64,
    kvecs: Vec<([i32; 3], f64)>,
}

const KMAX: i32 = 8;

impl TorusOracle {
    pub fn new(dim: usize, side: f64) -> Self {
        let alpha = 4.0 / side;
        let volume = side.powi(dim as i32);
        let mut kvecs = Vec::new();
        let range = |a: usize| if a < dim { -KMAX..=KMAX } else { 0..=0 };
        for k0 in range(0) {
            for k1 in range(1) {
                for k2 in range(2) {
                    let k = [k0, k1, k2];
                    // half space: first nonzero component positive
                    let first = k.iter().find(|&&v| v != 0);
                    if first.is_none_or(|&v| v < 0) {
                        continue;
                    }
                    let n2 = (k0 * k0 + k1 * k1 + k2 * k2) as f64;
                    if n2 > 80.0 {
                        continue;
                    }
                    let kappa2 = n2 * (2.0 * PI / side).powi(2);
                    let c = 2.0 * (-kappa2 / (4.0 * alpha * alpha)).exp() / (volume * kappa2);
                    kvecs.push((k, c));
                }
            }
        }
        TorusOracle { dim, side, alpha, volume, kvecs }
    }

    fn phases(&self, r: &[f64]) -> Vec<[Complex64; 2 * KMAX as usize + 1]> {
        (0..self.dim)
            .map(|a| {
                let mut row = [Complex64::new(0.0, 0.0); 2 * KMAX as usize + 1];
                let base = Complex64::from_polar(1.0, 2.0 * PI * r[a] / self.side);
                let mut p = Complex64::new(1.0, 0.0);
                row[KMAX as usize] = p;
                for k in 1..=KMAX as usize {
                    p *= base;
                    row[KMAX as usize + k] = p;
                    row[KMAX as usize - k] = p.conj();
                }
                row
            })
            .collect()
    }

    /// Fourier part Σ c_k cos(κ·r) and its r-gradient.
    fn fourier(&self, r: &[f64], want_grad: bool) -> (f64, [f64; 3]) {
        let ph = self.phases(r);
        let mut f = 0.0;
        let mut g = [0.0; 3];
        let unit = 2.0 * PI / self.side;
        for (k, c) in &self.kvecs {
            let mut e = Complex64::new(1.0, 0.0);
            for a in 0..self.dim {
                e *= ph[a][(k[a] + KMAX) as usize];
            }
            f += c * e.re;
            if want_grad {
                for a in 0..self.dim {
                    g[a] -= c * unit * k[a] as f64 * e.im;
                }
            }
        }
        (f, g)
    }

    fn real_kernel(&self, s: f64) -> (f64, f64) {
        let a = self.alpha;
        if self.dim == 2 {
            let z = a * a * s * s;
            (exp_e1(z) / (4.0 * PI), -(-z).exp() / (2.0 * PI * s))
        } else {
            let e = libm::erfc(a * s);
            let v = e / (4.0 * PI * s);
            let dv = -(e / (s * s) + 2.0 * a / PI.sqrt() * (-a * a * s * s).exp() / s) / (4.0 * PI);
            (v, dv)
        }
    }

    /// Screened real-space sum over the 3^n nearest images and its gradient.
    fn real_space(&self, r: &[f64], want_grad: bool) -> (f64, [f64; 3]) {
        let mut v = 0.0;
        let mut g = [0.0; 3];
        let range = |a: usize| if a < self.dim { -1..=1 } else { 0..=0 };
        for n0 in range(0) {
            for n1 in range(1) {
                for n2 in range(2) {
                    let n = [n0, n1, n2];
                    let d: Vec<f64> = (0..self.dim).map(|a| r[a] + n[a] as f64 * self.side).collect();
                    let s = norm(&d);
                    if s == 0.0 {
                        continue;
                    }
                    let (k, dk) = self.real_kernel(s);
                    v += k;
                    if want_grad {
                        for a in 0..self.dim {
                            g[a] += dk * d[a] / s;
                        }
                    }
                }
            }
        }
        (v, g)
    }

    fn background(&self) -> f64 {
        1.0 / (4.0 * self.alpha * self.alpha * self.volume)
    }
}

impl GreenOracle for TorusOracle {
    fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        let r = min_image(x, y, self.side);
        let (f, _) = self.fourier(&r, false);
        let (s, _) = self.real_space(&r, false);
        -(f + s - self.background())
    }

    fn grad_y(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let r = min_image(x, y, self.side);
        let (_, gf) = self.fourier(&r, true);
        let (_, gs) = self.real_space(&r, true);
        (0..self.dim).map(|a| -(gf[a] + gs[a])).collect()
    }

    fn smooth_part(&self, x: &[f64], y: &[f64]) -> Option<f64> {
        let r = min_image(x, y, self.side);
        Some(-self.fourier(&r, false).0 + self.background())
    }

    fn singular_integral(&self) -> Option<f64> {
        Some(-1.0 / (4.0 * self.alpha * self.alpha))
    }
}

/// Round sphere of radius R: G = (ln(1 − cos θ) + 1 − ln 2) / 4π.
pub struct SphereOracle {
    pub radius: f64,
}

impl SphereOracle {
    fn cos_angle(&self, x: &[f64], y: &[f64]) -> f64 {
        (dot(x, y) / (norm(x) * norm(y))).clamp(-1.0, 1.0)
    }

    pub const CONSTANT: f64 = (1.0 - std::f64::consts::LN_2) / (4.0 * PI);
}

impl GreenOracle for SphereOracle {
    fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        let c = self.cos_angle(x, y);
        (1.0 - c).ln() / (4.0 * PI) + Self::CONSTANT
    }

    fn grad_y(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let c = self.cos_angle(x, y);
        let (nx, ny) = (norm(x), norm(y));
        let dg_dc = -1.0 / (4.0 * PI * (1.0 - c));
        // ∇_y of cos θ, tangential to the sphere at y
        (0..3).map(|a| dg_dc * (x[a] / nx - c * y[a] / ny) / ny).collect()
    }

    fn smooth_part(&self, _x: &[f64], _y: &[f64]) -> Option<f64> {
        Some(Self::CONSTANT)
    }

    fn singular_integral(&self) -> Option<f64> {
        // ∫ ln(1 − cos θ)/4π dA = R² (ln 2 − 1)
        Some(self.radius * self.radius * (std::f64::consts::LN_2 - 1.0))
    }
}

/// Legendre-series form of the sphere Green function at cos θ = t, summed
/// up to degree `lmax` with Clenshaw's recurrence.
pub fn sphere_green_legendre(t: f64, lmax: usize) -> f64 {
    -crate::special::legendre_series(|l| (2 * l + 1) as f64 / (l * (l + 1)) as f64, lmax, t) / (4.0 * PI)
}

pub fn oracle_for(g: &GeometryHandle) -> Result<Box<dyn GreenOracle>> {
    Ok(match g.kind {
        GeometryKind::Disk { radius } => Box::new(BallOracle::new(2, radius)),
        GeometryKind::Ball { dim, radius } => Box::new(BallOracle::new(dim, radius)),
        GeometryKind::Annulus { inner, outer } => Box::new(AnnulusOracle::new(inner, outer)),
        GeometryKind::Torus { dim, side } => Box::new(TorusOracle::new(dim, side)),
        GeometryKind::Sphere2 { radius } => Box::new(SphereOracle { radius }),
        GeometryKind::Ellipse { .. } => return Err(Error::NoOracle(g.name())),
    })
}

fn check_pair(g: &GeometryHandle, x: &[f64], y: &[f64]) -> Result<()> {
    if !g.contains(x) {
        return Err(Error::OutsideGeometry(x.to_vec()));
    }
    if !g.contains(y) {
        return Err(Error::OutsideGeometry(y.to_vec()));
    }
    if g.distance_unchecked(x, y) == 0.0 {
        return Err(Error::Diagonal);
    }
    Ok(())
}

/// Analytic Green function value.
pub fn green_analytic(g: &GeometryHandle, x: &[f64], y: &[f64]) -> Result<f64> {
    let o = oracle_for(g)?;
    check_pair(g, x, y)?;
    Ok(o.value(x, y))
}

/// Analytic ∇_y G(x, y).
pub fn green_analytic_gradient(g: &GeometryHandle, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let o = oracle_for(g)?;
    check_pair(g, x, y)?;
    Ok(o.grad_y(x, y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_geometry, GeometrySpec};

    fn geo(kind: &str, params: &[f64], h: f64) -> GeometryHandle {
        build_geometry(&GeometrySpec::new(kind, params, h)).unwrap()
    }

    #[test]
    fn ball_examples() {
        let d = geo("disk", &[1.0], 0.2);
        let v = green_analytic(&d, &[0.0, 0.0], &[0.5, 0.0]).unwrap();
        assert!((v - 0.5f64.ln() / (2.0 * PI)).abs() < 1e-15);
        let b = geo("ball3", &[1.0], 0.5);
        let v = green_analytic(&b, &[0.0; 3], &[0.5, 0.0, 0.0]).unwrap();
        assert!((v + (1.0 / 0.5 - 1.0) / (4.0 * PI)).abs() < 1e-15);
        let on = green_analytic(&d, &[0.3, -0.2], &[0.6, 0.8]).unwrap();
        assert!(on.abs() < 1e-12);
        assert!(matches!(green_analytic(&d, &[0.1, 0.1], &[0.1, 0.1]), Err(Error::Diagonal)));
        assert!(matches!(green_analytic(&geo("ellipse", &[2.0, 1.0], 0.3), &[0.0, 0.0], &[0.5, 0.0]), Err(Error::NoOracle(_))));
    }

    fn fd_gradient(o: &dyn GreenOracle, x: &[f64], y: &[f64]) -> Vec<f64> {
        let h = 1e-6;
        (0..y.len())
            .map(|a| {
                let mut yp = y.to_vec();
                let mut ym = y.to_vec();
                yp[a] += h;
                ym[a] -= h;
                (o.value(x, &yp) - o.value(x, &ym)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn gradients_match_differences() {
        let cases: Vec<(Box<dyn GreenOracle>, Vec<f64>, Vec<f64>)> = vec![
            (Box::new(BallOracle::new(2, 1.3)), vec![0.2, 0.4], vec![-0.5, 0.1]),
            (Box::new(BallOracle::new(3, 1.0)), vec![0.2, 0.4, -0.1], vec![-0.5, 0.1, 0.3]),
            (Box::new(BallOracle::new(4, 1.0)), vec![0.2, 0.4, -0.1, 0.1], vec![-0.5, 0.1, 0.3, 0.0]),
            (Box::new(AnnulusOracle::new(1.0, 2.0)), vec![1.3, 0.4], vec![-1.2, 0.9]),
            (Box::new(TorusOracle::new(2, 1.0)), vec![0.2, 0.4], vec![0.7, 0.1]),
            (Box::new(TorusOracle::new(3, 1.0)), vec![0.2, 0.4, 0.5], vec![0.7, 0.1, 0.9]),
        ];
        for (o, x, y) in cases {
            let g = o.grad_y(&x, &y);
            let f = fd_gradient(o.as_ref(), &x, &y);
            for a in 0..g.len() {
                assert!((g[a] - f[a]).abs() < 1e-7, "{g:?} vs {f:?}");
            }
        }
        let s = SphereOracle { radius: 1.0 };
        let x = [0.0, 0.0, 1.0];
        let t: f64 = 1.0;
        let y = [t.sin(), 0.0, t.cos()];
        let g = s.grad_y(&x, &y);
        assert!((norm(&g) - 1.0 / (4.0 * PI) / (t / 2.0).tan()).abs() < 1e-12);
    }

    #[test]
    fn annulus_vanishes_on_both_circles_and_is_symmetric() {
        let o = AnnulusOracle::new(1.0, 2.0);
        let x = [1.4, 0.3];
        for t in [0.0f64, 1.0, 2.5, 4.0] {
            assert!(o.value(&x, &[t.cos(), t.sin()]).abs() < 1e-12);
            assert!(o.value(&x, &[2.0 * t.cos(), 2.0 * t.sin()]).abs() < 1e-12);
        }
        let y = [-0.8, 1.1];
        assert!((o.value(&x, &y) - o.value(&y, &x)).abs() < 1e-12);
    }

    #[test]
    fn torus_is_periodic_symmetric_and_harmonic_off_source() {
        let o = TorusOracle::new(2, 1.0);
        let x = [0.3, 0.6];
        let y = [0.8, 0.15];
        assert!((o.value(&x, &y) - o.value(&y, &x)).abs() < 1e-13);
        assert!((o.value(&x, &y) - o.value(&x, &[1.8, -0.85])).abs() < 1e-13);
        // Δ_y G = −1 away from the source
        let h = 1e-3;
        let mut lap = -4.0 * o.value(&x, &y);
        for (a, s) in [(0, 1.0), (0, -1.0), (1, 1.0), (1, -1.0)] {
            let mut z = y.to_vec();
            z[a] += s * h;
            lap += o.value(&x, &z);
        }
        assert!((lap / (h * h) + 1.0).abs() < 1e-4);
    }

    #[test]
    fn sphere_series_agrees_with_closed_form() {
        let o = SphereOracle { radius: 1.0 };
        for t in [-0.9, -0.3, 0.2, 0.6] {
            let th = f64::acos(t);
            let y = [th.sin(), 0.0, t];
            let exact = o.value(&[0.0, 0.0, 1.0], &y);
            let series = sphere_green_legendre(t, 20_000);
            assert!((exact - series).abs() < 1e-5, "{t}: {exact} vs {series}");
        }
    }

    proptest::proptest! {
        #[test]
        fn ball_gradient_near_boundary_is_poisson(theta in 0.0..6.28f64, phi in -1.5..1.5f64, log_d in -11.0..-2.0f64) {
            let o = BallOracle::new(2, 1.0);
            let y = [theta.cos(), theta.sin()];
            // x at distance 10^log_d from y, strictly inside
            let dir = [-(theta + phi).cos(), -(theta + phi).sin()];
            let d = 10f64.powf(log_d);
            let x = [y[0] + d * dir[0], y[1] + d * dir[1]];
            proptest::prop_assume!(dot(&x, &x) < 1.0);
            let g = o.grad_y(&x, &y);
            let p = o.poisson(&x, &y);
            proptest::prop_assert!(g.iter().all(|v| v.is_finite()));
            // |y| = 1 only to rounding, which perturbs the image distance by ~1e-16/d²
            proptest::prop_assert!((norm(&g) - p).abs() <= 1e-4 * p, "{} vs {}", norm(&g), p);
        }
    }
}
