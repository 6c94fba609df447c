//! L^p profiles N(a) of the Green kernel and its gradient.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::quadrature::{boundary_rule, polar_rule, sphere_polar_rule, PolarResolution};
use crate::error::{Error, Result};
use crate::geometry::{GeometryHandle, GeometryKind};
use crate::green::{farthest_points, fundamental_solution, oracle_for, FundamentalSolution, GreenOracle, GreenTable};
use crate::vecops::{norm, unit_sphere_area};

/// Default exponent grids.
pub const A_GRID: [f64; 10] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
pub const P_GRID: [f64; 7] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileMethod {
    /// Polar quadrature of the analytic oracle centred at each source.
    Oracle,
    /// Table columns away from the source plus a ball proxy for the
    /// excluded disc.
    Table,
}

/// ∫|G|^p dV against the shape p^p C^{p+1}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PSweep {
    pub p_grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Log-log slope of N(p)^{1/p} against p on each grid segment.
    pub slopes: Vec<f64>,
    /// Least-squares ln C in ln N(p) − p ln p = (p+1) ln C.
    pub fitted_c: f64,
}

impl PSweep {
    fn new(p_grid: Vec<f64>, values: Vec<f64>) -> Self {
        let root: Vec<f64> = p_grid.iter().zip(&values).map(|(p, v)| v.ln() / p).collect();
        let slopes = (1..p_grid.len()).map(|k| (root[k] - root[k - 1]) / (p_grid[k].ln() - p_grid[k - 1].ln())).collect();
        let (mut num, mut den) = (0.0, 0.0);
        for (p, v) in p_grid.iter().zip(&values) {
            num += (p + 1.0) * (v.ln() - p * p.ln());
            den += (p + 1.0) * (p + 1.0);
        }
        PSweep { p_grid, values, slopes, fitted_c: (num / den).exp() }
    }

    /// The last `segments` slopes are within `tol` (relative) of 1.
    pub fn shape_ok(&self, segments: usize, tol: f64) -> bool {
        self.slopes.iter().rev().take(segments).all(|s| (s - 1.0).abs() <= tol)
    }
}

/// Least-squares fit of N(a)·a ≈ C and the band check around it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitCheck {
    pub fitted_c: f64,
    /// max N(a)·a / C.
    pub max_ratio: f64,
    /// min N(a)·a / C.
    pub min_ratio: f64,
}

impl FitCheck {
    pub fn new(a_grid: &[f64], n: &[f64]) -> Self {
        let scaled: Vec<f64> = a_grid.iter().zip(n).map(|(a, v)| a * v).collect();
        let c = scaled.iter().sum::<f64>() / scaled.len() as f64;
        FitCheck {
            fitted_c: c,
            max_ratio: scaled.iter().fold(0.0, |m, v| f64::max(m, v / c)),
            min_ratio: scaled.iter().fold(f64::INFINITY, |m, v| f64::min(m, v / c)),
        }
    }

    /// Every N(a)·a lies within a factor `factor` of the fitted C.
    pub fn within(&self, factor: f64) -> bool {
        self.max_ratio <= factor && self.min_ratio >= 1.0 / factor
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelProfile {
    pub geometry: String,
    pub dim: usize,
    pub volume: f64,
    pub method: ProfileMethod,
    pub a_grid: Vec<f64>,
    /// N(a, M) = sup_x ∫_M |∇_y G(x, y)|^{(n−a)/(n−1)} dV(y).
    pub interior: Vec<f64>,
    /// sup_y ∫_M |∇_y G(x, y)|^{(n−a)/(n−1)} dV(x).
    pub interior_column: Vec<f64>,
    /// N(a, ∂M) = sup_x ∫_∂M |∇_y G(x, y)|^{(n−1−a)/(n−1)} dS(y).
    pub boundary: Option<Vec<f64>>,
    /// sup_{y ∈ ∂M} ∫_M |∇_y G(x, y)|^{(n−a)/(n−1)} dV(x).
    pub boundary_column: Option<Vec<f64>>,
    /// sup_x ∫_M |G(x, y)|^{(n−a)/(n−2)} dV(y), n ≥ 3.
    pub laplace: Option<Vec<f64>>,
    pub interior_fit: FitCheck,
    pub boundary_fit: Option<FitCheck>,
    /// n = 2 only.
    pub p_sweep: Option<PSweep>,
}

pub fn interior_exponent(n: usize, a: f64) -> f64 {
    (n as f64 - a) / (n as f64 - 1.0)
}

pub fn boundary_exponent(n: usize, a: f64) -> f64 {
    (n as f64 - 1.0 - a) / (n as f64 - 1.0)
}

pub fn laplace_exponent(n: usize, a: f64) -> f64 {
    (n as f64 - a) / (n as f64 - 2.0)
}

fn check_grid(n: usize, a_grid: &[f64]) -> Result<()> {
    if a_grid.is_empty() {
        return Err(Error::Empty("a-grid"));
    }
    for &a in a_grid {
        if !(a > 0.0 && a <= n as f64) || !a.is_finite() {
            return Err(Error::Exponent(format!("a = {a} must lie in (0, {n}]")));
        }
    }
    Ok(())
}

/// Profiles over the table's sources.
pub fn kernel_lp_profile(table: &GreenTable, a_grid: &[f64]) -> Result<KernelProfile> {
    kernel_lp_profile_at(&table.geometry, &table.sources, a_grid, Some(table))
}

/// Profiles with the sup taken over `centres`. With an analytic oracle the
/// integrals use polar quadrature; otherwise `table` must be given.
pub fn kernel_lp_profile_at(
    g: &GeometryHandle,
    centres: &[Vec<f64>],
    a_grid: &[f64],
    table: Option<&GreenTable>,
) -> Result<KernelProfile> {
    let n = g.dim();
    check_grid(g.manifold_dim(), a_grid)?;
    if centres.is_empty() {
        return Err(Error::Empty("source set"));
    }
    match oracle_for(g) {
        Ok(oracle) => oracle_profile(g, oracle.as_ref(), centres, a_grid),
        Err(_) => {
            let t = table.ok_or_else(|| Error::Missing(format!("Green table for {}", g.name())))?;
            table_profile(t, a_grid, n)
        }
    }
}

/// Values of |G| and |∇_y G| at the nodes of a polar rule about x, with the
/// singular part evaluated from r exactly.
struct Evaluator<'a> {
    oracle: &'a dyn GreenOracle,
    phi: FundamentalSolution,
    rmin: f64,
}

impl Evaluator<'_> {
    /// (G, |∇_y G|) at y = x + r·dir (`column`: at x = y + r·dir with y fixed).
    fn eval(&self, c: &[f64], dir: &[f64], r: f64, column: bool) -> (f64, f64) {
        let re = r.max(self.rmin);
        let p: Vec<f64> = c.iter().zip(dir).map(|(a, b)| a + re * b).collect();
        let (x, y) = if column { (p.as_slice(), c) } else { (c, p.as_slice()) };
        let sign = if column { -1.0 } else { 1.0 };
        let (dp_e, dp) = (self.phi.dphi(re), self.phi.dphi(r));
        let h = self.oracle.value(x, y) - self.phi.phi(re);
        let gy = self.oracle.grad_y(x, y);
        // ∇_y Φ(|x − y|) = sign·Φ'(r)·dir
        let grad: Vec<f64> = gy.iter().zip(dir).map(|(g, d)| g - sign * dp_e * d + sign * dp * d).collect();
        (self.phi.phi(r) + h, norm(&grad))
    }
}

/// Σ w k^s for every exponent.
fn moments(w: &[f64], k: &[f64], exps: &[f64]) -> Vec<f64> {
    exps.iter().map(|&s| w.iter().zip(k).map(|(w, k)| if *k > 0.0 { w * k.powf(s) } else { 0.0 }).sum()).collect()
}

fn sup_rows(rows: Vec<Vec<f64>>) -> Vec<f64> {
    let len = rows.first().map_or(0, |r| r.len());
    (0..len).map(|k| rows.iter().map(|r| r[k]).fold(0.0, f64::max)).collect()
}

fn oracle_profile(g: &GeometryHandle, oracle: &dyn GreenOracle, centres: &[Vec<f64>], a_grid: &[f64]) -> Result<KernelProfile> {
    let n = g.manifold_dim();
    let res = PolarResolution::for_dim(n);
    let int_exp: Vec<f64> = a_grid.iter().map(|&a| interior_exponent(n, a)).collect();
    let lap_exp: Vec<f64> = a_grid.iter().map(|&a| laplace_exponent(n, a)).collect();
    let p_grid: Vec<f64> = P_GRID.to_vec();

    // Per centre: interior row moments, Laplace row moments, |G|^p moments
    // and interior column moments.
    let per_centre: Vec<[Vec<f64>; 4]> = if let GeometryKind::Sphere2 { radius } = g.kind {
        centres
            .par_iter()
            .map(|c| {
                let rule = sphere_polar_rule(radius, c, res);
                let w: Vec<f64> = rule.iter().map(|t| t.2).collect();
                let gv: Vec<f64> = rule.iter().map(|t| sphere_value(t.0).abs()).collect();
                let gg: Vec<f64> = rule.iter().map(|t| 1.0 / ((0.5 * t.0).tan() * 4.0 * PI * radius)).collect();
                let row = moments(&w, &gg, &int_exp);
                [row.clone(), vec![], moments(&w, &gv, &p_grid), row]
            })
            .collect()
    } else {
        let ev = Evaluator { oracle, phi: fundamental_solution(n)?, rmin: 1e-6 * g.scale() };
        centres
            .par_iter()
            .map(|c| {
                let rule = polar_rule(g, c, res);
                let w: Vec<f64> = rule.iter().map(|t| t.w).collect();
                let (gv, gg): (Vec<f64>, Vec<f64>) = rule.iter().map(|t| ev.eval(c, &t.dir, t.r, false)).map(|(v, d)| (v.abs(), d)).unzip();
                let col: Vec<f64> = rule.iter().map(|t| ev.eval(c, &t.dir, t.r, true).1).collect();
                let lap = if n >= 3 { moments(&w, &gv, &lap_exp) } else { vec![] };
                let ps = if n == 2 { moments(&w, &gv, &p_grid) } else { vec![] };
                [moments(&w, &gg, &int_exp), lap, ps, moments(&w, &col, &int_exp)]
            })
            .collect()
    };
    let mut parts: [Vec<Vec<f64>>; 4] = Default::default();
    for pc in per_centre {
        for (k, v) in pc.into_iter().enumerate() {
            parts[k].push(v);
        }
    }
    let [rows, laps, psw, cols] = parts;
    let interior = sup_rows(rows);
    let interior_column = sup_rows(cols);

    let (boundary, boundary_column) = if g.has_boundary() {
        let bnd_exp: Vec<f64> = a_grid.iter().map(|&a| boundary_exponent(n, a)).collect();
        let brows: Vec<Vec<f64>> = centres
            .par_iter()
            .map(|x| {
                let rule = boundary_rule(g, x, res);
                let w: Vec<f64> = rule.iter().map(|t| t.2).collect();
                let k: Vec<f64> = rule.iter().map(|(y, _, _)| norm(&oracle.grad_y(x, y))).collect();
                moments(&w, &k, &bnd_exp)
            })
            .collect();
        let bnodes = farthest_points(g, g.boundary_nodes(), 12, Some(g.boundary_nodes()[0]));
        let ev = Evaluator { oracle, phi: fundamental_solution(n)?, rmin: 1e-10 * g.scale() };
        let bcols: Vec<Vec<f64>> = bnodes
            .par_iter()
            .map(|&b| {
                let y = g.node(b);
                let rule = polar_rule(g, y, res);
                let w: Vec<f64> = rule.iter().map(|t| t.w).collect();
                let k: Vec<f64> = rule
                    .iter()
                    .map(|t| {
                        let x: Vec<f64> = y.iter().zip(&t.dir).map(|(a, d)| a + t.r.max(ev.rmin) * d).collect();
                        norm(&oracle.grad_y(&x, y))
                    })
                    .collect();
                moments(&w, &k, &int_exp)
            })
            .collect();
        (Some(sup_rows(brows)), Some(sup_rows(bcols)))
    } else {
        (None, None)
    };

    let p_sweep = (n == 2).then(|| PSweep::new(p_grid, sup_rows(psw)));
    let laplace = (n >= 3).then(|| sup_rows(laps));
    let interior_fit = FitCheck::new(a_grid, &interior);
    let boundary_fit = boundary.as_ref().map(|b| FitCheck::new(a_grid, b));
    Ok(KernelProfile {
        geometry: g.name(),
        dim: n,
        volume: g.kind.exact_volume(),
        method: ProfileMethod::Oracle,
        a_grid: a_grid.to_vec(),
        interior,
        interior_column,
        boundary,
        boundary_column,
        laplace,
        interior_fit,
        boundary_fit,
        p_sweep,
    })
}

/// Sphere Green function as a function of the polar angle; the log is
/// written with sin(θ/2) so that small angles keep full precision.
fn sphere_value(theta: f64) -> f64 {
    (2.0 * (0.5 * theta).sin().ln() + 1.0) / (4.0 * PI)
}

fn table_profile(t: &GreenTable, a_grid: &[f64], n: usize) -> Result<KernelProfile> {
    let g = &t.geometry;
    let w = g.volume_weights();
    let rho = t.exclusion_radius();
    let omega = unit_sphere_area(n);
    let int_exp: Vec<f64> = a_grid.iter().map(|&a| interior_exponent(n, a)).collect();
    let bnd_exp: Vec<f64> = a_grid.iter().map(|&a| boundary_exponent(n, a)).collect();
    let mut rows = Vec::new();
    let mut brows = Vec::new();
    let mut laps = Vec::new();
    let mut psw = Vec::new();
    for (i, x) in t.sources.iter().enumerate() {
        let far: Vec<usize> = (0..t.n_targets()).filter(|&j| !t.is_masked(i, j) && g.distance_unchecked(x, g.node(j)) >= rho).collect();
        let wk: Vec<f64> = far.iter().map(|&j| w[j]).collect();
        let gg: Vec<f64> = far.iter().map(|&j| norm(t.gradient(i, j))).collect();
        let gv: Vec<f64> = far.iter().map(|&j| t.values[i][j].abs()).collect();
        // ∫_{B(x,ρ)} (r^{1−n}/ω)^s dV = ω^{1−s} ρ^a / a
        let mut row = moments(&wk, &gg, &int_exp);
        for (k, &a) in a_grid.iter().enumerate() {
            row[k] += omega.powf(1.0 - int_exp[k]) * rho.powf(a) / a;
        }
        rows.push(row);
        if n >= 3 {
            let lap_exp: Vec<f64> = a_grid.iter().map(|&a| laplace_exponent(n, a)).collect();
            let mut row = moments(&wk, &gv, &lap_exp);
            let c = 1.0 / ((n - 2) as f64 * omega);
            // ∫_{B(x,ρ)} (c r^{2−n})^s dV = ω c^s ρ^a / a
            for (k, &a) in a_grid.iter().enumerate() {
                row[k] += omega * c.powf(lap_exp[k]) * rho.powf(a) / a;
            }
            laps.push(row);
        } else {
            let mut row = moments(&wk, &gv, &P_GRID);
            for (k, &p) in P_GRID.iter().enumerate() {
                row[k] += ball_log_moment(rho, p);
            }
            psw.push(row);
        }
        if g.has_boundary() {
            let bw = g.boundary_weights();
            let k: Vec<f64> = t.normal_derivatives[i].iter().map(|v| v.abs()).collect();
            brows.push(moments(bw, &k, &bnd_exp));
        }
    }
    let interior = sup_rows(rows);
    let boundary = g.has_boundary().then(|| sup_rows(brows));
    Ok(KernelProfile {
        geometry: g.name(),
        dim: n,
        volume: g.volume(),
        method: ProfileMethod::Table,
        a_grid: a_grid.to_vec(),
        interior_column: interior.clone(),
        boundary_column: boundary.clone(),
        interior_fit: FitCheck::new(a_grid, &interior),
        boundary_fit: boundary.as_ref().map(|b| FitCheck::new(a_grid, b)),
        interior,
        boundary,
        laplace: (n >= 3).then(|| sup_rows(laps)),
        p_sweep: (n == 2).then(|| PSweep::new(P_GRID.to_vec(), sup_rows(psw))),
    })
}

/// ∫_{B(0,ρ)} |ln r / 2π|^p dV by Gauss–Legendre in t = −ln(r/ρ).
fn ball_log_moment(rho: f64, p: f64) -> f64 {
    let (x, w) = crate::special::gauss_legendre(64);
    // r = ρ e^{−t}, dV = 2π r dr = 2π ρ² e^{−2t} dt, t ∈ [0, 60]
    let tmax = 60.0;
    x.iter()
        .zip(&w)
        .map(|(u, wu)| {
            let t = 0.5 * tmax * (u + 1.0);
            let r = rho * (-t).exp();
            0.5 * tmax * wu * 2.0 * PI * rho * rho * (-2.0 * t).exp() * (r.ln() / (2.0 * PI)).abs().powf(p)
        })
        .sum()
}

impl KernelProfile {
    fn lookup(&self, curve: &[f64], a: f64) -> Result<(f64, bool)> {
        lookup(&self.a_grid, curve, a)
    }

    /// N(a, M), linearly interpolated off the grid (flag set).
    pub fn n_interior(&self, a: f64) -> Result<(f64, bool)> {
        self.lookup(&self.interior, a)
    }

    pub fn n_interior_column(&self, a: f64) -> Result<(f64, bool)> {
        self.lookup(&self.interior_column, a)
    }

    pub fn n_boundary(&self, a: f64) -> Result<(f64, bool)> {
        self.lookup(self.boundary.as_deref().ok_or(Error::NoBoundary)?, a)
    }

    pub fn n_boundary_column(&self, a: f64) -> Result<(f64, bool)> {
        self.lookup(self.boundary_column.as_deref().ok_or(Error::NoBoundary)?, a)
    }

    pub fn n_laplace(&self, a: f64) -> Result<(f64, bool)> {
        self.lookup(self.laplace.as_deref().ok_or_else(|| Error::Missing("Laplace profile (n ≥ 3 only)".into()))?, a)
    }

    /// N(a, M) nonincreasing in a. This depends on scale: the centre of the
    /// unit disk gives (2π)^{a−1}/a, which grows for a > 1/ln 2π.
    pub fn interior_nonincreasing(&self) -> bool {
        self.interior.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9))
    }
}

/// ∫|G|^s on the p-sweep grid, interpolated in between (flag set).
pub fn lookup_p(sweep: &PSweep, s: f64) -> Result<(f64, bool)> {
    lookup(&sweep.p_grid, &sweep.values, s)
}

fn lookup(grid: &[f64], curve: &[f64], a: f64) -> Result<(f64, bool)> {
    if let Some(k) = grid.iter().position(|g| (g - a).abs() <= 1e-12 * a.abs().max(1.0)) {
        return Ok((curve[k], false));
    }
    let k = grid.windows(2).position(|w| w[0] < a && a < w[1]).ok_or_else(|| {
        Error::Missing(format!("profile value at a = {a} (grid covers {:?}..{:?})", grid.first(), grid.last()))
    })?;
    let t = (a - grid[k]) / (grid[k + 1] - grid[k]);
    Ok(((1.0 - t) * curve[k] + t * curve[k + 1], true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_geometry, GeometrySpec};
    use libm::tgamma;

    fn geo(kind: &str, params: &[f64], h: f64) -> GeometryHandle {
        build_geometry(&GeometrySpec::new(kind, params, h)).unwrap()
    }

    #[test]
    fn disk_centre_matches_closed_forms() {
        let g = geo("disk", &[1.0], 0.2);
        let p = kernel_lp_profile_at(&g, &[vec![0.0, 0.0]], &A_GRID, None).unwrap();
        for (a, v) in A_GRID.iter().zip(&p.interior) {
            // ∫ (2πr)^{a−2} dV = (2π)^{a−1}/a
            let exact = (2.0 * PI).powf(a - 1.0) / a;
            assert!((v - exact).abs() < 1e-8 * exact, "a={a}: {v} vs {exact}");
        }
        for (a, v) in A_GRID.iter().zip(p.boundary.as_ref().unwrap()) {
            let exact = (2.0 * PI).powf(*a);
            assert!((v - exact).abs() < 1e-9 * exact, "a={a}: {v} vs {exact}");
        }
        let s = p.p_sweep.unwrap();
        for (pp, v) in s.p_grid.iter().zip(&s.values) {
            // ∫ |ln r/2π|^p dV = 2π Γ(p+1) / ((2π)^p 2^{p+1})
            let exact = 2.0 * PI * tgamma(pp + 1.0) / ((2.0 * PI).powf(*pp) * 2f64.powf(pp + 1.0));
            assert!((v - exact).abs() < 1e-7 * exact, "p={pp}: {v} vs {exact}");
        }
    }

    #[test]
    fn ball3_centre_matches_closed_forms() {
        let g = geo("ball3", &[1.0], 0.5);
        let p = kernel_lp_profile_at(&g, &[vec![0.0; 3]], &[0.5, 1.0], None).unwrap();
        for (a, v) in [0.5, 1.0].iter().zip(&p.interior) {
            // ∫ (4πr²)^{−(3−a)/2} dV = (4π)^{(a−1)/2} / a
            let exact = (4.0 * PI).powf((a - 1.0) / 2.0) / a;
            assert!((v - exact).abs() < 1e-8 * exact, "a={a}: {v} vs {exact}");
        }
        // Laplace a = 1, exponent 2: ∫ ((1/r − 1)/4π)² dV = 1/(12π)
        assert!((p.laplace.unwrap()[1] - 1.0 / (12.0 * PI)).abs() < 1e-8);
    }

    #[test]
    fn off_centre_sources_and_nonincrease() {
        let g = geo("disk", &[0.2], 0.02);
        let xs = vec![vec![0.06, 0.02], vec![-0.12, 0.12], vec![0.0, -0.18]];
        let p = kernel_lp_profile_at(&g, &xs, &A_GRID, None).unwrap();
        assert!(p.interior_nonincreasing());
        let unit = kernel_lp_profile_at(&geo("disk", &[1.0], 0.1), &[vec![0.0, 0.0]], &A_GRID, None).unwrap();
        assert!(!unit.interior_nonincreasing());
        assert!(p.interior.iter().chain(p.boundary.as_ref().unwrap()).all(|v| v.is_finite() && *v > 0.0));
        assert!(p.interior_column.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn sphere_and_torus_profiles() {
        let s = geo("sphere2", &[1.0], 0.3);
        let p = kernel_lp_profile_at(&s, &[vec![0.0, 0.0, 1.0]], &[1.0], None).unwrap();
        // ∫ cot(θ/2)/4π dA = ½∫(1 + cos θ) dθ = π/2
        assert!((p.interior[0] - PI / 2.0).abs() < 1e-8, "{}", p.interior[0]);
        let t = geo("torus2", &[1.0], 0.1);
        let p = kernel_lp_profile_at(&t, &[vec![0.5, 0.5]], &[0.5, 1.0], None).unwrap();
        assert!(p.interior.iter().all(|v| v.is_finite()));
        assert!(p.boundary.is_none());
    }

    #[test]
    fn rejects_bad_grid() {
        let g = geo("disk", &[1.0], 0.2);
        assert!(kernel_lp_profile_at(&g, &[vec![0.0, 0.0]], &[0.0, 0.5], None).is_err());
        assert!(kernel_lp_profile_at(&g, &[vec![0.0, 0.0]], &[2.5], None).is_err());
    }

    #[test]
    fn interpolation_is_flagged() {
        assert_eq!(lookup(&[0.1, 0.2], &[2.0, 1.0], 0.2).unwrap(), (1.0, false));
        let (v, f) = lookup(&[0.1, 0.2], &[2.0, 1.0], 0.15).unwrap();
        assert!(f && (v - 1.5).abs() < 1e-12);
        assert!(lookup(&[0.1, 0.2], &[2.0, 1.0], 0.5).is_err());
    }
}
