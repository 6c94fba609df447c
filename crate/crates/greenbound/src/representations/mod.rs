//! Integral representations: smooth Green representation, gradient form,
//! Green–Riesz for quasi-subharmonic functions and the ∂̄ formula on flat
//! ℂ¹ and ℂ².

pub mod cases;
pub mod dbar;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use cases::{
    case_by_name, fourier_mode, log_point, newton_point, torus_qsh, ComplexFn, ComplexVecFn, RealFn, RieszMeasure, RieszSpec, Smoothness,
    TestFunctionCase, CASE_NAMES,
};
pub use dbar::{calibrate_dbar_pairing, dbar_qmc, reconstruct_dbar, DBAR_PAIRING, DBAR_QMC_NODES};

use crate::error::{Error, Result};
use crate::geometry::{GeometryHandle, GeometryKind};
use crate::green::{build_green_table, oracle_for, GreenTable};
use crate::laplace::SpectralOps;
use crate::vecops::dist;

/// Right side of a representation formula next to the exact value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reconstruction {
    pub value: Complex64,
    pub exact: Complex64,
    pub error: f64,
    pub volume_term: Complex64,
    pub boundary_term: Complex64,
    /// f_ave on closed manifolds, 0 otherwise.
    pub average_term: Complex64,
}

impl Reconstruction {
    pub(crate) fn new(exact: Complex64, volume_term: Complex64, boundary_term: Complex64, average_term: Complex64) -> Self {
        let value = volume_term + boundary_term + average_term;
        Reconstruction { value, exact, error: (value - exact).norm(), volume_term, boundary_term, average_term }
    }

    pub fn row(&self, case: &str, x: &[f64]) -> ErrorRow {
        ErrorRow {
            case: case.into(),
            x: x.to_vec(),
            value: [self.value.re, self.value.im],
            exact: [self.exact.re, self.exact.im],
            error: self.error,
            volume_term: [self.volume_term.re, self.volume_term.im],
            boundary_term: [self.boundary_term.re, self.boundary_term.im],
        }
    }
}

/// JSON row of a reconstruction sweep; complex numbers as [re, im].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub case: String,
    pub x: Vec<f64>,
    pub value: [f64; 2],
    pub exact: [f64; 2],
    pub error: f64,
    pub volume_term: [f64; 2],
    pub boundary_term: [f64; 2],
}

pub(crate) fn source_index(table: &GreenTable, x: &[f64]) -> Result<usize> {
    let tiny = 1e-12 * table.geometry.scale();
    table
        .sources
        .iter()
        .position(|s| dist(s, x) <= tiny)
        .ok_or_else(|| Error::Missing(format!("table column for source {x:?}")))
}

fn volume_sum(table: &GreenTable, i: usize, density: impl Fn(usize) -> Complex64) -> Complex64 {
    let w = table.geometry.volume_weights();
    table.values[i].iter().zip(w).enumerate().map(|(j, (gv, wj))| density(j) * (gv * wj)).sum()
}

/// ∮ ∂G/∂ν_y f dS with the lumped boundary weights.
pub(crate) fn boundary_sum(table: &GreenTable, i: usize, case: &TestFunctionCase) -> Complex64 {
    let g = &table.geometry;
    g.boundary_nodes()
        .iter()
        .zip(g.boundary_weights())
        .zip(&table.normal_derivatives[i])
        .map(|((&b, wb), dn)| case.eval(g.node(b)) * (dn * wb))
        .sum()
}

/// Known mean, or the lumped quadrature mean.
fn average(g: &GeometryHandle, case: &TestFunctionCase) -> Complex64 {
    case.average.unwrap_or_else(|| {
        let w = g.volume_weights();
        let s: Complex64 = (0..g.node_count()).map(|j| case.eval(g.node(j)) * w[j]).sum();
        s / g.volume()
    })
}

/// Mean-zero solution of Δu = ρ on the torus grid evaluated at x; this is
/// ∫G(x,y)ρ(y)dy up to the mean of ρ, which G annihilates.
fn spectral_green(g: &GeometryHandle, density: &[f64], x: &[f64]) -> Option<f64> {
    let grid = g.grid()?;
    let ops = SpectralOps::new(grid);
    Some(ops.interpolate(&ops.solve_poisson(density), x))
}

fn complex_spectral_green(g: &GeometryHandle, density: &[Complex64], x: &[f64]) -> Option<Complex64> {
    let re: Vec<f64> = density.iter().map(|v| v.re).collect();
    let im: Vec<f64> = density.iter().map(|v| v.im).collect();
    Some(Complex64::new(spectral_green(g, &re, x)?, spectral_green(g, &im, x)?))
}

/// f(x) = ∫G Δf + ∮ ∂_νG f, or f_ave + ∫G Δf on closed manifolds. On
/// torus grids the volume term is the spectral Green operator.
pub fn reconstruct_smooth(table: &GreenTable, case: &TestFunctionCase, x: &[f64]) -> Result<Reconstruction> {
    let lap = case.laplacian.as_ref().ok_or_else(|| Error::Missing(format!("Laplacian of case `{}`", case.name)))?;
    let g = &table.geometry;
    let exact = case.eval(x);
    if !g.has_boundary() {
        let f_ave = average(g, case);
        let density: Vec<Complex64> = (0..g.node_count()).map(|j| lap(g.node(j))).collect();
        let volume = match complex_spectral_green(g, &density, x) {
            Some(v) => v,
            None => volume_sum(table, source_index(table, x)?, |j| density[j]),
        };
        return Ok(Reconstruction::new(exact, volume, Complex64::ZERO, f_ave));
    }
    let i = source_index(table, x)?;
    let volume = volume_sum(table, i, |j| lap(g.node(j)));
    Ok(Reconstruction::new(exact, volume, boundary_sum(table, i, case), Complex64::ZERO))
}

/// f(x) = −∫⟨∇_yG, ∇f⟩ + ∮ ∂_νG f (plus f_ave when closed).
pub fn reconstruct_gradient_form(table: &GreenTable, case: &TestFunctionCase, x: &[f64]) -> Result<Reconstruction> {
    let grad = case.gradient.as_ref().ok_or_else(|| Error::Missing(format!("gradient of case `{}`", case.name)))?;
    let g = &table.geometry;
    let i = source_index(table, x)?;
    let dim = table.dim();
    let w = g.volume_weights();
    let volume: Complex64 = (0..table.n_targets())
        .map(|j| {
            let gy = table.gradient(i, j);
            let df = grad(g.node(j));
            -df.iter().zip(gy).map(|(a, b)| a * *b).sum::<Complex64>() * w[j]
        })
        .sum();
    debug_assert_eq!(table.gradients[i].len(), dim * table.n_targets());
    let (boundary, f_ave) =
        if g.has_boundary() { (boundary_sum(table, i, case), Complex64::ZERO) } else { (Complex64::ZERO, average(g, case)) };
    Ok(Reconstruction::new(case.eval(x), volume, boundary, f_ave))
}

/// G(x_i, a) from the oracle, else by P1 interpolation of the table row.
fn point_green(table: &GreenTable, i: usize, a: &[f64]) -> Result<f64> {
    let g = &table.geometry;
    match oracle_for(g) {
        Ok(o) => Ok(o.value(&table.sources[i], a)),
        Err(Error::NoOracle(_)) => interpolate_row(table, i, a),
        Err(e) => Err(e),
    }
}

fn interpolate_row(table: &GreenTable, i: usize, a: &[f64]) -> Result<f64> {
    let mesh = table.geometry.mesh().ok_or(Error::NoDiscretization)?;
    let n = mesh.dim;
    if mesh.cell_dim != n {
        return Err(Error::NoDiscretization);
    }
    for c in 0..mesh.n_cells() {
        let ids = mesh.cell(c);
        let v0 = mesh.vertex(ids[0]);
        let m = DMatrix::from_fn(n, n, |r, k| mesh.vertex(ids[k + 1])[r] - v0[r]);
        let rhs = DVector::from_fn(n, |r, _| a[r] - v0[r]);
        let Some(lam) = m.lu().solve(&rhs) else { continue };
        let l0 = 1.0 - lam.sum();
        if l0 >= -1e-12 && lam.iter().all(|l| *l >= -1e-12) {
            let row = &table.values[i];
            return Ok(l0 * row[ids[0]] + lam.iter().zip(&ids[1..]).map(|(l, &k)| l * row[k]).sum::<f64>());
        }
    }
    Err(Error::OutsideGeometry(a.to_vec()))
}

/// Green–Riesz: point masses contribute weight·G(x, a) exactly, the
/// density by lumped quadrature (spectrally on torus grids).
pub fn reconstruct_subharmonic(table: &GreenTable, case: &TestFunctionCase, x: &[f64]) -> Result<Reconstruction> {
    let g = &table.geometry;
    let measure = case.riesz_measure(g)?;
    let tiny = 1e-12 * g.scale();
    if measure.point_masses.iter().any(|(a, _)| g.distance_unchecked(x, a) <= tiny) {
        return Err(Error::AtPointMass);
    }
    let i = source_index(table, x)?;
    let mut volume = 0.0;
    for (a, m) in &measure.point_masses {
        volume += m * point_green(table, i, a)?;
    }
    volume += match spectral_green(g, &measure.density, x) {
        Some(v) => v,
        None => volume_sum(table, i, |j| Complex64::new(measure.density[j], 0.0)).re,
    };
    let (boundary, f_ave) =
        if g.has_boundary() { (boundary_sum(table, i, case), Complex64::ZERO) } else { (Complex64::ZERO, average(g, case)) };
    Ok(Reconstruction::new(case.eval(x), Complex64::new(volume, 0.0), boundary, f_ave))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JensenPoint {
    pub radius: f64,
    pub reconstruction: f64,
    pub exact: f64,
    pub error: f64,
}

/// ln|z − a| at z = 0 for a = (|a|, 0) on a disk centred at the origin;
/// the exact value is ln|a|.
pub fn jensen_sweep(g: Arc<GeometryHandle>, radii: &[f64]) -> Result<Vec<JensenPoint>> {
    let GeometryKind::Disk { radius } = g.kind else {
        return Err(Error::InvalidParameters { kind: g.name(), reason: "Jensen sweep runs on the disk".into() });
    };
    let origin = vec![0.0, 0.0];
    let table = build_green_table(g, std::slice::from_ref(&origin))?;
    radii
        .iter()
        .map(|&r| {
            let a = [r * radius, 0.0];
            let rec = reconstruct_subharmonic(&table, &log_point(&a), &origin)?;
            Ok(JensenPoint { radius: r * radius, reconstruction: rec.value.re, exact: rec.exact.re, error: rec.error })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_geometry, GeometrySpec};
    use crate::green::build_green_table_with;
    use crate::green::Provenance;

    fn table(kind: &str, params: &[f64], h: f64, sources: &[Vec<f64>]) -> GreenTable {
        build_green_table(Arc::new(build_geometry(&GeometrySpec::new(kind, params, h)).unwrap()), sources).unwrap()
    }

    #[test]
    fn harmonic_disk_case_is_boundary_only() {
        let x = vec![0.2, 0.1];
        let t = table("disk", &[1.0], 0.05, std::slice::from_ref(&x));
        let case = case_by_name("harmonic_quadratic", &t.geometry).unwrap();
        let r = reconstruct_smooth(&t, &case, &x).unwrap();
        assert_eq!(r.volume_term, Complex64::ZERO);
        assert!(r.error < 5e-3, "{r:?}");
        let one = case_by_name("constant", &t.geometry).unwrap();
        let r = reconstruct_gradient_form(&t, &one, &x).unwrap();
        assert_eq!(r.volume_term, Complex64::ZERO);
        assert!((r.boundary_term.re - 1.0).abs() < 5e-3);
    }

    #[test]
    fn ball3_radial_quadratic_converges() {
        let x = vec![0.0; 3];
        let errs: Vec<f64> = [0.2, 0.1]
            .iter()
            .map(|&h| {
                let t = table("ball3", &[1.0], h, std::slice::from_ref(&x));
                reconstruct_smooth(&t, &case_by_name("radial_quadratic", &t.geometry).unwrap(), &x).unwrap().error
            })
            .collect();
        assert!(errs[1] < errs[0] && errs[1] < 0.05, "{errs:?}");
    }

    #[test]
    fn smooth_and_gradient_forms_agree() {
        let x = vec![0.3, -0.2];
        let t = table("disk", &[1.0], 0.05, std::slice::from_ref(&x));
        let case = case_by_name("radial_quadratic", &t.geometry).unwrap();
        let a = reconstruct_smooth(&t, &case, &x).unwrap();
        let b = reconstruct_gradient_form(&t, &case, &x).unwrap();
        assert!((a.value - b.value).norm() < a.error + b.error + 1e-2, "{a:?} {b:?}");
    }

    #[test]
    fn torus_fourier_modes_are_exact() {
        let g = Arc::new(build_geometry(&GeometrySpec::new("torus2", &[1.0], 1.0 / 16.0)).unwrap());
        let x = g.node(37).to_vec();
        let t = build_green_table(g.clone(), std::slice::from_ref(&x)).unwrap();
        for k in [[1, 0], [2, 3], [-7, 5]] {
            let r = reconstruct_smooth(&t, &fourier_mode(&g, &k).unwrap(), &x).unwrap();
            assert!(r.error < 1e-8, "{k:?} {}", r.error);
        }
        let r = reconstruct_subharmonic(&t, &torus_qsh(1.0), &x).unwrap();
        assert!(r.error < 1e-8, "{}", r.error);
    }

    #[test]
    fn jensen_formula() {
        let g = Arc::new(build_geometry(&GeometrySpec::new("disk", &[1.0], 0.05)).unwrap());
        let pts = jensen_sweep(g, &[0.1, 0.5, 0.9]).unwrap();
        for p in pts {
            assert!(p.error < 1e-2, "{p:?}");
            assert!((p.exact - p.radius.ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn point_mass_location_is_rejected() {
        let a = vec![0.5, 0.0];
        let t = table("disk", &[1.0], 0.1, std::slice::from_ref(&a));
        assert!(matches!(reconstruct_subharmonic(&t, &log_point(&a), &a), Err(Error::AtPointMass)));
    }

    #[test]
    fn newton_potential_in_ball() {
        let x = vec![-0.2, 0.1, 0.0];
        let t = table("ball3", &[1.0], 0.1, std::slice::from_ref(&x));
        let r = reconstruct_subharmonic(&t, &newton_point(&[0.3, 0.0, 0.0]), &x).unwrap();
        assert!(r.error < 0.02 * r.exact.norm(), "{r:?}");
    }

    #[test]
    fn interpolated_point_mass_on_ellipse() {
        let x = vec![0.1, 0.05];
        let g = Arc::new(build_geometry(&GeometrySpec::new("ellipse", &[1.0, 0.6], 0.05)).unwrap());
        let t = build_green_table_with(g, std::slice::from_ref(&x), Provenance::CorrectorSplit).unwrap();
        let r = reconstruct_subharmonic(&t, &log_point(&[0.4, -0.1]), &x).unwrap();
        assert!(r.error < 0.05, "{r:?}");
    }

    #[test]
    fn missing_laplacian_is_an_error() {
        let x = vec![0.0, 0.0];
        let t = table("disk", &[1.0], 0.2, std::slice::from_ref(&x));
        assert!(matches!(reconstruct_smooth(&t, &log_point(&[0.5, 0.0]), &x), Err(Error::Missing(_))));
    }
}
