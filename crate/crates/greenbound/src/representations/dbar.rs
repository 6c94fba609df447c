//! ∂̄ representation f(z) = −2∫⟨∂̄f, ∂̄G⟩ + ∮ ∂_νG f on the flat disk and
//! 4-ball, with the Hermitian pairing ⟨α, β⟩ = DBAR_PAIRING·Σ α_j conj(β_j)
//! on (0,1)-forms written in the dw̄_j basis.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{boundary_sum, case_by_name, source_index, Reconstruction, TestFunctionCase};
use crate::error::{Error, Result};
use crate::geometry::samples::{halton, hopf_point};
use crate::geometry::{GeometryHandle, GeometryKind};
use crate::green::oracle::BallOracle;
use crate::green::{GreenOracle, GreenTable};
use crate::vecops::dot;

/// Pairing factor, fixed by the |z|² case on the disk (see
/// [`calibrate_dbar_pairing`]).
pub const DBAR_PAIRING: f64 = 2.0;
/// Quasi-random nodes for the ℂ² ball.
pub const DBAR_QMC_NODES: usize = 1_000_000;

const CHUNK: usize = 4096;

/// Σ_j ∂f/∂w̄_j · conj(∂G/∂w̄_j) with ∂/∂w̄ = ½(∂_x + i∂_y) and G real.
fn pairing(dbar_f: &[Complex64], grad_g: &[f64]) -> Complex64 {
    dbar_f.iter().enumerate().map(|(j, d)| d * Complex64::new(0.5 * grad_g[2 * j], -0.5 * grad_g[2 * j + 1])).sum()
}

fn flat_radius(g: &GeometryHandle) -> Result<f64> {
    match g.kind {
        GeometryKind::Disk { radius } => Ok(radius),
        GeometryKind::Ball { dim: 4, radius } => Ok(radius),
        _ => Err(Error::InvalidParameters {
            kind: g.name(),
            reason: "the ∂̄ representation is implemented on the flat disk and the 4-ball only".into(),
        }),
    }
}

/// Disk: lumped quadrature over the table column of z. 4-ball: quasi-Monte
/// Carlo with [`DBAR_QMC_NODES`] nodes; z need not be a table source.
pub fn reconstruct_dbar(table: &GreenTable, case: &TestFunctionCase, z: &[f64]) -> Result<Reconstruction> {
    let g = &table.geometry;
    let radius = flat_radius(g)?;
    let dbar = case.dbar.as_ref().ok_or_else(|| Error::Missing(format!("∂̄f of case `{}`", case.name)))?;
    if g.dim() == 4 {
        return dbar_qmc(radius, case, z, DBAR_QMC_NODES);
    }
    let i = source_index(table, z)?;
    let w = g.volume_weights();
    let volume: Complex64 = (0..table.n_targets())
        .map(|j| pairing(&dbar(g.node(j)), table.gradient(i, j)) * w[j])
        .sum::<Complex64>()
        * (-2.0 * DBAR_PAIRING);
    Ok(Reconstruction::new(case.eval(z), volume, boundary_sum(table, i, case), Complex64::ZERO))
}

/// Pairing factor that makes the |z|² case exact at z: the boundary term
/// is 1 and −2∫Σ w_j conj(∂G/∂w̄_j) = ∫G = (|z|² − 1)/4 on the unit disk.
/// The z̄ case cannot fix it, its volume term integrates to 0 by parts.
pub fn calibrate_dbar_pairing(table: &GreenTable, z: &[f64]) -> Result<f64> {
    let g = &table.geometry;
    flat_radius(g)?;
    let case = case_by_name("radial_quadratic", g)?;
    let dbar = case.dbar.as_ref().ok_or(Error::Missing("∂̄ of |z|²".into()))?;
    let i = source_index(table, z)?;
    let w = g.volume_weights();
    let raw: Complex64 = (0..table.n_targets()).map(|j| pairing(&dbar(g.node(j)), table.gradient(i, j)) * w[j]).sum();
    let target = case.eval(z) - boundary_sum(table, i, &case);
    Ok((target / (-2.0 * raw)).re)
}

/// Ray exit parameter from z along unit θ in the ball of radius R.
fn exit(z: &[f64], theta: &[f64], radius: f64) -> f64 {
    let b = dot(z, theta);
    -b + (b * b - dot(z, z) + radius * radius).max(0.0).sqrt()
}

/// Chunked sums in index order so the total does not depend on the thread
/// schedule.
fn ordered_sum(n: usize, term: impl Fn(u64) -> Complex64 + Sync) -> Complex64 {
    let partial: Vec<Complex64> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| ((c * CHUNK + 1) as u64..=((c + 1) * CHUNK).min(n) as u64).map(&term).sum())
        .collect();
    partial.into_iter().sum()
}

/// ∂̄ representation on the 4-ball of the given radius. The volume term is
/// integrated in polar coordinates about z, dV = R(θ)⁴ s³ ds dσ(θ), which
/// removes the |w − z|^{−3} singularity; the boundary term uses Halton
/// points on S³ through the Hopf map.
pub fn dbar_qmc(radius: f64, case: &TestFunctionCase, z: &[f64], nodes: usize) -> Result<Reconstruction> {
    if case.dim != 4 || z.len() != 4 {
        return Err(Error::SizeMismatch { expected: 4, got: z.len().min(case.dim) });
    }
    if dot(z, z) >= radius * radius {
        return Err(Error::OutsideGeometry(z.to_vec()));
    }
    if nodes == 0 {
        return Err(Error::Empty("quadrature node set"));
    }
    let dbar = case.dbar.as_ref().ok_or_else(|| Error::Missing(format!("∂̄f of case `{}`", case.name)))?;
    let oracle = BallOracle::new(4, radius);
    let sphere = 2.0 * PI * PI;
    let vol = ordered_sum(nodes, |i| {
        let u = halton(i, 4);
        let theta = hopf_point(u[1], 2.0 * PI * u[2], 2.0 * PI * u[3]);
        let rr = exit(z, &theta, radius);
        let w: Vec<f64> = (0..4).map(|a| z[a] + u[0] * rr * theta[a]).collect();
        pairing(&dbar(&w), &oracle.grad_y(z, &w)) * (rr.powi(4) * u[0].powi(3))
    }) * (sphere / nodes as f64);
    let volume = vol * (-2.0 * DBAR_PAIRING);
    let boundary = ordered_sum(nodes, |i| {
        let u = halton(i, 3);
        let p = hopf_point(u[0], 2.0 * PI * u[1], 2.0 * PI * u[2]);
        let b: Vec<f64> = p.iter().map(|v| v * radius).collect();
        case.eval(&b) * oracle.poisson(z, &b)
    }) * (sphere * radius.powi(3) / nodes as f64);
    Ok(Reconstruction::new(case.eval(z), volume, boundary, Complex64::ZERO))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_geometry, GeometrySpec};
    use crate::green::build_green_table;
    use std::sync::Arc;

    fn disk_table(h: f64, z: &[f64]) -> GreenTable {
        build_green_table(Arc::new(build_geometry(&GeometrySpec::new("disk", &[1.0], h)).unwrap()), &[z.to_vec()]).unwrap()
    }

    #[test]
    fn pairing_factor_calibrates_to_two() {
        let z = [0.3, 0.2];
        let c = calibrate_dbar_pairing(&disk_table(0.025, &z), &z).unwrap();
        assert!((c - DBAR_PAIRING).abs() < 0.05 * DBAR_PAIRING, "{c}");
    }

    #[test]
    fn holomorphic_volume_term_vanishes() {
        let z = [0.3, 0.2];
        let t = disk_table(0.05, &z);
        let r = reconstruct_dbar(&t, &case_by_name("z", &t.geometry).unwrap(), &z).unwrap();
        assert_eq!(r.volume_term, Complex64::ZERO);
        assert!(r.error < 5e-3);
    }

    #[test]
    fn zbar_error_decreases() {
        let z = [0.3, 0.2];
        let errs: Vec<f64> = [0.1, 0.05, 0.025]
            .iter()
            .map(|&h| {
                let t = disk_table(h, &z);
                reconstruct_dbar(&t, &case_by_name("zbar", &t.geometry).unwrap(), &z).unwrap().error
            })
            .collect();
        assert!(errs[2] < errs[0] && errs[2] < 1e-2, "{errs:?}");
        let t = disk_table(0.05, &z);
        let r = reconstruct_dbar(&t, &case_by_name("radial_quadratic", &t.geometry).unwrap(), &z).unwrap();
        assert!(r.error < 2e-2, "{r:?}");
    }

    #[test]
    fn ball4_qmc_small() {
        let g = build_geometry(&GeometrySpec::new("ball4", &[1.0], 0.5).with_samples(64)).unwrap();
        let case = case_by_name("radial_quadratic", &g).unwrap();
        let z = [0.2, -0.1, 0.3, 0.1];
        let r = dbar_qmc(1.0, &case, &z, 100_000).unwrap();
        assert!(r.error < 0.01 * r.exact.norm().max(0.1), "{r:?}");
    }

    #[test]
    fn non_flat_geometry_is_rejected() {
        let g = Arc::new(build_geometry(&GeometrySpec::new("annulus2d", &[0.5, 1.0], 0.1)).unwrap());
        let x = vec![0.75, 0.0];
        let t = build_green_table(g.clone(), &[x.clone()]).unwrap();
        let case = case_by_name("zbar", &g).unwrap();
        assert!(matches!(reconstruct_dbar(&t, &case, &x), Err(Error::InvalidParameters { .. })));
    }
}
