//! sup|∇u|·r for the capacitary potential of the annulus r < |x| < 2r
//! (u = 0 inside, 1 outside).

use std::sync::Arc;

use super::BoundReport;
use crate::error::{Error, Result};
use crate::geometry::{build_geometry, GeometrySpec};
use crate::laplace::assemble;

/// Mesh cells per inner radius in 2D.
pub const CELLS_PER_RADIUS: f64 = 50.0;
/// Elements of the radial solve in 3D.
pub const RADIAL_ELEMENTS: usize = 400;

/// Exact sup|∇u|·r: 1/ln 2 in the plane, 2 in space.
pub fn exact_scaling(n: usize) -> f64 {
    if n == 2 {
        1.0 / std::f64::consts::LN_2
    } else {
        // u = (1/r − 1/ρ)/(1/r − 1/(2r)), |u'(r)| = 1/(r²·(1/(2r)))
        2.0
    }
}

/// One value of sup|∇u_h|·r per radius. The planar case is solved on an
/// annulus mesh; the spatial case through the radial equation (ρ² u')' = 0
/// with P1 elements.
pub fn annulus_gradient_scaling(n: usize, radii: &[f64]) -> Result<BoundReport> {
    if radii.is_empty() {
        return Err(Error::Empty("radius grid"));
    }
    let values: Vec<f64> = radii
        .iter()
        .map(|&r| match n {
            2 => planar(r),
            3 => Ok(radial(r, RADIAL_ELEMENTS)),
            _ => Err(Error::InvalidParameters { kind: "annulus scaling".into(), reason: format!("dimension {n}") }),
        })
        .collect::<Result<_>>()?;
    let mut report = BoundReport::from_series(&format!("annulus_gradient_scaling_n{n}"), values, radii.len());
    report.empirical_constant = report.refinement_series.iter().cloned().fold(0.0, f64::max);
    report.reference = Some(exact_scaling(n));
    Ok(report)
}

fn planar(r: f64) -> Result<f64> {
    let g = Arc::new(build_geometry(&GeometrySpec::new("annulus2d", &[r, 2.0 * r], r / CELLS_PER_RADIUS))?);
    let op = assemble(g.clone())?;
    let data: Vec<f64> = (0..g.node_count())
        .map(|i| {
            let x = g.node(i);
            if (x[0] * x[0] + x[1] * x[1]).sqrt() > 1.5 * r { 1.0 } else { 0.0 }
        })
        .collect();
    let u = op.solve_dirichlet_many(&[data], None)?.pop().unwrap();
    let sup = op.gradient(&u).magnitudes().into_iter().fold(0.0, f64::max);
    Ok(sup * r)
}

/// P1 solve of (ρ² u')' = 0 on [r, 2r] with exactly integrated element
/// stiffness; the steepest element slope converges at first order.
fn radial(r: f64, elements: usize) -> f64 {
    let h = r / elements as f64;
    let node = |k: usize| r + k as f64 * h;
    // element stiffness ∫ρ² dρ / h²
    let ke: Vec<f64> = (0..elements).map(|k| (node(k + 1).powi(3) - node(k).powi(3)) / (3.0 * h * h)).collect();
    // interior unknowns 1..elements−1, u_0 = 0, u_N = 1: tridiagonal system
    let m = elements - 1;
    let mut diag: Vec<f64> = (0..m).map(|i| ke[i] + ke[i + 1]).collect();
    let off: Vec<f64> = (0..m.saturating_sub(1)).map(|i| -ke[i + 1]).collect();
    let mut rhs = vec![0.0; m];
    rhs[m - 1] = ke[elements - 1];
    for i in 1..m {
        let w = off[i - 1] / diag[i - 1];
        diag[i] -= w * off[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    let mut u = vec![0.0; elements + 1];
    u[elements] = 1.0;
    for i in (0..m).rev() {
        let next = if i + 1 < m { off[i] * u[i + 2] } else { 0.0 };
        u[i + 1] = (rhs[i] - next) / diag[i];
    }
    let sup = u.windows(2).map(|w| (w[1] - w[0]).abs() / h).fold(0.0, f64::max);
    sup * r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_solve_converges_first_order() {
        let e1 = (radial(0.3, 20) - 2.0).abs();
        let e2 = (radial(0.3, 40) - 2.0).abs();
        let rate = (e1 / e2).log2();
        assert!((rate - 1.0).abs() < 0.1, "rate {rate}");
    }

    #[test]
    fn spatial_scaling_within_two_percent() {
        let rep = annulus_gradient_scaling(3, &[0.05, 0.4]).unwrap();
        for v in &rep.refinement_series {
            assert!((v - 2.0).abs() < 0.04 * 0.5, "{v}");
        }
    }

    #[test]
    fn planar_scaling_at_r_01() {
        let rep = annulus_gradient_scaling(2, &[0.1]).unwrap();
        let v = rep.refinement_series[0];
        assert!((v - exact_scaling(2)).abs() < 0.02 * exact_scaling(2), "{v}");
    }
}
