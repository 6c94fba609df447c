//! Green columns by the Γ − Φ corrector split on meshed domains.

use rayon::prelude::*;

use super::fundamental::fundamental_solution;
use crate::error::{Error, Result};
use crate::geometry::GeometryHandle;
use crate::laplace::{DiscreteFunction, DiscreteOperator};

/// Exclusion radius around the source, in units of h.
pub const EXCLUSION: f64 = 5.0;

/// Node closer than this (relative to h) to a source counts as the source.
const COINCIDE: f64 = 1e-9;

fn check_source(g: &GeometryHandle, x: &[f64]) -> Result<()> {
    if !g.has_boundary() {
        return Err(Error::NotClosed);
    }
    if g.mesh().is_none() {
        return Err(Error::NoDiscretization);
    }
    if !g.contains(x) || g.boundary_distance_unchecked(x) <= 0.0 {
        return Err(Error::OutsideGeometry(x.to_vec()));
    }
    Ok(())
}

/// Γ(x, ·) at every node; boundary entries are the corrector's Dirichlet data.
fn gamma_column(g: &GeometryHandle, x: &[f64]) -> Vec<f64> {
    let phi = fundamental_solution(g.dim()).unwrap();
    let tiny = COINCIDE * g.h();
    (0..g.node_count())
        .map(|i| {
            let r = crate::vecops::dist(x, g.node(i));
            if r <= tiny {
                0.0
            } else {
                phi.phi(r)
            }
        })
        .collect()
}

/// Harmonic correctors Φ_x for several sources, one shared factorization.
fn correctors(op: &DiscreteOperator, xs: &[Vec<f64>]) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let g = op.geometry();
    for x in xs {
        check_source(g, x)?;
    }
    let gammas: Vec<Vec<f64>> = xs.par_iter().map(|x| gamma_column(g, x)).collect();
    let phis = op.solve_dirichlet_many(&gammas, None)?;
    Ok(gammas.into_iter().zip(phis).collect())
}

/// Index of the node at the source, if any.
pub fn source_node(g: &GeometryHandle, x: &[f64]) -> Option<usize> {
    let tiny = COINCIDE * g.h();
    (0..g.node_count()).find(|&i| crate::vecops::dist(x, g.node(i)) <= tiny)
}

/// G(x, ·) = Γ(x, ·) − Φ_x at every node; a node at x itself is set to 0.
pub fn green_numeric(op: &DiscreteOperator, x: &[f64]) -> Result<DiscreteFunction> {
    let mut cols = green_numeric_many(op, &[x.to_vec()])?;
    DiscreteFunction::new(cols.pop().unwrap())
}

pub fn green_numeric_many(op: &DiscreteOperator, xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let g = op.geometry();
    Ok(correctors(op, xs)?
        .into_iter()
        .zip(xs)
        .map(|((gamma, phi), x)| {
            let mut col: Vec<f64> = gamma.iter().zip(&phi).map(|(a, b)| a - b).collect();
            for i in g.boundary_nodes() {
                col[*i] = 0.0;
            }
            if let Some(s) = source_node(g, x) {
                col[s] = 0.0;
            }
            col
        })
        .collect())
}

/// Column values, nodal ∇_y G (node-major, dim per node) and boundary
/// normal derivatives ∂G/∂ν_y for several sources.
pub struct NumericColumns {
    pub values: Vec<Vec<f64>>,
    pub gradients: Vec<Vec<f64>>,
    pub normal_derivatives: Vec<Vec<f64>>,
}

pub fn numeric_columns(op: &DiscreteOperator, xs: &[Vec<f64>]) -> Result<NumericColumns> {
    let g = op.geometry();
    let d = g.dim();
    let phi = fundamental_solution(d).unwrap();
    let stiff = op.stiffness().ok_or(Error::NoDiscretization)?;
    let pairs = correctors(op, xs)?;
    let cols: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = pairs
        .par_iter()
        .zip(xs)
        .map(|((gamma, corr), x)| {
            let src = source_node(g, x);
            let mut values: Vec<f64> = gamma.iter().zip(corr).map(|(a, b)| a - b).collect();
            for i in g.boundary_nodes() {
                values[*i] = 0.0;
            }
            let grad_corr = op.nodal_gradient(corr);
            let mut grads = vec![0.0; g.node_count() * d];
            for i in 0..g.node_count() {
                if Some(i) == src {
                    values[i] = 0.0;
                    continue;
                }
                let gg = phi.grad_y(x, g.node(i));
                for a in 0..d {
                    grads[i * d + a] = gg[a] - grad_corr[i * d + a];
                }
            }
            let normals = poisson_from_corrector(g, stiff, x, corr);
            (values, grads, normals)
        })
        .collect();
    let mut out = NumericColumns { values: vec![], gradients: vec![], normal_derivatives: vec![] };
    for (v, gr, nd) in cols {
        out.values.push(v);
        out.gradients.push(gr);
        out.normal_derivatives.push(nd);
    }
    Ok(out)
}

/// ∂νΓ at boundary nodes minus the corrector's weak-form flux (KΦ)_b / w_b.
fn poisson_from_corrector(g: &GeometryHandle, stiff: &crate::laplace::CsrMatrix, x: &[f64], corr: &[f64]) -> Vec<f64> {
    let phi = fundamental_solution(g.dim()).unwrap();
    g.boundary_nodes()
        .iter()
        .zip(g.boundary_weights())
        .map(|(&b, &w)| {
            let y = g.node(b);
            let nu = g.outward_normal(y).expect("boundary node");
            let dgamma: f64 = phi.grad_y(x, y).iter().zip(&nu).map(|(a, b)| a * b).sum();
            let flux: f64 = stiff.row(b).map(|(j, v)| v * corr[j]).sum();
            dgamma - flux / w
        })
        .collect()
}

/// Poisson kernel ∂G(x, ·)/∂ν on the boundary nodes, ordered as
/// `boundary_nodes()`.
pub fn poisson_kernel(op: &DiscreteOperator, x: &[f64]) -> Result<DiscreteFunction> {
    let g = op.geometry();
    let stiff = op.stiffness().ok_or(Error::NoDiscretization)?;
    let mut pairs = correctors(op, &[x.to_vec()])?;
    let (_, corr) = pairs.pop().unwrap();
    DiscreteFunction::new(poisson_from_corrector(g, stiff, x, &corr))
}

/// Measured corrector error for this mesh: 4 × the worst nodal error of the
/// discrete harmonic extension of Γ(z, ·) for probes z a distance 5h
/// outside the boundary.
pub fn corrector_tolerance(op: &DiscreteOperator) -> Result<f64> {
    let g = op.geometry();
    if !g.has_boundary() {
        return Err(Error::NotClosed);
    }
    let phi = fundamental_solution(g.dim()).unwrap();
    let delta = EXCLUSION * g.h();
    let picks = farthest_points(g, g.boundary_nodes(), 8, None);
    let probes: Vec<Vec<f64>> = picks
        .iter()
        .map(|&b| {
            let y = g.node(b);
            let nu = g.outward_normal(y).unwrap();
            y.iter().zip(&nu).map(|(p, n)| p + delta * n).collect()
        })
        .collect();
    let exact: Vec<Vec<f64>> =
        probes.iter().map(|z| (0..g.node_count()).map(|i| phi.phi(crate::vecops::dist(z, g.node(i)))).collect()).collect();
    let ext = op.solve_dirichlet_many(&exact, None)?;
    let err = exact
        .iter()
        .zip(&ext)
        .flat_map(|(e, u)| e.iter().zip(u).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    Ok((4.0 * err).max(1e-12))
}

/// Deterministic farthest-point sampling among `candidates` (node ids).
/// Starts from the candidate farthest from the boundary when `start` is None.
pub fn farthest_points(g: &GeometryHandle, candidates: &[usize], count: usize, start: Option<usize>) -> Vec<usize> {
    if candidates.is_empty() || count == 0 {
        return vec![];
    }
    let first = start.unwrap_or_else(|| {
        if g.has_boundary() {
            let mut best = candidates[0];
            let mut bd = f64::NEG_INFINITY;
            for &c in candidates {
                let d = g.boundary_distance_unchecked(g.node(c));
                if d > bd + 1e-12 {
                    bd = d;
                    best = c;
                }
            }
            best
        } else {
            candidates[0]
        }
    });
    let mut chosen = vec![first];
    let mut mind: Vec<f64> = candidates.iter().map(|&c| g.distance_unchecked(g.node(c), g.node(first))).collect();
    while chosen.len() < count.min(candidates.len()) {
        let (k, _) = mind.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (k, &d)| if d > acc.1 { (k, d) } else { acc });
        let c = candidates[k];
        if mind[k] <= 0.0 {
            break;
        }
        chosen.push(c);
        for (j, &cj) in candidates.iter().enumerate() {
            mind[j] = mind[j].min(g.distance_unchecked(g.node(cj), g.node(c)));
        }
    }
    chosen
}

/// Up to `count` well-spread source nodes, at least 5h from the boundary.
/// Coarse sample sets may have no node that deep; the margin is then halved
/// until enough candidates exist.
pub fn select_sources(g: &GeometryHandle, count: usize) -> Vec<Vec<f64>> {
    let mut margin = EXCLUSION * g.h();
    loop {
        let candidates: Vec<usize> = (0..g.node_count())
            .filter(|&i| !g.is_boundary_node(i) && (!g.has_boundary() || g.boundary_distance_unchecked(g.node(i)) >= margin))
            .collect();
        if candidates.len() >= count || margin < 1e-3 * g.h() {
            return farthest_points(g, &candidates, count, None).into_iter().map(|i| g.node(i).to_vec()).collect();
        }
        margin *= 0.5;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_geometry, GeometrySpec};
    use crate::green::oracle::green_analytic;
    use crate::laplace::assemble;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn op(kind: &str, params: &[f64], h: f64) -> DiscreteOperator {
        assemble(Arc::new(build_geometry(&GeometrySpec::new(kind, params, h)).unwrap())).unwrap()
    }

    #[test]
    fn disk_center_column_matches_oracle() {
        let o = op("disk", &[1.0], 0.1);
        let g = o.geometry();
        let col = green_numeric(&o, &[0.0, 0.0]).unwrap();
        for i in 0..g.node_count() {
            let y = g.node(i);
            if crate::vecops::norm(y) < 5.0 * g.h() {
                continue;
            }
            let exact = if g.is_boundary_node(i) { 0.0 } else { green_analytic(g, &[0.0, 0.0], y).unwrap() };
            assert!((col.values()[i] - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn poisson_kernel_at_center_is_uniform() {
        let o = op("disk", &[1.0], 0.1);
        let p = poisson_kernel(&o, &[0.0, 0.0]).unwrap();
        for v in p.values() {
            assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-10);
        }
        let o = op("ball3", &[1.0], 0.3);
        let p = poisson_kernel(&o, &[0.0, 0.0, 0.0]).unwrap();
        for v in p.values() {
            assert!((v - 1.0 / (4.0 * PI)).abs() < 1e-10);
        }
    }

    #[test]
    fn near_boundary_source_stays_nonpositive() {
        let o = op("disk", &[1.0], 0.05);
        let col = green_numeric(&o, &[0.95, 0.0]).unwrap();
        assert!(col.values().iter().all(|v| *v <= 1e-9));
        assert!(green_numeric(&o, &[1.5, 0.0]).is_err());
    }

    #[test]
    fn sources_keep_away_from_boundary() {
        let o = op("annulus2d", &[1.0, 2.0], 0.05);
        let g = o.geometry();
        let s = select_sources(g, 12);
        assert_eq!(s.len(), 12);
        for x in &s {
            assert!(g.boundary_distance(x).unwrap() >= 0.25 - 1e-12);
        }
        let t = corrector_tolerance(&o).unwrap();
        assert!(t > 0.0 && t < 0.05, "{t}");
    }
}
