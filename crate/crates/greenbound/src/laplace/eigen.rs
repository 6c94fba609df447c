//! Smallest nonzero eigenvalue of −Δ on closed geometries by block inverse
//! iteration with Rayleigh–Ritz, constants deflated.

use nalgebra::{DMatrix, SymmetricEigen};

use super::{DiscreteOperator, OperatorKind, SparseCholesky};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenResult {
    pub value: f64,
    pub residual: f64,
    pub iterations: usize,
}

const BLOCK: usize = 10;
const MAX_ITER: usize = 400;
const TOL: f64 = 1e-8;

/// Generalized problem K x = λ M x with diagonal M. `apply_k` applies K,
/// `shift_solve` returns (K + σM)⁻¹ M x.
fn block_iteration(
    n: usize,
    m: &[f64],
    apply_k: impl Fn(&[f64]) -> Vec<f64> + Sync,
    shift_solve: impl Fn(&[f64]) -> Vec<f64> + Sync,
) -> Result<EigenResult> {
    let b = BLOCK.min(n.saturating_sub(1)).max(1);
    let total_m: f64 = m.iter().sum();
    let deflate = |x: &mut [f64]| {
        let c: f64 = x.iter().zip(m).map(|(a, w)| a * w).sum::<f64>() / total_m;
        x.iter_mut().for_each(|v| *v -= c);
    };
    let m_dot = |x: &[f64], y: &[f64]| -> f64 { x.iter().zip(y).zip(m).map(|((a, b), w)| a * b * w).sum() };
    let mut block: Vec<Vec<f64>> = (0..b)
        .map(|j| {
            let mut x: Vec<f64> = (0..n)
                .map(|i| ((i as f64 + 1.0) * (j as f64 + 1.0) * 0.7548776662).sin() + ((i * (j + 3)) as f64 * 0.5698402910).cos())
                .collect();
            deflate(&mut x);
            x
        })
        .collect();
    let mut last = EigenResult { value: f64::NAN, residual: f64::INFINITY, iterations: 0 };
    for it in 1..=MAX_ITER {
        use rayon::prelude::*;
        let mut y: Vec<Vec<f64>> = block.par_iter().map(|x| shift_solve(x)).collect();
        // M-orthonormalize, twice for stability
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for mut v in y.drain(..) {
            deflate(&mut v);
            for _ in 0..2 {
                for q in &basis {
                    let c = m_dot(&v, q);
                    v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
                }
            }
            let l = m_dot(&v, &v).sqrt();
            if l > 1e-14 {
                v.iter_mut().for_each(|a| *a /= l);
                basis.push(v);
            }
        }
        if basis.is_empty() {
            return Err(Error::NoConvergence { iterations: it, residual: f64::INFINITY });
        }
        let kb: Vec<Vec<f64>> = basis.par_iter().map(|q| apply_k(q)).collect();
        let k = basis.len();
        let h = DMatrix::from_fn(k, k, |i, j| {
            let a: f64 = basis[i].iter().zip(&kb[j]).map(|(x, y)| x * y).sum();
            let b: f64 = basis[j].iter().zip(&kb[i]).map(|(x, y)| x * y).sum();
            0.5 * (a + b)
        });
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        block = order
            .iter()
            .map(|&c| (0..n).map(|i| (0..k).map(|j| basis[j][i] * eig.eigenvectors[(j, c)]).sum()).collect())
            .collect();
        let lambda = eig.eigenvalues[order[0]];
        let x = &block[0];
        let kx: Vec<f64> = (0..n).map(|i| (0..k).map(|j| kb[j][i] * eig.eigenvectors[(j, order[0])]).sum()).collect();
        let res: f64 = (0..n).map(|i| (kx[i] - lambda * m[i] * x[i]).powi(2) / m[i]).sum::<f64>().sqrt();
        let rel = res / lambda.abs().max(1e-300);
        last = EigenResult { value: lambda, residual: rel, iterations: it };
        if rel <= TOL {
            return Ok(last);
        }
    }
    Err(Error::NoConvergence { iterations: last.iterations, residual: last.residual })
}

/// Smallest nonzero eigenvalue of −Δ on a closed geometry.
pub fn first_nonzero_eigenvalue(op: &DiscreteOperator) -> Result<EigenResult> {
    let g = op.geometry();
    if g.has_boundary() {
        return Err(Error::NotClosed);
    }
    let n = op.node_count();
    let m = op.mass();
    let sigma = 1.0 / (g.scale() * g.scale());
    match &op.kind {
        OperatorKind::Fem { stiffness, mass } => {
            let mut trip = Vec::with_capacity(stiffness.vals.len() + n);
            for i in 0..n {
                for (j, v) in stiffness.row(i) {
                    trip.push((i, j, v));
                }
                trip.push((i, i, sigma * mass[i]));
            }
            let shifted = super::CsrMatrix::from_triplets(n, trip);
            let chol = SparseCholesky::factor(&shifted)?;
            block_iteration(
                n,
                &m,
                |x| stiffness.matvec(x),
                |x| {
                    let mx: Vec<f64> = x.iter().zip(mass).map(|(a, w)| a * w).collect();
                    chol.solve(&mx)
                },
            )
        }
        OperatorKind::Spectral(s) => {
            let w = m.clone();
            block_iteration(
                n,
                &m,
                |x| s.laplacian(x).iter().zip(&w).map(|(v, w)| -v * w).collect(),
                |x| s.shifted_inverse(x, sigma),
            )
        }
    }
}
