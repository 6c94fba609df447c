use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::vecops::unit_sphere_area;

/// Radial free-space kernel Φ with ΔΦ = δ₀ in R^n.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FundamentalSolution {
    pub n: usize,
    omega: f64,
}

pub fn fundamental_solution(n: usize) -> Result<FundamentalSolution> {
    if n < 2 {
        return Err(Error::InvalidParameters { kind: "fundamental solution".into(), reason: format!("dimension {n} < 2") });
    }
    Ok(FundamentalSolution { n, omega: unit_sphere_area(n) })
}

impl FundamentalSolution {
    /// Area of the unit sphere S^{n-1}.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn phi(&self, r: f64) -> f64 {
        if self.n == 2 {
            r.ln() / (2.0 * PI)
        } else {
            -r.powi(2 - self.n as i32) / ((self.n - 2) as f64 * self.omega)
        }
    }

    pub fn dphi(&self, r: f64) -> f64 {
        r.powi(1 - self.n as i32) / self.omega
    }

    /// Flux of ∇Φ through the sphere of radius r (equals 1).
    pub fn flux(&self, r: f64) -> f64 {
        self.dphi(r) * self.omega * r.powi(self.n as i32 - 1)
    }

    pub fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        self.phi(crate::vecops::dist(x, y))
    }

    /// ∇_y Φ(|x − y|).
    pub fn grad_y(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let r = crate::vecops::dist(x, y);
        let s = self.dphi(r) / r;
        y.iter().zip(x).map(|(b, a)| s * (b - a)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        let f3 = fundamental_solution(3).unwrap();
        assert!((f3.phi(0.5) + 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert_eq!(fundamental_solution(2).unwrap().phi(1.0), 0.0);
        for n in 2..=5 {
            let f = fundamental_solution(n).unwrap();
            assert!((f.flux(0.1) - 1.0).abs() < 1e-12);
            assert!((f.flux(1.0) - 1.0).abs() < 1e-12);
        }
        assert!(fundamental_solution(1).is_err());
    }
}
