//! Low-discrepancy sample sets for the 4-ball and its boundary sphere.

use std::f64::consts::PI;

const PRIMES: [u64; 4] = [2, 3, 5, 7];

/// Van der Corput radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// Halton point `i` (1-based to skip the origin) in `dim` ≤ 4 dimensions.
pub fn halton(i: u64, dim: usize) -> [f64; 4] {
    let mut u = [0.0; 4];
    for (a, slot) in u.iter_mut().enumerate().take(dim) {
        *slot = radical_inverse(i, PRIMES[a]);
    }
    u
}

/// Point of S^3 from Hopf coordinates with `t = sin^2 eta` uniform, which
/// makes the map measure preserving up to the constant 2 pi^2.
pub fn hopf_point(t: f64, xi1: f64, xi2: f64) -> [f64; 4] {
    let (s, c) = (t.sqrt(), (1.0 - t).max(0.0).sqrt());
    [s * xi1.cos(), s * xi1.sin(), c * xi2.cos(), c * xi2.sin()]
}

/// Interior sample of the 4-ball of radius `radius` from a unit-cube point.
pub fn ball4_point(u: [f64; 4], radius: f64) -> [f64; 4] {
    let r = radius * u[0].powf(0.25);
    let d = hopf_point(u[1], 2.0 * PI * u[2], 2.0 * PI * u[3]);
    [r * d[0], r * d[1], r * d[2], r * d[3]]
}

/// Quasi-random sample set: interior points with equal weights and
/// boundary points with equal weights.
#[derive(Clone, Debug)]
pub struct SampleSet {
    pub dim: usize,
    pub points: Vec<f64>,
    pub boundary_points: Vec<f64>,
    pub volume: f64,
    pub boundary_area: f64,
}

impl SampleSet {
    pub fn ball4(radius: f64, n: usize, n_boundary: usize) -> Self {
        let mut points = Vec::with_capacity(4 * n);
        for i in 1..=n as u64 {
            points.extend_from_slice(&ball4_point(halton(i, 4), radius));
        }
        let mut boundary_points = Vec::with_capacity(4 * n_boundary);
        for i in 1..=n_boundary as u64 {
            let u = halton(i, 3);
            let d = hopf_point(u[0], 2.0 * PI * u[1], 2.0 * PI * u[2]);
            boundary_points.extend(d.iter().map(|x| x * radius));
        }
        SampleSet {
            dim: 4,
            points,
            boundary_points,
            volume: PI * PI / 2.0 * radius.powi(4),
            boundary_area: 2.0 * PI * PI * radius.powi(3),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn boundary_len(&self) -> usize {
        self.boundary_points.len() / self.dim
    }
}
