/// Uniform tensor grid. Node index is `i0 + n0 * (i1 + n1 * i2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuredGrid {
    pub dims: Vec<usize>,
    pub spacing: Vec<f64>,
    pub periodic: Vec<bool>,
    pub origin: Vec<f64>,
}

impl StructuredGrid {
    pub fn periodic_cube(dim: usize, n: usize, side: f64) -> Self {
        StructuredGrid {
            dims: vec![n; dim],
            spacing: vec![side / n as f64; dim],
            periodic: vec![true; dim],
            origin: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Multi-index of a linear node index.
    pub fn unravel(&self, mut idx: usize) -> Vec<usize> {
        self.dims
            .iter()
            .map(|&n| {
                let i = idx % n;
                idx /= n;
                i
            })
            .collect()
    }

    /// Linear index; periodic axes wrap, others clamp.
    pub fn ravel(&self, multi: &[isize]) -> usize {
        let mut idx = 0;
        let mut stride = 1;
        for (a, &i) in multi.iter().enumerate() {
            let n = self.dims[a] as isize;
            let w = if self.periodic[a] { i.rem_euclid(n) } else { i.clamp(0, n - 1) };
            idx += w as usize * stride;
            stride *= self.dims[a];
        }
        idx
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        self.unravel(idx)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.origin[a] + i as f64 * self.spacing[a])
            .collect()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).flat_map(|i| self.point(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_is_consistent() {
        let g = StructuredGrid::periodic_cube(2, 8, 1.0);
        assert_eq!(g.ravel(&[-1, 0]), g.ravel(&[7, 0]));
        assert_eq!(g.ravel(&[3, 9]), g.ravel(&[3, 1]));
        for i in 0..g.len() {
            let m: Vec<isize> = g.unravel(i).iter().map(|&x| x as isize).collect();
            assert_eq!(g.ravel(&m), i);
        }
    }
}
