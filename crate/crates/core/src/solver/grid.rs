use serde::{Deserialize, Serialize};

use super::SolverError;

/// Uniform isotropic grid on an axis-aligned box, `m` nodes per axis.
///
/// Nodes are numbered with axis 0 varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDomain {
    pub n: usize,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub m: usize,
    pub h: f64,
}

impl GridDomain {
    /// Box `[lo, hi]`. All edges must have the same length so that the
    /// spacing is identical per axis.
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, m: usize) -> Result<Self, SolverError> {
        let n = lo.len();
        if !(2..=crate::symfun::MAX_DIM).contains(&n) || hi.len() != n {
            return Err(SolverError::Domain(format!(
                "corners must have equal length in 2..={}, got {} and {}",
                crate::symfun::MAX_DIM,
                n,
                hi.len()
            )));
        }
        if m < 5 {
            return Err(SolverError::Domain(format!("need m >= 5 nodes per axis, got {m}")));
        }
        if lo.iter().chain(&hi).any(|x| !x.is_finite()) {
            return Err(SolverError::Domain("non-finite box corner".into()));
        }
        let edge = hi[0] - lo[0];
        if !(edge > 0.0) {
            return Err(SolverError::Domain("box has non-positive edge".into()));
        }
        for i in 1..n {
            let e = hi[i] - lo[i];
            if (e - edge).abs() > 1e-12 * edge {
                return Err(SolverError::Domain(format!(
                    "box is not a cube: edge {i} has length {e}, edge 0 has {edge}"
                )));
            }
        }
        let h = edge / (m - 1) as f64;
        Ok(GridDomain { n, lo, hi, m, h })
    }

    /// `[lo, hi]ⁿ`.
    pub fn cube(n: usize, lo: f64, hi: f64, m: usize) -> Result<Self, SolverError> {
        Self::new(vec![lo; n], vec![hi; n], m)
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn diameter(&self) -> f64 {
        (self.hi[0] - self.lo[0]) * (self.n as f64).sqrt()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.m.pow(axis as u32)
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            out.push(idx % self.m);
            idx /= self.m;
        }
        out
    }

    pub fn linear_index(&self, multi: &[usize]) -> usize {
        multi.iter().rev().fold(0, |acc, &k| acc * self.m + k)
    }

    pub fn coords(&self, idx: usize) -> Vec<f64> {
        self.multi_index(idx)
            .iter()
            .zip(&self.lo)
            .map(|(&k, &lo)| lo + k as f64 * self.h)
            .collect()
    }

    /// Distance in nodes to the nearest face (0 on the boundary).
    pub fn depth(&self, idx: usize) -> usize {
        self.multi_index(idx)
            .into_iter()
            .map(|k| k.min(self.m - 1 - k))
            .min()
            .unwrap_or(0)
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        self.depth(idx) == 0
    }

    /// Interior node indices in increasing order.
    pub fn interior(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.is_boundary(i)).collect()
    }

    pub fn boundary(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_boundary(i)).collect()
    }
}

/// Node values on a [`GridDomain`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub domain: GridDomain,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(domain: GridDomain, values: Vec<f64>) -> Result<Self, SolverError> {
        if values.len() != domain.len() {
            return Err(SolverError::Domain(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                domain.len()
            )));
        }
        Ok(ScalarField { domain, values })
    }

    pub fn from_fn(domain: &GridDomain, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..domain.len()).map(|i| f(&domain.coords(i))).collect();
        ScalarField {
            domain: domain.clone(),
            values,
        }
    }

    pub fn zeros(domain: &GridDomain) -> Self {
        ScalarField {
            domain: domain.clone(),
            values: vec![0.0; domain.len()],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Max-norm distance to `other` (same grid assumed).
    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indexing_round_trip() {
        let d = GridDomain::cube(3, -1.0, 1.0, 5).unwrap();
        assert_eq!(d.len(), 125);
        assert_eq!(d.h, 0.5);
        for i in 0..d.len() {
            assert_eq!(d.linear_index(&d.multi_index(i)), i);
        }
        assert_eq!(d.multi_index(1), vec![1, 0, 0]);
        assert_eq!(d.coords(d.linear_index(&[2, 2, 2])), vec![0.0, 0.0, 0.0]);
        assert_eq!(d.interior().len(), 27);
        assert_eq!(d.boundary().len(), 98);
        assert_eq!(d.depth(d.linear_index(&[2, 2, 2])), 2);
    }

    #[test]
    fn rejects_bad_domains() {
        assert!(GridDomain::cube(3, 0.0, 1.0, 4).is_err());
        assert!(GridDomain::cube(3, 1.0, 1.0, 9).is_err());
        assert!(GridDomain::new(vec![0.0, 0.0], vec![1.0, 2.0], 9).is_err());
        assert!(GridDomain::new(vec![0.0, 0.0], vec![1.0], 9).is_err());
    }
}
