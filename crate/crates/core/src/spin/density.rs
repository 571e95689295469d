use std::ops::{Add, Mul};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};

/// Traceless Hermitian deviation density matrix in basis-state order.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub const TOLERANCE: f64 = 1e-12;

    /// Validates Hermiticity and tracelessness (relative to the largest entry).
    pub fn new(m: CMatrix) -> Result<Self> {
        let scale = linalg::max_abs(&m).max(1.0);
        let herm = linalg::hermiticity_deviation(&m);
        if herm > Self::TOLERANCE * scale {
            return Err(Error::NotHermitian(herm));
        }
        let tr = m.trace().norm();
        if tr > Self::TOLERANCE * scale * m.nrows() as f64 {
            return Err(Error::Config(format!(
                "deviation density matrix must be traceless (trace {tr:.3e})"
            )));
        }
        Ok(Self(m))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    /// Diagonal state from relative populations; the mean is removed.
    pub fn from_populations(values: &[f64]) -> Self {
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let shifted: Vec<f64> = values.iter().map(|v| v - mean).collect();
        Self(linalg::from_real_diagonal(&shifted))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn populations(&self) -> Vec<f64> {
        linalg::diag_real(&self.0)
    }

    /// `U ρ U†`
    pub fn evolve(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.nrows(),
            });
        }
        Ok(Self(linalg::conjugate(u, &self.0)))
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        linalg::hermiticity_deviation(&self.0)
    }

    pub fn trace_deviation(&self) -> f64 {
        self.0.trace().norm()
    }
}

impl Add for &DensityMatrix {
    type Output = DensityMatrix;
    fn add(self, rhs: &DensityMatrix) -> DensityMatrix {
        DensityMatrix(&self.0 + &rhs.0)
    }
}

impl Mul<f64> for &DensityMatrix {
    type Output = DensityMatrix;
    fn mul(self, rhs: f64) -> DensityMatrix {
        DensityMatrix(&self.0 * C64::new(rhs, 0.0))
    }
}
