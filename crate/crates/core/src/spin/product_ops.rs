use std::collections::BTreeMap;

use super::density::DensityMatrix;
use super::operators::Axis;
use super::system::SpinSystem;
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};

/// One product-operator basis element, an axis per spin (spin 0 first).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Axis>);

impl Word {
    /// All `4^n` words, spin 0 varying slowest.
    pub fn all(n_spins: usize) -> Vec<Word> {
        (0..1usize << (2 * n_spins))
            .map(|code| {
                Word(
                    (0..n_spins)
                        .map(|k| Axis::ALL[(code >> (2 * (n_spins - 1 - k))) & 3])
                        .collect(),
                )
            })
            .collect()
    }

    /// Number of non-identity factors.
    pub fn rank(&self) -> usize {
        self.0.iter().filter(|a| **a != Axis::E).count()
    }

    /// Normalization prefactor `2^(rank−1)` (1 for the identity).
    pub fn prefactor(&self) -> f64 {
        match self.rank() {
            0 => 1.0,
            r => (1u64 << (r - 1)) as f64,
        }
    }

    /// e.g. `"Mz"`, `"2AxMz"`, `"4AzMzXz"`; `"E"` for the identity.
    pub fn label(&self, spin_labels: &[&str]) -> String {
        if self.rank() == 0 {
            return "E".to_string();
        }
        let mut s = String::new();
        if self.rank() > 1 {
            s.push_str(&format!("{}", self.prefactor() as u64));
        }
        for (axis, label) in self.0.iter().zip(spin_labels) {
            if *axis != Axis::E {
                s.push_str(label);
                s.push(axis.letter());
            }
        }
        s
    }

    /// Bit mask of spins whose factor is transverse.
    fn flip_mask(&self) -> usize {
        let n = self.0.len();
        self.0
            .iter()
            .enumerate()
            .filter(|(_, a)| matches!(a, Axis::X | Axis::Y))
            .fold(0, |m, (k, _)| m | 1 << (n - 1 - k))
    }

    /// ⟨a|B_w|b⟩, including the prefactor.
    fn element(&self, a: usize, b: usize) -> C64 {
        let n = self.0.len();
        let mut z = C64::new(self.prefactor(), 0.0);
        for (k, axis) in self.0.iter().enumerate() {
            let shift = n - 1 - k;
            z *= axis.element((a >> shift) & 1, (b >> shift) & 1);
        }
        z
    }

    pub fn matrix(&self) -> CMatrix {
        let dim = 1 << self.0.len();
        let mask = self.flip_mask();
        let mut m = CMatrix::zeros(dim, dim);
        for a in 0..dim {
            m[(a, a ^ mask)] = self.element(a, a ^ mask);
        }
        m
    }

    /// `Tr(B_w ρ)`
    fn trace_with(&self, rho: &CMatrix) -> C64 {
        let mask = self.flip_mask();
        (0..rho.nrows())
            .map(|a| self.element(a, a ^ mask) * rho[(a ^ mask, a)])
            .sum()
    }

    /// `Tr(B_w B_w)`
    fn norm_sq(&self) -> f64 {
        let dim = (1usize << self.0.len()) as f64;
        match self.rank() {
            0 => dim,
            _ => dim / 4.0,
        }
    }
}

/// Real coefficients of a Hermitian matrix over the product-operator basis.
#[derive(Clone, Debug)]
pub struct ProductOperatorExpansion {
    spin_labels: Vec<String>,
    terms: Vec<(Word, f64)>,
}

impl ProductOperatorExpansion {
    pub fn terms(&self) -> &[(Word, f64)] {
        &self.terms
    }

    pub fn coefficients(&self) -> BTreeMap<String, f64> {
        let labels = self.label_refs();
        self.terms.iter().map(|(w, c)| (w.label(&labels), *c)).collect()
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        let labels = self.label_refs();
        self.terms
            .iter()
            .find(|(w, _)| w.label(&labels) == label)
            .map(|(_, c)| *c)
    }

    /// Terms with `|c| > tol`, by label.
    pub fn significant(&self, tol: f64) -> BTreeMap<String, f64> {
        self.coefficients().into_iter().filter(|(_, c)| c.abs() > tol).collect()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let dim = 1 << self.spin_labels.len();
        self.terms
            .iter()
            .filter(|(_, c)| *c != 0.0)
            .fold(CMatrix::zeros(dim, dim), |acc, (w, c)| {
                acc + w.matrix() * C64::new(*c, 0.0)
            })
    }

    fn label_refs(&self) -> Vec<&str> {
        self.spin_labels.iter().map(String::as_str).collect()
    }
}

/// `c_w = Tr(B_w ρ) / Tr(B_w B_w)` over every product word, identity included.
pub fn product_operator_decompose(system: &SpinSystem, rho: &CMatrix) -> Result<ProductOperatorExpansion> {
    if rho.nrows() != system.dim() || rho.ncols() != system.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            found: rho.nrows(),
        });
    }
    let herm = linalg::hermiticity_deviation(rho);
    if herm > 1e-10 * linalg::max_abs(rho).max(1.0) {
        return Err(Error::NotHermitian(herm));
    }
    let terms = Word::all(system.n_spins())
        .into_iter()
        .map(|w| {
            let c = w.trace_with(rho).re / w.norm_sq();
            (w, c)
        })
        .collect();
    Ok(ProductOperatorExpansion {
        spin_labels: system.labels().iter().map(|s| s.to_string()).collect(),
        terms,
    })
}

impl DensityMatrix {
    pub fn decompose(&self, system: &SpinSystem) -> Result<ProductOperatorExpansion> {
        product_operator_decompose(system, self.matrix())
    }
}
