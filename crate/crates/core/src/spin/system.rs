use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::basis::m_of;
use super::density::DensityMatrix;
use super::operators::{single_spin_operator, Axis};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

pub const MAX_SPINS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spin {
    pub label: String,
    /// Nucleus id, e.g. `"1H"` or `"19F"`.
    pub channel: String,
    pub shift_ppm: f64,
    pub weight: f64,
}

impl Spin {
    pub fn new(label: &str, channel: &str, shift_ppm: f64) -> Self {
        Self {
            label: label.to_string(),
            channel: channel.to_string(),
            shift_ppm,
            weight: 1.0,
        }
    }

    pub fn with_weight(mut self, weight: f64) -> Self {
        self.weight = weight;
        self
    }
}

/// A validated spin-1/2 system: shifts, scalar couplings and spectrometer channels.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinSystem {
    name: String,
    spins: Vec<Spin>,
    /// Row-major `n × n`, symmetric, zero diagonal, in Hz.
    couplings: Vec<f64>,
    spectrometer: BTreeMap<String, f64>,
    strong_coupling: bool,
}

impl SpinSystem {
    /// `couplings` lists `(label_a, label_b, J_hz)`; a pair may appear in both
    /// orders only with the same value.
    pub fn new(
        name: &str,
        spins: Vec<Spin>,
        couplings: &[(&str, &str, f64)],
        spectrometer: BTreeMap<String, f64>,
        strong_coupling: bool,
    ) -> Result<Self> {
        let n = spins.len();
        if n == 0 {
            return Err(Error::EmptySystem);
        }
        if n > MAX_SPINS {
            return Err(Error::TooManySpins(n, MAX_SPINS));
        }
        for (i, s) in spins.iter().enumerate() {
            if spins[..i].iter().any(|t| t.label == s.label) {
                return Err(Error::DuplicateLabel(s.label.clone()));
            }
            if !spectrometer.contains_key(&s.channel) {
                return Err(Error::MissingChannel(s.channel.clone()));
            }
            if s.weight.is_nan() || s.weight <= 0.0 {
                return Err(Error::NonPositiveWeight(s.label.clone()));
            }
        }
        let index = |label: &str| {
            spins
                .iter()
                .position(|s| s.label == label)
                .ok_or_else(|| Error::UnknownSpin(label.to_string()))
        };
        let mut matrix = vec![0.0; n * n];
        let mut seen = vec![false; n * n];
        for &(a, b, j) in couplings {
            let (i, k) = (index(a)?, index(b)?);
            if i == k {
                return Err(Error::SelfCoupling(a.to_string()));
            }
            if seen[k * n + i] && matrix[k * n + i] != j {
                return Err(Error::AsymmetricCoupling {
                    a: a.to_string(),
                    b: b.to_string(),
                    j_ab: j,
                    j_ba: matrix[k * n + i],
                });
            }
            matrix[i * n + k] = j;
            matrix[k * n + i] = j;
            seen[i * n + k] = true;
        }
        Ok(Self {
            name: name.to_string(),
            spins,
            couplings: matrix,
            spectrometer,
            strong_coupling,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_spins(&self) -> usize {
        self.spins.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.spins.len()
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    pub fn spin(&self, index: usize) -> &Spin {
        &self.spins[index]
    }

    pub fn labels(&self) -> Vec<&str> {
        self.spins.iter().map(|s| s.label.as_str()).collect()
    }

    pub fn spin_index(&self, label: &str) -> Result<usize> {
        self.spins
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::UnknownSpin(label.to_string()))
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings[i * self.n_spins() + j]
    }

    pub fn strong_coupling(&self) -> bool {
        self.strong_coupling
    }

    pub fn spectrometer(&self) -> &BTreeMap<String, f64> {
        &self.spectrometer
    }

    /// Resonance offset of spin `k` in Hz (shift in ppm × base frequency in MHz).
    pub fn frequency_hz(&self, k: usize) -> f64 {
        let s = &self.spins[k];
        s.shift_ppm * self.spectrometer[&s.channel]
    }

    /// Channels that carry at least one spin, in first-appearance order.
    pub fn channels(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for s in &self.spins {
            if !out.contains(&s.channel) {
                out.push(s.channel.clone());
            }
        }
        out
    }

    pub fn spins_on_channel(&self, channel: &str) -> Result<Vec<usize>> {
        let idx: Vec<usize> = (0..self.n_spins())
            .filter(|&k| self.spins[k].channel == channel)
            .collect();
        if idx.is_empty() {
            return Err(Error::UnknownChannel(channel.to_string()));
        }
        Ok(idx)
    }

    pub fn with_coupling(&self, a: usize, b: usize, j_hz: f64) -> Self {
        let mut out = self.clone();
        let n = self.n_spins();
        out.couplings[a * n + b] = j_hz;
        out.couplings[b * n + a] = j_hz;
        out
    }

    pub fn with_strong_coupling(&self, on: bool) -> Self {
        let mut out = self.clone();
        out.strong_coupling = on;
        out
    }

    pub fn with_weights(&self, weights: &[f64]) -> Result<Self> {
        let mut out = self.clone();
        for (s, &w) in out.spins.iter_mut().zip(weights) {
            if w.is_nan() || w <= 0.0 {
                return Err(Error::NonPositiveWeight(s.label.clone()));
            }
            s.weight = w;
        }
        Ok(out)
    }

    /// Diagonal of the weak-coupling Hamiltonian in rad/s.
    pub fn weak_energies(&self) -> Vec<f64> {
        let n = self.n_spins();
        (0..self.dim())
            .map(|a| {
                let zeeman: f64 = (0..n).map(|k| self.frequency_hz(k) * m_of(a, n, k)).sum();
                let scalar: f64 = (0..n)
                    .flat_map(|k| (k + 1..n).map(move |l| (k, l)))
                    .map(|(k, l)| self.coupling(k, l) * m_of(a, n, k) * m_of(a, n, l))
                    .sum();
                2.0 * PI * (zeeman + scalar)
            })
            .collect()
    }

    /// Pairs that get the full `I_k·I_l` coupling when strong coupling is on.
    pub(crate) fn strong_pairs(&self) -> Vec<(usize, usize)> {
        if !self.strong_coupling {
            return Vec::new();
        }
        let n = self.n_spins();
        (0..n)
            .flat_map(|k| (k + 1..n).map(move |l| (k, l)))
            .filter(|&(k, l)| self.spins[k].channel == self.spins[l].channel && self.coupling(k, l) != 0.0)
            .collect()
    }

    /// Eigenvalues and eigenvectors of the Hamiltonian, each eigenvector
    /// assigned to the basis state it overlaps most.
    pub fn eigenbasis(&self) -> EigenBasis {
        let dim = self.dim();
        let diag = self.weak_energies();
        let pairs = self.strong_pairs();
        if pairs.is_empty() {
            return EigenBasis {
                energies: diag,
                vectors: CMatrix::identity(dim, dim),
                diagonal: true,
            };
        }
        let h = hamiltonian(self).map(|z| z.re);
        let eig = nalgebra::SymmetricEigen::new(h);
        let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(dim * dim);
        for col in 0..dim {
            for row in 0..dim {
                candidates.push((eig.eigenvectors[(row, col)].powi(2), row, col));
            }
        }
        candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut by_state = vec![usize::MAX; dim];
        let mut col_used = vec![false; dim];
        for (_, row, col) in candidates {
            if by_state[row] == usize::MAX && !col_used[col] {
                by_state[row] = col;
                col_used[col] = true;
            }
        }
        let mut vectors = DMatrix::<C64>::zeros(dim, dim);
        let mut energies = vec![0.0; dim];
        for (state, &col) in by_state.iter().enumerate() {
            let sign = eig.eigenvectors[(state, col)].signum();
            energies[state] = eig.eigenvalues[col];
            for row in 0..dim {
                vectors[(row, state)] = C64::new(sign * eig.eigenvectors[(row, col)], 0.0);
            }
        }
        EigenBasis {
            energies,
            vectors,
            diagonal: false,
        }
    }
}

/// Eigenstructure of a spin Hamiltonian, labeled by basis state.
#[derive(Clone, Debug)]
pub struct EigenBasis {
    /// rad/s, indexed by the assigned basis state.
    pub energies: Vec<f64>,
    /// Column `a` is the eigenvector assigned to basis state `a`.
    pub vectors: CMatrix,
    pub diagonal: bool,
}

impl EigenBasis {
    /// Expresses a product-basis operator in the eigenbasis.
    pub fn to_eigen(&self, m: &CMatrix) -> CMatrix {
        if self.diagonal {
            m.clone()
        } else {
            self.vectors.adjoint() * m * &self.vectors
        }
    }
}

/// H/ħ in rad/s, in basis-state order.
///
/// Weak coupling: `Σ 2πν_k I_kz + Σ 2πJ_kl I_kz I_lz`. With strong coupling
/// enabled, same-channel pairs get `2πJ_kl I_k·I_l`.
pub fn hamiltonian(system: &SpinSystem) -> CMatrix {
    let dim = system.dim();
    let n = system.n_spins();
    let energies = system.weak_energies();
    let mut h = CMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            C64::new(energies[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    for (k, l) in system.strong_pairs() {
        let w = 2.0 * PI * system.coupling(k, l);
        for axis in [Axis::X, Axis::Y] {
            let term = single_spin_operator(n, k, axis) * single_spin_operator(n, l, axis);
            h += term * C64::new(w, 0.0);
        }
    }
    h
}

/// Equilibrium deviation `Σ_k w_k I_kz`.
pub fn thermal_deviation(system: &SpinSystem) -> DensityMatrix {
    let n = system.n_spins();
    let diag: Vec<f64> = (0..system.dim())
        .map(|a| (0..n).map(|k| system.spin(k).weight * m_of(a, n, k)).sum())
        .collect();
    DensityMatrix::from_populations(&diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{diag_real, hermiticity_deviation};

    fn channels(list: &[(&str, f64)]) -> BTreeMap<String, f64> {
        list.iter().map(|(c, f)| (c.to_string(), *f)).collect()
    }

    fn two_spin(j: f64) -> SpinSystem {
        // ν_A = 100 Hz, ν_X = −100 Hz at a 1 MHz base frequency.
        SpinSystem::new(
            "ax",
            vec![Spin::new("A", "1H", 100.0), Spin::new("X", "1H", -100.0)],
            &[("A", "X", j)],
            channels(&[("1H", 1.0)]),
            false,
        )
        .unwrap()
    }

    #[test]
    fn two_spin_diagonal_closed_form() {
        let (na, nx, j) = (100.0, -100.0, 10.0);
        let h = hamiltonian(&two_spin(j));
        let expected = [
            na / 2.0 + nx / 2.0 + j / 4.0,
            na / 2.0 - nx / 2.0 - j / 4.0,
            -na / 2.0 + nx / 2.0 - j / 4.0,
            -na / 2.0 - nx / 2.0 + j / 4.0,
        ];
        for (i, e) in expected.iter().enumerate() {
            assert!((h[(i, i)].re - 2.0 * PI * e).abs() < 1e-9);
        }
        assert!(h.iter().enumerate().all(|(idx, z)| idx % 5 == 0 || z.norm() == 0.0));
    }

    #[test]
    fn equal_shifts_without_coupling_are_degenerate() {
        let sys = SpinSystem::new(
            "aa",
            vec![Spin::new("A", "1H", 50.0), Spin::new("B", "1H", 50.0)],
            &[],
            channels(&[("1H", 1.0)]),
            false,
        )
        .unwrap();
        let d = diag_real(&hamiltonian(&sys));
        let w = 2.0 * PI * 50.0;
        assert!((d[0] - w).abs() < 1e-12 && (d[3] + w).abs() < 1e-12);
        assert!(d[1].abs() < 1e-12 && d[2].abs() < 1e-12);
    }

    #[test]
    fn validation_errors() {
        let ch = channels(&[("1H", 400.0)]);
        let dup = SpinSystem::new(
            "d",
            vec![Spin::new("A", "1H", 1.0), Spin::new("A", "1H", 2.0)],
            &[],
            ch.clone(),
            false,
        );
        assert!(matches!(dup, Err(Error::DuplicateLabel(_))));
        let missing = SpinSystem::new("m", vec![Spin::new("A", "13C", 1.0)], &[], ch.clone(), false);
        assert!(matches!(missing, Err(Error::MissingChannel(_))));
        let asym = SpinSystem::new(
            "a",
            vec![Spin::new("A", "1H", 1.0), Spin::new("B", "1H", 2.0)],
            &[("A", "B", 5.0), ("B", "A", 6.0)],
            ch.clone(),
            false,
        );
        assert!(matches!(asym, Err(Error::AsymmetricCoupling { .. })));
        let selfc = SpinSystem::new(
            "s",
            vec![Spin::new("A", "1H", 1.0)],
            &[("A", "A", 1.0)],
            ch.clone(),
            false,
        );
        assert!(matches!(selfc, Err(Error::SelfCoupling(_))));
        let w = SpinSystem::new(
            "w",
            vec![Spin::new("A", "1H", 1.0).with_weight(0.0)],
            &[],
            ch.clone(),
            false,
        );
        assert!(matches!(w, Err(Error::NonPositiveWeight(_))));
        assert!(matches!(
            SpinSystem::new("e", vec![], &[], ch, false),
            Err(Error::EmptySystem)
        ));
    }

    #[test]
    fn thermal_single_spin() {
        let sys = SpinSystem::new(
            "h",
            vec![Spin::new("A", "1H", 1.0)],
            &[],
            channels(&[("1H", 400.0)]),
            false,
        )
        .unwrap();
        assert_eq!(thermal_deviation(&sys).populations(), vec![0.5, -0.5]);
    }

    #[test]
    fn strong_coupling_hamiltonian_is_hermitian_and_mixes_zero_quantum_pair() {
        let sys = two_spin(10.0).with_strong_coupling(true);
        let h = hamiltonian(&sys);
        assert!(hermiticity_deviation(&h) < 1e-12);
        assert!((h[(1, 2)].re - PI * 10.0).abs() < 1e-9);
        let eb = sys.eigenbasis();
        let hv = eb.to_eigen(&h);
        for i in 0..4 {
            assert!((hv[(i, i)].re - eb.energies[i]).abs() < 1e-9);
        }
        // Weak coupling limit: each eigenvector stays on its own basis state.
        assert!(eb.vectors[(1, 1)].re > 0.99);
    }
}
