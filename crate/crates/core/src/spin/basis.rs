use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One Zeeman product state of an `n`-spin system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisState {
    pub index: usize,
    pub n_spins: usize,
}

impl BasisState {
    pub fn new(index: usize, n_spins: usize) -> Result<Self> {
        if n_spins == 0 || index >= 1 << n_spins {
            return Err(Error::InvalidBasisState(format!("index {index} for {n_spins} spins")));
        }
        Ok(Self { index, n_spins })
    }

    pub fn from_orientations(up: &[bool]) -> Self {
        let n = up.len();
        let index = up
            .iter()
            .enumerate()
            .filter(|(_, &u)| !u)
            .fold(0, |acc, (k, _)| acc | 1 << (n - 1 - k));
        Self { index, n_spins: n }
    }

    /// Parses `"udu"` or `"↑↓↑"`.
    pub fn parse(s: &str) -> Result<Self> {
        let up = s
            .chars()
            .map(|c| match c {
                'u' | 'U' | '↑' | '0' => Ok(true),
                'd' | 'D' | '↓' | '1' => Ok(false),
                _ => Err(Error::InvalidBasisState(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        if up.is_empty() {
            return Err(Error::InvalidBasisState(s.to_string()));
        }
        Ok(Self::from_orientations(&up))
    }

    #[inline]
    pub fn bit(&self, spin: usize) -> usize {
        (self.index >> (self.n_spins - 1 - spin)) & 1
    }

    #[inline]
    pub fn is_up(&self, spin: usize) -> bool {
        self.bit(spin) == 0
    }

    /// m_z of one spin.
    pub fn m(&self, spin: usize) -> f64 {
        if self.is_up(spin) {
            0.5
        } else {
            -0.5
        }
    }

    pub fn total_m(&self) -> f64 {
        (0..self.n_spins).map(|k| self.m(k)).sum()
    }

    pub fn flipped(&self, spin: usize) -> Self {
        Self {
            index: self.index ^ (1 << (self.n_spins - 1 - spin)),
            n_spins: self.n_spins,
        }
    }

    pub fn ascii(&self) -> String {
        (0..self.n_spins)
            .map(|k| if self.is_up(k) { 'u' } else { 'd' })
            .collect()
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for k in 0..self.n_spins {
            write!(f, "{}", if self.is_up(k) { '↑' } else { '↓' })?;
        }
        write!(f, "⟩")
    }
}

/// m_z of `spin` in basis state `index`, without building a `BasisState`.
#[inline]
pub(crate) fn m_of(index: usize, n_spins: usize, spin: usize) -> f64 {
    if (index >> (n_spins - 1 - spin)) & 1 == 0 {
        0.5
    } else {
        -0.5
    }
}
