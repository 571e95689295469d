use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::basis::BasisState;
use super::system::SpinSystem;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantumOrder {
    Zero,
    Single,
    Double,
}

impl QuantumOrder {
    pub fn name(self) -> &'static str {
        match self {
            QuantumOrder::Zero => "zero",
            QuantumOrder::Single => "single",
            QuantumOrder::Double => "double",
        }
    }
}

/// An ordered pair of levels. `lower` is the level with the smaller index
/// (for single- and double-quantum pairs, the one with larger total m_z).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    pub lower: BasisState,
    pub upper: BasisState,
    pub order: QuantumOrder,
    pub active_spins: Vec<usize>,
    /// `(spin, is_up)` for every spin that does not flip.
    pub passive_state: Vec<(usize, bool)>,
    /// `(E_lower − E_upper) / 2π`, so positive shifts give positive lines.
    pub frequency_hz: f64,
}

impl Transition {
    pub fn between(system: &SpinSystem, a: usize, b: usize) -> Result<Self> {
        let energies = system.eigenbasis().energies;
        Self::with_energies(system.n_spins(), a, b, &energies)
    }

    /// The single-quantum transition that flips `spin` starting from `from`.
    pub fn flip(system: &SpinSystem, from: BasisState, spin: usize) -> Result<Self> {
        Self::between(system, from.index, from.flipped(spin).index)
    }

    pub(crate) fn with_energies(n_spins: usize, a: usize, b: usize, energies: &[f64]) -> Result<Self> {
        let dim = 1 << n_spins;
        if a >= dim || b >= dim || a == b {
            return Err(Error::NotATransition(a, b));
        }
        let (lo, hi) = (a.min(b), a.max(b));
        let lower = BasisState::new(lo, n_spins)?;
        let upper = BasisState::new(hi, n_spins)?;
        let active: Vec<usize> = (0..n_spins).filter(|&k| lower.bit(k) != upper.bit(k)).collect();
        let order = match active.len() {
            1 => QuantumOrder::Single,
            2 if (lower.total_m() - upper.total_m()).abs() < 1e-9 => QuantumOrder::Zero,
            2 => QuantumOrder::Double,
            _ => return Err(Error::NotATransition(a, b)),
        };
        let passive_state = (0..n_spins)
            .filter(|k| !active.contains(k))
            .map(|k| (k, lower.is_up(k)))
            .collect();
        Ok(Self {
            lower,
            upper,
            order,
            active_spins: active,
            passive_state,
            frequency_hz: (energies[lo] - energies[hi]) / (2.0 * PI),
        })
    }

    pub fn is_single_quantum(&self) -> bool {
        self.order == QuantumOrder::Single
    }

    pub fn levels(&self) -> (usize, usize) {
        (self.lower.index, self.upper.index)
    }

    pub fn same_levels(&self, other: &Transition) -> bool {
        self.levels() == other.levels()
    }

    pub fn shared_levels(&self, other: &Transition) -> Vec<BasisState> {
        [self.lower, self.upper]
            .into_iter()
            .filter(|s| *s == other.lower || *s == other.upper)
            .collect()
    }

    /// e.g. `"uud-dud"`.
    pub fn id(&self) -> String {
        format!("{}-{}", self.lower.ascii(), self.upper.ascii())
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}→{}", self.lower, self.upper)
    }
}

/// All zero-, single- and double-quantum transitions, ordered by (lower, upper).
pub fn list_transitions(system: &SpinSystem) -> Vec<Transition> {
    let energies = system.eigenbasis().energies;
    let n = system.n_spins();
    let dim = system.dim();
    (0..dim)
        .flat_map(|a| (a + 1..dim).map(move |b| (a, b)))
        .filter_map(|(a, b)| Transition::with_energies(n, a, b, &energies).ok())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Connectivity {
    Progressive,
    Regressive,
    Unconnected,
}

/// Two transitions are connected when they share exactly one level. Looking
/// at the two non-shared levels, a total magnetization difference of zero is
/// regressive; anything else (±2 for single-quantum pairs) is progressive.
pub fn classify_connectivity(t1: &Transition, t2: &Transition) -> Result<Connectivity> {
    if t1.same_levels(t2) {
        return Err(Error::IdenticalTransitions);
    }
    let shared = t1.shared_levels(t2);
    let Some(common) = shared.first() else {
        return Ok(Connectivity::Unconnected);
    };
    let other = |t: &Transition| if t.lower == *common { t.upper } else { t.lower };
    let dm = other(t1).total_m() - other(t2).total_m();
    Ok(if dm.abs() < 1e-9 {
        Connectivity::Regressive
    } else {
        Connectivity::Progressive
    })
}
