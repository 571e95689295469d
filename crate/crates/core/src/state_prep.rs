//! Pseudo-pure states by logical labeling on three-spin systems, and
//! three-pulse cascades that invert zero- and double-quantum level pairs.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::{apply_sequence, PulseEvent, PulseSequence};
use crate::spin::{thermal_deviation, BasisState, DensityMatrix, SpinSystem, Transition};

/// Relative populations in basis-state order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopulationVector(pub Vec<f64>);

impl PopulationVector {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

impl fmt::Display for PopulationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| format!("{v:+.4}")).collect();
        write!(f, "({})", parts.join(", "))
    }
}

pub fn populations(rho: &DensityMatrix) -> PopulationVector {
    PopulationVector(rho.populations())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PpureScheme {
    /// Invert the two label-spin lines whose work spins are antiparallel.
    Sq,
    /// Double-quantum inversion in the label-↓ block, then one label line.
    DqSq,
    /// One label-↓ work line, then a zero-quantum inversion across blocks.
    SqZq,
}

impl PpureScheme {
    pub const ALL: [PpureScheme; 3] = [PpureScheme::Sq, PpureScheme::DqSq, PpureScheme::SqZq];

    pub fn name(self) -> &'static str {
        match self {
            PpureScheme::Sq => "sq",
            PpureScheme::DqSq => "dq-sq",
            PpureScheme::SqZq => "sq-zq",
        }
    }
}

impl FromStr for PpureScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        PpureScheme::ALL
            .into_iter()
            .find(|m| m.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Config(format!("unknown preparation method `{s}` (sq, dq-sq, sq-zq)")))
    }
}

/// Basis index with the label spin and both work spins set (`true` = ↑).
fn level(n: usize, label: usize, work: [usize; 2], l: bool, w1: bool, w2: bool) -> usize {
    let mut up = vec![true; n];
    up[label] = l;
    up[work[0]] = w1;
    up[work[1]] = w2;
    BasisState::from_orientations(&up).index
}

/// The ideal pulse program for `scheme` with `label` as the label spin.
pub fn ppure_sequence(system: &SpinSystem, scheme: PpureScheme, label: usize) -> Result<PulseSequence> {
    let n = system.n_spins();
    if n != 3 {
        return Err(Error::WrongSpinCount {
            scheme: "pseudo-pure preparation",
            required: 3,
            found: n,
        });
    }
    if label >= n {
        return Err(Error::UnknownSpin(label.to_string()));
    }
    let w: Vec<usize> = (0..n).filter(|&k| k != label).collect();
    let work = [w[0], w[1]];
    let lv = |l, a, b| level(n, label, work, l, a, b);
    let pi = |a: usize, b: usize| Transition::between(system, a, b).map(PulseEvent::pi_x);
    let (up, down) = (true, false);
    let events = match scheme {
        PpureScheme::Sq => vec![
            pi(lv(up, up, down), lv(down, up, down))?,
            pi(lv(up, down, up), lv(down, down, up))?,
        ],
        PpureScheme::DqSq => {
            let dq = Transition::between(system, lv(down, up, up), lv(down, down, down))?;
            let mut e = compile_mq_inversion(system, &dq)?.events;
            e.push(pi(lv(up, down, down), lv(down, down, down))?);
            e
        }
        PpureScheme::SqZq => {
            let zq = Transition::between(system, lv(up, down, down), lv(down, up, down))?;
            let mut e = vec![pi(lv(down, up, up), lv(down, up, down))?];
            e.extend(compile_mq_inversion(system, &zq)?.events);
            e
        }
    };
    Ok(PulseSequence::new(&format!("ppure-{}", scheme.name()), events))
}

pub fn prepare_ppure(system: &SpinSystem, scheme: PpureScheme, label: usize) -> Result<DensityMatrix> {
    apply_sequence(
        system,
        &thermal_deviation(system),
        &ppure_sequence(system, scheme, label)?,
    )
}

pub fn prepare_ppure_sq(system: &SpinSystem) -> Result<DensityMatrix> {
    prepare_ppure(system, PpureScheme::Sq, 0)
}

pub fn prepare_ppure_dq_sq(system: &SpinSystem) -> Result<DensityMatrix> {
    prepare_ppure(system, PpureScheme::DqSq, 0)
}

pub fn prepare_ppure_sq_zq(system: &SpinSystem) -> Result<DensityMatrix> {
    prepare_ppure(system, PpureScheme::SqZq, 0)
}

/// Smallest coupling between the flipping spin of `t` and any passive spin.
fn line_strength(system: &SpinSystem, t: &Transition) -> f64 {
    let k = t.active_spins[0];
    t.passive_state
        .iter()
        .map(|&(p, _)| system.coupling(k, p).abs())
        .fold(f64::INFINITY, f64::min)
}

/// Cascade `(r,m), (m,s), (r,m)` of π_x pulses that swaps the populations of
/// a zero- or double-quantum pair and leaves the intermediate level `m`
/// untouched. `r` is the higher-index endpoint; `m` is the level reached by
/// the most strongly split lines, ties going to the higher index.
pub fn compile_mq_inversion(system: &SpinSystem, t: &Transition) -> Result<PulseSequence> {
    if t.is_single_quantum() {
        return Err(Error::AlreadySingleQuantum(t.id()));
    }
    let (s, r) = t.levels();
    let mut best: Option<(f64, usize, Transition, Transition)> = None;
    for m in 0..system.dim() {
        if m == r || m == s {
            continue;
        }
        let (Ok(rm), Ok(ms)) = (Transition::between(system, r, m), Transition::between(system, m, s)) else {
            continue;
        };
        if !rm.is_single_quantum() || !ms.is_single_quantum() {
            continue;
        }
        let score = line_strength(system, &rm).min(line_strength(system, &ms));
        if best.as_ref().is_none_or(|(b, _, _, _)| score >= *b) {
            best = Some((score, m, rm, ms));
        }
    }
    let (_, _, rm, ms) = best.ok_or_else(|| Error::NoIntermediateLevel(t.id()))?;
    Ok(PulseSequence::new(
        &format!("{}-quantum inversion {}", t.order.name(), t.id()),
        vec![PulseEvent::pi_x(rm.clone()), PulseEvent::pi_x(ms), PulseEvent::pi_x(rm)],
    ))
}
