//! Pulse events, sequences and their propagators.
//!
//! Every rotation uses `exp(+iθ(cos φ I_x + sin φ I_y))`, so a transition
//! π_x pulse has `+i` off-diagonals. Sequences run left to right in time;
//! the propagator is `U_n ··· U_1`.

mod ideal;
mod soft;

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::par::{self, Execution};
use crate::spin::{BasisState, DensityMatrix, SpinSystem, Transition};

pub use ideal::{ideal_spin_pulse, ideal_transition_pulse, nonselective_pulse, rotation_2x2};
pub use soft::{
    fidelity_sweep, fidelity_sweep_with, pulse_fidelity, soft_convergence, soft_convergence_with,
    soft_pulse_propagator, ConvergenceReport, Fidelity, SoftPulse, DEFAULT_MIN_STEPS, MAX_STEP_PHASE,
};

pub const PHASE_X: f64 = 0.0;
pub const PHASE_Y: f64 = FRAC_PI_2;
pub const PHASE_MINUS_X: f64 = PI;
pub const PHASE_MINUS_Y: f64 = 3.0 * FRAC_PI_2;

/// The four-step cycle (x, −x, y, −y).
pub const XY_CYCLE: [f64; 4] = [PHASE_X, PHASE_MINUS_X, PHASE_Y, PHASE_MINUS_Y];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PulseKind {
    TransitionSelective,
    SpinSelective,
    NonSelective,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PulseTarget {
    Transition(Transition),
    Spin(usize),
    Channel(String),
    All,
}

impl PulseTarget {
    pub fn kind(&self) -> PulseKind {
        match self {
            PulseTarget::Transition(_) => PulseKind::TransitionSelective,
            PulseTarget::Spin(_) => PulseKind::SpinSelective,
            PulseTarget::Channel(_) | PulseTarget::All => PulseKind::NonSelective,
        }
    }

    /// Text form used in sequence files: `"uud-dud"`, a spin label, a channel, or `"all"`.
    pub fn describe(&self, system: &SpinSystem) -> String {
        match self {
            PulseTarget::Transition(t) => t.id(),
            PulseTarget::Spin(k) => system.spin(*k).label.clone(),
            PulseTarget::Channel(c) => c.clone(),
            PulseTarget::All => "all".to_string(),
        }
    }

    pub fn parse(system: &SpinSystem, kind: PulseKind, text: &str) -> Result<Self> {
        match kind {
            PulseKind::TransitionSelective => {
                let (a, b) = text
                    .split_once('-')
                    .ok_or_else(|| Error::Config(format!("transition target `{text}` is not of the form uud-dud")))?;
                let (a, b) = (BasisState::parse(a)?, BasisState::parse(b)?);
                if a.n_spins != system.n_spins() || b.n_spins != system.n_spins() {
                    return Err(Error::InvalidBasisState(text.to_string()));
                }
                Ok(PulseTarget::Transition(Transition::between(system, a.index, b.index)?))
            }
            PulseKind::SpinSelective => Ok(PulseTarget::Spin(system.spin_index(text)?)),
            PulseKind::NonSelective if text.eq_ignore_ascii_case("all") => Ok(PulseTarget::All),
            PulseKind::NonSelective => {
                system.spins_on_channel(text)?;
                Ok(PulseTarget::Channel(text.to_string()))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Realization {
    #[default]
    Ideal,
    Soft(SoftPulse),
}

/// One rectangular pulse. For soft realizations the rotation actually
/// produced follows from `b1_hz · duration_s`; `angle` is then nominal.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseEvent {
    pub target: PulseTarget,
    pub angle: f64,
    pub phase: f64,
    pub realization: Realization,
}

impl PulseEvent {
    pub fn new(target: PulseTarget, angle: f64, phase: f64) -> Result<Self> {
        if !(angle > 0.0 && angle <= TAU + 1e-12) {
            return Err(Error::AngleOutOfRange(angle));
        }
        Ok(Self {
            target,
            angle,
            phase: phase.rem_euclid(TAU),
            realization: Realization::Ideal,
        })
    }

    /// Ideal π_x on a transition.
    pub fn pi_x(t: Transition) -> Self {
        Self::new(PulseTarget::Transition(t), PI, PHASE_X).expect("π is in range")
    }

    pub fn with_realization(mut self, realization: Realization) -> Self {
        self.realization = realization;
        self
    }

    pub fn kind(&self) -> PulseKind {
        self.target.kind()
    }

    pub fn propagator(&self, system: &SpinSystem) -> Result<CMatrix> {
        match &self.realization {
            Realization::Ideal => match &self.target {
                PulseTarget::Transition(t) => ideal_transition_pulse(system, t, self.angle, self.phase),
                PulseTarget::Spin(k) => ideal_spin_pulse(system, *k, self.angle, self.phase),
                PulseTarget::Channel(c) => nonselective_pulse(system, Some(c), self.angle, self.phase),
                PulseTarget::All => nonselective_pulse(system, None, self.angle, self.phase),
            },
            Realization::Soft(_) => soft_pulse_propagator(system, self),
        }
    }

    pub fn to_record(&self, system: &SpinSystem) -> PulseRecord {
        PulseRecord {
            kind: self.kind(),
            target: self.target.describe(system),
            angle_deg: self.angle.to_degrees(),
            phase_deg: self.phase.to_degrees(),
            realization: self.realization.clone(),
        }
    }

    pub fn from_record(system: &SpinSystem, record: &PulseRecord) -> Result<Self> {
        let target = PulseTarget::parse(system, record.kind, &record.target)?;
        Ok(
            Self::new(target, record.angle_deg.to_radians(), record.phase_deg.to_radians())?
                .with_realization(record.realization.clone()),
        )
    }
}

/// Serialized form of a [`PulseEvent`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseRecord {
    pub kind: PulseKind,
    pub target: String,
    pub angle_deg: f64,
    pub phase_deg: f64,
    #[serde(default)]
    pub realization: Realization,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PulseSequence {
    pub label: String,
    pub events: Vec<PulseEvent>,
}

impl PulseSequence {
    pub fn new(label: &str, events: Vec<PulseEvent>) -> Self {
        Self {
            label: label.to_string(),
            events,
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn then(mut self, event: PulseEvent) -> Self {
        self.events.push(event);
        self
    }

    pub fn to_json(&self, system: &SpinSystem) -> Result<String> {
        let records: Vec<PulseRecord> = self.events.iter().map(|e| e.to_record(system)).collect();
        Ok(serde_json::to_string_pretty(&records)?)
    }

    pub fn from_json(system: &SpinSystem, label: &str, text: &str) -> Result<Self> {
        let records: Vec<PulseRecord> = serde_json::from_str(text)?;
        let events = records
            .iter()
            .map(|r| PulseEvent::from_record(system, r))
            .collect::<Result<_>>()?;
        Ok(Self::new(label, events))
    }

    /// Replaces every transition-selective event by a soft rectangular pulse
    /// of amplitude `b1_hz`, with duration calibrated to the event's angle and
    /// the carrier on the target line. Spin- and channel-wide pulses stay hard:
    /// an amplitude weak enough to pick one line cannot cover a multiplet.
    ///
    /// Consecutive pulses of equal angle and phase on lines of the same spin
    /// that lie closer than `b1_hz/2` and share no level cannot be told apart
    /// by the rf; they become one soft pulse centred between the lines.
    pub fn realize_soft(&self, system: &SpinSystem, b1_hz: f64, dt_s: Option<f64>) -> Result<Self> {
        let mut events: Vec<PulseEvent> = Vec::with_capacity(self.events.len());
        let mut merged: Vec<f64> = Vec::new();
        for e in &self.events {
            let PulseTarget::Transition(t) = &e.target else {
                events.push(e.clone());
                merged.push(f64::NAN);
                continue;
            };
            if let (Some(prev), Some(freqs)) = (events.last_mut(), merged.last_mut()) {
                if let (PulseTarget::Transition(pt), Realization::Soft(soft)) = (&prev.target, &mut prev.realization) {
                    let (a, b) = t.levels();
                    let (c, d) = pt.levels();
                    let unresolved = (t.frequency_hz - soft.carrier_hz).abs() < b1_hz / 2.0
                        && pt.active_spins == t.active_spins
                        && prev.angle == e.angle
                        && prev.phase == e.phase
                        && [a, b].iter().all(|l| *l != c && *l != d);
                    if unresolved {
                        *freqs += 1.0;
                        soft.carrier_hz += (t.frequency_hz - soft.carrier_hz) / *freqs;
                        continue;
                    }
                }
            }
            let soft = SoftPulse::calibrated(system, &e.target, e.angle, b1_hz)?;
            events.push(
                e.clone()
                    .with_realization(Realization::Soft(SoftPulse { dt_s, ..soft })),
            );
            merged.push(1.0);
        }
        Ok(Self::new(&self.label, events))
    }
}

impl fmt::Display for PulseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} pulses)", self.label, self.events.len())
    }
}

/// `U_n ··· U_1` for events applied in list order.
pub fn sequence_propagator(system: &SpinSystem, seq: &PulseSequence) -> Result<CMatrix> {
    let mut u = linalg::identity(system.dim());
    for event in &seq.events {
        u = event.propagator(system)? * u;
    }
    Ok(u)
}

pub fn apply_sequence(system: &SpinSystem, rho: &DensityMatrix, seq: &PulseSequence) -> Result<DensityMatrix> {
    rho.evolve(&sequence_propagator(system, seq)?)
}

/// One variant per phase, with every transition-selective pulse phase
/// shifted by that phase. Other pulses and the receiver are left alone.
pub fn phase_cycle(seq: &PulseSequence, phases: &[f64]) -> Result<Vec<PulseSequence>> {
    if phases.is_empty() {
        return Err(Error::EmptyPhaseList);
    }
    if !seq.events.iter().any(|e| e.kind() == PulseKind::TransitionSelective) {
        return Err(Error::NothingToCycle);
    }
    Ok(phases
        .iter()
        .enumerate()
        .map(|(i, &offset)| {
            let events = seq
                .events
                .iter()
                .map(|e| {
                    let mut e = e.clone();
                    if e.kind() == PulseKind::TransitionSelective {
                        e.phase = (e.phase + offset).rem_euclid(TAU);
                    }
                    e
                })
                .collect();
            PulseSequence::new(&format!("{} [cycle {}]", seq.label, i + 1), events)
        })
        .collect())
}

/// Propagators of several sequences, computed independently.
pub fn sequence_propagators_with(exec: Execution, system: &SpinSystem, seqs: &[PulseSequence]) -> Result<Vec<CMatrix>> {
    par::try_map(exec, seqs, |s| sequence_propagator(system, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{builtin_molecule, thermal_deviation};

    fn coumarin() -> SpinSystem {
        builtin_molecule("coumarin").unwrap().build().unwrap()
    }

    #[test]
    fn empty_sequence_is_identity() {
        let sys = coumarin();
        let rho = thermal_deviation(&sys);
        let out = apply_sequence(&sys, &rho, &PulseSequence::default()).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn zq_cascade_swaps_middle_populations() {
        let sys = coumarin();
        let a1 = Transition::between(&sys, 2, 3).unwrap();
        let x1 = Transition::between(&sys, 1, 3).unwrap();
        let seq = PulseSequence::new(
            "zq",
            vec![PulseEvent::pi_x(a1.clone()), PulseEvent::pi_x(x1), PulseEvent::pi_x(a1)],
        );
        let rho = DensityMatrix::from_populations(&[4.0, 3.0, 2.0, 1.0]);
        let pops = apply_sequence(&sys, &rho, &seq).unwrap().populations();
        let expect = [1.5, -0.5, 0.5, -1.5];
        for (p, e) in pops.iter().zip(expect) {
            assert!((p - e).abs() < 1e-12);
        }
    }

    #[test]
    fn cycle_offsets_only_transition_pulses() {
        let sys = coumarin();
        let t = Transition::between(&sys, 0, 1).unwrap();
        let seq = PulseSequence::new(
            "s",
            vec![
                PulseEvent::new(PulseTarget::All, FRAC_PI_2, PHASE_Y).unwrap(),
                PulseEvent::pi_x(t),
            ],
        );
        let variants = phase_cycle(&seq, &XY_CYCLE).unwrap();
        assert_eq!(variants.len(), 4);
        for (v, p) in variants.iter().zip(XY_CYCLE) {
            assert_eq!(v.events[0].phase, PHASE_Y);
            assert!((v.events[1].phase - p).abs() < 1e-15);
        }
        let single = phase_cycle(&seq, &[PHASE_X]).unwrap();
        assert_eq!(single[0].events, seq.events);
        assert!(matches!(phase_cycle(&seq, &[]), Err(Error::EmptyPhaseList)));
        let no_sel = PulseSequence::new("n", vec![seq.events[0].clone()]);
        assert!(matches!(phase_cycle(&no_sel, &XY_CYCLE), Err(Error::NothingToCycle)));
    }

    #[test]
    fn json_roundtrip() {
        let sys = coumarin();
        let t = Transition::between(&sys, 2, 3).unwrap();
        let seq = PulseSequence::new(
            "rt",
            vec![
                PulseEvent::pi_x(t.clone()),
                PulseEvent::new(PulseTarget::Spin(1), PI, PHASE_Y).unwrap(),
                PulseEvent::new(PulseTarget::Channel("1H".into()), FRAC_PI_2, PHASE_MINUS_X).unwrap(),
                PulseEvent::new(PulseTarget::All, 0.3, 0.0).unwrap(),
                PulseEvent::pi_x(t).with_realization(Realization::Soft(SoftPulse {
                    b1_hz: 2.0,
                    duration_s: 0.25,
                    carrier_hz: 100.0,
                    dt_s: None,
                })),
            ],
        );
        let text = seq.to_json(&sys).unwrap();
        assert!(text.contains("\"transition-selective\"") && text.contains("\"du-dd\""));
        let back = PulseSequence::from_json(&sys, "rt", &text).unwrap();
        assert_eq!(back.events.len(), seq.events.len());
        for (a, b) in back.events.iter().zip(&seq.events) {
            assert_eq!(a.target, b.target);
            assert_eq!(a.realization, b.realization);
            assert!((a.angle - b.angle).abs() < 1e-12 && (a.phase - b.phase).abs() < 1e-12);
        }
    }

    #[test]
    fn angle_range_enforced() {
        assert!(matches!(
            PulseEvent::new(PulseTarget::All, 0.0, 0.0),
            Err(Error::AngleOutOfRange(_))
        ));
        assert!(matches!(
            PulseEvent::new(PulseTarget::All, 7.0, 0.0),
            Err(Error::AngleOutOfRange(_))
        ));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let sys = coumarin();
        let t = Transition::between(&sys, 0, 2).unwrap();
        let seq = PulseSequence::new(
            "p",
            vec![PulseEvent::new(PulseTarget::Transition(t), 1.0, 0.2).unwrap()],
        );
        let variants = phase_cycle(&seq, &XY_CYCLE).unwrap();
        let a = sequence_propagators_with(Execution::Sequential, &sys, &variants).unwrap();
        let b = sequence_propagators_with(Execution::Parallel, &sys, &variants).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unresolved_lines_share_one_soft_pulse() {
        let sys = builtin_molecule("benzofurazan").unwrap().build().unwrap();
        // The two inner A lines sit |J_AM - J_AX| = 0.09 Hz apart.
        let inner = PulseSequence::new(
            "inner",
            vec![
                PulseEvent::pi_x(Transition::between(&sys, 1, 5).unwrap()),
                PulseEvent::pi_x(Transition::between(&sys, 2, 6).unwrap()),
            ],
        );
        let soft = inner.realize_soft(&sys, 1.9, None).unwrap();
        assert_eq!(soft.len(), 1);
        let rho = thermal_deviation(&sys);
        let want = apply_sequence(&sys, &rho, &inner).unwrap().populations();
        let got = apply_sequence(&sys, &rho, &soft).unwrap().populations();
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() < 0.1, "{got:?} vs {want:?}");
        }

        let resolved = PulseSequence::new(
            "outer",
            vec![
                PulseEvent::pi_x(Transition::between(&sys, 0, 4).unwrap()),
                PulseEvent::pi_x(Transition::between(&sys, 3, 7).unwrap()),
            ],
        );
        assert_eq!(resolved.realize_soft(&sys, 1.9, None).unwrap().len(), 2);
    }
}
