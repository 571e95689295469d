//! Two-qubit logic gates as permutation matrices, their transition-selective
//! pulse cascades, and equivalence up to row phases.
//!
//! Spin 0 carries the first qubit, spin 1 the second. The four lines are
//! named by the spin that flips and the state of its partner: `A1` is the
//! spin-0 line with spin 1 ↓, `A2` with spin 1 ↑, `X1` the spin-1 line with
//! spin 0 ↓, `X2` with spin 0 ↑.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::par::{self, Execution};
use crate::pulse::{sequence_propagator, PulseEvent, PulseSequence, PulseTarget, PHASE_X};
use crate::spectrum::{read_spectrum, StickSpectrum};
use crate::spin::{thermal_deviation, DensityMatrix, SpinSystem, Transition};
use crate::state_prep::compile_mq_inversion;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Gate {
    Swap,
    Xor1,
    Xor2,
    Xnor1,
    Xnor2,
    Not1,
    Not2,
    SwapXor,
    SwapXnor,
    XorSwapNot,
    XnorSwapNot,
    NotSwap,
    /// SWAP applied after an `A1` inversion, so the result differs from equilibrium.
    SwapDemo,
}

impl Gate {
    pub const ALL: [Gate; 13] = [
        Gate::Swap,
        Gate::Xor1,
        Gate::Xor2,
        Gate::Xnor1,
        Gate::Xnor2,
        Gate::Not1,
        Gate::Not2,
        Gate::SwapXor,
        Gate::SwapXnor,
        Gate::XorSwapNot,
        Gate::XnorSwapNot,
        Gate::NotSwap,
        Gate::SwapDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Gate::Swap => "SWAP",
            Gate::Xor1 => "XOR1",
            Gate::Xor2 => "XOR2",
            Gate::Xnor1 => "XNOR1",
            Gate::Xnor2 => "XNOR2",
            Gate::Not1 => "NOT1",
            Gate::Not2 => "NOT2",
            Gate::SwapXor => "SWAP+XOR",
            Gate::SwapXnor => "SWAP+XNOR",
            Gate::XorSwapNot => "XOR+SWAP+NOT",
            Gate::XnorSwapNot => "XNOR+SWAP+NOT",
            Gate::NotSwap => "NOT+SWAP",
            Gate::SwapDemo => "SWAP-DEMO",
        }
    }

    /// `|j⟩ → |perm[j]⟩` for the elementary gates.
    fn elementary(self) -> Option<[usize; 4]> {
        Some(match self {
            Gate::Swap => [0, 2, 1, 3],
            Gate::Xor1 => [0, 3, 2, 1],
            Gate::Xor2 => [0, 1, 3, 2],
            Gate::Xnor1 => [2, 1, 0, 3],
            Gate::Xnor2 => [1, 0, 2, 3],
            Gate::Not1 => [2, 3, 0, 1],
            Gate::Not2 => [1, 0, 3, 2],
            _ => return None,
        })
    }

    /// Factors in product order (rightmost acts first).
    fn factors(self) -> Vec<Gate> {
        use Gate::*;
        match self {
            SwapXor => vec![Xor1, Swap],
            SwapXnor => vec![Xnor1, Swap],
            XorSwapNot => vec![Not1, Swap, Xor1],
            XnorSwapNot => vec![Not2, Swap, Xnor2],
            NotSwap => vec![Swap, Not1, Not2],
            SwapDemo => vec![Swap, Xor2],
            g => vec![g],
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Gate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace(['-', '_'], "+");
        Gate::ALL
            .into_iter()
            .find(|g| g.name().replace('-', "+") == key)
            .ok_or_else(|| Error::UnknownGate(s.to_string()))
    }
}

/// A named gate or an explicit product, written in matrix order
/// (`"NOT1*SWAP*XOR1"` applies XOR1 first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GateSpec {
    Named(Gate),
    Product(Vec<Gate>),
}

impl GateSpec {
    pub fn name(&self) -> String {
        match self {
            GateSpec::Named(g) => g.name().to_string(),
            GateSpec::Product(gs) => gs.iter().map(|g| g.name()).collect::<Vec<_>>().join("*"),
        }
    }

    fn factors(&self) -> Vec<Gate> {
        match self {
            GateSpec::Named(g) => g.factors(),
            GateSpec::Product(gs) => gs.iter().flat_map(|g| g.factors()).collect(),
        }
    }
}

impl From<Gate> for GateSpec {
    fn from(g: Gate) -> Self {
        GateSpec::Named(g)
    }
}

impl FromStr for GateSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(['*', '·']).map(str::trim).filter(|p| !p.is_empty()).collect();
        match parts.as_slice() {
            [] => Err(Error::UnknownGate(s.to_string())),
            [one] => Ok(GateSpec::Named(one.parse()?)),
            many => Ok(GateSpec::Product(
                many.iter().map(|p| p.parse()).collect::<Result<_>>()?,
            )),
        }
    }
}

/// The 0/1 permutation matrix of `spec`.
pub fn ideal_gate(spec: &GateSpec) -> CMatrix {
    spec.factors().into_iter().fold(linalg::identity(4), |acc, g| {
        let perm = g.elementary().expect("factors are elementary");
        acc * linalg::permutation_matrix(&perm)
    })
}

pub fn ideal_gate_named(g: Gate) -> CMatrix {
    ideal_gate(&GateSpec::Named(g))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LineName {
    A1,
    A2,
    X1,
    X2,
}

impl LineName {
    pub fn levels(self) -> (usize, usize) {
        match self {
            LineName::A1 => (2, 3),
            LineName::A2 => (0, 1),
            LineName::X1 => (1, 3),
            LineName::X2 => (0, 2),
        }
    }
}

fn require_two_spins(system: &SpinSystem) -> Result<()> {
    match system.n_spins() {
        2 => Ok(()),
        found => Err(Error::WrongSpinCount {
            scheme: "two-qubit gate",
            required: 2,
            found,
        }),
    }
}

pub fn named_transition(system: &SpinSystem, line: LineName) -> Result<Transition> {
    require_two_spins(system)?;
    let (a, b) = line.levels();
    Transition::between(system, a, b)
}

fn pulses(system: &SpinSystem, lines: &[LineName]) -> Result<Vec<PulseEvent>> {
    lines
        .iter()
        .map(|&l| named_transition(system, l).map(PulseEvent::pi_x))
        .collect()
}

fn spin_pi(spin: usize) -> PulseEvent {
    PulseEvent::new(PulseTarget::Spin(spin), PI, PHASE_X).expect("π is in range")
}

fn compile_named(system: &SpinSystem, g: Gate) -> Result<Vec<PulseEvent>> {
    use LineName::*;
    Ok(match g {
        Gate::Swap => compile_mq_inversion(system, &Transition::between(system, 1, 2)?)?.events,
        Gate::Xor1 => pulses(system, &[X1])?,
        Gate::Xor2 => pulses(system, &[A1])?,
        Gate::Xnor1 => pulses(system, &[X2])?,
        Gate::Xnor2 => pulses(system, &[A2])?,
        Gate::Not1 => vec![spin_pi(0)],
        Gate::Not2 => vec![spin_pi(1)],
        Gate::SwapXor => pulses(system, &[X1, A1])?,
        Gate::SwapXnor => pulses(system, &[X2, A2])?,
        Gate::XorSwapNot => pulses(system, &[A1, X2])?,
        Gate::XnorSwapNot => pulses(system, &[X2, A1])?,
        Gate::NotSwap => pulses(system, &[A1, X2, A1])?,
        Gate::SwapDemo => {
            let mut e = pulses(system, &[A1])?;
            e.extend(compile_named(system, Gate::Swap)?);
            e
        }
    })
}

/// Pulse program in time order.
pub fn compile_gate(system: &SpinSystem, spec: &GateSpec) -> Result<PulseSequence> {
    require_two_spins(system)?;
    let events = match spec {
        GateSpec::Named(g) => compile_named(system, *g)?,
        GateSpec::Product(gs) => {
            let mut events = Vec::new();
            for g in gs.iter().rev() {
                events.extend(compile_named(system, *g)?);
            }
            events
        }
    };
    Ok(PulseSequence::new(&spec.name(), events))
}

/// Row phases `d` with `U_seq = diag(d) · U_ideal`, plus the shared permutation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseEquivalence {
    pub phases: Vec<C64>,
    pub permutation: Vec<usize>,
}

pub fn phase_equivalence(u_seq: &CMatrix, u_ideal: &CMatrix) -> Result<PhaseEquivalence> {
    const TOL: f64 = 1e-10;
    if u_seq.shape() != u_ideal.shape() {
        return Err(Error::DimensionMismatch {
            expected: u_ideal.nrows(),
            found: u_seq.nrows(),
        });
    }
    let seq = linalg::monomial_permutation(u_seq, TOL)
        .ok_or_else(|| Error::PhaseMismatch("sequence propagator is not monomial".into()))?;
    let ideal = linalg::monomial_permutation(u_ideal, TOL)
        .ok_or_else(|| Error::PhaseMismatch("target is not monomial".into()))?;
    if seq != ideal {
        let rows: Vec<String> = (0..seq.len())
            .filter(|&j| seq[j] != ideal[j])
            .map(|j| format!("|{j}⟩→|{}⟩ (want |{}⟩)", seq[j], ideal[j]))
            .collect();
        return Err(Error::PhaseMismatch(format!(
            "permutations differ: {}",
            rows.join(", ")
        )));
    }
    let mut phases = vec![C64::new(0.0, 0.0); seq.len()];
    for (j, &i) in seq.iter().enumerate() {
        let d = u_seq[(i, j)] / u_ideal[(i, j)];
        if (d.norm() - 1.0).abs() > TOL {
            return Err(Error::PhaseMismatch(format!("row {i} has modulus {}", d.norm())));
        }
        phases[i] = d;
    }
    Ok(PhaseEquivalence {
        phases,
        permutation: seq,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialState {
    Thermal,
    /// Pure-state pattern on one basis state.
    PseudoPure(usize),
    Custom(DensityMatrix),
}

impl InitialState {
    pub fn density(&self, system: &SpinSystem) -> Result<DensityMatrix> {
        match self {
            InitialState::Thermal => Ok(thermal_deviation(system)),
            InitialState::PseudoPure(k) => {
                if *k >= system.dim() {
                    return Err(Error::InvalidBasisState(k.to_string()));
                }
                let mut p = vec![0.0; system.dim()];
                p[*k] = 1.0;
                Ok(DensityMatrix::from_populations(&p))
            }
            InitialState::Custom(rho) => Ok(rho.clone()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GateRun {
    pub sequence: PulseSequence,
    pub rho: DensityMatrix,
    pub spectrum: StickSpectrum,
}

/// Applies the compiled program (ideal, or a pre-realized sequence via
/// `sequence`) and reads the result with a y pulse of `read_angle`.
pub fn run_gate(
    system: &SpinSystem,
    spec: &GateSpec,
    initial: &InitialState,
    read_angle: f64,
    sequence: Option<PulseSequence>,
) -> Result<GateRun> {
    let sequence = match sequence {
        Some(s) => s,
        None => compile_gate(system, spec)?,
    };
    let rho = initial
        .density(system)?
        .evolve(&sequence_propagator(system, &sequence)?)?;
    let spectrum = read_spectrum(system, &rho, read_angle, crate::pulse::PHASE_Y, None)?;
    Ok(GateRun {
        sequence,
        rho,
        spectrum,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GateCheck {
    pub gate: String,
    pub pulses: usize,
    pub permutation: Vec<usize>,
    pub phases: Option<Vec<C64>>,
    pub error: Option<String>,
}

impl GateCheck {
    pub fn passed(&self) -> bool {
        self.error.is_none()
    }
}

pub fn verify_all_gates(system: &SpinSystem) -> Result<Vec<GateCheck>> {
    verify_all_gates_with(Execution::default(), system)
}

/// Phase-equivalence of every named gate's compiled program.
pub fn verify_all_gates_with(exec: Execution, system: &SpinSystem) -> Result<Vec<GateCheck>> {
    require_two_spins(system)?;
    par::try_map(exec, &Gate::ALL, |&g| {
        let spec = GateSpec::Named(g);
        let seq = compile_gate(system, &spec)?;
        let ideal = ideal_gate(&spec);
        let check = match phase_equivalence(&sequence_propagator(system, &seq)?, &ideal) {
            Ok(eq) => GateCheck {
                gate: g.name().into(),
                pulses: seq.len(),
                permutation: eq.permutation,
                phases: Some(eq.phases),
                error: None,
            },
            Err(e) => GateCheck {
                gate: g.name().into(),
                pulses: seq.len(),
                permutation: linalg::monomial_permutation(&ideal, 1e-10).unwrap_or_default(),
                phases: None,
                error: Some(e.to_string()),
            },
        };
        Ok(check)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::builtin_molecule;

    fn coumarin() -> SpinSystem {
        builtin_molecule("coumarin").unwrap().build().unwrap()
    }

    fn perm(g: Gate) -> Vec<usize> {
        linalg::monomial_permutation(&ideal_gate_named(g), 1e-12).unwrap()
    }

    #[test]
    fn parsing() {
        assert_eq!("xor-swap-not".parse::<Gate>().unwrap(), Gate::XorSwapNot);
        assert_eq!("SWAP+XNOR".parse::<Gate>().unwrap(), Gate::SwapXnor);
        assert_eq!("swap-demo".parse::<Gate>().unwrap(), Gate::SwapDemo);
        assert!("toffoli".parse::<Gate>().is_err());
        let p: GateSpec = "NOT1*SWAP*XOR1".parse().unwrap();
        assert_eq!(ideal_gate(&p), ideal_gate_named(Gate::XorSwapNot));
    }

    #[test]
    fn involutions() {
        for g in [Gate::Swap, Gate::Not1, Gate::Xor1] {
            let spec = GateSpec::Product(vec![g, g]);
            assert_eq!(ideal_gate(&spec), linalg::identity(4));
        }
    }

    #[test]
    fn xor1_acts_on_truth_table() {
        // |10⟩ → |11⟩
        assert_eq!(perm(Gate::Xor1)[2], 2);
        assert_eq!(perm(Gate::Xor1)[1], 3);
    }

    #[test]
    fn every_gate_compiles_equivalently() {
        let checks = verify_all_gates(&coumarin()).unwrap();
        assert_eq!(checks.len(), Gate::ALL.len());
        for c in checks {
            assert!(c.passed(), "{}: {:?}", c.gate, c.error);
        }
    }

    #[test]
    fn mismatch_names_rows() {
        let sys = coumarin();
        let u = sequence_propagator(&sys, &compile_gate(&sys, &Gate::Swap.into()).unwrap()).unwrap();
        let err = phase_equivalence(&u, &ideal_gate_named(Gate::Xor1)).unwrap_err();
        assert!(err.to_string().contains("permutations differ"));
    }

    #[test]
    fn not_swap_on_thermal_reverses_populations() {
        let sys = coumarin();
        let run = run_gate(&sys, &Gate::NotSwap.into(), &InitialState::Thermal, 0.1, None).unwrap();
        let p = run.rho.populations();
        for (a, b) in p.iter().zip([-1.0, 0.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn three_spin_system_rejected() {
        let sys = builtin_molecule("benzofurazan").unwrap().build().unwrap();
        assert!(matches!(
            compile_gate(&sys, &Gate::Swap.into()),
            Err(Error::WrongSpinCount { .. })
        ));
    }
}
