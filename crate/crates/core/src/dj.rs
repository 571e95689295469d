//! Deutsch-Jozsa with selective π pulses on one- and two-bit oracles.
//!
//! One spin is pulsed: its transitions are selected by the states of the
//! other spins, which carry the input `x` (or `x, y`). The pulsed spin holds
//! the output bit. For balanced oracles the lines of the unpulsed spins are
//! carried into multiple-quantum coherence or cancelled by the phase cycle.
//!
//! | inputs | pulsed spin | input spins | suppressed (target) spins |
//! |--------|-------------|-------------|---------------------------|
//! | 1      | 1           | 0           | 0                         |
//! | 2      | 0           | 1, 2        | 1, 2                      |

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::par::{self, Execution};
use crate::pulse::{
    phase_cycle, sequence_propagator, PulseEvent, PulseSequence, PulseTarget, PHASE_X, PHASE_Y, XY_CYCLE,
};
use crate::spectrum::{multiplet_integrals, read_spectrum, StickSpectrum};
use crate::spin::{thermal_deviation, BasisState, SpinSystem, Transition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionClass {
    Constant,
    Balanced,
}

impl fmt::Display for FunctionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FunctionClass::Constant => "constant",
            FunctionClass::Balanced => "balanced",
        })
    }
}

/// Truth table over inputs in counting order (`x` most significant).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleFunction {
    pub name: String,
    pub n_inputs: usize,
    pub table: Vec<bool>,
}

impl OracleFunction {
    pub fn new(name: &str, n_inputs: usize, table: &[u8]) -> Result<Self> {
        if !(1..=2).contains(&n_inputs) || table.len() != 1 << n_inputs || table.iter().any(|&b| b > 1) {
            return Err(Error::Config(format!(
                "`{name}` needs a 0/1 table of length 2^{n_inputs}"
            )));
        }
        let f = Self {
            name: name.to_string(),
            n_inputs,
            table: table.iter().map(|&b| b == 1).collect(),
        };
        f.class()?;
        Ok(f)
    }

    pub fn class(&self) -> Result<FunctionClass> {
        let ones = self.table.iter().filter(|&&b| b).count();
        match ones {
            0 => Ok(FunctionClass::Constant),
            n if n == self.table.len() => Ok(FunctionClass::Constant),
            n if 2 * n == self.table.len() => Ok(FunctionClass::Balanced),
            _ => Err(Error::NotConstantOrBalanced),
        }
    }

    pub fn complement(&self) -> Self {
        Self {
            name: format!("not-{}", self.name),
            n_inputs: self.n_inputs,
            table: self.table.iter().map(|b| !b).collect(),
        }
    }

    pub fn table_string(&self) -> String {
        self.table.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

/// The four one-bit and eight two-bit functions, named `f1`, `f2`, … .
pub fn named_functions(n_inputs: usize) -> Result<Vec<OracleFunction>> {
    let tables: &[[u8; 4]] = match n_inputs {
        1 => &[[0, 0, 0, 0], [1, 1, 0, 0], [0, 1, 0, 0], [1, 0, 0, 0]],
        2 => &[
            [0, 0, 0, 0],
            [1, 1, 1, 1],
            [0, 0, 1, 1],
            [1, 1, 0, 0],
            [1, 0, 1, 0],
            [0, 1, 0, 1],
            [1, 0, 0, 1],
            [0, 1, 1, 0],
        ],
        n => return Err(Error::Config(format!("{n}-bit functions are not supported"))),
    };
    let len = 1 << n_inputs;
    tables
        .iter()
        .enumerate()
        .map(|(i, t)| OracleFunction::new(&format!("f{}", i + 1), n_inputs, &t[..len]))
        .collect()
}

pub fn function_by_name(n_inputs: usize, name: &str) -> Result<OracleFunction> {
    named_functions(n_inputs)?
        .into_iter()
        .find(|f| f.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::UnknownFunction(name.to_string()))
}

/// `|x⟩|z⟩ → |x⟩|z ⊕ f(x)⟩` in logical order, output bit least significant.
pub fn uf_matrix(f: &OracleFunction) -> CMatrix {
    let perm: Vec<usize> = (0..2usize << f.n_inputs)
        .map(|idx| {
            let x = idx >> 1;
            idx ^ usize::from(f.table[x])
        })
        .collect();
    linalg::permutation_matrix(&perm)
}

/// Spin roles for an `n_inputs`-bit run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DjLayout {
    pub pulsed: usize,
    /// Spins carrying the input bits, most significant first.
    pub inputs: Vec<usize>,
    pub targets: Vec<usize>,
}

impl DjLayout {
    pub fn for_inputs(n_inputs: usize) -> Result<Self> {
        match n_inputs {
            1 => Ok(Self {
                pulsed: 1,
                inputs: vec![0],
                targets: vec![0],
            }),
            2 => Ok(Self {
                pulsed: 0,
                inputs: vec![1, 2],
                targets: vec![1, 2],
            }),
            n => Err(Error::Config(format!("{n}-bit functions are not supported"))),
        }
    }

    /// Physical basis index for logical inputs `x` and output bit `z`.
    fn physical(&self, n_spins: usize, x: usize, z: bool) -> usize {
        let mut up = vec![true; n_spins];
        let k = self.inputs.len();
        for (i, &spin) in self.inputs.iter().enumerate() {
            up[spin] = (x >> (k - 1 - i)) & 1 == 0;
        }
        up[self.pulsed] = !z;
        BasisState::from_orientations(&up).index
    }

    /// `U_f` with logical qubits placed on their spins.
    pub fn physical_uf(&self, f: &OracleFunction, n_spins: usize) -> CMatrix {
        let dim = 1 << n_spins;
        let mut perm = vec![0; dim];
        for x in 0..1 << f.n_inputs {
            for z in [false, true] {
                perm[self.physical(n_spins, x, z)] = self.physical(n_spins, x, z ^ f.table[x]);
            }
        }
        linalg::permutation_matrix(&perm)
    }
}

fn check_system(system: &SpinSystem, f: &OracleFunction) -> Result<DjLayout> {
    let required = f.n_inputs + 1;
    if system.n_spins() != required {
        return Err(Error::WrongSpinCount {
            scheme: "Deutsch-Jozsa",
            required,
            found: system.n_spins(),
        });
    }
    f.class()?;
    DjLayout::for_inputs(f.n_inputs)
}

/// Oracle pulses only: nothing, a spin-selective π on the pulsed spin, or π
/// pulses on the pulsed spin's lines whose input state has `f = 1`.
pub fn oracle_sequence(system: &SpinSystem, f: &OracleFunction) -> Result<PulseSequence> {
    let layout = check_system(system, f)?;
    let n = system.n_spins();
    let events = if f.table.iter().all(|&b| !b) {
        Vec::new()
    } else if f.table.iter().all(|&b| b) {
        vec![PulseEvent::new(PulseTarget::Spin(layout.pulsed), PI, PHASE_X)?]
    } else {
        (0..f.table.len())
            .filter(|&x| f.table[x])
            .map(|x| {
                let from = layout.physical(n, x, false);
                let to = layout.physical(n, x, true);
                Transition::between(system, from, to).map(PulseEvent::pi_x)
            })
            .collect::<Result<_>>()?
    };
    Ok(PulseSequence::new(&format!("oracle {}", f.name), events))
}

/// `[π/2]_y` on every spin followed by the oracle pulses.
pub fn compile_dj(system: &SpinSystem, f: &OracleFunction) -> Result<PulseSequence> {
    let oracle = oracle_sequence(system, f)?;
    let mut events = vec![PulseEvent::new(PulseTarget::All, FRAC_PI_2, PHASE_Y)?];
    events.extend(oracle.events);
    Ok(PulseSequence::new(&format!("dj {}", f.name), events))
}

/// Permutation of basis states produced by the oracle pulses, next to the
/// one required by `U_f`.
pub fn oracle_permutations(system: &SpinSystem, f: &OracleFunction) -> Result<(Vec<usize>, Vec<usize>)> {
    let layout = check_system(system, f)?;
    let u = sequence_propagator(system, &oracle_sequence(system, f)?)?;
    let pulses = linalg::monomial_permutation(&u, 1e-12)
        .ok_or_else(|| Error::PhaseMismatch(format!("oracle {} is not monomial", f.name)))?;
    let ideal = linalg::monomial_permutation(&layout.physical_uf(f, system.n_spins()), 0.5).expect("permutation");
    Ok((pulses, ideal))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub class: FunctionClass,
    /// Per target spin: `(label, |amplitude| integral, integral of the reference)`.
    pub integrals: Vec<(String, f64, f64)>,
    /// Smallest integral-to-reference ratio over the target spins (≥ 1e-300).
    pub ratio: f64,
    /// Factor by which the decision clears the threshold (≥ 1).
    pub margin: f64,
}

pub const ABSOLUTE_THRESHOLD: f64 = 1e-8;
pub const RELATIVE_THRESHOLD: f64 = 1e-6;

/// Balanced iff some target multiplet has vanished, absolutely or relative
/// to the same spin's multiplet in `reference` (the do-nothing run).
pub fn classify(
    spectrum: &StickSpectrum,
    system: &SpinSystem,
    target_spins: &[usize],
    reference: &StickSpectrum,
) -> Classification {
    let integrals: Vec<(String, f64, f64)> = target_spins
        .iter()
        .map(|&k| {
            let label = &system.spin(k).label;
            (
                label.clone(),
                multiplet_integrals(spectrum, label).total,
                multiplet_integrals(reference, label).total,
            )
        })
        .collect();
    let suppressed = |&(_, v, r): &(String, f64, f64)| v < ABSOLUTE_THRESHOLD || v < RELATIVE_THRESHOLD * r;
    let ratio = integrals
        .iter()
        .map(|(_, v, r)| if *r > 0.0 { v / r } else { 0.0 })
        .fold(f64::INFINITY, f64::min)
        .max(1e-300);
    let (class, margin) = if integrals.iter().any(suppressed) {
        (FunctionClass::Balanced, (RELATIVE_THRESHOLD / ratio).max(1.0))
    } else {
        (FunctionClass::Constant, (ratio / RELATIVE_THRESHOLD).max(1.0))
    };
    Classification {
        class,
        integrals,
        ratio,
        margin,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DjResult {
    pub function: String,
    pub table: String,
    pub class: FunctionClass,
    pub expected: FunctionClass,
    pub margin: f64,
    pub classification: Classification,
    /// Number of phase-cycle steps averaged.
    pub cycle_steps: usize,
    /// Largest |Im| over all lines of the averaged spectrum.
    pub dispersive_residual: f64,
    pub spectrum: StickSpectrum,
}

impl DjResult {
    pub fn correct(&self) -> bool {
        self.class == self.expected
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DjOptions {
    /// Extra read pulse (y) after the oracle; 0 acquires directly.
    pub read_angle: f64,
    pub cycle: bool,
}

impl Default for DjOptions {
    fn default() -> Self {
        Self {
            read_angle: 0.0,
            cycle: true,
        }
    }
}

/// Spectrum averaged over the phase cycle for a compiled program.
pub fn dj_spectrum_with(
    exec: Execution,
    system: &SpinSystem,
    program: &PulseSequence,
    opts: DjOptions,
) -> Result<(StickSpectrum, usize)> {
    let variants = if opts.cycle {
        match phase_cycle(program, &XY_CYCLE) {
            Ok(v) => v,
            Err(Error::NothingToCycle) => vec![program.clone()],
            Err(e) => return Err(e),
        }
    } else {
        vec![program.clone()]
    };
    let thermal = thermal_deviation(system);
    let spectra = par::try_map(exec, &variants, |seq| {
        let rho = thermal.evolve(&sequence_propagator(system, seq)?)?;
        read_spectrum(system, &rho, opts.read_angle, PHASE_Y, None)
    })?;
    Ok((StickSpectrum::average(&spectra)?, variants.len()))
}

pub fn run_dj(system: &SpinSystem, f: &OracleFunction, opts: DjOptions) -> Result<DjResult> {
    run_dj_with(Execution::default(), system, f, opts)
}

pub fn run_dj_with(exec: Execution, system: &SpinSystem, f: &OracleFunction, opts: DjOptions) -> Result<DjResult> {
    let layout = check_system(system, f)?;
    let reference_fn = function_by_name(f.n_inputs, "f1")?;
    let (reference, _) = dj_spectrum_with(exec, system, &compile_dj(system, &reference_fn)?, opts)?;
    let (spectrum, cycle_steps) = dj_spectrum_with(exec, system, &compile_dj(system, f)?, opts)?;
    let classification = classify(&spectrum, system, &layout.targets, &reference);
    Ok(DjResult {
        function: f.name.clone(),
        table: f.table_string(),
        class: classification.class,
        expected: f.class()?,
        margin: classification.margin,
        dispersive_residual: spectrum.lines.iter().map(|l| l.amplitude.im.abs()).fold(0.0, f64::max),
        classification,
        cycle_steps,
        spectrum,
    })
}

/// Every named function for the system's size.
pub fn run_all_with(exec: Execution, system: &SpinSystem, opts: DjOptions) -> Result<Vec<DjResult>> {
    let n_inputs = system.n_spins().saturating_sub(1);
    let functions = named_functions(n_inputs)?;
    par::try_map(exec, &functions, |f| {
        run_dj_with(Execution::Sequential, system, f, opts)
    })
}
