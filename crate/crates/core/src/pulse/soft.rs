//! Rectangular low-power pulses integrated numerically.
//!
//! Each channel is viewed in a frame rotating at the mean frequency of its
//! spins. An rf carrier away from that centre shows up as a field rotating at
//! `ω = 2π(carrier − centre)`, so `H(t) = P(ωt)(D + V)P(ωt)†` with
//! `P(θ) = exp(−iθ F_z)`. The propagator is a product of piecewise-constant
//! steps sampled at step midpoints.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{PulseEvent, PulseTarget, Realization};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::par::{self, Execution};
use crate::spin::{hamiltonian, m_of, single_spin_operator, thermal_deviation, Axis, SpinSystem, Transition};

pub const DEFAULT_MIN_STEPS: usize = 2048;
/// Largest `‖H‖·dt` accepted for a step, in radians.
pub const MAX_STEP_PHASE: f64 = 0.1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoftPulse {
    pub b1_hz: f64,
    pub duration_s: f64,
    /// Absolute carrier frequency in Hz, on the same scale as spin frequencies.
    pub carrier_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt_s: Option<f64>,
}

impl SoftPulse {
    /// Duration `angle/(2π b1)`, carrier on the targeted line, spin or channel centre.
    pub fn calibrated(system: &SpinSystem, target: &PulseTarget, angle: f64, b1_hz: f64) -> Result<Self> {
        if !(b1_hz > 0.0 && b1_hz.is_finite()) {
            return Err(Error::SoftPulse(format!("b1 must be positive, got {b1_hz}")));
        }
        let carrier_hz = match target {
            PulseTarget::Transition(t) => t.frequency_hz,
            PulseTarget::Spin(k) => system.frequency_hz(*k),
            PulseTarget::Channel(_) | PulseTarget::All => channel_centre(system, &irradiated_channel(system, target)?),
        };
        Ok(Self {
            b1_hz,
            duration_s: angle / (TAU * b1_hz),
            carrier_hz,
            dt_s: None,
        })
    }
}

fn irradiated_channel(system: &SpinSystem, target: &PulseTarget) -> Result<String> {
    match target {
        PulseTarget::Transition(t) => Ok(system.spin(t.active_spins[0]).channel.clone()),
        PulseTarget::Spin(k) => Ok(system.spin(*k).channel.clone()),
        PulseTarget::Channel(c) => {
            system.spins_on_channel(c)?;
            Ok(c.clone())
        }
        PulseTarget::All => match system.channels().as_slice() {
            [only] => Ok(only.clone()),
            _ => Err(Error::SoftPulse(
                "a soft pulse irradiates one channel; name it explicitly".into(),
            )),
        },
    }
}

fn channel_centre(system: &SpinSystem, channel: &str) -> f64 {
    let spins = system.spins_on_channel(channel).unwrap_or_default();
    spins.iter().map(|&k| system.frequency_hz(k)).sum::<f64>() / spins.len().max(1) as f64
}

/// Total `F_z` of a set of spins, per basis state.
fn fz_diagonal(system: &SpinSystem, spins: &[usize]) -> Vec<f64> {
    let n = system.n_spins();
    (0..system.dim())
        .map(|a| spins.iter().map(|&k| m_of(a, n, k)).sum())
        .collect()
}

struct Setup {
    /// `D + V` in the channel-centred frames.
    generator: CMatrix,
    fz: Vec<f64>,
    omega: f64,
    duration: f64,
    norm: f64,
}

fn setup(system: &SpinSystem, event: &PulseEvent) -> Result<(Setup, Option<f64>)> {
    let Realization::Soft(p) = &event.realization else {
        return Err(Error::SoftPulse("event has an ideal realization".into()));
    };
    if !(p.duration_s > 0.0 && p.duration_s.is_finite()) {
        return Err(Error::SoftPulse(format!(
            "duration must be positive, got {}",
            p.duration_s
        )));
    }
    if !(p.b1_hz >= 0.0 && p.b1_hz.is_finite()) {
        return Err(Error::SoftPulse(format!("b1 must be non-negative, got {}", p.b1_hz)));
    }
    let channel = irradiated_channel(system, &event.target)?;
    let irradiated = system.spins_on_channel(&channel)?;
    let centre = channel_centre(system, &channel);

    let mut d = hamiltonian(system);
    for c in system.channels() {
        let nu = channel_centre(system, &c);
        let fz = fz_diagonal(system, &system.spins_on_channel(&c)?);
        for (a, f) in fz.iter().enumerate() {
            d[(a, a)] -= C64::new(TAU * nu * f, 0.0);
        }
    }
    let d_norm = if system.strong_coupling() {
        d.clone()
            .symmetric_eigenvalues()
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    } else {
        (0..d.nrows()).fold(0.0f64, |m, a| m.max(d[(a, a)].re.abs()))
    };

    let n = system.n_spins();
    let w1 = TAU * p.b1_hz;
    let mut v = CMatrix::zeros(system.dim(), system.dim());
    for &k in &irradiated {
        // −ω1 (I_x cos φ + I_y sin φ), so exp(−iVT) matches the ideal convention.
        let ix = single_spin_operator(n, k, Axis::X);
        let iy = single_spin_operator(n, k, Axis::Y);
        v -= ix * C64::new(w1 * event.phase.cos(), 0.0) + iy * C64::new(w1 * event.phase.sin(), 0.0);
    }
    let setup = Setup {
        generator: d + v,
        fz: fz_diagonal(system, &irradiated),
        omega: TAU * (p.carrier_hz - centre),
        duration: p.duration_s,
        norm: d_norm + w1 * irradiated.len() as f64 / 2.0,
    };
    Ok((setup, p.dt_s))
}

fn default_steps(s: &Setup) -> usize {
    DEFAULT_MIN_STEPS.max((s.norm * s.duration / MAX_STEP_PHASE).ceil() as usize)
}

fn phase_diag(fz: &[f64], theta: f64) -> Vec<C64> {
    fz.iter().map(|f| C64::from_polar(1.0, -theta * f)).collect()
}

/// `diag(l) · m · diag(r)`
fn scale_rows_cols(l: &[C64], m: &CMatrix, r: &[C64]) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| l[i] * m[(i, j)] * r[j])
}

fn matrix_power(m: &CMatrix, mut k: usize) -> CMatrix {
    let mut result = linalg::identity(m.nrows());
    let mut base = m.clone();
    while k > 0 {
        if k & 1 == 1 {
            result = &result * &base;
        }
        k >>= 1;
        if k > 0 {
            base = &base * &base;
        }
    }
    result
}

/// `Π_j P(θ_j) M P(θ_j)†` with `θ_j = ω(j + ½)dt`. Consecutive frame factors
/// collapse to `P(−ω dt)`, so the product is `P_last (M Q)^(n−1) M P_0†`.
fn propagate(s: &Setup, steps: usize) -> CMatrix {
    let dt = s.duration / steps as f64;
    let m = (&s.generator * C64::new(0.0, -dt)).exp();
    let first = phase_diag(&s.fz, s.omega * 0.5 * dt);
    let last = phase_diag(&s.fz, s.omega * (steps as f64 - 0.5) * dt);
    let q = phase_diag(&s.fz, -s.omega * dt);
    let ones = vec![C64::new(1.0, 0.0); s.fz.len()];
    let mq = scale_rows_cols(&ones, &m, &q);
    let inner = matrix_power(&mq, steps - 1) * m;
    let p0_dag: Vec<C64> = first.iter().map(|z| z.conj()).collect();
    scale_rows_cols(&last, &inner, &p0_dag)
}

/// Propagator of a soft event over its full duration.
pub fn soft_pulse_propagator(system: &SpinSystem, event: &PulseEvent) -> Result<CMatrix> {
    let (s, dt) = setup(system, event)?;
    let steps = match dt {
        Some(dt) => {
            if dt.is_nan() || dt <= 0.0 {
                return Err(Error::SoftPulse(format!("dt must be positive, got {dt}")));
            }
            let product = s.norm * dt;
            if product > MAX_STEP_PHASE {
                return Err(Error::StepTooLarge { dt, product });
            }
            ((s.duration / dt) - 1e-9).ceil().max(1.0) as usize
        }
        None => default_steps(&s),
    };
    Ok(propagate(&s, steps))
}

/// Step-halving study: propagators at `n`, `2n` and `4n` steps.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub steps: [usize; 3],
    /// Max-abs change from `n` to `2n` and from `2n` to `4n`.
    pub changes: [f64; 2],
    /// `changes[1] / changes[0]`; about 0.25 for the midpoint scheme.
    pub ratio: f64,
    /// Richardson estimate of the remaining error at `4n` steps.
    pub residual_estimate: f64,
}

pub fn soft_convergence(
    system: &SpinSystem,
    event: &PulseEvent,
    base_steps: Option<usize>,
) -> Result<ConvergenceReport> {
    soft_convergence_with(Execution::default(), system, event, base_steps)
}

pub fn soft_convergence_with(
    exec: Execution,
    system: &SpinSystem,
    event: &PulseEvent,
    base_steps: Option<usize>,
) -> Result<ConvergenceReport> {
    let (s, _) = setup(system, event)?;
    let n = base_steps.unwrap_or_else(|| default_steps(&s)).max(1);
    let steps = [n, 2 * n, 4 * n];
    let us = par::map(exec, &steps, |&k| propagate(&s, k));
    let changes = [
        linalg::max_abs_diff(&us[0], &us[1]),
        linalg::max_abs_diff(&us[1], &us[2]),
    ];
    let ratio = changes[1] / changes[0];
    Ok(ConvergenceReport {
        steps,
        changes,
        ratio,
        residual_estimate: changes[1] * ratio / (1.0 - ratio).max(f64::EPSILON),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Fidelity {
    /// `|ρ'_rr − ρ_ss| + |ρ'_ss − ρ_rr|` on the target levels.
    pub swap_error: f64,
    /// Largest change of any other population.
    pub leakage: f64,
}

/// Compares what `event` does to the thermal populations with an exact
/// inversion of `ideal`.
pub fn pulse_fidelity(system: &SpinSystem, event: &PulseEvent, ideal: &Transition) -> Result<Fidelity> {
    if !ideal.is_single_quantum() {
        return Err(Error::NotSingleQuantum(ideal.order.name()));
    }
    let rho = thermal_deviation(system);
    let before = rho.populations();
    let after = rho.evolve(&event.propagator(system)?)?.populations();
    let (r, s) = ideal.levels();
    let swap_error = (after[r] - before[s]).abs() + (after[s] - before[r]).abs();
    let leakage = (0..before.len())
        .filter(|&i| i != r && i != s)
        .map(|i| (after[i] - before[i]).abs())
        .fold(0.0, f64::max);
    Ok(Fidelity { swap_error, leakage })
}

/// Soft pulses of fixed flip angle on `target` for each amplitude in `b1s`.
pub fn fidelity_sweep(
    system: &SpinSystem,
    target: &Transition,
    angle: f64,
    b1s: &[f64],
) -> Result<Vec<(f64, Fidelity)>> {
    fidelity_sweep_with(Execution::default(), system, target, angle, b1s)
}

pub fn fidelity_sweep_with(
    exec: Execution,
    system: &SpinSystem,
    target: &Transition,
    angle: f64,
    b1s: &[f64],
) -> Result<Vec<(f64, Fidelity)>> {
    par::try_map(exec, b1s, |&b1| {
        let t = PulseTarget::Transition(target.clone());
        let soft = SoftPulse::calibrated(system, &t, angle, b1)?;
        let event = PulseEvent::new(t, angle, 0.0)?.with_realization(Realization::Soft(soft));
        Ok((b1, pulse_fidelity(system, &event, target)?))
    })
}
