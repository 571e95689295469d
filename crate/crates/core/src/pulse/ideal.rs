use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::spin::{SpinSystem, Transition};

fn check_angle(angle: f64) -> Result<()> {
    if (0.0..=TAU + 1e-12).contains(&angle) {
        Ok(())
    } else {
        Err(Error::AngleOutOfRange(angle))
    }
}

/// `exp(+iθ(cos φ σ_x + sin φ σ_y)/2)` on one two-level subspace.
pub fn rotation_2x2(angle: f64, phase: f64) -> [[C64; 2]; 2] {
    let c = C64::new((angle / 2.0).cos(), 0.0);
    let s = (angle / 2.0).sin();
    [
        [c, C64::new(0.0, s) * C64::from_polar(1.0, -phase)],
        [C64::new(0.0, s) * C64::from_polar(1.0, phase), c],
    ]
}

/// Rotation confined to the two levels of a single-quantum transition,
/// identity elsewhere.
pub fn ideal_transition_pulse(system: &SpinSystem, t: &Transition, angle: f64, phase: f64) -> Result<CMatrix> {
    if !t.is_single_quantum() {
        return Err(Error::NotSingleQuantum(t.order.name()));
    }
    check_angle(angle)?;
    let (a, b) = t.levels();
    let r = rotation_2x2(angle, phase);
    let mut u = linalg::identity(system.dim());
    u[(a, a)] = r[0][0];
    u[(a, b)] = r[0][1];
    u[(b, a)] = r[1][0];
    u[(b, b)] = r[1][1];
    Ok(u)
}

fn rotate_spins(n_spins: usize, spins: &[usize], angle: f64, phase: f64) -> CMatrix {
    let r = rotation_2x2(angle, phase);
    let r = CMatrix::from_fn(2, 2, |i, j| r[i][j]);
    let one = linalg::identity(2);
    (0..n_spins).fold(linalg::identity(1), |acc, k| {
        acc.kronecker(if spins.contains(&k) { &r } else { &one })
    })
}

/// Rotation of one spin regardless of its partners' states.
pub fn ideal_spin_pulse(system: &SpinSystem, spin: usize, angle: f64, phase: f64) -> Result<CMatrix> {
    if spin >= system.n_spins() {
        return Err(Error::UnknownSpin(spin.to_string()));
    }
    check_angle(angle)?;
    Ok(rotate_spins(system.n_spins(), &[spin], angle, phase))
}

/// Hard pulse on every spin of `channel`, or on every spin when `None`.
pub fn nonselective_pulse(system: &SpinSystem, channel: Option<&str>, angle: f64, phase: f64) -> Result<CMatrix> {
    check_angle(angle)?;
    let spins = match channel {
        Some(c) => system.spins_on_channel(c)?,
        None => (0..system.n_spins()).collect(),
    };
    Ok(rotate_spins(system.n_spins(), &spins, angle, phase))
}
