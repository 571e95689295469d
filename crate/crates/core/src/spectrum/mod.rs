//! Readout: detection pulse, stick spectra, multiplet integrals and the
//! flip-angle dependence of product-operator observables.
//!
//! A line's amplitude is `−⟨lower|ρ'|upper⟩` in the eigenbasis, where `lower`
//! is the level with the flipped spin ↑. Thermal magnetization read with a
//! y pulse therefore gives positive real (absorptive) lines.

mod export;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::pulse::nonselective_pulse;
use crate::spin::{list_transitions, product_operator_decompose, Axis, DensityMatrix, SpinSystem, Transition, Word};

pub use export::{export, from_json, to_csv, to_json, to_svg, ExportFormat, SvgOptions, CSV_HEADER};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StickLine {
    pub frequency_hz: f64,
    pub amplitude: C64,
    pub spin: String,
    pub transition: Transition,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StickSpectrum {
    pub lines: Vec<StickLine>,
    /// Radians.
    pub read_angle: f64,
    pub read_phase: f64,
    /// Observed channel, or `"all"` when every channel was read.
    pub channel: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

impl StickSpectrum {
    pub fn lines_of<'a>(&'a self, spin: &'a str) -> impl Iterator<Item = &'a StickLine> + 'a {
        self.lines.iter().filter(move |l| l.spin == spin)
    }

    pub fn total_magnitude(&self) -> f64 {
        self.lines.iter().map(|l| l.amplitude.norm()).sum()
    }

    /// Line-by-line mean of spectra with identical line lists.
    pub fn average(spectra: &[StickSpectrum]) -> Result<StickSpectrum> {
        let first = spectra
            .first()
            .ok_or_else(|| Error::Config("nothing to average".into()))?;
        let mut out = first.clone();
        for s in &spectra[1..] {
            if s.lines.len() != out.lines.len() {
                return Err(Error::DimensionMismatch {
                    expected: out.lines.len(),
                    found: s.lines.len(),
                });
            }
            for (acc, l) in out.lines.iter_mut().zip(&s.lines) {
                acc.amplitude += l.amplitude;
            }
        }
        let n = spectra.len() as f64;
        for l in &mut out.lines {
            l.amplitude /= n;
        }
        Ok(out)
    }

    /// Element-wise `a·self + b·other` on amplitudes.
    pub fn combine(&self, a: f64, other: &StickSpectrum, b: f64) -> StickSpectrum {
        let mut out = self.clone();
        for (l, o) in out.lines.iter_mut().zip(&other.lines) {
            l.amplitude = l.amplitude * a + o.amplitude * b;
        }
        out
    }
}

/// Applies a hard read pulse to `channel` (or separately to each channel when
/// `None`) and lists every single-quantum line of the observed spins.
pub fn read_spectrum(
    system: &SpinSystem,
    rho: &DensityMatrix,
    read_angle: f64,
    read_phase: f64,
    channel: Option<&str>,
) -> Result<StickSpectrum> {
    if rho.dim() != system.dim() {
        return Err(Error::DimensionMismatch {
            expected: system.dim(),
            found: rho.dim(),
        });
    }
    let channels = match channel {
        Some(c) => {
            system.spins_on_channel(c)?;
            vec![c.to_string()]
        }
        None => system.channels(),
    };
    let eig = system.eigenbasis();
    let transitions = list_transitions(system);
    let mut lines = Vec::new();
    for c in &channels {
        let r = nonselective_pulse(system, Some(c), read_angle, read_phase)?;
        let after = eig.to_eigen(&linalg::conjugate(&r, rho.matrix()));
        for t in transitions.iter().filter(|t| t.is_single_quantum()) {
            let spin = system.spin(t.active_spins[0]);
            if spin.channel != *c {
                continue;
            }
            let (lo, hi) = t.levels();
            lines.push(StickLine {
                frequency_hz: t.frequency_hz,
                amplitude: -after[(lo, hi)],
                spin: spin.label.clone(),
                transition: t.clone(),
            });
        }
    }
    let mut flags = Vec::new();
    if read_angle == 0.0 && lines.iter().all(|l| l.amplitude.norm() == 0.0) {
        flags.push("zero read angle on a state without coherence: empty spectrum".to_string());
    }
    Ok(StickSpectrum {
        lines,
        read_angle,
        read_phase,
        channel: channel.unwrap_or("all").to_string(),
        flags,
    })
}

/// Per-line magnitudes of one spin's multiplet, in ascending frequency.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultipletIntegral {
    pub spin: String,
    pub frequencies: Vec<f64>,
    pub magnitudes: Vec<f64>,
    pub total: f64,
}

pub fn multiplet_integrals(spectrum: &StickSpectrum, spin: &str) -> MultipletIntegral {
    let mut lines: Vec<&StickLine> = spectrum.lines_of(spin).collect();
    lines.sort_by(|a, b| a.frequency_hz.total_cmp(&b.frequency_hz));
    let magnitudes: Vec<f64> = lines.iter().map(|l| l.amplitude.norm()).collect();
    MultipletIntegral {
        spin: spin.to_string(),
        frequencies: lines.iter().map(|l| l.frequency_hz).collect(),
        total: magnitudes.iter().sum(),
        magnitudes,
    }
}

/// One product-operator observable (a single transverse factor, `j` z factors)
/// tracked across read angles and fitted to `c · sin α · cos^j α`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObservableFit {
    pub label: String,
    pub z_factors: usize,
    pub values: Vec<f64>,
    pub coefficient: f64,
    /// Largest absolute deviation from the fitted law.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlipAngleScan {
    pub angles: Vec<f64>,
    pub observables: Vec<ObservableFit>,
}

impl FlipAngleScan {
    pub fn get(&self, label: &str) -> Option<&ObservableFit> {
        self.observables.iter().find(|o| o.label == label)
    }

    pub fn max_residual(&self) -> f64 {
        self.observables.iter().map(|o| o.residual).fold(0.0, f64::max)
    }
}

/// The `n` angles 5°, 10°, …, 95° used by the default scan.
pub fn default_scan_angles() -> Vec<f64> {
    (1..=19).map(|k| (5.0 * k as f64).to_radians()).collect()
}

/// Rotates `rho` by a y pulse on all spins at each angle and fits every
/// observable that is ever non-zero.
pub fn flip_angle_scan(system: &SpinSystem, rho: &DensityMatrix, angles: &[f64]) -> Result<FlipAngleScan> {
    let labels = system.labels();
    let observable = |w: &Word| {
        let transverse = w.0.iter().filter(|a| matches!(a, Axis::X | Axis::Y)).count();
        (transverse == 1).then(|| w.0.iter().filter(|a| **a == Axis::Z).count())
    };
    let mut rows: Vec<Vec<(Word, f64)>> = Vec::with_capacity(angles.len());
    for &alpha in angles {
        let r = nonselective_pulse(system, None, alpha, crate::pulse::PHASE_Y)?;
        let exp = product_operator_decompose(system, &linalg::conjugate(&r, rho.matrix()))?;
        rows.push(
            exp.terms()
                .iter()
                .filter(|(w, _)| observable(w).is_some())
                .cloned()
                .collect(),
        );
    }
    let mut observables = Vec::new();
    let Some(first) = rows.first() else {
        return Ok(FlipAngleScan {
            angles: angles.to_vec(),
            observables,
        });
    };
    for (idx, (word, _)) in first.iter().enumerate() {
        let values: Vec<f64> = rows.iter().map(|row| row[idx].1).collect();
        if values.iter().all(|v| v.abs() < 1e-14) {
            continue;
        }
        let j = observable(word).unwrap_or(0);
        let law: Vec<f64> = angles.iter().map(|a| a.sin() * a.cos().powi(j as i32)).collect();
        let denom: f64 = law.iter().map(|f| f * f).sum();
        let coefficient = values.iter().zip(&law).map(|(v, f)| v * f).sum::<f64>() / denom;
        let residual = values
            .iter()
            .zip(&law)
            .map(|(v, f)| (v - coefficient * f).abs())
            .fold(0.0, f64::max);
        observables.push(ObservableFit {
            label: word.label(&labels),
            z_factors: j,
            values,
            coefficient,
            residual,
        });
    }
    Ok(FlipAngleScan {
        angles: angles.to_vec(),
        observables,
    })
}
