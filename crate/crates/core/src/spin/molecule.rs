use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::system::{Spin, SpinSystem};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinConfig {
    pub label: String,
    pub channel: String,
    pub shift_ppm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingConfig {
    pub a: String,
    pub b: String,
    pub j_hz: f64,
}

/// On-disk molecule description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoleculeConfig {
    pub name: String,
    /// Base frequency in MHz per channel.
    pub spectrometer: BTreeMap<String, f64>,
    pub spins: Vec<SpinConfig>,
    #[serde(default)]
    pub couplings: Vec<CouplingConfig>,
    #[serde(default)]
    pub strong_coupling: bool,
    /// Fields whose values are placeholders rather than measured data.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub placeholder_fields: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl MoleculeConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<SpinSystem> {
        let spins = self
            .spins
            .iter()
            .map(|s| Spin::new(&s.label, &s.channel, s.shift_ppm).with_weight(s.weight.unwrap_or(1.0)))
            .collect();
        let couplings: Vec<(&str, &str, f64)> = self
            .couplings
            .iter()
            .map(|c| (c.a.as_str(), c.b.as_str(), c.j_hz))
            .collect();
        SpinSystem::new(
            &self.name,
            spins,
            &couplings,
            self.spectrometer.clone(),
            self.strong_coupling,
        )
    }
}

const BUILTIN: [(&str, &str); 4] = [
    (
        "benzofurazan-3spin",
        include_str!("../../molecules/benzofurazan-3spin.json"),
    ),
    ("coumarin-2spin", include_str!("../../molecules/coumarin-2spin.json")),
    (
        "dibromopropionic-3spin",
        include_str!("../../molecules/dibromopropionic-3spin.json"),
    ),
    (
        "nitrofuraldehyde-2spin",
        include_str!("../../molecules/nitrofuraldehyde-2spin.json"),
    ),
];

pub fn builtin_names() -> Vec<&'static str> {
    BUILTIN.iter().map(|(n, _)| *n).collect()
}

/// Shipped molecule by full name or unambiguous prefix (`"coumarin"`).
pub fn builtin_molecule(name: &str) -> Result<MoleculeConfig> {
    let exact = BUILTIN.iter().find(|(n, _)| *n == name);
    let hit = match exact {
        Some(hit) => Some(hit),
        None => {
            let mut prefixed = BUILTIN.iter().filter(|(n, _)| n.starts_with(name));
            match (prefixed.next(), prefixed.next()) {
                (Some(hit), None) if !name.is_empty() => Some(hit),
                _ => None,
            }
        }
    };
    match hit {
        Some((_, text)) => MoleculeConfig::from_json(text),
        None => Err(Error::Config(format!("unknown molecule '{name}'"))),
    }
}

/// Resolves `spec` as a file path, then inside `SPINSEL_MOLECULE_DIR`, then
/// against the shipped library.
pub fn load_molecule(spec: &str) -> Result<MoleculeConfig> {
    let direct = Path::new(spec);
    if direct.is_file() {
        return read_file(direct);
    }
    if let Some(dir) = std::env::var_os("SPINSEL_MOLECULE_DIR") {
        let dir = PathBuf::from(dir);
        for candidate in [dir.join(spec), dir.join(format!("{spec}.json"))] {
            if candidate.is_file() {
                return read_file(&candidate);
            }
        }
    }
    let looks_like_path = spec.ends_with(".json") || spec.contains('/') || spec.contains('\\');
    if looks_like_path {
        return read_file(direct);
    }
    builtin_molecule(spec)
}

fn read_file(path: &Path) -> Result<MoleculeConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    MoleculeConfig::from_json(&text)
}
