use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use super::StickSpectrum;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "frequency_hz,re,im,magnitude,spin,transition_id";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
    Svg,
}

impl ExportFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        path.extension()
            .and_then(|e| e.to_str())
            .ok_or_else(|| Error::Config(format!("cannot infer export format from {}", path.display())))?
            .parse()
    }
}

impl FromStr for ExportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            "svg" => Ok(ExportFormat::Svg),
            other => Err(Error::Config(format!("unknown export format `{other}`"))),
        }
    }
}

/// One row per line, 12 significant digits.
pub fn to_csv(spectrum: &StickSpectrum) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for l in &spectrum.lines {
        let _ = writeln!(
            out,
            "{:.11e},{:.11e},{:.11e},{:.11e},{},{}",
            l.frequency_hz,
            l.amplitude.re,
            l.amplitude.im,
            l.amplitude.norm(),
            l.spin,
            l.transition.id()
        );
    }
    out
}

pub fn to_json(spectrum: &StickSpectrum) -> Result<String> {
    Ok(serde_json::to_string_pretty(spectrum)?)
}

pub fn from_json(text: &str) -> Result<StickSpectrum> {
    Ok(serde_json::from_str(text)?)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvgOptions {
    pub width: f64,
    pub height: f64,
    /// Full width at half maximum in Hz; sticks only when `None`.
    pub lorentzian_fwhm_hz: Option<f64>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        Self {
            width: 800.0,
            height: 300.0,
            lorentzian_fwhm_hz: None,
        }
    }
}

/// Absorption (real part) plot, frequency decreasing to the right.
pub fn to_svg(spectrum: &StickSpectrum, opts: &SvgOptions) -> String {
    let (w, h) = (opts.width, opts.height);
    let mut out =
        format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n");
    let base = h / 2.0;
    let _ = writeln!(
        out,
        "<line x1=\"0\" y1=\"{base}\" x2=\"{w}\" y2=\"{base}\" stroke=\"#999\" stroke-width=\"0.5\"/>"
    );
    if spectrum.lines.is_empty() {
        out.push_str("</svg>\n");
        return out;
    }
    let fmin = spectrum
        .lines
        .iter()
        .map(|l| l.frequency_hz)
        .fold(f64::INFINITY, f64::min);
    let fmax = spectrum
        .lines
        .iter()
        .map(|l| l.frequency_hz)
        .fold(f64::NEG_INFINITY, f64::max);
    let pad = ((fmax - fmin) * 0.05)
        .max(opts.lorentzian_fwhm_hz.unwrap_or(0.0) * 5.0)
        .max(1.0);
    let (lo, hi) = (fmin - pad, fmax + pad);
    let x_of = |f: f64| (hi - f) / (hi - lo) * w;
    let scale = spectrum.lines.iter().map(|l| l.amplitude.re.abs()).fold(0.0, f64::max);
    let y_of = |v: f64| {
        if scale > 0.0 {
            base - v / scale * (h * 0.45)
        } else {
            base
        }
    };
    match opts.lorentzian_fwhm_hz {
        None => {
            for l in &spectrum.lines {
                let x = x_of(l.frequency_hz);
                let _ = writeln!(
                    out,
                    "<line x1=\"{x:.2}\" y1=\"{base:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"black\" stroke-width=\"1.5\"><title>{} {}</title></line>",
                    y_of(l.amplitude.re),
                    l.spin,
                    l.transition.id()
                );
            }
        }
        Some(fwhm) => {
            let gamma = fwhm / 2.0;
            let samples = 2000;
            let curve: Vec<(f64, f64)> = (0..=samples)
                .map(|i| {
                    let f = lo + (hi - lo) * i as f64 / samples as f64;
                    let v: f64 = spectrum
                        .lines
                        .iter()
                        .map(|l| l.amplitude.re * gamma * gamma / ((f - l.frequency_hz).powi(2) + gamma * gamma))
                        .sum();
                    (f, v)
                })
                .collect();
            let peak = curve.iter().map(|(_, v)| v.abs()).fold(0.0, f64::max);
            let y = |v: f64| if peak > 0.0 { base - v / peak * (h * 0.45) } else { base };
            let points: Vec<String> = curve
                .iter()
                .map(|(f, v)| format!("{:.2},{:.2}", x_of(*f), y(*v)))
                .collect();
            let _ = writeln!(
                out,
                "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"{}\"/>",
                points.join(" ")
            );
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Writes `spectrum` to `path` in the requested format.
pub fn export(spectrum: &StickSpectrum, format: ExportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ExportFormat::Csv => to_csv(spectrum),
        ExportFormat::Json => to_json(spectrum)?,
        ExportFormat::Svg => to_svg(spectrum, &SvgOptions::default()),
    };
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
