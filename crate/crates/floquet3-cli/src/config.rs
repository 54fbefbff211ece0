//! Coefficient spec files.
//!
//! A spec is a TOML document describing the periodic coefficient pair in
//! one of two profiles:
//!
//! ```toml
//! # Fourier profile: harmonics of p and q. Entries with only n > 0 are
//! # completed by conjugate symmetry; n = 0 is rejected (mean zero).
//! [[p_modes]]
//! n = 1
//! re = 0.5
//! im = 0.0        # optional, defaults to 0
//! ```
//!
//! ```toml
//! # Piecewise-constant profile on [0, 1). breakpoints[0] must be 0.0 and
//! # piece k spans [breakpoints[k], breakpoints[k+1]) (the last closes
//! # at 1). Each value list matches the breakpoints, and both profiles
//! # must average to zero over the period.
//! [piecewise]
//! breakpoints = [0.0, 0.5]
//! p_values = [1.0, -1.0]
//! q_values = [0.0, 0.0]
//! ```

use floquet3_core::{make_coefficients, CoefficientSpec, PeriodicCoefficients};
use num_complex::Complex64;
use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    p_modes: Option<Vec<ModeRow>>,
    q_modes: Option<Vec<ModeRow>>,
    piecewise: Option<PiecewiseSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModeRow {
    n: i32,
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PiecewiseSpec {
    breakpoints: Vec<f64>,
    p_values: Vec<f64>,
    q_values: Vec<f64>,
}

/// Errors surfaced while loading a spec file; all map to the usage exit
/// code except the numerical validation inside the core constructor.
#[derive(Debug)]
pub enum SpecError {
    Io(String),
    Parse(String),
    Layout(String),
    Invalid(floquet3_core::Error),
}

impl std::fmt::Display for SpecError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpecError::Io(m) => write!(f, "cannot read spec: {m}"),
            SpecError::Parse(m) => write!(f, "cannot parse spec: {m}"),
            SpecError::Layout(m) => write!(f, "bad spec layout: {m}"),
            SpecError::Invalid(e) => write!(f, "{e}"),
        }
    }
}

/// Load and validate a coefficient spec file.
pub fn load_spec(path: &Path) -> Result<PeriodicCoefficients, SpecError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SpecError::Io(format!("{}: {e}", path.display())))?;
    let parsed: SpecFile = toml::from_str(&text)
        .map_err(|e| SpecError::Parse(format!("{}: {e}", path.display())))?;

    let has_modes = parsed.p_modes.is_some() || parsed.q_modes.is_some();
    let spec = match (has_modes, parsed.piecewise) {
        (true, Some(_)) => {
            return Err(SpecError::Layout(
                "spec mixes Fourier modes and a piecewise profile; choose one".into(),
            ))
        }
        (false, None) => {
            return Err(SpecError::Layout(
                "spec declares neither p_modes/q_modes nor piecewise".into(),
            ))
        }
        (true, None) => CoefficientSpec::Modes {
            p: rows_to_modes(parsed.p_modes.unwrap_or_default()),
            q: rows_to_modes(parsed.q_modes.unwrap_or_default()),
        },
        (false, Some(pw)) => CoefficientSpec::Piecewise {
            breakpoints: pw.breakpoints,
            p_values: pw.p_values,
            q_values: pw.q_values,
        },
    };
    make_coefficients(&spec).map_err(SpecError::Invalid)
}

fn rows_to_modes(rows: Vec<ModeRow>) -> Vec<(i32, Complex64)> {
    rows.into_iter()
        .map(|r| (r.n, Complex64::new(r.re, r.im)))
        .collect()
}
