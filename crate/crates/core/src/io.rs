//! Spectrum persistence as JSON. Floats are written in shortest round-trip
//! form, so reading a file back reproduces every entry bit for bit.

use std::fs;
use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::roots::{RootTuple, SpectralSet};

/// `{"L", "N", "delta"}` header shared by spectrum files and reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamsRecord {
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub delta: f64,
}

impl ParamsRecord {
    pub fn from_params<T: crate::numeric::Real>(p: &ModelParams<T>) -> Self {
        Self {
            l: p.l,
            n: p.n,
            delta: p.delta.to_f64().unwrap_or(f64::NAN),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RootRecord {
    seed: Vec<usize>,
    entries: Vec<[f64; 2]>,
    residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumRecord {
    params: ParamsRecord,
    roots: Vec<RootRecord>,
}

pub fn spectrum_to_json(spectrum: &SpectralSet<f64>) -> Result<String> {
    let rec = SpectrumRecord {
        params: ParamsRecord::from_params(&spectrum.params),
        roots: spectrum
            .roots
            .iter()
            .map(|r| RootRecord {
                seed: r.seed_index.clone(),
                entries: r.entries.iter().map(|z| [z.re, z.im]).collect(),
                residual: r.residual,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&rec)?;
    s.push('\n');
    Ok(s)
}

/// Parses and fully validates a spectrum document. `solver_tol` and
/// `identity_tol` take their defaults.
pub fn spectrum_from_json(text: &str) -> Result<SpectralSet<f64>> {
    let rec: SpectrumRecord = serde_json::from_str(text)?;
    let params = ModelParams::new(rec.params.l, rec.params.n, rec.params.delta)?;
    let roots = rec
        .roots
        .into_iter()
        .map(|r| {
            if r.entries.iter().flatten().any(|v| !v.is_finite()) || !r.residual.is_finite() || r.residual < 0.0 {
                return Err(Error::Format(format!("non-finite values in root {:?}", r.seed)));
            }
            Ok(RootTuple {
                entries: r.entries.iter().map(|&[re, im]| Complex::new(re, im)).collect(),
                residual: r.residual,
                seed_index: r.seed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SpectralSet::new(params, roots)
}

pub fn write_spectrum(path: &Path, spectrum: &SpectralSet<f64>) -> Result<()> {
    fs::write(path, spectrum_to_json(spectrum)?)?;
    Ok(())
}

pub fn read_spectrum(path: &Path) -> Result<SpectralSet<f64>> {
    spectrum_from_json(&fs::read_to_string(path)?)
}
