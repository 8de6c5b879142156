//! Bethe vectors and the transition matrix `M[y][x] = Σ_ξ ℓ(y, ξ) u(ξ, x)`,
//! which equals the identity exactly when the Bethe vectors are complete.

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{LambdaConvention, RootKernel};
use crate::config::enumerate_configurations;
use crate::error::{Error, Result};
use crate::io::ParamsRecord;
use crate::linalg::CMatrix;
use crate::model::ModelParams;
use crate::numeric::{CompensatedSum, Real};
use crate::roots::{RootTuple, SpectralSet};
use crate::wave::WaveFunction;

/// Norm below which a Bethe vector counts as zero.
pub const ZERO_VECTOR_TOL: f64 = 1e-12;

/// Unnormalized `|ξ⟩ = Σ_x u(ξ, x)|x⟩`.
pub fn bethe_vector<T: Real>(xi: &RootTuple<T>, params: &ModelParams<T>) -> Result<WaveFunction<T>> {
    let kernel = RootKernel::forward(&xi.entries, params.delta, params.l)?;
    let amps = enumerate_configurations(params)
        .iter()
        .map(|c| kernel.u(&c.exponents()))
        .collect::<Result<Vec<_>>>()?;
    let w = WaveFunction::new(*params, amps)?;
    let norm = w.norm();
    if !(norm >= T::lit(ZERO_VECTOR_TOL)) {
        return Err(Error::ZeroBetheVector {
            norm: norm.to_f64().unwrap_or(0.0),
        });
    }
    Ok(w)
}

/// Forward and inverse coefficient tables, `[root][config rank]`.
pub(crate) struct CoefficientTables<T> {
    pub u: Vec<Vec<Complex<T>>>,
    pub ell: Vec<Vec<Complex<T>>>,
}

pub(crate) fn coefficient_tables<T: Real>(
    spectrum: &SpectralSet<T>,
    convention: LambdaConvention,
    with_ell: bool,
) -> Result<CoefficientTables<T>> {
    let params = &spectrum.params;
    let exps: Vec<Vec<i64>> = enumerate_configurations(params).iter().map(|c| c.exponents()).collect();
    let rows: Vec<Result<(Vec<Complex<T>>, Vec<Complex<T>>)>> = spectrum
        .roots
        .par_iter()
        .enumerate()
        .map(|(r, root)| {
            let provenance = |y: Vec<usize>, e: Error| Error::Provenance {
                y,
                root: r,
                source: Box::new(e),
            };
            let k = if with_ell {
                RootKernel::new(&root.entries, params.delta, params.l, convention)
            } else {
                RootKernel::forward(&root.entries, params.delta, params.l)
            }
            .map_err(|e| provenance(Vec::new(), e))?;
            let mut u = Vec::with_capacity(exps.len());
            let mut ell = Vec::with_capacity(if with_ell { exps.len() } else { 0 });
            for x in &exps {
                u.push(k.u(x).map_err(|e| provenance(Vec::new(), e))?);
                if with_ell {
                    let y = x.iter().map(|&s| s as usize).collect();
                    ell.push(k.ell(x).map_err(|e| provenance(y, e))?);
                }
            }
            Ok((u, ell))
        })
        .collect();
    let mut tables = CoefficientTables {
        u: Vec::with_capacity(rows.len()),
        ell: Vec::with_capacity(rows.len()),
    };
    for row in rows {
        let (u, ell) = row?;
        tables.u.push(u);
        tables.ell.push(ell);
    }
    Ok(tables)
}

/// `M[rank(y)][rank(x)]`, each entry summed over roots in spectrum order.
pub fn transition_matrix<T: Real>(spectrum: &SpectralSet<T>, convention: LambdaConvention) -> Result<CMatrix<T>> {
    let tables = coefficient_tables(spectrum, convention, true)?;
    let dim = spectrum.params.dimension();
    let rows: Vec<Vec<Complex<T>>> = (0..dim)
        .into_par_iter()
        .map(|y| {
            (0..dim)
                .map(|x| {
                    let mut acc = CompensatedSum::new();
                    for r in 0..tables.u.len() {
                        acc.add(tables.ell[r][y] * tables.u[r][x]);
                    }
                    acc.value()
                })
                .collect()
        })
        .collect();
    Ok(CMatrix::from_rows(rows))
}

/// Deviation of a matrix from the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub max_offdiag: f64,
    pub max_diag_dev: f64,
    pub pass: bool,
    pub worst_offdiag: Option<(usize, usize)>,
    pub worst_diag: Option<usize>,
}

impl IdentityReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_offdiag.max(self.max_diag_dev)
    }
}

pub fn verify_identity<T: Real>(m: &CMatrix<T>, tol: T) -> IdentityReport {
    let mut rep = IdentityReport {
        max_offdiag: 0.0,
        max_diag_dev: 0.0,
        pass: false,
        worst_offdiag: None,
        worst_diag: None,
    };
    let one = Complex::new(T::one(), T::zero());
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            let dev = if i == j { (m[(i, j)] - one).norm() } else { m[(i, j)].norm() };
            let dev = dev.to_f64().unwrap_or(f64::NAN);
            if i == j {
                if dev > rep.max_diag_dev || dev.is_nan() {
                    rep.max_diag_dev = dev;
                    rep.worst_diag = Some(i);
                }
            } else if dev > rep.max_offdiag || dev.is_nan() {
                rep.max_offdiag = dev;
                rep.worst_offdiag = Some((i, j));
            }
        }
    }
    let tol = tol.to_f64().unwrap_or(0.0);
    rep.pass = rep.max_offdiag <= tol && rep.max_diag_dev <= tol;
    rep
}

/// Serializable outcome of one completeness check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub params: ParamsRecord,
    pub variant: LambdaConvention,
    pub tol: f64,
    pub max_offdiag: f64,
    pub max_diag_dev: f64,
    pub pass: bool,
    pub worst_offdiag: Option<(usize, usize)>,
    pub worst_diag: Option<usize>,
}

impl CompletenessReport {
    pub fn max_deviation(&self) -> f64 {
        self.max_offdiag.max(self.max_diag_dev)
    }

    pub fn to_text(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let mut s = format!(
            "completeness L={} N={} delta={} variant={}\n  max offdiag  {:.3e}\n  max diag dev {:.3e}\n  tol          {:.1e}\n  {status}\n",
            self.params.l,
            self.params.n,
            self.params.delta,
            self.variant.name(),
            self.max_offdiag,
            self.max_diag_dev,
            self.tol,
        );
        if !self.pass {
            if let Some((i, j)) = self.worst_offdiag {
                s.push_str(&format!("  worst offdiag at ({i}, {j})\n"));
            }
            if let Some(i) = self.worst_diag {
                s.push_str(&format!("  worst diagonal at {i}\n"));
            }
        }
        s
    }
}

/// Builds the transition matrix and compares it with the identity. Only
/// defined for odd L.
pub fn check_completeness<T: Real>(
    spectrum: &SpectralSet<T>,
    convention: LambdaConvention,
    tol: T,
) -> Result<CompletenessReport> {
    spectrum.params.require_odd_length()?;
    let m = transition_matrix(spectrum, convention)?;
    let r = verify_identity(&m, tol);
    Ok(CompletenessReport {
        params: ParamsRecord::from_params(&spectrum.params),
        variant: convention,
        tol: tol.to_f64().unwrap_or(f64::NAN),
        max_offdiag: r.max_offdiag,
        max_diag_dev: r.max_diag_dev,
        pass: r.pass,
        worst_offdiag: r.worst_offdiag,
        worst_diag: r.worst_diag,
    })
}

/// Runs both Λ conventions and picks the one closer to the identity,
/// preferring a passing one. Both reports are returned.
pub fn select_lambda_convention<T: Real>(
    spectrum: &SpectralSet<T>,
    tol: T,
) -> Result<(LambdaConvention, Vec<CompletenessReport>)> {
    let reports = [LambdaConvention::Literal, LambdaConvention::Doubled]
        .into_iter()
        .map(|c| check_completeness(spectrum, c, tol))
        .collect::<Result<Vec<_>>>()?;
    let best = reports
        .iter()
        .min_by(|a, b| {
            b.pass
                .cmp(&a.pass)
                .then(a.max_deviation().total_cmp(&b.max_deviation()))
        })
        .map(|r| r.variant)
        .unwrap_or_default();
    Ok((best, reports))
}
