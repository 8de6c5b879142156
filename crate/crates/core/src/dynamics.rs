//! Time evolution from a single configuration and the naive one-point
//! function.

use num_complex::Complex;

use crate::basis::{energy, LambdaConvention, RootKernel};
use crate::completeness::coefficient_tables;
use crate::config::{config_rank, enumerate_configurations, Configuration};
use crate::error::{Error, Result};
use crate::numeric::{CompensatedSum, Real};
use crate::roots::SpectralSet;
use crate::wave::WaveFunction;

/// Per-root data for one initial configuration `y`: `ℓ(y, ξ)`, `E(ξ)` and
/// the full `u(ξ, ·)` table. Only the phases depend on time.
#[derive(Debug, Clone)]
pub struct Evolution<T = f64> {
    spectrum: SpectralSet<T>,
    y: Configuration,
    ell: Vec<Complex<T>>,
    energies: Vec<Complex<T>>,
    u: Vec<Vec<Complex<T>>>,
    configs: Vec<Configuration>,
}

impl<T: Real> Evolution<T> {
    pub fn new(spectrum: &SpectralSet<T>, y: &Configuration, convention: LambdaConvention) -> Result<Self> {
        let params = spectrum.params;
        let y = Configuration::new(y.sites().to_vec(), &params)?;
        let ye = y.exponents();
        let ell = spectrum
            .roots
            .iter()
            .enumerate()
            .map(|(r, root)| {
                RootKernel::new(&root.entries, params.delta, params.l, convention)
                    .and_then(|k| k.ell(&ye))
                    .map_err(|e| Error::Provenance {
                        y: y.sites().to_vec(),
                        root: r,
                        source: Box::new(e),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        let energies = spectrum.roots.iter().map(|r| energy(&r.entries, params.delta)).collect();
        let u = coefficient_tables(spectrum, convention, false)?.u;
        Ok(Self {
            spectrum: spectrum.clone(),
            y,
            ell,
            energies,
            u,
            configs: enumerate_configurations(&params),
        })
    }

    pub fn initial(&self) -> &Configuration {
        &self.y
    }

    pub fn spectrum(&self) -> &SpectralSet<T> {
        &self.spectrum
    }

    /// `ℓ(y, ξ)` per root, in spectrum order.
    pub fn ell(&self) -> &[Complex<T>] {
        &self.ell
    }

    pub fn energies(&self) -> &[Complex<T>] {
        &self.energies
    }

    pub fn configurations(&self) -> &[Configuration] {
        &self.configs
    }

    fn weights(&self, t: T) -> Vec<Complex<T>> {
        self.ell
            .iter()
            .zip(&self.energies)
            .map(|(l, e)| *l * (Complex::new(T::zero(), -t) * e).exp())
            .collect()
    }

    /// `Ψ_x(t) = Σ_ξ ℓ(y, ξ) u(ξ, x) e^{-itE(ξ)}`.
    pub fn wavefunction(&self, t: T) -> Result<WaveFunction<T>> {
        let w = self.weights(t);
        let amps = (0..self.configs.len())
            .map(|x| {
                let mut acc = CompensatedSum::new();
                for (r, wr) in w.iter().enumerate() {
                    acc.add(*wr * self.u[r][x]);
                }
                acc.value()
            })
            .collect();
        WaveFunction::new(self.spectrum.params, amps)
    }

    pub fn config_probability(&self, t: T, x: &Configuration) -> Result<T> {
        let rank = config_rank(x, &self.spectrum.params)?;
        let w = self.weights(t);
        let mut acc = CompensatedSum::new();
        for (r, wr) in w.iter().enumerate() {
            acc.add(*wr * self.u[r][rank]);
        }
        Ok(acc.value().norm_sqr())
    }

    /// `ρ(x, t)` for every site at once.
    pub fn profile(&self, t: T) -> Result<Vec<T>> {
        let psi = self.wavefunction(t)?;
        let mut rho = vec![T::zero(); self.spectrum.params.l];
        for (c, a) in self.configs.iter().zip(&psi.amplitudes) {
            let p = a.norm_sqr();
            for &s in c.sites() {
                rho[s] = rho[s] + p;
            }
        }
        Ok(rho)
    }

    pub fn one_point(&self, site: usize, t: T) -> Result<T> {
        if site >= self.spectrum.params.l {
            return Err(Error::InvalidConfiguration {
                sites: vec![site as i64],
                reason: format!("site outside [0, {})", self.spectrum.params.l),
            });
        }
        Ok(self.profile(t)?[site])
    }
}

pub fn wavefunction<T: Real>(t: T, y: &Configuration, spectrum: &SpectralSet<T>) -> Result<WaveFunction<T>> {
    Evolution::new(spectrum, y, LambdaConvention::default())?.wavefunction(t)
}

pub fn config_probability<T: Real>(t: T, y: &Configuration, x: &Configuration, spectrum: &SpectralSet<T>) -> Result<T> {
    Evolution::new(spectrum, y, LambdaConvention::default())?.config_probability(t, x)
}

pub fn one_point_naive<T: Real>(site: usize, t: T, y: &Configuration, spectrum: &SpectralSet<T>) -> Result<T> {
    Evolution::new(spectrum, y, LambdaConvention::default())?.one_point(site, t)
}
