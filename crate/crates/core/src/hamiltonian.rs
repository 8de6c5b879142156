//! Sector Hamiltonian: unit hops to adjacent empty sites on the ring plus
//! `-Δ` per anti-aligned bond.

use num_complex::Complex;

use crate::basis::energy;
use crate::completeness::bethe_vector;
use crate::config::{config_rank, enumerate_configurations, Configuration};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::model::ModelParams;
use crate::numeric::Real;
use crate::roots::RootTuple;
use crate::wave::WaveFunction;

/// Nearest-neighbour bonds `(i, i + 1 mod L)`, the wraparound bond once.
pub fn bonds(l: usize) -> Vec<(usize, usize)> {
    if l < 2 {
        return Vec::new();
    }
    (0..l).map(|i| (i, (i + 1) % l)).collect()
}

/// Matrix elements of H in the fixed-N sector, stored as hop lists.
#[derive(Debug, Clone)]
pub struct HamiltonianAction<T = f64> {
    params: ModelParams<T>,
    hops: Vec<Vec<usize>>,
    walls: Vec<usize>,
}

impl<T: Real> HamiltonianAction<T> {
    pub fn new(params: ModelParams<T>) -> Result<Self> {
        params.validate()?;
        let configs = enumerate_configurations(&params);
        let bonds = bonds(params.l);
        let mut hops = Vec::with_capacity(configs.len());
        let mut walls = Vec::with_capacity(configs.len());
        for c in &configs {
            let m = c.mask();
            let mut h = Vec::new();
            let mut w = 0;
            for &(a, b) in &bonds {
                if (m >> a & 1) != (m >> b & 1) {
                    w += 1;
                    let moved = Configuration::from_mask(m ^ (1 << a) ^ (1 << b));
                    h.push(config_rank(&moved, &params)?);
                }
            }
            hops.push(h);
            walls.push(w);
        }
        Ok(Self { params, hops, walls })
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    /// Number of anti-aligned bonds of the configuration with this rank.
    pub fn domain_walls(&self, rank: usize) -> usize {
        self.walls[rank]
    }

    fn check(&self, psi: &WaveFunction<T>) -> Result<()> {
        if psi.len() != self.hops.len() {
            return Err(Error::DimensionMismatch {
                expected: self.hops.len(),
                found: psi.len(),
            });
        }
        Ok(())
    }

    pub fn apply(&self, psi: &WaveFunction<T>) -> Result<WaveFunction<T>> {
        self.check(psi)?;
        let amps = &psi.amplitudes;
        let out = (0..amps.len())
            .map(|r| {
                let hop = self.hops[r]
                    .iter()
                    .fold(Complex::new(T::zero(), T::zero()), |s, &q| s + amps[q]);
                hop - amps[r] * (self.params.delta * T::count(self.walls[r]))
            })
            .collect();
        WaveFunction::new(self.params, out)
    }

    pub fn to_dense(&self) -> CMatrix<T> {
        let mut m = CMatrix::zeros(self.hops.len());
        for (r, h) in self.hops.iter().enumerate() {
            for &q in h {
                m[(r, q)] = m[(r, q)] + Complex::new(T::one(), T::zero());
            }
            m[(r, r)] = Complex::new(-self.params.delta * T::count(self.walls[r]), T::zero());
        }
        m
    }

    /// `‖H|ξ⟩ − E(ξ)|ξ⟩‖ / ‖|ξ⟩‖` for the Bethe vector of `xi`.
    pub fn eigen_residual(&self, xi: &RootTuple<T>) -> Result<T> {
        let v = bethe_vector(xi, &self.params)?;
        let hv = self.apply(&v)?;
        let e = energy(&xi.entries, self.params.delta);
        let diff: T = hv
            .amplitudes
            .iter()
            .zip(&v.amplitudes)
            .map(|(a, b)| (*a - *b * e).norm_sqr())
            .sum();
        Ok(diff.sqrt() / v.norm())
    }
}

/// Relative eigen-residual of the Bethe vector of `xi`.
pub fn eigen_residual<T: Real>(xi: &RootTuple<T>, params: &ModelParams<T>) -> Result<T> {
    HamiltonianAction::new(*params)?.eigen_residual(xi)
}

pub fn apply_hxxz<T: Real>(psi: &WaveFunction<T>) -> Result<WaveFunction<T>> {
    HamiltonianAction::new(psi.params)?.apply(psi)
}
