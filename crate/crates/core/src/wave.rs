use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numeric::Real;

/// Dense state vector over the coordinate basis, indexed by configuration rank.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction<T = f64> {
    pub params: ModelParams<T>,
    pub amplitudes: Vec<Complex<T>>,
    pub normalized: bool,
}

impl<T: Real> WaveFunction<T> {
    pub fn new(params: ModelParams<T>, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let expected = params.dimension();
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: amplitudes.len(),
            });
        }
        Ok(Self {
            params,
            amplitudes,
            normalized: false,
        })
    }

    pub fn zeros(params: ModelParams<T>) -> Self {
        Self {
            amplitudes: vec![Complex::new(T::zero(), T::zero()); params.dimension()],
            params,
            normalized: false,
        }
    }

    /// Basis vector `|x>` for the configuration of the given rank.
    pub fn basis(params: ModelParams<T>, rank: usize) -> Self {
        let mut w = Self::zeros(params);
        w.amplitudes[rank] = Complex::new(T::one(), T::zero());
        w.normalized = true;
        w
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(crate::numeric::compensated_sum(
            self.amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a.conj() * b),
        ))
    }

    /// Rescales to unit norm and sets the `normalized` flag.
    pub fn normalize(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > T::zero()) {
            return Err(Error::ZeroBetheVector {
                norm: n.to_f64().unwrap_or(0.0),
            });
        }
        for a in &mut self.amplitudes {
            *a = *a / n;
        }
        self.normalized = true;
        Ok(self)
    }

    /// Whether the `normalized` flag is consistent with the actual norm.
    pub fn check_normalized(&self) -> bool {
        !self.normalized || (self.norm_sqr() - T::one()).abs() <= T::lit(1e-10)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        let p = ModelParams::new(3, 1, 0.0_f64).unwrap();
        let w = WaveFunction::new(p, vec![Complex::new(3.0, 0.0), Complex::new(0.0, 4.0), Complex::new(0.0, 0.0)])
            .unwrap()
            .normalize()
            .unwrap();
        assert!(w.normalized && w.check_normalized());
        assert!((w.norm() - 1.0).abs() < 1e-15);
        assert!(WaveFunction::new(p, vec![]).is_err());
        assert!(WaveFunction::zeros(p).normalize().is_err());
    }
}
