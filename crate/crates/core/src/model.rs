//! Model parameters shared by every computation.

use crate::error::{Error, Result};
use crate::numeric::{binomial, Real};

/// Residual threshold every spectrum root must meet.
pub const DEFAULT_SOLVER_TOL: f64 = 1e-10;
/// Default threshold for the completeness identity at small nonzero anisotropy.
pub const DEFAULT_IDENTITY_TOL: f64 = 1e-7;

/// Lattice length, up-spin count, anisotropy and tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams<T = f64> {
    pub l: usize,
    pub n: usize,
    pub delta: T,
    pub solver_tol: T,
    pub identity_tol: T,
}

impl<T: Real> ModelParams<T> {
    pub fn new(l: usize, n: usize, delta: T) -> Result<Self> {
        Self::with_tolerances(
            l,
            n,
            delta,
            T::lit(DEFAULT_SOLVER_TOL),
            T::lit(DEFAULT_IDENTITY_TOL),
        )
    }

    pub fn with_tolerances(l: usize, n: usize, delta: T, solver_tol: T, identity_tol: T) -> Result<Self> {
        let p = Self {
            l,
            n,
            delta,
            solver_tol,
            identity_tol,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l == 0 {
            return Err(Error::InvalidParams("L must be positive".into()));
        }
        if self.l > 64 {
            return Err(Error::InvalidParams(format!("L = {} exceeds the supported 64 sites", self.l)));
        }
        if self.n == 0 || self.n > self.l {
            return Err(Error::InvalidParams(format!(
                "need 1 <= N <= L, got N = {}, L = {}",
                self.n, self.l
            )));
        }
        if !self.delta.is_finite() {
            return Err(Error::InvalidParams("anisotropy must be finite".into()));
        }
        if !(self.solver_tol > T::zero()) || !(self.identity_tol > T::zero()) {
            return Err(Error::InvalidParams("tolerances must be positive".into()));
        }
        Ok(())
    }

    /// Same model at a different anisotropy.
    pub fn at_delta(&self, delta: T) -> Self {
        Self { delta, ..*self }
    }

    /// Sector dimension C(L, N).
    pub fn dimension(&self) -> usize {
        binomial(self.l, self.n)
    }

    /// Set when L is even: the generic-root assumption may fail and the
    /// completeness identity carries no guarantee there.
    pub fn even_length_warning(&self) -> bool {
        self.l.is_multiple_of(2)
    }

    pub fn require_odd_length(&self) -> Result<()> {
        if self.even_length_warning() {
            Err(Error::OddLengthRequired(self.l))
        } else {
            Ok(())
        }
    }
}
