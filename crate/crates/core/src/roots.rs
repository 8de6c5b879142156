//! Bethe-root tuples, their canonical class representative, and the
//! complete spectral set.

use std::cmp::Ordering;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numeric::{arg_2pi, Real};

/// Max-norm distance below which two root classes are considered equal.
pub const DEDUP_TOL: f64 = 1e-8;
/// Lower bound on `|1 + xi_i xi_j - 2 delta xi_i|`.
pub const ASSUMPTION_TOL: f64 = 1e-10;

/// One representative of a root class `[xi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootTuple<T = f64> {
    pub entries: Vec<Complex<T>>,
    /// Max-norm of the Bethe residual at the model's anisotropy.
    pub residual: T,
    /// Sorted seed indices `k` the root was continued from.
    pub seed_index: Vec<usize>,
}

impl<T: Real> RootTuple<T> {
    pub fn new(entries: Vec<Complex<T>>, seed_index: Vec<usize>) -> Self {
        Self {
            entries,
            residual: T::zero(),
            seed_index,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries sorted by argument in `[0, 2π)`, then modulus.
    pub fn canonicalize(&self) -> Self {
        let mut out = self.clone();
        out.entries.sort_by(canonical_order);
        out
    }

    /// Tuple with entries permuted as `(xi_{perm(0)}, ..., xi_{perm(N-1)})`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self {
            entries: perm.iter().map(|&p| self.entries[p]).collect(),
            ..self.clone()
        }
    }

    pub fn has_zero_entry(&self) -> bool {
        self.entries.iter().any(|z| z.norm() == T::zero())
    }

    /// Smallest pairwise distance between entries (infinite for N = 1).
    pub fn min_separation(&self) -> (T, usize, usize) {
        let mut best = (T::infinity(), 0, 0);
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let d = (self.entries[i] - self.entries[j]).norm();
                if d < best.0 {
                    best = (d, i, j);
                }
            }
        }
        best
    }
}

fn canonical_order<T: Real>(a: &Complex<T>, b: &Complex<T>) -> Ordering {
    let key = |z: &Complex<T>| (arg_2pi(*z), z.norm(), z.re, z.im);
    let (ka, kb) = (key(a), key(b));
    ka.0.partial_cmp(&kb.0)
        .unwrap_or(Ordering::Equal)
        .then(ka.1.partial_cmp(&kb.1).unwrap_or(Ordering::Equal))
        .then(ka.2.partial_cmp(&kb.2).unwrap_or(Ordering::Equal))
        .then(ka.3.partial_cmp(&kb.3).unwrap_or(Ordering::Equal))
}

/// Checks `|1 + xi_i xi_j - 2 delta xi_i| > ASSUMPTION_TOL` for all `i, j`.
pub fn check_generic<T: Real>(entries: &[Complex<T>], delta: T) -> Result<()> {
    let one = Complex::new(T::one(), T::zero());
    let two_delta = delta + delta;
    for (i, &a) in entries.iter().enumerate() {
        for (j, &b) in entries.iter().enumerate() {
            let v = (one + a * b - a * two_delta).norm();
            if !(v > T::lit(ASSUMPTION_TOL)) {
                return Err(Error::AssumptionViolation {
                    i,
                    j,
                    value: v.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    Ok(())
}

/// Multiset distance: max-norm after greedily matching each entry of `a`
/// to its nearest unused entry of `b`.
pub fn class_distance<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    if a.len() != b.len() {
        return T::infinity();
    }
    let mut used = vec![false; b.len()];
    let mut worst = T::zero();
    for za in a {
        let mut best = (T::infinity(), usize::MAX);
        for (j, zb) in b.iter().enumerate() {
            if !used[j] {
                let d = (*za - *zb).norm();
                if d < best.0 {
                    best = (d, j);
                }
            }
        }
        if best.1 == usize::MAX {
            return T::infinity();
        }
        used[best.1] = true;
        worst = worst.max(best.0);
    }
    worst
}

pub fn same_class<T: Real>(a: &[Complex<T>], b: &[Complex<T>], tol: T) -> bool {
    class_distance(a, b) <= tol
}

/// The full collection of C(L, N) root classes at one anisotropy.
#[derive(Debug, Clone)]
pub struct SpectralSet<T = f64> {
    pub params: ModelParams<T>,
    pub roots: Vec<RootTuple<T>>,
    /// Roots violating the generic-root assumption; only tolerated for even L.
    pub assumption_warnings: usize,
}

impl<T: Real> SpectralSet<T> {
    /// Validates cardinality, residuals, distinctness and the generic-root
    /// assumption (a hard error for odd L, a counted warning for even L).
    pub fn new(params: ModelParams<T>, roots: Vec<RootTuple<T>>) -> Result<Self> {
        let expected = params.dimension();
        if roots.len() != expected {
            return Err(Error::Cardinality {
                found: roots.len(),
                expected,
            });
        }
        let mut warnings = 0;
        for (index, r) in roots.iter().enumerate() {
            if r.len() != params.n {
                return Err(Error::DimensionMismatch {
                    expected: params.n,
                    found: r.len(),
                });
            }
            if r.has_zero_entry() {
                return Err(Error::Format(format!("root {index} has a zero entry")));
            }
            if !(r.residual <= params.solver_tol) {
                return Err(Error::ResidualTooLarge {
                    index,
                    residual: r.residual.to_f64().unwrap_or(f64::NAN),
                    tol: params.solver_tol.to_f64().unwrap_or(f64::NAN),
                });
            }
            if let Err(e) = check_generic(&r.entries, params.delta) {
                if params.even_length_warning() {
                    warnings += 1;
                } else {
                    return Err(Error::Seed {
                        seed: r.seed_index.clone(),
                        source: Box::new(e),
                    });
                }
            }
        }
        let tol = T::lit(DEDUP_TOL);
        for i in 0..roots.len() {
            for j in i + 1..roots.len() {
                if same_class(&roots[i].entries, &roots[j].entries, tol) {
                    return Err(Error::DuplicateClass {
                        first: roots[i].seed_index.clone(),
                        second: roots[j].seed_index.clone(),
                    });
                }
            }
        }
        Ok(Self {
            params,
            roots,
            assumption_warnings: warnings,
        })
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn max_residual(&self) -> T {
        self.roots.iter().fold(T::zero(), |m, r| m.max(r.residual))
    }
}
