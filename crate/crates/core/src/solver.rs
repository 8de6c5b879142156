//! Bethe-root search: closed-form seeds at zero anisotropy, row-wise
//! Newton–Kaczmarz sweeps and stepwise continuation in Δ.

use itertools::Itertools;
use num_complex::Complex;
use rayon::prelude::*;

use crate::basis::pair_factor;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numeric::{cis, cpow, max_abs, Real};
use crate::roots::{RootTuple, SpectralSet, ASSUMPTION_TOL, DEDUP_TOL};

/// Smallest Jacobian row norm the projection step accepts.
pub const JACOBIAN_TOL: f64 = 1e-14;
/// Sweeps without improvement after which a residual already inside
/// `solver_tol` is taken as the floating-point floor.
const STALL_SWEEPS: usize = 25;

/// How to walk from Δ = 0 to the target anisotropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationPlan<T = f64> {
    pub delta_target: T,
    pub delta_step: T,
    pub max_sweeps: usize,
    pub per_step_tol: T,
}

impl<T: Real> ContinuationPlan<T> {
    pub fn new(delta_target: T) -> Self {
        Self {
            delta_target,
            delta_step: T::lit(0.02),
            max_sweeps: 500,
            per_step_tol: T::lit(1e-12),
        }
    }

    pub fn with_step(self, delta_step: T) -> Self {
        Self { delta_step, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delta_target.is_finite() {
            return Err(Error::InvalidParams("target anisotropy must be finite".into()));
        }
        if !(self.delta_step > T::zero()) {
            return Err(Error::InvalidParams("delta step must be positive".into()));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidParams("max_sweeps must be at least 1".into()));
        }
        if !(self.per_step_tol > T::zero()) {
            return Err(Error::InvalidParams("per-step tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Intermediate anisotropies, evenly spaced, ending exactly at the target.
    pub fn schedule(&self) -> Vec<T> {
        let steps = (self.delta_target.abs() / self.delta_step)
            .ceil()
            .to_usize()
            .unwrap_or(0);
        (1..=steps)
            .map(|s| {
                if s == steps {
                    self.delta_target
                } else {
                    self.delta_target * T::count(s) / T::count(steps)
                }
            })
            .collect()
    }
}

/// Zero-anisotropy root for the strictly increasing index tuple `k`.
pub fn seed_roots<T: Real>(k: &[usize], params: &ModelParams<T>) -> Result<RootTuple<T>> {
    if k.len() != params.n || k.windows(2).any(|w| w[0] >= w[1]) || k.iter().any(|&v| v >= params.l) {
        return Err(Error::InvalidSeed(k.to_vec()));
    }
    let l = T::count(params.l);
    let entries = k
        .iter()
        .map(|&ki| {
            let numer = if params.n % 2 == 1 {
                T::count(2 * ki)
            } else {
                T::count(2 * ki + 1)
            };
            cis(numer * T::PI() / l)
        })
        .collect();
    let mut root = RootTuple::new(entries, k.to_vec());
    root.residual = max_abs(&bethe_residual(&root.entries, &params.at_delta(T::zero()))?);
    Ok(root)
}

fn one<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

fn sign_n<T: Real>(n: usize) -> T {
    if n % 2 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

fn checked<T: Real>(d: Complex<T>, i: usize, j: usize) -> Result<Complex<T>> {
    if d.norm() > T::lit(ASSUMPTION_TOL) {
        Ok(d)
    } else {
        Err(Error::AssumptionViolation {
            i,
            j,
            value: d.norm().to_f64().unwrap_or(f64::NAN),
        })
    }
}

/// `P_i = Π_{j≠i} (1 + ξ_iξ_j − 2Δξ_i) / (1 + ξ_iξ_j − 2Δξ_j)`; exactly 1 at Δ = 0.
fn scattering_product<T: Real>(xi: &[Complex<T>], i: usize, delta: T) -> Result<Complex<T>> {
    if delta == T::zero() {
        return Ok(one());
    }
    let mut p = one();
    for j in 0..xi.len() {
        if j != i {
            let den = checked(pair_factor(xi[j], xi[i], delta), j, i)?;
            p = p * pair_factor(xi[i], xi[j], delta) / den;
        }
    }
    Ok(p)
}

/// Residual components `F_i = ξ_i^L + (−1)^N P_i`; all vanish exactly on
/// solutions of the Bethe equations.
pub fn bethe_residual<T: Real>(xi: &[Complex<T>], params: &ModelParams<T>) -> Result<Vec<Complex<T>>> {
    let s = sign_n::<T>(xi.len());
    (0..xi.len())
        .map(|i| Ok(cpow(xi[i], params.l as i64) + scattering_product(xi, i, params.delta)? * s))
        .collect()
}

/// `(F_i, ∇F_i)` with the gradient taken analytically.
pub fn jacobian_row<T: Real>(
    xi: &[Complex<T>],
    i: usize,
    params: &ModelParams<T>,
) -> Result<(Complex<T>, Vec<Complex<T>>)> {
    let n = xi.len();
    let delta = params.delta;
    let two_delta = delta + delta;
    let s = sign_n::<T>(n);
    let p = scattering_product(xi, i, delta)?;
    let f = cpow(xi[i], params.l as i64) + p * s;
    let mut grad = vec![Complex::new(T::zero(), T::zero()); n];
    let mut diag = cpow(xi[i], params.l as i64 - 1) * T::count(params.l);
    if delta != T::zero() {
        let mut dlog_ii = Complex::new(T::zero(), T::zero());
        for k in 0..n {
            if k == i {
                continue;
            }
            let a = checked(pair_factor(xi[i], xi[k], delta), i, k)?;
            let b = checked(pair_factor(xi[k], xi[i], delta), k, i)?;
            dlog_ii = dlog_ii + (xi[k] - two_delta) / a - xi[k] / b;
            grad[k] = p * (xi[i] / a - (xi[i] - two_delta) / b) * s;
        }
        diag = diag + p * dlog_ii * s;
    }
    grad[i] = diag;
    Ok((f, grad))
}

/// One Newton–Kaczmarz sweep over rows `0..N`; returns the updated tuple
/// with its residual refreshed at `params.delta`.
pub fn kaczmarz_sweep<T: Real>(root: &RootTuple<T>, params: &ModelParams<T>) -> Result<RootTuple<T>> {
    let mut xi = root.entries.clone();
    for i in 0..xi.len() {
        let (f, grad) = jacobian_row(&xi, i, params)?;
        let norm_sqr: T = grad.iter().map(|g| g.norm_sqr()).sum();
        if !(norm_sqr.sqrt() >= T::lit(JACOBIAN_TOL)) {
            return Err(Error::DegenerateJacobian {
                row: i,
                norm: norm_sqr.sqrt().to_f64().unwrap_or(f64::NAN),
            });
        }
        if f == Complex::new(T::zero(), T::zero()) {
            continue;
        }
        let step = f / norm_sqr;
        for (z, g) in xi.iter_mut().zip(&grad) {
            *z = *z - step * g.conj();
        }
    }
    let residual = max_abs(&bethe_residual(&xi, params)?);
    Ok(RootTuple {
        entries: xi,
        residual,
        seed_index: root.seed_index.clone(),
    })
}

/// Continued root together with its maximal entry displacement from the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedSolution<T = f64> {
    pub root: RootTuple<T>,
    pub displacement: T,
    pub sweeps: usize,
}

/// Sweeps at fixed Δ until the residual reaches `per_step_tol`.
fn converge<T: Real>(
    mut root: RootTuple<T>,
    plan: &ContinuationPlan<T>,
    params: &ModelParams<T>,
) -> Result<(RootTuple<T>, usize)> {
    root.residual = max_abs(&bethe_residual(&root.entries, params)?);
    let mut best = root.residual;
    let mut since_best = 0;
    let mut sweeps = 0;
    while root.residual > plan.per_step_tol {
        if sweeps == plan.max_sweeps {
            if root.residual <= params.solver_tol {
                break;
            }
            return Err(Error::ContinuationFailure {
                delta: params.delta.to_f64().unwrap_or(f64::NAN),
                residual: root.residual.to_f64().unwrap_or(f64::NAN),
                sweeps,
            });
        }
        root = kaczmarz_sweep(&root, params)?;
        sweeps += 1;
        if !root.residual.is_finite() {
            return Err(Error::ContinuationFailure {
                delta: params.delta.to_f64().unwrap_or(f64::NAN),
                residual: f64::NAN,
                sweeps,
            });
        }
        if root.residual < best {
            best = root.residual;
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= STALL_SWEEPS && root.residual <= params.solver_tol {
                break;
            }
        }
    }
    Ok((root, sweeps))
}

/// Continues the seed `k` from Δ = 0 to `plan.delta_target`.
pub fn solve_from_seed<T: Real>(
    k: &[usize],
    plan: &ContinuationPlan<T>,
    params: &ModelParams<T>,
) -> Result<SeedSolution<T>> {
    plan.validate()?;
    let seed = seed_roots(k, params)?;
    let mut root = seed.clone();
    let mut sweeps = 0;
    for delta in plan.schedule() {
        let (r, s) = converge(root, plan, &params.at_delta(delta))?;
        root = r;
        sweeps += s;
    }
    let target = params.at_delta(plan.delta_target);
    root.residual = max_abs(&bethe_residual(&root.entries, &target)?);
    if !(root.residual <= params.solver_tol) {
        return Err(Error::ContinuationFailure {
            delta: plan.delta_target.to_f64().unwrap_or(f64::NAN),
            residual: root.residual.to_f64().unwrap_or(f64::NAN),
            sweeps,
        });
    }
    let (dist, i, j) = root.min_separation();
    if dist <= T::lit(DEDUP_TOL) {
        return Err(Error::DegenerateRoot {
            i,
            j,
            distance: dist.to_f64().unwrap_or(0.0),
        });
    }
    let displacement = root
        .entries
        .iter()
        .zip(&seed.entries)
        .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()));
    Ok(SeedSolution {
        root,
        displacement,
        sweeps,
    })
}

/// Every root class at `plan.delta_target`, one per seed, in seed
/// lexicographic order.
pub fn enumerate_spectrum<T: Real>(plan: &ContinuationPlan<T>, params: &ModelParams<T>) -> Result<SpectralSet<T>> {
    params.validate()?;
    plan.validate()?;
    let target = params.at_delta(plan.delta_target);
    let seeds: Vec<Vec<usize>> = (0..params.l).combinations(params.n).collect();
    let solved: Vec<Result<RootTuple<T>>> = seeds
        .par_iter()
        .map(|k| {
            solve_from_seed(k, plan, &target)
                .map(|s| s.root.canonicalize())
                .map_err(|e| Error::Seed {
                    seed: k.clone(),
                    source: Box::new(e),
                })
        })
        .collect();
    let roots = solved.into_iter().collect::<Result<Vec<_>>>()?;
    SpectralSet::new(target, roots)
}
