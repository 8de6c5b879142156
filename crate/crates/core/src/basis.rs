//! Coordinate/energy transformation kernels: amplitudes, the forward
//! coefficients `u(xi, x)`, eigenvalues, the normalization matrix and the
//! inverse coefficients `ell(x, xi)`.

use std::sync::OnceLock;

use itertools::Itertools;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::numeric::{compensated_sum, cpow, Real};
use crate::roots::ASSUMPTION_TOL;

/// Largest N for which O(N!) permutation sums are evaluated.
pub const MAX_PERMUTATION_N: usize = 8;

/// All permutations of `0..n` in lexicographic order, with signs.
#[derive(Debug, Clone)]
pub struct PermutationTable {
    n: usize,
    perms: Vec<Vec<usize>>,
    signs: Vec<i8>,
}

impl PermutationTable {
    pub fn new(n: usize) -> Result<Self> {
        if n > MAX_PERMUTATION_N {
            return Err(Error::TooManyParticles {
                n,
                max: MAX_PERMUTATION_N,
            });
        }
        let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
        let signs = perms.iter().map(|p| permutation_sign(p)).collect();
        Ok(Self { n, perms, signs })
    }

    /// Process-wide table for `n`, built on first use.
    pub fn shared(n: usize) -> Result<&'static PermutationTable> {
        static TABLES: [OnceLock<PermutationTable>; MAX_PERMUTATION_N + 1] =
            [const { OnceLock::new() }; MAX_PERMUTATION_N + 1];
        if n > MAX_PERMUTATION_N {
            return Err(Error::TooManyParticles {
                n,
                max: MAX_PERMUTATION_N,
            });
        }
        Ok(TABLES[n].get_or_init(|| PermutationTable::new(n).expect("n within limit")))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.perms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], i8)> {
        self.perms.iter().map(Vec::as_slice).zip(self.signs.iter().copied())
    }

    pub fn perm(&self, idx: usize) -> &[usize] {
        &self.perms[idx]
    }

    pub fn sign(&self, idx: usize) -> i8 {
        self.signs[idx]
    }
}

/// `+1` for even permutations, `-1` for odd ones.
pub fn permutation_sign(p: &[usize]) -> i8 {
    let inversions = (0..p.len())
        .flat_map(|i| (i + 1..p.len()).map(move |j| (i, j)))
        .filter(|&(i, j)| p[i] > p[j])
        .count();
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `(a ∘ b)(i) = a(b(i))`.
pub fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

fn one<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// `1 + a b - 2 delta a`, the two-body factor appearing everywhere below.
#[inline]
pub fn pair_factor<T: Real>(a: Complex<T>, b: Complex<T>, delta: T) -> Complex<T> {
    one::<T>() + a * b - a * (delta + delta)
}

fn checked_denominator<T: Real>(d: Complex<T>, i: usize, j: usize) -> Result<Complex<T>> {
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

/// Two-body scattering factor `-(1 + ab - 2Δa) / (1 + ab - 2Δb)` for the
/// inversion `(a, b)`. At Δ = 0 numerator and denominator coincide and the
/// factor is exactly `-1`.
fn scattering<T: Real>(xi: &[Complex<T>], a: usize, b: usize, delta: T) -> Result<Complex<T>> {
    if delta == T::zero() {
        return Ok(-one::<T>());
    }
    let num = pair_factor(xi[a], xi[b], delta);
    let den = checked_denominator(pair_factor(xi[b], xi[a], delta), b, a)?;
    Ok(-(num / den))
}

/// Bethe amplitude `A_sigma(xi)`: product over inversions of `sigma`.
pub fn amplitude<T: Real>(sigma: &[usize], xi: &[Complex<T>], delta: T) -> Result<Complex<T>> {
    let mut acc = one::<T>();
    for i in 0..sigma.len() {
        for j in i + 1..sigma.len() {
            if sigma[i] > sigma[j] {
                acc = acc * scattering(xi, sigma[i], sigma[j], delta)?;
            }
        }
    }
    Ok(acc)
}

/// Forward coefficient `u(xi, x) = Σ_σ A_σ(xi) Π_i xi_{σ(i)}^{x_i}`.
///
/// `x` is any integer tuple; negative exponents are exact inverses.
pub fn u_coeff<T: Real>(xi: &[Complex<T>], x: &[i64], delta: T) -> Result<Complex<T>> {
    if x.len() != xi.len() {
        return Err(Error::DimensionMismatch {
            expected: xi.len(),
            found: x.len(),
        });
    }
    let table = PermutationTable::shared(xi.len())?;
    let mut terms = Vec::with_capacity(table.len());
    for (sigma, _) in table.iter() {
        let a = amplitude(sigma, xi, delta)?;
        let mono = sigma
            .iter()
            .zip(x)
            .fold(one::<T>(), |m, (&s, &e)| m * cpow(xi[s], e));
        terms.push(a * mono);
    }
    Ok(compensated_sum(terms))
}

/// Eigenvalue `E(xi) = Σ (xi_i + 1/xi_i - 2Δ)`. The imaginary part is kept.
pub fn energy<T: Real>(xi: &[Complex<T>], delta: T) -> Complex<T> {
    xi.iter()
        .map(|&z| z + z.inv() - Complex::new(delta + delta, T::zero()))
        .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
}

/// Which anisotropy enters the normalization matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaConvention {
    /// Δ′ = Δ, as the matrix is typeset.
    Literal,
    /// Δ′ = 2Δ, consistent with the Bethe equations; makes the
    /// completeness identity hold.
    #[default]
    Doubled,
}

impl LambdaConvention {
    pub fn effective<T: Real>(self, delta: T) -> T {
        match self {
            Self::Literal => delta,
            Self::Doubled => delta + delta,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Literal => "literal",
            Self::Doubled => "doubled",
        }
    }
}

impl std::str::FromStr for LambdaConvention {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "literal" => Ok(Self::Literal),
            "doubled" => Ok(Self::Doubled),
            other => Err(format!("unknown convention '{other}' (expected literal|doubled)")),
        }
    }
}

/// Normalization matrix and its determinant.
pub fn lambda_matrix<T: Real>(
    xi: &[Complex<T>],
    delta: T,
    l: usize,
    convention: LambdaConvention,
) -> Result<(CMatrix<T>, Complex<T>)> {
    let n = xi.len();
    let dp = convention.effective(delta);
    let mut m = CMatrix::zeros(n);
    if dp != T::zero() {
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (a, b) = (xi[i], xi[j]);
                let num = (one::<T>() + b * b - b * dp) * (-dp);
                let d1 = one::<T>() + a * b - a * dp;
                let d2 = one::<T>() + a * b - b * dp;
                let den = checked_denominator(d1 * d2, i, j)?;
                m[(i, j)] = num / den;
            }
        }
    }
    let l_t = T::count(l);
    for i in 0..n {
        let off: Complex<T> = (0..n)
            .filter(|&j| j != i)
            .fold(Complex::new(T::zero(), T::zero()), |s, j| s + m[(i, j)]);
        m[(i, i)] = xi[i].inv() * l_t - off;
    }
    let det = m.determinant();
    let scale = m.row_scale();
    if !(det.norm() >= T::lit(1e-13) * scale) || !det.norm().is_finite() {
        return Err(Error::SingularLambda {
            det: det.norm().to_f64().unwrap_or(f64::NAN),
            scale: scale.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok((m, det))
}

/// Inverse coefficient `ell(x, xi) = Σ_σ (A_σ(xi) det Λ(xi) Π xi_{σ(i)}^{x_i+1})^{-1}`.
pub fn ell_coeff<T: Real>(
    x: &[i64],
    xi: &[Complex<T>],
    delta: T,
    l: usize,
    convention: LambdaConvention,
) -> Result<Complex<T>> {
    RootKernel::new(xi, delta, l, convention)?.ell(x)
}

/// Per-root cache of amplitudes, `det Λ` and integer powers, for repeated
/// evaluation of `u` and `ell` at many configurations.
#[derive(Debug, Clone)]
pub struct RootKernel<T = f64> {
    entries: Vec<Complex<T>>,
    table: &'static PermutationTable,
    amplitudes: Vec<Complex<T>>,
    det_lambda: Option<Complex<T>>,
    // powers[i][p] = xi_i^(p - offset) for p in 0..=2*offset
    powers: Vec<Vec<Complex<T>>>,
    offset: i64,
}

impl<T: Real> RootKernel<T> {
    pub fn new(xi: &[Complex<T>], delta: T, l: usize, convention: LambdaConvention) -> Result<Self> {
        let mut k = Self::forward(xi, delta, l)?;
        k.det_lambda = Some(lambda_matrix(xi, delta, l, convention)?.1);
        Ok(k)
    }

    /// Kernel for `u` only; [`RootKernel::ell`] is unavailable.
    pub fn forward(xi: &[Complex<T>], delta: T, l: usize) -> Result<Self> {
        let table = PermutationTable::shared(xi.len())?;
        let amplitudes = table
            .iter()
            .map(|(sigma, _)| amplitude(sigma, xi, delta))
            .collect::<Result<Vec<_>>>()?;
        let det_lambda = None;
        let offset = l as i64 + 1;
        let powers = xi
            .iter()
            .map(|&z| (-offset..=offset).map(|e| cpow(z, e)).collect())
            .collect();
        Ok(Self {
            entries: xi.to_vec(),
            table,
            amplitudes,
            det_lambda,
            powers,
            offset,
        })
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn det_lambda(&self) -> Option<Complex<T>> {
        self.det_lambda
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    #[inline]
    fn pow(&self, i: usize, e: i64) -> Complex<T> {
        if e.abs() <= self.offset {
            self.powers[i][(e + self.offset) as usize]
        } else {
            cpow(self.entries[i], e)
        }
    }

    fn check_len(&self, x: &[i64]) -> Result<()> {
        if x.len() == self.entries.len() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.entries.len(),
                found: x.len(),
            })
        }
    }

    pub fn u(&self, x: &[i64]) -> Result<Complex<T>> {
        self.check_len(x)?;
        Ok(compensated_sum(self.table.iter().zip(&self.amplitudes).map(
            |((sigma, _), &a)| {
                sigma
                    .iter()
                    .zip(x)
                    .fold(a, |m, (&s, &e)| m * self.pow(s, e))
            },
        )))
    }

    pub fn ell(&self, x: &[i64]) -> Result<Complex<T>> {
        self.check_len(x)?;
        let det = self.det_lambda.expect("inverse coefficients need a kernel built with RootKernel::new");
        let mut terms = Vec::with_capacity(self.amplitudes.len());
        for ((sigma, _), &a) in self.table.iter().zip(&self.amplitudes) {
            if a.norm() == T::zero() {
                return Err(Error::ZeroAmplitude);
            }
            // (A det Π xi^{x+1})^{-1} = A^{-1} det^{-1} Π xi^{-(x+1)}
            let inv = (a * det).inv();
            terms.push(
                sigma
                    .iter()
                    .zip(x)
                    .fold(inv, |m, (&s, &e)| m * self.pow(s, -(e + 1))),
            );
        }
        Ok(compensated_sum(terms))
    }
}
