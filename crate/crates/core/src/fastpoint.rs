//! One-point function through the Izergin–Korepin pair kernel, and direct
//! numerical checks of the identities the kernel is assembled from.
//!
//! Index sets are 0-based throughout; restricted functions take the entries
//! at the sorted indices of their subsets.

use itertools::Itertools;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{energy, pair_factor, permutation_sign, LambdaConvention, PermutationTable, RootKernel};
use crate::completeness::coefficient_tables;
use crate::config::{enumerate_configurations, Configuration};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::model::ModelParams;
use crate::numeric::{cpow, CompensatedSum, Real};
use crate::roots::SpectralSet;

/// Pairs with `|1 - ξ_i ζ_j|` below this are routed to the naive inner sum.
pub const IK_SINGULARITY_TOL: f64 = 1e-9;
/// Random draws closer than this to a singular variety are redrawn.
const DRAW_MARGIN: f64 = 1e-3;
const MAX_REDRAWS: usize = 10_000;

fn one<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

/// Equal-size index subsets of `0..n` with cached complements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetPair {
    pub i1: Vec<usize>,
    pub i2: Vec<usize>,
    pub c1: Vec<usize>,
    pub c2: Vec<usize>,
}

impl SubsetPair {
    pub fn new(mut i1: Vec<usize>, mut i2: Vec<usize>, n: usize) -> Result<Self> {
        i1.sort_unstable();
        i2.sort_unstable();
        let valid = |s: &[usize]| s.windows(2).all(|w| w[0] < w[1]) && s.iter().all(|&v| v < n);
        if i1.len() != i2.len() {
            return Err(Error::DimensionMismatch {
                expected: i1.len(),
                found: i2.len(),
            });
        }
        if !valid(&i1) || !valid(&i2) {
            return Err(Error::InvalidBlocks { n });
        }
        let c1 = (0..n).filter(|v| !i1.contains(v)).collect();
        let c2 = (0..n).filter(|v| !i2.contains(v)).collect();
        Ok(Self { i1, i2, c1, c2 })
    }

    pub fn size(&self) -> usize {
        self.i1.len()
    }

    /// All pairs with `|I1| = |I2| = s`, subsets in colex order.
    pub fn all_of_size(n: usize, s: usize) -> Vec<Self> {
        let subsets = colex_subsets(n, s);
        subsets
            .iter()
            .cartesian_product(subsets.iter())
            .map(|(a, b)| Self::new(a.clone(), b.clone(), n).expect("valid subsets"))
            .collect()
    }
}

fn colex_subsets(n: usize, s: usize) -> Vec<Vec<usize>> {
    let mut v: Vec<Vec<usize>> = (0..n).combinations(s).collect();
    v.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    v
}

fn restrict<T: Copy>(v: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| v[i]).collect()
}

/// `B_σ(ξ) = sgn(σ) Π_{i<j}(1 + ξ_{σ(i)}ξ_{σ(j)} − 2Δξ_{σ(i)}) Π_j ξ_{σ(j)}^j`, `j` counted from 1.
pub fn b_sigma<T: Real>(sigma: &[usize], xi: &[Complex<T>], delta: T) -> Complex<T> {
    let mut v = if permutation_sign(sigma) > 0 { one() } else { -one::<T>() };
    for i in 0..sigma.len() {
        for j in i + 1..sigma.len() {
            v = v * pair_factor(xi[sigma[i]], xi[sigma[j]], delta);
        }
        v = v * cpow(xi[sigma[i]], i as i64 + 1);
    }
    v
}

/// `Π_α ξ_{I1[α]} ζ_{I2[α]}`; empty subsets give 1.
pub fn f_prod<T: Real>(xi: &[Complex<T>], zeta: &[Complex<T>], i1: &[usize], i2: &[usize]) -> Result<Complex<T>> {
    if i1.len() != i2.len() {
        return Err(Error::DimensionMismatch {
            expected: i1.len(),
            found: i2.len(),
        });
    }
    Ok(i1.iter().zip(i2).fold(one(), |acc, (&a, &b)| acc * xi[a] * zeta[b]))
}

/// `G(ξ; J_1, ..., J_k)`: the pair factor over every ordered block pair,
/// with a sign flip whenever the earlier block holds the larger index.
pub fn g_fn<T: Real>(xi: &[Complex<T>], blocks: &[&[usize]], delta: T) -> Result<Complex<T>> {
    let n = xi.len();
    let mut seen = vec![false; n];
    for &b in blocks.iter().flat_map(|b| b.iter()) {
        if b >= n || seen[b] {
            return Err(Error::InvalidBlocks { n });
        }
        seen[b] = true;
    }
    let mut g = one();
    for (bi, ji) in blocks.iter().enumerate() {
        for jj in &blocks[bi + 1..] {
            for &a in ji.iter() {
                for &b in jj.iter() {
                    g = g * pair_factor(xi[a], xi[b], delta);
                    if a > b {
                        g = -g;
                    }
                }
            }
        }
    }
    Ok(g)
}

/// Izergin–Korepin determinant `det[Π_{k≠j}(ξ_i + ζ_k − 2Δξ_iζ_k) / (1 − ξ_iζ_j)]`.
pub fn gamma_det<T: Real>(xi: &[Complex<T>], zeta: &[Complex<T>], delta: T) -> Result<Complex<T>> {
    let n = xi.len();
    if zeta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: zeta.len(),
        });
    }
    let two_delta = delta + delta;
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let d = one::<T>() - xi[i] * zeta[j];
            if !(d.norm() >= T::lit(IK_SINGULARITY_TOL)) {
                return Err(Error::IkSingularity {
                    i,
                    j,
                    value: d.norm().to_f64().unwrap_or(f64::NAN),
                });
            }
            let num = (0..n)
                .filter(|&k| k != j)
                .fold(one::<T>(), |acc, k| acc * (xi[i] + zeta[k] - xi[i] * zeta[k] * two_delta));
            m[(i, j)] = num / d;
        }
    }
    Ok(m.determinant())
}

fn inverted<T: Real>(v: &[Complex<T>]) -> Vec<Complex<T>> {
    v.iter().map(|z| z.inv()).collect()
}

fn vandermonde_like<T: Real>(xi: &[Complex<T>], delta: T) -> Complex<T> {
    let mut d = one();
    for i in 0..xi.len() {
        for j in i + 1..xi.len() {
            d = d * pair_factor(xi[i], xi[j], delta);
        }
    }
    d
}

/// `Σ_{x ∋ 0} u(ξ, x) u(ζ, x)` through the subset-sum formula.
pub fn pair_inner_origin<T: Real>(xi: &[Complex<T>], zeta: &[Complex<T>], delta: T) -> Result<Complex<T>> {
    let n = xi.len();
    if zeta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: zeta.len(),
        });
    }
    let mut acc = CompensatedSum::new();
    for s in 1..=n {
        for p in SubsetPair::all_of_size(n, s) {
            let fs = f_prod(xi, zeta, &p.i1, &p.i2)?;
            let fc = f_prod(xi, zeta, &p.c1, &p.c2)?;
            let g1 = gamma_det(&restrict(xi, &p.i1), &restrict(zeta, &p.i2), delta)?;
            let g2 = gamma_det(
                &inverted(&restrict(xi, &p.c1)),
                &inverted(&restrict(zeta, &p.c2)),
                delta,
            )?;
            let gx = g_fn(xi, &[&p.c1, &p.i1], delta)?;
            let gz = g_fn(zeta, &[&p.c2, &p.i2], delta)?;
            acc.add((one::<T>() - fs) * g1 * gx * gz * g2 * cpow(fc, n as i64 - s as i64 - 2));
        }
    }
    Ok(acc.value() / (vandermonde_like(xi, delta) * vandermonde_like(zeta, delta)))
}

/// Pair kernel `F(x; ξ, ζ)` at site `x` and time `t`.
pub fn f_kernel<T: Real>(
    x: usize,
    t: T,
    xi: &[Complex<T>],
    zeta: &[Complex<T>],
    params: &ModelParams<T>,
) -> Result<Complex<T>> {
    let delta = params.delta;
    let phase = (Complex::new(T::zero(), -t) * (energy(xi, delta) - energy(zeta, delta))).exp();
    let all: Vec<usize> = (0..xi.len()).collect();
    let f = f_prod(xi, zeta, &all, &all)?;
    Ok(phase * cpow(f, x as i64) * pair_inner_origin(xi, zeta, delta)?)
}

/// `ρ(x, t)` together with the diagnostics of its pair sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnePointValue {
    pub rho: f64,
    pub imag_residue: f64,
    pub fallback_pairs: usize,
}

#[derive(Debug, Clone)]
enum PairKernel<T> {
    /// Origin value of the subset-sum formula.
    Fast(Complex<T>),
    /// Naive inner sums `Σ_{x ∋ site} u(ξ, x) u(ζ, x)`, one per site.
    Fallback(Vec<Complex<T>>),
}

/// Cached pair kernels for one initial configuration.
#[derive(Debug, Clone)]
pub struct FastOnePoint<T = f64> {
    params: ModelParams<T>,
    ell: Vec<Complex<T>>,
    energies: Vec<Complex<T>>,
    momenta: Vec<Complex<T>>,
    kernels: Vec<Vec<PairKernel<T>>>,
    fallback_pairs: usize,
}

impl<T: Real> FastOnePoint<T> {
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
        let momenta = spectrum
            .roots
            .iter()
            .map(|r| r.entries.iter().fold(one(), |a, z| a * z))
            .collect();

        let roots = &spectrum.roots;
        let rows: Vec<Result<Vec<Option<Complex<T>>>>> = roots
            .par_iter()
            .map(|a| {
                roots
                    .iter()
                    .map(|b| match pair_inner_origin(&a.entries, &b.entries, params.delta) {
                        Ok(v) => Ok(Some(v)),
                        Err(Error::IkSingularity { .. }) => Ok(None),
                        Err(e) => Err(e),
                    })
                    .collect()
            })
            .collect();
        let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

        let fallback_pairs = rows.iter().flatten().filter(|k| k.is_none()).count();
        let u = if fallback_pairs > 0 {
            Some(coefficient_tables(spectrum, convention, false)?.u)
        } else {
            None
        };
        let configs = enumerate_configurations(&params);
        let kernels = rows
            .into_iter()
            .enumerate()
            .map(|(a, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(b, k)| match k {
                        Some(v) => PairKernel::Fast(v),
                        None => {
                            let u = u.as_ref().expect("tables built when fallbacks exist");
                            PairKernel::Fallback(
                                (0..params.l)
                                    .map(|site| {
                                        crate::numeric::compensated_sum(
                                            configs
                                                .iter()
                                                .enumerate()
                                                .filter(|(_, c)| c.contains(site))
                                                .map(|(r, _)| u[a][r] * u[b][r]),
                                        )
                                    })
                                    .collect(),
                            )
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            params,
            ell,
            energies,
            momenta,
            kernels,
            fallback_pairs,
        })
    }

    /// Number of root pairs evaluated by the naive inner sum.
    pub fn fallback_pairs(&self) -> usize {
        self.fallback_pairs
    }

    pub fn one_point(&self, site: usize, t: T) -> Result<OnePointValue> {
        if site >= self.params.l {
            return Err(Error::InvalidConfiguration {
                sites: vec![site as i64],
                reason: format!("site outside [0, {})", self.params.l),
            });
        }
        let weights: Vec<(Complex<T>, Complex<T>)> = self
            .ell
            .iter()
            .zip(&self.energies)
            .map(|(l, e)| {
                let p = (Complex::new(T::zero(), -t) * e).exp();
                (*l * p, *l / p)
            })
            .collect();
        let mut acc = CompensatedSum::new();
        for (a, row) in self.kernels.iter().enumerate() {
            for (b, k) in row.iter().enumerate() {
                let kernel = match k {
                    PairKernel::Fast(v) => *v * cpow(self.momenta[a] * self.momenta[b], site as i64),
                    PairKernel::Fallback(v) => v[site],
                };
                acc.add(weights[a].0 * kernel * weights[b].1);
            }
        }
        let v = acc.value();
        Ok(OnePointValue {
            rho: v.re.to_f64().unwrap_or(f64::NAN),
            imag_residue: v.im.abs().to_f64().unwrap_or(f64::NAN),
            fallback_pairs: self.fallback_pairs,
        })
    }

    /// `ρ(x, t)` for every site.
    pub fn profile(&self, t: T) -> Result<Vec<OnePointValue>> {
        (0..self.params.l).map(|x| self.one_point(x, t)).collect()
    }
}

pub fn one_point_fast<T: Real>(site: usize, t: T, y: &Configuration, spectrum: &SpectralSet<T>) -> Result<OnePointValue> {
    FastOnePoint::new(spectrum, y, LambdaConvention::default())?.one_point(site, t)
}

/// Maximal relative deviations of each kernel identity over random draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdentityDeviations {
    pub n: usize,
    pub trials: usize,
    pub redraws: usize,
    pub b_decomposition: f64,
    pub ik_sum: f64,
    pub subset_sum: f64,
    pub e_function: f64,
    /// Set when `(I, λ1, λ2) ↦ σ` is a bijection onto `S_n` for every `|I|`.
    pub permutation_decomposition: bool,
}

impl IdentityDeviations {
    pub fn max_deviation(&self) -> f64 {
        self.b_decomposition
            .max(self.ik_sum)
            .max(self.subset_sum)
            .max(self.e_function)
    }
}

fn rel_dev<T: Real>(lhs: Complex<T>, rhs: Complex<T>) -> f64 {
    let scale = rhs.norm().max(lhs.norm()).max(T::min_positive_value());
    ((lhs - rhs).norm() / scale).to_f64().unwrap_or(f64::NAN)
}

/// `σ(k) = I[λ1(k)]` for `k < |I|`, then `Iᶜ[λ2(k − |I|)]`.
pub fn splice_permutation(i: &[usize], ic: &[usize], lambda1: &[usize], lambda2: &[usize]) -> Vec<usize> {
    lambda1
        .iter()
        .map(|&k| i[k])
        .chain(lambda2.iter().map(|&k| ic[k]))
        .collect()
}

fn ordered_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for r in 1..=items.len() {
        for first in items.iter().copied().combinations(r) {
            let rest: Vec<usize> = items.iter().copied().filter(|v| !first.contains(v)).collect();
            for mut tail in ordered_partitions(&rest) {
                tail.insert(0, first.clone());
                out.push(tail);
            }
        }
    }
    out
}

fn draw<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex<T>> {
    (0..n)
        .map(|_| {
            let r: f64 = rng.random_range(0.5..1.6);
            let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            Complex::from_polar(T::lit(r), T::lit(th))
        })
        .collect()
}

fn admissible<T: Real>(xi: &[Complex<T>], zeta: &[Complex<T>], delta: T, table: &PermutationTable) -> bool {
    let m = T::lit(DRAW_MARGIN);
    let n = xi.len();
    for v in [xi, zeta] {
        for i in 0..n {
            for j in 0..n {
                if pair_factor(v[i], v[j], delta).norm() < m || (i != j && (v[i] - v[j]).norm() < m) {
                    return false;
                }
            }
        }
    }
    for (s, _) in table.iter() {
        for (mu, _) in table.iter() {
            for j in 0..n {
                let f = (j..n).fold(one::<T>(), |a, k| a * xi[s[k]] * zeta[mu[k]]);
                if (one::<T>() - f).norm() < m {
                    return false;
                }
            }
        }
    }
    true
}

fn ik_lhs<T: Real>(xi: &[Complex<T>], zeta: &[Complex<T>], delta: T, table: &PermutationTable) -> Complex<T> {
    let n = xi.len();
    let mut acc = CompensatedSum::new();
    for (s, _) in table.iter() {
        let bs = b_sigma(s, xi, delta);
        for (mu, _) in table.iter() {
            let den = (0..n).fold(one::<T>(), |d, j| {
                d * (one::<T>() - (j..n).fold(one::<T>(), |a, k| a * xi[s[k]] * zeta[mu[k]]))
            });
            acc.add(bs * b_sigma(mu, zeta, delta) / den);
        }
    }
    acc.value()
}

/// Checks the kernel identities on `trials` random tuple pairs of length `n`.
pub fn verify_identities<T: Real>(n: usize, trials: usize, seed: u64, delta: T) -> Result<IdentityDeviations> {
    if n == 0 || n > 3 {
        return Err(Error::InvalidParams(format!("identity checks need 1 <= n <= 3, got {n}")));
    }
    let table = PermutationTable::shared(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx: Vec<usize> = (0..n).collect();
    let partitions = ordered_partitions(&idx);
    let mut out = IdentityDeviations {
        n,
        trials,
        redraws: 0,
        b_decomposition: 0.0,
        ik_sum: 0.0,
        subset_sum: 0.0,
        e_function: 0.0,
        permutation_decomposition: true,
    };

    for s in 0..=n {
        let mut seen = std::collections::HashSet::new();
        for i in idx.iter().copied().combinations(s) {
            let ic: Vec<usize> = idx.iter().copied().filter(|v| !i.contains(v)).collect();
            for l1 in (0..s).permutations(s) {
                for l2 in (0..n - s).permutations(n - s) {
                    let sigma = splice_permutation(&i, &ic, &l1, &l2);
                    let maps_into = sigma[..s].iter().all(|v| i.contains(v));
                    out.permutation_decomposition &= maps_into && seen.insert(sigma);
                }
            }
        }
        out.permutation_decomposition &= seen.len() == table.len();
    }

    for _ in 0..trials {
        let mut attempts = 0;
        let (xi, zeta) = loop {
            let xi = draw::<T>(&mut rng, n);
            let zeta = draw::<T>(&mut rng, n);
            if admissible(&xi, &zeta, delta, table) {
                break (xi, zeta);
            }
            attempts += 1;
            out.redraws += 1;
            if attempts >= MAX_REDRAWS {
                return Err(Error::SamplingExhausted(MAX_REDRAWS));
            }
        };

        // B_σ splits along any index set.
        for s in 1..n {
            for i in idx.iter().copied().combinations(s) {
                let ic: Vec<usize> = idx.iter().copied().filter(|v| !i.contains(v)).collect();
                let (xi_i, xi_c) = (restrict(&xi, &i), restrict(&xi, &ic));
                let g = g_fn(&xi, &[&i, &ic], delta)?;
                let fc = ic.iter().fold(one::<T>(), |a, &k| a * xi[k]);
                for l1 in (0..s).permutations(s) {
                    for l2 in (0..n - s).permutations(n - s) {
                        let sigma = splice_permutation(&i, &ic, &l1, &l2);
                        let lhs = b_sigma(&sigma, &xi, delta);
                        let rhs = b_sigma(&l1, &xi_i, delta) * g * b_sigma(&l2, &xi_c, delta) * cpow(fc, s as i64);
                        out.b_decomposition = out.b_decomposition.max(rel_dev(lhs, rhs));
                    }
                }
            }
        }

        // Permutation double sum against the determinant.
        let f_all = f_prod(&xi, &zeta, &idx, &idx)?;
        let gamma = gamma_det(&xi, &zeta, delta)?;
        let lhs = ik_lhs(&xi, &zeta, delta, table);
        out.ik_sum = out.ik_sum.max(rel_dev(lhs, f_all * gamma));

        // E on every equal-size subset pair.
        for s in 1..=n {
            for p in SubsetPair::all_of_size(n, s) {
                let (xs, zs) = (restrict(&xi, &p.i1), restrict(&zeta, &p.i2));
                let sub = PermutationTable::shared(s)?;
                let f = f_prod(&xi, &zeta, &p.i1, &p.i2)?;
                let e = (f.inv() - one::<T>()) * ik_lhs(&xs, &zs, delta, sub);
                let rhs = (one::<T>() - f) * gamma_det(&xs, &zs, delta)?;
                out.e_function = out.e_function.max(rel_dev(e, rhs));
            }
        }

        // Alternating sum over ordered partitions with matching block sizes.
        let mut acc = CompensatedSum::new();
        for p1 in &partitions {
            for p2 in &partitions {
                if p1.len() != p2.len() || p1.iter().zip(p2).any(|(a, b)| a.len() != b.len()) {
                    continue;
                }
                let b1: Vec<&[usize]> = p1.iter().map(Vec::as_slice).collect();
                let b2: Vec<&[usize]> = p2.iter().map(Vec::as_slice).collect();
                let mut term = g_fn(&xi, &b1, delta)? * g_fn(&zeta, &b2, delta)?;
                if p1.len() % 2 == 1 {
                    term = -term;
                }
                let mut before = 0i64;
                for (a, b) in p1.iter().zip(p2) {
                    let fa = f_prod(&xi, &zeta, a, b)?;
                    term = term * cpow(fa, before) * gamma_det(&restrict(&xi, a), &restrict(&zeta, b), delta)?;
                    before += a.len() as i64;
                }
                acc.add(term);
            }
        }
        let rhs = cpow(f_all, 2 * n as i64 - 3) * gamma_det(&inverted(&xi), &inverted(&zeta), delta)?;
        out.subset_sum = out.subset_sum.max(rel_dev(acc.value(), rhs));
    }
    Ok(out)
}

/// Max relative deviation of `G(ξ;I1,I1ᶜ) G(ζ;I2,I2ᶜ) F(I1ᶜ,I2ᶜ)^L = G(ξ;I1ᶜ,I1) G(ζ;I2ᶜ,I2)`
/// over root pairs of a spectrum and all equal-size subset pairs. Holds
/// only for Bethe roots. At most `max_pairs` root pairs are visited.
pub fn verify_bethe_g_identity<T: Real>(spectrum: &SpectralSet<T>, max_pairs: usize) -> Result<f64> {
    let n = spectrum.params.n;
    let l = spectrum.params.l as i64;
    let delta = spectrum.params.delta;
    let mut worst = 0.0f64;
    let pairs = spectrum
        .roots
        .iter()
        .cartesian_product(spectrum.roots.iter())
        .take(max_pairs);
    for (a, b) in pairs {
        let (xi, zeta) = (&a.entries, &b.entries);
        for s in 0..=n {
            for p in SubsetPair::all_of_size(n, s) {
                let fc = f_prod(xi, zeta, &p.c1, &p.c2)?;
                let lhs = g_fn(xi, &[&p.i1, &p.c1], delta)? * g_fn(zeta, &[&p.i2, &p.c2], delta)? * cpow(fc, l);
                let rhs = g_fn(xi, &[&p.c1, &p.i1], delta)? * g_fn(zeta, &[&p.c2, &p.i2], delta)?;
                worst = worst.max(rel_dev(lhs, rhs));
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::amplitude;
    use crate::dynamics::Evolution;
    use crate::solver::{enumerate_spectrum, ContinuationPlan};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn spectrum(l: usize, n: usize, delta: f64) -> SpectralSet<f64> {
        enumerate_spectrum(&ContinuationPlan::new(delta), &ModelParams::new(l, n, delta).unwrap()).unwrap()
    }

    #[test]
    fn b_sigma_examples() {
        assert_eq!(b_sigma(&[0], &[c(0.3, 0.2)], 0.4), c(0.3, 0.2));
        let (a, b) = (c(0.3, 1.1), c(-0.7, 0.2));
        let want = (1.0 + a * b) * a * b * b;
        assert!((b_sigma(&[0, 1], &[a, b], 0.0) - want).norm() < 1e-14);
        let xi = [c(0.3, 1.1), c(-0.7, 0.2), c(0.9, -0.4)];
        let delta = 0.27;
        for (sigma, _) in PermutationTable::shared(3).unwrap().iter() {
            let mono = (0..3).fold(c(1.0, 0.0), |m, j| m * xi[sigma[j]].powi(j as i32 + 1));
            let rhs = amplitude(sigma, &xi, delta).unwrap() * vandermonde_like(&xi, delta) * mono;
            assert!(rel_dev(b_sigma(sigma, &xi, delta), rhs) < 1e-13);
        }
    }

    #[test]
    fn f_and_g_examples() {
        let (xi, zeta) = ([c(2.0, 0.0), c(3.0, 0.0)], [c(5.0, 0.0), c(7.0, 0.0)]);
        assert_eq!(f_prod(&xi, &zeta, &[], &[]).unwrap(), c(1.0, 0.0));
        assert_eq!(f_prod(&xi, &zeta, &[0, 1], &[0, 1]).unwrap(), c(210.0, 0.0));
        assert_eq!(f_prod(&xi, &zeta, &[0], &[1]).unwrap(), c(14.0, 0.0));
        assert!(f_prod(&xi, &zeta, &[0], &[]).is_err());

        let delta = 0.25;
        assert_eq!(g_fn(&xi, &[&[0, 1]], delta).unwrap(), c(1.0, 0.0));
        assert_eq!(g_fn(&xi, &[&[0], &[1]], delta).unwrap(), c(6.0, 0.0));
        assert_eq!(g_fn(&xi, &[&[1], &[0]], delta).unwrap(), c(-5.5, 0.0));
        assert!(g_fn(&xi, &[&[0], &[0]], delta).is_err());
        assert!(g_fn(&xi, &[&[2]], delta).is_err());
    }

    #[test]
    fn gamma_examples() {
        let (x, z) = (c(0.3, 0.4), c(1.2, -0.5));
        assert!((gamma_det(&[x], &[z], 0.2).unwrap() - (1.0 - x * z).inv()).norm() < 1e-14);
        assert_eq!(gamma_det::<f64>(&[], &[], 0.2).unwrap(), c(1.0, 0.0));
        let xi = [c(0.3, 0.4), c(-0.8, 0.1)];
        let zeta = [c(1.2, -0.5), c(0.2, 0.9)];
        let d = 0.15;
        let e = |i: usize, j: usize| {
            let k = 1 - j;
            (xi[i] + zeta[k] - 2.0 * d * xi[i] * zeta[k]) / (1.0 - xi[i] * zeta[j])
        };
        let oracle = e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0);
        assert!(rel_dev(gamma_det(&xi, &zeta, d).unwrap(), oracle) < 1e-12);
        assert!(matches!(
            gamma_det(&[c(2.0, 0.0)], &[c(0.5, 0.0)], 0.0),
            Err(Error::IkSingularity { i: 0, j: 0, .. })
        ));
    }

    #[test]
    fn single_particle_kernel() {
        let params = ModelParams::new(5, 1, 0.2).unwrap();
        let (x, z) = (c(0.6, 0.8), c(0.0, 1.0));
        let k = f_kernel(3, 0.7, &[x], &[z], &params).unwrap();
        let de = energy(&[x], 0.2) - energy(&[z], 0.2);
        let want = (x * z).powi(3) * (c(0.0, -0.7) * de).exp();
        assert!((k - want).norm() < 1e-13);
        let same = f_kernel(2, 5.0, &[x], &[x], &params).unwrap();
        assert!((same - (x * x).powi(2)).norm() < 1e-13);
    }

    #[test]
    fn subset_pairs() {
        let p = SubsetPair::new(vec![2, 0], vec![1, 2], 3).unwrap();
        assert_eq!((p.i1.clone(), p.c1.clone(), p.c2.clone()), (vec![0, 2], vec![1], vec![0]));
        assert!(SubsetPair::new(vec![0], vec![], 3).is_err());
        assert!(SubsetPair::new(vec![3], vec![0], 3).is_err());
        assert_eq!(SubsetPair::all_of_size(3, 2).len(), 9);
        assert_eq!(colex_subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(colex_subsets(4, 1), vec![vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn pair_inner_matches_naive_sum() {
        let s = spectrum(7, 3, 0.04);
        let configs = enumerate_configurations(&s.params);
        let mut checked = 0;
        for a in s.roots.iter().take(6) {
            for b in s.roots.iter().skip(3).take(6) {
                let Ok(fast) = pair_inner_origin(&a.entries, &b.entries, 0.04) else {
                    continue;
                };
                let ka = RootKernel::forward(&a.entries, 0.04, 7).unwrap();
                let kb = RootKernel::forward(&b.entries, 0.04, 7).unwrap();
                let naive = crate::numeric::compensated_sum(
                    configs
                        .iter()
                        .filter(|c| c.contains(0))
                        .map(|c| ka.u(&c.exponents()).unwrap() * kb.u(&c.exponents()).unwrap()),
                );
                assert!((fast - naive).norm() <= 1e-9 * naive.norm().max(1.0));
                checked += 1;
            }
        }
        assert!(checked > 20);
    }

    #[test]
    fn fast_matches_naive_small() {
        let s = spectrum(7, 2, 0.1);
        let y = Configuration::new(vec![2, 3], &s.params).unwrap();
        let fast = FastOnePoint::new(&s, &y, LambdaConvention::Doubled).unwrap();
        let naive = Evolution::new(&s, &y, LambdaConvention::Doubled).unwrap();
        assert!(fast.fallback_pairs() > 0);
        for t in [0.0, 1.0] {
            let nv = naive.profile(t).unwrap();
            let fv = fast.profile(t).unwrap();
            let total: f64 = fv.iter().map(|v| v.rho).sum();
            assert!((total - 2.0).abs() < 1e-6);
            for (a, b) in nv.iter().zip(&fv) {
                assert!((a - b.rho).abs() < 1e-6);
                assert!(b.imag_residue < 1e-8);
            }
        }
    }

    #[test]
    fn identity_small_cases() {
        for n in 1..=3 {
            let d = verify_identities::<f64>(n, 10, 42, 0.3).unwrap();
            assert!(d.permutation_decomposition);
            assert!(d.max_deviation() < 1e-9, "{d:?}");
        }
        assert!(verify_identities::<f64>(4, 1, 0, 0.1).is_err());
    }

    #[test]
    fn subset_identity_base_case() {
        let (x, z) = (c(0.7, 0.3), c(-0.2, 1.4));
        let lhs = -gamma_det(&[x], &[z], 0.1).unwrap();
        assert!((lhs - (x * z - 1.0).inv()).norm() < 1e-14);
    }

    #[test]
    fn bethe_g_identity_on_roots() {
        let s = spectrum(7, 2, 0.1);
        assert!(verify_bethe_g_identity(&s, 200).unwrap() < 1e-9);
    }
}
