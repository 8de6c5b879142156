//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and
//! exits nonzero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use bethe_core::completeness::check_completeness;
use bethe_core::config::config_rank;
use bethe_core::dynamics::Evolution;
use bethe_core::fastpoint::{verify_bethe_g_identity, verify_identities, FastOnePoint};
use bethe_core::hamiltonian::HamiltonianAction;
use bethe_core::{enumerate_configurations, enumerate_spectrum, Complex, Configuration, ContinuationPlan, LambdaConvention, ModelParams, Spectrum, C64};

type Check = Result<String, String>;

fn spectrum(l: usize, n: usize, delta: f64) -> Spectrum {
    enumerate_spectrum(&ContinuationPlan::new(delta), &ModelParams::new(l, n, delta).unwrap()).unwrap()
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Polynomial form of the Bethe equations, scaled by `Π_j |b_ij|`.
fn oracle_residual(xi: &[C64], l: usize, delta: f64) -> f64 {
    let n = xi.len();
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    (0..n)
        .map(|i| {
            let (mut num, mut den) = (Complex::new(1.0, 0.0), Complex::new(1.0, 0.0));
            for j in 0..n {
                num *= 1.0 + xi[i] * xi[j] - 2.0 * delta * xi[i];
                den *= 1.0 + xi[i] * xi[j] - 2.0 * delta * xi[j];
            }
            (xi[i].powu(l as u32) * den - sign * num).norm() / den.norm()
        })
        .fold(0.0, f64::max)
}

/// Sector block of the 2^L matrix built from the two-site interaction.
fn local_block_sector(l: usize, n: usize, delta: f64) -> Vec<Vec<f64>> {
    let dim = 1usize << l;
    let mut full = vec![vec![0.0; dim]; dim];
    for i in 0..l {
        let j = (i + 1) % l;
        for col in 0..dim {
            let (a, b) = ((col >> i) & 1, (col >> j) & 1);
            if a != b {
                full[col][col] -= delta;
                let row = col ^ (1 << i) ^ (1 << j);
                full[row][col] += 1.0;
            }
        }
    }
    let params = ModelParams::new(l, n, delta).unwrap();
    let masks: Vec<usize> = enumerate_configurations(&params)
        .iter()
        .map(|c| c.sites().iter().fold(0, |m, &s| m | (1 << s)))
        .collect();
    masks.iter().map(|&r| masks.iter().map(|&c| full[r][c]).collect()).collect()
}

fn within(label: &str, value: f64, tol: f64) -> Check {
    let msg = format!("{label} {value:.3e} (tol {tol:.0e})");
    if value <= tol {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn timed(limit: Duration, start: Instant, check: Check) -> Check {
    let e = start.elapsed();
    match check {
        Ok(m) if e <= limit => Ok(format!("{m}, {:.2}s", e.as_secs_f64())),
        Ok(m) => Err(format!("{m}, {:.2}s exceeds {}s", e.as_secs_f64(), limit.as_secs())),
        Err(m) => Err(format!("{m}, {:.2}s", e.as_secs_f64())),
    }
}

fn completeness(cases: &[(usize, usize, f64)], tol: f64) -> Check {
    let mut worst = 0.0f64;
    for &(n, l, delta) in cases {
        let r = check_completeness(&spectrum(l, n, delta), LambdaConvention::Doubled, tol).map_err(|e| e.to_string())?;
        worst = worst.max(r.max_deviation());
    }
    within(&format!("{} cases, max |M - I|", cases.len()), worst, tol)
}

fn identity_zero() -> Check {
    let t = Instant::now();
    let r = completeness(&[(1, 5, 0.0), (2, 5, 0.0), (2, 7, 0.0), (3, 7, 0.0)], 1e-10);
    timed(Duration::from_secs(10), t, r)
}

fn identity_interacting() -> Check {
    let t = Instant::now();
    let mut cases = Vec::new();
    for (n, l) in [(2, 7), (2, 9), (3, 7)] {
        for delta in [0.04, -0.04, 0.1, -0.1] {
            cases.push((n, l, delta));
        }
    }
    let r = completeness(&cases, 1e-7).map(|m| format!("{m}, doubled convention"));
    timed(Duration::from_secs(60), t, r)
}

fn cardinality() -> Check {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (n, l) in [(1, 5), (2, 5), (2, 7), (2, 9), (3, 7)] {
        for delta in [0.0, 0.04, -0.04, 0.1, -0.1] {
            let s = spectrum(l, n, delta);
            if s.len() != binomial(l, n) {
                return Err(format!("({n},{l},{delta}): {} classes, want {}", s.len(), binomial(l, n)));
            }
            for (i, a) in s.roots.iter().enumerate() {
                worst = worst.max(oracle_residual(&a.entries, l, delta));
                for b in &s.roots[i + 1..] {
                    if bethe_core::roots::class_distance(&a.entries, &b.entries) <= 1e-8 {
                        return Err(format!("({n},{l},{delta}): duplicate classes"));
                    }
                }
            }
            count += 1;
        }
    }
    within(&format!("{count} spectra complete and distinct, max oracle residual"), worst, 1e-10)
}

fn eigenvectors() -> Check {
    for delta in [0.0, 0.1, -0.37] {
        let oracle = local_block_sector(5, 2, delta);
        let dense = HamiltonianAction::new(ModelParams::new(5, 2, delta).unwrap()).unwrap().to_dense();
        for (i, row) in oracle.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if dense[(i, j)] != Complex::new(v, 0.0) {
                    return Err(format!("H differs from local-block assembly at ({i},{j}), delta {delta}"));
                }
            }
        }
    }
    let mut worst = 0.0f64;
    for delta in [0.0, 0.1] {
        let s = spectrum(7, 3, delta);
        let h = HamiltonianAction::new(s.params).unwrap();
        for r in &s.roots {
            worst = worst.max(h.eigen_residual(r).map_err(|e| e.to_string())?);
        }
    }
    within("H exact at (2,5); max eigen-residual at (3,7)", worst, 1e-8)
}

fn dynamics_oracle() -> Check {
    let s = spectrum(7, 2, 0.1);
    let h = HamiltonianAction::new(s.params).unwrap().to_dense();
    let d = h.dim();
    let mut worst = 0.0f64;
    for y in [[0, 3], [2, 3]] {
        let y = Configuration::new(y.to_vec(), &s.params).unwrap();
        let ry = config_rank(&y, &s.params).unwrap();
        let ev = Evolution::new(&s, &y, LambdaConvention::Doubled).map_err(|e| e.to_string())?;
        for t in [0.5, 2.0] {
            let u = nalgebra::DMatrix::from_fn(d, d, |i, j| nalgebra::Complex::new(0.0, -t) * h[(i, j)]).exp();
            let psi = ev.wavefunction(t).map_err(|e| e.to_string())?;
            for x in 0..d {
                worst = worst.max((psi.amplitudes[x] - u[(x, ry)]).norm());
            }
        }
    }
    within("max |Psi - exp(-itH) e_y|", worst, 1e-6)
}

fn sum_rules() -> Check {
    let (mut norm_dev, mut sum_dev) = (0.0f64, 0.0f64);
    for (n, l, delta) in [(1, 5, 0.3), (2, 7, 0.0), (2, 7, 0.1), (2, 9, 0.04), (3, 7, 0.04), (3, 7, -0.1)] {
        let s = spectrum(l, n, delta);
        let y = Configuration::new((0..n).map(|k| 2 * k).collect(), &s.params).unwrap();
        let ev = Evolution::new(&s, &y, LambdaConvention::Doubled).map_err(|e| e.to_string())?;
        for t in [0.0, 0.5, 2.0, 10.0] {
            norm_dev = norm_dev.max((ev.wavefunction(t).unwrap().norm() - 1.0).abs());
            let total: f64 = ev.profile(t).unwrap().iter().sum();
            sum_dev = sum_dev.max((total - n as f64).abs());
        }
    }
    let msg = format!("max |sum rho - N| {sum_dev:.3e} (tol 1e-8), max |norm - 1| {norm_dev:.3e} (tol 1e-9)");
    if sum_dev <= 1e-8 && norm_dev <= 1e-9 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn fast_equivalence() -> Check {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut fallback = Vec::new();
    for (n, l, delta, ys) in [
        (2, 7, 0.1, vec![vec![2, 3], vec![0, 4]]),
        (2, 9, 0.04, vec![vec![4, 5], vec![1, 6]]),
        (3, 7, 0.04, vec![vec![2, 3, 4], vec![0, 2, 5]]),
    ] {
        let s = spectrum(l, n, delta);
        for y in ys {
            let y = Configuration::new(y, &s.params).unwrap();
            let naive = Evolution::new(&s, &y, LambdaConvention::Doubled).map_err(|e| e.to_string())?;
            let fast = FastOnePoint::new(&s, &y, LambdaConvention::Doubled).map_err(|e| e.to_string())?;
            fallback.push(fast.fallback_pairs());
            for t in [0.0, 0.5, 2.0] {
                let a = naive.profile(t).unwrap();
                let b = fast.profile(t).unwrap();
                for (p, q) in a.iter().zip(&b) {
                    worst = worst.max((p - q.rho).abs());
                }
            }
        }
    }
    let label = format!("fallback pairs {fallback:?}, max |rho_fast - rho_naive|");
    timed(Duration::from_secs(300), start, within(&label, worst, 1e-6))
}

fn identity_suite() -> Check {
    let mut worst = 0.0f64;
    for n in 1..=3 {
        for (k, delta) in [0.0, 0.04, -0.1, 0.3].into_iter().enumerate() {
            let d = verify_identities(n, 200, 17 + k as u64, delta).map_err(|e| e.to_string())?;
            if !d.permutation_decomposition {
                return Err(format!("permutation decomposition is not a bijection at n={n}"));
            }
            worst = worst.max(d.max_deviation());
        }
    }
    for (n, l, delta) in [(2, 7, 0.1), (3, 7, 0.04), (2, 9, -0.04)] {
        let dev = verify_bethe_g_identity(&spectrum(l, n, delta), usize::MAX).map_err(|e| e.to_string())?;
        worst = worst.max(dev);
    }
    within("200 trials per (n, delta), n <= 3, plus root pairs; max deviation", worst, 1e-9)
}

fn figure_run() -> Check {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().join("figure.csv");
    let status = Command::new(env!("CARGO_BIN_EXE_bethe-ring"))
        .args(["onepoint", "-L", "21", "-N", "3", "--delta", "0.04", "-y", "8,9,10", "--t", "0:10:41", "--method", "naive", "-o"])
        .arg(&out)
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("bethe-ring exited with {status}"));
    }
    let r = check_figure_csv(&out, 21, 3, 41);
    timed(Duration::from_secs(600), start, r)
}

fn check_figure_csv(path: &Path, l: usize, n: usize, times: usize) -> Check {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let mut lines = text.lines();
    if lines.next() != Some("# bethe-ring v1") || lines.next() != Some("x,t,rho_naive,rho_fast") {
        return Err("bad CSV header".into());
    }
    let rows: Vec<(usize, f64, f64)> = lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    if rows.len() != l * times {
        return Err(format!("{} rows, want {}", rows.len(), l * times));
    }
    let (mut indicator, mut sum_dev, mut range) = (0.0f64, 0.0f64, 0.0f64);
    for chunk in rows.chunks(l) {
        let total: f64 = chunk.iter().map(|r| r.2).sum();
        sum_dev = sum_dev.max((total - n as f64).abs());
        for &(x, t, rho) in chunk {
            range = range.max(-rho).max(rho - 1.0);
            if t == 0.0 {
                let want = if (8..=10).contains(&x) { 1.0 } else { 0.0 };
                indicator = indicator.max((rho - want).abs());
            }
        }
    }
    let msg = format!("{} rows, t=0 indicator dev {indicator:.3e}, max |sum - N| {sum_dev:.3e}, range excess {range:.1e}", rows.len());
    if indicator <= 1e-10 && sum_dev <= 1e-8 && range <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("completeness identity, zero anisotropy", identity_zero),
        ("completeness identity, nonzero anisotropy", identity_interacting),
        ("spectrum cardinality", cardinality),
        ("eigenvector certification", eigenvectors),
        ("dynamics against matrix exponential", dynamics_oracle),
        ("sum rules", sum_rules),
        ("fast one-point equals naive", fast_equivalence),
        ("kernel identity suite", identity_suite),
        ("figure run L=21 N=3 delta=0.04 y=8,9,10", figure_run),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(m) => println!("[PASS] {name}: {m}"),
            Err(m) => {
                failed += 1;
                println!("[FAIL] {name}: {m}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
