//! `bethe-ring`: spectra, completeness checks, eigen-certification and
//! one-point functions for the periodic XXZ ring.

mod grid;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bethe_core::completeness::{check_completeness, select_lambda_convention, CompletenessReport};
use bethe_core::config::{enumerate_configurations, Configuration};
use bethe_core::dynamics::Evolution;
use bethe_core::fastpoint::FastOnePoint;
use bethe_core::hamiltonian::HamiltonianAction;
use bethe_core::io::{read_spectrum, spectrum_to_json, ParamsRecord};
use bethe_core::solver::{enumerate_spectrum, ContinuationPlan};
use bethe_core::{LambdaConvention, ModelParams, Spectrum};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use grid::TimeGrid;

const CSV_HEADER: &str = "# bethe-ring v1";

#[derive(Parser, Debug)]
#[command(name = "bethe-ring", version, about = "Bethe spectra and dynamics on the periodic XXZ ring")]
struct Cli {
    /// Worker threads; defaults to all available cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Enumerate every Bethe root class by continuation from Δ = 0.
    Solve {
        #[arg(short = 'L')]
        l: usize,
        #[arg(short = 'N')]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        #[arg(long, default_value_t = 0.02)]
        step: f64,
        /// Spectrum JSON path; stdout when absent.
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Check that the transition matrix of a spectrum is the identity.
    Verify {
        #[arg(long)]
        spectrum: PathBuf,
        /// Defaults to 1e-10 at Δ = 0 and 1e-7 otherwise.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = Variant::Doubled)]
        variant: Variant,
        /// JSON report path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Relative eigen-residual of every Bethe vector.
    Eigencheck {
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Amplitudes of Ψ(t) started from a single configuration.
    Evolve {
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(short = 'y', value_delimiter = ',', required = true)]
        y: Vec<i64>,
        /// `start:stop:count` or a single time.
        #[arg(long = "t")]
        t: TimeGrid,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// One-point function ρ(x, t) on every site and grid time.
    Onepoint {
        #[command(flatten)]
        source: Source,
        #[arg(short = 'y', value_delimiter = ',', required = true)]
        y: Vec<i64>,
        #[arg(long = "t")]
        t: TimeGrid,
        #[arg(long, value_enum, default_value_t = Method::Both)]
        method: Method,
        /// CSV path; stdout when absent.
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
        /// Diagnostics JSON path; defaults to `<out>.json` when `-o` is given.
        #[arg(long)]
        diagnostics: Option<PathBuf>,
    },
}

#[derive(clap::Args, Debug)]
struct Source {
    #[arg(long, conflicts_with_all = ["l", "n", "delta"], required_unless_present_all = ["l", "n", "delta"])]
    spectrum: Option<PathBuf>,
    #[arg(short = 'L', requires_all = ["n", "delta"])]
    l: Option<usize>,
    #[arg(short = 'N')]
    n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 0.02)]
    step: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Variant {
    Literal,
    Doubled,
    /// Run both and keep the better one.
    Auto,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Method {
    Naive,
    Fast,
    Both,
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    const SOLVER: u8 = 2;
    const VERIFY: u8 = 3;
    const IO: u8 = 4;
    const USAGE: u8 = 5;

    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn io_fail(e: impl std::fmt::Display) -> Failure {
    Failure::new(Failure::IO, e.to_string())
}

fn load(path: &Path) -> Result<Spectrum, Failure> {
    read_spectrum(path).map_err(|e| io_fail(format!("{}: {e}", path.display())))
}

fn solve(l: usize, n: usize, delta: f64, step: f64) -> Result<Spectrum, Failure> {
    let params = ModelParams::new(l, n, delta).map_err(|e| Failure::new(Failure::USAGE, e.to_string()))?;
    let plan = ContinuationPlan::new(delta).with_step(step);
    plan.validate().map_err(|e| Failure::new(Failure::USAGE, e.to_string()))?;
    enumerate_spectrum(&plan, &params).map_err(|e| Failure::new(Failure::SOLVER, e.to_string()))
}

fn configuration(y: &[i64], spectrum: &Spectrum) -> Result<Configuration, Failure> {
    let sites = y
        .iter()
        .map(|&s| usize::try_from(s).map_err(|_| Failure::new(Failure::USAGE, format!("negative site {s} in y"))))
        .collect::<Result<Vec<_>, _>>()?;
    Configuration::new(sites, &spectrum.params).map_err(|e| Failure::new(Failure::USAGE, e.to_string()))
}

/// Writes to `path`, or stdout when absent. Content is fully built before
/// anything is written.
fn emit(path: Option<&Path>, content: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| io_fail(format!("{}: {e}", p.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn cmd_solve(l: usize, n: usize, delta: f64, step: f64, out: Option<&Path>) -> Outcome {
    let s = solve(l, n, delta, step)?;
    let json = spectrum_to_json(&s).map_err(io_fail)?;
    emit(out, &json)?;
    let mut summary = format!("solved L={l} N={n} delta={delta}: {} classes, max residual {:.3e}", s.len(), s.max_residual());
    if s.params.even_length_warning() {
        summary.push_str(", warning: even L");
    }
    eprintln!("{summary}");
    Ok(())
}

fn cmd_verify(path: &Path, tol: Option<f64>, variant: Variant, report: Option<&Path>) -> Outcome {
    let s = load(path)?;
    let tol = tol.unwrap_or(if s.params.delta == 0.0 { 1e-10 } else { 1e-7 });
    let fail = |e: bethe_core::Error| Failure::new(Failure::VERIFY, e.to_string());
    let (chosen, reports): (CompletenessReport, Vec<CompletenessReport>) = match variant {
        Variant::Auto => {
            let (conv, all) = select_lambda_convention(&s, tol).map_err(fail)?;
            let best = all.iter().find(|r| r.variant == conv).cloned().expect("selected report");
            (best, all)
        }
        Variant::Literal | Variant::Doubled => {
            let conv = if variant == Variant::Literal {
                LambdaConvention::Literal
            } else {
                LambdaConvention::Doubled
            };
            let r = check_completeness(&s, conv, tol).map_err(fail)?;
            (r.clone(), vec![r])
        }
    };
    let mut text = String::new();
    for r in &reports {
        text.push_str(&r.to_text());
    }
    if variant == Variant::Auto {
        let _ = writeln!(text, "selected variant {}", chosen.variant.name());
    }
    if let Some(p) = report {
        let json = serde_json::to_string_pretty(&reports).map_err(io_fail)? + "\n";
        fs::write(p, json).map_err(|e| io_fail(format!("{}: {e}", p.display())))?;
    }
    print!("{text}");
    if chosen.pass {
        Ok(())
    } else {
        Err(Failure::new(
            Failure::VERIFY,
            format!("identity deviation {:.3e} exceeds {tol:.1e}", chosen.max_deviation()),
        ))
    }
}

fn cmd_eigencheck(path: &Path, tol: f64) -> Outcome {
    let s = load(path)?;
    let h = HamiltonianAction::new(s.params).map_err(io_fail)?;
    let residuals = s
        .roots
        .par_iter()
        .map(|r| h.eigen_residual(r))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::new(Failure::VERIFY, e.to_string()))?;
    let mut text = String::from("index\tseed\tresidual\n");
    let mut bad = Vec::new();
    for (i, (r, res)) in s.roots.iter().zip(&residuals).enumerate() {
        let seed = r.seed_index.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",");
        let _ = writeln!(text, "{i}\t{seed}\t{res:.3e}");
        if !(*res <= tol) {
            bad.push(format!("{i} (seed {seed}, residual {res:.3e})"));
        }
    }
    let worst = residuals.iter().fold(0.0f64, |m, r| m.max(*r));
    let _ = writeln!(text, "max residual {worst:.3e}, tol {tol:.1e}");
    print!("{text}");
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(Failure::VERIFY, format!("roots above tolerance: {}", bad.join("; "))))
    }
}

fn cmd_evolve(path: &Path, y: &[i64], grid: &TimeGrid, out: Option<&Path>) -> Outcome {
    let s = load(path)?;
    let y = configuration(y, &s)?;
    let ev = Evolution::new(&s, &y, LambdaConvention::default()).map_err(|e| Failure::new(Failure::VERIFY, e.to_string()))?;
    let configs = enumerate_configurations(&s.params);
    let times = grid.values();
    let waves = times
        .par_iter()
        .map(|&t| ev.wavefunction(t))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::new(Failure::VERIFY, e.to_string()))?;
    let mut csv = String::new();
    csv.push_str(CSV_HEADER);
    csv.push('\n');
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "config", "re", "im", "probability"]).map_err(io_fail)?;
    for (t, psi) in times.iter().zip(&waves) {
        for (c, a) in configs.iter().zip(&psi.amplitudes) {
            let sites = c.sites().iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ");
            w.write_record([fmt_f(*t), sites, fmt_f(a.re), fmt_f(a.im), fmt_f(a.norm_sqr())])
                .map_err(io_fail)?;
        }
    }
    csv.push_str(&String::from_utf8(w.into_inner().map_err(io_fail)?).map_err(io_fail)?);
    emit(out, &csv)
}

#[derive(Serialize)]
struct Diagnostics {
    params: ParamsRecord,
    y: Vec<usize>,
    method: Method,
    variant: LambdaConvention,
    times: usize,
    rows: usize,
    fallback_pairs: Option<usize>,
    max_imag_residue: Option<f64>,
    max_abs_diff: Option<f64>,
    max_sum_rule_dev: f64,
}

fn cmd_onepoint(
    source: &Source,
    y: &[i64],
    grid: &TimeGrid,
    method: Method,
    out: Option<&Path>,
    diagnostics: Option<&Path>,
) -> Outcome {
    let s = match (&source.spectrum, source.l, source.n, source.delta) {
        (Some(p), ..) => load(p)?,
        (None, Some(l), Some(n), Some(delta)) => solve(l, n, delta, source.step)?,
        _ => return Err(Failure::new(Failure::USAGE, "either --spectrum or -L, -N and --delta is required")),
    };
    let y = configuration(y, &s)?;
    let conv = LambdaConvention::default();
    let eval = |e: bethe_core::Error| Failure::new(Failure::VERIFY, e.to_string());
    let times = grid.values();
    let l = s.params.l;

    let naive = if method != Method::Fast {
        let ev = Evolution::new(&s, &y, conv).map_err(eval)?;
        Some(times.par_iter().map(|&t| ev.profile(t)).collect::<Result<Vec<_>, _>>().map_err(eval)?)
    } else {
        None
    };
    let mut fallback_pairs = None;
    let fast = if method != Method::Naive {
        let fp = FastOnePoint::new(&s, &y, conv).map_err(eval)?;
        fallback_pairs = Some(fp.fallback_pairs());
        Some(times.par_iter().map(|&t| fp.profile(t)).collect::<Result<Vec<_>, _>>().map_err(eval)?)
    } else {
        None
    };

    let mut max_imag = None::<f64>;
    let mut max_diff = None::<f64>;
    let mut max_sum_dev = 0.0f64;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "t", "rho_naive", "rho_fast"]).map_err(io_fail)?;
    for (k, &t) in times.iter().enumerate() {
        let mut sums = (0.0, 0.0);
        for x in 0..l {
            let a = naive.as_ref().map(|n| n[k][x]);
            let b = fast.as_ref().map(|f| f[k][x]);
            if let Some(b) = b {
                max_imag = Some(max_imag.unwrap_or(0.0).max(b.imag_residue));
                sums.1 += b.rho;
            }
            if let Some(a) = a {
                sums.0 += a;
            }
            if let (Some(a), Some(b)) = (a, b) {
                max_diff = Some(max_diff.unwrap_or(0.0).max((a - b.rho).abs()));
            }
            w.write_record([
                x.to_string(),
                fmt_f(t),
                a.map(fmt_f).unwrap_or_default(),
                b.map(|v| fmt_f(v.rho)).unwrap_or_default(),
            ])
            .map_err(io_fail)?;
        }
        let n = s.params.n as f64;
        if naive.is_some() {
            max_sum_dev = max_sum_dev.max((sums.0 - n).abs());
        }
        if fast.is_some() {
            max_sum_dev = max_sum_dev.max((sums.1 - n).abs());
        }
    }
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    csv.push_str(&String::from_utf8(w.into_inner().map_err(io_fail)?).map_err(io_fail)?);

    let diag = Diagnostics {
        params: ParamsRecord::from_params(&s.params),
        y: y.sites().to_vec(),
        method,
        variant: conv,
        times: times.len(),
        rows: times.len() * l,
        fallback_pairs,
        max_imag_residue: max_imag,
        max_abs_diff: max_diff,
        max_sum_rule_dev: max_sum_dev,
    };
    let diag_json = serde_json::to_string_pretty(&diag).map_err(io_fail)? + "\n";
    let diag_path = diagnostics.map(Path::to_path_buf).or_else(|| {
        out.map(|p| {
            let mut q = p.as_os_str().to_owned();
            q.push(".json");
            PathBuf::from(q)
        })
    });
    emit(out, &csv)?;
    if let Some(p) = diag_path {
        fs::write(&p, diag_json).map_err(|e| io_fail(format!("{}: {e}", p.display())))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::new(Failure::USAGE, "--threads must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::new(Failure::USAGE, e.to_string()))?;
    }
    match &cli.command {
        Command::Solve { l, n, delta, step, out } => cmd_solve(*l, *n, *delta, *step, out.as_deref()),
        Command::Verify {
            spectrum,
            tol,
            variant,
            report,
        } => cmd_verify(spectrum, *tol, *variant, report.as_deref()),
        Command::Eigencheck { spectrum, tol } => cmd_eigencheck(spectrum, *tol),
        Command::Evolve { spectrum, y, t, out } => cmd_evolve(spectrum, y, t, out.as_deref()),
        Command::Onepoint {
            source,
            y,
            t,
            method,
            out,
            diagnostics,
        } => cmd_onepoint(source, y, t, *method, out.as_deref(), diagnostics.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { Failure::USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
