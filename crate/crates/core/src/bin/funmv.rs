use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use funmv::bench::{bench, BenchCase, MatrixSource};
use funmv::generators::{self, RhsKind};
use funmv::integrator::{run, FilterSpec};
use funmv::mtx::{load_block, load_matrix, save_block, save_matrix, MtxBlock, MtxMatrix};
use funmv::params::select_parameters;
use funmv::{
    funmv, spm_for_option, Complex64, DenseBlock, FunmvConfig, FunmvError, FunmvOption, MatvecCounter, Precision,
    Result, Scalar, Sigma, SparseMatrix, SpmMatrix, TermNorm, ThetaTable, Tolerance,
};

#[derive(Parser)]
#[command(
    name = "funmv",
    version,
    about = "Actions of cos, sin, sinc and their hyperbolic kin on a block"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute C and S for one option.
    Compute(ComputeArgs),
    /// Print the selected (m*, s) as JSON.
    Params(ParamsArgs),
    /// Print theta_m for m = 1..mmax as CSV.
    Theta(ThetaArgs),
    /// Run the trigonometric integrator and write the trajectory as CSV.
    Integrate(IntegrateArgs),
    /// Run a benchmark case and print the result as JSON.
    Bench(BenchArgs),
    /// Write a generator matrix or right-hand side to Matrix Market.
    Gen(GenArgs),
}

#[derive(clap::Args)]
struct ComputeArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    block: PathBuf,
    /// Real or complex, e.g. `2.5` or `1+0.5i`.
    #[arg(long, allow_hyphen_values = true)]
    t: String,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
    option: u8,
    #[arg(long, default_value = "double")]
    tol: Tolerance,
    #[arg(long)]
    no_early_stop: bool,
    #[arg(long, value_enum, default_value_t = NormArg::Inf)]
    term_norm: NormArg,
    #[arg(long)]
    no_shift: bool,
    /// Reuse the S_pm table in this file, or build and write it if absent.
    #[arg(long)]
    spm: Option<PathBuf>,
    #[arg(long)]
    out_c: Option<PathBuf>,
    #[arg(long)]
    out_s: Option<PathBuf>,
    /// Write the report statistics here; `-` for stdout.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum NormArg {
    Inf,
    One,
}

#[derive(Clone, Copy, ValueEnum)]
enum SigmaArg {
    #[value(name = "1")]
    One,
    #[value(name = "0.5")]
    Half,
}

impl From<SigmaArg> for Sigma {
    fn from(s: SigmaArg) -> Self {
        match s {
            SigmaArg::One => Sigma::One,
            SigmaArg::Half => Sigma::Half,
        }
    }
}

#[derive(clap::Args)]
struct ParamsArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, value_enum, default_value_t = SigmaArg::One)]
    sigma: SigmaArg,
    #[arg(long, default_value = "double")]
    tol: Tolerance,
    #[arg(long, default_value_t = 1)]
    n0: usize,
    /// Parameters are selected for `t^(1/sigma) A`.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    t: f64,
    #[arg(long, default_value_t = 25)]
    mmax: usize,
    #[arg(long, default_value_t = 5)]
    pmax: usize,
}

#[derive(clap::Args)]
struct ThetaArgs {
    #[arg(long, default_value = "double")]
    tol: Tolerance,
    #[arg(long, default_value_t = 25)]
    mmax: usize,
}

#[derive(clap::Args)]
struct IntegrateArgs {
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long)]
    y0: PathBuf,
    #[arg(long)]
    yp0: PathBuf,
    #[arg(long)]
    h: f64,
    #[arg(long)]
    steps: usize,
    #[arg(long, default_value = "none")]
    filter: String,
    #[arg(long, default_value = "double")]
    tol: Tolerance,
    /// Adds the forcing `g(y) = eps * sin(y)`.
    #[arg(long, allow_hyphen_values = true)]
    sine_forcing: Option<f64>,
    /// Re-estimate norms at every step instead of reusing S_pm.
    #[arg(long)]
    no_spm_cache: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Poisson,
    Triw,
    Diag,
    File,
}

#[derive(clap::Args)]
struct BenchArgs {
    #[arg(long, value_enum)]
    case: CaseArg,
    #[arg(long, default_value = "double")]
    tol: Tolerance,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Grid size for `poisson`, order for `triw`.
    #[arg(long)]
    size: Option<usize>,
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=6))]
    option: Option<u8>,
    #[arg(long)]
    negate: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Poisson,
    Triw,
    DiagRange,
    DiagSqrt,
    SpringChain,
    RhsCos,
    RhsSin,
    RhsOnes,
    RhsEnds,
}

#[derive(clap::Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: GenKind,
    /// Grid size for `poisson`, order otherwise.
    #[arg(long)]
    size: usize,
    /// Off-diagonal value for `triw`.
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long)]
    negate: bool,
    #[arg(long)]
    out: PathBuf,
}

fn apply_seed(cfg: &mut FunmvConfig) -> Result<()> {
    if let Ok(v) = std::env::var("FUNMV_SEED") {
        cfg.select.normest.seed = v
            .trim()
            .parse()
            .map_err(|_| FunmvError::InvalidInput(format!("FUNMV_SEED must be an unsigned integer, got `{v}`")))?;
    }
    Ok(())
}

fn parse_t(s: &str) -> Result<Complex64> {
    if let Ok(v) = s.trim().parse::<f64>() {
        return Ok(Complex64::new(v, 0.0));
    }
    s.trim()
        .parse::<Complex64>()
        .map_err(|_| FunmvError::InvalidInput(format!("bad value for t: `{s}`")))
}

fn create(path: &Path) -> Result<BufWriter<Box<dyn Write>>> {
    let w: Box<dyn Write> = if path.as_os_str() == "-" {
        Box::new(io::stdout())
    } else {
        Box::new(File::create(path)?)
    };
    Ok(BufWriter::new(w))
}

fn write_json<T: serde::Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| FunmvError::InvalidInput(e.to_string()))?;
    let mut w = create(path.unwrap_or(Path::new("-")))?;
    writeln!(w, "{text}")?;
    w.flush()?;
    Ok(())
}

fn load_spm(path: &Path) -> Result<SpmMatrix> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| FunmvError::InvalidInput(format!("{}: {e}", path.display())))
}

fn compute_with<F: Scalar>(
    args: &ComputeArgs,
    t: F,
    a: &SparseMatrix<F>,
    b: &DenseBlock<F>,
    option: FunmvOption,
    cfg: &FunmvConfig,
) -> Result<()> {
    let spm = match &args.spm {
        Some(path) if path.exists() => Some(load_spm(path)?),
        Some(path) => {
            let spm = spm_for_option(a, option, cfg, &mut MatvecCounter::new())?;
            write_json(&spm, Some(path))?;
            Some(spm)
        }
        None => None,
    };
    let report = funmv(t, a, b, option, cfg, spm.as_ref())?;
    if let Some(path) = &args.out_c {
        save_block(&report.c, path)?;
    }
    if let Some(path) = &args.out_s {
        save_block(&report.s, path)?;
    }
    if let Some(path) = &args.stats {
        write_json(&report.stats(), Some(path))?;
    }
    Ok(())
}

fn compute(args: ComputeArgs) -> Result<()> {
    let option = FunmvOption::from_id(args.option)?;
    let mut cfg = FunmvConfig::with_tol(args.tol);
    cfg.early_stop = !args.no_early_stop;
    cfg.shift = !args.no_shift;
    cfg.term_norm = match args.term_norm {
        NormArg::Inf => TermNorm::Inf,
        NormArg::One => TermNorm::One,
    };
    apply_seed(&mut cfg)?;
    let t = parse_t(&args.t)?;
    let a = load_matrix(&args.matrix)?;
    let b = load_block(&args.block)?;
    match (a, b) {
        (MtxMatrix::Real(a), MtxBlock::Real(b)) if t.im == 0.0 => compute_with(&args, t.re, &a, &b, option, &cfg),
        (a, b) => compute_with(&args, t, &a.to_complex(), &b.to_complex(), option, &cfg),
    }
}

fn params(args: ParamsArgs) -> Result<()> {
    let sigma = Sigma::from(args.sigma);
    let mut cfg = FunmvConfig::with_tol(args.tol);
    cfg.select.mmax = args.mmax;
    cfg.select.pmax = args.pmax;
    apply_seed(&mut cfg)?;
    let theta = ThetaTable::new(cfg.tol.value(), cfg.select.mmax);
    let scale = args.t.abs().powf(1.0 / sigma.value());
    let mut counter = MatvecCounter::new();
    let choice = match load_matrix(&args.matrix)? {
        MtxMatrix::Real(a) => select_parameters(&a.scaled(scale), sigma, &theta, &cfg.select, args.n0, &mut counter)?,
        MtxMatrix::Complex(a) => select_parameters(
            &a.scaled(Complex64::new(scale, 0.0)),
            sigma,
            &theta,
            &cfg.select,
            args.n0,
            &mut counter,
        )?,
    };
    write_json(&choice, None)
}

fn theta(args: ThetaArgs) -> Result<()> {
    if args.mmax == 0 {
        return Err(FunmvError::InvalidInput("mmax must be positive".into()));
    }
    let table = ThetaTable::new(args.tol.value(), args.mmax);
    let mut w = create(Path::new("-"))?;
    writeln!(w, "m,theta")?;
    for (i, th) in table.values().iter().enumerate() {
        writeln!(w, "{},{th:.6e}", i + 1)?;
    }
    w.flush()?;
    Ok(())
}

fn vector(path: &Path) -> Result<Vec<f64>> {
    match load_block(path)? {
        MtxBlock::Real(b) if b.ncols() == 1 => Ok(b.column(0).to_vec()),
        _ => Err(FunmvError::InvalidInput(format!(
            "{}: expected a real single-column array",
            path.display()
        ))),
    }
}

fn integrate(args: IntegrateArgs) -> Result<()> {
    let a = match load_matrix(&args.matrix)? {
        MtxMatrix::Real(a) => a,
        MtxMatrix::Complex(_) => return Err(FunmvError::InvalidInput("the integrator takes a real matrix".into())),
    };
    let filter = FilterSpec::from_name(&args.filter)?;
    let mut cfg = FunmvConfig::with_tol(args.tol);
    apply_seed(&mut cfg)?;
    let y0 = vector(&args.y0)?;
    let yp0 = vector(&args.yp0)?;
    let forcing = args
        .sine_forcing
        .map(|eps| move |y: &[f64]| y.iter().map(|v| eps * v.sin()).collect::<Vec<f64>>());
    let g = forcing.as_ref().map(|f| f as &dyn Fn(&[f64]) -> Vec<f64>);
    let traj = run(&a, y0, yp0, g, filter, args.h, args.steps, &cfg, !args.no_spm_cache)?;
    let mut w = create(&args.out)?;
    let n = a.n();
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain((0..n).map(|i| format!("y{i}")))
        .chain((0..n).map(|i| format!("yp{i}")))
        .chain(["energy".to_string(), "matvecs".to_string()])
        .collect();
    writeln!(w, "{}", header.join(","))?;
    for st in &traj.states {
        let mut row = vec![format!("{:.16e}", st.t_now)];
        row.extend(st.y.iter().chain(&st.y_prime).map(|v| format!("{v:.16e}")));
        row.push(format!("{:.16e}", st.energy(&a)?));
        row.push(st.matvecs.to_string());
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    eprintln!(
        "steps {} matvecs {} spm_matvecs {}",
        args.steps, traj.matvecs, traj.spm_matvecs
    );
    Ok(())
}

fn bench_cmd(args: BenchArgs) -> Result<()> {
    let precision = match args.tol {
        Tolerance::Named(p) => p,
        Tolerance::Value(_) => Precision::Double,
    };
    let mut case = match args.case {
        CaseArg::Poisson => BenchCase::poisson(precision),
        CaseArg::Triw => BenchCase::triw(precision),
        CaseArg::Diag => BenchCase::diag(),
        CaseArg::File => {
            let path = args
                .matrix
                .clone()
                .ok_or_else(|| FunmvError::InvalidInput("--case file needs --matrix".into()))?;
            BenchCase {
                name: path.display().to_string(),
                source: MatrixSource::File { path },
                negate: false,
                rhs: RhsKind::Cos,
                t: 1.0,
                tol: args.tol,
                option: FunmvOption::CosSin,
            }
        }
    };
    case.tol = args.tol;
    if let Some(size) = args.size {
        case.source = match case.source {
            MatrixSource::Poisson { .. } => MatrixSource::Poisson { k: size },
            MatrixSource::Triw { c, .. } => MatrixSource::Triw { n: size, c },
            MatrixSource::DiagRange { .. } => MatrixSource::DiagRange { n: size },
            other => other,
        };
    }
    if let Some(t) = args.t {
        case.t = t;
    }
    if let Some(id) = args.option {
        case.option = FunmvOption::from_id(id)?;
    }
    case.negate ^= args.negate;
    let result = bench(&case, args.repeats)?;
    write_json(&result, None)
}

fn gen(args: GenArgs) -> Result<()> {
    let n = args.size;
    let sign = if args.negate { -1.0 } else { 1.0 };
    let a = match args.kind {
        GenKind::Poisson => generators::poisson(n),
        GenKind::Triw => generators::triw(n, args.alpha),
        GenKind::DiagRange => generators::diag_range(n),
        GenKind::DiagSqrt => generators::diag_sqrt(n),
        GenKind::SpringChain => generators::spring_chain(n),
        rhs => {
            let kind = match rhs {
                GenKind::RhsCos => RhsKind::Cos,
                GenKind::RhsSin => RhsKind::Sin,
                GenKind::RhsOnes => RhsKind::Ones,
                _ => RhsKind::Ends,
            };
            return save_block(&generators::rhs(kind, n).scale(sign), &args.out);
        }
    };
    save_matrix(&a.scaled(sign), &args.out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Compute(a) => compute(a),
        Command::Params(a) => params(a),
        Command::Theta(a) => theta(a),
        Command::Integrate(a) => integrate(a),
        Command::Bench(a) => bench_cmd(a),
        Command::Gen(a) => gen(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 3 } else { 2 })
        }
    }
}
