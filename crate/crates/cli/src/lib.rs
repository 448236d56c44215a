//! Command-line front end: argument model, command dispatch and the file
//! formats written by each command.

pub mod output;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use selberg_core::quadrature::QuadSettings;
use selberg_core::{
    build_genus2_from_fn, builtin_octagon, builtin_pants_double, check_bounds, envelope, find_t0, heat_trace,
    heat_trace_lower_bound, log_det_laplacian, make_pinching_family, selberg_zeta_log, zeta_log_derivative_mckean,
    zeta_log_derivative_product, zeta_prime_at_one_experimental, CheckOptions, EnumerationOptions, EnvelopeKind,
    EnvelopeParams, ErrorCategory, FamilySpec, FnParams, GroupPresentation, LengthSpectrum, SpectralConstants,
    TailModel, ZetaInput,
};

use output::{fmt_bool, fmt_f64, write_csv, write_json};

/// Environment variable overriding the word-count budget.
pub const BUDGET_ENV: &str = "SELBERG_LAB_BUDGET";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] selberg_core::Error),
    #[error("invalid arguments: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 4,
            CliError::Core(e) => match e.category() {
                ErrorCategory::Validation => 2,
                ErrorCategory::Numerical | ErrorCategory::Resource => 3,
            },
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "selberg-lab", version, about = "Length spectra, heat traces and Selberg zeta values of hyperbolic surfaces")]
pub struct Cli {
    /// Maximum number of worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Oriented primitive length spectrum up to a cutoff.
    Spectrum(SpectrumArgs),
    /// Geodesic side of the heat trace on a grid of times.
    HeatTrace(HeatArgs),
    /// Selberg zeta logarithm and its derivative by two routes.
    Zeta(ZetaArgs),
    /// Regularized determinant of the weight-n Laplacian.
    Det(DetArgs),
    /// Threshold time t0 for a genus.
    T0(T0Args),
    /// Zeta bounds along a pinching family.
    Family(FamilyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Builtin {
    Octagon,
    PantsDouble,
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct SurfaceArgs {
    /// A built-in surface.
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
    /// Group presentation file (JSON).
    #[arg(long)]
    pub group: Option<PathBuf>,
    /// Fenchel-Nielsen coordinates l1,l2,l3,t1,t2,t3.
    #[arg(long = "fn", value_name = "L1,L2,L3,T1,T2,T3", value_parser = parse_fn)]
    pub fn_params: Option<FnParams>,
}

#[derive(Debug, Clone, Args)]
pub struct EnumArgs {
    /// Length cutoff for the spectrum.
    #[arg(long)]
    pub cutoff: f64,
    /// Maximum word depth.
    #[arg(long, default_value_t = 200)]
    pub max_depth: usize,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    #[command(flatten)]
    pub enumeration: EnumArgs,
    /// Output CSV; a JSON sidecar is written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TailArg {
    None,
    PrimeGeodesic,
}

#[derive(Debug, Args)]
pub struct HeatArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    #[command(flatten)]
    pub enumeration: EnumArgs,
    /// Comma-separated times.
    #[arg(long = "t", value_name = "T1,T2,...", value_delimiter = ',', default_values_t = [2.5, 3.0, 5.0, 10.0, 25.0, 50.0])]
    pub t_grid: Vec<f64>,
    #[arg(long, default_value_t = 400)]
    pub power_cap: u32,
    /// Treatment of geodesics beyond the cutoff.
    #[arg(long, value_enum, default_value_t = TailArg::None)]
    pub tail: TailArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ZetaArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    #[command(flatten)]
    pub enumeration: EnumArgs,
    /// Comma-separated evaluation points.
    #[arg(long = "s", value_name = "S1,S2,...", value_delimiter = ',', required = true)]
    pub s: Vec<f64>,
    #[arg(long, default_value_t = 40)]
    pub k_max: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct DetArgs {
    #[command(flatten)]
    pub surface: SurfaceArgs,
    #[command(flatten)]
    pub enumeration: EnumArgs,
    /// Weight n >= 1.
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 40)]
    pub k_max: u32,
    /// Allow the extrapolated Z'(1) estimate needed for n = 1.
    #[arg(long)]
    pub experimental: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct T0Args {
    #[arg(long)]
    pub genus: u32,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Base Fenchel-Nielsen coordinates.
    #[arg(long = "fn", value_name = "L1,L2,L3,T1,T2,T3", value_parser = parse_fn)]
    pub base: FnParams,
    /// 1-based indices of the pinched curves.
    #[arg(long, value_delimiter = ',', default_values_t = [1])]
    pub pinch: Vec<usize>,
    /// Strictly decreasing pinching lengths.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ell_grid: Vec<f64>,
    /// Weights n >= 2.
    #[arg(long, value_delimiter = ',', default_values_t = [2, 3, 4, 5, 6])]
    pub n: Vec<u32>,
    #[command(flatten)]
    pub enumeration: EnumArgs,
    #[arg(long, default_value_t = 40)]
    pub k_max: u32,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_fn(s: &str) -> Result<FnParams, String> {
    let v = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    FnParams::from_slice(&v).map_err(|e| e.to_string())
}

/// Word budget from the environment, when set.
pub fn budget_override() -> CliResult<Option<usize>> {
    match std::env::var(BUDGET_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Config(format!("{BUDGET_ENV}: {e}"))),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(b) if b > 0 => Ok(Some(b)),
            _ => Err(CliError::Config(format!("{BUDGET_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

/// Reads and validates a group presentation file.
pub fn parse_group_file(path: &Path) -> CliResult<GroupPresentation> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(GroupPresentation::from_json(&text)?)
}

fn surface(args: &SurfaceArgs) -> CliResult<GroupPresentation> {
    match (args.builtin, &args.group, &args.fn_params) {
        (Some(Builtin::Octagon), _, _) => Ok(builtin_octagon()),
        (Some(Builtin::PantsDouble), _, _) => Ok(builtin_pants_double()),
        (_, Some(path), _) => parse_group_file(path),
        (_, _, Some(p)) => Ok(build_genus2_from_fn(p)?),
        _ => Err(CliError::Config("one of --builtin, --group or --fn is required".into())),
    }
}

fn enumeration_options(args: &EnumArgs) -> CliResult<EnumerationOptions> {
    let mut opts = EnumerationOptions::new(args.cutoff, args.max_depth);
    if let Some(b) = budget_override()? {
        opts = opts.with_budget(b);
    }
    Ok(opts)
}

fn load_spectrum(surface_args: &SurfaceArgs, enum_args: &EnumArgs) -> CliResult<LengthSpectrum> {
    let group = surface(surface_args)?;
    let spec = selberg_core::enumerate_spectrum(&group, &enumeration_options(enum_args)?)?;
    Ok(spec)
}

fn sidecar_path(out: &Path) -> PathBuf {
    if out.extension().is_some_and(|e| e == "json") {
        out.with_extension("meta.json")
    } else {
        out.with_extension("json")
    }
}

#[derive(Serialize)]
struct SpectrumMeta {
    cutoff: f64,
    word_depth: usize,
    stabilized: bool,
}

fn run_spectrum(args: &SpectrumArgs) -> CliResult<()> {
    let spec = load_spectrum(&args.surface, &args.enumeration)?;
    if !spec.stabilized() {
        eprintln!("warning: spectrum changed at the last word depth ({})", spec.word_depth());
    }
    let rows = spec
        .entries()
        .iter()
        .map(|e| vec![fmt_f64(e.length), e.multiplicity.to_string()]);
    write_csv(&args.out, &["length", "multiplicity"], rows)?;
    let meta = SpectrumMeta {
        cutoff: spec.cutoff(),
        word_depth: spec.word_depth(),
        stabilized: spec.stabilized(),
    };
    write_json(&sidecar_path(&args.out), &meta)
}

fn run_heat(args: &HeatArgs) -> CliResult<()> {
    let spec = load_spectrum(&args.surface, &args.enumeration)?;
    let tail = match args.tail {
        TailArg::None => TailModel::None,
        TailArg::PrimeGeodesic => TailModel::PrimeGeodesic,
    };
    let genus = spec.genus();
    let mut rows = Vec::with_capacity(args.t_grid.len());
    for &t in &args.t_grid {
        let h = heat_trace(&spec, t, args.power_cap, tail)?;
        let lower = if t > 2.0 && genus >= 2 {
            fmt_f64(heat_trace_lower_bound(genus, t)?)
        } else {
            String::new()
        };
        rows.push(vec![fmt_f64(t), fmt_f64(h.value), fmt_f64(h.tail_bound), lower]);
    }
    write_csv(&args.out, &["t", "htr", "tail_bound", "lower_bound"], rows)
}

fn run_zeta(args: &ZetaArgs) -> CliResult<()> {
    if args.s.is_empty() {
        return Err(CliError::Config("--s needs at least one value".into()));
    }
    let spec = load_spectrum(&args.surface, &args.enumeration)?;
    let quad = QuadSettings::default();
    let mut rows = Vec::with_capacity(args.s.len());
    for &s in &args.s {
        let z = selberg_zeta_log(&spec, s, args.k_max)?;
        let product = zeta_log_derivative_product(&spec, s, args.k_max)?;
        let mckean = zeta_log_derivative_mckean(&spec, s, &quad)?;
        rows.push(vec![
            fmt_f64(s),
            fmt_f64(z.log_value),
            fmt_f64(product),
            fmt_f64(mckean),
            z.tail_log_bound.to_string(),
        ]);
    }
    write_csv(&args.out, &["s", "log_z", "dlogz_product", "dlogz_mckean", "tail_log"], rows)
}

#[derive(Serialize)]
struct DetReport {
    g: u32,
    n: u32,
    c_n: f64,
    #[serde(rename = "log_C_gn")]
    log_c_gn: f64,
    log_z: f64,
    log_det: f64,
}

fn run_det(args: &DetArgs) -> CliResult<()> {
    if args.n == 1 && !args.experimental {
        return Err(CliError::Core(selberg_core::Error::Experimental(
            "n = 1 needs --experimental".into(),
        )));
    }
    let spec = load_spectrum(&args.surface, &args.enumeration)?;
    let g = spec.genus();
    let constants = SpectralConstants::new(g, args.n)?;
    let (log_z, log_det) = if args.n == 1 {
        let z = zeta_prime_at_one_experimental(&spec, args.k_max)?;
        (z.log_value, log_det_laplacian(g, 1, ZetaInput::DerivativeAtOne(&z))?)
    } else {
        let z = selberg_zeta_log(&spec, f64::from(args.n), args.k_max)?;
        (z.log_value, log_det_laplacian(g, args.n, ZetaInput::Value(&z))?)
    };
    let report = DetReport {
        g,
        n: args.n,
        c_n: constants.c_n,
        log_c_gn: constants.log_c_gn,
        log_z,
        log_det,
    };
    write_json(&args.out, &report)
}

#[derive(Serialize)]
struct T0Report {
    g: u32,
    t0: f64,
}

fn run_t0(args: &T0Args) -> CliResult<()> {
    let t0 = find_t0(args.genus)?;
    write_json(&args.out, &T0Report { g: args.genus, t0 })
}

pub const FAMILY_HEADER: [&str; 10] = [
    "ell", "tau", "log_z2", "n", "log_zn", "lower_ok", "upper_ok", "mt1_upper", "zx2", "mu_pole",
];

fn run_family(args: &FamilyArgs) -> CliResult<()> {
    let spec = FamilySpec {
        base_fn: args.base,
        pinch_indices: args.pinch.clone(),
        ell_grid: args.ell_grid.clone(),
        n_values: args.n.clone(),
    };
    let family = make_pinching_family(&spec)?;
    let mut opts = CheckOptions {
        max_depth: args.enumeration.max_depth,
        k_max: args.k_max,
        ..CheckOptions::default()
    };
    if let Some(b) = budget_override()? {
        opts.budget = b;
    }
    let records = check_bounds(&family, &spec.pinched_lengths(), &spec.n_values, &[args.enumeration.cutoff], &opts)?;
    let mut rows = Vec::new();
    for r in &records {
        if !r.valid {
            eprintln!(
                "warning: {} skipped: {}",
                r.label,
                r.note.as_deref().unwrap_or("no certified spectrum")
            );
        }
        let zx2 = envelope(EnvelopeKind::Zx2, &EnvelopeParams::ell(2, None, &r.ell))?;
        for &n in &spec.n_values {
            let env = &r.envelope_logs[&n];
            let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
            rows.push(vec![
                fmt_f64(r.ell[0]),
                fmt_f64(r.tau_abs[0]),
                opt(r.log_z2),
                n.to_string(),
                opt(r.log_zn.get(&n).copied()),
                r.lower_ok.get(&n).map(|&b| fmt_bool(b)).unwrap_or_default(),
                r.upper_ok.get(&n).map(|&b| fmt_bool(b)).unwrap_or_default(),
                env[&EnvelopeKind::Mt1Upper].to_string(),
                zx2.to_string(),
                env[&EnvelopeKind::MuPole].to_string(),
            ]);
        }
    }
    write_csv(&args.out, &FAMILY_HEADER, rows)
}

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Spectrum(a) => run_spectrum(a),
        Command::HeatTrace(a) => run_heat(a),
        Command::Zeta(a) => run_zeta(a),
        Command::Det(a) => run_det(a),
        Command::T0(a) => run_t0(a),
        Command::Family(a) => run_family(a),
    }
}

/// Caps the global worker pool. Must run before any parallel work.
pub fn configure_threads(threads: Option<usize>) -> CliResult<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    Ok(())
}
