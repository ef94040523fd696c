//! `qge` command-line front end.
//!
//! Exit codes: 0 success, 1 numerical failure (resonance or tolerance
//! exceeded), 2 usage or input error.

use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qge_core::entanglement::{self, Gate, GateSpec};
use qge_core::graph::{self, MetricGraph, Severity};
use qge_core::scattering::{self, DEFAULT_TOL};
use qge_core::surface::{self, Axis, GridSpec, SurfaceMode};
use qge_core::Error;
use serde_json::{json, Value};

pub mod output;

use output::{Format, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the number of sweep worker threads.
pub const THREADS_ENV: &str = "QGE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "qge", version, about = "Entanglement from controlled scattering on quantum graphs")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scattering amplitudes of a two-lead graph over wavenumbers
    Smatrix(SmatrixArgs),
    /// Entanglement entropy over a parameter grid
    Sweep(SweepArgs),
    /// Star-graph parameters for a single-qubit gate, verified up to global phase
    Gates(GatesArgs),
    /// Stub phase that maximises entanglement of two star graphs
    SolvePhi(SolvePhiArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SmatrixArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "k_range", required_unless_present = "k_range")]
    k: Option<f64>,
    /// a:b:n, n evenly spaced wavenumbers from a to b
    #[arg(long)]
    k_range: Option<String>,
    /// Maximum accepted unitarity residual
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Drop rows at resonances instead of failing
    #[arg(long)]
    skip_resonances: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    ChannelPhase,
    EdgePhase,
}

impl From<ModeArg> for SurfaceMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::ChannelPhase => SurfaceMode::ChannelPhase,
            ModeArg::EdgePhase => SurfaceMode::EdgePhase,
        }
    }
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// axis=min:max:steps (channel-phase: t_a2, t_b2, phi; edge-phase: ka_l, kb_l, phi)
    #[arg(long, allow_hyphen_values = true)]
    grid: Vec<String>,
    /// name=value, pins an axis to one value
    #[arg(long, allow_hyphen_values = true)]
    fix: Vec<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GateArg {
    Identity,
    GlobalPhase,
    PauliX,
    PauliZ,
    Hadamard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Args)]
struct GatesArgs {
    gate: GateArg,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    n_phi: i64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    n_alpha: i64,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    n_beta: i64,
    /// Phase of the global-phase gate
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    delta: f64,
    /// Free alpha of the Pauli X row
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    alpha: f64,
    /// Sign choice of the Hadamard row
    #[arg(long, value_enum, default_value_t = Sign::Plus)]
    sign: Sign,
    #[arg(long, default_value_t = entanglement::GATE_TOL)]
    tol: f64,
}

#[derive(Debug, Args)]
struct SolvePhiArgs {
    /// Bob's stub argument k_B * l
    #[arg(long, allow_hyphen_values = true)]
    kbl: f64,
    /// Branch index
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    n: i64,
}

/// Failure carrying the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Resonance { .. } | Error::NotUnitary(_) | Error::InconsistentInput(_) => {
                CliError::numerical(e.to_string())
            }
            _ => CliError::usage(e.to_string()),
        }
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("qge: {e}");
            e.code
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Smatrix(a) => cmd_smatrix(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Gates(a) => cmd_gates(&a),
        Command::SolvePhi(a) => cmd_solve_phi(&a),
    }
}

fn emit(table: &Table, out: &OutputArgs) -> Result<(), CliError> {
    let text = table.render(out.format);
    match &out.out {
        Some(path) => write_file(path, &text),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::usage(format!("stdout: {e}"))),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

/// Parses `a:b:n`.
pub fn parse_range(text: &str) -> Result<Axis, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || CliError::usage(format!("expected min:max:steps, got {text:?}"));
    let [lo, hi, n] = parts.as_slice() else {
        return Err(bad());
    };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    Ok(Axis::new(lo, hi, n))
}

fn load_graph(path: &Path) -> Result<MetricGraph, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let g = MetricGraph::from_json_str(&text)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let violations = graph::validate_two_channel(&g);
    let mut errors = Vec::new();
    for v in &violations {
        match v.severity {
            Severity::Warning => eprintln!("qge: {}: {v}", path.display()),
            Severity::Error => errors.push(v.to_string()),
        }
    }
    if errors.is_empty() {
        Ok(g)
    } else {
        Err(CliError::usage(format!(
            "{}: invalid graph\n  {}",
            path.display(),
            errors.join("\n  ")
        )))
    }
}

fn cmd_smatrix(args: &SmatrixArgs) -> Result<(), CliError> {
    let g = load_graph(&args.graph)?;
    let ks = match (&args.k, &args.k_range) {
        (Some(k), _) => vec![*k],
        (None, Some(r)) => {
            let axis = parse_range(r)?;
            if axis.steps == 0 || !(axis.min <= axis.max) {
                return Err(CliError::usage(format!("empty or reversed k range {r:?}")));
            }
            axis.values()
        }
        (None, None) => return Err(CliError::usage("one of --k or --k-range is required")),
    };

    let mut table = Table::new(
        "smatrix",
        json!({
            "graph": args.graph.display().to_string(),
            "k": args.k,
            "k_range": args.k_range,
            "tol": args.tol,
            "skip_resonances": args.skip_resonances,
        }),
        &["k", "re_r", "im_r", "re_t", "im_t", "abs_r2", "abs_t2", "unitarity_residual"],
    );
    let mut worst: f64 = 0.0;
    for k in ks {
        let s = match scattering::global_smatrix(&g, k) {
            Ok(s) => s,
            Err(Error::Resonance { .. }) if args.skip_resonances => {
                table.note(format!("skipped resonance at k={}", output::fmt_csv(k)));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let (r, t) = (s.entries[(0, 0)], s.entries[(1, 0)]);
        let residual = s.unitarity_residual();
        worst = worst.max(residual);
        table.push(vec![k, r.re, r.im, t.re, t.im, r.norm_sqr(), t.norm_sqr(), residual]);
    }
    emit(&table, &args.output)?;
    if worst > args.tol {
        return Err(CliError::numerical(format!(
            "unitarity residual {worst:.3e} exceeds tolerance {:.3e}",
            args.tol
        )));
    }
    Ok(())
}

/// Axis used when `--grid`/`--fix` leave one unset.
pub fn default_axis(mode: SurfaceMode, index: usize) -> Axis {
    use std::f64::consts::PI;
    match (mode, index) {
        (SurfaceMode::ChannelPhase, 0 | 1) => Axis::new(0.0, 1.0, 101),
        (SurfaceMode::ChannelPhase, _) => Axis::fixed(PI),
        (SurfaceMode::EdgePhase, 0) => Axis::fixed(2f64.atan()),
        (SurfaceMode::EdgePhase, 1) => Axis::new(0.0, PI, 201),
        (SurfaceMode::EdgePhase, _) => Axis::new(0.0, 2.0 * PI, 201),
    }
}

/// Builds the grid from `--grid` and `--fix` options.
pub fn build_grid(mode: SurfaceMode, grid: &[String], fix: &[String]) -> Result<GridSpec, CliError> {
    let mut axes: [Option<Axis>; 3] = [None; 3];
    let mut set = |name: &str, axis: Axis| -> Result<(), CliError> {
        let i = mode.axis_index(name).ok_or_else(|| {
            CliError::usage(format!(
                "unknown axis {name:?} for mode {mode}; expected one of {:?}",
                mode.axis_names()
            ))
        })?;
        if axes[i].replace(axis).is_some() {
            return Err(CliError::usage(format!("axis {name:?} given more than once")));
        }
        Ok(())
    };
    for g in grid {
        let (name, range) = g
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("expected axis=min:max:steps, got {g:?}")))?;
        set(name.trim(), parse_range(range)?)?;
    }
    for f in fix {
        let (name, value) = f
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("expected name=value, got {f:?}")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("not a number in {f:?}")))?;
        set(name.trim(), Axis::fixed(value))?;
    }
    let axes = [0, 1, 2].map(|i| axes[i].unwrap_or_else(|| default_axis(mode, i)));
    let spec = GridSpec::new(mode, axes);
    spec.validate()?;
    Ok(spec)
}

fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| CliError::usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

/// Computes the sweep table for a grid.
pub fn sweep_table(grid: &GridSpec) -> Result<Table, CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap()? {
        pool = pool.num_threads(n);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::numerical(format!("thread pool: {e}")))?;
    let surface = pool.install(|| surface::entropy_surface(grid))?;

    let names = grid.mode.axis_names();
    let axes: serde_json::Map<String, Value> = names
        .iter()
        .zip(&grid.axes)
        .map(|(n, a)| {
            (
                n.to_string(),
                json!({ "min": a.min, "max": a.max, "steps": a.steps }),
            )
        })
        .collect();
    let mut table = Table::new(
        "sweep",
        json!({ "mode": grid.mode.name(), "axes": axes }),
        &[names[0], names[1], names[2], "lambda_plus", "entropy"],
    );
    for row in &surface.rows {
        table.push(vec![
            row.params[0],
            row.params[1],
            row.params[2],
            row.lambda_plus,
            row.entropy,
        ]);
    }
    Ok(table)
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let grid = build_grid(args.mode.into(), &args.grid, &args.fix)?;
    let table = sweep_table(&grid)?;
    emit(&table, &args.output)
}

fn gate_spec(args: &GatesArgs) -> GateSpec {
    let gate = match args.gate {
        GateArg::Identity => Gate::Identity,
        GateArg::GlobalPhase => Gate::GlobalPhase { delta: args.delta },
        GateArg::PauliX => Gate::PauliX { alpha: args.alpha },
        GateArg::PauliZ => Gate::PauliZ,
        GateArg::Hadamard => Gate::Hadamard {
            plus: args.sign == Sign::Plus,
        },
    };
    GateSpec::with_offsets(gate, args.n_phi, args.n_alpha, args.n_beta)
}

fn cmd_gates(args: &GatesArgs) -> Result<(), CliError> {
    let report = entanglement::verify_gate(&gate_spec(args), args.tol);
    let p = report.params;
    let mut out = String::new();
    out.push_str(&format!("gate      {}\n", report.spec.gate));
    out.push_str(&format!(
        "offsets   n_phi={} n_alpha={} n_beta={}\n",
        report.spec.n_phi, report.spec.n_alpha, report.spec.n_beta
    ));
    out.push_str(&format!("x         {}\n", output::fmt_csv(p.x)));
    out.push_str(&format!("alpha     {}\n", output::fmt_csv(p.alpha)));
    out.push_str(&format!("beta      {}\n", output::fmt_csv(p.beta)));
    out.push_str("achieved\n");
    for i in 0..2 {
        let row: Vec<String> = (0..2)
            .map(|j| {
                let z = report.achieved[(i, j)];
                format!("{:+.12}{:+.12}i", z.re, z.im)
            })
            .collect();
        out.push_str(&format!("  [{}]\n", row.join(", ")));
    }
    out.push_str(&format!("deviation {:.3e}\n", report.deviation));
    out.push_str(&format!("tolerance {:.3e}\n", args.tol));
    out.push_str(&format!(
        "status    {}\n",
        if report.passed { "ok" } else { "FAILED" }
    ));
    print!("{out}");
    if report.passed {
        Ok(())
    } else {
        Err(CliError::numerical(format!(
            "{} deviates from the ideal gate by {:.3e} (tolerance {:.3e})",
            report.spec.gate, report.deviation, args.tol
        )))
    }
}

fn cmd_solve_phi(args: &SolvePhiArgs) -> Result<(), CliError> {
    let phi = entanglement::solve_phi(args.kbl, args.n);
    let residual = entanglement::tan_product_residual(args.kbl, phi);
    println!("phi {}", output::fmt_csv(phi));
    println!("residual {}", output::fmt_csv(residual));
    Ok(())
}
