//! Command-line front end.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pslp_core::oracle::{random_lp, solve_dense, Feasibility, GeneratorConfig, ORACLE_SIZE_CAP};
use pslp_core::{
    check_kkt, objective_value, postsolve, presolve_with, Clock, Error as CoreError, ExplorerKind, KktReport,
    LpProblem, PresolveConfig, PresolveOutput, PresolveStatus, PrimalDualSolution, SolutionStatus,
};

use crate::clock::StdClock;
use crate::codec::{decode_journal, decode_solution, encode_journal, encode_solution, solution_to_text, status_name};
use crate::metrics::{arithmetic_mean, geometric_mean, shifted_geometric_mean};
use crate::mps::{read_mps, write_mps, MpsOptions};

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const INFEASIBLE: i32 = 2;
    pub const UNBOUNDED: i32 = 3;
    pub const SOLVED: i32 = 4;
    pub const SIZE_CAP: i32 = 5;
    pub const KKT_FAILED: i32 = 6;
}

#[derive(Parser, Debug)]
#[command(name = "pslp", version, about = "Presolve and postsolve linear programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Reduce an instance; write the reduced MPS, the journal and a report.
    Presolve(PresolveArgs),
    /// Map a solution of the reduced problem back to the original problem.
    Postsolve(PostsolveArgs),
    /// Presolve a set of instances and summarize times and reduction ratios.
    Bench(BenchArgs),
    /// Presolve, solve the reduced problem with the dense oracle, postsolve and check KKT.
    Roundtrip(RoundtripArgs),
    /// Solve a small instance with the dense oracle.
    Solve(SolveArgs),
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// MPS file (plain or gzip).
    pub input: Option<PathBuf>,
    /// Use the built-in random generator instead of an input file.
    #[arg(long, conflicts_with = "input")]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 10, requires = "seed")]
    pub rows: usize,
    #[arg(long, default_value_t = 10, requires = "seed")]
    pub cols: usize,
    #[arg(long, default_value_t = 0.3, requires = "seed")]
    pub density: f64,
    /// Read data lines at fixed MPS column positions.
    #[arg(long)]
    pub fixed: bool,
}

#[derive(Args, Debug, Clone)]
pub struct ConfigArgs {
    #[arg(long, default_value_t = 16)]
    pub max_rounds: usize,
    /// Allow dual fixings that keep one optimum rather than all (default).
    #[arg(long, overrides_with = "no_strong_dual")]
    pub strong_dual: bool,
    #[arg(long)]
    pub no_strong_dual: bool,
    /// Stop starting new explorer passes after this many seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    /// Disable every explorer.
    #[arg(long)]
    pub disable_all: bool,
    #[arg(long)]
    pub disable_singleton_rows: bool,
    #[arg(long)]
    pub disable_redundant_constraints: bool,
    #[arg(long)]
    pub disable_doubleton_rows: bool,
    #[arg(long)]
    pub disable_column_singleton_equality: bool,
    #[arg(long)]
    pub disable_column_singleton_inequality: bool,
    #[arg(long)]
    pub disable_variable_locks: bool,
    #[arg(long)]
    pub disable_parallel_rows: bool,
    #[arg(long)]
    pub disable_parallel_columns: bool,
    #[arg(long)]
    pub disable_primal_propagation: bool,
    #[arg(long)]
    pub disable_dual_propagation: bool,
}

impl ConfigArgs {
    pub fn config(&self, feas_tol: Option<f64>) -> PresolveConfig {
        let mut cfg = PresolveConfig {
            max_rounds: self.max_rounds,
            strong_dual: !self.no_strong_dual,
            time_limit: self.time_limit,
            ..PresolveConfig::default()
        };
        if let Some(t) = feas_tol {
            cfg.tol.feas = t;
        }
        let off = [
            self.disable_singleton_rows,
            self.disable_redundant_constraints,
            self.disable_doubleton_rows,
            self.disable_column_singleton_equality,
            self.disable_column_singleton_inequality,
            self.disable_variable_locks,
            self.disable_parallel_rows,
            self.disable_parallel_columns,
            self.disable_primal_propagation,
            self.disable_dual_propagation,
        ];
        for (kind, off) in ExplorerKind::ALL.into_iter().zip(off) {
            cfg.set_enabled(kind, !(off || self.disable_all));
        }
        cfg
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Text,
    Kv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionFormat {
    Text,
    Binary,
}

#[derive(Args, Debug)]
pub struct PresolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Feasibility tolerance for bound and side comparisons.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Reduced problem in MPS format.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Postsolve journal.
    #[arg(long)]
    pub journal: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub report: ReportFormat,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub report_file: Option<PathBuf>,
    /// Include wall times in the report.
    #[arg(long)]
    pub timings: bool,
    /// Where to write the original-space solution when presolve solves the
    /// problem completely, or when `--oracle` is given.
    #[arg(long)]
    pub solution: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SolutionFormat::Text)]
    pub solution_format: SolutionFormat,
    /// Solve the reduced problem with the dense oracle and postsolve it.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Args, Debug)]
pub struct PostsolveArgs {
    #[arg(long)]
    pub journal: PathBuf,
    /// Solution of the reduced problem (text or binary).
    #[arg(long)]
    pub solution: PathBuf,
    /// Original problem; enables the KKT report.
    #[arg(long)]
    pub original: Option<PathBuf>,
    #[arg(long)]
    pub fixed: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SolutionFormat::Text)]
    pub format: SolutionFormat,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// MPS files or directories holding them.
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long)]
    pub fixed: bool,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Args, Debug)]
pub struct RoundtripArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    /// Largest KKT residual accepted.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Feasibility tolerance used by presolve.
    #[arg(long)]
    pub feas_tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SolutionFormat::Text)]
    pub format: SolutionFormat,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::USAGE } else { exit::OK };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit::USAGE
        }
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Presolve(a) => cmd_presolve(&a),
        Command::Postsolve(a) => cmd_postsolve(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Roundtrip(a) => cmd_roundtrip(&a),
        Command::Solve(a) => cmd_solve(&a),
    }
}

pub fn load_problem(path: &Path, fixed: bool) -> Result<LpProblem> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    read_mps(&bytes, MpsOptions { fixed }).with_context(|| format!("parsing {}", path.display()))
}

fn load_input(a: &InputArgs) -> Result<LpProblem> {
    match (&a.input, a.seed) {
        (Some(path), _) => load_problem(path, a.fixed),
        (None, Some(seed)) => {
            Ok(random_lp(seed, a.rows, a.cols, a.density, Feasibility::ForcedFeasible, &GeneratorConfig::default()))
        }
        (None, None) => Err(anyhow!("an input file or --seed is required")),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn solution_bytes(s: &PrimalDualSolution, f: SolutionFormat) -> Vec<u8> {
    match f {
        SolutionFormat::Text => solution_to_text(s).into_bytes(),
        SolutionFormat::Binary => encode_solution(s),
    }
}

fn run_presolve(p: &LpProblem, cfg: &PresolveConfig) -> Result<PresolveOutput> {
    Ok(presolve_with(p, cfg, &StdClock::new(), &mut ())?)
}

fn status_exit(s: PresolveStatus) -> i32 {
    match s {
        PresolveStatus::Reduced | PresolveStatus::Unchanged => exit::OK,
        PresolveStatus::InfeasiblePrimal => exit::INFEASIBLE,
        PresolveStatus::UnboundedOrInfeasibleDual => exit::UNBOUNDED,
        PresolveStatus::SolvedCompletely => exit::SOLVED,
    }
}

fn print_kkt(r: &KktReport) {
    println!("primal_residual={:.3e}", r.primal_residual);
    println!("dual_residual={:.3e}", r.dual_residual);
    println!("complementarity_residual={:.3e}", r.complementarity_residual);
    println!("bound_violation={:.3e}", r.bound_violation);
    println!("max_residual={:.3e}", r.max());
}

/// Oracle solve with the size cap mapped to its exit code.
fn oracle(p: &LpProblem) -> Result<std::result::Result<PrimalDualSolution, i32>> {
    match solve_dense(p, ORACLE_SIZE_CAP) {
        Ok(s) => Ok(Ok(s)),
        Err(CoreError::OracleSizeCap { size, cap }) => {
            eprintln!("error: reduced problem has {size} rows plus columns, oracle limit is {cap}");
            Ok(Err(exit::SIZE_CAP))
        }
        Err(e) => Err(e.into()),
    }
}

fn solution_status_exit(s: SolutionStatus) -> Option<i32> {
    match s {
        SolutionStatus::PrimalInfeasible => Some(exit::INFEASIBLE),
        SolutionStatus::DualInfeasibleOrUnbounded => Some(exit::UNBOUNDED),
        _ => None,
    }
}

pub fn cmd_presolve(a: &PresolveArgs) -> Result<i32> {
    let p = load_input(&a.input)?;
    let out = run_presolve(&p, &a.config.config(a.tol))?;
    log::info!("presolve status {}", out.status.as_str());
    if let Some(path) = &a.out {
        write_file(path, write_mps(&out.reduced).as_bytes())?;
    }
    if let Some(path) = &a.journal {
        write_file(path, &encode_journal(&out.journal))?;
    }
    let report = match a.report {
        ReportFormat::Text => out.report.to_text(a.timings),
        ReportFormat::Kv => out.report.to_kv(a.timings),
    };
    match &a.report_file {
        Some(path) => write_file(path, report.as_bytes())?,
        None => print!("{report}"),
    }
    let solved = out.status == PresolveStatus::SolvedCompletely;
    if solved || a.oracle {
        let reduced_sol = if solved {
            PrimalDualSolution::zeros(0, 0, SolutionStatus::Optimal)
        } else if out.status.is_success() {
            match oracle(&out.reduced)? {
                Ok(s) => s,
                Err(code) => return Ok(code),
            }
        } else {
            return Ok(status_exit(out.status));
        };
        if let Some(code) = solution_status_exit(reduced_sol.status) {
            return Ok(code);
        }
        let full = postsolve(&out.journal, &reduced_sol)?;
        match &a.solution {
            Some(path) => write_file(path, &solution_bytes(&full, a.solution_format))?,
            None => print!("{}", solution_to_text(&full)),
        }
        if a.oracle {
            print_kkt(&check_kkt(&p, &full, 1e-9)?);
        }
    }
    Ok(status_exit(out.status))
}

pub fn cmd_postsolve(a: &PostsolveArgs) -> Result<i32> {
    let jbytes = fs::read(&a.journal).with_context(|| format!("reading {}", a.journal.display()))?;
    let journal = decode_journal(&jbytes).with_context(|| format!("decoding {}", a.journal.display()))?;
    let sbytes = fs::read(&a.solution).with_context(|| format!("reading {}", a.solution.display()))?;
    let reduced = decode_solution(&sbytes).with_context(|| format!("decoding {}", a.solution.display()))?;
    let full = postsolve(&journal, &reduced).context("journal and solution do not match")?;
    match &a.out {
        Some(path) => write_file(path, &solution_bytes(&full, a.format))?,
        None if a.format == SolutionFormat::Text => print!("{}", solution_to_text(&full)),
        None => std::io::stdout().write_all(&encode_solution(&full))?,
    }
    if let Some(orig) = &a.original {
        let p = load_problem(orig, a.fixed)?;
        let r = check_kkt(&p, &full, 1e-9).context("original problem does not match the journal")?;
        let report = |r: &KktReport| {
            eprintln!("objective={:.12e}", objective_value(&p, &full.x).unwrap_or(f64::NAN));
            eprintln!(
                "primal_residual={:.3e} dual_residual={:.3e} complementarity_residual={:.3e} bound_violation={:.3e}",
                r.primal_residual, r.dual_residual, r.complementarity_residual, r.bound_violation
            );
        };
        report(&r);
    }
    Ok(exit::OK)
}

fn collect_instances(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("listing {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| {
                    let name = f.file_name().and_then(|n| n.to_str()).unwrap_or("").to_ascii_lowercase();
                    name.ends_with(".mps") || name.ends_with(".mps.gz")
                })
                .collect();
            found.sort();
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

struct BenchRow {
    name: String,
    result: std::result::Result<(PresolveOutput, f64), String>,
}

fn bench_one(path: &Path, fixed: bool, cfg: &PresolveConfig) -> BenchRow {
    let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
    let result = load_problem(path, fixed).map_err(|e| format!("{e:#}")).and_then(|p| {
        // Timing covers presolve only, not file input.
        let clock = StdClock::new();
        let out = presolve_with(&p, cfg, &clock, &mut ()).map_err(|e| e.to_string())?;
        Ok((out, clock.now()))
    });
    BenchRow { name, result }
}

pub fn cmd_bench(a: &BenchArgs) -> Result<i32> {
    let files = collect_instances(&a.paths)?;
    let cfg = a.config.config(None);
    let jobs = a.jobs.max(1);
    let rows: Vec<BenchRow> = if jobs == 1 {
        files.iter().map(|f| bench_one(f, a.fixed, &cfg)).collect()
    } else {
        let chunk = files.len().div_ceil(jobs).max(1);
        std::thread::scope(|s| {
            let handles: Vec<_> = files
                .chunks(chunk)
                .map(|part| {
                    let cfg = &cfg;
                    s.spawn(move || part.iter().map(|f| bench_one(f, a.fixed, cfg)).collect::<Vec<_>>())
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("bench worker panicked")).collect()
        })
    };
    println!(
        "{:<24} {:>8} {:>8} {:>10} {:>10} {:>8} {:>12}  status",
        "instance", "rows", "cols", "nnz", "nnz_out", "ratio", "time_ms"
    );
    let mut times = Vec::new();
    let mut ratios = Vec::new();
    let mut failures = 0;
    for row in &rows {
        match &row.result {
            Ok((out, t)) => {
                let r = &out.report;
                println!(
                    "{:<24} {:>8} {:>8} {:>10} {:>10} {:>8.4} {:>12.3}  {}",
                    row.name,
                    r.rows_before,
                    r.cols_before,
                    r.nnz_before,
                    r.nnz_after,
                    r.nnz_ratio(),
                    t * 1e3,
                    out.status.as_str()
                );
                times.push(*t);
                ratios.push(r.nnz_ratio());
            }
            Err(e) => {
                failures += 1;
                println!("{:<24} failed: {e}", row.name);
            }
        }
    }
    println!();
    println!("instances   {}", rows.len());
    println!("failures    {failures}");
    println!("mean_ratio  {:.4}", arithmetic_mean(&ratios));
    println!("time_am     {:.6}s", arithmetic_mean(&times));
    println!("time_gm     {:.6}s", geometric_mean(&times));
    println!("time_sgm1   {:.6}s", shifted_geometric_mean(&times, 1.0));
    println!("time_sgm10  {:.6}s", shifted_geometric_mean(&times, 10.0));
    Ok(exit::OK)
}

pub fn cmd_roundtrip(a: &RoundtripArgs) -> Result<i32> {
    let p = load_input(&a.input)?;
    let out = run_presolve(&p, &a.config.config(a.feas_tol))?;
    println!("presolve_status={}", out.status.as_str());
    println!("rows={} -> {}", out.report.rows_before, out.report.rows_after);
    println!("cols={} -> {}", out.report.cols_before, out.report.cols_after);
    println!("nnz_ratio={:.4}", out.report.nnz_ratio());
    if !out.status.is_success() {
        return Ok(status_exit(out.status));
    }
    let reduced = match oracle(&out.reduced)? {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    println!("oracle_status={}", status_name(reduced.status));
    if let Some(code) = solution_status_exit(reduced.status) {
        return Ok(code);
    }
    let full = postsolve(&out.journal, &reduced)?;
    println!("objective={:.12e}", objective_value(&p, &full.x)?);
    let r = check_kkt(&p, &full, 1e-9)?;
    print_kkt(&r);
    Ok(if r.within(a.tol) { exit::OK } else { exit::KKT_FAILED })
}

pub fn cmd_solve(a: &SolveArgs) -> Result<i32> {
    let p = load_input(&a.input)?;
    let sol = match oracle(&p)? {
        Ok(s) => s,
        Err(code) => return Ok(code),
    };
    match &a.out {
        Some(path) => write_file(path, &solution_bytes(&sol, a.format))?,
        None => print!("{}", solution_to_text(&sol)),
    }
    Ok(solution_status_exit(sol.status).unwrap_or(exit::OK))
}
