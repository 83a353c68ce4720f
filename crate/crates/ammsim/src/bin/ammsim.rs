//! Command-line front end: trace generation, single-configuration
//! simulation, locality scoring, sweeps, and report extraction.
//!
//! Exit codes: 0 success, 1 usage problem, 2 unreadable or malformed input,
//! 3 sweep where every point came out infeasible.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ammsim::amm::AmmDesign;
use ammsim::cost::{self, CostStyle, CostTable};
use ammsim::dse::{self, DesignPoint, Metric};
use ammsim::kernels::{Kernel, KernelSpec, DEFAULT_SEED};
use ammsim::locality;
use ammsim::sched::{self, ComputeConfig, Layout, Mapping, MemStructureConfig};
use ammsim::trace::Ddg;

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "ammsim",
    version,
    about = "Cycle-level simulation and design-space exploration for multi-ported memories"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a kernel trace file.
    Gen(GenArgs),
    /// Schedule one trace on one memory configuration.
    Simulate(SimulateArgs),
    /// Stride histogram and spatial locality of a trace.
    Locality(LocalityArgs),
    /// Evaluate a configuration space and write a points CSV.
    Sweep(SweepArgs),
    /// Extract frontiers, ratios, or the locality correlation from points.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Kernel name: gemm, fft, kmp, md, stencil, or sort.
    #[arg(long)]
    kernel: String,
    /// Primary size (matrix dimension, transform length, text length, ...).
    #[arg(long)]
    n: usize,
    /// Seed for kernels with data-dependent behavior.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output trace path.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    /// Trace file to schedule.
    #[arg(long)]
    trace: PathBuf,
    /// banking, ideal, hntx, bntx, hbntx, or lvt.
    #[arg(long)]
    style: String,
    /// Bank count (banking style only).
    #[arg(long, default_value_t = 2)]
    banks: usize,
    /// cyclic or block (banking style only).
    #[arg(long, default_value = "cyclic")]
    mapping: String,
    /// Read ports: per bank for banking, per structure otherwise.
    #[arg(long, default_value_t = 1)]
    rports: usize,
    /// Write ports, same convention as --rports.
    #[arg(long, default_value_t = 1)]
    wports: usize,
    /// Port width in bytes (1, 2, 4, or 8).
    #[arg(long, default_value_t = 8)]
    word: u32,
    /// Compute units per latency class.
    #[arg(long, default_value_t = 8)]
    compute_units: usize,
    /// Cost CSV; omit for the analytic default model.
    #[arg(long)]
    cost: Option<PathBuf>,
}

#[derive(Args)]
struct LocalityArgs {
    /// Trace file to score.
    #[arg(long)]
    trace: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep config: `key = v1, v2, ...` lines; see the README.
    #[arg(long)]
    space: PathBuf,
    /// Output points CSV path.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Points CSV produced by `sweep`.
    #[arg(long)]
    points: PathBuf,
    /// pareto, ratio, or correlation.
    #[arg(long)]
    mode: String,
    /// Relative cycle window for matching designs across styles.
    #[arg(long, default_value_t = dse::DEFAULT_MATCH_TOLERANCE)]
    tolerance: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.cmd {
        Cmd::Gen(args) => run_gen(&args),
        Cmd::Simulate(args) => run_simulate(&args),
        Cmd::Locality(args) => run_locality(&args),
        Cmd::Sweep(args) => run_sweep(&args),
        Cmd::Report(args) => run_report(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(CliError { code, msg }) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

struct CliError {
    code: u8,
    msg: String,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError { code: EXIT_USAGE, msg: msg.into() }
}

fn input(path: &Path, msg: impl fmt::Display) -> CliError {
    CliError { code: EXIT_INPUT, msg: format!("{}: {msg}", path.display()) }
}

fn read_trace(path: &Path) -> Result<Ddg, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| input(path, e))?;
    Ddg::parse(&text).map_err(|e| input(path, e))
}

fn load_cost(path: &Option<PathBuf>) -> Result<CostTable, CliError> {
    match path {
        None => Ok(CostTable::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| input(p, e))?;
            cost::load_cost_table(&text).map_err(|e| input(p, e))
        }
    }
}

fn run_gen(args: &GenArgs) -> Result<u8, CliError> {
    let kernel = Kernel::from_token(&args.kernel)
        .ok_or_else(|| usage(format!("unknown kernel '{}'", args.kernel)))?;
    let spec = KernelSpec { kernel, size: args.n, seed: args.seed };
    let ddg = spec.generate().map_err(|e| usage(e.to_string()))?;
    std::fs::write(&args.output, ddg.emit()).map_err(|e| input(&args.output, e))?;
    Ok(0)
}

fn parse_style(token: &str) -> Result<CostStyle, CliError> {
    match token {
        "banking" => Ok(CostStyle::Banking),
        other => AmmDesign::from_token(other)
            .map(CostStyle::Amm)
            .ok_or_else(|| usage(format!("unknown style '{other}'"))),
    }
}

fn parse_mapping(token: &str) -> Result<Mapping, CliError> {
    Mapping::from_token(token).ok_or_else(|| usage(format!("unknown mapping '{token}'")))
}

fn run_simulate(args: &SimulateArgs) -> Result<u8, CliError> {
    let ddg = read_trace(&args.trace)?;
    let style = parse_style(&args.style)?;
    let mut mem = match style {
        CostStyle::Banking => MemStructureConfig::banking(
            args.banks,
            parse_mapping(&args.mapping)?,
            args.word,
            args.rports,
            args.wports,
        ),
        CostStyle::Amm(design) => {
            MemStructureConfig::amm(design, args.word, args.rports, args.wports)
        }
    };
    let table = load_cost(&args.cost)?;
    let total_words = Layout::new(&ddg, mem.word_bytes).total_words();
    let key = cost::key_for(&mem, total_words).map_err(|e| usage(e.to_string()))?;
    let entry = cost::cost_of(&key, &table).map_err(|e| usage(e.to_string()))?;
    mem.read_latency = entry.read_latency;
    mem.write_latency = entry.write_latency;
    let compute = ComputeConfig::uniform_for(&ddg, args.compute_units);
    let result = sched::schedule(&ddg, &mem, &compute).map_err(|e| usage(e.to_string()))?;
    println!("cycles,stalls,time_ns,area_um2,power_mw");
    println!(
        "{},{},{},{},{}",
        result.total_cycles,
        result.bank_conflict_stalls,
        result.total_cycles as f64 * entry.clock_ns,
        entry.area_um2,
        entry.power_mw,
    );
    Ok(0)
}

fn run_locality(args: &LocalityArgs) -> Result<u8, CliError> {
    let ddg = read_trace(&args.trace)?;
    let report = locality::stride_histogram(&ddg);
    println!("array,accesses,zero_strides,locality");
    let fmt_score = |hist: &locality::StrideHistogram| match locality::spatial_locality(hist) {
        Ok(l) => l.to_string(),
        Err(_) => "-".to_string(),
    };
    for (name, hist) in &report.per_array {
        println!("{name},{},{},{}", hist.total(), hist.zero_strides(), fmt_score(hist));
    }
    let merged = &report.merged;
    println!("*,{},{},{}", merged.total(), merged.zero_strides(), fmt_score(merged));
    Ok(0)
}

fn run_sweep(args: &SweepArgs) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(&args.space).map_err(|e| input(&args.space, e))?;
    let spec = dse::parse_space(&text).map_err(|e| input(&args.space, e))?;
    let base = args.space.parent().unwrap_or(Path::new("."));
    let space = spec.resolve(base).map_err(|e| input(&args.space, e))?;
    let points = dse::sweep(&space);
    std::fs::write(&args.output, dse::emit_points_csv(&points))
        .map_err(|e| input(&args.output, e))?;
    if points.iter().all(|p| !p.feasible) {
        eprintln!("warning: no feasible points in this space");
        return Ok(EXIT_INFEASIBLE);
    }
    Ok(0)
}

/// Resolves a points-CSV trace name back to a graph: kernel specs are
/// regenerated, anything else is read as a file path.
fn resolve_trace_name(name: &str) -> Result<Ddg, CliError> {
    if name.contains(':') {
        let spec = KernelSpec::parse(name)
            .map_err(|e| CliError { code: EXIT_INPUT, msg: format!("{name}: {e}") })?;
        spec.generate().map_err(|e| CliError { code: EXIT_INPUT, msg: format!("{name}: {e}") })
    } else {
        read_trace(Path::new(name))
    }
}

fn split_styles(points: &[DesignPoint]) -> (Vec<DesignPoint>, Vec<DesignPoint>) {
    points.iter().cloned().partition(|p| p.style == CostStyle::Banking)
}

fn run_report(args: &ReportArgs) -> Result<u8, CliError> {
    let text = std::fs::read_to_string(&args.points).map_err(|e| input(&args.points, e))?;
    let points = dse::load_points_csv(&text).map_err(|e| input(&args.points, e))?;
    let groups = dse::group_by_trace(&points);
    match args.mode.as_str() {
        "pareto" => {
            let mut rows = Vec::new();
            for (_, group) in &groups {
                let (banking, amm) = split_styles(group);
                rows.extend(dse::pareto(&banking, Metric::Cycles, Metric::AreaUm2));
                rows.extend(dse::pareto(&amm, Metric::Cycles, Metric::AreaUm2));
            }
            print!("{}", dse::emit_points_csv(&rows));
            Ok(0)
        }
        "ratio" => {
            let mut lines = Vec::new();
            for (trace, group) in &groups {
                let (banking, amm) = split_styles(group);
                match dse::performance_ratio(&banking, &amm, args.tolerance) {
                    Ok(report) => {
                        lines.push(format!("{trace},{},{}", report.pairs.len(), report.area_ratio));
                    }
                    Err(e) => eprintln!("warning: {trace}: {e}"),
                }
            }
            if lines.is_empty() {
                return Err(CliError {
                    code: EXIT_INPUT,
                    msg: "no trace produced any matched design pairs".to_string(),
                });
            }
            println!("trace,matched_pairs,area_ratio");
            for line in lines {
                println!("{line}");
            }
            Ok(0)
        }
        "correlation" => {
            let mut results = Vec::new();
            for (trace, group) in &groups {
                let ddg = resolve_trace_name(trace)?;
                let hist = locality::stride_histogram(&ddg);
                let l = locality::spatial_locality(&hist.merged)
                    .map_err(|e| CliError { code: EXIT_INPUT, msg: format!("{trace}: {e}") })?;
                let (banking, amm) = split_styles(group);
                match dse::performance_ratio(&banking, &amm, args.tolerance) {
                    Ok(ratio) => results.push(dse::KernelResult {
                        trace: trace.clone(),
                        locality: l,
                        area_ratio: ratio.area_ratio,
                    }),
                    Err(e) => eprintln!("warning: {trace}: {e}"),
                }
            }
            let report = dse::locality_correlation(&results)
                .map_err(|e| CliError { code: EXIT_INPUT, msg: e.to_string() })?;
            println!("trace,locality,area_ratio,spearman");
            for k in &report.pairs {
                println!("{},{},{},{}", k.trace, k.locality, k.area_ratio, report.rank_correlation);
            }
            Ok(0)
        }
        other => Err(usage(format!("unknown mode '{other}', want pareto, ratio, or correlation"))),
    }
}
