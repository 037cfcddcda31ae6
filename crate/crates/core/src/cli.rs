//! Command-line front end.
//!
//! Exit codes: 0 success, 2 parse or mismatch error, 3 infeasible or out of
//! budget, 4 exact-search cap exceeded, 5 validation violations, 6 every
//! requested advisor row failed.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::advisor::{sweep_csv, TrainScenario};
use crate::gen::{random_dag, random_hardware, DagSpec, HardwareSpec};
use crate::graph::{ComputeGraph, HardwareGraph};
use crate::placer::{place, PlaceError, PlacerConfig, PlacerMode};
use crate::schedule::{
    build_routing, exact_schedule, list_schedule, load_solution, validate_solution, AssignEntry,
    Placement, PlacementSolution, ScheduleError, SolutionFile,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_CAP: i32 = 4;
pub const EXIT_VIOLATIONS: i32 = 5;
pub const EXIT_NO_ROWS: i32 = 6;

#[derive(Debug, Parser)]
#[command(name = "hybridplan", version, about = "Device placement and hybrid parallelism planner")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Place a compute graph on a hardware graph and write the solution.
    Place(PlaceArgs),
    /// Route and schedule a fixed placement.
    Schedule(ScheduleArgs),
    /// Check a solution file against its graphs.
    Validate(ValidateArgs),
    /// Strategy report over device counts as CSV.
    Advise(AdviseArgs),
    /// Crossover table over N and M lists as CSV.
    Sweep(SweepArgs),
    /// Write a seeded random compute graph and hardware graph.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Brute,
    Heuristic,
}

impl ModeArg {
    fn mode(self) -> PlacerMode {
        match self {
            ModeArg::Exact => PlacerMode::Exact,
            ModeArg::Brute => PlacerMode::BruteForce,
            ModeArg::Heuristic => PlacerMode::Heuristic,
        }
    }

    fn name(self) -> &'static str {
        match self {
            ModeArg::Exact => "exact",
            ModeArg::Brute => "brute",
            ModeArg::Heuristic => "heuristic",
        }
    }
}

#[derive(Debug, Args)]
pub struct GraphInputs {
    #[arg(long = "compute-graph")]
    pub compute_graph: PathBuf,
    #[arg(long)]
    pub hardware: PathBuf,
}

#[derive(Debug, Args)]
pub struct PlaceArgs {
    #[command(flatten)]
    pub inputs: GraphInputs,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,
    /// Solution file to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 12)]
    pub vertex_cap: usize,
    #[arg(long, default_value_t = 4)]
    pub device_cap: usize,
    /// Wall-clock limit for exact search, in milliseconds.
    #[arg(long)]
    pub budget_ms: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ScheduleArgs {
    #[command(flatten)]
    pub inputs: GraphInputs,
    /// JSON object with a `placement` array of {vertex, device}.
    #[arg(long)]
    pub placement: PathBuf,
    /// Search all execution orders instead of list scheduling.
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub inputs: GraphInputs,
    #[arg(long)]
    pub solution: PathBuf,
}

#[derive(Debug, Args)]
pub struct AdviseArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Comma-separated device counts.
    #[arg(long, alias = "devices", value_delimiter = ',', required = true)]
    pub counts: Vec<u64>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// Comma-separated model-parallel degrees.
    #[arg(long, value_delimiter = ',', required = true)]
    pub mp: Vec<u32>,
    /// Comma-separated data-parallel worker counts.
    #[arg(long, value_delimiter = ',', required = true)]
    pub dp: Vec<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 7)]
    pub vertices: usize,
    #[arg(long, default_value_t = 0.3)]
    pub edge_prob: f64,
    /// Inclusive range `LO..HI`, µs.
    #[arg(long, value_parser = parse_range, default_value = "1..20")]
    pub cost: (u64, u64),
    #[arg(long, value_parser = parse_range, default_value = "0..64")]
    pub bytes: (u64, u64),
    #[arg(long, value_parser = parse_range, default_value = "1..100")]
    pub mem: (u64, u64),
    #[arg(long, default_value_t = 2)]
    pub devices: usize,
    #[arg(long, default_value_t = 0)]
    pub routers: usize,
    #[arg(long, default_value_t = 0.3)]
    pub link_prob: f64,
    #[arg(long, value_parser = parse_range, default_value = "1..16")]
    pub bandwidth: (u64, u64),
    #[arg(long, value_parser = parse_range, default_value = "0..4")]
    pub latency: (u64, u64),
    #[arg(long, value_parser = parse_range, default_value = "1048576..1048576")]
    pub device_mem: (u64, u64),
    /// Directory receiving compute.json and hardware.json.
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got {:?}", s))?;
    let lo = lo.trim().parse().map_err(|e| format!("{}: {}", lo, e))?;
    let hi = hi.trim().parse().map_err(|e| format!("{}: {}", hi, e))?;
    Ok((lo, hi))
}

/// Failure carrying its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
        }
    }

    fn parse(message: impl Into<String>) -> Self {
        Self::new(EXIT_PARSE, message)
    }
}

impl From<PlaceError> for CliError {
    fn from(e: PlaceError) -> Self {
        let code = match e {
            PlaceError::TooLarge(_) | PlaceError::Schedule(ScheduleError::TooLarge { .. }) => EXIT_CAP,
            PlaceError::Infeasible(_) | PlaceError::OutOfBudget => EXIT_INFEASIBLE,
        };
        CliError::new(code, e.to_string())
    }
}

/// Text for stdout plus the exit code. Violations exit non-zero with output.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: EXIT_OK }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::parse(format!("{}: {}", path.display(), e)))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::parse(format!("{}: {}", path.display(), e)))
}

fn load_graphs(inputs: &GraphInputs) -> Result<(ComputeGraph, HardwareGraph), CliError> {
    let g = ComputeGraph::parse(&read(&inputs.compute_graph)?)
        .map_err(|e| CliError::parse(format!("{}: {}", inputs.compute_graph.display(), e)))?;
    let hw = HardwareGraph::parse(&read(&inputs.hardware)?)
        .map_err(|e| CliError::parse(format!("{}: {}", inputs.hardware.display(), e)))?;
    Ok((g, hw))
}

fn load_scenario(path: &Path) -> Result<TrainScenario, CliError> {
    TrainScenario::parse(&read(path)?).map_err(|e| CliError::parse(format!("{}: {}", path.display(), e)))
}

/// Runs one command. Warnings go to stderr directly.
pub fn run(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::Place(a) => cmd_place(a),
        Command::Schedule(a) => cmd_schedule(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Advise(a) => cmd_advise(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Gen(a) => cmd_gen(a),
    }
}

fn cmd_place(a: PlaceArgs) -> Result<Outcome, CliError> {
    let (g, hw) = load_graphs(&a.inputs)?;
    let cfg = PlacerConfig {
        mode: a.mode.mode(),
        exact_vertex_cap: a.vertex_cap,
        exact_device_cap: a.device_cap,
        time_budget: a.budget_ms.map(Duration::from_millis),
    };
    let r = place(&g, &hw, &cfg)?;
    if let Some(out) = &a.out {
        write(out, &SolutionFile::from_solution(&g, &hw, &r.solution).to_json())?;
    }
    Ok(Outcome::ok(format!(
        "makespan={:.6} su={:.6} optimal={} mode={} nodes={}\n",
        r.solution.schedule.makespan,
        r.mp_speedup,
        r.optimal,
        a.mode.name(),
        r.nodes_explored
    )))
}

#[derive(Deserialize)]
struct PlacementFile {
    placement: Vec<AssignEntry>,
}

fn resolve_placement(
    entries: &[AssignEntry],
    g: &ComputeGraph,
    hw: &HardwareGraph,
) -> Result<Placement, CliError> {
    if entries.len() != g.len() {
        return Err(CliError::parse(format!(
            "mismatch: placement lists {} vertices, graph has {}",
            entries.len(),
            g.len()
        )));
    }
    let mut assign = vec![None; g.len()];
    for e in entries {
        let v = g
            .index_of(e.vertex)
            .ok_or_else(|| CliError::parse(format!("mismatch: unknown vertex {}", e.vertex)))?;
        let d = hw
            .device_index(e.device)
            .ok_or_else(|| CliError::parse(format!("mismatch: unknown device {}", e.device)))?;
        if assign[v].replace(d).is_some() {
            return Err(CliError::parse(format!("mismatch: vertex {} placed twice", e.vertex)));
        }
    }
    Ok(Placement::new(assign.into_iter().map(Option::unwrap).collect()))
}

fn cmd_schedule(a: ScheduleArgs) -> Result<Outcome, CliError> {
    let (g, hw) = load_graphs(&a.inputs)?;
    let file: PlacementFile = serde_json::from_str(&read(&a.placement)?)
        .map_err(|e| CliError::parse(format!("{}: {}", a.placement.display(), e)))?;
    let placement = resolve_placement(&file.placement, &g, &hw)?;
    if !placement.fits_memory(&g, &hw) {
        return Err(CliError::new(EXIT_INFEASIBLE, "placement exceeds device memory"));
    }
    let routing = build_routing(&g, &hw, &placement);
    let schedule = if a.exact {
        exact_schedule(&g, &placement, &routing, g.len().max(crate::schedule::DEFAULT_EXACT_LIMIT))
            .map_err(|e| CliError::new(EXIT_CAP, e.to_string()))?
    } else {
        list_schedule(&g, &placement, &routing)
    };
    let makespan = schedule.makespan;
    let sol = PlacementSolution {
        placement,
        routing,
        schedule,
    };
    if let Some(out) = &a.out {
        write(out, &SolutionFile::from_solution(&g, &hw, &sol).to_json())?;
    }
    Ok(Outcome::ok(format!(
        "makespan={:.6} su={:.6} scheduler={}\n",
        makespan,
        if makespan > 0.0 { g.total_cost() / makespan } else { 1.0 },
        if a.exact { "exact" } else { "list" }
    )))
}

fn cmd_validate(a: ValidateArgs) -> Result<Outcome, CliError> {
    let (g, hw) = load_graphs(&a.inputs)?;
    let sol = load_solution(&read(&a.solution)?, &g, &hw)
        .map_err(|e| CliError::parse(format!("{}: {}", a.solution.display(), e)))?;
    let violations = validate_solution(&g, &hw, &sol);
    if violations.is_empty() {
        return Ok(Outcome::ok("ok\n".into()));
    }
    Ok(Outcome {
        stdout: violations.iter().map(|v| format!("{}\n", v)).collect(),
        code: EXIT_VIOLATIONS,
    })
}

fn emit(out: &Option<PathBuf>, csv: String) -> Result<String, CliError> {
    match out {
        Some(path) => {
            write(path, &csv)?;
            Ok(String::new())
        }
        None => Ok(csv),
    }
}

fn cmd_advise(a: AdviseArgs) -> Result<Outcome, CliError> {
    let sc = load_scenario(&a.scenario)?;
    if let Some(bad) = a.counts.iter().find(|&&c| c == 0) {
        return Err(CliError::parse(format!("device count {} must be positive", bad)));
    }
    let report = sc.speedup_curve(&a.counts);
    for r in report.errors() {
        if let Err(e) = &r.outcome {
            eprintln!("warning: D={} N={} M={}: {}", r.device_count, r.n, r.m, e);
        }
    }
    for &d in &a.counts {
        if report.recommended(d).is_none() {
            eprintln!("warning: no feasible strategy for {} devices", d);
        }
    }
    if !report.any_ok() {
        return Err(CliError::new(EXIT_NO_ROWS, "no requested device count could be evaluated"));
    }
    Ok(Outcome::ok(emit(&a.out, report.to_csv())?))
}

fn cmd_sweep(a: SweepArgs) -> Result<Outcome, CliError> {
    let sc = load_scenario(&a.scenario)?;
    let rows = sc.sweep(&a.dp, &a.mp);
    for r in &rows {
        if let Err(e) = &r.outcome {
            eprintln!("warning: N={} M={}: {}", r.n, r.m, e);
        }
    }
    if !rows.iter().any(|r| r.outcome.is_ok()) {
        return Err(CliError::new(EXIT_NO_ROWS, "no requested (N, M) pair could be evaluated"));
    }
    Ok(Outcome::ok(emit(&a.out, sweep_csv(&rows))?))
}

fn cmd_gen(a: GenArgs) -> Result<Outcome, CliError> {
    let dag = DagSpec {
        vertices: a.vertices,
        edge_probability: a.edge_prob,
        cost: a.cost,
        bytes: a.bytes,
        mem: a.mem,
    };
    let hw = HardwareSpec {
        devices: a.devices,
        routers: a.routers,
        extra_link_probability: a.link_prob,
        bandwidth: a.bandwidth,
        latency: a.latency,
        mem: a.device_mem,
    };
    dag.validate().map_err(CliError::parse)?;
    hw.validate().map_err(CliError::parse)?;
    fs::create_dir_all(&a.out).map_err(|e| CliError::parse(format!("{}: {}", a.out.display(), e)))?;
    let compute = a.out.join("compute.json");
    let hardware = a.out.join("hardware.json");
    write(&compute, &random_dag(&dag, a.seed).to_json())?;
    write(&hardware, &random_hardware(&hw, a.seed).to_json())?;
    Ok(Outcome::ok(format!(
        "compute={} hardware={}\n",
        compute.display(),
        hardware.display()
    )))
}
