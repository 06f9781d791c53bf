//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verification failure, 2 no solution, 64 usage
//! or configuration error, 65 domain precondition violated, 66 I/O error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::decoupling::interleave;
use crate::holonomy::{
    check_cyclic, check_geometric, default_eta_grid, extract_gate, plan_shortest_path, simulate_report,
    total_rotation_angle, DesignConstraints,
};
use crate::noise::{compare_paths, NoiseModel};
use crate::propagation::{evolve_path, PathPlan, DEFAULT_SAMPLES_PER_SEGMENT};
use crate::twoqubit::{compose_conditional_gate, ConditionalPlan};
use crate::{BrightFrame, Error};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_NO_SOLUTION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DOMAIN: i32 = 65;
pub const EXIT_IO: i32 = 66;

const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;
const DEFAULT_DD_TOL: f64 = 1e-10;
const DEFAULT_GRID_POINTS: usize = 61;

#[derive(Debug, Parser)]
#[command(name = "nhqc", version, about = "Design and verify nonadiabatic holonomic gates in Λ systems")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Residual threshold for pass/fail decisions.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub tolerance: Option<f64>,
    /// Trajectory samples per segment (at least 2).
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES_PER_SEGMENT)]
    pub samples: usize,
    /// Worker threads for grid searches.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Directory for output files.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Search for the shortest matched path with a target phase.
    Design { config: PathBuf },
    /// Check the cyclic and geometric conditions of a plan.
    Verify { plan: PathBuf },
    /// Simulate a plan and report the extracted gate.
    Simulate {
        plan: PathBuf,
        /// Write the trajectory to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Interleave a four-segment plan with decoupling pulses.
    Dd { plan: PathBuf },
    /// Compose a spin-conditioned two-qubit gate.
    TwoQubit { plan: PathBuf },
    /// Compare two plans under Lindblad noise.
    NoiseCompare { short: PathBuf, reference: PathBuf, noise: PathBuf },
}

/// Input of the `design` command.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfig {
    pub target_beta: f64,
    #[serde(default)]
    pub eta1_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub eta2_grid: Option<Vec<f64>>,
    #[serde(default = "one")]
    pub omega_max: f64,
    #[serde(default)]
    pub tau_max: Option<f64>,
    #[serde(default = "yes")]
    pub allow_single_segment: bool,
    #[serde(default)]
    pub phi1: f64,
    #[serde(default)]
    pub frame: Option<BrightFrame>,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

/// Input of the `noise-compare` command: rates plus an optional step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseConfig {
    #[serde(flatten)]
    pub noise: NoiseModel,
    #[serde(default)]
    pub dt: Option<f64>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Io(String),
    Domain(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
            Failure::Domain(Error::NoSolution(_)) => EXIT_NO_SOLUTION,
            Failure::Domain(Error::NotCyclic(_)) => EXIT_VERIFY,
            Failure::Domain(_) => EXIT_DOMAIN,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => format!("usage error: {m}"),
            Failure::Io(m) => format!("i/o error: {m}"),
            Failure::Domain(e) => e.to_string(),
        }
    }
}

type Outcome = std::result::Result<(Value, i32), Failure>;

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok((value, code)) => match emit(&cli.global, &value) {
            Ok(()) => code,
            Err(f) => {
                eprintln!("nhqc: {}", f.message());
                f.code()
            }
        },
        Err(f) => {
            eprintln!("nhqc: {}", f.message());
            f.code()
        }
    }
}

fn execute(cli: &Cli) -> Outcome {
    let g = &cli.global;
    if let Some(t) = g.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::Usage(format!("--tolerance must be positive, got {t}")));
        }
    }
    if g.samples < 2 {
        return Err(Failure::Usage(format!("--samples must be at least 2, got {}", g.samples)));
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = g.jobs {
        if j == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| Failure::Usage(e.to_string()))?;
    pool.install(|| match &cli.command {
        Command::Design { config } => cmd_design(g, config),
        Command::Verify { plan } => cmd_verify(g, plan),
        Command::Simulate { plan, csv } => cmd_simulate(g, plan, csv.as_deref()),
        Command::Dd { plan } => cmd_dd(g, plan),
        Command::TwoQubit { plan } => cmd_two_qubit(g, plan),
        Command::NoiseCompare { short, reference, noise } => cmd_noise_compare(g, short, reference, noise),
    })
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// Plans and other data files: anything unreadable or malformed is an I/O
/// failure.
fn read_data<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn read_plan(path: &Path) -> Result<PathPlan, Failure> {
    let plan: PathPlan = read_data(path)?;
    plan.validate().map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    Ok(plan)
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn to_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

/// Prints the report to stdout and, with --output, also to DIR/report.json.
fn emit(g: &GlobalOpts, value: &Value) -> Result<(), Failure> {
    let text = to_pretty(value);
    if let Some(dir) = &g.output {
        write_file(&dir.join("report.json"), &text)?;
    }
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| Failure::Io(e.to_string()))
}

fn verdict(passed: bool) -> i32 {
    if passed { EXIT_OK } else { EXIT_VERIFY }
}

fn cmd_design(g: &GlobalOpts, path: &Path) -> Outcome {
    let text = read_text(path)?;
    let cfg: DesignConfig =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let default_grid = || default_eta_grid(DEFAULT_GRID_POINTS);
    let eta1 = cfg.eta1_grid.clone().unwrap_or_else(default_grid);
    let eta2 = cfg.eta2_grid.clone().unwrap_or_else(default_grid);
    if eta1.is_empty() || eta2.is_empty() {
        return Err(Failure::Usage("eta grids must be nonempty".into()));
    }
    if let Some(bad) = eta1.iter().chain(&eta2).find(|&&e| !(e > 0.0 && e < std::f64::consts::PI)) {
        return Err(Failure::Usage(format!("grid value {bad} outside (0, pi)")));
    }
    if !(cfg.target_beta > 0.0 && cfg.target_beta < std::f64::consts::TAU) {
        return Err(Failure::Usage(format!("target_beta {} outside (0, 2pi)", cfg.target_beta)));
    }
    if !(cfg.omega_max > 0.0 && cfg.omega_max.is_finite()) {
        return Err(Failure::Usage("omega_max must be positive".into()));
    }
    if cfg.tau_max.is_some_and(|t| !(t > 0.0)) {
        return Err(Failure::Usage("tau_max must be positive".into()));
    }
    let frame = cfg.frame.unwrap_or_else(BrightFrame::computational);
    let frame = BrightFrame::new(frame.theta, frame.phi).map_err(|e| Failure::Usage(e.to_string()))?;
    let constraints = DesignConstraints {
        omega_max: cfg.omega_max,
        tau_max: cfg.tau_max,
        frame,
        phi1: cfg.phi1,
        allow_single_segment: cfg.allow_single_segment,
    };
    let design = plan_shortest_path(cfg.target_beta, &eta1, &eta2, &constraints)?;
    let tol = g.tolerance.unwrap_or(DEFAULT_RESIDUAL_TOL);
    let report = extract_gate(&design.plan, tol)?;

    let dir = g.output.clone().unwrap_or_else(|| PathBuf::from("."));
    write_file(&dir.join("plan.json"), &to_pretty(&design.plan))?;
    let mut value = report.to_json();
    value["geometric_residual"] = json!(check_geometric(&design.plan, g.samples)?);
    value["target_beta"] = json!(cfg.target_beta);
    value["segments"] = json!(design.plan.segments.len());
    value["eta1"] = json!(design.eta1);
    value["eta2"] = json!(design.eta2);
    value["branch"] = json!(design.branch);
    Ok((value, EXIT_OK))
}

fn cmd_verify(g: &GlobalOpts, path: &Path) -> Outcome {
    let plan = read_plan(path)?;
    let tol = g.tolerance.unwrap_or(DEFAULT_RESIDUAL_TOL);
    let cyclic = check_cyclic(&plan)?;
    let geometric = check_geometric(&plan, g.samples)?;
    let passed = cyclic <= tol && geometric <= tol;
    let value = json!({
        "cyclic_residual": cyclic,
        "geometric_residual": geometric,
        "total_angle": total_rotation_angle(&plan),
        "tolerance": tol,
        "passed": passed,
    });
    Ok((value, verdict(passed)))
}

fn cmd_simulate(g: &GlobalOpts, path: &Path, csv: Option<&Path>) -> Outcome {
    let plan = read_plan(path)?;
    let tol = g.tolerance.unwrap_or(DEFAULT_RESIDUAL_TOL);
    let trajectory = evolve_path(&plan, g.samples)?;
    let csv = csv.map(Path::to_path_buf).or_else(|| g.output.as_ref().map(|d| d.join("trajectory.csv")));
    if let Some(csv) = csv {
        let mut buf = Vec::new();
        trajectory.write_csv(&mut buf).map_err(|e| Failure::Io(e.to_string()))?;
        write_file(&csv, &String::from_utf8(buf).expect("csv output is utf-8"))?;
    }
    let report = simulate_report(&plan, g.samples)?;
    let mut value = report.to_json();
    value["samples"] = json!(trajectory.samples.len());
    Ok((value, verdict(report.is_cyclic(tol))))
}

fn cmd_dd(g: &GlobalOpts, path: &Path) -> Outcome {
    let plan = read_plan(path)?;
    let tol = g.tolerance.unwrap_or(DEFAULT_DD_TOL);
    let schedule = interleave(&plan)?;
    let error = schedule.equivalence_error(&plan)?;
    let passed = error <= tol;
    let value = json!({
        "schedule": schedule.to_json(),
        "equivalence_error": error,
        "geometric_residual": schedule.geometric_residual(g.samples)?,
        "tolerance": tol,
        "passed": passed,
    });
    Ok((value, verdict(passed)))
}

fn cmd_two_qubit(g: &GlobalOpts, path: &Path) -> Outcome {
    let cp: ConditionalPlan = read_data(path)?;
    for plan in [&cp.plan_up, &cp.plan_down] {
        plan.validate().map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    let gate = compose_conditional_gate(&cp, g.tolerance.unwrap_or(DEFAULT_RESIDUAL_TOL))?;
    Ok((gate.to_json()?, EXIT_OK))
}

fn cmd_noise_compare(_g: &GlobalOpts, short: &Path, reference: &Path, noise: &Path) -> Outcome {
    let short = read_plan(short)?;
    let reference = read_plan(reference)?;
    let cfg: NoiseConfig = read_data(noise)?;
    cfg.noise.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    if cfg.dt.is_some_and(|dt| !(dt > 0.0)) {
        return Err(Failure::Usage("dt must be positive".into()));
    }
    let comparison = compare_paths(&short, &reference, &cfg.noise, cfg.dt)?;
    Ok((serde_json::to_value(comparison).expect("serializable"), EXIT_OK))
}
