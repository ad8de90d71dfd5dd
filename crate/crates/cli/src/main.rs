//! `rollsim`: run scenarios, sweeps, parameter gates and trajectory comparisons.

mod plot;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use rollsim_core::config::ConfigFile;
use rollsim_core::hydraulics::{actuation_feasible, max_required_force, transmitted_force};
use rollsim_core::integrator::Trajectory;
use rollsim_core::io::{read_trajectory_csv, write_json, write_sweep_csv, write_trajectory_csv};
use rollsim_core::model::{tt_core_mass_bounds, validate_mass_ratio};
use rollsim_core::scenarios::{metrics::offset_metric, run_scenario, run_sweep, BUILTIN_NAMES};
use rollsim_core::{DynamicsBackend, RobotParams, ScenarioSpec};

#[derive(Parser)]
#[command(name = "rollsim", version, about = "Planar spherical robot simulator with a switching two-pipe core")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one scenario and write its trajectory, metrics and plots.
    Run(RunArgs),
    /// Run a scenario over its parameter grid and write one summary row per point.
    Sweep(SweepArgs),
    /// Check the mass-ratio, actuation and turner-tube gates for a parameter set.
    Validate(ValidateArgs),
    /// Offset `|theta_a(t)| - |theta_b(t)|` between two trajectory CSV files.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Csv,
    Json,
    Plot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Derived,
    Paper,
}

impl From<Backend> for DynamicsBackend {
    fn from(b: Backend) -> Self {
        match b {
            Backend::Derived => DynamicsBackend::Derived,
            Backend::Paper => DynamicsBackend::Paper,
        }
    }
}

#[derive(Args)]
struct ScenarioArgs {
    /// Built-in scenario name or path to a scenario TOML file.
    #[arg(long)]
    scenario: String,
    /// Parameter TOML file; overrides the scenario's robot parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Simulation horizon in seconds.
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long, value_enum)]
    backend: Option<Backend>,
    /// Use the entry predicate exactly as printed (second branch never fires).
    #[arg(long)]
    strict_paper_constraints: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Artifacts to write.
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["csv", "json"])]
    emit: Vec<Emit>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioArgs,
    /// Comma-separated grid replacing the scenario's own.
    #[arg(long, conflicts_with = "points", allow_hyphen_values = true)]
    grid: Option<String>,
    /// Evenly spaced points spanning the scenario's own grid.
    #[arg(long)]
    points: Option<usize>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Parameter TOML file; reference parameters if omitted.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    /// Evaluation time; defaults to the shorter of the two horizons.
    #[arg(long)]
    t_eval: Option<f64>,
}

fn load_config(path: Option<&Path>) -> Result<Option<ConfigFile>> {
    Ok(path.map(ConfigFile::load).transpose()?)
}

fn resolve_scenario(args: &ScenarioArgs) -> Result<ScenarioSpec> {
    let config = load_config(args.config.as_deref())?;
    let base = match &config {
        Some(c) => c.robot_params()?,
        None => RobotParams::default(),
    };
    let mut spec = if BUILTIN_NAMES.contains(&args.scenario.as_str()) {
        ScenarioSpec::builtin(&args.scenario, &base)?
    } else {
        let path = Path::new(&args.scenario);
        if !path.exists() {
            bail!("unknown scenario `{}`; built-ins are {}", args.scenario, BUILTIN_NAMES.join(", "));
        }
        let mut spec = ScenarioSpec::load(path).with_context(|| format!("loading scenario {}", path.display()))?;
        if config.is_some() {
            spec.params = base;
        }
        spec
    };
    if let Some(c) = &config {
        if let Some(b) = c.dynamics_backend {
            spec.backend = b;
        }
        if let Some(ctrl) = c.controller {
            spec.controller = rollsim_core::ControllerConfig { enabled: spec.controller.enabled, ..ctrl };
        }
    }
    if let Some(t) = args.t_end {
        spec.t_end = t;
    }
    if let Some(b) = args.backend {
        spec.backend = b.into();
    }
    if args.strict_paper_constraints {
        spec.controller.strict_paper_constraints = true;
    }
    spec.validate()?;
    Ok(spec)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let spec = resolve_scenario(&args.scenario)?;
    let out = &args.scenario.out;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    info!("running `{}` to t = {} s", spec.name, spec.t_end);
    let outcome = run_scenario(&spec)?;
    fs::write(out.join("scenario.toml"), spec.to_toml_string()?)?;
    if args.emit.contains(&Emit::Csv) {
        write_trajectory_csv(create(&out.join("trajectory.csv"))?, &outcome.trajectory, &spec.params)?;
        if let Some(r) = &outcome.reference {
            write_trajectory_csv(create(&out.join("reference.csv"))?, r, &spec.params)?;
        }
    }
    if args.emit.contains(&Emit::Json) {
        write_json(create(&out.join("metrics.json"))?, &outcome.metrics)?;
    }
    if args.emit.contains(&Emit::Plot) {
        plot::write_plots(out, &outcome.trajectory, outcome.reference.as_ref())?;
    }
    let m = &outcome.metrics;
    println!("scenario {}: final theta {:.6} rad", spec.name, m.final_theta);
    if let Some(o) = m.offset_vs_baseline {
        println!("offset vs reference {o:.6} rad");
    }
    println!("gb entries {}, jump events {}, region switches {}", m.gb_entries, m.jump_events.len(), m.region_switches);
    Ok(())
}

fn parse_grid(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().with_context(|| format!("bad grid value `{s}`")))
        .collect()
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let spec = resolve_scenario(&args.scenario)?;
    let Some(sweep) = &spec.sweep else {
        bail!("scenario `{}` has no sweep", spec.name);
    };
    let grid = match (&args.grid, args.points) {
        (Some(text), _) => Some(parse_grid(text)?),
        (None, Some(n)) => {
            let lo = sweep.values.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = sweep.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            Some(match n {
                0 => Vec::new(),
                1 => vec![lo],
                _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
            })
        }
        (None, None) => None,
    };
    let out = &args.scenario.out;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let report = run_sweep(&spec, grid.as_deref())?;
    write_sweep_csv(create(&out.join("sweep.csv"))?, &report)?;
    write_json(create(&out.join("sweep.json"))?, &report)?;
    println!("{} points over {}", report.rows.len(), report.parameter.as_str());
    if let Some(r) = &report.reversal {
        println!("reversal thresholds: negative {:?}, positive {:?}", r.negative_threshold, r.positive_threshold);
    }
    if let Some(b) = &report.boundaries {
        println!("stability boundaries: lower {:?}, upper {:?}", b.lower, b.upper);
    }
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<bool> {
    let config = load_config(args.config.as_deref())?;
    let (params, discrepancies) = match &config {
        Some(c) => c.params.build()?,
        None => (RobotParams::default(), Vec::new()),
    };
    for d in &discrepancies {
        println!("note: supplied {} = {} differs from derived {:.6e}", d.name, d.supplied, d.derived);
    }
    let m = &params.masses;
    let ratio_ok = validate_mass_ratio(m.core, m.shell)?;
    println!(
        "[{}] mass ratio m_c/M_s = {:.4} within [0.1, 1/3)",
        if ratio_ok { "PASS" } else { "FAIL" },
        m.mass_ratio()
    );
    let h = &params.hydraulics;
    let feasible = actuation_feasible(h, params.gravity)?;
    println!(
        "[{}] actuation F_c_T = {:.4} N > F_c_Max = {:.4} N",
        if feasible { "PASS" } else { "FAIL" },
        transmitted_force(h)?,
        max_required_force(h, params.gravity)
    );
    let bounds = tt_core_mass_bounds(m.shell, m.turner_increment)?;
    let tt_ok = bounds.contains(m.turner_core);
    println!(
        "[{}] turner-tube core mass {:.4} kg within [{:.4}, {:.4})",
        if tt_ok { "PASS" } else { "FAIL" },
        m.turner_core,
        bounds.lo,
        bounds.hi
    );
    Ok(ratio_ok && feasible && tt_ok)
}

fn read_trajectory(path: &Path) -> Result<Trajectory> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let rows = read_trajectory_csv(file).with_context(|| format!("reading {}", path.display()))?;
    if rows.is_empty() {
        bail!("{} has no samples", path.display());
    }
    Ok(Trajectory { samples: rows.into_iter().map(|r| r.sample).collect(), events: Vec::new() })
}

fn cmd_compare(args: &CompareArgs) -> Result<()> {
    let a = read_trajectory(&args.a)?;
    let b = read_trajectory(&args.b)?;
    let t = args.t_eval.unwrap_or_else(|| a.t_end().min(b.t_end()));
    let offset = offset_metric(&a, &b, t)?;
    println!("offset at t = {t} s: {offset:.16e} rad");
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(a) => cmd_run(a).map(|()| true),
        Command::Sweep(a) => cmd_sweep(a).map(|()| true),
        Command::Validate(a) => cmd_validate(a),
        Command::Compare(a) => cmd_compare(a).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
