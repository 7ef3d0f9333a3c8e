//! Command-line front end for the `uavbeam` library.
//!
//! [`run`] turns parsed arguments into an [`Output`] without touching the
//! filesystem, so the binary only has to print and write files.

pub mod config;
pub mod error;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use uavbeam::mission::{assemble_plan, CellPayload};
use uavbeam::montecarlo::{simulate_mc_mission, simulate_rate, write_realizations_csv};
use uavbeam::optimizer::{grid_search_2d, linspace, optimize, VALIDATION_GRID};
use uavbeam::rates::{mission_time_mc, McMission};
use uavbeam::{CountModel, Deployment, FeasibleBox, Mode, RateModel, SimSpec, SystemParams};

pub use config::Config;
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "uavbeam", version, about = "Beamwidth and altitude planning for UAV-served ground terminals")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Directory for CSV and report files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Overrides the seed from the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Overrides a configuration key, e.g. `--set density_per_m2=0.01`.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal altitude and half-beamwidth for one mode.
    Optimize(OptimizeArgs),
    /// Closed-form rate along one variable, optionally with simulation.
    Sweep(SweepArgs),
    /// Monte Carlo check of the closed-form rate.
    Simulate(SimulateArgs),
    /// Cell layout, tour and timing over the configured rectangle.
    Plan(PlanArgs),
    /// Print the resolved configuration as TOML.
    DumpConfig,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long, value_parser = parse_mode)]
    pub mode: Mode,
    /// Also run the 64 x 64 grid search and report its optimum.
    #[arg(long)]
    pub validate_grid: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVar {
    H,
    Theta,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_parser = parse_mode)]
    pub mode: Mode,
    #[arg(long, value_enum)]
    pub var: SweepVar,
    /// `lo:hi:n`, with n >= 2 points including both ends.
    #[arg(long)]
    pub range: String,
    /// Value of the variable held fixed (radians for theta, metres for h).
    #[arg(long)]
    pub at: f64,
    #[arg(long)]
    pub with_sim: bool,
    #[arg(long, default_value_t = 100)]
    pub realizations: usize,
    #[arg(long, value_enum, default_value_t = CountArg::Poisson)]
    pub count_model: CountArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountArg {
    Poisson,
    Fixed,
}

impl From<CountArg> for CountModel {
    fn from(c: CountArg) -> Self {
        match c {
            CountArg::Poisson => CountModel::Poisson,
            CountArg::Fixed => CountModel::Fixed,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_parser = parse_mode)]
    pub mode: Mode,
    /// Altitude in metres. Defaults to the optimizer's choice.
    #[arg(long)]
    pub h: Option<f64>,
    /// Half-beamwidth in radians. Defaults to the optimizer's choice.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub realizations: usize,
    /// Largest accepted relative gap between simulation and closed form.
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
    #[arg(long, value_enum, default_value_t = CountArg::Poisson)]
    pub count_model: CountArg,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long, value_parser = parse_mode)]
    pub mode: Mode,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

/// A file the command wants written under `--out`.
#[derive(Debug, Clone, PartialEq)]
pub struct OutFile {
    pub name: String,
    pub contents: String,
}

#[derive(Debug)]
pub struct Output {
    pub report: String,
    pub files: Vec<OutFile>,
    /// Without `--out`, print the files to stdout and the report to stderr.
    pub files_are_primary: bool,
    /// Set when the command finished but its result should fail the run.
    pub failure: Option<CliError>,
}

impl Output {
    fn report(report: String) -> Self {
        Output { report, files: Vec::new(), files_are_primary: false, failure: None }
    }
}

pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let mut cfg = Config::load(cli.config.as_deref(), &cli.overrides)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    match &cli.command {
        Command::Optimize(a) => cmd_optimize(&cfg, a),
        Command::Sweep(a) => cmd_sweep(&cfg, a),
        Command::Simulate(a) => cmd_simulate(&cfg, a),
        Command::Plan(a) => cmd_plan(&cfg, a),
        Command::DumpConfig => Ok(Output::report(cfg.dump())),
    }
}

fn deployment_or_optimum(
    mode: Mode,
    params: &SystemParams,
    bounds: &FeasibleBox,
    h: Option<f64>,
    theta: Option<f64>,
) -> Result<Deployment, CliError> {
    let (h, theta) = match (h, theta) {
        (Some(h), Some(t)) => (h, t),
        _ => {
            let o = optimize(mode, params, bounds)?;
            (h.unwrap_or(o.h_star), theta.unwrap_or(o.theta_star))
        }
    };
    Ok(Deployment::new(h, theta)?)
}

pub fn cmd_optimize(cfg: &Config, a: &OptimizeArgs) -> Result<Output, CliError> {
    let params = cfg.system_params()?;
    let bounds = cfg.feasible_box()?;
    let o = optimize(a.mode, &params, &bounds)?;
    let mut s = String::new();
    let _ = writeln!(s, "mode: {}", o.mode);
    let _ = writeln!(s, "method: {}", o.method.name());
    let _ = writeln!(s, "h_star_m: {}", o.h_star);
    let _ = writeln!(s, "theta_star_rad: {}", o.theta_star);
    let _ = writeln!(s, "theta_star_deg: {}", o.theta_star.to_degrees());
    let _ = writeln!(s, "objective_bps_per_hz: {}", o.objective);
    let _ = writeln!(s, "h_indifferent: {}", o.h_indifferent);
    if a.mode == Mode::Mc {
        if let (Some(bits), Some(area)) = (cfg.file_size_bits, cfg.area()) {
            let dep = Deployment::new(o.h_star, o.theta_star)?;
            let t = mission_time_mc(&params, &dep, &McMission::for_area(&params, bits, area)?)?;
            let _ = writeln!(s, "mission_time_s: {t}");
        }
    }
    if a.validate_grid {
        let g = grid_search_2d(a.mode, &params, &bounds, VALIDATION_GRID, VALIDATION_GRID)?;
        let _ = writeln!(s, "grid_h_star_m: {}", g.h_star);
        let _ = writeln!(s, "grid_theta_star_rad: {}", g.theta_star);
        let _ = writeln!(s, "grid_objective_bps_per_hz: {}", g.objective);
    }
    let mut out = Output::report(s.clone());
    out.files.push(OutFile { name: format!("optimize_{}.txt", a.mode), contents: s });
    Ok(out)
}

/// Parses `lo:hi:n`.
pub fn parse_range(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = |why: &str| CliError::Config(format!("range: `{s}` {why}"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("must look like lo:hi:n"));
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad("has a non-numeric lower end"))?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad("has a non-numeric upper end"))?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad("has a non-integer point count"))?;
    if n < 2 {
        return Err(bad("needs at least 2 points"));
    }
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(bad("needs finite lo < hi"));
    }
    Ok(linspace(lo, hi, n))
}

pub fn cmd_sweep(cfg: &Config, a: &SweepArgs) -> Result<Output, CliError> {
    let params = cfg.system_params()?;
    let model = RateModel::new(&params)?;
    let values = parse_range(&a.range)?;
    let mut csv = String::from("sweep_value,rate_bps_per_hz");
    if a.with_sim {
        csv.push_str(",empirical_mean_bps_per_hz,empirical_stderr_bps_per_hz,relative_gap");
    }
    csv.push('\n');
    for &v in &values {
        let (h, t) = match a.var {
            SweepVar::H => (v, a.at),
            SweepVar::Theta => (a.at, v),
        };
        let dep = Deployment::new(h, t)?;
        let rate = model.rate(a.mode, h, t)?;
        let _ = write!(csv, "{v},{rate}");
        if a.with_sim {
            let spec = SimSpec::new(a.mode, cfg.seed)
                .with_realizations(a.realizations)
                .with_count_model(a.count_model.into());
            let r = simulate_rate(&params, &dep, &spec)?;
            let _ = write!(csv, ",{},{},{}", r.empirical_mean, fmt_stderr(r.empirical_stderr), r.relative_gap);
        }
        csv.push('\n');
    }
    let var = match a.var {
        SweepVar::H => "h",
        SweepVar::Theta => "theta",
    };
    let mut report = String::new();
    let _ = writeln!(report, "mode: {}", a.mode);
    let _ = writeln!(report, "var: {var}");
    let _ = writeln!(report, "at: {}", a.at);
    let _ = writeln!(report, "points: {}", values.len());
    if a.with_sim {
        let _ = writeln!(report, "seed: {}", cfg.seed);
        let _ = writeln!(report, "realizations: {}", a.realizations);
    }
    Ok(Output {
        report,
        files: vec![OutFile { name: format!("sweep_{}_{var}.csv", a.mode), contents: csv }],
        files_are_primary: true,
        failure: None,
    })
}

fn fmt_stderr(se: Option<f64>) -> String {
    se.map_or_else(|| "n/a".to_string(), |v| v.to_string())
}

pub fn cmd_simulate(cfg: &Config, a: &SimulateArgs) -> Result<Output, CliError> {
    if !(a.tolerance.is_finite() && a.tolerance >= 0.0) {
        return Err(CliError::Config(format!("tolerance: must be >= 0, got {}", a.tolerance)));
    }
    let params = cfg.system_params()?;
    let bounds = cfg.feasible_box()?;
    let dep = deployment_or_optimum(a.mode, &params, &bounds, a.h, a.theta)?;
    let spec = SimSpec::new(a.mode, cfg.seed)
        .with_realizations(a.realizations)
        .with_count_model(a.count_model.into());
    let r = simulate_rate(&params, &dep, &spec)?;

    let mut s = String::new();
    let _ = writeln!(s, "seed: {}", cfg.seed);
    let _ = writeln!(s, "mode: {}", a.mode);
    let _ = writeln!(s, "h_m: {}", dep.altitude_m);
    let _ = writeln!(s, "theta_rad: {}", dep.half_beamwidth_rad);
    let _ = writeln!(s, "realizations: {}", spec.realizations);
    let _ = writeln!(s, "region: {}", spec.region.name());
    let count = match spec.count_model {
        CountModel::Poisson => "poisson",
        CountModel::Fixed => "fixed",
    };
    let _ = writeln!(s, "count_model: {count}");
    let _ = writeln!(s, "analytic_bps_per_hz: {}", r.analytic);
    let _ = writeln!(s, "empirical_mean_bps_per_hz: {}", r.empirical_mean);
    let _ = writeln!(s, "empirical_stderr_bps_per_hz: {}", fmt_stderr(r.empirical_stderr));
    let _ = writeln!(s, "relative_gap: {}", r.relative_gap);
    let _ = writeln!(s, "tolerance: {}", a.tolerance);
    if let Some(edge) = r.edge_rate {
        let _ = writeln!(s, "edge_rate_bps_per_hz: {edge}");
    }
    if let Some(w) = r.worst_gt_rate {
        let _ = writeln!(s, "worst_gt_rate_bps_per_hz: {w}");
    }
    if a.mode == Mode::Mc {
        if let (Some(bits), Some(area)) = (cfg.file_size_bits, cfg.area()) {
            match simulate_mc_mission(&params, &dep, bits, area, &spec) {
                Ok(m) => {
                    let _ = writeln!(s, "mission_time_s: {}", m.total_s);
                    let _ = writeln!(s, "mission_time_closed_form_s: {}", m.analytic_s);
                    let _ = writeln!(s, "all_terminals_served: {}", m.all_served);
                }
                // the area is smaller than one cell, so there is no mission to report
                Err(uavbeam::Error::Config { field, .. }) if field == "area_m2" => {
                    let _ = writeln!(s, "mission_time_s: n/a");
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    let pass = r.relative_gap <= a.tolerance;
    let _ = writeln!(s, "status: {}", if pass { "PASS" } else { "FAIL" });

    let mut csv = Vec::new();
    write_realizations_csv(&r, &mut csv)?;
    let csv = String::from_utf8(csv).expect("csv is ascii");
    Ok(Output {
        report: s.clone(),
        files: vec![
            OutFile { name: format!("simulate_{}_realizations.csv", a.mode), contents: csv },
            OutFile { name: format!("simulate_{}.txt", a.mode), contents: s },
        ],
        files_are_primary: false,
        failure: (!pass).then(|| {
            CliError::Validation(format!("relative gap {} exceeds tolerance {}", r.relative_gap, a.tolerance))
        }),
    })
}

pub fn cmd_plan(cfg: &Config, a: &PlanArgs) -> Result<Output, CliError> {
    let params = cfg.system_params()?;
    let bounds = cfg.feasible_box()?;
    let rect = cfg.rect()?;
    let speed = cfg
        .uav_speed_mps
        .ok_or_else(|| CliError::Config("uav_speed_mps: planning needs a UAV speed".into()))?;
    let payload = match a.mode {
        Mode::Mc => CellPayload::FileBits(
            cfg.file_size_bits
                .ok_or_else(|| CliError::Config("file_size_bits: multicast plans need a file size".into()))?,
        ),
        Mode::Bc | Mode::Mac => CellPayload::Period(
            cfg.period_s
                .ok_or_else(|| CliError::Config("period_s: broadcast and uplink plans need a period".into()))?,
        ),
    };
    let dep = deployment_or_optimum(a.mode, &params, &bounds, a.h, a.theta)?;
    let plan = assemble_plan(&params, &dep, a.mode, payload, speed, &rect)?;

    let mut s = String::new();
    let _ = writeln!(s, "h_m: {}", dep.altitude_m);
    let _ = writeln!(s, "theta_rad: {}", dep.half_beamwidth_rad);
    let _ = writeln!(s, "coverage_radius_m: {}", dep.coverage_radius());
    s.push_str(&plan.summary());
    if let CellPayload::FileBits(bits) = payload {
        let cells = plan.centers.len() as f64;
        let area = cells * uavbeam::geometry::HEX_AREA_FACTOR * dep.coverage_radius().powi(2);
        let t = mission_time_mc(&params, &dep, &McMission::for_area(&params, bits, area)?)?;
        let _ = writeln!(s, "mission_time_mc_s: {t}");
    }
    let mut csv = Vec::new();
    plan.write_csv(&mut csv)?;
    let csv = String::from_utf8(csv).expect("csv is ascii");
    Ok(Output {
        report: s.clone(),
        files: vec![
            OutFile { name: format!("plan_{}.csv", a.mode), contents: csv },
            OutFile { name: format!("plan_{}.txt", a.mode), contents: s },
        ],
        files_are_primary: false,
        failure: None,
    })
}
