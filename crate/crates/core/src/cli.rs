//! Command-line experiment surface.
//!
//! Exit codes:
//! - `0` success
//! - `2` bad input (unknown metric, malformed CSV/config, missing file)
//! - `3` solver did not converge within the iteration budget
//! - `4` violated mathematical precondition (`beta >= n+1`, negative rho,
//!   cone parameter out of range, no or misdeclared singularity order)
//! - `5` operation refused on a model-only catalog entry

use std::ffi::OsString;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::catalog::{self, HarmonicSpec};
use crate::convergence;
use crate::error::{Error, Result};
use crate::grid::AnnulusGrid;
use crate::io::{self as fio, NO_CONFIG};
use crate::ops;
use crate::singularity::{self, Branch, LOG_BRANCH_CAVEAT};
use crate::solver::{self, KwProblem};
use crate::verify::{self, FullConnection, MetricSign};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;
pub const EXIT_MODEL_ONLY: i32 = 5;

/// Map crate errors to process exit codes.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::BetaConstraint { .. }
        | Error::NegativeRho { .. }
        | Error::AlphaOutOfRange(_)
        | Error::NoOrder
        | Error::MisdeclaredOrder { .. }
        | Error::NonIntegerOrder { .. } => EXIT_PRECONDITION,
        Error::ModelOnly(_) => EXIT_MODEL_ONLY,
        _ => EXIT_INPUT,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "special-kahler",
    version,
    about = "Closed-form catalog, Kazdan-Warner solver, structural verification \
             and singularity classification for 2d special Kähler metrics"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List catalog metrics or sample one to CSV.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Solve the Kazdan-Warner equation from a JSON config.
    Solve(SolveArgs),
    /// Check the structural identities of a catalog metric.
    Verify(VerifyArgs),
    /// Classify the singularity branch of a metric or a profile CSV.
    Classify(ClassifyArgs),
    /// Emit a Python/matplotlib script rendering a CSV produced by this tool.
    Plot(PlotArgs),
    /// Refinement study: solver error against a closed-form solution.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Subcommand)]
enum CatalogAction {
    /// Print one line per entry (or full JSON with --json).
    List {
        #[arg(long)]
        json: bool,
    },
    /// Sample the conformal factor w on the entry's default grid.
    Sample {
        /// Entry name, e.g. half_plane, punctured_disc, conical(0.25).
        name: String,
        /// Nodes per direction.
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct SolveArgs {
    /// JSON config file (see `SolveConfig` in the README).
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path for the solution u (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Catalog entry name.
    name: String,
    /// Nodes per direction at the coarsest level.
    #[arg(long, default_value_t = 128)]
    resolution: usize,
    /// Number of dyadic refinement levels (fitted orders need at least 2).
    #[arg(long, default_value_t = 1)]
    refinements: usize,
    /// Emit the report as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Catalog entry name (mutually exclusive with --profile).
    #[arg(required_unless_present = "profile", conflicts_with = "profile")]
    name: Option<String>,
    /// Radial profile CSV (columns r,w_mean,w_spread).
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Singularity order n of the cubic form, when known.
    #[arg(long)]
    order: Option<i32>,
    /// Outermost dyadic sampling radius for catalog entries.
    #[arg(long, default_value_t = 0.25)]
    r_start: f64,
    /// Innermost dyadic sampling radius for catalog entries.
    #[arg(long, default_value_t = 1e-8)]
    r_stop: f64,
}

#[derive(Debug, Args)]
struct PlotArgs {
    /// CSV file written by catalog sample, solve, or a profile export.
    #[arg(long)]
    input: PathBuf,
    /// Where to write the Python script (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ConvergenceArgs {
    /// Catalog entry name (must be exact, not model-only).
    name: String,
    /// Coarsest resolution per direction.
    #[arg(long, default_value_t = 32)]
    base: usize,
    /// Number of dyadic refinement levels.
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// Solver tolerance at each level.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Emit the study as JSON.
    #[arg(long)]
    json: bool,
}

/// JSON schema of `solve --config` (versioned, unknown fields rejected).
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveConfig {
    schema_version: u32,
    grid: GridConfig,
    harmonic: HarmonicSpec,
    /// Power-branch exponent: Dirichlet data `u = -beta log r`.
    #[serde(default)]
    beta: f64,
    #[serde(default = "default_tol")]
    tol: f64,
    #[serde(default = "default_max_iter")]
    max_iter: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridConfig {
    r_in: f64,
    r_out: f64,
    n_radial: usize,
    n_angular: usize,
}

fn default_tol() -> f64 {
    1e-8
}

fn default_max_iter() -> usize {
    50
}

/// Parse and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version through this path with status 0.
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn dispatch(command: Command) -> Result<i32> {
    match command {
        Command::Catalog { action } => catalog_cmd(action),
        Command::Solve(args) => solve_cmd(args),
        Command::Verify(args) => verify_cmd(args),
        Command::Classify(args) => classify_cmd(args),
        Command::Plot(args) => plot_cmd(args),
        Command::Convergence(args) => convergence_cmd(args),
    }
}

fn write_out(path: Option<&Path>, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut f = fs::File::create(p)?;
            body(&mut f)?;
            Ok(())
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            body(&mut lock)
        }
    }
}

fn catalog_cmd(action: CatalogAction) -> Result<i32> {
    match action {
        CatalogAction::List { json } => {
            let entries = catalog::all_entries();
            if json {
                println!("{}", serde_json::to_string_pretty(&entries)?);
            } else {
                for m in entries {
                    let branch = match m.expected_classification {
                        Branch::Power { beta, c } => format!("power beta={beta} C={c}"),
                        Branch::Logarithmic { n_plus_1 } => {
                            format!("logarithmic n+1={n_plus_1}")
                        }
                    };
                    let tag = if m.exact { "exact" } else { "model-only" };
                    println!(
                        "{:<18} domain=[{}, {}]  {}  ({})",
                        m.name, m.domain.0, m.domain.1, branch, tag
                    );
                }
            }
            Ok(EXIT_OK)
        }
        CatalogAction::Sample {
            name,
            resolution,
            output,
        } => {
            let m = catalog::by_name(&name)?;
            let grid = m.default_grid(resolution)?;
            let w = m.sample_w(&grid);
            write_out(output.as_deref(), |out| fio::write_scalar_csv(out, &w, NO_CONFIG))?;
            Ok(EXIT_OK)
        }
    }
}

fn solve_cmd(args: SolveArgs) -> Result<i32> {
    let raw = fs::read_to_string(&args.config).map_err(|_| {
        Error::MissingFile(args.config.display().to_string())
    })?;
    let cfg: SolveConfig = serde_json::from_str(&raw)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    if cfg.schema_version != fio::SCHEMA_VERSION {
        return Err(Error::InvalidConfig(format!(
            "unsupported schema_version {} (expected {})",
            cfg.schema_version,
            fio::SCHEMA_VERSION
        )));
    }
    let hash = fio::config_hash(&raw);
    let grid = AnnulusGrid::new(
        cfg.grid.r_in,
        cfg.grid.r_out,
        cfg.grid.n_radial,
        cfg.grid.n_angular,
    )?;
    let sol = solver::solve_with_exponent(&cfg.harmonic, cfg.beta, grid, cfg.tol, cfg.max_iter)?;
    eprintln!(
        "newton_iterations={} residual_norm={:.3e} converged={} config={}",
        sol.newton_iterations, sol.residual_norm, sol.converged, hash
    );
    if !sol.converged {
        return Ok(EXIT_NO_CONVERGENCE);
    }
    write_out(args.output.as_deref(), |out| {
        fio::write_scalar_csv(out, &sol.u, &hash)
    })?;
    Ok(EXIT_OK)
}

#[derive(Debug, serde::Serialize)]
struct VerifyLevel {
    resolution: usize,
    flatness: f64,
    symmetry: f64,
    eta: verify::EtaReport,
    curvature_min: f64,
    curvature_max: f64,
}

#[derive(Debug, serde::Serialize)]
struct VerifyOrders {
    flatness: Option<f64>,
    eta_closedness: Option<f64>,
    eta_codifferential: Option<f64>,
    eta_kw: Option<f64>,
}

#[derive(Debug, serde::Serialize)]
struct VerifyReport {
    name: String,
    levels: Vec<VerifyLevel>,
    fitted_orders: Option<VerifyOrders>,
    order: Option<i32>,
    sandwich: Option<(f64, f64)>,
}

fn verify_level(m: &catalog::ClosedFormMetric, resolution: usize) -> Result<VerifyLevel> {
    let grid = m.default_grid(resolution)?;
    let u = m.sample_u(&grid);
    let conn = verify::build_connection(&m.h_spec, &u);
    let flatness = verify::flatness_residual(&conn);
    let symmetry = verify::symmetry_residual(&FullConnection::from(&conn));
    let eta = verify::check_eta_system(m, &grid)?;
    let k = verify::curvature(&u, MetricSign::Exponent2u);
    let (mut kmin, mut kmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 1..grid.n_radial() - 1 {
        for j in 0..grid.n_angular() {
            kmin = kmin.min(k.at(i, j));
            kmax = kmax.max(k.at(i, j));
        }
    }
    Ok(VerifyLevel {
        resolution,
        flatness,
        symmetry,
        eta,
        curvature_min: kmin,
        curvature_max: kmax,
    })
}

/// Fitted convergence order, or `None` when any level already sits at the
/// rounding floor (the fit would measure noise, not truncation).
fn residual_order(h: &[f64], residuals: &[f64]) -> Option<f64> {
    if residuals.iter().any(|&e| e <= 1e-13) {
        return None;
    }
    convergence::fitted_order(h, residuals).ok()
}

fn verify_cmd(args: VerifyArgs) -> Result<i32> {
    let m = catalog::by_name(&args.name)?;
    if !m.exact {
        return Err(Error::ModelOnly(m.name));
    }
    if args.refinements == 0 {
        return Err(Error::InvalidConfig("refinements must be >= 1".to_string()));
    }
    let mut levels = Vec::with_capacity(args.refinements);
    for level in 0..args.refinements {
        levels.push(verify_level(&m, args.resolution << level)?);
    }
    let fitted_orders = (levels.len() >= 2).then(|| {
        let h: Vec<f64> = levels.iter().map(|l| 1.0 / l.resolution as f64).collect();
        let pick = |f: fn(&VerifyLevel) -> f64| {
            let res: Vec<f64> = levels.iter().map(f).collect();
            residual_order(&h, &res)
        };
        VerifyOrders {
            flatness: pick(|l| l.flatness),
            eta_closedness: pick(|l| l.eta.closedness),
            eta_codifferential: pick(|l| l.eta.codifferential),
            eta_kw: pick(|l| l.eta.kw),
        }
    });
    let grid = m.default_grid(args.resolution)?;
    let order = m.h_spec.xi0_order();
    let sandwich = match order {
        Some(n) => Some(verify::curvature_sandwich(&m.h_spec, n, &grid)?),
        None => None,
    };
    let report = VerifyReport {
        name: m.name.clone(),
        levels,
        fitted_orders,
        order,
        sandwich,
    };
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!("metric            {}", report.name);
        for l in &report.levels {
            println!(
                "  {:>4}^2  flatness={:.3e} symmetry={:.3e} \
                 eta: closedness={:.3e} codifferential={:.3e} kw={:.3e} \
                 curvature=[{:.6}, {:.6}]",
                l.resolution,
                l.flatness,
                l.symmetry,
                l.eta.closedness,
                l.eta.codifferential,
                l.eta.kw,
                l.curvature_min,
                l.curvature_max
            );
        }
        if let Some(o) = &report.fitted_orders {
            let show = |v: Option<f64>| match v {
                Some(p) => format!("{p:.2}"),
                None => "n/a (rounding floor)".to_string(),
            };
            println!(
                "fitted orders     flatness={} eta_closedness={} eta_codifferential={} eta_kw={}",
                show(o.flatness),
                show(o.eta_closedness),
                show(o.eta_codifferential),
                show(o.eta_kw)
            );
        }
        if let (Some(n), Some((c1, c2))) = (report.order, report.sandwich) {
            println!("cubic form        order n={n}, sandwich constants C1={c1:.6}, C2={c2:.6}");
        }
    }
    Ok(EXIT_OK)
}

fn classify_cmd(args: ClassifyArgs) -> Result<i32> {
    let (profile, order, expected) = match (&args.name, &args.profile) {
        (Some(name), None) => {
            let m = catalog::by_name(name)?;
            if !(args.r_stop > 0.0 && args.r_stop < args.r_start) {
                return Err(Error::InvalidConfig(
                    "require 0 < r_stop < r_start".to_string(),
                ));
            }
            let radii = singularity::dyadic_radii(args.r_start, args.r_stop);
            let profile = singularity::profile_from_metric(&m, &radii)?;
            let order = args.order.or_else(|| m.h_spec.xi0_order());
            (profile, order, Some(m.expected_classification))
        }
        (None, Some(path)) => {
            let file = fs::File::open(path)
                .map_err(|_| Error::MissingFile(path.display().to_string()))?;
            let (profile, _header) = fio::read_profile_csv(BufReader::new(file))?;
            (profile, args.order, None)
        }
        _ => unreachable!("clap enforces exactly one source"),
    };
    let c = singularity::classify(&profile, order)?;
    println!("{}", serde_json::to_string(&c)?);
    if matches!(c.branch, Branch::Logarithmic { .. }) {
        eprintln!("note: {LOG_BRANCH_CAVEAT}");
    }
    if let Some(expected) = expected {
        let agrees = match (c.branch, expected) {
            (Branch::Power { beta, c: cv }, Branch::Power { beta: eb, c: ec }) => {
                (beta - eb).abs() <= 0.02 && (cv / ec - 1.0).abs() <= 0.05
            }
            (Branch::Logarithmic { n_plus_1 }, Branch::Logarithmic { n_plus_1: e }) => {
                n_plus_1 == e
            }
            _ => false,
        };
        eprintln!(
            "expected: {} ({})",
            serde_json::to_string(&expected)?,
            if agrees { "agrees" } else { "DISAGREES" }
        );
    }
    Ok(EXIT_OK)
}

fn plot_cmd(args: PlotArgs) -> Result<i32> {
    if !args.input.exists() {
        return Err(Error::MissingFile(args.input.display().to_string()));
    }
    let text = fs::read_to_string(&args.input)?;
    let columns = text
        .lines()
        .find(|l| !l.trim_start().starts_with('#'))
        .unwrap_or("")
        .trim()
        .to_string();
    let script = match columns.as_str() {
        "i_radial,i_angular,r,theta,value" => field_plot_script(&args.input, &["value"]),
        "i_radial,i_angular,r,theta,p,q" => field_plot_script(&args.input, &["p", "q"]),
        "r,w_mean,w_spread" => profile_plot_script(&args.input),
        other => {
            return Err(Error::MalformedCsv {
                line: 1,
                message: format!("unrecognized column row '{other}'"),
            });
        }
    };
    write_out(args.output.as_deref(), |out| {
        out.write_all(script.as_bytes())?;
        Ok(())
    })?;
    Ok(EXIT_OK)
}

fn field_plot_script(input: &Path, components: &[&str]) -> String {
    let input = input.display();
    let comps = components
        .iter()
        .map(|c| format!("{c:?}"))
        .collect::<Vec<_>>()
        .join(", ");
    format!(
        r##"#!/usr/bin/env python3
"""Render a log-polar field CSV as polar heat maps."""
import json

import matplotlib.pyplot as plt
import numpy as np

PATH = {input:?}
COMPONENTS = [{comps}]

grid = None
with open(PATH) as f:
    for line in f:
        if line.startswith("# grid="):
            grid = json.loads(line[len("# grid="):])
        elif not line.startswith("#"):
            break
assert grid is not None, "missing grid header"

data = np.genfromtxt(PATH, delimiter=",", names=True, comments="#")
nr, na = grid["n_radial"], grid["n_angular"]
r = data["r"].reshape(nr, na)
theta = data["theta"].reshape(nr, na)

fig, axes = plt.subplots(
    1, len(COMPONENTS), subplot_kw={{"projection": "polar"}}, squeeze=False
)
for ax, comp in zip(axes[0], COMPONENTS):
    v = data[comp].reshape(nr, na)
    # close the angular seam for plotting
    th = np.concatenate([theta, theta[:, :1] + 2 * np.pi], axis=1)
    rr = np.concatenate([r, r[:, :1]], axis=1)
    vv = np.concatenate([v, v[:, :1]], axis=1)
    pc = ax.pcolormesh(th, rr, vv, shading="nearest")
    ax.set_title(comp)
    fig.colorbar(pc, ax=ax)
fig.suptitle(PATH)
plt.show()
"##
    )
}

fn profile_plot_script(input: &Path) -> String {
    let input = input.display();
    format!(
        r##"#!/usr/bin/env python3
"""Render a radial profile CSV on log-log axes."""
import matplotlib.pyplot as plt
import numpy as np

PATH = {input:?}
data = np.genfromtxt(PATH, delimiter=",", names=True, comments="#")

fig, ax = plt.subplots()
ax.loglog(data["r"], data["w_mean"], marker="o", label="w (angular geometric mean)")
ax.fill_between(
    data["r"],
    data["w_mean"] / np.sqrt(data["w_spread"]),
    data["w_mean"] * np.sqrt(data["w_spread"]),
    alpha=0.3,
    label="angular spread",
)
ax.set_xlabel("r")
ax.set_ylabel("w")
ax.legend()
ax.set_title(PATH)
plt.show()
"##
    )
}

/// Solver-versus-closed-form error of a catalog entry at one resolution.
pub fn solver_error_against(metric: &catalog::ClosedFormMetric, n: usize, tol: f64) -> Result<f64> {
    if !metric.exact {
        return Err(Error::ModelOnly(metric.name.clone()));
    }
    let grid = metric.default_grid(n)?;
    let rho = ops::norm_sq(&catalog::sample_dh(&metric.h_spec, &grid));
    let exact = metric.sample_u(&grid);
    let na = grid.n_angular();
    let bc_inner: Vec<f64> = (0..na).map(|j| exact.at(0, j)).collect();
    let bc_outer: Vec<f64> = (0..na).map(|j| exact.at(grid.n_radial() - 1, j)).collect();
    let problem = KwProblem::new(grid, rho, bc_inner, bc_outer)?;
    let sol = solver::solve(&problem, tol, 50)?;
    if !sol.converged {
        return Err(Error::InvalidConfig(format!(
            "solver stalled at residual {:.3e} on the {n}x{n} grid",
            sol.residual_norm
        )));
    }
    let mut err = 0.0_f64;
    for (i, j) in grid.nodes() {
        err = err.max((sol.u.at(i, j) - exact.at(i, j)).abs());
    }
    Ok(err)
}

fn convergence_cmd(args: ConvergenceArgs) -> Result<i32> {
    let m = catalog::by_name(&args.name)?;
    if !m.exact {
        return Err(Error::ModelOnly(m.name));
    }
    let study = convergence::refinement_sweep(args.base, args.base, args.levels, |nr, _| {
        solver_error_against(&m, nr, args.tol)
    })?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&study)?);
    } else {
        for level in &study.levels {
            println!(
                "{:>6} x {:<6} error {:.6e}",
                level.n_radial, level.n_angular, level.error
            );
        }
        println!("fitted order {:.3}", study.fitted_order);
    }
    Ok(EXIT_OK)
}
