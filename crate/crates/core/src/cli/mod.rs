//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration,
//! 3 no convergence, 4 the requested branch does not exist at the given `R`.

pub mod config;
pub mod tables;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::asymptotics::{
    default_layer_length, estimate_beta, solve_layer, type_i_eval, type_ii_core, type_ii_deltas,
    type_iii_composite, AsymError, MAX_EPS,
};
use crate::bvp::{
    count_solutions, discover_branches, find_fold, solve_branch, turning_points,
    BranchSolveOptions, BvpError, DiscoverOptions,
};
use crate::flowfield::{
    default_levels, divergence_check, psi_deviation, reversal_bands, sample_field, streamlines,
    FlowError, FlowGeometry,
};
use crate::io::{self, AsymptoticRow, Format, IoError};
use crate::model::{BranchLabel, ModelError, ProblemSpec, Profile};
use crate::shooter::{scan, solve_for_target, ScanConfig, ShootError, ShootOptions};
use config::{check_a, check_count, check_positive, check_r, check_tol, require, ConfigFile};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("branch does not exist: {0}")]
    NoBranch(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::NoConvergence(_) => 3,
            CliError::NoBranch(_) => 4,
        }
    }
}

impl From<BvpError> for CliError {
    fn from(e: BvpError) -> Self {
        let msg = e.to_string();
        match e {
            BvpError::InvalidInput(_) | BvpError::Model(_) => CliError::Config(msg),
            BvpError::NoConvergence(_) | BvpError::MeshExhausted { .. } => {
                CliError::NoConvergence(msg)
            }
            BvpError::BranchNotFound(_) | BvpError::WrongBranch { .. } | BvpError::NoFold => {
                CliError::NoBranch(msg)
            }
        }
    }
}

impl From<ShootError> for CliError {
    fn from(e: ShootError) -> Self {
        let msg = e.to_string();
        match e {
            ShootError::InvalidInput(_) | ShootError::Model(_) => CliError::Config(msg),
            ShootError::NoAdmissibleRoot(_) => CliError::NoBranch(msg),
            _ => CliError::NoConvergence(msg),
        }
    }
}

impl From<AsymError> for CliError {
    fn from(e: AsymError) -> Self {
        let msg = e.to_string();
        match e {
            AsymError::InvalidParameter(_) | AsymError::Domain { .. } => CliError::Config(msg),
            AsymError::NoRoot(_) => CliError::NoBranch(msg),
            _ => CliError::NoConvergence(msg),
        }
    }
}

impl From<FlowError> for CliError {
    fn from(e: FlowError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "porous-channel",
    version,
    about = "Similarity solutions for flow in a channel with porous walls"
)]
pub struct Cli {
    /// Flat key=value file; flags take precedence over its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Suction-to-injection ratio, 0 < a <= 1.
    #[arg(long)]
    pub a: Option<f64>,
    /// Cross-flow Reynolds number.
    #[arg(long = "R")]
    pub r: Option<f64>,
    #[arg(long = "Rmin")]
    pub rmin: Option<f64>,
    #[arg(long = "Rmax")]
    pub rmax: Option<f64>,
    /// I, II or III.
    #[arg(long)]
    pub branch: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FieldArgs {
    /// Field samples along x.
    #[arg(long)]
    pub nx: Option<usize>,
    /// Field samples across the channel.
    #[arg(long)]
    pub ny: Option<usize>,
    /// Number of streamfunction levels.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Right end of the streamwise window, in units of h.
    #[arg(long)]
    pub xmax: Option<f64>,
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ScanArgs {
    #[arg(long = "A-min", allow_hyphen_values = true)]
    pub a_min: Option<f64>,
    #[arg(long = "A-max", allow_hyphen_values = true)]
    pub a_max: Option<f64>,
    #[arg(long = "B-min", allow_hyphen_values = true)]
    pub b_min: Option<f64>,
    #[arg(long = "B-max", allow_hyphen_values = true)]
    pub b_max: Option<f64>,
    /// Grid points per axis.
    #[arg(long)]
    pub n: Option<usize>,
    /// Integration horizon in the initial-value variable.
    #[arg(long = "xi-max")]
    pub xi_max: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one branch at (a, R) and write the profile.
    Solve(Common),
    /// Trace every branch over an R range and locate the fold.
    Branches(Common),
    /// Compare the asymptotic profile with the numerical one.
    Asymptotic(Common),
    /// Cross-check collocation against multiple shooting.
    Compare(Common),
    /// Regenerate the reference comparison tables.
    Tables(Common),
    /// Export a velocity field and streamlines.
    Field {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        field: FieldArgs,
    },
    /// Scan initial curvature and jerk of the initial-value problem.
    Scan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        scan: ScanArgs,
    },
}

/// Parameters after merging flags, config file and defaults.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub a: Option<f64>,
    pub r: Option<f64>,
    pub rmin: f64,
    pub rmax: f64,
    pub branch: BranchLabel,
    pub tol: f64,
    pub out: PathBuf,
    pub format: Format,
}

impl RunConfig {
    pub fn resolve(c: &Common, file: &ConfigFile) -> Result<Self, CliError> {
        let a = file.pick(c.a, "a")?.map(check_a).transpose()?;
        let r = file.pick(c.r, "R")?.map(|r| check_r(r, "R")).transpose()?;
        let rmin = check_r(file.pick(c.rmin, "Rmin")?.unwrap_or(0.0), "Rmin")?;
        let rmax = check_r(file.pick(c.rmax, "Rmax")?.unwrap_or(130.0), "Rmax")?;
        if rmax <= rmin {
            return Err(CliError::Config(format!(
                "--Rmax = {rmax} must exceed --Rmin = {rmin}"
            )));
        }
        let branch = match file.pick(c.branch.clone(), "branch")? {
            None => BranchLabel::TypeI,
            Some(s) => match s.parse::<BranchLabel>() {
                Ok(BranchLabel::Unclassified) | Err(_) => {
                    return Err(CliError::Config(format!(
                        "--branch = '{s}' must be one of I, II, III"
                    )))
                }
                Ok(l) => l,
            },
        };
        let tol = check_tol(file.pick(c.tol, "tol")?.unwrap_or(1e-10))?;
        let out = file
            .pick_path(c.out.clone(), "out")
            .unwrap_or_else(|| PathBuf::from("out"));
        let format = match file.pick(c.format.clone(), "format")? {
            None => Format::Csv,
            Some(s) => s.parse::<Format>().map_err(CliError::Config)?,
        };
        Ok(Self {
            a,
            r,
            rmin,
            rmax,
            branch,
            tol,
            out,
            format,
        })
    }

    fn solve_options(&self) -> BranchSolveOptions {
        BranchSolveOptions {
            tol: self.tol,
            ..Default::default()
        }
    }

    fn spec(&self, command: &str) -> Result<ProblemSpec, CliError> {
        let a = require(self.a, "a", command)?;
        let r = require(self.r, "R", command)?;
        Ok(ProblemSpec::new(r, a)?)
    }

    fn out_dir(&self) -> Result<&Path, CliError> {
        fs::create_dir_all(&self.out)
            .map_err(|e| CliError::Io(format!("cannot create {}: {e}", self.out.display())))?;
        Ok(&self.out)
    }

    fn file(&self, stem: &str) -> Result<PathBuf, CliError> {
        Ok(self
            .out_dir()?
            .join(format!("{stem}.{}", self.format.extension())))
    }
}

/// Caps the worker pool from `SOLVER_THREADS`.
fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("SOLVER_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(format!("SOLVER_THREADS = '{v}' must be a positive integer"))
    })?;
    // a second initialisation in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

fn summary(p: &Profile) -> String {
    format!(
        "R = {:.4}  a = {:.4}  K = {:.4}  label = {}  skin friction = {:.4}",
        p.reynolds(),
        p.a(),
        p.k() + 0.0,
        p.label(),
        // avoids printing -0.0000
        p.skin_friction() + 0.0
    )
}

fn cmd_solve(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = cfg.spec("solve")?;
    let p = solve_branch(spec, cfg.branch, &cfg.solve_options())?;
    io::write_profile(&p, cfg.out_dir()?, "profile", cfg.format)?;
    println!("{}", summary(&p));
    if p.label() == BranchLabel::TypeII {
        if let Ok(t) = turning_points(&p) {
            println!("turning points y1 = {:.4}  y2 = {:.4}", t.y1, t.y2);
        }
    }
    println!("wrote {}", cfg.out.join("profile.*").display());
    Ok(())
}

fn cmd_branches(cfg: &RunConfig) -> Result<(), CliError> {
    let a = require(cfg.a, "a", "branches")?;
    let opts = DiscoverOptions {
        solve: BranchSolveOptions {
            tol: cfg.tol.max(1e-8),
            ..Default::default()
        },
        ..Default::default()
    };
    let branches: Vec<_> = discover_branches(a, (cfg.rmin, cfg.rmax), &opts)?
        .into_iter()
        .filter(|b| !b.is_empty())
        .collect();
    io::branch_table(&branches).write(&cfg.file("branches")?, cfg.format)?;
    for (i, b) in branches.iter().enumerate() {
        let labels: Vec<String> = b.labels().iter().map(ToString::to_string).collect();
        let (lo, hi) = b
            .points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| {
                (l.min(p.r), h.max(p.r))
            });
        println!(
            "branch {}: {} points, labels {}, R in [{lo:.4}, {hi:.4}]",
            i + 1,
            b.len(),
            labels.join("/")
        );
        if let Ok(f) = find_fold(b) {
            println!(
                "  fold at R = {:.4} (fit spread {:.1e})",
                f.r, f.uncertainty
            );
        }
    }
    for k in 0..=4 {
        let r = cfg.rmin + (cfg.rmax - cfg.rmin) * k as f64 / 4.0;
        println!("solutions at R = {r:.4}: {}", count_solutions(&branches, r));
    }
    Ok(())
}

fn asymptotic_rows(
    p: &Profile,
    label: BranchLabel,
) -> Result<(Vec<AsymptoticRow>, String), CliError> {
    let (a, r) = (p.a(), p.reynolds());
    let eps = 1.0 / r;
    let ys: Vec<f64> = (0..=200).map(|i| -1.0 + i as f64 / 100.0).collect();
    let num = |y: f64| p.eval(y)[0];
    match label {
        BranchLabel::TypeI => {
            if eps > MAX_EPS {
                return Err(CliError::Config(format!(
                    "the type I expansion needs R >= {}",
                    1.0 / MAX_EPS
                )));
            }
            let rows = ys
                .iter()
                .map(|&y| {
                    Ok(AsymptoticRow {
                        y,
                        f_asym: type_i_eval(y, a, eps)?.0,
                        f_numeric: num(y),
                    })
                })
                .collect::<Result<Vec<_>, AsymError>>()?;
            Ok((rows, format!("eps = {eps:.4}")))
        }
        BranchLabel::TypeII => {
            let d = type_ii_deltas(a, eps)?;
            let rows = ys
                .iter()
                .map(|&y| AsymptoticRow {
                    y,
                    f_asym: type_ii_core(y, &d).unwrap_or(f64::NAN),
                    f_numeric: num(y),
                })
                .collect();
            let mut note = format!(
                "asymptotic y1 = {:.4}  y2 = {:.4}  lambda = {:.4}",
                d.y1(),
                d.y2(),
                d.lambda
            );
            if let Ok(t) = turning_points(p) {
                note += &format!("\nnumeric    y1 = {:.4}  y2 = {:.4}", t.y1, t.y2);
            }
            Ok((rows, note))
        }
        BranchLabel::TypeIII => {
            let est = estimate_beta(p)?;
            let layer = solve_layer(est.beta, a, default_layer_length(Some(eps)))?;
            let inv = match layer.check_invariants() {
                Ok(()) => "holds".into(),
                Err(e) => format!("fails: {e}"),
            };
            let rows = ys
                .iter()
                .map(|&y| {
                    Ok(AsymptoticRow {
                        y,
                        f_asym: type_iii_composite(y, a, eps, est.beta, &layer)?.0,
                        f_numeric: num(y),
                    })
                })
                .collect::<Result<Vec<_>, AsymError>>()?;
            Ok((
                rows,
                format!(
                    "beta = {:.4} (fit {:.4}), layer decay invariant {inv}",
                    est.beta, est.beta_fit
                ),
            ))
        }
        BranchLabel::Unclassified => Err(CliError::Config("a branch label is required".into())),
    }
}

fn cmd_asymptotic(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = cfg.spec("asymptotic")?;
    let p = solve_branch(spec, cfg.branch, &cfg.solve_options())?;
    let (rows, note) = asymptotic_rows(&p, cfg.branch)?;
    io::asymptotic_table(&rows).write(&cfg.file("asymptotic")?, cfg.format)?;
    let worst = rows
        .iter()
        .map(|r| (r.f_asym - r.f_numeric).abs())
        .filter(|e| e.is_finite())
        .fold(0.0, f64::max);
    println!("{}", summary(&p));
    println!("{note}");
    println!("max |f_asym - f_numeric| = {worst:.4}");
    Ok(())
}

fn cmd_compare(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = cfg.spec("compare")?;
    let c = solve_branch(spec, cfg.branch, &cfg.solve_options())?;
    let s = solve_for_target(spec.a, spec.reynolds, cfg.branch, &ShootOptions::default())?;
    let diff = c.max_f_distance(&s.profile);
    println!("collocation: {}", summary(&c));
    println!("shooting:    {}", summary(&s.profile));
    println!("shooting A = {:.4}  B = {:.4}", s.a_init, s.b_init);
    println!("max |f_colloc - f_shoot| = {diff:.3e}");
    let mut t = io::Table::new(&["method", "R", "a", "K", "skin_friction", "label"]);
    for (m, p) in [("collocation", &c), ("shooting", &s.profile)] {
        t.push(vec![
            io::Cell::Text(m.into()),
            p.reynolds().into(),
            p.a().into(),
            p.k().into(),
            p.skin_friction().into(),
            p.label().into(),
        ]);
    }
    t.write(&cfg.file("compare")?, cfg.format)?;
    Ok(())
}

fn cmd_tables(cfg: &RunConfig) -> Result<(), CliError> {
    let sections = tables::all_sections();
    let mut failures = 0;
    for s in &sections {
        print!("{}", s.render());
        println!();
        failures += s.failures();
    }
    let cells: usize = sections
        .iter()
        .map(|s| s.cells.len() + s.verdicts.len())
        .sum();
    println!("{} of {cells} checks passed", cells - failures);
    tables::report_table(&sections).write(&cfg.file("tables")?, cfg.format)?;
    Ok(())
}

fn cmd_field(cfg: &RunConfig, f: &FieldArgs, file: &ConfigFile) -> Result<(), CliError> {
    let spec = cfg.spec("field")?;
    let nx = check_count(file.pick(f.nx, "nx")?.unwrap_or(50), 2, "nx")?;
    let ny = check_count(file.pick(f.ny, "ny")?.unwrap_or(50), 2, "ny")?;
    let nlev = check_count(file.pick(f.levels, "levels")?.unwrap_or(12), 1, "levels")?;
    let h = check_positive(file.pick(f.h, "h")?.unwrap_or(1.0), "h")?;
    let nu = check_positive(file.pick(f.nu, "nu")?.unwrap_or(1.0), "nu")?;
    let xmax = check_positive(file.pick(f.xmax, "xmax")?.unwrap_or(4.0), "xmax")?;
    let geo = FlowGeometry::new(h, nu, (0.0, xmax * h))?;

    let p = solve_branch(spec, cfg.branch, &cfg.solve_options())?;
    let samples = sample_field(&p, &geo, nx, ny)?;
    io::field_table(&samples).write(&cfg.file("field")?, cfg.format)?;
    let levels = default_levels(&p, &geo, nlev)?;
    // contouring runs on a finer grid than the exported samples
    let lines = streamlines(&p, &geo, &levels, 4 * nx + 1, 4 * ny + 1)?;
    io::write_streamlines(&lines, &cfg.out_dir()?.join("streamlines.json"))?;

    let div = divergence_check(&p, &geo, 50)?;
    let dev = psi_deviation(&lines, &p, &geo)?;
    println!("{}", summary(&p));
    println!(
        "divergence (50 x 50, relative) = {div:.1e}: {}",
        if div < 1e-6 { "PASS" } else { "FAIL" }
    );
    println!(
        "streamlines: {} polylines on {nlev} levels, psi drift {dev:.1e}",
        lines.len()
    );
    let bands = reversal_bands(&p, &geo);
    if bands.is_empty() {
        println!("no reversed cross-flow");
    } else {
        for (lo, hi) in bands {
            println!("reversed cross-flow for y in [{lo:.4}, {hi:.4}]");
        }
        let neg = levels.iter().filter(|&&l| l < 0.0).count();
        println!("reversal cell: {neg} of {nlev} levels have psi < 0");
    }
    Ok(())
}

fn cmd_scan(cfg: &RunConfig, s: &ScanArgs, file: &ConfigFile) -> Result<(), CliError> {
    let d = ScanConfig::default();
    let n = check_count(file.pick(s.n, "n")?.unwrap_or(d.n_a), 1, "n")?;
    let a_range = (
        file.pick(s.a_min, "A_min")?.unwrap_or(d.a_range.0),
        file.pick(s.a_max, "A_max")?.unwrap_or(d.a_range.1),
    );
    let b_range = (
        file.pick(s.b_min, "B_min")?.unwrap_or(d.b_range.0),
        file.pick(s.b_max, "B_max")?.unwrap_or(d.b_range.1),
    );
    if !(a_range.1 > a_range.0 && b_range.1 > b_range.0) {
        return Err(CliError::Config("scan ranges must be increasing".into()));
    }
    let xi_max = check_positive(file.pick(s.xi_max, "xi_max")?.unwrap_or(d.xi_max), "xi-max")?;
    let sc = ScanConfig {
        a_range,
        b_range,
        n_a: n,
        n_b: n,
        xi_max,
        tol: cfg.tol.max(1e-12),
        ..d
    };
    let records = scan(&sc);
    io::scan_table(&records).write(&cfg.file("scan")?, cfg.format)?;
    for l in [
        BranchLabel::TypeI,
        BranchLabel::TypeII,
        BranchLabel::TypeIII,
        BranchLabel::Unclassified,
    ] {
        let k = records.iter().filter(|r| r.label == l).count();
        println!("{l}: {k}");
    }
    let forbidden = records
        .iter()
        .filter(|r| (r.a_init > 0.0) == (r.b_init > 0.0))
        .map(|r| r.admissible_roots)
        .sum::<usize>();
    println!("admissible roots in the A*B > 0 quadrants: {forbidden}");
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    match &cli.command {
        Command::Solve(c) => cmd_solve(&RunConfig::resolve(c, &file)?),
        Command::Branches(c) => cmd_branches(&RunConfig::resolve(c, &file)?),
        Command::Asymptotic(c) => cmd_asymptotic(&RunConfig::resolve(c, &file)?),
        Command::Compare(c) => cmd_compare(&RunConfig::resolve(c, &file)?),
        Command::Tables(c) => cmd_tables(&RunConfig::resolve(c, &file)?),
        Command::Field { common, field } => {
            cmd_field(&RunConfig::resolve(common, &file)?, field, &file)
        }
        Command::Scan { common, scan } => {
            cmd_scan(&RunConfig::resolve(common, &file)?, scan, &file)
        }
    }
}

/// Parses the process arguments, runs, and returns the exit code.
pub fn main_exit() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
