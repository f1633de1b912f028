//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or reference error, 2 numerical
//! failure (solver breakdown, threshold violation).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::curve::{Curve, CurveDescriptor};
use crate::error::MapError;
use crate::export;
use crate::operator::{assemble, solve_density};
use crate::quadrature::{panel_mesh, refine_corners, trapezoid_mesh, QuadratureMesh};
use crate::recovery::{boundary_map, eval_exterior, faber_dlp, BoundaryMap};
use crate::verify::{
    analytic_boundary_map, boundary_error, convergence_study, doubling_list, faber_oracle, Sweep,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "extmap",
    version,
    about = "Exterior conformal maps via a double-layer integral equation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the boundary map and write it out.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        /// Directory for debug dumps of the matrix, density and mesh.
        #[arg(long)]
        debug_dump: Option<PathBuf>,
    },
    /// Sup-norm boundary error against the closed-form map.
    Errors {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Error table over doubling node counts or corner refinement levels.
    Convergence {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Images of curves surrounding the boundary, as polyline CSV.
    Grid {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare the two Faber polynomial evaluations at interior points.
    FaberCheck {
        #[command(flatten)]
        run: RunArgs,
        /// Highest Faber degree checked.
        #[arg(long, default_value_t = 5)]
        m_max: u32,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Curve descriptor as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub curve: String,
    /// Trapezoid node count (smooth curves). For `convergence`, the largest n.
    #[arg(long)]
    pub n: Option<usize>,
    /// Gauss panels per side (curves with corners).
    #[arg(long)]
    pub panels: Option<usize>,
    /// Gauss order per panel.
    #[arg(long)]
    pub gauss: Option<usize>,
    /// Corner refinement levels. For `convergence`, the deepest level.
    #[arg(long)]
    pub refine: Option<usize>,
    #[arg(long, default_value_t = crate::verify::DEFAULT_SAMPLES)]
    pub samples: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Discretization {
    Trapezoid {
        n: usize,
    },
    Panels {
        panels_per_side: usize,
        gauss_order: usize,
        refine: usize,
    },
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub curve: Curve,
    pub discretization: Discretization,
    pub samples: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub jobs: usize,
    pub threshold: Option<f64>,
}

/// Error with its exit code already decided.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<MapError> for CliError {
    fn from(e: MapError) -> Self {
        let code = match e {
            MapError::IllConditioned(_)
            | MapError::DegenerateDensity(_)
            | MapError::Resolution { .. }
            | MapError::Singular { .. } => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult = std::result::Result<i32, CliError>;

fn parse_curve(arg: &str) -> std::result::Result<Curve, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg)
            .map_err(|e| CliError::config(format!("cannot read curve file {arg}: {e}")))?
    };
    let descriptor: CurveDescriptor = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("bad curve descriptor: {e}")))?;
    Ok(Curve::from_descriptor(&descriptor)?)
}

impl RunConfig {
    /// `default_n` and `default_refine` fill in whichever mode the curve needs.
    pub fn from_args(
        args: &RunArgs,
        default_n: usize,
        default_refine: usize,
    ) -> std::result::Result<Self, CliError> {
        let curve = parse_curve(&args.curve)?;
        let panel_flags = args.panels.is_some() || args.gauss.is_some() || args.refine.is_some();
        let discretization = if curve.is_smooth() {
            if panel_flags {
                return Err(CliError::config(
                    "smooth curves use --n; --panels/--gauss/--refine apply to curves with corners",
                ));
            }
            Discretization::Trapezoid {
                n: args.n.unwrap_or(default_n),
            }
        } else {
            if args.n.is_some() {
                return Err(CliError::config(
                    "curves with corners use --panels/--gauss/--refine, not --n",
                ));
            }
            Discretization::Panels {
                panels_per_side: args.panels.unwrap_or(16),
                gauss_order: args.gauss.unwrap_or(8),
                refine: args.refine.unwrap_or(default_refine),
            }
        };
        if args.samples < 4 {
            return Err(CliError::config(format!(
                "--samples must be at least 4, got {}",
                args.samples
            )));
        }
        if args.jobs == 0 {
            return Err(CliError::config("--jobs must be positive"));
        }
        Ok(RunConfig {
            curve,
            discretization,
            samples: args.samples,
            out: args.out.clone(),
            format: args.format,
            jobs: args.jobs,
            threshold: args.threshold,
        })
    }

    pub fn mesh(&self) -> crate::Result<QuadratureMesh> {
        match self.discretization {
            Discretization::Trapezoid { n } => trapezoid_mesh(&self.curve, n),
            Discretization::Panels {
                panels_per_side,
                gauss_order,
                refine,
            } => {
                let mut mesh = panel_mesh(&self.curve, panels_per_side, gauss_order)?;
                for _ in 0..refine {
                    mesh = refine_corners(&mesh)?;
                }
                Ok(mesh)
            }
        }
    }
}

fn write_output(out: Option<&Path>, contents: &str) -> std::result::Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, contents)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn solved_map(config: &RunConfig) -> std::result::Result<BoundaryMap, CliError> {
    let mesh = config.mesh()?;
    let sol = solve_density(&mesh)?;
    Ok(boundary_map(&sol)?)
}

/// Solve, shift, normalize; write the boundary map and print the coefficients.
pub fn cmd_solve(config: &RunConfig, debug_dump: Option<&Path>) -> CliResult {
    let mesh = config.mesh()?;
    let sol = solve_density(&mesh)?;
    let map = boundary_map(&sol)?;

    if let Some(dir) = debug_dump {
        let io = |e: std::io::Error| CliError::config(format!("debug dump: {e}"));
        fs::create_dir_all(dir).map_err(io)?;
        fs::write(dir.join("matrix.csv"), export::matrix_csv(&assemble(&mesh))).map_err(io)?;
        fs::write(dir.join("density.csv"), export::density_csv(&sol)).map_err(io)?;
        fs::write(dir.join("nodes.csv"), export::mesh_nodes_csv(&mesh)).map_err(io)?;
        fs::write(
            dir.join("mesh.json"),
            pretty(&export::mesh_summary_json(&mesh)),
        )
        .map_err(io)?;
    }

    if let Some(out) = &config.out {
        match config.format {
            Format::Csv => {
                write_output(Some(out), &export::boundary_map_csv(&map))?;
                write_output(
                    Some(&sidecar(out)),
                    &pretty(&export::boundary_map_header(&map)),
                )?;
            }
            Format::Json => write_output(Some(out), &pretty(&export::boundary_map_json(&map)))?,
        }
    }
    println!("alpha1 = {}", export::fmt_f64(map.alpha1));
    println!(
        "alpha0 = {} {}",
        export::fmt_f64(map.alpha0.re),
        export::fmt_f64(map.alpha0.im)
    );
    println!("residual_norm = {}", export::fmt_f64(sol.residual_norm));
    Ok(EXIT_OK)
}

/// Print the sup error against the closed-form map.
pub fn cmd_errors(config: &RunConfig) -> CliResult {
    analytic_boundary_map(&config.curve, 0.0)?;
    let map = solved_map(config)?;
    let err = boundary_error(&map, config.samples)?;
    println!("sup_error = {}", export::fmt_f64(err));
    Ok(EXIT_OK)
}

pub fn cmd_convergence(config: &RunConfig) -> CliResult {
    let sweep = match config.discretization {
        Discretization::Trapezoid { n } => Sweep::Trapezoid {
            n_values: doubling_list(n),
        },
        Discretization::Panels {
            panels_per_side,
            gauss_order,
            refine,
        } => Sweep::CornerRefinement {
            panels_per_side,
            gauss_order,
            max_level: refine,
        },
    };
    let report = convergence_study(&config.curve, &sweep, config.samples, config.jobs)?;
    match config.format {
        Format::Csv => {
            write_output(config.out.as_deref(), &export::report_csv(&report))?;
            if let Some(out) = &config.out {
                write_output(Some(&sidecar(out)), &pretty(&export::report_json(&report)))?;
            }
        }
        Format::Json => write_output(
            config.out.as_deref(),
            &pretty(&export::report_json(&report)),
        )?,
    }
    Ok(if report.all_failed() {
        EXIT_NUMERICAL
    } else {
        EXIT_OK
    })
}

/// Points of the grid groups: scaled copies of the curve, circles enclosing
/// it, and radial rays through equispaced boundary points.
fn grid_groups(map: &BoundaryMap) -> Vec<Vec<Complex64>> {
    let curve = map.mesh().curve();
    let beta = curve.period();
    let per_curve = 200;
    let radius = map
        .mesh()
        .points()
        .iter()
        .map(|pt| pt.p.norm())
        .fold(0.0, f64::max);
    let mut groups = Vec::new();
    for s in [1.05, 1.2, 1.5] {
        groups.push(
            (0..per_curve)
                .map(|k| curve.point(beta * (k as f64 + 0.5) / per_curve as f64) * s)
                .collect(),
        );
    }
    for s in [1.1, 1.5, 2.0, 3.0] {
        groups.push(
            (0..per_curve)
                .map(|k| {
                    Complex64::from_polar(
                        radius * s,
                        std::f64::consts::TAU * k as f64 / per_curve as f64,
                    )
                })
                .collect(),
        );
    }
    for k in 0..16 {
        let base = curve.point(beta * (k as f64 + 0.5) / 16.0);
        groups.push(
            (1..=40)
                .map(|j| base * (1.0 + 2.0 * j as f64 / 40.0))
                .collect(),
        );
    }
    groups
}

/// Columns `group, re_z, im_z, re_psi, im_psi, flag` with flag 0 for a
/// clean value, 1 for a point near the boundary, 2 for a point that is not
/// outside the curve (its values are NaN).
pub fn cmd_grid(config: &RunConfig) -> CliResult {
    let map = solved_map(config)?;
    let mut out = String::from("group,re_z,im_z,re_psi,im_psi,flag\n");
    for (g, points) in grid_groups(&map).iter().enumerate() {
        for &z in points {
            let (psi, flag) = match eval_exterior(&map, z) {
                Ok(e) => (e.value, u8::from(e.near_boundary)),
                Err(MapError::Domain(..)) => (Complex64::new(f64::NAN, f64::NAN), 2),
                Err(e) => return Err(e.into()),
            };
            let _ = writeln!(
                out,
                "{g},{},{},{},{},{flag}",
                export::fmt_f64(z.re),
                export::fmt_f64(z.im),
                export::fmt_f64(psi.re),
                export::fmt_f64(psi.im),
            );
        }
    }
    write_output(config.out.as_deref(), &out)?;
    Ok(EXIT_OK)
}

/// Interior probe points `r · p(t_k)` for two radii and ten parameters.
pub fn interior_probes(curve: &Curve) -> Vec<Complex64> {
    let beta = curve.period();
    [0.2, 0.35]
        .iter()
        .flat_map(|&r| (0..10).map(move |k| curve.point(beta * (k as f64 + 0.25) / 10.0) * r))
        .collect()
}

/// Largest `|faber_dlp − faber_oracle|` over `m = 1..=m_max` and the probes.
pub fn faber_discrepancy(map: &BoundaryMap, m_max: u32) -> crate::Result<f64> {
    let mut worst = 0.0f64;
    for z0 in interior_probes(map.mesh().curve()) {
        for m in 1..=m_max {
            let a = faber_dlp(map, m, z0)?.value;
            let b = faber_oracle(map, m, z0)?.value;
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}

pub fn cmd_faber_check(config: &RunConfig, m_max: u32) -> CliResult {
    let map = solved_map(config)?;
    let threshold = config.threshold.unwrap_or(1e-8);
    let worst = faber_discrepancy(&map, m_max)?;
    let pass = worst <= threshold;
    println!("max_faber_discrepancy = {}", export::fmt_f64(worst));
    println!("threshold = {}", export::fmt_f64(threshold));
    println!("{}", if pass { "PASS" } else { "FAIL" });
    Ok(if pass { EXIT_OK } else { EXIT_NUMERICAL })
}

/// Dispatch a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Solve { run, debug_dump } => {
            RunConfig::from_args(run, 64, 10).and_then(|c| cmd_solve(&c, debug_dump.as_deref()))
        }
        Command::Errors { run } => RunConfig::from_args(run, 64, 10).and_then(|c| cmd_errors(&c)),
        Command::Convergence { run } => {
            RunConfig::from_args(run, 512, 30).and_then(|c| cmd_convergence(&c))
        }
        Command::Grid { run } => RunConfig::from_args(run, 64, 10).and_then(|c| cmd_grid(&c)),
        Command::FaberCheck { run, m_max } => {
            RunConfig::from_args(run, 64, 10).and_then(|c| cmd_faber_check(&c, *m_max))
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
