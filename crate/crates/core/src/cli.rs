//! Command-line experiment runner.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::edge_theory::{
    edge_profile, genericity_report, remote_convergence_check, EdgeProfile, GenericityOptions, GenericityReport,
    RemoteRow,
};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::kernel::build_kernel;
use crate::phantom::Phantom;
use crate::plot::{parse_profile_csv, render_svg, ProfileRows};
use crate::reconstruct::{build_sinogram, DataProvider, Sinogram};
use crate::ud_diag::{discrepancy_2d, frac_pairs, frac_points, shear_map, star_discrepancy_1d, weyl_sum};

#[derive(Debug, Parser)]
#[command(name = "radon-edge", version, about = "Ball-phantom Radon inversion and edge-response diagnostics")]
pub struct Cli {
    /// Worker threads for the parallel sums (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Experiment config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify the kernel properties and write its exact pieces.
    KernelCheck,
    /// Write the sampled Radon data of the configured phantom.
    Simulate,
    /// Reconstruct along the probe line and compare with the predicted edge.
    Profile {
        /// Use a sinogram file instead of analytic data.
        #[arg(long)]
        sinogram: Option<PathBuf>,
    },
    /// Genericity diagnostics at the probe point.
    Genericity,
    /// Reconstruction near the probe from the balls the probe lies outside of.
    RemoteCheck,
    /// Equidistribution diagnostics of fractional-part sequences.
    Ud(UdArgs),
    /// Render a profile CSV as SVG.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "edge profile")]
        title: String,
    },
}

#[derive(Debug, Args)]
pub struct UdArgs {
    /// Expression in `t`.
    #[arg(long)]
    pub f: String,
    /// Second coordinate expression for the 2D diagnostics.
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: f64,
    /// One or more steps, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub weyl: Option<i64>,
    /// Box-grid resolution for the 2D discrepancy.
    #[arg(long)]
    pub d2: Option<usize>,
    /// Shear coefficient applied before a second 2D scan.
    #[arg(long, allow_hyphen_values = true)]
    pub shear: Option<f64>,
}

/// Runs a parsed command line; returns the text for stdout.
pub fn run(cli: &Cli) -> Result<String> {
    match cli.threads {
        Some(0) => Err(Error::config(None, "--threads must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Input(e.to_string()))?
            .install(|| dispatch(cli)),
        None => dispatch(cli),
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| Error::config(None, "this command needs --config"))?;
    ExperimentConfig::load(path)
}

fn write(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    fs::write(path, contents)?;
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<String> {
    let out = &cli.out;
    match &cli.command {
        Command::KernelCheck => {
            let kernel = build_kernel();
            let report = kernel.verify_assumptions();
            write(&out.join("kernel_phi.csv"), kernel.phi().to_csv().as_bytes())?;
            if report.all_passed() {
                Ok(report.to_string())
            } else {
                Err(Error::Numeric(format!("kernel checks failed\n{report}")))
            }
        }
        Command::Simulate => {
            let cfg = load_config(cli)?;
            let grid = cfg.grid.build()?;
            let sino = build_sinogram(&cfg.phantom, &grid);
            let path = out.join(format!("{}.rsg", cfg.name));
            let mut buf = Vec::new();
            sino.write_to(&mut buf)?;
            write(&path, &buf)?;
            Ok(format!("wrote {} ({} values)\n", path.display(), sino.values().len()))
        }
        Command::Profile { sinogram } => {
            let cfg = load_config(cli)?;
            let run = run_experiment(&cfg, sinogram.as_deref())?;
            let stem = out.join(&cfg.name);
            let csv = run.profile.to_csv();
            let svg = render_svg(&ProfileRows::from(&run.profile), &cfg.name)?;
            write(&stem.with_extension("csv"), csv.as_bytes())?;
            write(&stem.with_extension("svg"), svg.as_bytes())?;
            write(&out.join(format!("{}_genericity.txt", cfg.name)), run.report.to_string().as_bytes())?;
            Ok(format!(
                "{}max_abs_dev {}\nl2_dev {}\n",
                run.report, run.profile.max_abs_dev, run.profile.l2_dev
            ))
        }
        Command::Genericity => {
            let cfg = load_config(cli)?;
            let grid = cfg.grid.build()?;
            let report = genericity_report(
                &cfg.phantom,
                &grid,
                &cfg.probe.x0,
                &cfg.probe.theta0,
                &GenericityOptions::default(),
            )?;
            Ok(report.to_string())
        }
        Command::RemoteCheck => {
            let cfg = load_config(cli)?;
            let rows = remote_check(&cfg)?;
            let mut csv = String::from("eps,max_abs\n");
            for r in &rows {
                writeln!(csv, "{},{}", r.eps, r.max_abs).unwrap();
            }
            write(&out.join(format!("{}_remote.csv", cfg.name)), csv.as_bytes())?;
            Ok(csv)
        }
        Command::Ud(args) => ud(args),
        Command::Plot { input, output, title } => {
            let text = fs::read_to_string(input)?;
            let svg = render_svg(&parse_profile_csv(&text)?, title)?;
            let path = output.clone().unwrap_or_else(|| input.with_extension("svg"));
            write(&path, svg.as_bytes())?;
            Ok(format!("wrote {}\n", path.display()))
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub profile: EdgeProfile,
    pub report: GenericityReport,
}

/// Profile and genericity report for a boundary probe (`probe = ball-normal`).
pub fn run_experiment(cfg: &ExperimentConfig, sinogram: Option<&Path>) -> Result<ExperimentRun> {
    let grid = cfg.grid.build()?;
    let kernel = build_kernel();
    let jump = cfg.phantom.jump_params(&cfg.probe.x0, &cfg.probe.theta0)?;
    let table;
    let provider = match sinogram {
        Some(path) => {
            table = Sinogram::read_from(&mut std::io::BufReader::new(fs::File::open(path)?))?;
            DataProvider::Table(&table)
        }
        None => DataProvider::Analytic(&cfg.phantom),
    };
    let profile = edge_profile(&provider, &kernel, &grid, &jump, &cfg.probe.x0, &cfg.h_values)?;
    let report = genericity_report(
        &cfg.phantom,
        &grid,
        &cfg.probe.x0,
        &cfg.probe.theta0,
        &GenericityOptions::default(),
    )?;
    Ok(ExperimentRun { profile, report })
}

/// Remote check restricted to the balls whose closure excludes the probe point.
pub fn remote_check(cfg: &ExperimentConfig) -> Result<Vec<RemoteRow>> {
    let remote: Vec<_> = cfg
        .phantom
        .balls()
        .iter()
        .filter(|b| (cfg.probe.x0 - b.center).norm() > b.radius * (1.0 + 1e-9))
        .cloned()
        .collect();
    if remote.is_empty() {
        return Err(Error::Geometry("probe point lies in every ball's closure".into()));
    }
    let phantom = Phantom::new(remote)?;
    let grids = cfg
        .remote_eps
        .iter()
        .map(|&e| cfg.grid.rescaled(e).build())
        .collect::<Result<Vec<_>>>()?;
    remote_convergence_check(&phantom, &grids, &build_kernel(), &cfg.probe.x0, &cfg.probe.theta0, &cfg.h_values)
}

fn ud(args: &UdArgs) -> Result<String> {
    let f = Expr::parse(&args.f)?;
    let g = args.g.as_deref().map(Expr::parse).transpose()?;
    if args.shear.is_some() && args.d2.is_none() {
        return Err(Error::config(None, "--shear needs --d2"));
    }
    let mut csv = String::from("eps,n,star_discrepancy");
    if args.weyl.is_some() {
        csv.push_str(",weyl");
    }
    if args.d2.is_some() {
        csv.push_str(",d2,d2_error_bound");
        if args.shear.is_some() {
            csv.push_str(",d2_sheared");
        }
    }
    csv.push('\n');
    for &eps in &args.eps {
        let seq = frac_points(f.evaluator(), f.source(), args.a, args.b, eps)?;
        write!(csv, "{eps},{},{}", seq.points.len(), star_discrepancy_1d(&seq.points)?).unwrap();
        if let Some(m) = args.weyl {
            write!(csv, ",{}", weyl_sum(&seq, m)?).unwrap();
        }
        if let Some(r) = args.d2 {
            let pts = match &g {
                Some(g) => frac_pairs(f.evaluator(), g.evaluator(), f.source(), args.a, args.b, eps)?.points,
                None => {
                    // consecutive pairs (x_i, x_{i+1})
                    seq.points.windows(2).map(|w| [w[0], w[1]]).collect()
                }
            };
            if pts.is_empty() {
                return Err(Error::Input("2D diagnostics need at least two points".into()));
            }
            let d = discrepancy_2d(&pts, r)?;
            write!(csv, ",{},{}", d.value, d.error_bound).unwrap();
            if let Some(a) = args.shear {
                write!(csv, ",{}", discrepancy_2d(&shear_map(&pts, a), r)?.value).unwrap();
            }
        }
        csv.push('\n');
    }
    Ok(csv)
}
