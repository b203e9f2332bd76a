use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use boundary_recon::discretize::{discretize_region, FillConfig, SpacingProfile};
use boundary_recon::io::{fmt_real, read_points};
use boundary_recon::rbffd::{disk_harness, DiskOracle};
use boundary_recon::sim::{run_simulation, SimConfig};
use boundary_recon::{order_points, validate_density, Error, ReconstructedDomain, Result};

#[derive(Parser)]
#[command(name = "boundary-recon", version, about = "Closed-curve reconstruction from unordered points and meshless PDE tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Recover the curve order of an unordered point sample.
    Order {
        #[arg(long)]
        input: PathBuf,
        /// Points with an added `order` column (stdout if omitted).
        #[arg(long)]
        output: Option<PathBuf>,
        /// Density report as JSON (stderr if omitted).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Classify query points against a reconstructed boundary.
    Contain {
        #[arg(long)]
        boundary: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Place boundary and interior nodes inside a boundary (and outside an
    /// optional inner one).
    Discretize {
        #[arg(long)]
        boundary: PathBuf,
        #[arg(long)]
        inner: Option<PathBuf>,
        /// Spacing far from the inner boundary (uniform spacing without one).
        #[arg(long, default_value_t = 0.05)]
        h_max: f64,
        /// Spacing on the inner boundary.
        #[arg(long)]
        h_min: Option<f64>,
        #[arg(long, default_value_t = 0.3)]
        transition_radius: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Solve the unit-disk Poisson problem with exact solution 1 - x² - y².
    Poisson {
        /// Uniform node spacing; 0.057 gives about 900 nodes.
        #[arg(long, default_value_t = 0.057)]
        spacing: f64,
        #[arg(long, default_value_t = 12)]
        stencil_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the dendrite growth simulation.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => Ok(Box::new(File::create(p).map_err(|e| Error::io(p, e))?)),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn write_csv(path: Option<&Path>, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let label = path.unwrap_or(Path::new("<stdout>"));
    let fail = |e: csv::Error| Error::io(label, e);
    let mut w = csv::Writer::from_writer(sink(path)?);
    w.write_record(header).map_err(fail)?;
    for row in rows {
        w.write_record(&row).map_err(fail)?;
    }
    w.flush().map_err(|e| Error::io(label, e))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Order { input, output, report } => {
            let ordered = order_points(read_points(&input)?)?;
            let density = validate_density(&ordered);
            let rows = ordered
                .points()
                .iter()
                .zip(ordered.sigma_inv())
                .map(|(p, pos)| vec![fmt_real(p.x), fmt_real(p.y), pos.to_string()]);
            write_csv(output.as_deref(), &["x", "y", "order"], rows)?;
            let json = serde_json::to_string_pretty(&density).expect("report serializes");
            match report {
                Some(p) => std::fs::write(&p, json).map_err(|e| Error::io(&p, e))?,
                None => eprintln!("{json}"),
            }
            if !density.is_clean() {
                log::warn!("sample violates the density conditions; the order may be wrong");
            }
        }
        Command::Contain { boundary, queries, output } => {
            let dom = ReconstructedDomain::from_unordered(read_points(&boundary)?)?;
            let rows = read_points(&queries)?
                .into_iter()
                .map(|q| vec![fmt_real(q.x), fmt_real(q.y), u8::from(dom.contains(q)).to_string()]);
            write_csv(output.as_deref(), &["x", "y", "inside"], rows)?;
        }
        Command::Discretize { boundary, inner, h_max, h_min, transition_radius, seed, output } => {
            let outer = ReconstructedDomain::from_unordered(read_points(&boundary)?)?;
            let inner = inner.map(|p| read_points(&p).and_then(ReconstructedDomain::from_unordered)).transpose()?;
            let profile = match &inner {
                Some(d) => SpacingProfile::new(h_min.unwrap_or(h_max), h_max, d.ordered().points().to_vec(), transition_radius)?,
                None => SpacingProfile::uniform(h_max)?,
            };
            let config = FillConfig { seed, ..FillConfig::default() };
            let d = discretize_region(&outer, inner.as_ref(), &profile, &config)?;
            let rows = d
                .positions()
                .into_iter()
                .zip(d.kinds())
                .map(|(p, k)| vec![fmt_real(p.x), fmt_real(p.y), k.as_str().to_string()]);
            write_csv(output.as_deref(), &["x", "y", "kind"], rows)?;
        }
        Command::Poisson { spacing, stencil_size, seed } => {
            let r = disk_harness(spacing, DiskOracle::Paraboloid, stencil_size, seed)?;
            println!("N = {}", r.nodes);
            println!("max error = {:e}", r.max_error);
            println!("relative residual = {:e} ({} iterations)", r.relative_residual, r.iterations);
            println!("wall time = {:.3} s", r.wall_time_seconds);
        }
        Command::Simulate { config } => {
            let config = SimConfig::load(&config)?;
            let summary = run_simulation(&config)?;
            let last = summary.steps.last().expect("step 0 is always recorded");
            println!(
                "{} steps, {} -> {} nodes, max symmetry deviation {:e}, {:.2} s; output in {}",
                last.step,
                summary.node_counts[0],
                last.node_count,
                summary.max_symmetry_metric,
                summary.wall_time_seconds,
                config.output_dir.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
