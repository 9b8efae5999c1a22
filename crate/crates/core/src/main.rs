use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use plap::calculus::{p_modulus, PathFamily};
use plap::generate::{Generator, Profile};
use plap::run::{self, Format, Overrides, RunConfig};
use plap::space::{build_space, structural_constants, PoincareOptions, SpaceFile};

#[derive(Parser)]
#[command(name = "plap", version, about = "Neumann p-Laplacian energies on weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    relax_radii: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self) -> plap::Result<RunConfig> {
        let mut config = RunConfig::load(&self.config)?;
        Overrides {
            seed: self.seed,
            relax_radii: self.relax_radii,
            output_dir: self.out.clone(),
        }
        .apply(&mut config);
        Ok(config)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Grid,
    Path,
    Annulus,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated space file.
    Generate {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long, default_value_t = 8)]
        sectors: usize,
        #[arg(long, default_value_t = 1.0)]
        r_inner: f64,
        #[arg(long, default_value_t = 2.0)]
        r_outer: f64,
        /// Dipole amplitude; zero data when absent.
        #[arg(long)]
        amplitude: Option<f64>,
        #[arg(long)]
        corners: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a space and estimate its structural constants.
    CheckSpace {
        space: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Minimize the energy and write `minimizer.json`.
    Solve(RunArgs),
    /// Solve and run the regularity checks.
    Verify {
        #[command(flatten)]
        args: RunArgs,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
    /// p-modulus of a path family given as a JSON list of vertex-id lists.
    Modulus {
        space: PathBuf,
        paths: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Full pipeline.
    Run(RunArgs),
}

fn print_json<T: serde::Serialize>(value: &T) -> plap::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn report_failures(failures: &[String]) -> ExitCode {
    for f in failures {
        eprintln!("FAIL: {f}");
    }
    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn execute(command: Command) -> plap::Result<ExitCode> {
    match command {
        Command::Generate {
            kind,
            n,
            h,
            sectors,
            r_inner,
            r_outer,
            amplitude,
            corners,
            out,
        } => {
            let profile = amplitude.map_or(Profile::Zero, |amplitude| Profile::Dipole { amplitude });
            let generator = match kind {
                Kind::Grid => Generator::Grid {
                    n,
                    h: h.unwrap_or(1.0 / n.saturating_sub(1).max(1) as f64),
                    profile,
                    corners,
                },
                Kind::Path => Generator::Path {
                    n,
                    h: h.unwrap_or(1.0),
                    profile,
                },
                Kind::Annulus => Generator::Annulus {
                    rings: n,
                    sectors,
                    r_inner,
                    r_outer,
                    profile,
                },
            };
            let file = generator.build()?;
            build_space(&file)?;
            let text = serde_json::to_string_pretty(&file)?;
            match out {
                Some(path) => std::fs::write(path, text + "\n")?,
                None => println!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckSpace { space, p, radii, seed } => {
            let space = build_space(&SpaceFile::load(space)?)?;
            let grid = radii.unwrap_or_else(|| run::default_radius_grid(&space));
            let mut options = PoincareOptions::default();
            if let Some(seed) = seed {
                options.search.seed = seed;
            }
            let report = structural_constants(&space, &grid, p, &options)?;
            print_json(&report)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve(args) => {
            let result = run::solve(&args.load()?)?;
            println!("J = {:.12} iterations = {} converged = {}", result.value, result.iterations, result.converged);
            Ok(if result.converged { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Verify { args, format } => {
            let format = match format {
                OutputFormat::Csv => Format::Csv,
                OutputFormat::Json => Format::Json,
            };
            let outcome = run::verify(&args.load()?, format)?;
            print_json(&outcome.de_giorgi)?;
            Ok(report_failures(&outcome.failures))
        }
        Command::Modulus { space, paths, p } => {
            let space = build_space(&SpaceFile::load(space)?)?;
            let ids: Vec<Vec<String>> = Vec::<Vec<String>>::deserialize(&mut serde_json::Deserializer::from_str(
                &std::fs::read_to_string(paths)?,
            ))?;
            let paths = ids
                .iter()
                .map(|path| path.iter().map(|id| space.vertex(id)).collect::<plap::Result<Vec<_>>>())
                .collect::<plap::Result<Vec<_>>>()?;
            let family = PathFamily::new(&space, paths)?;
            println!("{:.12}", p_modulus(&space, &family, p)?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Run(args) => {
            let outcome = run::run(&args.load()?)?;
            print_json(&outcome.summary)?;
            Ok(report_failures(&outcome.summary.failures))
        }
    }
}

fn main() -> ExitCode {
    if let Some(threads) = std::env::var("PLAP_THREADS").ok().and_then(|t| t.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match execute(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
