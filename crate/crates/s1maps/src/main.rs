//! Thin command-line front end for the scenario runner.
//!
//! Exit codes: 0 success, 2 assertion failure (a theorem check violated),
//! 3 input error.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use s1maps::scenario::{self, Scenario};

#[derive(Parser)]
#[command(
    name = "s1maps",
    version,
    about = "Run singular-energy and class-distance experiments from JSON scenario files",
    after_help = "Environment:\n  S1MAPS_OUT      overrides the output directory\n  S1MAPS_THREADS  worker threads for sweep fan-out (default 1)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one scenario file and write results.json + CSV tables
    Run {
        /// scenario JSON document
        file: PathBuf,
        /// output directory (default: alongside the scenario file)
        #[arg(long)]
        out: Option<PathBuf>,
        /// fix summation order and record the flag in the outputs
        #[arg(long)]
        deterministic: bool,
        /// iteration cap for the variational solvers
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Repeat a scenario over a parameter list and emit one CSV table
    Sweep {
        /// scenario JSON document
        file: PathBuf,
        /// parameter to vary: h, p, n or quadrature
        #[arg(long)]
        param: String,
        /// comma-separated values
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        deterministic: bool,
        #[arg(long)]
        max_iters: Option<usize>,
    },
}

fn load(
    file: &PathBuf,
    out: Option<PathBuf>,
    deterministic: bool,
    max_iters: Option<usize>,
) -> s1maps::Result<(Scenario, PathBuf)> {
    let mut sc = Scenario::from_file(file)?;
    if deterministic {
        sc.deterministic = true;
    }
    if let Some(k) = max_iters {
        let mut settings = sc.solver.clone().unwrap_or_default();
        settings.max_iters = k;
        sc.solver = Some(settings);
    }
    let out_dir = std::env::var_os("S1MAPS_OUT")
        .map(PathBuf::from)
        .or(out)
        .or_else(|| sc.out.clone())
        .unwrap_or_else(|| {
            file.parent()
                .map(|p| p.to_path_buf())
                .unwrap_or_else(|| PathBuf::from("."))
                .join(format!(
                    "{}-out",
                    file.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario")
                ))
        });
    Ok((sc, out_dir))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { file, out, deterministic, max_iters } => {
            load(&file, out, deterministic, max_iters).and_then(|(sc, out_dir)| {
                let output = scenario::run(&sc)?;
                let files = scenario::write_outputs(&out_dir, &output)?;
                for f in files {
                    eprintln!("wrote {}", f.display());
                }
                println!("{}", serde_json::to_string_pretty(&output.json)?);
                Ok(())
            })
        }
        Command::Sweep { file, param, values, out, deterministic, max_iters } => {
            load(&file, out, deterministic, max_iters).and_then(|(sc, out_dir)| {
                let output = scenario::sweep(&sc, &param, &values)?;
                let files = scenario::write_outputs(&out_dir, &output)?;
                for f in files {
                    eprintln!("wrote {}", f.display());
                }
                println!("{}", serde_json::to_string_pretty(&output.json)?);
                Ok(())
            })
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(scenario::exit_code_for(&err) as u8)
        }
    }
}
