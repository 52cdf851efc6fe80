//! Command-line front end for the qubit thermal-machine library.
//!
//! `qthermo list` shows the available experiments, `qthermo describe
//! <name>` documents one, and `qthermo <name> [--param K=V ...]` runs it,
//! writing a primary CSV/JSON table plus a `.meta.json` sidecar recording
//! the resolved configuration. Exit codes: 0 success, 1 invalid
//! configuration or domain error, 2 numerical-accuracy failure.

mod experiments;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use experiments::{CliError, Config, Experiment, Format, EXPERIMENTS};

#[derive(Parser)]
#[command(
    name = "qthermo",
    version,
    about = "Finite-time thermal machines on a driven qubit: slow-driving \
             Carnot optimization, exact Otto cycles, ancilla-mediated baths \
             and information-flow diagnostics.",
    after_help = "Run `qthermo list` for the experiment catalog and \
                  `qthermo describe <experiment>` for parameters."
)]
struct Cli {
    /// `list`, `describe`, or an experiment name
    command: String,

    /// Experiment to describe (only with `describe`)
    target: Option<String>,

    /// Override one parameter as KEY=VALUE (repeatable)
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,

    /// Primary output path (default: <experiment>.<csv|json>)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Primary output format
    #[arg(long, value_enum)]
    format: Option<Format>,

    /// Grid density for sweep/trace experiments
    #[arg(long)]
    mesh: Option<usize>,

    /// Worker threads for sweeps; 0 picks automatically.
    /// The QTHERMO_JOBS environment variable takes precedence.
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help/--version land here too; those exit 0, real parse
            // errors count as invalid configuration.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match cli.command.as_str() {
        "list" => {
            for exp in EXPERIMENTS {
                println!("{:<20} {}", exp.name, exp.about);
            }
            Ok(())
        }
        "describe" => {
            let name = cli.target.as_deref().ok_or_else(|| {
                CliError::Config("describe needs an experiment name; see `qthermo list`".into())
            })?;
            let exp = find_experiment(name)?;
            describe(exp);
            Ok(())
        }
        name => {
            if cli.target.is_some() {
                return Err(CliError::Config(format!(
                    "unexpected extra argument after {name}; parameters go in --param KEY=VALUE"
                )));
            }
            run_experiment(find_experiment(name)?, cli)
        }
    }
}

fn find_experiment(name: &str) -> Result<&'static Experiment, CliError> {
    experiments::find(name).ok_or_else(|| {
        CliError::Config(format!(
            "unknown experiment {name}; run `qthermo list` to see the catalog"
        ))
    })
}

fn describe(exp: &Experiment) {
    println!("{} — {}", exp.name, exp.about);
    println!();
    println!("{}", exp.details);
    println!();
    if exp.params.is_empty() {
        println!("parameters: none");
    } else {
        println!("parameters (override with --param KEY=VALUE):");
        for p in exp.params {
            println!("  {:<14} default {:<22} {}", p.key, p.default, p.help);
        }
    }
    if exp.default_mesh > 0 {
        println!("mesh: {} ({}); override with --mesh", exp.default_mesh, exp.mesh_help);
    }
    println!(
        "output: {}.{} by default; --out/--format override",
        exp.name,
        exp.default_format.extension()
    );
}

fn resolve_jobs(cli: &Cli) -> Result<usize, CliError> {
    if let Ok(raw) = std::env::var("QTHERMO_JOBS") {
        return raw.parse::<usize>().map_err(|_| {
            CliError::Config(format!("QTHERMO_JOBS={raw} is not a thread count"))
        });
    }
    Ok(cli.jobs.unwrap_or(0))
}

fn run_experiment(exp: &'static Experiment, cli: &Cli) -> Result<(), CliError> {
    let values = experiments::resolve_params(exp, &cli.params)?;
    let mesh = match (exp.default_mesh, cli.mesh) {
        (0, Some(_)) => {
            return Err(CliError::Config(format!("{} has no mesh knob", exp.name)));
        }
        (0, None) => 0,
        (_, Some(0)) => {
            return Err(CliError::Config("--mesh must be at least 1".into()));
        }
        (d, m) => m.unwrap_or(d),
    };
    let config = Config { values, mesh, jobs: resolve_jobs(cli)? };

    let started = Instant::now();
    let table = (exp.run)(&config)?;
    let wall_time = started.elapsed().as_secs_f64();

    let format = cli.format.unwrap_or(exp.default_format);
    let path = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.{}", exp.name, format.extension())));
    let rendered = match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    std::fs::write(&path, rendered).map_err(|e| {
        CliError::Config(format!("cannot write {}: {e}", path.display()))
    })?;
    table::write_sidecar(&path, exp.name, &config.values, config.mesh, config.jobs, wall_time)
        .map_err(|e| CliError::Config(format!("cannot write sidecar: {e}")))?;
    println!("wrote {}", path.display());
    println!("wrote {}.meta.json", path.display());
    Ok(())
}
