use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qrel_cli::output::{to_json, write_output};
use qrel_cli::scenario::{load_scenario, parse_params, run, ScenarioKind};
use qrel_cli::table::{transform_table, TableRequest};
use qrel_cli::verify::{run_suite, Tolerances};
use qrel_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "qrel", version, about = "Run quantum-frame scenarios and invariant checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario config and write its output file
    Run {
        config: PathBuf,
        /// Override the config's seed
        #[arg(long)]
        seed: Option<u64>,
        /// Directory the output path is resolved against
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full invariant suite
    Verify,
    /// Tabulate dilation, de Broglie and delta/gamma values for a sweep
    TransformTable {
        config: PathBuf,
        /// Write transform_table.json here instead of printing
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run_command(config: &Path, seed: Option<u64>, out: Option<&Path>) -> CliResult<()> {
    let mut scenario = load_scenario(config)?;
    if let Some(s) = seed {
        scenario.seed = s;
    }
    println!("{}", run(&scenario, out)?);
    Ok(())
}

fn table_command(config: &Path, out: Option<&Path>) -> CliResult<()> {
    let text = std::fs::read_to_string(config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
    let request: TableRequest = parse_params(ScenarioKind::TransformTable, &value)?;
    let json = to_json(&transform_table(&request)?)?;
    match out {
        Some(dir) => {
            let path = dir.join("transform_table.json");
            write_output(&path, json.as_bytes())?;
            println!("transform_table -> {}", path.display());
        }
        None => print!("{json}"),
    }
    Ok(())
}

fn verify_command() -> ExitCode {
    let results = run_suite(&Tolerances::default());
    for r in &results {
        println!("{}", r.line());
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    if failed.is_empty() {
        println!("all {} invariants passed", results.len());
        ExitCode::SUCCESS
    } else {
        eprintln!("failed invariants: {}", failed.join(", "));
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, seed, out } => run_command(config, *seed, out.as_deref()),
        Command::Verify => return verify_command(),
        Command::TransformTable { config, out } => table_command(config, out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
