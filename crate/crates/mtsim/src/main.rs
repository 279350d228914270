use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use mtsim::output::manifest;
use mtsim::{run, write_outputs, CliError, RunConfig};

/// Majorana-transmon qubit experiments; writes CSV curves and manifest.json.
#[derive(Parser, Debug)]
#[command(version)]
struct Args {
    /// bands | junction-spectrum | rabi | gate | leakage | two-qubit | verify
    experiment: String,
    /// Flat `key = value` file; missing keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides a config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let start = Instant::now();
    let result =
        RunConfig::load(&args.experiment, args.config.as_deref(), &args.sets).and_then(|cfg| {
            let outcome = run(&cfg)?;
            let status = outcome.failure.as_ref().map_or("ok", |_| "failed");
            let m = manifest(
                &cfg,
                &outcome.tables,
                &outcome.diagnostics,
                start.elapsed().as_secs_f64(),
                status,
            );
            let files = write_outputs(&args.out, &outcome.tables, &m)?;
            for f in files {
                println!("{}", f.display());
            }
            Ok(outcome.failure)
        });
    match result {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some((code, msg))) => {
            eprintln!("mtsim: {msg}");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("mtsim: {e}");
            ExitCode::from(CliError::exit_code(&e) as u8)
        }
    }
}
