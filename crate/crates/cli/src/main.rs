use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use plasmonkit::{run, Command, EXIT_CONFIG};

/// Size-dependent plasmon resonances of ellipsoidal nanoparticles.
#[derive(Debug, Parser)]
#[command(name = "plasmonkit", version)]
struct Cli {
    command: Command,
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output CSV; metadata goes to `<out>.meta.json`.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads for the numerical kernels.
    #[arg(long, env = "PLASMONKIT_WORKERS")]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_CONFIG as u8);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    if cli.workers == Some(0) {
        eprintln!(r#"{{"error":"config","exit_code":2,"messages":["--workers must be at least 1"]}}"#);
        return ExitCode::from(EXIT_CONFIG as u8);
    }
    match run(cli.command, &cli.config, &cli.out, cli.workers) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            let record = serde_json::to_string(&e.record()).expect("error record serializes");
            eprintln!("{record}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
