use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gapsolve::runner::{run_config, RunConfig, RunOutput};

#[derive(Parser)]
#[command(name = "gapsolve", version, about = "Eigenvalues in spectral gaps via min-max levels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `output.dir` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match cli.command {
        Command::Run { config, out } => match run(&config, out.as_deref()) {
            Ok(output) => {
                for f in &output.files {
                    println!("{}", f.display());
                }
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("gapsolve: error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
    }
}

fn run(config: &Path, out: Option<&Path>) -> gapsolve::Result<RunOutput> {
    let cfg = RunConfig::from_path(config)?;
    for w in cfg.warnings() {
        eprintln!("gapsolve: warning: {w}");
    }
    run_config(&cfg, out)
}
