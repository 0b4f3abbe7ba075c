use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use superladder::commands::{self, Overrides};

#[derive(Parser)]
#[command(version, about = "Verify, simulate and report on ladder-operator superintegrable systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every verification suite; exit 1 if any fails.
    Verify(Common),
    /// Integrate a trajectory and write CSV and SVG files.
    Simulate(Common),
    /// Print printed-versus-fitted comparison tables.
    Report(Common),
}

#[derive(Args)]
struct Common {
    /// TOML file overriding preset fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Figure preset: fig1, fig2, fig3 or fig4 (default fig1).
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integrator tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

impl From<Common> for Overrides {
    fn from(c: Common) -> Self {
        Overrides { preset: c.preset, config: c.config, seed: c.seed, out: c.out, tol: c.tol }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (run, common): (fn(&_) -> _, Common) = match cli.command {
        Command::Verify(c) => (commands::verify, c),
        Command::Simulate(c) => (commands::simulate, c),
        Command::Report(c) => (commands::report, c),
    };
    match Overrides::from(common).resolve().and_then(|cfg| run(&cfg)) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            ExitCode::from(outcome.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
