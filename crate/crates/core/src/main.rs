use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use skewprod::manifest;
use skewprod::report::{render_text, Report};
use skewprod::run::{run, Command, RunOptions};

#[derive(Parser)]
#[command(name = "skewprod", version, about = "Classify and verify submanifolds of flat locally product manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Classify the tangent distributions only.
    Classify(RunArgs),
    /// Run every check listed in the manifest.
    Verify(RunArgs),
    /// Evaluate the Chen-type inequality and its equality case.
    Inequality(RunArgs),
    /// Render a saved JSON report as a text table.
    Report {
        /// Report written by --json-out.
        path: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Number of random sample points (replaces the manifest value).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Multiplier applied to every pass tolerance.
    #[arg(long, default_value_t = 1.0)]
    tol: f64,
    #[arg(long)]
    json_out: Option<PathBuf>,
    /// Suppress the text table.
    #[arg(long)]
    quiet: bool,
}

fn execute(command: Command, a: &RunArgs) -> Result<i32, String> {
    let problem = manifest::load(&a.manifest).map_err(|e| format!("{}: {e}", a.manifest.display()))?;
    let opts = RunOptions { random: a.samples, seed: a.seed, tol_scale: a.tol, mutation: None, timings: true };
    let report = run(&problem, command, &opts).map_err(|e| e.to_string())?;
    if let Some(path) = &a.json_out {
        std::fs::write(path, report.to_json()).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    if !a.quiet {
        print!("{}", render_text(&report));
    }
    Ok(report.exit_code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Cmd::Classify(a) => execute(Command::Classify, a),
        Cmd::Verify(a) => execute(Command::Verify, a),
        Cmd::Inequality(a) => execute(Command::Inequality, a),
        Cmd::Report { path } => std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))
            .and_then(|t| Report::from_json(&t).map_err(|e| format!("{}: {e}", path.display())))
            .map(|r| {
                print!("{}", render_text(&r));
                0
            }),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
