use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gradedq_core::suite::{self, Command, Options};
use gradedq_core::ModelFile;

/// Exact curvature and torsion computations for exact Courant algebroids.
#[derive(Debug, Parser)]
#[command(name = "gradedq", version)]
struct Args {
    /// verify-master, curvature, torsion, k-curvature, k-torsion,
    /// compare-naive, dirac-check, ricci, scalar or verify-all
    command: String,
    /// Model file (JSON)
    model: PathBuf,
    /// Emit a machine-readable report
    #[arg(long)]
    json: bool,
    /// Seed for randomized sampling; overrides the model's "seed"
    #[arg(long)]
    seed: Option<u64>,
    /// Number of random samples per randomized check
    #[arg(long, default_value_t = 5)]
    samples: usize,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let Some(command) = Command::from_name(&args.command) else {
        let names: Vec<&str> = Command::ALL.iter().map(|c| c.name()).collect();
        eprintln!("error: unknown command {:?}; expected one of {}", args.command, names.join(", "));
        return ExitCode::from(2);
    };
    let model = match ModelFile::from_path(&args.model) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let opts = Options { seed: args.seed.or(model.seed).unwrap_or(0), samples: args.samples };
    let report = match suite::run(command, &model, opts) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if args.json {
        print!("{}", report.render_json());
    } else {
        print!("{}", report.render_text());
    }
    if let Some((section, check)) = report.first_failure() {
        eprintln!(
            "first offending component ({} / {}): {}",
            section.title,
            check.name,
            check.detail.as_deref().unwrap_or("")
        );
    }
    ExitCode::from(report.exit_code() as u8)
}
