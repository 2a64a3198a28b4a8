use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use subverify::{fixture_names, resolve, run, RunOptions};

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

/// Check submersion and contact-structure identities on a model at seeded sample points.
#[derive(Parser)]
#[command(name = "verify", version)]
struct Args {
    /// Built-in fixture name or path to a model file.
    #[arg(required_unless_present = "list")]
    model: Option<String>,
    /// all, sasakian, almost_contact, contact_form, sasakian_structure,
    /// axioms, fundamental, lemmas, criteria or harmonic.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Number of sample points (default from the model, else 50).
    #[arg(long)]
    points: Option<usize>,
    /// Sampling seed (default from the model, else 42).
    #[arg(long)]
    seed: Option<u64>,
    /// Multiply every residual tolerance by this factor.
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
    #[arg(long, value_enum, default_value = "text")]
    report: Format,
    /// List the built-in fixtures and exit.
    #[arg(long)]
    list: bool,
}

const INPUT_ERROR: u8 = 3;

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(INPUT_ERROR);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match execute(&args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}

fn execute(args: &Args) -> anyhow::Result<u8> {
    if !(args.tol_scale > 0.0 && args.tol_scale.is_finite()) {
        anyhow::bail!("--tol-scale must be a positive number");
    }
    let Some(name) = &args.model else {
        for f in fixture_names() {
            println!("{f}");
        }
        return Ok(0);
    };
    let model = resolve(name)?;
    let opts = RunOptions {
        suite: args.suite.clone(),
        points: args.points,
        seed: args.seed,
        tol_scale: args.tol_scale,
    };
    let report = run(&model, &opts)?;
    let out = match args.report {
        Format::Text => report.to_text(),
        Format::Json => report.to_json(),
    };
    std::io::stdout().lock().write_all(out.as_bytes())?;
    Ok(report.exit_code() as u8)
}
