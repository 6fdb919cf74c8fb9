use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nctorus_cli::{parse_config, run, write_outputs, Parsed};

const EXIT_NUMERICAL: u8 = 1;
const EXIT_SCHEMA: u8 = 2;

#[derive(Parser)]
#[command(name = "nctorus", version, about = "Numerical experiments on the magnetic noncommutative torus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Only check the config, as `validate` does.
        #[arg(long)]
        validate: bool,
    },
    /// Check a config against the schema and invariants without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &Path) -> Result<(String, Parsed), ExitCode> {
    match std::fs::read_to_string(path) {
        Ok(src) => {
            let parsed = parse_config(&src);
            Ok((src, parsed))
        }
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            Err(ExitCode::from(EXIT_SCHEMA))
        }
    }
}

fn report(path: &Path, parsed: &Parsed) {
    for d in &parsed.diagnostics {
        eprintln!("{}: {d}", path.display());
    }
}

fn validate(path: &Path) -> ExitCode {
    let (_, parsed) = match load(path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    report(path, &parsed);
    if parsed.has_errors() {
        ExitCode::from(EXIT_SCHEMA)
    } else {
        println!("{}: ok ({} warning(s))", path.display(), parsed.diagnostics.len());
        ExitCode::SUCCESS
    }
}

fn execute(path: &Path, output_dir: Option<PathBuf>) -> ExitCode {
    let (_, parsed) = match load(path) {
        Ok(p) => p,
        Err(code) => return code,
    };
    report(path, &parsed);
    let Some(cfg) = parsed.config else {
        return ExitCode::from(EXIT_SCHEMA);
    };
    let dir = output_dir.or_else(|| cfg.output_dir.clone()).unwrap_or_else(|| PathBuf::from("nctorus-out"));
    let out = run(&cfg);
    for c in &out.manifest.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {} = {:e} ({:?} {:e})", c.name, c.value.0, c.comparison, c.tolerance.0);
    }
    for n in &out.manifest.notes {
        println!("note: {n}");
    }
    match write_outputs(&dir, &out) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: writing results to {}: {e}", dir.display());
            return ExitCode::from(EXIT_NUMERICAL);
        }
    }
    if out.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NUMERICAL)
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, validate: true, .. } | Command::Validate { config } => validate(&config),
        Command::Run { config, output_dir, validate: false } => execute(&config, output_dir),
    }
}
