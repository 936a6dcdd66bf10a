//! `fjcalc`: run verification scenarios and print machine-readable reports.
//!
//! Exit codes: 0 all checks passed, 1 at least one check failed, 2 the
//! scenario could not be parsed or set up.

mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use scenario::{built_ins, run_scenario, to_json, validate_scenario, Scenario, SetupError};

#[derive(Parser)]
#[command(
    name = "fjcalc",
    version,
    about = "Scenario runner for the Fourier-Jacobi calculus"
)]
struct Cli {
    /// pretty-print JSON with this many spaces per level (compact if absent)
    #[arg(long, global = true)]
    json_indent: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a scenario file (JSON, or TOML by extension) and report
    Run { path: PathBuf },
    /// List the built-in scenarios
    List,
    /// Print one built-in scenario in canonical JSON form
    Describe { name: String },
}

/// Print one line to stdout, treating a closed pipe as a normal shutdown.
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{text}").is_err() {
        std::process::exit(0);
    }
}

fn parse_scenario(path: &Path) -> Result<Scenario, SetupError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SetupError(format!("cannot read {}: {e}", path.display())))?;
    let is_toml = path.extension().is_some_and(|e| e == "toml");
    if is_toml {
        toml::from_str(&text).map_err(|e| SetupError(format!("TOML parse error: {e}")))
    } else {
        match serde_json::from_str(&text) {
            Ok(s) => Ok(s),
            // unlabelled files get one TOML fallback attempt
            Err(json_err) => toml::from_str(&text)
                .map_err(|_| SetupError(format!("JSON parse error: {json_err}"))),
        }
    }
}

fn run(path: &Path, indent: Option<usize>) -> Result<bool, SetupError> {
    let scenario = parse_scenario(path)?;
    let model = validate_scenario(&scenario)?;
    let mut timing = Vec::new();
    let report = run_scenario(&scenario, model.as_ref(), &mut timing);
    emit(&to_json(&report, indent));
    for (check, ms) in timing {
        eprintln!("timing: {check} {ms} ms");
    }
    Ok(report.pass)
}

fn list(indent: Option<usize>) {
    let entries: Vec<_> = built_ins()
        .into_iter()
        .map(|(s, description)| {
            json!({
                "name": s.name,
                "model": s.model,
                "checks": s.checks.iter().map(|c| c.name()).collect::<Vec<_>>(),
                "description": description,
            })
        })
        .collect();
    emit(&to_json(&entries, indent));
}

fn describe(name: &str, indent: Option<usize>) -> Result<(), SetupError> {
    let found = built_ins()
        .into_iter()
        .find(|(s, _)| s.name == name)
        .ok_or_else(|| SetupError(format!("unknown built-in scenario {name:?}")))?;
    let (s, description) = found;
    emit(&to_json(
        &json!({ "description": description, "scenario": s }),
        indent,
    ));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { path } => run(path, cli.json_indent),
        Command::List => {
            list(cli.json_indent);
            Ok(true)
        }
        Command::Describe { name } => describe(name, cli.json_indent).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
