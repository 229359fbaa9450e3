//! `bandlab` experiment driver.

use std::path::PathBuf;
use std::process::ExitCode;

use bandlab::experiments::{run_and_write, Command};
use bandlab::Error;
use clap::{Args, Parser, Subcommand};
use serde_json::Value;

#[derive(Parser)]
#[command(name = "bandlab", version, about = "Random band matrix experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Curve family of the reduced matrix and its diagonal crossings.
    Curves(RunArgs),
    /// Band vs GOE bulk gap statistics.
    Gaps(RunArgs),
    /// Eigenvector QUE ladder.
    Que(RunArgs),
    /// Local laws, spacing floor and rigidity.
    Locallaw(RunArgs),
    /// Uncertainty-principle checks and negative controls.
    Uncertainty(RunArgs),
    /// Entry flows against the exact OU law.
    Flow(RunArgs),
    /// Self-consistent vector equation.
    Selfconsistent(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, env = "BANDLAB_OUT", default_value = "bandlab-out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Override a top-level config key, `key=value` with a JSON value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn parse_override(s: &str) -> Result<(String, Value), Error> {
    let (k, v) = s.split_once('=').ok_or_else(|| Error::Config(format!("override `{s}` is not key=value")))?;
    let v = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_owned()));
    Ok((k.trim().to_owned(), v))
}

fn run(cmd: Command, args: RunArgs) -> Result<bool, Error> {
    let text = match &args.config {
        Some(p) => Some(std::fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?),
        None => None,
    };
    let mut overrides = args.set.iter().map(|s| parse_override(s)).collect::<Result<Vec<_>, _>>()?;
    if let Some(seed) = args.seed {
        overrides.push(("seed".to_owned(), Value::from(seed)));
    }
    let (manifest, out) = run_and_write(cmd, text.as_deref(), &overrides, &args.out)?;
    println!(
        "{}: {} ({} files in {}, pass rate {:.3})",
        manifest.command,
        if manifest.passed { "PASS" } else { "FAIL" },
        manifest.outputs.len(),
        args.out.display(),
        out.report.summary.pass_rate
    );
    Ok(manifest.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (cmd, args) = match cli.cmd {
        Cmd::Curves(a) => (Command::Curves, a),
        Cmd::Gaps(a) => (Command::Gaps, a),
        Cmd::Que(a) => (Command::Que, a),
        Cmd::Locallaw(a) => (Command::LocalLaw, a),
        Cmd::Uncertainty(a) => (Command::Uncertainty, a),
        Cmd::Flow(a) => (Command::Flow, a),
        Cmd::Selfconsistent(a) => (Command::SelfConsistent, a),
    };
    match run(cmd, args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
