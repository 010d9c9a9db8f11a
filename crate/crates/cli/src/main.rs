use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hqm_cli::config::ScenarioConfig;
use hqm_cli::runner::battery_options;
use hqm_cli::{parse_config, run, scenario_text, SCENARIOS};
use hqm_core::convergence::Verdict;
use hqm_core::identities::run_battery;
use hqm_core::HqmError;

#[derive(Parser)]
#[command(name = "hqm", version, about = "Quaternionic quantum mechanics scenarios and identity checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Scenario file to load.
    #[arg(long, value_name = "PATH", conflicts_with = "scenario")]
    config: Option<PathBuf>,
    /// Bundled scenario name (see `list-scenarios`).
    #[arg(long, value_name = "NAME")]
    scenario: Option<String>,
    /// Multiplies grid.n and divides evolve.dt.
    #[arg(long, value_name = "N", default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    resolution_scale: u32,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a scenario and write series.csv, report.txt and meta.txt.
    Run {
        #[command(flatten)]
        source: Source,
        /// Output directory (default: output.dir, else out/<name>).
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Validate and print the resolved configuration; write nothing.
        #[arg(long)]
        dry_run: bool,
    },
    /// Run the commutator identity battery at two resolutions.
    CheckIdentities {
        #[command(flatten)]
        source: Source,
        /// Debug mutation: negate κ so the field-strength identity must fail.
        #[arg(long)]
        flip_kappa: bool,
        /// Restrict to the named identities (repeatable).
        #[arg(long, value_name = "NAME")]
        only: Vec<String>,
    },
    /// List the bundled scenarios.
    ListScenarios,
    /// Print the resolved configuration.
    PrintConfig {
        #[command(flatten)]
        source: Source,
    },
}

enum Failure {
    Usage(String),
    Io(String),
    Solver(String),
    Checks,
}

/// The unscaled configuration and the requested resolution scale.
fn load(source: &Source) -> Result<(ScenarioConfig, usize), Failure> {
    let text = match (&source.config, &source.scenario) {
        (Some(p), _) => std::fs::read_to_string(p).map_err(|e| Failure::Io(format!("{}: {e}", p.display())))?,
        (None, Some(n)) => scenario_text(n)
            .ok_or_else(|| Failure::Usage(format!("unknown scenario `{n}`; try `hqm list-scenarios`")))?
            .to_string(),
        (None, None) => return Err(Failure::Usage("pass --config PATH or --scenario NAME".into())),
    };
    let cfg = parse_config(&text).map_err(|e| Failure::Usage(e.to_string()))?;
    for w in &cfg.warnings {
        eprintln!("warning: {w}");
    }
    Ok((cfg, source.resolution_scale as usize))
}

fn solver(e: HqmError) -> Failure {
    match e {
        HqmError::Divergence { t, norm_history, .. } => {
            Failure::Solver(format!("solver diverged at t = {t}; recent norms {norm_history:?}; reduce evolve.dt"))
        }
        e => Failure::Solver(e.to_string()),
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::ListScenarios => {
            for (name, text) in SCENARIOS {
                let c = parse_config(text).map_err(|e| Failure::Usage(e.to_string()))?;
                println!("{name:<24} {}", c.description);
            }
        }
        Command::PrintConfig { source } => {
            let (cfg, scale) = load(&source)?;
            print!("{}", cfg.scaled(scale).to_toml());
        }
        Command::Run { source, out, dry_run } => {
            let (cfg, scale) = load(&source)?;
            if dry_run {
                print!("{}", cfg.scaled(scale).to_toml());
                return Ok(());
            }
            let dir = out
                .or_else(|| cfg.output.dir.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));
            let output = run(&cfg, scale).map_err(solver)?;
            for w in &output.warnings {
                eprintln!("warning: {w}");
            }
            let files = output.write(&dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
            for f in files {
                println!("{}", f.display());
            }
        }
        Command::CheckIdentities { source, flip_kappa, only } => {
            let (cfg, scale) = load(&source)?;
            let mut opts = battery_options(&cfg.scaled(scale), flip_kappa);
            opts.only = only;
            let cases = run_battery(&opts).map_err(solver)?;
            let mut failed = false;
            println!("{:<24} {:<16} {:>12} {:>12}  verdict", "identity", "setting", "coarse", "fine");
            for c in &cases {
                let status = match c.verdict {
                    Verdict::Skipped => "SKIP",
                    v if v.passed() => "PASS",
                    _ => {
                        failed = true;
                        "FAIL"
                    }
                };
                println!(
                    "{:<24} {:<16} {:>12.3e} {:>12.3e}  {status} {}",
                    c.name, c.setting, c.coarse, c.fine, c.verdict
                );
            }
            if failed {
                return Err(Failure::Checks);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Solver(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(4)
        }
        Err(Failure::Checks) => {
            eprintln!("error: identity checks failed");
            ExitCode::from(1)
        }
    }
}
