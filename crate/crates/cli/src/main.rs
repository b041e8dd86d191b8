use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use duality_cli::builtin::{run_builtin, BuiltinError, BuiltinScenario, RunOptions};
use duality_cli::commands::{apply_overrides, simulate, tune_csv, tune_table, tune_text, write_simulation};
use duality_cli::config::load_config;
use duality_cli::{EXIT_FAIL, EXIT_PASS, EXIT_USAGE};
use duality_core::setup::Setup;

#[derive(Parser)]
#[command(name = "duality", version, about = "AC/DC converter control duality toolbox")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integration step override, s.
    #[arg(long)]
    timestep: Option<f64>,
    /// Simulation horizon override, s.
    #[arg(long = "t-end")]
    t_end: Option<f64>,
}

impl Common {
    fn options(&self) -> RunOptions {
        RunOptions {
            timestep: self.timestep,
            t_end: self.t_end,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Print the controller and droop parameter table for the reference setup.
    Tune(Common),
    /// Sweep the current-loop gains and check their identity.
    Bode(Common),
    /// Run a JSON-configured scenario.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a built-in scenario and its checks.
    Verify {
        #[arg(long)]
        scenario: BuiltinScenario,
        #[command(flatten)]
        common: Common,
    },
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE as u8)
}

fn failure(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_FAIL as u8)
}

fn verify(name: BuiltinScenario, common: &Common) -> ExitCode {
    let outcome = match run_builtin(name, &common.options()) {
        Ok(o) => o,
        Err(BuiltinError::Options(m)) => return usage(m),
        Err(BuiltinError::Core(e @ duality_core::Error::InvalidArgument(_))) => return usage(e),
        Err(e) => return failure(e),
    };
    print!("{}", outcome.summary());
    if let Some(dir) = &common.out {
        match outcome.write_to(dir) {
            Ok(files) => files.iter().for_each(|f| println!("wrote {}", f.display())),
            Err(e) => return failure(format!("{}: {e}", dir.display())),
        }
    }
    let pass = outcome.pass();
    println!("{name}: {}", if pass { "PASS" } else { "FAIL" });
    ExitCode::from(if pass { EXIT_PASS } else { EXIT_FAIL } as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match cli.command {
        Command::Tune(common) => {
            let rows = match tune_table(&Setup::reference()) {
                Ok(r) => r,
                Err(e) => return failure(e),
            };
            print!("{}", tune_text(&rows));
            if let Some(dir) = &common.out {
                let path = dir.join("tune.csv");
                if let Err(e) = std::fs::create_dir_all(dir).and_then(|_| std::fs::write(&path, tune_csv(&rows))) {
                    return failure(format!("{}: {e}", path.display()));
                }
                println!("wrote {}", path.display());
            }
            ExitCode::from(EXIT_PASS as u8)
        }
        Command::Bode(common) => verify(BuiltinScenario::Bode, &common),
        Command::Verify { scenario, common } => verify(scenario, &common),
        Command::Simulate { config, common } => {
            let cfg = match load_config(&config).and_then(|c| apply_overrides(&c, &common.options())) {
                Ok(c) => c,
                Err(e) => return usage(e),
            };
            let traces = match simulate(&cfg) {
                Ok(t) => t,
                Err(e) => return failure(e),
            };
            let dir = common
                .out
                .or_else(|| cfg.outputs.csv_dir.clone())
                .unwrap_or_else(|| PathBuf::from("."));
            match write_simulation(&cfg, &traces, &dir) {
                Ok(files) => {
                    files.iter().for_each(|f| println!("wrote {}", f.display()));
                    ExitCode::from(EXIT_PASS as u8)
                }
                Err(e) => failure(e),
            }
        }
    }
}
