mod args;
mod commands;
mod config;
mod output;

use args::Cli;
use clap::{CommandFactory, Parser};
use output::OutputDir;
use std::process::ExitCode;

const EXIT_VALIDATION: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<hfe_core::Error>() {
        Some(h) if h.is_validation() => EXIT_VALIDATION,
        _ => EXIT_RUNTIME,
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(hfe_core::Error::InvalidArgument("--threads must be positive".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let mut out = OutputDir::create(cli.out.clone())?;
    let seed = commands::run(&cli.command, &mut out)?;
    let params = serde_json::to_value(&cli)?;
    out.finish(cli.command.name(), params, seed)?;
    Ok(())
}

fn main() -> ExitCode {
    let subcommands: Vec<String> = Cli::command().get_subcommands().map(|c| c.get_name().to_string()).collect();
    let argv = match config::expand(std::env::args_os().collect(), &subcommands) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_VALIDATION);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_VALIDATION } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
