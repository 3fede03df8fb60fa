use std::io::Write;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use pwldyn::cli_reporting::{run, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = e.downcast_ref::<pwldyn::cli_reporting::CliError>().map_or(EXIT_USAGE, |c| c.exit_code());
            ExitCode::from(code as u8)
        }
    }
}

fn execute(cli: Cli) -> anyhow::Result<i32> {
    let outcome = run(cli)?;
    for w in &outcome.warnings {
        eprintln!("{w}");
    }
    let mut out = std::io::stdout().lock();
    out.write_all(outcome.stdout.as_bytes()).context("writing to standard output")?;
    Ok(outcome.code)
}
