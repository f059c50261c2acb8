use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use lane_emden_lab::report::exit;
use lane_emden_lab::{run, Cli, Command, Outcome};

fn emit(cmd: &Command, outcome: &Outcome) -> anyhow::Result<()> {
    match &cmd.output().out {
        Some(path) => fs::write(path, &outcome.body).with_context(|| format!("writing {}", path.display()))?,
        None => io::stdout().lock().write_all(outcome.body.as_bytes()).context("writing to stdout")?,
    }
    let (ok, total) = outcome.tally;
    eprintln!("{}: {ok}/{total} ok, exit {}", cmd.name(), outcome.exit_code);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE as u8 } else { 0 });
        }
    };
    let outcome = match run(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("lane-emden: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let Err(e) = emit(&cli.command, &outcome) {
        eprintln!("lane-emden: {e:#}");
        return ExitCode::from(exit::NUMERICAL as u8);
    }
    ExitCode::from(outcome.exit_code as u8)
}
