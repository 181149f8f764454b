use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use nestdisc_cli::args::Cli;
use nestdisc_cli::commands::run;
use nestdisc_cli::exit;

fn emit(out: &str) -> io::Result<()> {
    let mut stdout = io::stdout().lock();
    stdout.write_all(out.as_bytes())?;
    if !out.ends_with('\n') {
        stdout.write_all(b"\n")?;
    }
    stdout.flush()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) if out.is_empty() => ExitCode::SUCCESS,
        Ok(out) => match emit(&out) {
            Ok(()) => ExitCode::SUCCESS,
            // A reader that stops early, e.g. `| head`, is not an error.
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("nestdisc: {e}");
                ExitCode::from(exit::IO as u8)
            }
        },
        Err(e) => {
            eprintln!("nestdisc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
