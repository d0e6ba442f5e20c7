mod args;
mod commands;
mod error;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use serde::Serialize;

use args::{Cli, Command, Format};
use commands::{CurveSpec, OptimizeRows};
use error::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

struct Sink {
    format: Format,
    out: Box<dyn Write>,
}

impl Sink {
    fn open(cli: &Cli) -> Result<Self, CliError> {
        let out: Box<dyn Write> = match &cli.output {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Sink { format: cli.format, out })
    }

    fn emit<T: Serialize>(&mut self, rows: &[T]) -> Result<(), CliError> {
        output::emit(rows, self.format, &mut self.out)?;
        self.out.flush().map_err(|e| CliError::Output(e.to_string()))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut sink = Sink::open(&cli)?;
    match cli.command {
        Command::Sensitivity { sources, schemes, eta } => {
            let configs = commands::load(&sources)?;
            sink.emit(&commands::sensitivity(&configs, &schemes, eta)?)
        }
        Command::Table { tolerance } => {
            let (rows, ok) = commands::table(tolerance)?;
            sink.emit(&rows)?;
            if ok {
                Ok(())
            } else {
                let off: Vec<_> =
                    rows.iter().filter(|r| !r.within_tolerance).map(|r| r.label.as_str()).collect();
                Err(CliError::Tolerance(format!("outside tolerance {tolerance}: {}", off.join(", "))))
            }
        }
        Command::Sweep { sources, param, values, log_range, range, schemes } => {
            let configs = commands::load(&sources)?;
            let values = commands::sweep_values(&param, &values, log_range.as_deref(), range.as_deref())?;
            sink.emit(&commands::sweep(&configs, &param, &values, &schemes)?)
        }
        Command::Ladder { sources, lifetime } => {
            let configs = commands::load(&sources)?;
            sink.emit(&commands::ladder(&configs, &lifetime)?)
        }
        Command::Optimize { sources, target, scheme, lifetime } => {
            let configs = commands::load(&sources)?;
            match commands::optimize(&configs, target, &scheme, &lifetime)? {
                OptimizeRows::Eta(rows) => sink.emit(&rows),
                OptimizeRows::Gate(rows) => sink.emit(&rows),
            }
        }
        Command::Simulate { sources, scheme, sigma_c, trials, seed } => {
            let configs = commands::load(&sources)?;
            sink.emit(&commands::simulate_rows(&configs, &scheme, &sigma_c, trials, seed)?)
        }
        Command::Curve { sources, scheme, from, to, points, trials, seed } => {
            let configs = commands::load(&sources)?;
            let spec = CurveSpec { scheme: &scheme, from, to, points, trials, seed };
            let (rows, irregular) = commands::curve(&configs, &spec)?;
            sink.emit(&rows)?;
            for label in irregular {
                eprintln!("warning: detection curve for {label} is not monotone within 3 standard errors");
            }
            Ok(())
        }
    }
}
