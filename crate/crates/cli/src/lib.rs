//! Command-line surface of `rotorwalk`.
//!
//! [`dispatch`] runs one command line and returns the exit code together with
//! everything that would go to standard output and standard error, so the
//! binary is a thin wrapper and tests can drive the CLI in-process.

pub mod args;
mod commands;
pub mod render;
pub mod spec;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::spec::RunSpec;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Exit code of a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit code of a failed computation (invalid model, unbalanced input, …).
pub const EXIT_DOMAIN: i32 = 1;
/// Exit code of a malformed command line.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(String),
}

impl From<rotorwalk::Error> for CliError {
    fn from(e: rotorwalk::Error) -> Self {
        CliError::Domain(e.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dispatch {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (program name first) without running anything.
pub fn parse_spec<I, T>(argv: I) -> Result<RunSpec, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    let (spec, _) = prepare(&cli.command);
    Ok(spec)
}

fn prepare(command: &Command) -> (RunSpec, Option<usize>) {
    let (name, degree, output) = match command {
        Command::Classify(a) => ("classify", a.input.degree, &a.output),
        Command::Kstar(a) => ("kstar", a.input.degree, &a.output),
        Command::MomentMatrix(a) => ("moment-matrix", a.input.degree, &a.output),
        Command::SpectralRadius(a) => ("spectral-radius", a.input.degree, &a.output),
        Command::Decompose(a) => ("decompose", a.input.degree, &a.output),
        Command::Sweep(a) => ("sweep", a.degree, &a.output),
        Command::Simulate(a) => ("simulate", a.input.degree, &a.output),
        Command::Excursions(a) => ("excursions", a.input.degree, &a.output),
        Command::Montecarlo(a) => ("montecarlo", a.input.degree, &a.output),
    };
    (RunSpec::new(name, degree, output.format.as_str()), output.jobs)
}

fn execute(command: &Command, spec: &mut RunSpec) -> Result<render::Report, CliError> {
    match command {
        Command::Classify(a) => commands::classify(a, spec),
        Command::Kstar(a) => commands::kstar(a, spec),
        Command::MomentMatrix(a) => commands::moment_matrix(a, spec),
        Command::SpectralRadius(a) => commands::spectral_radius(a, spec),
        Command::Decompose(a) => commands::decompose(a, spec),
        Command::Sweep(a) => commands::sweep(a, spec),
        Command::Simulate(a) => commands::simulate(a, spec),
        Command::Excursions(a) => commands::excursions(a, spec),
        Command::Montecarlo(a) => commands::monte_carlo(a, spec),
    }
}

/// Runs one command line.
pub fn dispatch<I, T>(argv: I) -> Dispatch
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Dispatch { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            } else {
                Dispatch { code: EXIT_OK, stdout: text, stderr: String::new() }
            };
        }
    };
    let (mut spec, jobs) = prepare(&cli.command);
    let outcome = match jobs {
        Some(0) => Err(CliError::Usage("--jobs must be positive".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli.command, &mut spec)),
            Err(e) => Err(CliError::Domain(format!("cannot start {n} workers: {e}"))),
        },
        None => execute(&cli.command, &mut spec),
    };
    match outcome {
        Ok(report) => Dispatch { code: EXIT_OK, stdout: render::render(&spec, &report), stderr: String::new() },
        Err(CliError::Usage(m)) => {
            Dispatch { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {m}\n") }
        }
        Err(CliError::Domain(m)) => {
            Dispatch { code: EXIT_DOMAIN, stdout: String::new(), stderr: format!("error: {m}\n") }
        }
    }
}
