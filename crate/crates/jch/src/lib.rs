//! Command-line front end for `jch-core`.
//!
//! Every computation is a [`RunConfig`] resolved from defaults, an optional
//! config file, `key=value` arguments and `--key value` flags (later sources
//! win). Results are rendered as CSV or JSON by [`output`].

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Arg, ArgAction, ArgMatches};

pub use config::{Assignments, Command, ConfigError, Format, Origin, RunConfig};
pub use output::{Cell, Table};

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(#[from] jch_core::Error),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    Usage(String),
}

impl AppError {
    /// Process exit status.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Io { .. } => 1,
            AppError::Config(_) | AppError::Usage(_) => 2,
            AppError::Numerical(_) => 3,
            AppError::Verification(_) => 4,
        }
    }

    fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        AppError::Io {
            path: path.into(),
            source,
        }
    }
}

fn cli() -> clap::Command {
    let mut cmd = clap::Command::new("jch")
        .version(output::VERSION)
        .about("Jaynes-Cummings-Hubbard chain: bands, gap maps, mean-field and finite-chain data")
        .after_help(
            "Positional arguments are a command name or `key=value` pairs.\n\
             Precedence: defaults < --config file < key=value < --key flags.",
        )
        .arg(
            Arg::new("config")
                .short('c')
                .long("config")
                .value_name("FILE")
                .help("config file of `key = value` lines"),
        )
        .arg(
            Arg::new("args")
                .value_name("COMMAND | KEY=VALUE")
                .num_args(0..)
                .action(ArgAction::Append),
        );
    for spec in config::KEYS {
        cmd = cmd.arg(
            Arg::new(spec.key)
                .long(spec.key)
                .value_name("VALUE")
                .allow_hyphen_values(true)
                .help(format!("{} [default: {}]", spec.help, spec.default)),
        );
    }
    cmd
}

/// Resolve a configuration from command-line arguments (program name first).
pub fn parse_args<I, T>(args: I) -> Result<RunConfig, AppError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = cli().try_get_matches_from(args).map_err(|e| {
        if matches!(
            e.kind(),
            clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
        ) {
            e.exit();
        }
        AppError::Usage(e.to_string())
    })?;
    assignments_from(&matches)?.resolve().map_err(AppError::from)
}

fn assignments_from(m: &ArgMatches) -> Result<Assignments, AppError> {
    let mut a = Assignments::default();
    if let Some(path) = m.get_one::<String>("config") {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path.as_str(), e))?;
        a.read_file(path, &text)?;
    }
    for arg in m.get_many::<String>("args").into_iter().flatten() {
        if arg.contains('=') {
            a.read_argument(arg)?;
        } else {
            a.set("command", arg, Origin::Argument(arg.clone()))?;
        }
    }
    for spec in config::KEYS {
        if let Some(v) = m.get_one::<String>(spec.key) {
            a.set(spec.key, v, Origin::Flag(spec.key.to_string()))?;
        }
    }
    Ok(a)
}

/// Rendered output of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub bytes: Vec<u8>,
    /// Set when `verify` found failing criteria.
    pub failed: Option<String>,
}

/// Run the configured command on a worker pool of `config.threads` threads.
pub fn execute(config: &RunConfig) -> Result<Outcome, AppError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| AppError::Usage(format!("cannot start worker pool: {e}")))?;
    let (table, failed) = pool.install(|| commands::run(config))?;
    let bytes = output::render(&table, config).map_err(|e| AppError::io("<render>", e))?;
    Ok(Outcome { bytes, failed })
}

fn write_output(path: Option<&PathBuf>, bytes: &[u8]) -> Result<(), AppError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|e| AppError::io(p.display().to_string(), e)),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|()| out.flush())
                .map_err(|e| AppError::io("<stdout>", e))
        }
    }
}

/// Full CLI: parse, run, write. Returns the process exit status.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let result = parse_args(args).and_then(|config| {
        let outcome = execute(&config)?;
        write_output(config.output.as_ref(), &outcome.bytes)?;
        match outcome.failed {
            Some(what) => Err(AppError::Verification(what)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("jch: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_arguments() {
        let c = parse_args(["jch", "phase", "kappa=0.02", "--kappa", "0.03"]).unwrap();
        assert_eq!(c.command, Command::Phase);
        assert_eq!(c.kappa, 0.03);
    }

    #[test]
    fn negative_flag_values_are_values() {
        let err = parse_args(["jch", "--kappa", "-1"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("flag --kappa"), "{err}");
    }

    #[test]
    fn bare_word_must_be_a_command() {
        let err = parse_args(["jch", "bands"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn exit_codes_are_distinct() {
        let codes = [
            AppError::io("x", std::io::Error::other("x")).exit_code(),
            AppError::Usage(String::new()).exit_code(),
            AppError::Numerical(jch_core::Error::AxisMismatch).exit_code(),
            AppError::Verification(String::new()).exit_code(),
        ];
        assert_eq!(codes, [1, 2, 3, 4]);
    }
}
