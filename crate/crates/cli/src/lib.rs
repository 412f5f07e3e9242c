//! Text front end for regulus: the `.rlog` program language, command
//! dispatch and Graphviz output.

pub mod ast;
pub mod commands;
pub mod dot;
pub mod error;
pub mod parser;
pub mod workspace;

pub use ast::Program;
pub use commands::{Cli, Command, Format, Outcome, Runner};
pub use error::CliError;
pub use workspace::{parse, Workspace};

/// Seed for randomized test generation: `REGULUS_SEED` when set, otherwise
/// `default`.
pub fn seed_from_env(default: u64) -> u64 {
    std::env::var("REGULUS_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(default)
}

/// Parses the command line, reads the program and runs the command.
/// Errors map to exit code 2.
pub fn main_with_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            return Outcome {
                text: e.to_string(),
                code,
            };
        }
    };
    match run_cli(&cli) {
        Ok(out) => out,
        Err(e) => Outcome {
            text: format!("error: {e}\n"),
            code: 2,
        },
    }
}

pub fn run_cli(cli: &Cli) -> Result<Outcome, CliError> {
    let path = cli.command.file();
    let src = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })?;
    let ws = Workspace::load(&src)?;
    Runner {
        ws: &ws,
        model: cli.model.as_deref(),
        format: cli.format,
        max_enum: cli.max_enum,
    }
    .run(&cli.command)
}
