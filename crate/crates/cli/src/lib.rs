//! Front end for the `sunstar` binary: config ingestion, command dispatch and rendering.

pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{run_command, Command, Outcome, Suite};
pub use config::{read_config, ConfigFile, OutputFormat, Session, StarSelector};

#[derive(Debug, Parser)]
#[command(name = "sunstar", version, about = "Exact star-products and sun-products on polynomial algebras")]
pub struct Cli {
    /// Config JSON file, or `-` for stdin.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// `moyal`, `gutt` or `twist:<file>`.
    #[arg(long, global = true)]
    pub star: Option<String>,
    /// Truncation order R in nu.
    #[arg(long, global = true)]
    pub order: Option<usize>,
    /// Maximal monomial degree D.
    #[arg(long, global = true)]
    pub degree: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Human)]
    pub format: OutputFormat,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Print f * g as a nu-series.
    StarMul {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
    },
    /// Print the sun-product of f and g.
    SunMul {
        #[arg(allow_hyphen_values = true)]
        f: String,
        #[arg(allow_hyphen_values = true)]
        g: String,
    },
    /// Print the sun-cochain table and reconstructed operators.
    Cochains,
    /// Report whether the product lies in E(P).
    InEp,
    /// Emit T with T-twisted product in E(P).
    EquivToEp,
    /// Emit S with S(f . g) = fg.
    WeakTrivializer,
    /// Run a named verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
    },
}

impl From<CliCommand> for Command {
    fn from(c: CliCommand) -> Self {
        match c {
            CliCommand::StarMul { f, g } => Command::StarMul { f, g },
            CliCommand::SunMul { f, g } => Command::SunMul { f, g },
            CliCommand::Cochains => Command::Cochains,
            CliCommand::InEp => Command::InEp,
            CliCommand::EquivToEp => Command::EquivToEp,
            CliCommand::WeakTrivializer => Command::WeakTrivializer,
            CliCommand::Verify { suite } => Command::Verify(suite),
        }
    }
}

/// Exit status and the text destined for stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

fn usage_error(msg: String) -> Rendered {
    Rendered { status: 2, stdout: String::new(), stderr: msg }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Rendered
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let status = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if status == 0 {
                Rendered { status, stdout: text, stderr: String::new() }
            } else {
                usage_error(text)
            };
        }
    };
    let Some(path) = &cli.config else {
        return usage_error("error: --config <path> is required\n".into());
    };
    let session = read_config(path).and_then(|cfg| {
        Session::new(&cfg, cli.star.as_deref(), cli.order, cli.degree, cli.format, cli.seed)
    });
    let session = match session {
        Ok(s) => s,
        Err(e) => return usage_error(format!("error: {e:#}\n")),
    };
    match run_command(&session, &cli.command.into()) {
        Ok(out) => {
            let mut stdout = match session.format {
                OutputFormat::Human => out.human,
                OutputFormat::Json => serde_json::to_string_pretty(&out.json).expect("JSON values serialize"),
            };
            stdout.push('\n');
            Rendered { status: out.status, stdout, stderr: String::new() }
        }
        Err(e) => usage_error(format!("error: {e:#}\n")),
    }
}
