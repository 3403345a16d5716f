mod commands;
mod config;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use almkit_core::asp::{AspParseError, TranslateError};
use almkit_core::ingest::IngestError;
use almkit_core::lexmap::LexError;
use almkit_core::reason::{Mode, ReasonError};
use almkit_core::restkb::TheoryError;
use almkit_core::sema::Diagnostics;
use almkit_core::solve::{GroundError, SolveError};
use almkit_core::syntax::ParseError;
use clap::{Parser, Subcommand};
use serde::Serialize;

use commands::{AskArgs, Format, Initial, Occurs, TranslateArgs};
use config::{FileConfig, Overrides, Settings};

const QUERY_HELP: &str = "\
Queries:
  Word form:  <type> <action-or-fluent> [key=value ...]
  Call form:  <type>(<arg>, ...)
  JSON form:  {\"query\": \"<type>\", ...}

  Types: yes_no, when, where, who, who_whom, what, goal, intended.
  The action may be an instance (e3), a script step (s_pay) or an action
  class (pay). Other key=value pairs filter by attribute, e.g. actor=nicole.
  `where`, `goal` and `intended` take person=<name>; `what` takes the
  function name, args=a,b and action=<action>.

Examples:
  almkit ask corpus/example1 --query \"yes_no pay actor=nicole\"
  almkit ask corpus/example1 --query \"who(e3)\"
  almkit ask corpus/example1 --query \"where s_seat person=Nicole\"
  almkit ask corpus/example1 --query \"what open args='a vegetarian restaurant' action=e1\"";

#[derive(Debug, Parser)]
#[command(name = "almkit", version, about = "Check, compile and solve ALM system descriptions, and reason about stories")]
struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Config file (default: ./almkit.toml if present).
    #[arg(long, global = true, env = "ALMKIT_CONFIG", value_name = "TOML")]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and check modules; without files, checks the configured library.
    Check { files: Vec<PathBuf> },
    /// Print the logic program for a system description.
    Translate {
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        horizon: u32,
        #[arg(long, value_enum, default_value_t = Initial::Closed)]
        initial: Initial,
        #[arg(long, value_enum, default_value_t = Occurs::Free)]
        occurrences: Occurs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the answer sets of a system description or of `.lp` files.
    Solve {
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = 1)]
        horizon: u32,
        #[arg(long, value_enum, default_value_t = Initial::Closed)]
        initial: Initial,
        #[arg(long, value_enum, default_value_t = Occurs::Free)]
        occurrences: Occurs,
        /// Use the built-in reference solver instead of the external one.
        #[arg(long)]
        reference: bool,
    },
    /// Print the logic form of an annotated story.
    Ingest { story: PathBuf },
    /// Answer questions about a story.
    #[command(after_help = QUERY_HELP)]
    Ask {
        story: PathBuf,
        #[arg(long = "query", short, required = true)]
        queries: Vec<String>,
        #[arg(long, default_value = "complete")]
        mode: Mode,
        /// Fixed number of time steps.
        #[arg(long)]
        horizon: Option<u32>,
        /// Actions assumed garbled by interference (comma separated).
        #[arg(long, value_delimiter = ',')]
        interfere: Vec<String>,
    },
    /// Explain a story that does not fit its script.
    Diagnose { story: PathBuf },
    /// Run every story in a corpus against its expected answers.
    Corpus {
        dir: PathBuf,
        /// Include per-story run times.
        #[arg(long)]
        timings: bool,
    },
    /// Look up a PropBank predicate, WordNet sense, VerbNet class or action class.
    Lex { key: String },
}

/// Exit status for failures already reported to the user.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Diagnostics = 2,
    Mismatch = 4,
}

impl fmt::Display for Exit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exit::Diagnostics => write!(f, "diagnostics reported"),
            Exit::Mismatch => write!(f, "corpus mismatch"),
        }
    }
}

impl std::error::Error for Exit {}

pub struct Output {
    pub json: bool,
}

impl Output {
    pub fn print_json<T: Serialize + ?Sized>(&self, v: &T) {
        println!("{}", serde_json::to_string_pretty(v).expect("serializable output"));
    }

    /// Errors that stop the command.
    pub fn diagnostics(&self, d: &Diagnostics) {
        if self.json {
            self.print_json(&serde_json::json!({ "ok": false, "diagnostics": d.0 }));
        } else {
            eprint!("{}", d.render_text());
        }
    }

    pub fn warn(&self, d: &Diagnostics) {
        eprint!("{}", d.render_text());
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if let Some(x) = cause.downcast_ref::<Exit>() {
            return *x as u8;
        }
        if let Some(r) = cause.downcast_ref::<ReasonError>() {
            return match r {
                ReasonError::Solve(_) | ReasonError::Inconsistent(_) | ReasonError::NoExplanation(_) => 3,
                ReasonError::Invalid(_)
                | ReasonError::Translate(_)
                | ReasonError::Ingest(_)
                | ReasonError::Script(_)
                | ReasonError::HorizonTooSmall { .. } => 2,
                _ => 1,
            };
        }
        if cause.is::<SolveError>() {
            return 3;
        }
        if cause.is::<TranslateError>()
            || cause.is::<IngestError>()
            || cause.is::<ParseError>()
            || cause.is::<AspParseError>()
            || cause.is::<GroundError>()
            || matches!(cause.downcast_ref::<LexError>(), Some(LexError::Table { .. } | LexError::Csv { .. }))
            || matches!(cause.downcast_ref::<TheoryError>(), Some(TheoryError::Parse(_)))
        {
            return 2;
        }
    }
    1
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let settings = Settings::merge(&cli.overrides, &file);
    let out = Output { json: cli.json };
    match cli.command {
        Command::Check { files } => commands::check(&settings, &files, &out),
        Command::Translate { files, horizon, initial, occurrences, format } => {
            commands::translate(&settings, &files, &TranslateArgs { horizon, initial, occurrences }, format, &out)
        }
        Command::Solve { files, horizon, initial, occurrences, reference } => {
            commands::solve(&settings, &files, &TranslateArgs { horizon, initial, occurrences }, reference, &out)
        }
        Command::Ingest { story } => commands::ingest(&settings, &story, &out),
        Command::Ask { story, queries, mode, horizon, interfere } => {
            commands::ask(&settings, &story, &AskArgs { queries, mode, horizon, interfere }, &out)
        }
        Command::Diagnose { story } => commands::run_diagnose(&settings, &story, &out),
        Command::Corpus { dir, timings } => commands::corpus(&settings, &dir, timings, &out),
        Command::Lex { key } => commands::lex(&settings, &key, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !e.is::<Exit>() {
                eprintln!("error: {:#}", e);
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
