//! Command line and HTTP front end for `clwork`.
//!
//! Every verb produces an [`Outcome`]: a text rendering, a JSON value and an
//! exit code. `--json` selects the JSON rendering. Exit codes: 0 success,
//! 1 a negative verdict, 2 an unknown verdict, 64 usage errors, 65 engine
//! errors.

mod commands;
mod play;
pub mod server;

use std::ffi::OsString;
use std::io::{BufRead, Write};

use clap::Parser;

pub use commands::{Cli, Command};

pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_ENGINE: i32 = 65;

/// The result of one verb.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
    pub json: serde_json::Value,
}

impl Outcome {
    fn ok(text: String, json: serde_json::Value) -> Outcome {
        Outcome { code: 0, text, json }
    }

    fn with_code(mut self, code: i32) -> Outcome {
        self.code = code;
        self
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable files, malformed flag values.
    Usage(String),
    /// The engine rejected the input.
    Engine(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Engine(_) => EXIT_ENGINE,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Engine(m) => m,
        }
    }
}

fn engine(e: impl std::fmt::Display) -> CliError {
    CliError::Engine(e.to_string())
}

/// Runs one command line. Interactive verbs read `input`.
pub fn run<I, T>(args: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let json = cli.json;
    match commands::dispatch(cli, input, out) {
        Ok(o) => {
            let text = if json {
                serde_json::to_string_pretty(&o.json).expect("json output serializes")
            } else {
                o.text.trim_end().to_string()
            };
            if !text.is_empty() {
                let _ = writeln!(out, "{text}");
            }
            o.code
        }
        Err(e) => {
            if json {
                let kind = if e.code() == EXIT_USAGE { "usage" } else { "engine" };
                let v = serde_json::json!({ "error": kind, "message": e.message() });
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("serializes"));
            }
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}
