use std::path::PathBuf;

use thiserror::Error;

use nl2sql_forge::decoding::{DecodeError, VocabError};
use nl2sql_forge::exec::ExecError;
use nl2sql_forge::feedback::FeedbackError;
use nl2sql_forge::quality::QualityError;
use nl2sql_forge::ted::{CostError, TedError};
use nl2sql_forge::telemetry::TelemetryError;
use nl2sql_forge::templates::TemplateError;
use nl2sql_forge::ParseError;

/// Everything that ends a run with exit code 1.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Vocab(#[from] VocabError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Costs(#[from] CostError),
    #[error(transparent)]
    Ted(#[from] TedError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Quality(#[from] QualityError),
    #[error(transparent)]
    Feedback(#[from] FeedbackError),
    #[error(transparent)]
    Telemetry(#[from] TelemetryError),
}

impl CliError {
    /// Stable machine-readable category for the error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Json { .. } => "json",
            CliError::Csv { .. } => "csv",
            CliError::Input(_) => "input",
            CliError::Parse(_) => "parse",
            CliError::Vocab(_) => "vocab",
            CliError::Decode(_) => "decode",
            CliError::Costs(_) => "costs",
            CliError::Ted(_) => "ted",
            CliError::Exec(_) => "exec",
            CliError::Template(_) => "template",
            CliError::Quality(_) => "quality",
            CliError::Feedback(_) => "feedback",
            CliError::Telemetry(_) => "telemetry",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.kind(), "message": self.to_string() }).to_string()
    }
}
