use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed scenario file. `line` is 0 when the position is unknown.
    #[error("{}: {}{}", path.display(), position(*line, *column, field), message)]
    Parse { path: PathBuf, line: usize, column: usize, field: String, message: String },

    /// A well-formed scenario that cannot be used as written.
    #[error("{field}: {message}")]
    Config { field: String, message: String },

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{0}")]
    Csv(String),

    #[error(transparent)]
    Core(#[from] fracdiff_core::Error),
}

fn position(line: usize, column: usize, field: &str) -> String {
    let mut s = String::new();
    if line > 0 {
        s.push_str(&format!("line {line}, column {column}: "));
    }
    if !field.is_empty() && field != "." {
        s.push_str(&format!("at `{field}`: "));
    }
    s
}

impl CliError {
    pub fn config(field: &str, message: &str) -> Self {
        CliError::Config { field: field.to_string(), message: message.to_string() }
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }
}
