use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed line: {reason}")]
    MalformedLine { line: usize, reason: String },

    #[error("line {line}: duplicate label `{label}`{}", query_suffix(.query))]
    DuplicateLabel { line: usize, query: Option<String>, label: String },

    #[error("line {line}: duplicate judgment for query `{query}`, label `{label}`")]
    DuplicateJudgment { line: usize, query: String, label: String },

    #[error("line {line}: system tag `{found}` differs from `{expected}`")]
    MixedSystemTags { line: usize, expected: String, found: String },

    #[error("line {line}: negative count for label `{label}`")]
    NegativeCount { line: usize, label: String },

    #[error("{}: {source}", .path.display())]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("missing fold artifact: {0}")]
    MissingFoldArtifact(String),

    #[error("report has no cells")]
    EmptyReport,

    #[error("malformed report: {0}")]
    MalformedReport(String),

    #[error(transparent)]
    Core(#[from] rankfuse_core::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn query_suffix(query: &Option<String>) -> String {
    query.as_ref().map(|q| format!(" in query `{q}`")).unwrap_or_default()
}

impl Error {
    pub(crate) fn in_file(self, path: impl Into<PathBuf>) -> Self {
        Error::InFile { path: path.into(), source: Box::new(self) }
    }

    /// The innermost error, skipping file context.
    pub fn root(&self) -> &Error {
        match self {
            Error::InFile { source, .. } => source.root(),
            other => other,
        }
    }
}
