use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A label occurs twice in one ranked list.
    DuplicateLabel(String),
    /// A score is NaN or infinite.
    NonFiniteScore(String),
    /// A run already holds a list for this query.
    DuplicateQuery(String),
    /// A (query, label) pair was judged twice.
    DuplicateJudgment {
        query: String,
        label: String,
    },
    EmptyList,
    NoLists,
    InvalidDepth,
    InvalidCutoff,
    EmptyLabelSpace,
    EmptyGold,
    /// Every partition-restricted gold set was empty.
    NoEvaluableQueries,
    TooFewFolds(usize),
    LengthMismatch {
        left: usize,
        right: usize,
    },
    TooFewPairs(usize),
    UnknownToken {
        kind: &'static str,
        token: String,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DuplicateLabel(label) => write!(f, "duplicate label `{label}`"),
            Self::NonFiniteScore(label) => write!(f, "non-finite score for label `{label}`"),
            Self::DuplicateQuery(query) => write!(f, "duplicate ranked list for query `{query}`"),
            Self::DuplicateJudgment { query, label } => {
                write!(f, "duplicate judgment for query `{query}`, label `{label}`")
            }
            Self::EmptyList => f.write_str("cannot normalize an empty list"),
            Self::NoLists => f.write_str("no ranked lists to fuse"),
            Self::InvalidDepth => f.write_str("depth must be at least 1"),
            Self::InvalidCutoff => f.write_str("cutoff k must be at least 1"),
            Self::EmptyLabelSpace => f.write_str("label space is empty"),
            Self::EmptyGold => f.write_str("gold label set is empty"),
            Self::NoEvaluableQueries => {
                f.write_str("no query has a non-empty gold set in the requested view")
            }
            Self::TooFewFolds(n) => write!(f, "need at least 2 fold values, got {n}"),
            Self::LengthMismatch { left, right } => {
                write!(f, "paired samples differ in length ({left} vs {right})")
            }
            Self::TooFewPairs(n) => write!(f, "need at least 2 pairs, got {n}"),
            Self::UnknownToken { kind, token } => write!(f, "unknown {kind} `{token}`"),
        }
    }
}

impl core::error::Error for Error {}
