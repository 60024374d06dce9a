//! Per-list score normalization.
//!
//! Every normalizer maps a [`RankedList`] to a list over the same labels in
//! the same order. Rank and Borda use canonical positions only; the others
//! rescale the raw scores.

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::types::RankedList;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NormStrategy {
    MinMax,
    Max,
    Sum,
    Zmuv,
    Rank,
    Borda,
}

impl NormStrategy {
    pub const ALL: [NormStrategy; 6] = [
        NormStrategy::MinMax,
        NormStrategy::Max,
        NormStrategy::Sum,
        NormStrategy::Zmuv,
        NormStrategy::Rank,
        NormStrategy::Borda,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Self::MinMax => "min-max",
            Self::Max => "max",
            Self::Sum => "sum",
            Self::Zmuv => "zmuv",
            Self::Rank => "rank",
            Self::Borda => "borda",
        }
    }

    /// Name used in report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            Self::MinMax => "Min-Max Norm",
            Self::Max => "Max Norm",
            Self::Sum => "Sum Norm",
            Self::Zmuv => "ZMUV Norm",
            Self::Rank => "Rank Norm",
            Self::Borda => "Borda Norm",
        }
    }

    pub fn apply(self, list: &RankedList) -> Result<RankedList> {
        match self {
            Self::MinMax => norm_min_max(list),
            Self::Max => norm_max(list),
            Self::Sum => norm_sum(list),
            Self::Zmuv => norm_zmuv(list),
            Self::Rank => norm_rank(list),
            Self::Borda => norm_borda(list),
        }
    }
}

impl fmt::Display for NormStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for NormStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|n| n.token() == s)
            .ok_or_else(|| Error::UnknownToken { kind: "normalization", token: s.to_string() })
    }
}

/// Parses a normalization token, where `none` means no normalization.
pub fn parse_normalization(token: &str) -> Result<Option<NormStrategy>> {
    if token == "none" {
        Ok(None)
    } else {
        token.parse().map(Some)
    }
}

pub fn normalization_token(norm: Option<NormStrategy>) -> &'static str {
    norm.map_or("none", NormStrategy::token)
}

pub fn normalization_display_name(norm: Option<NormStrategy>) -> &'static str {
    norm.map_or("No Norm", NormStrategy::display_name)
}

/// Applies `norm` if given, otherwise returns a copy.
pub fn normalize(list: &RankedList, norm: Option<NormStrategy>) -> Result<RankedList> {
    match norm {
        Some(n) => n.apply(list),
        None => Ok(list.clone()),
    }
}

fn non_empty(list: &RankedList) -> Result<()> {
    if list.is_empty() {
        Err(Error::EmptyList)
    } else {
        Ok(())
    }
}

fn min_max_of(list: &RankedList) -> (f64, f64) {
    list.scores().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s), hi.max(s)))
}

/// `(s - min) / (max - min)`; all 1.0 when every score is equal.
pub fn norm_min_max(list: &RankedList) -> Result<RankedList> {
    non_empty(list)?;
    let (lo, hi) = min_max_of(list);
    let range = hi - lo;
    if range == 0.0 {
        return Ok(list.with_scores(list.scores().map(|_| 1.0)));
    }
    Ok(list.with_scores(list.scores().map(|s| (s - lo) / range)))
}

/// `s / max`; unchanged when the maximum is zero.
///
/// An all-negative list is divided by `|max|` instead, which keeps the
/// order and maps the maximum to -1.
pub fn norm_max(list: &RankedList) -> Result<RankedList> {
    non_empty(list)?;
    let (_, hi) = min_max_of(list);
    let scale = hi.abs();
    if scale == 0.0 {
        return Ok(list.clone());
    }
    Ok(list.with_scores(list.scores().map(|s| s / scale)))
}

/// Shift so the minimum is 0, then divide by the total. Uniform `1/N` when
/// every score is equal.
pub fn norm_sum(list: &RankedList) -> Result<RankedList> {
    non_empty(list)?;
    let (lo, _) = min_max_of(list);
    let total: f64 = list.scores().map(|s| s - lo).sum();
    if total == 0.0 {
        let n = list.len() as f64;
        return Ok(list.with_scores(list.scores().map(|_| 1.0 / n)));
    }
    Ok(list.with_scores(list.scores().map(|s| (s - lo) / total)))
}

/// Zero mean, unit variance using the population standard deviation.
/// All 0.0 when the variance is zero.
pub fn norm_zmuv(list: &RankedList) -> Result<RankedList> {
    non_empty(list)?;
    let n = list.len() as f64;
    let mean = list.scores().sum::<f64>() / n;
    let var = list.scores().map(|s| (s - mean) * (s - mean)).sum::<f64>() / n;
    let sd = libm::sqrt(var);
    if sd == 0.0 {
        return Ok(list.with_scores(list.scores().map(|_| 0.0)));
    }
    Ok(list.with_scores(list.scores().map(|s| (s - mean) / sd)))
}

/// `(N - i + 1) / N` for canonical rank `i`.
pub fn norm_rank(list: &RankedList) -> Result<RankedList> {
    non_empty(list)?;
    let n = list.len();
    let scores: Vec<f64> = (1..=n).map(|i| (n - i + 1) as f64 / n as f64).collect();
    Ok(list.with_scores(scores))
}

/// `(N - i) / (N - 1)` for canonical rank `i`; a lone entry gets 1.0.
pub fn norm_borda(list: &RankedList) -> Result<RankedList> {
    non_empty(list)?;
    let n = list.len();
    if n == 1 {
        return Ok(list.with_scores([1.0]));
    }
    let scores: Vec<f64> = (1..=n).map(|i| (n - i) as f64 / (n - 1) as f64).collect();
    Ok(list.with_scores(scores))
}
