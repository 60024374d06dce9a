//! Fusion of several ranked lists for one query.
//!
//! Score-based methods (CombMIN, CombMAX, CombMED, CombSUM, CombANZ,
//! CombMNZ) aggregate the scores a label received from the lists that
//! contain it. A list that does not contain a label contributes nothing to
//! it, not an implicit zero. Rank-based (ISR, LogISR) and voting-based
//! (BordaFuse, Condorcet) methods look only at canonical positions.
//!
//! Per-label contributions are sorted before they are combined, so the
//! output does not depend on the order of the input lists. Fused scores
//! are ordered like any [`RankedList`]: score descending, label ascending.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::normalize::normalize;
use crate::types::{canonical_cmp, Entry, FusionConfig, RankedList};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FusionMethod {
    CombMin,
    CombMax,
    CombMed,
    CombSum,
    CombAnz,
    CombMnz,
    Isr,
    LogIsr,
    BordaFuse,
    Condorcet,
}

impl FusionMethod {
    pub const ALL: [FusionMethod; 10] = [
        FusionMethod::CombMin,
        FusionMethod::CombMax,
        FusionMethod::CombMed,
        FusionMethod::CombSum,
        FusionMethod::CombAnz,
        FusionMethod::CombMnz,
        FusionMethod::Isr,
        FusionMethod::LogIsr,
        FusionMethod::BordaFuse,
        FusionMethod::Condorcet,
    ];

    pub fn token(self) -> &'static str {
        match self {
            Self::CombMin => "combmin",
            Self::CombMax => "combmax",
            Self::CombMed => "combmed",
            Self::CombSum => "combsum",
            Self::CombAnz => "combanz",
            Self::CombMnz => "combmnz",
            Self::Isr => "isr",
            Self::LogIsr => "logisr",
            Self::BordaFuse => "bordafuse",
            Self::Condorcet => "condorcet",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Self::CombMin => "CombMIN",
            Self::CombMax => "CombMAX",
            Self::CombMed => "CombMED",
            Self::CombSum => "CombSUM",
            Self::CombAnz => "CombANZ",
            Self::CombMnz => "CombMNZ",
            Self::Isr => "ISR",
            Self::LogIsr => "Log_ISR",
            Self::BordaFuse => "BordaFuse",
            Self::Condorcet => "Condorcet",
        }
    }

    /// True for methods that ignore score values.
    pub fn is_rank_only(self) -> bool {
        matches!(self, Self::Isr | Self::LogIsr | Self::BordaFuse | Self::Condorcet)
    }

    pub fn apply(self, lists: &[RankedList], depth: usize) -> Result<FusedList> {
        match self {
            Self::CombMin => comb_min(lists, depth),
            Self::CombMax => comb_max(lists, depth),
            Self::CombMed => comb_med(lists, depth),
            Self::CombSum => comb_sum(lists, depth),
            Self::CombAnz => comb_anz(lists, depth),
            Self::CombMnz => comb_mnz(lists, depth),
            Self::Isr => isr(lists, depth),
            Self::LogIsr => log_isr(lists, depth),
            Self::BordaFuse => borda_fuse(lists, depth),
            Self::Condorcet => condorcet(lists, depth),
        }
    }
}

impl fmt::Display for FusionMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for FusionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.token() == s)
            .ok_or_else(|| Error::UnknownToken { kind: "fusion method", token: s.to_string() })
    }
}

/// A fused ranking plus, for each kept label, the number of input lists
/// that contained it.
#[derive(Debug, Clone, PartialEq)]
pub struct FusedList {
    pub list: RankedList,
    pub presence: BTreeMap<String, usize>,
}

/// Normalizes every list per `config`, fuses them with `config.method`,
/// and truncates to `config.depth`.
///
/// Empty input lists are dropped before normalization; they cannot
/// contribute to any method.
pub fn fuse(lists: &[RankedList], config: &FusionConfig) -> Result<FusedList> {
    if lists.is_empty() {
        return Err(Error::NoLists);
    }
    let normalized = lists
        .iter()
        .filter(|l| !l.is_empty())
        .map(|l| normalize(l, config.normalization))
        .collect::<Result<Vec<_>>>()?;
    if normalized.is_empty() {
        return Ok(FusedList {
            list: RankedList::empty(lists[0].query_id()),
            presence: BTreeMap::new(),
        });
    }
    config.method.apply(&normalized, config.depth.get())
}

struct Hit {
    rank: usize,
    list_len: usize,
    score: f64,
}

fn check(lists: &[RankedList], depth: usize) -> Result<()> {
    if lists.is_empty() {
        return Err(Error::NoLists);
    }
    if depth == 0 {
        return Err(Error::InvalidDepth);
    }
    Ok(())
}

fn gather(lists: &[RankedList]) -> BTreeMap<&str, Vec<Hit>> {
    let mut hits: BTreeMap<&str, Vec<Hit>> = BTreeMap::new();
    for list in lists {
        for (i, e) in list.entries().iter().enumerate() {
            hits.entry(e.label.as_str()).or_default().push(Hit {
                rank: i + 1,
                list_len: list.len(),
                score: e.score,
            });
        }
    }
    hits
}

fn sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(f64::total_cmp);
    v
}

fn finish(
    lists: &[RankedList],
    scored: impl Iterator<Item = (String, f64, usize)>,
    depth: usize,
) -> FusedList {
    let mut rows: Vec<(String, f64, usize)> = scored.collect();
    rows.sort_by(|a, b| canonical_cmp(&a.0, a.1, &b.0, b.1));
    rows.truncate(depth);
    let presence = rows.iter().map(|(l, _, n)| (l.clone(), *n)).collect();
    let entries = rows.into_iter().map(|(label, score, _)| Entry { label, score }).collect();
    FusedList { list: RankedList::from_ordered(lists[0].query_id().into(), entries), presence }
}

/// Combines each label's sorted contributions with `combine`.
fn score_based(
    lists: &[RankedList],
    depth: usize,
    combine: impl Fn(&[f64]) -> f64,
) -> Result<FusedList> {
    check(lists, depth)?;
    let scored = gather(lists).into_iter().map(|(label, hits)| {
        let values = sorted(hits.iter().map(|h| h.score));
        (label.to_string(), combine(&values), hits.len())
    });
    Ok(finish(lists, scored, depth))
}

fn sum(values: &[f64]) -> f64 {
    values.iter().sum()
}

pub fn comb_min(lists: &[RankedList], depth: usize) -> Result<FusedList> {
    score_based(lists, depth, |v| v[0])
}

pub fn comb_max(lists: &[RankedList], depth: usize) -> Result<FusedList> {
    score_based(lists, depth, |v| v[v.len() - 1])
}

/// Median of the present scores; the mean of the middle two for an even count.
pub fn comb_med(lists: &[RankedList], depth: usize) -> Result<FusedList> {
    score_based(lists, depth, |v| {
        let mid = v.len() / 2;
        if v.len() % 2 == 1 {
            v[mid]
        } else {
            (v[mid - 1] + v[mid]) / 2.0
        }
    })
}

pub fn comb_sum(lists: &[RankedList], depth: usize) -> Result<FusedList> {
    score_based(lists, depth, sum)
}

/// CombSUM divided by the number of lists containing the label.
pub fn comb_anz(lists: &[RankedList], depth: usize) -> Result<FusedList> {
    score_based(lists, depth, |v| sum(v) / v.len() as f64)
}

/// CombSUM multiplied by the number of lists containing the label.
pub fn comb_mnz(lists: &[RankedList], depth: usize) -> Result<FusedList> {
    score_based(lists, depth, |v| sum(v) * v.len() as f64)
}

fn inverse_square_rank(
    lists: &[RankedList],
    depth: usize,
    weight: fn(usize) -> f64,
) -> Result<FusedList> {
    check(lists, depth)?;
    let scored = gather(lists).into_iter().map(|(label, hits)| {
        let terms = sorted(hits.iter().map(|h| {
            let r = h.rank as f64;
            1.0 / (r * r)
        }));
        (label.to_string(), weight(hits.len()) * sum(&terms), hits.len())
    });
    Ok(finish(lists, scored, depth))
}

/// `f * Σ 1/rank²`, where `f` is the number of lists containing the label.
pub fn isr(lists: &[RankedList], depth: usize) -> Result<FusedList> {
    inverse_square_rank(lists, depth, |f| f as f64)
}

/// `ln(1 + f) * Σ 1/rank²`, where `f` is the number of lists containing the label.
pub fn log_isr(lists: &[RankedList], depth: usize) -> Result<FusedList> {
    inverse_square_rank(lists, depth, |f| libm::log1p(f as f64))
}

/// Each list awards `N - rank` points to the labels it contains.
pub fn borda_fuse(lists: &[RankedList], depth: usize) -> Result<FusedList> {
    check(lists, depth)?;
    let scored = gather(lists).into_iter().map(|(label, hits)| {
        let points: usize = hits.iter().map(|h| h.list_len - h.rank).sum();
        (label.to_string(), points as f64, hits.len())
    });
    Ok(finish(lists, scored, depth))
}

/// Copeland scoring over pairwise majorities.
///
/// For every pair of labels in the union, each list votes for the label it
/// ranks higher; a label a list contains beats one it does not, and a list
/// containing neither abstains. The majority winner of a pair earns one
/// point; a tied vote gives half a point to each.
pub fn condorcet(lists: &[RankedList], depth: usize) -> Result<FusedList> {
    check(lists, depth)?;
    let hits = gather(lists);
    let labels: Vec<&str> = hits.keys().copied().collect();
    let index: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let n = labels.len();

    // positions[list][label] = 0-based rank, usize::MAX when absent
    let positions: Vec<Vec<usize>> = lists
        .iter()
        .map(|list| {
            let mut pos = vec![usize::MAX; n];
            for (rank, e) in list.entries().iter().enumerate() {
                pos[index[e.label.as_str()]] = rank;
            }
            pos
        })
        .collect();

    // Points are kept doubled so they stay integral.
    let mut doubled = vec![0u64; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let (mut for_i, mut for_j) = (0usize, 0usize);
            for pos in &positions {
                match pos[i].cmp(&pos[j]) {
                    core::cmp::Ordering::Less => for_i += 1,
                    core::cmp::Ordering::Greater => for_j += 1,
                    core::cmp::Ordering::Equal => {}
                }
            }
            match for_i.cmp(&for_j) {
                core::cmp::Ordering::Greater => doubled[i] += 2,
                core::cmp::Ordering::Less => doubled[j] += 2,
                core::cmp::Ordering::Equal => {
                    doubled[i] += 1;
                    doubled[j] += 1;
                }
            }
        }
    }

    let scored = labels
        .iter()
        .enumerate()
        .map(|(i, &label)| (label.to_string(), doubled[i] as f64 / 2.0, hits[label].len()));
    Ok(finish(lists, scored, depth))
}
