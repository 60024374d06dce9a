//! Rankings, runs and relevance judgments.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::num::NonZeroUsize;

use crate::fuse::FusionMethod;
use crate::normalize::NormStrategy;
use crate::{Error, Result};

/// Output depth used when none is given: 64 head plus 64 tail candidates.
pub const DEFAULT_DEPTH: usize = 128;

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub label: String,
    pub score: f64,
}

/// Canonical ordering of scored labels: score descending, then label
/// ascending (bytewise).
pub fn canonical_cmp(a_label: &str, a_score: f64, b_label: &str, b_score: f64) -> Ordering {
    b_score
        .partial_cmp(&a_score)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a_label.as_bytes().cmp(b_label.as_bytes()))
}

/// One query's candidates from one system, in canonical order.
///
/// Labels are unique, scores are finite, and entries are sorted by score
/// descending with ties broken by label. The rank of an entry is its
/// 1-based position.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    query_id: String,
    entries: Vec<Entry>,
}

impl RankedList {
    pub fn new<Q, I, L>(query_id: Q, pairs: I) -> Result<Self>
    where
        Q: Into<String>,
        I: IntoIterator<Item = (L, f64)>,
        L: Into<String>,
    {
        let mut entries: Vec<Entry> =
            pairs.into_iter().map(|(label, score)| Entry { label: label.into(), score }).collect();
        if let Some(bad) = entries.iter().find(|e| !e.score.is_finite()) {
            return Err(Error::NonFiniteScore(bad.label.clone()));
        }
        let mut seen = BTreeSet::new();
        for e in &entries {
            if !seen.insert(e.label.as_str()) {
                return Err(Error::DuplicateLabel(e.label.clone()));
            }
        }
        entries.sort_by(|a, b| canonical_cmp(&a.label, a.score, &b.label, b.score));
        Ok(Self { query_id: query_id.into(), entries })
    }

    pub fn empty(query_id: impl Into<String>) -> Self {
        Self { query_id: query_id.into(), entries: Vec::new() }
    }

    /// Caller guarantees unique labels and the intended order.
    pub(crate) fn from_ordered(query_id: String, entries: Vec<Entry>) -> Self {
        Self { query_id, entries }
    }

    pub fn query_id(&self) -> &str {
        &self.query_id
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.label.as_str())
    }

    pub fn scores(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.score)
    }

    /// 1-based rank of `label`, if present.
    pub fn rank_of(&self, label: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.label == label).map(|i| i + 1)
    }

    /// Keeps the entries whose label passes `keep`, preserving order.
    pub fn retain_labels(&self, mut keep: impl FnMut(&str) -> bool) -> Self {
        let entries = self.entries.iter().filter(|e| keep(&e.label)).cloned().collect();
        Self { query_id: self.query_id.clone(), entries }
    }

    pub fn truncate(&mut self, depth: usize) {
        self.entries.truncate(depth);
    }

    /// Same labels in the same order with replacement scores.
    pub(crate) fn with_scores(&self, scores: impl IntoIterator<Item = f64>) -> Self {
        let entries = self
            .entries
            .iter()
            .zip(scores)
            .map(|(e, score)| Entry { label: e.label.clone(), score })
            .collect();
        Self { query_id: self.query_id.clone(), entries }
    }
}

/// A system's ranked lists keyed by query id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Run {
    pub system_tag: String,
    lists: BTreeMap<String, RankedList>,
}

impl Run {
    pub fn new(system_tag: impl Into<String>) -> Self {
        Self { system_tag: system_tag.into(), lists: BTreeMap::new() }
    }

    pub fn insert(&mut self, list: RankedList) -> Result<()> {
        if self.lists.contains_key(list.query_id()) {
            return Err(Error::DuplicateQuery(list.query_id.clone()));
        }
        self.lists.insert(list.query_id.clone(), list);
        Ok(())
    }

    pub fn get(&self, query_id: &str) -> Option<&RankedList> {
        self.lists.get(query_id)
    }

    /// Lists in ascending query-id order.
    pub fn lists(&self) -> impl Iterator<Item = &RankedList> {
        self.lists.values()
    }

    pub fn query_ids(&self) -> impl Iterator<Item = &str> {
        self.lists.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }
}

impl FromIterator<RankedList> for Run {
    /// Later lists for an already-seen query replace earlier ones.
    fn from_iter<T: IntoIterator<Item = RankedList>>(iter: T) -> Self {
        let mut run = Run::default();
        for list in iter {
            run.lists.insert(list.query_id.clone(), list);
        }
        run
    }
}

/// Relevance judgments: per query, a grade for each judged label.
///
/// Any nonzero grade counts as relevant. Zero-grade judgments are kept so
/// that a query can be present with an empty relevant set.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Qrels {
    judgments: BTreeMap<String, BTreeMap<String, u32>>,
}

impl Qrels {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, query_id: &str, label: &str, grade: u32) -> Result<()> {
        let labels = self.judgments.entry(query_id.into()).or_default();
        if labels.contains_key(label) {
            return Err(Error::DuplicateJudgment { query: query_id.into(), label: label.into() });
        }
        labels.insert(label.into(), grade);
        Ok(())
    }

    /// Builds binary judgments from relevant label sets.
    pub fn from_relevant<Q, L, I, J>(sets: I) -> Self
    where
        Q: Into<String>,
        L: Into<String>,
        I: IntoIterator<Item = (Q, J)>,
        J: IntoIterator<Item = L>,
    {
        let mut judgments = BTreeMap::new();
        for (query, labels) in sets {
            let grades: BTreeMap<String, u32> = labels.into_iter().map(|l| (l.into(), 1)).collect();
            judgments.insert(query.into(), grades);
        }
        Self { judgments }
    }

    pub fn query_ids(&self) -> impl Iterator<Item = &str> {
        self.judgments.keys().map(String::as_str)
    }

    pub fn contains_query(&self, query_id: &str) -> bool {
        self.judgments.contains_key(query_id)
    }

    /// Labels with a nonzero grade for `query_id` (empty when unjudged).
    pub fn relevant(&self, query_id: &str) -> BTreeSet<&str> {
        self.judgments
            .get(query_id)
            .map(|labels| labels.iter().filter(|(_, &g)| g > 0).map(|(l, _)| l.as_str()).collect())
            .unwrap_or_default()
    }

    /// Every judgment as (query, label, grade), in key order.
    pub fn judgments(&self) -> impl Iterator<Item = (&str, &str, u32)> {
        self.judgments
            .iter()
            .flat_map(|(q, labels)| labels.iter().map(move |(l, &g)| (q.as_str(), l.as_str(), g)))
    }

    pub fn len(&self) -> usize {
        self.judgments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.judgments.is_empty()
    }
}

/// Summary statistics of a multi-label dataset.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DatasetStats {
    /// Number of text instances (queries).
    pub n_instances: usize,
    /// Number of labels in the label space.
    pub n_labels: usize,
    /// Average number of relevant tail labels per instance.
    pub avg_tail_relevant: f64,
    /// Average number of relevant head labels per instance.
    pub avg_head_relevant: f64,
    /// Average number of instances per label.
    pub avg_instances_per_label: f64,
}

/// How to normalize each input list and which fusion method to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FusionConfig {
    /// `None` leaves scores untouched.
    pub normalization: Option<NormStrategy>,
    pub method: FusionMethod,
    pub depth: NonZeroUsize,
}

impl FusionConfig {
    pub fn new(
        normalization: Option<NormStrategy>,
        method: FusionMethod,
        depth: usize,
    ) -> Result<Self> {
        let depth = NonZeroUsize::new(depth).ok_or(Error::InvalidDepth)?;
        Ok(Self { normalization, method, depth })
    }

    pub fn with_default_depth(normalization: Option<NormStrategy>, method: FusionMethod) -> Self {
        Self { normalization, method, depth: NonZeroUsize::new(DEFAULT_DEPTH).unwrap() }
    }
}
