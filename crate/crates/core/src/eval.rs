//! Head/tail label partitioning, Precision@k and nDCG@k, and fold
//! aggregation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::fuse::FusionMethod;
use crate::normalize::NormStrategy;
use crate::types::{DatasetStats, Qrels, RankedList, Run};
use crate::{Error, Result};

/// Which labels a metric looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PartitionView {
    Tail,
    Head,
    All,
}

impl PartitionView {
    pub fn token(self) -> &'static str {
        match self {
            Self::Tail => "tail",
            Self::Head => "head",
            Self::All => "all",
        }
    }
}

impl fmt::Display for PartitionView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for PartitionView {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tail" => Ok(Self::Tail),
            "head" => Ok(Self::Head),
            "all" => Ok(Self::All),
            _ => Err(Error::UnknownToken { kind: "partition view", token: s.to_string() }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Ndcg,
    Precision,
}

impl Metric {
    pub fn token(self) -> &'static str {
        match self {
            Self::Ndcg => "ndcg",
            Self::Precision => "p",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ndcg" => Ok(Self::Ndcg),
            "p" => Ok(Self::Precision),
            _ => Err(Error::UnknownToken { kind: "metric", token: s.to_string() }),
        }
    }
}

/// A metric at a cutoff, restricted to a partition view.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MetricSpec {
    pub metric: Metric,
    pub k: usize,
    pub view: PartitionView,
}

impl MetricSpec {
    pub fn new(metric: Metric, k: usize, view: PartitionView) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidCutoff);
        }
        Ok(Self { metric, k, view })
    }

    /// `p@K` or `ndcg@K`.
    pub fn metric_token(&self) -> String {
        format!("{}@{}", self.metric.token(), self.k)
    }
}

/// Parses `p@K` / `ndcg@K` into a metric and cutoff.
pub fn parse_metric_token(s: &str) -> Result<(Metric, usize)> {
    let unknown = || Error::UnknownToken { kind: "metric", token: s.to_string() };
    let (name, k) = s.split_once('@').ok_or_else(unknown)?;
    let metric = name.parse().map_err(|_| unknown())?;
    let k: usize = k.parse().map_err(|_| unknown())?;
    if k == 0 {
        return Err(Error::InvalidCutoff);
    }
    Ok((metric, k))
}

/// Head/tail split of a label space by training frequency.
///
/// The `ceil(L / 5)` most frequent labels are head labels, the rest tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelPartition {
    pub frequencies: BTreeMap<String, u64>,
    pub head: BTreeSet<String>,
    pub tail: BTreeSet<String>,
    pub threshold_h: usize,
}

impl LabelPartition {
    pub fn contains(&self, view: PartitionView, label: &str) -> bool {
        match view {
            PartitionView::Head => self.head.contains(label),
            PartitionView::Tail => self.tail.contains(label),
            PartitionView::All => true,
        }
    }

    pub fn n_labels(&self) -> usize {
        self.frequencies.len()
    }
}

/// Sorts labels by (frequency descending, label ascending) and marks the
/// first `ceil(0.2 * L)` as head.
pub fn partition_labels(frequencies: &BTreeMap<String, u64>) -> Result<LabelPartition> {
    if frequencies.is_empty() {
        return Err(Error::EmptyLabelSpace);
    }
    let mut order: Vec<(&String, u64)> = frequencies.iter().map(|(l, &c)| (l, c)).collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let threshold_h = frequencies.len().div_ceil(5);
    let head = order[..threshold_h].iter().map(|(l, _)| (*l).clone()).collect();
    let tail = order[threshold_h..].iter().map(|(l, _)| (*l).clone()).collect();
    Ok(LabelPartition { frequencies: frequencies.clone(), head, tail, threshold_h })
}

/// Fraction of the top `k` that is relevant. The denominator is always `k`.
pub fn precision_at_k(ranked: &RankedList, gold: &BTreeSet<&str>, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidCutoff);
    }
    let hits = ranked.labels().take(k).filter(|l| gold.contains(l)).count();
    Ok(hits as f64 / k as f64)
}

fn discount(rank: usize) -> f64 {
    1.0 / libm::log2(rank as f64 + 1.0)
}

/// Binary-gain nDCG with a `log2(rank + 1)` discount, normalized by the DCG
/// of `min(k, |gold|)` leading relevant labels.
pub fn ndcg_at_k(ranked: &RankedList, gold: &BTreeSet<&str>, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidCutoff);
    }
    if gold.is_empty() {
        return Err(Error::EmptyGold);
    }
    let dcg: f64 = ranked
        .labels()
        .take(k)
        .enumerate()
        .filter(|(_, l)| gold.contains(l))
        .map(|(i, _)| discount(i + 1))
        .sum();
    let ideal: f64 = (1..=k.min(gold.len())).map(discount).sum();
    Ok(dcg / ideal)
}

/// Mean of `spec` over the queries in `qrels`.
///
/// For the head and tail views both the gold set and the ranking are
/// restricted to that partition before scoring. Queries whose restricted
/// gold set is empty are skipped. A judged query with no ranking scores
/// against an empty list.
pub fn evaluate(
    run: &Run,
    qrels: &Qrels,
    partition: &LabelPartition,
    spec: &MetricSpec,
) -> Result<f64> {
    if spec.k == 0 {
        return Err(Error::InvalidCutoff);
    }
    let mut total = 0.0;
    let mut counted = 0usize;
    for query in qrels.query_ids() {
        let gold: BTreeSet<&str> = qrels
            .relevant(query)
            .into_iter()
            .filter(|l| partition.contains(spec.view, l))
            .collect();
        if gold.is_empty() {
            continue;
        }
        let restricted = match run.get(query) {
            Some(list) if spec.view == PartitionView::All => list.clone(),
            Some(list) => list.retain_labels(|l| partition.contains(spec.view, l)),
            None => RankedList::empty(query),
        };
        total += match spec.metric {
            Metric::Precision => precision_at_k(&restricted, &gold, spec.k)?,
            Metric::Ndcg => ndcg_at_k(&restricted, &gold, spec.k)?,
        };
        counted += 1;
    }
    if counted == 0 {
        return Err(Error::NoEvaluableQueries);
    }
    Ok(total / counted as f64)
}

/// Across-fold summary of one metric.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldSummary {
    pub mean: f64,
    /// Sample standard deviation (divides by n - 1).
    pub std: f64,
    pub fold_values: Vec<f64>,
}

impl FoldSummary {
    /// `M(S)` with both numbers scaled by 100 and shown to one decimal.
    pub fn cell(&self) -> String {
        render_cell(self.mean, self.std)
    }
}

pub fn render_cell(mean: f64, std: f64) -> String {
    // + 0.0 turns a negative zero into a positive one
    format!("{:.1}({:.1})", 100.0 * mean + 0.0, 100.0 * std + 0.0)
}

pub fn aggregate_folds(fold_values: &[f64]) -> Result<FoldSummary> {
    let n = fold_values.len();
    if n < 2 {
        return Err(Error::TooFewFolds(n));
    }
    let mean = fold_values.iter().sum::<f64>() / n as f64;
    let ss: f64 = fold_values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let std = libm::sqrt(ss / (n - 1) as f64);
    Ok(FoldSummary { mean, std, fold_values: fold_values.to_vec() })
}

/// Identifies one cell of a results grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellKey {
    pub normalization: Option<NormStrategy>,
    pub method: FusionMethod,
    pub metric: Metric,
    pub view: PartitionView,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalReport {
    pub cells: BTreeMap<CellKey, FoldSummary>,
}

impl EvalReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, key: CellKey, summary: FoldSummary) {
        self.cells.insert(key, summary);
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

/// Dataset statistics for judged queries over a partitioned label space.
pub fn dataset_stats(qrels: &Qrels, partition: &LabelPartition) -> DatasetStats {
    let n_instances = qrels.len();
    let n_labels = partition.n_labels();
    let (mut head, mut tail, mut pairs) = (0usize, 0usize, 0usize);
    for query in qrels.query_ids() {
        for label in qrels.relevant(query) {
            pairs += 1;
            if partition.head.contains(label) {
                head += 1;
            } else if partition.tail.contains(label) {
                tail += 1;
            }
        }
    }
    let per = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    DatasetStats {
        n_instances,
        n_labels,
        avg_tail_relevant: per(tail, n_instances),
        avg_head_relevant: per(head, n_instances),
        avg_instances_per_label: per(pairs, n_labels),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ranked(labels: &[&str]) -> RankedList {
        let n = labels.len();
        RankedList::new("q", labels.iter().enumerate().map(|(i, l)| (*l, (n - i) as f64))).unwrap()
    }

    fn gold<'a>(labels: &[&'a str]) -> BTreeSet<&'a str> {
        labels.iter().copied().collect()
    }

    fn freqs(pairs: &[(&str, u64)]) -> BTreeMap<String, u64> {
        pairs.iter().map(|(l, c)| (l.to_string(), *c)).collect()
    }

    #[test]
    fn partition_examples() {
        let mut f = freqs(&[("l1", 100), ("l2", 50)]);
        for i in 3..=10 {
            f.insert(format!("l{i}"), 1);
        }
        let p = partition_labels(&f).unwrap();
        assert_eq!(p.head, ["l1", "l2"].iter().map(|s| s.to_string()).collect());
        assert_eq!(p.tail.len(), 8);

        let five = freqs(&[("a", 5), ("b", 4), ("c", 3), ("d", 2), ("e", 1)]);
        assert_eq!(partition_labels(&five).unwrap().head.len(), 1);

        let flat: BTreeMap<String, u64> = (0..10).map(|i| (format!("x{i}"), 7)).collect();
        let p = partition_labels(&flat).unwrap();
        assert_eq!(p.head, ["x0", "x1"].iter().map(|s| s.to_string()).collect());

        assert_eq!(partition_labels(&BTreeMap::new()), Err(Error::EmptyLabelSpace));
    }

    #[test]
    fn head_size_uses_ceiling() {
        for (n, want) in [(1, 1), (4, 1), (5, 1), (6, 2), (15, 3), (16, 4), (100, 20)] {
            let f: BTreeMap<String, u64> = (0..n).map(|i| (format!("{i:03}"), i as u64)).collect();
            assert_eq!(partition_labels(&f).unwrap().threshold_h, want, "L={n}");
        }
    }

    #[test]
    fn precision_examples() {
        let p = precision_at_k(&ranked(&["a", "x", "b", "y", "z"]), &gold(&["a", "b"]), 5).unwrap();
        assert!((p - 0.4).abs() < 1e-12);
        assert_eq!(precision_at_k(&ranked(&["a", "b"]), &gold(&["a", "b", "c"]), 2).unwrap(), 1.0);
        assert_eq!(precision_at_k(&ranked(&["a", "b"]), &gold(&[]), 2).unwrap(), 0.0);
        assert_eq!(precision_at_k(&ranked(&["a"]), &gold(&["a"]), 5).unwrap(), 0.2);
        assert_eq!(precision_at_k(&RankedList::empty("q"), &gold(&["a"]), 1).unwrap(), 0.0);
        assert_eq!(precision_at_k(&ranked(&["a"]), &gold(&["a"]), 0), Err(Error::InvalidCutoff));
    }

    #[test]
    fn ndcg_examples() {
        let v = ndcg_at_k(&ranked(&["a", "x", "b"]), &gold(&["a", "b"]), 3).unwrap();
        assert!((v - 0.9197).abs() < 1e-4, "{v}");
        assert_eq!(ndcg_at_k(&ranked(&["a", "b", "x"]), &gold(&["a", "b"]), 3).unwrap(), 1.0);
        assert_eq!(ndcg_at_k(&ranked(&["x", "y", "a"]), &gold(&["a"]), 2).unwrap(), 0.0);
        assert_eq!(ndcg_at_k(&ranked(&["a"]), &gold(&[]), 2), Err(Error::EmptyGold));
    }

    fn toy_partition() -> LabelPartition {
        // five labels: h is head, the rest tail
        partition_labels(&freqs(&[("h", 10), ("t1", 1), ("t2", 1), ("t3", 1), ("t4", 1)])).unwrap()
    }

    #[test]
    fn evaluate_single_query_hit() {
        let run: Run =
            [RankedList::new("q1", [("h", 1.0), ("t1", 0.5)]).unwrap()].into_iter().collect();
        let qrels = Qrels::from_relevant([("q1", ["h"])]);
        let spec = MetricSpec::new(Metric::Precision, 1, PartitionView::All).unwrap();
        assert_eq!(evaluate(&run, &qrels, &toy_partition(), &spec).unwrap(), 1.0);
    }

    #[test]
    fn evaluate_averages_queries() {
        // q1: P@5 = 2/5, q2: P@5 = 3/5
        let run: Run = [
            RankedList::new("q1", [("h", 5.0), ("t1", 4.0)]).unwrap(),
            RankedList::new("q2", [("h", 5.0), ("t1", 4.0), ("t2", 3.0)]).unwrap(),
        ]
        .into_iter()
        .collect();
        let qrels = Qrels::from_relevant([("q1", vec!["h", "t1"]), ("q2", vec!["h", "t1", "t2"])]);
        let spec = MetricSpec::new(Metric::Precision, 5, PartitionView::All).unwrap();
        let v = evaluate(&run, &qrels, &toy_partition(), &spec).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn evaluate_restricts_view_and_skips_empty_gold() {
        let run: Run = [
            RankedList::new("q1", [("h", 5.0), ("t1", 4.0)]).unwrap(),
            RankedList::new("q2", [("h", 5.0), ("t2", 4.0)]).unwrap(),
        ]
        .into_iter()
        .collect();
        // q1's gold is head-only, so it is skipped under the tail view
        let qrels = Qrels::from_relevant([("q1", vec!["h"]), ("q2", vec!["t2"])]);
        let spec = MetricSpec::new(Metric::Precision, 1, PartitionView::Tail).unwrap();
        // q2 restricted to tail: [t2] so P@1 = 1
        assert_eq!(evaluate(&run, &qrels, &toy_partition(), &spec).unwrap(), 1.0);

        let all = MetricSpec::new(Metric::Precision, 1, PartitionView::All).unwrap();
        assert_eq!(evaluate(&run, &qrels, &toy_partition(), &all).unwrap(), 0.5);

        let unknown = Qrels::from_relevant([("q1", ["zzz"])]);
        assert_eq!(
            evaluate(&run, &unknown, &toy_partition(), &spec),
            Err(Error::NoEvaluableQueries)
        );
    }

    #[test]
    fn evaluate_missing_ranking_scores_zero() {
        let run = Run::new("empty");
        let qrels = Qrels::from_relevant([("q1", ["h"])]);
        let spec = MetricSpec::new(Metric::Ndcg, 5, PartitionView::All).unwrap();
        assert_eq!(evaluate(&run, &qrels, &toy_partition(), &spec).unwrap(), 0.0);
    }

    #[test]
    fn aggregate_examples() {
        let s = aggregate_folds(&[0.501, 0.498, 0.505, 0.500, 0.502]).unwrap();
        assert!((s.mean - 0.5012).abs() < 1e-12);
        assert!((s.std - 0.002588435821108959).abs() < 1e-12);
        assert_eq!(s.cell(), "50.1(0.3)");
        assert_eq!(aggregate_folds(&[0.5; 5]).unwrap().cell(), "50.0(0.0)");
        assert_eq!(render_cell(0.515, 0.017), "51.5(1.7)");
        assert_eq!(aggregate_folds(&[0.5]), Err(Error::TooFewFolds(1)));
    }

    #[test]
    fn metric_tokens() {
        assert_eq!(parse_metric_token("p@5").unwrap(), (Metric::Precision, 5));
        assert_eq!(parse_metric_token("ndcg@10").unwrap(), (Metric::Ndcg, 10));
        assert!(parse_metric_token("map@10").is_err());
        assert!(parse_metric_token("ndcg").is_err());
        assert_eq!(parse_metric_token("p@0"), Err(Error::InvalidCutoff));
        let spec = MetricSpec::new(Metric::Ndcg, 3, PartitionView::Head).unwrap();
        assert_eq!(spec.metric_token(), "ndcg@3");
        assert_eq!("tail".parse::<PartitionView>().unwrap(), PartitionView::Tail);
    }

    #[test]
    fn stats_of_toy_dataset() {
        let qrels = Qrels::from_relevant([("q1", vec!["h", "t1"]), ("q2", vec!["h"])]);
        let s = dataset_stats(&qrels, &toy_partition());
        assert_eq!(s.n_instances, 2);
        assert_eq!(s.n_labels, 5);
        assert_eq!(s.avg_head_relevant, 1.0);
        assert_eq!(s.avg_tail_relevant, 0.5);
        assert!((s.avg_instances_per_label - 0.6).abs() < 1e-12);
    }
}
