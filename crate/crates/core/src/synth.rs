//! Seeded synthetic benchmarks and brute-force oracles.
//!
//! Generators are pure functions of their [`SynthSpec`]; the random source
//! is ChaCha8, so fixtures are identical on every platform. The oracles
//! re-implement Condorcet fusion and the ranking metrics literally and share
//! no code with [`crate::fuse`] or [`crate::eval`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::eval::{partition_labels, LabelPartition};
use crate::types::{Qrels, RankedList, Run};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthSpec {
    pub n_labels: usize,
    pub n_queries: usize,
    pub zipf_exponent: f64,
    pub gold_per_query: usize,
    /// 0 ranks gold purely by construction, 1 makes scores independent of gold.
    pub noise: f64,
    pub seed: u64,
    /// Candidate list length per run and query.
    pub candidates_per_run: usize,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n_labels: 1000,
            n_queries: 200,
            zipf_exponent: 1.0,
            gold_per_query: 5,
            noise: 0.3,
            seed: 0,
            candidates_per_run: 32,
        }
    }
}

/// Labels, judgments and a complementary run pair, split into folds.
#[derive(Debug, Clone)]
pub struct SynthBenchmark {
    pub frequencies: BTreeMap<String, u64>,
    pub partition: LabelPartition,
    pub folds: Vec<SynthFold>,
}

#[derive(Debug, Clone)]
pub struct SynthFold {
    pub qrels: Qrels,
    /// Favors tail gold labels.
    pub sparse: Run,
    /// Favors head gold labels.
    pub dense: Run,
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn id(prefix: char, i: usize, n: usize) -> String {
    let width = n.max(1).to_string().len();
    format!("{prefix}{i:0width$}")
}

/// `max(1, round(top / r^s))` for ranks `r = 1..=n`.
pub fn zipf_counts(n: usize, exponent: f64, top: f64) -> Vec<u64> {
    (1..=n)
        .map(|r| {
            let c = libm::round(top / libm::pow(r as f64, exponent));
            (c as u64).max(1)
        })
        .collect()
}

/// Zipf-distributed label frequencies.
///
/// The counts sum to roughly `n_queries * gold_per_query`; the seed decides
/// which label id receives which Zipf rank.
pub fn gen_label_space(spec: &SynthSpec) -> BTreeMap<String, u64> {
    let n = spec.n_labels.max(1);
    let harmonic: f64 = (1..=n).map(|r| libm::pow(r as f64, -spec.zipf_exponent)).sum();
    let total = (spec.n_queries.max(1) * spec.gold_per_query.max(1)) as f64;
    let counts = zipf_counts(n, spec.zipf_exponent, total / harmonic);

    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(&mut rng(spec.seed, 0));
    labels.into_iter().zip(counts).map(|(l, c)| (id('L', l, n), c)).collect()
}

/// Gold label sets drawn without replacement, weighted by frequency.
pub fn gen_qrels(spec: &SynthSpec, frequencies: &BTreeMap<String, u64>) -> Qrels {
    let labels: Vec<&String> = frequencies.keys().collect();
    let weights: Vec<u64> = frequencies.values().map(|&c| c.max(1)).collect();
    let sampler = WeightedIndex::new(&weights).expect("non-empty label space");
    let per_query = spec.gold_per_query.max(1).min(labels.len());
    let mut rng = rng(spec.seed, 1);

    let n = spec.n_queries.max(1);
    let sets = (0..n).map(|q| {
        let mut gold = BTreeSet::new();
        while gold.len() < per_query {
            gold.insert(labels[sampler.sample(&mut rng)].as_str());
        }
        (id('q', q, n), gold)
    });
    Qrels::from_relevant(sets)
}

/// Two runs over the judged queries: `sparse` puts tail gold labels first,
/// `dense` head gold labels. Each also retrieves the other partition's gold
/// labels half the time at a weaker signal, plus frequency-weighted
/// distractors. Scores are `(1 - noise) * signal + noise * u` with `u`
/// uniform, then mapped to a BM25-like range (sparse) or `[-1, 1]` (dense).
pub fn gen_run_pair(spec: &SynthSpec, qrels: &Qrels, partition: &LabelPartition) -> (Run, Run) {
    const FAVORED: f64 = 1.0;
    const OTHER: f64 = 0.6;
    const OTHER_RECALL: f64 = 0.5;

    let labels: Vec<&String> = partition.frequencies.keys().collect();
    let weights: Vec<u64> = partition.frequencies.values().map(|&c| c.max(1)).collect();
    let sampler = WeightedIndex::new(&weights).expect("non-empty label space");
    let depth = spec.candidates_per_run.max(1);
    let noise = spec.noise.clamp(0.0, 1.0);
    let mut rng = rng(spec.seed, 2);

    let mut sparse = Run::new("sparse");
    let mut dense = Run::new("dense");
    for query in qrels.query_ids() {
        let gold = qrels.relevant(query);
        for (run, favor_head) in [(&mut sparse, false), (&mut dense, true)] {
            let mut signal: BTreeMap<&str, f64> = BTreeMap::new();
            for &g in &gold {
                if partition.head.contains(g) == favor_head {
                    signal.insert(g, FAVORED);
                } else if rng.gen_bool(OTHER_RECALL) {
                    signal.insert(g, OTHER);
                }
            }
            let mut tries = 0;
            while signal.len() < depth.min(labels.len()) && tries < 20 * depth {
                signal.entry(labels[sampler.sample(&mut rng)].as_str()).or_insert(0.0);
                tries += 1;
            }
            let pairs: Vec<(&str, f64)> = signal
                .into_iter()
                .map(|(label, s)| {
                    let raw = (1.0 - noise) * s + noise * rng.gen::<f64>();
                    let score = if favor_head { 2.0 * raw - 1.0 } else { 5.0 + 20.0 * raw };
                    (label, score)
                })
                .collect();
            let list = RankedList::new(query, pairs).expect("unique finite synthetic scores");
            run.insert(list).expect("one list per query");
        }
    }
    (sparse, dense)
}

/// Full benchmark: label space, judgments and runs, with queries dealt
/// round-robin into `n_folds` folds.
pub fn gen_benchmark(spec: &SynthSpec, n_folds: usize) -> SynthBenchmark {
    let frequencies = gen_label_space(spec);
    let partition = partition_labels(&frequencies).expect("non-empty label space");
    let qrels = gen_qrels(spec, &frequencies);
    let (sparse, dense) = gen_run_pair(spec, &qrels, &partition);

    let n_folds = n_folds.max(1);
    let mut folds: Vec<SynthFold> = (0..n_folds)
        .map(|_| SynthFold {
            qrels: Qrels::new(),
            sparse: Run::new("sparse"),
            dense: Run::new("dense"),
        })
        .collect();
    let fold_of: BTreeMap<&str, usize> =
        qrels.query_ids().enumerate().map(|(i, q)| (q, i % n_folds)).collect();
    for (q, label, grade) in qrels.judgments() {
        folds[fold_of[q]].qrels.insert(q, label, grade).expect("unique judgments");
    }
    for (query, &f) in &fold_of {
        let fold = &mut folds[f];
        if let Some(l) = sparse.get(query) {
            fold.sparse.insert(l.clone()).expect("unique query");
        }
        if let Some(l) = dense.get(query) {
            fold.dense.insert(l.clone()).expect("unique query");
        }
    }
    SynthBenchmark { frequencies, partition, folds }
}

/// Literal pairwise-majority Copeland ordering with each label's points.
pub fn oracle_condorcet(lists: &[RankedList]) -> Vec<(String, f64)> {
    let mut union: Vec<String> = Vec::new();
    for list in lists {
        for e in list.entries() {
            if !union.contains(&e.label) {
                union.push(e.label.clone());
            }
        }
    }

    let prefers = |list: &RankedList, d: &str, e: &str| -> bool {
        match (list.rank_of(d), list.rank_of(e)) {
            (Some(x), Some(y)) => x < y,
            (Some(_), None) => true,
            _ => false,
        }
    };

    let mut scored: Vec<(String, f64)> = Vec::new();
    for d in &union {
        let mut points = 0.0;
        for e in &union {
            if d == e {
                continue;
            }
            let for_d = lists.iter().filter(|l| prefers(l, d, e)).count();
            let for_e = lists.iter().filter(|l| prefers(l, e, d)).count();
            if for_d > for_e {
                points += 1.0;
            } else if for_d == for_e {
                points += 0.5;
            }
        }
        scored.push((d.clone(), points));
    }

    // selection sort: most points first, then smallest label
    let mut ordered = Vec::new();
    while !scored.is_empty() {
        let mut best = 0;
        for i in 1..scored.len() {
            let (bl, bp) = &scored[best];
            let (l, p) = &scored[i];
            if p > bp || (p == bp && l.as_bytes() < bl.as_bytes()) {
                best = i;
            }
        }
        ordered.push(scored.remove(best));
    }
    ordered
}

/// Literal Precision@k and nDCG@k; nDCG is `None` when `gold` is empty.
pub fn oracle_metrics(ranked: &RankedList, gold: &BTreeSet<&str>, k: usize) -> (f64, Option<f64>) {
    let entries = ranked.entries();
    let mut hits = 0.0;
    let mut dcg = 0.0;
    let mut i = 0;
    while i < k && i < entries.len() {
        if gold.contains(entries[i].label.as_str()) {
            hits += 1.0;
            dcg += core::f64::consts::LN_2 / libm::log((i + 2) as f64);
        }
        i += 1;
    }
    let precision = hits / k as f64;
    if gold.is_empty() {
        return (precision, None);
    }
    let mut idcg = 0.0;
    let mut j = 0;
    while j < k && j < gold.len() {
        idcg += core::f64::consts::LN_2 / libm::log((j + 2) as f64);
        j += 1;
    }
    (precision, Some(dcg / idcg))
}
