//! Fold-level fusion and evaluation.
//!
//! A folds directory holds one subdirectory per fold, visited in name
//! order. Each fold holds `freqs.tsv`, `qrels.txt` and one or more `*.run`
//! files (each optionally gzip-compressed with a `.gz` suffix).

use std::collections::BTreeSet;
use std::fs;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use rankfuse_core::eval::{aggregate_folds, evaluate, partition_labels, CellKey};
use rankfuse_core::fuse::fuse;
use rankfuse_core::normalize::normalization_token;
use rankfuse_core::{
    EvalReport, FusionConfig, FusionMethod, LabelPartition, Metric, MetricSpec, NormStrategy,
    PartitionView, Qrels, RankedList, Run, DEFAULT_DEPTH,
};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io::{parse_label_frequencies_file, parse_qrels_file, parse_run_file};

pub const FREQS_FILE: &str = "freqs.tsv";
pub const QRELS_FILE: &str = "qrels.txt";
pub const RUN_SUFFIX: &str = ".run";

#[derive(Debug, Clone)]
pub struct Fold {
    pub name: String,
    pub runs: Vec<Run>,
    pub qrels: Qrels,
    pub partition: LabelPartition,
}

fn find_artifact(dir: &Path, name: &str) -> Result<PathBuf> {
    [dir.join(name), dir.join(format!("{name}.gz"))]
        .into_iter()
        .find(|p| p.is_file())
        .ok_or_else(|| Error::MissingFoldArtifact(dir.join(name).display().to_string()))
}

fn list_dir(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut entries = fs::read_dir(dir)
        .map_err(|e| Error::from(e).in_file(dir))?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| Error::from(e).in_file(dir))?;
    entries.sort();
    Ok(entries)
}

fn is_run_file(path: &Path) -> bool {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    path.is_file() && (name.ends_with(RUN_SUFFIX) || name.ends_with(".run.gz"))
}

pub fn load_fold(dir: &Path) -> Result<Fold> {
    let freqs = parse_label_frequencies_file(&find_artifact(dir, FREQS_FILE)?)?;
    let partition = partition_labels(&freqs).map_err(|e| Error::from(e).in_file(dir))?;
    let qrels = parse_qrels_file(&find_artifact(dir, QRELS_FILE)?)?;
    let run_paths: Vec<PathBuf> = list_dir(dir)?.into_iter().filter(|p| is_run_file(p)).collect();
    if run_paths.is_empty() {
        return Err(Error::MissingFoldArtifact(format!("{}/*{RUN_SUFFIX}", dir.display())));
    }
    let runs = run_paths.iter().map(|p| parse_run_file(p)).collect::<Result<_>>()?;
    let name = dir.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(Fold { name, runs, qrels, partition })
}

/// Loads every fold subdirectory of `dir`, in name order.
pub fn load_folds(dir: &Path) -> Result<Vec<Fold>> {
    let subdirs: Vec<PathBuf> = list_dir(dir)?.into_iter().filter(|p| p.is_dir()).collect();
    if subdirs.is_empty() {
        return Err(Error::MissingFoldArtifact(format!(
            "{}: no fold subdirectories",
            dir.display()
        )));
    }
    subdirs.iter().map(|d| load_fold(d)).collect()
}

pub fn fused_tag(config: &FusionConfig) -> String {
    format!("{}-{}", normalization_token(config.normalization), config.method.token())
}

/// Fuses `runs` query by query over the union of their query ids. A query
/// missing from some runs is fused over the lists that have it.
pub fn fuse_runs(runs: &[Run], config: &FusionConfig) -> Result<Run> {
    let queries: BTreeSet<&str> = runs.iter().flat_map(Run::query_ids).collect();
    let queries: Vec<&str> = queries.into_iter().collect();
    let fused: Vec<RankedList> = queries
        .par_iter()
        .map(|&q| {
            let lists: Vec<RankedList> = runs.iter().filter_map(|r| r.get(q)).cloned().collect();
            fuse(&lists, config).map(|f| f.list)
        })
        .collect::<rankfuse_core::Result<_>>()?;
    let mut run = Run::new(fused_tag(config));
    for list in fused {
        run.insert(list)?;
    }
    Ok(run)
}

#[derive(Debug, Clone)]
pub struct PipelineOptions {
    pub norms: Vec<Option<NormStrategy>>,
    pub methods: Vec<FusionMethod>,
    pub views: Vec<PartitionView>,
    pub ks: Vec<usize>,
    pub metrics: Vec<Metric>,
    pub depth: NonZeroUsize,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self {
            norms: NormStrategy::ALL.into_iter().map(Some).collect(),
            methods: FusionMethod::ALL.to_vec(),
            views: vec![PartitionView::Head, PartitionView::Tail],
            ks: vec![1, 5, 10],
            metrics: vec![Metric::Ndcg, Metric::Precision],
            depth: NonZeroUsize::new(DEFAULT_DEPTH).unwrap(),
        }
    }
}

impl PipelineOptions {
    fn specs(&self) -> Result<Vec<MetricSpec>> {
        let mut specs = Vec::new();
        for &metric in &self.metrics {
            for &view in &self.views {
                for &k in &self.ks {
                    specs.push(MetricSpec::new(metric, k, view)?);
                }
            }
        }
        Ok(specs)
    }
}

/// For every (normalization, method): fuse each fold, evaluate every
/// metric spec, and summarize across folds.
pub fn run_pipeline(folds: &[Fold], options: &PipelineOptions) -> Result<EvalReport> {
    let specs = options.specs()?;
    let mut report = EvalReport::new();
    for &norm in &options.norms {
        for &method in &options.methods {
            let config = FusionConfig { normalization: norm, method, depth: options.depth };
            let mut per_spec = vec![Vec::with_capacity(folds.len()); specs.len()];
            for fold in folds {
                let fused = fuse_runs(&fold.runs, &config)?;
                for (values, spec) in per_spec.iter_mut().zip(&specs) {
                    let v = evaluate(&fused, &fold.qrels, &fold.partition, spec)
                        .map_err(|e| Error::from(e).in_file(&fold.name))?;
                    values.push(v);
                }
            }
            for (values, spec) in per_spec.iter().zip(&specs) {
                let key = CellKey {
                    normalization: norm,
                    method,
                    metric: spec.metric,
                    view: spec.view,
                    k: spec.k,
                };
                report.insert(key, aggregate_folds(values)?);
            }
        }
    }
    Ok(report)
}

/// Writes `bench` as a folds directory: `fold_1`, `fold_2`, ... each with
/// frequencies, judgments and the two runs.
pub fn write_benchmark(dir: &Path, bench: &rankfuse_core::synth::SynthBenchmark) -> Result<()> {
    use crate::io::{write_label_frequencies, write_qrels, write_run, write_to_file};

    let width = bench.folds.len().to_string().len();
    for (i, fold) in bench.folds.iter().enumerate() {
        let fold_dir = dir.join(format!("fold_{:0width$}", i + 1));
        fs::create_dir_all(&fold_dir).map_err(|e| Error::from(e).in_file(&fold_dir))?;
        write_to_file(&fold_dir.join(FREQS_FILE), |w| {
            write_label_frequencies(w, &bench.frequencies)
        })?;
        write_to_file(&fold_dir.join(QRELS_FILE), |w| write_qrels(w, &fold.qrels))?;
        write_to_file(&fold_dir.join("sparse.run"), |w| write_run(w, &fold.sparse))?;
        write_to_file(&fold_dir.join("dense.run"), |w| write_run(w, &fold.dense))?;
    }
    Ok(())
}
