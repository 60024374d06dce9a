//! Score normalization, rank fusion and ranked-list evaluation.
//!
//! This crate is `no_std` (it needs `alloc`) and carries no IO. Parsers,
//! report rendering and the command line live in the `rankfuse` crate.
//!
//! The pieces:
//!
//! * [`types`]: [`RankedList`], [`Run`], [`Qrels`] and friends.
//! * [`normalize`]: six per-list score normalizers.
//! * [`fuse`]: ten fusion methods (score-, rank- and voting-based).
//! * [`eval`]: head/tail label partitioning, Precision@k, nDCG@k, fold aggregation.
//! * [`stats`]: two-sided paired Student's t-test.
//! * [`synth`]: seeded long-tail benchmarks and brute-force oracles for tests.
//!
//! ```
//! use rankfuse_core::{fuse, FusionConfig, FusionMethod, NormStrategy, RankedList};
//!
//! let bm25 = RankedList::new("q1", [("a", 12.0), ("b", 9.5), ("d", 3.0)]).unwrap();
//! let dense = RankedList::new("q1", [("b", 0.91), ("c", 0.40), ("e", 0.10)]).unwrap();
//! let config = FusionConfig::new(Some(NormStrategy::Zmuv), FusionMethod::CombMnz, 128).unwrap();
//! let fused = fuse::fuse(&[bm25, dense], &config).unwrap();
//! assert_eq!(fused.list.entries()[0].label, "b");
//! ```
#![no_std]

extern crate alloc;

mod error;
pub mod eval;
pub mod fuse;
pub mod normalize;
pub mod stats;
pub mod synth;
pub mod types;

pub use error::{Error, Result};
pub use eval::{EvalReport, LabelPartition, Metric, MetricSpec, PartitionView};
pub use fuse::{FusedList, FusionMethod};
pub use normalize::NormStrategy;
pub use stats::TTestResult;
pub use types::{DatasetStats, Entry, FusionConfig, Qrels, RankedList, Run, DEFAULT_DEPTH};
