//! The `rankfuse` command line.
//!
//! Exit codes: 0 on success, 1 on usage errors (unknown flags or tokens),
//! 2 on data errors (malformed or missing inputs, nothing to evaluate).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rankfuse_core::eval::{evaluate, partition_labels};
use rankfuse_core::normalize::{normalization_token, parse_normalization};
use rankfuse_core::stats::paired_t_test;
use rankfuse_core::synth::{gen_benchmark, SynthSpec};
use rankfuse_core::{
    FusionConfig, FusionMethod, Metric, MetricSpec, NormStrategy, PartitionView, DEFAULT_DEPTH,
};

use crate::io::{
    parse_label_frequencies_file, parse_qrels_file, parse_run_file, write_run, write_to_file,
};
use crate::pipeline::{fuse_runs, load_folds, run_pipeline, write_benchmark, PipelineOptions};
use crate::report::{parse_report_csv, render_report, ReportFormat};
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "rankfuse", version, about = "Rank fusion and ranked-list evaluation")]
struct Cli {
    /// Worker threads for per-query work (default: all cores).
    #[arg(long, global = true, env = "RANKFUSE_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Normalize and fuse run files into one run.
    Fuse(FuseArgs),
    /// Evaluate a run per partition view, metric and cutoff.
    Eval(EvalArgs),
    /// Print each label's frequency and head/tail assignment.
    SplitLabels(SplitArgs),
    /// Paired t-tests between the fold values of two report CSVs.
    Compare(CompareArgs),
    /// Fuse, evaluate and aggregate over a folds directory.
    Pipeline(PipelineArgs),
    /// Write a synthetic long-tail folds directory.
    #[command(hide = true)]
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy)]
struct NormArg(Option<NormStrategy>);

fn norm_arg(s: &str) -> Result<NormArg, String> {
    parse_normalization(s).map(NormArg).map_err(|e| e.to_string())
}

fn method_arg(s: &str) -> Result<FusionMethod, String> {
    s.parse().map_err(|e: rankfuse_core::Error| e.to_string())
}

fn view_arg(s: &str) -> Result<PartitionView, String> {
    s.parse().map_err(|e: rankfuse_core::Error| e.to_string())
}

fn metric_arg(s: &str) -> Result<Metric, String> {
    s.parse().map_err(|e: rankfuse_core::Error| e.to_string())
}

fn config_arg(s: &str) -> Result<(NormArg, FusionMethod), String> {
    let (norm, method) =
        s.split_once('/').ok_or_else(|| format!("expected NORM/METHOD, got `{s}`"))?;
    Ok((norm_arg(norm)?, method_arg(method)?))
}

#[derive(Debug, Args)]
struct FuseArgs {
    /// Input run file; repeat for each system.
    #[arg(long = "run", required = true)]
    runs: Vec<PathBuf>,
    /// min-max, max, sum, zmuv, rank, borda or none.
    #[arg(long, value_parser = norm_arg, default_value = "none")]
    norm: NormArg,
    #[arg(long, value_parser = method_arg)]
    method: FusionMethod,
    #[arg(long, default_value_t = NonZeroUsize::new(DEFAULT_DEPTH).unwrap())]
    depth: NonZeroUsize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    run: PathBuf,
    #[arg(long)]
    qrels: PathBuf,
    #[arg(long)]
    freqs: PathBuf,
    #[arg(long, value_delimiter = ',', value_parser = view_arg, default_value = "head,tail")]
    views: Vec<PartitionView>,
    #[arg(long, value_delimiter = ',', default_value = "1,5,10")]
    k: Vec<NonZeroUsize>,
}

#[derive(Debug, Args)]
struct SplitArgs {
    #[arg(long)]
    freqs: PathBuf,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Two report CSVs written by `pipeline --format csv`.
    #[arg(long, num_args = 2, value_names = ["A", "B"], required = true)]
    cells: Vec<PathBuf>,
    /// Configuration to take from A, as NORM/METHOD.
    #[arg(long, value_parser = config_arg)]
    a_config: Option<(NormArg, FusionMethod)>,
    /// Configuration to take from B, as NORM/METHOD.
    #[arg(long, value_parser = config_arg)]
    b_config: Option<(NormArg, FusionMethod)>,
}

#[derive(Debug, Args)]
struct PipelineArgs {
    #[arg(long)]
    folds: PathBuf,
    #[arg(long, value_delimiter = ',', value_parser = norm_arg,
          default_value = "min-max,max,sum,zmuv,rank,borda")]
    norm: Vec<NormArg>,
    #[arg(long, value_delimiter = ',', value_parser = method_arg,
          default_value = "combmin,combmax,combmed,combsum,combanz,combmnz,isr,logisr,bordafuse,condorcet")]
    method: Vec<FusionMethod>,
    #[arg(long, value_delimiter = ',', value_parser = view_arg, default_value = "head,tail")]
    views: Vec<PartitionView>,
    #[arg(long, value_delimiter = ',', default_value = "1,5,10")]
    k: Vec<NonZeroUsize>,
    /// ndcg and/or p.
    #[arg(long, value_delimiter = ',', value_parser = metric_arg, default_value = "ndcg,p")]
    metrics: Vec<Metric>,
    #[arg(long, default_value_t = NonZeroUsize::new(DEFAULT_DEPTH).unwrap())]
    depth: NonZeroUsize,
    #[arg(long, value_enum, default_value = "table")]
    format: ReportFormat,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    #[arg(long, default_value_t = 2000)]
    queries: usize,
    #[arg(long, default_value_t = 5000)]
    labels: usize,
    #[arg(long, default_value_t = 1.0)]
    zipf: f64,
    #[arg(long, default_value_t = 5)]
    gold: usize,
    #[arg(long, default_value_t = 0.3)]
    noise: f64,
    #[arg(long, default_value_t = 32)]
    candidates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl<E: Into<Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Data(e.into())
    }
}

/// Text for standard output on success.
type CmdResult = Result<String, Failure>;

/// Runs the CLI with `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                1
            } else {
                let _ = write!(stdout, "{text}");
                0
            };
        }
    };

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads.unwrap_or(0)).build() {
        Ok(pool) => pool,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker threads: {e}");
            return 2;
        }
    };
    let result = pool.install(|| match cli.command {
        Command::Fuse(args) => cmd_fuse(args),
        Command::Eval(args) => cmd_eval(args),
        Command::SplitLabels(args) => cmd_split_labels(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Pipeline(args) => cmd_pipeline(args),
        Command::Synth(args) => cmd_synth(args),
    });
    match result {
        Ok(text) => match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
            Ok(()) => 0,
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                2
            }
        },
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
        Err(Failure::Data(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

fn cmd_fuse(args: FuseArgs) -> CmdResult {
    let runs = args.runs.iter().map(|p| parse_run_file(p)).collect::<Result<Vec<_>, _>>()?;
    let config =
        FusionConfig { normalization: args.norm.0, method: args.method, depth: args.depth };
    let fused = fuse_runs(&runs, &config)?;
    write_to_file(&args.out, |w| write_run(w, &fused))?;
    Ok(String::new())
}

fn cmd_eval(args: EvalArgs) -> CmdResult {
    let run = parse_run_file(&args.run)?;
    let qrels = parse_qrels_file(&args.qrels)?;
    let freqs = parse_label_frequencies_file(&args.freqs)?;
    let partition = partition_labels(&freqs).map_err(|e| Error::from(e).in_file(&args.freqs))?;

    let mut out = String::from("partition,metric,value\n");
    for &view in &args.views {
        for metric in [Metric::Ndcg, Metric::Precision] {
            for k in &args.k {
                let spec = MetricSpec::new(metric, k.get(), view)?;
                let value = evaluate(&run, &qrels, &partition, &spec)
                    .map_err(|e| Error::from(e).in_file(format!("view {view}")))?;
                out.push_str(&format!("{view},{},{value:.6}\n", spec.metric_token()));
            }
        }
    }
    Ok(out)
}

fn cmd_split_labels(args: SplitArgs) -> CmdResult {
    let freqs = parse_label_frequencies_file(&args.freqs)?;
    let partition = partition_labels(&freqs).map_err(|e| Error::from(e).in_file(&args.freqs))?;
    let mut order: Vec<(&String, u64)> = freqs.iter().map(|(l, &c)| (l, c)).collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let mut out = String::new();
    for (label, count) in order {
        let side = if partition.head.contains(label) { "head" } else { "tail" };
        out.push_str(&format!("{label}\t{count}\t{side}\n"));
    }
    Ok(out)
}

type JoinKey = (Metric, PartitionView, usize);
type ConfigKey = (Option<NormStrategy>, FusionMethod);

fn select_cells(
    path: &Path,
    config: Option<(NormArg, FusionMethod)>,
    side: &str,
) -> Result<BTreeMap<JoinKey, (ConfigKey, Vec<f64>)>, Failure> {
    let file = File::open(path).map_err(|e| Error::from(e).in_file(path))?;
    let report = parse_report_csv(file).map_err(|e| e.in_file(path))?;
    let mut picked: BTreeMap<JoinKey, (ConfigKey, Vec<f64>)> = BTreeMap::new();
    for (key, cell) in report.cells {
        let this = (key.normalization, key.method);
        if config.is_some_and(|(n, m)| (n.0, m) != this) {
            continue;
        }
        let join = (key.metric, key.view, key.k);
        if let Some((other, _)) = picked.get(&join) {
            if *other != this {
                return Err(Failure::Usage(format!(
                    "{} holds several configurations; choose one with --{side}-config NORM/METHOD",
                    path.display()
                )));
            }
        }
        picked.insert(join, (this, cell.fold_values));
    }
    Ok(picked)
}

fn config_label((norm, method): ConfigKey) -> String {
    format!("{}/{}", normalization_token(norm), method.token())
}

fn cmd_compare(args: CompareArgs) -> CmdResult {
    let a = select_cells(&args.cells[0], args.a_config, "a")?;
    let b = select_cells(&args.cells[1], args.b_config, "b")?;
    let mut out = String::from("metric,partition,a,b,t,df,p,significant\n");
    let mut rows = 0;
    for (join, (a_config, a_folds)) in &a {
        let Some((b_config, b_folds)) = b.get(join) else { continue };
        let test = paired_t_test(a_folds, b_folds)?;
        let (metric, view, k) = join;
        out.push_str(&format!(
            "{metric}@{k},{view},{},{},{:.4},{},{:.6},{}\n",
            config_label(*a_config),
            config_label(*b_config),
            test.t_statistic,
            test.degrees_of_freedom,
            test.p_value,
            if test.significant_at_05 { "*" } else { "" },
        ));
        rows += 1;
    }
    if rows == 0 {
        return Err(Failure::Data(Error::MalformedReport(
            "the two reports share no (metric, partition, k) cell".into(),
        )));
    }
    Ok(out)
}

fn cmd_pipeline(args: PipelineArgs) -> CmdResult {
    let options = PipelineOptions {
        norms: args.norm.iter().map(|n| n.0).collect(),
        methods: args.method,
        views: args.views,
        ks: args.k.iter().map(|k| k.get()).collect(),
        metrics: args.metrics,
        depth: args.depth,
    };
    let folds = load_folds(&args.folds)?;
    let report = run_pipeline(&folds, &options)?;
    let text = render_report(&report, args.format)?;
    match &args.out {
        Some(path) => {
            write_to_file(path, |w| w.write_all(text.as_bytes()).map_err(Error::from))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn cmd_synth(args: SynthArgs) -> CmdResult {
    if args.folds < 2 || args.queries == 0 || args.labels == 0 || args.gold == 0 {
        return Err(Failure::Usage("synth needs --folds >= 2 and positive counts".into()));
    }
    if args.zipf.is_nan() || args.zipf <= 0.0 || !(0.0..=1.0).contains(&args.noise) {
        return Err(Failure::Usage("--zipf must be > 0 and --noise within [0, 1]".into()));
    }
    let spec = SynthSpec {
        n_labels: args.labels,
        n_queries: args.queries,
        zipf_exponent: args.zipf,
        gold_per_query: args.gold,
        noise: args.noise,
        seed: args.seed,
        candidates_per_run: args.candidates,
    };
    let bench = gen_benchmark(&spec, args.folds);
    write_benchmark(&args.out, &bench)?;
    Ok(String::new())
}
