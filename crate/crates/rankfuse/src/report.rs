//! Rendering evaluation reports as CSV or as an aligned text grid.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Read;

use rankfuse_core::eval::{CellKey, FoldSummary};
use rankfuse_core::normalize::{
    normalization_display_name, normalization_token, parse_normalization,
};
use rankfuse_core::{EvalReport, FusionMethod, Metric, PartitionView};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ReportFormat {
    Csv,
    Table,
}

pub const CSV_HEADER: [&str; 9] =
    ["normalization", "method", "metric", "partition", "k", "mean", "std", "cell", "folds"];

pub fn render_report(report: &EvalReport, format: ReportFormat) -> Result<String> {
    if report.is_empty() {
        return Err(Error::EmptyReport);
    }
    match format {
        ReportFormat::Csv => render_csv(report),
        ReportFormat::Table => Ok(render_table(report)),
    }
}

/// One row per cell. `mean`, `std` and the `;`-separated `folds` use the
/// shortest representation that reads back to the same value.
fn render_csv(report: &EvalReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for (key, cell) in &report.cells {
        let folds: Vec<String> = cell.fold_values.iter().map(|v| v.to_string()).collect();
        w.write_record([
            normalization_token(key.normalization),
            key.method.token(),
            key.metric.token(),
            key.view.token(),
            &key.k.to_string(),
            &cell.mean.to_string(),
            &cell.std.to_string(),
            &cell.cell(),
            &folds.join(";"),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("ASCII output"))
}

pub fn parse_report_csv(reader: impl Read) -> Result<EvalReport> {
    let mut r = csv::Reader::from_reader(reader);
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::MalformedReport(format!("unexpected header {:?}", headers)));
    }
    let mut report = EvalReport::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let row = i + 2;
        let bad = |what: &str| Error::MalformedReport(format!("row {row}: bad {what}"));
        let field = |j: usize| record.get(j).unwrap_or_default();
        let number = |j: usize, what: &str| field(j).parse::<f64>().map_err(|_| bad(what));
        let key = CellKey {
            normalization: parse_normalization(field(0)).map_err(|_| bad("normalization"))?,
            method: field(1).parse::<FusionMethod>().map_err(|_| bad("method"))?,
            metric: field(2).parse::<Metric>().map_err(|_| bad("metric"))?,
            view: field(3).parse::<PartitionView>().map_err(|_| bad("partition"))?,
            k: field(4).parse().map_err(|_| bad("k"))?,
        };
        let fold_values = if field(8).is_empty() {
            Vec::new()
        } else {
            field(8)
                .split(';')
                .map(|v| v.parse::<f64>().map_err(|_| bad("folds")))
                .collect::<Result<_>>()?
        };
        let summary = FoldSummary { mean: number(5, "mean")?, std: number(6, "std")?, fold_values };
        report.insert(key, summary);
    }
    Ok(report)
}

fn metric_heading(metric: Metric) -> &'static str {
    match metric {
        Metric::Ndcg => "nDCG x 100",
        Metric::Precision => "Precision x 100",
    }
}

fn view_heading(view: PartitionView) -> &'static str {
    match view {
        PartitionView::Tail => "Tail label",
        PartitionView::Head => "Head label",
        PartitionView::All => "All labels",
    }
}

/// Rows are (normalization, method) pairs grouped into normalization
/// blocks; columns are metric, then partition, then cutoff. Missing cells
/// show as `-`.
fn render_table(report: &EvalReport) -> String {
    let metrics: BTreeSet<Metric> = report.cells.keys().map(|k| k.metric).collect();
    let views: BTreeSet<PartitionView> = report.cells.keys().map(|k| k.view).collect();
    let ks: BTreeSet<usize> = report.cells.keys().map(|k| k.k).collect();
    let rows: BTreeSet<_> = report.cells.keys().map(|k| (k.normalization, k.method)).collect();

    let mut columns: Vec<(Metric, PartitionView, usize)> = Vec::new();
    for &m in &metrics {
        for &v in &views {
            columns.extend(ks.iter().map(|&k| (m, v, k)));
        }
    }

    let blank = || vec![String::new(); columns.len() + 2];
    let mut header = [blank(), blank(), blank()];
    header[2][0] = "Normalization".into();
    header[2][1] = "Algorithms".into();
    for (c, &(m, v, k)) in columns.iter().enumerate() {
        let first_of_metric = c == 0 || columns[c - 1].0 != m;
        let first_of_view = first_of_metric || columns[c - 1].1 != v;
        if first_of_metric {
            header[0][c + 2] = metric_heading(m).into();
        }
        if first_of_view {
            header[1][c + 2] = view_heading(v).into();
        }
        header[2][c + 2] = format!("@{k}");
    }

    let mut body: Vec<Option<Vec<String>>> = Vec::new();
    let mut last_norm = None;
    for &(norm, method) in &rows {
        if last_norm.is_some_and(|n| n != norm) {
            body.push(None);
        }
        last_norm = Some(norm);
        let mut line =
            vec![normalization_display_name(norm).to_string(), method.display_name().to_string()];
        for &(metric, view, k) in &columns {
            let key = CellKey { normalization: norm, method, metric, view, k };
            line.push(report.cells.get(&key).map_or_else(|| "-".to_string(), FoldSummary::cell));
        }
        body.push(Some(line));
    }

    let mut widths = vec![0usize; columns.len() + 2];
    for line in header.iter().chain(body.iter().flatten()) {
        for (w, s) in widths.iter_mut().zip(line) {
            *w = (*w).max(s.len());
        }
    }

    let mut out = String::new();
    let mut emit = |line: &[String]| {
        let mut text = String::new();
        for (i, (s, w)) in line.iter().zip(&widths).enumerate() {
            if i == 2 {
                text.push_str(" |");
            }
            if i < 2 {
                let _ = write!(text, "{s:<w$}  ");
            } else {
                let _ = write!(text, " {s:>w$}");
            }
        }
        out.push_str(text.trim_end());
        out.push('\n');
    };
    for line in &header {
        emit(line);
    }
    for line in &body {
        match line {
            Some(l) => emit(l),
            None => emit(&blank()),
        }
    }
    out
}
