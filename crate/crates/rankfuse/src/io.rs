//! Run files, qrels and label-frequency files.
//!
//! Run lines have six whitespace-separated fields
//! `query Q0 label rank score tag`; the rank column is advisory and the
//! canonical order is recomputed from scores. Qrels lines are
//! `query 0 label relevance`. Frequency files hold `label<TAB>count`.
//! Any input whose name ends in `.gz` is decompressed on the fly.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use flate2::read::GzDecoder;
use log::warn;
use rankfuse_core::{Qrels, RankedList, Run};

use crate::error::{Error, Result};

pub fn open_input(path: &Path) -> Result<Box<dyn BufRead>> {
    let file = File::open(path).map_err(|e| Error::from(e).in_file(path))?;
    if path.extension().is_some_and(|ext| ext == "gz") {
        Ok(Box::new(BufReader::new(GzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

fn malformed(line: usize, reason: impl Into<String>) -> Error {
    Error::MalformedLine { line, reason: reason.into() }
}

/// Non-blank lines with their 1-based line numbers.
fn numbered_lines(reader: impl BufRead) -> impl Iterator<Item = Result<(usize, String)>> {
    reader
        .lines()
        .enumerate()
        .map(|(i, line)| line.map(|l| (i + 1, l)).map_err(Error::from))
        .filter(|r| !matches!(r, Ok((_, l)) if l.trim().is_empty()))
}

struct PendingList {
    entries: Vec<(String, f64)>,
    ranks: Vec<u64>,
    seen: BTreeSet<String>,
}

pub fn parse_run(reader: impl BufRead) -> Result<Run> {
    let mut tag: Option<String> = None;
    let mut pending: BTreeMap<String, PendingList> = BTreeMap::new();
    for item in numbered_lines(reader) {
        let (n, line) = item?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [query, q0, label, rank, score, system] = fields[..] else {
            return Err(malformed(n, format!("expected 6 fields, found {}", fields.len())));
        };
        if q0 != "Q0" {
            return Err(malformed(n, format!("second field must be `Q0`, found `{q0}`")));
        }
        let rank: u64 = rank
            .parse()
            .ok()
            .filter(|&r| r >= 1)
            .ok_or_else(|| malformed(n, format!("rank `{rank}` is not a positive integer")))?;
        let score: f64 = score
            .parse()
            .ok()
            .filter(|s: &f64| s.is_finite())
            .ok_or_else(|| malformed(n, format!("score `{score}` is not a finite number")))?;
        match &tag {
            None => tag = Some(system.to_string()),
            Some(t) if t != system => {
                return Err(Error::MixedSystemTags {
                    line: n,
                    expected: t.clone(),
                    found: system.to_string(),
                })
            }
            Some(_) => {}
        }
        let list = pending.entry(query.to_string()).or_insert_with(|| PendingList {
            entries: Vec::new(),
            ranks: Vec::new(),
            seen: BTreeSet::new(),
        });
        if !list.seen.insert(label.to_string()) {
            return Err(Error::DuplicateLabel {
                line: n,
                query: Some(query.to_string()),
                label: label.to_string(),
            });
        }
        list.entries.push((label.to_string(), score));
        list.ranks.push(rank);
    }

    let mut run = Run::new(tag.unwrap_or_default());
    let mut reordered = 0usize;
    for (query, list) in pending {
        let advisory: BTreeMap<&str, u64> =
            list.entries.iter().map(|(l, _)| l.as_str()).zip(list.ranks.iter().copied()).collect();
        let ranked = RankedList::new(query.clone(), list.entries.iter().cloned())?;
        let stated: Vec<u64> = ranked.labels().map(|l| advisory[l]).collect();
        if stated.windows(2).any(|w| w[0] > w[1]) {
            reordered += 1;
        }
        run.insert(ranked)?;
    }
    if reordered > 0 {
        warn!(
            "{reordered} queries have a rank column that disagrees with score order; using scores"
        );
    }
    Ok(run)
}

pub fn parse_run_file(path: &Path) -> Result<Run> {
    parse_run(open_input(path)?).map_err(|e| e.in_file(path))
}

pub fn parse_qrels(reader: impl BufRead) -> Result<Qrels> {
    let mut qrels = Qrels::new();
    for item in numbered_lines(reader) {
        let (n, line) = item?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [query, zero, label, relevance] = fields[..] else {
            return Err(malformed(n, format!("expected 4 fields, found {}", fields.len())));
        };
        if zero != "0" {
            return Err(malformed(n, format!("second field must be `0`, found `{zero}`")));
        }
        let grade: u32 = relevance.parse().map_err(|_| {
            malformed(n, format!("relevance `{relevance}` is not a non-negative integer"))
        })?;
        qrels.insert(query, label, grade).map_err(|_| Error::DuplicateJudgment {
            line: n,
            query: query.to_string(),
            label: label.to_string(),
        })?;
    }
    Ok(qrels)
}

pub fn parse_qrels_file(path: &Path) -> Result<Qrels> {
    parse_qrels(open_input(path)?).map_err(|e| e.in_file(path))
}

pub fn parse_label_frequencies(reader: impl BufRead) -> Result<BTreeMap<String, u64>> {
    let mut freqs = BTreeMap::new();
    for item in numbered_lines(reader) {
        let (n, line) = item?;
        let fields: Vec<&str> = line.split('\t').collect();
        let [label, count] = fields[..] else {
            return Err(malformed(n, "expected `label<TAB>count`"));
        };
        let (label, count) = (label.trim(), count.trim());
        if label.is_empty() {
            return Err(malformed(n, "empty label"));
        }
        let count: i64 = count
            .parse()
            .map_err(|_| malformed(n, format!("count `{count}` is not an integer")))?;
        if count < 0 {
            return Err(Error::NegativeCount { line: n, label: label.to_string() });
        }
        if freqs.insert(label.to_string(), count as u64).is_some() {
            return Err(Error::DuplicateLabel { line: n, query: None, label: label.to_string() });
        }
    }
    Ok(freqs)
}

pub fn parse_label_frequencies_file(path: &Path) -> Result<BTreeMap<String, u64>> {
    parse_label_frequencies(open_input(path)?).map_err(|e| e.in_file(path))
}

/// Formats a score with six significant digits, `.` as decimal separator,
/// trailing zeros trimmed and an exponent outside `[1e-4, 1e6)`.
pub fn format_score(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        return format!("{}e{exp}", trim_zeros(mantissa));
    }
    let decimals = (5 - exp) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes every list of `run` in query order, ranks renumbered from 1.
pub fn write_run(mut out: impl Write, run: &Run) -> Result<()> {
    for list in run.lists() {
        write_list(&mut out, list, &run.system_tag)?;
    }
    Ok(())
}

pub fn write_list(mut out: impl Write, list: &RankedList, tag: &str) -> Result<()> {
    for (i, e) in list.entries().iter().enumerate() {
        writeln!(
            out,
            "{} Q0 {} {} {} {}",
            list.query_id(),
            e.label,
            i + 1,
            format_score(e.score),
            tag
        )?;
    }
    Ok(())
}

pub fn write_run_file(path: &Path, run: &Run) -> Result<()> {
    write_to_file(path, |w| write_run(w, run))
}

pub fn write_qrels(mut out: impl Write, qrels: &Qrels) -> Result<()> {
    for (query, label, grade) in qrels.judgments() {
        writeln!(out, "{query} 0 {label} {grade}")?;
    }
    Ok(())
}

pub fn write_label_frequencies(mut out: impl Write, freqs: &BTreeMap<String, u64>) -> Result<()> {
    for (label, count) in freqs {
        writeln!(out, "{label}\t{count}")?;
    }
    Ok(())
}

pub(crate) fn write_to_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> Result<()>,
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::from(e).in_file(path))?;
    let mut w = BufWriter::new(file);
    body(&mut w).and_then(|_| w.flush().map_err(Error::from)).map_err(|e| e.in_file(path))
}
