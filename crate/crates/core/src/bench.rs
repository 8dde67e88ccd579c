//! Benchmark harness. A suite file lists one instance per line, optionally
//! followed by a comma-separated strategy list (`exhaustive`, `bb`; both by
//! default). Relative paths resolve against the suite file's directory.
//!
//! ```text
//! # path on 1000 vertices
//! path-1000.akc exhaustive,bb
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use thiserror::Error;

use crate::io::{format_seconds, parse_instance, FormatError};
use crate::solver::{solve, Decision, SolveError, SolveOptions, Strategy};

pub const BENCH_CSV_HEADER: &str = "instance,strategy,time_s,nodes,answer,optimum,mismatch";

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error("suite line {line}: unknown strategy `{name}`")]
    UnknownStrategy { line: usize, name: String },
    #[error("{path}: {source}")]
    Solve { path: PathBuf, source: SolveError },
}

pub fn parse_strategy(name: &str) -> Option<Strategy> {
    match name {
        "exhaustive" => Some(Strategy::Exhaustive),
        "bb" | "branch-bound" => Some(Strategy::BranchBound),
        _ => None,
    }
}

pub fn strategy_name(s: Strategy) -> &'static str {
    match s {
        Strategy::Exhaustive => "exhaustive",
        Strategy::BranchBound => "bb",
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteEntry {
    pub instance: String,
    pub path: PathBuf,
    pub strategies: Vec<Strategy>,
}

pub fn parse_suite(text: &str, base: &Path) -> Result<Vec<SuiteEntry>, BenchError> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let instance = tokens.next().expect("nonempty line").to_string();
        let strategies = match tokens.next() {
            None => vec![Strategy::Exhaustive, Strategy::BranchBound],
            Some(list) => list
                .split(',')
                .map(|name| {
                    parse_strategy(name).ok_or_else(|| BenchError::UnknownStrategy { line: idx + 1, name: name.into() })
                })
                .collect::<Result<_, _>>()?,
        };
        entries.push(SuiteEntry { path: base.join(&instance), instance, strategies });
    }
    Ok(entries)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchRow {
    pub instance: String,
    pub strategy: Strategy,
    pub time: Duration,
    pub nodes: u64,
    pub decision: Decision,
    pub optimum: usize,
    /// Set on every row of an instance whose strategies disagree.
    pub mismatch: bool,
}

/// Solves every entry with each of its strategies. Answers and optimum sizes
/// are cross-checked per instance. Runs that time out are not counted as a
/// mismatch.
pub fn run_entries(entries: &[SuiteEntry], time_limit: Option<Duration>) -> Result<Vec<BenchRow>, BenchError> {
    let mut rows = Vec::new();
    for entry in entries {
        let text = std::fs::read_to_string(&entry.path)
            .map_err(|source| BenchError::Io { path: entry.path.clone(), source })?;
        let inst = parse_instance(&text).map_err(|source| BenchError::Format { path: entry.path.clone(), source })?;
        let first = rows.len();
        for &strategy in &entry.strategies {
            let opts = SolveOptions { strategy, time_limit, ..SolveOptions::default() };
            let report = solve(&inst, &opts).map_err(|source| BenchError::Solve { path: entry.path.clone(), source })?;
            rows.push(BenchRow {
                instance: entry.instance.clone(),
                strategy,
                time: report.wall_time,
                nodes: report.nodes_explored,
                decision: report.decision,
                optimum: report.optimum_size,
                mismatch: false,
            });
        }
        let settled: Vec<&BenchRow> = rows[first..].iter().filter(|r| r.decision != Decision::Unknown).collect();
        let mismatch = settled.windows(2).any(|w| w[0].decision != w[1].decision || w[0].optimum != w[1].optimum);
        for row in &mut rows[first..] {
            row.mismatch = mismatch;
        }
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut out = format!("{BENCH_CSV_HEADER}\n");
    for r in rows {
        let answer = match r.decision {
            Decision::Yes => "yes",
            Decision::No => "no",
            Decision::Unknown => "unknown",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.instance,
            strategy_name(r.strategy),
            format_seconds(r.time),
            r.nodes,
            answer,
            r.optimum,
            u8::from(r.mismatch)
        );
    }
    out
}

/// Reads a suite file and returns the CSV report.
pub fn bench(suite: &Path, time_limit: Option<Duration>) -> Result<String, BenchError> {
    let text =
        std::fs::read_to_string(suite).map_err(|source| BenchError::Io { path: suite.to_path_buf(), source })?;
    let base = suite.parent().unwrap_or(Path::new("."));
    let entries = parse_suite(&text, base)?;
    Ok(rows_to_csv(&run_entries(&entries, time_limit)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_parsing() {
        let text = "# comment\n\na.akc\nb.akc bb\nc.akc exhaustive,bb\n";
        let entries = parse_suite(text, Path::new("/suite")).unwrap();
        assert_eq!(entries.len(), 3);
        assert_eq!(entries[0].path, PathBuf::from("/suite/a.akc"));
        assert_eq!(entries[0].strategies, vec![Strategy::Exhaustive, Strategy::BranchBound]);
        assert_eq!(entries[1].strategies, vec![Strategy::BranchBound]);
        assert!(matches!(parse_suite("a.akc greedy\n", Path::new(".")), Err(BenchError::UnknownStrategy { line: 1, .. })));
    }

    #[test]
    fn empty_suite_is_header_only() {
        assert_eq!(rows_to_csv(&run_entries(&[], None).unwrap()), format!("{BENCH_CSV_HEADER}\n"));
    }

    #[test]
    fn missing_instance() {
        let entries = parse_suite("does-not-exist.akc\n", Path::new("/nonexistent")).unwrap();
        assert!(matches!(run_entries(&entries, None), Err(BenchError::Io { .. })));
    }
}
