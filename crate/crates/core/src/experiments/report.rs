use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::runner::{ExperimentResult, GroupSeries, SeriesPoint};
use super::stats::{welch_t_test, TTestResult};
use crate::engine::RunLog;
use crate::Group;

pub const RECORD_HEADER: [&str; 9] = [
    "experiment",
    "run",
    "round",
    "consumer",
    "group",
    "interaction_index",
    "model_used",
    "served",
    "ug",
];

pub const SERIES_HEADER: [&str; 5] = ["experiment", "group", "interaction_index", "mean_ug", "n"];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: line {line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> ReportError + '_ {
    move |source| ReportError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

pub fn io_err(path: &Path) -> impl Fn(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_records_csv(experiment: u32, logs: &[RunLog], path: &Path) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(RECORD_HEADER).map_err(csv_err(path))?;
    for log in logs {
        for r in &log.records {
            w.write_record([
                experiment.to_string(),
                r.run.to_string(),
                r.round.to_string(),
                r.consumer.to_string(),
                r.group.name().to_string(),
                r.interaction_index.to_string(),
                r.model_used.name().to_string(),
                r.served.to_string(),
                r.ug.to_string(),
            ])
            .map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}

pub fn write_series_csv(experiment: u32, series: &[GroupSeries], path: &Path) -> Result<(), ReportError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(SERIES_HEADER).map_err(csv_err(path))?;
    for s in series {
        for p in &s.points {
            w.write_record([
                experiment.to_string(),
                s.group.name().to_string(),
                p.interaction_index.to_string(),
                p.mean_ug.to_string(),
                p.n.to_string(),
            ])
            .map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}

fn parse_group(name: &str) -> Option<Group> {
    Group::ALL.into_iter().find(|g| g.name() == name)
}

/// Reads a series file back; groups keep their order of first appearance.
pub fn read_series_csv(path: &Path) -> Result<Vec<GroupSeries>, ReportError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut out: Vec<GroupSeries> = Vec::new();
    for row in r.records() {
        let row = row.map_err(csv_err(path))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let bad = |message: &str| ReportError::Parse {
            path: path.to_path_buf(),
            line,
            message: message.to_string(),
        };
        if row.len() != SERIES_HEADER.len() {
            return Err(bad("wrong number of fields"));
        }
        let group = parse_group(&row[1]).ok_or_else(|| bad("unknown group"))?;
        let point = SeriesPoint {
            interaction_index: row[2].parse().map_err(|_| bad("bad interaction_index"))?,
            mean_ug: row[3].parse().map_err(|_| bad("bad mean_ug"))?,
            n: row[4].parse().map_err(|_| bad("bad n"))?,
        };
        match out.iter_mut().find(|s| s.group == group) {
            Some(s) => s.points.push(point),
            None => out.push(GroupSeries {
                group,
                points: vec![point],
            }),
        }
    }
    Ok(out)
}

/// Pairwise Welch tests on per-run mean UG.
pub fn pairwise_tests(result: &ExperimentResult) -> Vec<(Group, Group, Result<TTestResult, super::stats::StatsError>)> {
    let means: Vec<Vec<f64>> = Group::ALL.iter().map(|g| result.run_means(*g, None)).collect();
    let pairs = [(0, 1), (0, 2), (1, 2)];
    pairs
        .into_iter()
        .map(|(i, j)| (Group::ALL[i], Group::ALL[j], welch_t_test(&means[i], &means[j])))
        .collect()
}

pub fn summary_text(result: &ExperimentResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "experiment {}  runs {}  base seed {}", result.id, result.logs.len(), result.base_seed);
    let _ = writeln!(s);
    let _ = writeln!(s, "per-run mean UG");
    for g in Group::ALL {
        let m = result.run_means(g, None);
        let avg = if m.is_empty() { f64::NAN } else { super::stats::mean(&m) };
        let _ = writeln!(s, "  {:<10} {:>8.4}  (runs {})", g.name(), avg, m.len());
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "Welch t-tests, 95% two-sided");
    for (a, b, r) in pairwise_tests(result) {
        match r {
            Ok(t) => {
                let _ = writeln!(
                    s,
                    "  {} vs {}: t = {:.4}, df = {:.2}, {}",
                    a.name(),
                    b.name(),
                    t.t,
                    t.df,
                    if t.significant { "significant" } else { "not significant" }
                );
            }
            Err(e) => {
                let _ = writeln!(s, "  {} vs {}: {e}", a.name(), b.name());
            }
        }
    }
    s
}

pub fn write_summary(result: &ExperimentResult, path: &Path) -> Result<(), ReportError> {
    fs::write(path, summary_text(result)).map_err(io_err(path))
}
