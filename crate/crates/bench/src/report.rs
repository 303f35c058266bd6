//! Experiment results and their file renderings.
//!
//! Every emitted file is a pure function of the report, so re-emitting a
//! report, or emitting reports of two runs that differ only in worker count,
//! gives identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use oexnrule::metrics::{Metric, MetricRecord};
use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::config::{ExperimentConfig, Method};
use crate::error::BenchError;
use crate::reference::{self, Table};

/// Test-set scores of one method at one `k` on one repeat.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub dataset: String,
    pub method: Method,
    pub k: usize,
    pub repeat: usize,
    /// Digest of the train/test partition this record was scored on.
    pub split_digest: String,
    pub metrics: MetricRecord,
}

/// Means over repeats for one (dataset, method, k).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub dataset: String,
    pub method: Method,
    pub k: usize,
    pub repeats: usize,
    pub accuracy: f64,
    pub kappa: f64,
    pub brier: f64,
}

impl Aggregate {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Accuracy => self.accuracy,
            Metric::Kappa => self.kappa,
            Metric::Brier => self.brier,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetInfo {
    pub id: String,
    /// Content digest of the dataset as used, noise columns included.
    pub digest: String,
    pub n_rows: usize,
    pub n_features: usize,
    /// `[class 0, class 1]`.
    pub class_counts: [usize; 2],
    /// Resolved `p'` for the ensemble.
    pub subspace_size: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetFailure {
    pub dataset: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub master_seed: u64,
    pub config: ExperimentConfig,
    pub datasets: Vec<DatasetInfo>,
    /// Split digest of every repeat, per dataset.
    pub split_digests: BTreeMap<String, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub provenance: Provenance,
    /// Sorted by dataset (config order), method, k, repeat.
    pub records: Vec<RunRecord>,
    pub aggregates: Vec<Aggregate>,
    pub failures: Vec<DatasetFailure>,
}

/// Arithmetic means of the records, grouped by (dataset, method, k) in the
/// order the groups first appear. Values are summed in repeat order.
pub fn aggregate(records: &[RunRecord]) -> Vec<Aggregate> {
    let mut groups: Vec<(&str, Method, usize, Vec<&RunRecord>)> = Vec::new();
    for r in records {
        match groups
            .iter_mut()
            .find(|g| g.0 == r.dataset && g.1 == r.method && g.2 == r.k)
        {
            Some(g) => g.3.push(r),
            None => groups.push((&r.dataset, r.method, r.k, vec![r])),
        }
    }
    groups
        .into_iter()
        .map(|(dataset, method, k, mut rs)| {
            rs.sort_by_key(|r| r.repeat);
            let mean = |m: Metric| rs.iter().map(|r| m.of(&r.metrics)).sum::<f64>() / rs.len() as f64;
            Aggregate {
                dataset: dataset.to_string(),
                method,
                k,
                repeats: rs.len(),
                accuracy: mean(Metric::Accuracy),
                kappa: mean(Metric::Kappa),
                brier: mean(Metric::Brier),
            }
        })
        .collect()
}

impl ExperimentReport {
    /// Dataset ids with records, in report order.
    pub fn dataset_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = Vec::new();
        for a in &self.aggregates {
            if !ids.contains(&a.dataset.as_str()) {
                ids.push(&a.dataset);
            }
        }
        ids
    }

    /// Table rows `(method, k)` in sorted order.
    pub fn rows(&self) -> Vec<(Method, usize)> {
        let mut rows: Vec<(Method, usize)> = self.aggregates.iter().map(|a| (a.method, a.k)).collect();
        rows.sort();
        rows.dedup();
        rows
    }

    pub fn find(&self, dataset: &str, method: Method, k: usize) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.dataset == dataset && a.method == method && a.k == k)
    }

    /// Whether every method and k of each repeat saw the same split.
    pub fn splits_are_shared(&self) -> bool {
        self.records.iter().all(|r| {
            self.provenance
                .split_digests
                .get(&r.dataset)
                .and_then(|d| d.get(r.repeat))
                == Some(&r.split_digest)
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, BenchError> {
        serde_json::from_str(text).map_err(|e| BenchError::ReportFormat(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        Self::from_json(&text)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

impl Format {
    pub const ALL: [Format; 3] = [Format::Csv, Format::Json, Format::Markdown];
}

impl FromStr for Format {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "markdown" | "md" => Ok(Format::Markdown),
            _ => Err(BenchError::Config(format!(
                "unknown format {s:?} (expected csv, json or markdown)"
            ))),
        }
    }
}

fn row_label(method: Method, k: usize) -> String {
    format!("{} (k={k})", method.display_name())
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, BenchError> {
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| BenchError::io(&path, e))?;
    Ok(path)
}

fn ensure_dir(dir: &Path) -> Result<(), BenchError> {
    std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))
}

/// Long format, one line per record.
pub fn records_csv(report: &ExperimentReport) -> String {
    let mut s = String::from("dataset,method,k,repeat,split_digest,n_test,accuracy,kappa,brier\n");
    for r in &report.records {
        let m = &r.metrics;
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            r.dataset, r.method, r.k, r.repeat, r.split_digest, m.n_test, m.accuracy, m.kappa, m.brier
        );
    }
    s
}

/// Methods as rows, datasets as columns, full precision.
pub fn aggregate_csv(report: &ExperimentReport, metric: Metric) -> String {
    let ids = report.dataset_ids();
    let mut s = String::from("method,k");
    for id in &ids {
        let _ = write!(s, ",{id}");
    }
    s.push('\n');
    for (method, k) in report.rows() {
        let _ = write!(s, "{method},{k}");
        for id in &ids {
            match report.find(id, method, k) {
                Some(a) => {
                    let _ = write!(s, ",{}", a.get(metric));
                }
                None => s.push(','),
            }
        }
        s.push('\n');
    }
    s
}

fn is_best(metric: Metric, value: f64, column: &[Option<f64>]) -> bool {
    let values = column.iter().flatten();
    let best = if metric.higher_is_better() {
        values.fold(f64::NEG_INFINITY, |a, &b| a.max(b))
    } else {
        values.fold(f64::INFINITY, |a, &b| a.min(b))
    };
    value == best
}

fn fmt3(v: f64) -> String {
    format!("{v:.3}")
}

/// Renders one table with a bold best value per column and a row-mean
/// column. `cells[row][col]`.
fn markdown_table(metric: Metric, columns: &[String], rows: &[(String, Vec<Option<f64>>)]) -> String {
    let means: Vec<Option<f64>> = rows
        .iter()
        .map(|(_, cells)| {
            let present: Vec<f64> = cells.iter().flatten().copied().collect();
            (present.len() == cells.len() && !present.is_empty())
                .then(|| present.iter().sum::<f64>() / present.len() as f64)
        })
        .collect();
    let mut s = String::from("| Method |");
    for c in columns {
        let _ = write!(s, " {c} |");
    }
    s.push_str(" Mean |\n|---|");
    for _ in 0..=columns.len() {
        s.push_str("---:|");
    }
    s.push('\n');
    for (i, (label, cells)) in rows.iter().enumerate() {
        let _ = write!(s, "| {label} |");
        for (j, cell) in cells.iter().chain(std::iter::once(&means[i])).enumerate() {
            let column: Vec<Option<f64>> = if j < columns.len() {
                rows.iter().map(|(_, c)| c[j]).collect()
            } else {
                means.clone()
            };
            match cell {
                Some(v) if is_best(metric, *v, &column) => {
                    let _ = write!(s, " **{}** |", fmt3(*v));
                }
                Some(v) => {
                    let _ = write!(s, " {} |", fmt3(*v));
                }
                None => s.push_str(" - |"),
            }
        }
        s.push('\n');
    }
    s
}

/// Aggregate tables per metric, then published values for the datasets that
/// match the benchmark catalog.
pub fn markdown_report(report: &ExperimentReport) -> String {
    let ids: Vec<String> = report.dataset_ids().into_iter().map(String::from).collect();
    let p = &report.provenance;
    let mut s = String::from("# Benchmark report\n\n");
    let _ = writeln!(
        s,
        "{} {}, master seed {}, {} repeats, train fraction {}, B = {}, selection {}, subspace {}, distance exponent {}{}{}.\n",
        p.tool,
        p.version,
        p.master_seed,
        p.config.repeats,
        p.config.train_fraction,
        p.config.ensemble.n_models,
        p.config.ensemble.select_fraction,
        p.config.ensemble.subspace,
        p.config.distance.exponent(),
        if p.config.contrived { ", contrived features" } else { "" },
        if p.config.standardize { ", standardized" } else { "" },
    );
    for metric in Metric::ALL {
        let _ = writeln!(s, "## {}\n", title(metric));
        let rows: Vec<(String, Vec<Option<f64>>)> = report
            .rows()
            .into_iter()
            .map(|(m, k)| {
                let cells = ids
                    .iter()
                    .map(|id| report.find(id, m, k).map(|a| a.get(metric)))
                    .collect();
                (row_label(m, k), cells)
            })
            .collect();
        s.push_str(&markdown_table(metric, &ids, &rows));
        s.push('\n');
    }

    if !report.failures.is_empty() {
        s.push_str("## Failed datasets\n\n");
        for f in &report.failures {
            let _ = writeln!(s, "- {}: {}", f.dataset, f.message);
        }
        s.push('\n');
    }

    let known: Vec<(&String, char)> = ids
        .iter()
        .filter_map(|id| catalog::lookup(id).map(|e| (id, e.letter)))
        .collect();
    if !known.is_empty() {
        let table = if p.config.contrived {
            Table::Contrived
        } else {
            Table::Original
        };
        s.push_str("## Published values\n\n");
        s.push_str("Quoted for comparison, not computed here.\n\n");
        let columns: Vec<String> = known.iter().map(|(id, _)| (*id).clone()).collect();
        for metric in Metric::ALL {
            let rows: Vec<(String, Vec<Option<f64>>)> = reference::PUBLISHED_METHODS
                .iter()
                .map(|&m| {
                    let cells = known
                        .iter()
                        .map(|&(_, letter)| reference::lookup(table, metric.name(), m, letter, None))
                        .collect();
                    (m.to_string(), cells)
                })
                .filter(|(_, cells): &(String, Vec<Option<f64>>)| cells.iter().any(Option::is_some))
                .collect();
            if rows.is_empty() {
                continue;
            }
            let _ = writeln!(s, "### {}\n", title(metric));
            s.push_str(&markdown_table(metric, &columns, &rows));
            s.push('\n');
        }
    }
    s
}

fn title(metric: Metric) -> &'static str {
    match metric {
        Metric::Accuracy => "Accuracy",
        Metric::Kappa => "Kappa",
        Metric::Brier => "Brier score",
    }
}

/// Writes the requested renderings into `out_dir` and returns the written
/// paths. `records.csv` is always written.
pub fn emit_report(report: &ExperimentReport, formats: &[Format], out_dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    if report.records.is_empty() {
        return Err(BenchError::EmptyReport);
    }
    ensure_dir(out_dir)?;
    let mut formats = formats.to_vec();
    formats.sort();
    formats.dedup();
    let mut written = vec![write_file(out_dir, "records.csv", &records_csv(report))?];
    for format in formats {
        match format {
            Format::Csv => {
                for metric in Metric::ALL {
                    let name = format!("{}.csv", metric.name());
                    written.push(write_file(out_dir, &name, &aggregate_csv(report, metric))?);
                }
            }
            Format::Json => written.push(write_file(out_dir, "report.json", &report.to_json())?),
            Format::Markdown => written.push(write_file(out_dir, "report.md", &markdown_report(report))?),
        }
    }
    Ok(written)
}

/// Long format per metric: `dataset,method,k,repeat,value`.
pub fn boxplot_csv(report: &ExperimentReport, metric: Metric) -> String {
    let mut s = String::from("dataset,method,k,repeat,value\n");
    for r in &report.records {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.dataset,
            r.method,
            r.k,
            r.repeat,
            metric.of(&r.metrics)
        );
    }
    s
}

/// Writes `boxplot_<metric>.csv` for each metric.
pub fn emit_boxplot_data(report: &ExperimentReport, out_dir: &Path) -> Result<Vec<PathBuf>, BenchError> {
    if report.records.is_empty() {
        return Err(BenchError::EmptyReport);
    }
    ensure_dir(out_dir)?;
    Metric::ALL
        .into_iter()
        .map(|metric| {
            write_file(
                out_dir,
                &format!("boxplot_{}.csv", metric.name()),
                &boxplot_csv(report, metric),
            )
        })
        .collect()
}
