//! Persisted episode rows and their summaries.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

pub use crate::pamcts::Metric;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One executed episode, as written to the results CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub run_id: String,
    pub env: String,
    pub params_json: String,
    pub agent: String,
    pub alpha: f64,
    pub iterations: usize,
    pub episode: usize,
    pub seed: u64,
    pub steps: usize,
    pub return_discounted: f64,
    pub return_undiscounted: f64,
}

impl EpisodeRecord {
    /// The fields that describe what happened, without run labels.
    pub fn outcome(&self) -> (usize, u64, usize, f64, f64) {
        (
            self.episode,
            self.seed,
            self.steps,
            self.return_discounted,
            self.return_undiscounted,
        )
    }
}

pub fn write_records<W: Write>(writer: W, records: &[EpisodeRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(reader: R) -> Result<Vec<EpisodeRecord>> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

pub fn write_records_file(path: &Path, records: &[EpisodeRecord]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    write_records(std::fs::File::create(path)?, records)
}

pub fn read_records_file(path: &Path) -> Result<Vec<EpisodeRecord>> {
    read_records(std::fs::File::open(path)?)
}

/// Mean and standard error of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Population standard deviation over `sqrt(n)`.
    pub stderr: f64,
    pub n: usize,
}

pub fn summarize(values: &[f64]) -> Result<Summary> {
    if values.is_empty() {
        return Err(Error::Domain("cannot summarize an empty sample".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok(Summary {
        mean,
        stderr: var.sqrt() / n.sqrt(),
        n: values.len(),
    })
}

pub fn metric_for_env(env: &str) -> Metric {
    if env == "cliff-walk" {
        Metric::Discounted
    } else {
        Metric::Undiscounted
    }
}

impl Metric {
    pub fn of(&self, r: &EpisodeRecord) -> f64 {
        match self {
            Metric::Discounted => r.return_discounted,
            Metric::Undiscounted => r.return_undiscounted,
        }
    }
}

/// One line of a results table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub env: String,
    pub setting: String,
    pub agent: String,
    pub alpha: f64,
    pub metric: Metric,
    pub mean: f64,
    pub stderr: f64,
    pub n: usize,
}

/// Group records by run, environment setting and agent and summarize each
/// group on its environment's metric. Rows come out in sorted key order.
pub fn summarize_records(records: &[EpisodeRecord]) -> Result<Vec<TableRow>> {
    if records.is_empty() {
        return Err(Error::Domain("no records to summarize".into()));
    }
    let mut groups: BTreeMap<(String, String, String, String), Vec<&EpisodeRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.run_id.clone(), r.env.clone(), r.params_json.clone(), r.agent.clone()))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((_, env, setting, agent), rows)| {
            let metric = metric_for_env(&env);
            let values: Vec<f64> = rows.iter().map(|r| metric.of(r)).collect();
            let s = summarize(&values)?;
            Ok(TableRow {
                alpha: rows[0].alpha,
                env,
                setting,
                agent,
                metric,
                mean: s.mean,
                stderr: s.stderr,
                n: s.n,
            })
        })
        .collect()
}
