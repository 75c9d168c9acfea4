use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::Result;

/// One long-format row. `stderr`, `K` and `seed` are empty where they do not apply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub experiment: String,
    pub method: String,
    pub time: f64,
    pub value: f64,
    pub stderr: Option<f64>,
    #[serde(rename = "K")]
    pub k: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    rows: Vec<Row>,
}

impl ResultTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    /// Appends one curve: a row per `(time, value)`, with optional standard errors.
    #[allow(clippy::too_many_arguments)]
    pub fn push_curve(
        &mut self,
        experiment: &str,
        method: &str,
        times: &[f64],
        values: &[f64],
        stderr: Option<&[f64]>,
        k: Option<usize>,
        seed: Option<u64>,
    ) {
        for (i, (&time, &value)) in times.iter().zip(values).enumerate() {
            self.rows.push(Row {
                experiment: experiment.to_string(),
                method: method.to_string(),
                time,
                value,
                stderr: stderr.map(|s| s[i]),
                k,
                seed,
            });
        }
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows of one curve in time order.
    pub fn curve(&self, method: &str, k: Option<usize>) -> Vec<&Row> {
        self.rows
            .iter()
            .filter(|r| r.method == method && r.k == k)
            .collect()
    }

    /// Stable sort by (experiment, method, time, K).
    pub fn sort(&mut self) {
        self.rows.sort_by(|a, b| {
            a.experiment
                .cmp(&b.experiment)
                .then_with(|| a.method.cmp(&b.method))
                .then_with(|| a.time.total_cmp(&b.time))
                .then_with(|| a.k.cmp(&b.k))
        });
    }

    pub fn is_sorted(&self) -> bool {
        self.rows.windows(2).all(|w| {
            (&w[0].experiment, &w[0].method)
                .cmp(&(&w[1].experiment, &w[1].method))
                .then_with(|| w[0].time.total_cmp(&w[1].time))
                .then_with(|| w[0].k.cmp(&w[1].k))
                != Ordering::Greater
        })
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rows = r.deserialize().collect::<std::result::Result<_, _>>()?;
        Ok(ResultTable { rows })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphInfo {
    pub nodes: usize,
    pub edges: usize,
    pub max_degree: usize,
    pub spectral_radius: f64,
}

/// Run record written next to the table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub library: &'static str,
    pub version: &'static str,
    pub runner: &'static str,
    pub config: RunConfig,
    pub graph: GraphInfo,
    /// Choices made at run time (horizons, sources, t*).
    pub notes: BTreeMap<String, String>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub table: ResultTable,
    pub manifest: Manifest,
}

impl ExperimentOutput {
    /// Writes `<id>.csv` and `<id>.manifest.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let id = &self.manifest.config.id;
        let csv_path = dir.join(format!("{id}.csv"));
        let json_path = dir.join(format!("{id}.manifest.json"));
        std::fs::write(&csv_path, self.table.to_csv_string()?)?;
        let mut json = serde_json::to_string_pretty(&self.manifest)?;
        json.push('\n');
        std::fs::write(&json_path, json)?;
        Ok((csv_path, json_path))
    }
}
