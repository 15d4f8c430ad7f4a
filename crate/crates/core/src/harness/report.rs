use std::path::Path;

use crate::error::{Error, Result};
use crate::models::ModelKind;

pub const CSV_HEADER: &str = "S,model,mean_redundancy_nats,std_dev,trials";

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub segments: u64,
    pub model: ModelKind,
    pub mean: f64,
    pub std_dev: f64,
    pub trials: u64,
}

/// Rows sorted by segment count, then model name.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn new(mut rows: Vec<ResultRow>) -> Self {
        rows.sort_by(|a, b| (a.segments, a.model.name()).cmp(&(b.segments, b.model.name())));
        ResultTable { rows }
    }

    pub fn rows(&self) -> &[ResultRow] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Models present, in table order of first appearance.
    pub fn models(&self) -> Vec<ModelKind> {
        let mut out: Vec<ModelKind> = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.model) {
                out.push(r.model);
            }
        }
        out
    }

    pub fn get(&self, segments: u64, model: ModelKind) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.segments == segments && r.model == model)
    }

    /// `(S, mean)` points for one model, ascending in `S`.
    pub fn series(&self, model: ModelKind) -> Vec<(u64, f64)> {
        self.rows
            .iter()
            .filter(|r| r.model == model)
            .map(|r| (r.segments, r.mean))
            .collect()
    }

    /// Average of a model's means over the segment counts in `range`.
    pub fn average_mean(
        &self,
        model: ModelKind,
        range: std::ops::RangeInclusive<u64>,
    ) -> Option<f64> {
        let v: Vec<f64> = self
            .series(model)
            .into_iter()
            .filter(|(s, _)| range.contains(s))
            .map(|(_, m)| m)
            .collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.segments, r.model, r.mean, r.std_dev, r.trials
            ));
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(CSV_HEADER) {
            return Err(Error::Format("missing or wrong CSV header".into()));
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Format(format!("row {}: bad {what}", i + 1));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 5 {
                return Err(bad("field count"));
            }
            rows.push(ResultRow {
                segments: f[0].parse().map_err(|_| bad("S"))?,
                model: f[1].parse().map_err(|_| bad("model"))?,
                mean: f[2].parse().map_err(|_| bad("mean"))?,
                std_dev: f[3].parse().map_err(|_| bad("std_dev"))?,
                trials: f[4].parse().map_err(|_| bad("trials"))?,
            });
        }
        Ok(ResultTable::new(rows))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}
