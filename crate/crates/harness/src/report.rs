//! JSON report layout shared by every subcommand.
//!
//! Wall-clock timings are never written into a report so that reruns with
//! the same seed produce byte-identical output; the CLI prints them to
//! standard error instead.

use std::collections::BTreeMap;

use dcc_core::baselines::TestReport;
use dcc_core::DccResult;
use serde::{Deserialize, Serialize};

use crate::histogram::Histogram;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub model: String,
    pub dataset: String,
    pub pfa_u_star: f64,
    pub pfa_star: f64,
    /// Omitted (`null`) for replicated experiments, where only the
    /// per-replicate averages are kept.
    pub pfa_u_per_draw: Option<Vec<f64>>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub replicate: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub acceptance_rate: Option<f64>,
}

impl ResultRow {
    pub fn full(result: &DccResult, dataset: impl Into<String>) -> Self {
        Self {
            model: result.model.clone(),
            dataset: dataset.into(),
            pfa_u_star: result.pfa_u_star,
            pfa_star: result.pfa_star,
            pfa_u_per_draw: Some(result.pfa_u_per_draw.clone()),
            seed: result.config.seed,
            replicate: None,
            acceptance_rate: result.sampler.acceptance_rate,
        }
    }

    pub fn replicate(result: &DccResult, dataset: impl Into<String>, replicate: usize) -> Self {
        Self {
            pfa_u_per_draw: None,
            replicate: Some(replicate),
            ..Self::full(result, dataset)
        }
    }
}

/// One classical test, either a single application or a rejection rate
/// over replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineRow {
    pub test: String,
    pub dataset: String,
    pub n: usize,
    pub level: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub statistic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reject: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub rejection_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl BaselineRow {
    pub fn from_report(r: &TestReport, dataset: impl Into<String>) -> Self {
        Self {
            test: r.test.short_name().to_string(),
            dataset: dataset.into(),
            n: r.n,
            level: r.level,
            statistic: Some(r.statistic),
            p_value: r.p_value,
            threshold: r.threshold,
            reject: Some(r.reject),
            rejection_rate: None,
            note: None,
        }
    }

    pub fn rate(test: impl Into<String>, dataset: impl Into<String>, n: usize, level: f64, rate: f64) -> Self {
        Self {
            test: test.into(),
            dataset: dataset.into(),
            n,
            level,
            statistic: None,
            p_value: None,
            threshold: None,
            reject: None,
            rejection_rate: Some(rate),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// A labeled row of named numbers, e.g. one line of a rejection table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub table: String,
    pub label: String,
    pub values: BTreeMap<String, f64>,
}

impl SummaryRow {
    pub fn new(table: impl Into<String>, label: impl Into<String>) -> Self {
        Self {
            table: table.into(),
            label: label.into(),
            values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: f64) -> Self {
        self.values.insert(key.into(), value);
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Report {
    pub config: serde_json::Value,
    pub results: Vec<ResultRow>,
    pub baselines: Vec<BaselineRow>,
    pub histograms: Vec<Histogram>,
    #[serde(default)]
    pub summary: Vec<SummaryRow>,
}

impl Report {
    pub fn new(config: serde_json::Value) -> Self {
        Self {
            config,
            ..Default::default()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// First summary row of `table` with the given label.
    pub fn summary_row(&self, table: &str, label: &str) -> Option<&SummaryRow> {
        self.summary.iter().find(|r| r.table == table && r.label == label)
    }

    pub fn histogram(&self, label: &str) -> Option<&Histogram> {
        self.histograms.iter().find(|h| h.label == label)
    }
}
