//! Evaluation reports as JSON, CSV or markdown.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use edrm_core::metrics::table_cell;
use edrm_core::{ConfusionMatrix, DecisionTrace, MetricsReport};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "markdown" | "md" => Ok(Self::Markdown),
            other => Err(Error::Usage(format!("unknown report format {other:?}"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Json => "json",
            Self::Csv => "csv",
            Self::Markdown => "markdown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub fp: u64,
    pub tn: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl From<[f64; 4]> for Metrics {
    fn from([accuracy, precision, recall, f1]: [f64; 4]) -> Self {
        Self {
            accuracy,
            precision,
            recall,
            f1,
        }
    }
}

/// The JSON report document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub counts: Counts,
    pub metrics: Metrics,
    pub flags: Vec<String>,
    pub rounded_2dp: Metrics,
}

impl ReportDocument {
    pub fn new(report: &MetricsReport, cm: &ConfusionMatrix) -> Self {
        Self {
            counts: Counts {
                tp: cm.true_pos,
                fn_: cm.false_neg,
                fp: cm.false_pos,
                tn: cm.true_neg,
            },
            metrics: report.values().into(),
            flags: report.flags.names().into_iter().map(String::from).collect(),
            rounded_2dp: report.rounded_2dp().into(),
        }
    }
}

pub fn emit_report(
    report: &MetricsReport,
    cm: &ConfusionMatrix,
    format: ReportFormat,
    sink: &mut dyn Write,
) -> std::io::Result<()> {
    let doc = ReportDocument::new(report, cm);
    match format {
        ReportFormat::Json => {
            serde_json::to_writer_pretty(&mut *sink, &doc)?;
            writeln!(sink)
        }
        ReportFormat::Csv => {
            writeln!(sink, "tp,fn,fp,tn,accuracy,precision,recall,f1,flags")?;
            let m = &doc.metrics;
            writeln!(
                sink,
                "{},{},{},{},{},{},{},{},{}",
                cm.true_pos,
                cm.false_neg,
                cm.false_pos,
                cm.true_neg,
                m.accuracy,
                m.precision,
                m.recall,
                m.f1,
                doc.flags.join(";")
            )
        }
        ReportFormat::Markdown => {
            writeln!(sink, "| | Predicted Positive | Predicted Negative |")?;
            writeln!(sink, "|---|---|---|")?;
            writeln!(sink, "| Positive | {} | {} |", cm.true_pos, cm.false_neg)?;
            writeln!(sink, "| Negative | {} | {} |", cm.false_pos, cm.true_neg)?;
            writeln!(sink)?;
            writeln!(sink, "| | Accuracy | Precision | Recall | F1 Score |")?;
            writeln!(sink, "|---|---|---|---|---|")?;
            let cells: Vec<String> = report.values().iter().map(|&v| table_cell(v)).collect();
            writeln!(sink, "| Detector | {} |", cells.join(" | "))?;
            if !doc.flags.is_empty() {
                writeln!(sink)?;
                writeln!(sink, "Flags: {}", doc.flags.join(", "))?;
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub label: String,
    pub d_pos: f64,
    pub d_neg: f64,
    pub margin: f64,
    pub method: String,
}

impl From<&DecisionTrace> for TraceRecord {
    fn from(t: &DecisionTrace) -> Self {
        Self {
            label: t.label.to_string(),
            d_pos: t.d_pos,
            d_neg: t.d_neg,
            margin: t.margin,
            method: t.method.to_string(),
        }
    }
}

/// `{"trace": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDocument {
    pub trace: TraceRecord,
}
