//! Report envelope and output rendering.

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use towerdyn::conditions::{push_csv, CSV_HEADER};
use towerdyn::Rational;
use towerdyn::REPORT_SCHEMA;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Everything that determines a run; echoed into every JSON report.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub system: Value,
    pub horizon: i64,
    pub schedule: String,
    pub epsilon: String,
    pub resolution: u32,
    pub p: String,
    pub seed: u64,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema: &'static str,
    seed: u64,
    config: &'a RunConfig,
    report: &'a Value,
}

/// A computed result in every output shape it supports.
pub struct Rendered {
    pub report: Value,
    pub csv: String,
    /// Bare value for scalar commands, printed when no format is requested.
    pub plain: Option<String>,
}

impl Rendered {
    pub fn new<T: Serialize>(report: &T, csv: String) -> Self {
        Rendered { report: serde_json::to_value(report).expect("report serializes"), csv, plain: None }
    }

    pub fn scalar<T: Serialize>(report: &T, csv: String, plain: String) -> Self {
        Rendered { plain: Some(plain), ..Rendered::new(report, csv) }
    }

    pub fn emit(&self, cfg: &RunConfig, format: Option<Format>) -> String {
        match (format, &self.plain) {
            (None, Some(p)) => format!("{p}\n"),
            (Some(Format::Csv), _) => self.csv.clone(),
            _ => {
                let env = Envelope { schema: REPORT_SCHEMA, seed: cfg.seed, config: cfg, report: &self.report };
                let mut s = serde_json::to_string_pretty(&env).expect("envelope serializes");
                s.push('\n');
                s
            }
        }
    }
}

/// CSV with the fixed header from `(n, value, tag)` rows.
pub fn csv_rows<'a, I: IntoIterator<Item = (i64, &'a Rational, &'a str)>>(rows: I) -> String {
    let mut out = String::from(CSV_HEADER);
    for (n, v, tag) in rows {
        push_csv(&mut out, n, v, tag);
    }
    out
}

/// Concatenates CSV documents, keeping one header.
pub fn csv_concat(parts: &[String]) -> String {
    let mut out = String::from(CSV_HEADER);
    for p in parts {
        out.push_str(p.strip_prefix(CSV_HEADER).unwrap_or(p));
    }
    out
}
