//! Risk tables: rows are positions, columns are configured measures.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::value::RawValue;

use crate::config::ReportConfig;
use crate::scenario::ScenarioTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Text,
}

pub type Cell = Result<f64, String>;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub seed: u64,
    pub measures: Vec<String>,
    pub rows: Vec<(String, Vec<Cell>)>,
}

impl Report {
    pub fn has_errors(&self) -> bool {
        self.rows.iter().flat_map(|(_, c)| c).any(Result::is_err)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
            OutputFormat::Text => self.to_text(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header = std::iter::once("position").chain(self.measures.iter().map(String::as_str));
        w.write_record(header).expect("in-memory write");
        for (name, cells) in &self.rows {
            let row = std::iter::once(name.clone()).chain(cells.iter().map(|c| match c {
                Ok(v) => fmt_exact(*v),
                Err(e) => format!("ERROR: {e}"),
            }));
            w.write_record(row).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        #[serde(untagged)]
        enum JsonCell {
            Value(Box<RawValue>),
            Error { error: String },
        }
        #[derive(Serialize)]
        struct Row<'a> {
            position: &'a str,
            values: Vec<JsonCell>,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            seed: u64,
            measures: &'a [String],
            rows: Vec<Row<'a>>,
        }
        let doc = Doc {
            seed: self.seed,
            measures: &self.measures,
            rows: self
                .rows
                .iter()
                .map(|(name, cells)| Row {
                    position: name,
                    values: cells
                        .iter()
                        .map(|c| match c {
                            Ok(v) => JsonCell::Value(
                                RawValue::from_string(fmt_exact(*v)).expect("valid JSON number"),
                            ),
                            Err(e) => JsonCell::Error { error: e.clone() },
                        })
                        .collect(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("serialisable");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let cell = |c: &Cell| match c {
            Ok(v) => format!("{:.6}", zero_sign(*v)),
            Err(_) => "ERROR".to_owned(),
        };
        let mut table: Vec<Vec<String>> = vec![std::iter::once("position".to_owned())
            .chain(self.measures.iter().cloned())
            .collect()];
        for (name, cells) in &self.rows {
            table.push(
                std::iter::once(name.clone())
                    .chain(cells.iter().map(cell))
                    .collect(),
            );
        }
        let ncols = table[0].len();
        let widths: Vec<usize> = (0..ncols)
            .map(|j| {
                table
                    .iter()
                    .map(|r| r[j].chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();

        let mut out = format!("seed: {}\n", self.seed);
        for row in &table {
            let line: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    let pad = widths[j] - s.chars().count();
                    if j == 0 {
                        format!("{s}{}", " ".repeat(pad))
                    } else {
                        format!("{}{s}", " ".repeat(pad))
                    }
                })
                .collect();
            writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
        }
        for (name, cells) in &self.rows {
            for (m, c) in self.measures.iter().zip(cells) {
                if let Err(e) = c {
                    writeln!(out, "error [{name}, {m}]: {e}").unwrap();
                }
            }
        }
        out
    }
}

fn zero_sign(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

/// 17 significant digits: enough to round-trip any f64.
pub fn fmt_exact(v: f64) -> String {
    format!("{:.16e}", zero_sign(v))
}

/// Evaluates every (position, measure) cell; failures are recorded in place.
pub fn report(table: &ScenarioTable, config: &ReportConfig) -> Report {
    let rows = table
        .positions
        .iter()
        .map(|(name, x)| {
            let cells = config
                .measures
                .iter()
                .map(|m| m.spec.evaluate(&table.space, x).map_err(|e| e.to_string()))
                .collect();
            (name.clone(), cells)
        })
        .collect();
    Report {
        seed: config.seed,
        measures: config.measures.iter().map(|m| m.name.clone()).collect(),
        rows,
    }
}
