//! Scenario tables: one probability column and one outcome column per
//! named position.

use std::fmt;
use std::path::Path;

use monrisk::{FiniteProbSpace, Position};
use serde::de::{Deserializer, MapAccess, Visitor};
use serde::Deserialize;

use crate::error::{read, CliError, CliResult};

/// Probabilities may be off by at most this much before renormalisation.
pub const RENORMALIZE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioFormat {
    Csv,
    Json,
}

impl ScenarioFormat {
    /// `.json` files are JSON, anything else is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Self::Json,
            _ => Self::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioTable {
    pub space: FiniteProbSpace,
    /// Positions in file order.
    pub positions: Vec<(String, Position)>,
}

impl ScenarioTable {
    pub fn get(&self, name: &str) -> CliResult<&Position> {
        self.positions
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, x)| x)
            .ok_or_else(|| CliError::UnknownPosition(name.to_owned()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.positions.iter().map(|(n, _)| n.as_str())
    }
}

pub fn ingest(path: &Path, format: ScenarioFormat) -> CliResult<ScenarioTable> {
    let text = read(path)?;
    match format {
        ScenarioFormat::Csv => parse_csv(&text),
        ScenarioFormat::Json => parse_json(&text),
    }
    .map_err(|e| match e {
        CliError::Input(msg) => CliError::Input(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_csv(text: &str) -> CliResult<ScenarioTable> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Input(e.to_string()))?
        .iter()
        .map(str::to_owned)
        .collect();
    let prob_col = headers
        .iter()
        .position(|h| h == "prob")
        .ok_or_else(|| CliError::Input("missing 'prob' column".into()))?;

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); headers.len()];
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Input(e.to_string()))?;
        for (col, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                CliError::Input(format!(
                    "row {}, column '{}': '{cell}' is not a number",
                    row + 2,
                    headers[col]
                ))
            })?;
            columns[col].push(v);
        }
    }
    let probs = std::mem::take(&mut columns[prob_col]);
    let named = headers
        .into_iter()
        .zip(columns)
        .enumerate()
        .filter(|(i, _)| *i != prob_col)
        .map(|(_, nc)| nc)
        .collect();
    build(probs, named)
}

pub fn parse_json(text: &str) -> CliResult<ScenarioTable> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Raw {
        probs: Vec<f64>,
        positions: Ordered,
    }
    let raw: Raw = serde_json::from_str(text).map_err(|e| CliError::Input(e.to_string()))?;
    build(raw.probs, raw.positions.0)
}

fn build(probs: Vec<f64>, named: Vec<(String, Vec<f64>)>) -> CliResult<ScenarioTable> {
    if probs.is_empty() {
        return Err(CliError::Input("no scenarios".into()));
    }
    if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(CliError::Input(format!(
            "probability {p} is not a finite nonnegative number"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > RENORMALIZE_TOL {
        return Err(CliError::Input(format!(
            "probabilities sum to {total}, more than {RENORMALIZE_TOL:e} away from 1"
        )));
    }
    let space = FiniteProbSpace::new(probs.iter().map(|p| p / total).collect())?;

    let mut positions: Vec<(String, Position)> = Vec::with_capacity(named.len());
    for (name, values) in named {
        if positions.iter().any(|(n, _)| *n == name) {
            return Err(CliError::Input(format!("duplicate position name '{name}'")));
        }
        if values.len() != space.len() {
            return Err(CliError::Input(format!(
                "position '{name}' has {} outcomes, expected {}",
                values.len(),
                space.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(CliError::Input(format!(
                "position '{name}' has non-finite outcome {v}"
            )));
        }
        positions.push((name, Position::new(values)?));
    }
    Ok(ScenarioTable { space, positions })
}

/// A JSON object kept in document order, duplicates included.
struct Ordered(Vec<(String, Vec<f64>)>);

impl<'de> Deserialize<'de> for Ordered {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Ordered;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping position names to outcome arrays")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Ordered, A::Error> {
                let mut out = Vec::new();
                while let Some(entry) = map.next_entry::<String, Vec<f64>>()? {
                    out.push(entry);
                }
                Ok(Ordered(out))
            }
        }
        d.deserialize_map(V)
    }
}
