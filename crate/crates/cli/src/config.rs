//! Report and profile configuration, read from TOML or JSON.

use std::collections::BTreeMap;
use std::path::Path;

use monrisk::axioms::{ProfileEntry, Property};
use monrisk::{LossFunction, LossShape, MixtureMeasure, RiskMeasureSpec, RiskSpectrum};
use serde::Deserialize;

use crate::error::{read, CliError, CliResult};

pub const DEFAULT_SEED: u64 = 42;

/// Measure parameters as written in a config file.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasureParams {
    ExpectedLoss,
    Var {
        alpha: f64,
    },
    Avar {
        alpha: f64,
    },
    WorstCase,
    Entropic {
        beta: f64,
    },
    Spectral {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    Shortfall {
        loss: LossShape,
        r0: f64,
    },
    /// `atoms` are `[α, weight]` pairs.
    Mixture {
        atoms: Vec<(f64, f64)>,
    },
    /// OCE form of the envelope, with the catalogue loss in its
    /// nonincreasing orientation.
    Envelope {
        loss: LossShape,
    },
}

impl MeasureParams {
    pub fn to_spec(&self) -> monrisk::Result<RiskMeasureSpec> {
        Ok(match self {
            Self::ExpectedLoss => RiskMeasureSpec::ExpectedLoss,
            Self::Var { alpha } => RiskMeasureSpec::var(*alpha)?,
            Self::Avar { alpha } => RiskMeasureSpec::avar(*alpha)?,
            Self::WorstCase => RiskMeasureSpec::WorstCase,
            Self::Entropic { beta } => RiskMeasureSpec::entropic(*beta)?,
            Self::Spectral {
                breakpoints,
                values,
            } => RiskMeasureSpec::Spectral(RiskSpectrum::new(breakpoints.clone(), values.clone())?),
            Self::Shortfall { loss, r0 } => {
                RiskMeasureSpec::shortfall(LossFunction::shortfall(*loss)?, *r0)?
            }
            Self::Mixture { atoms } => {
                RiskMeasureSpec::Mixture(MixtureMeasure::new(atoms.clone())?)
            }
            Self::Envelope { loss } => RiskMeasureSpec::envelope(LossFunction::oce(*loss)?)?,
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
struct RawMeasure {
    name: Option<String>,
    #[serde(flatten)]
    params: MeasureParams,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Largest accepted primal/dual gap in `dual-check`.
    pub dual: f64,
    /// Float slack in dominance inequalities.
    pub dominance: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            dual: 1e-9,
            dominance: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NamedMeasure {
    pub name: String,
    pub spec: RiskMeasureSpec,
}

#[derive(Debug, Clone)]
pub struct ReportConfig {
    pub measures: Vec<NamedMeasure>,
    pub alpha_grid: Vec<f64>,
    pub tolerances: Tolerances,
    pub seed: u64,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            measures: Vec::new(),
            alpha_grid: Vec::new(),
            tolerances: Tolerances::default(),
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    measures: Vec<RawMeasure>,
    #[serde(default)]
    alpha_grid: Vec<f64>,
    #[serde(default)]
    tolerances: Tolerances,
    seed: Option<u64>,
}

fn is_json(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, json: bool) -> CliResult<T> {
    if json {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    } else {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

impl ReportConfig {
    /// Reads a `.json` or (otherwise) TOML config file.
    pub fn load(path: &Path) -> CliResult<Self> {
        Self::parse(&read(path)?, is_json(path)).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str, json: bool) -> CliResult<Self> {
        let raw: RawConfig = parse(text, json)?;
        let measures = named_specs(raw.measures)?;
        if let Some(a) = raw.alpha_grid.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
            return Err(CliError::Config(format!(
                "alpha_grid value {a} is outside (0, 1]"
            )));
        }
        let tol = raw.tolerances;
        if !(tol.dual >= 0.0 && tol.dominance >= 0.0) {
            return Err(CliError::Config("tolerances must be nonnegative".into()));
        }
        Ok(Self {
            measures,
            alpha_grid: raw.alpha_grid,
            tolerances: tol,
            seed: raw.seed.unwrap_or(DEFAULT_SEED),
        })
    }
}

/// Default display name: the spec's own rendering.
fn named_specs(raw: Vec<RawMeasure>) -> CliResult<Vec<NamedMeasure>> {
    let mut out: Vec<NamedMeasure> = Vec::with_capacity(raw.len());
    for (i, m) in raw.into_iter().enumerate() {
        let spec = m
            .params
            .to_spec()
            .map_err(|e| CliError::Config(format!("measure #{}: {e}", i + 1)))?;
        let name = m.name.unwrap_or_else(|| spec.to_string());
        if out.iter().any(|n| n.name == name) {
            return Err(CliError::Config(format!("duplicate measure name '{name}'")));
        }
        out.push(NamedMeasure { name, spec });
    }
    Ok(out)
}

/// Reads an expected-property profile: a list of measures, each with a
/// `claims` table mapping property names to the expected outcome.
pub fn load_profile(path: &Path) -> CliResult<Vec<ProfileEntry>> {
    parse_profile(&read(path)?, is_json(path)).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_profile(text: &str, json: bool) -> CliResult<Vec<ProfileEntry>> {
    #[derive(Deserialize)]
    struct RawEntry {
        #[serde(flatten)]
        measure: RawMeasure,
        claims: BTreeMap<Property, bool>,
    }
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct RawProfile {
        entries: Vec<RawEntry>,
    }
    let raw: RawProfile = parse(text, json)?;
    let claims: Vec<Vec<(Property, bool)>> = raw
        .entries
        .iter()
        .map(|e| e.claims.iter().map(|(p, b)| (*p, *b)).collect())
        .collect();
    let named = named_specs(raw.entries.into_iter().map(|e| e.measure).collect())?;
    Ok(named
        .into_iter()
        .zip(claims)
        .map(|(m, claims)| ProfileEntry {
            name: m.name,
            spec: m.spec,
            claims,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use monrisk::MeasureKind;

    const TOML: &str = r#"
seed = 7
alpha_grid = [0.05, 0.5]

[tolerances]
dual = 1e-10

[[measures]]
name = "E-loss"
kind = "expected_loss"

[[measures]]
kind = "avar"
alpha = 0.5

[[measures]]
name = "short"
kind = "shortfall"
r0 = 1.0
loss = { type = "exponential", beta = 1.0 }

[[measures]]
name = "mix"
kind = "mixture"
atoms = [[0.1, 0.25], [1.0, 0.75]]

[[measures]]
name = "env"
kind = "envelope"
loss = { type = "hinge", alpha = 0.25 }
"#;

    #[test]
    fn toml_config() {
        let c = ReportConfig::parse(TOML, false).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.tolerances.dual, 1e-10);
        assert_eq!(c.tolerances.dominance, 1e-12);
        let kinds: Vec<MeasureKind> = c.measures.iter().map(|m| m.spec.kind()).collect();
        assert_eq!(
            kinds,
            [
                MeasureKind::ExpectedLoss,
                MeasureKind::Avar,
                MeasureKind::Shortfall,
                MeasureKind::Mixture,
                MeasureKind::Envelope
            ]
        );
        assert_eq!(c.measures[1].name, "avar(α=0.5)");
    }

    #[test]
    fn json_config() {
        let c = ReportConfig::parse(
            r#"{"measures": [{"name": "v", "kind": "var", "alpha": 0.3}, {"kind": "worst_case"}]}"#,
            true,
        )
        .unwrap();
        assert_eq!(c.seed, DEFAULT_SEED);
        assert_eq!(c.measures.len(), 2);
    }

    #[test]
    fn invalid_configs() {
        let bad = [
            r#"{"measures": [{"kind": "var", "alpha": 0}]}"#,
            r#"{"measures": [{"kind": "nope"}]}"#,
            r#"{"measures": [{"name": "a", "kind": "worst_case"}, {"name": "a", "kind": "expected_loss"}]}"#,
            r#"{"alpha_grid": [1.5]}"#,
            r#"{"measures": [{"kind": "shortfall", "r0": 1, "loss": {"type": "power", "p": -1}}]}"#,
            r#"{"tolerances": {"dual": -1}}"#,
        ];
        for text in bad {
            assert!(ReportConfig::parse(text, true).is_err(), "{text}");
        }
    }

    #[test]
    fn profile() {
        let p = parse_profile(
            r#"
[[entries]]
name = "v"
kind = "var"
alpha = 0.25
claims = { convex = true, cash_additive = true }
"#,
            false,
        )
        .unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(
            p[0].claims,
            [(Property::CashAdditive, true), (Property::Convex, true)]
        );
    }
}
