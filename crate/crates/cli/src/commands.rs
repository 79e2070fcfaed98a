//! Subcommand bodies. Each returns the text to print and the exit code, so
//! tests can drive them without spawning a process.

use std::fmt::Write as _;

use monrisk::axioms::{check_profile, AxiomOptions, ProfileEntry};
use monrisk::dominance::{fsd_dominated_with, ssd_dominated_with, DominanceOptions, Witness};
use monrisk::{avar, dual_evaluate, var, DualRepresentation, RiskMeasureSpec};

use crate::config::{NamedMeasure, ReportConfig};
use crate::error::CliResult;
use crate::report::{fmt_exact, report, OutputFormat};
use crate::scenario::ScenarioTable;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
}

pub fn report_cmd(table: &ScenarioTable, config: &ReportConfig, format: OutputFormat) -> Outcome {
    let r = report(table, config);
    Outcome {
        output: r.render(format),
        code: if r.has_errors() {
            EXIT_CHECK_FAILED
        } else {
            EXIT_OK
        },
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AxiomRun {
    pub seed: u64,
    pub trials: usize,
    pub acceptance_trials: usize,
}

pub fn check_axioms_cmd(profile: &[ProfileEntry], run: AxiomRun) -> CliResult<Outcome> {
    let mut out = format!(
        "seed: {}\ntrials: {} (acceptance: {})\n",
        run.seed, run.trials, run.acceptance_trials
    );
    if run.trials == 0 {
        out.push_str("warning: no trials requested, nothing was checked\n");
        return Ok(Outcome {
            output: out,
            code: EXIT_OK,
        });
    }
    let opts = AxiomOptions {
        trials: run.trials,
        seed: run.seed,
        ..AxiomOptions::default()
    };
    let outcomes = check_profile(profile, &opts, run.acceptance_trials)?;
    let word = |b: bool| if b { "holds" } else { "fails" };
    let mut mismatches = 0;
    for o in &outcomes {
        let status = if o.matches() { "PASS" } else { "FAIL" };
        mismatches += usize::from(!o.matches());
        writeln!(
            out,
            "{status}  {:<20} {:<24} expected {}, observed {}",
            o.measure,
            o.property.as_str(),
            word(o.expected),
            word(o.observed)
        )
        .unwrap();
        if let (false, Some(c)) = (o.matches(), &o.counterexample) {
            writeln!(out, "      counterexample: {c}").unwrap();
        }
    }
    writeln!(out, "{} claims, {mismatches} mismatched", outcomes.len()).unwrap();
    Ok(Outcome {
        output: out,
        code: if mismatches == 0 {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        },
    })
}

/// Measures with a closed-form dual maximiser; `None` for the rest.
fn dual_of(
    table: &ScenarioTable,
    spec: &RiskMeasureSpec,
) -> monrisk::Result<Option<DualRepresentation>> {
    let space = &table.space;
    Ok(match spec {
        RiskMeasureSpec::WorstCase => Some(DualRepresentation::worst_case(space)),
        RiskMeasureSpec::Avar(a) => Some(DualRepresentation::avar(space, a.get())?),
        RiskMeasureSpec::Entropic(b) => Some(DualRepresentation::entropic(space, b.get())?),
        _ => None,
    })
}

/// Used when the config lists no measure with a dual maximiser.
fn default_dual_measures() -> Vec<NamedMeasure> {
    vec![
        NamedMeasure {
            name: "worst_case".into(),
            spec: RiskMeasureSpec::WorstCase,
        },
        NamedMeasure {
            name: "avar_0.1".into(),
            spec: RiskMeasureSpec::avar(0.1).expect("valid level"),
        },
        NamedMeasure {
            name: "entropic_1".into(),
            spec: RiskMeasureSpec::entropic(1.0).expect("valid beta"),
        },
    ]
}

pub fn dual_check_cmd(
    table: &ScenarioTable,
    config: &ReportConfig,
    tol: f64,
) -> CliResult<Outcome> {
    let mut measures: Vec<NamedMeasure> = config
        .measures
        .iter()
        .filter(|m| {
            matches!(
                m.spec,
                RiskMeasureSpec::WorstCase
                    | RiskMeasureSpec::Avar(_)
                    | RiskMeasureSpec::Entropic(_)
            )
        })
        .cloned()
        .collect();
    if measures.is_empty() {
        measures = default_dual_measures();
    }
    let mut out = format!("tolerance: {tol:e}\n");
    let mut worst = 0.0f64;
    let mut failed = 0usize;
    for (name, x) in &table.positions {
        for m in &measures {
            let rep = dual_of(table, &m.spec)?.expect("filtered to dual-capable measures");
            let primal = m.spec.evaluate(&table.space, x)?;
            let dual = dual_evaluate(&table.space, x, &rep, &[])?;
            let gap = (primal - dual).abs();
            worst = worst.max(gap);
            let ok = gap <= tol;
            failed += usize::from(!ok);
            writeln!(
                out,
                "{}  {name}  {}  primal {}  dual {}  gap {gap:.3e}",
                if ok { "PASS" } else { "FAIL" },
                m.name,
                fmt_exact(primal),
                fmt_exact(dual),
            )
            .unwrap();
        }
    }
    writeln!(out, "max gap {worst:.3e}, {failed} above tolerance").unwrap();
    Ok(Outcome {
        output: out,
        code: if failed == 0 {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        },
    })
}

fn witness(w: Option<Witness>) -> String {
    match w {
        None => String::new(),
        Some(Witness::Level(a)) => format!(" (fails at level {a})"),
        Some(Witness::Threshold(t)) => format!(" (fails at threshold {t})"),
    }
}

/// FSD and SSD verdicts in both directions. Verdicts are data: the exit
/// code is 0 whenever both positions exist.
pub fn dominance_cmd(
    table: &ScenarioTable,
    x_name: &str,
    y_name: &str,
    config: &ReportConfig,
) -> CliResult<Outcome> {
    let x = table.get(x_name)?;
    let y = table.get(y_name)?;
    let opts = DominanceOptions {
        slack: config.tolerances.dominance,
    };
    let space = &table.space;
    let mut out = String::new();
    for (a_name, a, b_name, b) in [(x_name, x, y_name, y), (y_name, y, x_name, x)] {
        let fsd = fsd_dominated_with(space, a, b, &opts)?;
        let ssd = ssd_dominated_with(space, a, b, &opts)?;
        writeln!(
            out,
            "fsd  {a_name} ⪯ {b_name}: {}{}",
            fsd.dominated,
            witness(fsd.witness)
        )
        .unwrap();
        writeln!(
            out,
            "ssd  {a_name} ⪯ {b_name}: {}{}",
            ssd.dominated,
            witness(ssd.witness)
        )
        .unwrap();
    }
    if !config.alpha_grid.is_empty() {
        writeln!(
            out,
            "alpha  var({x_name})  var({y_name})  avar({x_name})  avar({y_name})"
        )
        .unwrap();
        for &a in &config.alpha_grid {
            writeln!(
                out,
                "{a}  {}  {}  {}  {}",
                fmt_exact(var(space, x, a)?),
                fmt_exact(var(space, y, a)?),
                fmt_exact(avar(space, x, a)?),
                fmt_exact(avar(space, y, a)?),
            )
            .unwrap();
        }
    }
    Ok(Outcome {
        output: out,
        code: EXIT_OK,
    })
}
