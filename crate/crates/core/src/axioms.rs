//! Randomised axiom suites for risk measures, and the expected-property
//! profiles the CLI checks them against.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::acceptance::{
    acceptance_of, check_acceptance_axioms, AcceptanceCheckOptions, AcceptanceProperty,
};
use crate::construct::{LossFunction, LossShape, MixtureMeasure};
use crate::error::Result;
use crate::measures::{var, RiskMeasureSpec, RiskSpectrum};
use crate::sample;
use crate::space::{FiniteProbSpace, Position};

/// Properties of a risk measure checked on random instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    CashAdditive,
    Monotone,
    /// `ρ(0) = 0`.
    Normalized,
    PositivelyHomogeneous,
    Subadditive,
    Convex,
    AcceptanceMonotone,
    AcceptanceConvex,
    AcceptanceCone,
}

impl Property {
    pub const MEASURE: [Property; 6] = [
        Property::CashAdditive,
        Property::Monotone,
        Property::Normalized,
        Property::PositivelyHomogeneous,
        Property::Subadditive,
        Property::Convex,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Property::CashAdditive => "cash_additive",
            Property::Monotone => "monotone",
            Property::Normalized => "normalized",
            Property::PositivelyHomogeneous => "positively_homogeneous",
            Property::Subadditive => "subadditive",
            Property::Convex => "convex",
            Property::AcceptanceMonotone => "acceptance_monotone",
            Property::AcceptanceConvex => "acceptance_convex",
            Property::AcceptanceCone => "acceptance_cone",
        }
    }

    fn acceptance(self) -> Option<AcceptanceProperty> {
        match self {
            Property::AcceptanceMonotone => Some(AcceptanceProperty::Monotone),
            Property::AcceptanceConvex => Some(AcceptanceProperty::Convex),
            Property::AcceptanceCone => Some(AcceptanceProperty::Cone),
            _ => None,
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A concrete counterexample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub property: Property,
    pub probs: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Option<Vec<f64>>,
    /// Cash shift, scale or mixing weight, depending on the property.
    pub param: Option<f64>,
    /// `lhs > rhs + tol` is the violated inequality (or `|lhs − rhs| > tol`).
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxiomOptions {
    pub trials: usize,
    pub seed: u64,
    pub max_atoms: usize,
    pub tol: f64,
}

impl Default for AxiomOptions {
    fn default() -> Self {
        Self {
            trials: 10_000,
            seed: 42,
            max_atoms: 20,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub trials: usize,
    pub seed: u64,
    /// First counterexample per property, in check order.
    pub violations: Vec<Counterexample>,
}

impl AxiomReport {
    pub fn holds(&self, p: Property) -> bool {
        self.first(p).is_none()
    }

    pub fn first(&self, p: Property) -> Option<&Counterexample> {
        self.violations.iter().find(|c| c.property == p)
    }
}

/// Second position for a trial: independent, comonotone or hedging.
fn partner<R: Rng>(rng: &mut R, x: &Position) -> Position {
    match rng.gen_range(0..4) {
        0 => x.scaled(rng.gen_range(0.1..3.0)),
        1 => x.scaled(-rng.gen_range(0.1..3.0)),
        _ => sample::position(rng, x.len()),
    }
}

/// Checks `properties` of `spec` on `opts.trials` random (space, X, Y).
/// Only measure-level properties are handled here.
pub fn check_measure_axioms(
    spec: &RiskMeasureSpec,
    properties: &[Property],
    opts: &AxiomOptions,
) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let tol = opts.tol;
    let mut violations: Vec<Counterexample> = Vec::new();
    let wants = |p: Property| properties.contains(&p);

    for _ in 0..opts.trials {
        let space = sample::space(&mut rng, opts.max_atoms);
        let n = space.len();
        let x = sample::position(&mut rng, n);
        let y = partner(&mut rng, &x);
        let r = rng.gen_range(-10.0..10.0);
        let lambda = 10f64.powf(rng.gen_range(-1.0..1.0));
        let mu = rng.gen_range(0.0..1.0);
        let rho = |z: &Position| spec.evaluate(&space, z);
        let rx = rho(&x)?;

        let mut found =
            |p: Property, y: Option<&Position>, param: Option<f64>, lhs: f64, rhs: f64| {
                if !violations.iter().any(|c| c.property == p) {
                    violations.push(Counterexample {
                        property: p,
                        probs: space.probs().to_vec(),
                        x: x.as_slice().to_vec(),
                        y: y.map(|v| v.as_slice().to_vec()),
                        param,
                        lhs,
                        rhs,
                    });
                }
            };

        if wants(Property::CashAdditive) {
            let lhs = rho(&x.shifted(r))?;
            if (lhs - (rx - r)).abs() > tol {
                found(Property::CashAdditive, None, Some(r), lhs, rx - r);
            }
        }
        if wants(Property::Monotone) {
            let up = x.plus(&sample::nonnegative(&mut rng, n))?;
            let lhs = rho(&up)?;
            if lhs > rx + tol {
                found(Property::Monotone, Some(&up), None, lhs, rx);
            }
        }
        if wants(Property::Normalized) {
            let r0 = rho(&space.zero())?;
            if r0.abs() > tol {
                found(Property::Normalized, None, None, r0, 0.0);
            }
        }
        if wants(Property::PositivelyHomogeneous) {
            let lhs = rho(&x.scaled(lambda))?;
            if (lhs - lambda * rx).abs() > tol {
                found(
                    Property::PositivelyHomogeneous,
                    None,
                    Some(lambda),
                    lhs,
                    lambda * rx,
                );
            }
        }
        let needs_y = wants(Property::Subadditive) || wants(Property::Convex);
        let ry = if needs_y { rho(&y)? } else { 0.0 };
        if wants(Property::Subadditive) {
            let lhs = rho(&x.plus(&y)?)?;
            if lhs > rx + ry + tol {
                found(Property::Subadditive, Some(&y), None, lhs, rx + ry);
            }
        }
        if wants(Property::Convex) {
            let lhs = rho(&x.mix(&y, mu)?)?;
            let rhs = mu * rx + (1.0 - mu) * ry;
            if lhs > rhs + tol {
                found(Property::Convex, Some(&y), Some(mu), lhs, rhs);
            }
        }
    }
    Ok(AxiomReport {
        trials: opts.trials,
        seed: opts.seed,
        violations,
    })
}

/// A regression fixture: a concrete failure of V@R subadditivity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarWitness {
    pub seed: u64,
    pub trial: usize,
    pub probs: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub alpha: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub var_sum: f64,
}

impl VarWitness {
    /// Re-evaluates the inequality `V@R(X+Y) > V@R(X) + V@R(Y) + tol`.
    pub fn still_violates(&self, tol: f64) -> Result<bool> {
        let space = FiniteProbSpace::new(self.probs.clone())?;
        let x = space.position(self.x.clone())?;
        let y = space.position(self.y.clone())?;
        let sum = x.plus(&y)?;
        Ok(var(&space, &sum, self.alpha)?
            > var(&space, &x, self.alpha)? + var(&space, &y, self.alpha)? + tol)
    }
}

/// Randomised search for `V@R_α(X+Y) > V@R_α(X) + V@R_α(Y)` on spaces of at
/// most `max_atoms` atoms.
pub fn find_var_subadditivity_violation(
    seed: u64,
    trials: usize,
    max_atoms: usize,
    tol: f64,
) -> Result<Option<VarWitness>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let space = sample::space(&mut rng, max_atoms);
        let n = space.len();
        let x = sample::position(&mut rng, n);
        let y = sample::position(&mut rng, n);
        let alpha = sample::level(&mut rng);
        let sum = x.plus(&y)?;
        let (vx, vy, vs) = (
            var(&space, &x, alpha)?,
            var(&space, &y, alpha)?,
            var(&space, &sum, alpha)?,
        );
        if vs > vx + vy + tol {
            return Ok(Some(VarWitness {
                seed,
                trial,
                probs: space.probs().to_vec(),
                x: x.into_vec(),
                y: y.into_vec(),
                alpha,
                var_x: vx,
                var_y: vy,
                var_sum: vs,
            }));
        }
    }
    Ok(None)
}

/// Expected behaviour of one measure: `true` claims the property holds,
/// `false` claims a counterexample exists.
#[derive(Debug, Clone)]
pub struct ProfileEntry {
    pub name: String,
    pub spec: RiskMeasureSpec,
    pub claims: Vec<(Property, bool)>,
}

/// Outcome of checking one claim.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimOutcome {
    pub measure: String,
    pub property: Property,
    pub expected: bool,
    pub observed: bool,
    pub counterexample: Option<String>,
}

impl ClaimOutcome {
    pub fn matches(&self) -> bool {
        self.expected == self.observed
    }
}

/// Runs every claim in `profile`. Measure properties use `opts.trials`
/// instances; acceptance properties use `acceptance_trials` on a fixed
/// 6-atom space.
pub fn check_profile(
    profile: &[ProfileEntry],
    opts: &AxiomOptions,
    acceptance_trials: usize,
) -> Result<Vec<ClaimOutcome>> {
    let mut out = Vec::new();
    for entry in profile {
        let measure_props: Vec<Property> = entry
            .claims
            .iter()
            .map(|(p, _)| *p)
            .filter(|p| p.acceptance().is_none())
            .collect();
        let report = check_measure_axioms(&entry.spec, &measure_props, opts)?;

        let needs_acceptance = entry.claims.iter().any(|(p, _)| p.acceptance().is_some());
        let acc_report = if needs_acceptance {
            let space = FiniteProbSpace::new(vec![0.1, 0.15, 0.2, 0.05, 0.3, 0.2])?;
            let a = acceptance_of(&space, &entry.spec);
            let acc_opts = AcceptanceCheckOptions {
                seed: opts.seed,
                ..AcceptanceCheckOptions::default()
            };
            Some(check_acceptance_axioms(
                &a,
                &space,
                acceptance_trials,
                &acc_opts,
            )?)
        } else {
            None
        };

        for &(property, expected) in &entry.claims {
            let (observed, counterexample) = match property.acceptance() {
                None => (
                    report.holds(property),
                    report.first(property).map(|c| format!("{c:?}")),
                ),
                Some(ap) => {
                    let rep = acc_report.as_ref().expect("acceptance report computed");
                    (rep.holds(ap), rep.first(ap).map(|v| format!("{v:?}")))
                }
            };
            out.push(ClaimOutcome {
                measure: entry.name.clone(),
                property,
                expected,
                observed,
                counterexample,
            });
        }
    }
    Ok(out)
}

/// The built-in profile: what the theory says about each catalogue measure.
pub fn default_profile() -> Vec<ProfileEntry> {
    use Property::*;
    let all_hold = |extra: &[(Property, bool)]| -> Vec<(Property, bool)> {
        let mut v = vec![(CashAdditive, true), (Monotone, true), (Normalized, true)];
        v.extend_from_slice(extra);
        v
    };
    let coherent = all_hold(&[
        (PositivelyHomogeneous, true),
        (Subadditive, true),
        (Convex, true),
        (AcceptanceMonotone, true),
        (AcceptanceConvex, true),
        (AcceptanceCone, true),
    ]);
    let convex_only = all_hold(&[
        (PositivelyHomogeneous, false),
        (Convex, true),
        (AcceptanceMonotone, true),
        (AcceptanceConvex, true),
        (AcceptanceCone, false),
    ]);
    let mixture = MixtureMeasure::new(vec![(0.1, 0.3), (0.5, 0.5), (1.0, 0.2)]).expect("valid");
    let spectrum = RiskSpectrum::new(vec![0.0, 0.2, 0.6, 1.0], vec![3.0, 1.0, 0.0]).expect("valid");
    vec![
        ProfileEntry {
            name: "expected_loss".into(),
            spec: RiskMeasureSpec::ExpectedLoss,
            claims: coherent.clone(),
        },
        ProfileEntry {
            name: "var_0.25".into(),
            spec: RiskMeasureSpec::var(0.25).expect("valid level"),
            claims: all_hold(&[
                (PositivelyHomogeneous, true),
                (Subadditive, false),
                (Convex, false),
                (AcceptanceMonotone, true),
                (AcceptanceConvex, false),
                (AcceptanceCone, true),
            ]),
        },
        ProfileEntry {
            name: "avar_0.25".into(),
            spec: RiskMeasureSpec::avar(0.25).expect("valid level"),
            claims: coherent.clone(),
        },
        ProfileEntry {
            name: "worst_case".into(),
            spec: RiskMeasureSpec::WorstCase,
            claims: coherent.clone(),
        },
        ProfileEntry {
            name: "entropic_0.5".into(),
            spec: RiskMeasureSpec::entropic(0.5).expect("valid beta"),
            claims: {
                let mut c = convex_only.clone();
                c.push((Subadditive, false));
                c
            },
        },
        ProfileEntry {
            name: "spectral".into(),
            spec: RiskMeasureSpec::Spectral(spectrum),
            claims: coherent.clone(),
        },
        ProfileEntry {
            name: "shortfall_exp_1".into(),
            spec: RiskMeasureSpec::shortfall(
                LossFunction::shortfall(LossShape::Exponential { beta: 1.0 }).expect("valid"),
                1.0,
            )
            .expect("increasing loss"),
            claims: convex_only.clone(),
        },
        ProfileEntry {
            name: "mixture".into(),
            spec: RiskMeasureSpec::Mixture(mixture),
            claims: coherent.clone(),
        },
        ProfileEntry {
            name: "envelope_hinge_0.5".into(),
            spec: RiskMeasureSpec::envelope(
                LossFunction::oce(LossShape::Hinge { alpha: 0.5 }).expect("valid"),
            )
            .expect("nonincreasing loss"),
            claims: coherent,
        },
    ]
}
