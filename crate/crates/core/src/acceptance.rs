//! Acceptance sets and the correspondence `A ↦ ρ_A`, `ρ ↦ A_ρ`.
//!
//! Sets are held as membership predicates. Going from a set back to a risk
//! measure only needs membership queries along the cash line through `X`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Result, RiskError};
use crate::extended::ExtendedReal;
use crate::measures::RiskMeasureSpec;
use crate::sample;
use crate::search::{threshold, BracketPolicy, SearchFailure};
use crate::space::{FiniteProbSpace, Position};

/// Slack added to `ρ(X) ≤ 0` when testing membership in `A_ρ`.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

type Predicate = Arc<dyn Fn(&Position) -> Result<bool> + Send + Sync>;

/// A set of acceptable positions, given by its membership test.
#[derive(Clone)]
pub struct AcceptanceSet {
    contains: Predicate,
    provenance: Option<RiskMeasureSpec>,
}

impl AcceptanceSet {
    pub fn from_predicate(f: impl Fn(&Position) -> bool + Send + Sync + 'static) -> Self {
        Self {
            contains: Arc::new(move |x| Ok(f(x))),
            provenance: None,
        }
    }

    pub fn contains(&self, x: &Position) -> Result<bool> {
        (self.contains)(x)
    }

    /// The risk measure this set was induced by, if any.
    pub fn provenance(&self) -> Option<&RiskMeasureSpec> {
        self.provenance.as_ref()
    }
}

impl fmt::Debug for AcceptanceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AcceptanceSet")
            .field("provenance", &self.provenance)
            .finish_non_exhaustive()
    }
}

/// `A_ρ = { X | ρ(X) ≤ 0 }` on the given space.
pub fn acceptance_of(space: &FiniteProbSpace, rho: &RiskMeasureSpec) -> AcceptanceSet {
    let space = space.clone();
    let spec = rho.clone();
    AcceptanceSet {
        contains: Arc::new(move |x| Ok(spec.evaluate(&space, x)? <= MEMBERSHIP_TOL)),
        provenance: Some(rho.clone()),
    }
}

/// `ρ_A(X) = inf { s | X + s·1 ∈ A }` with the default bracket policy.
pub fn rho_from_acceptance(a: &AcceptanceSet, x: &Position) -> Result<f64> {
    rho_from_acceptance_with(a, x, &BracketPolicy::default())
}

/// Bracket expansion then bisection on the cash amount. The returned `s`
/// always satisfies `X + s·1 ∈ A`.
pub fn rho_from_acceptance_with(
    a: &AcceptanceSet,
    x: &Position,
    policy: &BracketPolicy,
) -> Result<f64> {
    match threshold(policy, |s| a.contains(&x.shifted(s)))? {
        Ok(s) => Ok(s),
        Err(SearchFailure::NeverTrue) => Err(RiskError::Unbounded(format!(
            "no cash amount up to {:e} makes the position acceptable",
            policy.cap
        ))),
        Err(SearchFailure::AlwaysTrue) => Err(RiskError::Unbounded(format!(
            "position stays acceptable after withdrawing {:e}",
            policy.cap
        ))),
    }
}

/// `τ(X) = −r` if `X = r·1`, `+∞` otherwise.
pub fn tau(x: &Position) -> ExtendedReal {
    match x.as_constant() {
        Some(r) => ExtendedReal::Finite(-r),
        None => ExtendedReal::PosInfinity,
    }
}

/// Structural property of an acceptance set probed by
/// [`check_acceptance_axioms`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AcceptanceProperty {
    /// `A + L₊ ⊆ A`.
    Monotone,
    /// Midpoints of accepted pairs are accepted.
    Convex,
    /// Positive multiples of accepted positions are accepted.
    Cone,
    /// Limits along decreasing cash sequences stay accepted.
    DirectionallyClosed,
    /// Some cash amount is accepted and some is not.
    Nondegenerate,
}

impl AcceptanceProperty {
    pub const ALL: [AcceptanceProperty; 5] = [
        AcceptanceProperty::Monotone,
        AcceptanceProperty::Convex,
        AcceptanceProperty::Cone,
        AcceptanceProperty::DirectionallyClosed,
        AcceptanceProperty::Nondegenerate,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AcceptanceProperty::Monotone => "monotone",
            AcceptanceProperty::Convex => "convex",
            AcceptanceProperty::Cone => "cone",
            AcceptanceProperty::DirectionallyClosed => "directionally_closed",
            AcceptanceProperty::Nondegenerate => "nondegenerate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcceptanceViolation {
    pub property: AcceptanceProperty,
    /// Accepted starting position(s).
    pub accepted: Vec<Vec<f64>>,
    /// Position that should have been accepted but was not.
    pub rejected: Vec<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcceptanceReport {
    pub trials: usize,
    pub seed: u64,
    pub violations: Vec<AcceptanceViolation>,
}

impl AcceptanceReport {
    /// No counterexample was found for `property`. Absence of a
    /// counterexample is evidence, not proof.
    pub fn holds(&self, property: AcceptanceProperty) -> bool {
        self.first(property).is_none()
    }

    pub fn first(&self, property: AcceptanceProperty) -> Option<&AcceptanceViolation> {
        self.violations.iter().find(|v| v.property == property)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcceptanceCheckOptions {
    pub seed: u64,
    /// Cash cushion granted to every position that should be accepted, to
    /// absorb solver error in numerically evaluated sets.
    pub slack: f64,
    pub bracket: BracketPolicy,
    /// Keep at most this many counterexamples per property.
    pub max_witnesses: usize,
}

impl Default for AcceptanceCheckOptions {
    fn default() -> Self {
        Self {
            seed: 42,
            slack: 1e-9,
            bracket: BracketPolicy::default(),
            max_witnesses: 3,
        }
    }
}

/// Randomised spot-checks of the acceptance-set axioms on `space`.
pub fn check_acceptance_axioms(
    a: &AcceptanceSet,
    space: &FiniteProbSpace,
    sample_budget: usize,
    opts: &AcceptanceCheckOptions,
) -> Result<AcceptanceReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = space.len();
    let mut violations: Vec<AcceptanceViolation> = Vec::new();
    let mut record = |v: AcceptanceViolation| {
        if violations
            .iter()
            .filter(|w| w.property == v.property)
            .count()
            < opts.max_witnesses
        {
            violations.push(v);
        }
    };

    // cash line: some r·1 accepted, some rejected
    let mut cash_in = false;
    let mut cash_out = false;
    let mut c = 1.0;
    while c <= opts.bracket.cap && !(cash_in && cash_out) {
        cash_in |= a.contains(&space.constant(c))?;
        cash_out |= !a.contains(&space.constant(-c))?;
        c *= 2.0;
    }
    if !(cash_in && cash_out) {
        record(AcceptanceViolation {
            property: AcceptanceProperty::Nondegenerate,
            accepted: vec![],
            rejected: vec![],
            detail: format!(
                "cash line: some accepted = {cash_in}, some rejected = {cash_out} within |r| ≤ {:e}",
                opts.bracket.cap
            ),
        });
        return Ok(AcceptanceReport {
            trials: 0,
            seed: opts.seed,
            violations,
        });
    }

    let project = |x: &Position, rng: &mut ChaCha8Rng| -> Result<Position> {
        let s = rho_from_acceptance_with(a, x, &opts.bracket)?;
        let extra = if rng.gen_bool(0.5) {
            0.0
        } else {
            rng.gen_range(0.0..2.0)
        };
        Ok(x.shifted(s + extra))
    };
    let accepted = |x: &Position| a.contains(&x.shifted(opts.slack));

    for _ in 0..sample_budget {
        let x0 = sample::position(&mut rng, n);
        let y0 = sample::position(&mut rng, n);
        let x = project(&x0, &mut rng)?;
        let y = project(&y0, &mut rng)?;

        let z: Vec<f64> = (0..n)
            .map(|_| {
                if rng.gen_bool(0.4) {
                    0.0
                } else {
                    rng.gen_range(0.0..5.0)
                }
            })
            .collect();
        let up = x.plus(&Position::new(z)?)?;
        if !accepted(&up)? {
            record(AcceptanceViolation {
                property: AcceptanceProperty::Monotone,
                accepted: vec![x.as_slice().to_vec()],
                rejected: up.into_vec(),
                detail: "X ∈ A, Z ≥ 0 but X + Z ∉ A".into(),
            });
        }

        let lambda = rng.gen_range(0.0..1.0);
        let mid = x.mix(&y, lambda)?;
        if !accepted(&mid)? {
            record(AcceptanceViolation {
                property: AcceptanceProperty::Convex,
                accepted: vec![x.as_slice().to_vec(), y.as_slice().to_vec()],
                rejected: mid.into_vec(),
                detail: format!("λ = {lambda}"),
            });
        }

        let scale = 10f64.powf(rng.gen_range(-1.0..1.0));
        let scaled = x.scaled(scale);
        if !accepted(&scaled)? {
            record(AcceptanceViolation {
                property: AcceptanceProperty::Cone,
                accepted: vec![x.as_slice().to_vec()],
                rejected: scaled.into_vec(),
                detail: format!("scale = {scale}"),
            });
        }

        // integer-valued positions often have integer thresholds; test the
        // limit point exactly there
        let s = rho_from_acceptance_with(a, &x0, &opts.bracket)?;
        let rounded = s.round();
        if (s - rounded).abs() <= 1e-9 {
            let all_above = (0..34).try_fold(true, |acc, k| {
                Ok::<bool, RiskError>(acc && a.contains(&x0.shifted(rounded + 0.5f64.powi(k)))?)
            })?;
            let limit = x0.shifted(rounded);
            if all_above && !a.contains(&limit)? {
                record(AcceptanceViolation {
                    property: AcceptanceProperty::DirectionallyClosed,
                    accepted: vec![x0.shifted(rounded + 0.5f64.powi(33)).into_vec()],
                    rejected: limit.into_vec(),
                    detail: format!("X + (r + 2⁻ⁿ)·1 ∈ A for all n but X + r·1 ∉ A, r = {rounded}"),
                });
            }
        }
    }

    Ok(AcceptanceReport {
        trials: sample_budget,
        seed: opts.seed,
        violations,
    })
}
