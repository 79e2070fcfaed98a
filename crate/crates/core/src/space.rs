//! Finite probability spaces, positions on them, and their laws.
//!
//! On a finite sample space every random variable is bounded, so a
//! [`Position`] is just a payoff vector indexed by atoms. A [`Distribution`]
//! is the law of a position: sorted distinct outcomes with their masses. Both
//! quantile conventions are exposed on it:
//!
//! ```text
//! upper:  q⁺(α) = inf { t | P[X ≤ t] > α }
//! lower:  q⁻(α) = inf { t | P[X ≤ t] ≥ α }
//! ```

use serde::Serialize;

use crate::duality::Density;
use crate::error::{Result, RiskError};

/// Tolerance on every probability (and density expectation) sum.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Atoms with strictly positive probabilities summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteProbSpace {
    probs: Vec<f64>,
}

impl FiniteProbSpace {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(RiskError::Validation(
                "probability space needs at least one atom".into(),
            ));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p <= 0.0)
        {
            return Err(RiskError::Validation(format!(
                "atom {i} has non-positive probability {p}"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(RiskError::Validation(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(RiskError::Validation(
                "probability space needs at least one atom".into(),
            ));
        }
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    /// Always false; present for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn check(&self, x: &Position) -> Result<()> {
        if x.len() != self.len() {
            return Err(RiskError::Dimension {
                expected: self.len(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Validated position on this space.
    pub fn position(&self, outcomes: Vec<f64>) -> Result<Position> {
        let x = Position::new(outcomes)?;
        self.check(&x)?;
        Ok(x)
    }

    pub fn constant(&self, c: f64) -> Position {
        Position::constant(self.len(), c)
    }

    pub fn zero(&self) -> Position {
        self.constant(0.0)
    }
}

/// A finite payoff vector indexed by atoms (gains positive, losses negative).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Position(Vec<f64>);

impl Position {
    pub fn new(outcomes: Vec<f64>) -> Result<Self> {
        if let Some((i, v)) = outcomes.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(RiskError::Validation(format!(
                "outcome {i} is not finite: {v}"
            )));
        }
        Ok(Self(outcomes))
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self(vec![c; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// `X + r·1`.
    pub fn shifted(&self, r: f64) -> Position {
        Self(self.0.iter().map(|x| x + r).collect())
    }

    /// `λX`.
    pub fn scaled(&self, lambda: f64) -> Position {
        Self(self.0.iter().map(|x| lambda * x).collect())
    }

    pub fn plus(&self, other: &Position) -> Result<Position> {
        self.zip_with(other, |a, b| a + b)
    }

    /// `λX + (1 − λ)Y`.
    pub fn mix(&self, other: &Position, lambda: f64) -> Result<Position> {
        self.zip_with(other, |a, b| lambda * a + (1.0 - lambda) * b)
    }

    fn zip_with(&self, other: &Position, f: impl Fn(f64, f64) -> f64) -> Result<Position> {
        if self.len() != other.len() {
            return Err(RiskError::Dimension {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    /// Componentwise `self ≥ other`.
    pub fn dominates(&self, other: &Position) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// `Some(c)` when every outcome equals `c` exactly.
    pub fn as_constant(&self) -> Option<f64> {
        let first = *self.0.first()?;
        self.0.iter().all(|&v| v == first).then_some(first)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Law of a position: strictly increasing outcomes with positive masses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Distribution {
    outcomes: Vec<f64>,
    probs: Vec<f64>,
    /// `cumulative[k] = P[X ≤ outcomes[k]]`; the last entry is pinned to 1.
    cumulative: Vec<f64>,
}

impl Distribution {
    pub fn from_points(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(RiskError::Validation("empty distribution".into()));
        }
        for w in points.windows(2) {
            if !(w[0].0 < w[1].0) {
                return Err(RiskError::Validation(format!(
                    "outcomes not strictly increasing: {} then {}",
                    w[0].0, w[1].0
                )));
            }
        }
        if let Some(&(x, p)) = points.iter().find(|(x, p)| !x.is_finite() || !(*p > 0.0)) {
            return Err(RiskError::Validation(format!(
                "invalid point ({x}, {p}): outcomes must be finite and masses positive"
            )));
        }
        let total: f64 = points.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(RiskError::Validation(format!(
                "masses sum to {total}, not 1"
            )));
        }
        let (outcomes, probs) = points.into_iter().unzip();
        Ok(Self::assemble(outcomes, probs))
    }

    fn assemble(outcomes: Vec<f64>, probs: Vec<f64>) -> Self {
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p;
                acc.min(1.0)
            })
            .collect();
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Self {
            outcomes,
            probs,
            cumulative,
        }
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.outcomes
            .iter()
            .copied()
            .zip(self.probs.iter().copied())
    }

    pub fn min(&self) -> f64 {
        self.outcomes[0]
    }

    pub fn max(&self) -> f64 {
        self.outcomes[self.outcomes.len() - 1]
    }

    /// Right-continuous `F(t) = P[X ≤ t]`.
    pub fn cdf(&self, t: f64) -> f64 {
        let k = self.outcomes.partition_point(|&x| x <= t);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// Upper α-quantile `q⁺(α)`. At `α = 1` the defining set is empty and the
    /// maximum outcome is returned.
    pub fn upper_quantile(&self, alpha: f64) -> Result<f64> {
        check_level(alpha)?;
        let k = self.cumulative.partition_point(|&c| c <= alpha);
        Ok(self.outcomes[k.min(self.len() - 1)])
    }

    /// Lower α-quantile `q⁻(α)`.
    pub fn lower_quantile(&self, alpha: f64) -> Result<f64> {
        check_level(alpha)?;
        let k = self.cumulative.partition_point(|&c| c < alpha);
        Ok(self.outcomes[k.min(self.len() - 1)])
    }

    /// `∫₀^α q⁺(u) du`, the lower-tail integral of the quantile function.
    pub fn tail_integral(&self, alpha: f64) -> f64 {
        let mut remaining = alpha;
        let mut total = 0.0;
        for (x, p) in self.points() {
            if remaining <= 0.0 {
                break;
            }
            let take = p.min(remaining);
            total += take * x;
            remaining -= take;
        }
        total
    }
}

pub(crate) fn check_level(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(RiskError::Domain(format!(
            "level α = {alpha} not in (0, 1]"
        )))
    }
}

/// Law of `x` under the space's probabilities, with equal outcomes merged.
pub fn distribution_of(space: &FiniteProbSpace, x: &Position) -> Result<Distribution> {
    space.check(x)?;
    let mut pairs: Vec<(f64, f64)> = x
        .as_slice()
        .iter()
        .copied()
        .zip(space.probs().iter().copied())
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut outcomes: Vec<f64> = Vec::with_capacity(pairs.len());
    let mut probs: Vec<f64> = Vec::with_capacity(pairs.len());
    for (v, p) in pairs {
        match outcomes.last() {
            Some(&last) if last == v => *probs.last_mut().unwrap() += p,
            _ => {
                outcomes.push(v);
                probs.push(p);
            }
        }
    }
    Ok(Distribution::assemble(outcomes, probs))
}

/// `E[X·Y]`, or `E[X]` when no density is given.
pub fn expectation(space: &FiniteProbSpace, x: &Position, y: Option<&Density>) -> Result<f64> {
    space.check(x)?;
    let probs = space.probs();
    match y {
        None => Ok(probs.iter().zip(x.as_slice()).map(|(p, v)| p * v).sum()),
        Some(d) => {
            if d.len() != space.len() {
                return Err(RiskError::Dimension {
                    expected: space.len(),
                    got: d.len(),
                });
            }
            Ok(probs
                .iter()
                .zip(x.as_slice())
                .zip(d.values())
                .map(|((p, v), w)| p * v * w)
                .sum())
        }
    }
}
