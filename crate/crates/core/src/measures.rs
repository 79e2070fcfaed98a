//! Concrete monetary risk measures evaluated on `(space, position)` pairs.
//!
//! Sign convention: positions are gains, risk values are capital
//! requirements, so `ρ(X + r·1) = ρ(X) − r` for every measure here.

use std::fmt;

use serde::Serialize;

use crate::construct::{self, LossFunction, MixtureMeasure};
use crate::error::{Result, RiskError};
use crate::space::{check_level, distribution_of, FiniteProbSpace, Position, PROB_SUM_TOL};

/// A probability level α ∈ (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Level(f64);

impl Level {
    pub fn new(alpha: f64) -> Result<Self> {
        check_level(alpha)?;
        Ok(Self(alpha))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Risk-aversion parameter β > 0 of the entropic measure.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct RiskAversion(f64);

impl RiskAversion {
    pub fn new(beta: f64) -> Result<Self> {
        check_beta(beta)?;
        Ok(Self(beta))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(RiskError::Domain(format!(
            "β = {beta} must be positive and finite"
        )))
    }
}

/// Piecewise-constant, nonnegative, nonincreasing weight on `(0, 1]` with
/// unit integral. `values[j]` applies on `(breakpoints[j], breakpoints[j+1]]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskSpectrum {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl RiskSpectrum {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || breakpoints.len() != values.len() + 1 {
            return Err(RiskError::Validation(format!(
                "spectrum needs m ≥ 1 values and m + 1 breakpoints, got {} and {}",
                values.len(),
                breakpoints.len()
            )));
        }
        if breakpoints[0] != 0.0 || breakpoints[breakpoints.len() - 1] != 1.0 {
            return Err(RiskError::Validation(
                "spectrum breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(RiskError::Validation(
                "spectrum breakpoints must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(RiskError::Validation(
                "spectrum values must be finite and nonnegative".into(),
            ));
        }
        if values.windows(2).any(|w| w[1] > w[0]) {
            return Err(RiskError::Validation(
                "spectrum values must be nonincreasing".into(),
            ));
        }
        let integral: f64 = values
            .iter()
            .zip(breakpoints.windows(2))
            .map(|(v, w)| v * (w[1] - w[0]))
            .sum();
        if (integral - 1.0).abs() > PROB_SUM_TOL {
            return Err(RiskError::Validation(format!(
                "spectrum integrates to {integral}, not 1"
            )));
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    /// `(1/α)·1_{(0,α]}`, the spectrum of AV@R at level α.
    pub fn tail(alpha: Level) -> Self {
        let a = alpha.get();
        if a == 1.0 {
            Self {
                breakpoints: vec![0.0, 1.0],
                values: vec![1.0],
            }
        } else {
            Self {
                breakpoints: vec![0.0, a, 1.0],
                values: vec![1.0 / a, 0.0],
            }
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// φ(u) for u ∈ (0, 1].
    pub fn weight_at(&self, u: f64) -> f64 {
        let j = self.breakpoints[1..].partition_point(|&b| b < u);
        self.values[j.min(self.values.len() - 1)]
    }
}

/// `V@R_α(X) = −q⁺_α(X)`.
pub fn var(space: &FiniteProbSpace, x: &Position, alpha: f64) -> Result<f64> {
    check_level(alpha)?;
    Ok(-distribution_of(space, x)?.upper_quantile(alpha)?)
}

/// `AV@R_α(X)`: the average loss over the worst α of probability mass, with
/// the marginal atom split proportionally.
pub fn avar(space: &FiniteProbSpace, x: &Position, alpha: f64) -> Result<f64> {
    check_level(alpha)?;
    let d = distribution_of(space, x)?;
    Ok(-d.tail_integral(alpha) / alpha)
}

/// `−min X`.
pub fn worst_case(space: &FiniteProbSpace, x: &Position) -> Result<f64> {
    space.check(x)?;
    Ok(-x.min())
}

/// `E[−X]`, summed over the law so the value is exactly permutation
/// invariant.
pub fn expected_loss(space: &FiniteProbSpace, x: &Position) -> Result<f64> {
    let d = distribution_of(space, x)?;
    Ok(-d.points().map(|(v, p)| p * v).sum::<f64>())
}

/// `(1/β) log E[exp(−βX)]`, evaluated with a max-shifted log-sum-exp.
/// Summed over the law, like [`expected_loss`].
pub fn entropic(space: &FiniteProbSpace, x: &Position, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let d = distribution_of(space, x)?;
    // largest exponent −βx belongs to the smallest outcome
    let shift = -beta * d.min();
    let (mut sum, mut mass) = (0.0, 0.0);
    for (v, p) in d.points() {
        sum += p * (-beta * v - shift).exp();
        mass += p;
    }
    // dividing by the stored mass keeps constants exact under rounding of the probabilities
    Ok((shift + sum.ln() - mass.ln()) / beta)
}

/// `−∫₀¹ φ(s) q⁻_X(s) ds`, integrated exactly over the merged breakpoints of
/// the spectrum and the quantile step function.
pub fn spectral(space: &FiniteProbSpace, x: &Position, phi: &RiskSpectrum) -> Result<f64> {
    let d = distribution_of(space, x)?;
    let (outcomes, cumulative) = (d.outcomes(), d.cumulative());
    let (bps, vals) = (phi.breakpoints(), phi.values());
    let (mut i, mut j) = (0usize, 0usize);
    let mut left = 0.0;
    let mut total = 0.0;
    while i < outcomes.len() && j < vals.len() {
        let (qi, uj) = (cumulative[i], bps[j + 1]);
        let edge = qi.min(uj);
        total += vals[j] * outcomes[i] * (edge - left);
        left = edge;
        if qi <= uj {
            i += 1;
        }
        if uj <= qi {
            j += 1;
        }
    }
    Ok(-total)
}

/// Discriminant of [`RiskMeasureSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    ExpectedLoss,
    Var,
    Avar,
    WorstCase,
    Entropic,
    Spectral,
    Shortfall,
    Mixture,
    Envelope,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 9] = [
        MeasureKind::ExpectedLoss,
        MeasureKind::Var,
        MeasureKind::Avar,
        MeasureKind::WorstCase,
        MeasureKind::Entropic,
        MeasureKind::Spectral,
        MeasureKind::Shortfall,
        MeasureKind::Mixture,
        MeasureKind::Envelope,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MeasureKind::ExpectedLoss => "expected_loss",
            MeasureKind::Var => "var",
            MeasureKind::Avar => "avar",
            MeasureKind::WorstCase => "worst_case",
            MeasureKind::Entropic => "entropic",
            MeasureKind::Spectral => "spectral",
            MeasureKind::Shortfall => "shortfall",
            MeasureKind::Mixture => "mixture",
            MeasureKind::Envelope => "envelope",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A fully parameterised risk measure. Parameters are validated when the
/// spec is built, so evaluation only fails on dimension or solver errors.
#[derive(Debug, Clone)]
pub enum RiskMeasureSpec {
    ExpectedLoss,
    Var(Level),
    Avar(Level),
    WorstCase,
    Entropic(RiskAversion),
    Spectral(RiskSpectrum),
    /// Loss-based shortfall risk with an increasing loss and threshold `r0`.
    Shortfall {
        loss: LossFunction,
        r0: f64,
    },
    Mixture(MixtureMeasure),
    /// Cash-additive envelope of `X ↦ E[ℓ(X)]` for a nonincreasing loss ℓ
    /// (the optimized certainty equivalent).
    Envelope {
        loss: LossFunction,
    },
}

impl RiskMeasureSpec {
    pub fn var(alpha: f64) -> Result<Self> {
        Ok(Self::Var(Level::new(alpha)?))
    }

    pub fn avar(alpha: f64) -> Result<Self> {
        Ok(Self::Avar(Level::new(alpha)?))
    }

    pub fn entropic(beta: f64) -> Result<Self> {
        Ok(Self::Entropic(RiskAversion::new(beta)?))
    }

    pub fn shortfall(loss: LossFunction, r0: f64) -> Result<Self> {
        loss.require_increasing()?;
        if !r0.is_finite() {
            return Err(RiskError::Domain(format!(
                "threshold r0 = {r0} must be finite"
            )));
        }
        Ok(Self::Shortfall { loss, r0 })
    }

    pub fn envelope(loss: LossFunction) -> Result<Self> {
        loss.require_nonincreasing()?;
        Ok(Self::Envelope { loss })
    }

    pub fn kind(&self) -> MeasureKind {
        match self {
            Self::ExpectedLoss => MeasureKind::ExpectedLoss,
            Self::Var(_) => MeasureKind::Var,
            Self::Avar(_) => MeasureKind::Avar,
            Self::WorstCase => MeasureKind::WorstCase,
            Self::Entropic(_) => MeasureKind::Entropic,
            Self::Spectral(_) => MeasureKind::Spectral,
            Self::Shortfall { .. } => MeasureKind::Shortfall,
            Self::Mixture(_) => MeasureKind::Mixture,
            Self::Envelope { .. } => MeasureKind::Envelope,
        }
    }

    pub fn evaluate(&self, space: &FiniteProbSpace, x: &Position) -> Result<f64> {
        match self {
            Self::ExpectedLoss => expected_loss(space, x),
            Self::Var(a) => var(space, x, a.get()),
            Self::Avar(a) => avar(space, x, a.get()),
            Self::WorstCase => worst_case(space, x),
            Self::Entropic(b) => entropic(space, x, b.get()),
            Self::Spectral(phi) => spectral(space, x, phi),
            Self::Shortfall { loss, r0 } => construct::shortfall(space, x, loss, *r0),
            Self::Mixture(m) => construct::kusuoka_mixture(space, x, m),
            Self::Envelope { loss } => construct::oce(space, x, loss),
        }
    }
}

impl fmt::Display for RiskMeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Var(a) => write!(f, "var(α={})", a.get()),
            Self::Avar(a) => write!(f, "avar(α={})", a.get()),
            Self::Entropic(b) => write!(f, "entropic(β={})", b.get()),
            Self::Shortfall { loss, r0 } => write!(f, "shortfall({loss}, r0={r0})"),
            Self::Envelope { loss } => write!(f, "envelope({loss})"),
            other => f.write_str(other.kind().as_str()),
        }
    }
}
