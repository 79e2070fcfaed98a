//! Dual (robust) representations `ρ(X) = sup_Q { E^Q[−X] − γ(Q) }`.
//!
//! Each implemented convex measure comes with its penalty γ and a
//! closed-form maximiser, so strong duality can be checked exactly. A
//! sampling oracle bounds the conjugate `ρ*(Y) = sup_{X ∈ A_ρ} E[−XY]` from
//! below without using any of the closed forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Result, RiskError};
use crate::extended::ExtendedReal;
use crate::measures::RiskMeasureSpec;
use crate::space::{check_level, expectation, FiniteProbSpace, Position, PROB_SUM_TOL};

/// A Radon–Nikodym density dQ/dP: nonnegative with `E[Y] = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Density {
    values: Vec<f64>,
}

impl Density {
    pub fn new(space: &FiniteProbSpace, values: Vec<f64>) -> Result<Self> {
        let check = check_dual_conditions(space, &values);
        if !check.valid {
            return Err(RiskError::Validation(check.diagnostics.join("; ")));
        }
        Ok(Self { values })
    }

    /// `Q = P`.
    pub fn unit(space: &FiniteProbSpace) -> Self {
        Self {
            values: vec![1.0; space.len()],
        }
    }

    /// Point mass on atom `k`, i.e. `y_k = 1/p_k`.
    pub fn dirac(space: &FiniteProbSpace, k: usize) -> Result<Self> {
        if k >= space.len() {
            return Err(RiskError::Dimension {
                expected: space.len(),
                got: k + 1,
            });
        }
        let mut values = vec![0.0; space.len()];
        values[k] = 1.0 / space.probs()[k];
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn check_space(&self, space: &FiniteProbSpace) -> Result<()> {
        if self.len() != space.len() {
            return Err(RiskError::Dimension {
                expected: space.len(),
                got: self.len(),
            });
        }
        Ok(())
    }
}

/// Outcome of [`check_dual_conditions`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualConditions {
    pub valid: bool,
    pub diagnostics: Vec<String>,
}

/// Checks `Y ≥ 0` and `E[Y] = 1` (within [`PROB_SUM_TOL`]).
pub fn check_dual_conditions(space: &FiniteProbSpace, y: &[f64]) -> DualConditions {
    let mut diagnostics = Vec::new();
    if y.len() != space.len() {
        diagnostics.push(format!(
            "density has {} entries, space has {} atoms",
            y.len(),
            space.len()
        ));
    } else {
        for (i, v) in y.iter().enumerate() {
            if !v.is_finite() || *v < 0.0 {
                diagnostics.push(format!(
                    "entry {i} = {v} is not a finite nonnegative number"
                ));
            }
        }
        let mean: f64 = space.probs().iter().zip(y).map(|(p, v)| p * v).sum();
        if !((mean - 1.0).abs() <= PROB_SUM_TOL) {
            diagnostics.push(format!("E[Y] = {mean}, expected 1"));
        }
    }
    DualConditions {
        valid: diagnostics.is_empty(),
        diagnostics,
    }
}

/// Zero penalty: every probability model is admissible for the worst case.
pub fn penalty_worst_case(space: &FiniteProbSpace, q: &Density) -> Result<ExtendedReal> {
    q.check_space(space)?;
    Ok(ExtendedReal::Finite(0.0))
}

/// Indicator of `{dQ/dP ≤ 1/α}`.
pub fn penalty_avar(space: &FiniteProbSpace, q: &Density, alpha: f64) -> Result<ExtendedReal> {
    check_level(alpha)?;
    q.check_space(space)?;
    if q.max() <= 1.0 / alpha + PROB_SUM_TOL {
        Ok(ExtendedReal::Finite(0.0))
    } else {
        Ok(ExtendedReal::PosInfinity)
    }
}

/// Relative entropy `(1/β) Σ pᵢ yᵢ log yᵢ`, with `0 log 0 = 0`.
pub fn penalty_entropic(space: &FiniteProbSpace, q: &Density, beta: f64) -> Result<ExtendedReal> {
    RiskMeasureSpec::entropic(beta)?;
    q.check_space(space)?;
    let h: f64 = space
        .probs()
        .iter()
        .zip(q.values())
        .filter(|(_, &y)| y > 0.0)
        .map(|(p, &y)| p * y * y.ln())
        .sum();
    Ok(ExtendedReal::Finite(h / beta))
}

/// Density at `1/α` on the lowest outcomes until mass α is filled; the
/// marginal atom gets a fractional value. Ties fill lower atom indices first.
pub fn avar_maximizer(space: &FiniteProbSpace, x: &Position, alpha: f64) -> Result<Density> {
    check_level(alpha)?;
    space.check(x)?;
    let mut order: Vec<usize> = (0..space.len()).collect();
    order.sort_by(|&a, &b| x.as_slice()[a].total_cmp(&x.as_slice()[b]));
    let probs = space.probs();
    let mut values = vec![0.0; space.len()];
    let mut remaining = alpha;
    for i in order {
        if remaining <= 0.0 {
            break;
        }
        let take = probs[i].min(remaining);
        values[i] = take / (alpha * probs[i]);
        remaining -= take;
    }
    Ok(Density { values })
}

/// Exponential tilt `yᵢ ∝ exp(−βxᵢ)`.
pub fn gibbs_maximizer(space: &FiniteProbSpace, x: &Position, beta: f64) -> Result<Density> {
    RiskMeasureSpec::entropic(beta)?;
    space.check(x)?;
    let exponents: Vec<f64> = x.as_slice().iter().map(|v| -beta * v).collect();
    let shift = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = exponents.iter().map(|e| (e - shift).exp()).collect();
    let z: f64 = space.probs().iter().zip(&weights).map(|(p, w)| p * w).sum();
    Ok(Density {
        values: weights.into_iter().map(|w| w / z).collect(),
    })
}

/// Point mass on the lowest-index atom attaining `min X`.
pub fn worst_case_maximizer(space: &FiniteProbSpace, x: &Position) -> Result<Density> {
    space.check(x)?;
    let k = x
        .as_slice()
        .iter()
        .enumerate()
        .fold(0, |b, (i, v)| if *v < x.as_slice()[b] { i } else { b });
    Density::dirac(space, k)
}

type PenaltyFn = Box<dyn Fn(&Density) -> Result<ExtendedReal> + Send + Sync>;
type MaximizerFn = Box<dyn Fn(&Position) -> Result<Density> + Send + Sync>;

/// A penalty γ together with an optional exact maximiser of
/// `Q ↦ E^Q[−X] − γ(Q)`.
pub struct DualRepresentation {
    penalty: PenaltyFn,
    maximizer: Option<MaximizerFn>,
}

impl DualRepresentation {
    pub fn new(
        penalty: impl Fn(&Density) -> Result<ExtendedReal> + Send + Sync + 'static,
        maximizer: Option<MaximizerFn>,
    ) -> Self {
        Self {
            penalty: Box::new(penalty),
            maximizer,
        }
    }

    pub fn worst_case(space: &FiniteProbSpace) -> Self {
        let (s1, s2) = (space.clone(), space.clone());
        Self::new(
            move |q| penalty_worst_case(&s1, q),
            Some(Box::new(move |x| worst_case_maximizer(&s2, x))),
        )
    }

    pub fn avar(space: &FiniteProbSpace, alpha: f64) -> Result<Self> {
        check_level(alpha)?;
        let (s1, s2) = (space.clone(), space.clone());
        Ok(Self::new(
            move |q| penalty_avar(&s1, q, alpha),
            Some(Box::new(move |x| avar_maximizer(&s2, x, alpha))),
        ))
    }

    pub fn entropic(space: &FiniteProbSpace, beta: f64) -> Result<Self> {
        RiskMeasureSpec::entropic(beta)?;
        let (s1, s2) = (space.clone(), space.clone());
        Ok(Self::new(
            move |q| penalty_entropic(&s1, q, beta),
            Some(Box::new(move |x| gibbs_maximizer(&s2, x, beta))),
        ))
    }

    /// Drops the closed-form maximiser; only supplied candidates are used.
    pub fn without_maximizer(self) -> Self {
        Self {
            penalty: self.penalty,
            maximizer: None,
        }
    }

    pub fn penalty(&self, q: &Density) -> Result<ExtendedReal> {
        (self.penalty)(q)
    }

    pub fn maximizer(&self, x: &Position) -> Option<Result<Density>> {
        self.maximizer.as_ref().map(|m| m(x))
    }
}

/// `E^Q[−X] − γ(Q)`, or `None` when `γ(Q) = +∞`.
pub fn dual_objective(
    space: &FiniteProbSpace,
    x: &Position,
    q: &Density,
    rep: &DualRepresentation,
) -> Result<Option<f64>> {
    let gamma = rep.penalty(q)?;
    match gamma {
        ExtendedReal::PosInfinity => Ok(None),
        ExtendedReal::Finite(g) => Ok(Some(-expectation(space, x, Some(q))? - g)),
    }
}

/// Best dual objective over `candidates` and the representation's own
/// maximiser. A lower bound on `ρ(X)`; exact when the maximiser is present.
pub fn dual_evaluate(
    space: &FiniteProbSpace,
    x: &Position,
    rep: &DualRepresentation,
    candidates: &[Density],
) -> Result<f64> {
    let own = rep.maximizer(x).transpose()?;
    let mut best: Option<f64> = None;
    for q in candidates.iter().chain(own.iter()) {
        if let Some(v) = dual_objective(space, x, q, rep)? {
            best = Some(best.map_or(v, |b| b.max(v)));
        }
    }
    best.ok_or(RiskError::NoFeasibleCandidate)
}

/// Result of the sampled conjugate oracle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConjugateBound {
    /// `max E[−X'Y]` over the sampled acceptable positions `X'`.
    pub value: f64,
    pub samples: usize,
    /// Set when rescaling the best sample drives the objective up roughly
    /// linearly, i.e. `Y` lies outside the effective domain of `ρ*`.
    pub infeasible_direction: bool,
}

const MAG_LOG10_RANGE: (f64, f64) = (-8.0, 7.0);
const DIVERGENCE_SCALE: f64 = 1_048_576.0;

/// Lower bound on `ρ*(Y) = sup_{X ∈ A_ρ} E[−XY]` from `budget` random
/// positions, each moved onto the acceptance boundary as `X + ρ(X)·1`.
///
/// The sample stream depends only on `seed`, so the bound is nondecreasing
/// in `budget`.
pub fn conjugate_lower_bound(
    space: &FiniteProbSpace,
    rho: &RiskMeasureSpec,
    y: &Density,
    budget: usize,
    seed: u64,
) -> Result<ConjugateBound> {
    y.check_space(space)?;
    let n = space.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let yv = y.values();
    let log_y: Vec<f64> = yv.iter().map(|v| v.max(1e-12).ln()).collect();
    let y_mean = 1.0;

    // boundary objective: E[−(X + ρ(X))Y] = −E[XY] − ρ(X), as E[Y] = 1
    let objective = |x: &Position| -> Result<f64> {
        Ok(-expectation(space, x, Some(y))? - rho.evaluate(space, x)?)
    };

    let mut best = f64::NEG_INFINITY;
    let mut best_x: Option<Position> = None;
    for _ in 0..budget {
        let dir: Vec<f64> = match rng.gen_range(0..6) {
            0 => (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            1 => {
                let k = rng.gen_range(0..n);
                (0..n).map(|i| if i == k { -1.0 } else { 0.0 }).collect()
            }
            2 => yv.iter().map(|v| y_mean - v).collect(),
            3 => log_y.iter().map(|l| -l).collect(),
            4 => {
                let g = rng.gen_range(0.2..5.0);
                yv.iter().map(|v| -v.powf(g)).collect()
            }
            _ => (0..n)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        -rng.gen_range(0.0..1.0)
                    } else {
                        0.0
                    }
                })
                .collect(),
        };
        let mag = 10f64.powf(rng.gen_range(MAG_LOG10_RANGE.0..MAG_LOG10_RANGE.1));
        let x = Position::new(dir.into_iter().map(|d| mag * d).collect())?;
        let v = objective(&x)?;
        if v > best {
            best = v;
            best_x = Some(x);
        }
    }

    let infeasible_direction = match &best_x {
        Some(x) if best > 1e-6 => objective(&x.scaled(DIVERGENCE_SCALE))? > (1e3 * best).max(1.0),
        _ => false,
    };
    Ok(ConjugateBound {
        value: best,
        samples: budget,
        infeasible_direction,
    })
}

/// `E^Q[−X]` under the density, for reporting.
pub fn expected_loss_under(space: &FiniteProbSpace, x: &Position, q: &Density) -> Result<f64> {
    Ok(-expectation(space, x, Some(q))?)
}

/// `E^Q[−X] − γ(Q)` at the Gibbs tilt, without going through a representation.
pub fn entropic_dual_value(space: &FiniteProbSpace, x: &Position, beta: f64) -> Result<f64> {
    let q = gibbs_maximizer(space, x, beta)?;
    let gamma = penalty_entropic(space, &q, beta)?.to_f64();
    Ok(expected_loss_under(space, x, &q)? - gamma)
}

/// Closed-form `AV@R_α` via its maximiser; cross-check for the primal.
pub fn avar_dual_value(space: &FiniteProbSpace, x: &Position, alpha: f64) -> Result<f64> {
    let q = avar_maximizer(space, x, alpha)?;
    expected_loss_under(space, x, &q)
}
