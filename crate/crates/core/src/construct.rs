//! Factories for new risk measures: cash-additive envelopes, optimized
//! certainty equivalents, loss-based shortfall risk, and finite AV@R
//! mixtures together with their spectral form.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RiskError};
use crate::extended::ExtendedReal;
use crate::measures::{avar, Level, RiskSpectrum};
use crate::search::{golden_section, threshold, BracketPolicy, SearchFailure};
use crate::space::{expectation, FiniteProbSpace, Position, PROB_SUM_TOL};

/// Monotonicity direction of a loss function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LossDirection {
    /// Shortfall losses ℓ(x), applied to the loss `−X − s`.
    Increasing,
    /// OCE losses ℓ(x), applied to the gain `X`.
    Nonincreasing,
}

/// Built-in loss shapes. The direction decides the sign convention, see
/// [`LossFunction::eval`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LossShape {
    Linear,
    Exponential { beta: f64 },
    Hinge { alpha: f64 },
    Power { p: f64 },
}

impl LossShape {
    fn validate(self) -> Result<()> {
        match self {
            LossShape::Linear => Ok(()),
            LossShape::Exponential { beta } if beta > 0.0 && beta.is_finite() => Ok(()),
            LossShape::Hinge { alpha } if alpha > 0.0 && alpha <= 1.0 => Ok(()),
            LossShape::Power { p } if p > 0.0 && p.is_finite() => Ok(()),
            other => Err(RiskError::Domain(format!(
                "invalid loss parameters: {other:?}"
            ))),
        }
    }

    fn is_convex(self) -> bool {
        match self {
            LossShape::Power { p } => p >= 1.0,
            _ => true,
        }
    }

    /// Increasing form, evaluated at a loss amount.
    fn increasing(self, x: f64) -> f64 {
        match self {
            LossShape::Linear => x,
            LossShape::Exponential { beta } => (beta * x).exp(),
            LossShape::Hinge { alpha } => x.max(0.0) / alpha,
            LossShape::Power { p } => x.max(0.0).powf(p),
        }
    }

    /// Nonincreasing form, evaluated at a gain; normalised so ℓ(0) = 0.
    fn nonincreasing(self, x: f64) -> f64 {
        match self {
            LossShape::Linear => -x,
            LossShape::Exponential { beta } => (-beta * x).exp_m1() / beta,
            LossShape::Hinge { alpha } => (-x).max(0.0) / alpha,
            LossShape::Power { p } => (-x).max(0.0).powf(p),
        }
    }
}

type LossFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum LossEval {
    Catalogue(LossShape),
    Custom { name: String, f: LossFn },
}

/// A scalar loss ℓ: ℝ → ℝ ∪ {+∞} with declared direction and convexity.
/// `f64::INFINITY` from the evaluator stands for +∞.
#[derive(Clone)]
pub struct LossFunction {
    eval: LossEval,
    convex: bool,
    direction: LossDirection,
}

/// Points at which custom losses are checked against their declared direction.
const DIRECTION_PROBES: [f64; 13] = [
    -1e3, -100.0, -10.0, -3.0, -1.0, -0.25, 0.0, 0.25, 1.0, 3.0, 10.0, 100.0, 1e3,
];

impl LossFunction {
    /// Increasing catalogue loss for shortfall risk.
    pub fn shortfall(shape: LossShape) -> Result<Self> {
        shape.validate()?;
        Ok(Self {
            eval: LossEval::Catalogue(shape),
            convex: shape.is_convex(),
            direction: LossDirection::Increasing,
        })
    }

    /// Nonincreasing catalogue loss for optimized certainty equivalents.
    pub fn oce(shape: LossShape) -> Result<Self> {
        shape.validate()?;
        Ok(Self {
            eval: LossEval::Catalogue(shape),
            convex: shape.is_convex(),
            direction: LossDirection::Nonincreasing,
        })
    }

    /// User-supplied loss; the declared direction is spot-checked on a fixed
    /// grid, and an increasing loss must not be constant there.
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        direction: LossDirection,
        convex: bool,
    ) -> Result<Self> {
        let loss = Self {
            eval: LossEval::Custom {
                name: name.into(),
                f: Arc::new(f),
            },
            convex,
            direction,
        };
        let vals: Vec<f64> = DIRECTION_PROBES.iter().map(|&x| loss.eval(x)).collect();
        if vals.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(RiskError::InvalidLoss(format!(
                "{loss} is not proper (NaN or −∞ on probe grid)"
            )));
        }
        let ordered = vals.windows(2).all(|w| match direction {
            LossDirection::Increasing => w[1] >= w[0],
            LossDirection::Nonincreasing => w[1] <= w[0],
        });
        if !ordered {
            return Err(RiskError::InvalidLoss(format!(
                "{loss} violates its declared {direction:?} direction"
            )));
        }
        if direction == LossDirection::Increasing && vals.iter().all(|v| *v == vals[0]) {
            return Err(RiskError::InvalidLoss(format!("{loss} is constant")));
        }
        Ok(loss)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.eval {
            LossEval::Catalogue(shape) => match self.direction {
                LossDirection::Increasing => shape.increasing(x),
                LossDirection::Nonincreasing => shape.nonincreasing(x),
            },
            LossEval::Custom { f, .. } => f(x),
        }
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn direction(&self) -> LossDirection {
        self.direction
    }

    pub fn shape(&self) -> Option<LossShape> {
        match self.eval {
            LossEval::Catalogue(s) => Some(s),
            LossEval::Custom { .. } => None,
        }
    }

    pub(crate) fn require_increasing(&self) -> Result<()> {
        match self.direction {
            LossDirection::Increasing => Ok(()),
            LossDirection::Nonincreasing => Err(RiskError::InvalidLoss(format!(
                "shortfall risk needs an increasing loss, got {self}"
            ))),
        }
    }

    pub(crate) fn require_nonincreasing(&self) -> Result<()> {
        match self.direction {
            LossDirection::Nonincreasing => Ok(()),
            LossDirection::Increasing => Err(RiskError::InvalidLoss(format!(
                "optimized certainty equivalents need a nonincreasing loss, got {self}"
            ))),
        }
    }

    /// `E[ℓ(Z)]` over the atoms of `z`; +∞ if any term is.
    fn expected(&self, space: &FiniteProbSpace, z: &[f64]) -> f64 {
        space
            .probs()
            .iter()
            .zip(z)
            .map(|(p, &v)| p * self.eval(v))
            .sum()
    }
}

impl fmt::Debug for LossFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LossFunction")
            .field("loss", &self.to_string())
            .field("convex", &self.convex)
            .field("direction", &self.direction)
            .finish()
    }
}

impl fmt::Display for LossFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.eval {
            LossEval::Catalogue(LossShape::Linear) => f.write_str("linear"),
            LossEval::Catalogue(LossShape::Exponential { beta }) => {
                write!(f, "exponential({beta})")
            }
            LossEval::Catalogue(LossShape::Hinge { alpha }) => write!(f, "hinge({alpha})"),
            LossEval::Catalogue(LossShape::Power { p }) => write!(f, "power({p})"),
            LossEval::Custom { name, .. } => write!(f, "custom({name})"),
        }
    }
}

/// How [`envelope`] minimises `g(r) = φ(X − r·1) − r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeOptions {
    /// Caller-asserted convexity of φ; selects golden section over a scan.
    pub convex: bool,
    pub bracket: BracketPolicy,
    /// Grid size for the non-convex scan.
    pub grid_points: usize,
}

impl Default for EnvelopeOptions {
    fn default() -> Self {
        Self {
            convex: true,
            bracket: BracketPolicy::default(),
            grid_points: 2001,
        }
    }
}

impl EnvelopeOptions {
    pub fn nonconvex() -> Self {
        Self {
            convex: false,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeResult {
    pub value: f64,
    /// Minimising cash amount `r*` (not unique in general).
    pub argmin: f64,
}

/// Cash-additive envelope `inf_r { φ(X − r·1) − r }` of a monotone φ.
pub fn envelope<F>(
    space: &FiniteProbSpace,
    mut phi: F,
    x: &Position,
    opts: &EnvelopeOptions,
) -> Result<EnvelopeResult>
where
    F: FnMut(&Position) -> Result<ExtendedReal>,
{
    space.check(x)?;
    let mut err = None;
    let mut g = |r: f64| -> f64 {
        match phi(&x.shifted(-r)) {
            Ok(v) => v.to_f64() - r,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let out = if opts.convex {
        minimise_convex(&mut g, &opts.bracket)
    } else {
        let (lo, hi) = (x.min(), x.max());
        let half = (hi - lo).max(1.0);
        minimise_scan(&mut g, lo - half, hi + half, opts)
    };
    if let Some(e) = err {
        return Err(e);
    }
    let (argmin, value) = out?;
    if !value.is_finite() {
        return Err(RiskError::Validation(format!(
            "envelope objective is +∞ everywhere searched (best r = {argmin})"
        )));
    }
    Ok(EnvelopeResult { value, argmin })
}

fn minimise_convex(g: &mut impl FnMut(f64) -> f64, policy: &BracketPolicy) -> Result<(f64, f64)> {
    // find a point with finite objective
    let mut a = 0.0;
    let mut fa = g(a);
    let mut probe = policy.initial;
    while !(fa < f64::INFINITY) {
        if fa.is_nan() || probe > policy.cap {
            return Ok((a, fa));
        }
        for cand in [probe, -probe] {
            let v = g(cand);
            if v < f64::INFINITY || v.is_nan() {
                a = cand;
                fa = v;
                break;
            }
        }
        probe *= 2.0;
    }

    let mut step = policy.initial;
    let (fb, fc) = (g(a + step), g(a - step));
    if fb.is_nan() || fc.is_nan() {
        return Ok((a, f64::NAN));
    }
    // decreases within rounding noise do not count, so flat objectives stop here
    let below = |v: f64, base: f64| v < base - 1e-12 * base.abs().max(1.0);
    let dir = if below(fb, fa) {
        1.0
    } else if below(fc, fa) {
        -1.0
    } else {
        return Ok(golden_with_best(g, a - step, a + step, policy.tol, (a, fa)));
    };
    let (mut prev, mut cur, mut fcur) = (a, a + dir * step, fb.min(fc));
    loop {
        step *= 2.0;
        let next = cur + dir * step;
        if next.abs() > policy.cap {
            return Err(RiskError::EnvelopeUnbounded { cap: policy.cap });
        }
        let fnext = g(next);
        if fnext.is_nan() {
            return Ok((next, fnext));
        }
        if below(fnext, fcur) {
            prev = cur;
            cur = next;
            fcur = fnext;
        } else {
            let (lo, hi) = if dir > 0.0 {
                (prev, next)
            } else {
                (next, prev)
            };
            return Ok(golden_with_best(g, lo, hi, policy.tol, (cur, fcur)));
        }
    }
}

fn golden_with_best(
    g: &mut impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
    seen: (f64, f64),
) -> (f64, f64) {
    let found = golden_section(lo, hi, tol, &mut *g);
    if found.1 < seen.1 {
        found
    } else {
        seen
    }
}

fn minimise_scan(
    g: &mut impl FnMut(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    opts: &EnvelopeOptions,
) -> Result<(f64, f64)> {
    let n = opts.grid_points.max(3);
    loop {
        let h = (hi - lo) / (n - 1) as f64;
        let vals: Vec<f64> = (0..n).map(|k| g(lo + h * k as f64)).collect();
        if let Some(k) = vals.iter().position(|v| v.is_nan()) {
            return Ok((lo + h * k as f64, f64::NAN));
        }
        let k = (0..n).fold(0, |b, k| if vals[k] < vals[b] { k } else { b });
        let v = vals[k];
        // expand when the minimum sits strictly on an edge of the grid
        let left_edge = k == 0 && vals[0] < vals[1];
        let right_edge = k == n - 1 && vals[n - 1] < vals[n - 2];
        if left_edge || right_edge || !v.is_finite() {
            let width = hi - lo;
            if width > 2.0 * opts.bracket.cap {
                return Err(RiskError::EnvelopeUnbounded {
                    cap: opts.bracket.cap,
                });
            }
            if left_edge || !v.is_finite() {
                lo -= width;
            }
            if right_edge || !v.is_finite() {
                hi += width;
            }
            continue;
        }
        let r = lo + h * k as f64;
        return Ok(golden_with_best(g, r - h, r + h, opts.bracket.tol, (r, v)));
    }
}

/// Optimized certainty equivalent: the envelope of `X ↦ E[ℓ(X)]` for a
/// nonincreasing loss.
pub fn oce(space: &FiniteProbSpace, x: &Position, loss: &LossFunction) -> Result<f64> {
    loss.require_nonincreasing()?;
    let opts = EnvelopeOptions {
        convex: loss.is_convex(),
        ..EnvelopeOptions::default()
    };
    let phi = |z: &Position| Ok(ExtendedReal::from_f64(loss.expected(space, z.as_slice())));
    Ok(envelope(space, phi, x, &opts)?.value)
}

/// Loss-based shortfall risk `inf { s | E[ℓ(−X − s)] ≤ r0 }`.
pub fn shortfall(
    space: &FiniteProbSpace,
    x: &Position,
    loss: &LossFunction,
    r0: f64,
) -> Result<f64> {
    shortfall_with(space, x, loss, r0, &BracketPolicy::default())
}

pub fn shortfall_with(
    space: &FiniteProbSpace,
    x: &Position,
    loss: &LossFunction,
    r0: f64,
    policy: &BracketPolicy,
) -> Result<f64> {
    loss.require_increasing()?;
    space.check(x)?;
    let neg: Vec<f64> = x.as_slice().iter().map(|v| -v).collect();
    let mut trail: Vec<(f64, f64)> = Vec::new();
    let found = threshold::<RiskError>(policy, |s| {
        let z: Vec<f64> = neg.iter().map(|v| v - s).collect();
        let g = loss.expected(space, &z);
        if g.is_nan() {
            return Err(RiskError::InvalidLoss(format!(
                "{loss} produced NaN at s = {s}"
            )));
        }
        trail.push((s, g));
        Ok(g <= r0)
    })?;
    trail.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(w) = trail
        .windows(2)
        .find(|w| w[1].1 > w[0].1 + 1e-12 * w[0].1.abs().max(1.0))
    {
        return Err(RiskError::InvalidLoss(format!(
            "E[ℓ(−X − s)] increases from {} at s = {} to {} at s = {}",
            w[0].1, w[0].0, w[1].1, w[1].0
        )));
    }
    match found {
        Ok(s) => Ok(s),
        Err(SearchFailure::NeverTrue) | Err(SearchFailure::AlwaysTrue) => {
            Err(RiskError::InfeasibleThreshold {
                r0,
                cap: policy.cap,
            })
        }
    }
}

/// Finitely supported probability measure on levels `(0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureMeasure {
    /// `(level, weight)`, levels strictly increasing.
    atoms: Vec<(f64, f64)>,
}

impl MixtureMeasure {
    /// Duplicate levels are merged; weights are renormalised after the
    /// sum-to-one check.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(RiskError::Validation(
                "mixture needs at least one level".into(),
            ));
        }
        for &(a, w) in &atoms {
            Level::new(a)?;
            if !(w > 0.0 && w.is_finite()) {
                return Err(RiskError::Validation(format!(
                    "mixture weight {w} at level {a} must be positive"
                )));
            }
        }
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(RiskError::Validation(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        let mut sorted = atoms;
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(sorted.len());
        for (a, w) in sorted {
            match merged.last_mut() {
                Some(last) if last.0 == a => last.1 += w,
                _ => merged.push((a, w)),
            }
        }
        for m in &mut merged {
            m.1 /= total;
        }
        Ok(Self { atoms: merged })
    }

    pub fn dirac(alpha: f64) -> Result<Self> {
        Self::new(vec![(alpha, 1.0)])
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }
}

/// `Σ wᵢ · AV@R_{αᵢ}(X)`.
pub fn kusuoka_mixture(space: &FiniteProbSpace, x: &Position, m: &MixtureMeasure) -> Result<f64> {
    m.atoms
        .iter()
        .map(|&(a, w)| Ok(w * avar(space, x, a)?))
        .sum()
}

/// Spectrum `φ(u) = Σ wᵢ/αᵢ · 1_{(0, αᵢ]}(u)` of an AV@R mixture.
pub fn spectrum_from_mixture(m: &MixtureMeasure) -> RiskSpectrum {
    let levels: Vec<f64> = m.atoms.iter().map(|(a, _)| *a).collect();
    let mut breakpoints = Vec::with_capacity(levels.len() + 2);
    breakpoints.push(0.0);
    breakpoints.extend_from_slice(&levels);
    let mut values: Vec<f64> = (0..levels.len())
        .map(|j| m.atoms[j..].iter().map(|(a, w)| w / a).sum())
        .collect();
    if *levels.last().unwrap() < 1.0 {
        breakpoints.push(1.0);
        values.push(0.0);
    }
    RiskSpectrum::new(breakpoints, values).expect("valid mixture always yields a valid spectrum")
}

/// `E[e^{−X}]`, a monotone non-cash-additive functional used in examples.
pub fn exp_moment(space: &FiniteProbSpace, x: &Position) -> Result<f64> {
    let ex = Position::new(x.as_slice().iter().map(|v| (-v).exp()).collect())?;
    expectation(space, &ex, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{entropic, expected_loss, spectral};

    const LOG_COSH_1: f64 = 0.433_780_830_483_027;

    fn four_point() -> (FiniteProbSpace, Position) {
        let space = FiniteProbSpace::uniform(4).unwrap();
        let x = space.position(vec![-2.0, -1.0, 0.0, 3.0]).unwrap();
        (space, x)
    }

    fn coin() -> (FiniteProbSpace, Position) {
        let space = FiniteProbSpace::uniform(2).unwrap();
        let x = space.position(vec![1.0, -1.0]).unwrap();
        (space, x)
    }

    #[test]
    fn envelope_of_cash_additive_is_identity() {
        let (space, x) = four_point();
        let phi = |z: &Position| expected_loss(&space, z).map(ExtendedReal::Finite);
        let r = envelope(&space, phi, &x, &EnvelopeOptions::default()).unwrap();
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn envelope_hinge_is_avar() {
        let (space, x) = four_point();
        let phi = |z: &Position| {
            let v: f64 = space
                .probs()
                .iter()
                .zip(z.as_slice())
                .map(|(p, v)| p * (-v).max(0.0) / 0.5)
                .sum();
            Ok(ExtendedReal::Finite(v))
        };
        let r = envelope(&space, phi, &x, &EnvelopeOptions::default()).unwrap();
        assert!((r.value - 1.5).abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn envelope_exp_moment_at_zero() {
        // g(r) = e^r − r, minimised at r = 0 with value 1
        let space = FiniteProbSpace::uniform(3).unwrap();
        let phi = |z: &Position| exp_moment(&space, z).map(ExtendedReal::Finite);
        let r = envelope(&space, phi, &space.zero(), &EnvelopeOptions::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert!(r.argmin.abs() < 1e-5);
    }

    #[test]
    fn envelope_nonconvex_scan_agrees() {
        let (space, x) = four_point();
        let phi = |z: &Position| exp_moment(&space, z).map(ExtendedReal::Finite);
        let convex = envelope(&space, phi, &x, &EnvelopeOptions::default()).unwrap();
        let phi = |z: &Position| exp_moment(&space, z).map(ExtendedReal::Finite);
        let scan = envelope(&space, phi, &x, &EnvelopeOptions::nonconvex()).unwrap();
        assert!((convex.value - scan.value).abs() < 1e-9);
    }

    #[test]
    fn envelope_unbounded_below_is_an_error() {
        let (space, x) = four_point();
        let phi = |_: &Position| Ok(ExtendedReal::Finite(0.0));
        assert!(matches!(
            envelope(&space, phi, &x, &EnvelopeOptions::default()),
            Err(RiskError::EnvelopeUnbounded { .. })
        ));
        let phi = |_: &Position| Ok(ExtendedReal::Finite(0.0));
        assert!(matches!(
            envelope(&space, phi, &x, &EnvelopeOptions::nonconvex()),
            Err(RiskError::EnvelopeUnbounded { .. })
        ));
    }

    #[test]
    fn envelope_with_infinite_region() {
        // φ(X) = E[−X] if min X ≥ −10, else +∞
        let (space, x) = four_point();
        let phi = |z: &Position| {
            if z.min() >= -10.0 {
                expected_loss(&space, z).map(ExtendedReal::Finite)
            } else {
                Ok(ExtendedReal::PosInfinity)
            }
        };
        let r = envelope(&space, phi, &x.shifted(-100.0), &EnvelopeOptions::default()).unwrap();
        assert!((r.value - 100.0).abs() < 1e-9);
    }

    #[test]
    fn oce_examples() {
        let (space, x) = four_point();
        let lin = LossFunction::oce(LossShape::Linear).unwrap();
        assert!(oce(&space, &x, &lin).unwrap().abs() < 1e-12);

        let (cs, cx) = coin();
        let exp = LossFunction::oce(LossShape::Exponential { beta: 1.0 }).unwrap();
        assert!((oce(&cs, &cx, &exp).unwrap() - LOG_COSH_1).abs() < 1e-10);

        let hinge = LossFunction::oce(LossShape::Hinge { alpha: 0.5 }).unwrap();
        assert!((oce(&space, &x, &hinge).unwrap() - 1.5).abs() < 1e-9);
    }

    #[test]
    fn oce_rejects_increasing_loss() {
        let (space, x) = four_point();
        let inc = LossFunction::shortfall(LossShape::Linear).unwrap();
        assert!(matches!(
            oce(&space, &x, &inc),
            Err(RiskError::InvalidLoss(_))
        ));
    }

    #[test]
    fn shortfall_examples() {
        let (space, x) = four_point();
        let lin = LossFunction::shortfall(LossShape::Linear).unwrap();
        assert!(shortfall(&space, &x, &lin, 0.0).unwrap().abs() <= 1e-10);

        let (cs, cx) = coin();
        let exp = LossFunction::shortfall(LossShape::Exponential { beta: 1.0 }).unwrap();
        let v = shortfall(&cs, &cx, &exp, 1.0).unwrap();
        assert!((v - LOG_COSH_1).abs() < 1e-9);
        assert!((v - entropic(&cs, &cx, 1.0).unwrap()).abs() < 1e-9);

        let pow = LossFunction::shortfall(LossShape::Power { p: 2.0 }).unwrap();
        let base = shortfall(&space, &space.zero(), &pow, 0.25).unwrap();
        assert!((base + 0.5).abs() < 1e-9);
        let shifted = shortfall(&space, &space.constant(3.0), &pow, 0.25).unwrap();
        assert!((shifted - (base - 3.0)).abs() < 1e-9);
    }

    #[test]
    fn shortfall_infeasible_threshold() {
        // hinge loss ≥ 0 everywhere, r0 = −1 unreachable
        let (space, x) = four_point();
        let hinge = LossFunction::shortfall(LossShape::Hinge { alpha: 0.5 }).unwrap();
        assert!(matches!(
            shortfall(&space, &x, &hinge, -1.0),
            Err(RiskError::InfeasibleThreshold { .. })
        ));
    }

    #[test]
    fn shortfall_detects_non_monotone_loss() {
        // passes the probe grid but dips between probes
        let space = FiniteProbSpace::uniform(4).unwrap();
        let dip = LossFunction::custom(
            "dip",
            |v: f64| if v > 0.3 && v < 0.9 { -1e6 } else { v },
            LossDirection::Increasing,
            false,
        )
        .unwrap();
        let res = shortfall(&space, &space.zero(), &dip, 0.2);
        assert!(matches!(res, Err(RiskError::InvalidLoss(_))), "{res:?}");
    }

    #[test]
    fn custom_loss_direction_checked() {
        assert!(LossFunction::custom("neg", |v| -v, LossDirection::Increasing, true).is_err());
        assert!(LossFunction::custom("const", |_| 1.0, LossDirection::Increasing, true).is_err());
        assert!(LossFunction::custom(
            "sq",
            |v: f64| v.max(0.0).powi(2),
            LossDirection::Increasing,
            true
        )
        .is_ok());
    }

    #[test]
    fn mixture_examples() {
        let (space, x) = four_point();
        let m = MixtureMeasure::dirac(0.5).unwrap();
        assert_eq!(kusuoka_mixture(&space, &x, &m).unwrap(), 1.5);
        let m = MixtureMeasure::new(vec![(0.5, 0.5), (1.0, 0.5)]).unwrap();
        assert!((kusuoka_mixture(&space, &x, &m).unwrap() - 0.75).abs() < 1e-15);
        assert!((kusuoka_mixture(&space, &space.constant(2.0), &m).unwrap() + 2.0).abs() < 1e-15);
    }

    #[test]
    fn mixture_validation() {
        assert!(MixtureMeasure::new(vec![]).is_err());
        assert!(MixtureMeasure::new(vec![(0.0, 1.0)]).is_err());
        assert!(MixtureMeasure::new(vec![(0.5, 0.6), (0.7, 0.6)]).is_err());
        assert!(MixtureMeasure::new(vec![(0.5, -0.5), (0.7, 1.5)]).is_err());
        let m = MixtureMeasure::new(vec![(0.5, 0.25), (0.2, 0.5), (0.5, 0.25)]).unwrap();
        assert_eq!(m.atoms(), &[(0.2, 0.5), (0.5, 0.5)]);
    }

    #[test]
    fn spectrum_from_mixture_examples() {
        let s = spectrum_from_mixture(&MixtureMeasure::dirac(1.0).unwrap());
        assert_eq!((s.breakpoints(), s.values()), (&[0.0, 1.0][..], &[1.0][..]));
        let s = spectrum_from_mixture(&MixtureMeasure::dirac(0.5).unwrap());
        assert_eq!(
            (s.breakpoints(), s.values()),
            (&[0.0, 0.5, 1.0][..], &[2.0, 0.0][..])
        );
        let m = MixtureMeasure::new(vec![(0.5, 0.5), (1.0, 0.5)]).unwrap();
        let s = spectrum_from_mixture(&m);
        assert_eq!(
            (s.breakpoints(), s.values()),
            (&[0.0, 0.5, 1.0][..], &[1.5, 0.5][..])
        );
        let (space, x) = four_point();
        assert!((spectral(&space, &x, &s).unwrap() - 0.75).abs() < 1e-15);
    }
}
