//! First- and second-order stochastic dominance through V@R and AV@R.
//!
//! `X ⪯ Y` reads "X is dominated by Y". The universal statements over all
//! levels α ∈ (0, 1] reduce to finitely many checks:
//!
//! * `α ↦ V@R_α` is a step function, constant between consecutive
//!   cumulative probabilities of the law, so one level per merged interval
//!   decides FSD;
//! * `α ↦ α·AV@R_α = −∫₀^α q(u) du` is piecewise linear with kinks only at
//!   those cumulative probabilities, so checking the breakpoints decides SSD.
//!
//! The oracles work on the outcome axis instead (CDFs and integrated CDFs)
//! and share no code with the level-based checks.

use serde::Serialize;

use crate::error::Result;
use crate::space::{distribution_of, Distribution, FiniteProbSpace, Position};

/// Where the defining inequality fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Witness {
    Level(f64),
    Threshold(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DominanceVerdict {
    pub dominated: bool,
    pub witness: Option<Witness>,
}

impl DominanceVerdict {
    fn holds() -> Self {
        Self {
            dominated: true,
            witness: None,
        }
    }

    fn fails(w: Witness) -> Self {
        Self {
            dominated: false,
            witness: Some(w),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominanceOptions {
    /// Allowed float noise in each inequality; 0 for exact inputs.
    pub slack: f64,
}

impl Default for DominanceOptions {
    fn default() -> Self {
        Self { slack: 1e-12 }
    }
}

impl DominanceOptions {
    pub fn strict() -> Self {
        Self { slack: 0.0 }
    }
}

/// Merged cumulative probabilities of both laws, with points closer than
/// `tol` collapsed; always ends at 1.
pub fn level_breakpoints(dx: &Distribution, dy: &Distribution, tol: f64) -> Vec<f64> {
    let mut all: Vec<f64> = dx
        .cumulative()
        .iter()
        .chain(dy.cumulative())
        .copied()
        .collect();
    all.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(all.len());
    for b in all {
        match out.last() {
            Some(&last) if b - last <= tol => {}
            _ => out.push(b),
        }
    }
    if let Some(last) = out.last_mut() {
        if 1.0 - *last <= tol {
            *last = 1.0;
        }
    }
    out
}

const CLUSTER_TOL: f64 = 1e-12;

/// `X ⪯_SSD Y ⇔ AV@R_α(X) ≥ AV@R_α(Y)` for all α.
pub fn ssd_dominated(
    space: &FiniteProbSpace,
    x: &Position,
    y: &Position,
) -> Result<DominanceVerdict> {
    ssd_dominated_with(space, x, y, &DominanceOptions::default())
}

pub fn ssd_dominated_with(
    space: &FiniteProbSpace,
    x: &Position,
    y: &Position,
    opts: &DominanceOptions,
) -> Result<DominanceVerdict> {
    Ok(ssd_between_laws(
        &distribution_of(space, x)?,
        &distribution_of(space, y)?,
        opts,
    ))
}

/// SSD on laws, via tail integrals at the merged level breakpoints.
pub fn ssd_between_laws(
    dx: &Distribution,
    dy: &Distribution,
    opts: &DominanceOptions,
) -> DominanceVerdict {
    for alpha in level_breakpoints(dx, dy, CLUSTER_TOL) {
        // α·AV@R_α(X) ≥ α·AV@R_α(Y)  ⇔  ∫₀^α q_X ≤ ∫₀^α q_Y
        if dx.tail_integral(alpha) > dy.tail_integral(alpha) + opts.slack {
            return DominanceVerdict::fails(Witness::Level(alpha));
        }
    }
    DominanceVerdict::holds()
}

/// `X ⪯_FSD Y ⇔ V@R_α(X) ≥ V@R_α(Y)` for all α.
pub fn fsd_dominated(
    space: &FiniteProbSpace,
    x: &Position,
    y: &Position,
) -> Result<DominanceVerdict> {
    fsd_dominated_with(space, x, y, &DominanceOptions::default())
}

pub fn fsd_dominated_with(
    space: &FiniteProbSpace,
    x: &Position,
    y: &Position,
    opts: &DominanceOptions,
) -> Result<DominanceVerdict> {
    Ok(fsd_between_laws(
        &distribution_of(space, x)?,
        &distribution_of(space, y)?,
        opts,
    ))
}

/// FSD on laws: upper quantiles compared once inside every merged interval
/// and at α = 1.
pub fn fsd_between_laws(
    dx: &Distribution,
    dy: &Distribution,
    opts: &DominanceOptions,
) -> DominanceVerdict {
    let mut left = 0.0;
    let mut levels = Vec::new();
    for b in level_breakpoints(dx, dy, CLUSTER_TOL) {
        levels.push(0.5 * (left + b));
        left = b;
    }
    levels.push(1.0);
    for alpha in levels {
        let qx = dx.upper_quantile(alpha).expect("level in (0, 1]");
        let qy = dy.upper_quantile(alpha).expect("level in (0, 1]");
        // V@R_α(X) ≥ V@R_α(Y)  ⇔  q⁺_X(α) ≤ q⁺_Y(α)
        if qx > qy + opts.slack {
            return DominanceVerdict::fails(Witness::Level(alpha));
        }
    }
    DominanceVerdict::holds()
}

/// `E[(t − X)⁺] = ∫_{−∞}^t F_X(s) ds`.
fn integrated_cdf(d: &Distribution, t: f64) -> f64 {
    d.points()
        .take_while(|(x, _)| *x <= t)
        .map(|(x, p)| p * (t - x))
        .sum()
}

fn merged_outcomes(dx: &Distribution, dy: &Distribution) -> Vec<f64> {
    let mut ts: Vec<f64> = dx.outcomes().iter().chain(dy.outcomes()).copied().collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts
}

/// Independent SSD check: `∫_{−∞}^t F_X ≥ ∫_{−∞}^t F_Y` at every outcome of
/// either law (the difference is piecewise linear between them and constant
/// beyond the largest).
pub fn ssd_oracle(dx: &Distribution, dy: &Distribution) -> bool {
    ssd_oracle_witness(dx, dy, DominanceOptions::default().slack).is_none()
}

pub fn ssd_oracle_witness(dx: &Distribution, dy: &Distribution, slack: f64) -> Option<Witness> {
    merged_outcomes(dx, dy)
        .into_iter()
        .find(|&t| integrated_cdf(dx, t) + slack < integrated_cdf(dy, t))
        .map(Witness::Threshold)
}

/// Independent FSD check: `F_X(t) ≥ F_Y(t)` at every outcome of either law.
pub fn fsd_oracle(dx: &Distribution, dy: &Distribution) -> bool {
    fsd_oracle_witness(dx, dy, DominanceOptions::default().slack).is_none()
}

/// `slack` is measured on the outcome axis, like the level-based check:
/// `q_X ≤ q_Y + s` everywhere iff `F_X(t) ≥ F_Y(t − s)` for all `t`, and
/// the difference only changes at outcomes of X or at shifted outcomes of Y.
pub fn fsd_oracle_witness(dx: &Distribution, dy: &Distribution, slack: f64) -> Option<Witness> {
    let mut ts: Vec<f64> = dx
        .outcomes()
        .iter()
        .copied()
        .chain(dy.outcomes().iter().map(|y| y + slack))
        .collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    ts.into_iter()
        .find(|&t| dx.cdf(t) + CLUSTER_TOL < dy.cdf(t - slack))
        .map(Witness::Threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law(points: Vec<(f64, f64)>) -> Distribution {
        Distribution::from_points(points).unwrap()
    }

    #[test]
    fn ssd_examples() {
        let space = FiniteProbSpace::uniform(4).unwrap();
        let x = space.position(vec![-2.0, -1.0, 0.0, 3.0]).unwrap();
        assert!(ssd_dominated(&space, &x, &x).unwrap().dominated);
        assert!(
            ssd_dominated(&space, &x, &x.shifted(1.0))
                .unwrap()
                .dominated
        );

        let coin = FiniteProbSpace::uniform(2).unwrap();
        let z = coin.position(vec![1.0, -1.0]).unwrap();
        let zero = coin.zero();
        assert!(ssd_dominated(&coin, &z, &zero).unwrap().dominated);
        let v = ssd_dominated(&coin, &zero, &z).unwrap();
        assert!(!v.dominated);
        match v.witness {
            Some(Witness::Level(a)) => assert!(a < 1.0),
            other => panic!("unexpected witness {other:?}"),
        }
        assert!(ssd_oracle(
            &distribution_of(&coin, &z).unwrap(),
            &distribution_of(&coin, &zero).unwrap()
        ));
        assert!(!ssd_oracle(
            &distribution_of(&coin, &zero).unwrap(),
            &distribution_of(&coin, &z).unwrap()
        ));
    }

    #[test]
    fn fsd_examples() {
        let space = FiniteProbSpace::uniform(2).unwrap();
        let x = space.position(vec![3.0, -2.0]).unwrap();
        assert!(fsd_dominated(&space, &x, &x).unwrap().dominated);
        assert!(
            fsd_dominated(&space, &x, &x.shifted(1.0))
                .unwrap()
                .dominated
        );
        let back = fsd_dominated(&space, &x.shifted(1.0), &x).unwrap();
        assert!(!back.dominated && back.witness.is_some());

        let flat = space.position(vec![0.0, 0.0]).unwrap();
        let spread = space.position(vec![-1.0, 1.0]).unwrap();
        assert!(!fsd_dominated(&space, &flat, &spread).unwrap().dominated);
        assert!(!fsd_dominated(&space, &spread, &flat).unwrap().dominated);
    }

    #[test]
    fn oracle_examples() {
        let d = law(vec![(-1.0, 0.3), (2.0, 0.7)]);
        assert!(ssd_oracle(&d, &d) && fsd_oracle(&d, &d));
        let at0 = law(vec![(0.0, 1.0)]);
        let at1 = law(vec![(1.0, 1.0)]);
        assert!(ssd_oracle(&at0, &at1));
        assert!(!ssd_oracle(&at1, &at0));
        assert!(fsd_oracle(&at0, &at1));
    }

    #[test]
    fn breakpoints_cluster_float_noise() {
        let a = law(vec![(0.0, 0.1 + 0.2), (1.0, 0.7)]);
        let b = law(vec![(0.0, 0.3), (1.0, 0.7)]);
        assert_eq!(level_breakpoints(&a, &b, 1e-12).len(), 2);
    }

    #[test]
    fn strict_mode_has_no_slack() {
        let a = law(vec![(0.0, 0.5), (1.0, 0.5)]);
        let b = law(vec![(0.0, 0.5), (1.0 - 1e-14, 0.5)]);
        assert!(ssd_between_laws(&a, &b, &DominanceOptions::default()).dominated);
        assert!(!ssd_between_laws(&a, &b, &DominanceOptions::strict()).dominated);
    }
}
