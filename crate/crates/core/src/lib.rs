//! Monetary risk measures on finite probability spaces.
//!
//! Positions are payoff vectors over finitely many atoms; risk values are
//! capital requirements (cash-additive: `ρ(X + r·1) = ρ(X) − r`). The crate
//! evaluates the standard catalogue (expected loss, V@R, AV@R, worst case,
//! entropic, spectral, shortfall, AV@R mixtures, cash-additive envelopes),
//! converts between risk measures and acceptance sets, checks dual
//! representations against closed-form maximisers and a sampling oracle,
//! and decides first/second-order stochastic dominance.

// `!(a < b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod axioms;
pub mod construct;
pub mod dominance;
pub mod duality;
pub mod error;
pub mod extended;
pub mod measures;
pub mod sample;
pub mod search;
pub mod space;

pub use acceptance::{acceptance_of, rho_from_acceptance, tau, AcceptanceSet};
pub use construct::{
    envelope, kusuoka_mixture, oce, shortfall, spectrum_from_mixture, LossDirection, LossFunction,
    LossShape, MixtureMeasure,
};
pub use dominance::{fsd_dominated, ssd_dominated, ssd_oracle, DominanceVerdict};
pub use duality::{dual_evaluate, Density, DualRepresentation};
pub use error::{Result, RiskError};
pub use extended::ExtendedReal;
pub use measures::{
    avar, entropic, expected_loss, spectral, var, worst_case, Level, MeasureKind, RiskAversion,
    RiskMeasureSpec, RiskSpectrum,
};
pub use space::{distribution_of, expectation, Distribution, FiniteProbSpace, Position};
